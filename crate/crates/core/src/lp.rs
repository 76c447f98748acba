//! Dense two-phase primal simplex with Bland's rule, and the zero-sum game
//! solver built on top of it.
//!
//! The tableau is stored row-major with the reduced-cost row last. Entering
//! and leaving choices are made by lowest index, so a solve is fully
//! deterministic for a given problem.

use alloc::vec;
use alloc::vec::Vec;

use crate::{BiMatrix, Error, Result, Tolerance, Weights, validate_weights};

/// Pivot elements and reduced costs below this magnitude count as zero.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// Variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bounds {
    pub const NONNEGATIVE: Self = Self {
        lower: Some(0.0),
        upper: None,
    };
    pub const FREE: Self = Self {
        lower: None,
        upper: None,
    };
}

/// A dense linear program.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    direction: Direction,
    objective: Vec<f64>,
    coeffs: Vec<f64>,
    senses: Vec<Sense>,
    rhs: Vec<f64>,
    bounds: Vec<Bounds>,
}

impl LpProblem {
    /// A problem with no constraints and every variable in `[0, ∞)`.
    pub fn new(direction: Direction, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            direction,
            objective,
            coeffs: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![Bounds::NONNEGATIVE; n],
        }
    }

    pub fn add_constraint(&mut self, coeffs: &[f64], sense: Sense, rhs: f64) -> Result<&mut Self> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::DimensionMismatch("constraint length differs from objective"));
        }
        self.coeffs.extend_from_slice(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        Ok(self)
    }

    pub fn set_bounds(&mut self, var: usize, bounds: Bounds) -> Result<&mut Self> {
        let slot = self
            .bounds
            .get_mut(var)
            .ok_or(Error::DimensionMismatch("bound index out of range"))?;
        *slot = bounds;
        Ok(self)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.senses.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraint_row(&self, i: usize) -> &[f64] {
        let n = self.num_vars();
        &self.coeffs[i * n..(i + 1) * n]
    }

    pub fn sense(&self, i: usize) -> Sense {
        self.senses[i]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.coeffs.len() != n * self.senses.len() || self.rhs.len() != self.senses.len() {
            return Err(Error::DimensionMismatch("constraint storage is inconsistent"));
        }
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch("bounds length differs from objective"));
        }
        let finite = |x: &f64| x.is_finite();
        if !(self.objective.iter().all(finite) && self.coeffs.iter().all(finite) && self.rhs.iter().all(finite)) {
            return Err(Error::DimensionMismatch("coefficients must be finite"));
        }
        for b in &self.bounds {
            let bad = |v: Option<f64>| v.is_some_and(|x| !x.is_finite());
            if bad(b.lower) || bad(b.upper) {
                return Err(Error::DimensionMismatch("bounds must be finite or absent"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`].
///
/// `dual[i]` is the shadow price of constraint `i`: the rate of change of the
/// optimal objective in the problem's own direction as `rhs[i]` increases.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective: f64,
}

/// Violations found by [`LpSolution::certify`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LpResiduals {
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub duality_gap: f64,
}

impl LpSolution {
    /// Recomputes primal feasibility, dual feasibility and the duality gap
    /// directly from the problem data.
    pub fn residuals(&self, problem: &LpProblem) -> LpResiduals {
        let n = problem.num_vars();
        let x = &self.primal;
        let y = &self.dual;
        if x.len() != n || y.len() != problem.num_constraints() {
            return LpResiduals {
                primal_infeasibility: f64::INFINITY,
                dual_infeasibility: f64::INFINITY,
                duality_gap: f64::INFINITY,
            };
        }
        // Work in minimization form: flip the objective and duals for Maximize.
        let flip = match problem.direction {
            Direction::Minimize => 1.0,
            Direction::Maximize => -1.0,
        };
        let mut primal_inf: f64 = 0.0;
        let mut dual_inf: f64 = 0.0;
        let mut dual_obj = 0.0;
        let mut reduced: Vec<f64> = problem.objective.iter().map(|c| flip * c).collect();
        for (i, &yi) in y.iter().enumerate() {
            let row = problem.constraint_row(i);
            let ax: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            let b = problem.rhs[i];
            let yi = flip * yi;
            let viol = match problem.senses[i] {
                Sense::Le => {
                    dual_inf = dual_inf.max(yi);
                    ax - b
                }
                Sense::Ge => {
                    dual_inf = dual_inf.max(-yi);
                    b - ax
                }
                Sense::Eq => (ax - b).abs(),
            };
            primal_inf = primal_inf.max(viol);
            dual_obj += yi * b;
            for (r, a) in reduced.iter_mut().zip(row) {
                *r -= a * yi;
            }
        }
        for j in 0..n {
            let Bounds { lower, upper } = problem.bounds[j];
            if let Some(l) = lower {
                primal_inf = primal_inf.max(l - x[j]);
            }
            if let Some(u) = upper {
                primal_inf = primal_inf.max(x[j] - u);
            }
            let d = reduced[j];
            if d > 0.0 {
                match lower {
                    Some(l) => dual_obj += d * l,
                    None => dual_inf = dual_inf.max(d),
                }
            } else if d < 0.0 {
                match upper {
                    Some(u) => dual_obj += d * u,
                    None => dual_inf = dual_inf.max(-d),
                }
            }
        }
        let primal_obj: f64 = flip * problem.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>();
        LpResiduals {
            primal_infeasibility: primal_inf.max(0.0),
            dual_infeasibility: dual_inf.max(0.0),
            duality_gap: (primal_obj - dual_obj).abs(),
        }
    }

    /// `true` iff the solution is optimal and its certificates hold:
    /// primal and dual feasibility within `eps_feas`, gap within `eps_opt`.
    pub fn certify(&self, problem: &LpProblem, tol: &Tolerance) -> bool {
        if self.status != LpStatus::Optimal {
            return false;
        }
        let r = self.residuals(problem);
        r.primal_infeasibility <= tol.eps_feas && r.dual_infeasibility <= tol.eps_feas && r.duality_gap <= tol.eps_opt
    }
}

/// How an original variable maps onto nonnegative tableau columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + col`
    Shifted { col: usize, offset: f64 },
    /// `x = offset - col`
    Mirrored { col: usize, offset: f64 },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.data[pr * w + pc];
        for c in 0..w {
            self.data[pr * w + c] /= p;
        }
        self.data[pr * w + pc] = 1.0;
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let factor = row[pc];
            if factor != 0.0 {
                for (x, &pv) in row.iter_mut().zip(prow.iter()) {
                    *x -= factor * pv;
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Load `cost` into the objective row as reduced costs for the current basis.
    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        let obj = self.rows * w;
        self.data[obj..obj + w - 1].copy_from_slice(&cost[..w - 1]);
        self.data[obj + w - 1] = 0.0;
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    self.data[obj + c] -= cb * self.data[r * w + c];
                }
            }
        }
    }

    /// Runs Bland-rule pivots until optimal or unbounded. Returns `false` on
    /// unboundedness.
    ///
    /// Ratio ties go to the largest pivot element; after a long degenerate
    /// streak the tie-break switches to the lowest basis index.
    fn run(&mut self, allowed: usize, pivots: &mut usize, limit: usize) -> Result<bool> {
        let obj = self.rows;
        let mut degenerate = 0usize;
        let patience = 20 * (self.rows + allowed);
        loop {
            let Some(enter) = (0..allowed).find(|&c| self.at(obj, c) < -PIVOT_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, enter);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        let better_tie = if degenerate > patience {
                            self.basis[r] < self.basis[br]
                        } else {
                            a > self.at(br, enter)
                        };
                        if (!tie && ratio < best) || (tie && better_tie) {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
            let Some((pr, step)) = leave else {
                return Ok(false);
            };
            if step <= 0.0 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            *pivots += 1;
            if *pivots > limit {
                return Err(Error::CycleLimitExceeded(limit));
            }
            self.pivot(pr, enter);
        }
    }
}

/// Solve a linear program with the dense two-phase simplex method.
pub fn solve_lp(problem: &LpProblem, tol: &Tolerance) -> Result<LpSolution> {
    problem.validate()?;
    tol.validate()?;
    let n = problem.num_vars();

    // Map every variable onto nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new(); // (column, upper) for col <= upper
    for b in &problem.bounds {
        let map = match (b.lower, b.upper) {
            (Some(l), u) => {
                if let Some(u) = u {
                    extra_rows.push((ncols, u - l));
                }
                VarMap::Shifted { col: ncols, offset: l }
            }
            (None, Some(u)) => VarMap::Mirrored { col: ncols, offset: u },
            (None, None) => {
                ncols += 1;
                VarMap::Split {
                    pos: ncols - 1,
                    neg: ncols,
                }
            }
        };
        ncols += 1;
        maps.push(map);
    }

    // Collect rows in the structural columns, with rhs adjusted for offsets.
    let m_orig = problem.num_constraints();
    let m = m_orig + extra_rows.len();
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::with_capacity(m);
    for i in 0..m_orig {
        let mut a = vec![0.0; ncols];
        let mut b = problem.rhs[i];
        for (j, &coef) in problem.constraint_row(i).iter().enumerate() {
            match maps[j] {
                VarMap::Shifted { col, offset } => {
                    a[col] += coef;
                    b -= coef * offset;
                }
                VarMap::Mirrored { col, offset } => {
                    a[col] -= coef;
                    b -= coef * offset;
                }
                VarMap::Split { pos, neg } => {
                    a[pos] += coef;
                    a[neg] -= coef;
                }
            }
        }
        rows.push((a, problem.senses[i], b));
    }
    for &(col, ub) in &extra_rows {
        let mut a = vec![0.0; ncols];
        a[col] = 1.0;
        rows.push((a, Sense::Le, ub));
    }

    // Structural costs in minimization form.
    let sign = match problem.direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let mut struct_cost = vec![0.0; ncols];
    for (j, &c) in problem.objective.iter().enumerate() {
        let c = sign * c;
        match maps[j] {
            VarMap::Shifted { col, .. } => struct_cost[col] += c,
            VarMap::Mirrored { col, .. } => struct_cost[col] -= c,
            VarMap::Split { pos, neg } => {
                struct_cost[pos] += c;
                struct_cost[neg] -= c;
            }
        }
    }

    // Normalize to b >= 0 and lay out slack, surplus and artificial columns.
    let mut flipped = vec![false; m];
    for (i, (a, sense, b)) in rows.iter_mut().enumerate() {
        if *b < 0.0 {
            flipped[i] = true;
            for x in a.iter_mut() {
                *x = -*x;
            }
            *b = -*b;
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let art_start = ncols + n_slack;
    let total = art_start + n_art;
    let width = total + 1;
    let mut tab = Tableau {
        rows: m,
        width,
        data: vec![0.0; (m + 1) * width],
        basis: vec![0; m],
    };
    // Column that started as +e_i, used to read off duals.
    let mut unit_col = vec![0; m];
    let (mut next_slack, mut next_art) = (ncols, art_start);
    for (i, (a, sense, b)) in rows.iter().enumerate() {
        let base = i * width;
        tab.data[base..base + ncols].copy_from_slice(a);
        tab.data[base + total] = *b;
        match sense {
            Sense::Le => {
                tab.data[base + next_slack] = 1.0;
                unit_col[i] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                tab.data[base + next_slack] = -1.0;
                next_slack += 1;
                tab.data[base + next_art] = 1.0;
                unit_col[i] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                tab.data[base + next_art] = 1.0;
                unit_col[i] = next_art;
                next_art += 1;
            }
        }
        tab.basis[i] = unit_col[i];
    }

    let limit = 50_000 + 50 * (m + total);
    let mut pivots = 0;

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        let mut cost1 = vec![0.0; total];
        for c in &mut cost1[art_start..] {
            *c = 1.0;
        }
        tab.price(&cost1);
        tab.run(total, &mut pivots, limit)?;
        let infeasibility: f64 = (0..m).filter(|&r| tab.basis[r] >= art_start).map(|r| tab.rhs(r)).sum();
        if infeasibility > tol.eps_feas {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                primal: Vec::new(),
                dual: Vec::new(),
                objective: f64::NAN,
            });
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if tab.basis[r] >= art_start
                && let Some(c) = (0..art_start).find(|&c| tab.at(r, c).abs() > PIVOT_TOL)
            {
                tab.pivot(r, c);
            }
        }
    }

    // Phase 2: artificials may not re-enter.
    let mut cost2 = vec![0.0; total];
    cost2[..ncols].copy_from_slice(&struct_cost);
    tab.price(&cost2);
    if !tab.run(art_start, &mut pivots, limit)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: if sign > 0.0 { f64::NEG_INFINITY } else { f64::INFINITY },
        });
    }

    let mut values = vec![0.0; total];
    for r in 0..m {
        values[tab.basis[r]] = tab.rhs(r).max(0.0);
    }
    let primal: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shifted { col, offset } => offset + values[col],
            VarMap::Mirrored { col, offset } => offset - values[col],
            VarMap::Split { pos, neg } => values[pos] - values[neg],
        })
        .collect();
    // Reduced cost of a unit column is 0 - y_i, so y_i = -d.
    let dual: Vec<f64> = (0..m_orig)
        .map(|i| {
            let y = -tab.at(m, unit_col[i]);
            let y = if flipped[i] { -y } else { y };
            sign * y
        })
        .collect();
    let objective = problem.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        objective,
    })
}

/// Optimal mixed strategies of a zero-sum game on `F`.
///
/// Rows minimize and columns maximize: `value = min_λ max_j (λᵀF)_j =
/// max_μ min_i (Fμ)_i`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GameSolution {
    pub value: f64,
    pub row_weights: Weights,
    pub col_weights: Weights,
}

impl GameSolution {
    /// `max_j (λᵀF)_j`, the guaranteed ceiling of the row strategy.
    pub fn row_guarantee(&self, f: &BiMatrix) -> f64 {
        crate::max_of(&crate::row_mix(f, &self.row_weights))
    }

    /// `min_i (Fμ)_i`, the guaranteed floor of the column strategy.
    pub fn col_guarantee(&self, f: &BiMatrix) -> f64 {
        crate::min_of(&crate::col_mix(f, &self.col_weights))
    }

    /// Re-verify both strategies against `F` from scratch.
    pub fn verify(&self, f: &BiMatrix, tol: &Tolerance) -> bool {
        if self.row_weights.len() != f.rows() || self.col_weights.len() != f.cols() {
            return false;
        }
        if validate_weights(&self.row_weights, f.rows(), tol).is_err()
            || validate_weights(&self.col_weights, f.cols(), tol).is_err()
        {
            return false;
        }
        self.row_guarantee(f) <= self.value + tol.eps_cert && self.col_guarantee(f) >= self.value - tol.eps_cert
    }
}

/// Solve the zero-sum game on `F` (rows minimize, columns maximize).
///
/// Shifts `F` to be at least 1 everywhere, solves
/// `max Σp s.t. Pᵀp ≤ 1, p ≥ 0`, and reads the column strategy off the duals.
pub fn solve_zero_sum(f: &BiMatrix, tol: &Tolerance) -> Result<GameSolution> {
    let (m, n) = f.shape();
    let shift = 1.0 - f.min_entry();
    let mut lp = LpProblem::new(Direction::Maximize, vec![1.0; m]);
    let mut col = vec![0.0; m];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = f.get(i, j) + shift;
        }
        lp.add_constraint(&col, Sense::Le, 1.0)?;
    }
    let sol = solve_lp(&lp, tol)?;
    if sol.status != LpStatus::Optimal {
        // Pᵀp ≤ 1 with P ≥ 1 is feasible at p = 0 and bounded; unreachable for valid input.
        return Err(Error::DimensionMismatch("game LP did not reach an optimum"));
    }
    let psum: f64 = sol.primal.iter().sum();
    let ysum: f64 = sol.dual.iter().map(|y| y.max(0.0)).sum();
    let lambda: Vec<f64> = sol.primal.iter().map(|p| p / psum).collect();
    let mu: Vec<f64> = sol.dual.iter().map(|y| y / ysum).collect();
    let row_weights = validate_weights(&lambda, m, tol)?;
    let col_weights = validate_weights(&mu, n, tol)?;
    Ok(GameSolution {
        value: 1.0 / psum - shift,
        row_weights,
        col_weights,
    })
}
