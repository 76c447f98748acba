//! Instance constructions with guaranteed minimax structure.
//!
//! The central one is the inf-convolution
//! `f(x, y) = min_z { g(z, y) + K·φ(x, z) }` with
//! `φ(x, z) = max(ξ(x) − ξ(z), 0)`. Since `φ(x3, ·) ≤ φ(x1, ·)` whenever
//! `ξ(x3) ≤ ξ(x1)`, the row with smaller `ξ` lies below both rows of any
//! pair, which makes `f` t-convexlike for every `t`. The mirrored
//! sup-convolution on columns gives s-concavelike matrices for every `s`.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

use crate::{BiMatrix, Error, Result, Tolerance};

/// Largest row or column count accepted by the generators.
pub const MAX_DIM: usize = 2000;

/// Real function on a finite index set.
#[derive(Debug, Clone, PartialEq)]
pub struct XiVector(Vec<f64>);

impl XiVector {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if let Some(i) = xi.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry { row: i, col: 0 });
        }
        Ok(Self(xi))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Lowest index among those with the smaller `ξ` value.
    pub fn lower_of(&self, a: usize, b: usize) -> usize {
        let (xa, xb) = (self.0[a], self.0[b]);
        if xa < xb || (xa == xb && a <= b) { a } else { b }
    }
}

/// `φ[x][z] = max(ξ[x] − ξ[z], 0)`.
pub fn phi_from_xi(xi: &XiVector) -> BiMatrix {
    let v = xi.as_slice();
    BiMatrix::from_fn(v.len(), v.len(), |x, z| (v[x] - v[z]).max(0.0)).expect("finite ξ gives finite φ")
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeK(k))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfConvInstance {
    pub g: BiMatrix,
    pub xi: XiVector,
    pub k: f64,
    pub f: BiMatrix,
    /// Row-major `m × n`: the lowest minimizing `z` for each `(x, y)`.
    pub argmin_z: Vec<usize>,
}

impl InfConvInstance {
    pub fn argmin(&self, x: usize, y: usize) -> usize {
        self.argmin_z[x * self.f.cols() + y]
    }

    /// Pairwise t-convexlike witness read off `ξ`: the smaller-`ξ` row,
    /// lowest index on ties. Valid for every `t`.
    pub fn convexlike_witness(&self, x1: usize, x2: usize) -> usize {
        self.xi.lower_of(x1, x2)
    }
}

/// `f[x][y] = min_z (g[z][y] + K·φ[x][z])`, recording the lowest argmin.
pub fn inf_convolution(g: &BiMatrix, xi: &XiVector, k: f64) -> Result<InfConvInstance> {
    check_k(k)?;
    if xi.len() != g.rows() {
        return Err(Error::LengthMismatch {
            expected: g.rows(),
            found: xi.len(),
        });
    }
    let phi = phi_from_xi(xi);
    let (m, n) = g.shape();
    let mut data = Vec::with_capacity(m * n);
    let mut argmin_z = Vec::with_capacity(m * n);
    for x in 0..m {
        for y in 0..n {
            let mut best = (0, f64::INFINITY);
            for z in 0..m {
                let v = g.get(z, y) + k * phi.get(x, z);
                if v < best.1 {
                    best = (z, v);
                }
            }
            argmin_z.push(best.0);
            data.push(best.1);
        }
    }
    Ok(InfConvInstance {
        g: g.clone(),
        xi: xi.clone(),
        k,
        f: BiMatrix::from_flat(m, n, data)?,
        argmin_z,
    })
}

/// `f[x1][y] − f[x2][y] ≤ K·φ[x1][x2] + eps_feas` over all triples.
pub fn lipschitz_transfer_check(inst: &InfConvInstance, tol: &Tolerance) -> bool {
    lipschitz_transfer_holds(&inst.f, &inst.xi, inst.k, tol)
}

/// [`lipschitz_transfer_check`] for a bare matrix with its `ξ` and `K`.
pub fn lipschitz_transfer_holds(f: &BiMatrix, xi: &XiVector, k: f64, tol: &Tolerance) -> bool {
    if xi.len() != f.rows() {
        return false;
    }
    let phi = phi_from_xi(xi);
    (0..f.rows()).all(|x1| {
        (0..f.rows()).all(|x2| {
            let bound = k * phi.get(x1, x2) + tol.eps_feas;
            f.row(x1).iter().zip(f.row(x2)).all(|(a, b)| a - b <= bound)
        })
    })
}

/// Column-side mirror of [`inf_convolution`]:
/// `G[x][y] = max_w (h[x][w] − K·φ_η[y][w])`.
pub fn sup_convolution(h: &BiMatrix, eta: &XiVector, k: f64) -> Result<BiMatrix> {
    check_k(k)?;
    if eta.len() != h.cols() {
        return Err(Error::LengthMismatch {
            expected: h.cols(),
            found: eta.len(),
        });
    }
    Ok(inf_convolution(&h.transpose().neg(), eta, k)?.f.transpose().neg())
}

/// `h^×(ξ) = max_x (ξ[x] − h[x])`.
pub fn star_conjugate(h: &[f64], xi: &XiVector) -> Result<f64> {
    if h.len() != xi.len() {
        return Err(Error::LengthMismatch {
            expected: xi.len(),
            found: h.len(),
        });
    }
    Ok(xi
        .as_slice()
        .iter()
        .zip(h)
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Minimax over the set `A = {φ : φ(x) ≤ λ_x}` of functions on a finite `X`:
/// returns `(inf_x sup_{φ∈A} φ(x), sup_{φ∈A} inf_x φ(x))`. The bound vector
/// itself lies in `A` and attains both, so the two agree at `min_x λ_x`.
pub fn delta_set_value(bounds: &[f64]) -> Result<(f64, f64)> {
    if bounds.is_empty() {
        return Err(Error::EmptyDimension);
    }
    if let Some(i) = bounds.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteEntry { row: i, col: 0 });
    }
    // sup_{φ∈A} φ(x) = λ_x, and any φ ≤ λ has inf_x φ ≤ inf_x λ.
    let v = crate::min_of(bounds);
    Ok((v, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InstanceKind {
    Random,
    Convexlike,
    Concavelike,
    TwoFunction,
    Km2Ready,
}

impl InstanceKind {
    pub const ALL: [Self; 5] = [
        Self::Random,
        Self::Convexlike,
        Self::Concavelike,
        Self::TwoFunction,
        Self::Km2Ready,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Convexlike => "convexlike",
            Self::Concavelike => "concavelike",
            Self::TwoFunction => "two_function",
            Self::Km2Ready => "km2_ready",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Properties a generated instance has by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Guarantee {
    /// `f` is t-convexlike for every `t`.
    TConvexlike,
    /// `f` is s-concavelike for every `s`.
    SConcavelike,
    InfsupConvex,
    SupinfConcave,
    /// `f` is t-convexlike and supinf-concave, so the minimax equality holds.
    Km2Ready,
    /// `f(x1,·) − f(x2,·) ≤ K·φ(x1,x2)`.
    LipschitzTransfer,
    /// The second function `g` is s-concavelike for every `s`.
    GSConcavelike,
    GSupinfConcave,
    /// `f ≤ g` entrywise.
    FLeG,
}

impl Guarantee {
    pub const ALL: [Self; 9] = [
        Self::TConvexlike,
        Self::SConcavelike,
        Self::InfsupConvex,
        Self::SupinfConcave,
        Self::Km2Ready,
        Self::LipschitzTransfer,
        Self::GSConcavelike,
        Self::GSupinfConcave,
        Self::FLeG,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::TConvexlike => "t-convexlike",
            Self::SConcavelike => "s-concavelike",
            Self::InfsupConvex => "infsup-convex",
            Self::SupinfConcave => "supinf-concave",
            Self::Km2Ready => "km2-ready",
            Self::LipschitzTransfer => "lipschitz-transfer",
            Self::GSConcavelike => "g:s-concavelike",
            Self::GSupinfConcave => "g:supinf-concave",
            Self::FLeG => "f<=g",
        }
    }
}

/// Inputs and output of a [`sup_convolution`] call.
#[derive(Debug, Clone, PartialEq)]
pub struct SupConvInstance {
    pub h: BiMatrix,
    pub eta: XiVector,
    pub k: f64,
    pub result: BiMatrix,
}

/// Seeded instance with a record of how it was built.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub kind: InstanceKind,
    /// The primary matrix.
    pub f: BiMatrix,
    /// Second function, for `TwoFunction`.
    pub g: Option<BiMatrix>,
    /// Present when `f` is an inf-convolution.
    pub inf_conv: Option<InfConvInstance>,
    /// Present when a sup-convolution was applied (producing `f`, the
    /// inf-convolution input, or `g`, depending on kind).
    pub sup_conv: Option<SupConvInstance>,
    pub guarantees: Vec<Guarantee>,
}

/// Generator parameters; defaults are unit-scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub k: f64,
    /// `g` entries are uniform on `[-entry_range, entry_range]`.
    pub entry_range: f64,
    /// Upper end of the nonnegative noise added before building `g` in
    /// `TwoFunction`.
    pub noise: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            entry_range: 1.0,
            noise: 0.5,
        }
    }
}

struct Sampler(ChaCha8Rng);

impl Sampler {
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn matrix(&mut self, m: usize, n: usize, r: f64) -> BiMatrix {
        let data = (0..m * n).map(|_| self.uniform(-r, r)).collect();
        BiMatrix::from_flat(m, n, data).expect("bounded samples")
    }

    fn xi(&mut self, len: usize) -> XiVector {
        XiVector((0..len).map(|_| self.unit()).collect())
    }
}

/// Generate one instance; identical to `gen_instance_indexed(seed, 0, ..)`.
pub fn gen_instance(seed: u64, shape: (usize, usize), kind: InstanceKind) -> Result<GeneratedInstance> {
    gen_instance_indexed(seed, 0, shape, kind, &GenParams::default())
}

/// Generate the `index`-th instance of the stream for `seed`. Each index
/// uses its own ChaCha stream, so batches can be produced in any order.
pub fn gen_instance_indexed(
    seed: u64,
    index: u64,
    (m, n): (usize, usize),
    kind: InstanceKind,
    params: &GenParams,
) -> Result<GeneratedInstance> {
    if m == 0 || n == 0 || m > MAX_DIM || n > MAX_DIM {
        return Err(Error::ShapeCap {
            rows: m,
            cols: n,
            cap: MAX_DIM,
        });
    }
    check_k(params.k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut s = Sampler(rng);
    let r = params.entry_range;
    let k = params.k;

    let inst = match kind {
        InstanceKind::Random => GeneratedInstance {
            kind,
            f: s.matrix(m, n, r),
            g: None,
            inf_conv: None,
            sup_conv: None,
            guarantees: Vec::new(),
        },
        InstanceKind::Convexlike => {
            let g = s.matrix(m, n, r);
            let xi = s.xi(m);
            let ic = inf_convolution(&g, &xi, k)?;
            GeneratedInstance {
                kind,
                f: ic.f.clone(),
                g: None,
                inf_conv: Some(ic),
                sup_conv: None,
                guarantees: vec![
                    Guarantee::TConvexlike,
                    Guarantee::InfsupConvex,
                    Guarantee::LipschitzTransfer,
                ],
            }
        }
        InstanceKind::Concavelike => {
            let h = s.matrix(m, n, r);
            let eta = s.xi(n);
            let result = sup_convolution(&h, &eta, k)?;
            GeneratedInstance {
                kind,
                f: result.clone(),
                g: None,
                inf_conv: None,
                sup_conv: Some(SupConvInstance { h, eta, k, result }),
                guarantees: vec![Guarantee::SConcavelike, Guarantee::SupinfConcave],
            }
        }
        InstanceKind::Km2Ready => {
            let h = s.matrix(m, n, r);
            let eta = s.xi(n);
            let base = sup_convolution(&h, &eta, k)?;
            let xi = s.xi(m);
            let ic = inf_convolution(&base, &xi, k)?;
            GeneratedInstance {
                kind,
                f: ic.f.clone(),
                g: None,
                inf_conv: Some(ic),
                sup_conv: Some(SupConvInstance {
                    h,
                    eta,
                    k,
                    result: base,
                }),
                guarantees: vec![
                    Guarantee::TConvexlike,
                    Guarantee::SConcavelike,
                    Guarantee::InfsupConvex,
                    Guarantee::SupinfConcave,
                    Guarantee::Km2Ready,
                    Guarantee::LipschitzTransfer,
                ],
            }
        }
        InstanceKind::TwoFunction => {
            let g0 = s.matrix(m, n, r);
            let xi = s.xi(m);
            let ic = inf_convolution(&g0, &xi, k)?;
            let noise: Vec<f64> = (0..m * n).map(|_| s.uniform(0.0, params.noise)).collect();
            let h = BiMatrix::from_fn(m, n, |i, j| ic.f.get(i, j) + noise[i * n + j])?;
            let eta = s.xi(n);
            let g = sup_convolution(&h, &eta, k)?;
            GeneratedInstance {
                kind,
                f: ic.f.clone(),
                g: Some(g.clone()),
                inf_conv: Some(ic),
                sup_conv: Some(SupConvInstance { h, eta, k, result: g }),
                guarantees: vec![
                    Guarantee::TConvexlike,
                    Guarantee::InfsupConvex,
                    Guarantee::LipschitzTransfer,
                    Guarantee::GSConcavelike,
                    Guarantee::GSupinfConcave,
                    Guarantee::FLeG,
                ],
            }
        }
    };
    Ok(inst)
}
