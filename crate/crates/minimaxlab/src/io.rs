//! Instance files: JSON schemas, CSV sequences, digests and atomic writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use minimaxlab_core::alternative::FunctionFamily;
use minimaxlab_core::construct::{
    GeneratedInstance, Guarantee, InfConvInstance, InstanceKind, XiVector, inf_convolution, sup_convolution,
};
use minimaxlab_core::mazur::SampledSequence;
use minimaxlab_core::{BiMatrix, Error as CoreError, Tolerance, validate_bimatrix};
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid CSV: {0}")]
    Csv(String),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(name: impl Into<String>, message: impl std::fmt::Display) -> InputError {
    InputError::Field {
        field: name.into(),
        message: message.to_string(),
    }
}

/// Second stage of a doubly convolved instance: `g` was produced by
/// sup-convolving `h` with `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupStage {
    pub eta: Vec<f64>,
    #[serde(rename = "K")]
    pub k: f64,
    pub h: Vec<Vec<f64>>,
}

/// Every instance file shape, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceDoc {
    Bimatrix {
        rows: usize,
        cols: usize,
        data: Vec<Vec<f64>>,
    },
    Family {
        generators: usize,
        points: usize,
        members: Vec<Vec<f64>>,
    },
    Sequence {
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "Z")]
        z: usize,
        d: usize,
        data: Vec<Vec<Vec<f64>>>,
    },
    Infconv {
        xi: Vec<f64>,
        #[serde(rename = "K")]
        k: f64,
        g: Vec<Vec<f64>>,
        f: Vec<Vec<f64>>,
        guarantees: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sup: Option<SupStage>,
    },
    Supconv {
        eta: Vec<f64>,
        #[serde(rename = "K")]
        k: f64,
        h: Vec<Vec<f64>>,
        f: Vec<Vec<f64>>,
        guarantees: Vec<String>,
    },
    Pair {
        f: Vec<Vec<f64>>,
        g: Vec<Vec<f64>>,
        guarantees: Vec<String>,
        /// Row weights `f` was inf-convolved with, when known.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        xi: Option<Vec<f64>>,
        #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
    },
}

/// A validated instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Matrix(BiMatrix),
    Family(FunctionFamily),
    Sequence(SampledSequence),
    InfConv {
        inst: InfConvInstance,
        guarantees: Vec<Guarantee>,
    },
    SupConv {
        f: BiMatrix,
        guarantees: Vec<Guarantee>,
    },
    Pair {
        f: BiMatrix,
        g: BiMatrix,
        guarantees: Vec<Guarantee>,
        /// `(ξ, K)` of the inf-convolution that produced `f`.
        transfer: Option<(XiVector, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub doc: InstanceDoc,
    pub body: Body,
}

/// Instance identity embedded in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDigest {
    pub kind: String,
    pub shape: Vec<usize>,
    pub sha256: String,
}

impl InstanceDoc {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Bimatrix { .. } => "bimatrix",
            Self::Family { .. } => "family",
            Self::Sequence { .. } => "sequence",
            Self::Infconv { .. } => "infconv",
            Self::Supconv { .. } => "supconv",
            Self::Pair { .. } => "pair",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance documents serialize")
    }
}

impl Instance {
    /// The matrix analyzed as `f`, if the instance has one.
    pub fn primary(&self) -> Option<&BiMatrix> {
        match &self.body {
            Body::Matrix(f) | Body::SupConv { f, .. } | Body::Pair { f, .. } => Some(f),
            Body::Family(fam) => Some(fam.members()),
            Body::InfConv { inst, .. } => Some(&inst.f),
            Body::Sequence(_) => None,
        }
    }

    pub fn guarantees(&self) -> &[Guarantee] {
        match &self.body {
            Body::InfConv { guarantees, .. } | Body::SupConv { guarantees, .. } | Body::Pair { guarantees, .. } => {
                guarantees
            }
            _ => &[],
        }
    }

    pub fn digest(&self) -> InstanceDigest {
        let shape = match &self.body {
            Body::Sequence(s) => vec![s.funcs(), s.points(), s.dim()],
            _ => {
                let f = self.primary().expect("non-sequence instances have a matrix");
                vec![f.rows(), f.cols()]
            }
        };
        InstanceDigest {
            kind: self.doc.kind().to_string(),
            shape,
            sha256: hex::encode(Sha256::digest(self.doc.to_json().as_bytes())),
        }
    }
}

fn matrix(name: &str, data: &[Vec<f64>], rows: Option<usize>, cols: Option<usize>) -> Result<BiMatrix, InputError> {
    if let Some(r) = rows
        && r != data.len()
    {
        return Err(field(name, format_args!("declared {r} rows, found {}", data.len())));
    }
    let m = validate_bimatrix(data).map_err(|e| match e {
        CoreError::RaggedRows { row, expected, found } => field(
            format!("{name}[{row}]"),
            format_args!("expected {expected} entries, found {found}"),
        ),
        CoreError::NonFiniteEntry { row, col } => field(format!("{name}[{row}][{col}]"), "not finite"),
        other => field(name, other),
    })?;
    if let Some(c) = cols
        && c != m.cols()
    {
        return Err(field(name, format_args!("declared {c} columns, found {}", m.cols())));
    }
    Ok(m)
}

fn guarantees(names: &[String]) -> Result<Vec<Guarantee>, InputError> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            Guarantee::parse(n)
                .ok_or_else(|| field(format!("guarantees[{i}]"), format_args!("unknown guarantee `{n}`")))
        })
        .collect()
}

fn xi(name: &str, v: &[f64]) -> Result<XiVector, InputError> {
    XiVector::new(v.to_vec()).map_err(|e| field(name, e))
}

fn same_matrix(name: &str, declared: &BiMatrix, computed: &BiMatrix, tol: &Tolerance) -> Result<(), InputError> {
    if declared.shape() != computed.shape() {
        return Err(field(name, "shape differs from the recomputed convolution"));
    }
    match declared
        .as_slice()
        .iter()
        .zip(computed.as_slice())
        .position(|(a, b)| (a - b).abs() > tol.eps_feas)
    {
        Some(k) => Err(field(
            format!("{name}[{}][{}]", k / declared.cols(), k % declared.cols()),
            "differs from the recomputed convolution",
        )),
        None => Ok(()),
    }
}

/// Validate a parsed document. Convolution manifests are recomputed and
/// must match the stored result within `eps_feas`.
pub fn validate_doc(doc: InstanceDoc, tol: &Tolerance) -> Result<Instance, InputError> {
    let body = match &doc {
        InstanceDoc::Bimatrix { rows, cols, data } => Body::Matrix(matrix("data", data, Some(*rows), Some(*cols))?),
        InstanceDoc::Family {
            generators,
            points,
            members,
        } => Body::Family(FunctionFamily::new(matrix(
            "members",
            members,
            Some(*generators),
            Some(*points),
        )?)),
        InstanceDoc::Sequence { n, z, d, data } => Body::Sequence(sequence_from_nested(*n, *z, *d, data)?),
        InstanceDoc::Infconv {
            xi: x,
            k,
            g,
            f,
            guarantees: gs,
            sup,
        } => {
            let g = matrix("g", g, None, None)?;
            let f = matrix("f", f, None, None)?;
            if let Some(stage) = sup {
                let h = matrix("sup.h", &stage.h, None, None)?;
                let eta = xi("sup.eta", &stage.eta)?;
                let base = sup_convolution(&h, &eta, stage.k).map_err(|e| field("sup", e))?;
                same_matrix("g", &g, &base, tol)?;
            }
            let inst =
                inf_convolution(&g, &xi("xi", x)?, *k).map_err(|e| field(if *k < 0.0 { "K" } else { "xi" }, e))?;
            same_matrix("f", &f, &inst.f, tol)?;
            Body::InfConv {
                inst,
                guarantees: guarantees(gs)?,
            }
        }
        InstanceDoc::Supconv {
            eta,
            k,
            h,
            f,
            guarantees: gs,
        } => {
            let h = matrix("h", h, None, None)?;
            let f = matrix("f", f, None, None)?;
            let computed =
                sup_convolution(&h, &xi("eta", eta)?, *k).map_err(|e| field(if *k < 0.0 { "K" } else { "eta" }, e))?;
            same_matrix("f", &f, &computed, tol)?;
            Body::SupConv {
                f,
                guarantees: guarantees(gs)?,
            }
        }
        InstanceDoc::Pair {
            f,
            g,
            guarantees: gs,
            xi: x,
            k,
        } => {
            let f = matrix("f", f, None, None)?;
            let g = matrix("g", g, None, None)?;
            if f.shape() != g.shape() {
                return Err(field("g", "shape differs from `f`"));
            }
            let transfer = match (x, k) {
                (Some(x), Some(k)) => {
                    let x = xi("xi", x)?;
                    if x.len() != f.rows() {
                        return Err(field(
                            "xi",
                            format_args!("expected {} entries, found {}", f.rows(), x.len()),
                        ));
                    }
                    if !(k.is_finite() && *k >= 0.0) {
                        return Err(field("K", "must be finite and nonnegative"));
                    }
                    Some((x, *k))
                }
                (None, None) => None,
                (Some(_), None) => return Err(field("K", "required together with `xi`")),
                (None, Some(_)) => return Err(field("xi", "required together with `K`")),
            };
            let guarantees = guarantees(gs)?;
            if transfer.is_none() && guarantees.contains(&Guarantee::LipschitzTransfer) {
                return Err(field("guarantees", "lipschitz-transfer needs `xi` and `K`"));
            }
            Body::Pair {
                f,
                g,
                guarantees,
                transfer,
            }
        }
    };
    Ok(Instance { doc, body })
}

fn sequence_from_nested(n: usize, z: usize, d: usize, data: &[Vec<Vec<f64>>]) -> Result<SampledSequence, InputError> {
    if data.len() != n {
        return Err(field(
            "data",
            format_args!("declared N = {n}, found {} functions", data.len()),
        ));
    }
    let mut flat = Vec::with_capacity(n * z * d);
    for (i, f) in data.iter().enumerate() {
        if f.len() != z {
            return Err(field(
                format!("data[{i}]"),
                format_args!("declared Z = {z}, found {} points", f.len()),
            ));
        }
        for (j, v) in f.iter().enumerate() {
            if v.len() != d {
                return Err(field(
                    format!("data[{i}][{j}]"),
                    format_args!("declared d = {d}, found {} values", v.len()),
                ));
            }
            flat.extend_from_slice(v);
        }
    }
    SampledSequence::new(n, z, d, flat).map_err(|e| field("data", e))
}

pub fn sequence_doc(seq: &SampledSequence) -> InstanceDoc {
    let data = (0..seq.funcs())
        .map(|n| (0..seq.points()).map(|z| seq.value(n, z).to_vec()).collect())
        .collect();
    InstanceDoc::Sequence {
        n: seq.funcs(),
        z: seq.points(),
        d: seq.dim(),
        data,
    }
}

/// Sequence CSV: one record `n,z,v_1,…,v_d` per sample with 1-based `n`
/// and `z`. A header line is skipped when its first field is not a number.
pub fn parse_sequence_csv(text: &str) -> Result<Instance, InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| InputError::Csv(e.to_string()))?;
        if line == 0 && rec.get(0).is_some_and(|s| s.parse::<f64>().is_err()) {
            continue;
        }
        if rec.len() < 3 {
            return Err(InputError::Csv(format!(
                "record {}: expected n,z and at least one value",
                line + 1
            )));
        }
        let index = |k: usize, what: &str| -> Result<usize, InputError> {
            rec[k]
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| InputError::Csv(format!("record {}: `{what}` must be a positive integer", line + 1)))
        };
        let (n, z) = (index(0, "n")?, index(1, "z")?);
        let values = (2..rec.len())
            .map(|k| rec[k].parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| InputError::Csv(format!("record {}: values must be finite numbers", line + 1)))?;
        records.push((n, z, values));
    }
    let n = records.iter().map(|r| r.0).max().unwrap_or(0);
    let z = records.iter().map(|r| r.1).max().unwrap_or(0);
    let d = records.first().map_or(0, |r| r.2.len());
    if records.len() != n * z {
        return Err(InputError::Csv(format!(
            "expected {} records for N = {n}, Z = {z}, found {}",
            n * z,
            records.len()
        )));
    }
    let mut data = vec![vec![None::<Vec<f64>>; z]; n];
    for (k, (i, j, v)) in records.into_iter().enumerate() {
        if v.len() != d {
            return Err(InputError::Csv(format!("record {}: expected {d} values", k + 1)));
        }
        if data[i - 1][j - 1].replace(v).is_some() {
            return Err(InputError::Csv(format!("duplicate sample n = {i}, z = {j}")));
        }
    }
    let data: Vec<Vec<Vec<f64>>> = data
        .into_iter()
        .map(|f| f.into_iter().map(|v| v.expect("counted")).collect())
        .collect();
    let seq = sequence_from_nested(n, z, d, &data)?;
    Ok(Instance {
        doc: sequence_doc(&seq),
        body: Body::Sequence(seq),
    })
}

pub fn parse_instance(text: &str, tol: &Tolerance) -> Result<Instance, InputError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    validate_doc(doc, tol)
}

pub fn read_text(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read an instance; `.csv` files are sequence CSV, anything else JSON.
pub fn read_instance(path: &Path, tol: &Tolerance) -> Result<Instance, InputError> {
    let text = read_text(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        parse_sequence_csv(&text)
    } else {
        parse_instance(&text, tol)
    }
}

pub fn matrix_doc(f: &BiMatrix) -> InstanceDoc {
    InstanceDoc::Bimatrix {
        rows: f.rows(),
        cols: f.cols(),
        data: f.to_rows(),
    }
}

pub fn family_doc(fam: &FunctionFamily) -> InstanceDoc {
    InstanceDoc::Family {
        generators: fam.generators(),
        points: fam.points(),
        members: fam.members().to_rows(),
    }
}

fn names(gs: &[Guarantee]) -> Vec<String> {
    gs.iter().map(|g| g.name().to_string()).collect()
}

pub fn infconv_doc(inst: &InfConvInstance, gs: &[Guarantee], sup: Option<SupStage>) -> InstanceDoc {
    InstanceDoc::Infconv {
        xi: inst.xi.as_slice().to_vec(),
        k: inst.k,
        g: inst.g.to_rows(),
        f: inst.f.to_rows(),
        guarantees: names(gs),
        sup,
    }
}

/// Manifest for a generated instance.
pub fn generated_doc(generated: &GeneratedInstance) -> InstanceDoc {
    match generated.kind {
        InstanceKind::Random => matrix_doc(&generated.f),
        InstanceKind::Convexlike => infconv_doc(
            generated
                .inf_conv
                .as_ref()
                .expect("convexlike carries its inf-convolution"),
            &generated.guarantees,
            None,
        ),
        InstanceKind::Km2Ready => {
            let sc = generated
                .sup_conv
                .as_ref()
                .expect("km2_ready carries its sup-convolution");
            let stage = SupStage {
                eta: sc.eta.as_slice().to_vec(),
                k: sc.k,
                h: sc.h.to_rows(),
            };
            infconv_doc(
                generated
                    .inf_conv
                    .as_ref()
                    .expect("km2_ready carries its inf-convolution"),
                &generated.guarantees,
                Some(stage),
            )
        }
        InstanceKind::Concavelike => {
            let sc = generated
                .sup_conv
                .as_ref()
                .expect("concavelike carries its sup-convolution");
            InstanceDoc::Supconv {
                eta: sc.eta.as_slice().to_vec(),
                k: sc.k,
                h: sc.h.to_rows(),
                f: sc.result.to_rows(),
                guarantees: names(&generated.guarantees),
            }
        }
        InstanceKind::TwoFunction => {
            let ic = generated
                .inf_conv
                .as_ref()
                .expect("two_function carries its inf-convolution");
            InstanceDoc::Pair {
                f: generated.f.to_rows(),
                g: generated.g.as_ref().expect("two_function carries g").to_rows(),
                guarantees: names(&generated.guarantees),
                xi: Some(ic.xi.as_slice().to_vec()),
                k: Some(ic.k),
            }
        }
    }
}

/// Write `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
