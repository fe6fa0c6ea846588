use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuantumError;
use crate::tolerance::STATE_TOL;

/// A unit vector of dimension 2 or 4.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    amps: Vec<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl QState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        if amps.len() != 2 && amps.len() != 4 {
            return Err(QuantumError::UnsupportedDimension(amps.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(QState { amps })
    }

    /// Scales a non-zero vector to unit length.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QuantumError::NotNormalized(0.0));
        }
        QState::new(amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn from_real(amps: &[f64]) -> Result<Self, QuantumError> {
        QState::new(amps.iter().map(|&a| c(a, 0.0)).collect())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &QState) -> Result<Complex64, QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::Dimension { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn tensor(&self, other: &QState) -> Result<QState, QuantumError> {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        QState::normalized(amps)
    }

    pub fn scaled(&self, phase: Complex64) -> QState {
        QState { amps: self.amps.iter().map(|a| a * phase).collect() }
    }

    /// Single-qubit states `0`, `1`, `plus`, `minus`, `i+`, `i-` (with the
    /// aliases `+`, `-`, `up_z`, `down_z`, `up_y`, `down_y`), two-qubit
    /// states `bell`, `bell-`, `psi+`, `psi-`, and products `a,b` of
    /// single-qubit names.
    pub fn named(name: &str) -> Result<QState, QuantumError> {
        let h = FRAC_1_SQRT_2;
        let amps = match name.trim() {
            "0" | "zero" | "up_z" => vec![c(1.0, 0.0), c(0.0, 0.0)],
            "1" | "one" | "down_z" => vec![c(0.0, 0.0), c(1.0, 0.0)],
            "+" | "plus" | "up_x" => vec![c(h, 0.0), c(h, 0.0)],
            "-" | "minus" | "down_x" => vec![c(h, 0.0), c(-h, 0.0)],
            "i+" | "up_y" => vec![c(h, 0.0), c(0.0, h)],
            "i-" | "down_y" => vec![c(h, 0.0), c(0.0, -h)],
            "bell" | "phi+" => vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
            "bell-" | "phi-" => vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-h, 0.0)],
            "psi+" => vec![c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)],
            "psi-" => vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)],
            other => {
                if let Some((a, b)) = other.split_once(',') {
                    let (a, b) = (QState::named(a)?, QState::named(b)?);
                    if a.dim() == 2 && b.dim() == 2 {
                        return a.tensor(&b);
                    }
                }
                return Err(QuantumError::Parse { what: "state", msg: format!("unknown state name `{other}`") });
            }
        };
        QState::new(amps)
    }

    /// A JSON list of `[re, im]` pairs.
    pub fn from_json(text: &str) -> Result<QState, QuantumError> {
        let pairs: Vec<[f64; 2]> =
            serde_json::from_str(text).map_err(|e| QuantumError::Parse { what: "state", msg: e.to_string() })?;
        QState::new(pairs.into_iter().map(|[re, im]| c(re, im)).collect())
    }

    /// A state name, or JSON when the text starts with `[`.
    pub fn parse(text: &str) -> Result<QState, QuantumError> {
        if text.trim_start().starts_with('[') {
            QState::from_json(text)
        } else {
            QState::named(text)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.amps.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>())
    }
}

impl fmt::Display for QState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.amps.iter().map(|a| format!("{:.6}{:+.6}i", a.re, a.im)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A named orthonormal basis; each vector carries the state label used in
/// the domains it produces.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    name: String,
    labels: Vec<String>,
    vectors: Vec<QState>,
}

#[derive(Serialize, Deserialize)]
pub struct BasisJson {
    pub name: String,
    pub vectors: Vec<LabelledVector>,
}

#[derive(Serialize, Deserialize)]
pub struct LabelledVector {
    pub label: String,
    pub amplitudes: Vec<[f64; 2]>,
}

impl Basis {
    pub fn new(name: impl Into<String>, labelled: Vec<(String, QState)>) -> Result<Self, QuantumError> {
        let name = name.into();
        let (labels, vectors): (Vec<String>, Vec<QState>) = labelled.into_iter().unzip();
        let dim = vectors.first().map_or(0, QState::dim);
        if vectors.len() != dim {
            return Err(QuantumError::NotOrthonormal(format!(
                "{} vector(s) cannot span a space of dimension {dim}",
                vectors.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(QuantumError::Degenerate(format!("label {l} names more than one basis vector")));
            }
        }
        for i in 0..vectors.len() {
            for j in 0..i {
                let ip = vectors[i].inner(&vectors[j])?;
                if ip.norm() > STATE_TOL {
                    return Err(QuantumError::NotOrthonormal(format!(
                        "<{}|{}> has modulus {:e}",
                        labels[j],
                        labels[i],
                        ip.norm()
                    )));
                }
            }
        }
        Ok(Basis { name, labels, vectors })
    }

    fn builtin(name: &str, labels: [&str; 2], states: [&str; 2]) -> Basis {
        let labelled = labels
            .iter()
            .zip(states)
            .map(|(l, s)| (l.to_string(), QState::named(s).expect("built-in state")))
            .collect();
        Basis::new(name, labelled).expect("built-in bases are orthonormal")
    }

    pub fn z() -> Basis {
        Basis::builtin("Z", ["s0", "s1"], ["0", "1"])
    }

    pub fn x() -> Basis {
        Basis::builtin("X", ["plus", "minus"], ["plus", "minus"])
    }

    pub fn y() -> Basis {
        Basis::builtin("Y", ["up_y", "down_y"], ["i+", "i-"])
    }

    /// The product basis of two single-qubit bases, labels joined by `_`.
    pub fn product(a: &Basis, b: &Basis) -> Result<Basis, QuantumError> {
        let mut labelled = Vec::new();
        for (la, va) in a.labels.iter().zip(&a.vectors) {
            for (lb, vb) in b.labels.iter().zip(&b.vectors) {
                labelled.push((format!("{la}_{lb}"), va.tensor(vb)?));
            }
        }
        Basis::new(format!("{}{}", a.name, b.name), labelled)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vectors(&self) -> &[QState] {
        &self.vectors
    }

    pub fn vector(&self, label: &str) -> Option<&QState> {
        self.labels.iter().position(|l| l == label).map(|i| &self.vectors[i])
    }

    /// `Z`, `X`, `Y`, a two-letter product such as `ZZ`, or JSON.
    pub fn parse(text: &str) -> Result<Basis, QuantumError> {
        let t = text.trim();
        if t.starts_with('{') {
            return Basis::from_json(t);
        }
        let single = |ch: char| match ch.to_ascii_uppercase() {
            'Z' => Some(Basis::z()),
            'X' => Some(Basis::x()),
            'Y' => Some(Basis::y()),
            _ => None,
        };
        let chars: Vec<char> = t.chars().collect();
        let parsed = match chars.as_slice() {
            [a] => single(*a),
            [a, b] => match (single(*a), single(*b)) {
                (Some(a), Some(b)) => Some(Basis::product(&a, &b)?),
                _ => None,
            },
            _ => None,
        };
        parsed.ok_or_else(|| QuantumError::Parse { what: "basis", msg: format!("unknown basis `{t}`") })
    }

    pub fn from_json(text: &str) -> Result<Basis, QuantumError> {
        let doc: BasisJson =
            serde_json::from_str(text).map_err(|e| QuantumError::Parse { what: "basis", msg: e.to_string() })?;
        let labelled = doc
            .vectors
            .into_iter()
            .map(|v| Ok((v.label, QState::new(v.amplitudes.iter().map(|[re, im]| c(*re, *im)).collect())?)))
            .collect::<Result<Vec<_>, QuantumError>>()?;
        Basis::new(doc.name, labelled)
    }

    pub fn to_json(&self) -> BasisJson {
        BasisJson {
            name: self.name.clone(),
            vectors: self
                .labels
                .iter()
                .zip(&self.vectors)
                .map(|(l, v)| LabelledVector {
                    label: l.clone(),
                    amplitudes: v.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
                })
                .collect(),
        }
    }
}
