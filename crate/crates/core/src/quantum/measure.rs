use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::{Basis, QState, QuantumError};
use crate::syntax::{Domain, Prob, Term};
use crate::tolerance::{MAX_DENOMINATOR, OUTCOME_CUTOFF, PROB_SUM_TOL, STATE_TOL};

/// How state labels are identified with basis vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentificationMode {
    /// Vectors equal up to a global phase are the same state.
    DisregardPhases,
    /// Vectors must agree component by component.
    Strict,
}

/// Best rational approximation of `x` with denominator at most `max_den`.
fn best_rational(x: f64, max_den: i64) -> (i64, i64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut v = x;
    loop {
        let a = v.floor() as i64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den {
            let k = (max_den - q0) / q1;
            let (pk, qk) = (p0 + k * p1, q0 + k * q1);
            let err = |p: i64, q: i64| (p as f64 / q as f64 - x).abs();
            return if q1 == 0 || err(pk, qk) < err(p1, q1) { (pk, qk) } else { (p1, q1) };
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac.abs() < 1e-15 || (p1 as f64 / q1 as f64 - x).abs() < 1e-15 {
            return (p1, q1);
        }
        v = 1.0 / frac;
    }
}

/// Exact probabilities for a float distribution: each close to its float,
/// denominators at most the configured bound, summing to exactly one.
pub fn rationalize(ps: &[f64]) -> Vec<Prob> {
    let total: f64 = ps.iter().sum();
    let ps: Vec<f64> = ps.iter().map(|p| p / total).collect();
    let close: Vec<Prob> = ps
        .iter()
        .map(|&p| {
            let (n, d) = best_rational(p, MAX_DENOMINATOR);
            Prob::new(n, d)
        })
        .collect();
    let sum: Prob = close.iter().copied().sum();
    let faithful = close
        .iter()
        .zip(&ps)
        .all(|(r, p)| *r.numer() > 0 && (r.to_f64().unwrap_or(f64::NAN) - p).abs() <= PROB_SUM_TOL);
    if sum == Prob::from_integer(1) && faithful {
        return close;
    }
    let mut units: Vec<i64> = ps.iter().map(|p| ((p * MAX_DENOMINATOR as f64).round() as i64).max(1)).collect();
    let excess: i64 = units.iter().sum::<i64>() - MAX_DENOMINATOR;
    let largest = (0..units.len()).max_by_key(|&i| units[i]).unwrap_or(0);
    units[largest] -= excess;
    units.into_iter().map(|u| Prob::new(u, MAX_DENOMINATOR)).collect()
}

/// Born-rule measurement; the domain is named `D`.
pub fn measure(psi: &QState, b: &Basis) -> Result<Domain, QuantumError> {
    measure_as(psi, b, "D")
}

pub fn measure_as(psi: &QState, b: &Basis, name: &str) -> Result<Domain, QuantumError> {
    if psi.dim() != b.dim() {
        return Err(QuantumError::Dimension { expected: b.dim(), found: psi.dim() });
    }
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for (label, v) in b.labels().iter().zip(b.vectors()) {
        let p = v.inner(psi)?.norm_sqr();
        if p > OUTCOME_CUTOFF {
            labels.push(label.clone());
            weights.push(p);
        }
    }
    let probs = rationalize(&weights);
    let elements = labels
        .iter()
        .zip(probs)
        .map(|(l, p)| Term::outcome(l.clone(), p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| QuantumError::Parse { what: "state label", msg: e.to_string() })?;
    Ok(Domain::inferred(name, elements)?)
}

/// A Hermitian, positive semidefinite operator of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOp {
    matrix: DMatrix<Complex64>,
}

impl DensityOp {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self, QuantumError> {
        if !matrix.is_square() {
            return Err(QuantumError::NotDensity("matrix is not square".into()));
        }
        let herm_err = (&matrix - matrix.adjoint()).camax();
        if herm_err > STATE_TOL {
            return Err(QuantumError::NotDensity(format!("not Hermitian (deviation {herm_err:e})")));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > STATE_TOL || trace.im.abs() > STATE_TOL {
            return Err(QuantumError::NotDensity(format!("trace is {trace}")));
        }
        let smallest = matrix.clone().symmetric_eigenvalues().min();
        if smallest < -STATE_TOL {
            return Err(QuantumError::NotDensity(format!("negative eigenvalue {smallest:e}")));
        }
        Ok(DensityOp { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// The mixture `sum_i p_i |b_i><b_i|` the domain describes.
pub fn density_of(d: &Domain, b: &Basis) -> Result<DensityOp, QuantumError> {
    let n = b.dim();
    let mut rho = DMatrix::<Complex64>::zeros(n, n);
    for (label, p) in d.outcomes() {
        let v = b.vector(label).ok_or_else(|| QuantumError::UnknownLabel(label.to_string()))?;
        let col = nalgebra::DVector::from_column_slice(v.amplitudes());
        let p = p.to_f64().expect("probabilities are finite");
        rho += (&col * col.adjoint()) * Complex64::new(p, 0.0);
    }
    DensityOp::new(rho)
}

/// `tr(rho^2)`: one for pure states, smaller for mixtures.
pub fn purity(rho: &DensityOp) -> f64 {
    (rho.matrix() * rho.matrix()).trace().re
}

pub fn phase_equiv(x: &QState, y: &QState, mode: IdentificationMode) -> bool {
    if x.dim() != y.dim() {
        return false;
    }
    match mode {
        IdentificationMode::DisregardPhases => x.inner(y).is_ok_and(|ip| (ip.norm() - 1.0).abs() <= STATE_TOL),
        IdentificationMode::Strict => {
            x.amplitudes().iter().zip(y.amplitudes()).all(|(a, b)| (a - b).norm() <= STATE_TOL)
        }
    }
}

/// Whether the domain of `psi` measured in `b` may be declared focused.
/// Ignoring phases always permits it; strict identification permits it
/// only for a sharp outcome.
pub fn focusing_status(psi: &QState, b: &Basis, mode: IdentificationMode) -> Result<bool, QuantumError> {
    let d = measure(psi, b)?;
    Ok(mode == IdentificationMode::DisregardPhases || d.is_singleton())
}
