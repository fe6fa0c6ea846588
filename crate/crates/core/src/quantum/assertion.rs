use nalgebra::Matrix2;
use num_complex::Complex64;

use super::measure::{measure_as, rationalize};
use super::{Basis, QState, QuantumError};
use crate::calculus::TheoryConfig;
use crate::syntax::{ContextVar, Domain, Formula, Item, Sequent, Slot, Term};
use crate::tolerance::ENTANGLEMENT_TOL;

/// `psi = a1 |v1 w1> + a2 |v2 w2>` with `a1 >= a2 >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtData {
    pub coefficients: [f64; 2],
    pub left: [QState; 2],
    pub right: [QState; 2],
}

impl SchmidtData {
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); 4];
        for k in 0..2 {
            for (i, a) in self.left[k].amplitudes().iter().enumerate() {
                for (j, b) in self.right[k].amplitudes().iter().enumerate() {
                    out[2 * i + j] += a * b * self.coefficients[k];
                }
            }
        }
        out
    }

    /// Distance from `psi` to the reconstruction, minimized over a global phase.
    pub fn reconstruction_error(&self, psi: &QState) -> f64 {
        let r = self.reconstruct();
        let ip: Complex64 = r.iter().zip(psi.amplitudes()).map(|(a, b)| a.conj() * b).sum();
        let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
        r.iter().zip(psi.amplitudes()).map(|(a, b)| (a * phase - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_entangled(&self) -> bool {
        self.coefficients[1] > ENTANGLEMENT_TOL
    }
}

/// Schmidt decomposition of a two-qubit state, from the singular value
/// decomposition of its 2x2 coefficient matrix.
pub fn schmidt(psi: &QState) -> Result<SchmidtData, QuantumError> {
    if psi.dim() != 4 {
        return Err(QuantumError::Dimension { expected: 4, found: psi.dim() });
    }
    let a = psi.amplitudes();
    let m = Matrix2::new(a[0], a[1], a[2], a[3]);
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order = [0usize, 1];
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let left = order.map(|k| QState::normalized(vec![u[(0, k)], u[(1, k)]]));
    let right = order.map(|k| QState::normalized(vec![v_t[(k, 0)], v_t[(k, 1)]]));
    let [l0, l1] = left;
    let [r0, r1] = right;
    Ok(SchmidtData {
        coefficients: order.map(|k| svd.singular_values[k].max(0.0)),
        left: [l0?, l1?],
        right: [r0?, r1?],
    })
}

#[derive(Clone, Debug)]
pub enum AssertionInput {
    /// One system measured in the given basis.
    Single { state: QState, basis: Basis },
    /// Two qubits; a product state's factors are measured in `local`.
    Bipartite { state: QState, local: Basis },
}

#[derive(Clone, Debug)]
pub struct Assertion {
    pub sequent: Sequent,
    pub domains: Vec<Domain>,
    pub schmidt: Option<SchmidtData>,
}

impl Assertion {
    /// A theory with the assertion's domains declared.
    pub fn theory(&self) -> TheoryConfig {
        self.domains.iter().cloned().fold(TheoryConfig::new(), TheoryConfig::with_domain)
    }
}

fn member(v: &str, d: &Domain) -> Item {
    Formula::member(Term::var(v), d.name()).into()
}

fn pred(name: &str, v: &str) -> Formula {
    Formula::atom(name, vec![Term::var(v)])
}

/// The sequent a state supports: `G, z in DZ |- A(z)` for one system,
/// `G, z in DZ, y in DZ' |- A(z), A'(y)` for a product of two, and
/// `G, z in DS |- A(z) ,_S A'(z)` for an entangled pair.
pub fn emit_assertion(input: &AssertionInput, gamma: &str) -> Result<Assertion, QuantumError> {
    let g = Item::Context(ContextVar::new(gamma));
    match input {
        AssertionInput::Single { state, basis } => {
            let d = measure_as(state, basis, &format!("D{}", basis.name()))?;
            let sequent = Sequent::new(vec![g, member("z", &d)], vec![pred("A", "z").into()]);
            Ok(Assertion { sequent, domains: vec![d], schmidt: None })
        }
        AssertionInput::Bipartite { state, local } => {
            if local.dim() != 2 {
                return Err(QuantumError::Dimension { expected: 2, found: local.dim() });
            }
            let sd = schmidt(state)?;
            if !sd.is_entangled() {
                let dz = measure_as(&sd.left[0], local, &format!("D{}", local.name()))?;
                let dz2 = measure_as(&sd.right[0], local, &format!("D{}'", local.name()))?;
                let sequent = Sequent::new(
                    vec![g, member("z", &dz), member("y", &dz2)],
                    vec![pred("A", "z").into(), pred("A'", "y").into()],
                );
                return Ok(Assertion { sequent, domains: vec![dz, dz2], schmidt: Some(sd) });
            }
            let [a1, a2] = sd.coefficients;
            let probs = rationalize(&[a1 * a1, a2 * a2]);
            let elements = ["s1", "s2"]
                .iter()
                .zip(probs)
                .map(|(l, p)| Term::outcome(*l, p).expect("positive probabilities"))
                .collect();
            let ds = Domain::inferred("DS", elements)?;
            let slot = Slot::Correlated { label: "S".into(), left: pred("A", "z"), right: pred("A'", "z") };
            let sequent = Sequent::new(vec![g, member("z", &ds)], vec![slot]);
            Ok(Assertion { sequent, domains: vec![ds], schmidt: Some(sd) })
        }
    }
}
