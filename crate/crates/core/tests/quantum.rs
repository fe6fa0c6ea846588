mod common;

use common::config;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rfod_core::calculus::{check, equation_step, Direction, Params, RuleId};
use rfod_core::quantum::{
    density_of, emit_assertion, focusing_status, measure, phase_equiv, purity, schmidt, AssertionInput, Basis,
    IdentificationMode, QState,
};
use rfod_core::syntax::Prob;
use rfod_core::theorems::check_reversibility;
use rfod_core::tolerance::{ENTANGLEMENT_TOL, MAX_DENOMINATOR, PROB_SUM_TOL, SCHMIDT_RECON_TOL};
use rfod_core::TheoryConfig;

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter("away from zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-2)
        .prop_map(|v| {
            let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            v.into_iter().map(|(a, b)| Complex64::new(a / norm, b / norm)).collect()
        })
}

fn qubit() -> impl Strategy<Value = QState> {
    amplitudes(2).prop_map(|a| QState::new(a).unwrap())
}

fn pair() -> impl Strategy<Value = QState> {
    amplitudes(4).prop_map(|a| QState::new(a).unwrap())
}

fn basis() -> impl Strategy<Value = Basis> {
    prop::sample::select(vec!["Z", "X", "Y"]).prop_map(|b| Basis::parse(b).unwrap())
}

/// Born probabilities computed directly from the amplitude arrays.
fn born_oracle(psi: &[Complex64], b: &Basis) -> Vec<f64> {
    b.vectors()
        .iter()
        .map(|v| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, a) in v.amplitudes().iter().zip(psi) {
                acc += b.conj() * a;
            }
            acc.re * acc.re + acc.im * acc.im
        })
        .collect()
}

/// Singular values of the 2x2 coefficient matrix from the closed-form
/// eigenvalues of `M M^dagger`: `(tr +- sqrt(tr^2 - 4 |det M|^2)) / 2`.
fn singular_value_oracle(a: &[Complex64]) -> [f64; 2] {
    let tr: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let det = (a[0] * a[3] - a[1] * a[2]).norm_sqr();
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    [((tr + disc) / 2.0).sqrt(), ((tr - disc) / 2.0).max(0.0).sqrt()]
}

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn born_probabilities_match_the_oracle(psi in qubit(), b in basis()) {
        let oracle = born_oracle(psi.amplitudes(), &b);
        prop_assert!((oracle.iter().sum::<f64>() - 1.0).abs() <= PROB_SUM_TOL);
        let d = measure(&psi, &b).unwrap();
        prop_assert_eq!(d.outcomes().iter().map(|(_, p)| *p).sum::<Prob>(), Prob::from_integer(1));
        for (label, p) in d.outcomes() {
            let k = b.labels().iter().position(|l| l == label).unwrap();
            prop_assert!(*p.denom() <= MAX_DENOMINATOR);
            prop_assert!((p.to_f64().unwrap() - oracle[k]).abs() <= 1.0 / MAX_DENOMINATOR as f64);
        }
        for (k, label) in b.labels().iter().enumerate() {
            if oracle[k] > 1e-6 {
                prop_assert!(d.labels().any(|l| l == label));
            }
        }
    }

    #[test]
    fn purity_witnesses_the_mixture(psi in qubit(), b in basis()) {
        let d = measure(&psi, &b).unwrap();
        let rho = density_of(&d, &b).unwrap();
        let expected: f64 = d.outcomes().iter().map(|(_, p)| p.to_f64().unwrap().powi(2)).sum();
        prop_assert!((purity(&rho) - expected).abs() <= 1e-9);
        if d.is_singleton() {
            prop_assert!((purity(&rho) - 1.0).abs() <= 1e-9);
        } else {
            prop_assert!(purity(&rho) < 1.0 - 1e-9);
        }
    }

    #[test]
    fn global_phases(psi in qubit(), theta in 0.01f64..6.27) {
        let turned = psi.scaled(Complex64::from_polar(1.0, theta));
        prop_assert!(phase_equiv(&psi, &turned, IdentificationMode::DisregardPhases));
        prop_assert!(!phase_equiv(&psi, &turned, IdentificationMode::Strict));
        prop_assert!(phase_equiv(&psi, &psi, IdentificationMode::Strict));
        let b = Basis::z();
        prop_assert_eq!(measure(&psi, &b).unwrap(), measure(&turned, &b).unwrap());
    }

    #[test]
    fn schmidt_reconstructs_and_matches_the_oracle(psi in pair()) {
        let sd = schmidt(&psi).unwrap();
        prop_assert!(sd.reconstruction_error(&psi) <= SCHMIDT_RECON_TOL);
        let [s1, s2] = singular_value_oracle(psi.amplitudes());
        prop_assert!((sd.coefficients[0] - s1).abs() <= 1e-7);
        prop_assert!((sd.coefficients[1] - s2).abs() <= 1e-7);
        prop_assert!(sd.coefficients[0] >= sd.coefficients[1]);
        prop_assert!((sd.coefficients.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn product_states_are_separable(a in qubit(), b in qubit(), local in basis()) {
        let psi = a.tensor(&b).unwrap();
        let sd = schmidt(&psi).unwrap();
        prop_assert!(sd.coefficients[1] <= ENTANGLEMENT_TOL);
        let asserted = emit_assertion(&AssertionInput::Bipartite { state: psi, local: local.clone() }, "G").unwrap();
        let name = local.name();
        prop_assert_eq!(
            asserted.sequent.to_string(),
            format!("G, z in D{name}, y in D{name}' |- A(z), A'(y)")
        );
        prop_assert_eq!(&asserted.domains[0], &measure(&a, &local).unwrap().renamed(format!("D{name}")));
    }

    #[test]
    fn focusing_status_agrees_with_reversibility(psi in qubit(), b in basis(), strict in any::<bool>()) {
        let mode = if strict { IdentificationMode::Strict } else { IdentificationMode::DisregardPhases };
        let status = focusing_status(&psi, &b, mode).unwrap();
        let d = measure(&psi, &b).unwrap();
        let mut cfg = TheoryConfig::new().with_domain(d.clone());
        if status {
            cfg = cfg.focus(d.name());
        }
        let verdict = check_reversibility(&d, &cfg).unwrap();
        prop_assert_eq!(verdict.reversible, status);
        if let Some(w) = verdict.witness {
            prop_assert!(check(&w, &cfg).accepted());
        }
    }
}

#[test]
fn entangled_pairs_round_trip_through_bowtie() {
    for name in ["bell", "bell-", "psi+", "psi-"] {
        let psi = QState::named(name).unwrap();
        let a = emit_assertion(&AssertionInput::Bipartite { state: psi, local: Basis::z() }, "G").unwrap();
        assert_eq!(a.sequent.to_string(), "G, z in DS |- A(z) ,_S A'(z)");
        let cfg = a.theory();
        let folded = equation_step(
            std::slice::from_ref(&a.sequent),
            &RuleId::EqBowtieR,
            Direction::Forward,
            &Params::new(),
            &cfg,
        )
        .unwrap();
        assert_eq!(folded[0].to_string(), "G |- bowtie x in DS (A(x); A'(x))");
        let unfolded =
            equation_step(&folded, &RuleId::EqBowtieR, Direction::Backward, &Params::new().var("z"), &cfg).unwrap();
        assert!(unfolded[0].equiv(&a.sequent));
    }
}

#[test]
fn spin_y_after_z_collapse_is_uniform() {
    for collapsed in ["up_z", "down_z"] {
        let d = measure(&QState::named(collapsed).unwrap(), &Basis::y()).unwrap();
        assert!(d.is_uniform());
        assert_eq!(d.to_string(), "D = { (up_y, 1/2), (down_y, 1/2) }");
    }
}
