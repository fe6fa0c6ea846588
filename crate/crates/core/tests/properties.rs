mod common;

use common::*;
use proptest::prelude::*;
use rfod_core::syntax::{parse_formula, Domain, DomainKind, Formula, Prob, Term};

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn parser_round_trip(s in sequent()) {
        check_parse_round_trip(&s).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn formula_round_trip(f in formula()) {
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn equation_inversion((eq, s, params) in unfoldable()) {
        check_inversion(&eq, &s, &params).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn dualize_is_an_involution(s in dualizable_sequent()) {
        check_dualize_involution(&s).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn closed_substitutions_commute(f in formula(), a in closed_term(), b in closed_term()) {
        let ab = f.subst("z", &a).subst("w", &b);
        let ba = f.subst("w", &b).subst("z", &a);
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn closed_substitution_removes_the_variable(s in sequent(), t in closed_term()) {
        let mut expected = s.free_vars();
        expected.remove("y");
        prop_assert_eq!(s.subst("y", &t).free_vars(), expected);
    }

    #[test]
    fn substitution_only_touches_free_occurrences(body in atom(), d in domain_name(), t in closed_term()) {
        let f = Formula::forall("x", d, body);
        prop_assert_eq!(f.subst("x", &t), f);
    }
}

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn domain_sums_are_validated(nums in prop::collection::vec(1i64..6, 1..5), den in 6i64..13) {
        let elements: Vec<Term> = nums
            .iter()
            .enumerate()
            .map(|(i, &n)| Term::outcome(format!("o{i}"), Prob::new(n, den)).unwrap())
            .collect();
        let total: Prob = nums.iter().map(|&n| Prob::new(n, den)).sum();
        let d = Domain::new("D", elements, DomainKind::Measured, false);
        prop_assert_eq!(d.is_ok(), total == Prob::from_integer(1), "{:?} / {}", nums, den);
    }

    #[test]
    fn uniform_domains_are_uniform(m in 1usize..9) {
        let d = Domain::uniform("D", m).unwrap();
        prop_assert!(d.is_uniform());
        prop_assert_eq!(d.outcomes().iter().map(|(_, p)| *p).sum::<Prob>(), Prob::from_integer(1));
        prop_assert_eq!(d.is_singleton(), m == 1);
    }
}
