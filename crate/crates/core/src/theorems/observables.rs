use std::sync::Arc;

use super::{atom, context, eq_step, TheoremError};
use crate::calculus::{check, Derivation, Direction, Params, RuleId, TheoryConfig};
use crate::syntax::{random_variable_of, Domain, Formula, Sequent, Term};

#[derive(Clone, Debug)]
pub struct Uncertainty {
    /// `G |- A, bot_Y`.
    pub sequent: Sequent,
    /// The falsum equation applied forward to the open leaf `G |- A`.
    pub derivation: Arc<Derivation>,
}

/// Adds the falsum labelled by the random variable of an incompatible
/// observable, whose outcomes are equally likely.
pub fn build_uncertainty(base: &Sequent, incompatible: &Domain) -> Result<Uncertainty, TheoremError> {
    if !incompatible.is_uniform() {
        return Err(TheoremError::NotUniform(incompatible.name().to_string()));
    }
    let label = random_variable_of(incompatible.name());
    let leaf = Derivation::leaf(RuleId::Hypothesis, base.clone());
    let derivation = eq_step(RuleId::EqBotR, Direction::Forward, Params::new().label(label), vec![leaf], 0)?;
    Ok(Uncertainty { sequent: derivation.conclusion.clone(), derivation })
}

#[derive(Clone, Debug)]
pub struct Distributivity {
    /// Ends in `G |- forall x in DA . forall x' in DB . A(x) * A'(x')`.
    pub joint: Arc<Derivation>,
    /// Ends in `G |- (forall x in DA . A(x)) * (forall x' in DB . A'(x'))`;
    /// its quantifier steps keep the other formula as a right context.
    pub split: Arc<Derivation>,
}

/// Both readings of a two-particle state from the shared leaf
/// `G, z in DA, y in DB |- A(z), A'(y)`.
pub fn distributivity_trees(da: &str, db: &str, a: &str, a2: &str) -> Result<Distributivity, TheoremError> {
    let (z, y) = (Term::var("z"), Term::var("y"));
    let leaf = Derivation::leaf(
        RuleId::Hypothesis,
        Sequent::new(
            vec![context("G"), Formula::member(z.clone(), da).into(), Formula::member(y.clone(), db).into()],
            vec![atom(a, z).into(), atom(a2, y).into()],
        ),
    );
    let forall = |var: &str, bound: &str, premise: Arc<Derivation>| {
        eq_step(RuleId::EqForallR, Direction::Forward, Params::new().var(var).bound(bound), vec![premise], 0)
    };

    let star = eq_step(RuleId::EqStarR, Direction::Forward, Params::new(), vec![leaf.clone()], 0)?;
    let joint = forall("z", "x", forall("y", "x'", star)?)?;

    let first = forall("z", "x", leaf)?;
    let both = forall("y", "x'", first)?;
    let split = eq_step(RuleId::EqStarR, Direction::Forward, Params::new(), vec![both], 0)?;
    Ok(Distributivity { joint, split })
}

/// Both derivations, provided the theory admits right contexts.
pub fn derive_distributivity(
    da: &Domain,
    db: &Domain,
    a: &str,
    a2: &str,
    cfg: &TheoryConfig,
) -> Result<Distributivity, TheoremError> {
    let pair = distributivity_trees(da.name(), db.name(), a, a2)?;
    let report = check(&pair.split, cfg);
    match report.first_failure {
        Some(f) => Err(TheoremError::ClassicalModeRequired(f.to_string())),
        None => Ok(pair),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{dualize, RuleError};
    use crate::syntax::parse_sequent;

    #[test]
    fn uncertainty_round_trip() {
        let base = parse_sequent("G |- A^f(#up_z)").unwrap();
        let dy = Domain::inferred(
            "DY",
            vec![
                Term::outcome("up_y", crate::syntax::Prob::new(1, 2)).unwrap(),
                Term::outcome("down_y", crate::syntax::Prob::new(1, 2)).unwrap(),
            ],
        )
        .unwrap();
        let u = build_uncertainty(&base, &dy).unwrap();
        assert_eq!(u.sequent.to_string(), "G |- A^f(#up_z), bot_Y");
        assert!(check(&u.derivation, &TheoryConfig::new()).accepted());
        let back = eq_step(RuleId::EqBotR, Direction::Backward, Params::new(), vec![u.derivation.clone()], 0).unwrap();
        assert_eq!(back.conclusion, base);

        let skewed = Domain::inferred(
            "DY",
            vec![
                Term::outcome("a", crate::syntax::Prob::new(7, 10)).unwrap(),
                Term::outcome("b", crate::syntax::Prob::new(3, 10)).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(build_uncertainty(&base, &skewed), Err(TheoremError::NotUniform(_))));
    }

    #[test]
    fn distributivity_modes() {
        let pair = distributivity_trees("DA", "DB", "A", "A'").unwrap();
        assert_eq!(pair.joint.conclusion.to_string(), "G |- forall x in DA . forall x' in DB . A(x) * A'(x')");
        assert_eq!(pair.split.conclusion.to_string(), "G |- (forall x in DA . A(x)) * (forall x' in DB . A'(x'))");
        let classical = TheoryConfig::new().classical(true);
        assert!(check(&pair.joint, &classical).accepted());
        assert!(check(&pair.split, &classical).accepted());

        let basic = TheoryConfig::new();
        assert!(check(&pair.joint, &basic).accepted());
        let r = check(&pair.split, &basic);
        let f = r.first_failure.unwrap();
        assert_eq!(f.rule, RuleId::EqForallR);
        assert!(matches!(f.error, RuleError::RightContext(_)));

        let da = Domain::uniform("DA", 2).unwrap();
        let db = Domain::uniform("DB", 2).unwrap();
        assert!(derive_distributivity(&da, &db, "A", "A'", &classical).is_ok());
        assert!(matches!(
            derive_distributivity(&da, &db, "A", "A'", &basic),
            Err(TheoremError::ClassicalModeRequired(_))
        ));
        assert!(dualize(&pair.split.conclusion).is_err());
        assert!(dualize(&pair.joint.conclusion).is_err());
    }
}
