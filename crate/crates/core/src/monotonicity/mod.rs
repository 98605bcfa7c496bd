//! Strong and strong-strict monotonicity of Presburger counter machines with
//! respect to a Presburger-definable ordering, ordering axioms, bounded
//! suspicion of ill-quasi-ordering, and the ordering-enumeration search.
//!
//! Orderings are formulas over `u1..ud` (left) and `v1..vd` (right), read
//! over the naturals.

mod enumerate;
mod wellness;

use std::collections::BTreeMap;

use thiserror::Error;
use wsts_presburger::{decide_sentence, qe_cooper, Formula, PresburgerError, Term, Var};

use crate::models::{counter_var, next_var, PcmModel};
use crate::wqo::Vector;

pub use enumerate::{
    enumerate_orderings, find_structuring_ordering, EnumerationStats, OrderingEnumerator,
    SearchOutcome, SearchStats, WELLNESS_BOUND,
};
pub use wellness::{certify_extends_dickson, refute_wellness_bounded, WellnessEvidence};

/// Largest value tried for each variable when extracting a counterexample.
pub const COUNTEREXAMPLE_LIMIT: i128 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonotonicityError {
    #[error("ordering mentions `{var}`; only u1..u{dimension} and v1..v{dimension} are allowed")]
    Arity { var: Var, dimension: usize },
    #[error(transparent)]
    Presburger(#[from] PresburgerError),
    #[error("case {case} fails but no counterexample has values within 0..={limit}")]
    CounterexampleNotFound { case: String, limit: i128 },
    #[error("counterexample for case {0} failed certification")]
    Certification(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonotonicityKind {
    Strong,
    /// Strong, and strictly larger sources step to strictly larger targets.
    StrongStrict,
}

impl MonotonicityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MonotonicityKind::Strong => "strong",
            MonotonicityKind::StrongStrict => "strong-strict",
        }
    }
}

/// A transition from `x` to `y` and a larger `x_prime` that has no matching step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub transition: String,
    pub label: String,
    /// The strict part of the property failed.
    pub strict: bool,
    pub x: Vector,
    pub x_prime: Vector,
    pub y: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityVerdict {
    pub kind: MonotonicityKind,
    pub holds: bool,
    /// Present iff `!holds`; certified by a decided sentence.
    pub counterexample: Option<Counterexample>,
    /// Number of (label, source, target) cases decided.
    pub cases: usize,
}

pub fn ord_left(i: usize) -> Var {
    format!("u{}", i + 1)
}

pub fn ord_right(i: usize) -> Var {
    format!("v{}", i + 1)
}

/// Componentwise `<=` over `d` counters.
pub fn dickson_ordering(d: usize) -> Formula {
    Formula::and((0..d).map(|i| Formula::le(Term::var(ord_left(i)), Term::var(ord_right(i)))))
}

pub(crate) fn check_arity(ordering: &Formula, d: usize) -> Result<(), MonotonicityError> {
    let allowed: Vec<Var> = (0..d).flat_map(|i| [ord_left(i), ord_right(i)]).collect();
    match ordering.free_vars().into_iter().find(|v| !allowed.contains(v)) {
        Some(var) => Err(MonotonicityError::Arity { var, dimension: d }),
        None => Ok(()),
    }
}

pub(crate) fn vars(prefix: &str, d: usize) -> Vec<Var> {
    (0..d).map(|i| format!("{prefix}{}", i + 1)).collect()
}

fn terms(names: &[Var]) -> Vec<Term> {
    names.iter().map(|v| Term::var(v.clone())).collect()
}

/// `ψ(a, b)`.
pub(crate) fn apply_ordering(ordering: &Formula, a: &[Term], b: &[Term]) -> Result<Formula, PresburgerError> {
    let mut map = BTreeMap::new();
    for (i, (l, r)) in a.iter().zip(b).enumerate() {
        map.insert(ord_left(i), l.clone());
        map.insert(ord_right(i), r.clone());
    }
    ordering.substitute(&map)
}

pub(crate) fn nonneg(names: &[Var]) -> Formula {
    Formula::and(names.iter().map(|v| Formula::ge(Term::var(v.clone()), Term::constant(0))))
}

/// Transitions sharing label, source and target; their steps are disjoined.
#[derive(Clone, Debug)]
struct Case {
    label: String,
    source: usize,
    target: usize,
    transitions: Vec<usize>,
}

fn cases(m: &PcmModel) -> Vec<Case> {
    let mut out: Vec<Case> = Vec::new();
    for (t, tr) in m.transitions().iter().enumerate() {
        match out
            .iter_mut()
            .find(|c| c.label == tr.label && c.source == tr.source && c.target == tr.target)
        {
            Some(c) => c.transitions.push(t),
            None => out.push(Case {
                label: tr.label.clone(),
                source: tr.source,
                target: tr.target,
                transitions: vec![t],
            }),
        }
    }
    out
}

impl Case {
    fn describe(&self, m: &PcmModel) -> String {
        format!("{} ({} -> {})", self.label, m.states()[self.source], m.states()[self.target])
    }

    /// The case's step relation from `from` to `to`.
    fn step(&self, m: &PcmModel, from: &[Term], to: &[Term]) -> Result<Formula, PresburgerError> {
        let mut map = BTreeMap::new();
        for i in 0..m.dimension() {
            map.insert(counter_var(i), from[i].clone());
            map.insert(next_var(i), to[i].clone());
        }
        let parts = self
            .transitions
            .iter()
            .map(|&t| m.pcm_step_formula(t).substitute(&map))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Formula::or(parts))
    }
}

/// The hypothesis and conclusion of one case, over free `x*, z*, y*`.
struct Square {
    hypothesis: Formula,
    conclusion: Formula,
}

fn square(m: &PcmModel, ordering: &Formula, case: &Case, strict: bool) -> Result<Square, PresburgerError> {
    let d = m.dimension();
    let (xs, zs, ys, ws) = (vars("x", d), vars("z", d), vars("y", d), vars("w", d));
    let (x, z, y, w) = (terms(&xs), terms(&zs), terms(&ys), terms(&ws));
    let mut hyp = vec![nonneg(&xs), nonneg(&zs), nonneg(&ys), case.step(m, &x, &y)?, apply_ordering(ordering, &x, &z)?];
    let mut concl = vec![nonneg(&ws), case.step(m, &z, &w)?, apply_ordering(ordering, &y, &w)?];
    if strict {
        hyp.push(Formula::not(apply_ordering(ordering, &z, &x)?));
        concl.push(Formula::not(apply_ordering(ordering, &w, &y)?));
    }
    Ok(Square { hypothesis: Formula::and(hyp), conclusion: Formula::exists_all(ws, Formula::and(concl)) })
}

fn universal_vars(d: usize) -> Vec<Var> {
    [vars("x", d), vars("z", d), vars("y", d)].concat()
}

fn parts(kind: MonotonicityKind) -> &'static [bool] {
    match kind {
        MonotonicityKind::Strong => &[false],
        MonotonicityKind::StrongStrict => &[false, true],
    }
}

/// One sentence per case (and per strictness part), each true iff that case
/// satisfies the property.
pub fn monotonicity_sentences(
    m: &PcmModel,
    ordering: &Formula,
    kind: MonotonicityKind,
) -> Result<Vec<(String, Formula)>, MonotonicityError> {
    check_arity(ordering, m.dimension())?;
    let mut out = Vec::new();
    for &strict in parts(kind) {
        for case in cases(m) {
            let sq = square(m, ordering, &case, strict)?;
            let sentence = Formula::forall_all(universal_vars(m.dimension()), Formula::implies(sq.hypothesis, sq.conclusion));
            out.push((case.describe(m), sentence));
        }
    }
    Ok(out)
}

/// The conjunction of [`monotonicity_sentences`]; `true` without transitions.
pub fn monotonicity_sentence(
    m: &PcmModel,
    ordering: &Formula,
    kind: MonotonicityKind,
) -> Result<Formula, MonotonicityError> {
    Ok(Formula::and(monotonicity_sentences(m, ordering, kind)?.into_iter().map(|(_, s)| s)))
}

/// Decides the property case by case; on failure extracts and certifies a
/// concrete counterexample.
pub fn check_strong_monotonicity(
    m: &PcmModel,
    ordering: &Formula,
    kind: MonotonicityKind,
) -> Result<MonotonicityVerdict, MonotonicityError> {
    check_arity(ordering, m.dimension())?;
    let all = cases(m);
    let mut decided = 0;
    for &strict in parts(kind) {
        for case in &all {
            let sq = square(m, ordering, case, strict)?;
            let failure = Formula::and([sq.hypothesis, Formula::not(sq.conclusion)]);
            let violated = Formula::exists_all(universal_vars(m.dimension()), failure.clone());
            decided += 1;
            if decide_sentence(&violated)? {
                let cex = extract(m, case, &failure, strict)?;
                return Ok(MonotonicityVerdict { kind, holds: false, counterexample: Some(cex), cases: decided });
            }
        }
    }
    Ok(MonotonicityVerdict { kind, holds: true, counterexample: None, cases: decided })
}

/// Fixes `x*, z*, y*` one variable at a time, each to the least value in
/// `0..=COUNTEREXAMPLE_LIMIT` that keeps the rest satisfiable.
fn extract(m: &PcmModel, case: &Case, failure: &Formula, strict: bool) -> Result<Counterexample, MonotonicityError> {
    let d = m.dimension();
    let order = universal_vars(d);
    let mut current = qe_cooper(failure)?;
    let mut values: BTreeMap<Var, i128> = BTreeMap::new();
    for (k, v) in order.iter().enumerate() {
        let rest = &order[k + 1..];
        let projected = qe_cooper(&Formula::exists_all(rest.iter().cloned(), current.clone()))?;
        let found = (0..=COUNTEREXAMPLE_LIMIT).find(|&n| {
            projected.instantiate([(v.as_str(), n)]).ok().and_then(|f| f.eval(&|_| None).ok()).unwrap_or(false)
        });
        let n = found.ok_or_else(|| MonotonicityError::CounterexampleNotFound {
            case: case.describe(m),
            limit: COUNTEREXAMPLE_LIMIT,
        })?;
        values.insert(v.clone(), n);
        current = current.instantiate([(v.as_str(), n)])?;
    }
    // Certification: the instantiated failure formula is a true sentence.
    let ground = failure.instantiate(values.iter().map(|(k, v)| (k.as_str(), *v)))?;
    if !decide_sentence(&ground)? {
        return Err(MonotonicityError::Certification(case.describe(m)));
    }
    let vector = |prefix: &str| Vector(vars(prefix, d).iter().map(|v| values[v] as u64).collect());
    let (x, x_prime, y) = (vector("x"), vector("z"), vector("y"));
    let transition = case
        .transitions
        .iter()
        .copied()
        .find(|&t| m.step_holds(t, &x, &y).unwrap_or(false))
        .map(|t| m.transitions()[t].name.clone())
        .ok_or_else(|| MonotonicityError::Certification(case.describe(m)))?;
    Ok(Counterexample { transition, label: case.label.clone(), strict, x, x_prime, y })
}

/// Which quasi-ordering axioms hold over the naturals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub reflexive: bool,
    pub transitive: bool,
}

impl AxiomReport {
    pub fn is_quasi_ordering(self) -> bool {
        self.reflexive && self.transitive
    }
}

pub fn ordering_axioms_check(ordering: &Formula, d: usize) -> Result<AxiomReport, MonotonicityError> {
    check_arity(ordering, d)?;
    let (a, b, c) = (vars("a", d), vars("b", d), vars("c", d));
    let (ta, tb, tc) = (terms(&a), terms(&b), terms(&c));
    let refl = Formula::forall_all(a.clone(), Formula::implies(nonneg(&a), apply_ordering(ordering, &ta, &ta)?));
    let reflexive = decide_sentence(&refl)?;
    let hyp = Formula::and([
        nonneg(&a),
        nonneg(&b),
        nonneg(&c),
        apply_ordering(ordering, &ta, &tb)?,
        apply_ordering(ordering, &tb, &tc)?,
    ]);
    let trans = Formula::forall_all(
        [a, b, c].concat(),
        Formula::implies(hyp, apply_ordering(ordering, &ta, &tc)?),
    );
    let transitive = decide_sentence(&trans)?;
    Ok(AxiomReport { reflexive, transitive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::PcmTransition;
    use crate::wqo::Config;
    use wsts_presburger::parse_formula;

    fn pcm(d: usize, steps: &[&str]) -> PcmModel {
        let transitions = steps
            .iter()
            .enumerate()
            .map(|(i, s)| PcmTransition {
                name: format!("t{}", i + 1),
                source: 0,
                target: 0,
                label: format!("a{}", i + 1),
                step: parse_formula(s).unwrap(),
            })
            .collect();
        PcmModel::new(d, vec!["q".into()], Config::new(0, Vector::zeros(d)), transitions).unwrap()
    }

    fn order(src: &str) -> Formula {
        parse_formula(src).unwrap()
    }

    #[test]
    fn decrement_is_monotone() {
        let m = pcm(1, &["x1 >= 1 /\\ x1' = x1 - 1"]);
        let s = monotonicity_sentence(&m, &dickson_ordering(1), MonotonicityKind::Strong).unwrap();
        assert!(decide_sentence(&s).unwrap());
    }

    #[test]
    fn zero_test_counterexample() {
        let m = pcm(1, &["x1 = 0 /\\ x1' = x1 + 1"]);
        let v = check_strong_monotonicity(&m, &dickson_ordering(1), MonotonicityKind::Strong).unwrap();
        assert!(!v.holds);
        let cex = v.counterexample.unwrap();
        assert_eq!((cex.x, cex.x_prime, cex.y), (Vector(vec![0]), Vector(vec![1]), Vector(vec![1])));
        assert_eq!(cex.transition, "t1");
    }

    #[test]
    fn no_transitions_vacuous() {
        let m = pcm(1, &[]);
        assert_eq!(monotonicity_sentence(&m, &dickson_ordering(1), MonotonicityKind::Strong).unwrap(), Formula::True);
        let v = check_strong_monotonicity(&m, &dickson_ordering(1), MonotonicityKind::StrongStrict).unwrap();
        assert!(v.holds && v.cases == 0);
    }

    #[test]
    fn reset_is_not_strict() {
        let m = pcm(1, &["x1' = 0"]);
        let d = dickson_ordering(1);
        assert!(check_strong_monotonicity(&m, &d, MonotonicityKind::Strong).unwrap().holds);
        let v = check_strong_monotonicity(&m, &d, MonotonicityKind::StrongStrict).unwrap();
        let cex = v.counterexample.unwrap();
        assert!(cex.strict);
        assert_eq!((cex.x, cex.x_prime, cex.y), (Vector(vec![0]), Vector(vec![1]), Vector(vec![0])));
    }

    #[test]
    fn axioms() {
        assert!(ordering_axioms_check(&dickson_ordering(2), 2).unwrap().is_quasi_ordering());
        let r = ordering_axioms_check(&order("u1 < v1"), 1).unwrap();
        assert!(!r.reflexive);
        let r = ordering_axioms_check(&order("u1 <= v1 + 1"), 1).unwrap();
        assert_eq!(r, AxiomReport { reflexive: true, transitive: false });
    }

    #[test]
    fn arity_is_checked() {
        let err = ordering_axioms_check(&order("u1 <= v2"), 1).unwrap_err();
        assert_eq!(err, MonotonicityError::Arity { var: "v2".into(), dimension: 1 });
    }
}
