//! Cooper-style quantifier elimination over the integers.
//!
//! Quantifiers are removed innermost first. Each `E x. phi` with `phi`
//! quantifier-free in negation normal form goes through three stages:
//! distribution over disjunctions, substitution through a unit-coefficient
//! equality when one is available, and otherwise the classic construction
//! (normalize the coefficients of `x` to +-1 via their lcm, then take the
//! finite disjunction over the smaller of the lower or upper bound sets).

use std::collections::BTreeMap;

use crate::error::{PresburgerError, Result};
use crate::formula::{Atom, Formula};
use crate::term::{lcm, Term};

/// Default limit on intermediate formula size.
pub const DEFAULT_MAX_NODES: usize = 100_000;

/// Default width up to which a constant interval is expanded point by point.
pub const DEFAULT_INTERVAL_LIMIT: i128 = 32;

#[derive(Clone, Copy, Debug)]
pub struct QeConfig {
    pub max_nodes: usize,
    /// A variable confined to a constant interval of at most this many points
    /// is eliminated by enumerating them; `0` always uses Cooper's method.
    pub interval_limit: i128,
}

impl Default for QeConfig {
    fn default() -> Self {
        QeConfig { max_nodes: DEFAULT_MAX_NODES, interval_limit: DEFAULT_INTERVAL_LIMIT }
    }
}

/// Returns a quantifier-free formula equivalent to `f` over the integers.
pub fn eliminate_quantifiers(f: &Formula, config: QeConfig) -> Result<Formula> {
    Eliminator { config }.eliminate(f)
}

struct Eliminator {
    config: QeConfig,
}

impl Eliminator {
    fn check(&self, f: Formula) -> Result<Formula> {
        let f = simplify(f);
        let size = f.size();
        if size > self.config.max_nodes {
            return Err(PresburgerError::BudgetExceeded {
                size,
                limit: self.config.max_nodes,
            });
        }
        Ok(f)
    }

    /// Output is quantifier-free and in negation normal form.
    fn eliminate(&self, f: &Formula) -> Result<Formula> {
        match f {
            Formula::True | Formula::False => Ok(f.clone()),
            Formula::Atom(a) => Ok(a.clone().normalize()),
            Formula::Not(g) => Ok(self.eliminate(g)?.negate_nnf()),
            Formula::And(gs) => {
                let parts = gs.iter().map(|g| self.eliminate(g)).collect::<Result<Vec<_>>>()?;
                self.check(Formula::and(parts))
            }
            Formula::Or(gs) => {
                let parts = gs.iter().map(|g| self.eliminate(g)).collect::<Result<Vec<_>>>()?;
                self.check(Formula::or(parts))
            }
            Formula::Exists(x, body) => {
                let body = self.eliminate(body)?;
                self.exists(x, body)
            }
            Formula::Forall(x, body) => {
                let body = self.eliminate(body)?;
                Ok(self.exists(x, body.negate_nnf())?.negate_nnf())
            }
        }
    }

    fn exists(&self, x: &str, phi: Formula) -> Result<Formula> {
        if !phi.mentions_free(x) {
            return Ok(phi);
        }
        match phi {
            Formula::Or(ds) => {
                let mut parts = Vec::with_capacity(ds.len());
                for d in ds {
                    parts.push(self.exists(x, d)?);
                    if matches!(parts.last(), Some(Formula::True)) {
                        return Ok(Formula::True);
                    }
                }
                self.check(Formula::or(parts))
            }
            Formula::And(cs) => {
                let (with_x, without_x): (Vec<_>, Vec<_>) =
                    cs.into_iter().partition(|c| c.mentions_free(x));
                let inner = if let Some(solved) = solve_unit_equality(x, &with_x)? {
                    solved
                } else if let Some(expanded) = self.expand_interval(x, &with_x)? {
                    expanded
                } else {
                    self.cooper(x, Formula::and(with_x))?
                };
                self.check(Formula::and(without_x.into_iter().chain([inner])))
            }
            Formula::Atom(Atom::Eq(ref t)) if t.coeff(x).abs() == 1 => Ok(Formula::True),
            other => self.cooper(x, other),
        }
    }

    /// `E x. lo <= x <= hi /\ rest` as a disjunction over the interval, when
    /// both bounds are constant conjuncts and the interval is short.
    fn expand_interval(&self, x: &str, conjuncts: &[Formula]) -> Result<Option<Formula>> {
        let (mut lo, mut hi) = (None::<i128>, None::<i128>);
        for c in conjuncts {
            let Formula::Atom(Atom::Le(t)) = c else { continue };
            let a = t.coeff(x);
            if a == 0 || !t.without(x).is_constant() {
                continue;
            }
            let k = t.constant_part();
            // a*x + k <= 0
            if a > 0 {
                let b = (-k).div_euclid(a);
                hi = Some(hi.map_or(b, |h| h.min(b)));
            } else {
                let b = -((-k).div_euclid(-a));
                lo = Some(lo.map_or(b, |l| l.max(b)));
            }
        }
        let (Some(lo), Some(hi)) = (lo, hi) else { return Ok(None) };
        if hi < lo {
            return Ok(Some(Formula::False));
        }
        if hi - lo >= self.config.interval_limit {
            return Ok(None);
        }
        let body = Formula::and(conjuncts.iter().cloned());
        let mut disjuncts = Vec::new();
        for n in lo..=hi {
            let d = simplify(substitute(&body, x, &Term::constant(n))?);
            if d == Formula::True {
                return Ok(Some(Formula::True));
            }
            disjuncts.push(d);
        }
        self.check(Formula::or(disjuncts)).map(Some)
    }

    fn cooper(&self, x: &str, phi: Formula) -> Result<Formula> {
        // Equalities in x become pairs of inequalities.
        let phi = map_atoms(&phi, &mut |a, negated| {
            Ok(match a {
                Atom::Eq(t) if t.coeff(x) != 0 => {
                    debug_assert!(!negated, "input is in negation normal form");
                    let neg = t.checked_scale(-1).ok_or(PresburgerError::Overflow)?;
                    Formula::And(vec![Formula::Atom(Atom::Le(t.clone())), Formula::Atom(Atom::Le(neg))])
                }
                other => wrap(other.clone(), negated),
            })
        })?;

        let mut l: i128 = 1;
        for_each_atom(&phi, &mut |a| {
            let c = a.term().coeff(x);
            if c != 0 {
                l = lcm(l, c).unwrap_or(0);
            }
        });
        if l == 0 {
            return Err(PresburgerError::Overflow);
        }

        // Scale every atom so that x has coefficient +-l, then read l*x as x.
        let mut phi = map_atoms(&phi, &mut |a, negated| {
            let c = a.term().coeff(x);
            if c == 0 {
                return Ok(wrap(a.clone(), negated));
            }
            let m = l / c.abs();
            let scaled = a
                .term()
                .without(x)
                .checked_scale(m)
                .ok_or(PresburgerError::Overflow)?
                .checked_add(&Term::scaled_var(c.signum(), x))
                .ok_or(PresburgerError::Overflow)?;
            let atom = match a {
                Atom::Le(_) => Atom::Le(scaled),
                Atom::Divides(k, _) => Atom::Divides(k.checked_mul(m).ok_or(PresburgerError::Overflow)?, scaled),
                Atom::Eq(_) => unreachable!("equalities in x were expanded"),
            };
            Ok(wrap(atom, negated))
        })?;
        if l > 1 {
            phi = Formula::And(vec![phi, Formula::Atom(Atom::Divides(l, Term::var(x)))]);
        }

        // x + t <= 0 is an upper bound (x < 1 - t); -x + t <= 0 a lower bound (x > t - 1).
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut delta: i128 = 1;
        let mut overflow = false;
        for_each_atom(&phi, &mut |a| {
            let c = a.term().coeff(x);
            if c == 0 {
                return;
            }
            let rest = a.term().without(x);
            match a {
                Atom::Le(_) if c == -1 => match rest.checked_add_const(-1) {
                    Some(b) => lower.push(b),
                    None => overflow = true,
                },
                Atom::Le(_) => match rest.checked_scale(-1).and_then(|t| t.checked_add_const(1)) {
                    Some(b) => upper.push(b),
                    None => overflow = true,
                },
                Atom::Divides(k, _) => match lcm(delta, *k) {
                    Some(v) => delta = v,
                    None => overflow = true,
                },
                Atom::Eq(_) => unreachable!(),
            }
        });
        if overflow {
            return Err(PresburgerError::Overflow);
        }
        lower.sort();
        lower.dedup();
        upper.sort();
        upper.dedup();

        let use_lower = lower.len() <= upper.len();
        let infinite = map_atoms(&phi, &mut |a, negated| {
            let c = a.term().coeff(x);
            Ok(match a {
                Atom::Le(_) if c != 0 => {
                    // At -inf lower bounds fail and upper bounds hold; mirrored at +inf.
                    let holds = (c == 1) == use_lower;
                    Formula::from_bool(holds != negated)
                }
                other => wrap(other.clone(), negated),
            })
        })?;

        let mut disjuncts = Vec::new();
        let mut size = 0usize;
        for j in 1..=delta {
            let point = if use_lower { j } else { -j };
            let d = simplify(substitute(&infinite, x, &Term::constant(point))?);
            if d == Formula::True {
                return Ok(Formula::True);
            }
            size += d.size();
            disjuncts.push(d);
        }
        let bounds = if use_lower { &lower } else { &upper };
        for b in bounds {
            for j in 1..=delta {
                let offset = if use_lower { j } else { -j };
                let point = b.checked_add_const(offset).ok_or(PresburgerError::Overflow)?;
                let d = simplify(substitute(&phi, x, &point)?);
                if d == Formula::True {
                    return Ok(Formula::True);
                }
                size += d.size();
                if size > self.config.max_nodes {
                    return Err(PresburgerError::BudgetExceeded {
                        size,
                        limit: self.config.max_nodes,
                    });
                }
                disjuncts.push(d);
            }
        }
        self.check(Formula::or(disjuncts))
    }
}

/// Merges inequalities over the same linear part: the strongest survives in a
/// conjunction, the weakest in a disjunction, and complementary pairs fold.
fn simplify(f: Formula) -> Formula {
    match f {
        Formula::And(cs) => merge_bounds(cs.into_iter().map(simplify).collect(), true),
        Formula::Or(ds) => merge_bounds(ds.into_iter().map(simplify).collect(), false),
        other => other,
    }
}

fn merge_bounds(parts: Vec<Formula>, conjunction: bool) -> Formula {
    // linear part s -> constant k of the surviving atom s + k <= 0
    let mut bounds: BTreeMap<Term, i128> = BTreeMap::new();
    let mut rest = Vec::new();
    let mut pending = parts;
    while let Some(p) = pending.pop() {
        match p {
            Formula::And(cs) if conjunction => pending.extend(cs),
            Formula::Or(ds) if !conjunction => pending.extend(ds),
            Formula::Atom(Atom::Le(t)) if !t.is_constant() => {
                let k = t.constant_part();
                bounds
                    .entry(t.with_constant(0))
                    .and_modify(|c| *c = if conjunction { (*c).max(k) } else { (*c).min(k) })
                    .or_insert(k);
            }
            other => rest.push(other),
        }
    }
    for (s, &a) in &bounds {
        let Some(&b) = bounds.get(&-s.clone()) else { continue };
        // s <= -a against s >= b
        let Some(sum) = a.checked_add(b) else { continue };
        if conjunction && sum > 0 {
            return Formula::False;
        }
        if !conjunction && sum <= 1 {
            return Formula::True;
        }
    }
    rest.extend(bounds.into_iter().map(|(s, k)| Formula::Atom(Atom::Le(s.with_constant(k)))));
    if conjunction {
        Formula::and(rest)
    } else {
        Formula::or(rest)
    }
}

fn wrap(a: Atom, negated: bool) -> Formula {
    let f = Formula::Atom(a);
    if negated {
        Formula::Not(Box::new(f))
    } else {
        f
    }
}

/// Rebuilds an NNF formula, replacing each (possibly negated) atom.
fn map_atoms(
    f: &Formula,
    g: &mut dyn FnMut(&Atom, bool) -> Result<Formula>,
) -> Result<Formula> {
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => g(a, false)?,
        Formula::Not(inner) => match &**inner {
            Formula::Atom(a) => g(a, true)?,
            _ => unreachable!("negation normal form expected"),
        },
        Formula::And(cs) => Formula::and(cs.iter().map(|c| map_atoms(c, g)).collect::<Result<Vec<_>>>()?),
        Formula::Or(cs) => Formula::or(cs.iter().map(|c| map_atoms(c, g)).collect::<Result<Vec<_>>>()?),
        Formula::Exists(..) | Formula::Forall(..) => unreachable!("quantifier-free formula expected"),
    })
}

fn for_each_atom(f: &Formula, g: &mut dyn FnMut(&Atom)) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom(a) => g(a),
        Formula::Not(inner) => for_each_atom(inner, g),
        Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| for_each_atom(c, g)),
        Formula::Exists(..) | Formula::Forall(..) => unreachable!("quantifier-free formula expected"),
    }
}

/// Substitutes `x := t` in an NNF quantifier-free formula, normalizing atoms.
fn substitute(f: &Formula, x: &str, t: &Term) -> Result<Formula> {
    map_atoms(f, &mut |a, negated| {
        let atom = a
            .map_term(|s| s.checked_substitute(x, t))
            .ok_or(PresburgerError::Overflow)?;
        let out = atom.normalize();
        Ok(if negated { out.negate_nnf() } else { out })
    })
}

/// `E x. (c*x + t = 0 /\ rest)` with `c = +-1` is `rest[x := -c*t]`.
fn solve_unit_equality(x: &str, conjuncts: &[Formula]) -> Result<Option<Formula>> {
    let pos = conjuncts.iter().position(|c| match c {
        Formula::Atom(Atom::Eq(t)) => t.coeff(x).abs() == 1,
        _ => false,
    });
    let Some(pos) = pos else { return Ok(None) };
    let Formula::Atom(Atom::Eq(t)) = &conjuncts[pos] else { unreachable!() };
    let c = t.coeff(x);
    let value = t
        .without(x)
        .checked_scale(-c)
        .ok_or(PresburgerError::Overflow)?;
    let rest = conjuncts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pos)
        .map(|(_, f)| substitute(f, x, &value))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(Formula::and(rest)))
}
