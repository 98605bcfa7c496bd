//! Presburger formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{PresburgerError, Result};
use crate::term::{gcd, write_sum, Term, Var};

/// Atomic constraints, always read against zero: `t <= 0`, `t = 0`, `k | t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Le(Term),
    Eq(Term),
    /// Divisibility with modulus `k >= 2` once normalized.
    Divides(i128, Term),
}

impl Atom {
    pub fn term(&self) -> &Term {
        match self {
            Atom::Le(t) | Atom::Eq(t) | Atom::Divides(_, t) => t,
        }
    }

    pub(crate) fn map_term(&self, f: impl FnOnce(&Term) -> Option<Term>) -> Option<Atom> {
        Some(match self {
            Atom::Le(t) => Atom::Le(f(t)?),
            Atom::Eq(t) => Atom::Eq(f(t)?),
            Atom::Divides(k, t) => Atom::Divides(*k, f(t)?),
        })
    }

    /// Evaluates a ground atom.
    fn ground_value(&self) -> Option<bool> {
        let t = self.term();
        if !t.is_constant() {
            return None;
        }
        let k = t.constant_part();
        Some(match self {
            Atom::Le(_) => k <= 0,
            Atom::Eq(_) => k == 0,
            Atom::Divides(m, _) => k.rem_euclid(*m) == 0,
        })
    }

    /// Canonicalizes the atom: ground atoms fold to constants, coefficients are
    /// divided by their content, and divisibility constants are reduced.
    pub fn normalize(self) -> Formula {
        if let Some(b) = self.ground_value() {
            return Formula::from_bool(b);
        }
        match self {
            Atom::Le(t) => {
                let g = t.content();
                if g > 1 {
                    // g*s + k <= 0  <=>  s + ceil(k/g) <= 0
                    let k = t.constant_part();
                    let ceil = -((-k).div_euclid(g));
                    Formula::Atom(Atom::Le(t.with_constant(0).exact_div(g).with_constant(ceil)))
                } else {
                    Formula::Atom(Atom::Le(t))
                }
            }
            Atom::Eq(t) => {
                let g = t.content();
                let k = t.constant_part();
                if k % g != 0 {
                    return Formula::False;
                }
                let mut t = t.exact_div(g);
                if t.coeffs().next().map(|(_, c)| c < 0).unwrap_or(false) {
                    t = -t;
                }
                Formula::Atom(Atom::Eq(t))
            }
            Atom::Divides(m, t) => {
                let m = m.abs();
                if m == 1 {
                    return Formula::True;
                }
                let t = t.with_constant(t.constant_part().rem_euclid(m));
                let g = gcd(gcd(m, t.content()), t.constant_part());
                let (m, t) = if g > 1 { (m / g, t.exact_div(g)) } else { (m, t) };
                if m == 1 {
                    return Formula::True;
                }
                match (Atom::Divides(m, t.clone())).ground_value() {
                    Some(b) => Formula::from_bool(b),
                    None => Formula::Atom(Atom::Divides(m, t)),
                }
            }
        }
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> Option<i128>) -> Result<bool> {
        let value = self
            .term()
            .eval_with(env)
            .map_err(PresburgerError::MissingVariable)?
            .ok_or(PresburgerError::Overflow)?;
        Ok(match self {
            Atom::Le(_) => value <= 0,
            Atom::Eq(_) => value == 0,
            Atom::Divides(m, _) => value.rem_euclid(*m) == 0,
        })
    }
}

/// A Presburger formula over integer variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn le(a: Term, b: Term) -> Self {
        Atom::Le(a - b).normalize()
    }

    pub fn lt(a: Term, b: Term) -> Self {
        Atom::Le(a - b + 1).normalize()
    }

    pub fn ge(a: Term, b: Term) -> Self {
        Self::le(b, a)
    }

    pub fn gt(a: Term, b: Term) -> Self {
        Self::lt(b, a)
    }

    pub fn eq(a: Term, b: Term) -> Self {
        Atom::Eq(a - b).normalize()
    }

    pub fn ne(a: Term, b: Term) -> Self {
        Self::not(Self::eq(a, b))
    }

    /// `k | t`. Panics on `k = 0`, which has no divisibility reading.
    pub fn divides(k: i128, t: Term) -> Self {
        assert!(k != 0, "divisibility modulus must be non-zero");
        Atom::Divides(k, t).normalize()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(g) => *g,
            g => Formula::Not(Box::new(g)),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                g => out.push(g),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                g => out.push(g),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Self::or([Self::not(a), b])
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Self::and([Self::implies(a.clone(), b.clone()), Self::implies(b, a)])
    }

    pub fn exists(v: impl Into<Var>, body: Formula) -> Self {
        let v = v.into();
        if body.mentions_free(&v) {
            Formula::Exists(v, Box::new(body))
        } else {
            body
        }
    }

    pub fn forall(v: impl Into<Var>, body: Formula) -> Self {
        let v = v.into();
        if body.mentions_free(&v) {
            Formula::Forall(v, Box::new(body))
        } else {
            body
        }
    }

    /// `E v1. E v2. ... body`, first variable outermost.
    pub fn exists_all<I, S>(vars: I, body: Formula) -> Self
    where
        I: IntoIterator<Item = S>,
        I::IntoIter: DoubleEndedIterator,
        S: Into<Var>,
    {
        vars.into_iter().rev().fold(body, |acc, v| Self::exists(v, acc))
    }

    /// `A v1. A v2. ... body`, first variable outermost.
    pub fn forall_all<I, S>(vars: I, body: Formula) -> Self
    where
        I: IntoIterator<Item = S>,
        I::IntoIter: DoubleEndedIterator,
        S: Into<Var>,
    {
        vars.into_iter().rev().fold(body, |acc, v| Self::forall(v, acc))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for v in a.term().vars() {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Not(g) => g.collect_free(bound, out),
            Formula::And(gs) | Formula::Or(gs) => {
                for g in gs {
                    g.collect_free(bound, out);
                }
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                bound.push(v.clone());
                g.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn mentions_free(&self, v: &str) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Atom(a) => a.term().mentions(v),
            Formula::Not(g) => g.mentions_free(v),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().any(|g| g.mentions_free(v)),
            Formula::Exists(w, g) | Formula::Forall(w, g) => w != v && g.mentions_free(v),
        }
    }

    fn all_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.extend(a.term().vars().cloned()),
            Formula::Not(g) => g.all_vars(out),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.all_vars(out)),
            Formula::Exists(w, g) | Formula::Forall(w, g) => {
                out.insert(w.clone());
                g.all_vars(out);
            }
        }
    }

    /// Number of syntax nodes; atoms count one per variable occurrence plus one.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False => 1,
            Formula::Atom(a) => 1 + a.term().vars().count(),
            Formula::Not(g) => 1 + g.size(),
            Formula::And(gs) | Formula::Or(gs) => 1 + gs.iter().map(Formula::size).sum::<usize>(),
            Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.size(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(g) => g.is_quantifier_free(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().all(Formula::is_quantifier_free),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Capture-avoiding simultaneous substitution of free variables by terms.
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Result<Formula> {
        let mut avoid = BTreeSet::new();
        for t in map.values() {
            avoid.extend(t.vars().cloned());
        }
        self.all_vars(&mut avoid);
        avoid.extend(map.keys().cloned());
        let mut counter = 0usize;
        self.subst_rec(map, &avoid, &mut counter)
    }

    fn subst_rec(
        &self,
        map: &BTreeMap<Var, Term>,
        avoid: &BTreeSet<Var>,
        counter: &mut usize,
    ) -> Result<Formula> {
        Ok(match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => a
                .map_term(|t| t.checked_substitute_all(map))
                .ok_or(PresburgerError::Overflow)?
                .normalize(),
            Formula::Not(g) => Formula::not(g.subst_rec(map, avoid, counter)?),
            Formula::And(gs) => Formula::and(
                gs.iter()
                    .map(|g| g.subst_rec(map, avoid, counter))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Formula::Or(gs) => Formula::or(
                gs.iter()
                    .map(|g| g.subst_rec(map, avoid, counter))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let mut inner = map.clone();
                inner.remove(v);
                let captures = inner.values().any(|t| t.mentions(v));
                let (v2, body) = if captures {
                    let fresh = loop {
                        let candidate = format!("b{}", *counter);
                        *counter += 1;
                        if !avoid.contains(&candidate) {
                            break candidate;
                        }
                    };
                    (fresh.clone(), g.rename_free(v, &fresh))
                } else {
                    (v.clone(), (**g).clone())
                };
                let body = body.subst_rec(&inner, avoid, counter)?;
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(v2, body)
                } else {
                    Formula::forall(v2, body)
                }
            }
        })
    }

    /// Renames free occurrences of `from` to the fresh name `to`.
    fn rename_free(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => Formula::Atom(a.map_term(|t| Some(t.rename(from, to))).unwrap()),
            Formula::Not(g) => Formula::Not(Box::new(g.rename_free(from, to))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.rename_free(from, to)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.rename_free(from, to)).collect()),
            Formula::Exists(v, _) | Formula::Forall(v, _) if v == from => self.clone(),
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(g.rename_free(from, to))),
            Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(g.rename_free(from, to))),
        }
    }

    /// Instantiates free variables with integer values.
    pub fn instantiate<'a, I>(&self, values: I) -> Result<Formula>
    where
        I: IntoIterator<Item = (&'a str, i128)>,
    {
        let map: BTreeMap<Var, Term> = values
            .into_iter()
            .map(|(v, k)| (v.to_string(), Term::constant(k)))
            .collect();
        self.substitute(&map)
    }

    /// Evaluates a quantifier-free formula.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<i128>) -> Result<bool> {
        match self {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Atom(a) => a.eval(env),
            Formula::Not(g) => Ok(!g.eval(env)?),
            Formula::And(gs) => {
                for g in gs {
                    if !g.eval(env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(gs) => {
                for g in gs {
                    if g.eval(env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Exists(..) | Formula::Forall(..) => Err(PresburgerError::NotQuantifierFree),
        }
    }

    /// Negation pushed through a quantifier-free formula, keeping negation
    /// normal form: `Not` only ever wraps a divisibility atom.
    pub(crate) fn negate_nnf(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(Atom::Le(t)) => Atom::Le(-t.clone() + 1).normalize(),
            Formula::Atom(Atom::Eq(t)) => Formula::or([
                Atom::Le(t.clone() + 1).normalize(),
                Atom::Le(-t.clone() + 1).normalize(),
            ]),
            Formula::Atom(a @ Atom::Divides(..)) => Formula::Not(Box::new(Formula::Atom(a.clone()))),
            Formula::Not(g) => g.to_nnf(),
            Formula::And(gs) => Formula::or(gs.iter().map(Formula::negate_nnf)),
            Formula::Or(gs) => Formula::and(gs.iter().map(Formula::negate_nnf)),
            Formula::Exists(..) | Formula::Forall(..) => {
                unreachable!("negate_nnf on a quantified formula")
            }
        }
    }

    /// Negation normal form of a quantifier-free formula.
    pub(crate) fn to_nnf(&self) -> Formula {
        match self {
            Formula::Not(g) => g.negate_nnf(),
            Formula::And(gs) => Formula::and(gs.iter().map(Formula::to_nnf)),
            Formula::Or(gs) => Formula::or(gs.iter().map(Formula::to_nnf)),
            other => other.clone(),
        }
    }
}

fn needs_parens(f: &Formula) -> bool {
    matches!(
        f,
        Formula::And(_) | Formula::Or(_) | Formula::Exists(..) | Formula::Forall(..)
    )
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula) -> fmt::Result {
    if needs_parens(child) {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Prints `t ⋈ 0` with positive parts on the left and negative parts on the right.
fn write_relation(f: &mut fmt::Formatter<'_>, t: &Term, op: &str) -> fmt::Result {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for (v, c) in t.coeffs() {
        if c > 0 {
            lhs.push((c, v.as_str()));
        } else {
            rhs.push((-c, v.as_str()));
        }
    }
    let k = t.constant_part();
    let (lk, rk) = if k > 0 { (k, 0) } else { (0, -k) };
    write_sum(f, &lhs, lk)?;
    write!(f, " {op} ")?;
    write_sum(f, &rhs, rk)
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Le(t) => write_relation(f, t, "<="),
            Atom::Eq(t) => write_relation(f, t, "="),
            Atom::Divides(k, t) => write!(f, "{k} | {t}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => match **g {
                Formula::Atom(_) => write!(f, "~({g})"),
                _ => {
                    write!(f, "~")?;
                    write_child(f, g)
                }
            },
            Formula::And(gs) | Formula::Or(gs) => {
                let op = if matches!(self, Formula::And(_)) { " /\\ " } else { " \\/ " };
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{op}")?;
                    }
                    write_child(f, g)?;
                }
                Ok(())
            }
            Formula::Exists(v, g) => write!(f, "E {v}. {g}"),
            Formula::Forall(v, g) => write!(f, "A {v}. {g}"),
        }
    }
}
