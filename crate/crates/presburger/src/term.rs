//! Linear integer terms `c1*x1 + ... + cn*xn + k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Variable names. Kept as plain strings; formulas are small.
pub type Var = String;

/// A linear term over integer variables.
///
/// Canonical form: variables are kept sorted (by the map) and zero
/// coefficients are never stored, so structural equality is semantic
/// equality of the linear expression.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    coeffs: BTreeMap<Var, i128>,
    constant: i128,
}

pub(crate) fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub(crate) fn lcm(a: i128, b: i128) -> Option<i128> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a.abs() / gcd(a, b)).checked_mul(b.abs())
}

impl Term {
    pub fn constant(k: i128) -> Self {
        Term { coeffs: BTreeMap::new(), constant: k }
    }

    pub fn var(name: impl Into<Var>) -> Self {
        Self::scaled_var(1, name)
    }

    pub fn scaled_var(c: i128, name: impl Into<Var>) -> Self {
        let mut coeffs = BTreeMap::new();
        if c != 0 {
            coeffs.insert(name.into(), c);
        }
        Term { coeffs, constant: 0 }
    }

    pub fn coeff(&self, v: &str) -> i128 {
        self.coeffs.get(v).copied().unwrap_or(0)
    }

    pub fn constant_part(&self) -> i128 {
        self.constant
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Var, i128)> {
        self.coeffs.iter().map(|(v, c)| (v, *c))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    pub fn mentions(&self, v: &str) -> bool {
        self.coeffs.contains_key(v)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Gcd of the variable coefficients (0 for a constant term).
    pub fn content(&self) -> i128 {
        self.coeffs.values().fold(0, |g, c| gcd(g, *c))
    }

    pub fn checked_add(&self, other: &Term) -> Option<Term> {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            let entry = out.coeffs.entry(v.clone()).or_insert(0);
            *entry = entry.checked_add(*c)?;
            if *entry == 0 {
                out.coeffs.remove(v);
            }
        }
        out.constant = out.constant.checked_add(other.constant)?;
        Some(out)
    }

    pub fn checked_add_const(&self, k: i128) -> Option<Term> {
        let mut out = self.clone();
        out.constant = out.constant.checked_add(k)?;
        Some(out)
    }

    pub fn checked_scale(&self, k: i128) -> Option<Term> {
        if k == 0 {
            return Some(Term::constant(0));
        }
        let mut coeffs = BTreeMap::new();
        for (v, c) in &self.coeffs {
            coeffs.insert(v.clone(), c.checked_mul(k)?);
        }
        Some(Term { coeffs, constant: self.constant.checked_mul(k)? })
    }

    /// Divides every coefficient and the constant by `k`, which must divide all of them.
    pub(crate) fn exact_div(&self, k: i128) -> Term {
        debug_assert!(k != 0);
        Term {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c / k)).collect(),
            constant: self.constant / k,
        }
    }

    pub(crate) fn with_constant(&self, k: i128) -> Term {
        Term { coeffs: self.coeffs.clone(), constant: k }
    }

    /// The term with variable `v` removed.
    pub fn without(&self, v: &str) -> Term {
        let mut out = self.clone();
        out.coeffs.remove(v);
        out
    }

    /// Replaces `v` by `replacement`.
    pub fn checked_substitute(&self, v: &str, replacement: &Term) -> Option<Term> {
        let c = self.coeff(v);
        if c == 0 {
            return Some(self.clone());
        }
        self.without(v).checked_add(&replacement.checked_scale(c)?)
    }

    /// Simultaneous substitution.
    pub fn checked_substitute_all(&self, map: &BTreeMap<Var, Term>) -> Option<Term> {
        let mut out = Term::constant(self.constant);
        for (v, c) in &self.coeffs {
            let piece = match map.get(v) {
                Some(t) => t.checked_scale(*c)?,
                None => Term::scaled_var(*c, v.clone()),
            };
            out = out.checked_add(&piece)?;
        }
        Some(out)
    }

    /// Evaluates the term; `None` from `lookup` is reported as the missing variable.
    pub fn eval_with<F>(&self, lookup: F) -> Result<Option<i128>, Var>
    where
        F: Fn(&str) -> Option<i128>,
    {
        let mut acc = self.constant;
        for (v, c) in &self.coeffs {
            let value = lookup(v).ok_or_else(|| v.clone())?;
            let Some(next) = c.checked_mul(value).and_then(|p| acc.checked_add(p)) else {
                return Ok(None);
            };
            acc = next;
        }
        Ok(Some(acc))
    }

    pub(crate) fn rename(&self, from: &str, to: &str) -> Term {
        match self.coeffs.get(from) {
            None => self.clone(),
            Some(c) => {
                let c = *c;
                let mut out = self.without(from);
                // `to` is fresh, so no merge is needed.
                out.coeffs.insert(to.to_string(), c);
                out
            }
        }
    }
}

impl Add for Term {
    type Output = Term;
    fn add(self, rhs: Term) -> Term {
        self.checked_add(&rhs).expect("term coefficient overflow")
    }
}

impl Sub for Term {
    type Output = Term;
    fn sub(self, rhs: Term) -> Term {
        self + (-rhs)
    }
}

impl Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        self.checked_scale(-1).expect("term coefficient overflow")
    }
}

impl Mul<i128> for Term {
    type Output = Term;
    fn mul(self, k: i128) -> Term {
        self.checked_scale(k).expect("term coefficient overflow")
    }
}

impl Add<i128> for Term {
    type Output = Term;
    fn add(self, k: i128) -> Term {
        self.checked_add_const(k).expect("term constant overflow")
    }
}

impl Sub<i128> for Term {
    type Output = Term;
    fn sub(self, k: i128) -> Term {
        self.checked_add_const(-k).expect("term constant overflow")
    }
}

impl From<i128> for Term {
    fn from(k: i128) -> Self {
        Term::constant(k)
    }
}

/// Writes a sum of `(coefficient, variable)` pairs plus a constant, e.g. `2*x - y + 3`.
pub(crate) fn write_sum(
    f: &mut fmt::Formatter<'_>,
    parts: &[(i128, &str)],
    constant: i128,
) -> fmt::Result {
    let mut first = true;
    for (c, v) in parts {
        let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
        if first {
            if sign == "-" {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        if mag == 1 {
            write!(f, "{v}")?;
        } else {
            write!(f, "{mag}*{v}")?;
        }
        first = false;
    }
    if first {
        write!(f, "{constant}")
    } else if constant > 0 {
        write!(f, " + {constant}")
    } else if constant < 0 {
        write!(f, " - {}", -constant)
    } else {
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<(i128, &str)> = self.coeffs.iter().map(|(v, c)| (*c, v.as_str())).collect();
        write_sum(f, &parts, self.constant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_are_dropped() {
        let t = Term::var("x") + Term::var("y") - Term::var("x");
        assert_eq!(t, Term::var("y"));
        assert!(!t.mentions("x"));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let t = Term::var("x") * 2 + Term::var("y");
        let mut map = BTreeMap::new();
        map.insert("x".to_string(), Term::var("y"));
        map.insert("y".to_string(), Term::var("x"));
        let s = t.checked_substitute_all(&map).unwrap();
        assert_eq!(s, Term::var("y") * 2 + Term::var("x"));
    }

    #[test]
    fn display_orders_variables() {
        let t = Term::var("y") * -1 + Term::var("x") * 3 + 4;
        assert_eq!(t.to_string(), "3*x - y + 4");
        assert_eq!(Term::constant(-2).to_string(), "-2");
    }

    #[test]
    fn overflow_is_detected() {
        let t = Term::scaled_var(i128::MAX, "x");
        assert!(t.checked_scale(2).is_none());
    }
}
