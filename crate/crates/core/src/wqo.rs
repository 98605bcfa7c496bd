//! Well-quasi-orderings and upward-closed sets given by finite bases.
//!
//! The payload orders are the Dickson order on counter vectors (also over
//! `ℕ ∪ {ω}`), the subword order on channel words, and their products with
//! equality on control states. Upward-closed sets are represented by the
//! antichain of their minimal elements, kept sorted so that every output is
//! reproducible.

use std::fmt;

use thiserror::Error;

pub type StateId = usize;
pub type Letter = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WqoError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// A quasi-ordering on a type. Implementations must be reflexive and transitive.
pub trait QuasiOrder {
    fn leq(&self, other: &Self) -> bool;

    fn lt(&self, other: &Self) -> bool {
        self.leq(other) && !other.leq(self)
    }
}

/// A vector of naturals, compared componentwise.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vector(pub Vec<u64>);

impl Vector {
    pub fn zeros(d: usize) -> Self {
        Vector(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn max_entry(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl From<Vec<u64>> for Vector {
    fn from(v: Vec<u64>) -> Self {
        Vector(v)
    }
}

impl From<&[u64]> for Vector {
    fn from(v: &[u64]) -> Self {
        Vector(v.to_vec())
    }
}

impl QuasiOrder for Vector {
    fn leq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// An element of `ℕ ∪ {ω}`. `Omega` sorts above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OmegaNat {
    Finite(u64),
    Omega,
}

impl OmegaNat {
    pub fn is_omega(self) -> bool {
        matches!(self, OmegaNat::Omega)
    }

    /// Adds a signed delta; ω absorbs it. Returns `None` if a finite value
    /// would go negative.
    pub fn add_delta(self, delta: i64) -> Option<OmegaNat> {
        match self {
            OmegaNat::Omega => Some(OmegaNat::Omega),
            OmegaNat::Finite(n) => {
                let r = i128::from(n) + i128::from(delta);
                u64::try_from(r).ok().map(OmegaNat::Finite)
            }
        }
    }

    /// `self >= n` for a finite `n`.
    pub fn covers(self, n: u64) -> bool {
        match self {
            OmegaNat::Omega => true,
            OmegaNat::Finite(m) => m >= n,
        }
    }
}

impl fmt::Display for OmegaNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaNat::Finite(n) => write!(f, "{n}"),
            OmegaNat::Omega => write!(f, "ω"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OmegaVector(pub Vec<OmegaNat>);

impl OmegaVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn omega_count(&self) -> usize {
        self.0.iter().filter(|x| x.is_omega()).count()
    }

    /// `self >= v` where `v` is finite.
    pub fn covers(&self, v: &Vector) -> bool {
        self.0.iter().zip(&v.0).all(|(a, b)| a.covers(*b))
    }
}

impl From<&Vector> for OmegaVector {
    fn from(v: &Vector) -> Self {
        OmegaVector(v.0.iter().map(|x| OmegaNat::Finite(*x)).collect())
    }
}

impl QuasiOrder for OmegaVector {
    fn leq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for OmegaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A finite word; letters are indices into the owning model's alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All distinct subwords (scattered subsequences), sorted.
    pub fn subwords(&self) -> Vec<Word> {
        let n = self.0.len();
        assert!(n < 32, "subword enumeration is limited to short words");
        let mut out: Vec<Word> = (0u32..(1 << n))
            .map(|mask| {
                Word(
                    (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl QuasiOrder for Word {
    fn leq(&self, other: &Self) -> bool {
        leq_subword(self, other)
    }
}

/// One word per channel, compared by the product of subword orders.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Channels(pub Vec<Word>);

impl Channels {
    pub fn empty(n: usize) -> Self {
        Channels(vec![Word::default(); n])
    }

    pub fn max_len(&self) -> usize {
        self.0.iter().map(Word::len).max().unwrap_or(0)
    }
}

impl QuasiOrder for Channels {
    fn leq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.0.len(), other.0.len());
        self.0.iter().zip(&other.0).all(|(u, v)| leq_subword(u, v))
    }
}

/// A control state paired with a payload.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config<P> {
    pub control: StateId,
    pub payload: P,
}

impl<P> Config<P> {
    pub fn new(control: StateId, payload: P) -> Self {
        Config { control, payload }
    }
}

impl<P: QuasiOrder> QuasiOrder for Config<P> {
    fn leq(&self, other: &Self) -> bool {
        self.control == other.control && self.payload.leq(&other.payload)
    }
}

fn check_dims(left: usize, right: usize) -> Result<(), WqoError> {
    if left != right {
        return Err(WqoError::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Componentwise order on `ℕ^d`.
pub fn leq_dickson(x: &Vector, y: &Vector) -> Result<bool, WqoError> {
    check_dims(x.dim(), y.dim())?;
    Ok(x.leq(y))
}

/// Componentwise order on `ℕ_ω^d`, with ω as top.
pub fn leq_omega(x: &OmegaVector, y: &OmegaVector) -> Result<bool, WqoError> {
    check_dims(x.dim(), y.dim())?;
    Ok(x.leq(y))
}

/// Subword embedding, by a single greedy scan of `v`.
pub fn leq_subword(u: &Word, v: &Word) -> bool {
    let mut rest = u.0.iter().peekable();
    for letter in &v.0 {
        match rest.peek() {
            None => return true,
            Some(&&want) if want == *letter => {
                rest.next();
            }
            Some(_) => {}
        }
    }
    rest.peek().is_none()
}

/// Prefix order.
pub fn leq_prefix(u: &Word, v: &Word) -> bool {
    v.0.starts_with(&u.0)
}

/// `=_Q × payload_leq`.
pub fn product_leq<P>(c1: &Config<P>, c2: &Config<P>, payload_leq: impl Fn(&P, &P) -> bool) -> bool {
    c1.control == c2.control && payload_leq(&c1.payload, &c2.payload)
}

/// The minimal elements of `items` under `leq`, deduplicated and sorted.
///
/// Among mutually equivalent elements (`a <= b <= a`, `a != b`) the least in
/// the `Ord` encoding is kept.
pub fn minimize_by<T, F>(items: impl IntoIterator<Item = T>, leq: F) -> Vec<T>
where
    T: Ord,
    F: Fn(&T, &T) -> bool,
{
    let mut all: Vec<T> = items.into_iter().collect();
    all.sort();
    all.dedup();
    let keep: Vec<bool> = all
        .iter()
        .enumerate()
        .map(|(i, x)| {
            !all.iter().enumerate().any(|(j, y)| {
                j != i && leq(y, x) && (!leq(x, y) || j < i)
            })
        })
        .collect();
    all.into_iter().zip(keep).filter(|(_, k)| *k).map(|(x, _)| x).collect()
}

/// The maximal elements of `items` under `leq`, deduplicated and sorted.
pub fn maximize_by<T, F>(items: impl IntoIterator<Item = T>, leq: F) -> Vec<T>
where
    T: Ord,
    F: Fn(&T, &T) -> bool,
{
    minimize_by(items, |a, b| leq(b, a))
}

/// True iff no two distinct elements are comparable.
pub fn is_antichain_by<T: PartialEq>(items: &[T], leq: impl Fn(&T, &T) -> bool) -> bool {
    items.iter().enumerate().all(|(i, x)| {
        items
            .iter()
            .enumerate()
            .all(|(j, y)| i == j || (!leq(x, y) && !leq(y, x)))
    })
}

/// A finite antichain of minimal elements, denoting its upward closure.
///
/// The empty basis is the empty set; the basis holding the bottom payload
/// of a control state is the whole cone of that state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinBasis<T> {
    elements: Vec<T>,
}

impl<T> Default for MinBasis<T> {
    fn default() -> Self {
        MinBasis { elements: Vec::new() }
    }
}

impl<T: QuasiOrder + Ord + Clone> MinBasis<T> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full(bottom: T) -> Self {
        MinBasis { elements: vec![bottom] }
    }

    pub fn minimize(candidates: impl IntoIterator<Item = T>) -> Self {
        MinBasis { elements: minimize_by(candidates, T::leq) }
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<T> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.elements.iter()
    }

    /// Membership in the upward closure.
    pub fn contains(&self, x: &T) -> bool {
        self.elements.iter().any(|b| b.leq(x))
    }

    /// `↑other ⊆ ↑self`.
    pub fn includes(&self, other: &MinBasis<T>) -> bool {
        other.elements.iter().all(|x| self.contains(x))
    }

    pub fn union(&self, other: &MinBasis<T>) -> MinBasis<T> {
        Self::minimize(self.elements.iter().chain(&other.elements).cloned())
    }

    /// Adds `x`; returns false (and leaves the basis unchanged) if `x` was
    /// already covered.
    pub fn insert(&mut self, x: T) -> bool {
        if self.contains(&x) {
            return false;
        }
        self.elements.retain(|e| !x.leq(e));
        let pos = self.elements.binary_search(&x).unwrap_or_else(|p| p);
        self.elements.insert(pos, x);
        true
    }

    pub fn is_antichain(&self) -> bool {
        is_antichain_by(&self.elements, T::leq)
    }
}

impl<'a, T> IntoIterator for &'a MinBasis<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// All vectors of dimension `d` with entries in `0..=bound`, in lexicographic order.
pub fn vector_grid(d: usize, bound: u64) -> impl Iterator<Item = Vector> {
    let mut next = Some(vec![0u64; d]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        let mut i = d;
        while i > 0 {
            i -= 1;
            if succ[i] < bound {
                succ[i] += 1;
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(Vector(cur))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[u64]) -> Vector {
        Vector(xs.to_vec())
    }

    fn w(s: &str) -> Word {
        Word(s.bytes().map(|b| u32::from(b - b'a')).collect())
    }

    const OMEGA: OmegaNat = OmegaNat::Omega;
    fn fin(n: u64) -> OmegaNat {
        OmegaNat::Finite(n)
    }

    #[test]
    fn dickson_examples() {
        assert!(leq_dickson(&v(&[1, 2]), &v(&[1, 3])).unwrap());
        assert!(!leq_dickson(&v(&[2, 1]), &v(&[1, 3])).unwrap());
        assert!(leq_dickson(&v(&[4, 0, 7]), &v(&[4, 0, 7])).unwrap());
        assert_eq!(
            leq_dickson(&v(&[1]), &v(&[1, 2])),
            Err(WqoError::DimensionMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn omega_examples() {
        let a = OmegaVector(vec![fin(3), OMEGA]);
        let b = OmegaVector(vec![OMEGA, OMEGA]);
        assert!(leq_omega(&a, &b).unwrap());
        let c = OmegaVector(vec![OMEGA, fin(0)]);
        let d = OmegaVector(vec![fin(5), fin(0)]);
        assert!(!leq_omega(&c, &d).unwrap());
        let z = OmegaVector(vec![fin(0), fin(0)]);
        assert!(leq_omega(&z, &z).unwrap());
        assert!(leq_omega(&z, &OmegaVector(vec![fin(0)])).is_err());
    }

    #[test]
    fn omega_arithmetic_saturates() {
        assert_eq!(OMEGA.add_delta(-7), Some(OMEGA));
        assert_eq!(fin(2).add_delta(-3), None);
        assert_eq!(fin(2).add_delta(3), Some(fin(5)));
    }

    #[test]
    fn subword_examples() {
        assert!(leq_subword(&w("ab"), &w("acb")));
        assert!(!leq_subword(&w("ba"), &w("ab")));
        assert!(leq_subword(&w(""), &w("abc")));
        assert!(leq_subword(&w(""), &w("")));
        assert!(!leq_subword(&w("a"), &w("")));
    }

    #[test]
    fn prefix_examples() {
        assert!(leq_prefix(&w("ab"), &w("abb")));
        assert!(!leq_prefix(&w("b"), &w("ab")));
        assert!(leq_prefix(&w(""), &w("")));
    }

    #[test]
    fn product_examples() {
        let c = |q, xs: &[u64]| Config::new(q, v(xs));
        assert!(product_leq(&c(0, &[1, 1]), &c(0, &[2, 2]), |a, b| a.leq(b)));
        assert!(!product_leq(&c(0, &[1, 1]), &c(1, &[2, 2]), |a, b| a.leq(b)));
        let a = Config::new(0, w("a"));
        let b = Config::new(0, w("ba"));
        assert!(product_leq(&a, &b, leq_subword));
    }

    #[test]
    fn minimize_examples() {
        let b = MinBasis::minimize([v(&[1, 2]), v(&[2, 2]), v(&[0, 5])]);
        assert_eq!(b.elements(), &[v(&[0, 5]), v(&[1, 2])]);
        let single = MinBasis::minimize([v(&[3, 3])]);
        assert_eq!(single.elements(), &[v(&[3, 3])]);
        let words = MinBasis::minimize([w("a"), w("ab"), w("b")]);
        assert_eq!(words.elements(), &[w("a"), w("b")]);
    }

    #[test]
    fn minimize_by_with_prefix_order() {
        let out = minimize_by([w("ab"), w("a"), w("ba"), w("b")], leq_prefix);
        assert_eq!(out, vec![w("a"), w("b")]);
    }

    #[test]
    fn contains_examples() {
        let b = MinBasis::minimize([v(&[1, 1])]);
        assert!(b.contains(&v(&[2, 3])));
        assert!(!b.contains(&v(&[0, 9])));
        assert!(!MinBasis::<Vector>::empty().contains(&v(&[5, 5])));
    }

    #[test]
    fn includes_examples() {
        let small = MinBasis::minimize([v(&[1, 1])]);
        let big = MinBasis::minimize([v(&[2, 2])]);
        assert!(small.includes(&big));
        assert!(!big.includes(&small));
        assert!(small.includes(&small));
    }

    #[test]
    fn union_examples() {
        let a = MinBasis::minimize([v(&[1, 1])]);
        let b = MinBasis::minimize([v(&[2, 2])]);
        assert_eq!(a.union(&b), a);
        assert_eq!(MinBasis::empty().union(&b), b);
        let c = MinBasis::minimize([v(&[0, 3])]);
        let d = MinBasis::minimize([v(&[3, 0])]);
        assert_eq!(c.union(&d).elements(), &[v(&[0, 3]), v(&[3, 0])]);
    }

    #[test]
    fn insert_keeps_antichain() {
        let mut b = MinBasis::empty();
        assert!(b.insert(v(&[2, 2])));
        assert!(b.insert(v(&[0, 5])));
        assert!(!b.insert(v(&[3, 3])));
        assert!(b.insert(v(&[1, 1])));
        assert_eq!(b.elements(), &[v(&[0, 5]), v(&[1, 1])]);
        assert!(b.is_antichain());
    }

    #[test]
    fn full_set_is_bottom_basis() {
        let b = MinBasis::full(v(&[0, 0]));
        assert!(b.contains(&v(&[7, 0])));
    }

    #[test]
    fn prefix_order_has_long_antichains() {
        // a, ba, bba, ... are pairwise prefix-incomparable.
        for n in [1usize, 2, 5, 12] {
            let family: Vec<Word> = (0..n)
                .map(|k| {
                    let mut letters = vec![1u32; k];
                    letters.push(0);
                    Word(letters)
                })
                .collect();
            assert!(is_antichain_by(&family, leq_prefix));
            // The same family is a chain under the subword order.
            assert!(family.windows(2).all(|p| leq_subword(&p[0], &p[1])));
        }
    }

    #[test]
    fn subwords_enumeration() {
        let subs = w("aba").subwords();
        assert_eq!(subs, vec![w(""), w("a"), w("aa"), w("ab"), w("aba"), w("b"), w("ba")]);
    }

    #[test]
    fn grid_enumerates_all() {
        assert_eq!(vector_grid(2, 2).count(), 9);
        assert_eq!(vector_grid(0, 5).count(), 1);
        assert_eq!(vector_grid(2, 1).map(|v| v.0).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }
}
