use std::collections::{BTreeSet, VecDeque};

use wsts_presburger::{Formula, Term};

use crate::models::PcmModel;
use crate::monotonicity::{
    certify_extends_dickson, check_strong_monotonicity, ord_left, ord_right, ordering_axioms_check,
    refute_wellness_bounded, MonotonicityError, MonotonicityKind, MonotonicityVerdict,
};

/// Grid size used to screen orderings that are not certified well.
pub const WELLNESS_BOUND: u64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Relation {
    Le,
    Eq,
    Dvd,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    /// Distinct formulas generated, counted against the budget.
    pub candidates: usize,
    pub quasi_orderings: usize,
    pub rejected_axioms: usize,
    /// Axiom checks that ran out of solver budget.
    pub inconclusive: usize,
    pub rank: usize,
}

/// Deterministic, rank-ordered stream of quasi-orderings over `u1..ud, v1..vd`.
///
/// An atom is `c·u + c'·v + k ⋈ 0` with `⋈` one of `<=`, `=`, or a
/// divisibility `m | c·u + c'·v + k`, with some `u` and some `v` coefficient
/// nonzero and coprime coefficients. Its rank is the sum of the absolute
/// values of the coefficients and the constant, plus `m`. A formula of rank
/// `n` is an atom of rank `n`, a conjunction of distinct atoms whose ranks sum
/// to `n`, or a disjunction of two atoms whose ranks sum to `n - 1`.
#[derive(Clone, Debug)]
pub struct OrderingEnumerator {
    d: usize,
    budget: usize,
    rank: usize,
    /// All atoms of rank `< rank`, in generation order, with their ranks.
    atoms: Vec<(Formula, usize)>,
    pending: VecDeque<Formula>,
    seen: BTreeSet<Formula>,
    stats: EnumerationStats,
}

pub fn enumerate_orderings(d: usize, budget: usize) -> OrderingEnumerator {
    OrderingEnumerator {
        d,
        budget,
        rank: 0,
        atoms: Vec::new(),
        pending: VecDeque::new(),
        seen: BTreeSet::new(),
        stats: EnumerationStats::default(),
    }
}

impl OrderingEnumerator {
    pub fn stats(&self) -> EnumerationStats {
        self.stats
    }

    fn next_candidate(&mut self) -> Option<Formula> {
        loop {
            if let Some(f) = self.pending.pop_front() {
                if self.seen.insert(f.clone()) {
                    return Some(f);
                }
                continue;
            }
            if self.d == 0 {
                // The only ordering on a single point.
                return if self.rank == 0 {
                    self.rank = 1;
                    Some(Formula::True)
                } else {
                    None
                };
            }
            self.fill_rank();
        }
    }

    /// Queues every formula of the current rank, then advances it.
    fn fill_rank(&mut self) {
        let n = self.rank;
        self.stats.rank = n;
        let fresh = atoms_of_rank(self.d, n);
        for f in &fresh {
            self.pending.push_back(f.clone());
        }
        let mut chosen = Vec::new();
        conjunctions(&self.atoms, 0, n, &mut chosen, &mut self.pending);
        for i in 0..self.atoms.len() {
            for j in i + 1..self.atoms.len() {
                if self.atoms[i].1 + self.atoms[j].1 + 1 == n {
                    self.pending.push_back(Formula::or([self.atoms[i].0.clone(), self.atoms[j].0.clone()]));
                }
            }
        }
        self.atoms.extend(fresh.into_iter().map(|f| (f, n)));
        self.rank += 1;
    }
}

/// Conjunctions of at least two atoms with increasing indices from `start`.
fn conjunctions(
    atoms: &[(Formula, usize)],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<usize>,
    out: &mut VecDeque<Formula>,
) {
    if remaining == 0 {
        if chosen.len() >= 2 {
            out.push_back(Formula::and(chosen.iter().map(|&i| atoms[i].0.clone())));
        }
        return;
    }
    for i in start..atoms.len() {
        let r = atoms[i].1;
        if r <= remaining && (chosen.len() + 1 >= 2 || r < remaining) {
            chosen.push(i);
            conjunctions(atoms, i + 1, remaining - r, chosen, out);
            chosen.pop();
        }
    }
}

impl Iterator for OrderingEnumerator {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        while self.stats.candidates < self.budget {
            let f = self.next_candidate()?;
            self.stats.candidates += 1;
            match ordering_axioms_check(&f, self.d) {
                Ok(r) if r.is_quasi_ordering() => {
                    self.stats.quasi_orderings += 1;
                    return Some(f);
                }
                Ok(_) => self.stats.rejected_axioms += 1,
                Err(_) => self.stats.inconclusive += 1,
            }
        }
        None
    }
}

/// Position of a value in the preference order: nonzero values by magnitude,
/// `preferred_sign` first; zero last.
fn preference(value: i128, preferred_sign: i128) -> i128 {
    match value {
        0 => i128::MAX,
        v if v.signum() == preferred_sign => 2 * v.abs() - 2,
        v => 2 * v.abs() - 1,
    }
}

fn constant_preference(k: i128) -> i128 {
    match k {
        0 => 0,
        k if k < 0 => 2 * k.abs() - 1,
        k => 2 * k,
    }
}

/// All integer vectors of length `len` whose absolute values sum to `total`.
fn signed_compositions(len: usize, total: usize) -> Vec<Vec<i128>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for a in 0..=total {
        for rest in signed_compositions(len - 1, total - a) {
            let signs: &[i128] = if a == 0 { &[1] } else { &[1, -1] };
            for &s in signs {
                let mut v = vec![s * a as i128];
                v.extend(&rest);
                out.push(v);
            }
        }
    }
    out
}

fn gcd_all(xs: &[i128]) -> i128 {
    xs.iter().fold(0i128, |g, &x| {
        let (mut a, mut b) = (g.abs(), x.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    })
}

fn linear_term(d: usize, coeffs: &[i128], k: i128) -> Term {
    let mut t = Term::constant(k);
    for i in 0..d {
        t = t + Term::scaled_var(coeffs[i], ord_left(i)) + Term::scaled_var(coeffs[d + i], ord_right(i));
    }
    t
}

fn mentions_both_sides(d: usize, coeffs: &[i128]) -> bool {
    coeffs[..d].iter().any(|&c| c != 0) && coeffs[d..].iter().any(|&c| c != 0)
}

fn sort_key(d: usize, coeffs: &[i128], k: i128) -> Vec<i128> {
    let mut key: Vec<i128> = coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| preference(c, if j < d { 1 } else { -1 }))
        .collect();
    key.push(constant_preference(k));
    key
}

fn atoms_of_rank(d: usize, n: usize) -> Vec<Formula> {
    let mut linear: Vec<(Relation, Vec<i128>, Formula)> = Vec::new();
    for v in signed_compositions(2 * d + 1, n) {
        let (coeffs, k) = (&v[..2 * d], v[2 * d]);
        if !mentions_both_sides(d, coeffs) || gcd_all(&v) != 1 {
            continue;
        }
        let key = sort_key(d, coeffs, k);
        let t = linear_term(d, coeffs, k);
        linear.push((Relation::Le, key.clone(), Formula::le(t.clone(), Term::constant(0))));
        if coeffs.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
            linear.push((Relation::Eq, key, Formula::eq(t, Term::constant(0))));
        }
    }
    // m | c·u + c'·v + k with coefficients and constant in 0..m.
    for m in 2..=n {
        for v in signed_compositions(2 * d + 1, n - m) {
            if v.iter().any(|&c| c < 0 || c >= m as i128) {
                continue;
            }
            let (coeffs, k) = (&v[..2 * d], v[2 * d]);
            let mut with_m = v.clone();
            with_m.push(m as i128);
            if !mentions_both_sides(d, coeffs) || gcd_all(&with_m) != 1 {
                continue;
            }
            let mut key = vec![m as i128];
            key.extend(sort_key(d, coeffs, k));
            linear.push((Relation::Dvd, key, Formula::divides(m as i128, linear_term(d, coeffs, k))));
        }
    }
    linear.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    linear.into_iter().map(|(_, _, f)| f).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub enumeration: EnumerationStats,
    /// Orderings proven to contain componentwise `<=`.
    pub certified_well: usize,
    /// Orderings skipped because the bounded search found suspicious patterns.
    pub suspected_ill: usize,
    pub monotonicity_checks: usize,
    /// Checks abandoned on solver budget.
    pub inconclusive: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// `None` means the budget ran out, not that no ordering exists.
    pub found: Option<(Formula, MonotonicityVerdict)>,
    pub stats: SearchStats,
}

/// Enumerates quasi-orderings and returns the first under which `m` is
/// monotone of the given kind. Orderings that neither contain componentwise
/// `<=` nor pass the bounded wellness screen are skipped.
pub fn find_structuring_ordering(
    m: &PcmModel,
    kind: MonotonicityKind,
    budget: usize,
) -> Result<SearchOutcome, MonotonicityError> {
    let d = m.dimension();
    let mut orderings = enumerate_orderings(d, budget);
    let mut stats = SearchStats::default();
    while let Some(psi) = orderings.next() {
        match certify_extends_dickson(&psi, d) {
            Ok(true) => stats.certified_well += 1,
            Ok(false) => match refute_wellness_bounded(&psi, d, WELLNESS_BOUND) {
                Ok(None) => {}
                Ok(Some(_)) => {
                    stats.suspected_ill += 1;
                    continue;
                }
                Err(_) => {
                    stats.inconclusive += 1;
                    continue;
                }
            },
            Err(_) => {
                stats.inconclusive += 1;
                continue;
            }
        }
        stats.monotonicity_checks += 1;
        match check_strong_monotonicity(m, &psi, kind) {
            Ok(v) if v.holds => {
                stats.enumeration = orderings.stats();
                return Ok(SearchOutcome { found: Some((psi, v)), stats });
            }
            Ok(_) | Err(MonotonicityError::CounterexampleNotFound { .. }) => {}
            Err(MonotonicityError::Presburger(_)) => stats.inconclusive += 1,
            Err(e) => return Err(e),
        }
    }
    stats.enumeration = orderings.stats();
    Ok(SearchOutcome { found: None, stats })
}
