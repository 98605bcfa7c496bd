use wsts_presburger::{decide_sentence, qe_cooper, Formula, Term};

use crate::monotonicity::{apply_ordering, check_arity, dickson_ordering, nonneg, ord_left, ord_right, vars, MonotonicityError};
use crate::wqo::{vector_grid, Vector};

/// Grid patterns that make an ordering suspicious. Never a proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellnessEvidence {
    /// Pairwise incomparable grid points.
    pub antichain: Vec<Vector>,
    /// Strictly descending grid points with non-decreasing coordinate sums.
    pub descending_chain: Vec<Vector>,
    /// Always false: the grid is finite.
    pub conclusive: bool,
}

/// True iff the ordering contains componentwise `<=` on the naturals. Any
/// quasi-ordering containing a well-quasi-ordering is itself one.
pub fn certify_extends_dickson(ordering: &Formula, d: usize) -> Result<bool, MonotonicityError> {
    check_arity(ordering, d)?;
    let (us, vs): (Vec<_>, Vec<_>) = (0..d).map(|i| (ord_left(i), ord_right(i))).unzip();
    let body = Formula::implies(
        Formula::and([nonneg(&us), nonneg(&vs), dickson_ordering(d)]),
        ordering.clone(),
    );
    Ok(decide_sentence(&Formula::forall_all([us, vs].concat(), body))?)
}

/// Searches `[0, bound)^d` for an antichain or a climbing descending chain of
/// at least `bound` points, and returns the longest of each if either does.
pub fn refute_wellness_bounded(
    ordering: &Formula,
    d: usize,
    bound: u64,
) -> Result<Option<WellnessEvidence>, MonotonicityError> {
    check_arity(ordering, d)?;
    if bound == 0 {
        return Ok(None);
    }
    let (a, b) = (vars("a", d), vars("b", d));
    let ta: Vec<Term> = a.iter().map(|v| Term::var(v.clone())).collect();
    let tb: Vec<Term> = b.iter().map(|v| Term::var(v.clone())).collect();
    let relation = qe_cooper(&apply_ordering(ordering, &ta, &tb)?)?;
    let points: Vec<Vector> = vector_grid(d, bound - 1).collect();
    let n = points.len();
    let mut leq = vec![false; n * n];
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            let values = a
                .iter()
                .zip(&p.0)
                .chain(b.iter().zip(&q.0))
                .map(|(v, x)| (v.as_str(), i128::from(*x)));
            leq[i * n + j] = relation.instantiate(values)?.eval(&|_| None)?;
        }
    }
    let le = |i: usize, j: usize| leq[i * n + j];
    let antichain = longest_greedy_antichain(&points, &le);
    let chain = longest_climbing_chain(&points, &le);
    let target = bound as usize;
    if antichain.len() >= target || chain.len() >= target {
        return Ok(Some(WellnessEvidence {
            antichain: antichain.into_iter().map(|i| points[i].clone()).collect(),
            descending_chain: chain.into_iter().map(|i| points[i].clone()).collect(),
            conclusive: false,
        }));
    }
    Ok(None)
}

fn sum(v: &Vector) -> u64 {
    v.0.iter().sum()
}

/// Greedy antichains on each antidiagonal and on the whole grid; the largest wins.
fn longest_greedy_antichain(points: &[Vector], le: &impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let greedy = |candidates: &mut dyn Iterator<Item = usize>| {
        let mut chosen: Vec<usize> = Vec::new();
        for i in candidates {
            if chosen.iter().all(|&j| !le(i, j) && !le(j, i)) {
                chosen.push(i);
            }
        }
        chosen
    };
    let max_sum = points.iter().map(sum).max().unwrap_or(0);
    let mut best = greedy(&mut (0..points.len()));
    for s in 0..=max_sum {
        let level = greedy(&mut (0..points.len()).filter(|&i| sum(&points[i]) == s));
        if level.len() > best.len() {
            best = level;
        }
    }
    best
}

/// Longest `p1 > p2 > ...` (strict part of the ordering) with
/// `sum(p_{k+1}) >= sum(p_k)`; the strict part is acyclic, so this is a
/// longest path in a DAG.
fn longest_climbing_chain(points: &[Vector], le: &impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let n = points.len();
    let below = |i: usize, j: usize| le(j, i) && !le(i, j) && sum(&points[j]) >= sum(&points[i]);
    // memo[i] = (length of the longest chain starting at i, next point)
    let mut memo: Vec<Option<(usize, Option<usize>)>> = vec![None; n];
    fn visit(
        i: usize,
        n: usize,
        below: &dyn Fn(usize, usize) -> bool,
        memo: &mut Vec<Option<(usize, Option<usize>)>>,
    ) -> usize {
        if let Some((len, _)) = memo[i] {
            return len;
        }
        let mut best = (1, None);
        for j in 0..n {
            if j != i && below(i, j) {
                let len = 1 + visit(j, n, below, memo);
                if len > best.0 {
                    best = (len, Some(j));
                }
            }
        }
        memo[i] = Some(best);
        best.0
    }
    let mut start = None;
    let mut best_len = 0;
    for i in 0..n {
        let len = visit(i, n, &below, &mut memo);
        if len > best_len {
            best_len = len;
            start = Some(i);
        }
    }
    let mut chain = Vec::new();
    let mut cur = start;
    while let Some(i) = cur {
        chain.push(i);
        cur = memo[i].and_then(|(_, next)| next);
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use wsts_presburger::parse_formula;

    #[test]
    fn dickson_has_evidence_but_is_certified() {
        let e = refute_wellness_bounded(&dickson_ordering(2), 2, 10).unwrap().unwrap();
        assert!(!e.conclusive);
        assert_eq!(e.antichain.len(), 10);
        assert!(e.descending_chain.len() < 10);
        assert!(certify_extends_dickson(&dickson_ordering(2), 2).unwrap());
    }

    #[test]
    fn equality_has_infinite_antichains() {
        let e = refute_wellness_bounded(&parse_formula("u1 = v1").unwrap(), 1, 10).unwrap().unwrap();
        assert_eq!(e.antichain, (0..10).map(|i| Vector(vec![i])).collect::<Vec<_>>());
        assert!(!certify_extends_dickson(&parse_formula("u1 = v1").unwrap(), 1).unwrap());
    }

    #[test]
    fn reverse_order_descends() {
        let e = refute_wellness_bounded(&parse_formula("v1 <= u1").unwrap(), 1, 10).unwrap().unwrap();
        assert_eq!(e.descending_chain.len(), 10);
        assert_eq!(e.antichain.len(), 1);
    }

    #[test]
    fn dickson_in_one_dimension_is_clean() {
        assert_eq!(refute_wellness_bounded(&dickson_ordering(1), 1, 10).unwrap(), None);
    }
}
