//! Random Presburger formulas whose quantifiers range over explicit finite
//! intervals, so that brute-force evaluation is exact.

use std::collections::BTreeMap;

use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
    Ne,
    Dvd(i128),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RFormula {
    /// `sum(c * v) + k  rel  0`, or `m | sum(c * v) + k`.
    Atom { rel: Rel, coeffs: Vec<(String, i128)>, constant: i128 },
    Not(Box<RFormula>),
    And(Box<RFormula>, Box<RFormula>),
    Or(Box<RFormula>, Box<RFormula>),
    /// `E v. lo <= v /\ v <= hi /\ body`
    Exists(String, i128, i128, Box<RFormula>),
    /// `A v. (lo <= v /\ v <= hi) -> body`
    Forall(String, i128, i128, Box<RFormula>),
}

impl RFormula {
    /// Direct evaluation; quantifiers are expanded over their intervals.
    pub fn eval(&self, env: &mut BTreeMap<String, i128>) -> bool {
        match self {
            RFormula::Atom { rel, coeffs, constant } => {
                let value: i128 = coeffs.iter().map(|(v, c)| c * env[v]).sum::<i128>() + constant;
                match rel {
                    Rel::Le => value <= 0,
                    Rel::Eq => value == 0,
                    Rel::Ne => value != 0,
                    Rel::Dvd(m) => value.rem_euclid(*m) == 0,
                }
            }
            RFormula::Not(f) => !f.eval(env),
            RFormula::And(a, b) => a.eval(env) && b.eval(env),
            RFormula::Or(a, b) => a.eval(env) || b.eval(env),
            RFormula::Exists(v, lo, hi, f) | RFormula::Forall(v, lo, hi, f) => {
                let exists = matches!(self, RFormula::Exists(..));
                let saved = env.get(v).copied();
                let mut result = !exists;
                for n in *lo..=*hi {
                    env.insert(v.clone(), n);
                    if f.eval(env) == exists {
                        result = exists;
                        break;
                    }
                }
                match saved {
                    Some(s) => env.insert(v.clone(), s),
                    None => env.remove(v),
                };
                result
            }
        }
    }

    /// Source text in the solver's input syntax.
    pub fn to_source(&self) -> String {
        match self {
            RFormula::Atom { rel, coeffs, constant } => {
                let mut t = String::new();
                for (v, c) in coeffs {
                    t.push_str(&format!("{} {} * {v} ", if *c < 0 { "-" } else { "+" }, c.abs()));
                }
                t.push_str(&format!("{} {}", if *constant < 0 { "-" } else { "+" }, constant.abs()));
                let t = format!("0 {t}");
                match rel {
                    Rel::Le => format!("{t} <= 0"),
                    Rel::Eq => format!("{t} = 0"),
                    Rel::Ne => format!("{t} != 0"),
                    Rel::Dvd(m) => format!("{m} | {t}"),
                }
            }
            RFormula::Not(f) => format!("~({})", f.to_source()),
            RFormula::And(a, b) => format!("({}) /\\ ({})", a.to_source(), b.to_source()),
            RFormula::Or(a, b) => format!("({}) \\/ ({})", a.to_source(), b.to_source()),
            RFormula::Exists(v, lo, hi, f) => {
                format!("E {v}. ({v} >= {lo} /\\ {v} <= {hi} /\\ ({}))", f.to_source())
            }
            RFormula::Forall(v, lo, hi, f) => {
                format!("A {v}. (({v} >= {lo} /\\ {v} <= {hi}) -> ({}))", f.to_source())
            }
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            RFormula::Atom { .. } => 0,
            RFormula::Not(f) => f.quantifier_count(),
            RFormula::And(a, b) | RFormula::Or(a, b) => a.quantifier_count() + b.quantifier_count(),
            RFormula::Exists(_, _, _, f) | RFormula::Forall(_, _, _, f) => 1 + f.quantifier_count(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FormulaParams {
    pub free_vars: usize,
    pub max_quantifiers: usize,
    pub max_coeff: i128,
    /// Quantified variables range over `0..=quantifier_range`.
    pub quantifier_range: i128,
}

impl Default for FormulaParams {
    fn default() -> Self {
        FormulaParams { free_vars: 3, max_quantifiers: 3, max_coeff: 5, quantifier_range: 10 }
    }
}

pub fn free_var_names(n: usize) -> Vec<String> {
    ["x", "y", "z"].iter().take(n).map(|s| s.to_string()).collect()
}

fn random_atom<R: Rng>(rng: &mut R, scope: &[String], p: &FormulaParams) -> RFormula {
    let mut coeffs = Vec::new();
    for v in scope {
        if rng.gen_bool(0.6) {
            let c = rng.gen_range(1..=p.max_coeff) * if rng.gen_bool(0.5) { 1 } else { -1 };
            coeffs.push((v.clone(), c));
        }
    }
    if coeffs.is_empty() && !scope.is_empty() {
        coeffs.push((scope[rng.gen_range(0..scope.len())].clone(), 1));
    }
    let rel = match rng.gen_range(0..6) {
        0 | 1 => Rel::Le,
        2 => Rel::Eq,
        3 => Rel::Ne,
        _ => Rel::Dvd(rng.gen_range(2..=5)),
    };
    RFormula::Atom { rel, coeffs, constant: rng.gen_range(-10..=10) }
}

fn random_rec<R: Rng>(
    rng: &mut R,
    scope: &mut Vec<String>,
    quantifiers: &mut usize,
    depth: usize,
    p: &FormulaParams,
) -> RFormula {
    let choice = if depth == 0 { 0 } else { rng.gen_range(0..6) };
    match choice {
        0 | 1 => random_atom(rng, scope, p),
        2 => RFormula::Not(Box::new(random_rec(rng, scope, quantifiers, depth - 1, p))),
        3 => {
            let a = random_rec(rng, scope, quantifiers, depth - 1, p);
            let b = random_rec(rng, scope, quantifiers, depth - 1, p);
            if rng.gen_bool(0.5) {
                RFormula::And(Box::new(a), Box::new(b))
            } else {
                RFormula::Or(Box::new(a), Box::new(b))
            }
        }
        _ if *quantifiers < p.max_quantifiers => {
            *quantifiers += 1;
            let v = format!("q{}", *quantifiers);
            scope.push(v.clone());
            let body = random_rec(rng, scope, quantifiers, depth - 1, p);
            scope.pop();
            let hi = rng.gen_range(0..=p.quantifier_range);
            if choice == 4 {
                RFormula::Exists(v, 0, hi, Box::new(body))
            } else {
                RFormula::Forall(v, 0, hi, Box::new(body))
            }
        }
        _ => random_atom(rng, scope, p),
    }
}

/// A random formula over `x, y, z` (as many as `free_vars`) with at most
/// `max_quantifiers` bounded quantifiers.
pub fn random_formula<R: Rng>(rng: &mut R, p: &FormulaParams) -> RFormula {
    let mut scope = free_var_names(p.free_vars);
    let mut quantifiers = 0;
    random_rec(rng, &mut scope, &mut quantifiers, 4, p)
}

/// Hand-checked sentences with their truth values over the integers.
pub const CURATED_SENTENCES: [(&str, bool); 30] = [
    ("A x. x >= 0 -> E y. x = y + y \\/ x = y + y + 1", true),
    ("E x. 2 | x /\\ 2 | x + 1", false),
    ("A x. A y. x <= y \\/ y <= x", true),
    ("A x. E y. y = x + 1", true),
    ("E x. 2 * x = 3", false),
    ("A x. E y. x = 2 * y \\/ x = 2 * y + 1", true),
    ("A x. x = 2 -> x <= 3", true),
    ("A x. x = 4 -> ~(3 | x)", true),
    ("A x. A y. x = 7 /\\ y = 7 -> x = y", true),
    ("A x. 3 | x \\/ 3 | x + 1 \\/ 3 | x + 2", true),
    ("E x. x > 0 /\\ x < 1", false),
    ("A x. A y. x < y -> x + 1 <= y", true),
    ("E x. 3 * x + 2 = 11", true),
    ("E x. 6 * x = 9", false),
    ("A x. 2 | x -> ~(2 | x + 1)", true),
    ("A x. A y. A z. x <= y /\\ y <= z -> x <= z", true),
    ("E x. A y. x <= y", false),
    ("E x. A y. y >= 0 -> x <= y", true),
    ("A x. A y. E z. x + y = z", true),
    ("E x. E y. 2 * x + 4 * y = 7", false),
    ("E x. E y. 3 * x + 5 * y = 1", true),
    ("A x. 4 | x -> 2 | x", true),
    ("A x. 2 | x -> 4 | x", false),
    ("A x. x != 0 -> x >= 1 \\/ x <= 0 - 1", true),
    ("E x. x = x + 1", false),
    ("A x. E y. 3 * y <= x /\\ x < 3 * y + 3", true),
    ("A x. A y. x <= y <-> ~(y < x)", true),
    ("E x. 2 | x /\\ 3 | x /\\ ~(6 | x)", false),
    ("A x. x >= 8 -> E a. E b. a >= 0 /\\ b >= 0 /\\ x = 3 * a + 5 * b", true),
    ("E a. E b. a >= 0 /\\ b >= 0 /\\ 7 = 3 * a + 5 * b", false),
];
