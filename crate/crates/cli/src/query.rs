use serde_json::{json, Value};
use wsts_core::abstraction::{
    drop_zero_tests, lossy_abstraction, zero_tests_to_resets, AbstractionReport,
};
use wsts_core::algorithms::{
    backward_coverability, bounded_forward_oracle, boundedness, karp_miller, km_to_dot, rrt_to_dot,
    termination, AnalysisError, Budgets, CoverabilityResult, PumpingWitness,
};
use wsts_core::models::{ModelError, PcmModel, PreBasis, Semantics, TransitionSystem, VassModel};
use wsts_core::monotonicity::{
    check_strong_monotonicity, dickson_ordering, find_structuring_ordering, MonotonicityError,
    MonotonicityKind, MonotonicityVerdict,
};
use wsts_core::wqo::Config;
use wsts_presburger::{decide_sentence, parse_formula, Formula, PresburgerError};

use crate::dsl::{emit_model, parse_target, Model, Target};
use crate::report::{CounterexampleReport, Outcome, Report, Stats};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum AbstractMode {
    /// Zero tests become unguarded no-ops.
    DropZero,
    /// Zero tests reset the tested counter.
    Reset,
    /// Channel machines switch to lossy semantics.
    Lossy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Analysis {
    /// Target configuration in DSL syntax, e.g. `q1 (0,1)`.
    Coverability(String),
    ControlStateReachability(String),
    Termination,
    Boundedness,
    KarpMiller,
    /// `None` selects the default ordering of the model class.
    CheckMonotonicity {
        ordering: Option<Formula>,
        strict: bool,
    },
    FindOrdering {
        budget: usize,
        strict: bool,
    },
    /// `None` picks the natural mode of the model class.
    Abstract(Option<AbstractMode>),
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Coverability(_) => "coverability",
            Analysis::ControlStateReachability(_) => "control-state-reachability",
            Analysis::Termination => "termination",
            Analysis::Boundedness => "boundedness",
            Analysis::KarpMiller => "karp-miller",
            Analysis::CheckMonotonicity { .. } => "check-monotonicity",
            Analysis::FindOrdering { .. } => "find-ordering",
            Analysis::Abstract(_) => "abstract",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub budgets: Budgets,
    /// Cross-check against the bounded forward oracle with this cutoff.
    pub oracle_cutoff: Option<usize>,
    /// Overrides the semantics declared by a channel machine.
    pub semantics: Option<Semantics>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            budgets: Budgets::default(),
            oracle_cutoff: None,
            semantics: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub analysis: Analysis,
    pub options: Options,
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Unsupported(m) => CliError::Unsupported(m),
            AnalysisError::BudgetExhausted { .. } => CliError::Budget(e.to_string()),
            AnalysisError::UnknownState(_) | AnalysisError::Model(_) => {
                CliError::Usage(e.to_string())
            }
            AnalysisError::Internal(m) => CliError::Internal(m),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        AnalysisError::from(e).into()
    }
}

impl From<MonotonicityError> for CliError {
    fn from(e: MonotonicityError) -> Self {
        match e {
            MonotonicityError::Arity { .. } => CliError::Usage(e.to_string()),
            MonotonicityError::Presburger(p) => p.into(),
            MonotonicityError::CounterexampleNotFound { .. } => CliError::Budget(e.to_string()),
            MonotonicityError::Certification(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<PresburgerError> for CliError {
    fn from(e: PresburgerError) -> Self {
        match e {
            PresburgerError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            PresburgerError::Parse { .. } | PresburgerError::FreeVariables(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

fn unsupported(analysis: &Analysis, model: &Model, hint: &str) -> CliError {
    CliError::Unsupported(format!(
        "{} is not available for {} models{hint}",
        analysis.name(),
        model.class()
    ))
}

fn default_ordering(model: &Model) -> &'static str {
    match model {
        Model::Lcs(_) => "subword",
        _ => "dickson",
    }
}

/// Checks model-class compatibility, then dispatches. `name` identifies the
/// model in the report.
pub fn run_query(model: &Model, name: &str, q: &Query) -> Result<Outcome, CliError> {
    let a = &q.analysis;
    let opts = &q.options;
    let zero_tests = ", abstract it first (`wsts abstract --mode reset`)";
    match (a, model) {
        (Analysis::Coverability(t) | Analysis::ControlStateReachability(t), Model::Vass(m)) => {
            let Target::Counters(target) = target_of(model, a, t)? else {
                unreachable!()
            };
            coverability(m, name, a, &target, opts, "dickson")
        }
        (Analysis::Coverability(t) | Analysis::ControlStateReachability(t), Model::Lcs(l)) => {
            let l = match opts.semantics {
                Some(s) => l.with_semantics(s),
                None => l.clone(),
            };
            let Target::Channels(target) = target_of(model, a, t)? else {
                unreachable!()
            };
            coverability(&l, name, a, &target, opts, "subword")
        }
        (Analysis::Termination, Model::Vass(m)) => run_termination(m, name, opts),
        (Analysis::Boundedness, Model::Vass(m)) => run_boundedness(m, name, opts),
        (Analysis::KarpMiller, Model::Vass(m)) => run_karp_miller(m, name, opts),
        (
            Analysis::CheckMonotonicity { ordering, strict },
            Model::Vass(_) | Model::Counter(_) | Model::Pcm(_),
        ) => {
            let pcm = as_pcm(model);
            let (psi, id) = match ordering {
                Some(f) => (f.clone(), f.to_string()),
                None => (dickson_ordering(pcm.dimension()), "dickson".to_string()),
            };
            let v = check_strong_monotonicity(&pcm, &psi, kind(*strict))?;
            Ok(Outcome::new(monotonicity_report(name, &id, &v)))
        }
        (
            Analysis::FindOrdering { budget, strict },
            Model::Vass(_) | Model::Counter(_) | Model::Pcm(_),
        ) => run_find_ordering(&as_pcm(model), name, *budget, kind(*strict)),
        (Analysis::Abstract(mode), _) => run_abstract(model, name, *mode),
        (Analysis::Coverability(_) | Analysis::ControlStateReachability(_), Model::Counter(_))
        | (
            Analysis::Termination | Analysis::Boundedness | Analysis::KarpMiller,
            Model::Counter(_),
        ) => Err(unsupported(a, model, zero_tests)),
        (Analysis::Boundedness | Analysis::KarpMiller, Model::Lcs(_)) => {
            Err(unsupported(a, model, ""))
        }
        (Analysis::Termination, Model::Lcs(_)) => Err(unsupported(
            a,
            model,
            "; use coverability for safety questions instead",
        )),
        (_, Model::Pcm(_)) => Err(unsupported(
            a,
            model,
            "; only check-monotonicity and find-ordering apply",
        )),
        (Analysis::CheckMonotonicity { .. } | Analysis::FindOrdering { .. }, Model::Lcs(_)) => Err(
            unsupported(a, model, "; Presburger orderings range over counters"),
        ),
    }
}

fn target_of(model: &Model, a: &Analysis, text: &str) -> Result<Target, CliError> {
    match a {
        Analysis::ControlStateReachability(_) => {
            let q = model
                .states()
                .iter()
                .position(|s| s == text.trim())
                .ok_or_else(|| CliError::Usage(format!("unknown state `{}`", text.trim())))?;
            Ok(match model {
                Model::Lcs(l) => Target::Channels(l.bottom(q)),
                Model::Vass(m) => Target::Counters(m.bottom(q)),
                _ => unreachable!("compatibility is checked by the caller"),
            })
        }
        _ => parse_target(model, text).map_err(|source| CliError::Parse {
            path: "--target".into(),
            source,
        }),
    }
}

fn kind(strict: bool) -> MonotonicityKind {
    if strict {
        MonotonicityKind::StrongStrict
    } else {
        MonotonicityKind::Strong
    }
}

fn as_pcm(model: &Model) -> PcmModel {
    match model {
        Model::Vass(m) => PcmModel::from_vass(m),
        Model::Counter(m) => PcmModel::from_counter_machine(m),
        Model::Pcm(m) => m.clone(),
        Model::Lcs(_) => unreachable!("compatibility is checked by the caller"),
    }
}

fn names<M: TransitionSystem>(m: &M, path: &[usize]) -> Vec<String> {
    path.iter()
        .map(|&t| m.transition_name(t).to_string())
        .collect()
}

fn coverability<M>(
    m: &M,
    name: &str,
    a: &Analysis,
    target: &Config<M::Payload>,
    opts: &Options,
    ordering: &str,
) -> Result<Outcome, CliError>
where
    M: PreBasis,
{
    let r: CoverabilityResult<M::Payload> =
        backward_coverability(m, m.initial(), target, &opts.budgets)?;
    let verdict = if r.coverable {
        "coverable"
    } else {
        "not-coverable"
    };
    let mut report = Report::new(a.name(), name, verdict, ordering);
    report.witness = r.witness.as_ref().map(|w| names(m, w));
    report.basis = Some(r.basis.iter().map(|c| m.format_config(c)).collect());
    report.stats = Stats {
        iterations: r.iterations,
        basis_size: r.basis.len(),
        nodes: 0,
    };
    report = report.extra("target", json!(m.format_config(target)));
    if let Some(cutoff) = opts.oracle_cutoff {
        let o = bounded_forward_oracle(m, m.initial(), cutoff, opts.budgets.max_states)?;
        let agrees = o.conclusive.then(|| o.covers(target) == r.coverable);
        report.stats.nodes = o.reachable.len();
        report = report.extra(
            "oracle",
            oracle_json(cutoff, o.conclusive, o.reachable.len(), agrees),
        );
    }
    Ok(Outcome::new(report))
}

fn oracle_json(cutoff: usize, conclusive: bool, states: usize, agrees: Option<bool>) -> Value {
    json!({ "cutoff": cutoff, "conclusive": conclusive, "states": states, "agrees": agrees })
}

fn pumping_json<M: TransitionSystem>(m: &M, w: &PumpingWitness<M::Payload>) -> Value {
    json!({
        "prefix": names(m, &w.prefix),
        "cycle": names(m, &w.cycle),
        "ancestor": m.format_config(&w.ancestor),
        "descendant": m.format_config(&w.descendant),
        "strict": w.strict,
    })
}

fn run_termination(m: &VassModel, name: &str, opts: &Options) -> Result<Outcome, CliError> {
    let r = termination(m, m.initial(), &opts.budgets)?;
    let verdict = if r.terminates {
        "terminates"
    } else {
        "does-not-terminate"
    };
    let mut report = Report::new("termination", name, verdict, "dickson");
    report.stats = Stats {
        iterations: 0,
        basis_size: 0,
        nodes: r.tree.nodes.len(),
    };
    if let Some(w) = &r.witness {
        report.witness = Some(
            names(m, &w.prefix)
                .into_iter()
                .chain(names(m, &w.cycle))
                .collect(),
        );
        report = report.extra("pumping", pumping_json(m, w));
    }
    Ok(Outcome {
        dot: Some(rrt_to_dot(m, &r.tree)),
        ..Outcome::new(report)
    })
}

fn run_boundedness(m: &VassModel, name: &str, opts: &Options) -> Result<Outcome, CliError> {
    let r = boundedness(m, m.initial(), &opts.budgets)?;
    let verdict = if r.bounded { "bounded" } else { "unbounded" };
    let mut report = Report::new("boundedness", name, verdict, "dickson");
    report.stats = Stats {
        iterations: 0,
        basis_size: 0,
        nodes: r.tree.nodes.len(),
    };
    if let Some(w) = &r.witness {
        report.witness = Some(
            names(m, &w.prefix)
                .into_iter()
                .chain(names(m, &w.cycle))
                .collect(),
        );
        report = report.extra("pumping", pumping_json(m, w));
    }
    if let Some(cutoff) = opts.oracle_cutoff {
        let o = bounded_forward_oracle(m, m.initial(), cutoff, opts.budgets.max_states)?;
        // A conclusive exploration enumerates a finite reachability set.
        let agrees = o.conclusive.then_some(r.bounded);
        report = report.extra(
            "oracle",
            oracle_json(cutoff, o.conclusive, o.reachable.len(), agrees),
        );
    }
    Ok(Outcome {
        dot: Some(rrt_to_dot(m, &r.tree)),
        ..Outcome::new(report)
    })
}

fn run_karp_miller(m: &VassModel, name: &str, opts: &Options) -> Result<Outcome, CliError> {
    let tree = karp_miller(m, m.initial(), &opts.budgets)?;
    let verdict = if tree.is_bounded() {
        "bounded"
    } else {
        "unbounded"
    };
    let mut report = Report::new("karp-miller", name, verdict, "dickson");
    report.clover = Some(
        tree.clover
            .iter()
            .map(|c| format!("{} {}", m.states()[c.control], c.payload))
            .collect(),
    );
    report.stats = Stats {
        iterations: 0,
        basis_size: tree.clover.len(),
        nodes: tree.nodes.len(),
    };
    if let Some(cutoff) = opts.oracle_cutoff {
        let o = bounded_forward_oracle(m, m.initial(), cutoff, opts.budgets.max_states)?;
        let covered = o.reachable.iter().all(|c| tree.covers(c));
        report = report.extra(
            "oracle",
            oracle_json(cutoff, o.conclusive, o.reachable.len(), Some(covered)),
        );
    }
    Ok(Outcome {
        dot: Some(km_to_dot(m, &tree)),
        ..Outcome::new(report)
    })
}

fn monotonicity_report(name: &str, ordering: &str, v: &MonotonicityVerdict) -> Report {
    let verdict = if v.holds { "monotone" } else { "not-monotone" };
    let mut report = Report::new("check-monotonicity", name, verdict, ordering)
        .extra("kind", json!(v.kind.as_str()));
    report.stats.iterations = v.cases;
    report.counterexample = v.counterexample.as_ref().map(|c| CounterexampleReport {
        transition: c.transition.clone(),
        label: c.label.clone(),
        strict: c.strict,
        x: c.x.0.clone(),
        x_prime: c.x_prime.0.clone(),
        y: c.y.0.clone(),
    });
    report
}

fn run_find_ordering(
    pcm: &PcmModel,
    name: &str,
    budget: usize,
    k: MonotonicityKind,
) -> Result<Outcome, CliError> {
    let out = find_structuring_ordering(pcm, k, budget)?;
    let s = out.stats;
    let search = json!({
        "budget": budget,
        "candidates": s.enumeration.candidates,
        "quasi_orderings": s.enumeration.quasi_orderings,
        "rejected_axioms": s.enumeration.rejected_axioms,
        "certified_well": s.certified_well,
        "suspected_ill": s.suspected_ill,
        "monotonicity_checks": s.monotonicity_checks,
        "inconclusive": s.inconclusive + s.enumeration.inconclusive,
        "rank": s.enumeration.rank,
    });
    let stats = Stats {
        iterations: s.enumeration.candidates,
        basis_size: 0,
        nodes: s.monotonicity_checks,
    };
    let (verdict, ordering, code) = match &out.found {
        Some((psi, _)) => ("found", psi.to_string(), 0),
        None => ("budget-exhausted", "none".to_string(), 4),
    };
    let mut report = Report::new("find-ordering", name, verdict, &ordering)
        .extra("kind", json!(k.as_str()))
        .extra("search", search);
    report.stats = stats;
    Ok(Outcome {
        exit_code: code,
        ..Outcome::new(report)
    })
}

fn run_abstract(
    model: &Model,
    name: &str,
    mode: Option<AbstractMode>,
) -> Result<Outcome, CliError> {
    let a = Analysis::Abstract(mode);
    let (result, info) = match (model, mode) {
        (Model::Counter(m), None | Some(AbstractMode::Reset)) => {
            let (v, r) = zero_tests_to_resets(m);
            (Model::Vass(v), r)
        }
        (Model::Counter(m), Some(AbstractMode::DropZero)) => {
            let (v, r) = drop_zero_tests(m);
            (Model::Vass(v), r)
        }
        // Without zero tests both counter transforms are the identity.
        (Model::Vass(m), None | Some(AbstractMode::Reset | AbstractMode::DropZero)) => {
            let mapping = m
                .transitions()
                .iter()
                .map(|t| (t.name.clone(), t.name.clone()))
                .collect();
            let transform = match mode {
                Some(AbstractMode::DropZero) => "drop-zero",
                _ => "reset",
            };
            let notes = vec!["0 zero test(s); model unchanged".to_string()];
            (
                model.clone(),
                AbstractionReport {
                    source: String::new(),
                    transform: transform.into(),
                    mapping,
                    notes,
                },
            )
        }
        (Model::Lcs(l), None | Some(AbstractMode::Lossy)) => {
            let mapping = l
                .transitions()
                .iter()
                .map(|t| (t.name.clone(), t.name.clone()))
                .collect();
            let notes = vec!["channels may lose messages before every step".to_string()];
            let r = AbstractionReport {
                source: String::new(),
                transform: "lossy".into(),
                mapping,
                notes,
            };
            (Model::Lcs(lossy_abstraction(l)), r)
        }
        (Model::Pcm(_), _) => return Err(unsupported(&a, model, "")),
        (_, Some(m)) => {
            return Err(CliError::Unsupported(format!(
                "abstraction mode {} does not apply to {} models",
                clap::ValueEnum::to_possible_value(&m)
                    .map(|v| v.get_name().to_string())
                    .unwrap_or_default(),
                model.class()
            )))
        }
    };
    let text = emit_model(&result);
    let mut report = Report::new("abstract", name, "abstracted", default_ordering(&result))
        .extra("class", json!(result.class()))
        .extra("mapping", json!(info.mapping))
        .extra("model_text", json!(text))
        .extra("notes", json!(info.notes))
        .extra("transform", json!(info.transform));
    report.stats.nodes = info.mapping.len();
    Ok(Outcome {
        model_text: Some(text),
        ..Outcome::new(report)
    })
}

/// Decides a closed Presburger sentence given as text.
pub fn run_decide(name: &str, text: &str) -> Result<Outcome, CliError> {
    let f = parse_formula(&crate::strip_comments(text)).map_err(|e| match e {
        PresburgerError::Parse {
            line,
            column,
            message,
        } => CliError::Parse {
            path: name.into(),
            source: crate::dsl::Diagnostic {
                kind: crate::dsl::DiagnosticKind::Syntax,
                line,
                column,
                message,
            },
        },
        other => other.into(),
    })?;
    let holds = decide_sentence(&f)?;
    let mut report = Report::new("decide", name, if holds { "true" } else { "false" }, "none");
    report.stats = Stats {
        iterations: quantifiers(&f),
        basis_size: 0,
        nodes: f.size(),
    };
    Ok(Outcome::new(report))
}

fn quantifiers(f: &Formula) -> usize {
    match f {
        Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + quantifiers(g),
        Formula::Not(g) => quantifiers(g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().map(quantifiers).sum(),
        _ => 0,
    }
}
