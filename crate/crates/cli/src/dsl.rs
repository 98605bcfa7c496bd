//! The line-oriented model language.
//!
//! A file declares one model. The first statement names its class, the
//! remaining statements may appear in any order, and `#` starts a comment:
//!
//! ```text
//! model vass
//! counters 2
//! states q0 q1
//! init q0 (0,0)
//! trans t1: q0 -> q0 label a guard (0,0) delta (+1,0)
//! trans t2: q0 -> q1 label b guard (1,0) delta (-1,+1)
//! trans t3: q1 -> q1 label c delta (0,0) reset (1)
//! ```
//!
//! Counter indices are 1-based. [`emit_model`] prints a model back in this
//! language; parsing its output yields an equal model.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;
use wsts_core::models::{
    ChannelAction, CounterMachine, Effect, Instruction, LcsTransition, LossyChannelMachine,
    ModelError, PcmModel, PcmTransition, Semantics, TransitionSystem, VassModel, VassTransition,
};
use wsts_core::wqo::{Channels, Config, Vector, Word};
use wsts_presburger::{parse_formula, Formula, PresburgerError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Vass(VassModel),
    Counter(CounterMachine),
    Lcs(LossyChannelMachine),
    Pcm(PcmModel),
}

impl Model {
    pub fn class(&self) -> &'static str {
        match self {
            Model::Vass(_) => "vass",
            Model::Counter(_) => "counter",
            Model::Lcs(_) => "lcs",
            Model::Pcm(_) => "pcm",
        }
    }

    pub fn states(&self) -> &[String] {
        match self {
            Model::Vass(m) => m.states(),
            Model::Counter(m) => m.states(),
            Model::Lcs(m) => m.states(),
            Model::Pcm(m) => m.states(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Semantic,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::Semantic => "semantic",
        })
    }
}

/// A located parse failure. Lines and columns are 1-based; columns count characters.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind} error: {message}")]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    fn syntax(loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic {
            kind: DiagnosticKind::Syntax,
            line: loc.line,
            column: loc.column,
            message: message.into(),
        }
    }

    fn semantic(loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic {
            kind: DiagnosticKind::Semantic,
            line: loc.line,
            column: loc.column,
            message: message.into(),
        }
    }
}

type Result<T> = std::result::Result<T, Diagnostic>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Loc {
    line: usize,
    column: usize,
}

#[derive(Clone, Debug)]
struct Sp<T> {
    value: T,
    loc: Loc,
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        Cursor { line, text, pos: 0 }
    }

    fn loc(&self) -> Loc {
        Loc {
            line: self.line,
            column: self.text[..self.pos].chars().count() + 1,
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn unexpected(&mut self, wanted: &str) -> Diagnostic {
        let loc = {
            self.skip_ws();
            self.loc()
        };
        let found = match self.text[self.pos..].split_whitespace().next() {
            Some(tok) => format!("`{tok}`"),
            None => "end of line".to_string(),
        };
        Diagnostic::syntax(loc, format!("expected {wanted}, found {found}"))
    }

    fn try_ident(&mut self) -> Option<Sp<String>> {
        self.skip_ws();
        let loc = self.loc();
        let rest = &self.text[self.pos..];
        if !rest.chars().next().is_some_and(is_ident_start) {
            return None;
        }
        let len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
        self.pos += len;
        Some(Sp {
            value: rest[..len].to_string(),
            loc,
        })
    }

    fn ident(&mut self, what: &str) -> Result<Sp<String>> {
        match self.try_ident() {
            Some(id) => Ok(id),
            None => Err(self.unexpected(what)),
        }
    }

    /// Consumes `word` only if it is a whole identifier.
    fn keyword(&mut self, word: &str) -> bool {
        let save = self.pos;
        match self.try_ident() {
            Some(id) if id.value == word => true,
            _ => {
                self.pos = save;
                false
            }
        }
    }

    fn idents_to_end(&mut self, what: &str) -> Result<Vec<Sp<String>>> {
        let mut out = Vec::new();
        while !self.at_end() {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    /// An integer with an optional sign; `signed` false rejects a minus sign.
    fn int(&mut self, what: &str, signed: bool) -> Result<Sp<i64>> {
        self.skip_ws();
        let loc = self.loc();
        let rest = &self.text[self.pos..];
        let (negative, digits_at) = match rest.chars().next() {
            Some('-') => (true, 1),
            Some('+') => (false, 1),
            _ => (false, 0),
        };
        let digits = &rest[digits_at..];
        let len = digits
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(digits.len());
        if len == 0 {
            return Err(self.unexpected(what));
        }
        if negative && !signed {
            return Err(Diagnostic::syntax(
                loc,
                format!("{what} must not be negative"),
            ));
        }
        let magnitude: i64 = digits[..len]
            .parse()
            .map_err(|_| Diagnostic::syntax(loc, format!("{what} is too large")))?;
        self.pos += digits_at + len;
        Ok(Sp {
            value: if negative { -magnitude } else { magnitude },
            loc,
        })
    }

    fn nat(&mut self, what: &str) -> Result<Sp<u64>> {
        let n = self.int(what, false)?;
        Ok(Sp {
            value: n.value as u64,
            loc: n.loc,
        })
    }

    fn tuple<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Sp<Vec<T>>> {
        self.skip_ws();
        let loc = self.loc();
        self.expect("(")?;
        let mut out = Vec::new();
        if !self.eat(")") {
            loop {
                out.push(item(self)?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(Sp { value: out, loc })
    }

    /// A bracketed, whitespace-separated word such as `[a b a]`.
    fn word(&mut self) -> Result<Sp<Vec<Sp<String>>>> {
        self.skip_ws();
        let loc = self.loc();
        self.expect("[")?;
        let mut letters = Vec::new();
        while !self.eat("]") {
            letters.push(self.ident("a letter or `]`")?);
        }
        Ok(Sp {
            value: letters,
            loc,
        })
    }

    fn words_to_end(&mut self) -> Result<Vec<Sp<Vec<Sp<String>>>>> {
        let mut out = Vec::new();
        while !self.at_end() {
            out.push(self.word()?);
        }
        Ok(out)
    }

    fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    fn rest(&mut self) -> Sp<&'a str> {
        self.skip_ws();
        let loc = self.loc();
        let text = &self.text[self.pos..];
        self.pos = self.text.len();
        Sp {
            value: text.trim_end(),
            loc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Vass,
    Counter,
    Lcs,
    Pcm,
}

impl Class {
    fn name(self) -> &'static str {
        match self {
            Class::Vass => "vass",
            Class::Counter => "counter",
            Class::Lcs => "lcs",
            Class::Pcm => "pcm",
        }
    }

    fn has_counters(self) -> bool {
        self != Class::Lcs
    }
}

enum InitPayload {
    Vector(Sp<Vec<i64>>),
    Words(Vec<Sp<Vec<Sp<String>>>>),
}

enum Body {
    Vass {
        label: Option<String>,
        guard: Option<Sp<Vec<u64>>>,
        delta: Option<Sp<Vec<i64>>>,
        reset: Option<Sp<Vec<Sp<u64>>>>,
    },
    Inst(Sp<Op>, Sp<u64>),
    Lcs(LcsAct),
    Pcm {
        label: Option<String>,
        step: Formula,
    },
}

#[derive(Clone, Copy)]
enum Op {
    Inc,
    Dec,
    Zero,
}

enum LcsAct {
    Send(Sp<String>, Sp<String>),
    Recv(Sp<String>, Sp<String>),
    Internal,
}

struct Edge {
    name: Sp<String>,
    source: Sp<String>,
    target: Sp<String>,
    body: Body,
}

struct Draft {
    class: Class,
    class_loc: Loc,
    counters: Option<Sp<usize>>,
    states: Vec<Sp<String>>,
    init: Option<(Sp<String>, Option<InitPayload>)>,
    channels: Vec<Sp<String>>,
    shared_alphabet: Option<Vec<Sp<String>>>,
    alphabets: Vec<(Sp<String>, Vec<Sp<String>>)>,
    semantics: Option<Semantics>,
    edges: Vec<Edge>,
}

/// Parses one model. Every failure carries the line and column it refers to.
pub fn parse_model(text: &str) -> Result<Model> {
    let mut draft: Option<Draft> = None;
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(i + 1, line);
        last_line = i + 1;
        if cur.at_end() {
            continue;
        }
        let kw = cur.ident("a statement keyword")?;
        match draft.as_mut() {
            None => {
                if kw.value != "model" {
                    return Err(Diagnostic::syntax(
                        kw.loc,
                        "a model file must start with `model <class>`",
                    ));
                }
                let c = cur.ident("a model class")?;
                let class =
                    match c.value.as_str() {
                        "vass" => Class::Vass,
                        "counter" => Class::Counter,
                        "lcs" => Class::Lcs,
                        "pcm" => Class::Pcm,
                        other => return Err(Diagnostic::syntax(
                            c.loc,
                            format!(
                                "unknown model class `{other}`; expected vass, counter, lcs or pcm"
                            ),
                        )),
                    };
                cur.finish()?;
                draft = Some(Draft {
                    class,
                    class_loc: kw.loc,
                    counters: None,
                    states: Vec::new(),
                    init: None,
                    channels: Vec::new(),
                    shared_alphabet: None,
                    alphabets: Vec::new(),
                    semantics: None,
                    edges: Vec::new(),
                });
            }
            Some(d) => statement(d, kw, &mut cur)?,
        }
    }
    let Some(draft) = draft else {
        return Err(Diagnostic::syntax(
            Loc {
                line: last_line,
                column: 1,
            },
            "empty model: expected `model <class>`",
        ));
    };
    draft.resolve()
}

fn statement(d: &mut Draft, kw: Sp<String>, cur: &mut Cursor<'_>) -> Result<()> {
    let class = d.class;
    let misplaced = |kw: &Sp<String>| {
        Diagnostic::syntax(
            kw.loc,
            format!("`{}` is not allowed in a {} model", kw.value, class.name()),
        )
    };
    match kw.value.as_str() {
        "model" => {
            return Err(Diagnostic::syntax(
                kw.loc,
                "only one `model` line is allowed",
            ))
        }
        "counters" if class.has_counters() => {
            if d.counters.is_some() {
                return Err(Diagnostic::semantic(kw.loc, "`counters` declared twice"));
            }
            let n = cur.nat("a counter count")?;
            d.counters = Some(Sp {
                value: n.value as usize,
                loc: n.loc,
            });
        }
        "states" => d.states.extend(cur.idents_to_end("a state name")?),
        "init" => {
            if d.init.is_some() {
                return Err(Diagnostic::semantic(kw.loc, "`init` declared twice"));
            }
            let state = cur.ident("a state name")?;
            let payload = if cur.at_end() {
                None
            } else if class == Class::Lcs {
                Some(InitPayload::Words(cur.words_to_end()?))
            } else {
                Some(InitPayload::Vector(
                    cur.tuple(|c| c.int("a counter value", false))?.map_items(),
                ))
            };
            d.init = Some((state, payload));
        }
        "channels" if class == Class::Lcs => {
            d.channels.extend(cur.idents_to_end("a channel name")?)
        }
        "alphabet" if class == Class::Lcs => {
            let first = cur.ident("a letter or a channel name")?;
            if cur.eat(":") {
                d.alphabets.push((first, cur.idents_to_end("a letter")?));
            } else {
                if d.shared_alphabet.is_some() {
                    return Err(Diagnostic::semantic(
                        kw.loc,
                        "shared `alphabet` declared twice",
                    ));
                }
                let mut letters = vec![first];
                letters.extend(cur.idents_to_end("a letter")?);
                d.shared_alphabet = Some(letters);
            }
        }
        "semantics" if class == Class::Lcs => {
            let s = cur.ident("`lossy` or `perfect`")?;
            d.semantics = Some(match s.value.as_str() {
                "lossy" => Semantics::Lossy,
                "perfect" => Semantics::Perfect,
                _ => return Err(Diagnostic::syntax(s.loc, "expected `lossy` or `perfect`")),
            });
        }
        "trans" if class != Class::Counter => {
            let (name, source, target) = header(cur)?;
            let body = match class {
                Class::Vass => vass_body(cur)?,
                Class::Lcs => lcs_body(cur)?,
                _ => pcm_body(cur)?,
            };
            d.edges.push(Edge {
                name,
                source,
                target,
                body,
            });
        }
        "inst" if class == Class::Counter => {
            let (name, source, target) = header(cur)?;
            let op = cur.ident("`inc`, `dec` or `zero`")?;
            let kind = match op.value.as_str() {
                "inc" => Op::Inc,
                "dec" => Op::Dec,
                "zero" => Op::Zero,
                _ => {
                    return Err(Diagnostic::syntax(
                        op.loc,
                        "expected `inc`, `dec` or `zero`",
                    ))
                }
            };
            let counter = cur.nat("a counter index")?;
            d.edges.push(Edge {
                name,
                source,
                target,
                body: Body::Inst(
                    Sp {
                        value: kind,
                        loc: op.loc,
                    },
                    counter,
                ),
            });
        }
        "counters" | "channels" | "alphabet" | "semantics" | "trans" | "inst" => {
            return Err(misplaced(&kw))
        }
        other => {
            return Err(Diagnostic::syntax(
                kw.loc,
                format!("unknown statement `{other}`"),
            ))
        }
    }
    cur.finish()
}

impl Sp<Vec<Sp<i64>>> {
    fn map_items(self) -> Sp<Vec<i64>> {
        Sp {
            value: self.value.into_iter().map(|x| x.value).collect(),
            loc: self.loc,
        }
    }
}

fn header(cur: &mut Cursor<'_>) -> Result<(Sp<String>, Sp<String>, Sp<String>)> {
    let name = cur.ident("a transition id")?;
    cur.expect(":")?;
    let source = cur.ident("a source state")?;
    cur.expect("->")?;
    let target = cur.ident("a target state")?;
    Ok((name, source, target))
}

fn vass_body(cur: &mut Cursor<'_>) -> Result<Body> {
    let (mut label, mut guard, mut delta, mut reset) = (None, None, None, None);
    while let Some(kw) = cur.try_ident() {
        let twice = || Diagnostic::syntax(kw.loc, format!("`{}` given twice", kw.value));
        match kw.value.as_str() {
            "label" if label.is_none() => label = Some(cur.ident("a label")?.value),
            "guard" if guard.is_none() => {
                let g = cur.tuple(|c| c.nat("a guard entry"))?;
                guard = Some(Sp {
                    value: g.value.into_iter().map(|x| x.value).collect(),
                    loc: g.loc,
                });
            }
            "delta" if delta.is_none() => {
                delta = Some(cur.tuple(|c| c.int("a delta entry", true))?.map_items())
            }
            "reset" if reset.is_none() => reset = Some(cur.tuple(|c| c.nat("a counter index"))?),
            "label" | "guard" | "delta" | "reset" => return Err(twice()),
            other => {
                return Err(Diagnostic::syntax(
                    kw.loc,
                    format!("unknown clause `{other}`; expected label, guard, delta or reset"),
                ))
            }
        }
    }
    Ok(Body::Vass {
        label,
        guard,
        delta,
        reset,
    })
}

fn lcs_body(cur: &mut Cursor<'_>) -> Result<Body> {
    let act = cur.ident("`send`, `recv` or `internal`")?;
    Ok(Body::Lcs(match act.value.as_str() {
        "send" => LcsAct::Send(cur.ident("a channel name")?, cur.ident("a letter")?),
        "recv" => LcsAct::Recv(cur.ident("a channel name")?, cur.ident("a letter")?),
        "internal" => LcsAct::Internal,
        _ => {
            return Err(Diagnostic::syntax(
                act.loc,
                "expected `send`, `recv` or `internal`",
            ))
        }
    }))
}

fn pcm_body(cur: &mut Cursor<'_>) -> Result<Body> {
    let label = if cur.keyword("label") {
        Some(cur.ident("a label")?.value)
    } else {
        None
    };
    if !cur.keyword("when") {
        return Err(cur.unexpected("`when <formula>`"));
    }
    let src = cur.rest();
    let step = parse_formula(src.value).map_err(|e| match e {
        PresburgerError::Parse {
            column, message, ..
        } => Diagnostic::syntax(
            Loc {
                line: src.loc.line,
                column: src.loc.column + column.saturating_sub(1),
            },
            format!("in step formula: {message}"),
        ),
        other => Diagnostic::syntax(src.loc, format!("in step formula: {other}")),
    })?;
    Ok(Body::Pcm { label, step })
}

impl Draft {
    fn resolve(self) -> Result<Model> {
        let model_err = |e: ModelError| Diagnostic::semantic(self.class_loc, e.to_string());
        if self.states.is_empty() {
            return Err(Diagnostic::semantic(self.class_loc, "no states declared"));
        }
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(&s.value, i).is_some() {
                return Err(Diagnostic::semantic(
                    s.loc,
                    format!("duplicate state `{}`", s.value),
                ));
            }
        }
        let state = |s: &Sp<String>| {
            index
                .get(s.value.as_str())
                .copied()
                .ok_or_else(|| Diagnostic::semantic(s.loc, format!("unknown state `{}`", s.value)))
        };
        let mut seen = BTreeMap::new();
        for e in &self.edges {
            if seen.insert(e.name.value.as_str(), ()).is_some() {
                return Err(Diagnostic::semantic(
                    e.name.loc,
                    format!("duplicate transition id `{}`", e.name.value),
                ));
            }
        }
        let names: Vec<String> = self.states.iter().map(|s| s.value.clone()).collect();
        let init_state = match &self.init {
            Some((s, _)) => state(s)?,
            None => 0,
        };

        if self.class == Class::Lcs {
            return self.resolve_lcs(names, init_state, &state).map(Model::Lcs);
        }

        let Some(dim) = &self.counters else {
            return Err(Diagnostic::semantic(
                self.class_loc,
                "missing `counters` declaration",
            ));
        };
        let d = dim.value;
        let check_dim = |what: &str, loc: Loc, found: usize| {
            if found == d {
                Ok(())
            } else {
                Err(Diagnostic::semantic(
                    loc,
                    format!("{what} has dimension {found}, expected {d}"),
                ))
            }
        };
        let check_index = |i: &Sp<u64>| {
            if i.value >= 1 && i.value as usize <= d {
                Ok(i.value as usize - 1)
            } else {
                Err(Diagnostic::semantic(
                    i.loc,
                    format!("counter index {} out of range 1..={d}", i.value),
                ))
            }
        };
        let init = match &self.init {
            Some((_, Some(InitPayload::Vector(v)))) => {
                check_dim("initial marking", v.loc, v.value.len())?;
                Vector(v.value.iter().map(|&x| x as u64).collect())
            }
            _ => Vector::zeros(d),
        };
        let init = Config::new(init_state, init);

        match self.class {
            Class::Vass => {
                let mut ts = Vec::new();
                for e in &self.edges {
                    let Body::Vass {
                        label,
                        guard,
                        delta,
                        reset,
                    } = &e.body
                    else {
                        unreachable!()
                    };
                    let guard = match guard {
                        Some(g) => {
                            check_dim("guard", g.loc, g.value.len())?;
                            Vector(g.value.clone())
                        }
                        None => Vector::zeros(d),
                    };
                    let delta = match delta {
                        Some(v) => {
                            check_dim("delta", v.loc, v.value.len())?;
                            v.value.clone()
                        }
                        None => vec![0; d],
                    };
                    let mut resets = Vec::new();
                    if let Some(r) = reset {
                        for i in &r.value {
                            resets.push(check_index(i)?);
                        }
                    }
                    ts.push(VassTransition {
                        name: e.name.value.clone(),
                        source: state(&e.source)?,
                        target: state(&e.target)?,
                        label: label.clone().unwrap_or_else(|| e.name.value.clone()),
                        guard,
                        delta,
                        resets,
                    });
                }
                VassModel::new(d, names, init, ts)
                    .map(Model::Vass)
                    .map_err(model_err)
            }
            Class::Counter => {
                let mut ins = Vec::new();
                for e in &self.edges {
                    let Body::Inst(op, counter) = &e.body else {
                        unreachable!()
                    };
                    let i = check_index(counter)?;
                    ins.push(Instruction {
                        name: e.name.value.clone(),
                        source: state(&e.source)?,
                        target: state(&e.target)?,
                        effect: match op.value {
                            Op::Inc => Effect::Inc(i),
                            Op::Dec => Effect::Dec(i),
                            Op::Zero => Effect::ZeroTest(i),
                        },
                    });
                }
                CounterMachine::new(d, names, init, ins)
                    .map(Model::Counter)
                    .map_err(model_err)
            }
            _ => {
                let mut ts = Vec::new();
                for e in &self.edges {
                    let Body::Pcm { label, step } = &e.body else {
                        unreachable!()
                    };
                    ts.push(PcmTransition {
                        name: e.name.value.clone(),
                        source: state(&e.source)?,
                        target: state(&e.target)?,
                        label: label.clone().unwrap_or_else(|| e.name.value.clone()),
                        step: step.clone(),
                    });
                }
                PcmModel::new(d, names, init, ts)
                    .map(Model::Pcm)
                    .map_err(|err| {
                        let loc = match &err {
                            ModelError::ForeignVariable { transition, .. } => self
                                .edges
                                .iter()
                                .find(|e| &e.name.value == transition)
                                .map(|e| e.name.loc),
                            _ => None,
                        };
                        Diagnostic::semantic(loc.unwrap_or(self.class_loc), err.to_string())
                    })
            }
        }
    }

    fn resolve_lcs(
        &self,
        names: Vec<String>,
        init_state: usize,
        state: &dyn Fn(&Sp<String>) -> Result<usize>,
    ) -> Result<LossyChannelMachine> {
        let mut channel_index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, c) in self.channels.iter().enumerate() {
            if channel_index.insert(&c.value, i).is_some() {
                return Err(Diagnostic::semantic(
                    c.loc,
                    format!("duplicate channel `{}`", c.value),
                ));
            }
        }
        let channel = |c: &Sp<String>| {
            channel_index.get(c.value.as_str()).copied().ok_or_else(|| {
                Diagnostic::semantic(c.loc, format!("unknown channel `{}`", c.value))
            })
        };
        let mut alphabets: Vec<Option<Vec<String>>> = vec![None; self.channels.len()];
        for (c, letters) in &self.alphabets {
            let i = channel(c)?;
            if alphabets[i].is_some() {
                return Err(Diagnostic::semantic(
                    c.loc,
                    format!("alphabet of `{}` declared twice", c.value),
                ));
            }
            alphabets[i] = Some(letters.iter().map(|l| l.value.clone()).collect());
        }
        let mut resolved = Vec::new();
        for (i, a) in alphabets.into_iter().enumerate() {
            let a = a.or_else(|| {
                self.shared_alphabet
                    .as_ref()
                    .map(|s| s.iter().map(|l| l.value.clone()).collect())
            });
            match a {
                Some(a) => resolved.push(a),
                None => {
                    return Err(Diagnostic::semantic(
                        self.channels[i].loc,
                        format!("channel `{}` has no alphabet", self.channels[i].value),
                    ))
                }
            }
        }
        for (letters, c) in resolved.iter().zip(&self.channels) {
            let mut seen = std::collections::BTreeSet::new();
            if let Some(dup) = letters.iter().find(|l| !seen.insert(l.as_str())) {
                return Err(Diagnostic::semantic(
                    c.loc,
                    format!("letter `{dup}` repeated in the alphabet of `{}`", c.value),
                ));
            }
        }
        let letter = |ch: usize, l: &Sp<String>| {
            resolved[ch]
                .iter()
                .position(|a| *a == l.value)
                .map(|i| i as u32)
                .ok_or_else(|| {
                    Diagnostic::semantic(
                        l.loc,
                        format!(
                            "letter `{}` is not in the alphabet of channel `{}`",
                            l.value, self.channels[ch].value
                        ),
                    )
                })
        };
        let payload = match &self.init {
            Some((s, Some(InitPayload::Words(ws)))) => {
                words(ws, s.loc, self.channels.len(), &letter)?
            }
            _ => Channels(vec![Word::default(); self.channels.len()]),
        };
        let mut ts = Vec::new();
        for e in &self.edges {
            let Body::Lcs(act) = &e.body else {
                unreachable!()
            };
            let action = match act {
                LcsAct::Send(c, l) => {
                    let ch = channel(c)?;
                    ChannelAction::Send {
                        channel: ch,
                        letter: letter(ch, l)?,
                    }
                }
                LcsAct::Recv(c, l) => {
                    let ch = channel(c)?;
                    ChannelAction::Recv {
                        channel: ch,
                        letter: letter(ch, l)?,
                    }
                }
                LcsAct::Internal => ChannelAction::Internal,
            };
            ts.push(LcsTransition {
                name: e.name.value.clone(),
                source: state(&e.source)?,
                target: state(&e.target)?,
                action,
            });
        }
        LossyChannelMachine::new(
            self.channels.iter().map(|c| c.value.clone()).collect(),
            resolved,
            names,
            Config::new(init_state, payload),
            ts,
            self.semantics.unwrap_or(Semantics::Lossy),
        )
        .map_err(|e| Diagnostic::semantic(self.class_loc, e.to_string()))
    }
}

fn words(
    ws: &[Sp<Vec<Sp<String>>>],
    at: Loc,
    channels: usize,
    letter: &dyn Fn(usize, &Sp<String>) -> Result<u32>,
) -> Result<Channels> {
    if ws.len() != channels {
        let loc = ws.first().map_or(at, |w| w.loc);
        return Err(Diagnostic::semantic(
            loc,
            format!("expected {channels} channel contents, found {}", ws.len()),
        ));
    }
    let mut out = Vec::new();
    for (ch, w) in ws.iter().enumerate() {
        out.push(Word(
            w.value
                .iter()
                .map(|l| letter(ch, l))
                .collect::<Result<_>>()?,
        ));
    }
    Ok(Channels(out))
}

/// A configuration given on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Counters(Config<Vector>),
    Channels(Config<Channels>),
}

/// Parses `q1 (0,1)` for counter models or `q1 [a b] []` for channel
/// machines. Omitted payloads mean zero counters or empty channels.
pub fn parse_target(model: &Model, text: &str) -> Result<Target> {
    let mut cur = Cursor::new(1, text);
    let s = cur.ident("a state name")?;
    let q = model
        .states()
        .iter()
        .position(|n| *n == s.value)
        .ok_or_else(|| Diagnostic::semantic(s.loc, format!("unknown state `{}`", s.value)))?;
    let target = match model {
        Model::Lcs(m) => {
            let ws = cur.words_to_end()?;
            let letter = |ch: usize, l: &Sp<String>| {
                m.letter_id(ch, &l.value).ok_or_else(|| {
                    Diagnostic::semantic(
                        l.loc,
                        format!(
                            "letter `{}` is not in the alphabet of channel `{}`",
                            l.value,
                            m.channels()[ch]
                        ),
                    )
                })
            };
            let payload = if ws.is_empty() {
                Channels(vec![Word::default(); m.channels().len()])
            } else {
                words(&ws, s.loc, m.channels().len(), &letter)?
            };
            Target::Channels(Config::new(q, payload))
        }
        _ => {
            let d = match model {
                Model::Vass(m) => m.dimension(),
                Model::Counter(m) => m.dimension(),
                Model::Pcm(m) => m.dimension(),
                Model::Lcs(_) => unreachable!(),
            };
            let v = if cur.at_end() {
                Vector::zeros(d)
            } else {
                let t = cur.tuple(|c| c.nat("a counter value"))?;
                if t.value.len() != d {
                    return Err(Diagnostic::semantic(
                        t.loc,
                        format!("target has dimension {}, expected {d}", t.value.len()),
                    ));
                }
                Vector(t.value.into_iter().map(|x| x.value).collect())
            };
            Target::Counters(Config::new(q, v))
        }
    };
    cur.finish()?;
    Ok(target)
}

fn delta_entry(x: i64) -> String {
    if x > 0 {
        format!("+{x}")
    } else {
        x.to_string()
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

/// Prints `m` in canonical form: every clause explicit, one statement per line.
pub fn emit_model(m: &Model) -> String {
    let mut out = String::new();
    let st = m.states();
    writeln!(out, "model {}", m.class()).unwrap();
    match m {
        Model::Vass(v) => {
            writeln!(out, "counters {}", v.dimension()).unwrap();
            writeln!(out, "states {}", st.join(" ")).unwrap();
            let init = v.initial();
            writeln!(out, "init {} {}", st[init.control], init.payload).unwrap();
            for t in v.transitions() {
                write!(
                    out,
                    "trans {}: {} -> {} label {} guard {} delta ({})",
                    t.name,
                    st[t.source],
                    st[t.target],
                    t.label,
                    t.guard,
                    join(t.delta.iter().map(|&x| delta_entry(x)), ",")
                )
                .unwrap();
                if !t.resets.is_empty() {
                    write!(
                        out,
                        " reset ({})",
                        join(t.resets.iter().map(|i| i + 1), ",")
                    )
                    .unwrap();
                }
                out.push('\n');
            }
        }
        Model::Counter(c) => {
            writeln!(out, "counters {}", c.dimension()).unwrap();
            writeln!(out, "states {}", st.join(" ")).unwrap();
            let init = c.initial();
            writeln!(out, "init {} {}", st[init.control], init.payload).unwrap();
            for i in c.instructions() {
                let (op, k) = match i.effect {
                    Effect::Inc(k) => ("inc", k),
                    Effect::Dec(k) => ("dec", k),
                    Effect::ZeroTest(k) => ("zero", k),
                };
                writeln!(
                    out,
                    "inst {}: {} -> {} {op} {}",
                    i.name,
                    st[i.source],
                    st[i.target],
                    k + 1
                )
                .unwrap();
            }
        }
        Model::Lcs(l) => {
            if !l.channels().is_empty() {
                writeln!(out, "channels {}", l.channels().join(" ")).unwrap();
            }
            for (c, a) in l.channels().iter().zip(l.alphabets()) {
                writeln!(out, "alphabet {c}: {}", a.join(" ")).unwrap();
            }
            let sem = match l.semantics() {
                Semantics::Lossy => "lossy",
                Semantics::Perfect => "perfect",
            };
            writeln!(out, "semantics {sem}").unwrap();
            writeln!(out, "states {}", st.join(" ")).unwrap();
            writeln!(out, "init {}", l.format_config(l.initial()).trim_end()).unwrap();
            for t in l.transitions() {
                let act = match t.action {
                    ChannelAction::Send { channel, letter } => {
                        format!(
                            "send {} {}",
                            l.channels()[channel],
                            l.alphabets()[channel][letter as usize]
                        )
                    }
                    ChannelAction::Recv { channel, letter } => {
                        format!(
                            "recv {} {}",
                            l.channels()[channel],
                            l.alphabets()[channel][letter as usize]
                        )
                    }
                    ChannelAction::Internal => "internal".into(),
                };
                writeln!(
                    out,
                    "trans {}: {} -> {} {act}",
                    t.name, st[t.source], st[t.target]
                )
                .unwrap();
            }
        }
        Model::Pcm(p) => {
            writeln!(out, "counters {}", p.dimension()).unwrap();
            writeln!(out, "states {}", st.join(" ")).unwrap();
            let init = p.initial();
            writeln!(out, "init {} {}", st[init.control], init.payload).unwrap();
            for t in p.transitions() {
                writeln!(
                    out,
                    "trans {}: {} -> {} label {} when {}",
                    t.name, st[t.source], st[t.target], t.label, t.step
                )
                .unwrap();
            }
        }
    }
    out
}
