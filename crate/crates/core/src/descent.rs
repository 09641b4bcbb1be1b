//! Interval-valued cohomology of line bundles on Bott-Samelson towers,
//! derived from descent and vanishing rules, and the uniqueness certifier
//! built on top of it.
//!
//! A node is a triple `(word, L, i)` standing for `h^i(Z_word, f^* L)`.
//! Rules are tried in a fixed order; exact rules end the search at a node,
//! bounding rules only run when no exact rule applies. Every result is
//! intersected with the cocycle lower bound when that applies.

pub mod scan;

use std::collections::HashMap;
use std::fmt;

use dashmap::DashMap;
use serde::Serialize;
use thiserror::Error;

use crate::charcalc::{demazure_terms, CharError, GroupAlgebraElement};
use crate::dynkin::CartanData;
use crate::lattice::DivisorClass;
use crate::weyl::{check_indices, generate_roots, RootSystem, WeylError};

pub const DEFAULT_BUDGET: usize = 1_000_000;
/// The shared memo is cleared once it grows past this many entries.
pub const MEMO_CAP: usize = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescentError {
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("degree vector has length {len}, expected {rank}")]
    WrongLength { len: usize, rank: usize },
    #[error("payload coefficient {coef} is negative")]
    NegativeCoefficient { coef: i64 },
    #[error("rules disagree at word {word:?}, degrees {degrees:?}, h^{degree}: {a} vs {b}")]
    InconsistentDerivation {
        word: Vec<usize>,
        degrees: Vec<i64>,
        degree: i64,
        a: Interval,
        b: Interval,
    },
    #[error("word {word:?} is not reduced")]
    NotReduced { word: Vec<usize> },
    #[error("the word is empty")]
    EmptyWord,
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("Weyl group error: {0}")]
    Weyl(WeylError),
}

impl From<WeylError> for DescentError {
    fn from(e: WeylError) -> Self {
        match e {
            WeylError::IndexOutOfRange { index, rank } => DescentError::IndexOutOfRange { index, rank },
            other => DescentError::Weyl(other),
        }
    }
}

/// `[lo, hi]` with `hi = None` meaning unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl Interval {
    pub const UNKNOWN: Interval = Interval { lo: 0, hi: None };

    pub const fn exact(n: u64) -> Interval {
        Interval { lo: n, hi: Some(n) }
    }

    pub const fn at_most(n: u64) -> Interval {
        Interval { lo: 0, hi: Some(n) }
    }

    pub const fn at_least(n: u64) -> Interval {
        Interval { lo: n, hi: None }
    }

    pub fn is_exact(&self) -> Option<u64> {
        match self.hi {
            Some(h) if h == self.lo => Some(h),
            _ => None,
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.lo && self.hi.is_none_or(|h| n <= h)
    }

    pub fn meet(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        match hi {
            Some(h) if h < lo => None,
            _ => Some(Interval { lo, hi }),
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.saturating_add(other.lo),
            hi: match (self.hi, other.hi) {
                (Some(a), Some(b)) => a.checked_add(b),
                _ => None,
            },
        }
    }

    pub fn scale(&self, k: u64) -> Interval {
        Interval {
            lo: self.lo.saturating_mul(k),
            hi: if k == 0 { Some(0) } else { self.hi.and_then(|h| h.checked_mul(k)) },
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "[{}, {}]", self.lo, h),
            None => write!(f, "[{}, inf)", self.lo),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CohomologyValue {
    Exact(u64),
    Range(u64, u64),
    AtLeast(u64),
    Unknown,
}

impl From<Interval> for CohomologyValue {
    fn from(v: Interval) -> Self {
        match v.hi {
            Some(h) if h == v.lo => CohomologyValue::Exact(h),
            Some(h) => CohomologyValue::Range(v.lo, h),
            None if v.lo > 0 => CohomologyValue::AtLeast(v.lo),
            None => CohomologyValue::Unknown,
        }
    }
}

impl From<CohomologyValue> for Interval {
    fn from(v: CohomologyValue) -> Self {
        match v {
            CohomologyValue::Exact(n) => Interval::exact(n),
            CohomologyValue::Range(a, b) => Interval { lo: a, hi: Some(b) },
            CohomologyValue::AtLeast(a) => Interval::at_least(a),
            CohomologyValue::Unknown => Interval::UNKNOWN,
        }
    }
}

impl fmt::Display for CohomologyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CohomologyValue::Exact(n) => write!(f, "{n}"),
            CohomologyValue::Range(a, b) => write!(f, "[{a}, {b}]"),
            CohomologyValue::AtLeast(a) => write!(f, ">= {a}"),
            CohomologyValue::Unknown => f.write_str("unknown"),
        }
    }
}

/// `h^degree(Z_word, payload)` for a formal sum with nonnegative coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    pub word: Vec<usize>,
    pub payload: GroupAlgebraElement,
    pub degree: usize,
}

impl Query {
    pub fn line_bundle(word: Vec<usize>, l: DivisorClass, degree: usize) -> Query {
        Query {
            word,
            payload: GroupAlgebraElement::monomial(l),
            degree,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Node evaluations allowed per top-level query.
    pub budget: usize,
    /// Vanishing for `f^*L` when `f^*L + Z_{l(r)}` is nef.
    pub enable_j3: bool,
    /// Evaluate bounding rules even when an exact rule applied, and check
    /// that all results intersect.
    pub cross_check: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            budget: DEFAULT_BUDGET,
            enable_j3: false,
            cross_check: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Dimension,
    Point,
    Curve,
    Kkv2,
    J3,
    Skip,
    Dr1,
    Dr2,
    Dr3,
    Dr4,
    Dr5,
    Filtration,
    FiltrationH0,
    Zeta,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: Rule,
    pub children: Vec<usize>,
    pub value: Interval,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    pub word: Vec<usize>,
    pub degrees: Vec<i64>,
    pub degree: i64,
    pub steps: Vec<TraceStep>,
    pub value: Interval,
}

/// Derivation DAG in evaluation order: children always precede parents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DerivationTrace {
    pub nodes: Vec<TraceNode>,
    /// Root node of each payload term, with its coefficient.
    pub roots: Vec<(usize, i64)>,
    /// Nodes whose last letter has an earlier occurrence and whose class is
    /// `K` of that letter: the extension cocycle there is known nonzero.
    pub nonzero_cocycles: Vec<usize>,
}

impl DerivationTrace {
    /// Recomputes every node from its recorded rule applications and checks
    /// it against the recorded value. Returns the payload value.
    pub fn replay(&self, c: &CartanData) -> Result<Interval, String> {
        let mut values: Vec<Interval> = Vec::with_capacity(self.nodes.len());
        for (k, node) in self.nodes.iter().enumerate() {
            let mut acc = Interval::UNKNOWN;
            for step in &node.steps {
                let v = replay_step(c, node, step, &values)?;
                if v != step.value {
                    return Err(format!("node {k}: rule {:?} replays to {v}, recorded {}", step.rule, step.value));
                }
                acc = acc
                    .meet(&v)
                    .ok_or_else(|| format!("node {k}: empty intersection on replay"))?;
            }
            if acc != node.value {
                return Err(format!("node {k}: replays to {acc}, recorded {}", node.value));
            }
            values.push(acc);
        }
        let mut total = Interval::exact(0);
        for &(root, coef) in &self.roots {
            total = total.add(&values[root].scale(coef as u64));
        }
        Ok(total)
    }
}

fn replay_step(c: &CartanData, node: &TraceNode, step: &TraceStep, values: &[Interval]) -> Result<Interval, String> {
    let child = |k: usize| -> Result<Interval, String> {
        let &idx = step.children.get(k).ok_or("missing child")?;
        values.get(idx).copied().ok_or_else(|| "child after parent".to_string())
    };
    let i = node.degree;
    Ok(match step.rule {
        Rule::Dimension | Rule::Dr2 | Rule::J3 | Rule::FiltrationH0 => Interval::exact(0),
        Rule::Point => Interval::exact(u64::from(i == 0)),
        Rule::Curve => {
            let s = node.degrees[node.word[0]];
            Interval::exact(curve_value(s, i))
        }
        Rule::Kkv2 => {
            if i > 0 {
                Interval::exact(0)
            } else {
                let chi = crate::charcalc::euler_char_bs(c, &node.word, &DivisorClass::new(node.degrees.clone()))
                    .map_err(|e| e.to_string())?;
                Interval::exact(u64::try_from(chi).map_err(|_| "negative Euler characteristic".to_string())?)
            }
        }
        Rule::Skip | Rule::Dr1 | Rule::Dr3 | Rule::Dr5 => child(0)?,
        Rule::Dr4 | Rule::Filtration => {
            let mut hi = Some(0u64);
            for k in 0..step.children.len() {
                hi = match (hi, child(k)?.hi) {
                    (Some(a), Some(b)) => a.checked_add(b),
                    _ => None,
                };
            }
            Interval { lo: 0, hi }
        }
        Rule::Zeta => Interval::at_least(1),
        Rule::Budget => Interval::UNKNOWN,
    })
}

fn curve_value(s: i64, i: i64) -> u64 {
    match i {
        0 if s >= 0 => (s + 1) as u64,
        1 if s <= -2 => (-s - 1) as u64,
        _ => 0,
    }
}

type ChiKey = (Box<[u8]>, Box<[i64]>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct NodeKey {
    word: Box<[u8]>,
    degrees: Box<[i64]>,
    degree: i64,
}

struct Ctx<'t> {
    used: usize,
    budget: usize,
    budget_hit: bool,
    trace: Option<&'t mut TraceBuilder>,
}

#[derive(Default)]
struct TraceBuilder {
    nodes: Vec<TraceNode>,
    index: HashMap<NodeKey, usize>,
}

/// Result of a top-level query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HValue {
    pub value: CohomologyValue,
    pub budget_exceeded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum H1Answer {
    Exact0,
    Exact1,
    Undetermined { budget_exceeded: bool },
}

impl H1Answer {
    pub fn is_determined(&self) -> bool {
        matches!(self, H1Answer::Exact0 | H1Answer::Exact1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertifyStep {
    /// 1-based position of the letter in the word.
    pub step: usize,
    pub letter: usize,
    pub answer: H1Answer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CertifyOutcome {
    Certified,
    /// First step (1-based) whose answer is undetermined.
    FailsAt { step: usize },
    /// As `FailsAt`, where the undetermined answer was caused by the budget.
    BudgetExceeded { step: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertifyReport {
    pub outcome: CertifyOutcome,
    pub steps: Vec<CertifyStep>,
}

/// Derivation engine with a shared, concurrently writable memo.
pub struct Engine {
    cartan: CartanData,
    roots: RootSystem,
    config: EngineConfig,
    memo: DashMap<NodeKey, Interval>,
    chi_memo: DashMap<ChiKey, i64>,
}

impl Engine {
    pub fn new(c: &CartanData, config: EngineConfig) -> Result<Engine, DescentError> {
        assert!(c.rank() <= u8::MAX as usize, "rank exceeds the word encoding");
        Ok(Engine {
            cartan: c.clone(),
            roots: generate_roots(c)?,
            config,
            memo: DashMap::new(),
            chi_memo: DashMap::new(),
        })
    }

    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn h_value(&self, q: &Query) -> Result<HValue, DescentError> {
        self.run(q, None)
    }

    /// As `h_value`, recording the derivation. Uses a private memo so the
    /// trace is self-contained.
    pub fn h_value_traced(&self, q: &Query) -> Result<(HValue, DerivationTrace), DescentError> {
        let fresh = Engine {
            cartan: self.cartan.clone(),
            roots: self.roots.clone(),
            config: self.config,
            memo: DashMap::new(),
            chi_memo: DashMap::new(),
        };
        let mut tb = TraceBuilder::default();
        let mut trace = DerivationTrace::default();
        let hv = fresh.run(q, Some((&mut tb, &mut trace.roots)))?;
        trace.nodes = tb.nodes;
        trace.nonzero_cocycles = trace
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.steps.iter().any(|s| s.rule == Rule::Zeta))
            .map(|(k, _)| k)
            .collect();
        Ok((hv, trace))
    }

    fn run(&self, q: &Query, mut tracing: Option<(&mut TraceBuilder, &mut Vec<(usize, i64)>)>) -> Result<HValue, DescentError> {
        let n = self.cartan.rank();
        check_indices(n, &q.word)?;
        let word: Vec<u8> = q.word.iter().map(|&l| l as u8).collect();
        let mut total = Interval::exact(0);
        let mut budget_hit = false;
        for (l, coef) in q.payload.iter() {
            if l.rank() != n {
                return Err(DescentError::WrongLength { len: l.rank(), rank: n });
            }
            if coef < 0 {
                return Err(DescentError::NegativeCoefficient { coef });
            }
            let (v, idx, hit) = match tracing.as_mut() {
                Some((tb, _)) => {
                    let mut ctx = Ctx {
                        used: 0,
                        budget: self.config.budget,
                        budget_hit: false,
                        trace: Some(&mut **tb),
                    };
                    let (v, _, idx) = self.eval(&word, &l.degrees, q.degree as i64, &mut ctx)?;
                    (v, idx, ctx.budget_hit)
                }
                None => {
                    let mut ctx = Ctx {
                        used: 0,
                        budget: self.config.budget,
                        budget_hit: false,
                        trace: None,
                    };
                    let (v, _, idx) = self.eval(&word, &l.degrees, q.degree as i64, &mut ctx)?;
                    (v, idx, ctx.budget_hit)
                }
            };
            if let Some((_, roots)) = tracing.as_mut() {
                roots.push((idx.expect("traced evaluation records its node"), coef));
            }
            budget_hit |= hit;
            total = total.add(&v.scale(coef as u64));
        }
        if self.memo.len() > MEMO_CAP {
            self.memo.clear();
        }
        Ok(HValue {
            value: total.into(),
            budget_exceeded: budget_hit,
        })
    }

    /// Euler characteristic of `f^* L` on the tower, memoized by suffix.
    pub fn chi(&self, word: &[u8], l: &[i64]) -> Result<i64, DescentError> {
        if word.is_empty() {
            return Ok(1);
        }
        let key = (Box::<[u8]>::from(word), Box::<[i64]>::from(l));
        if let Some(v) = self.chi_memo.get(&key) {
            return Ok(*v);
        }
        let r = word.len();
        let last = word[r - 1] as usize;
        let mut total: i64 = 0;
        for (m, coef) in demazure_terms(&self.cartan, last, &DivisorClass::new(l.to_vec())) {
            let x = self.chi(&word[..r - 1], &m.degrees)?;
            total = x
                .checked_mul(coef)
                .and_then(|y| total.checked_add(y))
                .ok_or(CharError::Overflow)?;
        }
        self.chi_memo.insert(key, total);
        Ok(total)
    }

    fn k_row(&self, j: usize) -> &[i64] {
        self.cartan.row(j)
    }

    /// `L + t K_j`.
    fn shift(&self, l: &[i64], j: usize, t: i64) -> Vec<i64> {
        l.iter().zip(self.k_row(j)).map(|(d, a)| d - t * a).collect()
    }

    /// Index `j` with `L = K_j`, if any.
    fn as_k(&self, l: &[i64]) -> Option<usize> {
        (0..self.cartan.rank()).find(|&j| l.iter().zip(self.k_row(j)).all(|(d, a)| *d == -a))
    }

    /// Returns the value, whether it is complete (no budget cut below it),
    /// and its trace index when tracing.
    fn eval(&self, word: &[u8], l: &[i64], i: i64, ctx: &mut Ctx) -> Result<(Interval, bool, Option<usize>), DescentError> {
        let r = word.len() as i64;
        let key = NodeKey {
            word: word.into(),
            degrees: l.into(),
            degree: i,
        };
        if let Some(tb) = ctx.trace.as_deref() {
            if let Some(&idx) = tb.index.get(&key) {
                return Ok((tb.nodes[idx].value, true, Some(idx)));
            }
        } else if let Some(v) = self.memo.get(&key) {
            return Ok((*v, true, None));
        }

        let mut steps: Vec<TraceStep> = Vec::new();
        let mut complete = true;

        if i < 0 || i > r {
            steps.push(TraceStep {
                rule: Rule::Dimension,
                children: vec![],
                value: Interval::exact(0),
            });
        } else if r == 0 {
            steps.push(TraceStep {
                rule: Rule::Point,
                children: vec![],
                value: Interval::exact(u64::from(i == 0)),
            });
        } else {
            ctx.used += 1;
            if ctx.used > ctx.budget {
                ctx.budget_hit = true;
                return Ok((Interval::UNKNOWN, false, self.record(ctx, key, vec![budget_step()])));
            }
            complete = self.apply_rules(word, l, i, ctx, &mut steps)?;
        }

        let mut value = Interval::UNKNOWN;
        for s in &steps {
            value = value.meet(&s.value).ok_or_else(|| DescentError::InconsistentDerivation {
                word: word.iter().map(|&x| x as usize).collect(),
                degrees: l.to_vec(),
                degree: i,
                a: value,
                b: s.value,
            })?;
        }
        if complete && ctx.trace.is_none() {
            self.memo.insert(key.clone(), value);
        }
        let idx = self.record_with_value(ctx, key, steps, value);
        Ok((value, complete, idx))
    }

    fn record(&self, ctx: &mut Ctx, key: NodeKey, steps: Vec<TraceStep>) -> Option<usize> {
        self.record_with_value(ctx, key, steps, Interval::UNKNOWN)
    }

    fn record_with_value(&self, ctx: &mut Ctx, key: NodeKey, steps: Vec<TraceStep>, value: Interval) -> Option<usize> {
        let tb = ctx.trace.as_deref_mut()?;
        if let Some(&idx) = tb.index.get(&key) {
            return Some(idx);
        }
        let idx = tb.nodes.len();
        tb.nodes.push(TraceNode {
            word: key.word.iter().map(|&x| x as usize).collect(),
            degrees: key.degrees.to_vec(),
            degree: key.degree,
            steps,
            value,
        });
        tb.index.insert(key, idx);
        Some(idx)
    }

    fn child(&self, word: &[u8], l: &[i64], i: i64, ctx: &mut Ctx, children: &mut Vec<usize>) -> Result<(Interval, bool), DescentError> {
        let (v, complete, idx) = self.eval(word, l, i, ctx)?;
        if let Some(idx) = idx {
            children.push(idx);
        }
        Ok((v, complete))
    }

    fn apply_rules(&self, word: &[u8], l: &[i64], i: i64, ctx: &mut Ctx, steps: &mut Vec<TraceStep>) -> Result<bool, DescentError> {
        let r = word.len();
        let last = word[r - 1] as usize;
        let prefix = &word[..r - 1];
        let s = l[last];
        let mut complete = true;
        let mut exact_found = false;

        if r == 1 {
            steps.push(TraceStep {
                rule: Rule::Curve,
                children: vec![],
                value: Interval::exact(curve_value(s, i)),
            });
            exact_found = true;
        }

        if !exact_found && word.iter().all(|&lj| l[lj as usize] >= -1) {
            let value = if i > 0 {
                Interval::exact(0)
            } else {
                let chi = self.chi(word, l)?;
                Interval::exact(u64::try_from(chi).expect("Euler characteristic of a vanishing bundle is nonnegative"))
            };
            steps.push(TraceStep {
                rule: Rule::Kkv2,
                children: vec![],
                value,
            });
            exact_found = true;
        }

        if !exact_found && self.config.enable_j3 && i > 0 && self.j3_applies(word, l) {
            steps.push(TraceStep {
                rule: Rule::J3,
                children: vec![],
                value: Interval::exact(0),
            });
            exact_found = true;
        }

        let as_k = self.as_k(l);
        if !exact_found && i == 1 {
            if let Some(j) = as_k {
                let k = word
                    .iter()
                    .rev()
                    .take_while(|&&m| matches!(-self.cartan.entry(j, m as usize), 0 | 1))
                    .count();
                // A single trailing letter is handled by the rules below.
                if k >= 2 {
                    let mut children = Vec::new();
                    let (v, c) = self.child(&word[..r - k], l, 1, ctx, &mut children)?;
                    complete &= c;
                    steps.push(TraceStep {
                        rule: Rule::Skip,
                        children,
                        value: v,
                    });
                    exact_found = true;
                }
            }
        }

        if !exact_found {
            let mut children = Vec::new();
            let exact = match s {
                -1 => Some((Rule::Dr2, Interval::exact(0))),
                0 => {
                    let (v, c) = self.child(prefix, l, i, ctx, &mut children)?;
                    complete &= c;
                    Some((Rule::Dr1, v))
                }
                -2 => {
                    let m = self.shift(l, last, -1);
                    let (v, c) = self.child(prefix, &m, i - 1, ctx, &mut children)?;
                    complete &= c;
                    Some((Rule::Dr3, v))
                }
                s if s <= -3 && i == 0 => Some((Rule::FiltrationH0, Interval::exact(0))),
                1 if i > 0 && self.dr5_applies(prefix, l, last) => {
                    let (v, c) = self.child(prefix, l, i, ctx, &mut children)?;
                    complete &= c;
                    Some((Rule::Dr5, v))
                }
                _ => None,
            };
            if let Some((rule, value)) = exact {
                steps.push(TraceStep { rule, children, value });
                exact_found = true;
            }
        }

        if !exact_found || self.config.cross_check {
            if s >= 1 {
                let mut children = Vec::new();
                let mut hi = Some(0u64);
                for t in 0..=s {
                    let m = self.shift(l, last, t);
                    let (v, c) = self.child(prefix, &m, i, ctx, &mut children)?;
                    complete &= c;
                    hi = match (hi, v.hi) {
                        (Some(a), Some(b)) => a.checked_add(b),
                        _ => None,
                    };
                }
                steps.push(TraceStep {
                    rule: Rule::Dr4,
                    children,
                    value: Interval { lo: 0, hi },
                });
            } else if s <= -3 && i > 0 {
                let mut children = Vec::new();
                let mut hi = Some(0u64);
                for t in 1..=(-s - 1) {
                    let m = self.shift(l, last, -t);
                    let (v, c) = self.child(prefix, &m, i - 1, ctx, &mut children)?;
                    complete &= c;
                    hi = match (hi, v.hi) {
                        (Some(a), Some(b)) => a.checked_add(b),
                        _ => None,
                    };
                }
                steps.push(TraceStep {
                    rule: Rule::Filtration,
                    children,
                    value: Interval { lo: 0, hi },
                });
            }
        }

        if i == 1 {
            if let Some(j) = as_k {
                if word.iter().any(|&m| m as usize == j) {
                    steps.push(TraceStep {
                        rule: Rule::Zeta,
                        children: vec![],
                        value: Interval::at_least(1),
                    });
                }
            }
        }
        Ok(complete)
    }

    /// `(L + K_{l_r}) . Gamma_{l_j} >= -1` for every earlier letter.
    fn dr5_applies(&self, prefix: &[u8], l: &[i64], last: usize) -> bool {
        prefix
            .iter()
            .all(|&m| l[m as usize] - self.cartan.entry(last, m as usize) >= -1)
    }

    /// `f^* L + Z_{l(r)}` is nef on the tower.
    fn j3_applies(&self, word: &[u8], l: &[i64]) -> bool {
        let r = word.len();
        let last = word[r - 1] as usize;
        let h: Vec<i64> = (0..r)
            .map(|k| {
                let lk = word[k] as usize;
                if k + 1 == r {
                    l[lk] + 1
                } else {
                    l[lk] + self.cartan.entry(last, lk)
                }
            })
            .collect();
        (0..r).all(|k| {
            let next = (k + 1..r).find(|&m| word[m] == word[k]);
            h[k] - next.map_or(0, |m| h[m]) >= 0
        })
    }

    /// `h^1(Z_{word[1]}, K_{l_r})`, where `word[1]` drops the last letter.
    pub fn h1_uniqueness(&self, word: &[usize]) -> Result<H1Answer, DescentError> {
        check_indices(self.cartan.rank(), word)?;
        let (&j, prefix) = word.split_last().ok_or(DescentError::EmptyWord)?;
        let earlier = prefix.contains(&j);
        if prefix.iter().all(|&m| matches!(-self.cartan.entry(j, m), 0 | 1 | -2)) {
            return Ok(if earlier { H1Answer::Exact1 } else { H1Answer::Exact0 });
        }
        let k: Vec<i64> = self.k_row(j).iter().map(|a| -a).collect();
        let q = Query::line_bundle(prefix.to_vec(), DivisorClass::new(k), 1);
        let hv = self.h_value(&q)?;
        Ok(match hv.value {
            CohomologyValue::Exact(0) => H1Answer::Exact0,
            CohomologyValue::Exact(1) => H1Answer::Exact1,
            _ => H1Answer::Undetermined {
                budget_exceeded: hv.budget_exceeded,
            },
        })
    }

    /// Runs the uniqueness step on every prefix whose last letter already
    /// occurred, stopping at the first undetermined one.
    pub fn certify_word(&self, word: &[usize]) -> Result<CertifyReport, DescentError> {
        check_indices(self.cartan.rank(), word)?;
        if !self.roots.is_reduced(word)? {
            return Err(DescentError::NotReduced { word: word.to_vec() });
        }
        Ok(self.certify_reduced(word))
    }

    /// As `certify_word` for a word already known to be reduced.
    pub fn certify_reduced(&self, word: &[usize]) -> CertifyReport {
        let mut steps = Vec::new();
        for t in 1..word.len() {
            if !word[..t].contains(&word[t]) {
                continue;
            }
            let answer = self
                .h1_uniqueness(&word[..=t])
                .expect("indices were checked by the caller");
            steps.push(CertifyStep {
                step: t + 1,
                letter: word[t],
                answer,
            });
            if let H1Answer::Undetermined { budget_exceeded } = answer {
                let outcome = if budget_exceeded {
                    CertifyOutcome::BudgetExceeded { step: t + 1 }
                } else {
                    CertifyOutcome::FailsAt { step: t + 1 }
                };
                return CertifyReport { outcome, steps };
            }
        }
        CertifyReport {
            outcome: CertifyOutcome::Certified,
            steps,
        }
    }
}

fn budget_step() -> TraceStep {
    TraceStep {
        rule: Rule::Budget,
        children: vec![],
        value: Interval::UNKNOWN,
    }
}

/// One-shot evaluation with a fresh engine and default settings.
pub fn h_value(c: &CartanData, q: &Query) -> Result<(CohomologyValue, DerivationTrace), DescentError> {
    let engine = Engine::new(c, EngineConfig::default())?;
    let (hv, trace) = engine.h_value_traced(q)?;
    Ok((hv.value, trace))
}

pub fn h1_uniqueness(c: &CartanData, word: &[usize]) -> Result<H1Answer, DescentError> {
    Engine::new(c, EngineConfig::default())?.h1_uniqueness(word)
}

pub fn certify_word(c: &CartanData, word: &[usize]) -> Result<CertifyReport, DescentError> {
    Engine::new(c, EngineConfig::default())?.certify_word(word)
}

/// The word `(u_n)^k = (1, .., n)^k` (0-based letters).
pub fn u_power(n: usize, k: usize) -> Vec<usize> {
    (0..k).flat_map(|_| 0..n).collect()
}

/// The word `(d_n)^k = (n, .., 1)^k` (0-based letters).
pub fn d_power(n: usize, k: usize) -> Vec<usize> {
    (0..k).flat_map(|_| (0..n).rev()).collect()
}
