//! Sets with consistencies: a bounded poset with a lower relation `→` and an
//! upper relation `⇢`, the axioms SC1-SC5' and the saturation engine.
//!
//! A lower pair always has a meet in the carrier and an upper pair a join;
//! pairs whose operation is missing are either rejected (strict mode) or
//! reported back as requests (lenient mode, used by the staged universal
//! construction which creates the missing elements).

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;
use crate::poset::Poset;
use crate::term::LatticeTerm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Lower,
    Upper,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Lower => "lower",
            Relation::Upper => "upper",
        }
    }

    fn op(self) -> Op {
        match self {
            Relation::Lower => Op::Meet,
            Relation::Upper => Op::Join,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Meet,
    Join,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Meet => "meet",
            Op::Join => "join",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    #[serde(rename = "SC1")]
    Sc1,
    #[serde(rename = "SC2")]
    Sc2,
    #[serde(rename = "SC2'")]
    Sc2Prime,
    #[serde(rename = "SC3")]
    Sc3,
    #[serde(rename = "SC3'")]
    Sc3Prime,
    #[serde(rename = "SC4i")]
    Sc4i,
    #[serde(rename = "SC4ii")]
    Sc4ii,
    #[serde(rename = "SC5i")]
    Sc5i,
    #[serde(rename = "SC5ii")]
    Sc5ii,
    #[serde(rename = "SC5'i")]
    Sc5PrimeI,
    #[serde(rename = "SC5'ii")]
    Sc5PrimeIi,
    #[serde(rename = "ORDERED-COMMUTE")]
    OrderedCommute,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Sc1 => "SC1",
            Rule::Sc2 => "SC2",
            Rule::Sc2Prime => "SC2'",
            Rule::Sc3 => "SC3",
            Rule::Sc3Prime => "SC3'",
            Rule::Sc4i => "SC4i",
            Rule::Sc4ii => "SC4ii",
            Rule::Sc5i => "SC5i",
            Rule::Sc5ii => "SC5ii",
            Rule::Sc5PrimeI => "SC5'i",
            Rule::Sc5PrimeIi => "SC5'ii",
            Rule::OrderedCommute => "ORDERED-COMMUTE",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub op: Op,
    pub left: usize,
    pub right: usize,
    pub value: usize,
}

/// One recorded rule application.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub pairs: Vec<(usize, usize, Relation)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Certificate>,
}

impl Derivation {
    pub fn describe(&self, labels: &[String]) -> String {
        let premises: Vec<&str> = self.premises.iter().map(|&x| labels[x].as_str()).collect();
        let pairs: Vec<String> = self
            .pairs
            .iter()
            .map(|&(x, y, r)| format!("({}, {}) {}", labels[x], labels[y], r.name()))
            .collect();
        format!("{} [{}] => {}", self.rule, premises.join(", "), pairs.join("; "))
    }
}

/// A meet or join the saturation wanted but the carrier lacked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Request {
    pub op: Op,
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug)]
pub struct ConsistencyStructure {
    carrier: Poset,
    bottom: usize,
    top: usize,
    meet: Vec<Option<usize>>,
    join: Vec<Option<usize>>,
    lower: Vec<FixedBitSet>,
    lower_t: Vec<FixedBitSet>,
    upper: Vec<FixedBitSet>,
    upper_t: Vec<FixedBitSet>,
    log: Vec<Derivation>,
    origin: HashMap<(usize, usize, Relation), usize>,
}

impl PartialEq for ConsistencyStructure {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier && self.lower == other.lower && self.upper == other.upper
    }
}

impl ConsistencyStructure {
    /// A structure over a bounded poset; certified operations are the
    /// greatest lower and least upper bounds that exist in the carrier.
    pub fn new(carrier: Poset) -> Result<Self> {
        let n = carrier.len();
        let mut meet = vec![None; n * n];
        let mut join = vec![None; n * n];
        for x in 0..n {
            for y in 0..n {
                meet[x * n + y] = carrier.try_meet(x, y);
                join[x * n + y] = carrier.try_join(x, y);
            }
        }
        Self::from_parts(carrier, meet, join)
    }

    pub fn from_lattice(l: &FiniteLattice) -> Self {
        let n = l.len();
        let mut meet = vec![None; n * n];
        let mut join = vec![None; n * n];
        for x in 0..n {
            for y in 0..n {
                meet[x * n + y] = Some(l.meet(x, y));
                join[x * n + y] = Some(l.join(x, y));
            }
        }
        Self::from_parts(l.poset().clone(), meet, join).expect("lattices are bounded")
    }

    pub(crate) fn from_parts(carrier: Poset, meet: Vec<Option<usize>>, join: Vec<Option<usize>>) -> Result<Self> {
        let carrier = if carrier.bottom().is_none() || carrier.top().is_none() {
            carrier.with_detected_bounds()
        } else {
            carrier
        };
        let bottom = carrier.bottom().ok_or(Error::MissingBound("bottom"))?;
        let top = carrier.top().ok_or(Error::MissingBound("top"))?;
        let n = carrier.len();
        let empty = vec![FixedBitSet::with_capacity(n); n];
        let mut cs = ConsistencyStructure {
            carrier,
            bottom,
            top,
            meet,
            join,
            lower: empty.clone(),
            lower_t: empty.clone(),
            upper: empty.clone(),
            upper_t: empty,
            log: Vec::new(),
            origin: HashMap::new(),
        };
        for x in 0..n {
            for b in [bottom, top] {
                for rel in [Relation::Lower, Relation::Upper] {
                    cs.insert(b, x, rel);
                    cs.insert(x, b, rel);
                }
            }
        }
        Ok(cs)
    }

    pub fn carrier(&self) -> &Poset {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn label(&self, x: usize) -> &str {
        self.carrier.label(x)
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn meet(&self, x: usize, y: usize) -> Option<usize> {
        self.meet[x * self.len() + y]
    }

    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        self.join[x * self.len() + y]
    }

    fn op(&self, op: Op, x: usize, y: usize) -> Option<usize> {
        match op {
            Op::Meet => self.meet(x, y),
            Op::Join => self.join(x, y),
        }
    }

    pub fn has(&self, x: usize, y: usize, rel: Relation) -> bool {
        match rel {
            Relation::Lower => self.lower[x].contains(y),
            Relation::Upper => self.upper[x].contains(y),
        }
    }

    pub fn is_lower(&self, x: usize, y: usize) -> bool {
        self.lower[x].contains(y)
    }

    pub fn is_upper(&self, x: usize, y: usize) -> bool {
        self.upper[x].contains(y)
    }

    /// Pairs of a relation in lexicographic order.
    pub fn pairs(&self, rel: Relation) -> Vec<(usize, usize)> {
        let rows = match rel {
            Relation::Lower => &self.lower,
            Relation::Upper => &self.upper,
        };
        rows.iter()
            .enumerate()
            .flat_map(|(x, row)| row.ones().map(move |y| (x, y)))
            .collect()
    }

    pub fn pair_count(&self) -> usize {
        self.lower.iter().chain(&self.upper).map(|r| r.count_ones(..)).sum()
    }

    pub fn log(&self) -> &[Derivation] {
        &self.log
    }

    /// The derivation that introduced a pair, if it was derived rather than
    /// declared or implied by the bounds.
    pub fn origin(&self, x: usize, y: usize, rel: Relation) -> Option<&Derivation> {
        self.origin.get(&(x, y, rel)).map(|&i| &self.log[i])
    }

    fn insert(&mut self, x: usize, y: usize, rel: Relation) -> bool {
        if x == y {
            return false;
        }
        let (rows, cols) = match rel {
            Relation::Lower => (&mut self.lower, &mut self.lower_t),
            Relation::Upper => (&mut self.upper, &mut self.upper_t),
        };
        if rows[x].contains(y) {
            return false;
        }
        rows[x].insert(y);
        cols[y].insert(x);
        true
    }

    fn declare(&mut self, x: usize, y: usize, rel: Relation) -> Result<()> {
        if self.op(rel.op(), x, y).is_none() {
            return Err(Error::MissingCertificate(
                self.label(x).to_string(),
                self.label(y).to_string(),
                rel.name(),
                rel.op().name(),
            ));
        }
        self.insert(x, y, rel);
        Ok(())
    }

    pub fn declare_lower(&mut self, x: usize, y: usize) -> Result<()> {
        self.declare(x, y, Relation::Lower)
    }

    pub fn declare_upper(&mut self, x: usize, y: usize) -> Result<()> {
        self.declare(x, y, Relation::Upper)
    }

    /// Declares every ordered pair of distinct elements consistent in both
    /// senses.
    pub fn declare_all_pairs(&mut self) -> Result<()> {
        for x in 0..self.len() {
            for y in 0..self.len() {
                if x != y {
                    self.declare_lower(x, y)?;
                    self.declare_upper(x, y)?;
                }
            }
        }
        Ok(())
    }

    /// Least fixpoint of SC1-SC5' (consistency parts) above the current
    /// relations. Fails if a rule concludes a pair whose meet or join is not
    /// in the carrier.
    pub fn saturate(&self) -> Result<Self> {
        let mut out = self.clone();
        let mut engine = Engine {
            cs: &mut out,
            requests: None,
        };
        engine.run()?;
        Ok(out)
    }

    /// Saturates in place, collecting the operations that blocked a
    /// conclusion instead of failing.
    pub(crate) fn saturate_lenient(&mut self) -> BTreeSet<Request> {
        let mut requests = BTreeSet::new();
        let mut engine = Engine {
            cs: self,
            requests: Some(&mut requests),
        };
        engine.run().expect("lenient saturation does not fail");
        requests
    }

    /// Records that an ordered pair is consistent in both senses and in both
    /// orders, with meet the smaller and join the larger element.
    pub fn derive_ordered_commute(&mut self, t1: usize, t2: usize) -> Result<Derivation> {
        if t1 == t2 {
            return Err(Error::ReflexivePair(self.label(t1).to_string()));
        }
        if !self.carrier.comparable(t1, t2) {
            return Err(Error::NotComparable(
                self.label(t1).to_string(),
                self.label(t2).to_string(),
            ));
        }
        let (lo, hi) = if self.carrier.leq(t1, t2) { (t1, t2) } else { (t2, t1) };
        let mut pairs = Vec::new();
        for rel in [Relation::Lower, Relation::Upper] {
            for (x, y) in [(t1, t2), (t2, t1)] {
                self.insert(x, y, rel);
                pairs.push((x, y, rel));
            }
        }
        let d = Derivation {
            rule: Rule::OrderedCommute,
            premises: vec![t1, t2],
            pairs,
            certificates: vec![
                Certificate {
                    op: Op::Meet,
                    left: t1,
                    right: t2,
                    value: lo,
                },
                Certificate {
                    op: Op::Join,
                    left: t1,
                    right: t2,
                    value: hi,
                },
            ],
        };
        self.log.push(d.clone());
        Ok(d)
    }

    pub fn check_axioms(&self) -> Result<AxiomReport> {
        for rel in [Relation::Lower, Relation::Upper] {
            for (x, y) in self.pairs(rel) {
                if self.op(rel.op(), x, y).is_none() {
                    return Err(Error::MissingCertificate(
                        self.label(x).to_string(),
                        self.label(y).to_string(),
                        rel.name(),
                        rel.op().name(),
                    ));
                }
            }
        }
        let mut report = AxiomReport { axioms: Vec::new() };
        report.axioms.push(self.check_sc1());
        let checks: [(&'static str, Pattern); 7] = [
            ("SC2", Pattern::Sc2),
            ("SC2'", Pattern::Sc2Prime),
            ("SC3", Pattern::Sc3),
            ("SC3'", Pattern::Sc3Prime),
            ("SC4", Pattern::Sc4),
            ("SC5", Pattern::Sc5),
            ("SC5'", Pattern::Sc5Prime),
        ];
        for (name, pattern) in checks {
            let mut result = AxiomResult::new(name);
            self.for_each_match(pattern, |t| {
                result.instances += 1;
                if result.witness.is_some() {
                    return;
                }
                for (rule, x, y, rel) in self.conclusions(pattern, t) {
                    let ok = match (x, y) {
                        (Some(x), Some(y)) => x == y || self.has(x, y, rel),
                        _ => false,
                    };
                    if !ok {
                        result.fail(t, format!("{rule} conclusion missing"));
                        return;
                    }
                }
                if pattern.has_equation() {
                    let [t1, t2, t3] = t;
                    let lhs = self.join(t1, t2).and_then(|s| self.meet(s, t3));
                    let rhs = self.meet(t2, t3).and_then(|p| self.join(t1, p));
                    if lhs.is_none() || lhs != rhs {
                        result.fail(t, "(t1+t2)*t3 != t1+t2*t3".to_string());
                    }
                }
            });
            report.axioms.push(result);
        }
        Ok(report)
    }

    fn check_sc1(&self) -> AxiomResult {
        let mut result = AxiomResult::new("SC1");
        for a in 0..self.len() {
            for b in self.carrier.up_set(a).ones() {
                if a == b {
                    continue;
                }
                result.instances += 1;
                if result.witness.is_none() {
                    let all = [Relation::Lower, Relation::Upper]
                        .iter()
                        .all(|&r| self.has(a, b, r) && self.has(b, a, r));
                    if !all {
                        result.witness = Some(vec![a, b]);
                        result.detail = Some("comparable pair not consistent".into());
                    }
                }
            }
        }
        result
    }

    /// Calls `f` on every triple matching the premises of `pattern`, in
    /// lexicographic index order.
    fn for_each_match(&self, pattern: Pattern, mut f: impl FnMut([usize; 3])) {
        for a in 0..self.len() {
            match pattern {
                Pattern::Sc2 | Pattern::Sc2Prime => {
                    let rows = if pattern == Pattern::Sc2 { &self.lower } else { &self.upper };
                    for b in rows[a].ones() {
                        let mut cs = rows[a].clone();
                        cs.intersect_with(&rows[b]);
                        for c in cs.ones() {
                            f([a, b, c]);
                        }
                    }
                }
                Pattern::Sc3 => {
                    for b in self.upper[a].ones() {
                        let mut cs = self.upper[a].clone();
                        cs.intersect_with(&self.lower[b]);
                        for c in cs.ones() {
                            f([a, b, c]);
                        }
                    }
                }
                Pattern::Sc3Prime => {
                    for b in self.upper[a].ones() {
                        let mut cs = self.lower[a].clone();
                        cs.intersect_with(&self.lower[b]);
                        for c in cs.ones() {
                            f([a, b, c]);
                        }
                    }
                }
                Pattern::Sc4 | Pattern::Sc5 => {
                    for b in self.upper[a].ones() {
                        let mut cs = self.carrier.up_set(a).clone();
                        let second = if pattern == Pattern::Sc4 { &self.lower[b] } else { &self.lower_t[b] };
                        cs.intersect_with(second);
                        for c in cs.ones() {
                            f([a, b, c]);
                        }
                    }
                }
                Pattern::Sc5Prime => {
                    for b in self.upper_t[a].ones() {
                        let mut cs = self.carrier.up_set(a).clone();
                        cs.intersect_with(&self.lower[b]);
                        for c in cs.ones() {
                            f([a, b, c]);
                        }
                    }
                }
            }
        }
    }

    /// Concluded pairs of a matched triple; `None` marks an operation
    /// missing from the carrier.
    fn conclusions(&self, pattern: Pattern, t: [usize; 3]) -> Vec<(Rule, Option<usize>, Option<usize>, Relation)> {
        let [a, b, c] = t;
        let s = Some;
        match pattern {
            Pattern::Sc2 => vec![
                (Rule::Sc2, self.meet(a, b), s(c), Relation::Lower),
                (Rule::Sc2, s(a), self.meet(b, c), Relation::Lower),
            ],
            Pattern::Sc2Prime => vec![
                (Rule::Sc2Prime, self.join(a, b), s(c), Relation::Upper),
                (Rule::Sc2Prime, s(a), self.join(b, c), Relation::Upper),
            ],
            Pattern::Sc3 => vec![(Rule::Sc3, s(a), self.meet(b, c), Relation::Upper)],
            Pattern::Sc3Prime => vec![(Rule::Sc3Prime, self.join(a, b), s(c), Relation::Lower)],
            Pattern::Sc4 => vec![
                (Rule::Sc4i, self.join(a, b), s(c), Relation::Lower),
                (Rule::Sc4ii, s(a), self.meet(b, c), Relation::Upper),
            ],
            Pattern::Sc5 => vec![
                (Rule::Sc5i, s(a), self.meet(b, c), Relation::Upper),
                (Rule::Sc5ii, s(c), self.join(a, b), Relation::Lower),
            ],
            Pattern::Sc5Prime => vec![
                (Rule::Sc5PrimeI, self.meet(b, c), s(a), Relation::Upper),
                (Rule::Sc5PrimeIi, self.join(a, b), s(c), Relation::Lower),
            ],
        }
    }

    /// Every triple matching SC4, SC5 or SC5' whose modularity equation is
    /// not yet satisfied by the carrier tables (or cannot be evaluated).
    pub(crate) fn modular_triples(&self) -> BTreeSet<[usize; 3]> {
        let mut out = BTreeSet::new();
        for pattern in [Pattern::Sc4, Pattern::Sc5, Pattern::Sc5Prime] {
            self.for_each_match(pattern, |t| {
                out.insert(t);
            });
        }
        out
    }

    /// Decides whether the value of `term` is certified to exist, after
    /// lenient saturation of a copy of the structure. Generators are
    /// carrier labels; `0` and `1` are the bounds.
    pub fn plan_expression(&self, term: &LatticeTerm) -> Result<Plan> {
        let mut cs = self.clone();
        cs.saturate_lenient();
        let mut planner = Planner { cs: &cs, steps: Vec::new() };
        let value = planner.eval(term)?;
        Ok(Plan {
            defined: value.is_some(),
            value,
            steps: planner.steps,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pattern {
    Sc2,
    Sc2Prime,
    Sc3,
    Sc3Prime,
    Sc4,
    Sc5,
    Sc5Prime,
}

impl Pattern {
    fn has_equation(self) -> bool {
        matches!(self, Pattern::Sc4 | Pattern::Sc5 | Pattern::Sc5Prime)
    }
}

struct Engine<'a> {
    cs: &'a mut ConsistencyStructure,
    requests: Option<&'a mut BTreeSet<Request>>,
}

impl Engine<'_> {
    fn run(&mut self) -> Result<()> {
        loop {
            let mut changed = self.sc1()?;
            for pattern in [
                Pattern::Sc2,
                Pattern::Sc2Prime,
                Pattern::Sc3,
                Pattern::Sc3Prime,
                Pattern::Sc4,
                Pattern::Sc5,
                Pattern::Sc5Prime,
            ] {
                let mut matches = Vec::new();
                self.cs.for_each_match(pattern, |t| matches.push(t));
                for t in matches {
                    for (rule, x, y, rel) in self.cs.conclusions(pattern, t) {
                        let (x, y) = (x.expect("operand exists"), y.expect("operand exists"));
                        changed |= self.conclude(rule, &t, x, y, rel)?;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn sc1(&mut self) -> Result<bool> {
        let mut changed = false;
        for a in 0..self.cs.len() {
            let above: Vec<usize> = self.cs.carrier.up_set(a).ones().filter(|&b| b != a).collect();
            for b in above {
                let all = [Relation::Lower, Relation::Upper]
                    .iter()
                    .all(|&r| self.cs.has(a, b, r) && self.cs.has(b, a, r));
                if all {
                    continue;
                }
                let mut pairs = Vec::new();
                for rel in [Relation::Lower, Relation::Upper] {
                    for (x, y) in [(a, b), (b, a)] {
                        if self.cs.insert(x, y, rel) {
                            pairs.push((x, y, rel));
                        }
                    }
                }
                self.record(Rule::Sc1, vec![a, b], pairs);
                changed = true;
            }
        }
        Ok(changed)
    }

    fn record(&mut self, rule: Rule, premises: Vec<usize>, pairs: Vec<(usize, usize, Relation)>) {
        let idx = self.cs.log.len();
        for &p in &pairs {
            self.cs.origin.insert(p, idx);
        }
        self.cs.log.push(Derivation {
            rule,
            premises,
            pairs,
            certificates: Vec::new(),
        });
    }

    fn conclude(&mut self, rule: Rule, premises: &[usize], x: usize, y: usize, rel: Relation) -> Result<bool> {
        if x == y || self.cs.has(x, y, rel) {
            return Ok(false);
        }
        let op = rel.op();
        if self.cs.op(op, x, y).is_none() {
            return match self.requests.as_deref_mut() {
                Some(reqs) => {
                    let (left, right) = (x.min(y), x.max(y));
                    reqs.insert(Request { op, left, right });
                    Ok(false)
                }
                None => Err(Error::ConflictError {
                    rule: rule.name().to_string(),
                    left: self.cs.label(x).to_string(),
                    right: self.cs.label(y).to_string(),
                    relation: rel.name(),
                    op: op.name(),
                }),
            };
        }
        self.cs.insert(x, y, rel);
        self.record(rule, premises.to_vec(), vec![(x, y, rel)]);
        Ok(true)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub holds: bool,
    pub instances: usize,
    pub witness: Option<Vec<usize>>,
    pub detail: Option<String>,
}

impl AxiomResult {
    fn new(axiom: &'static str) -> Self {
        AxiomResult {
            axiom,
            holds: true,
            instances: 0,
            witness: None,
            detail: None,
        }
    }

    fn fail(&mut self, t: [usize; 3], detail: String) {
        self.holds = false;
        self.witness = Some(t.to_vec());
        self.detail = Some(detail);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axioms: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.axioms.iter().all(|a| a.holds && a.witness.is_none())
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.axiom == axiom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Justification {
    Generator,
    Bound,
    /// The operands are equal or comparable.
    Comparable,
    /// The operands form a consistent pair, possibly derived by a rule.
    Consistent {
        left: usize,
        right: usize,
        relation: Relation,
        rule: Option<Rule>,
    },
    /// The value exists because the same set of operands combines along
    /// another certified bracketing.
    Strass { bracketing: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanStep {
    pub expression: String,
    pub value: usize,
    pub justification: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Plan {
    pub defined: bool,
    pub value: Option<usize>,
    pub steps: Vec<PlanStep>,
}

/// Largest number of distinct operands in one flattened meet or join.
const MAX_PLAN_OPERANDS: usize = 12;

struct Planner<'a> {
    cs: &'a ConsistencyStructure,
    steps: Vec<PlanStep>,
}

impl Planner<'_> {
    fn eval(&mut self, t: &LatticeTerm) -> Result<Option<usize>> {
        match t {
            LatticeTerm::Gen(g) => {
                let x = self.cs.carrier.require(g)?;
                self.steps.push(PlanStep {
                    expression: g.clone(),
                    value: x,
                    justification: Justification::Generator,
                });
                Ok(Some(x))
            }
            LatticeTerm::Top | LatticeTerm::Bottom => {
                let x = if *t == LatticeTerm::Top { self.cs.top } else { self.cs.bottom };
                self.steps.push(PlanStep {
                    expression: t.to_string(),
                    value: x,
                    justification: Justification::Bound,
                });
                Ok(Some(x))
            }
            LatticeTerm::Meet(_) => self.eval_flat(t, Op::Meet),
            LatticeTerm::Join(_) => self.eval_flat(t, Op::Join),
        }
    }

    /// Evaluates a maximal same-operation subtree. Leaves are evaluated
    /// recursively; each inner node is defined iff its operand set has a
    /// certified value along some bracketing.
    fn eval_flat(&mut self, t: &LatticeTerm, op: Op) -> Result<Option<usize>> {
        let mut leaves: Vec<&LatticeTerm> = Vec::new();
        collect_leaves(t, op, &mut leaves);
        let mut values = Vec::with_capacity(leaves.len());
        for leaf in &leaves {
            match self.eval(leaf)? {
                Some(v) => values.push(v),
                None => return Ok(None),
            }
        }
        let mut distinct: Vec<usize> = values.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() > MAX_PLAN_OPERANDS {
            return Err(Error::guard("operands in one expression", distinct.len(), MAX_PLAN_OPERANDS));
        }
        let known = self.known_subsets(&distinct, op);
        let mut cursor = 0;
        self.check_node(t, op, &values, &distinct, &known, &mut cursor)
    }

    /// `known[mask]`: the combined value of the operand subset and one
    /// certified split producing it.
    fn known_subsets(&self, operands: &[usize], op: Op) -> Vec<Option<(usize, u32, u32)>> {
        let k = operands.len();
        let mut known: Vec<Option<(usize, u32, u32)>> = vec![None; 1 << k];
        for (i, &x) in operands.iter().enumerate() {
            known[1 << i] = Some((x, 0, 0));
        }
        for mask in 1u32..(1 << k) {
            if mask.count_ones() < 2 {
                continue;
            }
            // Enumerate splits with the lowest set bit in the left part.
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let left = low | (rest & !sub);
                let right = sub;
                if right != 0 {
                    if let (Some((lv, ..)), Some((rv, ..))) = (known[left as usize], known[right as usize]) {
                        if let Some(v) = self.certified(op, lv, rv) {
                            known[mask as usize] = Some((v, left, right));
                            break;
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        known
    }

    fn certified(&self, op: Op, x: usize, y: usize) -> Option<usize> {
        let rel = match op {
            Op::Meet => Relation::Lower,
            Op::Join => Relation::Upper,
        };
        let direct = x == y || self.cs.carrier.comparable(x, y) || self.cs.has(x, y, rel) || self.cs.has(y, x, rel);
        if direct {
            self.cs.op(op, x, y)
        } else {
            None
        }
    }

    fn check_node(
        &mut self,
        t: &LatticeTerm,
        op: Op,
        values: &[usize],
        distinct: &[usize],
        known: &[Option<(usize, u32, u32)>],
        cursor: &mut usize,
    ) -> Result<Option<usize>> {
        let children = match (t, op) {
            (LatticeTerm::Meet(xs), Op::Meet) | (LatticeTerm::Join(xs), Op::Join) => xs,
            _ => {
                let v = values[*cursor];
                *cursor += 1;
                return Ok(Some(v));
            }
        };
        let mut mask = 0u32;
        let mut child_values = Vec::with_capacity(children.len());
        for c in children {
            let start = *cursor;
            let v = self.check_node(c, op, values, distinct, known, cursor)?;
            let Some(v) = v else { return Ok(None) };
            for &leaf in &values[start..*cursor] {
                mask |= 1 << distinct.binary_search(&leaf).expect("leaf among operands");
            }
            child_values.push(v);
        }
        let Some((value, left, right)) = known[mask as usize] else {
            return Ok(None);
        };
        // Syntactic bracketing: fold the children left to right.
        let mut acc = child_values[0];
        let mut syntactic = true;
        let mut last_pair = (acc, acc);
        for &v in &child_values[1..] {
            match self.certified(op, acc, v) {
                Some(next) => {
                    last_pair = (acc, v);
                    acc = next;
                }
                None => {
                    syntactic = false;
                    break;
                }
            }
        }
        let justification = if syntactic {
            let (x, y) = last_pair;
            let rel = match op {
                Op::Meet => Relation::Lower,
                Op::Join => Relation::Upper,
            };
            if x == y || self.cs.carrier.comparable(x, y) {
                Justification::Comparable
            } else {
                let (l, r) = if self.cs.has(x, y, rel) { (x, y) } else { (y, x) };
                Justification::Consistent {
                    left: l,
                    right: r,
                    relation: rel,
                    rule: self.cs.origin(l, r, rel).map(|d| d.rule),
                }
            }
        } else {
            Justification::Strass {
                bracketing: self.bracketing(op, distinct, known, left, right),
            }
        };
        self.steps.push(PlanStep {
            expression: t.to_string(),
            value,
            justification,
        });
        Ok(Some(value))
    }

    fn bracketing(&self, op: Op, distinct: &[usize], known: &[Option<(usize, u32, u32)>], left: u32, right: u32) -> String {
        let sym = if op == Op::Meet { "*" } else { " + " };
        let part = |mask: u32| -> String {
            if mask.count_ones() == 1 {
                self.cs.label(distinct[mask.trailing_zeros() as usize]).to_string()
            } else {
                let (_, l, r) = known[mask as usize].expect("known split");
                format!("({})", self.bracketing(op, distinct, known, l, r))
            }
        };
        format!("{}{sym}{}", part(left), part(right))
    }
}

fn collect_leaves<'a>(t: &'a LatticeTerm, op: Op, out: &mut Vec<&'a LatticeTerm>) {
    match (t, op) {
        (LatticeTerm::Meet(xs), Op::Meet) | (LatticeTerm::Join(xs), Op::Join) => {
            for x in xs {
                collect_leaves(x, op, out);
            }
        }
        _ => out.push(t),
    }
}
