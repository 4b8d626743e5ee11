//! Synchronous round-based execution of consensus systems with output maps,
//! fault injection and disagreement traces.
//!
//! The network state `X` is an `n × q` matrix: agent `i` keeps one bit per
//! subterm. Each subterm column evolves under its own consensus rule, fed by
//! the subterm's value `l_h = χ_h(u_j)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bits::BoolVec;
use crate::error::{Error, Result};
use crate::expr::{BoolExpr, Var};
use crate::linear::LinearSystem;
use crate::map::BoolMap;
use crate::matrix::BoolMat;
use crate::robust::{RobustRule, RobustSystem};

/// Unary operator applied to an input to form a subterm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chi {
    Identity,
    Negate,
}

impl Chi {
    pub fn apply(self, b: bool) -> bool {
        match self {
            Chi::Identity => b,
            Chi::Negate => !b,
        }
    }

    fn wrap(self, e: BoolExpr) -> BoolExpr {
        match self {
            Chi::Identity => e,
            Chi::Negate => BoolExpr::not(e),
        }
    }
}

/// Decisions `y_h = f_h(u)` written over subterms `l_1..l_q`, each subterm a
/// unary function of a single input. Inside `decisions`, `StateVar(s)` stands
/// for subterm `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionSystem {
    m: usize,
    subterm_input: Vec<usize>,
    chi: Vec<Chi>,
    decisions: Vec<BoolExpr>,
}

impl DecisionSystem {
    pub fn new(
        m: usize,
        subterm_input: Vec<usize>,
        chi: Vec<Chi>,
        decisions: Vec<BoolExpr>,
    ) -> Result<Self> {
        if subterm_input.len() != chi.len() {
            return Err(Error::Shape(format!(
                "{} subterm inputs but {} operators",
                subterm_input.len(),
                chi.len()
            )));
        }
        for &j in &subterm_input {
            if j >= m {
                return Err(Error::Index { index: j, limit: m });
            }
        }
        let q = chi.len();
        for d in &decisions {
            d.validate(q, 0)?;
        }
        Ok(Self {
            m,
            subterm_input,
            chi,
            decisions,
        })
    }

    /// One identity subterm per input; decisions are given over inputs.
    pub fn from_input_decisions(m: usize, decisions: &[BoolExpr]) -> Result<Self> {
        for d in decisions {
            d.validate(0, m)?;
        }
        let over_subterms = decisions
            .iter()
            .map(|d| {
                d.substitute(&|v| match v {
                    Var::Input(j) => BoolExpr::state(j),
                    Var::State(s) => BoolExpr::state(s),
                })
            })
            .collect();
        Self::new(m, (0..m).collect(), vec![Chi::Identity; m], over_subterms)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.chi.len()
    }

    pub fn p(&self) -> usize {
        self.decisions.len()
    }

    pub fn subterm_input(&self, h: usize) -> usize {
        self.subterm_input[h]
    }

    pub fn chi(&self, h: usize) -> Chi {
        self.chi[h]
    }

    pub fn decisions(&self) -> &[BoolExpr] {
        &self.decisions
    }

    /// `l(u)`.
    pub fn subterm_values(&self, u: &BoolVec) -> BoolVec {
        assert_eq!(u.len(), self.m, "input length mismatch");
        (0..self.q())
            .map(|h| self.chi[h].apply(u.get(self.subterm_input[h])))
            .collect()
    }

    /// The centralised decision vector `y* = f(u)`.
    pub fn centralized(&self, u: &BoolVec) -> BoolVec {
        let l = self.subterm_values(u);
        let none = BoolVec::zeros(0);
        self.decisions.iter().map(|d| d.eval(&l, &none)).collect()
    }
}

/// Per-agent output maps: agent `i`'s decision `h` with every subterm the
/// agent can measure replaced by `χ(u_j)`, and every other subterm `s` by the
/// agent's own state component `X_{i,s}`.
///
/// In the returned expressions `StateVar(s)` is `X_{i,s}` and `InputVar(j)` is `u_j`.
pub fn build_output_maps(ds: &DecisionSystem, v: &BoolMat) -> Result<Vec<Vec<BoolExpr>>> {
    if v.cols() != ds.m() {
        return Err(Error::Shape(format!(
            "visibility has {} columns, decisions use {} inputs",
            v.cols(),
            ds.m()
        )));
    }
    Ok((0..v.rows())
        .map(|i| {
            ds.decisions()
                .iter()
                .map(|d| {
                    d.substitute(&|var| match var {
                        Var::State(s) => {
                            let j = ds.subterm_input(s);
                            if v.get(i, j) {
                                ds.chi(s).wrap(BoolExpr::input(j))
                            } else {
                                BoolExpr::state(s)
                            }
                        }
                        Var::Input(j) => BoolExpr::input(j),
                    })
                })
                .collect()
        })
        .collect())
}

/// Update rule driving one subterm column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsensusRule {
    Linear(LinearSystem),
    Robust(RobustSystem),
    /// Any map over the column; `InputVar(j)` reads the driving value when
    /// `j` is the subterm's input, and `u_j` otherwise.
    Map(BoolMap),
}

impl ConsensusRule {
    pub fn n(&self) -> usize {
        match self {
            ConsensusRule::Linear(s) => s.n(),
            ConsensusRule::Robust(s) => s.n(),
            ConsensusRule::Map(m) => m.n_state(),
        }
    }

    pub fn to_bool_map(&self) -> BoolMap {
        match self {
            ConsensusRule::Linear(s) => s.to_bool_map(),
            ConsensusRule::Robust(s) => s.to_bool_map(),
            ConsensusRule::Map(m) => m.clone(),
        }
    }

    /// Agents the rule can drive to the input value.
    pub fn reachable_agents(&self) -> BoolVec {
        match self {
            ConsensusRule::Linear(s) => (0..s.n()).map(|i| s.is_reachable_agent(i)).collect(),
            _ => BoolVec::ones(self.n()),
        }
    }

    /// One synchronous round on a single column; `inputs` already carries the
    /// subterm value at the driving input's position.
    pub fn step(&self, x: &BoolVec, inputs: &BoolVec) -> BoolVec {
        match self {
            ConsensusRule::Linear(s) => s.step(x, inputs.get(s.input)),
            ConsensusRule::Robust(s) => s.step(x, inputs.get(s.input)),
            ConsensusRule::Map(m) => m
                .components()
                .iter()
                .map(|c| {
                    c.eval_by(&|v| match v {
                        Var::State(k) => x.get(k),
                        Var::Input(j) => inputs.get(j),
                    })
                })
                .collect(),
        }
    }
}

/// A complete networked system: one rule per subterm plus the decision layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusSystem {
    /// `(driving input, rule)` per subterm.
    pub subterms: Vec<(usize, ConsensusRule)>,
    pub decisions: DecisionSystem,
    pub outputs: Vec<Vec<BoolExpr>>,
    /// Agents left out of `e(t)` on top of those the rules cannot reach.
    pub excluded: BoolVec,
}

impl ConsensusSystem {
    pub fn new(
        subterm_rules: Vec<ConsensusRule>,
        decisions: DecisionSystem,
        v: &BoolMat,
    ) -> Result<Self> {
        if subterm_rules.len() != decisions.q() {
            return Err(Error::Shape(format!(
                "{} rules for {} subterms",
                subterm_rules.len(),
                decisions.q()
            )));
        }
        let n = v.rows();
        if let Some(bad) = subterm_rules.iter().find(|r| r.n() != n) {
            return Err(Error::Shape(format!(
                "rule over {} agents, network has {n}",
                bad.n()
            )));
        }
        let outputs = build_output_maps(&decisions, v)?;
        let subterms = subterm_rules
            .into_iter()
            .enumerate()
            .map(|(h, r)| (decisions.subterm_input(h), r))
            .collect();
        Ok(Self {
            subterms,
            decisions,
            outputs,
            excluded: BoolVec::zeros(n),
        })
    }

    pub fn n(&self) -> usize {
        self.outputs.len()
    }

    pub fn q(&self) -> usize {
        self.subterms.len()
    }

    pub fn p(&self) -> usize {
        self.decisions.p()
    }

    /// Agents reachable for every subterm and not explicitly excluded.
    pub fn reachable_agents(&self) -> BoolVec {
        self.subterms
            .iter()
            .fold(self.excluded.not(), |acc, (_, r)| {
                acc.and(&r.reachable_agents())
            })
    }

    /// Marks agents as unreachable, e.g. when rules were loaded as plain maps.
    pub fn exclude(&mut self, agents: &[usize]) -> Result<()> {
        for &i in agents {
            if i >= self.n() {
                return Err(Error::Index {
                    index: i,
                    limit: self.n(),
                });
            }
            self.excluded.set(i, true);
        }
        Ok(())
    }

    /// `Y = G(X, u)`.
    pub fn outputs(&self, x: &BoolMat, u: &BoolVec) -> BoolMat {
        let mut y = BoolMat::zeros(self.n(), self.p());
        for (i, g) in self.outputs.iter().enumerate() {
            let row = x.row(i);
            for (h, gh) in g.iter().enumerate() {
                y.set(i, h, gh.eval(&row, u));
            }
        }
        y
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultModel {
    /// Initial-state bit flips `(agent, subterm)`.
    pub temporary: Vec<(usize, usize)>,
    /// Agents broadcasting a fixed value on every state component.
    pub permanent: BTreeMap<usize, bool>,
}

impl FaultModel {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn stuck(agent: usize, value: bool) -> Self {
        let mut f = Self::default();
        f.permanent.insert(agent, value);
        f
    }

    pub fn is_faulty(&self, agent: usize) -> bool {
        self.permanent.contains_key(&agent)
    }
}

/// `X(t+1) = F(X(t), u)`: every agent reads round-`t` states only; afterwards
/// permanently faulty agents have all components overwritten by their stuck value.
pub fn step(sys: &ConsensusSystem, x: &BoolMat, u: &BoolVec, faults: &FaultModel) -> BoolMat {
    let l = sys.decisions.subterm_values(u);
    let mut next = BoolMat::zeros(x.rows(), x.cols());
    for (h, (j, rule)) in sys.subterms.iter().enumerate() {
        let mut inputs = u.clone();
        inputs.set(*j, l.get(h));
        next.set_col(h, &rule.step(&x.col(h), &inputs));
    }
    for (&agent, &value) in &faults.permanent {
        let fill = if value {
            BoolVec::ones(x.cols())
        } else {
            BoolVec::zeros(x.cols())
        };
        next.set_row(agent, &fill);
    }
    next
}

/// XOR count of `Y` against `1ₙ·f(u)ᵀ` over all agents.
pub fn disagreement(y: &BoolMat, ds: &DecisionSystem, u: &BoolVec) -> usize {
    disagreement_over(y, ds, u, &BoolVec::ones(y.rows()))
}

/// As [`disagreement`], restricted to agents flagged in `agents`.
pub fn disagreement_over(y: &BoolMat, ds: &DecisionSystem, u: &BoolVec, agents: &BoolVec) -> usize {
    let target = ds.centralized(u);
    agents
        .ones_indices()
        .into_iter()
        .map(|i| y.row(i).hamming(&target))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    pub u: BoolVec,
    pub centralized: BoolVec,
    pub states: Vec<BoolMat>,
    pub outputs: Vec<BoolMat>,
    pub disagreement: Vec<usize>,
    /// First `t` with `X(t+1) = X(t)`, if reached within the round cap.
    pub converged_at: Option<usize>,
    /// Agents counted in `e(t)`: reachable and not permanently faulty.
    pub counted: BoolVec,
}

impl SimTrace {
    pub fn rounds(&self) -> usize {
        self.states.len() - 1
    }

    pub fn final_disagreement(&self) -> usize {
        *self.disagreement.last().expect("trace has round 0")
    }

    /// Converged and every counted agent outputs `f(u)`.
    pub fn agrees(&self) -> bool {
        self.converged_at.is_some() && self.final_disagreement() == 0
    }

    /// First round from which `e(t)` stays zero to the end of the trace.
    pub fn agreement_round(&self) -> Option<usize> {
        let last_nonzero = self.disagreement.iter().rposition(|&e| e != 0);
        match last_nonzero {
            None => Some(0),
            Some(t) if t + 1 < self.disagreement.len() => Some(t + 1),
            Some(_) => None,
        }
    }

    /// Agents not counted in `e(t)`.
    pub fn excluded(&self) -> Vec<usize> {
        self.counted.not().ones_indices()
    }

    /// CSV with columns `t`, `e`, then `X` and `Y` flattened row-major.
    /// Headers use 1-based `agent.subterm` / `agent.decision` names.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,e");
        let (n, q) = (self.states[0].rows(), self.states[0].cols());
        let p = self.outputs[0].cols();
        for i in 1..=n {
            for h in 1..=q {
                let _ = write!(out, ",X{i}.{h}");
            }
        }
        for i in 1..=n {
            for h in 1..=p {
                let _ = write!(out, ",Y{i}.{h}");
            }
        }
        out.push('\n');
        for (t, (x, y)) in self.states.iter().zip(&self.outputs).enumerate() {
            let _ = write!(out, "{t},{}", self.disagreement[t]);
            for m in [x, y] {
                for i in 0..m.rows() {
                    for h in 0..m.cols() {
                        out.push_str(if m.get(i, h) { ",1" } else { ",0" });
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Runs from `x0` (with temporary faults applied) for at most `t_max` rounds,
/// stopping early once the state is stationary.
pub fn run(
    sys: &ConsensusSystem,
    x0: &BoolMat,
    u: &BoolVec,
    faults: &FaultModel,
    t_max: usize,
) -> Result<SimTrace> {
    let (n, q) = (sys.n(), sys.q());
    if x0.rows() != n || x0.cols() != q {
        return Err(Error::Shape(format!(
            "initial state is {}x{}, expected {n}x{q}",
            x0.rows(),
            x0.cols()
        )));
    }
    if u.len() != sys.decisions.m() {
        return Err(Error::Shape(format!(
            "{} inputs given, decisions use {}",
            u.len(),
            sys.decisions.m()
        )));
    }
    if t_max == 0 {
        return Err(Error::Argument("round cap must be at least 1".into()));
    }
    for &(i, h) in &faults.temporary {
        if i >= n || h >= q {
            return Err(Error::Index {
                index: if i >= n { i } else { h },
                limit: if i >= n { n } else { q },
            });
        }
    }
    if let Some((&i, _)) = faults.permanent.iter().find(|(&i, _)| i >= n) {
        return Err(Error::Index { index: i, limit: n });
    }

    let mut x = x0.clone();
    for &(i, h) in &faults.temporary {
        let b = x.get(i, h);
        x.set(i, h, !b);
    }
    let mut counted = sys.reachable_agents();
    for &i in faults.permanent.keys() {
        counted.set(i, false);
    }

    let centralized = sys.decisions.centralized(u);
    let mut trace = SimTrace {
        u: u.clone(),
        centralized,
        states: Vec::new(),
        outputs: Vec::new(),
        disagreement: Vec::new(),
        converged_at: None,
        counted,
    };
    let record = |trace: &mut SimTrace, x: BoolMat| {
        let y = sys.outputs(&x, u);
        trace
            .disagreement
            .push(disagreement_over(&y, &sys.decisions, u, &trace.counted));
        trace.outputs.push(y);
        trace.states.push(x);
    };
    record(&mut trace, x.clone());
    for t in 0..t_max {
        let next = step(sys, &x, u, faults);
        if next == x {
            trace.converged_at = Some(t);
            break;
        }
        record(&mut trace, next.clone());
        x = next;
    }
    Ok(trace)
}

/// Per-agent threshold form of a single-column rule, on packed states
/// (bit `i` = agent `i`, at most 64 agents). Used for exhaustive sweeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedRule {
    agents: Vec<PackedAgent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PackedAgent {
    Input,
    Threshold { sources: u64, at_least: u32 },
}

impl PackedRule {
    pub fn from_linear(sys: &LinearSystem) -> Self {
        assert!(sys.n() <= 64, "packed rules support at most 64 agents");
        let agents = (0..sys.n())
            .map(|i| {
                if sys.b.get(i) {
                    PackedAgent::Input
                } else {
                    let src = sys.parent[i].unwrap_or(i);
                    PackedAgent::Threshold {
                        sources: 1 << src,
                        at_least: 1,
                    }
                }
            })
            .collect();
        Self { agents }
    }

    pub fn from_robust(sys: &RobustSystem) -> Self {
        assert!(sys.n() <= 64, "packed rules support at most 64 agents");
        let agents = sys
            .rules
            .iter()
            .map(|r| match r {
                RobustRule::DirectRead => PackedAgent::Input,
                RobustRule::Majority { sources } => PackedAgent::Threshold {
                    sources: sources.iter().fold(0, |m, &s| m | 1 << s),
                    at_least: sys.gamma as u32 + 1,
                },
            })
            .collect();
        Self { agents }
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    #[inline]
    pub fn step(&self, x: u64, u: bool) -> u64 {
        let mut next = 0u64;
        for (i, a) in self.agents.iter().enumerate() {
            let bit = match *a {
                PackedAgent::Input => u,
                PackedAgent::Threshold { sources, at_least } => {
                    (x & sources).count_ones() >= at_least
                }
            };
            next |= (bit as u64) << i;
        }
        next
    }
}

/// A counterexample to fault tolerance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToleranceViolation {
    pub stuck: Vec<(usize, bool)>,
    pub u: bool,
    pub x0: u64,
    pub final_state: u64,
}

/// Exhaustively checks that for every set of at most `max_faults` agents stuck
/// at any values, every input value and every initial state, all other agents
/// reach `u` and stay there. Returns the first counterexample found.
pub fn check_fault_tolerance(rule: &PackedRule, max_faults: usize) -> Option<ToleranceViolation> {
    let n = rule.n();
    assert!(n <= 24, "exhaustive sweep limited to 24 agents");
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut fault_sets: Vec<Vec<usize>> = vec![Vec::new()];
    for k in 1..=max_faults.min(n) {
        fault_sets.extend(crate::robust::combinations(&(0..n).collect::<Vec<_>>(), k));
    }
    for set in &fault_sets {
        let fmask = set.iter().fold(0u64, |m, &i| m | 1 << i);
        for values in 0..1u64 << set.len() {
            let stuck_ones = set
                .iter()
                .enumerate()
                .filter(|(b, _)| (values >> b) & 1 == 1)
                .fold(0u64, |m, (_, &i)| m | 1 << i);
            let apply = |x: u64| (x & !fmask) | stuck_ones;
            for u in [false, true] {
                let target = if u { all & !fmask } else { 0 };
                for x0 in 0..=all {
                    let mut x = x0;
                    let mut settled = false;
                    for _ in 0..=n + 1 {
                        let next = apply(rule.step(x, u));
                        if next == x {
                            settled = true;
                            break;
                        }
                        x = next;
                    }
                    if !settled || x & !fmask != target {
                        return Some(ToleranceViolation {
                            stuck: set
                                .iter()
                                .map(|&i| (i, (stuck_ones >> i) & 1 == 1))
                                .collect(),
                            u,
                            x0,
                            final_state: x,
                        });
                    }
                }
            }
        }
    }
    None
}
