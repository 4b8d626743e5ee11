//! Fault-tolerant nonlinear consensus: measuring agents read the input, every
//! other agent takes the majority of `2γ + 1` secured neighbours.

use crate::bits::BoolVec;
use crate::error::{Error, Result};
use crate::expr::BoolExpr;
use crate::map::BoolMap;
use crate::reachability::{r_reachable, NetworkSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RobustRule {
    /// `x_i ← u_j`.
    DirectRead,
    /// Monotone majority: true iff at least `γ + 1` of the `2γ + 1` sources
    /// are true, written as the sum of all `(γ + 1)`-subset products.
    Majority { sources: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustSystem {
    pub input: usize,
    pub gamma: usize,
    /// Redundancy `r = 2γ + 1`.
    pub r: usize,
    pub rules: Vec<RobustRule>,
    /// Secured layers from the redundancy fixed point (`layers[0]` = roots).
    pub layers: Vec<Vec<usize>>,
    pub spec: NetworkSpec,
}

/// All `k`-subsets of `items`, lexicographic in the positions of `items`.
pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for idx in start..items.len() {
            if items.len() - idx < k - cur.len() {
                break;
            }
            cur.push(items[idx]);
            go(items, k, idx + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

impl RobustSystem {
    pub fn n(&self) -> usize {
        self.rules.len()
    }

    /// Product terms of agent `i`'s rule; empty for direct readers.
    pub fn terms(&self, i: usize) -> Vec<Vec<usize>> {
        match &self.rules[i] {
            RobustRule::DirectRead => Vec::new(),
            RobustRule::Majority { sources } => combinations(sources, self.gamma + 1),
        }
    }

    /// One synchronous round of the healthy dynamics.
    pub fn step(&self, x: &BoolVec, u: bool) -> BoolVec {
        let threshold = self.gamma + 1;
        self.rules
            .iter()
            .map(|rule| match rule {
                RobustRule::DirectRead => u,
                RobustRule::Majority { sources } => {
                    sources.iter().filter(|&&s| x.get(s)).count() >= threshold
                }
            })
            .collect()
    }

    pub fn to_bool_map(&self) -> BoolMap {
        let components = (0..self.n())
            .map(|i| match &self.rules[i] {
                RobustRule::DirectRead => BoolExpr::input(self.input),
                RobustRule::Majority { .. } => BoolExpr::or(
                    self.terms(i)
                        .into_iter()
                        .map(|t| BoolExpr::and(t.into_iter().map(BoolExpr::state))),
                ),
            })
            .collect();
        BoolMap::new(self.n(), self.spec.m(), components).expect("synthesised map is well-formed")
    }
}

/// Synthesises a rule tolerating up to `gamma` permanently faulty agents.
///
/// Requires the input to be completely `(2γ + 1)`-reachable. Each non-measuring
/// agent, in secured-layer order, listens to the `2γ + 1` secured senders
/// that were secured earliest (ties by lowest index).
pub fn synthesize_robust(spec: &NetworkSpec, j: usize, gamma: usize) -> Result<RobustSystem> {
    let r = 2 * gamma + 1;
    let reach = r_reachable(spec, j, r)?;
    let n = spec.n();
    if !reach.complete {
        let secured = reach.secured;
        let agent = (0..n)
            .find(|i| secured.binary_search(i).is_err())
            .unwrap_or(0);
        return Err(Error::Infeasible {
            input: j,
            redundancy: r,
            agent,
        });
    }

    let mut layer_of = vec![usize::MAX; n];
    for (k, layer) in reach.layers.iter().enumerate() {
        for &i in layer {
            layer_of[i] = k;
        }
    }

    let mut rules = vec![RobustRule::DirectRead; n];
    for (k, layer) in reach.layers.iter().enumerate().skip(1) {
        for &i in layer {
            let mut heard: Vec<usize> = spec.senders(i).filter(|&s| layer_of[s] < k).collect();
            heard.sort_by_key(|&s| (layer_of[s], s));
            let mut sources: Vec<usize> = heard.into_iter().take(r).collect();
            debug_assert_eq!(sources.len(), r);
            sources.sort_unstable();
            rules[i] = RobustRule::Majority { sources };
        }
    }

    Ok(RobustSystem {
        input: j,
        gamma,
        r,
        rules,
        layers: reach.layers,
        spec: spec.clone(),
    })
}
