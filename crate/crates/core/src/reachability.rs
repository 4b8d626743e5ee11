//! Reachability of agents from an input through the communication graph.

use crate::bits::BoolVec;
use crate::error::{Error, Result};
use crate::matrix::BoolMat;

/// A synthesis problem instance: communication matrix `C` (`C(i,k) = 1` iff
/// agent `i` receives from agent `k`) and visibility matrix `V` (`V(i,j) = 1`
/// iff agent `i` measures input `j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    c: BoolMat,
    v: BoolMat,
}

impl NetworkSpec {
    pub fn new(c: BoolMat, v: BoolMat) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::Shape(format!(
                "communication matrix must be square, got {}x{}",
                c.rows(),
                c.cols()
            )));
        }
        if v.rows() != c.rows() {
            return Err(Error::Shape(format!(
                "visibility matrix has {} rows for {} agents",
                v.rows(),
                c.rows()
            )));
        }
        if c.rows() == 0 || v.cols() == 0 {
            return Err(Error::Shape("need at least one agent and one input".into()));
        }
        Ok(Self { c, v })
    }

    /// Single-input spec from a communication matrix and one visibility column.
    pub fn single_input(c: BoolMat, v_col: &BoolVec) -> Result<Self> {
        Self::new(c, BoolMat::from_column(v_col))
    }

    pub fn n(&self) -> usize {
        self.c.rows()
    }

    pub fn m(&self) -> usize {
        self.v.cols()
    }

    pub fn c(&self) -> &BoolMat {
        &self.c
    }

    pub fn v(&self) -> &BoolMat {
        &self.v
    }

    /// Column `V_j`.
    pub fn visibility(&self, j: usize) -> Result<BoolVec> {
        self.check_input(j)?;
        Ok(self.v.col(j))
    }

    pub(crate) fn check_input(&self, j: usize) -> Result<()> {
        if j < self.m() {
            Ok(())
        } else {
            Err(Error::Index {
                index: j,
                limit: self.m(),
            })
        }
    }

    /// Agents that `i` hears from, excluding itself.
    pub(crate) fn senders(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&k| k != i && self.c.get(i, k))
    }
}

/// `R_j = (V_j  C·V_j  …  Cⁿ⁻¹·V_j)`.
pub fn reachability_matrix(spec: &NetworkSpec, j: usize) -> Result<BoolMat> {
    let n = spec.n();
    let mut col = spec.visibility(j)?;
    let mut r = BoolMat::zeros(n, n);
    for k in 0..n {
        r.set_col(k, &col);
        if k + 1 < n {
            col = spec.c().mul_vec(&col)?;
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityReport {
    pub input: usize,
    pub r_matrix: BoolMat,
    /// `I_j`, the logical sum of the columns of `R_j`.
    pub span: BoolVec,
    pub reachable: Vec<usize>,
    pub unreachable: Vec<usize>,
    /// Breadth-first layers: `layers[k]` holds the agents first reached after
    /// `k` hops from a measuring agent (`layers[0]` are the roots).
    pub layers: Vec<Vec<usize>>,
    /// Visibility diameter: the number of non-empty layers, so the round in
    /// which roots take their own measurement counts as round 1.
    pub kappa: usize,
    pub roots: Vec<usize>,
    pub nu: usize,
}

impl ReachabilityReport {
    pub fn is_complete(&self) -> bool {
        self.unreachable.is_empty()
    }

    /// Hop distance of each agent from the nearest root, `None` if unreachable.
    pub fn depths(&self) -> Vec<Option<usize>> {
        let mut d = vec![None; self.span.len()];
        for (k, layer) in self.layers.iter().enumerate() {
            for &i in layer {
                d[i] = Some(k);
            }
        }
        d
    }
}

pub fn analyze(spec: &NetworkSpec, j: usize) -> Result<ReachabilityReport> {
    let r_matrix = reachability_matrix(spec, j)?;
    let n = spec.n();
    let mut span = BoolVec::zeros(n);
    for k in 0..n {
        span.or_assign(&r_matrix.col(k));
    }

    let roots_vec = spec.visibility(j)?;
    let roots = roots_vec.ones_indices();
    let mut layers = Vec::new();
    let mut reached = roots_vec.clone();
    let mut frontier = roots_vec;
    while !frontier.is_zero() {
        layers.push(frontier.ones_indices());
        // Agents reachable in exactly k+1 steps and not before: C^{k+1}V_j ∧ ¬I_j.
        frontier = spec.c().mul_vec(&frontier)?.and(&reached.not());
        reached.or_assign(&frontier);
    }
    debug_assert_eq!(reached, span);

    let reachable = span.ones_indices();
    let unreachable = span.not().ones_indices();
    Ok(ReachabilityReport {
        input: j,
        r_matrix,
        span,
        reachable,
        unreachable,
        kappa: layers.len(),
        nu: roots.len(),
        roots,
        layers,
    })
}

/// Complete reachability: every agent is reachable from input `j`.
pub fn is_reachable(spec: &NetworkSpec, j: usize) -> Result<bool> {
    Ok(analyze(spec, j)?.is_complete())
}

/// Result of the redundancy fixed point for one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedundantReach {
    pub redundancy: usize,
    /// Secured agents, ascending.
    pub secured: Vec<usize>,
    /// `layers[0]` are the roots; `layers[k]` the agents secured in pass `k`.
    pub layers: Vec<Vec<usize>>,
    pub complete: bool,
}

/// Agents reachable from input `j` with redundancy `r`.
///
/// Roots are secured by their own measurement. Any other agent is secured
/// once it hears from at least `r` already-secured agents; passes are
/// synchronous, so each pass only sees agents secured in earlier passes.
pub fn r_reachable(spec: &NetworkSpec, j: usize, r: usize) -> Result<RedundantReach> {
    if r == 0 {
        return Err(Error::Argument("redundancy must be at least 1".into()));
    }
    let n = spec.n();
    let roots = spec.visibility(j)?;
    let mut secured = roots.clone();
    let mut layers = Vec::new();
    if !roots.is_zero() {
        layers.push(roots.ones_indices());
    }
    loop {
        let fresh: Vec<usize> = (0..n)
            .filter(|&i| !secured.get(i))
            .filter(|&i| spec.senders(i).filter(|&k| secured.get(k)).count() >= r)
            .collect();
        if fresh.is_empty() {
            break;
        }
        for &i in &fresh {
            secured.set(i, true);
        }
        layers.push(fresh);
    }
    Ok(RedundantReach {
        redundancy: r,
        complete: secured.count_ones() == n,
        secured: secured.ones_indices(),
        layers,
    })
}

/// `(secured set, completely r-reachable)`.
pub fn r_reachable_set(spec: &NetworkSpec, j: usize, r: usize) -> Result<(Vec<usize>, bool)> {
    let rr = r_reachable(spec, j, r)?;
    Ok((rr.secured, rr.complete))
}
