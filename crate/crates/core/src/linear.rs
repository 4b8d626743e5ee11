//! Message- and round-optimal linear consensus by breadth-first input propagation.
//!
//! Every agent reached at hop `k` is fed by exactly one agent reached at hop
//! `k - 1`, which yields a forest of input-propagating spanning trees rooted
//! at the measuring agents. The resulting update is
//! `x(t+1) = F·x(t) + B·u_j(t)`.

use crate::bits::BoolVec;
use crate::error::{Error, Result};
use crate::expr::BoolExpr;
use crate::map::BoolMap;
use crate::matrix::BoolMat;
use crate::reachability::{analyze, NetworkSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub input: usize,
    pub n_input: usize,
    /// Iteration matrix in original agent order.
    pub f: BoolMat,
    /// Input column in original agent order.
    pub b: BoolVec,
    /// `parent[i]`: the agent `i` copies, `None` for roots and unreachable agents.
    pub parent: Vec<Option<usize>>,
    /// Permutation listing agents tree by tree (deepest tree first), each tree
    /// in hop order, unreachable agents last. `Pᵀ·F·P` is block-diagonal and
    /// strictly lower triangular.
    pub p: BoolMat,
    pub order: Vec<usize>,
    /// `(root, κ_i)` sorted by `κ_i` descending, then root index.
    pub kappa_per_root: Vec<(usize, usize)>,
    /// Visibility diameter: the largest `κ_i`.
    pub rounds: usize,
    pub unreachable: Vec<usize>,
}

impl LinearSystem {
    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// True when some agents could not be reached and were left inert.
    pub fn has_unreachable(&self) -> bool {
        !self.unreachable.is_empty()
    }

    /// Edges of `C` kept by the synthesis, i.e. the selection applied to `C`.
    pub fn selection(&self) -> &BoolMat {
        &self.f
    }

    /// `Pᵀ·F·P`.
    pub fn permuted_f(&self) -> BoolMat {
        self.p
            .transpose()
            .mul(&self.f)
            .and_then(|m| m.mul(&self.p))
            .expect("square permutation")
    }

    /// `Pᵀ·B`.
    pub fn permuted_b(&self) -> BoolVec {
        self.p
            .transpose()
            .mul_vec(&self.b)
            .expect("square permutation")
    }

    pub fn is_reachable_agent(&self, i: usize) -> bool {
        self.b.get(i) || self.parent[i].is_some()
    }

    /// One synchronous round. Unreachable agents keep their state.
    pub fn step(&self, x: &BoolVec, u: bool) -> BoolVec {
        (0..self.n())
            .map(|i| {
                if self.b.get(i) {
                    u
                } else if let Some(p) = self.parent[i] {
                    x.get(p)
                } else {
                    x.get(i)
                }
            })
            .collect()
    }

    /// Component `i` is the sum of the state variables in row `i` of `F`
    /// plus the input if `B(i) = 1`; unreachable agents hold their own state.
    pub fn to_bool_map(&self) -> BoolMap {
        let n = self.n();
        let components = (0..n)
            .map(|i| {
                let mut terms: Vec<BoolExpr> = self
                    .f
                    .row(i)
                    .ones_indices()
                    .into_iter()
                    .map(BoolExpr::state)
                    .collect();
                if self.b.get(i) {
                    terms.push(BoolExpr::input(self.input));
                }
                if terms.is_empty() {
                    BoolExpr::state(i)
                } else {
                    BoolExpr::or(terms)
                }
            })
            .collect();
        BoolMap::new(n, self.n_input, components).expect("synthesised map is well-formed")
    }
}

/// Synthesises the optimal linear consensus rule for input `j`.
///
/// Agents unreachable from the input get zero rows in `(F | B)` and are
/// listed in [`LinearSystem::unreachable`].
pub fn synthesize_linear(spec: &NetworkSpec, j: usize) -> Result<LinearSystem> {
    let rep = analyze(spec, j)?;
    if rep.roots.is_empty() {
        return Err(Error::NoRoot { input: j });
    }
    let n = spec.n();
    let mut f = BoolMat::zeros(n, n);
    let b = spec.visibility(j)?;
    let mut parent = vec![None; n];
    let mut tree_of = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    for &r in &rep.roots {
        tree_of[r] = r;
        depth[r] = 0;
    }

    for k in 1..rep.layers.len() {
        let prev = &rep.layers[k - 1];
        for &i in &rep.layers[k] {
            // Layers are sorted, so the first audible agent of the previous
            // layer is the lowest-index admissible parent.
            let p = *prev
                .iter()
                .find(|&&p| spec.c().get(i, p))
                .expect("every layer-k agent hears from layer k-1");
            f.set(i, p, true);
            parent[i] = Some(p);
            tree_of[i] = tree_of[p];
            depth[i] = k;
        }
    }

    let mut kappa_per_root: Vec<(usize, usize)> = rep
        .roots
        .iter()
        .map(|&r| {
            let deepest = (0..n).filter(|&i| tree_of[i] == r).map(|i| depth[i]).max();
            (r, deepest.unwrap_or(0) + 1)
        })
        .collect();
    kappa_per_root.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut order = Vec::with_capacity(n);
    for &(r, _) in &kappa_per_root {
        let mut members: Vec<usize> = (0..n).filter(|&i| tree_of[i] == r).collect();
        members.sort_by_key(|&i| (depth[i], i));
        order.extend(members);
    }
    order.extend(rep.unreachable.iter().copied());
    let p = BoolMat::permutation(&order)?;

    Ok(LinearSystem {
        input: j,
        n_input: spec.m(),
        f,
        b,
        parent,
        p,
        order,
        rounds: rep.kappa,
        kappa_per_root,
        unreachable: rep.unreachable,
    })
}
