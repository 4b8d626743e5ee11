#![allow(dead_code)]

use logcons::{BoolExpr, BoolMat, BoolVec, NetworkSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> BoolMat {
    let mut m = BoolMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rng.gen_bool(density));
        }
    }
    m
}

pub fn random_vec(rng: &mut ChaCha8Rng, len: usize, density: f64) -> BoolVec {
    (0..len).map(|_| rng.gen_bool(density)).collect()
}

/// Random expression over the given variables (state indices first, then
/// inputs offset by `n_state` in `vars`).
pub fn random_expr(rng: &mut ChaCha8Rng, vars: &[BoolExpr], depth: usize) -> BoolExpr {
    if vars.is_empty() {
        return BoolExpr::Const(rng.gen_bool(0.5));
    }
    if depth == 0 || rng.gen_bool(0.3) {
        let leaf = vars[rng.gen_range(0..vars.len())].clone();
        return if rng.gen_bool(0.3) {
            BoolExpr::not(leaf)
        } else {
            leaf
        };
    }
    let k = rng.gen_range(2..=3);
    let children: Vec<BoolExpr> = (0..k).map(|_| random_expr(rng, vars, depth - 1)).collect();
    let e = if rng.gen_bool(0.5) {
        BoolExpr::and(children)
    } else {
        BoolExpr::or(children)
    };
    if rng.gen_bool(0.15) {
        BoolExpr::not(e)
    } else {
        e
    }
}

/// Reference evaluator written independently of `BoolExpr::eval`.
pub fn naive_eval(e: &BoolExpr, state: &[bool], input: &[bool]) -> bool {
    match e {
        BoolExpr::Const(b) => *b,
        BoolExpr::StateVar(i) => state[*i],
        BoolExpr::InputVar(j) => input[*j],
        BoolExpr::And(cs) => {
            let mut acc = true;
            for c in cs {
                acc &= naive_eval(c, state, input);
            }
            acc
        }
        BoolExpr::Or(cs) => {
            let mut acc = false;
            for c in cs {
                acc |= naive_eval(c, state, input);
            }
            acc
        }
        BoolExpr::Not(c) => !naive_eval(c, state, input),
    }
}

pub fn bools(v: &BoolVec) -> Vec<bool> {
    v.iter().collect()
}

/// Single-input spec; retried until `accept` holds.
pub fn random_spec_where(
    rng: &mut ChaCha8Rng,
    n: usize,
    c_density: f64,
    v_density: f64,
    accept: impl Fn(&NetworkSpec) -> bool,
) -> NetworkSpec {
    loop {
        let c = random_mat(rng, n, n, c_density);
        let v = random_vec(rng, n, v_density);
        let spec = NetworkSpec::single_input(c, &v).unwrap();
        if accept(&spec) {
            return spec;
        }
    }
}

/// Agents reachable from the roots, by breadth-first search over adjacency
/// lists built from the transpose of `C` (edge k → i when `C(i,k) = 1`).
pub fn bfs_reachable(c: &BoolMat, roots: &[usize]) -> Vec<usize> {
    let n = c.rows();
    let mut out_edges = vec![Vec::new(); n];
    for i in 0..n {
        for (k, edges) in out_edges.iter_mut().enumerate() {
            if c.get(i, k) {
                edges.push(i);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for &r in roots {
        seen[r] = true;
        queue.push_back(r);
    }
    while let Some(k) = queue.pop_front() {
        for &i in &out_edges[k] {
            if !seen[i] {
                seen[i] = true;
                queue.push_back(i);
            }
        }
    }
    (0..n).filter(|&i| seen[i]).collect()
}
