mod common;

use common::*;
use logcons::{BoolExpr, BoolMap, BoolMat, BoolVec};
use proptest::prelude::*;

fn triple_loop(a: &BoolMat, b: &BoolMat) -> BoolMat {
    let mut out = BoolMat::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for k in 0..b.cols() {
            let mut acc = false;
            for j in 0..a.cols() {
                acc = acc || (a.get(i, j) && b.get(j, k));
            }
            out.set(i, k, acc);
        }
    }
    out
}

/// ρ(A) = 1 iff some non-zero x satisfies Ax = x (x = 0 satisfies Ax = λx
/// for every λ, so it is excluded).
fn eigen_oracle(a: &BoolMat) -> bool {
    let n = a.rows();
    (1..1u64 << n).any(|bits| {
        let x: Vec<bool> = (0..n).map(|i| (bits >> i) & 1 == 1).collect();
        (0..n).all(|i| (0..n).any(|j| a.get(i, j) && x[j]) == x[i])
    })
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exhaustive search for an ordering making `A` strictly lower triangular
/// (which, by reversal, covers the upper-triangular case).
fn triangularizable(a: &BoolMat) -> bool {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        let mut pos = vec![0; n];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        if (0..n).all(|i| (0..n).all(|j| !a.get(i, j) || pos[j] < pos[i])) {
            return true;
        }
        if !next_permutation(&mut order) {
            return false;
        }
    }
}

#[test]
fn mat_mul_matches_triple_loop() {
    let mut rng = rng(1);
    for _ in 0..200 {
        let a = random_mat(&mut rng, 6, 6, 0.3);
        let b = random_mat(&mut rng, 6, 6, 0.3);
        assert_eq!(a.mul(&b).unwrap(), triple_loop(&a, &b));
    }
    // Non-square and multi-word shapes.
    for _ in 0..20 {
        let a = random_mat(&mut rng, 7, 70, 0.1);
        let b = random_mat(&mut rng, 70, 3, 0.1);
        assert_eq!(a.mul(&b).unwrap(), triple_loop(&a, &b));
    }
}

#[test]
fn spectral_radius_agrees_with_eigen_oracle() {
    let mut rng = rng(2);
    for _ in 0..1000 {
        let n = rng_range(&mut rng, 1, 5);
        let density = [0.1, 0.2, 0.35][n % 3];
        let a = random_mat(&mut rng, n, n, density);
        assert_eq!(a.spectral_radius().unwrap(), eigen_oracle(&a), "{a:?}");
    }
    for n in 1..=3usize {
        for bits in 0..1u64 << (n * n) {
            let mut a = BoolMat::zeros(n, n);
            for k in 0..n * n {
                a.set(k / n, k % n, (bits >> k) & 1 == 1);
            }
            assert_eq!(a.spectral_radius().unwrap(), eigen_oracle(&a), "{a:?}");
        }
    }
}

fn rng_range(rng: &mut rand_chacha::ChaCha8Rng, lo: usize, hi: usize) -> usize {
    use rand::Rng;
    rng.gen_range(lo..=hi)
}

#[test]
fn nilpotency_triangularity_and_radius_coincide() {
    let mut rng = rng(3);
    for _ in 0..300 {
        let n = rng_range(&mut rng, 1, 7);
        let a = random_mat(&mut rng, n, n, 0.15);
        let rho_zero = !a.spectral_radius().unwrap();
        assert_eq!(rho_zero, a.pow(n).unwrap().is_zero());
        assert_eq!(rho_zero, triangularizable(&a), "{a:?}");
    }
}

/// Map whose components only read variables earlier in a random order, so
/// its incidence matrix is permutation-triangular.
fn random_acyclic_map(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> BoolMap {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut comps = vec![BoolExpr::Const(false); n];
    for (k, &i) in order.iter().enumerate() {
        let vars: Vec<BoolExpr> = order[..k].iter().map(|&s| BoolExpr::state(s)).collect();
        comps[i] = random_expr(rng, &vars, 2);
    }
    BoolMap::autonomous(comps).unwrap()
}

#[test]
fn globally_convergent_maps_reach_unique_equilibrium_within_horizon() {
    let mut rng = rng(4);
    let none = BoolVec::zeros(0);
    let mut checked = 0;
    for round in 0..60 {
        let n = if round % 20 == 0 {
            16
        } else {
            rng_range(&mut rng, 1, 10)
        };
        let f = random_acyclic_map(&mut rng, n);
        let (ok, q) = f.is_globally_convergent().unwrap();
        assert!(ok, "acyclic construction must be convergent");
        let q = q.unwrap();
        assert!(q <= n);
        let fixed = f.iterate(&BoolVec::zeros(n), &none, q);
        assert!(f.is_equilibrium(&fixed, &none));
        for bits in 0..1u64 << n {
            let x = BoolVec::from_u64(n, bits);
            assert_eq!(f.iterate(&x, &none, q), fixed);
        }
        checked += 1;
    }
    assert_eq!(checked, 60);
}

#[test]
fn attractive_equilibria_absorb_their_neighbourhood() {
    let mut rng = rng(5);
    let none = BoolVec::zeros(0);
    let mut attractive = 0;
    for _ in 0..400 {
        let n = rng_range(&mut rng, 1, 6);
        let vars: Vec<BoolExpr> = (0..n).map(BoolExpr::state).collect();
        let comps = (0..n).map(|_| random_expr(&mut rng, &vars, 2)).collect();
        let f = BoolMap::autonomous(comps).unwrap();
        for x in f.equilibria(&none).unwrap() {
            if !f.is_attractive(&x, &none).unwrap() {
                continue;
            }
            attractive += 1;
            let vnn: Vec<BoolVec> = std::iter::once(x.clone())
                .chain((0..n).map(|j| x.flipped(j)))
                .collect();
            for y in &vnn {
                // F maps the neighbourhood into itself...
                assert!(vnn.contains(&f.apply(y, &none)));
                // ...and reaches x within n steps.
                assert_eq!(f.iterate(y, &none, n), x);
            }
        }
    }
    assert!(attractive > 20, "too few attractive samples: {attractive}");
}

#[test]
fn derivative_matches_naive_evaluation() {
    let mut rng = rng(6);
    for _ in 0..200 {
        let n = rng_range(&mut rng, 1, 6);
        let m = rng_range(&mut rng, 0, 2);
        let mut vars: Vec<BoolExpr> = (0..n).map(BoolExpr::state).collect();
        vars.extend((0..m).map(BoolExpr::input));
        let comps = (0..n).map(|_| random_expr(&mut rng, &vars, 3)).collect();
        let f = BoolMap::new(n, m, comps).unwrap();
        let x = random_vec(&mut rng, n, 0.5);
        let u = random_vec(&mut rng, m, 0.5);
        let d = f.discrete_derivative(&x, &u);
        let (xs, us) = (bools(&x), bools(&u));
        for j in 0..n {
            let mut xj = xs.clone();
            xj[j] = !xj[j];
            for i in 0..n {
                let c = f.component(i);
                assert_eq!(
                    d.get(i, j),
                    naive_eval(c, &xs, &us) != naive_eval(c, &xj, &us)
                );
            }
        }
    }
}

#[test]
fn semantic_incidence_is_union_of_derivatives() {
    let mut rng = rng(7);
    for _ in 0..100 {
        let n = rng_range(&mut rng, 1, 8);
        let m = rng_range(&mut rng, 0, 12 - n);
        let mut vars: Vec<BoolExpr> = (0..n).map(BoolExpr::state).collect();
        vars.extend((0..m).map(BoolExpr::input));
        let comps = (0..n).map(|_| random_expr(&mut rng, &vars, 3)).collect();
        let f = BoolMap::new(n, m, comps).unwrap();
        let mut union = BoolMat::zeros(n, n);
        for ub in 0..1u64 << m {
            let u = BoolVec::from_u64(m, ub);
            for xb in 0..1u64 << n {
                union = union
                    .or(&f.discrete_derivative(&BoolVec::from_u64(n, xb), &u))
                    .unwrap();
            }
        }
        assert_eq!(f.state_incidence(), union);
        // Semantic dependence never exceeds syntactic occurrence.
        assert!(f.incidence_matrix().le(&f.structural_incidence()).unwrap());
    }
}

proptest! {
    #[test]
    fn power_is_repeated_product(bits in proptest::collection::vec(any::<bool>(), 25), k in 0usize..7) {
        let mut a = BoolMat::zeros(5, 5);
        for (idx, b) in bits.iter().enumerate() {
            a.set(idx / 5, idx % 5, *b);
        }
        let mut expected = BoolMat::identity(5);
        for _ in 0..k {
            expected = triple_loop(&expected, &a);
        }
        prop_assert_eq!(a.pow(k).unwrap(), expected);
    }

    #[test]
    fn matrix_text_roundtrip(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let a = random_mat(&mut r, rows, cols, 0.5);
        prop_assert_eq!(BoolMat::parse_text(&a.to_text()).unwrap(), a);
    }
}
