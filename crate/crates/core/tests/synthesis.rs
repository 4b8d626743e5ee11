mod common;

use common::*;
use logcons::simulator::{check_fault_tolerance, PackedRule};
use logcons::{
    analyze, is_reachable, r_reachable, synthesize_linear, synthesize_robust, BoolMat, BoolVec,
    RobustRule,
};
use rand::Rng;

#[test]
fn linear_systems_satisfy_structural_invariants() {
    let mut rng = rng(21);
    for _ in 0..150 {
        let n = rng.gen_range(1..=12);
        let spec = random_spec_where(&mut rng, n, 0.25, 0.2, |s| {
            !s.visibility(0).unwrap().is_zero()
        });
        let sys = synthesize_linear(&spec, 0).unwrap();
        let rep = analyze(&spec, 0).unwrap();

        assert!(sys.f.le(spec.c()).unwrap());
        assert!(sys.b.le(&spec.visibility(0).unwrap()));
        for i in 0..n {
            let ones = sys.f.row_count_ones(i) + sys.b.get(i) as usize;
            if rep.unreachable.contains(&i) {
                assert_eq!(ones, 0);
            } else {
                assert_eq!(ones, 1, "agent {i}");
                if rep.roots.contains(&i) {
                    assert!(sys.b.get(i));
                }
            }
        }
        // Message minimality.
        assert_eq!(sys.f.count_ones() + sys.b.count_ones(), rep.reachable.len());
        assert_eq!(sys.rounds, rep.kappa);
        assert_eq!(
            sys.kappa_per_root.iter().map(|&(_, k)| k).max().unwrap(),
            rep.kappa
        );

        // Pᵀ F P is strictly lower triangular and has no edges across trees.
        let pf = sys.permuted_f();
        let tree_start: Vec<usize> = sys
            .order
            .iter()
            .map(|&i| {
                let mut a = i;
                while let Some(p) = sys.parent[a] {
                    a = p;
                }
                a
            })
            .collect();
        for r in 0..n {
            for c in 0..n {
                if pf.get(r, c) {
                    assert!(c < r, "not strictly lower triangular");
                    assert_eq!(tree_start[r], tree_start[c], "edge across trees");
                }
            }
        }

        // The map's incidence equals (F | B) on reachable rows.
        let map = sys.to_bool_map();
        let inc = map.incidence_matrix();
        let fb = sys.f.hcat(&BoolMat::from_column(&sys.b)).unwrap();
        for &i in &rep.reachable {
            assert_eq!(inc.row(i), fb.row(i));
        }
    }
}

#[test]
fn linear_systems_are_compliant_and_contractive() {
    let mut rng = rng(22);
    for _ in 0..100 {
        let n = rng.gen_range(1..=12);
        let spec = random_spec_where(&mut rng, n, 0.3, 0.2, |s| is_reachable(s, 0).unwrap());
        let sys = synthesize_linear(&spec, 0).unwrap();
        let map = sys.to_bool_map();
        assert!(map.is_compliant(spec.c(), spec.v()).unwrap());
        let (ok, q) = map.is_globally_convergent().unwrap();
        assert!(ok);
        assert!(q.unwrap() <= sys.rounds);
    }
}

#[test]
fn linear_systems_converge_exhaustively_within_rounds() {
    let mut rng = rng(23);
    for _ in 0..60 {
        let n = rng.gen_range(1..=12);
        let spec = random_spec_where(&mut rng, n, 0.25, 0.15, |s| is_reachable(s, 0).unwrap());
        let sys = synthesize_linear(&spec, 0).unwrap();
        let packed = PackedRule::from_linear(&sys);
        let all = (1u64 << n) - 1;
        for u in [false, true] {
            let target = if u { all } else { 0 };
            for x0 in 0..=all {
                let mut x = x0;
                for _ in 0..sys.rounds {
                    x = packed.step(x, u);
                }
                assert_eq!(x, target);
                assert_eq!(packed.step(x, u), x);
            }
        }
    }
}

fn r_reachable_spec(
    rng: &mut rand_chacha::ChaCha8Rng,
    n: usize,
    gamma: usize,
) -> logcons::NetworkSpec {
    random_spec_where(rng, n, 0.75, 0.5, |s| {
        r_reachable(s, 0, 2 * gamma + 1).unwrap().complete
    })
}

#[test]
fn robust_rules_are_full_majorities_over_audible_sources() {
    let mut rng = rng(24);
    for _ in 0..100 {
        let gamma = rng.gen_range(0..=2);
        let n = rng.gen_range(2 * gamma + 1..=10);
        let spec = r_reachable_spec(&mut rng, n, gamma);
        let sys = synthesize_robust(&spec, 0, gamma).unwrap();
        assert_eq!(sys.r, 2 * gamma + 1);
        for (i, rule) in sys.rules.iter().enumerate() {
            match rule {
                RobustRule::DirectRead => assert!(spec.v().get(i, 0)),
                RobustRule::Majority { sources } => {
                    assert_eq!(sources.len(), sys.r);
                    let mut dedup = sources.clone();
                    dedup.dedup();
                    assert_eq!(dedup.len(), sys.r);
                    for &s in sources {
                        assert!(spec.c().get(i, s) && s != i);
                    }
                    let terms = sys.terms(i);
                    let expected = binomial(sys.r, gamma + 1);
                    assert_eq!(terms.len(), expected);
                    assert!(terms.iter().all(|t| t.len() == gamma + 1));
                }
            }
        }
        assert!(sys.to_bool_map().is_compliant(spec.c(), spec.v()).unwrap());
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn robust_maps_have_unique_equilibrium() {
    let mut rng = rng(25);
    for _ in 0..40 {
        let gamma = rng.gen_range(1..=2);
        let n = rng.gen_range(2 * gamma + 2..=12);
        let spec = r_reachable_spec(&mut rng, n, gamma);
        let map = synthesize_robust(&spec, 0, gamma).unwrap().to_bool_map();
        for u in [false, true] {
            let eq = map.equilibria(&BoolVec::from_bools(&[u])).unwrap();
            let expected = if u {
                BoolVec::ones(n)
            } else {
                BoolVec::zeros(n)
            };
            assert_eq!(eq, vec![expected]);
        }
    }
}

#[test]
fn robust_derivative_vanishes_near_consensus() {
    // Within Hamming distance γ - 1 of 1ₙu, one further flip still leaves at
    // most γ wrong sources, so no component can change.
    let mut rng = rng(26);
    for _ in 0..40 {
        let gamma = rng.gen_range(1..=2);
        let n = rng.gen_range(2 * gamma + 2..=10);
        let spec = r_reachable_spec(&mut rng, n, gamma);
        let sys = synthesize_robust(&spec, 0, gamma).unwrap();
        let map = sys.to_bool_map();
        for u in [false, true] {
            let uv = BoolVec::from_bools(&[u]);
            let star = if u {
                BoolVec::ones(n)
            } else {
                BoolVec::zeros(n)
            };
            assert!(map.is_attractive(&star, &uv).unwrap());
            for bits in 0..1u64 << n {
                let x = star.xor(&BoolVec::from_u64(n, bits));
                if x.hamming(&star) < gamma {
                    assert!(map.discrete_derivative(&x, &uv).is_zero());
                }
            }
        }
    }
}

#[test]
fn robust_systems_tolerate_gamma_stuck_agents() {
    let mut rng = rng(27);
    for _ in 0..20 {
        let n = 8;
        let spec = r_reachable_spec(&mut rng, n, 1);
        let sys = synthesize_robust(&spec, 0, 1).unwrap();
        assert_eq!(
            check_fault_tolerance(&PackedRule::from_robust(&sys), 1),
            None
        );
    }
}

#[test]
fn packed_robust_step_matches_map() {
    let mut rng = rng(28);
    for _ in 0..30 {
        let gamma = rng.gen_range(0..=2);
        let n = rng.gen_range(2 * gamma + 1..=9);
        let spec = r_reachable_spec(&mut rng, n, gamma);
        let sys = synthesize_robust(&spec, 0, gamma).unwrap();
        let packed = PackedRule::from_robust(&sys);
        let map = sys.to_bool_map();
        for bits in 0..1u64 << n {
            for u in [false, true] {
                let want = map.apply(&BoolVec::from_u64(n, bits), &BoolVec::from_bools(&[u]));
                assert_eq!(packed.step(bits, u), want.to_u64());
                assert_eq!(sys.step(&BoolVec::from_u64(n, bits), u), want);
            }
        }
    }
}
