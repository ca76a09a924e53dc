mod support;

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stieltjes_core::algebra::{
    make_algebra, multiply, p_norm, parse_fixture, path_algebra, tau_action, AlgebraElement,
    AlgebraError, Arrow, AugmentationMap, Quiver,
};
use stieltjes_core::{Rational, Scalar};
use support::*;

fn labels() -> Vec<String> {
    vec!["u".into(), "v".into(), "w".into()]
}

const FIXTURE_A: &str = include_str!("../../cli/fixtures/algebra_a.alg");
const FIXTURE_B: &str = include_str!("../../cli/fixtures/algebra_b.alg");

#[test]
fn fixtures_are_associative_with_multiplicative_tau() {
    for src in [FIXTURE_A, FIXTURE_B] {
        let fx = parse_fixture(src).unwrap();
        let alg = &fx.algebra;
        assert_eq!(
            oracle_validate(alg.table(), alg.unit_coords()),
            Verdict::Valid
        );
        let tau = fx.tau.expect("fixture declares an augmentation");
        assert!(oracle_tau_ok(alg.table(), alg.unit_coords(), tau.coeffs()));
    }
}

#[test]
fn fixture_b_is_the_quiver_path_algebra() {
    let v = |s: &str| s.to_string();
    let q = Quiver::new(
        vec![v("1"), v("2"), v("3")],
        vec![
            Arrow {
                label: v("alpha"),
                source: v("1"),
                target: v("2"),
            },
            Arrow {
                label: v("beta"),
                source: v("3"),
                target: v("2"),
            },
        ],
    )
    .unwrap();
    let b = parse_fixture(FIXTURE_B).unwrap().algebra;
    assert_eq!(path_algebra(&q).unwrap().table(), b.table());
}

#[test]
fn coordinate_sum_is_not_an_augmentation_of_a() {
    let a = parse_fixture(FIXTURE_A).unwrap().algebra;
    let ones = vec![Rational::from_integer(1.into()); 5];
    assert!(matches!(
        AugmentationMap::new(&a, ones),
        Err(AlgebraError::TauUnit(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Rebased copies of known algebras are accepted; corrupted copies get
    /// exactly the violation a brute-force scan finds first.
    #[test]
    fn random_tables_are_classified(seed in any::<u64>(), which in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = &base_algebras()[which];
        let cols = random_basis(&mut rng);
        let (table, unit, tau) = oracle_rebase(base, &cols);
        prop_assert_eq!(oracle_validate(&table, &unit), Verdict::Valid);
        let alg = make_algebra(labels(), table.clone(), unit.clone());
        prop_assert_eq!(verdict_of(&alg), Some(Verdict::Valid));
        let alg = Arc::new(alg.unwrap());
        prop_assert!(oracle_tau_ok(&table, &unit, &tau));
        prop_assert!(AugmentationMap::new(&alg, tau.clone()).is_ok());

        let (mut bad, mut bad_unit) = (table, unit);
        corrupt(&mut rng, &mut bad, &mut bad_unit);
        let expected = oracle_validate(&bad, &bad_unit);
        let got = make_algebra(labels(), bad, bad_unit);
        prop_assert_eq!(verdict_of(&got), Some(expected));

        let mut bad_tau = tau.clone();
        bad_tau[rng.gen_range(0..3)] += q(1, 2);
        let expect_ok = oracle_tau_ok(alg.table(), alg.unit_coords(), &bad_tau);
        let got = AugmentationMap::new(&alg, bad_tau);
        prop_assert_eq!(got.is_ok(), expect_ok);
        if !expect_ok {
            let reported = matches!(got, Err(AlgebraError::TauUnit(_) | AlgebraError::NotMultiplicative { .. }));
            prop_assert!(reported, "unexpected report {:?}", got.err());
        }
    }
}

fn element(alg: &Arc<stieltjes_core::algebra::Algebra>, coords: &[Rational]) -> AlgebraElement {
    AlgebraElement::from_rationals(alg, coords).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// Norm and module laws on the fixture algebras with exact coordinates.
    #[test]
    fn norm_and_module_laws(seed in any::<u64>(), use_b in any::<bool>(), p_idx in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fx = parse_fixture(if use_b { FIXTURE_B } else { FIXTURE_A }).unwrap();
        let alg = fx.algebra.clone();
        let tau = fx.tau.unwrap();
        let p = [1.0, 2.0, 3.0, f64::INFINITY][p_idx];
        let xs: Vec<Rational> = (0..5).map(|_| rand_q(&mut rng, 6)).collect();
        let ys: Vec<Rational> = (0..5).map(|_| rand_q(&mut rng, 6)).collect();
        let cs: Vec<Rational> = (0..5).map(|_| rand_q(&mut rng, 4)).collect();
        let (x, y, a) = (element(&alg, &xs), element(&alg, &ys), element(&alg, &cs));
        let c = Scalar::Exact(rand_q(&mut rng, 5));

        let nx = p_norm(&x, p).unwrap();
        let ny = p_norm(&y, p).unwrap();
        let nsum = p_norm(&x.add(&y).unwrap(), p).unwrap();
        prop_assert!(nsum.to_f64() <= nx.to_f64() + ny.to_f64() + 1e-12);

        let ncx = p_norm(&x.scale(&c), p).unwrap();
        let want = c.abs() * nx.clone();
        if p == 1.0 || p.is_infinite() {
            prop_assert_eq!(ncx, want);
        } else {
            prop_assert!((ncx.to_f64() - want.to_f64()).abs() <= 1e-9 * (1.0 + want.to_f64()));
        }

        // twisted action a·x = τ(a) x, and the norm law ‖a·x‖ = |τ(a)| ‖x‖
        let t = tau.apply(&a).unwrap();
        let ax = tau_action(&tau, &a, &x).unwrap();
        let expect: Vec<Scalar> = xs.iter().map(|v| &t * &Scalar::Exact(v.clone())).collect();
        prop_assert_eq!(ax.coords(), &expect[..]);
        let nax = p_norm(&ax, p).unwrap().to_f64();
        prop_assert!((nax - t.abs().to_f64() * nx.to_f64()).abs() <= 1e-9 * (1.0 + nax));

        // τ is multiplicative on arbitrary elements
        let ab = multiply(&a, &x).unwrap();
        prop_assert_eq!(tau.apply(&ab).unwrap(), &t * &tau.apply(&x).unwrap());
        // the scalar module: a·s = τ(a)s
        let s = Scalar::Exact(rand_q(&mut rng, 5));
        prop_assert_eq!(tau_action(&tau, &a, &s).unwrap(), &t * &s);
    }
}

#[test]
fn euclidean_norm_example() {
    let a = parse_fixture(FIXTURE_B).unwrap().algebra;
    let x = AlgebraElement::parse(&a, "3*e1 + 4*e2").unwrap();
    assert_eq!(p_norm(&x, 2.0).unwrap(), Scalar::int(5));
}
