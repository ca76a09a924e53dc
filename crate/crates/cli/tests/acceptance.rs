//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the verdicts are
//! always printed.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stieltjes_cli::example37;
use stieltjes_cli::stieltjes::{
    ls_integrate, rs_integrate, substitution_check, unary_integrand, TagRule,
};
use stieltjes_core::algebra::{
    make_algebra, multiply, p_norm, parse_fixture, tau_action, AlgebraElement, AugmentationMap,
};
use stieltjes_core::func::{PointFn, UnaryFn};
use stieltjes_core::integrator::{
    commuting_square_check, integrate, t_level, ConvergenceTrace, Integrand, IntegratorConfig,
};
use stieltjes_core::measure::{Measure, PhiModel};
use stieltjes_core::region::{BoxSet, CoordBox, OrderedInterval, Region};
use stieltjes_core::step::step_norm;
use stieltjes_core::transport::{
    theorem35_check, verify_measure_preserving, TransportKind, TransportMap, VerifyOptions,
};
use stieltjes_core::{Rational, Scalar};
use support::*;

const FIXTURE_A: &str = include_str!("../fixtures/algebra_a.alg");
const FIXTURE_B: &str = include_str!("../fixtures/algebra_b.alg");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// A measure with an independent box oracle and the tolerance it is held to.
type MeasureCase<'a> = (Measure, Box<dyn Fn(&CoordBox) -> Rational + 'a>, f64);

/// Integrand, its coefficients, `F`, its coefficients and `F⁻¹`.
type SubstCase<'a> = (&'a str, &'a [i64], &'a str, &'a [i64], &'a str);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_cfg() -> IntegratorConfig {
    IntegratorConfig {
        exact: true,
        ..IntegratorConfig::default()
    }
}

fn float_cfg(tolerance: f64, max_level: u32) -> IntegratorConfig {
    IntegratorConfig {
        tolerance,
        max_level,
        ..IntegratorConfig::default()
    }
}

fn three_halves() -> Scalar {
    Scalar::ratio(3, 2)
}

fn example_exact() -> Outcome {
    let start = Instant::now();
    let r = example37::run(&exact_cfg()).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(r.side_a.value == three_halves(), || {
        format!("side A = {}", r.side_a.value)
    })?;
    ensure(r.side_b.value == three_halves(), || {
        format!("side B = {}", r.side_b.value)
    })?;
    ensure(r.change_of_measure.difference.is_zero(), || {
        "transported sides differ".into()
    })?;
    ensure(r.agree() && r.converged(), || {
        "report does not agree".into()
    })?;
    ensure(r.to_string().ends_with("3/2 == 3/2"), || r.to_string())?;
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!("3/2 on both algebras, exact, {took:.2?}"))
}

fn bochner_scalar() -> Outcome {
    let exact = example37::run(&exact_cfg()).map_err(|e| e.to_string())?;
    ensure(
        exact.scalar_a == three_halves() && exact.scalar_b == three_halves(),
        || format!("exact scalars {} and {}", exact.scalar_a, exact.scalar_b),
    )?;
    let float = example37::run(&float_cfg(1e-12, 20)).map_err(|e| e.to_string())?;
    for s in [&float.scalar_a, &float.scalar_b] {
        ensure((s.to_f64() - 1.5).abs() <= 1e-9, || {
            format!("float scalar {s}")
        })?;
    }
    ensure(
        float.bochner_a.converged() && float.bochner_b.converged(),
        || "float Bochner not converged".into(),
    )?;
    Ok(format!(
        "exact 3/2 and 3/2; float {:.15} and {:.15}",
        float.scalar_a.to_f64(),
        float.scalar_b.to_f64()
    ))
}

/// `∫_0^1 f(x) F'(x) dx` for polynomial coefficient lists (constant first).
fn poly_oracle(f: &[i64], big_f: &[i64]) -> Rational {
    let deriv: Vec<i64> = big_f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as i64 * c)
        .collect();
    let mut total = zero();
    for (i, a) in f.iter().enumerate() {
        for (j, b) in deriv.iter().enumerate() {
            total += q(a * b, (i + j + 1) as i64);
        }
    }
    total
}

fn substitution() -> Outcome {
    let cases: [SubstCase; 3] = [
        ("x", &[0, 1], "x^2", &[0, 0, 1], "sqrt(x)"),
        ("1", &[1], "2*x", &[0, 2], "x/2"),
        ("x^2", &[0, 0, 1], "x^3", &[0, 0, 0, 1], "x^(1/3)"),
    ];
    let cfg = float_cfg(1e-9, 24);
    let start = Instant::now();
    let mut shown = Vec::new();
    for (fs, fc, big_fs, big_fc, inv) in cases {
        let f = unary_integrand(&UnaryFn::parse(fs).unwrap());
        let big_f = UnaryFn::parse(big_fs).unwrap();
        let inv = UnaryFn::parse(inv).unwrap();
        let r = substitution_check(&f, &big_f, Some(&inv), &zero(), &one(), &cfg)
            .map_err(|e| e.to_string())?;
        let want = Scalar::Exact(poly_oracle(fc, big_fc)).to_f64();
        let (l, rr) = (r.lhs.value.to_f64(), r.rhs.value.to_f64());
        ensure(r.converged(), || format!("({fs}, {big_fs}) not converged"))?;
        ensure((l - rr).abs() <= 1e-6, || {
            format!("({fs}, {big_fs}): sides {l} vs {rr}")
        })?;
        ensure(
            (l - want).abs() <= 1e-6 && (rr - want).abs() <= 1e-6,
            || format!("({fs}, {big_fs}): {l}, {rr} vs oracle {want}"),
        )?;
        shown.push(format!("({fs},{big_fs})={want:.6}"));
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("{} in {took:.2?}", shown.join(" ")))
}

fn rs_ls_bridge() -> Outcome {
    let phi = PhiModel::continuous(UnaryFn::parse("x^2").unwrap(), zero(), one()).unwrap();
    let f = UnaryFn::parse("x").unwrap();
    let cfg = float_cfg(1e-9, 24);
    let rs = rs_integrate(&f, &phi, TagRule::Midpoint, &cfg).map_err(|e| e.to_string())?;
    let ls = ls_integrate(&unary_integrand(&f), &phi, &cfg).map_err(|e| e.to_string())?;

    let region = Region::unit_cube(1);
    let t = TransportMap::coordinatewise(
        region.clone(),
        region,
        vec![UnaryFn::parse("x^2").unwrap()],
        vec![UnaryFn::parse("sqrt(x)").unwrap()],
        UnaryFn::identity(),
        TransportKind::Bijection,
    )
    .map_err(|e| e.to_string())?;
    let moved = theorem35_check(
        &unary_integrand(&f),
        &t,
        &Measure::stieltjes(phi),
        &Measure::Lebesgue,
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    let vals = [
        rs.value.to_f64(),
        ls.value.to_f64(),
        moved.rhs.value.to_f64(),
    ];
    for v in vals {
        ensure((v - 2.0 / 3.0).abs() <= 1e-6, || {
            format!("value {v} vs 2/3")
        })?;
    }
    Ok(format!(
        "rs {:.9}, ls {:.9}, transported {:.9}",
        vals[0], vals[1], vals[2]
    ))
}

fn algebra_tables() -> Outcome {
    for src in [FIXTURE_A, FIXTURE_B] {
        let fx = parse_fixture(src).map_err(|e| e.to_string())?;
        let alg = &fx.algebra;
        ensure(
            oracle_validate(alg.table(), alg.unit_coords()) == Verdict::Valid,
            || "fixture invalid".into(),
        )?;
        let tau = fx.tau.ok_or("fixture lacks tau")?;
        ensure(
            oracle_tau_ok(alg.table(), alg.unit_coords(), tau.coeffs()),
            || "fixture tau".into(),
        )?;
    }
    let labels = || vec!["u".to_string(), "v".into(), "w".into()];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bases = base_algebras();
    let mut rejected = 0;
    for case in 0..100 {
        let base = &bases[case % bases.len()];
        let (table, unit, tau) = oracle_rebase(base, &random_basis(&mut rng));
        let alg = make_algebra(labels(), table.clone(), unit.clone());
        ensure(verdict_of(&alg) == Some(Verdict::Valid), || {
            format!("case {case}: valid table rejected")
        })?;
        let alg = Arc::new(alg.unwrap());
        ensure(AugmentationMap::new(&alg, tau).is_ok(), || {
            format!("case {case}: tau rejected")
        })?;
        let (mut bad, mut bad_unit) = (table, unit);
        corrupt(&mut rng, &mut bad, &mut bad_unit);
        let want = oracle_validate(&bad, &bad_unit);
        let got = verdict_of(&make_algebra(labels(), bad, bad_unit));
        ensure(got == Some(want.clone()), || {
            format!("case {case}: got {got:?}, oracle {want:?}")
        })?;
        rejected += usize::from(want != Verdict::Valid);
    }
    Ok(format!(
        "fixtures valid; 100 tables classified, {rejected} corruptions rejected"
    ))
}

fn norm_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fixtures = [
        parse_fixture(FIXTURE_A).unwrap(),
        parse_fixture(FIXTURE_B).unwrap(),
    ];
    let region = Region::unit_cube(1);
    for case in 0..500 {
        let fx = &fixtures[case % 2];
        let (alg, tau) = (&fx.algebra, fx.tau.as_ref().unwrap());
        let p = [1.0, 2.0, 3.0, f64::INFINITY][rng.gen_range(0..4)];
        let el = |rng: &mut ChaCha8Rng, r| {
            let c: Vec<Rational> = (0..5).map(|_| rand_q(rng, r)).collect();
            AlgebraElement::from_rationals(alg, &c).unwrap()
        };
        let (x, y, a) = (el(&mut rng, 6), el(&mut rng, 6), el(&mut rng, 4));
        let c = Scalar::Exact(rand_q(&mut rng, 5));
        let n = |v: &AlgebraElement| p_norm(v, p).unwrap().to_f64();
        let t = tau.apply(&a).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + y.abs());
        ensure(n(&x.add(&y).unwrap()) <= n(&x) + n(&y) + 1e-12, || {
            format!("case {case}: triangle")
        })?;
        ensure(close(n(&x.scale(&c)), c.abs().to_f64() * n(&x)), || {
            format!("case {case}: homogeneity")
        })?;
        let ax = tau_action(tau, &a, &x).unwrap();
        ensure(close(n(&ax), t.abs().to_f64() * n(&x)), || {
            format!("case {case}: |tau(a)| law")
        })?;
        ensure(
            tau.apply(&multiply(&a, &x).unwrap()).unwrap() == &t * &tau.apply(&x).unwrap(),
            || format!("case {case}: tau not multiplicative"),
        )?;
        // the same law for step functions under the p-norm
        let f = random_step_upto(&mut rng, &region, 2);
        let pf = if p.is_infinite() { 1.0 } else { p };
        let nf = step_norm(&f, pf, &Measure::Lebesgue).unwrap().to_f64();
        let naf = step_norm(&tau_action(tau, &a, &f).unwrap(), pf, &Measure::Lebesgue)
            .unwrap()
            .to_f64();
        ensure(close(naf, t.abs().to_f64() * nf), || {
            format!("case {case}: step-function |tau(a)| law")
        })?;
    }
    Ok("500 cases: triangle, homogeneity, |tau(a)| law".into())
}

fn step_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fx = parse_fixture(FIXTURE_A).unwrap();
    let tau = fx.tau.unwrap();
    for case in 0..500 {
        let dim = 1 + case % 3;
        let region = Region::unit_cube(dim);
        let max_u = if dim == 3 { 1 } else { 2 };
        let f = random_step_upto(&mut rng, &region, max_u);
        let g = random_step_upto(&mut rng, &region, max_u);
        let phi_def = PhiOracle::random(&mut rng, true);
        let use_phi = rng.gen_bool(0.5);
        let m = if use_phi {
            Measure::stieltjes(phi_def.model())
        } else {
            Measure::Lebesgue
        };
        let oracle = |b: &CoordBox| {
            if use_phi {
                b.sides().iter().map(|s| phi_def.interval(s)).product()
            } else {
                lebesgue_box(b)
            }
        };
        let tf = t_level(&f, &m).unwrap();
        let tg = t_level(&g, &m).unwrap();
        ensure(tf == Scalar::Exact(oracle_integral(&f, oracle)), || {
            format!("case {case}: oracle")
        })?;
        let (a, b) = (
            Scalar::Exact(rand_q(&mut rng, 4)),
            Scalar::Exact(rand_q(&mut rng, 4)),
        );
        let combo = f.scale(&a).add(&g.scale(&b)).unwrap();
        ensure(
            t_level(&combo, &m).unwrap() == &(&a * &tf) + &(&b * &tg),
            || format!("case {case}: linearity"),
        )?;
        let coords: Vec<Rational> = (0..5).map(|_| rand_q(&mut rng, 3)).collect();
        let el = AlgebraElement::from_rationals(&fx.algebra, &coords).unwrap();
        ensure(
            t_level(&tau_action(&tau, &el, &f).unwrap(), &m).unwrap()
                == tau_action(&tau, &el, &tf).unwrap(),
            || format!("case {case}: module map"),
        )?;
        let finer = f.refine_to_level(f.min_level().unwrap() + 1).unwrap();
        ensure(t_level(&finer, &m).unwrap() == tf, || {
            format!("case {case}: refinement")
        })?;
    }
    Ok("500 step functions: linearity, module map, refinement, oracle".into())
}

fn commuting_squares() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..200 {
        let dim = 1 + case % 2;
        let c = q(rng.gen_range(-2..=0), 1);
        let d = &c + q(rng.gen_range(1..=3), 1);
        let xi = &c + (&d - &c) * q(rng.gen_range(1..=7), 8);
        let iv = OrderedInterval::with_split(c, d, xi).unwrap();
        let region = Region::new(iv.clone(), dim);
        let u = rng.gen_range(0..=2);
        let fs: Vec<_> = (0..1usize << dim)
            .map(|_| random_step(&mut rng, &region, u))
            .collect();
        let sq = commuting_square_check(&fs, &Measure::Lebesgue).map_err(|e| e.to_string())?;
        let rho = (iv.xi() - iv.c()) / iv.length();
        let mut want = zero();
        for (j, f) in fs.iter().enumerate() {
            let w: Rational = (0..dim)
                .map(|axis| {
                    if (j >> (dim - 1 - axis)) & 1 == 0 {
                        rho.clone()
                    } else {
                        one() - &rho
                    }
                })
                .product();
            want += w * oracle_integral(f, lebesgue_box);
        }
        ensure(sq.equal && sq.lhs == sq.rhs, || {
            format!("case {case}: {} vs {}", sq.lhs, sq.rhs)
        })?;
        ensure(sq.rhs == Scalar::Exact(want), || {
            format!("case {case}: oracle mismatch")
        })?;
    }
    Ok("200 tuples, exact".into())
}

fn measure_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..500 {
        let dim = 1 + case % 3;
        let phi_def = PhiOracle::random(&mut rng, true);
        let factor = q(rng.gen_range(1..=5), rng.gen_range(1..=3));
        let phi_box =
            |b: &CoordBox| -> Rational { b.sides().iter().map(|s| phi_def.interval(s)).product() };
        let kinds: [MeasureCase<'_>; 3] = [
            (Measure::Lebesgue, Box::new(lebesgue_box), 0.0),
            (
                Measure::stieltjes(phi_def.model()),
                Box::new(phi_box),
                1e-12,
            ),
            (
                Measure::composed(
                    UnaryFn::linear(Scalar::Exact(factor.clone())),
                    Measure::stieltjes(phi_def.model()),
                ),
                Box::new(|b: &CoordBox| &factor * phi_box(b)),
                1e-12,
            ),
        ];
        let whole = random_box(&mut rng, dim);
        let mut parts = vec![whole.clone()];
        for _ in 0..rng.gen_range(1..5) {
            let i = rng.gen_range(0..parts.len());
            if let Some((l, r)) = split_box(&mut rng, &parts[i]) {
                parts.swap_remove(i);
                parts.extend([l, r]);
            }
        }
        let inner = whole.intersect(&random_box(&mut rng, dim));
        for (m, oracle, tol) in &kinds {
            let close = |x: &Scalar, y: &Rational| match x {
                Scalar::Exact(v) if *tol == 0.0 => v == y,
                _ => (x.to_f64() - Scalar::Exact(y.clone()).to_f64()).abs() <= *tol,
            };
            let total = m.box_measure(&whole).unwrap();
            ensure(close(&total, &oracle(&whole)), || {
                format!("case {case}: {m} oracle")
            })?;
            let mut sum = Scalar::zero();
            for p in &parts {
                sum = sum + m.box_measure(p).unwrap();
            }
            ensure(close(&sum, &oracle(&whole)), || {
                format!("case {case}: {m} not additive")
            })?;
            let set = BoxSet::from_boxes(dim, parts.clone()).unwrap();
            ensure(close(&m.measure_of(&set).unwrap(), &oracle(&whole)), || {
                format!("case {case}: {m} set")
            })?;
            let mi = m.box_measure(&inner).unwrap().to_f64();
            ensure(mi >= -*tol && mi <= total.to_f64() + tol, || {
                format!("case {case}: {m} not monotone")
            })?;
        }
    }
    Ok("500 families x 3 measure kinds".into())
}

fn transports() -> Outcome {
    let opts = VerifyOptions {
        level: 2,
        tolerance: 1e-12,
        unions: 16,
        seed: 6,
    };
    let square_region = Region::unit_cube(1);
    let square = TransportMap::coordinatewise(
        square_region.clone(),
        square_region.clone(),
        vec![UnaryFn::parse("x^2").unwrap()],
        vec![UnaryFn::parse("sqrt(x)").unwrap()],
        UnaryFn::identity(),
        TransportKind::Bijection,
    )
    .unwrap();
    let u_sq = Measure::stieltjes(
        PhiModel::continuous(UnaryFn::parse("x^2").unwrap(), zero(), one()).unwrap(),
    );

    let (a, b) = example37::load_algebras().map_err(|e| e.to_string())?;
    let pairing: Vec<AlgebraElement> = ["a", "e2", "e1 - a", "ab", "b - ab"]
        .iter()
        .map(|s| AlgebraElement::parse(&a, s).unwrap())
        .collect();
    let iso = TransportMap::standard_iso(&a, &b, &pairing, Region::unit_cube(5))
        .map_err(|e| e.to_string())?;
    let identity = TransportMap::identity(Region::unit_cube(2));

    let good: [(&str, &TransportMap, &Measure, u32); 3] = [
        ("identity", &identity, &Measure::Lebesgue, 2),
        ("x^2", &square, &u_sq, 2),
        ("isomorphism", &iso, &Measure::Lebesgue, 1),
    ];
    for (name, t, mu1, level) in good {
        let rt = t
            .round_trip_error(3.min(level + 1))
            .map_err(|e| e.to_string())?;
        ensure(rt <= 1e-12, || format!("{name}: round trip error {rt}"))?;
        let o = VerifyOptions {
            level,
            ..opts.clone()
        };
        let rep =
            verify_measure_preserving(t, mu1, &Measure::Lebesgue, &o).map_err(|e| e.to_string())?;
        ensure(rep.pass, || format!("{name}:\n{rep}"))?;
    }
    let broken = verify_measure_preserving(&square, &Measure::Lebesgue, &Measure::Lebesgue, &opts)
        .map_err(|e| e.to_string())?;
    ensure(!broken.pass && broken.max_deviation > 0.0, || {
        "broken transport passed".into()
    })?;
    Ok(format!(
        "identity, x^2 and isomorphism pass; broken map fails with deviation {:.4}",
        broken.max_deviation
    ))
}

fn convergence() -> Outcome {
    let f = Integrand::Point(PointFn::new("x", |x| Ok(x[0].clone())));
    let r = integrate(
        &f,
        &Region::unit_cube(1),
        &Measure::Lebesgue,
        &float_cfg(1e-9, 30),
    )
    .map_err(|e| e.to_string())?;
    let last = r.trace.rows.last().ok_or("empty trace")?;
    let delta = last.delta.as_ref().map_or(f64::INFINITY, Scalar::to_f64);
    ensure(r.converged() && delta < 1e-9 && last.level <= 30, || {
        format!("delta {delta} at level {}", last.level)
    })?;
    ensure((r.value.to_f64() - 0.5).abs() <= 1e-9, || {
        format!("value {}", r.value)
    })?;
    let mut buf = Vec::new();
    r.trace
        .write_csv(&mut buf, false)
        .map_err(|e| e.to_string())?;
    let rows = ConvergenceTrace::read_csv(&buf[..]).map_err(|e| e.to_string())?;
    ensure(rows.len() == r.trace.rows.len(), || {
        "csv row count differs".into()
    })?;
    ensure(
        rows.last().unwrap().value.to_f64() == r.value.to_f64(),
        || "csv value differs".into(),
    )?;
    Ok(format!(
        "|delta| = {delta:.2e} at level {}, {} csv rows",
        last.level,
        rows.len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 five-dimensional example, exact", example_exact),
        ("2 Bochner coordinate sum", bochner_scalar),
        ("3 substitution rule", substitution),
        ("4 Riemann/Lebesgue-Stieltjes bridge", rs_ls_bridge),
        ("5a algebra tables and augmentations", algebra_tables),
        ("5b norm and module laws", norm_laws),
        ("5c level integral laws", step_laws),
        ("5d commuting square", commuting_squares),
        ("5e measure additivity and monotonicity", measure_laws),
        ("5f transports", transports),
        ("6 convergence and trace CSV", convergence),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
