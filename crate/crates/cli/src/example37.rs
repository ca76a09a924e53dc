//! The five-dimensional isomorphism fixture: algebra `A` with an idempotent
//! loop against the path algebra `B` of `1 → 2 ← 3`.

use std::fmt;
use std::sync::Arc;

use stieltjes_core::algebra::{
    parse_fixture, path_algebra, Algebra, AlgebraElement, Arrow, Quiver,
};
use stieltjes_core::func::{PointFn, PointMap};
use stieltjes_core::integrator::{
    bochner_integrate, integrate, BochnerIntegral, Integral, Integrand, IntegratorConfig,
};
use stieltjes_core::measure::Measure;
use stieltjes_core::region::Region;
use stieltjes_core::transport::{theorem35_check, ChangeOfMeasure, TransportMap};
use stieltjes_core::Scalar;

use crate::error::{CliError, Result};

pub const ALGEBRA_A: &str = include_str!("../fixtures/algebra_a.alg");
pub const ALGEBRA_B: &str = include_str!("../fixtures/algebra_b.alg");

/// Images in `A` of the basis `e1 e2 e3 alpha beta` of `B`.
pub const PAIRING: [&str; 5] = ["a", "e2", "e1 - a", "ab", "b - ab"];

/// `1 --alpha--> 2 <--beta-- 3`
pub fn quiver_b() -> Quiver {
    let v = |s: &str| s.to_string();
    let arrow = |l: &str, s: &str, t: &str| Arrow {
        label: v(l),
        source: v(s),
        target: v(t),
    };
    Quiver::new(
        vec![v("1"), v("2"), v("3")],
        vec![arrow("alpha", "1", "2"), arrow("beta", "3", "2")],
    )
    .expect("fixed quiver is valid")
}

pub fn load_algebras() -> Result<(Arc<Algebra>, Arc<Algebra>)> {
    let a = parse_fixture(ALGEBRA_A)?.algebra;
    let b = parse_fixture(ALGEBRA_B)?.algebra;
    let from_quiver = path_algebra(&quiver_b())?;
    if from_quiver.table() != b.table() {
        return Err(CliError::Validation(
            "fixture B disagrees with the path algebra of its quiver".into(),
        ));
    }
    Ok((a, b))
}

#[derive(Debug, Clone)]
pub struct Example37Report {
    pub exact: bool,
    /// `∫ (k1 + k2 + k4)` over `[0,1]^5` in the coordinates of `A`.
    pub side_a: Integral,
    /// `∫ (r3 + r2 + r5)` over `[0,1]^5` in the coordinates of `B`.
    pub side_b: Integral,
    /// Sample points where the transported integrand matched `r3 + r2 + r5`.
    pub transported_samples: usize,
    pub change_of_measure: ChangeOfMeasure,
    pub bochner_a: BochnerIntegral,
    pub bochner_b: BochnerIntegral,
    pub scalar_a: Scalar,
    pub scalar_b: Scalar,
}

impl Example37Report {
    /// Exact equality in rational mode, `1e-9` agreement otherwise.
    pub fn agree(&self) -> bool {
        let close = |x: &Scalar, y: &Scalar| {
            if self.exact {
                x == y
            } else {
                (x - y).abs().to_f64() <= 1e-9
            }
        };
        close(&self.side_a.value, &self.side_b.value)
            && close(&self.scalar_a, &self.scalar_b)
            && close(&self.side_a.value, &self.scalar_a)
            && close(
                &self.change_of_measure.lhs.value,
                &self.change_of_measure.rhs.value,
            )
    }

    pub fn converged(&self) -> bool {
        self.side_a.converged()
            && self.side_b.converged()
            && self.change_of_measure.lhs.converged()
            && self.change_of_measure.rhs.converged()
            && self.bochner_a.converged()
            && self.bochner_b.converged()
    }

    fn show(&self, x: &Scalar) -> String {
        if self.exact {
            x.to_string()
        } else {
            x.to_decimal_string(15)
        }
    }

    pub fn to_csv(&self) -> String {
        let rows = [
            ("side_a", &self.side_a.value),
            ("side_b", &self.side_b.value),
            ("transported_lhs", &self.change_of_measure.lhs.value),
            ("transported_rhs", &self.change_of_measure.rhs.value),
            ("bochner_scalar_a", &self.scalar_a),
            ("bochner_scalar_b", &self.scalar_b),
        ];
        let mut out = String::from("quantity,value\n");
        for (k, v) in rows {
            out.push_str(&format!("{k},{}\n", self.show(v)));
        }
        out
    }
}

impl fmt::Display for Example37Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "A: integral of k1 + k2 + k4 over [0,1]^5 = {}",
            self.show(&self.side_a.value)
        )?;
        writeln!(
            f,
            "B: integral of r3 + r2 + r5 over [0,1]^5 = {}",
            self.show(&self.side_b.value)
        )?;
        writeln!(
            f,
            "transported integrand equals r3 + r2 + r5 at {} sample points",
            self.transported_samples
        )?;
        writeln!(
            f,
            "change of measure: {} vs {}",
            self.show(&self.change_of_measure.lhs.value),
            self.show(&self.change_of_measure.rhs.value)
        )?;
        writeln!(
            f,
            "Bochner A = {}, coordinate sum {}",
            self.bochner_a.element,
            self.show(&self.scalar_a)
        )?;
        writeln!(
            f,
            "Bochner B = {}, coordinate sum {}",
            self.bochner_b.element,
            self.show(&self.scalar_b)
        )?;
        let rel = if self.agree() { "==" } else { "!=" };
        write!(
            f,
            "{} {rel} {}",
            self.show(&self.side_a.value),
            self.show(&self.side_b.value)
        )
    }
}

fn sum_of(label: &str, idx: [usize; 3]) -> PointFn {
    PointFn::new(label, move |x| Ok(&(&x[idx[0]] + &x[idx[1]]) + &x[idx[2]]))
}

fn spread(label: &str, idx: [usize; 3], slots: [usize; 3]) -> PointMap {
    PointMap::new(label, move |x| {
        let mut v = vec![Scalar::zero(); 5];
        for (i, s) in idx.iter().zip(slots) {
            v[s] = x[*i].clone();
        }
        Ok(v)
    })
}

/// Loads both fixtures, integrates each side, transports the integrand
/// along the pairing isomorphism and evaluates the Bochner scalars.
pub fn run(cfg: &IntegratorConfig) -> Result<Example37Report> {
    let (a, b) = load_algebras()?;
    let pairing = PAIRING
        .iter()
        .map(|s| AlgebraElement::parse(&a, s))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let region = Region::unit_cube(5);
    let t = TransportMap::standard_iso(&a, &b, &pairing, region.clone())?;

    // A basis e1 e2 a b ab; B basis e1 e2 e3 alpha beta
    let f_a = Integrand::Point(sum_of("k1 + k2 + k4", [0, 1, 3]));
    let f_b = Integrand::Point(sum_of("r3 + r2 + r5", [2, 1, 4]));

    let moved = t.transport_function(&f_a)?.integrand.as_point_fn();
    let expect = f_b.as_point_fn();
    let mut samples = 0;
    for s in 1..=16i64 {
        let r: Vec<Scalar> = (0..5i64)
            .map(|i| Scalar::ratio((s * (2 * i + 3)) % 17, 17))
            .collect();
        let (got, want) = (moved.call(&r)?, expect.call(&r)?);
        if got != want {
            return Err(CliError::Validation(format!(
                "transported integrand gives {got} at sample {s}, expected {want}"
            )));
        }
        samples += 1;
    }

    let side_a = integrate(&f_a, &region, &Measure::Lebesgue, cfg)?;
    let side_b = integrate(&f_b, &region, &Measure::Lebesgue, cfg)?;
    let change_of_measure = theorem35_check(&f_a, &t, &Measure::Lebesgue, &Measure::Lebesgue, cfg)?;

    let g_a = spread("k1 e1 + k2 e2 + k4 b", [0, 1, 3], [0, 1, 3]);
    let g_b = spread("r3 e3 + r2 e2 + r5 beta", [2, 1, 4], [2, 1, 4]);
    let bochner_a = bochner_integrate(&g_a, &a, &region, &Measure::Lebesgue, cfg)?;
    let bochner_b = bochner_integrate(&g_b, &b, &region, &Measure::Lebesgue, cfg)?;
    let scalar_a = bochner_a.element.coordinate_sum();
    let scalar_b = bochner_b.element.coordinate_sum();

    Ok(Example37Report {
        exact: cfg.exact,
        side_a,
        side_b,
        transported_samples: samples,
        change_of_measure,
        bochner_a,
        bochner_b,
        scalar_a,
        scalar_b,
    })
}
