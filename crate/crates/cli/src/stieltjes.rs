//! Riemann-Stieltjes sums, Lebesgue-Stieltjes integration, the substitution
//! rule and the Riemann restriction, all on a single interval.

use std::fmt;
use std::str::FromStr;

use stieltjes_core::expr::EvalError;
use stieltjes_core::func::{PointFn, UnaryFn};
use stieltjes_core::integrator::{
    integrate, ConvergenceTrace, Integral, Integrand, IntegratorConfig,
};
use stieltjes_core::measure::{Measure, PhiModel};
use stieltjes_core::region::{OrderedInterval, Region};
use stieltjes_core::scalar::{rational_to_f64, ScalarSum};
use stieltjes_core::transport::{theorem35_check, TransportKind, TransportMap};
use stieltjes_core::{Rational, Scalar};

use crate::error::{CliError, Result};

/// Where each tag sits inside its partition cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TagRule {
    Left,
    Right,
    #[default]
    Midpoint,
}

impl FromStr for TagRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "left" => Ok(TagRule::Left),
            "right" => Ok(TagRule::Right),
            "midpoint" => Ok(TagRule::Midpoint),
            other => Err(format!("unknown tag rule `{other}` (left|right|midpoint)")),
        }
    }
}

impl fmt::Display for TagRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TagRule::Left => "left",
            TagRule::Right => "right",
            TagRule::Midpoint => "midpoint",
        })
    }
}

/// A tagged partition `α = t_0 < … < t_n = β` with `η_i ∈ [t_i, t_{i+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    breakpoints: Vec<Rational>,
    tags: Vec<Rational>,
}

impl Partition {
    pub fn new(breakpoints: Vec<Rational>, tags: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(CliError::Validation(
                "a partition needs at least two breakpoints".into(),
            ));
        }
        if tags.len() + 1 != breakpoints.len() {
            return Err(CliError::Validation(format!(
                "{} cells need {} tags, got {}",
                breakpoints.len() - 1,
                breakpoints.len() - 1,
                tags.len()
            )));
        }
        for (i, w) in breakpoints.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(CliError::Validation(format!(
                    "breakpoints must increase strictly: t_{i} = {} and t_{} = {}",
                    Scalar::Exact(w[0].clone()),
                    i + 1,
                    Scalar::Exact(w[1].clone())
                )));
            }
            if tags[i] < w[0] || tags[i] > w[1] {
                return Err(CliError::Validation(format!(
                    "tag {} lies outside cell {i}",
                    Scalar::Exact(tags[i].clone())
                )));
            }
        }
        Ok(Partition { breakpoints, tags })
    }

    /// `n` equal cells of `[α, β]` tagged by `rule`.
    pub fn uniform(alpha: &Rational, beta: &Rational, n: usize, rule: TagRule) -> Result<Self> {
        if n == 0 || alpha >= beta {
            return Err(CliError::Validation(format!(
                "cannot split [{}, {}] into {n} cells",
                Scalar::Exact(alpha.clone()),
                Scalar::Exact(beta.clone())
            )));
        }
        let width = (beta - alpha) / Rational::from_integer((n as i64).into());
        let breakpoints: Vec<Rational> = (0..=n)
            .map(|i| alpha + &width * Rational::from_integer((i as i64).into()))
            .collect();
        let half = Rational::new(1.into(), 2.into());
        let tags = breakpoints
            .windows(2)
            .map(|w| match rule {
                TagRule::Left => w[0].clone(),
                TagRule::Right => w[1].clone(),
                TagRule::Midpoint => &w[0] + &width * &half,
            })
            .collect();
        Ok(Partition { breakpoints, tags })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn tags(&self) -> &[Rational] {
        &self.tags
    }

    pub fn cells(&self) -> usize {
        self.tags.len()
    }

    /// `λ = max (t_{i+1} − t_i)`.
    pub fn mesh(&self) -> Rational {
        self.breakpoints
            .windows(2)
            .map(|w| &w[1] - &w[0])
            .max()
            .expect("at least one cell")
    }
}

fn arg(q: &Rational, exact: bool) -> Scalar {
    if exact {
        Scalar::Exact(q.clone())
    } else {
        Scalar::Real(rational_to_f64(q))
    }
}

/// `S(P, f, φ) = Σ f(η_i) (φ(t_{i+1}) − φ(t_i))`. With `exact` the
/// arguments stay rational, so the sum is exact whenever `f` and `φ` are.
pub fn rs_sum(p: &Partition, f: &UnaryFn, phi: &PhiModel, exact: bool) -> Result<Scalar> {
    let phis = p
        .breakpoints
        .iter()
        .map(|t| phi.eval(&arg(t, exact)))
        .collect::<std::result::Result<Vec<_>, EvalError>>()?;
    let mut acc = ScalarSum::new();
    for (i, tag) in p.tags.iter().enumerate() {
        let fv = f.call(&arg(tag, exact))?;
        acc.add(&(fv * (&phis[i + 1] - &phis[i])));
    }
    Ok(acc.finish())
}

/// Riemann-Stieltjes integral over the domain of `phi`: uniform partitions
/// with `2^u` cells for `u = min_level, …` until successive sums differ by
/// less than the tolerance.
pub fn rs_integrate(
    f: &UnaryFn,
    phi: &PhiModel,
    tag: TagRule,
    cfg: &IntegratorConfig,
) -> Result<Integral> {
    cfg.validate()?;
    let (alpha, beta) = phi.domain();
    let mut trace = ConvergenceTrace::new(cfg.tolerance);
    for level in cfg.min_level..=cfg.max_level {
        let n = 1u128 << level;
        if n > cfg.max_cells {
            trace.warnings.push(format!(
                "stopped before level {level}: {n} cells exceed the limit of {}",
                cfg.max_cells
            ));
            break;
        }
        let p = Partition::uniform(&alpha, &beta, n as usize, tag)?;
        let value = rs_sum(&p, f, phi, cfg.exact)?;
        if trace.push(level, value) {
            trace.converged = true;
            break;
        }
    }
    let value = trace
        .last_value()
        .cloned()
        .ok_or_else(|| CliError::Validation("min-level exceeds max-level".into()))?;
    Ok(Integral { value, trace })
}

/// Region `[α, β]` with midpoint bisection.
pub fn line_region(alpha: &Rational, beta: &Rational) -> Result<Region> {
    Ok(Region::new(
        OrderedInterval::bisection(alpha.clone(), beta.clone())?,
        1,
    ))
}

/// Wraps a scalar function as a one-variable integrand.
pub fn unary_integrand(f: &UnaryFn) -> Integrand {
    let g = f.clone();
    Integrand::Point(PointFn::new(f.label().to_string(), move |x| {
        let [t] = x else {
            return Err(EvalError::Arity {
                expected: 1,
                got: x.len(),
            });
        };
        g.call(t)
    }))
}

/// Restricts an integrand of one variable to a scalar function.
pub fn integrand_as_unary(g: &Integrand) -> UnaryFn {
    let p = g.as_point_fn();
    UnaryFn::new(p.label().to_string(), move |t| {
        p.call(std::slice::from_ref(t))
    })
}

/// `∫ f du_φ` over the domain of `φ`.
pub fn ls_integrate(f: &Integrand, phi: &PhiModel, cfg: &IntegratorConfig) -> Result<Integral> {
    let (alpha, beta) = phi.domain();
    let region = line_region(&alpha, &beta)?;
    let m = Measure::stieltjes(phi.clone());
    Ok(integrate(f, &region, &m, cfg)?)
}

#[derive(Debug, Clone)]
pub struct Substitution {
    /// `∫_{[c,d]} f du_F`
    pub lhs: Integral,
    /// `∫_{[F(c),F(d)]} f(F⁻¹(y)) dy`
    pub rhs: Integral,
    pub difference: Scalar,
    pub warning: Option<String>,
}

impl Substitution {
    pub fn converged(&self) -> bool {
        self.lhs.converged() && self.rhs.converged()
    }
}

fn rational_value(f: &UnaryFn, x: &Rational) -> Result<Rational> {
    match f.call(&Scalar::Exact(x.clone()))? {
        Scalar::Exact(q) => Ok(q),
        Scalar::Real(v) => Err(CliError::Validation(format!(
            "{}({}) = {v} is not rational; the interval endpoints must map to rationals",
            f.label(),
            Scalar::Exact(x.clone())
        ))),
    }
}

/// Inverts an increasing `f` on `[c, d]` by bisection in `f64`.
pub fn bisection_inverse(f: &UnaryFn, c: &Rational, d: &Rational) -> UnaryFn {
    let f = f.clone();
    let (c, d) = (rational_to_f64(c), rational_to_f64(d));
    UnaryFn::new(format!("inverse of {}", f.label()), move |y| {
        let y = y.to_f64();
        let (mut lo, mut hi) = (c, d);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f.call(&Scalar::Real(mid))?.to_f64() < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Scalar::Real(0.5 * (lo + hi)))
    })
}

/// Both sides of the substitution rule for an increasing `F` on `[c, d]`:
/// `∫ f du_F` against `∫ f∘F⁻¹ dy` over `F([c, d])`. When `inverse` is absent
/// `F⁻¹` is found by bisection.
pub fn substitution_check(
    f: &Integrand,
    big_f: &UnaryFn,
    inverse: Option<&UnaryFn>,
    c: &Rational,
    d: &Rational,
    cfg: &IntegratorConfig,
) -> Result<Substitution> {
    let (fc, fd) = (rational_value(big_f, c)?, rational_value(big_f, d)?);
    if fc >= fd {
        return Err(CliError::Validation(format!(
            "{} must be strictly increasing: F(c) = {}, F(d) = {}",
            big_f.label(),
            Scalar::Exact(fc),
            Scalar::Exact(fd)
        )));
    }
    let phi = PhiModel::continuous(big_f.clone(), c.clone(), d.clone())?;
    let inverse = inverse
        .cloned()
        .unwrap_or_else(|| bisection_inverse(big_f, c, d));
    let t = TransportMap::coordinatewise(
        line_region(c, d)?,
        line_region(&fc, &fd)?,
        vec![big_f.clone()],
        vec![inverse],
        UnaryFn::identity(),
        TransportKind::Bijection,
    )?;
    let r = theorem35_check(f, &t, &Measure::stieltjes(phi), &Measure::Lebesgue, cfg)?;
    Ok(Substitution {
        lhs: r.lhs,
        rhs: r.rhs,
        difference: r.difference,
        warning: r.warning,
    })
}

#[derive(Debug, Clone)]
pub struct RiemannComparison {
    /// Riemann sums with `φ(x) = x` on `[0, 1]`.
    pub riemann: Integral,
    /// The refinement-limit integral under Lebesgue measure.
    pub categorical: Integral,
    pub difference: Scalar,
}

impl RiemannComparison {
    pub fn converged(&self) -> bool {
        self.riemann.converged() && self.categorical.converged()
    }
}

/// Evaluates `∫_0^1 f` both as a Riemann limit and as a refinement-limit
/// integral.
pub fn riemann_restriction(
    f: &Integrand,
    tag: TagRule,
    cfg: &IntegratorConfig,
) -> Result<RiemannComparison> {
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    let phi = PhiModel::identity(zero.clone(), one.clone());
    let riemann = rs_integrate(&integrand_as_unary(f), &phi, tag, cfg)?;
    let categorical = integrate(f, &line_region(&zero, &one)?, &Measure::Lebesgue, cfg)?;
    let difference = (&riemann.value - &categorical.value).abs();
    Ok(RiemannComparison {
        riemann,
        categorical,
        difference,
    })
}
