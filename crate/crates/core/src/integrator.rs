//! Level integrals `T_u`, the refinement-limit integral with its
//! convergence trace, the `m_u` commuting square, and component-wise
//! integration of algebra-valued functions.

use std::io;
use std::sync::Arc;

use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraElement, AlgebraError};
use crate::expr::EvalError;
use crate::func::{PointFn, PointMap, UnaryFn};
use crate::measure::{Measure, MeasureError};
use crate::region::{OrderedInterval, Region};
use crate::scalar::{format_significant, Rational, Scalar, ScalarSum};
use crate::step::{gamma_xi, Sampling, StepError, StepFunction};

/// Cells summed sequentially inside one parallel task. Fixed so that the
/// rounding of float sums does not depend on scheduling.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("evaluation failed at {point}: {source}")]
    Evaluation { point: String, source: EvalError },
    #[error("{0}")]
    Unsupported(String),
    #[error("malformed trace CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub p: f64,
    pub tolerance: f64,
    pub min_level: u32,
    pub max_level: u32,
    pub sampling: Sampling,
    /// Evaluate in exact rational arithmetic instead of `f64`.
    pub exact: bool,
    /// Refinement stops (unconverged) before a level with more cells.
    pub max_cells: u128,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            p: 1.0,
            tolerance: 1e-9,
            min_level: 0,
            max_level: 20,
            sampling: Sampling::Midpoint,
            exact: false,
            max_cells: 1 << 24,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), IntegratorError> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(IntegratorError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_level < 1 {
            return Err(IntegratorError::InvalidConfig(
                "max_level must be at least 1".into(),
            ));
        }
        if self.min_level > self.max_level {
            return Err(IntegratorError::InvalidConfig(format!(
                "min_level {} exceeds max_level {}",
                self.min_level, self.max_level
            )));
        }
        if self.p.is_nan() || self.p < 1.0 {
            return Err(IntegratorError::InvalidConfig(format!(
                "p must be >= 1, got {}",
                self.p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub level: u32,
    pub value: Scalar,
    pub delta: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
    pub converged: bool,
    pub tolerance: f64,
    pub warnings: Vec<String>,
}

fn render(value: &Scalar, exact: bool) -> String {
    match value {
        Scalar::Exact(_) if exact => value.to_string(),
        _ => format_significant(value.to_f64(), 15),
    }
}

impl ConvergenceTrace {
    pub fn new(tolerance: f64) -> Self {
        ConvergenceTrace {
            rows: Vec::new(),
            converged: false,
            tolerance,
            warnings: Vec::new(),
        }
    }

    /// Appends a level value; returns `true` once the change from the
    /// previous level is below the tolerance.
    pub fn push(&mut self, level: u32, value: Scalar) -> bool {
        let delta = self.rows.last().map(|prev| (&value - &prev.value).abs());
        let done = delta.as_ref().is_some_and(|d| d.to_f64() < self.tolerance);
        self.rows.push(TraceRow {
            level,
            value,
            delta,
        });
        done
    }

    pub fn last_value(&self) -> Option<&Scalar> {
        self.rows.last().map(|r| &r.value)
    }

    pub fn last_delta(&self) -> Option<&Scalar> {
        self.rows.last().and_then(|r| r.delta.as_ref())
    }

    /// Writes `level,value,delta`; the first row has an empty delta.
    pub fn write_csv<W: io::Write>(&self, w: W, exact: bool) -> Result<(), IntegratorError> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| IntegratorError::Csv(e.to_string());
        out.write_record(["level", "value", "delta"])
            .map_err(csv_err)?;
        for row in &self.rows {
            let delta = row
                .delta
                .as_ref()
                .map(|d| render(d, exact))
                .unwrap_or_default();
            out.write_record([row.level.to_string(), render(&row.value, exact), delta])
                .map_err(csv_err)?;
        }
        out.flush().map_err(|e| IntegratorError::Csv(e.to_string()))
    }

    pub fn to_csv_string(&self, exact: bool) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, exact).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Reads rows written by [`ConvergenceTrace::write_csv`].
    pub fn read_csv<R: io::Read>(r: R) -> Result<Vec<TraceRow>, IntegratorError> {
        let mut reader = csv::Reader::from_reader(r);
        let header = reader
            .headers()
            .map_err(|e| IntegratorError::Csv(e.to_string()))?
            .clone();
        if header.iter().collect::<Vec<_>>() != ["level", "value", "delta"] {
            return Err(IntegratorError::Csv(format!(
                "unexpected header {header:?}"
            )));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| IntegratorError::Csv(e.to_string()))?;
            let bad = |what: &str| IntegratorError::Csv(format!("bad {what} in {record:?}"));
            let level = record[0].parse().map_err(|_| bad("level"))?;
            let value = record[1].parse().map_err(|_| bad("value"))?;
            let delta = match &record[2] {
                "" => None,
                s => Some(s.parse().map_err(|_| bad("delta"))?),
            };
            rows.push(TraceRow {
                level,
                value,
                delta,
            });
        }
        Ok(rows)
    }
}

/// Something that can be integrated: a pointwise function or a step
/// function.
#[derive(Debug, Clone)]
pub enum Integrand {
    Point(PointFn),
    Step(StepFunction),
}

impl Integrand {
    pub fn as_point_fn(&self) -> PointFn {
        match self {
            Integrand::Point(f) => f.clone(),
            Integrand::Step(s) => s.to_point_fn(),
        }
    }
}

impl From<PointFn> for Integrand {
    fn from(f: PointFn) -> Self {
        Integrand::Point(f)
    }
}

impl From<StepFunction> for Integrand {
    fn from(f: StepFunction) -> Self {
        Integrand::Step(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub value: Scalar,
    pub trace: ConvergenceTrace,
}

impl Integral {
    pub fn converged(&self) -> bool {
        self.trace.converged
    }
}

/// `T_u(Σ k_i 1_{I_i}) = Σ k_i μ(I_i)`, summed in piece order.
pub fn t_level(f: &StepFunction, m: &Measure) -> Result<Scalar, IntegratorError> {
    let mut acc = ScalarSum::new();
    for (b, v) in f.pieces() {
        if v.is_zero() {
            continue;
        }
        acc.add(&(v * m.box_measure(b)?));
    }
    Ok(acc.finish())
}

/// Per-cell weights of a measure on one level of the grid.
enum Weights {
    /// The same one-dimensional weights on every axis.
    Product(Vec<Scalar>),
    Linked(UnaryFn, Box<Weights>),
}

impl Weights {
    fn build(
        m: &Measure,
        iv: &OrderedInterval,
        level: u32,
        exact: bool,
    ) -> Result<Weights, IntegratorError> {
        match m {
            Measure::Composed { link, inner } => Ok(Weights::Linked(
                link.clone(),
                Box::new(Weights::build(inner, iv, level, exact)?),
            )),
            _ => Ok(Weights::Product(axis_weights(m, iv, level, exact)?)),
        }
    }

    fn cell(&self, idx: &[usize]) -> Result<Scalar, EvalError> {
        match self {
            Weights::Product(w) => Ok(idx.iter().fold(Scalar::one(), |acc, &i| acc * &w[i])),
            Weights::Linked(link, inner) => link.call(&inner.cell(idx)?),
        }
    }
}

fn axis_weights(
    m: &Measure,
    iv: &OrderedInterval,
    level: u32,
    exact: bool,
) -> Result<Vec<Scalar>, IntegratorError> {
    match m {
        Measure::Lebesgue if exact => Ok(iv
            .bisect(level)
            .iter()
            .map(|c| Scalar::Exact(c.length()))
            .collect()),
        Measure::Lebesgue => {
            let g = iv.grid_f64(level);
            Ok(g.windows(2).map(|w| Scalar::Real(w[1] - w[0])).collect())
        }
        Measure::Stieltjes(phi) if exact => iv
            .bisect(level)
            .iter()
            .map(|c| Ok(phi.interval_measure(c).map_err(MeasureError::from)?))
            .collect(),
        Measure::Stieltjes(phi) => {
            let g = iv.grid_f64(level);
            let last = g.len() - 2;
            g.windows(2)
                .enumerate()
                .map(|(i, w)| {
                    let lo = phi.left_limit(&Scalar::Real(w[0]))?;
                    let hi = if i == last {
                        phi.eval(&Scalar::Real(w[1]))?
                    } else {
                        phi.left_limit(&Scalar::Real(w[1]))?
                    };
                    Ok(hi - lo)
                })
                .collect::<Result<Vec<_>, EvalError>>()
                .map_err(|e| MeasureError::from(e).into())
        }
        Measure::Composed { .. } => Err(IntegratorError::Unsupported(
            "a composed measure has no per-axis weights".into(),
        )),
    }
}

fn axis_points(iv: &OrderedInterval, level: u32, rule: Sampling, exact: bool) -> Vec<Scalar> {
    if exact {
        let g = iv.grid(level);
        g.windows(2)
            .map(|w| {
                Scalar::Exact(match rule {
                    Sampling::Midpoint => (&w[0] + &w[1]) / Rational::from_integer(2.into()),
                    Sampling::LeftCorner => w[0].clone(),
                })
            })
            .collect()
    } else {
        let t = rule.offset();
        iv.grid_f64(level)
            .windows(2)
            .map(|w| Scalar::Real(w[0] + t * (w[1] - w[0])))
            .collect()
    }
}

/// `T_u` of the level-`u` samples of `g`, without materializing the step
/// function.
fn sampled_level_value(
    g: &PointFn,
    region: &Region,
    m: &Measure,
    level: u32,
    cfg: &IntegratorConfig,
) -> Result<Scalar, IntegratorError> {
    let iv = region.interval();
    let weights = Weights::build(m, iv, level, cfg.exact)?;
    let points = axis_points(iv, level, cfg.sampling, cfg.exact);
    let per_axis = points.len();
    let dim = region.dim();
    let total = per_axis.pow(dim as u32);
    let chunk_sums: Vec<Result<Scalar, IntegratorError>> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = ScalarSum::new();
            let mut idx = vec![0usize; dim];
            for flat in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                let mut rest = flat;
                for slot in idx.iter_mut().rev() {
                    *slot = rest % per_axis;
                    rest /= per_axis;
                }
                let x: Vec<Scalar> = idx.iter().map(|&i| points[i].clone()).collect();
                let point = || {
                    let parts: Vec<String> = x.iter().map(|s| s.to_string()).collect();
                    format!("({})", parts.join(", "))
                };
                let w = weights
                    .cell(&idx)
                    .map_err(|source| IntegratorError::Evaluation {
                        point: point(),
                        source,
                    })?;
                if w.is_zero() {
                    continue;
                }
                let v = g.call(&x).map_err(|source| IntegratorError::Evaluation {
                    point: point(),
                    source,
                })?;
                acc.add(&(v * w));
            }
            Ok(acc.finish())
        })
        .collect();
    let mut acc = ScalarSum::new();
    for s in chunk_sums {
        acc.add(&s?);
    }
    Ok(acc.finish())
}

fn atoms(m: &Measure) -> Option<&crate::measure::PhiModel> {
    match m {
        Measure::Stieltjes(phi) => Some(phi),
        Measure::Composed { inner, .. } => atoms(inner),
        Measure::Lebesgue => None,
    }
}

/// The refinement limit `lim_u T_u(f_u)`.
///
/// Step integrands are integrated exactly. Pointwise integrands are
/// sampled on successively finer grids until two consecutive level values
/// differ by less than the tolerance, `max_level` is reached, or the next
/// level would exceed `max_cells`; the trace records every level either way.
pub fn integrate(
    g: &Integrand,
    region: &Region,
    m: &Measure,
    cfg: &IntegratorConfig,
) -> Result<Integral, IntegratorError> {
    cfg.validate()?;
    let mut trace = ConvergenceTrace::new(cfg.tolerance);
    match g {
        Integrand::Step(f) => {
            if f.region() != region {
                return Err(StepError::RegionMismatch.into());
            }
            let value = t_level(f, m)?;
            let level = f.min_level().unwrap_or(0);
            trace.push(level, value.clone());
            trace.converged = trace.push(level + 1, value.clone());
            Ok(Integral { value, trace })
        }
        Integrand::Point(f) => {
            let mut atom_warned = false;
            for level in cfg.min_level..=cfg.max_level {
                let cells = region.cell_count(level);
                if cells > cfg.max_cells {
                    trace.warnings.push(format!(
                        "stopped before level {level}: {cells} cells exceed the limit of {}",
                        cfg.max_cells
                    ));
                    break;
                }
                if !atom_warned {
                    if let Some(phi) = atoms(m) {
                        let on_grid = phi.atoms_on_grid(region.interval(), level);
                        if let Some(a) = on_grid.first() {
                            trace.warnings.push(format!(
                                "atom at {} lies on the level-{level} grid and is attributed to the cell on its right",
                                Scalar::Exact(a.clone())
                            ));
                            atom_warned = true;
                        }
                    }
                }
                let value = sampled_level_value(f, region, m, level, cfg)?;
                if trace.push(level, value) {
                    trace.converged = true;
                    break;
                }
            }
            let value = trace.last_value().cloned().ok_or_else(|| {
                IntegratorError::InvalidConfig(format!(
                    "level {} already exceeds max_cells",
                    cfg.min_level
                ))
            })?;
            Ok(Integral { value, trace })
        }
    }
}

/// Weights `w_δ = μ(κ_δ(𝕀_Λ)) / μ(𝕀_Λ)` of the averaging map `m_u` under
/// product Lebesgue measure, in the subbox order used by `gamma_xi`.
pub fn juxtaposition_weights(region: &Region) -> Vec<Rational> {
    let rho = region.interval().ratio();
    let n = region.dim();
    (0..1usize << n)
        .map(|j| {
            (0..n)
                .map(|axis| {
                    if (j >> (n - 1 - axis)) & 1 == 0 {
                        rho.clone()
                    } else {
                        Rational::one() - &rho
                    }
                })
                .product()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutingSquare {
    /// `T_{u+1}(γ_ξ(f_1, …, f_{2^n}))`
    pub lhs: Scalar,
    /// `m_u(T_u(f_1), …, T_u(f_{2^n}))`
    pub rhs: Scalar,
    pub equal: bool,
}

/// Evaluates both paths around the `γ_ξ` / `m_u` square.
pub fn commuting_square_check(
    fs: &[StepFunction],
    m: &Measure,
) -> Result<CommutingSquare, IntegratorError> {
    if !matches!(m, Measure::Lebesgue) {
        return Err(IntegratorError::Unsupported(
            "the commuting square is only checked under product Lebesgue measure".into(),
        ));
    }
    let glued = gamma_xi(fs)?;
    let lhs = t_level(&glued, m)?;
    let weights = juxtaposition_weights(glued.region());
    let mut acc = ScalarSum::new();
    for (f, w) in fs.iter().zip(weights) {
        acc.add(&(Scalar::Exact(w) * t_level(f, m)?));
    }
    let rhs = acc.finish();
    let equal = lhs == rhs;
    Ok(CommutingSquare { lhs, rhs, equal })
}

#[derive(Debug, Clone)]
pub struct BochnerIntegral {
    pub element: AlgebraElement,
    pub traces: Vec<ConvergenceTrace>,
}

impl BochnerIntegral {
    pub fn converged(&self) -> bool {
        self.traces.iter().all(|t| t.converged)
    }
}

/// Integrates an algebra-valued function coordinate by coordinate.
pub fn bochner_integrate(
    g: &PointMap,
    algebra: &Arc<Algebra>,
    region: &Region,
    m: &Measure,
    cfg: &IntegratorConfig,
) -> Result<BochnerIntegral, IntegratorError> {
    let n = algebra.dim();
    let mut coords = Vec::with_capacity(n);
    let mut traces = Vec::with_capacity(n);
    for i in 0..n {
        let g = g.clone();
        let label = format!("{}[{}]", g.label(), algebra.labels()[i]);
        let component = PointFn::new(label, move |x| {
            let v = g.call(x)?;
            if v.len() != n {
                return Err(EvalError::Arity {
                    expected: n,
                    got: v.len(),
                });
            }
            Ok(v[i].clone())
        });
        let r = integrate(&Integrand::Point(component), region, m, cfg)?;
        coords.push(r.value);
        traces.push(r.trace);
    }
    Ok(BochnerIntegral {
        element: AlgebraElement::new(algebra, coords)?,
        traces,
    })
}
