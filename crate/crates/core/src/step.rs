//! Elementary simple functions on a region, the level spaces `E_u`, the
//! step norm, and the juxtaposition map `γ_ξ`.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{coords_p_norm, AlgebraError, TauModule};
use crate::expr::EvalError;
use crate::func::PointFn;
use crate::measure::{Measure, MeasureError};
use crate::region::{multi_indices, BoxSet, CoordBox, Interval, Region, RegionError};
use crate::scalar::{parse_rational, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("box {0} lies outside the region")]
    OutOfRegion(String),
    #[error("pieces do not partition the region: {0}")]
    NotAPartition(String),
    #[error("function is not a union of level-{level} grid cells")]
    NotOnGrid { level: u32 },
    #[error("expected {expected} functions, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("step functions live on different regions")]
    RegionMismatch,
    #[error("evaluation failed on cell {cell}: {source}")]
    Evaluation { cell: String, source: EvalError },
    #[error("cannot parse step block line `{0}`")]
    Parse(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

/// Where a grid cell is sampled when turning a pointwise function into a
/// step function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    #[default]
    Midpoint,
    LeftCorner,
}

impl Sampling {
    pub fn point(self, cell: &CoordBox) -> Vec<Rational> {
        match self {
            Sampling::Midpoint => cell.midpoint(),
            Sampling::LeftCorner => cell.lower_corner(),
        }
    }

    /// Relative position of the sample inside a cell along each axis.
    pub fn offset(self) -> f64 {
        match self {
            Sampling::Midpoint => 0.5,
            Sampling::LeftCorner => 0.0,
        }
    }
}

impl std::str::FromStr for Sampling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "midpoint" => Ok(Sampling::Midpoint),
            "left" | "left-corner" => Ok(Sampling::LeftCorner),
            other => Err(format!("unknown sampling rule `{other}`")),
        }
    }
}

/// A function constant on each box of a finite partition of the region.
///
/// Boxes are stored right-open (closed at the right end `d` of the region),
/// so values on shared faces are never ambiguous. `level`, when present, is
/// a `u` such that every box is a union of level-`u` grid cells.
#[derive(Debug, Clone)]
pub struct StepFunction {
    region: Region,
    pieces: Vec<(CoordBox, Scalar)>,
    level: Option<u32>,
}

/// Hash key that groups equal values; exact and float values never mix.
#[derive(Hash, PartialEq, Eq)]
enum ValueKey {
    Exact(Rational),
    Real(u64),
}

fn value_key(v: &Scalar) -> ValueKey {
    match v {
        Scalar::Exact(q) => ValueKey::Exact(q.clone()),
        Scalar::Real(x) => ValueKey::Real(if *x == 0.0 { 0 } else { x.to_bits() }),
    }
}

fn corner_cmp(a: &CoordBox, b: &CoordBox) -> std::cmp::Ordering {
    a.lower_corner().cmp(&b.lower_corner())
}

impl StepFunction {
    /// Validates that `pieces` tile the region up to null sets.
    pub fn new(region: Region, pieces: Vec<(CoordBox, Scalar)>) -> Result<Self, StepError> {
        let full = region.full_box();
        let mut normalized = Vec::with_capacity(pieces.len());
        for (b, v) in pieces {
            if b.dim() != region.dim() {
                return Err(RegionError::DimensionMismatch {
                    expected: region.dim(),
                    got: b.dim(),
                }
                .into());
            }
            if !b.is_subset_of(&full) {
                return Err(StepError::OutOfRegion(b.to_string()));
            }
            let nb = region.normalize(&b);
            if !nb.is_degenerate() {
                normalized.push((nb, v));
            }
        }
        let volume: Rational = normalized.iter().map(|(b, _)| b.volume()).sum();
        let union = BoxSet::from_boxes(
            region.dim(),
            normalized.iter().map(|(b, _)| b.clone()).collect(),
        )?;
        let whole = BoxSet::from_box(full.clone());
        let gap = whole.subtract(&union)?;
        if let Some(g) = gap.boxes().iter().find(|g| !g.is_degenerate()) {
            return Err(StepError::NotAPartition(format!("gap {g}")));
        }
        if volume != full.volume() {
            for (i, (a, _)) in normalized.iter().enumerate() {
                for (b, _) in &normalized[i + 1..] {
                    let overlap = a.intersect(b);
                    if !overlap.is_empty() {
                        return Err(StepError::NotAPartition(format!(
                            "{a} overlaps {b} on {overlap}"
                        )));
                    }
                }
            }
        }
        let level = grid_level(&region, &normalized);
        Ok(StepFunction {
            region,
            pieces: normalized,
            level,
        })
    }

    /// A function on the level-`level` grid cells, values in lexicographic
    /// cell order.
    pub fn from_grid_values(region: Region, level: u32, values: Vec<Scalar>) -> Self {
        let cells = region.cells(level);
        assert_eq!(cells.len(), values.len(), "one value per grid cell");
        StepFunction {
            region,
            pieces: cells.into_iter().zip(values).collect(),
            level: Some(level),
        }
    }

    pub fn constant(region: Region, value: Scalar) -> Self {
        let full = region.full_box();
        StepFunction {
            region,
            pieces: vec![(full, value)],
            level: Some(0),
        }
    }

    /// `1_{𝕀_Λ}`.
    pub fn one(region: Region) -> Self {
        Self::constant(region, Scalar::one())
    }

    pub fn zero(region: Region) -> Self {
        Self::constant(region, Scalar::zero())
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn pieces(&self) -> &[(CoordBox, Scalar)] {
        &self.pieces
    }

    pub fn level(&self) -> Option<u32> {
        self.level
    }

    /// Smallest `u` with `self ∈ E_u`.
    pub fn min_level(&self) -> Option<u32> {
        grid_level(&self.region, &self.pieces)
    }

    pub fn value_at(&self, x: &[Rational]) -> Option<&Scalar> {
        self.pieces
            .iter()
            .find(|(b, _)| b.contains(x))
            .map(|(_, v)| v)
    }

    /// Merges equal values, drops null boxes and orders pieces by corner.
    pub fn canonicalize(&self) -> StepFunction {
        let dim = self.region.dim();
        let mut groups: HashMap<ValueKey, (Scalar, Vec<CoordBox>)> = HashMap::new();
        for (b, v) in &self.pieces {
            if b.is_degenerate() {
                continue;
            }
            groups
                .entry(value_key(v))
                .or_insert_with(|| (v.clone(), Vec::new()))
                .1
                .push(b.clone());
        }
        let mut pieces: Vec<(CoordBox, Scalar)> = groups
            .into_values()
            .flat_map(|(v, boxes)| {
                let set = BoxSet::from_boxes(dim, boxes).expect("dimensions checked");
                set.boxes()
                    .iter()
                    .map(|b| (b.clone(), v.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        pieces.sort_by(|a, b| corner_cmp(&a.0, &b.0));
        let level = grid_level(&self.region, &pieces);
        StepFunction {
            region: self.region.clone(),
            pieces,
            level,
        }
    }

    /// Rewrites `self` on the level-`u` grid.
    pub fn refine_to_level(&self, u: u32) -> Result<StepFunction, StepError> {
        match self.min_level() {
            Some(l) if l <= u => {}
            _ => return Err(StepError::NotOnGrid { level: u }),
        }
        let iv = self.region.interval();
        let per_axis = 1usize << u;
        let dim = self.region.dim();
        let total = per_axis.pow(dim as u32);
        let mut values = vec![Scalar::zero(); total];
        for (b, v) in &self.pieces {
            if b.is_degenerate() {
                continue;
            }
            let ranges: Vec<(usize, usize)> = b
                .sides()
                .iter()
                .map(|s| {
                    let lo = iv.grid_index(&s.lo, u).expect("on grid");
                    let hi = iv.grid_index(&s.hi, u).expect("on grid");
                    (lo, hi)
                })
                .collect();
            let extents: Vec<usize> = ranges.iter().map(|(lo, hi)| hi - lo).collect();
            let count: usize = extents.iter().product();
            for mut flat in 0..count {
                let mut index = 0usize;
                let mut stride = 1usize;
                for axis in (0..dim).rev() {
                    let offset = flat % extents[axis];
                    flat /= extents[axis];
                    index += (ranges[axis].0 + offset) * stride;
                    stride *= per_axis;
                }
                values[index] = v.clone();
            }
        }
        Ok(StepFunction::from_grid_values(
            self.region.clone(),
            u,
            values,
        ))
    }

    /// Values on the common refinement of `self` and `other`, combined.
    fn zip_with(
        &self,
        other: &StepFunction,
        op: impl Fn(&Scalar, &Scalar) -> Scalar,
    ) -> Result<StepFunction, StepError> {
        if self.region != other.region {
            return Err(StepError::RegionMismatch);
        }
        let dim = self.region.dim();
        let breakpoints: Vec<Vec<Rational>> = (0..dim)
            .map(|axis| {
                let mut pts: Vec<Rational> = self
                    .pieces
                    .iter()
                    .chain(&other.pieces)
                    .flat_map(|(b, _)| [b.side(axis).lo.clone(), b.side(axis).hi.clone()])
                    .collect();
                pts.push(self.region.interval().c().clone());
                pts.push(self.region.interval().d().clone());
                pts.sort();
                pts.dedup();
                pts
            })
            .collect();
        let d = self.region.interval().d();
        let mut pieces = Vec::new();
        let extents: Vec<usize> = breakpoints.iter().map(|p| p.len() - 1).collect();
        let total: usize = extents.iter().product();
        for mut flat in 0..total {
            let mut sides = vec![None; dim];
            for axis in (0..dim).rev() {
                let k = flat % extents[axis];
                flat /= extents[axis];
                let lo = breakpoints[axis][k].clone();
                let hi = breakpoints[axis][k + 1].clone();
                let closed = hi == *d;
                sides[axis] = Some(Interval::new(lo, hi, true, closed));
            }
            let cell = CoordBox::new(sides.into_iter().map(Option::unwrap).collect());
            let corner = cell.lower_corner();
            let a = self.value_at(&corner).cloned().unwrap_or_else(Scalar::zero);
            let b = other
                .value_at(&corner)
                .cloned()
                .unwrap_or_else(Scalar::zero);
            pieces.push((cell, op(&a, &b)));
        }
        let level = grid_level(&self.region, &pieces);
        Ok(StepFunction {
            region: self.region.clone(),
            pieces,
            level,
        }
        .canonicalize())
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction, StepError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction, StepError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Scalar) -> StepFunction {
        StepFunction {
            region: self.region.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|(b, v)| (b.clone(), s * v))
                .collect(),
            level: self.level,
        }
    }

    pub fn abs(&self) -> StepFunction {
        StepFunction {
            region: self.region.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|(b, v)| (b.clone(), v.abs()))
                .collect(),
            level: self.level,
        }
    }

    /// Pointwise view of the function.
    pub fn to_point_fn(&self) -> PointFn {
        let f = self.clone();
        PointFn::new(format!("step[{} pieces]", self.pieces.len()), move |x| {
            let exact: Option<Vec<Rational>> = x.iter().map(|s| s.as_rational().cloned()).collect();
            match exact {
                Some(q) => Ok(f.value_at(&q).cloned().unwrap_or_else(Scalar::zero)),
                None => {
                    let xs: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
                    Ok(f.pieces
                        .iter()
                        .find(|(b, _)| b.sides().iter().zip(&xs).all(|(s, v)| s.contains_f64(*v)))
                        .map(|(_, v)| v.clone())
                        .unwrap_or_else(Scalar::zero))
                }
            }
        })
    }

    /// One `piece <box> = <value>` line per piece.
    pub fn to_block(&self) -> String {
        self.pieces
            .iter()
            .map(|(b, v)| format!("piece {b} = {v}\n"))
            .collect()
    }

    /// Inverse of [`StepFunction::to_block`]; blank lines and `#` comments
    /// are ignored.
    pub fn parse_block(region: Region, src: &str) -> Result<StepFunction, StepError> {
        let mut pieces = Vec::new();
        for raw in src.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || StepError::Parse(line.to_string());
            let rest = line.strip_prefix("piece").ok_or_else(bad)?;
            let (b, v) = rest.rsplit_once('=').ok_or_else(bad)?;
            let b = CoordBox::parse(b).map_err(|_| bad())?;
            let v = parse_rational(v).map_err(|_| bad())?;
            pieces.push((b, Scalar::Exact(v)));
        }
        StepFunction::new(region, pieces)
    }
}

impl PartialEq for StepFunction {
    fn eq(&self, other: &Self) -> bool {
        self.region == other.region && self.pieces == other.pieces
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|(b, v)| format!("{v}·1{b}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl TauModule for StepFunction {
    fn scale_by(&self, factor: &Scalar) -> Self {
        self.scale(factor)
    }
}

fn grid_level(region: &Region, pieces: &[(CoordBox, Scalar)]) -> Option<u32> {
    let iv = region.interval();
    let mut level = 0;
    for (b, _) in pieces {
        for s in b.sides() {
            level = level.max(iv.level_of(&s.lo)?).max(iv.level_of(&s.hi)?);
        }
    }
    Some(level)
}

/// `1_S` on the region.
pub fn indicator(region: &Region, s: &BoxSet) -> Result<StepFunction, StepError> {
    let full = region.full_box();
    for b in s.boxes() {
        if b.dim() != region.dim() {
            return Err(RegionError::DimensionMismatch {
                expected: region.dim(),
                got: b.dim(),
            }
            .into());
        }
        if !b.is_subset_of(&full) {
            return Err(StepError::OutOfRegion(b.to_string()));
        }
    }
    let inside = BoxSet::from_boxes(
        region.dim(),
        s.boxes().iter().map(|b| region.normalize(b)).collect(),
    )?;
    let outside = BoxSet::from_box(full).subtract(&inside)?;
    let pieces = inside
        .boxes()
        .iter()
        .map(|b| (b.clone(), Scalar::one()))
        .chain(
            outside
                .boxes()
                .iter()
                .map(|b| (region.normalize(b), Scalar::zero())),
        )
        .collect();
    Ok(StepFunction::new(region.clone(), pieces)?.canonicalize())
}

/// `(Σ (|k_i| μ(I_i))^p)^{1/p}` over the pieces as given.
pub fn step_norm(f: &StepFunction, p: f64, m: &Measure) -> Result<Scalar, StepError> {
    let mut terms = Vec::with_capacity(f.pieces.len());
    for (b, v) in &f.pieces {
        if v.is_zero() {
            continue;
        }
        let mu = m.box_measure(b)?;
        terms.push(v.abs() * mu);
    }
    Ok(coords_p_norm(&terms, p)?)
}

/// Direct-sum norm `((μ_𝕀(𝕀)/μ(𝕀_Λ))^n Σ ‖x_i‖^p)^{1/p}` on `2^n` components.
pub fn direct_sum_norm(
    norms: &[Scalar],
    p: f64,
    interval_measure: &Scalar,
    region_measure: &Scalar,
    n: usize,
) -> Result<Scalar, StepError> {
    if p.is_nan() || p < 1.0 {
        return Err(AlgebraError::InvalidP(p).into());
    }
    let ratio = interval_measure
        .checked_div(region_measure)
        .map_err(|e| StepError::Measure(MeasureError::Eval(e.into())))?;
    let factor = ratio.powi(n as i64).expect("nonzero ratio");
    let sum: Scalar = norms
        .iter()
        .map(|x| {
            if p == 1.0 {
                x.abs()
            } else {
                Scalar::Real(x.to_f64().abs().powf(p))
            }
        })
        .sum();
    let inner = factor * sum;
    Ok(if p == 1.0 {
        inner
    } else {
        Scalar::Real(inner.to_f64().powf(1.0 / p))
    })
}

/// Assembles `2^n` functions into one on the next level, placing `fs[j]`
/// on the subbox `κ_{δ_1}(𝕀) × … × κ_{δ_n}(𝕀)` where `δ` is the binary
/// expansion of `j` (first axis most significant).
pub fn gamma_xi(fs: &[StepFunction]) -> Result<StepFunction, StepError> {
    let first = fs.first().ok_or(StepError::ArityMismatch {
        expected: 2,
        got: 0,
    })?;
    let region = first.region.clone();
    let n = region.dim();
    let expected = 1usize << n;
    if fs.len() != expected {
        return Err(StepError::ArityMismatch {
            expected,
            got: fs.len(),
        });
    }
    let mut u = 0;
    for f in fs {
        if f.region != region {
            return Err(StepError::RegionMismatch);
        }
        u = u.max(f.min_level().ok_or(StepError::NotOnGrid { level: 0 })?);
    }
    let iv = region.interval();
    let mut pieces = Vec::new();
    for (j, f) in fs.iter().enumerate() {
        for (b, v) in &f.pieces {
            let sides = b
                .sides()
                .iter()
                .enumerate()
                .map(|(axis, s)| {
                    let right = (j >> (n - 1 - axis)) & 1 == 1;
                    let map = |x: &Rational| {
                        if right {
                            iv.kappa_d(x)
                        } else {
                            iv.kappa_c(x)
                        }
                    };
                    Interval::new(map(&s.lo), map(&s.hi), true, false)
                })
                .collect();
            let mapped = region.normalize(&CoordBox::new(sides));
            if !mapped.is_degenerate() {
                pieces.push((mapped, v.clone()));
            }
        }
    }
    let out = StepFunction {
        level: Some(u + 1),
        region,
        pieces,
    };
    Ok(out.canonicalize())
}

/// Samples `g` once per level-`u` cell; values stay in cell order
/// regardless of how the evaluation is scheduled.
pub fn sample_to_step(
    g: &PointFn,
    region: &Region,
    u: u32,
    rule: Sampling,
) -> Result<StepFunction, StepError> {
    let axis = region.interval().bisect(u);
    let dim = region.dim();
    let indices: Vec<Vec<usize>> = multi_indices(dim, axis.len()).collect();
    let values: Result<Vec<Scalar>, StepError> = indices
        .par_iter()
        .map(|idx| {
            let cell = CoordBox::new(idx.iter().map(|&i| axis[i].clone()).collect());
            let x: Vec<Scalar> = rule.point(&cell).into_iter().map(Scalar::Exact).collect();
            g.call(&x).map_err(|source| StepError::Evaluation {
                cell: cell.to_string(),
                source,
            })
        })
        .collect();
    Ok(StepFunction::from_grid_values(region.clone(), u, values?))
}

/// `true` when `f` vanishes almost everywhere.
pub fn is_null(f: &StepFunction) -> bool {
    f.pieces
        .iter()
        .all(|(b, v)| v.is_zero() || b.volume().is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn q(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    fn bx(s: &str) -> CoordBox {
        CoordBox::parse(s).unwrap()
    }

    fn line() -> Region {
        Region::unit_cube(1)
    }

    fn step(region: &Region, parts: &[(&str, Scalar)]) -> StepFunction {
        StepFunction::new(
            region.clone(),
            parts.iter().map(|(b, v)| (bx(b), v.clone())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn indicator_of_region_and_empty() {
        let r = line();
        let full = BoxSet::from_box(r.full_box());
        assert_eq!(indicator(&r, &full).unwrap(), StepFunction::one(r.clone()));
        assert_eq!(
            indicator(&r, &BoxSet::empty(1)).unwrap(),
            StepFunction::zero(r.clone())
        );
        let half = indicator(&r, &BoxSet::from_box(bx("[0,1/2)"))).unwrap();
        assert_eq!(
            step_norm(&half, 1.0, &Measure::Lebesgue).unwrap(),
            Scalar::ratio(1, 2)
        );
        let outside = BoxSet::from_box(bx("[0,2]"));
        assert!(matches!(
            indicator(&r, &outside),
            Err(StepError::OutOfRegion(_))
        ));
    }

    #[test]
    fn canonicalize_merges_and_drops() {
        let r = line();
        let f = step(
            &r,
            &[("[0,1/2)", Scalar::int(3)), ("[1/2,1]", Scalar::int(3))],
        );
        let c = f.canonicalize();
        assert_eq!(c.pieces().len(), 1);
        assert_eq!(c.pieces()[0].0, bx("[0,1]"));
        let g = step(
            &r,
            &[
                ("[0,1/3)", Scalar::int(1)),
                ("[1/3,1/3]", Scalar::int(7)),
                ("[1/3,1]", Scalar::int(2)),
            ],
        );
        assert_eq!(g.canonicalize().pieces().len(), 2);
        assert_eq!(c.canonicalize(), c);
    }

    #[test]
    fn partition_errors() {
        let r = line();
        let gap = StepFunction::new(r.clone(), vec![(bx("[0,1/4)"), Scalar::one())]);
        assert!(matches!(gap, Err(StepError::NotAPartition(_))));
        let overlap = StepFunction::new(
            r.clone(),
            vec![
                (bx("[0,3/4)"), Scalar::one()),
                (bx("[1/2,1]"), Scalar::one()),
            ],
        );
        assert!(matches!(overlap, Err(StepError::NotAPartition(_))));
    }

    #[test]
    fn refine_to_level_counts() {
        let r = Region::unit_cube(2);
        let one = StepFunction::one(r.clone());
        let fine = one.refine_to_level(2).unwrap();
        assert_eq!(fine.pieces().len(), 16);
        assert!(fine.pieces().iter().all(|(_, v)| *v == Scalar::one()));
        let third = step(
            &line(),
            &[("[0,1/3)", Scalar::one()), ("[1/3,1]", Scalar::zero())],
        );
        assert!(matches!(
            third.refine_to_level(5),
            Err(StepError::NotOnGrid { .. })
        ));
        let quarter = step(
            &line(),
            &[("[0,1/4)", Scalar::one()), ("[1/4,1]", Scalar::zero())],
        );
        assert!(matches!(
            quarter.refine_to_level(1),
            Err(StepError::NotOnGrid { .. })
        ));
        let refined = quarter.refine_to_level(3).unwrap();
        assert_eq!(refined.canonicalize(), quarter.canonicalize());
    }

    #[test]
    fn norm_examples() {
        let r = line();
        let f = step(
            &r,
            &[("[0,1/2)", Scalar::int(2)), ("[1/2,1]", Scalar::zero())],
        );
        assert_eq!(
            step_norm(&f, 1.0, &Measure::Lebesgue).unwrap(),
            Scalar::one()
        );
        assert_eq!(
            step_norm(&StepFunction::one(r), 1.0, &Measure::Lebesgue).unwrap(),
            Scalar::one()
        );
        assert!(step_norm(&f, 0.5, &Measure::Lebesgue).is_err());
    }

    #[test]
    fn gamma_of_ones_is_one() {
        for n in 1..=2 {
            let r = Region::unit_cube(n);
            let fs = vec![StepFunction::one(r.clone()); 1 << n];
            assert_eq!(gamma_xi(&fs).unwrap(), StepFunction::one(r));
        }
        let r = line();
        assert!(matches!(
            gamma_xi(&[StepFunction::one(r)]),
            Err(StepError::ArityMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn gamma_rescales_pieces() {
        let r = line();
        let f = step(
            &r,
            &[("[0,1/2)", Scalar::int(1)), ("[1/2,1]", Scalar::int(2))],
        );
        let g = step(
            &r,
            &[("[0,1/2)", Scalar::int(3)), ("[1/2,1]", Scalar::int(4))],
        );
        let h = gamma_xi(&[f, g]).unwrap();
        assert_eq!(h.level(), Some(2));
        for (x, want) in [
            (q(1, 8), 1),
            (q(3, 8), 2),
            (q(5, 8), 3),
            (q(7, 8), 4),
            (q(1, 1), 4),
        ] {
            assert_eq!(h.value_at(&[x]).unwrap(), &Scalar::int(want));
        }
        // dividing face goes to the right-hand subbox
        assert_eq!(h.value_at(&[q(1, 2)]).unwrap(), &Scalar::int(3));
    }

    #[test]
    fn sampling_identity() {
        let r = line();
        let g = PointFn::new("x", |x| Ok(x[0].clone()));
        let s = sample_to_step(&g, &r, 1, Sampling::Midpoint).unwrap();
        let values: Vec<_> = s.pieces().iter().map(|(_, v)| v.clone()).collect();
        assert_eq!(values, vec![Scalar::ratio(1, 4), Scalar::ratio(3, 4)]);
        let left = sample_to_step(&g, &r, 1, Sampling::LeftCorner).unwrap();
        assert_eq!(left.pieces()[1].1, Scalar::ratio(1, 2));
        let c = sample_to_step(
            &PointFn::constant(Scalar::int(5)),
            &r,
            3,
            Sampling::Midpoint,
        )
        .unwrap();
        assert_eq!(c.canonicalize(), StepFunction::constant(r, Scalar::int(5)));
    }

    #[test]
    fn sampling_reports_cell() {
        let r = line();
        let g = PointFn::new("1/x", |x| Ok(Scalar::one().checked_div(&x[0])?));
        let err = sample_to_step(&g, &r, 1, Sampling::LeftCorner).unwrap_err();
        match err {
            StepError::Evaluation { cell, .. } => assert_eq!(cell, "[0,1/2)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn add_uses_common_refinement() {
        let r = line();
        let f = step(
            &r,
            &[("[0,1/3)", Scalar::int(1)), ("[1/3,1]", Scalar::int(0))],
        );
        let g = step(
            &r,
            &[("[0,1/2)", Scalar::int(0)), ("[1/2,1]", Scalar::int(1))],
        );
        let h = f.add(&g).unwrap();
        assert_eq!(h.value_at(&[q(1, 4)]).unwrap(), &Scalar::one());
        assert_eq!(h.value_at(&[q(2, 5)]).unwrap(), &Scalar::zero());
        assert_eq!(h.value_at(&[q(3, 4)]).unwrap(), &Scalar::one());
        assert_eq!(h.pieces().len(), 3);
    }

    #[test]
    fn block_round_trip() {
        let r = Region::unit_cube(2);
        let f = step(
            &r,
            &[
                ("[0,1/2)x[0,1]", Scalar::ratio(1, 3)),
                ("[1/2,1]x[0,1]", Scalar::int(-2)),
            ],
        );
        let text = f.to_block();
        assert_eq!(StepFunction::parse_block(r, &text).unwrap(), f);
    }

    #[test]
    fn direct_sum_norm_formula() {
        let v = direct_sum_norm(
            &[Scalar::one(), Scalar::int(2)],
            1.0,
            &Scalar::one(),
            &Scalar::one(),
            1,
        )
        .unwrap();
        assert_eq!(v, Scalar::int(3));
    }

    #[test]
    fn point_fn_view() {
        let r = line();
        let f = step(
            &r,
            &[("[0,1/2)", Scalar::int(1)), ("[1/2,1]", Scalar::int(2))],
        );
        let p = f.to_point_fn();
        assert_eq!(p.call(&[Scalar::ratio(1, 4)]).unwrap(), Scalar::int(1));
        assert_eq!(p.call(&[Scalar::Real(0.75)]).unwrap(), Scalar::int(2));
        assert!(!is_null(&f));
        assert!(is_null(&StepFunction::zero(r)));
    }
}
