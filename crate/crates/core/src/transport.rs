//! Measure-preserving maps between integration regions, transport of
//! functions along them, and generator-level verification.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::linalg::{self, Matrix};
use crate::algebra::{Algebra, AlgebraElement, AlgebraError};
use crate::expr::EvalError;
use crate::func::{PointFn, PointMap, UnaryFn};
use crate::integrator::{integrate, Integral, Integrand, IntegratorConfig, IntegratorError};
use crate::measure::{Measure, MeasureError};
use crate::region::{BoxSet, CoordBox, Interval, Region, RegionError};
use crate::scalar::{Rational, Scalar, ScalarSum};
use crate::step::{StepError, StepFunction};

/// Printed with every preservation report.
pub const DISCLOSURE: &str = "generator-level check: only level grid boxes and a seeded sample of \
their finite unions were compared; this does not certify the identity on every measurable set";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("box image undefined for {0}")]
    BoxImageUndefined(String),
    #[error("pairing is not an algebra isomorphism: product ({i}, {j}) maps to {got}, expected {expected}")]
    NotAnAlgebraIso {
        i: usize,
        j: usize,
        got: String,
        expected: String,
    },
    #[error("source has dimension {source_dim} but target has dimension {target_dim}")]
    DimensionMismatch {
        source_dim: usize,
        target_dim: usize,
    },
    #[error("invalid transport: {0}")]
    Invalid(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportKind {
    Injection,
    Bijection,
    StandardIso,
}

impl fmt::Display for TransportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransportKind::Injection => "injection",
            TransportKind::Bijection => "bijection",
            TransportKind::StandardIso => "standard isomorphism",
        })
    }
}

/// How boxes of the source region are carried to the target.
#[derive(Debug, Clone)]
pub enum BoxImage {
    Identity,
    /// Each coordinate is mapped by an increasing function, given together
    /// with its inverse.
    Monotone {
        forward: Vec<UnaryFn>,
        inverse: Vec<UnaryFn>,
    },
    /// A lookup table of source boxes and their images.
    Explicit(Vec<(CoordBox, BoxSet)>),
}

/// An injection `ω` with left inverse `ϖ` and link `𝔉`.
///
/// With a frame `P`, source points are coordinates in a basis of the
/// source algebra and `P` converts them to the algebra's own coordinates;
/// functions handed to [`TransportMap::transport_function`] are written in
/// those native coordinates.
#[derive(Debug, Clone)]
pub struct TransportMap {
    source: Region,
    target: Region,
    forward: PointMap,
    inverse: PointMap,
    box_image: BoxImage,
    link: UnaryFn,
    kind: TransportKind,
    frame: Option<(Matrix, Matrix)>,
    algebras: Option<(Arc<Algebra>, Arc<Algebra>)>,
}

/// A transported function, with a note when it could not stay a step
/// function.
#[derive(Debug, Clone)]
pub struct Transported {
    pub integrand: Integrand,
    pub warning: Option<String>,
}

fn exact_image(f: &UnaryFn, x: &Rational) -> Result<Rational, TransportError> {
    match f.call(&Scalar::Exact(x.clone()))? {
        Scalar::Exact(q) => Ok(q),
        Scalar::Real(v) => Err(TransportError::BoxImageUndefined(format!(
            "{}({}) = {v} is not rational",
            f.label(),
            Scalar::Exact(x.clone())
        ))),
    }
}

fn map_box_monotone(b: &CoordBox, maps: &[UnaryFn]) -> Result<CoordBox, TransportError> {
    let sides = b
        .sides()
        .iter()
        .zip(maps)
        .map(|(s, f)| {
            let lo = exact_image(f, &s.lo)?;
            let hi = exact_image(f, &s.hi)?;
            if lo > hi {
                return Err(TransportError::BoxImageUndefined(format!(
                    "{} is not increasing on {s}",
                    f.label()
                )));
            }
            Ok(Interval::new(lo, hi, s.lo_closed, s.hi_closed))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoordBox::new(sides))
}

impl TransportMap {
    pub fn identity(region: Region) -> Self {
        TransportMap {
            source: region.clone(),
            target: region,
            forward: PointMap::identity(),
            inverse: PointMap::identity(),
            box_image: BoxImage::Identity,
            link: UnaryFn::identity(),
            kind: TransportKind::Bijection,
            frame: None,
            algebras: None,
        }
    }

    /// `ω(x)_i = forward_i(x_i)` with increasing `forward_i`.
    pub fn coordinatewise(
        source: Region,
        target: Region,
        forward: Vec<UnaryFn>,
        inverse: Vec<UnaryFn>,
        link: UnaryFn,
        kind: TransportKind,
    ) -> Result<Self, TransportError> {
        Self::check_dims(&source, &target)?;
        if forward.len() != source.dim() || inverse.len() != source.dim() {
            return Err(TransportError::Invalid(format!(
                "need {} forward and inverse maps",
                source.dim()
            )));
        }
        Ok(TransportMap {
            forward: PointMap::coordinatewise(forward.clone()),
            inverse: PointMap::coordinatewise(inverse.clone()),
            box_image: BoxImage::Monotone { forward, inverse },
            source,
            target,
            link,
            kind,
            frame: None,
            algebras: None,
        })
    }

    /// A general point map whose box images are supplied as a table.
    pub fn explicit(
        source: Region,
        target: Region,
        forward: PointMap,
        inverse: PointMap,
        table: Vec<(CoordBox, BoxSet)>,
        link: UnaryFn,
        kind: TransportKind,
    ) -> Result<Self, TransportError> {
        Self::check_dims(&source, &target)?;
        let table = table
            .into_iter()
            .map(|(b, img)| (source.normalize(&b), img))
            .collect();
        Ok(TransportMap {
            source,
            target,
            forward,
            inverse,
            box_image: BoxImage::Explicit(table),
            link,
            kind,
            frame: None,
            algebras: None,
        })
    }

    /// The isomorphism sending `pairing[i]` (an element of `a1`) to the
    /// `i`-th basis vector of `a2`. Both regions are `region`, points are
    /// coordinates in the paired bases, and the map is the identity on them.
    pub fn standard_iso(
        a1: &Arc<Algebra>,
        a2: &Arc<Algebra>,
        pairing: &[AlgebraElement],
        region: Region,
    ) -> Result<Self, TransportError> {
        let n = a1.dim();
        if a2.dim() != n || region.dim() != n {
            return Err(TransportError::DimensionMismatch {
                source_dim: n,
                target_dim: a2.dim(),
            });
        }
        if pairing.len() != n {
            return Err(TransportError::Invalid(format!(
                "pairing has {} elements, need {n}",
                pairing.len()
            )));
        }
        let mut basis = Vec::with_capacity(n);
        for p in pairing {
            if p.algebra().as_ref() != a1.as_ref() {
                return Err(AlgebraError::AlgebraMismatch.into());
            }
            basis.push(p.exact_coords().ok_or_else(|| {
                TransportError::Invalid("pairing elements need exact coordinates".into())
            })?);
        }
        let labels = a2.labels().to_vec();
        let adapted = a1.rebase(labels, &basis)?;
        for i in 0..n {
            for j in 0..n {
                if adapted.table()[i][j] != a2.table()[i][j] {
                    let show = |v: &[Rational]| {
                        AlgebraElement::from_rationals(a2, v)
                            .map(|e| e.to_string())
                            .unwrap_or_default()
                    };
                    return Err(TransportError::NotAnAlgebraIso {
                        i,
                        j,
                        got: show(&adapted.table()[i][j]),
                        expected: show(&a2.table()[i][j]),
                    });
                }
            }
        }
        let p = linalg::from_columns(&basis);
        let p_inv = linalg::invert(&p).ok_or(AlgebraError::SingularBasis)?;
        let is_identity = p == linalg::identity(n);
        Ok(TransportMap {
            source: region.clone(),
            target: region,
            forward: PointMap::identity(),
            inverse: PointMap::identity(),
            box_image: BoxImage::Identity,
            link: UnaryFn::identity(),
            kind: TransportKind::StandardIso,
            frame: (!is_identity).then_some((p, p_inv)),
            algebras: Some((Arc::clone(a1), Arc::clone(a2))),
        })
    }

    /// Pairs `b_{1, perm[i]}` with `b_{2, i}`.
    pub fn standard_iso_permutation(
        a1: &Arc<Algebra>,
        a2: &Arc<Algebra>,
        perm: &[usize],
        region: Region,
    ) -> Result<Self, TransportError> {
        if perm.iter().any(|&k| k >= a1.dim()) {
            return Err(TransportError::Invalid(
                "permutation index out of range".into(),
            ));
        }
        let pairing: Vec<AlgebraElement> =
            perm.iter().map(|&k| AlgebraElement::basis(a1, k)).collect();
        Self::standard_iso(a1, a2, &pairing, region)
    }

    fn check_dims(source: &Region, target: &Region) -> Result<(), TransportError> {
        if source.dim() != target.dim() {
            return Err(TransportError::DimensionMismatch {
                source_dim: source.dim(),
                target_dim: target.dim(),
            });
        }
        Ok(())
    }

    pub fn with_link(mut self, link: UnaryFn) -> Self {
        self.link = link;
        self
    }

    pub fn source(&self) -> &Region {
        &self.source
    }

    pub fn target(&self) -> &Region {
        &self.target
    }

    pub fn kind(&self) -> TransportKind {
        self.kind
    }

    pub fn link(&self) -> &UnaryFn {
        &self.link
    }

    pub fn forward(&self) -> &PointMap {
        &self.forward
    }

    pub fn inverse(&self) -> &PointMap {
        &self.inverse
    }

    pub fn algebras(&self) -> Option<&(Arc<Algebra>, Arc<Algebra>)> {
        self.algebras.as_ref()
    }

    /// Frame matrix `P` (paired coordinates to native ones), if not the identity.
    pub fn frame(&self) -> Option<&Matrix> {
        self.frame.as_ref().map(|(p, _)| p)
    }

    /// `ω(S)` for a source box.
    pub fn box_image(&self, b: &CoordBox) -> Result<BoxSet, TransportError> {
        match &self.box_image {
            BoxImage::Identity => Ok(BoxSet::from_box(b.clone())),
            BoxImage::Monotone { forward, .. } => {
                Ok(BoxSet::from_box(map_box_monotone(b, forward)?))
            }
            BoxImage::Explicit(table) => {
                let nb = self.source.normalize(b);
                table
                    .iter()
                    .find(|(s, _)| *s == nb)
                    .map(|(_, img)| img.clone())
                    .ok_or_else(|| TransportError::BoxImageUndefined(b.to_string()))
            }
        }
    }

    /// `ω(S)` for a finite union, assembled box by box.
    pub fn set_image(&self, s: &BoxSet) -> Result<BoxSet, TransportError> {
        let mut out = BoxSet::empty(self.target.dim());
        for b in s.boxes() {
            out = out.union(&self.box_image(b)?)?;
        }
        Ok(out)
    }

    /// `ω(𝕀_1)`; for a table this is the union of the listed images.
    pub fn full_image(&self) -> Result<BoxSet, TransportError> {
        match &self.box_image {
            BoxImage::Explicit(table) => {
                let mut out = BoxSet::empty(self.target.dim());
                for (_, img) in table {
                    out = out.union(img)?;
                }
                Ok(out)
            }
            _ => self.set_image(&BoxSet::from_box(self.source.full_box())),
        }
    }

    /// `ϖ(T)` for a target box, when it can be written down exactly.
    fn box_preimage(&self, b: &CoordBox) -> Result<CoordBox, TransportError> {
        match &self.box_image {
            BoxImage::Identity => Ok(b.clone()),
            BoxImage::Monotone { inverse, .. } => map_box_monotone(b, inverse),
            BoxImage::Explicit(table) => table
                .iter()
                .find(|(_, img)| img.boxes() == [b.clone()])
                .map(|(s, _)| s.clone())
                .ok_or_else(|| TransportError::BoxImageUndefined(b.to_string())),
        }
    }

    fn to_native(&self, x: &[Scalar]) -> Vec<Scalar> {
        match &self.frame {
            None => x.to_vec(),
            Some((p, _)) => apply_matrix(p, x),
        }
    }

    fn native_to_basis(&self, x: &[Scalar]) -> Vec<Scalar> {
        match &self.frame {
            None => x.to_vec(),
            Some((_, p_inv)) => apply_matrix(p_inv, x),
        }
    }

    /// The integrand on the source region: `f ∘ P`.
    pub fn source_integrand(&self, f: &Integrand) -> Integrand {
        if self.frame.is_none() {
            return f.clone();
        }
        let t = self.clone();
        let pf = f.as_point_fn();
        Integrand::Point(PointFn::new(format!("{}∘P", pf.label()), move |x| {
            pf.call(&t.to_native(x))
        }))
    }

    fn in_region(region: &Region, x: &[Scalar]) -> bool {
        let c = Scalar::Exact(region.interval().c().clone());
        let d = Scalar::Exact(region.interval().d().clone());
        x.len() == region.dim() && x.iter().all(|v| *v >= c && *v <= d)
    }

    /// `g = f ∘ ϖ`, zero off the image of `ω`.
    pub fn transport_function(&self, f: &Integrand) -> Result<Transported, TransportError> {
        if let (Integrand::Step(s), None) = (f, &self.frame) {
            match self.transport_step(s) {
                Ok(g) => {
                    return Ok(Transported {
                        integrand: Integrand::Step(g),
                        warning: None,
                    })
                }
                Err(e) => {
                    return Ok(Transported {
                        integrand: self.transport_pointwise(f),
                        warning: Some(format!("NotStepPreserving: {e}; using the pointwise form")),
                    })
                }
            }
        }
        let warning = matches!(f, Integrand::Step(_)).then(|| {
            "NotStepPreserving: the frame change does not map boxes to boxes; using the pointwise form"
                .to_string()
        });
        Ok(Transported {
            integrand: self.transport_pointwise(f),
            warning,
        })
    }

    fn transport_step(&self, s: &StepFunction) -> Result<StepFunction, TransportError> {
        if s.region() != &self.source {
            return Err(StepError::RegionMismatch.into());
        }
        let mut pieces = Vec::new();
        let mut covered = BoxSet::empty(self.target.dim());
        for (b, v) in s.pieces() {
            let img = self.box_image(b)?;
            covered = covered.union(&img)?;
            for ib in img.boxes() {
                pieces.push((ib.clone(), v.clone()));
            }
        }
        let rest = BoxSet::from_box(self.target.full_box()).subtract(&covered)?;
        for b in rest.boxes() {
            pieces.push((b.clone(), Scalar::zero()));
        }
        Ok(StepFunction::new(self.target.clone(), pieces)?.canonicalize())
    }

    fn transport_pointwise(&self, f: &Integrand) -> Integrand {
        let pf = f.as_point_fn();
        let t = self.clone();
        Integrand::Point(PointFn::new(format!("{}∘ϖ", pf.label()), move |y| {
            let x = t.inverse.call(y)?;
            if !Self::in_region(&t.source, &x) {
                return Ok(Scalar::zero());
            }
            pf.call(&t.to_native(&x))
        }))
    }

    /// `g ∘ ω`, written in native source coordinates.
    pub fn pullback_function(&self, g: &Integrand) -> Result<Transported, TransportError> {
        if let (Integrand::Step(s), None) = (g, &self.frame) {
            if let Ok(h) = self.pullback_step(s) {
                return Ok(Transported {
                    integrand: Integrand::Step(h),
                    warning: None,
                });
            }
        }
        let pg = g.as_point_fn();
        let t = self.clone();
        Ok(Transported {
            integrand: Integrand::Point(PointFn::new(format!("{}∘ω", pg.label()), move |x| {
                let y = t.forward.call(&t.native_to_basis(x))?;
                pg.call(&y)
            })),
            warning: None,
        })
    }

    fn pullback_step(&self, s: &StepFunction) -> Result<StepFunction, TransportError> {
        if s.region() != &self.target {
            return Err(StepError::RegionMismatch.into());
        }
        let image = self.full_image()?;
        let mut pieces = Vec::new();
        for (b, v) in s.pieces() {
            let inside = BoxSet::from_box(b.clone()).intersect(&image)?;
            for ib in inside.boxes() {
                if ib.is_degenerate() {
                    continue;
                }
                pieces.push((self.box_preimage(&self.target.normalize(ib))?, v.clone()));
            }
        }
        Ok(StepFunction::new(self.source.clone(), pieces)?.canonicalize())
    }

    /// Largest `|ϖ(ω(x)) − x|` over the level-`level` grid points.
    pub fn round_trip_error(&self, level: u32) -> Result<f64, TransportError> {
        let pts = self.source.interval().grid(level);
        let n = self.source.dim();
        let mut worst = 0.0f64;
        for idx in crate::region::multi_indices(n, pts.len()) {
            let x: Vec<Scalar> = idx.iter().map(|&i| Scalar::Exact(pts[i].clone())).collect();
            let back = self.inverse.call(&self.forward.call(&x)?)?;
            for (a, b) in back.iter().zip(&x) {
                worst = worst.max((a - b).abs().to_f64());
            }
        }
        Ok(worst)
    }
}

fn apply_matrix(m: &Matrix, x: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| {
            let mut acc = ScalarSum::new();
            for (a, v) in row.iter().zip(x) {
                acc.add(&(Scalar::Exact(a.clone()) * v));
            }
            acc.finish()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCheck {
    pub set: String,
    /// `𝔉(μ_1(S))`, or `𝔉(μ_1(ϖ(T)))` in the companion check.
    pub lhs: Scalar,
    /// `μ_2(ω(S))`, or `μ_2(T)` in the companion check.
    pub rhs: Scalar,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct PreservationReport {
    pub level: u32,
    pub boxes: Vec<BoxCheck>,
    pub unions: Vec<BoxCheck>,
    pub companion: Vec<BoxCheck>,
    pub companion_note: Option<String>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Pairs of distinct grid boxes whose images overlap in positive `μ_2` measure.
    pub overlaps: Vec<(String, String)>,
    pub disclosure: &'static str,
}

impl fmt::Display for PreservationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "level {} generators, tolerance {:e}",
            self.level, self.tolerance
        )?;
        writeln!(
            f,
            "{:<40} {:>22} {:>22} {:>12}",
            "set", "F(mu1(S))", "mu2(w(S))", "|diff|"
        )?;
        for row in self.boxes.iter().chain(&self.unions) {
            writeln!(
                f,
                "{:<40} {:>22} {:>22} {:>12.3e}",
                row.set,
                row.lhs.to_decimal_string(15),
                row.rhs.to_decimal_string(15),
                row.deviation
            )?;
        }
        if !self.companion.is_empty() {
            writeln!(f, "inverse check on target boxes:")?;
            for row in &self.companion {
                writeln!(
                    f,
                    "{:<40} {:>22} {:>22} {:>12.3e}",
                    row.set,
                    row.lhs.to_decimal_string(15),
                    row.rhs.to_decimal_string(15),
                    row.deviation
                )?;
            }
        }
        if let Some(note) = &self.companion_note {
            writeln!(f, "note: {note}")?;
        }
        for (a, b) in &self.overlaps {
            writeln!(f, "overlap: images of {a} and {b} intersect")?;
        }
        writeln!(
            f,
            "max deviation {:.3e}: {}",
            self.max_deviation,
            if self.pass { "PASS" } else { "FAIL" }
        )?;
        write!(f, "{}", self.disclosure)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub level: u32,
    pub tolerance: f64,
    /// Number of random unions of grid boxes to check.
    pub unions: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            level: 3,
            tolerance: 1e-12,
            unions: 32,
            seed: 0x5eed,
        }
    }
}

fn check(set: String, lhs: Scalar, rhs: Scalar) -> BoxCheck {
    let deviation = (&lhs - &rhs).abs().to_f64();
    BoxCheck {
        set,
        lhs,
        rhs,
        deviation,
    }
}

/// Compares `𝔉(μ_1(S))` with `μ_2(ω(S))` on the level grid boxes, on random
/// finite unions of them, and `𝔉(μ_1(ϖ(T)))` with `μ_2(T)` on target grid
/// boxes meeting the image.
pub fn verify_measure_preserving(
    t: &TransportMap,
    mu1: &Measure,
    mu2: &Measure,
    opts: &VerifyOptions,
) -> Result<PreservationReport, TransportError> {
    let link = &t.link;
    let cells = t.source.cells(opts.level);
    let mut boxes = Vec::with_capacity(cells.len());
    let mut images = Vec::with_capacity(cells.len());
    for cell in &cells {
        let img = t.box_image(cell)?;
        let lhs = link.call(&mu1.box_measure(cell)?)?;
        let rhs = mu2.measure_of(&img)?;
        boxes.push(check(cell.to_string(), lhs, rhs));
        images.push(img);
    }

    let mut overlaps = Vec::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let both = images[i].intersect(&images[j])?;
            if !both.is_empty() && !mu2.measure_of(&both)?.is_zero() {
                overlaps.push((cells[i].to_string(), cells[j].to_string()));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut unions = Vec::with_capacity(opts.unions);
    for _ in 0..opts.unions {
        let chosen: Vec<usize> = (0..cells.len()).filter(|_| rng.gen_bool(0.5)).collect();
        if chosen.is_empty() {
            continue;
        }
        let set = BoxSet::from_boxes(
            t.source.dim(),
            chosen.iter().map(|&i| cells[i].clone()).collect(),
        )?;
        let mut image = BoxSet::empty(t.target.dim());
        for &i in &chosen {
            image = image.union(&images[i])?;
        }
        let lhs = link.call(&mu1.measure_of(&set)?)?;
        let rhs = mu2.measure_of(&image)?;
        let label = format!("union of {} grid boxes", chosen.len());
        unions.push(check(label, lhs, rhs));
    }

    let (companion, companion_note) = companion_check(t, mu1, mu2, opts.level)?;

    let max_deviation = boxes
        .iter()
        .chain(&unions)
        .chain(&companion)
        .map(|r| r.deviation)
        .fold(0.0, f64::max);
    Ok(PreservationReport {
        level: opts.level,
        boxes,
        unions,
        companion,
        companion_note,
        max_deviation,
        tolerance: opts.tolerance,
        pass: max_deviation <= opts.tolerance,
        overlaps,
        disclosure: DISCLOSURE,
    })
}

fn companion_check(
    t: &TransportMap,
    mu1: &Measure,
    mu2: &Measure,
    level: u32,
) -> Result<(Vec<BoxCheck>, Option<String>), TransportError> {
    let image = t.full_image()?;
    let mut rows = Vec::new();
    let mut note = (t.kind == TransportKind::Injection)
        .then(|| "target boxes are intersected with the image of the source region".to_string());
    for cell in t.target.cells(level) {
        let inside = BoxSet::from_box(cell.clone()).intersect(&image)?;
        let mut pre = ScalarSum::new();
        for b in inside.boxes() {
            pre.add(&preimage_measure(t, mu1, b)?);
        }
        let lhs = t.link.call(&pre.finish())?;
        let rhs = mu2.measure_of(&inside)?;
        rows.push(check(cell.to_string(), lhs, rhs));
    }
    if matches!(t.box_image, BoxImage::Explicit(_)) {
        note = Some("preimages come from the explicit box-image table".into());
    }
    Ok((rows, note))
}

/// `μ_1(ϖ(B))`, evaluated on inexact endpoints when the inverse is not
/// rational-valued.
fn preimage_measure(
    t: &TransportMap,
    mu1: &Measure,
    b: &CoordBox,
) -> Result<Scalar, TransportError> {
    match &t.box_image {
        BoxImage::Identity => Ok(mu1.box_measure(b)?),
        BoxImage::Explicit(_) => Ok(mu1.box_measure(&t.box_preimage(b)?)?),
        BoxImage::Monotone { inverse, .. } => {
            if let Ok(pre) = map_box_monotone(b, inverse) {
                return Ok(mu1.box_measure(&pre)?);
            }
            let mut acc = Scalar::one();
            for (side, g) in b.sides().iter().zip(inverse) {
                let lo = g.call(&Scalar::Exact(side.lo.clone()))?;
                let hi = g.call(&Scalar::Exact(side.hi.clone()))?;
                acc = acc * mu1.half_open_measure(&lo, &hi)?;
            }
            Ok(acc)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChangeOfMeasure {
    /// `∫ f d(𝔉∘μ_1)` over the source region.
    pub lhs: Integral,
    /// `∫ f∘ϖ dμ_2` over the target region.
    pub rhs: Integral,
    pub difference: Scalar,
    pub warning: Option<String>,
}

/// Both sides of the change-of-measure identity for `f` along `t`.
pub fn theorem35_check(
    f: &Integrand,
    t: &TransportMap,
    mu1: &Measure,
    mu2: &Measure,
    cfg: &IntegratorConfig,
) -> Result<ChangeOfMeasure, TransportError> {
    let composed = Measure::composed(t.link.clone(), mu1.clone());
    let lhs = integrate(&t.source_integrand(f), &t.source, &composed, cfg)?;
    let moved = t.transport_function(f)?;
    let rhs = integrate(&moved.integrand, &t.target, mu2, cfg)?;
    let difference = (&lhs.value - &rhs.value).abs();
    Ok(ChangeOfMeasure {
        lhs,
        rhs,
        difference,
        warning: moved.warning,
    })
}
