//! Product Lebesgue measure, Lebesgue-Stieltjes measures of piecewise
//! monotone `φ`, and measures composed with a link function.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::expr::EvalError;
use crate::func::UnaryFn;
use crate::region::{BoxSet, CoordBox, Interval, OrderedInterval};
use crate::scalar::{Rational, Scalar};

/// Samples per piece used when checking that `φ` never decreases.
const MONOTONE_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("phi decreases near x = {at}: {detail}")]
    NonMonotonePhi { at: String, detail: String },
    #[error("invalid phi model: {0}")]
    InvalidPhi(String),
    #[error("measure is undefined: {0}")]
    MeasureUndefined(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone)]
pub struct PhiPiece {
    pub lo: Rational,
    pub hi: Rational,
    pub f: UnaryFn,
}

/// A right-continuous non-decreasing `φ`: contiguous closed-form pieces
/// plus finitely many nonnegative jumps, `φ(x) = piece(x) + Σ_{a ≤ x} h_a`.
///
/// At a shared breakpoint the right-hand piece is used, so any gap between
/// adjacent pieces acts as an additional jump.
#[derive(Debug, Clone)]
pub struct PhiModel {
    pieces: Vec<PhiPiece>,
    jumps: Vec<(Rational, Rational)>,
}

fn sc(q: &Rational) -> Scalar {
    Scalar::Exact(q.clone())
}

impl PhiModel {
    pub fn new(
        mut pieces: Vec<PhiPiece>,
        mut jumps: Vec<(Rational, Rational)>,
    ) -> Result<Self, MeasureError> {
        if pieces.is_empty() {
            return Err(MeasureError::InvalidPhi("no pieces".into()));
        }
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
        for p in &pieces {
            if p.lo >= p.hi {
                return Err(MeasureError::InvalidPhi(format!(
                    "piece [{}, {}] is empty",
                    sc(&p.lo),
                    sc(&p.hi)
                )));
            }
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(MeasureError::InvalidPhi(format!(
                    "pieces must be contiguous; gap or overlap at {}",
                    sc(&w[0].hi)
                )));
            }
        }
        jumps.sort_by(|a, b| a.0.cmp(&b.0));
        for (at, h) in &jumps {
            if *h < Rational::zero() {
                return Err(MeasureError::NonMonotonePhi {
                    at: sc(at).to_string(),
                    detail: format!("negative jump {}", sc(h)),
                });
            }
        }
        let model = PhiModel { pieces, jumps };
        model.check_monotone()?;
        Ok(model)
    }

    /// A single continuous piece on `[lo, hi]`.
    pub fn continuous(f: UnaryFn, lo: Rational, hi: Rational) -> Result<Self, MeasureError> {
        Self::new(vec![PhiPiece { lo, hi, f }], Vec::new())
    }

    pub fn identity(lo: Rational, hi: Rational) -> Self {
        Self::continuous(UnaryFn::identity(), lo, hi).expect("identity is monotone")
    }

    pub fn with_jump(mut self, at: Rational, height: Rational) -> Result<Self, MeasureError> {
        self.jumps.push((at, height));
        Self::new(self.pieces, self.jumps)
    }

    pub fn pieces(&self) -> &[PhiPiece] {
        &self.pieces
    }

    pub fn jumps(&self) -> &[(Rational, Rational)] {
        &self.jumps
    }

    pub fn domain(&self) -> (Rational, Rational) {
        (
            self.pieces[0].lo.clone(),
            self.pieces[self.pieces.len() - 1].hi.clone(),
        )
    }

    fn check_monotone(&self) -> Result<(), MeasureError> {
        let mut prev: Option<(Scalar, Scalar)> = None;
        for p in &self.pieces {
            let width = &p.hi - &p.lo;
            for k in 0..=MONOTONE_SAMPLES {
                let x = &p.lo + &width * Rational::new(k.into(), MONOTONE_SAMPLES.into());
                let x = sc(&x);
                let v = p.f.call(&x)?;
                if let Some((px, pv)) = &prev {
                    let slack = 1e-12 * (1.0 + pv.to_f64().abs());
                    let decreased = if v.is_exact() && pv.is_exact() {
                        v < *pv
                    } else {
                        v.to_f64() < pv.to_f64() - slack
                    };
                    if decreased {
                        return Err(MeasureError::NonMonotonePhi {
                            at: x.to_string(),
                            detail: format!("phi({px}) = {pv} > phi({x}) = {v}"),
                        });
                    }
                }
                prev = Some((x, v));
            }
        }
        Ok(())
    }

    fn piece_right(&self, x: &Scalar) -> &PhiPiece {
        self.pieces
            .iter()
            .rev()
            .find(|p| *x >= sc(&p.lo))
            .unwrap_or(&self.pieces[0])
    }

    fn piece_left(&self, x: &Scalar) -> &PhiPiece {
        self.pieces
            .iter()
            .find(|p| *x <= sc(&p.hi))
            .unwrap_or(&self.pieces[self.pieces.len() - 1])
    }

    fn jump_mass(&self, x: &Scalar, inclusive: bool) -> Scalar {
        Scalar::Exact(
            self.jumps
                .iter()
                .filter(|(a, _)| {
                    let a = sc(a);
                    if inclusive {
                        a <= *x
                    } else {
                        a < *x
                    }
                })
                .map(|(_, h)| h.clone())
                .sum(),
        )
    }

    /// `φ(x)`, right-continuous.
    pub fn eval(&self, x: &Scalar) -> Result<Scalar, EvalError> {
        Ok(self.piece_right(x).f.call(x)? + self.jump_mass(x, true))
    }

    /// `φ(x−)`.
    pub fn left_limit(&self, x: &Scalar) -> Result<Scalar, EvalError> {
        Ok(self.piece_left(x).f.call(x)? + self.jump_mass(x, false))
    }

    /// `u_φ` of a one-dimensional interval, honouring its end flags.
    pub fn interval_measure(&self, iv: &Interval) -> Result<Scalar, EvalError> {
        if iv.is_empty() {
            return Ok(Scalar::zero());
        }
        let lo = sc(&iv.lo);
        let hi = sc(&iv.hi);
        let lo_val = if iv.lo_closed {
            self.left_limit(&lo)?
        } else {
            self.eval(&lo)?
        };
        let hi_val = if iv.hi_closed {
            self.eval(&hi)?
        } else {
            self.left_limit(&hi)?
        };
        Ok(hi_val - lo_val)
    }

    /// Jump locations that coincide with a breakpoint of the level grid.
    pub fn atoms_on_grid(&self, iv: &OrderedInterval, level: u32) -> Vec<Rational> {
        self.jumps
            .iter()
            .filter(|(a, h)| !h.is_zero() && iv.grid_index(a, level).is_some())
            .map(|(a, _)| a.clone())
            .collect()
    }
}

impl fmt::Display for PhiModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pieces: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("{} on [{}, {}]", p.f.label(), sc(&p.lo), sc(&p.hi)))
            .collect();
        write!(f, "{}", pieces.join("; "))?;
        for (a, h) in &self.jumps {
            write!(f, "; jump {} at {}", sc(h), sc(a))?;
        }
        Ok(())
    }
}

/// A measure on the boxes of a region.
#[derive(Debug, Clone)]
pub enum Measure {
    /// Product of one-dimensional lengths.
    Lebesgue,
    /// Product of `u_φ` over every coordinate.
    Stieltjes(Arc<PhiModel>),
    /// `S ↦ 𝔉(μ(S))`; additive only when the link is.
    Composed { link: UnaryFn, inner: Box<Measure> },
}

impl Measure {
    pub fn stieltjes(phi: PhiModel) -> Self {
        Measure::Stieltjes(Arc::new(phi))
    }

    pub fn composed(link: UnaryFn, inner: Measure) -> Self {
        Measure::Composed {
            link,
            inner: Box::new(inner),
        }
    }

    /// `true` when the measure factors as a product of one-dimensional ones.
    pub fn is_product(&self) -> bool {
        !matches!(self, Measure::Composed { .. })
    }

    pub fn interval_measure(&self, iv: &Interval) -> Result<Scalar, MeasureError> {
        match self {
            Measure::Lebesgue => Ok(Scalar::Exact(iv.length())),
            Measure::Stieltjes(phi) => Ok(phi.interval_measure(iv)?),
            Measure::Composed { .. } => Err(MeasureError::MeasureUndefined(
                "a composed measure does not factor over coordinates".into(),
            )),
        }
    }

    /// Measure of `(lo, hi]` for possibly inexact endpoints.
    pub fn half_open_measure(&self, lo: &Scalar, hi: &Scalar) -> Result<Scalar, MeasureError> {
        if hi <= lo {
            return Ok(Scalar::zero());
        }
        match self {
            Measure::Lebesgue => Ok(hi - lo),
            Measure::Stieltjes(phi) => Ok(phi.eval(hi)? - phi.eval(lo)?),
            Measure::Composed { .. } => Err(MeasureError::MeasureUndefined(
                "a composed measure does not factor over coordinates".into(),
            )),
        }
    }

    pub fn box_measure(&self, b: &CoordBox) -> Result<Scalar, MeasureError> {
        if b.is_empty() {
            return Ok(Scalar::zero());
        }
        match self {
            Measure::Lebesgue => Ok(Scalar::Exact(b.volume())),
            Measure::Stieltjes(_) => {
                let mut acc = Scalar::one();
                for side in b.sides() {
                    acc = acc * self.interval_measure(side)?;
                }
                Ok(acc)
            }
            Measure::Composed { link, inner } => Ok(link.call(&inner.box_measure(b)?)?),
        }
    }

    /// Sum of box measures over the canonical form of `s`, with the link
    /// (if any) applied to the total.
    pub fn measure_of(&self, s: &BoxSet) -> Result<Scalar, MeasureError> {
        match self {
            Measure::Composed { link, inner } => Ok(link.call(&inner.measure_of(s)?)?),
            _ => {
                let mut total = Vec::with_capacity(s.boxes().len());
                for b in s.boxes() {
                    total.push(self.box_measure(b)?);
                }
                Ok(total.iter().sum())
            }
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Lebesgue => f.write_str("Lebesgue"),
            Measure::Stieltjes(phi) => write!(f, "Lebesgue-Stieltjes[{phi}]"),
            Measure::Composed { link, inner } => write!(f, "({})∘{inner}", link.label()),
        }
    }
}

/// Free-function form of [`Measure::measure_of`].
pub fn measure_of(m: &Measure, s: &BoxSet) -> Result<Scalar, MeasureError> {
    m.measure_of(s)
}
