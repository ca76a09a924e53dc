//! Shareable pointwise functions used as integrands, φ pieces, links and
//! transport maps.

use std::fmt;
use std::sync::Arc;

use crate::expr::{EvalError, Expression};
use crate::scalar::Scalar;

type PointInner = dyn Fn(&[Scalar]) -> Result<Scalar, EvalError> + Send + Sync;
type UnaryInner = dyn Fn(&Scalar) -> Result<Scalar, EvalError> + Send + Sync;
type MapInner = dyn Fn(&[Scalar]) -> Result<Vec<Scalar>, EvalError> + Send + Sync;

/// A scalar function of a coordinate vector.
#[derive(Clone)]
pub struct PointFn {
    label: String,
    inner: Arc<PointInner>,
}

impl PointFn {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[Scalar]) -> Result<Scalar, EvalError> + Send + Sync + 'static,
    {
        PointFn {
            label: label.into(),
            inner: Arc::new(f),
        }
    }

    pub fn constant(value: Scalar) -> Self {
        let label = value.to_string();
        PointFn::new(label, move |_| Ok(value.clone()))
    }

    pub fn call(&self, x: &[Scalar]) -> Result<Scalar, EvalError> {
        (self.inner)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl From<Expression> for PointFn {
    fn from(e: Expression) -> Self {
        let label = e.source().to_string();
        PointFn::new(label, move |x| e.eval(x))
    }
}

impl fmt::Debug for PointFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointFn({})", self.label)
    }
}

/// A scalar function of one scalar.
#[derive(Clone)]
pub struct UnaryFn {
    label: String,
    inner: Arc<UnaryInner>,
}

impl UnaryFn {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Scalar) -> Result<Scalar, EvalError> + Send + Sync + 'static,
    {
        UnaryFn {
            label: label.into(),
            inner: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        UnaryFn::new("x", |x| Ok(x.clone()))
    }

    /// `x ↦ factor·x`.
    pub fn linear(factor: Scalar) -> Self {
        let label = format!("{factor}*x");
        UnaryFn::new(label, move |x| Ok(&factor * x))
    }

    /// Parses a one-variable expression in `x`.
    pub fn parse(src: &str) -> Result<Self, crate::expr::ExprError> {
        Expression::parse_unary(src).map(UnaryFn::from)
    }

    pub fn call(&self, x: &Scalar) -> Result<Scalar, EvalError> {
        (self.inner)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl From<Expression> for UnaryFn {
    fn from(e: Expression) -> Self {
        let label = e.source().to_string();
        UnaryFn::new(label, move |x| e.eval(std::slice::from_ref(x)))
    }
}

impl fmt::Debug for UnaryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnaryFn({})", self.label)
    }
}

/// A map between coordinate vectors.
#[derive(Clone)]
pub struct PointMap {
    label: String,
    inner: Arc<MapInner>,
}

impl PointMap {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[Scalar]) -> Result<Vec<Scalar>, EvalError> + Send + Sync + 'static,
    {
        PointMap {
            label: label.into(),
            inner: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        PointMap::new("id", |x| Ok(x.to_vec()))
    }

    /// Applies one unary function per coordinate.
    pub fn coordinatewise(maps: Vec<UnaryFn>) -> Self {
        let label = maps
            .iter()
            .map(|m| m.label().to_string())
            .collect::<Vec<_>>()
            .join(", ");
        PointMap::new(format!("({label})"), move |x| {
            if x.len() != maps.len() {
                return Err(EvalError::Arity {
                    expected: maps.len(),
                    got: x.len(),
                });
            }
            maps.iter().zip(x).map(|(m, xi)| m.call(xi)).collect()
        })
    }

    pub fn call(&self, x: &[Scalar]) -> Result<Vec<Scalar>, EvalError> {
        (self.inner)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for PointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointMap({})", self.label)
    }
}
