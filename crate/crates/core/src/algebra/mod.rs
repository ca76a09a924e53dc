//! Finite-dimensional associative algebras given by structure constants,
//! augmentations, quiver path algebras and p-norms on elements.

mod fixture;
pub mod linalg;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{parse_rational, Rational, Scalar};

pub use fixture::{parse_fixture, AlgebraFixture};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("algebra must have at least one basis element")]
    Empty,
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("malformed structure constants: {0}")]
    Shape(String),
    #[error("associativity fails on ({i}, {j}, {k}): (b_i b_j) b_k = {left} but b_i (b_j b_k) = {right}")]
    AssociativityViolation {
        i: usize,
        j: usize,
        k: usize,
        left: String,
        right: String,
    },
    #[error("unit is not a two-sided identity on basis element {index} ({side} side)")]
    UnitViolation { index: usize, side: &'static str },
    #[error("quiver has a cycle through vertex `{0}`; its path space is infinite")]
    InfinitePathSpace(String),
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("p-norm needs p >= 1, got {0}")]
    InvalidP(f64),
    #[error("augmentation sends the unit to {0}, not 1")]
    TauUnit(String),
    #[error("augmentation is not multiplicative on ({i}, {j}): tau(b_i b_j) = {product} but tau(b_i) tau(b_j) = {expected}")]
    NotMultiplicative {
        i: usize,
        j: usize,
        product: String,
        expected: String,
    },
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("cannot parse linear combination `{0}`")]
    BadCombination(String),
    #[error("vectors do not form a basis")]
    SingularBasis,
    #[error("fixture line {line}: {msg}")]
    Fixture { line: usize, msg: String },
}

fn render(v: &[Rational]) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|q| Scalar::Exact(q.clone()).to_string())
        .collect();
    format!("({})", parts.join(", "))
}

/// Structure-constant table: `table[i][j]` holds the coordinates of `b_i b_j`.
pub type StructureTable = Vec<Vec<Vec<Rational>>>;

/// A validated finite-dimensional associative unital algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra {
    labels: Vec<String>,
    table: StructureTable,
    unit: Vec<Rational>,
}

/// Validates the table and builds the algebra.
pub fn make_algebra(
    labels: Vec<String>,
    table: StructureTable,
    unit: Vec<Rational>,
) -> Result<Algebra, AlgebraError> {
    let n = labels.len();
    if n == 0 {
        return Err(AlgebraError::Empty);
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(AlgebraError::DuplicateLabel(l.clone()));
        }
    }
    if table.len() != n || table.iter().any(|row| row.len() != n) {
        return Err(AlgebraError::Shape(format!("table must be {n}x{n}")));
    }
    if table.iter().flatten().any(|v| v.len() != n) {
        return Err(AlgebraError::Shape(format!(
            "every product needs {n} coordinates"
        )));
    }
    if unit.len() != n {
        return Err(AlgebraError::Shape(format!("unit needs {n} coordinates")));
    }
    let algebra = Algebra {
        labels,
        table,
        unit,
    };
    algebra.check_associative()?;
    algebra.check_unit()?;
    Ok(algebra)
}

impl Algebra {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    pub fn unit_coords(&self) -> &[Rational] {
        &self.unit
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Bilinear extension of the table on exact coordinate vectors.
    pub fn mul_coords(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let w = xi * yj;
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &w * c;
                    }
                }
            }
        }
        out
    }

    fn basis_vec(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    fn check_associative(&self) -> Result<(), AlgebraError> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let ij = &self.table[i][j];
                for k in 0..n {
                    let left = self.mul_coords(ij, &self.basis_vec(k));
                    let right = self.mul_coords(&self.basis_vec(i), &self.table[j][k]);
                    if left != right {
                        return Err(AlgebraError::AssociativityViolation {
                            i,
                            j,
                            k,
                            left: render(&left),
                            right: render(&right),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_unit(&self) -> Result<(), AlgebraError> {
        for i in 0..self.dim() {
            let b = self.basis_vec(i);
            if self.mul_coords(&self.unit, &b) != b {
                return Err(AlgebraError::UnitViolation {
                    index: i,
                    side: "left",
                });
            }
            if self.mul_coords(&b, &self.unit) != b {
                return Err(AlgebraError::UnitViolation {
                    index: i,
                    side: "right",
                });
            }
        }
        Ok(())
    }

    /// Parses a linear combination such as `e1 - a + 3/2*ab` or `0`.
    pub fn parse_combination(&self, src: &str) -> Result<Vec<Rational>, AlgebraError> {
        parse_combination(&self.labels, src)
    }

    /// Re-expresses the algebra in a new basis whose vectors are given in
    /// the current coordinates.
    pub fn rebase(
        &self,
        labels: Vec<String>,
        basis: &[Vec<Rational>],
    ) -> Result<Algebra, AlgebraError> {
        let n = self.dim();
        if basis.len() != n || labels.len() != n || basis.iter().any(|v| v.len() != n) {
            return Err(AlgebraError::Shape(format!(
                "a new basis needs {n} vectors of length {n}"
            )));
        }
        let p = linalg::from_columns(basis);
        let p_inv = linalg::invert(&p).ok_or(AlgebraError::SingularBasis)?;
        let table = basis
            .iter()
            .map(|bi| {
                basis
                    .iter()
                    .map(|bj| linalg::mat_vec(&p_inv, &self.mul_coords(bi, bj)))
                    .collect()
            })
            .collect();
        let unit = linalg::mat_vec(&p_inv, &self.unit);
        make_algebra(labels, table, unit)
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "algebra<{}>", self.labels.join(", "))
    }
}

pub(crate) fn parse_combination(
    labels: &[String],
    src: &str,
) -> Result<Vec<Rational>, AlgebraError> {
    let bad = || AlgebraError::BadCombination(src.to_string());
    let mut coords = vec![Rational::zero(); labels.len()];
    let s = src.trim();
    if s.is_empty() {
        return Err(bad());
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for c in s.chars() {
        if c == '+' || c == '-' {
            if !current.trim().is_empty() {
                terms.push((negative, current.trim().to_string()));
                current.clear();
                negative = false;
            }
            if c == '-' {
                negative = !negative;
            }
        } else {
            current.push(c);
        }
    }
    if current.trim().is_empty() {
        return Err(bad());
    }
    terms.push((negative, current.trim().to_string()));

    for (neg, term) in terms {
        let parts: Vec<&str> = term
            .split(|c: char| c == '*' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        let (coef, label) = match parts[..] {
            [c, l] => (parse_rational(c).map_err(|_| bad())?, l.to_string()),
            [single] => match parse_rational(single) {
                Ok(q) if q.is_zero() => continue,
                Ok(_) => return Err(bad()),
                Err(_) => (Rational::one(), single.to_string()),
            },
            _ => return Err(bad()),
        };
        let idx = labels
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| AlgebraError::UnknownLabel(label.clone()))?;
        if neg {
            coords[idx] -= coef;
        } else {
            coords[idx] += coef;
        }
    }
    Ok(coords)
}

/// An element `Σ k_i b_i` of a shared algebra.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    algebra: Arc<Algebra>,
    coords: Vec<Scalar>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.algebra, &other.algebra) && self.coords == other.coords
    }
}

fn same_algebra(a: &Arc<Algebra>, b: &Arc<Algebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl AlgebraElement {
    pub fn new(algebra: &Arc<Algebra>, coords: Vec<Scalar>) -> Result<Self, AlgebraError> {
        if coords.len() != algebra.dim() {
            return Err(AlgebraError::Shape(format!(
                "element needs {} coordinates, got {}",
                algebra.dim(),
                coords.len()
            )));
        }
        Ok(AlgebraElement {
            algebra: Arc::clone(algebra),
            coords,
        })
    }

    pub fn from_rationals(
        algebra: &Arc<Algebra>,
        coords: &[Rational],
    ) -> Result<Self, AlgebraError> {
        Self::new(algebra, coords.iter().cloned().map(Scalar::Exact).collect())
    }

    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        AlgebraElement {
            algebra: Arc::clone(algebra),
            coords: vec![Scalar::zero(); algebra.dim()],
        }
    }

    pub fn basis(algebra: &Arc<Algebra>, i: usize) -> Self {
        let mut e = Self::zero(algebra);
        e.coords[i] = Scalar::one();
        e
    }

    pub fn unit(algebra: &Arc<Algebra>) -> Self {
        AlgebraElement {
            algebra: Arc::clone(algebra),
            coords: algebra.unit.iter().cloned().map(Scalar::Exact).collect(),
        }
    }

    pub fn parse(algebra: &Arc<Algebra>, src: &str) -> Result<Self, AlgebraError> {
        let coords = algebra.parse_combination(src)?;
        Self::from_rationals(algebra, &coords)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    /// Exact coordinates, if every coordinate is rational.
    pub fn exact_coords(&self) -> Option<Vec<Rational>> {
        self.coords
            .iter()
            .map(|c| c.as_rational().cloned())
            .collect()
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check_same(other)?;
        Ok(AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, s: &Scalar) -> AlgebraElement {
        AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    fn check_same(&self, other: &AlgebraElement) -> Result<(), AlgebraError> {
        if same_algebra(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(AlgebraError::AlgebraMismatch)
        }
    }

    /// Applies the linear functional `Σ k_i w_i`.
    pub fn apply_functional(&self, weights: &[Scalar]) -> Scalar {
        self.coords.iter().zip(weights).map(|(k, w)| k * w).sum()
    }

    /// `Σ k_i`, the functional that sums all coordinates.
    pub fn coordinate_sum(&self) -> Scalar {
        self.coords.iter().sum()
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .zip(self.algebra.labels())
            .map(|(c, l)| format!("{c} {l}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Product of two elements of the same algebra.
pub fn multiply(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    x.check_same(y)?;
    let alg = &x.algebra;
    let n = alg.dim();
    let mut acc: Vec<crate::scalar::ScalarSum> = (0..n).map(|_| Default::default()).collect();
    for (i, xi) in x.coords.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.coords.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let w = xi * yj;
            for (k, c) in alg.table[i][j].iter().enumerate() {
                if !c.is_zero() {
                    acc[k].add(&(&w * &Scalar::Exact(c.clone())));
                }
            }
        }
    }
    Ok(AlgebraElement {
        algebra: Arc::clone(alg),
        coords: acc.into_iter().map(|s| s.finish()).collect(),
    })
}

/// `(Σ |k_i|^p)^{1/p}`; exact for `p = 1`, and for `p = 2` on perfect squares.
pub fn p_norm(x: &AlgebraElement, p: f64) -> Result<Scalar, AlgebraError> {
    coords_p_norm(&x.coords, p)
}

pub(crate) fn coords_p_norm(coords: &[Scalar], p: f64) -> Result<Scalar, AlgebraError> {
    if p.is_nan() || p < 1.0 {
        return Err(AlgebraError::InvalidP(p));
    }
    if p == 1.0 {
        return Ok(coords.iter().map(Scalar::abs).sum());
    }
    if p == 2.0 {
        let sq: Scalar = coords.iter().map(|c| c * c).sum();
        return Ok(sq.sqrt().expect("sum of squares is nonnegative"));
    }
    if p.is_infinite() {
        return Ok(coords
            .iter()
            .map(Scalar::abs)
            .fold(Scalar::zero(), Scalar::max));
    }
    let s: f64 = coords.iter().map(|c| c.to_f64().abs().powf(p)).sum();
    Ok(Scalar::Real(s.powf(1.0 / p)))
}

/// An algebra homomorphism `τ: A → k`, given by its values on the basis.
#[derive(Debug, Clone)]
pub struct AugmentationMap {
    algebra: Arc<Algebra>,
    coeffs: Vec<Rational>,
}

impl AugmentationMap {
    pub fn new(algebra: &Arc<Algebra>, coeffs: Vec<Rational>) -> Result<Self, AlgebraError> {
        let n = algebra.dim();
        if coeffs.len() != n {
            return Err(AlgebraError::Shape(format!(
                "augmentation needs {n} values"
            )));
        }
        let eval = |v: &[Rational]| -> Rational { v.iter().zip(&coeffs).map(|(a, b)| a * b).sum() };
        let on_unit = eval(algebra.unit_coords());
        if !on_unit.is_one() {
            return Err(AlgebraError::TauUnit(Scalar::Exact(on_unit).to_string()));
        }
        for i in 0..n {
            for j in 0..n {
                let product = eval(&algebra.table[i][j]);
                let expected = &coeffs[i] * &coeffs[j];
                if product != expected {
                    return Err(AlgebraError::NotMultiplicative {
                        i,
                        j,
                        product: Scalar::Exact(product).to_string(),
                        expected: Scalar::Exact(expected).to_string(),
                    });
                }
            }
        }
        Ok(AugmentationMap {
            algebra: Arc::clone(algebra),
            coeffs,
        })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<Scalar, AlgebraError> {
        if !same_algebra(&self.algebra, &a.algebra) {
            return Err(AlgebraError::AlgebraMismatch);
        }
        Ok(a.coords
            .iter()
            .zip(&self.coeffs)
            .map(|(k, t)| k * &Scalar::Exact(t.clone()))
            .sum())
    }
}

/// Anything the scalars act on: `a · m = τ(a) m`.
pub trait TauModule: Sized {
    fn scale_by(&self, factor: &Scalar) -> Self;
}

impl TauModule for Scalar {
    fn scale_by(&self, factor: &Scalar) -> Self {
        factor * self
    }
}

impl TauModule for AlgebraElement {
    fn scale_by(&self, factor: &Scalar) -> Self {
        self.scale(factor)
    }
}

/// The twisted action `a · m = τ(a) m`.
pub fn tau_action<M: TauModule>(
    tau: &AugmentationMap,
    a: &AlgebraElement,
    m: &M,
) -> Result<M, AlgebraError> {
    Ok(m.scale_by(&tau.apply(a)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub source: String,
    pub target: String,
}

/// A finite quiver `(Q_0, Q_1, s, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Self, AlgebraError> {
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(AlgebraError::InvalidQuiver(format!(
                    "duplicate vertex `{v}`"
                )));
            }
        }
        for (i, a) in arrows.iter().enumerate() {
            if arrows[..i].iter().any(|b| b.label == a.label) {
                return Err(AlgebraError::InvalidQuiver(format!(
                    "duplicate arrow `{}`",
                    a.label
                )));
            }
            for end in [&a.source, &a.target] {
                if !vertices.contains(end) {
                    return Err(AlgebraError::InvalidQuiver(format!(
                        "arrow `{}` uses unknown vertex `{end}`",
                        a.label
                    )));
                }
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    fn vertex_index(&self, v: &str) -> usize {
        self.vertices
            .iter()
            .position(|x| x == v)
            .expect("validated vertex")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Path {
    Trivial(usize),
    Arrows(Vec<usize>),
}

/// The path algebra of an acyclic quiver. The basis lists trivial paths
/// `e<v>` first, then paths by length; `φ1 φ2` is the composite when
/// `t(φ1) = s(φ2)` and zero otherwise.
pub fn path_algebra(q: &Quiver) -> Result<Algebra, AlgebraError> {
    let src: Vec<usize> = q.arrows.iter().map(|a| q.vertex_index(&a.source)).collect();
    let tgt: Vec<usize> = q.arrows.iter().map(|a| q.vertex_index(&a.target)).collect();

    // cycle detection by iterative DFS colouring
    let nv = q.vertices.len();
    let mut colour = vec![0u8; nv];
    fn visit(v: usize, colour: &mut [u8], src: &[usize], tgt: &[usize]) -> Option<usize> {
        colour[v] = 1;
        for (a, &s) in src.iter().enumerate() {
            if s != v {
                continue;
            }
            let w = tgt[a];
            if colour[w] == 1 {
                return Some(w);
            }
            if colour[w] == 0 {
                if let Some(c) = visit(w, colour, src, tgt) {
                    return Some(c);
                }
            }
        }
        colour[v] = 2;
        None
    }
    for v in 0..nv {
        if colour[v] == 0 {
            if let Some(c) = visit(v, &mut colour, &src, &tgt) {
                return Err(AlgebraError::InfinitePathSpace(q.vertices[c].clone()));
            }
        }
    }

    let mut paths: Vec<Path> = (0..nv).map(Path::Trivial).collect();
    let mut frontier: Vec<Vec<usize>> = (0..q.arrows.len()).map(|a| vec![a]).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            let end = tgt[*p.last().expect("nonempty path")];
            for (a, &s) in src.iter().enumerate() {
                if s == end {
                    let mut ext = p.clone();
                    ext.push(a);
                    next.push(ext);
                }
            }
        }
        paths.extend(frontier.into_iter().map(Path::Arrows));
        frontier = next;
    }

    let start = |p: &Path| match p {
        Path::Trivial(v) => *v,
        Path::Arrows(a) => src[a[0]],
    };
    let end = |p: &Path| match p {
        Path::Trivial(v) => *v,
        Path::Arrows(a) => tgt[*a.last().expect("nonempty path")],
    };
    let labels: Vec<String> = paths
        .iter()
        .map(|p| match p {
            Path::Trivial(v) => format!("e{}", q.vertices[*v]),
            Path::Arrows(a) => a.iter().map(|&i| q.arrows[i].label.as_str()).collect(),
        })
        .collect();
    let index: HashMap<Path, usize> = paths.iter().cloned().zip(0..).collect();
    let n = paths.len();
    let zero = vec![Rational::zero(); n];
    let table = paths
        .iter()
        .map(|p1| {
            paths
                .iter()
                .map(|p2| {
                    if end(p1) != start(p2) {
                        return zero.clone();
                    }
                    let composite = match (p1, p2) {
                        (Path::Trivial(_), other) | (other, Path::Trivial(_)) => other.clone(),
                        (Path::Arrows(a), Path::Arrows(b)) => {
                            Path::Arrows(a.iter().chain(b).copied().collect())
                        }
                    };
                    let mut v = zero.clone();
                    v[index[&composite]] = Rational::one();
                    v
                })
                .collect()
        })
        .collect();
    let mut unit = zero.clone();
    for u in unit.iter_mut().take(nv) {
        *u = Rational::one();
    }
    make_algebra(labels, table, unit)
}
