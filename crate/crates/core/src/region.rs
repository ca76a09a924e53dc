//! Ordered intervals with their bisection maps, coordinate boxes, and
//! finite disjoint box unions in canonical form.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{parse_rational, rational, rational_to_f64, Rational};

/// Deepest grid level probed when locating a point on the bisection grid.
pub const MAX_GRID_LEVEL: u32 = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("cannot parse box `{0}`")]
    Parse(String),
}

/// `[c, d]` with a split point `ξ` and the two order-preserving affine
/// bijections `κ_c: [c,d] → [c,ξ]` and `κ_d: [c,d] → [ξ,d]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedInterval {
    c: Rational,
    d: Rational,
    xi: Rational,
}

impl OrderedInterval {
    /// Midpoint bisection `ξ = (c+d)/2`, `κ_c(x) = (x+c)/2`, `κ_d(x) = (x+d)/2`.
    pub fn bisection(c: Rational, d: Rational) -> Result<Self, RegionError> {
        let xi = (&c + &d) / rational(2, 1);
        Self::with_split(c, d, xi)
    }

    /// Affine splitting at an arbitrary interior point.
    pub fn with_split(c: Rational, d: Rational, xi: Rational) -> Result<Self, RegionError> {
        if !(c < xi && xi < d) {
            return Err(RegionError::InvalidInterval(format!(
                "need c < xi < d, got c={c}, xi={xi}, d={d}"
            )));
        }
        Ok(OrderedInterval { c, d, xi })
    }

    pub fn unit() -> Self {
        Self::bisection(Rational::zero(), Rational::one()).expect("0 < 1")
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn d(&self) -> &Rational {
        &self.d
    }

    pub fn xi(&self) -> &Rational {
        &self.xi
    }

    pub fn length(&self) -> Rational {
        &self.d - &self.c
    }

    /// Relative position of `ξ` inside `[c, d]`.
    pub fn ratio(&self) -> Rational {
        (&self.xi - &self.c) / self.length()
    }

    pub fn kappa_c(&self, x: &Rational) -> Rational {
        &self.c + (x - &self.c) * self.ratio()
    }

    pub fn kappa_d(&self, x: &Rational) -> Rational {
        &self.xi + (x - &self.c) * (Rational::one() - self.ratio())
    }

    pub fn kappa_c_inv(&self, y: &Rational) -> Rational {
        &self.c + (y - &self.c) / self.ratio()
    }

    pub fn kappa_d_inv(&self, y: &Rational) -> Rational {
        &self.c + (y - &self.xi) / (Rational::one() - self.ratio())
    }

    /// Breakpoints `ξ_{t0} = c < … < ξ_{t,2^t} = d` of the level-`t` grid.
    pub fn grid(&self, level: u32) -> Vec<Rational> {
        if self.ratio() == rational(1, 2) {
            let n = 1u64 << level;
            let step = self.length() / Rational::from_integer(n.into());
            return (0..=n)
                .map(|i| &self.c + &step * Rational::from_integer(i.into()))
                .collect();
        }
        let mut pts = vec![self.c.clone(), self.d.clone()];
        for _ in 0..level {
            let mut next: Vec<Rational> = pts.iter().map(|x| self.kappa_c(x)).collect();
            next.extend(pts.iter().skip(1).map(|x| self.kappa_d(x)));
            pts = next;
        }
        pts
    }

    /// Floating-point breakpoints of the level-`t` grid.
    pub fn grid_f64(&self, level: u32) -> Vec<f64> {
        let c = rational_to_f64(&self.c);
        let d = rational_to_f64(&self.d);
        let rho = rational_to_f64(&self.ratio());
        let mut pts = vec![(0.0f64, 1.0f64)];
        // track cells as (lo, hi) in relative coordinates
        for _ in 0..level {
            pts = pts
                .iter()
                .flat_map(|&(lo, hi)| {
                    let m = lo + rho * (hi - lo);
                    [(lo, m), (m, hi)]
                })
                .collect();
        }
        let mut out: Vec<f64> = pts.iter().map(|&(lo, _)| c + (d - c) * lo).collect();
        out.push(d);
        out
    }

    /// The `2^level` grid cells, right-open except the last which is closed.
    pub fn bisect(&self, level: u32) -> Vec<Interval> {
        cells_from_grid(&self.grid(level))
    }

    /// Index of `x` among the level-`level` breakpoints, if it is one.
    pub fn grid_index(&self, x: &Rational, level: u32) -> Option<usize> {
        if *x < self.c || *x > self.d {
            return None;
        }
        if *x == self.d {
            return Some(1usize << level);
        }
        let rho = self.ratio();
        let mut lo = self.c.clone();
        let mut hi = self.d.clone();
        let mut index = 0usize;
        for _ in 0..level {
            let m = &lo + (&hi - &lo) * &rho;
            if *x < m {
                hi = m;
                index *= 2;
            } else {
                lo = m;
                index = index * 2 + 1;
            }
        }
        (*x == lo).then_some(index)
    }

    /// Smallest level whose grid contains `x`.
    pub fn level_of(&self, x: &Rational) -> Option<u32> {
        if *x < self.c || *x > self.d {
            return None;
        }
        if *x == self.c || *x == self.d {
            return Some(0);
        }
        let rho = self.ratio();
        let mut lo = self.c.clone();
        let mut hi = self.d.clone();
        for level in 1..=MAX_GRID_LEVEL {
            let m = &lo + (&hi - &lo) * &rho;
            match x.cmp(&m) {
                Ordering::Equal => return Some(level),
                Ordering::Less => hi = m,
                Ordering::Greater => lo = m,
            }
        }
        None
    }

    pub fn full(&self) -> Interval {
        Interval::closed(self.c.clone(), self.d.clone())
    }
}

fn cells_from_grid(pts: &[Rational]) -> Vec<Interval> {
    let last = pts.len().saturating_sub(2);
    pts.windows(2)
        .enumerate()
        .map(|(i, w)| Interval::new(w[0].clone(), w[1].clone(), true, i == last))
        .collect()
}

/// A one-dimensional interval with explicit end inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, true, true)
    }

    /// `[lo, hi)`
    pub fn right_open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, true, false)
    }

    /// `(lo, hi]`
    pub fn left_open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, false, true)
    }

    pub fn point(x: Rational) -> Self {
        Self::closed(x.clone(), x)
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Greater => true,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Less => false,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn length(&self) -> Rational {
        if self.lo >= self.hi {
            Rational::zero()
        } else {
            &self.hi - &self.lo
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed {
            *x >= self.lo
        } else {
            *x > self.lo
        };
        let below = if self.hi_closed {
            *x <= self.hi
        } else {
            *x < self.hi
        };
        above && below
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let lo = rational_to_f64(&self.lo);
        let hi = rational_to_f64(&self.hi);
        let above = if self.lo_closed { x >= lo } else { x > lo };
        let below = if self.hi_closed { x <= hi } else { x < hi };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }

    /// `true` when `self ⊆ other` as sets.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        let lo_ok = match self.lo.cmp(&other.lo) {
            Ordering::Greater => true,
            Ordering::Equal => other.lo_closed || !self.lo_closed,
            Ordering::Less => false,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            Ordering::Less => true,
            Ordering::Equal => other.hi_closed || !self.hi_closed,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    pub fn parse(src: &str) -> Result<Interval, RegionError> {
        let s = src.trim();
        let bad = || RegionError::Parse(src.to_string());
        let lo_closed = match s.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let hi_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let inner = &s[1..s.len() - 1];
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let lo = parse_rational(a).map_err(|_| bad())?;
        let hi = parse_rational(b).map_err(|_| bad())?;
        Ok(Interval::new(lo, hi, lo_closed, hi_closed))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |q: &Rational| crate::scalar::Scalar::Exact(q.clone()).to_string();
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            show(&self.lo),
            show(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A product of one-dimensional intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoordBox {
    sides: Vec<Interval>,
}

impl CoordBox {
    pub fn new(sides: Vec<Interval>) -> Self {
        CoordBox { sides }
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[Interval] {
        &self.sides
    }

    pub fn side(&self, i: usize) -> &Interval {
        &self.sides[i]
    }

    pub fn is_empty(&self) -> bool {
        self.sides.iter().any(Interval::is_empty)
    }

    /// `true` when some side has zero length.
    pub fn is_degenerate(&self) -> bool {
        self.sides.iter().any(Interval::is_degenerate)
    }

    pub fn volume(&self) -> Rational {
        if self.is_empty() {
            return Rational::zero();
        }
        self.sides.iter().map(Interval::length).product()
    }

    pub fn intersect(&self, other: &CoordBox) -> CoordBox {
        CoordBox::new(
            self.sides
                .iter()
                .zip(&other.sides)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        )
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.sides.iter().zip(x).all(|(s, xi)| s.contains(xi))
    }

    pub fn is_subset_of(&self, other: &CoordBox) -> bool {
        self.is_empty()
            || self
                .sides
                .iter()
                .zip(&other.sides)
                .all(|(a, b)| a.is_subset_of(b))
    }

    pub fn lower_corner(&self) -> Vec<Rational> {
        self.sides.iter().map(|s| s.lo.clone()).collect()
    }

    pub fn midpoint(&self) -> Vec<Rational> {
        self.sides
            .iter()
            .map(|s| (&s.lo + &s.hi) / rational(2, 1))
            .collect()
    }

    /// Parses `[0,1/2)x[0,1]`; sides are separated by `x` or `×`.
    pub fn parse(src: &str) -> Result<CoordBox, RegionError> {
        let mut sides = Vec::new();
        let mut current = String::new();
        let mut depth = 0;
        for ch in src.trim().chars() {
            match ch {
                '[' | '(' => {
                    depth += 1;
                    current.push(ch);
                }
                ']' | ')' => {
                    depth -= 1;
                    current.push(ch);
                    if depth == 0 {
                        sides.push(Interval::parse(&current)?);
                        current.clear();
                    }
                }
                'x' | '×' | '*' if depth == 0 => {}
                c if c.is_whitespace() && depth == 0 => {}
                c if depth > 0 => current.push(c),
                _ => return Err(RegionError::Parse(src.to_string())),
            }
        }
        if sides.is_empty() || depth != 0 {
            return Err(RegionError::Parse(src.to_string()));
        }
        Ok(CoordBox::new(sides))
    }
}

impl fmt::Display for CoordBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sides.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// Splits every side of `b` at the image of `ξ` under the side's affine
/// chart, giving `2^n` boxes ordered lexicographically.
pub fn subdivide_box(b: &CoordBox, iv: &OrderedInterval) -> Vec<CoordBox> {
    let rho = iv.ratio();
    let halves: Vec<[Interval; 2]> = b
        .sides
        .iter()
        .map(|s| {
            if s.is_degenerate() {
                return [s.clone(), s.clone()];
            }
            let m = &s.lo + (&s.hi - &s.lo) * &rho;
            [
                Interval::new(s.lo.clone(), m.clone(), s.lo_closed, false),
                Interval::new(m, s.hi.clone(), true, s.hi_closed),
            ]
        })
        .collect();
    let n = halves.len();
    (0..1usize << n)
        .map(|mask| {
            CoordBox::new(
                (0..n)
                    .map(|j| halves[j][(mask >> (n - 1 - j)) & 1].clone())
                    .collect(),
            )
        })
        .collect()
}

/// The integration region `[c, d]^n` with its bisection grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    interval: OrderedInterval,
    dim: usize,
}

impl Region {
    pub fn new(interval: OrderedInterval, dim: usize) -> Self {
        assert!(dim > 0, "region dimension must be positive");
        Region { interval, dim }
    }

    pub fn unit_cube(dim: usize) -> Self {
        Self::new(OrderedInterval::unit(), dim)
    }

    pub fn interval(&self) -> &OrderedInterval {
        &self.interval
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn full_box(&self) -> CoordBox {
        CoordBox::new(vec![self.interval.full(); self.dim])
    }

    pub fn contains_box(&self, b: &CoordBox) -> bool {
        b.dim() == self.dim && b.is_subset_of(&self.full_box())
    }

    pub fn cells_per_axis(&self, level: u32) -> usize {
        1usize << level
    }

    pub fn cell_count(&self, level: u32) -> u128 {
        1u128 << (u64::from(level) * self.dim as u64)
    }

    /// Grid cells at `level` in lexicographic order of their multi-index.
    pub fn cells(&self, level: u32) -> Vec<CoordBox> {
        let axis = self.interval.bisect(level);
        multi_indices(self.dim, axis.len())
            .map(|idx| CoordBox::new(idx.iter().map(|&i| axis[i].clone()).collect()))
            .collect()
    }

    /// Snaps a box to the canonical right-open form used for a.e. classes:
    /// sides are `[lo, hi)` except where `hi = d`, which stays closed.
    pub fn normalize(&self, b: &CoordBox) -> CoordBox {
        let d = self.interval.d();
        CoordBox::new(
            b.sides
                .iter()
                .map(|s| Interval::new(s.lo.clone(), s.hi.clone(), true, s.hi == *d))
                .collect(),
        )
    }
}

/// Iterates `{0..base}^dim` in lexicographic order.
pub fn multi_indices(dim: usize, base: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = base.checked_pow(dim as u32).expect("grid too large");
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; dim];
        for slot in idx.iter_mut().rev() {
            *slot = flat % base;
            flat /= base;
        }
        idx
    })
}

/// A finite union of pairwise-disjoint boxes in canonical form.
///
/// The canonical form sweeps the first axis over the elementary pieces
/// (breakpoints and the open gaps between them), groups consecutive pieces
/// whose cross-sections agree, and recurses into the remaining axes. Two
/// `BoxSet`s describe the same set exactly when their box lists are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSet {
    dim: usize,
    boxes: Vec<CoordBox>,
}

#[derive(Clone, Copy)]
enum BoolOp {
    Union,
    Intersect,
    Subtract,
}

impl BoolOp {
    fn keep(self, in_a: bool, in_b: bool) -> bool {
        match self {
            BoolOp::Union => in_a || in_b,
            BoolOp::Intersect => in_a && in_b,
            BoolOp::Subtract => in_a && !in_b,
        }
    }
}

/// Range of elementary pieces covered by `s`, where piece `2k` is the
/// breakpoint `pts[k]` and piece `2k + 1` the open gap after it.
fn piece_range(pts: &[Rational], s: &Interval) -> Option<(usize, usize)> {
    let i = pts.binary_search(&s.lo).expect("endpoint is a breakpoint");
    let j = pts.binary_search(&s.hi).expect("endpoint is a breakpoint");
    let start = if s.lo_closed { 2 * i } else { 2 * i + 1 };
    let end = if s.hi_closed {
        2 * j
    } else {
        (2 * j).checked_sub(1)?
    };
    (start <= end).then_some((start, end))
}

fn piece_bound(pts: &[Rational], k: usize, upper: bool) -> (Rational, bool) {
    if k.is_multiple_of(2) {
        (pts[k / 2].clone(), true)
    } else if upper {
        (pts[k / 2 + 1].clone(), false)
    } else {
        (pts[k / 2].clone(), false)
    }
}

fn sweep(a: &[&[Interval]], b: &[&[Interval]], remaining: usize, op: BoolOp) -> Vec<Vec<Interval>> {
    if remaining == 0 {
        return if op.keep(!a.is_empty(), !b.is_empty()) {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    if a.is_empty() && (b.is_empty() || !op.keep(false, true)) {
        return Vec::new();
    }
    let mut pts: Vec<Rational> = a
        .iter()
        .chain(b)
        .flat_map(|sides| [sides[0].lo.clone(), sides[0].hi.clone()])
        .collect();
    pts.sort();
    pts.dedup();
    let n_pieces = 2 * pts.len() - 1;
    let mut a_at: Vec<Vec<&[Interval]>> = vec![Vec::new(); n_pieces];
    let mut b_at: Vec<Vec<&[Interval]>> = vec![Vec::new(); n_pieces];
    for (src, dst) in [(a, &mut a_at), (b, &mut b_at)] {
        for sides in src {
            if let Some((start, end)) = piece_range(&pts, &sides[0]) {
                for slot in &mut dst[start..=end] {
                    slot.push(&sides[1..]);
                }
            }
        }
    }

    let mut out = Vec::new();
    let mut emit = |start: usize, end: usize, section: Vec<Vec<Interval>>| {
        let (lo, lo_closed) = piece_bound(&pts, start, false);
        let (hi, hi_closed) = piece_bound(&pts, end, true);
        let side = Interval::new(lo, hi, lo_closed, hi_closed);
        for tail in section {
            let mut sides = Vec::with_capacity(tail.len() + 1);
            sides.push(side.clone());
            sides.extend(tail);
            out.push(sides);
        }
    };
    let mut run: Option<(usize, usize, Vec<Vec<Interval>>)> = None;
    for k in 0..n_pieces {
        let section = sweep(&a_at[k], &b_at[k], remaining - 1, op);
        match &mut run {
            Some((_, end, current)) if !section.is_empty() && *current == section => *end = k,
            _ => {
                if let Some((s, e, sec)) = run.take() {
                    emit(s, e, sec);
                }
                if !section.is_empty() {
                    run = Some((k, k, section));
                }
            }
        }
    }
    if let Some((s, e, sec)) = run {
        emit(s, e, sec);
    }
    out
}

impl BoxSet {
    pub fn empty(dim: usize) -> Self {
        BoxSet {
            dim,
            boxes: Vec::new(),
        }
    }

    /// Canonical form of the union of `boxes`.
    pub fn from_boxes(dim: usize, boxes: Vec<CoordBox>) -> Result<Self, RegionError> {
        for b in &boxes {
            if b.dim() != dim {
                return Err(RegionError::DimensionMismatch {
                    expected: dim,
                    got: b.dim(),
                });
            }
        }
        Ok(Self::combine(dim, &boxes, &[], BoolOp::Union))
    }

    pub fn from_box(b: CoordBox) -> Self {
        let dim = b.dim();
        Self::combine(dim, std::slice::from_ref(&b), &[], BoolOp::Union)
    }

    fn combine(dim: usize, a: &[CoordBox], b: &[CoordBox], op: BoolOp) -> Self {
        let a: Vec<&[Interval]> = a
            .iter()
            .filter(|x| !x.is_empty())
            .map(|x| x.sides())
            .collect();
        let b: Vec<&[Interval]> = b
            .iter()
            .filter(|x| !x.is_empty())
            .map(|x| x.sides())
            .collect();
        let boxes = sweep(&a, &b, dim, op)
            .into_iter()
            .map(CoordBox::new)
            .collect();
        BoxSet { dim, boxes }
    }

    fn check_dim(&self, other: &BoxSet) -> Result<(), RegionError> {
        if self.dim != other.dim {
            return Err(RegionError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &BoxSet) -> Result<BoxSet, RegionError> {
        self.check_dim(other)?;
        Ok(Self::combine(
            self.dim,
            &self.boxes,
            &other.boxes,
            BoolOp::Union,
        ))
    }

    pub fn intersect(&self, other: &BoxSet) -> Result<BoxSet, RegionError> {
        self.check_dim(other)?;
        Ok(Self::combine(
            self.dim,
            &self.boxes,
            &other.boxes,
            BoolOp::Intersect,
        ))
    }

    pub fn subtract(&self, other: &BoxSet) -> Result<BoxSet, RegionError> {
        self.check_dim(other)?;
        Ok(Self::combine(
            self.dim,
            &self.boxes,
            &other.boxes,
            BoolOp::Subtract,
        ))
    }

    /// Re-canonicalizes; a no-op on values built through this API.
    pub fn canonicalize(&self) -> BoxSet {
        Self::combine(self.dim, &self.boxes, &[], BoolOp::Union)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[CoordBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.boxes.iter().any(|b| b.contains(x))
    }

    pub fn is_subset_of(&self, other: &BoxSet) -> Result<bool, RegionError> {
        Ok(self.subtract(other)?.is_empty())
    }

    /// Lebesgue volume, exact.
    pub fn volume(&self) -> Rational {
        self.boxes.iter().map(CoordBox::volume).sum()
    }
}

impl fmt::Display for BoxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boxes.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self.boxes.iter().map(|b| b.to_string()).collect();
        f.write_str(&parts.join(" ∪ "))
    }
}
