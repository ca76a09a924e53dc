//! Independent oracles and random generators shared by the property suites.
//! Everything here recomputes its answers from first principles instead of
//! calling the library routine under test.
#![allow(dead_code)]

use rand::Rng;
use stieltjes_core::algebra::{AlgebraError, StructureTable};
use stieltjes_core::func::UnaryFn;
use stieltjes_core::measure::{PhiModel, PhiPiece};
use stieltjes_core::region::{CoordBox, Interval, Region};
use stieltjes_core::step::StepFunction;
use stieltjes_core::{rational, Rational, Scalar};

pub fn q(n: i64, d: i64) -> Rational {
    rational(n, d)
}

pub fn zero() -> Rational {
    q(0, 1)
}

pub fn one() -> Rational {
    q(1, 1)
}

/// `n/d` with `|n| <= range` and `d` from a small set.
pub fn rand_q<R: Rng>(rng: &mut R, range: i64) -> Rational {
    let d = [1, 2, 3, 4, 8][rng.gen_range(0..5)];
    q(rng.gen_range(-range..=range), d)
}

pub fn rand_nonneg_q<R: Rng>(rng: &mut R, range: i64) -> Rational {
    let d = [1, 2, 3, 4, 8][rng.gen_range(0..5)];
    q(rng.gen_range(0..=range), d)
}

// ---------------------------------------------------------------- algebras

/// A known associative unital algebra in dimension three with an augmentation.
#[derive(Debug, Clone)]
pub struct BaseAlgebra {
    pub name: &'static str,
    pub table: StructureTable,
    pub unit: Vec<Rational>,
    pub tau: Vec<Rational>,
}

fn table_from(entries: &[(usize, usize, usize)], n: usize) -> StructureTable {
    let mut t = vec![vec![vec![zero(); n]; n]; n];
    for &(i, j, k) in entries {
        t[i][j][k] = one();
    }
    t
}

pub fn base_algebras() -> Vec<BaseAlgebra> {
    vec![
        BaseAlgebra {
            name: "k x k x k",
            table: table_from(&[(0, 0, 0), (1, 1, 1), (2, 2, 2)], 3),
            unit: vec![one(), one(), one()],
            tau: vec![zero(), one(), zero()],
        },
        BaseAlgebra {
            // e1, e2, alpha with e1 alpha = alpha = alpha e2
            name: "upper triangular 2x2",
            table: table_from(&[(0, 0, 0), (1, 1, 1), (0, 2, 2), (2, 1, 2)], 3),
            unit: vec![one(), one(), zero()],
            tau: vec![one(), zero(), zero()],
        },
        BaseAlgebra {
            name: "k[x]/x^3",
            table: table_from(
                &[
                    (0, 0, 0),
                    (0, 1, 1),
                    (1, 0, 1),
                    (0, 2, 2),
                    (2, 0, 2),
                    (1, 1, 2),
                ],
                3,
            ),
            unit: vec![one(), zero(), zero()],
            tau: vec![one(), zero(), zero()],
        },
        BaseAlgebra {
            name: "k x k[x]/x^2",
            table: table_from(&[(0, 0, 0), (1, 1, 1), (1, 2, 2), (2, 1, 2)], 3),
            unit: vec![one(), one(), zero()],
            tau: vec![zero(), one(), zero()],
        },
    ]
}

/// Bilinear product from a structure table.
pub fn oracle_mul(table: &StructureTable, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let n = x.len();
    let mut out = vec![zero(); n];
    for i in 0..n {
        for j in 0..n {
            let w = &x[i] * &y[j];
            if w == zero() {
                continue;
            }
            for k in 0..n {
                out[k] += &w * &table[i][j][k];
            }
        }
    }
    out
}

pub fn det3(m: &[Vec<Rational>]) -> Rational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Inverse of a 3x3 matrix by the adjugate.
pub fn inv3(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = det3(m);
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
        &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
    };
    let cof = [
        [c(1, 2, 1, 2), -c(1, 2, 0, 2), c(1, 2, 0, 1)],
        [-c(0, 2, 1, 2), c(0, 2, 0, 2), -c(0, 2, 0, 1)],
        [c(0, 1, 1, 2), -c(0, 1, 0, 2), c(0, 1, 0, 1)],
    ];
    // inverse = adj / det, adj = cof^T
    (0..3)
        .map(|i| (0..3).map(|j| &cof[j][i] / &d).collect())
        .collect()
}

fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// A random invertible basis, as column vectors in the old coordinates.
pub fn random_basis<R: Rng>(rng: &mut R) -> Vec<Vec<Rational>> {
    loop {
        let cols: Vec<Vec<Rational>> = (0..3)
            .map(|_| (0..3).map(|_| q(rng.gen_range(-2..=2), 1)).collect())
            .collect();
        let rows: Vec<Vec<Rational>> = (0..3)
            .map(|i| (0..3).map(|j| cols[j][i].clone()).collect())
            .collect();
        if det3(&rows) != zero() {
            return cols;
        }
    }
}

/// The base algebra written in a new basis: table, unit and augmentation.
pub fn oracle_rebase(
    base: &BaseAlgebra,
    cols: &[Vec<Rational>],
) -> (StructureTable, Vec<Rational>, Vec<Rational>) {
    let p: Vec<Vec<Rational>> = (0..3)
        .map(|i| (0..3).map(|j| cols[j][i].clone()).collect())
        .collect();
    let p_inv = inv3(&p);
    let table = cols
        .iter()
        .map(|bi| {
            cols.iter()
                .map(|bj| mat_vec(&p_inv, &oracle_mul(&base.table, bi, bj)))
                .collect()
        })
        .collect();
    let unit = mat_vec(&p_inv, &base.unit);
    let tau = cols
        .iter()
        .map(|c| c.iter().zip(&base.tau).map(|(a, b)| a * b).sum())
        .collect();
    (table, unit, tau)
}

/// What a correct validator must report, in its scan order.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Valid,
    Associativity(usize, usize, usize),
    Unit(usize, &'static str),
}

fn basis(n: usize, i: usize) -> Vec<Rational> {
    (0..n)
        .map(|k| if k == i { one() } else { zero() })
        .collect()
}

pub fn oracle_validate(table: &StructureTable, unit: &[Rational]) -> Verdict {
    let n = unit.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let left = oracle_mul(table, &table[i][j], &basis(n, k));
                let right = oracle_mul(table, &basis(n, i), &table[j][k]);
                if left != right {
                    return Verdict::Associativity(i, j, k);
                }
            }
        }
    }
    for i in 0..n {
        let b = basis(n, i);
        if oracle_mul(table, unit, &b) != b {
            return Verdict::Unit(i, "left");
        }
        if oracle_mul(table, &b, unit) != b {
            return Verdict::Unit(i, "right");
        }
    }
    Verdict::Valid
}

pub fn verdict_of<T>(r: &Result<T, AlgebraError>) -> Option<Verdict> {
    match r {
        Ok(_) => Some(Verdict::Valid),
        Err(AlgebraError::AssociativityViolation { i, j, k, .. }) => {
            Some(Verdict::Associativity(*i, *j, *k))
        }
        Err(AlgebraError::UnitViolation { index, side }) => Some(Verdict::Unit(*index, side)),
        Err(_) => None,
    }
}

/// Perturbs one structure constant or one unit coordinate.
pub fn corrupt<R: Rng>(rng: &mut R, table: &mut StructureTable, unit: &mut [Rational]) {
    let mut delta = rand_q(rng, 3);
    if delta == zero() {
        delta = one();
    }
    if rng.gen_bool(0.8) {
        let (i, j, k) = (
            rng.gen_range(0..3),
            rng.gen_range(0..3),
            rng.gen_range(0..3),
        );
        table[i][j][k] += delta;
    } else {
        unit[rng.gen_range(0..3)] += delta;
    }
}

/// `τ(1) = 1` and `τ(b_i b_j) = τ(b_i) τ(b_j)` checked directly.
pub fn oracle_tau_ok(table: &StructureTable, unit: &[Rational], tau: &[Rational]) -> bool {
    let ev = |v: &[Rational]| -> Rational { v.iter().zip(tau).map(|(a, b)| a * b).sum() };
    if ev(unit) != one() {
        return false;
    }
    let n = unit.len();
    (0..n).all(|i| (0..n).all(|j| ev(&table[i][j]) == &tau[i] * &tau[j]))
}

// ------------------------------------------------------------------ phi

/// Coefficients of `φ` on `[0, 1]`: `p1(x) = a1 x + a2 x^2` on `[0, b]`,
/// `p2(x) = c + a3 x + a4 x^3` on `[b, 1]` with `p2(b) >= p1(b)`, plus jumps.
#[derive(Debug, Clone)]
pub struct PhiOracle {
    pub b: Rational,
    pub a: [Rational; 4],
    pub c: Rational,
    pub jumps: Vec<(Rational, Rational)>,
}

impl PhiOracle {
    pub fn random<R: Rng>(rng: &mut R, with_jumps: bool) -> Self {
        let b = q(rng.gen_range(1..8), 8);
        let mut a: [Rational; 4] = std::array::from_fn(|_| rand_nonneg_q(rng, 3));
        if a[0] == zero() && a[1] == zero() {
            a[0] = one();
        }
        if a[2] == zero() && a[3] == zero() {
            a[2] = one();
        }
        let p1b = &a[0] * &b + &a[1] * &b * &b;
        let p2b_base = &a[2] * &b + &a[3] * &b * &b * &b;
        let gap = if with_jumps && rng.gen_bool(0.3) {
            rand_nonneg_q(rng, 2)
        } else {
            zero()
        };
        let c = p1b - p2b_base + gap;
        let mut jumps = Vec::new();
        if with_jumps {
            for _ in 0..rng.gen_range(0..3) {
                let at = q(rng.gen_range(1..=16), 16);
                if jumps.iter().any(|(x, _): &(Rational, Rational)| *x == at) {
                    continue;
                }
                jumps.push((at, q(rng.gen_range(1..=4), 4)));
            }
        }
        PhiOracle { b, a, c, jumps }
    }

    fn show(x: &Rational) -> String {
        format!("({})", Scalar::Exact(x.clone()))
    }

    pub fn model(&self) -> PhiModel {
        let [a1, a2, a3, a4] = &self.a;
        let p1 = format!("{}*x + {}*x^2", Self::show(a1), Self::show(a2));
        let p2 = format!(
            "{} + {}*x + {}*x^3",
            Self::show(&self.c),
            Self::show(a3),
            Self::show(a4)
        );
        PhiModel::new(
            vec![
                PhiPiece {
                    lo: zero(),
                    hi: self.b.clone(),
                    f: UnaryFn::parse(&p1).unwrap(),
                },
                PhiPiece {
                    lo: self.b.clone(),
                    hi: one(),
                    f: UnaryFn::parse(&p2).unwrap(),
                },
            ],
            self.jumps.clone(),
        )
        .unwrap()
    }

    fn p1(&self, x: &Rational) -> Rational {
        &self.a[0] * x + &self.a[1] * x * x
    }

    fn p2(&self, x: &Rational) -> Rational {
        &self.c + &self.a[2] * x + &self.a[3] * x * x * x
    }

    /// `φ(x)`: right piece at the breakpoint, jumps at or before `x`.
    pub fn at(&self, x: &Rational) -> Rational {
        let base = if *x < self.b { self.p1(x) } else { self.p2(x) };
        base + self
            .jumps
            .iter()
            .filter(|(a, _)| a <= x)
            .map(|(_, h)| h.clone())
            .sum::<Rational>()
    }

    /// `φ(x−)`.
    pub fn before(&self, x: &Rational) -> Rational {
        let base = if *x <= self.b { self.p1(x) } else { self.p2(x) };
        base + self
            .jumps
            .iter()
            .filter(|(a, _)| a < x)
            .map(|(_, h)| h.clone())
            .sum::<Rational>()
    }

    pub fn interval(&self, iv: &Interval) -> Rational {
        if iv.lo > iv.hi || (iv.lo == iv.hi && !(iv.lo_closed && iv.hi_closed)) {
            return zero();
        }
        let hi = if iv.hi_closed {
            self.at(&iv.hi)
        } else {
            self.before(&iv.hi)
        };
        let lo = if iv.lo_closed {
            self.before(&iv.lo)
        } else {
            self.at(&iv.lo)
        };
        hi - lo
    }
}

// ---------------------------------------------------------- boxes, steps

/// A random interval inside `[0, 1]` with endpoints on the 1/16 grid.
pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    let mut a = rng.gen_range(0..=16);
    let mut b = rng.gen_range(0..=16);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    Interval::new(q(a, 16), q(b, 16), rng.gen_bool(0.5), rng.gen_bool(0.5))
}

pub fn random_box<R: Rng>(rng: &mut R, dim: usize) -> CoordBox {
    CoordBox::new((0..dim).map(|_| random_interval(rng)).collect())
}

/// Splits `b` along one axis at an interior grid point into two disjoint
/// boxes, assigning the cut point to one side.
pub fn split_box<R: Rng>(rng: &mut R, b: &CoordBox) -> Option<(CoordBox, CoordBox)> {
    let axis = rng.gen_range(0..b.dim());
    let s = b.side(axis);
    let lo = (&s.lo * q(32, 1)).to_integer();
    let hi = (&s.hi * q(32, 1)).to_integer();
    let (lo, hi): (i64, i64) = (lo.try_into().ok()?, hi.try_into().ok()?);
    if hi - lo < 2 {
        return None;
    }
    let cut = q(rng.gen_range(lo + 1..hi), 32);
    let left_closed = rng.gen_bool(0.5);
    let mut l = b.sides().to_vec();
    let mut r = b.sides().to_vec();
    l[axis] = Interval::new(s.lo.clone(), cut.clone(), s.lo_closed, left_closed);
    r[axis] = Interval::new(cut, s.hi.clone(), !left_closed, s.hi_closed);
    Some((CoordBox::new(l), CoordBox::new(r)))
}

/// Random rational values on the level-`u` grid of `region`.
pub fn random_step<R: Rng>(rng: &mut R, region: &Region, u: u32) -> StepFunction {
    let cells = region.cell_count(u) as usize;
    let values = (0..cells).map(|_| Scalar::Exact(rand_q(rng, 5))).collect();
    StepFunction::from_grid_values(region.clone(), u, values)
}

/// [`random_step`] at a random level in `0..=max_u`.
pub fn random_step_upto<R: Rng>(rng: &mut R, region: &Region, max_u: u32) -> StepFunction {
    let u = rng.gen_range(0..=max_u);
    random_step(rng, region, u)
}

/// Plain rectangle-sum integral on the pieces, with an explicit box measure.
pub fn oracle_integral(f: &StepFunction, measure: impl Fn(&CoordBox) -> Rational) -> Rational {
    f.pieces()
        .iter()
        .map(|(b, v)| v.as_rational().expect("exact value") * measure(b))
        .sum()
}

pub fn lebesgue_box(b: &CoordBox) -> Rational {
    b.sides()
        .iter()
        .map(|s| if s.hi > s.lo { &s.hi - &s.lo } else { zero() })
        .product()
}
