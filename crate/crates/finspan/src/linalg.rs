//! Exact rational scalars and matrices.
//!
//! Scalars are arbitrary-precision reduced fractions with positive
//! denominator; there is no floating point anywhere in this crate. Rank,
//! kernel, and linear solving go through fraction-free (Bareiss) elimination
//! with first-nonzero pivoting, so identical inputs produce identical
//! eliminations on every platform.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
}

/// An exact rational number, kept in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Rational> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub(crate) fn from_big(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rational {
    type Err = LinalgError;

    /// Parses `"p"` or `"p/q"`; the denominator must be nonzero.
    fn from_str(s: &str) -> Result<Self, LinalgError> {
        let bad = || LinalgError::BadRational(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let numer = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let denom = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if denom.is_zero() {
                return Err(bad());
            }
            Ok(Rational(BigRational::new(numer, denom)))
        } else {
            let numer = BigInt::from_str(s).map_err(|_| bad())?;
            Ok(Rational(BigRational::from_integer(numer)))
        }
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

/// A dense rows x cols matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix with the given shape and entries produced in row-major order.
    pub fn build(rows: usize, cols: usize, mut entry: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(entry(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.get(i, j).is_one()
                    } else {
                        self.get(i, j).is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> RatMatrix {
        RatMatrix::build(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        RatMatrix::build(self.rows, rhs.cols, |i, j| {
            let mut acc = Rational::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_zero() {
                    acc += a * rhs.get(k, j);
                }
            }
            acc
        })
    }

    pub fn add(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix::build(self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn scale(&self, s: &Rational) -> RatMatrix {
        RatMatrix::build(self.rows, self.cols, |i, j| s * self.get(i, j))
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * &v[k];
                }
                acc
            })
            .collect()
    }

    /// Kronecker product; row-major pair indexing `(i,k) -> i*rhs.rows + k`.
    pub fn kronecker(&self, rhs: &RatMatrix) -> RatMatrix {
        RatMatrix::build(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            let (i1, i2) = (i / rhs.rows, i % rhs.rows);
            let (j1, j2) = (j / rhs.cols, j % rhs.cols);
            self.get(i1, j1) * rhs.get(i2, j2)
        })
    }

    pub fn trace(&self) -> Rational {
        assert!(self.is_square());
        let mut acc = Rational::zero();
        for i in 0..self.rows {
            acc += self.get(i, i).clone();
        }
        acc
    }

    pub fn rank(&self) -> usize {
        Elimination::run(self).rank
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let e = Elimination::run(self);
        if e.rank != self.rows {
            return None;
        }
        // T * M = I once M has full rank and the RREF is the identity.
        Some(e.transform)
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Outcome of Bareiss elimination: `transform * input = rref`.
struct Elimination {
    rank: usize,
    pivots: Vec<usize>,
    rref: RatMatrix,
    transform: RatMatrix,
}

impl Elimination {
    fn run(m: &RatMatrix) -> Elimination {
        let (rows, cols) = (m.rows, m.cols);
        // Clear denominators per row so the forward pass stays in integers.
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
        let mut t = RatMatrix::identity(rows);
        for i in 0..rows {
            let mut lcm = BigInt::one();
            for j in 0..cols {
                lcm = lcm.lcm(m.get(i, j).denom());
            }
            let scale = Rational::from_big(BigRational::from_integer(lcm.clone()));
            a.push(
                (0..cols)
                    .map(|j| (m.get(i, j) * &scale).numer().clone())
                    .collect(),
            );
            t.set(i, i, scale);
        }

        // Fraction-free forward elimination, first-nonzero pivoting.
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0usize;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            if p != r {
                a.swap(p, r);
                for j in 0..rows {
                    let x = t.get(p, j).clone();
                    let y = t.get(r, j).clone();
                    t.set(p, j, y);
                    t.set(r, j, x);
                }
            }
            let pivot = a[r][c].clone();
            for i in r + 1..rows {
                let factor = a[i][c].clone();
                for j in 0..cols {
                    let v = (&pivot * &a[i][j] - &factor * &a[r][j]) / &prev;
                    a[i][j] = v;
                }
                let pr = Rational::from_big(BigRational::new(pivot.clone(), prev.clone()));
                let fr = Rational::from_big(BigRational::new(factor, prev.clone()));
                for j in 0..rows {
                    let v = &(&pr * t.get(i, j)) - &(&fr * t.get(r, j));
                    t.set(i, j, v);
                }
            }
            pivots.push(c);
            prev = pivot;
            r += 1;
            if r == rows {
                break;
            }
        }
        let rank = r;

        // Normalize pivot rows and back-substitute; from here on rational.
        let mut rref = RatMatrix::build(rows, cols, |i, j| {
            Rational::from_big(BigRational::from_integer(a[i][j].clone()))
        });
        for (ri, &pc) in pivots.iter().enumerate() {
            let inv = rref.get(ri, pc).inverse().expect("pivot is nonzero");
            for j in 0..cols {
                let v = &inv * rref.get(ri, j);
                rref.set(ri, j, v);
            }
            for j in 0..rows {
                let v = &inv * t.get(ri, j);
                t.set(ri, j, v);
            }
        }
        for ri in (0..rank).rev() {
            for above in 0..ri {
                let factor = rref.get(above, pivots[ri]).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..cols {
                    let v = rref.get(above, j) - &(&factor * rref.get(ri, j));
                    rref.set(above, j, v);
                }
                for j in 0..rows {
                    let v = t.get(above, j) - &(&factor * t.get(ri, j));
                    t.set(above, j, v);
                }
            }
        }

        Elimination {
            rank,
            pivots,
            rref,
            transform: t,
        }
    }
}

/// Reusable exact solver for `M x = b`, built once from `M`.
#[derive(Clone)]
pub struct LinSolver {
    rows: usize,
    cols: usize,
    rank: usize,
    pivots: Vec<usize>,
    transform: RatMatrix,
}

impl LinSolver {
    pub fn new(m: &RatMatrix) -> LinSolver {
        let e = Elimination::run(m);
        LinSolver {
            rows: m.rows(),
            cols: m.cols(),
            rank: e.rank,
            pivots: e.pivots,
            transform: e.transform,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Solves `M x = b`; `Ok(None)` when the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let y = self.transform.apply(b);
        if y[self.rank..].iter().any(|v| !v.is_zero()) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (ri, &pc) in self.pivots.iter().enumerate() {
            x[pc] = y[ri].clone();
        }
        Ok(Some(x))
    }
}

/// Exact rank, kernel basis (one basis vector per column), and a solver
/// handle for `M x = b`.
pub fn rref_rank_kernel(m: &RatMatrix) -> (usize, RatMatrix, LinSolver) {
    let e = Elimination::run(m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !e.pivots.contains(c)).collect();
    let mut kernel = RatMatrix::zeros(m.cols(), free.len());
    for (k, &fc) in free.iter().enumerate() {
        kernel.set(fc, k, Rational::one());
        for (ri, &pc) in e.pivots.iter().enumerate() {
            kernel.set(pc, k, -e.rref.get(ri, fc).clone());
        }
    }
    let solver = LinSolver {
        rows: m.rows(),
        cols: m.cols(),
        rank: e.rank,
        pivots: e.pivots,
        transform: e.transform,
    };
    (e.rank, kernel, solver)
}
