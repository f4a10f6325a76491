use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use super::{FloatMatrix, IndexSet};
use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub type RationalVector = Vec<Rational>;

/// Parse `p`, `-p` or `p/q` (q > 0 after sign handling, q != 0).
pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let parse_int = |s: &str| -> std::result::Result<BigInt, String> {
        let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("invalid rational literal {text:?}"));
        }
        s.parse::<BigInt>()
            .map_err(|_| format!("invalid rational literal {text:?}"))
    };
    let p = parse_int(num)?;
    let q = match den {
        Some(d) => parse_int(d)?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Rational::new(p, q))
}

/// `p` for integers, `p/q` otherwise.
pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

/// Dense `rows x cols` matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Reduced row echelon form with the pivot column of each nonzero row.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: RationalMatrix,
    pub pivots: Vec<usize>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "ragged rows: expected {n} entries, found {}",
                bad.len()
            )));
        }
        Self::new(m, n, rows.into_iter().flatten().collect())
    }

    /// Row-major integer entries.
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries
                .iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![Rational::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Rational::one();
        }
        Self::new(n, n, data)
    }

    /// Exact image of a float matrix (every finite double is a dyadic rational).
    pub fn from_float_exact(a: &FloatMatrix) -> Self {
        let data = (0..a.rows())
            .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
            .map(|(i, j)| Rational::from_float(a.get(i, j)).expect("finite by construction"))
            .collect();
        Self {
            rows: a.rows(),
            cols: a.cols(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> RationalVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Rational] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        let data = (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut data = vec![Rational::zero(); self.rows * rhs.cols];
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(t, j);
                    if !b.is_zero() {
                        data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Self::new(self.rows, rhs.cols, data)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<RationalVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Submatrix keeping the listed columns in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let data = (0..self.rows)
            .flat_map(|i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        Self {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn is_zero_column(&self, j: usize) -> bool {
        (0..self.rows).all(|i| self.get(i, j).is_zero())
    }

    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.is_zero_column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn rref(&self) -> Rref {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a[i * n + c].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..n {
                    a.swap(p * n + j, r * n + j);
                }
            }
            let inv = a[r * n + c].recip();
            for j in c..n {
                a[r * n + j] *= &inv;
            }
            for i in 0..m {
                if i == r || a[i * n + c].is_zero() {
                    continue;
                }
                let f = a[i * n + c].clone();
                for j in c..n {
                    if !a[r * n + j].is_zero() {
                        let t = &f * &a[r * n + j];
                        a[i * n + j] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: Self {
                rows: m,
                cols: n,
                data: a,
            },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// One vector per free column of the RREF (ascending), with that free
    /// variable set to 1 and the other free variables set to 0.
    pub fn null_space_basis(&self) -> Vec<RationalVector> {
        let Rref { matrix: r, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn columns_dependent(&self, cols: &[usize]) -> bool {
        self.select_columns(cols).rank() < cols.len()
    }

    /// Nearest-double image; fails if any entry overflows.
    pub fn to_float(&self) -> Result<FloatMatrix> {
        let mut out = Vec::with_capacity(self.data.len());
        for (idx, v) in self.data.iter().enumerate() {
            let x = v.to_f64().unwrap_or(f64::NAN);
            if !x.is_finite() {
                return Err(Error::FloatOverflow {
                    row: idx / self.cols,
                    col: idx % self.cols,
                });
            }
            out.push(x);
        }
        FloatMatrix::from_row_major(self.rows, self.cols, out)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> Rational {
        self.data
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(rational_to_string).collect())
            .collect();
        let mut s = serializer.serialize_struct("RationalMatrix", 3)?;
        s.serialize_field("rows", &self.rows)?;
        s.serialize_field("cols", &self.cols)?;
        s.serialize_field("entries", &entries)?;
        s.end()
    }
}

pub fn rank_exact(a: &RationalMatrix) -> usize {
    a.rank()
}

pub fn null_space_basis(a: &RationalMatrix) -> Vec<RationalVector> {
    a.null_space_basis()
}

/// True iff the columns of `a` indexed by `s` are linearly dependent.
pub fn columns_dependent(a: &RationalMatrix, s: &IndexSet) -> bool {
    a.columns_dependent(s.indices())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    fn m(rows: usize, cols: usize, e: &[i64]) -> RationalMatrix {
        RationalMatrix::from_i64(rows, cols, e).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RationalMatrix::identity(3).unwrap().rank(), 3);
        assert_eq!(m(2, 2, &[0, 0, 0, 0]).rank(), 0);
        assert_eq!(m(2, 2, &[1, 2, 2, 4]).rank(), 1);
    }

    #[test]
    fn null_space_examples() {
        assert_eq!(
            m(1, 2, &[1, 1]).null_space_basis(),
            vec![vec![q(-1, 1), q(1, 1)]]
        );
        assert!(RationalMatrix::identity(2)
            .unwrap()
            .null_space_basis()
            .is_empty());
        assert_eq!(
            m(2, 3, &[1, 0, 1, 0, 1, 1]).null_space_basis(),
            vec![vec![q(-1, 1), q(-1, 1), q(1, 1)]]
        );
    }

    #[test]
    fn columns_dependent_examples() {
        let s = |v: Vec<usize>, n| IndexSet::new(v, n).unwrap();
        assert!(columns_dependent(&m(1, 2, &[1, 1]), &s(vec![0, 1], 2)));
        assert!(!columns_dependent(
            &RationalMatrix::identity(3).unwrap(),
            &s(vec![0, 2], 3)
        ));
        assert!(columns_dependent(
            &m(2, 3, &[1, 0, 1, 0, 1, 1]),
            &s(vec![0, 1, 2], 3)
        ));
    }

    #[test]
    fn to_float_rounds_to_nearest() {
        let half = RationalMatrix::new(1, 1, vec![q(1, 2)])
            .unwrap()
            .to_float()
            .unwrap();
        assert_eq!(half.get(0, 0), 0.5);
        let third = RationalMatrix::new(1, 1, vec![q(1, 3)])
            .unwrap()
            .to_float()
            .unwrap();
        assert_eq!(third.get(0, 0), 1.0 / 3.0);
        let id = RationalMatrix::identity(3).unwrap().to_float().unwrap();
        assert_eq!(id, FloatMatrix::identity(3));
    }

    #[test]
    fn to_float_rejects_overflow() {
        let huge = Rational::from_integer(BigInt::from(10).pow(400));
        let a = RationalMatrix::new(1, 2, vec![q(1, 1), huge]).unwrap();
        assert!(matches!(
            a.to_float(),
            Err(Error::FloatOverflow { row: 0, col: 1 })
        ));
    }

    #[test]
    fn parse_rational_grammar() {
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("-1/3").unwrap(), q(-1, 3));
        assert_eq!(parse_rational("4/6").unwrap(), q(2, 3));
        assert!(parse_rational("1/0")
            .unwrap_err()
            .contains("zero denominator"));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("/2").is_err());
    }

    #[test]
    fn empty_shapes_rejected() {
        assert!(matches!(
            RationalMatrix::new(0, 2, vec![]),
            Err(Error::EmptyMatrix)
        ));
        assert!(matches!(
            RationalMatrix::from_i64(2, 2, &[1, 2, 3]),
            Err(Error::ShapeMismatch { got: 3, .. })
        ));
    }

    #[test]
    fn exact_float_image_round_trips() {
        let f = FloatMatrix::from_row_major(1, 3, vec![0.1, -2.5, 1e-300]).unwrap();
        let r = RationalMatrix::from_float_exact(&f);
        assert_eq!(r.to_float().unwrap(), f);
    }
}
