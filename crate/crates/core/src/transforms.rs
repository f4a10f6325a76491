//! The six elementary operations and their matrix realizations.
//!
//! Index conventions:
//!
//! - `RowAdd { i, j, c }` adds `c` times row `i` to row `j`;
//! - `ColAdd { i, j, c }` adds `c` times column `j` to column `i`.
//!
//! Both are realized by the same elementary matrix `I + c e_j e_i^T`, applied
//! on the left for rows and on the right for columns.

use std::fmt;

use nalgebra::DMatrix;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{FloatMatrix, Rational, RationalMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OpKind {
    RowSwitch,
    RowMult,
    RowAdd,
    ColSwitch,
    ColMult,
    ColAdd,
}

impl OpKind {
    pub const ALL: [OpKind; 6] = [
        OpKind::RowSwitch,
        OpKind::RowMult,
        OpKind::RowAdd,
        OpKind::ColSwitch,
        OpKind::ColMult,
        OpKind::ColAdd,
    ];

    /// Every kind except column addition.
    pub const PRESERVING: [OpKind; 5] = [
        OpKind::RowSwitch,
        OpKind::RowMult,
        OpKind::RowAdd,
        OpKind::ColSwitch,
        OpKind::ColMult,
    ];

    pub fn is_row(self) -> bool {
        matches!(self, OpKind::RowSwitch | OpKind::RowMult | OpKind::RowAdd)
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            OpKind::RowSwitch => "RS",
            OpKind::RowMult => "RM",
            OpKind::RowAdd => "RA",
            OpKind::ColSwitch => "CS",
            OpKind::ColMult => "CM",
            OpKind::ColAdd => "CA",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<OpKind> {
        OpKind::ALL.into_iter().find(|k| k.mnemonic() == s)
    }

    fn needs_pair(self) -> bool {
        !matches!(self, OpKind::RowMult | OpKind::ColMult)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElemOp {
    RowSwitch { i: usize, j: usize },
    RowMult { i: usize, c: Rational },
    RowAdd { i: usize, j: usize, c: Rational },
    ColSwitch { i: usize, j: usize },
    ColMult { i: usize, c: Rational },
    ColAdd { i: usize, j: usize, c: Rational },
}

fn distinct(i: usize, j: usize) -> Result<()> {
    if i == j {
        Err(Error::RepeatedIndex(i))
    } else {
        Ok(())
    }
}

fn nonzero(c: &Rational) -> Result<()> {
    if c.is_zero() {
        Err(Error::ZeroMultiplier)
    } else {
        Ok(())
    }
}

impl ElemOp {
    pub fn row_switch(i: usize, j: usize) -> Result<Self> {
        distinct(i, j)?;
        Ok(ElemOp::RowSwitch { i, j })
    }

    pub fn row_mult(i: usize, c: Rational) -> Result<Self> {
        nonzero(&c)?;
        Ok(ElemOp::RowMult { i, c })
    }

    pub fn row_add(i: usize, j: usize, c: Rational) -> Result<Self> {
        distinct(i, j)?;
        Ok(ElemOp::RowAdd { i, j, c })
    }

    pub fn col_switch(i: usize, j: usize) -> Result<Self> {
        distinct(i, j)?;
        Ok(ElemOp::ColSwitch { i, j })
    }

    pub fn col_mult(i: usize, c: Rational) -> Result<Self> {
        nonzero(&c)?;
        Ok(ElemOp::ColMult { i, c })
    }

    pub fn col_add(i: usize, j: usize, c: Rational) -> Result<Self> {
        distinct(i, j)?;
        Ok(ElemOp::ColAdd { i, j, c })
    }

    pub fn kind(&self) -> OpKind {
        match self {
            ElemOp::RowSwitch { .. } => OpKind::RowSwitch,
            ElemOp::RowMult { .. } => OpKind::RowMult,
            ElemOp::RowAdd { .. } => OpKind::RowAdd,
            ElemOp::ColSwitch { .. } => OpKind::ColSwitch,
            ElemOp::ColMult { .. } => OpKind::ColMult,
            ElemOp::ColAdd { .. } => OpKind::ColAdd,
        }
    }

    pub fn is_row(&self) -> bool {
        self.kind().is_row()
    }

    /// `(i, j, c)` with `j`/`c` absent where the kind has none.
    pub fn parts(&self) -> (usize, Option<usize>, Option<&Rational>) {
        match self {
            ElemOp::RowSwitch { i, j } | ElemOp::ColSwitch { i, j } => (*i, Some(*j), None),
            ElemOp::RowMult { i, c } | ElemOp::ColMult { i, c } => (*i, None, Some(c)),
            ElemOp::RowAdd { i, j, c } | ElemOp::ColAdd { i, j, c } => (*i, Some(*j), Some(c)),
        }
    }

    pub fn coefficient(&self) -> Option<&Rational> {
        self.parts().2
    }

    /// Check the structural invariants and that indices fit `(rows, cols)`.
    pub fn validate(&self, shape: (usize, usize)) -> Result<()> {
        let dim = if self.is_row() { shape.0 } else { shape.1 };
        let (i, j, c) = self.parts();
        for idx in std::iter::once(i).chain(j) {
            if idx >= dim {
                return Err(Error::IndexOutOfRange { index: idx, dim });
            }
        }
        if let Some(j) = j {
            distinct(i, j)?;
        }
        if matches!(self.kind(), OpKind::RowMult | OpKind::ColMult) {
            nonzero(c.expect("mult carries a coefficient"))?;
        }
        Ok(())
    }
}

impl fmt::Display for ElemOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, c) = self.parts();
        write!(f, "{} {i}", self.kind().mnemonic())?;
        if let Some(j) = j {
            write!(f, " {j}")?;
        }
        if let Some(c) = c {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

impl Serialize for ElemOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Apply `op` to `a` exactly.
pub fn apply(a: &RationalMatrix, op: &ElemOp) -> Result<RationalMatrix> {
    op.validate(a.shape())?;
    let mut out = a.clone();
    let (m, n) = a.shape();
    match op {
        ElemOp::RowSwitch { i, j } => {
            let data = out.data_mut();
            for t in 0..n {
                data.swap(i * n + t, j * n + t);
            }
        }
        ElemOp::RowMult { i, c } => {
            for t in 0..n {
                let v = a.get(*i, t) * c;
                out.set(*i, t, v);
            }
        }
        ElemOp::RowAdd { i, j, c } => {
            for t in 0..n {
                let v = a.get(*j, t) + a.get(*i, t) * c;
                out.set(*j, t, v);
            }
        }
        ElemOp::ColSwitch { i, j } => {
            let data = out.data_mut();
            for r in 0..m {
                data.swap(r * n + i, r * n + j);
            }
        }
        ElemOp::ColMult { i, c } => {
            for r in 0..m {
                let v = a.get(r, *i) * c;
                out.set(r, *i, v);
            }
        }
        ElemOp::ColAdd { i, j, c } => {
            for r in 0..m {
                let v = a.get(r, *i) + a.get(r, *j) * c;
                out.set(r, *i, v);
            }
        }
    }
    Ok(out)
}

/// Floating-point counterpart of [`apply`], with `c` rounded to the nearest double.
pub fn apply_float(a: &FloatMatrix, op: &ElemOp) -> Result<FloatMatrix> {
    op.validate((a.rows(), a.cols()))?;
    let mut m: DMatrix<f64> = a.as_dmatrix().clone();
    let cf = op.coefficient().map(|c| c.to_f64().unwrap_or(f64::NAN));
    match op {
        ElemOp::RowSwitch { i, j } => m.swap_rows(*i, *j),
        ElemOp::RowMult { i, .. } => m.row_mut(*i).scale_mut(cf.unwrap()),
        ElemOp::RowAdd { i, j, .. } => {
            let src = m.row(*i) * cf.unwrap();
            let mut dst = m.row_mut(*j);
            dst += src;
        }
        ElemOp::ColSwitch { i, j } => m.swap_columns(*i, *j),
        ElemOp::ColMult { i, .. } => m.column_mut(*i).scale_mut(cf.unwrap()),
        ElemOp::ColAdd { i, j, .. } => {
            let src = m.column(*j) * cf.unwrap();
            let mut dst = m.column_mut(*i);
            dst += src;
        }
    }
    FloatMatrix::from_dmatrix(m)
}

/// The `size x size` elementary matrix `E` with `apply(A, op) = E A` for row
/// kinds and `A E` for column kinds.
pub fn elementary_matrix(op: &ElemOp, size: usize) -> Result<RationalMatrix> {
    op.validate((size, size))?;
    let mut e = RationalMatrix::identity(size)?;
    match op {
        ElemOp::RowSwitch { i, j } | ElemOp::ColSwitch { i, j } => {
            e.set(*i, *i, Rational::zero());
            e.set(*j, *j, Rational::zero());
            e.set(*i, *j, Rational::one());
            e.set(*j, *i, Rational::one());
        }
        ElemOp::RowMult { i, c } | ElemOp::ColMult { i, c } => e.set(*i, *i, c.clone()),
        ElemOp::RowAdd { i, j, c } | ElemOp::ColAdd { i, j, c } => e.set(*j, *i, c.clone()),
    }
    Ok(e)
}

/// The operation that undoes `op`.
pub fn inverse_op(op: &ElemOp) -> ElemOp {
    match op.clone() {
        ElemOp::RowMult { i, c } => ElemOp::RowMult { i, c: c.recip() },
        ElemOp::ColMult { i, c } => ElemOp::ColMult { i, c: c.recip() },
        ElemOp::RowAdd { i, j, c } => ElemOp::RowAdd { i, j, c: -c },
        ElemOp::ColAdd { i, j, c } => ElemOp::ColAdd { i, j, c: -c },
        switch => switch,
    }
}

/// Ordered operations for a declared `(rows, cols)` shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpSequence {
    shape: (usize, usize),
    ops: Vec<ElemOp>,
}

impl OpSequence {
    pub fn new(shape: (usize, usize), ops: Vec<ElemOp>) -> Result<Self> {
        for op in &ops {
            op.validate(shape)?;
        }
        Ok(Self { shape, ops })
    }

    pub fn empty(shape: (usize, usize)) -> Self {
        Self {
            shape,
            ops: Vec::new(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn ops(&self) -> &[ElemOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: ElemOp) -> Result<()> {
        op.validate(self.shape)?;
        self.ops.push(op);
        Ok(())
    }

    /// The first `len` operations.
    pub fn prefix(&self, len: usize) -> Self {
        Self {
            shape: self.shape,
            ops: self.ops[..len.min(self.ops.len())].to_vec(),
        }
    }

    pub fn contains_col_add(&self) -> bool {
        self.ops.iter().any(|o| o.kind() == OpKind::ColAdd)
    }

    pub fn only_rows(&self) -> bool {
        self.ops.iter().all(ElemOp::is_row)
    }

    pub fn apply_all(&self, a: &RationalMatrix) -> Result<RationalMatrix> {
        if a.shape() != self.shape {
            return Err(Error::DimensionMismatch(format!(
                "sequence declared for {:?}, matrix is {:?}",
                self.shape,
                a.shape()
            )));
        }
        self.ops
            .iter()
            .try_fold(a.clone(), |acc, op| apply(&acc, op))
    }

    pub fn apply_all_float(&self, a: &FloatMatrix) -> Result<FloatMatrix> {
        self.ops
            .iter()
            .try_fold(a.clone(), |acc, op| apply_float(&acc, op))
    }

    /// `(P, Q)` with `apply_all(A) = P A Q`.
    pub fn matrix_form(&self) -> Result<(RationalMatrix, RationalMatrix)> {
        let (m, n) = self.shape;
        let mut left = RationalMatrix::identity(m)?;
        let mut right = RationalMatrix::identity(n)?;
        for op in &self.ops {
            if op.is_row() {
                left = elementary_matrix(op, m)?.mul(&left)?;
            } else {
                right = right.mul(&elementary_matrix(op, n)?)?;
            }
        }
        Ok((left, right))
    }
}

impl fmt::Display for OpSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

/// `{+-1, +-2, +-3, +-1/2, +-1/3}`.
pub fn default_coefficient_pool() -> Vec<Rational> {
    [(1, 1), (2, 1), (3, 1), (1, 2), (1, 3)]
        .into_iter()
        .flat_map(|(p, q)| {
            let r = Rational::new(p.into(), q.into());
            [r.clone(), -r]
        })
        .collect()
}

fn feasible(kind: OpKind, shape: (usize, usize)) -> bool {
    let dim = if kind.is_row() { shape.0 } else { shape.1 };
    dim >= if kind.needs_pair() { 2 } else { 1 }
}

/// Draw a kind uniformly from the feasible allowed kinds, then its indices
/// uniformly and its coefficient from `pool`.
pub fn random_op_with<R: Rng + ?Sized>(
    rng: &mut R,
    shape: (usize, usize),
    allowed: &[OpKind],
    pool: &[Rational],
) -> Result<ElemOp> {
    let kinds: Vec<OpKind> = allowed
        .iter()
        .copied()
        .filter(|&k| feasible(k, shape))
        .collect();
    let &kind = kinds.choose(rng).ok_or(Error::NoFeasibleOperation {
        rows: shape.0,
        cols: shape.1,
    })?;
    let needs_c = kind != OpKind::RowSwitch && kind != OpKind::ColSwitch;
    if needs_c && (pool.is_empty() || pool.iter().any(Zero::is_zero)) {
        return Err(Error::InvalidParameter(
            "coefficient pool must be nonempty and free of zeros".into(),
        ));
    }
    let dim = if kind.is_row() { shape.0 } else { shape.1 };
    let i = rng.random_range(0..dim);
    let j = if kind.needs_pair() {
        // uniform over indices other than i
        let j = rng.random_range(0..dim - 1);
        if j >= i {
            j + 1
        } else {
            j
        }
    } else {
        0
    };
    let c = if needs_c {
        pool.choose(rng).cloned().unwrap()
    } else {
        Rational::zero()
    };
    Ok(match kind {
        OpKind::RowSwitch => ElemOp::RowSwitch { i, j },
        OpKind::RowMult => ElemOp::RowMult { i, c },
        OpKind::RowAdd => ElemOp::RowAdd { i, j, c },
        OpKind::ColSwitch => ElemOp::ColSwitch { i, j },
        OpKind::ColMult => ElemOp::ColMult { i, c },
        OpKind::ColAdd => ElemOp::ColAdd { i, j, c },
    })
}

pub fn random_op(
    shape: (usize, usize),
    allowed: &[OpKind],
    seed: u64,
    pool: &[Rational],
) -> Result<ElemOp> {
    random_op_with(&mut ChaCha8Rng::seed_from_u64(seed), shape, allowed, pool)
}

pub fn random_sequence_with<R: Rng + ?Sized>(
    rng: &mut R,
    shape: (usize, usize),
    allowed: &[OpKind],
    pool: &[Rational],
    count: usize,
) -> Result<OpSequence> {
    let ops = (0..count)
        .map(|_| random_op_with(rng, shape, allowed, pool))
        .collect::<Result<Vec<_>>>()?;
    OpSequence::new(shape, ops)
}

/// Product of `op_count` random elementary matrices of all six kinds.
pub fn random_invertible(size: usize, seed: u64, op_count: usize) -> Result<RationalMatrix> {
    if op_count == 0 {
        return Err(Error::InvalidParameter(
            "op_count must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = default_coefficient_pool();
    let mut product = RationalMatrix::identity(size)?;
    for _ in 0..op_count {
        let op = random_op_with(&mut rng, (size, size), &OpKind::ALL, &pool)?;
        product = product.mul(&elementary_matrix(&op, size)?)?;
    }
    if product.rank() != size {
        return Err(Error::Internal(
            "product of elementary matrices lost rank".into(),
        ));
    }
    Ok(product)
}

/// `P D` for a random permutation matrix `P` and a diagonal `D` drawn from
/// the default coefficient pool.
pub fn random_permuted_diagonal(size: usize, seed: u64) -> Result<RationalMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = default_coefficient_pool();
    let mut perm: Vec<usize> = (0..size).collect();
    perm.shuffle(&mut rng);
    let diag: Vec<Rational> = (0..size)
        .map(|_| pool.choose(&mut rng).cloned().unwrap())
        .collect();
    permuted_diagonal(&perm, &diag)
}

/// `P D` where row `r` of `P` has its one at column `perm[r]`.
pub fn permuted_diagonal(perm: &[usize], diag: &[Rational]) -> Result<RationalMatrix> {
    let size = perm.len();
    if diag.len() != size {
        return Err(Error::DimensionMismatch(
            "permutation and diagonal lengths differ".into(),
        ));
    }
    let mut seen = vec![false; size];
    for &p in perm {
        if p >= size || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
    }
    if diag.iter().any(Zero::is_zero) {
        return Err(Error::ZeroMultiplier);
    }
    let mut out = RationalMatrix::new(size, size, vec![Rational::zero(); size * size])?;
    for (r, &p) in perm.iter().enumerate() {
        out.set(r, p, diag[p].clone());
    }
    Ok(out)
}

/// One shrink step toward zero: drop the fractional part, else step the integer by one.
pub(crate) fn shrink_toward_zero(c: &Rational) -> Option<Rational> {
    if c.is_zero() {
        return None;
    }
    let t = c.trunc();
    if t != *c {
        return Some(t);
    }
    let smaller = c - c.signum();
    Some(smaller)
}
