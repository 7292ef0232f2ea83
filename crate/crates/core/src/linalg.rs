//! Exact integer linear algebra: Gram matrices, fraction-free determinants,
//! definiteness with checkable witnesses, and Sylvester inertia.
//!
//! Nothing here touches floating point. Determinants use Bareiss elimination
//! over `BigInt`; inertia and witnesses come from a symmetric congruence
//! diagonalization over `BigRational`, whose transformation columns are
//! cleared to primitive integer vectors.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{SignedGraph, VertexId};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rows have unequal length")]
    Ragged,
    #[error("not a Gram matrix: {0}")]
    NotGram(String),
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Ragged);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(<[i64]>::to_vec)
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Matrix product; panics if an entry leaves the `i64` range.
    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let acc: i128 = (0..self.cols)
                    .map(|k| self.get(i, k) as i128 * rhs.get(k, j) as i128)
                    .sum();
                out.set(i, j, i64::try_from(acc).expect("integer matrix entry overflow"));
            }
        }
        Ok(out)
    }

    /// `self^T * m * self`.
    pub fn congruence(&self, m: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        self.transpose().mul(&m.mul(self)?)
    }

    /// Column operation `C_j += factor * C_i`.
    pub fn add_column_multiple(&mut self, j: usize, i: usize, factor: i64) {
        for r in 0..self.rows {
            let v = self.get(r, j) + factor * self.get(r, i);
            self.set(r, j, v);
        }
    }

    pub fn negate_column(&mut self, j: usize) {
        for r in 0..self.rows {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| x[j].clone() * self.get(i, j)).sum())
            .collect()
    }

    pub fn quadratic_form(&self, x: &[BigInt]) -> BigInt {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Leading principal submatrix of size `k`.
    pub fn leading(&self, k: usize) -> IntMatrix {
        self.principal(&(0..k).collect::<Vec<_>>())
    }

    pub fn principal(&self, idx: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    /// Determinant by fraction-free (Bareiss) elimination with row pivoting.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        bareiss_det(self)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

fn bareiss_det(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// The symmetric matrix `2I + A(G)` of a signed graph.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct GramMatrix(IntMatrix);

impl GramMatrix {
    pub fn new(m: IntMatrix) -> Result<Self, MatrixError> {
        if !m.is_symmetric() {
            return Err(MatrixError::NotGram("not symmetric".into()));
        }
        for i in 0..m.rows() {
            if m.get(i, i) != 2 {
                return Err(MatrixError::NotGram(format!("diagonal entry {i} is not 2")));
            }
            for j in 0..i {
                if m.get(i, j).abs() > 1 {
                    return Err(MatrixError::NotGram(format!("entry ({i},{j}) outside {{-1,0,1}}")));
                }
            }
        }
        Ok(GramMatrix(m))
    }

    pub fn of(g: &SignedGraph) -> Self {
        gram_matrix(g)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.0
    }

    pub fn det(&self) -> BigInt {
        self.0.det()
    }

    /// The signed graph on the given vertex ids whose Gram matrix this is.
    pub fn to_signed_graph(&self, ids: &[VertexId]) -> Result<SignedGraph, crate::graph::GraphError> {
        assert_eq!(ids.len(), self.dim());
        let mut g = SignedGraph::new(ids.iter().copied())?;
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                if let Some(s) = crate::graph::Sign::from_value(self.0.get(i, j)) {
                    g.add_edge(ids[i], ids[j], s)?;
                }
            }
        }
        Ok(g)
    }
}

impl TryFrom<Vec<Vec<i64>>> for GramMatrix {
    type Error = MatrixError;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, Self::Error> {
        GramMatrix::new(IntMatrix::from_rows(&rows)?)
    }
}

impl From<GramMatrix> for Vec<Vec<i64>> {
    fn from(g: GramMatrix) -> Self {
        g.0.to_rows()
    }
}

impl fmt::Debug for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gram{:?}", self.0)
    }
}

pub fn gram_matrix(g: &SignedGraph) -> GramMatrix {
    let n = g.order();
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        m.set(i, i, 2);
    }
    let idx = |v: VertexId| g.index_of(v).expect("edge endpoint is a vertex");
    for (u, v, s) in g.edges() {
        let (i, j) = (idx(u), idx(v));
        m.set(i, j, s.value());
        m.set(j, i, s.value());
    }
    GramMatrix(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

/// Exact definiteness verdict with a certificate for the non-definite cases.
///
/// For `PositiveSemidefinite` the witness is a nonzero kernel vector; for
/// `Indefinite` it is a vector with negative quadratic form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinitenessReport {
    pub verdict: Verdict,
    #[serde(with = "bigint_vec_opt")]
    pub witness: Option<Vec<BigInt>>,
    #[serde(with = "bigint_vec")]
    pub leading_minors: Vec<BigInt>,
}

impl DefinitenessReport {
    pub fn is_positive_definite(&self) -> bool {
        self.verdict == Verdict::PositiveDefinite
    }

    pub fn witness_i64(&self) -> Option<Vec<i64>> {
        self.witness
            .as_ref()
            .map(|w| w.iter().map(|x| x.to_i64().expect("witness fits i64")).collect())
    }

    /// Re-checks the witness against `m` in exact integer arithmetic.
    pub fn witness_holds(&self, m: &IntMatrix) -> bool {
        match (self.verdict, &self.witness) {
            (Verdict::PositiveDefinite, _) => true,
            (Verdict::PositiveSemidefinite, Some(w)) => {
                w.iter().any(|x| !x.is_zero()) && m.apply(w).iter().all(Zero::is_zero)
            }
            (Verdict::Indefinite, Some(w)) => m.quadratic_form(w).is_negative(),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    pub fn rank(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_zero + self.n_minus
    }
}

/// Result of `T^T M T = D` with `D` diagonal.
struct Diagonalization {
    diagonal: Vec<BigRational>,
    /// Columns of `T`.
    basis: Vec<Vec<BigRational>>,
}

fn diagonalize(m: &IntMatrix) -> Diagonalization {
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(m.get(i, j).into())).collect())
        .collect();
    // basis[c] is column c of T.
    let mut basis: Vec<Vec<BigRational>> = (0..n)
        .map(|c| {
            (0..n)
                .map(|r| {
                    if r == c {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();

    // Congruence step helpers acting on both A and T.
    fn swap(a: &mut [Vec<BigRational>], t: &mut [Vec<BigRational>], i: usize, j: usize) {
        a.swap(i, j);
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        t.swap(i, j);
    }
    fn add(a: &mut [Vec<BigRational>], t: &mut [Vec<BigRational>], j: usize, i: usize, c: &BigRational) {
        // column j += c * column i, then row j += c * row i
        for row in a.iter_mut() {
            let v = &row[i] * c;
            row[j] += v;
        }
        let ri = a[i].clone();
        for (x, y) in a[j].iter_mut().zip(ri) {
            *x += y * c;
        }
        let ti = t[i].clone();
        for (x, y) in t[j].iter_mut().zip(ti) {
            *x += y * c;
        }
    }

    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(p) = (k + 1..n).find(|&p| !a[p][p].is_zero()) {
                swap(&mut a, &mut basis, k, p);
            } else if let Some(p) = (k + 1..n).find(|&p| !a[k][p].is_zero()) {
                // a[k][k] = 0 = a[p][p], a[k][p] != 0: x_k += x_p gives 2 a[k][p].
                add(&mut a, &mut basis, k, p, &BigRational::one());
            } else {
                continue;
            }
        }
        let pivot = a[k][k].clone();
        for j in k + 1..n {
            if a[k][j].is_zero() {
                continue;
            }
            let c = -(&a[k][j] / &pivot);
            add(&mut a, &mut basis, j, k, &c);
        }
    }
    Diagonalization {
        diagonal: (0..n).map(|i| a[i][i].clone()).collect(),
        basis,
    }
}

/// Scales a rational vector to a primitive integer vector with the same direction.
fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn leading_minors(m: &IntMatrix) -> Vec<BigInt> {
    (1..=m.rows()).map(|k| m.leading(k).det()).collect()
}

pub fn inertia_of(m: &IntMatrix) -> Inertia {
    let d = diagonalize(m);
    let mut out = Inertia {
        n_plus: 0,
        n_zero: 0,
        n_minus: 0,
    };
    for x in &d.diagonal {
        if x.is_positive() {
            out.n_plus += 1;
        } else if x.is_negative() {
            out.n_minus += 1;
        } else {
            out.n_zero += 1;
        }
    }
    out
}

pub fn inertia(m: &GramMatrix) -> Inertia {
    inertia_of(m.matrix())
}

/// Definiteness of an arbitrary symmetric integer matrix.
pub fn definiteness_of(m: &IntMatrix) -> DefinitenessReport {
    let minors = leading_minors(m);
    if minors.iter().all(Signed::is_positive) {
        return DefinitenessReport {
            verdict: Verdict::PositiveDefinite,
            witness: None,
            leading_minors: minors,
        };
    }
    let d = diagonalize(m);
    let pick = |pred: fn(&BigRational) -> bool| {
        d.diagonal
            .iter()
            .position(pred)
            .map(|k| clear_denominators(&d.basis[k]))
    };
    let (verdict, witness) = match pick(|x| x.is_negative()) {
        Some(w) => (Verdict::Indefinite, Some(w)),
        None => (
            Verdict::PositiveSemidefinite,
            Some(pick(|x| x.is_zero()).expect("not definite, so some pivot vanishes")),
        ),
    };
    let witness = witness.map(normalize_orientation);
    DefinitenessReport {
        verdict,
        witness,
        leading_minors: minors,
    }
}

/// First nonzero entry positive, so witnesses print deterministically.
fn normalize_orientation(w: Vec<BigInt>) -> Vec<BigInt> {
    match w.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => w.into_iter().map(|x| -x).collect(),
        _ => w,
    }
}

pub fn definiteness(m: &GramMatrix) -> DefinitenessReport {
    definiteness_of(m.matrix())
}

pub fn is_positive(g: &SignedGraph) -> bool {
    // All leading minors positive; cheaper than the full report.
    let m = gram_matrix(g);
    (1..=m.dim()).all(|k| m.matrix().leading(k).det().is_positive())
}

pub(crate) mod bigint_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    /// Integers are written as JSON numbers when they fit in `i64`,
    /// decimal strings otherwise.
    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(crate) enum Num {
        Small(i64),
        Big(String),
    }

    pub(crate) fn to_num(x: &BigInt) -> Num {
        match i64::try_from(x) {
            Ok(v) => Num::Small(v),
            Err(_) => Num::Big(x.to_string()),
        }
    }

    pub(crate) fn from_num<E: serde::de::Error>(n: Num) -> Result<BigInt, E> {
        match n {
            Num::Small(v) => Ok(v.into()),
            Num::Big(s) => s.parse().map_err(E::custom),
        }
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_num).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Num>::deserialize(d)?.into_iter().map(from_num).collect()
    }
}

pub(crate) mod bigint_vec_opt {
    use super::bigint_vec::{from_num, to_num, Num};
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(to_num).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        Option::<Vec<Num>>::deserialize(d)?
            .map(|v| v.into_iter().map(from_num).collect())
            .transpose()
    }
}

pub(crate) mod bigint_serde {
    use super::bigint_vec::{from_num, to_num, Num};
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        to_num(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_num(Num::deserialize(d)?)
    }
}
