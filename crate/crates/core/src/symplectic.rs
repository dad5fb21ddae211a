//! Linear symplectic structure of `R^{2n}` in split `(q, p)` coordinates.
//!
//! The complex structure is `J(q, p) = (p, -q)` and the symplectic form is
//! `omega0(u, v) = <-J u, v>`, so `omega0(e_i, e_{n+i}) = 1` and a clockwise
//! circle in a `(q_i, p_i)` plane has positive action.
//!
//! For `0 <= k <= n` the coisotropic subspace `R^{n,k}` is spanned by all
//! `q` coordinates and `p_1..p_k`. It splits orthogonally as `V0 + V1` with
//! `V0 = span(q_{k+1}..q_n)` (the characteristic leaf directions) and
//! `V1 = span(q_1..q_k, p_1..p_k)`. The complement of `R^{n,k}` is `J V0`.

use std::ops::{Deref, DerefMut};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for membership predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A point (or vector) of `R^{2n}` ordered `(q_1..q_n, p_1..p_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhasePoint(Vec<f64>);

impl PhasePoint {
    /// Wraps raw coordinates. The length must be even.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "phase point needs an even, nonzero number of coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Self(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; 2 * n])
    }

    /// The `i`-th standard basis vector (0-based, `i < 2n`).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1.0;
        v
    }

    pub fn from_qp(q: &[f64], p: &[f64]) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                got: p.len(),
            });
        }
        let mut c = q.to_vec();
        c.extend_from_slice(p);
        Self::new(c)
    }

    /// Half the ambient dimension.
    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn q(&self) -> &[f64] {
        &self.0[..self.n()]
    }

    pub fn p(&self) -> &[f64] {
        &self.0[self.n()..]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|x| x * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Deref for PhasePoint {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for PhasePoint {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// The pair `(n, k)` selecting `R^{n,k}` inside `R^{2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoisoIndex {
    n: usize,
    k: usize,
}

impl CoisoIndex {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k > n {
            return Err(Error::InvalidIndex { n, k });
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn dim_v0(&self) -> usize {
        self.n - self.k
    }

    pub fn dim_v1(&self) -> usize {
        2 * self.k
    }

    pub fn dim_rnk(&self) -> usize {
        self.n + self.k
    }

    /// Whether coordinate slot `i` (0-based) belongs to `sub`.
    pub fn slot_in(&self, sub: Subspace, i: usize) -> bool {
        let (n, k) = (self.n, self.k);
        let is_q = i < n;
        let j = if is_q { i } else { i - n };
        match sub {
            Subspace::Rnk => is_q || j < k,
            Subspace::V0 => is_q && j >= k,
            Subspace::V1 => j < k,
            Subspace::JV0 => !is_q && j >= k,
        }
    }

    /// Coordinate slots of `V0` in increasing order.
    pub fn v0_slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.k..self.n
    }

    /// Coordinate slots of `V1`: `q_1..q_k` then `p_1..p_k`.
    pub fn v1_slots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.k).chain(self.n..self.n + self.k)
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }
}

/// The four coordinate subspaces attached to a [`CoisoIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subspace {
    Rnk,
    V0,
    V1,
    JV0,
}

/// The standard symplectic form `omega0(u, v) = <-J u, v> = sum_i (q_i p'_i - p_i q'_i)`.
pub fn omega0(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() || !u.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let n = u.len() / 2;
    Ok((0..n).map(|i| u[i] * v[n + i] - u[n + i] * v[i]).sum())
}

/// `J(q, p) = (p, -q)`.
pub fn apply_j(v: &[f64]) -> PhasePoint {
    let mut out = vec![0.0; v.len()];
    apply_j_into(v, &mut out);
    PhasePoint(out)
}

pub(crate) fn apply_j_into(v: &[f64], out: &mut [f64]) {
    let n = v.len() / 2;
    for i in 0..n {
        out[i] = v[n + i];
        out[n + i] = -v[i];
    }
}

/// Orthogonal projection onto one of the coordinate subspaces.
pub fn project(v: &[f64], which: Subspace, idx: CoisoIndex) -> Result<PhasePoint> {
    idx.check(v)?;
    Ok(PhasePoint(
        v.iter()
            .enumerate()
            .map(|(i, &x)| if idx.slot_in(which, i) { x } else { 0.0 })
            .collect(),
    ))
}

/// Euclidean distance from `v` to `R^{n,k}`.
pub fn dist_to_rnk(v: &[f64], idx: CoisoIndex) -> f64 {
    v.iter()
        .enumerate()
        .filter(|(i, _)| !idx.slot_in(Subspace::Rnk, *i))
        .map(|(_, x)| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Distance of `v` from `V0`.
pub fn dist_to_v0(v: &[f64], idx: CoisoIndex) -> f64 {
    v.iter()
        .enumerate()
        .filter(|(i, _)| !idx.slot_in(Subspace::V0, *i))
        .map(|(_, x)| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Leaf relation on `R^{n,k}`: both points lie in `R^{n,k}` and differ by an element of `V0`.
pub fn leaf_equivalent(x: &[f64], y: &[f64], idx: CoisoIndex, tol: f64) -> bool {
    if x.len() != idx.dim() || y.len() != idx.dim() {
        return false;
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    dist_to_rnk(x, idx) <= tol && dist_to_rnk(y, idx) <= tol && dist_to_v0(&diff, idx) <= tol
}

/// Combined endpoint defect of a curve with respect to the leafwise boundary condition.
pub fn leaf_residual(x0: &[f64], x1: &[f64], idx: CoisoIndex) -> f64 {
    let diff: Vec<f64> = x1.iter().zip(x0).map(|(a, b)| a - b).collect();
    dist_to_rnk(x0, idx)
        .max(dist_to_rnk(x1, idx))
        .max(dist_to_v0(&diff, idx))
}

/// Matrix of `J` (equivalently of `omega0`): `[[0, I], [-I, 0]]`.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// A real `2n x 2n` matrix acting on phase points.
#[derive(Debug, Clone, PartialEq)]
pub struct SympMatrix(DMatrix<f64>);

impl SympMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) || m.nrows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "expected a square even-dimensional matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(2 * n, 2 * n))
    }

    /// `exp(theta J)`, a symplectic rotation outside every `Sp(2n,k)` with `k < n` for generic `theta`.
    pub fn rotation(n: usize, theta: f64) -> Self {
        let j = j_matrix(n);
        Self(DMatrix::identity(2 * n, 2 * n) * theta.cos() + j * theta.sin())
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn apply(&self, v: &[f64]) -> PhasePoint {
        let d = self.0.nrows();
        PhasePoint(
            (0..d)
                .map(|r| (0..d).map(|c| self.0[(r, c)] * v[c]).sum())
                .collect(),
        )
    }

    /// Max-entry size of `M^T J M - J`.
    pub fn symplectic_residual(&self) -> f64 {
        let j = j_matrix(self.n());
        (self.0.transpose() * &j * &self.0 - j).amax()
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.symplectic_residual() <= tol
    }

    /// `t * self + (1 - t) * other`.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        Self(&self.0 * t + &other.0 * (1.0 - t))
    }
}

/// Builds the element of `Sp(2n,k)` determined by a symmetric `(n-k) x (n-k)` block `b`:
/// identity except `M[q_j, p_l] = b[j-k, l-k]` for `j, l > k`.
pub fn sp2nk_sample(idx: CoisoIndex, b: &DMatrix<f64>) -> Result<SympMatrix> {
    let m = idx.dim_v0();
    if b.nrows() != m || b.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: b.nrows().max(b.ncols()),
        });
    }
    let asym = (b - b.transpose()).amax();
    if asym > 1e-12 * b.amax().max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(sp2nk_block_form(idx, b))
}

/// The block-form matrix for an arbitrary block, symmetric or not.
pub(crate) fn sp2nk_block_form(idx: CoisoIndex, b: &DMatrix<f64>) -> SympMatrix {
    let (n, k) = (idx.n(), idx.k());
    let mut a = DMatrix::identity(2 * n, 2 * n);
    for j in k..n {
        for l in k..n {
            a[(j, n + l)] = b[(j - k, l - k)];
        }
    }
    SympMatrix(a)
}

/// Membership in `Sp(2n,k)`, the symplectic matrices fixing `R^{n,k}` pointwise.
///
/// Returns `Err(Error::NotSymplectic)` when `m` fails `M^T J M = J` within `tol`,
/// `Ok(false)` for symplectic matrices outside the subgroup.
pub fn in_sp2nk(m: &SympMatrix, idx: CoisoIndex, tol: f64) -> Result<bool> {
    if m.0.nrows() != idx.dim() {
        return Err(Error::DimensionMismatch {
            expected: idx.dim(),
            got: m.0.nrows(),
        });
    }
    let residual = m.symplectic_residual();
    if residual > tol {
        return Err(Error::NotSymplectic { residual });
    }
    let (n, k) = (idx.n(), idx.k());
    let d = idx.dim();
    for r in 0..d {
        for c in 0..d {
            let free = r >= k && r < n && c >= n + k;
            let expected = if r == c { 1.0 } else { 0.0 };
            if !free && (m.0[(r, c)] - expected).abs() > tol {
                return Ok(false);
            }
        }
    }
    for j in k..n {
        for l in (j + 1)..n {
            if (m.0[(j, n + l)] - m.0[(l, n + j)]).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
