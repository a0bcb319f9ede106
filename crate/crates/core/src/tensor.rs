//! Fixed-size 2×2 / 3×3 matrix algebra and the scalar invariants used by the
//! energies: determinant, cofactor, singular values, distortion measures.
//!
//! Matrices are row-major `[[f64; N]; N]` wrapped in [`Mat`]. Only `N = 2`
//! and `N = 3` are supported; determinant and cofactor panic for other sizes.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

/// Determinants at or below this value are treated as non-positive.
pub const MIN_POSITIVE_DET: f64 = 1e-300;

/// Sweep cap for the one-sided Jacobi iteration used for 3×3 singular values.
const JACOBI_MAX_SWEEPS: usize = 50;
/// Relative off-diagonal threshold for the Jacobi iteration.
const JACOBI_TOL: f64 = 1e-14;

pub type Vector<const N: usize> = [f64; N];

#[derive(Clone, Copy, PartialEq)]
pub struct Mat<const N: usize> {
    m: [[f64; N]; N],
}

pub type Mat2 = Mat<2>;
pub type Mat3 = Mat<3>;

impl<const N: usize> Mat<N> {
    pub const fn from_rows(m: [[f64; N]; N]) -> Self {
        Self { m }
    }

    pub fn zeros() -> Self {
        Self { m: [[0.0; N]; N] }
    }

    pub fn identity() -> Self {
        Self::from_diag([1.0; N])
    }

    pub fn from_diag(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.m[i][i] = v;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    /// Builds a matrix from `N*N` row-major entries.
    pub fn from_row_slice(v: &[f64]) -> Result<Self> {
        if v.len() != N * N {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {N}x{N} matrix, got {}",
                N * N,
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Self::from_fn(|i, j| v[i * N + j]))
    }

    /// Outer product `a ⊗ b`, i.e. the matrix with entries `a_i b_j`.
    pub fn outer(a: &Vector<N>, b: &Vector<N>) -> Self {
        Self::from_fn(|i, j| a[i] * b[j])
    }

    pub fn rows(&self) -> &[[f64; N]; N] {
        &self.m
    }

    pub fn to_row_vec(&self) -> Vec<f64> {
        self.m.iter().flatten().copied().collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i])
    }

    pub fn trace(&self) -> f64 {
        (0..N).map(|i| self.m[i][i]).sum()
    }

    /// Frobenius inner product `⟨A, B⟩ = Σ A_ij B_ij`.
    pub fn dot(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_finite())
    }

    pub fn mul_vec(&self, v: &Vector<N>) -> Vector<N> {
        std::array::from_fn(|i| (0..N).map(|j| self.m[i][j] * v[j]).sum())
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        match N {
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            3 => {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            }
            _ => panic!("det is only implemented for 2x2 and 3x3 matrices"),
        }
    }

    /// Cofactor matrix, `Cof M = det(M) M^{-T}` whenever M is invertible.
    pub fn cofactor(&self) -> Self {
        let m = &self.m;
        match N {
            2 => Self::from_fn(|i, j| match (i, j) {
                (0, 0) => m[1][1],
                (0, 1) => -m[1][0],
                (1, 0) => -m[0][1],
                _ => m[0][0],
            }),
            3 => Self::from_fn(|i, j| {
                let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
                let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
                m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
            }),
            _ => panic!("cofactor is only implemented for 2x2 and 3x3 matrices"),
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(self.cofactor().transpose() * (1.0 / d))
    }

    /// Inverse transpose `M^{-T} = Cof M / det M`.
    pub fn inverse_transpose(&self) -> Option<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(self.cofactor() * (1.0 / d))
    }

    pub fn sym(&self) -> Self {
        (*self + self.transpose()) * 0.5
    }

    /// Trace-free part `X − tr(X)/n · id`.
    pub fn dev(&self) -> Self {
        *self - Self::identity() * (self.trace() / N as f64)
    }

    /// Singular values of an arbitrary matrix, sorted descending, zeros allowed.
    pub fn singular_values(&self) -> Vector<N> {
        let mut s = match N {
            2 => {
                let [p, q] = conformal_split_norms(self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]);
                let mut out = [0.0; N];
                out[0] = p + q;
                out[1] = (p - q).abs();
                out
            }
            _ => one_sided_jacobi(self),
        };
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values()[0]
    }
}

/// For a 2×2 matrix, split it as `p R(θ) + q S(φ)` (a scaled rotation plus a
/// scaled reflection) and return `[p, q]`. The singular values are `p + q`
/// and `|p − q|`; both are computed without cancellation.
pub(crate) fn conformal_split_norms(m00: f64, m01: f64, m10: f64, m11: f64) -> [f64; 2] {
    let a = 0.5 * (m00 + m11);
    let b = 0.5 * (m10 - m01);
    let c = 0.5 * (m00 - m11);
    let d = 0.5 * (m01 + m10);
    [a.hypot(b), c.hypot(d)]
}

/// Hestenes (one-sided) Jacobi: rotates the columns of `m` until they are
/// mutually orthogonal. Each rotation is a cyclic Jacobi step on `mᵀm`.
fn one_sided_jacobi<const N: usize>(m: &Mat<N>) -> Vector<N> {
    let mut a = m.m;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..N {
            for q in p + 1..N {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for row in &a {
                    alpha += row[p] * row[p];
                    beta += row[q] * row[q];
                    gamma += row[p] * row[q];
                }
                if gamma == 0.0 || gamma.abs() <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for row in a.iter_mut() {
                    let (ap, aq) = (row[p], row[q]);
                    row[p] = c * ap - s * aq;
                    row[q] = s * ap + c * aq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    std::array::from_fn(|j| a.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt())
}

impl<const N: usize> Default for Mat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for Mat<N> {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.m[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Mat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.m[i][j]
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] + rhs.m[i][j])
    }
}

impl<const N: usize> AddAssign for Mat<N> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] - rhs.m[i][j])
    }
}

impl<const N: usize> Neg for Mat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl<const N: usize> Mul<f64> for Mat<N> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::from_fn(|i, j| self.m[i][j] * s)
    }
}

impl<const N: usize> Mul<Mat<N>> for f64 {
    type Output = Mat<N>;
    fn mul(self, m: Mat<N>) -> Mat<N> {
        m * self
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.m[i][k] * rhs.m[k][j]).sum())
    }
}

impl<const N: usize> fmt::Debug for Mat<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.m.iter()).finish()
    }
}

impl<const N: usize> fmt::Display for Mat<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.m.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x:>12.6}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl<const N: usize> Serialize for Mat<N> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(N))?;
        for row in &self.m {
            seq.serialize_element(&row[..])?;
        }
        seq.end()
    }
}

/// Serializes a vector of any length as a sequence (for `serialize_with`).
pub fn serialize_vector<S: Serializer, const N: usize>(v: &Vector<N>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

pub fn dot<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm<const N: usize>(a: &Vector<N>) -> f64 {
    dot(a, a).sqrt()
}

/// A deformation gradient: an `N×N` matrix with positive determinant.
#[derive(Clone, Copy, PartialEq)]
pub struct DefGradient<const N: usize> {
    matrix: Mat<N>,
    det: f64,
}

impl<const N: usize> DefGradient<N> {
    pub fn new(matrix: Mat<N>) -> Result<Self> {
        let det = matrix.det();
        if !(det > MIN_POSITIVE_DET) || !matrix.is_finite() {
            return Err(Error::NotInGLPlus { det });
        }
        Ok(Self { matrix, det })
    }

    pub fn identity() -> Self {
        Self { matrix: Mat::identity(), det: 1.0 }
    }

    pub fn matrix(&self) -> &Mat<N> {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn singular_values(&self) -> SingularValues<N> {
        SingularValues { values: self.matrix.singular_values() }
    }

    /// Distortion `K = ‖F‖²/(n det F^{2/n})` (equal to `½‖F‖²/det F` in the
    /// plane), linear distortion `λ_max/λ_min` and the conformality residual.
    pub fn distortions(&self) -> DistortionReport {
        let n = N as f64;
        let sv = self.singular_values();
        DistortionReport {
            big_k: self.matrix.norm_squared() / (n * self.det.powf(2.0 / n)),
            lin_k: sv.max() / sv.min(),
            conformality_residual: conformality_residual(&self.matrix),
        }
    }
}

impl<const N: usize> TryFrom<Mat<N>> for DefGradient<N> {
    type Error = Error;
    fn try_from(m: Mat<N>) -> Result<Self> {
        Self::new(m)
    }
}

impl<const N: usize> fmt::Debug for DefGradient<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DefGradient({:?}, det={})", self.matrix, self.det)
    }
}

impl<const N: usize> Serialize for DefGradient<N> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(serializer)
    }
}

/// Singular values of a deformation gradient, sorted descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularValues<const N: usize> {
    pub values: Vector<N>,
}

impl<const N: usize> SingularValues<N> {
    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        self.values[N - 1]
    }

    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DistortionReport {
    pub big_k: f64,
    pub lin_k: f64,
    pub conformality_residual: f64,
}

/// `‖MᵀM / det(MᵀM)^{1/n} − id‖` (Frobenius). Zero exactly on positive
/// multiples of orthogonal matrices. Returns `+∞` for singular `M`.
pub fn conformality_residual<const N: usize>(m: &Mat<N>) -> f64 {
    let d = m.det().abs();
    if !(d > 0.0) || !d.is_finite() {
        return f64::INFINITY;
    }
    let c = m.transpose() * *m;
    (c * (1.0 / d.powf(2.0 / N as f64)) - Mat::identity()).norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymDevTrace<const N: usize> {
    pub sym: Mat<N>,
    pub dev_sym: Mat<N>,
    pub trace: f64,
}

pub fn sym_dev_tr<const N: usize>(m: &Mat<N>) -> SymDevTrace<N> {
    let sym = m.sym();
    SymDevTrace { sym, dev_sym: sym.dev(), trace: m.trace() }
}

/// Returns `(frobenius, operator)` norms.
pub fn frobenius_and_operator_norm<const N: usize>(m: &Mat<N>) -> (f64, f64) {
    (m.norm(), m.operator_norm())
}

pub fn rotation2(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat::from_rows([[c, -s], [s, c]])
}

/// Rotation from z-y-z Euler angles.
pub fn rotation3(alpha: f64, beta: f64, gamma: f64) -> Mat3 {
    let rz = |t: f64| {
        let (s, c) = t.sin_cos();
        Mat::from_rows([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    };
    let (s, c) = beta.sin_cos();
    let ry = Mat::from_rows([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]);
    rz(alpha) * ry * rz(gamma)
}
