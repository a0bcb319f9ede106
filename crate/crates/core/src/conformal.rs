//! Deformation maps: reflections at spheres and hyperplanes, their
//! compositions (Möbius transformations), the mirrored inversion
//! `x ↦ (x₁, −x₂, x₃, …)/‖x‖²`, complex fractional-linear maps, and affine maps.
//!
//! Every map reports its analytic Jacobian. [`fd_jacobian`] provides an
//! independent central-difference oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{self, conformality_residual, DefGradient, Mat, Mat2, Vector};

/// Points closer than this to a sphere center (or the origin, for the
/// inversion) are rejected as singular.
pub const SINGULAR_GUARD: f64 = 1e-14;
/// Conformality tolerance for analytic Jacobians.
pub const DEFAULT_CONFORMAL_TOL: f64 = 1e-10;
/// Conformality tolerance for finite-difference Jacobians.
pub const FD_CONFORMAL_TOL: f64 = 1e-6;

/// A deformation `x ↦ φ(x)` of (a subset of) `ℝᴺ`.
pub trait Deformation<const N: usize>: Send + Sync {
    fn evaluate(&self, x: &Vector<N>) -> Result<Vector<N>>;

    /// Analytic Jacobian `∇φ(x)`; may have negative determinant.
    fn jacobian(&self, x: &Vector<N>) -> Result<Mat<N>>;

    /// The Jacobian as a deformation gradient (requires `det > 0`).
    fn gradient(&self, x: &Vector<N>) -> Result<DefGradient<N>> {
        to_def_gradient(self.jacobian(x)?)
    }
}

fn to_def_gradient<const N: usize>(j: Mat<N>) -> Result<DefGradient<N>> {
    let det = j.det();
    if det <= 0.0 {
        return Err(Error::NonOrientationPreserving { det });
    }
    DefGradient::new(j)
}

impl<const N: usize, T: Deformation<N> + ?Sized> Deformation<N> for Box<T> {
    fn evaluate(&self, x: &Vector<N>) -> Result<Vector<N>> {
        (**self).evaluate(x)
    }
    fn jacobian(&self, x: &Vector<N>) -> Result<Mat<N>> {
        (**self).jacobian(x)
    }
}

impl<const N: usize, T: Deformation<N> + ?Sized> Deformation<N> for &T {
    fn evaluate(&self, x: &Vector<N>) -> Result<Vector<N>> {
        (**self).evaluate(x)
    }
    fn jacobian(&self, x: &Vector<N>) -> Result<Mat<N>> {
        (**self).jacobian(x)
    }
}

fn sub<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> Vector<N> {
    std::array::from_fn(|i| a[i] - b[i])
}

/// Reflection at the sphere `‖x − x₀‖ = r`:
/// `s(x) = x₀ + r²/‖x − x₀‖² · (x − x₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereReflection<const N: usize> {
    center: Vector<N>,
    radius: f64,
}

impl<const N: usize> SphereReflection<N> {
    pub fn new(center: Vector<N>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn unit() -> Self {
        Self { center: [0.0; N], radius: 1.0 }
    }

    pub fn center(&self) -> &Vector<N> {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn offset(&self, x: &Vector<N>) -> Result<(Vector<N>, f64)> {
        let d = sub(x, &self.center);
        let dist2 = tensor::dot(&d, &d);
        if dist2.sqrt() < SINGULAR_GUARD {
            return Err(Error::SingularPoint { distance: dist2.sqrt() });
        }
        Ok((d, dist2))
    }
}

impl<const N: usize> Deformation<N> for SphereReflection<N> {
    fn evaluate(&self, x: &Vector<N>) -> Result<Vector<N>> {
        let (d, dist2) = self.offset(x)?;
        let s = self.radius * self.radius / dist2;
        Ok(std::array::from_fn(|i| self.center[i] + s * d[i]))
    }

    fn jacobian(&self, x: &Vector<N>) -> Result<Mat<N>> {
        // r²/‖d‖² (id − 2 d⊗d/‖d‖²)
        let (d, dist2) = self.offset(x)?;
        let s = self.radius * self.radius / dist2;
        Ok((Mat::identity() - Mat::outer(&d, &d) * (2.0 / dist2)) * s)
    }
}

/// Reflection at the hyperplane `⟨n, x⟩ = offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperplaneReflection<const N: usize> {
    normal: Vector<N>,
    offset: f64,
}

impl<const N: usize> HyperplaneReflection<N> {
    /// The normal is normalised; a zero normal is rejected.
    pub fn new(normal: Vector<N>, offset: f64) -> Result<Self> {
        let n = tensor::norm(&normal);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("hyperplane normal must be non-zero".into()));
        }
        Ok(Self { normal: normal.map(|v| v / n), offset })
    }

    pub fn normal(&self) -> &Vector<N> {
        &self.normal
    }
}

impl<const N: usize> Deformation<N> for HyperplaneReflection<N> {
    fn evaluate(&self, x: &Vector<N>) -> Result<Vector<N>> {
        let s = 2.0 * (tensor::dot(&self.normal, x) - self.offset);
        Ok(std::array::from_fn(|i| x[i] - s * self.normal[i]))
    }

    fn jacobian(&self, _x: &Vector<N>) -> Result<Mat<N>> {
        Ok(Mat::identity() - Mat::outer(&self.normal, &self.normal) * 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reflection<const N: usize> {
    Sphere(SphereReflection<N>),
    Hyperplane(HyperplaneReflection<N>),
}

impl<const N: usize> Deformation<N> for Reflection<N> {
    fn evaluate(&self, x: &Vector<N>) -> Result<Vector<N>> {
        match self {
            Reflection::Sphere(s) => s.evaluate(x),
            Reflection::Hyperplane(h) => h.evaluate(x),
        }
    }

    fn jacobian(&self, x: &Vector<N>) -> Result<Mat<N>> {
        match self {
            Reflection::Sphere(s) => s.jacobian(x),
            Reflection::Hyperplane(h) => h.jacobian(x),
        }
    }
}

impl<const N: usize> From<SphereReflection<N>> for Reflection<N> {
    fn from(s: SphereReflection<N>) -> Self {
        Reflection::Sphere(s)
    }
}

impl<const N: usize> From<HyperplaneReflection<N>> for Reflection<N> {
    fn from(h: HyperplaneReflection<N>) -> Self {
        Reflection::Hyperplane(h)
    }
}

/// A finite composition of reflections, applied in order (`steps[0]` first).
#[derive(Debug, Clone, PartialEq)]
pub struct MoebiusMap<const N: usize> {
    steps: Vec<Reflection<N>>,
}

impl<const N: usize> MoebiusMap<N> {
    pub fn new(steps: Vec<Reflection<N>>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[Reflection<N>] {
        &self.steps
    }

    /// Orientation preserving iff the number of reflections is even.
    pub fn is_orientation_preserving(&self) -> bool {
        self.steps.len().is_multiple_of(2)
    }

    /// Sign of `det ∇φ` at a probe point.
    pub fn orientation_at(&self, x: &Vector<N>) -> Result<f64> {
        Ok(self.jacobian(x)?.det().signum())
    }
}

impl<const N: usize> Deformation<N> for MoebiusMap<N> {
    fn evaluate(&self, x: &Vector<N>) -> Result<Vector<N>> {
        self.steps.iter().try_fold(*x, |y, s| s.evaluate(&y))
    }

    fn jacobian(&self, x: &Vector<N>) -> Result<Mat<N>> {
        let mut y = *x;
        let mut j = Mat::identity();
        for s in &self.steps {
            j = s.jacobian(&y)? * j;
            y = s.evaluate(&y)?;
        }
        Ok(j)
    }
}

/// `x ↦ (x₁, −x₂, x₃, …)/‖x‖²`: inversion in the unit sphere followed by the
/// mirror `x₂ ↦ −x₂`. Orientation preserving, with `det ∇φ = ‖x‖^{-2N}`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MirroredInversion<const N: usize>;

impl<const N: usize> MirroredInversion<N> {
    pub fn new() -> Self {
        Self
    }

    /// The same map assembled from two reflections, for cross-checking.
    pub fn as_reflections(&self) -> MoebiusMap<N> {
        let mut e2 = [0.0; N];
        e2[1] = 1.0;
        MoebiusMap::new(vec![
            SphereReflection::unit().into(),
            HyperplaneReflection::new(e2, 0.0).expect("unit normal").into(),
        ])
    }

    fn mirror(x: &Vector<N>) -> Vector<N> {
        let mut y = *x;
        y[1] = -y[1];
        y
    }

    fn radius2(x: &Vector<N>) -> Result<f64> {
        let r2 = tensor::dot(x, x);
        if r2.sqrt() < SINGULAR_GUARD {
            return Err(Error::SingularPoint { distance: r2.sqrt() });
        }
        Ok(r2)
    }
}

impl<const N: usize> Deformation<N> for MirroredInversion<N> {
    fn evaluate(&self, x: &Vector<N>) -> Result<Vector<N>> {
        let r2 = Self::radius2(x)?;
        Ok(Self::mirror(x).map(|v| v / r2))
    }

    fn jacobian(&self, x: &Vector<N>) -> Result<Mat<N>> {
        // (D‖x‖² − 2 (Dx)⊗x)/‖x‖⁴ with D = diag(1, −1, 1, …)
        let r2 = Self::radius2(x)?;
        let dx = Self::mirror(x);
        let r4 = r2 * r2;
        Ok(Mat::from_fn(|i, j| {
            let d = if i != j {
                0.0
            } else if i == 1 {
                -1.0
            } else {
                1.0
            };
            (d * r2 - 2.0 * dx[i] * x[j]) / r4
        }))
    }
}

/// `z ↦ (az + b)/(cz + d)` on `ℂ ≅ ℝ²`, with `ad − bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMoebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl ComplexMoebius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(Error::InvalidArgument("Möbius coefficients need ad - bc != 0".into()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self { a: one, b: zero, c: zero, d: one }
    }

    /// Parses eight comma-separated reals `ar,ai,br,bi,cr,ci,dr,di`.
    pub fn parse(spec: &str) -> Result<Self> {
        let v = parse_reals(spec)?;
        if v.len() != 8 {
            return Err(Error::InvalidArgument(format!(
                "Möbius map needs 8 reals (ar,ai,br,bi,cr,ci,dr,di), got {}",
                v.len()
            )));
        }
        let z = |k: usize| Complex64::new(v[2 * k], v[2 * k + 1]);
        Self::new(z(0), z(1), z(2), z(3))
    }

    fn denominator(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() < SINGULAR_GUARD {
            return Err(Error::SingularPoint { distance: den.norm() });
        }
        Ok(den)
    }

    /// Complex derivative `(ad − bc)/(cz + d)²`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = self.denominator(z)?;
        Ok((self.a * self.d - self.b * self.c) / (den * den))
    }
}

impl Deformation<2> for ComplexMoebius {
    fn evaluate(&self, x: &Vector<2>) -> Result<Vector<2>> {
        let z = Complex64::new(x[0], x[1]);
        let w = (self.a * z + self.b) / self.denominator(z)?;
        Ok([w.re, w.im])
    }

    fn jacobian(&self, x: &Vector<2>) -> Result<Mat<2>> {
        let f = self.derivative(Complex64::new(x[0], x[1]))?;
        Ok(Mat2::from_rows([[f.re, -f.im], [f.im, f.re]]))
    }
}

/// `x ↦ A x + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap<const N: usize> {
    pub linear: Mat<N>,
    pub shift: Vector<N>,
}

impl<const N: usize> AffineMap<N> {
    pub fn new(linear: Mat<N>, shift: Vector<N>) -> Self {
        Self { linear, shift }
    }

    pub fn identity() -> Self {
        Self::new(Mat::identity(), [0.0; N])
    }
}

impl<const N: usize> Deformation<N> for AffineMap<N> {
    fn evaluate(&self, x: &Vector<N>) -> Result<Vector<N>> {
        let y = self.linear.mul_vec(x);
        Ok(std::array::from_fn(|i| y[i] + self.shift[i]))
    }

    fn jacobian(&self, _x: &Vector<N>) -> Result<Mat<N>> {
        Ok(self.linear)
    }
}

/// `∇φ(x) = λ(x) R(x)` with `λ = det^{1/n}` and `R ∈ SO(n)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConformalDecomposition<const N: usize> {
    pub lambda: f64,
    pub rotation: Mat<N>,
    pub residual: f64,
}

pub fn decompose_conformal<const N: usize>(f: &DefGradient<N>, tol: f64) -> Result<ConformalDecomposition<N>> {
    let residual = conformality_residual(f.matrix());
    if !(residual <= tol) {
        return Err(Error::NotConformal { residual, tol });
    }
    let lambda = f.det().powf(1.0 / N as f64);
    Ok(ConformalDecomposition { lambda, rotation: *f.matrix() * (1.0 / lambda), residual })
}

/// Returns `(residual ≤ tol, residual)` for the analytic Jacobian at `x`.
pub fn is_conformal_at<const N: usize>(map: &impl Deformation<N>, x: &Vector<N>, tol: f64) -> Result<(bool, f64)> {
    let residual = conformality_residual(&map.jacobian(x)?);
    Ok((residual <= tol, residual))
}

/// Central-difference Jacobian: column `j` is `(φ(x + h eⱼ) − φ(x − h eⱼ))/(2h)`.
pub fn fd_jacobian<const N: usize>(map: &impl Deformation<N>, x: &Vector<N>, h: f64) -> Result<Mat<N>> {
    let mut cols = [[0.0; N]; N];
    for (j, col) in cols.iter_mut().enumerate() {
        let (mut xp, mut xm) = (*x, *x);
        xp[j] += h;
        xm[j] -= h;
        let (yp, ym) = (map.evaluate(&xp)?, map.evaluate(&xm)?);
        *col = std::array::from_fn(|i| (yp[i] - ym[i]) / (2.0 * h));
    }
    Ok(Mat::from_fn(|i, j| cols[j][i]))
}

/// [`fd_jacobian`] as a deformation gradient.
pub fn fd_gradient<const N: usize>(map: &impl Deformation<N>, x: &Vector<N>, h: f64) -> Result<DefGradient<N>> {
    to_def_gradient(fd_jacobian(map, x, h)?)
}

pub(crate) fn parse_reals(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("not a number: {t:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close<const N: usize>(a: &Vector<N>, b: &Vector<N>, tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn evaluate_examples() {
        let s = SphereReflection::<2>::unit();
        assert!(close(&s.evaluate(&[2.0, 0.0]).unwrap(), &[0.5, 0.0], 1e-15));
        let phi = MirroredInversion::<2>::new();
        assert!(close(&phi.evaluate(&[0.5, 0.0]).unwrap(), &[2.0, 0.0], 1e-15));
        assert!(close(&phi.evaluate(&[0.0, 0.5]).unwrap(), &[0.0, -2.0], 1e-15));
    }

    #[test]
    fn singular_points_are_rejected() {
        let s = SphereReflection::new([1.0, 1.0], 2.0).unwrap();
        assert!(matches!(s.evaluate(&[1.0, 1.0]), Err(Error::SingularPoint { .. })));
        assert!(matches!(
            MirroredInversion::<3>::new().jacobian(&[0.0; 3]),
            Err(Error::SingularPoint { .. })
        ));
        let m = ComplexMoebius::parse("1,0,0,0,1,0,-1,0").unwrap(); // z/(z-1)
        assert!(matches!(m.evaluate(&[1.0, 0.0]), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn gradient_examples() {
        let phi = MirroredInversion::<2>::new();
        let g = phi.gradient(&[1.0, 0.0]).unwrap();
        assert_eq!(*g.matrix(), Mat2::from_diag([-1.0, -1.0]));
        assert_eq!(g.det(), 1.0);
        let g = phi.gradient(&[0.0, 0.5]).unwrap();
        assert_eq!(*g.matrix(), Mat2::identity() * 4.0);
        assert!((g.det() - 16.0).abs() < 1e-12);
        let g = MirroredInversion::<3>::new().gradient(&[0.8, 0.0, 0.0]).unwrap();
        assert!((g.det() - 1.0 / 0.8f64.powi(6)).abs() < 1e-12);
        assert!((g.det() - 3.814697265625).abs() < 1e-9);
    }

    #[test]
    fn single_reflection_is_not_orientation_preserving() {
        let s = SphereReflection::<2>::unit();
        assert!(matches!(s.gradient(&[2.0, 0.3]), Err(Error::NonOrientationPreserving { .. })));
        let m = MoebiusMap::new(vec![s.into()]);
        assert!(!m.is_orientation_preserving());
        assert_eq!(m.orientation_at(&[2.0, 0.3]).unwrap(), -1.0);
    }

    #[test]
    fn decompose_examples() {
        let d = decompose_conformal(&DefGradient::new(Mat2::identity() * 4.0).unwrap(), 1e-10).unwrap();
        assert_eq!(d.lambda, 4.0);
        assert_eq!(d.rotation, Mat2::identity());
        let g = MirroredInversion::<2>::new().gradient(&[1.0, 0.0]).unwrap();
        let d = decompose_conformal(&g, 1e-10).unwrap();
        assert_eq!(d.lambda, 1.0);
        assert_eq!(d.rotation, -Mat2::identity());
        // FᵀF/det = diag(2, ½), residual = ‖diag(1, −½)‖ = √5/2
        let f = DefGradient::new(Mat2::from_diag([2.0, 1.0])).unwrap();
        match decompose_conformal(&f, 1e-10) {
            Err(Error::NotConformal { residual, .. }) => {
                assert!((residual - 5f64.sqrt() / 2.0).abs() < 1e-15)
            }
            other => panic!("expected NotConformal, got {other:?}"),
        }
    }

    #[test]
    fn conformality_examples() {
        let phi = MirroredInversion::<2>::new();
        for x in [[0.3, 0.4], [-1.0, 2.0], [0.01, -0.02]] {
            let (ok, res) = is_conformal_at(&phi, &x, DEFAULT_CONFORMAL_TOL).unwrap();
            assert!(ok && res <= 1e-12, "{x:?}: {res}");
        }
        let shear = AffineMap::new(Mat2::from_rows([[1.0, 1.0], [0.0, 1.0]]), [0.0; 2]);
        assert!(!is_conformal_at(&shear, &[0.2, 0.1], DEFAULT_CONFORMAL_TOL).unwrap().0);
        let phi3 = MirroredInversion::<3>::new();
        assert!(is_conformal_at(&phi3, &[0.8, 0.0, 0.0], DEFAULT_CONFORMAL_TOL).unwrap().0);
    }

    #[test]
    fn fd_gradient_examples() {
        let phi = MirroredInversion::<2>::new();
        let fd = fd_gradient(&phi, &[1.0, 0.0], 1e-5).unwrap();
        let an = phi.gradient(&[1.0, 0.0]).unwrap();
        assert!((*fd.matrix() - *an.matrix()).max_abs() < 1e-8);
        let id = AffineMap::<3>::identity();
        assert_eq!(*fd_gradient(&id, &[0.3, -0.2, 5.0], 0.5).unwrap().matrix(), Mat::identity());
        let m = ComplexMoebius::identity();
        let fd = fd_gradient(&m, &[0.7, -1.3], 1e-3).unwrap();
        assert!((*fd.matrix() - Mat2::identity()).max_abs() < 1e-12);
    }

    #[test]
    fn mirrored_inversion_matches_reflection_chain() {
        let phi = MirroredInversion::<3>::new();
        let chain = phi.as_reflections();
        assert!(chain.is_orientation_preserving());
        for x in [[0.8, 0.1, -0.3], [-2.0, 0.5, 1.0]] {
            assert!(close(&phi.evaluate(&x).unwrap(), &chain.evaluate(&x).unwrap(), 1e-14));
            let d = phi.jacobian(&x).unwrap() - chain.jacobian(&x).unwrap();
            assert!(d.max_abs() < 1e-13);
        }
    }

    #[test]
    fn complex_moebius_jacobian_is_cauchy_riemann() {
        let m = ComplexMoebius::parse("1,1,0.5,0,0.2,-1,2,0").unwrap();
        let x = [0.3, 0.9];
        let j = m.jacobian(&x).unwrap();
        let fd = fd_jacobian(&m, &x, 1e-6).unwrap();
        assert!((j - fd).max_abs() < 1e-7);
        assert!(conformality_residual(&j) < 1e-12);
        assert!(ComplexMoebius::parse("1,0,2,0").is_err());
        assert!(ComplexMoebius::parse("1,0,2,0,1,0,2,0").is_err()); // ad - bc = 0
    }

    #[test]
    fn hyperplane_normal_is_normalised() {
        let h = HyperplaneReflection::new([3.0, 4.0], 1.0).unwrap();
        assert!((tensor::norm(h.normal()) - 1.0).abs() < 1e-15);
        assert!(HyperplaneReflection::new([0.0, 0.0], 1.0).is_err());
        // the reflection of a point on the plane is itself
        let p = [0.6, 0.8];
        assert!(close(&h.evaluate(&p).unwrap(), &p, 1e-15));
    }
}
