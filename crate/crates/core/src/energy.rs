//! Hyperelastic energies with value, first derivative `D_F W`, the quadratic
//! form `D²W(F)[H, H]` and the induced Cauchy stress
//! `σ(F) = D_F W(F) · Fᵀ / det F`.
//!
//! The planar conformally invariant energies come in two representations:
//! through the distortion `K = ½‖F‖²/det F` ([`DistortionEnergy`]) and through
//! the linear distortion `λ_max/λ_min` ([`LinearDistortionEnergy`]).
//! [`IsochoricDirichlet`] is `‖F‖²/det(F)^{2/n} − n`, and [`CompositeEnergy`]
//! adds the piecewise volumetric term [`VolumetricTerm`].

use std::f64::consts::E;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{conformal_split_norms, DefGradient, Mat, Mat2};

/// Relative step for finite-difference first derivatives.
pub const FD_FIRST_STEP: f64 = 1e-5;
/// Relative step for finite-difference second forms.
pub const FD_SECOND_STEP: f64 = 1e-4;

/// Below this ratio of the anti-conformal to the conformal part of a planar
/// `F`, the singular values are treated as equal.
pub const PLANAR_CONFORMAL_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    pub first_derivative: Method,
    pub second_form: Method,
}

impl Capabilities {
    pub const ANALYTIC: Self = Self { first_derivative: Method::Analytic, second_form: Method::Analytic };
    pub const FINITE_DIFFERENCE: Self =
        Self { first_derivative: Method::FiniteDifference, second_form: Method::FiniteDifference };

    pub fn is_analytic(&self) -> bool {
        *self == Self::ANALYTIC
    }
}

/// An energy density `W : GL⁺(N) → ℝ`.
///
/// Only [`Energy::value`] is required; the derivative methods fall back to
/// central differences, and [`Energy::capabilities`] reports which path is
/// used.
pub trait Energy<const N: usize>: Send + Sync {
    fn name(&self) -> String;

    fn value(&self, f: &DefGradient<N>) -> Result<f64>;

    /// The matrix `P` with `D_F W(F)[H] = ⟨P, H⟩`.
    fn first_derivative(&self, f: &DefGradient<N>) -> Result<Mat<N>> {
        fd_first_derivative(self, f, FD_FIRST_STEP)
    }

    /// `D²W(F)[H, H]`.
    fn second_form(&self, f: &DefGradient<N>, h: &Mat<N>) -> Result<f64> {
        fd_second_form(self, f, h, FD_SECOND_STEP)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::FINITE_DIFFERENCE
    }

    fn cauchy_stress(&self, f: &DefGradient<N>) -> Result<Mat<N>> {
        let p = self.first_derivative(f)?;
        Ok(p * f.matrix().transpose() * (1.0 / f.det()))
    }
}

impl<const N: usize, T: Energy<N> + ?Sized> Energy<N> for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn value(&self, f: &DefGradient<N>) -> Result<f64> {
        (**self).value(f)
    }
    fn first_derivative(&self, f: &DefGradient<N>) -> Result<Mat<N>> {
        (**self).first_derivative(f)
    }
    fn second_form(&self, f: &DefGradient<N>, h: &Mat<N>) -> Result<f64> {
        (**self).second_form(f, h)
    }
    fn capabilities(&self) -> Capabilities {
        (**self).capabilities()
    }
    fn cauchy_stress(&self, f: &DefGradient<N>) -> Result<Mat<N>> {
        (**self).cauchy_stress(f)
    }
}

fn fd_scale<const N: usize>(f: &DefGradient<N>) -> f64 {
    f.matrix().norm().max(1.0)
}

/// Central differences, entry-wise step `h · max(1, ‖F‖)`.
pub fn fd_first_derivative<const N: usize, E: Energy<N> + ?Sized>(
    energy: &E,
    f: &DefGradient<N>,
    h: f64,
) -> Result<Mat<N>> {
    let step = h * fd_scale(f);
    let mut p = Mat::zeros();
    for i in 0..N {
        for j in 0..N {
            let mut plus = *f.matrix();
            let mut minus = *f.matrix();
            plus[(i, j)] += step;
            minus[(i, j)] -= step;
            let wp = energy.value(&DefGradient::new(plus)?)?;
            let wm = energy.value(&DefGradient::new(minus)?)?;
            p[(i, j)] = (wp - wm) / (2.0 * step);
        }
    }
    Ok(p)
}

/// Second central difference of `t ↦ W(F + tH)` at `t = 0`, with step
/// `h · max(1, ‖F‖)/‖H‖`.
pub fn fd_second_form<const N: usize, E: Energy<N> + ?Sized>(
    energy: &E,
    f: &DefGradient<N>,
    dir: &Mat<N>,
    h: f64,
) -> Result<f64> {
    let hn = dir.norm();
    if hn == 0.0 {
        return Ok(0.0);
    }
    let t = h * fd_scale(f) / hn;
    let wp = energy.value(&DefGradient::new(*f.matrix() + *dir * t)?)?;
    let w0 = energy.value(f)?;
    let wm = energy.value(&DefGradient::new(*f.matrix() - *dir * t)?)?;
    Ok((wp - 2.0 * w0 + wm) / (t * t))
}

/// `det F · [⟨F⁻ᵀ, H⟩² − ⟨F⁻ᵀHᵀF⁻ᵀ, H⟩]`, the second derivative of `det`.
pub fn det_second_form<const N: usize>(f: &DefGradient<N>, h: &Mat<N>) -> f64 {
    let g = f.matrix().inverse_transpose().expect("det > 0");
    let a = g.dot(h);
    f.det() * (a * a - (g * h.transpose() * g).dot(h))
}

/// A scalar function with two derivatives, used as `ψ` or `h` in the
/// representations `W = ψ(K)` and `W = h(λ_max/λ_min)`.
pub trait Profile: Send + Sync + fmt::Debug {
    fn value(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;
    fn second_derivative(&self, s: f64) -> f64;
}

/// `s ↦ s² − 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquareMinusOne;

impl Profile for SquareMinusOne {
    fn value(&self, s: f64) -> f64 {
        s * s - 1.0
    }
    fn derivative(&self, s: f64) -> f64 {
        2.0 * s
    }
    fn second_derivative(&self, _s: f64) -> f64 {
        2.0
    }
}

/// `s ↦ s − 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinusOne;

impl Profile for MinusOne {
    fn value(&self, s: f64) -> f64 {
        s - 1.0
    }
    fn derivative(&self, _s: f64) -> f64 {
        1.0
    }
    fn second_derivative(&self, _s: f64) -> f64 {
        0.0
    }
}

/// `s ↦ (s − 1)²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredExcess;

impl Profile for SquaredExcess {
    fn value(&self, s: f64) -> f64 {
        (s - 1.0) * (s - 1.0)
    }
    fn derivative(&self, s: f64) -> f64 {
        2.0 * (s - 1.0)
    }
    fn second_derivative(&self, _s: f64) -> f64 {
        2.0
    }
}

/// `k ↦ (k + √(k² − 1))² − 1`: the squared linear distortion minus one,
/// written as a function of the distortion `k`. Its derivative blows up
/// as `k → 1⁺`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredLinearDistortion;

impl Profile for SquaredLinearDistortion {
    fn value(&self, k: f64) -> f64 {
        let big = k + (k * k - 1.0).max(0.0).sqrt();
        big * big - 1.0
    }
    fn derivative(&self, k: f64) -> f64 {
        let s = (k * k - 1.0).max(0.0).sqrt();
        let big = k + s;
        2.0 * big * big / s
    }
    fn second_derivative(&self, k: f64) -> f64 {
        let s = (k * k - 1.0).max(0.0).sqrt();
        let big2 = (k + s) * (k + s);
        4.0 * big2 / (s * s) - 2.0 * big2 * k / (s * s * s)
    }
}

/// A profile given by closures for the value and both derivatives.
pub struct FnProfile<V, D1, D2> {
    pub value: V,
    pub derivative: D1,
    pub second_derivative: D2,
}

impl<V, D1, D2> fmt::Debug for FnProfile<V, D1, D2> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnProfile")
    }
}

impl<V, D1, D2> Profile for FnProfile<V, D1, D2>
where
    V: Fn(f64) -> f64 + Send + Sync,
    D1: Fn(f64) -> f64 + Send + Sync,
    D2: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, s: f64) -> f64 {
        (self.value)(s)
    }
    fn derivative(&self, s: f64) -> f64 {
        (self.derivative)(s)
    }
    fn second_derivative(&self, s: f64) -> f64 {
        (self.second_derivative)(s)
    }
}

/// Planar `W(F) = ψ(K(F))` with the distortion `K = ½‖F‖²/det F`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DistortionEnergy<P> {
    pub psi: P,
}

impl<P: Profile> DistortionEnergy<P> {
    pub fn new(psi: P) -> Self {
        Self { psi }
    }

    fn distortion(f: &DefGradient<2>) -> f64 {
        0.5 * f.matrix().norm_squared() / f.det()
    }

    fn checked(v: f64, what: &str, k: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NotDifferentiable(format!("{what} is not finite at K = {k}")))
        }
    }
}

impl<P: Profile> Energy<2> for DistortionEnergy<P> {
    fn name(&self) -> String {
        format!("psi(K) with psi = {:?}", self.psi)
    }

    fn value(&self, f: &DefGradient<2>) -> Result<f64> {
        Ok(self.psi.value(Self::distortion(f)))
    }

    fn first_derivative(&self, f: &DefGradient<2>) -> Result<Mat2> {
        // ψ'(K) · (2F − ‖F‖² F⁻ᵀ) / (2 det F)
        let k = Self::distortion(f);
        let dpsi = Self::checked(self.psi.derivative(k), "psi'", k)?;
        let fm = f.matrix();
        let g = fm.inverse_transpose().expect("det > 0");
        Ok((*fm * 2.0 - g * fm.norm_squared()) * (0.5 * dpsi / f.det()))
    }

    fn second_form(&self, f: &DefGradient<2>, h: &Mat2) -> Result<f64> {
        let k = Self::distortion(f);
        let dpsi = Self::checked(self.psi.derivative(k), "psi'", k)?;
        let ddpsi = Self::checked(self.psi.second_derivative(k), "psi''", k)?;
        let fm = f.matrix();
        let det = f.det();
        let g = fm.inverse_transpose().expect("det > 0");
        let nf2 = fm.norm_squared();
        let (gh, fh) = (g.dot(h), fm.dot(h));
        let lin = 2.0 * fh - nf2 * gh;
        let quad = -4.0 * gh * fh + 2.0 * h.norm_squared() + nf2 * gh * gh + nf2 * (g * h.transpose() * g).dot(h);
        Ok(0.25 * ddpsi * lin * lin / (det * det) + 0.5 * dpsi * quad / det)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::ANALYTIC
    }
}

/// Planar `W(F) = h(λ_max/λ_min)`.
///
/// Uses the split `F = C + A` into a scaled rotation `C` (norm parameter `p`)
/// and a scaled reflection `A` (parameter `q`), so that `λ_max = p + q`,
/// `λ_min = p − q`. On the conformal set (`q ≤ ε p`) the first derivative is
/// reported as zero, where the energy attains its minimum; the second form is
/// not defined there.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearDistortionEnergy<P> {
    pub h: P,
}

/// `W(F) = λ_max²/λ_min² − 1`.
pub type KlinSquaredMinusOne = LinearDistortionEnergy<SquareMinusOne>;

impl KlinSquaredMinusOne {
    pub fn klin_squared() -> Self {
        Self { h: SquareMinusOne }
    }
}

struct PlanarSplit {
    c: Mat2,
    a: Mat2,
    p: f64,
    q: f64,
}

impl PlanarSplit {
    fn of(m: &Mat2) -> Self {
        let [p, q] = conformal_split_norms(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let (a, b) = (0.5 * (m[(0, 0)] + m[(1, 1)]), 0.5 * (m[(1, 0)] - m[(0, 1)]));
        let (c, d) = (0.5 * (m[(0, 0)] - m[(1, 1)]), 0.5 * (m[(0, 1)] + m[(1, 0)]));
        Self {
            c: Mat2::from_rows([[a, -b], [b, a]]),
            a: Mat2::from_rows([[c, d], [d, -c]]),
            p,
            q,
        }
    }

    fn ratio(&self) -> f64 {
        (self.p + self.q) / (self.p - self.q)
    }

    fn on_conformal_set(&self) -> bool {
        self.q <= PLANAR_CONFORMAL_EPS * self.p
    }
}

impl<P: Profile> LinearDistortionEnergy<P> {
    pub fn new(h: P) -> Self {
        Self { h }
    }
}

impl<P: Profile> Energy<2> for LinearDistortionEnergy<P> {
    fn name(&self) -> String {
        format!("h(lambda_max/lambda_min) with h = {:?}", self.h)
    }

    fn value(&self, f: &DefGradient<2>) -> Result<f64> {
        Ok(self.h.value(PlanarSplit::of(f.matrix()).ratio()))
    }

    fn first_derivative(&self, f: &DefGradient<2>) -> Result<Mat2> {
        let s = PlanarSplit::of(f.matrix());
        if s.on_conformal_set() {
            return Ok(Mat2::zeros());
        }
        let (p, q) = (s.p, s.q);
        let r = p - q;
        let k_p = -2.0 * q / (r * r);
        let k_q = 2.0 * p / (r * r);
        let dh = self.h.derivative(s.ratio());
        Ok((s.c * (k_p / (2.0 * p)) + s.a * (k_q / (2.0 * q))) * dh)
    }

    fn second_form(&self, f: &DefGradient<2>, h: &Mat2) -> Result<f64> {
        let s = PlanarSplit::of(f.matrix());
        if s.on_conformal_set() {
            return Err(Error::NotDifferentiable(
                "h(lambda_max/lambda_min) has no second derivative on the conformal set".into(),
            ));
        }
        let (p, q) = (s.p, s.q);
        let r = p - q;
        let k_p = -2.0 * q / (r * r);
        let k_q = 2.0 * p / (r * r);
        let k_pp = 4.0 * q / (r * r * r);
        let k_qq = 4.0 * p / (r * r * r);
        let k_pq = -2.0 * (p + q) / (r * r * r);
        let hs = PlanarSplit::of(h);
        // p' = ⟨C, H⟩/(2p); p'' = (‖H_C‖²/2 − p'²)/p, and likewise for q.
        let dp = s.c.dot(h) / (2.0 * p);
        let dq = s.a.dot(h) / (2.0 * q);
        let ddp = (hs.p * hs.p - dp * dp) / p;
        let ddq = (hs.q * hs.q - dq * dq) / q;
        let dk = k_p * dp + k_q * dq;
        let ddk = k_pp * dp * dp + 2.0 * k_pq * dp * dq + k_qq * dq * dq + k_p * ddp + k_q * ddq;
        let ratio = s.ratio();
        Ok(self.h.second_derivative(ratio) * dk * dk + self.h.derivative(ratio) * ddk)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::ANALYTIC
    }
}

/// `W(F) = ‖F‖²/det(F)^{2/n} − n`, conformally invariant for `n = 2, 3`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IsochoricDirichlet<const N: usize>;

pub type Iso3DEnergy = IsochoricDirichlet<3>;

impl<const N: usize> Energy<N> for IsochoricDirichlet<N> {
    fn name(&self) -> String {
        format!("|F|^2/det(F)^(2/{N}) - {N}")
    }

    fn value(&self, f: &DefGradient<N>) -> Result<f64> {
        let n = N as f64;
        Ok(f.matrix().norm_squared() / f.det().powf(2.0 / n) - n)
    }

    fn first_derivative(&self, f: &DefGradient<N>) -> Result<Mat<N>> {
        let n = N as f64;
        let fm = f.matrix();
        let g = fm.inverse_transpose().expect("det > 0");
        Ok((*fm * 2.0 - g * (2.0 / n * fm.norm_squared())) * f.det().powf(-2.0 / n))
    }

    fn second_form(&self, f: &DefGradient<N>, h: &Mat<N>) -> Result<f64> {
        let n = N as f64;
        let fm = f.matrix();
        let g = fm.inverse_transpose().expect("det > 0");
        let nf2 = fm.norm_squared();
        let (gh, fh) = (g.dot(h), fm.dot(h));
        let bracket = 2.0 * h.norm_squared() - 8.0 / n * fh * gh
            + 4.0 / (n * n) * nf2 * gh * gh
            + 2.0 / n * nf2 * (g * h.transpose() * g).dot(h);
        Ok(bracket * f.det().powf(-2.0 / n))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::ANALYTIC
    }
}

/// `f''` is undefined at the splice points; there it is reported as the
/// pair of one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SecondDerivative {
    Value(f64),
    OneSided { left: f64, right: f64 },
}

impl SecondDerivative {
    pub fn value(&self) -> Option<f64> {
        match *self {
            SecondDerivative::Value(v) => Some(v),
            SecondDerivative::OneSided { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumetricValues {
    pub f: f64,
    pub df: f64,
    pub d2f: SecondDerivative,
}

/// Convex, `C¹` volumetric function
///
/// ```text
/// f(t) = ln²t                         t < e
///        1 + 2(t − e)/e               e ≤ t ≤ c
///        1 + (2/e)(e^{t−c} + c − e − 1)   t > c
/// ```
///
/// with constant slope `2/e` on `[e, c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumetricTerm {
    c: f64,
}

impl Default for VolumetricTerm {
    fn default() -> Self {
        Self { c: E + 2.0 }
    }
}

impl VolumetricTerm {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > E) || !c.is_finite() {
            return Err(Error::InvalidSplice { c });
        }
        Ok(Self { c })
    }

    pub fn splice(&self) -> f64 {
        self.c
    }

    /// The interval `[e, c]` on which `f' ≡ 2/e`.
    pub fn linear_band(&self) -> (f64, f64) {
        (E, self.c)
    }

    pub fn eval(&self, t: f64) -> Result<VolumetricValues> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveArgument(t));
        }
        let c = self.c;
        let slope = 2.0 / E;
        let left_of_e = |t: f64| 2.0 * (1.0 - t.ln()) / (t * t);
        let right_of_c = |t: f64| slope * (t - c).exp();
        Ok(if t < E {
            let l = t.ln();
            VolumetricValues { f: l * l, df: 2.0 * l / t, d2f: SecondDerivative::Value(left_of_e(t)) }
        } else if t <= c {
            let (left, right) = match t {
                t if t == E => (left_of_e(E), 0.0),
                t if t == c => (0.0, right_of_c(c)),
                _ => (0.0, 0.0),
            };
            let d2f = if left == right {
                SecondDerivative::Value(left)
            } else {
                SecondDerivative::OneSided { left, right }
            };
            VolumetricValues { f: 1.0 + slope * (t - E), df: slope, d2f }
        } else {
            VolumetricValues {
                f: 1.0 + slope * ((t - c).exp() + (c - E - 1.0)),
                df: right_of_c(t),
                d2f: SecondDerivative::Value(right_of_c(t)),
            }
        })
    }
}

/// `W(F) = W_iso(F) + f(det F)`. `W_iso` must be invariant under scaling of
/// `F`, so that `W_iso(F) = W_iso(F/det(F)^{1/n})`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompositeEnergy<I> {
    pub iso: I,
    pub vol: VolumetricTerm,
}

impl<I> CompositeEnergy<I> {
    pub fn new(iso: I, vol: VolumetricTerm) -> Self {
        Self { iso, vol }
    }
}

impl<const N: usize, I: Energy<N>> Energy<N> for CompositeEnergy<I> {
    fn name(&self) -> String {
        format!("{} + f(det F), c = {}", self.iso.name(), self.vol.c)
    }

    fn value(&self, f: &DefGradient<N>) -> Result<f64> {
        Ok(self.iso.value(f)? + self.vol.eval(f.det())?.f)
    }

    fn first_derivative(&self, f: &DefGradient<N>) -> Result<Mat<N>> {
        let v = self.vol.eval(f.det())?;
        Ok(self.iso.first_derivative(f)? + f.matrix().cofactor() * v.df)
    }

    fn second_form(&self, f: &DefGradient<N>, h: &Mat<N>) -> Result<f64> {
        let v = self.vol.eval(f.det())?;
        let d2f = v.d2f.value().ok_or_else(|| {
            Error::NotDifferentiable(format!("f'' is one-sided at det F = {}", f.det()))
        })?;
        let cof_h = f.matrix().cofactor().dot(h);
        Ok(self.iso.second_form(f, h)? + d2f * cof_h * cof_h + v.df * det_second_form(f, h))
    }

    fn capabilities(&self) -> Capabilities {
        self.iso.capabilities()
    }
}

/// Wraps an energy and forces finite differences for both derivatives.
#[derive(Debug, Clone, Copy, Default)]
pub struct FiniteDifference<E>(pub E);

impl<const N: usize, E: Energy<N>> Energy<N> for FiniteDifference<E> {
    fn name(&self) -> String {
        format!("{} [finite differences]", self.0.name())
    }

    fn value(&self, f: &DefGradient<N>) -> Result<f64> {
        self.0.value(f)
    }
}
