//! Linearized planar elasticity: `W_lin(∇u) = μ‖dev₂ sym ∇u‖²`, its stress,
//! the displacements in its kernel and a quadratic kernel displacement that
//! approximates the mirrored inversion near `(0.5, 0)`.

use serde::Serialize;

use crate::conformal::{Deformation, MirroredInversion};
use crate::error::Result;
use crate::tensor::{self, Mat, Mat2, Mat3, Vector};

pub fn w_lin_2d(grad_u: &Mat2, mu: f64) -> f64 {
    mu * grad_u.sym().dev().norm_squared()
}

pub fn sigma_lin(grad_u: &Mat2, mu: f64) -> Mat2 {
    grad_u.sym().dev() * (2.0 * mu)
}

/// Second derivative of the volumetric term at `t = 1`.
pub const VOLUMETRIC_F2_AT_ONE: f64 = 2.0;

/// `2‖dev₃ sym ∇u‖² + (f″(1)/2)(tr ∇u)²`, the linearization of the 3D
/// composite energy at the identity.
pub fn w_lin_3d_composite(grad_u: &Mat3) -> f64 {
    2.0 * grad_u.sym().dev().norm_squared() + 0.5 * VOLUMETRIC_F2_AT_ONE * grad_u.trace().powi(2)
}

/// `u(x) = ⟨w, x⟩x − ½‖x‖²w + (p̂ id + Â)x + b̂` with `w = (−γ, β)` and
/// `Â = [[0, −â], [â, 0]]`. Every such `u` has `dev sym ∇u = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct KernelDisplacement {
    pub beta: f64,
    pub gamma: f64,
    pub p_hat: f64,
    /// Lower-left entry of the skew matrix `Â`.
    pub a_hat: f64,
    pub b_hat: Vector<2>,
}

impl KernelDisplacement {
    /// Builds the displacement from `w` directly (`β = w₂`, `γ = −w₁`).
    pub fn from_w(w: Vector<2>, p_hat: f64, a_hat: f64, b_hat: Vector<2>) -> Self {
        Self { beta: w[1], gamma: -w[0], p_hat, a_hat, b_hat }
    }

    pub fn w(&self) -> Vector<2> {
        [-self.gamma, self.beta]
    }

    pub fn skew(&self) -> Mat2 {
        Mat2::from_rows([[0.0, -self.a_hat], [self.a_hat, 0.0]])
    }

    pub fn displacement(&self, x: &Vector<2>) -> Vector<2> {
        let w = self.w();
        let wx = tensor::dot(&w, x);
        let xx = tensor::dot(x, x);
        let lin = (Mat2::identity() * self.p_hat + self.skew()).mul_vec(x);
        std::array::from_fn(|i| wx * x[i] - 0.5 * xx * w[i] + lin[i] + self.b_hat[i])
    }

    /// `⟨w, x⟩ id + x⊗w − w⊗x + p̂ id + Â`.
    pub fn grad(&self, x: &Vector<2>) -> Mat2 {
        let w = self.w();
        // the skew part is formed first so that sym ∇u is exactly a multiple of id
        let skew = Mat::outer(x, &w) - Mat::outer(&w, x) + self.skew();
        skew + Mat2::identity() * (tensor::dot(&w, x) + self.p_hat)
    }
}

pub fn kernel_displacement(k: &KernelDisplacement, x: &Vector<2>) -> (Vector<2>, Mat2) {
    (k.displacement(x), k.grad(x))
}

/// `x ↦ x + u(x)` for a kernel displacement `u`.
impl Deformation<2> for KernelDisplacement {
    fn evaluate(&self, x: &Vector<2>) -> Result<Vector<2>> {
        let u = self.displacement(x);
        Ok([x[0] + u[0], x[1] + u[1]])
    }

    fn jacobian(&self, x: &Vector<2>) -> Result<Mat2> {
        Ok(Mat2::identity() + self.grad(x))
    }
}

/// The kernel displacement with `w = (16, 0)`, `p̂ = −13`, `b̂ = (6, 0)`; `x + u(x)`
/// agrees with the mirrored inversion at `(0.5, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticApprox {
    pub w: Vector<2>,
    pub p: f64,
    pub b: Vector<2>,
}

impl Default for QuadraticApprox {
    fn default() -> Self {
        Self { w: [16.0, 0.0], p: -13.0, b: [6.0, 0.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxValidation {
    pub center: Vector<2>,
    pub radius: f64,
    pub n_samples: usize,
    pub error_at_center: f64,
    pub max_error: f64,
    pub argmax: Vector<2>,
    pub max_w_lin: f64,
}

impl QuadraticApprox {
    pub const EXPANSION_POINT: Vector<2> = [0.5, 0.0];

    pub fn kernel(&self) -> KernelDisplacement {
        KernelDisplacement::from_w(self.w, self.p, 0.0, self.b)
    }

    /// Samples a polar grid on the disk of radius `radius` around `center`
    /// and compares `x + u(x)` against the mirrored inversion.
    pub fn validate(&self, center: Vector<2>, radius: f64, rings: usize, per_ring: usize) -> Result<ApproxValidation> {
        let k = self.kernel();
        let phi = MirroredInversion::<2>;
        let err = |x: &Vector<2>| -> Result<f64> {
            let (a, b) = (k.evaluate(x)?, phi.evaluate(x)?);
            Ok(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
        };
        let error_at_center = err(&center)?;
        let (mut max_error, mut argmax, mut max_w_lin) = (error_at_center, center, 0.0f64);
        let mut n_samples = 1;
        for i in 1..=rings {
            let r = radius * i as f64 / rings as f64;
            for j in 0..per_ring {
                let t = std::f64::consts::TAU * j as f64 / per_ring as f64;
                let x = [center[0] + r * t.cos(), center[1] + r * t.sin()];
                let e = err(&x)?;
                if e > max_error {
                    max_error = e;
                    argmax = x;
                }
                max_w_lin = max_w_lin.max(w_lin_2d(&k.grad(&x), 1.0));
                n_samples += 1;
            }
        }
        Ok(ApproxValidation { center, radius, n_samples, error_at_center, max_error, argmax, max_w_lin })
    }
}

pub fn quadratic_approx_phi() -> QuadraticApprox {
    QuadraticApprox::default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::fd_jacobian;
    use crate::energy::{DistortionEnergy, Energy, MinusOne};
    use crate::sampling;
    use crate::tensor::DefGradient;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn w_lin_examples() {
        assert_eq!(w_lin_2d(&(Mat2::identity() * 3.7), 2.0), 0.0);
        assert_eq!(w_lin_2d(&Mat2::from_rows([[0.0, 1.2], [-1.2, 0.0]]), 2.0), 0.0);
        assert_eq!(w_lin_2d(&Mat2::from_diag([1.0, -1.0]), 1.0), 2.0);
        assert_eq!(sigma_lin(&Mat2::from_diag([1.0, -1.0]), 1.0), Mat2::from_diag([2.0, -2.0]));
        assert_eq!(sigma_lin(&Mat2::identity(), 1.0), Mat2::zeros());
    }

    #[test]
    fn w_lin_3d_examples() {
        assert_eq!(w_lin_3d_composite(&Mat3::zeros()), 0.0);
        assert!((w_lin_3d_composite(&Mat3::identity()) - 9.0).abs() < 1e-15);
        assert!((w_lin_3d_composite(&Mat3::from_diag([1.0, -1.0, 0.0])) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_examples() {
        let (u, g) = kernel_displacement(&KernelDisplacement::default(), &[0.3, -1.1]);
        assert_eq!(u, [0.0, 0.0]);
        assert_eq!(g, Mat2::zeros());
        let k = KernelDisplacement { p_hat: 1.0, ..Default::default() };
        let (u, g) = kernel_displacement(&k, &[0.3, -1.1]);
        assert_eq!(u, [0.3, -1.1]);
        assert_eq!(g, Mat2::identity());
    }

    #[test]
    fn quadratic_approx_matches_at_expansion_point() {
        let q = quadratic_approx_phi();
        let k = q.kernel();
        assert_eq!(k.displacement(&QuadraticApprox::EXPANSION_POINT), [1.5, 0.0]);
        assert_eq!(k.evaluate(&QuadraticApprox::EXPANSION_POINT).unwrap(), [2.0, 0.0]);
        let v = q.validate(QuadraticApprox::EXPANSION_POINT, 0.15, 15, 48).unwrap();
        assert_eq!(v.error_at_center, 0.0);
        assert!(v.max_w_lin < 1e-20);
        // along the axis: u₁ + x = 8x² − 12x + 6 against 1/x
        let x = 0.6;
        let e = (k.evaluate(&[x, 0.0]).unwrap()[0] - 1.0 / x).abs();
        assert!((e - (8.0 * x * x - 12.0 * x + 6.0 - 1.0 / x)).abs() < 1e-14);
        assert!(e <= 0.07);
    }

    #[test]
    fn w_lin_is_half_the_second_form_at_identity() {
        let w = DistortionEnergy::new(MinusOne);
        let mut rng = sampling::rng(3);
        for _ in 0..100 {
            let h = sampling::random_matrix::<2>(&mut rng, 2.0);
            let d2 = w.second_form(&DefGradient::identity(), &h).unwrap();
            assert!((w_lin_2d(&h, 1.0) - 0.5 * d2).abs() < 1e-8 * (1.0 + d2.abs()));
        }
    }

    proptest! {
        #[test]
        fn kernel_has_zero_linear_stress(
            beta in -50.0..50.0f64, gamma in -50.0..50.0f64, p in -50.0..50.0f64,
            a in -50.0..50.0f64, b0 in -5.0..5.0f64, b1 in -5.0..5.0f64,
            x0 in -3.0..3.0f64, x1 in -3.0..3.0f64,
        ) {
            let k = KernelDisplacement { beta, gamma, p_hat: p, a_hat: a, b_hat: [b0, b1] };
            let g = k.grad(&[x0, x1]);
            prop_assert!(g.sym().dev().norm() <= 1e-12);
            prop_assert_eq!(sigma_lin(&g, 1.3), Mat2::zeros());
            let fd = fd_jacobian(&k, &[x0, x1], 1e-5).unwrap() - Mat2::identity();
            prop_assert!((fd - g).max_abs() <= 1e-6 * (1.0 + g.max_abs()));
        }

        #[test]
        fn rank_one_w_lin(seed in any::<u64>(), mu in 0.1..10.0f64) {
            let mut rng = sampling::rng(seed);
            let xi: Vector<2> = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
            let eta: Vector<2> = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
            let lhs = 2.0 * w_lin_2d(&Mat::outer(&xi, &eta), mu);
            let rhs = mu * tensor::dot(&xi, &xi) * tensor::dot(&eta, &eta);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }
}
