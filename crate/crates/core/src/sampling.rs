//! Seeded random generation of deformation gradients, rotations and
//! rank-one directions.
//!
//! Every generator draws from a [`ChaCha8Rng`] seeded with `seed_from_u64`, so
//! a fixed seed yields the same sequence on every platform.
//!
//! Random `F` are built as `Q₁ · diag(λ) · Q₂` with each `λᵢ` log-uniform in
//! `[0.1, 10]` and rotations from uniform angles (one angle in 2D, z-y-z
//! Euler angles in 3D).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::{rotation2, rotation3, DefGradient, Mat, Vector};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const LOG_STRETCH_RANGE: (f64, f64) = (0.1, 10.0);

/// Copies a matrix of statically identical size; used to bridge the
/// dimension-specific constructors into generic code.
pub(crate) fn resize<const N: usize, const M: usize>(m: &Mat<M>) -> Mat<N> {
    assert_eq!(N, M, "dimension mismatch");
    Mat::from_fn(|i, j| m[(i, j)])
}

pub fn random_rotation<const N: usize>(rng: &mut impl Rng) -> Mat<N> {
    use std::f64::consts::PI;
    match N {
        2 => resize(&rotation2(rng.random_range(-PI..PI))),
        3 => resize(&rotation3(
            rng.random_range(-PI..PI),
            rng.random_range(0.0..PI),
            rng.random_range(-PI..PI),
        )),
        _ => panic!("rotations are only generated for n = 2, 3"),
    }
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

pub fn random_stretches<const N: usize>(rng: &mut impl Rng, lo: f64, hi: f64) -> Vector<N> {
    std::array::from_fn(|_| log_uniform(rng, lo, hi))
}

/// `Q₁ diag(λ) Q₂` with log-uniform stretches in `[lo, hi]`.
pub fn random_def_gradient_in<const N: usize>(rng: &mut impl Rng, lo: f64, hi: f64) -> DefGradient<N> {
    let q1 = random_rotation::<N>(rng);
    let q2 = random_rotation::<N>(rng);
    let d = Mat::from_diag(random_stretches::<N>(rng, lo, hi));
    DefGradient::new(q1 * d * q2).expect("product of rotations and positive stretches")
}

pub fn random_def_gradient<const N: usize>(rng: &mut impl Rng) -> DefGradient<N> {
    random_def_gradient_in(rng, LOG_STRETCH_RANGE.0, LOG_STRETCH_RANGE.1)
}

/// Uniform direction on the unit sphere, by rejection from the cube.
pub fn random_unit_vector<const N: usize>(rng: &mut impl Rng) -> Vector<N> {
    loop {
        let v: Vector<N> = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = crate::tensor::norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

/// Uniform matrix with entries in `[-scale, scale]`.
pub fn random_matrix<const N: usize>(rng: &mut impl Rng, scale: f64) -> Mat<N> {
    Mat::from_fn(|_, _| rng.random_range(-scale..scale))
}

/// A random element `a·id + b·J` of `CSO(2)` (written `[[a, b], [-b, a]]`).
pub fn random_cso2(rng: &mut impl Rng) -> (f64, f64) {
    loop {
        let a = rng.random_range(-5.0..5.0);
        let b = rng.random_range(-5.0..5.0);
        if a * a + b * b > 1e-6 {
            return (a, b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: DefGradient<3> = random_def_gradient(&mut rng(42));
        let b: DefGradient<3> = random_def_gradient(&mut rng(42));
        assert_eq!(a, b);
    }

    #[test]
    fn rotations_are_special_orthogonal() {
        let mut r = rng(1);
        for _ in 0..100 {
            let q = random_rotation::<3>(&mut r);
            assert!((q.transpose() * q - Mat::identity()).max_abs() < 1e-14);
            assert!((q.det() - 1.0).abs() < 1e-14);
        }
    }
}
