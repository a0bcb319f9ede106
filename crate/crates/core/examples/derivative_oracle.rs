//! Compares analytic derivatives of every catalog energy with central
//! differences at random deformation gradients.

use hyperlab::catalog::{EnergyKind, DEFAULT_SPLICE};
use hyperlab::energy::{fd_first_derivative, fd_second_form, Energy, FD_FIRST_STEP, FD_SECOND_STEP};
use hyperlab::sampling::{random_def_gradient_in, random_matrix, rng};
use hyperlab::tensor::Mat;

fn worst<const N: usize>(w: &dyn Energy<N>, seed: u64) -> hyperlab::Result<(f64, f64)> {
    let mut r = rng(seed);
    let (mut p_err, mut h_err) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let f = random_def_gradient_in::<N>(&mut r, 0.5, 2.0);
        let h: Mat<N> = random_matrix(&mut r, 1.0);
        let (p, p_fd) = (w.first_derivative(&f)?, fd_first_derivative(w, &f, FD_FIRST_STEP)?);
        p_err = p_err.max((p - p_fd).norm() / p.norm().max(1.0));
        let (d2, d2_fd) = (w.second_form(&f, &h)?, fd_second_form(w, &f, &h, FD_SECOND_STEP)?);
        h_err = h_err.max((d2 - d2_fd).abs() / d2.abs().max(1.0));
    }
    Ok((p_err, h_err))
}

fn main() -> hyperlab::Result<()> {
    for kind in EnergyKind::ALL {
        let (p, h) = if kind.dim() == 2 {
            worst(&*kind.planar(DEFAULT_SPLICE, false)?, 11)?
        } else {
            worst(&*kind.spatial(DEFAULT_SPLICE, false)?, 11)?
        };
        println!("{kind:<12} first derivative {p:.2e}   second form {h:.2e}");
    }
    Ok(())
}
