//! Displacements in the kernel of `W_lin = μ‖dev sym ∇u‖²`, and the quadratic
//! kernel displacement approximating `x ↦ (x₁, −x₂)/‖x‖²` near `(0.5, 0)`.

use hyperlab::conformal::{Deformation, MirroredInversion};
use hyperlab::linearized::{kernel_displacement, quadratic_approx_phi, sigma_lin, w_lin_2d, KernelDisplacement, QuadraticApprox};

fn main() -> hyperlab::Result<()> {
    let k = KernelDisplacement { beta: 1.5, gamma: -0.7, p_hat: 0.3, a_hat: 2.0, b_hat: [0.1, -0.4] };
    let (u, g) = kernel_displacement(&k, &[0.8, -1.3]);
    println!("u = {u:?}\ngrad u =\n{g}");
    println!("W_lin = {:e}, |sigma_lin| = {:e}", w_lin_2d(&g, 1.0), sigma_lin(&g, 1.0).norm());

    let q = quadratic_approx_phi();
    let x0 = QuadraticApprox::EXPANSION_POINT;
    println!("x + u(x) at {x0:?}: {:?}", q.kernel().evaluate(&x0)?);
    for x in [[0.55, 0.0], [0.6, 0.0], [0.5, 0.1], [0.45, -0.05]] {
        let (a, b) = (q.kernel().evaluate(&x)?, MirroredInversion::<2>.evaluate(&x)?);
        println!("  at {x:?}: approx {:.5?}, exact {:.5?}", a, b);
    }
    let v = q.validate(x0, 0.15, 30, 64)?;
    println!("disk of radius 0.15: max error {:.4} at {:.3?}, max W_lin {:e}", v.max_error, v.argmax, v.max_w_lin);
    Ok(())
}
