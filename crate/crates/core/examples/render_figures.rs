//! Writes grid renderings of the inversion and its quadratic approximation
//! around `(0.5, 0)` to the directory given as the first argument (default:
//! the system temp directory).

use std::path::PathBuf;

use hyperlab::conformal::MirroredInversion;
use hyperlab::field::{render_grid_svg, GridSpec};
use hyperlab::linearized::{quadratic_approx_phi, QuadraticApprox};

fn main() -> hyperlab::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let center = QuadraticApprox::EXPANSION_POINT;

    let inversion = render_grid_svg(&MirroredInversion::<2>, &GridSpec::new(center, 0.21))?;
    let approx = render_grid_svg(&quadratic_approx_phi().kernel(), &GridSpec::new(center, 0.15))?;
    for (name, svg) in [("inversion.svg", inversion), ("quadratic_approx.svg", approx)] {
        let path = dir.join(name);
        std::fs::write(&path, svg)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
