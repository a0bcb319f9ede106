//! In 2D the energy `K_lin² − 1` vanishes on conformal gradients, so any
//! conformal map is stress free, and the planar composite energy gives a
//! constant non-zero stress on the admissible annulus.

use std::f64::consts::E;

use hyperlab::conformal::MirroredInversion;
use hyperlab::energy::{CompositeEnergy, IsochoricDirichlet, KlinSquaredMinusOne, VolumetricTerm};
use hyperlab::field::{admissible_annulus, stress_field, AnnulusDomain, FieldConfig};

fn main() -> hyperlab::Result<()> {
    let phi = MirroredInversion::<2>;

    let wide = AnnulusDomain::new(2, 0.2, 3.0)?;
    let field = stress_field(&KlinSquaredMinusOne::klin_squared(), &phi, &wide, &FieldConfig::default())?;
    let max = field.samples.iter().map(|s| s.sigma.norm()).fold(0.0, f64::max);
    println!("K_lin^2 - 1 on 0.2 <= |x| <= 3: max |sigma| = {max:.3e}");

    let vol = VolumetricTerm::default();
    let composite = CompositeEnergy::new(IsochoricDirichlet::<2>, vol);
    let band = Some(vol.linear_band());
    let dom = admissible_annulus(2, vol.splice())?;
    let s = stress_field(&composite, &phi, &dom, &FieldConfig { admissible_band: band, ..Default::default() })?.summary;
    println!(
        "composite on admissible annulus: sigma = {:.10} id, deviation {:.2e}",
        s.mean_sigma[(0, 0)],
        s.max_deviation
    );
    println!("2/e = {:.10}", 2.0 / E);

    let widened = AnnulusDomain::new(2, 0.5, 0.95)?;
    let s = stress_field(&composite, &phi, &widened, &FieldConfig { admissible_band: band, ..Default::default() })?.summary;
    println!(
        "composite on 0.5 <= |x| <= 0.95: homogeneous = {}, deviation {:.3e}",
        s.homogeneous, s.max_deviation
    );
    Ok(())
}
