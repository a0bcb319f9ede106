//! Möbius transformations as compositions of reflections, complex fractional
//! linear maps in the plane, and the `λ·R` decomposition of their gradients.

use hyperlab::conformal::{
    decompose_conformal, is_conformal_at, ComplexMoebius, Deformation, HyperplaneReflection, MirroredInversion,
    MoebiusMap, SphereReflection, DEFAULT_CONFORMAL_TOL,
};

fn main() -> hyperlab::Result<()> {
    let phi = MirroredInversion::<3>;
    let x = [0.3, -0.5, 0.6];
    let f = phi.gradient(&x)?;
    let d = decompose_conformal(&f, DEFAULT_CONFORMAL_TOL)?;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    println!("phi3d at {x:?}: det = {:.12}, |x|^-6 = {:.12}", f.det(), r2.powi(-3));
    println!("scale {:.12} (|x|^-2 = {:.12}), residual {:.2e}", d.lambda, 1.0 / r2, d.residual);
    println!("rotation:\n{}", d.rotation);

    let composed = phi.as_reflections();
    println!("as two reflections: {:?} vs {:?}", composed.evaluate(&x)?, phi.evaluate(&x)?);

    let m = MoebiusMap::new(vec![
        SphereReflection::new([1.0, 0.0, 0.0], 2.0)?.into(),
        HyperplaneReflection::new([0.0, 0.0, 1.0], 0.5)?.into(),
        SphereReflection::new([0.0, 0.0, 0.0], 1.0)?.into(),
    ]);
    let y = [0.2, 0.7, -1.1];
    println!(
        "three reflections: orientation preserving = {}, conformal at y = {:?}",
        m.is_orientation_preserving(),
        is_conformal_at(&m, &y, DEFAULT_CONFORMAL_TOL)?
    );

    let c = ComplexMoebius::parse("2,1,0,1,1,0,3,-1")?;
    let z = [0.4, 0.9];
    println!("(az+b)/(cz+d) at {z:?}: {:?}, Jacobian\n{}", c.evaluate(&z)?, c.jacobian(&z)?);
    Ok(())
}
