//! Ellipticity of planar isotropic energies `W(F) = g(λ₁, λ₂)` through the
//! Knowles–Sternberg conditions, and the criterion on `h` for
//! `W(F) = h(λ_max/λ_min)`.

use hyperlab::convexity::{
    h_criterion, knowles_sternberg, ks_grid_scan, log_grid, DeterminantG, HGrid, HMode, SquaredExcessRatio,
    KS_MARGIN_FACTOR,
};

fn main() -> hyperlab::Result<()> {
    let g = SquaredExcessRatio::default();
    let r = knowles_sternberg(&g, 2.0, 1.0, KS_MARGIN_FACTOR)?;
    println!("(max/min - 1)^2 at (2, 1):");
    println!("  g11 = {}, g22 = {}", r.cond_i[0], r.cond_i[1]);
    println!("  (l1 g1 - l2 g2)/(l1 - l2) = {}", r.cond_ii.unwrap_or(f64::NAN));
    println!("  iv = {:.6}, v = {:.6}, strict = {}", r.cond_iv.unwrap_or(f64::NAN), r.cond_v, r.strict);

    let grid = log_grid(0.1, 10.0, 30);
    let reports = ks_grid_scan(&g, &grid)?;
    let min = reports.iter().map(|r| r.min_value()).fold(f64::INFINITY, f64::min);
    println!(
        "30x30 grid: {} strict of {}, smallest condition value {:.3e}",
        reports.iter().filter(|r| r.strict).count(),
        reports.len(),
        min
    );

    let det = ks_grid_scan(&DeterminantG, &grid)?;
    println!(
        "det F: elliptic everywhere = {}, strict anywhere = {}",
        det.iter().all(|r| r.elliptic),
        det.iter().any(|r| r.strict)
    );

    for (name, h) in [
        ("s^2 - 1", (|s: f64| s * s - 1.0) as fn(f64) -> f64),
        ("s - 1", |s| s - 1.0),
        ("1/s", |s| 1.0 / s),
    ] {
        println!("h(s) = {name}: {:?}", h_criterion(h, HMode::Strict, HGrid::default()).verdict);
    }
    Ok(())
}
