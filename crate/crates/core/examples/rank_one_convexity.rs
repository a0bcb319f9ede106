//! Legendre–Hadamard checks: the quadratic form along rank-one directions,
//! one-dimensional scans along rank-one segments, and a Monte-Carlo sweep.

use hyperlab::convexity::{check_convexity, lh_form, rank_one_line_scan, ConvexityConfig, RankOneDirection};
use hyperlab::energy::{fd_second_form, Iso3DEnergy, KlinSquaredMinusOne, FD_SECOND_STEP};
use hyperlab::tensor::{DefGradient, Mat2};

fn main() -> hyperlab::Result<()> {
    let w = Iso3DEnergy::default();
    let e11 = RankOneDirection::<3>::basis(0, 0);
    let id = DefGradient::identity();
    let fd = fd_second_form(&w, &id, &e11.matrix(), FD_SECOND_STEP)?;
    println!("D2W(id)[e1(x)e1]: analytic {:.12}, FD {fd:.12}", lh_form(&w, &id, &e11)?);

    let scan = rank_one_line_scan(&w, &id, &e11, 1.0, 101)?;
    println!("t -> W(id + t e1(x)e1): {:?}, min second difference {:.3e}", scan.class, scan.min_second_difference);

    let planar = KlinSquaredMinusOne::klin_squared();
    let f = DefGradient::new(Mat2::from_rows([[1.4, 0.3], [-0.2, 0.7]]))?;
    let d = RankOneDirection::new([0.6, -0.8], [0.3, 1.0])?;
    println!("K_lin^2 - 1 at F: LH form {:.6}", lh_form(&planar, &f, &d)?);

    let report = check_convexity(&w, &ConvexityConfig { samples: 10_000, ..Default::default() })?;
    println!(
        "Monte Carlo ({} samples): {:?}, smallest normalized form {:.6}",
        report.samples, report.verdict, report.min_lh_form
    );
    for wit in &report.witnesses {
        println!("  witness form {:.6} at F = {:?}", wit.lh_form, wit.f);
    }
    Ok(())
}
