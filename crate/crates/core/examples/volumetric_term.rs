//! The volumetric function `f`: `ln²t` below `e`, linear with slope `2/e` on
//! `[e, c]`, exponential above `c`.

use std::f64::consts::E;

use hyperlab::energy::VolumetricTerm;

fn main() -> hyperlab::Result<()> {
    let f = VolumetricTerm::new(E + 2.0)?;
    println!("{:>10} {:>14} {:>14} {:>24}", "t", "f", "f'", "f''");
    for t in [0.25, 0.5, 1.0, 2.0, E, 3.5, E + 2.0, 5.0, 6.0] {
        let v = f.eval(t)?;
        println!("{t:>10.5} {:>14.8} {:>14.8} {:>24}", v.f, v.df, format!("{:?}", v.d2f));
    }
    let (e, c) = f.linear_band();
    let eps = 1e-9;
    for p in [e, c] {
        let (l, r) = (f.eval(p - eps)?, f.eval(p + eps)?);
        println!("jump in f' across {p:.5}: {:.2e}", (r.df - l.df).abs());
    }
    Ok(())
}
