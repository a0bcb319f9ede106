//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use hyperlab::energy::Energy;
use hyperlab::tensor::{DefGradient, Mat};

/// Ridders' extrapolation of a step-dependent estimate `g(h)` whose error is
/// a series in `h²`. Returns the best estimate and its error estimate.
pub fn ridders(g: impl Fn(f64) -> f64, h0: f64) -> (f64, f64) {
    const CON: f64 = 1.4;
    const NTAB: usize = 12;
    let mut a = [[0.0; NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = g(h);
    let (mut best, mut err) = (a[0][0], f64::INFINITY);
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = g(h);
        let mut fac = CON * CON;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON * CON;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    (best, err)
}

/// Where an energy fails to be smooth: on the planar conformal set, and at
/// the listed values of `det F`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kinks<'a> {
    pub conformal_set: bool,
    pub det: &'a [f64],
}

/// Initial step for a segment `F + tH` with `‖H‖ = λ_min(F)`. It stays inside
/// `GL⁺` and keeps the stencil away from every kink.
pub fn initial_step<const N: usize>(f: &DefGradient<N>, h: &Mat<N>, kinks: Kinks) -> f64 {
    let mut step = 0.1;
    if N == 2 && kinks.conformal_set {
        let sv = f.singular_values();
        let gap = (sv.max() - sv.min()) / (sv.max() + sv.min());
        if gap > 0.0 {
            step = 0.1 * gap.min(1.0);
        }
    }
    // |det(F + tH) − det F| ≤ t‖Cof F‖‖H‖ (1 + t‖H‖/λ_min)^{N−1}
    let rate = f.matrix().cofactor().norm() * h.norm() * 2f64.powi(N as i32 - 1);
    for &k in kinks.det {
        step = step.min(0.25 * (f.det() - k).abs() / rate);
    }
    step
}

fn line<const N: usize, E: Energy<N> + ?Sized>(w: &E, f: &DefGradient<N>, h: &Mat<N>, t: f64) -> f64 {
    w.value(&DefGradient::new(*f.matrix() + *h * t).expect("segment stays in GL+")).expect("energy value")
}

fn scaled<const N: usize>(f: &DefGradient<N>, h: &Mat<N>) -> (f64, Mat<N>) {
    let scale = f.singular_values().min() / h.norm();
    (scale, *h * scale)
}

/// `d/dt W(F + tH)` at `t = 0` by extrapolated central differences.
pub fn directional_derivative<const N: usize, E: Energy<N> + ?Sized>(
    w: &E,
    f: &DefGradient<N>,
    h: &Mat<N>,
    kinks: Kinks,
) -> f64 {
    let (scale, hs) = scaled(f, h);
    let t0 = initial_step(f, &hs, kinks);
    ridders(|s| (line(w, f, &hs, s) - line(w, f, &hs, -s)) / (2.0 * s), t0).0 / scale
}

/// `d²/dt² W(F + tH)` at `t = 0` by extrapolated central differences.
pub fn second_directional_derivative<const N: usize, E: Energy<N> + ?Sized>(
    w: &E,
    f: &DefGradient<N>,
    h: &Mat<N>,
    kinks: Kinks,
) -> f64 {
    let (scale, hs) = scaled(f, h);
    let t0 = initial_step(f, &hs, kinks);
    let w0 = line(w, f, &hs, 0.0);
    let d2 = ridders(|s| (line(w, f, &hs, s) - 2.0 * w0 + line(w, f, &hs, -s)) / (s * s), t0).0;
    d2 / (scale * scale)
}

/// `D_F W` assembled from directional derivatives along `eᵢ ⊗ eⱼ`.
pub fn gradient<const N: usize, E: Energy<N> + ?Sized>(w: &E, f: &DefGradient<N>, kinks: Kinks) -> Mat<N> {
    Mat::from_fn(|i, j| {
        let mut e = Mat::zeros();
        e[(i, j)] = 1.0;
        directional_derivative(w, f, &e, kinks)
    })
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
