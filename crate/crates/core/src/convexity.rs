//! Rank-one convexity checks: the Legendre–Hadamard form `D²W(F)[ξ⊗η, ξ⊗η]`,
//! 1D scans along rank-one segments, the Knowles–Sternberg conditions for
//! planar energies `W(F) = g(λ₁, λ₂)`, the convexity/monotonicity criterion on
//! `h` for `W(F) = h(λ_max/λ_min)`, and a sampled semi-strict convexity test.

use rand::Rng;
use serde::Serialize;

use crate::energy::{Capabilities, Energy, Method, Profile};
use crate::error::{Error, Result};
use crate::sampling::{self, random_def_gradient_in, random_unit_vector};
use crate::tensor::{self, DefGradient, Mat, Vector};

/// Relative margin used to call a Knowles–Sternberg condition strict.
pub const KS_MARGIN_FACTOR: f64 = 1e-10;
/// Relative FD step for `g` derivatives.
pub const KS_FD_STEP: f64 = 1e-5;
/// Band around `λ₁ = λ₂` (relative to `λ₁ + λ₂`) inside which condition iii)
/// replaces ii) and iv).
pub const KS_DIAGONAL_BAND: f64 = 1e-6;
/// Margin on sampled second differences, relative to `1 + max|f|`.
pub const SAMPLED_MARGIN: f64 = 1e-10;
/// Margin band on the normalised Legendre–Hadamard form for analytic energies.
pub const LH_MARGIN_ANALYTIC: f64 = 1e-10;
/// Margin band on the normalised Legendre–Hadamard form for FD energies.
pub const LH_MARGIN_FD: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOneDirection<const N: usize> {
    pub xi: Vector<N>,
    pub eta: Vector<N>,
}

impl<const N: usize> RankOneDirection<N> {
    pub fn new(xi: Vector<N>, eta: Vector<N>) -> Result<Self> {
        if !(tensor::norm(&xi) > 0.0) || !(tensor::norm(&eta) > 0.0) {
            return Err(Error::InvalidArgument("rank-one direction needs non-zero xi and eta".into()));
        }
        Ok(Self { xi, eta })
    }

    /// `e_i ⊗ e_j`.
    pub fn basis(i: usize, j: usize) -> Self {
        let (mut xi, mut eta) = ([0.0; N], [0.0; N]);
        xi[i] = 1.0;
        eta[j] = 1.0;
        Self { xi, eta }
    }

    pub fn matrix(&self) -> Mat<N> {
        Mat::outer(&self.xi, &self.eta)
    }

    pub fn norm_product_squared(&self) -> f64 {
        tensor::dot(&self.xi, &self.xi) * tensor::dot(&self.eta, &self.eta)
    }
}

/// `D²W(F)[ξ⊗η, ξ⊗η] / (‖ξ‖²‖η‖²)`.
pub fn lh_form<const N: usize, E: Energy<N> + ?Sized>(
    energy: &E,
    f: &DefGradient<N>,
    d: &RankOneDirection<N>,
) -> Result<f64> {
    Ok(energy.second_form(f, &d.matrix())? / d.norm_product_squared())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineClass {
    StrictlyConvex,
    Convex,
    Nonconvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineScan {
    pub class: LineClass,
    pub min_second_difference: f64,
    /// Threshold the second differences were compared against.
    pub margin: f64,
}

/// Samples `t ↦ W(F + t ξ⊗η)` at `n_samples` uniform points of `[0, t_max]`
/// and classifies by the smallest centred second difference.
pub fn rank_one_line_scan<const N: usize, E: Energy<N> + ?Sized>(
    energy: &E,
    f: &DefGradient<N>,
    d: &RankOneDirection<N>,
    t_max: f64,
    n_samples: usize,
) -> Result<LineScan> {
    if n_samples < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n_samples });
    }
    let dir = d.matrix();
    let values = (0..n_samples)
        .map(|i| {
            let t = t_max * i as f64 / (n_samples - 1) as f64;
            let g = DefGradient::new(*f.matrix() + dir * t).map_err(|_| Error::LeavesGLPlus { t })?;
            energy.value(&g)
        })
        .collect::<Result<Vec<_>>>()?;
    let margin = SAMPLED_MARGIN * (1.0 + max_abs(&values));
    let min = second_differences(&values).fold(f64::INFINITY, f64::min);
    let class = if min > margin {
        LineClass::StrictlyConvex
    } else if min >= -margin {
        LineClass::Convex
    } else {
        LineClass::Nonconvex
    };
    Ok(LineScan { class, min_second_difference: min, margin })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn second_differences(v: &[f64]) -> impl Iterator<Item = f64> + '_ {
    v.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2])
}

/// Partial derivatives of `g(λ₁, λ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvDerivatives {
    pub g1: f64,
    pub g2: f64,
    pub g11: f64,
    pub g22: f64,
    pub g12: f64,
}

impl SvDerivatives {
    fn swapped(self) -> Self {
        Self { g1: self.g2, g2: self.g1, g11: self.g22, g22: self.g11, g12: self.g12 }
    }
}

/// A symmetric function of the two singular values of a planar `F`.
pub trait SingularValueFunction: Send + Sync {
    fn value(&self, l1: f64, l2: f64) -> f64;

    /// Analytic derivatives, if available.
    fn derivatives(&self, _l1: f64, _l2: f64) -> Option<SvDerivatives> {
        None
    }
}

/// Derivatives of `g`, analytic when provided, else central differences
/// with step `KS_FD_STEP · λᵢ`.
pub fn sv_derivatives(g: &(impl SingularValueFunction + ?Sized), l1: f64, l2: f64) -> (SvDerivatives, Method) {
    if let Some(d) = g.derivatives(l1, l2) {
        return (d, Method::Analytic);
    }
    let (h1, h2) = (KS_FD_STEP * l1, KS_FD_STEP * l2);
    let g0 = g.value(l1, l2);
    let (gp1, gm1) = (g.value(l1 + h1, l2), g.value(l1 - h1, l2));
    let (gp2, gm2) = (g.value(l1, l2 + h2), g.value(l1, l2 - h2));
    let g12 = (g.value(l1 + h1, l2 + h2) - g.value(l1 + h1, l2 - h2) - g.value(l1 - h1, l2 + h2)
        + g.value(l1 - h1, l2 - h2))
        / (4.0 * h1 * h2);
    let d = SvDerivatives {
        g1: (gp1 - gm1) / (2.0 * h1),
        g2: (gp2 - gm2) / (2.0 * h2),
        g11: (gp1 - 2.0 * g0 + gm1) / (h1 * h1),
        g22: (gp2 - 2.0 * g0 + gm2) / (h2 * h2),
        g12,
    };
    (d, Method::FiniteDifference)
}

/// `g(λ₁, λ₂) = h(max/min)` with analytic derivatives (evaluated on the
/// branch `λ₁ ≥ λ₂` and mirrored).
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearDistortionG<P> {
    pub h: P,
}

/// `(max/min − 1)²`.
pub type SquaredExcessRatio = LinearDistortionG<crate::energy::SquaredExcess>;

impl<P: Profile> LinearDistortionG<P> {
    pub fn new(h: P) -> Self {
        Self { h }
    }

    fn ordered(&self, l1: f64, l2: f64) -> SvDerivatives {
        // r = λ₁/λ₂ with λ₁ ≥ λ₂
        let r = l1 / l2;
        let (h1, h2) = (self.h.derivative(r), self.h.second_derivative(r));
        let r1 = 1.0 / l2;
        let r2 = -l1 / (l2 * l2);
        let r12 = -1.0 / (l2 * l2);
        let r22 = 2.0 * l1 / (l2 * l2 * l2);
        SvDerivatives {
            g1: h1 * r1,
            g2: h1 * r2,
            g11: h2 * r1 * r1,
            g22: h2 * r2 * r2 + h1 * r22,
            g12: h2 * r1 * r2 + h1 * r12,
        }
    }
}

impl<P: Profile> SingularValueFunction for LinearDistortionG<P> {
    fn value(&self, l1: f64, l2: f64) -> f64 {
        self.h.value(l1.max(l2) / l1.min(l2))
    }

    fn derivatives(&self, l1: f64, l2: f64) -> Option<SvDerivatives> {
        Some(if l1 >= l2 { self.ordered(l1, l2) } else { self.ordered(l2, l1).swapped() })
    }
}

/// `g(λ₁, λ₂) = λ₁λ₂ = det F`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeterminantG;

impl SingularValueFunction for DeterminantG {
    fn value(&self, l1: f64, l2: f64) -> f64 {
        l1 * l2
    }

    fn derivatives(&self, l1: f64, l2: f64) -> Option<SvDerivatives> {
        Some(SvDerivatives { g1: l2, g2: l1, g11: 0.0, g22: 0.0, g12: 1.0 })
    }
}

/// A `g` given by a closure; derivatives by finite differences.
pub struct FnSvFunction<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Send + Sync> SingularValueFunction for FnSvFunction<F> {
    fn value(&self, l1: f64, l2: f64) -> f64 {
        (self.0)(l1, l2)
    }
}

/// Left-hand sides of the Knowles–Sternberg conditions at `(λ₁, λ₂)`.
/// Conditions ii) and iv) apply off the diagonal, iii) on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub cond_i: [f64; 2],
    pub cond_ii: Option<f64>,
    pub cond_iii: Option<[f64; 2]>,
    pub cond_iv: Option<f64>,
    pub cond_v: f64,
    pub margin: f64,
    pub method: Method,
    /// All applicable conditions `≥ −margin`.
    pub elliptic: bool,
    /// All applicable conditions `> margin`.
    pub strict: bool,
}

impl KsReport {
    pub fn applicable_values(&self) -> Vec<f64> {
        let mut v = self.cond_i.to_vec();
        v.extend(self.cond_ii);
        v.extend(self.cond_iii.into_iter().flatten());
        v.extend(self.cond_iv);
        v.push(self.cond_v);
        v
    }

    pub fn min_value(&self) -> f64 {
        self.applicable_values().into_iter().fold(f64::INFINITY, f64::min)
    }
}

pub fn knowles_sternberg(
    g: &(impl SingularValueFunction + ?Sized),
    l1: f64,
    l2: f64,
    margin_factor: f64,
) -> Result<KsReport> {
    if !(l1 > 0.0) || !(l2 > 0.0) {
        return Err(Error::NonPositiveArgument(l1.min(l2)));
    }
    let (d, method) = sv_derivatives(g, l1, l2);
    let radicand = d.g11 * d.g22;
    if radicand < 0.0 {
        return Err(Error::NegativeRadicand(radicand));
    }
    let root = radicand.sqrt();
    let off_diagonal = (l1 - l2).abs() > KS_DIAGONAL_BAND * (l1 + l2);
    let (cond_ii, cond_iii, cond_iv) = if off_diagonal {
        (
            Some((l1 * d.g1 - l2 * d.g2) / (l1 - l2)),
            None,
            Some(root + d.g12 + (d.g1 - d.g2) / (l1 - l2)),
        )
    } else {
        (None, Some([d.g11 - d.g12 + d.g1 / l1, d.g22 - d.g12 + d.g2 / l2]), None)
    };
    let cond_v = root - d.g12 + (d.g1 + d.g2) / (l1 + l2);
    let margin = margin_factor * (1.0 + g.value(l1, l2).abs() + d.g1.abs() + d.g2.abs());
    let mut report = KsReport {
        lambda1: l1,
        lambda2: l2,
        cond_i: [d.g11, d.g22],
        cond_ii,
        cond_iii,
        cond_iv,
        cond_v,
        margin,
        method,
        elliptic: false,
        strict: false,
    };
    let values = report.applicable_values();
    report.elliptic = values.iter().all(|&v| v >= -margin);
    report.strict = values.iter().all(|&v| v > margin);
    Ok(report)
}

/// Runs [`knowles_sternberg`] on every pair of the given grid.
pub fn ks_grid_scan(g: &(impl SingularValueFunction + ?Sized), grid: &[f64]) -> Result<Vec<KsReport>> {
    let mut out = Vec::with_capacity(grid.len() * grid.len());
    for &l1 in grid {
        for &l2 in grid {
            out.push(knowles_sternberg(g, l1, l2, KS_MARGIN_FACTOR)?);
        }
    }
    Ok(out)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HMode {
    /// Convex and non-decreasing on `[1, ∞)`.
    Convex,
    /// Strictly convex and increasing on `[1, ∞)`.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HVerdict {
    StrictlyRankOneConvex,
    RankOneConvex,
    NotRankOneConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HCriterion {
    pub convex: bool,
    pub non_decreasing: bool,
    pub strictly_convex: bool,
    pub increasing: bool,
    pub verdict: HVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HGrid {
    pub s_max: f64,
    pub points: usize,
}

impl Default for HGrid {
    fn default() -> Self {
        Self { s_max: 50.0, points: 2000 }
    }
}

/// Classifies `h` on `[1, s_max]` by sampled first and second differences and
/// maps the result to the rank-one convexity of `W(F) = h(λ_max/λ_min)`.
pub fn h_criterion(h: impl Fn(f64) -> f64, mode: HMode, grid: HGrid) -> HCriterion {
    let n = grid.points.max(3);
    let v: Vec<f64> = (0..n).map(|i| h(1.0 + (grid.s_max - 1.0) * i as f64 / (n - 1) as f64)).collect();
    let margin = SAMPLED_MARGIN * (1.0 + max_abs(&v));
    let min_d1 = v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let min_d2 = second_differences(&v).fold(f64::INFINITY, f64::min);
    let convex = min_d2 >= -margin;
    let non_decreasing = min_d1 >= -margin;
    let strictly_convex = min_d2 > margin;
    let increasing = min_d1 > margin;
    let verdict = if mode == HMode::Strict && strictly_convex && increasing {
        HVerdict::StrictlyRankOneConvex
    } else if convex && non_decreasing {
        HVerdict::RankOneConvex
    } else {
        HVerdict::NotRankOneConvex
    };
    HCriterion { convex, non_decreasing, strictly_convex, increasing, verdict }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemiStrictClass {
    /// Every second difference is positive.
    Strict,
    /// Convex; affine stretches exist but none is constant.
    SemiStrict,
    /// Convex with a constant stretch.
    ConvexOnly,
    Nonconvex,
}

/// Classifies equally spaced samples of a 1D function.
pub fn semi_strict_check(samples: &[f64]) -> Result<SemiStrictClass> {
    if samples.len() < 5 {
        return Err(Error::TooFewSamples { needed: 5, got: samples.len() });
    }
    let margin = SAMPLED_MARGIN * (1.0 + max_abs(samples));
    let d2: Vec<f64> = second_differences(samples).collect();
    if d2.iter().any(|&x| x < -margin) {
        return Ok(SemiStrictClass::Nonconvex);
    }
    if d2.iter().all(|&x| x > margin) {
        return Ok(SemiStrictClass::Strict);
    }
    // d2[i] ≈ 0 means samples i, i+1, i+2 are collinear; a flat point is part
    // of a constant stretch if the adjacent first differences vanish too.
    let constant = d2.iter().enumerate().any(|(i, &x)| {
        x.abs() <= margin
            && (samples[i + 1] - samples[i]).abs() <= margin
            && (samples[i + 2] - samples[i + 1]).abs() <= margin
    });
    Ok(if constant { SemiStrictClass::ConvexOnly } else { SemiStrictClass::SemiStrict })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    StrictlyElliptic,
    Elliptic,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Row-major entries of `F`.
    pub f: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub lh_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub energy: String,
    pub dim: usize,
    pub samples: usize,
    pub skipped: usize,
    pub seed: u64,
    pub capabilities: Capabilities,
    pub verdict: Verdict,
    pub min_lh_form: f64,
    pub margin: f64,
    pub witnesses: Vec<Witness>,
    pub ks_grid: Vec<KsReport>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityConfig {
    pub samples: usize,
    pub seed: u64,
    pub stretch_range: (f64, f64),
    pub n_witnesses: usize,
}

impl Default for ConvexityConfig {
    fn default() -> Self {
        Self { samples: 10_000, seed: 7, stretch_range: sampling::LOG_STRETCH_RANGE, n_witnesses: 5 }
    }
}

/// Monte-Carlo Legendre–Hadamard check on random `(F, ξ, η)`. Samples where
/// the second form is not defined (kinks of the energy) are skipped and
/// counted.
pub fn check_convexity<const N: usize, E: Energy<N> + ?Sized>(
    energy: &E,
    cfg: &ConvexityConfig,
) -> Result<ConvexityReport> {
    let mut rng = sampling::rng(cfg.seed);
    let caps = energy.capabilities();
    let margin = if caps.second_form == Method::Analytic { LH_MARGIN_ANALYTIC } else { LH_MARGIN_FD };
    let mut skipped = 0;
    let mut smallest: Vec<(f64, DefGradient<N>, RankOneDirection<N>)> = Vec::new();
    let mut min = f64::INFINITY;
    for _ in 0..cfg.samples {
        let (f, d) = random_probe::<N>(&mut rng, cfg.stretch_range);
        let v = match lh_form(energy, &f, &d) {
            Ok(v) => v,
            Err(Error::NotDifferentiable(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        min = min.min(v);
        if smallest.len() < cfg.n_witnesses || v < smallest.last().map_or(f64::INFINITY, |w| w.0) {
            smallest.push((v, f, d));
            smallest.sort_by(|a, b| a.0.total_cmp(&b.0));
            smallest.truncate(cfg.n_witnesses);
        }
    }
    let verdict = if smallest.is_empty() {
        Verdict::Inconclusive
    } else if min > margin {
        Verdict::StrictlyElliptic
    } else if min >= -margin {
        if caps.second_form == Method::Analytic {
            Verdict::Elliptic
        } else {
            Verdict::Inconclusive
        }
    } else {
        let (_, f, d) = &smallest[0];
        if confirm_violation(energy, f, d)? {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        }
    };
    Ok(ConvexityReport {
        energy: energy.name(),
        dim: N,
        samples: cfg.samples,
        skipped,
        seed: cfg.seed,
        capabilities: caps,
        verdict,
        min_lh_form: min,
        margin,
        witnesses: smallest
            .into_iter()
            .map(|(v, f, d)| Witness {
                f: f.matrix().to_row_vec(),
                xi: d.xi.to_vec(),
                eta: d.eta.to_vec(),
                lh_form: v,
            })
            .collect(),
        ks_grid: Vec::new(),
    })
}

/// Folds a Knowles–Sternberg grid into a report: a failing condition marks the
/// energy violated, a non-strict one downgrades strict ellipticity.
pub fn attach_ks_grid(report: &mut ConvexityReport, grid: Vec<KsReport>) {
    if grid.iter().any(|r| !r.elliptic) {
        report.verdict = Verdict::Violated;
    } else if report.verdict == Verdict::StrictlyElliptic && grid.iter().any(|r| !r.strict) {
        report.verdict = Verdict::Elliptic;
    }
    report.ks_grid = grid;
}

pub fn random_probe<const N: usize>(
    rng: &mut impl Rng,
    stretch_range: (f64, f64),
) -> (DefGradient<N>, RankOneDirection<N>) {
    let f = random_def_gradient_in::<N>(rng, stretch_range.0, stretch_range.1);
    let d = RankOneDirection { xi: random_unit_vector(rng), eta: random_unit_vector(rng) };
    (f, d)
}

/// Re-checks a negative Legendre–Hadamard value by a short line scan
/// centred at `F`.
fn confirm_violation<const N: usize, E: Energy<N> + ?Sized>(
    energy: &E,
    f: &DefGradient<N>,
    d: &RankOneDirection<N>,
) -> Result<bool> {
    let delta = 0.05 * f.singular_values().min() / d.norm_product_squared().sqrt();
    let start = DefGradient::new(*f.matrix() - d.matrix() * delta)?;
    let scan = rank_one_line_scan(energy, &start, d, 2.0 * delta, 41)?;
    Ok(scan.class == LineClass::Nonconvex)
}
