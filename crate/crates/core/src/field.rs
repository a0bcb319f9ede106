//! Stress fields of deformations over sampled domains, the rank test for
//! laminate interfaces, and CSV/JSON/SVG output.

use std::f64::consts::E;
use std::fmt::Write as _;
use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::conformal::{fd_gradient, AffineMap, Deformation};
use crate::energy::Energy;
use crate::error::{Error, Result};
use crate::sampling;
use crate::tensor::{self, conformal_split_norms, DefGradient, Mat, Mat2, Vector};

/// Default homogeneity tolerance with analytic derivatives.
pub const HOMOGENEITY_TOL: f64 = 1e-10;
/// Default homogeneity tolerance with finite differences.
pub const HOMOGENEITY_TOL_FD: f64 = 1e-5;
/// Default relative rank threshold of [`jump_check`].
pub const RANK_TOL: f64 = 1e-9;
/// Step of the finite-difference map gradient.
pub const FD_MAP_STEP: f64 = 1e-6;
/// Relative slack when testing `det F` against the admissible band.
const BAND_SLACK: f64 = 1e-12;

/// `{x ∈ ℝⁿ : r_min ≤ ‖x‖ ≤ r_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusDomain {
    pub dim: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl AnnulusDomain {
    pub fn new(dim: usize, r_min: f64, r_max: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("annulus needs 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        Ok(Self { dim, r_min, r_max })
    }

    pub fn contains<const N: usize>(&self, x: &Vector<N>) -> bool {
        let r = tensor::norm(x);
        self.r_min <= r && r <= self.r_max
    }

    /// `n` points by rejection from the bounding cube, drawn sequentially
    /// from a generator seeded with `seed`.
    pub fn sample<const N: usize>(&self, n: usize, seed: u64) -> Result<Vec<Vector<N>>> {
        if N != self.dim {
            return Err(Error::InvalidArgument(format!("{}-dimensional annulus sampled in {N} dimensions", self.dim)));
        }
        let mut rng = sampling::rng(seed);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let x: Vector<N> = std::array::from_fn(|_| rng.random_range(-self.r_max..=self.r_max));
            if self.contains(&x) {
                out.push(x);
            }
        }
        Ok(out)
    }
}

/// The annulus on which the mirrored inversion in `dim` dimensions, with
/// `det ∇φ = ‖x‖^{−2·dim}`, has `det ∇φ ∈ [e, c]`.
pub fn admissible_annulus(dim: usize, c: f64) -> Result<AnnulusDomain> {
    if !(c > E) || !c.is_finite() {
        return Err(Error::InvalidSplice { c });
    }
    if !(dim == 2 || dim == 3) {
        return Err(Error::InvalidArgument(format!("no admissible annulus in dimension {dim}")));
    }
    let p = -1.0 / (2 * dim) as f64;
    AnnulusDomain::new(dim, c.powf(p), E.powf(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample<const N: usize> {
    #[serde(serialize_with = "tensor::serialize_vector")]
    pub x: Vector<N>,
    pub f: Mat<N>,
    pub det: f64,
    pub sigma: Mat<N>,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StressFieldSummary<const N: usize> {
    pub n_samples: usize,
    pub mean_sigma: Mat<N>,
    pub max_deviation: f64,
    /// Largest `‖F(xᵢ) − F(x₀)‖`; positive spread certifies a non-affine map.
    pub gradient_spread: f64,
    pub det_range: (f64, f64),
    pub admissible_band: Option<(f64, f64)>,
    pub admissible: bool,
    pub tol: f64,
    pub homogeneous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StressField<const N: usize> {
    pub samples: Vec<FieldSample<N>>,
    pub summary: StressFieldSummary<N>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    /// Differentiate the map by central differences instead of its Jacobian.
    pub fd_map: bool,
    /// The interval `det F` should stay in (e.g. the linear band of a
    /// volumetric term).
    pub admissible_band: Option<(f64, f64)>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { n: 10_000, seed: 42, tol: HOMOGENEITY_TOL, fd_map: false, admissible_band: None }
    }
}

pub fn stress_field<const N: usize, E: Energy<N> + ?Sized, M: Deformation<N> + ?Sized>(
    energy: &E,
    map: &M,
    dom: &AnnulusDomain,
    cfg: &FieldConfig,
) -> Result<StressField<N>> {
    if cfg.n == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let points = dom.sample::<N>(cfg.n, cfg.seed)?;
    let samples = points
        .iter()
        .map(|x| {
            let f = if cfg.fd_map { fd_gradient(&map, x, FD_MAP_STEP * (1.0 + tensor::norm(x)))? } else { map.gradient(x)? };
            Ok(FieldSample {
                x: *x,
                f: *f.matrix(),
                det: f.det(),
                sigma: energy.cauchy_stress(&f)?,
                energy: energy.value(&f)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&samples, cfg.tol, cfg.admissible_band);
    Ok(StressField { samples, summary })
}

pub fn summarize<const N: usize>(
    samples: &[FieldSample<N>],
    tol: f64,
    admissible_band: Option<(f64, f64)>,
) -> StressFieldSummary<N> {
    let n = samples.len();
    let mean_sigma = samples.iter().fold(Mat::zeros(), |acc, s| acc + s.sigma) * (1.0 / n as f64);
    let max_deviation = samples.iter().map(|s| (s.sigma - mean_sigma).norm()).fold(0.0, f64::max);
    let gradient_spread = samples.iter().map(|s| (s.f - samples[0].f).norm()).fold(0.0, f64::max);
    let det_range = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.det), hi.max(s.det)));
    let admissible = admissible_band.is_none_or(|(a, b)| {
        det_range.0 >= a * (1.0 - BAND_SLACK) && det_range.1 <= b * (1.0 + BAND_SLACK)
    });
    StressFieldSummary {
        n_samples: n,
        mean_sigma,
        max_deviation,
        gradient_spread,
        det_range,
        admissible_band,
        admissible,
        tol,
        homogeneous: max_deviation <= tol,
    }
}

/// Stress field of the affine map `x ↦ A x`, a control where the stress is
/// constant by construction.
pub fn affine_reference_check<const N: usize, E: Energy<N> + ?Sized>(
    energy: &E,
    a: &DefGradient<N>,
    dom: &AnnulusDomain,
    cfg: &FieldConfig,
) -> Result<StressFieldSummary<N>> {
    let map = AffineMap::new(*a.matrix(), [0.0; N]);
    Ok(stress_field(energy, &map, dom, cfg)?.summary)
}

/// Rank of `F₁ − F₂`; the two gradients can meet across a planar interface
/// only if the rank is one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpReport<const N: usize> {
    pub f1: Mat<N>,
    pub f2: Mat<N>,
    pub difference_singular_values: Vec<f64>,
    pub threshold: f64,
    pub rank: usize,
    pub det_difference: f64,
    /// For two planar conformal matrices `a·id + b·J`: `(a₁−a₂)² + (b₁−b₂)²`,
    /// which equals `det(F₁ − F₂)`.
    pub conformal_sum_of_squares: Option<f64>,
    pub rank_one_connected: bool,
}

pub fn jump_check<const N: usize>(f1: &Mat<N>, f2: &Mat<N>, tol: f64) -> JumpReport<N> {
    let d = *f1 - *f2;
    let sv = d.singular_values();
    let threshold = tol * (1.0 + f1.norm() + f2.norm());
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    let conformal_sum_of_squares = if N == 2 {
        let is_cso = |m: &Mat<N>| {
            let [_, q] = conformal_split_norms(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            q <= tol * (1.0 + m.norm())
        };
        (is_cso(f1) && is_cso(f2)).then(|| {
            let a = |m: &Mat<N>| 0.5 * (m[(0, 0)] + m[(1, 1)]);
            let b = |m: &Mat<N>| 0.5 * (m[(0, 1)] - m[(1, 0)]);
            (a(f1) - a(f2)).powi(2) + (b(f1) - b(f2)).powi(2)
        })
    } else {
        None
    };
    JumpReport {
        f1: *f1,
        f2: *f2,
        difference_singular_values: sv.to_vec(),
        threshold,
        rank,
        det_difference: d.det(),
        conformal_sum_of_squares,
        rank_one_connected: rank == 1,
    }
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `x1,x2[,x3],detF,s11,s12,…,energy` with 17 significant digits.
pub fn write_field_csv<const N: usize>(samples: &[FieldSample<N>], mut w: impl Write) -> Result<()> {
    let mut header: Vec<String> = (1..=N).map(|i| format!("x{i}")).collect();
    header.push("detF".into());
    for i in 1..=N {
        for j in 1..=N {
            header.push(format!("s{i}{j}"));
        }
    }
    header.push("energy".into());
    writeln!(w, "{}", header.join(","))?;
    for s in samples {
        let mut row: Vec<String> = s.x.iter().map(|&v| sci(v)).collect();
        row.push(sci(s.det));
        row.extend(s.sigma.to_row_vec().into_iter().map(sci));
        row.push(sci(s.energy));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_json(value: &impl Serialize, mut w: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

/// Square grid `[c − h, c + h]²` drawn with `lines` lines per direction, each
/// sampled at `points_per_line` points.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub center: Vector<2>,
    pub half_width: f64,
    pub lines: usize,
    pub points_per_line: usize,
    pub markers: Vec<Vector<2>>,
}

impl GridSpec {
    pub fn new(center: Vector<2>, half_width: f64) -> Self {
        Self { center, half_width, lines: 11, points_per_line: 42, markers: vec![center] }
    }

    fn polylines(&self) -> Vec<Vec<Vector<2>>> {
        let (n, m) = (self.lines.max(2), self.points_per_line.max(2));
        let coord = |k: usize, count: usize| -self.half_width + 2.0 * self.half_width * k as f64 / (count - 1) as f64;
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            let s = coord(i, n);
            out.push((0..m).map(|k| [self.center[0] + s, self.center[1] + coord(k, m)]).collect());
            out.push((0..m).map(|k| [self.center[0] + coord(k, m), self.center[1] + s]).collect());
        }
        out
    }
}

const PANEL: f64 = 300.0;
const PAD: f64 = 20.0;

/// Two-panel SVG: the reference grid (left) and its image under `map`
/// (right), each scaled to fit its panel.
pub fn render_grid_svg(map: &(impl Deformation<2> + ?Sized), grid: &GridSpec) -> Result<String> {
    let reference = grid.polylines();
    let image = reference
        .iter()
        .map(|line| line.iter().map(|x| map.evaluate(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let markers = grid.markers.iter().map(|x| map.evaluate(x)).collect::<Result<Vec<_>>>()?;

    let mut svg = String::new();
    let width = 2.0 * PANEL + 3.0 * PAD;
    let height = PANEL + 2.0 * PAD;
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#).unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    panel(&mut svg, PAD, &reference, &grid.markers, "#444444");
    panel(&mut svg, 2.0 * PAD + PANEL, &image, &markers, "#1f4e9c");
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn panel(svg: &mut String, x0: f64, lines: &[Vec<Vector<2>>], markers: &[Vector<2>], color: &str) {
    let pts = lines.iter().flatten().chain(markers);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let scale = PANEL / span;
    let (ox, oy) = (x0 + 0.5 * (PANEL - scale * (hi[0] - lo[0])), PAD + 0.5 * (PANEL - scale * (hi[1] - lo[1])));
    // y axis points up
    let to_svg = |p: &Vector<2>| (ox + scale * (p[0] - lo[0]), oy + scale * (hi[1] - p[1]));
    writeln!(svg, r#"<g fill="none" stroke="{color}" stroke-width="0.49">"#).unwrap();
    for line in lines {
        let coords: Vec<String> = line.iter().map(|p| {
            let (x, y) = to_svg(p);
            format!("{x:.3},{y:.3}")
        }).collect();
        writeln!(svg, r#"<polyline points="{}"/>"#, coords.join(" ")).unwrap();
    }
    svg.push_str("</g>\n");
    for m in markers {
        let (x, y) = to_svg(m);
        writeln!(svg, r##"<circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="#c0392b"/>"##).unwrap();
    }
}

/// Planar conformal matrix `a·id + b·J = [[a, b], [−b, a]]`.
pub fn cso2(a: f64, b: f64) -> Mat2 {
    Mat2::from_rows([[a, b], [-b, a]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::MirroredInversion;
    use crate::energy::{CompositeEnergy, Iso3DEnergy, IsochoricDirichlet, KlinSquaredMinusOne, VolumetricTerm};
    use crate::tensor::Mat3;
    use proptest::prelude::*;

    #[test]
    fn admissible_annulus_values() {
        let a = admissible_annulus(2, E + 2.0).unwrap();
        assert!((a.r_min - 0.678_507).abs() < 1e-6 && (a.r_max - 0.778_801).abs() < 1e-6);
        assert!((a.r_min.powi(-4) - (E + 2.0)).abs() < 1e-12);
        assert!((a.r_max.powi(-4) - E).abs() < 1e-12);
        let a = admissible_annulus(3, E + 2.0).unwrap();
        assert!((a.r_min - 0.772_152).abs() < 1e-6 && (a.r_max - 0.846_482).abs() < 1e-6);
        assert!((a.r_min.powi(-6) - (E + 2.0)).abs() < 1e-12);
        assert!(matches!(admissible_annulus(2, E), Err(Error::InvalidSplice { .. })));
    }

    #[test]
    fn composite_3d_field_is_homogeneous() {
        let w = CompositeEnergy::new(Iso3DEnergy::default(), VolumetricTerm::default());
        let dom = admissible_annulus(3, E + 2.0).unwrap();
        let cfg = FieldConfig { n: 500, admissible_band: Some(w.vol.linear_band()), ..Default::default() };
        let field = stress_field(&w, &MirroredInversion::<3>, &dom, &cfg).unwrap();
        let s = &field.summary;
        assert!(s.homogeneous && s.admissible, "{s:?}");
        assert!((s.mean_sigma - Mat3::identity() * (2.0 / E)).norm() < 1e-10);
        assert!(s.gradient_spread > 1e-2);
    }

    #[test]
    fn planar_klin_field_vanishes() {
        let dom = AnnulusDomain::new(2, 0.3, 2.0).unwrap();
        let cfg = FieldConfig { n: 300, ..Default::default() };
        let field = stress_field(&KlinSquaredMinusOne::klin_squared(), &MirroredInversion::<2>, &dom, &cfg).unwrap();
        assert!(field.samples.iter().all(|s| s.sigma.norm() <= 1e-10));
        assert!(field.summary.homogeneous);
    }

    #[test]
    fn widened_annulus_is_not_homogeneous() {
        let w = CompositeEnergy::new(IsochoricDirichlet::<2>, VolumetricTerm::default());
        let dom = AnnulusDomain::new(2, 0.5, 0.95).unwrap();
        let cfg = FieldConfig { n: 300, admissible_band: Some(w.vol.linear_band()), ..Default::default() };
        let s = stress_field(&w, &MirroredInversion::<2>, &dom, &cfg).unwrap().summary;
        assert!(!s.homogeneous && !s.admissible);
        assert!(s.max_deviation > 1e-2);
    }

    #[test]
    fn affine_reference_examples() {
        let dom = AnnulusDomain::new(3, 0.5, 1.0).unwrap();
        let cfg = FieldConfig { n: 50, tol: 1e-14, ..Default::default() };
        let s = affine_reference_check(&Iso3DEnergy::default(), &DefGradient::identity(), &dom, &cfg).unwrap();
        assert!(s.homogeneous && s.mean_sigma.max_abs() < 1e-15);

        let a = DefGradient::new(Mat3::from_diag([2.0, 1.0, 1.0])).unwrap();
        let s = affine_reference_check(&Iso3DEnergy::default(), &a, &dom, &cfg).unwrap();
        assert!(s.homogeneous);
        let expected = Mat3::from_diag([1.259921, -0.629961, -0.629961]);
        assert!((s.mean_sigma - expected).max_abs() < 1e-6);

        let w = CompositeEnergy::new(Iso3DEnergy::default(), VolumetricTerm::default());
        let a = DefGradient::new(Mat3::identity() * 3f64.cbrt()).unwrap();
        let s = affine_reference_check(&w, &a, &dom, &cfg).unwrap();
        assert!(s.homogeneous);
        assert!((s.mean_sigma - Mat3::identity() * (2.0 / E)).max_abs() < 1e-14);
    }

    #[test]
    fn jump_examples() {
        let id = Mat2::identity();
        let r = jump_check(&id, &(id * 2.0), RANK_TOL);
        assert_eq!(r.rank, 2);
        assert!(!r.rank_one_connected);
        assert!((r.det_difference - 1.0).abs() < 1e-15);
        assert_eq!(r.conformal_sum_of_squares, Some(1.0));
        assert_eq!(jump_check(&id, &id, RANK_TOL).rank, 0);
        let r = jump_check(&id, &(id + Mat2::from_rows([[0.0, 1.0], [0.0, 0.0]])), RANK_TOL);
        assert_eq!(r.rank, 1);
        assert!(r.rank_one_connected);
        assert_eq!(r.conformal_sum_of_squares, None);
        let r3 = jump_check(&Mat3::identity(), &(Mat3::identity() + Mat::outer(&[1.0, 2.0, 0.5], &[0.3, -1.0, 0.2])), RANK_TOL);
        assert_eq!(r3.rank, 1);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let dom = AnnulusDomain::new(2, 0.5, 1.0).unwrap();
        let cfg = FieldConfig { n: 3, ..Default::default() };
        let field = stress_field(&IsochoricDirichlet::<2>, &MirroredInversion::<2>, &dom, &cfg).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&field.samples, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,x2,detF,s11,s12,s21,s22,energy");
        assert_eq!(lines.len(), 4);
        let x1: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
        assert_eq!(x1, field.samples[0].x[0]);
    }

    #[test]
    fn identity_render_panels_match() {
        let grid = GridSpec::new([0.5, 0.0], 0.21);
        let svg = render_grid_svg(&AffineMap::<2>::identity(), &grid).unwrap();
        let polylines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
        assert_eq!(polylines.len(), 44);
        // identical shapes, shifted by one panel
        let first = |s: &str| s.split('"').nth(1).unwrap().split(' ').next().unwrap().to_string();
        let (a, b) = (first(polylines[0]), first(polylines[22]));
        let pa: Vec<f64> = a.split(',').map(|v| v.parse().unwrap()).collect();
        let pb: Vec<f64> = b.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((pb[0] - pa[0] - (PANEL + PAD)).abs() < 1e-3 && (pb[1] - pa[1]).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn cso2_pairs_are_never_rank_one(a1 in -5.0..5.0f64, b1 in -5.0..5.0f64, a2 in -5.0..5.0f64, b2 in -5.0..5.0f64) {
            let r = jump_check(&cso2(a1, b1), &cso2(a2, b2), RANK_TOL);
            let sos = (a1 - a2).powi(2) + (b1 - b2).powi(2);
            prop_assert!(r.rank == 0 || r.rank == 2);
            prop_assert!((r.det_difference - sos).abs() <= 1e-12 * (1.0 + sos));
        }
    }
}
