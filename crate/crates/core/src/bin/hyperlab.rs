use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hyperlab::catalog::{EnergyKind, MapKind, DEFAULT_SPLICE};
use hyperlab::conformal::{fd_jacobian, Deformation, FD_CONFORMAL_TOL};
use hyperlab::convexity::{self, ConvexityConfig, Verdict};
use hyperlab::energy::Energy;
use hyperlab::field::{self, AnnulusDomain, FieldConfig, GridSpec, HOMOGENEITY_TOL, HOMOGENEITY_TOL_FD, RANK_TOL};
use hyperlab::linearized::{self, QuadraticApprox};
use hyperlab::tensor::{self, conformality_residual, Mat, Vector};
use hyperlab::{Error, Result};

/// Stress fields, ellipticity checks and conformal maps for conformally
/// invariant hyperelastic energies.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a map over an annulus and evaluate the Cauchy stress field.
    StressField(StressFieldOpts),
    /// Monte-Carlo Legendre–Hadamard check of an energy.
    CheckConvexity(ConvexityOpts),
    /// Check that a map's Jacobian is a scaled rotation at sampled points.
    CheckConformal(ConformalOpts),
    /// Rank of F1 − F2 (rank-one connectivity of two gradients).
    JumpCheck(JumpOpts),
    /// Render a square grid and its image under a planar map as SVG.
    RenderGrid(RenderOpts),
    /// Validate the quadratic kernel displacement against the inversion.
    LinearizedDemo(DemoOpts),
}

#[derive(Args)]
struct DomainOpts {
    /// Splice point c > e of the volumetric term.
    #[arg(long, default_value_t = DEFAULT_SPLICE)]
    c: f64,
    /// Inner radius (defaults to the admissible annulus for phi2d/phi3d).
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl DomainOpts {
    fn domain(&self, map: &MapKind) -> Result<AnnulusDomain> {
        let default = match map.admissible_annulus(self.c) {
            Some(d) => d?,
            None => AnnulusDomain::new(map.dim(), 0.5, 1.0)?,
        };
        AnnulusDomain::new(map.dim(), self.r_min.unwrap_or(default.r_min), self.r_max.unwrap_or(default.r_max))
    }
}

#[derive(Args)]
struct StressFieldOpts {
    #[arg(long)]
    energy: EnergyKind,
    #[arg(long)]
    map: MapKind,
    #[command(flatten)]
    domain: DomainOpts,
    /// Homogeneity tolerance (default 1e-10, or 1e-5 with --fd).
    #[arg(long)]
    tol: Option<f64>,
    /// Force finite differences for the energy and the map gradient.
    #[arg(long)]
    fd: bool,
    /// Exit 0 even if the field is not homogeneous.
    #[arg(long)]
    allow_inhomogeneous: bool,
    /// CSV output of the samples.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary (stdout if omitted).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct ConvexityOpts {
    #[arg(long)]
    energy: EnergyKind,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SPLICE)]
    c: f64,
    #[arg(long)]
    fd: bool,
    /// Side of the log-spaced singular value grid for the planar conditions.
    #[arg(long, default_value_t = 30)]
    ks_grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConformalOpts {
    #[arg(long)]
    map: MapKind,
    #[command(flatten)]
    domain: DomainOpts,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct JumpOpts {
    /// Row-major entries, e.g. "1,0,0,1".
    #[arg(long)]
    f1: String,
    #[arg(long)]
    f2: String,
    #[arg(long, default_value_t = RANK_TOL)]
    tol: f64,
}

#[derive(Args)]
struct RenderOpts {
    #[arg(long)]
    map: MapKind,
    /// Grid center "x,y".
    #[arg(long, default_value = "0.5,0")]
    center: String,
    #[arg(long, default_value_t = 0.21)]
    half_width: f64,
    #[arg(long, default_value_t = 11)]
    lines: usize,
    /// Points per grid line.
    #[arg(long, default_value_t = 42)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DemoOpts {
    #[arg(long, default_value_t = 0.15)]
    radius: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Passed,
    Failed(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::StressField(o) => stress_field(o),
        Command::CheckConvexity(o) => check_convexity(o),
        Command::CheckConformal(o) => check_conformal(o),
        Command::JumpCheck(o) => jump_check(o),
        Command::RenderGrid(o) => render_grid(o),
        Command::LinearizedDemo(o) => linearized_demo(o),
    };
    match result {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed(why)) => {
            eprintln!("verification failed: {why}");
            ExitCode::from(1)
        }
        Err(e @ (Error::InvalidArgument(_) | Error::InvalidSplice { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn emit(value: &impl Serialize, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => field::write_json(value, BufWriter::new(File::create(p)?)),
        None => field::write_json(value, io::stdout().lock()),
    }
}

fn stress_field(o: StressFieldOpts) -> Result<Outcome> {
    if o.energy.dim() != o.map.dim() {
        return Err(Error::InvalidArgument(format!("energy {} and map {} differ in dimension", o.energy, o.map)));
    }
    let dom = o.domain.domain(&o.map)?;
    let cfg = FieldConfig {
        n: o.domain.n,
        seed: o.domain.seed,
        tol: o.tol.unwrap_or(if o.fd { HOMOGENEITY_TOL_FD } else { HOMOGENEITY_TOL }),
        fd_map: o.fd,
        admissible_band: o.energy.is_composite().then_some((std::f64::consts::E, o.domain.c)),
    };
    let (homogeneous, admissible) = if o.map.dim() == 2 {
        run_field(&*o.energy.planar(o.domain.c, o.fd)?, &*o.map.planar()?, &dom, &cfg, &o)?
    } else {
        run_field(&*o.energy.spatial(o.domain.c, o.fd)?, &*o.map.spatial()?, &dom, &cfg, &o)?
    };
    if !admissible {
        eprintln!("warning: det F leaves the admissible band [e, c] on this domain");
    }
    Ok(if homogeneous || o.allow_inhomogeneous {
        Outcome::Passed
    } else {
        Outcome::Failed("stress field is not homogeneous".into())
    })
}

fn run_field<const N: usize>(
    energy: &dyn Energy<N>,
    map: &dyn Deformation<N>,
    dom: &AnnulusDomain,
    cfg: &FieldConfig,
    o: &StressFieldOpts,
) -> Result<(bool, bool)> {
    let f = field::stress_field(energy, map, dom, cfg)?;
    if let Some(p) = &o.out {
        field::write_field_csv(&f.samples, BufWriter::new(File::create(p)?))?;
    }
    emit(&f.summary, o.summary.as_ref())?;
    Ok((f.summary.homogeneous, f.summary.admissible))
}

fn check_convexity(o: ConvexityOpts) -> Result<Outcome> {
    let cfg = ConvexityConfig { samples: o.samples, seed: o.seed, ..Default::default() };
    let mut report = if o.energy.dim() == 2 {
        convexity::check_convexity(&*o.energy.planar(o.c, o.fd)?, &cfg)?
    } else {
        convexity::check_convexity(&*o.energy.spatial(o.c, o.fd)?, &cfg)?
    };
    if o.ks_grid > 0 && !o.energy.is_composite() {
        if let Some(g) = o.energy.singular_value_function() {
            let grid = convexity::log_grid(0.1, 10.0, o.ks_grid);
            convexity::attach_ks_grid(&mut report, convexity::ks_grid_scan(&*g, &grid)?);
        }
    }
    emit(&report, o.out.as_ref())?;
    Ok(match report.verdict {
        Verdict::Violated => Outcome::Failed(format!("{} is not rank-one convex", report.energy)),
        _ => Outcome::Passed,
    })
}

#[derive(Serialize)]
struct ConformalReport {
    map: String,
    n_samples: usize,
    max_residual: f64,
    /// Largest relative error of `det ∇φ` against its closed form, if known.
    max_det_error: Option<f64>,
    /// Largest difference between the analytic and the FD Jacobian.
    max_fd_difference: f64,
    min_det: f64,
    tol: f64,
    conformal: bool,
}

fn check_conformal(o: ConformalOpts) -> Result<Outcome> {
    let dom = o.domain.domain(&o.map)?;
    let report = if o.map.dim() == 2 {
        conformal_report(&*o.map.planar()?, &o, &dom)?
    } else {
        conformal_report(&*o.map.spatial()?, &o, &dom)?
    };
    emit(&report, o.out.as_ref())?;
    Ok(if report.conformal {
        Outcome::Passed
    } else {
        Outcome::Failed(format!("conformality residual {} exceeds {}", report.max_residual, o.tol))
    })
}

fn conformal_report<const N: usize>(map: &dyn Deformation<N>, o: &ConformalOpts, dom: &AnnulusDomain) -> Result<ConformalReport> {
    let (mut max_residual, mut max_fd, mut min_det) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut max_det_error: Option<f64> = None;
    let points: Vec<Vector<N>> = dom.sample(o.domain.n, o.domain.seed)?;
    for x in &points {
        let j = map.jacobian(x)?;
        let det = j.det();
        max_residual = max_residual.max(conformality_residual(&j));
        min_det = min_det.min(det);
        let fd = fd_jacobian(&map, x, 1e-6 * (1.0 + tensor::norm(x)))?;
        max_fd = max_fd.max((fd - j).max_abs() / (1.0 + j.max_abs()));
        if let Some(expected) = o.map.expected_det(tensor::norm(x)) {
            let err = (det - expected).abs() / expected;
            max_det_error = Some(max_det_error.map_or(err, |m| m.max(err)));
        }
    }
    let conformal = max_residual <= o.tol
        && min_det > 0.0
        && max_det_error.is_none_or(|e| e <= o.tol)
        && max_fd <= FD_CONFORMAL_TOL;
    Ok(ConformalReport {
        map: o.map.to_string(),
        n_samples: points.len(),
        max_residual,
        max_det_error,
        max_fd_difference: max_fd,
        min_det,
        tol: o.tol,
        conformal,
    })
}

fn parse_matrix<const N: usize>(s: &str) -> Result<Mat<N>> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("not a number: '{t}'"))))
        .collect::<Result<Vec<_>>>()?;
    Mat::from_row_slice(&v)
}

fn jump_check(o: JumpOpts) -> Result<Outcome> {
    match o.f1.split(',').count() {
        4 => emit(&field::jump_check(&parse_matrix::<2>(&o.f1)?, &parse_matrix::<2>(&o.f2)?, o.tol), None)?,
        9 => emit(&field::jump_check(&parse_matrix::<3>(&o.f1)?, &parse_matrix::<3>(&o.f2)?, o.tol), None)?,
        n => return Err(Error::InvalidArgument(format!("expected 4 or 9 entries, got {n}"))),
    }
    Ok(Outcome::Passed)
}

fn render_grid(o: RenderOpts) -> Result<Outcome> {
    let center = parse_point(&o.center)?;
    let grid = GridSpec { lines: o.lines, points_per_line: o.resolution, ..GridSpec::new(center, o.half_width) };
    let svg = field::render_grid_svg(&*o.map.planar()?, &grid)?;
    std::fs::write(&o.out, svg)?;
    Ok(Outcome::Passed)
}

fn parse_point(s: &str) -> Result<Vector<2>> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("not a number: '{t}'"))))
        .collect::<Result<Vec<_>>>()?;
    <[f64; 2]>::try_from(v).map_err(|_| Error::InvalidArgument(format!("expected two coordinates, got '{s}'")))
}

#[derive(Serialize)]
struct DemoReport {
    approximation: QuadraticApprox,
    image_of_expansion_point: Vector<2>,
    validation: linearized::ApproxValidation,
}

fn linearized_demo(o: DemoOpts) -> Result<Outcome> {
    let q = linearized::quadratic_approx_phi();
    let image = q.kernel().evaluate(&QuadraticApprox::EXPANSION_POINT)?;
    let validation = q.validate(QuadraticApprox::EXPANSION_POINT, o.radius, 30, 64)?;
    emit(&DemoReport { approximation: q, image_of_expansion_point: image, validation }, o.out.as_ref())?;
    Ok(if validation.error_at_center == 0.0 && validation.max_w_lin <= 1e-12 {
        Outcome::Passed
    } else {
        Outcome::Failed("quadratic approximation does not match at the expansion point".into())
    })
}
