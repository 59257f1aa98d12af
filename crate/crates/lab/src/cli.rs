//! Subcommand definitions and dispatch.
//!
//! Flags map one-to-one onto library operation parameters; the CLI stays a
//! thin shell. Reports print as JSON on stdout (`{"manifest": …,
//! "result": …}`), with optional file outputs via `--json-out`, `--csv`, and
//! `--plot-data`. Exit codes: 0 success, 1 computation failure, 2 usage
//! error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use copies_core::constructions::{
    admissible_scale, annular_membership, epsilon_of_n, gap_hit_test, quadratic_sequence,
    verify_parallelogram_recurrence, AnnularSet, BourgainSet, QuadraticSeq,
};
use copies_core::discrepancy as disc;
use copies_core::kernel::{
    annulus_overlap, chebyshev_bound, kernel_integral, kernel_value_radial,
    phi_convergence_table, surface_area, AnnulusSpec, ChebyshevQuery, ExtendedValue, KernelSpec,
};
use copies_core::measure::{
    ball_density, concentric_sphere_scan, densest_ball_scan, grid_in_region,
    mean_identity_check, meansq_identity_check, sphere_coverage, ScanOutcome,
};
use copies_core::oracle::BallRegion;
use copies_core::pattern::{
    find_similar_copy, find_translated_copy, pattern_stats, rho_min_bounds,
    rotation_success_measure, Pattern, SearchConfig,
};
use copies_core::rng::substream;
use copies_core::{SamplerConfig, SamplerMode};

use crate::jsonfmt::to_string_pinned;
use crate::manifest::{params, Report, RunManifest};
use crate::oracle_spec::{parse_oracle, parse_point, parse_reals};
use crate::parallel::ap_certificate_with_threads;

/// Environment variable supplying the default worker count.
pub const THREADS_ENV: &str = "COPIES_LAB_THREADS";

#[derive(Parser)]
#[command(
    name = "copies-lab",
    version,
    about = "Sphere-intersection kernels, oracle-set density estimation, pattern-copy search, \
             and torus discrepancy certificates"
)]
pub struct Cli {
    /// Seed for all stochastic estimators.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker cap for parallel sweeps (default: $COPIES_LAB_THREADS or 1).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json_out: Option<PathBuf>,
    /// Write the result as CSV to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Write plottable series as CSV to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub plot_data: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Kernel evaluation, annulus overlaps, the integral identity, and the
    /// Chebyshev bound.
    Kernel(KernelArgs),
    /// Ball densities, sphere coverages, moment identities, and the
    /// concentric-sphere scan for a membership-oracle set.
    Measure(MeasureArgs),
    /// Annular/quadratic constructions and their diagnostics.
    Construct(ConstructArgs),
    /// Grid-plus-Lipschitz certificate that an annular set avoids all
    /// congruent arithmetic progressions of a given length.
    CertifyAp(CertifyArgs),
    /// Exact discrepancy and the analytic bound chain.
    Discrepancy(DiscrepancyArgs),
    /// Translated- and similar-copy searches with verified witnesses.
    Search(SearchArgs),
    /// The density sandwich for n-point patterns.
    Bounds(BoundsArgs),
}

fn sci_u64(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 9e15 {
        Ok(f as u64)
    } else {
        Err(format!("`{s}` is not a nonnegative integer"))
    }
}

#[derive(Args)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: u32,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Print the sphere surface area (the default action).
    #[arg(long)]
    pub surface_area: bool,
    /// Evaluate the kernel at displacement norm VNORM.
    #[arg(long, value_name = "VNORM")]
    pub value: Option<f64>,
    /// Integrate the kernel radially and compare with the squared area.
    #[arg(long)]
    pub check_integral: bool,
    #[arg(long, default_value_t = 256, value_parser = sci_u64)]
    pub quad_points: u64,
    /// Estimate the annulus overlap at displacement norm VNORM.
    #[arg(long, value_name = "VNORM")]
    pub overlap: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Tabulate overlap-to-kernel convergence at displacement norm VNORM.
    #[arg(long, value_name = "VNORM")]
    pub phi_table: Option<f64>,
    #[arg(long, value_name = "LIST", default_value = "1e-2,1e-3,1e-4")]
    pub deltas: String,
    /// Chebyshev deviation bound over these sample values.
    #[arg(long, value_name = "LIST")]
    pub chebyshev: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub domain_measure: f64,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, default_value_t = 100_000, value_parser = sci_u64)]
    pub samples: u64,
    /// Deterministic lattice sampling instead of Monte Carlo.
    #[arg(long)]
    pub lattice: bool,
}

#[derive(Args)]
pub struct MeasureArgs {
    /// Oracle set, e.g. `annular:2:0.05` or `ball:2:10` (see README).
    #[arg(long, value_name = "SPEC")]
    pub set: String,
    #[arg(long)]
    pub ball_density: bool,
    #[arg(long)]
    pub densest_ball: bool,
    #[arg(long)]
    pub sphere_coverage: bool,
    #[arg(long)]
    pub mean_identity: bool,
    #[arg(long)]
    pub meansq_identity: bool,
    /// Concentric-sphere scan over a candidate grid.
    #[arg(long)]
    pub scan: bool,
    #[arg(long, value_name = "POINT")]
    pub center: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, value_name = "LIST")]
    pub radii: Option<String>,
    #[arg(long)]
    pub rho_prime: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long, value_name = "POINT")]
    pub region_center: Option<String>,
    #[arg(long)]
    pub region_radius: Option<f64>,
    #[arg(long, default_value_t = 100_000, value_parser = sci_u64)]
    pub samples: u64,
    #[arg(long)]
    pub lattice: bool,
}

#[derive(Args)]
pub struct ConstructArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: u32,
    /// Annular-set membership of --point at gap --eps.
    #[arg(long)]
    pub annular_member: bool,
    /// Bourgain-set membership of --point at parameter --s.
    #[arg(long)]
    pub bourgain_member: bool,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, value_name = "POINT")]
    pub point: Option<String>,
    /// The density bound 10 log n / n^(1/5) and its voidness.
    #[arg(long, value_name = "N", value_parser = sci_u64)]
    pub epsilon_of_n: Option<u64>,
    /// Emit the quadratic sequence mod 1.
    #[arg(long)]
    pub quadratic: bool,
    #[arg(long)]
    pub r2: Option<f64>,
    /// Golden-ratio scale offset m (r² = m + z); overrides --r2.
    #[arg(long)]
    pub offset: Option<u32>,
    #[arg(long = "A", default_value_t = 0.0)]
    pub shift_a: f64,
    #[arg(long = "B", default_value_t = 0.0)]
    pub shift_b: f64,
    #[arg(long, value_parser = sci_u64)]
    pub n: Option<u64>,
    /// The admissible scale r = sqrt(m + z) for offset m.
    #[arg(long, value_name = "M")]
    pub admissible_scale: Option<u32>,
    /// First hit of the centered eps-interval in the generated sequence.
    #[arg(long, value_name = "EPS")]
    pub gap_hit: Option<f64>,
    /// Parallelogram-recurrence residuals of points "x,y;x,y;…" at scale --r.
    #[arg(long, value_name = "POINTS")]
    pub parallelogram: Option<String>,
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Args)]
pub struct CertifyArgs {
    #[arg(long, default_value_t = 32, value_parser = sci_u64)]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub offset: u32,
    /// Gap to certify; omit to pick one just above the sweep maximum.
    #[arg(long)]
    pub eps0: Option<f64>,
    /// Headroom factor for the automatic eps0 choice.
    #[arg(long, default_value_t = 1.05)]
    pub eps0_factor: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub grid_step: f64,
    /// Re-verify the certified claim on this many random (A, B) pairs.
    #[arg(long, default_value_t = 0, value_parser = sci_u64)]
    pub reverify: u64,
    /// Exit nonzero unless the verdict is true.
    #[arg(long)]
    pub expect_pass: bool,
}

#[derive(Args)]
pub struct DiscrepancyArgs {
    #[arg(long, value_parser = sci_u64)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub offset: u32,
    #[arg(long = "A", default_value_t = 0.0)]
    pub shift_a: f64,
    #[arg(long = "B", default_value_t = 0.0)]
    pub shift_b: f64,
    /// Full report: exact discrepancies plus the entire bound chain.
    #[arg(long)]
    pub full: bool,
    /// Exact star and extreme discrepancy only.
    #[arg(long)]
    pub exact: bool,
    /// Explicit points (comma separated) instead of a generated sequence.
    #[arg(long, value_name = "LIST")]
    pub points: Option<String>,
    /// Erdős–Turán bound at --M.
    #[arg(long)]
    pub et: bool,
    #[arg(long = "M", value_parser = sci_u64)]
    pub m_max: Option<u64>,
    /// Shift-averaging gap against its 2H/n bound.
    #[arg(long)]
    pub vdc: bool,
    #[arg(long, default_value_t = 1, value_parser = sci_u64)]
    pub m: u64,
    #[arg(long = "H", value_parser = sci_u64)]
    pub h: Option<u64>,
    /// Exact exponential sum against the analytic quadratic-sequence bound.
    #[arg(long)]
    pub quad_bound: bool,
    /// Scan q·dist(qz, Z) for the golden ratio up to QMAX.
    #[arg(long, value_name = "QMAX", value_parser = sci_u64)]
    pub golden_quality: Option<u64>,
    /// |p² + pq − q²| for integers --p --q.
    #[arg(long)]
    pub viete: bool,
    #[arg(long)]
    pub p: Option<i64>,
    #[arg(long)]
    pub q: Option<i64>,
    /// Closed-form final bound at --n.
    #[arg(long)]
    pub final_bound: bool,
    /// Series of (n, final_bound, theorem_bound) over "nmin,nmax,count".
    #[arg(long, value_name = "RANGE")]
    pub sweep: Option<String>,
}

#[derive(Args)]
pub struct SearchArgs {
    #[arg(long, value_name = "SPEC")]
    pub set: String,
    #[arg(long, value_enum, default_value_t = SearchMode::Translated)]
    pub mode: SearchMode,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Pattern from a JSON file {"dimension": d, "points": [[…], …]}.
    #[arg(long, value_name = "PATH")]
    pub pattern_file: Option<PathBuf>,
    /// Equilateral triangle with this side.
    #[arg(long, value_name = "SIDE")]
    pub triangle: Option<f64>,
    /// Collinear pattern "count,spacing".
    #[arg(long, value_name = "SPEC")]
    pub collinear: Option<String>,
    #[arg(long, value_name = "POINT")]
    pub region_center: Option<String>,
    #[arg(long, default_value_t = 50.0)]
    pub region_radius: f64,
    #[arg(long, default_value_t = 0.25)]
    pub grid_step: f64,
    #[arg(long, default_value_t = 10_000, value_parser = sci_u64)]
    pub rotation_samples: u64,
    /// Estimate the Haar measure of pattern-preserving rotations about --x0.
    #[arg(long)]
    pub rotation_measure: bool,
    #[arg(long, value_name = "POINT")]
    pub x0: Option<String>,
}

#[derive(Args)]
pub struct BoundsArgs {
    #[arg(long, value_parser = sci_u64)]
    pub n: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchMode {
    Translated,
    Similar,
}

/// One tabular series (for `--csv` / `--plot-data`).
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub struct Emission {
    pub result: Value,
    pub csv: Option<Table>,
    pub plot: Option<Table>,
    /// Set when the report is valid but the run should exit 1 (e.g.
    /// `--expect-pass` with a false verdict).
    pub failure: Option<String>,
}

impl Emission {
    fn of(result: Value) -> Emission {
        Emission {
            result,
            csv: None,
            plot: None,
            failure: None,
        }
    }
}

pub enum CmdError {
    Usage(String),
    Computation(String),
}

impl CmdError {
    fn usage(msg: impl Into<String>) -> CmdError {
        CmdError::Usage(msg.into())
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1);

    let (name, outcome) = match &cli.command {
        Command::Kernel(args) => ("kernel", run_kernel(&cli, args)),
        Command::Measure(args) => ("measure", run_measure(&cli, args)),
        Command::Construct(args) => ("construct", run_construct(&cli, args)),
        Command::CertifyAp(args) => ("certify-ap", run_certify(&cli, args, threads)),
        Command::Discrepancy(args) => ("discrepancy", run_discrepancy(&cli, args)),
        Command::Search(args) => ("search", run_search(&cli, args)),
        Command::Bounds(args) => ("bounds", run_bounds(&cli, args)),
    };

    let (manifest_params, emission) = match outcome {
        Ok(v) => v,
        Err(CmdError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            return ExitCode::from(2);
        }
        Err(CmdError::Computation(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };

    let report = Report {
        manifest: RunManifest::new(name, cli.seed, manifest_params),
        result: emission.result,
    };
    let rendered = to_string_pinned(&report);
    println!("{rendered}");

    if let Some(path) = &cli.json_out {
        if let Err(e) = std::fs::write(path, &rendered) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if let Some(path) = &cli.csv {
        let body = match &emission.csv {
            Some(table) => table.render(),
            None => flatten_csv(&report.result),
        };
        if let Err(e) = std::fs::write(path, body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if let Some(path) = &cli.plot_data {
        match &emission.plot {
            Some(table) => {
                if let Err(e) = std::fs::write(path, table.render()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            None => {
                eprintln!("usage error: this action has no plot series");
                return ExitCode::from(2);
            }
        }
    }

    match emission.failure {
        Some(msg) => {
            eprintln!("failure: {msg}");
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}

type Outcome = Result<(BTreeMap<String, String>, Emission), CmdError>;

fn sampler(cli: &Cli, samples: u64, lattice: bool) -> SamplerConfig {
    SamplerConfig {
        seed: cli.seed,
        samples,
        mode: if lattice {
            SamplerMode::LatticeGrid
        } else {
            SamplerMode::UniformMonteCarlo
        },
    }
}

fn run_kernel(cli: &Cli, args: &KernelArgs) -> Outcome {
    let spec = KernelSpec::new(args.dim, args.radius)
        .map_err(|e| CmdError::usage(e.to_string()))?;
    let mut p = params([
        ("dim", args.dim.to_string()),
        ("radius", fmt_float(args.radius)),
        ("samples", args.samples.to_string()),
        ("lattice", args.lattice.to_string()),
    ]);
    let smp = sampler(cli, args.samples, args.lattice);

    if let Some(values) = &args.chebyshev {
        p.insert("action".into(), "chebyshev".into());
        p.insert("values".into(), values.clone());
        p.insert("theta".into(), fmt_float(args.theta));
        p.insert("domain_measure".into(), fmt_float(args.domain_measure));
        let query = ChebyshevQuery {
            sample_values: parse_reals(values).map_err(CmdError::usage)?,
            domain_measure: args.domain_measure,
            theta: args.theta,
        };
        let (lhs, rhs) = chebyshev_bound(&query)
            .map_err(|e| CmdError::Computation(e.to_string()))?;
        return Ok((p, Emission::of(json!({"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs}))));
    }

    if let Some(v_norm) = args.phi_table {
        p.insert("action".into(), "phi-table".into());
        p.insert("v_norm".into(), fmt_float(v_norm));
        p.insert("deltas".into(), args.deltas.clone());
        let deltas = parse_reals(&args.deltas).map_err(CmdError::usage)?;
        let mut v = vec![0.0; args.dim as usize];
        v[0] = v_norm;
        let table = phi_convergence_table(spec, &v, &deltas, &smp)
            .map_err(|e| CmdError::Computation(e.to_string()))?;
        let rows: Vec<Value> = table
            .rows
            .iter()
            .map(|r| {
                json!({
                    "delta": r.delta,
                    "overlap": r.overlap.value,
                    "std_error": r.overlap.std_error,
                    "kernel": r.kernel,
                    "gap": r.gap,
                    "identity_gap": r.identity_gap,
                })
            })
            .collect();
        let csv = Table {
            header: ["delta", "overlap", "std_error", "kernel", "gap", "identity_gap"]
                .map(String::from)
                .to_vec(),
            rows: table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_float(r.delta),
                        fmt_float(r.overlap.value),
                        fmt_float(r.overlap.std_error),
                        fmt_float(r.kernel),
                        fmt_float(r.gap),
                        fmt_float(r.identity_gap),
                    ]
                })
                .collect(),
        };
        let plot = Table {
            header: ["delta", "gap", "identity_gap"].map(String::from).to_vec(),
            rows: table
                .rows
                .iter()
                .map(|r| vec![fmt_float(r.delta), fmt_float(r.gap), fmt_float(r.identity_gap)])
                .collect(),
        };
        return Ok((
            p,
            Emission {
                result: json!({"rows": rows, "fitted_order": table.fitted_order}),
                csv: Some(csv),
                plot: Some(plot),
                failure: None,
            },
        ));
    }

    if let Some(v_norm) = args.overlap {
        p.insert("action".into(), "overlap".into());
        p.insert("v_norm".into(), fmt_float(v_norm));
        p.insert("delta".into(), fmt_float(args.delta));
        let annulus = AnnulusSpec::new(spec, args.delta, vec![0.0; args.dim as usize])
            .map_err(|e| CmdError::usage(e.to_string()))?;
        let mut v = vec![0.0; args.dim as usize];
        v[0] = v_norm;
        let est = annulus_overlap(&annulus, &v, &smp)
            .map_err(|e| CmdError::Computation(e.to_string()))?;
        let kernel = kernel_value_radial(spec, v_norm);
        return Ok((
            p,
            Emission::of(json!({
                "overlap": est.value,
                "std_error": est.std_error,
                "kernel": extended_json(kernel),
            })),
        ));
    }

    if args.check_integral {
        p.insert("action".into(), "check-integral".into());
        p.insert("quad_points".into(), args.quad_points.to_string());
        let lhs = kernel_integral(spec, args.quad_points)
            .map_err(|e| CmdError::Computation(e.to_string()))?;
        let area = surface_area(spec);
        let rhs = area * area;
        return Ok((
            p,
            Emission::of(json!({
                "lhs": lhs,
                "rhs": rhs,
                "rel_error": (lhs - rhs).abs() / rhs,
            })),
        ));
    }

    if let Some(v_norm) = args.value {
        p.insert("action".into(), "value".into());
        p.insert("v_norm".into(), fmt_float(v_norm));
        let value = kernel_value_radial(spec, v_norm);
        return Ok((p, Emission::of(json!({"kernel": extended_json(value)}))));
    }

    p.insert("action".into(), "surface-area".into());
    Ok((
        p,
        Emission::of(json!({"surface_area": surface_area(spec)})),
    ))
}

fn extended_json(v: ExtendedValue) -> Value {
    match v {
        ExtendedValue::Finite(x) => json!({"infinite": false, "value": x}),
        ExtendedValue::PositiveInfinity => json!({"infinite": true, "value": null}),
    }
}

fn region_of(args_center: &Option<String>, radius: Option<f64>, dim: usize) -> Result<BallRegion, CmdError> {
    let center = match args_center {
        Some(c) => parse_point(c).map_err(CmdError::usage)?,
        None => vec![0.0; dim],
    };
    let radius = radius.ok_or_else(|| CmdError::usage("--region-radius is required"))?;
    if center.len() != dim {
        return Err(CmdError::usage("region center dimension mismatch"));
    }
    Ok(BallRegion::new(center, radius))
}

fn run_measure(cli: &Cli, args: &MeasureArgs) -> Outcome {
    let oracle = parse_oracle(&args.set).map_err(CmdError::usage)?;
    let d = oracle.dimension();
    let smp = sampler(cli, args.samples, args.lattice);
    let mut p = params([
        ("set", args.set.clone()),
        ("samples", args.samples.to_string()),
        ("lattice", args.lattice.to_string()),
    ]);

    if args.ball_density {
        p.insert("action".into(), "ball-density".into());
        let center = match &args.center {
            Some(c) => parse_point(c).map_err(CmdError::usage)?,
            None => vec![0.0; d],
        };
        let radius = args.radius.ok_or_else(|| CmdError::usage("--radius is required"))?;
        p.insert("center".into(), format!("{center:?}"));
        p.insert("radius".into(), fmt_float(radius));
        let est = ball_density(oracle.as_ref(), &BallRegion::new(center, radius), &smp);
        return Ok((
            p,
            Emission::of(json!({"fraction": est.value, "std_error": est.std_error})),
        ));
    }

    if args.densest_ball {
        p.insert("action".into(), "densest-ball".into());
        let radius = args.radius.ok_or_else(|| CmdError::usage("--radius is required"))?;
        let step = args.grid_step.ok_or_else(|| CmdError::usage("--grid-step is required"))?;
        let region = region_of(&args.region_center, args.region_radius, d)?;
        p.insert("radius".into(), fmt_float(radius));
        p.insert("grid_step".into(), fmt_float(step));
        p.insert("region_radius".into(), fmt_float(region.radius));
        let found = densest_ball_scan(oracle.as_ref(), radius, &region, step, &smp)
            .map_err(|e| CmdError::Computation(e.to_string()))?;
        return Ok((
            p,
            Emission::of(json!({
                "center": found.center,
                "radius": found.radius,
                "density": found.density.value,
                "std_error": found.density.std_error,
            })),
        ));
    }

    if args.sphere_coverage {
        p.insert("action".into(), "sphere-coverage".into());
        let center = match &args.center {
            Some(c) => parse_point(c).map_err(CmdError::usage)?,
            None => vec![0.0; d],
        };
        let radius = args.radius.ok_or_else(|| CmdError::usage("--radius is required"))?;
        p.insert("center".into(), format!("{center:?}"));
        p.insert("radius".into(), fmt_float(radius));
        let cov = sphere_coverage(oracle.as_ref(), &center, radius, &smp);
        return Ok((
            p,
            Emission::of(json!({"fraction": cov.fraction, "std_error": cov.std_error})),
        ));
    }

    if args.mean_identity || args.meansq_identity {
        let radius = args.radius.ok_or_else(|| CmdError::usage("--radius is required"))?;
        let region = region_of(&args.region_center, args.region_radius, d)?;
        p.insert("radius".into(), fmt_float(radius));
        p.insert("region_radius".into(), fmt_float(region.radius));
        let check = if args.mean_identity {
            p.insert("action".into(), "mean-identity".into());
            mean_identity_check(oracle.as_ref(), radius, &region, &smp)
        } else {
            p.insert("action".into(), "meansq-identity".into());
            meansq_identity_check(oracle.as_ref(), radius, &region, &smp)
        }
        .map_err(|e| CmdError::Computation(e.to_string()))?;
        return Ok((
            p,
            Emission::of(json!({
                "lhs": check.lhs,
                "rhs": check.rhs,
                "lhs_std_error": check.lhs_std_error,
                "rhs_std_error": check.rhs_std_error,
                "within_3_sigma": check.within_sigma(3.0),
            })),
        ));
    }

    if args.scan {
        p.insert("action".into(), "scan".into());
        let radii = parse_reals(
            args.radii
                .as_deref()
                .ok_or_else(|| CmdError::usage("--radii is required"))?,
        )
        .map_err(CmdError::usage)?;
        let rho_prime = args
            .rho_prime
            .ok_or_else(|| CmdError::usage("--rho-prime is required"))?;
        let step = args.grid_step.ok_or_else(|| CmdError::usage("--grid-step is required"))?;
        let region = region_of(&args.region_center, args.region_radius, d)?;
        p.insert("radii".into(), format!("{radii:?}"));
        p.insert("rho_prime".into(), fmt_float(rho_prime));
        p.insert("grid_step".into(), fmt_float(step));
        let candidates = grid_in_region(&region, step);
        eprintln!("scanning {} candidate centers", candidates.len());
        let outcome =
            concentric_sphere_scan(oracle.as_ref(), &candidates, &radii, rho_prime, &smp);
        let result = match outcome {
            ScanOutcome::Found(x) => json!({"found": true, "point": x}),
            ScanOutcome::Failed(report) => json!({
                "found": false,
                "point": null,
                "best_candidate": report.best_candidate,
                "best_min_coverage": report.best_min_coverage,
                "candidates_tested": report.candidates_tested,
            }),
        };
        return Ok((p, Emission::of(result)));
    }

    Err(CmdError::usage(
        "choose an action: --ball-density, --densest-ball, --sphere-coverage, \
         --mean-identity, --meansq-identity, or --scan",
    ))
}

fn run_construct(_cli: &Cli, args: &ConstructArgs) -> Outcome {
    let mut p = params([("dim", args.dim.to_string())]);

    if args.annular_member || args.bourgain_member {
        let point = parse_point(
            args.point
                .as_deref()
                .ok_or_else(|| CmdError::usage("--point is required"))?,
        )
        .map_err(CmdError::usage)?;
        let member = if args.annular_member {
            let eps = args.eps.ok_or_else(|| CmdError::usage("--eps is required"))?;
            p.insert("action".into(), "annular-member".into());
            p.insert("eps".into(), fmt_float(eps));
            annular_membership(&AnnularSet::new(args.dim, eps), &point)
        } else {
            let s = args.s.ok_or_else(|| CmdError::usage("--s is required"))?;
            p.insert("action".into(), "bourgain-member".into());
            p.insert("s".into(), fmt_float(s));
            use copies_core::SetOracle;
            BourgainSet::new(args.dim, s).contains(&point)
        };
        p.insert("point".into(), format!("{point:?}"));
        return Ok((p, Emission::of(json!({"member": member}))));
    }

    if let Some(n) = args.epsilon_of_n {
        p.insert("action".into(), "epsilon-of-n".into());
        p.insert("n".into(), n.to_string());
        let bound = epsilon_of_n(n);
        return Ok((
            p,
            Emission::of(json!({"value": bound.value, "void": bound.void})),
        ));
    }

    if let Some(m) = args.admissible_scale {
        p.insert("action".into(), "admissible-scale".into());
        p.insert("offset".into(), m.to_string());
        let scale = admissible_scale(m);
        return Ok((
            p,
            Emission::of(json!({
                "offset": scale.offset,
                "r": scale.r,
                "r_squared": scale.r_squared().to_f64(),
            })),
        ));
    }

    if args.quadratic || args.gap_hit.is_some() {
        let n = args.n.ok_or_else(|| CmdError::usage("--n is required"))? as u32;
        let seq_params = match args.offset {
            Some(m) => {
                p.insert("offset".into(), m.to_string());
                QuadraticSeq::at_scale(&admissible_scale(m), args.shift_a, args.shift_b, n)
            }
            None => {
                let r2 = args.r2.ok_or_else(|| CmdError::usage("--r2 or --offset is required"))?;
                p.insert("r2".into(), fmt_float(r2));
                QuadraticSeq::new(r2, args.shift_a, args.shift_b, n)
            }
        };
        p.insert("A".into(), fmt_float(args.shift_a));
        p.insert("B".into(), fmt_float(args.shift_b));
        p.insert("n".into(), n.to_string());
        let seq = quadratic_sequence(&seq_params);

        if let Some(eps) = args.gap_hit {
            p.insert("action".into(), "gap-hit".into());
            p.insert("eps".into(), fmt_float(eps));
            let hit = gap_hit_test(&seq, eps);
            return Ok((
                p,
                Emission::of(json!({
                    "hit": hit.is_some(),
                    "index": hit,
                    "value": hit.map(|k| seq[k]),
                })),
            ));
        }
        p.insert("action".into(), "quadratic".into());
        let csv = Table {
            header: vec!["k".into(), "value".into()],
            rows: seq
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), fmt_float(*v)])
                .collect(),
        };
        return Ok((
            p,
            Emission {
                result: json!({"points": seq}),
                csv: Some(csv),
                plot: None,
                failure: None,
            },
        ));
    }

    if let Some(points) = &args.parallelogram {
        p.insert("action".into(), "parallelogram".into());
        let r = args.r.ok_or_else(|| CmdError::usage("--r is required"))?;
        p.insert("r".into(), fmt_float(r));
        let pts: Result<Vec<Vec<f64>>, String> =
            points.split(';').map(parse_point).collect();
        let pts = pts.map_err(CmdError::usage)?;
        if pts.len() < 3 {
            return Err(CmdError::usage("need at least 3 points"));
        }
        let residuals = verify_parallelogram_recurrence(&pts, r);
        let max_abs = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        return Ok((
            p,
            Emission::of(json!({"residuals": residuals, "max_abs": max_abs})),
        ));
    }

    Err(CmdError::usage(
        "choose an action: --annular-member, --bourgain-member, --epsilon-of-n, \
         --quadratic, --gap-hit, --admissible-scale, or --parallelogram",
    ))
}

fn run_certify(cli: &Cli, args: &CertifyArgs, threads: usize) -> Outcome {
    let n = u32::try_from(args.n).map_err(|_| CmdError::usage("--n too large"))?;
    let scale = admissible_scale(args.offset);
    let mut p = params([
        ("n", n.to_string()),
        ("offset", args.offset.to_string()),
        ("grid_step", fmt_float(args.grid_step)),
        ("eps0_factor", fmt_float(args.eps0_factor)),
        ("reverify", args.reverify.to_string()),
        ("threads", threads.to_string()),
    ]);

    eprintln!(
        "sweeping {} grid points with {threads} worker(s)",
        copies_core::constructions::certificate_grid_len(args.grid_step)
    );
    let cert = match args.eps0 {
        Some(eps0) => {
            p.insert("eps0".into(), fmt_float(eps0));
            ap_certificate_with_threads(n, &scale, eps0, args.grid_step, threads)
                .map_err(|e| CmdError::Computation(e.to_string()))?
        }
        None => {
            // pilot sweep, then re-issue the verdict at the derived eps0
            p.insert("eps0".into(), "auto".into());
            let pilot =
                ap_certificate_with_threads(n, &scale, 0.999_999, args.grid_step, threads)
                    .map_err(|e| CmdError::Computation(e.to_string()))?;
            let eps0 = (args.eps0_factor
                * (pilot.max_discrepancy_found + pilot.lipschitz_slack))
                .min(0.999_999);
            copies_core::constructions::assemble_certificate(
                n,
                scale,
                eps0,
                args.grid_step,
                pilot.max_discrepancy_found,
            )
        }
    };

    let mut reverified = json!(null);
    if args.reverify > 0 && cert.verdict {
        let mut rng = copies_core::rng::Rng::seeded(substream(cli.seed, 0xA11CE));
        let mut all_hit = true;
        let mut first_miss = None;
        for _ in 0..args.reverify {
            let shift_a = rng.next_f64();
            let shift_b = rng.next_f64();
            let seq = quadratic_sequence(&QuadraticSeq::at_scale(&scale, shift_a, shift_b, n));
            if gap_hit_test(&seq, cert.eps0).is_none() {
                all_hit = false;
                first_miss = Some((shift_a, shift_b));
                break;
            }
        }
        reverified = json!({
            "pairs": args.reverify,
            "all_hit": all_hit,
            "first_miss": first_miss.map(|(a, b)| vec![a, b]),
        });
    }

    let verdict = cert.verdict;
    let result = json!({
        "certificate": cert,
        "reverified": reverified,
    });
    let failure = (args.expect_pass && !verdict)
        .then(|| "certificate verdict is false but --expect-pass was given".to_string());
    Ok((
        p,
        Emission {
            result,
            csv: None,
            plot: None,
            failure,
        },
    ))
}

fn golden_sequence(args: &DiscrepancyArgs, extra: u64) -> Result<(Vec<f64>, u64), CmdError> {
    let n = args.n.ok_or_else(|| CmdError::usage("--n is required"))?;
    let len = u32::try_from(n + extra).map_err(|_| CmdError::usage("--n too large"))?;
    let scale = admissible_scale(args.offset);
    let seq = quadratic_sequence(&QuadraticSeq::at_scale(
        &scale,
        args.shift_a,
        args.shift_b,
        len,
    ));
    Ok((seq, n))
}

fn run_discrepancy(_cli: &Cli, args: &DiscrepancyArgs) -> Outcome {
    let mut p = params([
        ("offset", args.offset.to_string()),
        ("A", fmt_float(args.shift_a)),
        ("B", fmt_float(args.shift_b)),
    ]);
    if let Some(n) = args.n {
        p.insert("n".into(), n.to_string());
    }

    if args.viete {
        p.insert("action".into(), "viete".into());
        let (pp, qq) = (
            args.p.ok_or_else(|| CmdError::usage("--p is required"))?,
            args.q.ok_or_else(|| CmdError::usage("--q is required"))?,
        );
        p.insert("p".into(), pp.to_string());
        p.insert("q".into(), qq.to_string());
        return Ok((
            p,
            Emission::of(json!({"value": disc::viete_identity(pp, qq)})),
        ));
    }

    if let Some(q_max) = args.golden_quality {
        p.insert("action".into(), "golden-quality".into());
        p.insert("q_max".into(), q_max.to_string());
        let q = disc::golden_quality(q_max);
        return Ok((
            p,
            Emission::of(json!({
                "z": q.z,
                "q_max": q.q_max,
                "min_product": q.min_product,
                "witness_q": q.witness_q,
                "fib_witness_q": q.fib_witness_q,
                "fib_product": q.fib_product,
            })),
        ));
    }

    if let Some(range) = &args.sweep {
        p.insert("action".into(), "sweep".into());
        p.insert("range".into(), range.clone());
        let parts = parse_reals(range).map_err(CmdError::usage)?;
        if parts.len() != 3 {
            return Err(CmdError::usage("--sweep expects nmin,nmax,count"));
        }
        let (n_min, n_max, count) = (parts[0], parts[1], parts[2] as usize);
        if !(n_min > 0.0 && n_max > n_min && count >= 2) {
            return Err(CmdError::usage("bad sweep range"));
        }
        let mut rows = Vec::new();
        let mut json_rows = Vec::new();
        for i in 0..count {
            let t = i as f64 / (count - 1) as f64;
            let n = (n_min * (n_max / n_min).powf(t)).round() as u64;
            let (h, m, value) = disc::final_bound(n)
                .map_err(|e| CmdError::Computation(format!("n={n}: {e}")))?;
            let theorem = disc::theorem_bound(n);
            json_rows.push(json!({
                "n": n, "h": h, "m": m, "final_bound": value, "theorem_bound": theorem,
            }));
            rows.push(vec![
                n.to_string(),
                fmt_float(value),
                fmt_float(theorem),
            ]);
        }
        let table = Table {
            header: vec!["n".into(), "final_bound".into(), "theorem_bound".into()],
            rows,
        };
        return Ok((
            p,
            Emission {
                result: json!({"rows": json_rows}),
                csv: None,
                plot: Some(table),
                failure: None,
            },
        ));
    }

    if args.final_bound {
        p.insert("action".into(), "final-bound".into());
        let n = args.n.ok_or_else(|| CmdError::usage("--n is required"))?;
        let (h, m, value) = disc::final_bound(n)
            .map_err(|e| CmdError::Computation(e.to_string()))?;
        return Ok((
            p,
            Emission::of(json!({
                "h": h,
                "m": m,
                "value": value,
                "theorem_bound": disc::theorem_bound(n),
            })),
        ));
    }

    if args.vdc {
        p.insert("action".into(), "vdc".into());
        let h = args.h.ok_or_else(|| CmdError::usage("--H is required"))?;
        p.insert("H".into(), h.to_string());
        p.insert("m".into(), args.m.to_string());
        let (seq, _) = golden_sequence(args, h)?;
        let (gap, bound) = disc::vdc_shift_gap(&seq, args.m, h)
            .map_err(|e| CmdError::Computation(e.to_string()))?;
        return Ok((
            p,
            Emission::of(json!({"gap": gap, "bound": bound, "holds": gap <= bound})),
        ));
    }

    if args.quad_bound {
        p.insert("action".into(), "quad-bound".into());
        let h = args.h.ok_or_else(|| CmdError::usage("--H is required"))?;
        let n = args.n.ok_or_else(|| CmdError::usage("--n is required"))?;
        p.insert("H".into(), h.to_string());
        p.insert("m".into(), args.m.to_string());
        let scale = admissible_scale(args.offset);
        let (exact, analytic) =
            disc::quadratic_expsum_bound(n, args.m, h, &scale, args.shift_a);
        return Ok((
            p,
            Emission::of(json!({
                "exact": exact,
                "analytic": analytic,
                "holds": exact <= analytic,
            })),
        ));
    }

    if args.et {
        p.insert("action".into(), "erdos-turan".into());
        let m_max = args.m_max.ok_or_else(|| CmdError::usage("--M is required"))?;
        p.insert("M".into(), m_max.to_string());
        let seq = match &args.points {
            Some(list) => parse_reals(list).map_err(CmdError::usage)?,
            None => golden_sequence(args, 0)?.0,
        };
        let bound = disc::erdos_turan_bound(&seq, m_max);
        let extreme = disc::extreme_discrepancy_exact(&seq);
        return Ok((
            p,
            Emission::of(json!({
                "et_bound": bound,
                "exact_extreme": extreme,
                "holds": extreme <= bound,
            })),
        ));
    }

    if args.exact {
        p.insert("action".into(), "exact".into());
        let seq = match &args.points {
            Some(list) => {
                p.insert("points".into(), list.clone());
                let pts = parse_reals(list).map_err(CmdError::usage)?;
                disc::TorusSequence::new(pts)
                    .map_err(|e| CmdError::usage(e.to_string()))?
                    .as_slice()
                    .to_vec()
            }
            None => golden_sequence(args, 0)?.0,
        };
        return Ok((
            p,
            Emission::of(json!({
                "n": seq.len(),
                "star": disc::star_discrepancy_exact(&seq),
                "extreme": disc::extreme_discrepancy_exact(&seq),
            })),
        ));
    }

    if args.full {
        p.insert("action".into(), "full".into());
        let (seq, n) = golden_sequence(args, 0)?;
        eprintln!("computing full report at n={n}");
        let report = disc::full_report(&seq)
            .map_err(|e| CmdError::Computation(e.to_string()))?;
        // per-mode series for plotting
        let rows: Vec<Vec<String>> = (1..=report.m)
            .map(|mode| {
                vec![
                    mode.to_string(),
                    fmt_float(disc::exp_sum(&seq, mode)),
                    fmt_float(disc::analytic_expsum_bound(n, mode, report.h)),
                ]
            })
            .collect();
        let plot = Table {
            header: vec!["m".into(), "exact_sum".into(), "analytic_bound".into()],
            rows,
        };
        return Ok((
            p,
            Emission {
                result: serde_json::to_value(report).expect("report serialises"),
                csv: None,
                plot: Some(plot),
                failure: None,
            },
        ));
    }

    Err(CmdError::usage(
        "choose an action: --full, --exact, --et, --vdc, --quad-bound, \
         --golden-quality, --viete, --final-bound, or --sweep",
    ))
}

fn load_pattern(args: &SearchArgs) -> Result<Pattern, CmdError> {
    if let Some(path) = &args.pattern_file {
        #[derive(serde::Deserialize)]
        struct PatternFile {
            dimension: usize,
            points: Vec<Vec<f64>>,
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CmdError::usage(format!("cannot read {}: {e}", path.display())))?;
        let file: PatternFile = serde_json::from_str(&text)
            .map_err(|e| CmdError::usage(format!("bad pattern file: {e}")))?;
        if file.points.iter().any(|p| p.len() != file.dimension) {
            return Err(CmdError::usage("pattern file: point dimension mismatch"));
        }
        return Pattern::new(file.points).map_err(|e| CmdError::usage(e.to_string()));
    }
    if let Some(side) = args.triangle {
        return Ok(Pattern::equilateral_triangle(side));
    }
    if let Some(spec) = &args.collinear {
        let parts = parse_reals(spec).map_err(CmdError::usage)?;
        if parts.len() != 2 {
            return Err(CmdError::usage("--collinear expects count,spacing"));
        }
        return Ok(Pattern::collinear(2, parts[0] as usize, parts[1]));
    }
    Err(CmdError::usage(
        "provide a pattern: --pattern-file, --triangle, or --collinear",
    ))
}

fn run_search(cli: &Cli, args: &SearchArgs) -> Outcome {
    let oracle = parse_oracle(&args.set).map_err(CmdError::usage)?;
    let d = oracle.dimension();
    let pattern = load_pattern(args)?;
    if pattern.dimension() != d {
        return Err(CmdError::usage("pattern and set dimensions differ"));
    }
    let (sep, diam) = pattern_stats(&pattern);
    let mut p = params([
        ("set", args.set.clone()),
        ("r", fmt_float(args.r)),
        ("pattern_points", pattern.len().to_string()),
        ("region_radius", fmt_float(args.region_radius)),
        ("grid_step", fmt_float(args.grid_step)),
        ("rotation_samples", args.rotation_samples.to_string()),
    ]);

    if args.rotation_measure {
        p.insert("action".into(), "rotation-measure".into());
        let x0 = parse_point(
            args.x0
                .as_deref()
                .ok_or_else(|| CmdError::usage("--x0 is required"))?,
        )
        .map_err(CmdError::usage)?;
        p.insert("x0".into(), format!("{x0:?}"));
        let m = rotation_success_measure(
            oracle.as_ref(),
            &x0,
            &pattern,
            args.rotation_samples,
            cli.seed,
        )
        .map_err(|e| CmdError::Computation(e.to_string()))?;
        return Ok((
            p,
            Emission::of(json!({
                "estimate": m.estimate.value,
                "estimate_std_error": m.estimate.std_error,
                "lower_bound": m.lower_bound.value,
                "lower_bound_std_error": m.lower_bound.std_error,
            })),
        ));
    }

    let center = match &args.region_center {
        Some(c) => parse_point(c).map_err(CmdError::usage)?,
        None => vec![0.0; d],
    };
    let config = SearchConfig {
        rotation_samples: args.rotation_samples,
        translation_grid_step: args.grid_step,
        candidate_region: BallRegion::new(center, args.region_radius),
        seed: cli.seed,
    };

    match args.mode {
        SearchMode::Translated => {
            p.insert("action".into(), "translated".into());
            let found = find_translated_copy(oracle.as_ref(), &pattern, args.r, &config);
            let verified = found.as_ref().map(|z| {
                pattern.points().iter().all(|q| {
                    let moved: Vec<f64> =
                        q.iter().zip(z).map(|(&qv, &zv)| args.r * qv + zv).collect();
                    oracle.contains(&moved)
                })
            });
            Ok((
                p,
                Emission::of(json!({
                    "found": found.is_some(),
                    "translation": found,
                    "verified": verified,
                    "sep": sep,
                    "diam": diam,
                })),
            ))
        }
        SearchMode::Similar => {
            p.insert("action".into(), "similar".into());
            let found = find_similar_copy(oracle.as_ref(), &pattern, args.r, &config);
            let verified = found
                .as_ref()
                .map(|placement| placement.verify(oracle.as_ref(), &pattern));
            Ok((
                p,
                Emission::of(json!({
                    "found": found.is_some(),
                    "placement": found,
                    "verified": verified,
                    "sep": sep,
                    "diam": diam,
                })),
            ))
        }
    }
}

fn run_bounds(_cli: &Cli, args: &BoundsArgs) -> Outcome {
    let p = params([("n", args.n.to_string())]);
    let (lower, upper) = rho_min_bounds(args.n);
    Ok((p, Emission::of(json!({"lower": lower, "upper": upper}))))
}

/// Key,value flattening of scalar result fields for `--csv` on non-tabular
/// actions.
fn flatten_csv(result: &Value) -> String {
    let mut out = String::from("key,value\n");
    if let Value::Object(map) = result {
        for (k, v) in map {
            match v {
                Value::Number(n) => out.push_str(&format!("{k},{n}\n")),
                Value::Bool(b) => out.push_str(&format!("{k},{b}\n")),
                Value::String(s) => out.push_str(&format!("{k},{s}\n")),
                _ => {}
            }
        }
    }
    out
}
