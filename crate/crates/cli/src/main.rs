//! `reachkit` command-line tool.
//!
//! Exit status is 0 on success, 1 on invalid input and 2 when a request lies
//! outside the supported envelope. Failures print one JSON object with
//! `code`, `field` and `detail` to stderr.

mod error;
mod input;
mod output;
mod render;

use clap::{Args, Parser, Subcommand, ValueEnum};
use error::CliError;
use input::{parse_grid, parse_list, parse_vectors, read_file, read_spec};
use output::{columns, emit, json_with_header, num, Csv, InputHash};
use rayon::prelude::*;
use reachkit::boundary::{implicit_degree, MembershipOracle};
use reachkit::size::{size_curves, width_at_angles, CurveKind};
use reachkit::{
    benchmark, contains, hausdorff_p, implicitize, monte_carlo_volume, sample_boundary, size_report, volume_exact,
    ApproxMode, BenchmarkRow,
};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "reachkit", version, about = "Exact geometry of integrator reach sets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized estimates.
    #[arg(long, global = true, default_value_t = 0x5EED)]
    seed: u64,
    /// Exact rational arithmetic where supported (`size`).
    #[arg(long, global = true)]
    exact: bool,
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Support function values and supporting points for a CSV of directions.
    Support {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        dirs: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary samples on the switching-time lattice.
    Boundary {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Restrict to one input block.
        #[arg(long)]
        block: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical implicit boundary polynomial for a single chain of length r.
    Implicitize {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG drawing of a planar (r = 2) reach set.
    Render2d {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Volume, diameter and per-block volumes as JSON.
    Size {
        #[arg(long)]
        spec: PathBuf,
        /// Add a Monte-Carlo volume estimate with this many samples.
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Volume or diameter against horizon for several chain lengths.
    Curves {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value = "2,3,4,5,6")]
        d_list: String,
        #[arg(long, default_value_t = 8.0)]
        t_max: f64,
        #[arg(long, default_value_t = 161)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Width over a (phi, theta) grid of a three-dimensional reach set.
    WidthMap {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 73)]
        phi_steps: usize,
        #[arg(long, default_value_t = 37)]
        theta_steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zonotope approximants against exact volume and diameter.
    Benchmark {
        #[arg(long)]
        spec: PathBuf,
        /// Horizons as `a:step:b` or a list.
        #[arg(long)]
        t: String,
        #[arg(long, default_value = "64,256,1024")]
        n: String,
        #[arg(long, default_value = "outer-pad")]
        mode: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hausdorff distance to the reach set under the p-norm input ball.
    Hausdorff {
        #[arg(long)]
        spec: PathBuf,
        /// One or more exponents; `inf` allowed.
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify points as inside, boundary or outside.
    Contains {
        #[arg(long)]
        spec: PathBuf,
        /// A single comma-separated point.
        #[arg(long, conflicts_with = "points", required_unless_present = "points")]
        point: Option<String>,
        /// CSV of points.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Volume,
    Diameter,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => return clap_failure(e),
    };
    match run(cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}

fn clap_failure(e: clap::Error) -> ExitCode {
    use clap::error::{ContextKind, ContextValue, ErrorKind};
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        let _ = e.print();
        return ExitCode::SUCCESS;
    }
    let field = match e.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => Some(s.trim_start_matches('-').split(' ').next().unwrap_or("").to_string()),
        _ => None,
    };
    let rendered = e.render().to_string();
    let detail = rendered.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
    eprintln!("{}", CliError::usage(field, detail).to_json());
    ExitCode::from(1)
}

fn run(cli: Cli, args: &[String]) -> Result<(), CliError> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::validation("threads", "must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation("threads", e.to_string()))?;
    }
    let mut hash = InputHash::default();
    for a in args {
        hash.add(a.as_bytes());
    }
    let g = &cli.global;
    let (out, text) = match &cli.command {
        Command::Support { spec, dirs, out } => (out, support_cmd(spec, dirs, hash)?),
        Command::Boundary { spec, grid, block, out } => (out, boundary_cmd(spec, *grid, *block, hash)?),
        Command::Implicitize { r, out } => (out, implicitize_cmd(*r, hash)?),
        Command::Render2d { spec, out } => {
            let s = read_spec(spec, &mut hash)?;
            let header = format!("reachkit {} input-sha256 {}", output::VERSION, hash.hex());
            (out, render::render2d(&s, &header)?)
        }
        Command::Size { spec, mc_samples, out } => (out, size_cmd(spec, *mc_samples, g, hash)?),
        Command::Curves {
            kind,
            d_list,
            t_max,
            samples,
            mu,
            out,
        } => (out, curves_cmd(*kind, d_list, *t_max, *samples, *mu, hash)?),
        Command::WidthMap {
            spec,
            phi_steps,
            theta_steps,
            out,
        } => (out, width_map_cmd(spec, *phi_steps, *theta_steps, hash)?),
        Command::Benchmark { spec, t, n, mode, out } => (out, benchmark_cmd(spec, t, n, mode, hash)?),
        Command::Hausdorff { spec, p, out } => (out, hausdorff_cmd(spec, p, hash)?),
        Command::Contains {
            spec,
            point,
            points,
            tol,
            out,
        } => (out, contains_cmd(spec, point.as_deref(), points.as_deref(), *tol, hash)?),
    };
    emit(out.as_deref(), &text)?;
    if !g.quiet {
        if let Some(p) = out {
            eprintln!("reachkit: wrote {}", p.display());
        }
    }
    Ok(())
}

fn support_cmd(spec: &Path, dirs: &Path, mut hash: InputHash) -> Result<String, CliError> {
    let s = read_spec(spec, &mut hash)?;
    let d = s.d();
    let ys = parse_vectors(&read_file(dirs, &mut hash)?, d, "dirs")?;
    let results = reachkit::support::support_box_batch(&s, &ys)?;
    let mut cols = columns("y", d);
    cols.push("h".into());
    cols.extend(columns("argmax", d));
    let mut csv = Csv::new(&hash.hex(), &cols);
    for (y, r) in ys.iter().zip(results) {
        let arg = r.argmax_state.unwrap_or_else(|| vec![f64::NAN; d]);
        csv.row(y.iter().copied().chain([r.value]).chain(arg).map(num));
    }
    Ok(csv.finish())
}

fn boundary_cmd(spec: &Path, grid: usize, block: Option<usize>, mut hash: InputHash) -> Result<String, CliError> {
    let s = read_spec(spec, &mut hash)?;
    let blocks: Vec<usize> = match block {
        Some(j) => vec![j],
        None => (0..s.m()).collect(),
    };
    let mut samples = Vec::new();
    for &j in &blocks {
        samples.push((j, sample_boundary(&s, j, grid)?));
    }
    let width = blocks.iter().map(|&j| s.r()[j]).max().unwrap_or(0);
    let mut cols = vec!["block".to_string(), "sign".to_string()];
    cols.extend(columns("x", width));
    let mut csv = Csv::new(&hash.hex(), &cols);
    for (j, pts) in samples {
        for (sign, x) in pts {
            let pad = width - x.len();
            csv.row(
                [j.to_string(), sign.label().to_string()]
                    .into_iter()
                    .chain(x.into_iter().map(num))
                    .chain(std::iter::repeat_n(String::new(), pad)),
            );
        }
    }
    Ok(csv.finish())
}

fn implicitize_cmd(r: usize, hash: InputHash) -> Result<String, CliError> {
    let p = implicitize(r)?;
    let body = json!({
        "r": r,
        "degree": implicit_degree(r),
        "text": p.to_string(),
        "polynomial": p,
    });
    Ok(json_with_header(&hash.hex(), body))
}

fn size_cmd(spec: &Path, mc_samples: Option<usize>, g: &Global, mut hash: InputHash) -> Result<String, CliError> {
    let s = read_spec(spec, &mut hash)?;
    let mut body = serde_json::to_value(size_report(&s)).expect("report serializes");
    if g.exact {
        body["volume_exact"] = Value::String(volume_exact(&s)?.to_string());
    }
    if let Some(n) = mc_samples {
        let mc = monte_carlo_volume(&s, n, g.seed)?;
        body["monte_carlo"] = json!({ "seed": g.seed, "estimate": mc });
    }
    Ok(json_with_header(&hash.hex(), body))
}

fn curves_cmd(kind: Kind, d_list: &str, t_max: f64, samples: usize, mu: f64, hash: InputHash) -> Result<String, CliError> {
    let ds = parse_list::<usize>(d_list, "d_list")?;
    let kind = match kind {
        Kind::Volume => CurveKind::Volume,
        Kind::Diameter => CurveKind::Diameter,
    };
    let rows = size_curves(kind, &ds, t_max, samples, mu)?;
    let label = match kind {
        CurveKind::Volume => "volume",
        CurveKind::Diameter => "diameter",
    };
    let mut csv = Csv::new(&hash.hex(), &["d".into(), "t".into(), label.into()]);
    for (d, t, v) in rows {
        csv.row([d.to_string(), num(t), num(v)]);
    }
    Ok(csv.finish())
}

fn width_map_cmd(spec: &Path, phi_steps: usize, theta_steps: usize, mut hash: InputHash) -> Result<String, CliError> {
    let s = read_spec(spec, &mut hash)?;
    if phi_steps < 2 || theta_steps < 2 {
        return Err(CliError::validation("phi_steps", "need at least 2 steps per angle"));
    }
    let grid: Vec<(f64, f64)> = (0..phi_steps)
        .flat_map(|i| {
            let phi = std::f64::consts::TAU * i as f64 / (phi_steps - 1) as f64;
            (0..theta_steps).map(move |k| (phi, std::f64::consts::PI * k as f64 / (theta_steps - 1) as f64))
        })
        .collect();
    let widths: Vec<f64> = grid
        .par_iter()
        .map(|&(phi, theta)| width_at_angles(&s, phi, theta))
        .collect::<reachkit::Result<_>>()?;
    let mut csv = Csv::new(&hash.hex(), &["phi".into(), "theta".into(), "width".into()]);
    for ((phi, theta), w) in grid.into_iter().zip(widths) {
        csv.row([num(phi), num(theta), num(w)]);
    }
    Ok(csv.finish())
}

fn benchmark_cmd(spec: &Path, t: &str, n: &str, mode: &str, mut hash: InputHash) -> Result<String, CliError> {
    let s = read_spec(spec, &mut hash)?;
    let ts = parse_grid(t, "t")?;
    let ns = parse_list::<usize>(n, "n")?;
    let mode: ApproxMode = mode.parse()?;
    let rows = benchmark(&s, &ts, &ns, mode)?;
    let cols: Vec<String> = BenchmarkRow::COLUMNS.iter().map(|c| c.to_string()).collect();
    let mut csv = Csv::new(&hash.hex(), &cols);
    for r in rows {
        csv.row([
            num(r.t),
            r.n_or_order.to_string(),
            num(r.vol_exact),
            num(r.vol_approx),
            num(r.ratio),
            num(r.diam_exact),
            num(r.diam_approx),
        ]);
    }
    Ok(csv.finish())
}

fn hausdorff_cmd(spec: &Path, p: &str, mut hash: InputHash) -> Result<String, CliError> {
    let s = read_spec(spec, &mut hash)?;
    let ps = parse_list::<f64>(p, "p")?;
    let results = if ps.len() == 1 {
        vec![hausdorff_p(&s, ps[0])?]
    } else {
        reachkit::compare::hausdorff_sweep(&s, &ps)?
    };
    let items: Vec<Value> = results
        .into_iter()
        .map(|r| {
            let p = if r.p.is_finite() { json!(r.p) } else { json!("inf") };
            json!({ "p": p, "distance": r.distance, "direction": r.direction, "starts": r.starts })
        })
        .collect();
    let body = match <[Value; 1]>::try_from(items) {
        Ok([one]) => one,
        Err(items) => json!({ "results": items }),
    };
    Ok(json_with_header(&hash.hex(), body))
}

fn contains_cmd(
    spec: &Path,
    point: Option<&str>,
    points: Option<&Path>,
    tol: f64,
    mut hash: InputHash,
) -> Result<String, CliError> {
    let s = read_spec(spec, &mut hash)?;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::validation("tol", "must be non-negative and finite"));
    }
    if let Some(p) = point {
        let x = parse_list::<f64>(p, "point")?;
        let m = contains(&s, &x, tol)?;
        return Ok(json_with_header(&hash.hex(), json!({ "point": x, "membership": m })));
    }
    let path = points.expect("clap requires --point or --points");
    let xs = parse_vectors(&read_file(path, &mut hash)?, s.d(), "points")?;
    let oracle = MembershipOracle::new(&s)?;
    let labels = xs
        .par_iter()
        .map(|x| oracle.classify(x, tol))
        .collect::<reachkit::Result<Vec<_>>>()?;
    let mut cols = columns("x", s.d());
    cols.push("membership".into());
    let mut csv = Csv::new(&hash.hex(), &cols);
    for (x, m) in xs.into_iter().zip(labels) {
        csv.row(x.into_iter().map(num).chain([m.label().to_string()]));
    }
    Ok(csv.finish())
}
