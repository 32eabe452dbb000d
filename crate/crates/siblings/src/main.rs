use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use siblings::config::{build_scenario, run_verification, RunConfig, VerificationReport};
use siblings::gallery::GALLERY_NAMES;
use siblings::geometry::{integrate_geodesic, riemann_at};
use siblings::sibling::shape_spectrum;

/// Verify curvature identities relating a Riemannian metric and its
/// Lorentzian sibling, and explore either geometry from the command line.
#[derive(Parser)]
#[command(name = "siblings", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured identity checks and print one line per check.
    Verify {
        /// Path to a TOML config, or a gallery entry name.
        config: String,
        /// Write the full TOML report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print curvature data for both siblings at a point.
    Curvature {
        /// Path to a TOML config, or a gallery entry name.
        config: String,
        /// Chart point, comma-separated (e.g. "0.1,1.2,0.7").
        #[arg(long, value_parser = parse_point)]
        at: Point,
    },
    /// Integrate a geodesic of the Riemannian metric and print the states.
    Geodesic {
        /// Path to a TOML config, or a gallery entry name.
        config: String,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        velocity: Point,
        #[command(flatten)]
        stepping: Stepping,
    },
    /// Gallery operations.
    Gallery {
        #[command(subcommand)]
        command: GalleryCommand,
    },
}

#[derive(Args)]
struct Stepping {
    /// Number of RK4 steps.
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Step size in the affine parameter.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// List built-in geometries and their default parameters.
    List,
}

#[derive(Clone)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad coordinate `{part}`: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Point)
}

fn load_config(spec: &str) -> Result<RunConfig, String> {
    if Path::new(spec).is_file() {
        RunConfig::load(Path::new(spec)).map_err(|e| e.to_string())
    } else if GALLERY_NAMES.contains(&spec) {
        Ok(RunConfig::for_gallery(spec))
    } else {
        Err(format!(
            "`{spec}` is neither a config file nor a gallery name (try `gallery list`)"
        ))
    }
}

fn print_report(report: &VerificationReport) {
    println!("geometry: {}", report.geometry);
    let width = report
        .checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(0);
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        let detail = check
            .detail
            .as_deref()
            .map(|d| format!("  ({d})"))
            .unwrap_or_default();
        println!(
            "{status}  {:width$}  max residual {:>12.3e}  tol {:>9.1e}  samples {}{detail}",
            check.name, check.max_residual, check.tolerance, check.samples,
        );
    }
    println!(
        "overall: {}  ({:.2}s)",
        if report.passed { "PASS" } else { "FAIL" },
        report.wall_time_seconds
    );
}

fn print_matrix(label: &str, names: &[&str], get: impl Fn(usize, usize) -> f64, n: usize) {
    println!("{label}");
    print!("{:>10}", "");
    for name in names {
        print!("{name:>14}");
    }
    println!();
    for i in 0..n {
        print!("{:>10}", names[i]);
        for j in 0..n {
            print!("{:>14.6e}", get(i, j));
        }
        println!();
    }
}

fn cmd_verify(config: &str, report_path: Option<&Path>) -> Result<ExitCode, String> {
    let config = load_config(config)?;
    let report = run_verification(&config).map_err(|e| e.to_string())?;
    print_report(&report);
    if let Some(path) = report_path {
        std::fs::write(path, report.to_toml()).map_err(|e| e.to_string())?;
    }
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        let first_fail = report.checks.iter().position(|c| !c.passed).unwrap() + 1;
        Ok(ExitCode::from(first_fail.min(255) as u8))
    }
}

fn cmd_curvature(config: &str, at: &[f64]) -> Result<ExitCode, String> {
    let config = load_config(config)?;
    let scenario = build_scenario(&config).map_err(|e| e.to_string())?;
    let pair = &scenario.pair;
    if at.len() != pair.dim() {
        return Err(format!(
            "point has {} coordinates, chart has {}",
            at.len(),
            pair.dim()
        ));
    }
    if !pair.chart().contains(at) {
        return Err("point lies outside the chart's sampling box".into());
    }
    let names = pair.chart().names();
    let n = pair.dim();
    println!("geometry: {}", scenario.name);
    println!("point: {at:?}");
    for (label, metric) in [("riemannian", &pair.g), ("lorentzian", &pair.g_l)] {
        let pg = riemann_at(metric, at).map_err(|e| e.to_string())?;
        println!("\n[{label}]");
        print_matrix("metric", &names, |i, j| pg.g.get(i, j), n);
        print_matrix("ricci", &names, |i, j| pg.ricci.get(i, j), n);
        println!("scalar curvature: {:.12e}", pg.scalar);
    }
    let spectrum = shape_spectrum(&pair.g, &pair.t, at).map_err(|e| e.to_string())?;
    println!("\nT at point: {:?}", spectrum.t_value);
    println!("principal curvatures along T:");
    for (value, frame) in spectrum.eigenvalues.iter().zip(&spectrum.eigenframe) {
        println!("  {value:>14.6e}  direction {frame:?}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_geodesic(
    config: &str,
    from: &[f64],
    velocity: &[f64],
    stepping: &Stepping,
) -> Result<ExitCode, String> {
    let config = load_config(config)?;
    let scenario = build_scenario(&config).map_err(|e| e.to_string())?;
    let metric = &scenario.pair.g;
    if from.len() != metric.dim() || velocity.len() != metric.dim() {
        return Err(format!("point and velocity must have {} entries", metric.dim()));
    }
    if stepping.step <= 0.0 {
        return Err("--step must be positive".into());
    }
    let trajectory = integrate_geodesic(metric, from, velocity, stepping.step, stepping.steps)
        .map_err(|e| e.to_string())?;
    let names = metric.chart.names();
    print!("s");
    for name in &names {
        print!("\t{name}");
    }
    for name in &names {
        print!("\td{name}/ds");
    }
    println!("\tspeed");
    for (idx, (x, v)) in trajectory.states.iter().enumerate() {
        let g = metric.eval(x).map_err(|e| e.to_string())?;
        let speed = g.apply(v, v);
        print!("{:.6}", idx as f64 * stepping.step);
        for xi in x {
            print!("\t{xi:.12e}");
        }
        for vi in v {
            print!("\t{vi:.12e}");
        }
        println!("\t{speed:.12e}");
    }
    if !trajectory.completed {
        eprintln!("note: integration stopped early (left the sampling box or hit a singularity)");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gallery_list() -> ExitCode {
    println!("{:<14}{}", "name", "default parameters");
    println!("{:<14}{}", "de-sitter", "n = 3, r = 1");
    println!("{:<14}{}", "example2", "a = 2");
    println!("{:<14}{}", "plane-wave", "f = y, h = x, H = x^2 + y^2");
    println!("{:<14}{}", "pp-wave", "f = y^2, h = 2*x*y, H = f^2 + h^2");
    println!("{:<14}{}", "flat-product", "n = 3");
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { config, report } => cmd_verify(config, report.as_deref()),
        Command::Curvature { config, at } => cmd_curvature(config, &at.0),
        Command::Geodesic {
            config,
            from,
            velocity,
            stepping,
        } => cmd_geodesic(config, &from.0, &velocity.0, stepping),
        Command::Gallery {
            command: GalleryCommand::List,
        } => Ok(cmd_gallery_list()),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(255)
        }
    }
}
