use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use advectlab::bench::output::{
    plot_contours, plot_efficiency, write_contours_csv, write_metrics_csv, write_records_csv,
};
use advectlab::bench::verify::run_checks;
use advectlab::bench::{
    run_contours, run_efficiency, soft_checks, ContourConfig, EfficiencyConfig, RunOptions, Scheme,
};
use advectlab::jet::DEFAULT_EPS;
use advectlab::Error;

const EXIT_ABORT: u8 = 2;
const EXIT_CONFIG: u8 = 3;

/// Jet schemes, WENO3 and P2 DG on the vortex-in-a-box benchmark.
#[derive(Parser, Debug)]
#[command(name = "advectlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence and cost study on cos(2 pi x) cos(4 pi y) over one swirl period.
    Efficiency {
        /// Comma-separated: weno, weno-nolimit, dg, jet, jet-epsfd.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "weno,weno-nolimit,dg,jet,jet-epsfd"
        )]
        schemes: Vec<Scheme>,
        /// Comma-separated resolutions, as fractions (1/20) or decimals.
        #[arg(long = "h", value_delimiter = ',', value_parser = parse_h, default_value = "1/20,1/40,1/80,1/160")]
        hs: Vec<f64>,
        /// Swirl period; the run ends at t = T.
        #[arg(long = "T", default_value_t = 1.0)]
        period: f64,
        #[arg(long)]
        out: PathBuf,
        /// Offset of the four characteristics in jet-epsfd.
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Multiplies the jet and WENO time step dt = h.
        #[arg(long = "dt-factor", default_value_t = 1.0)]
        dt_factor: f64,
        /// Seed of the velocity-derivative preflight check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Contours of a Gaussian bump at maximum deformation, t = T/2.
    Contours {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "jet-epsfd,dg,weno-nolimit"
        )]
        schemes: Vec<Scheme>,
        #[arg(long = "h", value_parser = parse_h, default_value = "1/90")]
        h: f64,
        #[arg(long = "T", default_value_t = 6.0)]
        period: f64,
        /// Contour levels exp(-10 r^2) for these radii.
        #[arg(
            long = "levels-from-radii",
            value_delimiter = ',',
            default_value = "0.044,0.132,0.220"
        )]
        radii: Vec<f64>,
        /// Samples per cell and axis used for contour extraction.
        #[arg(long, default_value_t = 8)]
        subgrid: usize,
        #[arg(long)]
        out: PathBuf,
        /// Resolution of the reference jet run (default h/4).
        #[arg(long = "reference-h", value_parser = parse_h)]
        reference_h: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Check derivatives, interpolation and discretizations against oracles.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// `1/20`, `0.05` or `20` (taken as 1/20 when above one).
fn parse_h(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in '{s}'"))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in '{s}'"))?;
            a / b
        }
        None => {
            let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
            if x > 1.0 {
                1.0 / x
            } else {
                x
            }
        }
    };
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("h = {s} must be positive"))
    }
}

fn exit_for(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::NonFinite { .. } => ExitCode::from(EXIT_ABORT),
        Error::Config(_) | Error::Mesh(_) | Error::CflViolation { .. } => {
            ExitCode::from(EXIT_CONFIG)
        }
        Error::Io { .. } | Error::Output { .. } => ExitCode::FAILURE,
    }
}

fn create_dir(dir: &Path) -> advectlab::Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn efficiency(config: EfficiencyConfig, seed: u64, out: &Path) -> advectlab::Result<bool> {
    config.validate()?;
    let preflight =
        advectlab::velocity::VelocityField::swirl(config.period).verify_derivatives(100, seed);
    if preflight > 1e-6 {
        return Err(Error::Config(format!(
            "swirl derivatives disagree with finite differences ({preflight:e})"
        )));
    }
    create_dir(out)?;
    let records = run_efficiency(&config)?;
    for r in &records {
        match &r.failure {
            None => println!(
                "{:<13} h = {:<8.5} error = {:.3e}  steps = {:<6} evals = {:<12} {:.3}s",
                r.scheme.name(),
                r.h,
                r.linf_error,
                r.steps,
                r.velocity_evals,
                r.wall_seconds
            ),
            Some(reason) => println!("{:<13} h = {:<8.5} FAILED: {reason}", r.scheme.name(), r.h),
        }
    }
    for line in soft_checks(&records) {
        println!("{line}");
    }
    write_records_csv(&records, &out.join("efficiency.csv"))?;
    plot_efficiency(&records, out)?;
    Ok(records.iter().all(|r| r.failure.is_none()))
}

fn contours(config: ContourConfig, out: &Path) -> advectlab::Result<bool> {
    config.validate()?;
    create_dir(out)?;
    let report = run_contours(&config)?;
    for m in &report.metrics {
        println!(
            "{:<13} r = {:.3}  polylines = {:<3} closed = {:<5} hausdorff = {:.3e}",
            m.scheme, m.radius, m.polylines, m.all_closed, m.hausdorff
        );
    }
    for (scheme, reason) in &report.failures {
        println!("{scheme}: FAILED: {reason}");
    }
    let mut sets: Vec<_> = report.sets.iter().collect();
    sets.push(&report.reference);
    write_contours_csv(&sets, &out.join("contours.csv"))?;
    write_metrics_csv(&report.metrics, &out.join("contour_metrics.csv"))?;
    for set in &report.sets {
        plot_contours(
            set,
            Some(&report.reference),
            config.h,
            &out.join(format!("contours_{}.svg", set.scheme)),
        )?;
    }
    plot_contours(
        &report.reference,
        None,
        config.reference_h(),
        &out.join("contours_reference.svg"),
    )?;
    Ok(report.failures.is_empty())
}

fn verify(seed: u64) -> bool {
    let mut all = true;
    for check in run_checks(seed) {
        let status = if check.passed() { "pass" } else { "FAIL" };
        all &= check.passed();
        println!(
            "{status}  {}: {:e} (tolerance {:e})",
            check.name, check.value, check.tolerance
        );
    }
    all
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let outcome = match cli.command {
        Command::Efficiency {
            schemes,
            hs,
            period,
            out,
            eps,
            dt_factor,
            seed,
        } => {
            let config = EfficiencyConfig {
                schemes,
                hs,
                period,
                options: RunOptions { eps, dt_factor },
            };
            efficiency(config, seed, &out)
        }
        Command::Contours {
            schemes,
            h,
            period,
            radii,
            subgrid,
            out,
            reference_h,
            eps,
        } => {
            let config = ContourConfig {
                schemes,
                h,
                period,
                radii,
                subgrid,
                reference_h,
                options: RunOptions {
                    eps,
                    dt_factor: 1.0,
                },
            };
            contours(config, &out)
        }
        Command::Verify { seed } => {
            return if verify(seed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
    };

    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ABORT),
        Err(e) => exit_for(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_h("1/20").unwrap(), 0.05);
        assert_eq!(parse_h("0.025").unwrap(), 0.025);
        assert_eq!(parse_h("80").unwrap(), 1.0 / 80.0);
        assert!(parse_h("0").is_err());
        assert!(parse_h("1/x").is_err());
    }

    #[test]
    fn capital_t_flag_and_lists() {
        let cli = Cli::try_parse_from([
            "advectlab",
            "efficiency",
            "--schemes",
            "jet,dg",
            "--h",
            "1/20,1/40",
            "--T",
            "2",
            "--out",
            "x",
        ])
        .unwrap();
        match cli.command {
            Command::Efficiency {
                schemes,
                hs,
                period,
                ..
            } => {
                assert_eq!(schemes, [Scheme::Jet, Scheme::Dg]);
                assert_eq!(hs, [0.05, 0.025]);
                assert_eq!(period, 2.0);
            }
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn rejects_unknown_scheme() {
        assert!(Cli::try_parse_from([
            "advectlab",
            "efficiency",
            "--schemes",
            "upwind",
            "--out",
            "x"
        ])
        .is_err());
    }
}
