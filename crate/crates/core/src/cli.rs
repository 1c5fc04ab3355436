//! Command-line front end.
//!
//! [`run`] takes the argument list (without the program name) and returns
//! the exit code together with everything destined for stdout and stderr,
//! so the whole interface can be exercised in-process.

use std::collections::BTreeMap;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use crate::algebra::RealMatrix;
use crate::analysis::{
    accessibility_report, ad_rank_report, control_set_probe, regular_rank, sample_reachable,
    trajectory_controls, AnalysisOptions, ProbeOptions,
};
use crate::error::{Error, Result};
use crate::groups::GroupPoint;
use crate::report::{Format, Report};
use crate::sysfile::{self, SystemFile};
use crate::{DEFAULT_FD_STEP, DEFAULT_GRID, DEFAULT_SEED, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "lie-access",
    version,
    about = "Accessibility and local controllability of discrete-time linear systems on Lie groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative rank threshold.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Central finite-difference step.
    #[arg(long = "fd-step", global = true)]
    fd_step: Option<f64>,
    /// Control grid points per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Horizon (number of steps).
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Number of samples or trajectories.
    #[arg(long, global = true)]
    count: Option<usize>,
    /// System parameter override, e.g. `--param a=0`. Repeatable.
    #[arg(long = "param", global = true, value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate F(0) = e, f0 a homomorphism, f0_inverse, and group membership.
    Check { target: String },
    /// Accessibility analysis: W, V, h and the verdict.
    Analyze { target: String },
    /// Ad-rank test for local controllability at the identity.
    Adrank { target: String },
    /// Rank of the endpoint map at a control sequence.
    Regular {
        target: String,
        /// Control sequence: steps separated by `;`, components by `,`.
        #[arg(long)]
        controls: Option<String>,
    },
    /// Trajectory from a start point under a control sequence.
    Solve {
        target: String,
        #[arg(long)]
        controls: Option<String>,
        /// Start point in ambient coordinates (defaults to the identity).
        #[arg(long)]
        start: Option<String>,
    },
    /// CSV of reachable-set samples from the identity.
    Sample { target: String },
    /// Sampled control-set evidence around the identity.
    Probe {
        target: String,
        /// Overlap radius, relative to the median distance of forward samples from e.
        #[arg(long)]
        eps: Option<f64>,
        /// Run even when the ad-rank condition fails.
        #[arg(long)]
        force: bool,
    },
}

impl Command {
    fn target(&self) -> &str {
        match self {
            Command::Check { target }
            | Command::Analyze { target }
            | Command::Adrank { target }
            | Command::Regular { target, .. }
            | Command::Solve { target, .. }
            | Command::Sample { target }
            | Command::Probe { target, .. } => target,
        }
    }
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let value: f64 = value.trim().parse().map_err(|_| {
        format!(
            "parameter `{}`: `{}` is not a number",
            key.trim(),
            value.trim()
        )
    })?;
    Ok((key.trim().to_string(), value))
}

fn parse_numbers(field: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| {
                Error::InvalidRange(format!("{field}: `{}` is not a number", t.trim()))
            })
        })
        .collect()
}

fn parse_controls(s: &str, m: usize) -> Result<Vec<DVector<f64>>> {
    s.split(';')
        .filter(|step| !step.trim().is_empty())
        .enumerate()
        .map(|(i, step)| {
            let u = parse_numbers("--controls", step)?;
            if u.len() != m {
                return Err(Error::InvalidRange(format!(
                    "--controls: step {} has {} components, the system has m = {m}",
                    i + 1,
                    u.len()
                )));
            }
            Ok(DVector::from_vec(u))
        })
        .collect()
}

/// Exit code and captured output of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(err: impl std::fmt::Display) -> Self {
        Self {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

struct Resolved {
    file: SystemFile,
    analysis: AnalysisOptions,
    format: Format,
    k: Option<usize>,
    count: Option<usize>,
}

/// Runs the CLI on `args` (program name excluded).
pub fn run<S: AsRef<str>>(args: &[S]) -> Outcome {
    let started = Instant::now();
    let argv: Vec<&str> = std::iter::once("lie-access")
        .chain(args.iter().map(AsRef::as_ref))
        .collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let echo = args.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");

    let params: BTreeMap<String, f64> = cli.params.iter().cloned().collect();
    let file = match sysfile::load(cli.command.target(), &params) {
        Ok(f) => f,
        Err(e) => return Outcome::input_error(e),
    };
    let n = file.numeric;
    let resolved = Resolved {
        analysis: AnalysisOptions {
            tol: cli.tol.or(n.tol).unwrap_or(DEFAULT_TOL),
            fd_step: cli.fd_step.or(n.fd_step).unwrap_or(DEFAULT_FD_STEP),
            grid: cli.grid.or(n.grid).unwrap_or(DEFAULT_GRID),
            seed: cli.seed.or(n.seed).unwrap_or(DEFAULT_SEED),
        },
        file,
        format: match cli.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        k: cli.k,
        count: cli.count,
    };
    if let Err(e) = check_numeric(&resolved.analysis) {
        return Outcome::input_error(e);
    }

    let result = dispatch(&cli.command, &resolved, &echo);
    match result {
        Ok(Output::Csv(csv)) => Outcome {
            code: 0,
            stdout: csv,
            stderr: String::new(),
        },
        Ok(Output::Report(mut report, code)) => {
            report.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            Outcome {
                code,
                stdout: report.render(resolved.format),
                stderr: String::new(),
            }
        }
        Err(e) => Outcome::input_error(e),
    }
}

fn check_numeric(o: &AnalysisOptions) -> Result<()> {
    if !(o.tol > 0.0 && o.tol < 1.0) {
        return Err(Error::InvalidRange(format!(
            "--tol must lie in (0, 1), got {}",
            o.tol
        )));
    }
    if !(o.fd_step > 0.0 && o.fd_step.is_finite()) {
        return Err(Error::InvalidRange(format!(
            "--fd-step must be positive, got {}",
            o.fd_step
        )));
    }
    if o.grid < 2 {
        return Err(Error::InvalidRange(format!(
            "--grid must be at least 2, got {}",
            o.grid
        )));
    }
    Ok(())
}

enum Output {
    Report(Report, i32),
    Csv(String),
}

fn base_report(echo: &str, r: &Resolved) -> Report {
    let mut report = Report::new(echo);
    let o = &r.analysis;
    report
        .param("system", r.file.system.name())
        .param("group", r.file.system.model().name())
        .param("tol", o.tol)
        .param("fd_step", o.fd_step)
        .param("grid", o.grid)
        .param("seed", o.seed);
    report
}

fn points_matrix(points: &[GroupPoint]) -> RealMatrix {
    let cols = points.first().map_or(0, GroupPoint::len);
    RealMatrix::from_fn(points.len(), cols, |i, j| points[i].as_slice()[j])
}

fn dispatch(command: &Command, r: &Resolved, echo: &str) -> Result<Output> {
    let sys = &r.file.system;
    let o = &r.analysis;
    let mut report = base_report(echo, r);
    let mut code = 0;
    match command {
        Command::Check { .. } => {
            let samples = r.count.unwrap_or(200);
            report.param("count", samples);
            let v = sys.validate(o.seed, samples);
            for c in &v.checks {
                report.result(&format!("{} residual", c.name), c.residual);
                report.result(&format!("{} passed", c.name), c.passed);
            }
            report.result("passed", v.passed());
        }
        Command::Analyze { .. } => {
            let a = accessibility_report(sys, o)?;
            report
                .result("grid", a.grid.clone())
                .result("grid_points", a.grid_points)
                .result("psi", a.psi.clone())
                .result("W", a.w.to_matrix())
                .result("V", a.v.to_matrix())
                .result("h", a.h.to_matrix())
                .result("dim_W", a.dim_w())
                .result("dim_V", a.dim_v())
                .result("dim_h", a.dim_h())
                .result("n", a.n)
                .result("verdict", a.verdict.as_str());
            if !a.is_accessible() {
                code = 1;
            }
        }
        Command::Adrank { .. } => {
            let a = ad_rank_report(sys, o.fd_step, o.tol)?;
            report
                .result("psi", a.psi.clone())
                .result("dF0", a.df0.clone())
                .result("V", a.v_matrix.clone())
                .result("rank", a.rank)
                .result("n", a.n)
                .result("verdict", a.verdict.as_str());
            if a.rank < a.n {
                code = 1;
            }
        }
        Command::Regular { controls, .. } => {
            let controls = match controls {
                Some(s) => parse_controls(s, sys.control_dim())?,
                None => {
                    let k = r.k.unwrap_or(sys.model().group_dim());
                    report.param("k", k);
                    trajectory_controls(sys.range(), k, o.seed, 0)
                }
            };
            let rank = regular_rank(sys, &controls, o.fd_step, o.tol)?;
            let n = sys.model().group_dim();
            report
                .result("controls", points_matrix(&to_points(&controls)))
                .result("rank", rank)
                .result("n", n)
                .result("regular", rank == n);
        }
        Command::Solve {
            controls, start, ..
        } => {
            let controls = match controls {
                Some(s) => parse_controls(s, sys.control_dim())?,
                None => {
                    let k = r.k.unwrap_or(5);
                    report.param("k", k);
                    trajectory_controls(sys.range(), k, o.seed, 0)
                }
            };
            let g = match start {
                Some(s) => {
                    let g = GroupPoint::new(parse_numbers("--start", s)?);
                    if g.len() != sys.model().ambient_dim() {
                        return Err(Error::DimensionMismatch {
                            expected: sys.model().ambient_dim(),
                            found: g.len(),
                        });
                    }
                    g
                }
                None => sys.model().identity(),
            };
            let path = sys.trajectory(controls.len(), &g, &controls)?;
            report
                .result("controls", points_matrix(&to_points(&controls)))
                .result("trajectory", points_matrix(&path))
                .result(
                    "final",
                    path.last()
                        .map(|p| p.as_slice().to_vec())
                        .unwrap_or_default(),
                );
        }
        Command::Sample { .. } => {
            let k = r.k.unwrap_or(5);
            let count = r.count.unwrap_or(1000);
            return Ok(Output::Csv(
                sample_reachable(sys, k, count, o.seed)?.to_csv(),
            ));
        }
        Command::Probe { eps, force, .. } => {
            let defaults = ProbeOptions::default();
            let opts = ProbeOptions {
                k: r.k.unwrap_or(defaults.k),
                count: r.count.unwrap_or(defaults.count),
                seed: o.seed,
                eps: eps.unwrap_or(defaults.eps),
                tol: o.tol,
                fd_step: o.fd_step,
                require_ad_rank: !force,
                ..defaults
            };
            report
                .param("k", opts.k)
                .param("count", opts.count)
                .param("eps", opts.eps)
                .param("radius_fraction", opts.radius_fraction);
            let p = control_set_probe(sys, &opts)?;
            report
                .result("ad_rank", p.ad_rank.as_str())
                .result("forward_dim", p.forward_dim)
                .result("backward_dim", p.backward_dim)
                .result("eps_absolute", p.eps_absolute)
                .result("overlap_fraction", p.overlap_fraction)
                .result("overlap_near_identity", p.overlap_near_identity)
                .result("full_dimension", p.full_dimension);
        }
    }
    Ok(Output::Report(report, code))
}

fn to_points(controls: &[DVector<f64>]) -> Vec<GroupPoint> {
    controls.iter().cloned().map(GroupPoint::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_parse() {
        assert_eq!(parse_param("a=0").unwrap(), ("a".to_string(), 0.0));
        assert!(parse_param("a").is_err());
        assert!(parse_param("a=x").is_err());
    }

    #[test]
    fn controls_parse() {
        let c = parse_controls("0.1,0.2; -0.3,0", 2).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1][0], -0.3);
        assert!(parse_controls("0.1", 2).is_err());
    }

    #[test]
    fn unknown_target_is_input_error() {
        let out = run(&["analyze", "/nonexistent/system.toml"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("cannot read"));
    }

    #[test]
    fn help_goes_to_stdout() {
        let out = run(&["--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("analyze"));
    }
}
