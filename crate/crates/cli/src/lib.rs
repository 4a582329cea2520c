//! Command-line front end: ingest channel/ensemble/circuit JSON, dispatch
//! coefficient and bound computations, emit machine-readable reports.
//!
//! One report object per invocation on stdout; diagnostics go to stderr
//! (verbosity through the `DOEBLIN_LOG` environment variable). Exit codes:
//! 0 success, 1 solver or numerical failure, 2 malformed input.

use clap::{Args, Parser, Subcommand, ValueEnum};
use doeblin::applications::{self, ConvergenceMode};
use doeblin::channels::Channel;
use doeblin::doeblin::{self as coeffs, ConeChoice};
use doeblin::error::Error;
use doeblin::oracles;
use doeblin::schema;
use doeblin::sdp::{SdpOptions, SdpStatus};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "doeblin",
    about = "Quantum Doeblin coefficients, contraction bounds, and application calculators",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Alpha,
    #[value(name = "alpha_wang", alias = "alpha-wang")]
    AlphaWang,
    #[value(name = "alpha_plus", alias = "alpha-plus")]
    AlphaPlus,
    Ppt,
    #[value(name = "ppt_sym2", alias = "ppt-sym2")]
    PptSym2,
    Reverse,
    All,
}

#[derive(Args)]
struct CommonOpts {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Relative complementarity-gap tolerance override.
    #[arg(long)]
    tol_gap: Option<f64>,
    /// Feasibility tolerance override.
    #[arg(long)]
    tol_feas: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a Doeblin coefficient of a channel.
    Coeff {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Alpha)]
        which: Which,
        /// Compute the coefficient of the n-fold tensor power.
        #[arg(long)]
        tensor: Option<usize>,
        /// Include primal/dual witness matrices in the output.
        #[arg(long)]
        witnesses: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Contraction/expansion bound report for a channel.
    Contraction {
        #[arg(long)]
        channel: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Application bound calculators.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Empirical soundness simulators.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// State-exclusion oracle over an ensemble file.
    Exclusion {
        #[arg(long)]
        ensemble: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Barren-plateau gradient bound.
    Barren {
        /// Comma-separated per-layer Doeblin coefficients.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        /// Layer index of the differentiated parameter (1-based).
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 1.0)]
        norm_o: f64,
        #[arg(long)]
        unital: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Error-mitigation minimum sample count.
    Mitigation {
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Noisy hypothesis-testing sample-complexity bounds.
    Hypothesis {
        #[arg(long)]
        channel: PathBuf,
        /// JSON matrix file for the first state.
        #[arg(long)]
        rho: PathBuf,
        /// JSON matrix file for the second state.
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fairness slack gamma (1 - alpha).
    Fairness {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Mixing-time bound from alpha and delta.
    Mixing {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Decoupling-time bound from alpha and delta.
    Decoupling {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Subcommand)]
enum SimulateCmd {
    /// Empirical mixing time versus the Doeblin bound.
    Mixing {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        delta: f64,
        /// Haar-random initial states added to the fixed-point eigenbasis.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Empirical decoupling time with a dim-2 reference factor.
    Decoupling {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Finite-difference gradient check against the barren-plateau bound.
    Gradient {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successful exits.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok((value, format)) => {
            emit(&value, format);
            0
        }
        Err(Error::Input(msg)) => {
            eprintln!("input error: {msg}");
            2
        }
        Err(Error::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            1
        }
    }
}

fn init_logging() {
    static INIT: std::sync::Once = std::sync::Once::new();
    INIT.call_once(|| {
        let level = std::env::var("DOEBLIN_LOG").unwrap_or_else(|_| "error".to_string());
        let _ = env_logger::Builder::new()
            .parse_filters(&level)
            .format_timestamp(None)
            .try_init();
    });
}

fn apply_tolerances(common: &CommonOpts) {
    let trace = log::log_enabled!(log::Level::Debug);
    if common.tol_gap.is_some() || common.tol_feas.is_some() || trace {
        let mut opts = SdpOptions {
            trace,
            ..Default::default()
        };
        if let Some(g) = common.tol_gap {
            opts.tol_gap = g;
        }
        if let Some(f) = common.tol_feas {
            opts.tol_feas = f;
        }
        coeffs::set_default_solver_options(opts);
    }
}

fn load_json(path: &Path) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::input(format!("invalid JSON in {}: {e}", path.display())))
}

fn load_channel(path: &Path) -> Result<Channel, Error> {
    schema::parse_channel(&load_json(path)?)
}

fn check_status(status: SdpStatus) -> Result<(), Error> {
    if status != SdpStatus::Optimal {
        return Err(Error::numerical(format!(
            "solver ended with status {}",
            schema::status_str(status)
        )));
    }
    Ok(())
}

fn check_bound_respected(report: &applications::BoundReport) -> Result<(), Error> {
    if let Some(e) = &report.empirical {
        if !e.bound_respected {
            return Err(Error::numerical(format!(
                "{}: measured {} exceeded bound {}",
                report.bound_name, e.measured, report.value
            )));
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(Value, Format), Error> {
    match cli.cmd {
        Cmd::Coeff {
            channel,
            which,
            tensor,
            witnesses,
            common,
        } => {
            apply_tolerances(&common);
            let mut ch = load_channel(&channel)?;
            if let Some(n) = tensor {
                ch = coeffs::tensor_power(&ch, n)?;
            }
            let single = |w: Which| -> Result<doeblin::doeblin::CoefficientReport, Error> {
                match w {
                    Which::Alpha => coeffs::alpha(&ch),
                    Which::AlphaWang => coeffs::alpha_wang(&ch),
                    Which::AlphaPlus => coeffs::alpha_plus(&ch),
                    Which::Ppt => coeffs::alpha_cone(&ch, ConeChoice::Ppt),
                    Which::PptSym2 => coeffs::alpha_cone(&ch, ConeChoice::PptSym2),
                    Which::Reverse => coeffs::reverse_doeblin(&ch),
                    Which::All => unreachable!(),
                }
            };
            let value = match which {
                Which::All => {
                    let mut map = Map::new();
                    for w in [
                        Which::Alpha,
                        Which::AlphaWang,
                        Which::AlphaPlus,
                        Which::Ppt,
                        Which::PptSym2,
                        Which::Reverse,
                    ] {
                        // Reverse needs a square channel; skip it otherwise.
                        if matches!(w, Which::Reverse) && ch.d_in() != ch.d_out() {
                            continue;
                        }
                        let report = single(w)?;
                        check_status(report.status)?;
                        map.insert(
                            report.name.clone(),
                            schema::coefficient_report_to_value(&report, witnesses),
                        );
                    }
                    Value::Object(map)
                }
                w => {
                    let report = single(w)?;
                    check_status(report.status)?;
                    schema::coefficient_report_to_value(&report, witnesses)
                }
            };
            Ok((value, common.format))
        }
        Cmd::Contraction { channel, common } => {
            apply_tolerances(&common);
            let ch = load_channel(&channel)?;
            let report = coeffs::contraction_bounds(&ch)?;
            Ok((schema::contraction_report_to_value(&report), common.format))
        }
        Cmd::Bound(bound) => dispatch_bound(bound),
        Cmd::Simulate(sim) => dispatch_simulate(sim),
        Cmd::Exclusion { ensemble, common } => {
            apply_tolerances(&common);
            let e = schema::parse_ensemble(&load_json(&ensemble)?)?;
            let err = oracles::exclusion_error(&e)?;
            let value = json!({
                "name": "exclusion_error",
                "value": err,
                "num_states": e.len(),
            });
            Ok((value, common.format))
        }
    }
}

fn dispatch_bound(cmd: BoundCmd) -> Result<(Value, Format), Error> {
    match cmd {
        BoundCmd::Barren {
            alphas,
            i,
            norm_o,
            unital,
            common,
        } => {
            let value = applications::barren_plateau_bound(&alphas, i, norm_o, unital)?;
            let report = applications::BoundReport {
                bound_name: "barren_plateau".into(),
                inputs: vec![
                    ("layer".into(), i as f64),
                    ("norm_o".into(), norm_o),
                    ("depth".into(), alphas.len() as f64),
                    ("unital".into(), if unital { 1.0 } else { 0.0 }),
                ],
                value,
                degenerate_flag: None,
                empirical: None,
            };
            Ok((schema::bound_report_to_value(&report), common.format))
        }
        BoundCmd::Mitigation { alphas, delta, common } => {
            let value = applications::error_mitigation_min_samples(&alphas, delta)?;
            let report = applications::BoundReport {
                bound_name: "error_mitigation_min_samples".into(),
                inputs: vec![
                    ("delta".into(), delta),
                    ("depth".into(), alphas.len() as f64),
                ],
                value,
                degenerate_flag: if value.is_infinite() {
                    Some("vanishing product".into())
                } else {
                    None
                },
                empirical: None,
            };
            Ok((schema::bound_report_to_value(&report), common.format))
        }
        BoundCmd::Hypothesis {
            channel,
            rho,
            sigma,
            epsilon,
            beta,
            common,
        } => {
            apply_tolerances(&common);
            let ch = load_channel(&channel)?;
            let rho = schema::parse_state(&load_json(&rho)?)?;
            let sigma = schema::parse_state(&load_json(&sigma)?)?;
            let report =
                applications::hypothesis_testing_sc_bounds(&rho, &sigma, &ch, epsilon, beta)?;
            Ok((schema::hypothesis_report_to_value(&report), common.format))
        }
        BoundCmd::Fairness { gamma, alpha, common } => {
            let value = applications::fairness_beta(gamma, alpha)?;
            let report = applications::BoundReport {
                bound_name: "fairness_beta".into(),
                inputs: vec![("gamma".into(), gamma), ("alpha".into(), alpha)],
                value,
                degenerate_flag: None,
                empirical: None,
            };
            Ok((schema::bound_report_to_value(&report), common.format))
        }
        BoundCmd::Mixing { alpha, delta, common }
        | BoundCmd::Decoupling { alpha, delta, common } => {
            let bound = applications::convergence_time_bound(alpha, delta)?;
            let report = applications::BoundReport {
                bound_name: "convergence_time".into(),
                inputs: vec![("alpha".into(), alpha), ("delta".into(), delta)],
                value: bound.map(|b| b as f64).unwrap_or(f64::INFINITY),
                degenerate_flag: if bound.is_none() {
                    Some("alpha = 0".into())
                } else {
                    None
                },
                empirical: None,
            };
            Ok((schema::bound_report_to_value(&report), common.format))
        }
    }
}

fn dispatch_simulate(cmd: SimulateCmd) -> Result<(Value, Format), Error> {
    match cmd {
        SimulateCmd::Mixing {
            channel,
            delta,
            samples,
            seed,
            common,
        } => {
            apply_tolerances(&common);
            let ch = load_channel(&channel)?;
            let report = applications::simulate_convergence(
                &ch,
                delta,
                ConvergenceMode::Mixing,
                samples,
                seed,
            )?;
            check_bound_respected(&report)?;
            Ok((schema::bound_report_to_value(&report), common.format))
        }
        SimulateCmd::Decoupling {
            channel,
            delta,
            samples,
            seed,
            common,
        } => {
            apply_tolerances(&common);
            let ch = load_channel(&channel)?;
            let report = applications::simulate_convergence(
                &ch,
                delta,
                ConvergenceMode::Decoupling,
                samples,
                seed,
            )?;
            check_bound_respected(&report)?;
            Ok((schema::bound_report_to_value(&report), common.format))
        }
        SimulateCmd::Gradient {
            circuit,
            i,
            j,
            samples,
            seed,
            common,
        } => {
            apply_tolerances(&common);
            let spec = schema::parse_circuit(&load_json(&circuit)?)?;
            let report = applications::simulate_gradient_check(&spec, i, j, samples, seed)?;
            if !report.bound_respected {
                return Err(Error::numerical(format!(
                    "gradient {} exceeded bound {}",
                    report.max_abs_gradient, report.bound
                )));
            }
            Ok((schema::gradient_report_to_value(&report), common.format))
        }
    }
}

fn emit(value: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", schema::to_json_string(value)),
        Format::Table => {
            let mut rows = Vec::new();
            flatten_value("", value, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                println!("{k:<width$}  {v}");
            }
        }
    }
}

fn flatten_value(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_value(&key, val, rows);
            }
        }
        Value::Array(items) => {
            // Matrices and vectors print compactly on one row.
            rows.push((prefix.to_string(), schema::to_json_string(v)));
            let _ = items;
        }
        other => rows.push((prefix.to_string(), schema::to_json_string(other))),
    }
}
