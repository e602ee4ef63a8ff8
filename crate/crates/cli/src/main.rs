//! `qcorr` - compute quantum-correlation measures for density matrices.
//!
//! Three subcommands:
//!
//! * `compute` evaluates one measure for a state read from a JSON file and
//!   prints a JSON report to stdout.
//! * `sweep` tabulates measures over the one-parameter `bell-mix` family as
//!   CSV (stdout or `--output` file).
//! * `random` samples states, evaluates a measure on each, and prints a
//!   deterministic min/mean/max summary plus an invariant-violation count.
//!
//! Exit codes: 0 success, 2 invalid input (unreadable or malformed state
//! file, bad parameters), 3 unsupported dimensions for the requested
//! measure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use qcorr_core::entanglement::multipartite_pure_entanglement;
use qcorr_core::state::read_state_file;
use qcorr_core::{
    bell_mixture, discord_a, q_multipartite, q_one_sided, q_strict, q_strict_multipartite,
    q_strict_two_qubit, q_total, sampling, DensityMatrix, DiscordGrid, Error, MeasureConfig,
    MeasureReport, MinimizationMode, NonOrthogonalityChoice, NonOrthogonalityKind, OptimizerConfig,
    PairConvention, Side,
};

/// Values this far below zero count as nonnegativity violations in `random`.
const NONNEGATIVITY_SLACK: f64 = 1e-9;
/// Allowed gap between a measure on a pure state and the pure-state
/// entanglement it should reduce to.
const PURE_REDUCTION_TOLERANCE: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Quantum-correlation measures for density matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// How the block-unitary freedom is minimised.
    #[arg(long, value_enum, global = true, default_value_t = ModeArg::Sequential)]
    mode: ModeArg,

    /// Pair convention for the non-orthogonality sum.
    #[arg(long, value_enum, global = true, default_value_t = PairsArg::Unordered)]
    pairs: PairsArg,

    /// Pair functional applied to reduced states.
    #[arg(long = "f", value_enum, global = true, default_value_t = FArg::Fidelity)]
    f_kind: FArg,

    /// Seed for optimiser starts and for the `random` sampler.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Optimiser starts per degenerate-block search.
    #[arg(long, global = true, default_value_t = 8)]
    multistart: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure for a state file; print a JSON report.
    Compute {
        /// Path to a JSON state file ({"dims": [...], "matrix": [[[re, im], ...], ...]}).
        #[arg(long)]
        input: PathBuf,

        /// Measure: q, qqc, qcq, qs, qs2, or discord.
        #[arg(long, default_value = "q")]
        measure: String,
    },

    /// Tabulate measures over a one-parameter state family as CSV.
    Sweep {
        /// State family; `bell-mix` mixes |01> with the symmetric Bell state.
        #[arg(long, default_value = "bell-mix")]
        family: String,

        /// First value of the family parameter.
        #[arg(long, default_value_t = 0.0)]
        from: f64,

        /// Last value of the family parameter.
        #[arg(long, default_value_t = 1.0)]
        to: f64,

        /// Number of grid points (at least 2).
        #[arg(long, default_value_t = 101)]
        steps: usize,

        /// Comma-separated measures, or `all`.
        #[arg(long, default_value = "all")]
        measures: String,

        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },

    /// Evaluate a measure on random states and print a summary.
    Random {
        /// State sampler.
        #[arg(long, value_enum, default_value_t = SamplerArg::Mixed)]
        sampler: SamplerArg,

        /// Number of states to draw.
        #[arg(long, default_value_t = 100)]
        count: usize,

        /// Subsystem dimensions, e.g. 2x2 or 2x2x2.
        #[arg(long, default_value = "2x2")]
        dims: String,

        /// Measure: q, qqc, qcq, qs, qs2, or discord.
        #[arg(long, default_value = "q")]
        measure: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sequential,
    Joint,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairsArg {
    Unordered,
    Ordered,
}

#[derive(Clone, Copy, ValueEnum)]
enum FArg {
    Fidelity,
    Entropy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerArg {
    Mixed,
    Pure,
    Classical,
}

impl SamplerArg {
    fn name(self) -> &'static str {
        match self {
            SamplerArg::Mixed => "mixed",
            SamplerArg::Pure => "pure",
            SamplerArg::Classical => "classical",
        }
    }
}

/// The measures the CLI can evaluate, in canonical column order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Measure {
    QTotal,
    QQc,
    QCq,
    QStrict,
    QStrictTwoQubit,
    DiscordA,
}

const ALL_MEASURES: [Measure; 6] = [
    Measure::QTotal,
    Measure::QQc,
    Measure::QCq,
    Measure::QStrict,
    Measure::QStrictTwoQubit,
    Measure::DiscordA,
];

impl Measure {
    fn column_name(self) -> &'static str {
        match self {
            Measure::QTotal => "q_total",
            Measure::QQc => "q_qc",
            Measure::QCq => "q_cq",
            Measure::QStrict => "q_s",
            Measure::QStrictTwoQubit => "q_s2",
            Measure::DiscordA => "discord_a",
        }
    }

    fn parse(text: &str) -> Result<Measure, Error> {
        match text.trim().to_ascii_lowercase().as_str() {
            "q" | "q_total" | "qtotal" => Ok(Measure::QTotal),
            "qqc" | "q_qc" => Ok(Measure::QQc),
            "qcq" | "q_cq" => Ok(Measure::QCq),
            "qs" | "q_s" => Ok(Measure::QStrict),
            "qs2" | "q_s2" => Ok(Measure::QStrictTwoQubit),
            "discord" | "discord_a" => Ok(Measure::DiscordA),
            other => Err(Error::InvalidParameter {
                context: format!(
                    "unknown measure {other:?}; expected q, qqc, qcq, qs, qs2, or discord"
                ),
            }),
        }
    }
}

/// Parse a comma-separated measure list (or `all`) into canonical order
/// without duplicates.
fn parse_measure_list(text: &str) -> Result<Vec<Measure>, Error> {
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(ALL_MEASURES.to_vec());
    }
    let mut measures = Vec::new();
    for part in text.split(',') {
        let measure = Measure::parse(part)?;
        if !measures.contains(&measure) {
            measures.push(measure);
        }
    }
    if measures.is_empty() {
        return Err(Error::InvalidParameter {
            context: "empty measure list".into(),
        });
    }
    measures.sort();
    Ok(measures)
}

fn parse_dims(text: &str) -> Result<Vec<usize>, Error> {
    let dims: Vec<usize> = text
        .split(['x', 'X'])
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter {
                    context: format!("bad dims {text:?}; expected e.g. 2x2 or 2x3"),
                })
        })
        .collect::<Result<_, _>>()?;
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::UnsupportedDims {
            context: format!("every subsystem dimension must be at least 2, got {dims:?}"),
        });
    }
    Ok(dims)
}

fn build_config(cli: &Cli) -> MeasureConfig {
    MeasureConfig {
        minimization_mode: match cli.mode {
            ModeArg::Sequential => MinimizationMode::Sequential,
            ModeArg::Joint => MinimizationMode::Joint,
        },
        nonorthogonality: NonOrthogonalityChoice {
            kind: match cli.f_kind {
                FArg::Fidelity => NonOrthogonalityKind::Fidelity,
                FArg::Entropy => NonOrthogonalityKind::Entropy,
            },
            pairs: match cli.pairs {
                PairsArg::Unordered => PairConvention::Unordered,
                PairsArg::Ordered => PairConvention::Ordered,
            },
        },
        optimizer: OptimizerConfig {
            seed: cli.seed,
            multistart: cli.multistart,
            ..OptimizerConfig::default()
        },
        ..MeasureConfig::default()
    }
}

/// Evaluate `measure` on `rho`, returning the value and, for the measures
/// that have one, the term-by-term report.
///
/// `q` and `qs` dispatch on the subsystem count: two subsystems get the
/// bipartite forms, three or more the multipartite ones.
fn evaluate_measure(
    measure: Measure,
    rho: &DensityMatrix,
    cfg: &MeasureConfig,
) -> Result<(f64, Option<MeasureReport>), Error> {
    match measure {
        Measure::QTotal => {
            let report = if rho.subsystem_count() == 2 {
                q_total(rho, cfg)?
            } else {
                q_multipartite(rho, cfg)?
            };
            Ok((report.value, Some(report)))
        }
        Measure::QQc => q_one_sided(rho, Side::A, cfg).map(|r| (r.value, Some(r))),
        Measure::QCq => q_one_sided(rho, Side::B, cfg).map(|r| (r.value, Some(r))),
        Measure::QStrict => {
            if rho.subsystem_count() == 2 {
                q_strict(rho, cfg).map(|v| (v, None))
            } else {
                q_strict_multipartite(rho, cfg).map(|v| (v, None))
            }
        }
        Measure::QStrictTwoQubit => q_strict_two_qubit(rho, cfg).map(|v| (v, None)),
        Measure::DiscordA => discord_a(rho, &DiscordGrid::default()).map(|v| (v, None)),
    }
}

fn cmd_compute(input: &Path, measure: Measure, cfg: &MeasureConfig) -> Result<(), Error> {
    let rho = read_state_file(input)?;
    let (value, report) = evaluate_measure(measure, &rho, cfg)?;

    let mut doc = serde_json::json!({
        "measure": measure.column_name(),
        "dims": rho.dims(),
        "value": value,
    });
    if let Some(report) = report {
        let diag = &report.optimizer_diagnostics;
        let decomposition = &report.decomposition_used;
        doc["terms"] = serde_json::json!({
            "entanglement": report.entanglement_term,
            "nonorthogonality": report.nonorthogonality_terms,
        });
        doc["optimizer"] = serde_json::json!({
            "starts_used": diag.starts_used,
            "best_objective": diag.best_objective,
            "block_entanglement": diag.block_entanglement,
            "converged": diag.converged,
        });
        doc["decomposition"] = serde_json::json!({
            "eigenvalues": decomposition.eigenvalues_flat(),
            "block_multiplicities":
                decomposition.blocks().iter().map(|b| b.multiplicity()).collect::<Vec<_>>(),
        });
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("report serialises")
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    family: &str,
    from: f64,
    to: f64,
    steps: usize,
    measures: &str,
    output: Option<&Path>,
    cfg: &MeasureConfig,
) -> Result<(), Error> {
    if family != "bell-mix" {
        return Err(Error::InvalidParameter {
            context: format!("unknown family {family:?}; expected bell-mix"),
        });
    }
    if !(from.is_finite()
        && to.is_finite()
        && (0.0..=1.0).contains(&from)
        && from <= to
        && to <= 1.0)
    {
        return Err(Error::InvalidParameter {
            context: format!("need 0 <= from <= to <= 1, got from={from} to={to}"),
        });
    }
    if steps < 2 {
        return Err(Error::InvalidParameter {
            context: format!("need at least 2 steps, got {steps}"),
        });
    }
    let measures = parse_measure_list(measures)?;

    let mut text = String::from("a");
    for measure in &measures {
        text.push(',');
        text.push_str(measure.column_name());
    }
    text.push('\n');

    // Rows are computed in parallel but collected in grid order, so the
    // output bytes do not depend on the degree of parallelism.
    let rows: Vec<String> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let a = from + (to - from) * i as f64 / (steps - 1) as f64;
            let rho = bell_mixture(a).expect("grid point lies in [0, 1]");
            let mut row = format!("{a:.9}");
            for measure in &measures {
                let (value, _) = evaluate_measure(*measure, &rho, cfg)
                    .expect("every measure supports the two-qubit family");
                row.push_str(&format!(",{value:.9}"));
            }
            row.push('\n');
            row
        })
        .collect();
    for row in rows {
        text.push_str(&row);
    }

    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_random(
    sampler: SamplerArg,
    count: usize,
    dims_text: &str,
    measure: Measure,
    seed: u64,
    cfg: &MeasureConfig,
) -> Result<(), Error> {
    let dims = parse_dims(dims_text)?;
    if count == 0 {
        return Err(Error::InvalidParameter {
            context: "count must be at least 1".into(),
        });
    }

    let mut rng = sampling::rng(seed);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut violations = 0usize;

    for _ in 0..count {
        // For pure states the measure should reduce to the pure-state
        // entanglement itself; remember that reference value.
        let (rho, pure_reference) = match sampler {
            SamplerArg::Mixed => (sampling::random_density(&mut rng, &dims), None),
            SamplerArg::Classical => (sampling::random_strictly_classical(&mut rng, &dims), None),
            SamplerArg::Pure => {
                let phi = sampling::random_pure(&mut rng, &dims);
                let reference = if measure == Measure::QTotal && dims.len() >= 2 {
                    Some(multipartite_pure_entanglement(&phi)?)
                } else {
                    None
                };
                (
                    DensityMatrix::new(phi.projector(), dims.clone())?,
                    reference,
                )
            }
        };
        let (value, _) = evaluate_measure(measure, &rho, cfg)?;

        if value < -NONNEGATIVITY_SLACK {
            violations += 1;
        }
        if let Some(reference) = pure_reference {
            if (value - reference).abs() > PURE_REDUCTION_TOLERANCE {
                violations += 1;
            }
        }
        min = min.min(value);
        max = max.max(value);
        sum += value;
    }

    println!(
        "sampler={} dims={} count={} seed={} measure={}",
        sampler.name(),
        dims.iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x"),
        count,
        seed,
        measure.column_name(),
    );
    println!(
        "min={:.9} mean={:.9} max={:.9} violations={}",
        min,
        sum / count as f64,
        max,
        violations
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = build_config(cli);
    match &cli.command {
        Command::Compute { input, measure } => {
            let measure = Measure::parse(measure)?;
            cmd_compute(input, measure, &cfg)
        }
        Command::Sweep {
            family,
            from,
            to,
            steps,
            measures,
            output,
        } => cmd_sweep(
            family,
            *from,
            *to,
            *steps,
            measures,
            output.as_deref(),
            &cfg,
        ),
        Command::Random {
            sampler,
            count,
            dims,
            measure,
        } => {
            let measure = Measure::parse(measure)?;
            cmd_random(*sampler, *count, dims, measure, cli.seed, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::UnsupportedDims { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_parsing_accepts_aliases() {
        assert_eq!(Measure::parse("q").unwrap(), Measure::QTotal);
        assert_eq!(Measure::parse("Q_TOTAL").unwrap(), Measure::QTotal);
        assert_eq!(Measure::parse("qqc").unwrap(), Measure::QQc);
        assert_eq!(Measure::parse("q_cq").unwrap(), Measure::QCq);
        assert_eq!(Measure::parse("qs").unwrap(), Measure::QStrict);
        assert_eq!(Measure::parse("q_s2").unwrap(), Measure::QStrictTwoQubit);
        assert_eq!(Measure::parse("discord_a").unwrap(), Measure::DiscordA);
        assert!(Measure::parse("entropy").is_err());
    }

    #[test]
    fn measure_lists_deduplicate_and_keep_canonical_order() {
        let all = parse_measure_list("all").unwrap();
        assert_eq!(all, ALL_MEASURES.to_vec());
        let picked = parse_measure_list("discord, q_total, discord_a").unwrap();
        assert_eq!(picked, vec![Measure::QTotal, Measure::DiscordA]);
        assert!(parse_measure_list("q_total,entropy").is_err());
        assert!(parse_measure_list("").is_err());
    }

    #[test]
    fn dims_parsing_handles_separators_and_rejects_degenerate_entries() {
        assert_eq!(parse_dims("2x2").unwrap(), vec![2, 2]);
        assert_eq!(parse_dims("2X3x4").unwrap(), vec![2, 3, 4]);
        assert!(matches!(
            parse_dims("2x1"),
            Err(Error::UnsupportedDims { .. })
        ));
        assert!(matches!(
            parse_dims("two"),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            parse_dims(""),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn flags_reach_the_config() {
        let cli = Cli::parse_from([
            "qcorr",
            "random",
            "--mode",
            "joint",
            "--pairs",
            "ordered",
            "--f",
            "entropy",
            "--seed",
            "7",
            "--multistart",
            "3",
        ]);
        let cfg = build_config(&cli);
        assert_eq!(cfg.minimization_mode, MinimizationMode::Joint);
        assert_eq!(cfg.nonorthogonality.pairs, PairConvention::Ordered);
        assert_eq!(cfg.nonorthogonality.kind, NonOrthogonalityKind::Entropy);
        assert_eq!(cfg.optimizer.seed, 7);
        assert_eq!(cfg.optimizer.multistart, 3);
    }
}
