//! `heisenberg`: compute Heisenberg-group invariants, recover orbits from
//! them and run seeded recovery experiments.
//!
//! Exit codes: 0 success, 1 verification negative, 2 input or format error,
//! 3 non-generic or degenerate input, 4 no convergence.

mod exit;
mod experiment;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use heisenberg_invariants::cyclic::{
    degree_audit, recover_cyclic_orbit, recover_weight12, recover_weighted, weighted_invariants,
    WeightedCyclicInvariants,
};
use heisenberg_invariants::pipeline::RecoveryOutcome;
use heisenberg_invariants::{
    heisenberg_invariants, is_generic, orbit_distance, recover_orbit, sample_random_signal,
    Complex64, ComplexVector, HeisenbergInvariants, PhaseRetrievalConfig, ToleranceConfig,
};
use serde::Deserialize;

use exit::{read_json, write_json, CmdResult, Failure, DEGENERATE, NEGATIVE, NO_CONVERGENCE, SUCCESS};

#[derive(Parser)]
#[command(name = "heisenberg", version, about = "Heisenberg-group invariants and orbit recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded complex Gaussian signal as JSON.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        output: PathBuf,
    },
    /// Compute the invariant bundle of a signal.
    Invariants {
        input: PathBuf,
        output: PathBuf,
        /// Fail with exit 3 if the signal is not generic.
        #[arg(long)]
        require_generic: bool,
    },
    /// Recover an orbit representative from an invariant bundle.
    Recover {
        invariants: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = PhaseRetrievalConfig::ORBIT_SEARCH_RESTARTS)]
        max_restarts: usize,
        /// Bound on the final invariant distance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Check whether two signals lie in the same orbit.
    Verify {
        x: PathBuf,
        x2: PathBuf,
        /// Relative to max(‖x‖, 1).
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Run a seeded Monte-Carlo recovery experiment and write a CSV report.
    Experiment {
        spec: PathBuf,
        csv: PathBuf,
        /// Fill the wall_ms column (makes the output nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Count global-phase-invariant monomials of degree d < N.
    DegreeAudit {
        #[arg(long)]
        max_n: usize,
        /// Also print the d = N column.
        #[arg(long)]
        include_boundary: bool,
    },
    /// Cyclic-group invariants and recovery.
    #[command(subcommand)]
    Cyclic(CyclicCommand),
}

#[derive(Subcommand)]
enum CyclicCommand {
    /// Weighted Z_3n invariants of a vector.
    WeightedInvariants { input: PathBuf, output: PathBuf },
    /// Recover a vector from its weighted Z_3n invariants.
    RecoverWeighted { input: PathBuf, output: PathBuf },
    /// Recover the cyclic-shift class of a signal via its spectrum's bispectrum.
    RecoverRegular { input: PathBuf, output: PathBuf },
    /// Recover (x1, x2) from the weight-(1, 2) circle invariants.
    RecoverWeight12 { input: PathBuf, output: PathBuf },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Weight12Input {
    r1: f64,
    r2: f64,
    a: ComplexInput,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexInput {
    re: f64,
    im: f64,
}

fn sample(n: usize, seed: u64, output: PathBuf) -> CmdResult {
    if n == 0 {
        return Err(Failure::input("n must be positive"));
    }
    write_json(&output, &sample_random_signal(n, seed))?;
    Ok(SUCCESS)
}

fn invariants(input: PathBuf, output: PathBuf, require_generic: bool) -> CmdResult {
    let x: ComplexVector = read_json(&input)?;
    let report = is_generic(&x, ToleranceConfig::default().genericity_floor);
    eprintln!(
        "generic: {} (min |ŷ[k]| = {:e}, min |ẑ[k]| = {:e}, failing ŷ {:?}, failing ẑ {:?})",
        report.generic,
        report.min_modulus_coefficient,
        report.min_fourier_modulus_coefficient,
        report.modulus_failures,
        report.fourier_modulus_failures
    );
    if require_generic && !report.generic {
        return Ok(DEGENERATE);
    }
    write_json(&output, &heisenberg_invariants(&x))?;
    Ok(SUCCESS)
}

fn recover(invariants: PathBuf, output: PathBuf, seed: u64, max_restarts: usize, tol: Option<f64>) -> CmdResult {
    let inv: HeisenbergInvariants = read_json(&invariants)?;
    let mut tolerances = ToleranceConfig::default();
    if let Some(t) = tol {
        tolerances.recovery_tol = t;
    }
    tolerances.validate()?;
    let cfg = PhaseRetrievalConfig {
        max_restarts,
        ..PhaseRetrievalConfig::for_orbit_search(seed)
    };
    cfg.validate()?;
    let report = recover_orbit(&inv, &cfg, &tolerances)?;
    write_json(&output, &report)?;
    for d in &report.diagnostics {
        eprintln!("{}: {}", d.stage, d.detail);
    }
    Ok(match report.outcome {
        RecoveryOutcome::Success => SUCCESS,
        RecoveryOutcome::NoConvergence => NO_CONVERGENCE,
        RecoveryOutcome::VerificationFailed => NEGATIVE,
    })
}

fn verify(x: PathBuf, x2: PathBuf, tol: f64) -> CmdResult {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Failure::input(format!("tol = {tol} must be finite and >= 0")));
    }
    let a: ComplexVector = read_json(&x)?;
    let b: ComplexVector = read_json(&x2)?;
    let (distance, witness) = orbit_distance(&a, &b)?;
    let equivalent = distance <= tol * a.norm().max(1.0);
    println!("distance {distance:e}");
    println!("witness {witness}");
    println!("equivalent {equivalent}");
    Ok(if equivalent { SUCCESS } else { NEGATIVE })
}

fn degree_table(max_n: usize, include_boundary: bool) -> CmdResult {
    if max_n < 2 {
        return Err(Failure::input("max-n must be at least 2"));
    }
    let last = if include_boundary { max_n } else { max_n - 1 };
    let header: Vec<String> = (1..=last).map(|d| format!("d={d}")).collect();
    println!("N\t{}", header.join("\t"));
    let mut all_zero = true;
    for n in 2..=max_n {
        let top = if include_boundary { n } else { n - 1 };
        let cells: Vec<String> = (1..=top)
            .map(|d| {
                let count = degree_audit(n, d);
                all_zero &= d == n || count == 0;
                count.to_string()
            })
            .collect();
        println!("{n}\t{}", cells.join("\t"));
    }
    Ok(if all_zero { SUCCESS } else { NEGATIVE })
}

fn cyclic(cmd: CyclicCommand) -> CmdResult {
    let tol = ToleranceConfig::default();
    match cmd {
        CyclicCommand::WeightedInvariants { input, output } => {
            let v: ComplexVector = read_json(&input)?;
            write_json(&output, &weighted_invariants(&v))?;
        }
        CyclicCommand::RecoverWeighted { input, output } => {
            let inv: WeightedCyclicInvariants = read_json(&input)?;
            write_json(&output, &recover_weighted(&inv, &tol)?)?;
        }
        CyclicCommand::RecoverRegular { input, output } => {
            let x: ComplexVector = read_json(&input)?;
            write_json(&output, &recover_cyclic_orbit(&x, &tol)?)?;
        }
        CyclicCommand::RecoverWeight12 { input, output } => {
            let w: Weight12Input = read_json(&input)?;
            let a = Complex64::new(w.a.re, w.a.im);
            write_json(&output, &recover_weight12(w.r1, w.r2, a, &tol)?)?;
        }
    }
    Ok(SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::BAD_INPUT } else { SUCCESS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = match cli.command {
        Command::Sample { n, seed, output } => sample(n, seed, output),
        Command::Invariants {
            input,
            output,
            require_generic,
        } => invariants(input, output, require_generic),
        Command::Recover {
            invariants,
            output,
            seed,
            max_restarts,
            tol,
        } => recover(invariants, output, seed, max_restarts, tol),
        Command::Verify { x, x2, tol } => verify(x, x2, tol),
        Command::Experiment { spec, csv, timing } => experiment::run(&spec, &csv, timing),
        Command::DegreeAudit {
            max_n,
            include_boundary,
        } => degree_table(max_n, include_boundary),
        Command::Cyclic(cmd) => cyclic(cmd),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code as u8)
        }
    }
}
