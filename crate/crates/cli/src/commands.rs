use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use cuspdiff::arith::primes_up_to;
use cuspdiff::gl2count::{
    self, card_a, card_a_bruteforce, card_c, card_c_bruteforce, count_det_trace, count_quadratic_roots,
    kernel_count_check, product_pair_count, quadratic_counts_bruteforce, sample_trace_equal_frequency,
    DetTraceTable, ENUMERATION_BUDGET,
};
use cuspdiff::lab::{
    congruence_search, export_report, run_experiment, ExperimentSpec, ReportFormat, SignMode,
};
use cuspdiff::richert::{bounds, positivity_threshold, F_value, SieveFamily};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::CliConfig;
use crate::CliError;

/// Pairs of weights exercised by `gl2 verify`.
const VERIFY_PAIRS: [(u32, u32); 3] = [(12, 16), (12, 18), (16, 22)];

fn emit(value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Check(format!("json encoding failed: {e}")))?;
    text.push('\n');
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Io {
            path: "<stdout>".into(),
            source: e,
        })
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct CoeffsArgs {
    /// Weight, one of 12, 16, 18, 20, 22, 26
    #[arg(long)]
    pub weight: u32,
    /// Number of terms; prints a(0) through a(N-1)
    #[arg(long = "n", value_name = "N")]
    pub n_terms: usize,
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    pub format: TableFormat,
}

pub fn coeffs(args: &CoeffsArgs, config: &CliConfig) -> Result<(), CliError> {
    let f = config.cache().eigenform(args.weight, args.n_terms)?;
    let coefficients: Vec<String> = f.series().coeffs().iter().map(|c| c.to_string()).collect();
    match args.format {
        TableFormat::Json => emit(&json!({
            "weight": args.weight,
            "n_terms": args.n_terms,
            "coefficients": coefficients,
        })),
        TableFormat::Csv => {
            let mut out = String::from("n,a_n\n");
            for (n, c) in coefficients.iter().enumerate() {
                out.push_str(&format!("{n},{c}\n"));
            }
            print!("{out}");
            Ok(())
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Gl2Command {
    /// Compare every closed-form count with exhaustive enumeration
    Verify {
        /// Check all odd primes up to this bound
        #[arg(long)]
        ell_max: u64,
        /// Exponent of the modulus, 1 or 2
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
        n: u32,
    },
    /// Exact trace-equal density, optionally with a Monte-Carlo estimate
    Delta {
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        k1: u32,
        #[arg(long)]
        k2: u32,
        /// Number of random pairs to draw
        #[arg(long, value_name = "TRIALS")]
        sample: Option<u64>,
        /// Sampling seed; falls back to the configured seed
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Serialize)]
struct Case {
    check: &'static str,
    ell: u64,
    n: u32,
    args: String,
    formula: String,
    enumerated: String,
    pass: bool,
}

struct Cases(Vec<Case>);

impl Cases {
    fn push(&mut self, check: &'static str, ell: u64, n: u32, args: String, formula: impl ToString, enumerated: impl ToString) {
        let (formula, enumerated) = (formula.to_string(), enumerated.to_string());
        let pass = formula == enumerated;
        self.0.push(Case { check, ell, n, args, formula, enumerated, pass });
    }
}

fn pow_mod(v: u64, e: u32, m: u64) -> u64 {
    (0..e).fold(1 % m, |acc, _| acc * v % m)
}

fn verify_prime(ell: u64, n: u32, cases: &mut Cases) -> Result<(), CliError> {
    let table = DetTraceTable::build(ell, n)?;
    let m = table.modulus();
    for d in (1..m).filter(|d| d % ell != 0) {
        for t in 0..m {
            cases.push("count_det_trace", ell, n, format!("d={d} t={t}"), count_det_trace(ell, n, d, t)?, table.get(d, t));
        }
    }
    for (k1, k2) in VERIFY_PAIRS {
        let args = format!("k1={k1} k2={k2}");
        cases.push("card_a", ell, n, args.clone(), card_a(ell, n, k1, k2)?, card_a_bruteforce(ell, n, k1, k2)?);
        let oracle = match card_c_bruteforce(ell, n, k1, k2) {
            Ok(c) => c,
            // Too many pairs to walk: sum products of enumerated class sizes instead.
            Err(cuspdiff::Error::BudgetExceeded { .. }) => {
                let linked: HashSet<(u64, u64)> = (1..m)
                    .filter(|v| v % ell != 0)
                    .map(|v| (pow_mod(v, k1 - 1, m), pow_mod(v, k2 - 1, m)))
                    .collect();
                linked
                    .iter()
                    .flat_map(|&(d1, d2)| (0..m).map(move |t| (d1, d2, t)))
                    .map(|(d1, d2, t)| table.get(d1, t) as u128 * table.get(d2, t) as u128)
                    .sum()
            }
            Err(e) => return Err(e.into()),
        };
        cases.push("card_c", ell, n, args, card_c(ell, n, k1, k2)?, oracle);
    }
    if n == 2 {
        for t in 0..m {
            for d in (1..m).filter(|d| d % ell != 0) {
                let f = count_quadratic_roots(ell, t, d)?;
                let b = quadratic_counts_bruteforce(ell, t, d)?;
                cases.push("quadratic_roots", ell, n, format!("t={t} d={d}"), format!("{f:?}"), format!("{b:?}"));
            }
        }
        for d in (1..m).filter(|d| d % ell == 1) {
            cases.push("kernel_count", ell, n, format!("d={d}"), ell.pow(3), kernel_count_check(ell, 2, d)?);
        }
        cases.push("zero_divisor_pairs", ell, n, "bc=0".into(), 3 * ell * ell - 2 * ell, product_pair_count(ell, 0)?);
    }
    Ok(())
}

fn gl2_verify(ell_max: u64, n: u32) -> Result<(), CliError> {
    let ells: Vec<u64> = primes_up_to(ell_max).into_iter().filter(|&p| p > 2).collect();
    if ells.is_empty() {
        return Err(CliError::Usage(format!("--ell-max {ell_max} contains no odd prime")));
    }
    if let Some(&big) = ells.iter().find(|&&l| l.pow(n) > ENUMERATION_BUDGET) {
        return Err(cuspdiff::Error::BudgetExceeded {
            modulus: big.pow(n),
            budget: ENUMERATION_BUDGET,
        }
        .into());
    }
    let mut cases = Cases(Vec::new());
    for &ell in &ells {
        verify_prime(ell, n, &mut cases)?;
    }
    let failed = cases.0.iter().filter(|c| !c.pass).count();
    emit(&json!({
        "ell_max": ell_max,
        "n": n,
        "passed": cases.0.len() - failed,
        "failed": failed,
        "cases": cases.0,
    }))?;
    if failed > 0 {
        return Err(CliError::Check(format!("{failed} closed-form counts differ from enumeration")));
    }
    Ok(())
}

pub fn gl2(cmd: &Gl2Command, config: &CliConfig) -> Result<(), CliError> {
    match *cmd {
        Gl2Command::Verify { ell_max, n } => gl2_verify(ell_max, n),
        Gl2Command::Delta { ell, n, k1, k2, sample, seed } => {
            let counts = gl2count::image_counts(ell, n, k1, k2)?;
            let delta = counts.delta.to_f64().unwrap_or(f64::NAN);
            let modulus = counts.params.modulus();
            let mut out = json!({
                "ell": ell,
                "n": n,
                "k1": k1,
                "k2": k2,
                "modulus": modulus,
                "card_a": counts.card_a.to_string(),
                "card_c": counts.card_c.to_string(),
                "delta": counts.delta.to_string(),
                "delta_f64": delta,
                "delta_times_modulus": delta * modulus as f64,
            });
            if let Some(trials) = sample {
                let seed = seed.unwrap_or(config.seed);
                let estimate = sample_trace_equal_frequency(ell, n, k1, k2, trials, seed)?
                    .to_f64()
                    .unwrap_or(f64::NAN);
                let sigma = (delta * (1.0 - delta) / trials as f64).sqrt();
                out["sample"] = json!({
                    "trials": trials,
                    "seed": seed,
                    "estimate": estimate,
                    "sigma": sigma,
                    "z": (estimate - delta) / sigma,
                });
            }
            emit(&out)
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum SieveCommand {
    /// Divisor-count bounds for weight K
    Bounds {
        #[arg(long)]
        k: u32,
    },
    /// Sieve function value at the family parameters for K, and the family's positivity threshold
    F {
        #[arg(long)]
        k: f64,
        /// Use the family for the total number of prime factors
        #[arg(long)]
        variant: bool,
    },
}

pub fn sieve(cmd: &SieveCommand) -> Result<(), CliError> {
    match *cmd {
        SieveCommand::Bounds { k } => emit(&bounds(k)?),
        SieveCommand::F { k, variant } => {
            let family = if variant { SieveFamily::OmegaVariant } else { SieveFamily::Main };
            let params = family.params_at(k)?;
            let value = F_value(&params)?;
            let threshold = positivity_threshold(family)?;
            emit(&json!({
                "family": family,
                "k": k,
                "params": params,
                "f": value,
                "positive": value > 0.0,
                "threshold": threshold,
                "expected_threshold": family.expected_root(),
            }))
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCommand {
    /// Build the per-prime difference table and every derived statistic
    Run(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub k1: u32,
    #[arg(long)]
    pub k2: u32,
    /// Consider primes p <= X
    #[arg(long)]
    pub x: u64,
    /// Tabulate a1(p) - a2(p) (minus) or a1(p) + a2(p) (plus)
    #[arg(long, default_value = "minus")]
    pub sign: SignMode,
    /// Moduli h for the divisibility counts, comma separated
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,6,12")]
    pub h_list: Vec<u64>,
    /// Primes l for the empirical density comparison, comma separated
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,11,13")]
    pub delta_ells: Vec<u64>,
    /// Exponent n of the comparison moduli l^n
    #[arg(long, default_value_t = 1)]
    pub delta_n: u32,
    /// Smallest prime in the sieving set
    #[arg(long, default_value_t = cuspdiff::lab::DEFAULT_SIEVE_FLOOR)]
    pub sieve_floor: u64,
    /// Report path; the format follows --format or else the extension
    #[arg(long)]
    pub out: PathBuf,
    /// Report format [default: csv for *.csv, json otherwise]
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
    /// Leave wall-clock timestamps out of the report
    #[arg(long)]
    pub no_timestamps: bool,
}

fn report_format(args: &ExperimentArgs) -> ReportFormat {
    match args.format {
        Some(TableFormat::Csv) => ReportFormat::Csv,
        Some(TableFormat::Json) => ReportFormat::Json,
        None if args.out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => ReportFormat::Csv,
        None => ReportFormat::Json,
    }
}

pub fn experiment(cmd: &ExperimentCommand, config: &CliConfig) -> Result<(), CliError> {
    let ExperimentCommand::Run(args) = cmd;
    let spec = ExperimentSpec {
        k1: args.k1,
        k2: args.k2,
        x: args.x,
        sign: args.sign,
        h_list: args.h_list.clone(),
        delta_ells: args.delta_ells.clone(),
        delta_n: args.delta_n,
        sieve_floor: args.sieve_floor,
        seed: config.seed,
    };
    let mut report = run_experiment(&spec, &config.lab())?;
    if args.no_timestamps {
        report.timestamps = None;
    }
    export_report(&report, report_format(args), &args.out)?;
    emit(&summary(&report, &args.out))
}

fn summary(report: &cuspdiff::ExperimentReport, out: &Path) -> Value {
    json!({
        "out": out.display().to_string(),
        "k1": report.k1,
        "k2": report.k2,
        "x": report.x,
        "sign": report.sign,
        "counts": report.counts,
        "certificates": report.certificates,
    })
}

#[derive(Args, Debug)]
pub struct CongruenceArgs {
    #[arg(long)]
    pub k1: u32,
    #[arg(long)]
    pub k2: u32,
    /// Primes used to form the candidate modulus
    #[arg(long, default_value_t = 100)]
    pub primes: usize,
    /// Further primes on which the candidate must divide the difference
    #[arg(long, default_value_t = 100)]
    pub confirm: usize,
}

pub fn congruence(args: &CongruenceArgs, config: &CliConfig) -> Result<(), CliError> {
    let report = congruence_search(args.k1, args.k2, args.primes, args.confirm, &config.lab())?;
    emit(&report)
}
