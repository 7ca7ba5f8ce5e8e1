//! Command-line front end for the `destab` library.
//!
//! Exit codes: `0` when the checked condition holds, `1` when it is
//! violated, `2` for malformed input or usage errors.

pub mod format;

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use destab::combinatorics::{
    f_atx, gaussian_binomial, maxp, partition_count, sum_check, verify_pascal, verify_q_identity,
};
use destab::p1::{classify, is_semistable_p1, k_values, validate_p1, P1Tensor};
use destab::poset::ordered_tuple_count;
use destab::stability::{
    check_k_semistable, constants, decide_destabilizing, is_critical, mu_via_gamma, mu_via_pivots,
    objective, r_value, reduce_destabilizer, Strictness,
};
use destab::{Error, Rat, DEFAULT_ENUMERATION_GUARD};
use num_traits::Signed;
use serde::Serialize;

use format::{
    rats_out, tuple_vec, CheckReport, ClassifyReport, DecisionOut, EvaluationOut, ExactRat,
    InstanceFile, KCheckOut, Number, P1File, P1Report, Problem, ReduceReport, RowOut,
};

/// Name of the environment variable overriding enumeration guards.
pub const GUARD_ENV: &str = "DESTAB_GUARD";

#[derive(Parser, Debug)]
#[command(
    name = "destab",
    version,
    about = "Exact stability checks for weighted filtrations of tensors"
)]
pub struct Cli {
    /// Include region-by-region minimisation details.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Add wall-clock timing to reports (makes output nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct StrictnessArgs {
    /// Check stability: a zero value also counts as a violation.
    #[arg(long, conflicts_with = "semi")]
    pub strict: bool,
    /// Check semistability (the default).
    #[arg(long)]
    pub semi: bool,
}

impl StrictnessArgs {
    fn get(self) -> Strictness {
        if self.strict {
            Strictness::Stable
        } else {
            Strictness::Semi
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate at the given weights, or decide whether some weights violate.
    Check {
        /// Instance file, or `-` for standard input.
        path: PathBuf,
        #[command(flatten)]
        strictness: StrictnessArgs,
    },
    /// Shrink a violating filtration to a locally minimal violating subfiltration.
    Reduce {
        /// Instance file, or `-` for standard input.
        path: PathBuf,
        #[command(flatten)]
        strictness: StrictnessArgs,
    },
    /// Partition counts and q-binomial identities.
    Comb {
        #[command(subcommand)]
        which: CombCommand,
    },
    /// Split rank-three tensors on the projective line.
    P1 {
        #[command(subcommand)]
        which: P1Command,
    },
}

#[derive(Subcommand, Debug)]
pub enum CombCommand {
    /// Partitions of N into exactly K parts.
    #[command(allow_negative_numbers = true)]
    Partitions { k: i64, n: i64 },
    /// Partitions of X into exactly A parts, each at most T.
    F { a: usize, t: usize, x: usize },
    /// Largest antichain of ordered A-tuples over T levels.
    Maxp { a: usize, t: usize },
    /// Gaussian binomial coefficient [N choose K]_q.
    #[command(allow_negative_numbers = true)]
    Qbinom { n: i64, k: i64 },
    /// Run the q-identity, the Pascal sweep and the sum check.
    Verify { a: usize, t: usize },
}

#[derive(Subcommand, Debug)]
pub enum P1Command {
    /// Decide one tensor, given as a file or inline.
    Check {
        /// Tensor file, or `-` for standard input.
        path: Option<PathBuf>,
        /// Degrees d1,d2,d3 (nondecreasing, summing to zero).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        degrees: Option<Vec<i64>>,
        /// Supported summands as digit triples, e.g. `133,122`.
        #[arg(long, value_delimiter = ',')]
        support: Option<Vec<String>>,
        /// Positive stability parameter as an integer or `p/q` (default 1).
        #[arg(long)]
        delta: Option<String>,
        #[command(flatten)]
        strictness: StrictnessArgs,
    },
    /// Decide every tensor with |d1| up to the bound.
    Classify {
        /// Largest |d1| to enumerate.
        #[arg(long)]
        bound: u32,
        /// Positive stability parameter as an integer or `p/q`.
        #[arg(long, default_value = "1")]
        delta: String,
        /// Only list semistable rows.
        #[arg(long)]
        semistable_only: bool,
    },
}

/// Result of a successful run, mapped to exit codes 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violated,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Holds => 0,
            Status::Violated => 1,
        }
    }

    fn from_violated(v: bool) -> Self {
        if v {
            Status::Violated
        } else {
            Status::Holds
        }
    }
}

/// Enumeration guard, from the environment when set.
pub fn guard() -> anyhow::Result<usize> {
    match std::env::var(GUARD_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{GUARD_ENV} must be a nonnegative integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_ENUMERATION_GUARD),
    }
}

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn label(path: &Path) -> String {
    if path.as_os_str() == "-" {
        "<stdin>".into()
    } else {
        path.display().to_string()
    }
}

/// Parses an instance; errors name the source and the line or field.
pub fn parse_instance(text: &str, source: &str) -> anyhow::Result<(InstanceFile, Problem)> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| anyhow!("{source}: {e}"))?;
    let problem = file.to_problem().map_err(|e| anyhow!("{source}: {e}"))?;
    Ok((file, problem))
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn elapsed(start: Instant, timing: bool) -> Option<u64> {
    timing.then(|| start.elapsed().as_millis() as u64)
}

/// Builds the report for `check`.
pub fn check_report(
    file: InstanceFile,
    p: &Problem,
    strictness: Strictness,
    trace: bool,
) -> anyhow::Result<CheckReport> {
    let consts = constants(&p.fs, &p.sp)?;
    let k_checks = check_k_semistable(&p.fs, &p.ps, &p.sp, strictness)?;
    let (evaluation, decision, violated) = match &p.weights {
        Some(w) => {
            let value = objective(&p.fs, &p.ps, w, &p.sp)?;
            let (r, pivot) = r_value(&p.fs, &p.ps, w)?;
            let limit = guard()?;
            let gamma = if ordered_tuple_count(p.fs.arity, p.fs.levels()) <= limit {
                Some(ExactRat(mu_via_gamma(&p.fs, &p.ps, w, limit)?))
            } else {
                None
            };
            let sign = value.signum();
            let violated = match strictness {
                Strictness::Semi => sign.is_lt(),
                Strictness::Stable => sign.is_le(),
            };
            let eval = EvaluationOut {
                weights: rats_out(w.as_slice()),
                value: Number::from(&value),
                r: ExactRat(r),
                attaining_pivot: tuple_vec(&pivot),
                mu: ExactRat(mu_via_pivots(&p.fs, &p.ps, w)?),
                mu_via_gamma: gamma,
                critical: is_critical(&p.fs, &p.ps, w)?,
            };
            (Some(eval), None, violated)
        }
        None => {
            let v = decide_destabilizing(&p.fs, &p.ps, &p.sp, strictness)?;
            let violated = v.violated() || v.subfiltration_violated();
            (None, Some(DecisionOut::new(&v, trace)), violated)
        }
    };
    Ok(CheckReport {
        command: "check".into(),
        strictness: strictness.into(),
        instance: file,
        constants: consts.iter().map(Number::from).collect(),
        k_checks: k_checks.iter().map(KCheckOut::from).collect(),
        evaluation,
        decision,
        violated,
        elapsed_ms: None,
    })
}

fn parse_support(tokens: &[String]) -> anyhow::Result<Vec<[usize; 3]>> {
    tokens
        .iter()
        .map(|tok| {
            let digits: Vec<usize> = tok
                .trim()
                .chars()
                .filter_map(|c| c.to_digit(10).map(|d| d as usize))
                .collect();
            if digits.len() != 3 || tok.trim().chars().count() != 3 {
                bail!("support entry {tok:?} must be three digits such as 133");
            }
            Ok([digits[0], digits[1], digits[2]])
        })
        .collect()
}

fn parse_delta(s: &str) -> anyhow::Result<Rat> {
    destab::parse_rat(s).map_err(|e| anyhow!("--delta: {e}"))
}

fn p1_tensor(
    path: &Option<PathBuf>,
    degrees: &Option<Vec<i64>>,
    support: &Option<Vec<String>>,
    delta: &Option<String>,
) -> anyhow::Result<P1Tensor> {
    let mut tensor = match path {
        Some(path) => {
            let text = read_input(path)?;
            let file: P1File =
                serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", label(path)))?;
            file.to_tensor()
        }
        None => {
            let (Some(d), Some(s)) = (degrees, support) else {
                bail!("p1 check needs a tensor file or both --degrees and --support");
            };
            let [d1, d2, d3] = d[..] else {
                bail!("--degrees needs exactly three values")
            };
            P1Tensor::new([d1, d2, d3], parse_support(s)?, destab::arith::int(1))
        }
    };
    if let Some(d) = delta {
        tensor.delta = parse_delta(d)?;
    }
    validate_p1(&tensor)?;
    Ok(tensor)
}

/// Runs a parsed command line, writing the report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<Status> {
    let start = Instant::now();
    match &cli.command {
        Command::Check { path, strictness } => {
            let (file, problem) = parse_instance(&read_input(path)?, &label(path))?;
            let mut report = check_report(file, &problem, strictness.get(), cli.trace)?;
            report.elapsed_ms = elapsed(start, cli.timing);
            emit(out, &report)?;
            Ok(Status::from_violated(report.violated))
        }
        Command::Reduce { path, strictness } => {
            let (file, problem) = parse_instance(&read_input(path)?, &label(path))?;
            let red = match reduce_destabilizer(
                &problem.fs,
                &problem.ps,
                &problem.sp,
                strictness.get(),
            ) {
                Err(Error::NotViolating) => bail!(
                    "{}: the filtration does not violate; nothing to reduce",
                    label(path)
                ),
                other => other?,
            };
            let mut report = ReduceReport::new(file, strictness.get(), &red, cli.trace);
            report.elapsed_ms = elapsed(start, cli.timing);
            emit(out, &report)?;
            Ok(Status::Violated)
        }
        Command::Comb { which } => run_comb(which, out),
        Command::P1 { which } => match which {
            P1Command::Check {
                path,
                degrees,
                support,
                delta,
                strictness,
            } => {
                let tensor = p1_tensor(path, degrees, support, delta)?;
                let verdict = is_semistable_p1(&tensor, strictness.get())?;
                let report = P1Report::new(&tensor, &k_values(&tensor), &verdict, cli.trace);
                emit(out, &report)?;
                Ok(Status::from_violated(!report.semistable))
            }
            P1Command::Classify {
                bound,
                delta,
                semistable_only,
            } => {
                let delta = parse_delta(delta)?;
                if !delta.is_positive() {
                    bail!("--delta must be positive");
                }
                let rows = classify(&delta, *bound)?;
                let mut semistable_degrees: Vec<[i64; 3]> = rows
                    .iter()
                    .filter(|r| r.semistable)
                    .map(|r| r.degrees)
                    .collect();
                semistable_degrees.dedup();
                let report = ClassifyReport {
                    command: "p1 classify".into(),
                    delta: ExactRat(delta),
                    bound: *bound,
                    semistable_degrees,
                    rows: rows
                        .iter()
                        .filter(|r| r.semistable || !semistable_only)
                        .map(RowOut::from)
                        .collect(),
                };
                emit(out, &report)?;
                Ok(Status::Holds)
            }
        },
    }
}

fn run_comb(which: &CombCommand, out: &mut dyn Write) -> anyhow::Result<Status> {
    match *which {
        CombCommand::Partitions { k, n } => writeln!(out, "{}", partition_count(k, n))?,
        CombCommand::F { a, t, x } => {
            if a < 1 || t < 1 {
                bail!("a and t must be at least 1");
            }
            writeln!(out, "{}", f_atx(a, t, x))?
        }
        CombCommand::Maxp { a, t } => {
            if a < 1 || t < 1 {
                bail!("a and t must be at least 1");
            }
            writeln!(out, "{}", maxp(a, t))?
        }
        CombCommand::Qbinom { n, k } => writeln!(out, "{}", gaussian_binomial(n, k)?)?,
        CombCommand::Verify { a, t } => {
            let id = verify_q_identity(a, t)?;
            let mut ok = id.holds();
            writeln!(out, "q-identity ({a},{t}): {}", pass(id.holds()))?;
            writeln!(out, "  binomial:   {}", id.binomial)?;
            writeln!(out, "  generating: {}", id.generating)?;
            if a >= 2 && t >= 2 {
                let checks: Vec<bool> = (a..=a * t)
                    .map(|x| verify_pascal(a, t, x))
                    .collect::<Result<_, _>>()?;
                let all = checks.iter().all(|&c| c);
                ok &= all;
                writeln!(
                    out,
                    "pascal recurrence over {} sums: {}",
                    checks.len(),
                    pass(all)
                )?;
            } else {
                writeln!(out, "pascal recurrence: skipped (needs a, t >= 2)")?;
            }
            let s = sum_check(a, t)?;
            ok &= s.holds();
            writeln!(
                out,
                "sum check: {} (total {}, binomial {}, maximum {} at {})",
                pass(s.holds()),
                s.total,
                s.binomial,
                s.max_value,
                s.predicted_argmax
            )?;
            writeln!(out, "{}", pass(ok))?;
            return Ok(Status::from_violated(!ok));
        }
    }
    Ok(Status::Holds)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}
