use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Result};
use num_traits::ToPrimitive;
use polyaforge::boltzmann::{sample_class_exact, sample_unrooted_exact, BoltzmannContext, RandomSource, UnrootedSample};
use polyaforge::crt::{crt_diameter_moment, crt_diameter_tail};
use polyaforge::enumeration::{brute_force_enumerate, CoeffTable, ObjectKind, TreeCounts};
use polyaforge::stats::{self, CensusMode};
use polyaforge::{DegreeSet, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::format::{output, real, rounded};
use crate::{CensusArg, ClassArg, Command, CountFormat, CrtCommand, OmegaArg, RunArgs};

/// Marks a failed `verify` run.
#[derive(Debug)]
pub struct VerificationFailed(pub usize);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

/// 1 for verification failures and runtime errors, 2 for invalid input.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::InvalidDegreeSet(..)
            | Error::UnsupportedSize { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidTolerance
            | Error::SizeLimitExceeded { .. }
            | Error::RadiusMismatch(..)
            | Error::Parse(_),
        ) => 2,
        _ => 1,
    }
}

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Count { omega, max_n, format, out } => {
            let omega = announce(&omega)?;
            count(&omega, max_n, format, out.as_deref())?;
        }
        Command::Sample { omega, n, count, run, class, stats_only, out } => {
            let omega = announce(&omega)?;
            let ctx = context(&omega, n, &run)?;
            let draws = with_pool(run.threads, || draw(&ctx, n, count, run.seed, class))?;
            write_samples(&draws, stats_only, out.as_deref())?;
        }
        Command::Verify { omega, max_n, seed } => {
            let omega = announce(&omega)?;
            let failed = verify(&omega, max_n, seed)?;
            if failed > 0 {
                return Err(VerificationFailed(failed).into());
            }
        }
        Command::DiamStats { omega, n, samples, run, out } => {
            let omega = announce(&omega)?;
            let ctx = context(&omega, max_of(&n), &run)?;
            let mut w = csv::Writer::from_writer(output(out.as_deref())?);
            w.write_record(["omega", "n", "sample_idx", "diameter"])?;
            let label = omega.to_string();
            for &size in &n {
                let sample = with_pool(run.threads, || stats::collect_diameters(&ctx, size, samples, run.seed))?;
                for (i, d) in sample.values.iter().enumerate() {
                    w.write_record([label.clone(), size.to_string(), i.to_string(), d.to_string()])?;
                }
            }
            w.flush()?;
        }
        Command::LocalStats { omega, k, n, samples, census, run, out } => {
            let omega = announce(&omega)?;
            let ctx = context(&omega, max_of(&n), &run)?;
            let mode = match census {
                CensusArg::Uniform => CensusMode::UniformVertex,
                CensusArg::All => CensusMode::AllVertices,
            };
            let mut w = csv::Writer::from_writer(output(out.as_deref())?);
            w.write_record(["code", "count", "n", "k"])?;
            for &size in &n {
                let dist = with_pool(run.threads, || stats::neighborhood_census(&ctx, size, k, samples, run.seed, mode))?;
                for (code, c) in &dist.counts {
                    w.write_record([code.to_string(), c.to_string(), size.to_string(), k.to_string()])?;
                }
            }
            w.flush()?;
        }
        Command::Calibrate { omega, n, samples, run, out } => {
            let omega = announce(&omega)?;
            let ctx = context(&omega, max_of(&n), &run)?;
            let (calib, _) = with_pool(run.threads, || stats::calibrate_scaling(&ctx, &n, samples, run.seed))?;
            let report = CalibrationReport {
                omega: omega.to_string(),
                e_hat: rounded(calib.e_hat),
                per_n: calib.per_n_estimates.iter().map(|(&k, &v)| (k, rounded(v))).collect(),
                per_n_stderr: calib.per_n_stderr.iter().map(|(&k, &v)| (k, rounded(v))).collect(),
                stderr: rounded(calib.stderr),
                samples,
                seed: run.seed,
            };
            let mut w = output(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Crt { command } => crt(command)?,
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CalibrationReport {
    omega: String,
    e_hat: f64,
    per_n: BTreeMap<usize, f64>,
    per_n_stderr: BTreeMap<usize, f64>,
    stderr: f64,
    samples: usize,
    seed: u64,
}

/// Validates the degree set and reports its period and smallest size.
fn announce(arg: &OmegaArg) -> Result<DegreeSet> {
    let omega = arg.omega.clone();
    omega.validate_degrees()?;
    let d = omega.shifted().period();
    eprintln!("omega {omega}: period d = {d}, minimal n = 2, sizes {}", omega.size_rule());
    Ok(omega)
}

fn context(omega: &DegreeSet, max_n: usize, run: &RunArgs) -> Result<BoltzmannContext> {
    Ok(BoltzmannContext::new(omega, max_n)?.with_method(run.method))
}

fn max_of(sizes: &[usize]) -> usize {
    sizes.iter().copied().max().unwrap_or(2)
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> polyaforge::Result<T> + Send) -> Result<T> {
    if threads == 0 {
        bail!(Error::InvalidArgument("--threads must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(job)?)
}

fn draw(ctx: &BoltzmannContext, n: usize, count: usize, seed: u64, class: ClassArg) -> polyaforge::Result<Vec<UnrootedSample>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomSource::new(seed, stats::stream_id(n, i)).rng();
            match class {
                ClassArg::Auto => sample_unrooted_exact(ctx, n, &mut rng),
                ClassArg::Fixed(c) => sample_class_exact(ctx, n, c, &mut rng),
            }
        })
        .collect()
}

fn write_samples(draws: &[UnrootedSample], stats_only: bool, out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    if stats_only {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["index", "diameter", "class", "attempts"])?;
        for (i, s) in draws.iter().enumerate() {
            c.write_record([i.to_string(), s.tree.diameter().to_string(), s.class.to_string(), s.attempts.to_string()])?;
        }
        c.flush()?;
    } else {
        for s in draws {
            writeln!(w, "{}", s.tree.to_ndjson())?;
        }
        w.flush()?;
    }
    Ok(())
}

fn count(omega: &DegreeSet, max_n: usize, format: CountFormat, out: Option<&Path>) -> Result<()> {
    let counts = TreeCounts::compute(omega, max_n)?;
    let mut w = output(out)?;
    let columns = ["n", "a_n", "s_n", "e_n", "v_n", "f_n", "identity_ok"];
    if let CountFormat::Csv = format {
        writeln!(w, "{}", columns.join(","))?;
    }
    for n in 0..=max_n {
        let values = [
            n.to_string(),
            counts.rooted().get(n).to_string(),
            counts.s().get(n).to_string(),
            counts.e().get(n).to_string(),
            counts.v().get(n).to_string(),
            counts.free().get(n).to_string(),
        ];
        // sizes 0 and 1 carry no cycle pointings; the identity is vacuous there
        let ok = n < 2 || counts.identity_holds(n);
        match format {
            CountFormat::Csv => writeln!(w, "{},{ok}", values.join(","))?,
            CountFormat::Json => {
                let fields: Vec<String> = columns[..6]
                    .iter()
                    .zip(&values)
                    .map(|(k, v)| format!("\"{k}\":{v}"))
                    .collect();
                writeln!(w, "{{{},\"identity_ok\":{ok}}}", fields.join(","))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn crt(command: CrtCommand) -> Result<()> {
    match command {
        CrtCommand::Tail { x, tol } => {
            println!("{}", real(crt_diameter_tail(x, tol)?.value));
        }
        CrtCommand::Moment { k } => {
            println!("{}", real(crt_diameter_moment::<f64>(k)?.value));
        }
        CrtCommand::Table { xmax, step, tol, out } => {
            if !(step > 0.0) || !(xmax >= 0.0) || !xmax.is_finite() {
                bail!(Error::InvalidArgument("need step > 0 and finite xmax >= 0".into()));
            }
            let points = (xmax / step + 1e-9).floor() as usize;
            let mut w = csv::Writer::from_writer(output(out.as_deref())?);
            w.write_record(["x", "tail"])?;
            for i in 0..=points {
                let x = i as f64 * step;
                w.write_record([real(x), real(crt_diameter_tail(x, tol)?.value)])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn verify(omega: &DegreeSet, max_n: usize, seed: u64) -> Result<usize> {
    if max_n < 2 {
        bail!(Error::InvalidArgument("--max-n must be >= 2".into()));
    }
    let mut report = Report::default();
    let counts = match TreeCounts::compute(omega, max_n) {
        Ok(c) => c,
        Err(e) => {
            report.check("identity", false, e.to_string());
            return Ok(report.finish());
        }
    };

    let bad: Vec<usize> = (2..=max_n).filter(|&n| !counts.identity_holds(n)).collect();
    report.check(
        "identity",
        bad.is_empty(),
        format!("n f_n = s_n + e_n + v_n for 2 <= n <= {max_n}; failures at {bad:?}"),
    );

    let d = omega.shifted().period();
    let rooted_off = (1..=max_n).filter(|&n| (n - 1) % d != 0 && !is_zero(counts.rooted(), n)).count();
    let free_off = (2..=max_n).filter(|&n| (n - 2) % d != 0 && !is_zero(counts.free(), n)).count();
    report.check(
        "periodicity",
        rooted_off == 0 && free_off == 0,
        format!("d = {d}; a_n off-lattice nonzero: {rooted_off}, f_n off-lattice nonzero: {free_off}"),
    );

    let oracle_max = max_n.min(9);
    let mut mismatches = Vec::new();
    for n in 1..=oracle_max {
        for (kind, table) in [
            (ObjectKind::Rooted, counts.rooted()),
            (ObjectKind::Free, counts.free()),
            (ObjectKind::S, counts.s()),
            (ObjectKind::E, counts.e()),
            (ObjectKind::V, counts.v()),
        ] {
            if n == 1 && kind != ObjectKind::Rooted && kind != ObjectKind::Free {
                continue;
            }
            let found = brute_force_enumerate(omega, n, kind)?.len();
            if table.get(n).to_usize() != Some(found) {
                mismatches.push(format!("{kind:?}@{n}"));
            }
        }
    }
    report.check(
        "oracle",
        mismatches.is_empty(),
        format!("DP vs brute force for n <= {oracle_max}; mismatches {mismatches:?}"),
    );

    let ctx = BoltzmannContext::new(omega, max_n)?;
    let rho = ctx.rho();
    let mut worst: f64 = 0.0;
    for k in 1..=max_n {
        let exact = counts.rooted().get(k);
        if is_zero(counts.rooted(), k) {
            continue;
        }
        let ln_exact = polyaforge::enumeration::big_ln(exact) + k as f64 * rho.ln();
        worst = worst.max((ctx.tables().a_hat(k).ln() - ln_exact).abs());
    }
    report.check(
        "sampler tables",
        worst < 1e-8,
        format!("max |log(a_k rho^k) error| = {}", real(worst)),
    );

    let sizes: Vec<usize> = (2..=max_n.min(40)).filter(|n| (n - 2) % d == 0).collect();
    let mut structural = 0;
    let mut failures = Vec::new();
    for &n in &sizes {
        for i in 0..20 {
            let mut rng = RandomSource::new(seed, stats::stream_id(n, i)).rng();
            let t = sample_unrooted_exact(&ctx, n, &mut rng)?.tree;
            structural += 1;
            let degrees_ok = (0..t.n()).all(|v| omega.contains(t.degree(v)));
            if t.n() != n || !degrees_ok || t.edges().len() + 1 != n {
                failures.push(n);
            }
        }
    }
    report.check(
        "sampler structure",
        failures.is_empty(),
        format!("{structural} samples with n <= {}; failures at {failures:?}", sizes.last().unwrap_or(&0)),
    );

    Ok(report.finish())
}

fn is_zero(table: &CoeffTable, n: usize) -> bool {
    num_traits::Zero::is_zero(table.get(n))
}

#[derive(Default)]
struct Report {
    passed: usize,
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    fn finish(self) -> usize {
        println!("verify: {} passed, {} failed", self.passed, self.failed);
        self.failed
    }
}
