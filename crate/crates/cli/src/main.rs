use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use relpow_core::absindex::{j_alpha_divisibility, sweep_tuples};
use relpow_core::pipeline::{
    exit_code, intersection_grid, intersection_item, parse_jobs, run_job, scan_c, thresholds,
    verify, JobOutcome, SCHEMA,
};
use relpow_core::rug::Rational;
use relpow_core::{Error, RingSpec};

const CHECKPOINT_EVERY: usize = 100;

#[derive(Parser)]
#[command(
    name = "relpow",
    version,
    about = "Relative power integral bases in the quartic family t^4 - 2ct^3 + 2t^2 + 2ct + 1"
)]
struct Cli {
    /// Default working precision in bits.
    #[arg(long, global = true, env = "RELPOW_PREC", default_value_t = 512)]
    prec: u32,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide one parameter c and list the generators.
    Verify {
        #[arg(long = "D")]
        d: u64,
        /// Element as a+b*w.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Brute-force checks over every c of a disk.
    Scan {
        #[arg(long = "D")]
        d: u64,
        #[arg(long)]
        radius: i64,
        /// Largest index for the intersection search.
        #[arg(long, default_value_t = 12)]
        mmax: u64,
        /// Search radius for Pellian and Thue solutions.
        #[arg(long = "H", default_value_t = 3)]
        h: i64,
    },
    /// Recompute and certify the global constants.
    Thresholds,
    /// Reductions plus direct search for every c of a job file (`D element` per line).
    Reduce {
        #[arg(long)]
        jobs: PathBuf,
        /// State file, written every 100 items.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Skip the items already recorded in the state file.
        #[arg(long)]
        resume: bool,
    },
    /// Divisibility verdicts for the absolute index over a parameter box.
    Absindex {
        #[arg(long = "D")]
        d: u64,
        #[arg(long, default_value_t = 3)]
        pmax: i64,
        #[arg(long, default_value_t = 3)]
        qmax: i64,
        #[arg(long, default_value_t = 3)]
        bmax: i64,
    },
}

#[derive(Serialize, Deserialize, Default)]
struct Checkpoint {
    jobs: String,
    completed: usize,
    failed: usize,
    worst_exit: i32,
}

fn emit<T: Serialize>(out: &mut impl Write, v: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)
}

fn worse(a: i32, b: i32) -> i32 {
    // an anomaly outranks precision trouble, which outranks bad input
    let rank = |c: i32| match c {
        2 => 3,
        3 => 2,
        4 => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn cmd_verify(d: u64, c: &str, prec: u32) -> Result<i32, Error> {
    let ring = RingSpec::new(d)?;
    let c = ring.parse(c)?;
    let rep = verify(&c, prec)?;
    emit(&mut io::stdout().lock(), &rep).map_err(io_err)?;
    eprintln!(
        "D={} c={}: {:?}, closed={}, {} generator class(es){}",
        d,
        c,
        rep.classification,
        rep.closed,
        rep.generators.len(),
        rep.witness
            .as_ref()
            .map(|w| format!(", open: {w}"))
            .unwrap_or_default()
    );
    for g in &rep.generators {
        eprintln!("  {g}");
    }
    Ok(0)
}

fn cmd_scan(d: u64, radius: i64, mmax: u64, h: i64) -> Result<i32, Error> {
    let ring = RingSpec::new(d)?;
    if radius < 0 || h < 0 {
        return Err(Error::Domain("radius and H must be nonnegative".into()));
    }
    if mmax > relpow_core::oracle::MAX_DEGREE {
        return Err(Error::Domain(format!(
            "mmax must be at most {}",
            relpow_core::oracle::MAX_DEGREE
        )));
    }
    let r = Rational::from(radius);
    let hh = Rational::from(h);
    let cs = ring.enumerate_disk(&Rational::from(radius * radius));
    let items: Vec<_> = cs
        .par_iter()
        .map(|c| scan_c(c, &hh))
        .collect::<Result<_, _>>()?;
    let grid = intersection_grid(mmax);
    let inter: Vec<_> = grid
        .par_iter()
        .map(|&(m, n, s)| intersection_item(&ring, &r, m, n, s))
        .collect::<Result<_, _>>()?;
    let mut out = io::stdout().lock();
    let mut anomalies = 0usize;
    for it in &items {
        anomalies += it.anomalies.len();
        emit(&mut out, it).map_err(io_err)?;
    }
    for it in inter.iter().filter(|i| !i.roots.is_empty()) {
        anomalies += it.unexpected.len();
        emit(&mut out, it).map_err(io_err)?;
    }
    let flagged: Vec<String> = items
        .iter()
        .filter(|i| i.classification == relpow_core::pipeline::Classification::InSc)
        .map(|i| i.c.to_string())
        .collect();
    emit(
        &mut out,
        &serde_json::json!({"schema": SCHEMA, "summary": "scan", "D": d, "radius": radius, "mmax": mmax, "H": h,
            "parameters": items.len(), "index_pairs": inter.len(), "flagged_exceptional": flagged, "anomalies": anomalies}),
    )
    .map_err(io_err)?;
    eprintln!(
        "scan D={d} R={radius}: {} parameters, {} index pairs, {} anomalies",
        items.len(),
        inter.len(),
        anomalies
    );
    Ok(if anomalies > 0 { 2 } else { 0 })
}

fn cmd_thresholds(prec: u32) -> Result<i32, Error> {
    let rep = thresholds(prec.max(128))?;
    emit(&mut io::stdout().lock(), &rep).map_err(io_err)?;
    let ok = !rep.sign_change.0.positive
        && rep.sign_change.1.positive
        && !rep.exclusion_fails_below.excludes
        && rep.exclusion_at.excludes
        && rep.samples.iter().all(|s| s.excludes)
        && rep.bw.constant_below_8_6e34
        && rep.bw.m_cap_certified
        && rep.bw.n_cap_certified;
    eprintln!(
        "2 - lambda: {} at {}, {} at {}",
        rep.sign_change.0.two_minus_lambda,
        rep.sign_change.0.c_abs,
        rep.sign_change.1.two_minus_lambda,
        rep.sign_change.1.c_abs
    );
    if let Some(m) = &rep.exclusion_at.margin {
        eprintln!(
            "exclusion at {}: upper - lower = {m}",
            rep.exclusion_at.c_abs
        );
    }
    eprintln!(
        "BW constant {} ; m < {} ; n < {}",
        rep.bw.constant, rep.m_cap, rep.n_cap
    );
    Ok(if ok { 0 } else { 2 })
}

fn io_err(e: io::Error) -> Error {
    Error::Contract(format!("output failed: {e}"))
}

fn load_checkpoint(path: &Path) -> Option<Checkpoint> {
    serde_json::from_str(&fs::read_to_string(path).ok()?).ok()
}

fn save_checkpoint(path: &Path, ck: &Checkpoint) -> Result<(), Error> {
    let tmp = path.with_extension("tmp");
    fs::write(
        &tmp,
        serde_json::to_string(ck).expect("checkpoint serializes"),
    )
    .map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

fn cmd_reduce(jobs: &Path, checkpoint: Option<PathBuf>, resume: bool) -> Result<i32, Error> {
    let text =
        fs::read_to_string(jobs).map_err(|e| Error::Parse(format!("{}: {e}", jobs.display())))?;
    let list = parse_jobs(&text)?;
    let ck_path = checkpoint.unwrap_or_else(|| {
        let mut p = jobs.as_os_str().to_owned();
        p.push(".state");
        PathBuf::from(p)
    });
    let mut ck = Checkpoint {
        jobs: jobs.display().to_string(),
        ..Default::default()
    };
    if resume {
        if let Some(prev) = load_checkpoint(&ck_path).filter(|p| p.jobs == ck.jobs) {
            ck = prev;
        }
    }
    let mut out = io::stdout().lock();
    let start = ck.completed.min(list.len());
    for chunk in list[start..].chunks(CHECKPOINT_EVERY) {
        let outcomes: Vec<JobOutcome> = chunk.par_iter().map(run_job).collect();
        for o in &outcomes {
            emit(&mut out, o).map_err(io_err)?;
            if let Some(e) = &o.failure {
                ck.failed += 1;
                ck.worst_exit = worse(ck.worst_exit, exit_code(e));
                eprintln!("line {}: c = {}: {e}", o.line, o.c);
            }
        }
        out.flush().map_err(io_err)?;
        ck.completed += chunk.len();
        if list.len() > CHECKPOINT_EVERY {
            save_checkpoint(&ck_path, &ck)?;
        }
    }
    eprintln!("reduce: {} jobs, {} failed", list.len(), ck.failed);
    Ok(ck.worst_exit)
}

fn cmd_absindex(d: u64, pmax: i64, qmax: i64, bmax: i64) -> Result<i32, Error> {
    let ring = RingSpec::new(d)?;
    if !ring.is_half() {
        return Err(Error::Inapplicable(format!(
            "-{d} = 1 mod 4 is outside the scope of the index computation"
        )));
    }
    let tuples = sweep_tuples(&ring, pmax, qmax, bmax);
    let verdicts: Vec<_> = tuples
        .par_iter()
        .map(|(p, q, b, eps, a0)| j_alpha_divisibility(d, *p, *q, *b, eps, *a0))
        .collect::<Result<_, _>>()?;
    let mut out = io::stdout().lock();
    let mut failed = 0usize;
    for v in &verdicts {
        if !v.holds() {
            failed += 1;
        }
        emit(
            &mut out,
            &serde_json::json!({"schema": SCHEMA, "verdict": v, "holds": v.holds()}),
        )
        .map_err(io_err)?;
    }
    eprintln!(
        "absindex D={d}: {} tuples, {} without 256 | J",
        verdicts.len(),
        failed
    );
    Ok(if failed > 0 { 2 } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        // the global pool can only be configured once, before any parallel work
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    let prec = cli.prec.clamp(64, relpow_core::ball::MAX_PREC);
    let res = match cli.cmd {
        Cmd::Verify { d, c } => cmd_verify(d, &c, prec),
        Cmd::Scan { d, radius, mmax, h } => cmd_scan(d, radius, mmax, h),
        Cmd::Thresholds => cmd_thresholds(prec),
        Cmd::Reduce {
            jobs,
            checkpoint,
            resume,
        } => cmd_reduce(&jobs, checkpoint, resume),
        Cmd::Absindex {
            d,
            pmax,
            qmax,
            bmax,
        } => cmd_absindex(d, pmax, qmax, bmax),
    };
    let code = match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
