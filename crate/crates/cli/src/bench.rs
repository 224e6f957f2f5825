use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;

use hyperqsat::engine::{check_sat, Budget, CheckResult};
use hyperqsat::formula::{parse, Formula};
use hyperqsat::random::gen_random;

use crate::{write_atomic, RandomOpts};

/// One benchmark row.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub name: String,
    /// `sat`, `unknown` or `error`.
    pub verdict: &'static str,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub time_ms: f64,
    pub backend: String,
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn run_one(name: String, f: anyhow::Result<Formula>, b: &Budget) -> BenchRecord {
    let start = Instant::now();
    let mut rec = BenchRecord {
        name,
        verdict: "error",
        m: None,
        k: None,
        time_ms: 0.0,
        backend: String::new(),
    };
    let result = f.and_then(|f| check_sat(&f, b).map_err(Into::into));
    let elapsed = start.elapsed();
    rec.time_ms = elapsed.as_secs_f64() * 1e3;
    match result {
        Ok(CheckResult::Sat { m, k, backend, .. }) if elapsed <= b.time_limit => {
            rec.verdict = "sat";
            rec.m = Some(m);
            rec.k = Some(k);
            rec.backend = backend.to_string();
        }
        Ok(_) => rec.verdict = "unknown",
        Err(e) => log::warn!("{}: {e:#}", rec.name),
    }
    rec
}

/// Checks every `.hltl` file of `dir` (sorted by name), or the formulas
/// described by `spec` when `dir` is `None`, and writes the CSV.
pub fn run_bench(
    dir: Option<&Path>,
    spec: &RandomOpts,
    b: &Budget,
    csv_path: &Path,
) -> anyhow::Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    match dir {
        Some(dir) => {
            let mut paths: Vec<_> = fs::read_dir(dir)
                .with_context(|| format!("cannot list {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "hltl"))
                .collect();
            paths.sort();
            for p in paths {
                let name = sanitize(&p.file_stem().unwrap_or_default().to_string_lossy());
                let f = fs::read_to_string(&p)
                    .map_err(anyhow::Error::from)
                    .and_then(|t| parse(&t).map_err(Into::into));
                records.push(run_one(name, f, b));
            }
        }
        None => {
            for i in 0..spec.count {
                let s = spec.spec(i)?;
                records.push(run_one(format!("rand_{}", s.seed), Ok(gen_random(&s)), b));
            }
        }
    }
    write_atomic(csv_path, &to_csv(&records)?)?;
    Ok(records)
}

pub fn to_csv(records: &[BenchRecord]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "verdict", "m", "k", "time_ms", "backend"])?;
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.name.clone(),
            r.verdict.to_string(),
            opt(r.m),
            opt(r.k),
            format!("{:.3}", r.time_ms),
            r.backend.clone(),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// `solved S/N, average time T ms` over the solved instances.
pub fn summary(records: &[BenchRecord]) -> String {
    let solved: Vec<f64> = records
        .iter()
        .filter(|r| r.verdict == "sat")
        .map(|r| r.time_ms)
        .collect();
    let avg = if solved.is_empty() {
        0.0
    } else {
        solved.iter().sum::<f64>() / solved.len() as f64
    };
    format!(
        "solved {}/{}, average time {avg:.3} ms",
        solved.len(),
        records.len()
    )
}
