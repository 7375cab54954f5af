//! Batch solving from a manifest, one CSV row per instance.

use std::io::Write;

use dcfac_core::{solve, PenaltyConfig};
use rayon::prelude::*;

use crate::clock::StdClock;
use crate::formats::{load_instance, stem, ManifestEntry};

pub const CSV_HEADER: [&str; 8] = [
    "name",
    "n",
    "bval",
    "obj",
    "gap_percent",
    "time_s",
    "infeas_inf",
    "normal_exit",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub n: Option<usize>,
    pub bval: Option<f64>,
    pub outcome: Result<Solved, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub obj: f64,
    pub gap_percent: Option<f64>,
    pub time_s: Option<f64>,
    pub infeas_inf: f64,
    pub normal_exit: bool,
}

pub fn run_one(entry: &ManifestEntry, cfg: &PenaltyConfig, timing: bool) -> BenchRow {
    let inst = match load_instance(&entry.path, entry.format, Some(entry.kind), entry.index) {
        Ok(inst) => inst.with_known_best(entry.bval),
        Err(e) => {
            return BenchRow {
                name: stem(&entry.path),
                n: None,
                bval: entry.bval,
                outcome: Err(format!("{e:#}")),
            }
        }
    };
    let clock = StdClock::start();
    let outcome = solve(&inst, cfg, &clock)
        .map(|rep| Solved {
            obj: rep.obj,
            gap_percent: rep.gap_percent,
            time_s: timing.then_some(rep.wall_time),
            infeas_inf: rep.infeas_inf,
            normal_exit: rep.exited_normally,
        })
        .map_err(|e| e.to_string());
    BenchRow {
        name: inst.name.clone(),
        n: Some(inst.n_binary),
        bval: entry.bval,
        outcome,
    }
}

/// Solves every entry on `jobs` worker threads; rows come back in manifest
/// order.
pub fn run_bench(
    entries: &[ManifestEntry],
    cfg: &PenaltyConfig,
    jobs: usize,
    timing: bool,
) -> anyhow::Result<Vec<BenchRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?;
    Ok(pool.install(|| {
        entries
            .par_iter()
            .map(|e| run_one(e, cfg, timing))
            .collect()
    }))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let mut rec = vec![row.name.clone(), opt(row.n), opt(row.bval)];
        match &row.outcome {
            Ok(s) => rec.extend([
                s.obj.to_string(),
                opt(s.gap_percent),
                opt(s.time_s),
                s.infeas_inf.to_string(),
                s.normal_exit.to_string(),
            ]),
            Err(msg) => rec.extend([
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {msg}"),
            ]),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
