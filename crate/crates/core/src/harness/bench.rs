//! Sweeps of algorithms over shared inputs, reported as JSON lines.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fixtures::fixture;
use super::random::{random_spd, MatrixFamilySpec};
use crate::error::{Error, Result};
use crate::msf::{factorize, AlgoParams, Algorithm, NSchedule};
use crate::numcore::LaurentPolyMatrix;
use crate::wavelet::DeltaSolver;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BenchInput {
    Random(MatrixFamilySpec),
    Fixture { name: String },
}

impl BenchInput {
    fn density(&self) -> Result<LaurentPolyMatrix> {
        match self {
            BenchInput::Random(spec) => random_spd(spec),
            BenchInput::Fixture { name } => Ok(fixture(name)?.density),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub alg: Algorithm,
    pub params: AlgoParams,
}

/// One input and every algorithm that runs on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    pub input: BenchInput,
    pub runs: Vec<BenchRun>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub cases: Vec<BenchCase>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub alg: Algorithm,
    pub r: usize,
    pub n: usize,
    pub seed: Option<u64>,
    pub fixture: Option<String>,
    pub shift: f64,
    pub params: AlgoParams,
    pub time_s: f64,
    /// `None` when the run failed.
    pub err: Option<f64>,
    /// `"ok"` or the error message.
    pub status: String,
    pub warnings: Vec<String>,
}

impl BenchRow {
    pub fn is_ok(&self) -> bool {
        self.err.is_some()
    }
}

/// Runs every case; cases execute in parallel, runs within a case in order.
/// Failures become rows with `err = None`.
pub fn run_bench(config: &BenchConfig) -> Vec<BenchRow> {
    config.cases.par_iter().flat_map_iter(run_case).collect()
}

fn run_case(case: &BenchCase) -> Vec<BenchRow> {
    let (seed, fixture_name, shift) = match &case.input {
        BenchInput::Random(spec) => (Some(spec.seed), None, spec.shift),
        BenchInput::Fixture { name } => (None, Some(name.clone()), 0.0),
    };
    let density = case.input.density();
    let (r, n) = match (&density, &case.input) {
        (Ok(s), _) => (s.rows(), s.half_width()),
        (Err(_), BenchInput::Random(spec)) => (spec.r, spec.n),
        (Err(_), BenchInput::Fixture { .. }) => (0, 0),
    };
    case.runs
        .iter()
        .map(|run| {
            let start = Instant::now();
            let outcome = match &density {
                Ok(s) => factorize(run.alg, s, &run.params).map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            let time_s = start.elapsed().as_secs_f64();
            let (err, status, warnings) = match outcome {
                Ok(res) => (Some(res.err), "ok".to_string(), res.diagnostics.warnings),
                Err(msg) => (None, msg, Vec::new()),
            };
            BenchRow {
                alg: run.alg,
                r,
                n,
                seed,
                fixture: fixture_name.clone(),
                shift,
                params: run.params.clone(),
                time_s,
                err,
                status,
                warnings,
            }
        })
        .collect()
}

pub fn write_jsonl<W: Write>(rows: &[BenchRow], mut out: W) -> std::io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Cases over `seeds` for a random family, sharing one run list.
pub fn sweep(r: usize, n: usize, shift: f64, seeds: std::ops::Range<u64>, runs: &[BenchRun]) -> Vec<BenchCase> {
    seeds
        .map(|seed| BenchCase {
            input: BenchInput::Random(MatrixFamilySpec { r, n, seed, shift }),
            runs: runs.to_vec(),
        })
        .collect()
}

pub const PRESET_NAMES: [&str; 5] = ["table1", "table2", "table3-desk", "table4-desk", "singular"];

fn run(alg: Algorithm, params: AlgoParams) -> BenchRun {
    BenchRun { alg, params }
}

/// Desk-scale sweeps patterned on the published comparison tables.
pub fn preset(name: &str, seeds: u64) -> Result<BenchConfig> {
    let d = AlgoParams::default;
    let cases = match name {
        "table1" => [(4, 30), (6, 20), (8, 10), (10, 5)]
            .into_iter()
            .flat_map(|(r, n)| {
                let runs = [
                    run(Algorithm::Jle3, d()),
                    run(Algorithm::Jle1, table1_jle1()),
                    run(Algorithm::Wilson, table1_wilson()),
                ];
                sweep(r, n, 0.0, 0..seeds, &runs)
            })
            .collect(),
        "table2" => {
            let runs = [run(Algorithm::Jle1, table2_jle1()), run(Algorithm::Wilson, table2_wilson())];
            sweep(15, 20, 0.0, 0..seeds, &runs)
        }
        "table3-desk" => {
            let runs = [run(Algorithm::Jle2, d()), run(Algorithm::Wilson, table2_wilson())];
            sweep(20, 5, 0.0, 0..seeds, &runs)
        }
        "table4-desk" => {
            let runs = [run(Algorithm::Jle2, d()), run(Algorithm::Wilson, d())];
            sweep(20, 10, 1.0, 0..seeds, &runs)
        }
        "singular" => {
            let runs = [run(Algorithm::Jle1, singular_jle1()), run(Algorithm::Jle3, d()), run(Algorithm::Wilson, d())];
            ["ieee0", "sa4"]
                .into_iter()
                .map(|f| BenchCase { input: BenchInput::Fixture { name: f.into() }, runs: runs.to_vec() })
                .collect()
        }
        _ => {
            return Err(Error::InvalidParams(format!(
                "unknown preset `{name}` (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(BenchConfig { cases })
}

/// JLE-1 at `N = 10·m·n` with the structured Δ solver.
pub fn table1_jle1() -> AlgoParams {
    AlgoParams {
        n_schedule: Some(NSchedule::Proportional { factor: 10.0 }),
        delta_solver: DeltaSolver::Displacement,
        ..Default::default()
    }
}

pub fn table1_wilson() -> AlgoParams {
    AlgoParams { kappa: 11, ..Default::default() }
}

/// JLE-1 at `N = 100·m`.
pub fn table2_jle1() -> AlgoParams {
    AlgoParams {
        n_schedule: Some(NSchedule::PerStep { factor: 100.0 }),
        delta_solver: DeltaSolver::Displacement,
        ..Default::default()
    }
}

pub fn table2_wilson() -> AlgoParams {
    AlgoParams { kappa: 11, wilson_iters: 25, ..Default::default() }
}

pub fn singular_jle1() -> AlgoParams {
    AlgoParams { scalar_iters: 60, ..Default::default() }
}
