//! Seeded Monte Carlo sweeps over `(model, n, p, k)` grids.
//!
//! Each cell samples `trials` tournaments, trial `t` drawing from substream
//! `t` of the cell seed, and records how many alternatives are `k`-kings
//! and whether all of them are. Counts are summed as integers so the result
//! does not depend on how trials are spread over threads.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::models::{
    check_p, mix_seed, probability_matrix, sample, ModelError, ModelSpec, ProbabilityMatrix,
    RngStream,
};
use crate::solutions::{king_counts, KBound, SolutionError};

pub const CSV_HEADER: &str = "model,n,p,k,trials,seed,avg_pct,all_pct,stderr_pct";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("csv line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A model family, before `p` is fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Uniform,
    Condorcet,
    Gap,
    /// A fixed matrix; the p-grid is ignored and the `p` column reports the
    /// smallest entry.
    Generalized(ProbabilityMatrix),
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Uniform => "uniform",
            ModelKind::Condorcet => "condorcet",
            ModelKind::Gap => "gap",
            ModelKind::Generalized(_) => "generalized",
        }
    }

    pub fn spec(&self, p: f64) -> ModelSpec {
        match self {
            ModelKind::Uniform => ModelSpec::Uniform,
            ModelKind::Condorcet => ModelSpec::Condorcet { p },
            ModelKind::Gap => ModelSpec::Gap { p },
            ModelKind::Generalized(m) => ModelSpec::Generalized(m.clone()),
        }
    }
}

/// Parses the parameterized families; a generalized model needs a matrix.
impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(ModelKind::Uniform),
            "condorcet" => Ok(ModelKind::Condorcet),
            "gap" => Ok(ModelKind::Gap),
            other => Err(format!(
                "unknown model {other:?} (expected uniform, condorcet or gap)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub p_grid: Vec<f64>,
    pub n_values: Vec<usize>,
    pub k_values: Vec<KBound>,
    pub trials: u64,
    pub master_seed: u64,
    /// Sample new tournaments for every `k` instead of sharing them.
    pub fresh_per_k: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::InvalidConfig(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_values.is_empty() || self.k_values.is_empty() {
            return bad("n and k lists must be non-empty".into());
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return bad(format!("n must be at least 2, got {n}"));
        }
        for k in &self.k_values {
            k.validate()?;
        }
        match &self.model {
            ModelKind::Generalized(m) => {
                m.validate()?;
                if self.n_values.iter().any(|&n| n != m.n()) {
                    return bad(format!("generalized matrix fixes n = {}", m.n()));
                }
            }
            _ => {
                if self.p_grid.is_empty() {
                    return bad("p-grid must be non-empty".into());
                }
                for &p in &self.p_grid {
                    check_p(p)?;
                }
            }
        }
        Ok(())
    }

    fn p_values(&self) -> Vec<f64> {
        match &self.model {
            ModelKind::Generalized(m) => vec![m.min_entry()],
            _ => self.p_grid.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub model: String,
    pub n: usize,
    pub p: f64,
    pub k: KBound,
    pub trials: u64,
    pub seed: u64,
    pub avg_pct: f64,
    pub all_pct: f64,
    pub stderr_pct: f64,
}

/// Exact per-cell sums over trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    kings: u64,
    kings_sq: u128,
    all: u64,
}

impl Tally {
    fn add(self, other: Tally) -> Tally {
        Tally {
            kings: self.kings + other.kings,
            kings_sq: self.kings_sq + other.kings_sq,
            all: self.all + other.all,
        }
    }

    fn row(&self, model: &str, n: usize, p: f64, k: KBound, trials: u64, seed: u64) -> ResultRow {
        let nt = n as f64 * trials as f64;
        let avg_pct = 100.0 * self.kings as f64 / nt;
        let all_pct = 100.0 * self.all as f64 / trials as f64;
        let stderr_pct = if trials < 2 {
            0.0
        } else {
            // sample variance of 100 c_t / n from the exact sums
            let t = trials as u128;
            let s = self.kings as u128;
            let spread = (t * self.kings_sq - s * s) as f64;
            let var = (100.0 / n as f64).powi(2) * spread / (t as f64 * (t - 1) as f64);
            (var / trials as f64).sqrt()
        };
        ResultRow {
            model: model.to_string(),
            n,
            p,
            k,
            trials,
            seed,
            avg_pct,
            all_pct,
            stderr_pct,
        }
    }
}

/// One tally per entry of `ks` (resolved exponents), all measured on the
/// same sampled tournaments.
fn run_trials(
    matrix: &ProbabilityMatrix,
    ks: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<Tally>, ExperimentError> {
    let n = matrix.n();
    let zero = || vec![Tally::default(); ks.len()];
    let merge = |a: Vec<Tally>, b: Vec<Tally>| -> Vec<Tally> {
        a.into_iter().zip(b).map(|(x, y)| x.add(y)).collect()
    };
    (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<Tally>, ExperimentError> {
            let t = sample(matrix, RngStream::new(seed, trial))?;
            let mut counts = vec![0usize; ks.len()];
            king_counts(&t, ks, &mut counts);
            Ok(counts
                .iter()
                .map(|&c| Tally {
                    kings: c as u64,
                    kings_sq: (c as u128).pow(2),
                    all: u64::from(c == n),
                })
                .collect())
        })
        .try_reduce(zero, |a, b| Ok(merge(a, b)))
}

fn p_micro(p: f64) -> u64 {
    (p * 1e6).round() as u64
}

fn k_code(k: KBound) -> u64 {
    match k {
        KBound::Fixed(k) => k as u64,
        KBound::Max => u64::MAX,
    }
}

/// Seed of the cell `(n, p)` shared by every `k`.
pub fn shared_cell_seed(master_seed: u64, n: usize, p: f64) -> u64 {
    mix_seed(&[master_seed, n as u64, p_micro(p)])
}

/// Seed of the cell `(n, p, k)`.
pub fn cell_seed(master_seed: u64, n: usize, p: f64, k: KBound) -> u64 {
    mix_seed(&[master_seed, n as u64, p_micro(p), k_code(k)])
}

/// Runs a single cell. `seed` is used as is, trial `t` on substream `t`.
pub fn run_cell(
    spec: &ModelSpec,
    n: usize,
    k: KBound,
    trials: u64,
    seed: u64,
) -> Result<ResultRow, ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::InvalidConfig(
            "trials must be at least 1".into(),
        ));
    }
    k.validate()?;
    let matrix = probability_matrix(spec, n)?;
    let tally = run_trials(&matrix, &[k.resolve(n)], trials, seed)?[0];
    Ok(tally.row(spec.name(), n, spec.p(), k, trials, seed))
}

/// Runs every cell, n-major, then p, then k.
pub fn run_grid(config: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    run_grid_with(config, |_| {})
}

/// As [`run_grid`], calling `on_row` as each row completes.
pub fn run_grid_with(
    config: &ExperimentConfig,
    mut on_row: impl FnMut(&ResultRow),
) -> Result<Vec<ResultRow>, ExperimentError> {
    config.validate()?;
    let name = config.model.name();
    let mut rows = Vec::new();
    for &n in &config.n_values {
        for p in config.p_values() {
            let matrix = probability_matrix(&config.model.spec(p), n)?;
            if config.fresh_per_k {
                for &k in &config.k_values {
                    let seed = cell_seed(config.master_seed, n, p, k);
                    let tally = run_trials(&matrix, &[k.resolve(n)], config.trials, seed)?[0];
                    let row = tally.row(name, n, p, k, config.trials, seed);
                    on_row(&row);
                    rows.push(row);
                }
            } else {
                let seed = shared_cell_seed(config.master_seed, n, p);
                let ks: Vec<usize> = config.k_values.iter().map(|k| k.resolve(n)).collect();
                let tallies = run_trials(&matrix, &ks, config.trials, seed)?;
                for (&k, tally) in config.k_values.iter().zip(tallies) {
                    let row = tally.row(name, n, p, k, config.trials, seed);
                    on_row(&row);
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

impl fmt::Display for ResultRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{:.6},{},{},{},{:.4},{:.4},{:.4}",
            self.model,
            self.n,
            self.p,
            self.k,
            self.trials,
            self.seed,
            self.avg_pct,
            self.all_pct,
            self.stderr_pct
        )
    }
}

pub fn write_csv(rows: &[ResultRow], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>, ExperimentError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == CSV_HEADER => {}
        _ => {
            return Err(ExperimentError::Parse {
                line: 1,
                msg: format!("expected header {CSV_HEADER:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ExperimentError::Parse { line: idx + 1, msg };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(err(format!("expected 9 fields, found {}", fields.len())));
        }
        fn num<T: FromStr>(s: &str, what: &str) -> Result<T, String> {
            s.parse().map_err(|_| format!("bad {what} {s:?}"))
        }
        let parsed = (|| -> Result<ResultRow, String> {
            Ok(ResultRow {
                model: fields[0].to_string(),
                n: num(fields[1], "n")?,
                p: num(fields[2], "p")?,
                k: fields[3].parse()?,
                trials: num(fields[4], "trials")?,
                seed: num(fields[5], "seed")?,
                avg_pct: num(fields[6], "avg_pct")?,
                all_pct: num(fields[7], "all_pct")?,
                stderr_pct: num(fields[8], "stderr_pct")?,
            })
        })();
        rows.push(parsed.map_err(err)?);
    }
    Ok(rows)
}

/// Parses `start:end:step` (inclusive, values rounded to 6 decimals) or a
/// comma-separated list.
pub fn parse_p_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| -> Result<f64, String> {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad probability {t:?}"))
    };
    let round6 = |x: f64| (x * 1e6).round() / 1e6;
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, step] = parts[..] else {
            return Err(format!("expected start:end:step, got {s:?}"));
        };
        let (start, end, step) = (num(start)?, num(end)?, num(step)?);
        if step.is_nan() || step <= 0.0 || end < start {
            return Err(format!("empty or invalid range {s:?}"));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        Ok((0..=count)
            .map(|i| round6(start + i as f64 * step))
            .collect())
    } else {
        s.split(',').map(num).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(p_grid: Vec<f64>, k_values: Vec<KBound>, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            model: ModelKind::Condorcet,
            p_grid,
            n_values: vec![10],
            k_values,
            trials,
            master_seed: 42,
            fresh_per_k: false,
        }
    }

    #[test]
    fn degenerate_cell_is_exact() {
        for k in [KBound::Fixed(2), KBound::Fixed(3), KBound::Max] {
            let row = run_cell(&ModelSpec::Condorcet { p: 0.0 }, 10, k, 50, 9).unwrap();
            assert_eq!(row.avg_pct, 10.0);
            assert_eq!(row.all_pct, 0.0);
            assert_eq!(row.stderr_pct, 0.0);
        }
    }

    #[test]
    fn grid_order_and_rerun() {
        let cfg = config(vec![0.0, 0.5], vec![KBound::Fixed(2)], 1);
        let a = run_grid(&cfg).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].p, 0.0);
        assert_eq!(a[1].p, 0.5);
        assert_eq!(a, run_grid(&cfg).unwrap());
    }

    #[test]
    fn shared_mode_is_monotone_in_k() {
        let ks = vec![
            KBound::Fixed(2),
            KBound::Fixed(3),
            KBound::Fixed(4),
            KBound::Max,
        ];
        let rows = run_grid(&config(vec![0.2, 0.5], ks, 200)).unwrap();
        for cell in rows.chunks(4) {
            for w in cell.windows(2) {
                assert!(w[0].avg_pct <= w[1].avg_pct);
                assert!(w[0].all_pct <= w[1].all_pct);
            }
            assert!(cell.iter().all(|r| r.avg_pct >= 10.0 && r.avg_pct <= 100.0));
        }
    }

    #[test]
    fn fresh_mode_uses_distinct_seeds() {
        let mut cfg = config(vec![0.3], vec![KBound::Fixed(2), KBound::Fixed(3)], 5);
        cfg.fresh_per_k = true;
        let rows = run_grid(&cfg).unwrap();
        assert_ne!(rows[0].seed, rows[1].seed);
        cfg.fresh_per_k = false;
        let rows = run_grid(&cfg).unwrap();
        assert_eq!(rows[0].seed, rows[1].seed);
    }

    #[test]
    fn invalid_configs() {
        assert!(run_grid(&config(vec![0.6], vec![KBound::Fixed(2)], 1)).is_err());
        assert!(run_grid(&config(vec![0.1], vec![KBound::Fixed(1)], 1)).is_err());
        assert!(run_grid(&config(vec![0.1], vec![KBound::Fixed(2)], 0)).is_err());
        assert!(run_grid(&config(vec![], vec![KBound::Fixed(2)], 1)).is_err());
    }

    #[test]
    fn stderr_from_known_counts() {
        // per-trial percentages 10, 30: sd = sqrt(200), se = sd / sqrt(2) = 10
        let tally = Tally {
            kings: 4,
            kings_sq: 1 + 9,
            all: 0,
        };
        let row = tally.row("x", 10, 0.1, KBound::Fixed(2), 2, 0);
        assert!((row.avg_pct - 20.0).abs() < 1e-12);
        assert!((row.stderr_pct - 10.0).abs() < 1e-12);
    }

    #[test]
    fn csv_format() {
        assert_eq!(to_csv_string(&[]), format!("{CSV_HEADER}\n"));
        let row = ResultRow {
            model: "condorcet".into(),
            n: 10,
            p: 0.5,
            k: KBound::Max,
            trials: 10000,
            seed: 42,
            avg_pct: 98.07,
            all_pct: 90.0,
            stderr_pct: 0.05,
        };
        let text = to_csv_string(std::slice::from_ref(&row));
        assert_eq!(
            text,
            format!("{CSV_HEADER}\ncondorcet,10,0.500000,max,10000,42,98.0700,90.0000,0.0500\n")
        );
        assert_eq!(parse_csv(&text).unwrap(), vec![row]);
        assert!(parse_csv("nope\n").is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\na,b\n")).is_err());
    }

    #[test]
    fn p_grid_syntax() {
        assert_eq!(parse_p_grid("0:0:1").unwrap(), vec![0.0]);
        let g = parse_p_grid("0:0.5:0.02").unwrap();
        assert_eq!(g.len(), 26);
        assert_eq!(g[25], 0.5);
        assert_eq!(g[3], 0.06);
        assert_eq!(parse_p_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        assert!(parse_p_grid("0:1").is_err());
        assert!(parse_p_grid("0:1:0").is_err());
        assert!(parse_p_grid("a").is_err());
    }
}
