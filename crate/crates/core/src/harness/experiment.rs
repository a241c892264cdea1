//! Multi-run comparison of the tree algorithms, and the coin-flip stress test.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::seq::index::sample;
use rand::RngCore;
use rayon::prelude::*;

use super::ingest::{ingest_csv, CsvOptions};
use super::synth::{build_random_bad_instance, clean_first_tree, MixtureSpec, RandomBadInstanceSpec};
use crate::algorithm::{random_tree, Algorithm, TwoMeansConfig};
use crate::error::{Error, Result};
use crate::metric::PointSet;
use crate::objective::{ckmm_value, dasgupta_cost, revenue_total, revenue_upper_bound, ObjectiveKind};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Csv { path: PathBuf, options: CsvOptions },
    Synthetic(MixtureSpec),
}

impl InputSource {
    pub fn load(&self) -> Result<PointSet> {
        match self {
            InputSource::Csv { path, options } => Ok(ingest_csv(path, options)?.points),
            InputSource::Synthetic(spec) => spec.generate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub subsample_size: usize,
    pub num_runs: usize,
    pub algorithms: Vec<Algorithm>,
    pub objectives: Vec<ObjectiveKind>,
    pub base_seed: u64,
    pub solver: TwoMeansConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            subsample_size: 1000,
            num_runs: 5,
            algorithms: Algorithm::ALL.to_vec(),
            objectives: vec![ObjectiveKind::Revenue, ObjectiveKind::Ckmm],
            base_seed: 0,
            solver: TwoMeansConfig::default(),
        }
    }
}

/// Which row of the report a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowLabel {
    Algorithm(Algorithm),
    /// `C(m, 2)` for revenue, `m · Σ d` for CKMM; for the Dasgupta cost the
    /// trivial lower bound `2 · Σ w`.
    Bound,
}

impl RowLabel {
    pub fn name(self, objective: ObjectiveKind) -> &'static str {
        match (self, objective) {
            (RowLabel::Algorithm(a), _) => a.name(),
            (RowLabel::Bound, ObjectiveKind::Dasgupta) => "lower-bound",
            (RowLabel::Bound, _) => "upper-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub row: RowLabel,
    pub objective: ObjectiveKind,
    pub run: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub row: RowLabel,
    pub objective: ObjectiveKind,
    pub mean: f64,
    /// Population standard deviation over runs.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Report {
    pub raw: Vec<RunRecord>,
    pub summary: Vec<StatsRow>,
}

impl Table1Report {
    pub fn stats(&self, row: RowLabel, objective: ObjectiveKind) -> Option<&StatsRow> {
        self.summary.iter().find(|s| s.row == row && s.objective == objective)
    }

    pub fn runs(&self, row: RowLabel, objective: ObjectiveKind) -> Vec<f64> {
        self.raw
            .iter()
            .filter(|r| r.row == row && r.objective == objective)
            .map(|r| r.value)
            .collect()
    }

    /// Raw rows, a `# summary` line, then the summary rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("algorithm,objective,run,value\n");
        for r in &self.raw {
            let _ = writeln!(out, "{},{},{},{}", r.row.name(r.objective), r.objective, r.run, r.value);
        }
        out.push_str("# summary\nalgorithm,objective,mean,std\n");
        for s in &self.summary {
            let _ = writeln!(out, "{},{},{},{}", s.row.name(s.objective), s.objective, s.mean, s.std);
        }
        out
    }
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
    (mean, var.sqrt())
}

fn validate(points: &PointSet, config: &ExperimentConfig) -> Result<()> {
    if config.num_runs == 0 {
        return Err(Error::Config("at least one run is required".into()));
    }
    if config.subsample_size == 0 || config.subsample_size > points.len() {
        return Err(Error::Config(format!(
            "subsample size {} must be between 1 and the dataset size {}",
            config.subsample_size,
            points.len()
        )));
    }
    if config.objectives.is_empty() {
        return Err(Error::Config("no objectives requested".into()));
    }
    Ok(())
}

fn one_run(points: &PointSet, config: &ExperimentConfig, run: usize) -> Result<Vec<RunRecord>> {
    let stream = RngStream::new(config.base_seed).substream(run as u64);
    let mut sampler = stream.substream(0);
    let mut idx = sample(&mut sampler, points.len(), config.subsample_size).into_vec();
    idx.sort_unstable();
    let sub = points.subset(&idx)?;
    let solver = TwoMeansConfig { seed: stream.substream(2).next_u64(), ..config.solver.clone() };
    let needs_matrix = config.objectives.iter().any(|&o| o != ObjectiveKind::Revenue);
    let matrix = needs_matrix.then(|| sub.pairwise_distances());

    let mut out = Vec::new();
    let mut record = |row, objective, value| out.push(RunRecord { row, objective, run, value });
    for &algo in &config.algorithms {
        let tree = match algo {
            Algorithm::Random => random_tree(sub.len(), &mut stream.substream(1)),
            _ => algo.build(&sub, &solver, &mut stream.substream(1))?,
        };
        for &obj in &config.objectives {
            let value = match obj {
                ObjectiveKind::Revenue => revenue_total(&sub, &tree)?,
                ObjectiveKind::Ckmm => ckmm_value(matrix.as_ref().expect("matrix"), &tree)?.total,
                ObjectiveKind::Dasgupta => dasgupta_cost(matrix.as_ref().expect("matrix"), &tree)?.total,
            };
            record(RowLabel::Algorithm(algo), obj, value);
        }
    }
    for &obj in &config.objectives {
        let value = match obj {
            ObjectiveKind::Revenue => revenue_upper_bound(sub.len()),
            ObjectiveKind::Ckmm => sub.len() as f64 * matrix.as_ref().expect("matrix").pair_sum(),
            ObjectiveKind::Dasgupta => 2.0 * matrix.as_ref().expect("matrix").pair_sum(),
        };
        record(RowLabel::Bound, obj, value);
    }
    Ok(out)
}

/// Runs every algorithm on `num_runs` independent subsamples and scores
/// each tree under every objective. Runs execute in parallel; the report is
/// sorted by (row, objective, run) so its content does not depend on scheduling.
pub fn run_table1(points: &PointSet, config: &ExperimentConfig) -> Result<Table1Report> {
    validate(points, config)?;
    let per_run: Vec<Vec<RunRecord>> = (0..config.num_runs)
        .into_par_iter()
        .map(|run| one_run(points, config, run))
        .collect::<Result<_>>()?;
    let mut raw: Vec<RunRecord> = per_run.into_iter().flatten().collect();
    raw.sort_by_key(|r| (r.row, r.objective, r.run));

    let mut summary = Vec::new();
    for chunk in raw.chunk_by(|a, b| (a.row, a.objective) == (b.row, b.objective)) {
        let values: Vec<f64> = chunk.iter().map(|r| r.value).collect();
        let (mean, std) = mean_std(&values);
        summary.push(StatsRow { row: chunk[0].row, objective: chunk[0].objective, mean, std });
    }
    Ok(Table1Report { raw, summary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomBadRow {
    pub n: usize,
    pub points: usize,
    pub trials: usize,
    pub mean_ratio: f64,
    pub std_ratio: f64,
    /// Ratio earned by the tree that separates the clusters at the root.
    pub reference_ratio: f64,
}

/// For each `n`, the revenue of `trials` coin-flip trees on the
/// `n² + n` point instance, as a fraction of the optimum `C(n² + n, 2)`.
pub fn run_random_bad(sizes: &[usize], trials: usize, seed: u64) -> Result<Vec<RandomBadRow>> {
    if trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    let root = RngStream::new(seed);
    sizes
        .iter()
        .map(|&n| {
            let spec = RandomBadInstanceSpec::new(n);
            let points = build_random_bad_instance(&spec)?;
            let opt = revenue_upper_bound(points.len());
            let stream = root.substream(n as u64);
            let ratios: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let tree = random_tree(points.len(), &mut stream.substream(t as u64));
                    revenue_total(&points, &tree).map(|r| r / opt)
                })
                .collect::<Result<_>>()?;
            let (mean_ratio, std_ratio) = mean_std(&ratios);
            let reference_ratio = revenue_total(&points, &clean_first_tree(&spec)?)? / opt;
            Ok(RandomBadRow { n, points: points.len(), trials, mean_ratio, std_ratio, reference_ratio })
        })
        .collect()
}

pub fn random_bad_csv(rows: &[RandomBadRow]) -> String {
    let mut out = String::from("n,points,trials,mean_ratio,std_ratio,reference_ratio\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.points, r.trials, r.mean_ratio, r.std_ratio, r.reference_ratio
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixture(n: usize) -> PointSet {
        MixtureSpec { k: 3, n, dim: 3, separation: 10.0, seed: 4 }.generate().unwrap()
    }

    #[test]
    fn stats() {
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
        assert_eq!(mean_std(&[1.0, 3.0]), (2.0, 1.0));
    }

    #[test]
    fn single_run_has_zero_spread() {
        let p = mixture(40);
        let config = ExperimentConfig { subsample_size: 30, num_runs: 1, ..ExperimentConfig::default() };
        let report = run_table1(&p, &config).unwrap();
        assert_eq!(report.summary.len(), 5 * 2);
        assert!(report.summary.iter().all(|s| s.std == 0.0));
        let ub = report.stats(RowLabel::Bound, ObjectiveKind::Revenue).unwrap();
        assert_eq!((ub.mean, ub.std), (435.0, 0.0));
    }

    #[test]
    fn report_layout() {
        let p = mixture(20);
        let config = ExperimentConfig {
            subsample_size: 10,
            num_runs: 2,
            algorithms: vec![Algorithm::Random],
            objectives: vec![ObjectiveKind::Revenue],
            ..ExperimentConfig::default()
        };
        let csv = run_table1(&p, &config).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "algorithm,objective,run,value");
        assert!(lines[1].starts_with("random,revenue,0,"));
        assert!(lines[2].starts_with("random,revenue,1,"));
        assert_eq!(lines[3], "upper-bound,revenue,0,45");
        assert_eq!(lines[5], "# summary");
        assert_eq!(lines[6], "algorithm,objective,mean,std");
        assert_eq!(lines[8], "upper-bound,revenue,45,0");
    }

    #[test]
    fn config_errors() {
        let p = mixture(10);
        let too_big = ExperimentConfig { subsample_size: 11, ..ExperimentConfig::default() };
        assert!(run_table1(&p, &too_big).is_err());
        let no_runs = ExperimentConfig { subsample_size: 5, num_runs: 0, ..ExperimentConfig::default() };
        assert!(run_table1(&p, &no_runs).is_err());
        assert!(run_random_bad(&[3], 0, 0).is_err());
        assert!(run_random_bad(&[1], 5, 0).is_err());
    }

    #[test]
    fn random_bad_rows() {
        let rows = run_random_bad(&[2, 3], 20, 1).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.mean_ratio));
            assert_eq!(r.reference_ratio, 1.0);
        }
        assert_eq!(rows, run_random_bad(&[2, 3], 20, 1).unwrap());
    }
}
