//! Configuration-driven pipeline: pilot, selection, allocation, estimation and
//! full experiments on the bundled benchmarks or user-supplied statistics.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::allocation::{Method, SamplingPlan};
use crate::benchmarks::{
    burgers_published_statistics, short_column_input, short_column_models, short_column_published_statistics,
    BurgersEnsemble, BurgersOptions,
};
use crate::ensemble::{draw_pilot, estimate_statistics, EnsembleStatistics};
use crate::error::{Error, Result};
use crate::estimator::mfmc_estimate;
use crate::experiment::{plan_for, run_experiment, ExperimentReport, ExperimentSettings, RowOutcome};
use crate::input::{LogNormalConvention, RandomInputSpec};
use crate::model::Model;
use crate::rng::SeedStream;
use crate::selection::{select_models, SelectionResult};

pub const OUTPUT_DIR_ENV: &str = "MFMC_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "mfmc-output";

const TAG_PILOT: u64 = 0x5049_4c00;
const TAG_TRAINING: u64 = 0x5452_4e00;
const TAG_ESTIMATE: u64 = 0x4553_5400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Benchmark {
    ShortColumn,
    Burgers,
    CustomStats,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StatsSource {
    /// Correlations and costs estimated from the pilot sample.
    #[default]
    Pilot,
    /// Published correlations and costs; standard deviations still come from the pilot.
    Paper,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Mc, Method::Modified, Method::NaiveRounded]
}

/// Experiment description, read from TOML.
///
/// ```toml
/// benchmark = "short-column"
/// stats_source = "paper"
/// pilot_size = 1000
/// budgets = [2.0, 4.0, 8.0]   # multiples of w₁
/// n_runs = 1000
/// reference_samples = 10000000
/// seed = 42
/// methods = ["mc", "modified", "naive-rounded"]
/// models = [1, 2, 5]          # optional, 1-based, skips selection
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub benchmark: Benchmark,
    #[serde(default)]
    pub stats_source: StatsSource,
    /// Defaults to 1000 for the short column and 100 for Burgers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot_size: Option<usize>,
    pub budgets: Vec<f64>,
    pub n_runs: usize,
    pub reference_samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub lognormal_convention: LogNormalConvention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z2_range: Option<(f64, f64)>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_stats: Option<EnsembleStatistics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burgers: Option<BurgersOptions>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.budgets.is_empty() {
            return bad("budgets must not be empty".into());
        }
        if let Some(b) = self.budgets.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return bad(format!("budgets must be positive, got {b}"));
        }
        if self.n_runs == 0 {
            return bad("n_runs must be at least 1".into());
        }
        if self.reference_samples == 0 {
            return bad("reference_samples must be at least 1".into());
        }
        if self.pilot_size.is_some_and(|n| n < 2) {
            return bad("pilot_size must be at least 2".into());
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        if self.methods.contains(&Method::Exhaustive) {
            return bad("method \"exhaustive\" is an allocation oracle, not an experiment method".into());
        }
        if let Some(models) = &self.models {
            if models.first() != Some(&1) || models.contains(&0) {
                return bad(format!("models must be 1-based and start with 1, got {models:?}"));
            }
        }
        if let Some((lo, hi)) = self.z2_range {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return bad(format!("z2_range must satisfy low < high, got ({lo}, {hi})"));
            }
        }
        match (self.benchmark, &self.custom_stats) {
            (Benchmark::CustomStats, None) => return bad("benchmark \"custom-stats\" needs a [custom_stats] table".into()),
            (Benchmark::CustomStats, Some(s)) => s.validate()?,
            (_, Some(_)) => return bad("[custom_stats] is only valid with benchmark \"custom-stats\"".into()),
            _ => {}
        }
        if self.benchmark == Benchmark::CustomStats && self.stats_source == StatsSource::Paper {
            return bad("custom statistics have no published counterpart".into());
        }
        Ok(())
    }

    pub fn pilot_size(&self) -> usize {
        self.pilot_size.unwrap_or(match self.benchmark {
            Benchmark::Burgers => 100,
            _ => 1000,
        })
    }

    /// `$MFMC_OUTPUT_DIR`, else the configured directory, else `mfmc-output`.
    pub fn output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn burgers_options(&self) -> BurgersOptions {
        let mut opts = self.burgers.clone().unwrap_or_default();
        if let Some(range) = self.z2_range {
            opts.z2_range = range;
        }
        opts
    }
}

/// Executable models of a benchmark, high-fidelity first.
pub struct LoadedEnsemble {
    pub models: Vec<Box<dyn Model>>,
    pub input: RandomInputSpec,
}

impl LoadedEnsemble {
    pub fn model_refs(&self) -> Vec<&dyn Model> {
        self.models.iter().map(|m| m.as_ref()).collect()
    }
}

/// `None` for custom statistics, which have no models to run.
pub fn load_ensemble(cfg: &ExperimentConfig) -> Result<Option<LoadedEnsemble>> {
    match cfg.benchmark {
        Benchmark::CustomStats => Ok(None),
        Benchmark::ShortColumn => Ok(Some(LoadedEnsemble {
            models: short_column_models().into_iter().map(|m| Box::new(m) as Box<dyn Model>).collect(),
            input: short_column_input(cfg.lognormal_convention),
        })),
        Benchmark::Burgers => {
            let seed = SeedStream::new(cfg.seed).child(TAG_TRAINING).seed();
            let ens = BurgersEnsemble::build(&cfg.burgers_options(), seed)?;
            let mut models: Vec<Box<dyn Model>> = vec![Box::new(ens.fom.clone())];
            models.extend(ens.roms.iter().cloned().map(|r| Box::new(r) as Box<dyn Model>));
            Ok(Some(LoadedEnsemble { models, input: ens.input }))
        }
    }
}

/// Statistics of the full ensemble per the configured source.
pub fn cmd_pilot(cfg: &ExperimentConfig) -> Result<EnsembleStatistics> {
    cfg.validate()?;
    let Some(ens) = load_ensemble(cfg)? else {
        return Ok(cfg.custom_stats.clone().expect("validated"));
    };
    pilot_statistics(cfg, &ens)
}

fn pilot_statistics(cfg: &ExperimentConfig, ens: &LoadedEnsemble) -> Result<EnsembleStatistics> {
    let models = ens.model_refs();
    let seed = SeedStream::new(cfg.seed).child(TAG_PILOT).seed();
    let pilot = draw_pilot(&models, &ens.input, cfg.pilot_size(), seed)?;
    let costs: Vec<f64> = models.iter().map(|m| m.cost()).collect();
    let stats = estimate_statistics(&pilot, &costs)?;
    match (cfg.stats_source, cfg.benchmark) {
        (StatsSource::Pilot, _) => Ok(stats),
        (StatsSource::Paper, Benchmark::ShortColumn) => with_pilot_count(short_column_published_statistics(&stats.sigma)?, &stats),
        (StatsSource::Paper, Benchmark::Burgers) => with_pilot_count(burgers_published_statistics(&stats.sigma)?, &stats),
        (StatsSource::Paper, Benchmark::CustomStats) => unreachable!("rejected by validate"),
    }
}

fn with_pilot_count(mut published: EnsembleStatistics, pilot: &EnsembleStatistics) -> Result<EnsembleStatistics> {
    published.pilot_count = pilot.pilot_count;
    Ok(published)
}

pub fn cmd_select(stats: &EnsembleStatistics) -> Result<SelectionResult> {
    select_models(stats)
}

pub fn cmd_allocate(stats: &EnsembleStatistics, budget: f64, method: Method) -> Result<SamplingPlan> {
    match method {
        Method::Exhaustive => crate::allocation::brute_force_mip(stats, budget, 1 << 20),
        other => plan_for(other, stats, budget),
    }
}

/// Models used for estimation: the configured subset if any, else the selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selected {
    pub indices: Vec<usize>,
    pub selection: Option<SelectionResult>,
    pub statistics: EnsembleStatistics,
}

pub fn choose_models(cfg: &ExperimentConfig, full: &EnsembleStatistics) -> Result<Selected> {
    let (indices, selection) = match &cfg.models {
        Some(one_based) => (one_based.iter().map(|i| i - 1).collect::<Vec<_>>(), None),
        None => {
            let sel = select_models(full)?;
            (sel.selected_indices.clone(), Some(sel))
        }
    };
    let statistics = full.subset(&indices)?;
    Ok(Selected { indices, selection, statistics })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub model_ids: Vec<String>,
    pub plan: SamplingPlan,
    pub value: f64,
    pub cost: f64,
    pub seed: u64,
}

/// One estimate at `budget_over_w1 · w₁` with the selected models.
pub fn cmd_estimate(cfg: &ExperimentConfig, budget_over_w1: f64, method: Method) -> Result<EstimateSummary> {
    cfg.validate()?;
    let ens = load_ensemble(cfg)?.ok_or_else(|| Error::Config("custom statistics have no models to evaluate".into()))?;
    let full = pilot_statistics(cfg, &ens)?;
    let chosen = choose_models(cfg, &full)?;
    let plan = cmd_allocate(&chosen.statistics, budget_over_w1 * chosen.statistics.costs[0], method)?;
    let all = ens.model_refs();
    let models: Vec<&dyn Model> = chosen.indices.iter().map(|&i| all[i]).collect();
    let seed = SeedStream::new(cfg.seed).child(TAG_ESTIMATE).seed();
    let est = mfmc_estimate(&models[..plan.k()], &plan, &ens.input, seed)?;
    Ok(EstimateSummary { model_ids: chosen.statistics.ids.clone(), plan, value: est.value, cost: est.cost, seed })
}

/// One line of the results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub budget_over_w1: f64,
    pub method: Method,
    /// One count per selected model; Monte Carlo rows use only the first.
    pub counts: Option<Vec<u64>>,
    pub effective_budget: Option<f64>,
    pub rel_mse: Option<f64>,
    pub mse: Option<f64>,
    pub est_mean: Option<f64>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub model_ids: Vec<String>,
    pub master_seed: u64,
    pub reference: f64,
    pub reference_samples: usize,
    pub n_runs: usize,
    pub rows: Vec<TableRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ResultsTable {
    pub fn from_report(report: &ExperimentReport) -> Self {
        let k = report.model_ids.len();
        let w1 = report.costs[0];
        let rows = report
            .rows
            .iter()
            .map(|row| {
                let budget_over_w1 = row.budget / w1;
                let blank = |status: &str, reason: &str| TableRow {
                    budget_over_w1,
                    method: row.method,
                    counts: None,
                    effective_budget: None,
                    rel_mse: None,
                    mse: None,
                    est_mean: None,
                    status: status.into(),
                    reason: Some(reason.into()),
                };
                match &row.outcome {
                    RowOutcome::Complete(r) => {
                        let mut counts = r.plan.m.clone();
                        counts.resize(k, 0);
                        TableRow {
                            budget_over_w1,
                            method: row.method,
                            counts: Some(counts),
                            effective_budget: Some(r.plan.effective_budget(w1)),
                            rel_mse: Some(r.relative_mse),
                            mse: Some(r.empirical_mse),
                            est_mean: Some(r.estimate_mean),
                            status: "complete".into(),
                            reason: None,
                        }
                    }
                    RowOutcome::Infeasible { reason } => blank("infeasible", reason),
                    RowOutcome::Failed { reason } => blank("failed", reason),
                }
            })
            .collect();
        ResultsTable {
            model_ids: report.model_ids.clone(),
            master_seed: report.settings.seed,
            reference: report.reference,
            reference_samples: report.reference_samples,
            n_runs: report.settings.n_runs,
            rows,
        }
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["budget_over_w1".to_string(), "method".to_string()];
        h.extend((1..=self.model_ids.len()).map(|i| format!("m_{i}")));
        h.extend(["effective_budget", "rel_mse", "mse", "est_mean"].map(String::from));
        h
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.csv_header())?;
        let k = self.model_ids.len();
        for row in &self.rows {
            let mut rec = vec![row.budget_over_w1.to_string(), row.method.to_string()];
            match &row.counts {
                Some(c) => rec.extend(c.iter().map(u64::to_string)),
                None => rec.extend(std::iter::repeat_n(String::new(), k)),
            }
            rec.extend([opt(row.effective_budget), opt(row.rel_mse), opt(row.mse), opt(row.est_mean)]);
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    fn find(&self, budget_over_w1: f64, method: Method) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.budget_over_w1 == budget_over_w1 && r.method == method)
    }

    /// Plain-text rendering: Monte Carlo on the left, the modified allocation on
    /// the right with naive rounding in parentheses. MSE columns are scaled by a
    /// common power of ten printed in the header.
    pub fn render_text(&self) -> String {
        let mut budgets: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !budgets.contains(&r.budget_over_w1) {
                budgets.push(r.budget_over_w1);
            }
        }
        let scale = |pick: fn(&TableRow) -> Option<f64>| {
            let min = self.rows.iter().filter_map(pick).filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
            if min.is_finite() { min.log10().floor() as i32 } else { 0 }
        };
        let rel_exp = scale(|r| r.rel_mse);
        let abs_exp = scale(|r| r.mse);
        let fmt_scaled = |v: Option<f64>, e: i32| v.map(|x| format!("{:.2}", x / 10f64.powi(e))).unwrap_or("-".into());
        let pair = |a: String, b: Option<String>| match b {
            Some(b) => format!("{a} ({b})"),
            None => a,
        };

        let mut out = String::new();
        let _ = writeln!(
            out,
            "master seed {}, reference {} from {} samples, {} runs per row",
            self.master_seed, self.reference, self.reference_samples, self.n_runs
        );
        let _ = writeln!(out, "relative MSE in units of 1e{rel_exp}, MSE in units of 1e{abs_exp}");
        let mut header = vec!["p/w1".to_string(), "MC rel".into(), "MC mse".into(), "p/w1 eff".into()];
        header.extend(self.model_ids.iter().map(|id| format!("#{id}")));
        header.extend(["rel".to_string(), "mse".into()]);
        let mut lines = vec![header];
        for &b in &budgets {
            let mc = self.find(b, Method::Mc);
            let modi = self.find(b, Method::Modified);
            let naive = self.find(b, Method::NaiveRounded);
            let mut line = vec![
                b.to_string(),
                fmt_scaled(mc.and_then(|r| r.rel_mse), rel_exp),
                fmt_scaled(mc.and_then(|r| r.mse), abs_exp),
            ];
            let eff = |r: Option<&TableRow>| r.and_then(|r| r.effective_budget).map(|v| format!("{v:.2}"));
            line.push(pair(eff(modi).unwrap_or("-".into()), eff(naive)));
            for i in 0..self.model_ids.len() {
                let count = |r: Option<&TableRow>| r.and_then(|r| r.counts.as_ref()).map(|c| c[i].to_string());
                line.push(pair(count(modi).unwrap_or("-".into()), count(naive)));
            }
            line.push(pair(
                fmt_scaled(modi.and_then(|r| r.rel_mse), rel_exp),
                naive.map(|r| fmt_scaled(r.rel_mse, rel_exp)),
            ));
            line.push(pair(fmt_scaled(modi.and_then(|r| r.mse), abs_exp), naive.map(|r| fmt_scaled(r.mse, abs_exp))));
            lines.push(line);
        }
        let widths: Vec<usize> =
            (0..lines[0].len()).map(|c| lines.iter().map(|l| l[c].chars().count()).max().unwrap_or(0)).collect();
        for line in &lines {
            let cells: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            let _ = writeln!(out, "{}", cells.join("  "));
        }
        for r in self.rows.iter().filter(|r| r.reason.is_some()) {
            let _ = writeln!(out, "p/w1 = {} {}: {} ({})", r.budget_over_w1, r.method, r.status, r.reason.as_deref().unwrap_or(""));
        }
        out
    }
}

/// Everything an experiment produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub full_statistics: EnsembleStatistics,
    pub selected: Selected,
    pub report: ExperimentReport,
    pub table: ResultsTable,
}

impl ExperimentOutcome {
    pub fn all_complete(&self) -> bool {
        self.report.all_complete()
    }
}

pub fn cmd_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let ens = load_ensemble(cfg)?.ok_or_else(|| Error::Config("custom statistics have no models to evaluate".into()))?;
    let full_statistics = pilot_statistics(cfg, &ens)?;
    let selected = choose_models(cfg, &full_statistics)?;
    let all = ens.model_refs();
    let models: Vec<&dyn Model> = selected.indices.iter().map(|&i| all[i]).collect();
    let w1 = selected.statistics.costs[0];
    let settings = ExperimentSettings {
        budgets: cfg.budgets.iter().map(|b| b * w1).collect(),
        n_runs: cfg.n_runs,
        reference_samples: cfg.reference_samples,
        seed: cfg.seed,
        methods: cfg.methods.clone(),
    };
    let report = run_experiment(&models, &selected.statistics, &ens.input, &settings)?;
    let table = ResultsTable::from_report(&report);
    Ok(ExperimentOutcome { config: cfg.clone(), full_statistics, selected, report, table })
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes `results.csv`, `results.json`, `results.txt` and, with
/// `emit_plot_data`, `runs.csv` holding every per-run estimate. Returns the paths.
pub fn write_experiment_outputs(outcome: &ExperimentOutcome, dir: &Path, emit_plot_data: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let csv_path = dir.join("results.csv");
    outcome.table.write_csv(fs::File::create(&csv_path)?)?;
    written.push(csv_path);

    let json_path = dir.join("results.json");
    write_json(outcome, &json_path)?;
    written.push(json_path);

    let txt_path = dir.join("results.txt");
    fs::write(&txt_path, outcome.table.render_text())?;
    written.push(txt_path);

    if emit_plot_data {
        let runs_path = dir.join("runs.csv");
        let mut w = csv::Writer::from_path(&runs_path)?;
        w.write_record(["budget_over_w1", "method", "run", "estimate"])?;
        let w1 = outcome.report.costs[0];
        for row in &outcome.report.rows {
            if let Some(r) = row.report() {
                for (j, y) in r.per_run_estimates.iter().enumerate() {
                    w.write_record([(row.budget / w1).to_string(), row.method.to_string(), j.to_string(), y.to_string()])?;
                }
            }
        }
        w.flush()?;
        written.push(runs_path);
    }
    Ok(written)
}
