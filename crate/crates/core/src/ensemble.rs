//! Paired pilot sampling and the ensemble statistics (σ, ρ₁, w) that drive
//! model selection and sample allocation.

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::input::RandomInputSpec;
use crate::model::{check_costs, evaluate_at, Model};
use crate::rng::SeedStream;

/// Model outputs on shared realizations: row `j` holds every model evaluated at `z_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PilotMatrix {
    ids: Vec<String>,
    rows: usize,
    values: Vec<f64>,
}

impl PilotMatrix {
    pub fn from_rows(ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = ids.len();
        if k == 0 {
            return Err(Error::InvalidInput("pilot matrix needs at least one model".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != k) {
            return Err(Error::InvalidInput(format!("row {bad} has {} entries, expected {k}", rows[bad].len())));
        }
        let n = rows.len();
        Ok(PilotMatrix { ids, rows: n, values: rows.into_iter().flatten().collect() })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn models(&self) -> usize {
        self.ids.len()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let k = self.models();
        &self.values[j * k..(j + 1) * k]
    }

    pub fn get(&self, row: usize, model: usize) -> f64 {
        self.values[row * self.models() + model]
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.rows).map(|j| self.get(j, i)).collect()
    }

    /// Header of model ids, one row per realization.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.ids)?;
        for j in 0..self.rows {
            w.write_record(self.row(j).iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let ids: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad value `{s}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        PilotMatrix::from_rows(ids, rows)
    }
}

/// Evaluate every model on the same `n_pilot` i.i.d. realizations of the input.
///
/// Inputs are drawn sequentially from `seed`, so the matrix does not depend on
/// how the evaluations are scheduled, and reordering `models` only reorders columns.
pub fn draw_pilot(
    models: &[&dyn Model],
    input: &RandomInputSpec,
    n_pilot: usize,
    seed: u64,
) -> Result<PilotMatrix> {
    if models.is_empty() {
        return Err(Error::InvalidInput("no models supplied".into()));
    }
    if n_pilot < 2 {
        return Err(Error::InvalidInput(format!("pilot size must be at least 2, got {n_pilot}")));
    }
    let mut rng = SeedStream::new(seed).rng();
    let inputs: Vec<Vec<f64>> = (0..n_pilot).map(|_| input.sample(&mut rng)).collect();

    let rows: Vec<Result<Vec<f64>>> = inputs
        .par_iter()
        .enumerate()
        .map(|(j, z)| models.iter().map(|m| evaluate_at(*m, z, j)).collect())
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    PilotMatrix::from_rows(models.iter().map(|m| m.id().to_string()).collect(), rows)
}

/// Per-model standard deviations, correlations with the first (high-fidelity)
/// model, and evaluation costs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStatistics {
    pub ids: Vec<String>,
    pub sigma: Vec<f64>,
    pub rho1: Vec<f64>,
    pub costs: Vec<f64>,
    pub pilot_count: usize,
}

impl EnsembleStatistics {
    pub fn new(ids: Vec<String>, sigma: Vec<f64>, rho1: Vec<f64>, costs: Vec<f64>, pilot_count: usize) -> Result<Self> {
        let s = EnsembleStatistics { ids, sigma, rho1, costs, pilot_count };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.sigma.len();
        if k == 0 {
            return Err(Error::InvalidInput("statistics describe no models".into()));
        }
        if self.rho1.len() != k || self.costs.len() != k || self.ids.len() != k {
            return Err(Error::InvalidInput(format!(
                "length mismatch: ids {}, sigma {k}, rho1 {}, costs {}",
                self.ids.len(),
                self.rho1.len(),
                self.costs.len()
            )));
        }
        if self.rho1[0] != 1.0 {
            return Err(Error::InvalidInput(format!("rho1[0] must be exactly 1, got {}", self.rho1[0])));
        }
        for i in 0..k {
            if !(self.sigma[i] > 0.0 && self.sigma[i].is_finite()) {
                return Err(Error::InvalidInput(format!("sigma[{i}] = {} must be positive", self.sigma[i])));
            }
            if !(self.rho1[i].abs() <= 1.0) {
                return Err(Error::InvalidInput(format!("|rho1[{i}]| = {} exceeds 1", self.rho1[i])));
            }
            if !(self.costs[i] > 0.0 && self.costs[i].is_finite()) {
                return Err(Error::InvalidInput(format!("cost[{i}] = {} must be positive", self.costs[i])));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    /// Restrict to `indices` (in the given order).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.first() != Some(&0) {
            return Err(Error::InvalidInput("a subset must start with the high-fidelity model (index 0)".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.k()) {
            return Err(Error::InvalidInput(format!("model index {bad} out of range for {} models", self.k())));
        }
        let pick = |v: &[f64]| indices.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Ok(EnsembleStatistics {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            sigma: pick(&self.sigma),
            rho1: pick(&self.rho1),
            costs: pick(&self.costs),
            pilot_count: self.pilot_count,
        })
    }

    /// Squared correlations with a trailing zero appended (`ρ²_{k+1} = 0`).
    pub(crate) fn rho_sq_extended(&self) -> Vec<f64> {
        self.rho1.iter().map(|r| r * r).chain(std::iter::once(0.0)).collect()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample statistics of a pilot matrix. Variances use the unbiased `n − 1` divisor.
pub fn estimate_statistics(pilot: &PilotMatrix, costs: &[f64]) -> Result<EnsembleStatistics> {
    let n = pilot.rows();
    let k = pilot.models();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 pilot rows, got {n}")));
    }
    if costs.len() != k {
        return Err(Error::InvalidInput(format!("{} costs for {k} models", costs.len())));
    }
    if let Some(pos) = pilot.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteOutput { model: pilot.ids[pos % k].clone(), sample: pos / k });
    }

    let columns: Vec<Vec<f64>> = (0..k).map(|i| pilot.column(i)).collect();
    let means: Vec<f64> = columns.iter().map(|c| mean(c)).collect();
    let centered: Vec<Vec<f64>> = columns
        .iter()
        .zip(&means)
        .map(|(c, m)| c.iter().map(|v| v - m).collect())
        .collect();
    let ss: Vec<f64> = centered.iter().map(|c| c.iter().map(|d| d * d).sum()).collect();
    for (i, &s) in ss.iter().enumerate() {
        if s <= 0.0 {
            return Err(Error::DegenerateModel { model: pilot.ids[i].clone(), index: i });
        }
    }
    let sigma: Vec<f64> = ss.iter().map(|s| (s / (n - 1) as f64).sqrt()).collect();
    let mut rho1 = Vec::with_capacity(k);
    rho1.push(1.0);
    for i in 1..k {
        let cross: f64 = centered[0].iter().zip(&centered[i]).map(|(a, b)| a * b).sum();
        rho1.push((cross / (ss[0] * ss[i]).sqrt()).clamp(-1.0, 1.0));
    }
    EnsembleStatistics::new(pilot.ids.clone(), sigma, rho1, costs.to_vec(), n)
}

/// Average wall-clock seconds per evaluation of each model.
///
/// Machine dependent; for reporting alongside nominal costs, never as a substitute for them.
pub fn measure_costs(models: &[&dyn Model], input: &RandomInputSpec, samples: usize, seed: u64) -> Result<Vec<f64>> {
    check_costs(models)?;
    let samples = samples.max(1);
    let mut rng = SeedStream::new(seed).rng();
    let inputs: Vec<Vec<f64>> = (0..samples).map(|_| input.sample(&mut rng)).collect();
    models
        .iter()
        .map(|m| {
            let start = Instant::now();
            for (j, z) in inputs.iter().enumerate() {
                std::hint::black_box(evaluate_at(*m, z, j)?);
            }
            Ok(start.elapsed().as_secs_f64() / samples as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::InputDistribution;
    use crate::model::FnModel;

    fn unit_input(dim: usize) -> RandomInputSpec {
        RandomInputSpec::new(vec![InputDistribution::Uniform { low: 0.0, high: 1.0 }; dim]).unwrap()
    }

    fn matrix(cols: &[&[f64]]) -> PilotMatrix {
        let n = cols[0].len();
        let rows = (0..n).map(|j| cols.iter().map(|c| c[j]).collect()).collect();
        PilotMatrix::from_rows((0..cols.len()).map(|i| format!("f{}", i + 1)).collect(), rows).unwrap()
    }

    #[test]
    fn constant_model_fills_matrix() {
        let c = FnModel::new("c", 1.0, |_: &[f64]| 3.25);
        let p = draw_pilot(&[&c], &unit_input(2), 10, 1).unwrap();
        assert!((0..10).all(|j| p.get(j, 0) == 3.25));
    }

    #[test]
    fn pilot_rejects_tiny_sample_and_reports_failures() {
        let f = FnModel::new("f", 1.0, |z: &[f64]| z[0]);
        assert!(draw_pilot(&[&f], &unit_input(1), 1, 0).is_err());
        let bad = FnModel::new("bad", 1.0, |z: &[f64]| if z[0] > 0.5 { f64::NAN } else { 0.0 });
        match draw_pilot(&[&f, &bad], &unit_input(1), 50, 3) {
            Err(Error::NonFiniteOutput { model, .. }) => assert_eq!(model, "bad"),
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn permuting_models_permutes_columns() {
        let f = FnModel::new("f", 1.0, |z: &[f64]| z[0] + z[1]);
        let g = FnModel::new("g", 1.0, |z: &[f64]| z[0] * z[1]);
        let a = draw_pilot(&[&f, &g], &unit_input(2), 20, 9).unwrap();
        let b = draw_pilot(&[&g, &f], &unit_input(2), 20, 9).unwrap();
        assert_eq!(a.column(0), b.column(1));
        assert_eq!(a.column(1), b.column(0));
        assert_eq!(a, draw_pilot(&[&f, &g], &unit_input(2), 20, 9).unwrap());
    }

    #[test]
    fn affine_models_are_perfectly_correlated() {
        let f = FnModel::new("f", 1.0, |z: &[f64]| z[0]);
        let g = FnModel::new("g", 0.5, |z: &[f64]| 2.0 * z[0] + 1.0);
        let p = draw_pilot(&[&f, &g], &unit_input(1), 500, 2).unwrap();
        let s = estimate_statistics(&p, &[1.0, 0.5]).unwrap();
        assert!((s.rho1[1] - 1.0).abs() < 1e-12);
        assert!((s.sigma[1] / s.sigma[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn self_and_negated_columns() {
        let a = [1.0, 4.0, 2.0, 8.0, 5.0];
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        let s = estimate_statistics(&matrix(&[&a, &a, &neg]), &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.rho1[0], 1.0);
        assert!((s.rho1[1] - 1.0).abs() < 1e-15);
        assert!((s.rho1[2] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn toy_matrix_matches_raw_moment_formula() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [2.0, 1.0, 4.0, 3.0];
        // Hand computation: deviations (−1.5, −.5, .5, 1.5) and (−.5, −1.5, 1.5, .5)
        // give cross sum 3 and squared sums 5, so ρ = 3/5.
        let s = estimate_statistics(&matrix(&[&a, &b]), &[2.0, 1.0]).unwrap();
        let n = 4.0;
        let raw = |x: &[f64], y: &[f64]| {
            let sxy: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
            (sxy - x.iter().sum::<f64>() * y.iter().sum::<f64>() / n) / (n - 1.0)
        };
        let rho = raw(&a, &b) / (raw(&a, &a) * raw(&b, &b)).sqrt();
        assert!((s.rho1[1] - 0.6).abs() < 1e-15);
        assert!((s.rho1[1] - rho).abs() < 1e-15);
        assert!((s.sigma[0] - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_variance_column_is_named() {
        let a = [1.0, 2.0, 3.0];
        let c = [7.0, 7.0, 7.0];
        match estimate_statistics(&matrix(&[&a, &c]), &[1.0, 1.0]) {
            Err(Error::DegenerateModel { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shift_invariance() {
        let a = [0.3, 1.7, 2.2, 0.9, 4.1];
        let b = [1.0, 2.5, 2.0, 1.1, 3.3];
        let shifted: Vec<f64> = b.iter().map(|v| v + 1e3).collect();
        let s1 = estimate_statistics(&matrix(&[&a, &b]), &[1.0, 1.0]).unwrap();
        let s2 = estimate_statistics(&matrix(&[&a, &shifted]), &[1.0, 1.0]).unwrap();
        assert!((s1.rho1[1] - s2.rho1[1]).abs() < 1e-10);
        assert!((s1.sigma[1] - s2.sigma[1]).abs() < 1e-10);
    }

    #[test]
    fn csv_round_trip() {
        let p = matrix(&[&[0.1, 1.0 / 3.0], &[2.5e-9, -7.0]]);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("f1,f2\n"));
        assert_eq!(PilotMatrix::read_csv(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn subset_keeps_high_fidelity_first() {
        let s = EnsembleStatistics::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![1.0, 2.0, 3.0],
            vec![1.0, 0.9, 0.5],
            vec![10.0, 1.0, 0.1],
            100,
        )
        .unwrap();
        let sub = s.subset(&[0, 2]).unwrap();
        assert_eq!(sub.ids, vec!["a", "c"]);
        assert_eq!(sub.costs, vec![10.0, 0.1]);
        assert!(s.subset(&[1, 2]).is_err());
    }
}
