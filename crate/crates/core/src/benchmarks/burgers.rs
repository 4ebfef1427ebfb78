//! Inviscid Burgers equation `w_t + ½(w²)_x = s·e^{z₂x}` on `[0, L]`, solved with
//! first-order upwind differences and forward Euler.
//!
//! The inflow value `z₁` sits at `x = 0` as the left neighbour of node 1; nodes
//! `x^α = αΔx`, `α = 1..n`, are all evolved from the initial state `w ≡ 1`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurgersConfig {
    pub nodes: usize,
    pub length: f64,
    pub dt: f64,
    pub steps: usize,
    pub forcing_scale: f64,
    pub initial_value: f64,
}

impl Default for BurgersConfig {
    fn default() -> Self {
        BurgersConfig { nodes: 256, length: 100.0, dt: 0.1, steps: 100, forcing_scale: 0.02, initial_value: 1.0 }
    }
}

impl BurgersConfig {
    pub fn dx(&self) -> f64 {
        self.length / self.nodes as f64
    }

    pub fn final_time(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn grid(&self) -> DVector<f64> {
        let dx = self.dx();
        DVector::from_iterator(self.nodes, (1..=self.nodes).map(|a| a as f64 * dx))
    }

    pub fn initial_state(&self) -> DVector<f64> {
        DVector::from_element(self.nodes, self.initial_value)
    }

    /// Source term `s·e^{z₂x}` at the nodes.
    pub fn forcing(&self, z2: f64) -> DVector<f64> {
        self.grid().map(|x| self.forcing_scale * (z2 * x).exp())
    }

    fn validate(&self, z: &[f64]) -> Result<()> {
        if self.nodes < 2 || self.steps == 0 || !(self.dt > 0.0) || !(self.length > 0.0) {
            return Err(Error::InvalidInput(format!("invalid Burgers discretization {self:?}")));
        }
        if z.len() != 2 || !z.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!("Burgers takes two finite parameters, got {z:?}")));
        }
        if z[0] <= 0.0 {
            return Err(Error::InvalidInput(format!("inflow value must be positive for upwinding, got {}", z[0])));
        }
        Ok(())
    }
}

/// States at every time level, one column per level.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: DMatrix<f64>,
    pub dt: f64,
    /// Largest `|w|·Δt/Δx` seen; above 1 the explicit scheme is outside its stability bound.
    pub max_cfl: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> DVector<f64> {
        self.states.column(self.states.ncols() - 1).into_owned()
    }

    /// Spatial mean of the final state.
    pub fn qoi(&self) -> f64 {
        self.states.column(self.states.ncols() - 1).mean()
    }

    /// CSV with an `x` column and one column per selected time level.
    pub fn write_profiles_csv<W: Write>(&self, config: &BurgersConfig, levels: &[usize], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["x".to_string()];
        header.extend(levels.iter().map(|&l| format!("t={}", l as f64 * self.dt)));
        w.write_record(&header)?;
        let grid = config.grid();
        for a in 0..self.states.nrows() {
            let mut rec = vec![grid[a].to_string()];
            rec.extend(levels.iter().map(|&l| self.states[(a, l)].to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn upwind_step(w: &[f64], next: &mut [f64], inflow_sq: f64, courant: f64, source_dt: &[f64]) {
    let mut left = inflow_sq;
    for a in 0..w.len() {
        let sq = w[a] * w[a];
        next[a] = w[a] - 0.5 * courant * (sq - left) + source_dt[a];
        left = sq;
    }
}

fn run<F: FnMut(usize, &[f64]) -> Result<()>>(config: &BurgersConfig, z: &[f64], mut visit: F) -> Result<f64> {
    config.validate(z)?;
    let courant = config.dt / config.dx();
    let source_dt: Vec<f64> = config.forcing(z[1]).iter().map(|s| s * config.dt).collect();
    let mut w = config.initial_state().as_slice().to_vec();
    let mut next = vec![0.0; w.len()];
    let inflow_sq = z[0] * z[0];
    let cfl = |w: &[f64]| w.iter().fold(z[0].abs(), |m, v| m.max(v.abs())) * courant;
    let mut max_cfl = cfl(&w);
    visit(0, &w)?;
    for step in 1..=config.steps {
        upwind_step(&w, &mut next, inflow_sq, courant, &source_dt);
        std::mem::swap(&mut w, &mut next);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { step });
        }
        max_cfl = max_cfl.max(cfl(&w));
        visit(step, &w)?;
    }
    Ok(max_cfl)
}

/// Full trajectory (`n × (steps + 1)`).
pub fn burgers_solve(config: &BurgersConfig, z: &[f64]) -> Result<Trajectory> {
    let mut states = DMatrix::zeros(config.nodes, config.steps + 1);
    let max_cfl = run(config, z, |step, w| {
        states.column_mut(step).copy_from_slice(w);
        Ok(())
    })?;
    Ok(Trajectory { states, dt: config.dt, max_cfl })
}

/// Spatial mean of the state at the final time, without storing the trajectory.
pub fn burgers_qoi(config: &BurgersConfig, z: &[f64]) -> Result<f64> {
    let mut qoi = 0.0;
    let last = config.steps;
    run(config, z, |step, w| {
        if step == last {
            qoi = w.iter().sum::<f64>() / w.len() as f64;
        }
        Ok(())
    })?;
    Ok(qoi)
}
