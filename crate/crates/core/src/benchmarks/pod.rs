//! Proper orthogonal decomposition of Burgers snapshots and the Galerkin ROM.
//!
//! With `w ≈ w₀ + U_d ŵ`, the upwind step projects to
//! `ŵ ← ŵ − (Δt/2)(a − z₁²g + Bŵ + C(ŵ, ŵ)) + Δt·s·U_dᵀe^{z₂x}`, where
//! `D_x` is the bidiagonal forward difference (`1/Δx` on the diagonal,
//! `−1/Δx` below) and `g = U_dᵀe₁/Δx` carries the inflow value.

use std::io::{BufRead, BufReader, Read, Write};

use nalgebra::{DMatrix, DVector, SVD};
use rayon::prelude::*;

use super::burgers::{burgers_solve, BurgersConfig};
use crate::error::{Error, Result};

const RANK_TOLERANCE: f64 = 1e-12;

/// Concatenated centered snapshots `w(t_j) − w(t₀)` of every training run, all time levels.
pub fn snapshot_matrix(config: &BurgersConfig, training: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if training.is_empty() {
        return Err(Error::InvalidInput("no training parameters".into()));
    }
    let trajectories = training.par_iter().map(|z| burgers_solve(config, z)).collect::<Result<Vec<_>>>()?;
    let levels = config.steps + 1;
    let mut s = DMatrix::zeros(config.nodes, levels * training.len());
    for (r, t) in trajectories.iter().enumerate() {
        for j in 0..levels {
            let w0 = t.states.column(0);
            s.column_mut(r * levels + j).copy_from(&(t.states.column(j) - w0));
        }
    }
    Ok(s)
}

/// Left singular vectors of a snapshot matrix, truncated at its numerical rank.
#[derive(Clone, Debug)]
pub struct PodBasis {
    pub modes: DMatrix<f64>,
    pub singular_values: DVector<f64>,
}

impl PodBasis {
    pub fn from_snapshots(snapshots: &DMatrix<f64>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InvalidInput("empty snapshot matrix".into()));
        }
        let svd = SVD::new(snapshots.clone(), true, false);
        let u = svd.u.expect("left vectors requested");
        let s = svd.singular_values;
        let cutoff = RANK_TOLERANCE * s[0];
        let rank = s.iter().take_while(|&&v| v > cutoff).count();
        Ok(PodBasis { modes: u.columns(0, rank).into_owned(), singular_values: s })
    }

    pub fn rank(&self) -> usize {
        self.modes.ncols()
    }

    pub fn leading(&self, d: usize) -> Result<DMatrix<f64>> {
        if d == 0 || d > self.rank() {
            return Err(Error::RankDeficient { rank: self.rank(), requested: d });
        }
        Ok(self.modes.columns(0, d).into_owned())
    }

    /// `‖S − U_dU_dᵀS‖_F / ‖S‖_F`.
    pub fn reconstruction_error(&self, snapshots: &DMatrix<f64>, d: usize) -> Result<f64> {
        let u = self.leading(d)?;
        let residual = snapshots - &u * (u.transpose() * snapshots);
        Ok(residual.norm() / snapshots.norm())
    }
}

/// Reduced operators for one basis dimension.
#[derive(Clone, Debug)]
pub struct SnapshotBasis {
    pub config: BurgersConfig,
    pub basis: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub w0: DVector<f64>,
    pub a: DVector<f64>,
    pub b: DMatrix<f64>,
    /// `d × d²`, column `j·d + k` holds `Σ_α (U_dᵀD_x)_{·α} u^α_j u^α_k`.
    pub c: DMatrix<f64>,
    pub g: DVector<f64>,
    column_means: DVector<f64>,
}

fn apply_dx(v: &DVector<f64>, dx: f64) -> DVector<f64> {
    DVector::from_fn(v.len(), |a, _| (v[a] - if a == 0 { 0.0 } else { v[a - 1] }) / dx)
}

fn dx_transpose_apply(u: &DMatrix<f64>, dx: f64) -> DMatrix<f64> {
    // rows of U_dᵀD_x: (D_xᵀU_d)ᵀ, and D_xᵀ is upper bidiagonal
    let n = u.nrows();
    let m = DMatrix::from_fn(n, u.ncols(), |a, j| (u[(a, j)] - if a + 1 < n { u[(a + 1, j)] } else { 0.0 }) / dx);
    m.transpose()
}

impl SnapshotBasis {
    pub fn new(config: BurgersConfig, pod: &PodBasis, d: usize) -> Result<Self> {
        let u = pod.leading(d)?;
        if u.nrows() != config.nodes {
            return Err(Error::InvalidInput(format!("basis has {} rows, grid has {} nodes", u.nrows(), config.nodes)));
        }
        let dx = config.dx();
        let w0 = config.initial_state();
        let projector = dx_transpose_apply(&u, dx);
        let a = &u.transpose() * apply_dx(&w0.component_mul(&w0), dx);
        let b = 2.0 * &projector * DMatrix::from_diagonal(&w0) * &u;
        let mut c = DMatrix::zeros(d, d * d);
        for alpha in 0..config.nodes {
            for j in 0..d {
                for k in 0..d {
                    let ujk = u[(alpha, j)] * u[(alpha, k)];
                    for i in 0..d {
                        c[(i, j * d + k)] += projector[(i, alpha)] * ujk;
                    }
                }
            }
        }
        let g = u.row(0).transpose() / dx;
        let column_means = DVector::from_fn(d, |j, _| u.column(j).mean());
        Ok(SnapshotBasis {
            config,
            basis: u,
            singular_values: pod.singular_values.clone(),
            w0,
            a,
            b,
            c,
            g,
            column_means,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn quadratic(&self, w: &DVector<f64>) -> DVector<f64> {
        let d = self.dim();
        let kron = DVector::from_fn(d * d, |jk, _| w[jk / d] * w[jk % d]);
        &self.c * kron
    }

    pub fn reconstruct(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.w0 + &self.basis * w
    }

    fn run<F: FnMut(usize, &DVector<f64>)>(&self, z: &[f64], mut visit: F) -> Result<DVector<f64>> {
        if z.len() != 2 || !z.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!("Burgers takes two finite parameters, got {z:?}")));
        }
        let cfg = &self.config;
        let half = 0.5 * cfg.dt;
        let drift = &self.a - z[0] * z[0] * &self.g;
        let source = cfg.dt * (self.basis.transpose() * cfg.forcing(z[1]));
        let mut w = DVector::zeros(self.dim());
        visit(0, &w);
        for step in 1..=cfg.steps {
            let rate = &drift + &self.b * &w + self.quadratic(&w);
            w = w - half * rate + &source;
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteState { step });
            }
            visit(step, &w);
        }
        Ok(w)
    }

    /// Reduced coefficients at every time level (`d × (steps + 1)`).
    pub fn rom_advance(&self, z: &[f64]) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(self.dim(), self.config.steps + 1);
        self.run(z, |step, w| out.column_mut(step).copy_from(w))?;
        Ok(out)
    }

    /// Full-space trajectory `w₀ + U_dŵ` at every time level.
    pub fn rom_trajectory(&self, z: &[f64]) -> Result<DMatrix<f64>> {
        let coeffs = self.rom_advance(z)?;
        let mut out = &self.basis * coeffs;
        for mut col in out.column_iter_mut() {
            col += &self.w0;
        }
        Ok(out)
    }

    /// Spatial mean of the reconstructed state at the final time.
    pub fn rom_qoi(&self, z: &[f64]) -> Result<f64> {
        let w = self.run(z, |_, _| {})?;
        Ok(self.w0.mean() + self.column_means.dot(&w))
    }
}

/// Writes a matrix as CSV preceded by a `# rows,cols` shape line.
pub fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, mut writer: W) -> Result<()> {
    writeln!(writer, "# {},{}", m.nrows(), m.ncols())?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for r in 0..m.nrows() {
        w.write_record(m.row(r).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv<R: Read>(reader: R) -> Result<DMatrix<f64>> {
    let mut reader = BufReader::new(reader);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let shape = header.trim().strip_prefix('#').map(str::trim).unwrap_or_default();
    let (rows, cols) = shape
        .split_once(',')
        .and_then(|(r, c)| Some((r.trim().parse::<usize>().ok()?, c.trim().parse::<usize>().ok()?)))
        .ok_or_else(|| Error::InvalidInput(format!("bad matrix shape header {:?}", header.trim())))?;
    let mut values = Vec::with_capacity(rows * cols);
    let mut csv = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    for record in csv.records() {
        let record = record?;
        if record.len() != cols {
            return Err(Error::InvalidInput(format!("expected {cols} columns, found {}", record.len())));
        }
        for field in record.iter() {
            values.push(field.parse::<f64>().map_err(|e| Error::InvalidInput(format!("{field:?}: {e}")))?);
        }
    }
    if values.len() != rows * cols {
        return Err(Error::InvalidInput(format!("expected {rows} rows, found {}", values.len() / cols.max(1))));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> (BurgersConfig, Vec<Vec<f64>>, DMatrix<f64>, PodBasis) {
        let cfg = BurgersConfig { nodes: 64, steps: 40, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let training: Vec<Vec<f64>> =
            (0..6).map(|_| vec![rng.random_range(0.5..3.5), rng.random_range(2e-4..2e-3)]).collect();
        let s = snapshot_matrix(&cfg, &training).unwrap();
        let pod = PodBasis::from_snapshots(&s).unwrap();
        (cfg, training, s, pod)
    }

    #[test]
    fn basis_is_orthonormal_and_values_sorted() {
        let (cfg, _, _, pod) = small();
        let basis = SnapshotBasis::new(cfg, &pod, pod.rank().min(10)).unwrap();
        let gram = basis.basis.transpose() * &basis.basis;
        assert!((gram - DMatrix::identity(basis.dim(), basis.dim())).amax() <= 1e-10);
        let s = &pod.singular_values;
        assert!(s.iter().zip(s.iter().skip(1)).all(|(a, b)| a >= b));
    }

    #[test]
    fn quadratic_term_matches_reconstruction() {
        let (cfg, _, _, pod) = small();
        let basis = SnapshotBasis::new(cfg, &pod, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let w = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
            let uw = &basis.basis * &w;
            let direct = basis.basis.transpose() * apply_dx(&uw.component_mul(&uw), cfg.dx());
            assert!((basis.quadratic(&w) - direct).amax() <= 1e-10);
        }
    }

    #[test]
    fn full_rank_rom_reproduces_training_trajectories() {
        let (cfg, training, _, pod) = small();
        let basis = SnapshotBasis::new(cfg, &pod, pod.rank()).unwrap();
        for z in &training {
            let fom = burgers_solve(&cfg, z).unwrap().states;
            let rom = basis.rom_trajectory(z).unwrap();
            assert!((&rom - &fom).amax() / fom.amax() <= 1e-8);
            assert!((basis.rom_qoi(z).unwrap() - fom.column(cfg.steps).mean()).abs() <= 1e-8);
        }
    }

    #[test]
    fn reduced_initial_state_is_zero() {
        let (cfg, training, _, pod) = small();
        let basis = SnapshotBasis::new(cfg, &pod, 3).unwrap();
        let coeffs = basis.rom_advance(&training[0]).unwrap();
        assert!(coeffs.column(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reconstruction_error_nonincreasing() {
        let (_, _, s, pod) = small();
        let errs: Vec<f64> = [1, 3, 5, 10].iter().map(|&d| pod.reconstruction_error(&s, d).unwrap()).collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-14), "{errs:?}");
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let (cfg, _, _, pod) = small();
        let too_many = pod.rank() + 1;
        assert!(matches!(SnapshotBasis::new(cfg, &pod, too_many), Err(Error::RankDeficient { .. })));
        assert!(pod.leading(0).is_err());
    }

    #[test]
    fn matrix_csv_round_trip() {
        let m = DMatrix::from_fn(3, 4, |r, c| r as f64 * 0.1 - c as f64 / 3.0);
        let mut buf = Vec::new();
        write_matrix_csv(&m, &mut buf).unwrap();
        assert!(buf.starts_with(b"# 3,4\n"));
        assert_eq!(read_matrix_csv(&buf[..]).unwrap(), m);
        assert!(read_matrix_csv(&b"3,4\n1,2,3,4\n"[..]).is_err());
    }
}
