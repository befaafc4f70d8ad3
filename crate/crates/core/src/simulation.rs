//! Gaussian paths on uniform grids.
//!
//! Paths are drawn as `L z` with `L` the Cholesky factor of the covariance
//! matrix at `t_1..t_n`. Path `k` of an ensemble draws its normals from
//! ChaCha8 stream `k` keyed by the master seed, so the ensemble does not
//! depend on how the work is split across threads.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::CovModel;

/// Jitter multipliers tried in order, relative to the mean diagonal.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6];

#[derive(Debug, Error)]
pub enum SimError {
    #[error("grid needs n >= 2 and T > 0 (got n = {n}, T = {horizon})")]
    InvalidGrid { n: usize, horizon: f64 },
    #[error("path count must be at least 1")]
    NoPaths,
    #[error("matrix is not positive semi-definite: factorization failed at jitter {jitter}")]
    NotPsd { jitter: f64 },
    #[error("increment row has length {got}, expected {expected}")]
    IncrementLength { got: usize, expected: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimGrid {
    horizon: f64,
    n: usize,
}

impl SimGrid {
    pub fn new(horizon: f64, n: usize) -> Result<Self, SimError> {
        if n < 2 || !(horizon > 0.0 && horizon.is_finite()) {
            return Err(SimError::InvalidGrid { n, horizon });
        }
        Ok(Self { horizon, n })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.n as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i == self.n {
            self.horizon
        } else {
            i as f64 * self.step()
        }
    }

    /// `t_0, ..., t_n`.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.time(i)).collect()
    }

    /// Index of the grid point closest to `t`, clamped to the grid.
    pub fn index_of(&self, t: f64) -> usize {
        let i = (t / self.step()).round();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.n)
        }
    }
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    fn mean_diag(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (0..self.n).map(|i| self.get(i, i)).sum::<f64>() / self.n as f64
    }

    /// `L Lᵀ` for a lower factor.
    pub fn gram_lower(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..=j).map(|k| self.get(i, k) * self.get(j, k)).sum();
                out.data[i * n + j] = s;
                out.data[j * n + i] = s;
            }
        }
        out
    }
}

/// `C[i][j] = R(t_{i+1}, t_{j+1})`; `t_0` is left out since `X_0 = 0`.
pub fn cov_matrix(model: &CovModel, grid: &SimGrid) -> Matrix {
    let n = grid.n();
    let t = grid.times();
    let mut c = Matrix::zeros(n);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| model.cov(t[i + 1], t[j + 1])).collect())
        .collect();
    for (i, r) in rows.into_iter().enumerate() {
        for (j, v) in r.into_iter().enumerate() {
            c.data[i * n + j] = v;
            c.data[j * n + i] = v;
        }
    }
    c
}

/// Lower factor of `c + δ I` with the smallest ladder jitter that works.
///
/// A zero matrix factors as `L = 0`, `δ = 0`.
pub fn cholesky_psd(c: &Matrix) -> Result<(Matrix, f64), SimError> {
    let scale = c.mean_diag();
    if c.data.iter().all(|&v| v == 0.0) {
        return Ok((Matrix::zeros(c.n), 0.0));
    }
    let mut last = 0.0;
    for mult in JITTER_LADDER {
        let delta = mult * scale;
        last = delta;
        if let Some(l) = cholesky(c, delta) {
            return Ok((l, delta));
        }
    }
    Err(SimError::NotPsd { jitter: last })
}

fn cholesky(c: &Matrix, delta: f64) -> Option<Matrix> {
    let n = c.n;
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut d = c.get(j, j) + delta;
        for k in 0..j {
            d -= l.data[j * n + k] * l.data[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l.data[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = c.get(i, j);
            let (ri, rj) = (&l.data[i * n..i * n + j], &l.data[j * n..j * n + j]);
            for k in 0..j {
                s -= ri[k] * rj[k];
            }
            l.data[i * n + j] = s / djj;
        }
    }
    Some(l)
}

/// Simulated paths, one row of `n + 1` values per path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsemble {
    pub grid: SimGrid,
    pub paths: Vec<Vec<f64>>,
    pub seed: u64,
    pub first_stream: u64,
    pub model: String,
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMeta {
    pub model: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub jitter: f64,
}

impl PathEnsemble {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn meta(&self) -> EnsembleMeta {
        EnsembleMeta {
            model: self.model.clone(),
            seed: self.seed,
            n: self.grid.n(),
            m: self.paths.len(),
            jitter: self.jitter,
        }
    }

    /// CSV with header `t_0,...,t_n` and one path per line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record((0..=self.grid.n()).map(|i| format!("t_{i}")))?;
        for p in &self.paths {
            out.serialize(p)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_meta<W: Write>(&self, w: W) -> Result<(), SimError> {
        serde_json::to_writer_pretty(w, &self.meta())?;
        Ok(())
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn export(&self, dir: &std::path::Path, stem: &str) -> Result<(), SimError> {
        std::fs::create_dir_all(dir)?;
        let csv_file = std::fs::File::create(dir.join(format!("{stem}.csv")))?;
        self.write_csv(std::io::BufWriter::new(csv_file))?;
        let meta_file = std::fs::File::create(dir.join(format!("{stem}.json")))?;
        self.write_meta(std::io::BufWriter::new(meta_file))
    }
}

/// Generator for stream `k` of a master seed.
pub fn substream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn apply_lower(l: &Matrix, z: &[f64], sign: f64) -> Vec<f64> {
    let n = l.dim();
    let mut path = Vec::with_capacity(n + 1);
    path.push(0.0);
    for i in 0..n {
        let row = &l.row(i)[..=i];
        let s: f64 = row.iter().zip(z).map(|(a, b)| a * b).sum();
        path.push(sign * s);
    }
    path
}

/// Factor for a model on a grid, with the jitter used.
pub fn factor(model: &CovModel, grid: &SimGrid) -> Result<(Matrix, f64), SimError> {
    cholesky_psd(&cov_matrix(model, grid))
}

/// `m` paths from streams `first_stream .. first_stream + m`.
pub fn sample_paths_from(
    model: &CovModel,
    grid: &SimGrid,
    m: usize,
    seed: u64,
    first_stream: u64,
) -> Result<PathEnsemble, SimError> {
    if m == 0 {
        return Err(SimError::NoPaths);
    }
    let (l, jitter) = factor(model, grid)?;
    Ok(sample_with_factor(&l, jitter, model, grid, m, seed, first_stream))
}

/// Sampling with a precomputed factor, for repeated ensembles on one grid.
pub fn sample_with_factor(
    l: &Matrix,
    jitter: f64,
    model: &CovModel,
    grid: &SimGrid,
    m: usize,
    seed: u64,
    first_stream: u64,
) -> PathEnsemble {
    let n = grid.n();
    let paths = (0..m as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, first_stream + k);
            apply_lower(l, &normals(&mut rng, n), 1.0)
        })
        .collect();
    PathEnsemble {
        grid: *grid,
        paths,
        seed,
        first_stream,
        model: model.descriptor(),
        jitter,
    }
}

pub fn sample_paths(model: &CovModel, grid: &SimGrid, m: usize, seed: u64) -> Result<PathEnsemble, SimError> {
    sample_paths_from(model, grid, m, seed, 0)
}

/// `2 * pairs` paths; rows `2k` and `2k + 1` are `L z` and `-L z`.
pub fn sample_paths_antithetic(
    model: &CovModel,
    grid: &SimGrid,
    pairs: usize,
    seed: u64,
) -> Result<PathEnsemble, SimError> {
    if pairs == 0 {
        return Err(SimError::NoPaths);
    }
    let (l, jitter) = factor(model, grid)?;
    let n = grid.n();
    let paths = (0..pairs as u64)
        .into_par_iter()
        .flat_map_iter(|k| {
            let z = normals(&mut substream(seed, k), n);
            [apply_lower(&l, &z, 1.0), apply_lower(&l, &z, -1.0)]
        })
        .collect();
    Ok(PathEnsemble {
        grid: *grid,
        paths,
        seed,
        first_stream: 0,
        model: model.descriptor(),
        jitter,
    })
}

/// Paths of `X_t = ∫ κ(t - s) dW_s` with the Brownian increments kept.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEnsemble {
    pub ensemble: PathEnsemble,
    /// `ΔW_j = W_{t_{j+1}} - W_{t_j}`, `n` per path.
    pub increments: Vec<Vec<f64>>,
}

/// `X_{t_i} = Σ_{j<i} κ(t_i - t_{j+½}) ΔW_j`.
pub fn kernel_path_from_increments<K>(kappa: K, grid: &SimGrid, dw: &[f64]) -> Result<Vec<f64>, SimError>
where
    K: Fn(f64) -> f64,
{
    let n = grid.n();
    if dw.len() != n {
        return Err(SimError::IncrementLength {
            got: dw.len(),
            expected: n,
        });
    }
    let h = grid.step();
    // κ depends on i - j only
    let weights: Vec<f64> = (0..n).map(|d| kappa((d as f64 + 0.5) * h)).collect();
    let mut path = vec![0.0; n + 1];
    for (i, x) in path.iter_mut().enumerate().skip(1) {
        *x = (0..i).map(|j| weights[i - 1 - j] * dw[j]).sum();
    }
    Ok(path)
}

pub fn sample_kernel_path<K>(
    kappa: K,
    descriptor: &str,
    grid: &SimGrid,
    m: usize,
    seed: u64,
) -> Result<KernelEnsemble, SimError>
where
    K: Fn(f64) -> f64 + Sync,
{
    if m == 0 {
        return Err(SimError::NoPaths);
    }
    let n = grid.n();
    let sd = grid.step().sqrt();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..m as u64)
        .into_par_iter()
        .map(|k| {
            let dw: Vec<f64> = normals(&mut substream(seed, k), n).into_iter().map(|z| z * sd).collect();
            let path = kernel_path_from_increments(&kappa, grid, &dw).expect("increment length matches grid");
            (path, dw)
        })
        .collect();
    let (paths, increments) = rows.into_iter().unzip();
    Ok(KernelEnsemble {
        ensemble: PathEnsemble {
            grid: *grid,
            paths,
            seed,
            first_stream: 0,
            model: descriptor.to_string(),
            jitter: 0.0,
        },
        increments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Kappa, QShape};

    fn mean_var(xs: impl Iterator<Item = f64>) -> (f64, f64, usize) {
        let v: Vec<f64> = xs.collect();
        let m = v.len() as f64;
        let mean = v.iter().sum::<f64>() / m;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        (mean, var, v.len())
    }

    #[test]
    fn brownian_matrix_and_factor() {
        let g = SimGrid::new(1.0, 2).unwrap();
        let c = cov_matrix(&CovModel::fbm(0.5, 1.0).unwrap(), &g);
        assert_eq!(c, Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 1.0]]));
        let (l, d) = cholesky_psd(&c).unwrap();
        assert_eq!(d, 0.0);
        let r = 0.5f64.sqrt();
        for (got, want) in [(l.get(0, 0), r), (l.get(1, 0), r), (l.get(1, 1), r), (l.get(0, 1), 0.0)] {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_and_zero() {
        let (l, d) = cholesky_psd(&Matrix::identity(4)).unwrap();
        assert_eq!((l, d), (Matrix::identity(4), 0.0));
        let (l, d) = cholesky_psd(&Matrix::zeros(3)).unwrap();
        assert_eq!((l, d), (Matrix::zeros(3), 0.0));
    }

    #[test]
    fn indefinite_is_rejected() {
        let c = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(cholesky_psd(&c), Err(SimError::NotPsd { .. })));
    }

    #[test]
    fn rank_deficient_gets_jitter() {
        let c = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let (l, d) = cholesky_psd(&c).unwrap();
        assert!(d > 0.0 && d <= 1e-6);
        let g = l.gram_lower();
        assert!((g.get(1, 1) - 1.0 - d).abs() < 1e-12);
    }

    #[test]
    fn small_jitter_for_models() {
        let g = SimGrid::new(1.0, 512).unwrap();
        for m in [
            CovModel::fbm(0.3, 1.0).unwrap(),
            CovModel::fbm(0.7, 1.0).unwrap(),
            CovModel::bifbm(0.6, 5.0 / 6.0, 1.0).unwrap(),
            CovModel::statinc(QShape::Log, 1.0).unwrap(),
        ] {
            let c = cov_matrix(&m, &g);
            let (_, d) = cholesky_psd(&c).unwrap();
            assert!(d <= 1e-8 * c.mean_diag(), "{}: {d}", m.descriptor());
        }
    }

    #[test]
    fn same_seed_same_paths() {
        let m = CovModel::fbm(0.3, 1.0).unwrap();
        let g = SimGrid::new(1.0, 32).unwrap();
        let a = sample_paths(&m, &g, 50, 9).unwrap();
        let b = sample_paths(&m, &g, 50, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.paths.iter().all(|p| p[0] == 0.0 && p.len() == 33));
        let c = sample_paths(&m, &g, 50, 10).unwrap();
        assert_ne!(a.paths, c.paths);
        // a prefix of streams is a prefix of the ensemble
        let d = sample_paths(&m, &g, 20, 9).unwrap();
        assert_eq!(&a.paths[..20], &d.paths[..]);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let m = CovModel::fbm(0.3, 1.0).unwrap();
        let g = SimGrid::new(1.0, 16).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| sample_paths(&m, &g, 40, 3).unwrap());
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let b = four.install(|| sample_paths(&m, &g, 40, 3).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn antithetic_pairs() {
        let m = CovModel::fbm(0.5, 1.0).unwrap();
        let g = SimGrid::new(1.0, 8).unwrap();
        let e = sample_paths_antithetic(&m, &g, 5, 1).unwrap();
        assert_eq!(e.len(), 10);
        for k in 0..5 {
            for i in 0..=8 {
                assert_eq!(e.paths[2 * k][i], -e.paths[2 * k + 1][i]);
            }
        }
    }

    #[test]
    fn moments_match_covariance() {
        let m = CovModel::fbm(0.3, 1.0).unwrap();
        let g = SimGrid::new(1.0, 64).unwrap();
        let e = sample_paths(&m, &g, 50_000, 17).unwrap();
        let t = g.times();
        for i in [1, 20, 64] {
            let (mean, var, k) = mean_var(e.paths.iter().map(|p| p[i]));
            let gam = m.gamma(t[i]);
            assert!(mean.abs() <= 3.0 * (gam / k as f64).sqrt(), "mean at {i}: {mean}");
            let se = gam * (2.0 / (k as f64 - 1.0)).sqrt();
            assert!((var - gam).abs() <= 3.0 * se, "var at {i}: {var} vs {gam}");
        }
        for (i, j) in [(3, 50), (10, 11), (32, 64), (1, 64), (40, 45)] {
            let prods: Vec<f64> = e.paths.iter().map(|p| p[i] * p[j]).collect();
            let (c, v, k) = mean_var(prods.into_iter());
            let se = (v / k as f64).sqrt();
            assert!((c - m.cov(t[i], t[j])).abs() <= 4.0 * se, "cov({i}, {j})");
        }
    }

    #[test]
    fn stationary_increment_variance() {
        let m = CovModel::statinc(QShape::Log, 1.0).unwrap();
        let q = m.q_kernel().unwrap();
        let g = SimGrid::new(1.0, 64).unwrap();
        let e = sample_paths(&m, &g, 20_000, 5).unwrap();
        for (i, lag) in [(10, 1), (30, 4), (20, 16)] {
            let inc: Vec<f64> = e.paths.iter().map(|p| (p[i + lag] - p[i]).powi(2)).collect();
            let (mean, v, k) = mean_var(inc.into_iter());
            let want = q.q(lag as f64 * g.step());
            assert!((mean - want).abs() <= 4.0 * (v / k as f64).sqrt(), "lag {lag}: {mean} vs {want}");
        }
    }

    #[test]
    fn kernel_paths() {
        let g = SimGrid::new(1.0, 128).unwrap();
        let ones = sample_kernel_path(|u| Kappa::Indicator.value(u), "kernel", &g, 20_000, 2).unwrap();
        for (p, dw) in ones.ensemble.paths.iter().zip(&ones.increments) {
            let w: f64 = dw.iter().sum();
            assert!((p[128] - w).abs() < 1e-12);
        }
        let (_, var, k) = mean_var(ones.ensemble.paths.iter().map(|p| p[128]));
        assert!((var - 1.0).abs() <= 3.0 * (2.0 / k as f64).sqrt());

        let kappa = Kappa::Power { exponent: -0.2 };
        let e = sample_kernel_path(|u| kappa.value(u), "kernel", &g, 20_000, 3).unwrap();
        let (_, var, _) = mean_var(e.ensemble.paths.iter().map(|p| p[128]));
        let want = 1.0 / 0.6;
        assert!((var - want).abs() <= 0.05 * want, "{var} vs {want}");
        let again = sample_kernel_path(|u| kappa.value(u), "kernel", &g, 1, 3).unwrap();
        assert_eq!(again.ensemble.paths[0], e.ensemble.paths[0]);
    }

    #[test]
    fn csv_and_sidecar() {
        let m = CovModel::fbm(0.5, 1.0).unwrap();
        let g = SimGrid::new(1.0, 4).unwrap();
        let e = sample_paths(&m, &g, 3, 1).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t_0,t_1,t_2,t_3,t_4"));
        let back: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(back, e.paths);
        let mut meta = Vec::new();
        e.write_meta(&mut meta).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&meta).unwrap();
        assert_eq!(v["m"], 3);
        assert_eq!(v["n"], 4);
        assert_eq!(v["seed"], 1);
    }
}
