//! Mean-field asymmetric simple exclusion on `N` sites.
//!
//! A particle at `x` jumps to an empty site `y` at rate `q/(N-1)` when
//! `x < y` and `(1-q)/(N-1)` when `y < x`. The particle number is
//! conserved, so everything is computed sector by sector.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::combinatorics::subsets;
use crate::error::{invalid, Error, Result};
use crate::measures::{dense_len, Alphabet, JointMeasure};
use crate::quadrature::GaussLegendre;

/// Sector dimension up to which the stationary measure is found by dense LU.
pub const DENSE_SOLVE_MAX_DIM: usize = 20_000;
pub const STATIONARY_RESIDUAL_TOL: f64 = 1e-10;
const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsepModel {
    n_sites: usize,
    q: f64,
}

impl AsepModel {
    pub fn new(n_sites: usize, q: f64) -> Result<Self> {
        if n_sites < 2 {
            return invalid(format!("N must be at least 2, got {n_sites}"));
        }
        check_q(q)?;
        Ok(Self { n_sites, q })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Jump rate from `x` to `y` (0-based sites, `x != y`).
    pub fn rate(&self, x: usize, y: usize) -> f64 {
        let scale = (self.n_sites - 1) as f64;
        if x < y {
            self.q / scale
        } else {
            (1.0 - self.q) / scale
        }
    }

    /// Configurations with `n` particles, ordered lexicographically by the
    /// sorted particle positions.
    pub fn sector(&self, n: usize) -> Result<Vec<Vec<u8>>> {
        if n > self.n_sites {
            return invalid(format!("particle count {n} exceeds N = {}", self.n_sites));
        }
        Ok(subsets(self.n_sites, n)
            .into_iter()
            .map(|pos| {
                let mut eta = vec![0u8; self.n_sites];
                for p in pos {
                    eta[p] = 1;
                }
                eta
            })
            .collect())
    }
}

fn check_q(q: f64) -> Result<()> {
    if q == 0.5 {
        return invalid("q = 1/2 is the symmetric point, where the limiting profile is flat (phi = rho)");
    }
    if !(q > 0.5 && q <= 1.0) {
        return invalid(format!("q must lie in (1/2, 1], got {q}"));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return invalid(format!("rho must lie in [0, 1], got {rho}"));
    }
    Ok(())
}

/// Sparse generator of one sector: for every configuration, its jumps
/// `(target, rate)`.
#[derive(Debug, Clone)]
pub struct SectorGenerator {
    configs: Vec<Vec<u8>>,
    jumps: Vec<Vec<(usize, f64)>>,
}

impl SectorGenerator {
    pub fn new(model: &AsepModel, n: usize) -> Result<Self> {
        let configs = model.sector(n)?;
        let index: HashMap<&[u8], usize> = configs.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let jumps = configs
            .iter()
            .map(|eta| {
                let mut out = Vec::new();
                let mut moved = eta.clone();
                for x in 0..eta.len() {
                    if eta[x] == 0 {
                        continue;
                    }
                    for y in 0..eta.len() {
                        if eta[y] == 1 {
                            continue;
                        }
                        moved[x] = 0;
                        moved[y] = 1;
                        out.push((index[moved.as_slice()], model.rate(x, y)));
                        moved[x] = 1;
                        moved[y] = 0;
                    }
                }
                out
            })
            .collect();
        Ok(Self { configs, jumps })
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[Vec<u8>] {
        &self.configs
    }

    /// `(Ωf)(η) = Σ rate · (f(η') - f(η))`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        Ok(self
            .jumps
            .iter()
            .enumerate()
            .map(|(i, js)| js.iter().map(|&(j, r)| r * (f[j] - f[i])).sum())
            .collect())
    }

    /// `μᵀΩ`.
    pub fn apply_transpose(&self, mu: &[f64]) -> Result<Vec<f64>> {
        self.check_len(mu)?;
        let mut out = vec![0.0; self.dim()];
        for (i, js) in self.jumps.iter().enumerate() {
            for &(j, r) in js {
                out[j] += mu[i] * r;
                out[i] -= mu[i] * r;
            }
        }
        Ok(out)
    }

    pub fn dense_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (i, js) in self.jumps.iter().enumerate() {
            for &(j, r) in js {
                m[(i, j)] += r;
                m[(i, i)] -= r;
            }
        }
        m
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector has {} entries, sector has {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// `Ωf` on the `n`-particle sector, `f` indexed like [`AsepModel::sector`].
pub fn generator_apply(model: &AsepModel, n: usize, f: &[f64]) -> Result<Vec<f64>> {
    SectorGenerator::new(model, n)?.apply(f)
}

/// A probability measure on one particle-number sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMeasure {
    pub n_sites: usize,
    pub particles: usize,
    pub configs: Vec<Vec<u8>>,
    pub weights: Vec<f64>,
    /// `‖μᵀΩ‖_∞` of the solve that produced it.
    pub residual: f64,
}

impl SectorMeasure {
    /// Re-express on `{0,1}^N` as a dense joint measure.
    pub fn to_joint(&self) -> Result<JointMeasure> {
        let len = dense_len(2, self.n_sites)?;
        let mut weights = vec![0.0; len];
        for (eta, &w) in self.configs.iter().zip(&self.weights) {
            let idx = eta.iter().fold(0usize, |acc, &b| acc * 2 + b as usize);
            weights[idx] = w;
        }
        JointMeasure::new(Alphabet::occupation(), self.n_sites, weights)
    }
}

/// The stationary measure of the `n`-particle sector: dense LU on `Ωᵀ`
/// with one equation replaced by normalization, or power iteration on
/// `I + εΩᵀ` for sectors larger than [`DENSE_SOLVE_MAX_DIM`].
pub fn stationary_measure(model: &AsepModel, n: usize) -> Result<SectorMeasure> {
    let generator = SectorGenerator::new(model, n)?;
    let d = generator.dim();
    let mut mu = if d == 1 {
        vec![1.0]
    } else if d <= DENSE_SOLVE_MAX_DIM {
        dense_stationary(&generator)?
    } else {
        power_stationary(&generator)?
    };
    for w in &mut mu {
        if *w < 0.0 {
            if *w < -1e-12 {
                return Err(Error::NonConvergence { residual: *w, iterations: 0 });
            }
            *w = 0.0;
        }
    }
    let total: f64 = mu.iter().sum();
    mu.iter_mut().for_each(|w| *w /= total);
    let residual = sup_norm(&generator.apply_transpose(&mu)?);
    if residual > STATIONARY_RESIDUAL_TOL {
        return Err(Error::NonConvergence { residual, iterations: 0 });
    }
    Ok(SectorMeasure {
        n_sites: model.n_sites,
        particles: n,
        configs: generator.configs,
        weights: mu,
        residual,
    })
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dense_stationary(generator: &SectorGenerator) -> Result<Vec<f64>> {
    let d = generator.dim();
    let mut a = generator.dense_matrix().transpose();
    a.row_mut(d - 1).fill(1.0);
    let mut rhs = DVector::zeros(d);
    rhs[d - 1] = 1.0;
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or(Error::NonConvergence { residual: f64::INFINITY, iterations: 0 })?;
    Ok(sol.iter().copied().collect())
}

fn power_stationary(generator: &SectorGenerator) -> Result<Vec<f64>> {
    let d = generator.dim();
    let max_exit = generator
        .jumps
        .iter()
        .map(|js| js.iter().map(|&(_, r)| r).sum::<f64>())
        .fold(0.0, f64::max);
    let eps = 0.5 / max_exit;
    let mut mu = vec![1.0 / d as f64; d];
    let mut residual = f64::INFINITY;
    for it in 0..POWER_MAX_ITERS {
        let flow = generator.apply_transpose(&mu)?;
        residual = sup_norm(&flow);
        if residual <= POWER_TOL {
            return Ok(mu);
        }
        for (m, f) in mu.iter_mut().zip(&flow) {
            *m += eps * f;
        }
        if it % 1000 == 999 {
            let total: f64 = mu.iter().sum();
            mu.iter_mut().for_each(|w| *w /= total);
        }
    }
    Err(Error::NonConvergence { residual, iterations: POWER_MAX_ITERS })
}

/// `E[η_x]` for `x = 1..N`.
pub fn site_density(sm: &SectorMeasure) -> Vec<f64> {
    let mut out = vec![0.0; sm.n_sites];
    for (eta, &w) in sm.configs.iter().zip(&sm.weights) {
        for (acc, &b) in out.iter_mut().zip(eta) {
            if b == 1 {
                *acc += w;
            }
        }
    }
    out
}

/// `μ^{(N,n)}_k`: the law of `k` randomly chosen sites, in their order.
pub fn thinned_marginal(sm: &SectorMeasure, k: usize) -> Result<JointMeasure> {
    if k > sm.n_sites {
        return invalid(format!("k = {k} exceeds N = {}", sm.n_sites));
    }
    sm.to_joint()?.thin_to(k)
}

/// `u(t) = ∫_0^t φ - ρ/2` from the closed form.
pub fn closed_form_u(t: f64, q: f64, rho: f64) -> Result<f64> {
    check_q(q)?;
    check_rho(rho)?;
    if !(0.0..=1.0).contains(&t) {
        return invalid(format!("t must lie in [0, 1], got {t}"));
    }
    let a = q / (2.0 * q - 1.0);
    let mut disc = (a - t).powi(2) + rho * (rho + (2.0 * t - 2.0 * q) / (2.0 * q - 1.0));
    if disc < 0.0 {
        if disc < -1e-14 {
            return invalid(format!("negative discriminant {disc} at t = {t}, q = {q}, rho = {rho}"));
        }
        disc = 0.0;
    }
    Ok(0.5 * (-(a - t) + disc.sqrt()))
}

/// Limiting density `φ(t)` from the closed form.
pub fn closed_form_phi(t: f64, q: f64, rho: f64) -> Result<f64> {
    let u = closed_form_u(t, q, rho)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let s = 2.0 * q - 1.0;
    let num = 0.5 * rho + s * u;
    let den = 0.5 * ((1.0 - q) * t + q * (1.0 - t)) + s * u;
    if den.abs() <= 1e-15 {
        return invalid(format!("vanishing denominator at t = {t}, q = {q}, rho = {rho}"));
    }
    Ok(0.5 * num / den)
}

/// Evaluable limiting profile for fixed `(q, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSolution {
    pub q: f64,
    pub rho: f64,
}

impl ProfileSolution {
    pub fn new(q: f64, rho: f64) -> Result<Self> {
        if q != 0.5 {
            check_q(q)?;
        }
        check_rho(rho)?;
        Ok(Self { q, rho })
    }

    /// The symmetric point `q = 1/2`, where the profile is flat: `φ ≡ ρ`.
    pub fn symmetric(rho: f64) -> Result<Self> {
        Self::new(0.5, rho)
    }

    pub fn is_symmetric(&self) -> bool {
        self.q == 0.5
    }

    pub fn u(&self, t: f64) -> Result<f64> {
        if self.is_symmetric() {
            return Ok(self.rho * (t - 0.5));
        }
        closed_form_u(t, self.q, self.rho)
    }

    pub fn phi(&self, t: f64) -> Result<f64> {
        if self.is_symmetric() {
            return Ok(self.rho);
        }
        closed_form_phi(t, self.q, self.rho)
    }
}

/// Residual of the stationarity integral equation at `t` with `φ` the
/// closed form, integrated by Gauss–Legendre on `[0,t]` and `[t,1]`.
pub fn integral_equation_residual(q: f64, rho: f64, t: f64, quadrature_order: usize) -> Result<f64> {
    if quadrature_order < 16 {
        return invalid(format!("quadrature order must be at least 16, got {quadrature_order}"));
    }
    let gl = GaussLegendre::new(quadrature_order);
    residual_with(&gl, q, rho, t)
}

fn residual_with(gl: &GaussLegendre, q: f64, rho: f64, t: f64) -> Result<f64> {
    let pt = closed_form_phi(t, q, rho)?;
    // validate the whole interval up front so the integrands can unwrap
    closed_form_phi(0.0, q, rho)?;
    let phi = |s: f64| closed_form_phi(s, q, rho).unwrap_or(f64::NAN);
    let left = gl.integrate(0.0, t, |s| {
        let ps = phi(s);
        (1.0 - q) * pt * (1.0 - ps) - q * ps * (1.0 - pt)
    });
    let right = gl.integrate(t, 1.0, |s| {
        let ps = phi(s);
        q * pt * (1.0 - ps) - (1.0 - q) * ps * (1.0 - pt)
    });
    let r = left + right;
    if r.is_nan() {
        return invalid(format!("profile undefined inside [0, 1] at q = {q}, rho = {rho}"));
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub q: f64,
    pub rho: f64,
    pub t: f64,
    pub residual: f64,
}

pub fn residual_sweep(qs: &[f64], rhos: &[f64], ts: &[f64], quadrature_order: usize) -> Result<Vec<ResidualRow>> {
    if quadrature_order < 16 {
        return invalid(format!("quadrature order must be at least 16, got {quadrature_order}"));
    }
    let gl = GaussLegendre::new(quadrature_order);
    let mut out = Vec::new();
    for &q in qs {
        for &rho in rhos {
            for &t in ts {
                out.push(ResidualRow { q, rho, t, residual: residual_with(&gl, q, rho, t)? });
            }
        }
    }
    Ok(out)
}

/// Site densities of one finite sector against `φ` at cell midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub n_sites: usize,
    pub particles: usize,
    /// `E[η_x]`, `x = 1..N`.
    pub empirical: Vec<f64>,
    /// `φ((x - 1/2)/N)`.
    pub closed_form: Vec<f64>,
    /// `N^{-1} Σ_x |E[η_x] - φ((x - 1/2)/N)|`.
    pub l1_error: f64,
}

/// Solve the `round(ρN)`-particle sector for each `N` and compare.
pub fn finite_n_profile_comparison(q: f64, rho: f64, n_list: &[usize]) -> Result<Vec<ComparisonRow>> {
    check_rho(rho)?;
    n_list
        .iter()
        .map(|&big_n| {
            let model = AsepModel::new(big_n, q)?;
            let particles = (rho * big_n as f64).round() as usize;
            let sm = stationary_measure(&model, particles)?;
            let empirical = site_density(&sm);
            let closed_form = (1..=big_n)
                .map(|x| closed_form_phi((x as f64 - 0.5) / big_n as f64, q, rho))
                .collect::<Result<Vec<_>>>()?;
            let l1_error = empirical.iter().zip(&closed_form).map(|(a, b)| (a - b).abs()).sum::<f64>() / big_n as f64;
            Ok(ComparisonRow { n_sites: big_n, particles, empirical, closed_form, l1_error })
        })
        .collect()
}

/// Grid `0, step, 2·step, ...` on `[0, 1]`, always ending at 1.
pub fn unit_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return invalid(format!("grid step must lie in (0, 1], got {step}"));
    }
    let count = (1.0 / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|i| i as f64 * step).collect();
    if 1.0 - grid[count] > 1e-9 {
        grid.push(1.0);
    } else {
        grid[count] = 1.0;
    }
    Ok(grid)
}

/// The bias values of the figure: `q = 0.525, 0.550, ..., 0.975`.
pub fn figure1_qs() -> Vec<f64> {
    (21..=39).map(|i| i as f64 / 40.0).collect()
}

/// `φ` on a grid for each `q` of the figure sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Data {
    pub rho: f64,
    pub ts: Vec<f64>,
    pub qs: Vec<f64>,
    /// `phi[j][i] = φ(ts[i])` at `qs[j]`.
    pub phi: Vec<Vec<f64>>,
}

pub fn figure1_data(rho: f64, step: f64) -> Result<Figure1Data> {
    let ts = unit_grid(step)?;
    let qs = figure1_qs();
    let phi = qs
        .iter()
        .map(|&q| ts.iter().map(|&t| closed_form_phi(t, q, rho)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Figure1Data { rho, ts, qs, phi })
}
