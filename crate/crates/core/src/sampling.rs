//! Seeded Monte Carlo for profile-generated arrays.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). Sample `i`
//! of a run with seed `s` and label `l` draws from
//! `ChaCha8Rng::seed_from_u64(mix(s, l))` on stream `i`, so results do not
//! depend on how samples are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::measures::{dense_len, encode, JointMeasure};
use crate::profile::PiecewiseProfile;

pub type Seed = u64;

/// Number of batches used for batch-means standard errors.
pub const BATCHES: usize = 100;

fn mix(seed: Seed, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for sample `index` of the run `(seed, label)`.
pub fn sample_rng(seed: Seed, label: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, label));
    rng.set_stream(index);
    rng
}

pub fn ordered_uniforms<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    t.sort_by(f64::total_cmp);
    t
}

/// `n` i.i.d. uniforms on `(0,1)`, sorted ascending.
pub fn sample_ordered_uniforms(n: usize, seed: Seed) -> Result<Vec<f64>> {
    if n == 0 {
        return invalid("need at least one uniform");
    }
    Ok(ordered_uniforms(&mut sample_rng(seed, 0, 0), n))
}

fn draw_symbol<R: Rng>(rng: &mut R, nu: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in nu.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the last partial sum
    nu.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Sorted times `t_k` and symbols `X_k ~ μ(·, t_k)`.
pub fn draw_config<R: Rng>(rng: &mut R, profile: &PiecewiseProfile, n: usize) -> (Vec<f64>, Vec<usize>) {
    let times = ordered_uniforms(rng, n);
    let config = times.iter().map(|&t| draw_symbol(rng, profile.value_at(t))).collect();
    (times, config)
}

pub fn sample_config(profile: &PiecewiseProfile, n: usize, seed: Seed) -> Vec<usize> {
    draw_config(&mut sample_rng(seed, 0, 0), profile, n).1
}

/// Piecewise-constant vector-valued function on `[0,1)`, right-open pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pub breakpoints: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl StepFunction {
    pub fn value_at(&self, t: f64) -> &[f64] {
        let last = self.values.len() - 1;
        let i = self.breakpoints[1..=last].partition_point(|&b| b <= t);
        &self.values[i.min(last)]
    }

    /// `∫_0^1 v(t) t^p dt`, componentwise.
    pub fn moment(&self, p: usize) -> Vec<f64> {
        let dim = self.values[0].len();
        let mut out = vec![0.0; dim];
        let q = (p + 1) as i32;
        for (i, v) in self.values.iter().enumerate() {
            let w = (self.breakpoints[i + 1].powi(q) - self.breakpoints[i].powi(q)) / q as f64;
            for (o, x) in out.iter_mut().zip(v) {
                *o += w * x;
            }
        }
        out
    }
}

/// `M_n(t) = Σ_k m(X_k) 1[(k-1)/n ≤ t < k/n]` where `m(x)` is the vertex
/// of the class containing `x`.
pub fn empirical_profile(config: &[usize], partition: &[Vec<usize>], m: usize) -> Result<StepFunction> {
    if config.is_empty() {
        return invalid("empty configuration");
    }
    let mut class = vec![None; m];
    for (r, members) in partition.iter().enumerate() {
        for &x in members {
            if x >= m {
                return invalid(format!("partition class {r} names symbol {x}, alphabet has {m}"));
            }
            if class[x].replace(r).is_some() {
                return invalid(format!("symbol {x} appears in more than one class"));
            }
        }
    }
    let n = config.len();
    let values = config
        .iter()
        .map(|&x| {
            let r = class
                .get(x)
                .copied()
                .flatten()
                .ok_or_else(|| Error::InvalidArgument(format!("symbol {x} is not covered by the partition")))?;
            let mut e = vec![0.0; partition.len()];
            e[r] = 1.0;
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    let breakpoints = (0..=n).map(|k| k as f64 / n as f64).collect();
    Ok(StepFunction { breakpoints, values })
}

/// An open subinterval `(a, b)` of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return invalid(format!("interval ({a}, {b}) must satisfy 0 <= a < b <= 1"));
        }
        Ok(Self { a, b })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }
}

fn check_disjoint(intervals: &[Interval]) -> Result<()> {
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|x, y| x.a.total_cmp(&y.a));
    if let Some(w) = sorted.windows(2).find(|w| w[1].a < w[0].b) {
        return invalid(format!(
            "intervals ({}, {}) and ({}, {}) overlap",
            w[0].a, w[0].b, w[1].a, w[1].b
        ));
    }
    Ok(())
}

/// `ν^{(r)} = n^{-1} Σ_k 1[k/n ∈ I_r] δ_{t_k}`: atoms at `t_k`, each of mass `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMeasure {
    pub atoms: Vec<f64>,
    pub atom_mass: f64,
}

impl BlockMeasure {
    pub fn mass(&self) -> f64 {
        self.atoms.len() as f64 * self.atom_mass
    }
}

pub fn empirical_block_measures(times: &[f64], intervals: &[Interval]) -> Result<Vec<BlockMeasure>> {
    check_disjoint(intervals)?;
    let n = times.len();
    Ok(intervals
        .iter()
        .map(|iv| BlockMeasure {
            atoms: (1..=n)
                .filter(|&k| iv.contains(k as f64 / n as f64))
                .map(|k| times[k - 1])
                .collect(),
            atom_mass: 1.0 / n as f64,
        })
        .collect())
}

/// Mean and batch-means standard error in fixed batch order.
pub fn batch_mean_stderr(values: &[f64]) -> (f64, f64) {
    let len = values.len();
    let mean = values.iter().sum::<f64>() / len as f64;
    if len < 2 * BATCHES {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len.max(2) - 1) as f64;
        return (mean, (var / len as f64).sqrt());
    }
    let size = len / BATCHES;
    let means: Vec<f64> = values
        .chunks(size)
        .take(BATCHES)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let bm = means.iter().sum::<f64>() / BATCHES as f64;
    let var = means.iter().map(|v| (v - bm).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    (mean, (var / BATCHES as f64).sqrt())
}

/// Evaluate `f` on `samples` independent draws, in parallel, keeping order.
fn per_sample<T: Send>(seed: Seed, label: u64, samples: usize, f: impl Fn(&mut ChaCha8Rng) -> T + Sync) -> Vec<T> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| f(&mut sample_rng(seed, label, i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlnRow {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub closed_form: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LlnReport {
    pub samples: usize,
    pub seed: Seed,
    pub rows: Vec<LlnRow>,
}

impl LlnReport {
    /// Gaps strictly decrease along the tested `n`.
    pub fn gaps_shrink(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap < w[0].gap)
    }

    /// At most one non-decreasing step in any three consecutive steps, and
    /// the last gap below the first.
    pub fn gaps_mostly_shrink(&self) -> bool {
        let dec: Vec<bool> = self.rows.windows(2).map(|w| w[1].gap < w[0].gap).collect();
        let width = dec.len().min(3);
        let first = self.rows.first().map(|r| r.gap);
        let last = self.rows.last().map(|r| r.gap);
        dec.windows(width.max(1)).all(|w| w.iter().filter(|&&d| !d).count() <= 1) && last < first
    }
}

/// Monte Carlo estimate of `E ∏_r (n^{-1} Σ_k 1[k/n ∈ I_r] f_r(X_k))` for
/// each `n`, against `∏_r ∫_{I_r} ∫ f_r dμ(·,t) dt`.
pub fn lln_check(
    profile: &PiecewiseProfile,
    intervals: &[Interval],
    fs: &[Vec<f64>],
    n_list: &[usize],
    samples: usize,
    seed: Seed,
) -> Result<LlnReport> {
    check_disjoint(intervals)?;
    if intervals.len() != fs.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} intervals but {} functions",
            intervals.len(),
            fs.len()
        )));
    }
    let m = profile.alphabet().len();
    if let Some(r) = fs.iter().position(|f| f.len() != m) {
        return Err(Error::ShapeMismatch(format!("function {r} has {} values, alphabet has {m}", fs[r].len())));
    }
    if samples == 0 {
        return invalid("need at least one sample");
    }
    let closed_form: f64 = intervals
        .iter()
        .zip(fs)
        .map(|(iv, f)| profile.integrate_observable(f, iv.a, iv.b))
        .product();
    let rows = n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return invalid("n must be positive");
            }
            let values = per_sample(seed, n as u64, samples, |rng| {
                let (_, x) = draw_config(rng, profile, n);
                intervals
                    .iter()
                    .zip(fs)
                    .map(|(iv, f)| {
                        (1..=n)
                            .filter(|&k| iv.contains(k as f64 / n as f64))
                            .map(|k| f[x[k - 1]])
                            .sum::<f64>()
                            / n as f64
                    })
                    .product::<f64>()
            });
            let (estimate, stderr) = batch_mean_stderr(&values);
            Ok(LlnRow { n, estimate, stderr, closed_form, gap: (estimate - closed_form).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LlnReport { samples, seed, rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub n: usize,
    pub k: usize,
    pub empirical: f64,
    pub stderr: f64,
    /// `k/(n+1)`.
    pub exact: f64,
    pub z_score: f64,
}

/// `E[t_k]` for every `k ≤ n` and every `n` in the list.
pub fn first_moment_report(n_list: &[usize], samples: usize, seed: Seed) -> Result<Vec<MomentRow>> {
    if samples == 0 {
        return invalid("need at least one sample");
    }
    let mut rows = Vec::new();
    for &n in n_list {
        if n == 0 {
            return invalid("n must be positive");
        }
        let draws = per_sample(seed, n as u64, samples, |rng| ordered_uniforms(rng, n));
        for k in 1..=n {
            let values: Vec<f64> = draws.iter().map(|t| t[k - 1]).collect();
            let (empirical, stderr) = batch_mean_stderr(&values);
            let exact = k as f64 / (n + 1) as f64;
            rows.push(MomentRow { n, k, empirical, stderr, exact, z_score: (empirical - exact) / stderr });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMomentRow {
    pub n: usize,
    pub j: usize,
    pub k: usize,
    pub empirical: f64,
    pub stderr: f64,
    /// `j(k+1)/((n+1)(n+2))`.
    pub exact: f64,
    /// `j(k+1)/(n(n+1))`, the uncorrected expression.
    pub uncorrected: f64,
    pub z_score: f64,
}

/// `E[t_j t_k]` for `j ≤ k ≤ n`.
pub fn second_moment_report(n: usize, samples: usize, seed: Seed) -> Result<Vec<SecondMomentRow>> {
    if n == 0 || samples == 0 {
        return invalid("n and samples must be positive");
    }
    let draws = per_sample(seed, n as u64 | 1 << 32, samples, |rng| ordered_uniforms(rng, n));
    let mut rows = Vec::new();
    for j in 1..=n {
        for k in j..=n {
            let values: Vec<f64> = draws.iter().map(|t| t[j - 1] * t[k - 1]).collect();
            let (empirical, stderr) = batch_mean_stderr(&values);
            let exact = second_moment_exact(n, j, k);
            rows.push(SecondMomentRow {
                n,
                j,
                k,
                empirical,
                stderr,
                exact,
                uncorrected: (j * (k + 1)) as f64 / (n * (n + 1)) as f64,
                z_score: (empirical - exact) / stderr,
            });
        }
    }
    Ok(rows)
}

/// `E[t_j t_k] = j(k+1)/((n+1)(n+2))` for `j ≤ k`.
pub fn second_moment_exact(n: usize, j: usize, k: usize) -> f64 {
    let (j, k) = (j.min(k), j.max(k));
    (j * (k + 1)) as f64 / ((n + 1) * (n + 2)) as f64
}

/// Empirical law of `samples` draws of `(X_1, ..., X_n)`.
pub fn empirical_joint(profile: &PiecewiseProfile, n: usize, samples: usize, seed: Seed) -> Result<JointMeasure> {
    if samples == 0 {
        return invalid("need at least one sample");
    }
    let m = profile.alphabet().len();
    let len = dense_len(m, n)?;
    let idx = per_sample(seed, n as u64, samples, |rng| encode(&draw_config(rng, profile, n).1, m));
    let mut counts = vec![0u64; len];
    for i in idx {
        counts[i] += 1;
    }
    let weights = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    JointMeasure::new(profile.alphabet().clone(), n, weights)
}
