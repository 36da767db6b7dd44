//! Piecewise-constant measure-valued profiles `t ↦ μ(·, t)` on `[0, 1]` and
//! the thinning-invariant family they generate.
//!
//! Given a profile, the `n`-th member of the family is the law of
//! `(X_1, ..., X_n)` where `t_1 < ... < t_n` are sorted uniforms and
//! `X_k ~ μ(·, t_k)` independently given the `t`'s. For a step profile with
//! interval lengths `ℓ_r` and measures `ν_r`, conditioning on how many of the
//! sorted uniforms fall in each interval gives the exact finite sum
//!
//! ```text
//! μ_n = Σ_{k_1+...+k_R = n} n!/(k_1!...k_R!) · Π ℓ_r^{k_r} · ν_1^{⊗k_1} ⊗ ... ⊗ ν_R^{⊗k_R}
//! ```
//!
//! The coordinate marginals are Beta-kernel averages of the profile:
//! coordinate `k` of `μ_n` has law `∫ Φ_{k,n-k+1}(t) μ(·, t) dt`.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, binomial_u128, compositions, factorial_u128, multinomial};
use crate::error::{invalid, Error, Result};
use crate::measures::{dense_len, kron, validate_probability, Alphabet, JointMeasure, NORMALIZATION_TOL};

/// Largest `n` for which incomplete Beta integrals are expanded exactly.
pub const MAX_BETA_ORDER: usize = 64;

/// A step function from `[0, 1]` into probability vectors over an alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseProfile {
    alphabet: Alphabet,
    breakpoints: Vec<f64>,
    measures: Vec<Vec<f64>>,
}

impl PiecewiseProfile {
    /// `breakpoints` are `0 = s_0 < ... < s_R = 1`; `measures[r]` is the
    /// probability vector on `[s_r, s_{r+1})`.
    pub fn new(alphabet: Alphabet, breakpoints: Vec<f64>, measures: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return invalid("breakpoints: need at least [0, 1]");
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return invalid(format!(
                "breakpoints: must start at exactly 0 and end at exactly 1, got {} .. {}",
                breakpoints[0],
                breakpoints.last().unwrap()
            ));
        }
        if let Some(i) = breakpoints.windows(2).position(|w| !(w[0] < w[1])) {
            return invalid(format!(
                "breakpoints[{}] = {} is not strictly greater than breakpoints[{i}] = {}",
                i + 1,
                breakpoints[i + 1],
                breakpoints[i]
            ));
        }
        if measures.len() != breakpoints.len() - 1 {
            return Err(Error::ShapeMismatch(format!(
                "weights: {} interval measures for {} intervals",
                measures.len(),
                breakpoints.len() - 1
            )));
        }
        for (r, nu) in measures.iter().enumerate() {
            if nu.len() != alphabet.len() {
                return Err(Error::ShapeMismatch(format!(
                    "weights[{r}]: {} entries, expected {} (alphabet size)",
                    nu.len(),
                    alphabet.len()
                )));
            }
            validate_probability(nu, &format!("weights[{r}]"))?;
        }
        Ok(Self { alphabet, breakpoints, measures })
    }

    /// The profile `μ(·, t) ≡ ν`.
    pub fn constant(alphabet: Alphabet, nu: Vec<f64>) -> Result<Self> {
        Self::new(alphabet, vec![0.0, 1.0], vec![nu])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn measures(&self) -> &[Vec<f64>] {
        &self.measures
    }

    /// Number of intervals `R`.
    pub fn pieces(&self) -> usize {
        self.measures.len()
    }

    /// Interval lengths `ℓ_r = s_r - s_{r-1}`.
    pub fn lengths(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `μ(·, t)`, with right-open intervals and `t = 1` in the last piece.
    pub fn value_at(&self, t: f64) -> &[f64] {
        let r = self.breakpoints[1..self.breakpoints.len() - 1]
            .iter()
            .take_while(|&&s| s <= t)
            .count();
        &self.measures[r]
    }

    /// `∫_a^b Σ_x f(x) μ(x, t) dt` for `0 ≤ a ≤ b ≤ 1`.
    pub fn integrate_observable(&self, f: &[f64], a: f64, b: f64) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.measures)
            .map(|(w, nu)| {
                let overlap = (w[1].min(b) - w[0].max(a)).max(0.0);
                if overlap == 0.0 {
                    0.0
                } else {
                    overlap * nu.iter().zip(f).map(|(p, v)| p * v).sum::<f64>()
                }
            })
            .sum()
    }

    pub fn to_json(&self) -> String {
        let file = ProfileFile {
            alphabet: self.alphabet.clone(),
            breakpoints: self.breakpoints.clone(),
            weights: self.measures.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("profile serializes");
        s.push('\n');
        s
    }

    /// Parse `{"alphabet": [...], "breakpoints": [...], "weights": [[...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProfileFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        Self::new(file.alphabet, file.breakpoints, file.weights).map_err(|e| match e {
            Error::InvalidArgument(s) | Error::ShapeMismatch(s) => Error::Parse(s),
            other => other,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    alphabet: Alphabet,
    breakpoints: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

/// The kink profile on `{-, +}`: `δ_-` on `(0, s)`, `δ_+` on `(s, 1)`.
pub fn kink_profile(s: f64) -> Result<PiecewiseProfile> {
    kink_profile_on(Alphabet::plus_minus(), s)
}

/// Kink profile on any two-symbol alphabet: first symbol before `s`, second after.
pub fn kink_profile_on(alphabet: Alphabet, s: f64) -> Result<PiecewiseProfile> {
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("kink position {s} must lie in the open interval (0, 1)"));
    }
    if alphabet.len() != 2 {
        return invalid("kink profiles need a two-symbol alphabet");
    }
    PiecewiseProfile::new(alphabet, vec![0.0, s, 1.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]])
}

/// `∫_0^1 μ(·, t) dt = Σ_r ℓ_r ν_r`.
pub fn profile_mean(profile: &PiecewiseProfile) -> Vec<f64> {
    let mut mean = vec![0.0; profile.alphabet.len()];
    for (len, nu) in profile.lengths().iter().zip(&profile.measures) {
        for (acc, p) in mean.iter_mut().zip(nu) {
            *acc += len * p;
        }
    }
    mean
}

/// The `n`-th member of the thinning-invariant family generated by `profile`.
pub fn build_joint(profile: &PiecewiseProfile, n: usize) -> Result<JointMeasure> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let m = profile.alphabet.len();
    let len = dense_len(m, n)?;
    let lengths = profile.lengths();
    let mut weights = vec![0.0; len];
    for counts in compositions(n, profile.pieces()) {
        let coef = multinomial(&counts)
            * counts
                .iter()
                .zip(&lengths)
                .map(|(&k, l)| l.powi(k as i32))
                .product::<f64>();
        if coef == 0.0 {
            continue;
        }
        let mut block = vec![1.0];
        for (&k, nu) in counts.iter().zip(&profile.measures) {
            for _ in 0..k {
                block = kron(&block, nu);
            }
        }
        for (w, b) in weights.iter_mut().zip(&block) {
            *w += coef * b;
        }
    }
    renormalize(&mut weights);
    JointMeasure::new(profile.alphabet.clone(), n, weights)
}

/// `Σ_i w_i · build_joint(P_i, n)` for a finite mixture of profiles.
pub fn mixture_joint(components: &[(f64, PiecewiseProfile)], n: usize) -> Result<JointMeasure> {
    let Some((_, first)) = components.first() else {
        return invalid("a mixture needs at least one component");
    };
    let mix: Vec<f64> = components.iter().map(|(w, _)| *w).collect();
    validate_probability(&mix, "mixing weights")?;
    let mut weights = vec![0.0; dense_len(first.alphabet.len(), n)?];
    for (w, p) in components {
        if p.alphabet != first.alphabet {
            return Err(Error::ShapeMismatch("mixture components use different alphabets".into()));
        }
        let mu = build_joint(p, n)?;
        for (acc, x) in weights.iter_mut().zip(mu.weights()) {
            *acc += w * x;
        }
    }
    renormalize(&mut weights);
    JointMeasure::new(first.alphabet.clone(), n, weights)
}

// Rounding leaves the total within a few ulps of 1; pin it exactly enough for validation.
fn renormalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() < NORMALIZATION_TOL {
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
}

/// The normalizer `B(k, n-k+1) = (k-1)!(n-k)!/n!` kept as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BetaWeight {
    pub k: usize,
    pub n: usize,
    numerator: u128,
    denominator: u128,
}

impl BetaWeight {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return invalid(format!("Beta weight needs 1 <= k <= n, got k = {k}, n = {n}"));
        }
        // (k-1)!(n-k)!/n! = 1 / (n C(n-1, k-1)); the reduced form stays in range longer.
        let denominator = binomial_u128(n - 1, k - 1)
            .and_then(|c| c.checked_mul(n as u128))
            .ok_or_else(|| Error::InvalidArgument(format!("Beta weight for n = {n} overflows")))?;
        Ok(Self { k, n, numerator: 1, denominator })
    }

    /// Numerator and denominator of the exact rational value.
    pub fn ratio(&self) -> (u128, u128) {
        (self.numerator, self.denominator)
    }

    pub fn normalizer(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `(k-1)!(n-k)!` and `n!` when they fit in `u128`.
    pub fn factorial_form(&self) -> Option<(u128, u128)> {
        let a = factorial_u128(self.k - 1)?;
        let b = factorial_u128(self.n - self.k)?;
        Some((a.checked_mul(b)?, factorial_u128(self.n)?))
    }
}

/// Density of the `k`-th of `n` sorted uniforms:
/// `Φ_{k,n-k+1}(t) = t^{k-1} (1-t)^{n-k} / B(k, n-k+1)`.
pub fn beta_kernel(k: usize, n: usize, t: f64) -> Result<f64> {
    if k == 0 || k > n {
        return invalid(format!("beta kernel needs 1 <= k <= n, got k = {k}, n = {n}"));
    }
    if !(0.0..=1.0).contains(&t) {
        return invalid(format!("beta kernel argument {t} outside [0, 1]"));
    }
    let scale = n as f64 * binomial(n - 1, k - 1);
    Ok(scale * t.powi(k as i32 - 1) * (1.0 - t).powi((n - k) as i32))
}

/// `∫_0^x Φ_{k,n-k+1} = P(Bin(n, x) ≥ k)`, expanded exactly for integer parameters.
pub fn beta_cdf(k: usize, n: usize, x: f64) -> Result<f64> {
    if k == 0 || k > n {
        return invalid(format!("beta cdf needs 1 <= k <= n, got k = {k}, n = {n}"));
    }
    if n > MAX_BETA_ORDER {
        return invalid(format!("exact Beta expansion limited to n <= {MAX_BETA_ORDER}, got {n}"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    // sum the shorter tail for accuracy
    let y = 1.0 - x;
    let term = |j: usize| binomial(n, j) * x.powi(j as i32) * y.powi((n - j) as i32);
    if k > n / 2 {
        Ok((k..=n).map(term).sum())
    } else {
        Ok(1.0 - (0..k).map(term).sum::<f64>())
    }
}

/// Law of coordinate `k` (1-based) of `build_joint(profile, n)`, by Beta-kernel
/// integration over each interval.
pub fn coordinate_marginal(profile: &PiecewiseProfile, n: usize, k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > n {
        return invalid(format!("coordinate {k} out of range 1..={n}"));
    }
    let mut out = vec![0.0; profile.alphabet.len()];
    let mut lower = 0.0;
    for (w, nu) in profile.breakpoints.windows(2).zip(&profile.measures) {
        let upper = beta_cdf(k, n, w[1])?;
        let mass = upper - lower;
        lower = upper;
        for (acc, p) in out.iter_mut().zip(nu) {
            *acc += mass * p;
        }
    }
    Ok(out)
}

/// `p(N, K; n, k) = C(K-1, k-1) C(N-K, n-k) / C(N, n)`: the chance that the
/// `k`-th of a random `n`-subset of `{1..N}` is `K`.
pub fn subset_weight(big_n: usize, big_k: usize, n: usize, k: usize) -> Result<f64> {
    if !(1 <= k && k <= n && n <= big_n) || !(1 <= big_k && big_k <= big_n) {
        return invalid(format!(
            "subset weight needs 1 <= k <= n <= N and 1 <= K <= N, got N = {big_n}, K = {big_k}, n = {n}, k = {k}"
        ));
    }
    if big_k < k || big_n - big_k < n - k {
        return Ok(0.0);
    }
    Ok(binomial(big_k - 1, k - 1) * binomial(big_n - big_k, n - k) / binomial(big_n, n))
}
