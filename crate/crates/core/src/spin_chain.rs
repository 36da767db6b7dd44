//! Oriented mean-field spin chains.
//!
//! An `n`-body interaction `φ_n : X^n → ℝ` defines, for `N ≥ n` sites,
//!
//! ```text
//! H_N(σ) = N · C(N, n)^{-1} Σ_{i_1 < ... < i_n} φ_n(σ_{i_1}, ..., σ_{i_n})
//! ```
//!
//! where the order of the selected coordinates is kept. Everything here is
//! exact enumeration over `X^N`, so sizes are bounded by the dense cap.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::{invalid, Error, Result};
use crate::measures::{decode, dense_len, encode, Alphabet, JointMeasure};
use crate::profile::{kink_profile_on, PiecewiseProfile};

/// An `n`-body interaction stored as a dense table over `X^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    alphabet: Alphabet,
    arity: usize,
    table: Vec<f64>,
}

impl Interaction {
    pub fn new(alphabet: Alphabet, arity: usize, table: Vec<f64>) -> Result<Self> {
        if arity == 0 {
            return invalid("interaction arity must be at least 1");
        }
        let len = dense_len(alphabet.len(), arity)?;
        if table.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "interaction table has {} entries, expected {len}",
                table.len()
            )));
        }
        if let Some(i) = table.iter().position(|v| !v.is_finite()) {
            return invalid(format!("interaction entry {i} is not finite"));
        }
        Ok(Self { alphabet, arity, table })
    }

    /// `φ_n ≡ c`.
    pub fn constant(alphabet: Alphabet, arity: usize, c: f64) -> Result<Self> {
        let len = dense_len(alphabet.len(), arity)?;
        Self::new(alphabet, arity, vec![c; len])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn value(&self, config: &[usize]) -> f64 {
        self.table[encode(config, self.alphabet.len())]
    }

    /// Uniform average of the table, `ρ⁰_n(φ_n)`.
    pub fn uniform_mean(&self) -> f64 {
        self.table.iter().sum::<f64>() / self.table.len() as f64
    }

    pub fn to_json(&self) -> String {
        let m = self.alphabet.len();
        let table: BTreeMap<String, f64> = self
            .table
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let names: Vec<&str> = decode(i, m, self.arity)
                    .into_iter()
                    .map(|x| self.alphabet.symbol(x))
                    .collect();
                (format!("({})", names.join(",")), v)
            })
            .collect();
        let file = InteractionFile { alphabet: self.alphabet.clone(), arity: self.arity, table };
        let mut s = serde_json::to_string_pretty(&file).expect("interaction serializes");
        s.push('\n');
        s
    }

    /// Parse `{"alphabet": [...], "arity": n, "table": {"(a,b)": v, ...}}`.
    /// Every configuration must appear exactly once.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InteractionFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        let m = file.alphabet.len();
        let len = dense_len(m, file.arity)?;
        let mut table = vec![f64::NAN; len];
        for (key, v) in &file.table {
            let inner = key
                .trim()
                .strip_prefix('(')
                .and_then(|k| k.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("table key {key:?}: expected \"(a,b,...)\"")))?;
            let config = inner
                .split(',')
                .map(|s| {
                    file.alphabet
                        .index(s.trim())
                        .ok_or_else(|| Error::Parse(format!("table key {key:?}: unknown symbol {:?}", s.trim())))
                })
                .collect::<Result<Vec<usize>>>()?;
            if config.len() != file.arity {
                return Err(Error::Parse(format!(
                    "table key {key:?}: {} symbols, arity is {}",
                    config.len(),
                    file.arity
                )));
            }
            table[encode(&config, m)] = *v;
        }
        if let Some(i) = table.iter().position(|v| v.is_nan()) {
            let names: Vec<&str> = decode(i, m, file.arity).into_iter().map(|x| file.alphabet.symbol(x)).collect();
            return Err(Error::Parse(format!("table: missing entry ({})", names.join(","))));
        }
        Self::new(file.alphabet, file.arity, table).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InteractionFile {
    alphabet: Alphabet,
    arity: usize,
    table: BTreeMap<String, f64>,
}

/// Spin value `∓1` of a symbol index in the spin alphabet.
pub fn spin(index: usize) -> f64 {
    if index == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Two-body Curie–Weiss interaction with an oriented field:
/// `-φ_2(σ_1, σ_2) = σ_1 σ_2 / 2 + (b/2)(σ_2 - σ_1)`.
///
/// With this normalization `-H_N = (N-1)^{-1} Σ_{j<k} σ_j σ_k +
/// b Σ_j (2j-N-1)/(N-1) σ_j`, and the ground-state phase changes at `b = 1`.
pub fn cw_interaction(b: f64) -> Interaction {
    let table = (0..4)
        .map(|i| {
            let s1 = spin(i / 2);
            let s2 = spin(i % 2);
            -(0.5 * s1 * s2 + 0.5 * b * (s2 - s1))
        })
        .collect();
    Interaction::new(Alphabet::spins(), 2, table).expect("2x2 table is well formed")
}

/// Number of ordered occurrences of every `n`-tuple as a subsequence of
/// `sigma`, indexed like the interaction table.
fn subsequence_counts(sigma: &[usize], m: usize, n: usize) -> Vec<f64> {
    let mut levels: Vec<Vec<f64>> = (0..=n).map(|j| vec![0.0; m.pow(j as u32)]).collect();
    levels[0][0] = 1.0;
    for (i, &s) in sigma.iter().enumerate() {
        for j in (1..=n.min(i + 1)).rev() {
            let (lo, hi) = levels.split_at_mut(j);
            let prev = &lo[j - 1];
            let cur = &mut hi[0];
            for (p, &c) in prev.iter().enumerate() {
                if c != 0.0 {
                    cur[p * m + s] += c;
                }
            }
        }
    }
    levels.pop().unwrap()
}

/// `H_N(σ)` for a configuration of symbol indices.
pub fn hamiltonian(phi: &Interaction, sigma: &[usize]) -> Result<f64> {
    let big_n = sigma.len();
    let n = phi.arity;
    if big_n < n {
        return invalid(format!("need N >= n, got N = {big_n}, n = {n}"));
    }
    let m = phi.alphabet.len();
    if let Some(&x) = sigma.iter().find(|&&x| x >= m) {
        return invalid(format!("symbol index {x} out of range for {m} symbols"));
    }
    let counts = subsequence_counts(sigma, m, n);
    let total: f64 = counts.iter().zip(&phi.table).map(|(c, v)| c * v).sum();
    Ok(big_n as f64 * total / binomial(big_n, n))
}

/// `H_N` on every configuration of `X^N`, in mixed-radix order.
pub fn energy_table(phi: &Interaction, big_n: usize) -> Result<Vec<f64>> {
    if big_n < phi.arity {
        return invalid(format!("need N >= n, got N = {big_n}, n = {}", phi.arity));
    }
    let m = phi.alphabet.len();
    let len = dense_len(m, big_n)?;
    Ok((0..len)
        .into_par_iter()
        .map(|idx| hamiltonian(phi, &decode(idx, m, big_n)).expect("validated sizes"))
        .collect())
}

/// `log Σ_i exp(x_i)` with max shift.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Finite-volume Gibbs state `ρ_{N,β} ∝ m^{-N} exp(-β H_N)`.
#[derive(Debug, Clone)]
pub struct GibbsSolution {
    pub n_sites: usize,
    pub beta: f64,
    /// `Ω_N(β) = log Z_N(β)` with the normalized partition function.
    pub log_partition: f64,
    pub measure: JointMeasure,
    /// `H_N` on every configuration, aligned with `measure`.
    pub energies: Vec<f64>,
}

impl GibbsSolution {
    /// `ρ(H_N)` for any measure of the right shape.
    pub fn mean_energy(&self, rho: &JointMeasure) -> Result<f64> {
        self.check_shape(rho)?;
        Ok(rho.expectation(&self.energies))
    }

    /// `Ω_N(β) - (S_N(ρ) - β ρ(H_N))`, nonnegative with equality at the Gibbs state.
    pub fn variational_gap(&self, rho: &JointMeasure) -> Result<f64> {
        let energy = self.mean_energy(rho)?;
        Ok(self.log_partition - (relative_entropy(rho) - self.beta * energy))
    }

    fn check_shape(&self, rho: &JointMeasure) -> Result<()> {
        if rho.n() != self.n_sites || rho.alphabet() != self.measure.alphabet() {
            return Err(Error::ShapeMismatch(format!(
                "measure has {} coordinates, Gibbs state has {}",
                rho.n(),
                self.n_sites
            )));
        }
        Ok(())
    }
}

pub fn gibbs(phi: &Interaction, big_n: usize, beta: f64) -> Result<GibbsSolution> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return invalid(format!("inverse temperature must be finite and >= 0, got {beta}"));
    }
    let energies = energy_table(phi, big_n)?;
    let exponents: Vec<f64> = energies.iter().map(|e| -beta * e).collect();
    let lse = log_sum_exp(&exponents);
    let log_partition = lse - big_n as f64 * (phi.alphabet.len() as f64).ln();
    let mut weights: Vec<f64> = exponents.iter().map(|x| (x - lse).exp()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let measure = JointMeasure::new(phi.alphabet.clone(), big_n, weights)?;
    Ok(GibbsSolution { n_sites: big_n, beta, log_partition, measure, energies })
}

/// `ρ^{(N)}_k`: the Gibbs state averaged over all ordered `k`-subsets of sites.
pub fn thinned_gibbs_marginal(phi: &Interaction, big_n: usize, beta: f64, k: usize) -> Result<JointMeasure> {
    gibbs(phi, big_n, beta)?.measure.thin_to(k)
}

/// Both sides of `N^{-1} ρ_{N,β}(H_N) = ρ^{(N)}_n(φ_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

pub fn energy_identity_check(phi: &Interaction, big_n: usize, beta: f64) -> Result<EnergyIdentity> {
    let g = gibbs(phi, big_n, beta)?;
    let lhs = g.mean_energy(&g.measure)? / big_n as f64;
    let rhs = g.measure.thin_to(phi.arity)?.expectation(&phi.table);
    Ok(EnergyIdentity { lhs, rhs, gap: (lhs - rhs).abs() })
}

/// `S_N(ρ) = -Σ ρ log(ρ / ρ⁰)` relative to the uniform measure, with `0 log 0 = 0`.
pub fn relative_entropy(rho: &JointMeasure) -> f64 {
    let log_uniform = -(rho.n() as f64) * (rho.alphabet().len() as f64).ln();
    -rho.weights()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * (p.ln() - log_uniform))
        .sum::<f64>()
}

pub fn variational_gap(phi: &Interaction, big_n: usize, beta: f64, rho: &JointMeasure) -> Result<f64> {
    gibbs(phi, big_n, beta)?.variational_gap(rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubadditivityEntry {
    pub n1: usize,
    pub n2: usize,
    /// `Ω_{N1+N2} - Ω_{N1} - Ω_{N2}`, expected `≤ 0`.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundEntry {
    pub n_sites: usize,
    pub omega: f64,
    /// `-β ρ⁰(H_N)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubadditivityReport {
    pub beta: f64,
    /// `(N, Ω_N)` for `n ≤ N ≤ N_max`.
    pub omegas: Vec<(usize, f64)>,
    pub entries: Vec<SubadditivityEntry>,
    pub lower_bounds: Vec<LowerBoundEntry>,
}

impl SubadditivityReport {
    pub fn max_gap(&self) -> f64 {
        self.entries.iter().map(|e| e.gap).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest `Ω_N - bound`; nonnegative when the lower bound holds.
    pub fn min_lower_margin(&self) -> f64 {
        self.lower_bounds.iter().map(|e| e.omega - e.bound).fold(f64::INFINITY, f64::min)
    }
}

fn omegas(phi: &Interaction, beta: f64, n_max: usize) -> Result<Vec<(usize, f64)>> {
    (phi.arity..=n_max)
        .map(|n| gibbs(phi, n, beta).map(|g| (n, g.log_partition)))
        .collect()
}

/// Every `Ω_{N1+N2} - Ω_{N1} - Ω_{N2}` with `n ≤ N1 ≤ N2`, `N1 + N2 ≤ N_max`,
/// plus the lower bound `Ω_N ≥ -β ρ⁰(H_N)`.
pub fn subadditivity_sweep(phi: &Interaction, beta: f64, n_max: usize) -> Result<SubadditivityReport> {
    if n_max < phi.arity {
        return invalid(format!("N_max = {n_max} is below the interaction arity {}", phi.arity));
    }
    let om = omegas(phi, beta, n_max)?;
    let omega = |n: usize| om[n - phi.arity].1;
    let mut entries = Vec::new();
    for n1 in phi.arity..=n_max {
        for n2 in n1..=n_max.saturating_sub(n1) {
            entries.push(SubadditivityEntry { n1, n2, gap: omega(n1 + n2) - omega(n1) - omega(n2) });
        }
    }
    let mean_phi = phi.uniform_mean();
    let lower_bounds = om
        .iter()
        .map(|&(n, w)| LowerBoundEntry { n_sites: n, omega: w, bound: -beta * n as f64 * mean_phi })
        .collect();
    Ok(SubadditivityReport { beta, omegas: om, entries, lower_bounds })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureEntry {
    pub n_sites: usize,
    pub omega: f64,
    pub omega_per_site: f64,
    /// Change in `Ω_N / N` from the previous entry (`NaN` for the first).
    pub difference: f64,
}

/// `Ω_N(β)/N` for `n ≤ N ≤ N_max`.
pub fn pressure_sequence(phi: &Interaction, beta: f64, n_max: usize) -> Result<Vec<PressureEntry>> {
    let om = omegas(phi, beta, n_max)?;
    let mut prev = f64::NAN;
    Ok(om
        .into_iter()
        .map(|(n, w)| {
            let per = w / n as f64;
            let e = PressureEntry { n_sites: n, omega: w, omega_per_site: per, difference: per - prev };
            prev = per;
            e
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundReport {
    pub energy: f64,
    /// Minimizing configurations as symbol indices, in mixed-radix order.
    pub minimizers: Vec<Vec<usize>>,
    pub degeneracy: usize,
}

impl GroundReport {
    /// Mean spin at each site over the minimizers.
    pub fn magnetization_profile(&self) -> Vec<f64> {
        let n = self.minimizers.first().map_or(0, Vec::len);
        let mut out = vec![0.0; n];
        for cfg in &self.minimizers {
            for (acc, &x) in out.iter_mut().zip(cfg) {
                *acc += spin(x);
            }
        }
        for v in &mut out {
            *v /= self.minimizers.len() as f64;
        }
        out
    }
}

/// Relative tolerance for declaring two energies equal.
pub const GROUND_TIE_TOL: f64 = 1e-9;

/// Exact minimizers of `H_N` by enumeration; ties within
/// `GROUND_TIE_TOL · max(1, |E_0|)` are all listed.
pub fn ground_states_exhaustive(phi: &Interaction, big_n: usize) -> Result<GroundReport> {
    let energies = energy_table(phi, big_n)?;
    let energy = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = GROUND_TIE_TOL * energy.abs().max(1.0);
    let m = phi.alphabet.len();
    let minimizers: Vec<Vec<usize>> = energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| e - energy <= tol)
        .map(|(i, _)| decode(i, m, big_n))
        .collect();
    Ok(GroundReport { energy, degeneracy: minimizers.len(), minimizers })
}

/// Ground-state phase of the Curie–Weiss chain with oriented field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwPhase {
    /// `|b| < 1`: the two uniform states.
    Uniform,
    /// `|b| = 1`: every kink position is optimal.
    KinkContinuum,
    /// `|b| > 1`: a single kink at `t = 1/2`.
    MidpointKink,
}

/// Optimal mean magnetizations `m̄ = ∫ φ(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub enum MagnetizationSet {
    Discrete(Vec<f64>),
    /// Every value in the closed interval.
    Interval(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CwGroundState {
    pub b: f64,
    pub phase: CwPhase,
    pub magnetizations: MagnetizationSet,
    /// Optimal profiles; for the continuum a representative sample at
    /// `m̄ ∈ {-1, -1/2, 0, 1/2, 1}`.
    pub profiles: Vec<PiecewiseProfile>,
    /// Optimal value of `-μ_2(φ_2) = b/2 + (1-b)/2 · m̄²`.
    pub energy: f64,
}

/// `-μ_2(φ_2)` at the bathtub optimizer with mean magnetization `m̄`, `b ≥ 0`.
pub fn cw_energy_at_magnetization(b: f64, m_bar: f64) -> f64 {
    0.5 * b + 0.5 * (1.0 - b) * m_bar * m_bar
}

/// The bathtub optimizer for given `m̄`: `-1` on `(0, t_0)`, `+1` on
/// `(t_0, 1)` with `t_0 = (1 - m̄)/2`; reversed when `reflect` is set
/// (negative field).
pub fn bathtub_profile(m_bar: f64, reflect: bool) -> Result<PiecewiseProfile> {
    if !(-1.0..=1.0).contains(&m_bar) {
        return invalid(format!("mean magnetization {m_bar} outside [-1, 1]"));
    }
    let minus = vec![1.0, 0.0];
    let plus = vec![0.0, 1.0];
    let t0 = 0.5 * (1.0 - m_bar);
    let (first, second) = if reflect { (plus, minus) } else { (minus, plus) };
    if t0 <= 0.0 {
        return PiecewiseProfile::constant(Alphabet::spins(), second);
    }
    if t0 >= 1.0 {
        return PiecewiseProfile::constant(Alphabet::spins(), first);
    }
    let s = if reflect { 1.0 - t0 } else { t0 };
    if reflect {
        PiecewiseProfile::new(Alphabet::spins(), vec![0.0, s, 1.0], vec![first, second])
    } else {
        kink_profile_on(Alphabet::spins(), s)
    }
}

/// Infinite-volume ground states of `cw_interaction(b)`: maximize
/// `b/2 + (1-b)/2 · m̄²` over `m̄ ∈ [-1, 1]` and place the optimal
/// magnetization by the bathtub principle. Negative `b` is handled by
/// reflecting `t ↦ 1 - t`.
pub fn cw_ground_profile(b: f64) -> Result<CwGroundState> {
    if !b.is_finite() {
        return invalid("field strength must be finite");
    }
    let reflect = b < 0.0;
    let a = b.abs();
    let (phase, magnetizations, m_samples) = if a < 1.0 {
        (CwPhase::Uniform, MagnetizationSet::Discrete(vec![-1.0, 1.0]), vec![-1.0, 1.0])
    } else if a > 1.0 {
        (CwPhase::MidpointKink, MagnetizationSet::Discrete(vec![0.0]), vec![0.0])
    } else {
        (
            CwPhase::KinkContinuum,
            MagnetizationSet::Interval(-1.0, 1.0),
            vec![-1.0, -0.5, 0.0, 0.5, 1.0],
        )
    };
    let profiles = m_samples
        .iter()
        .map(|&m| bathtub_profile(m, reflect))
        .collect::<Result<Vec<_>>>()?;
    let energy = cw_energy_at_magnetization(a, m_samples[0]);
    Ok(CwGroundState { b, phase, magnetizations, profiles, energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::subsets;
    use crate::profile::build_joint;

    /// Definitional Hamiltonian: explicit sum over ordered subsets.
    fn brute_hamiltonian(phi: &Interaction, sigma: &[usize]) -> f64 {
        let subs = subsets(sigma.len(), phi.arity());
        let total: f64 = subs
            .iter()
            .map(|s| phi.value(&s.iter().map(|&i| sigma[i]).collect::<Vec<_>>()))
            .sum();
        sigma.len() as f64 * total / subs.len() as f64
    }

    fn cfg(spins: &[i32]) -> Vec<usize> {
        spins.iter().map(|&s| usize::from(s > 0)).collect()
    }

    #[test]
    fn cw_table_entries() {
        for b in [0.0, 0.3, 1.0, 2.5] {
            let phi = cw_interaction(b);
            assert_eq!(phi.value(&[1, 1]), -0.5);
            assert_eq!(phi.value(&[0, 0]), -0.5);
            assert!((phi.value(&[1, 0]) - (0.5 + b)).abs() < 1e-15);
            assert!((phi.value(&[0, 1]) - (0.5 - b)).abs() < 1e-15);
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let c = Interaction::constant(Alphabet::spins(), 3, 1.7).unwrap();
        assert!((hamiltonian(&c, &cfg(&[1, -1, 1, 1, -1])).unwrap() - 5.0 * 1.7).abs() < 1e-13);

        let phi0 = cw_interaction(0.0);
        assert_eq!(hamiltonian(&phi0, &cfg(&[1, 1])).unwrap(), -1.0);

        // -H_3 = ½(σ1σ2 + σ1σ3 + σ2σ3) + Σ_j ((2j-4)/2) σ_j = -½ + 2
        let phi1 = cw_interaction(1.0);
        let sigma = cfg(&[-1, 1, 1]);
        assert!((hamiltonian(&phi1, &sigma).unwrap() + 1.5).abs() < 1e-15);
        assert!((brute_hamiltonian(&phi1, &sigma) + 1.5).abs() < 1e-15);

        assert!(hamiltonian(&phi1, &[1]).is_err());
    }

    #[test]
    fn hamiltonian_matches_rewritten_curie_weiss_form() {
        for b in [0.0, 0.5, 1.0, 2.0] {
            let phi = cw_interaction(b);
            for big_n in 2..=7 {
                for idx in 0..(1 << big_n) {
                    let sigma = decode(idx, 2, big_n);
                    let s: Vec<f64> = sigma.iter().map(|&x| spin(x)).collect();
                    let nf = big_n as f64;
                    let mut minus_h = 0.0;
                    for j in 0..big_n {
                        for k in j + 1..big_n {
                            minus_h += s[j] * s[k] / (nf - 1.0);
                        }
                        minus_h += b * (2.0 * (j as f64 + 1.0) - nf - 1.0) / (nf - 1.0) * s[j];
                    }
                    let h = hamiltonian(&phi, &sigma).unwrap();
                    assert!((h + minus_h).abs() < 1e-12, "b={b} N={big_n} idx={idx}");
                }
            }
        }
    }

    #[test]
    fn hamiltonian_matches_subset_definition_for_three_body() {
        let a = Alphabet::new(["a", "b", "c"]).unwrap();
        let table: Vec<f64> = (0..27).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.37).collect();
        let phi = Interaction::new(a, 3, table).unwrap();
        for idx in (0..3usize.pow(6)).step_by(7) {
            let sigma = decode(idx, 3, 6);
            assert!((hamiltonian(&phi, &sigma).unwrap() - brute_hamiltonian(&phi, &sigma)).abs() < 1e-12);
        }
    }

    #[test]
    fn gibbs_examples() {
        let phi = cw_interaction(0.0);
        let g0 = gibbs(&phi, 6, 0.0).unwrap();
        assert!(g0.log_partition.abs() < 1e-14);
        assert!(g0.measure.weights().iter().all(|&w| (w - 1.0 / 64.0).abs() < 1e-16));

        // Z_2 = ¼ Σ exp(β σ1σ2) = cosh β
        for beta in [0.3, 1.0, 2.0] {
            let g = gibbs(&phi, 2, beta).unwrap();
            assert!((g.log_partition - beta.cosh().ln()).abs() < 1e-14);
        }

        let c = Interaction::constant(Alphabet::spins(), 2, 0.8).unwrap();
        let g = gibbs(&c, 5, 1.5).unwrap();
        assert!((g.log_partition + 1.5 * 5.0 * 0.8).abs() < 1e-13);

        assert!(gibbs(&phi, 3, -1.0).is_err());
    }

    #[test]
    fn log_partition_survives_large_beta() {
        let g = gibbs(&cw_interaction(2.0), 10, 400.0).unwrap();
        assert!(g.log_partition.is_finite());
        let e0 = ground_states_exhaustive(&cw_interaction(2.0), 10).unwrap().energy;
        // Ω ≈ -β E_0 - N log 2 + log(degeneracy) at low temperature
        assert!((g.log_partition - (-400.0 * e0 - 10.0 * 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn thinned_marginal_examples() {
        let phi = cw_interaction(0.0);
        let g = gibbs(&phi, 4, 1.0).unwrap();
        assert_eq!(thinned_gibbs_marginal(&phi, 4, 1.0, 4).unwrap(), g.measure);
        let flat = thinned_gibbs_marginal(&phi, 5, 0.0, 2).unwrap();
        assert!(flat.weights().iter().all(|&w| (w - 0.25).abs() < 1e-15));

        // explicit average over the six pairs of sites
        let t = thinned_gibbs_marginal(&phi, 4, 1.0, 2).unwrap();
        let mut oracle = [0.0; 4];
        for (idx, &w) in g.measure.weights().iter().enumerate() {
            let s = decode(idx, 2, 4);
            for pair in subsets(4, 2) {
                oracle[s[pair[0]] * 2 + s[pair[1]]] += w / 6.0;
            }
        }
        for (a, b) in t.weights().iter().zip(oracle) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn energy_identity_examples() {
        let phi = cw_interaction(0.0);
        let e = energy_identity_check(&phi, 2, 1.0).unwrap();
        assert!((e.lhs + 0.5 * 1f64.tanh()).abs() < 1e-15);
        assert!((e.rhs + 0.5 * 1f64.tanh()).abs() < 1e-15);

        let phi = cw_interaction(1.3);
        let e = energy_identity_check(&phi, 6, 0.0).unwrap();
        assert!((e.rhs - phi.uniform_mean()).abs() < 1e-15 && e.gap < 1e-15);
    }

    #[test]
    fn relative_entropy_examples() {
        let uniform = JointMeasure::iid(Alphabet::spins(), &[0.5, 0.5], 4).unwrap();
        assert!(relative_entropy(&uniform).abs() < 1e-15);
        let point = JointMeasure::point_mass(Alphabet::spins(), &[1, 0, 1, 1, 0]).unwrap();
        assert!((relative_entropy(&point) + 5.0 * 2f64.ln()).abs() < 1e-14);

        let a = JointMeasure::new(Alphabet::spins(), 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let b = JointMeasure::new(Alphabet::spins(), 2, vec![0.7, 0.0, 0.1, 0.2]).unwrap();
        let mid: Vec<f64> = a.weights().iter().zip(b.weights()).map(|(x, y)| 0.5 * (x + y)).collect();
        let mid = JointMeasure::new(Alphabet::spins(), 2, mid).unwrap();
        assert!(relative_entropy(&mid) >= 0.5 * (relative_entropy(&a) + relative_entropy(&b)));
    }

    #[test]
    fn variational_gap_examples() {
        let phi = cw_interaction(2.0);
        let g = gibbs(&phi, 6, 1.0).unwrap();
        assert!(g.variational_gap(&g.measure).unwrap().abs() < 1e-12);

        let uniform = JointMeasure::iid(Alphabet::spins(), &[0.5, 0.5], 6).unwrap();
        let gap_u = g.variational_gap(&uniform).unwrap();
        assert!((gap_u - (g.log_partition + g.mean_energy(&uniform).unwrap())).abs() < 1e-13);
        assert!(gap_u >= 0.0);

        let beta = 20.0;
        let gs = ground_states_exhaustive(&phi, 6).unwrap();
        let point = JointMeasure::point_mass(Alphabet::spins(), &gs.minimizers[0]).unwrap();
        let g = gibbs(&phi, 6, beta).unwrap();
        let gap = g.variational_gap(&point).unwrap();
        assert!((gap - (g.log_partition + beta * gs.energy + 6.0 * 2f64.ln())).abs() < 1e-10);
        assert!(gap >= 0.0);
    }

    #[test]
    fn subadditivity_and_pressure_examples() {
        let phi = cw_interaction(0.0);
        let flat = subadditivity_sweep(&phi, 0.0, 10).unwrap();
        assert!(flat.entries.iter().all(|e| e.gap.abs() < 1e-15));

        let r = subadditivity_sweep(&phi, 1.0, 12).unwrap();
        assert!(r.max_gap() <= 0.0, "max gap {}", r.max_gap());
        assert!(r.min_lower_margin() >= -1e-12);

        let c = Interaction::constant(Alphabet::spins(), 2, -0.4).unwrap();
        let r = subadditivity_sweep(&c, 1.3, 10).unwrap();
        assert!(r.entries.iter().all(|e| e.gap.abs() < 1e-12));
        let p = pressure_sequence(&c, 1.3, 8).unwrap();
        assert!(p.iter().all(|e| (e.omega_per_site - 1.3 * 0.4).abs() < 1e-13));
        assert!(p[0].difference.is_nan());

        let p0 = pressure_sequence(&phi, 0.0, 6).unwrap();
        assert!(p0.iter().all(|e| e.omega_per_site.abs() < 1e-15));
    }

    #[test]
    fn cw_ground_profile_phases() {
        let g0 = cw_ground_profile(0.0).unwrap();
        assert_eq!(g0.phase, CwPhase::Uniform);
        assert_eq!(g0.energy, 0.5);
        assert_eq!(g0.profiles.len(), 2);
        assert!(g0.profiles.iter().all(|p| p.pieces() == 1));

        let g2 = cw_ground_profile(2.0).unwrap();
        assert_eq!(g2.phase, CwPhase::MidpointKink);
        assert_eq!(g2.energy, 1.0);
        assert_eq!(g2.profiles[0].breakpoints(), &[0.0, 0.5, 1.0]);

        let g1 = cw_ground_profile(1.0).unwrap();
        assert_eq!(g1.phase, CwPhase::KinkContinuum);
        assert_eq!(g1.magnetizations, MagnetizationSet::Interval(-1.0, 1.0));
        for m in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            assert_eq!(cw_energy_at_magnetization(1.0, m), 0.5);
        }
    }

    #[test]
    fn ground_profiles_attain_the_stated_energy() {
        // -μ_2(φ_2) evaluated on the two-point law of each optimal profile
        for b in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let state = cw_ground_profile(b).unwrap();
            let phi = cw_interaction(b);
            for p in &state.profiles {
                let mu2 = build_joint(p, 2).unwrap();
                let value = -mu2.expectation(phi.table());
                assert!((value - state.energy).abs() < 1e-14, "b={b}: {value} vs {}", state.energy);
            }
        }
        // a reflected field mirrors the kink
        let neg = cw_ground_profile(-2.0).unwrap();
        assert_eq!(neg.profiles[0].measures()[0], vec![0.0, 1.0]);
        let mu2 = build_joint(&neg.profiles[0], 2).unwrap();
        assert!((-mu2.expectation(cw_interaction(-2.0).table()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn interaction_json_round_trip() {
        let phi = cw_interaction(0.7);
        let back = Interaction::from_json(&phi.to_json()).unwrap();
        assert_eq!(back, phi);
        let missing = r#"{"alphabet": ["-1","+1"], "arity": 2, "table": {"(-1,-1)": 1.0}}"#;
        assert!(matches!(Interaction::from_json(missing), Err(Error::Parse(ref s)) if s.contains("missing")));
        let bad_sym = r#"{"alphabet": ["-1","+1"], "arity": 1, "table": {"(0)": 1.0, "(+1)": 2.0}}"#;
        assert!(Interaction::from_json(bad_sym).is_err());
    }
}
