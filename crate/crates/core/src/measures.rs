//! Dense joint measures on `X^n` for a finite alphabet `X`, and the thinning
//! and exchangeable transition operators acting on them.
//!
//! Configurations `(x_1, ..., x_n)` are stored at the mixed-radix index
//! `Σ_k index(x_k) · m^(n-k)`, so the first coordinate is most significant.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default cap on the length of any dense table (`m^n` entries).
pub const DEFAULT_MAX_DENSE_LEN: usize = 1 << 24;

/// Tolerance used to validate normalization of probability vectors.
pub const NORMALIZATION_TOL: f64 = 1e-12;

static MAX_DENSE_LEN: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_DENSE_LEN);

/// Current cap on dense table length.
pub fn max_dense_len() -> usize {
    MAX_DENSE_LEN.load(Ordering::Relaxed)
}

/// Override the dense-length cap for the whole process.
pub fn set_max_dense_len(cap: usize) {
    MAX_DENSE_LEN.store(cap, Ordering::Relaxed);
}

/// `m^n`, or `CapExceeded` when it is larger than the configured cap.
pub fn dense_len(m: usize, n: usize) -> Result<usize> {
    let cap = max_dense_len();
    let mut len: u128 = 1;
    for _ in 0..n {
        len = len.saturating_mul(m as u128);
        if len > cap as u128 {
            let needed = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            return Err(Error::CapExceeded { needed, cap });
        }
    }
    Ok(len as usize)
}

/// An ordered finite state space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return invalid("alphabet must contain at least one symbol");
        }
        let mut seen = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if let Some(j) = seen.insert(s.as_str(), i) {
                return invalid(format!("alphabet symbol {s:?} repeated at positions {j} and {i}"));
            }
        }
        Ok(Self { symbols })
    }

    /// `{-, +}`, used by profiles of sign-valued variables.
    pub fn plus_minus() -> Self {
        Self { symbols: vec!["-".into(), "+".into()] }
    }

    /// `{-1, +1}`, the spin alphabet.
    pub fn spins() -> Self {
        Self { symbols: vec!["-1".into(), "+1".into()] }
    }

    /// `{0, 1}`, occupation numbers.
    pub fn occupation() -> Self {
        Self { symbols: vec!["0".into(), "1".into()] }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;

    fn try_from(symbols: Vec<String>) -> Result<Self> {
        Alphabet::new(symbols)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}

/// Encode a configuration of symbol indices at radix `m`.
pub fn encode(config: &[usize], m: usize) -> usize {
    config.iter().fold(0, |acc, &x| acc * m + x)
}

/// Decode a mixed-radix index into `n` symbol indices.
pub fn decode(mut index: usize, m: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % m;
        index /= m;
    }
    out
}

/// Check that `v` is a probability vector: finite, nonnegative, summing to 1.
pub fn validate_probability(v: &[f64], what: &str) -> Result<()> {
    if let Some((i, w)) = v.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
        return invalid(format!("{what}: entry {i} is {w}, expected a finite nonnegative weight"));
    }
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return invalid(format!("{what}: weights sum to {total}, expected 1"));
    }
    Ok(())
}

/// A probability measure on `X^n`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMeasure {
    alphabet: Alphabet,
    n: usize,
    weights: Vec<f64>,
}

impl JointMeasure {
    pub fn new(alphabet: Alphabet, n: usize, weights: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return invalid("a joint measure needs at least one coordinate");
        }
        let len = dense_len(alphabet.len(), n)?;
        if weights.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "expected {len} weights for {} symbols and n = {n}, got {}",
                alphabet.len(),
                weights.len()
            )));
        }
        validate_probability(&weights, "joint measure")?;
        Ok(Self { alphabet, n, weights })
    }

    /// Construct without validation; callers guarantee the invariants.
    pub(crate) fn from_parts(alphabet: Alphabet, n: usize, weights: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len(), alphabet.len().pow(n as u32));
        Self { alphabet, n, weights }
    }

    /// Point mass at a configuration of symbol indices.
    pub fn point_mass(alphabet: Alphabet, config: &[usize]) -> Result<Self> {
        let m = alphabet.len();
        if let Some(&x) = config.iter().find(|&&x| x >= m) {
            return invalid(format!("symbol index {x} out of range for {m} symbols"));
        }
        let mut weights = vec![0.0; dense_len(m, config.len())?];
        weights[encode(config, m)] = 1.0;
        Self::new(alphabet, config.len(), weights)
    }

    /// The product measure `ν_1 ⊗ ... ⊗ ν_n`.
    pub fn product(alphabet: Alphabet, factors: &[Vec<f64>]) -> Result<Self> {
        let m = alphabet.len();
        for (j, f) in factors.iter().enumerate() {
            if f.len() != m {
                return Err(Error::ShapeMismatch(format!("factor {j} has {} entries, expected {m}", f.len())));
            }
            validate_probability(f, &format!("factor {j}"))?;
        }
        dense_len(m, factors.len())?;
        let mut weights = vec![1.0];
        for f in factors {
            weights = kron(&weights, f);
        }
        Self::new(alphabet, factors.len(), weights)
    }

    /// The i.i.d. product `ν^{⊗n}`.
    pub fn iid(alphabet: Alphabet, nu: &[f64], n: usize) -> Result<Self> {
        Self::product(alphabet, &vec![nu.to_vec(); n])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of coordinates.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, config: &[usize]) -> f64 {
        self.weights[encode(config, self.alphabet.len())]
    }

    /// `Σ_x f(x) μ(x)` for a table `f` indexed like the weights.
    pub fn expectation(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.weights.len(), "observable length must match measure length");
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Delete one coordinate uniformly at random: the `n+1 → n` thinning step.
    pub fn thin_once(&self) -> Result<Self> {
        if self.n < 2 {
            return invalid("cannot thin below one coordinate");
        }
        let m = self.alphabet.len();
        let n_out = self.n - 1;
        let mut out = vec![0.0; self.weights.len() / m];
        let scale = 1.0 / self.n as f64;
        // deleting digit j: keep the j leading digits and the n_out - j trailing ones
        let pow: Vec<usize> = (0..=self.n).map(|e| m.pow(e as u32)).collect();
        for j in 0..self.n {
            let low_size = pow[n_out - j];
            let high_div = pow[self.n - j];
            for (z, &w) in self.weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let high = z / high_div;
                let low = z % low_size;
                out[high * low_size + low] += w;
            }
        }
        for w in &mut out {
            *w *= scale;
        }
        Ok(Self::from_parts(self.alphabet.clone(), n_out, out))
    }

    /// `T^n_k`: average over all order-preserving `k`-subsets of coordinates.
    ///
    /// Computed as `n - k` single deletions, which agrees with the subset
    /// average by the semigroup property.
    pub fn thin_to(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n {
            return invalid(format!("thinning target k = {k} must satisfy 1 <= k <= n = {}", self.n));
        }
        let mut cur = self.clone();
        while cur.n > k {
            cur = cur.thin_once()?;
        }
        Ok(cur)
    }

    /// Average over all coordinate permutations.
    ///
    /// Each configuration receives the mean weight of its permutation orbit,
    /// which equals `(n!)^{-1} Σ_π μ∘π`.
    pub fn symmetrize(&self) -> Self {
        let m = self.alphabet.len();
        let mut orbit_mass: HashMap<Vec<usize>, (f64, usize)> = HashMap::new();
        let mut keys = Vec::with_capacity(self.weights.len());
        for (idx, &w) in self.weights.iter().enumerate() {
            let key = type_class(idx, m, self.n);
            let e = orbit_mass.entry(key.clone()).or_insert((0.0, 0));
            e.0 += w;
            e.1 += 1;
            keys.push(key);
        }
        let weights = keys
            .iter()
            .map(|k| {
                let (mass, size) = orbit_mass[k];
                mass / size as f64
            })
            .collect();
        Self::from_parts(self.alphabet.clone(), self.n, weights)
    }

    /// `T̃^n_k`: thinning followed by a uniform random permutation.
    pub fn exchange_thin(&self, k: usize) -> Result<Self> {
        Ok(self.thin_to(k)?.symmetrize())
    }

    /// Law of coordinate `j` (1-based).
    pub fn marginal(&self, j: usize) -> Result<Vec<f64>> {
        if j == 0 || j > self.n {
            return invalid(format!("coordinate {j} out of range 1..={}", self.n));
        }
        let m = self.alphabet.len();
        let stride = m.pow((self.n - j) as u32);
        let mut out = vec![0.0; m];
        for (idx, &w) in self.weights.iter().enumerate() {
            out[(idx / stride) % m] += w;
        }
        Ok(out)
    }

    /// Total variation distance `½ Σ |μ - ν|`.
    pub fn tv_distance(&self, other: &Self) -> Result<f64> {
        if self.alphabet != other.alphabet || self.n != other.n {
            return Err(Error::ShapeMismatch(format!(
                "cannot compare measures on {} symbols x {} coordinates and {} symbols x {} coordinates",
                self.alphabet.len(),
                self.n,
                other.alphabet.len(),
                other.n
            )));
        }
        Ok(tv_vectors(&self.weights, &other.weights))
    }

    /// Serialize to the JSON measure format.
    pub fn to_json(&self, sparse: bool) -> String {
        let weights = if sparse {
            serde_json::Value::Array(
                self.weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w != 0.0)
                    .map(|(i, w)| serde_json::json!([i, w]))
                    .collect(),
            )
        } else {
            serde_json::json!(self.weights)
        };
        let mut obj = serde_json::json!({
            "alphabet": self.alphabet.symbols(),
            "n": self.n,
            "weights": weights,
        });
        if sparse {
            obj["sparse"] = serde_json::Value::Bool(true);
        }
        let mut s = serde_json::to_string_pretty(&obj).expect("measure serializes");
        s.push('\n');
        s
    }

    /// Parse the JSON measure format.
    ///
    /// Dense `weights` may omit trailing zeros. With `"sparse": true` the
    /// weights are `[index, weight]` pairs and absent indices are zero.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeasureFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        let len = dense_len(file.alphabet.len(), file.n)?;
        let mut weights = vec![0.0; len];
        if file.sparse {
            let pairs: Vec<(usize, f64)> = serde_json::from_value(file.weights)
                .map_err(|e| Error::Parse(format!("field \"weights\": expected [index, weight] pairs: {e}")))?;
            for (i, w) in pairs {
                if i >= len {
                    return Err(Error::Parse(format!("field \"weights\": index {i} out of range 0..{len}")));
                }
                weights[i] += w;
            }
        } else {
            let dense: Vec<f64> = serde_json::from_value(file.weights)
                .map_err(|e| Error::Parse(format!("field \"weights\": expected an array of numbers: {e}")))?;
            if dense.len() > len {
                return Err(Error::Parse(format!(
                    "field \"weights\": {} entries, at most {len} allowed",
                    dense.len()
                )));
            }
            weights[..dense.len()].copy_from_slice(&dense);
        }
        Self::new(file.alphabet, file.n, weights)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    alphabet: Alphabet,
    n: usize,
    weights: serde_json::Value,
    #[serde(default)]
    sparse: bool,
}

/// Sorted symbol multiset of a configuration: identifies its permutation orbit.
fn type_class(index: usize, m: usize, n: usize) -> Vec<usize> {
    let mut counts = vec![0usize; m];
    for x in decode(index, m, n) {
        counts[x] += 1;
    }
    counts
}

pub(crate) fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// `½ Σ |a - b|` for equal-length vectors.
pub fn tv_vectors(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// One `(n, k)` comparison inside an invariance check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelError {
    pub n: usize,
    pub k: usize,
    pub tv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub max_tv_error: f64,
    /// Every compared pair `k < n`, in increasing `n` then decreasing `k`.
    pub per_level_errors: Vec<LevelError>,
    pub tolerance: f64,
    pub pass: bool,
}

impl InvarianceReport {
    /// The pair attaining the maximal error, if any comparisons were made.
    pub fn worst(&self) -> Option<LevelError> {
        self.per_level_errors
            .iter()
            .copied()
            .fold(None, |best: Option<LevelError>, e| match best {
                Some(b) if b.tv >= e.tv => Some(b),
                _ => Some(e),
            })
    }
}

/// Check `μ_k = T^n_k μ_n` for all `k < n ≤ K`, where `family[i]` has `i + 1`
/// coordinates.
pub fn check_thinning_invariance(family: &[JointMeasure], tolerance: f64) -> Result<InvarianceReport> {
    for (i, mu) in family.iter().enumerate() {
        if mu.n != i + 1 {
            return Err(Error::ShapeMismatch(format!(
                "family entry {i} has {} coordinates, expected {}",
                mu.n,
                i + 1
            )));
        }
        if mu.alphabet != family[0].alphabet {
            return Err(Error::ShapeMismatch(format!("family entry {i} uses a different alphabet")));
        }
    }
    let mut per_level_errors = Vec::new();
    for mu_n in family.iter().skip(1) {
        let mut cur = mu_n.clone();
        while cur.n > 1 {
            cur = cur.thin_once()?;
            let tv = cur.tv_distance(&family[cur.n - 1])?;
            per_level_errors.push(LevelError { n: mu_n.n, k: cur.n, tv });
        }
    }
    let max_tv_error = per_level_errors.iter().map(|e| e.tv).fold(0.0, f64::max);
    Ok(InvarianceReport {
        max_tv_error,
        per_level_errors,
        tolerance,
        pass: max_tv_error <= tolerance,
    })
}
