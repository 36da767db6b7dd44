//! Small exact-ish combinatorial helpers shared by the measure constructions.

/// `C(n, k)` as an `f64`, zero when `k > n`.
///
/// Computed multiplicatively; exact while the result fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round_if_integral()
}

/// `C(n, k)` in `u128`, `None` on overflow.
pub fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `n!` in `u128`, `None` on overflow (n > 34).
pub fn factorial_u128(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// Multinomial coefficient `n! / (k_1! ... k_R!)` with `n = Σ k_r`, as `f64`.
pub fn multinomial(parts: &[usize]) -> f64 {
    let mut total = 0usize;
    let mut acc = 1.0_f64;
    for &k in parts {
        total += k;
        acc *= binomial(total, k);
    }
    acc
}

/// All compositions of `n` into `parts` nonnegative summands, in
/// lexicographic order of `(k_1, ..., k_R)`.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if parts == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut current = vec![0usize; parts];
    fill(n, 0, &mut current, &mut out);
    out
}

fn fill(remaining: usize, pos: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for k in 0..=remaining {
        current[pos] = k;
        fill(remaining - k, pos + 1, current, out);
    }
}

/// All strictly increasing `k`-subsets of `0..n`, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

trait RoundIfIntegral {
    fn round_if_integral(self) -> Self;
}

impl RoundIfIntegral for f64 {
    // Multiplicative accumulation can land one ulp off an integer.
    fn round_if_integral(self) -> f64 {
        let r = self.round();
        if (self - r).abs() <= 1e-9 * r.abs().max(1.0) && r < 9.0e15 {
            r
        } else {
            self
        }
    }
}
