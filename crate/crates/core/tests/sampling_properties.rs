use thinning::profile::coordinate_marginal;
use thinning::sampling::{
    batch_mean_stderr, draw_config, empirical_profile, first_moment_report, lln_check, sample_rng, Interval,
};
use thinning::{kink_profile, PiecewiseProfile};

fn kink_lln(samples: usize, seed: u64) -> thinning::sampling::LlnReport {
    let p = kink_profile(0.5).unwrap();
    let iv = [Interval::new(0.0, 0.5).unwrap(), Interval::new(0.5, 1.0).unwrap()];
    let fs = [vec![1.0, 0.0], vec![0.0, 1.0]];
    lln_check(&p, &iv, &fs, &[20, 50, 100, 200], samples, seed).unwrap()
}

#[test]
fn kink_lln_gaps_shrink() {
    let r = kink_lln(100_000, 42);
    assert_eq!(r.rows[0].closed_form, 0.25);
    assert!(r.gaps_shrink(), "{:?}", r.rows);
    assert!(r.gaps_mostly_shrink());
}

#[test]
fn reruns_are_identical() {
    assert_eq!(kink_lln(2_000, 7), kink_lln(2_000, 7));
    assert_ne!(kink_lln(2_000, 7), kink_lln(2_000, 8));
}

#[test]
fn first_moments_at_the_tested_sizes() {
    for row in first_moment_report(&[2, 5, 10], 300_000, 5).unwrap() {
        assert!(row.z_score.abs() <= 3.5, "{row:?}");
    }
}

/// `E ∫ M_N(t) t^{n-1} dt = Σ_K P(X_K ∈ class) ∫_{(K-1)/N}^{K/N} t^{n-1} dt`,
/// with the coordinate laws taken from the exact Beta-kernel marginals.
#[test]
fn empirical_profile_moments_match_the_marginal_oracle() {
    let p = PiecewiseProfile::new(
        thinning::Alphabet::new(["a", "b", "c"]).unwrap(),
        vec![0.0, 0.3, 0.8, 1.0],
        vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.1, 0.8], vec![0.0, 0.5, 0.5]],
    )
    .unwrap();
    let partition = vec![vec![0], vec![1, 2]];
    let big_n = 12;
    for n in [1usize, 3] {
        let pow = n as i32;
        let mut oracle = [0.0; 2];
        for k in 1..=big_n {
            let law = coordinate_marginal(&p, big_n, k).unwrap();
            let w = ((k as f64 / big_n as f64).powi(pow) - ((k - 1) as f64 / big_n as f64).powi(pow)) / n as f64;
            oracle[0] += law[0] * w;
            oracle[1] += (law[1] + law[2]) * w;
        }
        let draws: Vec<Vec<f64>> = (0..200_000u64)
            .map(|i| {
                let (_, x) = draw_config(&mut sample_rng(3, 77, i), &p, big_n);
                empirical_profile(&x, &partition, 3).unwrap().moment(n - 1)
            })
            .collect();
        for c in 0..2 {
            let vals: Vec<f64> = draws.iter().map(|d| d[c]).collect();
            let (mean, se) = batch_mean_stderr(&vals);
            assert!((mean - oracle[c]).abs() <= 3.5 * se, "n={n} class {c}: {mean} vs {}", oracle[c]);
        }
    }
}
