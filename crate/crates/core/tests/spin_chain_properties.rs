mod common;

use common::{alphabet, random_measure};
use proptest::prelude::*;
use thinning::combinatorics::subsets;
use thinning::measures::decode;
use thinning::spin_chain::{
    cw_interaction, energy_identity_check, energy_table, ground_states_exhaustive, gibbs, relative_entropy,
    subadditivity_sweep, thinned_gibbs_marginal, Interaction,
};
use thinning::Alphabet;

fn interaction_strategy() -> impl Strategy<Value = Interaction> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(m, n)| {
        proptest::collection::vec(-2.0f64..2.0, m.pow(n as u32))
            .prop_map(move |t| Interaction::new(alphabet(m), n, t).unwrap())
    })
}

fn brute_energy(phi: &Interaction, sigma: &[usize]) -> f64 {
    let subs = subsets(sigma.len(), phi.arity());
    let s: f64 = subs
        .iter()
        .map(|x| phi.value(&x.iter().map(|&i| sigma[i]).collect::<Vec<_>>()))
        .sum();
    sigma.len() as f64 * s / subs.len() as f64
}

fn is_kink(cfg: &[usize]) -> bool {
    cfg.windows(2).all(|w| w[0] <= w[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn energy_table_matches_subset_definition(phi in interaction_strategy(), extra in 0usize..=4) {
        let big_n = phi.arity() + extra;
        let m = phi.alphabet().len();
        let table = energy_table(&phi, big_n).unwrap();
        for (idx, e) in table.iter().enumerate() {
            prop_assert!((e - brute_energy(&phi, &decode(idx, m, big_n))).abs() <= 1e-12);
        }
    }

    #[test]
    fn energy_identity_for_random_tables(phi in interaction_strategy(), extra in 0usize..=3, beta in 0.0f64..2.0) {
        let e = energy_identity_check(&phi, phi.arity() + extra, beta).unwrap();
        prop_assert!(e.gap <= 1e-12, "{:?}", e);
    }

    #[test]
    fn energy_splits_over_complementary_thinnings(phi in interaction_strategy(), seed in any::<u64>(), extra in 0usize..=3) {
        let n = phi.arity();
        let big_n = 2 * n + extra;
        prop_assume!(phi.alphabet().len().pow(big_n as u32) <= 4096);
        let rho = random_measure(phi.alphabet().clone(), big_n, seed);
        let full = rho.expectation(&energy_table(&phi, big_n).unwrap());
        for k in n..=big_n - n {
            let a = rho.thin_to(k).unwrap().expectation(&energy_table(&phi, k).unwrap());
            let b = rho.thin_to(big_n - k).unwrap().expectation(&energy_table(&phi, big_n - k).unwrap());
            prop_assert!((full - a - b).abs() <= 1e-12 * full.abs().max(1.0));
        }
    }

    #[test]
    fn entropy_is_subadditive_under_thinning(seed in any::<u64>(), big_n in 2usize..=10) {
        let rho = random_measure(Alphabet::spins(), big_n, seed);
        let s = relative_entropy(&rho);
        prop_assert!(s <= 1e-15);
        for k in 1..big_n {
            let sk = relative_entropy(&rho.thin_to(k).unwrap());
            let snk = relative_entropy(&rho.thin_to(big_n - k).unwrap());
            prop_assert!(s <= sk + snk + 1e-12);
        }
    }

    #[test]
    fn variational_gap_is_nonnegative(seed in any::<u64>(), big_n in 2usize..=8, beta in 0.0f64..3.0, b in 0.0f64..2.5) {
        let g = gibbs(&cw_interaction(b), big_n, beta).unwrap();
        let rho = random_measure(Alphabet::spins(), big_n, seed);
        prop_assert!(g.variational_gap(&rho).unwrap() >= -1e-10);
        prop_assert!(g.variational_gap(&g.measure).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn gibbs_thinnings_are_consistent(b in 0.0f64..2.5, beta in 0.0f64..2.0, big_n in 3usize..=8) {
        let phi = cw_interaction(b);
        let k = big_n - 1;
        let direct = thinned_gibbs_marginal(&phi, big_n, beta, 2).unwrap();
        let via = thinned_gibbs_marginal(&phi, big_n, beta, k).unwrap().thin_to(2).unwrap();
        prop_assert!(direct.tv_distance(&via).unwrap() <= 1e-13);
    }
}

#[test]
fn phase_diagram_at_ten_sites() {
    let low = ground_states_exhaustive(&cw_interaction(0.5), 10).unwrap();
    assert_eq!(low.minimizers, vec![vec![0; 10], vec![1; 10]]);

    let high = ground_states_exhaustive(&cw_interaction(2.0), 10).unwrap();
    assert!(high.minimizers.iter().all(|c| is_kink(c)));
    for c in &high.minimizers {
        let minus = c.iter().filter(|&&x| x == 0).count();
        assert!((minus as i64 - 5).abs() <= 1, "{c:?}");
    }

    let critical = ground_states_exhaustive(&cw_interaction(1.0), 10).unwrap();
    let kinks: Vec<Vec<usize>> = (0..=10).map(|k| (0..10).map(|i| usize::from(i >= k)).collect()).collect();
    for k in &kinks {
        assert!(critical.minimizers.contains(k));
    }
}

#[test]
fn odd_sizes_split_the_midpoint_kink() {
    let r = ground_states_exhaustive(&cw_interaction(2.0), 9).unwrap();
    assert_eq!(r.degeneracy, 2);
    let minus: Vec<usize> = r.minimizers.iter().map(|c| c.iter().filter(|&&x| x == 0).count()).collect();
    assert!(minus.contains(&4) && minus.contains(&5));
}

#[test]
fn ground_magnetization_follows_the_sign_profile() {
    for big_n in 8..=12 {
        let r = ground_states_exhaustive(&cw_interaction(2.0), big_n).unwrap();
        let prof = r.magnetization_profile();
        for (i, m) in prof.iter().enumerate() {
            let t = (i as f64 + 1.0) / big_n as f64;
            let target = if t < 0.5 { -1.0 } else if t > 0.5 { 1.0 } else { *m };
            // the two minimizers of odd N disagree only on the middle site
            if big_n % 2 == 1 && i == big_n / 2 {
                assert_eq!(*m, 0.0);
            } else {
                assert_eq!(*m, target, "N={big_n} site {}", i + 1);
            }
        }
    }
}

#[test]
fn subadditivity_across_the_curie_weiss_grid() {
    for b in [0.0, 0.5, 1.0, 2.0] {
        let phi = cw_interaction(b);
        for beta in [0.5, 1.0, 2.0] {
            let r = subadditivity_sweep(&phi, beta, 14).unwrap();
            assert!(r.max_gap() <= 1e-9, "b={b} beta={beta}: {}", r.max_gap());
            assert!(r.min_lower_margin() >= -1e-9);
        }
    }
}
