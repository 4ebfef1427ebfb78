//! Randomized properties of selection and allocation.

use proptest::prelude::*;

use crate::allocation::{
    allocate_modified, allocate_naive_rounded, check_admissible, pinned_count_profile, pinning_sequence, solve_relaxed,
};
use crate::ensemble::EnsembleStatistics;
use crate::selection::{select_models, select_models_with, SelectionOptions};

fn stats(sigma: Vec<f64>, rho: Vec<f64>, costs: Vec<f64>) -> EnsembleStatistics {
    let ids = (1..=rho.len()).map(|i| format!("f{i}")).collect();
    EnsembleStatistics::new(ids, sigma, rho, costs, 0).unwrap()
}

/// Admissible ensemble: strictly decreasing ρ², costs meeting the ratio condition with slack.
fn admissible(max_k: usize) -> impl Strategy<Value = EnsembleStatistics> {
    (1..=max_k).prop_flat_map(|k| {
        (
            prop::collection::vec(0.05f64..5.0, k - 1),
            prop::collection::vec(1.01f64..20.0, k - 1),
            prop::collection::vec(0.1f64..10.0, k),
            prop::collection::vec(any::<bool>(), k - 1),
            0.5f64..500.0,
        )
            .prop_filter_map("round-off broke admissibility", |(drops, slack, sigma, neg, w1)| {
                let mut rho_sq = vec![1.0];
                for d in &drops {
                    let last = *rho_sq.last().unwrap();
                    rho_sq.push(last * (1.0 - 10f64.powf(-d)));
                }
                rho_sq.push(0.0);
                let mut costs = vec![w1];
                for i in 1..rho_sq.len() - 1 {
                    let q = (rho_sq[i - 1] - rho_sq[i]) / (rho_sq[i] - rho_sq[i + 1]);
                    costs.push(costs[i - 1] / (q * slack[i - 1]));
                }
                let rho: Vec<f64> = (0..costs.len())
                    .map(|i| if i > 0 && neg[i - 1] { -rho_sq[i].sqrt() } else { rho_sq[i].sqrt() })
                    .collect();
                let s = stats(sigma, rho, costs);
                check_admissible(&s).ok().map(|_| s)
            })
    })
}

fn with_budget(max_k: usize) -> impl Strategy<Value = (EnsembleStatistics, f64)> {
    (admissible(max_k), 0.0f64..5.0).prop_map(|(s, t)| {
        let p = s.costs.iter().sum::<f64>() * 10f64.powf(t);
        (s, p)
    })
}

/// Arbitrary ensemble for selection: unordered correlations, unrelated costs.
fn arbitrary(max_k: usize) -> impl Strategy<Value = EnsembleStatistics> {
    (1..=max_k).prop_flat_map(|k| {
        (
            prop::collection::vec(-0.999f64..0.999, k - 1),
            prop::collection::vec(0.001f64..1.0, k - 1),
            prop::collection::vec(0.1f64..10.0, k),
        )
            .prop_map(|(rho, costs, sigma)| {
                stats(sigma, std::iter::once(1.0).chain(rho).collect(), std::iter::once(1.0).chain(costs).collect())
            })
    })
}

fn variance_of(stats: &EnsembleStatistics, indices: &[usize], p: f64) -> f64 {
    let rho_sq: Vec<f64> = indices.iter().map(|&i| stats.rho1[i] * stats.rho1[i]).chain([0.0]).collect();
    let sum: f64 = indices.iter().enumerate().map(|(j, &i)| (stats.costs[i] * (rho_sq[j] - rho_sq[j + 1])).sqrt()).sum();
    stats.sigma[0].powi(2) / p * sum * sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn modified_plan_preserves_budget((s, p) in with_budget(6)) {
        let plan = allocate_modified(&s, p).unwrap();
        prop_assert!(plan.realized_cost <= p, "{} > {p}", plan.realized_cost);
        prop_assert!(plan.m[0] >= 1);
        prop_assert!(plan.m.windows(2).all(|w| w[0] <= w[1]), "{:?}", plan.m);
    }

    #[test]
    fn modified_equals_naive_when_no_pinning_is_needed((s, p) in with_budget(6)) {
        let relaxed = solve_relaxed(&s, p, 0).unwrap();
        prop_assume!(relaxed.m_real.iter().all(|&m| m >= 1.0));
        prop_assert_eq!(allocate_modified(&s, p).unwrap().m, allocate_naive_rounded(&s, p).unwrap().m);
    }

    #[test]
    fn pinned_profile_is_convex(s in admissible(4), extra in 2.0f64..400.0, pick in any::<prop::sample::Index>()) {
        prop_assume!(s.k() >= 2);
        let index = pick.index(s.k() - 1);
        let p = s.costs.iter().sum::<f64>() + extra * s.costs[index];
        let profile = pinned_count_profile(&s, p, index).unwrap();
        for w in profile.windows(3) {
            let d2 = w[0].1 - 2.0 * w[1].1 + w[2].1;
            prop_assert!(d2 > 0.0, "second difference {d2} at count {}", w[1].0);
        }
    }

    #[test]
    fn weights_do_not_depend_on_pivot((s, p) in with_budget(6)) {
        let base = solve_relaxed(&s, p, 0).unwrap().alpha;
        for i in 1..s.k() {
            if let Ok(sol) = solve_relaxed(&s, p, i) {
                prop_assert_eq!(&sol.alpha, &base);
            }
        }
    }

    #[test]
    fn pinning_loop_is_short_and_advances((s, p) in with_budget(6)) {
        let steps = pinning_sequence(&s, p).unwrap();
        prop_assert!(steps.len() <= s.k());
        prop_assert!(steps.windows(2).all(|w| w[0].pivot_index < w[1].pivot_index));
    }

    #[test]
    fn selection_argmin_ignores_budget(s in arbitrary(6)) {
        let Ok(a) = select_models(&s) else { return Ok(()) };
        let b = select_models_with(&s, SelectionOptions { benchmark_budget: Some(10.0 * s.costs[0]), ..Default::default() })
            .unwrap();
        prop_assert_eq!(&a.selected_indices, &b.selected_indices);
        prop_assert!((a.predicted_variance / b.predicted_variance - 10.0).abs() < 1e-9);
    }

    #[test]
    fn selection_variance_recomputes_and_subset_is_admissible(s in arbitrary(6)) {
        let Ok(sel) = select_models(&s) else { return Ok(()) };
        let v = variance_of(&s, &sel.selected_indices, s.costs[0]);
        prop_assert!((v - sel.predicted_variance).abs() <= 1e-12 * v, "{v} vs {}", sel.predicted_variance);
        prop_assert!(check_admissible(&s.subset(&sel.selected_indices).unwrap()).is_ok());
    }

    #[test]
    fn selection_commutes_with_permutation(s in arbitrary(6), shuffle in any::<u64>()) {
        let Ok(sel) = select_models(&s) else { return Ok(()) };
        let mut order: Vec<usize> = (1..s.k()).collect();
        let mut state = shuffle;
        for i in (1..order.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        let perm: Vec<usize> = std::iter::once(0).chain(order).collect();
        let permuted = s.subset(&perm).unwrap();
        let again = select_models(&permuted).unwrap();
        prop_assert_eq!(sel.selected_ids(&s), again.selected_ids(&permuted));
    }
}
