use afw_core::bounds::{audenaert, cb_osc, cb_osc_opt, BoundParams, QuantityPreset};
use afw_core::special::{eta, g, h2};
use afw_core::spectrum::{count_levels, levels_up_to, nth_level, Oscillator, SpectrumModel};
use afw_core::thermo::{f_max, mean_energy, solve_lambda};
use afw_core::verify::random::{random_ensemble_with, random_state_with, rng_for};
use afw_core::verify::{entropy, kantorovich, d0_distance, trace_distance, transport, DensityMatrix};
use proptest::prelude::*;

fn modes() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..5.0, 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn g_is_increasing_concave_and_sandwiched(x in 1e-6f64..1e6, dx in 1e-3f64..10.0) {
        let (a, b) = (g(x), g(x + dx));
        prop_assert!(b > a);
        // ln(1+x) + 1 is an upper bound and ln(1+x) a lower one.
        prop_assert!(a >= x.ln_1p() && a <= x.ln_1p() + 1.0);
        let mid = g(x + dx / 2.0);
        prop_assert!(mid >= 0.5 * (a + b) * (1.0 - 1e-12));
    }

    #[test]
    fn h2_is_symmetric_and_bounded(p in 0.0f64..=1.0) {
        let h = h2(p);
        prop_assert!((0.0..=std::f64::consts::LN_2 + 1e-15).contains(&h));
        prop_assert!((h - h2(1.0 - p)).abs() < 1e-15);
        prop_assert!((h - eta(p) - eta(1.0 - p)).abs() < 1e-15);
    }

    #[test]
    fn bound_is_linear_in_coefficients(c in 0.0f64..4.0, d in 0.0f64..4.0, eps in 1e-4f64..0.5, energy in 1.0f64..100.0) {
        let osc = Oscillator::new(vec![1.0]).unwrap();
        let delta = BoundParams::oscillator_delta(1);
        let t = 0.5 * afw_core::bounds::t_max_osc(&osc, energy - 0.5, eps).unwrap();
        let at = |c, d| cb_osc(&osc, energy, eps, t, &BoundParams::new(c, d, delta).unwrap()).unwrap();
        let (only_c, only_d) = (at(1.0, 0.0), at(0.0, 1.0));
        let both = at(c, d);
        prop_assert!((both - (c * only_c + d * only_d)).abs() <= 1e-12 * both.abs().max(1.0));
    }

    #[test]
    fn optimised_bound_grows_with_eps(eps in 1e-4f64..0.3, k in 1.01f64..3.0, energy in 0.6f64..1e3) {
        let osc = Oscillator::new(vec![1.0]).unwrap();
        let p = BoundParams::from_preset(QuantityPreset::Entropy, BoundParams::oscillator_delta(1)).unwrap();
        let (_, lo) = cb_osc_opt(&osc, energy, eps, &p).unwrap();
        let (_, hi) = cb_osc_opt(&osc, energy, (eps * k).min(0.99), &p).unwrap();
        prop_assert!(hi >= lo * (1.0 - 1e-9));
    }

    #[test]
    fn audenaert_grows_with_eps(d in 2u64..100, eps in 0.0f64..0.4) {
        let a = audenaert(d, eps).unwrap();
        let b = audenaert(d, (eps + 0.05).min(1.0 - 1.0 / d as f64)).unwrap();
        prop_assert!(b >= a - 1e-15);
    }

    #[test]
    fn level_counting_agrees_with_listing(w in modes(), x in 0.0f64..8.0) {
        let model = SpectrumModel::oscillator(w.clone()).unwrap();
        let listed = levels_up_to(&model, x).unwrap();
        prop_assert_eq!(listed.len() as u64, count_levels(&w, x).unwrap());
        prop_assert!(listed.windows(2).all(|p| p[0] <= p[1]));
        for (k, e) in listed.iter().enumerate() {
            let n = nth_level(&model, k as u64).unwrap();
            prop_assert!((n - e).abs() <= 1e-9 * e.max(1.0));
        }
    }

    #[test]
    fn lambda_inverts_mean_energy(w in modes(), gap in 1e-2f64..1e2) {
        let model = SpectrumModel::oscillator(w).unwrap();
        let e = model.ground_energy() + gap;
        let l = solve_lambda(&model, e).unwrap();
        prop_assert!(l > 0.0);
        prop_assert!((mean_energy(&model, l).unwrap() - e).abs() <= 1e-9 * e);
        let f = f_max(&model, e).unwrap().entropy;
        prop_assert!(f <= f_max(&model, e + 1.0).unwrap().entropy);
    }

    #[test]
    fn state_functionals_are_in_range(seed in any::<u64>(), dim in 2usize..6) {
        let mut rng = rng_for(seed, 0);
        let rho = random_state_with(dim, dim, &mut rng).unwrap();
        let sigma = random_state_with(dim, 1, &mut rng).unwrap();
        let s = entropy(&rho);
        prop_assert!(s >= 0.0 && s <= (dim as f64).ln() + 1e-12);
        prop_assert!(entropy(&sigma) < 1e-9);
        let t = trace_distance(&rho, &sigma).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!((t - trace_distance(&sigma, &rho).unwrap()).abs() < 1e-12);
        prop_assert!(trace_distance(&rho, &rho).unwrap() < 1e-12);
        prop_assert!(entropy(&DensityMatrix::maximally_mixed(dim)) >= s - 1e-12);
    }

    #[test]
    fn transport_plan_has_the_right_marginals(
        supply in prop::collection::vec(0.01f64..1.0, 1..6),
        demand in prop::collection::vec(0.01f64..1.0, 1..6),
        seed in any::<u64>(),
    ) {
        let (ss, ds) = (supply.iter().sum::<f64>(), demand.iter().sum::<f64>());
        let a: Vec<f64> = supply.iter().map(|x| x / ss).collect();
        let b: Vec<f64> = demand.iter().map(|x| x / ds).collect();
        let cost: Vec<Vec<f64>> = (0..a.len())
            .map(|i| (0..b.len()).map(|j| ((i * 7 + j * 13) as u64 ^ seed) as f64 % 17.0).collect())
            .collect();
        let (value, plan) = transport(&a, &b, &cost).unwrap();
        let mut direct = 0.0;
        for (i, row) in plan.iter().enumerate() {
            prop_assert!(row.iter().all(|&x| x >= -1e-12));
            prop_assert!((row.iter().sum::<f64>() - a[i]).abs() < 1e-9);
            for (j, x) in row.iter().enumerate() {
                direct += x * cost[i][j];
            }
        }
        for j in 0..b.len() {
            prop_assert!((plan.iter().map(|r| r[j]).sum::<f64>() - b[j]).abs() < 1e-9);
        }
        prop_assert!((value - direct).abs() < 1e-9);
    }

    #[test]
    fn kantorovich_is_bounded_and_symmetric(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let mut rng = rng_for(seed, 1);
        let mu = random_ensemble_with(3, n, &mut rng).unwrap();
        let nu = random_ensemble_with(3, m, &mut rng).unwrap();
        let dk = kantorovich(&mu, &nu).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&dk));
        prop_assert!(kantorovich(&mu, &mu).unwrap() < 1e-9);
        prop_assert!((dk - kantorovich(&nu, &mu).unwrap()).abs() < 1e-9);
        prop_assert!(d0_distance(&mu, &nu).unwrap() >= 0.0);
    }
}
