use std::f64::consts::PI;

use pointer_core::classify::{
    accessibility, compare_quality, reliability, AccessibilityBudget, AccessibilityVerdict,
    ObserverModel, Quality, ReliabilityOptions, ReliabilityVerdict,
};
use pointer_core::info::{perturbed_eigenvalues, wprc_info_deficit, GeneralState};
use pointer_core::oracle::evolve_full;
use pointer_core::{
    availability, bloch_vector, longest_window, make_apparatus, overlap, prc_times,
    reduced_system_state, wprc_set, ApparatusSpec, Complex64, CouplingEnsemble, InitsPolicy,
    QubitInit, SystemInit, TimeSet, WindowConfig, WindowParams,
};
use proptest::prelude::*;

fn spec_strategy(max_n: usize) -> impl Strategy<Value = ApparatusSpec> {
    (1..=max_n, any::<u64>(), 0.0f64..0.5, 0.0f64..0.5).prop_map(|(n, seed, a, width)| {
        make_apparatus(
            CouplingEnsemble::Disordered {
                interval: (a, a + width),
                seed,
            },
            n,
            &InitsPolicy::Random {
                seed: seed ^ 0x5eed,
            },
        )
        .unwrap()
    })
}

fn system_strategy() -> impl Strategy<Value = SystemInit> {
    (0.0f64..PI, 0.0f64..2.0 * PI).prop_map(|(theta, phi)| {
        SystemInit::new(
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        )
        .unwrap()
    })
}

fn ordered(g: f64, n: usize) -> ApparatusSpec {
    make_apparatus(
        CouplingEnsemble::Ordered { g },
        n,
        &InitsPolicy::equatorial(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn availability_is_normalized(spec in spec_strategy(150), t in 0.0f64..1e4) {
        let a = availability(&spec, t);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        prop_assert!((availability(&spec, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_factorizes_over_concatenation(a in spec_strategy(40), b in spec_strategy(40), t in 0.0f64..500.0) {
        let joint = overlap(&a.concat(&b), t);
        let split = overlap(&a, t) * overlap(&b, t);
        prop_assert!((joint - split).norm() <= 1e-12 * split.norm().max(1e-300) + 1e-300);
    }

    #[test]
    fn ordered_availability_is_periodic(g in 0.01f64..1.0, n in 1usize..120, t in 0.0f64..100.0) {
        let spec = ordered(g, n);
        let a = availability(&spec, t);
        let b = availability(&spec, t + PI / (2.0 * g));
        prop_assert!((a - b).abs() < 1e-9 * a.max(1e-12) + 1e-12);
    }

    #[test]
    fn basis_state_pointers_never_decohere(
        couplings in prop::collection::vec(-1.0f64..1.0, 1..30),
        ups in prop::collection::vec(any::<bool>(), 30),
        t in 0.0f64..1e3,
    ) {
        let inits = couplings
            .iter()
            .zip(&ups)
            .map(|(_, &up)| if up { QubitInit::up() } else { QubitInit::down() })
            .collect();
        let spec = ApparatusSpec::new(couplings, inits).unwrap();
        prop_assert!(spec.is_trivial());
        prop_assert!((availability(&spec, t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_vector_is_consistent(spec in spec_strategy(20), sys in system_strategy(), t in 0.0f64..300.0) {
        let r = bloch_vector(&spec, &sys, t);
        let r0 = bloch_vector(&spec, &sys, 0.0);
        prop_assert!((r.r[2] - r0.r[2]).abs() < 1e-12);
        let rho = reduced_system_state(&spec, &sys, t);
        let back = r.to_density();
        for (x, y) in rho.iter().zip(back.iter()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn state_vector_evolution_is_unitary(spec in spec_strategy(10), sys in system_strategy(), t in 0.0f64..1e3) {
        let psi = evolve_full(&spec, &sys, t).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_sets_grow_with_epsilon(spec in spec_strategy(12), e1 in 0.001f64..0.3, e2 in 0.001f64..0.3) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let small = WindowParams::new(lo, 80.0).resolve(&spec).unwrap();
        let big = WindowConfig { epsilon: hi, ..small };
        let a = wprc_set(&spec, &small).unwrap();
        let b = wprc_set(&spec, &big).unwrap();
        prop_assert!(a.is_subset_of(&b, 1e-6));
        prop_assert!(a.measure() <= b.measure() + 1e-6);
    }

    #[test]
    fn exact_zeros_lie_in_every_window_set(g in 0.02f64..0.5, n in 1usize..40, eps in 1e-4f64..0.3) {
        let spec = ordered(g, n);
        let cfg = WindowParams::new(eps, 60.0).resolve(&spec).unwrap();
        let wprc = wprc_set(&spec, &cfg).unwrap();
        let zeros = prc_times(&spec, &cfg).unwrap();
        prop_assert!(!zeros.is_empty() || PI / (4.0 * g) > 60.0);
        for &p in zeros.points() {
            prop_assert!(wprc.contains(p));
        }
    }

    #[test]
    fn disordered_zeros_lie_in_window_sets(spec in spec_strategy(8), eps in 1e-4f64..0.3) {
        let cfg = WindowParams::new(eps, 60.0).resolve(&spec).unwrap();
        let wprc = wprc_set(&spec, &cfg).unwrap();
        for &p in prc_times(&spec, &cfg).unwrap().points() {
            prop_assert!(wprc.contains(p));
        }
    }

    #[test]
    fn window_measure_shrinks_as_epsilon_vanishes(g in 0.05f64..0.5, n in 1usize..60) {
        let spec = ordered(g, n);
        let t_max = PI / g;
        let measures: Vec<f64> = [0.1, 0.01, 1e-3, 1e-4, 1e-6]
            .iter()
            .map(|&eps| {
                let cfg = WindowParams::new(eps, t_max).resolve(&spec).unwrap();
                wprc_set(&spec, &cfg).unwrap().measure()
            })
            .collect();
        for w in measures.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
        // τ-width shrinks like ε^{1/N}
        let eps: f64 = 1e-6;
        let half_width = (eps.powf(1.0 / n as f64)).asin() / (2.0 * g);
        prop_assert!((measures[4] - 2.0 * 2.0 * half_width).abs() < 1e-5);
    }

    #[test]
    fn ordered_windows_lengthen_with_n(g in 0.05f64..0.5, n in 1usize..80, eps in 1e-3f64..0.2) {
        let t_max = PI / (2.0 * g);
        let longest = |n| {
            let spec = ordered(g, n);
            let cfg = WindowParams::new(eps, t_max).resolve(&spec).unwrap();
            longest_window(&wprc_set(&spec, &cfg).unwrap()).duration
        };
        let (a, b) = (longest(n), longest(n + 1));
        prop_assert!(b + 1e-6 >= a);
        prop_assert!(b < t_max);
    }

    #[test]
    fn halving_the_grid_keeps_window_endpoints(spec in spec_strategy(6), eps in 0.01f64..0.3) {
        let tol = 1e-7;
        let coarse = WindowParams { grid_step: None, refine_tol: Some(tol), ..WindowParams::new(eps, 40.0) }
            .resolve(&spec)
            .unwrap();
        let fine = WindowConfig { grid_step: coarse.grid_step / 2.0, ..coarse };
        let a = wprc_set(&spec, &coarse).unwrap();
        let b = wprc_set(&spec, &fine).unwrap();
        prop_assert_eq!(a.intervals().len(), b.intervals().len());
        for (x, y) in a.intervals().iter().zip(b.intervals()) {
            prop_assert!((x.0 - y.0).abs() < tol && (x.1 - y.1).abs() < tol, "{:?} vs {:?}", x, y);
        }
    }

    #[test]
    fn quality_is_a_partial_order(
        a in (0u64..100, 0.0f64..10.0),
        b in (0u64..100, 0.0f64..10.0),
        c in (0u64..100, 0.0f64..10.0),
    ) {
        prop_assert_eq!(compare_quality(a, a), Quality::Equal);
        let ab = compare_quality(a, b);
        let ba = compare_quality(b, a);
        match ab {
            Quality::ABetter => prop_assert_eq!(ba, Quality::BBetter),
            Quality::BBetter => prop_assert_eq!(ba, Quality::ABetter),
            q => prop_assert_eq!(ba, q),
        }
        if ab == Quality::ABetter && compare_quality(b, c) == Quality::ABetter {
            prop_assert_eq!(compare_quality(a, c), Quality::ABetter);
        }
    }

    #[test]
    fn accessibility_is_monotone_in_n(e0 in 0.1f64..5.0, noise in 0.0f64..50.0, extra in 0.0f64..500.0, n in 0u64..1000) {
        let budget = AccessibilityBudget::new(e0, noise, noise + extra).unwrap();
        let rank = |v| match v {
            AccessibilityVerdict::Nonfunctional => 0,
            AccessibilityVerdict::Accessible => 1,
            AccessibilityVerdict::Inaccessible => 2,
        };
        let now = rank(accessibility(n, &budget).verdict);
        let next = rank(accessibility(n + 1, &budget).verdict);
        prop_assert!(next >= now);
    }

    #[test]
    fn observer_masses_are_bounded(
        g in 0.05f64..0.3,
        n in 1usize..50,
        lo in 0.0f64..40.0,
        width in 0.5f64..20.0,
        gaussian in any::<bool>(),
    ) {
        let spec = ordered(g, n);
        let cfg = WindowParams::new(0.05, 200.0).resolve(&spec).unwrap();
        let wprc = wprc_set(&spec, &cfg).unwrap();
        let prc = prc_times(&spec, &cfg).unwrap();
        let obs = if gaussian {
            ObserverModel::gaussian(lo + width, 2.0 * width).unwrap()
        } else {
            ObserverModel::uniform(lo, lo + width).unwrap()
        };
        let opts = ReliabilityOptions { rel_tol: 1e-6, min_theta: 0.0 };
        let r = reliability(&obs, &wprc, &prc, &opts).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&r.theta_big));
        prop_assert!(r.theta_eps >= -1e-12 && r.theta_eps <= r.theta_big + 1e-9);
        prop_assert_eq!(r.p_good_prc, 0.0);
    }

    #[test]
    fn shrinking_a_reliable_window_stays_reliable(
        g in 0.05f64..0.3,
        n in 20usize..120,
        k in 0usize..3,
        a in 0.0f64..0.45,
        b in 0.55f64..1.0,
    ) {
        let spec = ordered(g, n);
        let cfg = WindowParams::new(0.01, 4.0 * PI / g).resolve(&spec).unwrap();
        let wprc = wprc_set(&spec, &cfg).unwrap();
        let prc = prc_times(&spec, &cfg).unwrap();
        let (lo, hi) = wprc.intervals()[k];
        let opts = ReliabilityOptions::default();
        let outer = ObserverModel::uniform(lo, hi).unwrap();
        prop_assert_eq!(reliability(&outer, &wprc, &prc, &opts).unwrap().verdict, ReliabilityVerdict::ReliableOverWindow);
        let inner = ObserverModel::uniform(lo + a * (hi - lo), lo + b * (hi - lo)).unwrap();
        prop_assert_eq!(reliability(&inner, &wprc, &prc, &opts).unwrap().verdict, ReliabilityVerdict::ReliableOverWindow);
    }

    #[test]
    fn perturbation_conserves_the_pair_weight(p1 in 0.0f64..1.0, frac in 0.0f64..1.0, eps in 0.0f64..0.5) {
        let p2 = (1.0 - p1) * frac;
        let (plus, minus) = perturbed_eigenvalues(p1, p2, eps);
        prop_assert!((plus + minus - p1 - p2).abs() < 1e-14);
        prop_assert!(plus >= minus);
    }

    #[test]
    fn overlapping_pointers_carry_less_information(p1 in 0.05f64..0.95, eps_frac in 0.01f64..0.9) {
        let p2 = 1.0 - p1;
        prop_assume!((p1 - p2).abs() > 1e-3);
        // Keep the perturbed pair positive: ε < √(p1 p2).
        let eps = eps_frac * (p1 * p2).sqrt();
        let state = GeneralState::from_probabilities(&[p1, p2]).unwrap();
        let r = wprc_info_deficit(&state, eps).unwrap();
        prop_assert!(r.prc_mutual_info > r.info.mutual_info);
        prop_assert!(r.exact_deficit > 0.0);
    }

    #[test]
    fn time_sets_round_trip_through_json(
        starts in prop::collection::vec(0.0f64..1.0, 0..6),
        points in prop::collection::vec(0.0f64..100.0, 0..6),
    ) {
        let mut edges: Vec<f64> = starts.iter().scan(0.0, |acc, s| { *acc += 1.0 + 10.0 * s; Some(*acc) }).collect();
        edges.retain(|&e| e < 98.0);
        let intervals: Vec<(f64, f64)> = edges.iter().map(|&e| (e, e + 0.5)).collect();
        let mut pts = points;
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.retain(|&p| !intervals.iter().any(|&(lo, hi)| lo < p && p < hi));
        let ts = TimeSet::new((0.0, 100.0), intervals, pts).unwrap();
        let text = serde_json::to_string(&ts).unwrap();
        let back: TimeSet = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, ts);
    }
}
