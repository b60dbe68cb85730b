use proptest::prelude::*;

use cornergrowth::config::{parse_config, ExperimentSpec, EXPERIMENTS};
use cornergrowth::experiments::{zeroed_boundary_bounds, BoundaryChoice, ExperimentConfig};
use cornergrowth::interface::{build_interface, check_reversal_duality, reverse_process, z_star_of};
use cornergrowth::lpp::{
    backtrack_path, brute_force_passage, check_monotone_coupling, compute_field, decompose, path_row_coordinates,
    stream_passage, CouplingVerdict, TiePolicy,
};
use cornergrowth::stats::ks_exponential;
use cornergrowth::tasep::{auto_window, init_palm_conditioned};
use cornergrowth::weights::{
    apply_boundary, couple_density, read_csv, sample_equilibrium, transpose, write_csv, BoundaryKind, Density,
    Reduction, WeightArray,
};

fn rarefied(w: &WeightArray, rho: f64, south: f64, west: f64) -> WeightArray {
    let kind = BoundaryKind::Rarefaction {
        density: Density::new(rho).unwrap(),
        reduction: Reduction::uniform(south, west, w.m(), w.n()),
    };
    apply_boundary(w, &kind).unwrap()
}

fn rho() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dynamic_program_matches_enumeration(
        rho in rho(), m in 1usize..=6, n in 1usize..=6, seed in any::<u64>(), kind in 0u8..3, c in 0.0f64..=1.0,
    ) {
        let w = sample_equilibrium(rho, m, n, seed).unwrap();
        let w = match kind {
            0 => w,
            1 => apply_boundary(&w, &BoundaryKind::ZeroBoth).unwrap(),
            _ => rarefied(&w, rho, c, 1.0 - c),
        };
        let g = compute_field(&w).g_mn();
        prop_assert!((brute_force_passage(&w).unwrap() - g).abs() <= 1e-12 * g.max(1.0));
    }

    #[test]
    fn recurrence_and_increments(rho in rho(), m in 1usize..=12, n in 1usize..=12, seed in any::<u64>()) {
        let f = compute_field(&sample_equilibrium(rho, m, n, seed).unwrap());
        for j in 1..=n {
            for i in 1..=m {
                let w = f.weights().get(i, j);
                prop_assert_eq!(f.g(i, j), f.g(i - 1, j).max(f.g(i, j - 1)) + w);
                prop_assert!(f.inc_i(i, j) >= 0.0 && f.inc_j(i, j) >= 0.0);
                prop_assert!(f.x(i - 1, j - 1) >= 0.0);
            }
        }
    }

    #[test]
    fn streaming_agrees_with_backtracking(rho in rho(), m in 1usize..=15, n in 1usize..=15, seed in any::<u64>()) {
        let w = sample_equilibrium(rho, m, n, seed).unwrap();
        let f = compute_field(&w);
        for policy in [TiePolicy::Rightmost, TiePolicy::Leftmost] {
            let s = stream_passage(m, n, policy, |i, j| w.get(i, j));
            prop_assert_eq!(s.g_mn, f.g_mn());
            let p = backtrack_path(&f, policy);
            prop_assert_eq!(s.exit, p.exit);
            prop_assert_eq!(decompose(&f, policy).exit, p.exit);
        }
    }

    #[test]
    fn decomposition_sums_to_passage_time(rho in rho(), m in 1usize..=10, n in 1usize..=10, seed in any::<u64>()) {
        let f = compute_field(&sample_equilibrium(rho, m, n, seed).unwrap());
        let d = decompose(&f, TiePolicy::Rightmost);
        prop_assert!(d.exit != 0);
        prop_assert!((d.u + d.a - f.g_mn()).abs() <= 1e-9 * f.g_mn());
    }

    #[test]
    fn transposition_flips_exit_and_interface(rho in rho(), m in 1usize..=10, n in 1usize..=10, seed in any::<u64>()) {
        let w = sample_equilibrium(rho, m, n, seed).unwrap();
        let wt = transpose(&w);
        prop_assert_eq!(&transpose(&wt), &w);
        prop_assert_eq!(wt.boundary().rho(), Some(1.0 - rho));
        let (f, ft) = (compute_field(&w), compute_field(&wt));
        prop_assert_eq!(f.g_mn(), ft.g_mn());
        prop_assert_eq!(backtrack_path(&ft, TiePolicy::Rightmost).exit, -backtrack_path(&f, TiePolicy::Rightmost).exit);
        prop_assert_eq!(z_star_of(&ft), -z_star_of(&f));
    }

    #[test]
    fn reversal_identity_and_duality(rho in rho(), m in 1usize..=10, n in 1usize..=10, seed in any::<u64>()) {
        let f = compute_field(&sample_equilibrium(rho, m, n, seed).unwrap());
        let rev = reverse_process(&f);
        prop_assert!(rev.identity_residual(&f) <= 1e-9 * f.g_mn());
        let d = check_reversal_duality(&f);
        if !d.ambiguous {
            prop_assert!(d.holds, "first mismatch {:?}", d.first_mismatch);
            prop_assert_eq!(d.reversed_z_star, d.exit);
        }
    }

    #[test]
    fn interface_is_an_up_right_path(rho in rho(), m in 1usize..=12, n in 1usize..=12, seed in any::<u64>()) {
        let phi = build_interface(&compute_field(&sample_equilibrium(rho, m, n, seed).unwrap()));
        prop_assert_eq!(phi.sites[0], (0, 0));
        for s in phi.sites.windows(2) {
            prop_assert_eq!(s[1].0 + s[1].1, s[0].0 + s[0].1 + 1);
        }
        let (i, j) = phi.end_site();
        prop_assert!(i == m || j == n);
        let z = phi.z_star();
        prop_assert!(z != 0 && z >= -(n as i64) && z <= m as i64);
    }

    #[test]
    fn larger_density_orders_increments(rho in 0.05f64..0.6, gap in 0.01f64..0.3, m in 1usize..=10, n in 1usize..=10, seed in any::<u64>()) {
        let w = sample_equilibrium(rho, m, n, seed).unwrap();
        let wt = couple_density(&w, rho + gap).unwrap();
        prop_assert_eq!(check_monotone_coupling(&w, &wt).unwrap(), CouplingVerdict::Holds);
    }

    #[test]
    fn rarefaction_is_dominated(
        rho in rho(), m in 1usize..=10, n in 1usize..=10, seed in any::<u64>(), a in 0.0f64..=1.0, b in 0.0f64..=1.0,
    ) {
        let w = sample_equilibrium(rho, m, n, seed).unwrap();
        let hat = rarefied(&w, rho, a, b);
        let zero = apply_boundary(&w, &BoundaryKind::ZeroBoth).unwrap();
        for (x, y) in hat.as_slice().iter().zip(w.as_slice()) {
            prop_assert!(x <= y);
        }
        let (f, fh, f0) = (compute_field(&w), compute_field(&hat), compute_field(&zero));
        for j in 0..=n {
            for i in 0..=m {
                prop_assert!(f0.g(i, j) <= fh.g(i, j) && fh.g(i, j) <= f.g(i, j));
            }
        }
    }

    #[test]
    fn rightmost_path_sits_right_of_leftmost(rho in rho(), m in 1usize..=10, n in 1usize..=10, seed in any::<u64>(), l in 0usize..=10) {
        let w = apply_boundary(&sample_equilibrium(rho, m, n, seed).unwrap(), &BoundaryKind::ZeroBoth).unwrap();
        let f = compute_field(&w);
        let l = l.min(n);
        let right = path_row_coordinates(&backtrack_path(&f, TiePolicy::Rightmost), l).unwrap();
        let left = path_row_coordinates(&backtrack_path(&f, TiePolicy::Leftmost), l).unwrap();
        prop_assert!(left.1 <= right.0);
        prop_assert!(right.1 <= right.0 && left.1 <= left.0);
    }

    #[test]
    fn zeroed_boundary_bounds_hold(rho in rho(), m in 1usize..=8, n in 1usize..=8, seed in any::<u64>()) {
        let cfg = ExperimentConfig::new("zeroed-bounds", rho, vec![], 5, seed).with_dims(m, n);
        let rep = zeroed_boundary_bounds(&cfg).unwrap();
        prop_assert!(rep.passed(), "{}", rep.to_text());
    }

    #[test]
    fn sampling_is_reproducible(rho in rho(), m in 1usize..=8, n in 1usize..=8, seed in any::<u64>()) {
        let w = sample_equilibrium(rho, m, n, seed).unwrap();
        prop_assert_eq!(&sample_equilibrium(rho, m, n, seed).unwrap(), &w);
        let mut buf = Vec::new();
        write_csv(&w, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.as_slice(), w.as_slice());
    }

    #[test]
    fn config_round_trips(name_idx in 0usize..EXPERIMENTS.len(), rho in rho(), samples in 1usize..100_000, seed in any::<u64>(), t in 1.0f64..5000.0) {
        let cfg = ExperimentConfig::new(EXPERIMENTS[name_idx], rho, vec![t, 2.0 * t], samples, seed)
            .with_boundary(BoundaryChoice::ZeroBoth);
        let spec = ExperimentSpec::new(cfg);
        prop_assert_eq!(parse_config(&spec.to_ini()).unwrap(), spec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exclusion_process_keeps_its_invariants(rho in 0.1f64..0.9, seed in any::<u64>(), horizon in 1.0f64..20.0) {
        let window = auto_window(rho, 3, horizon, seed).unwrap();
        let traj = init_palm_conditioned(rho, window, 3, seed).unwrap().simulate(horizon).unwrap();
        prop_assert_eq!(traj.identity_violations, 0);
        prop_assert!(traj.labels_ordered());
        prop_assert_eq!(traj.exchange_time(0, 0), Some(0.0));
    }
}

#[test]
fn equilibrium_marginals_are_exponential() {
    let rho = 0.3;
    let (mut south, mut west, mut interior) = (Vec::new(), Vec::new(), Vec::new());
    for seed in 0..400 {
        let w = sample_equilibrium(rho, 10, 10, seed).unwrap();
        south.extend(w.south());
        west.extend(w.west());
        interior.extend(w.interior());
    }
    for (xs, rate) in [(&south, 1.0 - rho), (&west, rho), (&interior, 1.0)] {
        let ks = ks_exponential(xs, rate).unwrap();
        assert!(ks.p_value > 0.001, "rate {rate}: p = {}", ks.p_value);
    }
}
