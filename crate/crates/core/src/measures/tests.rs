use super::*;
use crate::kernels::make_mollifier;
use proptest::prelude::*;

/// Prime powers <= n by trial division, as (value, k).
fn trial_division_powers(n: u64) -> Vec<(u64, u32)> {
    let is_prime = |p: u64| p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0);
    let mut out = Vec::new();
    for q in 2..=n {
        // smallest prime factor, then check q is a pure power of it
        let p = (2..=q).find(|d| q % d == 0).unwrap();
        let mut r = q;
        let mut k = 0;
        while r % p == 0 {
            r /= p;
            k += 1;
        }
        if r == 1 && is_prime(p) {
            out.push((q, k));
        }
    }
    out
}

#[test]
fn atoms_up_to_ten() {
    let m = prime_power_atoms(10f64.ln()).unwrap();
    let expect_n = [2u32, 3, 4, 5, 7, 8, 9];
    let expect_w = [1.0, 1.0, 0.5, 1.0, 1.0, 1.0 / 3.0, 0.5];
    assert_eq!(m.len(), 7);
    for i in 0..7 {
        assert_eq!(m.positions()[i], (expect_n[i] as f64).ln());
        assert_eq!(m.weights()[i], expect_w[i]);
    }
    assert!((m.total_mass() - expect_w.iter().sum::<f64>()).abs() < 1e-15);
}

#[test]
fn atoms_up_to_hundred_match_oracle() {
    let m = prime_power_atoms(100f64.ln()).unwrap();
    let oracle = trial_division_powers(100);
    assert_eq!(m.len(), oracle.len());
    assert_eq!(oracle.len(), 35);
    let j: f64 = oracle.iter().map(|&(_, k)| 1.0 / k as f64).sum();
    assert!((m.total_mass() - j).abs() < 1e-12);
}

#[test]
fn tiny_t_gives_empty_measure() {
    let m = prime_power_atoms(0.5f64).unwrap();
    assert!(m.is_empty());
    assert_eq!(m.total_mass(), 0.0);
}

#[test]
fn cap_is_enforced() {
    assert!(matches!(prime_power_atoms(18.5f64), Err(Error::ResourceLimit(_))));
    assert!(prime_power_atoms_capped(5.0f64, 4.0).is_err());
    assert!(prime_power_atoms(-1.0f64).is_err());
}

#[test]
fn exp_floor_is_exact_at_integers() {
    for n in [2u64, 3, 10, 99, 100, 101, 65_536, 99_991] {
        assert_eq!(exp_floor((n as f64).ln()), n);
    }
}

#[test]
fn single_atom_smoothing() {
    let th = make_mollifier(0.1f64).unwrap();
    let m = AtomicMeasure::new(vec![1.0], vec![2.0]).unwrap();
    let g = GridSpec::new(0.8, 1.2, 257).unwrap();
    let d = smooth_measure(&m, &th, &g).unwrap();
    assert!((d.integral() - 2.0).abs() < 1e-9 * 2.0);
    assert_eq!(d.values[128], 2.0 * th.time_eval(0.0));
}

#[test]
fn disjoint_atoms_do_not_interact() {
    let th = make_mollifier(0.1f64).unwrap();
    let m = AtomicMeasure::new(vec![0.0, 0.5], vec![1.0, 3.0]).unwrap();
    let g = GridSpec::new(-0.2, 0.7, 1801).unwrap();
    let d = smooth_measure(&m, &th, &g).unwrap();
    // between the two supports the density vanishes identically
    for (i, x) in g.nodes().enumerate() {
        if x > 0.1 && x < 0.4 {
            assert_eq!(d.values[i], 0.0);
        }
    }
    assert!((d.integral() - 4.0).abs() < 1e-9 * 4.0);
}

#[test]
fn smoothing_preconditions() {
    let th = make_mollifier(0.1f64).unwrap();
    let m = AtomicMeasure::new(vec![1.0], vec![1.0]).unwrap();
    let coarse = GridSpec::new(0.8, 1.2, 10).unwrap();
    assert!(matches!(smooth_measure(&m, &th, &coarse), Err(Error::GridResolution(_))));
    let short = GridSpec::new(0.95, 1.2, 400).unwrap();
    assert!(matches!(smooth_measure(&m, &th, &short), Err(Error::GridResolution(_))));
}

#[test]
fn measure_validation() {
    assert!(AtomicMeasure::new(vec![1.0f64, 1.0], vec![1.0, 1.0]).is_err());
    assert!(AtomicMeasure::new(vec![1.0f64], vec![0.0]).is_err());
    assert!(AtomicMeasure::new(vec![1.0f64], vec![]).is_err());
}

#[test]
fn main_density_values() {
    assert!((main_m(1.0f64) - std::f64::consts::E).abs() < 1e-15);
    assert_eq!(main_n(2.0 * std::f64::consts::PI), 0.0);
    assert_eq!(main_n(1.0f64), 0.0);
    assert!((main_n(100.0f64) - 0.4405).abs() < 1e-4);
    assert_eq!(main_n(-100.0f64), main_n(100.0));
}

#[test]
fn main_integrals_match_quadrature() {
    let md = main_densities(8.0f64, 80.0);
    let q = crate::quadrature::Adaptive::<f64>::default();
    let mi = q.integrate(main_m, 2f64.ln(), 8.0).unwrap().value;
    assert!((md.m_integral().unwrap() - mi).abs() < 1e-10 * mi);
    let tp = 2.0 * std::f64::consts::PI;
    let ni = 2.0 * q.integrate(main_n, tp, 80.0).unwrap().value;
    assert!((md.n_integral() - ni).abs() < 1e-12 * ni);
}

#[test]
fn fluctuation_examples() {
    let g = GridSpec::new(1.0f64, 3.0, 101).unwrap();
    let m = GriddedDensity::sample(g, main_m);
    let a = fluctuations(&m, &m).unwrap();
    assert!(a.values.iter().all(|&v| v == 0.0));
    let empty = GriddedDensity::sample(g, |_| 0.0);
    let a = fluctuations(&empty, &m).unwrap();
    for (v, w) in a.values.iter().zip(&m.values) {
        assert_eq!(*v, -*w);
    }
    let other = GriddedDensity::sample(GridSpec::new(1.0, 3.0, 102).unwrap(), main_m);
    assert!(fluctuations(&m, &other).is_err());
}

#[test]
fn fluctuation_report_examples() {
    let ga = GridSpec::new(0.0f64, 10.0, 1001).unwrap();
    let gb = GridSpec::new(-50.0f64, 50.0, 1001).unwrap();
    let zero = GriddedDensity::sample(ga, |_| 0.0);
    let one = GriddedDensity::sample(gb, |_| 1.0);
    let r = fluctuation_report(&zero, &one, 10.0, 50.0, 0.5);
    assert_eq!(r.a_l1, 0.0);
    assert_eq!(r.lemma1_ratio_a, 0.0);
    assert!((r.b_l1 - 100.0).abs() < 1e-12);
}

#[test]
fn mass_preserved_for_prime_measure() {
    let t = 8.0f64;
    let delta = t.powf(-0.5);
    let th = make_mollifier(delta).unwrap();
    let atoms = prime_power_atoms(t).unwrap();
    let g = GridSpec::with_max_step(2f64.ln() - delta, t + delta, delta / 64.0).unwrap();
    let d = smooth_measure(&atoms, &th, &g).unwrap();
    let rel = (d.integral() - atoms.total_mass()).abs() / atoms.total_mass();
    assert!(rel < 1e-9, "{rel}");
}

#[test]
fn a_agrees_two_ways() {
    let t = 8.0f64;
    let delta = t.powf(-0.5);
    let th = make_mollifier(delta).unwrap();
    let atoms = prime_power_atoms(t).unwrap();
    let g = GridSpec::with_max_step(2f64.ln() - delta, t + delta, delta / 64.0).unwrap();
    let r = a_two_routes(&atoms, &th, &g, t).unwrap();
    assert!(r.relative_l1 <= 1e-6, "{r:?}");
    assert!(r.literal_discrepancy_l1 > 0.0);
}

#[test]
fn sieve_matches_trial_division_prefixes() {
    let oracle = trial_division_powers(5000);
    for n in (2..=5000u64).step_by(37) {
        let m = prime_power_atoms((n as f64).ln()).unwrap();
        let want: Vec<&(u64, u32)> = oracle.iter().take_while(|e| e.0 <= n).collect();
        assert_eq!(m.len(), want.len(), "N={n}");
        for (i, e) in want.iter().enumerate() {
            assert_eq!(m.positions()[i], (e.0 as f64).ln());
            assert_eq!(m.weights()[i], 1.0 / e.1 as f64);
        }
    }
}

proptest! {
    #[test]
    fn total_mass_is_monotone(t1 in 0.1f64..9.0, dt in 0.0f64..2.0) {
        let a = prime_power_atoms(t1).unwrap().total_mass();
        let b = prime_power_atoms(t1 + dt).unwrap().total_mass();
        prop_assert!(b >= a);
    }
}
