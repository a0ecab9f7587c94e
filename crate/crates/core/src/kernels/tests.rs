use super::*;
use crate::grid::GridSpec;
use crate::quadrature::Adaptive;
use proptest::prelude::*;

fn integral(k: &Kernel<f64>, lo: f64, hi: f64, panels: usize) -> f64 {
    Adaptive::new(1e-14, 1e-13)
        .with_initial_panels(panels)
        .integrate(|t| k.time_eval(t), lo, hi)
        .unwrap()
        .value
}

#[test]
fn bump_mass_constant_matches_quadrature() {
    let v = crate::quadrature::tanh_sinh(|u: f64| (-1.0 / (1.0 - u * u)).exp(), -1.0, 1.0, 1e-15).unwrap();
    assert!((v - BUMP_MASS).abs() < 1e-15, "{v}");
}

#[test]
fn mollifier_basics() {
    let th = make_mollifier::<f64>(0.1).unwrap();
    assert_eq!(th.time_eval(0.2), 0.0);
    assert!((integral(&th, -0.1, 0.1, 8) - 1.0).abs() < 1e-10);
    assert!((th.freq_eval(0.0) - 1.0).abs() < 1e-13);
    assert!(make_mollifier::<f64>(0.0).is_err());
    assert!(make_mollifier::<f64>(-1.0).is_err());
}

#[test]
fn mollifier_derivative_scaling() {
    let norms: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&d| mollifier_derivative_l1(&make_mollifier::<f64>(d).unwrap()).unwrap() * d)
        .collect();
    for n in &norms {
        assert!((n / norms[0] - 1.0).abs() < 1e-6);
    }
    let r = mollifier_derivative_l1(&make_mollifier::<f64>(0.1).unwrap()).unwrap()
        / mollifier_derivative_l1(&make_mollifier::<f64>(0.05).unwrap()).unwrap();
    assert!((r - 0.5).abs() < 1e-6, "{r}");
    // unimodal profile: ‖θ'‖₁ = 2 θ(0)
    let th = make_mollifier::<f64>(0.1).unwrap();
    let l1 = mollifier_derivative_l1(&th).unwrap();
    assert!((l1 - 2.0 * th.time_eval(0.0)).abs() < 1e-9 * l1);
}

#[test]
fn fejer_basics() {
    let f = make_fejer::<f64>(2.0).unwrap();
    assert_eq!(f.freq_eval(0.0), 1.0);
    assert_eq!(f.freq_eval(2.0), 0.0);
    assert_eq!(f.freq_eval(4.0), 0.0);
    let peak = inverse_transform(&f, 0.0, None).unwrap();
    assert!((peak - 1.0 / std::f64::consts::PI).abs() < 1e-12);
    assert!((f.time_eval(0.0) - peak).abs() < 1e-9);
    // unit mass: integrate the time side with its 1/γ² tail added analytically
    let r = 4000.0;
    let body = integral(&f, -r, r, 4000);
    let tail = 2.0 * 2.0 / (std::f64::consts::PI * 2.0 * 2.0 * r);
    assert!((body + tail - 1.0).abs() < 1e-8, "{}", body + tail);
    assert!(make_fejer::<f64>(0.0).is_err());
}

#[test]
fn eta_examples() {
    let tri = make_eta::<f64>(EtaFamily::TrianglePd, 10.0, 10.0).unwrap();
    assert_eq!(tri.time_eval(0.0), 1.0);
    assert!((tri.time_eval(10.0) - 0.9).abs() < 1e-15);
    assert!(tri.freq_nonneg());

    let tk = make_eta::<f64>(EtaFamily::Tukey, 10.0, 2.0).unwrap();
    for i in 0..=1000 {
        assert_eq!(tk.time_eval(-10.0 + 0.02 * i as f64), 1.0);
    }
    assert_eq!(tk.time_eval(12.0), 0.0);
    assert!(!tk.freq_nonneg());

    let sel = make_eta::<f64>(EtaFamily::Selberg, 10.0, 1.0).unwrap();
    let worst = (0..=10_000)
        .map(|i| sel.time_eval(-10.0 + 20.0 * i as f64 / 10_000.0) - 1.0)
        .fold(f64::INFINITY, f64::min);
    assert!(worst >= -1e-9, "{worst}");
    assert_eq!(sel.freq_support(), Some((-2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI)));

    assert!(make_eta::<f64>(EtaFamily::TrianglePd, 10.0, 0.0).is_err());
    assert!(make_eta::<f64>(EtaFamily::Tukey, 10.0, -1.0).is_err());
    assert!("gaussian".parse::<EtaFamily>().is_err());
    assert_eq!("triangle".parse::<EtaFamily>().unwrap(), EtaFamily::TrianglePd);
}

#[test]
fn selberg_transform_at_origin() {
    let (t, d) = (10.0, 1.0);
    let sel = make_eta::<f64>(EtaFamily::Selberg, t, d).unwrap();
    assert!((sel.freq_eval(0.0) - (2.0 * t + 1.0 / d)).abs() < 1e-12);
    // continuity of the closed form through ξ = 0
    assert!((sel.freq_eval(1e-7) - sel.freq_eval(0.0)).abs() < 1e-5);
}

#[test]
fn selberg_transform_pair_and_band_limit() {
    let sel = make_eta::<f64>(EtaFamily::Selberg, 5.0, 1.0).unwrap();
    let grid = GridSpec::new(0.0, 20.0, 81).unwrap();
    let r = numeric_ft_check(&sel, &grid).unwrap();
    assert!(r < 1e-8, "{r}");
    // forward transform of the time side beyond the band: η ~ x^{-2}, so a
    // long radius keeps the truncation far below the threshold
    let scale = sel.freq_eval(0.0);
    let xi = 4.0 * std::f64::consts::PI;
    let v = forward_transform(&sel, xi, Some(2000.0)).unwrap();
    assert!(v.abs() <= 1e-6 * scale, "{v}");
}

#[test]
fn probe_examples() {
    let f = make_probe::<f64>(10.0, 1.0).unwrap();
    let beta = f.param("beta").unwrap();
    let a = f.param("amplitude").unwrap();
    assert!((a * beta - 0.1).abs() < 1e-16);
    assert!((f.time_eval(0.0) - 0.1 / (2.0 * std::f64::consts::PI)).abs() < 1e-9);
    // ‖f̂‖₁ by quadrature
    let q = Adaptive::new(1e-16, 1e-14).integrate(|x| f.freq_eval(x), -beta, beta).unwrap().value;
    assert!((q - 0.1).abs() < 1e-14);
    for i in 0..1000 {
        assert!(f.freq_eval(-0.02 + 4e-5 * i as f64) >= 0.0);
    }
}

#[test]
fn bump_examples() {
    let b = make_bump::<f64>(0.3).unwrap();
    assert_eq!(b.freq_eval(0.3), 0.0);
    let area = Adaptive::new(1e-16, 1e-14).integrate(|x| b.freq_eval(x), -0.3, 0.3).unwrap().value;
    assert!((area - 1.0).abs() < 1e-14);
    assert!((b.time_eval(0.0) - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    assert!(make_bump::<f64>(0.0).is_err());
}

#[test]
fn transform_pairs_within_tolerance() {
    let cases: Vec<(Kernel<f64>, GridSpec<f64>)> = vec![
        (make_fejer::<f64>(2.0).unwrap(), GridSpec::new(0.0, 30.0, 121).unwrap()),
        (make_mollifier::<f64>(0.1).unwrap(), GridSpec::new(0.0, 300.0, 301).unwrap()),
        (make_eta::<f64>(EtaFamily::TrianglePd, 5.0, 10.0).unwrap(), GridSpec::new(0.0, 3.0, 301).unwrap()),
        (make_eta::<f64>(EtaFamily::Tukey, 5.0, 2.0).unwrap(), GridSpec::new(0.0, 6.0, 301).unwrap()),
        (make_probe::<f64>(10.0, 1.0).unwrap(), GridSpec::new(0.0, 2000.0, 201).unwrap()),
        (make_bump::<f64>(0.2).unwrap(), GridSpec::new(0.0, 200.0, 201).unwrap()),
    ];
    for (k, g) in cases {
        let r = numeric_ft_check(&k, &g).unwrap();
        assert!(r <= 1e-8, "{}: {r}", k.family());
    }
}

#[test]
fn coarse_sample_grid_is_rejected() {
    let k = make_eta::<f64>(EtaFamily::TrianglePd, 5.0, 10.0).unwrap();
    let g = GridSpec::new(0.0, 30.0, 4).unwrap();
    assert!(matches!(numeric_ft_check(&k, &g), Err(Error::GridResolution(_))));
}

#[test]
fn scaled_kernel_is_linear() {
    let f = make_probe::<f64>(8.0, 1.0).unwrap();
    let g = f.scaled(2.0);
    for x in [0.0, 0.3, 7.0] {
        assert_eq!(g.time_eval(x), 2.0 * f.time_eval(x));
        assert_eq!(g.freq_eval(x * 1e-3), 2.0 * f.freq_eval(x * 1e-3));
    }
}

fn all_kernels() -> Vec<Kernel<f64>> {
    vec![
        make_mollifier::<f64>(0.1).unwrap(),
        make_fejer::<f64>(3.0).unwrap(),
        make_eta::<f64>(EtaFamily::TrianglePd, 10.0, 10.0).unwrap(),
        make_eta::<f64>(EtaFamily::Tukey, 10.0, 2.0).unwrap(),
        make_eta::<f64>(EtaFamily::Selberg, 10.0, 1.0).unwrap(),
        make_probe::<f64>(10.0, 1.0).unwrap(),
        make_bump::<f64>(0.5).unwrap(),
    ]
}

proptest! {
    #[test]
    fn kernels_are_even(x in -200.0f64..200.0) {
        for k in all_kernels() {
            prop_assert_eq!(k.time_eval(x), k.time_eval(-x));
            prop_assert_eq!(k.freq_eval(x), k.freq_eval(-x));
        }
    }

    #[test]
    fn kernels_vanish_outside_supports(x in 0.0f64..1.0e3) {
        for k in all_kernels() {
            if let Some((_, s)) = k.time_support() {
                prop_assert_eq!(k.time_eval(s + x + 1e-12), 0.0);
            }
            if let Some((_, s)) = k.freq_support() {
                prop_assert_eq!(k.freq_eval(s + x + 1e-12), 0.0);
            }
        }
    }

    #[test]
    fn nonneg_flag_is_honest(x in -50.0f64..50.0) {
        for k in all_kernels() {
            if k.freq_nonneg() {
                prop_assert!(k.freq_eval(x) >= 0.0);
            }
        }
    }
}
