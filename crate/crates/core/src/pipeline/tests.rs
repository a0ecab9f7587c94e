use super::*;

#[test]
fn config_file_round_trip() {
    let text = "# sweep\n t_list = 8, 10 ,12\nalpha=0.4 # comment\nzeros = locate\nformat=json\n\n";
    let c = RunConfig::from_file_str(text).unwrap();
    assert_eq!(c.t_list, vec![8.0, 10.0, 12.0]);
    assert_eq!(c.alpha, 0.4);
    assert_eq!(c.zeros, ZeroSpec::Locate);
    assert_eq!(c.format, OutputFormat::Json);
}

#[test]
fn invalid_alpha_names_the_field() {
    let err = RunConfig::from_file_str("alpha = 1.5").unwrap_err();
    match err {
        Error::Config { field, .. } => assert_eq!(field, "alpha"),
        e => panic!("{e}"),
    }
    let mut c = RunConfig::default();
    c.set("alpha", "0").unwrap();
    assert!(format!("{}", c.validate().unwrap_err()).contains("alpha"));
}

#[test]
fn config_rejects_bad_values() {
    for (k, v) in [("t_list", "10,8"), ("kappa", "-1"), ("xi0_ladder", ""), ("t_list", "30"), ("kappa", "200")] {
        let mut c = RunConfig::default();
        c.set(k, v).unwrap();
        assert!(c.validate().is_err(), "{k}={v}");
    }
    let mut c = RunConfig::default();
    assert!(c.set("unknown", "1").is_err());
    assert!(c.set("zeros", "file:").is_err());
    assert!(RunConfig::from_file_str("alpha 0.5").is_err());
}

#[test]
fn fit_needs_three_rows() {
    assert!(fit_rows(&[]).is_none());
    let pts = [(8.0f64, 2.0), (10.0, 3.0), (12.0, 5.0)];
    let g = growth_fit(&pts);
    let x: Vec<f64> = pts.iter().map(|&(t, _)| t * t.ln().powi(2)).collect();
    let c = (x[0] * 2.0 + x[1] * 3.0 + x[2] * 5.0) / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    assert!((g.c - c).abs() < 1e-15);
    assert!(g.band >= 1.0);
}

#[test]
fn zero_spec_parsing() {
    assert_eq!("builtin".parse::<ZeroSpec>().unwrap(), ZeroSpec::Builtin);
    assert_eq!(
        "file:/tmp/z.txt".parse::<ZeroSpec>().unwrap(),
        ZeroSpec::File(std::path::PathBuf::from("/tmp/z.txt"))
    );
    assert!("remote".parse::<ZeroSpec>().is_err());
}

#[test]
fn small_omega_gives_empty_zero_measure() {
    let mut cfg = RunConfig::default();
    cfg.t_list = vec![8.0];
    cfg.kappa = 1.5;
    let out = run_pipeline(&cfg, &builtin_table(), 8.0).unwrap();
    assert_eq!(out.row.pair_freq, 0.0);
    assert!(out.row.omega < 14.13);
}
