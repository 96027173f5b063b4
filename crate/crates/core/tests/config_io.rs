use rcjhand::config::{default_config, load_config, parse_config, save_config, DEFAULT_CONFIG};
use rcjhand::io::{read_trajectory_csv, sweep_csv, trajectory_csv, workspace_csv, Provenance};
use rcjhand::radius::{minimizers, sweep};
use rcjhand::trajectory::{generate_trajectory, interpolators};
use rcjhand::workspace::{sample_workspace, SamplerSpec};
use rcjhand::{Error, FingerName};

#[test]
fn save_then_load_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hand.toml");
    let cfg = default_config();
    save_config(&cfg, &path).unwrap();
    let back = load_config(&path).unwrap();
    assert_eq!(back, cfg);

    let mut edited = cfg.clone();
    edited.hand.fingers[1].joints[1].radius = 4.75;
    edited.actuator.finger_coupling.ratio = 1.0;
    edited.thumb_length = Some(101.5);
    edited.hand.thumb_length = 101.5;
    save_config(&edited, &path).unwrap();
    let back = load_config(&path).unwrap();
    assert_eq!(back, edited);
    assert_ne!(back.digest().unwrap(), cfg.digest().unwrap());
}

#[test]
fn missing_file_is_io_error() {
    let e = load_config(std::path::Path::new("/nonexistent/hand.toml")).unwrap_err();
    assert!(matches!(e, Error::Io(_)));
}

#[test]
fn validation_names_the_invariant() {
    let text = DEFAULT_CONFIG.replacen("r = 4.9", "r = -1.0", 1);
    let e = parse_config(&text).unwrap_err().to_string();
    assert!(e.contains("r > 0"), "{e}");
    let text = DEFAULT_CONFIG.replacen("r = 4.9", "r = 13.0", 1);
    let e = parse_config(&text).unwrap_err().to_string();
    assert!(e.contains("r < kappa"), "{e}");
}

#[test]
fn artifacts_are_stable() {
    let cfg = default_config();
    let prov = Provenance::of(&cfg).unwrap();
    let gs = minimizers().create("golden-section").unwrap();
    let s1 = sweep_csv(
        &prov,
        &sweep(&[8.0, 12.7], &[40.0, 50.0], 0.25, gs.as_ref()).unwrap(),
    )
    .unwrap();
    let s2 = sweep_csv(
        &prov,
        &sweep(&[8.0, 12.7], &[40.0, 50.0], 0.25, gs.as_ref()).unwrap(),
    )
    .unwrap();
    assert_eq!(s1, s2);
    let mut lines = s1.lines();
    assert!(lines.next().unwrap().starts_with("# rcjhand "));
    assert_eq!(
        lines.next().unwrap(),
        "kappa_mm,beta_deg,r_opt_mm,residual_mm"
    );
    assert_eq!(lines.count(), 4);

    let spec = SamplerSpec {
        steps: 6,
        ..SamplerSpec::default()
    };
    let g = sample_workspace(&cfg.hand, FingerName::Little, &spec).unwrap();
    let w = workspace_csv(&prov, &g).unwrap();
    assert_eq!(
        w,
        workspace_csv(
            &prov,
            &sample_workspace(&cfg.hand, FingerName::Little, &spec).unwrap()
        )
        .unwrap()
    );
    assert_eq!(w.lines().count(), g.count() + 2);
    assert_eq!(w.lines().nth(1), Some("x_mm,y_mm,z_mm"));
}

#[test]
fn trajectory_csv_round_trip() {
    let cfg = default_config();
    let poses = [
        cfg.presets.get("open").unwrap(),
        cfg.presets.get("pinch").unwrap(),
    ];
    let lin = interpolators().create("linear").unwrap();
    let t = generate_trajectory(&cfg.hand, &poses, &[0.3], 50.0, lin.as_ref()).unwrap();
    let text = trajectory_csv(&Provenance::of(&cfg).unwrap(), &t.path).unwrap();
    let back = read_trajectory_csv(&text).unwrap();
    assert_eq!(back.times, t.path.times);
    for (a, b) in back.tips.iter().zip(&t.path.tips) {
        for f in 0..5 {
            assert!((a[f] - b[f]).norm() < 1e-5);
        }
    }
}
