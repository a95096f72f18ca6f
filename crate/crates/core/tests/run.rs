use std::fs;

use volkov_core::run::{
    design_row, format_number, lifetime_product, run_design, run_figure3, run_lifetime, write_csv, Overrides,
};
use volkov_core::scenario::{parse, preset, validate};

#[test]
fn numbers_keep_nine_significant_digits() {
    assert_eq!(format_number(0.0), "0");
    assert_eq!(format_number(-0.0), "0");
    assert_eq!(format_number(1.0 / 3.0), "3.33333333e-1");
    assert_eq!(format_number(-19.545454545), "-1.95454545e1");
}

#[test]
fn csv_carries_hash_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_csv(dir.path(), "t.csv", "abc", &["a", "b"], &[vec![1.0, 0.0], vec![-2.5, 1e-9]]).unwrap();
    let text = fs::read_to_string(p).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# scenario_hash=abc version="));
    assert_eq!(lines[1], "a,b");
    assert_eq!(lines[2], "1.00000000e0,0");
    assert_eq!(lines[3], "-2.50000000e0,1.00000000e-9");
    assert!(text.ends_with('\n'));
}

#[test]
fn figure_two_design_table() {
    let expect = [("fig2a", -0.3, 0.019, 0.0), ("fig2b", 0.0, 0.2, 0.2), ("fig2c", 19.5, -4.1, -4.1)];
    for (name, va, vf, design) in expect {
        let s = preset(name).unwrap();
        let row = design_row(&s, design).unwrap();
        assert_eq!(row.v_a, va);
        assert!((row.v_f - vf).abs() < 5e-3, "{name}: {}", row.v_f);
        assert!((row.free_slope - va).abs() < 1e-6 * va.abs().max(1.0));
    }
    let a = design_row(&preset("fig2a").unwrap(), 0.0).unwrap();
    assert!((a.v_a_design + 1.0 / 3.0).abs() < 1e-12);
    let c = design_row(&preset("fig2c").unwrap(), -4.1).unwrap();
    assert!((c.v_a_design - 19.545).abs() < 1e-3);
}

#[test]
fn design_output_is_hashed_and_deterministic() {
    let s = preset("fig2b").unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_design(&s, a.path()).unwrap();
    run_design(&s, b.path()).unwrap();
    for f in &ra.files {
        let name = f.file_name().unwrap();
        let x = fs::read(f).unwrap();
        assert_eq!(x, fs::read(b.path().join(name)).unwrap());
        let text = String::from_utf8(x).unwrap();
        assert!(text.contains(&s.hash), "{name:?}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("fig2b_design.json")).unwrap()).unwrap();
    assert_eq!(json["scenario_hash"], s.hash.as_str());
    assert!(json["derived"]["v_1d"].as_f64().is_some());
}

#[test]
fn lifetime_product_reports_missing_exits() {
    let text = r#"
name = "comoving"
[correlation]
v_a = 0.0
[momentum]
p_minus = 3.0
[spectrum]
envelope_length = 1e4
[transverse]
w = 170.0
[lifetime]
search = 1e3
"#;
    let s = validate(parse(text).unwrap()).unwrap();
    let p = lifetime_product(&s).unwrap();
    assert_eq!(p.status, "no-intersection");
    assert!(p.delta_x0_numeric.is_none());
    let dir = tempfile::tempdir().unwrap();
    let (_, r) = run_lifetime(&s, dir.path()).unwrap();
    assert!(r.lines[0].contains("never leaves"));
}

#[test]
fn figure_three_writes_comoving_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = Overrides {
        quadrature: Some(16),
        ..Default::default()
    };
    let r = run_figure3(dir.path(), &o).unwrap();
    assert!(r.files.iter().any(|f| f.ends_with("fig3_trajectory.csv")));
    let text = fs::read_to_string(dir.path().join("fig3_trajectory.csv")).unwrap();
    let header = text.lines().nth(1).unwrap();
    assert_eq!(
        header,
        "x_minus,xf1,xf3,xf3_tilde,ex1,ex3,ex3_tilde,xf3_co,xf3_tilde_co,ex3_co,ex3_tilde_co"
    );
    assert_eq!(text.lines().count(), 2 + 257);
}
