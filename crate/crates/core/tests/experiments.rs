use helmholtz_abc::experiments::*;
use helmholtz_abc::pade::PadeAbc;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn synthetic_row(k: f64, r: f64, err: Option<f64>) -> ExperimentRow {
    ExperimentRow {
        k,
        r,
        angle: PI / 8.0,
        rel_error_global: err,
        rel_error_local: err.map(|e| 0.9 * e),
        dofs_abc: 1234,
        dofs_pml: 2345,
        sigma0: 41.44653167389282,
        mesh_constant: 2.0 * PI / 5.0,
        h: 0.029711348910385675,
        mesh_seconds: 0.25,
        pml_seconds: 1.5,
        abc_seconds: 0.75,
        error: if err.is_some() { String::new() } else { "mesh: too many, \"quoted\" dofs".into() },
    }
}

fn synthetic_result() -> ExperimentResult {
    ExperimentResult {
        table: TableId::SquareFixedR,
        abc: (0, 0),
        order: 2,
        rows: vec![
            synthetic_row(20.0, 2.0, Some(0.0832785)),
            synthetic_row(20.0, 4.0, Some(0.058743)),
            synthetic_row(40.0, 2.0, None),
            synthetic_row(40.0, 4.0, Some(1.0 / 3.0)),
        ],
    }
}

#[test]
fn csv_round_trips_through_a_parser() {
    let result = synthetic_result();
    let text = emit_csv(&result);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header.join(","), CSV_HEADER);
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), result.rows.len());
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let opt = |s: &str| (!s.is_empty()).then(|| s.parse::<f64>().unwrap());
    for (rec, row) in records.iter().zip(&result.rows) {
        assert_eq!(&rec[col("table")], "square_fixedR");
        assert_eq!(rec[col("k")].parse::<f64>().unwrap(), row.k);
        assert_eq!(rec[col("R")].parse::<f64>().unwrap(), row.r);
        assert_eq!(rec[col("angle")].parse::<f64>().unwrap(), row.angle);
        assert_eq!(opt(&rec[col("rel_error_global")]), row.rel_error_global);
        assert_eq!(opt(&rec[col("rel_error_local")]), row.rel_error_local);
        assert_eq!(rec[col("dofs_pml")].parse::<usize>().unwrap(), row.dofs_pml);
        assert_eq!(rec[col("sigma0")].parse::<f64>().unwrap(), row.sigma0);
        assert_eq!(rec[col("h")].parse::<f64>().unwrap(), row.h);
        assert_eq!(&rec[col("error")], row.error);
    }
}

#[test]
fn svg_is_well_formed_with_one_point_per_row() {
    let result = synthetic_result();
    let svg = emit_svg(&result);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let points = doc
        .descendants()
        .filter(|n| n.has_tag_name("circle") && n.attribute("class") == Some("point"))
        .count();
    let ok = result.rows.iter().filter(|r| r.rel_error_global.is_some()).count();
    assert_eq!(points, ok);

    // Single wavenumber: log-scaled R axis.
    let mut single = result.clone();
    single.rows.retain(|r| r.k == 20.0);
    let doc_text = emit_svg(&single);
    let doc = roxmltree::Document::parse(&doc_text).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("circle")).count(), 2);
}

#[test]
fn outputs_are_written_to_disk() {
    let dir = std::env::temp_dir().join(format!("habc-emit-{}", std::process::id()));
    let paths = write_outputs(&synthetic_result(), &dir).unwrap();
    assert_eq!(paths.len(), 2);
    for p in &paths {
        assert!(std::fs::metadata(p).unwrap().len() > 0);
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn scaling_fit_examples() {
    let inverse_square: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0, 16.0].iter().map(|&r| (r, r.powi(-2))).collect();
    assert!((scaling_fit(&inverse_square).unwrap().slope + 2.0).abs() < 1e-12);
    let flat: Vec<(f64, f64)> = [2.0, 4.0, 8.0].iter().map(|&r| (r, 0.05)).collect();
    assert!(scaling_fit(&flat).unwrap().slope.abs() < 1e-12);
    // Two table entries give a two-point slope by plain arithmetic; the fit itself wants three R.
    let two = [(2.0f64, 0.04845f64), (4.0, 0.00973)];
    let slope = (two[1].1 / two[0].1).ln() / 2f64.ln();
    assert!((slope + 2.32).abs() < 0.01, "{slope}");
    assert!(scaling_fit(&two).is_err());
    assert!(scaling_fit(&[(2.0, 0.1), (4.0, 0.0), (8.0, 0.01)]).is_err());
}

#[test]
fn presets_match_the_tables() {
    let ball = ExperimentSpec::preset(TableId::Ball, 40.0).unwrap();
    assert_eq!(ball.rows.len(), 4);
    assert_eq!(ball.angles, vec![0.0]);
    let butterfly = ExperimentSpec::preset(TableId::Butterfly, 20.0).unwrap();
    assert_eq!(butterfly.rows.len(), 1);
    assert_eq!(butterfly.angles, vec![7.0 * PI / 16.0, PI / 16.0]);
    let grow = ExperimentSpec::preset(TableId::SquareGrowR, 40.0).unwrap();
    assert_eq!(grow.rows.iter().map(|r| r.r).collect::<Vec<_>>(), vec![2.0, 4.0, 8.0]);
    assert!(ExperimentSpec::preset(TableId::Custom, 40.0).is_err());
    for table in [TableId::Ball, TableId::Butterfly, TableId::SquareFixedR, TableId::SquareGrowR] {
        assert_eq!(TableId::from_name(table.name()), Some(table));
    }
}

fn small_ball_spec(k: f64) -> ExperimentSpec {
    let mut spec = ExperimentSpec::preset(TableId::Ball, 40.0).unwrap();
    spec.rows = vec![RowSpec { k, r: 2.0 }];
    spec
}

#[test]
fn rows_are_deterministic_and_respect_the_cap() {
    let mut spec = small_ball_spec(5.0);
    spec.workers = 2;
    spec.angles = vec![0.0, 0.3];
    let a = run(&spec).unwrap();
    let b = run(&spec).unwrap();
    assert_eq!(a.rows.len(), 2);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!(x.ok(), "{}", x.error);
        assert_eq!(x.rel_error_global, y.rel_error_global);
        assert_eq!(x.rel_error_local, y.rel_error_local);
        assert!(x.dofs_pml <= spec.dof_cap);
    }
    assert_eq!(a.rows[0].angle, 0.0);
    assert_eq!(a.rows[1].angle, 0.3);
}

#[test]
fn rows_beyond_the_cap_fail_cleanly() {
    let mut spec = small_ball_spec(5.0);
    spec.dof_cap = 200;
    let result = run(&spec).unwrap();
    assert!(!result.rows[0].ok());
    assert!(result.rows[0].error.starts_with("mesh"), "{}", result.rows[0].error);
}

/// `J_n` by the trapezoidal rule on Bessel's integral (spectrally accurate).
fn bessel_j(n: i32, x: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
    (0..=m).map(|i| f(i as f64 * h) * if i == 0 || i == m { 0.5 } else { 1.0 }).sum::<f64>() * h / PI
}

/// `Y_n` from its integral representation.
fn bessel_y(n: i32, x: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let f = |t: f64| (x * t.sin() - n as f64 * t).sin();
    let first = (0..=m).map(|i| f(i as f64 * h) * if i == 0 || i == m { 0.5 } else { 1.0 }).sum::<f64>() * h / PI;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let g = |t: f64| ((n as f64 * t).exp() + sign * (-n as f64 * t).exp()) * (-x * t.sinh()).exp();
    let (upper, steps) = (12.0, 24_000);
    let dt = upper / steps as f64;
    let second: f64 = (0..=steps)
        .map(|i| g(i as f64 * dt) * if i == 0 || i == steps { 0.5 } else { 1.0 })
        .sum::<f64>()
        * dt
        / PI;
    first - second
}

/// Relative L² distance on `1 < r < R` between the impedance-truncated and
/// the exact scattered field of a unit disc, mode by mode.
fn separated_impedance_error(k: f64, radius: f64) -> f64 {
    let nmax = (k * radius) as i32 + 20;
    let radial = 400;
    let dr = (radius - 1.0) / radial as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for n in 0..=nmax {
        let multiplicity = if n == 0 { 1.0 } else { 2.0 };
        let (j1, y1) = (bessel_j(n, k), bessel_y(n, k));
        let h1 = C64::new(j1, y1);
        let jr = bessel_j(n, k * radius);
        let yr = bessel_y(n, k * radius);
        let djr = 0.5 * (bessel_j(n - 1, k * radius) - bessel_j(n + 1, k * radius));
        let dyr = 0.5 * (bessel_y(n - 1, k * radius) - bessel_y(n + 1, k * radius));
        // u_n = a J_n(kr) + b Y_n(kr): u_n(1) = J_n(k), u_n' − i u_n = 0 at kR (per unit k).
        let rj = C64::new(djr, -jr);
        let ry = C64::new(dyr, -yr);
        let det = rj * y1 - ry * j1;
        let a = C64::new(j1, 0.0) * ry / -det;
        let b = C64::new(j1, 0.0) * rj / det;
        for i in 0..=radial {
            let r = 1.0 + i as f64 * dr;
            let w = if i == 0 || i == radial { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 } * dr / 3.0;
            let (jn, yn) = (bessel_j(n, k * r), bessel_y(n, k * r));
            let exact = C64::new(j1, 0.0) * C64::new(jn, yn) / h1;
            let abc = a * jn + b * yn;
            num += multiplicity * w * r * (abc - exact).norm_sqr();
            den += multiplicity * w * r * exact.norm_sqr();
        }
    }
    (num / den).sqrt()
}

#[test]
fn ball_row_matches_separation_of_variables() {
    let k = 5.0;
    let oracle = separated_impedance_error(k, 2.0);
    let mut spec = small_ball_spec(k);
    spec.abc = PadeAbc::impedance();
    let row = &run(&spec).unwrap().rows[0];
    let got = row.rel_error_global.unwrap();
    assert!((got / oracle - 1.0).abs() < 0.02, "{got} vs {oracle}");
}
