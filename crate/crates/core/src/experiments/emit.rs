use super::{ExperimentResult, ExperimentRow};
use crate::error::{Error, Result};
use std::fmt::Write;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str = "table,m,n,k,R,angle,rel_error_global,rel_error_local,dofs_abc,dofs_pml,sigma0,mesh_constant,h,mesh_seconds,pml_seconds,abc_seconds,error";

/// One line per row; failed rows have empty error columns and a message.
pub fn emit_csv(result: &ExperimentResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).unwrap();
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
    for r in &result.rows {
        w.write_record([
            result.table.name().to_string(),
            result.abc.0.to_string(),
            result.abc.1.to_string(),
            r.k.to_string(),
            r.r.to_string(),
            r.angle.to_string(),
            opt(r.rel_error_global),
            opt(r.rel_error_local),
            r.dofs_abc.to_string(),
            r.dofs_pml.to_string(),
            r.sigma0.to_string(),
            r.mesh_constant.to_string(),
            r.h.to_string(),
            format!("{:.3}", r.mesh_seconds),
            format!("{:.3}", r.pml_seconds),
            format!("{:.3}", r.abc_seconds),
            r.error.clone(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Scatter/line plot of the global relative error: against `k` with one
/// series per `(R, angle)` when several wavenumbers occur, otherwise
/// against `R` on log-log axes with one series per angle. Each successful
/// row is one `<circle>`.
pub fn emit_svg(result: &ExperimentResult) -> String {
    let ok: Vec<&ExperimentRow> = result.rows.iter().filter(|r| r.rel_error_global.is_some()).collect();
    let mut ks: Vec<f64> = ok.iter().map(|r| r.k).collect();
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    let against_k = ks.len() > 1;
    let (xlabel, log) = if against_k { ("k", false) } else { ("R", true) };
    let xval = |r: &ExperimentRow| if against_k { r.k } else { r.r };
    let key = |r: &ExperimentRow| if against_k { (r.r, r.angle) } else { (0.0, r.angle) };
    let mut series: Vec<((f64, f64), Vec<(f64, f64)>)> = Vec::new();
    for r in &ok {
        let pt = (xval(r), r.rel_error_global.unwrap());
        match series.iter_mut().find(|(k, _)| *k == key(r)) {
            Some((_, pts)) => pts.push(pt),
            None => series.push((key(r), vec![pt])),
        }
    }
    for (_, pts) in &mut series {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let tx = |v: f64| if log { v.max(1e-300).ln() } else { v };
    let ty = |v: f64| v.max(1e-300).ln();
    let range = |vals: Vec<f64>| {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        }
    };
    let (x0, x1) = range(ok.iter().map(|r| tx(xval(r))).collect());
    let (y0, y1) = range(ok.iter().map(|r| ty(r.rel_error_global.unwrap())).collect());
    let px = |v: f64| MARGIN + (tx(v) - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (ty(v) - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{} — relative error vs {xlabel}{}</text>"#,
        WIDTH / 2.0,
        result.table.name(),
        if log { " (log-log)" } else { " (log error)" }
    )
    .unwrap();
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(s, r#"<path d="M{l} {t} L{l} {b} L{r} {b}" stroke="black" fill="none"/>"#).unwrap();
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let vx = if log { fx.exp() } else { fx };
        let xp = l + (r - l) * i as f64 / 4.0;
        let yp = b - (b - t) * i as f64 / 4.0;
        writeln!(s, r#"<text x="{xp:.1}" y="{:.1}" text-anchor="middle" font-size="11">{vx:.3}</text>"#, b + 16.0).unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{yp:.1}" text-anchor="end" font-size="11">{:.2e}</text>"#, l - 4.0, fy.exp())
            .unwrap();
    }
    writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{xlabel}</text>"#, WIDTH / 2.0, HEIGHT - 14.0)
        .unwrap();
    for (i, ((rr, angle), pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let d: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2} {:.2}", px(x), py(y))).collect();
        writeln!(s, r#"<path d="M{}" stroke="{color}" fill="none"/>"#, d.join(" L")).unwrap();
        for &(x, y) in pts {
            writeln!(s, r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#, px(x), py(y)).unwrap();
        }
        let label = if against_k {
            format!("R = {rr}, angle = {angle:.4}")
        } else {
            format!("angle = {angle:.4}")
        };
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" fill="{color}">{label}</text>"#,
            r - 150.0,
            t + 14.0 * (i as f64 + 1.0)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<table>.csv` and `<table>.svg` into `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut written = Vec::new();
    for (ext, body) in [("csv", emit_csv(result)), ("svg", emit_svg(result))] {
        let path = dir.join(format!("{}.{ext}", result.table.name()));
        std::fs::write(&path, body).map_err(|e| io_error(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}
