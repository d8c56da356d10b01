use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::train::GridResult;
use crate::Scalar;

const CELL: f64 = 16.0;
const MARGIN: f64 = 48.0;

/// Blue→yellow ramp for `t ∈ [0, 1]`.
fn color(t: f64) -> String {
    let stops = [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let x = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (x.floor() as usize).min(stops.len() - 2);
    let f = x - i as f64;
    let (a, b) = (stops[i], stops[i + 1]);
    let mix = |u: f64, v: f64| (u + (v - u) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Heatmap of best observed value: γ along x, β along y (upwards). Red
/// dots mark cells above the `(0, 0)` baseline, a star the argmax, and
/// circles the three best cells.
pub fn render_heatmap_svg<T: Scalar>(result: &GridResult<T>) -> Result<String> {
    let (ng, nb) = result.dims();
    if ng == 0 || nb == 0 || result.cells.len() != ng * nb {
        return Err(Error::invalid("heatmap has no cells"));
    }
    let vals: Vec<Option<f64>> = result.cells.iter().map(|c| c.best_value.map(Scalar::to_f64_lossy)).collect();
    let lo = vals.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let (w, h) = (ng as f64 * CELL + 2.0 * MARGIN, nb as f64 * CELL + 2.0 * MARGIN);
    let centre = |gi: usize, bi: usize| (MARGIN + (gi as f64 + 0.5) * CELL, MARGIN + (nb - 1 - bi) as f64 * CELL + CELL / 2.0);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for gi in 0..ng {
        for bi in 0..nb {
            let v = vals[gi * nb + bi];
            let fill = match v {
                Some(v) if hi > lo => color((v - lo) / (hi - lo)),
                Some(_) => color(0.5),
                None => "#bbbbbb".into(),
            };
            let (cx, cy) = centre(gi, bi);
            let _ = writeln!(
                s,
                r#"<rect class="cell" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}"/>"#,
                cx - CELL / 2.0,
                cy - CELL / 2.0
            );
        }
    }
    let nb_u = nb;
    for i in result.red_dots() {
        let (cx, cy) = centre(i / nb_u, i % nb_u);
        let _ = writeln!(s, r#"<circle class="red-dot" cx="{cx}" cy="{cy}" r="2" fill="red"/>"#);
    }
    for i in result.top(3) {
        let (cx, cy) = centre(i / nb_u, i % nb_u);
        let _ = writeln!(
            s,
            r#"<circle class="top3" cx="{cx}" cy="{cy}" r="{}" fill="none" stroke="red" stroke-width="1.5"/>"#,
            CELL * 0.6
        );
    }
    let (cx, cy) = centre(result.argmax / nb_u, result.argmax % nb_u);
    let r = CELL * 0.45;
    let star: Vec<String> = (0..10)
        .map(|k| {
            let rad = if k % 2 == 0 { r } else { r * 0.45 };
            let a = std::f64::consts::PI * (k as f64 / 5.0 - 0.5);
            format!("{:.2},{:.2}", cx + rad * a.cos(), cy + rad * a.sin())
        })
        .collect();
    let _ = writeln!(s, r#"<polygon class="argmax" points="{}" fill="white" stroke="black" stroke-width="0.8"/>"#, star.join(" "));
    let g_last = result.gammas[ng - 1].to_f64_lossy();
    let b_last = result.betas[nb - 1].to_f64_lossy();
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">γ ∈ [{:.4}, {:.4}]</text>"#,
        w / 2.0,
        h - MARGIN / 3.0,
        result.gammas[0].to_f64_lossy(),
        g_last
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 {} {})">β ∈ [{:.4}, {:.4}]</text>"#,
        MARGIN / 2.0,
        h / 2.0,
        MARGIN / 2.0,
        h / 2.0,
        result.betas[0].to_f64_lossy(),
        b_last
    );
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

pub fn emit_heatmap_svg<T: Scalar>(result: &GridResult<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_heatmap_svg(result)?)?;
    Ok(())
}
