//! SVG 1.1 drawing of a halfplane pattern with its covering arcs.

use std::fmt::Write;

use pinning_core::pattern2d::{HalfplanePattern, PatternVerdict, PatternWitness};

const SIZE: f64 = 480.0;
const SCALE: f64 = 170.0;
const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

fn to_px(x: f64, y: f64) -> (f64, f64) {
    (SIZE / 2.0 + SCALE * x, SIZE / 2.0 - SCALE * y)
}

fn polar(r: f64, deg: f64) -> (f64, f64) {
    let t = deg.to_radians();
    to_px(r * t.cos(), r * t.sin())
}

// counterclockwise arc from a to b degrees at radius r
fn arc_path(r: f64, a: f64, b: f64) -> String {
    let span = (b - a).rem_euclid(360.0);
    let (x0, y0) = polar(r, a);
    let (x1, y1) = polar(r, b);
    let large = u8::from(span > 180.0);
    format!("M {x0:.3} {y0:.3} A {rr:.3} {rr:.3} 0 {large} 0 {x1:.3} {y1:.3}", rr = r * SCALE)
}

pub fn pattern_svg(p: &HalfplanePattern, verdict: &PatternVerdict) -> String {
    let mut s = String::new();
    let c = SIZE / 2.0;
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#).unwrap();
    writeln!(s, r##"<circle cx="{c}" cy="{c}" r="{SCALE}" fill="none" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##)
        .unwrap();

    for (i, n) in p.unit_normals().iter().enumerate() {
        let angle = n[1].atan2(n[0]).to_degrees();
        let (x0, y0) = polar(1.2, angle + 90.0);
        let (x1, y1) = polar(1.2, angle - 90.0);
        writeln!(s, r##"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}" stroke="#999999"/>"##).unwrap();
        let (ax, ay) = polar(0.5, angle);
        writeln!(
            s,
            r##"<line x1="{c}" y1="{c}" x2="{ax:.3}" y2="{ay:.3}" stroke="black" stroke-width="1.5" marker-end="url(#tip)"/>"##
        )
        .unwrap();
        let (lx, ly) = polar(0.6, angle);
        writeln!(
            s,
            r#"<text x="{lx:.3}" y="{ly:.3}" font-family="sans-serif" font-size="14" text-anchor="middle" dominant-baseline="middle">n{}</text>"#,
            i + 1
        )
        .unwrap();
    }

    match &verdict.witness {
        PatternWitness::Cover { arcs } => {
            for (k, (t, a)) in arcs.iter().enumerate() {
                let r = 0.75 + 0.07 * k as f64;
                let color = PALETTE[k % PALETTE.len()];
                writeln!(
                    s,
                    r#"<path class="arc" d="{}" fill="none" stroke="{color}" stroke-width="4"><title>{:?}</title></path>"#,
                    arc_path(r, a.start_deg(), a.end_deg()),
                    t.one_based()
                )
                .unwrap();
            }
        }
        PatternWitness::Uncovered { direction } => {
            let [x, y] = direction.to_f64();
            let angle = y.atan2(x).to_degrees();
            let (ex, ey) = polar(1.15, angle);
            writeln!(
                s,
                r##"<line x1="{c}" y1="{c}" x2="{ex:.3}" y2="{ey:.3}" stroke="#cc0000" stroke-width="2" stroke-dasharray="6 3"/>"##
            )
            .unwrap();
        }
    }

    writeln!(
        s,
        r#"<defs><marker id="tip" markerWidth="8" markerHeight="8" refX="6" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="black"/></marker></defs>"#
    )
    .unwrap();
    let title = if verdict.is_pinning { "pinning pattern" } else { "not a pinning pattern" };
    writeln!(s, r#"<text x="12" y="22" font-family="sans-serif" font-size="16">{title}</text>"#).unwrap();
    s.push_str("</svg>\n");
    s
}
