//! Hand-written static SVG plots.

use std::fmt::Write as _;

use crate::geometry::Point2;
use crate::sim::SimTrace;

use super::CostSeries;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;

struct Frame {
    min: Point2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn px(&self, p: Point2) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min.x) * self.scale,
            MARGIN + self.height - (p.y - self.min.y) * self.scale,
        )
    }
}

fn polygon_points(frame: &Frame, vertices: &[Point2]) -> String {
    vertices
        .iter()
        .map(|&v| {
            let (x, y) = frame.px(v);
            format!("{x:.2},{y:.2}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Robot paths over density shading, with aerial cell borders.
pub(super) fn trajectories(trace: &SimTrace) -> String {
    let bb = trace.domain.bounding_box();
    let scale = (WIDTH - 2.0 * MARGIN) / bb.width();
    let height = bb.height() * scale;
    let frame = Frame {
        min: bb.min,
        scale,
        height,
    };
    let total_h = height + 2.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{total_h:.0}" viewBox="0 0 {WIDTH} {total_h:.2}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let preview = &trace.preview;
    let peak = preview.values.iter().copied().fold(0.0, f64::max);
    if peak > 0.0 {
        let cw = bb.width() / preview.nx as f64;
        let ch = bb.height() / preview.ny as f64;
        let _ = writeln!(out, r#"<g stroke="none" fill="rgb(30,90,200)">"#);
        for j in 0..preview.ny {
            for i in 0..preview.nx {
                let v = preview.values[j * preview.nx + i] / peak;
                if v < 0.01 {
                    continue;
                }
                let corner = Point2::new(bb.min.x + i as f64 * cw, bb.min.y + (j + 1) as f64 * ch);
                let (x, y) = frame.px(corner);
                let _ = writeln!(
                    out,
                    r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill-opacity="{:.3}"/>"#,
                    cw * scale,
                    ch * scale,
                    0.6 * v
                );
            }
        }
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(
        out,
        r#"<polygon points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        polygon_points(&frame, trace.domain.vertices())
    );
    if let Some(diagram) = &trace.aerial_diagram {
        for cell in diagram.cells() {
            let _ = writeln!(
                out,
                r#"<polygon points="{}" fill="none" stroke="dimgray" stroke-width="3"/>"#,
                polygon_points(&frame, cell.vertices())
            );
        }
        for &s in diagram.sites() {
            let (x, y) = frame.px(s);
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="royalblue"/>"#
            );
        }
    }

    let n = trace.records.first().map_or(0, |r| r.positions.len());
    for i in 0..n {
        let path = trace
            .records
            .iter()
            .map(|r| {
                let (x, y) = frame.px(r.positions[i]);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            out,
            r#"<polyline points="{path}" fill="none" stroke="crimson" stroke-width="1.5" stroke-dasharray="3,3"/>"#
        );
    }
    if let (Some(first), Some(last)) = (trace.records.first(), trace.records.last()) {
        for &p in &first.positions {
            let (x, y) = frame.px(p);
            let _ = writeln!(
                out,
                r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="black" stroke-width="2"/>"#,
                x - 5.0,
                y - 5.0,
                x + 5.0,
                y + 5.0,
                x - 5.0,
                y + 5.0,
                x + 5.0,
                y - 5.0
            );
        }
        for &p in &last.positions {
            let (x, y) = frame.px(p);
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="7" fill="none" stroke="blue" stroke-width="2"/>"#
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Cost against iteration.
pub(super) fn cost_plot(cost: &CostSeries) -> String {
    let (w, h) = (WIDTH, 400.0);
    let (left, right, top, bottom) = (70.0, 20.0, 20.0, 40.0);
    let n = cost.values.len().max(2);
    let hi = cost
        .values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = cost
        .values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .min(0.0);
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let x_of = |i: usize| left + (w - left - right) * i as f64 / (n - 1) as f64;
    let y_of = |v: f64| top + (h - top - bottom) * (1.0 - (v - lo) / (hi - lo));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        h - bottom,
        w - right,
        h - bottom
    );
    let _ = writeln!(
        out,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#,
        h - bottom
    );
    for (v, label) in [(lo, lo), (hi, hi)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" font-size="12" text-anchor="end">{label:.4}</text>"#,
            left - 6.0,
            y_of(v) + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{}" font-size="12" text-anchor="middle">iteration (0 to {})</text>"#,
        (left + w - right) / 2.0,
        h - 10.0,
        cost.values.len().saturating_sub(1)
    );
    let points = cost
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| format!("{:.2},{:.2}", x_of(i), y_of(v)))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(
        out,
        r#"<polyline points="{points}" fill="none" stroke="crimson" stroke-width="2"/>"#
    );
    out.push_str("</svg>\n");
    out
}
