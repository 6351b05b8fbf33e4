//! Static SVG barcode diagram: one block per k, each split into an `H1`
//! panel above an `H0` panel. `H0` segments are red while their component
//! is smaller than k; shaded bands mark the regimes where k-anonymity holds.

use std::fmt::Write;

use anonytope_core::homology::{Barcode, WeightedBarcode};
use anonytope_core::Regime;

const WIDTH: f64 = 900.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 30.0;
const ROW: f64 = 9.0;
const GAP: f64 = 28.0;
const RED: &str = "#d62728";
const VALID: &str = "#2b7bba";
const NEUTRAL: &str = "#555555";
const BAND: &str = "#dff0d8";

pub struct Panel<'a> {
    pub k: usize,
    pub regimes: &'a [Regime],
}

fn x_max(barcode: &Barcode, weighted: &WeightedBarcode, panels: &[Panel]) -> f64 {
    let deaths = weighted
        .h0_bars
        .iter()
        .filter_map(|b| b.death)
        .chain(barcode.displayed().filter_map(|b| b.death));
    let starts = panels.iter().flat_map(|p| p.regimes.iter().map(|r| r.lo));
    let m = deaths.chain(starts).fold(0.0_f64, f64::max);
    if m > 0.0 {
        m * 1.15
    } else {
        1.0
    }
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(mag * 10.0)
}

struct Canvas {
    body: String,
    scale: f64,
    max: f64,
}

impl Canvas {
    fn x(&self, eps: f64) -> f64 {
        LEFT + eps.min(self.max) * self.scale
    }

    fn segment(&mut self, lo: f64, hi: Option<f64>, y: f64, color: &str) {
        let x1 = self.x(lo);
        let x2 = hi.map_or(WIDTH - RIGHT, |h| self.x(h));
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="5"/>"#,
            x2.max(x1 + 1.0)
        );
    }

    fn text(&mut self, x: f64, y: f64, s: &str, anchor: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="12" text-anchor="{anchor}">{s}</text>"#
        );
    }

    fn axis(&mut self, y: f64) {
        let _ = writeln!(
            self.body,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#000"/>"##,
            WIDTH - RIGHT
        );
        let step = tick_step(self.max);
        let mut t = 0.0;
        while t <= self.max + 1e-12 {
            let x = self.x(t);
            let _ = writeln!(
                self.body,
                r##"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000"/>"##,
                y + 4.0
            );
            self.text(
                x,
                y + 16.0,
                &format!("{}", (t * 1e6).round() / 1e6),
                "middle",
            );
            t += step;
        }
    }
}

pub fn render(barcode: &Barcode, weighted: &WeightedBarcode, panels: &[Panel]) -> String {
    let max = x_max(barcode, weighted, panels);
    let mut c = Canvas {
        body: String::new(),
        scale: (WIDTH - LEFT - RIGHT) / max,
        max,
    };
    let h1: Vec<_> = barcode.displayed().filter(|b| b.dim >= 1).collect();
    let mut h0: Vec<_> = weighted.h0_bars.iter().collect();
    h0.sort_by(|a, b| {
        let key = |d: Option<f64>| d.unwrap_or(f64::INFINITY);
        key(a.death).total_cmp(&key(b.death))
    });

    let mut y = 20.0;
    for panel in panels {
        let block_top = y;
        let h1_height = (h1.len().max(1) as f64) * ROW + 10.0;
        let h0_height = (h0.len() as f64) * ROW + 10.0;
        let block_bottom = block_top + 20.0 + h1_height + GAP + h0_height;
        for r in panel.regimes {
            let x1 = c.x(r.lo);
            let x2 = r.hi.map_or(WIDTH - RIGHT, |h| c.x(h));
            let _ = writeln!(
                c.body,
                r#"<rect x="{x1:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{BAND}"/>"#,
                block_top + 20.0,
                (x2 - x1).max(1.0),
                block_bottom - block_top - 20.0
            );
            c.text(
                x1 + 3.0,
                block_top + 16.0,
                &format!("{} classes", r.n_classes),
                "start",
            );
        }
        c.text(8.0, block_top + 14.0, &format!("k = {}", panel.k), "start");

        let mut row_y = block_top + 26.0;
        c.text(LEFT - 8.0, row_y + 6.0, "H1", "end");
        for b in &h1 {
            let color = if b.dim == 1 { NEUTRAL } else { "#8c564b" };
            c.segment(b.birth, b.death, row_y, color);
            row_y += ROW;
        }
        row_y = block_top + 20.0 + h1_height + GAP;
        c.text(LEFT - 8.0, row_y + 6.0, "H0", "end");
        for b in &h0 {
            for (i, &(from, w)) in b.weight_steps.iter().enumerate() {
                let to = b.weight_steps.get(i + 1).map(|s| s.0).or(b.death);
                let color = if w >= panel.k { VALID } else { RED };
                c.segment(from, to, row_y, color);
            }
            row_y += ROW;
        }
        c.axis(block_bottom);
        y = block_bottom + 40.0;
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{y:.0}" viewBox="0 0 {WIDTH} {y:.0}" font-family="sans-serif">"#
    );
    out.push_str(&c.body);
    out.push_str("</svg>\n");
    out
}
