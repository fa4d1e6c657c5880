//! Standalone SVG heatmaps, no plotting library.
//!
//! Success maps use a monotone two-stop color ramp on the *transformed*
//! rate `10^(-3(1-x))`: `u = (t - 0.001) / 0.999` interpolates linearly
//! from dark blue `rgb(8, 48, 107)` at `u = 0` to pale yellow
//! `rgb(255, 255, 217)` at `u = 1`. Difference maps use a diverging ramp:
//! blue `rgb(33, 102, 172)` at -1, exact white at 0, red
//! `rgb(178, 24, 43)` at +1. The `b` axis is horizontal, `a` vertical
//! (increasing upward), and the optional overlay draws the transition
//! curve `a = 1 + 2b` through the grid's `b` values in red.

use std::path::Path;

use crate::experiments::{success_transform, DiffGrid, GridResult, Method};
use crate::HarnessError;

const PLOT_W: f64 = 480.0;
const PLOT_H: f64 = 480.0;
const MARGIN_LEFT: f64 = 58.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_RIGHT: f64 = 14.0;
const MARGIN_BOTTOM: f64 = 46.0;

fn lerp(lo: u8, hi: u8, u: f64) -> u8 {
    (lo as f64 + (hi as f64 - lo as f64) * u).round() as u8
}

/// Monotone ramp over the transformed success rate in [0.001, 1].
fn success_color(transformed: f64) -> (u8, u8, u8) {
    let u = ((transformed - 0.001) / 0.999).clamp(0.0, 1.0);
    (lerp(8, 255, u), lerp(48, 255, u), lerp(107, 217, u))
}

/// Diverging ramp over [-1, 1]; exactly white at 0.
fn diff_color(v: f64) -> (u8, u8, u8) {
    let v = v.clamp(-1.0, 1.0);
    if v < 0.0 {
        let u = v + 1.0; // 0 at -1, 1 at 0
        (lerp(33, 255, u), lerp(102, 255, u), lerp(172, 255, u))
    } else {
        (lerp(255, 178, v), lerp(255, 24, v), lerp(255, 43, v))
    }
}

/// Maps grid coordinates to pixel coordinates. Cell edges sit halfway
/// between neighboring grid values, with the end cells extended by half
/// their adjacent spacing.
pub struct CoordMap {
    a_edges: Vec<f64>,
    b_edges: Vec<f64>,
}

fn edges(grid: &[f64]) -> Vec<f64> {
    let k = grid.len();
    let mut edges = Vec::with_capacity(k + 1);
    if k == 1 {
        let half = 0.5 * grid[0].abs().max(0.5);
        return vec![grid[0] - half, grid[0] + half];
    }
    edges.push(grid[0] - 0.5 * (grid[1] - grid[0]));
    for w in grid.windows(2) {
        edges.push(0.5 * (w[0] + w[1]));
    }
    edges.push(grid[k - 1] + 0.5 * (grid[k - 1] - grid[k - 2]));
    edges
}

impl CoordMap {
    pub fn new(a_grid: &[f64], b_grid: &[f64]) -> Self {
        CoordMap {
            a_edges: edges(a_grid),
            b_edges: edges(b_grid),
        }
    }

    pub fn a_span(&self) -> (f64, f64) {
        (self.a_edges[0], *self.a_edges.last().unwrap())
    }

    /// Pixel position of a data point `(a, b)`; `a` grows upward.
    pub fn to_px(&self, a: f64, b: f64) -> (f64, f64) {
        let (a_lo, a_hi) = (self.a_edges[0], *self.a_edges.last().unwrap());
        let (b_lo, b_hi) = (self.b_edges[0], *self.b_edges.last().unwrap());
        let x = MARGIN_LEFT + (b - b_lo) / (b_hi - b_lo) * PLOT_W;
        let y = MARGIN_TOP + (a_hi - a) / (a_hi - a_lo) * PLOT_H;
        (x, y)
    }

    fn cell_rect(&self, a_index: usize, b_index: usize) -> (f64, f64, f64, f64) {
        let (x0, y0) = self.to_px(self.a_edges[a_index + 1], self.b_edges[b_index]);
        let (x1, y1) = self.to_px(self.a_edges[a_index], self.b_edges[b_index + 1]);
        (x0, y0, x1 - x0, y1 - y0)
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Points of the overlay polyline `a = 1 + 2b` through the grid's `b`
/// values, clipped where it exits the plotted `a` range.
pub fn threshold_polyline(a_grid: &[f64], b_grid: &[f64]) -> Vec<(f64, f64)> {
    let map = CoordMap::new(a_grid, b_grid);
    let (a_lo, a_hi) = map.a_span();
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut previous: Option<(f64, f64)> = None;
    for &b in b_grid {
        let a = 1.0 + 2.0 * b;
        let inside = (a_lo..=a_hi).contains(&a);
        match (previous, inside) {
            (_, true) => {
                if let Some((pb, pa)) = previous {
                    if !(a_lo..=a_hi).contains(&pa) {
                        // entering: add boundary crossing
                        let bound = if pa < a_lo { a_lo } else { a_hi };
                        let t = (bound - pa) / (a - pa);
                        points.push((pb + t * (b - pb), bound));
                    }
                }
                points.push((b, a));
            }
            (Some((pb, pa)), false) if (a_lo..=a_hi).contains(&pa) => {
                // exiting: add boundary crossing and stop collecting
                let bound = if a < a_lo { a_lo } else { a_hi };
                let t = (bound - pa) / (a - pa);
                points.push((pb + t * (b - pb), bound));
            }
            _ => {}
        }
        previous = Some((b, a));
    }
    points
}

struct SvgDoc {
    body: String,
}

impl SvgDoc {
    fn new(title: &str) -> Self {
        let width = MARGIN_LEFT + PLOT_W + MARGIN_RIGHT;
        let height = MARGIN_TOP + PLOT_H + MARGIN_BOTTOM;
        let mut body = String::new();
        body.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            w = px(width),
            h = px(height)
        ));
        body.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
            px(width),
            px(height)
        ));
        body.push_str(&format!(
            "<text x=\"{}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
            px(MARGIN_LEFT),
            xml_escape(title)
        ));
        SvgDoc { body }
    }

    fn cell(&mut self, map: &CoordMap, ai: usize, bi: usize, color: (u8, u8, u8)) {
        let (x, y, w, h) = map.cell_rect(ai, bi);
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({},{},{})\"/>\n",
            px(x),
            px(y),
            px(w),
            px(h),
            color.0,
            color.1,
            color.2
        ));
    }

    fn axes(&mut self, a_grid: &[f64], b_grid: &[f64]) {
        let x0 = MARGIN_LEFT;
        let y0 = MARGIN_TOP + PLOT_H;
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
            px(x0),
            px(MARGIN_TOP),
            px(PLOT_W),
            px(PLOT_H)
        ));
        let text = |x: f64, y: f64, anchor: &str, label: String| {
            format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"{anchor}\">{label}</text>\n",
                px(x),
                px(y)
            )
        };
        self.body.push_str(&text(
            x0 + PLOT_W / 2.0,
            y0 + 34.0,
            "middle",
            "b".to_string(),
        ));
        self.body.push_str(&text(
            x0 - 44.0,
            MARGIN_TOP + 12.0,
            "start",
            "a".to_string(),
        ));
        self.body
            .push_str(&text(x0, y0 + 16.0, "middle", format!("{:.3}", b_grid[0])));
        self.body.push_str(&text(
            x0 + PLOT_W,
            y0 + 16.0,
            "middle",
            format!("{:.3}", b_grid[b_grid.len() - 1]),
        ));
        self.body.push_str(&text(
            x0 - 6.0,
            y0 + 4.0,
            "end",
            format!("{:.3}", a_grid[0]),
        ));
        self.body.push_str(&text(
            x0 - 6.0,
            MARGIN_TOP + 10.0,
            "end",
            format!("{:.3}", a_grid[a_grid.len() - 1]),
        ));
    }

    fn overlay(&mut self, map: &CoordMap, a_grid: &[f64], b_grid: &[f64]) {
        let pts = threshold_polyline(a_grid, b_grid);
        if pts.len() < 2 {
            return;
        }
        let attr: Vec<String> = pts
            .iter()
            .map(|&(b, a)| {
                let (x, y) = map.to_px(a, b);
                format!("{},{}", px(x), px(y))
            })
            .collect();
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n",
            attr.join(" ")
        ));
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Success-probability heatmap of one method of a completed grid.
pub fn heatmap_svg_string(
    result: &GridResult,
    method: Method,
    overlay_threshold: bool,
) -> Result<String, HarnessError> {
    let spec = &result.spec;
    let slot = result
        .method_index(method)
        .ok_or_else(|| HarnessError::InvalidSpec(format!("{} not in spec", method.name())))?;
    if !result.is_complete() {
        return Err(HarnessError::InvalidSpec(
            "heatmap requires a completed grid".into(),
        ));
    }
    let map = CoordMap::new(&spec.a_grid, &spec.b_grid);
    let mut doc = SvgDoc::new(&format!("exact recovery rate: {}", method.name()));
    for ai in 0..spec.a_grid.len() {
        for bi in 0..spec.b_grid.len() {
            let tally = &result.cells[spec.cell_index(ai, bi)].tallies[slot];
            let t = success_transform(tally.success_rate())?;
            doc.cell(&map, ai, bi, success_color(t));
        }
    }
    doc.axes(&spec.a_grid, &spec.b_grid);
    if overlay_threshold {
        doc.overlay(&map, &spec.a_grid, &spec.b_grid);
    }
    Ok(doc.finish())
}

pub fn render_heatmap_svg(
    result: &GridResult,
    method: Method,
    path: &Path,
    overlay_threshold: bool,
) -> Result<(), HarnessError> {
    let text = heatmap_svg_string(result, method, overlay_threshold)?;
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Diverging heatmap of a success-rate difference map.
pub fn diff_svg_string(diff: &DiffGrid, overlay_threshold: bool) -> String {
    let map = CoordMap::new(&diff.a_grid, &diff.b_grid);
    let mut doc = SvgDoc::new(&format!(
        "success difference: {} - {}",
        diff.method_a.name(),
        diff.method_b.name()
    ));
    for ai in 0..diff.a_grid.len() {
        for bi in 0..diff.b_grid.len() {
            let v = diff.values[ai * diff.b_grid.len() + bi];
            doc.cell(&map, ai, bi, diff_color(v));
        }
    }
    doc.axes(&diff.a_grid, &diff.b_grid);
    if overlay_threshold {
        doc.overlay(&map, &diff.a_grid, &diff.b_grid);
    }
    doc.finish()
}

pub fn render_diff_svg(
    diff: &DiffGrid,
    path: &Path,
    overlay_threshold: bool,
) -> Result<(), HarnessError> {
    std::fs::write(path, diff_svg_string(diff, overlay_threshold))
        .map_err(|e| HarnessError::io(path, e))
}
