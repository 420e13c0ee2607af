//! Static SVG 1.1 scatter plots.
//!
//! Layout `y` grows upward, so it is negated on output. The viewBox is the
//! bounding box of the points plus a 5% margin on each side; 3D layouts are
//! drawn from their first two axes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::write_atomic;
use crate::error::{Error, Result};
use crate::types::Layout;

#[derive(Debug, Clone, Copy)]
pub enum Coloring<'a> {
    Uniform,
    Labels(&'a [i64]),
    Scores(&'a [f64]),
}

const TAB10: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Viridis sampled at eight stops, interpolated linearly.
const VIRIDIS: [[f64; 3]; 8] = [
    [68.0, 1.0, 84.0],
    [70.0, 50.0, 126.0],
    [54.0, 92.0, 141.0],
    [39.0, 127.0, 142.0],
    [31.0, 161.0, 135.0],
    [74.0, 193.0, 109.0],
    [160.0, 218.0, 57.0],
    [253.0, 231.0, 37.0],
];

fn sequential(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let f = x - i as f64;
    let c: Vec<u8> = (0..3)
        .map(|k| (VIRIDIS[i][k] + f * (VIRIDIS[i + 1][k] - VIRIDIS[i][k])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn label_color(rank: usize) -> &'static str {
    TAB10[rank % TAB10.len()]
}

pub fn render_svg(layout: &Layout, coloring: Coloring<'_>) -> Result<String> {
    let n = layout.n_points();
    match coloring {
        Coloring::Labels(l) if l.len() != n => {
            return Err(Error::invalid(format!("{} labels for {n} points", l.len())));
        }
        Coloring::Scores(s) if s.len() != n => {
            return Err(Error::invalid(format!("{} scores for {n} points", s.len())));
        }
        _ => {}
    }
    let xy: Vec<(f64, f64)> = (0..n).map(|i| (layout.point(i)[0], -layout.point(i)[1])).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &xy {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let span = if span > 0.0 { span } else { 1.0 };
    let (w, h) = ((x1 - x0).max(span * 1e-3), (y1 - y0).max(span * 1e-3));
    let (mx, my) = (0.05 * w, 0.05 * h);
    let (vx, vy, vw, vh) = (x0 - mx, y0 - my, w + 2.0 * mx, h + 2.0 * my);
    let r = 0.004 * span;
    let font = 0.025 * span;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{vx:.6} {vy:.6} {vw:.6} {vh:.6}\" width=\"800\" height=\"{:.0}\">",
        800.0 * vh / vw
    )
    .unwrap();
    writeln!(out, "<rect x=\"{vx:.6}\" y=\"{vy:.6}\" width=\"{vw:.6}\" height=\"{vh:.6}\" fill=\"white\"/>").unwrap();

    let distinct: Vec<i64> = match coloring {
        Coloring::Labels(l) => l.iter().copied().collect::<BTreeSet<_>>().into_iter().collect(),
        _ => Vec::new(),
    };
    let (smin, smax) = match coloring {
        Coloring::Scores(s) => s
            .iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v))),
        _ => (0.0, 0.0),
    };
    out.push_str("<g stroke=\"none\" fill-opacity=\"0.8\">\n");
    for (i, &(x, y)) in xy.iter().enumerate() {
        let fill = match coloring {
            Coloring::Uniform => TAB10[0].to_string(),
            Coloring::Labels(l) => label_color(distinct.binary_search(&l[i]).unwrap()).to_string(),
            Coloring::Scores(s) => {
                let range = smax - smin;
                sequential(if range > 0.0 { (s[i] - smin) / range } else { 0.5 })
            }
        };
        writeln!(out, "<circle cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"{r:.6}\" fill=\"{fill}\"/>").unwrap();
    }
    out.push_str("</g>\n");

    // legend in the top-left corner
    let (lx, ly) = (vx + 0.5 * mx.max(font), vy + 0.5 * my.max(font));
    match coloring {
        Coloring::Uniform => {}
        Coloring::Labels(_) => {
            out.push_str("<g class=\"legend\">\n");
            for (rank, label) in distinct.iter().enumerate() {
                let y = ly + (rank as f64 + 0.5) * 1.3 * font;
                writeln!(
                    out,
                    "<circle cx=\"{:.6}\" cy=\"{y:.6}\" r=\"{:.6}\" fill=\"{}\"/><text x=\"{:.6}\" y=\"{:.6}\" font-size=\"{font:.6}\" font-family=\"sans-serif\">{label}</text>",
                    lx + 0.5 * font,
                    0.4 * font,
                    label_color(rank),
                    lx + 1.2 * font,
                    y + 0.35 * font
                )
                .unwrap();
            }
            out.push_str("</g>\n");
        }
        Coloring::Scores(_) => {
            out.push_str("<g class=\"legend\">\n");
            const STEPS: usize = 10;
            for s in 0..STEPS {
                writeln!(
                    out,
                    "<rect x=\"{:.6}\" y=\"{:.6}\" width=\"{font:.6}\" height=\"{:.6}\" fill=\"{}\"/>",
                    lx,
                    ly + (STEPS - 1 - s) as f64 * 0.5 * font,
                    0.5 * font,
                    sequential(s as f64 / (STEPS - 1) as f64)
                )
                .unwrap();
            }
            for (v, y) in [(smax, ly + 0.4 * font), (smin, ly + STEPS as f64 * 0.5 * font)] {
                writeln!(
                    out,
                    "<text x=\"{:.6}\" y=\"{y:.6}\" font-size=\"{font:.6}\" font-family=\"sans-serif\">{v:.4}</text>",
                    lx + 1.3 * font
                )
                .unwrap();
            }
            out.push_str("</g>\n");
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_svg(layout: &Layout, coloring: Coloring<'_>, path: &Path) -> Result<()> {
    write_atomic(path, render_svg(layout, coloring)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> Layout {
        Layout::from_points(&[[0.0, 0.0], [1.0, 2.0], [2.0, 1.0]]).unwrap()
    }

    #[test]
    fn circles_and_legend_entries() {
        let svg = render_svg(&three(), Coloring::Labels(&[4, 7, 4])).unwrap();
        let legend = svg.split("<g class=\"legend\">").nth(1).unwrap();
        assert_eq!(svg.matches("<circle").count(), 5);
        assert_eq!(legend.matches("<text").count(), 2);
        assert!(svg.contains("viewBox=\"-0.100000 -2.100000 2.200000 2.200000\""));
    }

    #[test]
    fn output_is_deterministic() {
        let s = [0.1, 0.5, 0.9];
        assert_eq!(render_svg(&three(), Coloring::Scores(&s)).unwrap(), render_svg(&three(), Coloring::Scores(&s)).unwrap());
        assert!(render_svg(&three(), Coloring::Scores(&s[..2])).is_err());
    }

    #[test]
    fn colormap_endpoints() {
        assert_eq!(sequential(0.0), "#440154");
        assert_eq!(sequential(1.0), "#fde725");
    }
}
