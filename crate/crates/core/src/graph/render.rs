use std::f64::consts::PI;
use std::fmt::{self, Write};
use std::str::FromStr;

use super::{Direction, GraphError, WGraph};
use crate::scalar::Scalar;

const NAMED: &[(&str, [u8; 3])] = &[
    ("black", [0x00, 0x00, 0x00]),
    ("blue", [0x00, 0x00, 0xff]),
    ("brown", [0xa5, 0x2a, 0x2a]),
    ("cyan", [0x00, 0xff, 0xff]),
    ("gray", [0xbe, 0xbe, 0xbe]),
    ("green", [0x00, 0xff, 0x00]),
    ("grey", [0xbe, 0xbe, 0xbe]),
    ("lightgray", [0xd3, 0xd3, 0xd3]),
    ("magenta", [0xff, 0x00, 0xff]),
    ("orange", [0xff, 0xa5, 0x00]),
    ("pink", [0xff, 0xc0, 0xcb]),
    ("purple", [0xa0, 0x20, 0xf0]),
    ("red", [0xff, 0x00, 0x00]),
    ("yellow", [0xff, 0xff, 0x00]),
];

/// A named colour or `#rrggbb`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Color {
    name: String,
    rgb: [u8; 3],
}

impl Color {
    pub fn name(&self) -> &str {
        &self.name
    }

    fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.rgb[0], self.rgb[1], self.rgb[2])
    }
}

impl FromStr for Color {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, GraphError> {
        let bad = || GraphError::InvalidOption(format!("unknown colour {s:?}"));
        if let Some(hex) = s.strip_prefix('#') {
            if hex.len() != 6 {
                return Err(bad());
            }
            let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
            return Ok(Color { name: s.to_ascii_lowercase(), rgb: [byte(0)?, byte(2)?, byte(4)?] });
        }
        let lower = s.to_ascii_lowercase();
        NAMED
            .iter()
            .find(|(n, _)| *n == lower)
            .map(|(n, rgb)| Color { name: n.to_string(), rgb: *rgb })
            .ok_or_else(bad)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Dot,
    Svg,
}

impl RenderFormat {
    pub fn extension(self) -> &'static str {
        match self {
            RenderFormat::Dot => "dot",
            RenderFormat::Svg => "svg",
        }
    }
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dot" => Ok(RenderFormat::Dot),
            "svg" => Ok(RenderFormat::Svg),
            _ => Err(format!("unknown format {s:?} (dot, svg)")),
        }
    }
}

impl fmt::Display for RenderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions<F> {
    pub format: RenderFormat,
    pub node_size: F,
    pub include_isolated: bool,
    pub color_up: Color,
    pub color_down: Color,
}

impl<F: Scalar> Default for RenderOptions<F> {
    fn default() -> Self {
        RenderOptions {
            format: RenderFormat::Svg,
            node_size: F::lit(3.0),
            include_isolated: true,
            color_up: "red".parse().expect("named colour"),
            color_down: "blue".parse().expect("named colour"),
        }
    }
}

/// Colour intensities in [0, 1]: magnitude over the 95th percentile
/// (nearest rank) of the coloured nodes' magnitudes, clamped.
fn intensities<F: Scalar>(graph: &WGraph<F>) -> Vec<f64> {
    let mut mags: Vec<f64> = graph
        .nodes()
        .filter(|(_, a)| a.direction != Direction::Absent)
        .map(|(_, a)| a.magnitude.to_f64().unwrap_or(0.0))
        .collect();
    mags.sort_by(f64::total_cmp);
    let cap = if mags.is_empty() {
        1.0
    } else {
        let rank = (0.95 * mags.len() as f64).ceil() as usize;
        mags[rank.clamp(1, mags.len()) - 1]
    };
    graph
        .nodes()
        .map(|(_, a)| {
            let m = a.magnitude.to_f64().unwrap_or(0.0);
            if a.direction == Direction::Absent || cap <= 0.0 {
                0.0
            } else {
                (m / cap).clamp(0.0, 1.0)
            }
        })
        .collect()
}

struct Style {
    fill: String,
    opacity: f64,
    color: String,
}

fn styles<F: Scalar>(graph: &WGraph<F>, opts: &RenderOptions<F>) -> Vec<Style> {
    let neutral: Color = "lightgray".parse().expect("named colour");
    graph
        .nodes()
        .zip(intensities(graph))
        .map(|((_, a), t)| {
            let (c, opacity) = match a.direction {
                Direction::Up => (&opts.color_up, 0.2 + 0.8 * t),
                Direction::Down => (&opts.color_down, 0.2 + 0.8 * t),
                Direction::Absent => (&neutral, 1.0),
            };
            Style { fill: c.hex(), opacity, color: if a.direction == Direction::Absent { "gray".into() } else { c.name().into() } }
        })
        .collect()
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders a graph as DOT or standalone SVG text. Output depends only on
/// the graph and the options.
pub fn render<F: Scalar>(graph: &WGraph<F>, opts: &RenderOptions<F>) -> Result<String, GraphError> {
    if opts.node_size <= F::zero() || !opts.node_size.is_finite() {
        return Err(GraphError::InvalidOption(format!("node_size must be positive, got {}", opts.node_size)));
    }
    let graph = if opts.include_isolated { graph.clone() } else { graph.without_isolated() };
    if !opts.include_isolated && graph.edge_count() == 0 {
        return Err(GraphError::EmptyGraphNothingToRender);
    }
    let size = opts.node_size.to_f64().expect("finite");
    Ok(match opts.format {
        RenderFormat::Dot => dot(&graph, opts, size),
        RenderFormat::Svg => svg(&graph, opts, size),
    })
}

fn dot<F: Scalar>(graph: &WGraph<F>, opts: &RenderOptions<F>, size: f64) -> String {
    let mut out = String::from("graph G {\n  node [style=filled];\n");
    for ((name, _), style) in graph.nodes().zip(styles(graph, opts)) {
        let alpha = (style.opacity * 255.0).round() as u8;
        let _ = writeln!(
            out,
            "  {} [fillcolor=\"{}{alpha:02x}\", color=\"{}\", width={:.3}];",
            dot_id(name),
            style.fill,
            style.color,
            size / 4.0
        );
    }
    for (a, b, w) in graph.edges() {
        let _ = writeln!(out, "  {} -- {} [penwidth={:.3}];", dot_id(a), dot_id(b), 5.0 * w as f64 / 1000.0);
    }
    out.push_str("}\n");
    out
}

fn svg<F: Scalar>(graph: &WGraph<F>, opts: &RenderOptions<F>, size: f64) -> String {
    let r = size * 6.0;
    let n = graph.node_count();
    let radius = (n as f64 * r * 3.0 / (2.0 * PI)).max(4.0 * r);
    let margin = 2.0 * r + 40.0;
    let side = 2.0 * (radius + margin);
    let at = |i: usize| {
        let theta = 2.0 * PI * i as f64 / n.max(1) as f64 - PI / 2.0;
        (side / 2.0 + radius * theta.cos(), side / 2.0 + radius * theta.sin())
    };
    let index: std::collections::HashMap<&str, usize> = graph.nodes().enumerate().map(|(i, (s, _))| (s, i)).collect();

    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{side:.1}\" height=\"{side:.1}\" viewBox=\"0 0 {side:.1} {side:.1}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for (a, b, w) in graph.edges() {
        let (x1, y1) = at(index[a]);
        let (x2, y2) = at(index[b]);
        let _ = writeln!(
            out,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#555555\" stroke-width=\"{:.3}\"/>",
            5.0 * w as f64 / 1000.0
        );
    }
    for (i, ((name, _), style)) in graph.nodes().zip(styles(graph, opts)).enumerate() {
        let (x, y) = at(i);
        let _ = writeln!(
            out,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" fill=\"{}\" fill-opacity=\"{:.3}\" stroke=\"{}\"/>",
            style.fill,
            style.opacity,
            xml(&style.color)
        );
        let _ = writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            y + r + 12.0,
            (r * 0.9).max(10.0),
            xml(name)
        );
    }
    out.push_str("</svg>\n");
    out
}
