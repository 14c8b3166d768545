//! The weight diagram of `(A_{n−1}, ϖ₂)`: vertices are the pairs of `[n]`,
//! and an edge labelled `k` joins `P` to `P ∖ {k} ∪ {k+1}`.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::combinat::{pair_partitions, pairs, CombinatError, Pair, PairPartition, Quad};
use crate::exalg::{Indexing, SquareMatrix};
use crate::scalar::Scalar;
use crate::scheme::SchemeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("rank {n} too small, need n >= 3")]
    RankTooSmall { n: usize },
    #[error("unsupported format {0:?} (expected ascii, dot or svg)")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Index(#[from] CombinatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: Pair,
    pub to: Pair,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightDiagram {
    n: usize,
    vertices: Vec<Pair>,
    edges: Vec<Edge>,
}

pub fn build_diagram(n: usize) -> Result<WeightDiagram, DiagramError> {
    if n < 3 {
        return Err(DiagramError::RankTooSmall { n });
    }
    let vertices = pairs(n);
    let mut edges = Vec::new();
    for &p in &vertices {
        for k in p.elems() {
            if k < n && !p.contains(k + 1) {
                let to = p.substitute(k, k + 1).expect("k in p, k+1 not in p");
                edges.push(Edge { from: p, to, label: k });
            }
        }
    }
    edges.sort();
    Ok(WeightDiagram { n, vertices, edges })
}

impl WeightDiagram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Pair] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The label of the edge between `a` and `b`, in either direction.
    pub fn edge_label(&self, a: Pair, b: Pair) -> Option<usize> {
        self.edges
            .iter()
            .find(|e| (e.from == a && e.to == b) || (e.from == b && e.to == a))
            .map(|e| e.label)
    }

    pub fn neighbors(&self, p: Pair) -> Vec<(Pair, usize)> {
        let mut out: Vec<(Pair, usize)> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.from == p {
                    Some((e.to, e.label))
                } else if e.to == p {
                    Some((e.from, e.label))
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out
    }
}

/// The `n − 1` vertices containing `anchor`, ordered by the other element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramPath {
    pub anchor: usize,
    pub vertices: Vec<Pair>,
}

impl DiagramPath {
    /// Maximal runs of consecutive vertices joined by diagram edges. An
    /// interior anchor splits into two runs at the missing vertex `(i, i)`.
    pub fn segments(&self, diagram: &WeightDiagram) -> Vec<Vec<Pair>> {
        let mut out: Vec<Vec<Pair>> = Vec::new();
        for &v in &self.vertices {
            match out.last_mut() {
                Some(run) if diagram.edge_label(*run.last().expect("nonempty"), v).is_some() => {
                    run.push(v)
                }
                _ => out.push(vec![v]),
            }
        }
        out
    }
}

pub fn path_of(diagram: &WeightDiagram, i: usize) -> Result<DiagramPath, DiagramError> {
    let n = diagram.n;
    if !(1..=n).contains(&i) {
        return Err(CombinatError::InvalidIndexSet { elems: vec![i], n }.into());
    }
    let vertices = (1..=n)
        .filter(|&k| k != i)
        .map(|k| Pair::oriented(i, k).expect("k != i").0)
        .collect();
    Ok(DiagramPath { anchor: i, vertices })
}

/// An edge of the square's own `(A₃, ϖ₂)` diagram: `h_t` replaced by
/// `h_{t+1}`. In the ambient diagram it is the chain of edges labelled
/// `h_t, …, h_{t+1} − 1`, a single edge only when `h_{t+1} = h_t + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareEdge {
    pub from: Pair,
    pub to: Pair,
    /// Local label `t ∈ {1, 2, 3}`.
    pub label: usize,
    pub ambient: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementarySquare {
    pub h: Quad,
    pub vertices: [Pair; 6],
    pub pairings: [PairPartition; 3],
    pub edges: Vec<SquareEdge>,
}

pub fn elementary_square(diagram: &WeightDiagram, h: Quad) -> Result<ElementarySquare, DiagramError> {
    let n = diagram.n;
    Quad::new(h.elems(), n)?;
    let paths = h
        .elems()
        .map(|e| path_of(diagram, e).expect("element of a valid quad"));
    // Each vertex is the meeting point of two of the four paths.
    let mut vertices = Vec::with_capacity(6);
    for a in 0..4 {
        for b in a + 1..4 {
            let meet: Vec<Pair> = paths[a]
                .vertices
                .iter()
                .filter(|v| paths[b].vertices.contains(v))
                .copied()
                .collect();
            debug_assert_eq!(meet.len(), 1);
            vertices.push(meet[0]);
        }
    }
    vertices.sort();
    let vertices: [Pair; 6] = vertices.try_into().expect("six meeting points");

    let hs = h.elems();
    let mut edges = Vec::new();
    for &v in &vertices {
        for t in 0..3 {
            let (from, to) = (hs[t], hs[t + 1]);
            if !v.contains(from) || v.contains(to) {
                continue;
            }
            let target = v.substitute(from, to).expect("from in v, to not in v");
            let keep = v.partner(from).expect("from in v");
            let ambient = (from..to)
                .map(|k| Edge {
                    from: Pair::oriented(k, keep).expect("keep outside [from, to)").0,
                    to: Pair::oriented(k + 1, keep).expect("keep outside (from, to]").0,
                    label: k,
                })
                .collect();
            edges.push(SquareEdge {
                from: v,
                to: target,
                label: t + 1,
                ambient,
            });
        }
    }
    Ok(ElementarySquare {
        h,
        vertices,
        pairings: pair_partitions(h),
        edges,
    })
}

/// `g` read as `C(n,2)` copies of the weight diagram: copy `outer` carries
/// the row `g_{outer, ·}` on its vertices.
struct DescartesSquare<'a> {
    g: &'a SquareMatrix,
    n: usize,
}

impl DescartesSquare<'_> {
    fn value(&self, outer: Pair, inner: Pair) -> &Scalar {
        self.g.get(outer.rank(self.n), inner.rank(self.n))
    }
}

/// Exterior number computed on the diagram: take the copies at `A` and `C`,
/// lay the elementary square of `H` on each, and add the signed products
/// across every complementary pairing in both orientations.
pub fn diagram_exterior_number(g: &SquareMatrix, a: Pair, c: Pair, h: Quad) -> Result<Scalar, SchemeError> {
    let n = match g.indexing() {
        Indexing::Wedge { m: 2, n } => n,
        other => return Err(SchemeError::NotWedge2(other)),
    };
    for p in [a, c] {
        Pair::new(p.lo(), p.hi(), n)?;
    }
    Quad::new(h.elems(), n)?;
    let square = DescartesSquare { g, n };
    let ring = g.ring();
    let mut acc = Scalar::zero(ring);
    for part in pair_partitions(h) {
        let both = &(square.value(a, part.b) * square.value(c, part.d))
            + &(square.value(a, part.d) * square.value(c, part.b));
        acc = if part.sign > 0 { &acc + &both } else { &acc - &both };
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Dot,
    Svg,
}

impl FromStr for Format {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascii" => Ok(Format::Ascii),
            "dot" => Ok(Format::Dot),
            "svg" => Ok(Format::Svg),
            other => Err(DiagramError::UnsupportedFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Highlights {
    pub paths: Vec<usize>,
    pub square: Option<Quad>,
    /// Annotate the square's pairings with their signs.
    pub signs: bool,
}

struct Marked {
    vertices: Vec<Pair>,
    edges: Vec<Edge>,
    paths: Vec<DiagramPath>,
    square: Option<ElementarySquare>,
}

fn collect_marks(d: &WeightDiagram, hl: &Highlights) -> Result<Marked, DiagramError> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut paths = Vec::new();
    for &i in &hl.paths {
        let p = path_of(d, i)?;
        vertices.extend(p.vertices.iter().copied());
        for run in p.segments(d) {
            for w in run.windows(2) {
                edges.extend(d.edges.iter().filter(|e| {
                    (e.from == w[0] && e.to == w[1]) || (e.from == w[1] && e.to == w[0])
                }));
            }
        }
        paths.push(p);
    }
    let square = hl.square.map(|h| elementary_square(d, h)).transpose()?;
    if let Some(sq) = &square {
        vertices.extend(sq.vertices);
        for e in &sq.edges {
            edges.extend(e.ambient.iter().copied());
        }
    }
    vertices.sort();
    vertices.dedup();
    edges.sort();
    edges.dedup();
    Ok(Marked {
        vertices,
        edges,
        paths,
        square,
    })
}

fn sign_char(s: i8) -> char {
    if s > 0 {
        '+'
    } else {
        '-'
    }
}

fn legend(d: &WeightDiagram, m: &Marked, signs: bool) -> Vec<String> {
    let n = d.n;
    let mut out = Vec::new();
    for p in &m.paths {
        let labels: Vec<String> = p.vertices.iter().map(|v| v.label(n)).collect();
        out.push(format!("path {}: {}", p.anchor, labels.join(" ")));
    }
    if let Some(sq) = &m.square {
        let labels: Vec<String> = sq.vertices.iter().map(|v| v.label(n)).collect();
        out.push(format!("square {}: {}", sq.h.label(n), labels.join(" ")));
        if signs {
            for part in sq.pairings {
                out.push(format!("  {}|{} {}", part.b.label(n), part.d.label(n), sign_char(part.sign)));
            }
        }
    }
    out
}

/// Row `j − i` from the top down, horizontal slot `i + j − 3`.
fn slot(p: Pair) -> (usize, usize) {
    (p.hi() - p.lo(), p.lo() + p.hi() - 3)
}

fn render_ascii(d: &WeightDiagram, m: &Marked, signs: bool) -> String {
    let n = d.n;
    let label_w = d.vertices.iter().map(|v| v.label(n).len()).max().unwrap_or(1);
    let marking = !m.vertices.is_empty();
    let field = if marking { label_w + 2 } else { label_w };
    let step = field + 1;
    let width = (2 * n - 3) * step;
    let mut lines = Vec::new();
    for row in (1..n).rev() {
        let mut text = vec![' '; width];
        let mut links = vec![' '; width];
        for &v in d.vertices.iter().filter(|v| slot(**v).0 == row) {
            let x = slot(v).1;
            let label = v.label(n);
            let cell = if !marking {
                label
            } else if m.vertices.contains(&v) {
                format!("[{label:^label_w$}]")
            } else {
                format!(" {label:^label_w$} ")
            };
            for (k, ch) in cell.chars().enumerate() {
                text[x * step + k] = ch;
            }
            if row > 1 {
                // Down-left to (i, j−1), down-right to (i+1, j).
                links[x * step - 1] = '/';
                links[x * step + field] = '\\';
            }
        }
        lines.push(text.into_iter().collect::<String>().trim_end().to_string());
        if row > 1 {
            lines.push(links.into_iter().collect::<String>().trim_end().to_string());
        }
    }
    lines.extend(legend(d, m, signs));
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn render_dot(d: &WeightDiagram, m: &Marked, signs: bool) -> String {
    let n = d.n;
    let mut out = String::new();
    let _ = writeln!(out, "graph weight_diagram_{n} {{");
    if signs {
        if let Some(sq) = &m.square {
            let parts: Vec<String> = sq
                .pairings
                .iter()
                .map(|p| format!("{}|{} {}", p.b.label(n), p.d.label(n), sign_char(p.sign)))
                .collect();
            let _ = writeln!(out, "  label=\"{}\";", parts.join(", "));
        }
    }
    for v in &d.vertices {
        let style = if m.vertices.contains(v) {
            " [style=filled, fillcolor=lightgray]"
        } else {
            ""
        };
        let _ = writeln!(out, "  \"{}\"{style};", v.label(n));
    }
    for e in &d.edges {
        let style = if m.edges.contains(e) { ", penwidth=2" } else { "" };
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\" [label=\"{}\"{style}];",
            e.from.label(n),
            e.to.label(n),
            e.label
        );
    }
    out.push_str("}\n");
    out
}

fn render_svg(d: &WeightDiagram, m: &Marked, signs: bool) -> String {
    const STEP: usize = 40;
    const MARGIN: usize = 30;
    let n = d.n;
    let pos = |p: Pair| {
        let (row, x) = slot(p);
        (MARGIN + x * STEP, MARGIN + (n - 1 - row) * STEP)
    };
    let notes = legend(d, m, signs);
    let width = 2 * MARGIN + (2 * n - 4) * STEP;
    let height = 2 * MARGIN + (n - 2) * STEP + notes.len() * 16;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"monospace\" font-size=\"11\">"
    );
    for e in &d.edges {
        let ((x1, y1), (x2, y2)) = (pos(e.from), pos(e.to));
        let w = if m.edges.contains(e) { 3 } else { 1 };
        let _ = writeln!(
            out,
            "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"black\" stroke-width=\"{w}\"><title>{}</title></line>",
            e.label
        );
    }
    for &v in &d.vertices {
        let (x, y) = pos(v);
        let fill = if m.vertices.contains(&v) { "lightgray" } else { "white" };
        let _ = writeln!(
            out,
            "  <circle cx=\"{x}\" cy=\"{y}\" r=\"13\" fill=\"{fill}\" stroke=\"black\"/>"
        );
        let _ = writeln!(
            out,
            "  <text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            y + 4,
            v.label(n)
        );
    }
    let base = MARGIN + (n - 2) * STEP + 24;
    for (k, line) in notes.iter().enumerate() {
        let _ = writeln!(out, "  <text x=\"{MARGIN}\" y=\"{}\">{line}</text>", base + k * 16);
    }
    out.push_str("</svg>\n");
    out
}

pub fn render(d: &WeightDiagram, format: Format, hl: &Highlights) -> Result<String, DiagramError> {
    let marks = collect_marks(d, hl)?;
    Ok(match format {
        Format::Ascii => render_ascii(d, &marks, hl.signs),
        Format::Dot => render_dot(d, &marks, hl.signs),
        Format::Svg => render_svg(d, &marks, hl.signs),
    })
}
