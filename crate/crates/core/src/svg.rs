//! SVG register view: vertex disks of radius `D_adj / 2`, edges from the
//! adjacency matrix, and the register boundary.
//!
//! Two disks intersect exactly when their centres are within `D_adj`, so a
//! valid embedding shows intersecting disks on edges and nowhere else. Pairs
//! where geometry and adjacency disagree are drawn in the mismatch style and
//! returned. 3D embeddings are projected onto the xy plane.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::feasibility::{DomainParams, Embedding};
use crate::graph::{pairs, Graph};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgRender {
    pub svg: String,
    /// Pairs whose disk intersection disagrees with adjacency.
    pub mismatches: Vec<(usize, usize)>,
}

pub fn render_register(g: &Graph, emb: &Embedding, params: &DomainParams) -> Result<SvgRender> {
    if emb.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            actual: emb.n(),
        });
    }
    let r = params.d_adj / 2.0;
    let extent = params.l + r + 2.0;
    let mut svg = String::new();
    let mut mismatches = Vec::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x} {x} {w} {w}" width="800" height="800">"#,
        x = -extent,
        w = 2.0 * extent
    );
    let _ = writeln!(
        svg,
        "<style>.disk{{fill:#4a90d9;fill-opacity:0.15;stroke:#4a90d9;stroke-width:0.15}}\
         .atom{{fill:#1f3b57}}.edge{{stroke:#333;stroke-width:0.3}}\
         .mismatch{{stroke:#d0021b;stroke-width:0.5;stroke-dasharray:1 0.5}}\
         .register{{fill:none;stroke:#999;stroke-width:0.2;stroke-dasharray:2 1}}</style>"
    );
    let _ = writeln!(svg, r#"<circle class="register" cx="0" cy="0" r="{}"/>"#, params.l);

    let xy = |i: usize| (emb.point(i)[0], emb.point(i)[1]);
    for (i, j) in pairs(g.n()) {
        let within = emb.squared_distance(i, j) <= params.d_adj * params.d_adj;
        let adjacent = g.is_adjacent(i, j);
        if within != adjacent {
            mismatches.push((i, j));
        }
        let ((x1, y1), (x2, y2)) = (xy(i), xy(j));
        if adjacent {
            let class = if within { "edge" } else { "edge mismatch" };
            let _ = writeln!(
                svg,
                r#"<line class="{class}" data-pair="{i}-{j}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#
            );
        } else if within {
            let _ = writeln!(
                svg,
                r#"<line class="mismatch" data-pair="{i}-{j}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#
            );
        }
    }
    for i in 0..g.n() {
        let (x, y) = xy(i);
        let _ = writeln!(svg, r#"<circle class="disk" data-vertex="{i}" cx="{x}" cy="{y}" r="{r}"/>"#);
        let _ = writeln!(svg, r#"<circle class="atom" cx="{x}" cy="{y}" r="0.6"/>"#);
    }
    svg.push_str("</svg>\n");
    Ok(SvgRender { svg, mismatches })
}
