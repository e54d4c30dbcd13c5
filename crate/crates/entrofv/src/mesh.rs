//! Primal polygonal meshes: generators, import/export and the admissibility
//! (orthogonality) / regularity checks needed by the two-point scheme.

use crate::geom::{
    circumcenter, dist_point_line, point_in_polygon, polygon_centroid, polygon_signed_area, Point,
};
use crate::tri_base::{BASE_TRI_CELLS, BASE_TRI_VERTICES};
use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

/// Classification of a mesh edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Interior,
    Dirichlet,
    Neumann,
}

/// Tag assigned to boundary edges (by a predicate on the edge midpoint).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub vertices: Vec<usize>,
    /// Scheme point `x_K` (circumcenter for the triangular family, centroid
    /// otherwise); always inside the closed cell.
    pub center: Point,
    pub area: f64,
    /// Edge ids incident to this cell.
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub vertices: [usize; 2],
    /// Adjacent cell(s): interior edges have two, boundary edges one.
    pub cells: (usize, Option<usize>),
    pub kind: EdgeKind,
    pub midpoint: Point,
    pub length: f64,
    /// Center distance: `|x_K − x_L|` for interior edges, distance from
    /// `x_K` to the supporting line for boundary edges.
    pub d_sigma: f64,
    /// Transmissibility `τ_σ = m_σ / d_σ`.
    pub tau: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.cells.1.is_none()
    }

    /// The cell on the other side of an interior edge.
    pub fn other_cell(&self, k: usize) -> Option<usize> {
        if self.cells.0 == k {
            self.cells.1
        } else {
            Some(self.cells.0)
        }
    }
}

/// An admissibility/regularity summary of a mesh.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub zeta: f64,
    pub size: f64,
    pub orthogonal: bool,
    pub n_cells: usize,
    pub n_interior_edges: usize,
    pub n_dirichlet_edges: usize,
    pub n_neumann_edges: usize,
    pub area: f64,
}

/// A polygonal mesh of a 2D domain with per-edge transmissibilities.
#[derive(Debug, Clone)]
pub struct PrimalMesh {
    pub vertices: Vec<Point>,
    pub cells: Vec<Cell>,
    pub edges: Vec<Edge>,
    /// Whether every interior edge passed the TPFA orthogonality check.
    pub orthogonal: bool,
    /// Mesh regularity `ζ = min_{K, σ∈E_K} dist(x_K, σ)/d_σ`.
    pub zeta: f64,
    /// `size(T)`: maximum cell diameter.
    pub size: f64,
}

/// Raw cell description used when assembling a mesh.
#[derive(Debug, Clone)]
pub struct CellSpec {
    pub vertices: Vec<usize>,
    /// Explicit scheme point; defaults to the polygon centroid.
    pub center: Option<Point>,
}

const ORTHO_TOL: f64 = 1e-9;

impl PrimalMesh {
    /// Assemble and validate a mesh from vertices, cell polygons and a
    /// boundary tag lookup (sorted vertex pair -> tag, default Neumann).
    pub fn build(
        vertices: Vec<Point>,
        specs: Vec<CellSpec>,
        boundary_tags: &HashMap<(usize, usize), BoundaryTag>,
    ) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let mut cells = Vec::with_capacity(specs.len());
        for (ci, spec) in specs.iter().enumerate() {
            if spec.vertices.len() < 3 {
                return Err(Error::InvalidMesh(format!(
                    "cell {ci} has fewer than 3 vertices"
                )));
            }
            for &v in &spec.vertices {
                if v >= vertices.len() {
                    return Err(Error::InvalidMesh(format!(
                        "cell {ci} references missing vertex {v}"
                    )));
                }
            }
            let pts: Vec<Point> = spec.vertices.iter().map(|&v| vertices[v]).collect();
            let area = polygon_signed_area(&pts);
            if area <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "cell {ci} is degenerate or not counterclockwise (signed area {area:.3e})"
                )));
            }
            let center = spec.center.unwrap_or_else(|| polygon_centroid(&pts));
            if !point_in_polygon(center, &pts, 1e-9) {
                return Err(Error::InvalidMesh(format!(
                    "center of cell {ci} lies outside the cell"
                )));
            }
            cells.push(Cell {
                vertices: spec.vertices.clone(),
                center,
                area,
                edges: Vec::new(),
            });
        }

        // Edge extraction: cells are traversed in order so edge ids are
        // deterministic.
        let mut edge_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        for ci in 0..cells.len() {
            let nv = cells[ci].vertices.len();
            for k in 0..nv {
                let a = cells[ci].vertices[k];
                let b = cells[ci].vertices[(k + 1) % nv];
                let key = (a.min(b), a.max(b));
                match edge_of.get(&key) {
                    Some(&eid) => {
                        if edges[eid].cells.1.is_some() {
                            return Err(Error::InvalidMesh(format!(
                                "edge {a}-{b} shared by more than two cells"
                            )));
                        }
                        edges[eid].cells.1 = Some(ci);
                        edges[eid].kind = EdgeKind::Interior;
                        cells[ci].edges.push(eid);
                    }
                    None => {
                        let eid = edges.len();
                        edge_of.insert(key, eid);
                        let (pa, pb) = (vertices[a], vertices[b]);
                        edges.push(Edge {
                            vertices: [a, b],
                            cells: (ci, None),
                            kind: EdgeKind::Neumann, // provisional for boundary
                            midpoint: 0.5 * (pa + pb),
                            length: (pb - pa).norm(),
                            d_sigma: 0.0,
                            tau: 0.0,
                        });
                        cells[ci].edges.push(eid);
                    }
                }
            }
        }

        // Per-edge geometry, boundary tagging, validity checks.
        let mut orthogonal = true;
        for e in edges.iter_mut() {
            let (pa, pb) = (vertices[e.vertices[0]], vertices[e.vertices[1]]);
            let t = (pb - pa) / e.length;
            match e.cells.1 {
                Some(cl) => {
                    let (xk, xl) = (cells[e.cells.0].center, cells[cl].center);
                    e.d_sigma = (xl - xk).norm();
                    if e.d_sigma <= 0.0 {
                        return Err(Error::InvalidMesh(format!(
                            "coincident centers across edge {:?}",
                            e.vertices
                        )));
                    }
                    let sk = t.perp(&(xk - pa));
                    let sl = t.perp(&(xl - pa));
                    if sk * sl >= 0.0 {
                        return Err(Error::InvalidMesh(format!(
                            "cell centers on the same side of edge {:?}",
                            e.vertices
                        )));
                    }
                    if ((xl - xk).dot(&t)).abs() > ORTHO_TOL * e.d_sigma {
                        orthogonal = false;
                    }
                }
                None => {
                    let tag = boundary_tags
                        .get(&(
                            e.vertices[0].min(e.vertices[1]),
                            e.vertices[0].max(e.vertices[1]),
                        ))
                        .copied()
                        .unwrap_or(BoundaryTag::Neumann);
                    e.kind = match tag {
                        BoundaryTag::Dirichlet => EdgeKind::Dirichlet,
                        BoundaryTag::Neumann => EdgeKind::Neumann,
                    };
                    let xk = cells[e.cells.0].center;
                    e.d_sigma = dist_point_line(xk, pa, pb);
                    if e.d_sigma <= 0.0 {
                        return Err(Error::InvalidMesh(format!(
                            "cell center on boundary edge {:?}",
                            e.vertices
                        )));
                    }
                }
            }
            e.tau = e.length / e.d_sigma;
        }

        // Regularity ζ and mesh size.
        let mut zeta = f64::INFINITY;
        let mut size: f64 = 0.0;
        for cell in &cells {
            for i in 0..cell.vertices.len() {
                for j in (i + 1)..cell.vertices.len() {
                    size = size.max((vertices[cell.vertices[i]] - vertices[cell.vertices[j]]).norm());
                }
            }
        }
        for (ci, cell) in cells.iter().enumerate() {
            for &eid in &cell.edges {
                let e = &edges[eid];
                let (pa, pb) = (vertices[e.vertices[0]], vertices[e.vertices[1]]);
                let d = dist_point_line(cell.center, pa, pb);
                if d <= 0.0 {
                    return Err(Error::InvalidMesh(format!(
                        "center of cell {ci} lies on edge {:?}",
                        e.vertices
                    )));
                }
                zeta = zeta.min(d / e.d_sigma);
            }
        }

        Ok(PrimalMesh {
            vertices,
            cells,
            edges,
            orthogonal,
            zeta,
            size,
        })
    }

    /// Total mesh area.
    pub fn area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    pub fn regularity_report(&self) -> RegularityReport {
        let mut n_int = 0;
        let mut n_dir = 0;
        let mut n_neu = 0;
        for e in &self.edges {
            match e.kind {
                EdgeKind::Interior => n_int += 1,
                EdgeKind::Dirichlet => n_dir += 1,
                EdgeKind::Neumann => n_neu += 1,
            }
        }
        RegularityReport {
            zeta: self.zeta,
            size: self.size,
            orthogonal: self.orthogonal,
            n_cells: self.cells.len(),
            n_interior_edges: n_int,
            n_dirichlet_edges: n_dir,
            n_neumann_edges: n_neu,
            area: self.area(),
        }
    }

    /// Re-tag boundary edges with a predicate on the edge midpoint.
    pub fn set_boundary_tags(&mut self, tag: impl Fn(Point) -> BoundaryTag) {
        for e in self.edges.iter_mut() {
            if e.is_boundary() {
                e.kind = match tag(e.midpoint) {
                    BoundaryTag::Dirichlet => EdgeKind::Dirichlet,
                    BoundaryTag::Neumann => EdgeKind::Neumann,
                };
            }
        }
    }

    /// Uniform rectangular mesh of `[x0,x1]×[y0,y1]`, centers at centroids.
    pub fn generate_cartesian(nx: usize, ny: usize, rect: [f64; 4]) -> Result<Self> {
        let [x0, x1, y0, y1] = rect;
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("nx, ny must be ≥ 1".into()));
        }
        if x1 <= x0 || y1 <= y0 {
            return Err(Error::InvalidArgument("degenerate rectangle".into()));
        }
        let (hx, hy) = ((x1 - x0) / nx as f64, (y1 - y0) / ny as f64);
        let vid = |i: usize, j: usize| i * (ny + 1) + j;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for i in 0..=nx {
            for j in 0..=ny {
                vertices.push(Point::new(x0 + i as f64 * hx, y0 + j as f64 * hy));
            }
        }
        let mut specs = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                specs.push(CellSpec {
                    vertices: vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)],
                    center: None,
                });
            }
        }
        Self::build(vertices, specs, &HashMap::new())
    }

    /// Structured triangular family on the unit square: the hardcoded acute
    /// coarsest mesh (h = 0.25) refined `level` times by midpoint
    /// subdivision; centers at circumcenters so the mesh is admissible.
    pub fn generate_triangular(level: usize) -> Result<Self> {
        let mut verts: Vec<Point> = BASE_TRI_VERTICES
            .iter()
            .map(|v| Point::new(v[0], v[1]))
            .collect();
        let mut tris: Vec<[usize; 3]> = BASE_TRI_CELLS.to_vec();
        for _ in 0..level {
            let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(4 * tris.len());
            for t in &tris {
                let mut m = [0usize; 3];
                for k in 0..3 {
                    let (a, b) = (t[k], t[(k + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    m[k] = *midpoint.entry(key).or_insert_with(|| {
                        verts.push(0.5 * (verts[a] + verts[b]));
                        verts.len() - 1
                    });
                }
                next.push([t[0], m[0], m[2]]);
                next.push([m[0], t[1], m[1]]);
                next.push([m[2], m[1], t[2]]);
                next.push([m[0], m[1], m[2]]);
            }
            tris = next;
        }
        let specs = tris
            .iter()
            .map(|t| CellSpec {
                vertices: t.to_vec(),
                center: Some(circumcenter(verts[t[0]], verts[t[1]], verts[t[2]])),
            })
            .collect();
        Self::build(verts, specs, &HashMap::new())
    }

    /// n×n quadrilateral mesh of the unit square with interior vertices
    /// displaced smoothly (both coordinates by
    /// `a·h·sin(2πx₁)sin(2πx₂)`); generally not TPFA-admissible, intended
    /// for the DDFV scheme.
    pub fn generate_distorted_quad(n: usize, amplitude: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("n must be ≥ 2".into()));
        }
        if !(0.0..0.5).contains(&amplitude) {
            return Err(Error::InvalidArgument(
                "amplitude must lie in [0, 0.5) to keep cells valid".into(),
            ));
        }
        let h = 1.0 / n as f64;
        let vid = |i: usize, j: usize| i * (n + 1) + j;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..=n {
            for j in 0..=n {
                let (x, y) = (i as f64 * h, j as f64 * h);
                let d = if i > 0 && i < n && j > 0 && j < n {
                    amplitude
                        * h
                        * (2.0 * std::f64::consts::PI * x).sin()
                        * (2.0 * std::f64::consts::PI * y).sin()
                } else {
                    0.0
                };
                vertices.push(Point::new(x + d, y + d));
            }
        }
        let mut specs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                specs.push(CellSpec {
                    vertices: vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)],
                    center: None,
                });
            }
        }
        Self::build(vertices, specs, &HashMap::new())
    }

    /// Parse the plain-text mesh format (see [`PrimalMesh::export_string`]).
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens: Vec<(usize, &str)> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("");
            for tok in content.split_whitespace() {
                tokens.push((ln + 1, tok));
            }
        }
        struct Cursor<'a> {
            tokens: &'a [(usize, &'a str)],
            pos: usize,
        }
        impl<'a> Cursor<'a> {
            fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
                let t = self
                    .tokens
                    .get(self.pos)
                    .copied()
                    .ok_or_else(|| Error::MeshParse {
                        line: self.tokens.last().map_or(0, |t| t.0),
                        msg: format!("unexpected end of file, expected {what}"),
                    })?;
                self.pos += 1;
                Ok(t)
            }
            fn peek(&self) -> Option<&'a str> {
                self.tokens.get(self.pos).map(|t| t.1)
            }
        }
        let mut cur = Cursor {
            tokens: &tokens,
            pos: 0,
        };
        let parse_usize = |(line, tok): (usize, &str)| -> Result<usize> {
            tok.parse().map_err(|_| Error::MeshParse {
                line,
                msg: format!("expected integer, got '{tok}'"),
            })
        };
        let parse_f64 = |(line, tok): (usize, &str)| -> Result<f64> {
            tok.parse().map_err(|_| Error::MeshParse {
                line,
                msg: format!("expected number, got '{tok}'"),
            })
        };

        let magic = cur.next("header")?;
        if magic.1 != "fvmesh" {
            return Err(Error::MeshParse {
                line: magic.0,
                msg: format!("expected 'fvmesh' header, got '{}'", magic.1),
            });
        }
        let ver = cur.next("format version")?;
        if ver.1 != "1" {
            return Err(Error::MeshParse {
                line: ver.0,
                msg: format!("unsupported format version '{}'", ver.1),
            });
        }

        let kw = cur.next("'vertices'")?;
        if kw.1 != "vertices" {
            return Err(Error::MeshParse {
                line: kw.0,
                msg: format!("expected 'vertices', got '{}'", kw.1),
            });
        }
        let nv = parse_usize(cur.next("vertex count")?)?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let x = parse_f64(cur.next("x")?)?;
            let y = parse_f64(cur.next("y")?)?;
            vertices.push(Point::new(x, y));
        }

        let kw = cur.next("'cells'")?;
        if kw.1 != "cells" {
            return Err(Error::MeshParse {
                line: kw.0,
                msg: format!("expected 'cells', got '{}'", kw.1),
            });
        }
        let nc = parse_usize(cur.next("cell count")?)?;
        let mut specs = Vec::with_capacity(nc);
        for _ in 0..nc {
            let k = parse_usize(cur.next("cell vertex count")?)?;
            let mut cv = Vec::with_capacity(k);
            for _ in 0..k {
                cv.push(parse_usize(cur.next("vertex id")?)?);
            }
            // Optional explicit center: present when the next token is not a
            // keyword/count (i.e. parses as float but not as a section start).
            let center = if let Some(tok) = cur.peek() {
                if tok != "boundary" && tok.contains('.') {
                    let cx = parse_f64(cur.next("cx")?)?;
                    let cy = parse_f64(cur.next("cy")?)?;
                    Some(Point::new(cx, cy))
                } else {
                    None
                }
            } else {
                None
            };
            specs.push(CellSpec {
                vertices: cv,
                center,
            });
        }

        let mut tags = HashMap::new();
        if let Some(tok) = cur.peek() {
            if tok == "boundary" {
                cur.pos += 1;
                let nb = parse_usize(cur.next("boundary count")?)?;
                for _ in 0..nb {
                    let a = parse_usize(cur.next("v1")?)?;
                    let b = parse_usize(cur.next("v2")?)?;
                    let t = cur.next("tag")?;
                    let tag = match t.1 {
                        "dirichlet" => BoundaryTag::Dirichlet,
                        "neumann" => BoundaryTag::Neumann,
                        other => {
                            return Err(Error::MeshParse {
                                line: t.0,
                                msg: format!("unknown boundary tag '{other}'"),
                            })
                        }
                    };
                    tags.insert((a.min(b), a.max(b)), tag);
                }
            }
        }
        Self::build(vertices, specs, &tags)
    }

    /// Read a mesh file.
    pub fn import(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serialize to the plain-text format:
    /// `fvmesh 1`, a `vertices N` block of `x y` lines, a `cells M` block of
    /// `k v1 ... vk cx cy` lines (explicit centers), and a `boundary B`
    /// block of `v1 v2 tag` lines. `#` starts a comment.
    pub fn export_string(&self) -> String {
        let mut s = String::new();
        s.push_str("fvmesh 1\n");
        writeln!(s, "vertices {}", self.vertices.len()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{:.17} {:.17}", v.x, v.y).unwrap();
        }
        writeln!(s, "cells {}", self.cells.len()).unwrap();
        for c in &self.cells {
            write!(s, "{}", c.vertices.len()).unwrap();
            for &v in &c.vertices {
                write!(s, " {v}").unwrap();
            }
            writeln!(s, " {:.17} {:.17}", c.center.x, c.center.y).unwrap();
        }
        let nb = self.edges.iter().filter(|e| e.is_boundary()).count();
        writeln!(s, "boundary {nb}").unwrap();
        for e in &self.edges {
            if e.is_boundary() {
                let tag = match e.kind {
                    EdgeKind::Dirichlet => "dirichlet",
                    _ => "neumann",
                };
                writeln!(s, "{} {} {tag}", e.vertices[0], e.vertices[1]).unwrap();
            }
        }
        s
    }

    /// Write the mesh to a file.
    pub fn export(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.export_string())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cartesian_4x4() {
        let m = PrimalMesh::generate_cartesian(4, 4, [0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.cells.len(), 16);
        assert_eq!(m.edges.len(), 40);
        assert_relative_eq!(m.area(), 1.0, max_relative = 1e-12);
        for e in &m.edges {
            if !e.is_boundary() {
                assert_relative_eq!(e.tau, 1.0, max_relative = 1e-12);
            }
        }
        assert!(m.orthogonal);
        assert_relative_eq!(m.zeta, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn cartesian_trivial_sizes() {
        let m = PrimalMesh::generate_cartesian(1, 1, [0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.cells.len(), 1);
        assert_eq!(m.edges.len(), 4);
        assert!(m.edges.iter().all(|e| e.is_boundary()));
        assert_relative_eq!(m.zeta, 1.0, max_relative = 1e-12);

        let m = PrimalMesh::generate_cartesian(2, 1, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let e = m.edges.iter().find(|e| !e.is_boundary()).unwrap();
        assert_relative_eq!(e.tau, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn triangular_family() {
        let m0 = PrimalMesh::generate_triangular(0).unwrap();
        assert!(m0.size <= 0.25 + 1e-12);
        assert!(m0.orthogonal);
        assert!(m0.zeta > 0.0);
        assert_relative_eq!(m0.area(), 1.0, max_relative = 1e-10);

        let m1 = PrimalMesh::generate_triangular(1).unwrap();
        assert_eq!(m1.cells.len(), 4 * m0.cells.len());
        assert!(m1.orthogonal);
        assert_relative_eq!(m1.size, 0.5 * m0.size, max_relative = 1e-12);
    }

    #[test]
    fn distorted_quad_valid() {
        let m = PrimalMesh::generate_distorted_quad(8, 0.3).unwrap();
        assert!(m.cells.iter().all(|c| c.area > 0.0));
        assert_relative_eq!(m.area(), 1.0, max_relative = 1e-10);
        let m0 = PrimalMesh::generate_distorted_quad(8, 0.0).unwrap();
        let c = PrimalMesh::generate_cartesian(8, 8, [0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(m0.cells.len(), c.cells.len());
        for (a, b) in m0.cells.iter().zip(c.cells.iter()) {
            assert_relative_eq!(a.area, b.area, max_relative = 1e-12);
        }
    }

    #[test]
    fn roundtrip_identity() {
        let mut m = PrimalMesh::generate_cartesian(2, 2, [0.0, 1.0, 0.0, 1.0]).unwrap();
        m.set_boundary_tags(|p| {
            if p.x < 1e-12 || p.x > 1.0 - 1e-12 {
                BoundaryTag::Dirichlet
            } else {
                BoundaryTag::Neumann
            }
        });
        let text = m.export_string();
        let m2 = PrimalMesh::parse(&text).unwrap();
        assert_eq!(m2.export_string(), text);
        assert_eq!(m2.cells.len(), m.cells.len());
        assert_eq!(
            m2.edges.iter().filter(|e| e.kind == EdgeKind::Dirichlet).count(),
            4
        );
    }

    #[test]
    fn parse_errors_have_line_numbers() {
        let bad = "fvmesh 1\nvertices 1\n0.0 0.0\ncells 1\n3 0 1 2\n";
        match PrimalMesh::parse(bad) {
            Err(Error::InvalidMesh(msg)) => assert!(msg.contains("missing vertex")),
            other => panic!("expected topology error, got {other:?}"),
        }
        let bad2 = "fvmesh 2\n";
        match PrimalMesh::parse(bad2) {
            Err(Error::MeshParse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn single_cell_import() {
        let text = "fvmesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ncells 1\n4 0 1 2 3\n";
        let m = PrimalMesh::parse(text).unwrap();
        assert_relative_eq!(m.cells[0].area, 1.0);
        assert_eq!(m.edges.len(), 4);
        assert!(m.edges.iter().all(|e| e.kind == EdgeKind::Neumann));
    }
}
