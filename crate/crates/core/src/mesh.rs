//! Regular T-meshes over exact rational coordinates.
//!
//! A mesh is stored on its fine grid: the sorted distinct x and y
//! coordinates of all cell edges. Every fine cell maps to the mesh cell that
//! contains it and every fine edge piece records whether it lies on a cell
//! boundary. Vertices, minimal segments and l-edges are derived from that.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, serde_rational, Point, Rational};

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    #[serde(with = "serde_rational")]
    pub x0: Rational,
    #[serde(with = "serde_rational")]
    pub x1: Rational,
    #[serde(with = "serde_rational")]
    pub y0: Rational,
    #[serde(with = "serde_rational")]
    pub y1: Rational,
}

impl Rect {
    pub fn new(x0: Rational, x1: Rational, y0: Rational, y1: Rational) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> Rational {
        &self.x1 - &self.x0
    }

    pub fn height(&self) -> Rational {
        &self.y1 - &self.y0
    }

    pub fn center(&self) -> Point {
        Point::new(
            crate::rational::midpoint(&self.x0, &self.x1),
            crate::rational::midpoint(&self.y0, &self.y1),
        )
    }

    /// Closed containment test.
    pub fn contains(&self, p: &Point) -> bool {
        self.x0 <= p.x && p.x <= self.x1 && self.y0 <= p.y && p.y <= self.y1
    }

    /// True when `other` lies inside `self` (closed).
    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.x0 <= other.x0 && other.x1 <= self.x1 && self.y0 <= other.y0 && other.y1 <= self.y1
    }

    fn sort_key(&self) -> (Rational, Rational, Rational, Rational) {
        (self.y0.clone(), self.x0.clone(), self.y1.clone(), self.x1.clone())
    }
}

impl fmt::Debug for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}]x[{},{}]",
            format_rational(&self.x0),
            format_rational(&self.x1),
            format_rational(&self.y0),
            format_rational(&self.y1)
        )
    }
}

/// A horizontal line piece `y = y, x ∈ [x0, x1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HLine {
    #[serde(with = "serde_rational")]
    pub y: Rational,
    #[serde(with = "serde_rational")]
    pub x0: Rational,
    #[serde(with = "serde_rational")]
    pub x1: Rational,
}

/// A vertical line piece `x = x, y ∈ [y0, y1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VLine {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y0: Rational,
    #[serde(with = "serde_rational")]
    pub y1: Rational,
}

/// Mesh construction failures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeshError {
    #[error("cells do not tile a rectangle: {0}")]
    NotRegular(String),
    #[error("cells overlap: {0}")]
    Overlap(String),
    #[error("segment does not lie on a cell boundary: {0}")]
    DanglingSegment(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("extension degrees must be at least 1 (got m={m}, n={n})")]
    InvalidDegree { m: usize, n: usize },
    #[error("extension margin must be positive")]
    InvalidMargin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    H,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexClass {
    /// Interior vertex with four incident segments.
    Crossing,
    /// Interior vertex missing its left or right segment (endpoint of a horizontal l-edge).
    HTee,
    /// Interior vertex missing its upper or lower segment (endpoint of a vertical l-edge).
    VTee,
    /// Boundary vertex other than a corner.
    Boundary,
    Corner,
}

/// Direction index used for vertex neighbour tables.
pub const EAST: usize = 0;
pub const NORTH: usize = 1;
pub const WEST: usize = 2;
pub const SOUTH: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub point: Point,
    pub class: VertexClass,
    /// Fine-grid indices.
    pub gi: usize,
    pub gj: usize,
    /// Adjacent vertex along a segment in each direction (E, N, W, S).
    pub nbr: [Option<usize>; 4],
}

impl Vertex {
    pub fn is_interior(&self) -> bool {
        !matches!(self.class, VertexClass::Boundary | VertexClass::Corner)
    }
}

/// Minimal edge segment between two consecutive collinear vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub orientation: Orientation,
    /// Fine index of the carrying line.
    pub line: usize,
    /// Fine indices of the running-coordinate range.
    pub lo: usize,
    pub hi: usize,
    pub v0: usize,
    pub v1: usize,
    pub ledge: usize,
    pub interior: bool,
}

/// Maximal line segment made of collinear edge segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LEdge {
    pub orientation: Orientation,
    pub line_coord: Rational,
    pub lo: Rational,
    pub hi: Rational,
    pub is_boundary: bool,
    pub line_idx: usize,
    pub lo_idx: usize,
    pub hi_idx: usize,
    /// Segment indices (into the horizontal or vertical list) in increasing order.
    pub segments: Vec<usize>,
    /// Vertices along the l-edge in increasing order, endpoints included.
    pub vertices: Vec<usize>,
}

impl LEdge {
    pub fn endpoints(&self) -> [Point; 2] {
        match self.orientation {
            Orientation::H => [
                Point::new(self.lo.clone(), self.line_coord.clone()),
                Point::new(self.hi.clone(), self.line_coord.clone()),
            ],
            Orientation::V => [
                Point::new(self.line_coord.clone(), self.lo.clone()),
                Point::new(self.line_coord.clone(), self.hi.clone()),
            ],
        }
    }

    /// True when the running coordinate `t` lies in the closed span.
    pub fn spans(&self, t: &Rational) -> bool {
        &self.lo <= t && t <= &self.hi
    }
}

/// What lies on one side of a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Cell(usize),
    Outside,
}

impl Side {
    pub fn cell(self) -> Option<usize> {
        match self {
            Side::Cell(c) => Some(c),
            Side::Outside => None,
        }
    }
}

/// A segment with the cells below/left (`lower`) and above/right (`upper`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentSides {
    pub orientation: Orientation,
    pub segment: usize,
    pub lower: Side,
    pub upper: Side,
}

/// Combinatorial counts of a T-mesh.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshStats {
    /// Cells.
    pub f: usize,
    /// Interior vertices.
    pub v: usize,
    /// Crossing vertices.
    pub v_plus: usize,
    /// Interior T-vertices.
    pub v_t: usize,
    /// Boundary vertices, corners included.
    pub v_b: usize,
    /// Boundary vertices that are not corners.
    pub v_bt: usize,
    /// Interior horizontal edge segments.
    pub e_h: usize,
    /// Interior vertical edge segments.
    pub e_v: usize,
    /// Interior l-edges.
    pub e: usize,
    pub e_h_ledges: usize,
    pub e_v_ledges: usize,
}

/// A validated regular T-mesh.
#[derive(Clone)]
pub struct TMesh {
    xs: Vec<Rational>,
    ys: Vec<Rational>,
    cells: Vec<Rect>,
    /// Fine index ranges `(i0, i1, j0, j1)` per cell.
    cell_range: Vec<(usize, usize, usize, usize)>,
    fine: Vec<usize>,
    hpiece: Vec<bool>,
    vpiece: Vec<bool>,
    vertices: Vec<Vertex>,
    vertex_at: Vec<Option<usize>>,
    hsegs: Vec<Segment>,
    vsegs: Vec<Segment>,
    ledges: Vec<LEdge>,
    vertex_ledges: Vec<[Option<usize>; 2]>,
}

impl PartialEq for TMesh {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}

impl Eq for TMesh {}

impl fmt::Debug for TMesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TMesh").field("domain", &self.domain()).field("cells", &self.cells).finish()
    }
}

fn index_of(v: &[Rational], x: &Rational) -> usize {
    v.binary_search(x).expect("coordinate on the fine grid")
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl TMesh {
    /// Builds a mesh from a list of cells that must tile their bounding box.
    pub fn from_cells(cells: Vec<Rect>) -> Result<TMesh, MeshError> {
        if cells.is_empty() {
            return Err(MeshError::NotRegular("empty cell list".into()));
        }
        for c in &cells {
            if c.x0 >= c.x1 || c.y0 >= c.y1 {
                return Err(MeshError::Degenerate(format!("cell {c:?} has no area")));
            }
        }
        let xs: Vec<Rational> = cells
            .iter()
            .flat_map(|c| [c.x0.clone(), c.x1.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let ys: Vec<Rational> = cells
            .iter()
            .flat_map(|c| [c.y0.clone(), c.y1.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let (nx, ny) = (xs.len() - 1, ys.len() - 1);
        let mut cells = cells;
        cells.sort_by_key(Rect::sort_key);
        let mut fine = vec![usize::MAX; nx * ny];
        let mut cell_range = Vec::with_capacity(cells.len());
        for (k, c) in cells.iter().enumerate() {
            let (i0, i1) = (index_of(&xs, &c.x0), index_of(&xs, &c.x1));
            let (j0, j1) = (index_of(&ys, &c.y0), index_of(&ys, &c.y1));
            for j in j0..j1 {
                for i in i0..i1 {
                    let slot = &mut fine[j * nx + i];
                    if *slot != usize::MAX {
                        return Err(MeshError::Overlap(format!("{:?} and {c:?}", cells[*slot])));
                    }
                    *slot = k;
                }
            }
            cell_range.push((i0, i1, j0, j1));
        }
        if let Some(pos) = fine.iter().position(|&c| c == usize::MAX) {
            let (i, j) = (pos % nx, pos / nx);
            return Err(MeshError::NotRegular(format!(
                "gap at [{},{}]x[{},{}]",
                format_rational(&xs[i]),
                format_rational(&xs[i + 1]),
                format_rational(&ys[j]),
                format_rational(&ys[j + 1])
            )));
        }
        let mut hpiece = vec![false; (ny + 1) * nx];
        for j in 0..=ny {
            for i in 0..nx {
                hpiece[j * nx + i] = j == 0 || j == ny || fine[(j - 1) * nx + i] != fine[j * nx + i];
            }
        }
        let mut vpiece = vec![false; (nx + 1) * ny];
        for i in 0..=nx {
            for j in 0..ny {
                vpiece[i * ny + j] = i == 0 || i == nx || fine[j * nx + i - 1] != fine[j * nx + i];
            }
        }
        let mut mesh = TMesh {
            xs,
            ys,
            cells,
            cell_range,
            fine,
            hpiece,
            vpiece,
            vertices: Vec::new(),
            vertex_at: Vec::new(),
            hsegs: Vec::new(),
            vsegs: Vec::new(),
            ledges: Vec::new(),
            vertex_ledges: Vec::new(),
        };
        mesh.derive_topology();
        Ok(mesh)
    }

    /// Builds a mesh from its domain and interior line pieces. Boundary
    /// segments are implied by the domain; pieces along the boundary are allowed.
    pub fn from_segments(domain: &Rect, hs: &[HLine], vs: &[VLine]) -> Result<TMesh, MeshError> {
        if domain.x0 >= domain.x1 || domain.y0 >= domain.y1 {
            return Err(MeshError::Degenerate(format!("domain {domain:?} has no area")));
        }
        let mut xset: BTreeSet<Rational> = [domain.x0.clone(), domain.x1.clone()].into();
        let mut yset: BTreeSet<Rational> = [domain.y0.clone(), domain.y1.clone()].into();
        for h in hs {
            if h.x0 >= h.x1 {
                return Err(MeshError::Degenerate(format!("horizontal piece {h:?} has no length")));
            }
            if h.y < domain.y0 || h.y > domain.y1 || h.x0 < domain.x0 || h.x1 > domain.x1 {
                return Err(MeshError::DanglingSegment(format!("{h:?} leaves the domain")));
            }
            yset.insert(h.y.clone());
            xset.insert(h.x0.clone());
            xset.insert(h.x1.clone());
        }
        for v in vs {
            if v.y0 >= v.y1 {
                return Err(MeshError::Degenerate(format!("vertical piece {v:?} has no length")));
            }
            if v.x < domain.x0 || v.x > domain.x1 || v.y0 < domain.y0 || v.y1 > domain.y1 {
                return Err(MeshError::DanglingSegment(format!("{v:?} leaves the domain")));
            }
            xset.insert(v.x.clone());
            yset.insert(v.y0.clone());
            yset.insert(v.y1.clone());
        }
        let xs: Vec<Rational> = xset.into_iter().collect();
        let ys: Vec<Rational> = yset.into_iter().collect();
        let (nx, ny) = (xs.len() - 1, ys.len() - 1);
        let mut hcov = vec![false; (ny + 1) * nx];
        let mut vcov = vec![false; (nx + 1) * ny];
        for i in 0..nx {
            hcov[i] = true;
            hcov[ny * nx + i] = true;
        }
        for j in 0..ny {
            vcov[j] = true;
            vcov[nx * ny + j] = true;
        }
        for h in hs {
            let j = index_of(&ys, &h.y);
            for i in index_of(&xs, &h.x0)..index_of(&xs, &h.x1) {
                hcov[j * nx + i] = true;
            }
        }
        for v in vs {
            let i = index_of(&xs, &v.x);
            for j in index_of(&ys, &v.y0)..index_of(&ys, &v.y1) {
                vcov[i * ny + j] = true;
            }
        }
        let mut uf = UnionFind::new(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                if i + 1 < nx && !vcov[(i + 1) * ny + j] {
                    uf.union(j * nx + i, j * nx + i + 1);
                }
                if j + 1 < ny && !hcov[(j + 1) * nx + i] {
                    uf.union(j * nx + i, (j + 1) * nx + i);
                }
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                if hcov[j * nx + i] && uf.find((j - 1) * nx + i) == uf.find(j * nx + i) {
                    return Err(MeshError::DanglingSegment(format!(
                        "horizontal piece y={} x∈[{},{}] has the same cell on both sides",
                        format_rational(&ys[j]),
                        format_rational(&xs[i]),
                        format_rational(&xs[i + 1])
                    )));
                }
            }
        }
        for i in 1..nx {
            for j in 0..ny {
                if vcov[i * ny + j] && uf.find(j * nx + i - 1) == uf.find(j * nx + i) {
                    return Err(MeshError::DanglingSegment(format!(
                        "vertical piece x={} y∈[{},{}] has the same cell on both sides",
                        format_rational(&xs[i]),
                        format_rational(&ys[j]),
                        format_rational(&ys[j + 1])
                    )));
                }
            }
        }
        let mut bbox: std::collections::BTreeMap<usize, (usize, usize, usize, usize, usize)> =
            Default::default();
        for j in 0..ny {
            for i in 0..nx {
                let r = uf.find(j * nx + i);
                let e = bbox.entry(r).or_insert((i, i, j, j, 0));
                e.0 = e.0.min(i);
                e.1 = e.1.max(i);
                e.2 = e.2.min(j);
                e.3 = e.3.max(j);
                e.4 += 1;
            }
        }
        let mut cells = Vec::with_capacity(bbox.len());
        for (i0, i1, j0, j1, count) in bbox.into_values() {
            if (i1 - i0 + 1) * (j1 - j0 + 1) != count {
                return Err(MeshError::NotRegular(format!(
                    "region around [{},{}]x[{},{}] is not a rectangle",
                    format_rational(&xs[i0]),
                    format_rational(&xs[i1 + 1]),
                    format_rational(&ys[j0]),
                    format_rational(&ys[j1 + 1])
                )));
            }
            cells.push(Rect::new(xs[i0].clone(), xs[i1 + 1].clone(), ys[j0].clone(), ys[j1 + 1].clone()));
        }
        TMesh::from_cells(cells)
    }

    /// Tensor-product mesh over the given (strictly increasing) line coordinates.
    pub fn tensor(xs: &[Rational], ys: &[Rational]) -> Result<TMesh, MeshError> {
        if xs.len() < 2 || ys.len() < 2 {
            return Err(MeshError::Degenerate("tensor mesh needs two lines per direction".into()));
        }
        let mut cells = Vec::new();
        for j in 0..ys.len() - 1 {
            for i in 0..xs.len() - 1 {
                cells.push(Rect::new(xs[i].clone(), xs[i + 1].clone(), ys[j].clone(), ys[j + 1].clone()));
            }
        }
        TMesh::from_cells(cells)
    }

    fn hp(&self, j: usize, i: usize) -> bool {
        self.hpiece[j * self.nx() + i]
    }

    fn vp(&self, i: usize, j: usize) -> bool {
        self.vpiece[i * self.ny() + j]
    }

    fn derive_topology(&mut self) {
        let (nx, ny) = (self.nx(), self.ny());
        self.vertex_at = vec![None; (nx + 1) * (ny + 1)];
        for j in 0..=ny {
            for i in 0..=nx {
                let l = i > 0 && self.hp(j, i - 1);
                let r = i < nx && self.hp(j, i);
                let d = j > 0 && self.vp(i, j - 1);
                let u = j < ny && self.vp(i, j);
                if !((l || r) && (u || d)) {
                    continue;
                }
                let bx = i == 0 || i == nx;
                let by = j == 0 || j == ny;
                let class = if bx && by {
                    VertexClass::Corner
                } else if bx || by {
                    VertexClass::Boundary
                } else if l && r && u && d {
                    VertexClass::Crossing
                } else if l && r {
                    debug_assert!(u || d);
                    VertexClass::VTee
                } else {
                    debug_assert!(u && d, "interior vertex with two segments");
                    VertexClass::HTee
                };
                self.vertex_at[j * (nx + 1) + i] = Some(self.vertices.len());
                self.vertices.push(Vertex {
                    point: Point::new(self.xs[i].clone(), self.ys[j].clone()),
                    class,
                    gi: i,
                    gj: j,
                    nbr: [None; 4],
                });
            }
        }
        self.vertex_ledges = vec![[None; 2]; self.vertices.len()];
        for j in 0..=ny {
            self.scan_line(Orientation::H, j);
        }
        for i in 0..=nx {
            self.scan_line(Orientation::V, i);
        }
    }

    fn scan_line(&mut self, o: Orientation, line: usize) {
        let (len, last_line) = match o {
            Orientation::H => (self.nx(), self.ny()),
            Orientation::V => (self.ny(), self.nx()),
        };
        let covered = |m: &TMesh, k: usize| match o {
            Orientation::H => m.hp(line, k),
            Orientation::V => m.vp(line, k),
        };
        let vid = |m: &TMesh, k: usize| match o {
            Orientation::H => m.vertex_id(k, line),
            Orientation::V => m.vertex_id(line, k),
        };
        let is_boundary = line == 0 || line == last_line;
        let coords = match o {
            Orientation::H => (&self.ys, &self.xs),
            Orientation::V => (&self.xs, &self.ys),
        };
        let line_coord = coords.0[line].clone();
        let run_coords: Vec<Rational> = coords.1.clone();
        let mut k = 0;
        while k < len {
            if !covered(self, k) {
                k += 1;
                continue;
            }
            let start = k;
            while k < len && covered(self, k) {
                k += 1;
            }
            let end = k;
            let ledge_id = self.ledges.len();
            let mut verts = vec![vid(self, start).expect("l-edge start is a vertex")];
            let mut segs = Vec::new();
            let mut seg_start = start;
            for t in start + 1..=end {
                if let Some(v) = vid(self, t) {
                    let v0 = *verts.last().unwrap();
                    let seg = Segment {
                        orientation: o,
                        line,
                        lo: seg_start,
                        hi: t,
                        v0,
                        v1: v,
                        ledge: ledge_id,
                        interior: !is_boundary,
                    };
                    let (fwd, back) = match o {
                        Orientation::H => (EAST, WEST),
                        Orientation::V => (NORTH, SOUTH),
                    };
                    self.vertices[v0].nbr[fwd] = Some(v);
                    self.vertices[v].nbr[back] = Some(v0);
                    let list = match o {
                        Orientation::H => &mut self.hsegs,
                        Orientation::V => &mut self.vsegs,
                    };
                    segs.push(list.len());
                    list.push(seg);
                    verts.push(v);
                    seg_start = t;
                }
            }
            for &v in &verts {
                self.vertex_ledges[v][o as usize] = Some(ledge_id);
            }
            self.ledges.push(LEdge {
                orientation: o,
                line_coord: line_coord.clone(),
                lo: run_coords[start].clone(),
                hi: run_coords[end].clone(),
                is_boundary,
                line_idx: line,
                lo_idx: start,
                hi_idx: end,
                segments: segs,
                vertices: verts,
            });
        }
    }

    pub fn nx(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.ys.len() - 1
    }

    /// Fine-grid x coordinates (all distinct vertical line positions).
    pub fn xs(&self) -> &[Rational] {
        &self.xs
    }

    pub fn ys(&self) -> &[Rational] {
        &self.ys
    }

    pub fn domain(&self) -> Rect {
        Rect::new(
            self.xs[0].clone(),
            self.xs[self.nx()].clone(),
            self.ys[0].clone(),
            self.ys[self.ny()].clone(),
        )
    }

    /// Cells sorted by lower edge, then left edge.
    pub fn cells(&self) -> &[Rect] {
        &self.cells
    }

    pub fn cell_range(&self, c: usize) -> (usize, usize, usize, usize) {
        self.cell_range[c]
    }

    /// Cell owning the fine cell `(i, j)`.
    pub fn fine_cell(&self, i: usize, j: usize) -> usize {
        self.fine[j * self.nx() + i]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_id(&self, i: usize, j: usize) -> Option<usize> {
        self.vertex_at[j * (self.nx() + 1) + i]
    }

    /// Vertex located at `p`, if any.
    pub fn vertex_at_point(&self, p: &Point) -> Option<usize> {
        let i = self.xs.binary_search(&p.x).ok()?;
        let j = self.ys.binary_search(&p.y).ok()?;
        self.vertex_id(i, j)
    }

    /// Horizontal and vertical l-edges through a vertex.
    pub fn vertex_ledges(&self, v: usize) -> [Option<usize>; 2] {
        self.vertex_ledges[v]
    }

    pub fn hsegments(&self) -> &[Segment] {
        &self.hsegs
    }

    pub fn vsegments(&self) -> &[Segment] {
        &self.vsegs
    }

    pub fn segment(&self, o: Orientation, s: usize) -> &Segment {
        match o {
            Orientation::H => &self.hsegs[s],
            Orientation::V => &self.vsegs[s],
        }
    }

    /// All l-edges, boundary ones included.
    pub fn ledges(&self) -> &[LEdge] {
        &self.ledges
    }

    /// Indices of interior l-edges.
    pub fn interior_ledges(&self) -> Vec<usize> {
        (0..self.ledges.len()).filter(|&k| !self.ledges[k].is_boundary).collect()
    }

    /// L-edges on the given line, sorted by position.
    pub fn ledges_on_line(&self, o: Orientation, coord: &Rational) -> Vec<usize> {
        (0..self.ledges.len())
            .filter(|&k| self.ledges[k].orientation == o && &self.ledges[k].line_coord == coord)
            .collect()
    }

    /// The l-edge on line `coord` whose span contains `[lo, hi]`.
    pub fn ledge_covering(&self, o: Orientation, coord: &Rational, lo: &Rational, hi: &Rational) -> Option<usize> {
        self.ledges_on_line(o, coord)
            .into_iter()
            .find(|&k| self.ledges[k].spans(lo) && self.ledges[k].spans(hi))
    }

    /// Coordinates of a segment's carrying line and running range.
    pub fn segment_coords(&self, s: &Segment) -> (Rational, Rational, Rational) {
        match s.orientation {
            Orientation::H => (self.ys[s.line].clone(), self.xs[s.lo].clone(), self.xs[s.hi].clone()),
            Orientation::V => (self.xs[s.line].clone(), self.ys[s.lo].clone(), self.ys[s.hi].clone()),
        }
    }

    /// Cells below/left and above/right of a segment.
    pub fn segment_sides(&self, s: &Segment) -> (Side, Side) {
        match s.orientation {
            Orientation::H => {
                let lower = if s.line == 0 { Side::Outside } else { Side::Cell(self.fine_cell(s.lo, s.line - 1)) };
                let upper = if s.line == self.ny() { Side::Outside } else { Side::Cell(self.fine_cell(s.lo, s.line)) };
                (lower, upper)
            }
            Orientation::V => {
                let lower = if s.line == 0 { Side::Outside } else { Side::Cell(self.fine_cell(s.line - 1, s.lo)) };
                let upper = if s.line == self.nx() { Side::Outside } else { Side::Cell(self.fine_cell(s.line, s.lo)) };
                (lower, upper)
            }
        }
    }

    /// Every minimal segment with its adjacent cells.
    pub fn edge_segments_with_sides(&self) -> Vec<SegmentSides> {
        let mut out = Vec::with_capacity(self.hsegs.len() + self.vsegs.len());
        for (o, list) in [(Orientation::H, &self.hsegs), (Orientation::V, &self.vsegs)] {
            for (k, s) in list.iter().enumerate() {
                let (lower, upper) = self.segment_sides(s);
                out.push(SegmentSides { orientation: o, segment: k, lower, upper });
            }
        }
        out
    }

    pub fn classify_vertices(&self) -> Vec<VertexClass> {
        self.vertices.iter().map(|v| v.class).collect()
    }

    pub fn crossing_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].class == VertexClass::Crossing).collect()
    }

    /// Counts used by the dimension formulas.
    ///
    /// Panics if either topological identity `F = V⁺ + E + 1` or
    /// `Vᵀ + V^{bT} = 2E` fails, since that indicates a construction bug.
    pub fn stats(&self) -> MeshStats {
        let mut s = MeshStats {
            f: self.cells.len(),
            v: 0,
            v_plus: 0,
            v_t: 0,
            v_b: 0,
            v_bt: 0,
            e_h: self.hsegs.iter().filter(|s| s.interior).count(),
            e_v: self.vsegs.iter().filter(|s| s.interior).count(),
            e: 0,
            e_h_ledges: 0,
            e_v_ledges: 0,
        };
        for v in &self.vertices {
            match v.class {
                VertexClass::Crossing => {
                    s.v += 1;
                    s.v_plus += 1;
                }
                VertexClass::HTee | VertexClass::VTee => {
                    s.v += 1;
                    s.v_t += 1;
                }
                VertexClass::Boundary => {
                    s.v_b += 1;
                    s.v_bt += 1;
                }
                VertexClass::Corner => s.v_b += 1,
            }
        }
        for l in self.ledges.iter().filter(|l| !l.is_boundary) {
            match l.orientation {
                Orientation::H => s.e_h_ledges += 1,
                Orientation::V => s.e_v_ledges += 1,
            }
        }
        s.e = s.e_h_ledges + s.e_v_ledges;
        assert_eq!(s.f, s.v_plus + s.e + 1, "F = V+ + E + 1 violated on {self:?}");
        assert_eq!(s.v_t + s.v_bt, 2 * s.e, "VT + VbT = 2E violated on {self:?}");
        s
    }

    /// Tensor-product mesh through every line of the fine grid.
    pub fn associated_tensor_mesh(&self) -> TMesh {
        TMesh::tensor(&self.xs, &self.ys).expect("fine grid is nondegenerate")
    }

    /// True when every fine cell is a mesh cell.
    pub fn is_tensor(&self) -> bool {
        self.cells.len() == self.nx() * self.ny()
    }

    /// Extension with `m` extra vertical and `n` extra horizontal lines per
    /// side, `margin` apart in both directions.
    pub fn extend(&self, m: usize, n: usize, margin: &Rational) -> Result<TMesh, MeshError> {
        self.extend_xy(m, n, margin, margin)
    }

    /// Extension with one quarter of the domain width (height) between added lines.
    pub fn extend_default(&self, m: usize, n: usize) -> Result<TMesh, MeshError> {
        let d = self.domain();
        let four = crate::rational::rat(4);
        self.extend_xy(m, n, &(d.width() / &four), &(d.height() / four))
    }

    /// Extension with separate horizontal and vertical spacing.
    pub fn extend_xy(&self, m: usize, n: usize, mx: &Rational, my: &Rational) -> Result<TMesh, MeshError> {
        if m < 1 || n < 1 {
            return Err(MeshError::InvalidDegree { m, n });
        }
        if !mx.is_positive() || !my.is_positive() {
            return Err(MeshError::InvalidMargin);
        }
        let d = self.domain();
        let xl = &d.x0 - mx * crate::rational::rat(m as i64);
        let xr = &d.x1 + mx * crate::rational::rat(m as i64);
        let yb = &d.y0 - my * crate::rational::rat(n as i64);
        let yt = &d.y1 + my * crate::rational::rat(n as i64);
        let outer = Rect::new(xl.clone(), xr.clone(), yb.clone(), yt.clone());
        let mut hs = Vec::new();
        let mut vs = Vec::new();
        for k in 0..=n {
            let off = my * crate::rational::rat(k as i64);
            for y in [&d.y0 - &off, &d.y1 + &off] {
                hs.push(HLine { y, x0: xl.clone(), x1: xr.clone() });
            }
        }
        for k in 0..=m {
            let off = mx * crate::rational::rat(k as i64);
            for x in [&d.x0 - &off, &d.x1 + &off] {
                vs.push(VLine { x, y0: yb.clone(), y1: yt.clone() });
            }
        }
        for l in self.ledges.iter().filter(|l| !l.is_boundary) {
            match l.orientation {
                Orientation::H => {
                    let x0 = if l.lo == d.x0 { xl.clone() } else { l.lo.clone() };
                    let x1 = if l.hi == d.x1 { xr.clone() } else { l.hi.clone() };
                    hs.push(HLine { y: l.line_coord.clone(), x0, x1 });
                }
                Orientation::V => {
                    let y0 = if l.lo == d.y0 { yb.clone() } else { l.lo.clone() };
                    let y1 = if l.hi == d.y1 { yt.clone() } else { l.hi.clone() };
                    vs.push(VLine { x: l.line_coord.clone(), y0, y1 });
                }
            }
        }
        TMesh::from_segments(&outer, &hs, &vs)
    }

    /// Cells lying inside `r`.
    pub fn cells_within(&self, r: &Rect) -> Vec<usize> {
        (0..self.cells.len()).filter(|&c| r.contains_rect(&self.cells[c])).collect()
    }

    /// Restriction to a rectangle made of whole cells, if it is one.
    pub fn restrict(&self, r: &Rect) -> Option<TMesh> {
        let cells: Vec<Rect> = self.cells_within(r).into_iter().map(|c| self.cells[c].clone()).collect();
        let m = TMesh::from_cells(cells).ok()?;
        (m.domain() == *r).then_some(m)
    }

    /// A cell containing `p` (closed), preferring the one above and to the right.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        let d = self.domain();
        if !d.contains(p) {
            return None;
        }
        let pick = |v: &[Rational], t: &Rational| -> usize {
            match v.binary_search(t) {
                Ok(k) => k.min(v.len() - 2),
                Err(k) => k - 1,
            }
        };
        Some(self.fine_cell(pick(&self.xs, &p.x), pick(&self.ys, &p.y)))
    }

    /// Every cell whose closure contains `p`.
    pub fn cells_at(&self, p: &Point) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.cells.len()).filter(|&c| self.cells[c].contains(p)).collect();
        out.dedup();
        out
    }

    /// Horizontal and vertical interior line pieces, one per interior l-edge.
    pub fn interior_lines(&self) -> (Vec<HLine>, Vec<VLine>) {
        let mut hs = Vec::new();
        let mut vs = Vec::new();
        for l in self.ledges.iter().filter(|l| !l.is_boundary) {
            match l.orientation {
                Orientation::H => hs.push(HLine { y: l.line_coord.clone(), x0: l.lo.clone(), x1: l.hi.clone() }),
                Orientation::V => vs.push(VLine { x: l.line_coord.clone(), y0: l.lo.clone(), y1: l.hi.clone() }),
            }
        }
        (hs, vs)
    }
}

/// Random T-mesh on an integer grid: a `w × h` rectangle whose cells are
/// repeatedly cut through at integer coordinates.
///
/// Cuts at shared coordinates line up across cells, so the result usually
/// mixes crossing vertices with T-vertices.
pub fn random_tmesh(seed: u64, w: i64, h: i64, cuts: usize) -> TMesh {
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};

    use crate::rational::rat;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let r = |a: i64, b: i64, c: i64, d: i64| Rect::new(rat(a), rat(b), rat(c), rat(d));
    let mut cells = vec![r(0, w.max(1), 0, h.max(1))];
    for _ in 0..cuts {
        let splittable: Vec<usize> = (0..cells.len())
            .filter(|&c| cells[c].width() > rat(1) || cells[c].height() > rat(1))
            .collect();
        if splittable.is_empty() {
            break;
        }
        let c = cells.swap_remove(splittable[rng.gen_range(0..splittable.len())]);
        let span = |lo: &Rational, hi: &Rational| (lo.to_integer().to_i64().unwrap(), hi.to_integer().to_i64().unwrap());
        let (x0, x1) = span(&c.x0, &c.x1);
        let (y0, y1) = span(&c.y0, &c.y1);
        let vertical = if x1 - x0 < 2 {
            false
        } else if y1 - y0 < 2 {
            true
        } else {
            rng.gen_bool(0.5)
        };
        if vertical {
            let t = rng.gen_range(x0 + 1..x1);
            cells.push(r(x0, t, y0, y1));
            cells.push(r(t, x1, y0, y1));
        } else {
            let t = rng.gen_range(y0 + 1..y1);
            cells.push(r(x0, x1, y0, t));
            cells.push(r(x0, x1, t, y1));
        }
    }
    TMesh::from_cells(cells).expect("cuts keep a rectangle partition")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn grid(n: i64) -> TMesh {
        let v: Vec<Rational> = (0..=n).map(rat).collect();
        TMesh::tensor(&v, &v).unwrap()
    }

    #[test]
    fn single_cell() {
        let m = grid(1);
        let s = m.stats();
        assert_eq!((s.f, s.v_plus, s.e), (1, 0, 0));
        assert_eq!(m.ledges().len(), 4);
        assert!(m.ledges().iter().all(|l| l.is_boundary));
        let sides = m.edge_segments_with_sides();
        assert_eq!(sides.len(), 4);
        assert!(sides.iter().all(|s| (s.lower == Side::Outside) != (s.upper == Side::Outside)));
    }

    #[test]
    fn three_by_three_grid() {
        let m = grid(2);
        let s = m.stats();
        assert_eq!((s.f, s.v_plus, s.e), (4, 1, 2));
        let classes = m.classify_vertices();
        assert_eq!(classes.iter().filter(|c| **c == VertexClass::Corner).count(), 4);
        assert_eq!(classes.iter().filter(|c| **c == VertexClass::Boundary).count(), 4);
        let interior: Vec<_> = m.edge_segments_with_sides().into_iter().filter(|s| s.lower != Side::Outside && s.upper != Side::Outside).collect();
        assert_eq!(interior.len(), 4);
        assert!(interior.iter().all(|s| s.lower != s.upper));
    }

    #[test]
    fn gap_and_overlap_are_rejected() {
        let c = |x0, x1, y0, y1| Rect::new(rat(x0), rat(x1), rat(y0), rat(y1));
        assert!(matches!(
            TMesh::from_cells(vec![c(0, 1, 0, 1), c(1, 2, 1, 2)]),
            Err(MeshError::NotRegular(_))
        ));
        assert!(matches!(
            TMesh::from_cells(vec![c(0, 2, 0, 1), c(1, 2, 0, 1)]),
            Err(MeshError::Overlap(_))
        ));
        assert!(matches!(TMesh::from_cells(vec![c(0, 0, 0, 1)]), Err(MeshError::Degenerate(_))));
    }

    #[test]
    fn dangling_segment_is_rejected() {
        let dom = Rect::new(rat(0), rat(2), rat(0), rat(2));
        let h = HLine { y: rat(1), x0: rat(0), x1: rat(1) };
        assert!(matches!(TMesh::from_segments(&dom, &[h], &[]), Err(MeshError::DanglingSegment(_))));
    }

    #[test]
    fn t_junction_classes() {
        let dom = Rect::new(rat(0), rat(2), rat(0), rat(2));
        let h = HLine { y: rat(1), x0: rat(0), x1: rat(2) };
        let v = VLine { x: rat(1), y0: rat(1), y1: rat(2) };
        let m = TMesh::from_segments(&dom, &[h], &[v]).unwrap();
        let t = m.vertex_at_point(&Point::new(rat(1), rat(1))).unwrap();
        assert_eq!(m.vertices()[t].class, VertexClass::VTee);
        let s = m.stats();
        assert_eq!((s.f, s.v_plus, s.e, s.v_t), (3, 0, 2, 1));
    }

    #[test]
    fn extension_of_single_cell_is_four_by_four() {
        let e = grid(1).extend(1, 1, &ratio(1, 2)).unwrap();
        assert!(e.is_tensor());
        assert_eq!((e.xs().len(), e.ys().len()), (4, 4));
        assert!(matches!(grid(1).extend(0, 1, &rat(1)), Err(MeshError::InvalidDegree { .. })));
        assert!(matches!(grid(1).extend(1, 1, &rat(0)), Err(MeshError::InvalidMargin)));
    }
}
