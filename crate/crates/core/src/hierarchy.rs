//! Hierarchical T-meshes built by recursive midpoint cross insertion.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cvr::crossing_components;
use crate::mesh::{MeshError, Orientation, Rect, TMesh, VertexClass};
use crate::rational::{midpoint, rat, serde_rational_vec, Point, Rational};

/// A cell identified by its level and exact center.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRef {
    pub level: usize,
    pub center: Point,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HierError {
    #[error("no cell at level {} with center {}", .0.level, .0.center)]
    NoSuchCell(CellRef),
    #[error("cell at level {} with center {} is already subdivided", .0.level, .0.center)]
    AlreadySubdivided(CellRef),
    #[error("mesh is not crossing-vertex connected")]
    NotCvc,
    #[error("mesh has no crossing vertices")]
    NoCrossingVertices,
    #[error("l-edge {0} is a boundary l-edge")]
    NotInterior(usize),
    #[error("base grid needs strictly increasing coordinates, two per axis at least")]
    InvalidBase,
    #[error("branch at level {0} has no entering l-edge")]
    NoEnteringLEdge(usize),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// One cell of the hierarchy together with its level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HCell {
    pub rect: Rect,
    pub level: usize,
}

impl HCell {
    pub fn cref(&self) -> CellRef {
        CellRef { level: self.level, center: self.rect.center() }
    }

    fn children(&self) -> [HCell; 4] {
        let c = self.rect.center();
        let r = &self.rect;
        let mk = |x0: &Rational, x1: &Rational, y0: &Rational, y1: &Rational| HCell {
            rect: Rect::new(x0.clone(), x1.clone(), y0.clone(), y1.clone()),
            level: self.level + 1,
        };
        [
            mk(&r.x0, &c.x, &r.y0, &c.y),
            mk(&c.x, &r.x1, &r.y0, &c.y),
            mk(&r.x0, &c.x, &c.y, &r.y1),
            mk(&c.x, &r.x1, &c.y, &r.y1),
        ]
    }
}

/// A hierarchical T-mesh: a tensor base grid plus a subdivision history.
#[derive(Clone, Debug)]
pub struct HMesh {
    base_xs: Vec<Rational>,
    base_ys: Vec<Rational>,
    history: Vec<CellRef>,
    leaves: BTreeMap<Point, HCell>,
    subdivided: BTreeMap<Point, HCell>,
    realized: Arc<TMesh>,
}

impl PartialEq for HMesh {
    fn eq(&self, other: &Self) -> bool {
        self.base_xs == other.base_xs && self.base_ys == other.base_ys && self.history == other.history
    }
}

/// Serializable description: base grid and subdivisions in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HMeshSpec {
    pub base: BaseGrid,
    #[serde(default)]
    pub subdivide: Vec<SubdivisionSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseGrid {
    #[serde(with = "serde_rational_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub y: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionSpec {
    pub level: usize,
    #[serde(with = "serde_rational_vec")]
    pub center: Vec<Rational>,
}

fn dyadic_level(base: &[Rational], t: &Rational) -> usize {
    if t <= &base[0] || t >= &base[base.len() - 1] {
        return 0;
    }
    let k = match base.binary_search(t) {
        Ok(_) => return 0,
        Err(k) => k,
    };
    let (a, b) = (&base[k - 1], &base[k]);
    let mut s = (t - a) / (b - a);
    let mut level = 0;
    while !s.is_integer() {
        s *= rat(2);
        level += 1;
        assert!(level < 4096, "coordinate is not a dyadic subdivision of the base grid");
    }
    level
}

/// Level numbers of mesh items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelAnnotation {
    pub hseg_level: Vec<usize>,
    pub vseg_level: Vec<usize>,
    /// Level per l-edge index (boundary l-edges have level 0).
    pub ledge_level: Vec<usize>,
    /// `(horizontal level, vertical level)` per crossing vertex id.
    pub vertex_level: BTreeMap<usize, (usize, usize)>,
}

impl HMesh {
    /// Tensor base grid with no subdivisions.
    pub fn new(base_xs: Vec<Rational>, base_ys: Vec<Rational>) -> Result<HMesh, HierError> {
        let increasing = |v: &[Rational]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&base_xs) || !increasing(&base_ys) {
            return Err(HierError::InvalidBase);
        }
        let mut leaves = BTreeMap::new();
        for j in 0..base_ys.len() - 1 {
            for i in 0..base_xs.len() - 1 {
                let rect = Rect::new(base_xs[i].clone(), base_xs[i + 1].clone(), base_ys[j].clone(), base_ys[j + 1].clone());
                leaves.insert(rect.center(), HCell { rect, level: 0 });
            }
        }
        let realized = Arc::new(TMesh::tensor(&base_xs, &base_ys)?);
        Ok(HMesh { base_xs, base_ys, history: Vec::new(), leaves, subdivided: BTreeMap::new(), realized })
    }

    /// Builds a hierarchy from its serialized description.
    pub fn from_spec(spec: &HMeshSpec) -> Result<HMesh, HierError> {
        let mut h = HMesh::new(spec.base.x.clone(), spec.base.y.clone())?;
        for s in &spec.subdivide {
            if s.center.len() != 2 {
                return Err(HierError::InvalidBase);
            }
            let cref = CellRef { level: s.level, center: Point::new(s.center[0].clone(), s.center[1].clone()) };
            h.subdivide_in_place(&cref)?;
        }
        h.realize();
        Ok(h)
    }

    pub fn to_spec(&self) -> HMeshSpec {
        HMeshSpec {
            base: BaseGrid { x: self.base_xs.clone(), y: self.base_ys.clone() },
            subdivide: self
                .history
                .iter()
                .map(|c| SubdivisionSpec { level: c.level, center: vec![c.center.x.clone(), c.center.y.clone()] })
                .collect(),
        }
    }

    /// A new hierarchy with `cell` subdivided.
    pub fn subdivide(&self, cell: &CellRef) -> Result<HMesh, HierError> {
        let mut h = self.clone();
        h.subdivide_in_place(cell)?;
        h.realize();
        Ok(h)
    }

    /// Records a subdivision without rebuilding the realized mesh; call [`HMesh::realize`] afterwards.
    pub fn subdivide_in_place(&mut self, cell: &CellRef) -> Result<(), HierError> {
        if let Some(c) = self.subdivided.get(&cell.center) {
            if c.level == cell.level {
                return Err(HierError::AlreadySubdivided(cell.clone()));
            }
        }
        let leaf = match self.leaves.get(&cell.center) {
            Some(c) if c.level == cell.level => c.clone(),
            _ => return Err(HierError::NoSuchCell(cell.clone())),
        };
        self.leaves.remove(&cell.center);
        for ch in leaf.children() {
            self.leaves.insert(ch.rect.center(), ch);
        }
        self.subdivided.insert(cell.center.clone(), leaf);
        self.history.push(cell.clone());
        Ok(())
    }

    /// Rebuilds the realized mesh from the current leaves.
    pub fn realize(&mut self) {
        let cells = self.leaves.values().map(|c| c.rect.clone()).collect();
        self.realized = Arc::new(TMesh::from_cells(cells).expect("leaves tile the base rectangle"));
    }

    pub fn mesh(&self) -> &TMesh {
        &self.realized
    }

    pub fn mesh_arc(&self) -> Arc<TMesh> {
        self.realized.clone()
    }

    pub fn base_xs(&self) -> &[Rational] {
        &self.base_xs
    }

    pub fn base_ys(&self) -> &[Rational] {
        &self.base_ys
    }

    pub fn history(&self) -> &[CellRef] {
        &self.history
    }

    pub fn leaves(&self) -> impl Iterator<Item = &HCell> {
        self.leaves.values()
    }

    pub fn subdivided_cells(&self) -> impl Iterator<Item = &HCell> {
        self.subdivided.values()
    }

    pub fn max_level(&self) -> usize {
        self.leaves.values().map(|c| c.level).max().unwrap_or(0)
    }

    pub fn is_subdivided(&self, center: &Point) -> bool {
        self.subdivided.contains_key(center)
    }

    /// Level of a vertical line `x = t`; coordinates outside the base range count as level 0.
    pub fn level_x(&self, t: &Rational) -> usize {
        dyadic_level(&self.base_xs, t)
    }

    pub fn level_y(&self, t: &Rational) -> usize {
        dyadic_level(&self.base_ys, t)
    }

    pub fn line_level(&self, o: Orientation, coord: &Rational) -> usize {
        match o {
            Orientation::H => self.level_y(coord),
            Orientation::V => self.level_x(coord),
        }
    }

    /// `(horizontal level, vertical level)` of a point.
    pub fn point_level(&self, p: &Point) -> (usize, usize) {
        (self.level_y(&p.y), self.level_x(&p.x))
    }

    /// Level annotation of the realized mesh.
    pub fn annotate_levels(&self) -> LevelAnnotation {
        self.annotate_mesh(&self.realized)
    }

    /// Level annotation of any mesh whose lines come from this hierarchy or
    /// lie outside its base rectangle (as in an extension).
    pub fn annotate_mesh(&self, mesh: &TMesh) -> LevelAnnotation {
        let seg_level = |o: Orientation, s: &crate::mesh::Segment| {
            let (c, _, _) = mesh.segment_coords(s);
            self.line_level(o, &c)
        };
        LevelAnnotation {
            hseg_level: mesh.hsegments().iter().map(|s| seg_level(Orientation::H, s)).collect(),
            vseg_level: mesh.vsegments().iter().map(|s| seg_level(Orientation::V, s)).collect(),
            ledge_level: mesh
                .ledges()
                .iter()
                .map(|l| if l.is_boundary { 0 } else { self.line_level(l.orientation, &l.line_coord) })
                .collect(),
            vertex_level: mesh
                .crossing_vertices()
                .into_iter()
                .map(|v| (v, self.point_level(&mesh.vertices()[v].point)))
                .collect(),
        }
    }

    fn all_cells(&self) -> impl Iterator<Item = &HCell> {
        self.leaves.values().chain(self.subdivided.values())
    }

    /// Same-level cells sharing a full edge with `c`.
    pub fn same_level_neighbors(&self, c: &HCell) -> Vec<HCell> {
        let r = &c.rect;
        self.all_cells()
            .filter(|d| d.level == c.level)
            .filter(|d| {
                let s = &d.rect;
                let horiz = s.y0 == r.y0 && s.y1 == r.y1 && (s.x0 == r.x1 || s.x1 == r.x0);
                let vert = s.x0 == r.x0 && s.x1 == r.x1 && (s.y0 == r.y1 || s.y1 == r.y0);
                horiz || vert
            })
            .cloned()
            .collect()
    }

    /// Subdivided cells none of whose same-level neighbours is subdivided,
    /// and `δ` = their number plus one.
    pub fn isolated_cells(&self) -> (Vec<CellRef>, usize) {
        let iso: Vec<CellRef> = self
            .subdivided
            .values()
            .filter(|c| self.same_level_neighbors(c).iter().all(|d| !self.subdivided.contains_key(&d.rect.center())))
            .map(HCell::cref)
            .collect();
        let delta = iso.len() + 1;
        (iso, delta)
    }

    pub fn delta(&self) -> usize {
        self.isolated_cells().1
    }

    /// `δ` for the extension of this hierarchy: isolated cells touching the
    /// domain boundary become connected through the extension lines.
    pub fn delta_extended(&self) -> usize {
        let dom = self.realized.domain();
        let touches = |r: &Rect| r.x0 == dom.x0 || r.x1 == dom.x1 || r.y0 == dom.y0 || r.y1 == dom.y1;
        let (iso, _) = self.isolated_cells();
        1 + iso.iter().filter(|c| !touches(&self.subdivided[&c.center].rect)).count()
    }

    /// Extension of the realized mesh with spacing `margin`.
    pub fn extend(&self, m: usize, n: usize, margin: &Rational) -> Result<TMesh, MeshError> {
        self.realized.extend(m, n, margin)
    }

    fn subdivided_cell(&self, c: &CellRef) -> &HCell {
        &self.subdivided[&c.center]
    }

    /// Sub-hierarchies of the mesh: the main part with every isolated cell
    /// kept whole, then one part per isolated cell covering its interior.
    pub fn decompose(&self) -> Vec<HMesh> {
        let (iso, _) = self.isolated_cells();
        let iso_rects: Vec<Rect> = iso.iter().map(|c| self.subdivided_cell(c).rect.clone()).collect();
        let mut parts = Vec::with_capacity(iso.len() + 1);
        parts.push(self.part(None, &iso_rects));
        for c in &iso {
            parts.push(self.part(Some(self.subdivided_cell(c)), &iso_rects));
        }
        parts
    }

    fn part(&self, root: Option<&HCell>, iso_rects: &[Rect]) -> HMesh {
        let (mut h, region, offset) = match root {
            None => (HMesh::new(self.base_xs.clone(), self.base_ys.clone()).unwrap(), self.realized.domain(), 0),
            Some(c) => {
                let m = c.rect.center();
                let xs = vec![c.rect.x0.clone(), m.x.clone(), c.rect.x1.clone()];
                let ys = vec![c.rect.y0.clone(), m.y.clone(), c.rect.y1.clone()];
                (HMesh::new(xs, ys).unwrap(), c.rect.clone(), c.level + 1)
            }
        };
        let mut subs: Vec<&HCell> = self
            .subdivided
            .values()
            .filter(|s| region.contains_rect(&s.rect) && s.rect != region)
            .filter(|s| !iso_rects.iter().any(|j| j != &region && region.contains_rect(j) && j.contains_rect(&s.rect)))
            .collect();
        subs.sort_by_key(|s| (s.level, s.rect.center().yx_key()));
        for s in subs {
            let cref = CellRef { level: s.level - offset, center: s.rect.center() };
            h.subdivide_in_place(&cref).expect("parent subdivided first");
        }
        h.realize();
        h
    }
}

/// True when every pair of crossing vertices is joined by a poly-line whose turns are crossing vertices.
pub fn is_crossing_vertex_connected(mesh: &TMesh) -> Result<bool, HierError> {
    let comps = crossing_components(mesh);
    if comps.is_empty() {
        return Err(HierError::NoCrossingVertices);
    }
    Ok(comps.len() == 1)
}

/// A crossing-vertex path between two crossing vertices, if one exists.
pub fn crossing_path(mesh: &TMesh, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, b) in crate::cvr::crossing_adjacency(mesh) {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(w) {
                e.insert(u);
                queue.push_back(w);
            }
        }
    }
    None
}

/// Same-level connected groups of l-edges and their ordering data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub level: usize,
    /// Mesh l-edge ids, sorted.
    pub ledges: Vec<usize>,
    /// Entering l-edge (for level 0 it belongs to the branch itself).
    pub entering: usize,
    /// Crossing where the entering l-edge meets the branch (`None` at level 0).
    pub entering_vertex: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchDecomposition {
    /// Branches sorted by level, then by index within the level.
    pub branches: Vec<Branch>,
    /// Level of every mesh l-edge.
    pub ledge_level: Vec<usize>,
    pub branch_of: BTreeMap<usize, usize>,
    pub distance: BTreeMap<usize, usize>,
    /// Characteristic crossing vertex of every interior l-edge except the level-0 entering one.
    pub characteristic: BTreeMap<usize, usize>,
    /// The level-0 entering l-edge, whose constraint is dropped.
    pub root: usize,
}

impl BranchDecomposition {
    /// Number of branches at each level.
    pub fn branch_counts(&self) -> Vec<usize> {
        let max = self.branches.iter().map(|b| b.level).max().unwrap_or(0);
        let mut out = vec![0; max + 1];
        for b in &self.branches {
            out[b.level] += 1;
        }
        out
    }

    /// Sort key of an interior l-edge: level, branch index, distance.
    pub fn order_key(&self, ledge: usize) -> (usize, usize, usize) {
        let b = self.branch_of[&ledge];
        (self.branches[b].level, b, self.distance[&ledge])
    }

    /// Interior l-edges other than the root, sorted by the order key with a
    /// coordinate tie-break on the characteristic vertex.
    pub fn ordered_ledges(&self, mesh: &TMesh) -> Vec<usize> {
        let mut ls: Vec<usize> = self.characteristic.keys().copied().collect();
        ls.sort_by_key(|&l| (self.order_key(l), mesh.vertices()[self.characteristic[&l]].point.yx_key()));
        ls
    }
}

fn ledge_pair_at(mesh: &TMesh, v: usize) -> (usize, usize) {
    let [h, w] = mesh.vertex_ledges(v);
    (h.expect("crossing on a horizontal l-edge"), w.expect("crossing on a vertical l-edge"))
}

/// Branches, entering l-edges, distances and characteristic vertices of a
/// crossing-vertex connected hierarchical mesh.
pub fn branch_decomposition(h: &HMesh) -> Result<BranchDecomposition, HierError> {
    let mesh = h.mesh();
    if !is_crossing_vertex_connected(mesh)? {
        return Err(HierError::NotCvc);
    }
    let ann = h.annotate_levels();
    let lvl = &ann.ledge_level;
    let crossings = mesh.crossing_vertices();
    // l-edge adjacency through crossing vertices
    let mut meets: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &v in &crossings {
        let (a, b) = ledge_pair_at(mesh, v);
        meets.entry(a).or_default().push((b, v));
        meets.entry(b).or_default().push((a, v));
    }
    let interior = mesh.interior_ledges();
    let max_level = interior.iter().map(|&l| lvl[l]).max().unwrap_or(0);
    let yx = |v: usize| mesh.vertices()[v].point.yx_key();

    let mut branches = Vec::new();
    let mut branch_of = BTreeMap::new();
    let mut distance = BTreeMap::new();
    let mut characteristic = BTreeMap::new();
    let mut root = usize::MAX;

    for k in 0..=max_level {
        let at_k: BTreeSet<usize> = interior.iter().copied().filter(|&l| lvl[l] == k).collect();
        let mut seen = BTreeSet::new();
        let mut level_branches = Vec::new();
        for &start in &at_k {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &(w, _) in meets.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                    if at_k.contains(&w) && seen.insert(w) {
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort();
            let (entering, entering_vertex) = if k == 0 {
                let lowest = comp
                    .iter()
                    .copied()
                    .filter(|&l| mesh.ledges()[l].orientation == Orientation::H)
                    .min_by_key(|&l| mesh.ledges()[l].line_coord.clone())
                    .or_else(|| comp.iter().copied().min_by_key(|&l| mesh.ledges()[l].line_coord.clone()))
                    .expect("branch is non-empty");
                (lowest, None)
            } else {
                let mut best: Option<(usize, usize)> = None;
                for &l in &comp {
                    for &(w, v) in meets.get(&l).map(Vec::as_slice).unwrap_or(&[]) {
                        if lvl[w] < k && best.is_none_or(|(_, bv)| yx(v) < yx(bv)) {
                            best = Some((w, v));
                        }
                    }
                }
                let (w, v) = best.ok_or(HierError::NoEnteringLEdge(k))?;
                (w, Some(v))
            };
            level_branches.push(Branch { level: k, ledges: comp, entering, entering_vertex });
        }
        level_branches.sort_by_key(|b| match b.entering_vertex {
            Some(v) => (yx(v), b.ledges[0]),
            None => ((rat(0), rat(0)), b.ledges[0]),
        });
        for b in level_branches {
            let idx = branches.len();
            // breadth-first distances inside the branch plus its entering l-edge
            let members: BTreeSet<usize> = b.ledges.iter().copied().chain([b.entering]).collect();
            let mut dist: BTreeMap<usize, usize> = BTreeMap::from([(b.entering, 0)]);
            let mut queue = VecDeque::from([b.entering]);
            while let Some(u) = queue.pop_front() {
                for &(w, _) in meets.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                    if members.contains(&w) && !dist.contains_key(&w) {
                        dist.insert(w, dist[&u] + 1);
                        queue.push_back(w);
                    }
                }
            }
            for &l in &b.ledges {
                let d = *dist.get(&l).ok_or(HierError::NoEnteringLEdge(k))?;
                branch_of.insert(l, idx);
                distance.insert(l, d);
                if d == 0 {
                    root = l;
                    continue;
                }
                let cv = meets[&l]
                    .iter()
                    .filter(|(w, _)| dist.get(w) == Some(&(d - 1)))
                    .map(|&(_, v)| v)
                    .min_by_key(|&v| yx(v))
                    .expect("predecessor on a shortest series");
                characteristic.insert(l, cv);
            }
            branches.push(b);
        }
    }
    if root == usize::MAX {
        return Err(HierError::NoCrossingVertices);
    }
    Ok(BranchDecomposition { branches, ledge_level: lvl.clone(), branch_of, distance, characteristic, root })
}

/// The two support l-edges (below/left, above/right) of an interior l-edge.
pub fn support_ledges(h: &HMesh, ledge: usize) -> Result<(usize, usize), HierError> {
    let mesh = h.mesh();
    let l = &mesh.ledges()[ledge];
    if l.is_boundary {
        return Err(HierError::NotInterior(ledge));
    }
    let k = h.line_level(l.orientation, &l.line_coord);
    let lines: &[Rational] = match l.orientation {
        Orientation::H => mesh.ys(),
        Orientation::V => mesh.xs(),
    };
    let ok = |t: &Rational| if k == 0 { h.line_level(l.orientation, t) == 0 } else { h.line_level(l.orientation, t) < k };
    let below = lines.iter().filter(|t| *t < &l.line_coord && ok(t)).max().expect("boundary line below");
    let above = lines.iter().filter(|t| *t > &l.line_coord && ok(t)).min().expect("boundary line above");
    let find = |c: &Rational| mesh.ledge_covering(l.orientation, c, &l.lo, &l.hi).expect("support line covers the l-edge span");
    Ok((find(below), find(above)))
}

/// Random hierarchical mesh: integer base spacings in `1..=3`, then level by
/// level each leaf is subdivided with probability `prob`.
pub fn generate_random(seed: u64, base_rows: usize, base_cols: usize, levels: usize, prob: f64, require_cvc: bool) -> HMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axis = |n: usize, rng: &mut ChaCha8Rng| {
        let mut v = vec![rat(0)];
        for _ in 0..n.max(1) {
            let next = v.last().unwrap() + rat(rng.gen_range(1..=3));
            v.push(next);
        }
        v
    };
    let xs = axis(base_cols, &mut rng);
    let ys = axis(base_rows, &mut rng);
    let mut h = HMesh::new(xs, ys).expect("valid base");
    for k in 0..levels {
        let candidates: Vec<CellRef> = h.leaves.values().filter(|c| c.level == k).map(HCell::cref).collect();
        for c in candidates {
            if rng.gen_bool(prob.clamp(0.0, 1.0)) {
                h.subdivide_in_place(&c).unwrap();
            }
        }
    }
    if require_cvc {
        loop {
            let (iso, _) = h.isolated_cells();
            let Some(first) = iso.first() else { break };
            let cell = h.subdivided[&first.center].clone();
            let mut nbrs = h.same_level_neighbors(&cell);
            nbrs.sort_by_key(|c| c.rect.center().yx_key());
            let pick = nbrs[rng.gen_range(0..nbrs.len())].cref();
            h.subdivide_in_place(&pick).expect("neighbour is an unsubdivided leaf");
        }
    }
    h.realize();
    h
}

/// Crossing vertices of the realized mesh with their level pairs.
pub fn crossing_levels(h: &HMesh) -> Vec<(usize, (usize, usize))> {
    let mesh = h.mesh();
    mesh.vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.class == VertexClass::Crossing)
        .map(|(k, v)| (k, h.point_level(&v.point)))
        .collect()
}

/// Midpoint of a rectangle's edge; exported for fixtures and tests.
pub fn edge_midpoint(a: &Point, b: &Point) -> Point {
    Point::new(midpoint(&a.x, &b.x), midpoint(&a.y, &b.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn base(n: i64) -> HMesh {
        let v: Vec<Rational> = (0..=n).map(rat).collect();
        HMesh::new(v.clone(), v).unwrap()
    }

    fn cref(level: usize, x: Rational, y: Rational) -> CellRef {
        CellRef { level, center: Point::new(x, y) }
    }

    #[test]
    fn subdivide_single_cell() {
        let h = HMesh::new(vec![rat(0), rat(2)], vec![rat(0), rat(2)]).unwrap();
        let h = h.subdivide(&cref(0, rat(1), rat(1))).unwrap();
        assert_eq!(h.mesh().cells().len(), 4);
        assert!(h.mesh().vertex_at_point(&Point::new(rat(1), rat(1))).is_some());
        assert!(matches!(h.subdivide(&cref(0, rat(1), rat(1))), Err(HierError::AlreadySubdivided(_))));
        assert!(matches!(h.subdivide(&cref(0, rat(3), rat(1))), Err(HierError::NoSuchCell(_))));
    }

    #[test]
    fn figure_six_levels_and_isolation() {
        let h = base(3).subdivide(&cref(0, ratio(3, 2), ratio(3, 2))).unwrap();
        let s = h.mesh().stats();
        assert_eq!((s.v_plus, s.e, s.f), (5, 6, 12));
        assert_eq!(h.isolated_cells().1, 2);
        assert!(!is_crossing_vertex_connected(h.mesh()).unwrap());
        let ann = h.annotate_levels();
        let c = h.mesh().vertex_at_point(&Point::new(ratio(3, 2), ratio(3, 2))).unwrap();
        assert_eq!(ann.vertex_level[&c], (1, 1));
        let parts = h.decompose();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].mesh().cells().len(), 9);
        assert_eq!(parts[1].mesh().cells().len(), 4);
    }

    #[test]
    fn adjacent_subdivisions_share_a_crossing() {
        let h = base(3)
            .subdivide(&cref(0, ratio(1, 2), ratio(3, 2)))
            .unwrap()
            .subdivide(&cref(0, ratio(3, 2), ratio(3, 2)))
            .unwrap();
        let v = h.mesh().vertex_at_point(&Point::new(rat(1), ratio(3, 2))).unwrap();
        assert_eq!(h.mesh().vertices()[v].class, VertexClass::Crossing);
        assert_eq!(h.point_level(&h.mesh().vertices()[v].point), (1, 0));
        assert_eq!(h.isolated_cells().1, 1);
        assert!(is_crossing_vertex_connected(h.mesh()).unwrap());
    }

    #[test]
    fn support_ledges_of_level_one_edge() {
        let h = base(3).subdivide(&cref(0, ratio(3, 2), ratio(3, 2))).unwrap();
        let m = h.mesh();
        let l = m.ledge_covering(Orientation::H, &ratio(3, 2), &rat(1), &rat(2)).unwrap();
        let (b, t) = support_ledges(&h, l).unwrap();
        assert_eq!(m.ledges()[b].line_coord, rat(1));
        assert_eq!(m.ledges()[t].line_coord, rat(2));
        let l0 = m.ledge_covering(Orientation::H, &rat(1), &rat(0), &rat(3)).unwrap();
        let (b, t) = support_ledges(&h, l0).unwrap();
        assert!(m.ledges()[b].is_boundary);
        assert_eq!(m.ledges()[t].line_coord, rat(2));
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_random(3, 3, 3, 2, 0.4, true);
        let b = generate_random(3, 3, 3, 2, 0.4, true);
        assert_eq!(a, b);
        assert_eq!(a.delta(), 1);
        let flat = generate_random(3, 3, 3, 2, 0.0, false);
        assert!(flat.mesh().is_tensor());
    }
}
