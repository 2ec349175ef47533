//! Crossing-vertex-relationship (CVR) graphs.
//!
//! Nodes are the crossing vertices of a mesh. Two nodes are joined when they
//! are consecutive crossing vertices along a common l-edge; T-vertices in
//! between are passed through.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::mesh::{HLine, Rect, TMesh, VLine, VertexClass, EAST, NORTH, SOUTH, WEST};
use crate::oracle::{dim_oracle, OracleError, SpaceSpec};
use crate::rational::{midpoint, Point, Rational};

/// Edges between consecutive crossing vertices on each interior l-edge, as vertex ids.
pub fn crossing_adjacency(mesh: &TMesh) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for l in mesh.ledges().iter().filter(|l| !l.is_boundary) {
        let xs: Vec<usize> = l
            .vertices
            .iter()
            .copied()
            .filter(|&v| mesh.vertices()[v].class == VertexClass::Crossing)
            .collect();
        out.extend(xs.windows(2).map(|w| (w[0], w[1])));
    }
    out
}

/// Connected components of the crossing vertices, each sorted by vertex id.
pub fn crossing_components(mesh: &TMesh) -> Vec<Vec<usize>> {
    let crossings = mesh.crossing_vertices();
    let pos: BTreeMap<usize, usize> = crossings.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut parent: Vec<usize> = (0..crossings.len()).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for (a, b) in crossing_adjacency(mesh) {
        let (ra, rb) = (find(&mut parent, pos[&a]), find(&mut parent, pos[&b]));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &v) in crossings.iter().enumerate() {
        let r = find(&mut parent, k);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

/// CVR graph with its component and bounded-face counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvrGraph {
    /// Mesh vertex ids of the nodes.
    pub nodes: Vec<usize>,
    /// Edges as pairs of mesh vertex ids.
    pub edges: Vec<(usize, usize)>,
    /// Node groups of each connected component.
    pub component_nodes: Vec<Vec<usize>>,
    /// Bounded faces found by half-edge traversal.
    pub faces: usize,
    /// Each bounded face as a closed vertex cycle.
    pub face_cycles: Vec<Vec<usize>>,
}

impl CvrGraph {
    pub fn v(&self) -> usize {
        self.nodes.len()
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn components(&self) -> usize {
        self.component_nodes.len()
    }

    /// Bounded faces implied by Euler's formula `F - E + V = C`.
    pub fn faces_by_euler(&self) -> usize {
        self.e() + self.components() - self.v()
    }
}

/// Builds the CVR graph of a mesh.
pub fn cvr_graph(mesh: &TMesh) -> CvrGraph {
    let nodes = mesh.crossing_vertices();
    let edges = crossing_adjacency(mesh);
    let component_nodes = crossing_components(mesh);
    let face_cycles = bounded_faces(mesh, &nodes, &edges);
    CvrGraph { faces: face_cycles.len(), nodes, edges, component_nodes, face_cycles }
}

fn direction(mesh: &TMesh, from: usize, to: usize) -> usize {
    let (a, b) = (&mesh.vertices()[from].point, &mesh.vertices()[to].point);
    if a.y == b.y {
        if b.x > a.x { EAST } else { WEST }
    } else if b.y > a.y {
        NORTH
    } else {
        SOUTH
    }
}

fn bounded_faces(mesh: &TMesh, nodes: &[usize], edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut nbr: BTreeMap<usize, [Option<usize>; 4]> = nodes.iter().map(|&v| (v, [None; 4])).collect();
    for &(a, b) in edges {
        nbr.get_mut(&a).unwrap()[direction(mesh, a, b)] = Some(b);
        nbr.get_mut(&b).unwrap()[direction(mesh, b, a)] = Some(a);
    }
    let mut half_edges: Vec<(usize, usize)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    half_edges.sort();
    let mut used: BTreeMap<(usize, usize), bool> = half_edges.iter().map(|&h| (h, false)).collect();
    let mut faces = Vec::new();
    for &start in &half_edges {
        if used[&start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut h = start;
        loop {
            used.insert(h, true);
            cycle.push(h.0);
            let (u, v) = h;
            let back = direction(mesh, v, u);
            let table = nbr[&v];
            let w = (1..=4).map(|k| (back + 4 - k) % 4).find_map(|d| table[d]).expect("edge endpoint has a neighbour");
            h = (v, w);
            if h == start {
                break;
            }
        }
        let mut area2 = Rational::zero();
        for k in 0..cycle.len() {
            let p = &mesh.vertices()[cycle[k]].point;
            let q = &mesh.vertices()[cycle[(k + 1) % cycle.len()]].point;
            area2 += &p.x * &q.y - &q.x * &p.y;
        }
        if area2.is_positive() {
            faces.push(cycle);
        }
    }
    faces
}

/// Results of the CVR identity checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub v_plus: usize,
    pub e: usize,
    pub e_g: usize,
    pub delta_g: usize,
    pub f_g: usize,
    pub f_g_euler: usize,
    pub delta: usize,
    pub checks: Vec<(String, bool)>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CvrError {
    #[error("identity violated: {0:?}")]
    IdentityViolated(Box<IdentityReport>),
}

/// Checks `2V⁺ = E + E_G`, `V⁺ - E + δ = F_G`, `δ_G = δ` and the two face counts.
pub fn identity_checks(mesh: &TMesh, graph: &CvrGraph, delta: usize) -> Result<IdentityReport, CvrError> {
    let s = mesh.stats();
    let mut r = IdentityReport {
        v_plus: s.v_plus,
        e: s.e,
        e_g: graph.e(),
        delta_g: graph.components(),
        f_g: graph.faces,
        f_g_euler: graph.faces_by_euler(),
        delta,
        checks: Vec::new(),
    };
    r.checks.push(("2V+ = E + E_G".into(), 2 * r.v_plus == r.e + r.e_g));
    r.checks.push((
        "V+ - E + delta = F_G".into(),
        r.v_plus as i64 - r.e as i64 + delta as i64 == r.f_g as i64,
    ));
    r.checks.push(("delta_G = delta".into(), r.delta_g == delta));
    r.checks.push(("traversal faces = Euler faces".into(), r.f_g == r.f_g_euler));
    if r.all_pass() {
        Ok(r)
    } else {
        Err(CvrError::IdentityViolated(Box::new(r)))
    }
}

/// Outcome of comparing both sides of the conjecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Agree,
    Disagree,
    Unsupported,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureResult {
    pub m: usize,
    pub n: usize,
    pub lhs: usize,
    /// `None` when some component cannot be realized as a regular T-mesh.
    pub rhs: Option<usize>,
    pub per_component: Vec<Option<usize>>,
    pub verdict: Verdict,
}

/// True when `p` lies strictly inside the closed axis-aligned polygon `cycle`
/// (edges walked twice cancel out).
fn inside(mesh: &TMesh, cycle: &[usize], p: &Point) -> bool {
    let mut odd = false;
    for k in 0..cycle.len() {
        let a = &mesh.vertices()[cycle[k]].point;
        let b = &mesh.vertices()[cycle[(k + 1) % cycle.len()]].point;
        if a.x == b.x && a.x > p.x && a.y.clone().min(b.y.clone()) < p.y && p.y < a.y.clone().max(b.y.clone()) {
            odd = !odd;
        }
    }
    odd
}

/// The regions covered by the bounded faces of a CVR component, each realized
/// as a T-mesh built from the component's edges.
///
/// Faces sharing an edge form one region. Regions meeting only at a corner are
/// kept apart, and edges bounding no face are left out. Returns `None` unless
/// every region is a rectangle tiled by rectangular faces.
pub fn component_meshes(mesh: &TMesh, graph: &CvrGraph, component: usize) -> Option<Vec<TMesh>> {
    let in_comp: BTreeSet<usize> = graph.component_nodes[component].iter().copied().collect();
    let cycles: Vec<&Vec<usize>> = graph.face_cycles.iter().filter(|f| in_comp.contains(&f[0])).collect();
    let (xs, ys) = (mesh.xs(), mesh.ys());
    let mut covered = BTreeSet::new();
    for j in 0..ys.len() - 1 {
        for i in 0..xs.len() - 1 {
            let c = Point::new(midpoint(&xs[i], &xs[i + 1]), midpoint(&ys[j], &ys[j + 1]));
            if cycles.iter().any(|f| inside(mesh, f, &c)) {
                covered.insert((i, j));
            }
        }
    }
    let mut out = Vec::new();
    while let Some(&seed) = covered.iter().next() {
        let mut region = BTreeSet::from([seed]);
        let mut stack = vec![seed];
        covered.remove(&seed);
        while let Some((i, j)) = stack.pop() {
            let next = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
            for c in next {
                if covered.remove(&c) {
                    region.insert(c);
                    stack.push(c);
                }
            }
        }
        out.push(region_mesh(mesh, graph, &in_comp, &region)?);
    }
    Some(out)
}

fn region_mesh(
    mesh: &TMesh,
    graph: &CvrGraph,
    in_comp: &BTreeSet<usize>,
    region: &BTreeSet<(usize, usize)>,
) -> Option<TMesh> {
    let (xs, ys) = (mesh.xs(), mesh.ys());
    let i0 = region.iter().map(|c| c.0).min()?;
    let i1 = region.iter().map(|c| c.0).max()? + 1;
    let j0 = region.iter().map(|c| c.1).min()?;
    let j1 = region.iter().map(|c| c.1).max()? + 1;
    if region.len() != (i1 - i0) * (j1 - j0) {
        return None;
    }
    let bbox = Rect::new(xs[i0].clone(), xs[i1].clone(), ys[j0].clone(), ys[j1].clone());
    let mut kept: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .filter(|(a, b)| {
            in_comp.contains(a) && bbox.contains(&mesh.vertices()[*a].point) && bbox.contains(&mesh.vertices()[*b].point)
        })
        .copied()
        .collect();
    loop {
        let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
        for &(a, b) in &kept {
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
        let before = kept.len();
        kept.retain(|(a, b)| degree[a] > 1 && degree[b] > 1);
        if kept.len() == before {
            break;
        }
    }
    let mut hs = Vec::new();
    let mut vs = Vec::new();
    for &(a, b) in &kept {
        let (p, q) = (&mesh.vertices()[a].point, &mesh.vertices()[b].point);
        if p.y == q.y {
            hs.push(HLine { y: p.y.clone(), x0: p.x.clone().min(q.x.clone()), x1: p.x.clone().max(q.x.clone()) });
        } else {
            vs.push(VLine { x: p.x.clone(), y0: p.y.clone().min(q.y.clone()), y1: p.y.clone().max(q.y.clone()) });
        }
    }
    TMesh::from_segments(&bbox, &hs, &vs).ok()
}

/// Compares `dim S̄(m,n,m-1,n-1)` over the mesh with the same-kind space two
/// degrees lower over the CVR graph.
///
/// For `m = n = 2` the lower space is piecewise constants, whose dimension is
/// the number of bounded faces. Otherwise each component with faces must
/// realize as a regular T-mesh; components without faces contribute zero.
pub fn conjecture_experiment(mesh: &TMesh, m: usize, n: usize) -> Result<ConjectureResult, OracleError> {
    assert!(m >= 2 && n >= 2, "conjecture needs m, n >= 2");
    let lhs = dim_oracle(mesh, &SpaceSpec::new(m, n, m as i32 - 1, n as i32 - 1, true))?;
    let g = cvr_graph(mesh);
    let mut per_component = Vec::new();
    if m == 2 && n == 2 {
        per_component.push(Some(g.faces));
    } else {
        let lower = SpaceSpec::new(m - 2, n - 2, m as i32 - 3, n as i32 - 3, true);
        for c in 0..g.components() {
            let has_face = g.face_cycles.iter().any(|f| g.component_nodes[c].contains(&f[0]));
            if !has_face {
                per_component.push(Some(0));
                continue;
            }
            per_component.push(match component_meshes(mesh, &g, c) {
                Some(parts) => {
                    let mut total = 0;
                    for p in &parts {
                        total += dim_oracle(p, &lower)?;
                    }
                    Some(total)
                }
                None => None,
            });
        }
    }
    let rhs = per_component.iter().try_fold(0usize, |acc, v| v.map(|x| acc + x));
    let verdict = match rhs {
        None => Verdict::Unsupported,
        Some(r) if r == lhs => Verdict::Agree,
        Some(_) => Verdict::Disagree,
    };
    Ok(ConjectureResult { m, n, lhs, rhs, per_component, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn grid(n: i64) -> TMesh {
        let v: Vec<Rational> = (0..=n).map(rat).collect();
        TMesh::tensor(&v, &v).unwrap()
    }

    #[test]
    fn small_grids() {
        let g = cvr_graph(&grid(2));
        assert_eq!((g.v(), g.e(), g.faces, g.components()), (1, 0, 0, 1));
        let g = cvr_graph(&grid(3));
        assert_eq!((g.v(), g.e(), g.faces, g.components()), (4, 4, 1, 1));
        let g = cvr_graph(&grid(5));
        assert_eq!(g.faces, 9);
        assert_eq!(g.faces, g.faces_by_euler());
    }

    #[test]
    fn conjecture_on_tensor_grid() {
        let r = conjecture_experiment(&grid(4), 2, 2).unwrap();
        assert_eq!((r.lhs, r.rhs), (4, Some(4)));
        let r = conjecture_experiment(&grid(5), 3, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Agree);
        assert_eq!(r.lhs, 4);
    }
}
