//! Bilinear basis functions: the cardinal basis and the hierarchical basis.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::hierarchy::HMesh;
use crate::linalg::{inverse, RationalMatrix};
use crate::mesh::{MeshError, Rect, TMesh, VertexClass};
use crate::oracle::{assemble_system, nullspace_basis, OracleError, SpaceSpec};
use crate::piecewise::PiecewisePoly;
use crate::poly::Poly2;
use crate::rational::{Point, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BasisKind {
    CardinalBilinear,
    Hierarchical,
}

/// Basis functions over one mesh, each anchored at a crossing vertex.
#[derive(Clone, Debug)]
pub struct BasisSet {
    pub functions: Vec<PiecewisePoly>,
    /// Crossing vertex ids of the mesh, one per function.
    pub anchors: Vec<usize>,
    pub kind: BasisKind,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn mesh(&self) -> Option<&Arc<TMesh>> {
        self.functions.first().map(|f| &f.mesh)
    }

    /// Sum of all functions.
    pub fn sum(&self) -> Option<PiecewisePoly> {
        let mut it = self.functions.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, f| acc.add(f)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BasisError {
    #[error("mesh has no crossing vertices")]
    NoCrossingVertices,
    #[error("interpolation system at the crossing vertices is singular")]
    SingularSystem,
    #[error("crossing vertex {0} has no level structure of a classical hierarchical mesh")]
    NotHierarchical(Point),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// The functions of `S̄(1,1,0,0)` that take the value one at one crossing
/// vertex and zero at all others.
pub fn cardinal_bilinear_basis(mesh: &TMesh) -> Result<BasisSet, BasisError> {
    let crossings = mesh.crossing_vertices();
    if crossings.is_empty() {
        return Err(BasisError::NoCrossingVertices);
    }
    let system = assemble_system(mesh, &SpaceSpec::bilinear(true))?;
    let null = nullspace_basis(&system);
    if null.len() != crossings.len() {
        return Err(BasisError::SingularSystem);
    }
    let arc = system.mesh.clone();
    let raw: Vec<PiecewisePoly> =
        null.iter().map(|v| PiecewisePoly::from_vector(arc.clone(), 1, 1, v, true)).collect();
    // a[k][i] = n_k(v_i); row i of a⁻¹ holds the weights of b_i
    let a: Vec<Vec<Rational>> = raw
        .iter()
        .map(|f| crossings.iter().map(|&v| f.eval(&mesh.vertices()[v].point)).collect())
        .collect();
    let inv = inverse(&a).ok_or(BasisError::SingularSystem)?;
    let functions = inv
        .iter()
        .map(|row| {
            let coeffs: Vec<Rational> = (0..null[0].len())
                .map(|c| row.iter().zip(&null).fold(Rational::zero(), |s, (w, n)| if w.is_zero() { s } else { s + w * &n[c] }))
                .collect();
            PiecewisePoly::from_vector(arc.clone(), 1, 1, &coeffs, true)
        })
        .collect();
    Ok(BasisSet { functions, anchors: crossings, kind: BasisKind::CardinalBilinear })
}

/// Sums the cardinal basis of `extend(mesh0, 1, 1, margin)` and compares it
/// with the constant one on every cell inside the original domain.
pub fn partition_of_unity_check(mesh0: &TMesh, margin: &Rational) -> Result<bool, BasisError> {
    Ok(unity_report(mesh0, margin)?.inside)
}

/// Outcome of the partition-of-unity comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnityReport {
    /// Sum equals one on every cell of the original domain.
    pub inside: bool,
    /// Sum equals one on every cell outside it as well.
    pub outside: bool,
    pub functions: usize,
}

pub fn unity_report(mesh0: &TMesh, margin: &Rational) -> Result<UnityReport, BasisError> {
    let ext = mesh0.extend(1, 1, margin)?;
    let bs = cardinal_bilinear_basis(&ext)?;
    let sum = bs.sum().expect("extension has crossing vertices");
    let dom = mesh0.domain();
    let one = Poly2::constant(1, 1, Rational::one());
    let (mut inside, mut outside) = (true, true);
    for (c, rect) in sum.mesh.cells().iter().enumerate() {
        let ok = sum.polys[c] == one;
        if dom.contains_rect(rect) {
            inside &= ok;
        } else {
            outside &= ok;
        }
    }
    Ok(UnityReport { inside, outside, functions: bs.len() })
}

/// Value of `f` at `p`. Every cell touching `p` must agree.
pub fn evaluate(f: &PiecewisePoly, p: &Point) -> Rational {
    let v = f.eval(p);
    debug_assert!(f.eval_all(p).iter().all(|w| *w == v), "discontinuous at {p}");
    v
}

/// True when every function is nonnegative at every corner of every cell.
pub fn nonnegativity_check(bs: &BasisSet) -> bool {
    bs.functions.iter().all(|f| {
        f.mesh.cells().iter().enumerate().all(|(c, r)| {
            let ctr = r.center();
            corners(r).iter().all(|q| !f.polys[c].eval(&(&q.x - &ctr.x), &(&q.y - &ctr.y)).is_negative())
        })
    })
}

fn corners(r: &Rect) -> [Point; 4] {
    [
        Point::new(r.x0.clone(), r.y0.clone()),
        Point::new(r.x1.clone(), r.y0.clone()),
        Point::new(r.x0.clone(), r.y1.clone()),
        Point::new(r.x1.clone(), r.y1.clone()),
    ]
}

/// Vertices where a function of `S̄(1,1,0,0)` that vanishes on every crossing
/// vertex except `anchor` may be nonzero.
///
/// Along an l-edge such a function is linear between consecutive crossing
/// vertices, so a T-vertex can only be nonzero when one of the two nearest
/// crossings or l-edge endpoints on its through l-edge is.
pub fn possibly_nonzero_vertices(mesh: &TMesh, anchor: usize) -> BTreeSet<usize> {
    let verts = mesh.vertices();
    let mut live = BTreeSet::from([anchor]);
    let brackets: Vec<(usize, [usize; 2])> = verts
        .iter()
        .enumerate()
        .filter_map(|(k, v)| {
            let through = match v.class {
                VertexClass::HTee => mesh.vertex_ledges(k)[1]?,
                VertexClass::VTee => mesh.vertex_ledges(k)[0]?,
                _ => return None,
            };
            let on = &mesh.ledges()[through].vertices;
            let pos = on.iter().position(|&w| w == k)?;
            let stop = |w: usize| w == on[0] || w == on[on.len() - 1] || verts[w].class == VertexClass::Crossing;
            let lo = on[..pos].iter().rev().copied().find(|&w| stop(w))?;
            let hi = on[pos + 1..].iter().copied().find(|&w| stop(w))?;
            Some((k, [lo, hi]))
        })
        .collect();
    loop {
        let before = live.len();
        for (k, [lo, hi]) in &brackets {
            if live.contains(lo) || live.contains(hi) {
                live.insert(*k);
            }
        }
        if live.len() == before {
            return live;
        }
    }
}

/// Cells having a corner in `vertices`.
pub fn cells_touching(mesh: &TMesh, vertices: &BTreeSet<usize>) -> BTreeSet<usize> {
    mesh.cells()
        .iter()
        .enumerate()
        .filter(|(_, r)| corners(r).iter().any(|q| mesh.vertex_at_point(q).is_some_and(|v| vertices.contains(&v))))
        .map(|(c, _)| c)
        .collect()
}

/// Support of each function lies within the cells reached by [`possibly_nonzero_vertices`].
pub fn support_bound_check(bs: &BasisSet) -> bool {
    bs.functions.iter().zip(&bs.anchors).all(|(f, &a)| {
        let allowed = cells_touching(&f.mesh, &possibly_nonzero_vertices(&f.mesh, a));
        f.support().iter().all(|c| allowed.contains(c))
    })
}

/// Exact interpolation property `b_i(v_j) = δ_ij`.
pub fn cardinal_property_check(bs: &BasisSet) -> bool {
    bs.functions.iter().enumerate().all(|(i, f)| {
        bs.anchors.iter().enumerate().all(|(j, &v)| {
            let want = if i == j { Rational::one() } else { Rational::zero() };
            f.eval(&f.mesh.vertices()[v].point) == want
        })
    })
}

/// Rank of the stacked coefficient vectors equals the number of functions.
pub fn linear_independence_check(bs: &BasisSet) -> bool {
    let Some(mesh) = bs.mesh() else { return true };
    let rows: Vec<Vec<Rational>> = bs
        .functions
        .iter()
        .map(|f| if Arc::ptr_eq(&f.mesh, mesh) { f.to_vector() } else { f.transfer(mesh.clone()).to_vector() })
        .collect();
    RationalMatrix::from_dense(&rows).rank() == bs.len()
}

/// Bilinear tensor hat with knots `xk` and `ys` over the cells of `mesh`.
pub fn tensor_hat(mesh: Arc<TMesh>, xk: [&Rational; 3], yk: [&Rational; 3]) -> PiecewisePoly {
    // Linear piece on [lo, hi] as (value at t, slope) about the given center.
    fn piece(k: [&Rational; 3], lo: &Rational, hi: &Rational, ctr: &Rational) -> Option<(Rational, Rational)> {
        if hi <= k[0] || lo >= k[2] {
            return None;
        }
        let s = if hi <= k[1] { (k[1] - k[0]).recip() } else { -(k[2] - k[1]).recip() };
        let base = if hi <= k[1] { k[0] } else { k[2] };
        Some((&s * (ctr - base), s))
    }
    let polys = mesh
        .cells()
        .iter()
        .map(|r| {
            let c = r.center();
            let mut p = Poly2::zero(1, 1);
            if let (Some((a0, a1)), Some((b0, b1))) = (piece(xk, &r.x0, &r.x1, &c.x), piece(yk, &r.y0, &r.y1, &c.y)) {
                p.set(0, 0, &a0 * &b0);
                p.set(0, 1, &a0 * &b1);
                p.set(1, 0, &a1 * &b0);
                p.set(1, 1, &a1 * &b1);
            }
            p
        })
        .collect();
    PiecewisePoly { mesh, m: 1, n: 1, polys, hbc: true }
}

/// The hierarchical basis: tensor hats of the base grid, a hat on each
/// subdivided cell for its center vertex, and a hat on two neighbouring
/// subdivided cells for each crossing at the middle of their shared edge.
pub fn hierarchical_basis(h: &HMesh) -> Result<BasisSet, BasisError> {
    let mesh = h.mesh_arc();
    let crossings = mesh.crossing_vertices();
    if crossings.is_empty() {
        return Err(BasisError::NoCrossingVertices);
    }
    let mut functions = Vec::with_capacity(crossings.len());
    for &v in &crossings {
        let p = &mesh.vertices()[v].point;
        let (kh, kv) = h.point_level(p);
        let k = kh.max(kv);
        let owners: Vec<Rect> = if k == 0 {
            let bx = h.base_xs();
            let by = h.base_ys();
            let i = bx.binary_search(&p.x).map_err(|_| BasisError::NotHierarchical(p.clone()))?;
            let j = by.binary_search(&p.y).map_err(|_| BasisError::NotHierarchical(p.clone()))?;
            if i == 0 || j == 0 || i + 1 >= bx.len() || j + 1 >= by.len() {
                return Err(BasisError::NotHierarchical(p.clone()));
            }
            vec![Rect::new(bx[i - 1].clone(), bx[i + 1].clone(), by[j - 1].clone(), by[j + 1].clone())]
        } else {
            h.subdivided_cells().filter(|c| c.level == k - 1 && c.rect.contains(p)).map(|c| c.rect.clone()).collect()
        };
        if owners.is_empty() {
            return Err(BasisError::NotHierarchical(p.clone()));
        }
        let x0 = owners.iter().map(|r| &r.x0).min().unwrap();
        let x1 = owners.iter().map(|r| &r.x1).max().unwrap();
        let y0 = owners.iter().map(|r| &r.y0).min().unwrap();
        let y1 = owners.iter().map(|r| &r.y1).max().unwrap();
        functions.push(tensor_hat(mesh.clone(), [x0, &p.x, x1], [y0, &p.y, y1]));
    }
    Ok(BasisSet { functions, anchors: crossings, kind: BasisKind::Hierarchical })
}
