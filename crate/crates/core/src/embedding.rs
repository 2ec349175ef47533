//! The mixed-derivative embedding and the l-edge constraint systems it induces.
//!
//! A spline `f` of `S̄(m,n,m-1,n-1)` is mapped to `g = ∂²f/∂x∂y`, which lies in
//! `S̄(m-1,n-1,m-2,n-2)`. Conversely `ℐ(g)(x,y) = ∫∫_{s<x,t<y} g` lands back in
//! the larger space exactly when `g` satisfies one linear constraint per l-edge.
//! The systems below build those constraints for `m = n = 1` (unknowns are the
//! cell constants of `g`) and `m = n = 2` (unknowns are coefficients of `g` in a
//! basis of `S̄(1,1,0,0)`).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::basis::{hierarchical_basis, BasisError, BasisSet};
use crate::hierarchy::{branch_decomposition, support_ledges, HMesh, HierError};
use crate::linalg::RationalMatrix;
use crate::mesh::{Orientation, TMesh};
use crate::oracle::{assemble_system, nullspace_functions, OracleError, SpaceSpec};
use crate::piecewise::PiecewisePoly;
use crate::poly::Poly2;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("mixed derivative needs degree at least one in both variables")]
    DegreeZero,
    #[error("integration needs a function that vanishes outside the mesh")]
    NoHbc,
    #[error("mesh is not a classical hierarchical mesh")]
    NotHierarchical,
    #[error("row {row} breaks triangularity: {detail}")]
    TriangularityViolated { row: usize, detail: String },
    #[error(transparent)]
    Hier(#[from] HierError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Per-cell mixed partial derivative.
pub fn apply_d(f: &PiecewisePoly) -> Result<PiecewisePoly, EmbeddingError> {
    if f.m == 0 || f.n == 0 {
        return Err(EmbeddingError::DegreeZero);
    }
    Ok(PiecewisePoly {
        mesh: f.mesh.clone(),
        m: f.m - 1,
        n: f.n - 1,
        polys: f.polys.iter().map(Poly2::mixed_partial).collect(),
        hbc: f.hbc,
    })
}

/// `ℐ(g)(x,y) = ∫_{-∞}^x ∫_{-∞}^y g(s,t) dt ds` over the tensor grid of all mesh lines.
pub fn apply_i(g: &PiecewisePoly) -> Result<PiecewisePoly, EmbeddingError> {
    if !g.hbc {
        return Err(EmbeddingError::NoHbc);
    }
    let mesh = &g.mesh;
    let (xs, ys) = (mesh.xs(), mesh.ys());
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let fine = Arc::new(TMesh::tensor(xs, ys).expect("mesh lines form a tensor grid"));
    let (m, n) = (g.m + 1, g.n + 1);
    // g on each fine cell, expanded about the origin
    let global = |i: usize, j: usize| {
        let c = mesh.fine_cell(i, j);
        let ctr = mesh.cells()[c].center();
        g.polys[c].shift(&-ctr.x, &-ctr.y)
    };
    // h[i][j]: ∫_{-∞}^x ∫_{y_j}^y g; f[i][j]: the full integral
    let mut f_prev_row: Vec<Poly2> = vec![Poly2::zero(m, n); nx];
    let mut out = vec![Poly2::zero(m, n); nx * ny];
    for j in 0..ny {
        let mut h_left = Poly2::zero(m, n);
        for i in 0..nx {
            let inner = global(i, j).integral_x_from(&xs[i]).integral_y_from(&ys[j]).elevate(m, n);
            let h = Poly2::from_y(&h_left.at_x(&xs[i]), m).elevate(m, n).add(&inner);
            let below = Poly2::from_x(&f_prev_row[i].at_y(&ys[j]), n).elevate(m, n);
            let f = below.add(&h);
            out[j * nx + i] = f.clone();
            f_prev_row[i] = f;
            h_left = h;
        }
    }
    let polys = fine
        .cells()
        .iter()
        .map(|r| {
            let i = xs.binary_search(&r.x0).unwrap();
            let j = ys.binary_search(&r.y0).unwrap();
            let c = r.center();
            out[j * nx + i].shift(&c.x, &c.y)
        })
        .collect();
    Ok(PiecewisePoly { mesh: fine, m, n, polys, hbc: true })
}

/// Which constraint a row encodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RowForm {
    /// Jump of the transverse integral across one l-edge.
    Jump,
    /// Integral over a strip between two neighbouring lines of the tensor mesh.
    Strip,
    /// Integral of `g` along a full line of the tensor mesh.
    LineIntegral,
    /// Collinearity of integrals on the l-edge and its neighbouring lines.
    NeighbourLines,
    /// Collinearity of integrals on the l-edge and its support l-edges.
    SupportLines,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowLabel {
    pub form: RowForm,
    pub orientation: Orientation,
    /// Mesh l-edge id when the row belongs to one l-edge.
    pub ledge: Option<usize>,
}

/// A linear constraint system over the coefficients of `g`.
#[derive(Clone, Debug)]
pub struct EmbeddingConstraints {
    /// The space `g` ranges over.
    pub image: SpaceSpec,
    pub matrix: RationalMatrix,
    pub labels: Vec<RowLabel>,
}

impl EmbeddingConstraints {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn unknowns(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Number of rows minus rank.
    pub fn defective_rank(&self) -> usize {
        self.rows() - self.rank()
    }

    /// Dimension of the space `ℐ` maps these `g` into.
    pub fn dimension(&self) -> usize {
        self.unknowns() - self.rank()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Below,
    Above,
}

fn power(t: &Rational, k: usize) -> Rational {
    (0..k).fold(Rational::one(), |a, _| a * t)
}

fn falling(j: usize, d: usize) -> Rational {
    (0..d).fold(Rational::one(), |a, k| a * Rational::from_integer(((j - k) as i64).into()))
}

/// `∫_a^b (s-c)^i ds`.
fn moment(a: &Rational, b: &Rational, c: &Rational, i: usize) -> Rational {
    let k = Rational::from_integer(((i + 1) as i64).into());
    (power(&(b - c), i + 1) - power(&(a - c), i + 1)) / k
}

/// Functional `∫_lo^hi ∂^d/∂n^d g(·)` along a line, taken from the cells on one side,
/// over per-cell coefficients of bi-degree `(p, q)`.
#[allow(clippy::too_many_arguments)]
fn line_functional(
    mesh: &TMesh,
    p: usize,
    q: usize,
    o: Orientation,
    coord: &Rational,
    lo: &Rational,
    hi: &Rational,
    side: Side,
    d: usize,
) -> Vec<(usize, Rational)> {
    let k = (p + 1) * (q + 1);
    let mut row = Vec::new();
    for (c, r) in mesh.cells().iter().enumerate() {
        let (near, along0, along1) = match (o, side) {
            (Orientation::H, Side::Above) => (&r.y0, &r.x0, &r.x1),
            (Orientation::H, Side::Below) => (&r.y1, &r.x0, &r.x1),
            (Orientation::V, Side::Above) => (&r.x0, &r.y0, &r.y1),
            (Orientation::V, Side::Below) => (&r.x1, &r.y0, &r.y1),
        };
        if near != coord {
            continue;
        }
        let a = along0.max(lo);
        let b = along1.min(hi);
        if a >= b {
            continue;
        }
        let ctr = r.center();
        for i in 0..=p {
            for j in 0..=q {
                let v = match o {
                    Orientation::H if j >= d => {
                        moment(a, b, &ctr.x, i) * falling(j, d) * power(&(coord - &ctr.y), j - d)
                    }
                    Orientation::V if i >= d => {
                        moment(a, b, &ctr.y, j) * falling(i, d) * power(&(coord - &ctr.x), i - d)
                    }
                    _ => continue,
                };
                if !v.is_zero() {
                    row.push((c * k + i * (q + 1) + j, v));
                }
            }
        }
    }
    row
}

fn scaled(row: Vec<(usize, Rational)>, s: &Rational) -> Vec<(usize, Rational)> {
    row.into_iter().map(|(c, v)| (c, v * s)).collect()
}

fn jump_functional(mesh: &TMesh, p: usize, q: usize, o: Orientation, coord: &Rational, lo: &Rational, hi: &Rational, d: usize) -> Vec<(usize, Rational)> {
    let mut row = line_functional(mesh, p, q, o, coord, lo, hi, Side::Above, d);
    row.extend(scaled(line_functional(mesh, p, q, o, coord, lo, hi, Side::Below, d), &-Rational::one()));
    row
}

/// Integral of a continuous `g` along a line piece.
fn on_line_functional(mesh: &TMesh, p: usize, q: usize, o: Orientation, coord: &Rational, lo: &Rational, hi: &Rational) -> Vec<(usize, Rational)> {
    let dom = mesh.domain();
    let top = match o {
        Orientation::H => &dom.y1,
        Orientation::V => &dom.x1,
    };
    let side = if coord < top { Side::Above } else { Side::Below };
    line_functional(mesh, p, q, o, coord, lo, hi, side, 0)
}

fn lines(mesh: &TMesh, o: Orientation) -> &[Rational] {
    match o {
        Orientation::H => mesh.ys(),
        Orientation::V => mesh.xs(),
    }
}

fn full_span(mesh: &TMesh, o: Orientation) -> (Rational, Rational) {
    let d = mesh.domain();
    match o {
        Orientation::H => (d.x0, d.x1),
        Orientation::V => (d.y0, d.y1),
    }
}

const BOTH: [Orientation; 2] = [Orientation::H, Orientation::V];

/// Interior l-edge ids on each interior line, the last one (by span) dropped.
fn all_but_last_per_line(mesh: &TMesh, o: Orientation) -> Vec<usize> {
    let mut by_line: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for l in mesh.interior_ledges() {
        let e = &mesh.ledges()[l];
        if e.orientation == o {
            by_line.entry(e.line_coord.clone()).or_default().push(l);
        }
    }
    by_line
        .into_values()
        .flat_map(|mut v| {
            v.sort_by(|a, b| mesh.ledges()[*a].lo.cmp(&mesh.ledges()[*b].lo));
            v.pop();
            v
        })
        .collect()
}

fn label(form: RowForm, o: Orientation, ledge: Option<usize>) -> RowLabel {
    RowLabel { form, orientation: o, ledge }
}

/// Jump rows for every l-edge, the four boundary l-edges included (`E + 4` rows),
/// over the cell constants of `g`.
pub fn raw_bilinear_constraints(mesh: &TMesh) -> EmbeddingConstraints {
    let mut matrix = RationalMatrix::new(mesh.cells().len());
    let mut labels = Vec::new();
    for (id, l) in mesh.ledges().iter().enumerate() {
        matrix.push_row(jump_functional(mesh, 0, 0, l.orientation, &l.line_coord, &l.lo, &l.hi, 0));
        labels.push(label(RowForm::Jump, l.orientation, Some(id)));
    }
    EmbeddingConstraints { image: SpaceSpec::new(0, 0, -1, -1, true), matrix, labels }
}

/// `∫ g(·, t⁺)` across the whole domain for a piecewise constant `g`, taken
/// from every cell whose interior meets the line just past `t`.
fn strip_functional(mesh: &TMesh, o: Orientation, t: &Rational) -> Vec<(usize, Rational)> {
    mesh.cells()
        .iter()
        .enumerate()
        .filter_map(|(c, r)| {
            let (lo, hi, len) = match o {
                Orientation::H => (&r.y0, &r.y1, r.width()),
                Orientation::V => (&r.x0, &r.x1, r.height()),
            };
            (lo <= t && t < hi).then_some((c, len))
        })
        .collect()
}

/// The `E + 2` reduced rows: jump rows for all but one l-edge on each
/// interior line, plus the vanishing integral over every strip between
/// neighbouring lines.
pub fn bilinear_constraints(mesh: &TMesh) -> EmbeddingConstraints {
    let mut matrix = RationalMatrix::new(mesh.cells().len());
    let mut labels = Vec::new();
    for o in BOTH {
        for l in all_but_last_per_line(mesh, o) {
            let e = &mesh.ledges()[l];
            matrix.push_row(jump_functional(mesh, 0, 0, o, &e.line_coord, &e.lo, &e.hi, 0));
            labels.push(label(RowForm::Jump, o, Some(l)));
        }
        let ls = lines(mesh, o);
        for t in &ls[..ls.len() - 1] {
            matrix.push_row(strip_functional(mesh, o, t));
            labels.push(label(RowForm::Strip, o, None));
        }
    }
    EmbeddingConstraints { image: SpaceSpec::new(0, 0, -1, -1, true), matrix, labels }
}

/// Coefficient vectors of a bilinear basis in the per-cell layout.
fn basis_vectors(basis: &[PiecewisePoly], mesh: &Arc<TMesh>) -> Vec<Vec<Rational>> {
    basis
        .iter()
        .map(|f| {
            assert!(f.m == 1 && f.n == 1, "basis must be piecewise bilinear");
            if Arc::ptr_eq(&f.mesh, mesh) || *f.mesh == **mesh {
                f.to_vector()
            } else {
                f.transfer(mesh.clone()).to_vector()
            }
        })
        .collect()
}

/// Applies a functional over per-cell coefficients to each basis function.
fn project(functional: &[(usize, Rational)], vectors: &[Vec<Rational>]) -> Vec<(usize, Rational)> {
    vectors
        .iter()
        .enumerate()
        .map(|(k, v)| (k, functional.iter().fold(Rational::zero(), |s, (c, w)| if v[*c].is_zero() { s } else { s + w * &v[*c] })))
        .collect()
}

struct Builder<'a> {
    mesh: &'a TMesh,
    vectors: Vec<Vec<Rational>>,
    matrix: RationalMatrix,
    labels: Vec<RowLabel>,
}

impl<'a> Builder<'a> {
    fn new(mesh: &'a TMesh, arc: &Arc<TMesh>, basis: &[PiecewisePoly]) -> Self {
        let vectors = basis_vectors(basis, arc);
        Builder { mesh, matrix: RationalMatrix::new(vectors.len()), vectors, labels: Vec::new() }
    }

    fn push(&mut self, functional: Vec<(usize, Rational)>, l: RowLabel) {
        self.matrix.push_row(project(&functional, &self.vectors));
        self.labels.push(l);
    }

    fn jump(&mut self, ledge: usize) {
        let e = &self.mesh.ledges()[ledge];
        let f = jump_functional(self.mesh, 1, 1, e.orientation, &e.line_coord, &e.lo, &e.hi, 1);
        self.push(f, label(RowForm::Jump, e.orientation, Some(ledge)));
    }

    /// `(t1-t0) ∫g(t) = (t1-t) ∫g(t0) + (t-t0) ∫g(t1)` over the span of `ledge`.
    fn collinear(&mut self, ledge: usize, t0: &Rational, t1: &Rational, form: RowForm) {
        let e = &self.mesh.ledges()[ledge];
        let (o, t) = (e.orientation, &e.line_coord);
        let at = |s: &Rational| on_line_functional(self.mesh, 1, 1, o, s, &e.lo, &e.hi);
        let mut f = scaled(at(t), &(t1 - t0));
        f.extend(scaled(at(t0), &(t - t1)));
        f.extend(scaled(at(t1), &(t0 - t)));
        self.push(f, label(form, o, Some(ledge)));
    }

    fn finish(self) -> EmbeddingConstraints {
        EmbeddingConstraints { image: SpaceSpec::bilinear(true), matrix: self.matrix, labels: self.labels }
    }
}

/// Oracle nullspace basis of `S̄(1,1,0,0)`.
pub fn oracle_bilinear_basis(mesh: &TMesh) -> Result<Vec<PiecewisePoly>, OracleError> {
    Ok(nullspace_functions(&assemble_system(mesh, &SpaceSpec::bilinear(true))?))
}

/// Jump rows of `∫ ∂g/∂n` for every interior l-edge (`E` rows); with
/// `include_boundary` the four boundary l-edges are added (`E + 4` rows).
pub fn biquadratic_jump_constraints(mesh: &TMesh, basis: &[PiecewisePoly], include_boundary: bool) -> EmbeddingConstraints {
    let arc = Arc::new(mesh.clone());
    let mut b = Builder::new(mesh, &arc, basis);
    for (id, l) in mesh.ledges().iter().enumerate() {
        if include_boundary || !l.is_boundary {
            b.jump(id);
        }
    }
    b.finish()
}

/// The `E` interior jump rows over the oracle basis of `S̄(1,1,0,0)`.
pub fn raw_biquadratic_constraints(mesh: &TMesh) -> Result<EmbeddingConstraints, EmbeddingError> {
    let basis = oracle_bilinear_basis(mesh)?;
    Ok(biquadratic_jump_constraints(mesh, &basis, false))
}

/// `E` rows: jump rows for all but one l-edge per interior line and the
/// vanishing integral of `g` along each interior line.
pub fn biquadratic_line_constraints(mesh: &TMesh, basis: &[PiecewisePoly]) -> EmbeddingConstraints {
    let arc = Arc::new(mesh.clone());
    let mut b = Builder::new(mesh, &arc, basis);
    for o in BOTH {
        for l in all_but_last_per_line(mesh, o) {
            b.jump(l);
        }
        let (lo, hi) = full_span(mesh, o);
        let ls = lines(mesh, o);
        for t in &ls[1..ls.len() - 1] {
            let f = on_line_functional(mesh, 1, 1, o, t, &lo, &hi);
            b.push(f, label(RowForm::LineIntegral, o, None));
        }
    }
    b.finish()
}

/// One row per interior l-edge: integrals on the l-edge and on the two
/// neighbouring lines of the tensor mesh over the same span are collinear.
pub fn biquadratic_neighbour_constraints(mesh: &TMesh, basis: &[PiecewisePoly]) -> EmbeddingConstraints {
    let arc = Arc::new(mesh.clone());
    let mut b = Builder::new(mesh, &arc, basis);
    for l in mesh.interior_ledges() {
        let e = &mesh.ledges()[l];
        let ls = lines(mesh, e.orientation);
        let k = ls.binary_search(&e.line_coord).unwrap();
        b.collinear(l, &ls[k - 1].clone(), &ls[k + 1].clone(), RowForm::NeighbourLines);
    }
    b.finish()
}

/// Form used for the rows of level-zero l-edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelZeroForm {
    /// Collinearity with the nearest level-zero lines, like every other level.
    SupportLines,
    /// Vanishing integral of `g` along the l-edge.
    LineIntegral,
}

/// One row per interior l-edge of a hierarchical mesh in the support-l-edge
/// form, over the coefficients of `g` in `basis`.
pub fn biquadratic_constraints_with(h: &HMesh, basis: &BasisSet, level0: LevelZeroForm) -> Result<EmbeddingConstraints, EmbeddingError> {
    let mesh = h.mesh();
    let arc = h.mesh_arc();
    let mut b = Builder::new(mesh, &arc, &basis.functions);
    for l in mesh.interior_ledges() {
        let e = &mesh.ledges()[l];
        let level = h.line_level(e.orientation, &e.line_coord);
        if level == 0 && level0 == LevelZeroForm::LineIntegral {
            let f = on_line_functional(mesh, 1, 1, e.orientation, &e.line_coord, &e.lo, &e.hi);
            b.push(f, label(RowForm::LineIntegral, e.orientation, Some(l)));
            continue;
        }
        let (lb, lt) = support_ledges(h, l)?;
        let t0 = mesh.ledges()[lb].line_coord.clone();
        let t1 = mesh.ledges()[lt].line_coord.clone();
        b.collinear(l, &t0, &t1, RowForm::SupportLines);
    }
    Ok(b.finish())
}

/// Support-l-edge rows over the hierarchical basis, level-zero rows as line integrals.
pub fn biquadratic_constraints(h: &HMesh) -> Result<(EmbeddingConstraints, BasisSet), EmbeddingError> {
    let basis = hierarchical_basis(h)?;
    let c = biquadratic_constraints_with(h, &basis, LevelZeroForm::LineIntegral)?;
    Ok((c, basis))
}

/// A nonzero entry outside the pattern allowed for its row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparsityViolation {
    pub row: usize,
    pub ledge: usize,
    pub anchor: usize,
}

/// Checks that a level-`k` row only involves anchors on its l-edge, or (for
/// `k > 0`) anchors whose level across the l-edge is below `k` and whose
/// level along it is above `k`.
pub fn sparsity_violations(h: &HMesh, c: &EmbeddingConstraints, basis: &BasisSet) -> Vec<SparsityViolation> {
    let mesh = h.mesh();
    let mut out = Vec::new();
    for (r, lab) in c.labels.iter().enumerate() {
        let Some(l) = lab.ledge else { continue };
        let e = &mesh.ledges()[l];
        let k = h.line_level(e.orientation, &e.line_coord);
        for (col, v) in c.matrix.row(r) {
            if v.is_zero() {
                continue;
            }
            let a = basis.anchors[*col];
            let p = &mesh.vertices()[a].point;
            let on = match e.orientation {
                Orientation::H => p.y == e.line_coord && e.spans(&p.x),
                Orientation::V => p.x == e.line_coord && e.spans(&p.y),
            };
            let (kh, kv) = h.point_level(p);
            let (same, other) = match e.orientation {
                Orientation::H => (kh, kv),
                Orientation::V => (kv, kh),
            };
            let allowed = on || (k > 0 && same < k && other > k);
            if !allowed {
                out.push(SparsityViolation { row: r, ledge: l, anchor: a });
            }
        }
    }
    out
}

/// The reordered constraint matrix and what was verified about it.
#[derive(Clone, Debug, Serialize)]
pub struct OrderingReport {
    /// Rows kept (every interior l-edge but the root), in order.
    pub ledges: Vec<usize>,
    /// Characteristic vertex per kept row; column `i` of the permuted matrix.
    pub characteristic: Vec<usize>,
    pub dropped: usize,
    pub rows: usize,
    pub rank: usize,
    pub v_plus: usize,
    /// `V⁺ - rank`.
    pub dimension: usize,
}

/// Builds the support-l-edge system over the hierarchical basis, drops the
/// root row, orders rows by (level, branch, distance) and columns by
/// characteristic vertex, and verifies the triangular pattern.
pub fn ordered_constraint_matrix(h: &HMesh) -> Result<(RationalMatrix, OrderingReport), EmbeddingError> {
    let mesh = h.mesh();
    let bd = branch_decomposition(h)?;
    let (c, basis) = biquadratic_constraints(h)?;
    let row_of: BTreeMap<usize, usize> = c.labels.iter().enumerate().filter_map(|(r, l)| l.ledge.map(|e| (e, r))).collect();
    let col_of: BTreeMap<usize, usize> = basis.anchors.iter().enumerate().map(|(k, &a)| (a, k)).collect();
    let order = bd.ordered_ledges(mesh);
    let characteristic: Vec<usize> = order.iter().map(|l| bd.characteristic[l]).collect();
    // new column positions: characteristic vertices first, the rest after
    let mut perm = vec![usize::MAX; basis.len()];
    for (i, v) in characteristic.iter().enumerate() {
        let old = col_of[v];
        if perm[old] != usize::MAX {
            return Err(EmbeddingError::TriangularityViolated { row: i, detail: format!("vertex {v} is characteristic for two rows") });
        }
        perm[old] = i;
    }
    let mut next = characteristic.len();
    for p in perm.iter_mut().filter(|p| **p == usize::MAX) {
        *p = next;
        next += 1;
    }
    let rows: Vec<usize> = order.iter().map(|l| row_of[l]).collect();
    let m = c.matrix.select_rows(&rows).permute_columns(&perm);
    for i in 0..m.nrows() {
        if let Some((j, _)) = m.row(i).iter().find(|(j, _)| *j < i) {
            return Err(EmbeddingError::TriangularityViolated {
                row: i,
                detail: format!("entry in column {j} of l-edge {} below the diagonal", order[i]),
            });
        }
        if m.get(i, i).is_zero() {
            return Err(EmbeddingError::TriangularityViolated { row: i, detail: format!("zero diagonal for l-edge {}", order[i]) });
        }
    }
    let rank = m.rank();
    let v_plus = basis.len();
    let report = OrderingReport {
        ledges: order,
        characteristic,
        dropped: bd.root,
        rows: m.nrows(),
        rank,
        v_plus,
        dimension: v_plus - rank,
    };
    Ok((m, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::CellRef;
    use crate::oracle::dim_oracle;
    use crate::rational::{rat, ratio, Point};

    fn grid(n: i64) -> TMesh {
        let v: Vec<Rational> = (0..n).map(rat).collect();
        TMesh::tensor(&v, &v).unwrap()
    }

    #[test]
    fn derivative_and_integral_of_monomials() {
        let mesh = Arc::new(grid(2));
        let mut xy = Poly2::zero(1, 1);
        xy.set(1, 1, rat(1));
        let f = PiecewisePoly::from_global(mesh.clone(), &xy, true);
        assert_eq!(apply_d(&f).unwrap().polys[0], Poly2::constant(0, 0, rat(1)));
        let g = PiecewisePoly::from_global(mesh, &Poly2::constant(0, 0, rat(1)), true);
        let i = apply_i(&g).unwrap();
        let q = Point::new(ratio(1, 3), ratio(3, 4));
        assert_eq!(i.eval(&q), ratio(1, 4));
    }

    #[test]
    fn integral_inverts_derivative_on_hbc_splines() {
        let mesh = grid(5);
        let sys = assemble_system(&mesh, &SpaceSpec::biquadratic(true)).unwrap();
        for f in nullspace_functions(&sys) {
            let back = apply_i(&apply_d(&f).unwrap()).unwrap();
            assert_eq!(back.polys, f.transfer(back.mesh.clone()).polys);
        }
    }

    #[test]
    fn bilinear_system_counts() {
        let one = bilinear_constraints(&grid(2));
        assert_eq!((one.rows(), one.rank(), one.dimension()), (2, 1, 0));
        let g3 = bilinear_constraints(&grid(3));
        assert_eq!((g3.unknowns(), g3.rows(), g3.rank(), g3.dimension()), (4, 4, 3, 1));
        assert_eq!(raw_bilinear_constraints(&grid(3)).rank(), 3);
    }

    #[test]
    fn biquadratic_forms_on_tensor_grid() {
        let mesh = grid(5);
        let basis = oracle_bilinear_basis(&mesh).unwrap();
        let raw = biquadratic_jump_constraints(&mesh, &basis, false);
        assert_eq!((raw.rows(), raw.rank()), (6, 5));
        assert_eq!(raw.dimension(), 4);
        assert_eq!(biquadratic_jump_constraints(&mesh, &basis, true).rank(), 5);
        assert_eq!(biquadratic_line_constraints(&mesh, &basis).rank(), 5);
        assert_eq!(biquadratic_neighbour_constraints(&mesh, &basis).rank(), 5);
    }

    #[test]
    fn hierarchical_rows_and_ordering() {
        let v: Vec<Rational> = (0..4).map(rat).collect();
        let h = HMesh::new(v.clone(), v)
            .unwrap()
            .subdivide(&CellRef { level: 0, center: Point::new(ratio(1, 2), ratio(3, 2)) })
            .unwrap()
            .subdivide(&CellRef { level: 0, center: Point::new(ratio(3, 2), ratio(3, 2)) })
            .unwrap();
        let (c, basis) = biquadratic_constraints(&h).unwrap();
        assert!(sparsity_violations(&h, &c, &basis).is_empty());
        let support = biquadratic_constraints_with(&h, &basis, LevelZeroForm::SupportLines).unwrap();
        assert_eq!(support.rank(), c.rank());
        let (_, report) = ordered_constraint_matrix(&h).unwrap();
        let s = h.mesh().stats();
        assert_eq!(report.rows, s.e - 1);
        assert_eq!(report.rank, s.e - 1);
        assert_eq!(report.dimension, dim_oracle(h.mesh(), &SpaceSpec::biquadratic(true)).unwrap());
    }
}
