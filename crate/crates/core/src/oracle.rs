//! Brute-force dimension oracle.
//!
//! Every cell carries a full bi-degree `(m, n)` polynomial. Smoothness across
//! each interior minimal segment, and vanishing across boundary segments for
//! HBC spaces, become linear rows on the stacked coefficients. The dimension
//! of the spline space is the nullity of that matrix.

use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::{Echelon, RationalMatrix};
use crate::mesh::{Orientation, Side, TMesh};
use crate::piecewise::PiecewisePoly;
use crate::poly::Poly2;
use crate::rational::{midpoint, rat, Rational};

/// Largest number of unknowns the oracle accepts.
pub const MAX_UNKNOWNS: usize = 20_000;

/// Bi-degree, smoothness and boundary condition of a spline space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub m: usize,
    pub n: usize,
    pub alpha: i32,
    pub beta: i32,
    pub hbc: bool,
}

impl SpaceSpec {
    pub fn new(m: usize, n: usize, alpha: i32, beta: i32, hbc: bool) -> Self {
        SpaceSpec { m, n, alpha, beta, hbc }
    }

    /// `S(1,1,0,0)` or its HBC variant.
    pub fn bilinear(hbc: bool) -> Self {
        SpaceSpec::new(1, 1, 0, 0, hbc)
    }

    /// `S(2,2,1,1)` or its HBC variant.
    pub fn biquadratic(hbc: bool) -> Self {
        SpaceSpec::new(2, 2, 1, 1, hbc)
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let ok = |d: usize, s: i32| s >= -1 && (s < d as i32 || s == -1);
        if ok(self.m, self.alpha) && ok(self.n, self.beta) {
            Ok(())
        } else {
            Err(OracleError::InvalidSpec(*self))
        }
    }

    pub fn coeffs_per_cell(&self) -> usize {
        (self.m + 1) * (self.n + 1)
    }
}

impl std::fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = if self.hbc { "S̄" } else { "S" };
        write!(f, "{name}({},{},{},{})", self.m, self.n, self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("invalid space {0}")]
    InvalidSpec(SpaceSpec),
    #[error("{unknowns} unknowns exceed the limit of {limit}")]
    TooLarge { unknowns: usize, limit: usize },
}

/// Per-cell polynomial basis used when assembling the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalBasis {
    /// Monomials about the cell center; rows match polynomial coefficients.
    Monomial,
    /// Tensor Bernstein polynomials on the cell; rows are point collocations.
    Bernstein,
}

/// Assembled smoothness and boundary constraints.
#[derive(Clone, Debug)]
pub struct SplineSystem {
    pub mesh: Arc<TMesh>,
    pub spec: SpaceSpec,
    pub basis: LocalBasis,
    pub matrix: RationalMatrix,
}

impl SplineSystem {
    pub fn unknowns(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn dimension(&self) -> usize {
        self.unknowns() - self.matrix.rank()
    }
}

fn falling(i: usize, k: usize) -> i64 {
    (i + 1 - k..=i).map(|t| t as i64).product()
}

fn binom(n: usize, k: usize) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

fn pow(b: &Rational, e: usize) -> Rational {
    let mut r = rat(1);
    for _ in 0..e {
        r *= b;
    }
    r
}

/// Per-cell unknown layout helper: returns `(cell offset, i, j)` index.
fn unknown(spec: &SpaceSpec, cell: usize, i: usize, j: usize) -> usize {
    cell * spec.coeffs_per_cell() + i * (spec.n + 1) + j
}

/// A rule that produces constraint rows one segment side at a time.
struct SideContribution<'a> {
    spec: &'a SpaceSpec,
    mesh: &'a TMesh,
}

impl SideContribution<'_> {
    /// Rows `∂ᵏ(p_cell)` restricted to the segment line, expanded about the
    /// segment midpoint, with all entries multiplied by `sign`. Returns one
    /// entry list per `(k, l)`.
    fn monomial_rows(&self, o: Orientation, cell: usize, line: &Rational, mid: &Rational, sign: i64) -> Vec<Vec<(usize, Rational)>> {
        let spec = self.spec;
        let ctr = self.mesh.cells()[cell].center();
        // For a vertical segment the normal variable is x and the running variable is y.
        let (norm_deg, run_deg, smooth, dn, dr) = match o {
            Orientation::V => (spec.m, spec.n, spec.alpha, line - &ctr.x, mid - &ctr.y),
            Orientation::H => (spec.n, spec.m, spec.beta, line - &ctr.y, mid - &ctr.x),
        };
        let mut rows = Vec::new();
        for k in 0..=(smooth.max(-1) + 1) as usize {
            if k as i32 > smooth {
                break;
            }
            for l in 0..=run_deg {
                let mut row = Vec::new();
                for a in k..=norm_deg {
                    let fa = rat(falling(a, k) * sign) * pow(&dn, a - k);
                    if fa.is_zero() {
                        continue;
                    }
                    for b in l..=run_deg {
                        let v = &fa * rat(binom(b, l)) * pow(&dr, b - l);
                        if v.is_zero() {
                            continue;
                        }
                        let (i, j) = match o {
                            Orientation::V => (a, b),
                            Orientation::H => (b, a),
                        };
                        row.push((unknown(spec, cell, i, j), v));
                    }
                }
                rows.push(row);
            }
        }
        rows
    }

    fn bernstein_rows(&self, o: Orientation, cell: usize, line: &Rational, lo: &Rational, hi: &Rational, sign: i64) -> Vec<Vec<(usize, Rational)>> {
        let spec = self.spec;
        let basis = bernstein_cell_basis(self.mesh, cell, spec.m, spec.n);
        let ctr = self.mesh.cells()[cell].center();
        let (smooth, run_deg) = match o {
            Orientation::V => (spec.alpha, spec.n),
            Orientation::H => (spec.beta, spec.m),
        };
        let mut rows = Vec::new();
        if smooth < 0 {
            return rows;
        }
        for k in 0..=smooth as usize {
            let derived: Vec<Poly2> = basis
                .iter()
                .map(|p| {
                    let mut q = p.clone();
                    for _ in 0..k {
                        q = match o {
                            Orientation::V => q.dx(),
                            Orientation::H => q.dy(),
                        };
                    }
                    q
                })
                .collect();
            for q in 0..=run_deg {
                let t = lo + (hi - lo) * rat(q as i64 + 1) / rat(run_deg as i64 + 2);
                let (px, py) = match o {
                    Orientation::V => (line - &ctr.x, t - &ctr.y),
                    Orientation::H => (t - &ctr.x, line - &ctr.y),
                };
                let row = derived
                    .iter()
                    .enumerate()
                    .map(|(b, p)| (cell * spec.coeffs_per_cell() + b, p.eval(&px, &py) * rat(sign)))
                    .collect();
                rows.push(row);
            }
        }
        rows
    }
}

/// Tensor Bernstein basis of a cell, each function written in monomials about the cell center.
pub fn bernstein_cell_basis(mesh: &TMesh, cell: usize, m: usize, n: usize) -> Vec<Poly2> {
    let c = &mesh.cells()[cell];
    let ctr = c.center();
    let uni = |deg: usize, a: &Rational, h: &Rational, i: usize| -> Vec<Rational> {
        // B_i(s) with s = (x - a)/h, expanded in powers of x about 0 first.
        let mut coeffs = vec![rat(0); deg + 1];
        for k in 0..=deg - i {
            // C(deg,i) s^i (1-s)^(deg-i) = C(deg,i) Σ_k C(deg-i,k) (-1)^k s^(i+k)
            let v = rat(binom(deg, i) * binom(deg - i, k) * if k % 2 == 0 { 1 } else { -1 });
            coeffs[i + k] += v;
        }
        // substitute s = (x - a)/h: compose via shift of the variable
        let scaled: Vec<Rational> = coeffs.iter().enumerate().map(|(p, v)| v / pow(h, p)).collect();
        crate::poly::Poly1 { c: scaled }.shift(&-a.clone()).c
    };
    let (w, h) = (c.width(), c.height());
    let mut out = Vec::with_capacity((m + 1) * (n + 1));
    for i in 0..=m {
        let bx = uni(m, &c.x0, &w, i);
        for j in 0..=n {
            let by = uni(n, &c.y0, &h, j);
            let mut p = Poly2::zero(m, n);
            for (a, va) in bx.iter().enumerate() {
                for (b, vb) in by.iter().enumerate() {
                    p.set(a, b, va * vb);
                }
            }
            out.push(p.shift(&ctr.x, &ctr.y));
        }
    }
    out
}

/// Assembles the constraint system with the default monomial basis.
pub fn assemble_system(mesh: &TMesh, spec: &SpaceSpec) -> Result<SplineSystem, OracleError> {
    assemble_system_with(mesh, spec, LocalBasis::Monomial)
}

/// Assembles the constraint system in the requested per-cell basis.
pub fn assemble_system_with(mesh: &TMesh, spec: &SpaceSpec, basis: LocalBasis) -> Result<SplineSystem, OracleError> {
    spec.validate()?;
    let unknowns = mesh.cells().len() * spec.coeffs_per_cell();
    if unknowns > MAX_UNKNOWNS {
        return Err(OracleError::TooLarge { unknowns, limit: MAX_UNKNOWNS });
    }
    let mut matrix = RationalMatrix::new(unknowns);
    let ctx = SideContribution { spec, mesh };
    for ss in mesh.edge_segments_with_sides() {
        let seg = mesh.segment(ss.orientation, ss.segment);
        if !seg.interior && !spec.hbc {
            continue;
        }
        let (line, lo, hi) = mesh.segment_coords(seg);
        let mid = midpoint(&lo, &hi);
        let mut parts: Vec<Vec<Vec<(usize, Rational)>>> = Vec::new();
        for (side, sign) in [(ss.lower, 1), (ss.upper, -1)] {
            if let Side::Cell(c) = side {
                parts.push(match basis {
                    LocalBasis::Monomial => ctx.monomial_rows(ss.orientation, c, &line, &mid, sign),
                    LocalBasis::Bernstein => ctx.bernstein_rows(ss.orientation, c, &line, &lo, &hi, sign),
                });
            }
        }
        let nrows = parts[0].len();
        for r in 0..nrows {
            let mut row = Vec::new();
            for p in &parts {
                row.extend(p[r].iter().cloned());
            }
            matrix.push_row(row);
        }
    }
    Ok(SplineSystem { mesh: Arc::new(mesh.clone()), spec: *spec, basis, matrix })
}

/// Dimension of the spline space as the nullity of the constraint matrix.
pub fn dim_oracle(mesh: &TMesh, spec: &SpaceSpec) -> Result<usize, OracleError> {
    Ok(assemble_system(mesh, spec)?.dimension())
}

/// Exact basis of the solution space, in the oracle unknown layout.
pub fn nullspace_basis(system: &SplineSystem) -> Vec<Vec<Rational>> {
    system.matrix.nullspace()
}

/// Nullspace elements as piecewise polynomials (monomial systems only).
pub fn nullspace_functions(system: &SplineSystem) -> Vec<PiecewisePoly> {
    assert_eq!(system.basis, LocalBasis::Monomial);
    nullspace_basis(system)
        .into_iter()
        .map(|v| PiecewisePoly::from_vector(system.mesh.clone(), system.spec.m, system.spec.n, &v, system.spec.hbc))
        .collect()
}

/// Rank of an echelon-reduced stack of rows, exposed for callers that build rows incrementally.
pub fn rank_of_rows(cols: usize, rows: &[Vec<(usize, Rational)>]) -> usize {
    let mut e = Echelon::new(cols);
    for r in rows {
        e.insert_rational(r);
    }
    e.rank()
}

/// Classical count of HBC tensor B-splines of degree `(m, n)` with maximal smoothness.
pub fn tensor_bspline_hbc_count(gx: usize, gy: usize, m: usize, n: usize) -> usize {
    let f = |g: usize, d: usize| (g + 1).saturating_sub(d);
    f(gx, m) * f(gy, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn grid(n: i64) -> TMesh {
        let v: Vec<Rational> = (0..=n).map(rat).collect();
        TMesh::tensor(&v, &v).unwrap()
    }

    #[test]
    fn single_cell_cases() {
        let m = grid(1);
        let s = assemble_system(&m, &SpaceSpec::bilinear(true)).unwrap();
        assert_eq!((s.matrix.nrows(), s.unknowns(), s.dimension()), (8, 4, 0));
        assert_eq!(dim_oracle(&m, &SpaceSpec::biquadratic(false)).unwrap(), 9);
        assert!(nullspace_basis(&s).is_empty());
    }

    #[test]
    fn piecewise_constants_and_hat() {
        let m = grid(2);
        let s = assemble_system(&m, &SpaceSpec::new(0, 0, -1, -1, true)).unwrap();
        assert_eq!((s.matrix.nrows(), s.dimension()), (0, 4));
        let s = assemble_system(&m, &SpaceSpec::bilinear(true)).unwrap();
        let f = nullspace_functions(&s);
        assert_eq!(f.len(), 1);
        let c = f[0].eval(&crate::rational::Point::new(rat(1), rat(1)));
        let hat = f[0].scale(&(rat(1) / c));
        assert_eq!(hat.eval(&crate::rational::Point::new(crate::rational::ratio(1, 2), crate::rational::ratio(1, 2))), crate::rational::ratio(1, 4));
    }

    #[test]
    fn bernstein_agrees_with_monomial() {
        let m = grid(3);
        for spec in [SpaceSpec::bilinear(true), SpaceSpec::biquadratic(true), SpaceSpec::new(2, 2, 0, 0, false)] {
            let a = assemble_system_with(&m, &spec, LocalBasis::Monomial).unwrap().dimension();
            let b = assemble_system_with(&m, &spec, LocalBasis::Bernstein).unwrap().dimension();
            assert_eq!(a, b, "{spec}");
        }
    }

    #[test]
    fn tensor_counts() {
        let m = grid(4);
        assert_eq!(dim_oracle(&m, &SpaceSpec::biquadratic(true)).unwrap(), tensor_bspline_hbc_count(3, 3, 2, 2));
        assert_eq!(dim_oracle(&m, &SpaceSpec::new(3, 3, 2, 2, true)).unwrap(), tensor_bspline_hbc_count(3, 3, 3, 3));
    }

    #[test]
    fn invalid_spec_and_guard() {
        assert!(matches!(dim_oracle(&grid(1), &SpaceSpec::new(1, 1, 1, 0, true)), Err(OracleError::InvalidSpec(_))));
        assert!(matches!(dim_oracle(&grid(50), &SpaceSpec::biquadratic(true)), Err(OracleError::TooLarge { .. })));
    }
}
