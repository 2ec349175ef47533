//! Piecewise polynomial functions over a T-mesh.

use std::sync::Arc;

use num_traits::Zero;

use crate::mesh::TMesh;
use crate::poly::Poly2;
use crate::rational::{Point, Rational};

/// A spline stored as one polynomial per cell, each expanded about its cell center.
#[derive(Clone, Debug)]
pub struct PiecewisePoly {
    pub mesh: Arc<TMesh>,
    pub m: usize,
    pub n: usize,
    pub polys: Vec<Poly2>,
    /// Whether the function is taken to vanish outside the domain.
    pub hbc: bool,
}

impl PartialEq for PiecewisePoly {
    fn eq(&self, other: &Self) -> bool {
        *self.mesh == *other.mesh && self.polys == other.polys && self.hbc == other.hbc
    }
}

impl PiecewisePoly {
    pub fn zero(mesh: Arc<TMesh>, m: usize, n: usize, hbc: bool) -> Self {
        let polys = vec![Poly2::zero(m, n); mesh.cells().len()];
        PiecewisePoly { mesh, m, n, polys, hbc }
    }

    /// Reads the oracle unknown layout: cell-major, then `i*(n+1)+j`.
    pub fn from_vector(mesh: Arc<TMesh>, m: usize, n: usize, coeffs: &[Rational], hbc: bool) -> Self {
        let k = (m + 1) * (n + 1);
        assert_eq!(coeffs.len(), k * mesh.cells().len());
        let polys = coeffs.chunks(k).map(|c| Poly2::from_coeffs(m, n, c.to_vec())).collect();
        PiecewisePoly { mesh, m, n, polys, hbc }
    }

    pub fn to_vector(&self) -> Vec<Rational> {
        self.polys.iter().flat_map(|p| p.c.iter().cloned()).collect()
    }

    /// Function with the given global polynomial (about the origin) on every cell.
    pub fn from_global(mesh: Arc<TMesh>, p: &Poly2, hbc: bool) -> Self {
        let polys = mesh.cells().iter().map(|c| {
            let ctr = c.center();
            p.shift(&ctr.x, &ctr.y)
        });
        PiecewisePoly { m: p.m, n: p.n, polys: polys.collect(), mesh, hbc }
    }

    fn eval_cell(&self, c: usize, p: &Point) -> Rational {
        let ctr = self.mesh.cells()[c].center();
        self.polys[c].eval(&(&p.x - &ctr.x), &(&p.y - &ctr.y))
    }

    /// Value at `p`. Outside the domain the result is zero for HBC functions and `None` otherwise.
    pub fn try_eval(&self, p: &Point) -> Option<Rational> {
        match self.mesh.locate(p) {
            Some(c) => Some(self.eval_cell(c, p)),
            None if self.hbc => Some(Rational::zero()),
            None => None,
        }
    }

    /// Value at `p`; zero outside the domain.
    pub fn eval(&self, p: &Point) -> Rational {
        self.try_eval(p).unwrap_or_else(Rational::zero)
    }

    /// Values from every cell whose closure contains `p`.
    pub fn eval_all(&self, p: &Point) -> Vec<Rational> {
        self.mesh.cells_at(p).into_iter().map(|c| self.eval_cell(c, p)).collect()
    }

    /// The same function over a refinement of its mesh.
    pub fn transfer(&self, target: Arc<TMesh>) -> PiecewisePoly {
        let polys = target
            .cells()
            .iter()
            .map(|tc| {
                let ctr = tc.center();
                let src = self.mesh.locate(&ctr).expect("target cell inside source domain");
                let sc = self.mesh.cells()[src].center();
                debug_assert!(self.mesh.cells()[src].contains_rect(tc), "target is not a refinement");
                self.polys[src].shift(&(&ctr.x - &sc.x), &(&ctr.y - &sc.y))
            })
            .collect();
        PiecewisePoly { mesh: target, m: self.m, n: self.n, polys, hbc: self.hbc }
    }

    pub fn add(&self, other: &PiecewisePoly) -> PiecewisePoly {
        assert!(Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh);
        let polys: Vec<Poly2> = self.polys.iter().zip(&other.polys).map(|(a, b)| a.add(b)).collect();
        PiecewisePoly {
            mesh: self.mesh.clone(),
            m: self.m.max(other.m),
            n: self.n.max(other.n),
            polys,
            hbc: self.hbc && other.hbc,
        }
    }

    pub fn scale(&self, s: &Rational) -> PiecewisePoly {
        PiecewisePoly { polys: self.polys.iter().map(|p| p.scale(s)).collect(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.polys.iter().all(Poly2::is_zero)
    }

    /// Cells on which the function is not identically zero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.polys.len()).filter(|&c| !self.polys[c].is_zero()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn transfer_preserves_values() {
        let coarse = Arc::new(TMesh::tensor(&[rat(0), rat(2)], &[rat(0), rat(2)]).unwrap());
        let fine = Arc::new(TMesh::tensor(&[rat(0), rat(1), rat(2)], &[rat(0), rat(1), rat(2)]).unwrap());
        let mut p = Poly2::zero(1, 1);
        p.set(1, 1, rat(1));
        let f = PiecewisePoly::from_global(coarse, &p, true);
        let g = f.transfer(fine);
        let q = Point::new(ratio(3, 2), ratio(1, 3));
        assert_eq!(f.eval(&q), g.eval(&q));
        assert_eq!(g.eval(&q), ratio(1, 2));
        assert_eq!(g.eval(&Point::new(rat(5), rat(0))), rat(0));
    }
}
