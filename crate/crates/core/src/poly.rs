//! Dense univariate and bivariate polynomials with exact coefficients.
//!
//! Polynomials are expressed in local variables; the caller keeps track of
//! the origin. `shift` re-expands about a translated origin.

use num_traits::Zero;

use crate::rational::{rat, Rational};

fn binomial(n: usize, k: usize) -> Rational {
    let mut r = rat(1);
    for i in 0..k {
        r = r * rat((n - i) as i64) / rat((i + 1) as i64);
    }
    r
}

fn powers(d: &Rational, upto: usize) -> Vec<Rational> {
    let mut p = Vec::with_capacity(upto + 1);
    p.push(rat(1));
    for k in 1..=upto {
        let next = &p[k - 1] * d;
        p.push(next);
    }
    p
}

/// Univariate polynomial `Σ c[k] t^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly1 {
    pub c: Vec<Rational>,
}

impl Poly1 {
    pub fn zero(deg: usize) -> Self {
        Poly1 { c: vec![Rational::zero(); deg + 1] }
    }

    pub fn degree_bound(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.c.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Returns `q` with `q(u) = self(u + d)`.
    pub fn shift(&self, d: &Rational) -> Poly1 {
        let n = self.c.len();
        let dp = powers(d, n);
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate().take(i + 1) {
                *o += a * binomial(i, k) * &dp[i - k];
            }
        }
        Poly1 { c: out }
    }

    pub fn derivative(&self) -> Poly1 {
        if self.c.len() <= 1 {
            return Poly1::zero(0);
        }
        Poly1 {
            c: self.c.iter().enumerate().skip(1).map(|(k, a)| a * rat(k as i64)).collect(),
        }
    }

    /// Antiderivative vanishing at `t = 0`.
    pub fn antiderivative(&self) -> Poly1 {
        let mut c = vec![Rational::zero()];
        c.extend(self.c.iter().enumerate().map(|(k, a)| a / rat(k as i64 + 1)));
        Poly1 { c }
    }

    /// `∫_a^b self(t) dt` in local coordinates.
    pub fn integrate(&self, a: &Rational, b: &Rational) -> Rational {
        let f = self.antiderivative();
        f.eval(b) - f.eval(a)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn sub(&self, other: &Poly1) -> Poly1 {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![Rational::zero(); n];
        for (k, a) in self.c.iter().enumerate() {
            c[k] += a;
        }
        for (k, a) in other.c.iter().enumerate() {
            c[k] -= a;
        }
        Poly1 { c }
    }
}

/// Bivariate polynomial `Σ c[i*(n+1)+j] x^i y^j` of bi-degree `(m, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly2 {
    pub m: usize,
    pub n: usize,
    pub c: Vec<Rational>,
}

impl Poly2 {
    pub fn zero(m: usize, n: usize) -> Self {
        Poly2 { m, n, c: vec![Rational::zero(); (m + 1) * (n + 1)] }
    }

    pub fn constant(m: usize, n: usize, v: Rational) -> Self {
        let mut p = Poly2::zero(m, n);
        p.c[0] = v;
        p
    }

    /// Builds a polynomial from a coefficient vector laid out as `i*(n+1)+j`.
    pub fn from_coeffs(m: usize, n: usize, c: Vec<Rational>) -> Self {
        assert_eq!(c.len(), (m + 1) * (n + 1), "coefficient count mismatch");
        Poly2 { m, n, c }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.c[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        let k = self.idx(i, j);
        self.c[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for i in (0..=self.m).rev() {
            acc = acc * x + self.trace_coeff_in_y(i).eval(y);
        }
        acc
    }

    fn trace_coeff_in_y(&self, i: usize) -> Poly1 {
        Poly1 { c: (0..=self.n).map(|j| self.get(i, j).clone()).collect() }
    }

    /// Restriction to the horizontal line `y = y0`, as a polynomial in `x`.
    pub fn at_y(&self, y0: &Rational) -> Poly1 {
        Poly1 { c: (0..=self.m).map(|i| self.trace_coeff_in_y(i).eval(y0)).collect() }
    }

    /// Restriction to the vertical line `x = x0`, as a polynomial in `y`.
    pub fn at_x(&self, x0: &Rational) -> Poly1 {
        let xp = powers(x0, self.m);
        let mut c = vec![Rational::zero(); self.n + 1];
        for i in 0..=self.m {
            for (j, cj) in c.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *cj += a * &xp[i];
                }
            }
        }
        Poly1 { c }
    }

    /// Returns `q` with `q(u, v) = self(u + dx, v + dy)`.
    pub fn shift(&self, dx: &Rational, dy: &Rational) -> Poly2 {
        let xp = powers(dx, self.m);
        let yp = powers(dy, self.n);
        let mut tmp = Poly2::zero(self.m, self.n);
        for i in 0..=self.m {
            for j in 0..=self.n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..=i {
                    let t = a * binomial(i, k) * &xp[i - k];
                    let id = tmp.idx(k, j);
                    tmp.c[id] += t;
                }
            }
        }
        let mut out = Poly2::zero(self.m, self.n);
        for i in 0..=self.m {
            for j in 0..=self.n {
                let a = tmp.get(i, j).clone();
                if a.is_zero() {
                    continue;
                }
                for l in 0..=j {
                    let id = out.idx(i, l);
                    out.c[id] += &a * binomial(j, l) * &yp[j - l];
                }
            }
        }
        out
    }

    /// `∂/∂x`, keeping the declared bi-degree.
    pub fn dx(&self) -> Poly2 {
        let mut out = Poly2::zero(self.m, self.n);
        for i in 1..=self.m {
            for j in 0..=self.n {
                out.set(i - 1, j, self.get(i, j) * rat(i as i64));
            }
        }
        out
    }

    /// `∂/∂y`, keeping the declared bi-degree.
    pub fn dy(&self) -> Poly2 {
        let mut out = Poly2::zero(self.m, self.n);
        for i in 0..=self.m {
            for j in 1..=self.n {
                out.set(i, j - 1, self.get(i, j) * rat(j as i64));
            }
        }
        out
    }

    /// Mixed partial `∂²/∂x∂y`, lowering the bi-degree by one in each variable.
    pub fn mixed_partial(&self) -> Poly2 {
        assert!(self.m >= 1 && self.n >= 1);
        let mut out = Poly2::zero(self.m - 1, self.n - 1);
        for i in 1..=self.m {
            for j in 1..=self.n {
                out.set(i - 1, j - 1, self.get(i, j) * rat((i * j) as i64));
            }
        }
        out
    }

    /// Same polynomial with a larger declared bi-degree.
    pub fn elevate(&self, m: usize, n: usize) -> Poly2 {
        assert!(m >= self.m && n >= self.n);
        let mut out = Poly2::zero(m, n);
        for i in 0..=self.m {
            for j in 0..=self.n {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let m = self.m.max(other.m);
        let n = self.n.max(other.n);
        let mut out = self.elevate(m, n);
        for i in 0..=other.m {
            for j in 0..=other.n {
                let id = out.idx(i, j);
                out.c[id] += other.get(i, j);
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Poly2 {
        Poly2 { m: self.m, n: self.n, c: self.c.iter().map(|a| a * s).collect() }
    }

    /// `∫_{x0}^{x} self(s, y) ds` as a polynomial of bi-degree `(m+1, n)`.
    pub fn integral_x_from(&self, x0: &Rational) -> Poly2 {
        let mut out = Poly2::zero(self.m + 1, self.n);
        for i in 0..=self.m {
            for j in 0..=self.n {
                out.set(i + 1, j, self.get(i, j) / rat(i as i64 + 1));
            }
        }
        let at = out.at_x(x0);
        for (j, v) in at.c.iter().enumerate() {
            let id = out.idx(0, j);
            out.c[id] -= v;
        }
        out
    }

    /// `∫_{y0}^{y} self(x, t) dt` as a polynomial of bi-degree `(m, n+1)`.
    pub fn integral_y_from(&self, y0: &Rational) -> Poly2 {
        let mut out = Poly2::zero(self.m, self.n + 1);
        for i in 0..=self.m {
            for j in 0..=self.n {
                out.set(i, j + 1, self.get(i, j) / rat(j as i64 + 1));
            }
        }
        let at = out.at_y(y0);
        for (i, v) in at.c.iter().enumerate() {
            let id = out.idx(i, 0);
            out.c[id] -= v;
        }
        out
    }

    /// Embeds a polynomial in `x` only.
    pub fn from_x(p: &Poly1, n: usize) -> Poly2 {
        let mut out = Poly2::zero(p.degree_bound(), n);
        for (i, a) in p.c.iter().enumerate() {
            out.set(i, 0, a.clone());
        }
        out
    }

    /// Embeds a polynomial in `y` only.
    pub fn from_y(p: &Poly1, m: usize) -> Poly2 {
        let mut out = Poly2::zero(m, p.degree_bound());
        for (j, a) in p.c.iter().enumerate() {
            out.set(0, j, a.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p2(m: usize, n: usize, terms: &[(usize, usize, i64)]) -> Poly2 {
        let mut p = Poly2::zero(m, n);
        for &(i, j, v) in terms {
            p.set(i, j, rat(v));
        }
        p
    }

    #[test]
    fn shift_matches_evaluation() {
        let p = p2(2, 2, &[(0, 0, 1), (1, 0, -2), (2, 1, 3), (1, 2, 5)]);
        let (dx, dy) = (ratio(1, 3), ratio(-5, 2));
        let q = p.shift(&dx, &dy);
        for (u, v) in [(rat(0), rat(0)), (ratio(7, 5), rat(-1)), (rat(2), ratio(1, 9))] {
            assert_eq!(q.eval(&u, &v), p.eval(&(&u + &dx), &(&v + &dy)));
        }
    }

    #[test]
    fn derivatives_and_traces() {
        let p = p2(2, 2, &[(2, 2, 1)]);
        let d = p.mixed_partial();
        assert_eq!(d, p2(1, 1, &[(1, 1, 4)]));
        assert_eq!(p.at_y(&rat(2)).c, vec![rat(0), rat(0), rat(4)]);
        assert_eq!(p.at_x(&rat(3)).c, vec![rat(0), rat(0), rat(9)]);
        assert_eq!(p.dx().get(1, 2), &rat(2));
    }

    #[test]
    fn integrals() {
        let one = Poly2::constant(0, 0, rat(1));
        let ix = one.integral_x_from(&rat(0)).integral_y_from(&rat(0));
        assert_eq!(ix.eval(&rat(2), &rat(3)), rat(6));
        let q = Poly1 { c: vec![rat(0), rat(1)] };
        assert_eq!(q.integrate(&rat(0), &rat(2)), rat(2));
        assert_eq!(q.shift(&rat(1)).c, vec![rat(1), rat(1)]);
    }
}
