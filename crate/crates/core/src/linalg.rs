//! Sparse exact matrices with fraction-free rank and nullspace computation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Sparse row: `(column, value)` pairs with strictly increasing columns and no zeros.
pub type SparseRow = Vec<(usize, Rational)>;

/// Sparse exact rational matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    cols: usize,
    rows: Vec<SparseRow>,
}

fn normalize(mut entries: Vec<(usize, Rational)>) -> SparseRow {
    entries.sort_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(entries.len());
    for (c, v) in entries {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

impl RationalMatrix {
    pub fn new(cols: usize) -> Self {
        RationalMatrix { cols, rows: Vec::new() }
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = RationalMatrix::new(cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            m.push_row(r.iter().cloned().enumerate().collect());
        }
        m
    }

    /// Appends a row; duplicate columns are summed and zeros dropped.
    pub fn push_row(&mut self, entries: Vec<(usize, Rational)>) {
        let row = normalize(entries);
        if let Some((c, _)) = row.last() {
            assert!(*c < self.cols, "column {c} out of range {}", self.cols);
        }
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Matrix with rows taken in the given order.
    pub fn select_rows(&self, order: &[usize]) -> RationalMatrix {
        RationalMatrix { cols: self.cols, rows: order.iter().map(|&i| self.rows[i].clone()).collect() }
    }

    /// Matrix with columns relabelled: old column `j` becomes `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> RationalMatrix {
        assert_eq!(perm.len(), self.cols);
        let rows = self.rows.iter().map(|r| normalize(r.iter().map(|(c, v)| (perm[*c], v.clone())).collect())).collect();
        RationalMatrix { cols: self.cols, rows }
    }

    /// Stacks the rows of `other` below `self`.
    pub fn stack(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.cols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        RationalMatrix { cols: self.cols, rows }
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols);
        for r in &self.rows {
            e.insert_rational(r);
        }
        e.rank()
    }

    /// Exact basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut e = Echelon::new(self.cols);
        for r in &self.rows {
            e.insert_rational(r);
        }
        e.nullspace()
    }

    /// `A x` for a dense vector `x`.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(Rational::zero(), |acc, (c, v)| acc + v * &x[*c]))
            .collect()
    }
}

/// Incremental row echelon form over primitive integer rows.
///
/// Each stored pivot row has a positive leading entry and content one.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    cols: usize,
    pivots: BTreeMap<usize, Vec<(usize, BigInt)>>,
}

fn primitive(mut row: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let neg = row.first().is_some_and(|(_, v)| v.is_negative());
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
    if neg {
        for (_, v) in row.iter_mut() {
            *v = -&*v;
        }
    }
    row
}

fn to_integer_row(row: &[(usize, Rational)]) -> Vec<(usize, BigInt)> {
    let mut l = BigInt::one();
    for (_, v) in row {
        l = l.lcm(v.denom());
    }
    row.iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (*c, v.numer() * (&l / v.denom())))
        .collect()
}

/// `a*x - b*y` on sparse integer rows.
fn combine(a: &BigInt, x: &[(usize, BigInt)], b: &BigInt, y: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map_or(usize::MAX, |e| e.0);
        let cy = y.get(j).map_or(usize::MAX, |e| e.0);
        if cx < cy {
            out.push((cx, a * &x[i].1));
            i += 1;
        } else if cy < cx {
            out.push((cy, -(b * &y[j].1)));
            j += 1;
        } else {
            let v = a * &x[i].1 - b * &y[j].1;
            if !v.is_zero() {
                out.push((cx, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon { cols, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// Pivot columns in increasing order.
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    /// Adds a row; returns `true` when it increased the rank.
    pub fn insert_rational(&mut self, row: &[(usize, Rational)]) -> bool {
        self.insert(to_integer_row(row))
    }

    /// Reduces `row` against the stored pivots; the remainder is primitive.
    pub fn reduce(&self, row: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
        let mut row = primitive(row);
        while let Some((lead, lv)) = row.first().cloned() {
            let Some(p) = self.pivots.get(&lead) else { break };
            let pl = &p[0].1;
            let g = pl.gcd(&lv);
            row = primitive(combine(&(pl / &g), &row, &(&lv / &g), p));
        }
        row
    }

    pub fn insert(&mut self, row: Vec<(usize, BigInt)>) -> bool {
        let row = self.reduce(row);
        match row.first() {
            None => false,
            Some(&(lead, _)) => {
                self.pivots.insert(lead, row);
                true
            }
        }
    }

    /// True when `row` lies in the span of the inserted rows.
    pub fn contains(&self, row: &[(usize, Rational)]) -> bool {
        self.reduce(to_integer_row(row)).is_empty()
    }

    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let free: Vec<usize> = (0..self.cols).filter(|c| !self.pivots.contains_key(c)).collect();
        let pivots: Vec<(&usize, &Vec<(usize, BigInt)>)> = self.pivots.iter().rev().collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.cols];
                x[f] = Rational::one();
                for (&c, row) in &pivots {
                    let mut s = Rational::zero();
                    for (j, v) in row.iter().skip(1) {
                        if !x[*j].is_zero() {
                            s += Rational::from_integer(v.clone()) * &x[*j];
                        }
                    }
                    if !s.is_zero() {
                        x[c] = -s / Rational::from_integer(row[0].1.clone());
                    }
                }
                x
            })
            .collect()
    }
}

/// Rank of a dense rational matrix.
pub fn dense_rank(rows: &[Vec<Rational>]) -> usize {
    RationalMatrix::from_dense(rows).rank()
}

/// Solves `A X = B` for square invertible `A` by Gauss-Jordan elimination.
///
/// Returns `None` when `A` is singular.
pub fn solve_dense(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    let w = b.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| {
            assert_eq!(ra.len(), n);
            ra.iter().chain(rb.iter()).cloned().collect()
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        let pivot = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..n + w].to_vec()).collect())
}

/// Inverse of a square rational matrix, or `None` when singular.
pub fn inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let id: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    solve_dense(a, &id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn identity_and_zero() {
        let id: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| rat((i == j) as i64)).collect()).collect();
        assert_eq!(dense_rank(&id), 3);
        assert_eq!(dense_rank(&vec![vec![rat(0); 3]; 2]), 0);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = RationalMatrix::from_dense(&[
            vec![rat(1), rat(2), rat(3), rat(4)],
            vec![rat(2), rat(4), rat(6), rat(8)],
            vec![rat(0), rat(1), crate::rational::ratio(1, 3), rat(0)],
        ]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.apply(v).iter().all(Zero::is_zero));
        }
        assert_eq!(dense_rank(&ns), 2);
    }

    #[test]
    fn echelon_membership() {
        let mut e = Echelon::new(3);
        assert!(e.insert_rational(&[(0, rat(2)), (2, rat(4))]));
        assert!(!e.insert_rational(&[(0, rat(-1)), (2, rat(-2))]));
        assert!(e.contains(&[(0, rat(3)), (2, rat(6))]));
        assert!(!e.contains(&[(1, rat(1))]));
    }

    #[test]
    fn inverse_round_trip() {
        let a = vec![vec![rat(2), rat(1)], vec![rat(1), rat(1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![rat(1), rat(-1)], vec![rat(-1), rat(2)]]);
        assert!(inverse(&[vec![rat(1), rat(2)], vec![rat(2), rat(4)]]).is_none());
    }
}
