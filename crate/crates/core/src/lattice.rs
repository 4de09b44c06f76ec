//! Exact arithmetic over finitely generated free abelian groups.
//!
//! Everything downstream works with three kinds of coordinates on a fixed
//! `Z^n`: integral vectors ([`LatVec`]), rational vectors ([`RatVec`]) and
//! torsion vectors ([`TorsionVec`], i.e. elements of `(Q/Z)^n` stored as
//! reduced representatives in `[0, 1)`).  All bases of rational subspaces
//! are kept in a canonical reduced row-echelon form so that equal subspaces
//! compare equal componentwise.

use num::bigint::Sign;
use num::traits::Euclid;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

/// Integral coordinate vector.
pub type LatVec = Vec<BigInt>;
/// Rational coordinate vector.
pub type RatVec = Vec<BigRational>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not invertible over the integers (determinant {0})")]
    NotUnimodular(BigInt),
    #[error("matrix is not square: {rows} rows, {cols} cols")]
    NotSquare { rows: usize, cols: usize },
}

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn lat_vec(v: &[i64]) -> LatVec {
    v.iter().map(|&x| int(x)).collect()
}

pub fn rat_vec_int(v: &[i64]) -> RatVec {
    v.iter().map(|&x| BigRational::from(int(x))).collect()
}

pub fn to_rat_vec(v: &[BigInt]) -> RatVec {
    v.iter().map(|x| BigRational::from(x.clone())).collect()
}

pub fn zero_rat_vec(n: usize) -> RatVec {
    vec![BigRational::zero(); n]
}

/// The perfect pairing `Z^n x Z^n -> Z` (and its rational extensions) is the
/// standard dot product; characters pair with cocharacters through it.
pub fn pair(x: &[BigInt], y: &[BigInt]) -> BigInt {
    assert_eq!(x.len(), y.len(), "pairing of unequal lengths");
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn pair_rat(x: &[BigRational], y: &[BigRational]) -> BigRational {
    assert_eq!(x.len(), y.len(), "pairing of unequal lengths");
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Pair an integral vector against a rational one.
pub fn pair_ir(x: &[BigInt], y: &[BigRational]) -> BigRational {
    assert_eq!(x.len(), y.len(), "pairing of unequal lengths");
    x.iter()
        .zip(y)
        .map(|(a, b)| BigRational::from(a.clone()) * b)
        .sum()
}

pub fn add_vec(x: &[BigInt], y: &[BigInt]) -> LatVec {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub_vec(x: &[BigInt], y: &[BigInt]) -> LatVec {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn neg_vec(x: &[BigInt]) -> LatVec {
    x.iter().map(|a| -a).collect()
}

pub fn scale_vec(c: &BigInt, x: &[BigInt]) -> LatVec {
    x.iter().map(|a| c * a).collect()
}

pub fn add_rat_vec(x: &[BigRational], y: &[BigRational]) -> RatVec {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub_rat_vec(x: &[BigRational], y: &[BigRational]) -> RatVec {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn scale_rat_vec(c: &BigRational, x: &[BigRational]) -> RatVec {
    x.iter().map(|a| c * a).collect()
}

pub fn is_zero_vec(x: &[BigInt]) -> bool {
    x.iter().all(|a| a.is_zero())
}

pub fn is_zero_rat_vec(x: &[BigRational]) -> bool {
    x.iter().all(|a| a.is_zero())
}

/// A torsion vector: an element of `(Q/Z)^n` with every coordinate reduced
/// into `[0, 1)`.  These model finite-order elements of a torus whose
/// cocharacter lattice is identified with `Z^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionVec(Vec<BigRational>);

impl TorsionVec {
    /// Reduce arbitrary rational coordinates modulo `Z`.
    pub fn new(coords: RatVec) -> Self {
        TorsionVec(coords.into_iter().map(|c| fract(&c)).collect())
    }

    pub fn zero(n: usize) -> Self {
        TorsionVec(zero_rat_vec(n))
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        TorsionVec::new(pairs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    pub fn coords(&self) -> &RatVec {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Multiplicative order: the least `k >= 1` with `k * self = 0`, i.e. the
    /// lcm of the coordinate denominators.
    pub fn order(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, c| num::integer::lcm(acc, c.denom().clone()))
    }

    /// Pair against an integral vector, landing in `Q/Z` (reduced to `[0,1)`).
    pub fn pair_mod_z(&self, v: &[BigInt]) -> BigRational {
        fract(&pair_ir(v, &self.0))
    }

    /// True when the pairing against `v` is integral, i.e. zero in `Q/Z`.
    pub fn kills(&self, v: &[BigInt]) -> bool {
        self.pair_mod_z(v).is_zero()
    }
}

impl fmt::Debug for TorsionVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TorsionVec{:?}", self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

/// Fractional part of a rational, reduced into `[0, 1)`.
pub fn fract(c: &BigRational) -> BigRational {
    let f = c.floor();
    c - f
}

/// An automorphism of the lattice `Z^n`: a square integer matrix of
/// determinant `±1`, acting on column vectors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatAut {
    rows: Vec<LatVec>,
}

impl LatAut {
    pub fn new(rows: Vec<LatVec>) -> Result<Self, LatticeError> {
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(LatticeError::NotSquare { rows: n, cols: r.len() });
            }
        }
        let d = det(&rows);
        if !(d.clone().abs().is_one()) {
            return Err(LatticeError::NotUnimodular(d));
        }
        Ok(LatAut { rows })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        LatAut::new(rows.iter().map(|r| lat_vec(r)).collect())
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        LatAut { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[LatVec] {
        &self.rows
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| {
            r.iter().enumerate().all(|(j, c)| if i == j { c.is_one() } else { c.is_zero() })
        })
    }

    pub fn apply(&self, v: &[BigInt]) -> LatVec {
        assert_eq!(v.len(), self.dim());
        self.rows.iter().map(|r| pair(r, v)).collect()
    }

    pub fn apply_rat(&self, v: &[BigRational]) -> RatVec {
        assert_eq!(v.len(), self.dim());
        self.rows.iter().map(|r| pair_ir(r, v)).collect()
    }

    pub fn apply_torsion(&self, v: &TorsionVec) -> TorsionVec {
        TorsionVec::new(self.apply_rat(v.coords()))
    }

    /// `self * other` as maps: apply `other` first.
    pub fn compose(&self, other: &LatAut) -> LatAut {
        let n = self.dim();
        assert_eq!(n, other.dim());
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &self.rows[i][k] * &other.rows[k][j]).sum())
                    .collect()
            })
            .collect();
        LatAut { rows }
    }

    /// Integer inverse; exists because the determinant is `±1`.
    pub fn inverse(&self) -> LatAut {
        let n = self.dim();
        let d = det(&self.rows);
        // adjugate / det, with det = ±1 so entries stay integral
        let mut rows = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<LatVec> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| self.rows[r][c].clone()).collect())
                    .collect();
                let mut cof = det(&minor);
                if (i + j) % 2 == 1 {
                    cof = -cof;
                }
                rows[i][j] = &cof * &d; // d = ±1, so cof/d = cof*d
            }
        }
        LatAut { rows }
    }

    /// Transpose of the inverse: the induced action on the dual lattice.
    pub fn dual_action(&self) -> LatAut {
        let inv = self.inverse();
        let n = self.dim();
        let rows = (0..n).map(|i| (0..n).map(|j| inv.rows[j][i].clone()).collect()).collect();
        LatAut { rows }
    }

    /// Order of the automorphism, if at most `bound`.
    pub fn finite_order(&self, bound: usize) -> Option<usize> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return Some(k);
            }
            p = p.compose(self);
        }
        None
    }
}

impl fmt::Debug for LatAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatAut{:?}", self.rows)
    }
}

/// Determinant by cofactor expansion; matrices here are tiny.
pub fn det(rows: &[LatVec]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut acc = BigInt::zero();
    for j in 0..n {
        if rows[0][j].is_zero() {
            continue;
        }
        let minor: Vec<LatVec> = rows[1..]
            .iter()
            .map(|r| (0..n).filter(|&c| c != j).map(|c| r[c].clone()).collect())
            .collect();
        let term = &rows[0][j] * det(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Reduced row-echelon form over `Q`, with rows rescaled to primitive integer
/// vectors whose leading entry is positive.  Zero rows are dropped.  Two
/// rational subspaces are equal iff their canonical bases are equal.
pub fn rref(rows: &[RatVec]) -> Vec<LatVec> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut m: Vec<RatVec> = rows.to_vec();
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(sel) = (pivot_row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, sel);
        let inv = m[pivot_row][col].recip();
        for c in 0..ncols {
            let v = &m[pivot_row][c] * &inv;
            m[pivot_row][c] = v;
        }
        for r in 0..m.len() {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..ncols {
                    let v = &m[r][c] - &f * &m[pivot_row][c];
                    m[r][c] = v;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.truncate(pivot_row);
    m.iter().map(|r| primitive_int(r)).collect()
}

/// Clear denominators and divide by the content, making the leading nonzero
/// entry positive.
pub fn primitive_int(v: &[BigRational]) -> LatVec {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, c| num::integer::lcm(acc, c.denom().clone()));
    let ints: LatVec = v.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, c| num::integer::gcd(acc, c.clone()));
    if gcd.is_zero() {
        return ints;
    }
    let mut out: LatVec = ints.iter().map(|c| c / &gcd).collect();
    if let Some(lead) = out.iter().find(|c| !c.is_zero()) {
        if lead.sign() == Sign::Minus {
            out = neg_vec(&out);
        }
    }
    out
}

/// Canonical basis (see [`rref`]) of the kernel `{ v : A v = 0 }` of the map
/// whose rows are `a_rows`, i.e. of the common annihilator of the rows.
pub fn kernel_basis(a_rows: &[RatVec], dim: usize) -> Vec<LatVec> {
    // Row-reduce A, then read off free-variable kernel vectors.
    let mut m: Vec<RatVec> = a_rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut pivot_row = 0;
    for col in 0..dim {
        let Some(sel) = (pivot_row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, sel);
        let inv = m[pivot_row][col].recip();
        for c in 0..dim {
            let v = &m[pivot_row][c] * &inv;
            m[pivot_row][c] = v;
        }
        for r in 0..m.len() {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..dim {
                    let v = &m[r][c] - &f * &m[pivot_row][c];
                    m[r][c] = v;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    let mut basis: Vec<RatVec> = Vec::new();
    for free in 0..dim {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = zero_rat_vec(dim);
        v[free] = BigRational::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[ri][free].clone();
        }
        basis.push(v);
    }
    rref(&basis)
}

/// Canonical basis of the simultaneous fixed space of a family of lattice
/// automorphisms: `{ v in Q^n : g v = v for every g }`.
pub fn invariant_subspace(gens: &[LatAut], dim: usize) -> Vec<LatVec> {
    let mut rows: Vec<RatVec> = Vec::new();
    for g in gens {
        assert_eq!(g.dim(), dim);
        for (i, r) in g.rows().iter().enumerate() {
            let mut row = to_rat_vec(r);
            row[i] -= BigRational::one();
            rows.push(row);
        }
    }
    if rows.is_empty() {
        // no constraints: the whole space, in canonical form
        return rref(&(0..dim)
            .map(|i| {
                let mut v = zero_rat_vec(dim);
                v[i] = BigRational::one();
                v
            })
            .collect::<Vec<_>>());
    }
    kernel_basis(&rows, dim)
}

/// Is `v` in the rational span of `basis`?
pub fn in_span(v: &[BigRational], basis: &[LatVec]) -> bool {
    solve_in_span(v, basis).is_some()
}

/// Express `v` in terms of `basis` rows if possible (rational coefficients).
pub fn solve_in_span(v: &[BigRational], basis: &[LatVec]) -> Option<RatVec> {
    let dim = v.len();
    // Solve basis^T c = v by row reduction on the augmented system.
    let mut m: Vec<RatVec> = (0..dim)
        .map(|i| {
            let mut row: RatVec = basis.iter().map(|b| BigRational::from(b[i].clone())).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let ncols = basis.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut pr = 0;
    for col in 0..ncols {
        let Some(sel) = (pr..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pr, sel);
        let inv = m[pr][col].recip();
        for c in 0..=ncols {
            let x = &m[pr][c] * &inv;
            m[pr][c] = x;
        }
        for r in 0..m.len() {
            if r != pr && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=ncols {
                    let x = &m[r][c] - &f * &m[pr][c];
                    m[r][c] = x;
                }
            }
        }
        pivots.push((pr, col));
        pr += 1;
    }
    // consistency: rows past the pivots must have zero RHS
    for r in pr..m.len() {
        if !m[r][ncols].is_zero() {
            return None;
        }
    }
    let mut coeffs = zero_rat_vec(ncols);
    for &(r, c) in &pivots {
        coeffs[c] = m[r][ncols].clone();
    }
    Some(coeffs)
}

/// Row-style Hermite normal form of the integer lattice spanned by `rows`.
/// Pivots are positive, entries above a pivot are reduced into `[0, pivot)`,
/// and zero rows are dropped.  The result is the canonical basis of the
/// sublattice of `Z^n` generated by the rows.
pub fn hnf(rows: &[LatVec], dim: usize) -> Vec<LatVec> {
    let mut m: Vec<LatVec> = rows.iter().filter(|r| !is_zero_vec(r)).cloned().collect();
    for r in &m {
        assert_eq!(r.len(), dim);
    }
    let mut out: Vec<LatVec> = Vec::new();
    let mut col = 0;
    while col < dim && !m.is_empty() {
        // gcd-reduce all rows on this column down to a single pivot row
        loop {
            let mut nz: Vec<usize> = (0..m.len()).filter(|&r| !m[r][col].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            if nz.len() == 1 {
                let r = nz[0];
                let mut piv = m.remove(r);
                if piv[col].sign() == Sign::Minus {
                    piv = neg_vec(&piv);
                }
                out.push(piv);
                break;
            }
            // pick the row with smallest |entry| and reduce the others by it
            nz.sort_by_key(|&r| m[r][col].clone().abs());
            let base = nz[0];
            for &r in &nz[1..] {
                let q = div_floor_nearest(&m[r][col], &m[base][col]);
                let sub = scale_vec(&q, &m[base]);
                m[r] = sub_vec(&m[r], &sub);
            }
        }
        col += 1;
    }
    // reduce above-pivot entries
    let mut i = out.len();
    while i > 0 {
        i -= 1;
        let pivot_col = out[i].iter().position(|c| !c.is_zero()).unwrap();
        let p = out[i][pivot_col].clone();
        for j in 0..i {
            let q = Euclid::div_euclid(&out[j][pivot_col], &p);
            if !q.is_zero() {
                let sub = scale_vec(&q, &out[i]);
                out[j] = sub_vec(&out[j], &sub);
            }
        }
    }
    out
}

fn div_floor_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    // rounded quotient, keeps remainders small during gcd elimination
    let two = int(2);
    let (q, r) = (Euclid::div_euclid(a, b), Euclid::rem_euclid(a, b));
    if &(&r * &two) > &b.clone().abs() {
        q + BigInt::one()
    } else {
        q
    }
}

/// Reduce `v` modulo the lattice with Hermite basis `h` (from [`hnf`]).
/// The result is the canonical representative of `v + L`; it is zero iff
/// `v` lies in the lattice.
pub fn reduce_mod_lattice(v: &[BigInt], h: &[LatVec]) -> LatVec {
    let mut out = v.to_vec();
    for row in h {
        let pc = row.iter().position(|c| !c.is_zero()).unwrap();
        let q = Euclid::div_euclid(&out[pc], &row[pc]);
        if !q.is_zero() {
            out = sub_vec(&out, &scale_vec(&q, row));
        }
    }
    out
}

/// Membership of an integral vector in the lattice spanned by `h`.
pub fn in_lattice(v: &[BigInt], h: &[LatVec]) -> bool {
    is_zero_vec(&reduce_mod_lattice(v, h))
}
