//! Dense matrices over [`Scalar`] with exact rank, kernel and solve routines.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::poly::Polynomial;
use crate::linalg::subspace::{primitive_rescale, rref_in_place};
use crate::linalg::Scalar;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Reassemble an `n × n` matrix from its row-major flattening.
    pub fn from_flat(n: usize, flat: &[Scalar]) -> Result<Self> {
        if flat.len() != n * n {
            return Err(Error::Dimension(format!(
                "flat vector of length {} is not {n}×{n}",
                flat.len()
            )));
        }
        Ok(Matrix { rows: n, cols: n, data: flat.to_vec() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major flattening (clones entries).
    pub fn flatten(&self) -> Vec<Scalar> {
        self.data.clone()
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let data = self.data.iter().map(|v| v * s).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Lie bracket `self·other − other·self`.
    pub fn bracket(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    /// `self^k` by repeated squaring (square matrices only).
    pub fn pow(&self, mut k: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Nilpotency test: `m^n = 0` for an `n × n` matrix.
    pub fn is_nilpotent(&self) -> bool {
        assert!(self.is_square());
        if self.rows == 0 {
            return true;
        }
        let mut p = self.clone();
        let mut steps = 0u32;
        // Square until the exponent reaches the dimension.
        while (1u64 << steps) < self.rows as u64 {
            if p.is_zero() {
                return true;
            }
            p = &p * &p;
            steps += 1;
        }
        p.is_zero()
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero();
                for c in 0..self.cols {
                    let a = self.get(r, c);
                    if !a.is_zero() && !v[c].is_zero() {
                        acc += &(a * &v[c]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Rank by rational Gauss–Jordan elimination.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<Scalar>> =
            (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        rref_in_place(&mut rows).len()
    }

    /// Rank by fraction-free Bareiss elimination.
    ///
    /// Entries are first scaled to Gaussian integers; every division in the
    /// Bareiss recurrence is then exact, which bounds entry growth by minor
    /// determinants.  Used as an independent oracle against [`Matrix::rank`].
    pub fn rank_bareiss(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // Primitive integer scaling per row (row scaling does not change
        // rank), so every Bareiss division below is exact.
        let mut m: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                primitive_rescale(&mut row);
                row
            })
            .collect();
        m.retain(|row| row.iter().any(|v| !v.is_zero()));
        debug_assert!(m.iter().flatten().all(Scalar::is_integral));

        let (nr, nc) = (m.len(), self.cols);
        let mut rank = 0usize;
        let mut prev = Scalar::one();
        let mut col = 0usize;
        while rank < nr && col < nc {
            // Lightest nonzero pivot at or below `rank` in this column.
            let mut best: Option<(usize, u64)> = None;
            for (r, row) in m.iter().enumerate().skip(rank) {
                if !row[col].is_zero() {
                    let w = row[col].weight();
                    if best.map_or(true, |(_, bw)| w < bw) {
                        best = Some((r, w));
                    }
                }
            }
            let Some((p, _)) = best else {
                col += 1;
                continue;
            };
            m.swap(rank, p);
            let (pivot_rows, rest) = m.split_at_mut(rank + 1);
            let pivot_row = &pivot_rows[rank];
            let piv = pivot_row[col].clone();
            for row in rest.iter_mut() {
                let head = std::mem::replace(&mut row[col], Scalar::zero());
                // Bareiss step: entry ← (piv·entry − head·pivot) / prev, the
                // same exact transform for every row below the pivot.
                for (a, b) in row.iter_mut().zip(pivot_row.iter()).skip(col + 1) {
                    let num = if head.is_zero() || b.is_zero() {
                        if a.is_zero() {
                            continue;
                        }
                        &piv * a
                    } else if a.is_zero() {
                        -&(&head * b)
                    } else {
                        &(&piv * a) - &(&head * b)
                    };
                    if num.is_zero() {
                        *a = num;
                    } else {
                        let q = &num / &prev;
                        debug_assert!(q.is_integral(), "inexact Bareiss division");
                        *a = q;
                    }
                }
            }
            prev = piv;
            rank += 1;
            col += 1;
        }
        rank
    }

    /// One solution of `self · x = b`, if any.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "rhs length {} vs {} rows",
                b.len(),
                self.rows
            )));
        }
        // Eliminate on the augmented matrix [A | b].
        let mut rows: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.push(b[r].clone());
                row
            })
            .collect();
        let pivots = rref_in_place(&mut rows);
        // Inconsistent iff some pivot lands in the augmented column.
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &pc) in rows.iter().zip(pivots.iter()) {
            x[pc] = row[self.cols].clone();
        }
        Ok(Some(x))
    }

    /// Maximum entry weight (bit-size proxy); handy in tests and benches.
    pub fn max_weight(&self) -> u64 {
        self.data.iter().map(Scalar::weight).max().unwrap_or(0)
    }

    /// The smallest positive scalar multiple of `self` with Gaussian-integer
    /// entries of integer content 1.  Centralizers, brackets-with, kernels
    /// and spans are all invariant under nonzero scaling, and primitive
    /// integer entries keep downstream eliminations in small-integer
    /// arithmetic.
    pub fn primitive_scaled(&self) -> Matrix {
        let mut data = self.data.clone();
        primitive_rescale(&mut data);
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(Scalar::render).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        let data = self.data.iter().map(|a| -a).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        if let Some(out) = mul_integral(self, rhs) {
            return out;
        }
        let mut out = Matrix::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue; // structural bases are sparse; skip zero rows
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    let idx = r * out.cols + c;
                    out.data[idx] += &prod;
                }
            }
        }
        out
    }
}

/// Product of two Gaussian-integer matrices by plain integer accumulation,
/// skipping the per-operation normalization that rational arithmetic pays.
/// Returns `None` when either factor has a non-integral entry.
fn mul_integral(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    if !a.data.iter().all(Scalar::is_integral) || !b.data.iter().all(Scalar::is_integral) {
        return None;
    }
    let conv = |m: &Matrix| -> Vec<(BigInt, BigInt)> {
        m.data
            .iter()
            .map(|v| (v.re().to_integer(), v.im().to_integer()))
            .collect()
    };
    let ai = conv(a);
    let bi = conv(b);
    let mut out = vec![(BigInt::zero(), BigInt::zero()); a.rows * b.cols];
    for r in 0..a.rows {
        for k in 0..a.cols {
            let (are, aim) = &ai[r * a.cols + k];
            if are.is_zero() && aim.is_zero() {
                continue;
            }
            for c in 0..b.cols {
                let (bre, bim) = &bi[k * b.cols + c];
                if bre.is_zero() && bim.is_zero() {
                    continue;
                }
                let o = &mut out[r * b.cols + c];
                if aim.is_zero() && bim.is_zero() {
                    o.0 += are * bre;
                } else {
                    o.0 += are * bre - aim * bim;
                    o.1 += are * bim + aim * bre;
                }
            }
        }
    }
    let data = out
        .into_iter()
        .map(|(re, im)| Scalar::new(BigRational::from(re), BigRational::from(im)))
        .collect();
    Some(Matrix { rows: a.rows, cols: b.cols, data })
}

/// Minimal polynomial of `m` relative to one vector: the monic generator of
/// the dependencies among `v, m·v, m²·v, …`, found by exact Krylov echelon
/// with coefficient tracking.
fn vector_minimal_polynomial(m: &Matrix, start: usize) -> Result<Polynomial> {
    let n = m.nrows();
    let mut reduced: Vec<(Vec<Scalar>, Vec<Scalar>, usize)> = Vec::new(); // (vector, combo, pivot)
    let mut v = vec![Scalar::zero(); n];
    v[start] = Scalar::one();
    for k in 0..=n {
        let mut vec = v.clone();
        let mut combo = vec![Scalar::zero(); k + 1];
        combo[k] = Scalar::one();
        // Reduce against the store.
        for (rvec, rcombo, pivot) in &reduced {
            let coeff = vec[*pivot].clone();
            if coeff.is_zero() {
                continue;
            }
            for (a, b) in vec.iter_mut().zip(rvec.iter()) {
                if !b.is_zero() {
                    *a -= &(&coeff * b);
                }
            }
            for (i, b) in rcombo.iter().enumerate() {
                if !b.is_zero() {
                    let delta = &coeff * b;
                    if i < combo.len() {
                        combo[i] -= &delta;
                    } else {
                        combo.resize(i + 1, Scalar::zero());
                        combo[i] = -delta;
                    }
                }
            }
        }
        match vec.iter().position(|x| !x.is_zero()) {
            None => {
                // m^k v = Σ_{j<k} c_j m^j v: combo holds the dependency.
                return Polynomial::new(combo).monic();
            }
            Some(pivot) => {
                let inv = vec[pivot].inv()?;
                for a in vec.iter_mut() {
                    if !a.is_zero() {
                        *a = &*a * &inv;
                    }
                }
                for c in combo.iter_mut() {
                    if !c.is_zero() {
                        *c = &*c * &inv;
                    }
                }
                reduced.push((vec, combo, pivot));
            }
        }
        v = m.mul_vec(&v);
    }
    Err(Error::internal("no dependency among Krylov vectors up to the dimension"))
}

/// Minimal polynomial of a square matrix, monic: the least common multiple
/// of the vector-relative minimal polynomials over the standard basis.
/// Krylov chains of length-n vectors are far cheaper than echelonizing the
/// n²-dimensional flattened powers; for a cyclic vector (the generic case)
/// the very first chain already yields the answer, degree n forces it by
/// Cayley–Hamilton, and otherwise the accumulated polynomial is verified by
/// direct evaluation.
pub fn minimal_polynomial(m: &Matrix) -> Result<Polynomial> {
    if !m.is_square() {
        return Err(Error::Dimension("minimal polynomial needs a square matrix".into()));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Polynomial::one());
    }
    let mut acc = Polynomial::one();
    for start in 0..n {
        let local = vector_minimal_polynomial(m, start)?;
        let g = acc.gcd(&local)?;
        let (q, r) = local.divrem(&g)?;
        debug_assert!(r.is_zero(), "gcd must divide its argument");
        if q.is_one() {
            continue;
        }
        acc = acc.mul(&q).monic()?;
        if acc.degree() == Some(n) {
            // Degree n means acc is the characteristic polynomial, which
            // annihilates m by Cayley–Hamilton; no evaluation needed.
            return Ok(acc);
        }
        if acc.eval_matrix(m)?.is_zero() {
            return Ok(acc);
        }
    }
    // The lcm over the whole standard basis annihilates every basis vector,
    // so reaching this point is impossible for exact arithmetic.
    Err(Error::internal("basis Krylov polynomials fail to annihilate the matrix"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn mat(rows: Vec<Vec<i64>>) -> Matrix {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(s).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(Matrix::identity(4).rank(), 4);
        assert_eq!(Matrix::zero(3, 5).rank(), 0);
        let m = mat(vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.rank_bareiss(), 1);
    }

    #[test]
    fn bareiss_agrees_on_known_ranks() {
        let m = mat(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.rank_bareiss(), 2);
        let m = mat(vec![vec![2, 0, 1], vec![0, 3, 0], vec![1, 0, 1]]);
        assert_eq!(m.rank(), 3);
        assert_eq!(m.rank_bareiss(), 3);
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let a = mat(vec![vec![0, 1], vec![0, 0]]);
        let b = mat(vec![vec![1, 0], vec![0, -1]]);
        let ab = a.bracket(&b);
        let ba = b.bracket(&a);
        assert_eq!(ab, -&ba);
        // [e, h] = -2e for the sl2 triple.
        assert_eq!(ab, a.scale(&s(-2)));
    }

    #[test]
    fn solve_finds_particular_solutions() {
        let a = mat(vec![vec![1, 2], vec![3, 4]]);
        let b = vec![s(5), s(11)];
        let x = a.solve(&b).unwrap().unwrap();
        assert_eq!(a.mul_vec(&x), b);
        // Inconsistent system.
        let a = mat(vec![vec![1, 1], vec![1, 1]]);
        assert!(a.solve(&[s(0), s(1)]).unwrap().is_none());
        // Underdetermined system still yields some solution.
        let a = mat(vec![vec![1, 1, 1]]);
        let x = a.solve(&[s(6)]).unwrap().unwrap();
        assert_eq!(a.mul_vec(&x), vec![s(6)]);
    }

    #[test]
    fn minimal_polynomial_examples() {
        // Zero matrix: x.
        let z = Matrix::zero(3, 3);
        assert_eq!(minimal_polynomial(&z).unwrap().render("x"), "x");
        // Identity: x - 1.
        let id = Matrix::identity(2);
        assert_eq!(minimal_polynomial(&id).unwrap().render("x"), "x - 1");
        // diag(1,1,2): (x-1)(x-2) = x^2 - 3x + 2.
        let mut d = Matrix::identity(3);
        d.set(2, 2, s(2));
        let p = minimal_polynomial(&d).unwrap();
        assert_eq!(p.render("x"), "x^2 - 3*x + 2");
        // Jordan block of size 2: x^2.
        let j = mat(vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(minimal_polynomial(&j).unwrap().render("x"), "x^2");
    }

    #[test]
    fn nilpotency_detection() {
        let j = mat(vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        assert!(j.is_nilpotent());
        assert!(!Matrix::identity(3).is_nilpotent());
        assert!(Matrix::zero(2, 2).is_nilpotent());
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let m = mat(vec![vec![1, 1], vec![0, 1]]);
        let m5 = m.pow(5);
        assert_eq!(m5.get(0, 1), &s(5));
    }
}
