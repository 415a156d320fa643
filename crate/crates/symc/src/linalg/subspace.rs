//! Linear subspaces of `K^n` with canonical reduced-row-echelon bases.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};

/// Rescale a row by the inverse of its rational content, leaving a primitive
/// Gaussian-integer row (every part integral, overall integer gcd 1).  The
/// factor is `lcm(denominators) / gcd(numerators)` over all real and
/// imaginary parts, so spans, kernels and homogeneous solution sets are
/// unchanged.  Zero rows are left alone.
pub(crate) fn primitive_rescale(row: &mut [Scalar]) {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for v in row.iter() {
        for part in [v.re(), v.im()] {
            if !part.numer().is_zero() {
                g = g.gcd(part.numer());
                l = l.lcm(part.denom());
            }
        }
    }
    if g.is_zero() || (g.is_one() && l.is_one()) {
        return;
    }
    let f = Scalar::from_rational(BigRational::new(l, g));
    for v in row.iter_mut() {
        if !v.is_zero() {
            *v = &*v * &f;
        }
    }
}

/// Rescale only when the row has grown heavy: cross-multiplied eliminations
/// roughly double entry bits per pivot, so an occasional rescale (amortized
/// one gcd sweep every few pivots) keeps growth bounded without paying gcd
/// costs on every update.
fn rescale_if_heavy(row: &mut [Scalar], heaviest: u64) {
    if heaviest > 192 {
        primitive_rescale(row);
    }
}

/// Nearest-integer quotient of `a / b` for `b > 0`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    ((a * &two) + b).div_floor(&(b * &two))
}

/// Hermitian inner product `Σ uₖ · conj(vₖ)` of primitive integer rows, as a
/// Gaussian integer `(re, im)`.
fn hermitian_dot(u: &[Scalar], v: &[Scalar]) -> (BigInt, BigInt) {
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    for (a, b) in u.iter().zip(v.iter()) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let ar = a.re().to_integer();
        let ai = a.im().to_integer();
        let br = b.re().to_integer();
        let bi = b.im().to_integer();
        re += &ar * &br + &ai * &bi;
        im += &ai * &br - &ar * &bi;
    }
    (re, im)
}

/// Squared Hermitian norm of a primitive integer row.
fn norm_sq(u: &[Scalar]) -> BigInt {
    let mut n = BigInt::zero();
    for a in u {
        if a.is_zero() {
            continue;
        }
        let ar = a.re().to_integer();
        let ai = a.im().to_integer();
        n += &ar * &ar + &ai * &ai;
    }
    n
}

/// Exact pairwise lattice size-reduction over the Gaussian integers:
/// replace a row by `row − μ·other` (μ the Gaussian-integer rounding of the
/// Hermitian projection coefficient) whenever that strictly shrinks its
/// norm, until a fixpoint or the pass budget.  The span is unchanged, while
/// entries typically come out far smaller than in the canonical echelon
/// basis — and every later elimination that consumes the rows gets cheaper.
pub(crate) fn size_reduce_rows(rows: &mut [Vec<Scalar>]) {
    for row in rows.iter_mut() {
        primitive_rescale(row);
    }
    let d = rows.len();
    if d < 2 {
        return;
    }
    let mut norms: Vec<BigInt> = rows.iter().map(|r| norm_sq(r)).collect();
    for _pass in 0..16 {
        let mut changed = false;
        for i in 0..d {
            for j in 0..d {
                if i == j || norms[j].is_zero() {
                    continue;
                }
                let (dot_re, dot_im) = hermitian_dot(&rows[i], &rows[j]);
                let mu_re = round_div(&dot_re, &norms[j]);
                let mu_im = round_div(&dot_im, &norms[j]);
                if mu_re.is_zero() && mu_im.is_zero() {
                    continue;
                }
                let mu = Scalar::new(BigRational::from(mu_re), BigRational::from(mu_im));
                let candidate: Vec<Scalar> = rows[i]
                    .iter()
                    .zip(rows[j].iter())
                    .map(|(a, b)| {
                        if b.is_zero() {
                            a.clone()
                        } else {
                            a - &(&mu * b)
                        }
                    })
                    .collect();
                if norm_sq(&candidate) < norms[i] {
                    rows[i] = candidate;
                    primitive_rescale(&mut rows[i]);
                    norms[i] = norm_sq(&rows[i]);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Reduce `rows` to reduced row echelon form in place.
///
/// Zero rows are dropped, pivots are normalized to 1 and cleared above and
/// below.  Elimination is done by cross-multiplication on rows kept near
/// primitive integer form, so intermediate entries stay bounded by minors of
/// the input (as in fraction-free elimination) instead of compounding
/// rational arithmetic; pivot normalization happens once at the end.  Among
/// candidate pivot rows the one with the smallest entry weight is chosen.
/// Returns the pivot columns in order.
pub(crate) fn rref_in_place(rows: &mut Vec<Vec<Scalar>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    for row in rows.iter_mut() {
        primitive_rescale(row);
    }
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        // Pick the lightest nonzero candidate in this column.
        let mut best: Option<(usize, u64)> = None;
        for r in rank..rows.len() {
            if !rows[r][col].is_zero() {
                let w = rows[r][col].weight();
                if best.map_or(true, |(_, bw)| w < bw) {
                    best = Some((r, w));
                }
            }
        }
        let Some((prow, _)) = best else { continue };
        rows.swap(rank, prow);
        let pivot_row = rows[rank].clone();
        let pv = pivot_row[col].clone();
        // Clear the column everywhere else: row ← pv·row − row[col]·pivot_row.
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            let mut heaviest = 0u64;
            for (c, (a, b)) in row.iter_mut().zip(pivot_row.iter()).enumerate() {
                if c == col {
                    continue;
                }
                if b.is_zero() {
                    if !a.is_zero() {
                        *a = &pv * a;
                    }
                } else if a.is_zero() {
                    *a = -&(&factor * b);
                } else {
                    *a = &(&pv * a) - &(&factor * b);
                }
                heaviest = heaviest.max(a.weight());
            }
            row[col] = Scalar::zero();
            rescale_if_heavy(row, heaviest);
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    // Normalize pivots to 1, finishing the canonical reduced form.
    for (row, &pc) in rows.iter_mut().zip(pivots.iter()) {
        let inv = row[pc].inv().expect("nonzero pivot");
        if !inv.is_one() {
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
        }
    }
    pivots
}

/// Incremental echelon span accumulator: rows are kept in (non-canonical)
/// echelon form in primitive integer scale, so membership-or-insert costs one
/// reduction pass instead of a full re-echelonization per candidate.
pub(crate) struct EchelonAccumulator {
    ambient: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl EchelonAccumulator {
    pub(crate) fn new(ambient: usize) -> Self {
        EchelonAccumulator { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub(crate) fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the stored rows; if a nonzero residual remains,
    /// insert it (keeping pivot columns increasing) and return `true`.
    pub(crate) fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        primitive_rescale(&mut v);
        for (row, &pc) in self.rows.iter().zip(self.pivots.iter()) {
            if v[pc].is_zero() {
                continue;
            }
            // v ← pv·v − v[pc]·row, staying integral.
            let pv = row[pc].clone();
            let head = std::mem::replace(&mut v[pc], Scalar::zero());
            let mut heaviest = 0u64;
            for (c, (a, b)) in v.iter_mut().zip(row.iter()).enumerate() {
                if c == pc {
                    continue;
                }
                if b.is_zero() {
                    if !a.is_zero() {
                        *a = &pv * a;
                    }
                } else if a.is_zero() {
                    *a = -&(&head * b);
                } else {
                    *a = &(&pv * a) - &(&head * b);
                }
                heaviest = heaviest.max(a.weight());
            }
            rescale_if_heavy(&mut v, heaviest);
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        primitive_rescale(&mut v);
        let at = self
            .pivots
            .iter()
            .position(|&pc| pc > pivot)
            .unwrap_or(self.pivots.len());
        self.rows.insert(at, v);
        self.pivots.insert(at, pivot);
        true
    }

    pub(crate) fn contains(&self, v: &[Scalar]) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(self.pivots.iter()) {
            if v[pc].is_zero() {
                continue;
            }
            let pv = row[pc].clone();
            let head = std::mem::replace(&mut v[pc], Scalar::zero());
            let mut heaviest = 0u64;
            for (c, (a, b)) in v.iter_mut().zip(row.iter()).enumerate() {
                if c == pc {
                    continue;
                }
                if b.is_zero() {
                    if !a.is_zero() {
                        *a = &pv * a;
                    }
                } else if a.is_zero() {
                    *a = -&(&head * b);
                } else {
                    *a = &(&pv * a) - &(&head * b);
                }
                heaviest = heaviest.max(a.weight());
            }
            rescale_if_heavy(&mut v, heaviest);
        }
        v.iter().all(Scalar::is_zero)
    }

    /// Canonicalize into a [`Subspace`] (one final echelonization).
    pub(crate) fn into_subspace(self) -> Result<Subspace> {
        // Echelon rows with strictly increasing pivot columns are
        // independent by construction.
        Ok(Subspace::from_rows_unchecked(self.ambient, self.rows))
    }
}

/// A fixed basis of a subspace together with the bookkeeping needed to
/// express further vectors in its coordinates.
///
/// Coordinates are normally produced by the modular solver (p-adic lift plus
/// exact verification).  The exact fallback — basis vectors augmented with
/// unit tags and kept in echelon form, so expressing a vector is a single
/// reduction pass whose augmented part records the combination — is built
/// lazily on first use, since a certified solver makes it rare.
pub struct CoordinateFrame {
    ambient: usize,
    d: usize,
    basis: Vec<Vec<Scalar>>,
    echelon: std::sync::OnceLock<(Vec<Vec<Scalar>>, Vec<usize>)>,
    solver: Option<crate::linalg::modular::SpanSolver>,
}

impl CoordinateFrame {
    /// Build a frame over linearly independent `basis` vectors.
    pub fn new(basis: &[Vec<Scalar>]) -> Result<Self> {
        let d = basis.len();
        let ambient = basis.first().map_or(0, |r| r.len());
        if basis.iter().any(|b| b.len() != ambient) {
            return Err(Error::Dimension(
                "coordinate frame rows must share a length".into(),
            ));
        }
        // A solver only constructs over rows of full rank mod p, which
        // certifies independence; without one, echelonize now so dependence
        // is still caught exactly at construction time.
        let solver = crate::linalg::modular::SpanSolver::new(basis, ambient);
        let echelon = std::sync::OnceLock::new();
        if solver.is_none() {
            let _ = echelon.set(Self::build_echelon(basis, ambient, d)?);
        }
        Ok(CoordinateFrame { ambient, d, basis: basis.to_vec(), echelon, solver })
    }

    fn build_echelon(
        basis: &[Vec<Scalar>],
        ambient: usize,
        d: usize,
    ) -> Result<(Vec<Vec<Scalar>>, Vec<usize>)> {
        let mut acc = EchelonAccumulator::new(ambient + d);
        for (i, b) in basis.iter().enumerate() {
            let mut row = b.clone();
            row.extend(std::iter::repeat_with(Scalar::zero).take(d));
            row[ambient + i] = Scalar::one();
            if !acc.insert(row) {
                return Err(Error::arg("coordinate frame rows must be independent"));
            }
        }
        if acc.pivots.iter().any(|&pc| pc >= ambient) {
            return Err(Error::internal(
                "coordinate frame pivot escaped into the tag columns",
            ));
        }
        Ok((acc.rows, acc.pivots))
    }

    /// Coordinates of `w` in the frame basis, or `None` if `w` is outside
    /// the span.  Exact: the reduction is by cross-multiplication with a
    /// tracked overall factor, and the result satisfies
    /// `w = Σ coords[i] · basis[i]` identically.
    pub fn coords(&self, w: &[Scalar]) -> Option<Vec<Scalar>> {
        debug_assert_eq!(w.len(), self.ambient);
        // Fast path: lift a modular solution and verify it exactly.  A
        // `None` can also mean an unlucky prime, so fall through to the
        // exact reduction rather than concluding anything from it.
        if let Some(solver) = &self.solver {
            if let Some(c) = solver.coeffs(w) {
                return Some(c);
            }
        }
        // Deferred builds only happen under a solver certificate, so the
        // rows are independent and echelonization cannot fail.
        let (rows, pivots) = self.echelon.get_or_init(|| {
            Self::build_echelon(&self.basis, self.ambient, self.d)
                .expect("certified independent rows echelonize")
        });
        let width = self.ambient + self.d;
        let mut v = w.to_vec();
        v.extend(std::iter::repeat_with(Scalar::zero).take(self.d));
        // Tracked factor: after reducing, v = factor·(w | 0) − Σ μᵣ·rowᵣ.
        v.push(Scalar::one());
        for (row, &pc) in rows.iter().zip(pivots.iter()) {
            if v[pc].is_zero() {
                continue;
            }
            let pv = row[pc].clone();
            let head = std::mem::replace(&mut v[pc], Scalar::zero());
            let mut heaviest = 0u64;
            for c in 0..width {
                if c == pc {
                    continue;
                }
                let b = &row[c];
                let a = &mut v[c];
                if b.is_zero() {
                    if !a.is_zero() {
                        *a = &pv * a;
                    }
                } else if a.is_zero() {
                    *a = -&(&head * b);
                } else {
                    *a = &(&pv * a) - &(&head * b);
                }
                heaviest = heaviest.max(a.weight());
            }
            let factor = &mut v[width];
            *factor = &pv * &*factor;
            rescale_if_heavy(&mut v, heaviest);
        }
        if v[..self.ambient].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let factor = v[width].clone();
        debug_assert!(!factor.is_zero());
        Some(
            (0..self.d)
                .map(|j| -&(&v[self.ambient + j] / &factor))
                .collect(),
        )
    }
}

/// A subspace of `K^ambient`, stored as an independent spanning set of rows
/// plus a lazily computed canonical RREF basis.
///
/// The stored rows always span the subspace and are linearly independent, so
/// `dim` is free; the canonical basis (which every canonical operation —
/// membership, coordinates, hashing, equality — reads through `canon`) is
/// only echelonized on first use.  Constructors that already know an
/// independent basis (kernels, certified combinations) skip the eager RREF
/// entirely, which matters because canonical rows of centralizer kernels
/// carry entries hundreds of bits wide.
#[derive(Clone)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Scalar>>,
    canon: std::sync::OnceLock<(Vec<Vec<Scalar>>, Vec<usize>)>,
}

/// Two subspaces are equal iff their canonical bases are equal entry-wise,
/// regardless of which spanning rows they were built from.
impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.canon().0 == other.canon().0
    }
}

impl Eq for Subspace {}

impl Subspace {
    fn preset(ambient: usize, rows: Vec<Vec<Scalar>>, pivots: Vec<usize>) -> Self {
        let canon = std::sync::OnceLock::new();
        let _ = canon.set((rows.clone(), pivots));
        Subspace { ambient, rows, canon }
    }

    /// Canonical RREF basis and pivot columns, echelonized on first use.
    fn canon(&self) -> &(Vec<Vec<Scalar>>, Vec<usize>) {
        self.canon.get_or_init(|| {
            let mut rows = self.rows.clone();
            let pivots = rref_in_place(&mut rows);
            debug_assert_eq!(
                rows.len(),
                self.rows.len(),
                "stored subspace rows must be independent"
            );
            (rows, pivots)
        })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace::preset(ambient, Vec::new(), Vec::new())
    }

    pub fn full(ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                let mut v = vec![Scalar::zero(); ambient];
                v[i] = Scalar::one();
                v
            })
            .collect();
        Subspace::preset(ambient, rows, (0..ambient).collect())
    }

    /// Span of `vectors` inside `K^ambient`.
    pub fn from_vectors(ambient: usize, vectors: Vec<Vec<Scalar>>) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient) {
            return Err(Error::Dimension(format!(
                "spanning vector length differs from ambient {ambient}"
            )));
        }
        let mut rows = vectors;
        let pivots = rref_in_place(&mut rows);
        Ok(Subspace::preset(ambient, rows, pivots))
    }

    /// Wrap rows already known to be linearly independent without
    /// echelonizing them.  Independence is certified by a full-rank check
    /// modulo a prime (a sound proof); if no prime certifies it, the rows
    /// fall back to the exact `from_vectors` path, so a broken caller
    /// promise degrades to an eager construction rather than a wrong `dim`.
    pub fn from_independent_rows(ambient: usize, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        if rows.iter().any(|v| v.len() != ambient) {
            return Err(Error::Dimension(format!(
                "spanning vector length differs from ambient {ambient}"
            )));
        }
        let mut rows = rows;
        for row in rows.iter_mut() {
            primitive_rescale(row);
        }
        if crate::linalg::modular::certify_independent(&rows, ambient) {
            Ok(Subspace { ambient, rows, canon: std::sync::OnceLock::new() })
        } else {
            Subspace::from_vectors(ambient, rows)
        }
    }

    /// Internal constructor for rows whose independence is structural (unit
    /// tags at distinct free columns, echelon rows with distinct pivots).
    fn from_rows_unchecked(ambient: usize, rows: Vec<Vec<Scalar>>) -> Self {
        debug_assert!(rows.iter().all(|v| v.len() == ambient));
        Subspace { ambient, rows, canon: std::sync::OnceLock::new() }
    }

    /// Coordinate subspace spanned by the given standard basis vectors.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Result<Self> {
        let mut idx: Vec<usize> = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if idx.iter().any(|&i| i >= ambient) {
            return Err(Error::Dimension("coordinate index out of range".into()));
        }
        let rows = idx
            .iter()
            .map(|&i| {
                let mut v = vec![Scalar::zero(); ambient];
                v[i] = Scalar::one();
                v
            })
            .collect();
        Ok(Subspace::preset(ambient, rows, idx))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.canon().0
    }

    /// Spanning set with small entries for downstream arithmetic: the stored
    /// rows in primitive integer form, pairwise size-reduced.  Spans exactly
    /// this subspace but is not itself canonical; use it when feeding basis
    /// vectors into further eliminations or sampling.
    pub fn reduced_basis(&self) -> Vec<Vec<Scalar>> {
        let mut rows = self.rows.clone();
        size_reduce_rows(&mut rows);
        rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.canon().1
    }

    /// Residual of `v` after reduction against the canonical basis; zero iff
    /// `v` lies in the subspace.  Also returns the coefficients used.
    pub fn reduce(&self, v: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
        let (basis, pivots) = self.canon();
        let mut res = v.to_vec();
        let mut coeffs = vec![Scalar::zero(); basis.len()];
        for (i, (row, &pc)) in basis.iter().zip(pivots.iter()).enumerate() {
            let c = res[pc].clone();
            if c.is_zero() {
                continue;
            }
            for (a, b) in res.iter_mut().zip(row.iter()) {
                if !b.is_zero() {
                    *a -= &(&c * b);
                }
            }
            coeffs[i] = c;
        }
        (res, coeffs)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let (res, _) = self.reduce(v);
        res.iter().all(Scalar::is_zero)
    }

    /// Coordinates of `v` in the canonical basis; errors if `v` is outside.
    pub fn coordinates(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.ambient {
            return Err(Error::Dimension("vector/ambient mismatch".into()));
        }
        let (res, coeffs) = self.reduce(v);
        if res.iter().any(|x| !x.is_zero()) {
            return Err(Error::Membership("vector not in subspace".into()));
        }
        Ok(coeffs)
    }

    /// Fast coordinates for vectors already known to lie in the subspace:
    /// read the entries at the pivot columns.  Callers must guarantee
    /// membership (exact for brackets of basis elements, say).
    pub fn coordinates_unchecked(&self, v: &[Scalar]) -> Vec<Scalar> {
        debug_assert_eq!(v.len(), self.ambient);
        self.canon().1.iter().map(|&p| v[p].clone()).collect()
    }

    /// Linear combination of the canonical basis with the given coefficients.
    pub fn combine(&self, coeffs: &[Scalar]) -> Result<Vec<Scalar>> {
        if coeffs.len() != self.dim() {
            return Err(Error::Dimension("coefficient count != dim".into()));
        }
        let mut out = vec![Scalar::zero(); self.ambient];
        for (c, row) in coeffs.iter().zip(self.canon().0.iter()) {
            if c.is_zero() {
                continue;
            }
            for (a, b) in out.iter_mut().zip(row.iter()) {
                if !b.is_zero() {
                    *a += &(c * b);
                }
            }
        }
        Ok(out)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::Dimension("sum of subspaces of different ambients".into()));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Subspace::from_vectors(self.ambient, rows)
    }

    /// Intersection via the Zassenhaus block trick.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::Dimension(
                "intersection of subspaces of different ambients".into(),
            ));
        }
        let n = self.ambient;
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(self.dim() + other.dim());
        for b in &self.rows {
            let mut row = b.clone();
            row.extend(b.iter().cloned());
            rows.push(row);
        }
        for b in &other.rows {
            let mut row = b.clone();
            row.extend(std::iter::repeat(Scalar::zero()).take(n));
            rows.push(row);
        }
        rref_in_place(&mut rows);
        let inter: Vec<Vec<Scalar>> = rows
            .iter()
            .filter(|row| row[..n].iter().all(Scalar::is_zero))
            .map(|row| row[n..].to_vec())
            .collect();
        Subspace::from_vectors(n, inter)
    }

    /// Kernel of `m` as a subspace of `K^{ncols}`.
    ///
    /// Rows are rescaled to primitive integer form (kernels are invariant
    /// under row scaling).  Large systems go through the modular + p-adic
    /// lifting path, whose cost tracks the size of the kernel entries rather
    /// than of elimination intermediates; its output is exactly verified, and
    /// any failure falls back to fraction-free Bareiss elimination with exact
    /// back-substitution.
    pub fn kernel_of(m: &Matrix) -> Subspace {
        let ncols = m.ncols();
        let mut rows: Vec<Vec<Scalar>> =
            (0..m.nrows()).map(|r| m.row(r).to_vec()).collect();
        for row in rows.iter_mut() {
            primitive_rescale(row);
        }
        rows.retain(|row| row.iter().any(|v| !v.is_zero()));
        if rows.len().min(ncols) >= 12 {
            if let Some(basis) = crate::linalg::modular::kernel_vectors(&rows, ncols) {
                // One vector per free column, nonzero there and zero at every
                // other free column: independence is structural.
                return Subspace::from_rows_unchecked(ncols, basis);
            }
        }
        let nrows = rows.len();
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0usize;
        let mut prev = Scalar::one();
        for col in 0..ncols {
            if rank == nrows {
                break;
            }
            let mut best: Option<(usize, u64)> = None;
            for (r, row) in rows.iter().enumerate().skip(rank) {
                if !row[col].is_zero() {
                    let w = row[col].weight();
                    if best.map_or(true, |(_, bw)| w < bw) {
                        best = Some((r, w));
                    }
                }
            }
            let Some((prow, _)) = best else { continue };
            rows.swap(rank, prow);
            let pivot_row = rows[rank].clone();
            let piv = pivot_row[col].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                let head = std::mem::replace(&mut row[col], Scalar::zero());
                // Bareiss one-step rule: entry ← (piv·entry − head·pivot)/prev.
                // The update (with the same exact division) applies to every
                // row below the pivot, including those with head = 0, so that
                // entries remain the bordered minors the rule relies on.
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
            pivots.push(col);
            rank += 1;
        }
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..ncols {
            if pivot_set.contains(&free) {
                continue;
            }
            // Solve row_i · v = 0 bottom-up with v[free] = 1 and support in
            // the pivot columns; echelon rows whose pivot lies right of
            // `free` force their unknowns to zero automatically.
            let mut v = vec![Scalar::zero(); ncols];
            v[free] = Scalar::one();
            for i in (0..rank).rev() {
                let mut acc = rows[i][free].clone();
                for &pc in pivots.iter().skip(i + 1) {
                    let coeff = &rows[i][pc];
                    if !coeff.is_zero() && !v[pc].is_zero() {
                        acc = &acc + &(coeff * &v[pc]);
                    }
                }
                if !acc.is_zero() {
                    let pc = pivots[i];
                    v[pc] = -&(&acc / &rows[i][pc]);
                }
            }
            primitive_rescale(&mut v);
            debug_assert!(
                m.mul_vec(&v).iter().all(Scalar::is_zero),
                "kernel vector fails to annihilate"
            );
            basis.push(v);
        }
        Subspace::from_rows_unchecked(ncols, basis)
    }

    /// Stable 64-bit digest of the canonical basis, for seed derivation.
    /// Reads through `canon`, so it is independent of which spanning rows
    /// the subspace was constructed from.
    pub fn seed_hash(&self) -> u64 {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&(self.ambient as u64).to_le_bytes());
        for row in &self.canon().0 {
            for v in row {
                v.seed_bytes(&mut bytes);
            }
            bytes.push(0xab);
        }
        // FNV-1a
        let mut h = 0xcbf29ce484222325u64;
        for b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of K^{})", self.dim(), self.ambient)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn vecs(rows: Vec<Vec<i64>>) -> Vec<Vec<Scalar>> {
        rows.into_iter()
            .map(|r| r.into_iter().map(s).collect())
            .collect()
    }

    #[test]
    fn canonical_basis_is_stable() {
        let a = Subspace::from_vectors(3, vecs(vec![vec![1, 1, 0], vec![0, 1, 1]])).unwrap();
        let b = Subspace::from_vectors(3, vecs(vec![vec![1, 2, 1], vec![2, 3, 1]])).unwrap();
        assert_eq!(a, b, "same span must canonicalize identically");
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn membership_and_coordinates() {
        let sp = Subspace::from_vectors(3, vecs(vec![vec![1, 0, 2], vec![0, 1, 3]])).unwrap();
        let v: Vec<Scalar> = vecs(vec![vec![2, 5, 19]]).pop().unwrap();
        assert!(sp.contains(&v));
        let coords = sp.coordinates(&v).unwrap();
        assert_eq!(sp.combine(&coords).unwrap(), v);
        assert_eq!(sp.coordinates_unchecked(&v), coords);
        let w: Vec<Scalar> = vecs(vec![vec![0, 0, 1]]).pop().unwrap();
        assert!(!sp.contains(&w));
        assert!(sp.coordinates(&w).is_err());
    }

    #[test]
    fn sum_and_intersection_small_cases() {
        let a = Subspace::from_vectors(3, vecs(vec![vec![1, 0, 0], vec![0, 1, 0]])).unwrap();
        let b = Subspace::from_vectors(3, vecs(vec![vec![0, 1, 0], vec![0, 0, 1]])).unwrap();
        let sum = a.sum(&b).unwrap();
        let inter = a.intersect(&b).unwrap();
        assert_eq!(sum.dim(), 3);
        assert_eq!(inter.dim(), 1);
        assert!(inter.contains(&vecs(vec![vec![0, 1, 0]])[0]));
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::full(3);
        let b = Subspace::full(4);
        assert!(a.intersect(&b).is_err());
        assert!(a.sum(&b).is_err());
    }

    #[test]
    fn kernel_dimensions() {
        // x + y + z = 0 has a 2-dimensional kernel.
        let m = Matrix::from_rows(vecs(vec![vec![1, 1, 1]])).unwrap();
        let k = Subspace::kernel_of(&m);
        assert_eq!(k.dim(), 2);
        for b in k.basis() {
            assert!(m.mul_vec(b).iter().all(Scalar::is_zero));
        }
        // Invertible matrix has zero kernel.
        let m = Matrix::identity(4);
        assert_eq!(Subspace::kernel_of(&m).dim(), 0);
    }

    #[test]
    fn zero_and_full() {
        assert_eq!(Subspace::zero(5).dim(), 0);
        assert_eq!(Subspace::full(5).dim(), 5);
        let e2 = Subspace::coordinate(4, &[1, 3]).unwrap();
        assert_eq!(e2.dim(), 2);
    }
}
