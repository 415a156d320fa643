//! Matrix realizations of the classical symmetric Lie algebras.
//!
//! Each family is realized as an explicit space of `size × size` matrices
//! over `ℚ` or `ℚ(i)` together with an involution `θ`; `k` and `p` are the
//! `±1` eigenspaces.  Every build self-verifies: closed-form dimensions,
//! `θ² = id`, eigenspace membership, a commuting semisimple Cartan family in
//! `p`, a certified symmetric rank (closed form vs. a computed regular
//! element), and the two computations of `dim m`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{minimal_polynomial, random_vector, Matrix, Scalar, SeedMixer, Subspace};

/// Base field of a realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Rational,
    Gaussian,
}

impl Field {
    pub fn label(self) -> &'static str {
        match self {
            Field::Rational => "Q",
            Field::Gaussian => "Q(i)",
        }
    }
}

/// The eight classical families.
///
/// Parameter conventions: `A0(n)` is `sl_n ⊕ sl_n` with the swap; `AI(n)` is
/// `(sl_n, so_n)`; `AII(n)` is `(sl_2n, sp_2n)`; `AIII(p,q)` is
/// `(sl_{p+q}, s(gl_p ⊕ gl_q))`; `BDI(p,q)` is `(so_{p+q}, so_p ⊕ so_q)`;
/// `CI(n)` is `(sp_2n, gl_n)`; `CII(p,q)` is `(sp_{2(p+q)}, sp_2p ⊕ sp_2q)`;
/// `DIII(n)` is `(so_2n, gl_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A0 { n: usize },
    AI { n: usize },
    AII { n: usize },
    AIII { p: usize, q: usize },
    BDI { p: usize, q: usize },
    CI { n: usize },
    CII { p: usize, q: usize },
    DIII { n: usize },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::A0 { .. } => "A0",
            Family::AI { .. } => "AI",
            Family::AII { .. } => "AII",
            Family::AIII { .. } => "AIII",
            Family::BDI { .. } => "BDI",
            Family::CI { .. } => "CI",
            Family::CII { .. } => "CII",
            Family::DIII { .. } => "DIII",
        }
    }

    pub fn params(&self) -> Vec<usize> {
        match *self {
            Family::A0 { n } | Family::AI { n } | Family::AII { n } => vec![n],
            Family::CI { n } | Family::DIII { n } => vec![n],
            Family::AIII { p, q } | Family::BDI { p, q } | Family::CII { p, q } => vec![p, q],
        }
    }

    pub fn code(&self) -> String {
        let params: Vec<String> = self.params().iter().map(|v| v.to_string()).collect();
        format!("{}({})", self.tag(), params.join(","))
    }

    /// Construct from a tag string plus optional parameters, as given on the
    /// command line.
    pub fn from_args(tag: &str, n: Option<usize>, p: Option<usize>, q: Option<usize>) -> Result<Family> {
        let need_n = |n: Option<usize>| {
            n.ok_or_else(|| Error::arg(format!("family {tag} takes a single parameter --n")))
        };
        let need_pq = |p: Option<usize>, q: Option<usize>| match (p, q) {
            (Some(p), Some(q)) => Ok((p, q)),
            _ => Err(Error::arg(format!("family {tag} takes parameters --p and --q"))),
        };
        let fam = match tag {
            "A0" => Family::A0 { n: need_n(n)? },
            "AI" => Family::AI { n: need_n(n)? },
            "AII" => Family::AII { n: need_n(n)? },
            "CI" => Family::CI { n: need_n(n)? },
            "DIII" => Family::DIII { n: need_n(n)? },
            "AIII" => {
                let (p, q) = need_pq(p, q)?;
                Family::AIII { p, q }
            }
            "BDI" => {
                let (p, q) = need_pq(p, q)?;
                Family::BDI { p, q }
            }
            "CII" => {
                let (p, q) = need_pq(p, q)?;
                Family::CII { p, q }
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "unsupported family {other:?}; expected one of A0, AI, AII, AIII, BDI, CI, CII, DIII"
                )))
            }
        };
        fam.validate()?;
        Ok(fam)
    }

    /// Parameter-range validation.
    ///
    /// `BDI` admits `p + q = 2` (the one-dimensional `so₂`) so that the
    /// rank-one table can include `(so₂, so₁)`; everything there is still
    /// well-defined.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Family::A0 { n } => n >= 2,
            Family::AI { n } => n >= 2,
            Family::AII { n } => n >= 2,
            Family::AIII { p, q } => p >= 1 && q >= 1,
            Family::BDI { p, q } => p >= 1 && q >= 1 && p + q >= 2,
            Family::CI { n } => n >= 1,
            Family::CII { p, q } => p >= 1 && q >= 1,
            Family::DIII { n } => n >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::arg(format!("parameters out of range for {}", self.code())))
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Family::CI { .. } | Family::DIII { .. } => Field::Gaussian,
            _ => Field::Rational,
        }
    }

    /// Matrix size of the realization.
    pub fn matrix_size(&self) -> usize {
        match *self {
            Family::A0 { n } => 2 * n,
            Family::AI { n } => n,
            Family::AII { n } => 2 * n,
            Family::AIII { p, q } | Family::BDI { p, q } => p + q,
            Family::CI { n } => 2 * n,
            Family::CII { p, q } => 2 * (p + q),
            Family::DIII { n } => 2 * n,
        }
    }

    /// Closed-form symmetric rank.
    pub fn closed_form_rank(&self) -> usize {
        match *self {
            Family::A0 { n } | Family::AI { n } | Family::AII { n } => n - 1,
            Family::AIII { p, q } | Family::BDI { p, q } | Family::CII { p, q } => p.min(q),
            Family::CI { n } => n,
            Family::DIII { n } => n / 2,
        }
    }

    /// The standard verification grid: two-parameter families with
    /// `p ≤ q ≤ 4`, one-parameter families with `n ≤ 6`.
    pub fn grid() -> Vec<Family> {
        let mut out = Vec::new();
        for n in 2..=6 {
            out.push(Family::A0 { n });
            out.push(Family::AI { n });
            out.push(Family::AII { n });
            out.push(Family::DIII { n });
        }
        for n in 1..=6 {
            out.push(Family::CI { n });
        }
        for p in 1..=4usize {
            for q in p..=4 {
                out.push(Family::AIII { p, q });
                out.push(Family::CII { p, q });
                if p + q >= 3 {
                    out.push(Family::BDI { p, q });
                }
            }
        }
        out
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// How `θ` acts on matrices.
#[derive(Clone, Debug)]
enum Involution {
    /// `x ↦ J x J⁻¹`.
    Conjugation { j: Matrix, j_inv: Matrix },
    /// `x ↦ −J xᵀ J⁻¹`.
    TwistedTranspose { j: Matrix, j_inv: Matrix },
}

impl Involution {
    fn apply(&self, x: &Matrix) -> Matrix {
        match self {
            Involution::Conjugation { j, j_inv } => &(j * x) * j_inv,
            Involution::TwistedTranspose { j, j_inv } => -&(&(j * &x.transpose()) * j_inv),
        }
    }
}

/// A realized symmetric Lie algebra `g = k ⊕ p` with involution `θ`.
pub struct SymmetricPair {
    family: Family,
    size: usize,
    field: Field,
    involution: Involution,
    form_t: Option<Matrix>,
    j_matrix: Option<Matrix>,
    g: Subspace,
    k: Subspace,
    p: Subspace,
    g_mats: Vec<Matrix>,
    k_mats: Vec<Matrix>,
    p_mats: Vec<Matrix>,
    cartan: Vec<Matrix>,
    rank: usize,
    dim_m: usize,
    va: Option<Subspace>,
    vb: Option<Subspace>,
}

impl fmt::Debug for SymmetricPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SymmetricPair({}, dim g = {}, dim k = {}, dim p = {}, rk = {})",
            self.family.code(),
            self.dim_g(),
            self.dim_k(),
            self.dim_p(),
            self.rank
        )
    }
}

fn e(n: usize, r: usize, c: usize) -> Matrix {
    let mut m = Matrix::zero(n, n);
    m.set(r, c, Scalar::one());
    m
}

/// Standard basis of `sl_n` embedded at block offset `off` inside size-`n_amb`
/// matrices.
fn sl_basis(n_amb: usize, off: usize, n: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push(e(n_amb, off + i, off + j));
            }
        }
    }
    for i in 0..n - 1 {
        let mut m = Matrix::zero(n_amb, n_amb);
        m.set(off + i, off + i, Scalar::one());
        m.set(off + i + 1, off + i + 1, -&Scalar::one());
        out.push(m);
    }
    out
}

/// Basis of `so_n` for the identity form: antisymmetric matrices.
fn so_identity_basis(n: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut m = Matrix::zero(n, n);
            m.set(i, j, Scalar::one());
            m.set(j, i, -&Scalar::one());
            out.push(m);
        }
    }
    out
}

/// Basis of `sp_2n` for the block form `T = [[0, I], [−I, 0]]`: matrices
/// `[[a, b], [c, −aᵀ]]` with `b, c` symmetric.
fn sp_block_basis(n: usize) -> Vec<Matrix> {
    let m2 = 2 * n;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut m = Matrix::zero(m2, m2);
            m.set(i, j, Scalar::one());
            m.set(n + j, n + i, -&Scalar::one());
            out.push(m);
        }
    }
    for i in 0..n {
        for j in i..n {
            let mut m = Matrix::zero(m2, m2);
            m.set(i, n + j, Scalar::one());
            if i != j {
                m.set(j, n + i, Scalar::one());
            }
            out.push(m);
            let mut m = Matrix::zero(m2, m2);
            m.set(n + i, j, Scalar::one());
            if i != j {
                m.set(n + j, i, Scalar::one());
            }
            out.push(m);
        }
    }
    out
}

/// Basis of `{ x : xᵀ T + T x = 0 }` for the antidiagonal form
/// `T v_i = t_i v_{M+1−i}` (indices 1-based in `ts`).  The entry condition is
/// `x_{c̄ r̄} = −(t_r / t_c) x_{r c}` with `ī = M+1−i`.
fn antidiagonal_form_basis(ts: &[Scalar]) -> Vec<Matrix> {
    let m = ts.len();
    let bar = |i: usize| m - 1 - i; // 0-based mirror
    let mut out = Vec::new();
    for r in 0..m {
        for c in 0..m {
            let pr = bar(c);
            let pc = bar(r);
            if (r, c) == (pr, pc) {
                // Entry at (r, r̄): free iff t_r = −t_{r̄}.
                if ts[r] == -&ts[bar(r)] {
                    out.push(e(m, r, c));
                }
            } else if (r, c) < (pr, pc) {
                let mut mat = e(m, r, c);
                let coeff = -&(&ts[r] * &ts[c].inv().expect("form coefficients are units"));
                mat.set(pr, pc, coeff);
                out.push(mat);
            }
        }
    }
    out
}

/// Antidiagonal form matrix for the coefficient vector `ts`.
fn antidiagonal_form_matrix(ts: &[Scalar]) -> Matrix {
    let m = ts.len();
    let mut t = Matrix::zero(m, m);
    for (i, ti) in ts.iter().enumerate() {
        t.set(m - 1 - i, i, ti.clone());
    }
    t
}

fn diag(values: Vec<Scalar>) -> Matrix {
    let n = values.len();
    let mut m = Matrix::zero(n, n);
    for (i, v) in values.into_iter().enumerate() {
        m.set(i, i, v);
    }
    m
}

fn diag_inverse(d: &Matrix) -> Matrix {
    let n = d.nrows();
    let mut m = Matrix::zero(n, n);
    for i in 0..n {
        m.set(i, i, d.get(i, i).inv().expect("diagonal of an invertible matrix"));
    }
    m
}

/// CII sign pattern: `+1` exactly at odd 1-based positions `≤ 2p` and even
/// positions `≥ 2(p+q)+1−2p`.
fn cii_epsilon(p: usize, q: usize) -> Vec<Scalar> {
    let n2 = 2 * (p + q);
    (1..=n2)
        .map(|i| {
            let positive = (i % 2 == 1 && i <= 2 * p) || (i % 2 == 0 && i >= n2 + 1 - 2 * p);
            if positive {
                Scalar::one()
            } else {
                -&Scalar::one()
            }
        })
        .collect()
}

/// Dimension of `{ v ∈ span(basis) : [x, v] = 0 }`.
fn centralizer_dim_in(x: &Matrix, basis: &[Matrix]) -> usize {
    if basis.is_empty() {
        return 0;
    }
    let n2 = basis[0].nrows() * basis[0].ncols();
    let mut cols = Matrix::zero(n2, basis.len());
    for (j, b) in basis.iter().enumerate() {
        for (i, v) in x.bracket(b).flatten().into_iter().enumerate() {
            if !v.is_zero() {
                cols.set(i, j, v);
            }
        }
    }
    basis.len() - cols.rank()
}

/// Dimension of `{ v ∈ span(basis) : [aᵢ, v] = 0 for every aᵢ }`, computed by
/// successive kernel restriction.
fn joint_centralizer_dim(elems: &[Matrix], basis: &[Matrix]) -> usize {
    let mut current: Vec<Matrix> = basis.to_vec();
    for a in elems {
        if current.is_empty() {
            break;
        }
        let n2 = current[0].nrows() * current[0].ncols();
        let mut cols = Matrix::zero(n2, current.len());
        for (j, b) in current.iter().enumerate() {
            for (i, v) in a.bracket(b).flatten().into_iter().enumerate() {
                if !v.is_zero() {
                    cols.set(i, j, v);
                }
            }
        }
        let kernel = Subspace::kernel_of(&cols);
        let next: Vec<Matrix> = kernel
            .basis()
            .iter()
            .map(|coeffs| {
                let mut acc = Matrix::zero(current[0].nrows(), current[0].ncols());
                for (c, b) in coeffs.iter().zip(current.iter()) {
                    if !c.is_zero() {
                        acc = &acc + &b.scale(c);
                    }
                }
                acc
            })
            .collect();
        current = next;
    }
    current.len()
}

impl SymmetricPair {
    /// Build and fully verify a realization.
    pub fn build(family: Family) -> Result<SymmetricPair> {
        family.validate()?;
        let size = family.matrix_size();
        let field = family.field();
        let one = Scalar::one();
        let neg = -&one;

        // Family-specific data: g-basis, involution, optional form/J, the
        // graded Cartan family, and the natural-module grading (V_a, V_b).
        let (g_basis, involution, form_t, j_matrix, cartan, vab): (
            Vec<Matrix>,
            Involution,
            Option<Matrix>,
            Option<Matrix>,
            Vec<Matrix>,
            Option<(Vec<usize>, Vec<usize>)>,
        ) = match family {
            Family::A0 { n } => {
                let mut basis = sl_basis(size, 0, n);
                basis.extend(sl_basis(size, n, n));
                let mut p_swap = Matrix::zero(size, size);
                for i in 0..n {
                    p_swap.set(i, n + i, one.clone());
                    p_swap.set(n + i, i, one.clone());
                }
                let inv = Involution::Conjugation { j: p_swap.clone(), j_inv: p_swap.clone() };
                let cartan = (0..n - 1)
                    .map(|i| {
                        let mut m = Matrix::zero(size, size);
                        m.set(i, i, one.clone());
                        m.set(i + 1, i + 1, neg.clone());
                        m.set(n + i, n + i, neg.clone());
                        m.set(n + i + 1, n + i + 1, one.clone());
                        m
                    })
                    .collect();
                (basis, inv, None, Some(p_swap), cartan, None)
            }
            Family::AI { n } => {
                let basis = sl_basis(size, 0, n);
                let id = Matrix::identity(size);
                let inv = Involution::TwistedTranspose { j: id.clone(), j_inv: id };
                let cartan = (0..n - 1)
                    .map(|i| {
                        let mut m = Matrix::zero(size, size);
                        m.set(i, i, one.clone());
                        m.set(i + 1, i + 1, neg.clone());
                        m
                    })
                    .collect();
                (basis, inv, None, None, cartan, None)
            }
            Family::AII { n } => {
                let basis = sl_basis(size, 0, 2 * n);
                let mut j = Matrix::zero(size, size);
                for i in 0..n {
                    j.set(i, n + i, one.clone());
                    j.set(n + i, i, neg.clone());
                }
                let j_inv = -&j;
                let inv = Involution::TwistedTranspose { j, j_inv };
                let cartan = (0..n - 1)
                    .map(|i| {
                        let mut m = Matrix::zero(size, size);
                        m.set(i, i, one.clone());
                        m.set(n + i, n + i, one.clone());
                        m.set(i + 1, i + 1, neg.clone());
                        m.set(n + i + 1, n + i + 1, neg.clone());
                        m
                    })
                    .collect();
                (basis, inv, None, None, cartan, None)
            }
            Family::AIII { p, q } => {
                let basis = sl_basis(size, 0, p + q);
                let j = diag(
                    (0..size)
                        .map(|i| if i < p { one.clone() } else { neg.clone() })
                        .collect(),
                );
                let inv = Involution::Conjugation { j: j.clone(), j_inv: j.clone() };
                let cartan = (0..p.min(q))
                    .map(|i| {
                        let mut m = Matrix::zero(size, size);
                        m.set(i, p + i, one.clone());
                        m.set(p + i, i, one.clone());
                        m
                    })
                    .collect();
                let va = (0..p).collect();
                let vb = (p..p + q).collect();
                (basis, inv, None, Some(j), cartan, Some((va, vb)))
            }
            Family::BDI { p, q } => {
                let basis = so_identity_basis(size);
                let j = diag(
                    (0..size)
                        .map(|i| if i < p { one.clone() } else { neg.clone() })
                        .collect(),
                );
                let inv = Involution::Conjugation { j: j.clone(), j_inv: j.clone() };
                let cartan = (0..p.min(q))
                    .map(|i| {
                        let mut m = Matrix::zero(size, size);
                        m.set(i, p + i, one.clone());
                        m.set(p + i, i, neg.clone());
                        m
                    })
                    .collect();
                let va = (0..p).collect();
                let vb = (p..p + q).collect();
                (basis, inv, Some(Matrix::identity(size)), Some(j), cartan, Some((va, vb)))
            }
            Family::CI { n } => {
                let basis = sp_block_basis(n);
                let mut t = Matrix::zero(size, size);
                for i in 0..n {
                    t.set(i, n + i, one.clone());
                    t.set(n + i, i, neg.clone());
                }
                let j = diag(
                    (0..size)
                        .map(|i| if i < n { Scalar::i() } else { -&Scalar::i() })
                        .collect(),
                );
                let inv = Involution::Conjugation { j: j.clone(), j_inv: diag_inverse(&j) };
                let cartan = (0..n)
                    .map(|i| {
                        let mut m = Matrix::zero(size, size);
                        m.set(i, n + i, one.clone());
                        m.set(n + i, i, one.clone());
                        m
                    })
                    .collect();
                let va = (0..n).collect();
                let vb = (n..2 * n).collect();
                (basis, inv, Some(t), Some(j), cartan, Some((va, vb)))
            }
            Family::CII { p, q } => {
                let ts: Vec<Scalar> = (1..=size)
                    .map(|i| if i % 2 == 0 { one.clone() } else { neg.clone() })
                    .collect();
                let basis = antidiagonal_form_basis(&ts);
                let eps = cii_epsilon(p, q);
                let j = diag(eps.clone());
                let inv = Involution::Conjugation { j: j.clone(), j_inv: j.clone() };
                let cartan = (1..=p.min(q))
                    .map(|i| {
                        // 1-based u = 2i−1, v = 2i and their mirrors.
                        let u = 2 * i - 2;
                        let v = 2 * i - 1;
                        let ub = size - 1 - u;
                        let vb = size - 1 - v;
                        let mut m = Matrix::zero(size, size);
                        m.set(u, v, one.clone());
                        m.set(v, u, one.clone());
                        m.set(vb, ub, one.clone());
                        m.set(ub, vb, one.clone());
                        m
                    })
                    .collect();
                let va = (0..size).filter(|i| eps[*i].is_one()).collect();
                let vb = (0..size).filter(|i| !eps[*i].is_one()).collect();
                (
                    basis,
                    inv,
                    Some(antidiagonal_form_matrix(&ts)),
                    Some(j),
                    cartan,
                    Some((va, vb)),
                )
            }
            Family::DIII { n } => {
                let ts: Vec<Scalar> = (1..=size)
                    .map(|i| {
                        let sign = if i <= n { i % 2 == 0 } else { i % 2 == 1 };
                        if sign {
                            one.clone()
                        } else {
                            neg.clone()
                        }
                    })
                    .collect();
                let basis = antidiagonal_form_basis(&ts);
                let j = diag(
                    (1..=size)
                        .map(|i| if i % 2 == 1 { Scalar::i() } else { -&Scalar::i() })
                        .collect(),
                );
                let inv = Involution::Conjugation { j: j.clone(), j_inv: diag_inverse(&j) };
                let cartan = (1..=n / 2)
                    .map(|m_idx| {
                        // 1-based r = 2m−1, c = 2m and their mirrors.
                        let r = 2 * m_idx - 2;
                        let c = 2 * m_idx - 1;
                        let rb = size - 1 - r;
                        let cb = size - 1 - c;
                        let mut m = Matrix::zero(size, size);
                        m.set(r, c, one.clone());
                        m.set(c, r, one.clone());
                        m.set(cb, rb, one.clone());
                        m.set(rb, cb, one.clone());
                        m
                    })
                    .collect();
                let va = (0..size).filter(|i| i % 2 == 0).collect(); // 1-based odd
                let vb = (0..size).filter(|i| i % 2 == 1).collect();
                (
                    basis,
                    inv,
                    Some(antidiagonal_form_matrix(&ts)),
                    Some(j),
                    cartan,
                    Some((va, vb)),
                )
            }
        };

        // θ-split into k (fixed) and p (negated).
        let mut k_vecs = Vec::new();
        let mut p_vecs = Vec::new();
        for b in &g_basis {
            let tb = involution.apply(b);
            let kv = b + &tb;
            let pv = b - &tb;
            if !kv.is_zero() {
                k_vecs.push(kv.flatten());
            }
            if !pv.is_zero() {
                p_vecs.push(pv.flatten());
            }
        }
        let n2 = size * size;
        let g = Subspace::from_vectors(n2, g_basis.iter().map(Matrix::flatten).collect())?;
        let k = Subspace::from_vectors(n2, k_vecs)?;
        let p = Subspace::from_vectors(n2, p_vecs)?;

        let to_mats = |s: &Subspace| -> Vec<Matrix> {
            s.basis()
                .iter()
                .map(|v| Matrix::from_flat(size, v).expect("flattened square matrix"))
                .collect()
        };
        let g_mats = to_mats(&g);
        let k_mats = to_mats(&k);
        let p_mats = to_mats(&p);

        let (va, vb) = match vab {
            Some((ia, ib)) => (
                Some(Subspace::coordinate(size, &ia)?),
                Some(Subspace::coordinate(size, &ib)?),
            ),
            None => (None, None),
        };

        let rank = family.closed_form_rank();
        let pair = SymmetricPair {
            family,
            size,
            field,
            involution,
            form_t,
            j_matrix,
            g,
            k,
            p,
            g_mats,
            k_mats,
            p_mats,
            cartan,
            rank,
            dim_m: 0, // set below after verification
            va,
            vb,
        };
        pair.verify_realization()
    }

    /// All build-time invariants; returns the pair with `dim_m` filled in.
    fn verify_realization(mut self) -> Result<SymmetricPair> {
        let fam = self.family;
        let fail = |msg: String| Error::internal(format!("{}: {msg}", fam.code()));

        // Closed-form dimensions.
        let (eg, ek, ep) = closed_form_dims(fam);
        if (self.dim_g(), self.dim_k(), self.dim_p()) != (eg, ek, ep) {
            return Err(fail(format!(
                "dimension mismatch: got ({}, {}, {}), expected ({eg}, {ek}, {ep})",
                self.dim_g(),
                self.dim_k(),
                self.dim_p()
            )));
        }
        if self.dim_k() + self.dim_p() != self.dim_g() {
            return Err(fail("k ⊕ p does not fill g".into()));
        }

        // θ is an involution preserving g, fixing k, negating p.
        for b in &self.g_mats {
            let tb = self.theta(b);
            if !self.g.contains(&tb.flatten()) {
                return Err(fail("θ does not preserve g".into()));
            }
            if self.theta(&tb) != *b {
                return Err(fail("θ² ≠ id".into()));
            }
        }
        for b in &self.k_mats {
            if self.theta(b) != *b {
                return Err(fail("θ does not fix k".into()));
            }
        }
        for b in &self.p_mats {
            if self.theta(b) != -b {
                return Err(fail("θ does not negate p".into()));
            }
        }

        // Cartan family: inside p, commuting, semisimple, right count.
        if self.cartan.len() != self.rank {
            return Err(fail("Cartan family has the wrong cardinality".into()));
        }
        for a in &self.cartan {
            if !self.p.contains(&a.flatten()) {
                return Err(fail("Cartan element outside p".into()));
            }
            if !minimal_polynomial(a)?.is_squarefree()? {
                return Err(fail("non-semisimple Cartan element".into()));
            }
        }
        for (i, a) in self.cartan.iter().enumerate() {
            for b in self.cartan.iter().skip(i + 1) {
                if !a.bracket(b).is_zero() {
                    return Err(fail("Cartan family is not abelian".into()));
                }
            }
        }

        // Certified rank: a sampled regular element x ∈ span(cartan) must
        // have squarefree minimal polynomial and dim p^x = closed-form rank.
        if self.rank > 0 {
            let mut certified = false;
            for attempt in 0..32u64 {
                let height = 20 + 10 * attempt;
                let mut rng = SeedMixer::new(0x5eed)
                    .with_str(&fam.code())
                    .with(attempt)
                    .rng();
                let coeffs = random_vector(&mut rng, self.rank, height);
                if coeffs.iter().any(Scalar::is_zero) {
                    continue;
                }
                let mut x = Matrix::zero(self.size, self.size);
                for (c, a) in coeffs.iter().zip(self.cartan.iter()) {
                    x = &x + &a.scale(c);
                }
                if !minimal_polynomial(&x)?.is_squarefree()? {
                    continue;
                }
                if centralizer_dim_in(&x, &self.p_mats) == self.rank {
                    certified = true;
                    break;
                }
            }
            if !certified {
                return Err(fail(
                    "failed to certify the symmetric rank with a regular element after 32 seeds"
                        .into(),
                ));
            }
        }

        // dim m: direct centralizer of the Cartan family in k vs. the
        // closed-form identity dim k − dim p + rank.
        let direct = joint_centralizer_dim(&self.cartan, &self.k_mats);
        let formula = (self.dim_k() + self.rank)
            .checked_sub(self.dim_p())
            .ok_or_else(|| fail("negative dim m".into()))?;
        if direct != formula {
            return Err(fail(format!(
                "dim m mismatch: direct {direct}, formula {formula}"
            )));
        }
        self.dim_m = formula;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn matrix_size(&self) -> usize {
        self.size
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim_g(&self) -> usize {
        self.g.dim()
    }

    pub fn dim_k(&self) -> usize {
        self.k.dim()
    }

    pub fn dim_p(&self) -> usize {
        self.p.dim()
    }

    pub fn symmetric_rank(&self) -> usize {
        self.rank
    }

    pub fn dim_m(&self) -> usize {
        self.dim_m
    }

    pub fn g(&self) -> &Subspace {
        &self.g
    }

    pub fn k(&self) -> &Subspace {
        &self.k
    }

    pub fn p(&self) -> &Subspace {
        &self.p
    }

    pub fn g_mats(&self) -> &[Matrix] {
        &self.g_mats
    }

    pub fn k_mats(&self) -> &[Matrix] {
        &self.k_mats
    }

    pub fn p_mats(&self) -> &[Matrix] {
        &self.p_mats
    }

    /// The commuting semisimple family spanning a Cartan subspace of `p`.
    pub fn cartan(&self) -> &[Matrix] {
        &self.cartan
    }

    pub fn cartan_subspace(&self) -> Result<Subspace> {
        Subspace::from_vectors(
            self.size * self.size,
            self.cartan.iter().map(Matrix::flatten).collect(),
        )
    }

    pub fn theta(&self, x: &Matrix) -> Matrix {
        self.involution.apply(x)
    }

    /// `θ` as a `dim g × dim g` matrix in the canonical `g`-coordinates.
    pub fn theta_matrix(&self) -> Matrix {
        let d = self.dim_g();
        let mut m = Matrix::zero(d, d);
        for (j, b) in self.g_mats.iter().enumerate() {
            let coords = self.g.coordinates_unchecked(&self.theta(b).flatten());
            for (i, v) in coords.into_iter().enumerate() {
                if !v.is_zero() {
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn form_t(&self) -> Option<&Matrix> {
        self.form_t.as_ref()
    }

    pub fn j_matrix(&self) -> Option<&Matrix> {
        self.j_matrix.as_ref()
    }

    /// Natural-module grading (V_a, V_b) when the family carries one.
    pub fn va_vb(&self) -> Option<(&Subspace, &Subspace)> {
        match (&self.va, &self.vb) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }

    pub fn contains_g(&self, x: &Matrix) -> bool {
        x.nrows() == self.size && x.ncols() == self.size && self.g.contains(&x.flatten())
    }

    pub fn contains_k(&self, x: &Matrix) -> bool {
        x.nrows() == self.size && x.ncols() == self.size && self.k.contains(&x.flatten())
    }

    pub fn contains_p(&self, x: &Matrix) -> bool {
        x.nrows() == self.size && x.ncols() == self.size && self.p.contains(&x.flatten())
    }

    /// Coordinates in the canonical g-basis for an element already known to
    /// lie in g (pivot extraction, no solving).
    pub fn g_coords_unchecked(&self, x: &Matrix) -> Vec<Scalar> {
        self.g.coordinates_unchecked(&x.flatten())
    }

    pub fn matrix_from_p_coords(&self, coeffs: &[Scalar]) -> Result<Matrix> {
        let v = self.p.combine(coeffs)?;
        Matrix::from_flat(self.size, &v)
    }
}

/// Closed-form `(dim g, dim k, dim p)` per family.
fn closed_form_dims(family: Family) -> (usize, usize, usize) {
    match family {
        Family::A0 { n } => (2 * (n * n - 1), n * n - 1, n * n - 1),
        Family::AI { n } => (n * n - 1, n * (n - 1) / 2, n * (n + 1) / 2 - 1),
        Family::AII { n } => {
            let m = 2 * n;
            (m * m - 1, n * (2 * n + 1), 2 * n * n - n - 1)
        }
        Family::AIII { p, q } => {
            let m = p + q;
            (m * m - 1, p * p + q * q - 1, 2 * p * q)
        }
        Family::BDI { p, q } => {
            let m = p + q;
            (m * (m - 1) / 2, p * (p - 1) / 2 + q * (q - 1) / 2, p * q)
        }
        Family::CI { n } => (n * (2 * n + 1), n * n, n * (n + 1)),
        Family::CII { p, q } => {
            let m = p + q;
            (m * (2 * m + 1), p * (2 * p + 1) + q * (2 * q + 1), 4 * p * q)
        }
        Family::DIII { n } => (n * (2 * n - 1), n * n, n * (n - 1)),
    }
}

/// Convenience free function mirroring the library surface.
pub fn build_pair(family: Family) -> Result<SymmetricPair> {
    SymmetricPair::build(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_match_closed_forms() {
        let cases = [
            (Family::AI { n: 3 }, (8, 3, 5)),
            (Family::A0 { n: 2 }, (6, 3, 3)),
            (Family::AII { n: 2 }, (15, 10, 5)),
            (Family::AIII { p: 2, q: 3 }, (24, 12, 12)),
            (Family::BDI { p: 2, q: 3 }, (10, 4, 6)),
            (Family::CI { n: 2 }, (10, 4, 6)),
            (Family::CII { p: 2, q: 2 }, (36, 20, 16)),
            (Family::DIII { n: 3 }, (15, 9, 6)),
        ];
        for (fam, (dg, dk, dp)) in cases {
            let pair = SymmetricPair::build(fam).unwrap();
            assert_eq!(
                (pair.dim_g(), pair.dim_k(), pair.dim_p()),
                (dg, dk, dp),
                "{}",
                fam.code()
            );
        }
    }

    #[test]
    fn cii22_has_dim_m_6() {
        let pair = SymmetricPair::build(Family::CII { p: 2, q: 2 }).unwrap();
        assert_eq!(pair.dim_m(), 6);
        assert_eq!(pair.symmetric_rank(), 2);
    }

    #[test]
    fn small_dim_m_values() {
        let ai2 = SymmetricPair::build(Family::AI { n: 2 }).unwrap();
        assert_eq!(ai2.dim_m(), 0);
        let a02 = SymmetricPair::build(Family::A0 { n: 2 }).unwrap();
        assert_eq!(a02.dim_m(), 1);
    }

    #[test]
    fn bracket_relations_hold() {
        for fam in [
            Family::AI { n: 3 },
            Family::AIII { p: 1, q: 2 },
            Family::CII { p: 1, q: 1 },
            Family::DIII { n: 2 },
            Family::A0 { n: 2 },
        ] {
            let pair = SymmetricPair::build(fam).unwrap();
            for x in pair.k_mats().iter().take(4) {
                for y in pair.k_mats().iter().take(4) {
                    assert!(pair.contains_k(&x.bracket(y)), "[k,k] ⊆ k in {fam}");
                }
                for y in pair.p_mats().iter().take(4) {
                    assert!(pair.contains_p(&x.bracket(y)), "[k,p] ⊆ p in {fam}");
                }
            }
            for x in pair.p_mats().iter().take(4) {
                for y in pair.p_mats().iter().take(4) {
                    assert!(pair.contains_k(&x.bracket(y)), "[p,p] ⊆ k in {fam}");
                }
            }
        }
    }

    #[test]
    fn bdi_minimal_case_allowed() {
        let pair = SymmetricPair::build(Family::BDI { p: 1, q: 1 }).unwrap();
        assert_eq!((pair.dim_g(), pair.dim_k(), pair.dim_p()), (1, 0, 1));
        assert_eq!(pair.symmetric_rank(), 1);
        assert_eq!(pair.dim_m(), 0);
    }

    #[test]
    fn out_of_range_parameters_rejected() {
        assert!(SymmetricPair::build(Family::AI { n: 1 }).is_err());
        assert!(SymmetricPair::build(Family::AIII { p: 0, q: 3 }).is_err());
        assert!(Family::from_args("FII", None, None, None).is_err());
        assert!(Family::from_args("AIII", Some(3), None, None).is_err());
    }

    #[test]
    fn theta_matrix_is_an_involution_in_g_coords() {
        let pair = SymmetricPair::build(Family::AIII { p: 1, q: 2 }).unwrap();
        let th = pair.theta_matrix();
        let sq = &th * &th;
        assert_eq!(sq, Matrix::identity(pair.dim_g()));
    }

    #[test]
    fn va_vb_dimensions() {
        let pair = SymmetricPair::build(Family::CII { p: 1, q: 2 }).unwrap();
        let (va, vb) = pair.va_vb().unwrap();
        assert_eq!((va.dim(), vb.dim()), (2, 4));
        let pair = SymmetricPair::build(Family::DIII { n: 3 }).unwrap();
        let (va, vb) = pair.va_vb().unwrap();
        assert_eq!((va.dim(), vb.dim()), (3, 3));
        assert!(SymmetricPair::build(Family::AI { n: 3 })
            .unwrap()
            .va_vb()
            .is_none());
    }

    #[test]
    fn grid_builds_cleanly() {
        // The full grid is exercised in the acceptance suite; keep a spread
        // of representatives here so unit tests stay fast.
        for fam in [
            Family::A0 { n: 3 },
            Family::AI { n: 4 },
            Family::AII { n: 3 },
            Family::AIII { p: 2, q: 4 },
            Family::BDI { p: 1, q: 2 },
            Family::CI { n: 3 },
            Family::CII { p: 1, q: 3 },
            Family::DIII { n: 4 },
        ] {
            let pair = SymmetricPair::build(fam).unwrap();
            assert_eq!(pair.symmetric_rank(), fam.closed_form_rank(), "{fam}");
        }
    }
}
