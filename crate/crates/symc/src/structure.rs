//! Structural computations inside a realized symmetric pair: brackets,
//! centralizers, Jordan decomposition, reduced p-Levis, normal sl₂-triples,
//! characteristic gradings, defect, and ab-diagrams.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{
    minimal_polynomial, random_int_vector, size_reduce_rows, CoordinateFrame,
    EchelonAccumulator, Matrix, Scalar, SeedMixer, Subspace,
};
use crate::pairs::{Family, SymmetricPair};

/// Which carrier space a centralizer is computed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    G,
    K,
    P,
}

/// Bracket with membership checking.
pub fn bracket(pair: &SymmetricPair, x: &Matrix, y: &Matrix) -> Result<Matrix> {
    if !pair.contains_g(x) || !pair.contains_g(y) {
        return Err(Error::Membership("bracket arguments must lie in g".into()));
    }
    Ok(x.bracket(y))
}

/// Linear combination of matrices, accumulated entry-wise on the flattened
/// form: zero coefficients and zero matrix entries are skipped, so the cost
/// tracks the support of the inputs rather than a dense scale-and-add per
/// term.
pub(crate) fn combine_mats(coeffs: &[Scalar], mats: &[Matrix]) -> Matrix {
    debug_assert_eq!(coeffs.len(), mats.len());
    debug_assert!(!mats.is_empty());
    let n = mats[0].nrows();
    debug_assert_eq!(n, mats[0].ncols());
    let mut flat = vec![Scalar::zero(); n * n];
    for (c, m) in coeffs.iter().zip(mats.iter()) {
        if c.is_zero() {
            continue;
        }
        for r in 0..n {
            for (a, b) in flat[r * n..(r + 1) * n].iter_mut().zip(m.row(r)) {
                if b.is_zero() {
                    continue;
                }
                if a.is_zero() {
                    *a = c * b;
                } else {
                    *a += &(c * b);
                }
            }
        }
    }
    Matrix::from_flat(n, &flat).expect("square combination")
}

/// The matrix of `v ↦ [a, v]` from `span(basis)` into `g`, written in the
/// canonical g-coordinates of `pair` (pivot extraction, no solving).
fn ad_matrix_g_coords(pair: &SymmetricPair, a: &Matrix, basis: &[Matrix]) -> Matrix {
    let rows = pair.dim_g();
    let mut m = Matrix::zero(rows, basis.len());
    for (j, b) in basis.iter().enumerate() {
        let br = a.bracket(b);
        if br.is_zero() {
            continue;
        }
        let coords = pair.g_coords_unchecked(&br);
        for (i, v) in coords.into_iter().enumerate() {
            if !v.is_zero() {
                m.set(i, j, v);
            }
        }
    }
    m
}

/// Joint centralizer of `elems` inside the span of `basis`, as a subspace of
/// the flattened matrix space.  `elems` must lie in `g` of `pair` (enforced
/// by callers); membership of `basis` in `g` is assumed.
pub fn centralizer_of_span(
    pair: &SymmetricPair,
    basis: &[Matrix],
    elems: &[Matrix],
) -> Result<Subspace> {
    let n2 = pair.matrix_size() * pair.matrix_size();
    if basis.is_empty() {
        return Subspace::from_vectors(n2, Vec::new());
    }
    // Successive restriction: keep a coefficient-space kernel per element.
    // Intermediate bases are size-reduced and rescaled to primitive integer
    // form so the next round of brackets and eliminations stays in
    // small-integer arithmetic.
    let trace = std::env::var_os("SYMC_TRACE").is_some();
    let mut current: Vec<Matrix> = basis.to_vec();
    let size = pair.matrix_size();
    for a in elems {
        if current.is_empty() {
            break;
        }
        let t = std::time::Instant::now();
        let m = ad_matrix_g_coords(pair, a, &current);
        let t_ad = t.elapsed();
        let t = std::time::Instant::now();
        let kernel = Subspace::kernel_of(&m);
        let t_ker = t.elapsed();
        let t = std::time::Instant::now();
        let mut rows: Vec<Vec<Scalar>> = kernel
            .reduced_basis()
            .iter()
            .map(|coeffs| combine_mats(coeffs, &current).flatten())
            .collect();
        let t_comb = t.elapsed();
        let t = std::time::Instant::now();
        size_reduce_rows(&mut rows);
        let t_red = t.elapsed();
        if trace {
            eprintln!(
                "    [cspan] {}→{}: ad {:?} kernel {:?} combine {:?} reduce {:?}",
                current.len(),
                rows.len(),
                t_ad,
                t_ker,
                t_comb,
                t_red
            );
        }
        current = rows
            .iter()
            .map(|v| Matrix::from_flat(size, v).expect("square"))
            .collect();
    }
    let t = std::time::Instant::now();
    // Each restriction step maps a kernel basis through the previous
    // independent spanning set, so the rows stay independent; certify and
    // skip the eager echelonization.
    let out =
        Subspace::from_independent_rows(n2, current.iter().map(Matrix::flatten).collect());
    if trace {
        eprintln!("    [cspan] wrap: {:?}", t.elapsed());
    }
    out
}

/// `w^{elems}` for `w ∈ {g, k, p}`: the joint centralizer in the chosen
/// carrier space.
pub fn centralizer(
    pair: &SymmetricPair,
    space: Space,
    elems: &[Matrix],
) -> Result<Subspace> {
    for a in elems {
        if !pair.contains_g(a) {
            return Err(Error::Membership(
                "centralizer arguments must lie in g".into(),
            ));
        }
    }
    let basis = match space {
        Space::G => pair.g_mats(),
        Space::K => pair.k_mats(),
        Space::P => pair.p_mats(),
    };
    centralizer_of_span(pair, basis, elems)
}

pub fn centralizer_dim(pair: &SymmetricPair, space: Space, elems: &[Matrix]) -> Result<usize> {
    Ok(centralizer(pair, space, elems)?.dim())
}

/// Exact Jordan–Chevalley decomposition `x = x_s + x_n` by Newton iteration
/// against the squarefree part of the minimal polynomial.
pub fn jordan_decomposition(pair: &SymmetricPair, x: &Matrix) -> Result<(Matrix, Matrix)> {
    if !pair.contains_g(x) {
        return Err(Error::Membership(
            "jordan decomposition argument must lie in g".into(),
        ));
    }
    let n = x.nrows();
    let mu = minimal_polynomial(x)?;
    let rad = mu.squarefree_part()?;
    if rad == mu.monic()? {
        return Ok((x.clone(), Matrix::zero(n, n)));
    }
    // Fixed Bezout inverse: u · rad' ≡ 1 (mod rad).
    let (gcd, u, _) = rad.derivative().extended_gcd(&rad)?;
    if !gcd.is_one() {
        return Err(Error::internal(
            "squarefree part shares a factor with its derivative",
        ));
    }
    let mut y = x.clone();
    let mut steps = 0usize;
    loop {
        let val = rad.eval_matrix(&y)?;
        if val.is_zero() {
            break;
        }
        steps += 1;
        if steps > 2 * n + 4 {
            return Err(Error::internal("Newton iteration failed to converge"));
        }
        let correction = &val * &u.eval_matrix(&y)?;
        y = &y - &correction;
    }
    let x_s = y;
    let x_n = x - &x_s;
    // Verify the defining properties exactly.
    if !x_n.is_nilpotent() {
        return Err(Error::internal("nilpotent part is not nilpotent"));
    }
    if !x_s.bracket(&x_n).is_zero() {
        return Err(Error::internal("Jordan parts do not commute"));
    }
    if !pair.contains_g(&x_s) {
        return Err(Error::internal("semisimple part escapes g"));
    }
    if pair.contains_p(x) && !pair.contains_p(&x_s) {
        return Err(Error::internal("semisimple part of a p-element escapes p"));
    }
    Ok((x_s, x_n))
}

/// Fixpoint of the derived-span operator `L ↦ span[L, L]`, starting from a
/// set of matrices.  `bound` is an upper bound for every iterate's dimension,
/// used for early exit.
fn derived_fixpoint(
    pair: &SymmetricPair,
    mats: &[Matrix],
    bound: usize,
) -> Result<Subspace> {
    let n = pair.matrix_size();
    let n2 = n * n;
    let mut current: Vec<Matrix> = mats.to_vec();
    loop {
        // Echelon basis of span[current, current], accumulated incrementally
        // with early exit once the span can no longer grow.
        let mut acc = EchelonAccumulator::new(n2);
        'outer: for (i, a) in current.iter().enumerate() {
            for b in current.iter().skip(i + 1) {
                let br = a.bracket(b);
                if br.is_zero() {
                    continue;
                }
                if acc.insert(br.flatten()) && acc.dim() == bound {
                    break 'outer;
                }
            }
        }
        let stable = acc.dim() == current.len()
            && current.iter().all(|m| acc.contains(&m.flatten()));
        let space = acc.into_subspace()?;
        if stable {
            return Ok(space);
        }
        let next: Vec<Matrix> = space
            .reduced_basis()
            .iter()
            .map(|v| Matrix::from_flat(n, v).expect("square"))
            .collect();
        if next.len() == current.len() && next.iter().zip(current.iter()).all(|(a, b)| a == b) {
            return Ok(space);
        }
        current = next;
    }
}

/// Derived subalgebra of a bracket-closed subspace, iterated to a fixpoint.
pub fn derived_subalgebra(pair: &SymmetricPair, sub: &Subspace) -> Result<Subspace> {
    let n = pair.matrix_size();
    let mats: Vec<Matrix> = sub
        .basis()
        .iter()
        .map(|v| Matrix::from_flat(n, v).expect("square"))
        .collect();
    for (i, a) in mats.iter().enumerate() {
        for b in mats.iter().skip(i) {
            if !sub.contains(&a.bracket(b).flatten()) {
                return Err(Error::arg(
                    "derived subalgebra requires a bracket-closed input",
                ));
            }
        }
    }
    derived_fixpoint(pair, &mats, sub.dim())
}

/// A reduced p-Levi datum attached to a semisimple `s ∈ p`.
pub struct SubPair<'a> {
    parent: &'a SymmetricPair,
    s: Matrix,
    g_centralizer: Subspace,
    k_centralizer: Subspace,
    p_centralizer: Subspace,
    g_s: Subspace,
    k_s: Subspace,
    p_s: Subspace,
    c_p_gs: Subspace,
    k_s_mats: Vec<Matrix>,
    p_s_mats: Vec<Matrix>,
    rank_cell: OnceLock<std::result::Result<(usize, Vec<Matrix>), String>>,
}

impl fmt::Debug for SubPair<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SubPair(of {}, dim g_s = {}, dim k_s = {}, dim p_s = {})",
            self.parent.family().code(),
            self.g_s.dim(),
            self.k_s.dim(),
            self.p_s.dim()
        )
    }
}

impl<'a> SubPair<'a> {
    pub fn parent(&self) -> &'a SymmetricPair {
        self.parent
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    pub fn g_centralizer(&self) -> &Subspace {
        &self.g_centralizer
    }

    pub fn k_centralizer(&self) -> &Subspace {
        &self.k_centralizer
    }

    pub fn p_centralizer(&self) -> &Subspace {
        &self.p_centralizer
    }

    pub fn g_s(&self) -> &Subspace {
        &self.g_s
    }

    pub fn k_s(&self) -> &Subspace {
        &self.k_s
    }

    pub fn p_s(&self) -> &Subspace {
        &self.p_s
    }

    /// `c_p(g^s)`, the p-part of the center of `g^s`.
    pub fn c_p_gs(&self) -> &Subspace {
        &self.c_p_gs
    }

    pub fn k_s_mats(&self) -> &[Matrix] {
        &self.k_s_mats
    }

    pub fn p_s_mats(&self) -> &[Matrix] {
        &self.p_s_mats
    }

    fn rank_data(&self) -> Result<&(usize, Vec<Matrix>)> {
        let res = self.rank_cell.get_or_init(|| {
            certified_rank(
                self.parent,
                &self.p_s_mats,
                &format!("subpair:{}:{}", self.parent.family().code(), self.p_s.seed_hash()),
            )
            .map_err(|e| e.to_string())
        });
        match res {
            Ok(v) => Ok(v),
            Err(msg) => Err(Error::internal(msg.clone())),
        }
    }

    /// Certified symmetric rank of the reduced sub-pair `(g_s, k_s)`.
    pub fn symmetric_rank(&self) -> Result<usize> {
        Ok(self.rank_data()?.0)
    }

    /// A certified Cartan family of the sub-pair.
    pub fn cartan(&self) -> Result<&[Matrix]> {
        Ok(&self.rank_data()?.1)
    }

    /// `dim m` of the sub-pair, with the formula and the direct centralizer
    /// computation cross-checked.
    pub fn dim_m(&self) -> Result<usize> {
        let (rank, cartan) = self.rank_data()?;
        let formula = (self.k_s.dim() + rank)
            .checked_sub(self.p_s.dim())
            .ok_or_else(|| Error::internal("negative dim m in sub-pair"))?;
        let direct = centralizer_of_span(self.parent, &self.k_s_mats, cartan)?.dim();
        if direct != formula {
            return Err(Error::internal(format!(
                "sub-pair dim m mismatch: direct {direct}, formula {formula}"
            )));
        }
        Ok(formula)
    }

    pub fn contains_p_s(&self, x: &Matrix) -> bool {
        self.p_s.contains(&x.flatten())
    }
}

/// Certify the symmetric rank of a sub-pair with p-part spanned by
/// `p_basis`: sample `x` until `minpoly(x)` is squarefree and the centralizer
/// `c = p^x ∩ span` is abelian with every basis element semisimple.  Such a
/// `c` is itself a maximal toral subalgebra, so `dim c` is the rank — the
/// certificate does not rely on genericity.
pub(crate) fn certified_rank(
    pair: &SymmetricPair,
    p_basis: &[Matrix],
    seed_tag: &str,
) -> Result<(usize, Vec<Matrix>)> {
    if p_basis.is_empty() {
        return Ok((0, Vec::new()));
    }
    for attempt in 0..32u64 {
        let height = 10 + 5 * attempt;
        let mut rng = SeedMixer::new(0x7a11).with_str(seed_tag).with(attempt).rng();
        let coeffs = random_int_vector(&mut rng, p_basis.len(), height);
        let x = combine_mats(&coeffs, p_basis).primitive_scaled();
        if x.is_zero() || !minimal_polynomial(&x)?.is_squarefree()? {
            continue;
        }
        let c = centralizer_of_span(pair, p_basis, &[x])?;
        let c_mats: Vec<Matrix> = c
            .reduced_basis()
            .iter()
            .map(|v| Matrix::from_flat(pair.matrix_size(), v).expect("square"))
            .collect();
        let mut toral = true;
        'check: for (i, a) in c_mats.iter().enumerate() {
            if !minimal_polynomial(a)?.is_squarefree()? {
                toral = false;
                break;
            }
            for b in c_mats.iter().skip(i + 1) {
                if !a.bracket(b).is_zero() {
                    toral = false;
                    break 'check;
                }
            }
        }
        if toral {
            return Ok((c.dim(), c_mats));
        }
    }
    Err(Error::internal(format!(
        "rank certification failed after 32 seeds ({seed_tag})"
    )))
}

/// Bracket of two coordinate vectors through a structure-constant table:
/// `[Σᵢ uᵢbᵢ, Σⱼ vⱼbⱼ] = Σ_{i<j} (uᵢvⱼ − uⱼvᵢ)·[bᵢ, bⱼ]`, with `table[i][j]`
/// holding the coordinates of `[bᵢ, bⱼ]` in the same basis.
fn coord_bracket(table: &[Vec<Vec<Scalar>>], u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    let d = u.len();
    let mut out = vec![Scalar::zero(); d];
    for i in 0..d {
        if u[i].is_zero() && v[i].is_zero() {
            continue;
        }
        for j in (i + 1)..d {
            let c = &(&u[i] * &v[j]) - &(&u[j] * &v[i]);
            if c.is_zero() {
                continue;
            }
            for (o, e) in out.iter_mut().zip(table[i][j].iter()) {
                if !e.is_zero() {
                    *o = &*o + &(&c * e);
                }
            }
        }
    }
    out
}

/// Build the reduced p-Levi attached to a semisimple `s ∈ p`.
pub fn p_levi<'a>(pair: &'a SymmetricPair, s: &Matrix) -> Result<SubPair<'a>> {
    if !pair.contains_p(s) {
        return Err(Error::Membership("p-Levi base point must lie in p".into()));
    }
    if !minimal_polynomial(s)?.is_squarefree()? {
        return Err(Error::arg("p-Levi base point must be semisimple"));
    }
    let n = pair.matrix_size();
    let n2 = n * n;

    if s.is_zero() {
        // g is semisimple in every realization, so g_s = [g, g] = g.
        let sub = SubPair {
            parent: pair,
            s: s.clone(),
            g_centralizer: pair.g().clone(),
            k_centralizer: pair.k().clone(),
            p_centralizer: pair.p().clone(),
            g_s: pair.g().clone(),
            k_s: pair.k().clone(),
            p_s: pair.p().clone(),
            c_p_gs: Subspace::from_vectors(n2, Vec::new())?,
            k_s_mats: pair.k_mats().to_vec(),
            p_s_mats: pair.p_mats().to_vec(),
            rank_cell: OnceLock::new(),
        };
        let _ = sub
            .rank_cell
            .set(Ok((pair.symmetric_rank(), pair.cartan().to_vec())));
        return Ok(sub);
    }

    // s ∈ p, so ad s exchanges the θ-eigenspaces and g^s is θ-stable:
    // g^s = k^s ⊕ p^s.  Building g^s as the concatenation avoids eliminating
    // over the full g basis; directness of the sum amounts to the
    // concatenated rows staying independent, which `from_independent_rows`
    // certifies (or detects exactly on fallback).
    let trace = std::env::var_os("SYMC_TRACE").is_some();
    let mut mark_t = std::time::Instant::now();
    let mut mark = |label: &str| {
        if trace {
            eprintln!("    [plevi] {label}: {:?}", mark_t.elapsed());
        }
        mark_t = std::time::Instant::now();
    };
    let k_centralizer = centralizer(pair, Space::K, std::slice::from_ref(s))?;
    let p_centralizer = centralizer(pair, Space::P, std::slice::from_ref(s))?;
    mark("centralizers");

    // Work in g^s coordinates from here on.  The basis is the concatenation
    // of the (already reduced) k^s and p^s bases — the direct sum's own
    // echelon basis would mix the blocks and inflate entries — so θ acts
    // diagonally: +1 on the first `nk` coordinates, −1 on the rest.
    let nk = k_centralizer.dim();
    let gs_rows: Vec<Vec<Scalar>> = k_centralizer
        .reduced_basis()
        .into_iter()
        .chain(p_centralizer.reduced_basis())
        .collect();
    let g_centralizer = Subspace::from_independent_rows(n2, gs_rows.clone())?;
    if g_centralizer.dim() != nk + p_centralizer.dim() {
        return Err(Error::internal("g^s does not split as k^s ⊕ p^s"));
    }
    let gs_mats: Vec<Matrix> = gs_rows
        .iter()
        .map(|v| Matrix::from_flat(n, v).expect("square"))
        .collect();
    let d = gs_mats.len();
    mark("direct sum");
    let frame = CoordinateFrame::new(&gs_rows)?;
    mark("frame");
    let zero_coord = || vec![Scalar::zero(); d];

    // Structure constants: the coordinates of every basis-pair bracket.
    // These are the only matrix brackets the whole construction needs.
    let mut table: Vec<Vec<Vec<Scalar>>> = vec![vec![Vec::new(); d]; d];
    for i in 0..d {
        table[i][i] = zero_coord();
        for j in (i + 1)..d {
            let br = gs_mats[i].bracket(&gs_mats[j]);
            let co = if br.is_zero() {
                zero_coord()
            } else {
                frame.coords(&br.flatten()).ok_or_else(|| {
                    Error::internal("centralizer of s is not bracket-closed")
                })?
            };
            table[j][i] = co.iter().map(|c| -c).collect();
            table[i][j] = co;
        }
    }
    mark("table");

    // Derived fixpoint in coordinates: iterates are nested subalgebras, so
    // the dimension strictly decreases until [L, L] = L.
    let mut current: Vec<Vec<Scalar>> = (0..d)
        .map(|i| {
            let mut e = zero_coord();
            e[i] = Scalar::one();
            e
        })
        .collect();
    let mut current_space: Option<Subspace> = None;
    let gs_coords = loop {
        // A mod-p bracket rank equal to the span's dimension proves
        // stability outright (the bracket span sits inside the span), which
        // skips the expensive exact pass on the final iteration.
        if crate::linalg::bracket_closure_certified(&table, &current) {
            break match current_space {
                Some(space) => space,
                None => Subspace::full(d),
            };
        }
        let mut acc = EchelonAccumulator::new(d);
        'outer: for (i, u) in current.iter().enumerate() {
            for v in current.iter().skip(i + 1) {
                let br = coord_bracket(&table, u, v);
                if br.iter().all(Scalar::is_zero) {
                    continue;
                }
                if acc.insert(br) && acc.dim() == d {
                    break 'outer;
                }
            }
        }
        let stable =
            acc.dim() == current.len() && current.iter().all(|r| acc.contains(r));
        let space = acc.into_subspace()?;
        if stable {
            break space;
        }
        debug_assert!(space.dim() < current.len());
        // Iterate on the canonical rows: in a d-dimensional coordinate
        // space they are zero at every other pivot column, and that
        // sparsity wins over any entry-size reduction for the next pass of
        // brackets.
        current = space.basis().to_vec();
        current_space = Some(space);
    };
    mark("fixpoint");

    // θ-stability of g_s, then the k/p split, both coordinate-wise.
    let flip = |w: &[Scalar]| -> Vec<Scalar> {
        w.iter()
            .enumerate()
            .map(|(c, a)| if c < nk { a.clone() } else { -a })
            .collect()
    };
    let mut k_rows = Vec::new();
    let mut p_rows = Vec::new();
    for w in gs_coords.basis() {
        if !gs_coords.contains(&flip(w)) {
            return Err(Error::internal("derived centralizer is not θ-stable"));
        }
        if w[..nk].iter().any(|a| !a.is_zero()) {
            let mut kv = zero_coord();
            kv[..nk].clone_from_slice(&w[..nk]);
            k_rows.push(kv);
        }
        if w[nk..].iter().any(|a| !a.is_zero()) {
            let mut pv = zero_coord();
            pv[nk..].clone_from_slice(&w[nk..]);
            p_rows.push(pv);
        }
    }
    let k_coords = Subspace::from_vectors(d, k_rows)?;
    let p_coords = Subspace::from_vectors(d, p_rows)?;
    if k_coords.dim() + p_coords.dim() != gs_coords.dim() {
        return Err(Error::internal("g_s does not split as k_s ⊕ p_s"));
    }
    mark("split");

    // Centers from the same table: c_g(g^s) is the kernel of
    // c ↦ ([Σᵢ cᵢbᵢ, bⱼ])ⱼ, and c_p(g^s) the kernel of its restriction to
    // the p^s block of coordinates.
    let stacked = |lo: usize| -> Matrix {
        let mut m = Matrix::zero(d * d, d - lo);
        for i in lo..d {
            for j in 0..d {
                for (t, v) in table[i][j].iter().enumerate() {
                    if !v.is_zero() {
                        m.set(j * d + t, i - lo, v.clone());
                    }
                }
            }
        }
        m
    };
    let cg_coeffs = Subspace::kernel_of(&stacked(0));
    if cg_coeffs.dim() + gs_coords.dim() != d {
        return Err(Error::internal(
            "g^s does not decompose as c_g(g^s) ⊕ g_s dimension-wise",
        ));
    }
    mark("center g");
    let cp_rows: Vec<Vec<Scalar>> = Subspace::kernel_of(&stacked(nk))
        .basis()
        .iter()
        .map(|c| {
            let mut v = zero_coord();
            v[nk..].clone_from_slice(c);
            v
        })
        .collect();
    let cp_coords = Subspace::from_vectors(d, cp_rows)?;
    if cp_coords.intersect(&p_coords)?.dim() != 0
        || cp_coords.dim() + p_coords.dim() != p_centralizer.dim()
    {
        return Err(Error::internal(
            "p^s does not decompose as c_p(g^s) ⊕ p_s",
        ));
    }
    mark("center p");

    // Materialize the coordinate subspaces as matrices and flattened spans.
    let materialize = |coords: &Subspace| -> Vec<Matrix> {
        coords
            .reduced_basis()
            .iter()
            .map(|c| combine_mats(c, &gs_mats).primitive_scaled())
            .collect()
    };
    let k_s_mats = materialize(&k_coords);
    let p_s_mats = materialize(&p_coords);
    let cp_mats = materialize(&cp_coords);
    // g_s = k_s ⊕ p_s (verified above), so its materialization is the two
    // blocks put together rather than a third pass over gs_coords.
    let gs_basis_mats: Vec<Matrix> =
        k_s_mats.iter().chain(p_s_mats.iter()).cloned().collect();
    mark("materialize");
    // Images of independent coordinate rows under the frame isomorphism stay
    // independent; certify and defer echelonization.
    let g_s = Subspace::from_independent_rows(
        n2,
        gs_basis_mats.iter().map(Matrix::flatten).collect(),
    )?;
    let k_s =
        Subspace::from_independent_rows(n2, k_s_mats.iter().map(Matrix::flatten).collect())?;
    let p_s =
        Subspace::from_independent_rows(n2, p_s_mats.iter().map(Matrix::flatten).collect())?;
    let c_p_gs =
        Subspace::from_independent_rows(n2, cp_mats.iter().map(Matrix::flatten).collect())?;
    mark("wrap");

    Ok(SubPair {
        parent: pair,
        s: s.clone(),
        g_centralizer,
        k_centralizer,
        p_centralizer,
        g_s,
        k_s,
        p_s,
        c_p_gs,
        k_s_mats,
        p_s_mats,
        rank_cell: OnceLock::new(),
    })
}

/// A normal sl₂-triple: `e, f ∈ p`, `h ∈ k`, with the exact relations
/// `[h,e] = 2e`, `[h,f] = −2f`, `[e,f] = h`.
#[derive(Clone, Debug)]
pub struct NormalTriple {
    pub e: Matrix,
    pub h: Matrix,
    pub f: Matrix,
}

/// Embed a nonzero nilpotent `e ∈ p` into a normal sl₂-triple.
pub fn normal_sl2_triple(pair: &SymmetricPair, e: &Matrix) -> Result<NormalTriple> {
    if !pair.contains_p(e) {
        return Err(Error::Membership("triple base point must lie in p".into()));
    }
    if e.is_zero() {
        return Err(Error::arg("cannot embed e = 0 in an sl₂-triple"));
    }
    if !e.is_nilpotent() {
        return Err(Error::arg("triple base point must be nilpotent"));
    }
    let dim_g = pair.dim_g();

    // Step 1: h = [e, w] with w ∈ p solving ad_e²(w) = −2e.
    let p_mats = pair.p_mats();
    let mut a = Matrix::zero(dim_g, p_mats.len());
    for (j, b) in p_mats.iter().enumerate() {
        let ee = e.bracket(&e.bracket(b));
        if ee.is_zero() {
            continue;
        }
        for (i, v) in pair.g_coords_unchecked(&ee).into_iter().enumerate() {
            if !v.is_zero() {
                a.set(i, j, v);
            }
        }
    }
    let rhs = pair.g_coords_unchecked(&e.scale(&Scalar::from_int(-2)));
    let w_coeffs = a
        .solve(&rhs)?
        .ok_or_else(|| Error::internal("no solution for the h-equation of the triple"))?;
    let w = combine_mats(&w_coeffs, p_mats);
    let h = e.bracket(&w);
    if !pair.contains_k(&h) {
        return Err(Error::internal("triple element h escapes k"));
    }

    // Step 2: f′ ∈ g with [e, f′] = h and [h, f′] = −2f′  (the eigenspace
    // constraint is stacked into the solve), then f = (f′ − θf′)/2 ∈ p.
    let g_mats = pair.g_mats();
    let mut sys = Matrix::zero(2 * dim_g, g_mats.len());
    for (j, b) in g_mats.iter().enumerate() {
        let eb = e.bracket(b);
        if !eb.is_zero() {
            for (i, v) in pair.g_coords_unchecked(&eb).into_iter().enumerate() {
                if !v.is_zero() {
                    sys.set(i, j, v);
                }
            }
        }
        let hb = &h.bracket(b) + &b.scale(&Scalar::from_int(2));
        if !hb.is_zero() {
            for (i, v) in pair.g_coords_unchecked(&hb).into_iter().enumerate() {
                if !v.is_zero() {
                    sys.set(dim_g + i, j, v);
                }
            }
        }
    }
    let mut rhs = pair.g_coords_unchecked(&h);
    rhs.extend(std::iter::repeat(Scalar::zero()).take(dim_g));
    let f_coeffs = sys
        .solve(&rhs)?
        .ok_or_else(|| Error::internal("no solution for the f-equation of the triple"))?;
    let f_prime = combine_mats(&f_coeffs, g_mats);
    let f = (&f_prime - &pair.theta(&f_prime)).scale(&Scalar::from_frac(1, 2));

    let triple = NormalTriple { e: e.clone(), h, f };
    verify_triple(pair, &triple)?;
    Ok(triple)
}

fn verify_triple(pair: &SymmetricPair, t: &NormalTriple) -> Result<()> {
    let two_e = t.e.scale(&Scalar::from_int(2));
    let neg_two_f = t.f.scale(&Scalar::from_int(-2));
    if t.h.bracket(&t.e) != two_e
        || t.h.bracket(&t.f) != neg_two_f
        || t.e.bracket(&t.f) != t.h
    {
        return Err(Error::internal("triple relations fail"));
    }
    if !pair.contains_p(&t.e) || !pair.contains_p(&t.f) || !pair.contains_k(&t.h) {
        return Err(Error::internal("triple eigenspace membership fails"));
    }
    Ok(())
}

/// One eigenvalue slice of the ad-h grading.
#[derive(Clone, Debug)]
pub struct GradingPiece {
    pub g: Subspace,
    pub k: Subspace,
    pub p: Subspace,
}

/// Integer eigenspace decomposition of `g = ⊕ g(h,i)` (and of `k`, `p`).
#[derive(Debug)]
pub struct CharacteristicGrading {
    pieces: BTreeMap<i64, GradingPiece>,
}

impl CharacteristicGrading {
    pub fn eigenvalues(&self) -> Vec<i64> {
        self.pieces.keys().copied().collect()
    }

    pub fn piece(&self, i: i64) -> Option<&GradingPiece> {
        self.pieces.get(&i)
    }

    pub fn dim_g(&self, i: i64) -> usize {
        self.pieces.get(&i).map_or(0, |p| p.g.dim())
    }

    pub fn dim_k(&self, i: i64) -> usize {
        self.pieces.get(&i).map_or(0, |p| p.k.dim())
    }

    pub fn dim_p(&self, i: i64) -> usize {
        self.pieces.get(&i).map_or(0, |p| p.p.dim())
    }

    /// `w(e, i) = w(h, i) ∩ w^e` for a precomputed centralizer `w^e`.
    pub fn e_piece(&self, w_e: &Subspace, i: i64, which: Space) -> Result<Subspace> {
        match self.pieces.get(&i) {
            None => Subspace::from_vectors(w_e.ambient(), Vec::new()),
            Some(p) => {
                let w = match which {
                    Space::G => &p.g,
                    Space::K => &p.k,
                    Space::P => &p.p,
                };
                w.intersect(w_e)
            }
        }
    }
}

/// Kernel of `v ↦ [h, v] − λ v` on the span of `basis`.
fn eigenspace_in_span(
    pair: &SymmetricPair,
    basis: &[Matrix],
    h: &Matrix,
    lambda: i64,
) -> Result<Subspace> {
    let n2 = pair.matrix_size() * pair.matrix_size();
    if basis.is_empty() {
        return Subspace::from_vectors(n2, Vec::new());
    }
    let lam = Scalar::from_int(lambda);
    let mut m = Matrix::zero(pair.dim_g(), basis.len());
    for (j, b) in basis.iter().enumerate() {
        let shifted = &h.bracket(b) - &b.scale(&lam);
        if shifted.is_zero() {
            continue;
        }
        for (i, v) in pair.g_coords_unchecked(&shifted).into_iter().enumerate() {
            if !v.is_zero() {
                m.set(i, j, v);
            }
        }
    }
    let kernel = Subspace::kernel_of(&m);
    let vecs = kernel
        .reduced_basis()
        .iter()
        .map(|coeffs| combine_mats(coeffs, basis).flatten())
        .collect();
    Subspace::from_independent_rows(n2, vecs)
}

/// Integer ad-h grading of `g`, `k`, `p` for the triple's `h`.
pub fn characteristic_grading(
    pair: &SymmetricPair,
    t: &NormalTriple,
) -> Result<CharacteristicGrading> {
    verify_triple(pair, t)?;
    // Candidate eigenvalues: differences of the (integer) eigenvalues of h
    // on the natural module.
    let mu = minimal_polynomial(&t.h)?;
    let size = pair.matrix_size() as i64;
    let mut h_eigs = Vec::new();
    for lam in -size..=size {
        if mu.eval_scalar(&Scalar::from_int(lam)).is_zero() {
            h_eigs.push(lam);
        }
    }
    let mut candidates: Vec<i64> = Vec::new();
    for &a in &h_eigs {
        for &b in &h_eigs {
            if !candidates.contains(&(a - b)) {
                candidates.push(a - b);
            }
        }
    }
    candidates.sort_unstable();

    let mut pieces = BTreeMap::new();
    let mut total_g = 0usize;
    let mut total_k = 0usize;
    let mut total_p = 0usize;
    for lam in candidates {
        let g_piece = eigenspace_in_span(pair, pair.g_mats(), &t.h, lam)?;
        if g_piece.dim() == 0 {
            continue;
        }
        let k_piece = eigenspace_in_span(pair, pair.k_mats(), &t.h, lam)?;
        let p_piece = eigenspace_in_span(pair, pair.p_mats(), &t.h, lam)?;
        if k_piece.dim() + p_piece.dim() != g_piece.dim() {
            return Err(Error::internal("grading does not split along k ⊕ p"));
        }
        total_g += g_piece.dim();
        total_k += k_piece.dim();
        total_p += p_piece.dim();
        pieces.insert(lam, GradingPiece { g: g_piece, k: k_piece, p: p_piece });
    }
    if total_g != pair.dim_g() || total_k != pair.dim_k() || total_p != pair.dim_p() {
        return Err(Error::internal(
            "ad h is not diagonalizable with integer eigenvalues over the realization",
        ));
    }
    Ok(CharacteristicGrading { pieces })
}

/// Defect `δ(e)`: the symmetric rank of the centralizer pair of a normal
/// triple through `e`; `δ(0) = rk_sym(g,k)`.
pub fn defect(pair: &SymmetricPair, e: &Matrix) -> Result<usize> {
    if !pair.contains_p(e) {
        return Err(Error::Membership("defect argument must lie in p".into()));
    }
    if e.is_zero() {
        return Ok(pair.symmetric_rank());
    }
    let t = normal_sl2_triple(pair, e)?;
    let elems = [t.e.clone(), t.h.clone(), t.f.clone()];
    let p0 = centralizer(pair, Space::P, &elems)?;
    let p0_mats: Vec<Matrix> = p0
        .reduced_basis()
        .iter()
        .map(|v| Matrix::from_flat(pair.matrix_size(), v).expect("square"))
        .collect();
    let (rank, _) = certified_rank(
        pair,
        &p0_mats,
        &format!("defect:{}:{}", pair.family().code(), p0.seed_hash()),
    )?;
    Ok(rank)
}

/// `p^e ⊆ N` test: δ-criterion as primary, nilpotency sampling as a
/// cross-check; disagreement is an internal error.
pub fn is_p_distinguished(pair: &SymmetricPair, e: &Matrix) -> Result<bool> {
    if !pair.contains_p(e) {
        return Err(Error::Membership(
            "p-distinguished test argument must lie in p".into(),
        ));
    }
    if !e.is_zero() && !e.is_nilpotent() {
        return Err(Error::arg("p-distinguished test requires a nilpotent element"));
    }
    let by_defect = defect(pair, e)? == 0;
    let p_e = centralizer(pair, Space::P, std::slice::from_ref(e))?;
    let mut all_nilpotent = true;
    let samples = 40u64;
    for k in 0..samples {
        let mut rng = SeedMixer::new(0xd157)
            .with(p_e.seed_hash())
            .with(k)
            .rng();
        let coeffs = random_int_vector(&mut rng, p_e.dim(), 20);
        let v = p_e.combine(&coeffs)?;
        let m = Matrix::from_flat(pair.matrix_size(), &v)?;
        if !m.is_nilpotent() {
            all_nilpotent = false;
            break;
        }
    }
    if by_defect != all_nilpotent {
        return Err(Error::internal(format!(
            "p-distinguished checks disagree: defect says {by_defect}, sampling says {all_nilpotent}"
        )));
    }
    Ok(by_defect)
}

/// An ab-diagram: rows of alternating labels, canonically ordered by length
/// descending then lexicographically.
#[derive(Clone, PartialEq, Eq)]
pub struct ABDiagram {
    rows: Vec<String>,
}

impl ABDiagram {
    pub fn new(mut rows: Vec<String>) -> Result<ABDiagram> {
        for row in &rows {
            if row.is_empty() {
                return Err(Error::arg("ab-diagram rows must be nonempty"));
            }
            let chars: Vec<char> = row.chars().collect();
            for (i, c) in chars.iter().enumerate() {
                if *c != 'a' && *c != 'b' {
                    return Err(Error::arg("ab-diagram labels must be 'a' or 'b'"));
                }
                if i > 0 && chars[i - 1] == *c {
                    return Err(Error::arg("ab-diagram rows must alternate"));
                }
            }
        }
        rows.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
        Ok(ABDiagram { rows })
    }

    pub fn parse(text: &str) -> Result<ABDiagram> {
        let rows = text
            .split(',')
            .map(|r| r.trim().to_string())
            .filter(|r| !r.is_empty())
            .collect();
        ABDiagram::new(rows)
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    /// Total counts of `a` and `b` cells.
    pub fn counts(&self) -> (usize, usize) {
        let a = self.rows.iter().map(|r| r.matches('a').count()).sum();
        let b = self.rows.iter().map(|r| r.matches('b').count()).sum();
        (a, b)
    }
}

impl fmt::Debug for ABDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.rows.join(", "))
    }
}

impl fmt::Display for ABDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rows.join(","))
    }
}

/// ab-diagram of a nilpotent `z ∈ p`, from the flags
/// `dim(ker zʲ ∩ V_a)`, `dim(ker zʲ ∩ V_b)`.
///
/// Rows read along the action of `z`: the leftmost cell is a chain start and
/// the rightmost cell is killed by `z`, so the flags count cells from the
/// right end of the rows.
pub fn ab_diagram_of(pair: &SymmetricPair, z: &Matrix) -> Result<ABDiagram> {
    let (va, vb) = pair.va_vb().ok_or_else(|| {
        Error::Unsupported(format!(
            "family {} has no natural-module grading for ab-diagrams",
            pair.family().code()
        ))
    })?;
    if !pair.contains_p(z) {
        return Err(Error::Membership("ab-diagram argument must lie in p".into()));
    }
    if !z.is_zero() && !z.is_nilpotent() {
        return Err(Error::arg("ab-diagram requires a nilpotent element"));
    }
    let n = pair.matrix_size();
    // Flags from the right: d_x(j) = dim(ker z^j ∩ V_x), j = 0, 1, …
    let mut da = vec![0usize];
    let mut db = vec![0usize];
    let mut j = 0usize;
    loop {
        j += 1;
        let kj = Subspace::kernel_of(&z.pow(j as u64));
        da.push(kj.intersect(va)?.dim());
        db.push(kj.intersect(vb)?.dim());
        if da[j] == va.dim() && db[j] == vb.dim() {
            break;
        }
        if j > n {
            return Err(Error::internal("nilpotency flags failed to stabilize"));
        }
    }
    let maxlen = j;
    // m^x_j = number of rows whose j-th cell from the right is labeled x.
    let m_at = |d: &[usize], j: usize| -> i64 {
        if j < d.len() {
            d[j] as i64 - d[j - 1] as i64
        } else {
            0
        }
    };
    let mut rows = Vec::new();
    for len in 1..=maxlen {
        // A row of length ≥ len+1 whose (len+1)-th-from-right cell is 'b'
        // has an 'a' at position len, and vice versa.
        let exact_a = m_at(&da, len) - m_at(&db, len + 1);
        let exact_b = m_at(&db, len) - m_at(&da, len + 1);
        if exact_a < 0 || exact_b < 0 {
            return Err(Error::internal("inconsistent ab-diagram flags"));
        }
        // Leftmost label of a length-len row whose rightmost is computed by
        // alternation: position len from the right is the leftmost cell.
        for _ in 0..exact_a {
            rows.push(alternating_row('a', len));
        }
        for _ in 0..exact_b {
            rows.push(alternating_row('b', len));
        }
    }
    let d = ABDiagram::new(rows)?;
    let (ca, cb) = d.counts();
    if ca != va.dim() || cb != vb.dim() {
        return Err(Error::internal("ab-diagram cell counts do not match V_a, V_b"));
    }
    Ok(d)
}

/// Row of `len` cells whose **leftmost** label is `start`, alternating.
fn alternating_row(start: char, len: usize) -> String {
    (0..len)
        .map(|i| {
            let flip = i % 2 == 1;
            match (start, flip) {
                ('a', false) | ('b', true) => 'a',
                _ => 'b',
            }
        })
        .collect()
}

/// Build a nilpotent `z ∈ p` with the prescribed ab-diagram, for an AIII
/// realization (block grading by coordinates).
pub fn build_nilpotent_from_ab(pair: &SymmetricPair, d: &ABDiagram) -> Result<Matrix> {
    let Family::AIII { p, q } = pair.family() else {
        return Err(Error::Unsupported(
            "ab-diagram construction is implemented for AIII realizations only".into(),
        ));
    };
    let (ca, cb) = d.counts();
    if ca != p || cb != q {
        return Err(Error::arg(format!(
            "diagram has counts (a, b) = ({ca}, {cb}), expected ({p}, {q})"
        )));
    }
    let n = pair.matrix_size();
    let mut next_a = 0usize; // V_a indices are 0..p
    let mut next_b = p; // V_b indices are p..p+q
    let mut z = Matrix::zero(n, n);
    for row in d.rows() {
        let mut cells = Vec::new();
        for label in row.chars() {
            let idx = if label == 'a' {
                let i = next_a;
                next_a += 1;
                i
            } else {
                let i = next_b;
                next_b += 1;
                i
            };
            cells.push(idx);
        }
        // Chain start at the left: z maps each cell to the next one.
        for w in cells.windows(2) {
            z.set(w[1], w[0], Scalar::one());
        }
    }
    if !pair.contains_p(&z) {
        return Err(Error::internal("constructed nilpotent escapes p"));
    }
    let rt = ab_diagram_of(pair, &z)?;
    if &rt != d {
        return Err(Error::internal(format!(
            "ab-diagram round trip failed: built {rt:?} from {d:?}"
        )));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::build_pair;

    fn pair(f: Family) -> SymmetricPair {
        build_pair(f).unwrap()
    }

    #[test]
    fn bracket_checks_membership() {
        let pr = pair(Family::AI { n: 2 });
        let outside = Matrix::identity(2);
        assert!(bracket(&pr, &outside, &outside).is_err());
        let x = pr.p_mats()[0].clone();
        assert!(bracket(&pr, &x, &x).unwrap().is_zero());
    }

    #[test]
    fn centralizer_of_zero_is_everything() {
        let pr = pair(Family::AIII { p: 1, q: 2 });
        let z = Matrix::zero(3, 3);
        let c = centralizer(&pr, Space::P, &[z]).unwrap();
        assert_eq!(c.dim(), pr.dim_p());
    }

    #[test]
    fn centralizer_of_cartan_has_dim_m() {
        for f in [Family::CII { p: 2, q: 2 }, Family::AI { n: 3 }, Family::A0 { n: 2 }] {
            let pr = pair(f);
            let c = centralizer(&pr, Space::K, pr.cartan()).unwrap();
            assert_eq!(c.dim(), pr.dim_m(), "{f}");
        }
    }

    #[test]
    fn jordan_decomposition_round_trips() {
        let pr = pair(Family::AIII { p: 2, q: 2 });
        // Nilpotent input.
        let mut z = Matrix::zero(4, 4);
        z.set(0, 2, Scalar::one());
        assert!(pr.contains_p(&z));
        let (s, n) = jordan_decomposition(&pr, &z).unwrap();
        assert!(s.is_zero());
        assert_eq!(n, z);
        // Semisimple input.
        let a = pr.cartan()[0].clone();
        let (s, n) = jordan_decomposition(&pr, &a).unwrap();
        assert_eq!(s, a);
        assert!(n.is_zero());
        // Genuinely mixed input: a + commuting nilpotent.
        let mut z2 = Matrix::zero(4, 4);
        z2.set(1, 3, Scalar::one());
        let x = &pr.cartan()[0] + &z2;
        assert!(pr.contains_p(&x));
        let (s, n) = jordan_decomposition(&pr, &x).unwrap();
        assert_eq!(s, pr.cartan()[0]);
        assert_eq!(n, z2);
        assert!(pr.contains_p(&s) && pr.contains_p(&n));
    }

    #[test]
    fn derived_subalgebra_of_abelian_is_zero() {
        let pr = pair(Family::AI { n: 3 });
        let cartan = pr.cartan_subspace().unwrap();
        let d = derived_subalgebra(&pr, &cartan).unwrap();
        assert_eq!(d.dim(), 0);
        // Full g is perfect.
        let d = derived_subalgebra(&pr, pr.g()).unwrap();
        assert_eq!(d.dim(), pr.dim_g());
        // Non-closed input is rejected: span of a single off-diagonal p-element
        // plus a k-rotation is not closed in sl3.
        let bad = Subspace::from_vectors(
            9,
            vec![pr.p_mats()[0].flatten(), pr.k_mats()[0].flatten()],
        )
        .unwrap();
        assert!(derived_subalgebra(&pr, &bad).is_err());
    }

    #[test]
    fn p_levi_at_zero_is_the_whole_pair() {
        let pr = pair(Family::CII { p: 1, q: 1 });
        let sub = p_levi(&pr, &Matrix::zero(4, 4)).unwrap();
        assert_eq!(sub.g_s().dim(), pr.dim_g());
        assert_eq!(sub.symmetric_rank().unwrap(), pr.symmetric_rank());
        assert_eq!(sub.dim_m().unwrap(), pr.dim_m());
        assert_eq!(sub.c_p_gs().dim(), 0);
    }

    #[test]
    fn p_levi_of_regular_element_is_minimal() {
        let pr = pair(Family::AIII { p: 2, q: 2 });
        // Generic element of the Cartan subspace: distinct coefficients.
        let s = &pr.cartan()[0] + &pr.cartan()[1].scale(&Scalar::from_int(2));
        let sub = p_levi(&pr, &s).unwrap();
        // Minimal Levi: g^s = a ⊕ m, all of p^s is central in g^s.
        assert_eq!(sub.p_centralizer().dim(), pr.symmetric_rank());
        assert_eq!(sub.c_p_gs().dim(), pr.symmetric_rank());
        assert_eq!(sub.p_s().dim(), 0);
        assert_eq!(sub.symmetric_rank().unwrap(), 0);
    }

    #[test]
    fn p_levi_rejects_non_semisimple() {
        let pr = pair(Family::AIII { p: 2, q: 2 });
        let mut z = Matrix::zero(4, 4);
        z.set(0, 2, Scalar::one());
        assert!(p_levi(&pr, &z).is_err());
    }

    #[test]
    fn sl2_triple_exact_relations() {
        let pr = pair(Family::AIII { p: 2, q: 2 });
        let mut e = Matrix::zero(4, 4);
        e.set(0, 2, Scalar::one());
        e.set(1, 3, Scalar::one());
        let t = normal_sl2_triple(&pr, &e).unwrap();
        assert_eq!(t.h.bracket(&t.e), t.e.scale(&Scalar::from_int(2)));
        assert_eq!(t.h.bracket(&t.f), t.f.scale(&Scalar::from_int(-2)));
        assert_eq!(t.e.bracket(&t.f), t.h);
        assert!(normal_sl2_triple(&pr, &Matrix::zero(4, 4)).is_err());
        assert!(normal_sl2_triple(&pr, &pr.cartan()[0]).is_err());
    }

    #[test]
    fn grading_is_complete() {
        let pr = pair(Family::AIII { p: 1, q: 2 });
        let mut e = Matrix::zero(3, 3);
        e.set(0, 1, Scalar::one());
        let t = normal_sl2_triple(&pr, &e).unwrap();
        let grading = characteristic_grading(&pr, &t).unwrap();
        let total: usize = grading.eigenvalues().iter().map(|&i| grading.dim_g(i)).sum();
        assert_eq!(total, pr.dim_g());
        let tk: usize = grading.eigenvalues().iter().map(|&i| grading.dim_k(i)).sum();
        let tp: usize = grading.eigenvalues().iter().map(|&i| grading.dim_p(i)).sum();
        assert_eq!(tk, pr.dim_k());
        assert_eq!(tp, pr.dim_p());
    }

    #[test]
    fn defect_of_zero_is_the_rank() {
        let pr = pair(Family::AIII { p: 2, q: 3 });
        assert_eq!(defect(&pr, &Matrix::zero(5, 5)).unwrap(), 2);
    }

    #[test]
    fn regular_nilpotent_is_p_distinguished() {
        // AIII(1,1) = (sl2, so2-like): single nilpotent direction.
        let pr = pair(Family::AIII { p: 1, q: 1 });
        let mut e = Matrix::zero(2, 2);
        e.set(0, 1, Scalar::one());
        assert!(is_p_distinguished(&pr, &e).unwrap());
        assert_eq!(defect(&pr, &e).unwrap(), 0);
        // e = 0 is not distinguished when the rank is positive.
        assert!(!is_p_distinguished(&pr, &Matrix::zero(2, 2)).unwrap());
    }

    #[test]
    fn ab_diagram_of_zero_is_singletons() {
        let pr = pair(Family::AIII { p: 2, q: 1 });
        let d = ab_diagram_of(&pr, &Matrix::zero(3, 3)).unwrap();
        assert_eq!(d.rows(), &["a".to_string(), "a".to_string(), "b".to_string()]);
    }

    #[test]
    fn ab_diagram_round_trip() {
        let pr = pair(Family::AIII { p: 2, q: 1 });
        let d = ABDiagram::parse("ab,a").unwrap();
        let z = build_nilpotent_from_ab(&pr, &d).unwrap();
        assert_eq!(z.rank(), 1);
        assert_eq!(ab_diagram_of(&pr, &z).unwrap(), d);
        // Inconsistent diagram rejected.
        assert!(build_nilpotent_from_ab(&pr, &ABDiagram::parse("ab,b").unwrap()).is_err());
        // Unsupported family rejected.
        let ai = pair(Family::AI { n: 3 });
        assert!(ab_diagram_of(&ai, &Matrix::zero(3, 3)).is_err());
    }

    #[test]
    fn ab_diagram_canonical_order() {
        let d = ABDiagram::new(vec!["b".into(), "ab".into(), "aba".into(), "a".into()]).unwrap();
        assert_eq!(
            d.rows(),
            &["aba".to_string(), "ab".to_string(), "a".to_string(), "b".to_string()]
        );
        assert!(ABDiagram::parse("aa").is_err());
        assert!(ABDiagram::parse("ac").is_err());
    }
}
