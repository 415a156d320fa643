//! Pair-level analysis of commuting pairs in p × p: irregularity number,
//! classification, rigidity density test, moment-map kernel dimension, and
//! reduction to the sub-pair attached to the semisimple part.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::pairs::SymmetricPair;
use crate::structure::{
    centralizer_of_span, combine_mats, jordan_decomposition, p_levi, SubPair,
};

/// Position of a commuting pair relative to the principal locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// i > 0.
    IrregularPlus,
    /// i = 0.
    Principal,
    /// −rk < i < 0.
    StrictSemiRigid,
    /// i = −rk < 0.
    Rigid,
}

impl Classification {
    /// Pure function of the irregularity number and the symmetric rank.
    /// When the rank is zero the principal and rigid conditions coincide
    /// and the pair is reported as principal.
    pub fn from_irregularity(i: i64, rank: usize) -> Classification {
        if i > 0 {
            Classification::IrregularPlus
        } else if i == 0 {
            Classification::Principal
        } else if i == -(rank as i64) {
            Classification::Rigid
        } else {
            Classification::StrictSemiRigid
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::IrregularPlus => "irregular_plus",
            Classification::Principal => "principal",
            Classification::StrictSemiRigid => "strict_semi_rigid",
            Classification::Rigid => "rigid",
        }
    }
}

/// Centralizer dimensions of a commuting pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairDims {
    pub k_xy: usize,
    pub p_xy: usize,
    pub k_x: usize,
    pub p_x: usize,
    pub k_y: usize,
    pub p_y: usize,
}

/// Full analysis record for one commuting pair.
#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub dims: PairDims,
    pub irregularity: i64,
    pub classification: Classification,
    pub rigidity_density_check: bool,
    pub moment_kernel_dim: usize,
    /// Report for the reduced sub-pair `(g_{x_s}, k_{x_s})` acting on
    /// `(x_n, y₂)`; present exactly when the semisimple part of `x` is
    /// nonzero.
    pub reduction: Option<Box<PairReport>>,
}

/// A symmetric pair or a reduced sub-pair, seen through the data the
/// analysis needs: carrier bases, dimensions and certified invariants.
pub(crate) struct PairView<'a> {
    pair: &'a SymmetricPair,
    p_space: &'a Subspace,
    k_mats: &'a [Matrix],
    p_mats: &'a [Matrix],
    dim_k: usize,
    dim_p: usize,
    dim_m: usize,
    rank: usize,
}

impl<'a> PairView<'a> {
    pub(crate) fn of_pair(pair: &'a SymmetricPair) -> PairView<'a> {
        PairView {
            pair,
            p_space: pair.p(),
            k_mats: pair.k_mats(),
            p_mats: pair.p_mats(),
            dim_k: pair.dim_k(),
            dim_p: pair.dim_p(),
            dim_m: pair.dim_m(),
            rank: pair.symmetric_rank(),
        }
    }

    pub(crate) fn of_sub(sub: &'a SubPair<'a>) -> Result<PairView<'a>> {
        Ok(PairView {
            pair: sub.parent(),
            p_space: sub.p_s(),
            k_mats: sub.k_s_mats(),
            p_mats: sub.p_s_mats(),
            dim_k: sub.k_s().dim(),
            dim_p: sub.p_s().dim(),
            dim_m: sub.dim_m()?,
            rank: sub.symmetric_rank()?,
        })
    }
}

/// Validate membership in the carrier p-space and commutation; the error
/// message for a non-commuting pair carries the first nonzero entry of the
/// bracket.
fn require_pair(view: &PairView<'_>, x: &Matrix, y: &Matrix) -> Result<()> {
    if !view.p_space.contains(&x.flatten()) || !view.p_space.contains(&y.flatten()) {
        return Err(Error::Membership(
            "both elements must lie in the p-space of the pair".into(),
        ));
    }
    let br = x.bracket(y);
    if !br.is_zero() {
        for r in 0..br.nrows() {
            for c in 0..br.ncols() {
                if !br.get(r, c).is_zero() {
                    return Err(Error::NonCommuting(format!(
                        "[x,y] has entry {} at ({r}, {c})",
                        br.get(r, c).render()
                    )));
                }
            }
        }
    }
    Ok(())
}

fn mats_of(pair: &SymmetricPair, space: &Subspace) -> Vec<Matrix> {
    space
        .reduced_basis()
        .iter()
        .map(|v| Matrix::from_flat(pair.matrix_size(), v).expect("square"))
        .collect()
}

/// Rank of the linear map `span(domain) → g`, `v ↦ [v, y]`.
fn bracket_map_rank(pair: &SymmetricPair, domain: &[Matrix], y: &Matrix) -> usize {
    if domain.is_empty() {
        return 0;
    }
    let mut m = Matrix::zero(pair.dim_g(), domain.len());
    for (j, b) in domain.iter().enumerate() {
        let br = b.bracket(y);
        if br.is_zero() {
            continue;
        }
        for (i, v) in pair.g_coords_unchecked(&br).into_iter().enumerate() {
            if !v.is_zero() {
                m.set(i, j, v);
            }
        }
    }
    m.rank_bareiss()
}

/// Dimension of the kernel of `dμ: p × p → k`, `(a,b) ↦ [a,y] + [x,b]`,
/// computed directly.
fn moment_kernel_direct(view: &PairView<'_>, x: &Matrix, y: &Matrix) -> usize {
    let cols = 2 * view.p_mats.len();
    if cols == 0 {
        return 0;
    }
    let mut m = Matrix::zero(view.pair.dim_g(), cols);
    for (j, b) in view.p_mats.iter().enumerate() {
        let br = b.bracket(y);
        if !br.is_zero() {
            for (i, v) in view.pair.g_coords_unchecked(&br).into_iter().enumerate() {
                if !v.is_zero() {
                    m.set(i, j, v);
                }
            }
        }
        let br = x.bracket(b);
        if !br.is_zero() {
            for (i, v) in view.pair.g_coords_unchecked(&br).into_iter().enumerate() {
                if !v.is_zero() {
                    m.set(i, view.p_mats.len() + j, v);
                }
            }
        }
    }
    cols - m.rank_bareiss()
}

struct CoreNumbers {
    dims: PairDims,
    irregularity: i64,
    classification: Classification,
    density: bool,
    moment: usize,
}

fn core_numbers(view: &PairView<'_>, x: &Matrix, y: &Matrix) -> Result<CoreNumbers> {
    require_pair(view, x, y)?;
    let pair = view.pair;
    let c_kx = centralizer_of_span(pair, view.k_mats, std::slice::from_ref(x))?;
    let c_kx_mats = mats_of(pair, &c_kx);
    let k_xy = centralizer_of_span(pair, &c_kx_mats, std::slice::from_ref(y))?.dim();
    let c_px = centralizer_of_span(pair, view.p_mats, std::slice::from_ref(x))?;
    let c_px_mats = mats_of(pair, &c_px);
    let p_xy = centralizer_of_span(pair, &c_px_mats, std::slice::from_ref(y))?.dim();
    let k_y = centralizer_of_span(pair, view.k_mats, std::slice::from_ref(y))?.dim();
    let p_y = centralizer_of_span(pair, view.p_mats, std::slice::from_ref(y))?.dim();
    let dims = PairDims {
        k_xy,
        p_xy,
        k_x: c_kx.dim(),
        p_x: c_px.dim(),
        k_y,
        p_y,
    };
    let irregularity = k_xy as i64 - view.dim_m as i64;
    let classification = Classification::from_irregularity(irregularity, view.rank);

    // Density of the K^x-orbit of y in p^x: tangent-space criterion.
    let density = bracket_map_rank(pair, &c_kx_mats, y) == dims.p_x;

    // Moment-map kernel via the closed formula.  `moment_kernel_dim`
    // cross-checks the formula against the direct kernel computation; the
    // invariant suites repeat that comparison on a sample schedule.
    let formula = 2 * view.dim_p as i64 - view.dim_k as i64 + k_xy as i64;
    if formula < 0 {
        return Err(Error::internal(format!(
            "moment kernel formula produced a negative dimension: {formula}"
        )));
    }
    Ok(CoreNumbers {
        dims,
        irregularity,
        classification,
        density,
        moment: formula as usize,
    })
}

fn report_from(core: CoreNumbers, reduction: Option<Box<PairReport>>) -> PairReport {
    PairReport {
        dims: core.dims,
        irregularity: core.irregularity,
        classification: core.classification,
        rigidity_density_check: core.density,
        moment_kernel_dim: core.moment,
        reduction,
    }
}

/// `i((g,k),(x,y)) = dim k^{x,y} − dim m`.
pub fn irregularity_number(pair: &SymmetricPair, x: &Matrix, y: &Matrix) -> Result<i64> {
    let view = PairView::of_pair(pair);
    require_pair(&view, x, y)?;
    let k_xy = centralizer_of_span(pair, view.k_mats, &[x.clone(), y.clone()])?.dim();
    Ok(k_xy as i64 - view.dim_m as i64)
}

/// Irregularity number computed inside a reduced sub-pair.
pub fn irregularity_in_subpair(sub: &SubPair<'_>, x: &Matrix, y: &Matrix) -> Result<i64> {
    let view = PairView::of_sub(sub)?;
    require_pair(&view, x, y)?;
    let k_xy =
        centralizer_of_span(sub.parent(), view.k_mats, &[x.clone(), y.clone()])?.dim();
    Ok(k_xy as i64 - view.dim_m as i64)
}

/// Exact splitting `y = y₁ + y₂` along `p^{x_s} = c_p(g^{x_s}) ⊕ p_{x_s}`.
fn split_y(pair: &SymmetricPair, sub: &SubPair<'_>, y: &Matrix) -> Result<(Matrix, Matrix)> {
    let c_mats = mats_of(pair, sub.c_p_gs());
    let s_mats = mats_of(pair, sub.p_s());
    let cols = c_mats.len() + s_mats.len();
    let n = pair.matrix_size();
    if cols == 0 {
        if y.is_zero() {
            return Ok((Matrix::zero(n, n), Matrix::zero(n, n)));
        }
        return Err(Error::internal("cannot split y over an empty decomposition"));
    }
    let mut m = Matrix::zero(pair.dim_g(), cols);
    for (j, b) in c_mats.iter().chain(s_mats.iter()).enumerate() {
        for (i, v) in pair.g_coords_unchecked(b).into_iter().enumerate() {
            if !v.is_zero() {
                m.set(i, j, v);
            }
        }
    }
    let rhs = pair.g_coords_unchecked(y);
    let coeffs = m.solve(&rhs)?.ok_or_else(|| {
        Error::internal("y does not lie in p^{x_s} = c_p(g^{x_s}) ⊕ p_{x_s}")
    })?;
    let y2 = if s_mats.is_empty() {
        Matrix::zero(n, n)
    } else {
        combine_mats(&coeffs[c_mats.len()..], &s_mats)
    };
    let y1 = y - &y2;
    if !sub.c_p_gs().contains(&y1.flatten()) {
        return Err(Error::internal("y₁ component escapes c_p(g^{x_s})"));
    }
    Ok((y1, y2))
}

/// Sub-pair report for `(x_n, y₂)` in `(g_{x_s}, k_{x_s})`, for a supplied
/// Jordan decomposition `x = x_s + x_n` and its p-Levi.
fn reduction_sub_report(
    pair: &SymmetricPair,
    sub: &SubPair<'_>,
    x_n: &Matrix,
    y: &Matrix,
) -> Result<PairReport> {
    let (_y1, y2) = split_y(pair, sub, y)?;
    if !sub.contains_p_s(x_n) {
        return Err(Error::internal("nilpotent part escapes p_{x_s}"));
    }
    let view = PairView::of_sub(sub)?;
    let core = core_numbers(&view, x_n, &y2)?;
    Ok(report_from(core, None))
}

/// Classification with a caller-supplied Jordan decomposition of `x`:
/// `decomposition` is the p-Levi at `x_s` together with `x_n`, or `None`
/// when `x` is nilpotent (the sub-pair would be the whole pair).  Lets the
/// sampling layer compute the decomposition once and share it with the
/// p^x-splitting check.
pub(crate) fn classify_with_decomposition(
    pair: &SymmetricPair,
    x: &Matrix,
    y: &Matrix,
    decomposition: Option<(&SubPair<'_>, &Matrix)>,
) -> Result<PairReport> {
    let view = PairView::of_pair(pair);
    let core = core_numbers(&view, x, y)?;
    let reduction = match decomposition {
        None => None,
        Some((sub, x_n)) => Some(reduction_sub_report(pair, sub, x_n, y)?),
    };
    if let Some(sub) = &reduction {
        if sub.irregularity != core.irregularity {
            return Err(Error::internal(format!(
                "reduction identity violated: i = {} in the pair, {} in the sub-pair",
                core.irregularity, sub.irregularity
            )));
        }
    }
    Ok(report_from(core, reduction.map(Box::new)))
}

/// Full report: dimensions, irregularity, classification, density check,
/// moment kernel, and the reduction to the sub-pair when `x_s ≠ 0`.  The
/// reduction identity (equal irregularity numbers) is asserted.
pub fn classify_pair(pair: &SymmetricPair, x: &Matrix, y: &Matrix) -> Result<PairReport> {
    let view = PairView::of_pair(pair);
    require_pair(&view, x, y)?;
    let (x_s, x_n) = jordan_decomposition(pair, x)?;
    if x_s.is_zero() {
        classify_with_decomposition(pair, x, y, None)
    } else {
        let sub = p_levi(pair, &x_s)?;
        classify_with_decomposition(pair, x, y, Some((&sub, &x_n)))
    }
}

/// Report for a commuting pair inside a reduced sub-pair (no nested
/// reduction).
pub fn classify_in_subpair(sub: &SubPair<'_>, x: &Matrix, y: &Matrix) -> Result<PairReport> {
    let view = PairView::of_sub(sub)?;
    let core = core_numbers(&view, x, y)?;
    Ok(report_from(core, None))
}

/// `true` iff `dim [k^x, y] = dim p^x` (tangent-space criterion for the
/// density of `K^x·y` in `p^x`).
pub fn rigidity_density_check(pair: &SymmetricPair, x: &Matrix, y: &Matrix) -> Result<bool> {
    let view = PairView::of_pair(pair);
    require_pair(&view, x, y)?;
    let c_kx = centralizer_of_span(pair, view.k_mats, std::slice::from_ref(x))?;
    let c_kx_mats = mats_of(pair, &c_kx);
    let p_x = centralizer_of_span(pair, view.p_mats, std::slice::from_ref(x))?.dim();
    Ok(bracket_map_rank(pair, &c_kx_mats, y) == p_x)
}

/// `dim Ker dμ at (x,y)`, with the closed formula
/// `2 dim p − dim k + dim k^{x,y}` checked against the direct kernel.
pub fn moment_kernel_dim(pair: &SymmetricPair, x: &Matrix, y: &Matrix) -> Result<usize> {
    let view = PairView::of_pair(pair);
    require_pair(&view, x, y)?;
    let k_xy = centralizer_of_span(pair, view.k_mats, &[x.clone(), y.clone()])?.dim();
    let formula = 2 * view.dim_p as i64 - view.dim_k as i64 + k_xy as i64;
    let direct = moment_kernel_direct(&view, x, y) as i64;
    if formula != direct {
        return Err(Error::internal(format!(
            "moment kernel mismatch: formula {formula}, direct {direct}"
        )));
    }
    Ok(formula as usize)
}

/// Decompose `x = x_s + x_n`, `y = y₁ + y₂`, analyze `(x,y)` in the pair and
/// `(x_n, y₂)` in the sub-pair, assert the equality of the two irregularity
/// numbers, and return both reports.  For nilpotent `x` the sub-pair is the
/// pair itself and the two reports coincide.
pub fn reduction_check(
    pair: &SymmetricPair,
    x: &Matrix,
    y: &Matrix,
) -> Result<(PairReport, PairReport)> {
    let big = classify_pair(pair, x, y)?;
    let sub = match &big.reduction {
        Some(r) => (**r).clone(),
        None => big.clone(),
    };
    Ok((big, sub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Scalar;
    use crate::pairs::{build_pair, Family};
    use crate::structure::{build_nilpotent_from_ab, centralizer, ABDiagram, Space};

    #[test]
    fn zero_pair_is_irregular_plus() {
        let pair = build_pair(Family::AI { n: 3 }).unwrap();
        let z = Matrix::zero(3, 3);
        let report = classify_pair(&pair, &z, &z).unwrap();
        // k^{0,0} = k, so i = dim k − dim m = dim p − rk.
        assert_eq!(report.irregularity, (pair.dim_p() - pair.symmetric_rank()) as i64);
        assert_eq!(report.classification, Classification::IrregularPlus);
        assert_eq!(report.moment_kernel_dim, 2 * pair.dim_p());
        assert!(!report.rigidity_density_check);
        assert!(report.reduction.is_none());
        assert_eq!(report.dims.k_x, pair.dim_k());
        assert_eq!(report.dims.p_x, pair.dim_p());
    }

    #[test]
    fn generic_cartan_pair_is_principal() {
        let pair = build_pair(Family::AIII { p: 2, q: 2 }).unwrap();
        let x = &pair.cartan()[0] + &pair.cartan()[1].scale(&Scalar::from_int(2));
        let y = &pair.cartan()[0].scale(&Scalar::from_int(3)) - &pair.cartan()[1];
        let report = classify_pair(&pair, &x, &y).unwrap();
        assert_eq!(report.irregularity, 0);
        assert_eq!(report.classification, Classification::Principal);
        assert_eq!(
            report.moment_kernel_dim,
            pair.dim_p() + pair.symmetric_rank()
        );
        assert!(!report.rigidity_density_check);
        // Reduction lands in the minimal Levi, where everything is zero.
        let sub = report.reduction.as_deref().unwrap();
        assert_eq!(sub.irregularity, 0);
        assert_eq!(sub.classification, Classification::Principal);
        assert_eq!(irregularity_number(&pair, &x, &y).unwrap(), 0);
    }

    #[test]
    fn rank_one_rigid_pair_detected() {
        // Subregular nilpotent in AIII(1,2) and an independent centralizer
        // direction: the unique (up to conjugacy) rigid pair in rank one.
        let pair = build_pair(Family::AIII { p: 1, q: 2 }).unwrap();
        let z = build_nilpotent_from_ab(&pair, &ABDiagram::parse("ab,b").unwrap()).unwrap();
        let p_z = centralizer(&pair, Space::P, std::slice::from_ref(&z)).unwrap();
        assert_eq!(p_z.dim(), 2);
        let y_flat = p_z
            .basis()
            .iter()
            .find(|v| {
                let m = Matrix::from_flat(3, v).unwrap();
                let mut span = vec![z.flatten()];
                span.push(m.flatten());
                Subspace::from_vectors(9, span).unwrap().dim() == 2
            })
            .unwrap()
            .clone();
        let y = Matrix::from_flat(3, &y_flat).unwrap();
        let report = classify_pair(&pair, &z, &y).unwrap();
        assert_eq!(report.irregularity, -1);
        assert_eq!(report.classification, Classification::Rigid);
        assert!(report.rigidity_density_check);
        assert!(rigidity_density_check(&pair, &z, &y).unwrap());
        assert_eq!(
            report.moment_kernel_dim,
            pair.dim_p() + pair.symmetric_rank() - 1
        );
        // Both members of a rigid pair are nilpotent.
        assert!(z.is_nilpotent() && y.is_nilpotent());
        assert!(report.reduction.is_none());
    }

    #[test]
    fn non_commuting_pair_rejected_with_witness() {
        let pair = build_pair(Family::AI { n: 3 }).unwrap();
        let mut x = Matrix::zero(3, 3);
        x.set(0, 1, Scalar::one());
        x.set(1, 0, Scalar::one());
        let mut y = Matrix::zero(3, 3);
        y.set(0, 0, Scalar::one());
        y.set(2, 2, Scalar::from_int(-1));
        assert!(pair.contains_p(&x) && pair.contains_p(&y));
        match irregularity_number(&pair, &x, &y) {
            Err(Error::NonCommuting(msg)) => {
                assert!(msg.contains("(0, 1)"), "unexpected message: {msg}");
            }
            other => panic!("expected NonCommuting, got {other:?}"),
        }
    }

    #[test]
    fn membership_enforced() {
        let pair = build_pair(Family::AI { n: 3 }).unwrap();
        // E01 alone is not symmetric, hence not in p.
        let mut bad = Matrix::zero(3, 3);
        bad.set(0, 1, Scalar::one());
        let z = Matrix::zero(3, 3);
        assert!(matches!(
            classify_pair(&pair, &bad, &z),
            Err(Error::Membership(_))
        ));
    }

    #[test]
    fn centralizer_dims_are_scale_invariant() {
        let pair = build_pair(Family::AIII { p: 1, q: 2 }).unwrap();
        let z = build_nilpotent_from_ab(&pair, &ABDiagram::parse("ab,b").unwrap()).unwrap();
        let r1 = classify_pair(&pair, &z, &z).unwrap();
        let r2 = classify_pair(
            &pair,
            &z.scale(&Scalar::from_int(7)),
            &z.scale(&Scalar::from_frac(-3, 5)),
        )
        .unwrap();
        assert_eq!(r1.dims, r2.dims);
        assert_eq!(r1.irregularity, r2.irregularity);
    }

    #[test]
    fn reduction_equality_for_mixed_element() {
        let pair = build_pair(Family::AIII { p: 2, q: 2 }).unwrap();
        let mut z2 = Matrix::zero(4, 4);
        z2.set(1, 3, Scalar::one());
        let x = &pair.cartan()[0] + &z2;
        let y = &pair.cartan()[0].scale(&Scalar::from_int(-2)) + &z2.scale(&Scalar::from_int(5));
        let (big, sub) = reduction_check(&pair, &x, &y).unwrap();
        assert_eq!(big.irregularity, sub.irregularity);
        assert!(big.reduction.is_some());
    }

    #[test]
    fn nilpotent_x_reduces_to_itself() {
        let pair = build_pair(Family::AIII { p: 1, q: 2 }).unwrap();
        let z = build_nilpotent_from_ab(&pair, &ABDiagram::parse("ab,b").unwrap()).unwrap();
        let (big, sub) = reduction_check(&pair, &z, &z).unwrap();
        assert_eq!(big.irregularity, sub.irregularity);
        assert_eq!(big.dims, sub.dims);
        assert!(big.reduction.is_none());
    }

    #[test]
    fn report_serializes_to_snake_case_json() {
        let pair = build_pair(Family::AIII { p: 1, q: 1 }).unwrap();
        let z = Matrix::zero(2, 2);
        let report = classify_pair(&pair, &z, &z).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["classification"], "irregular_plus");
        assert!(json["dims"]["k_xy"].is_number());
        assert!(json["reduction"].is_null());
    }
}
