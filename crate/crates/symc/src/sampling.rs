//! Seeded generation of commuting pairs in p × p and the invariant suite
//! driver shared by the test and acceptance layers.
//!
//! Pairs are generated as (x, y) with x sampled in p and y sampled in p^x,
//! so every fiber of the first projection of the commuting variety is
//! reachable.  A slice of the samples uses structured x = s + z with s a
//! tie-patterned Cartan combination and z nilpotent in the attached
//! reduced p-Levi, which exercises nontrivial Jordan decompositions.

use rand_chacha::ChaCha8Rng;

use crate::analysis::{classify_with_decomposition, Classification};
use crate::error::{Error, Result};
use crate::linalg::{random_int_vector, Matrix, Scalar, SeedMixer, Subspace};
use crate::pairs::SymmetricPair;
use crate::par::par_map;
use crate::structure::{
    centralizer, centralizer_of_span, combine_mats, jordan_decomposition, p_levi, Space,
    SubPair,
};

/// Deterministic random element of a subspace of flattened matrices, in
/// primitive integer form.  Integer coefficients and the final rescaling
/// sample the same directions as rational coefficients would (everything
/// downstream is scale-invariant) while keeping exact eliminations cheap.
pub fn sample_in(
    space: &Subspace,
    size: usize,
    rng: &mut ChaCha8Rng,
    height: u64,
) -> Result<Matrix> {
    if space.dim() == 0 {
        return Ok(Matrix::zero(size, size));
    }
    let coeffs = random_int_vector(rng, space.dim(), height);
    let rows = space.reduced_basis();
    let mut flat = vec![Scalar::zero(); space.ambient()];
    for (c, row) in coeffs.iter().zip(rows.iter()) {
        if c.is_zero() {
            continue;
        }
        for (a, b) in flat.iter_mut().zip(row.iter()) {
            if !b.is_zero() {
                *a += &(c * b);
            }
        }
    }
    Ok(Matrix::from_flat(size, &flat)?.primitive_scaled())
}

/// Random x ∈ p together with a random y ∈ p^x.
pub fn random_commuting_pair(
    pair: &SymmetricPair,
    rng: &mut ChaCha8Rng,
    height: u64,
) -> Result<(Matrix, Matrix)> {
    let x = sample_in(pair.p(), pair.matrix_size(), rng, height)?;
    let p_x = centralizer(pair, Space::P, std::slice::from_ref(&x))?;
    let y = sample_in(&p_x, pair.matrix_size(), rng, height)?;
    Ok((x, y))
}

/// Deterministic coefficient patterns over the Cartan basis whose ties and
/// zeros select different p-Levis: all distinct, all equal, consecutive
/// pairs tied, and first half zeroed.
fn tie_patterns(rank: usize) -> Vec<Vec<i64>> {
    if rank == 0 {
        return Vec::new();
    }
    let mut out: Vec<Vec<i64>> = Vec::new();
    let distinct: Vec<i64> = (0..rank).map(|i| i as i64 + 1).collect();
    let equal = vec![1i64; rank];
    let paired: Vec<i64> = (0..rank).map(|i| (i / 2) as i64 + 1).collect();
    let half_zero: Vec<i64> = (0..rank)
        .map(|i| if i < rank / 2 { 0 } else { i as i64 + 1 })
        .collect();
    for c in [distinct, equal, paired, half_zero] {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// The semisimple elements s = Σ cᵢ aᵢ attached to the tie patterns.
pub(crate) fn tie_pattern_elements(pair: &SymmetricPair) -> Vec<Matrix> {
    let coeffs_to_mat = |c: &[i64]| -> Matrix {
        let scalars: Vec<Scalar> = c.iter().map(|&v| Scalar::from_int(v)).collect();
        combine_mats(&scalars, pair.cartan())
    };
    tie_patterns(pair.symmetric_rank())
        .iter()
        .map(|c| coeffs_to_mat(c))
        .filter(|m| !m.is_zero())
        .collect()
}

/// Try to find a nonzero nilpotent in the span of `mats` by sparse
/// combinations; `None` when none shows up (e.g. anisotropic forms over ℚ).
fn sample_nilpotent_in(mats: &[Matrix], rng: &mut ChaCha8Rng) -> Option<Matrix> {
    if mats.is_empty() {
        return None;
    }
    use rand::Rng;
    for _ in 0..16 {
        let picks = 1 + rng.gen_range(0..2usize);
        let mut z = Matrix::zero(mats[0].nrows(), mats[0].ncols());
        for _ in 0..picks {
            let idx = rng.gen_range(0..mats.len());
            let coeff = Scalar::from_int(rng.gen_range(1..=3i64) * if rng.gen() { 1 } else { -1 });
            z = &z + &mats[idx].scale(&coeff);
        }
        if !z.is_zero() && z.is_nilpotent() {
            return Some(z);
        }
    }
    None
}

/// Verify `p^x = c_p(g^{x_s}) ⊕ (p_{x_s})^{x_n}` exactly: zero pairwise
/// intersection, additive dimensions, and equality of the sum with `p^x`.
/// A precomputed sub-pair for `x_s` may be supplied.
pub fn cppsbis_check(
    pair: &SymmetricPair,
    x: &Matrix,
    precomputed: Option<(&SubPair<'_>, &Matrix)>,
) -> Result<()> {
    let (sub, x_n): (SubPair<'_>, Matrix) = match precomputed {
        Some((sub_ref, x_n)) => {
            return cppsbis_with(pair, x, sub_ref, x_n);
        }
        None => {
            let (x_s, x_n) = jordan_decomposition(pair, x)?;
            (p_levi(pair, &x_s)?, x_n)
        }
    };
    cppsbis_with(pair, x, &sub, &x_n)
}

fn cppsbis_with(
    pair: &SymmetricPair,
    x: &Matrix,
    sub: &SubPair<'_>,
    x_n: &Matrix,
) -> Result<()> {
    let p_x = centralizer(pair, Space::P, std::slice::from_ref(x))?;
    let ps_xn = centralizer_of_span(pair, sub.p_s_mats(), std::slice::from_ref(x_n))?;
    let c_p = sub.c_p_gs();
    if c_p.intersect(&ps_xn)?.dim() != 0 {
        return Err(Error::internal(
            "c_p(g^{x_s}) meets (p_{x_s})^{x_n} nontrivially",
        ));
    }
    if c_p.dim() + ps_xn.dim() != p_x.dim() {
        return Err(Error::internal(format!(
            "p^x dimensions not additive: {} + {} ≠ {}",
            c_p.dim(),
            ps_xn.dim(),
            p_x.dim()
        )));
    }
    if c_p.sum(&ps_xn)? != p_x {
        return Err(Error::internal("c_p(g^{x_s}) ⊕ (p_{x_s})^{x_n} ≠ p^x"));
    }
    Ok(())
}

/// Outcome of an invariant sweep over one pair.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub samples: usize,
    pub violations: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// How a single suite sample is produced.
enum SamplePlan<'a> {
    /// x random in p.
    Generic,
    /// x = s + z, s a tie-patterned Cartan combination with its p-Levi,
    /// z nilpotent in p_s (or zero when none is found).
    Structured(&'a Matrix, &'a SubPair<'a>),
}

fn build_sample(
    pair: &SymmetricPair,
    plan: &SamplePlan<'_>,
    rng: &mut ChaCha8Rng,
    height: u64,
) -> Result<(Matrix, Matrix, Option<Matrix>)> {
    match plan {
        SamplePlan::Generic => {
            let (x, y) = random_commuting_pair(pair, rng, height)?;
            Ok((x, y, None))
        }
        SamplePlan::Structured(s, sub) => {
            let z = sample_nilpotent_in(sub.p_s_mats(), rng)
                .unwrap_or_else(|| Matrix::zero(pair.matrix_size(), pair.matrix_size()));
            let x = *s + &z;
            let p_x = centralizer(pair, Space::P, std::slice::from_ref(&x))?;
            let y = sample_in(&p_x, pair.matrix_size(), rng, height)?;
            Ok((x, y, Some(z)))
        }
    }
}

/// Run every per-sample invariant on one (x, y): the Kostant–Rallis
/// identity for x and y, the classification bounds, rigid ⟺ density
/// agreement, the moment-kernel and reduction identities (asserted inside
/// the classification), and the exact p^x decomposition.  The Jordan
/// decomposition and p-Levi of x are computed once (or taken precomputed
/// for structured samples) and shared by both heavyweight checks.  With
/// `deep` set, the moment-kernel dimension is additionally recomputed from
/// the direct presentation of dμ and compared against the formula.
fn check_sample(
    pair: &SymmetricPair,
    x: &Matrix,
    y: &Matrix,
    precomputed: Option<(&SubPair<'_>, &Matrix)>,
    deep: bool,
) -> Vec<String> {
    let mut violations = Vec::new();
    let owned: Option<(SubPair<'_>, Matrix)> = match precomputed {
        Some(_) => None,
        None => {
            let built = jordan_decomposition(pair, x)
                .and_then(|(x_s, x_n)| Ok((p_levi(pair, &x_s)?, x_n)));
            match built {
                Ok(v) => Some(v),
                Err(e) => {
                    violations.push(format!("decomposition: {e}"));
                    return violations;
                }
            }
        }
    };
    let (sub, x_n): (&SubPair<'_>, &Matrix) = match (&precomputed, &owned) {
        (Some((s, z)), _) => (s, z),
        (None, Some((s, z))) => (s, z),
        (None, None) => unreachable!(),
    };
    let decomposition = if sub.s().is_zero() { None } else { Some((sub, x_n)) };
    let report = match classify_with_decomposition(pair, x, y, decomposition) {
        Ok(r) => r,
        Err(e) => {
            violations.push(format!("classify: {e}"));
            return violations;
        }
    };
    let kr = pair.dim_k() as i64 - pair.dim_p() as i64;
    if report.dims.k_x as i64 - report.dims.p_x as i64 != kr {
        violations.push(format!(
            "KR identity fails for x: {} − {} ≠ {kr}",
            report.dims.k_x, report.dims.p_x
        ));
    }
    if report.dims.k_y as i64 - report.dims.p_y as i64 != kr {
        violations.push(format!(
            "KR identity fails for y: {} − {} ≠ {kr}",
            report.dims.k_y, report.dims.p_y
        ));
    }
    let rank = pair.symmetric_rank() as i64;
    if report.irregularity < -rank {
        violations.push(format!(
            "irregularity {} below −rk = −{rank}",
            report.irregularity
        ));
    }
    if (report.dims.k_xy as i64) < kr {
        violations.push(format!("dim k^(x,y) = {} below dim k − dim p = {kr}", report.dims.k_xy));
    }
    let rigid = report.classification == Classification::Rigid;
    if rigid != report.rigidity_density_check {
        violations.push(format!(
            "rigid/density disagreement: classification {:?}, density {}",
            report.classification, report.rigidity_density_check
        ));
    }
    if deep {
        match crate::analysis::moment_kernel_dim(pair, x, y) {
            Ok(d) if d == report.moment_kernel_dim => {}
            Ok(d) => violations.push(format!(
                "moment kernel: direct recomputation {d} ≠ reported {}",
                report.moment_kernel_dim
            )),
            Err(e) => violations.push(format!("moment kernel: {e}")),
        }
    }
    if let Err(e) = cppsbis_with(pair, x, sub, x_n) {
        violations.push(format!("cppsbis: {e}"));
    }
    violations
}

/// Sweep `samples` seeded commuting pairs through every invariant; roughly
/// a third of the samples are structured around tie-patterned Levis.
pub fn run_invariant_suite(pair: &SymmetricPair, samples: usize, seed: u64) -> SuiteOutcome {
    let patterns = tie_pattern_elements(pair);
    let mut subpairs = Vec::new();
    let mut violations = Vec::new();
    for s in &patterns {
        match p_levi(pair, s) {
            Ok(sub) => subpairs.push((s, sub)),
            Err(e) => violations.push(format!("p_levi of tie pattern: {e}")),
        }
    }
    let plans: Vec<(usize, usize)> = (0..samples)
        .map(|i| {
            // Every third sample is structured, cycling over the patterns.
            if !subpairs.is_empty() && i % 3 == 2 {
                (i, 1 + (i / 3) % subpairs.len())
            } else {
                (i, 0)
            }
        })
        .collect();
    let results = par_map(plans, |(i, which)| {
        let mut rng = SeedMixer::new(seed)
            .with_str(&pair.family().code())
            .with(i as u64)
            .rng();
        let plan = if which == 0 {
            SamplePlan::Generic
        } else {
            let (s, sub) = &subpairs[which - 1];
            SamplePlan::Structured(s, sub)
        };
        match build_sample(pair, &plan, &mut rng, 5) {
            Ok((x, y, z)) => {
                let pre = match (&plan, &z) {
                    (SamplePlan::Structured(_, sub), Some(zn)) => Some((*sub, zn)),
                    _ => None,
                };
                check_sample(pair, &x, &y, pre.map(|(a, b)| (a, b)), i % 8 == 0)
                    .into_iter()
                    .map(|v| format!("sample {i}: {v}"))
                    .collect()
            }
            Err(e) => vec![format!("sample {i}: generation failed: {e}")],
        }
    });
    for vs in results {
        violations.extend(vs);
    }
    SuiteOutcome { samples, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{build_pair, Family};

    #[test]
    fn commuting_pairs_commute_and_are_deterministic() {
        let pair = build_pair(Family::CII { p: 1, q: 1 }).unwrap();
        let mut rng1 = SeedMixer::new(9).with_str("t").rng();
        let mut rng2 = SeedMixer::new(9).with_str("t").rng();
        let (x1, y1) = random_commuting_pair(&pair, &mut rng1, 5).unwrap();
        let (x2, y2) = random_commuting_pair(&pair, &mut rng2, 5).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(y1, y2);
        assert!(x1.bracket(&y1).is_zero());
        assert!(pair.contains_p(&x1) && pair.contains_p(&y1));
    }

    #[test]
    fn tie_patterns_cover_expected_shapes() {
        assert_eq!(tie_patterns(1), vec![vec![1]]);
        let p4 = tie_patterns(4);
        assert!(p4.contains(&vec![1, 2, 3, 4]));
        assert!(p4.contains(&vec![1, 1, 1, 1]));
        assert!(p4.contains(&vec![1, 1, 2, 2]));
        assert!(p4.contains(&vec![0, 0, 3, 4]));
    }

    #[test]
    fn small_suite_passes_on_three_families() {
        for f in [
            Family::AIII { p: 1, q: 2 },
            Family::AI { n: 3 },
            Family::CII { p: 1, q: 1 },
        ] {
            let pair = build_pair(f).unwrap();
            let outcome = run_invariant_suite(&pair, 12, 42);
            assert!(
                outcome.passed(),
                "{f}: {:?}",
                outcome.violations
            );
        }
    }

    #[test]
    fn cppsbis_explicit_mixed_element() {
        let pair = build_pair(Family::AIII { p: 2, q: 2 }).unwrap();
        let mut z2 = Matrix::zero(4, 4);
        z2.set(1, 3, Scalar::one());
        let x = &pair.cartan()[0] + &z2;
        cppsbis_check(&pair, &x, None).unwrap();
    }
}
