use std::time::Instant;
use symc::linalg::{CoordinateFrame, Matrix, SeedMixer};
use symc::pairs::{build_pair, Family};
use symc::sampling::random_commuting_pair;
use symc::structure::{centralizer, jordan_decomposition, p_levi, Space};

fn main() {
    let f = Family::CII { p: 4, q: 4 };
    let pair = build_pair(f).unwrap();
    eprintln!(
        "built; dim g = {}, dim k = {}, dim p = {}",
        pair.dim_g(),
        pair.dim_k(),
        pair.dim_p()
    );
    let n = pair.matrix_size();
    for i in 0..1u64 {
        let mut rng = SeedMixer::new(7).with(i).rng();
        let t0 = Instant::now();
        let (x, y) = random_commuting_pair(&pair, &mut rng, 5).unwrap();
        eprintln!(
            "sample {i}: gen {:?}  x weight {}  y weight {}",
            t0.elapsed(),
            x.max_weight(),
            y.max_weight()
        );

        let t = Instant::now();
        let (x_s, _x_n) = jordan_decomposition(&pair, &x).unwrap();
        eprintln!("  jordan: {:?}", t.elapsed());

        // --- new p_levi pipeline, step by step ---
        let t = Instant::now();
        let k_c = centralizer(&pair, Space::K, std::slice::from_ref(&x_s)).unwrap();
        eprintln!("  [p_levi] k^s ({}): {:?}", k_c.dim(), t.elapsed());

        let t = Instant::now();
        let p_c = centralizer(&pair, Space::P, std::slice::from_ref(&x_s)).unwrap();
        eprintln!("  [p_levi] p^s ({}): {:?}", p_c.dim(), t.elapsed());

        let t = Instant::now();
        let g_c = k_c.sum(&p_c).unwrap();
        eprintln!("  [p_levi] sum ({}): {:?}", g_c.dim(), t.elapsed());

        let t = Instant::now();
        let gs_rows: Vec<Vec<_>> = k_c
            .reduced_basis()
            .into_iter()
            .chain(p_c.reduced_basis())
            .collect();
        let gs_mats: Vec<Matrix> = gs_rows
            .iter()
            .map(|v| Matrix::from_flat(n, v).unwrap())
            .collect();
        eprintln!(
            "  [p_levi] concat basis: {:?}  (max weight {})",
            t.elapsed(),
            gs_mats.iter().map(|m| m.max_weight()).max().unwrap_or(0)
        );

        let t = Instant::now();
        let frame = CoordinateFrame::new(&gs_rows).unwrap();
        eprintln!("  [p_levi] frame: {:?}", t.elapsed());

        let mut t_bracket = std::time::Duration::ZERO;
        let mut t_coords = std::time::Duration::ZERO;
        let mut max_br = 0u64;
        let mut max_co = 0u64;
        let d = gs_mats.len();
        for a in 0..d {
            for b in (a + 1)..d {
                let t = Instant::now();
                let br = gs_mats[a].bracket(&gs_mats[b]);
                t_bracket += t.elapsed();
                if br.is_zero() {
                    continue;
                }
                max_br = max_br.max(br.max_weight());
                let t = Instant::now();
                let co = frame.coords(&br.flatten()).unwrap();
                t_coords += t.elapsed();
                max_co = max_co.max(
                    co.iter().map(|c| c.weight()).max().unwrap_or(0),
                );
            }
        }
        eprintln!(
            "  [p_levi] {} brackets: {:?}  (max weight {})",
            d * (d - 1) / 2,
            t_bracket,
            max_br
        );
        eprintln!("  [p_levi] coords: {:?}  (max weight {})", t_coords, max_co);

        // Whole thing for comparison.
        let t = Instant::now();
        let sub = p_levi(&pair, &x_s).unwrap();
        eprintln!(
            "  p_levi total: {:?}  (g_s dim {})",
            t.elapsed(),
            sub.g_s().dim()
        );

        // --- remaining classify pieces ---
        let t = Instant::now();
        let k_x = centralizer(&pair, Space::K, std::slice::from_ref(&x)).unwrap();
        eprintln!("  k^x ({}): {:?}", k_x.dim(), t.elapsed());

        let t = Instant::now();
        let k_y = centralizer(&pair, Space::K, std::slice::from_ref(&y)).unwrap();
        eprintln!("  k^y ({}): {:?}", k_y.dim(), t.elapsed());

        let t = Instant::now();
        let k_xy = centralizer(&pair, Space::K, &[x.clone(), y.clone()]).unwrap();
        eprintln!("  k^xy ({}): {:?}", k_xy.dim(), t.elapsed());

        let t = Instant::now();
        let p_y = centralizer(&pair, Space::P, std::slice::from_ref(&y)).unwrap();
        eprintln!("  p^y ({}): {:?}", p_y.dim(), t.elapsed());

        let t = Instant::now();
        let report = symc::analysis::classify_pair(&pair, &x, &y).unwrap();
        eprintln!(
            "  classify total: {:?}  (i = {}, {:?})",
            t.elapsed(),
            report.irregularity,
            report.classification
        );

        let t = Instant::now();
        symc::sampling::cppsbis_check(&pair, &x, None).unwrap();
        eprintln!("  cppsbis total: {:?}", t.elapsed());
    }
}
