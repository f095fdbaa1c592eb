//! A finite family of disks along a translation orbit and the diagnostics
//! run on it: geometry, permutation, dilatation on the complement, `xi(n)`
//! and the sum-of-diameters bound, including a twist that grazes one disk.

use surface_entropy::domains::{
    beta_of, bounded_dilatation_diagnostic, build_translation_family, lemma_constants, null_sequence_check,
    sum_diam_check_with, verify_collection, verify_permutation, FamilyParams,
};
use surface_entropy::maps::MapSpec;

fn main() -> surface_entropy::Result<()> {
    let omega = [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0];
    let fam = build_translation_family(&FamilyParams { omega, count: 200, c: 0.01, rho: 0.98, origin: [0.0, 0.0] })?;
    let rep = verify_collection(&fam);
    println!("{} disks, disjoint: {}, covering radius {:.4}, area {:.5}", rep.domain_count, rep.disjointness_violations.is_empty(), rep.covering_radius, rep.area_sum);
    println!("beta = {}", beta_of(&fam)?);
    println!("{:?}", null_sequence_check(&fam, 0.01));

    let t = MapSpec::Translation { omega };
    let perm = verify_permutation(&t, &fam, 1e-9)?;
    let worst_center = perm.failures.iter().map(|f| f.center_error).fold(0.0, f64::max);
    // an isometry cannot shrink r_k to rho r_k, so sizes disagree while centers match
    println!("permutation: {} tested, {} size mismatches, worst center error {worst_center:.1e}", perm.tested, perm.failures.len());
    println!("max K on S under the translation: {}", bounded_dilatation_diagnostic(&t, &fam, 20, 200, 0)?.max_k);

    for n in [1, 10, 100] {
        println!("xi({n}) / n = {:.5} (alpha = 1), {:.3} (alpha = 0)", fam.xi(1.0, n)? / n as f64, fam.xi(0.0, n)? / n as f64);
    }

    // a family in a thin band, and a small twist whose edge cuts D_5
    let w = [2f64.sqrt() - 1.0, (3f64.sqrt() - 1.0) / 1000.0];
    let band = build_translation_family(&FamilyParams { omega: w, count: 200, c: 0.01, rho: 0.98, origin: [0.0, 0.25] })?;
    let d5 = band.get(5).expect("label 5");
    let c = d5.center.shifted(0.03 + 0.5 * d5.circumradius, 0.0);
    let g = MapSpec::PerturbedTranslation { omega: w, center: [c.x(), c.y()], radius: 0.03, strength: 0.5 };
    let k = lemma_constants(&g, &band, 1.0, 0)?;
    println!("grazing twist: C = {:.3}, C' = {:.4}", k.c, k.c_prime);
    for n in [4, 5, 10] {
        let r = sum_diam_check_with(&g, &band, 1.0, n, 0, &k)?;
        println!("  n = {n:2}: lhs {:.4} <= rhs {:.4}: {}", r.lhs, r.rhs, r.passed);
    }
    Ok(())
}
