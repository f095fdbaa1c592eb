//! Beltrami coefficients of linear maps, their composition law, the
//! dilatation identity `log K_{g o f^-1}(f p) = [mu_g(p), mu_f(p)]` and the
//! telescoping bound along orbits.

use surface_entropy::dilatation::{
    beltrami_from_jacobian, compose_beltrami, compose_beltrami_mobius, iterate_beltrami, k_from_mu,
    k_from_singular, log_k_identity_check, telescoping_terms,
};
use surface_entropy::jacobian::Jacobian2;
use surface_entropy::maps::MapSpec;
use surface_entropy::torus::TorusPoint;

fn main() -> surface_entropy::Result<()> {
    let cat = Jacobian2::new(2.0, 1.0, 1.0, 1.0);
    let s = beltrami_from_jacobian(&cat)?;
    println!("cat map: mu = {}, K = {} = {}", s.mu.as_complex(), k_from_mu(s.mu).value(), k_from_singular(&cat)?.value());

    let f = Jacobian2::new(1.2, 0.3, -0.4, 0.9);
    let g = Jacobian2::new(0.7, -0.5, 0.6, 1.4);
    let (sf, sg) = (beltrami_from_jacobian(&f)?, beltrami_from_jacobian(&g)?);
    let product = beltrami_from_jacobian(&(g * f))?.mu;
    let quotient = compose_beltrami(&sf, &sg);
    let mobius = compose_beltrami_mobius(&sf, &sg);
    println!("mu(g f) = {}", product.as_complex());
    println!("  quotient form off by {:.1e}, Möbius form off by {:.1e}", (quotient.as_complex() - product.as_complex()).norm(), (mobius.as_complex() - product.as_complex()).norm());

    let (lhs, rhs) = log_k_identity_check(&g, &f)?;
    println!("log K(g f^-1) = {lhs:.12}, [mu_g, mu_f] = {rhs:.12}");

    let std = MapSpec::StandardMap { k: 1.5 };
    let (p, q) = (TorusPoint::new(0.2, 0.3), TorusPoint::new(0.21, 0.29));
    for n in [0, 3, 10] {
        let t = telescoping_terms(&std, &p, &q, n)?;
        println!("n = {n:2}: [mu(p), mu(q)] = {:.6} <= {:.6}", t.lhs, t.rhs);
    }
    // far from the origin 1 - |mu|^2 is kept separately, so log K survives
    let mu = iterate_beltrami(&MapSpec::cat_map(), &p, 60)?;
    println!("cat map n = 60: |mu| = {}, log K = {:.6} (120 log lambda = {:.6})", mu.modulus(), mu.radius(), 120.0 * ((3.0 + 5f64.sqrt()) / 2.0).ln());
    Ok(())
}
