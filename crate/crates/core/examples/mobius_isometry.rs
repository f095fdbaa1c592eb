//! Poincaré disk model: Möbius maps `T_a` preserve hyperbolic distance, and
//! `a -> T_a(z)` is Lipschitz on compact sub-disks with explicit constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surface_entropy::disk::{delta_from_beta, hyp_dist, lipschitz_constants, mobius_t, DiskCoeff};

fn random_in(rng: &mut ChaCha8Rng, r: f64) -> DiskCoeff {
    let (u, t): (f64, f64) = (rng.gen(), rng.gen_range(0.0..std::f64::consts::TAU));
    DiskCoeff::new(r * u.sqrt() * t.cos(), r * u.sqrt() * t.sin()).expect("inside the disk")
}

fn main() -> surface_entropy::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (a, z, w) = (random_in(&mut rng, 0.99), random_in(&mut rng, 0.99), random_in(&mut rng, 0.99));
        worst = worst.max((hyp_dist(mobius_t(a, z), mobius_t(a, w)) - hyp_dist(z, w)).abs());
    }
    println!("max isometry defect over 1e4 triples: {worst:.3e}");

    let beta = 3f64.sqrt();
    println!("beta = sqrt 3 gives delta = {}", delta_from_beta(beta)?);
    let k = lipschitz_constants(beta, 0.5)?;
    println!("{k:#?}");

    let mut ratio = 0.0f64;
    for _ in 0..100_000 {
        let (a, b, z) = (random_in(&mut rng, k.delta_prime), random_in(&mut rng, k.delta_prime), random_in(&mut rng, k.delta));
        let d = hyp_dist(a, b);
        if d > 0.0 {
            ratio = ratio.max(hyp_dist(mobius_t(a, z), mobius_t(b, z)) / d);
        }
    }
    println!("largest observed ratio {ratio:.4} against c1 = {:.4}", k.c1);
    Ok(())
}
