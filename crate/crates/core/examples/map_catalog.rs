//! The map catalog: evaluation, analytic Jacobians checked against central
//! differences, inverses, and renormalized orbit derivatives.

use surface_entropy::maps::{MapSpec, FD_STEP};
use surface_entropy::torus::TorusPoint;

fn main() -> surface_entropy::Result<()> {
    let catalog = [
        MapSpec::Translation { omega: [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0] },
        MapSpec::cat_map(),
        MapSpec::Skew { omega: [0.2, 0.1], amplitude: 0.15, frequency: 2 },
        MapSpec::StandardMap { k: 1.5 },
        MapSpec::PerturbedTranslation { omega: [0.1, 0.3], center: [0.5, 0.5], radius: 0.2, strength: 1.2 },
    ];
    let p = TorusPoint::new(0.43, 0.58);
    for f in &catalog {
        f.validate()?;
        let j = f.jacobian(&p);
        let fd = f.fd_jacobian(&p, FD_STEP);
        let back = f.inverse_eval(&f.eval(&p));
        let od = f.orbit_jacobian(&p, 100)?;
        println!("{}", f.label());
        println!("  det Df = {:.15}, |Df - FD| = {:.1e}, inverse error {:.1e}", j.det(), j.max_abs_diff(&fd), back.distance(&p));
        println!("  n = 100: log sigma1 = {:.6}, log K = {:.6}", od.log_sigma1(), od.log_dilatation());
    }

    // descriptors round-trip through JSON as used in run configs
    let text = r#"{"kind": "standard_map", "k": 6.0}"#;
    let f: MapSpec = serde_json::from_str(text)?;
    println!("parsed {}", f.label());
    Ok(())
}
