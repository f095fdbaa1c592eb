//! Flat torus basics: wrapped coordinates, the minimal-image distance, ball
//! areas below the injectivity radius and the three sampling schemes.

use surface_entropy::torus::{ball_area, sample_points, torus_distance, SampleMode, TorusPoint, INJECTIVITY_RADIUS};

fn main() -> surface_entropy::Result<()> {
    let p = TorusPoint::new(0.95, 0.02);
    let q = TorusPoint::new(0.05, 0.98);
    // the short way round crosses both seams
    println!("d({p:?}, {q:?}) = {:.6}", torus_distance(&p, &q));
    println!("shifted by (3.5, -2) stays at ({}, {})", p.shifted(3.5, -2.0).x(), p.shifted(3.5, -2.0).y());

    for r in [0.1, 0.25, INJECTIVITY_RADIUS] {
        println!("area of B(p, {r}) = {:.6}", ball_area(r)?);
    }
    if let Err(e) = ball_area(0.6) {
        println!("r = 0.6: {e}");
    }

    for mode in [SampleMode::Grid(3), SampleMode::Random { count: 4, seed: 7 }, SampleMode::JitteredGrid { m: 2, seed: 7 }] {
        let pts = sample_points(mode)?;
        let shown: Vec<String> = pts.iter().map(|p| format!("({:.3}, {:.3})", p.x(), p.y())).collect();
        println!("{mode:?}: {}", shown.join(" "));
    }
    Ok(())
}
