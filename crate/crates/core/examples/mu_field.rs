//! Grid dump of `mu`, `arg theta` and `K` for the standard map, printed as CSV.

use surface_entropy::dilatation::mu_field;
use surface_entropy::maps::MapSpec;

fn main() -> surface_entropy::Result<()> {
    let rows = mu_field(&MapSpec::StandardMap { k: 1.5 }, 8)?;
    println!("x,y,mu_re,mu_im,theta_arg,K");
    for r in rows {
        println!("{:.4},{:.4},{:.6},{:.6},{:.6},{:.6}", r.x, r.y, r.mu_re, r.mu_im, r.theta_arg, r.k);
    }
    Ok(())
}
