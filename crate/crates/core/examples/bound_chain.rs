//! Entropy rates from separated sets next to the dilatation bound and the
//! exterior-norm bound, for a few catalog maps.

use surface_entropy::entropy::{bound_chain, BoundChainParams};
use surface_entropy::maps::MapSpec;

fn main() -> surface_entropy::Result<()> {
    let params = BoundChainParams { n_range: vec![1, 2, 4, 6, 8], epsilons: vec![0.2, 0.1], ..Default::default() };
    for f in [
        MapSpec::Translation { omega: [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0] },
        MapSpec::cat_map(),
        MapSpec::StandardMap { k: 6.0 },
    ] {
        let chain = bound_chain(&f, &params, None)?;
        println!("{}", chain.map);
        println!("   n  rate      dilatation  exterior");
        for r in &chain.records {
            println!("  {:2}  {:.6}  {:.6}    {:.6}", r.n, r.entropy_rate, r.dilatation_bound, r.przytycki_bound);
        }
        if !chain.flags.is_empty() {
            println!("  flags: {:?}", chain.flags);
        }
    }
    Ok(())
}
