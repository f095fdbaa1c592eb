//! Driving a command from an in-memory config, as the binary does: the
//! report lands in a temporary directory and the exit status is printed.

use surface_entropy::cli::{run, Command, RunConfig};

fn main() -> surface_entropy::Result<()> {
    let cfg = RunConfig::parse(
        r#"
seed = 3
n_range = [2, 3, 4]
epsilons = [0.25]
candidates = 80

[map]
kind = "linear"
matrix = [[2, 1], [1, 1]]
"#,
    )?;
    let dir = tempfile::tempdir()?;
    let outcome = run(Command::BoundChain, &cfg, dir.path(), None)?;
    for f in &outcome.files {
        println!("wrote {}", f.file_name().unwrap().to_string_lossy());
    }
    println!("{}", std::fs::read_to_string(dir.path().join("bound_chain.csv"))?);
    println!("exit status {}", outcome.exit_code());
    Ok(())
}
