//! Ant colony optimization on a random 9-city instance, checked against the
//! exhaustive oracle.
//!
//! ```bash
//! cargo run -p swarmkit --example aco_tsp
//! ```

use swarmkit::aco::{optimize_aco, AcoConfig};
use swarmkit::problems::{brute_force_tsp, random_tsp_instance};
use swarmkit::{derive_stream, TerminationCriteria};

fn main() -> swarmkit::Result<()> {
    let instance = random_tsp_instance(9, &mut derive_stream(2024, 0))?;
    let config = AcoConfig {
        num_ants: Some(9),
        termination: TerminationCriteria::iterations(60)?,
        ..AcoConfig::default()
    };
    let exact = brute_force_tsp(&instance)?;
    println!("oracle: {:?} length {:.6}", exact.order, exact.length);

    for seed in 1..=5 {
        let out = optimize_aco(&instance.graph, &config, seed)?;
        let first_hit = out
            .trace
            .entries
            .iter()
            .find(|e| (e.best_fitness - exact.length).abs() < 1e-9)
            .map(|e| e.iteration);
        println!(
            "seed {seed}: {:?} length {:.6} (optimum first reached at iteration {first_hit:?})",
            out.best.order, out.best.length
        );
    }
    Ok(())
}
