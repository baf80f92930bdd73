//! Global best versus ring neighbourhoods (lbest) on Rastrigin, averaged
//! over a handful of seeds.
//!
//! ```bash
//! cargo run -p swarmkit --example pso_topologies
//! ```

use swarmkit::experiment::median;
use swarmkit::problems::benchmark;
use swarmkit::pso::{optimize, PsoConfig, Topology};
use swarmkit::TerminationCriteria;

fn main() -> swarmkit::Result<()> {
    let rastrigin = benchmark("rastrigin", 5)?;
    for topology in [Topology::Global, Topology::Ring(1), Topology::Ring(3)] {
        let config = PsoConfig {
            swarm_size: 24,
            vmax: Some(1.0),
            topology,
            termination: TerminationCriteria::iterations(800)?,
            ..PsoConfig::default()
        };
        let finals = (1..=10)
            .map(|seed| optimize(&rastrigin.spec, &config, seed).map(|o| o.best_fitness))
            .collect::<swarmkit::Result<Vec<f64>>>()?;
        println!("{topology:?}: median best {:.4}", median(&finals));
    }
    Ok(())
}
