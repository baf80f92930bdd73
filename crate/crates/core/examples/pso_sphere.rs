//! Minimize the sphere function with a global-best swarm.
//!
//! ```bash
//! cargo run -p swarmkit --example pso_sphere
//! ```

use swarmkit::problems::BenchmarkFunction;
use swarmkit::pso::{optimize, PsoConfig};
use swarmkit::TerminationCriteria;

fn main() -> swarmkit::Result<()> {
    let sphere = BenchmarkFunction::sphere(10)?;
    let config = PsoConfig {
        swarm_size: 30,
        termination: TerminationCriteria::iterations(2000)?,
        ..PsoConfig::default()
    };
    let out = optimize(&sphere.spec, &config, 1)?;

    for e in out.trace.entries.iter().step_by(250) {
        println!(
            "iter {:>5}  best {:.6e}  evals {}",
            e.iteration, e.best_fitness, e.evaluations
        );
    }
    println!(
        "final best {:.6e} at {:?}",
        out.best_fitness, out.best_position
    );
    println!(
        "known optimum {} at {:?}",
        sphere.optimum_fitness, sphere.optimum_position
    );
    Ok(())
}
