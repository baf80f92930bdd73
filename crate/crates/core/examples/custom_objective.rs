//! Plug in your own objective: a shifted, tilted bowl with asymmetric bounds,
//! stopped early once the target fitness is reached.
//!
//! ```bash
//! cargo run -p swarmkit --example custom_objective
//! ```

use swarmkit::pso::{optimize, PsoConfig};
use swarmkit::{ObjectiveSpec, TerminationCriteria};

fn main() -> swarmkit::Result<()> {
    let centre = [1.5, -0.25, 3.0];
    let objective = ObjectiveSpec::new(vec![-2.0, -1.0, 0.0], vec![4.0, 1.0, 5.0], move |x| {
        x.iter()
            .zip(centre)
            .enumerate()
            .map(|(i, (xi, ci))| (i as f64 + 1.0) * (xi - ci).powi(2))
            .sum()
    })?;
    let config = PsoConfig {
        swarm_size: 20,
        vmax: Some(0.5),
        termination: TerminationCriteria::new(5000, Some(1e-3))?,
        ..PsoConfig::default()
    };
    let out = optimize(&objective, &config, 42)?;
    println!(
        "stopped after {} iterations ({} evaluations)",
        out.trace.len(),
        out.trace.evaluations()
    );
    println!("best {:.3e} at {:.4?}", out.best_fitness, out.best_position);
    Ok(())
}
