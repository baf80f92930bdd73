//! The colony loop written out with the building blocks: uniform pheromone
//! initialization, tour construction, evaporation, deposit. Prints how the
//! pheromone on the optimal square tour pulls ahead of the diagonals.
//!
//! ```bash
//! cargo run -p swarmkit --example aco_colony_loop
//! ```

use swarmkit::aco::{construct_tour, deposit, evaporate, initialize_pheromones, AcoConfig};
use swarmkit::problems::load_tsp_instance;
use swarmkit::rng::agent_streams;

fn main() -> swarmkit::Result<()> {
    let square = load_tsp_instance(include_str!("data/square.tsp"))?;
    let graph = &square.graph;
    let config = AcoConfig::default();
    let mut pheromones = initialize_pheromones(graph, &config)?;
    let mut ants = agent_streams(7, 4);

    for iteration in 0..8 {
        let tours = ants
            .iter_mut()
            .enumerate()
            .map(|(k, rng)| construct_tour(graph, &pheromones, &config, rng, k % graph.len()))
            .collect::<swarmkit::Result<Vec<_>>>()?;
        evaporate(&mut pheromones, &config);
        deposit(&mut pheromones, &tours, &config)?;

        let lengths: Vec<String> = tours.iter().map(|t| format!("{:.3}", t.length)).collect();
        println!(
            "iter {iteration}: tours [{}]  side tau {:.3}  diagonal tau {:.3}",
            lengths.join(", "),
            pheromones.get(0, 1),
            pheromones.get(0, 2)
        );
    }
    Ok(())
}
