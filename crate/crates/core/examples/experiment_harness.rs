//! Drive the multi-seed harness from code: parse a config, run it into a
//! scratch directory, and show the files it produced.
//!
//! ```bash
//! cargo run -p swarmkit --example experiment_harness
//! ```
//!
//! The `swarmkit` binary does the same from the command line:
//!
//! ```bash
//! cargo run -p swarmkit -- run crates/core/examples/data/tsp10.cfg --output out --workers 4
//! ```

use std::path::Path;

use swarmkit::experiment::{emit_summary, load_config, run_experiment, trace_file_name};

fn main() -> swarmkit::Result<()> {
    let cfg_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/tsp10.cfg");
    let config = load_config(&cfg_path)?;
    let out = std::env::temp_dir().join("swarmkit-harness-example");

    let summary = run_experiment(&config, &out, 4)?;
    println!("wrote {} traces to {}", summary.runs.len(), out.display());

    let first = config.seeds[0];
    let trace = std::fs::read_to_string(out.join(trace_file_name(first))).map_err(|e| {
        swarmkit::Error::Io {
            path: out.clone(),
            source: e,
        }
    })?;
    println!("-- head of {} --", trace_file_name(first));
    for line in trace.lines().take(5) {
        println!("{line}");
    }
    println!("-- summary (timing zeroed) --");
    print!("{}", emit_summary(&summary.without_timing()));
    Ok(())
}
