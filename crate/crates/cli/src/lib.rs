//! Batch runner for the teleportation-based error correction simulator.

pub mod checks;
pub mod config;
pub mod run;

pub use config::{ExperimentConfig, Format, Overrides};
pub use run::{emit_plot_data, run, RunRecord};

/// Sizes the global thread pool from `TECSIM_THREADS` when set.
pub fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("TECSIM_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("TECSIM_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}
