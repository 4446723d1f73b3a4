//! Benchmark drivers behind the command-line tool: configuration, level
//! hierarchy, error tables and output files.

mod config;
mod levels;
mod run;

pub use config::{Benchmark, RunConfig};
pub use levels::{domain, level_patch, solve_level, LevelSolution};
pub use run::{run_benchmark, run_infsup, BenchmarkReport, InfSupReport, LevelErrors, LevelSummary, Rates};

/// Caps the worker pool at `IGA_CONTACT_THREADS` when set.
pub fn init_threads() -> crate::Result<()> {
    if let Ok(v) = std::env::var("IGA_CONTACT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| crate::Error::Config(format!("IGA_CONTACT_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(crate::Error::Config("IGA_CONTACT_THREADS must be positive".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
