//! Reproducible ensemble experiments on top of `lpp-shock`: configuration
//! files, parallel replica runs, reports and the self-check suites behind
//! the `lpp-shock` command.

pub mod config;
pub mod experiments;
pub mod report;
pub mod verify;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::run;
pub use report::{Check, ExperimentReport, Timings};

/// Runs `f` on a pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    Ok(b.build()?.install(f))
}
