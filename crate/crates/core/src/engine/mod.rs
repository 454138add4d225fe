//! Rejection ABC for model choice: simulate, store every distance, then cut
//! at a quantile of the realised distances.

mod dump;
mod mad;
mod method;
mod run;
mod threshold;

pub use dump::{read_run, write_run, DumpHeader, RunDump, DUMP_FORMAT, DUMP_VERSION};
pub use mad::{estimate_mad_weights, mad, MadWeights, MAD_FLOOR};
pub use method::{AbcMethod, Distance, ModelPrior};
pub use run::{run_abc, run_abc_batch, AbcRun, DrawTable, EngineOptions, RetryRecord, RunResolution, MAX_RETRIES};
pub use threshold::{apply_threshold, posterior_param_summary, smallest_indices, ParamSummary, PosteriorEstimate, ThresholdPolicy};
