//! Classical post-processing: probability tables, cross-correlation kernels,
//! median-of-means aggregation, decay fits and the coherence report.

pub mod estimators;
pub mod fit;
pub mod kernel;
pub mod report;
pub mod table;

pub use estimators::{fidelity_estimator, median_of_means, purity_estimator, DepthEstimate, EstimateKind};
pub use fit::{fit_decay, fit_decay_bootstrap, DecayFit, DepthSamples};
pub use kernel::KernelMethod;
pub use report::{extract_report, CoherenceReport};
pub use table::{hamming, unbiased_square, ProbabilityTable};
