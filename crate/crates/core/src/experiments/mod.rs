//! Ensemble experiments: running, extrapolating, and checking the growth
//! laws against closed-form potential theory.  Every experiment is a pure
//! function of its config and seed.

pub mod ensemble;
pub mod excess;
pub mod fit;
pub mod fluctuation;
pub mod green;
pub mod lil;
pub mod report;
pub mod sandwich;

pub use ensemble::{run_ensemble, EnsembleResult, EnsembleSpec};
pub use excess::{convergence_excess, ExcessConfig, ExcessReport, PairCheck};
pub use fit::{fit_limit, fit_points, FitModel, FitResult};
pub use fluctuation::{fluctuation_experiment, FluctuationConfig, FluctuationReport};
pub use green::{green_comparison, GreenComparisonConfig, GreenComparisonReport, GreenRow};
pub use lil::{lil_trace, LilConfig, LilTrace};
pub use report::{from_jsonl, to_jsonl, FitRecord, ResultRecord};
pub use sandwich::{sphere_points, verify_sandwich, MarginReport, SandwichConfig, SandwichReport};
