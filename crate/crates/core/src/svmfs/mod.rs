//! Feature selection in linear SVMs through ℓ0-approximation penalties.

mod builders;
mod cv;
mod instance;
mod metrics;
mod schemes;
mod updating;

pub use builders::{
    build_dca1_lp, build_dca1_lp_with_slope, build_dca2_lp, build_dca3_qp, build_dca4_lp, build_hinge_lp, DEFAULT_M_BOX,
};
pub use cv::{cross_validate, train_and_score, CvCell, CvOutcome, CvSetup, Trainer};
pub use instance::{ModelIterate, SvmInstance};
pub use metrics::{pwco, pwco_instance, selected_features, SELECTION_THRESHOLD};
pub use schemes::{run_scheme, run_scheme_with, run_single, FsRunReport, InitialPoint, Scheme, SchemeOptions};
pub use updating::{updating_theta_run, updating_theta_single, UpdatingRun};
