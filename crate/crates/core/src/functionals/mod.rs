//! Radial quantities and the monotonicity functionals built from them:
//! the Almgren frequency, the Weiss and Monneau energies and the truncated
//! generalized frequency, plus rescalings and identity checks.

mod export;
mod monneau;
mod profile;
mod rescale;
mod weiss;

pub use export::{write_pairs, write_profile_csv, PROFILE_HEADER, PROFILE_VERSION};
pub use monneau::monneau;
pub use profile::{
    default_radii, geometric_radii, limit_at_zero, linear_fit, max_decrease, monotone_prefix,
    radial_profile, radius_range, PhiColumns, RadialProfile, WeissColumns,
};
pub use rescale::{frequency_scaling_check, rescale, RescaleMode, Rescaled, ScalingCheck};
pub use weiss::{weiss_derivative_check, WeissIdentity, WEISS_EPS_FRACTION};
