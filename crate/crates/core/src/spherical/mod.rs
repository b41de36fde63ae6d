//! The spherical quasiconformal pipeline: conformal initialization,
//! projection, boundary map, Beltrami solve, balancing and lifting back to
//! the sphere.

mod balance;
mod boundary;
mod fsqc;
mod init;
mod verify;

pub use balance::{balance_radii, balancing_scale, BalanceRadii};
pub use boundary::{boundary_map_coefficients, boundary_system_determinant, BoundaryMapCoefficients};
pub use fsqc::{
    fsqc_from_sphere, fsqc_parameterize, fsqc_parameterize_with, principal_rotation_angle, Direction, FsqcOutput, StretchAxis,
};
pub use init::{spherical_conformal_init, spherical_conformal_init_with};
pub use verify::{histogram, verify_dilation, DilationReport, HistogramBin, HISTOGRAM_BINS};
