//! Approximants and comparisons: zonotopes, Monte Carlo volumes, Hausdorff
//! distances to p-norm input models and the benchmark harness.

mod bench;
mod hausdorff;
mod zonotope;

pub use bench::{
    benchmark, external_approximant, monte_carlo_volume, BenchmarkRow, Ellipsoid, EllipsoidScore, MonteCarlo,
};
pub use hausdorff::{hausdorff_p, hausdorff_sweep, HausdorffResult, HAUSDORFF_ITERS, HAUSDORFF_STARTS};
pub use zonotope::{
    zonotope_approximant, zonotope_diameter, zonotope_volume, ApproxMode, VolumeMethod, Zonotope, ZonotopeVolume,
    DIAMETER_ENUMERATION_MAX,
};
