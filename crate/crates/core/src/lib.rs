pub mod error;
pub mod boundary;
pub mod compare;
pub mod linalg;
pub mod numeric;
pub mod poly;
pub mod rng;
pub mod size;
pub mod support;
pub mod system;

pub use error::{ReachError, Result};
pub use linalg::Matrix;
pub use poly::{MultiPoly, Rational, UniPoly};
pub use system::{
    build_system, state_transition, state_transition_exact, xi, zeta, InputBox, IntegratorSystem,
    ReachSpec, RelativeDegree,
};
pub use support::{support_box, support_general, support_sum_with_initial_set, width, InputSet, SupportResult};
pub use boundary::{
    boundary_point, contains, implicitize, line_intersection_count, rho_map, sample_boundary, BoundaryParams,
    ImplicitSurface, Membership, Sign,
};
pub use size::{critical_time, diameter, diameter_maximizers, size_report, volume, volume_exact, volume_lower_bound, Asymptotic, Diameter, SizeReport};
pub use compare::{benchmark, hausdorff_p, monte_carlo_volume, zonotope_approximant, zonotope_volume, ApproxMode, BenchmarkRow, Zonotope};
