//! Spherical sliced-Wasserstein (SSW) discrepancies on the hypersphere.
//!
//! The crate is organised bottom-up:
//!
//! * [`circle_ot`]: exact and closed-form Wasserstein solvers on the circle `S¹ ≅ [0,1)`.
//! * [`sphere_geom`]: unit vectors, Stiefel frames, geodesic projection onto great
//!   circles, exponential map and tangent projection.
//! * [`distributions`]: uniform, von Mises-Fisher, vMF mixtures and power spherical samplers.
//! * [`ssw`]: Monte Carlo SSW estimators, the uniform-reference fast path and its gradient,
//!   plus the Euclidean sliced-Wasserstein baseline.
//! * [`radon`]: weak-form checks of the spherical Radon transform and its dual.
//! * [`flows`]: particle gradient flows, Geodesic Langevin MCMC and the particle
//!   variational loop.
//! * [`bench`]: run records, cloud files, exact assignment baseline, runtime benchmarks
//!   and the named experiments driven by the CLI.

pub mod bench;
pub mod circle_ot;
pub mod distributions;
pub mod error;
pub mod flows;
pub mod radon;
pub mod sphere_geom;
pub mod ssw;
pub mod stream;

pub use circle_ot::{CircleEmpirical, CirclePoint, ShiftResult};
pub use error::{Error, Result};
pub use sphere_geom::{SphereCloud, SpherePoint, StiefelFrame, TangentVector};
pub use ssw::{Solver, SswConfig, SswEstimate};
