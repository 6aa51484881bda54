//! Null geodesic congruences of the affine chart built from scattering data
//! on scri, and numeric verification that they are shearfree.
//!
//! Scattering data `(L0, M0)` on a crossection of scri is evolved by the
//! Burgers pair, `L` along beta-planes and `M` along alpha-planes. Each point
//! of scri with its two slopes determines a flag, hence a null line in the
//! chart. The family is checked to foliate, and the shear of its tangent
//! field is evaluated by finite differences through the parameter Jacobian.

mod checks;
mod family;
mod scattering;
mod shear;

pub use checks::{kappa_ranks, max_null_defect, round_trip_error, KappaRanks};
pub use family::{
    build_congruence, default_t_samples, Congruence, GeodesicFamily, KappaFamily, ParallelFamily, TwistedFamily,
    JACOBIAN_STEP,
};
pub use scattering::{
    solve_scattering, solve_scattering_with, KappaField, KappaSample, PlaneFn, ScatteringData, ScriBox,
    SliceResiduals, TRANSVERSALITY_FLOOR,
};
pub use shear::{frobenius_check, shear_report, shear_report_scaled, LineJet, ShearReport, ShearSample};
