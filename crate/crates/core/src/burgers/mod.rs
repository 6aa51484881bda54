//! Burgers' functions and surfaces.

mod dual;
mod forcing;
mod integrate;
mod roots;
mod solution;
mod surface;

pub use dual::{dual_ode_extract, extract, DualGrid, DualOde, DualSample, Incidence, OdeIncidence, Side, Transposed};
pub use forcing::{Coefficient, CoefficientFn, Forcing};
pub use integrate::{characteristic_trace, CharState, Integrator};
pub use solution::{
    caustic_detect, eval_flat, eval_forced, transport_eval, transversality_check, BurgersSolution, CauchyCurve,
    CausticPoint, CurveFn, Level, Region, ScalarFn,
};
pub use surface::{
    circle_tangent_lines, dual_circle, projective_transversality, surface_from_caustic, BurgersSurface,
    CausticCurve, ContactElement, ProjectiveCauchyCurve, Sheet, SurfaceSample,
};
