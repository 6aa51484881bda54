use thiserror::Error;

/// Which family of leaves of scri a one-dimensional solve was running on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum LeafKind {
    /// A beta-plane `{y = const}`, carrying coordinates `(u, x)`.
    Beta,
    /// An alpha-plane `{x = const}`, carrying coordinates `(u, y)`.
    Alpha,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("all rows vanish at tolerance {tol:e}")]
    ZeroSubspace { tol: f64 },
    #[error("expected a subspace of dimension {expected}, got {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("geodesic is tangent to scri (V1 inside I or I inside V3)")]
    TangentAtInfinity,
    #[error("scri point lies on the boundary of the (u, x, y) chart")]
    OutsideChart,
    #[error("twistor is not incident with the leaf (residual {residual:e})")]
    NotIncident { residual: f64 },
    #[error("excluded tangent direction (transversal coefficient {value:e})")]
    TangentDirection { value: f64 },
    #[error("geodesic does not meet the affine chart")]
    NoChartIntersection,
    #[error("caustic reached at u = {u}, x = {x}{}", slice_suffix(.slice))]
    CausticReached {
        u: f64,
        x: f64,
        slice: Option<(LeafKind, f64)>,
    },
    #[error("point x = {x} at u = {u} is not covered by the characteristics of the Cauchy data")]
    NotCovered { u: f64, x: f64 },
    #[error("characteristic left the state bound {bound:e} at u = {u}")]
    BlowUp { u: f64, bound: f64 },
    #[error("curve is degenerate at sample {index}")]
    DegenerateCurve { index: usize },
    #[error("Cauchy data is tangent to its curve: transversality margin {margin:e}{}", slice_suffix(.slice))]
    TransversalityViolation {
        margin: f64,
        slice: Option<(LeafKind, f64)>,
    },
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("congruence fails to foliate near (u, x, y, t) = {at:?}")]
    FoliationFailure { at: [f64; 4] },
    #[error("forcing must be at most cubic in the slope, got degree {degree}")]
    QuarticForcing { degree: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn slice_suffix(slice: &Option<(LeafKind, f64)>) -> String {
    match slice {
        Some((LeafKind::Beta, y)) => format!(" on beta-plane y = {y}"),
        Some((LeafKind::Alpha, x)) => format!(" on alpha-plane x = {x}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
