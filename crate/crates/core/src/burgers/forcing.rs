use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A coefficient of the forcing, as a function of `(u, z, w)`: `u` runs along
/// the generators, `z` is the coordinate that moves along the leaf and `w` is
/// the frozen coordinate labelling the leaf.
pub type CoefficientFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Coefficient {
    Zero,
    Const(f64),
    Func(CoefficientFn),
}

impl Coefficient {
    pub fn func(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Func(Arc::new(f))
    }

    #[inline]
    fn eval(&self, u: f64, z: f64, w: f64) -> f64 {
        match self {
            Coefficient::Zero => 0.0,
            Coefficient::Const(c) => *c,
            Coefficient::Func(f) => f(u, z, w),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Zero) || matches!(self, Coefficient::Const(c) if *c == 0.0)
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Zero => write!(f, "0"),
            Coefficient::Const(c) => write!(f, "{c}"),
            Coefficient::Func(_) => write!(f, "<fn>"),
        }
    }
}

/// Forcing `σ(u, z, p) = A0 + A1·p + A2·p² + A3·p³` of the characteristic
/// equation `z'' = σ(u, z, z')`: a projective structure on one leaf of scri.
///
/// Only four coefficients exist, so the forcing is at most cubic in the slope.
#[derive(Clone, Debug)]
pub struct Forcing {
    coeffs: [Coefficient; 4],
    frozen: f64,
}

impl Forcing {
    pub fn new(coeffs: [Coefficient; 4]) -> Self {
        Self { coeffs, frozen: 0.0 }
    }

    pub fn zero() -> Self {
        Self::new([Coefficient::Zero, Coefficient::Zero, Coefficient::Zero, Coefficient::Zero])
    }

    /// `σ ≡ g`.
    pub fn constant(g: f64) -> Self {
        Self::new([Coefficient::Const(g), Coefficient::Zero, Coefficient::Zero, Coefficient::Zero])
    }

    /// Constant-coefficient cubic `c0 + c1 p + c2 p² + c3 p³`.
    pub fn cubic(c: [f64; 4]) -> Self {
        Self::new(c.map(Coefficient::Const))
    }

    /// Builds a forcing from a slope polynomial given lowest degree first.
    /// Any nonzero coefficient of degree four or more is rejected.
    pub fn from_polynomial(coeffs: Vec<Coefficient>) -> Result<Self> {
        if let Some(degree) = coeffs.iter().rposition(|c| !c.is_zero()).filter(|&d| d > 3) {
            return Err(Error::QuarticForcing { degree });
        }
        let mut it = coeffs.into_iter().chain(std::iter::repeat(Coefficient::Zero));
        let coeffs = [(); 4].map(|_| it.next().expect("padded with zeros"));
        Ok(Self::new(coeffs))
    }

    /// The same forcing restricted to the leaf labelled `w`.
    pub fn on_leaf(&self, w: f64) -> Self {
        Self { coeffs: self.coeffs.clone(), frozen: w }
    }

    pub fn frozen(&self) -> f64 {
        self.frozen
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_zero)
    }

    #[inline]
    pub fn sigma(&self, u: f64, z: f64, p: f64) -> f64 {
        let w = self.frozen;
        let c = |i: usize| self.coeffs[i].eval(u, z, w);
        ((c(3) * p + c(2)) * p + c(1)) * p + c(0)
    }
}
