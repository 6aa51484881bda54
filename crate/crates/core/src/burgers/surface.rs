//! Burgers' surfaces in the flag space `{(point, line) : point ∈ line}` of the
//! projective plane, their caustics, and the circle example.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{cross, dot, norm};
use crate::projlin::{pairing, HPoint};

/// An incident point–line pair: a point of the contact 3-manifold of flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactElement {
    pub point: HPoint<3>,
    pub line: HPoint<3>,
}

impl ContactElement {
    /// The element at `(u, x)` with slope `p`: point `(u, x, 1)`, line `p·u − x + (x − p·u)·1 = 0`.
    pub fn affine(u: f64, x: f64, p: f64) -> Result<Self> {
        Ok(Self { point: HPoint::new([u, x, 1.0])?, line: HPoint::new([p, -1.0, x - p * u])? })
    }

    /// `(u, x, p)` when both point and line lie in the affine chart.
    pub fn to_affine(&self) -> Option<(f64, f64, f64)> {
        let [a, b, c] = *self.point.coords();
        let [l0, l1, _] = *self.line.coords();
        (c != 0.0 && l1 != 0.0).then(|| (a / c, b / c, -l0 / l1))
    }

    pub fn incidence(&self) -> f64 {
        pairing(&self.point, &self.line)
    }
}

/// Legendrian lift of an envelope: samples `s ↦ (tangency point, line)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausticCurve {
    pub samples: Vec<ContactElement>,
}

impl CausticCurve {
    /// Largest `|⟨point_{i+1}, line_i⟩|` over neighbouring samples, with unit
    /// representatives. Second order in the sample spacing for a Legendrian curve.
    pub fn legendrian_defect(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let p = w[1].point.coords();
                let l = w[0].line.coords();
                dot(p, l).abs() / (norm(p) * norm(l))
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    /// Parameter of the dual curve.
    pub s: f64,
    /// Affine position along the line, measured from the tangency point.
    pub tau: f64,
    pub point: HPoint<3>,
    pub line: HPoint<3>,
}

/// One chart of a Burgers' surface. Its boundary is the caustic (`tau = 0`)
/// and the ramification locus (`tau = ±∞`).
#[derive(Debug, Clone, PartialEq)]
pub struct Sheet {
    pub sign: i8,
    pub samples: Vec<SurfaceSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurgersSurface {
    pub sheets: Vec<Sheet>,
    pub caustic: Option<CausticCurve>,
    /// Where the two sheets glue along each line (`tau = ±∞`), one per sample of the dual curve.
    pub ramification: Vec<HPoint<3>>,
}

fn derivative(f: &dyn Fn(f64) -> [f64; 3], s: f64, h: f64) -> [f64; 3] {
    let d = |h: f64| {
        let (a, b) = (f(s + h), f(s - h));
        [0, 1, 2].map(|i| (a[i] - b[i]) / (2.0 * h))
    };
    let (d1, d2) = (d(h), d(0.5 * h));
    [0, 1, 2].map(|i| (4.0 * d2[i] - d1[i]) / 3.0)
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = norm(&v);
    v.map(|c| c / n)
}

fn closed_params(range: (f64, f64), samples: usize) -> impl Iterator<Item = f64> {
    let (a, b) = range;
    (0..samples).map(move |i| a + (b - a) * i as f64 / samples as f64)
}

/// The maximal Burgers' surface swept by the lines of an immersed curve in the
/// dual plane: every point of every line `γ(s)`, carrying `γ(s)` as its value.
///
/// The caustic is the lift `s ↦ (γ(s) × γ'(s), γ(s))`. Each line is split at
/// its tangency point into the two sheets `tau > 0` and `tau < 0`, which meet
/// again at `tau = ±∞`.
pub fn surface_from_caustic(
    dual_curve: &dyn Fn(f64) -> [f64; 3],
    range: (f64, f64),
    samples: usize,
    fiber_samples: usize,
) -> Result<BurgersSurface> {
    if samples == 0 || !(range.1 > range.0) {
        return Err(Error::InvalidArgument("dual curve needs samples and an ordered range".into()));
    }
    let h = 1e-3 * (range.1 - range.0).min(1.0);
    let mut caustic = Vec::with_capacity(samples);
    let mut ramification = Vec::with_capacity(samples);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (i, s) in closed_params(range, samples).enumerate() {
        let g = dual_curve(s);
        let dg = derivative(dual_curve, s, h);
        let c = cross(&g, &dg);
        if !(norm(&c) > 1e-12 * norm(&g) * norm(&dg)) {
            return Err(Error::DegenerateCurve { index: i });
        }
        let line = HPoint::new(g)?;
        let c = unit(c);
        let d = unit(cross(&g, &c));
        caustic.push(ContactElement { point: HPoint::new(c)?, line });
        ramification.push(HPoint::new(d)?);
        for j in 1..=fiber_samples {
            let tau = (FRAC_PI_2 * j as f64 / (fiber_samples + 1) as f64).tan();
            for (sheet, t) in [(&mut plus, tau), (&mut minus, -tau)] {
                let point = HPoint::new([0, 1, 2].map(|k| c[k] + t * d[k]))?;
                sheet.push(SurfaceSample { s, tau: t, point, line });
            }
        }
    }
    Ok(BurgersSurface {
        sheets: vec![Sheet { sign: 1, samples: plus }, Sheet { sign: -1, samples: minus }],
        caustic: Some(CausticCurve { samples: caustic }),
        ramification,
    })
}

/// The dual circle `p² + q² = r²`, i.e. the tangent lines of `x² + y² = z²`.
pub fn dual_circle(s: f64) -> [f64; 3] {
    [s.cos(), s.sin(), 1.0]
}

/// Tangent lines to the circle `x² + y² = z²` through a point: two from
/// outside, one from the circle itself, none from inside.
pub fn circle_tangent_lines(pt: &HPoint<3>) -> Vec<HPoint<3>> {
    let q = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] - a[2] * b[2];
    let n = unit(*pt.coords());
    // Orthonormal basis of the lines through the point.
    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let b1 = unit(cross(&n, &seed));
    let b2 = cross(&n, &b1);
    let (q11, q12, q22) = (q(&b1, &b1), q(&b1, &b2), q(&b2, &b2));
    let disc = q12 * q12 - q11 * q22;
    let combine = |a: f64, b: f64| HPoint::new([0, 1, 2].map(|k| a * b1[k] + b * b2[k])).ok();
    let roots: Vec<(f64, f64)> = if disc < -1e-14 {
        Vec::new()
    } else if disc <= 1e-14 {
        if q11.abs() >= q22.abs() {
            vec![(-q12, q11)]
        } else {
            vec![(q22, -q12)]
        }
    } else {
        // Cancellation-free pair of roots of q11·a² + 2·q12·a·b + q22·b².
        let w = -(q12 + q12.signum() * disc.sqrt());
        vec![(w, q11), (q22, w)]
    };
    roots.into_iter().filter_map(|(a, b)| combine(a, b)).collect()
}

/// A curve in the projective plane with a line through each of its points.
#[derive(Clone)]
pub struct ProjectiveCauchyCurve {
    pub point: Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>,
    pub datum: Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>,
    pub range: (f64, f64),
    pub samples: usize,
}

/// Minimum over samples of the projective distance (sine of the angle between
/// unit representatives) from the tangent line `γ × γ'` to the datum line.
pub fn projective_transversality(c: &ProjectiveCauchyCurve) -> Result<f64> {
    let h = 1e-3 * (c.range.1 - c.range.0).min(1.0);
    let mut margin = f64::INFINITY;
    for (i, s) in closed_params(c.range, c.samples).enumerate() {
        let g = (c.point)(s);
        let l = (c.datum)(s);
        let residual = dot(&g, &l).abs() / (norm(&g) * norm(&l));
        if residual > 1e-9 {
            return Err(Error::NotIncident { residual });
        }
        let t = cross(&g, &derivative(c.point.as_ref(), s, h));
        let t = HPoint::new(t).map_err(|_| Error::DegenerateCurve { index: i })?;
        margin = margin.min(t.angle_sine(&HPoint::new(l)?));
    }
    Ok(margin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same_line(a: &HPoint<3>, b: [f64; 3]) -> bool {
        a.angle_sine(&HPoint::new(b).unwrap()) < 1e-12
    }

    #[test]
    fn tangent_lines_from_outside() {
        let lines = circle_tangent_lines(&HPoint::new([2.0, 0.0, 1.0]).unwrap());
        assert_eq!(lines.len(), 2);
        let s3 = 3f64.sqrt();
        assert!(lines.iter().any(|l| same_line(l, [1.0, s3, -2.0])));
        assert!(lines.iter().any(|l| same_line(l, [1.0, -s3, -2.0])));
    }

    #[test]
    fn tangent_line_on_circle_and_none_inside() {
        let lines = circle_tangent_lines(&HPoint::new([1.0, 0.0, 1.0]).unwrap());
        assert_eq!(lines.len(), 1);
        assert!(same_line(&lines[0], [1.0, 0.0, -1.0]));
        assert!(circle_tangent_lines(&HPoint::new([0.0, 0.0, 1.0]).unwrap()).is_empty());
    }

    #[test]
    fn dual_circle_caustic_lies_on_all_three_loci() {
        let surf = surface_from_caustic(&dual_circle, (0.0, std::f64::consts::TAU), 200, 4).unwrap();
        let caustic = surf.caustic.unwrap();
        assert_eq!(caustic.samples.len(), 200);
        for e in &caustic.samples {
            let [x, y, z] = *e.point.coords();
            let [p, q, r] = *e.line.coords();
            assert!((x * x + y * y - z * z).abs() <= 1e-10);
            assert!(e.incidence().abs() <= 1e-10);
            assert!((p * p + q * q - r * r).abs() <= 1e-10);
        }
        assert!(caustic.legendrian_defect() < 1e-3);
        // Ramification at infinity.
        assert!(surf.ramification.iter().all(|d| d.coords()[2].abs() < 1e-12));
        assert_eq!(surf.sheets.len(), 2);
        for sheet in &surf.sheets {
            for smp in &sheet.samples {
                assert!(pairing(&smp.point, &smp.line).abs() < 1e-12);
                assert_eq!(smp.tau.signum() as i8, sheet.sign);
            }
        }
    }

    #[test]
    fn surface_points_outside_the_circle_see_two_sheets() {
        let surf = surface_from_caustic(&dual_circle, (0.0, std::f64::consts::TAU), 64, 8).unwrap();
        for sheet in &surf.sheets {
            for smp in &sheet.samples {
                let [x, y, z] = *smp.point.coords();
                assert!(x * x + y * y - z * z >= -1e-12, "surface points lie outside the circle");
                let through = circle_tangent_lines(&smp.point);
                let best = through.iter().map(|l| l.angle_sine(&smp.line)).fold(1.0, f64::min);
                assert!(best < 1e-8, "tau {} best {best} count {}", smp.tau, through.len());
            }
        }
    }

    #[test]
    fn pencil_caustic_degenerates_to_its_centre() {
        let centre = [0.3, -0.2, 1.0];
        let pencil = move |s: f64| cross(&centre, &[s.cos(), s.sin(), 0.0]);
        let surf = surface_from_caustic(&pencil, (0.0, 3.0), 30, 2).unwrap();
        let c = HPoint::new(centre).unwrap();
        for e in surf.caustic.unwrap().samples {
            assert!(e.point.angle_sine(&c) < 1e-9);
        }
    }

    #[test]
    fn constant_dual_curve_is_not_immersed() {
        let fixed = |_s: f64| [1.0, 2.0, 3.0];
        assert!(matches!(surface_from_caustic(&fixed, (0.0, 1.0), 5, 1), Err(Error::DegenerateCurve { .. })));
    }

    #[test]
    fn conic_cauchy_curve_is_transverse() {
        let a = 2f64;
        let c = ProjectiveCauchyCurve {
            point: Arc::new(move |t: f64| [a.sqrt() * t.cos(), a.sqrt() * t.sin(), 1.0]),
            datum: Arc::new(|t: f64| {
                let b = t + std::f64::consts::FRAC_PI_4;
                [b.cos(), b.sin(), -1.0]
            }),
            range: (0.0, std::f64::consts::TAU),
            samples: 200,
        };
        // Closed form: tangent (cos t, sin t, −√2) against (cos(t+π/4), sin(t+π/4), −1).
        let m = projective_transversality(&c).unwrap();
        assert!((m - 0.5).abs() < 1e-9, "margin {m}");
    }

    #[test]
    fn affine_contact_elements_round_trip() {
        let e = ContactElement::affine(0.5, -1.0, 2.0).unwrap();
        let (u, x, p) = e.to_affine().unwrap();
        assert!((u - 0.5).abs() < 1e-15 && (x + 1.0).abs() < 1e-15 && (p - 2.0).abs() < 1e-15);
        assert!(e.incidence().abs() < 1e-15);
    }
}
