//! Limiting angular densities and sector-boundary distances.
//!
//! Everything here is evaluated in the frame where the observation point
//! `z₀` sits at `i`: the conjugator `z ↦ (z − x₀)/y₀` is an isometry fixing
//! angles, and sends `z₁` to `z₁′ = ((x₁ − x₀)/y₀, y₁/y₀)`. The closed form
//! of `ρ` in the original coordinates is kept alongside as a cross-check.
//!
//! Ray angles `t` are radians with `t = 2πω`: `t = 0` points straight up and
//! `t > 0` turns toward negative real part.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::angular::point_json;
use crate::format::Sig17;
use crate::halfplane::{distance, fold_to_line_angle, NormalizedAngle, Point};
use crate::lattice::{enumerate_ball, BallQuery, GroupSpec, Orbit, DEFAULT_BUDGET};
use crate::quadrature::integrate_split;
use crate::{angular::AngleInterval, Error, Result};

/// Absolute tolerance for density integrals.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

// Below this |sin t| the ray is treated as the vertical geodesic.
const VERTICAL_SIN: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityParams {
    pub z0: Point,
    pub z1: Point,
    /// `z₁` in the frame where `z₀ = i`.
    pub z1_frame: Point,
    /// `|z₁′|² + 1`.
    pub beta: f64,
}

impl DensityParams {
    pub fn new(z0: Point, z1: Point) -> Self {
        let z1_frame = z1.to_frame(z0);
        DensityParams { z0, z1, z1_frame, beta: z1_frame.norm_sqr() + 1.0 }
    }

    /// Denominator of the closed form of `ρ` in the original coordinates.
    pub fn rho_denominator(&self, omega: NormalizedAngle) -> f64 {
        let (x0, y0, x1, y1) = (self.z0.x(), self.z0.y(), self.z1.x(), self.z1.y());
        let (s, c) = (TAU * omega.value()).sin_cos();
        let a = (x0 - x1).powi(2) + y0 * y0 + y1 * y1;
        a * (1.0 - c) + 2.0 * y0 * y0 * c + 2.0 * (x1 - x0) * y0 * s
    }

    /// Sector-boundary distance `Q` from `z₀` along the ray at angle `t`.
    pub fn sector_radius_exact(&self, t: f64, radius: f64) -> Result<f64> {
        sector_radius_exact(self.z1_frame, t, radius)
    }

    /// Directions where the denominator of `ρ` is stationary, as angles.
    fn rho_extrema(&self) -> [f64; 2] {
        let (x0, y0, x1, y1) = (self.z0.x(), self.z0.y(), self.z1.x(), self.z1.y());
        let a = (x0 - x1).powi(2) + y0 * y0 + y1 * y1;
        let b = a - 2.0 * y0 * y0;
        let c = 2.0 * (x1 - x0) * y0;
        // d/dt (a − b cos t + c sin t) = b sin t + c cos t
        let t = (-c).atan2(b);
        let w = NormalizedAngle::from_radians(t).value();
        [w, NormalizedAngle::new(w + 0.5).value()]
    }

    /// Coefficients `(A, B, C)` of `η(t) = 2y₀y₁A / (A² − (B cos t + C sin t)²)`.
    fn eta_coefficients(&self) -> (f64, f64, f64) {
        let (x0, y0, x1, y1) = (self.z0.x(), self.z0.y(), self.z1.x(), self.z1.y());
        let dx2 = (x0 - x1).powi(2);
        (y0 * y0 + y1 * y1 + dx2, y1 * y1 - y0 * y0 + dx2, 2.0 * y0 * (x0 - x1))
    }
}

/// `ρ_{z₀,z₁}(ω)`, the limiting density of angles seen from `z₀` for orbit
/// points ordered by distance to `z₁`.
pub fn rho(p: &DensityParams, omega: NormalizedAngle) -> f64 {
    2.0 * p.z0.y() * p.z1.y() / p.rho_denominator(omega)
}

/// Limiting density `η_{z₀,z₁}(t)` of undirected line angles `t ∈ [−π/2, π/2]`.
pub fn eta(p: &DensityParams, t: f64) -> f64 {
    let (a, b, c) = p.eta_coefficients();
    let (s, co) = t.sin_cos();
    let lin = b * co + c * s;
    2.0 * p.z0.y() * p.z1.y() * a / ((a - lin) * (a + lin))
}

/// `k(θ) = 2y₁′ / (β − (β − 2)cos 2πθ + 2x₁′ sin 2πθ)`, the leading
/// coefficient of `e^{Q}` in `e^R`. Agrees with [`rho`] identically.
pub fn k_theta(p: &DensityParams, omega: NormalizedAngle) -> f64 {
    let (s, c) = (TAU * omega.value()).sin_cos();
    let z = p.z1_frame;
    2.0 * z.y() / (p.beta - (p.beta - 2.0) * c + 2.0 * z.x() * s)
}

/// `∫_I ρ` by adaptive quadrature, split at the extrema of `ρ`.
pub fn integrate_density(p: &DensityParams, interval: &AngleInterval) -> f64 {
    let a = interval.start.value();
    let b = a + interval.length;
    let breaks: Vec<f64> = p
        .rho_extrema()
        .iter()
        .flat_map(|&w| [w - 1.0, w, w + 1.0])
        .collect();
    integrate_split(
        |w| rho(p, NormalizedAngle::new(w)),
        a,
        b,
        &breaks,
        8,
        QUADRATURE_TOLERANCE / 10.0,
    )
}

/// `(1/π) ∫_lo^hi η`.
pub fn integrate_eta(p: &DensityParams, lo: f64, hi: f64) -> f64 {
    let (_, b, c) = p.eta_coefficients();
    let t0 = c.atan2(b);
    let breaks: Vec<f64> =
        (-4..=4).map(|k| t0 + k as f64 * FRAC_PI_2).collect();
    integrate_split(|t| eta(p, t), lo, hi, &breaks, 8, QUADRATURE_TOLERANCE * PI / 10.0) / PI
}

/// `∫ (ρ(ω) + ρ(ω + 1/2)) dω` over the line-angle range `[lo, hi]`
/// (radians), i.e. the mass of both rays of each undirected line.
pub fn integrate_folded_rho(p: &DensityParams, lo: f64, hi: f64) -> f64 {
    let len = (hi - lo) / TAU;
    let start = lo / TAU;
    let forward = AngleInterval { start: NormalizedAngle::new(start), length: len };
    let backward = AngleInterval { start: NormalizedAngle::new(start + 0.5), length: len };
    integrate_density(p, &forward) + integrate_density(p, &backward)
}

/// Euclidean center and radius of the geodesic leaving `i` at angle `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorGeometry {
    pub t: f64,
    pub alpha: f64,
    pub delta: f64,
    /// `1/sin t`, the radius carrying the sign of `t`.
    pub delta_signed: f64,
}

impl SectorGeometry {
    /// `None` on the vertical rays `t ∈ {0, ±π}`.
    pub fn new(t: f64) -> Option<Self> {
        let (s, c) = t.sin_cos();
        if s.abs() < VERTICAL_SIN {
            return None;
        }
        Some(SectorGeometry { t, alpha: -c / s, delta: 1.0 / s.abs(), delta_signed: 1.0 / s })
    }
}

fn wrap_angle(t: f64) -> f64 {
    let t = t.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Hyperbolic distance `Q(z₁, t, R)` from `i` to the point where the ray at
/// angle `t` leaves the ball of radius `R` about `z₁` (frame `z₀ = i`).
///
/// The exit point `w′ = x′ + iy′` is the intersection of the ray's geodesic
/// (center `α = −cot t`, radius `δ = 1/|sin t|`) with the circle
/// `|x₁ + iy₁ cosh R − z| = y₁ sinh R`, taking the root with negative real
/// part when `t > 0`. The quadratic is solved without cancellation and `y′`
/// is read off the radical line `β/2 + (α − x₁)x′ = y₁ cosh R · y′`.
pub fn sector_radius_exact(z1: Point, t: f64, radius: f64) -> Result<f64> {
    let inner = distance(Point::I, z1);
    if !(radius > inner) || !radius.is_finite() {
        return Err(Error::Domain(format!(
            "radius {radius} must exceed d(i, z1) = {inner}"
        )));
    }
    let t = wrap_angle(t);
    let (x1, y1) = (z1.x(), z1.y());
    let k = y1 * radius.cosh();
    let norm = z1.norm_sqr();
    let geometry = match SectorGeometry::new(t) {
        Some(g) => g,
        None => {
            // vertical geodesic x = 0: y² − 2ky + |z₁|² = 0
            let upper = k + (k * k - norm).sqrt();
            return Ok(if t.abs() < FRAC_PI_2 { upper.ln() } else { -(norm / upper).ln() });
        }
    };
    let SectorGeometry { alpha, delta, .. } = geometry;
    let beta = norm + 1.0;
    let kappa = 1.0 / (k * k);
    let am = alpha - x1;
    let h = alpha - kappa * beta * am / 2.0;
    let disc = delta * delta + kappa * am * am - kappa * beta * beta / 4.0 - kappa * alpha * beta * am;
    if disc < 0.0 {
        return Err(Error::Domain(format!("ray at t = {t} misses the circle")));
    }
    let lead = 1.0 + kappa * am * am;
    let constant = kappa * beta * beta / 4.0 - 1.0;
    let root = disc.sqrt();
    let sign_t = t.signum();
    // the chosen root is (h − sign(t)·√disc)/lead; use Vieta when that subtracts
    let x = if h * sign_t > 0.0 {
        constant / (h + sign_t * root)
    } else {
        (h - sign_t * root) / lead
    };
    let y = (beta / 2.0 + am * x) / k;
    if !(y > 0.0) {
        return Err(Error::Domain(format!("no exit point above the axis at t = {t}")));
    }
    // log((|w′+i| + |w′−i|)/(|w′+i| − |w′−i|)) with the difference rationalized
    let sum = x.hypot(y + 1.0) + x.hypot(y - 1.0);
    Ok(2.0 * sum.ln() - (4.0 * y).ln())
}

/// Logarithm of the main term `2y₁′e^R / (β − (β − 2)cos t + 2x₁′ sin t)`.
pub fn sector_radius_asymptotic(p: &DensityParams, t: f64, radius: f64) -> f64 {
    let z = p.z1_frame;
    let (s, c) = t.sin_cos();
    radius + (2.0 * z.y()).ln() - (p.beta - (p.beta - 2.0) * c + 2.0 * z.x() * s).ln()
}

/// Inputs of the per-bin comparison between orbit angles and the limiting densities.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorExperiment {
    pub group: GroupSpec,
    pub z0: Point,
    pub z1: Point,
    pub w: Point,
    pub cosh_threshold: f64,
    pub bins: usize,
    pub budget: usize,
}

impl SectorExperiment {
    pub fn new(group: GroupSpec, z0: Point, z1: Point, w: Point, cosh_threshold: f64, bins: usize) -> Self {
        SectorExperiment { group, z0, z1, w, cosh_threshold, bins, budget: DEFAULT_BUDGET }
    }

    fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::InvalidQuery(format!("need at least 2 bins, got {}", self.bins)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BinRow {
    pub interval: [Sig17; 2],
    pub count: usize,
    pub empirical: Sig17,
    pub predicted: Sig17,
    pub diff: Sig17,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_folded_rho: Option<Sig17>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorReport {
    pub group: String,
    pub z0: [Sig17; 2],
    pub z1: [Sig17; 2],
    pub w: [Sig17; 2],
    #[serde(rename = "X")]
    pub cosh_threshold: Sig17,
    #[serde(rename = "R")]
    pub radius: Sig17,
    #[serde(rename = "N")]
    pub total: usize,
    pub bins: Vec<BinRow>,
    pub max_abs_diff: Sig17,
    /// Largest per-bin gap between the `η` and folded-`ρ` predictions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_prediction_gap: Option<Sig17>,
}

impl SectorReport {
    pub fn max_abs_diff(&self) -> f64 {
        self.max_abs_diff.0
    }

    pub fn empirical(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.empirical.0).collect()
    }

    pub fn predicted(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.predicted.0).collect()
    }
}

fn bin_index(fraction: f64, bins: usize) -> usize {
    ((fraction * bins as f64).floor().max(0.0) as usize).min(bins - 1)
}

fn report_header(e: &SectorExperiment, w: Point, orbit: &Orbit, bins: Vec<BinRow>, gap: Option<f64>) -> SectorReport {
    let max = bins.iter().map(|b| b.diff.0.abs()).fold(0.0, f64::max);
    SectorReport {
        group: e.group.to_string(),
        z0: point_json(e.z0),
        z1: point_json(e.z1),
        w: point_json(w),
        cosh_threshold: Sig17(e.cosh_threshold),
        radius: Sig17(e.cosh_threshold.acosh()),
        total: orbit.len(),
        bins,
        max_abs_diff: Sig17(max),
        max_prediction_gap: gap.map(Sig17),
    }
}

/// Histogram of `ω` (seen from `z₀`) for `{γ : d(z₁, γw) ≤ R}` in `bins`
/// equal arcs, against `∫ρ_{z₀,z₁}` over each arc.
pub fn theorem3_report(e: &SectorExperiment) -> Result<SectorReport> {
    e.validate()?;
    let q = BallQuery::shifted(e.group, e.z0, e.z1, e.w, e.cosh_threshold).with_budget(e.budget);
    let orbit = enumerate_ball(&q)?;
    let mut counts = vec![0usize; e.bins];
    for s in orbit.samples() {
        counts[bin_index(s.omega.value(), e.bins)] += 1;
    }
    let p = DensityParams::new(e.z0, e.z1);
    let n = orbit.len().max(1) as f64;
    let width = 1.0 / e.bins as f64;
    let rows = counts
        .iter()
        .enumerate()
        .map(|(j, &count)| {
            let lo = j as f64 * width;
            let predicted = integrate_density(&p, &AngleInterval { start: NormalizedAngle::new(lo), length: width });
            let empirical = count as f64 / n;
            BinRow {
                interval: [Sig17(lo), Sig17(lo + width)],
                count,
                empirical: Sig17(empirical),
                predicted: Sig17(predicted),
                diff: Sig17(empirical - predicted),
                predicted_folded_rho: None,
            }
        })
        .collect();
    Ok(report_header(e, e.w, &orbit, rows, None))
}

/// Histogram of undirected line angles in `[−π/2, π/2)` for
/// `{γ : d(z₁, γz₁) ≤ R}` against `(1/π)∫η` per bin. The folded-`ρ`
/// prediction `∫(ρ(ω) + ρ(ω + 1/2))dω` is reported next to it. The point
/// `e.w` is ignored; the moved point is `z₁`.
pub fn theorem2_report(e: &SectorExperiment) -> Result<SectorReport> {
    e.validate()?;
    let q = BallQuery::shifted(e.group, e.z0, e.z1, e.z1, e.cosh_threshold).with_budget(e.budget);
    let orbit = enumerate_ball(&q)?;
    let mut counts = vec![0usize; e.bins];
    for s in orbit.samples() {
        let theta = fold_to_line_angle(s.omega);
        counts[bin_index((theta + FRAC_PI_2) / PI, e.bins)] += 1;
    }
    let p = DensityParams::new(e.z0, e.z1);
    let n = orbit.len().max(1) as f64;
    let width = PI / e.bins as f64;
    let mut gap = 0.0f64;
    let rows = counts
        .iter()
        .enumerate()
        .map(|(j, &count)| {
            let lo = -FRAC_PI_2 + j as f64 * width;
            let hi = lo + width;
            let predicted = integrate_eta(&p, lo, hi);
            let folded = integrate_folded_rho(&p, lo, hi);
            gap = gap.max((predicted - folded).abs());
            let empirical = count as f64 / n;
            BinRow {
                interval: [Sig17(lo), Sig17(hi)],
                count,
                empirical: Sig17(empirical),
                predicted: Sig17(predicted),
                diff: Sig17(empirical - predicted),
                predicted_folded_rho: Some(Sig17(folded)),
            }
        })
        .collect();
    Ok(report_header(e, e.z1, &orbit, rows, Some(gap)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfplane::cosh_distance;
    use crate::lattice::enumerate_with_angular_radius;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y).unwrap()
    }

    fn w(v: f64) -> NormalizedAngle {
        NormalizedAngle::new(v)
    }

    /// Independent root finder: distance along the ray where
    /// `cosh d(z₁, ray(s)) = cosh R`, in the original frame of `z₀`.
    fn bisection_q(z0: Point, z1: Point, t: f64, radius: f64) -> f64 {
        let omega = NormalizedAngle::from_radians(t);
        let target = radius.cosh();
        let f = |s: f64| cosh_distance(z1, Point::along_ray(z0, omega, s)) - target;
        let (mut lo, mut hi) = (0.0, radius + distance(z0, z1) + 1.0);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn random_params(rng: &mut ChaCha8Rng) -> DensityParams {
        let mut p = || pt(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..4.0));
        let (a, b) = (p(), p());
        DensityParams::new(a, b)
    }

    #[test]
    fn rho_examples() {
        let p = DensityParams::new(Point::I, Point::I);
        for k in 0..10 {
            assert_relative_eq!(rho(&p, w(k as f64 / 10.0)), 1.0, epsilon = 1e-15);
        }
        let p = DensityParams::new(pt(0.0, 2.0), Point::I);
        assert_relative_eq!(rho(&p, w(0.0)), 0.5, epsilon = 1e-15);
        for k in 0..10 {
            let v = k as f64 / 10.0;
            assert_relative_eq!(rho(&p, w(v)), 4.0 / (5.0 + 3.0 * (TAU * v).cos()), epsilon = 1e-14);
        }
        let p = DensityParams::new(Point::I, pt(0.7, 1.9));
        assert_relative_eq!(rho(&p, w(0.0)), 1.9, epsilon = 1e-14);
    }

    #[test]
    fn eta_examples() {
        let p = DensityParams::new(Point::I, Point::I);
        assert_relative_eq!(eta(&p, 0.4), 1.0, epsilon = 1e-15);
        let p = DensityParams::new(pt(0.0, 2.0), Point::I);
        for t in [-1.5, -0.3, 0.0, 0.8, 1.5] {
            assert_relative_eq!(eta(&p, t), 20.0 / (25.0 - 9.0 * t.cos().powi(2)), epsilon = 1e-14);
        }
        assert_relative_eq!(eta(&p, 0.0), 1.25, epsilon = 1e-15);
    }

    #[test]
    fn k_examples() {
        let p = DensityParams::new(pt(0.4, 1.3), pt(0.4, 1.3));
        assert_relative_eq!(k_theta(&p, w(0.3)), 1.0, epsilon = 1e-15);
        let p = DensityParams::new(pt(0.0, 2.0), Point::I);
        assert_relative_eq!(p.beta, 1.25);
        for k in 0..10 {
            let v = k as f64 / 10.0;
            assert_relative_eq!(k_theta(&p, w(v)), 4.0 / (5.0 + 3.0 * (TAU * v).cos()), epsilon = 1e-14);
        }
    }

    #[test]
    fn integral_examples() {
        let p = DensityParams::new(pt(0.3, 0.5), pt(0.3, 0.5));
        let i = AngleInterval::new(0.85, 0.3).unwrap();
        assert_relative_eq!(integrate_density(&p, &i), 0.3, epsilon = 1e-12);
        let p = DensityParams::new(pt(-1.1, 0.3), pt(1.7, 2.9));
        assert!((integrate_density(&p, &AngleInterval::full()) - 1.0).abs() < 1e-10);
        let i = AngleInterval::new(0.2, 0.35).unwrap();
        let sum = integrate_density(&p, &i) + integrate_density(&p, &i.complement().unwrap());
        assert!((sum - 1.0).abs() < 1e-10);
        let p = DensityParams::new(pt(0.0, 2.0), Point::I);
        assert!((integrate_eta(&p, -FRAC_PI_2, FRAC_PI_2) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn densities_on_random_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = random_params(&mut rng);
            // closed form ∫₀^{2π} dt/(A + B cos t + C sin t) = 2π/√(A² − B² − C²)
            let (x0, y0, x1, y1) = (p.z0.x(), p.z0.y(), p.z1.x(), p.z1.y());
            let a = (x0 - x1).powi(2) + y0 * y0 + y1 * y1;
            let b = 2.0 * y0 * y0 - a;
            let c = 2.0 * (x1 - x0) * y0;
            let closed = 2.0 * y0 * y1 / (a * a - b * b - c * c).sqrt();
            assert_relative_eq!(closed, 1.0, epsilon = 1e-12);
            assert!((integrate_density(&p, &AngleInterval::full()) - 1.0).abs() < 1e-10);
            assert!((integrate_eta(&p, -FRAC_PI_2, FRAC_PI_2) - 1.0).abs() < 1e-10);
            for j in 0..1000 {
                let v = j as f64 / 1000.0;
                assert!(p.rho_denominator(w(v)) > 0.0);
                let r = rho(&p, w(v));
                assert!(r > 0.0);
                assert!((r - k_theta(&p, w(v))).abs() <= 1e-12 * r.max(1.0));
                let folded = r + rho(&p, w(v + 0.5));
                assert!((folded - 2.0 * eta(&p, TAU * v)).abs() <= 1e-10 * folded.max(1.0));
            }
        }
    }

    #[test]
    fn sector_geometry_relation() {
        for t in [-3.0, -1.0, -0.1, 0.2, 1.5, 2.9] {
            let g = SectorGeometry::new(t).unwrap();
            assert_relative_eq!(g.alpha * g.alpha + 1.0, g.delta * g.delta, max_relative = 1e-14);
            assert_eq!(g.delta_signed.signum(), t.signum());
        }
        assert!(SectorGeometry::new(0.0).is_none());
        assert!(SectorGeometry::new(PI).is_none());
    }

    #[test]
    fn q_exact_examples() {
        for t in [0.0, 0.7, -2.0, PI] {
            assert_relative_eq!(sector_radius_exact(Point::I, t, 6.0).unwrap(), 6.0, epsilon = 1e-12);
        }
        let y1: f64 = 1.7;
        let r: f64 = 9.0;
        let closed = (y1 * r.cosh() + (y1 * y1 * r.cosh().powi(2) - y1 * y1).sqrt()).ln();
        let q = sector_radius_exact(pt(0.0, y1), 0.0, r).unwrap();
        assert_relative_eq!(q, closed, epsilon = 1e-13);
        assert!((q - (r + y1.ln())).abs() < 3.0 * (-2.0 * r).exp());
        let q = sector_radius_exact(pt(1.0, 1.0), FRAC_PI_2, 10.0).unwrap();
        assert!((q - bisection_q(Point::I, pt(1.0, 1.0), FRAC_PI_2, 10.0)).abs() < 1e-9);
        assert!(matches!(sector_radius_exact(pt(0.0, 5.0), 0.3, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn q_exit_point_orientation() {
        // t > 0 leaves toward negative real part
        let z1 = pt(0.3, 1.2);
        for t in [0.3, 1.2, 2.8] {
            let q = sector_radius_exact(z1, t, 7.0).unwrap();
            let exit = Point::along_ray(Point::I, NormalizedAngle::from_radians(t), q);
            assert!(exit.x() < 0.0);
            assert_relative_eq!(cosh_distance(z1, exit), 7f64.cosh(), max_relative = 1e-10);
        }
    }

    #[test]
    fn q_is_continuous_across_vertical() {
        let z1 = pt(0.6, 0.8);
        let q0 = sector_radius_exact(z1, 0.0, 12.0).unwrap();
        let qpi = sector_radius_exact(z1, PI, 12.0).unwrap();
        for eps in [1e-6, 1e-8, -1e-8, -1e-6] {
            assert!((sector_radius_exact(z1, eps, 12.0).unwrap() - q0).abs() < 1e-4);
            assert!((sector_radius_exact(z1, PI - eps, 12.0).unwrap() - qpi).abs() < 1e-4);
        }
    }

    #[test]
    fn q_asymptotic_examples() {
        let p = DensityParams::new(Point::I, Point::I);
        assert_relative_eq!(sector_radius_asymptotic(&p, 1.1, 8.0), 8.0, epsilon = 1e-14);
        let p = DensityParams::new(Point::I, pt(0.0, 3.0));
        assert_relative_eq!(sector_radius_asymptotic(&p, 0.0, 8.0), 8.0 + 3f64.ln(), epsilon = 1e-14);
        let p = DensityParams::new(Point::I, pt(1.0, 1.0));
        assert_relative_eq!(p.beta, 3.0);
        assert_relative_eq!(sector_radius_asymptotic(&p, FRAC_PI_2, 8.0), 8.0 + 0.4f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn q_conjugated_frame_matches_direct_bisection() {
        let z0 = pt(0.8, 1.6);
        let z1 = pt(-0.5, 0.9);
        let p = DensityParams::new(z0, z1);
        for j in 0..16 {
            let t = -PI + j as f64 * TAU / 16.0 + 0.05;
            let q = p.sector_radius_exact(t, 9.0).unwrap();
            assert!((q - bisection_q(z0, z1, t, 9.0)).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn angular_radius_from_q_reproduces_shifted_ball() {
        let group = GroupSpec::sl2z();
        let z0 = pt(0.2, 1.4);
        let z1 = pt(-0.6, 0.8);
        let base = pt(0.1, 0.9);
        let r = 200f64.acosh();
        let p = DensityParams::new(z0, z1);
        let direct = enumerate_ball(&BallQuery::shifted(group, z0, z1, base, r.cosh())).unwrap();
        let sector = BallQuery::lattice(group, z0, base, 1.0);
        let outer = (r + distance(z0, z1)).cosh() * 1.001;
        let via = enumerate_with_angular_radius(
            &sector,
            |omega| p.sector_radius_exact(omega.to_signed_radians(), r).unwrap().cosh(),
            outer,
        )
        .unwrap();
        let a: BTreeSet<_> = direct.elements().map(|g| g.entries()).collect();
        let b: BTreeSet<_> = via.elements().map(|g| g.entries()).collect();
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }

    #[test]
    fn theorem3_uniform_and_symmetric_predictions() {
        let g = GroupSpec::sl2z();
        let e = SectorExperiment::new(g, Point::I, Point::I, Point::I, 1e4, 4);
        let r = theorem3_report(&e).unwrap();
        for b in &r.bins {
            assert_relative_eq!(b.predicted.0, 0.25, epsilon = 1e-10);
            assert!(b.diff.0.abs() < 0.02);
        }
        assert_eq!(r.bins.iter().map(|b| b.count).sum::<usize>(), r.total);

        let e = SectorExperiment::new(g, pt(0.0, 2.0), Point::I, Point::I, 1e3, 8);
        let pred = theorem3_report(&e).unwrap().predicted();
        for j in 0..8 {
            assert_relative_eq!(pred[j], pred[(8 - j - 1) % 8], epsilon = 1e-10);
        }

        let e = SectorExperiment::new(g, Point::I, pt(1.0, 1.0), pt(1.0, 1.0), 1e3, 8);
        let pred = theorem3_report(&e).unwrap().predicted();
        assert!(pred[0] < pred[7]);
        assert!(theorem3_report(&SectorExperiment { bins: 1, ..e }).is_err());
    }

    #[test]
    fn theorem2_predictions_are_consistent() {
        let g = GroupSpec::gamma(2).unwrap();
        let e = SectorExperiment::new(g, pt(0.0, 2.0), Point::I, Point::I, 1e3, 6);
        let r = theorem2_report(&e).unwrap();
        assert!(r.max_prediction_gap.unwrap().0 < 1e-9);
        let total: f64 = r.predicted().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        let e = SectorExperiment::new(g, Point::I, Point::I, Point::I, 1e3, 5);
        for b in theorem2_report(&e).unwrap().bins {
            assert_relative_eq!(b.predicted.0, 0.2, epsilon = 1e-10);
        }
    }
}
