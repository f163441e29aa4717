//! Angular statistics of orbit samples.
//!
//! All functions take slices so that sums can be evaluated with the fixed
//! chunking of [`crate::parallel::deterministic_sum`]; results are therefore
//! identical for any worker count.
//!
//! Exponential sums use `e(nω)` with the crate's angle convention. Sums
//! written with polar angles, `e(nφ/π)`, differ by the factor `(−1)ⁿ` and
//! have the same magnitude.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::slice::ParallelSliceMut;
use serde::Serialize;

use crate::format::Sig17;
use crate::halfplane::{NormalizedAngle, Point};
use crate::lattice::{main_term_for, GroupSpec, Orbit, OrbitRecord, Sample, BOUNDARY_TOLERANCE};
use crate::parallel::deterministic_sum;
use crate::{Error, Result};

pub trait HasAngle {
    fn angle(&self) -> NormalizedAngle;
}

pub trait HasDistance: HasAngle {
    fn cosh_dist(&self) -> f64;
}

impl HasAngle for NormalizedAngle {
    fn angle(&self) -> NormalizedAngle {
        *self
    }
}

impl HasAngle for Sample {
    fn angle(&self) -> NormalizedAngle {
        self.omega
    }
}

impl HasDistance for Sample {
    fn cosh_dist(&self) -> f64 {
        self.cosh_dist
    }
}

impl HasAngle for OrbitRecord {
    fn angle(&self) -> NormalizedAngle {
        self.omega
    }
}

impl HasDistance for OrbitRecord {
    fn cosh_dist(&self) -> f64 {
        self.cosh_dist
    }
}

/// An arc of `ℝ/ℤ` starting at `start`, wrapping around `1 ≡ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct AngleInterval {
    pub start: NormalizedAngle,
    pub length: f64,
}

impl AngleInterval {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= 1.0) || !start.is_finite() {
            return Err(Error::InvalidQuery(format!(
                "interval length {length} must lie in (0, 1]"
            )));
        }
        Ok(AngleInterval { start: NormalizedAngle::new(start), length })
    }

    pub fn full() -> Self {
        AngleInterval { start: NormalizedAngle::ZERO, length: 1.0 }
    }

    pub fn contains(&self, omega: NormalizedAngle) -> bool {
        self.length >= 1.0 || (omega - self.start).value() < self.length
    }

    /// The complementary arc; `None` for the full circle.
    pub fn complement(&self) -> Option<AngleInterval> {
        (self.length < 1.0).then(|| AngleInterval {
            start: NormalizedAngle::new(self.start.value() + self.length),
            length: 1.0 - self.length,
        })
    }
}

/// Number of samples whose angle lies in `interval`.
pub fn sector_count<T: HasAngle + Sync>(samples: &[T], interval: &AngleInterval) -> usize {
    deterministic_sum(samples, 0usize, |s| interval.contains(s.angle()) as usize)
}

fn e(x: f64) -> Complex64 {
    Complex64::cis(TAU * x)
}

/// `S_n = Σ e(nω)`; `S_0` is the count.
pub fn exponential_sum<T: HasAngle + Sync>(samples: &[T], n: i64) -> Complex64 {
    if n == 0 {
        return Complex64::new(samples.len() as f64, 0.0);
    }
    let nf = n as f64;
    // fract keeps the sign, so S_{−n} is the exact conjugate of S_n
    deterministic_sum(samples, Complex64::new(0.0, 0.0), |s| e((nf * s.angle().value()).fract()))
}

/// Star discrepancy of the angles with respect to anchored arcs `[0, x)`.
///
/// The discrepancy over all arcs of `ℝ/ℤ` is at most twice this value.
pub fn star_discrepancy<I>(omegas: I) -> Result<f64>
where
    I: IntoIterator,
    I::Item: HasAngle,
{
    let mut v: Vec<f64> = omegas.into_iter().map(|w| w.angle().value()).collect();
    if v.is_empty() {
        return Err(Error::InsufficientData("star discrepancy of an empty set".into()));
    }
    v.par_sort_unstable_by(f64::total_cmp);
    let n = v.len() as f64;
    let worst = v.iter().enumerate().fold(0.0f64, |acc, (i, &w)| {
        let i = i as f64;
        acc.max((i + 1.0) / n - w).max(w - i / n)
    });
    Ok(worst)
}

/// Constants of the Erdős–Turán inequality
/// `D ≤ c₁/(M+1) + c₂ Σ_{m≤M} |S_m|/(mN)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErdosTuranConstants {
    pub c1: f64,
    pub c2: f64,
}

impl Default for ErdosTuranConstants {
    fn default() -> Self {
        ErdosTuranConstants { c1: 6.0, c2: 4.0 / PI }
    }
}

pub fn erdos_turan_bound<T: HasAngle + Sync>(samples: &[T], max_frequency: u32) -> Result<f64> {
    erdos_turan_bound_with(samples, max_frequency, ErdosTuranConstants::default())
}

pub fn erdos_turan_bound_with<T: HasAngle + Sync>(
    samples: &[T],
    max_frequency: u32,
    constants: ErdosTuranConstants,
) -> Result<f64> {
    if max_frequency < 1 {
        return Err(Error::InvalidQuery("Erdős–Turán needs M >= 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::InsufficientData("Erdős–Turán bound of an empty set".into()));
    }
    let n = samples.len() as f64;
    let tail: f64 = (1..=max_frequency)
        .map(|m| exponential_sum(samples, m as i64).norm() / (m as f64 * n))
        .sum();
    Ok(constants.c1 / (max_frequency as f64 + 1.0) + constants.c2 * tail)
}

/// Least-squares fit of `log|error|` against `log X`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub rows_used: usize,
}

pub fn fit_decay_exponent(rows: &[(f64, f64)]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(x, err)| *x > 0.0 && x.is_finite() && err.is_finite() && *err != 0.0)
        .map(|(x, err)| (x.ln(), err.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable rows, need at least 3",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all thresholds coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - exponent * p.0).powi(2)).sum();
    Ok(DecayFit { exponent, intercept, residual: (sse / n).sqrt(), rows_used: pts.len() })
}

/// `Σ_{cosh d ≤ X} e(nω)/cosh(d)^s`, plus for `n = 0` the tail
/// `c·X^{1−s}/(s−1)` with `c = κ_Γ·2π/vol(Γ\ℍ)` from the lattice main term.
pub fn g_series_partial<T: HasDistance + Sync>(
    samples: &[T],
    n: i64,
    s: f64,
    cosh_threshold: f64,
    group: &GroupSpec,
) -> Result<Complex64> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("G_n(z, s) needs s > 1, got {s}")));
    }
    let limit = cosh_threshold * (1.0 + BOUNDARY_TOLERANCE);
    let nf = n as f64;
    let head = deterministic_sum(samples, Complex64::new(0.0, 0.0), |r| {
        let x = r.cosh_dist();
        if x > limit {
            return Complex64::new(0.0, 0.0);
        }
        let weight = x.powf(-s);
        if n == 0 {
            Complex64::new(weight, 0.0)
        } else {
            e((nf * r.angle().value()).fract()) * weight
        }
    });
    if n != 0 {
        return Ok(head);
    }
    let c = main_term_for(group, 1.0);
    Ok(head + c * cosh_threshold.powf(1.0 - s) / (s - 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidistributionRow {
    #[serde(rename = "X")]
    pub threshold: Sig17,
    #[serde(rename = "N")]
    pub total: usize,
    #[serde(rename = "N_I")]
    pub in_interval: usize,
    /// `N_I/N − |I|`; `null` when the ball is empty.
    pub error: Sig17,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalJson {
    pub start: Sig17,
    pub length: Sig17,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidistributionReport {
    pub group: String,
    pub z0: [Sig17; 2],
    pub z1: [Sig17; 2],
    pub interval: IntervalJson,
    pub rows: Vec<EquidistributionRow>,
    pub fitted_exponent: Option<Sig17>,
    pub residual: Option<Sig17>,
}

pub(crate) fn point_json(p: Point) -> [Sig17; 2] {
    [Sig17(p.x()), Sig17(p.y())]
}

/// Sector errors `N_I/N − |I|` over nested sub-balls of one enumerated orbit.
pub fn equidistribution_report(
    orbit: &Orbit,
    thresholds: &[f64],
    interval: &AngleInterval,
) -> Result<EquidistributionReport> {
    let q = orbit.query();
    let mut rows = Vec::with_capacity(thresholds.len());
    let mut fit_rows = Vec::with_capacity(thresholds.len());
    for &x in thresholds {
        if x > q.cosh_threshold {
            return Err(Error::InvalidQuery(format!(
                "threshold {x} exceeds the enumerated radius {}",
                q.cosh_threshold
            )));
        }
        let samples = orbit.samples_within(x);
        let total = samples.len();
        let in_interval = sector_count(samples, interval);
        let error = if total == 0 {
            f64::NAN
        } else {
            in_interval as f64 / total as f64 - interval.length.min(1.0)
        };
        fit_rows.push((x, error));
        rows.push(EquidistributionRow {
            threshold: Sig17(x),
            total,
            in_interval,
            error: Sig17(error),
        });
    }
    let fit = fit_decay_exponent(&fit_rows).ok();
    Ok(EquidistributionReport {
        group: q.group.to_string(),
        z0: point_json(q.viewpoint),
        z1: point_json(q.base),
        interval: IntervalJson {
            start: Sig17(interval.start.value()),
            length: Sig17(interval.length),
        },
        rows,
        fitted_exponent: fit.map(|f| Sig17(f.exponent)),
        residual: fit.map(|f| Sig17(f.residual)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_ball, BallQuery};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn angles(v: &[f64]) -> Vec<NormalizedAngle> {
        v.iter().map(|&w| NormalizedAngle::new(w)).collect()
    }

    /// Brute-force star discrepancy: sup over x of |#{ω < x}/N − x|, with
    /// the supremum attained at (or just after) a sample point.
    fn star_discrepancy_oracle(v: &[f64]) -> f64 {
        let n = v.len() as f64;
        let mut worst = 0.0f64;
        for &x in v.iter().chain(std::iter::once(&1.0)) {
            let below = v.iter().filter(|&&w| w < x).count() as f64;
            let at_or_below = v.iter().filter(|&&w| w <= x).count() as f64;
            worst = worst.max((below / n - x).abs()).max((at_or_below / n - x).abs());
        }
        worst
    }

    #[test]
    fn interval_membership_wraps() {
        let i = AngleInterval::new(0.9, 0.2).unwrap();
        assert!(i.contains(NormalizedAngle::new(0.95)));
        assert!(i.contains(NormalizedAngle::new(0.05)));
        assert!(!i.contains(NormalizedAngle::new(0.12)));
        assert!(!i.contains(NormalizedAngle::new(0.5)));
        assert!(AngleInterval::full().contains(NormalizedAngle::new(0.123)));
        assert!(AngleInterval::new(0.0, 0.0).is_err());
        assert!(AngleInterval::new(0.0, 1.5).is_err());
    }

    #[test]
    fn sector_count_examples() {
        let v = angles(&[0.0, 0.1, 0.3, 0.5, 0.65, 0.99]);
        assert_eq!(sector_count(&v, &AngleInterval::full()), v.len());
        let i = AngleInterval::new(0.2, 0.5).unwrap();
        let c = i.complement().unwrap();
        assert_eq!(sector_count(&v, &i) + sector_count(&v, &c), v.len());
        assert_eq!(sector_count(&v, &i), 3);
    }

    #[test]
    fn exponential_sum_examples() {
        let v = angles(&[0.1, 0.4, 0.77]);
        assert_eq!(exponential_sum(&v, 0), Complex64::new(3.0, 0.0));
        let one = exponential_sum(&angles(&[0.25]), 1);
        assert!(one.re.abs() < 1e-15 && (one.im - 1.0).abs() < 1e-15);
        let s = exponential_sum(&v, 3);
        assert_eq!(exponential_sum(&v, -3), s.conj());
        assert!(s.norm() <= 3.0);
    }

    #[test]
    fn star_discrepancy_examples() {
        assert_eq!(star_discrepancy(angles(&[0.0, 0.25, 0.5, 0.75])).unwrap(), 0.25);
        assert_eq!(star_discrepancy(angles(&[0.5])).unwrap(), 0.5);
        let n = 37;
        let lattice: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
        assert_relative_eq!(star_discrepancy(angles(&lattice)).unwrap(), 1.0 / n as f64, epsilon = 1e-15);
        assert!(star_discrepancy(Vec::<NormalizedAngle>::new()).is_err());
    }

    #[test]
    fn star_discrepancy_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..60);
            let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            assert_relative_eq!(
                star_discrepancy(angles(&v)).unwrap(),
                star_discrepancy_oracle(&v),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn erdos_turan_examples() {
        let n = 64;
        let lattice = angles(&(0..n).map(|k| k as f64 / n as f64).collect::<Vec<_>>());
        let b = erdos_turan_bound(&lattice, 10).unwrap();
        assert_relative_eq!(b, 6.0 / 11.0, epsilon = 1e-12);
        let single = angles(&[0.3]);
        assert_relative_eq!(erdos_turan_bound(&single, 1).unwrap(), 3.0 + 4.0 / PI, epsilon = 1e-14);
        assert!(erdos_turan_bound(&single, 0).is_err());
        assert!(erdos_turan_bound(&Vec::<NormalizedAngle>::new(), 3).is_err());
    }

    #[test]
    fn erdos_turan_dominates_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..400);
            let skew: f64 = rng.gen_range(0.2..3.0);
            let v = angles(&(0..n).map(|_| rng.gen::<f64>().powf(skew)).collect::<Vec<_>>());
            let d = star_discrepancy(v.iter().copied()).unwrap();
            assert!(erdos_turan_bound(&v, 50).unwrap() >= d);
        }
    }

    #[test]
    fn decay_fit_examples() {
        let rows: Vec<_> = [1e2, 1e3, 1e4, 1e5].iter().map(|&x: &f64| (x, x.powf(-1.0 / 3.0))).collect();
        let fit = fit_decay_exponent(&rows).unwrap();
        assert!((fit.exponent + 1.0 / 3.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let flat: Vec<_> = [1e2, 1e3, 1e4].iter().map(|&x| (x, 0.01)).collect();
        assert!(fit_decay_exponent(&flat).unwrap().exponent.abs() < 1e-15);
        let short = [(1e3, 0.1), (1e4, 0.0), (1e5, 0.01)];
        assert!(matches!(fit_decay_exponent(&short), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn g_series_examples() {
        let g = GroupSpec::sl2z();
        let c = 12.0;
        let identity = [Sample { cosh_dist: 1.0, omega: NormalizedAngle::ZERO }];
        let v = g_series_partial(&identity, 0, 2.0, 1.0, &g).unwrap();
        assert_relative_eq!(v.re, 1.0 + c, epsilon = 1e-12);
        let v = g_series_partial(&identity, 1, 2.0, 1.0, &g).unwrap();
        assert_relative_eq!(v.re, 1.0, epsilon = 1e-15);
        assert!(g_series_partial(&identity, 0, 1.0, 1.0, &g).is_err());
    }

    #[test]
    fn g_series_decreasing_in_s() {
        let q = BallQuery::lattice(GroupSpec::sl2z(), Point::I, Point::new(0.2, 1.1).unwrap(), 200.0);
        let o = enumerate_ball(&q).unwrap();
        let mut prev = f64::INFINITY;
        for s in [1.05, 1.2, 1.5, 2.0, 3.0] {
            let v = g_series_partial(o.samples(), 0, s, 200.0, &q.group).unwrap().re;
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn sl2z_halves() {
        let q = BallQuery::lattice(GroupSpec::sl2z(), Point::I, Point::I, 1e4);
        let o = enumerate_ball(&q).unwrap();
        let half = AngleInterval::new(0.0, 0.5).unwrap();
        let frac = sector_count(o.samples(), &half) as f64 / o.len() as f64;
        assert!((frac - 0.5).abs() < 0.02, "fraction {frac}");
    }

    #[test]
    fn report_shape() {
        let q = BallQuery::lattice(GroupSpec::sl2z(), Point::I, Point::I, 1e3);
        let o = enumerate_ball(&q).unwrap();
        let r = equidistribution_report(&o, &[10.0, 100.0, 1e3], &AngleInterval::full()).unwrap();
        assert!(r.rows.iter().all(|row| row.error.0 == 0.0));
        assert!(r.fitted_exponent.is_none());
        let r = equidistribution_report(&o, &[1e3], &AngleInterval::new(0.0, 0.25).unwrap()).unwrap();
        assert!(r.fitted_exponent.is_none());
        let json = serde_json::to_value(&r).unwrap();
        for key in ["group", "z0", "z1", "interval", "rows", "fitted_exponent", "residual"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert!(equidistribution_report(&o, &[2e3], &AngleInterval::full()).is_err());
    }

    proptest! {
        #[test]
        fn sums_bounded_and_conjugate(v in prop::collection::vec(0.0f64..1.0, 1..200), n in 1i64..20) {
            let v = angles(&v);
            let s = exponential_sum(&v, n);
            prop_assert!(s.norm() <= v.len() as f64 * (1.0 + 1e-12));
            prop_assert_eq!(exponential_sum(&v, -n), s.conj());
        }

        #[test]
        fn sector_counts_are_additive(
            v in prop::collection::vec(0.0f64..1.0, 1..200),
            start in 0.0f64..1.0, l1 in 0.01f64..0.45, l2 in 0.01f64..0.45,
        ) {
            let v = angles(&v);
            let i1 = AngleInterval::new(start, l1).unwrap();
            let i2 = AngleInterval::new(start + l1, l2).unwrap();
            let joined = AngleInterval::new(start, l1 + l2).unwrap();
            let split = sector_count(&v, &i1) + sector_count(&v, &i2);
            // floating rounding of the shared endpoint can move single boundary samples
            let whole = sector_count(&v, &joined);
            prop_assert!(split.abs_diff(whole) <= 1);
        }

        #[test]
        fn rotation_covariance(
            k in prop::collection::vec(0u32..1024, 1..200), shift in 0u32..1024,
            start in 0u32..1024, len in 1u32..1024,
        ) {
            // dyadic angles make every shift exact
            let f = |x: u32| x as f64 / 1024.0;
            let v: Vec<_> = k.iter().map(|&x| NormalizedAngle::new(f(x))).collect();
            let moved: Vec<_> = k.iter().map(|&x| NormalizedAngle::new(f(x) + f(shift))).collect();
            let i = AngleInterval::new(f(start), f(len)).unwrap();
            let j = AngleInterval::new(f(start) + f(shift), f(len)).unwrap();
            prop_assert_eq!(sector_count(&v, &i), sector_count(&moved, &j));
        }

        #[test]
        fn discrepancy_in_unit_interval(v in prop::collection::vec(0.0f64..1.0, 1..300)) {
            let d = star_discrepancy(angles(&v)).unwrap();
            prop_assert!(d > 0.0 && d <= 1.0);
        }
    }
}
