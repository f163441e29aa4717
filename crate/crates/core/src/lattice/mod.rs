//! Group descriptors and exact orbit enumeration inside hyperbolic balls.
//!
//! A [`BallQuery`] asks for every `γ ∈ Γ` with `cosh d(center, γ·base) ≤ X`.
//! Angles of the resulting orbit points are measured from a separate
//! `viewpoint`, which covers both the classical count (`center = viewpoint`)
//! and counts ordered by distance to a third point.

mod brute;
mod enumerate;
mod group;

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::format::sig17;
use crate::halfplane::{
    cosh_distance, mobius_apply, normalized_angle_or_zero, point_pair_invariant, NormalizedAngle,
    Point,
};
use crate::{Error, Result};

pub use brute::{brute_force_ball, sufficient_entry_bound};
pub use enumerate::{count_ball, enumerate_ball, enumerate_with_angular_radius, main_term};
pub use group::{make_group, GroupElement, GroupKind, GroupSpec};

/// Default cap on the number of materialized orbit elements.
pub const DEFAULT_BUDGET: usize = 50_000_000;

/// Relative slack applied to floating-point ball membership.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

// Images closer than this (in point-pair invariant) to the viewpoint are
// treated as coinciding with it and get angle 0.
const COINCIDENCE_U: f64 = 1e-20;

#[derive(Clone, Debug, PartialEq)]
pub struct BallQuery {
    pub group: GroupSpec,
    /// Distances are measured from here.
    pub center: Point,
    /// The point moved by the group.
    pub base: Point,
    /// Angles are measured from here.
    pub viewpoint: Point,
    /// Threshold `X = cosh R`.
    pub cosh_threshold: f64,
    pub budget: usize,
}

impl BallQuery {
    pub fn new(
        group: GroupSpec,
        center: Point,
        base: Point,
        viewpoint: Point,
        cosh_threshold: f64,
    ) -> Self {
        BallQuery { group, center, base, viewpoint, cosh_threshold, budget: DEFAULT_BUDGET }
    }

    /// `{γ : d(z₀, γz₁) ≤ R}` with angles seen from `z₀`.
    pub fn lattice(group: GroupSpec, z0: Point, z1: Point, cosh_threshold: f64) -> Self {
        BallQuery::new(group, z0, z1, z0, cosh_threshold)
    }

    /// `{γ : d(z₁, γw) ≤ R}` with angles seen from `z₀`.
    pub fn shifted(group: GroupSpec, z0: Point, z1: Point, w: Point, cosh_threshold: f64) -> Self {
        BallQuery::new(group, z1, w, z0, cosh_threshold)
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_threshold(mut self, cosh_threshold: f64) -> Self {
        self.cosh_threshold = cosh_threshold;
        self
    }

    /// Geodesic radius `R = arcosh X`.
    pub fn radius(&self) -> f64 {
        self.cosh_threshold.acosh()
    }

    pub fn validate(&self) -> Result<()> {
        let x = self.cosh_threshold;
        if !(x.is_finite() && x >= 1.0) {
            return Err(Error::InvalidQuery(format!("cosh threshold {x} must be finite and >= 1")));
        }
        Ok(())
    }

    /// Ball membership is evaluated exactly in integers when both the center
    /// and the moved point are `i`.
    pub(crate) fn exact_integer_mode(&self) -> bool {
        self.center == Point::I && self.base == Point::I
    }
}

/// One orbit element together with its distance and angle data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitRecord {
    pub element: GroupElement,
    pub image: Point,
    pub cosh_dist: f64,
    pub omega: NormalizedAngle,
}

/// The distance and angle of one orbit point, without the matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub cosh_dist: f64,
    pub omega: NormalizedAngle,
}

/// Per-element evaluation shared by the enumerator and the brute-force oracle,
/// so both apply the identical membership predicate.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Evaluator {
    center: Point,
    base: Point,
    viewpoint: Point,
    exact: bool,
    angle_fast_path: bool,
}

impl Evaluator {
    pub(crate) fn new(q: &BallQuery) -> Self {
        Evaluator {
            center: q.center,
            base: q.base,
            viewpoint: q.viewpoint,
            exact: q.exact_integer_mode(),
            angle_fast_path: q.base == Point::I && q.viewpoint == Point::I,
        }
    }

    pub(crate) fn cosh_dist(&self, g: &GroupElement) -> f64 {
        if self.exact {
            let [a, b, c, d] = g.entries().map(|e| e as i128);
            (a * a + b * b + c * c + d * d) as f64 / 2.0
        } else {
            cosh_distance(self.center, mobius_apply(g, self.base))
        }
    }

    pub(crate) fn omega(&self, g: &GroupElement) -> NormalizedAngle {
        if self.angle_fast_path {
            // γi relative to i, with integer numerator and denominator
            let [a, b, c, d] = g.entries().map(|e| e as i128);
            let im = -2 * (a * c + b * d);
            let re = a * a + b * b - c * c - d * d;
            if im == 0 && re == 0 {
                return NormalizedAngle::ZERO;
            }
            return NormalizedAngle::from_radians((im as f64).atan2(re as f64));
        }
        let image = mobius_apply(g, self.base);
        if point_pair_invariant(image, self.viewpoint) < COINCIDENCE_U {
            NormalizedAngle::ZERO
        } else {
            normalized_angle_or_zero(self.viewpoint, image)
        }
    }

    pub(crate) fn admits(&self, cosh_dist: f64, threshold: f64) -> bool {
        admits(self.exact, cosh_dist, threshold)
    }
}

fn admits(exact: bool, cosh_dist: f64, threshold: f64) -> bool {
    if exact {
        cosh_dist <= threshold
    } else {
        cosh_dist <= threshold * (1.0 + BOUNDARY_TOLERANCE)
    }
}

/// Unsorted enumeration output before canonicalization.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Entry {
    pub(crate) m: [i32; 4],
    pub(crate) sample: Sample,
}

impl Entry {
    pub(crate) fn new(g: &GroupElement, eval: &Evaluator, cosh_dist: f64) -> Option<Entry> {
        let mut m = [0i32; 4];
        for (slot, e) in m.iter_mut().zip(g.entries()) {
            *slot = i32::try_from(e).ok()?;
        }
        Some(Entry { m, sample: Sample { cosh_dist, omega: eval.omega(g) } })
    }
}

/// A canonically ordered orbit: ascending `cosh_dist`, ties broken
/// lexicographically on `(a, b, c, d)`.
#[derive(Clone, Debug)]
pub struct Orbit {
    query: BallQuery,
    matrices: Vec<[i32; 4]>,
    samples: Vec<Sample>,
}

impl Orbit {
    pub(crate) fn from_entries(query: BallQuery, mut entries: Vec<Entry>) -> Orbit {
        use rayon::slice::ParallelSliceMut;
        entries.par_sort_unstable_by(|p, q| {
            p.sample.cosh_dist.total_cmp(&q.sample.cosh_dist).then_with(|| p.m.cmp(&q.m))
        });
        let matrices = entries.iter().map(|e| e.m).collect();
        let samples = entries.iter().map(|e| e.sample).collect();
        Orbit { query, matrices, samples }
    }

    pub fn query(&self) -> &BallQuery {
        &self.query
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Number of leading records inside the smaller ball `cosh d ≤ threshold`.
    pub fn prefix_len(&self, threshold: f64) -> usize {
        let exact = self.query.exact_integer_mode();
        self.samples.partition_point(|s| admits(exact, s.cosh_dist, threshold))
    }

    /// Samples of the sub-ball `cosh d ≤ threshold` (a prefix of the orbit).
    pub fn samples_within(&self, threshold: f64) -> &[Sample] {
        &self.samples[..self.prefix_len(threshold)]
    }

    pub fn element(&self, index: usize) -> GroupElement {
        let [a, b, c, d] = self.matrices[index].map(i64::from);
        GroupElement::new_unchecked(a, b, c, d)
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = GroupElement> + '_ {
        (0..self.len()).map(|i| self.element(i))
    }

    pub fn records(&self) -> impl ExactSizeIterator<Item = OrbitRecord> + '_ {
        let base = self.query.base;
        self.samples.iter().enumerate().map(move |(i, s)| {
            let element = self.element(i);
            OrbitRecord {
                element,
                image: mobius_apply(&element, base),
                cosh_dist: s.cosh_dist,
                omega: s.omega,
            }
        })
    }

    /// Writes the orbit as `a,b,c,d,cosh_dist,omega` lines after a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "a,b,c,d,cosh_dist,omega")?;
        for (m, s) in self.matrices.iter().zip(&self.samples) {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                m[0],
                m[1],
                m[2],
                m[3],
                sig17(s.cosh_dist),
                sig17(s.omega.value())
            )?;
        }
        Ok(())
    }

    pub(crate) fn retain(&mut self, mut keep: impl FnMut(&Sample) -> bool) {
        let mut matrices = Vec::new();
        let mut samples = Vec::new();
        for (m, s) in self.matrices.iter().zip(&self.samples) {
            if keep(s) {
                matrices.push(*m);
                samples.push(*s);
            }
        }
        self.matrices = matrices;
        self.samples = samples;
    }
}

/// Main term `κ_Γ·2π·X / vol(Γ\ℍ)` of the count in a ball of cosh-radius `X`.
pub fn main_term_for(group: &GroupSpec, cosh_threshold: f64) -> f64 {
    group.kappa as f64 * 2.0 * PI * cosh_threshold / group.covolume
}
