//! Geometry of the upper half-plane.
//!
//! Angles follow one convention throughout the crate: the normalized angle
//! `ω ∈ ℝ/ℤ` of a target seen from an observation point is the angle from
//! the upward vertical ray to the initial direction of the geodesic toward
//! the target, divided by `2π`, with positive orientation toward decreasing
//! real part. Geodesic polar coordinates `(r, φ)` about `i` are related by
//! `ω = φ/π − 1/2 (mod 1)`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::GroupElement;
use crate::{Error, Result};

/// A point `x + iy` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    x: f64,
    y: f64,
}

impl Point {
    /// The point `i`.
    pub const I: Point = Point { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && y > 0.0 {
            Ok(Point { x, y })
        } else {
            Err(Error::InvalidPoint { x, y })
        }
    }

    /// Construct without validation; callers guarantee `y > 0`.
    pub(crate) fn new_unchecked(x: f64, y: f64) -> Self {
        debug_assert!(y > 0.0, "non-positive imaginary part {y}");
        Point { x, y }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Squared modulus `x² + y²`.
    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Image under the affine conjugator `z ↦ (z − x₀)/y₀` sending `origin` to `i`.
    pub fn to_frame(self, origin: Point) -> Point {
        Point::new_unchecked((self.x - origin.x) / origin.y, self.y / origin.y)
    }

    /// Inverse of [`Point::to_frame`].
    pub fn from_frame(self, origin: Point) -> Point {
        Point::new_unchecked(origin.x + origin.y * self.x, origin.y * self.y)
    }

    /// The point at hyperbolic distance `s` from `origin` along the geodesic
    /// ray leaving `origin` in direction `omega`.
    pub fn along_ray(origin: Point, omega: NormalizedAngle, s: f64) -> Point {
        let phi = (omega.value() * PI + PI / 2.0).rem_euclid(PI);
        let at_i = from_polar(GeodesicPolar { r: s.max(0.0), phi });
        at_i.from_frame(origin)
    }
}

impl TryFrom<[f64; 2]> for Point {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.x, self.y)
    }
}

/// Geodesic polar coordinates about `i`: `z = k(φ)·(e^{−r} i)` where `k(φ)` is
/// the rotation `[[cos φ, sin φ], [−sin φ, cos φ]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicPolar {
    pub r: f64,
    pub phi: f64,
}

impl GeodesicPolar {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if r.is_finite() && r >= 0.0 && (0.0..PI).contains(&phi) {
            Ok(GeodesicPolar { r, phi })
        } else {
            Err(Error::InvalidPolar { r, phi })
        }
    }
}

/// A point of `ℝ/ℤ`, stored as its representative in `[0, 1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct NormalizedAngle(f64);

impl NormalizedAngle {
    pub const ZERO: NormalizedAngle = NormalizedAngle(0.0);

    pub fn new(value: f64) -> Self {
        let v = value.rem_euclid(1.0);
        // rem_euclid of a tiny negative number rounds up to 1.0
        NormalizedAngle(if v >= 1.0 { 0.0 } else { v })
    }

    /// Angle `θ` in radians, taken mod `2π`.
    pub fn from_radians(theta: f64) -> Self {
        NormalizedAngle::new(theta / TAU)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Radian representative in `(−π, π]`.
    pub fn to_signed_radians(self) -> f64 {
        if self.0 > 0.5 {
            TAU * (self.0 - 1.0)
        } else {
            TAU * self.0
        }
    }
}

impl From<f64> for NormalizedAngle {
    fn from(v: f64) -> Self {
        NormalizedAngle::new(v)
    }
}

impl From<NormalizedAngle> for f64 {
    fn from(a: NormalizedAngle) -> Self {
        a.0
    }
}

impl std::ops::Add for NormalizedAngle {
    type Output = NormalizedAngle;

    fn add(self, rhs: Self) -> Self {
        NormalizedAngle::new(self.0 + rhs.0)
    }
}

impl std::ops::Sub for NormalizedAngle {
    type Output = NormalizedAngle;

    fn sub(self, rhs: Self) -> Self {
        NormalizedAngle::new(self.0 - rhs.0)
    }
}

impl std::ops::Neg for NormalizedAngle {
    type Output = NormalizedAngle;

    fn neg(self) -> Self {
        NormalizedAngle::new(-self.0)
    }
}

/// `g·z = (az + b)/(cz + d)` for an integer unimodular `g`.
pub fn mobius_apply(g: &GroupElement, z: Point) -> Point {
    let [a, b, c, d] = g.entries().map(|e| e as f64);
    let cx_d = c * z.x + d;
    let cy = c * z.y;
    let denom = cx_d * cx_d + cy * cy;
    let re = ((a * z.x + b) * cx_d + a * cy * z.y) / denom;
    Point::new_unchecked(re, z.y / denom)
}

/// Möbius action of a real matrix of determinant 1.
pub fn mobius_apply_real(m: [[f64; 2]; 2], z: Point) -> Point {
    let w = z.to_complex();
    let image = (m[0][0] * w + m[0][1]) / (m[1][0] * w + m[1][1]);
    Point::new_unchecked(image.re, image.im)
}

/// `u(z, w) = |z − w|² / (4 Im z Im w)`.
pub fn point_pair_invariant(z: Point, w: Point) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    (dx * dx + dy * dy) / (4.0 * (z.y * w.y))
}

/// `cosh d(z, w) = 1 + 2u(z, w)`.
pub fn cosh_distance(z: Point, w: Point) -> f64 {
    1.0 + 2.0 * point_pair_invariant(z, w)
}

/// Hyperbolic distance, via `sinh(d/2) = √u` which stays accurate near zero.
pub fn distance(z: Point, w: Point) -> f64 {
    2.0 * point_pair_invariant(z, w).sqrt().asinh()
}

pub fn from_polar(p: GeodesicPolar) -> Point {
    let (s, c) = p.phi.sin_cos();
    let rho = (-p.r).exp();
    // k(φ)·(iρ) = (s + icρ)/(c − isρ), expanded to avoid complex division
    let denom = c * c + s * s * rho * rho;
    Point::new_unchecked(s * c * (1.0 - rho * rho) / denom, rho / denom)
}

pub fn to_polar(z: Point) -> GeodesicPolar {
    let u = point_pair_invariant(z, Point::I);
    if u == 0.0 {
        return GeodesicPolar { r: 0.0, phi: 0.0 };
    }
    let r = 2.0 * u.sqrt().asinh();
    // arg of the disk coordinate (z − i)/(z + i) equals π + 2φ
    let theta = (-2.0 * z.x).atan2(z.x * z.x + (z.y - 1.0) * (z.y + 1.0));
    let mut phi = (theta + PI) / 2.0;
    if phi >= PI {
        phi -= PI;
    }
    GeodesicPolar { r, phi: phi.max(0.0) }
}

/// Normalized angle at `z0` of the geodesic ray toward `target`.
pub fn normalized_angle(z0: Point, target: Point) -> Result<NormalizedAngle> {
    if z0 == target {
        return Err(Error::DegenerateAngle);
    }
    Ok(normalized_angle_or_zero(z0, target))
}

/// As [`normalized_angle`], assigning `0` when `target == z0`.
pub fn normalized_angle_or_zero(z0: Point, target: Point) -> NormalizedAngle {
    let dx = target.x - z0.x;
    // arg((t − z₀)·conj(t − z̄₀)); the affine map to the frame of z₀ preserves it
    let im = -2.0 * z0.y * dx;
    let re = dx * dx + (target.y - z0.y) * (target.y + z0.y);
    if im == 0.0 && re == 0.0 {
        return NormalizedAngle::ZERO;
    }
    NormalizedAngle::from_radians(im.atan2(re))
}

/// Undirected line angle: `2πω` reduced mod `π` into `[−π/2, π/2)`.
pub fn fold_to_line_angle(omega: NormalizedAngle) -> f64 {
    let mut v = (2.0 * omega.value()).fract();
    if v >= 0.5 {
        v -= 1.0;
    }
    PI * v
}
