//! Coset-based ball enumeration.
//!
//! Every `γ ∈ SL(2,ℤ)` with bottom row `(c, d)` is `Tᵗ·γ₀` for a fixed
//! solution `γ₀` of `a₀d − b₀c = 1`, and `Tᵗγ₀·z = γ₀·z + t`. Along such a
//! coset the ball condition is a quadratic inequality in `t`, so each
//! coprime bottom row contributes one integer interval of `t`. Bottom rows
//! are pruned by `Im(γ·base) ≥ y_center / (X + √(X² − 1))`.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{main_term_for, BallQuery, Entry, Evaluator, GroupElement, Orbit, Sample};
use crate::halfplane::{mobius_apply, NormalizedAngle};
use crate::{Error, Result};

// Slack for the floating-point pruning bounds; exact membership is decided
// per element by the evaluator.
const PRUNE_SLACK: f64 = 1e-9;

/// `(g, x, y)` with `a·x + b·y = g ≥ 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

struct Shared<'q> {
    query: &'q BallQuery,
    eval: Evaluator,
    level: i64,
    /// Widened threshold used only for pruning.
    prune_x: f64,
    /// Upper bound on `|c·base + d|²`.
    bottom_row_bound: f64,
    count: AtomicUsize,
    over_budget: AtomicBool,
    overflow: AtomicBool,
}

impl Shared<'_> {
    fn push(&self, out: &mut Vec<Entry>, g: &GroupElement, cosh: f64) {
        if self.count.fetch_add(1, Ordering::Relaxed) >= self.query.budget {
            self.over_budget.store(true, Ordering::Relaxed);
            return;
        }
        match Entry::new(g, &self.eval, cosh) {
            Some(e) => out.push(e),
            None => self.overflow.store(true, Ordering::Relaxed),
        }
    }

    fn stopped(&self) -> bool {
        self.over_budget.load(Ordering::Relaxed) || self.overflow.load(Ordering::Relaxed)
    }

    fn row(&self, c: i64) -> Vec<Entry> {
        let mut out = Vec::new();
        let base = self.query.base;
        let cy = c as f64 * base.y();
        let rem = self.bottom_row_bound - cy * cy;
        if rem < 0.0 {
            return out;
        }
        let mid = -(c as f64) * base.x();
        let half = rem.sqrt();
        let d_lo = (mid - half).floor() as i64 - 1;
        let d_hi = (mid + half).ceil() as i64 + 1;
        for d in d_lo..=d_hi {
            if self.stopped() {
                break;
            }
            if self.level > 1 && d.rem_euclid(self.level) != 1 {
                continue;
            }
            let (g, x, y) = ext_gcd(d, c);
            if g != 1 {
                continue;
            }
            // x·d + y·c = 1, so a₀ = x, b₀ = −y
            self.coset(&mut out, x, -y, c, d);
        }
        out
    }

    fn coset(&self, out: &mut Vec<Entry>, a0: i64, b0: i64, c: i64, d: i64) {
        let start = GroupElement::new_unchecked(a0, b0, c, d);
        let z = mobius_apply(&start, self.query.base);
        let center = self.query.center;
        let disc = 2.0 * z.y() * center.y() * (self.prune_x - 1.0) - (z.y() - center.y()).powi(2);
        if disc < 0.0 {
            return;
        }
        let shift = center.x() - z.x();
        let half = disc.sqrt();
        let mut t = (shift - half).floor() as i64 - 1;
        let t_hi = (shift + half).ceil() as i64 + 1;
        let step = if self.level > 1 {
            // a ≡ 1 already; b = b₀ + t·d ≡ b₀ + t (mod N) must vanish
            t += (-b0 - t).rem_euclid(self.level);
            self.level
        } else {
            1
        };
        while t <= t_hi {
            let g = GroupElement::new_unchecked(a0 + t * c, b0 + t * d, c, d);
            if self.query.group.contains(&g) {
                let cosh = self.eval.cosh_dist(&g);
                if self.eval.admits(cosh, self.query.cosh_threshold) {
                    self.push(out, &g, cosh);
                }
            }
            t += step;
        }
    }
}

/// All `γ ∈ Γ` with `cosh d(center, γ·base) ≤ X`, canonically ordered.
pub fn enumerate_ball(q: &BallQuery) -> Result<Orbit> {
    q.validate()?;
    let x = q.cosh_threshold;
    let prune_x = x * (1.0 + PRUNE_SLACK) + PRUNE_SLACK;
    let (yb, yc) = (q.base.y(), q.center.y());
    let bottom_row_bound =
        yb * (prune_x + (prune_x * prune_x - 1.0).sqrt()) / yc * (1.0 + PRUNE_SLACK);
    let shared = Shared {
        query: q,
        eval: Evaluator::new(q),
        level: q.group.level() as i64,
        prune_x,
        bottom_row_bound,
        count: AtomicUsize::new(0),
        over_budget: AtomicBool::new(false),
        overflow: AtomicBool::new(false),
    };
    let c_max = (bottom_row_bound.sqrt() / yb).floor() as i64 + 1;
    let level = shared.level;
    let rows: Vec<i64> = (-c_max..=c_max).filter(|c| c.rem_euclid(level) == 0).collect();
    let entries: Vec<Entry> = rows
        .into_par_iter()
        .flat_map_iter(|c| if shared.stopped() { Vec::new() } else { shared.row(c) })
        .collect();
    if shared.over_budget.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded { budget: q.budget });
    }
    if shared.overflow.load(Ordering::Relaxed) {
        return Err(Error::EntryOverflow);
    }
    Ok(Orbit::from_entries(q.clone(), entries))
}

pub fn count_ball(q: &BallQuery) -> Result<usize> {
    enumerate_ball(q).map(|o| o.len())
}

pub fn main_term(q: &BallQuery) -> f64 {
    main_term_for(&q.group, q.cosh_threshold)
}

/// Elements with `cosh d(center, γ·base) ≤ radius(ω(γ))`, where the radius
/// function (in cosh units) is bounded by `max_cosh_radius`.
pub fn enumerate_with_angular_radius(
    q: &BallQuery,
    radius: impl Fn(NormalizedAngle) -> f64,
    max_cosh_radius: f64,
) -> Result<Orbit> {
    let outer = q.clone().with_threshold(max_cosh_radius);
    let mut orbit = enumerate_ball(&outer)?;
    let exact = outer.exact_integer_mode();
    let mut violation = None;
    orbit.retain(|s: &Sample| {
        let r = radius(s.omega);
        if r > max_cosh_radius * (1.0 + super::BOUNDARY_TOLERANCE) {
            violation = Some(r);
        }
        super::admits(exact, s.cosh_dist, r)
    });
    if let Some(r) = violation {
        return Err(Error::InvalidQuery(format!(
            "radius function value {r} exceeds the bound {max_cosh_radius}"
        )));
    }
    Ok(orbit)
}
