//! Exhaustive-scan oracle for the ball enumerator.

use super::{BallQuery, Entry, Evaluator, GroupElement, Orbit};
use crate::halfplane::{distance, Point};
use crate::{Error, Result};

/// Entry bound guaranteed to contain the whole ball: by the triangle
/// inequality `d(i, γi) ≤ d(i, center) + R + d(base, i)`, and
/// `a² + b² + c² + d² = 2 cosh d(i, γi)`.
pub fn sufficient_entry_bound(q: &BallQuery) -> i64 {
    let x = q.cosh_threshold * (1.0 + super::BOUNDARY_TOLERANCE);
    let reach = x.acosh() + distance(Point::I, q.center) + distance(Point::I, q.base);
    ((2.0 * reach.cosh()).sqrt() * (1.0 + 1e-9)).floor() as i64 + 1
}

/// Same contract as [`super::enumerate_ball`], by scanning every integer
/// quadruple with entries bounded by `entry_bound`.
pub fn brute_force_ball(q: &BallQuery, entry_bound: i64) -> Result<Orbit> {
    q.validate()?;
    let eval = Evaluator::new(q);
    let range = -entry_bound..=entry_bound;
    let mut entries = Vec::new();
    for a in range.clone() {
        for b in range.clone() {
            for c in range.clone() {
                for d in range.clone() {
                    if a * d - b * c != 1 {
                        continue;
                    }
                    let g = GroupElement::new_unchecked(a, b, c, d);
                    if !q.group.contains(&g) {
                        continue;
                    }
                    let cosh = eval.cosh_dist(&g);
                    if !eval.admits(cosh, q.cosh_threshold) {
                        continue;
                    }
                    if entries.len() >= q.budget {
                        return Err(Error::BudgetExceeded { budget: q.budget });
                    }
                    entries.push(Entry::new(&g, &eval, cosh).ok_or(Error::EntryOverflow)?);
                }
            }
        }
    }
    Ok(Orbit::from_entries(q.clone(), entries))
}
