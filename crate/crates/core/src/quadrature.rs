//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 48;

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1)
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1)
}

/// `∫_a^b f` to absolute tolerance `tol` (for smooth integrands).
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    refine(&f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)
}

/// As [`adaptive_simpson`], after splitting `[a, b]` at the given interior
/// points and into at least `min_pieces` equal parts.
pub fn integrate_split(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    min_pieces: usize,
    tol: f64,
) -> f64 {
    let pieces = min_pieces.max(1);
    let mut nodes: Vec<f64> = (0..=pieces).map(|k| a + (b - a) * k as f64 / pieces as f64).collect();
    nodes.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let share = tol / (nodes.len() - 1).max(1) as f64;
    nodes.windows(2).map(|w| adaptive_simpson(&f, w[0], w[1], share)).sum()
}
