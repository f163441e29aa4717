//! One function per subcommand.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use anyhow::Result;
use orbit_angles::angular::{
    equidistribution_report, erdos_turan_bound, exponential_sum, g_series_partial,
    star_discrepancy,
};
use orbit_angles::density::{
    eta, k_theta, rho, sector_radius_asymptotic, theorem2_report, theorem3_report, DensityParams,
    SectorExperiment, SectorReport,
};
use orbit_angles::format::Sig17;
use orbit_angles::lattice::{enumerate_ball, main_term, BallQuery, Orbit};
use orbit_angles::{NormalizedAngle, Point};
use serde::Serialize;

use crate::config::{ConfigError, Experiment, Format};
use crate::output::{emit, write_json, Cell, Table};

fn orbit(e: &Experiment) -> Result<Orbit> {
    let q = BallQuery::lattice(e.group, e.z0, e.z1, e.max_threshold()).with_budget(e.budget);
    Ok(enumerate_ball(&q)?)
}

fn point_json(p: Point) -> [Sig17; 2] {
    [Sig17(p.x()), Sig17(p.y())]
}

fn emit_table(e: &Experiment, table: &Table) -> Result<()> {
    match e.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(e.path.as_deref(), |out| table.write_csv(out)),
        Format::Json => emit(e.path.as_deref(), |out| write_json(out, table)),
    }
}

fn emit_report<T: Serialize>(e: &Experiment, report: &T, rows: impl FnOnce() -> Table) -> Result<()> {
    match e.format.unwrap_or(Format::Json) {
        Format::Json => emit(e.path.as_deref(), |out| write_json(out, report)),
        Format::Csv => {
            let table = rows();
            emit(e.path.as_deref(), |out| table.write_csv(out))
        }
    }
}

pub fn enumerate(e: &Experiment) -> Result<()> {
    if e.format == Some(Format::Json) {
        return Err(ConfigError("enumerate writes CSV only".into()).into());
    }
    let o = orbit(e)?;
    emit(e.path.as_deref(), |out: &mut dyn Write| o.write_csv(out))?;
    let main = main_term(o.query());
    eprintln!(
        "{} X = {}: N = {}, main term = {main:.6}, ratio = {:.6}",
        e.group,
        e.max_threshold(),
        o.len(),
        o.len() as f64 / main
    );
    Ok(())
}

pub fn equidist(e: &Experiment) -> Result<()> {
    let o = orbit(e)?;
    let report = equidistribution_report(&o, &e.thresholds, &e.interval)?;
    emit_report(e, &report, || {
        let mut t = Table::new(&["X", "N", "N_I", "error"]);
        for r in &report.rows {
            t.push(vec![r.threshold.0.into(), r.total.into(), r.in_interval.into(), r.error.0.into()]);
        }
        t
    })?;
    match report.fitted_exponent {
        Some(s) => eprintln!("fitted decay exponent {:.6}", s.0),
        None => eprintln!("fewer than 3 usable rows; no decay fit"),
    }
    Ok(())
}

pub fn density(e: &Experiment) -> Result<()> {
    let p = DensityParams::new(e.z0, e.z1);
    let mut t = Table::new(&["omega", "rho", "eta", "k"]);
    for j in 0..e.bins {
        let w = j as f64 / e.bins as f64;
        let omega = NormalizedAngle::new(w);
        t.push(vec![w.into(), rho(&p, omega).into(), eta(&p, TAU * w).into(), k_theta(&p, omega).into()]);
    }
    emit_table(e, &t)
}

fn sector_rows(r: &SectorReport) -> Table {
    let folded = r.bins.iter().any(|b| b.predicted_folded_rho.is_some());
    let mut t = if folded {
        Table::new(&["lo", "hi", "count", "empirical", "predicted", "diff", "predicted_folded_rho"])
    } else {
        Table::new(&["lo", "hi", "count", "empirical", "predicted", "diff"])
    };
    for b in &r.bins {
        let mut row: Vec<Cell> = vec![
            b.interval[0].0.into(),
            b.interval[1].0.into(),
            b.count.into(),
            b.empirical.0.into(),
            b.predicted.0.into(),
            b.diff.0.into(),
        ];
        if let Some(f) = b.predicted_folded_rho {
            row.push(f.0.into());
        }
        t.push(row);
    }
    t
}

fn sector_experiment(e: &Experiment) -> SectorExperiment {
    SectorExperiment {
        group: e.group,
        z0: e.z0,
        z1: e.z1,
        w: e.w,
        cosh_threshold: e.max_threshold(),
        bins: e.bins,
        budget: e.budget,
    }
}

pub fn theorem3(e: &Experiment) -> Result<()> {
    let r = theorem3_report(&sector_experiment(e))?;
    emit_report(e, &r, || sector_rows(&r))?;
    eprintln!("N = {}, max |empirical - predicted| = {:.3e}", r.total, r.max_abs_diff());
    Ok(())
}

pub fn theorem2(e: &Experiment) -> Result<()> {
    let r = theorem2_report(&sector_experiment(e))?;
    emit_report(e, &r, || sector_rows(&r))?;
    eprintln!(
        "N = {}, max |empirical - predicted| = {:.3e}, eta vs folded rho {:.3e}",
        r.total,
        r.max_abs_diff(),
        r.max_prediction_gap.map_or(f64::NAN, |g| g.0)
    );
    Ok(())
}

#[derive(Serialize)]
struct DiscrepancyRow {
    #[serde(rename = "X")]
    threshold: Sig17,
    #[serde(rename = "N")]
    total: usize,
    star_discrepancy: Sig17,
    #[serde(rename = "M")]
    max_frequency: u32,
    erdos_turan_bound: Sig17,
}

#[derive(Serialize)]
struct ExpSumReport {
    group: String,
    z0: [Sig17; 2],
    z1: [Sig17; 2],
    rows: Table,
    discrepancy: Vec<DiscrepancyRow>,
}

pub fn expsum(e: &Experiment) -> Result<()> {
    let o = orbit(e)?;
    let mut t = Table::new(&["X", "N", "n", "abs", "normalized"]);
    let mut discrepancy = Vec::new();
    for &x in &e.thresholds {
        let s = o.samples_within(x);
        for n in 0..=e.n_max as i64 {
            let a = exponential_sum(s, n).norm();
            t.push(vec![x.into(), s.len().into(), n.into(), a.into(), (a / s.len() as f64).into()]);
        }
        if e.format == Some(Format::Json) && !s.is_empty() {
            discrepancy.push(DiscrepancyRow {
                threshold: Sig17(x),
                total: s.len(),
                star_discrepancy: Sig17(star_discrepancy(s.iter().map(|r| r.omega))?),
                max_frequency: e.m,
                erdos_turan_bound: Sig17(erdos_turan_bound(s, e.m)?),
            });
        }
    }
    if e.format == Some(Format::Json) {
        let report = ExpSumReport {
            group: e.group.to_string(),
            z0: point_json(e.z0),
            z1: point_json(e.z1),
            rows: t,
            discrepancy,
        };
        emit(e.path.as_deref(), |out| write_json(out, &report))
    } else {
        emit_table(e, &t)
    }
}

pub fn gseries(e: &Experiment) -> Result<()> {
    let o = orbit(e)?;
    let mut t = Table::new(&["X", "s", "n", "re", "im", "scaled_re", "scaled_im"]);
    for &x in &e.thresholds {
        let samples = o.samples_within(x);
        for &s in &e.s_values {
            for n in 0..=e.n_max as i64 {
                let g = g_series_partial(samples, n, s, x, &e.group)?;
                let scaled = g * (s - 1.0);
                t.push(vec![x.into(), s.into(), n.into(), g.re.into(), g.im.into(), scaled.re.into(), scaled.im.into()]);
            }
        }
    }
    emit_table(e, &t)
}

pub fn qdist(e: &Experiment) -> Result<()> {
    let p = DensityParams::new(e.z0, e.z1);
    let mut t = Table::new(&["R", "t", "Q_exact", "Q_asymptotic", "gap", "exp_gap"]);
    for &x in &e.thresholds {
        let r = x.acosh();
        for j in 0..e.bins {
            let angle = -PI + (j as f64 + 0.5) * TAU / e.bins as f64;
            let exact = p.sector_radius_exact(angle, r)?;
            let asym = sector_radius_asymptotic(&p, angle, r);
            t.push(vec![
                r.into(),
                angle.into(),
                exact.into(),
                asym.into(),
                (exact - asym).into(),
                (exact.exp() - asym.exp()).into(),
            ]);
        }
    }
    emit_table(e, &t)
}
