//! Executes a scenario and writes the output tree
//!
//! ```text
//! <outdir>/<name>/manifest.json
//!                 snapshots/{dirac,reduced,fluid}_NNNNN.csv
//!                 diagnostics/{equivalence,conservation,identities,lagrangians,fluid_summary}.csv
//! ```
//!
//! Nothing time- or host-dependent is written, so identical configs give
//! byte-identical trees.

use std::fs;
use std::path::{Path, PathBuf};

use dirac_fluid::diagnostics::{
    divergence_l2, polar_samples, relative_drift, write_identity_csv, IdentityRow, LagrangianBreakdown,
};
use dirac_fluid::dirac::{step_plan, DiracSolver};
use dirac_fluid::fluid::{FluidState, Mask};
use dirac_fluid::jet::SpinorJet;
use dirac_fluid::lattice::io::{fmt_num, write_complex};
use dirac_fluid::lattice::{four_gradient, integrate_volume};
use dirac_fluid::reduction::{equivalence_report, ReducedSolver};
use dirac_fluid::{DiracState64, FluidState64, Grid64};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::{build_initial, Diagnostic, Scenario, Solvers};
use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub steps: usize,
    /// Relative path and SHA-256 of every CSV, in write order.
    pub files: Vec<(String, String)>,
    pub content_hash: String,
    pub max_equivalence_sup: Option<f64>,
    pub max_charge_drift: Option<f64>,
}

struct Output {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Output {
    fn create(dir: PathBuf) -> Result<Self, CliError> {
        for sub in ["snapshots", "diagnostics"] {
            let p = dir.join(sub);
            if p.exists() {
                fs::remove_dir_all(&p).map_err(|e| CliError::io(&p, e))?;
            }
            fs::create_dir_all(&p).map_err(|e| CliError::io(&p, e))?;
        }
        Ok(Self { dir, files: Vec::new() })
    }

    fn csv(&mut self, rel: String, fill: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>) -> Result<(), CliError> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        let path = self.dir.join(&rel);
        fs::write(&path, &buf).map_err(|e| CliError::io(&path, e))?;
        self.files.push((rel, hex::encode(Sha256::digest(&buf))));
        Ok(())
    }

    fn table(&mut self, rel: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        self.csv(rel.to_string(), |buf| {
            let mut w = csv::Writer::from_writer(buf);
            let err = |e: csv::Error| CliError::Io(format!("{rel}: {e}"));
            w.write_record(header).map_err(err)?;
            for r in rows {
                w.write_record(r).map_err(err)?;
            }
            w.flush().map_err(|e| CliError::Io(format!("{rel}: {e}")))
        })
    }

    fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for (path, digest) in &self.files {
            h.update(path.as_bytes());
            h.update(b"\0");
            h.update(digest.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

fn snapshots(out: &mut Output, prefix: &str, states: &[DiracState64]) -> Result<(), CliError> {
    for (i, st) in states.iter().enumerate() {
        out.csv(format!("snapshots/{prefix}_{i:05}.csv"), |buf| Ok(write_complex(buf, &st.bispinor())?))?;
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Fluid variables at `state` and at one step either side, for time derivatives.
struct FluidWindow {
    prev: FluidState64,
    cur: FluidState64,
    next: FluidState64,
    samples: Vec<dirac_fluid::jet::SpinorSample<f64>>,
}

pub fn run(scenario: &Scenario, outdir: &Path) -> Result<RunSummary, CliError> {
    let initial = build_initial(scenario)?;
    let grid: Grid64 = *initial.grid();
    let params = scenario.params;
    let order = scenario.derivative_order;
    let pipeline = &scenario.pipeline;
    let every = scenario.record_every;
    let (steps, dt) = step_plan(scenario.duration, grid.dt())?;
    let h = params.c * dt;
    let mut out = Output::create(outdir.join(&scenario.name))?;
    let dirac = DiracSolver::new(params, order);

    let mut source = None;
    if pipeline.solvers != Solvers::Reduced {
        let traj = dirac.evolve(&initial, scenario.duration, every)?;
        snapshots(&mut out, "dirac", &traj.states)?;
        source = Some(traj.states);
    }
    if pipeline.solvers != Solvers::Dirac {
        let traj = ReducedSolver::new(params, order).evolve(&initial, scenario.duration, every)?;
        snapshots(&mut out, "reduced", &traj.states)?;
        source.get_or_insert(traj.states);
    }
    let states = source.expect("at least one solver runs");

    let mut max_equivalence_sup = None;
    if pipeline.wants(Diagnostic::Equivalence) {
        let report = equivalence_report(&initial, scenario.duration, every, &params, order)?;
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|r| vec![fmt_num(r.x0), fmt_num(r.sup_discrepancy), fmt_num(r.l2_discrepancy), opt(r.kg_residual)])
            .collect();
        out.table("diagnostics/equivalence.csv", &["x0", "sup_discrepancy", "l2_discrepancy", "kg_residual"], &rows)?;
        max_equivalence_sup = Some(report.max_sup);
    }

    let neighbours =
        |st: &DiracState64| -> Result<(DiracState64, DiracState64), CliError> { Ok((dirac.step(st, -dt)?, dirac.step(st, dt)?)) };

    let mut max_charge_drift = None;
    if pipeline.wants(Diagnostic::Conservation) {
        let q0 = initial.total_probability();
        let mut rows = Vec::with_capacity(states.len());
        let mut worst = 0.0f64;
        for st in &states {
            let (prev, next) = neighbours(st)?;
            let q = st.total_probability();
            let drift = relative_drift(q, q0);
            worst = worst.max(drift.abs());
            let div = divergence_l2(&prev, st, &next, h, order)?;
            rows.push(vec![fmt_num(st.x0), fmt_num(q), fmt_num(drift), fmt_num(div)]);
        }
        out.table("diagnostics/conservation.csv", &["x0", "charge", "relative_drift", "divergence_l2"], &rows)?;
        max_charge_drift = Some(worst);
    }

    if pipeline.fluid {
        let tag = grid.points()[..grid.dims()].iter().map(|n| n.to_string()).collect::<Vec<_>>().join("x");
        let mut identity_rows = Vec::new();
        let mut lagrangian_rows = Vec::new();
        let mut summary_rows = Vec::new();
        for (i, st) in states.iter().enumerate() {
            let w = fluid_window(st, &dirac, scenario, &neighbours)?;
            out.csv(format!("snapshots/fluid_{i:05}.csv"), |buf| Ok(w.cur.write_csv(buf, &grid)?))?;

            let lorentz = w.cur.lorentz_check(&params);
            let mut row = vec![fmt_num(st.x0), fmt_num(w.cur.masked_fraction())];
            for m in [Mask::Ok, Mask::LowDensity, Mask::DegenerateBeta, Mask::ComplexAlpha, Mask::Spacelike] {
                row.push(w.cur.count(m).to_string());
            }
            row.extend([lorentz.checked.to_string(), fmt_num(lorentz.median_abs_closeness), fmt_num(lorentz.max_abs_closeness)]);
            summary_rows.push(row);

            if pipeline.wants(Diagnostic::Identities) || pipeline.wants(Diagnostic::Lagrangians) {
                let grad_a0 = four_gradient(&grid, [&w.prev.rest.a_0, &w.cur.rest.a_0, &w.next.rest.a_0], h, order);
                let polar = polar_samples(&w.cur);
                let bd = LagrangianBreakdown::evaluate(&w.samples, &w.cur, &polar, &grad_a0, &params);
                for (name, r) in &bd.residuals {
                    identity_rows.push(IdentityRow {
                        identity_name: name.to_string(),
                        grid_tag: format!("{tag}/r{i:05}"),
                        branch: scenario.branch.name().to_string(),
                        residual_l2: r.l2,
                        residual_sup: r.sup,
                        masked_fraction: r.masked_fraction,
                    });
                }
                let q = &bd.quantum;
                let mut row = vec![fmt_num(st.x0)];
                for density in [
                    &bd.spinor,
                    &bd.kg_quantum,
                    &bd.kg_classical,
                    &bd.classical_clebsch,
                    &bd.classical_fluid,
                    &q.polar,
                    &q.rf_quantum,
                    &q.gap,
                ] {
                    row.push(fmt_num(integrate_volume(&grid, density)));
                }
                lagrangian_rows.push(row);
            }
        }
        out.table(
            "diagnostics/fluid_summary.csv",
            &[
                "x0",
                "masked_fraction",
                "ok",
                "low_density",
                "degenerate_beta",
                "complex_alpha",
                "spacelike",
                "lorentz_checked",
                "median_abs_closeness",
                "max_abs_closeness",
            ],
            &summary_rows,
        )?;
        if pipeline.wants(Diagnostic::Identities) {
            out.csv("diagnostics/identities.csv".into(), |buf| Ok(write_identity_csv(buf, &identity_rows)?))?;
        }
        if pipeline.wants(Diagnostic::Lagrangians) {
            out.table(
                "diagnostics/lagrangians.csv",
                &[
                    "x0",
                    "spinor",
                    "kg_quantum",
                    "kg_classical",
                    "classical_clebsch",
                    "classical_fluid",
                    "quantum_polar",
                    "quantum_rest_frame",
                    "quantum_gap",
                ],
                &lagrangian_rows,
            )?;
        }
    }

    let content_hash = out.content_hash();
    let manifest = json!({
        "name": scenario.name,
        "version": {"cli": env!("CARGO_PKG_VERSION"), "library": dirac_fluid::VERSION},
        "config": scenario,
        "grid": grid,
        "scheme": {
            "dirac": "rk4",
            "reduced": "three-level centred, Taylor bootstrap, trapezoidal integral",
            "laplacian": "composed first-derivative stencils",
            "derivative_order": order.as_u8(),
        },
        "steps": steps,
        "dt": dt,
        "x0_step": h,
        "files": out.files.iter().map(|(p, d)| json!({"path": p, "sha256": d})).collect::<Vec<_>>(),
        "content_hash": content_hash,
    });
    let path = out.dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;

    Ok(RunSummary { dir: out.dir, steps, files: out.files, content_hash, max_equivalence_sup, max_charge_drift })
}

fn fluid_window(
    st: &DiracState64,
    dirac: &DiracSolver<f64>,
    scenario: &Scenario,
    neighbours: &impl Fn(&DiracState64) -> Result<(DiracState64, DiracState64), CliError>,
) -> Result<FluidWindow, CliError> {
    let fluid = |s: &DiracState64| -> Result<(FluidState64, Vec<_>), CliError> {
        let jet = SpinorJet::from_dirac(s, dirac)?;
        let samples = jet.samples().to_vec();
        Ok((FluidState::compute(&samples, &scenario.params, scenario.branch), samples))
    };
    let (prev, next) = neighbours(st)?;
    let (cur, samples) = fluid(st)?;
    Ok(FluidWindow { prev: fluid(&prev)?.0, cur, next: fluid(&next)?.0, samples })
}
