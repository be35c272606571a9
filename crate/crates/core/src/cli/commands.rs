use std::path::PathBuf;

use crate::dynamics::evolve;
use crate::error::Result;
use crate::experiments::{epsilon_sweep, ConstraintRecorder, ConstraintSample, SweepResult};
use crate::grid::ScalarField;
use crate::phase::PhaseAccumulator;
use crate::state::{current_density, position_density, SemiclassicalState};

use super::config::{Emit, RunConfig};
use super::output;

pub const CONSTRAINTS_FILE: &str = "constraints.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_state: SemiclassicalState,
    pub samples: Vec<ConstraintSample>,
    pub written: Vec<PathBuf>,
}

fn snapshot(s: &SemiclassicalState) -> Vec<(&'static str, ScalarField)> {
    let g = *s.grid();
    let plain = |v: &[f64]| ScalarField::from_vec_unchecked(g, v.to_vec());
    vec![
        ("rho", position_density(s)),
        ("jnorm", current_density(s).norm()),
        ("a_re", plain(s.a().re())),
        ("a_im", plain(s.a().im())),
        ("vx", plain(s.v().x())),
        ("vy", plain(s.v().y())),
    ]
}

/// Evolves one case to `T`. Outputs are written only after the run succeeds.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let s0 = cfg.case().initial_state(cfg.eps)?;
    let ctrl = cfg.step_control();
    let mut rec = ConstraintRecorder::default();
    let mut phase = PhaseAccumulator::new(ScalarField::zeros(*s0.grid()))?;
    let s_final = evolve(
        &s0,
        &ctrl,
        cfg.final_time,
        cfg.stride,
        &mut [&mut rec, &mut phase],
    )?;

    let mut written = Vec::new();
    if cfg.emit.contains(&Emit::Fields) || cfg.emit.contains(&Emit::Series) {
        output::ensure_dir(&cfg.output_dir)?;
    }
    if cfg.emit.contains(&Emit::Fields) {
        for s in [&s0, &s_final] {
            for (name, f) in snapshot(s) {
                written.push(output::write_field(&cfg.output_dir, name, s.t(), &f)?);
            }
        }
        written.push(output::write_field(
            &cfg.output_dir,
            "phi",
            s_final.t(),
            phase.phi(),
        )?);
    }
    if cfg.emit.contains(&Emit::Series) {
        let path = cfg.output_dir.join(CONSTRAINTS_FILE);
        output::write_atomic(
            &path,
            &output::constraints_csv(cfg.case_id, cfg.eps, &rec.samples),
        )?;
        written.push(path);
    }
    Ok(RunOutcome {
        final_state: s_final,
        samples: rec.samples,
        written,
    })
}

/// Constraint ratios only; always writes the series file.
pub fn observe(cfg: &RunConfig) -> Result<RunOutcome> {
    let mut series_only = cfg.clone();
    series_only.emit = [Emit::Series].into_iter().collect();
    run(&series_only)
}

/// Indicators against the `eps = 0` reference for every `eps` in the list.
pub fn sweep(cfg: &RunConfig, eps_list: &[f64]) -> Result<(SweepResult, Option<PathBuf>)> {
    cfg.validate()?;
    let result = epsilon_sweep(&cfg.case(), eps_list, cfg.final_time, &cfg.step_control())?;
    if !cfg.emit.contains(&Emit::Sweep) {
        return Ok((result, None));
    }
    output::ensure_dir(&cfg.output_dir)?;
    let path = cfg.output_dir.join(SWEEP_FILE);
    output::write_atomic(&path, &output::sweep_csv(cfg.case_id, &result))?;
    Ok((result, Some(path)))
}
