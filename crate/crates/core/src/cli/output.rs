//! CSV writers. Every file is written to a sibling temp file and renamed into
//! place, so a failed run never leaves a half-written output behind.
//!
//! Floats use the shortest representation that round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{CaseId, ConstraintSample, SweepResult};
use crate::grid::ScalarField;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes `contents` to `path` via a temp file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(path)(e)
    })
}

/// File name for a snapshot of `field` at time `t`, e.g. `rho_T0.1.csv`.
pub fn field_file_name(field: &str, t: f64) -> String {
    format!("{field}_T{t}.csv")
}

/// One header line, then `n` rows (y index) of `n` values (x index).
pub fn field_csv(name: &str, t: f64, f: &ScalarField) -> String {
    let g = f.grid();
    let n = g.n();
    let mut out = String::with_capacity(n * n * 24);
    let _ = writeln!(
        out,
        "# grid n={} L={:?} t={:?} field={}",
        n,
        g.side(),
        t,
        name
    );
    for row in f.values().chunks(n) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:?}");
        }
        out.push('\n');
    }
    out
}

pub fn write_field(dir: &Path, name: &str, t: f64, f: &ScalarField) -> Result<PathBuf> {
    let path = dir.join(field_file_name(name, t));
    write_atomic(&path, &field_csv(name, t, f))?;
    Ok(path)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// Constraint ratio time series; ratios with a zero reference are left empty.
pub fn constraints_csv(case: CaseId, eps: f64, samples: &[ConstraintSample]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# constraints case={case} eps={eps:?}");
    out.push_str("step,t,j1,j2,j3x,j3y,j3x_projected,j3y_projected\n");
    for s in samples {
        let r = &s.ratios;
        let _ = writeln!(
            out,
            "{},{:?},{},{},{},{},{},{}",
            s.step,
            s.t,
            opt(r.j1),
            opt(r.j2),
            opt(r.j3[0]),
            opt(r.j3[1]),
            r.j3_projected[0],
            r.j3_projected[1],
        );
    }
    out
}

pub fn sweep_csv(case: CaseId, sweep: &SweepResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sweep case={case} T={:?}", sweep.final_time);
    out.push_str("eps,indicator_l1,indicator_l2\n");
    for i in 0..sweep.eps_values.len() {
        let _ = writeln!(
            out,
            "{:?},{:?},{:?}",
            sweep.eps_values[i], sweep.l1_indicator[i], sweep.l2_indicator[i]
        );
    }
    let _ = writeln!(out, "slope,{},{}", opt(sweep.slope_l1), opt(sweep.slope_l2));
    out
}
