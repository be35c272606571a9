//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Run with `--nocapture` to see the report on success.

use std::cell::Cell;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use semiclassical_nls::dynamics::euler_step;
use semiclassical_nls::experiments::{constraint_series, epsilon_sweep, ConstraintSample};
use semiclassical_nls::{
    evolve, rhs, CaseId, ComplexField, ExperimentCase, Grid, PhaseAccumulator, ScalarField,
    SemiclassicalState, StepControl, VectorField,
};

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn record(&mut self, id: usize, name: &str, pass: bool, detail: String) {
        let line = format!(
            "[{}] criterion {id} ({name}): {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        if !pass {
            self.failed.push(id);
        }
    }
}

fn every_step(case: CaseId, eps: f64, t_final: f64) -> Result<Vec<ConstraintSample>, String> {
    constraint_series(
        &ExperimentCase::new(case),
        eps,
        t_final,
        &StepControl::default(),
        1,
    )
    .map_err(|e| e.to_string())
}

fn max_dev(samples: &[ConstraintSample], pick: impl Fn(&ConstraintSample) -> Option<f64>) -> f64 {
    samples
        .iter()
        .map(|s| pick(s).map_or(f64::INFINITY, |r| (r - 1.0).abs()))
        .fold(0.0, f64::max)
}

fn mass_projection(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for case in CaseId::ALL {
        for eps in [0.0, 0.01] {
            match every_step(case, eps, case.default_final_time()) {
                Ok(s) => worst = worst.max(max_dev(&s, |x| x.ratios.j1)),
                Err(e) => errors.push(format!("{case} eps={eps}: {e}")),
            }
        }
    }
    let pass = errors.is_empty() && worst <= 1e-12;
    r.record(
        1,
        "mass projection",
        pass,
        format!("max |J1-1| = {worst:.2e} (tol 1e-12) {}", errors.join("; ")),
    );
}

fn momentum_projection(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for eps in [0.0, 1e-3, 1e-2, 1e-1] {
        match every_step(CaseId::NonzeroCurrent, eps, 0.1) {
            Ok(s) => {
                worst = worst.max(max_dev(&s, |x| x.ratios.j3[0]));
                worst = worst.max(max_dev(&s, |x| x.ratios.j3[1]));
            }
            Err(e) => errors.push(format!("eps={eps}: {e}")),
        }
    }
    let pass = errors.is_empty() && worst <= 1e-10;
    r.record(
        2,
        "momentum projection",
        pass,
        format!("max |J3-1| = {worst:.2e} (tol 1e-10) {}", errors.join("; ")),
    );
}

fn convergence_rate(r: &mut Report) {
    let eps = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
    let case = ExperimentCase::new(CaseId::NearZeroCurrent);
    match epsilon_sweep(&case, &eps, 0.1, &StepControl::default()) {
        Ok(sw) => {
            let band = |s: Option<f64>| s.is_some_and(|s| (0.7..=1.3).contains(&s));
            let pass = band(sw.slope_l1) && band(sw.slope_l2);
            r.record(
                3,
                "O(eps) convergence",
                pass,
                format!(
                    "slopes L1 = {:?}, L2 = {:?} (band [0.7, 1.3])",
                    sw.slope_l1, sw.slope_l2
                ),
            );
        }
        Err(e) => r.record(3, "O(eps) convergence", false, e.to_string()),
    }
}

fn energy_ordering(r: &mut Report) {
    let eps = [0.0, 1e-3, 1e-2, 1e-1];
    let mut devs = Vec::new();
    for &e in &eps {
        match every_step(CaseId::NearZeroCurrent, e, 0.1) {
            Ok(s) => devs.push(max_dev(&s, |x| x.ratios.j2)),
            Err(err) => {
                r.record(4, "energy ordering", false, err);
                return;
            }
        }
    }
    let pass = devs.windows(2).all(|w| w[0] <= w[1]);
    let listing: Vec<String> = eps
        .iter()
        .zip(&devs)
        .map(|(e, d)| format!("eps={e}: {d:.3e}"))
        .collect();
    r.record(
        4,
        "energy ordering",
        pass,
        format!("max |J2-1| {}", listing.join(", ")),
    );
}

fn vacuum_robustness(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for eps in [0.0, 1e-3, 1e-2, 1e-1] {
        match every_step(CaseId::SignChanging, eps, 0.05) {
            Ok(s) => {
                let finished = s.last().is_some_and(|x| x.t == 0.05);
                if !finished {
                    errors.push(format!("eps={eps}: did not reach T"));
                }
                worst = worst.max(max_dev(&s, |x| x.ratios.j1));
            }
            Err(e) => errors.push(format!("eps={eps}: {e}")),
        }
    }
    let pass = errors.is_empty() && worst <= 1e-12;
    r.record(
        5,
        "vacuum robustness",
        pass,
        format!(
            "reached T=0.05, max |J1-1| = {worst:.2e} {}",
            errors.join("; ")
        ),
    );
}

/// Compressible Euler tendency coded directly on the index grid.
fn euler_rhs_loops(
    n: usize,
    h: f64,
    re: &[f64],
    im: &[f64],
    vx: &[f64],
    vy: &[f64],
) -> [Vec<f64>; 4] {
    let at = |i: usize, j: usize| (j % n) * n + (i % n);
    let dx = |f: &dyn Fn(usize) -> f64, i: usize, j: usize| {
        (f(at(i + 1, j)) - f(at(i + n - 1, j))) / (2.0 * h)
    };
    let dy = |f: &dyn Fn(usize) -> f64, i: usize, j: usize| {
        (f(at(i, j + 1)) - f(at(i, j + n - 1))) / (2.0 * h)
    };
    let rho = |k: usize| re[k] * re[k] + im[k] * im[k];
    let fre = |k: usize| re[k];
    let fim = |k: usize| im[k];
    let fvx = |k: usize| vx[k];
    let fvy = |k: usize| vy[k];
    let mut out = [
        vec![0.0; n * n],
        vec![0.0; n * n],
        vec![0.0; n * n],
        vec![0.0; n * n],
    ];
    for j in 0..n {
        for i in 0..n {
            let k = at(i, j);
            let div = dx(&fvx, i, j) + dy(&fvy, i, j);
            out[0][k] = -vx[k] * dx(&fre, i, j) - vy[k] * dy(&fre, i, j) - 0.5 * re[k] * div;
            out[1][k] = -vx[k] * dx(&fim, i, j) - vy[k] * dy(&fim, i, j) - 0.5 * im[k] * div;
            out[2][k] = -vx[k] * dx(&fvx, i, j) - vy[k] * dy(&fvx, i, j) - dx(&rho, i, j);
            out[3][k] = -vx[k] * dx(&fvy, i, j) - vy[k] * dy(&fvy, i, j) - dy(&rho, i, j);
        }
    }
    out
}

fn fourier_field(g: Grid, c: &[f64]) -> ScalarField {
    let w = 2.0 * PI / g.side();
    ScalarField::from_fn(g, |x, y| {
        c[0] + c[1] * (w * x).sin()
            + c[2] * (w * y).cos()
            + c[3] * (w * (x + 2.0 * y)).sin()
            + c[4] * (2.0 * w * (x - y)).cos()
    })
}

fn euler_limit(r: &mut Report) {
    let strategy = (
        prop::sample::select(vec![8usize, 16, 24, 50]),
        0.1f64..2.0,
        prop::collection::vec(-1.0f64..1.0, 20),
    );
    let mut runner = TestRunner::new(Config {
        cases: 100,
        failure_persistence: None,
        ..Config::default()
    });
    let worst = Cell::new(0.0f64);
    let outcome = runner.run(&strategy, |(n, side, c)| {
        let g = Grid::new(side, n).unwrap();
        let f = |o: usize| fourier_field(g, &c[o..o + 5]).into_values();
        let (re, im, vx, vy) = (f(0), f(5), f(10), f(15));
        let s = SemiclassicalState::new(
            ComplexField::new(g, re.clone(), im.clone()).unwrap(),
            VectorField::new(g, vx.clone(), vy.clone()).unwrap(),
            0.0,
            0.0,
        )
        .unwrap();
        let t = rhs(&s);
        let reference = euler_rhs_loops(n, g.h(), &re, &im, &vx, &vy);
        let got = [t.da.re(), t.da.im(), t.dv.x(), t.dv.y()];
        for (a, b) in got.iter().zip(&reference) {
            let scale = b
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
                .max(f64::MIN_POSITIVE);
            let err = a
                .iter()
                .zip(b)
                .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
                / scale;
            worst.set(worst.get().max(err));
        }
        Ok(())
    });
    let worst = worst.get();
    let pass = outcome.is_ok() && worst <= 1e-14;
    r.record(
        6,
        "eps = 0 limit",
        pass,
        format!("max relative deviation {worst:.2e} over 100 states (tol 1e-14)"),
    );
}

fn defect(n: usize) -> f64 {
    let side = 0.5;
    let eps = 0.1;
    let w = 2.0 * PI / side;
    let g = Grid::new(side, n).unwrap();
    let are = |x: f64, y: f64| (w * x).sin() * (w * y).cos();
    let aim = |x: f64, _y: f64| 0.5 * (w * x).cos();
    let s = SemiclassicalState::new(
        ComplexField::from_fn(g, |x, y| (are(x, y), aim(x, y))),
        VectorField::zeros(g),
        0.0,
        eps,
    )
    .unwrap();
    let k = StepControl::default().time_step(&g);
    let s1 = euler_step(&s, k).unwrap();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (g.coord(i), g.coord(j));
            let idx = g.index(i as isize, j as isize);
            let (re, im) = (are(x, y), aim(x, y));
            let lap_re = -2.0 * w * w * re;
            let lap_im = -w * w * im;
            // rho = re^2 + im^2
            let drho_x =
                2.0 * re * w * (w * x).cos() * (w * y).cos() - 2.0 * im * 0.5 * w * (w * x).sin();
            let drho_y = -2.0 * re * w * (w * x).sin() * (w * y).sin();
            let exact = [-0.5 * eps * lap_im, 0.5 * eps * lap_re, -drho_x, -drho_y];
            let got = [
                (s1.a().re()[idx] - s.a().re()[idx]) / k,
                (s1.a().im()[idx] - s.a().im()[idx]) / k,
                (s1.v().x()[idx] - s.v().x()[idx]) / k,
                (s1.v().y()[idx] - s.v().y()[idx]) / k,
            ];
            for (a, b) in got.iter().zip(exact) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}

fn spatial_order(r: &mut Report) {
    let errs: Vec<f64> = [32, 64, 128].into_iter().map(defect).collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let pass = orders.iter().all(|p| (p - 2.0).abs() <= 0.3);
    r.record(
        7,
        "spatial accuracy",
        pass,
        format!(
            "defects {:?}, observed orders {:?} (target 2.0 +- 0.3)",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            orders.iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>()
        ),
    );
}

fn uniform_solution(r: &mut Report) {
    let g = Grid::new(0.5, 16).unwrap();
    let (a0, v0, eps, phi0) = ((0.8, -0.3), (0.4, 0.25), 0.05, 0.3);
    let s0 = SemiclassicalState::new(
        ComplexField::constant(g, a0.0, a0.1),
        VectorField::constant(g, v0.0, v0.1),
        0.0,
        eps,
    )
    .unwrap();
    let ctrl = StepControl::default();
    let k = ctrl.time_step(&g);
    let steps = 10_000;
    let t_final = steps as f64 * k;
    let mut phase = PhaseAccumulator::new(ScalarField::constant(g, phi0)).unwrap();
    let out = match evolve(&s0, &ctrl, t_final, steps, &mut [&mut phase]) {
        Ok(s) => s,
        Err(e) => return r.record(8, "uniform solution", false, e.to_string()),
    };
    let drift = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
    };
    let field_drift = [
        drift(out.a().re(), s0.a().re()),
        drift(out.a().im(), s0.a().im()),
        drift(out.v().x(), s0.v().x()),
        drift(out.v().y(), s0.v().y()),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let rate = 0.5 * (v0.0 * v0.0 + v0.1 * v0.1) + (a0.0 * a0.0 + a0.1 * a0.1);
    let expected = phi0 - rate * out.t();
    let phase_err = phase
        .phi()
        .values()
        .iter()
        .fold(0.0f64, |m, p| m.max((p - expected).abs()));
    let pass = field_drift <= 1e-12 && phase_err <= rate * k;
    r.record(
        8,
        "uniform solution",
        pass,
        format!(
            "{steps} steps, field drift {field_drift:.2e} (tol 1e-12), phase error {phase_err:.2e} (tol k*rate = {:.2e})",
            rate * k
        ),
    );
}

fn run_cli(config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_semiclassical"))
        .arg("run")
        .arg(config)
        .arg("--output-dir")
        .arg(out)
        .env_remove("SEMICLASSICAL_OUTPUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&status.stderr).into_owned())
    }
}

fn determinism(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(
        &config,
        "case = nonzero_current\neps = 0.01\nT = 0.02\nstride = 5\n",
    )
    .unwrap();
    let (first, second) = (dir.path().join("first"), dir.path().join("second"));
    if let Err(e) = run_cli(&config, &first).and_then(|_| run_cli(&config, &second)) {
        return r.record(9, "determinism", false, e);
    }
    let mut names: Vec<_> = fs::read_dir(&first)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let differing: Vec<String> = names
        .iter()
        .filter(|n| fs::read(first.join(n)).ok() != fs::read(second.join(n)).ok())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    let pass = !names.is_empty() && differing.is_empty();
    r.record(
        9,
        "determinism",
        pass,
        format!(
            "{} CSV files compared, {} differ {differing:?}",
            names.len(),
            differing.len()
        ),
    );
}

#[test]
fn acceptance_criteria() {
    let mut r = Report { failed: Vec::new() };
    mass_projection(&mut r);
    momentum_projection(&mut r);
    convergence_rate(&mut r);
    energy_ordering(&mut r);
    vacuum_robustness(&mut r);
    euler_limit(&mut r);
    spatial_order(&mut r);
    uniform_solution(&mut r);
    determinism(&mut r);
    assert!(r.failed.is_empty(), "failed criteria {:?}", r.failed);
}
