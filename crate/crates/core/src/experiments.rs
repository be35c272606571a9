//! Reproduction setups: the three initial conditions, the eps = 0
//! reference comparison and the convergence indicators.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{evolve, Observer, StepControl};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid, VectorField};
use crate::state::{current_density, position_density, ConstraintRatios, SemiclassicalState};

pub const DEFAULT_SIDE: f64 = 0.5;
pub const DEFAULT_POINTS: usize = 50;
pub const DEFAULT_FINAL_TIME: f64 = 0.1;
pub const SIGN_CHANGING_FINAL_TIME: f64 = 0.05;
pub const DEFAULT_EPS_LIST: [f64; 3] = [0.001, 0.01, 0.1];

/// Width parameter of the envelope shared by `a0`, `f` and `g`.
const ENVELOPE_WIDTH: f64 = 80.0;
/// Width parameter of the two lobes of the sign-changing amplitude.
const LOBE_WIDTH: f64 = 320.0;
/// Wavenumber of the velocity pattern `(sin(10 x1), cos(10 x1))`.
const VELOCITY_WAVENUMBER: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    NearZeroCurrent,
    NonzeroCurrent,
    SignChanging,
}

impl CaseId {
    pub const ALL: [CaseId; 3] = [
        CaseId::NearZeroCurrent,
        CaseId::NonzeroCurrent,
        CaseId::SignChanging,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseId::NearZeroCurrent => "near_zero_current",
            CaseId::NonzeroCurrent => "nonzero_current",
            CaseId::SignChanging => "sign_changing",
        }
    }

    pub fn default_alpha(&self) -> f64 {
        match self {
            CaseId::NearZeroCurrent => 1e-10,
            CaseId::NonzeroCurrent | CaseId::SignChanging => 1e-2,
        }
    }

    pub fn default_final_time(&self) -> f64 {
        match self {
            CaseId::SignChanging => SIGN_CHANGING_FINAL_TIME,
            _ => DEFAULT_FINAL_TIME,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown case `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentCase {
    pub case_id: CaseId,
    pub alpha: f64,
    pub side: f64,
    pub n: usize,
    /// Distance of each lobe centre from `L/2` along x1 (sign-changing case only).
    pub sign_change_offset: f64,
}

impl ExperimentCase {
    pub fn new(case_id: CaseId) -> Self {
        Self {
            case_id,
            alpha: case_id.default_alpha(),
            side: DEFAULT_SIDE,
            n: DEFAULT_POINTS,
            sign_change_offset: DEFAULT_SIDE / 8.0,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.side, self.n)
    }

    /// Initial state on the case's own grid.
    pub fn initial_state(&self, eps: f64) -> Result<SemiclassicalState> {
        initial_condition(self, &self.grid()?, eps)
    }
}

fn gaussian(width: f64, cx: f64, cy: f64) -> impl Fn(f64, f64) -> f64 {
    move |x, y| (-width * ((x - cx).powi(2) + (y - cy).powi(2))).exp()
}

/// Builds `(a0, alpha f, alpha g)` for the given case on grid `g`.
pub fn initial_condition(c: &ExperimentCase, g: &Grid, eps: f64) -> Result<SemiclassicalState> {
    if g.side() != c.side {
        return Err(Error::Config(format!(
            "grid side {} does not match case side {}",
            g.side(),
            c.side
        )));
    }
    let centre = c.side / 2.0;
    let envelope = gaussian(ENVELOPE_WIDTH, centre, centre);
    let alpha = c.alpha;
    let v = VectorField::from_fn(*g, |x, y| {
        let e = envelope(x, y);
        let (s, co) = (VELOCITY_WAVENUMBER * x).sin_cos();
        (alpha * e * s, alpha * e * co)
    });
    let a = match c.case_id {
        CaseId::NearZeroCurrent | CaseId::NonzeroCurrent => {
            ComplexField::from_fn(*g, |x, y| (envelope(x, y), envelope(x, y)))
        }
        CaseId::SignChanging => {
            let left = gaussian(LOBE_WIDTH, centre - c.sign_change_offset, centre);
            let right = gaussian(LOBE_WIDTH, centre + c.sign_change_offset, centre);
            ComplexField::from_fn(*g, |x, y| {
                let p = left(x, y) - right(x, y);
                (p, p)
            })
        }
    };
    SemiclassicalState::new(a, v, 0.0, eps)
}

fn check_comparable(s_eps: &SemiclassicalState, s_0: &SemiclassicalState) -> Result<()> {
    if s_eps.grid() != s_0.grid() {
        return Err(Error::Comparison("states live on different grids".into()));
    }
    let (t1, t2) = (s_eps.t(), s_0.t());
    if (t1 - t2).abs() > 1e-12 * (1.0 + t1.abs().max(t2.abs())) {
        return Err(Error::Comparison(format!(
            "states are at different times ({t1} vs {t2})"
        )));
    }
    Ok(())
}

/// `||rho_eps - rho_0||_1 + ||J_eps - J_0||_1` at a common time, the vector
/// norm being the sum of the component norms. `s_0` is expected to come
/// from an eps = 0 run.
pub fn indicator_l1(s_eps: &SemiclassicalState, s_0: &SemiclassicalState) -> Result<f64> {
    check_comparable(s_eps, s_0)?;
    let g = s_eps.grid();
    let (r1, r0) = (position_density(s_eps), position_density(s_0));
    let (j1, j0) = (current_density(s_eps), current_density(s_0));
    let mut sum = 0.0;
    for k in 0..g.len() {
        sum += (r1.values()[k] - r0.values()[k]).abs();
        sum += (j1.x()[k] - j0.x()[k]).abs();
        sum += (j1.y()[k] - j0.y()[k]).abs();
    }
    Ok(g.h() * g.h() * sum)
}

/// `||a_eps - a_0||_2 + ||v_eps - v_0||_2` at a common time.
pub fn indicator_l2(s_eps: &SemiclassicalState, s_0: &SemiclassicalState) -> Result<f64> {
    check_comparable(s_eps, s_0)?;
    let g = s_eps.grid();
    let sq =
        |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum() };
    let da = sq(s_eps.a().re(), s_0.a().re()) + sq(s_eps.a().im(), s_0.a().im());
    let dv = sq(s_eps.v().x(), s_0.v().x()) + sq(s_eps.v().y(), s_0.v().y());
    let w = g.h() * g.h();
    Ok((w * da).sqrt() + (w * dv).sqrt())
}

/// Least-squares slope of `ln(values)` against `ln(eps)`.
///
/// `None` with fewer than two points or any non-positive entry.
pub fn fit_loglog_slope(eps: &[f64], values: &[f64]) -> Option<f64> {
    if eps.len() != values.len() || eps.len() < 2 {
        return None;
    }
    if eps
        .iter()
        .chain(values)
        .any(|&v| !(v > 0.0 && v.is_finite()))
    {
        return None;
    }
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub eps_values: Vec<f64>,
    pub l1_indicator: Vec<f64>,
    pub l2_indicator: Vec<f64>,
    pub slope_l1: Option<f64>,
    pub slope_l2: Option<f64>,
    pub final_time: f64,
}

impl SweepResult {
    /// Slopes refitted on the entries with `eps <= max_eps`.
    pub fn slopes_up_to(&self, max_eps: f64) -> (Option<f64>, Option<f64>) {
        let keep: Vec<usize> = (0..self.eps_values.len())
            .filter(|&i| self.eps_values[i] <= max_eps)
            .collect();
        let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let eps = pick(&self.eps_values);
        (
            fit_loglog_slope(&eps, &pick(&self.l1_indicator)),
            fit_loglog_slope(&eps, &pick(&self.l2_indicator)),
        )
    }
}

/// Runs `case` at semiclassical parameter `eps` from t = 0 to `t_final`.
pub fn run_case(
    case: &ExperimentCase,
    eps: f64,
    t_final: f64,
    ctrl: &StepControl,
) -> Result<SemiclassicalState> {
    let s0 = case.initial_state(eps)?;
    evolve(&s0, ctrl, t_final, 1, &mut []).map_err(|e| tag_eps(e, eps))
}

fn tag_eps(e: Error, eps: f64) -> Error {
    if e.is_blow_up() {
        Error::RunFailed {
            eps,
            source: Box::new(e),
        }
    } else {
        e
    }
}

/// Runs the eps = 0 reference once and every eps in `eps_list` (in
/// parallel), then evaluates both indicators at `t_final`.
pub fn epsilon_sweep(
    case: &ExperimentCase,
    eps_list: &[f64],
    t_final: f64,
    ctrl: &StepControl,
) -> Result<SweepResult> {
    if eps_list.is_empty() {
        return Err(Error::Config("eps list is empty".into()));
    }
    if let Some(bad) = eps_list.iter().find(|&&e| !(e.is_finite() && e > 0.0)) {
        return Err(Error::Config(format!(
            "sweep eps values must be positive (the eps = 0 reference is implicit), got {bad}"
        )));
    }
    ctrl.validate()?;

    let reference = run_case(case, 0.0, t_final, ctrl)?;
    let runs: Vec<Result<(f64, f64)>> = eps_list
        .par_iter()
        .map(|&eps| {
            let s = run_case(case, eps, t_final, ctrl)?;
            Ok((indicator_l1(&s, &reference)?, indicator_l2(&s, &reference)?))
        })
        .collect();

    let mut l1 = Vec::with_capacity(runs.len());
    let mut l2 = Vec::with_capacity(runs.len());
    for r in runs {
        let (a, b) = r?;
        l1.push(a);
        l2.push(b);
    }
    Ok(SweepResult {
        eps_values: eps_list.to_vec(),
        slope_l1: fit_loglog_slope(eps_list, &l1),
        slope_l2: fit_loglog_slope(eps_list, &l2),
        l1_indicator: l1,
        l2_indicator: l2,
        final_time: t_final,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSample {
    pub step: usize,
    pub t: f64,
    pub ratios: ConstraintRatios,
}

/// Collects constraint ratios while a run progresses.
#[derive(Debug, Default, Clone)]
pub struct ConstraintRecorder {
    pub samples: Vec<ConstraintSample>,
}

impl Observer for ConstraintRecorder {
    fn sample(&mut self, step: usize, state: &SemiclassicalState, ratios: &ConstraintRatios) {
        self.samples.push(ConstraintSample {
            step,
            t: state.t(),
            ratios: *ratios,
        });
    }
}

/// Time series of `(J1, J2, J3)` sampled every `stride` steps.
pub fn constraint_series(
    case: &ExperimentCase,
    eps: f64,
    t_final: f64,
    ctrl: &StepControl,
    stride: usize,
) -> Result<Vec<ConstraintSample>> {
    let s0 = case.initial_state(eps)?;
    let mut rec = ConstraintRecorder::default();
    evolve(&s0, ctrl, t_final, stride, &mut [&mut rec]).map_err(|e| tag_eps(e, eps))?;
    Ok(rec.samples)
}
