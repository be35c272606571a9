//! Time integration of the phase/amplitude system
//!
//! ```text
//! dv/dt + (v.grad) v + grad |a|^2 = 0
//! da/dt + v.grad a + a div(v) / 2 = i (eps/2) lap a
//! ```
//!
//! by centered differences in space and forward Euler in time, followed by
//! the rescaling projections that restore mass and momentum after each step.

use crate::error::{Error, Result};
use crate::grid::{central_diff, laplacian_plane, sum_weighted, ComplexField, Grid, VectorField};
use crate::state::{mass, momentum, ConstraintRatios, Invariants, SemiclassicalState};

/// Default multiplier `c` in the time step `k = c h^2`.
pub const DEFAULT_CFL_CONST: f64 = 0.25;

/// Default absolute threshold below which a momentum component is left
/// unprojected.
pub const DEFAULT_MOMENTUM_GUARD: f64 = 1e-8;

/// Time derivative of the state, `(da/dt, dv/dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub da: ComplexField,
    pub dv: VectorField,
}

/// How the velocity scale factor of the momentum projection is chosen.
///
/// Write the momentum component as `I_j = P_j + Q_j` with
/// `P_j = int rho v_j` and `Q_j = eps int Im(conj(a) d_j a)`. Only `P_j`
/// responds to a rescaling of `v_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentumRule {
    /// Factor `(target_j - Q_j) / P_j`; the constraint holds exactly after
    /// the projection.
    #[default]
    Exact,
    /// Factor `target_j / I_j`. Exact only while `Q_j = 0` (e.g. eps = 0);
    /// otherwise leaves a residual of `Q_j (1 - factor)`.
    Ratio,
}

impl MomentumRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            MomentumRule::Exact => "exact",
            MomentumRule::Ratio => "ratio",
        }
    }
}

impl std::str::FromStr for MomentumRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MomentumRule::Exact),
            "ratio" => Ok(MomentumRule::Ratio),
            other => Err(Error::Config(format!("unknown momentum rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub cfl_const: f64,
    pub momentum_guard: f64,
    pub project_mass: bool,
    pub project_momentum: bool,
    pub momentum_rule: MomentumRule,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl_const: DEFAULT_CFL_CONST,
            momentum_guard: DEFAULT_MOMENTUM_GUARD,
            project_mass: true,
            project_momentum: true,
            momentum_rule: MomentumRule::Exact,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_const.is_finite() && self.cfl_const > 0.0) {
            return Err(Error::Config(format!(
                "cfl_const must be positive, got {}",
                self.cfl_const
            )));
        }
        if !(self.momentum_guard.is_finite() && self.momentum_guard >= 0.0) {
            return Err(Error::Config(format!(
                "momentum_guard must be >= 0, got {}",
                self.momentum_guard
            )));
        }
        Ok(())
    }

    /// Projection-free variant of this control.
    pub fn unprojected(self) -> Self {
        Self {
            project_mass: false,
            project_momentum: false,
            ..self
        }
    }

    pub fn time_step(&self, grid: &Grid) -> f64 {
        self.cfl_const * grid.h() * grid.h()
    }
}

/// Centered-difference right-hand side. No upwinding or artificial viscosity.
pub fn rhs(s: &SemiclassicalState) -> Tendency {
    let g = *s.grid();
    let len = g.len();
    let (re, im) = (s.a().re(), s.a().im());
    let (vx, vy) = (s.v().x(), s.v().y());

    let rho: Vec<f64> = re.iter().zip(im).map(|(r, i)| r * r + i * i).collect();
    let drho_x = central_diff(&g, &rho, 0);
    let drho_y = central_diff(&g, &rho, 1);
    let dvx_x = central_diff(&g, vx, 0);
    let dvx_y = central_diff(&g, vx, 1);
    let dvy_x = central_diff(&g, vy, 0);
    let dvy_y = central_diff(&g, vy, 1);
    let dre_x = central_diff(&g, re, 0);
    let dre_y = central_diff(&g, re, 1);
    let dim_x = central_diff(&g, im, 0);
    let dim_y = central_diff(&g, im, 1);

    let mut dv_x = vec![0.0; len];
    let mut dv_y = vec![0.0; len];
    let mut da_re = vec![0.0; len];
    let mut da_im = vec![0.0; len];
    for k in 0..len {
        dv_x[k] = -(vx[k] * dvx_x[k] + vy[k] * dvx_y[k]) - drho_x[k];
        dv_y[k] = -(vx[k] * dvy_x[k] + vy[k] * dvy_y[k]) - drho_y[k];
        let half_div = 0.5 * (dvx_x[k] + dvy_y[k]);
        da_re[k] = -(vx[k] * dre_x[k] + vy[k] * dre_y[k]) - half_div * re[k];
        da_im[k] = -(vx[k] * dim_x[k] + vy[k] * dim_y[k]) - half_div * im[k];
    }

    // i (eps/2) lap a  ->  (-(eps/2) lap im, (eps/2) lap re)
    if s.eps() != 0.0 {
        let half_eps = 0.5 * s.eps();
        let lap_re = laplacian_plane(&g, re);
        let lap_im = laplacian_plane(&g, im);
        for k in 0..len {
            da_re[k] -= half_eps * lap_im[k];
            da_im[k] += half_eps * lap_re[k];
        }
    }

    Tendency {
        da: ComplexField::from_vecs_unchecked(g, da_re, da_im),
        dv: VectorField::from_vecs_unchecked(g, dv_x, dv_y),
    }
}

fn axpy(x: &[f64], k: f64, dx: &[f64]) -> Vec<f64> {
    x.iter().zip(dx).map(|(a, b)| a + k * b).collect()
}

/// One forward Euler step `U + k rhs(U)`: the intermediate state before
/// any projection.
pub fn euler_step(s: &SemiclassicalState, k: f64) -> Result<SemiclassicalState> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Config(format!(
            "time step must be positive, got {k}"
        )));
    }
    let g = *s.grid();
    let tend = rhs(s);
    let a = ComplexField::from_vecs_unchecked(
        g,
        axpy(s.a().re(), k, tend.da.re()),
        axpy(s.a().im(), k, tend.da.im()),
    );
    let v = VectorField::from_vecs_unchecked(
        g,
        axpy(s.v().x(), k, tend.dv.x()),
        axpy(s.v().y(), k, tend.dv.y()),
    );
    let t = s.t() + k;
    let next = SemiclassicalState::from_parts_unchecked(a, v, t, s.eps());
    if !next.is_finite() {
        return Err(Error::BlowUp {
            step: None,
            time: t,
        });
    }
    Ok(next)
}

/// Rescales `a` by `sqrt(target / mass)` so the mass equals `target`.
pub fn project_mass(s_half: &SemiclassicalState, target: f64) -> Result<SemiclassicalState> {
    let current = mass(s_half);
    if current == 0.0 {
        if target == 0.0 {
            return Ok(s_half.clone());
        }
        return Err(Error::DegenerateProjection { target });
    }
    let factor = (target / current).sqrt();
    Ok(s_half.with_amplitude(s_half.a().scale(factor)))
}

/// Rescales each velocity component so the momentum of `s` (which must
/// already carry the mass-projected amplitude) matches `target`.
///
/// A component is left alone when `|target_j|`, `|I_j|` or, for the exact
/// rule, `|P_j|` is below `guard`. Returns which components were rescaled.
pub fn project_momentum(
    s: &SemiclassicalState,
    target: [f64; 2],
    guard: f64,
    rule: MomentumRule,
) -> (SemiclassicalState, [bool; 2]) {
    let g = *s.grid();
    let rho = s.a().norm_sqr();
    let current = momentum(s);
    let mut applied = [false; 2];
    let mut comps = [s.v().x().to_vec(), s.v().y().to_vec()];
    for j in 0..2 {
        if target[j].abs() < guard || current[j].abs() < guard || current[j] == 0.0 {
            continue;
        }
        let factor = match rule {
            MomentumRule::Ratio => target[j] / current[j],
            MomentumRule::Exact => {
                let flow: Vec<f64> = rho
                    .values()
                    .iter()
                    .zip(&comps[j])
                    .map(|(r, v)| r * v)
                    .collect();
                let p = sum_weighted(&g, &flow);
                if p.abs() < guard {
                    continue;
                }
                (target[j] - (current[j] - p)) / p
            }
        };
        comps[j].iter_mut().for_each(|v| *v *= factor);
        applied[j] = true;
    }
    let [x, y] = comps;
    let v = VectorField::from_vecs_unchecked(g, x, y);
    (s.with_velocity(v), applied)
}

/// Result of one full step.
#[derive(Debug, Clone)]
pub struct Advanced {
    pub state: SemiclassicalState,
    pub momentum_projected: [bool; 2],
}

/// Euler step with `k = cfl_const h^2`, then mass projection, then momentum
/// projection, each when enabled. `initial` holds the invariants to restore.
pub fn advance(
    s: &SemiclassicalState,
    ctrl: &StepControl,
    initial: &Invariants,
) -> Result<Advanced> {
    advance_by(s, ctrl, initial, ctrl.time_step(s.grid()))
}

pub fn advance_by(
    s: &SemiclassicalState,
    ctrl: &StepControl,
    initial: &Invariants,
    k: f64,
) -> Result<Advanced> {
    let mut state = euler_step(s, k)?;
    if ctrl.project_mass {
        state = project_mass(&state, initial.i1)?;
    }
    let mut momentum_projected = [false; 2];
    if ctrl.project_momentum {
        let (projected, applied) =
            project_momentum(&state, initial.i3, ctrl.momentum_guard, ctrl.momentum_rule);
        state = projected;
        momentum_projected = applied;
    }
    Ok(Advanced {
        state,
        momentum_projected,
    })
}

/// Hooks invoked by [`evolve`].
pub trait Observer {
    /// Called before every step with the state at the left end of the step.
    fn before_step(&mut self, _step: usize, _state: &SemiclassicalState, _k: f64) {}

    /// Called at step 0, every `stride` steps, and after the final step.
    fn sample(&mut self, _step: usize, _state: &SemiclassicalState, _ratios: &ConstraintRatios) {}
}

/// Advances `s0` to `t_final`, shortening the last step so the run ends
/// exactly at `t_final`.
pub fn evolve(
    s0: &SemiclassicalState,
    ctrl: &StepControl,
    t_final: f64,
    stride: usize,
    observers: &mut [&mut dyn Observer],
) -> Result<SemiclassicalState> {
    ctrl.validate()?;
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::Config(format!(
            "final time must be >= 0, got {t_final}"
        )));
    }
    if stride == 0 {
        return Err(Error::Config("stride must be at least 1".into()));
    }

    let initial = Invariants::of(s0);
    let k = ctrl.time_step(s0.grid());
    let mut state = s0.clone();
    let mut step = 0usize;

    if !observers.is_empty() {
        let ratios = ConstraintRatios::new(&initial, &initial, [false; 2]);
        for obs in observers.iter_mut() {
            obs.sample(0, &state, &ratios);
        }
    }

    while state.t() < t_final {
        let remaining = t_final - state.t();
        let last = remaining <= k * (1.0 + 1e-9);
        let dt = if last { remaining } else { k };

        for obs in observers.iter_mut() {
            obs.before_step(step, &state, dt);
        }
        let adv = advance_by(&state, ctrl, &initial, dt).map_err(|e| match e {
            Error::BlowUp { time, .. } => Error::BlowUp {
                step: Some(step + 1),
                time,
            },
            other => other,
        })?;
        state = adv.state;
        if last {
            state = state.with_time(t_final);
        }
        step += 1;

        if !observers.is_empty() && (step.is_multiple_of(stride) || last) {
            let ratios =
                ConstraintRatios::new(&Invariants::of(&state), &initial, adv.momentum_projected);
            for obs in observers.iter_mut() {
                obs.sample(step, &state, &ratios);
            }
        }
    }
    Ok(state)
}
