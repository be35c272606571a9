//! Phase reconstruction and the wave function `u = a exp(i phi / eps)`.
//!
//! The phase obeys `d phi/dt = -(|v|^2 / 2 + |a|^2)` along the computed
//! trajectory and is accumulated with the left-endpoint rule, one step at a
//! time, so nothing but the current phase field is ever stored.

use crate::dynamics::Observer;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, ScalarField};
use crate::state::SemiclassicalState;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAccumulator {
    phi: ScalarField,
    t: f64,
}

impl PhaseAccumulator {
    /// Starts from the initial phase at `t = 0`.
    pub fn new(phi0: ScalarField) -> Result<Self> {
        Self::starting_at(phi0, 0.0)
    }

    pub fn starting_at(phi0: ScalarField, t: f64) -> Result<Self> {
        if !phi0.is_finite() {
            return Err(Error::NonFinite("initial phase"));
        }
        Ok(Self { phi: phi0, t })
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `phi <- phi - k (|v|^2 / 2 + |a|^2)` evaluated at `s`, then `t += k`.
    pub fn accumulate(&mut self, s: &SemiclassicalState, k: f64) {
        debug_assert!(
            (self.t - s.t()).abs() <= 1e-9 * (1.0 + s.t().abs()),
            "phase accumulator at t = {} fed a state at t = {}",
            self.t,
            s.t()
        );
        let (re, im) = (s.a().re(), s.a().im());
        let (vx, vy) = (s.v().x(), s.v().y());
        let phi: Vec<f64> = self
            .phi
            .values()
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                let rate = 0.5 * (vx[idx] * vx[idx] + vy[idx] * vy[idx])
                    + re[idx] * re[idx]
                    + im[idx] * im[idx];
                p - k * rate
            })
            .collect();
        self.phi = ScalarField::from_vec_unchecked(*self.phi.grid(), phi);
        self.t += k;
    }
}

impl Observer for PhaseAccumulator {
    fn before_step(&mut self, _step: usize, state: &SemiclassicalState, k: f64) {
        self.accumulate(state, k);
    }
}

/// `u = a (cos(phi/eps) + i sin(phi/eps))`.
pub fn wave_function(a: &ComplexField, phi: &ScalarField, eps: f64) -> Result<ComplexField> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidReconstruction(eps));
    }
    if a.grid() != phi.grid() {
        return Err(Error::Comparison(
            "amplitude and phase live on different grids".into(),
        ));
    }
    let len = a.grid().len();
    let mut re = Vec::with_capacity(len);
    let mut im = Vec::with_capacity(len);
    for idx in 0..len {
        let (s, c) = (phi.values()[idx] / eps).sin_cos();
        let (ar, ai) = (a.re()[idx], a.im()[idx]);
        re.push(ar * c - ai * s);
        im.push(ar * s + ai * c);
    }
    Ok(ComplexField::from_vecs_unchecked(*a.grid(), re, im))
}
