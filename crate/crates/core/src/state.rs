//! The unknown `(a, v)` of the phase/amplitude system together with its
//! quadratic observables and conserved functionals.

use crate::error::{Error, Result};
use crate::grid::{central_diff, sum_weighted, ComplexField, Grid, ScalarField, VectorField};

/// Amplitude `a`, velocity `v`, current time and the semiclassical parameter.
///
/// `eps == 0` selects the symmetrized Euler system.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiclassicalState {
    a: ComplexField,
    v: VectorField,
    t: f64,
    eps: f64,
}

impl SemiclassicalState {
    pub fn new(a: ComplexField, v: VectorField, t: f64, eps: f64) -> Result<Self> {
        if a.grid() != v.grid() {
            return Err(Error::Config(
                "amplitude and velocity live on different grids".into(),
            ));
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::Config(format!("eps must be >= 0, got {eps}")));
        }
        if !t.is_finite() {
            return Err(Error::NonFinite("time"));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("amplitude"));
        }
        if !v.is_finite() {
            return Err(Error::NonFinite("velocity"));
        }
        Ok(Self { a, v, t, eps })
    }

    pub(crate) fn from_parts_unchecked(a: ComplexField, v: VectorField, t: f64, eps: f64) -> Self {
        Self { a, v, t, eps }
    }

    pub fn a(&self) -> &ComplexField {
        &self.a
    }

    pub fn v(&self) -> &VectorField {
        &self.v
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn grid(&self) -> &Grid {
        self.a.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.a.is_finite() && self.v.is_finite()
    }

    pub fn with_amplitude(&self, a: ComplexField) -> Self {
        Self { a, ..self.clone() }
    }

    pub fn with_velocity(&self, v: VectorField) -> Self {
        Self { v, ..self.clone() }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Same fields, different semiclassical parameter.
    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::Config(format!("eps must be >= 0, got {eps}")));
        }
        self.eps = eps;
        Ok(self)
    }
}

/// Mass, energy and momentum of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: [f64; 2],
}

impl Invariants {
    pub fn of(s: &SemiclassicalState) -> Self {
        Self {
            i1: mass(s),
            i2: energy(s),
            i3: momentum(s),
        }
    }
}

/// Ratios of current to initial invariants. A ratio is `None` when the
/// initial invariant it divides by is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintRatios {
    pub j1: Option<f64>,
    pub j2: Option<f64>,
    pub j3: [Option<f64>; 2],
    /// Whether the momentum projection rescaled each velocity component on
    /// the step that produced this state. Raw ratios are reported either way.
    pub j3_projected: [bool; 2],
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

impl ConstraintRatios {
    pub fn new(current: &Invariants, initial: &Invariants, j3_projected: [bool; 2]) -> Self {
        Self {
            j1: ratio(current.i1, initial.i1),
            j2: ratio(current.i2, initial.i2),
            j3: [
                ratio(current.i3[0], initial.i3[0]),
                ratio(current.i3[1], initial.i3[1]),
            ],
            j3_projected,
        }
    }
}

/// `rho = |a|^2`.
pub fn position_density(s: &SemiclassicalState) -> ScalarField {
    s.a.norm_sqr()
}

/// `J = rho v + eps Im(conj(a) grad a)`.
pub fn current_density(s: &SemiclassicalState) -> VectorField {
    let g = *s.grid();
    let rho = position_density(s);
    let rho = rho.values();
    let (re, im) = (s.a.re(), s.a.im());
    let mut comps = [s.v.x().to_vec(), s.v.y().to_vec()];
    for (axis, out) in comps.iter_mut().enumerate() {
        for (o, r) in out.iter_mut().zip(rho) {
            *o *= r;
        }
        if s.eps != 0.0 {
            let d_re = central_diff(&g, re, axis);
            let d_im = central_diff(&g, im, axis);
            for k in 0..g.len() {
                out[k] += s.eps * (re[k] * d_im[k] - im[k] * d_re[k]);
            }
        }
    }
    let [x, y] = comps;
    VectorField::from_vecs_unchecked(g, x, y)
}

pub fn mass(s: &SemiclassicalState) -> f64 {
    sum_weighted(s.grid(), position_density(s).values())
}

pub fn momentum(s: &SemiclassicalState) -> [f64; 2] {
    let j = current_density(s);
    [sum_weighted(s.grid(), j.x()), sum_weighted(s.grid(), j.y())]
}

/// `integral of |eps grad a + i a v|^2 + |a|^4`, with the first term expanded
/// as `(eps d a1 - a2 v)^2 + (eps d a2 + a1 v)^2` per axis.
pub fn energy(s: &SemiclassicalState) -> f64 {
    let g = *s.grid();
    let (re, im) = (s.a.re(), s.a.im());
    let mut density: Vec<f64> = re
        .iter()
        .zip(im)
        .map(|(r, i)| (r * r + i * i).powi(2))
        .collect();
    for axis in 0..2 {
        let v = s.v.component(axis);
        let d_re = central_diff(&g, re, axis);
        let d_im = central_diff(&g, im, axis);
        for k in 0..g.len() {
            let p = s.eps * d_re[k] - im[k] * v[k];
            let q = s.eps * d_im[k] + re[k] * v[k];
            density[k] += p * p + q * q;
        }
    }
    sum_weighted(&g, &density)
}
