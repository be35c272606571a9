//! Uniform periodic square grid, sampled fields and the second-order
//! central-difference operators used by the solver.
//!
//! Samples are stored row-major with the x index fastest: sample `(i, j)`
//! sits at `values[j * n + i]` and represents the point `(i h, j h)`.
//! All indices wrap modulo `n`.

use crate::error::{Error, Result};

/// Smallest number of points per axis; the stencils need two distinct
/// neighbours on each side.
pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    side: f64,
    n: usize,
    h: f64,
}

impl Grid {
    /// Builds the periodic grid of side `side` with `n` points per axis.
    pub fn new(side: f64, n: usize) -> Result<Self> {
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::Config(format!(
                "grid side length must be positive, got {side}"
            )));
        }
        if n < MIN_POINTS {
            return Err(Error::Config(format!(
                "grid needs at least {MIN_POINTS} points per axis, got {n}"
            )));
        }
        Ok(Self {
            side,
            n,
            h: side / n as f64,
        })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical coordinate of grid index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Flat storage index of sample `(i, j)`, both taken modulo `n`.
    pub fn index(&self, i: isize, j: isize) -> usize {
        let n = self.n as isize;
        (j.rem_euclid(n) * n + i.rem_euclid(n)) as usize
    }

    fn check_len(&self, len: usize, what: &'static str) -> Result<()> {
        if len != self.len() {
            return Err(Error::Config(format!(
                "{what}: expected {} samples, got {len}",
                self.len()
            )));
        }
        Ok(())
    }
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn sample<F: Fn(f64, f64) -> f64>(grid: &Grid, f: F) -> Vec<f64> {
    let n = grid.n;
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..n {
        let y = grid.coord(j);
        for i in 0..n {
            out.push(f(grid.coord(i), y));
        }
    }
    out
}

/// Real-valued grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len(), "scalar field")?;
        check_finite(&values, "scalar field")?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: Grid, f: F) -> Self {
        Self {
            grid,
            values: sample(&grid, f),
        }
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: isize, j: isize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self::from_vec_unchecked(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// Complex grid function stored as separate real and imaginary planes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexField {
    pub fn new(grid: Grid, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        grid.check_len(re.len(), "complex field (real part)")?;
        grid.check_len(im.len(), "complex field (imaginary part)")?;
        check_finite(&re, "complex field (real part)")?;
        check_finite(&im, "complex field (imaginary part)")?;
        Ok(Self { grid, re, im })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0, 0.0)
    }

    pub fn constant(grid: Grid, re: f64, im: f64) -> Self {
        Self {
            grid,
            re: vec![re; grid.len()],
            im: vec![im; grid.len()],
        }
    }

    /// Samples `f(x, y) = (re, im)` at every grid point.
    pub fn from_fn<F: Fn(f64, f64) -> (f64, f64)>(grid: Grid, f: F) -> Self {
        let re = sample(&grid, |x, y| f(x, y).0);
        let im = sample(&grid, |x, y| f(x, y).1);
        Self { grid, re, im }
    }

    pub(crate) fn from_vecs_unchecked(grid: Grid, re: Vec<f64>, im: Vec<f64>) -> Self {
        debug_assert_eq!(re.len(), grid.len());
        debug_assert_eq!(im.len(), grid.len());
        Self { grid, re, im }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }

    pub fn im(&self) -> &[f64] {
        &self.im
    }

    pub fn real_part(&self) -> ScalarField {
        ScalarField::from_vec_unchecked(self.grid, self.re.clone())
    }

    pub fn imag_part(&self) -> ScalarField {
        ScalarField::from_vec_unchecked(self.grid, self.im.clone())
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(&self.im).all(|v| v.is_finite())
    }

    /// Pointwise modulus squared.
    pub fn norm_sqr(&self) -> ScalarField {
        let values = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| r * r + i * i)
            .collect();
        ScalarField::from_vec_unchecked(self.grid, values)
    }

    /// Multiplies every sample by the real factor `s`.
    pub fn scale(&self, s: f64) -> Self {
        Self::from_vecs_unchecked(
            self.grid,
            self.re.iter().map(|v| v * s).collect(),
            self.im.iter().map(|v| v * s).collect(),
        )
    }

    /// Multiplies every sample by the unimodular factor `e^{i theta}`.
    pub fn rotate(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let re = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| r * c - i * s)
            .collect();
        let im = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| r * s + i * c)
            .collect();
        Self::from_vecs_unchecked(self.grid, re, im)
    }
}

/// Two-component real grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: Grid, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        grid.check_len(x.len(), "vector field (x component)")?;
        grid.check_len(y.len(), "vector field (y component)")?;
        check_finite(&x, "vector field (x component)")?;
        check_finite(&y, "vector field (y component)")?;
        Ok(Self { grid, x, y })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0, 0.0)
    }

    pub fn constant(grid: Grid, x: f64, y: f64) -> Self {
        Self {
            grid,
            x: vec![x; grid.len()],
            y: vec![y; grid.len()],
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> (f64, f64)>(grid: Grid, f: F) -> Self {
        let x = sample(&grid, |px, py| f(px, py).0);
        let y = sample(&grid, |px, py| f(px, py).1);
        Self { grid, x, y }
    }

    pub(crate) fn from_vecs_unchecked(grid: Grid, x: Vec<f64>, y: Vec<f64>) -> Self {
        debug_assert_eq!(x.len(), grid.len());
        debug_assert_eq!(y.len(), grid.len());
        Self { grid, x, y }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Component along axis 0 (x) or 1 (y).
    pub fn component(&self, axis: usize) -> &[f64] {
        match axis {
            0 => &self.x,
            1 => &self.y,
            _ => panic!("axis {axis} out of range for a 2D vector field"),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }

    /// Pointwise Euclidean norm.
    pub fn norm(&self) -> ScalarField {
        let values = self
            .x
            .iter()
            .zip(&self.y)
            .map(|(a, b)| a.hypot(*b))
            .collect();
        ScalarField::from_vec_unchecked(self.grid, values)
    }
}

/// Central difference `(f(+1) - f(-1)) / 2h` along `axis` (0 = x, 1 = y).
pub(crate) fn central_diff(grid: &Grid, f: &[f64], axis: usize) -> Vec<f64> {
    let n = grid.n;
    let inv = 1.0 / (2.0 * grid.h);
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            let (fwd, bwd) = if axis == 0 {
                let ip = if i + 1 == n { 0 } else { i + 1 };
                let im = if i == 0 { n - 1 } else { i - 1 };
                (j * n + ip, j * n + im)
            } else {
                let jp = if j + 1 == n { 0 } else { j + 1 };
                let jm = if j == 0 { n - 1 } else { j - 1 };
                (jp * n + i, jm * n + i)
            };
            out[j * n + i] = (f[fwd] - f[bwd]) * inv;
        }
    }
    out
}

/// Five-point Laplacian of a single real plane.
pub(crate) fn laplacian_plane(grid: &Grid, f: &[f64]) -> Vec<f64> {
    let n = grid.n;
    let inv = 1.0 / (grid.h * grid.h);
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        let jp = if j + 1 == n { 0 } else { j + 1 };
        let jm = if j == 0 { n - 1 } else { j - 1 };
        for i in 0..n {
            let ip = if i + 1 == n { 0 } else { i + 1 };
            let im = if i == 0 { n - 1 } else { i - 1 };
            let c = f[j * n + i];
            out[j * n + i] =
                (f[j * n + ip] + f[j * n + im] + f[jp * n + i] + f[jm * n + i] - 4.0 * c) * inv;
        }
    }
    out
}

/// `h^2` times the sum of the samples, accumulated in storage order.
pub(crate) fn sum_weighted(grid: &Grid, values: &[f64]) -> f64 {
    grid.h * grid.h * values.iter().sum::<f64>()
}

/// Discrete gradient by central differences.
pub fn gradient(f: &ScalarField) -> VectorField {
    let g = f.grid;
    VectorField::from_vecs_unchecked(
        g,
        central_diff(&g, &f.values, 0),
        central_diff(&g, &f.values, 1),
    )
}

/// Discrete divergence by central differences.
pub fn divergence(w: &VectorField) -> ScalarField {
    let g = w.grid;
    let dx = central_diff(&g, &w.x, 0);
    let dy = central_diff(&g, &w.y, 1);
    ScalarField::from_vec_unchecked(g, dx.iter().zip(&dy).map(|(a, b)| a + b).collect())
}

/// Five-point Laplacian applied to the real and imaginary parts.
pub fn laplacian_c(f: &ComplexField) -> ComplexField {
    let g = f.grid;
    ComplexField::from_vecs_unchecked(g, laplacian_plane(&g, &f.re), laplacian_plane(&g, &f.im))
}

/// Rectangle-rule quadrature over the periodic cell.
pub fn integrate(f: &ScalarField) -> f64 {
    sum_weighted(&f.grid, &f.values)
}
