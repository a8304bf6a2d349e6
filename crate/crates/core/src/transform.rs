//! Grids, sampled fields and the coordinate maps between the Dirac picture
//! (coordinate `x`) and the Schrödinger picture (coordinates `t`, `y`, `xi`).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MorseParams;
use crate::numerics;

/// Name of the coordinate a grid is laid out in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    X,
    T,
    Y,
    Xi,
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Coordinate::X => "x",
            Coordinate::T => "t",
            Coordinate::Y => "y",
            Coordinate::Xi => "xi",
        };
        f.write_str(s)
    }
}

/// Uniform one-dimensional grid `lo, lo + h, ..., hi` with `n >= 5` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    coordinate: Coordinate,
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 5;

    pub fn new(coordinate: Coordinate, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "grid endpoints must be finite with lo < hi (got {lo}, {hi})"
            )));
        }
        if n < Self::MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {} points (got {n})",
                Self::MIN_POINTS
            )));
        }
        Ok(Self {
            coordinate,
            lo,
            hi,
            n,
        })
    }

    pub fn coordinate(&self) -> Coordinate {
        self.coordinate
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    /// The `i`-th abscissa. The last point is pinned to `hi` exactly.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }

    /// Index of the grid point nearest to `value` (clamped to the grid).
    pub fn nearest_index(&self, value: f64) -> usize {
        let r = ((value - self.lo) / self.spacing()).round();
        r.clamp(0.0, (self.n - 1) as f64) as usize
    }
}

/// Sample types a field can hold.
pub trait Sample:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + fmt::Debug
{
    fn zero() -> Self;
    fn abs(self) -> f64;
    fn norm_sqr(self) -> f64 {
        let a = self.abs();
        a * a
    }
}

impl Sample for f64 {
    fn zero() -> Self {
        0.0
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
}

impl Sample for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
}

/// Samples of a real or complex function on a uniform [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T = f64> {
    grid: Grid,
    values: Vec<T>,
}

impl<T: Sample> ScalarField<T> {
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl FnMut(f64) -> T) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn map<U: Sample>(&self, f: impl FnMut(T) -> U) -> ScalarField<U> {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ |f|² d(coordinate)` by composite Simpson.
    pub fn norm_sqr(&self) -> f64 {
        let density = self.map(|v| v.norm_sqr());
        numerics::quadrature(&density)
    }

    pub fn same_grid<U>(&self, other: &ScalarField<U>) -> bool {
        self.grid == other.grid
    }
}

/// Samples carried on explicit (generally non-uniform) abscissae that are the
/// image of a uniform source grid under a coordinate map, e.g. `x_i = e^{α t_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedField<T = f64> {
    coordinate: Coordinate,
    source: Grid,
    abscissae: Vec<f64>,
    values: Vec<T>,
}

impl<T: Sample> MappedField<T> {
    pub fn coordinate(&self) -> Coordinate {
        self.coordinate
    }

    pub fn source(&self) -> &Grid {
        &self.source
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

impl MappedField<f64> {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `t = ln(x) / α`.
pub fn x_to_t(x: f64, alpha: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x -> t needs x > 0 (got {x})")));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0 (got {alpha})")));
    }
    Ok(x.ln() / alpha)
}

/// `x = e^{α t}`.
pub fn t_to_x(t: f64, alpha: f64) -> f64 {
    (alpha * t).exp()
}

/// `y(x) = ∫_{x0}^{x} dz / v_f(z)` by composite Simpson with `quadrature_n`
/// panels (rounded up to even). Fails if the velocity is not strictly positive
/// at any node.
pub fn y_of_x(x: f64, vf: impl Fn(f64) -> f64, x0: f64, quadrature_n: usize) -> Result<f64> {
    if !x.is_finite() || !x0.is_finite() {
        return Err(Error::Domain("y(x) needs finite endpoints".into()));
    }
    if x == x0 {
        return Ok(0.0);
    }
    let panels = quadrature_n.max(2).next_multiple_of(2);
    let h = (x - x0) / panels as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    let mut ends = 0.0;
    for i in 0..=panels {
        let z = if i == panels { x } else { x0 + i as f64 * h };
        let v = vf(z);
        if !(v > 0.0) {
            return Err(Error::Domain(format!(
                "Fermi velocity must be positive on the integration path (v_f({z}) = {v})"
            )));
        }
        let g = 1.0 / v;
        if i == 0 || i == panels {
            ends += g;
        } else if i % 2 == 1 {
            odd += g;
        } else {
            even += g;
        }
    }
    Ok(h / 3.0 * (ends + 4.0 * odd + 2.0 * even))
}

/// Which coordinate a point is given in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointCoordinate {
    X,
    T,
}

/// `ξ = (2ω1/α) e^{αt} = (2ω1/α) x`.
pub fn xi_of(point: f64, coordinate: PointCoordinate, params: &MorseParams) -> Result<f64> {
    let scale = 2.0 * params.omega1() / params.alpha();
    match coordinate {
        PointCoordinate::X => {
            if !(point > 0.0) {
                return Err(Error::Domain(format!("xi(x) needs x > 0 (got {point})")));
            }
            Ok(scale * point)
        }
        PointCoordinate::T => Ok(scale * t_to_x(point, params.alpha())),
    }
}

/// `ψ(x_i) = Φ(t_i) / sqrt(v_f(x_i))` with `x_i = e^{α t_i}`.
pub fn phi_to_psi<T: Sample>(phi: &ScalarField<T>, params: &MorseParams) -> Result<MappedField<T>> {
    let grid = *phi.grid();
    if grid.coordinate() != Coordinate::T {
        return Err(Error::GridMismatch(format!(
            "phi_to_psi needs a t-grid (got {})",
            grid.coordinate()
        )));
    }
    let alpha = params.alpha();
    let abscissae: Vec<f64> = grid.points().map(|t| t_to_x(t, alpha)).collect();
    let values = phi
        .values()
        .iter()
        .zip(&abscissae)
        .map(|(&p, &x)| p * (1.0 / (alpha * x).sqrt()))
        .collect();
    Ok(MappedField {
        coordinate: Coordinate::X,
        source: grid,
        abscissae,
        values,
    })
}

/// Inverse of [`phi_to_psi`].
pub fn psi_to_phi<T: Sample>(psi: &MappedField<T>, params: &MorseParams) -> Result<ScalarField<T>> {
    if psi.coordinate != Coordinate::X || psi.source.coordinate() != Coordinate::T {
        return Err(Error::GridMismatch(
            "psi_to_phi needs x samples mapped from a t-grid".into(),
        ));
    }
    let alpha = params.alpha();
    let values = psi
        .values
        .iter()
        .zip(&psi.abscissae)
        .map(|(&p, &x)| p * (alpha * x).sqrt())
        .collect();
    ScalarField::new(psi.source, values)
}

/// `∫ |ψ|² dx` for a field mapped from a t-grid, using `dx = α x dt`.
pub fn mapped_norm_sqr<T: Sample>(psi: &MappedField<T>, params: &MorseParams) -> Result<f64> {
    if psi.source.coordinate() != Coordinate::T {
        return Err(Error::GridMismatch("mapped field must come from a t-grid".into()));
    }
    let alpha = params.alpha();
    let density: Vec<f64> = psi
        .values
        .iter()
        .zip(&psi.abscissae)
        .map(|(v, &x)| v.norm_sqr() * alpha * x)
        .collect();
    Ok(numerics::quadrature(&ScalarField::new(psi.source, density)?))
}
