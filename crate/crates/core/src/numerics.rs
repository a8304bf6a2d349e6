//! Finite-difference oracle: Dirichlet Hamiltonians on uniform grids, a
//! Sturm-bisection / inverse-iteration eigensolver for symmetric tridiagonal
//! matrices, composite Simpson quadrature and the first-order ladder
//! operators `±∂_t + W̃`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{eval_profiles, partner_at, MorseParams};
use crate::transform::{Coordinate, Grid, Sample, ScalarField};

/// Points at each end of a grid excluded from interior residuals. Covers two
/// nested five-point stencils.
pub const STENCIL_MARGIN: usize = 4;

/// Absolute bisection target on eigenvalues.
pub const EIGEN_ABS_TOL: f64 = 1e-12;

const BISECTION_CAP: usize = 400;
const INVERSE_ITERATION_CAP: usize = 8;
const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// Composite Simpson rule over a uniform grid; for an even point count the
/// last panel is closed with the trapezoid rule.
pub fn quadrature(field: &ScalarField) -> f64 {
    simpson(field.values(), field.grid().spacing())
}

pub(crate) fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (y[0] + y[1]),
        _ => {
            let m = if n % 2 == 1 { n } else { n - 1 };
            let mut odd = 0.0;
            let mut even = 0.0;
            for (i, v) in y.iter().enumerate().take(m - 1).skip(1) {
                if i % 2 == 1 {
                    odd += v;
                } else {
                    even += v;
                }
            }
            let mut total = h / 3.0 * (y[0] + y[m - 1] + 4.0 * odd + 2.0 * even);
            if m < n {
                total += 0.5 * h * (y[n - 2] + y[n - 1]);
            }
            total
        }
    }
}

/// First derivative: five-point central stencil in the interior, three-point
/// stencils at the two points next to each end.
pub fn derivative<T: Sample>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 5, "derivative needs at least 5 samples");
    let mut out = vec![T::zero(); n];
    let inv2h = 1.0 / (2.0 * h);
    let inv12h = 1.0 / (12.0 * h);
    out[0] = (f[1] * 4.0 - f[0] * 3.0 - f[2]) * inv2h;
    out[n - 1] = (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * inv2h;
    out[1] = (f[2] - f[0]) * inv2h;
    out[n - 2] = (f[n - 1] - f[n - 3]) * inv2h;
    for i in 2..n - 2 {
        out[i] = ((f[i + 1] - f[i - 1]) * 8.0 - (f[i + 2] - f[i - 2])) * inv12h;
    }
    out
}

/// Second derivative, same stencil layout as [`derivative`].
pub fn second_derivative<T: Sample>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 5, "second_derivative needs at least 5 samples");
    let mut out = vec![T::zero(); n];
    let inv_h2 = 1.0 / (h * h);
    let inv_12h2 = 1.0 / (12.0 * h * h);
    out[0] = (f[0] * 2.0 - f[1] * 5.0 + f[2] * 4.0 - f[3]) * inv_h2;
    out[n - 1] = (f[n - 1] * 2.0 - f[n - 2] * 5.0 + f[n - 3] * 4.0 - f[n - 4]) * inv_h2;
    out[1] = (f[2] - f[1] * 2.0 + f[0]) * inv_h2;
    out[n - 2] = (f[n - 1] - f[n - 2] * 2.0 + f[n - 3]) * inv_h2;
    for i in 2..n - 2 {
        out[i] = ((f[i + 1] + f[i - 1]) * 16.0 - f[i] * 30.0 - (f[i + 2] + f[i - 2])) * inv_12h2;
    }
    out
}

/// Symmetric tridiagonal matrix acting on the interior points `1..n-1` of a
/// grid; the two end points carry homogeneous Dirichlet conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    grid: Grid,
}

impl TridiagonalOperator {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>, grid: Grid) -> Result<Self> {
        if diag.len() + 2 != grid.len() || offdiag.len() + 1 != diag.len() {
            return Err(Error::GridMismatch(format!(
                "tridiagonal shape ({}, {}) does not fit a grid of {} points",
                diag.len(),
                offdiag.len(),
                grid.len()
            )));
        }
        Ok(Self { diag, offdiag, grid })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Applies the matrix to the interior of `field`; the result vanishes at
    /// the two end points.
    pub fn apply(&self, field: &ScalarField) -> Result<ScalarField> {
        if field.grid() != &self.grid {
            return Err(Error::GridMismatch("field is not on the operator grid".into()));
        }
        let v = field.values();
        let m = self.dim();
        let mut out = vec![0.0; v.len()];
        for k in 0..m {
            let mut acc = self.diag[k] * v[k + 1];
            if k > 0 {
                acc += self.offdiag[k - 1] * v[k];
            }
            if k + 1 < m {
                acc += self.offdiag[k] * v[k + 2];
            }
            out[k + 1] = acc;
        }
        ScalarField::new(self.grid, out)
    }

    fn apply_interior(&self, v: &[f64]) -> Vec<f64> {
        let m = self.dim();
        (0..m)
            .map(|k| {
                let mut acc = self.diag[k] * v[k];
                if k > 0 {
                    acc += self.offdiag[k - 1] * v[k - 1];
                }
                if k + 1 < m {
                    acc += self.offdiag[k] * v[k + 1];
                }
                acc
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `lambda` (Sturm sequence).
    pub fn count_below(&self, lambda: f64) -> usize {
        // pivot floor as in LAPACK dstebz; a norm-scaled floor would swamp
        // the pivots of the low-potential region when the potential is steep
        let max_e2 = self.offdiag.iter().fold(1.0f64, |m, e| m.max(e * e));
        let guard = f64::MIN_POSITIVE * max_e2;
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let prev = if q.abs() < guard {
                if q < 0.0 {
                    -guard
                } else {
                    guard
                }
            } else {
                q
            };
            let e = self.offdiag[i - 1];
            q = (self.diag[i] - lambda) - e * e / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let m = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..m {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < m { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }
}

/// Eigenvalue of a discretized operator with its eigenvector, normalized to
/// unit Simpson norm on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: ScalarField,
}

/// `−d²/ds² + V` with the three-point Laplacian and Dirichlet ends:
/// `diag = 2/h² + V_i`, `offdiag = −1/h²`.
pub fn hamiltonian_t(potential: &ScalarField) -> Result<TridiagonalOperator> {
    let grid = *potential.grid();
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let v = potential.values();
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("potential sample is not finite: {bad}")));
    }
    let n = v.len();
    let diag = v[1..n - 1].iter().map(|&vi| 2.0 * inv_h2 + vi).collect();
    let offdiag = vec![-inv_h2; n - 3];
    TridiagonalOperator::new(diag, offdiag, grid)
}

/// The `count` smallest eigenpairs, in increasing order.
pub fn eigen_lowest(op: &TridiagonalOperator, count: usize) -> Result<Vec<EigenPair>> {
    if count == 0 {
        return Err(Error::InvalidParameter("eigen_lowest needs count >= 1".into()));
    }
    if count > op.grid.len() / 4 {
        return Err(Error::InvalidParameter(format!(
            "requested {count} eigenvalues from a grid of {} points (limit n/4)",
            op.grid.len()
        )));
    }
    let values = lowest_eigenvalues(op, count)?;
    values
        .into_iter()
        .enumerate()
        .map(|(k, value)| {
            let vector = inverse_iteration(op, value, k)?;
            Ok(EigenPair { value, vector })
        })
        .collect()
}

/// The `count` smallest eigenvalues by bisection on the Sturm count.
pub fn lowest_eigenvalues(op: &TridiagonalOperator, count: usize) -> Result<Vec<f64>> {
    let (glo, ghi) = op.gershgorin();
    let mut out = Vec::with_capacity(count);
    let mut floor = glo;
    for k in 0..count.min(op.dim()) {
        let mut lo = floor;
        let mut hi = ghi;
        let mut iterations = 0;
        loop {
            let width = hi - lo;
            let tol = EIGEN_ABS_TOL.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs()));
            if width <= tol {
                break;
            }
            iterations += 1;
            if iterations > BISECTION_CAP {
                return Err(Error::Solver(format!(
                    "bisection for eigenvalue {k} stalled on [{lo}, {hi}] after {BISECTION_CAP} steps"
                )));
            }
            let mid = lo + 0.5 * width;
            if mid <= lo || mid >= hi {
                break;
            }
            if op.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        out.push(value);
        floor = lo;
    }
    Ok(out)
}

fn inverse_iteration(op: &TridiagonalOperator, shift: f64, index: usize) -> Result<ScalarField> {
    let m = op.dim();
    let factor = ShiftedLu::new(op, shift);
    // deterministic, non-degenerate start vector
    let mut v: Vec<f64> = (0..m)
        .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895 + index as f64).sin())
        .collect();
    let mut residual = f64::INFINITY;
    for _ in 0..INVERSE_ITERATION_CAP {
        v = factor.solve(v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Solver(format!(
                "inverse iteration diverged for eigenvalue {index} (shift {shift})"
            )));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let hv = op.apply_interior(&v);
        residual = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - shift * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= EIGEN_RESIDUAL_TOL {
            break;
        }
    }
    if residual > EIGEN_RESIDUAL_TOL {
        return Err(Error::Solver(format!(
            "eigenvector {index} residual {residual:e} above {EIGEN_RESIDUAL_TOL:e}"
        )));
    }

    let mut full = Vec::with_capacity(m + 2);
    full.push(0.0);
    full.extend_from_slice(&v);
    full.push(0.0);
    let field = ScalarField::new(op.grid, full)?;
    let norm = field.norm_sqr().sqrt();
    let peak = field.max_abs();
    let sign = field
        .values()
        .iter()
        .find(|x| x.abs() > 1e-3 * peak)
        .map_or(1.0, |x| x.signum());
    Ok(field.scaled(sign / norm))
}

/// LU factorization with partial pivoting of `T − σ I` (LAPACK `gttrf` layout).
struct ShiftedLu {
    d: Vec<f64>,
    dl: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(op: &TridiagonalOperator, shift: f64) -> Self {
        let m = op.dim();
        let mut d: Vec<f64> = op.diag.iter().map(|x| x - shift).collect();
        let mut dl = op.offdiag.clone();
        let mut du = op.offdiag.clone();
        let mut du2 = vec![0.0; m.saturating_sub(2)];
        let mut swapped = vec![false; m.saturating_sub(1)];
        let tiny = f64::EPSILON * op.gershgorin().1.abs().max(1.0);
        for i in 0..m.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < m {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if let Some(last) = d.last_mut() {
            if *last == 0.0 {
                *last = tiny;
            }
        }
        Self {
            d,
            dl,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        let m = self.d.len();
        for i in 0..m.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..m).rev() {
            let mut acc = b[i];
            if i + 1 < m {
                acc -= self.du[i] * b[i + 1];
            }
            if i + 2 < m {
                acc -= self.du2[i] * b[i + 2];
            }
            b[i] = acc / self.d[i];
        }
        b
    }
}

/// Upper-component x-space operator
/// `−v_f² ψ'' − (v_f²)' ψ' + [W² − v_f'²/4 − v_f v_f''/2 + v_f W'] ψ`
/// with five-point stencils.
pub fn hamiltonian_x_action(field: &ScalarField, params: &MorseParams) -> Result<ScalarField> {
    let grid = check_x_grid(field)?;
    let h = grid.spacing();
    let alpha = params.alpha();
    let psi = field.values();
    let d1 = derivative(psi, h);
    let d2 = second_derivative(psi, h);
    let values = grid
        .points()
        .enumerate()
        .map(|(i, x)| {
            let p = eval_profiles(x, params);
            let vf2 = p.vf * p.vf;
            let dvf2 = 2.0 * p.vf * alpha;
            // v_f' = α, v_f'' = 0, W' = −ω1
            let potential = p.w * p.w - 0.25 * alpha * alpha - p.vf * params.omega1();
            -vf2 * d2[i] - dvf2 * d1[i] + potential * psi[i]
        })
        .collect();
    ScalarField::new(grid, values)
}

/// Same operator written as `−(√f ∂ √f)² + V+` with deforming function
/// `f = v_f` (mass `1/(2 f²)`), using two nested first-derivative stencils.
pub fn hamiltonian_x_action_deformed(
    field: &ScalarField,
    params: &MorseParams,
) -> Result<ScalarField> {
    let grid = check_x_grid(field)?;
    let h = grid.spacing();
    let x: Vec<f64> = grid.to_vec();
    let f: Vec<f64> = x.iter().map(|&xi| eval_profiles(xi, params).vf).collect();
    let root: Vec<f64> = f.iter().map(|v| v.sqrt()).collect();
    let inner: Vec<f64> = field.values().iter().zip(&root).map(|(p, r)| p * r).collect();
    let d_inner = derivative(&inner, h);
    let flux: Vec<f64> = d_inner.iter().zip(&f).map(|(d, fi)| d * fi).collect();
    let d_flux = derivative(&flux, h);
    let values = (0..x.len())
        .map(|i| {
            let (vplus, _) = partner_at(x[i], params);
            -root[i] * d_flux[i] + vplus * field.values()[i]
        })
        .collect();
    ScalarField::new(grid, values)
}

fn check_x_grid<T: Sample>(field: &ScalarField<T>) -> Result<Grid> {
    let grid = *field.grid();
    if grid.coordinate() != Coordinate::X {
        return Err(Error::GridMismatch(format!(
            "x-space operator needs an x-grid (got {})",
            grid.coordinate()
        )));
    }
    if !(grid.lo() > 0.0) {
        return Err(Error::Domain(format!(
            "x-space operator needs a grid inside x > 0 (lo = {})",
            grid.lo()
        )));
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderSign {
    /// `A = ∂_t + W̃`
    Plus,
    /// `A† = −∂_t + W̃`; annihilates the zero mode.
    Minus,
}

/// `(±∂_t + W̃) field` on a t-grid.
pub fn apply_ladder<T: Sample>(
    field: &ScalarField<T>,
    sign: LadderSign,
    params: &MorseParams,
) -> Result<ScalarField<T>> {
    let grid = *field.grid();
    if grid.coordinate() != Coordinate::T {
        return Err(Error::GridMismatch(format!(
            "ladder operators act on t-grids (got {})",
            grid.coordinate()
        )));
    }
    let s = match sign {
        LadderSign::Plus => 1.0,
        LadderSign::Minus => -1.0,
    };
    let d = derivative(field.values(), grid.spacing());
    let values = grid
        .points()
        .zip(d)
        .zip(field.values())
        .map(|((t, dv), &v)| dv * s + v * params.superpotential_t(t))
        .collect();
    ScalarField::new(grid, values)
}

/// Deterministic smooth test fields: sums of three Gaussian bumps with
/// centres drawn from `centres` and widths from `widths`.
pub fn gaussian_test_fields(
    grid: &Grid,
    count: usize,
    seed: u64,
    centres: (f64, f64),
    widths: (f64, f64),
) -> Vec<ScalarField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let bumps: Vec<(f64, f64, f64)> = (0..3)
                .map(|_| {
                    (
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(centres.0..centres.1),
                        rng.gen_range(widths.0..widths.1),
                    )
                })
                .collect();
            ScalarField::from_fn(*grid, |s| {
                bumps
                    .iter()
                    .map(|&(a, c, w)| a * (-0.5 * ((s - c) / w).powi(2)).exp())
                    .sum()
            })
        })
        .collect()
}

/// `max |a_i − b_i|` over `margin..n−margin`.
pub fn interior_max_diff<T: Sample>(a: &[T], b: &[T], margin: usize) -> f64 {
    let n = a.len().min(b.len());
    if n <= 2 * margin {
        return 0.0;
    }
    (margin..n - margin).fold(0.0, |m, i| m.max((a[i] - b[i]).abs()))
}

/// `max |a_i|` over `margin..n−margin`.
pub fn interior_max_abs<T: Sample>(a: &[T], margin: usize) -> f64 {
    let n = a.len();
    if n <= 2 * margin {
        return 0.0;
    }
    a[margin..n - margin].iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn box_operator(n: usize, shift: f64) -> TridiagonalOperator {
        let grid = Grid::new(Coordinate::T, 0.0, PI, n).unwrap();
        hamiltonian_t(&ScalarField::from_fn(grid, |_| shift)).unwrap()
    }

    #[test]
    fn dirichlet_box_spectrum() {
        let pairs = eigen_lowest(&box_operator(2001, 0.0), 3).unwrap();
        for (pair, exact) in pairs.iter().zip([1.0, 4.0, 9.0]) {
            assert_relative_eq!(pair.value, exact, max_relative = 1e-5);
        }
    }

    #[test]
    fn steep_wall_keeps_low_spectrum() {
        // box on [0, π] continued by a wall of height 1e27
        let grid = Grid::new(Coordinate::T, 0.0, 2.0 * PI, 4001).unwrap();
        let op = hamiltonian_t(&ScalarField::from_fn(grid, |t| if t > PI { 1e27 } else { 0.0 })).unwrap();
        assert_eq!(op.count_below(5.0), 2);
        let values = lowest_eigenvalues(&op, 2).unwrap();
        assert!((values[0] - 1.0).abs() < 1e-3 && (values[1] - 4.0).abs() < 1e-2, "{values:?}");
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let base = lowest_eigenvalues(&box_operator(401, 0.0), 4).unwrap();
        let shifted = lowest_eigenvalues(&box_operator(401, 2.5), 4).unwrap();
        for (a, b) in base.iter().zip(&shifted) {
            assert!((b - a - 2.5).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn harmonic_oscillator_spectrum() {
        let grid = Grid::new(Coordinate::T, -12.0, 12.0, 8001).unwrap();
        let op = hamiltonian_t(&ScalarField::from_fn(grid, |t| t * t)).unwrap();
        let pairs = eigen_lowest(&op, 3).unwrap();
        for (pair, exact) in pairs.iter().zip([1.0, 3.0, 5.0]) {
            assert!((pair.value - exact).abs() < 1e-4, "{} vs {exact}", pair.value);
        }
    }

    #[test]
    fn diagonal_matrix_smallest_entry() {
        let grid = Grid::new(Coordinate::T, 0.0, 1.0, 22).unwrap();
        let diag: Vec<f64> = (1..=20).rev().map(f64::from).collect();
        let op = TridiagonalOperator::new(diag, vec![0.0; 19], grid).unwrap();
        let pairs = eigen_lowest(&op, 1).unwrap();
        assert!((pairs[0].value - 1.0).abs() < 1e-12);
        // eigenvector is the unit vector on the last interior point
        let v = pairs[0].vector.values();
        assert!(v[20].abs() > 0.0 && v[1..20].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn eigen_lowest_argument_checks() {
        let op = box_operator(41, 0.0);
        assert!(eigen_lowest(&op, 0).is_err());
        assert!(eigen_lowest(&op, 11).is_err());
        assert!(eigen_lowest(&op, 10).is_ok());
    }

    #[test]
    fn eigenpairs_are_sorted_normalized_and_have_small_residuals() {
        let op = box_operator(1001, 0.0);
        let pairs = eigen_lowest(&op, 5).unwrap();
        for w in pairs.windows(2) {
            assert!(w[1].value - w[0].value > 1e-12);
        }
        for p in &pairs {
            assert_relative_eq!(p.vector.norm_sqr(), 1.0, max_relative = 1e-12);
            let hv = op.apply(&p.vector).unwrap();
            let r: f64 = hv
                .values()
                .iter()
                .zip(p.vector.values())
                .map(|(a, b)| (a - p.value * b).powi(2))
                .sum::<f64>()
                .sqrt();
            let norm: f64 = p.vector.values().iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(r <= 1e-8 * norm, "residual {r}");
        }
    }

    #[test]
    fn box_refinement_is_second_order() {
        let coarse = lowest_eigenvalues(&box_operator(201, 0.0), 1).unwrap()[0];
        let fine = lowest_eigenvalues(&box_operator(401, 0.0), 1).unwrap()[0];
        let ratio = (coarse - 1.0).abs() / (fine - 1.0).abs();
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn sturm_count_matches_bisection() {
        let op = box_operator(301, 0.0);
        assert_eq!(op.count_below(0.5), 0);
        assert_eq!(op.count_below(1.5), 1);
        assert_eq!(op.count_below(10.0), 3);
    }

    #[test]
    fn quadrature_examples() {
        let g = Grid::new(Coordinate::X, 0.0, 1.0, 101).unwrap();
        assert!((quadrature(&ScalarField::from_fn(g, |x| x * x)) - 1.0 / 3.0).abs() < 1e-10);

        let g = Grid::new(Coordinate::T, -10.0, 10.0, 2001).unwrap();
        let gauss = quadrature(&ScalarField::from_fn(g, |t| (-t * t).exp()));
        assert!((gauss - PI.sqrt()).abs() < 1e-10);

        let f = ScalarField::from_fn(g, |t| t.sin() + 0.3 * t);
        let h = ScalarField::from_fn(g, |t| (0.2 * t).cos());
        let combo = ScalarField::new(
            g,
            f.values().iter().zip(h.values()).map(|(a, b)| 2.0 * a - 3.0 * b).collect(),
        )
        .unwrap();
        let lhs = quadrature(&combo);
        let rhs = 2.0 * quadrature(&f) - 3.0 * quadrature(&h);
        assert!((lhs - rhs).abs() < 1e-13 * rhs.abs().max(1.0));
    }

    #[test]
    fn quadrature_even_count_uses_trapezoid_tail() {
        // Simpson + one trapezoid panel on a cubic
        let g = Grid::new(Coordinate::X, 0.0, 1.0, 100).unwrap();
        let got = quadrature(&ScalarField::from_fn(g, |x| x * x * x));
        assert!((got - 0.25).abs() < 1e-5);
        let g = Grid::new(Coordinate::X, 0.0, 1.0, 6).unwrap();
        assert!((quadrature(&ScalarField::from_fn(g, |_| 2.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_stencils_on_polynomials() {
        let g = Grid::new(Coordinate::X, -1.0, 2.0, 31).unwrap();
        let f = ScalarField::from_fn(g, |x| x * x * x - 2.0 * x);
        let d = derivative(f.values(), g.spacing());
        let d2 = second_derivative(f.values(), g.spacing());
        for (i, x) in g.points().enumerate().skip(2).take(27) {
            assert!((d[i] - (3.0 * x * x - 2.0)).abs() < 1e-11);
            assert!((d2[i] - 6.0 * x).abs() < 1e-9);
        }
    }

    #[test]
    fn ladder_on_constant_returns_superpotential() {
        let params = MorseParams::new(1.0, 1.0, 0.25).unwrap();
        let g = Grid::new(Coordinate::T, -5.0, 5.0, 101).unwrap();
        let one = ScalarField::from_fn(g, |_| 1.0);
        for sign in [LadderSign::Plus, LadderSign::Minus] {
            let out = apply_ladder(&one, sign, &params).unwrap();
            for (v, t) in out.values().iter().zip(g.points()) {
                assert!((v - params.superpotential_t(t)).abs() < 1e-12);
            }
        }
        let gx = Grid::new(Coordinate::X, 1.0, 2.0, 11).unwrap();
        assert!(apply_ladder(&ScalarField::from_fn(gx, |_| 1.0), LadderSign::Plus, &params).is_err());
    }

    #[test]
    fn x_action_of_zero_is_zero() {
        let params = MorseParams::new(1.0, 1.0, 0.25).unwrap();
        let g = Grid::new(Coordinate::X, 0.5, 3.0, 51).unwrap();
        let zero = ScalarField::from_fn(g, |_| 0.0);
        assert!(hamiltonian_x_action(&zero, &params).unwrap().values().iter().all(|v| *v == 0.0));
        assert!(hamiltonian_x_action_deformed(&zero, &params)
            .unwrap()
            .values()
            .iter()
            .all(|v| *v == 0.0));
        let bad = Grid::new(Coordinate::X, 0.0, 3.0, 51).unwrap();
        assert!(matches!(
            hamiltonian_x_action(&ScalarField::from_fn(bad, |_| 1.0), &params),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn test_fields_are_deterministic() {
        let g = Grid::new(Coordinate::T, -10.0, 10.0, 201).unwrap();
        let a = gaussian_test_fields(&g, 4, 7, (-3.0, 3.0), (0.5, 1.5));
        let b = gaussian_test_fields(&g, 4, 7, (-3.0, 3.0), (0.5, 1.5));
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }
}
