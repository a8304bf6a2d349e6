//! Closed-form Morse results: bound-level count, energies
//! `E_n² = 1/4 + ω0² − (ω0 − αn)²`, Laguerre wavefunctions and the lower
//! spinor component.
//!
//! With `ξ = (2ω1/α) e^{αt} = 2ω1 x/α` and `κ_n = 2ω0/α − 2n`, the upper
//! component is `ψ+(x) ∝ x^{(κ−1)/2} e^{−ξ/2} L_n^κ(ξ)`. Its Schrödinger-picture
//! partner on the t-grid is `Φ+ = sqrt(v_f) ψ+`, an eigenfunction of
//! `−∂_t² + V+` with `V+ = ω0² + ω1² e^{2αt} − 2ω1(ω0 + α/2) e^{αt}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{morse_well, partner_at, MorseParams, CONSTANCY_PRODUCT};
use crate::numerics::{eigen_lowest, hamiltonian_t, EigenPair};
use crate::polys::{
    laguerre_deriv2_unchecked, laguerre_deriv_unchecked, laguerre_lowered, laguerre_unchecked,
};
use crate::transform::{t_to_x, Coordinate, Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorseLevel {
    pub n: usize,
    pub kappa: f64,
    /// `k² = E² − 1/4`
    pub ksq: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub params: MorseParams,
    pub levels: Vec<MorseLevel>,
    pub provenance: Provenance,
}

/// How the spinor normalization constant `N` is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `∫ |ψ+|² = 1`
    #[default]
    Component,
    /// `∫ (|ψ+|² + |ψ−|²) = 1`
    Spinor,
}

/// Number of bound levels: `n = 0, 1, ...` with `n < ω0/α` strictly.
pub fn level_count(params: &MorseParams) -> usize {
    let ratio = params.omega0() / params.alpha();
    let mut count = ratio.ceil() as usize;
    // guard the strict inequality against ceil() landing on an exact integer
    while count > 0 && (count - 1) as f64 >= ratio {
        count -= 1;
    }
    count.max(1)
}

pub fn kappa(params: &MorseParams, n: usize) -> f64 {
    2.0 * params.omega0() / params.alpha() - 2.0 * n as f64
}

pub fn closed_form_level(params: &MorseParams, n: usize) -> Result<MorseLevel> {
    check_bound(params, n)?;
    let depth = params.omega0() - params.alpha() * n as f64;
    let ksq = params.omega0() * params.omega0() - depth * depth;
    Ok(MorseLevel {
        n,
        kappa: kappa(params, n),
        ksq,
        energy: energy_from_ksq(ksq),
    })
}

/// Positive-energy branch `E = +sqrt(k² + m0² v0⁴)`.
pub fn energy_from_ksq(ksq: f64) -> f64 {
    (ksq + CONSTANCY_PRODUCT * CONSTANCY_PRODUCT).sqrt()
}

pub fn closed_form_spectrum(params: &MorseParams) -> Spectrum {
    let levels = (0..level_count(params))
        .map(|n| closed_form_level(params, n).expect("n below level count"))
        .collect();
    Spectrum {
        params: *params,
        levels,
        provenance: Provenance::ClosedForm,
    }
}

fn check_bound(params: &MorseParams, n: usize) -> Result<()> {
    let count = level_count(params);
    if n >= count {
        return Err(Error::UnboundLevel {
            n,
            n_max: count - 1,
        });
    }
    Ok(())
}

/// `V+` sampled on a t-grid.
pub fn upper_potential(grid: &Grid, params: &MorseParams) -> ScalarField {
    ScalarField::from_fn(*grid, |t| partner_at(t_to_x(t, params.alpha()), params).0)
}

/// `V−` sampled on a t-grid.
pub fn lower_potential(grid: &Grid, params: &MorseParams) -> ScalarField {
    ScalarField::from_fn(*grid, |t| partner_at(t_to_x(t, params.alpha()), params).1)
}

/// `ω0² + ω1² e^{2αt} − 2ω1 c e^{αt}` for an arbitrary centre `c`.
pub fn morse_potential_t(grid: &Grid, params: &MorseParams, centre: f64) -> ScalarField {
    ScalarField::from_fn(*grid, |t| morse_well(t_to_x(t, params.alpha()), params, centre))
}

/// Eigenpairs of the discretized `−∂_t² + V+` lying below the continuum
/// threshold `ω0²`, as a numeric spectrum plus the raw eigenpairs.
pub fn numeric_spectrum(params: &MorseParams, grid: &Grid) -> Result<(Spectrum, Vec<EigenPair>)> {
    require_t(grid)?;
    let op = hamiltonian_t(&upper_potential(grid, params))?;
    let threshold = params.omega0() * params.omega0();
    let bound = op.count_below(threshold).min(grid.len() / 4);
    if bound == 0 {
        return Ok((
            Spectrum {
                params: *params,
                levels: Vec::new(),
                provenance: Provenance::Numeric,
            },
            Vec::new(),
        ));
    }
    let pairs = eigen_lowest(&op, bound)?;
    let levels = pairs
        .iter()
        .enumerate()
        .map(|(n, p)| MorseLevel {
            n,
            kappa: kappa(params, n),
            ksq: p.value,
            energy: energy_from_ksq(p.value.max(0.0)),
        })
        .collect();
    Ok((
        Spectrum {
            params: *params,
            levels,
            provenance: Provenance::Numeric,
        },
        pairs,
    ))
}

fn require_t(grid: &Grid) -> Result<()> {
    if grid.coordinate() != Coordinate::T {
        return Err(Error::GridMismatch(format!("expected a t-grid (got {})", grid.coordinate())));
    }
    Ok(())
}

fn require_support(grid: &Grid) -> Result<()> {
    match grid.coordinate() {
        Coordinate::T => Ok(()),
        Coordinate::X if grid.lo() > 0.0 => Ok(()),
        Coordinate::X => Err(Error::Domain(format!(
            "x-grid must lie inside x > 0 (lo = {})",
            grid.lo()
        ))),
        other => Err(Error::GridMismatch(format!(
            "wavefunctions are sampled on x- or t-grids (got {other})"
        ))),
    }
}

/// Unnormalized `ψ+(x) = x^{(κ−1)/2} e^{−ξ/2} L_n^κ(ξ)`.
pub(crate) fn upper_x(params: &MorseParams, n: usize, x: f64) -> f64 {
    let k = kappa(params, n);
    let xi = 2.0 * params.omega1() * x / params.alpha();
    (0.5 * (k - 1.0) * x.ln() - 0.5 * xi).exp() * laguerre_unchecked(n, k, xi)
}

/// Unnormalized `Φ+(t) = sqrt(α x) ψ+(x)` at `x = e^{αt}`, evaluated in log form.
fn upper_t(params: &MorseParams, n: usize, t: f64) -> f64 {
    let a = params.alpha();
    let k = kappa(params, n);
    let xi = 2.0 * params.omega1() * t_to_x(t, a) / a;
    (0.5 * a.ln() + 0.5 * k * a * t - 0.5 * xi).exp() * laguerre_unchecked(n, k, xi)
}

/// `(Φ+, dΦ+/dt, d²Φ+/dt²)` of the unnormalized t-picture mode, from the
/// Laguerre derivative identities.
pub fn upper_mode_t_derivatives(params: &MorseParams, n: usize, t: f64) -> (f64, f64, f64) {
    let a = params.alpha();
    let k = kappa(params, n);
    let xi = 2.0 * params.omega1() * t_to_x(t, a) / a;
    let envelope = (0.5 * a.ln() + 0.5 * k * a * t - 0.5 * xi).exp();
    let l = laguerre_unchecked(n, k, xi);
    let dl = laguerre_deriv_unchecked(n, k, xi);
    let d2l = laguerre_deriv2_unchecked(n, k, xi);
    let g1 = 0.5 * a * k - 0.5 * a * xi;
    let g2 = -0.5 * a * a * xi;
    let phi = envelope * l;
    let dphi = envelope * (g1 * l + a * xi * dl);
    let d2phi = envelope
        * ((g2 + g1 * g1) * l + 2.0 * g1 * a * xi * dl + a * a * xi * dl + a * a * xi * xi * d2l);
    (phi, dphi, d2phi)
}

/// `[n L_n^κ(ξ) + ξ L_{n−1}^{κ+1}(ξ)]`, the Laguerre content of `A† Φ+`.
fn lower_bracket(n: usize, k: f64, xi: f64) -> f64 {
    n as f64 * laguerre_unchecked(n, k, xi) + xi * laguerre_lowered(n, k + 1.0, xi)
}

/// Unnormalized `ψ−(x) = i (−∂_t + W̃)Φ+ / (D+ sqrt(v_f))`
/// `= i α x^{(κ−1)/2} e^{−ξ/2} [n L_n^κ + ξ L_{n−1}^{κ+1}] / D+`.
fn lower_x(params: &MorseParams, level: &MorseLevel, x: f64) -> Complex64 {
    let a = params.alpha();
    let xi = 2.0 * params.omega1() * x / a;
    let d_plus = level.energy + CONSTANCY_PRODUCT;
    let amp = a * (0.5 * (level.kappa - 1.0) * x.ln() - 0.5 * xi).exp()
        * lower_bracket(level.n, level.kappa, xi)
        / d_plus;
    Complex64::new(0.0, amp)
}

fn lower_t(params: &MorseParams, level: &MorseLevel, t: f64) -> Complex64 {
    let a = params.alpha();
    let x = t_to_x(t, a);
    let xi = 2.0 * params.omega1() * x / a;
    let d_plus = level.energy + CONSTANCY_PRODUCT;
    let amp = a * (0.5 * a.ln() + 0.5 * level.kappa * a * t - 0.5 * xi).exp()
        * lower_bracket(level.n, level.kappa, xi)
        / d_plus;
    Complex64::new(0.0, amp)
}

/// `𝒟 = sqrt(1/4 + ω0² − (ω0 − αn)²) + 1/4 = E_n + 1/4`.
pub fn printed_denominator(level: &MorseLevel) -> f64 {
    level.energy + 0.25
}

/// `4ω1x L_{n−1}^{κ+1}(ξ) + (α + 2nα + 4ω1x) L_n^κ(ξ)`.
pub fn printed_bracket(params: &MorseParams, level: &MorseLevel, x: f64) -> f64 {
    let a = params.alpha();
    let w1 = params.omega1();
    let xi = 2.0 * w1 * x / a;
    let n = level.n;
    4.0 * w1 * x * laguerre_lowered(n, level.kappa + 1.0, xi)
        + (a + 2.0 * n as f64 * a + 4.0 * w1 * x) * laguerre_unchecked(n, level.kappa, xi)
}

/// The printed lower component, unnormalized:
/// `i e^{−ω1x/α} x^{(κ−2)/2} [bracket] / (2 sqrt(α) 𝒟)`.
fn printed_lower_x(params: &MorseParams, level: &MorseLevel, x: f64) -> Complex64 {
    let a = params.alpha();
    let xi = 2.0 * params.omega1() * x / a;
    let amp = (0.5 * (level.kappa - 2.0) * x.ln() - 0.5 * xi).exp()
        * printed_bracket(params, level, x)
        / (2.0 * a.sqrt() * printed_denominator(level));
    Complex64::new(0.0, amp)
}

/// `Φ+` on a t-grid or `ψ+` on an x-grid, with the normalization constant.
/// With `normalize`, the Simpson norm over the grid (measure `dt` or `dx`)
/// is one; otherwise `N = 1`.
pub fn upper_wavefunction(
    n: usize,
    params: &MorseParams,
    grid: &Grid,
    normalize: bool,
) -> Result<(ScalarField, f64)> {
    check_bound(params, n)?;
    require_support(grid)?;
    let raw = match grid.coordinate() {
        Coordinate::T => ScalarField::from_fn(*grid, |t| upper_t(params, n, t)),
        _ => ScalarField::from_fn(*grid, |x| upper_x(params, n, x)),
    };
    if !normalize {
        return Ok((raw, 1.0));
    }
    let norm = raw.norm_sqr().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Domain(format!(
            "level {n} has no resolvable weight on the grid [{}, {}]",
            grid.lo(),
            grid.hi()
        )));
    }
    let constant = 1.0 / norm;
    Ok((raw.scaled(constant), constant))
}

/// Lower component obtained by applying `(−i sqrt(v_f) ∂ sqrt(v_f) + iW)/D+`
/// to the upper one, scaled by `constant` (the upper component's `N`).
pub fn lower_wavefunction_scaled(
    n: usize,
    params: &MorseParams,
    grid: &Grid,
    constant: f64,
) -> Result<ScalarField<Complex64>> {
    let level = closed_form_level(params, n)?;
    require_support(grid)?;
    let field = match grid.coordinate() {
        Coordinate::T => ScalarField::from_fn(*grid, |t| lower_t(params, &level, t) * constant),
        _ => ScalarField::from_fn(*grid, |x| lower_x(params, &level, x) * constant),
    };
    Ok(field)
}

/// Operator-derived lower component, with `N` from the normalized upper
/// component on the same grid. Identically zero for `n = 0`.
pub fn lower_wavefunction_operator(
    n: usize,
    params: &MorseParams,
    grid: &Grid,
) -> Result<ScalarField<Complex64>> {
    let (_, constant) = upper_wavefunction(n, params, grid, true)?;
    lower_wavefunction_scaled(n, params, grid, constant)
}

/// The printed closed form of the lower component, with the same `N` as
/// [`lower_wavefunction_operator`]. Kept for comparison only.
pub fn lower_wavefunction_printed(
    n: usize,
    params: &MorseParams,
    grid: &Grid,
) -> Result<ScalarField<Complex64>> {
    let (_, constant) = upper_wavefunction(n, params, grid, true)?;
    let level = closed_form_level(params, n)?;
    let a = params.alpha();
    let field = match grid.coordinate() {
        Coordinate::T => ScalarField::from_fn(*grid, |t| {
            let x = t_to_x(t, a);
            printed_lower_x(params, &level, x) * ((a * x).sqrt() * constant)
        }),
        _ => ScalarField::from_fn(*grid, |x| printed_lower_x(params, &level, x) * constant),
    };
    Ok(field)
}

/// Normalization constant for `ψ+ = N · (unnormalized)` under `scheme`.
pub fn normalization_constant(
    n: usize,
    params: &MorseParams,
    grid: &Grid,
    scheme: Normalization,
) -> Result<f64> {
    let (upper, _) = upper_wavefunction(n, params, grid, false)?;
    let upper_sq = upper.norm_sqr();
    let total = match scheme {
        Normalization::Component => upper_sq,
        Normalization::Spinor => upper_sq + lower_wavefunction_scaled(n, params, grid, 1.0)?.norm_sqr(),
    };
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Domain(format!("level {n} cannot be normalized on this grid")));
    }
    Ok(1.0 / total.sqrt())
}

/// Sign changes between samples whose magnitude exceeds `rel_floor` times the
/// peak; tails below the floor are ignored.
pub fn count_nodes(values: &[f64], rel_floor: f64) -> usize {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = rel_floor * peak;
    let mut last_sign = 0.0;
    let mut nodes = 0;
    for v in values.iter().filter(|v| v.abs() > floor) {
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            nodes += 1;
        }
        last_sign = s;
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{apply_ladder, LadderSign};
    use crate::transform::phi_to_psi;

    fn reference() -> MorseParams {
        MorseParams::new(1.0, 1.0, 0.25).unwrap()
    }

    fn p(o0: f64, a: f64) -> MorseParams {
        MorseParams::new(o0, 1.0, a).unwrap()
    }

    #[test]
    fn level_count_examples() {
        assert_eq!(level_count(&p(1.0, 0.25)), 4);
        assert_eq!(level_count(&p(1.0, 2.0)), 1);
        assert_eq!(level_count(&p(1.0, 0.3)), 4);
        assert_eq!(level_count(&p(1.0, 1.0)), 1);
        assert_eq!(level_count(&p(3.0, 0.5)), 6);
    }

    #[test]
    fn closed_form_examples() {
        let s = closed_form_spectrum(&reference());
        assert_eq!(s.levels.len(), 4);
        assert_eq!(s.provenance, Provenance::ClosedForm);
        assert_eq!(s.levels[0].ksq, 0.0);
        assert_eq!(s.levels[0].energy, 0.5);
        assert_eq!(s.levels[2].ksq, 0.75);
        assert_eq!(s.levels[2].energy, 1.0);
        assert_eq!(s.levels[3].ksq, 0.9375);
        assert!((s.levels[3].energy - 1.08972473589).abs() < 1e-11);
        assert_eq!(s.levels[1].kappa, 6.0);
        for w in s.levels.windows(2) {
            assert!(w[1].ksq > w[0].ksq);
        }
        assert!(matches!(
            closed_form_level(&reference(), 4),
            Err(Error::UnboundLevel { n: 4, n_max: 3 })
        ));
    }

    fn t_grid() -> Grid {
        Grid::new(Coordinate::T, -80.0, 10.0, 16384).unwrap()
    }

    #[test]
    fn ground_state_peak_location() {
        // stationary point of 3.5 ln x − 4x
        let grid = Grid::new(Coordinate::X, 0.01, 6.0, 6000).unwrap();
        let (psi, _) = upper_wavefunction(0, &reference(), &grid, false).unwrap();
        let imax = psi
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap()
            .0;
        assert!((grid.point(imax) - 0.875).abs() <= grid.spacing());
    }

    #[test]
    fn node_counts_and_normalization() {
        let grid = t_grid();
        for n in 0..4 {
            let (phi, c) = upper_wavefunction(n, &reference(), &grid, true).unwrap();
            assert!(c > 0.0);
            assert_eq!(count_nodes(phi.values(), 1e-8), n);
            assert!((phi.norm_sqr() - 1.0).abs() < 1e-10);
        }
        assert!(matches!(
            upper_wavefunction(4, &reference(), &grid, true),
            Err(Error::UnboundLevel { .. })
        ));
    }

    #[test]
    fn ground_state_is_positive_near_first_maximum() {
        let grid = t_grid();
        for n in 0..4 {
            let (phi, _) = upper_wavefunction(n, &reference(), &grid, true).unwrap();
            let first = phi.values().iter().find(|v| v.abs() > 1e-3 * phi.max_abs()).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn t_and_x_renderings_agree_through_phi_to_psi() {
        let params = reference();
        let grid = Grid::new(Coordinate::T, -10.0, 8.0, 301).unwrap();
        for n in 0..4 {
            let (phi, _) = upper_wavefunction(n, &params, &grid, false).unwrap();
            let psi = phi_to_psi(&phi, &params).unwrap();
            for (&x, &v) in psi.abscissae().iter().zip(psi.values()) {
                let direct = upper_x(&params, n, x);
                assert!((v - direct).abs() <= 1e-12 * direct.abs().max(1e-300), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn ode_residual_with_analytic_derivatives() {
        let params = reference();
        let grid = t_grid();
        for level in closed_form_spectrum(&params).levels {
            let mut worst = 0.0f64;
            let mut peak = 0.0f64;
            for t in grid.points() {
                let (phi, _, d2) = upper_mode_t_derivatives(&params, level.n, t);
                let v = partner_at(t_to_x(t, params.alpha()), &params).0;
                worst = worst.max((-d2 + (v - level.ksq) * phi).abs());
                peak = peak.max(phi.abs());
            }
            assert!(worst <= 1e-6 * peak, "n={}: {worst} vs {peak}", level.n);
        }
    }

    #[test]
    fn lower_component_zero_mode() {
        let grid = t_grid();
        let lower = lower_wavefunction_operator(0, &reference(), &grid).unwrap();
        assert_eq!(lower.max_abs(), 0.0);
        let printed = lower_wavefunction_printed(0, &reference(), &grid).unwrap();
        assert!(printed.max_abs() > 0.0);
    }

    #[test]
    fn lower_component_matches_ladder_application() {
        // ψ− = i A† Φ+ / (D+ sqrt(v_f)) evaluated with finite differences
        let params = reference();
        let grid = Grid::new(Coordinate::T, -60.0, 9.0, 20001).unwrap();
        for n in 1..4 {
            let (phi, c) = upper_wavefunction(n, &params, &grid, true).unwrap();
            let lowered = apply_ladder(&phi, LadderSign::Minus, &params).unwrap();
            let level = closed_form_level(&params, n).unwrap();
            let lower = lower_wavefunction_scaled(n, &params, &grid, c).unwrap();
            let peak = lower.max_abs();
            for (i, v) in lower.values().iter().enumerate().skip(4).take(grid.len() - 8) {
                let expected = lowered.values()[i] / (level.energy + 0.5);
                assert!(v.re == 0.0);
                assert!((v.im - expected).abs() < 1e-7 * peak, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn lower_component_proportional_form() {
        // n = 1: ψ− ∝ x^{(κ−1)/2} e^{−ω1x/α} [n L_n^κ + ξ L_{n−1}^{κ+1}]
        let params = reference();
        let grid = Grid::new(Coordinate::X, 0.01, 12.0, 3001).unwrap();
        let lower = lower_wavefunction_operator(1, &params, &grid).unwrap();
        let k = 6.0;
        let peak = lower.max_abs();
        let mut ratio: Option<f64> = None;
        for (x, v) in grid.points().zip(lower.values()) {
            if v.norm() <= 1e-8 * peak {
                continue;
            }
            let xi = 8.0 * x;
            let form = x.powf(0.5 * (k - 1.0))
                * (-4.0 * x).exp()
                * (laguerre_unchecked(1, k, xi) + xi * laguerre_unchecked(0, k + 1.0, xi));
            let r = v.im / form;
            match ratio {
                None => ratio = Some(r),
                Some(r0) => assert!((r - r0).abs() <= 1e-10 * r0.abs(), "x={x}"),
            }
        }
    }

    #[test]
    fn printed_form_examples() {
        let params = reference();
        let l0 = closed_form_level(&params, 0).unwrap();
        assert_eq!(printed_denominator(&l0), 0.75);
        assert_eq!(printed_bracket(&params, &l0, 1.0), 4.25);
    }

    #[test]
    fn spinor_normalization_constant_is_smaller() {
        let params = reference();
        let grid = t_grid();
        let c = normalization_constant(2, &params, &grid, Normalization::Component).unwrap();
        let s = normalization_constant(2, &params, &grid, Normalization::Spinor).unwrap();
        assert!(s < c);
        let up = upper_wavefunction(2, &params, &grid, false).unwrap().0.scaled(s);
        let lo = lower_wavefunction_scaled(2, &params, &grid, s).unwrap();
        assert!((up.norm_sqr() + lo.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn numeric_spectrum_reference() {
        let (spec, pairs) = numeric_spectrum(&reference(), &t_grid()).unwrap();
        assert_eq!(spec.levels.len(), 4);
        assert_eq!(pairs.len(), 4);
        for (num, exact) in spec.levels.iter().zip(closed_form_spectrum(&reference()).levels) {
            assert!((num.ksq - exact.ksq).abs() < 1e-3);
        }
    }

    #[test]
    fn count_nodes_ignores_tails() {
        assert_eq!(count_nodes(&[1e-20, -1e-20, 1.0, 0.5, -0.3, -1.0, 1e-20], 1e-8), 1);
        assert_eq!(count_nodes(&[0.0, 0.0], 1e-8), 0);
    }
}
