//! Physical parameters and profile functions.
//!
//! On `x > 0` the superpotential is `W = ω0 − ω1 x`, the Fermi velocity is
//! `v_f = α x` and the mass is `m = 1 / (2 v_f²)`, so `m v_f² = 1/2`
//! everywhere on the support. All three vanish (mass: undefined) on `x <= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{t_to_x, PointCoordinate, ScalarField};

/// Value of `m0 v0²` fixed by `m = 1/(2 v_f²)`.
pub const CONSTANCY_PRODUCT: f64 = 0.5;

/// Tolerance on the von Roos constraint `η + β + γ = −1`.
pub const AMBIGUITY_CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorseParams {
    omega0: f64,
    omega1: f64,
    alpha: f64,
    #[serde(default)]
    lambda_shift: f64,
}

impl MorseParams {
    pub fn new(omega0: f64, omega1: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("omega0", omega0), ("omega1", omega1), ("alpha", alpha)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0 (got {v})"
                )));
            }
        }
        Ok(Self {
            omega0,
            omega1,
            alpha,
            lambda_shift: 0.0,
        })
    }

    /// Constant energy offset `Λ` carried by the shifted partner potentials
    /// `U± = V± + Λ`. It cancels in every Hamiltonian `−∂² + U± − Λ`.
    pub fn with_lambda_shift(mut self, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda shift must be finite (got {lambda})"
            )));
        }
        self.lambda_shift = lambda;
        Ok(self)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda_shift(&self) -> f64 {
        self.lambda_shift
    }

    /// `m0 v0²`.
    pub fn rest_energy(&self) -> f64 {
        CONSTANCY_PRODUCT
    }

    /// `W̃(t) = W(x(t)) = ω0 − ω1 e^{αt}`.
    pub fn superpotential_t(&self, t: f64) -> f64 {
        self.omega0 - self.omega1 * t_to_x(t, self.alpha)
    }

    /// `dW̃/dt = −α ω1 e^{αt}`.
    pub fn superpotential_t_deriv(&self, t: f64) -> f64 {
        -self.alpha * self.omega1 * t_to_x(t, self.alpha)
    }
}

/// Ordering parameters `(η, β, γ)` of the von Roos kinetic operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityParams {
    eta: f64,
    beta: f64,
    gamma: f64,
}

impl AmbiguityParams {
    pub fn new(eta: f64, beta: f64, gamma: f64) -> Result<Self> {
        if ![eta, beta, gamma].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("ambiguity parameters must be finite".into()));
        }
        let sum = eta + beta + gamma;
        if (sum + 1.0).abs() > AMBIGUITY_CONSTRAINT_TOL {
            return Err(Error::InvalidParameter(format!(
                "ambiguity parameters must satisfy eta + beta + gamma = -1 (got {sum})"
            )));
        }
        Ok(Self { eta, beta, gamma })
    }

    /// BenDaniel–Duke ordering `η = γ = 0, β = −1`.
    pub fn ben_daniel_duke() -> Self {
        Self {
            eta: 0.0,
            beta: -1.0,
            gamma: 0.0,
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Coefficient of `m''/m²`: `(β + 1)/4`.
    fn second_derivative_coeff(&self) -> f64 {
        0.25 * (self.beta + 1.0)
    }

    /// Coefficient of `m'²/m³`: `−(η(η+β+1) + β + 1)/2`, with
    /// `η(η+β+1) = −ηγ` under the constraint.
    fn gradient_sq_coeff(&self) -> f64 {
        -0.5 * (-(self.eta * self.gamma) + self.beta + 1.0)
    }
}

/// Profile values at one point. `mass` is `+∞` off the support `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub w: f64,
    pub vf: f64,
    pub mass: f64,
}

impl ProfileSample {
    pub fn has_mass(&self) -> bool {
        self.mass.is_finite()
    }
}

pub fn eval_profiles(x: f64, params: &MorseParams) -> ProfileSample {
    if x > 0.0 {
        let vf = params.alpha * x;
        ProfileSample {
            w: params.omega0 - params.omega1 * x,
            vf,
            mass: 1.0 / (2.0 * vf * vf),
        }
    } else {
        ProfileSample {
            w: 0.0,
            vf: 0.0,
            mass: f64::INFINITY,
        }
    }
}

/// `m(x) v_f(x)²` at every probe; the probes must agree to 1e-14 relative.
pub fn constancy_product(params: &MorseParams, probe_points: &[f64]) -> Result<f64> {
    let mut common: Option<f64> = None;
    for &x in probe_points {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!(
                "constancy product is defined on x > 0 only (probe {x})"
            )));
        }
        let s = eval_profiles(x, params);
        let product = s.mass * s.vf * s.vf;
        match common {
            None => common = Some(product),
            Some(c) if (product - c).abs() <= 1e-14 * c.abs() => {}
            Some(c) => {
                return Err(Error::Domain(format!(
                    "m v_f^2 is not constant: {c} vs {product} at x = {x}"
                )))
            }
        }
    }
    common.ok_or_else(|| Error::Domain("no probe points given".into()))
}

/// von Roos effective potential
/// `V_eff = V + (β+1)/4 · m''/m² − (η(η+β+1) + β + 1)/2 · m'²/m³`
/// with second-order finite differences for `m'` and `m''` (one-sided at the
/// two ends).
pub fn effective_potential(
    system_potential: &ScalarField,
    mass: &ScalarField,
    ambiguity: &AmbiguityParams,
) -> Result<ScalarField> {
    if !system_potential.same_grid(mass) {
        return Err(Error::GridMismatch(
            "system potential and mass must share one grid".into(),
        ));
    }
    if let Some((i, m)) = mass
        .values()
        .iter()
        .enumerate()
        .find(|(_, m)| !(m.is_finite() && **m > 0.0))
    {
        return Err(Error::Domain(format!(
            "mass must be finite and positive (sample {i} is {m})"
        )));
    }

    let c2 = ambiguity.second_derivative_coeff();
    let c1 = ambiguity.gradient_sq_coeff();
    if c2 == 0.0 && c1 == 0.0 {
        return Ok(system_potential.clone());
    }

    let h = mass.grid().spacing();
    let m = mass.values();
    let dm = first_derivative_o2(m, h);
    let d2m = second_derivative_o2(m, h);
    let values = system_potential
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| v + c2 * d2m[i] / (m[i] * m[i]) + c1 * dm[i] * dm[i] / (m[i] * m[i] * m[i]))
        .collect();
    ScalarField::new(*mass.grid(), values)
}

fn first_derivative_o2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    out[0] = (3.0 * (f[1] - f[0]) - (f[2] - f[1])) / (2.0 * h);
    out[n - 1] = (3.0 * (f[n - 1] - f[n - 2]) - (f[n - 2] - f[n - 3])) / (2.0 * h);
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    out
}

fn second_derivative_o2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let h2 = h * h;
    let mut out = vec![0.0; n];
    // stencils in difference form so constants differentiate to exactly zero
    out[0] = (2.0 * (f[0] - f[1]) - 3.0 * (f[1] - f[2]) + (f[2] - f[3])) / h2;
    out[n - 1] =
        (2.0 * (f[n - 1] - f[n - 2]) - 3.0 * (f[n - 2] - f[n - 3]) + (f[n - 3] - f[n - 4])) / h2;
    for i in 1..n - 1 {
        out[i] = ((f[i + 1] - f[i]) - (f[i] - f[i - 1])) / h2;
    }
    out
}

/// Morse well `ω0² + ω1² s² − 2 ω1 c s` in the variable `s = x = e^{αt}`.
pub fn morse_well(s: f64, params: &MorseParams, centre: f64) -> f64 {
    params.omega0 * params.omega0 + params.omega1 * params.omega1 * s * s
        - 2.0 * params.omega1 * centre * s
}

/// Partner potentials `(V+, V−)` with `V± = W² ± v_f W'`.
///
/// `V+` governs the upper spinor component and carries `ω0 + α/2`; it holds
/// the zero mode. `V−` carries `ω0 − α/2`.
pub fn partner_potentials(
    point: f64,
    coordinate: PointCoordinate,
    params: &MorseParams,
) -> Result<(f64, f64)> {
    let s = match coordinate {
        PointCoordinate::X => {
            if !(point > 0.0) {
                return Err(Error::Domain(format!(
                    "partner potentials in x need x > 0 (got {point})"
                )));
            }
            point
        }
        PointCoordinate::T => t_to_x(point, params.alpha),
    };
    Ok(partner_at(s, params))
}

pub(crate) fn partner_at(s: f64, params: &MorseParams) -> (f64, f64) {
    let half = 0.5 * params.alpha;
    (
        morse_well(s, params, params.omega0 + half),
        morse_well(s, params, params.omega0 - half),
    )
}
