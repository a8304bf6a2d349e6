//! Associated Laguerre polynomials `L_n^κ(ξ)` with a real upper index.

use crate::error::{Error, Result};

/// Degree and upper index of an associated Laguerre polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreOrder {
    pub n: usize,
    pub kappa: f64,
}

impl LaguerreOrder {
    pub fn new(n: i64, kappa: f64) -> Result<Self> {
        let n = degree(n)?;
        Ok(Self { n, kappa })
    }

    pub fn eval(&self, xi: f64) -> f64 {
        laguerre_unchecked(self.n, self.kappa, xi)
    }

    pub fn deriv(&self, xi: f64) -> f64 {
        laguerre_deriv_unchecked(self.n, self.kappa, xi)
    }
}

fn degree(n: i64) -> Result<usize> {
    usize::try_from(n)
        .map_err(|_| Error::Domain(format!("Laguerre degree must be >= 0 (got {n})")))
}

/// `L_n^κ(ξ)` via `(k+1) L_{k+1} = (2k + 1 + κ − ξ) L_k − (k + κ) L_{k−1}`.
pub fn laguerre(n: i64, kappa: f64, xi: f64) -> Result<f64> {
    Ok(laguerre_unchecked(degree(n)?, kappa, xi))
}

/// `d/dξ L_n^κ(ξ) = −L_{n−1}^{κ+1}(ξ)`.
pub fn laguerre_deriv(n: i64, kappa: f64, xi: f64) -> Result<f64> {
    Ok(laguerre_deriv_unchecked(degree(n)?, kappa, xi))
}

pub(crate) fn laguerre_unchecked(n: usize, kappa: f64, xi: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + kappa - xi;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + kappa - xi) * cur - (kf + kappa) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Degree `n - 1` with the convention `L_{-1} ≡ 0`.
pub(crate) fn laguerre_lowered(n: usize, kappa: f64, xi: f64) -> f64 {
    match n {
        0 => 0.0,
        _ => laguerre_unchecked(n - 1, kappa, xi),
    }
}

pub(crate) fn laguerre_deriv_unchecked(n: usize, kappa: f64, xi: f64) -> f64 {
    -laguerre_lowered(n, kappa + 1.0, xi)
}

/// Second derivative, `L_{n−2}^{κ+2}(ξ)`.
pub(crate) fn laguerre_deriv2_unchecked(n: usize, kappa: f64, xi: f64) -> f64 {
    match n {
        0 | 1 => 0.0,
        _ => laguerre_unchecked(n - 2, kappa + 2.0, xi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn closed_form(n: usize, k: f64, x: f64) -> f64 {
        match n {
            0 => 1.0,
            1 => 1.0 + k - x,
            2 => (k + 2.0) * (k + 1.0) / 2.0 - (k + 2.0) * x + x * x / 2.0,
            _ => unreachable!(),
        }
    }

    fn central_difference(n: i64, k: f64, x: f64, step: f64) -> f64 {
        (laguerre(n, k, x + step).unwrap() - laguerre(n, k, x - step).unwrap()) / (2.0 * step)
    }

    #[test]
    fn value_examples() {
        assert_eq!(laguerre(0, 8.0, 3.0).unwrap(), 1.0);
        assert_eq!(laguerre(1, 8.0, 2.0).unwrap(), 7.0);
        assert_relative_eq!(laguerre(2, 4.0, 1.0).unwrap(), 9.5, max_relative = 1e-15);
        assert!(matches!(laguerre(-1, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(laguerre_deriv(0, 3.3, 1.7).unwrap(), 0.0);
        assert_eq!(laguerre_deriv(1, 8.0, 2.0).unwrap(), -1.0);
        let fd = central_difference(3, 2.0, 1.5, 1e-5);
        let exact = laguerre_deriv(3, 2.0, 1.5).unwrap();
        assert_relative_eq!(exact, fd, max_relative = 1e-8);
        assert!(laguerre_deriv(-2, 1.0, 1.0).is_err());
    }

    #[test]
    fn order_type() {
        let o = LaguerreOrder::new(2, 4.0).unwrap();
        assert_relative_eq!(o.eval(1.0), 9.5, max_relative = 1e-15);
        assert_eq!(o.deriv(1.0), -laguerre(1, 5.0, 1.0).unwrap());
        assert!(LaguerreOrder::new(-3, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn recurrence_matches_closed_forms(n in 0usize..3, k in 0.5f64..10.0, x in 0.0f64..50.0) {
            let got = laguerre_unchecked(n, k, x);
            let want = closed_form(n, k, x);
            let scale = want.abs().max(1.0);
            prop_assert!((got - want).abs() <= 1e-13 * scale, "n={n} k={k} x={x}: {got} vs {want}");
        }

        #[test]
        fn derivative_identity_vs_finite_difference(n in 0i64..=6, k in 0.5f64..10.0, x in 0.1f64..20.0) {
            let exact = laguerre_deriv(n, k, x).unwrap();
            let step = 1e-5 * x.max(1.0);
            let fd = central_difference(n, k, x, step);
            let scale = exact.abs().max(1e-3 * laguerre(n, k, x).unwrap().abs()).max(1e-12);
            prop_assert!((exact - fd).abs() <= 1e-7 * scale.max(exact.abs()) + 1e-9 * laguerre(n, k, x).unwrap().abs().max(1.0),
                "n={n} k={k} x={x}: {exact} vs {fd}");
        }

        #[test]
        fn laguerre_ode_residual(n in 0usize..=6, k in 0.5f64..6.0, x in 0.0f64..15.0) {
            let l = laguerre_unchecked(n, k, x);
            let d1 = laguerre_deriv_unchecked(n, k, x);
            let d2 = laguerre_deriv2_unchecked(n, k, x);
            let r = x * d2 + (k + 1.0 - x) * d1 + n as f64 * l;
            let scale = (x * d2).abs().max(((k + 1.0 - x) * d1).abs()).max((n as f64 * l).abs()).max(1.0);
            prop_assert!(r.abs() <= 1e-10 * scale, "residual {r} (scale {scale})");
        }
    }
}
