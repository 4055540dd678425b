//! Recurrence/transience classification and the speed of escape.

use serde::{Deserialize, Serialize};

use super::{EnvError, EnvironmentLaw};

/// `|eta|` at or below which a finite-support law is declared recurrent.
pub const EXACT_RECURRENCE_TOL: f64 = 1e-12;
/// Same threshold for laws whose expectations come from quadrature.
pub const QUADRATURE_RECURRENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    TransientRight,
    TransientLeft,
    Recurrent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolomonClass {
    pub regime: Regime,
    /// `E ln rho_0`, in nats.
    pub eta: f64,
}

/// `eta = E ln rho_0`.
pub fn eta(law: &EnvironmentLaw) -> f64 {
    law.expect(|p| ((1.0 - p) / p).ln())
}

/// `E ln^2 rho_0`.
pub fn sigma_squared_logrho(law: &EnvironmentLaw) -> f64 {
    law.expect(|p| ((1.0 - p) / p).ln().powi(2))
}

pub fn classify_solomon(law: &EnvironmentLaw) -> SolomonClass {
    let eta = eta(law);
    let tol = if law.is_exact() { EXACT_RECURRENCE_TOL } else { QUADRATURE_RECURRENCE_TOL };
    let regime = if eta.abs() <= tol {
        Regime::Recurrent
    } else if eta < 0.0 {
        Regime::TransientRight
    } else {
        Regime::TransientLeft
    };
    SolomonClass { regime, eta }
}

/// Almost-sure limit of `X_n / n`.
pub fn solomon_velocity(law: &EnvironmentLaw) -> f64 {
    let m = law.mean_rho();
    if m < 1.0 {
        return (1.0 - m) / (1.0 + m);
    }
    let mi = law.mean_inv_rho();
    if mi < 1.0 {
        return -(1.0 - mi) / (1.0 + mi);
    }
    0.0
}

/// Annealed mean duration of a left excursion from site 1: `2 / (1 - E rho_0)`,
/// or `f64::INFINITY` when `E rho_0 >= 1`.
pub fn annealed_mean_excursion(law: &EnvironmentLaw) -> f64 {
    let m = law.mean_rho();
    if m < 1.0 {
        2.0 / (1.0 - m)
    } else {
        f64::INFINITY
    }
}

/// The unique `k > 0` with `E rho_0^k = 1`.
///
/// The map `k -> E rho^k` is convex, equals 1 at `k = 0` and has slope `eta` there,
/// so a positive root exists iff `eta < 0` and `rho > 1` with positive probability.
pub fn critical_exponent(law: &EnvironmentLaw) -> Result<f64, EnvError> {
    let eta = eta(law);
    if eta >= 0.0 || classify_solomon(law).regime == Regime::Recurrent {
        return Err(EnvError::NoRoot(format!("eta = {eta} is not negative")));
    }
    if law.max_rho() <= 1.0 {
        return Err(EnvError::NoRoot("rho_0 <= 1 almost surely".into()));
    }
    let f = |k: f64| law.moment_rho(k) - 1.0;
    let df = |k: f64| law.expect(|p| {
        let l = ((1.0 - p) / p).ln();
        l * (k * l).exp()
    });

    let mut lo = 1e-6;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 64.0 {
            return Err(EnvError::NoRoot("E(rho^k) < 1 for all k <= 64".into()));
        }
    }
    if f(lo) >= 0.0 {
        return Err(EnvError::NoRoot(format!("E(rho^k) >= 1 already at k = {lo}")));
    }

    let mut k = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fk = f(k);
        if fk.abs() <= 1e-13 {
            break;
        }
        if fk < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
        // Newton step, falling back to bisection when it leaves the bracket.
        let step = k - fk / df(k);
        k = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
    }
    let residual = f(k).abs();
    if residual > 1e-10 {
        return Err(EnvError::NoRoot(format!("root search stalled, |E(rho^k) - 1| = {residual}")));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> EnvironmentLaw {
        EnvironmentLaw::finite(vec![(0.8, 0.5), (0.3, 0.5)]).unwrap()
    }

    fn symmetric() -> EnvironmentLaw {
        EnvironmentLaw::finite(vec![(0.3, 0.5), (0.7, 0.5)]).unwrap()
    }

    fn det(p: f64) -> EnvironmentLaw {
        EnvironmentLaw::deterministic(p).unwrap()
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(&det(0.5)), 0.0);
        assert!(eta(&symmetric()).abs() < 1e-15);
        let expected = (0.25f64.ln() + (7.0f64 / 3.0).ln()) / 2.0;
        assert!((eta(&two_point()) - expected).abs() < 1e-15);
        assert!((eta(&two_point()) + 0.26950).abs() < 1e-5);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_solomon(&two_point()).regime, Regime::TransientRight);
        assert_eq!(classify_solomon(&symmetric()).regime, Regime::Recurrent);
        assert_eq!(classify_solomon(&det(0.3)).regime, Regime::TransientLeft);
        // symmetric interval law goes through the quadrature tolerance
        let u = EnvironmentLaw::uniform(0.2, 0.8).unwrap();
        assert_eq!(classify_solomon(&u).regime, Regime::Recurrent);
    }

    #[test]
    fn velocity_examples() {
        assert!((solomon_velocity(&det(0.7)) - 0.4).abs() < 1e-15);
        assert_eq!(solomon_velocity(&two_point()), 0.0);
        assert_eq!(solomon_velocity(&det(0.5)), 0.0);
        assert!((solomon_velocity(&det(0.3)) + 0.4).abs() < 1e-15);
        assert!((two_point().mean_rho() - 1.291_666_666_666_666_7).abs() < 1e-12);
        assert!((two_point().mean_inv_rho() - 2.214_285_714_285_714).abs() < 1e-12);
    }

    #[test]
    fn critical_exponent_examples() {
        // Frozen from an independent Brent root of (0.25^k + (7/3)^k)/2 = 1.
        let k = critical_exponent(&two_point()).unwrap();
        assert!((k - 0.449_899_203_401_016_5).abs() < 1e-9, "k = {k}");
        assert!((two_point().moment_rho(k) - 1.0).abs() <= 1e-10);
        assert!(matches!(critical_exponent(&det(0.7)), Err(EnvError::NoRoot(_))));
        assert!(matches!(critical_exponent(&symmetric()), Err(EnvError::NoRoot(_))));
        assert!(matches!(critical_exponent(&det(0.3)), Err(EnvError::NoRoot(_))));
    }

    #[test]
    fn critical_exponent_by_bisection_oracle() {
        // Plain bisection, independent of the Newton-safeguarded search.
        let law = EnvironmentLaw::uniform(0.3, 0.95).unwrap();
        let f = |k: f64| law.moment_rho(k) - 1.0;
        let (mut lo, mut hi) = (1e-6, 64.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if f(m) < 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        let k = critical_exponent(&law).unwrap();
        assert!((k - lo).abs() < 1e-8, "{k} vs {lo}");
    }

    #[test]
    fn excursion_means() {
        assert!((annealed_mean_excursion(&det(0.7)) - 3.5).abs() < 1e-12);
        assert!(annealed_mean_excursion(&two_point()).is_infinite());
        assert!(annealed_mean_excursion(&det(0.5)).is_infinite());
    }

    #[test]
    fn sigma_examples() {
        let l = (7.0f64 / 3.0).ln().powi(2);
        assert_eq!(sigma_squared_logrho(&det(0.5)), 0.0);
        assert!((sigma_squared_logrho(&symmetric()) - l).abs() < 1e-14);
        assert!((sigma_squared_logrho(&det(0.3)) - l).abs() < 1e-14);
        assert!((l - 0.717_913_664_216_733_3).abs() < 1e-12);
    }
}
