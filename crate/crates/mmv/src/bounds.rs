//! Closed-form recovery thresholds and failure-probability bounds.
//!
//! All functions are pure. Probability bounds are returned un-clamped: a
//! value above one is vacuous but preserved so bound-versus-empirical curves
//! can be plotted from the raw expressions.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Evaluation record for one bound: whether its precondition holds, by what
/// margin, and the failure probability it certifies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub condition_holds: bool,
    pub condition_margin: f64,
    pub failure_probability: f64,
    pub parameters: BTreeMap<String, f64>,
}

impl BoundReport {
    fn with(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0 && value < 1.0) {
        return Err(Error::OutOfRange {
            name,
            value,
            range: "(0, 1)",
        });
    }
    Ok(())
}

/// Expected Euclidean norm of an L-dimensional standard Gaussian vector:
/// sqrt(2) * Gamma((L+1)/2) / Gamma(L/2), evaluated through log-Gamma so it
/// stays finite for large L.
pub fn expected_gaussian_norm(l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::OutOfRange {
            name: "L",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let lf = l as f64;
    Ok(2f64.sqrt() * (ln_gamma((lf + 1.0) / 2.0) - ln_gamma(lf / 2.0)).exp())
}

/// Tail bound for the norm of a coefficient combination of independent
/// sphere-uniform vectors: P(||sum a_j Z_j|| >= u ||a||) for u > 1.
/// The complex-sphere model doubles the exponent coefficient.
pub fn bernstein_tail(u: f64, l: usize, complex_model: bool) -> Result<f64> {
    if !(u > 1.0) {
        return Err(Error::OutOfRange {
            name: "u",
            value: u,
            range: "(1, inf)",
        });
    }
    if l == 0 {
        return Err(Error::OutOfRange {
            name: "L",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let coef = if complex_model { 1.0 } else { 0.5 };
    let u2 = u * u;
    Ok((-coef * l as f64 * (u2 - u2.ln() - 1.0)).exp())
}

/// Mixed-norm recovery failure bound under the bounded pseudo-inverse
/// column-norm condition: N * exp(-c L) with
/// c = (alpha^-2 - log(alpha^-2) - 1) / 2 (real models) or undivided
/// (complex models).
pub fn l21_failure_bound(
    n_cols: usize,
    l: usize,
    alpha: f64,
    complex_model: bool,
) -> Result<BoundReport> {
    check_unit_interval("alpha", alpha)?;
    let coef = if complex_model { 1.0 } else { 0.5 };
    let inv2 = 1.0 / (alpha * alpha);
    let rate = coef * (inv2 - inv2.ln() - 1.0);
    let failure = n_cols as f64 * bernstein_tail(1.0 / alpha, l, complex_model)?;
    Ok(BoundReport {
        name: "l21_failure".into(),
        condition_holds: true,
        condition_margin: 1.0 - alpha,
        failure_probability: failure,
        parameters: BTreeMap::new(),
    }
    .with("N", n_cols as f64)
    .with("L", l as f64)
    .with("alpha", alpha)
    .with("rate", rate)
    .with("complex", if complex_model { 1.0 } else { 0.0 }))
}

/// Largest alpha for which the mixed-norm failure bound equals epsilon, i.e.
/// the root of alpha^-2 - log(alpha^-2) = 2 log(N/eps)/L + 1, found by
/// bisection to 1e-10.
pub fn min_alpha_for_failure(n_cols: usize, l: usize, epsilon: f64) -> Result<f64> {
    check_unit_interval("epsilon", epsilon)?;
    if n_cols == 0 || l == 0 {
        return Err(Error::InvalidDimension(
            "N and L must be at least 1".into(),
        ));
    }
    let rhs = 2.0 * (n_cols as f64 / epsilon).ln() / l as f64 + 1.0;
    let g = |alpha: f64| {
        let inv2 = 1.0 / (alpha * alpha);
        inv2 - inv2.ln()
    };
    // g decreases in alpha on (0, 1); the inequality g >= rhs holds below the root
    let mut lo = 1e-12;
    let mut hi = 1.0 - 1e-12;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= rhs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Pseudo-inverse norm threshold for Gaussian coefficients and the success
/// probability it certifies: (gamma, P) with
/// gamma = A_L / (3 sqrt(L) + 2 sqrt(k)) and
/// P = 1 - exp(-L/8) - k exp(-A_L^2 / 8). P is not clamped.
pub fn recovery_norm_threshold(k: usize, l: usize) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let a_l = expected_gaussian_norm(l)?;
    let lf = l as f64;
    let kf = k as f64;
    let gamma = a_l / (3.0 * lf.sqrt() + 2.0 * kf.sqrt());
    let p = 1.0 - (-lf / 8.0).exp() - kf * (-a_l * a_l / 8.0).exp();
    Ok((gamma, p))
}

/// Coherence sufficient condition for the bounded-norm property:
/// (sqrt(k) + (k-1) delta) mu < delta implies ||A_S^+ a_l||_2 <= delta.
pub fn coherence_norm_bound(k: usize, mu: f64, delta: f64) -> Result<BoundReport> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    if !(delta > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, inf)",
        });
    }
    if mu < 0.0 {
        return Err(Error::OutOfRange {
            name: "mu",
            value: mu,
            range: "[0, inf)",
        });
    }
    let kf = k as f64;
    let lhs = (kf.sqrt() + (kf - 1.0) * delta) * mu;
    Ok(BoundReport {
        name: "coherence_norm".into(),
        condition_holds: lhs < delta,
        condition_margin: delta - lhs,
        failure_probability: 0.0,
        parameters: BTreeMap::new(),
    }
    .with("k", kf)
    .with("mu", mu)
    .with("delta", delta)
    .with("lhs", lhs)
    .with("norm_bound", delta))
}

/// Restricted-isometry norm bounds.
///
/// Without `eta`: requires the augmented deviation delta < 1/2 and returns
/// delta / (1 - delta). With `eta`, requires delta < 1 and a local
/// 2-coherence bound eta, returning eta / (1 - delta).
pub fn rip_norm_bound(delta: f64, eta: Option<f64>) -> Result<f64> {
    match eta {
        None => {
            if !(delta >= 0.0 && delta < 0.5) {
                return Err(Error::OutOfRange {
                    name: "delta",
                    value: delta,
                    range: "[0, 1/2)",
                });
            }
            Ok(delta / (1.0 - delta))
        }
        Some(eta) => {
            if !(delta >= 0.0 && delta < 1.0) {
                return Err(Error::OutOfRange {
                    name: "delta",
                    value: delta,
                    range: "[0, 1)",
                });
            }
            if eta < 0.0 {
                return Err(Error::OutOfRange {
                    name: "eta",
                    value: eta,
                    range: "[0, inf)",
                });
            }
            Ok(eta / (1.0 - delta))
        }
    }
}

/// Exact value of the constant in the random-support coherence condition:
/// log(2) e^{-1/2} / (4 * 144 * log(3)), approximately 6.64e-4.
pub fn random_support_constant() -> f64 {
    2f64.ln() * (-0.5f64).exp() / (4.0 * 144.0 * 3f64.ln())
}

/// Random-support norm bound: for a uniformly random support of size k >= 4,
/// if mu^2 k log(1/eps) <= c delta^2 and (k/N) ||A||_2^2 <= delta/(4 e^{1/4})
/// then ||A_S^+ a_l||_2 <= sqrt(c) delta / ((1-delta) sqrt(log(1/eps)))
/// outside S, except with probability eps.
pub fn random_support_norm_bound(
    k: usize,
    n_cols: usize,
    mu: f64,
    opnorm_sq: f64,
    delta: f64,
    epsilon: f64,
) -> Result<BoundReport> {
    if k < 4 {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            range: "[4, inf)",
        });
    }
    check_unit_interval("delta", delta)?;
    check_unit_interval("epsilon", epsilon)?;
    let c = random_support_constant();
    let log_inv_eps = (1.0 / epsilon).ln();
    let lhs1 = mu * mu * k as f64 * log_inv_eps;
    let rhs1 = c * delta * delta;
    let lhs2 = (k as f64 / n_cols as f64) * opnorm_sq;
    let rhs2 = delta / (4.0 * (0.25f64).exp());
    let holds = lhs1 <= rhs1 && lhs2 <= rhs2;
    let norm_bound = c.sqrt() * delta / ((1.0 - delta) * log_inv_eps.sqrt());
    Ok(BoundReport {
        name: "random_support_norm".into(),
        condition_holds: holds,
        condition_margin: (rhs1 - lhs1).min(rhs2 - lhs2),
        failure_probability: if holds { epsilon } else { 1.0 },
        parameters: BTreeMap::new(),
    }
    .with("k", k as f64)
    .with("N", n_cols as f64)
    .with("mu", mu)
    .with("opnorm_sq", opnorm_sq)
    .with("delta", delta)
    .with("epsilon", epsilon)
    .with("c", c)
    .with("norm_bound", norm_bound))
}

/// Gram-deviation condition for a uniformly random support:
/// sqrt(144 log(3)/log(2) mu^2 k log(1/eps)) + (k/N)||A||_2^2 <= e^{-1/4} delta
/// implies P(delta(S) >= delta) <= eps. Pure evaluation; callers enforce k >= 4.
pub fn random_support_gram_condition(
    k: usize,
    n_cols: usize,
    mu: f64,
    opnorm_sq: f64,
    delta: f64,
    epsilon: f64,
) -> bool {
    let log_inv_eps = (1.0 / epsilon).ln();
    let root = (144.0 * 3f64.ln() / 2f64.ln() * mu * mu * k as f64 * log_inv_eps).sqrt();
    root + (k as f64 / n_cols as f64) * opnorm_sq <= (-0.25f64).exp() * delta
}

/// Thresholding failure bound: N exp(-cL) with the same exponent structure
/// as the mixed-norm bound, driven by theta = R mu_2(S) < 1.
pub fn thresholding_failure_bound(
    n_cols: usize,
    l: usize,
    theta: f64,
    complex_model: bool,
) -> Result<BoundReport> {
    check_unit_interval("theta", theta)?;
    let coef = if complex_model { 1.0 } else { 0.5 };
    let inv2 = 1.0 / (theta * theta);
    let rate = coef * (inv2 - inv2.ln() - 1.0);
    let failure = n_cols as f64 * bernstein_tail(1.0 / theta, l, complex_model)?;
    Ok(BoundReport {
        name: "thresholding_failure".into(),
        condition_holds: true,
        condition_margin: 1.0 - theta,
        failure_probability: failure,
        parameters: BTreeMap::new(),
    }
    .with("N", n_cols as f64)
    .with("L", l as f64)
    .with("theta", theta)
    .with("rate", rate)
    .with("complex", if complex_model { 1.0 } else { 0.0 }))
}

/// Greedy-pursuit recovery condition:
/// (mu_2(S)^2 + (1+eps)(1-eps)^{-1} mu_2(S)) / (1 - delta(S)) <= 1.
pub fn somp_recovery_condition(mu2: f64, delta_s: f64, eps: f64) -> Result<bool> {
    check_unit_interval("eps", eps)?;
    if !(delta_s >= 0.0 && delta_s < 1.0) {
        return Err(Error::OutOfRange {
            name: "delta_s",
            value: delta_s,
            range: "[0, 1)",
        });
    }
    if mu2 < 0.0 {
        return Err(Error::OutOfRange {
            name: "mu2",
            value: mu2,
            range: "[0, inf)",
        });
    }
    Ok((mu2 * mu2 + (1.0 + eps) / (1.0 - eps) * mu2) / (1.0 - delta_s) <= 1.0)
}

/// Greedy-pursuit failure bound N 2^k exp(-eps^2 A_L^2); the complex model
/// replaces L by 2L inside the Gaussian-norm constant.
pub fn somp_failure_bound(
    n_cols: usize,
    k: usize,
    l: usize,
    eps: f64,
    complex_model: bool,
) -> Result<BoundReport> {
    check_unit_interval("eps", eps)?;
    let a = expected_gaussian_norm(if complex_model { 2 * l } else { l })?;
    let failure = n_cols as f64 * 2f64.powi(k as i32) * (-eps * eps * a * a).exp();
    Ok(BoundReport {
        name: "somp_failure".into(),
        condition_holds: true,
        condition_margin: 1.0 - eps,
        failure_probability: failure,
        parameters: BTreeMap::new(),
    }
    .with("N", n_cols as f64)
    .with("k", k as f64)
    .with("L", l as f64)
    .with("eps", eps)
    .with("a_l", a)
    .with("complex", if complex_model { 1.0 } else { 0.0 }))
}

/// Two-sided Gaussian concentration for B-Lipschitz functions:
/// P(|f(Z) - E f(Z)| >= t) <= exp(-t^2 / (2 B^2)) per side.
pub fn gaussian_lipschitz_tail(t: f64, b: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    if !(b > 0.0) {
        return Err(Error::OutOfRange {
            name: "B",
            value: b,
            range: "(0, inf)",
        });
    }
    Ok((-t * t / (2.0 * b * b)).exp())
}

/// Sample complexity for the augmented Gram deviation of random ensembles:
/// ceil(C1 delta^-2 max{k log(1/delta), log(N/eps)}). The leading constant is
/// caller-supplied.
pub fn spherical_sample_complexity(
    k: usize,
    n_cols: usize,
    delta: f64,
    epsilon: f64,
    c1: f64,
) -> Result<usize> {
    check_unit_interval("delta", delta)?;
    check_unit_interval("epsilon", epsilon)?;
    if !(c1 > 0.0) {
        return Err(Error::OutOfRange {
            name: "C1",
            value: c1,
            range: "(0, inf)",
        });
    }
    if k == 0 || n_cols == 0 {
        return Err(Error::InvalidDimension("k and N must be >= 1".into()));
    }
    let term = (k as f64 * (1.0 / delta).ln()).max((n_cols as f64 / epsilon).ln());
    Ok((c1 / (delta * delta) * term).ceil() as usize)
}

/// Sparsity bound for half-and-half supports on the Dirac+Fourier union:
/// 0.25 n / sqrt(log(eps/(C n)) + log(n)). The inner constant C is a
/// parameter; the argument of the square root must be positive, which
/// requires eps > C.
pub fn dirac_fourier_support_bound(n: usize, epsilon: f64, inner_c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be >= 1".into()));
    }
    if !(inner_c > 0.0) {
        return Err(Error::OutOfRange {
            name: "C",
            value: inner_c,
            range: "(0, inf)",
        });
    }
    let nf = n as f64;
    let arg = (epsilon / (inner_c * nf)).ln() + nf.ln();
    if !(arg > 0.0) {
        return Err(Error::OutOfRange {
            name: "log(eps/(C n)) + log(n)",
            value: arg,
            range: "(0, inf)",
        });
    }
    Ok(0.25 * nf / arg.sqrt())
}
