//! Theoretical bounds for `S(N; k, R)`, all with unit absolute constants.
//! They are for ratio tracking only; the true constants are unknown.

use num_traits::ToPrimitive;
use serde::Serialize;

use super::expsum::ExpSumSpec;
use crate::error::{Error, Result};
use crate::kernel::{ratio_f64, ExponentC};

/// Number of interior points sampled on top of the endpoints when
/// estimating derivative bounds.
const INTERIOR_SAMPLES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KusminLandau {
    Applicable { delta: f64, bound: f64 },
    Inapplicable { reason: String },
}

/// `1/δ` for a monotone derivative staying at distance `>= δ` from the
/// integers.
pub fn kusmin_landau_from_delta(delta: f64) -> KusminLandau {
    if delta > 0.0 && delta <= 0.5 {
        KusminLandau::Applicable { delta, bound: 1.0 / delta }
    } else {
        KusminLandau::Inapplicable {
            reason: format!("delta = {delta} is not in (0, 1/2]"),
        }
    }
}

fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Bound for `Σ_{N<n<=2N} e(a t^{{c}})`, whose derivative
/// `a{c} t^{{c}-1}` is monotone on `[N, 2N]`.
pub fn kusmin_landau_bound(c: ExponentC, a: f64, n: u64) -> Result<KusminLandau> {
    if a == 0.0 || !a.is_finite() || n == 0 {
        return Err(Error::Domain("need a nonzero finite a and N >= 1".into()));
    }
    let fc = ratio_f64(&c.frac());
    let deriv = |t: f64| a * fc * t.powf(fc - 1.0);
    let (d1, d2) = (deriv(n as f64), deriv(2.0 * n as f64));
    if d1.floor() != d2.floor() || d1.fract() == 0.0 || d2.fract() == 0.0 {
        return Ok(KusminLandau::Inapplicable {
            reason: format!("derivative range [{}, {}] meets an integer", d1.min(d2), d1.max(d2)),
        });
    }
    Ok(kusmin_landau_from_delta(dist_to_int(d1).min(dist_to_int(d2))))
}

/// Hypotheses of the `Q = 2^q` van der Corput estimate:
/// `λ <= |f^{(q+2)}| <= αλ` on `[N, 2N]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VdcParams {
    pub q: u32,
    pub lambda: f64,
    pub alpha: f64,
}

impl VdcParams {
    pub fn new(q: u32, lambda: f64, alpha: f64) -> Result<Self> {
        if q > 30 || !(lambda > 0.0) || !(alpha >= 1.0) || !lambda.is_finite() || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "need q <= 30, lambda > 0, alpha >= 1 (got {q}, {lambda}, {alpha})"
            )));
        }
        Ok(VdcParams { q, lambda, alpha })
    }

    pub fn big_q(&self) -> f64 {
        (1u64 << self.q) as f64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VdcBound {
    pub terms: [f64; 3],
    pub total: f64,
}

/// `N(α²λ)^{1/(4Q-2)} + N^{1-1/(2Q)} α^{1/(2Q)} + N^{((Q-1)/Q)²} λ^{-1/(2Q)}`
pub fn vdc_bound(p: &VdcParams, n: u64) -> VdcBound {
    let q = p.big_q();
    let n = n as f64;
    let terms = [
        n * (p.alpha * p.alpha * p.lambda).powf(1.0 / (4.0 * q - 2.0)),
        n.powf(1.0 - 1.0 / (2.0 * q)) * p.alpha.powf(1.0 / (2.0 * q)),
        n.powf(((q - 1.0) / q).powi(2)) * p.lambda.powf(-1.0 / (2.0 * q)),
    ];
    VdcBound {
        terms,
        total: terms.iter().sum(),
    }
}

/// `N^{1-θ}`
pub fn vdc_target(c: ExponentC, n: u64) -> f64 {
    (n as f64).powf(1.0 - c.theta())
}

/// `q = ⌊c⌋ - ℓ0 - 1` with `ℓ0` the first nonzero index of `k`; `None`
/// when only `k_{⌊c⌋}` is nonzero (the Kusmin–Landau case) or `k = 0`.
pub fn vdc_order(c: ExponentC, k: &[i64]) -> Option<u32> {
    let ell0 = k.iter().position(|&v| v != 0)? as u32;
    (ell0 < c.floor()).then(|| c.floor() - ell0 - 1)
}

/// `f^{(j)}(t)` for `f(t) = Σ a_ℓ t^{c-ℓ}`.
fn derivative(coeffs: &[f64], c: f64, j: u32, t: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(ell, &a)| {
            let e = c - ell as f64;
            let falling: f64 = (0..j).map(|i| e - i as f64).product();
            a * falling * t.powf(e - j as f64)
        })
        .sum()
}

/// `λ` and `α` read off `|f^{(q+2)}|` at the endpoints of `[N, 2N]` and at
/// evenly spaced interior points.
pub fn estimate_vdc_params(spec: &ExpSumSpec) -> Result<VdcParams> {
    spec.validate()?;
    let q = vdc_order(spec.c, &spec.k).ok_or_else(|| {
        Error::Domain("van der Corput needs a nonzero k_l with l < floor(c); use the Kusmin-Landau bound".into())
    })?;
    let coeffs: Vec<f64> = spec.coefficients().iter().map(|a| a.to_f64().unwrap_or(0.0)).collect();
    let c = spec.c.as_f64();
    let n = spec.n as f64;
    let samples = (0..=INTERIOR_SAMPLES + 1).map(|i| n + n * i as f64 / (INTERIOR_SAMPLES + 1) as f64);
    let values: Vec<f64> = samples.map(|t| derivative(&coeffs, c, q + 2, t)).collect();
    let sign_change = values.iter().any(|v| v.signum() != values[0].signum());
    let lo = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let hi = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sign_change || !(lo > 0.0) {
        return Err(Error::Domain(format!("f^(q+2) vanishes on [{n}, {}]", 2.0 * n)));
    }
    VdcParams::new(q, lo, hi / lo)
}
