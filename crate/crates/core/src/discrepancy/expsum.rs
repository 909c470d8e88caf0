//! `S(N; k, R) = Σ_{n=N+1}^{2N} e(R^{-1} Σ_ℓ k_ℓ γ_c(ℓ) n^{c-ℓ})`.

use std::f64::consts::TAU;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{bits_for_width, gamma_any, pow_enclosure, ExponentC};

/// Terms per parallel task; fixed so the reduction order never depends on
/// the thread count.
const CHUNK: usize = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct ExpSumSpec {
    pub c: ExponentC,
    pub n: u64,
    pub modulus: u64,
    /// `k_0..=k_{⌊c⌋}`
    pub k: Vec<i64>,
}

impl ExpSumSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.modulus == 0 {
            return Err(Error::Domain("N and R must be positive".into()));
        }
        if self.k.len() != self.c.floor() as usize + 1 {
            return Err(Error::Domain(format!(
                "k needs {} entries (k_0..k_floor(c)), got {}",
                self.c.floor() + 1,
                self.k.len()
            )));
        }
        Ok(())
    }

    /// `a_ℓ = k_ℓ γ_c(ℓ) / R`
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.k
            .iter()
            .enumerate()
            .map(|(ell, &k)| {
                gamma_any(self.c, ell as u32) * BigRational::new(BigInt::from(k), BigInt::from(self.modulus))
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpSumValue {
    pub re: f64,
    pub im: f64,
    /// Bound on `|computed - S|`.
    pub error: f64,
    pub abs: f64,
    /// `|S| / N^{1-θ}`
    pub ratio: f64,
}

/// Fixed-point phases `{γ_c(ℓ) n^{c-ℓ} / R}` (scaled by `2^64`) for every
/// `n` in `(N, 2N]`, reusable across frequency vectors `k`.
#[derive(Clone, Debug)]
pub struct PhaseTable {
    c: ExponentC,
    n: u64,
    modulus: u64,
    /// `phases[n - N - 1][ℓ]`
    phases: Vec<Vec<u64>>,
    /// Bound on `|stored/2^64 - true|` for any coordinate.
    coord_error: f64,
}

impl PhaseTable {
    /// Coordinates accurate to `coord_tol` (plus `2^-64` rounding).
    pub fn new(c: ExponentC, n: u64, modulus: u64, coord_tol: f64) -> Result<Self> {
        if n == 0 || modulus == 0 {
            return Err(Error::Domain("N and R must be positive".into()));
        }
        if !(coord_tol > 0.0) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        let factors: Vec<BigRational> = (0..=c.floor())
            .map(|ell| gamma_any(c, ell) / BigRational::from_integer(BigInt::from(modulus)))
            .collect();
        let bits: Vec<u32> = factors.iter().map(|f| bits_for_width(f, coord_tol)).collect();
        let two64 = BigInt::from(1u8) << 64;
        let ns: Vec<u64> = (n + 1..=2 * n).collect();
        let phases = ns
            .par_iter()
            .with_min_len(256)
            .map(|&m| {
                let mb = BigUint::from(m);
                factors
                    .iter()
                    .zip(&bits)
                    .enumerate()
                    .map(|(ell, (f, &b))| {
                        let e = pow_enclosure(&mb, c.shifted(ell as u32), b).scale(f);
                        e.mid_fixed(64).mod_floor(&two64).to_u64().expect("reduced mod 2^64")
                    })
                    .collect()
            })
            .collect();
        Ok(PhaseTable {
            c,
            n,
            modulus,
            phases,
            coord_error: coord_tol / 2.0 + 2f64.powi(-63),
        })
    }

    pub fn evaluate(&self, k: &[i64]) -> Result<ExpSumValue> {
        if k.len() != self.c.floor() as usize + 1 {
            return Err(Error::Domain("k has the wrong length".into()));
        }
        let n = self.n as f64;
        let ratio_den = n.powf(1.0 - self.c.theta());
        if k.iter().all(|&v| v == 0) {
            return Ok(ExpSumValue {
                re: n,
                im: 0.0,
                error: 0.0,
                abs: n,
                ratio: n / ratio_den,
            });
        }
        let partials: Vec<(f64, f64)> = self
            .phases
            .par_chunks(CHUNK)
            .map(|chunk| {
                let terms: Vec<(f64, f64)> = chunk
                    .iter()
                    .map(|row| {
                        let phase = row
                            .iter()
                            .zip(k)
                            .fold(0u64, |acc, (&p, &kk)| acc.wrapping_add(p.wrapping_mul(kk as u64)));
                        let angle = TAU * (phase as f64 / 2f64.powi(64));
                        (angle.cos(), angle.sin())
                    })
                    .collect();
                pairwise(&terms)
            })
            .collect();
        let (re, im) = pairwise(&partials);
        let k_abs: f64 = k.iter().map(|v| v.unsigned_abs() as f64).sum();
        // |e(x) - e(y)| <= 2π|x - y|; each term also carries f64 rounding
        let error = n * (TAU * k_abs * self.coord_error + 1e-15) + n * 1e-15;
        let abs = re.hypot(im);
        Ok(ExpSumValue {
            re,
            im,
            error,
            abs,
            ratio: abs / ratio_den,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

/// Sum with a fixed bracketing.
fn pairwise(xs: &[(f64, f64)]) -> (f64, f64) {
    match xs.len() {
        0 => (0.0, 0.0),
        1 => xs[0],
        len => {
            let (a, b) = xs.split_at(len / 2);
            let (ar, ai) = pairwise(a);
            let (br, bi) = pairwise(b);
            (ar + br, ai + bi)
        }
    }
}

/// `S(N; k, R)` within `tol`.
pub fn exp_sum(spec: &ExpSumSpec, tol: f64) -> Result<ExpSumValue> {
    spec.validate()?;
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let n = spec.n as f64;
    let k_abs: f64 = spec.k.iter().map(|v| v.unsigned_abs() as f64).sum::<f64>().max(1.0);
    let rounding = 2.0 * n * 1e-15;
    if rounding >= tol {
        return Err(Error::Domain(format!("tolerance {tol} is below f64 rounding for N = {}", spec.n)));
    }
    // spend half the budget on coordinates, half on rounding headroom
    let coord_tol = (tol / 2.0) / (n * TAU * k_abs);
    let table = PhaseTable::new(spec.c, spec.n, spec.modulus, coord_tol)?;
    let v = table.evaluate(&spec.k)?;
    debug_assert!(v.error <= tol);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u64, modulus: u64, k: Vec<i64>) -> ExpSumSpec {
        ExpSumSpec {
            c: ExponentC::new(3, 2).unwrap(),
            n,
            modulus,
            k,
        }
    }

    #[test]
    fn examples() {
        let v = exp_sum(&spec(5, 7, vec![0, 0]), 1e-9).unwrap();
        assert_eq!((v.re, v.im, v.error), (5.0, 0.0, 0.0));
        let v = exp_sum(&spec(1, 1, vec![1, 0]), 1e-12).unwrap();
        assert!((v.re - 0.47307004268786912209).abs() < 1e-12);
        assert!((v.im + 0.88102482071238928664).abs() < 1e-12);
        let v = exp_sum(&spec(2, 2, vec![1, 0]), 1e-12).unwrap();
        assert!((v.re - 0.18393741358549702930).abs() < 1e-12);
        assert!((v.im + 0.57796354128480446173).abs() < 1e-12);
        assert!(v.error <= 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(exp_sum(&spec(0, 2, vec![1, 0]), 1e-9).is_err());
        assert!(exp_sum(&spec(3, 2, vec![1]), 1e-9).is_err());
        assert!(exp_sum(&spec(3, 2, vec![1, 0]), 0.0).is_err());
    }

    #[test]
    fn two_precisions_agree() {
        for k in [vec![1, 0], vec![3, -2], vec![0, 5]] {
            let s = spec(20_000, 11, k);
            let a = exp_sum(&s, 1e-6).unwrap();
            let b = exp_sum(&s, 1e-8).unwrap();
            assert!((a.re - b.re).hypot(a.im - b.im) <= 1e-6);
            assert!(a.abs <= 20_000.0 + a.error);
        }
    }

    #[test]
    fn thread_count_does_not_change_the_bits() {
        let s = spec(30_000, 5, vec![2, 1]);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| exp_sum(&s, 1e-6).unwrap());
        let b = four.install(|| exp_sum(&s, 1e-6).unwrap());
        assert_eq!((a.re.to_bits(), a.im.to_bits()), (b.re.to_bits(), b.im.to_bits()));
    }
}
