use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::Serialize;

use super::{PointSet, GRID};
use crate::error::{Error, Result};

/// Added to every computed `|N^{-1} Σ e(k·x)|` so the returned bound stays
/// above the true value despite `f64` rounding.
const TRIG_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EtksParams {
    pub k_max: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct EtksBound {
    pub k_max: u32,
    pub dim: usize,
    /// `(2K+1)^s - 1`
    pub frequencies: u64,
    pub value: f64,
}

/// `|N^{-1} Σ_n e(k·x_n)|` with the phases `k·x_n mod 1` reduced exactly on
/// the grid.
pub fn trig_sum_abs(x: &PointSet, k: &[i64]) -> f64 {
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for p in x.points() {
        let phase = p
            .iter()
            .zip(k)
            .fold(0i128, |acc, (&v, &kk)| acc + v as i128 * kk as i128)
            .rem_euclid(GRID as i128);
        let angle = TAU * phase as f64 / GRID as f64;
        re += angle.cos();
        im += angle.sin();
    }
    re.hypot(im) / x.len() as f64
}

fn r_weight(k: &[i64]) -> f64 {
    k.iter().map(|&v| v.unsigned_abs().max(1) as f64).product()
}

/// `(3/2)^s (2/(K+1) + Σ_{0<‖k‖∞<=K} |N^{-1} Σ e(k·x)| / r(k))`.
///
/// Entries of `sums` are used where present; the rest are computed.
pub fn etks_bound(x: &PointSet, p: EtksParams, sums: Option<&BTreeMap<Vec<i64>, f64>>) -> Result<EtksBound> {
    if p.k_max == 0 {
        return Err(Error::Domain("K must be at least 1".into()));
    }
    let s = x.dim();
    let k_max = p.k_max as i64;
    let side = 2 * k_max + 1;
    let total = (side as u64).checked_pow(s as u32).ok_or_else(|| {
        Error::EnumerationBudget(format!("(2K+1)^s overflows for K = {k_max}, s = {s}"))
    })?;
    let mut acc = 0.0f64;
    let mut k = vec![0i64; s];
    for code in 0..total {
        let mut c = code;
        for slot in k.iter_mut() {
            *slot = (c % side as u64) as i64 - k_max;
            c /= side as u64;
        }
        if k.iter().all(|&v| v == 0) {
            continue;
        }
        let t = match sums.and_then(|m| m.get(&k)) {
            Some(&v) => v,
            None => trig_sum_abs(x, &k) + TRIG_SLACK,
        };
        acc += t / r_weight(&k);
    }
    let value = 1.5f64.powi(s as i32) * (2.0 / (k_max as f64 + 1.0) + acc);
    Ok(EtksBound {
        k_max: p.k_max,
        dim: s,
        frequencies: total - 1,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::exact_discrepancy;

    fn set(points: &[Vec<f64>]) -> PointSet {
        PointSet::from_f64(points).unwrap()
    }

    #[test]
    fn examples() {
        let half = set(&[vec![0.0], vec![0.5]]);
        let b = etks_bound(&half, EtksParams { k_max: 1 }, None).unwrap();
        assert!((b.value - 1.5).abs() < 1e-9);
        assert_eq!(b.frequencies, 2);
        let zero = set(&[vec![0.0]]);
        // k = 1 and k = -1 both contribute |e(0)| = 1
        let b = etks_bound(&zero, EtksParams { k_max: 1 }, None).unwrap();
        assert!((b.value - 4.5).abs() < 1e-9);
        assert!(etks_bound(&zero, EtksParams { k_max: 0 }, None).is_err());
    }

    #[test]
    fn vanishing_sums_reduce_to_the_leading_term() {
        let x = set(&[vec![0.3, 0.3]]);
        let mut sums = BTreeMap::new();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                sums.insert(vec![a, b], 0.0);
            }
        }
        let v = etks_bound(&x, EtksParams { k_max: 2 }, Some(&sums)).unwrap().value;
        assert!((v - 2.25 * 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_bound_decreases_in_k() {
        // N equally spaced points: sums vanish for 0 < |k| < N
        let n = 16;
        let x = set(&(0..n).map(|i| vec![i as f64 / n as f64]).collect::<Vec<_>>());
        let d = exact_discrepancy(&x).unwrap();
        let mut prev = f64::INFINITY;
        for k_max in 1..n as u32 {
            let v = etks_bound(&x, EtksParams { k_max }, None).unwrap().value;
            assert!(v <= prev + 1e-9);
            assert!(num_traits::ToPrimitive::to_f64(&d).unwrap() <= v);
            prev = v;
        }
    }
}
