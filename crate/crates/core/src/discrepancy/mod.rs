//! Discrepancy of finite point sets in `[0,1)^s`, the Erdős–Turán–Koksma
//! upper bound, and the exponential sums whose smallness drives it.

mod bounds;
mod etks;
mod exact;
mod expsum;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{frac_scaled, gamma_any, ExponentC, Precision};

pub use bounds::{
    estimate_vdc_params, kusmin_landau_bound, kusmin_landau_from_delta, vdc_bound, vdc_order, vdc_target,
    KusminLandau, VdcBound, VdcParams,
};
pub use etks::{etks_bound, trig_sum_abs, EtksBound, EtksParams};
pub use exact::{
    brute_force_discrepancy, discrepancy, exact_discrepancy, DiscrepancyMode, DiscrepancyReport, EXACT_BUDGET,
};
pub use expsum::{exp_sum, ExpSumSpec, ExpSumValue, PhaseTable};

/// Coordinates are stored as numerators over `2^GRID_BITS`.
pub const GRID_BITS: u32 = 48;
pub const GRID: u64 = 1 << GRID_BITS;

/// `N >= 1` points of `[0,1)^s` on the dyadic grid of step `2^-48`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<u64>>,
}

impl PointSet {
    pub fn from_grid(dim: usize, points: Vec<Vec<u64>>) -> Result<Self> {
        if dim == 0 || points.is_empty() {
            return Err(Error::Domain("a point set needs s >= 1 and N >= 1".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::Domain(format!("point of dimension {} in a set of dimension {dim}", p.len())));
            }
            if p.iter().any(|&x| x >= GRID) {
                return Err(Error::Domain("grid coordinate outside [0, 2^48)".into()));
            }
        }
        Ok(PointSet { dim, points })
    }

    /// Rounds each coordinate down to the grid.
    pub fn from_f64(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let grid = points
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&x| {
                        if !(0.0..1.0).contains(&x) {
                            return Err(Error::Domain(format!("coordinate {x} outside [0, 1)")));
                        }
                        Ok(((x * GRID as f64) as u64).min(GRID - 1))
                    })
                    .collect::<Result<Vec<u64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PointSet::from_grid(dim, grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<u64>] {
        &self.points
    }

    pub fn point_f64(&self, i: usize) -> Vec<f64> {
        self.points[i].iter().map(|&x| x as f64 / GRID as f64).collect()
    }
}

/// Points `x_n = ({γ_c(ℓ)(N+n)^{c-ℓ}/R})_{ℓ=0..⌊c⌋}` for `n = 1..=N`, with
/// `N = budget_n`, in dimension `⌊c⌋ + 1`.
pub fn build_residue_pointset(c: ExponentC, modulus: u64, budget_n: u64) -> Result<PointSet> {
    if budget_n == 0 || modulus == 0 {
        return Err(Error::Domain("budget N and modulus must be positive".into()));
    }
    let dim = c.floor() as usize + 1;
    let gamma: Vec<_> = (0..dim as u32).map(|ell| gamma_any(c, ell)).collect();
    let points = (1..=budget_n)
        .map(|n| {
            let m = BigUint::from(budget_n + n);
            gamma
                .iter()
                .enumerate()
                .map(|(ell, g)| {
                    let f = frac_scaled(g, &m, c.shifted(ell as u32), modulus, 1e-12, Precision::default())?;
                    let x = f.interval.mid_fixed(GRID_BITS);
                    Ok(u64::try_from(x).expect("fraction in [0,1)").min(GRID - 1))
                })
                .collect::<Result<Vec<u64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PointSet::from_grid(dim, points)
}
