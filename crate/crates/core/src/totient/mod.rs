//! Totients of `⌊n^c⌋`: the series `Σ φ(⌊n^c⌋)/⌊n^c⌋`, the density of its
//! fractional parts, large-prime products, and the residue windows that
//! force `φ(⌊(m+h)^c⌋)/⌊(m+h)^c⌋` into `[1/H, 3/H]`.

pub mod factor;
pub mod mertens;
pub mod series;
pub mod window;

pub use factor::{euler_phi, euler_phi_u64, factor_u64, factorize, is_prime_u64, phi_sieve, primes_up_to};
pub use mertens::{large_prime_product, MertensQuery, MertensReport};
pub use series::{density_probe, partial_sums, DensityWitness, ExactSum, TotientSeries};
pub use window::{
    build_prime_families, build_window, check_families, crt_residue, greedy_landing_margin, verify_window,
    verify_window_values, CrtSolution, Family, FamilyChecks, FamilyOptions, PrimeFamilies, WindowConstruction,
    WindowReport, WindowRow, DEFAULT_PRIME_LIMIT, MIN_BLOCK_LEN,
};
