//! Command-line front end: one subcommand per capability, JSON or CSV on
//! stdout, diagnostics on stderr.
//!
//! Exit status is 0 on success (including an empty search result), 1 on
//! usage and domain errors, 2 when a budget ran out.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::blocks::{
    check_fracgame, find_ap_block, fracgame_scan, missing_block_scan, residue_sequence, BlockQuery,
    DEFAULT_SEARCH_LIMIT,
};
use crate::discrepancy::{
    build_residue_pointset, discrepancy, estimate_vdc_params, etks_bound, exp_sum, kusmin_landau_bound, vdc_bound,
    vdc_order, vdc_target, DiscrepancyMode, EtksParams, ExpSumSpec, PointSet,
};
use crate::error::Error;
use crate::kernel::{floor_pow, ExponentC, Precision};
use crate::report::decimal;
use crate::totient::{
    build_prime_families, build_window, crt_residue, density_probe, euler_phi, factorize, large_prime_product,
    partial_sums, verify_window, verify_window_values, FamilyOptions, MertensQuery, DEFAULT_PRIME_LIMIT,
};

pub const PRECISION_CAP_ENV: &str = "SPSDENSE_PRECISION_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "spsdense", version, about = "Floors of real powers, residue blocks, discrepancy and totient sums")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Exponent c as n/d (non-integral, c > 1).
    #[arg(long = "c", global = true, default_value = "3/2")]
    pub c: String,
    /// Initial working precision in bits.
    #[arg(long, global = true, default_value_t = 64)]
    pub precision_start: u32,
    /// Working-precision cap in bits.
    #[arg(long, global = true, env = PRECISION_CAP_ENV, default_value_t = 16384)]
    pub precision_cap: u32,
    /// Search limit for witness searches.
    #[arg(long, global = true, default_value_t = DEFAULT_SEARCH_LIMIT)]
    pub limit: u64,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized inputs and estimators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified floor(m^c) and an enclosure of {m^c}.
    FloorPow {
        #[arg(long)]
        m: u64,
        /// Last m of a range starting at --m.
        #[arg(long)]
        m_to: Option<u64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// floor(n^c) mod R for n in a range.
    Residues {
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Smallest m with floor((m+h)^c) = r+h (mod R) for h = 1..H.
    FindBlock {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        block_len: u32,
        #[arg(long)]
        residue: u64,
    },
    /// Window conditions for one (m, R, H, r), or a scan with --scan.
    Fracgame {
        #[arg(long, required_unless_present = "scan")]
        m: Option<u64>,
        #[arg(long, required_unless_present = "scan")]
        modulus: Option<u64>,
        #[arg(long, required_unless_present = "scan")]
        block_len: Option<u32>,
        #[arg(long, required_unless_present = "scan")]
        residue: Option<u64>,
        #[arg(long)]
        scan: bool,
        /// Moduli range a..b (inclusive) for --scan.
        #[arg(long, default_value = "2..50")]
        moduli: String,
        /// Block-length range a..b (inclusive) for --scan.
        #[arg(long, default_value = "1..4")]
        block_lens: String,
        #[arg(long, default_value_t = 1000)]
        m_max: u64,
    },
    /// Residue blocks of length H that never occur up to n_to.
    MissingBlocks {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        block_len: u32,
        #[arg(long)]
        n_to: u64,
    },
    /// S(N; k, R) = sum over N < n <= 2N of e(sum_l k_l gamma_l n^(c-l) / R).
    ExpSum {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        modulus: u64,
        /// Comma-separated k_0..k_floor(c).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        k: Vec<i64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Star discrepancy of a point set.
    Discrepancy {
        #[command(flatten)]
        points: PointArgs,
        /// Fall back to a seeded lower-bound estimate with this many random
        /// boxes when the set is over the exact budget.
        #[arg(long)]
        estimate_samples: Option<u64>,
    },
    /// Erdos-Turan-Koksma bound for a point set.
    Etks {
        #[command(flatten)]
        points: PointArgs,
        #[arg(long)]
        k_max: u32,
    },
    /// Kusmin-Landau or van der Corput bound for S(N; k, R).
    VdcBound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        modulus: u64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        k: Vec<i64>,
    },
    /// Euler phi with the factorization.
    Phi {
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<String>,
    },
    /// S_n = sum over m <= n of phi(floor(m^c)) / floor(m^c).
    PhiSums {
        #[arg(long)]
        n_max: u64,
        /// Include the exact numerator and denominator of S_{n_max}.
        #[arg(long)]
        exact_total: bool,
    },
    /// Smallest n with {S_n} within eps of each target t.
    DensityProbe {
        #[arg(long)]
        n_max: u64,
        /// Comma-separated targets in [0, 1), as decimals or a/b.
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        t: Vec<String>,
        #[arg(long, default_value = "0.05")]
        eps: String,
    },
    /// Product of (1 - 1/p) over primes p | n with p >= (log n)^alpha.
    Mertens {
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 0.75)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        c_const: f64,
    },
    /// Prime families, modulus R and residue r for block length H.
    BuildWindow {
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Chinese remainder solution of x = a_i (mod m_i).
    Crt {
        /// Comma-separated a:m pairs.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        pairs: Vec<String>,
        /// Also require x = 0 modulo this value.
        #[arg(long)]
        zero_modulus: Option<String>,
    },
    /// Check the window conclusions at m, or on explicit values.
    VerifyWindow {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, required_unless_present = "values")]
        m: Option<u64>,
        /// Comma-separated n_1..n_H used instead of floor((m+h)^c).
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<String>>,
    },
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// CSV file, one point per line.
    #[arg(long, group = "source")]
    pub input: Option<PathBuf>,
    /// Inline points: coordinates split by ',', points by ';'.
    #[arg(long, group = "source")]
    pub points: Option<String>,
    /// Use the residue point set for modulus R with this budget N.
    #[arg(long, group = "source")]
    pub residue_n: Option<u64>,
    #[arg(long, requires = "residue_n")]
    pub modulus: Option<u64>,
    /// Seeded uniform random set of this size.
    #[arg(long, group = "source")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[arg(long)]
    pub block_len: u32,
    /// Permit H < 21 (toy windows).
    #[arg(long)]
    pub allow_small_h: bool,
    #[arg(long, default_value_t = DEFAULT_PRIME_LIMIT)]
    pub prime_limit: u64,
}

/// Everything that determines a run's output.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub c: ExponentC,
    pub precision_start: u32,
    pub precision_cap: u32,
    pub limit: u64,
    pub threads: usize,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    fn precision(&self) -> Precision {
        Precision {
            start_bits: self.precision_start,
            cap_bits: self.precision_cap,
        }
    }
}

/// A failure with the code printed as `error[CODE]: message`.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit: i32,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: e.code(),
            exit: if e.is_budget() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: "E_USAGE",
        message: message.into(),
        exit: 1,
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Output {
    body: Value,
    table: Option<Table>,
}

impl Output {
    fn json(body: impl Serialize) -> CliResult<Output> {
        Ok(Output {
            body: to_value(body)?,
            table: None,
        })
    }
}

fn to_value(v: impl Serialize) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError {
        code: "E_INTERNAL",
        message: e.to_string(),
        exit: 1,
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::FloorPow { .. } => "floor-pow",
        Command::Residues { .. } => "residues",
        Command::FindBlock { .. } => "find-block",
        Command::Fracgame { .. } => "fracgame",
        Command::MissingBlocks { .. } => "missing-blocks",
        Command::ExpSum { .. } => "exp-sum",
        Command::Discrepancy { .. } => "discrepancy",
        Command::Etks { .. } => "etks",
        Command::VdcBound { .. } => "vdc-bound",
        Command::Phi { .. } => "phi",
        Command::PhiSums { .. } => "phi-sums",
        Command::DensityProbe { .. } => "density-probe",
        Command::Mertens { .. } => "mertens",
        Command::BuildWindow { .. } => "build-window",
        Command::Crt { .. } => "crt",
        Command::VerifyWindow { .. } => "verify-window",
    }
}

/// Parses `a..b` as an inclusive range.
fn parse_range<T: std::str::FromStr + PartialOrd>(s: &str) -> CliResult<RangeInclusive<T>> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| usage(format!("expected a range a..b, got {s:?}")))?;
    let b = b.trim_start_matches('=');
    let parse = |x: &str| x.trim().parse::<T>().map_err(|_| usage(format!("bad range bound {x:?} in {s:?}")));
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(usage(format!("empty range {s:?}")));
    }
    Ok(a..=b)
}

fn parse_big(s: &str) -> CliResult<BigUint> {
    s.trim()
        .parse::<BigUint>()
        .map_err(|_| usage(format!("expected a non-negative integer, got {s:?}")))
}

/// Parses `a/b` or a finite decimal such as `0.05` exactly.
pub fn parse_rational(s: &str) -> CliResult<BigRational> {
    let s = s.trim();
    let bad = || usage(format!("expected a rational a/b or a decimal, got {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let q = BigRational::new(digits, num_traits::pow(BigInt::from(10u32), frac.len()));
    Ok(if neg { -q } else { q })
}

fn load_points(p: &PointArgs, cfg: &RunConfig) -> CliResult<PointSet> {
    let parse_rows = |text: &str, sep: char| -> CliResult<Vec<Vec<f64>>> {
        text.split(sep)
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("bad coordinate {x:?}"))))
                    .collect()
            })
            .collect()
    };
    if let Some(path) = &p.input {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return Ok(PointSet::from_f64(&parse_rows(&text, '\n')?)?);
    }
    if let Some(s) = &p.points {
        return Ok(PointSet::from_f64(&parse_rows(s, ';')?)?);
    }
    if let Some(n) = p.residue_n {
        let r = p.modulus.ok_or_else(|| usage("--residue-n needs --modulus"))?;
        return Ok(build_residue_pointset(cfg.c, r, n)?);
    }
    if let Some(n) = p.random {
        if p.dim == 0 {
            return Err(usage("--dim must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..p.dim).map(|_| rng.gen::<f64>()).collect()).collect();
        return Ok(PointSet::from_f64(&pts)?);
    }
    Err(usage("give one of --input, --points, --residue-n or --random"))
}

fn families_opts(w: &WindowArgs) -> FamilyOptions {
    FamilyOptions {
        allow_small_h: w.allow_small_h,
        prime_limit: w.prime_limit,
    }
}

fn run_command(cmd: &Command, cfg: &RunConfig) -> CliResult<Output> {
    let c = cfg.c;
    let prec = cfg.precision();
    match cmd {
        Command::FloorPow { m, m_to, tol } => {
            let hi = m_to.unwrap_or(*m);
            if hi < *m {
                return Err(usage("--m-to is below --m"));
            }
            let rows = (*m..=hi)
                .map(|k| floor_pow(k, c, *tol, prec))
                .collect::<crate::Result<Vec<_>>>()?;
            let table = Table {
                header: vec!["m", "floor", "frac_lo", "frac_hi", "exact_integer"],
                rows: rows
                    .iter()
                    .map(|r| {
                        let iv = r.frac_enclosure.as_ref().expect("floor_pow sets the enclosure");
                        vec![
                            r.m.to_string(),
                            r.floor_value.to_string(),
                            format!("{:.17}", iv.lo_f64()),
                            format!("{:.17}", iv.hi_f64()),
                            r.exact_integer.to_string(),
                        ]
                    })
                    .collect(),
            };
            let body = if rows.len() == 1 { to_value(&rows[0])? } else { json!({ "results": to_value(&rows)? }) };
            Ok(Output {
                body,
                table: Some(table),
            })
        }
        Command::Residues { modulus, from, to } => {
            let seq = residue_sequence(c, *modulus, *from, *to)?;
            let table = Table {
                header: vec!["n", "residue"],
                rows: seq.iter().zip(*from..).map(|(r, n)| vec![n.to_string(), r.to_string()]).collect(),
            };
            Ok(Output {
                body: json!({ "modulus": modulus, "from": from, "to": to, "residues": seq }),
                table: Some(table),
            })
        }
        Command::FindBlock {
            modulus,
            block_len,
            residue,
        } => {
            let q = BlockQuery {
                c,
                modulus: *modulus,
                block_len: *block_len,
                residue: *residue,
                search_limit: cfg.limit,
            };
            let body = match find_ap_block(&q)? {
                Some(w) => json!({ "found": true, "m": w.m, "verified": w.verified, "per_h": w.per_h }),
                None => json!({ "found": false, "m": null, "verified": null, "per_h": [] }),
            };
            Output::json(body)
        }
        Command::Fracgame {
            m,
            modulus,
            block_len,
            residue,
            scan,
            moduli,
            block_lens,
            m_max,
        } => {
            if *scan {
                let s = fracgame_scan(c, parse_range(moduli)?, parse_range(block_lens)?, 1..=*m_max, prec)?;
                return Output::json(s);
            }
            let (m, r_mod, h, r) = (m.unwrap(), modulus.unwrap(), block_len.unwrap(), residue.unwrap());
            Output::json(check_fracgame(m, c, r_mod, h, r, prec)?)
        }
        Command::MissingBlocks {
            modulus,
            block_len,
            n_to,
        } => {
            let missing = missing_block_scan(c, *modulus, *block_len, *n_to)?;
            let table = Table {
                header: vec!["block"],
                rows: missing
                    .iter()
                    .map(|b| vec![b.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")])
                    .collect(),
            };
            Ok(Output {
                body: json!({ "modulus": modulus, "block_len": block_len, "n_to": n_to, "missing": missing }),
                table: Some(table),
            })
        }
        Command::ExpSum { n, modulus, k, tol } => {
            let spec = ExpSumSpec {
                c,
                n: *n,
                modulus: *modulus,
                k: k.clone(),
            };
            let v = exp_sum(&spec, *tol)?;
            Output::json(json!({ "n": n, "modulus": modulus, "k": k, "value": to_value(v)? }))
        }
        Command::Discrepancy {
            points,
            estimate_samples,
        } => {
            let x = load_points(points, cfg)?;
            let mode = match estimate_samples {
                Some(samples) => DiscrepancyMode::ExactOrEstimate {
                    samples: *samples,
                    seed: cfg.seed,
                },
                None => DiscrepancyMode::Exact,
            };
            Output::json(discrepancy(&x, mode)?)
        }
        Command::Etks { points, k_max } => {
            let x = load_points(points, cfg)?;
            Output::json(etks_bound(&x, EtksParams { k_max: *k_max }, None)?)
        }
        Command::VdcBound { n, modulus, k } => {
            let spec = ExpSumSpec {
                c,
                n: *n,
                modulus: *modulus,
                k: k.clone(),
            };
            spec.validate()?;
            let target = vdc_target(c, *n);
            match vdc_order(c, k) {
                Some(_) => {
                    let p = estimate_vdc_params(&spec)?;
                    let b = vdc_bound(&p, *n);
                    Output::json(json!({
                        "method": "van_der_corput",
                        "params": to_value(p)?,
                        "bound": to_value(b)?,
                        "target": target,
                    }))
                }
                None => {
                    let top = spec.coefficients().pop().expect("k is non-empty");
                    let a = top.to_f64().unwrap_or(0.0);
                    if a == 0.0 {
                        return Err(Error::Domain("k = 0 has the trivial value N".into()).into());
                    }
                    let kl = kusmin_landau_bound(c, a, *n)?;
                    Output::json(json!({ "method": "kusmin_landau", "bound": to_value(kl)?, "target": target }))
                }
            }
        }
        Command::Phi { n } => {
            let mut rows = Vec::new();
            let mut table = Vec::new();
            for s in n {
                let v = parse_big(s)?;
                if v.is_zero() {
                    return Err(Error::Domain("phi needs n >= 1".into()).into());
                }
                let phi = euler_phi(&v)?;
                let f = factorize(&v)?;
                let fac: Vec<String> = f.iter().map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") }).collect();
                table.push(vec![v.to_string(), phi.to_string(), fac.join(" ")]);
                rows.push(json!({ "n": v.to_string(), "phi": phi.to_string(), "factors": fac }));
            }
            let body = if rows.len() == 1 { rows.pop().unwrap() } else { json!({ "results": rows }) };
            Ok(Output {
                body,
                table: Some(Table {
                    header: vec!["n", "phi", "factors"],
                    rows: table,
                }),
            })
        }
        Command::PhiSums { n_max, exact_total } => {
            let s = partial_sums(c, *n_max)?;
            let rows = (1..=*n_max)
                .map(|n| {
                    let (f, phi) = s.term(n);
                    let (lo, hi) = s.frac_bounds(n);
                    vec![
                        n.to_string(),
                        f.to_string(),
                        phi.to_string(),
                        decimal(&lo, 20),
                        decimal(&hi, 20),
                        format!("{:.12}", s.frac_f64(n)),
                    ]
                })
                .collect();
            let total = s.total();
            let frac = BigRational::new(total.frac_numer().into(), total.denom.clone().into());
            let mut body = json!({
                "n_max": n_max,
                "integer_part": total.integer_part().to_string(),
                "frac": decimal(&frac, 30),
            });
            if *exact_total {
                let q = total.to_rational();
                body["numer"] = Value::String(q.numer().to_string());
                body["denom"] = Value::String(q.denom().to_string());
            }
            Ok(Output {
                body,
                table: Some(Table {
                    header: vec!["n", "floor", "phi", "frac_lo", "frac_hi", "frac"],
                    rows,
                }),
            })
        }
        Command::DensityProbe { n_max, t, eps } => {
            let series = partial_sums(c, *n_max)?;
            let eps_q = parse_rational(eps)?;
            let mut out = Vec::new();
            let mut rows = Vec::new();
            for ts in t {
                let tq = parse_rational(ts)?;
                let w = density_probe(&series, &tq, &eps_q)?;
                rows.push(match &w {
                    Some(w) => vec![ts.clone(), w.n.to_string(), format!("{:.12}", w.frac), w.verified.to_string()],
                    None => vec![ts.clone(), String::new(), String::new(), String::new()],
                });
                out.push(json!({ "t": ts, "witness": to_value(w)? }));
            }
            let found = out.iter().filter(|o| !o["witness"].is_null()).count();
            Ok(Output {
                body: json!({ "n_max": n_max, "eps": eps, "found": found, "targets": out }),
                table: Some(Table {
                    header: vec!["t", "n", "frac", "verified"],
                    rows,
                }),
            })
        }
        Command::Mertens { n, alpha, c_const } => {
            let q = MertensQuery::new(parse_big(n)?, *alpha, *c_const)?;
            Output::json(large_prime_product(&q)?)
        }
        Command::BuildWindow { window } => {
            let fam = build_prime_families(window.block_len, families_opts(window))?;
            Output::json(build_window(fam)?)
        }
        Command::Crt { pairs, zero_modulus } => {
            let system = pairs
                .iter()
                .map(|p| {
                    let (a, m) = p.split_once(':').ok_or_else(|| usage(format!("expected a:m, got {p:?}")))?;
                    let a: BigInt = a.trim().parse().map_err(|_| usage(format!("bad residue {a:?}")))?;
                    Ok((a, parse_big(m)?))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let zero = match zero_modulus {
                Some(z) => parse_big(z)?,
                None => BigUint::one(),
            };
            Output::json(crt_residue(&system, &zero)?)
        }
        Command::VerifyWindow { window, m, values } => {
            let w = build_window(build_prime_families(window.block_len, families_opts(window))?)?;
            let report = match values {
                Some(vs) => {
                    let vs = vs.iter().map(|v| parse_big(v)).collect::<CliResult<Vec<_>>>()?;
                    verify_window_values(&w, &vs)?
                }
                None => verify_window(&w, c, m.expect("clap requires --m"))?,
            };
            let table = Table {
                header: vec!["h", "value", "congruence", "gcd_ok", "fundam", "outer_ok"],
                rows: report
                    .rows
                    .iter()
                    .map(|r| {
                        let opt = |b: Option<bool>| b.map_or(String::new(), |b| b.to_string());
                        vec![
                            r.h.to_string(),
                            r.value.to_string(),
                            r.congruence.to_string(),
                            r.gcd_ok.to_string(),
                            opt(r.fundam),
                            opt(r.outer_ok),
                        ]
                    })
                    .collect(),
            };
            Ok(Output {
                body: to_value(&report)?,
                table: Some(table),
            })
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(out: Output, cfg: &RunConfig) -> CliResult<String> {
    match cfg.format {
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("config".into(), to_value(cfg)?);
            match out.body {
                Value::Object(fields) => obj.extend(fields),
                other => {
                    obj.insert("result".into(), other);
                }
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let table = out.table.unwrap_or_else(|| Table {
                header: vec!["key", "value"],
                rows: match out.body {
                    Value::Object(fields) => fields
                        .into_iter()
                        .map(|(k, v)| {
                            let v = match v {
                                Value::String(s) => s,
                                other => other.to_string(),
                            };
                            vec![k, v]
                        })
                        .collect(),
                    other => vec![vec!["result".into(), other.to_string()]],
                },
            });
            let mut s = String::new();
            writeln!(s, "{}", table.header.join(",")).unwrap();
            for row in table.rows {
                let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
                writeln!(s, "{}", cells.join(",")).unwrap();
            }
            Ok(s)
        }
    }
}

fn config(cli: &Cli) -> CliResult<RunConfig> {
    let g = &cli.global;
    let c: ExponentC = g.c.parse()?;
    if let Some(0) = g.threads {
        return Err(usage("--threads must be at least 1"));
    }
    if g.precision_start == 0 || g.precision_cap < g.precision_start {
        return Err(usage("need 1 <= --precision-start <= --precision-cap"));
    }
    Ok(RunConfig {
        command: command_name(&cli.command),
        c,
        precision_start: g.precision_start,
        precision_cap: g.precision_cap,
        limit: g.limit,
        threads: g.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        format: g.format,
        seed: g.seed,
    })
}

/// Runs a parsed command line and returns the rendered report.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let cfg = config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;
    pool.install(|| run_command(&cli.command, &cfg).and_then(|out| render(out, &cfg)))
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let rendered = e.to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("error[E_USAGE]: {line}");
            return 1;
        }
    };
    match execute(&cli) {
        Ok(s) => {
            print!("{s}");
            0
        }
        Err(e) => {
            eprintln!("error[{}]: {}", e.code, e.message);
            e.exit
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        let cli = match Cli::try_parse_from(std::iter::once("spsdense").chain(args.iter().copied())) {
            Ok(c) => c,
            Err(_) => return (1, String::new()),
        };
        match execute(&cli) {
            Ok(s) => (0, s),
            Err(e) => (e.exit, e.code.to_string()),
        }
    }

    #[test]
    fn rationals_parse_exactly() {
        assert_eq!(parse_rational("0.05").unwrap(), BigRational::new(1.into(), 20.into()));
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("0").unwrap(), BigRational::zero());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn ranges_are_inclusive() {
        assert_eq!(parse_range::<u64>("2..50").unwrap(), 2..=50);
        assert_eq!(parse_range::<u32>("1..=4").unwrap(), 1..=4);
        assert!(parse_range::<u64>("5..2").is_err());
    }

    #[test]
    fn find_block_example() {
        let (code, out) = run(&[
            "find-block", "--c", "3/2", "--modulus", "3", "--block-len", "2", "--residue", "2", "--limit", "100",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["m"], 6);
        assert_eq!(v["verified"], true);
        assert_eq!(v["config"]["c"], "3/2");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["floor-pow", "--c", "3", "--m", "2"]).0, 1);
        assert_eq!(run(&["missing-blocks", "--modulus", "1000", "--block-len", "3", "--n-to", "10"]).0, 2);
        let (code, out) = run(&["find-block", "--modulus", "7", "--block-len", "3", "--residue", "0", "--limit", "4"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["found"], false);
    }
}
