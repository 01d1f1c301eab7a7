//! Counting surfaces in a height box by their arithmetic behaviour.

use crate::arith::{in_class_b_u64, is_squarefree_u64};
use crate::descent::{decide, Decision};
use crate::error::{domain, Error, Result};
use crate::model::{reduce, RawCoefficients};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::time::Instant;

pub const BUDGET_VAR: &str = "CHATELET_WORK_BUDGET";
pub const DEFAULT_BUDGET: u128 = 1 << 31;

/// The loop-size cap from `CHATELET_WORK_BUDGET`, or `2^31` when unset.
pub fn work_budget() -> u128 {
    std::env::var(BUDGET_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Membership of a nonzero-leading tuple in the set of primitive tuples with
/// `abcd != 0`, `ad != bc`, `gcd(a,c)`, `gcd(b,d)` squarefree and
/// `gcd(a,b)`, `gcd(c,d)` squarefree products of primes `3 mod 4`.
pub fn in_s_tot(t: [i64; 4]) -> bool {
    let [a, b, c, d] = t;
    if t.contains(&0) || a as i128 * d as i128 == b as i128 * c as i128 {
        return false;
    }
    let g = |x: i64, y: i64| x.unsigned_abs().gcd(&y.unsigned_abs());
    g(a, b).gcd(&g(c, d)) == 1
        && is_squarefree_u64(g(a, c))
        && is_squarefree_u64(g(b, d))
        && in_class_b_u64(g(a, b))
        && in_class_b_u64(g(c, d))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    members: u64,
    obstructed: u64,
    glob: u64,
    br: u64,
}

impl Tally {
    fn add(&mut self, o: &Tally) {
        self.members += o.members;
        self.obstructed += o.obstructed;
        self.glob += o.glob;
        self.br += o.br;
    }

    fn record(&mut self, t: [i64; 4]) -> Result<()> {
        let s = reduce(RawCoefficients::new(t[0], t[1], t[2], t[3]))?;
        self.members += 1;
        match decide(&s)? {
            Decision::LocalObstruction(_) => self.obstructed += 1,
            Decision::RationalPoint(_) => self.glob += 1,
            Decision::HasseFailure { .. } => self.br += 1,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counts {
    #[serde(rename = "N", serialize_with = "ser_rational")]
    pub n: BigRational,
    #[serde(rename = "N_loc", serialize_with = "ser_rational")]
    pub n_loc: BigRational,
    #[serde(rename = "N_glob", serialize_with = "ser_rational")]
    pub n_glob: BigRational,
    #[serde(rename = "N_Br", serialize_with = "ser_rational")]
    pub n_br: BigRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ratios {
    pub loc_over_total: f64,
    pub glob_over_total: f64,
    pub br_over_total: f64,
}

/// 95% Wilson intervals for the three ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Intervals {
    pub loc_over_total: (f64, f64),
    pub glob_over_total: (f64, f64),
    pub br_over_total: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    #[serde(rename = "P")]
    pub p: u64,
    #[serde(serialize_with = "ser_mode")]
    pub mode: Mode,
    pub counts: Counts,
    /// Members with no local point, before the factor 1/4:
    /// `N = N_loc + locally_obstructed / 4`.
    pub locally_obstructed: u64,
    pub ratios: Ratios,
    pub ci: Option<Intervals>,
    pub seed: Option<u64>,
    pub workers: usize,
    pub seconds: Option<f64>,
}

fn ser_mode<S: Serializer>(m: &Mode, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match m {
        Mode::Exhaustive => "exhaustive",
        Mode::Sample { .. } => "sample",
    })
}

impl CensusReport {
    /// Drops the wall-clock field so identical runs serialize identically.
    pub fn without_timing(mut self) -> Self {
        self.seconds = None;
        self
    }
}

fn quarter(n: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(4))
}

fn ratio(x: u64, y: u64) -> f64 {
    if y == 0 {
        0.0
    } else {
        x as f64 / y as f64
    }
}

const WILSON_Z: f64 = 1.959963984540054;

/// 95% Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (n, p) = (n as f64, hits as f64 / n as f64);
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InternalInconsistency(format!("thread pool: {e}")))
}

fn exhaustive_cost(p: u64) -> u128 {
    (2 * p as u128 + 1).pow(4)
}

/// Exhaustive census for each height in `heights`, from one pass over the
/// box of the largest height.
pub fn run_exhaustive(heights: &[u64], workers: usize) -> Result<Vec<CensusReport>> {
    let pmax = *heights.iter().max().ok_or_else(|| domain("no heights given"))?;
    if heights.contains(&0) {
        return Err(domain("heights must be positive"));
    }
    let (estimated, budget) = (exhaustive_cost(pmax), work_budget());
    if estimated > budget {
        return Err(Error::BudgetExceeded { estimated, budget });
    }
    let start = Instant::now();
    let workers = workers.max(1);
    let p = pmax as i64;
    let range = || (-p..=p).filter(|&x| x != 0);
    // the (a, b) plane is split across workers; a > 0 fixes the sign
    let strips: Vec<(i64, i64)> = (1..=p).flat_map(|a| range().map(move |b| (a, b))).collect();
    let per_height: Vec<Tally> = pool(workers)?.install(|| {
        strips
            .par_iter()
            .map(|&(a, b)| -> Result<Vec<Tally>> {
                let mut out = vec![Tally::default(); pmax as usize + 1];
                for c in range() {
                    for d in range() {
                        let t = [a, b, c, d];
                        if in_s_tot(t) {
                            let h = t.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
                            out[h as usize].record(t)?;
                        }
                    }
                }
                Ok(out)
            })
            .try_reduce(
                || vec![Tally::default(); pmax as usize + 1],
                |mut x, y| {
                    x.iter_mut().zip(&y).for_each(|(a, b)| a.add(b));
                    Ok(x)
                },
            )
    })?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(heights
        .iter()
        .map(|&h| {
            let mut t = Tally::default();
            per_height[..=h as usize].iter().for_each(|x| t.add(x));
            exhaustive_report(h, t, workers, seconds)
        })
        .collect())
}

fn exhaustive_report(p: u64, t: Tally, workers: usize, seconds: f64) -> CensusReport {
    let local = t.glob + t.br;
    CensusReport {
        p,
        mode: Mode::Exhaustive,
        counts: Counts { n: quarter(t.members), n_loc: quarter(local), n_glob: quarter(t.glob), n_br: quarter(t.br) },
        locally_obstructed: t.obstructed,
        ratios: Ratios {
            loc_over_total: ratio(local, t.members),
            glob_over_total: ratio(t.glob, t.members),
            br_over_total: ratio(t.br, t.members),
        },
        ci: None,
        seed: None,
        workers,
        seconds: Some(seconds),
    }
}

const SAMPLE_CHUNK: u64 = 4096;

/// Uniform draws from `[-P, P]^4`; non-members are rejected and the counts
/// are scaled by the observed membership rate.
pub fn run_sample(p: u64, count: u64, seed: u64, workers: usize) -> Result<CensusReport> {
    if count == 0 || p == 0 {
        return Err(domain("sampling needs P >= 1 and at least one sample"));
    }
    let budget = work_budget();
    if count as u128 > budget {
        return Err(Error::BudgetExceeded { estimated: count as u128, budget });
    }
    let start = Instant::now();
    let workers = workers.max(1);
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let pi = p as i64;
    let tally = pool(workers)?.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|i| -> Result<Tally> {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let mut t = Tally::default();
                let n = SAMPLE_CHUNK.min(count - i * SAMPLE_CHUNK);
                for _ in 0..n {
                    let mut x: [i64; 4] = [0; 4].map(|_| rng.gen_range(-pi..=pi));
                    if x[0] < 0 {
                        x = x.map(|v| -v);
                    }
                    if in_s_tot(x) {
                        t.record(x)?;
                    }
                }
                Ok(t)
            })
            .try_reduce(Tally::default, |mut a, b| {
                a.add(&b);
                Ok(a)
            })
    })?;
    let seconds = start.elapsed().as_secs_f64();
    // N = (members / count) (2P + 1)^4 / 8: halve for the sign, quarter for the orbit
    let scale = BigRational::new(BigInt::from(exhaustive_cost(p)), BigInt::from(8u64 * count));
    let est = |x: u64| BigRational::from_integer(BigInt::from(x)) * &scale;
    let local = tally.glob + tally.br;
    let m = tally.members;
    Ok(CensusReport {
        p,
        mode: Mode::Sample { count, seed },
        counts: Counts { n: est(m), n_loc: est(local), n_glob: est(tally.glob), n_br: est(tally.br) },
        locally_obstructed: tally.obstructed,
        ratios: Ratios {
            loc_over_total: ratio(local, m),
            glob_over_total: ratio(tally.glob, m),
            br_over_total: ratio(tally.br, m),
        },
        ci: Some(Intervals {
            loc_over_total: wilson_interval(local, m),
            glob_over_total: wilson_interval(tally.glob, m),
            br_over_total: wilson_interval(tally.br, m),
        }),
        seed: Some(seed),
        workers,
        seconds: Some(seconds),
    })
}

pub fn run_census(p: u64, mode: Mode, workers: usize) -> Result<CensusReport> {
    match mode {
        Mode::Exhaustive => Ok(run_exhaustive(&[p], workers)?.remove(0)),
        Mode::Sample { count, seed } => run_sample(p, count, seed, workers),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    #[serde(rename = "P")]
    pub p: u64,
    pub c_est: f64,
}

/// `N_Br(P) (log P)^(1/4) / P^4` over a sequence of exhaustive reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub rows: Vec<DecayRow>,
    pub min: f64,
    pub max: f64,
}

pub fn decay_fit(reports: &[CensusReport]) -> Result<DecayFit> {
    if reports.len() < 2 {
        return Err(domain("decay_fit needs at least two reports"));
    }
    let mut rows = Vec::new();
    for r in reports {
        if r.mode != Mode::Exhaustive || r.p < 10 {
            return Err(domain("decay_fit needs exhaustive reports with P >= 10"));
        }
        if rows.last().is_some_and(|x: &DecayRow| x.p >= r.p) {
            return Err(domain("reports must have increasing P"));
        }
        let p = r.p as f64;
        let br = r.counts.n_br.to_f64().unwrap_or(f64::NAN);
        rows.push(DecayRow { p: r.p, c_est: br * p.ln().powf(0.25) / p.powi(4) });
    }
    let min = rows.iter().map(|r| r.c_est).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.c_est).fold(f64::NEG_INFINITY, f64::max);
    if rows.iter().all(|r| r.c_est.is_zero()) {
        return Err(domain("no Hasse failures in any report"));
    }
    Ok(DecayFit { rows, min, max })
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "P")]
    p: u64,
    mode: &'static str,
    #[serde(rename = "N")]
    n: String,
    #[serde(rename = "N_loc")]
    n_loc: String,
    #[serde(rename = "N_glob")]
    n_glob: String,
    #[serde(rename = "N_Br")]
    n_br: String,
    loc_over_total: f64,
    glob_over_total: f64,
    br_over_total: f64,
}

/// One CSV row per report.
pub fn write_csv<W: std::io::Write>(reports: &[CensusReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let s = |r: &BigRational| format!("{}/{}", r.numer(), r.denom());
    for r in reports {
        let row = CsvRow {
            p: r.p,
            mode: if r.mode == Mode::Exhaustive { "exhaustive" } else { "sample" },
            n: s(&r.counts.n),
            n_loc: s(&r.counts.n_loc),
            n_glob: s(&r.counts.n_glob),
            n_br: s(&r.counts.n_br),
            loc_over_total: r.ratios.loc_over_total,
            glob_over_total: r.ratios.glob_over_total,
            br_over_total: r.ratios.br_over_total,
        };
        w.serialize(row).map_err(|e| Error::InternalInconsistency(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::InternalInconsistency(format!("csv: {e}")))?;
    Ok(())
}
