//! Seeded Monte-Carlo outage estimation for capture-model and SIC decoding.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::SrSampler;
use crate::error::{ConfigError, Result};
use crate::geometry::{prob_at_least_visible, range_quantile};
use crate::system::{derive_constants, DerivedConstants, SatelliteLink, SystemConfig};

/// Realizations per random substream.
pub const BLOCK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Cm,
    Sic,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Cm => "CM",
            Scheme::Sic => "SIC",
        })
    }
}

impl FromStr for Scheme {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CM" => Ok(Scheme::Cm),
            "SIC" => Ok(Scheme::Sic),
            _ => Err(ConfigError::Type { key: "schemes".into(), value: s.into(), expected: "CM or SIC" }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageResult {
    pub scheme: Scheme,
    /// Indexed by decoding order (index 0 = first decoded).
    pub per_user_op: Vec<f64>,
    pub stderr: Vec<f64>,
    pub average_op: f64,
    pub average_stderr: f64,
    pub visibility_factor: f64,
    pub realizations: usize,
    /// Raw failure counts per decoding order.
    pub failures: Vec<u64>,
}

/// Binomial standard error of a failure fraction.
pub fn estimate_stderr(failures: u64, realizations: u64) -> f64 {
    assert!(failures <= realizations && realizations > 0);
    let p = failures as f64 / realizations as f64;
    (p * (1.0 - p) / realizations as f64).sqrt()
}

/// One block of channel and range draws. Flat layouts:
/// `h[(i·S + s)·U + u]`, `path_gain` likewise, `g[i·S + s]`.
#[derive(Debug, Clone)]
pub struct RealizationBatch {
    pub users: usize,
    pub satellites: usize,
    pub realizations: usize,
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    pub range_km: Vec<f64>,
}

impl RealizationBatch {
    pub fn draw<R: Rng + ?Sized>(cfg: &SystemConfig, realizations: usize, rng: &mut R) -> Self {
        let (u, s) = (cfg.users, cfg.satellites_used);
        let up = SrSampler::new(&cfg.uplink());
        let down = SrSampler::new(&cfg.downlink());
        let mut h = Vec::with_capacity(realizations * s * u);
        let mut g = Vec::with_capacity(realizations * s);
        let mut range_km = Vec::with_capacity(realizations * s * u);
        for _ in 0..realizations {
            for _ in 0..s {
                g.push(down.sample(rng));
                for _ in 0..u {
                    h.push(up.sample(rng));
                    range_km.push(range_quantile(rng.random::<f64>(), &cfg.geometry));
                }
            }
        }
        Self { users: u, satellites: s, realizations, h, g, range_km }
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    cm: Vec<u64>,
    sic: Vec<u64>,
    // Σk and Σk² of failed orders per realization
    cm_moments: (u64, u64),
    sic_moments: (u64, u64),
}

impl Tally {
    fn new(users: usize) -> Self {
        Self { cm: vec![0; users], sic: vec![0; users], ..Default::default() }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.cm.iter_mut().zip(&other.cm) {
            *a += b;
        }
        for (a, b) in self.sic.iter_mut().zip(&other.sic) {
            *a += b;
        }
        self.cm_moments.0 += other.cm_moments.0;
        self.cm_moments.1 += other.cm_moments.1;
        self.sic_moments.0 += other.sic_moments.0;
        self.sic_moments.1 += other.sic_moments.1;
        self
    }
}

struct Workspace {
    links: Vec<SatelliteLink>,
    gains: Vec<f64>,
    sinr: Vec<f64>,
    removed: Vec<f64>,
    done: Vec<bool>,
}

fn evaluate(batch: &RealizationBatch, cfg: &SystemConfig, c: &DerivedConstants, tally: &mut Tally) {
    let (nu, ns) = (batch.users, batch.satellites);
    let mut w = Workspace {
        links: Vec::with_capacity(ns),
        gains: vec![0.0; ns * nu],
        sinr: vec![0.0; nu],
        removed: vec![0.0; ns],
        done: vec![false; nu],
    };
    for i in 0..batch.realizations {
        let base = i * ns * nu;
        let h = &batch.h[base..base + ns * nu];
        let g = &batch.g[i * ns..(i + 1) * ns];
        for (dst, &r) in w.gains.iter_mut().zip(&batch.range_km[base..base + ns * nu]) {
            *dst = cfg.path_gain(r);
        }
        w.links.clear();
        for s in 0..ns {
            let sl = s * nu..(s + 1) * nu;
            w.links.push(SatelliteLink::new(&h[sl.clone()], &w.gains[sl], c));
        }
        w.removed.iter_mut().for_each(|x| *x = 0.0);
        w.done.iter_mut().for_each(|x| *x = false);

        // first pass: every user against full interference
        for u in 0..nu {
            w.sinr[u] = (0..ns)
                .map(|s| {
                    let own = w.gains[s * nu + u] * h[s * nu + u];
                    w.links[s].sinr(own, 0.0, 0, g[s], c)
                })
                .sum();
        }
        let mut sorted = w.sinr.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let cm_failed = sorted.iter().filter(|&&x| x <= c.gamma_th).count();
        for (l, &x) in sorted.iter().enumerate() {
            if x <= c.gamma_th {
                tally.cm[l] += 1;
            }
        }
        tally.cm_moments.0 += cm_failed as u64;
        tally.cm_moments.1 += (cm_failed * cm_failed) as u64;

        let mut sic_failed = 0;
        for l in 0..nu {
            if l > 0 {
                for u in 0..nu {
                    if w.done[u] {
                        continue;
                    }
                    w.sinr[u] = (0..ns)
                        .map(|s| {
                            let own = w.gains[s * nu + u] * h[s * nu + u];
                            w.links[s].sinr(own, w.removed[s], l, g[s], c)
                        })
                        .sum();
                }
            }
            let (best, &val) = w
                .sinr
                .iter()
                .enumerate()
                .filter(|(u, _)| !w.done[*u])
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("an undecoded user remains");
            if val <= c.gamma_th {
                sic_failed = nu - l;
                for slot in &mut tally.sic[l..] {
                    *slot += 1;
                }
                break;
            }
            w.done[best] = true;
            for s in 0..ns {
                w.removed[s] += w.gains[s * nu + best] * h[s * nu + best];
            }
        }
        tally.sic_moments.0 += sic_failed as u64;
        tally.sic_moments.1 += (sic_failed * sic_failed) as u64;
    }
}

fn finish(scheme: Scheme, counts: &[u64], moments: (u64, u64), l: usize, vis: f64) -> OutageResult {
    let n = l as f64;
    let u = counts.len() as f64;
    let per_user_op: Vec<f64> = counts.iter().map(|&k| k as f64 / n * vis).collect();
    let stderr = counts.iter().map(|&k| estimate_stderr(k, l as u64) * vis).collect();
    let m1 = moments.0 as f64 / n;
    let m2 = moments.1 as f64 / n;
    let var = (m2 - m1 * m1).max(0.0) / (u * u);
    OutageResult {
        scheme,
        average_op: per_user_op.iter().sum::<f64>() / u,
        per_user_op,
        stderr,
        average_stderr: (var / n).sqrt() * vis,
        visibility_factor: vis,
        realizations: l,
        failures: counts.to_vec(),
    }
}

/// CM and SIC estimates from one shared set of realizations.
pub fn simulate_schemes(cfg: &SystemConfig, realizations: usize, seed: u64) -> Result<(OutageResult, OutageResult)> {
    cfg.validate()?;
    if realizations == 0 {
        return Err(ConfigError::invalid("L", "need at least one realization").into());
    }
    let c = derive_constants(cfg);
    let vis = prob_at_least_visible(cfg.satellites_used, &cfg.geometry)?;
    let blocks = realizations.div_ceil(BLOCK);
    let tally = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let n = BLOCK.min(realizations - b * BLOCK);
            let batch = RealizationBatch::draw(cfg, n, &mut rng);
            let mut t = Tally::new(cfg.users);
            evaluate(&batch, cfg, &c, &mut t);
            t
        })
        .reduce(|| Tally::new(cfg.users), Tally::merge);
    Ok((
        finish(Scheme::Cm, &tally.cm, tally.cm_moments, realizations, vis),
        finish(Scheme::Sic, &tally.sic, tally.sic_moments, realizations, vis),
    ))
}

pub fn simulate(cfg: &SystemConfig, realizations: usize, seed: u64, scheme: Scheme) -> Result<OutageResult> {
    let (cm, sic) = simulate_schemes(cfg, realizations, seed)?;
    Ok(match scheme {
        Scheme::Cm => cm,
        Scheme::Sic => sic,
    })
}

/// Seed for sweep point `index`. Schemes at one point share realizations.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One result per (value, scheme), value-major.
pub fn simulate_sweep(
    template: &SystemConfig,
    param: &str,
    values: &[f64],
    realizations: usize,
    seed: u64,
    schemes: &[Scheme],
) -> Result<Vec<OutageResult>> {
    let mut out = Vec::with_capacity(values.len() * schemes.len());
    for (i, &v) in values.iter().enumerate() {
        let mut cfg = template.clone();
        cfg.set_param(param, v)?;
        let (cm, sic) = simulate_schemes(&cfg, realizations, point_seed(seed, i))?;
        for s in schemes {
            out.push(match s {
                Scheme::Cm => cm.clone(),
                Scheme::Sic => sic.clone(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::CsiMismatch;

    #[test]
    fn stderr_values() {
        assert_eq!(estimate_stderr(0, 100), 0.0);
        assert_eq!(estimate_stderr(100, 100), 0.0);
        assert!((estimate_stderr(5_000, 10_000) - 0.005).abs() < 1e-15);
    }

    #[test]
    fn no_power_is_certain_outage() {
        let mut cfg = SystemConfig::default();
        cfg.user_power_dbm = -300.0;
        let (cm, sic) = simulate_schemes(&cfg, 200, 1).unwrap();
        let vis = prob_at_least_visible(3, &cfg.geometry).unwrap();
        for r in [&cm, &sic] {
            assert!(r.per_user_op.iter().all(|&p| (p - vis).abs() < 1e-15));
            assert!((r.average_op - vis).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_threshold_never_fails() {
        let mut cfg = SystemConfig::default();
        cfg.users = 1;
        cfg.rate_bps = 0.0;
        let r = simulate(&cfg, 300, 3, Scheme::Cm).unwrap();
        assert_eq!(r.failures, vec![0]);
        assert_eq!(r.average_op, 0.0);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = SystemConfig::default();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| simulate_schemes(&cfg, 3000, 42).unwrap())
        };
        assert_eq!(run(1), run(4));
        assert_ne!(simulate_schemes(&cfg, 3000, 43).unwrap().0.failures, run(1).0.failures);
    }

    #[test]
    fn first_order_matches_between_schemes() {
        let mut cfg = SystemConfig::default();
        cfg.satellites_used = 2;
        cfg.csi = CsiMismatch::new(0.01, 0.0, 0.0).unwrap();
        for p in [4.0, 12.0, 20.0] {
            cfg.user_power_dbm = p;
            let (cm, sic) = simulate_schemes(&cfg, 4000, 9).unwrap();
            assert_eq!(cm.failures[0], sic.failures[0]);
            for (a, b) in sic.failures.iter().zip(&cm.failures) {
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn average_is_mean_of_orders() {
        let cfg = SystemConfig::default();
        let (cm, sic) = simulate_schemes(&cfg, 2000, 5).unwrap();
        for r in [cm, sic] {
            let mean = r.per_user_op.iter().sum::<f64>() / r.per_user_op.len() as f64;
            assert!((r.average_op - mean).abs() < 1e-15);
            assert!(r.per_user_op.windows(2).all(|w| w[0] <= w[1]));
            assert!(r.average_stderr >= 0.0 && r.visibility_factor <= 1.0);
        }
    }

    #[test]
    fn sweep_shape_and_errors() {
        let cfg = SystemConfig::default();
        let res = simulate_sweep(&cfg, "P_u_dBm", &[4.0, 8.0], 500, 7, &[Scheme::Cm, Scheme::Sic]).unwrap();
        assert_eq!(res.len(), 4);
        assert_eq!(res[0].scheme, Scheme::Cm);
        assert_eq!(res[3].scheme, Scheme::Sic);
        let again = simulate_sweep(&cfg, "P_u_dBm", &[4.0, 8.0], 500, 7, &[Scheme::Cm, Scheme::Sic]).unwrap();
        assert_eq!(res, again);
        assert!(simulate_sweep(&cfg, "nope", &[1.0], 10, 0, &[Scheme::Cm]).is_err());
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("cm".parse::<Scheme>().unwrap(), Scheme::Cm);
        assert_eq!(" SIC".parse::<Scheme>().unwrap(), Scheme::Sic);
        assert!("noma".parse::<Scheme>().is_err());
        assert_eq!(Scheme::Sic.to_string(), "SIC");
    }
}
