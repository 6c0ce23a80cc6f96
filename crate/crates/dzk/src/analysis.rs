//! Measurement: empirical total variation, soundness rates with Wilson
//! intervals, and round/bit accounting of transcripts.
//!
//! Noise model for TV estimates. With `n_a` and `n_b` samples of the same
//! distribution spread over `q` values, each histogram difference is roughly
//! normal with variance `(1/q)(1/n_a + 1/n_b)`, so the expected empirical TV
//! is about `0.5 * sqrt(2 q (1/n_a + 1/n_b) / pi)`. Against an exact pmf the
//! `1/n_b` term drops out.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::InstanceError;
use crate::netsim::{Direction, NodeView, Transcript};
use crate::seeds::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvReport {
    pub q: u64,
    pub samples_a: usize,
    pub samples_b: usize,
    /// Distinct values seen in either sample.
    pub support: usize,
    pub tv: f64,
    /// Expected TV between two samples of one distribution of full support.
    pub noise: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl TvReport {
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.pass = self.tv <= threshold;
        self
    }
}

/// Expected empirical TV between two samples of sizes `na`, `nb` from the
/// uniform distribution on `q` values.
pub fn tv_noise(q: u64, na: usize, nb: usize) -> f64 {
    0.5 * (2.0 * q as f64 * (1.0 / na as f64 + 1.0 / nb as f64) / PI).sqrt()
}

/// Same against the exact uniform distribution.
pub fn tv_noise_exact(q: u64, n: usize) -> f64 {
    0.5 * (2.0 * q as f64 / (PI * n as f64)).sqrt()
}

fn histogram(s: &[u64]) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for &x in s {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

/// `0.5 * sum |p(x) - q(x)|` over observed values. The default threshold is
/// the noise bound.
pub fn estimate_tv(a: &[u64], b: &[u64], q: u64) -> Result<TvReport, InstanceError> {
    if a.is_empty() || b.is_empty() {
        return Err(InstanceError::Invalid("TV needs two nonempty samples".into()));
    }
    let ha = histogram(a);
    let hb = histogram(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut tv = 0.0;
    let mut support = ha.len();
    for (x, &ca) in &ha {
        let cb = hb.get(x).copied().unwrap_or(0);
        tv += (ca as f64 / na - cb as f64 / nb).abs();
    }
    for (x, &cb) in &hb {
        if !ha.contains_key(x) {
            tv += cb as f64 / nb;
            support += 1;
        }
    }
    let tv = (0.5 * tv).min(1.0);
    let noise = tv_noise(q, a.len(), b.len());
    Ok(TvReport { q, samples_a: a.len(), samples_b: b.len(), support, tv, noise, threshold: noise, pass: tv <= noise })
}

/// TV between a sample and the exact uniform distribution on `0..q`.
pub fn tv_to_uniform(a: &[u64], q: u64) -> Result<TvReport, InstanceError> {
    if a.is_empty() || q == 0 {
        return Err(InstanceError::Invalid("TV needs a nonempty sample".into()));
    }
    let h = histogram(a);
    let n = a.len() as f64;
    let p = 1.0 / q as f64;
    let mut tv = 0.0;
    for (&x, &c) in &h {
        if x < q {
            tv += (c as f64 / n - p).abs();
        } else {
            tv += c as f64 / n;
        }
    }
    let unseen = (0..q).filter(|x| !h.contains_key(x)).count();
    tv += unseen as f64 * p;
    let tv = (0.5 * tv).min(1.0);
    let noise = tv_noise_exact(q, a.len());
    Ok(TvReport { q, samples_a: a.len(), samples_b: 0, support: h.len(), tv, noise, threshold: noise, pass: tv <= noise })
}

/// One TV report per position of a flattened view.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlotTv {
    pub node: usize,
    pub slot: usize,
    pub report: TvReport,
}

/// Per-slot TV between two collections of views of the same node set.
/// `a[r][v]` is node `v`'s view in run `r`.
pub fn view_slot_tv(a: &[Vec<NodeView>], b: &[Vec<NodeView>], q: u64) -> Result<Vec<SlotTv>, InstanceError> {
    let first = a.first().ok_or_else(|| InstanceError::Invalid("no runs".into()))?;
    let nodes = first.len();
    let flat = |runs: &[Vec<NodeView>], v: usize| -> Result<Vec<Vec<u64>>, InstanceError> {
        runs.iter()
            .map(|r| r.get(v).map(NodeView::flat).ok_or_else(|| InstanceError::Invalid("view count differs".into())))
            .collect()
    };
    let mut out = Vec::new();
    for v in 0..nodes {
        let fa = flat(a, v)?;
        let fb = flat(b, v)?;
        let len = fa[0].len();
        if fa.iter().chain(&fb).any(|x| x.len() != len) {
            return Err(InstanceError::Invalid(format!("view shapes differ at node {v}")));
        }
        let reports: Vec<SlotTv> = (0..len)
            .into_par_iter()
            .map(|s| {
                let sa: Vec<u64> = fa.iter().map(|x| x[s]).collect();
                let sb: Vec<u64> = fb.iter().map(|x| x[s]).collect();
                SlotTv { node: v, slot: s, report: estimate_tv(&sa, &sb, q).expect("nonempty") }
            })
            .collect();
        out.extend(reports);
    }
    Ok(out)
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = n as f64;
    let p = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub trials: usize,
    pub accepts: usize,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
    pub bound: f64,
    pub slack: f64,
    /// Upper Wilson end within `bound + slack`.
    pub pass: bool,
}

/// Runs `trial(derive_seed(seed, i))` for `i < trials` in parallel and counts
/// acceptances. The count does not depend on scheduling.
pub fn soundness_rate<F>(trials: usize, seed: u64, bound: f64, slack: f64, trial: F) -> SoundnessReport
where
    F: Fn(u64) -> bool + Sync,
{
    let accepts = (0..trials as u64).into_par_iter().filter(|&i| trial(derive_seed(seed, i))).count();
    let (lo, hi) = wilson(accepts, trials);
    SoundnessReport {
        trials,
        accepts,
        rate: accepts as f64 / trials.max(1) as f64,
        lo,
        hi,
        bound,
        slack,
        pass: hi <= bound + slack,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub q: u64,
    pub n: usize,
    pub rounds: usize,
    /// Largest prover-to-node message.
    pub max_prover_bits: u64,
    /// Largest amount any node receives in one round.
    pub max_bits_per_node_round: u64,
    /// Largest total any node receives over the run.
    pub max_total_bits_per_node: u64,
    pub round_bound: Option<usize>,
    pub bit_bound: Option<u64>,
    pub pass: bool,
}

/// Exact counts from `t`, checked against `round_bound` and a per-round
/// prover-message `bit_bound`.
pub fn complexity_audit(t: &Transcript, round_bound: Option<usize>, bit_bound: Option<u64>) -> ComplexityReport {
    let mut total = vec![0u64; t.n];
    let mut max_prover = 0;
    let mut max_round = 0;
    for r in &t.rounds {
        for p in &r.per_node {
            if p.id < total.len() {
                total[p.id] += p.bits;
            }
            max_round = max_round.max(p.bits);
            if r.dir == Direction::ProverToNodes {
                max_prover = max_prover.max(p.bits);
            }
        }
    }
    let rounds = t.num_rounds();
    let pass = round_bound.is_none_or(|b| rounds <= b) && bit_bound.is_none_or(|b| max_prover <= b);
    ComplexityReport {
        q: t.q,
        n: t.n,
        rounds,
        max_prover_bits: max_prover,
        max_bits_per_node_round: max_round,
        max_total_bits_per_node: total.into_iter().max().unwrap_or(0),
        round_bound,
        bit_bound,
        pass,
    }
}

/// Any serializable report as pretty JSON.
pub fn to_json<T: Serialize>(report: &T) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

/// Rows of flat records as CSV with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Flat row for CSV export of slot reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlotRow {
    pub node: usize,
    pub slot: usize,
    pub q: u64,
    pub samples: usize,
    pub tv: f64,
    pub noise: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl From<&SlotTv> for SlotRow {
    fn from(s: &SlotTv) -> Self {
        Self {
            node: s.node,
            slot: s.slot,
            q: s.report.q,
            samples: s.report.samples_a,
            tv: s.report.tv,
            noise: s.report.noise,
            threshold: s.report.threshold,
            pass: s.report.pass,
        }
    }
}
