//! Round-compressed protocols: Fold-DCS (halves the variable count per
//! level), the `P_split` splitter, and constant-degree non-colorability in
//! `O(n / log n)` rounds.
//!
//! Polynomials the prover sends are spread over the nodes one batch of
//! monomials per node (sorted exponent order, ascending IDs); the root
//! learns evaluations by aggregating subtree partial sums.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{interpolate_grid, Oracle, PrimeModulus, SparsePoly, UniPoly};
use crate::coloring::{arithmetize, pick_field, ColoringOracle};
use crate::error::InstanceError;
use crate::netsim::{build_tree, Direction, Network, NodePayload, Source, SpanningTree, Tag, Transcript};
use crate::seeds::derive_seed;
use crate::zk::{check_zk_instance, zk_sumcheck};
use crate::sumcheck::{
    centralized_sumcheck, distributed_plain_sumcheck, DistributedQuery, HonestProver, QueryEnv, QueryMode,
    SumcheckInstance,
};

/// One level of a round trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLevel {
    pub round: usize,
    pub claim: u64,
    pub challenges: Vec<u64>,
    pub bits: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub levels: Vec<TraceLevel>,
}

impl Trace {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serializes")
    }
}

fn random_vec<R: Rng>(m: PrimeModulus, len: usize, rng: &mut R) -> Vec<u64> {
    (0..len).map(|_| m.random(rng)).collect()
}

// ---------------------------------------------------------------- monomials

/// Which node holds which monomials of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialAssignment {
    pub num_vars: usize,
    pub modulus: PrimeModulus,
    pub per_node: Vec<Vec<(Vec<u8>, u64)>>,
}

impl MonomialAssignment {
    /// Largest number of monomials on one node.
    pub fn max_load(&self) -> usize {
        self.per_node.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.per_node.iter().map(Vec::len).sum()
    }

    /// Field elements node `v` receives: exponents then coefficient, per
    /// monomial.
    pub fn payload(&self, v: usize) -> Vec<u64> {
        let mut out = Vec::new();
        for (e, c) in &self.per_node[v] {
            out.extend(e.iter().map(|&x| x as u64));
            out.push(*c);
        }
        out
    }

    pub fn local(&self, v: usize, point: &[u64]) -> u64 {
        let m = self.modulus;
        m.sum(self.per_node[v].iter().map(|(e, c)| {
            e.iter().zip(point).fold(*c, |acc, (&ei, &x)| m.mul(acc, m.pow(x, ei as u64)))
        }))
    }

    pub fn subtree(&self, tree: &SpanningTree, point: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        let mut s: Vec<u64> = (0..self.per_node.len()).map(|v| self.local(v, point)).collect();
        for v in tree.bottom_up() {
            if let Some(p) = tree.parent(v) {
                s[p] = m.add(s[p], s[v]);
            }
        }
        s
    }

    /// Node `v`'s consistency check on claimed partials.
    pub fn check(&self, tree: &SpanningTree, point: &[u64], claimed: &[u64], v: usize) -> bool {
        let m = self.modulus;
        let kids = m.sum(tree.children(v).iter().map(|&c| claimed[c]));
        m.add(self.local(v, point), kids) == claimed[v]
    }
}

/// Spreads the monomials of `poly` over `n` nodes in sorted exponent order,
/// at most `cap` per node.
pub fn distribute_monomials(poly: &SparsePoly, n: usize, cap: usize) -> Result<MonomialAssignment, InstanceError> {
    let len = poly.len();
    if len > n * cap {
        return Err(InstanceError::Invalid(format!("{len} monomials exceed the budget of {cap} per node on {n} nodes")));
    }
    let mut per_node = vec![Vec::new(); n];
    for (i, (e, &c)) in poly.monomials().iter().enumerate() {
        per_node[i / cap].push((e.clone(), c));
    }
    Ok(MonomialAssignment { num_vars: poly.num_vars(), modulus: poly.modulus(), per_node })
}

/// Per-node cap needed to hold `len` monomials on `n` nodes.
pub fn monomial_cap(len: usize, n: usize) -> usize {
    len.div_ceil(n).max(1)
}

/// Distributed evaluation of a distributed polynomial at `point`; returns
/// the root value, the partials and each node's check.
pub fn monomial_query(
    assign: &MonomialAssignment,
    tree: &SpanningTree,
    point: &[u64],
    tamper: &mut dyn FnMut(usize, &mut u64),
) -> (u64, Vec<u64>, Vec<bool>) {
    let mut s = assign.subtree(tree, point);
    for (v, val) in s.iter_mut().enumerate() {
        tamper(v, val);
    }
    let ok = (0..s.len()).map(|v| assign.check(tree, point, &s, v)).collect();
    (s[0], s, ok)
}

/// Final Check of a Sumcheck instance over a distributed polynomial.
#[derive(Clone, Debug)]
pub struct MonomialQuery {
    pub assign: MonomialAssignment,
    pub tree: SpanningTree,
}

impl DistributedQuery for MonomialQuery {
    fn rounds(&self) -> usize {
        2
    }

    fn query(&self, point: &[u64], env: &mut QueryEnv<'_>) -> u64 {
        let m = env.modulus;
        let n = self.assign.per_node.len();
        let mut s = match env.mode {
            QueryMode::Honest => self.assign.subtree(&self.tree, point),
            QueryMode::Uniform => (0..n).map(|_| m.random(&mut *env.rng)).collect(),
        };
        for (v, val) in s.iter_mut().enumerate() {
            (env.tamper)(v, val);
        }
        let tag = |v: usize, c: u32| Tag { owner: v as u32, copy: c, ..Tag::public(0) };
        let mut per: Vec<NodePayload> = (0..env.tx.n).map(NodePayload::new).collect();
        for v in 0..n {
            per[v].push(Source::Prover, s[v], tag(v, 1));
        }
        env.tx.push_round(Direction::ProverToNodes, "query partial sums", per);
        let mut per: Vec<NodePayload> = (0..env.tx.n).map(NodePayload::new).collect();
        for v in 1..n {
            per[self.tree.parent(v).expect("non-root")].push(Source::Node(v), s[v], tag(v, 2));
        }
        env.tx.push_round(Direction::NodeToNeighbor, "query forward", per);
        if env.mode == QueryMode::Honest {
            for v in 0..n {
                if !self.assign.check(&self.tree, point, &s, v) {
                    env.tx.accept[v] = false;
                }
            }
        }
        s[0]
    }
}

/// Round-building helpers shared by the distributed protocols here.
struct Wire<'a> {
    tree: &'a SpanningTree,
    n: usize,
    tx: Transcript,
}

impl<'a> Wire<'a> {
    fn new(m: PrimeModulus, tree: &'a SpanningTree) -> Self {
        Self { tree, n: tree.n(), tx: Transcript::new(m, tree.n()) }
    }

    /// Prover round: `broadcast` to everyone plus node-specific values.
    fn from_prover(&mut self, label: &str, broadcast: &[u64], own: &dyn Fn(usize) -> Vec<u64>) {
        let mut per: Vec<NodePayload> = (0..self.n).map(NodePayload::new).collect();
        for (v, p) in per.iter_mut().enumerate() {
            for &b in broadcast {
                p.push(Source::Prover, b, Tag::public(0));
            }
            for x in own(v) {
                p.push(Source::Prover, x, Tag { owner: v as u32, ..Tag::public(0) });
            }
        }
        self.tx.push_round(Direction::ProverToNodes, label, per);
    }

    fn to_prover(&mut self, label: &str, vals: &[u64]) {
        let mut p = NodePayload::new(0);
        for &v in vals {
            p.push(Source::Node(0), v, Tag::public(0));
        }
        self.tx.push_round(Direction::NodesToProver, label, vec![p]);
    }

    /// Children forward their partials (one value per query) to parents.
    fn forward(&mut self, label: &str, partials: &[Vec<u64>]) {
        let mut per: Vec<NodePayload> = (0..self.n).map(NodePayload::new).collect();
        for v in 1..self.n {
            let p = self.tree.parent(v).expect("non-root");
            for q in partials {
                per[p].push(Source::Node(v), q[v], Tag { owner: v as u32, ..Tag::public(0) });
            }
        }
        self.tx.push_round(Direction::NodeToNeighbor, label, per);
    }

    fn reject(&mut self, v: usize) {
        self.tx.accept[v] = false;
    }

    fn last_round_bits(&self) -> u64 {
        self.tx.rounds.last().map_or(0, |r| r.per_node.iter().map(|p| p.bits).max().unwrap_or(0))
    }
}

// ---------------------------------------------------------------- Fold-DCS

/// Pads `f` with inert variables up to a power of two (at least 2) and
/// scales the claim by `2^pad` accordingly.
pub fn pad_to_pow2(f: &SparsePoly, a: u64) -> (SparsePoly, u64, usize) {
    let target = f.num_vars().max(2).next_power_of_two();
    let pad = target - f.num_vars();
    let m = f.modulus();
    (f.pad_vars(pad), m.mul(a, m.pow(2, pad as u64)), pad)
}

/// What the Fold-DCS prover commits to.
pub trait DcsProver {
    /// `F_0^(i)`, sent before the level's challenges.
    fn commit_f0(&mut self, level: usize) -> SparsePoly;
    fn challenge(&mut self, level: usize, alpha: &[u64], z: u64);
    /// Coefficients of the final univariate `F^(m)`.
    fn commit_last(&mut self) -> Vec<u64>;
}

/// Computes every committed polynomial exactly.
#[derive(Clone, Debug)]
pub struct HonestDcs {
    cur: SparsePoly,
    f0: Option<SparsePoly>,
}

impl HonestDcs {
    /// `f` is padded the same way the verifier pads it.
    pub fn new(f: &SparsePoly) -> Self {
        let (p, _, _) = pad_to_pow2(f, 0);
        Self { cur: p, f0: None }
    }
}

impl DcsProver for HonestDcs {
    fn commit_f0(&mut self, _level: usize) -> SparsePoly {
        let f0 = self.cur.sum_suffix(self.cur.num_vars() / 2);
        self.f0 = Some(f0.clone());
        f0
    }

    fn challenge(&mut self, _level: usize, alpha: &[u64], z: u64) {
        let f0 = self.f0.take().expect("commit before challenge");
        let f1 = self.cur.fix_prefix(alpha);
        self.cur = f0.scale(z).add(&f1).expect("same arity");
    }

    fn commit_last(&mut self) -> Vec<u64> {
        let m = self.cur.modulus();
        let d = self.cur.individual_degree();
        let mut c = vec![0u64; d + 1];
        for (e, &v) in self.cur.monomials() {
            c[e[0] as usize] = m.add(c[e[0] as usize], v);
        }
        c
    }
}

/// Honest commitments, but the last polynomial is shifted by a constant so
/// that its cube sum matches the folded (false) claim.
#[derive(Clone, Debug)]
pub struct ShiftDcs {
    inner: HonestDcs,
    /// Claimed minus true sum, after padding.
    gap: u64,
}

impl ShiftDcs {
    pub fn new(f: &SparsePoly, claimed: u64) -> Self {
        let (p, a, _) = pad_to_pow2(f, claimed);
        let truth = crate::algebra::hypercube_sum(&p).expect("enumerable");
        let m = f.modulus();
        Self { inner: HonestDcs { cur: p, f0: None }, gap: m.sub(a, truth) }
    }
}

impl DcsProver for ShiftDcs {
    fn commit_f0(&mut self, level: usize) -> SparsePoly {
        self.inner.commit_f0(level)
    }

    fn challenge(&mut self, level: usize, alpha: &[u64], z: u64) {
        let m = self.inner.cur.modulus();
        self.gap = m.mul(self.gap, z);
        self.inner.challenge(level, alpha, z);
    }

    fn commit_last(&mut self) -> Vec<u64> {
        let m = self.inner.cur.modulus();
        let mut c = self.inner.commit_last();
        c[0] = m.add(c[0], m.mul(self.gap, m.inv(2).expect("odd q")));
        c
    }
}

/// One folding level as the verifier saw it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DcsLevel {
    pub level: usize,
    pub alpha: Vec<u64>,
    pub z: u64,
    pub claim: u64,
}

#[derive(Clone, Debug)]
pub struct DcsOutcome {
    pub accept: bool,
    pub levels: Vec<DcsLevel>,
    pub trace: Trace,
    /// Inert variables added to reach a power of two.
    pub pad: usize,
    /// Distributed runs only.
    pub transcript: Option<Transcript>,
}

/// `a^(m) = prod_j z_j * a + sum_j (prod_{l > j} z_l) F_0^(j)(alpha^(j))`.
pub fn telescoped_claim(m: PrimeModulus, a: u64, zs: &[u64], f0_at_alpha: &[u64]) -> u64 {
    let mut acc = zs.iter().fold(a, |acc, &z| m.mul(acc, z));
    for j in 0..zs.len() {
        let tail = zs[j + 1..].iter().fold(1, |acc, &z| m.mul(acc, z));
        acc = m.add(acc, m.mul(tail, f0_at_alpha[j]));
    }
    acc
}

/// Fold-DCS on a sparse polynomial, run centrally (`net = None`) or with
/// every committed polynomial distributed over `net`.
pub fn fold_dcs(
    f: &SparsePoly,
    a: u64,
    seed: u64,
    prover: &mut dyn DcsProver,
    net: Option<&Network>,
) -> Result<DcsOutcome, InstanceError> {
    let m = f.modulus();
    let d = f.individual_degree();
    let (fp, ap, pad) = pad_to_pow2(f, a);
    let total = fp.num_vars();
    let levels = total.trailing_zeros() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = net.map(build_tree).transpose()?;
    let mut wire = tree.as_ref().map(|t| Wire::new(m, t));
    let n = tree.as_ref().map_or(1, |t| t.n());
    let place = |p: &SparsePoly| distribute_monomials(p, n, monomial_cap(p.len(), n));
    let base = place(&fp)?;
    if let Some(w) = wire.as_mut() {
        w.from_prover("instance monomials", &[], &|v| base.payload(v));
    }

    let mut trace = Trace::default();
    let mut out_levels = Vec::new();
    let mut f0s: Vec<SparsePoly> = Vec::new();
    let mut alphas: Vec<Vec<u64>> = Vec::new();
    let mut zs = Vec::new();
    let mut claim = ap;
    let mut ok = true;
    let mut pending: Vec<u64> = Vec::new();
    for i in 1..=levels {
        let width = total >> i;
        let f0 = prover.commit_f0(i);
        if f0.num_vars() != width || f0.actual_degree() > d {
            ok = false;
        }
        let asg = place(&f0)?;
        let mut bits = 0;
        if let Some(w) = wire.as_mut() {
            w.from_prover(&format!("commit F0 level {i}"), &pending, &|v| asg.payload(v));
            bits = w.last_round_bits();
        }
        let alpha = random_vec(m, width, &mut rng);
        let z = m.random(&mut rng);
        if let Some(w) = wire.as_mut() {
            let mut c = alpha.clone();
            c.push(z);
            w.to_prover(&format!("challenges level {i}"), &c);
        }
        prover.challenge(i, &alpha, z);
        let f0_alpha = if f0.num_vars() == width { f0.eval(&alpha) } else { 0 };
        claim = m.add(m.mul(z, claim), f0_alpha);
        let mut ch = alpha.clone();
        ch.push(z);
        trace.levels.push(TraceLevel { round: i, claim, challenges: ch, bits });
        out_levels.push(DcsLevel { level: i, alpha: alpha.clone(), z, claim });
        pending = alpha.clone();
        pending.push(z);
        f0s.push(f0);
        alphas.push(alpha);
        zs.push(z);
    }
    // query phase
    let last = prover.commit_last();
    if last.len() > d + 1 {
        ok = false;
    }
    let last_poly = UniPoly::new(last.clone(), m);
    if let Some(w) = wire.as_mut() {
        let lc = last.clone();
        w.from_prover("commit final polynomial", &pending, &|v| if v == 0 { lc.clone() } else { Vec::new() });
    }
    let beta = m.random(&mut rng);
    if let Some(w) = wire.as_mut() {
        w.to_prover("query point", &[beta]);
    }
    let f0_alpha: Vec<u64> = f0s
        .iter()
        .zip(&alphas)
        .map(|(p, al)| if p.num_vars() == al.len() { p.eval(al) } else { 0 })
        .collect();
    let tele = telescoped_claim(m, ap, &zs, &f0_alpha);
    assert_eq!(tele, claim, "telescoped claim matches the running chain");
    if m.add(last_poly.eval(0), last_poly.eval(1)) != claim {
        ok = false;
    }
    // F(alpha^(1), ..., alpha^(m), beta) and F_0^(j)(alpha^(j+1), ..., beta)
    let mut full: Vec<u64> = alphas.iter().flatten().copied().collect();
    full.push(beta);
    let mut rhs = fp.eval(&full);
    let mut tails = Vec::new();
    for j in 0..levels {
        let mut pt: Vec<u64> = alphas[j + 1..].iter().flatten().copied().collect();
        pt.push(beta);
        tails.push(pt.clone());
        let v = if f0s[j].num_vars() == pt.len() { f0s[j].eval(&pt) } else { 0 };
        rhs = m.add(rhs, m.mul(zs[j], v));
    }
    if last_poly.eval(beta) != rhs {
        ok = false;
    }
    let mut transcript = None;
    if let (Some(mut w), Some(tree)) = (wire, tree.as_ref()) {
        // one aggregation pass answers all 2m + 1 polynomial queries
        let mut partials = vec![base.subtree(tree, &full)];
        let mut checks = Vec::new();
        for j in 0..levels {
            let asg = place(&f0s[j])?;
            if f0s[j].num_vars() == alphas[j].len() {
                partials.push(asg.subtree(tree, &alphas[j]));
                checks.push((asg.clone(), alphas[j].clone()));
            }
            if f0s[j].num_vars() == tails[j].len() {
                partials.push(asg.subtree(tree, &tails[j]));
                checks.push((asg, tails[j].clone()));
            }
        }
        let mut bcast = vec![beta];
        bcast.extend(&pending);
        let pr = partials.clone();
        w.from_prover("query partial sums", &bcast, &|v| pr.iter().map(|p| p[v]).collect());
        w.forward("query forward", &partials);
        for v in 0..tree.n() {
            let mut fine = base.check(tree, &full, &partials[0], v);
            for (qi, (asg, pt)) in checks.iter().enumerate() {
                fine &= asg.check(tree, pt, &partials[qi + 1], v);
            }
            if !fine {
                w.reject(v);
            }
        }
        if !ok {
            w.reject(0);
        }
        ok = w.tx.all_accept();
        transcript = Some(w.tx);
    }
    Ok(DcsOutcome { accept: ok, levels: out_levels, trace, pad, transcript })
}

/// Fold-DCS with the honest prover.
pub fn fold_dcs_honest(f: &SparsePoly, a: u64, seed: u64, net: Option<&Network>) -> Result<DcsOutcome, InstanceError> {
    fold_dcs(f, a, seed, &mut HonestDcs::new(f), net)
}

/// Soundness bound `(m + 1)(d + 1) / q` for `f`, with `m` folding levels.
pub fn fold_dcs_bound(f: &SparsePoly) -> f64 {
    let levels = f.num_vars().max(2).next_power_of_two().trailing_zeros() as f64;
    (levels + 1.0) * (f.individual_degree() as f64 + 1.0) / f.modulus().q() as f64
}

// ---------------------------------------------------------------- P_split

/// How the sub-instances produced by `P_split` are solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubSolver {
    FoldDcs,
    Plain,
    /// Masked distributed Sumcheck on a path just long enough for the degree.
    Zk,
}

/// Oracles whose restricted cube sums the splitting prover needs.
pub trait PrefixSum: Oracle {
    /// `sum over a in {0,1}^(N - |prefix|) of f(prefix, a)`.
    fn prefix_sum(&self, prefix: &[u64]) -> u64 {
        let nv = self.num_vars();
        let rest = nv - prefix.len();
        let m = self.modulus();
        let mut pt = prefix.to_vec();
        pt.resize(nv, 0);
        let mut s = 0;
        for mask in 0u64..1 << rest {
            crate::algebra::fill_bits(&mut pt[prefix.len()..], mask);
            s = m.add(s, self.eval(&pt));
        }
        s
    }
}

impl PrefixSum for SparsePoly {}
impl PrefixSum for crate::subgraph::PatternOracle {}

/// What the `P_split` prover sends.
pub trait SplitProver {
    /// `h_i` given `alpha^(1..i-1)`.
    fn h(&mut self, i: usize, alphas: &[Vec<u64>]) -> SparsePoly;
    /// `h~_t` given all `t` challenge blocks.
    fn h_tilde(&mut self, alphas: &[Vec<u64>]) -> SparsePoly;
}

/// Computes `h_i` by interpolating restricted cube sums on the grid
/// `{0..=d}^ell`.
pub struct HonestSplit<'a> {
    pub f: &'a dyn PrefixSum,
    pub ell: usize,
}

fn grid_points(vars: usize, d: usize) -> impl Iterator<Item = Vec<u64>> {
    let w = (d + 1) as u64;
    let total = w.pow(vars as u32);
    (0..total).map(move |mut idx| {
        let mut x = vec![0u64; vars];
        for i in (0..vars).rev() {
            x[i] = idx % w;
            idx /= w;
        }
        x
    })
}

impl<'a> HonestSplit<'a> {
    fn interpolate(&self, vars: usize, eval: &dyn Fn(&[u64]) -> u64) -> SparsePoly {
        let m = self.f.modulus();
        let d = self.f.degree();
        let values: Vec<u64> = grid_points(vars, d).map(|x| eval(&x)).collect();
        interpolate_grid(m, vars, d, &values).expect("grid fits the field")
    }
}

impl<'a> SplitProver for HonestSplit<'a> {
    fn h(&mut self, _i: usize, alphas: &[Vec<u64>]) -> SparsePoly {
        let prefix: Vec<u64> = alphas.iter().flatten().copied().collect();
        let f = self.f;
        self.interpolate(self.ell, &|x| {
            let mut p = prefix.clone();
            p.extend_from_slice(x);
            f.prefix_sum(&p)
        })
    }

    fn h_tilde(&mut self, alphas: &[Vec<u64>]) -> SparsePoly {
        let prefix: Vec<u64> = alphas.iter().flatten().copied().collect();
        let rest = self.f.num_vars() - prefix.len();
        let f = self.f;
        self.interpolate(rest, &|x| {
            let mut p = prefix.clone();
            p.extend_from_slice(x);
            f.eval(&p)
        })
    }
}

/// Honest except that one coefficient of `h_which` is off by one.
pub struct CorruptSplit<'a> {
    pub inner: HonestSplit<'a>,
    pub which: usize,
}

impl<'a> SplitProver for CorruptSplit<'a> {
    fn h(&mut self, i: usize, alphas: &[Vec<u64>]) -> SparsePoly {
        let mut p = self.inner.h(i, alphas);
        if i == self.which {
            p.add_term(vec![0; p.num_vars()], 1).expect("constant term");
        }
        p
    }

    fn h_tilde(&mut self, alphas: &[Vec<u64>]) -> SparsePoly {
        self.inner.h_tilde(alphas)
    }
}

#[derive(Clone, Debug)]
pub struct SplitOutcome {
    pub accept: bool,
    /// `a_0 = a, a_1, ..., a_t`.
    pub claims: Vec<u64>,
    /// Verdicts of the `t + 1` sub-instances.
    pub sub_accept: Vec<bool>,
    pub final_ok: bool,
    pub budget_ok: bool,
    pub max_monomials: usize,
    pub trace: Trace,
}

/// Checks `sum f = a` by splitting off `ell` variables per step for `t`
/// steps. Each prover polynomial must have at most `budget` monomials.
#[allow(clippy::too_many_arguments)]
pub fn p_split(
    f: &dyn PrefixSum,
    a: u64,
    ell: usize,
    t: usize,
    seed: u64,
    prover: &mut dyn SplitProver,
    solver: SubSolver,
    budget: usize,
) -> Result<SplitOutcome, InstanceError> {
    let m = f.modulus();
    let nv = f.num_vars();
    if ell == 0 || t == 0 || t * ell > nv {
        return Err(InstanceError::Invalid(format!("need ell >= 1, t >= 1, t * ell <= N (ell={ell}, t={t}, N={nv})")));
    }
    let d = f.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = m.bits();
    let mut trace = Trace::default();
    let mut hs: Vec<SparsePoly> = Vec::new();
    let mut alphas: Vec<Vec<u64>> = Vec::new();
    let mut claims = vec![m.reduce(a)];
    let mut shape_ok = true;
    let mut max_monomials = 0;
    let take = |p: SparsePoly, vars: usize, shape_ok: &mut bool, max_monomials: &mut usize| -> SparsePoly {
        *max_monomials = (*max_monomials).max(p.len());
        if p.num_vars() != vars || p.actual_degree() > d || p.len() > budget {
            *shape_ok = false;
        }
        p.with_degree(d).unwrap_or_else(|_| SparsePoly::zero(vars, d, m))
    };
    let h1 = prover.h(1, &alphas);
    hs.push(take(h1, ell, &mut shape_ok, &mut max_monomials));
    for i in 1..=t {
        let alpha = random_vec(m, ell, &mut rng);
        let ai = if hs[i - 1].num_vars() == ell { hs[i - 1].eval(&alpha) } else { 0 };
        claims.push(ai);
        alphas.push(alpha.clone());
        trace.levels.push(TraceLevel {
            round: i,
            claim: ai,
            challenges: alpha,
            bits: (hs[i - 1].len() as u64) * (ell as u64 + 1) * bits,
        });
        if i < t {
            let h = prover.h(i + 1, &alphas);
            hs.push(take(h, ell, &mut shape_ok, &mut max_monomials));
        }
    }
    let rest = nv - t * ell;
    let ht = prover.h_tilde(&alphas);
    let ht = take(ht, rest, &mut shape_ok, &mut max_monomials);
    let beta = random_vec(m, rest, &mut rng);
    let mut pt: Vec<u64> = alphas.iter().flatten().copied().collect();
    pt.extend(&beta);
    let final_ok = ht.num_vars() == rest && ht.eval(&beta) == f.eval(&pt);

    // sub-instances: (h_1, a), (h_{i+1}, a_i), (h~_t, a_t)
    let mut subs: Vec<(&SparsePoly, u64)> = Vec::new();
    subs.push((&hs[0], claims[0]));
    for i in 1..t {
        subs.push((&hs[i], claims[i]));
    }
    subs.push((&ht, claims[t]));
    let mut sub_accept = Vec::new();
    for (j, (p, c)) in subs.iter().enumerate() {
        let s = derive_seed(seed, 1 + j as u64);
        let acc = match solver {
            SubSolver::FoldDcs => fold_dcs_honest(p, *c, s, None)?.accept,
            SubSolver::Plain => plain_central(p, *c, s)?,
            SubSolver::Zk => zk_on_path(p, *c, s)?,
        };
        sub_accept.push(acc);
    }
    let accept = shape_ok && final_ok && sub_accept.iter().all(|&x| x);
    Ok(SplitOutcome { accept, claims, sub_accept, final_ok, budget_ok: max_monomials <= budget, max_monomials, trace })
}

/// Centralized Sumcheck on a sparse polynomial (padded to one variable when
/// constant).
fn plain_central(p: &SparsePoly, a: u64, seed: u64) -> Result<bool, InstanceError> {
    let m = p.modulus();
    let (p, a) = if p.num_vars() == 0 { (p.pad_vars(1), m.mul(a, 2)) } else { (p.clone(), a) };
    let n = p.individual_degree() + 1;
    let inst = SumcheckInstance::new(Network::path(n.max(2)), Arc::new(p), a, 1)?;
    Ok(centralized_sumcheck(&inst, &mut HonestProver, seed).accept)
}

/// Security parameter of masked sub-instances.
pub const MASKED_T: usize = 2;

fn zk_on_path(p: &SparsePoly, a: u64, seed: u64) -> Result<bool, InstanceError> {
    let m = p.modulus();
    let (p, a) = if p.num_vars() == 0 { (p.pad_vars(1), m.mul(a, 2)) } else { (p.clone(), a) };
    let n = (p.individual_degree() + 2).max(3);
    let inst = SumcheckInstance::new(Network::path(n), Arc::new(p), a, MASKED_T)?;
    check_zk_instance(&inst)?;
    Ok(zk_sumcheck(&inst, &mut HonestProver, seed).all_accept())
}

/// `floor(log n / log k)`.
pub fn split_width(n: usize, k: usize) -> usize {
    let mut ell = 0;
    let mut p = k;
    while p <= n {
        ell += 1;
        p *= k;
    }
    ell.max(1)
}

// ------------------------------------------------- constant-degree coloring

/// Largest max degree [`constdeg_noncolor`] accepts.
pub const CONSTDEG_MAX_DEGREE: usize = 4;

/// Largest `k^bandwidth` the contraction prover handles.
const MAX_BAND_STATES: usize = 1 << 16;

/// `P_G` with restricted cube sums computed by a sweep over node IDs,
/// assuming every edge joins IDs at most `band` apart.
pub struct BandColoring {
    pub oracle: ColoringOracle,
    net: Network,
    k: usize,
    band: usize,
    memo: Mutex<HashMap<usize, Arc<Vec<u64>>>>,
}

/// Max `|u - v|` over edges.
pub fn bandwidth(net: &Network) -> usize {
    net.edges().iter().map(|&(u, v)| v - u).max().unwrap_or(0)
}

impl BandColoring {
    pub fn new(net: &Network, k: usize, m: PrimeModulus) -> Result<Self, InstanceError> {
        let oracle = arithmetize(net, k, m)?;
        let band = bandwidth(net);
        if k.checked_pow(band as u32).is_none_or(|s| s > MAX_BAND_STATES) {
            return Err(InstanceError::Invalid(format!("bandwidth {band} too large for k = {k}")));
        }
        Ok(Self { oracle, net: net.clone(), k, band, memo: Mutex::new(HashMap::new()) })
    }

    fn node_f(&self, x: &[u64]) -> u64 {
        let m = self.oracle.modulus();
        let none = x.iter().fold(1, |acc, &c| m.mul(acc, m.sub(1, c)));
        let mut acc = m.sub(1, none);
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                acc = m.mul(acc, m.sub(1, m.mul(x[i], x[j])));
            }
        }
        acc
    }

    fn edge_f(&self, a: &[u64], b: &[u64]) -> u64 {
        let m = self.oracle.modulus();
        a.iter().zip(b).fold(1, |acc, (&x, &y)| m.mul(acc, m.sub(1, m.mul(x, y))))
    }

    fn one_hot(&self, c: usize) -> Vec<u64> {
        (0..self.k).map(|i| (i == c) as u64).collect()
    }

    /// For nodes `s..n`, all proper colorings summed, keyed by the colors of
    /// nodes `s..s + w` (base-`k` digits, node `s` least significant).
    fn suffix_table(&self, s: usize) -> Arc<Vec<u64>> {
        if let Some(t) = self.memo.lock().expect("memo").get(&s) {
            return t.clone();
        }
        let n = self.net.n();
        let k = self.k;
        let w = self.band.max(1);
        let m = self.oracle.modulus();
        let states = k.pow(w as u32);
        let digit = |st: usize, j: usize| (st / k.pow(j as u32)) % k;
        // d[state of v+1 .. v+w] after processing nodes > v
        // positions past the last node stay at color 0
        let mut d = vec![0u64; states];
        d[0] = 1;
        let mut v = n;
        while v > s {
            v -= 1;
            let mut next = vec![0u64; states];
            for (st, &val) in d.iter().enumerate() {
                if val == 0 {
                    continue;
                }
                for c in 0..k {
                    // neighbors of v above it, inside the window
                    let clash = self.net.neighbors(v).iter().any(|&u| u > v && u < n && digit(st, u - v - 1) == c);
                    if clash {
                        continue;
                    }
                    // drop node v + w, shift, put v first
                    let ns = (st * k + c) % states;
                    let nsv = if w == 0 { 0 } else { ns };
                    next[nsv] = m.add(next[nsv], val);
                }
            }
            d = next;
        }
        let d = Arc::new(d);
        self.memo.lock().expect("memo").insert(s, d.clone());
        d
    }
}

impl Oracle for BandColoring {
    fn num_vars(&self) -> usize {
        self.oracle.num_vars()
    }
    fn degree(&self) -> usize {
        self.oracle.degree()
    }
    fn modulus(&self) -> PrimeModulus {
        self.oracle.modulus()
    }
    fn eval(&self, point: &[u64]) -> u64 {
        self.oracle.eval(point)
    }
}

impl PrefixSum for BandColoring {
    fn prefix_sum(&self, prefix: &[u64]) -> u64 {
        let m = self.oracle.modulus();
        let n = self.net.n();
        let k = self.k;
        let w = self.band.max(1);
        let len = prefix.len();
        let s = len.div_ceil(k).min(n);
        let mixed = if !len.is_multiple_of(k) { Some(len / k) } else { None };
        let free_bits = if mixed.is_some() { k - len % k } else { 0 };
        let table = self.suffix_table(s);
        let span = w.min(n - s);
        let mut total = 0;
        for b in 0u64..1 << free_bits {
            // values of nodes below s
            let vals: Vec<Vec<u64>> = (0..s)
                .map(|p| {
                    let mut x: Vec<u64> = (p * k..p * k + k).map(|i| if i < len { prefix[i] } else { 0 }).collect();
                    if Some(p) == mixed {
                        for j in 0..free_bits {
                            x[k - free_bits + j] = (b >> (free_bits - 1 - j)) & 1;
                        }
                    }
                    x
                })
                .collect();
            let mut head = 1;
            for p in 0..s {
                head = m.mul(head, self.node_f(&vals[p]));
                for &u in self.net.neighbors(p) {
                    if u > p && u < s {
                        head = m.mul(head, self.edge_f(&vals[p], &vals[u]));
                    }
                }
            }
            if head == 0 {
                continue;
            }
            if s == n {
                total = m.add(total, head);
                continue;
            }
            let states = k.pow(span as u32);
            let mut tail = 0;
            for st in 0..states {
                let weight = table[st];
                if weight == 0 {
                    continue;
                }
                let mut cross = weight;
                for j in 0..span {
                    let v = s + j;
                    let cv = self.one_hot((st / k.pow(j as u32)) % k);
                    for &u in self.net.neighbors(v) {
                        if u < s {
                            cross = m.mul(cross, self.edge_f(&vals[u], &cv));
                        }
                    }
                }
                tail = m.add(tail, cross);
            }
            total = m.add(total, m.mul(head, tail));
        }
        total
    }
}

/// Path plus random extra edges between IDs at most `band` apart, keeping
/// the max degree at most `max_degree`.
pub fn band_graph<R: Rng + ?Sized>(n: usize, band: usize, max_degree: usize, extra: usize, rng: &mut R) -> Network {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    let mut deg = vec![2usize; n];
    if n > 0 {
        deg[0] = 1;
        deg[n - 1] = 1;
    }
    let mut tries = 0;
    let mut added = 0;
    while added < extra && tries < 50 * extra.max(1) && band >= 2 {
        tries += 1;
        let u = rng.gen_range(0..n);
        let v = u + rng.gen_range(2..=band);
        if v >= n || deg[u] >= max_degree || deg[v] >= max_degree || edges.contains(&(u, v)) {
            continue;
        }
        edges.push((u, v));
        deg[u] += 1;
        deg[v] += 1;
        added += 1;
    }
    Network::new(n, &edges).expect("valid band graph")
}

/// Round schedule parameters of [`constdeg_noncolor`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstdegPlan {
    pub n: usize,
    pub k: usize,
    pub num_vars: usize,
    /// Variables split off per step, `ceil(log_3 n)`.
    pub ell: usize,
    /// Smallest `t` with `N - t * ell <= ell`.
    pub t: usize,
    /// Sumcheck instances solved side by side, `ceil(log2 n)`.
    pub batch: usize,
    pub batches: usize,
}

impl ConstdegPlan {
    pub fn new(n: usize, k: usize) -> Self {
        let num_vars = n * k;
        let mut ell = 0;
        let mut p = 1usize;
        while p < n {
            p *= 3;
            ell += 1;
        }
        let ell = ell.max(1);
        let t = num_vars.saturating_sub(ell).div_ceil(ell).max(1);
        let batch = crate::algebra::id_bits(n);
        let batches = (t + 1).div_ceil(batch);
        Self { n, k, num_vars, ell, t, batch, batches }
    }

    /// Rounds of the schedule: one to ship `h_1`, three per split step,
    /// three for the final check, then per batch one Sumcheck on `ell`
    /// variables.
    pub fn rounds(&self, masked: bool) -> usize {
        let per = if masked {
            crate::zk::zk_schedule_rounds(self.ell, 2)
        } else {
            crate::sumcheck::PlainSumcheck::schedule_rounds(self.ell, 2)
        };
        1 + 3 * self.t + 3 + self.batches * per
    }
}

#[derive(Clone, Debug)]
pub struct ConstdegOutcome {
    pub q: u64,
    pub plan: ConstdegPlan,
    pub accept: Vec<bool>,
    pub rounds: usize,
    pub max_bits: u64,
    /// Largest number of monomials any node held for one polynomial.
    pub monomials_per_node: usize,
    pub transcript: Transcript,
    pub trace: Trace,
}

impl ConstdegOutcome {
    pub fn all_accept(&self) -> bool {
        self.accept.iter().all(|&a| a)
    }
}

/// Merges protocol runs executed side by side: round `j` carries every
/// run's round-`j` payload.
pub fn merge_parallel(runs: &[Transcript]) -> Transcript {
    let first = &runs[0];
    let mut out = Transcript { rounds: Vec::new(), challenges: Default::default(), ..first.clone() };
    let len = runs.iter().map(Transcript::num_rounds).max().unwrap_or(0);
    for j in 0..len {
        let mut per: Vec<NodePayload> = (0..first.n).map(NodePayload::new).collect();
        let mut dir = None;
        let mut labels = Vec::new();
        for tx in runs {
            if let Some(r) = tx.rounds.get(j) {
                assert!(dir.is_none_or(|d| d == r.dir), "parallel runs must share a schedule");
                dir = Some(r.dir);
                labels.push(r.label.clone());
                for p in &r.per_node {
                    for (i, &v) in p.values.iter().enumerate() {
                        let src = source_at(p, i);
                        per[p.id].push(src, v, p.tags.get(i).copied().unwrap_or(Tag::public(0)));
                    }
                }
            }
        }
        labels.dedup();
        out.push_round(dir.expect("non-empty round"), labels.join(" | "), per);
    }
    for tx in runs {
        out.challenges.r.extend(&tx.challenges.r);
    }
    out.accept = (0..first.n).map(|v| runs.iter().all(|t| t.accept[v])).collect();
    out
}

fn source_at(p: &NodePayload, i: usize) -> Source {
    let mut pos = 0;
    for s in &p.segments {
        if i < pos + s.len {
            return s.source;
        }
        pos += s.len;
    }
    Source::Prover
}

/// Non-`k`-colorability of a bounded-degree graph in `O(n / log n)` rounds:
/// `t` split steps produce `t + 1` small Sumcheck instances, solved with the
/// plain distributed protocol in batches of `ceil(log2 n)`.
pub fn constdeg_noncolor(net: &Network, k: usize, seed: u64) -> Result<ConstdegOutcome, InstanceError> {
    constdeg_noncolor_with(net, k, seed, false)
}

/// As [`constdeg_noncolor`]; with `masked` the sub-instances run the
/// zero-knowledge Sumcheck instead of the plain one.
pub fn constdeg_noncolor_with(net: &Network, k: usize, seed: u64, masked: bool) -> Result<ConstdegOutcome, InstanceError> {
    if net.max_degree() > CONSTDEG_MAX_DEGREE {
        return Err(InstanceError::Invalid(format!(
            "max degree {} exceeds {CONSTDEG_MAX_DEGREE}",
            net.max_degree()
        )));
    }
    let n = net.n();
    let plan = ConstdegPlan::new(n, k);
    let m = pick_field(n, derive_seed(seed, 100));
    let f = BandColoring::new(net, k, m)?;
    let d = f.degree();
    if m.q() <= d as u64 {
        return Err(InstanceError::FieldTooSmall { q: m.q(), need: d as u64 });
    }
    let tree = build_tree(net)?;
    let mut wire = Wire::new(m, &tree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prover = HonestSplit { f: &f, ell: plan.ell };
    let ell = plan.ell;
    let t = plan.t;
    let mut trace = Trace::default();
    let mut per_node = 0;

    let mut hs: Vec<SparsePoly> = Vec::new();
    let mut alphas: Vec<Vec<u64>> = Vec::new();
    let mut claims = vec![0u64];
    let place = |p: &SparsePoly| distribute_monomials(p, n, monomial_cap(p.len(), n));

    let h1 = prover.h(1, &alphas);
    let asg = place(&h1)?;
    per_node = per_node.max(asg.max_load());
    wire.from_prover("h1 monomials", &[], &|v| asg.payload(v));
    let mut asgs = vec![asg];
    hs.push(h1);
    for i in 1..=t {
        let alpha = random_vec(m, ell, &mut rng);
        wire.to_prover(&format!("alpha {i}"), &alpha);
        alphas.push(alpha.clone());
        // a_i = h_i(alpha^(i)) by aggregation; h_{i+1} (or h~_t) rides along
        let parts = asgs[i - 1].subtree(&tree, &alpha);
        let next = if i < t { prover.h(i + 1, &alphas) } else { prover.h_tilde(&alphas) };
        let nasg = place(&next)?;
        per_node = per_node.max(nasg.max_load());
        let p2 = parts.clone();
        let label = if i < t { format!("h{} monomials, partials of h{i}", i + 1) } else { format!("h~ monomials, partials of h{t}") };
        wire.from_prover(&label, &alpha, &|v| {
            let mut out = vec![p2[v]];
            out.extend(nasg.payload(v));
            out
        });
        let bits = wire.last_round_bits();
        wire.forward(&format!("forward partials of h{i}"), std::slice::from_ref(&parts));
        for v in 0..n {
            if !asgs[i - 1].check(&tree, &alpha, &parts, v) {
                wire.reject(v);
            }
        }
        claims.push(parts[0]);
        trace.levels.push(TraceLevel { round: wire.tx.num_rounds(), claim: parts[0], challenges: alpha, bits });
        asgs.push(nasg);
        hs.push(next);
    }
    // final check: h~_t(beta) = f(alpha, beta) via monomials and T_u products
    let rest = plan.num_vars - t * ell;
    let beta = random_vec(m, rest, &mut rng);
    wire.to_prover("beta", &beta);
    let mut pt: Vec<u64> = alphas.iter().flatten().copied().collect();
    pt.extend(&beta);
    let hparts = asgs[t].subtree(&tree, &beta);
    let tparts = f.oracle.subtree_products(&tree, &pt);
    let (h2, t2) = (hparts.clone(), tparts.clone());
    wire.from_prover("final partials", &beta, &|v| vec![h2[v], t2[v]]);
    wire.forward("final forward", &[hparts.clone(), tparts.clone()]);
    for v in 0..n {
        let kids = tree.children(v).iter().fold(1, |acc, &c| m.mul(acc, tparts[c]));
        let t_ok = m.mul(f.oracle.local_factor(v, &pt), kids) == tparts[v];
        if !asgs[t].check(&tree, &beta, &hparts, v) || !t_ok {
            wire.reject(v);
        }
    }
    if hparts[0] != m.mul(tparts[0], f.oracle.eval_s(&pt)) {
        wire.reject(0);
    }

    // t + 1 plain Sumcheck instances, padded to ell variables, in batches
    let mut jobs: Vec<(SparsePoly, u64)> = Vec::new();
    for i in 0..t {
        jobs.push((hs[i].clone(), claims[i]));
    }
    let tilde = &hs[t];
    let pad = ell - tilde.num_vars();
    jobs.push((tilde.pad_vars(pad), m.mul(claims[t], m.pow(2, pad as u64))));
    let batched = batched_sumchecks(net, &tree, &jobs, d, seed, plan.batch, masked)?;
    per_node = per_node.max(batched.monomials_per_node);
    let txs = vec![wire.tx, batched.transcript];
    let transcript = concat_transcripts(&txs);
    let accept = transcript.accept.clone();
    Ok(ConstdegOutcome {
        q: m.q(),
        rounds: transcript.num_rounds(),
        max_bits: transcript.max_bits_per_node_round(),
        plan,
        accept,
        monomials_per_node: per_node,
        transcript,
        trace,
    })
}

/// Result of solving a list of Sumcheck instances in parallel batches.
#[derive(Clone, Debug)]
pub struct BatchOutcome {
    pub transcript: Transcript,
    /// Per instance: did every node accept.
    pub verdicts: Vec<bool>,
    pub monomials_per_node: usize,
}

/// Per-instance seed of job `j` in a batched run.
pub fn job_seed(seed: u64, j: usize) -> u64 {
    derive_seed(seed, 1000 + j as u64)
}

/// Solves `(h, a)` jobs with the distributed Sumcheck (masked or plain),
/// `batch` at a time with their rounds interleaved. Job `j` uses
/// [`job_seed`], so verdicts do not depend on `batch`.
pub fn batched_sumchecks(
    net: &Network,
    tree: &SpanningTree,
    jobs: &[(SparsePoly, u64)],
    d: usize,
    seed: u64,
    batch: usize,
    masked: bool,
) -> Result<BatchOutcome, InstanceError> {
    let n = net.n();
    let mut per_node = 0;
    let mut verdicts = Vec::new();
    let mut txs = Vec::new();
    for (b, chunk) in jobs.chunks(batch.max(1)).enumerate() {
        let mut runs = Vec::new();
        for (j, (p, c)) in chunk.iter().enumerate() {
            let p = p.with_degree(d).map_err(InstanceError::from)?;
            let asg = distribute_monomials(&p, n, monomial_cap(p.len(), n))?;
            per_node = per_node.max(asg.max_load());
            let query = Arc::new(MonomialQuery { assign: asg, tree: tree.clone() });
            let t = if masked { MASKED_T } else { 1 };
            let inst = SumcheckInstance::hosted(net.clone(), Arc::new(p), *c, t)?.with_query(query);
            let s = job_seed(seed, b * batch.max(1) + j);
            let tx = if masked {
                check_zk_instance(&inst)?;
                zk_sumcheck(&inst, &mut HonestProver, s)
            } else {
                distributed_plain_sumcheck(&inst, &mut HonestProver, s)
            };
            let tx = project_hosts(&tx, n);
            verdicts.push(tx.all_accept());
            runs.push(tx);
        }
        txs.push(merge_parallel(&runs));
    }
    Ok(BatchOutcome { transcript: concat_transcripts(&txs), verdicts, monomials_per_node: per_node })
}

/// Runs one after another; verdicts are combined per node.
pub fn concat_transcripts(parts: &[Transcript]) -> Transcript {
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        out.rounds.extend(p.rounds.iter().cloned());
        out.challenges.r.extend(&p.challenges.r);
        for (a, &b) in out.accept.iter_mut().zip(&p.accept) {
            *a &= b;
        }
    }
    out
}

/// Folds virtual hosted nodes `v + c * n` into their host `v`.
pub fn project_hosts(tx: &Transcript, real_n: usize) -> Transcript {
    if tx.n == real_n {
        return tx.clone();
    }
    let mut out = Transcript { rounds: Vec::new(), ..tx.clone() };
    out.n = real_n;
    for r in &tx.rounds {
        let mut per: Vec<NodePayload> = (0..real_n).map(NodePayload::new).collect();
        for p in &r.per_node {
            for (i, &v) in p.values.iter().enumerate() {
                let src = match source_at(p, i) {
                    Source::Node(u) => Source::Node(u % real_n),
                    s => s,
                };
                per[p.id % real_n].push(src, v, p.tags.get(i).copied().unwrap_or(Tag::public(0)));
            }
        }
        out.push_round(r.dir, r.label.clone(), per);
    }
    out.accept = vec![true; real_n];
    for (v, &a) in tx.accept.iter().enumerate() {
        out.accept[v % real_n] &= a;
    }
    out
}
