//! The LFKN Sumcheck protocol: a centralized reference verifier and the plain
//! distributed version in which node `k` holds coefficient `k` of each round
//! polynomial and subtree sums are checked along the spanning tree.
//!
//! Round schedule of [`PlainSumcheck`] for `N` variables and an oracle whose
//! distributed query takes `Q` rounds:
//!
//! ```text
//! 1            topology (children announce themselves to their parent)
//! 1            prover -> nodes: alpha, beta for g_1
//! 2 (N-1)      root -> prover r_{i-1}; prover -> nodes alpha, beta, beta~ for g_i
//! 2            root -> prover r_N; prover -> nodes beta~ for the final check
//! Q            distributed oracle query (0 when the root queries directly)
//! 1            children send their beta / beta~ values to the parent
//! total        2N + 3 + Q
//! ```

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{partial_sum_univariate, Oracle, PrimeModulus, UniPoly};
use crate::error::InstanceError;
use crate::netsim::{
    build_tree, Direction, NodePayload, Network, Protocol, Source, SpanningTree, Tag, Transcript,
};
use crate::seeds::derive_seed;
use crate::zk::MaskSet;

/// How an application answers the Final Check query inside the network.
pub trait DistributedQuery: Send + Sync {
    /// Rounds one query adds to the schedule.
    fn rounds(&self) -> usize;
    /// Evaluates the oracle at `point`, appending its rounds to `env.tx` and
    /// clearing accept bits of nodes whose local consistency check fails.
    /// Returns the value the root ends up with.
    fn query(&self, point: &[u64], env: &mut QueryEnv<'_>) -> u64;
}

/// How the prover answers oracle sub-protocols. Simulators use `Uniform`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryMode {
    Honest,
    Uniform,
}

pub struct QueryEnv<'a> {
    pub tree: &'a SpanningTree,
    pub modulus: PrimeModulus,
    pub tx: &'a mut Transcript,
    pub mode: QueryMode,
    pub rng: &'a mut ChaCha8Rng,
    /// Lets a prover alter the value it hands to `node` in a query round.
    pub tamper: &'a mut dyn FnMut(usize, &mut u64),
}

/// `(G, F, q, a)` plus the security parameter used by the zero-knowledge layer.
#[derive(Clone)]
pub struct SumcheckInstance {
    pub net: Network,
    pub tree: SpanningTree,
    pub oracle: Arc<dyn Oracle>,
    pub modulus: PrimeModulus,
    pub a: u64,
    pub t: usize,
    pub query: Option<Arc<dyn DistributedQuery>>,
    /// Number of physical nodes. When the degree is at least the node count,
    /// node `v` additionally hosts virtual nodes `v + n, v + 2n, ...` chained
    /// below it, so that every coefficient still has its own holder.
    pub real_n: usize,
}

impl std::fmt::Debug for SumcheckInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SumcheckInstance")
            .field("n", &self.net.n())
            .field("num_vars", &self.oracle.num_vars())
            .field("degree", &self.oracle.degree())
            .field("q", &self.modulus.q())
            .field("a", &self.a)
            .field("t", &self.t)
            .finish()
    }
}

impl SumcheckInstance {
    pub fn new(net: Network, oracle: Arc<dyn Oracle>, a: u64, t: usize) -> Result<Self, InstanceError> {
        let tree = build_tree(&net)?;
        let modulus = oracle.modulus();
        let d = oracle.degree();
        if d >= net.n() {
            return Err(InstanceError::DegreeNotBelowN { d, n: net.n() });
        }
        if t < 1 {
            return Err(InstanceError::BadT(t));
        }
        let real_n = net.n();
        Ok(Self { net, tree, oracle, modulus, a: modulus.reduce(a), t, query: None, real_n })
    }

    /// Like [`new`](Self::new) but accepts any degree by letting each node
    /// host `ceil((d + 1) / n)` coefficient slots.
    pub fn hosted(net: Network, oracle: Arc<dyn Oracle>, a: u64, t: usize) -> Result<Self, InstanceError> {
        let n = net.n();
        let slots = (oracle.degree() + 1).div_ceil(n);
        if slots <= 1 {
            return Self::new(net, oracle, a, t);
        }
        let mut edges = net.edges().to_vec();
        for c in 1..slots {
            for v in 0..n {
                edges.push((v + (c - 1) * n, v + c * n));
            }
        }
        let vnet = Network::new(n * slots, &edges)?;
        let mut inst = Self::new(vnet, oracle, a, t)?;
        inst.real_n = n;
        Ok(inst)
    }

    /// Physical node hosting (virtual) node `v`.
    pub fn host_of(&self, v: usize) -> usize {
        v % self.real_n
    }

    /// A physical node accepts iff all nodes it hosts accept.
    pub fn physical_accept(&self, accept: &[bool]) -> Vec<bool> {
        let mut out = vec![true; self.real_n];
        for (v, &a) in accept.iter().enumerate() {
            out[self.host_of(v)] &= a;
        }
        out
    }

    pub fn with_query(mut self, q: Arc<dyn DistributedQuery>) -> Self {
        self.query = Some(q);
        self
    }

    pub fn n(&self) -> usize {
        self.net.n()
    }

    pub fn num_vars(&self) -> usize {
        self.oracle.num_vars()
    }

    pub fn degree(&self) -> usize {
        self.oracle.degree()
    }

    pub fn query_rounds(&self) -> usize {
        self.query.as_ref().map_or(0, |q| q.rounds())
    }
}

/// Values the prover hands node `k` for one round. For round 1 `beta_tilde`
/// is empty; for the closing round `N+1` only `beta_tilde` is filled.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CoefficientAssignment {
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
    pub beta_tilde: Vec<u64>,
}

/// Sum over the subtree of each node, computed bottom-up.
pub fn subtree_sums(m: PrimeModulus, tree: &SpanningTree, vals: &[u64]) -> Vec<u64> {
    let mut out = vals.to_vec();
    for v in tree.bottom_up() {
        if let Some(p) = tree.parent(v) {
            out[p] = m.add(out[p], out[v]);
        }
    }
    out
}

/// Honest assignment for round `i` (1-based, up to `N+1`) from the round
/// polynomials `g_i` and `g_{i-1}` (both padded to `n` coefficients) and the
/// challenges drawn so far.
pub fn honest_assignment(
    m: PrimeModulus,
    tree: &SpanningTree,
    i: usize,
    r: &[u64],
    g_cur: Option<&[u64]>,
    g_prev: Option<&[u64]>,
) -> CoefficientAssignment {
    let mut out = CoefficientAssignment::default();
    if let Some(g) = g_cur {
        out.alpha = g.to_vec();
        out.beta = subtree_sums(m, tree, g);
    }
    if i >= 2 {
        let g = g_prev.expect("previous round polynomial");
        let rr = r[i - 2];
        let weighted: Vec<u64> = g.iter().enumerate().map(|(k, &c)| m.mul(c, m.pow(rr, k as u64))).collect();
        out.beta_tilde = subtree_sums(m, tree, &weighted);
    }
    out
}

/// A (possibly cheating) Sumcheck prover, shared by the plain and the
/// zero-knowledge distributed protocols.
pub trait SumcheckProver {
    /// Coefficients of `g_i` given `r_1..r_{i-1}`; shorter vectors are padded.
    fn round_poly(&mut self, inst: &SumcheckInstance, i: usize, r: &[u64]) -> Vec<u64>;

    /// What each node is told for round `i`.
    fn assignment(
        &mut self,
        inst: &SumcheckInstance,
        i: usize,
        r: &[u64],
        g_cur: Option<&[u64]>,
        g_prev: Option<&[u64]>,
    ) -> CoefficientAssignment {
        honest_assignment(inst.modulus, &inst.tree, i, r, g_cur, g_prev)
    }

    /// Hook to corrupt freshly generated masks before anything is sent.
    fn tamper_masks(&mut self, _stage: usize, _masks: &mut MaskSet) {}

    /// Hook to mangle the payload for `node` in the round labelled `label`.
    fn corrupt_payload(&mut self, _label: &str, _node: usize, _payload: &mut Vec<u64>) {}

    /// Hook to alter values handed out during oracle sub-protocols.
    fn tamper_query(&mut self, _node: usize, _value: &mut u64) {}
}

/// Pads (or truncates) a prover polynomial to exactly `n` coefficients.
/// Returns whether the input fit.
pub fn pad_poly(mut g: Vec<u64>, n: usize, m: PrimeModulus) -> (Vec<u64>, bool) {
    for c in &mut g {
        *c = m.reduce(*c);
    }
    let fits = g.iter().skip(n).all(|&c| c == 0);
    g.resize(n, 0);
    (g, fits)
}

/// Computes `g_i` by hypercube enumeration.
#[derive(Clone, Debug, Default)]
pub struct HonestProver;

impl SumcheckProver for HonestProver {
    fn round_poly(&mut self, inst: &SumcheckInstance, i: usize, r: &[u64]) -> Vec<u64> {
        partial_sum_univariate(inst.oracle.as_ref(), &r[..i - 1], i).expect("enumerable instance").coeffs
    }
}

/// Adds `delta` to the constant coefficient of every round polynomial.
#[derive(Clone, Debug)]
pub struct ConstantShiftProver {
    pub delta: u64,
}

impl SumcheckProver for ConstantShiftProver {
    fn round_poly(&mut self, inst: &SumcheckInstance, i: usize, r: &[u64]) -> Vec<u64> {
        let mut g = HonestProver.round_poly(inst, i, r);
        g[0] = inst.modulus.add(g[0], self.delta);
        g
    }
}

/// Cheating provers draw from their own stream so that sharing a seed with
/// the verifier does not reveal the challenges.
const ADVERSARY_STREAM: u64 = 5;

/// Sends uniformly random coefficients of the right degree.
#[derive(Clone, Debug)]
pub struct GarbageProver {
    rng: ChaCha8Rng,
}

impl GarbageProver {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(crate::seeds::derive_seed(seed, ADVERSARY_STREAM)) }
    }
}

impl SumcheckProver for GarbageProver {
    fn round_poly(&mut self, inst: &SumcheckInstance, _i: usize, _r: &[u64]) -> Vec<u64> {
        (0..=inst.degree()).map(|_| inst.modulus.random(&mut self.rng)).collect()
    }
}

/// Sends the zero polynomial every round.
#[derive(Clone, Debug, Default)]
pub struct ZeroProver;

impl SumcheckProver for ZeroProver {
    fn round_poly(&mut self, _inst: &SumcheckInstance, _i: usize, _r: &[u64]) -> Vec<u64> {
        vec![0]
    }
}

/// The standard adversary against a false claim: each message differs from
/// the honest one by a degree-`d` polynomial with `d` random roots, scaled to
/// satisfy the current consistency check. If a challenge lands on a root the
/// running claim becomes true and the prover continues honestly.
#[derive(Clone, Debug)]
pub struct AdaptiveProver {
    rng: ChaCha8Rng,
    /// Difference between claimed and true value of the current claim.
    gap: u64,
    last_diff: Vec<u64>,
}

impl AdaptiveProver {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(crate::seeds::derive_seed(seed, ADVERSARY_STREAM)), gap: 0, last_diff: Vec::new() }
    }

    fn diff_poly(&mut self, m: PrimeModulus, d: usize, gap: u64) -> Vec<u64> {
        if gap == 0 {
            return vec![0];
        }
        let inv2 = m.inv(2).expect("odd modulus");
        if d == 0 {
            return vec![m.mul(gap, inv2)];
        }
        loop {
            // prod_j (x - rho_j) in coefficient form
            let mut p = vec![1u64];
            for _ in 0..d {
                let rho = m.random(&mut self.rng);
                let mut next = vec![0u64; p.len() + 1];
                for (k, &c) in p.iter().enumerate() {
                    next[k + 1] = m.add(next[k + 1], c);
                    next[k] = m.sub(next[k], m.mul(c, rho));
                }
                p = next;
            }
            let poly = UniPoly::new(p.clone(), m);
            let s = m.add(poly.eval(0), poly.eval(1));
            if s == 0 {
                continue;
            }
            let lam = m.mul(gap, m.inv(s).expect("nonzero"));
            return p.into_iter().map(|c| m.mul(c, lam)).collect();
        }
    }
}

impl SumcheckProver for AdaptiveProver {
    fn round_poly(&mut self, inst: &SumcheckInstance, i: usize, r: &[u64]) -> Vec<u64> {
        let m = inst.modulus;
        if i == 1 {
            let truth = crate::algebra::hypercube_sum(inst.oracle.as_ref()).expect("enumerable");
            self.gap = m.sub(inst.a, truth);
        } else {
            let prev = UniPoly::new(std::mem::take(&mut self.last_diff), m);
            self.gap = prev.eval(r[i - 2]);
        }
        let honest = HonestProver.round_poly(inst, i, r);
        let diff = self.diff_poly(m, inst.degree(), self.gap);
        let out = UniPoly::new(honest, m).add(&UniPoly::new(diff.clone(), m)).coeffs;
        self.last_diff = diff;
        out
    }
}

/// Honest except that `alpha` of one node in one round is shifted by one.
#[derive(Clone, Debug)]
pub struct CorruptAlphaProver {
    pub round: usize,
    pub node: usize,
}

impl SumcheckProver for CorruptAlphaProver {
    fn round_poly(&mut self, inst: &SumcheckInstance, i: usize, r: &[u64]) -> Vec<u64> {
        HonestProver.round_poly(inst, i, r)
    }

    fn assignment(
        &mut self,
        inst: &SumcheckInstance,
        i: usize,
        r: &[u64],
        g_cur: Option<&[u64]>,
        g_prev: Option<&[u64]>,
    ) -> CoefficientAssignment {
        let mut a = honest_assignment(inst.modulus, &inst.tree, i, r, g_cur, g_prev);
        if i == self.round && !a.alpha.is_empty() {
            a.alpha[self.node] = inst.modulus.add(a.alpha[self.node], 1);
        }
        a
    }
}

/// Randomness streams of one run. The root's challenge stream is separate
/// from its index stream so that plain and zero-knowledge runs with the same
/// seed see the same `r_i`.
pub struct RunStreams {
    pub challenges: ChaCha8Rng,
    pub indices: ChaCha8Rng,
    pub prover: ChaCha8Rng,
}

impl RunStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            challenges: ChaCha8Rng::seed_from_u64(seed),
            indices: ChaCha8Rng::seed_from_u64(derive_seed(seed, 1)),
            prover: ChaCha8Rng::seed_from_u64(derive_seed(seed, 2)),
        }
    }
}

/// Result of the reference verifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralOutcome {
    pub accept: bool,
    pub challenges: Vec<u64>,
    /// 1-based round of the first failed check (`N+1` = final check).
    pub failed_at: Option<usize>,
}

/// Steps 1, 2 and the Final Check of the textbook protocol, with the
/// verifier's challenges drawn from `seed`.
pub fn centralized_sumcheck(
    inst: &SumcheckInstance,
    prover: &mut dyn SumcheckProver,
    seed: u64,
) -> CentralOutcome {
    let m = inst.modulus;
    let nv = inst.num_vars();
    let d = inst.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Vec::with_capacity(nv);
    let mut claim = inst.a;
    for i in 1..=nv {
        let (g, fits) = pad_poly(prover.round_poly(inst, i, &r), inst.n().max(d + 1), m);
        let g = UniPoly::new(g, m);
        let deg_ok = fits && g.degree().is_none_or(|dg| dg <= d);
        if !deg_ok || m.add(g.eval(0), g.eval(1)) != claim {
            return CentralOutcome { accept: false, challenges: r, failed_at: Some(i) };
        }
        let ri = m.random(&mut rng);
        r.push(ri);
        claim = g.eval(ri);
    }
    let ok = inst.oracle.eval(&r) == claim;
    CentralOutcome { accept: ok, challenges: r, failed_at: if ok { None } else { Some(nv + 1) } }
}

/// Payload helper: `n` empty payloads.
pub(crate) fn blank(n: usize) -> Vec<NodePayload> {
    (0..n).map(NodePayload::new).collect()
}

/// Children announce themselves; afterwards each node knows its child list.
pub(crate) fn topology_round(tree: &SpanningTree, tx: &mut Transcript) {
    let mut per = blank(tree.n());
    for v in 1..tree.n() {
        let p = tree.parent(v).expect("non-root");
        per[p].push(Source::Node(v), v as u64, Tag { owner: v as u32, ..Tag::public(0) });
    }
    tx.push_round(Direction::NodeToNeighbor, "topology", per);
}

pub(crate) fn root_to_prover(tx: &mut Transcript, label: &str, vals: &[u64], stage: u32) {
    let mut p = NodePayload::new(0);
    for &v in vals {
        p.push(Source::Node(0), v, Tag::public(stage));
    }
    tx.push_round(Direction::NodesToProver, label, vec![p]);
}

/// Decodes a received block, flagging arity errors.
pub(crate) fn take_exact(vals: &[u64], len: usize) -> (Vec<u64>, bool) {
    let mut v = vals.to_vec();
    let ok = v.len() == len;
    v.resize(len, 0);
    (v, ok)
}

/// Runs the Final Check query: either the application's distributed query
/// or a direct oracle call by the root.
pub(crate) fn final_query(
    inst: &SumcheckInstance,
    point: &[u64],
    tx: &mut Transcript,
    mode: QueryMode,
    rng: &mut ChaCha8Rng,
    prover: &mut dyn SumcheckProver,
) -> u64 {
    match &inst.query {
        None => inst.oracle.eval(point),
        Some(q) => {
            let mut tamper = |node: usize, v: &mut u64| prover.tamper_query(node, v);
            let mut env =
                QueryEnv { tree: &inst.tree, modulus: inst.modulus, tx, mode, rng, tamper: &mut tamper };
            q.query(point, &mut env)
        }
    }
}

/// The plain (not zero-knowledge) distributed protocol.
#[derive(Clone, Debug)]
pub struct PlainSumcheck {
    pub inst: SumcheckInstance,
}

impl PlainSumcheck {
    pub fn new(inst: SumcheckInstance) -> Self {
        Self { inst }
    }

    /// Exact round count of the schedule.
    pub fn schedule_rounds(num_vars: usize, query_rounds: usize) -> usize {
        2 * num_vars + 3 + query_rounds
    }

    /// Largest prover-to-node message, in field elements.
    pub const PROVER_ELEMS: u64 = 4;
}

impl Protocol for PlainSumcheck {
    type Prover = dyn SumcheckProver;

    fn execute(&self, prover: &mut Self::Prover, seed: u64) -> Transcript {
        distributed_plain_sumcheck(&self.inst, prover, seed)
    }

    fn bit_bound(&self) -> Option<u64> {
        Some(Self::PROVER_ELEMS * self.inst.modulus.bits())
    }

    fn edge_bound(&self) -> Option<u64> {
        Some(2 * self.inst.num_vars() as u64 * self.inst.modulus.bits())
    }
}

/// The plain distributed Sumcheck. See the module docs for the schedule.
pub fn distributed_plain_sumcheck(
    inst: &SumcheckInstance,
    prover: &mut dyn SumcheckProver,
    seed: u64,
) -> Transcript {
    let m = inst.modulus;
    let n = inst.n();
    let nv = inst.num_vars();
    let tree = &inst.tree;
    let mut streams = RunStreams::new(seed);
    let mut tx = Transcript::new(m, n);
    let mut ok = vec![true; n];

    topology_round(tree, &mut tx);

    // per node: alpha[i], beta[i], beta_tilde[i] as received (index i-1 / i-2)
    let mut alpha = vec![vec![0u64; nv]; n];
    let mut beta = vec![vec![0u64; nv]; n];
    let mut btil = vec![vec![0u64; nv]; n]; // rounds 2..=N+1
    let mut r: Vec<u64> = Vec::new();
    let mut g_prev: Option<Vec<u64>> = None;

    for i in 1..=nv + 1 {
        if i >= 2 {
            let ri = m.random(&mut streams.challenges);
            r.push(ri);
            tx.challenges.r.push(ri);
            root_to_prover(&mut tx, &format!("challenge r{}", i - 1), &[ri], i as u32);
        }
        let g_cur = if i <= nv {
            let (g, _) = pad_poly(prover.round_poly(inst, i, &r), n, m);
            Some(g)
        } else {
            None
        };
        let asg = prover.assignment(inst, i, &r, g_cur.as_deref(), g_prev.as_deref());
        let mut per = blank(n);
        let label = if i <= nv { format!("round {i}") } else { "final".to_string() };
        for k in 0..n {
            let mut vals = Vec::new();
            if i >= 2 {
                vals.push(r[i - 2]);
            }
            if i <= nv {
                vals.push(asg.alpha.get(k).copied().unwrap_or(0));
                vals.push(asg.beta.get(k).copied().unwrap_or(0));
            }
            if i >= 2 {
                vals.push(asg.beta_tilde.get(k).copied().unwrap_or(0));
            }
            let expect = vals.len();
            prover.corrupt_payload(&label, k, &mut vals);
            let (vals, fine) = take_exact(&vals, expect);
            if !fine {
                ok[k] = false;
            }
            let mut pos = 0;
            if i >= 2 {
                if vals[0] != r[i - 2] {
                    ok[k] = false;
                }
                pos = 1;
            }
            if i <= nv {
                alpha[k][i - 1] = vals[pos];
                beta[k][i - 1] = vals[pos + 1];
                pos += 2;
            }
            if i >= 2 {
                btil[k][i - 2] = vals[pos];
            }
            for v in vals {
                per[k].push(Source::Prover, v, Tag::public(i as u32));
            }
        }
        tx.push_round(Direction::ProverToNodes, label, per);
        g_prev = g_cur;
    }

    let fr = final_query(inst, &r, &mut tx, QueryMode::Honest, &mut streams.prover, prover);

    // Verification exchange: each child sends its betas and beta~s upward.
    let mut per = blank(n);
    for v in 1..n {
        let p = tree.parent(v).expect("non-root");
        for i in 0..nv {
            per[p].push(Source::Node(v), beta[v][i], Tag::public(0));
        }
        for i in 0..nv {
            per[p].push(Source::Node(v), btil[v][i], Tag::public(0));
        }
    }
    tx.push_round(Direction::NodeToNeighbor, "verify", per);

    for k in 0..n {
        let rk: Vec<u64> = r.iter().map(|&x| m.pow(x, k as u64)).collect();
        for i in 0..nv {
            let child_beta = m.sum(tree.children(k).iter().map(|&j| beta[j][i]));
            if m.add(alpha[k][i], child_beta) != beta[k][i] {
                ok[k] = false;
            }
            // beta~ for round i+2 uses alpha of round i+1 (index i) and r_{i+1}
            let child_bt = m.sum(tree.children(k).iter().map(|&j| btil[j][i]));
            if m.add(m.mul(alpha[k][i], rk[i]), child_bt) != btil[k][i] {
                ok[k] = false;
            }
        }
    }
    if n > 0 && nv > 0 {
        if m.add(alpha[0][0], beta[0][0]) != inst.a {
            ok[0] = false;
        }
        for i in 1..nv {
            if m.add(alpha[0][i], beta[0][i]) != btil[0][i - 1] {
                ok[0] = false;
            }
        }
        if btil[0][nv - 1] != fr {
            ok[0] = false;
        }
    }
    for (k, a) in ok.into_iter().enumerate() {
        tx.accept[k] = tx.accept[k] && a;
    }
    tx
}

/// Convenience: draw a fresh stream of challenges for tests.
pub fn random_point<R: Rng + ?Sized>(m: PrimeModulus, n: usize, rng: &mut R) -> Vec<u64> {
    (0..n).map(|_| m.random(rng)).collect()
}
