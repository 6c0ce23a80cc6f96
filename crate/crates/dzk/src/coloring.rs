//! Non-k-colorability: the polynomial `P_G = T * S` whose cube sum counts
//! proper k-colorings, its distributed evaluation and the SAT to 3-coloring
//! instance generator.
//!
//! Variable `c_v^i` (node `v`, color `i`, both 0-based) has index `v * k + i`.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{sample_prime, Oracle, PrimeModulus};
use crate::error::InstanceError;
use crate::netsim::{build_tree, Direction, Network, NodePayload, Source, SpanningTree, Tag, Transcript};
use crate::sumcheck::{DistributedQuery, QueryEnv, QueryMode, SumcheckInstance, SumcheckProver};
use crate::zk::{check_zk_instance, zk_sumcheck};

/// The prime range starts at `n^FIELD_EXPONENT`.
pub const FIELD_EXPONENT: u32 = 4;

/// Largest `k * n` the honest prover enumerates.
pub const MAX_COLOR_VARS: usize = 18;

/// `P_G` for a fixed graph and color count.
#[derive(Clone, Debug)]
pub struct ColoringOracle {
    n: usize,
    k: usize,
    modulus: PrimeModulus,
    /// For each node, its neighbors with larger ID.
    up: Vec<Vec<usize>>,
    degree: usize,
}

impl ColoringOracle {
    pub fn new(net: &Network, k: usize, modulus: PrimeModulus) -> Self {
        let n = net.n();
        let up = (0..n).map(|u| net.neighbors(u).iter().copied().filter(|&v| v > u).collect()).collect();
        Self { n, k, modulus, up, degree: net.max_degree() + k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    /// Edge factors `(u, v, color)` of `T`, with `u < v`.
    pub fn t_factors(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for &v in &self.up[u] {
                for i in 0..self.k {
                    out.push((u, v, i));
                }
            }
        }
        out
    }

    /// Product of the edge factors owned by `u` (edges to larger IDs).
    pub fn local_factor(&self, u: usize, x: &[u64]) -> u64 {
        let m = self.modulus;
        let k = self.k;
        let mut acc = 1;
        for &v in &self.up[u] {
            for i in 0..k {
                acc = m.mul(acc, m.sub(1, m.mul(x[u * k + i], x[v * k + i])));
            }
        }
        acc
    }

    pub fn eval_t(&self, x: &[u64]) -> u64 {
        let m = self.modulus;
        (0..self.n).fold(1, |acc, u| m.mul(acc, self.local_factor(u, x)))
    }

    /// `A_v * B_v` for one node: at least one color, no two colors.
    pub fn node_factor(&self, v: usize, x: &[u64]) -> u64 {
        let m = self.modulus;
        let k = self.k;
        let c = &x[v * k..v * k + k];
        let none = c.iter().fold(1, |acc, &ci| m.mul(acc, m.sub(1, ci)));
        let mut acc = m.sub(1, none);
        for i in 0..k {
            for j in i + 1..k {
                acc = m.mul(acc, m.sub(1, m.mul(c[i], c[j])));
            }
        }
        acc
    }

    pub fn eval_s(&self, x: &[u64]) -> u64 {
        let m = self.modulus;
        (0..self.n).fold(1, |acc, v| m.mul(acc, self.node_factor(v, x)))
    }

    /// Partial products `T_u` over the subtrees of `tree`.
    pub fn subtree_products(&self, tree: &SpanningTree, x: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        let mut t: Vec<u64> = (0..self.n).map(|u| self.local_factor(u, x)).collect();
        for v in tree.bottom_up() {
            if let Some(p) = tree.parent(v) {
                t[p] = m.mul(t[p], t[v]);
            }
        }
        t
    }
}

impl Oracle for ColoringOracle {
    fn num_vars(&self) -> usize {
        self.n * self.k
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn modulus(&self) -> PrimeModulus {
        self.modulus
    }
    fn eval(&self, x: &[u64]) -> u64 {
        assert_eq!(x.len(), self.n * self.k, "oracle arity");
        self.modulus.mul(self.eval_t(x), self.eval_s(x))
    }
}

/// Builds `P_G` for `net` and `k` colors over `modulus`.
pub fn arithmetize(net: &Network, k: usize, modulus: PrimeModulus) -> Result<ColoringOracle, InstanceError> {
    if k < 2 {
        return Err(InstanceError::Invalid(format!("need k >= 2, got {k}")));
    }
    Ok(ColoringOracle::new(net, k, modulus))
}

/// Prime drawn from `[R, 2R]` with `R = max(n^4, 3)`.
pub fn pick_field(n: usize, seed: u64) -> PrimeModulus {
    let r = (n as u64).saturating_pow(FIELD_EXPONENT).max(3);
    sample_prime(r, seed).expect("range start is valid")
}

/// Assigns `c` to `v` and propagates forced colors; `false` on a conflict.
fn assign(net: &Network, v: usize, c: usize, col: &mut [usize], dom: &mut [u64], left: &mut usize) -> bool {
    let mut stack = vec![(v, c)];
    while let Some((v, c)) = stack.pop() {
        if col[v] != usize::MAX {
            if col[v] != c {
                return false;
            }
            continue;
        }
        if dom[v] & (1 << c) == 0 {
            return false;
        }
        col[v] = c;
        dom[v] = 1 << c;
        *left -= 1;
        for &u in net.neighbors(v) {
            if col[u] == c {
                return false;
            }
            if col[u] != usize::MAX {
                continue;
            }
            dom[u] &= !(1 << c);
            match dom[u].count_ones() {
                0 => return false,
                1 => stack.push((u, dom[u].trailing_zeros() as usize)),
                _ => {}
            }
        }
    }
    true
}

/// Number of proper colorings extending `col` on the uncolored vertices in
/// `scope`, capped at `limit`. Independent components are counted apart.
fn count_rec(net: &Network, col: &[usize], dom: &[u64], scope: &[usize], limit: u64) -> u64 {
    let comps = components(net, col, scope);
    let mut total = 1u64;
    for comp in comps {
        let c = count_component(net, col, dom, &comp, limit);
        total = total.saturating_mul(c).min(limit);
        if total == 0 {
            return 0;
        }
    }
    total
}

fn components(net: &Network, col: &[usize], scope: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for &s in scope {
        if col[s] != usize::MAX || !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &u in net.neighbors(comp[i]) {
                if col[u] == usize::MAX && seen.insert(u) {
                    comp.push(u);
                }
            }
            i += 1;
        }
        out.push(comp);
    }
    out
}

fn count_component(net: &Network, col: &[usize], dom: &[u64], comp: &[usize], limit: u64) -> u64 {
    let v = *comp
        .iter()
        .min_by_key(|&&v| (usize::MAX - net.neighbors(v).len(), dom[v].count_ones()))
        .expect("non-empty component");
    let mut total = 0u64;
    let mut bits = dom[v];
    while bits != 0 && total < limit {
        let c = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let (mut col2, mut dom2, mut left) = (col.to_vec(), dom.to_vec(), comp.len());
        if assign(net, v, c, &mut col2, &mut dom2, &mut left) {
            let sub = if left == 0 { 1 } else { count_rec(net, &col2, &dom2, comp, limit - total) };
            total = total.saturating_add(sub).min(limit);
        }
    }
    total
}

fn count_capped(net: &Network, k: usize, limit: u64) -> u64 {
    assert!((1..64).contains(&k), "color count out of range");
    let n = net.n();
    let scope: Vec<usize> = (0..n).collect();
    count_rec(net, &vec![usize::MAX; n], &vec![(1u64 << k) - 1; n], &scope, limit)
}

/// Largest graph [`count_colorings`] accepts.
pub const MAX_COUNT_NODES: usize = 40;

/// Exact number of proper `k`-colorings (saturates at `u64::MAX`).
pub fn count_colorings(net: &Network, k: usize) -> Result<u64, InstanceError> {
    if net.n() > MAX_COUNT_NODES {
        return Err(InstanceError::Invalid(format!("{} nodes exceeds the counting limit {MAX_COUNT_NODES}", net.n())));
    }
    Ok(count_capped(net, k, u64::MAX))
}

pub fn is_colorable(net: &Network, k: usize) -> bool {
    count_capped(net, k, 1) > 0
}

/// Final Check query for `P_G`: the prover hands each node its claimed
/// `T_u`, children forward theirs to the parent, each node checks
/// `T_u = local(u) * prod T_child` and the root multiplies by `S`.
#[derive(Clone, Debug)]
pub struct ColoringQuery {
    pub oracle: Arc<ColoringOracle>,
    pub tree: SpanningTree,
}

impl DistributedQuery for ColoringQuery {
    fn rounds(&self) -> usize {
        2
    }

    fn query(&self, point: &[u64], env: &mut QueryEnv<'_>) -> u64 {
        let m = env.modulus;
        let n = self.oracle.nodes();
        let total = env.tx.n;
        let honest = self.oracle.subtree_products(&self.tree, point);
        let mut claimed: Vec<u64> = match env.mode {
            QueryMode::Honest => honest,
            QueryMode::Uniform => (0..n).map(|_| m.random(&mut *env.rng)).collect(),
        };
        for (u, c) in claimed.iter_mut().enumerate() {
            (env.tamper)(u, c);
        }
        let tag = |u: usize, copy: u32| Tag { owner: u as u32, copy, ..Tag::public(0) };
        let mut per: Vec<NodePayload> = (0..total).map(NodePayload::new).collect();
        for u in 0..n {
            per[u].push(Source::Prover, claimed[u], tag(u, 1));
        }
        env.tx.push_round(Direction::ProverToNodes, "query T", per);
        let mut per: Vec<NodePayload> = (0..total).map(NodePayload::new).collect();
        for v in 1..n {
            let p = self.tree.parent(v).expect("non-root");
            per[p].push(Source::Node(v), claimed[v], tag(v, 2));
        }
        env.tx.push_round(Direction::NodeToNeighbor, "query forward T", per);
        if env.mode == QueryMode::Honest {
            for u in 0..n {
                let kids = self.tree.children(u).iter().fold(1, |acc, &j| m.mul(acc, claimed[j]));
                if m.mul(self.oracle.local_factor(u, point), kids) != claimed[u] {
                    env.tx.accept[u] = false;
                }
            }
        }
        m.mul(claimed[0], self.oracle.eval_s(point))
    }
}

/// Distributed evaluation of `T` at `point`: returns the root value and the
/// per-node partial products, checking every node's consistency relation.
pub fn eval_t_distributed(
    oracle: &ColoringOracle,
    tree: &SpanningTree,
    point: &[u64],
    tamper: &mut dyn FnMut(usize, &mut u64),
) -> (u64, Vec<u64>, Vec<bool>) {
    let m = oracle.modulus;
    let mut t = oracle.subtree_products(tree, point);
    for (u, v) in t.iter_mut().enumerate() {
        tamper(u, v);
    }
    let ok = (0..oracle.n)
        .map(|u| {
            let kids = tree.children(u).iter().fold(1, |acc, &j| m.mul(acc, t[j]));
            m.mul(oracle.local_factor(u, point), kids) == t[u]
        })
        .collect();
    (t[0], t, ok)
}

/// Sumcheck instance for "G is not k-colorable" (claimed sum 0) with the
/// distributed `T_u` query as Final Check.
pub fn noncolor_instance(net: &Network, k: usize, modulus: PrimeModulus, t: usize) -> Result<SumcheckInstance, InstanceError> {
    let oracle = Arc::new(arithmetize(net, k, modulus)?);
    if oracle.num_vars() > MAX_COLOR_VARS {
        return Err(InstanceError::Invalid(format!(
            "k * n = {} exceeds the enumeration limit {MAX_COLOR_VARS}",
            oracle.num_vars()
        )));
    }
    if modulus.q() <= oracle.degree() as u64 {
        return Err(InstanceError::FieldTooSmall { q: modulus.q(), need: oracle.degree() as u64 });
    }
    let tree = build_tree(net)?;
    let query = Arc::new(ColoringQuery { oracle: oracle.clone(), tree });
    let inst = SumcheckInstance::hosted(net.clone(), oracle, 0, t)?.with_query(query);
    check_zk_instance(&inst)?;
    Ok(inst)
}

#[derive(Clone, Debug)]
pub struct NoncolorOutcome {
    pub q: u64,
    /// Verdict per physical node.
    pub accept: Vec<bool>,
    pub transcript: Transcript,
}

impl NoncolorOutcome {
    pub fn all_accept(&self) -> bool {
        self.accept.iter().all(|&a| a)
    }
}

/// Zero-knowledge proof that `net` has no proper `k`-coloring. The field is
/// drawn from the seed, then the protocol runs with `prover`.
pub fn noncolor_with(
    net: &Network,
    k: usize,
    t: usize,
    seed: u64,
    prover: &mut dyn SumcheckProver,
) -> Result<NoncolorOutcome, InstanceError> {
    let modulus = pick_field(net.n(), crate::seeds::derive_seed(seed, 100));
    let inst = noncolor_instance(net, k, modulus, t)?;
    let transcript = zk_sumcheck(&inst, prover, seed);
    Ok(NoncolorOutcome { q: modulus.q(), accept: inst.physical_accept(&transcript.accept), transcript })
}

pub fn noncolor_protocol(net: &Network, k: usize, t: usize, seed: u64) -> Result<NoncolorOutcome, InstanceError> {
    noncolor_with(net, k, t, seed, &mut crate::sumcheck::HonestProver)
}

/// A CNF formula; literals are non-zero integers, `-v` negates variable `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn parse_dimacs(text: &str) -> Result<Self, InstanceError> {
        let mut vars = None;
        let mut want = 0usize;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                if f.len() != 3 || f[0] != "cnf" {
                    return Err(InstanceError::Invalid(format!("bad header: {line}")));
                }
                vars = Some(f[1].parse().map_err(|_| InstanceError::Invalid("bad variable count".into()))?);
                want = f[2].parse().map_err(|_| InstanceError::Invalid("bad clause count".into()))?;
                continue;
            }
            let nv = vars.ok_or_else(|| InstanceError::Invalid("clause before header".into()))?;
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| InstanceError::Invalid(format!("bad literal {tok}")))?;
                if l == 0 {
                    clauses.push(std::mem::take(&mut cur));
                } else if l.unsigned_abs() as usize > nv {
                    return Err(InstanceError::Invalid(format!("literal {l} out of range")));
                } else {
                    cur.push(l);
                }
            }
        }
        if !cur.is_empty() {
            clauses.push(cur);
        }
        let vars = vars.ok_or_else(|| InstanceError::Invalid("missing header".into()))?;
        if clauses.len() != want {
            return Err(InstanceError::Invalid(format!("header says {want} clauses, found {}", clauses.len())));
        }
        let cnf = Cnf { vars, clauses };
        cnf.check_3cnf()?;
        Ok(cnf)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&format!("{l} "));
            }
            s.push_str("0\n");
        }
        s
    }

    fn check_3cnf(&self) -> Result<(), InstanceError> {
        for c in &self.clauses {
            if c.is_empty() || c.len() > 3 {
                return Err(InstanceError::Invalid(format!("clause {c:?} is not a 1..3 literal clause")));
            }
        }
        Ok(())
    }

    /// Exhaustive satisfiability check.
    pub fn satisfiable(&self) -> bool {
        assert!(self.vars <= 24, "too many variables to enumerate");
        (0u64..1 << self.vars).any(|a| {
            self.clauses.iter().all(|c| {
                c.iter().any(|&l| {
                    let bit = (a >> (l.unsigned_abs() - 1)) & 1 == 1;
                    bit == (l > 0)
                })
            })
        })
    }

    pub fn random<R: Rng + ?Sized>(vars: usize, clauses: usize, rng: &mut R) -> Self {
        let clauses = (0..clauses)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let v = rng.gen_range(1..=vars as i32);
                        if rng.gen() {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        Cnf { vars, clauses }
    }
}

/// Max degree of graphs built by [`sat_to_3col`]: hub copies carry two
/// original edges plus three equal-color gadgets (2 + 2 + 4).
pub const SAT_MAX_DEGREE: usize = 8;

/// Nodes with more than this many edges are split into a tree of copies.
const HUB_THRESHOLD: usize = 6;

/// Reduction from 3-SAT to 3-coloring. Node layout: `T = 0`, `F = 1`,
/// `B = 2`; variable `i` (0-based) has literal nodes `3 + 2i` (positive) and
/// `4 + 2i` (negative); each clause adds six gadget nodes; hub copies and
/// their equal-color gadgets come last. Short clauses are padded by
/// repeating their last literal.
pub fn sat_to_3col(cnf: &Cnf) -> Result<Network, InstanceError> {
    cnf.check_3cnf()?;
    let lit = |l: i32| -> usize {
        let v = l.unsigned_abs() as usize - 1;
        if l > 0 {
            3 + 2 * v
        } else {
            4 + 2 * v
        }
    };
    let (t, f, b) = (0usize, 1usize, 2usize);
    let mut edges = vec![(t, f), (f, b), (t, b)];
    for v in 0..cnf.vars {
        let (p, q) = (3 + 2 * v, 4 + 2 * v);
        edges.extend([(p, q), (p, b), (q, b)]);
    }
    let mut next = 3 + 2 * cnf.vars;
    for c in &cnf.clauses {
        for &l in c {
            if l.unsigned_abs() as usize > cnf.vars || l == 0 {
                return Err(InstanceError::Invalid(format!("literal {l} out of range")));
            }
        }
        let mut ls: Vec<usize> = c.iter().map(|&l| lit(l)).collect();
        while ls.len() < 3 {
            ls.push(*ls.last().expect("non-empty clause"));
        }
        let u: Vec<usize> = (next..next + 6).collect();
        next += 6;
        edges.extend([
            (ls[0], u[0]),
            (ls[1], u[1]),
            (u[0], u[1]),
            (u[0], u[2]),
            (u[1], u[2]),
            (u[2], u[3]),
            (ls[2], u[4]),
            (u[3], u[4]),
            (u[3], u[5]),
            (u[4], u[5]),
            (u[5], f),
            (u[5], b),
        ]);
    }
    let logical = next;
    let mut deg = vec![0usize; logical];
    for &(x, y) in &edges {
        deg[x] += 1;
        deg[y] += 1;
    }
    // copies[v] lists the nodes standing in for v; copy 0 keeps v's ID
    let mut copies: Vec<Vec<usize>> = (0..logical).map(|v| vec![v]).collect();
    let mut extra = Vec::new();
    for v in 0..logical {
        if deg[v] <= HUB_THRESHOLD {
            continue;
        }
        let need = deg[v].div_ceil(2);
        for i in 1..need {
            let c = next;
            next += 1;
            copies[v].push(c);
            let parent = copies[v][(i - 1) / 2];
            let (a, bb) = (next, next + 1);
            next += 2;
            extra.extend([(a, bb), (a, parent), (bb, parent), (a, c), (bb, c)]);
        }
    }
    let mut used = vec![0usize; logical];
    let slot = |v: usize, used: &mut Vec<usize>| -> usize {
        let c = if deg[v] <= HUB_THRESHOLD { copies[v][0] } else { copies[v][used[v] / 2] };
        used[v] += 1;
        c
    };
    let mut out: Vec<(usize, usize)> = edges.iter().map(|&(x, y)| (slot(x, &mut used), slot(y, &mut used))).collect();
    out.extend(extra);
    Ok(Network::new(next, &out)?)
}
