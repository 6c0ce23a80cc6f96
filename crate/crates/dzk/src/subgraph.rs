//! Subgraph counting: the adjacency multilinear extension `Ã`, the pattern
//! polynomial `f` whose cube sum is `|Aut(H)| * #copies of H`, and the
//! distributed evaluation of `Ã` used as Final Check.
//!
//! A point of `f` is `k` blocks of `b = ceil(log2 n)` coordinates, block `i`
//! standing for pattern vertex `i` (big-endian ID bits).

use std::sync::Arc;

use crate::algebra::{chi, id_bits, next_prime_above, BoolTable, Oracle, PrimeModulus};
use crate::error::InstanceError;
use crate::netsim::{build_tree, parse_edge_list, Direction, Network, NodePayload, Source, SpanningTree, Tag, Transcript};
use crate::sumcheck::{DistributedQuery, QueryEnv, QueryMode, SumcheckInstance, SumcheckProver};
use crate::zk::{check_zk_instance, zk_sumcheck};

/// Largest pattern [`count_aut`] enumerates.
pub const MAX_PATTERN_NODES: usize = 8;

/// Largest `k * ceil(log2 n)` the honest prover enumerates.
pub const MAX_PATTERN_VARS: usize = 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
    induced: bool,
    aut: u64,
}

impl PatternGraph {
    pub fn new(k: usize, edges: &[(usize, usize)], induced: bool) -> Result<Self, InstanceError> {
        if k == 0 || k > MAX_PATTERN_NODES {
            return Err(InstanceError::Invalid(format!("pattern size {k} outside 1..={MAX_PATTERN_NODES}")));
        }
        let g = Network::new(k, edges)?;
        let edges = g.edges().to_vec();
        let aut = count_aut_edges(k, &edges);
        Ok(Self { k, edges, induced, aut })
    }

    pub fn clique(k: usize) -> Self {
        let g = Network::complete(k);
        Self::new(k, g.edges(), false).expect("clique pattern")
    }

    /// Graph text format plus an `induced 0|1` line.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let (n, m, edges, flag) = parse_edge_list(text, true)?;
        if edges.len() != m {
            return Err(InstanceError::Invalid(format!("expected {m} edges, found {}", edges.len())));
        }
        Self::new(n, &edges, flag.unwrap_or(false))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\ninduced {}\n", self.k, self.edges.len(), self.induced as u8);
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn induced(&self) -> bool {
        self.induced
    }

    pub fn aut(&self) -> u64 {
        self.aut
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i.min(j), i.max(j))).is_ok()
    }

    /// Vertex pairs whose adjacency the pattern polynomial queries: pattern
    /// edges, then (induced patterns only) non-edges.
    pub fn queried_pairs(&self) -> Vec<(usize, usize, bool)> {
        let mut out: Vec<(usize, usize, bool)> = self.edges.iter().map(|&(i, j)| (i, j, true)).collect();
        if self.induced {
            for i in 0..self.k {
                for j in i + 1..self.k {
                    if !self.has_edge(i, j) {
                        out.push((i, j, false));
                    }
                }
            }
        }
        out
    }
}

fn count_aut_edges(k: usize, edges: &[(usize, usize)]) -> u64 {
    let mut adj = vec![vec![false; k]; k];
    for &(u, v) in edges {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    fn rec(adj: &[Vec<bool>], perm: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
        let i = perm.len();
        let k = adj.len();
        if i == k {
            return 1;
        }
        let mut total = 0;
        for c in 0..k {
            if used[c] {
                continue;
            }
            if (0..i).any(|j| adj[i][j] != adj[c][perm[j]]) {
                continue;
            }
            used[c] = true;
            perm.push(c);
            total += rec(adj, perm, used);
            perm.pop();
            used[c] = false;
        }
        total
    }
    rec(&adj, &mut Vec::new(), &mut vec![false; k])
}

/// `|Aut(H)|` by permutation enumeration.
pub fn count_aut(h: &PatternGraph) -> u64 {
    count_aut_edges(h.k, &h.edges)
}

/// Copies of `h` in `net` (induced copies when `h` is induced), by
/// enumerating injective vertex maps.
pub fn count_copies(net: &Network, h: &PatternGraph) -> u64 {
    let n = net.n();
    let k = h.k;
    fn rec(net: &Network, h: &PatternGraph, map: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
        let i = map.len();
        if i == h.k {
            return 1;
        }
        let mut total = 0;
        for v in 0..net.n() {
            if used[v] {
                continue;
            }
            let fits = (0..i).all(|j| {
                let e = h.has_edge(i, j);
                let g = net.has_edge(v, map[j]);
                if h.induced {
                    e == g
                } else {
                    !e || g
                }
            });
            if !fits {
                continue;
            }
            used[v] = true;
            map.push(v);
            total += rec(net, h, map, used);
            map.pop();
            used[v] = false;
        }
        total
    }
    if k > n {
        return 0;
    }
    rec(net, h, &mut Vec::new(), &mut vec![false; n]) / h.aut
}

/// Adjacency table of `net` over `ceil(log2 n)`-bit IDs, both orientations.
pub fn adjacency_table(net: &Network) -> BoolTable {
    let bits = id_bits(net.n());
    let mut entries = Vec::with_capacity(2 * net.edges().len());
    for &(u, v) in net.edges() {
        entries.push((u as u64, v as u64));
        entries.push((v as u64, u as u64));
    }
    BoolTable::new(bits, entries).expect("ids fit")
}

/// `eq(x, y) = prod_j (x_j y_j + (1 - x_j)(1 - y_j))`.
pub fn eq_poly(m: PrimeModulus, x: &[u64], y: &[u64]) -> u64 {
    x.iter().zip(y).fold(1, |acc, (&a, &b)| {
        let same = m.add(m.mul(a, b), m.mul(m.sub(1, a), m.sub(1, b)));
        m.mul(acc, same)
    })
}

/// Multilinear extension of "is a real node ID" (`< n`).
pub fn valid_id(m: PrimeModulus, n: usize, x: &[u64]) -> u64 {
    m.sum((0..n as u64).map(|u| chi(m, u, x)))
}

/// Node `v`'s share of `Ã(x, y)`: the terms of its own outgoing edges.
pub fn local_mle(m: PrimeModulus, net: &Network, v: usize, x: &[u64], y: &[u64]) -> u64 {
    let cx = chi(m, v as u64, x);
    if cx == 0 {
        return 0;
    }
    let s = m.sum(net.neighbors(v).iter().map(|&w| chi(m, w as u64, y)));
    m.mul(cx, s)
}

/// Subtree sums of [`local_mle`] over `tree`.
pub fn subtree_mle(m: PrimeModulus, net: &Network, tree: &SpanningTree, x: &[u64], y: &[u64]) -> Vec<u64> {
    let mut s: Vec<u64> = (0..net.n()).map(|v| local_mle(m, net, v, x, y)).collect();
    for v in tree.bottom_up() {
        if let Some(p) = tree.parent(v) {
            s[p] = m.add(s[p], s[v]);
        }
    }
    s
}

/// Distributed `Ã(x, y)`: the prover hands out subtree partials (through
/// `tamper`), every node checks its own against its local terms plus its
/// children's. Returns the root value, the partials and each node's check.
pub fn eval_mle_distributed(
    m: PrimeModulus,
    net: &Network,
    tree: &SpanningTree,
    x: &[u64],
    y: &[u64],
    tamper: &mut dyn FnMut(usize, &mut u64),
) -> (u64, Vec<u64>, Vec<bool>) {
    let mut s = subtree_mle(m, net, tree, x, y);
    for (v, val) in s.iter_mut().enumerate() {
        tamper(v, val);
    }
    let ok = (0..net.n())
        .map(|v| {
            let kids = m.sum(tree.children(v).iter().map(|&j| s[j]));
            m.add(local_mle(m, net, v, x, y), kids) == s[v]
        })
        .collect();
    (s[0], s, ok)
}

/// `f` for pattern `h` on `net`.
#[derive(Clone, Debug)]
pub struct PatternOracle {
    pub net: Network,
    pub pattern: PatternGraph,
    modulus: PrimeModulus,
    table: BoolTable,
    bits: usize,
    degree: usize,
}

impl PatternOracle {
    pub fn new(net: &Network, pattern: &PatternGraph, modulus: PrimeModulus) -> Self {
        let bits = id_bits(net.n());
        let k = pattern.k;
        // per-vertex factor count bounds the individual degree
        let mut deg = vec![0usize; k];
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    deg[i] += if pattern.has_edge(i, j) { 1 } else if pattern.induced { 2 } else { 1 };
                }
            }
            if pattern.edges.iter().all(|&(a, b)| a != i && b != i) {
                deg[i] += 1;
            }
        }
        Self {
            net: net.clone(),
            pattern: pattern.clone(),
            modulus,
            table: adjacency_table(net),
            bits,
            degree: deg.into_iter().max().unwrap_or(0).max(1),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    fn block<'a>(&self, point: &'a [u64], i: usize) -> &'a [u64] {
        &point[i * self.bits..(i + 1) * self.bits]
    }

    /// Combines queried adjacency values (in [`PatternGraph::queried_pairs`]
    /// order) with the factors the root computes itself.
    pub fn combine(&self, point: &[u64], adj: &[u64]) -> u64 {
        let m = self.modulus;
        let h = &self.pattern;
        let mut acc = 1;
        for (&(_, _, edge), &a) in h.queried_pairs().iter().zip(adj) {
            acc = m.mul(acc, if edge { a } else { m.sub(1, a) });
        }
        for i in 0..h.k {
            for j in i + 1..h.k {
                if !h.has_edge(i, j) {
                    acc = m.mul(acc, m.sub(1, eq_poly(m, self.block(point, i), self.block(point, j))));
                }
            }
            if h.edges.iter().all(|&(a, b)| a != i && b != i) {
                acc = m.mul(acc, valid_id(m, self.net.n(), self.block(point, i)));
            }
        }
        acc
    }

    fn adjacency(&self, point: &[u64], i: usize, j: usize) -> u64 {
        let m = self.modulus;
        let (x, y) = (self.block(point, i), self.block(point, j));
        m.sum(self.table.entries.iter().map(|&(z, w)| m.mul(chi(m, z, x), chi(m, w, y))))
    }
}

impl Oracle for PatternOracle {
    fn num_vars(&self) -> usize {
        self.pattern.k * self.bits
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn modulus(&self) -> PrimeModulus {
        self.modulus
    }
    fn eval(&self, point: &[u64]) -> u64 {
        assert_eq!(point.len(), self.num_vars(), "oracle arity");
        let adj: Vec<u64> =
            self.pattern.queried_pairs().iter().map(|&(i, j, _)| self.adjacency(point, i, j)).collect();
        self.combine(point, &adj)
    }
}

/// Builds `f`: one `Ã(v_i, v_j)` per pattern edge, and for non-adjacent
/// pattern pairs `1 - eq` (distinct images) times `1 - Ã` when induced.
/// Pattern vertices without edges get a validity factor.
pub fn build_pattern_poly(net: &Network, h: &PatternGraph, modulus: PrimeModulus) -> PatternOracle {
    PatternOracle::new(net, h, modulus)
}

/// Smallest prime above `2 n^k`.
pub fn default_field(n: usize, k: usize) -> Result<PrimeModulus, InstanceError> {
    let bound = (n as u64).checked_pow(k as u32).and_then(|v| v.checked_mul(2));
    let bound = bound.ok_or_else(|| InstanceError::Invalid("2 n^k overflows".into()))?;
    Ok(next_prime_above(bound)?)
}

/// Final Check for `f`: one two-round distributed `Ã` evaluation per queried
/// pair, issued one after another.
#[derive(Clone, Debug)]
pub struct PatternQuery {
    pub oracle: Arc<PatternOracle>,
    pub tree: SpanningTree,
}

impl DistributedQuery for PatternQuery {
    fn rounds(&self) -> usize {
        2 * self.oracle.pattern.queried_pairs().len()
    }

    fn query(&self, point: &[u64], env: &mut QueryEnv<'_>) -> u64 {
        let o = &self.oracle;
        let m = env.modulus;
        let n = o.net.n();
        let total = env.tx.n;
        let mut adj = Vec::new();
        for (qi, &(i, j, _)) in o.pattern.queried_pairs().iter().enumerate() {
            let (x, y) = (o.block(point, i), o.block(point, j));
            let mut s = match env.mode {
                QueryMode::Honest => subtree_mle(m, &o.net, &self.tree, x, y),
                QueryMode::Uniform => (0..n).map(|_| m.random(&mut *env.rng)).collect(),
            };
            for (v, val) in s.iter_mut().enumerate() {
                (env.tamper)(v, val);
            }
            let copy = 1 + 2 * qi as u32;
            let tag = |v: usize, c: u32| Tag { owner: v as u32, copy: c, ..Tag::public(0) };
            let mut per: Vec<NodePayload> = (0..total).map(NodePayload::new).collect();
            for v in 0..n {
                per[v].push(Source::Prover, s[v], tag(v, copy));
            }
            env.tx.push_round(Direction::ProverToNodes, format!("query A~ pair {qi}"), per);
            let mut per: Vec<NodePayload> = (0..total).map(NodePayload::new).collect();
            for v in 1..n {
                let p = self.tree.parent(v).expect("non-root");
                per[p].push(Source::Node(v), s[v], tag(v, copy + 1));
            }
            env.tx.push_round(Direction::NodeToNeighbor, format!("query forward A~ pair {qi}"), per);
            if env.mode == QueryMode::Honest {
                for v in 0..n {
                    let kids = m.sum(self.tree.children(v).iter().map(|&c| s[c]));
                    if m.add(local_mle(m, &o.net, v, x, y), kids) != s[v] {
                        env.tx.accept[v] = false;
                    }
                }
            }
            adj.push(s[0]);
        }
        o.combine(point, &adj)
    }
}

/// Sumcheck instance for "`net` contains exactly `delta` copies of `h`".
pub fn subgraph_instance(
    net: &Network,
    h: &PatternGraph,
    delta: u64,
    modulus: PrimeModulus,
    t: usize,
) -> Result<SumcheckInstance, InstanceError> {
    let oracle = Arc::new(build_pattern_poly(net, h, modulus));
    if oracle.num_vars() > MAX_PATTERN_VARS {
        return Err(InstanceError::Invalid(format!(
            "k * ceil(log2 n) = {} exceeds the enumeration limit {MAX_PATTERN_VARS}",
            oracle.num_vars()
        )));
    }
    if modulus.q() <= oracle.degree() as u64 {
        return Err(InstanceError::FieldTooSmall { q: modulus.q(), need: oracle.degree() as u64 });
    }
    let a = modulus.mul(modulus.reduce(h.aut()), modulus.reduce(delta));
    let tree = build_tree(net)?;
    let query = Arc::new(PatternQuery { oracle: oracle.clone(), tree });
    let inst = SumcheckInstance::hosted(net.clone(), oracle, a, t)?.with_query(query);
    check_zk_instance(&inst)?;
    Ok(inst)
}

#[derive(Clone, Debug)]
pub struct SubgraphOutcome {
    pub q: u64,
    pub accept: Vec<bool>,
    pub transcript: Transcript,
}

impl SubgraphOutcome {
    pub fn all_accept(&self) -> bool {
        self.accept.iter().all(|&a| a)
    }
}

pub fn subgraph_with(
    net: &Network,
    h: &PatternGraph,
    delta: u64,
    t: usize,
    seed: u64,
    modulus: Option<PrimeModulus>,
    prover: &mut dyn SumcheckProver,
) -> Result<SubgraphOutcome, InstanceError> {
    let modulus = match modulus {
        Some(m) => m,
        None => default_field(net.n(), h.k())?,
    };
    let inst = subgraph_instance(net, h, delta, modulus, t)?;
    let transcript = zk_sumcheck(&inst, prover, seed);
    Ok(SubgraphOutcome { q: modulus.q(), accept: inst.physical_accept(&transcript.accept), transcript })
}

/// Zero-knowledge proof that `net` has `delta` copies of `h`, honest prover,
/// default field.
pub fn subgraph_protocol(
    net: &Network,
    h: &PatternGraph,
    delta: u64,
    t: usize,
    seed: u64,
) -> Result<SubgraphOutcome, InstanceError> {
    subgraph_with(net, h, delta, t, seed, None, &mut crate::sumcheck::HonestProver)
}
