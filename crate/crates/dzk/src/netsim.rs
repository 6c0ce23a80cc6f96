//! Synchronous network simulation: graphs, the BFS spanning tree rooted at
//! node 0, random tree 2-colorings, round-by-round transcripts and the
//! per-node views extracted from them.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::PrimeModulus;
use crate::error::NetError;

/// Undirected simple graph on IDs `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    /// Builds a graph, normalizing each edge to `(min, max)`. Connectivity is
    /// not required here; see [`Network::connected`].
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, NetError> {
        if n == 0 {
            return Err(NetError::Empty);
        }
        let mut es: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(NetError::BadEdge(u, v));
            }
            es.push((u.min(v), u.max(v)));
        }
        es.sort_unstable();
        let before = es.len();
        es.dedup();
        if es.len() != before {
            let dup = es.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]).unwrap_or((0, 0));
            return Err(NetError::BadEdge(dup.0, dup.1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &es {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self { n, edges: es, adj })
    }

    /// Like [`Network::new`] but rejects disconnected graphs.
    pub fn connected(n: usize, edges: &[(usize, usize)]) -> Result<Self, NetError> {
        let g = Self::new(n, edges)?;
        if !g.is_connected() {
            return Err(NetError::Disconnected);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    pub fn complete(n: usize) -> Self {
        let mut es = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                es.push((u, v));
            }
        }
        Self::new(n, &es).expect("complete graph")
    }

    pub fn path(n: usize) -> Self {
        let es: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::new(n, &es).expect("path graph")
    }

    pub fn cycle(n: usize) -> Self {
        let mut es: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            es.push((0, n - 1));
        }
        Self::new(n, &es).expect("cycle graph")
    }

    pub fn star(n: usize) -> Self {
        let es: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Self::new(n, &es).expect("star graph")
    }

    /// Parses `"n m"` followed by `m` lines `"u v"` with `u < v`.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, NetError> {
        let (n, m, edges, _) = parse_edge_list(text, false)?;
        if edges.len() != m {
            return Err(NetError::Parse { line: 0, msg: format!("expected {m} edges, found {}", edges.len()) });
        }
        Self::connected(n, &edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

/// Shared edge-list reader. With `header_flag`, accepts one `induced 0|1` line
/// anywhere before the edges and returns its value.
pub(crate) fn parse_edge_list(
    text: &str,
    header_flag: bool,
) -> Result<(usize, usize, Vec<(usize, usize)>, Option<bool>), NetError> {
    let mut header: Option<(usize, usize)> = None;
    let mut flag = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| NetError::Parse { line: i + 1, msg: msg.to_string() };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if header_flag && toks.first() == Some(&"induced") {
            if toks.len() != 2 {
                return Err(err("expected `induced 0|1`"));
            }
            flag = Some(match toks[1] {
                "0" => false,
                "1" => true,
                _ => return Err(err("induced flag must be 0 or 1")),
            });
            continue;
        }
        if toks.len() != 2 {
            return Err(err("expected two integers"));
        }
        let a: usize = toks[0].parse().map_err(|_| err("not an integer"))?;
        let b: usize = toks[1].parse().map_err(|_| err("not an integer"))?;
        match header {
            None => header = Some((a, b)),
            Some((n, _)) => {
                if a >= b || b >= n {
                    return Err(err("edge must satisfy 0 <= u < v < n"));
                }
                edges.push((a, b));
            }
        }
    }
    let (n, m) = header.ok_or(NetError::Parse { line: 0, msg: "missing header".into() })?;
    if header_flag && flag.is_none() {
        return Err(NetError::Parse { line: 0, msg: "missing `induced 0|1` line".into() });
    }
    Ok((n, m, edges, flag))
}

/// BFS tree rooted at node 0; children lists sorted by ID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    order: Vec<usize>,
}

impl SpanningTree {
    /// Builds a tree from an explicit parent map (root 0 maps to itself).
    pub fn from_parents(net: &Network, parent: Vec<usize>) -> Result<Self, NetError> {
        let n = net.n();
        if parent.len() != n || parent[0] != 0 {
            return Err(NetError::Parse { line: 0, msg: "parent map must cover all nodes with root 0".into() });
        }
        let mut children = vec![Vec::new(); n];
        for v in 1..n {
            let p = parent[v];
            if p >= n || !net.has_edge(v, p) {
                return Err(NetError::BadEdge(v, p));
            }
            children[p].push(v);
        }
        for c in &mut children {
            c.sort_unstable();
        }
        let mut depth = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut q = VecDeque::from([0usize]);
        depth[0] = 0;
        while let Some(u) = q.pop_front() {
            order.push(u);
            for &c in &children[u] {
                depth[c] = depth[u] + 1;
                q.push_back(c);
            }
        }
        if order.len() != n {
            return Err(NetError::Disconnected);
        }
        Ok(Self { parent, children, depth, order })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        if v == 0 {
            None
        } else {
            Some(self.parent[v])
        }
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Root first, then by depth.
    pub fn bfs_order(&self) -> &[usize] {
        &self.order
    }

    /// Leaves first, root last.
    pub fn bottom_up(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().rev().copied()
    }

    /// The only child, when there is exactly one.
    pub fn unique_child(&self, v: usize) -> Option<usize> {
        match self.children[v].as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }

    /// Next sibling in ID order, wrapping from the last child to the first.
    /// `None` unless the parent has at least two children.
    pub fn next_sibling(&self, v: usize) -> Option<usize> {
        let p = self.parent(v)?;
        let sib = &self.children[p];
        if sib.len() < 2 {
            return None;
        }
        let i = sib.iter().position(|&c| c == v).expect("child of its parent");
        Some(sib[(i + 1) % sib.len()])
    }

    /// The sibling whose [`next_sibling`](Self::next_sibling) is `v`.
    pub fn prev_sibling(&self, v: usize) -> Option<usize> {
        let p = self.parent(v)?;
        let sib = &self.children[p];
        if sib.len() < 2 {
            return None;
        }
        let i = sib.iter().position(|&c| c == v).expect("child of its parent");
        Some(sib[(i + sib.len() - 1) % sib.len()])
    }

    /// Nodes of the subtree rooted at `v`, `v` first.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out
    }
}

/// BFS from node 0, neighbors scanned in increasing ID.
pub fn build_tree(net: &Network) -> Result<SpanningTree, NetError> {
    let n = net.n();
    let mut parent = vec![usize::MAX; n];
    parent[0] = 0;
    let mut q = VecDeque::from([0usize]);
    while let Some(u) = q.pop_front() {
        for &v in net.neighbors(u) {
            if parent[v] == usize::MAX {
                parent[v] = u;
                q.push_back(v);
            }
        }
    }
    if parent.contains(&usize::MAX) {
        return Err(NetError::Disconnected);
    }
    SpanningTree::from_parents(net, parent)
}

/// Proper 2-coloring of the tree with colors 1 and 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeColoring {
    pub c: Vec<u8>,
}

impl TreeColoring {
    pub fn from_root(tree: &SpanningTree, root_color: u8) -> Self {
        assert!(root_color == 1 || root_color == 2);
        let c = (0..tree.n())
            .map(|v| if tree.depth(v).is_multiple_of(2) { root_color } else { 3 - root_color })
            .collect();
        Self { c }
    }

    pub fn color(&self, v: usize) -> u64 {
        self.c[v] as u64
    }
}

/// Root color uniform in {1,2}; the rest alternates down the tree.
pub fn color_tree(tree: &SpanningTree, seed: u64) -> TreeColoring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    color_tree_with(tree, &mut rng)
}

pub fn color_tree_with<R: Rng + ?Sized>(tree: &SpanningTree, rng: &mut R) -> TreeColoring {
    TreeColoring::from_root(tree, if rng.gen::<bool>() { 1 } else { 2 })
}

/// Random connected graph: random recursive tree plus each remaining pair
/// with probability `p`.
pub fn random_connected<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Network {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut es = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        es.push((perm[i].min(perm[j]), perm[i].max(perm[j])));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !es.contains(&(u, v)) && rng.gen_bool(p) {
                es.push((u, v));
            }
        }
    }
    Network::connected(n, &es).expect("tree plus extras is connected")
}

/// Uniform random graph `G(n, p)` (possibly disconnected).
pub fn random_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Network {
    let mut es = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                es.push((u, v));
            }
        }
    }
    Network::new(n, &es).expect("simple graph")
}

/// Who a block of received values came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    Prover,
    Node(usize),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Prover => write!(f, "prover"),
            Source::Node(v) => write!(f, "node:{v}"),
        }
    }
}

impl Serialize for Source {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Source {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "prover" {
            return Ok(Source::Prover);
        }
        s.strip_prefix("node:")
            .and_then(|v| v.parse().ok())
            .map(Source::Node)
            .ok_or_else(|| serde::de::Error::custom(format!("bad source {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ProverToNodes,
    NodesToProver,
    NodeToNeighbor,
}

/// What a transported element is; used for structural checks on views.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tag {
    pub kind: TagKind,
    /// Protocol stage the value belongs to (1-based round index, 0 = setup).
    pub stage: u32,
    /// Node the underlying value belongs to.
    pub owner: u32,
    pub value: ValueKind,
    pub copy: u32,
    /// Evaluation point (1 or 2), 0 for values that are not shares.
    pub point: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TagKind {
    /// Share of the encryption `P[v]`.
    Enc,
    /// Share of a mask polynomial `N_h[v]` or `M`.
    Mask,
    /// Share of a masked sum `P[v] + N_h[v]`.
    Masked,
    /// Public randomness, colors, indices, raw coefficients, oracle values.
    Public,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueKind {
    Alpha,
    Beta,
    BetaTilde,
    RootSum,
    /// A field challenge `r_i`.
    Challenge,
    /// A kept copy index; `copy` is its position in the kept list.
    Kept,
    /// The carried copy selected for the current stage.
    Selected,
    Other,
}

impl Tag {
    pub fn public(stage: u32) -> Tag {
        Tag { kind: TagKind::Public, stage, owner: 0, value: ValueKind::Other, copy: 0, point: 0 }
    }
}

/// One contiguous block of a node's payload.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub source: Source,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodePayload {
    pub id: usize,
    pub values: Vec<u64>,
    pub bits: u64,
    #[serde(skip)]
    pub segments: Vec<Segment>,
    #[serde(skip)]
    pub tags: Vec<Tag>,
}

impl NodePayload {
    pub fn new(id: usize) -> Self {
        Self { id, values: Vec::new(), bits: 0, segments: Vec::new(), tags: Vec::new() }
    }

    pub fn push(&mut self, source: Source, v: u64, tag: Tag) {
        match self.segments.last_mut() {
            Some(s) if s.source == source => s.len += 1,
            _ => self.segments.push(Segment { source, len: 1 }),
        }
        self.values.push(v);
        self.tags.push(tag);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub dir: Direction,
    pub label: String,
    pub per_node: Vec<NodePayload>,
}

/// Verifier randomness announced during a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Challenges {
    /// Field challenges `r_1, r_2, ...`.
    pub r: Vec<u64>,
    /// Per stage: kept copy indices, the one used now first (0-based).
    pub kept: Vec<Vec<u64>>,
    /// Per stage: the selected carried copy (0-based), where applicable.
    pub selected: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub q: u64,
    pub n: usize,
    pub rounds: Vec<RoundRecord>,
    pub challenges: Challenges,
    pub accept: Vec<bool>,
}

impl Transcript {
    pub fn new(m: PrimeModulus, n: usize) -> Self {
        Self { q: m.q(), n, rounds: Vec::new(), challenges: Challenges::default(), accept: vec![true; n] }
    }

    pub fn elem_bits(&self) -> u64 {
        PrimeModulus::new(self.q).map(|m| m.bits()).unwrap_or(64)
    }

    /// Appends a round; payload bit counts are filled in here.
    pub fn push_round(&mut self, dir: Direction, label: impl Into<String>, mut per_node: Vec<NodePayload>) {
        let w = self.elem_bits();
        for p in &mut per_node {
            p.bits = p.values.len() as u64 * w;
        }
        self.rounds.push(RoundRecord { dir, label: label.into(), per_node });
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn max_bits_per_node_round(&self) -> u64 {
        self.rounds.iter().flat_map(|r| r.per_node.iter().map(|p| p.bits)).max().unwrap_or(0)
    }

    pub fn all_accept(&self) -> bool {
        self.accept.iter().all(|&a| a)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("transcript serializes")
    }
}

/// Everything one node received, in arrival order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeView {
    pub id: usize,
    pub rounds: Vec<ViewEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewEntry {
    pub round: usize,
    pub source: Source,
    pub values: Vec<u64>,
    #[serde(skip)]
    pub tags: Vec<Tag>,
}

impl NodeView {
    pub fn flat(&self) -> Vec<u64> {
        self.rounds.iter().flat_map(|e| e.values.iter().copied()).collect()
    }

    pub fn flat_tags(&self) -> Vec<Tag> {
        self.rounds.iter().flat_map(|e| e.tags.iter().copied()).collect()
    }

    pub fn len(&self) -> usize {
        self.rounds.iter().map(|e| e.values.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Element count per entry; equal shapes are a precondition for
    /// slot-wise comparisons.
    pub fn shape(&self) -> Vec<(usize, Source, usize)> {
        self.rounds.iter().map(|e| (e.round, e.source, e.values.len())).collect()
    }
}

/// The view of `node`: every value it received from the prover or from a
/// neighbor. Messages the node sends are not part of it.
pub fn extract_view(t: &Transcript, node: usize) -> NodeView {
    let mut rounds = Vec::new();
    for (ri, r) in t.rounds.iter().enumerate() {
        if r.dir == Direction::NodesToProver {
            continue;
        }
        if let Some(p) = r.per_node.iter().find(|p| p.id == node) {
            let mut off = 0;
            for s in &p.segments {
                rounds.push(ViewEntry {
                    round: ri,
                    source: s.source,
                    values: p.values[off..off + s.len].to_vec(),
                    tags: p.tags.get(off..off + s.len).map(<[Tag]>::to_vec).unwrap_or_default(),
                });
                off += s.len;
            }
        }
    }
    NodeView { id: node, rounds }
}

pub fn extract_views(t: &Transcript) -> Vec<NodeView> {
    (0..t.n).map(|v| extract_view(t, v)).collect()
}

/// A protocol that can be executed against a prover.
pub trait Protocol {
    type Prover: ?Sized;
    /// Runs once; returns the transcript with its accept bits filled in.
    fn execute(&self, prover: &mut Self::Prover, seed: u64) -> Transcript;
    /// Bit budget for what one node receives from the prover in one round.
    fn bit_bound(&self) -> Option<u64> {
        None
    }
    /// Bit budget for one message across one edge in a neighbor round.
    fn edge_bound(&self) -> Option<u64> {
        None
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub accept: Vec<bool>,
    pub transcript: Transcript,
    pub views: Vec<NodeView>,
}

impl RunOutcome {
    pub fn all_accept(&self) -> bool {
        self.accept.iter().all(|&a| a)
    }
}

/// Panics if a prover round or a single neighbor message exceeds its budget.
pub fn check_budget(t: &Transcript, prover: Option<u64>, edge: Option<u64>) {
    let w = t.elem_bits();
    for r in &t.rounds {
        for p in &r.per_node {
            match r.dir {
                Direction::ProverToNodes => {
                    if let Some(b) = prover {
                        assert!(p.bits <= b, "round {} node {} got {} bits > bound {}", r.label, p.id, p.bits, b);
                    }
                }
                Direction::NodeToNeighbor => {
                    if let Some(b) = edge {
                        for s in &p.segments {
                            let bits = s.len as u64 * w;
                            assert!(bits <= b, "round {} edge {}->{} carried {} bits > bound {}", r.label, s.source, p.id, bits, b);
                        }
                    }
                }
                Direction::NodesToProver => {}
            }
        }
    }
}

/// Executes a protocol, extracts every node's view and asserts the declared
/// message budget on every round.
pub fn run_protocol<P: Protocol>(proto: &P, prover: &mut P::Prover, seed: u64) -> RunOutcome {
    let transcript = proto.execute(prover, seed);
    check_budget(&transcript, proto.bit_bound(), proto.edge_bound());
    let views = extract_views(&transcript);
    RunOutcome { accept: transcript.accept.clone(), transcript, views }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_ring() {
        let g = Network::star(4);
        let t = build_tree(&g).unwrap();
        assert_eq!(t.next_sibling(1), Some(2));
        assert_eq!(t.next_sibling(3), Some(1));
        assert_eq!(t.prev_sibling(1), Some(3));
        let p = build_tree(&Network::path(3)).unwrap();
        assert_eq!(p.next_sibling(1), None);
        assert_eq!(p.unique_child(0), Some(1));
    }

    #[test]
    fn parse_rejects_bad_order() {
        assert!(Network::parse("3 1\n2 1\n").is_err());
        assert!(Network::parse("3 2\n0 1\n1 2\n").is_ok());
        assert!(Network::parse("3 1\n0 1\n").is_err());
    }
}
