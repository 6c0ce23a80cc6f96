//! Statistical zero-knowledge distributed Sumcheck.
//!
//! Every value a node would see in the plain protocol is replaced by shares
//! of a degree-one encryption `P[v](x) = s x + v` plus a mask `N_h[v]`. The
//! masks obey linear constraints at 0 so that masked relations hold exactly
//! when the plain ones do. The prover commits `t^2` mask copies per value,
//! the root keeps `t + 1` of them and all others are opened and audited.
//!
//! Share routing for node `k` with tree color `c_k` in `{1, 2}`:
//!
//! ```text
//! own polynomials                 at c_k
//! parent's polynomials            at c_k      (= 3 - c_parent)
//! only child's polynomials        at c_k      (= 3 - c_child)
//! next sibling's polynomials      at 3 - c_k  (siblings form a ring)
//! root sum family M (root only)   at c_0, the root's first child gets 3 - c_0
//! ```
//!
//! All verification traffic is one upward round at the end: each child
//! forwards what it holds about itself, its parent and its next sibling
//! (opened masks raw, kept copies only as `P + N` sums). Parents check their
//! own relations and those of their leaf children.
//!
//! Round schedule for `N` variables and a `Q`-round oracle query:
//!
//! ```text
//! 1          topology
//! 3          stage 1: commit, root -> prover indices, prover -> nodes indices
//! 4 (N-1)    stages 2..N: root -> prover r, commit, indices, echo
//! 4          stage N+1 (final): root -> prover r_N, commit, index, echo
//! Q          oracle query
//! 1          verification exchange
//! total      4N + 5 + Q
//! ```

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{line_at_zero, PrimeModulus};
use crate::error::InstanceError;
use crate::netsim::{
    color_tree_with, extract_views, Direction, NodeView, Protocol, RoundRecord, Source,
    SpanningTree, Tag, TagKind, Transcript, TreeColoring, ValueKind,
};
use crate::seeds::derive_seed;
use crate::sumcheck::{
    blank, final_query, pad_poly, root_to_prover, topology_round, QueryMode, RunStreams, SumcheckInstance,
    SumcheckProver,
};

/// A degree-one polynomial `slope * x + intercept`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PolyEnc {
    pub slope: u64,
    pub intercept: u64,
}

impl PolyEnc {
    /// Encryption of `hidden` with a uniform slope.
    pub fn new<R: Rng + ?Sized>(m: PrimeModulus, hidden: u64, rng: &mut R) -> Self {
        Self { slope: m.random(rng), intercept: m.reduce(hidden) }
    }

    pub fn eval(&self, m: PrimeModulus, x: u64) -> u64 {
        m.add(self.intercept, m.mul(self.slope, x))
    }
}

/// Masks generated for one stage. `stage` runs from 1 to `N + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MaskSet {
    pub stage: usize,
    pub t: usize,
    /// `[node][copy]`, `t^2` copies; empty in the final stage.
    pub alpha: Vec<Vec<PolyEnc>>,
    pub beta: Vec<Vec<PolyEnc>>,
    /// `[node][copy]`, `t` copies paired with the carried survivors; empty in stage 1.
    pub beta_tilde: Vec<Vec<PolyEnc>>,
    /// Root family. Stage 1: `M_h`. Middle stages: `M_{x,y}` at `x * t + y`.
    /// Final stage: `M_y` with `M_y(0)` equal to the root's carried mask sum.
    pub root: Vec<PolyEnc>,
}

/// Encryptions of one stage's plain values, per node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageEnc {
    pub alpha: Vec<PolyEnc>,
    pub beta: Vec<PolyEnc>,
    pub beta_tilde: Vec<PolyEnc>,
}

/// Root's index draw for one stage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageIndices {
    /// `t + 1` distinct copies out of `t^2`, in draw order; the first is used now.
    pub kept: Vec<usize>,
    /// Carried copy (in `0..t`) used for the `beta~` relation.
    pub selected: Option<usize>,
}

impl StageIndices {
    /// Kept copies other than the one used now, in increasing order; position
    /// `y` is the copy relabeled as `y` in the next stage.
    pub fn survivors(&self) -> Vec<usize> {
        let mut s = self.kept.get(1..).map(<[usize]>::to_vec).unwrap_or_default();
        s.sort_unstable();
        s
    }

    pub fn is_kept(&self, h: usize) -> bool {
        self.kept.contains(&h)
    }
}

/// Draws the stage's indices from the root's index stream.
pub fn draw_indices<R: Rng + ?Sized>(t: usize, stage: usize, num_vars: usize, rng: &mut R) -> StageIndices {
    let mut out = StageIndices::default();
    if stage <= num_vars {
        let mut all: Vec<usize> = (0..t * t).collect();
        let (picked, _) = all.partial_shuffle(rng, t + 1);
        out.kept = picked.to_vec();
    }
    if stage >= 2 {
        out.selected = Some(rng.gen_range(0..t));
    }
    out
}

/// Generates masks for `stage`. `carried[k][y]` is the intercept of node
/// `k`'s `alpha` mask of the previous stage relabeled `y`; required for
/// `stage >= 2`.
pub fn gen_masks<R: Rng + ?Sized>(
    m: PrimeModulus,
    tree: &SpanningTree,
    t: usize,
    stage: usize,
    num_vars: usize,
    r_prev: u64,
    carried: Option<&[Vec<u64>]>,
    rng: &mut R,
) -> MaskSet {
    let n = tree.n();
    let tt = t * t;
    let mut out = MaskSet { stage, t, ..Default::default() };
    if stage <= num_vars {
        let mut beta = vec![Vec::with_capacity(tt); n];
        for b in beta.iter_mut() {
            for _ in 0..tt {
                b.push(PolyEnc { slope: m.random(rng), intercept: m.random(rng) });
            }
        }
        let mut alpha = vec![Vec::with_capacity(tt); n];
        for k in 0..n {
            for h in 0..tt {
                let child = m.sum(tree.children(k).iter().map(|&j| beta[j][h].intercept));
                alpha[k].push(PolyEnc { slope: m.random(rng), intercept: m.sub(beta[k][h].intercept, child) });
            }
        }
        out.alpha = alpha;
        out.beta = beta;
    }
    if stage >= 2 {
        let carried = carried.expect("carried alpha masks");
        let mut bt = vec![vec![PolyEnc::default(); t]; n];
        for k in tree.bottom_up() {
            let rk = m.pow(r_prev, k as u64);
            for y in 0..t {
                let child = m.sum(tree.children(k).iter().map(|&j| bt[j][y].intercept));
                bt[k][y] = PolyEnc { slope: m.random(rng), intercept: m.add(m.mul(carried[k][y], rk), child) };
            }
        }
        out.beta_tilde = bt;
    }
    if stage == 1 {
        for h in 0..tt {
            let icept = m.add(out.alpha[0][h].intercept, out.beta[0][h].intercept);
            out.root.push(PolyEnc { slope: m.random(rng), intercept: icept });
        }
    } else if stage <= num_vars {
        for x in 0..tt {
            for y in 0..t {
                let icept = m.sub(
                    m.add(out.alpha[0][x].intercept, out.beta[0][x].intercept),
                    out.beta_tilde[0][y].intercept,
                );
                out.root.push(PolyEnc { slope: m.random(rng), intercept: icept });
            }
        }
    } else {
        for y in 0..t {
            out.root.push(PolyEnc { slope: m.random(rng), intercept: out.beta_tilde[0][y].intercept });
        }
    }
    out
}

/// Checks every mask constraint of a stage directly on the polynomials.
pub fn masks_consistent(m: PrimeModulus, tree: &SpanningTree, masks: &MaskSet, r_prev: u64, carried: Option<&[Vec<u64>]>) -> bool {
    let t = masks.t;
    for k in 0..tree.n() {
        for h in 0..masks.alpha.get(k).map_or(0, Vec::len) {
            let child = m.sum(tree.children(k).iter().map(|&j| masks.beta[j][h].intercept));
            if m.add(masks.alpha[k][h].intercept, child) != masks.beta[k][h].intercept {
                return false;
            }
        }
        if let Some(c) = carried {
            for y in 0..masks.beta_tilde.get(k).map_or(0, Vec::len) {
                let child = m.sum(tree.children(k).iter().map(|&j| masks.beta_tilde[j][y].intercept));
                let want = m.add(m.mul(c[k][y], m.pow(r_prev, k as u64)), child);
                if masks.beta_tilde[k][y].intercept != want {
                    return false;
                }
            }
        }
    }
    let root_ok = |i: usize, want: u64| masks.root.get(i).is_some_and(|p| p.intercept == want);
    let tt = t * t;
    if masks.stage == 1 {
        (0..tt).all(|h| root_ok(h, m.add(masks.alpha[0][h].intercept, masks.beta[0][h].intercept)))
    } else if !masks.alpha.is_empty() {
        (0..tt).all(|x| {
            (0..t).all(|y| {
                let w = m.sub(
                    m.add(masks.alpha[0][x].intercept, masks.beta[0][x].intercept),
                    masks.beta_tilde[0][y].intercept,
                );
                root_ok(x * t + y, w)
            })
        })
    } else {
        (0..t).all(|y| root_ok(y, masks.beta_tilde[0][y].intercept))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reveal {
    Open,
    Kept,
}

/// Mask objects revealed during the verification of `stage`:
/// `(object stage, value, copy, how)`.
pub fn reveal_plan(
    stage: usize,
    num_vars: usize,
    t: usize,
    idx: &[StageIndices],
) -> Vec<(usize, ValueKind, usize, Reveal)> {
    let mut out = Vec::new();
    let cur = &idx[stage - 1];
    if stage <= num_vars {
        for v in [ValueKind::Alpha, ValueKind::Beta] {
            for h in 0..t * t {
                if cur.kept.first() == Some(&h) {
                    out.push((stage, v, h, Reveal::Kept));
                } else if !cur.is_kept(h) {
                    out.push((stage, v, h, Reveal::Open));
                }
            }
        }
    }
    if stage >= 2 {
        let sel = cur.selected.unwrap_or(0);
        let surv = idx[stage - 2].survivors();
        for y in 0..t {
            let how = if y == sel { Reveal::Kept } else { Reveal::Open };
            out.push((stage, ValueKind::BetaTilde, y, how));
            out.push((stage - 1, ValueKind::Alpha, surv[y], how));
        }
    }
    out
}

/// Root-family copies revealed in `stage`.
pub fn root_plan(stage: usize, num_vars: usize, t: usize, idx: &[StageIndices]) -> Vec<(usize, Reveal)> {
    let cur = &idx[stage - 1];
    let mut out = Vec::new();
    if stage == 1 {
        for h in 0..t * t {
            if cur.kept.first() == Some(&h) {
                out.push((h, Reveal::Kept));
            } else if !cur.is_kept(h) {
                out.push((h, Reveal::Open));
            }
        }
    } else if stage <= num_vars {
        let sel = cur.selected.unwrap_or(0);
        for x in 0..t * t {
            for y in 0..t {
                if cur.kept.first() == Some(&x) && y == sel {
                    out.push((x * t + y, Reveal::Kept));
                } else if !cur.is_kept(x) && y != sel {
                    out.push((x * t + y, Reveal::Open));
                }
            }
        }
    } else {
        let sel = cur.selected.unwrap_or(0);
        for y in 0..t {
            out.push((y, if y == sel { Reveal::Kept } else { Reveal::Open }));
        }
    }
    out
}

fn share_tag(kind: TagKind, stage: usize, owner: usize, value: ValueKind, copy: usize, point: u64) -> Tag {
    Tag { kind, stage: stage as u32, owner: owner as u32, value, copy: copy as u32, point: point as u8 }
}

fn pub_tag(stage: usize, value: ValueKind, copy: usize) -> Tag {
    Tag { kind: TagKind::Public, stage: stage as u32, owner: 0, value, copy: copy as u32, point: 0 }
}

/// Owners whose shares node `k` receives, with the evaluation point.
pub fn share_owners(tree: &SpanningTree, col: &TreeColoring, k: usize) -> Vec<(usize, u64)> {
    let ck = col.color(k);
    let mut out = vec![(k, ck)];
    if let Some(p) = tree.parent(k) {
        out.push((p, ck));
    }
    if let Some(j) = tree.unique_child(k) {
        out.push((j, ck));
    }
    if let Some(s) = tree.next_sibling(k) {
        out.push((s, 3 - ck));
    }
    out
}

/// All shares of one node's view, keyed by tag. Conflicting duplicates are
/// remembered and make every check fail.
#[derive(Clone, Debug, Default)]
pub struct ShareMap {
    map: HashMap<Tag, u64>,
    conflict: bool,
}

impl ShareMap {
    pub fn from_view(view: &NodeView) -> Self {
        let mut out = Self::default();
        for e in &view.rounds {
            for (tag, &v) in e.tags.iter().zip(&e.values) {
                out.insert(*tag, v);
            }
        }
        out
    }

    pub fn insert(&mut self, tag: Tag, v: u64) {
        if let Some(old) = self.map.insert(tag, v) {
            if old != v {
                self.conflict = true;
            }
        }
    }

    pub fn get(&self, tag: &Tag) -> Option<u64> {
        self.map.get(tag).copied()
    }

    pub fn has_conflict(&self) -> bool {
        self.conflict
    }

    /// `P[v] + N_copy[v]` at `point`, either received as a sum or assembled
    /// from the two raw shares.
    fn masked(&self, m: PrimeModulus, stage: usize, owner: usize, v: ValueKind, copy: usize, point: u64) -> Option<u64> {
        if let Some(x) = self.get(&share_tag(TagKind::Masked, stage, owner, v, copy, point)) {
            return Some(x);
        }
        let e = self.get(&share_tag(TagKind::Enc, stage, owner, v, 0, point))?;
        let n = self.get(&share_tag(TagKind::Mask, stage, owner, v, copy, point))?;
        Some(m.add(e, n))
    }

    fn value_at(&self, m: PrimeModulus, how: Reveal, stage: usize, owner: usize, v: ValueKind, copy: usize, point: u64) -> Option<u64> {
        match how {
            Reveal::Open => self.get(&share_tag(TagKind::Mask, stage, owner, v, copy, point)),
            Reveal::Kept => {
                if v == ValueKind::RootSum {
                    self.get(&share_tag(TagKind::Mask, stage, owner, v, copy, point))
                } else {
                    self.masked(m, stage, owner, v, copy, point)
                }
            }
        }
    }

    /// Interpolates the revealed polynomial and returns its value at 0.
    fn at_zero(&self, m: PrimeModulus, how: Reveal, stage: usize, owner: usize, v: ValueKind, copy: usize) -> Option<u64> {
        let y1 = self.value_at(m, how, stage, owner, v, copy, 1)?;
        let y2 = self.value_at(m, how, stage, owner, v, copy, 2)?;
        Some(line_at_zero(m, 1, y1, 2, y2))
    }
}

/// Public values a node decoded from its view.
#[derive(Clone, Debug, Default)]
pub struct NodeKnowledge {
    /// `r[i-1]` is `r_i`.
    pub r: Vec<u64>,
    pub idx: Vec<StageIndices>,
}

/// Static parameters shared by all verifiers of one run.
#[derive(Clone, Debug)]
pub struct VerifyCtx<'a> {
    pub modulus: PrimeModulus,
    pub tree: &'a SpanningTree,
    pub t: usize,
    pub num_vars: usize,
    pub a: u64,
}

/// Reads `r_i` and the index draws out of a node's shares.
pub fn decode_knowledge(ctx: &VerifyCtx<'_>, map: &ShareMap) -> Option<NodeKnowledge> {
    let nv = ctx.num_vars;
    let t = ctx.t;
    let mut out = NodeKnowledge::default();
    for s in 2..=nv + 1 {
        out.r.push(map.get(&pub_tag(s, ValueKind::Challenge, 0))?);
    }
    for s in 1..=nv + 1 {
        let mut si = StageIndices::default();
        if s <= nv {
            for j in 0..=t {
                let h = map.get(&pub_tag(s, ValueKind::Kept, j))? as usize;
                if h >= t * t || si.kept.contains(&h) {
                    return None;
                }
                si.kept.push(h);
            }
        }
        if s >= 2 {
            let y = map.get(&pub_tag(s, ValueKind::Selected, 0))? as usize;
            if y >= t {
                return None;
            }
            si.selected = Some(y);
        }
        out.idx.push(si);
    }
    Some(out)
}

/// Nodes whose local relations node `k` checks: itself when it has
/// children, and each of its leaf children.
fn check_targets(tree: &SpanningTree, k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if !tree.children(k).is_empty() {
        out.push(k);
        out.extend(tree.children(k).iter().copied().filter(|&j| tree.is_leaf(j)));
    }
    out
}

fn relation_ab(ctx: &VerifyCtx<'_>, map: &ShareMap, u: usize, s: usize, h: usize, how: Reveal) -> Option<bool> {
    let m = ctx.modulus;
    let a = map.at_zero(m, how, s, u, ValueKind::Alpha, h)?;
    let b = map.at_zero(m, how, s, u, ValueKind::Beta, h)?;
    let mut child = 0;
    for &j in ctx.tree.children(u) {
        child = m.add(child, map.at_zero(m, how, s, j, ValueKind::Beta, h)?);
    }
    Some(m.add(a, child) == b)
}

fn relation_bt(
    ctx: &VerifyCtx<'_>,
    map: &ShareMap,
    know: &NodeKnowledge,
    u: usize,
    s: usize,
    y: usize,
    how: Reveal,
) -> Option<bool> {
    let m = ctx.modulus;
    let surv = know.idx[s - 2].survivors();
    let bt = map.at_zero(m, how, s, u, ValueKind::BetaTilde, y)?;
    let a = map.at_zero(m, how, s - 1, u, ValueKind::Alpha, surv[y])?;
    let mut child = 0;
    for &j in ctx.tree.children(u) {
        child = m.add(child, map.at_zero(m, how, s, j, ValueKind::BetaTilde, y)?);
    }
    let rk = m.pow(know.r[s - 2], u as u64);
    Some(m.add(m.mul(a, rk), child) == bt)
}

/// Audits every opened copy node `k` can reconstruct: the subtree relation
/// for itself and its leaf children and, at the root, the root family.
pub fn open_and_verify_masks(ctx: &VerifyCtx<'_>, k: usize, map: &ShareMap, know: &NodeKnowledge) -> bool {
    if map.has_conflict() {
        return false;
    }
    let run = || -> Option<bool> {
        let m = ctx.modulus;
        let t = ctx.t;
        let nv = ctx.num_vars;
        for s in 1..=nv + 1 {
            let cur = &know.idx[s - 1];
            for u in check_targets(ctx.tree, k) {
                if s <= nv {
                    for h in (0..t * t).filter(|h| !cur.is_kept(*h)) {
                        if !relation_ab(ctx, map, u, s, h, Reveal::Open)? {
                            return Some(false);
                        }
                    }
                }
                if s >= 2 {
                    for y in (0..t).filter(|&y| Some(y) != cur.selected) {
                        if !relation_bt(ctx, map, know, u, s, y, Reveal::Open)? {
                            return Some(false);
                        }
                    }
                }
            }
            if k != 0 {
                continue;
            }
            for (copy, how) in root_plan(s, nv, t, &know.idx) {
                if how != Reveal::Open {
                    continue;
                }
                let mv = map.at_zero(m, Reveal::Open, s, 0, ValueKind::RootSum, copy)?;
                let want = if s == 1 {
                    m.add(
                        map.at_zero(m, Reveal::Open, 1, 0, ValueKind::Alpha, copy)?,
                        map.at_zero(m, Reveal::Open, 1, 0, ValueKind::Beta, copy)?,
                    )
                } else if s <= nv {
                    let (x, y) = (copy / t, copy % t);
                    m.sub(
                        m.add(
                            map.at_zero(m, Reveal::Open, s, 0, ValueKind::Alpha, x)?,
                            map.at_zero(m, Reveal::Open, s, 0, ValueKind::Beta, x)?,
                        ),
                        map.at_zero(m, Reveal::Open, s, 0, ValueKind::BetaTilde, y)?,
                    )
                } else {
                    map.at_zero(m, Reveal::Open, s, 0, ValueKind::BetaTilde, copy)?
                };
                if mv != want {
                    return Some(false);
                }
            }
        }
        Some(true)
    };
    run().unwrap_or(false)
}

/// Checks the masked relations on the kept copies. `final_value` is the
/// root's oracle answer `F(r_1, ..., r_N)`; ignored at other nodes.
pub fn masked_equality_check(
    ctx: &VerifyCtx<'_>,
    k: usize,
    map: &ShareMap,
    know: &NodeKnowledge,
    final_value: u64,
) -> bool {
    if map.has_conflict() {
        return false;
    }
    let run = || -> Option<bool> {
        let m = ctx.modulus;
        let t = ctx.t;
        let nv = ctx.num_vars;
        for s in 1..=nv + 1 {
            let cur = &know.idx[s - 1];
            for u in check_targets(ctx.tree, k) {
                if s <= nv && !relation_ab(ctx, map, u, s, cur.kept[0], Reveal::Kept)? {
                    return Some(false);
                }
                if s >= 2 && !relation_bt(ctx, map, know, u, s, cur.selected?, Reveal::Kept)? {
                    return Some(false);
                }
            }
            if k != 0 {
                continue;
            }
            let h0 = cur.kept.first().copied();
            let ok = if s == 1 {
                let h0 = h0?;
                let lhs = m.add(
                    map.at_zero(m, Reveal::Kept, 1, 0, ValueKind::Alpha, h0)?,
                    map.at_zero(m, Reveal::Kept, 1, 0, ValueKind::Beta, h0)?,
                );
                let mv = map.at_zero(m, Reveal::Kept, 1, 0, ValueKind::RootSum, h0)?;
                lhs == m.add(mv, ctx.a)
            } else if s <= nv {
                let (h0, y) = (h0?, cur.selected?);
                let lhs = m.sub(
                    m.add(
                        map.at_zero(m, Reveal::Kept, s, 0, ValueKind::Alpha, h0)?,
                        map.at_zero(m, Reveal::Kept, s, 0, ValueKind::Beta, h0)?,
                    ),
                    map.at_zero(m, Reveal::Kept, s, 0, ValueKind::BetaTilde, y)?,
                );
                lhs == map.at_zero(m, Reveal::Kept, s, 0, ValueKind::RootSum, h0 * t + y)?
            } else {
                let y = cur.selected?;
                let bt = map.at_zero(m, Reveal::Kept, s, 0, ValueKind::BetaTilde, y)?;
                let mv = map.at_zero(m, Reveal::Kept, s, 0, ValueKind::RootSum, y)?;
                m.sub(bt, mv) == final_value
            };
            if !ok {
                return Some(false);
            }
        }
        Some(true)
    };
    run().unwrap_or(false)
}

/// Where the Final Check value comes from.
#[derive(Clone, Debug)]
pub enum FinalSource {
    /// Run the instance's query (or the direct oracle) now.
    Live(QueryMode),
    /// Replay a query that was run beforehand.
    Replay { value: u64, rounds: Vec<RoundRecord> },
}

/// Message budget of the zero-knowledge protocol, in field elements.
pub fn zk_prover_elems(t: usize) -> u64 {
    let t = t as u64;
    // four owners, each with two t^2 families, one t family and three encryptions,
    // plus the root family and the challenge
    4 * (3 + 2 * t * t + t) + t * t * t + 1
}

pub fn zk_edge_elems(t: usize, num_vars: usize) -> u64 {
    let t = t as u64;
    (num_vars as u64 + 1) * (3 * (2 * t * t + 2 * t) + t * t * t + t)
}

/// Exact round count of the zero-knowledge schedule.
pub fn zk_schedule_rounds(num_vars: usize, query_rounds: usize) -> usize {
    4 * num_vars + 5 + query_rounds
}

/// Checks the preconditions of the zero-knowledge protocol.
pub fn check_zk_instance(inst: &SumcheckInstance) -> Result<(), InstanceError> {
    if inst.n() < 2 {
        return Err(InstanceError::TooFewNodes);
    }
    if inst.t < 2 {
        return Err(InstanceError::BadT(inst.t));
    }
    if inst.num_vars() == 0 {
        return Err(InstanceError::Invalid("need at least one variable".into()));
    }
    Ok(())
}

/// Pushes a prover-built payload to every node after the corruption hook;
/// nodes whose payload arity changed are marked as rejecting.
fn deliver(
    tx: &mut Transcript,
    prover: &mut dyn SumcheckProver,
    label: &str,
    built: Vec<Vec<(Tag, u64)>>,
    bad: &mut [bool],
) {
    let mut per = blank(built.len());
    for (k, items) in built.into_iter().enumerate() {
        let mut vals: Vec<u64> = items.iter().map(|x| x.1).collect();
        prover.corrupt_payload(label, k, &mut vals);
        if vals.len() != items.len() {
            bad[k] = true;
            vals.resize(items.len(), 0);
        }
        for ((tag, _), v) in items.into_iter().zip(vals) {
            per[k].push(Source::Prover, v, tag);
        }
    }
    tx.push_round(Direction::ProverToNodes, label, per);
}

/// Everything the honest machinery needs besides the prover.
struct ZkRunner<'a> {
    inst: &'a SumcheckInstance,
    col: TreeColoring,
}

impl ZkRunner<'_> {
    fn commit_payload(
        &self,
        k: usize,
        stage: usize,
        r_prev: Option<u64>,
        enc: &StageEnc,
        masks: &MaskSet,
    ) -> Vec<(Tag, u64)> {
        let m = self.inst.modulus;
        let tree = &self.inst.tree;
        let mut out = Vec::new();
        if let Some(r) = r_prev {
            out.push((pub_tag(stage, ValueKind::Challenge, 0), r));
        }
        for (o, x) in share_owners(tree, &self.col, k) {
            let fams: [(ValueKind, &Vec<PolyEnc>, &Vec<Vec<PolyEnc>>); 3] = [
                (ValueKind::Alpha, &enc.alpha, &masks.alpha),
                (ValueKind::Beta, &enc.beta, &masks.beta),
                (ValueKind::BetaTilde, &enc.beta_tilde, &masks.beta_tilde),
            ];
            for (v, e, ns) in fams {
                if e.is_empty() {
                    continue;
                }
                out.push((share_tag(TagKind::Enc, stage, o, v, 0, x), e[o].eval(m, x)));
                for (h, nh) in ns[o].iter().enumerate() {
                    out.push((share_tag(TagKind::Mask, stage, o, v, h, x), nh.eval(m, x)));
                }
            }
        }
        let c0 = self.col.color(0);
        let point = if k == 0 {
            Some(c0)
        } else if tree.parent(k) == Some(0) && tree.children(0).first() == Some(&k) {
            Some(3 - c0)
        } else {
            None
        };
        if let Some(x) = point {
            for (h, mh) in masks.root.iter().enumerate() {
                out.push((share_tag(TagKind::Mask, stage, 0, ValueKind::RootSum, h, x), mh.eval(m, x)));
            }
        }
        out
    }

    fn index_payload(stage: usize, si: &StageIndices) -> Vec<(Tag, u64)> {
        let mut out: Vec<(Tag, u64)> =
            si.kept.iter().enumerate().map(|(j, &h)| (pub_tag(stage, ValueKind::Kept, j), h as u64)).collect();
        if let Some(y) = si.selected {
            out.push((pub_tag(stage, ValueKind::Selected, 0), y as u64));
        }
        out
    }

    /// What child `j` forwards to its parent, built from `j`'s own shares.
    fn upward_message(&self, j: usize, map: &ShareMap, know: &NodeKnowledge) -> Vec<(Tag, u64)> {
        let m = self.inst.modulus;
        let tree = &self.inst.tree;
        let nv = self.inst.num_vars();
        let t = self.inst.t;
        let cj = self.col.color(j);
        let p = tree.parent(j).expect("non-root");
        let mut owners = vec![(j, cj), (p, cj)];
        if let Some(s) = tree.next_sibling(j) {
            owners.push((s, 3 - cj));
        }
        let first_of_root = p == 0 && tree.children(0).first() == Some(&j);
        let mut out = Vec::new();
        for s in 1..=nv + 1 {
            let plan = reveal_plan(s, nv, t, &know.idx);
            for &(o, x) in &owners {
                for &(st, v, copy, how) in &plan {
                    let kind = if how == Reveal::Open { TagKind::Mask } else { TagKind::Masked };
                    let val = map.value_at(m, how, st, o, v, copy, x).unwrap_or(0);
                    out.push((share_tag(kind, st, o, v, copy, x), val));
                }
            }
            if first_of_root {
                let x = 3 - self.col.color(0);
                for (copy, _) in root_plan(s, nv, t, &know.idx) {
                    let tag = share_tag(TagKind::Mask, s, 0, ValueKind::RootSum, copy, x);
                    out.push((tag, map.get(&tag).unwrap_or(0)));
                }
            }
        }
        out
    }
}

/// Runs the zero-knowledge protocol. Returns the transcript (accept bits
/// filled) and the value the root used for the Final Check.
pub fn run_zk(
    inst: &SumcheckInstance,
    prover: &mut dyn SumcheckProver,
    seed: u64,
    source: FinalSource,
) -> (Transcript, u64) {
    let m = inst.modulus;
    let n = inst.n();
    let nv = inst.num_vars();
    let t = inst.t;
    let tree = &inst.tree;
    let mut streams = RunStreams::new(seed);
    let mut query_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3));
    let col = color_tree_with(tree, &mut streams.prover);
    let runner = ZkRunner { inst, col };
    let mut tx = Transcript::new(m, n);
    let mut bad = vec![false; n];

    topology_round(tree, &mut tx);

    let mut r: Vec<u64> = Vec::new();
    let mut idx: Vec<StageIndices> = Vec::new();
    let mut g_prev: Option<Vec<u64>> = None;
    let mut prev_masks: Option<MaskSet> = None;
    let mut root_echo_ok = true;

    for s in 1..=nv + 1 {
        let r_prev = if s >= 2 {
            let ri = m.random(&mut streams.challenges);
            r.push(ri);
            tx.challenges.r.push(ri);
            root_to_prover(&mut tx, &format!("challenge r{}", s - 1), &[ri], s as u32);
            Some(ri)
        } else {
            None
        };
        let g_cur = (s <= nv).then(|| pad_poly(prover.round_poly(inst, s, &r), n, m).0);
        let asg = prover.assignment(inst, s, &r, g_cur.as_deref(), g_prev.as_deref());
        let rng = &mut streams.prover;
        let encs = |vals: &[u64], rng: &mut ChaCha8Rng| -> Vec<PolyEnc> {
            if vals.is_empty() {
                Vec::new()
            } else {
                (0..n).map(|k| PolyEnc::new(m, vals.get(k).copied().unwrap_or(0), rng)).collect()
            }
        };
        let enc = StageEnc {
            alpha: if s <= nv { encs(&pad(&asg.alpha, n), rng) } else { Vec::new() },
            beta: if s <= nv { encs(&pad(&asg.beta, n), rng) } else { Vec::new() },
            beta_tilde: if s >= 2 { encs(&pad(&asg.beta_tilde, n), rng) } else { Vec::new() },
        };
        let carried: Option<Vec<Vec<u64>>> = prev_masks.as_ref().map(|pm| {
            let surv = idx[s - 2].survivors();
            (0..n).map(|k| surv.iter().map(|&h| pm.alpha[k][h].intercept).collect()).collect()
        });
        let mut masks = gen_masks(m, tree, t, s, nv, r_prev.unwrap_or(0), carried.as_deref(), rng);
        prover.tamper_masks(s, &mut masks);

        let built: Vec<Vec<(Tag, u64)>> = (0..n).map(|k| runner.commit_payload(k, s, r_prev, &enc, &masks)).collect();
        let label = if s <= nv { format!("commit {s}") } else { "commit final".to_string() };
        deliver(&mut tx, prover, &label, built, &mut bad);
        // the root sees what the prover echoed for r
        if let Some(ri) = r_prev {
            let got = tx.rounds.last().and_then(|rr| rr.per_node[0].values.first().copied());
            root_echo_ok &= got == Some(ri);
        }

        let si = draw_indices(t, s, nv, &mut streams.indices);
        let mut sent: Vec<u64> = si.kept.iter().map(|&h| h as u64).collect();
        sent.extend(si.selected.map(|y| y as u64));
        root_to_prover(&mut tx, &format!("indices {s}"), &sent, s as u32);
        tx.challenges.kept.push(si.kept.iter().map(|&h| h as u64).collect());
        if let Some(y) = si.selected {
            tx.challenges.selected.push(y as u64);
        }
        let built: Vec<Vec<(Tag, u64)>> = (0..n).map(|_| ZkRunner::index_payload(s, &si)).collect();
        deliver(&mut tx, prover, &format!("echo indices {s}"), built, &mut bad);
        root_echo_ok &= tx.rounds.last().map(|rr| rr.per_node[0].values == sent).unwrap_or(false);

        idx.push(si);
        g_prev = g_cur;
        prev_masks = Some(masks);
    }

    let fr = match source {
        FinalSource::Live(mode) => final_query(inst, &r, &mut tx, mode, &mut query_rng, prover),
        FinalSource::Replay { value, rounds } => {
            tx.rounds.extend(rounds);
            value
        }
    };

    // verification exchange, built from each child's own view so far
    let views = extract_views(&tx);
    let ctx = VerifyCtx { modulus: m, tree, t, num_vars: nv, a: inst.a };
    let mut per = blank(n);
    for j in 1..n {
        let map = ShareMap::from_view(&views[j]);
        let know = decode_knowledge(&ctx, &map).unwrap_or_else(|| NodeKnowledge {
            r: vec![0; nv],
            idx: fallback_indices(t, nv),
        });
        let p = tree.parent(j).expect("non-root");
        for (tag, v) in runner.upward_message(j, &map, &know) {
            per[p].push(Source::Node(j), v, tag);
        }
    }
    tx.push_round(Direction::NodeToNeighbor, "verify", per);

    let views = extract_views(&tx);
    for k in 0..n {
        let map = ShareMap::from_view(&views[k]);
        let ok = match decode_knowledge(&ctx, &map) {
            None => false,
            Some(know) => {
                open_and_verify_masks(&ctx, k, &map, &know) && masked_equality_check(&ctx, k, &map, &know, fr)
            }
        };
        tx.accept[k] = tx.accept[k] && ok && !bad[k] && (k != 0 || root_echo_ok);
    }
    (tx, fr)
}

fn pad(v: &[u64], n: usize) -> Vec<u64> {
    let mut v = v.to_vec();
    v.resize(n, 0);
    v
}

fn fallback_indices(t: usize, nv: usize) -> Vec<StageIndices> {
    (1..=nv + 1)
        .map(|s| StageIndices {
            kept: if s <= nv { (0..=t).collect() } else { Vec::new() },
            selected: (s >= 2).then_some(0),
        })
        .collect()
}

/// The zero-knowledge distributed Sumcheck with the instance's own Final
/// Check query.
pub fn zk_sumcheck(inst: &SumcheckInstance, prover: &mut dyn SumcheckProver, seed: u64) -> Transcript {
    run_zk(inst, prover, seed, FinalSource::Live(QueryMode::Honest)).0
}

#[derive(Clone, Debug)]
pub struct ZkSumcheck {
    pub inst: SumcheckInstance,
}

impl ZkSumcheck {
    pub fn new(inst: SumcheckInstance) -> Result<Self, InstanceError> {
        check_zk_instance(&inst)?;
        Ok(Self { inst })
    }
}

impl Protocol for ZkSumcheck {
    type Prover = dyn SumcheckProver;

    fn execute(&self, prover: &mut Self::Prover, seed: u64) -> Transcript {
        zk_sumcheck(&self.inst, prover, seed)
    }

    fn bit_bound(&self) -> Option<u64> {
        Some(zk_prover_elems(self.inst.t) * self.inst.modulus.bits())
    }

    fn edge_bound(&self) -> Option<u64> {
        Some(zk_edge_elems(self.inst.t, self.inst.num_vars()) * self.inst.modulus.bits())
    }
}

/// Honest-looking prover for a coefficient chain chosen by the simulator.
#[derive(Clone, Debug)]
pub struct ChainProver {
    pub chain: Vec<Vec<u64>>,
}

impl SumcheckProver for ChainProver {
    fn round_poly(&mut self, _inst: &SumcheckInstance, i: usize, _r: &[u64]) -> Vec<u64> {
        self.chain[i - 1].clone()
    }
}

/// A random chain of round polynomials of degree at most `d` that passes
/// every plain check for claim `a`, challenges `r` and final value `fr`.
/// When `d = 1` and `r_N = 1/2` no such chain may exist; the last polynomial
/// then only satisfies the sum relation.
pub fn fake_chain<R: Rng + ?Sized>(
    m: PrimeModulus,
    d: usize,
    a: u64,
    r: &[u64],
    fr: u64,
    rng: &mut R,
) -> Vec<Vec<u64>> {
    let inv2 = m.inv(2).expect("odd modulus");
    let nv = r.len();
    let mut out = Vec::with_capacity(nv);
    let mut c = a;
    for (i, &ri) in r.iter().enumerate() {
        let mut g = vec![0u64; d + 1];
        if d == 0 {
            g[0] = m.mul(c, inv2);
        } else if i + 1 < nv {
            for x in g.iter_mut().skip(1) {
                *x = m.random(rng);
            }
            let rest = m.sum(g[1..].iter().copied());
            g[0] = m.mul(m.sub(c, rest), inv2);
        } else {
            // pick a free coefficient j whose equation system is regular
            let pick = (1..=d).find(|&j| m.sub(m.pow(ri, j as u64), inv2) != 0);
            for x in g.iter_mut().skip(1) {
                *x = m.random(rng);
            }
            if let Some(j) = pick {
                let s1 = m.sum((1..=d).filter(|&k| k != j).map(|k| g[k]));
                let s2 = m.sum((1..=d).filter(|&k| k != j).map(|k| m.mul(g[k], m.pow(ri, k as u64))));
                let det = m.sub(m.pow(ri, j as u64), inv2);
                let rhs = m.sub(m.sub(fr, s2), m.mul(m.sub(c, s1), inv2));
                g[j] = m.mul(rhs, m.inv(det).expect("nonzero"));
                let s1_all = m.add(s1, g[j]);
                g[0] = m.mul(m.sub(c, s1_all), inv2);
            } else {
                let rest = m.sum(g[1..].iter().copied());
                g[0] = m.mul(m.sub(c, rest), inv2);
            }
        }
        c = m.sum(g.iter().enumerate().map(|(k, &x)| m.mul(x, m.pow(ri, k as u64))));
        out.push(g);
    }
    out
}

/// Simulated transcript for a yes-instance. Uses the verifier randomness
/// stream of `seed`, one Final Check query (answered per `mode`) and a
/// random coefficient chain consistent with the public checks; the mask and
/// share machinery is the real one.
pub fn simulate_transcript(inst: &SumcheckInstance, seed: u64, mode: QueryMode) -> Transcript {
    let m = inst.modulus;
    let nv = inst.num_vars();
    let mut challenges = RunStreams::new(seed).challenges;
    let r: Vec<u64> = (0..nv).map(|_| m.random(&mut challenges)).collect();
    let mut scratch = Transcript::new(m, inst.n());
    let mut query_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3));
    let mut noop = crate::sumcheck::HonestProver;
    let fr = final_query(inst, &r, &mut scratch, mode, &mut query_rng, &mut noop);
    let mut chain_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 4));
    let chain = fake_chain(m, inst.degree(), inst.a, &r, fr, &mut chain_rng);
    let mut prover = ChainProver { chain };
    run_zk(inst, &mut prover, seed, FinalSource::Replay { value: fr, rounds: scratch.rounds }).0
}

pub fn simulate_views(inst: &SumcheckInstance, seed: u64, mode: QueryMode) -> Vec<NodeView> {
    extract_views(&simulate_transcript(inst, seed, mode))
}

/// Cheats on a false claim by breaking `(0C)` in one committed root copy so
/// the stage-1 root check passes exactly when that copy is the one used.
#[derive(Clone, Debug)]
pub struct OneBadCopyProver {
    pub modulus: PrimeModulus,
    /// Claimed minus true sum.
    pub gap: u64,
    pub bad_copy: usize,
}

impl SumcheckProver for OneBadCopyProver {
    fn round_poly(&mut self, inst: &SumcheckInstance, i: usize, r: &[u64]) -> Vec<u64> {
        crate::sumcheck::HonestProver.round_poly(inst, i, r)
    }

    fn tamper_masks(&mut self, stage: usize, masks: &mut MaskSet) {
        if stage == 1 {
            if let Some(p) = masks.root.get_mut(self.bad_copy) {
                p.intercept = self.modulus.sub(p.intercept, self.gap);
            }
        }
    }
}

/// Honest prover that breaks `(RC)` at one node in one stage-1 copy.
#[derive(Clone, Debug)]
pub struct RcViolatorProver {
    pub modulus: PrimeModulus,
    pub node: usize,
    pub bad_copy: usize,
}

impl SumcheckProver for RcViolatorProver {
    fn round_poly(&mut self, inst: &SumcheckInstance, i: usize, r: &[u64]) -> Vec<u64> {
        crate::sumcheck::HonestProver.round_poly(inst, i, r)
    }

    fn tamper_masks(&mut self, stage: usize, masks: &mut MaskSet) {
        if stage == 1 {
            if let Some(p) = masks.alpha.get_mut(self.node).and_then(|v| v.get_mut(self.bad_copy)) {
                p.intercept = self.modulus.add(p.intercept, 1);
            }
        }
    }
}
