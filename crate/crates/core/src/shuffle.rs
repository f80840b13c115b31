//! The domino shuffle on dP3 diamonds and the sampler built on it.
//!
//! One step turns a perfect matching of `D_m` into one of `D_{m+1/2}`. The
//! kites of one orientation pair (NE/SW when `m` is an integer, NW/SE
//! otherwise) that meet `D_m` are circled; kites whose root is missing get
//! their tail added; each kite is then rewritten by the edge rules and
//! flipped. Flipping all kites of a pair translates the lattice, so the
//! rewrite works directly on lattice coordinates.

use rustc_hash::FxHashSet as HashSet;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::diamond::{build_diamond, Diamond};
use crate::error::{Error, Result};
use crate::lattice::{kite_containing, kite_of, square_unchecked, Kite, LatticeEdge, LatticePoint, Orientation, OrientationPair};
use crate::matching::Matching;
use crate::order::Order;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KiteCase {
    /// Only the tail is matched; the output is one of two edge pairs.
    Creation,
    /// One short edge of the square is matched.
    ShortEdge,
    /// The tail and one long edge are matched.
    LongEdge,
    /// One short and one long edge are matched, the tail is not.
    Annihilation,
}

/// Source of creation bits for one shuffle step.
pub trait BitSource {
    fn next_bit(&mut self) -> bool;
}

/// Pseudorandom bits keyed by a seed: bit `k` of step `t` is bit `k mod 32`
/// of word `k / 32` of the ChaCha8 stream number `t`.
#[derive(Clone, Debug)]
pub struct SeededBits {
    rng: ChaCha8Rng,
    word: u32,
    left: u32,
}

impl SeededBits {
    pub fn new(seed: u64, step: u32) -> SeededBits {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(step));
        SeededBits { rng, word: 0, left: 0 }
    }

    /// Bit `k` of step `step`, computed without reading the bits before it.
    pub fn bit_at(seed: u64, step: u32, k: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(step));
        rng.set_word_pos(u128::from(k / 32));
        (rng.next_u32() >> (k % 32)) & 1 == 1
    }
}

impl BitSource for SeededBits {
    fn next_bit(&mut self) -> bool {
        if self.left == 0 {
            self.word = self.rng.next_u32();
            self.left = 32;
        }
        let b = self.word & 1 == 1;
        self.word >>= 1;
        self.left -= 1;
        b
    }
}

/// Bits read from a mask, least significant first; zero past bit 63.
#[derive(Clone, Copy, Debug)]
pub struct MaskBits {
    mask: u64,
    pos: u32,
}

impl MaskBits {
    pub fn new(mask: u64) -> MaskBits {
        MaskBits { mask, pos: 0 }
    }
}

impl BitSource for MaskBits {
    fn next_bit(&mut self) -> bool {
        let b = self.pos < 64 && (self.mask >> self.pos) & 1 == 1;
        self.pos += 1;
        b
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KiteRecord {
    pub kite: Kite,
    pub case: KiteCase,
    /// The bit consumed by a creation.
    pub choice: Option<bool>,
    pub tail_added: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleTrace {
    pub order_before: Order,
    pub order_after: Order,
    /// One record per circled kite, in kite order.
    pub records: Vec<KiteRecord>,
    pub tails_added: usize,
}

/// Per-step counts, written as one JSON line per step by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StepSummary {
    /// Order reached by the step.
    pub order: Order,
    pub creations: usize,
    pub annihilations: usize,
    pub tails_added: usize,
}

impl ShuffleTrace {
    pub fn count(&self, case: KiteCase) -> usize {
        self.records.iter().filter(|r| r.case == case).count()
    }

    pub fn creations(&self) -> usize {
        self.count(KiteCase::Creation)
    }

    pub fn annihilations(&self) -> usize {
        self.count(KiteCase::Annihilation)
    }

    pub fn summary(&self) -> StepSummary {
        StepSummary {
            order: self.order_after,
            creations: self.creations(),
            annihilations: self.annihilations(),
            tails_added: self.tails_added,
        }
    }
}

/// Orientation pair whose kites are circled when shuffling `D_m`.
pub fn active_pair(m: Order) -> OrientationPair {
    if m.is_integer() {
        OrientationPair::NortheastSouthwest
    } else {
        OrientationPair::NorthwestSoutheast
    }
}

/// The circled kites of `D_m`, sorted: every kite of the active pair sharing
/// an edge with the diamond. The empty diamond circles the SW kite of the
/// hexagon at the origin, whose flip is the NE square of `D_{1/2}`.
pub fn active_kites(d: &Diamond) -> Vec<Kite> {
    if d.is_empty() {
        return vec![kite_of(square_unchecked(LatticePoint::ORIGIN, Orientation::SW))];
    }
    let pair = active_pair(d.order());
    let mut kites: Vec<Kite> = (0..d.edges().len() as u32)
        .filter_map(|e| kite_containing(d.lattice_edge(e), pair))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    kites.sort_unstable();
    kites
}

/// Which of the five kite edges are matched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Pattern {
    tail: bool,
    ab: bool,
    ad: bool,
    dc: bool,
    bc: bool,
}

impl Pattern {
    fn case(self) -> Option<KiteCase> {
        let Pattern { tail, ab, ad, dc, bc } = self;
        match (tail, ab, ad, dc, bc) {
            (true, false, false, false, false) => Some(KiteCase::Creation),
            (false, false, true, false, false) | (false, false, false, true, false) => Some(KiteCase::ShortEdge),
            (true, false, false, false, true) | (true, true, false, false, false) => Some(KiteCase::LongEdge),
            (false, false, true, false, true) | (false, true, false, true, false) => Some(KiteCase::Annihilation),
            _ => None,
        }
    }
}

// Square edges come in boundary order b-a, a-d, d-c, c-b, where b is the
// center, d the corner and a, c the midpoints.
fn pattern_of(kite: &Kite, tail: bool, matched: impl Fn(LatticeEdge) -> bool) -> Pattern {
    let [ab, ad, dc, bc] = kite.square.edges().map(matched);
    Pattern { tail, ab, ad, dc, bc }
}

/// Case of a circled kite under `m`, counting its tail as matched when the
/// root lies outside the diamond.
pub fn classify_kite(d: &Diamond, kite: &Kite, m: &Matching) -> Result<KiteCase> {
    m.check_diamond(d)?;
    let root_inside = d.vertex_id(kite.root()).is_some();
    let matched = |e: LatticeEdge| d.edge_id(e).is_some_and(|id| m.contains(id));
    let tail = if root_inside { matched(kite.tail()) } else { true };
    let p = pattern_of(kite, tail, matched);
    p.case().ok_or_else(|| Error::Invariant(format!("kite {kite:?} has matched pattern {p:?}")))
}

/// Shuffles a perfect matching of `d` onto the diamond `next` of the
/// following order, drawing creation bits from `bits`.
pub fn shuffle_onto(d: &Diamond, m: &Matching, next: &Diamond, bits: &mut dyn BitSource) -> Result<(Matching, ShuffleTrace)> {
    if next.order() != d.order().next() {
        return Err(Error::Domain(format!("D_{} does not follow D_{}", next.order(), d.order())));
    }
    if !m.is_perfect(d)? {
        return Err(Error::Precondition("the shuffle needs a perfect matching".into()));
    }
    let pair = if d.is_empty() { OrientationPair::NortheastSouthwest } else { active_pair(d.order()) };
    let shift = pair.flip_shift();
    let kites = active_kites(d);
    let matched = |e: LatticeEdge| d.edge_id(e).is_some_and(|id| m.contains(id));

    let mut out: Vec<LatticeEdge> = Vec::with_capacity(next.vertices().len() / 2);
    let mut records = Vec::with_capacity(kites.len());
    let mut tails_added = 0;
    for kite in &kites {
        let tail_added = d.vertex_id(kite.root()).is_none();
        if tail_added {
            if d.vertex_id(kite.tail_end).is_some() {
                return Err(Error::Invariant(format!("tail of {kite:?} would end on a covered vertex")));
            }
            tails_added += 1;
        }
        let tail = tail_added || matched(kite.tail());
        let p = pattern_of(kite, tail, matched);
        let case = p.case().ok_or_else(|| Error::Invariant(format!("kite {kite:?} has matched pattern {p:?}")))?;

        let [a, c] = kite.square.midpoints;
        let b = kite.square.center;
        let (a1, c1) = (a + shift, c + shift);
        let flipped = kite.flipped();
        let d1 = flipped.square.center;
        let b1 = flipped.square.corner;
        let new_tail = LatticeEdge::sorted(b1, b + shift);
        let e = LatticeEdge::sorted;
        let mut choice = None;
        match case {
            KiteCase::Creation => {
                let bit = bits.next_bit();
                choice = Some(bit);
                if bit {
                    out.extend([e(a1, b1), e(c1, d1)]);
                } else {
                    out.extend([e(a1, d1), e(c1, b1)]);
                }
            }
            KiteCase::ShortEdge => out.push(if p.ad { e(b1, c1) } else { e(a1, b1) }),
            KiteCase::LongEdge => {
                out.push(if p.bc { e(a1, d1) } else { e(c1, d1) });
                out.push(new_tail);
            }
            KiteCase::Annihilation => out.push(new_tail),
        }
        records.push(KiteRecord { kite: *kite, case, choice, tail_added });
    }
    for id in m.edge_ids() {
        let edge = d.lattice_edge(id);
        if kite_containing(edge, pair).is_none() {
            out.push(edge.translate(shift));
        }
    }

    let ids = out
        .iter()
        .map(|&x| {
            next.edge_id(x)
                .ok_or_else(|| Error::Invariant(format!("shuffle produced {x}, which is not in D_{}", next.order())))
        })
        .collect::<Result<Vec<_>>>()?;
    let result = Matching::from_edge_ids(next, ids).map_err(|err| Error::Invariant(format!("shuffle output: {err}")))?;
    if !result.is_perfect(next)? {
        return Err(Error::Invariant(format!("shuffle output is not perfect on D_{}", next.order())));
    }
    let trace = ShuffleTrace { order_before: d.order(), order_after: next.order(), records, tails_added };
    Ok((result, trace))
}

/// One shuffle step, building the next diamond.
pub fn shuffle(d: &Diamond, m: &Matching, bits: &mut dyn BitSource) -> Result<(Diamond, Matching, ShuffleTrace)> {
    let next = build_diamond(d.order().next())?;
    let (m1, trace) = shuffle_onto(d, m, &next, bits)?;
    Ok((next, m1, trace))
}

/// Diamonds by order, built on first use and shared afterwards.
#[derive(Debug, Default)]
pub struct DiamondCache {
    diamonds: Vec<Option<Arc<Diamond>>>,
}

impl DiamondCache {
    pub fn new() -> DiamondCache {
        DiamondCache::default()
    }

    pub fn get(&mut self, m: Order) -> Result<Arc<Diamond>> {
        let h = m.halves() as usize;
        if self.diamonds.len() <= h {
            self.diamonds.resize(h + 1, None);
        }
        if let Some(d) = &self.diamonds[h] {
            return Ok(Arc::clone(d));
        }
        let d = Arc::new(build_diamond(m)?);
        self.diamonds[h] = Some(Arc::clone(&d));
        Ok(d)
    }
}

/// Grows a matching from the empty matching of `D_0` up to `D_m`. The bit
/// source for each step is made by `bits_for_step` from the step index
/// (twice the order the step starts from), and `observe` sees every step.
pub fn grow<B: BitSource>(
    cache: &mut DiamondCache,
    m: Order,
    mut bits_for_step: impl FnMut(u32) -> B,
    mut observe: impl FnMut(&ShuffleTrace, &Diamond, &Matching),
) -> Result<(Arc<Diamond>, Matching)> {
    let mut d = cache.get(Order::ZERO)?;
    let mut matching = Matching::empty(&d);
    for step in 0..m.halves() {
        let next = cache.get(Order::from_halves(step + 1))?;
        let mut bits = bits_for_step(step);
        let (m1, trace) = shuffle_onto(&d, &matching, &next, &mut bits)?;
        observe(&trace, &next, &m1);
        d = next;
        matching = m1;
    }
    Ok((d, matching))
}

/// A perfect matching of `D_m`, uniform over all of them as `seed` varies.
pub fn sample(m: Order, seed: u64) -> Result<(Arc<Diamond>, Matching)> {
    // Each diamond is only needed for one step; keep the cache small.
    let mut d = Arc::new(build_diamond(Order::ZERO)?);
    let mut matching = Matching::empty(&d);
    for step in 0..m.halves() {
        let (next, m1, _) = shuffle(&d, &matching, &mut SeededBits::new(seed, step))?;
        d = Arc::new(next);
        matching = m1;
    }
    Ok((d, matching))
}

/// A perfect matching of `d` obtained by shuffling with every creation bit zero.
pub fn some_perfect_matching(d: &Diamond) -> Result<Matching> {
    let mut cur = build_diamond(Order::ZERO)?;
    let mut matching = Matching::empty(&cur);
    for _ in 0..d.order().halves() {
        let (next, m1, _) = shuffle(&cur, &matching, &mut MaskBits::new(0))?;
        cur = next;
        matching = m1;
    }
    Matching::from_lattice_edges(d, matching.lattice_edges(&cur))
}
