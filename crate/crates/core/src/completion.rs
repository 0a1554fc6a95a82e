//! Simple `i`-completions: rewriting a balanced pair-set into one whose pairs
//! all lie inside one of the two half-cubes split by coordinate `i`, while
//! recording the edges needed to undo the rewrite on connectors.
//!
//! Pairs are processed in a fixed order: odd aligned pairs (step i), odd split
//! pairs (step ii), then the couples of the matching (steps iii to vi). Each
//! step that needs fresh vertices picks `γ` (and `γ'`) on a prescribed side
//! and of a prescribed parity, outside everything used so far.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypercube::{parity_bits, rho_bits, Vertex};
use crate::pairset::{build_matching_with, Matching, MergeEdge, Pair, PairSet, PairSetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionStep {
    pub kind: StepKind,
    /// Indices into the input pair-set.
    pub consumed: Vec<usize>,
    pub chosen: Vec<Vertex>,
    pub produced: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletionTrace {
    pub coord: usize,
    pub input: PairSet,
    pub matching: Matching,
    pub steps: Vec<CompletionStep>,
    pub output: PairSet,
    /// Edges `(β, β')` whose merges turn `output` back into `input`.
    pub merge_script: Vec<MergeEdge>,
}

impl CompletionTrace {
    /// Apply the merge script to the output; yields the input on a valid trace.
    pub fn replay(&self) -> Result<PairSet, PairSetError> {
        let mut cur = self.output.clone();
        for &MergeEdge(u, v) in &self.merge_script {
            let p = cur.index_of_vertex(u).ok_or(PairSetError::NotInPair(u))?;
            let q = cur.index_of_vertex(v).ok_or(PairSetError::NotInPair(v))?;
            cur = cur.imply_step(p, q, u, v)?.0;
        }
        Ok(cur)
    }

    /// `ρ_{i=ℓ}(B)` for the output `B`, or `None` when it is empty or all-degenerate.
    pub fn half(&self, side: u8) -> Option<PairSet> {
        let proj = self.output.rho_set(self.coord, side).ok()?;
        if proj.is_empty() {
            return None;
        }
        proj.into_pair_set().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error("pair-set is empty")]
    Empty,
    #[error("coordinate {0} out of range")]
    BadCoordinate(usize),
    #[error("pair-set is unbalanced (chi = {0})")]
    Unbalanced(i32),
    #[error("invalid matching: {0}")]
    BadMatching(String),
    #[error("no admissible vertex for step {step:?} on pairs {pairs:?}")]
    Failure { step: StepKind, pairs: Vec<usize> },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

impl From<PairSetError> for CompletionError {
    fn from(e: PairSetError) -> Self {
        match e {
            PairSetError::Unbalanced(c) => CompletionError::Unbalanced(c),
            other => CompletionError::BadMatching(other.to_string()),
        }
    }
}

/// Which side receives the two even pairs in steps (v) and (vi).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SidePolicy {
    /// Keep the number of even pairs on the two sides level.
    #[default]
    Balance,
    Fixed(u8),
}

/// How hard to avoid encompassed vertices inside either half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EncFilter {
    #[default]
    Off,
    /// Prefer safe vertices, accept unsafe ones when nothing else is left.
    Soft,
    /// Only safe vertices; fail otherwise.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CompletionOptions {
    pub seed: u64,
    pub side: SidePolicy,
    pub enc: EncFilter,
    /// Try `γ` next to an endpoint first, so that new pairs tend to be edges.
    pub prefer_edges: bool,
}

/// The quantities `k0, k1, k2` that control the size of a completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeCounts {
    pub k0: usize,
    pub k1: usize,
    pub k2: usize,
}

impl SizeCounts {
    pub fn of(a: &PairSet, i: usize, r: &Matching) -> SizeCounts {
        let p = a.pairs();
        let k0 = p.iter().filter(|q| q.is_odd() && !q.is_split(i)).count();
        let (mut k1, mut k2) = (0, 0);
        for &(x, y) in &r.couples {
            match couple_shape(&p[x], &p[y], i) {
                Shape::SameSide(_) => k1 += 1,
                Shape::ThreeOne(_) => k2 += 1,
                _ => {}
            }
        }
        SizeCounts { k0, k1, k2 }
    }

    /// `|B|` for every completion built from this matching.
    pub fn predicted_size(&self, a: &PairSet) -> usize {
        2 * a.len() - self.k0 - 2 * self.k1 - self.k2
    }

    /// Whether success is guaranteed regardless of the choices made.
    pub fn guaranteed(&self, a: &PairSet) -> bool {
        let room = 1u64 << (a.dim().saturating_sub(2));
        let need = (2 * a.len()) as u64 - (self.k0 + 2 * self.k1 + self.k2) as u64;
        need <= room || (a.is_odd() && (2 * a.len() - self.k0) as u64 <= room + 1)
    }
}

/// Per-side tallies `m_{o,k}`, `m_{e,k}`, `m_{3,k}` of a pair-set and matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SideCounts {
    pub m_o: [usize; 2],
    pub m_e: [usize; 2],
    pub m_3: [usize; 2],
}

impl SideCounts {
    pub fn of(a: &PairSet, i: usize, r: &Matching) -> SideCounts {
        let p = a.pairs();
        let mut c = SideCounts { m_o: [0; 2], m_e: [0; 2], m_3: [0; 2] };
        for q in p.iter().filter(|q| q.is_odd() && !q.is_split(i)) {
            c.m_o[q.a().coord(i) as usize] += 1;
        }
        for &(x, y) in &r.couples {
            match couple_shape(&p[x], &p[y], i) {
                Shape::SameSide(k) => c.m_e[k as usize] += 1,
                Shape::ThreeOne(k) => c.m_3[k as usize] += 1,
                _ => {}
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// Both pairs aligned on side `k`.
    SameSide(u8),
    /// Three of the four vertices on side `k`.
    ThreeOne(u8),
    /// Aligned on opposite sides.
    Opposite,
    BothSplit,
}

fn couple_shape(p: &Pair, q: &Pair, i: usize) -> Shape {
    match (p.is_split(i), q.is_split(i)) {
        (false, false) if p.a().coord(i) == q.a().coord(i) => Shape::SameSide(p.a().coord(i)),
        (false, false) => Shape::Opposite,
        (true, true) => Shape::BothSplit,
        (false, true) => Shape::ThreeOne(p.a().coord(i)),
        (true, false) => Shape::ThreeOne(q.a().coord(i)),
    }
}

/// Run the construction with an explicit matching.
pub fn complete(a: &PairSet, i: usize, r: &Matching, seed: u64) -> Result<CompletionTrace, CompletionError> {
    complete_with(a, i, r, &CompletionOptions { seed, ..Default::default() })
}

/// Enc-preserving completion of an odd pair-set: neither half of the result
/// encompasses a vertex it does not contain.
pub fn complete_enc_preserving(a: &PairSet, i: usize, seed: u64) -> Result<CompletionTrace, CompletionError> {
    let n = a.dim() as usize;
    check_basic(a, i)?;
    if !a.is_odd() {
        return Err(CompletionError::PreconditionViolated("pair-set is not odd".into()));
    }
    let (n0, n1) = a.sigma(i);
    if n < 2 || (2 * a.len() - n0 - n1) as u64 >= 1u64 << (n - 2) {
        return Err(CompletionError::PreconditionViolated(format!("2|A| - n0 - n1 = {} is too large", 2 * a.len() - n0 - n1)));
    }
    if a.len() - n0 > n - 1 || a.len() - n1 > n - 1 {
        return Err(CompletionError::PreconditionViolated(format!("|A| - n_j exceeds n - 1 for sigma = ({n0}, {n1})")));
    }
    let verts = a.vertices();
    for side in 0..2u8 {
        let half: HashSet<u32> =
            verts.iter().filter(|v| v.coord(i) == side).map(|v| rho_bits(v.bits(), i)).collect();
        let enc: Vec<u32> = crate::pairset::enco_bits(&half, a.dim() - 1).into_iter().filter(|x| !half.contains(x)).collect();
        if !enc.is_empty() {
            return Err(CompletionError::PreconditionViolated(format!("side {side} already encompasses a vertex")));
        }
    }
    let opts = CompletionOptions { seed, enc: EncFilter::Strict, ..Default::default() };
    complete_with(a, i, &Matching::default(), &opts)
}

/// Completion in which steps (v) and (vi) all send their even pairs to side `k`.
pub fn complete_parity_targeted(
    a: &PairSet,
    i: usize,
    r: &Matching,
    k: u8,
    seed: u64,
) -> Result<CompletionTrace, CompletionError> {
    check_basic(a, i)?;
    let room = 1u64 << (a.dim().saturating_sub(2));
    if 2 * a.len() as u64 > room {
        return Err(CompletionError::PreconditionViolated(format!("2|A| = {} exceeds 2^(n-2) = {room}", 2 * a.len())));
    }
    let p = a.pairs();
    for &(x, y) in &r.couples {
        if couple_shape(&p[x], &p[y], i) == Shape::Opposite {
            let far = if p[x].a().coord(i) == k { &p[y] } else { &p[x] };
            if far.is_degenerate() {
                return Err(CompletionError::PreconditionViolated(format!(
                    "couple ({x}, {y}) has a degenerate pair on side {}",
                    1 - k
                )));
            }
        }
    }
    complete_with(a, i, r, &CompletionOptions { seed, side: SidePolicy::Fixed(k & 1), ..Default::default() })
}

/// Completion with a random matching drawn from the same seed.
pub fn complete_random(a: &PairSet, i: usize, opts: &CompletionOptions) -> Result<CompletionTrace, CompletionError> {
    check_basic(a, i)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6d61_7463_6869_6e67);
    let r = build_matching_with(a, i, &mut rng)?;
    complete_with(a, i, &r, opts)
}

fn check_basic(a: &PairSet, i: usize) -> Result<(), CompletionError> {
    if a.is_empty() {
        return Err(CompletionError::Empty);
    }
    if i >= a.dim() as usize || a.dim() < 2 {
        return Err(CompletionError::BadCoordinate(i));
    }
    if !a.is_balanced() {
        return Err(CompletionError::Unbalanced(a.chi()));
    }
    Ok(())
}

pub fn complete_with(
    a: &PairSet,
    i: usize,
    r: &Matching,
    opts: &CompletionOptions,
) -> Result<CompletionTrace, CompletionError> {
    check_basic(a, i)?;
    r.validate(a, i)?;
    let mut st = State {
        dim: a.dim(),
        i,
        occupied: a.vertex_bits(),
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        opts: *opts,
        even_on: [0, 0],
    };
    let pairs = a.pairs();
    let mut steps = Vec::with_capacity(a.len());
    let mut out: Vec<Pair> = Vec::with_capacity(2 * a.len());
    let mut script = Vec::new();

    for (x, p) in pairs.iter().enumerate() {
        if p.is_odd() && !p.is_split(i) {
            out.push(*p);
            steps.push(CompletionStep { kind: StepKind::I, consumed: vec![x], chosen: vec![], produced: vec![*p] });
        }
    }
    for (x, p) in pairs.iter().enumerate() {
        if !(p.is_odd() && p.is_split(i)) {
            continue;
        }
        let (al, be) = (p.a(), p.b());
        let side = al.coord(i);
        let g = st
            .pick(side, -al.parity(), &[al.bits(), be.bits() ^ (1 << i)])
            .ok_or(CompletionError::Failure { step: StepKind::Ii, pairs: vec![x] })?;
        st.occupy(g);
        let (gv, gx) = (st.vx(g), st.vx(g ^ (1 << i)));
        let produced = vec![Pair::ordered(al, gv), Pair::ordered(gx, be)];
        out.extend(&produced);
        script.push(MergeEdge(gv, gx));
        steps.push(CompletionStep { kind: StepKind::Ii, consumed: vec![x], chosen: vec![gv], produced });
    }
    for &(x, y) in &r.couples {
        let (p, q) = (pairs[x], pairs[y]);
        let step = match couple_shape(&p, &q, i) {
            Shape::SameSide(_) => {
                out.extend([p, q]);
                if !p.is_degenerate() || !q.is_degenerate() {
                    st.even_on[p.a().coord(i) as usize] += 2;
                }
                CompletionStep { kind: StepKind::Iii, consumed: vec![x, y], chosen: vec![], produced: vec![p, q] }
            }
            Shape::ThreeOne(_) => {
                let (aligned, split) = if p.is_split(i) { (q, p) } else { (p, q) };
                let side = aligned.a().coord(i);
                let (a2, b2) = if split.a().coord(i) == side { (split.a(), split.b()) } else { (split.b(), split.a()) };
                let g = st
                    .pick(side, a2.parity(), &[b2.bits() ^ (1 << i)])
                    .ok_or(CompletionError::Failure { step: StepKind::Iv, pairs: vec![x, y] })?;
                st.occupy(g);
                st.even_on[side as usize] += 2;
                let (gv, gx) = (st.vx(g), st.vx(g ^ (1 << i)));
                let produced = vec![aligned, Pair::ordered(a2, gv), Pair::ordered(gx, b2)];
                out.extend(&produced);
                script.push(MergeEdge(gv, gx));
                CompletionStep { kind: StepKind::Iv, consumed: vec![x, y], chosen: vec![gv], produced }
            }
            Shape::Opposite => {
                // The kept pair's side receives the two even pairs.
                let k = st.choose_side(&[(!q.is_degenerate()).then_some(p.a().coord(i)), (!p.is_degenerate()).then_some(q.a().coord(i))]);
                let Some(k) = k else {
                    return Err(CompletionError::Failure { step: StepKind::V, pairs: vec![x, y] });
                };
                let (kept, moved) = if p.a().coord(i) == k { (p, q) } else { (q, p) };
                if moved.is_degenerate() {
                    return Err(CompletionError::PreconditionViolated(format!(
                        "couple ({x}, {y}) needs its even pairs on side {k} but the other pair is degenerate"
                    )));
                }
                let side = 1 - k;
                let (a2, b2) = (moved.a(), moved.b());
                let fail = || CompletionError::Failure { step: StepKind::V, pairs: vec![x, y] };
                let g = st.pick(side, -a2.parity(), &[a2.bits()]).ok_or_else(fail)?;
                st.occupy(g);
                let g2 = st.pick(side, -a2.parity(), &[b2.bits()]).ok_or_else(fail)?;
                st.occupy(g2);
                st.even_on[k as usize] += 2;
                let (gv, gx, g2v, g2x) = (st.vx(g), st.vx(g ^ (1 << i)), st.vx(g2), st.vx(g2 ^ (1 << i)));
                let produced = vec![kept, Pair::ordered(a2, gv), Pair::ordered(b2, g2v), Pair::ordered(gx, g2x)];
                out.extend(&produced);
                script.push(MergeEdge(gv, gx));
                script.push(MergeEdge(g2v, g2x));
                CompletionStep { kind: StepKind::V, consumed: vec![x, y], chosen: vec![gv, g2v], produced }
            }
            Shape::BothSplit => {
                let s = st.choose_side(&[Some(0), Some(1)]).expect("both sides allowed");
                let orient = |t: Pair| if t.a().coord(i) == s { (t.a(), t.b()) } else { (t.b(), t.a()) };
                let ((a1, b1), (a2, b2)) = (orient(p), orient(q));
                let fail = || CompletionError::Failure { step: StepKind::Vi, pairs: vec![x, y] };
                let g = st.pick(s, a1.parity(), &[b1.bits() ^ (1 << i)]).ok_or_else(fail)?;
                st.occupy(g);
                let g2 = st.pick(s, a2.parity(), &[b2.bits() ^ (1 << i)]).ok_or_else(fail)?;
                st.occupy(g2);
                st.even_on[s as usize] += 2;
                let (gv, gx, g2v, g2x) = (st.vx(g), st.vx(g ^ (1 << i)), st.vx(g2), st.vx(g2 ^ (1 << i)));
                let produced =
                    vec![Pair::ordered(a1, gv), Pair::ordered(a2, g2v), Pair::ordered(gx, b1), Pair::ordered(g2x, b2)];
                out.extend(&produced);
                script.push(MergeEdge(gv, gx));
                script.push(MergeEdge(g2v, g2x));
                CompletionStep { kind: StepKind::Vi, consumed: vec![x, y], chosen: vec![gv, g2v], produced }
            }
        };
        steps.push(step);
    }
    let output = PairSet::new(a.dim(), out).expect("completion keeps pairs disjoint");
    Ok(CompletionTrace { coord: i, input: a.clone(), matching: r.clone(), steps, output, merge_script: script })
}

struct State {
    dim: u8,
    i: usize,
    occupied: HashSet<u32>,
    rng: ChaCha8Rng,
    opts: CompletionOptions,
    even_on: [usize; 2],
}

/// Above this dimension candidates are only sampled, never scanned.
const SCAN_DIM: u8 = 20;
const SAMPLES: usize = 96;

impl State {
    fn vx(&self, b: u32) -> Vertex {
        Vertex::from_raw(b, self.dim)
    }

    fn occupy(&mut self, g: u32) {
        self.occupied.insert(g);
        self.occupied.insert(g ^ (1 << self.i));
    }

    fn choose_side(&mut self, allowed: &[Option<u8>]) -> Option<u8> {
        let opts: Vec<u8> = allowed.iter().flatten().copied().collect();
        match self.opts.side {
            SidePolicy::Fixed(k) => opts.contains(&k).then_some(k).or_else(|| opts.first().copied()),
            SidePolicy::Balance => {
                let best = opts.iter().map(|&k| self.even_on[k as usize]).min()?;
                let ties: Vec<u8> = opts.into_iter().filter(|&k| self.even_on[k as usize] == best).collect();
                ties.choose(&mut self.rng).copied()
            }
        }
    }

    fn admissible(&self, g: u32, side: u8, parity: i32) -> bool {
        (g >> self.i) & 1 == side as u32
            && parity_bits(g) == parity
            && !self.occupied.contains(&g)
            && !self.occupied.contains(&(g ^ (1 << self.i)))
    }

    /// Would occupying `g` and `g ⊕ e_i` create an encompassed vertex in either half?
    fn hazardous(&self, g: u32) -> bool {
        let i = self.i;
        let added = [g, g ^ (1 << i)];
        let occ = |x: u32| self.occupied.contains(&x) || added.contains(&x);
        added.iter().any(|&v| {
            (0..self.dim as usize).filter(|&j| j != i).any(|j| {
                let eta = v ^ (1 << j);
                !occ(eta) && (0..self.dim as usize).filter(|&m| m != i).all(|m| occ(eta ^ (1 << m)))
            })
        })
    }

    /// A vertex `γ` with `γ(i) = side`, `χ(γ) = parity`, both `γ` and `γ ⊕ e_i` free.
    fn pick(&mut self, side: u8, parity: i32, anchors: &[u32]) -> Option<u32> {
        let mut fallback = None;
        let mut accept = |st: &State, g: u32| -> bool {
            if !st.admissible(g, side, parity) {
                return false;
            }
            if st.opts.enc == EncFilter::Off || !st.hazardous(g) {
                return true;
            }
            fallback.get_or_insert(g);
            false
        };
        if self.opts.prefer_edges {
            let mut near: Vec<u32> = anchors
                .iter()
                .flat_map(|&a| (0..self.dim as usize).filter(|&j| j != self.i).map(move |j| a ^ (1 << j)))
                .collect();
            near.shuffle(&mut self.rng);
            if let Some(&g) = near.iter().find(|&&g| accept(self, g)) {
                return Some(g);
            }
        }
        let n = self.dim as usize;
        let fix = if self.i == 0 { 1 } else { 0 };
        for _ in 0..SAMPLES {
            let mut g: u32 = self.rng.gen::<u32>() & mask(n);
            g = (g & !(1 << self.i)) | ((side as u32) << self.i);
            if parity_bits(g) != parity && n > 1 {
                g ^= 1 << fix;
            }
            if accept(self, g) {
                return Some(g);
            }
        }
        if self.dim <= SCAN_DIM {
            let total = 1u32 << n;
            let start = self.rng.gen_range(0..total);
            for off in 0..total {
                let g = start.wrapping_add(off) & mask(n);
                if accept(self, g) {
                    return Some(g);
                }
            }
        }
        match self.opts.enc {
            EncFilter::Soft => fallback,
            _ => None,
        }
    }
}

fn mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}
