//! Lazy construction trees describing tilings of (regions of) product spaces.
//!
//! A [`Construction`] is an immutable, shareable DAG of nodes. Every node
//! lives in a frame given by its [`Signature`] and answers [`Construction::locate`]
//! queries without materializing its siblings, so trees for spaces with
//! astronomically many points stay cheap to query.

pub(crate) mod certificate;
mod verify;

pub use certificate::{Certificate, CertificateMode, Meta, Payload};
pub use verify::{
    check_local, verify_construction, verify_exhaustive, verify_sampled, verify_sampled_in,
    SampleReport, VerifyReport, Violation,
};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, LocateError, Result};
use crate::general::{Blueprint, DenserTiler, Holes, RemovedCset, UseCset};
use crate::space::{
    cover, project_tile, reduce, AxisMap, Block, Placement, Point, PointIter, Projection,
    Signature, TileSpec,
};

/// Default cap on the number of points a materialization may touch.
pub const DEFAULT_LIMIT: u128 = 10_000_000;

pub type LocateResult = std::result::Result<Placement, LocateError>;

#[derive(Clone)]
pub struct Construction(Arc<Node>);

pub struct Node {
    sig: Arc<Signature>,
    kind: NodeKind,
}

pub enum NodeKind {
    /// A finite list of placements; the region is the union of their covers.
    Explicit(Explicit),
    /// Partition by the value of one block; children live in the frame
    /// without that block.
    Slice(Slice),
    /// Block permutation plus translation of a child in an isomorphic frame.
    Embed(Embed),
    /// Children with pairwise disjoint regions.
    Union(Vec<Construction>),
    /// A child with some of its placements removed (they become holes).
    Minus(Minus),
    /// Refines copies of a dense set by an inner tiling, factor by factor.
    Compose(Compose),
    /// Pulls a tiling back along per-block projections.
    Lift(Lift),
    /// The empty tiling: every point is a hole.
    Void,
    RemovedCset(RemovedCset),
    UseCset(UseCset),
    Blueprint(Blueprint),
    DenserTiler(DenserTiler),
    Holes(Holes),
}

pub struct Explicit {
    pub placements: Vec<Placement>,
    /// Uncovered points are holes rather than outside the region.
    pub holes: bool,
    index: OnceLock<HashMap<Point, usize>>,
}

pub struct Slice {
    pub block: usize,
    pub arms: BTreeMap<Point, Construction>,
    pub default: Option<Construction>,
}

pub struct Embed {
    pub child: Construction,
    /// `perm[j]` is the parent block receiving child block `j`.
    pub perm: Vec<usize>,
    /// Translation in parent coordinates.
    pub shift: Point,
}

pub struct Minus {
    pub child: Construction,
    pub removed: Vec<Placement>,
    set: HashSet<Placement>,
}

pub struct Compose {
    pub outer: Construction,
    pub inner: Construction,
    /// Outer blocks that host copies of the dense set, in factor order.
    pub factors: Vec<usize>,
    /// Inner blocks whose copies are refined through the outer tiling.
    pub refined: Vec<bool>,
    /// Natural block index (kept outer blocks, then each factor's inner
    /// blocks) to parent block index.
    pub layout: Vec<usize>,
    kept: Vec<usize>,
}

pub struct Lift {
    pub child: Construction,
    pub maps: Vec<Option<LiftMap>>,
}

/// How one block is lifted: projection and the preimage of each image point.
pub struct LiftMap {
    pub projection: Projection,
    pub tile: Arc<TileSpec>,
    preimage: HashMap<Point, Point>,
}

impl Construction {
    fn new(sig: Arc<Signature>, kind: NodeKind) -> Self {
        Construction(Arc::new(Node { sig, kind }))
    }

    pub(crate) fn from_kind(sig: Arc<Signature>, kind: NodeKind) -> Self {
        Construction::new(sig, kind)
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.0.sig
    }

    pub fn kind(&self) -> &NodeKind {
        &self.0.kind
    }

    pub(crate) fn ptr(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind() {
            NodeKind::Explicit(_) => "explicit",
            NodeKind::Slice(_) => "slice",
            NodeKind::Embed(_) => "embed",
            NodeKind::Union(_) => "union",
            NodeKind::Minus(_) => "minus",
            NodeKind::Compose(_) => "compose",
            NodeKind::Lift(_) => "lift",
            NodeKind::Void => "void",
            NodeKind::RemovedCset(_) => "removed_cset",
            NodeKind::UseCset(_) => "use_cset",
            NodeKind::Blueprint(_) => "blueprint",
            NodeKind::DenserTiler(_) => "denser",
            NodeKind::Holes(_) => "holes",
        }
    }

    pub fn explicit(sig: Arc<Signature>, placements: Vec<Placement>) -> Self {
        Construction::explicit_with(sig, placements, false)
    }

    /// Explicit placements whose uncovered points count as holes.
    pub fn explicit_holed(sig: Arc<Signature>, placements: Vec<Placement>) -> Self {
        Construction::explicit_with(sig, placements, true)
    }

    pub(crate) fn explicit_with(sig: Arc<Signature>, mut placements: Vec<Placement>, holes: bool) -> Self {
        for pl in &mut placements {
            sig.reduce_point(&mut pl.offset);
        }
        let e = Explicit { placements, holes, index: OnceLock::new() };
        Construction::new(sig, NodeKind::Explicit(e))
    }

    pub fn void(sig: Arc<Signature>) -> Self {
        Construction::new(sig, NodeKind::Void)
    }

    /// Partition on the values of `block`. Children must live in the frame
    /// obtained by deleting that block.
    pub fn slice(
        sig: Arc<Signature>,
        block: usize,
        arms: BTreeMap<Point, Construction>,
        default: Option<Construction>,
    ) -> Result<Self> {
        let child_sig = sig.without_block(block);
        for c in arms.values().chain(default.iter()) {
            if **c.sig() != child_sig {
                return Err(Error::ShapeMismatch("slice child frame".into()));
            }
        }
        Ok(Construction::new(sig, NodeKind::Slice(Slice { block, arms, default })))
    }

    /// Re-embeds `child` with blocks permuted by `perm` and translated by
    /// `shift` (parent coordinates).
    pub fn embed(child: Construction, perm: Vec<usize>, shift: Point) -> Result<Self> {
        let csig = child.sig().clone();
        let n = csig.num_blocks();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&j| j >= n || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::ShapeMismatch("embed table is not a bijection".into()));
        }
        let mut blocks = vec![None; n];
        for (j, &pj) in perm.iter().enumerate() {
            blocks[pj] = Some(csig.block(j).clone());
        }
        let sig = Signature::new(blocks.into_iter().map(Option::unwrap).collect())?;
        if shift.len() != sig.num_axes() {
            return Err(Error::ShapeMismatch("embed shift length".into()));
        }
        let mut shift = shift;
        sig.reduce_point(&mut shift);
        Ok(Construction::new(Arc::new(sig), NodeKind::Embed(Embed { child, perm, shift })))
    }

    pub fn union(sig: Arc<Signature>, children: Vec<Construction>) -> Result<Self> {
        if children.iter().any(|c| c.sig() != &sig && **c.sig() != *sig) {
            return Err(Error::ShapeMismatch("union child frame".into()));
        }
        Ok(Construction::new(sig, NodeKind::Union(children)))
    }

    pub fn minus(child: Construction, removed: Vec<Placement>) -> Self {
        let set = removed.iter().cloned().collect();
        Construction::new(child.sig().clone(), NodeKind::Minus(Minus { child, removed, set }))
    }

    /// The unique placement whose cover contains `p`.
    pub fn locate(&self, p: &[i64]) -> LocateResult {
        let sig = &self.0.sig;
        match &self.0.kind {
            NodeKind::Explicit(e) => {
                let index = e.index.get_or_init(|| {
                    let mut m = HashMap::new();
                    for (i, pl) in e.placements.iter().enumerate() {
                        for q in cover(pl, sig) {
                            m.entry(q).or_insert(i);
                        }
                    }
                    m
                });
                index
                    .get(p)
                    .map(|&i| e.placements[i].clone())
                    .ok_or(if e.holes { LocateError::PointInHole } else { LocateError::OutsideRegion })
            }
            NodeKind::Slice(s) => {
                let axes = sig.axes(s.block);
                let value = &p[axes.clone()];
                let child = s
                    .arms
                    .get(value)
                    .or(s.default.as_ref())
                    .ok_or(LocateError::OutsideRegion)?;
                let mut q = Vec::with_capacity(p.len() - axes.len());
                q.extend_from_slice(&p[..axes.start]);
                q.extend_from_slice(&p[axes.end..]);
                let pl = child.locate(&q)?;
                let mut offset = Vec::with_capacity(p.len());
                offset.extend_from_slice(&pl.offset[..axes.start]);
                offset.extend_from_slice(value);
                offset.extend_from_slice(&pl.offset[axes.start..]);
                let block = if pl.block >= s.block { pl.block + 1 } else { pl.block };
                Ok(Placement::new(block, offset))
            }
            NodeKind::Embed(e) => {
                let csig = e.child.sig();
                let mut q = vec![0; p.len()];
                for (j, &pj) in e.perm.iter().enumerate() {
                    for (ca, pa) in csig.axes(j).zip(sig.axes(pj)) {
                        q[ca] = reduce(p[pa] - e.shift[pa], csig.moduli()[ca]);
                    }
                }
                let pl = e.child.locate(&q)?;
                let mut offset = vec![0; p.len()];
                for (j, &pj) in e.perm.iter().enumerate() {
                    for (ca, pa) in csig.axes(j).zip(sig.axes(pj)) {
                        offset[pa] = reduce(pl.offset[ca] + e.shift[pa], sig.moduli()[pa]);
                    }
                }
                Ok(Placement::new(e.perm[pl.block], offset))
            }
            NodeKind::Union(children) => {
                let mut err = LocateError::OutsideRegion;
                for c in children {
                    match c.locate(p) {
                        Ok(pl) => return Ok(pl),
                        Err(LocateError::PointInHole) => err = LocateError::PointInHole,
                        Err(_) => {}
                    }
                }
                Err(err)
            }
            NodeKind::Minus(m) => {
                let pl = m.child.locate(p)?;
                if m.set.contains(&pl) {
                    Err(LocateError::PointInHole)
                } else {
                    Ok(pl)
                }
            }
            NodeKind::Compose(c) => c.locate(sig, p),
            NodeKind::Lift(l) => l.locate(p),
            NodeKind::Void => Err(LocateError::PointInHole),
            NodeKind::RemovedCset(n) => n.locate(p),
            NodeKind::UseCset(_) => UseCset::locate_chain(self, p),
            NodeKind::Blueprint(n) => n.locate(p),
            NodeKind::DenserTiler(n) => n.locate(p),
            NodeKind::Holes(n) => n.locate(p),
        }
    }

    /// Like [`Construction::locate`] but accepts unreduced points.
    pub fn locate_any(&self, p: &[i64]) -> LocateResult {
        let mut q = p.to_vec();
        self.sig().reduce_point(&mut q);
        self.locate(&q)
    }

    /// Number of points in one fundamental domain of the frame, if finite.
    pub fn domain_size(&self) -> Option<u128> {
        match self.kind() {
            NodeKind::Lift(l) => l.child.domain_size(),
            _ => self.sig().finite_size(),
        }
    }

    /// Period of every axis: the modulus of cyclic axes, the lifted modulus
    /// of lifted axes, `None` for free axes without a known period.
    pub fn periods(&self) -> Vec<Option<i64>> {
        match self.kind() {
            NodeKind::Lift(l) => {
                let csig = l.child.sig();
                let mut out = Vec::with_capacity(self.sig().num_axes());
                for (j, m) in l.maps.iter().enumerate() {
                    let sub = l.child.periods();
                    for (i, a) in csig.axes(j).enumerate() {
                        let lifted = match m {
                            Some(m) => match m.projection.axes[i] {
                                AxisMap::Reduce(k) => Some(k),
                                AxisMap::Identity => sub[a],
                            },
                            None => sub[a],
                        };
                        out.push(lifted);
                    }
                }
                out
            }
            _ => self.sig().moduli().to_vec(),
        }
    }

    /// Complete placement list of one fundamental domain, sorted by
    /// `(block, offset)`.
    pub fn materialize(&self, limit: u128) -> Result<Vec<Placement>> {
        let size = self.domain_size().ok_or(Error::LimitExceeded { points: u128::MAX, limit })?;
        if size > limit {
            return Err(Error::LimitExceeded { points: size, limit });
        }
        let mut memo = HashMap::new();
        let mut out = self.collect(&mut memo)?;
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn collect(&self, memo: &mut HashMap<*const Node, Arc<Vec<Placement>>>) -> Result<Vec<Placement>> {
        if let Some(v) = memo.get(&self.ptr()) {
            return Ok(v.as_ref().clone());
        }
        let sig = self.sig();
        let out = match self.kind() {
            NodeKind::Explicit(e) => e.placements.clone(),
            NodeKind::Void => Vec::new(),
            NodeKind::Slice(s) => {
                let axes = sig.axes(s.block);
                let block = sig.block(s.block);
                let values: Vec<Point> = if s.default.is_some() {
                    let m: Option<Vec<i64>> = block.moduli.iter().copied().collect();
                    PointIter::new(m.ok_or(Error::LimitExceeded { points: u128::MAX, limit: 0 })?)
                        .collect()
                } else {
                    s.arms.keys().cloned().collect()
                };
                let mut out = Vec::new();
                for v in values {
                    let Some(child) = s.arms.get(&v).or(s.default.as_ref()) else { continue };
                    for pl in child.collect(memo)? {
                        let mut offset = Vec::with_capacity(sig.num_axes());
                        offset.extend_from_slice(&pl.offset[..axes.start]);
                        offset.extend_from_slice(&v);
                        offset.extend_from_slice(&pl.offset[axes.start..]);
                        let b = if pl.block >= s.block { pl.block + 1 } else { pl.block };
                        out.push(Placement::new(b, offset));
                    }
                }
                out
            }
            NodeKind::Embed(e) => {
                let csig = e.child.sig();
                e.child
                    .collect(memo)?
                    .into_iter()
                    .map(|pl| {
                        let mut offset = vec![0; sig.num_axes()];
                        for (j, &pj) in e.perm.iter().enumerate() {
                            for (ca, pa) in csig.axes(j).zip(sig.axes(pj)) {
                                offset[pa] = reduce(pl.offset[ca] + e.shift[pa], sig.moduli()[pa]);
                            }
                        }
                        Placement::new(e.perm[pl.block], offset)
                    })
                    .collect()
            }
            NodeKind::Union(children) => {
                let mut out = Vec::new();
                for c in children {
                    out.extend(c.collect(memo)?);
                }
                out
            }
            NodeKind::Minus(m) => m
                .child
                .collect(memo)?
                .into_iter()
                .filter(|pl| !m.set.contains(pl))
                .collect(),
            // Lifted offsets coincide with the quotient offsets taken as
            // integers in the fundamental box.
            NodeKind::Lift(l) => l.child.collect(memo)?,
            _ => self.collect_by_locate()?,
        };
        memo.insert(self.ptr(), Arc::new(out.clone()));
        Ok(out)
    }

    fn collect_by_locate(&self) -> Result<Vec<Placement>> {
        if self.sig().finite_size().is_none() {
            return Err(Error::LimitExceeded { points: u128::MAX, limit: 0 });
        }
        let mut set = std::collections::BTreeSet::new();
        for p in self.sig().points() {
            if let Ok(pl) = self.locate(&p) {
                set.insert(pl);
            }
        }
        Ok(set.into_iter().collect())
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(c) = stack.pop() {
            if !seen.insert(c.ptr()) {
                continue;
            }
            stack.extend(c.children());
        }
        seen.len()
    }

    pub fn children(&self) -> Vec<Construction> {
        match self.kind() {
            NodeKind::Slice(s) => s.arms.values().cloned().chain(s.default.clone()).collect(),
            NodeKind::Embed(e) => vec![e.child.clone()],
            NodeKind::Union(c) => c.clone(),
            NodeKind::Minus(m) => vec![m.child.clone()],
            NodeKind::Compose(c) => vec![c.outer.clone(), c.inner.clone()],
            NodeKind::Lift(l) => vec![l.child.clone()],
            NodeKind::UseCset(u) => vec![u.input.clone()],
            _ => Vec::new(),
        }
    }
}

impl fmt::Debug for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Construction({}, {} axes)", self.kind_name(), self.sig().num_axes())
    }
}

impl Compose {
    fn locate(&self, sig: &Signature, p: &[i64]) -> LocateResult {
        let osig = self.outer.sig();
        let isig = self.inner.sig();
        let n_inner = isig.num_blocks();
        let e = self.kept.len();
        let mut outer_pt = vec![0; osig.num_axes()];
        for (n, &ob) in self.kept.iter().enumerate() {
            let pb = self.layout[n];
            for (oa, pa) in osig.axes(ob).zip(sig.axes(pb)) {
                outer_pt[oa] = p[pa];
            }
        }
        let mut inner_pt = vec![0; isig.num_axes()];
        let mut refined_at = Vec::with_capacity(self.factors.len());
        for (j, &ob) in self.factors.iter().enumerate() {
            let base = e + j * n_inner;
            for beta in 0..n_inner {
                let pb = self.layout[base + beta];
                for (ia, pa) in isig.axes(beta).zip(sig.axes(pb)) {
                    inner_pt[ia] = p[pa];
                }
            }
            let ipl = self.inner.locate(&inner_pt)?;
            if !self.refined[ipl.block] {
                let mut offset = p.to_vec();
                for beta in 0..n_inner {
                    let pb = self.layout[base + beta];
                    for (ia, pa) in isig.axes(beta).zip(sig.axes(pb)) {
                        offset[pa] = ipl.offset[ia];
                    }
                }
                return Ok(Placement::new(self.layout[base + ipl.block], offset));
            }
            for (ia, oa) in isig.axes(ipl.block).zip(osig.axes(ob)) {
                outer_pt[oa] = reduce(inner_pt[ia] - ipl.offset[ia], osig.moduli()[oa]);
            }
            refined_at.push((ipl.block, ipl.offset));
        }
        let opl = self.outer.locate(&outer_pt)?;
        let mut offset = p.to_vec();
        for (n, &ob) in self.kept.iter().enumerate() {
            let pb = self.layout[n];
            for (oa, pa) in osig.axes(ob).zip(sig.axes(pb)) {
                offset[pa] = opl.offset[oa];
            }
        }
        if let Some(n) = self.kept.iter().position(|&b| b == opl.block) {
            return Ok(Placement::new(self.layout[n], offset));
        }
        let j = self
            .factors
            .iter()
            .position(|&b| b == opl.block)
            .expect("outer block is kept or a factor");
        let (beta, y) = &refined_at[j];
        let pb = self.layout[e + j * n_inner + beta];
        for ((ia, oa), pa) in isig.axes(*beta).zip(osig.axes(opl.block)).zip(sig.axes(pb)) {
            offset[pa] = reduce(opl.offset[oa] + y[ia], sig.moduli()[pa]);
        }
        Ok(Placement::new(pb, offset))
    }
}

/// Which outer blocks host the dense set, and what that set is.
#[derive(Clone, Debug)]
pub struct ComposePlan {
    pub factors: Vec<usize>,
    /// The dense set `B`; inner blocks carrying this tile are refined.
    pub dense: Arc<TileSpec>,
    /// Output order: natural block index to parent block index. `None`
    /// keeps the natural order.
    pub layout: Option<Vec<usize>>,
}

/// Combines an outer tiling of `B_1 x .. x B_m x B^d` by `(T_1..T_m, A..A)`
/// with an inner tiling of `C_1 x .. x C_n x C` by `(U_1..U_n, B..B)` copies,
/// one inner factor per outer dense factor.
pub fn compose(outer: Construction, inner: Construction, plan: ComposePlan) -> Result<Construction> {
    if plan.factors.is_empty() {
        return Ok(outer);
    }
    let osig = outer.sig().clone();
    let isig = inner.sig().clone();
    let mut seen = HashSet::new();
    for &f in &plan.factors {
        if f >= osig.num_blocks() || !seen.insert(f) {
            return Err(Error::ShapeMismatch("bad factor index".into()));
        }
    }
    let factor_moduli = &osig.block(plan.factors[0]).moduli;
    for &f in &plan.factors {
        if &osig.block(f).moduli != factor_moduli {
            return Err(Error::ShapeMismatch("factors live in different groups".into()));
        }
    }
    let refined: Vec<bool> = isig
        .blocks()
        .iter()
        .map(|b| *b.tile == *plan.dense && &b.moduli == factor_moduli)
        .collect();
    if !refined.iter().any(|&r| r) {
        return Err(Error::ShapeMismatch("inner tiling has no copies of the dense set".into()));
    }
    let kept: Vec<usize> = (0..osig.num_blocks()).filter(|b| !seen.contains(b)).collect();
    let mut natural = Vec::new();
    for &b in &kept {
        natural.push(osig.block(b).clone());
    }
    for &f in &plan.factors {
        for (b, &r) in isig.blocks().iter().zip(&refined) {
            if r {
                natural.push(Block { tile: osig.block(f).tile.clone(), moduli: b.moduli.clone() });
            } else {
                natural.push(b.clone());
            }
        }
    }
    let n = natural.len();
    let layout = plan.layout.unwrap_or_else(|| (0..n).collect());
    let mut placed = vec![None; n];
    for (i, &l) in layout.iter().enumerate() {
        if layout.len() != n || l >= n || placed[l].is_some() {
            return Err(Error::ShapeMismatch("layout is not a permutation".into()));
        }
        placed[l] = Some(natural[i].clone());
    }
    let sig = Signature::new(placed.into_iter().map(Option::unwrap).collect())?;
    Ok(Construction::new(
        Arc::new(sig),
        NodeKind::Compose(Compose { outer, inner, factors: plan.factors, refined, layout, kept }),
    ))
}

impl Lift {
    fn locate(&self, p: &[i64]) -> LocateResult {
        let csig = self.child.sig();
        let mut q = p.to_vec();
        for (j, m) in self.maps.iter().enumerate() {
            if let Some(m) = m {
                for (i, a) in csig.axes(j).enumerate() {
                    if let AxisMap::Reduce(k) = m.projection.axes[i] {
                        q[a] = p[a].rem_euclid(k);
                    }
                }
            }
        }
        let pl = self.child.locate(&q)?;
        let mut offset = pl.offset.clone();
        for (j, m) in self.maps.iter().enumerate() {
            if m.is_some() {
                for a in csig.axes(j) {
                    offset[a] = p[a];
                }
            }
        }
        if let Some(m) = &self.maps[pl.block] {
            let axes = csig.axes(pl.block);
            let image: Point =
                axes.clone().map(|a| reduce(q[a] - pl.offset[a], csig.moduli()[a])).collect();
            let pre = m.preimage.get(&image).ok_or(LocateError::OutsideRegion)?;
            for (i, a) in axes.enumerate() {
                offset[a] = p[a] - pre[i];
            }
        }
        Ok(Placement::new(pl.block, offset))
    }
}

/// Lifts a tiling along per-block projections. `maps[j]` gives the original
/// tile and projection for block `j`, or `None` to keep the block as is.
pub fn lift(c: Construction, maps: Vec<Option<(Arc<TileSpec>, Projection)>>) -> Result<Construction> {
    let csig = c.sig().clone();
    if maps.len() != csig.num_blocks() {
        return Err(Error::ShapeMismatch("one lift entry per block".into()));
    }
    if maps.iter().all(|m| m.as_ref().is_none_or(|(_, p)| p.is_identity())) {
        return Ok(c);
    }
    let mut blocks = Vec::new();
    let mut lmaps = Vec::new();
    for (j, m) in maps.into_iter().enumerate() {
        let cb = csig.block(j);
        match m {
            None => {
                blocks.push(cb.clone());
                lmaps.push(None);
            }
            Some((tile, projection)) => {
                let (image, injective) = project_tile(&tile, &projection)?;
                if !injective {
                    return Err(Error::NotInjective(j));
                }
                if image != *cb.tile {
                    return Err(Error::ShapeMismatch(format!("block {j}: projected tile differs")));
                }
                let moduli = projection
                    .axes
                    .iter()
                    .zip(&cb.moduli)
                    .map(|(a, m)| match a {
                        AxisMap::Reduce(k) if *m == Some(*k) => Ok(None),
                        AxisMap::Reduce(_) => Err(Error::ShapeMismatch("lift modulus".into())),
                        AxisMap::Identity => Ok(*m),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let preimage =
                    tile.points().iter().map(|t| (projection.apply(t), t.clone())).collect();
                blocks.push(Block { tile: tile.clone(), moduli });
                lmaps.push(Some(LiftMap { projection, tile, preimage }));
            }
        }
    }
    let sig = Signature::new(blocks)?;
    Ok(Construction::new(Arc::new(sig), NodeKind::Lift(Lift { child: c, maps: lmaps })))
}
