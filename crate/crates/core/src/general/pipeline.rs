use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::dens::Dens;
use super::denser::Denser;
use super::holes::Holes;
use crate::construction::{compose, lift, Certificate, ComposePlan, Construction, Meta, NodeKind};
use crate::error::{Error, Result};
use crate::space::{Block, Placement, Point, Projection, Signature, TileSpec};

/// One densification level of the claim induction.
#[derive(Clone, Debug, Serialize)]
pub struct Level {
    pub tile: Vec<Point>,
    pub dense: Vec<Point>,
    pub shift: Point,
    pub d0: usize,
    pub d1: usize,
    /// Period of the special axis when `b = 1`.
    pub period: Option<usize>,
    pub p: usize,
    pub q: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralTrace {
    pub b: usize,
    pub k: i64,
    pub levels: Vec<Level>,
    pub p: usize,
    pub q: usize,
    pub d: usize,
}

#[derive(Clone)]
struct Claim {
    c: Construction,
    p: usize,
    q: usize,
}

struct Builder {
    tile: Arc<TileSpec>,
    group: Vec<i64>,
    memo: HashMap<Vec<Point>, Claim>,
    levels: Vec<Level>,
}

impl Builder {
    /// A tiling of `(Z^b)^p x G^q` by `p` copies of `T` and `q` of `A`,
    /// with the `T` blocks first.
    fn claim(&mut self, a: Arc<TileSpec>) -> Result<Claim> {
        if let Some(c) = self.memo.get(a.points()) {
            return Ok(c.clone());
        }
        let order: usize = self.group.iter().product::<i64>() as usize;
        let claim = if a.len() == order {
            let sig = Signature::new(vec![Block { tile: a.clone(), moduli: self.group.iter().map(|&m| Some(m)).collect() }])?;
            let c = Construction::explicit(Arc::new(sig), vec![Placement::new(0, vec![0; self.group.len()])]);
            Claim { c, p: 0, q: 1 }
        } else {
            self.level(a.clone())?
        };
        self.memo.insert(a.points().to_vec(), claim.clone());
        Ok(claim)
    }

    fn level(&mut self, a: Arc<TileSpec>) -> Result<Claim> {
        let dens = Arc::new(Dens::new(self.group.clone(), a.clone())?);
        let n = self.tile.len();
        let d0 = ((a.len() - 1) * n * n).max(1);
        let denser = Arc::new(Denser::new(dens.clone(), d0)?);
        let d1 = denser.d;
        let holes = Holes::new(self.tile.clone(), denser)?;
        let period = holes.plan.period();
        let outer = Construction::from_kind(Arc::new(holes.signature()?), NodeKind::Holes(holes));
        let inner = self.claim(dens.dense.clone())?;
        let (u, v) = (inner.p, inner.q);
        let p = d1 * u + 1;
        let q = d1 * v + 1;
        // Natural order: the two kept outer blocks, then each factor's inner blocks.
        let mut layout = vec![0, p];
        for j in 0..d1 {
            layout.extend((0..u).map(|beta| 1 + j * u + beta));
            layout.extend((0..v).map(|beta| p + 1 + j * v + beta));
        }
        let plan = ComposePlan { factors: (2..d1 + 2).collect(), dense: dens.dense.clone(), layout: Some(layout) };
        let c = compose(outer, inner.c, plan)?;
        let sig = c.sig();
        let shaped = sig.num_blocks() == p + q
            && sig.blocks()[..p].iter().all(|b| *b.tile == *self.tile)
            && sig.blocks()[p..].iter().all(|b| *b.tile == *a);
        if !shaped {
            return Err(Error::ShapeMismatch("composed level has the wrong block layout".into()));
        }
        self.levels.push(Level {
            tile: a.points().to_vec(),
            dense: dens.dense.points().to_vec(),
            shift: dens.shift.clone(),
            d0,
            d1,
            period,
            p,
            q,
        });
        Ok(Claim { c, p, q })
    }
}

/// Runs the claim induction from `pi(T)` and lifts to `Z^d` with
/// `d = b (p + q)`.
pub fn synthesize_with(tile: &TileSpec) -> Result<(Construction, GeneralTrace)> {
    let tile = Arc::new(TileSpec::new(tile.points().to_vec())?);
    let b = tile.dim();
    let k = tile.k();
    let group = vec![k; b];
    let a0 = Arc::new(TileSpec::raw(tile.points().to_vec())?);
    let mut builder = Builder { tile: tile.clone(), group, memo: HashMap::new(), levels: Vec::new() };
    let claim = builder.claim(a0)?;
    let sig = claim.c.sig().clone();
    let maps = sig
        .blocks()
        .iter()
        .enumerate()
        .map(|(j, blk)| {
            if j >= claim.p {
                return Some((tile.clone(), Projection::reduce_all(b, k)));
            }
            blk.moduli[0].map(|period| (tile.clone(), Projection::reduce_all(b, period)))
        })
        .collect();
    let c = lift(claim.c, maps)?;
    let d = b * (claim.p + claim.q);
    debug_assert_eq!(c.sig().num_axes(), d);
    let trace = GeneralTrace { b, k, levels: builder.levels, p: claim.p, q: claim.q, d };
    Ok((c, trace))
}

/// The general pipeline as a certificate.
pub fn synthesize(tile: &TileSpec, limit: u128) -> Result<(Certificate, GeneralTrace)> {
    let (c, trace) = synthesize_with(tile)?;
    let mut meta = Meta { pipeline: "general".into(), d: trace.d, ..Meta::default() };
    meta.extra.insert("tile".into(), json!(tile.describe()));
    meta.extra.insert("b".into(), json!(trace.b));
    meta.extra.insert("k".into(), json!(trace.k));
    meta.extra.insert("p".into(), json!(trace.p));
    meta.extra.insert("q".into(), json!(trace.q));
    meta.extra.insert("levels".into(), serde_json::to_value(&trace.levels)?);
    Ok((Certificate::from_construction(c, meta, limit)?, trace))
}
