//! Tiles, mixed free/cyclic product spaces, placements and projections.
//!
//! A space is an ordered list of *blocks*. Each block is a group of axes that
//! hosts copies of one tile; an axis is either free (`Z`) or cyclic (`Z_m`).
//! A [`Placement`] names a block and a full-length offset: its cover is the
//! block's tile embedded on the block's axes and translated by the offset.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates of a point; cyclic coordinates live in `[0, modulus)`.
pub type Point = Vec<i64>;

/// Modulus of one axis: `None` for a free axis.
pub type Modulus = Option<i64>;

#[inline]
pub fn reduce(x: i64, m: Modulus) -> i64 {
    match m {
        Some(m) => x.rem_euclid(m),
        None => x,
    }
}

/// A finite non-empty point set in `Z^b`, normalized to per-axis minimum 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct TileSpec {
    dim: usize,
    points: Vec<Point>,
}

impl TileSpec {
    /// Builds a tile from raw points, translating it to min-0 normal form.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyTile)?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::EmptyTile);
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::RaggedTile);
        }
        let mins: Vec<i64> = (0..dim)
            .map(|a| points.iter().map(|p| p[a]).min().unwrap())
            .collect();
        let set: BTreeSet<Point> = points
            .iter()
            .map(|p| p.iter().zip(&mins).map(|(x, m)| x - m).collect())
            .collect();
        if set.len() != points.len() {
            return Err(Error::DuplicatePoint);
        }
        Ok(TileSpec { dim, points: set.into_iter().collect() })
    }

    /// Builds a point set without translating it, e.g. a subset of a torus.
    pub fn raw(points: Vec<Point>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyTile)?.len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::RaggedTile);
        }
        let set: BTreeSet<Point> = points.iter().cloned().collect();
        if set.len() != points.len() {
            return Err(Error::DuplicatePoint);
        }
        Ok(TileSpec { dim, points: set.into_iter().collect() })
    }

    /// Builds a one-dimensional tile from integer positions.
    pub fn from_1d(xs: &[i64]) -> Result<Self> {
        TileSpec::new(xs.iter().map(|&x| vec![x]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Largest coordinate along `axis` (the minimum is 0).
    pub fn extent(&self, axis: usize) -> i64 {
        self.points.iter().map(|p| p[axis]).max().unwrap()
    }

    pub fn bbox(&self) -> Vec<(i64, i64)> {
        (0..self.dim).map(|a| (0, self.extent(a))).collect()
    }

    /// Smallest `k` with the tile inside `[0, k)^b`.
    pub fn k(&self) -> i64 {
        (0..self.dim).map(|a| self.extent(a)).max().unwrap() + 1
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }

    /// True when the tile is the full box `[0, k)^b`.
    pub fn is_full_box(&self) -> bool {
        let mut size = 1i64;
        for a in 0..self.dim {
            size = size.saturating_mul(self.extent(a) + 1);
        }
        size == self.len() as i64
    }

    /// Renders a 1-D tile as an `X`/`.` string.
    pub fn render(&self) -> Option<String> {
        if self.dim != 1 {
            return None;
        }
        let mut s = vec!['.'; self.extent(0) as usize + 1];
        for p in &self.points {
            s[p[0] as usize] = 'X';
        }
        Some(s.into_iter().collect())
    }

    /// Either the `X`/`.` form (1-D) or the JSON coordinate list.
    pub fn describe(&self) -> String {
        self.render()
            .unwrap_or_else(|| serde_json::to_string(&self.points).unwrap())
    }
}

impl TryFrom<Vec<Vec<i64>>> for TileSpec {
    type Error = Error;
    fn try_from(v: Vec<Vec<i64>>) -> Result<Self> {
        TileSpec::new(v)
    }
}

impl From<TileSpec> for Vec<Vec<i64>> {
    fn from(t: TileSpec) -> Self {
        t.points
    }
}

impl fmt::Display for TileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Parses `X.X`-style strings or a JSON list of integer vectors.
pub fn parse_tile(text: &str) -> Result<TileSpec> {
    let text = text.trim();
    if text.starts_with('[') {
        let pts: Vec<Vec<i64>> =
            serde_json::from_str(text).map_err(|e| Error::BadTile(e.to_string()))?;
        return TileSpec::new(pts);
    }
    if let Some(c) = text.chars().find(|c| *c != 'X' && *c != '.') {
        return Err(Error::IllegalChar(c));
    }
    let xs: Vec<i64> = text
        .chars()
        .enumerate()
        .filter(|(_, c)| *c == 'X')
        .map(|(i, _)| i as i64)
        .collect();
    if xs.is_empty() {
        return Err(Error::EmptyTile);
    }
    TileSpec::from_1d(&xs)
}

/// One group of axes hosting copies of a single tile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub tile: Arc<TileSpec>,
    pub moduli: Vec<Modulus>,
}

impl Block {
    pub fn new(tile: Arc<TileSpec>, modulus: Modulus) -> Self {
        let moduli = vec![modulus; tile.dim()];
        Block { tile, moduli }
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    /// Whether a copy of the tile on this block covers `|tile|` distinct points.
    pub fn fits(&self) -> bool {
        self.moduli
            .iter()
            .enumerate()
            .all(|(a, m)| m.is_none_or(|m| m > self.tile.extent(a)))
    }

    pub fn is_finite(&self) -> bool {
        self.moduli.iter().all(|m| m.is_some())
    }
}

/// An ordered list of blocks; axes are laid out block after block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    blocks: Vec<Block>,
    starts: Vec<usize>,
    moduli: Vec<Modulus>,
}

impl Signature {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let mut starts = Vec::with_capacity(blocks.len());
        let mut moduli = Vec::new();
        for b in &blocks {
            if b.moduli.len() != b.tile.dim() {
                return Err(Error::Signature("block axis count differs from tile dim".into()));
            }
            if b.moduli.iter().any(|m| matches!(m, Some(m) if *m < 1)) {
                return Err(Error::Signature("cyclic modulus must be positive".into()));
            }
            starts.push(moduli.len());
            moduli.extend_from_slice(&b.moduli);
        }
        Ok(Signature { blocks, starts, moduli })
    }

    /// `count` blocks of the same tile and modulus.
    pub fn uniform(tile: &Arc<TileSpec>, modulus: Modulus, count: usize) -> Self {
        Signature::new(vec![Block::new(tile.clone(), modulus); count]).unwrap()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &Block {
        &self.blocks[j]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_axes(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[Modulus] {
        &self.moduli
    }

    /// Axis range of block `j`.
    pub fn axes(&self, j: usize) -> std::ops::Range<usize> {
        self.starts[j]..self.starts[j] + self.blocks[j].dim()
    }

    /// Number of points when every axis is cyclic.
    pub fn finite_size(&self) -> Option<u128> {
        self.moduli
            .iter()
            .try_fold(1u128, |acc, m| m.map(|m| acc.saturating_mul(m as u128)))
    }

    pub fn reduce_point(&self, p: &mut [i64]) {
        for (x, m) in p.iter_mut().zip(&self.moduli) {
            *x = reduce(*x, *m);
        }
    }

    pub fn check_point(&self, p: &[i64]) -> Result<()> {
        if p.len() != self.num_axes() {
            return Err(Error::PointShape { expected: self.num_axes(), got: p.len() });
        }
        for (x, m) in p.iter().zip(&self.moduli) {
            if let Some(m) = m {
                if !(0..*m).contains(x) {
                    return Err(Error::PointShape { expected: self.num_axes(), got: p.len() });
                }
            }
        }
        Ok(())
    }

    /// Same blocks with block `j` removed.
    pub fn without_block(&self, j: usize) -> Signature {
        let mut blocks = self.blocks.clone();
        blocks.remove(j);
        Signature::new(blocks).unwrap()
    }

    /// Iterates all points of a finite signature in lexicographic order.
    pub fn points(&self) -> PointIter {
        PointIter::new(
            self.moduli.iter().map(|m| m.expect("finite signature")).collect(),
        )
    }
}

/// Lexicographic enumeration of a finite box `[0, m_0) x ... x [0, m_n)`.
#[derive(Clone, Debug)]
pub struct PointIter {
    moduli: Vec<i64>,
    next: Option<Point>,
}

impl PointIter {
    pub fn new(moduli: Vec<i64>) -> Self {
        let next = if moduli.iter().all(|&m| m > 0) {
            Some(vec![0; moduli.len()])
        } else {
            None
        };
        PointIter { moduli, next }
    }
}

impl Iterator for PointIter {
    type Item = Point;
    fn next(&mut self) -> Option<Point> {
        let cur = self.next.take()?;
        let mut nxt = cur.clone();
        let mut a = nxt.len();
        loop {
            if a == 0 {
                break;
            }
            a -= 1;
            nxt[a] += 1;
            if nxt[a] < self.moduli[a] {
                self.next = Some(nxt);
                break;
            }
            nxt[a] = 0;
        }
        Some(cur)
    }
}

/// One embedded translated copy of a block's tile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Placement {
    pub block: usize,
    pub offset: Point,
}

impl Placement {
    pub fn new(block: usize, offset: Point) -> Self {
        Placement { block, offset }
    }
}

/// Points covered by a placement, cyclic coordinates reduced.
pub fn cover(pl: &Placement, sig: &Signature) -> Vec<Point> {
    let axes = sig.axes(pl.block);
    let moduli = sig.moduli();
    sig.block(pl.block)
        .tile
        .points()
        .iter()
        .map(|t| {
            let mut q = pl.offset.clone();
            for (x, a) in t.iter().zip(axes.clone()) {
                q[a] += x;
            }
            for (x, m) in q.iter_mut().zip(moduli) {
                *x = reduce(*x, *m);
            }
            q
        })
        .collect()
}

/// Translates a placement by `v`, reducing cyclic coordinates.
pub fn translate(pl: &Placement, v: &[i64], sig: &Signature) -> Placement {
    let offset = pl
        .offset
        .iter()
        .zip(v)
        .zip(sig.moduli())
        .map(|((x, d), m)| reduce(x + d, *m))
        .collect();
    Placement::new(pl.block, offset)
}

/// Per-axis map from a free axis to itself or onto `Z_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisMap {
    Identity,
    Reduce(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projection {
    pub axes: Vec<AxisMap>,
}

impl Projection {
    pub fn identity(n: usize) -> Self {
        Projection { axes: vec![AxisMap::Identity; n] }
    }

    pub fn reduce_all(n: usize, k: i64) -> Self {
        Projection { axes: vec![AxisMap::Reduce(k); n] }
    }

    pub fn apply(&self, p: &[i64]) -> Point {
        p.iter()
            .zip(&self.axes)
            .map(|(x, m)| match m {
                AxisMap::Identity => *x,
                AxisMap::Reduce(k) => x.rem_euclid(*k),
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|m| *m == AxisMap::Identity)
    }
}

/// Image of a tile under a projection, and whether the projection is
/// injective on it.
pub fn project_tile(t: &TileSpec, p: &Projection) -> Result<(TileSpec, bool)> {
    if p.axes.len() != t.dim() {
        return Err(Error::Signature("projection dimension differs from tile".into()));
    }
    let image: BTreeSet<Point> = t.points().iter().map(|q| p.apply(q)).collect();
    let injective = image.len() == t.len();
    // The image is kept as-is (it already lies in the fundamental box).
    let tile = TileSpec { dim: t.dim(), points: image.into_iter().collect() };
    Ok((tile, injective))
}
