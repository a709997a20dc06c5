use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, LocateError, Result};
use crate::space::{Point, PointIter, Signature, TileSpec};

/// Where a group element sits relative to `T` and `T' = T + x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Class {
    Outside,
    /// `T \ T'`
    Down,
    /// `T' \ T`
    Up,
    /// `T` meets `T'`
    Mid,
}

/// A tile `T` in `G = Z_k^b`, a shift `x` with `T + x != T`, and
/// `A = T u (T + x)`.
#[derive(Debug)]
pub struct Dens {
    pub group: Vec<i64>,
    pub tile: Arc<TileSpec>,
    pub shift: Point,
    pub dense: Arc<TileSpec>,
    elements: Vec<Point>,
    class: Vec<Class>,
    in_tile: Vec<bool>,
    sigs: Mutex<Vec<Arc<Signature>>>,
}

impl Dens {
    /// Picks the lexicographically smallest nonzero `x` with `T + x != T`.
    pub fn new(group: Vec<i64>, tile: Arc<TileSpec>) -> Result<Self> {
        let b = group.len();
        if tile.dim() != b {
            return Err(Error::ShapeMismatch("tile and group dimensions differ".into()));
        }
        let elements: Vec<Point> = PointIter::new(group.clone()).collect();
        for x in elements.iter().skip(1) {
            let moved: Vec<Point> = tile.points().iter().map(|p| add(p, x, &group)).collect();
            if moved.iter().any(|q| !tile.contains(q)) {
                return Dens::with_shift(group, tile, x.clone());
            }
        }
        Err(Error::WholeGroup)
    }

    pub fn with_shift(group: Vec<i64>, tile: Arc<TileSpec>, shift: Point) -> Result<Self> {
        let elements: Vec<Point> = PointIter::new(group.clone()).collect();
        if tile.points().iter().any(|p| p.len() != group.len() || !in_group(p, &group)) {
            return Err(Error::ShapeMismatch("tile is not a subset of the group".into()));
        }
        if shift.len() != group.len() || !in_group(&shift, &group) {
            return Err(Error::Param("shift is not a group element".into()));
        }
        let moved: Vec<Point> = tile.points().iter().map(|p| add(p, &shift, &group)).collect();
        if moved.iter().all(|q| tile.contains(q)) {
            return Err(Error::Param("shift fixes the tile".into()));
        }
        let mut class = vec![Class::Outside; elements.len()];
        let mut in_tile = vec![false; elements.len()];
        let mut dense = Vec::new();
        for (n, e) in elements.iter().enumerate() {
            let a = tile.contains(e);
            let b = moved.contains(e);
            in_tile[n] = a;
            class[n] = match (a, b) {
                (true, true) => Class::Mid,
                (true, false) => Class::Down,
                (false, true) => Class::Up,
                (false, false) => Class::Outside,
            };
            if a || b {
                dense.push(e.clone());
            }
        }
        let dense = Arc::new(TileSpec::raw(dense)?);
        Ok(Dens { group, tile, shift, dense, elements, class, in_tile, sigs: Mutex::new(Vec::new()) })
    }

    pub fn b(&self) -> usize {
        self.group.len()
    }

    /// Group elements in lexicographic order.
    pub fn elements(&self) -> &[Point] {
        &self.elements
    }

    pub fn index(&self, p: &[i64]) -> usize {
        p.iter().zip(&self.group).fold(0, |acc, (&x, &m)| acc * m as usize + x as usize)
    }

    pub fn class(&self, p: &[i64]) -> Class {
        self.class[self.index(p)]
    }

    pub fn in_tile(&self, p: &[i64]) -> bool {
        self.in_tile[self.index(p)]
    }

    /// Whether `g - y` lies in the tile.
    pub fn in_translate(&self, g: &[i64], y: &[i64]) -> bool {
        let diff: Point = g.iter().zip(y).zip(&self.group).map(|((a, b), m)| (a - b).rem_euclid(*m)).collect();
        self.in_tile(&diff)
    }

    pub fn up(&self) -> Vec<Point> {
        self.with_class(Class::Up)
    }

    pub fn down(&self) -> Vec<Point> {
        self.with_class(Class::Down)
    }

    fn with_class(&self, c: Class) -> Vec<Point> {
        self.elements.iter().zip(&self.class).filter(|(_, k)| **k == c).map(|(e, _)| e.clone()).collect()
    }

    /// `G^n`, every block carrying the tile.
    pub fn sig(&self, n: usize) -> Arc<Signature> {
        let mut sigs = self.sigs.lock().unwrap();
        while sigs.len() <= n {
            let j = sigs.len();
            let moduli = self.group.iter().map(|&m| Some(m)).collect();
            let block = crate::space::Block { tile: self.tile.clone(), moduli };
            sigs.push(Arc::new(Signature::new(vec![block; j]).unwrap()));
        }
        sigs[n].clone()
    }

    /// Classes of the `n` blocks of `p`, or `OutsideRegion` if a block
    /// leaves `A`.
    pub fn classify(&self, p: &[i64], n: usize) -> std::result::Result<Classes, LocateError> {
        let b = self.b();
        let mut cls = Vec::with_capacity(n);
        let mut downs = Vec::with_capacity(n + 1);
        let mut ups = Vec::with_capacity(n + 1);
        downs.push(0);
        ups.push(0);
        for j in 0..n {
            let c = self.class(&p[j * b..(j + 1) * b]);
            if c == Class::Outside {
                return Err(LocateError::OutsideRegion);
            }
            downs.push(downs[j] + (c == Class::Down) as usize);
            ups.push(ups[j] + (c == Class::Up) as usize);
            cls.push(c);
        }
        Ok(Classes { cls, downs, ups })
    }
}

/// Per-block classes of a point of `A^n` with prefix counts.
pub struct Classes {
    pub cls: Vec<Class>,
    downs: Vec<usize>,
    ups: Vec<usize>,
}

impl Classes {
    pub fn downs(&self, lo: usize, hi: usize) -> usize {
        self.downs[hi] - self.downs[lo]
    }

    pub fn ups(&self, lo: usize, hi: usize) -> usize {
        self.ups[hi] - self.ups[lo]
    }

    /// Whether blocks `lo..hi` form a point of `C_{i}` (1-based within the
    /// window, `0` for all-down).
    pub fn in_c(&self, lo: usize, hi: usize, i: usize) -> bool {
        let len = hi - lo;
        if i == 0 {
            self.downs(lo, hi) == len
        } else {
            self.cls[lo + i - 1] == Class::Up && self.downs(lo, hi) == len - 1
        }
    }

    /// The `i >= 1` with blocks `lo..hi` in `C_i`, if any.
    pub fn which_c(&self, lo: usize, hi: usize) -> Option<usize> {
        let len = hi - lo;
        if len == 0 || self.downs(lo, hi) != len - 1 || self.ups(lo, hi) != 1 {
            return None;
        }
        (lo..hi).find(|&j| self.cls[j] == Class::Up).map(|j| j - lo + 1)
    }
}

fn in_group(p: &[i64], group: &[i64]) -> bool {
    p.iter().zip(group).all(|(x, m)| (0..*m).contains(x))
}

pub(crate) fn add(p: &[i64], x: &[i64], group: &[i64]) -> Point {
    p.iter().zip(x).zip(group).map(|((a, b), m)| (a + b).rem_euclid(*m)).collect()
}
