//! A partition of `G x A^r` into `G x C_{0,r}` and copies of the tile, in
//! which every `(T + y_i) x C_{i,r}` is a union of copies.

use std::sync::Arc;

use super::dens::{Class, Classes, Dens};
use crate::construction::{Construction, LocateResult, NodeKind};
use crate::error::{Error, LocateError, Result};
use crate::space::{Placement, Point};

pub struct Blueprint {
    pub dens: Arc<Dens>,
    pub r: usize,
    /// `ys[i - 1] = y_i`.
    pub ys: Vec<Point>,
}

impl Blueprint {
    /// `y_i` cycles through the group in lexicographic order.
    pub fn new(dens: &Arc<Dens>, r: usize) -> Blueprint {
        let el = dens.elements();
        let ys = (0..r).map(|i| el[i % el.len()].clone()).collect();
        Blueprint { dens: dens.clone(), r, ys }
    }

    pub fn construction(dens: &Arc<Dens>, r: usize) -> Construction {
        Construction::from_kind(dens.sig(r + 1), NodeKind::Blueprint(Blueprint::new(dens, r)))
    }

    /// Checks `r >= t |G|` so every element appears `t` times among the
    /// first `t |G|` entries.
    pub fn build(dens: &Arc<Dens>, t: usize, r: usize) -> Result<Construction> {
        let need = t * dens.elements().len();
        if r < need {
            return Err(Error::Bound(format!("blueprint needs r >= {need}, got {r}")));
        }
        Ok(Blueprint::construction(dens, r))
    }

    pub fn y(&self, i: usize) -> &[i64] {
        &self.ys[i - 1]
    }

    pub fn locate(&self, p: &[i64]) -> LocateResult {
        let b = self.dens.b();
        let cls = self.dens.classify(&p[b..], self.r)?;
        self.locate_classified(p, &cls)
    }

    /// `cls` classifies blocks `1..=r` of `p`; later coordinates are kept.
    pub(crate) fn locate_classified(&self, p: &[i64], cls: &Classes) -> LocateResult {
        let b = self.dens.b();
        let g = &p[..b];
        for j in (1..=self.r).rev() {
            if cls.cls[j - 1] == Class::Down {
                if cls.downs(0, j - 1) == j - 1 {
                    return Err(LocateError::PointInHole);
                }
                continue;
            }
            let y = self.y(j);
            let mut offset = p.to_vec();
            if self.dens.in_translate(g, y) {
                offset[..b].copy_from_slice(y);
                return Ok(Placement::new(0, offset));
            }
            offset[j * b..(j + 1) * b].copy_from_slice(&self.dens.shift);
            return Ok(Placement::new(j, offset));
        }
        Err(LocateError::PointInHole)
    }
}
