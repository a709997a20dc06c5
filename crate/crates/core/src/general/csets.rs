//! Tilings of `A^d` minus corner products `C_{i,d}`, and the chains that
//! trade product sets for extra dimensions.

use std::sync::Arc;

use super::dens::{Class, Classes, Dens};
use crate::construction::{Construction, LocateResult, NodeKind};
use crate::error::{Error, LocateError, Result};
use crate::space::{Placement, PointIter};

/// `A^d \ C_{i,d}`.
pub struct RemovedCset {
    pub dens: Arc<Dens>,
    pub d: usize,
    pub i: usize,
}

/// `A^(d+1) \ (X \ C_{i,d})^dagger` from a tiling of `A^d \ X`.
pub struct UseCset {
    pub dens: Arc<Dens>,
    pub d: usize,
    pub i: usize,
    pub input: Construction,
}

fn copy_at(p: &[i64], block: usize, b: usize, at: &[i64]) -> Placement {
    let mut offset = p.to_vec();
    offset[block * b..(block + 1) * b].copy_from_slice(at);
    Placement::new(block, offset)
}

impl RemovedCset {
    pub fn locate(&self, p: &[i64]) -> LocateResult {
        let cls = self.dens.classify(p, self.d)?;
        locate_removed(&self.dens, self.i, p, &cls, self.d)
    }
}

/// Locates in `A^d \ C_{i,d}` on the first `d` blocks of `p`; the
/// offset keeps the remaining coordinates of `p`.
pub(crate) fn locate_removed(dens: &Dens, i: usize, p: &[i64], cls: &Classes, d: usize) -> LocateResult {
    let b = dens.b();
    let zero = vec![0; b];
    let (mut lo, mut hi, mut i) = (0, d, i);
    loop {
        if hi - lo == 1 {
            return match (i, cls.cls[lo]) {
                (0, Class::Down) | (1, Class::Up) => Err(LocateError::PointInHole),
                (0, _) => Ok(copy_at(p, lo, b, &dens.shift)),
                _ => Ok(copy_at(p, lo, b, &zero)),
            };
        }
        let (peel, rlo, rhi, ri) = if i == hi - lo { (lo, lo + 1, hi, i - 1) } else { (hi - 1, lo, hi - 1, i) };
        if cls.in_c(rlo, rhi, ri) {
            return if cls.cls[peel] == Class::Down {
                Err(LocateError::PointInHole)
            } else {
                Ok(copy_at(p, peel, b, &dens.shift))
            };
        }
        lo = rlo;
        hi = rhi;
        i = ri;
    }
}

impl UseCset {
    /// Walks a chain of use-cset nodes down to its base construction.
    pub(crate) fn locate_chain(top: &Construction, p: &[i64]) -> LocateResult {
        let NodeKind::UseCset(first) = top.kind() else { unreachable!() };
        let dens = &first.dens;
        let b = dens.b();
        let cls = dens.classify(p, first.d + 1)?;
        let mut node = top;
        let zero = vec![0; b];
        loop {
            let NodeKind::UseCset(u) = node.kind() else {
                let ax = node.sig().num_axes();
                let pl = node.locate(&p[..ax])?;
                let mut offset = pl.offset;
                offset.extend_from_slice(&p[ax..]);
                return Ok(Placement::new(pl.block, offset));
            };
            let d = u.d;
            match cls.cls[d] {
                Class::Up => {
                    return if cls.in_c(0, d, 0) {
                        Err(LocateError::PointInHole)
                    } else {
                        locate_removed(dens, 0, p, &cls, d)
                    };
                }
                Class::Mid => {
                    return if cls.in_c(0, d, u.i) {
                        Ok(copy_at(p, d, b, &zero))
                    } else {
                        locate_removed(dens, u.i, p, &cls, d)
                    };
                }
                Class::Down => {
                    if cls.in_c(0, d, u.i) {
                        return Ok(copy_at(p, d, b, &zero));
                    }
                    node = &u.input;
                }
                Class::Outside => return Err(LocateError::OutsideRegion),
            }
        }
    }
}

pub fn removed_cset(dens: &Arc<Dens>, d: usize, i: usize) -> Result<Construction> {
    if d == 0 || i > d {
        return Err(Error::Param(format!("C_({i},{d}) is not defined")));
    }
    let kind = NodeKind::RemovedCset(RemovedCset { dens: dens.clone(), d, i });
    Ok(Construction::from_kind(dens.sig(d), kind))
}

const CONTAINMENT_CHECK: usize = 4096;

/// Applies one use-cset step to a tiling of `A^d \ X`. Containment of
/// `C_{i,d}` in `X` is checked on up to a few thousand of its points.
pub fn use_cset(dens: &Arc<Dens>, input: Construction, i: usize) -> Result<Construction> {
    let d = input.sig().num_blocks();
    if **input.sig() != *dens.sig(d) {
        return Err(Error::ShapeMismatch("use_cset input does not tile a power of A".into()));
    }
    if d == 0 || i > d {
        return Err(Error::Param(format!("C_({i},{d}) is not defined")));
    }
    let up = dens.up();
    let down = dens.down();
    let sizes: Vec<i64> = (1..=d).map(|j| if j == i { up.len() } else { down.len() } as i64).collect();
    for choice in PointIter::new(sizes).take(CONTAINMENT_CHECK) {
        let mut p = Vec::with_capacity(d * dens.b());
        for (j, &c) in choice.iter().enumerate() {
            let src = if j + 1 == i { &up } else { &down };
            p.extend_from_slice(&src[c as usize]);
        }
        if input.locate(&p) != Err(LocateError::PointInHole) {
            return Err(Error::NotInHole(format!("C_({i},{d}) point {p:?}")));
        }
    }
    let kind = NodeKind::UseCset(UseCset { dens: dens.clone(), d, i, input });
    Ok(Construction::from_kind(dens.sig(d + 1), kind))
}

/// `(A^d \ (C_{i_1} u .. u C_{i_m}))^(dagger m)` as a hole in `A^(d+m)`.
pub fn m_csets(dens: &Arc<Dens>, d: usize, indices: &[usize]) -> Result<Construction> {
    let mut seen = std::collections::BTreeSet::new();
    for &i in indices {
        if i > d || !seen.insert(i) {
            return Err(Error::Param(format!("index list {indices:?} must be distinct values in 0..={d}")));
        }
    }
    let mut c = Construction::void(dens.sig(d));
    for (step, &i) in indices.iter().enumerate() {
        let kind = NodeKind::UseCset(UseCset { dens: dens.clone(), d: d + step, i, input: c });
        c = Construction::from_kind(dens.sig(d + step + 1), kind);
    }
    Ok(c)
}
