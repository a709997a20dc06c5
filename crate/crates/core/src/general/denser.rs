//! Tilings of `G x (A^d \ U_{S} C_{i,d})` for subfamilies `S` of the
//! corner sets with `|S| = 1 (mod |T|)`.

use std::sync::{Arc, OnceLock};

use super::blueprint::Blueprint;
use super::csets::m_csets;
use super::dens::{Classes, Dens};
use crate::construction::{Construction, LocateResult, NodeKind};
use crate::error::{Error, LocateError, Result};
use crate::space::Placement;

/// The tiling for `S = {r + 1, .., d}`, `r = d - m`.
pub struct DenserTiler {
    pub dens: Arc<Dens>,
    pub d: usize,
    pub m: usize,
    blueprint: Blueprint,
    /// `t |G|`: indices whose corner groups are cut out of the blueprint.
    marked: usize,
    chains: Vec<OnceLock<Construction>>,
}

impl DenserTiler {
    /// Needs `m = 1 (mod |T|)` and `d - m >= t |G|` with `t = (m - 1) / |T|`.
    pub fn construction(dens: &Arc<Dens>, d: usize, m: usize) -> Result<Construction> {
        let size = dens.tile.len();
        if m == 0 || !(m - 1).is_multiple_of(size) {
            return Err(Error::Parity { size: m, modulus: size });
        }
        let g = dens.elements().len();
        let marked = (m - 1) / size * g;
        if m > d || d - m < marked {
            return Err(Error::Bound(format!("m = {m} needs d >= {}", m + marked)));
        }
        let kind = NodeKind::DenserTiler(DenserTiler {
            dens: dens.clone(),
            d,
            m,
            blueprint: Blueprint::new(dens, d - m),
            marked,
            chains: (0..g).map(|_| OnceLock::new()).collect(),
        });
        Ok(Construction::from_kind(dens.sig(d + 1), kind))
    }

    pub fn r(&self) -> usize {
        self.d - self.m
    }

    fn chain(&self, gi: usize) -> &Construction {
        self.chains[gi].get_or_init(|| {
            let g = &self.dens.elements()[gi];
            let mut idx = vec![0];
            idx.extend((1..=self.marked).filter(|&i| self.dens.in_translate(g, self.blueprint.y(i))));
            debug_assert_eq!(idx.len(), self.m);
            m_csets(&self.dens, self.r(), &idx).expect("indices are distinct and in range")
        })
    }

    // `(g, alpha)` lies in the blueprint restricted away from `Y_0..Y_{t|G|}`.
    fn in_s(&self, g: &[i64], cls: &Classes) -> bool {
        let r = self.r();
        if cls.downs(0, r) == r {
            return false;
        }
        match cls.which_c(0, r) {
            Some(i) if i <= self.marked => !self.dens.in_translate(g, self.blueprint.y(i)),
            _ => true,
        }
    }

    pub fn locate(&self, p: &[i64]) -> LocateResult {
        let b = self.dens.b();
        let (d, r) = (self.d, self.r());
        let cls = self.dens.classify(&p[b..], d)?;
        if cls.which_c(0, d).is_some_and(|i| i > r) {
            return Err(LocateError::PointInHole);
        }
        let g = &p[..b];
        if cls.downs(r, d) == self.m && self.in_s(g, &cls) {
            return self.blueprint.locate_classified(p, &cls);
        }
        let pl = self.chain(self.dens.index(g)).locate(&p[b..])?;
        let mut offset = g.to_vec();
        offset.extend(pl.offset);
        Ok(Placement::new(pl.block + 1, offset))
    }
}

/// The family `C_{1,d} .. C_{d,d}` of `A^d` together with tilers for its
/// admissible subfamilies.
pub struct Denser {
    pub dens: Arc<Dens>,
    pub d0: usize,
    pub d: usize,
    canonical: Vec<OnceLock<Construction>>,
}

impl Denser {
    /// `d = d0 + ceil(|G| d0 / |T|)`, the least `d >= (1 + |G|/|T|) d0`.
    pub fn new(dens: Arc<Dens>, d0: usize) -> Result<Self> {
        if d0 == 0 {
            return Err(Error::Param("d0 must be at least 1".into()));
        }
        let g = dens.elements().len();
        let t = dens.tile.len();
        let d = d0 + (g * d0).div_ceil(t);
        Ok(Denser { dens, d0, d, canonical: (0..=d0).map(|_| OnceLock::new()).collect() })
    }

    pub fn check_family(&self, s: &[usize]) -> Result<()> {
        let t = self.dens.tile.len();
        if s.len() % t != 1 % t {
            return Err(Error::Parity { size: s.len(), modulus: t });
        }
        if s.len() > self.d0 {
            return Err(Error::Bound(format!("|S| = {} exceeds d0 = {}", s.len(), self.d0)));
        }
        if s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&i| i == 0 || i > self.d) {
            return Err(Error::Param(format!("S must be increasing indices in 1..={}", self.d)));
        }
        Ok(())
    }

    /// The tiler for the last `m` indices.
    pub fn canonical(&self, m: usize) -> Result<Construction> {
        if m > self.d0 {
            return Err(Error::Bound(format!("|S| = {m} exceeds d0 = {}", self.d0)));
        }
        self.check_family(&(self.d - m + 1..=self.d).collect::<Vec<_>>())?;
        if let Some(c) = self.canonical[m].get() {
            return Ok(c.clone());
        }
        let c = DenserTiler::construction(&self.dens, self.d, m)?;
        Ok(self.canonical[m].get_or_init(|| c).clone())
    }

    // Child block j of the canonical tiler sits at parent block perm[j].
    fn perm(&self, s: &[usize]) -> Vec<usize> {
        let mut perm = vec![0];
        let mut rest = s.iter().peekable();
        for j in 1..=self.d {
            if rest.peek() == Some(&&j) {
                rest.next();
            } else {
                perm.push(j);
            }
        }
        perm.extend_from_slice(s);
        perm
    }

    /// Tiling of `G x (A^d \ U_{i in S} C_{i,d})`.
    pub fn tiler(&self, s: &[usize]) -> Result<Construction> {
        self.check_family(s)?;
        let c = self.canonical(s.len())?;
        let n = c.sig().num_axes();
        Construction::embed(c, self.perm(s), vec![0; n])
    }

    /// [`Denser::tiler`] located directly, without building the embedding.
    /// `s` must already pass [`Denser::check_family`].
    pub fn locate(&self, s: &[usize], p: &[i64]) -> LocateResult {
        let c = match self.canonical[s.len()].get() {
            Some(c) => c.clone(),
            None => self.canonical(s.len()).expect("family was checked"),
        };
        let b = self.dens.b();
        let perm = self.perm(s);
        let mut q = Vec::with_capacity(p.len());
        for &pj in &perm {
            q.extend_from_slice(&p[pj * b..(pj + 1) * b]);
        }
        let pl = c.locate(&q)?;
        let mut offset = vec![0; p.len()];
        for (j, &pj) in perm.iter().enumerate() {
            offset[pj * b..(pj + 1) * b].copy_from_slice(&pl.offset[j * b..(j + 1) * b]);
        }
        Ok(Placement::new(perm[pl.block], offset))
    }
}
