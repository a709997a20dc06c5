//! Copies of `T x C_{i,d}` laid along a special `Z^b` factor so every slice
//! sees a union of `m = 1 (mod |A|)` corner sets, and the tiling of
//! `Z^b x G x A^d` built from them.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use super::deconv::{periodic_deconvolution, solve_g_const, MultiDimFn};
use super::denser::Denser;
use crate::construction::LocateResult;
use crate::error::{Error, LocateError, Result};
use crate::simple::{lcm, PeriodicFn};
use crate::space::{Block, Placement, Point, PointIter, Signature, TileSpec};

/// Longest period the one-dimensional plan may reach.
pub const MAX_PERIOD: usize = 1 << 22;

/// Greedy family selection over `Z_period`: residue `n` gets `g(n)` members
/// of `family`, disjoint from those of residues whose tile copies meet.
pub fn greedy_periodic(tile: &[i64], g: &PeriodicFn, period: usize, family: &[usize]) -> Result<Vec<Vec<usize>>> {
    let p = period as i64;
    let diffs: BTreeSet<i64> = tile
        .iter()
        .flat_map(|a| tile.iter().map(move |b| (a - b).rem_euclid(p)))
        .filter(|&d| d != 0)
        .collect();
    let mut sets: Vec<Option<Vec<usize>>> = vec![None; period];
    for n in 0..period {
        let mut used = BTreeSet::new();
        for &dlt in &diffs {
            if let Some(s) = &sets[((n as i64) + dlt).rem_euclid(p) as usize] {
                used.extend(s.iter().copied());
            }
        }
        let want = g.at(n as i64) as usize;
        let chosen: Vec<usize> = family.iter().copied().filter(|c| !used.contains(c)).take(want).collect();
        if chosen.len() < want {
            return Err(Error::FamilyTooSmall { need: want, have: chosen.len() });
        }
        sets[n] = Some(chosen);
    }
    Ok(sets.into_iter().map(Option::unwrap).collect())
}

/// Which family members sit on the copy `T + z`, for every `z`.
pub enum CoverPlan {
    /// `b = 1`: a plan on `Z_period`.
    Periodic(PeriodicPlan),
    /// `b >= 2`: filled lazily in spiral order.
    Spiral(SpiralPlan),
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicPlan {
    pub period: usize,
    pub g: PeriodicFn,
    pub sets: Vec<Vec<usize>>,
}

pub struct SpiralPlan {
    g: Arc<MultiDimFn>,
    family: usize,
    diffs: Vec<Point>,
    state: Mutex<SpiralState>,
}

struct SpiralState {
    next_shell: i64,
    sets: HashMap<Point, Vec<usize>>,
}

/// Lays out copies of `T x F` with `F` from the family `1..=family` so each
/// slice of `Z^b` meets `m = 1 (mod t)` members.
pub fn cover_holes(tile: &TileSpec, t: usize, family: usize) -> Result<CoverPlan> {
    let need = t.saturating_sub(1) * tile.len() * tile.len();
    if family < need {
        return Err(Error::FamilyTooSmall { need, have: family });
    }
    let members: Vec<usize> = (1..=family).collect();
    if tile.dim() == 1 {
        let pts: Vec<i64> = tile.points().iter().map(|p| p[0]).collect();
        let g = periodic_deconvolution(&pts, t as i64, 1, MAX_PERIOD)?;
        let period = lcm(g.period(), 2 * tile.k() as usize);
        let sets = greedy_periodic(&pts, &g, period, &members)?;
        return Ok(CoverPlan::Periodic(PeriodicPlan { period, g, sets }));
    }
    let g = solve_g_const(tile.points(), 1, t as i64)?;
    let mut diffs = BTreeSet::new();
    for a in tile.points() {
        for b in tile.points() {
            let d: Point = a.iter().zip(b).map(|(x, y)| x - y).collect();
            if d.iter().any(|&c| c != 0) {
                diffs.insert(d);
            }
        }
    }
    Ok(CoverPlan::Spiral(SpiralPlan {
        g,
        family,
        diffs: diffs.into_iter().collect(),
        state: Mutex::new(SpiralState { next_shell: 0, sets: HashMap::new() }),
    }))
}

impl CoverPlan {
    pub fn period(&self) -> Option<usize> {
        match self {
            CoverPlan::Periodic(p) => Some(p.period),
            CoverPlan::Spiral(_) => None,
        }
    }

    /// Members on the copy at `z`, reduced mod the period when periodic.
    pub fn at(&self, z: &[i64]) -> Vec<usize> {
        match self {
            CoverPlan::Periodic(p) => p.sets[z[0].rem_euclid(p.period as i64) as usize].clone(),
            CoverPlan::Spiral(s) => s.at(z),
        }
    }

    /// Members covering the slice at `x`: the union over copies through `x`.
    pub fn slice(&self, tile: &TileSpec, x: &[i64]) -> Vec<usize> {
        let mut out: Vec<usize> = tile.points().iter().flat_map(|y| self.at(&sub(x, y))).collect();
        out.sort_unstable();
        out
    }
}

fn sub(x: &[i64], y: &[i64]) -> Point {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

impl SpiralPlan {
    fn at(&self, z: &[i64]) -> Vec<usize> {
        let norm = z.iter().map(|c| c.abs()).max().unwrap_or(0);
        let mut st = self.state.lock().unwrap();
        while st.next_shell <= norm {
            let s = st.next_shell;
            self.fill_shell(&mut st, s);
            st.next_shell += 1;
        }
        st.sets[z].clone()
    }

    fn fill_shell(&self, st: &mut SpiralState, s: i64) {
        let b = self.g.dim();
        let side = 2 * s + 1;
        for q in PointIter::new(vec![side; b]) {
            let z: Point = q.iter().map(|c| c - s).collect();
            if z.iter().map(|c| c.abs()).max().unwrap_or(0) != s {
                continue;
            }
            let mut used = BTreeSet::new();
            for dlt in &self.diffs {
                let w: Point = z.iter().zip(dlt).map(|(a, b)| a + b).collect();
                if let Some(v) = st.sets.get(&w) {
                    used.extend(v.iter().copied());
                }
            }
            let want = self.g.eval(&z) as usize;
            let chosen: Vec<usize> = (1..=self.family).filter(|c| !used.contains(c)).take(want).collect();
            assert_eq!(chosen.len(), want, "family size was checked against the greedy bound");
            st.sets.insert(z, chosen);
        }
    }
}

/// Tiling of `Z^b x G x B^d` (or `Z_P x ..` for `b = 1`) by `T` on the
/// first block and `A` on the rest.
pub struct Holes {
    pub tile: Arc<TileSpec>,
    pub denser: Arc<Denser>,
    pub plan: CoverPlan,
}

impl Holes {
    pub fn new(tile: Arc<TileSpec>, denser: Arc<Denser>) -> Result<Holes> {
        let t = denser.dens.tile.len();
        if t < 2 {
            return Err(Error::Param("a one-point tile needs no hole covering".into()));
        }
        let plan = cover_holes(&tile, t, denser.d)?;
        Ok(Holes { tile, denser, plan })
    }

    /// Rebuilds a level around a stored one-dimensional plan.
    pub fn with_plan(tile: Arc<TileSpec>, denser: Arc<Denser>, plan: PeriodicPlan) -> Result<Holes> {
        let d = denser.d;
        if tile.dim() != 1 || plan.sets.len() != plan.period || plan.period == 0 {
            return Err(Error::Certificate("periodic plan does not match its tile".into()));
        }
        if plan.sets.iter().flatten().any(|&i| i == 0 || i > d) {
            return Err(Error::Certificate("plan uses an index outside the family".into()));
        }
        Ok(Holes { tile, denser, plan: CoverPlan::Periodic(plan) })
    }

    pub fn signature(&self) -> Result<Signature> {
        let moduli = match self.plan.period() {
            Some(p) => vec![Some(p as i64)],
            None => vec![None; self.tile.dim()],
        };
        let mut blocks = vec![Block { tile: self.tile.clone(), moduli }];
        blocks.extend(self.denser.dens.sig(self.denser.d + 1).blocks().iter().cloned());
        Signature::new(blocks)
    }

    fn reduce(&self, mut z: Point) -> Point {
        if let Some(p) = self.plan.period() {
            z[0] = z[0].rem_euclid(p as i64);
        }
        z
    }

    pub fn locate(&self, p: &[i64]) -> LocateResult {
        let b = self.tile.dim();
        let gb = self.denser.dens.b();
        let d = self.denser.d;
        let (z, rest) = p.split_at(b);
        let cls = self.denser.dens.classify(&rest[gb..], d)?;
        if let Some(i) = cls.which_c(0, d) {
            for y in self.tile.points() {
                let zy = self.reduce(sub(z, y));
                if self.plan.at(&zy).contains(&i) {
                    let mut offset = zy;
                    offset.extend_from_slice(rest);
                    return Ok(Placement::new(0, offset));
                }
            }
        }
        let s = self.plan.slice(&self.tile, z);
        // Only a malformed stored plan can fail here; report the point as uncovered.
        if self.denser.check_family(&s).is_err() {
            return Err(LocateError::OutsideRegion);
        }
        let pl = self.denser.locate(&s, rest)?;
        let mut offset = z.to_vec();
        offset.extend(pl.offset);
        Ok(Placement::new(pl.block + 1, offset))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{verify_construction, verify_sampled_in, Construction, NodeKind};
    use crate::general::dens::Dens;

    #[test]
    fn periodic_plan_example() {
        let tile = TileSpec::from_1d(&[0, 2]).unwrap();
        let CoverPlan::Periodic(plan) = cover_holes(&tile, 2, 8).unwrap() else { panic!() };
        assert_eq!(plan.period % 4, 0);
        let pts = [0, 2];
        for x in 0..plan.period as i64 {
            let slice = CoverPlan::Periodic(plan.clone()).slice(&tile, &[x]);
            assert_eq!(slice.len() % 2, 1);
            let distinct: BTreeSet<_> = slice.iter().collect();
            assert_eq!(distinct.len(), slice.len());
            assert_eq!(slice.len(), pts.iter().map(|y| plan.g.at(x - y) as usize).sum::<usize>());
        }
        assert!(matches!(cover_holes(&tile, 2, 3), Err(Error::FamilyTooSmall { need: 4, have: 3 })));
    }

    #[test]
    fn spiral_plan_slices() {
        let tile = TileSpec::new(vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let plan = cover_holes(&tile, 3, 18).unwrap();
        for x in -6..6 {
            for y in -6..6 {
                let s = plan.slice(&tile, &[x, y]);
                assert_eq!(s.len() % 3, 1);
                let distinct: BTreeSet<_> = s.iter().collect();
                assert_eq!(distinct.len(), s.len());
            }
        }
    }

    fn holes_node(t: &[i64], group: i64, a: &[i64], d0: usize) -> Construction {
        let tile = Arc::new(TileSpec::from_1d(t).unwrap());
        let a = Arc::new(TileSpec::raw(a.iter().map(|&x| vec![x]).collect()).unwrap());
        let dens = Arc::new(Dens::new(vec![group], a).unwrap());
        let denser = Arc::new(Denser::new(dens, d0).unwrap());
        let h = Holes::new(tile, denser).unwrap();
        let sig = Arc::new(h.signature().unwrap());
        Construction::from_kind(sig, NodeKind::Holes(h))
    }

    #[test]
    fn holes_level_exhaustive() {
        let c = holes_node(&[0, 2], 3, &[0, 2], 4);
        let NodeKind::Holes(h) = c.kind() else { unreachable!() };
        assert_eq!((h.denser.d, h.plan.period()), (10, Some(12)));
        let res = verify_construction(&c, |_| true, 1 << 22).unwrap();
        assert!(res.ok, "{:?}", res.violations);
    }

    #[test]
    fn holes_level_sampled() {
        let c = holes_node(&[0, 1, 3], 4, &[0, 1, 3], 18);
        let rep = verify_sampled_in(&c, 3000, 7, 16);
        assert!(rep.ok, "{:?}", rep.violations);
        let tile = Arc::new(TileSpec::from_1d(&[0]).unwrap());
        let a = Arc::new(TileSpec::raw(vec![vec![0]]).unwrap());
        let dens = Arc::new(Dens::new(vec![2], a).unwrap());
        let denser = Arc::new(Denser::new(dens, 1).unwrap());
        assert!(Holes::new(tile, denser).is_err());
    }
}
