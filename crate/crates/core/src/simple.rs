//! Tilings of `Z^d` by an interval with one interior point removed.
//!
//! With `T = [0, k) \ {i - 1}` every copy of `T` in `Z_k` is the torus minus
//! one point. Holes in `Z_k^d` are traded for corners dimension by
//! dimension, a special first axis covers corners along columns, and the
//! resulting tiling of `Z_P x Z_k^(d-1)` is lifted to `Z^d`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use serde_json::json;

use crate::construction::{lift, Certificate, Construction, Meta};
use crate::general::{greedy_periodic, periodic_deconvolution, MAX_PERIOD};
use crate::error::{Error, Result};
use crate::space::{cover, Block, Placement, Point, PointIter, Projection, Signature, TileSpec};

/// A function `Z -> [0, t)` with `value(n) = values[n mod P]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicFn {
    pub modulus: i64,
    pub values: Vec<i64>,
}

impl PeriodicFn {
    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn at(&self, n: i64) -> i64 {
        self.values[n.rem_euclid(self.values.len() as i64) as usize]
    }

    /// `sum_{y in T} f(x - y) mod t` for one `x`.
    pub fn convolve_at(&self, tile: &[i64], x: i64) -> i64 {
        tile.iter().map(|y| self.at(x - y)).sum::<i64>().rem_euclid(self.modulus)
    }
}

/// Column corner sets per residue of the special axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialColumnPlan {
    pub period: usize,
    /// `sets[n]` lists the corner indices carrying a column at residue `n`.
    pub sets: Vec<Vec<usize>>,
}

impl SpecialColumnPlan {
    /// Corners covered by columns through residue `n`.
    pub fn covered_at(&self, tile: &[i64], n: usize) -> Vec<usize> {
        let p = self.period as i64;
        let mut out: Vec<usize> = tile
            .iter()
            .flat_map(|t| self.sets[(n as i64 - t).rem_euclid(p) as usize].iter().copied())
            .collect();
        out.sort();
        out
    }
}

/// Recognizes `[0, k) \ {i - 1}` with `k >= 3`, `2 <= i <= k - 1`.
pub fn punctured_interval(t: &TileSpec) -> Option<(i64, i64)> {
    if t.dim() != 1 {
        return None;
    }
    let k = t.k();
    if k < 3 || t.len() as i64 != k - 1 {
        return None;
    }
    let missing = (0..k).find(|x| !t.contains(&[*x]))?;
    (1..=k - 2).contains(&missing).then_some((k, missing + 1))
}

fn check_params(k: i64, i: i64) -> Result<()> {
    if k < 3 {
        return Err(Error::Param(format!("k = {k} must be at least 3")));
    }
    if !(2..k).contains(&i) {
        return Err(Error::Param(format!("i = {i} must lie in 2..={}", k - 1)));
    }
    Ok(())
}

/// `2k(k - 2)`: corners needed so columns can always be placed greedily.
pub fn ell(k: i64) -> usize {
    (2 * k * (k - 2)) as usize
}

/// `k^e >= n` without overflow.
pub fn pow_at_least(k: i64, e: usize, n: usize) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc *= k as u128;
        if acc >= n as u128 {
            return true;
        }
    }
    acc >= n as u128
}

/// Minimal `d` with `d - 1 - log_k(d - 1) >= 2k(k - 2)`.
pub fn choose_d(k: i64) -> usize {
    let l = ell(k);
    let mut d = l + 1;
    loop {
        let dd = d - 1;
        if dd >= l && dd >= 1 && pow_at_least(k, dd - l, dd) {
            return d;
        }
        d += 1;
    }
}

/// Periodic solution of `sum_{y in T} f(x - y) = 1 (mod k - 1)`, from the
/// forward recurrence started at an all-zero window.
pub fn solve_f(k: i64, i: i64) -> Result<PeriodicFn> {
    check_params(k, i)?;
    let tile: Vec<i64> = (0..k).filter(|&x| x != i - 1).collect();
    periodic_deconvolution(&tile, k - 1, 1, MAX_PERIOD)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Greedy choice of corner sets `S_n` with `|S_n| = f(n)` and `S_m`, `S_n`
/// disjoint whenever `T + m` meets `T + n` (mod the plan period).
pub fn plan_special_column(k: i64, i: i64, f: &PeriodicFn, corners: usize) -> Result<SpecialColumnPlan> {
    check_params(k, i)?;
    let need = ell(k);
    if corners < need {
        return Err(Error::FamilyTooSmall { need, have: corners });
    }
    let period = lcm(f.period(), 2 * k as usize);
    let tile: Vec<i64> = (0..k).filter(|&x| x != i - 1).collect();
    let sets = greedy_periodic(&tile, f, period, &(0..corners).collect::<Vec<_>>())?;
    Ok(SpecialColumnPlan { period, sets })
}

/// Builders for holes in `Z_k^d`, sharing subtrees between calls.
pub struct SimpleBuilder {
    pub k: i64,
    pub i: i64,
    tile: Arc<TileSpec>,
    sigs: Mutex<Vec<Arc<Signature>>>,
    cbo: Mutex<HashMap<Point, Construction>>,
    corners: Mutex<HashMap<(usize, Vec<usize>), Construction>>,
}

impl SimpleBuilder {
    pub fn new(k: i64, i: i64) -> Result<Self> {
        check_params(k, i)?;
        let tile = Arc::new(TileSpec::from_1d(&(0..k).filter(|&x| x != i - 1).collect::<Vec<_>>())?);
        Ok(SimpleBuilder {
            k,
            i,
            tile,
            sigs: Mutex::new(Vec::new()),
            cbo: Mutex::new(HashMap::new()),
            corners: Mutex::new(HashMap::new()),
        })
    }

    /// The normalized tile `[0, k) \ {i - 1}`.
    pub fn tile(&self) -> &Arc<TileSpec> {
        &self.tile
    }

    /// `Z_k^d` with one block per axis.
    pub fn torus(&self, d: usize) -> Arc<Signature> {
        let mut sigs = self.sigs.lock().unwrap();
        while sigs.len() <= d {
            let n = sigs.len();
            sigs.push(Arc::new(Signature::uniform(&self.tile, Some(self.k), n)));
        }
        sigs[d].clone()
    }

    /// Offset of the copy in `Z_k` that misses `x`.
    fn missing_at(&self, x: i64) -> i64 {
        (x - self.i + 1).rem_euclid(self.k)
    }

    fn check_point(&self, x: &[i64]) -> Result<()> {
        if x.iter().any(|c| !(0..self.k).contains(c)) {
            return Err(Error::Param(format!("{x:?} is not a point of Z_{}^{}", self.k, x.len())));
        }
        Ok(())
    }

    /// Tiling of `Z_k^d \ {x}`.
    pub fn cover_but_one(&self, x: &[i64]) -> Result<Construction> {
        if x.is_empty() {
            return Err(Error::Param("d must be at least 1".into()));
        }
        self.check_point(x)?;
        if let Some(c) = self.cbo.lock().unwrap().get(x) {
            return Ok(c.clone());
        }
        let d = x.len();
        let sig = self.torus(d);
        let c = if d == 1 {
            Construction::explicit_holed(sig, vec![Placement::new(0, vec![self.missing_at(x[0])])])
        } else {
            let mut offset = x.to_vec();
            offset[d - 1] = self.missing_at(x[d - 1]);
            let column = Construction::explicit(sig.clone(), vec![Placement::new(d - 1, offset)]);
            let rest = self.cover_but_one(&x[..d - 1])?;
            let slices = Construction::slice(sig.clone(), d - 1, BTreeMap::new(), Some(rest))?;
            Construction::union(sig, vec![column, slices])?
        };
        self.cbo.lock().unwrap().insert(x.to_vec(), c.clone());
        Ok(c)
    }

    /// From a tiling of `Z_k^d \ X` and `x in X`, a tiling of
    /// `Z_k^(d+1) \ ((X \ {x}) x {0} + corner d+1)`.
    pub fn move_point(&self, hole: &[Point], input: &Construction, x: &[i64]) -> Result<Construction> {
        let d = x.len();
        if !hole.iter().any(|h| h == x) {
            return Err(Error::NotInHole(format!("{x:?}")));
        }
        if **input.sig() != *self.torus(d) {
            return Err(Error::ShapeMismatch("move_point input is not a tiling of Z_k^d".into()));
        }
        let sig = self.torus(d + 1);
        let mut offset = x.to_vec();
        offset.push(self.k - self.i);
        let column = Construction::explicit(sig.clone(), vec![Placement::new(d, offset)]);
        let mut arms = BTreeMap::new();
        arms.insert(vec![0], input.clone());
        arms.insert(vec![self.k - 1], self.cover_but_one(&vec![0; d])?);
        let slices = Construction::slice(sig.clone(), d, arms, Some(self.cover_but_one(x)?))?;
        Construction::union(sig, vec![column, slices])
    }

    /// Iterated [`SimpleBuilder::move_point`] over `xs`, in order.
    pub fn exchange_all(&self, hole: &[Point], input: &Construction, xs: &[Point]) -> Result<(Vec<Point>, Construction)> {
        let distinct: BTreeSet<&Point> = xs.iter().collect();
        if distinct.len() != xs.len() {
            return Err(Error::Param("points to exchange must be distinct".into()));
        }
        let mut hole = hole.to_vec();
        let mut c = input.clone();
        for (step, x) in xs.iter().enumerate() {
            let mut x = x.clone();
            x.extend(std::iter::repeat_n(0, step));
            c = self.move_point(&hole, &c, &x)?;
            let d = x.len();
            hole = hole
                .into_iter()
                .filter(|h| *h != x)
                .map(|mut h| {
                    h.push(0);
                    h
                })
                .collect();
            let mut corner = vec![0; d + 1];
            corner[d] = self.k - 1;
            hole.push(corner);
        }
        hole.sort();
        Ok((hole, c))
    }

    /// A hole of `m` points in `Z_k^r`: the origin plus the first copies of
    /// the tiling that misses the origin.
    pub fn hole_of_size(&self, r: usize, m: usize) -> Result<(Vec<Point>, Construction)> {
        let t = (self.k - 1) as usize;
        if m == 0 || !(m - 1).is_multiple_of(t) {
            return Err(Error::Parity { size: m, modulus: t });
        }
        if r == 0 || !pow_at_least(self.k, r, m) {
            return Err(Error::Bound(format!("{m} points do not fit in Z_{}^{r}", self.k)));
        }
        let n = (m - 1) / t;
        let base = self.cover_but_one(&vec![0; r])?;
        let sig = self.torus(r);
        let chosen: Vec<Placement> = if pow_at_least(self.k, r - 1, n) {
            let o = self.missing_at(0);
            PointIter::new(vec![self.k; r - 1])
                .take(n)
                .map(|s| {
                    let mut offset = vec![o];
                    offset.extend(s);
                    Placement::new(0, offset)
                })
                .collect()
        } else {
            base.materialize(u128::MAX)?.into_iter().take(n).collect()
        };
        let mut hole = vec![vec![0; r]];
        for pl in &chosen {
            hole.extend(cover(pl, &sig));
        }
        hole.sort();
        let c = if chosen.is_empty() { base } else { Construction::minus(base, chosen) };
        Ok((hole, c))
    }

    /// Tiling of `Z_k^d` minus the corners with indices in `s` (0-based).
    pub fn removed_corners(&self, d: usize, s: &[usize]) -> Result<Construction> {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        if set.len() != s.len() || set.iter().any(|&j| j >= d) {
            return Err(Error::Param(format!("corner indices {s:?} invalid for d = {d}")));
        }
        let m = set.len();
        let t = (self.k - 1) as usize;
        if m == 0 || !(m - 1).is_multiple_of(t) {
            return Err(Error::Parity { size: m, modulus: t });
        }
        if !pow_at_least(self.k, d - m, d) {
            return Err(Error::Bound(format!("{m} > {d} - log_{}({d})", self.k)));
        }
        let key = (d, set.iter().copied().collect::<Vec<_>>());
        if let Some(c) = self.corners.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let r = d - m;
        let built = if r == 0 {
            self.cover_but_one(&[self.k - 1])?
        } else {
            let (hole, c0) = self.hole_of_size(r, m)?;
            let (_, c) = self.exchange_all(&hole, &c0, &hole)?;
            c
        };
        // Corners r..d sit on the last m axes; move them onto `s`.
        let mut perm = vec![0; d];
        let rest: Vec<usize> = (0..d).filter(|j| !set.contains(j)).collect();
        for (j, &p) in rest.iter().chain(set.iter()).enumerate() {
            perm[j] = p;
        }
        let c = if perm.iter().enumerate().all(|(j, &p)| j == p) {
            built
        } else {
            Construction::embed(built, perm, vec![0; d])?
        };
        self.corners.lock().unwrap().insert(key, c.clone());
        Ok(c)
    }
}

/// Everything the simple pipeline decided, for tracing.
#[derive(Clone, Debug, Serialize)]
pub struct SimpleTrace {
    pub k: i64,
    pub i: i64,
    pub d: usize,
    pub ell: usize,
    pub f: PeriodicFn,
    pub plan: SpecialColumnPlan,
}

/// Tiling of `Z_P x Z_k^(d-1)` by the column tile on axis 0 and `pi(T)`
/// on the others, plus the parameters used.
pub fn torus_tiling(k: i64, i: i64, d: usize) -> Result<(Construction, SimpleTrace)> {
    let b = SimpleBuilder::new(k, i)?;
    let f = solve_f(k, i)?;
    let corners = d - 1;
    let plan = plan_special_column(k, i, &f, corners)?;
    let tile_pts: Vec<i64> = b.tile.points().iter().map(|p| p[0]).collect();
    let p = plan.period;
    let mut blocks = vec![Block::new(b.tile.clone(), Some(p as i64))];
    blocks.extend(b.torus(corners).blocks().iter().cloned());
    let sig = Arc::new(Signature::new(blocks)?);
    let mut columns = Vec::new();
    for (n, s) in plan.sets.iter().enumerate() {
        for &j in s {
            let mut offset = vec![0; d];
            offset[0] = n as i64;
            offset[j + 1] = k - 1;
            columns.push(Placement::new(0, offset));
        }
    }
    let mut arms = BTreeMap::new();
    for n in 0..p {
        let s = plan.covered_at(&tile_pts, n);
        arms.insert(vec![n as i64], b.removed_corners(corners, &s)?);
    }
    let slices = Construction::slice(sig.clone(), 0, arms, None)?;
    let c = Construction::union(sig.clone(), vec![Construction::explicit(sig, columns), slices])?;
    let trace = SimpleTrace { k, i, d, ell: ell(k), f, plan };
    Ok((c, trace))
}

/// The full simple pipeline: a periodic tiling of `Z^d` by `[0,k) \ {i-1}`.
pub fn synthesize(k: i64, i: i64, limit: u128) -> Result<(Certificate, SimpleTrace)> {
    check_params(k, i)?;
    let d = choose_d(k);
    synthesize_in(k, i, d, limit)
}

/// [`synthesize`] with an explicit dimension (must satisfy the corner bound).
pub fn synthesize_in(k: i64, i: i64, d: usize, limit: u128) -> Result<(Certificate, SimpleTrace)> {
    let (torus, trace) = torus_tiling(k, i, d)?;
    let tile = torus.sig().block(0).tile.clone();
    let p = trace.plan.period as i64;
    let mut maps = vec![Some((tile.clone(), Projection::reduce_all(1, p)))];
    maps.extend((1..d).map(|_| Some((tile.clone(), Projection::reduce_all(1, k)))));
    let lifted = lift(torus, maps)?;
    let mut meta = Meta { pipeline: "simple".into(), d, ..Meta::default() };
    meta.extra.insert("k".into(), json!(k));
    meta.extra.insert("i".into(), json!(i));
    meta.extra.insert("tile".into(), json!(tile.describe()));
    meta.extra.insert("f".into(), json!(trace.f.values));
    let cert = Certificate::from_construction(lifted, meta, limit)?;
    Ok((cert, trace))
}
