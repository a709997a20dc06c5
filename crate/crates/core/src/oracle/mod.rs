//! Exact-cover search over finite tori and boxes, obstruction proofs of
//! non-tilability, and the counting bound for two-interval tiles.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use serde::Serialize;

mod dlx;

use crate::construction::{lift, Construction};
use crate::error::{Error, Result};
use crate::space::{AxisMap, Block, Placement, Point, PointIter, Projection, Signature, TileSpec};

pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const MAX_CELLS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Torus(Vec<i64>),
    Box { extent: Vec<i64>, overhang: bool },
}

impl Domain {
    pub fn dims(&self) -> &[i64] {
        match self {
            Domain::Torus(m) => m,
            Domain::Box { extent, .. } => extent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    Translate,
    Permute,
    /// Signed axis permutations.
    Full,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Branching {
    #[default]
    FirstCell,
    FewestCandidates,
}

#[derive(Clone, Debug)]
pub struct SearchProblem {
    pub tile: TileSpec,
    pub domain: Domain,
    pub symmetry: Symmetry,
    pub branching: Branching,
}

impl SearchProblem {
    pub fn new(tile: TileSpec, domain: Domain, symmetry: Symmetry) -> Self {
        SearchProblem { tile, domain, symmetry, branching: Branching::FirstCell }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Sat,
    Unsat,
    Timeout,
}

/// A copy of the tile: orientation index into [`SearchResult::orientations`]
/// plus translation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Copy {
    pub orient: usize,
    pub offset: Point,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub status: Status,
    pub orientations: Vec<Vec<Point>>,
    pub witness: Vec<Copy>,
    pub nodes: u64,
    pub budget: u64,
    pub elapsed_ms: u128,
}

impl SearchResult {
    /// The witness as placements on a one-block torus, when it uses
    /// translations only.
    pub fn torus_placements(&self, problem: &SearchProblem) -> Option<(Signature, Vec<Placement>)> {
        let Domain::Torus(moduli) = &problem.domain else { return None };
        if self.status != Status::Sat || self.witness.iter().any(|c| c.orient != 0) {
            return None;
        }
        let tile = TileSpec::new(self.orientations[0].clone()).ok()?;
        if *tile.points() != self.orientations[0] {
            return None;
        }
        let block = Block { tile: tile.into(), moduli: moduli.iter().map(|&m| Some(m)).collect() };
        let sig = Signature::new(vec![block]).ok()?;
        let pls = self.witness.iter().map(|c| Placement::new(0, c.offset.clone())).collect();
        Some((sig, pls))
    }
}

/// Lifts a translate-only torus witness to a periodic tiling of `Z^d`.
pub fn lift_witness(problem: &SearchProblem, result: &SearchResult) -> Result<Construction> {
    let (sig, pls) = result
        .torus_placements(problem)
        .ok_or_else(|| Error::Param("needs a translate-only torus witness".into()))?;
    let block = sig.block(0);
    let proj = Projection { axes: block.moduli.iter().map(|m| AxisMap::Reduce(m.unwrap())).collect() };
    let tile = block.tile.clone();
    lift(Construction::explicit(Arc::new(sig), pls), vec![Some((tile, proj))])
}

/// Every image of the tile in `Z^d` under the symmetry mode, normalized to
/// non-negative coordinates with minimum zero, sorted and deduplicated.
/// The tile itself comes first.
pub fn orientations(tile: &TileSpec, d: usize, symmetry: Symmetry) -> Result<Vec<Vec<Point>>> {
    let b = tile.dim();
    if b > d {
        return Err(Error::Param(format!("tile has dimension {b}, domain {d}")));
    }
    let base: Vec<Point> = tile
        .points()
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.resize(d, 0);
            q
        })
        .collect();
    let mut perms: Vec<Vec<usize>> = vec![(0..d).collect()];
    if symmetry != Symmetry::Translate {
        perms = permutations(d);
    }
    let signs: Vec<Vec<i64>> = if symmetry == Symmetry::Full {
        (0..1u32 << d).map(|m| (0..d).map(|a| if m >> a & 1 == 1 { -1 } else { 1 }).collect()).collect()
    } else {
        vec![vec![1; d]]
    };
    let mut seen = BTreeSet::new();
    let identity = normalize(base.clone());
    for perm in &perms {
        for s in &signs {
            let img = base.iter().map(|p| (0..d).map(|a| s[a] * p[perm[a]]).collect()).collect();
            let img = normalize(img);
            if img != identity {
                seen.insert(img);
            }
        }
    }
    let mut out = vec![identity];
    out.extend(seen);
    Ok(out)
}

fn normalize(mut pts: Vec<Point>) -> Vec<Point> {
    let d = pts[0].len();
    for a in 0..d {
        let lo = pts.iter().map(|p| p[a]).min().unwrap();
        for p in pts.iter_mut() {
            p[a] -= lo;
        }
    }
    pts.sort();
    pts
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

struct Candidate {
    copy: Copy,
    cells: Vec<usize>,
    ext: Vec<Point>,
}

struct Search {
    cands: Vec<Candidate>,
    by_cell: Vec<Vec<usize>>,
    covered: FixedBitSet,
    ext: HashSet<Point>,
}

impl Search {
    fn fits(&self, c: usize) -> bool {
        let cand = &self.cands[c];
        cand.cells.iter().all(|&i| !self.covered[i]) && cand.ext.iter().all(|p| !self.ext.contains(p))
    }

    fn apply(&mut self, c: usize) {
        let cand = &self.cands[c];
        for &i in &cand.cells {
            self.covered.insert(i);
        }
        for p in &cand.ext {
            self.ext.insert(p.clone());
        }
    }

    fn undo(&mut self, c: usize) {
        let cand = &self.cands[c];
        for &i in &cand.cells {
            self.covered.set(i, false);
        }
        for p in &cand.ext {
            self.ext.remove(p);
        }
    }
}

fn index(p: &[i64], dims: &[i64]) -> usize {
    p.iter().zip(dims).fold(0, |acc, (&x, &m)| acc * m as usize + x as usize)
}

fn build(problem: &SearchProblem, orients: &[Vec<Point>]) -> Result<Search> {
    let dims = problem.domain.dims().to_vec();
    if dims.iter().any(|&m| m < 1) {
        return Err(Error::Param("domain sizes must be at least 1".into()));
    }
    let n = dims.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m as usize)).unwrap_or(usize::MAX);
    if n > MAX_CELLS {
        return Err(Error::DomainTooLarge(n));
    }
    let mut ids: HashMap<Copy, usize> = HashMap::new();
    let mut cands: Vec<Candidate> = Vec::new();
    let mut by_cell: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut torus_sets: HashMap<Vec<usize>, usize> = HashMap::new();
    for cell in PointIter::new(dims.clone()) {
        let ci = index(&cell, &dims);
        let mut here = Vec::new();
        for (o, pts) in orients.iter().enumerate() {
            for t in pts {
                let mut offset: Point = cell.iter().zip(t).map(|(c, t)| c - t).collect();
                if let Domain::Torus(m) = &problem.domain {
                    for (x, m) in offset.iter_mut().zip(m) {
                        *x = x.rem_euclid(*m);
                    }
                }
                let copy = Copy { orient: o, offset };
                if let Some(&id) = ids.get(&copy) {
                    here.push(id);
                    continue;
                }
                let Some(cand) = candidate(&problem.domain, &dims, pts, &copy) else { continue };
                if matches!(problem.domain, Domain::Torus(_)) {
                    if let Some(&id) = torus_sets.get(&cand.cells) {
                        ids.insert(copy, id);
                        here.push(id);
                        continue;
                    }
                    torus_sets.insert(cand.cells.clone(), cands.len());
                }
                ids.insert(copy, cands.len());
                here.push(cands.len());
                cands.push(cand);
            }
        }
        here.sort_by(|&a, &b| cands[a].copy.cmp(&cands[b].copy));
        here.dedup();
        by_cell[ci] = here;
    }
    Ok(Search { cands, by_cell, covered: FixedBitSet::with_capacity(n), ext: HashSet::new() })
}

fn candidate(domain: &Domain, dims: &[i64], pts: &[Point], copy: &Copy) -> Option<Candidate> {
    let mut cells = Vec::with_capacity(pts.len());
    let mut ext = Vec::new();
    for t in pts {
        let q: Point = t.iter().zip(&copy.offset).map(|(t, x)| t + x).collect();
        match domain {
            Domain::Torus(m) => {
                let r: Point = q.iter().zip(m).map(|(x, m)| x.rem_euclid(*m)).collect();
                cells.push(index(&r, dims));
            }
            Domain::Box { overhang, .. } => {
                if q.iter().zip(dims).all(|(&x, &m)| (0..m).contains(&x)) {
                    cells.push(index(&q, dims));
                } else if *overhang {
                    ext.push(q);
                } else {
                    return None;
                }
            }
        }
    }
    cells.sort_unstable();
    let len = cells.len();
    cells.dedup();
    if cells.len() < len {
        return None;
    }
    Some(Candidate { copy: copy.clone(), cells, ext })
}

/// Complete backtracking exact cover. Deterministic: the same problem always
/// gives the same witness and node count.
pub fn decide(problem: &SearchProblem, budget: u64) -> Result<SearchResult> {
    let start = Instant::now();
    let d = problem.domain.dims().len();
    let orients = orientations(&problem.tile, d, problem.symmetry)?;
    let mut search = build(problem, &orients)?;
    let n = search.covered.len();
    let finish = |status, witness, nodes| SearchResult {
        status,
        orientations: orients.clone(),
        witness,
        nodes,
        budget,
        elapsed_ms: start.elapsed().as_millis(),
    };
    let exact = !matches!(problem.domain, Domain::Box { overhang: true, .. });
    if exact && n % problem.tile.len() != 0 {
        return Ok(finish(Status::Unsat, Vec::new(), 0));
    }
    let (status, chosen, nodes) = match problem.branching {
        Branching::FirstCell => first_cell(&mut search, budget),
        Branching::FewestCandidates => dlx::solve(&search, budget),
    };
    let mut witness: Vec<Copy> = chosen.iter().map(|&c| search.cands[c].copy.clone()).collect();
    witness.sort();
    Ok(finish(status, witness, nodes))
}

fn first_cell(search: &mut Search, budget: u64) -> (Status, Vec<usize>, u64) {
    // (cell, next candidate position, candidate applied at this level)
    let mut stack: Vec<(usize, usize, Option<usize>)> = Vec::new();
    let mut nodes = 0u64;
    let mut from = 0;
    loop {
        match (from..search.covered.len()).find(|&i| !search.covered[i]) {
            Some(cell) => stack.push((cell, 0, None)),
            None => return (Status::Sat, stack.iter().map(|s| s.2.unwrap()).collect(), nodes),
        }
        loop {
            let Some(&mut (cell, pos, _)) = stack.last_mut() else {
                return (Status::Unsat, Vec::new(), nodes);
            };
            let list = &search.by_cell[cell];
            match (pos..list.len()).find(|&j| search.fits(list[j])) {
                Some(j) => {
                    let c = list[j];
                    nodes += 1;
                    if nodes > budget {
                        return (Status::Timeout, Vec::new(), nodes - 1);
                    }
                    let top = stack.last_mut().unwrap();
                    top.1 = j + 1;
                    top.2 = Some(c);
                    search.apply(c);
                    from = cell + 1;
                    break;
                }
                None => {
                    stack.pop();
                    if let Some(top) = stack.last_mut() {
                        let c = top.2.take().expect("applied candidate");
                        search.undo(c);
                    }
                }
            }
        }
    }
}

/// Independent check that a witness covers the domain exactly.
pub fn check_witness(problem: &SearchProblem, result: &SearchResult) -> bool {
    let dims = problem.domain.dims();
    let mut seen: HashSet<Point> = HashSet::new();
    let mut inside = 0usize;
    for c in &result.witness {
        for t in &result.orientations[c.orient] {
            let mut q: Point = t.iter().zip(&c.offset).map(|(t, x)| t + x).collect();
            let within = match &problem.domain {
                Domain::Torus(m) => {
                    for (x, m) in q.iter_mut().zip(m) {
                        *x = x.rem_euclid(*m);
                    }
                    true
                }
                Domain::Box { overhang, .. } => {
                    let within = q.iter().zip(dims).all(|(&x, &m)| (0..m).contains(&x));
                    if !within && !overhang {
                        return false;
                    }
                    within
                }
            };
            if !seen.insert(q) {
                return false;
            }
            inside += within as usize;
        }
    }
    inside as i64 == dims.iter().product::<i64>()
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum Proof {
    /// No disjoint cover of this box exists, so the tile does not tile `Z^d`.
    Unsat { side: i64, nodes: u64 },
    Inconclusive { largest_side: i64, nodes: u64, timed_out: bool },
}

/// Searches cubes of growing side, copies allowed to overhang and taken up
/// to all isometries, for one that cannot be covered.
pub fn prove_not_tiles(tile: &TileSpec, d: usize, max_box: i64, budget: u64) -> Result<Proof> {
    prove_not_tiles_with(tile, d, max_box, budget, Branching::FirstCell)
}

pub fn prove_not_tiles_with(tile: &TileSpec, d: usize, max_box: i64, budget: u64, branching: Branching) -> Result<Proof> {
    let mut total = 0u64;
    let mut largest = 0;
    for side in 1..=max_box {
        let domain = Domain::Box { extent: vec![side; d], overhang: true };
        let mut problem = SearchProblem::new(tile.clone(), domain, Symmetry::Full);
        problem.branching = branching;
        let r = match decide(&problem, budget - total) {
            Err(Error::DomainTooLarge(_)) => break,
            r => r?,
        };
        total += r.nodes;
        largest = side;
        match r.status {
            Status::Unsat => return Ok(Proof::Unsat { side, nodes: total }),
            Status::Timeout => return Ok(Proof::Inconclusive { largest_side: side, nodes: total, timed_out: true }),
            Status::Sat => {}
        }
    }
    Ok(Proof::Inconclusive { largest_side: largest, nodes: total, timed_out: false })
}

/// Two intervals of length `k`, `k^2 - 1` apart, with every `k`-th point of
/// the gap present.
pub fn two_interval_tile(k: i64) -> Result<TileSpec> {
    if k < 2 {
        return Err(Error::Param("k must be at least 2".into()));
    }
    let mut xs: Vec<i64> = (0..k).collect();
    xs.extend((1..k).map(|j| k - 1 + j * k));
    let second = k + k * k - 1;
    xs.extend(second..second + k);
    TileSpec::from_1d(&xs)
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityBound {
    pub k: i64,
    pub d: usize,
    pub tile_size: usize,
    pub lhs: i64,
    pub rhs: i64,
    pub ruled_out: bool,
}

/// Whether the counting argument rules out a tiling of `Z^d` by
/// [`two_interval_tile`]: `d |T| < k^2 + 2k - 1`.
pub fn density_bound(k: i64, d: usize) -> Result<DensityBound> {
    if d == 0 {
        return Err(Error::Param("d must be at least 1".into()));
    }
    let tile = two_interval_tile(k)?;
    let lhs = d as i64 * tile.len() as i64;
    let rhs = k * k + 2 * k - 1;
    Ok(DensityBound { k, d, tile_size: tile.len(), lhs, rhs, ruled_out: lhs < rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{verify_exhaustive, Certificate, Meta};
    use crate::space::parse_tile;

    fn s_tetromino() -> TileSpec {
        TileSpec::new(vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 1]]).unwrap()
    }

    #[test]
    fn s_tetromino_torus() {
        let p = SearchProblem::new(s_tetromino(), Domain::Torus(vec![4, 2]), Symmetry::Translate);
        let r = decide(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.status, Status::Sat);
        let offsets: Vec<Point> = r.witness.iter().map(|c| c.offset.clone()).collect();
        assert_eq!(offsets, vec![vec![0, 0], vec![2, 0]]);
        let (sig, pls) = r.torus_placements(&p).unwrap();
        assert!(verify_exhaustive(&sig, &pls, 1 << 20).unwrap().ok);
        assert!(check_witness(&p, &r));
        let c = lift_witness(&p, &r).unwrap();
        assert_eq!(c.periods(), vec![Some(4), Some(2)]);
        let cert = Certificate::from_construction(c, Meta::default(), 1 << 20).unwrap();
        assert!(cert.verify_exhaustive(1 << 20).unwrap().ok);
    }

    #[test]
    fn small_fixtures() {
        let p = SearchProblem::new(parse_tile("X.X").unwrap(), Domain::Torus(vec![4]), Symmetry::Translate);
        assert_eq!(decide(&p, 1000).unwrap().status, Status::Sat);
        let p = SearchProblem::new(parse_tile("X.X").unwrap(), Domain::Torus(vec![6]), Symmetry::Translate);
        assert_eq!(decide(&p, 1000).unwrap().status, Status::Unsat);
        let b = Domain::Box { extent: vec![30], overhang: true };
        let p = SearchProblem::new(parse_tile("XX.XX").unwrap(), b, Symmetry::Full);
        assert_eq!(decide(&p, DEFAULT_BUDGET).unwrap().status, Status::Unsat);
        let p = SearchProblem::new(parse_tile("X").unwrap(), Domain::Torus(vec![101, 100]), Symmetry::Full);
        assert!(matches!(decide(&p, 10), Err(Error::DomainTooLarge(10100))));
    }

    #[test]
    fn orientation_counts() {
        let t = s_tetromino();
        assert_eq!(orientations(&t, 2, Symmetry::Translate).unwrap().len(), 1);
        assert_eq!(orientations(&t, 2, Symmetry::Permute).unwrap().len(), 2);
        assert_eq!(orientations(&t, 2, Symmetry::Full).unwrap().len(), 4);
        let i = parse_tile("XXX").unwrap();
        assert_eq!(orientations(&i, 3, Symmetry::Full).unwrap().len(), 3);
        assert!(orientations(&t, 1, Symmetry::Full).is_err());
    }

    #[test]
    fn budget_and_determinism() {
        let b = Domain::Box { extent: vec![30], overhang: true };
        let p = SearchProblem::new(parse_tile("XX.XX").unwrap(), b, Symmetry::Full);
        let a = decide(&p, DEFAULT_BUDGET).unwrap();
        let again = decide(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!((a.nodes, a.witness.clone()), (again.nodes, again.witness));
        let r = decide(&p, 2).unwrap();
        assert_eq!((r.status, r.nodes), (Status::Timeout, 2));
    }

    #[test]
    fn fewest_candidates_agrees() {
        for (s, m) in [("XX.X", 8), ("X..X", 6), ("XX.XX", 10), ("X.XX", 12)] {
            let mut p = SearchProblem::new(parse_tile(s).unwrap(), Domain::Torus(vec![m]), Symmetry::Translate);
            let a = decide(&p, DEFAULT_BUDGET).unwrap();
            p.branching = Branching::FewestCandidates;
            let b = decide(&p, DEFAULT_BUDGET).unwrap();
            assert_eq!(a.status, b.status, "{s} mod {m}");
            if b.status == Status::Sat {
                assert!(check_witness(&p, &b));
            }
        }
    }

    #[test]
    fn proofs() {
        match prove_not_tiles(&parse_tile("XX.XX").unwrap(), 1, 12, DEFAULT_BUDGET).unwrap() {
            Proof::Unsat { side, .. } => assert!(side <= 12),
            other => panic!("{other:?}"),
        }
        let r = prove_not_tiles(&parse_tile("X").unwrap(), 1, 20, 10_000).unwrap();
        assert!(matches!(r, Proof::Inconclusive { largest_side: 20, timed_out: false, .. }));
    }

    #[test]
    fn density_examples() {
        assert_eq!(two_interval_tile(4).unwrap().render().unwrap(), "XXXX...X...X...X...XXXX");
        for k in 2..8 {
            assert_eq!(two_interval_tile(k).unwrap().len() as i64, 3 * k - 1);
        }
        let r = density_bound(10, 3).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ruled_out), (87, 119, true));
        let r = density_bound(3, 5).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ruled_out), (40, 14, false));
    }

    // Placement subsets of Z_m, checked directly.
    fn brute_force(tile: &[i64], m: i64) -> bool {
        let sets: BTreeSet<u32> = (0..m)
            .filter_map(|x| {
                let mut mask = 0u32;
                for t in tile {
                    let bit = 1 << (t + x).rem_euclid(m);
                    if mask & bit != 0 {
                        return None;
                    }
                    mask |= bit;
                }
                Some(mask)
            })
            .collect();
        let sets: Vec<u32> = sets.into_iter().collect();
        let full = (1u32 << m) - 1;
        (0u32..1 << sets.len()).any(|choice| {
            let mut acc = 0u32;
            for (j, s) in sets.iter().enumerate() {
                if choice >> j & 1 == 1 {
                    if acc & s != 0 {
                        return false;
                    }
                    acc |= s;
                }
            }
            acc == full
        })
    }

    #[test]
    fn agrees_with_brute_force() {
        for k in 1..=4i64 {
            for mask in 0u32..1 << (k - 1) {
                let mut xs = vec![0];
                xs.extend((1..k).filter(|j| mask >> (j - 1) & 1 == 1));
                if *xs.last().unwrap() != k - 1 {
                    continue;
                }
                let tile = TileSpec::from_1d(&xs).unwrap();
                for m in 1..=12 {
                    let p = SearchProblem::new(tile.clone(), Domain::Torus(vec![m]), Symmetry::Translate);
                    let r = decide(&p, DEFAULT_BUDGET).unwrap();
                    assert_eq!(r.status == Status::Sat, brute_force(&xs, m), "{xs:?} mod {m}");
                    if let Some((sig, pls)) = r.torus_placements(&p) {
                        assert!(verify_exhaustive(&sig, &pls, 1 << 20).unwrap().ok);
                    }
                }
            }
        }
    }
}
