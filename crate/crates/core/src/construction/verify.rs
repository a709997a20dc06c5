use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use super::Construction;
use crate::error::{Error, LocateError, Result};
use crate::space::{cover, Placement, Point, Signature};

const MAX_REPORTED: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Uncovered { point: Point },
    Overlap { point: Point, count: u32 },
    Locate { point: Point, error: String },
    NotContained { point: Point, placement: Placement },
    Inconsistent { point: Point, first: Placement, second: Placement },
    Unexpected { point: Point, placement: Placement },
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub points: u128,
    pub placements: usize,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub ok: bool,
    pub samples: usize,
    pub seed: u64,
    pub violations: Vec<Violation>,
}

fn decode(mut idx: u128, moduli: &[i64]) -> Point {
    let mut p = vec![0; moduli.len()];
    for a in (0..moduli.len()).rev() {
        let m = moduli[a] as u128;
        p[a] = (idx % m) as i64;
        idx /= m;
    }
    p
}

fn encode(p: &[i64], moduli: &[i64]) -> usize {
    p.iter().zip(moduli).fold(0usize, |acc, (&x, &m)| acc * m as usize + x as usize)
}

fn finite_moduli(sig: &Signature) -> Result<Vec<i64>> {
    sig.moduli()
        .iter()
        .map(|m| m.ok_or(Error::LimitExceeded { points: u128::MAX, limit: 0 }))
        .collect()
}

/// Counts how often each point of a finite frame is covered by
/// `placements`; passes iff every count is one.
pub fn verify_exhaustive(sig: &Signature, placements: &[Placement], limit: u128) -> Result<VerifyReport> {
    let moduli = finite_moduli(sig)?;
    let size = sig.finite_size().unwrap();
    if size > limit {
        return Err(Error::LimitExceeded { points: size, limit });
    }
    let mut counts = vec![0u32; size as usize];
    for pl in placements {
        if pl.block >= sig.num_blocks() || pl.offset.len() != sig.num_axes() {
            return Err(Error::Certificate("placement does not fit the space".into()));
        }
        for q in cover(pl, sig) {
            counts[encode(&q, &moduli)] += 1;
        }
    }
    let mut violations = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        if c != 1 && violations.len() < MAX_REPORTED {
            let point = decode(i as u128, &moduli);
            violations.push(if c == 0 {
                Violation::Uncovered { point }
            } else {
                Violation::Overlap { point, count: c }
            });
        }
    }
    let ok = counts.iter().all(|&c| c == 1);
    Ok(VerifyReport { ok, points: size, placements: placements.len(), violations })
}

/// Checks the placement found for `p` covers `p` and that every point it
/// covers locates back to it. This holding everywhere in a region means the
/// located placements partition that region.
pub fn check_local(c: &Construction, p: &[i64]) -> std::result::Result<Option<Placement>, Violation> {
    let sig = c.sig();
    let pl = match c.locate(p) {
        Ok(pl) => pl,
        Err(LocateError::OutsideRegion | LocateError::PointInHole) => return Ok(None),
    };
    let points = cover(&pl, sig);
    if !points.iter().any(|q| q == p) {
        return Err(Violation::NotContained { point: p.to_vec(), placement: pl });
    }
    for q in points {
        match c.locate(&q) {
            Ok(other) if other == pl => {}
            Ok(other) => return Err(Violation::Inconsistent { point: q, first: pl, second: other }),
            Err(e) => return Err(Violation::Locate { point: q, error: e.to_string() }),
        }
    }
    Ok(Some(pl))
}

/// Walks every point of a finite frame: points with `expected(p)` must be
/// tiled consistently, the rest must be reported as outside or hole.
pub fn verify_construction<F>(c: &Construction, expected: F, limit: u128) -> Result<VerifyReport>
where
    F: Fn(&[i64]) -> bool + Sync,
{
    let sig = c.sig();
    let moduli = finite_moduli(sig)?;
    let size = sig.finite_size().unwrap();
    if size > limit {
        return Err(Error::LimitExceeded { points: size, limit });
    }
    let results: Vec<(Option<Violation>, bool)> = (0..size as u64)
        .into_par_iter()
        .map(|i| {
            let p = decode(i as u128, &moduli);
            let want = expected(&p);
            match check_local(c, &p) {
                Err(v) => (Some(v), false),
                Ok(Some(pl)) if !want => (Some(Violation::Unexpected { point: p, placement: pl }), false),
                Ok(Some(pl)) => {
                    let first = is_canonical(&pl, &p, sig);
                    (None, first)
                }
                Ok(None) if want => (Some(Violation::Uncovered { point: p }), false),
                Ok(None) => (None, false),
            }
        })
        .collect();
    let placements = results.iter().filter(|r| r.1).count();
    let violations: Vec<Violation> =
        results.into_iter().filter_map(|r| r.0).take(MAX_REPORTED).collect();
    Ok(VerifyReport { ok: violations.is_empty(), points: size, placements, violations })
}

// Each placement is counted once, at the lexicographically first point it covers.
fn is_canonical(pl: &Placement, p: &[i64], sig: &Signature) -> bool {
    cover(pl, sig).iter().min().is_some_and(|m| m == p)
}

/// Samples points and applies [`check_local`]; every sample must be covered. Free axes are drawn from
/// `[-window, window)`. Results do not depend on the thread count.
pub fn verify_sampled_in(c: &Construction, samples: usize, seed: u64, window: i64) -> SampleReport {
    let moduli = c.sig().moduli().to_vec();
    let violations: Vec<Violation> = (0..samples)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = SplitMix64::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let p: Point = moduli
                .iter()
                .map(|m| match m {
                    Some(m) => (rng.next_u64() % *m as u64) as i64,
                    None => (rng.next_u64() % (2 * window as u64)) as i64 - window,
                })
                .collect();
            match check_local(c, &p) {
                Ok(Some(_)) => None,
                Ok(None) => Some(Violation::Uncovered { point: p }),
                Err(v) => Some(v),
            }
        })
        .collect();
    let ok = violations.is_empty();
    SampleReport { ok, samples, seed, violations: violations.into_iter().take(MAX_REPORTED).collect() }
}

/// [`verify_sampled_in`] with a window of a few periods.
pub fn verify_sampled(c: &Construction, samples: usize, seed: u64) -> SampleReport {
    let window = c.periods().iter().flatten().copied().max().unwrap_or(1).max(8) * 4;
    verify_sampled_in(c, samples, seed, window)
}
