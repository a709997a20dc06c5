//! Solutions of `sum_{y in T} g(x - y) = f(x) (mod t)` on `Z^b`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, Weak};

use crate::error::{Error, Result};
use crate::simple::PeriodicFn;
use crate::space::Point;

pub type Target = Arc<dyn Fn(&[i64]) -> i64 + Send + Sync>;

/// The periodic solution for a constant target `c` on `Z`, from the zero
/// band below the tile. The recurrence is invertible, so the orbit of the
/// zero window is a pure cycle; `max_period` caps its length.
pub fn periodic_deconvolution(tile: &[i64], t: i64, c: i64, max_period: usize) -> Result<PeriodicFn> {
    if tile.is_empty() || t < 1 {
        return Err(Error::Param("deconvolution needs a non-empty tile and t >= 1".into()));
    }
    let lo = *tile.iter().min().unwrap();
    let shifted: Vec<i64> = tile.iter().map(|y| y - lo).filter(|&y| y != 0).collect();
    let w = tile.iter().max().unwrap() - lo;
    let mut values: Vec<i64> = Vec::new();
    loop {
        let n = values.len() as i64;
        let rest: i64 = shifted.iter().filter(|&&y| y <= n).map(|&y| values[(n - y) as usize]).sum();
        values.push((c - rest).rem_euclid(t));
        let len = values.len();
        // Back at the zero window: the next period starts here.
        if values[len.saturating_sub(w as usize)..].iter().all(|&v| v == 0) {
            break;
        }
        if len >= max_period {
            return Err(Error::LimitExceeded { points: len as u128 + 1, limit: max_period as u128 });
        }
    }
    // `values` holds `g'(n) = g(n - lo)`.
    let p = values.len();
    let mut out = vec![0; p];
    for (n, v) in values.into_iter().enumerate() {
        out[(n as i64 - lo).rem_euclid(p as i64) as usize] = v;
    }
    Ok(PeriodicFn { modulus: t, values: out })
}

/// A lazily evaluated solution on `Z^b` following the row-by-row
/// recursion on the last coordinate. Every value is computed once.
pub struct MultiDimFn {
    pub tile: Vec<Point>,
    pub modulus: i64,
    dim: usize,
    /// Minimum last coordinate of the tile; `g(z) = g'(z + shift e_b)`.
    shift: i64,
    /// Last-coordinate extent of the shifted tile.
    k: i64,
    /// `slices[j]`: points `x` with `(x, j)` in the shifted tile.
    slices: Vec<Vec<Point>>,
    target: Target,
    constant: Option<i64>,
    inner: Inner,
}

enum Inner {
    Point(OnceLock<i64>),
    Line(Mutex<Line>),
    Rows { me: Weak<MultiDimFn>, rows: Mutex<HashMap<i64, Arc<MultiDimFn>>> },
}

#[derive(Default)]
struct Line {
    /// `pos[n] = g'(n)` for `n >= 0`.
    pos: Vec<i64>,
    /// `neg[j] = g'(-k - 1 - j)`.
    neg: Vec<i64>,
}

/// `solve_g` for an arbitrary target.
pub fn solve_g(tile: &[Point], target: Target, t: i64) -> Result<Arc<MultiDimFn>> {
    MultiDimFn::new(tile, target, t, None)
}

/// `solve_g` for a constant target.
pub fn solve_g_const(tile: &[Point], c: i64, t: i64) -> Result<Arc<MultiDimFn>> {
    MultiDimFn::new(tile, Arc::new(move |_: &[i64]| c), t, Some(c))
}

impl MultiDimFn {
    fn new(tile: &[Point], target: Target, t: i64, constant: Option<i64>) -> Result<Arc<Self>> {
        if tile.is_empty() || t < 1 {
            return Err(Error::Param("deconvolution needs a non-empty tile and t >= 1".into()));
        }
        let dim = tile[0].len();
        if tile.iter().any(|p| p.len() != dim) {
            return Err(Error::RaggedTile);
        }
        if dim == 0 {
            return Ok(Arc::new(MultiDimFn {
                tile: tile.to_vec(),
                modulus: t,
                dim,
                shift: 0,
                k: 0,
                slices: vec![vec![vec![]]],
                target,
                constant,
                inner: Inner::Point(OnceLock::new()),
            }));
        }
        let shift = tile.iter().map(|p| p[dim - 1]).min().unwrap();
        let k = tile.iter().map(|p| p[dim - 1]).max().unwrap() - shift;
        let mut slices = vec![Vec::new(); k as usize + 1];
        for p in tile {
            slices[(p[dim - 1] - shift) as usize].push(p[..dim - 1].to_vec());
        }
        let tile = tile.to_vec();
        Ok(Arc::new_cyclic(|me| MultiDimFn {
            tile,
            modulus: t,
            dim,
            shift,
            k,
            slices,
            target,
            constant,
            inner: if dim == 1 {
                Inner::Line(Mutex::new(Line::default()))
            } else {
                Inner::Rows { me: me.clone(), rows: Mutex::new(HashMap::new()) }
            },
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `g(x)`.
    pub fn eval(&self, x: &[i64]) -> i64 {
        assert_eq!(x.len(), self.dim, "point dimension");
        if self.dim == 0 {
            let Inner::Point(v) = &self.inner else { unreachable!() };
            return *v.get_or_init(|| (self.target)(&[]).rem_euclid(self.modulus));
        }
        let n = x[self.dim - 1] + self.shift;
        self.eval_shifted(&x[..self.dim - 1], n)
    }

    /// `sum_{y in T} g(x - y) mod t`.
    pub fn convolve_at(&self, x: &[i64]) -> i64 {
        self.tile
            .iter()
            .map(|y| {
                let z: Point = x.iter().zip(y).map(|(a, b)| a - b).collect();
                self.eval(&z)
            })
            .sum::<i64>()
            .rem_euclid(self.modulus)
    }

    /// For `b = 1` and a constant target, the same function as a periodic
    /// certificate.
    pub fn periodic(&self, max_period: usize) -> Option<Result<PeriodicFn>> {
        let c = self.constant?;
        if self.dim != 1 {
            return None;
        }
        let tile: Vec<i64> = self.tile.iter().map(|p| p[0]).collect();
        Some(periodic_deconvolution(&tile, self.modulus, c, max_period))
    }

    // g'(x, n) in shifted coordinates.
    fn eval_shifted(&self, x: &[i64], n: i64) -> i64 {
        if (-self.k..0).contains(&n) {
            return 0;
        }
        match &self.inner {
            Inner::Line(line) => self.line_at(line, n),
            Inner::Rows { me, rows } => {
                let row = {
                    let mut rows = rows.lock().unwrap();
                    rows.entry(n).or_insert_with(|| self.make_row(me.clone(), n)).clone()
                };
                row.eval(x)
            }
            Inner::Point(_) => unreachable!(),
        }
    }

    fn make_row(&self, me: Weak<MultiDimFn>, n: i64) -> Arc<MultiDimFn> {
        let k = self.k;
        let (tile, base, js): (Vec<Point>, i64, Vec<i64>) = if n >= 0 {
            (self.slices[0].clone(), n, (1..=k).collect())
        } else {
            (self.slices[k as usize].clone(), n + k, (0..k).collect())
        };
        let slices: Vec<(i64, Vec<Point>)> =
            js.into_iter().map(|j| (j, self.slices[j as usize].clone())).collect();
        let f = self.target.clone();
        let target: Target = Arc::new(move |x: &[i64]| {
            let me = me.upgrade().expect("row outlives its parent");
            let mut full = x.to_vec();
            full.push(base);
            let mut v = f(&full);
            for (j, zs) in &slices {
                for z in zs {
                    let y: Point = x.iter().zip(z).map(|(a, b)| a - b).collect();
                    v -= me.eval_shifted(&y, base - j);
                }
            }
            v
        });
        MultiDimFn::new(&tile, target, self.modulus, None).expect("slice of a valid tile")
    }

    fn line_at(&self, line: &Mutex<Line>, n: i64) -> i64 {
        let k = self.k;
        let t = self.modulus;
        let mut guard = line.lock().unwrap();
        let l = &mut *guard;
        let coeff = |j: i64| self.slices[j as usize].len() as i64;
        if n >= 0 {
            while l.pos.len() as i64 <= n {
                let m = l.pos.len() as i64;
                let mut v = (self.target)(&[m]);
                for j in 1..=k {
                    let c = coeff(j);
                    if c != 0 && m - j >= 0 {
                        v -= c * l.pos[(m - j) as usize];
                    }
                }
                l.pos.push(v.rem_euclid(t));
            }
            l.pos[n as usize]
        } else {
            let idx = (-k - 1 - n) as usize;
            while l.neg.len() <= idx {
                let m = -k - 1 - l.neg.len() as i64;
                let mut v = (self.target)(&[m + k]);
                for j in 0..k {
                    let c = coeff(j);
                    let at = m + k - j;
                    if c != 0 && at < -k {
                        v -= c * l.neg[(-k - 1 - at) as usize];
                    }
                }
                l.neg.push(v.rem_euclid(t));
            }
            l.neg[idx]
        }
    }
}
