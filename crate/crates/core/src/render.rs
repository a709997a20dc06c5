//! ASCII and SVG drawings of one- and two-dimensional slices of a tiling.

use std::collections::HashMap;
use std::fmt::Write;

use crate::construction::Construction;
use crate::error::{Error, Result};
use crate::space::{Placement, Point};

/// Free axes vary over `base[a] .. base[a] + size[i]`; every other axis is
/// held at its `base` value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub axes: Vec<usize>,
    pub base: Point,
    pub size: Vec<i64>,
}

impl Slice {
    /// The first one or two axes at the origin, sized to one period (or 12
    /// on free axes).
    pub fn default_for(c: &Construction) -> Self {
        let n = c.sig().num_axes();
        let axes: Vec<usize> = (0..n.min(2)).collect();
        let periods = c.periods();
        let size = axes.iter().map(|&a| periods[a].unwrap_or(12).clamp(1, 64)).collect();
        Slice { axes, base: vec![0; n], size }
    }
}

/// Cell labels by placement, numbered in order of first appearance when
/// read row by row. `None` marks uncovered cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub rows: Vec<Vec<Option<usize>>>,
    pub placements: Vec<Placement>,
}

/// Columns run along the first free axis, rows along the second.
pub fn slice_grid(c: &Construction, slice: &Slice) -> Result<Grid> {
    let n = c.sig().num_axes();
    if slice.axes.is_empty() || slice.axes.len() > 2 || slice.size.len() != slice.axes.len() {
        return Err(Error::Param("a slice needs one or two free axes".into()));
    }
    if slice.base.len() != n || slice.axes.iter().any(|&a| a >= n) {
        return Err(Error::PointShape { expected: n, got: slice.base.len() });
    }
    if slice.axes.len() == 2 && slice.axes[0] == slice.axes[1] {
        return Err(Error::Param("free axes must differ".into()));
    }
    if slice.size.iter().any(|&s| !(1..=4096).contains(&s)) {
        return Err(Error::Param("slice sizes must lie in 1..=4096".into()));
    }
    let (w, h) = (slice.size[0], slice.size.get(1).copied().unwrap_or(1));
    let mut ids: HashMap<Placement, usize> = HashMap::new();
    let mut placements = Vec::new();
    let mut rows = Vec::with_capacity(h as usize);
    for y in 0..h {
        let mut row = Vec::with_capacity(w as usize);
        for x in 0..w {
            let mut p = slice.base.clone();
            p[slice.axes[0]] += x;
            if let Some(&a) = slice.axes.get(1) {
                p[a] += y;
            }
            c.sig().reduce_point(&mut p);
            let cell = c.locate(&p).ok().map(|pl| {
                *ids.entry(pl.clone()).or_insert_with(|| {
                    placements.push(pl);
                    placements.len() - 1
                })
            });
            row.push(cell);
        }
        rows.push(row);
    }
    Ok(Grid { rows, placements })
}

fn letter(id: usize) -> char {
    (b'A' + (id % 26) as u8) as char
}

/// One letter per placement, cycling through 26; `.` for uncovered cells.
pub fn ascii(grid: &Grid) -> String {
    let mut out = String::new();
    for row in &grid.rows {
        out.extend(row.iter().map(|c| c.map_or('.', letter)));
        out.push('\n');
    }
    out
}

const CELL: usize = 20;

fn color(id: usize) -> String {
    let hue = (id as f64 * 137.507_764) % 360.0;
    format!("hsl({hue:.1},65%,{}%)", 55 + 10 * (id % 3))
}

pub fn svg(grid: &Grid) -> String {
    let h = grid.rows.len();
    let w = grid.rows.first().map_or(0, Vec::len);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {0} {1}\">\n",
        w * CELL,
        h * CELL
    );
    for (y, row) in grid.rows.iter().enumerate() {
        for (x, cell) in row.iter().enumerate() {
            let fill = cell.map_or_else(|| "white".to_string(), color);
            let _ = writeln!(
                out,
                "  <rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"#333\" stroke-width=\"0.5\"/>",
                x * CELL,
                y * CELL
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{decide, lift_witness, Domain, SearchProblem, Symmetry, DEFAULT_BUDGET};
    use crate::space::{parse_tile, TileSpec};

    fn tetromino() -> Construction {
        let t = TileSpec::new(vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 1]]).unwrap();
        let p = SearchProblem::new(t, Domain::Torus(vec![4, 2]), Symmetry::Translate);
        let r = decide(&p, DEFAULT_BUDGET).unwrap();
        lift_witness(&p, &r).unwrap()
    }

    #[test]
    fn tetromino_pattern() {
        let c = tetromino();
        let slice = Slice { axes: vec![0, 1], base: vec![0, 0], size: vec![8, 4] };
        let g = slice_grid(&c, &slice).unwrap();
        let text = ascii(&g);
        assert_eq!(text.lines().count(), 4);
        // Each label covers four cells of an S shape.
        let mut counts = HashMap::new();
        for row in &g.rows {
            for c in row.iter().flatten() {
                *counts.entry(*c).or_insert(0) += 1;
            }
        }
        assert!(g.rows.iter().all(|r| r.iter().all(Option::is_some)));
        let full: Vec<_> = counts.values().filter(|&&n| n == 4).collect();
        assert!(full.len() >= 4);
        assert_eq!(ascii(&slice_grid(&c, &slice).unwrap()), text);
        assert!(svg(&g).starts_with("<svg"));
    }

    #[test]
    fn one_dimensional_row() {
        let t = parse_tile("X.X").unwrap();
        let p = SearchProblem::new(t, Domain::Torus(vec![4]), Symmetry::Translate);
        let c = lift_witness(&p, &decide(&p, 100).unwrap()).unwrap();
        let g = slice_grid(&c, &Slice::default_for(&c)).unwrap();
        assert_eq!(ascii(&g), "ABAB\n");
    }

    #[test]
    fn bad_slices() {
        let c = tetromino();
        let s = Slice { axes: vec![0, 1, 1], base: vec![0, 0], size: vec![2, 2, 2] };
        assert!(slice_grid(&c, &s).is_err());
        let s = Slice { axes: vec![0, 0], base: vec![0, 0], size: vec![2, 2] };
        assert!(slice_grid(&c, &s).is_err());
    }
}
