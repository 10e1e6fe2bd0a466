//! Finite sets of integer cells (lattice animals / polycubes) and the
//! constructions on `Z^d` built from them.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PackingConfig;

/// A finite set of cells of `Z^d`. Each cell is both the center of a
/// unit-diameter ball and the center of a unit cube.
///
/// Cells are kept sorted lexicographically and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeShape {
    dimension: usize,
    cells: Vec<Vec<i64>>,
}

impl LatticeShape {
    pub fn new(dimension: usize, mut cells: Vec<Vec<i64>>) -> Result<Self> {
        if dimension < 1 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if let Some(c) = cells.iter().find(|c| c.len() != dimension) {
            return Err(Error::Domain(format!("cell {c:?} is not {dimension}-dimensional")));
        }
        cells.sort();
        if let Some(w) = cells.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("cell {:?} appears twice", w[0])));
        }
        Ok(LatticeShape { dimension, cells })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cells(&self) -> &[Vec<i64>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Translate so that the lexicographically least cell is the origin.
    pub fn canonical(&self) -> LatticeShape {
        let Some(min) = self.cells.first().cloned() else {
            return self.clone();
        };
        LatticeShape {
            dimension: self.dimension,
            cells: self
                .cells
                .iter()
                .map(|c| c.iter().zip(&min).map(|(x, m)| x - m).collect())
                .collect(),
        }
    }

    pub fn to_packing(&self) -> Result<PackingConfig> {
        PackingConfig::lattice(self.dimension, &self.cells)
    }

    /// Shape text format: one cell per line, comma separated, sorted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            let line: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_text(dimension: usize, text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cell = line
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            cells.push(cell);
        }
        LatticeShape::new(dimension, cells)
    }

    fn cell_set(&self) -> HashSet<&[i64]> {
        self.cells.iter().map(|c| c.as_slice()).collect()
    }
}

/// Number of unordered pairs of cells at distance exactly 1.
pub fn adjacency_count(s: &LatticeShape) -> usize {
    let set = s.cell_set();
    let mut probe = vec![0i64; s.dimension];
    let mut count = 0;
    for c in &s.cells {
        for axis in 0..s.dimension {
            probe.copy_from_slice(c);
            probe[axis] += 1;
            if set.contains(probe.as_slice()) {
                count += 1;
            }
        }
    }
    count
}

/// Exposed facets of the union of unit cubes, counted face by face and checked
/// against `2dn − 2·adjacency_count`.
pub fn cube_union_surface(s: &LatticeShape) -> Result<i64> {
    let set = s.cell_set();
    let mut probe = vec![0i64; s.dimension];
    let mut faces = 0i64;
    for c in &s.cells {
        for axis in 0..s.dimension {
            for step in [-1, 1] {
                probe.copy_from_slice(c);
                probe[axis] += step;
                if !set.contains(probe.as_slice()) {
                    faces += 1;
                }
            }
        }
    }
    let n = s.len() as i64;
    let identity = 2 * s.dimension as i64 * n - 2 * adjacency_count(s) as i64;
    if faces != identity {
        return Err(Error::InternalInconsistency { faces, identity });
    }
    Ok(faces)
}

/// Smallest `k` with `k^d >= n`.
pub fn ceil_root(n: usize, d: usize) -> usize {
    let mut k = (n as f64).powf(1.0 / d as f64).floor().max(1.0) as usize;
    while k.pow(d as u32) < n {
        k += 1;
    }
    while k > 1 && (k - 1).pow(d as u32) >= n {
        k -= 1;
    }
    k
}

/// Near-cubical shape of `n` cells inside the side-`⌈n^(1/d)⌉` cube.
///
/// Cells are added one at a time, each time taking the cell of the cube that
/// gains the most new contacts; ties go to the earliest cell in lexicographic
/// order, which fills the cube layer by layer and row by row.
pub fn quasicube(n: usize, d: usize) -> Result<LatticeShape> {
    if n == 0 || d < 2 {
        return Err(Error::Domain(format!("quasicube needs n >= 1 and d >= 2 (n = {n}, d = {d})")));
    }
    let k = ceil_root(n, d);
    let total = k.pow(d as u32);
    let coords = |mut idx: usize| -> Vec<i64> {
        let mut c = vec![0i64; d];
        for axis in (0..d).rev() {
            c[axis] = (idx % k) as i64;
            idx /= k;
        }
        c
    };
    let stride: Vec<usize> = (0..d).map(|axis| k.pow((d - 1 - axis) as u32)).collect();
    let mut taken = vec![false; total];
    // gain[i] = taken neighbours of cell i
    let mut gain = vec![0usize; total];
    let mut cells = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<usize> = None;
        for i in 0..total {
            if !taken[i] && best.is_none_or(|b| gain[i] > gain[b]) {
                best = Some(i);
            }
        }
        let i = best.expect("cube has room for n cells");
        taken[i] = true;
        let c = coords(i);
        for axis in 0..d {
            if c[axis] > 0 {
                gain[i - stride[axis]] += 1;
            }
            if (c[axis] as usize) + 1 < k {
                gain[i + stride[axis]] += 1;
            }
        }
        cells.push(c);
    }
    LatticeShape::new(d, cells)
}

/// `(3n − contacts(quasicube(n, 3))) / n^(2/3)` at `n = k³`.
pub fn asymptotic_ratio(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("asymptotic_ratio needs k >= 2, got {k}")));
    }
    let n = k.pow(3);
    let contacts = adjacency_count(&quasicube(n, 3)?);
    Ok((3 * n - contacts) as f64 / (k * k) as f64)
}

/// Random connected shape of `n` cells grown from the origin by repeatedly
/// attaching a uniformly chosen free neighbour of a uniformly chosen cell.
pub fn random_animal<R: Rng>(n: usize, d: usize, rng: &mut R) -> LatticeShape {
    let mut cells: Vec<Vec<i64>> = vec![vec![0; d]];
    let mut set: HashSet<Vec<i64>> = cells.iter().cloned().collect();
    while cells.len() < n {
        let base = &cells[rng.gen_range(0..cells.len())];
        let axis = rng.gen_range(0..d);
        let step = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut c = base.clone();
        c[axis] += step;
        if set.insert(c.clone()) {
            cells.push(c);
        }
    }
    LatticeShape::new(d, cells).expect("distinct cells").canonical()
}

/// Random, possibly disconnected, shape of `n` cells in a box of side `side`.
pub fn random_cloud<R: Rng>(n: usize, d: usize, side: i64, rng: &mut R) -> LatticeShape {
    assert!((side as f64).powi(d as i32) >= n as f64, "box too small");
    let mut set = HashSet::new();
    while set.len() < n {
        let c: Vec<i64> = (0..d).map(|_| rng.gen_range(0..side)).collect();
        set.insert(c);
    }
    LatticeShape::new(d, set.into_iter().collect()).expect("distinct cells")
}

/// The full `k × … × k` block.
pub fn block(dims: &[i64]) -> LatticeShape {
    let mut cells = vec![vec![]];
    for &len in dims {
        cells = cells
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (0..len).map(move |x| {
                    let mut c = prefix.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    LatticeShape::new(dims.len(), cells).expect("block cells are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{harborth_ts, thm1_bound};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shape(d: usize, cells: &[&[i64]]) -> LatticeShape {
        LatticeShape::new(d, cells.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn adjacency_examples() {
        assert_eq!(adjacency_count(&block(&[2, 2, 2])), 12);
        assert_eq!(adjacency_count(&block(&[1, 1, 5])), 4);
        assert_eq!(adjacency_count(&block(&[2, 2, 3])), 20);
    }

    #[test]
    fn surface_examples() {
        assert_eq!(cube_union_surface(&block(&[2, 2, 2])).unwrap(), 24);
        assert_eq!(cube_union_surface(&shape(2, &[&[0, 0]])).unwrap(), 4);
        let tromino = shape(2, &[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(cube_union_surface(&tromino).unwrap(), 8);
    }

    #[test]
    fn quasicube_examples() {
        let q = quasicube(9, 2).unwrap();
        assert_eq!(q, block(&[3, 3]));
        assert_eq!(adjacency_count(&q), 12);
        let q = quasicube(8, 3).unwrap();
        assert_eq!(q, block(&[2, 2, 2]));
        assert_eq!(adjacency_count(&q), 12);
        assert_eq!(adjacency_count(&quasicube(5, 3).unwrap()), 5);
        assert_eq!(quasicube(1, 3).unwrap().len(), 1);
    }

    #[test]
    fn quasicube_attains_planar_formula() {
        for n in 2..=400 {
            let q = quasicube(n, 2).unwrap();
            assert_eq!(adjacency_count(&q) as i64, harborth_ts(n as i64).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn asymptotic_examples() {
        for k in 2..=5 {
            assert_eq!(asymptotic_ratio(k).unwrap(), 3.0);
        }
        assert!(asymptotic_ratio(1).is_err());
    }

    #[test]
    fn canonical_and_text() {
        let s = shape(2, &[&[3, 5], &[2, 7], &[2, 6]]);
        let c = s.canonical();
        assert_eq!(c.cells(), &[vec![0, 0], vec![0, 1], vec![1, -1]]);
        assert_eq!(c.to_text(), "0,0\n0,1\n1,-1\n");
        assert_eq!(LatticeShape::from_text(2, &c.to_text()).unwrap(), c);
        assert!(LatticeShape::from_text(2, "0,x\n").is_err());
        assert!(LatticeShape::new(2, vec![vec![0, 0], vec![0, 0]]).is_err());
    }

    #[test]
    fn random_shapes_respect_lattice_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let d = rng.gen_range(2..=3);
            let n = rng.gen_range(2..40);
            let s = random_animal(n, d, &mut rng);
            assert_eq!(s.len(), n);
            let c = adjacency_count(&s) as i64;
            assert!(c <= thm1_bound(n as i64, d as u32).unwrap());
            cube_union_surface(&s).unwrap();
        }
    }
}
