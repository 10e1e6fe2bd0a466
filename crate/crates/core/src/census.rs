//! Face census of planar contact graphs.
//!
//! The contact graph of a packing of unit disks is drawn with straight edges
//! between centers; such drawings never cross, so faces can be read off by
//! walking half-edges in angular order.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bounds::harborth_ts;
use crate::error::{Error, Result};
use crate::geometry::{contact_graph, ContactGraph, PackingConfig, CONTACT_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceCensus {
    pub n: usize,
    /// Contact count.
    pub c: usize,
    /// Vertices on the outer face, and how many of them have degree 2, 3, 4.
    pub b: usize,
    pub b2: usize,
    pub b3: usize,
    pub b4: usize,
    /// Internal face size → count.
    pub f: BTreeMap<usize, usize>,
    /// Half-edges on the outer walk; equals `b` when the graph is 2-connected.
    pub outer_length: usize,
    pub biconnected: bool,
    /// `n − c + Σ f_i = 1`.
    pub euler: bool,
    /// `Σ i·f_i = 2c − b` (with the outer walk length in place of `b` when
    /// the boundary is not a simple polygon).
    pub side_identity: bool,
    /// No internal triangles.
    pub faces_at_least_4: bool,
    /// `b2 + 2b3 + 3b4 ≤ 2b − 4`; `None` unless 2-connected.
    pub h1: Option<bool>,
    /// `2c − 3n + 4 ≤ n − b`; `None` unless 2-connected.
    pub h4: Option<bool>,
    /// `c ≤ harborth_ts(n − b) + 2b − 4`; `None` unless 2-connected with `n − b ≥ 2`.
    pub h6: Option<bool>,
}

impl FaceCensus {
    pub fn face_count(&self) -> usize {
        self.f.values().sum()
    }

    /// Every relation that applies holds.
    pub fn all_hold(&self) -> bool {
        self.euler
            && self.side_identity
            && self.faces_at_least_4
            && self.h1 != Some(false)
            && self.h4 != Some(false)
            && self.h6 != Some(false)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("census serializes")
    }
}

pub fn face_census(p: &PackingConfig) -> Result<FaceCensus> {
    if p.dimension() != 2 {
        return Err(Error::Domain(format!("face census needs d = 2, got d = {}", p.dimension())));
    }
    let g = contact_graph(p, CONTACT_TOL)?;
    census_of(&g, p.centers())
}

/// Census of a connected straight-line plane graph with the given vertex positions.
pub fn census_of(g: &ContactGraph, pos: &[Vec<f64>]) -> Result<FaceCensus> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let c = g.edge_count();

    // neighbours in counterclockwise order
    let rot: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut ws = g.neighbors(v).to_vec();
            let angle = |w: usize| (pos[w][1] - pos[v][1]).atan2(pos[w][0] - pos[v][0]);
            ws.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
            ws
        })
        .collect();
    for (v, ws) in rot.iter().enumerate() {
        let angle = |w: usize| (pos[w][1] - pos[v][1]).atan2(pos[w][0] - pos[v][0]);
        if ws.windows(2).any(|p| angle(p[0]) == angle(p[1])) {
            return Err(Error::Embedding(format!("two edges leave vertex {v} in the same direction")));
        }
    }
    let slot = |v: usize, w: usize| rot[v].iter().position(|&x| x == w).expect("adjacent");

    // half-edge (u, v) is followed by (v, w), w the clockwise neighbour of u at v
    let mut used: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    for &(i, j) in g.edges() {
        used.insert((i, j), false);
        used.insert((j, i), false);
    }
    let mut walks: Vec<(Vec<usize>, f64)> = Vec::new();
    let keys: Vec<(usize, usize)> = used.keys().copied().collect();
    for start in keys {
        if used[&start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut area = 0.0;
        let (mut u, mut v) = start;
        loop {
            *used.get_mut(&(u, v)).expect("half-edge") = true;
            walk.push(u);
            area += pos[u][0] * pos[v][1] - pos[v][0] * pos[u][1];
            let k = rot[v].len();
            let w = rot[v][(slot(v, u) + k - 1) % k];
            (u, v) = (v, w);
            if (u, v) == start {
                break;
            }
        }
        walks.push((walk, area / 2.0));
    }

    let mut f = BTreeMap::new();
    let (outer, outer_length) = if walks.is_empty() {
        // a single vertex
        (vec![0], 0)
    } else {
        let oi = (0..walks.len())
            .min_by(|&a, &b| walks[a].1.total_cmp(&walks[b].1))
            .expect("non-empty");
        for (i, (w, _)) in walks.iter().enumerate() {
            if i != oi {
                *f.entry(w.len()).or_insert(0) += 1;
            }
        }
        let mut o = walks[oi].0.clone();
        let len = o.len();
        o.sort_unstable();
        o.dedup();
        (o, len)
    };
    let b = outer.len();
    let count = |k: usize| outer.iter().filter(|&&v| g.degree(v) == k).count();
    let (b2, b3, b4) = (count(2), count(3), count(4));

    let faces: usize = f.values().sum();
    let euler = n as i64 - c as i64 + faces as i64 == 1;
    let sides: usize = f.iter().map(|(i, k)| i * k).sum();
    let side_identity = sides as i64 == 2 * c as i64 - outer_length as i64;
    if !euler || !side_identity {
        return Err(Error::Embedding(format!(
            "face walk is inconsistent: n = {n}, c = {c}, faces = {faces}, sides = {sides}, outer = {outer_length}"
        )));
    }

    let biconnected = g.is_biconnected();
    let (bi, ni, ci) = (b as i64, n as i64, c as i64);
    let h1 = biconnected.then(|| (b2 + 2 * b3 + 3 * b4) as i64 <= 2 * bi - 4);
    let h4 = biconnected.then(|| 2 * ci - 3 * ni + 4 <= ni - bi);
    let h6 = (biconnected && n >= b + 2)
        .then(|| harborth_ts(ni - bi).map(|h| ci <= h + 2 * bi - 4))
        .transpose()?;

    Ok(FaceCensus {
        n,
        c,
        b,
        b2,
        b3,
        b4,
        faces_at_least_4: f.keys().all(|&i| i >= 4),
        f,
        outer_length,
        biconnected,
        euler,
        side_identity,
        h1,
        h4,
        h6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{block, quasicube};

    fn census(cells: &[Vec<i64>]) -> FaceCensus {
        face_census(&PackingConfig::lattice(2, cells).unwrap()).unwrap()
    }

    #[test]
    fn square_2x2() {
        let c = census(block(&[2, 2]).cells());
        assert_eq!((c.n, c.c, c.b, c.b2), (4, 4, 4, 4));
        assert_eq!(c.f, BTreeMap::from([(4, 1)]));
        assert!(c.all_hold());
        assert_eq!(c.h1, Some(true));
    }

    #[test]
    fn row_of_three() {
        let c = census(block(&[1, 3]).cells());
        assert_eq!((c.n, c.c, c.face_count()), (3, 2, 0));
        assert!(!c.biconnected);
        assert_eq!((c.h1, c.h4, c.h6), (None, None, None));
        assert!(c.all_hold());
    }

    #[test]
    fn square_3x3() {
        let c = census(block(&[3, 3]).cells());
        assert_eq!((c.c, c.b), (12, 8));
        assert_eq!(c.f, BTreeMap::from([(4, 4)]));
        assert_eq!(4 * 4, 2 * c.c - c.b);
        // one interior vertex: the inner recursion does not apply
        assert_eq!(c.h6, None);
        assert!(c.all_hold());
        let big = census(block(&[4, 4]).cells());
        assert_eq!((big.c, big.b, big.h6), (24, 12, Some(true)));
    }

    #[test]
    fn ring_has_an_octagon() {
        let mut cells = block(&[3, 3]).cells().to_vec();
        cells.retain(|c| c != &vec![1, 1]);
        let c = census(&cells);
        assert_eq!(c.f, BTreeMap::from([(8, 1)]));
        assert_eq!((c.b, c.outer_length), (8, 8));
        assert!(c.all_hold());
    }

    #[test]
    fn quasicubes_pass() {
        for n in 4..=60 {
            let c = census(quasicube(n, 2).unwrap().cells());
            assert!(c.all_hold(), "n = {n}: {c:?}");
        }
    }

    #[test]
    fn hexagonal_patch_has_triangles() {
        let s = 3f64.sqrt();
        let p = PackingConfig::unit(2, vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, s]]).unwrap();
        let c = face_census(&p).unwrap();
        assert_eq!(c.f, BTreeMap::from([(3, 1)]));
        assert!(!c.faces_at_least_4);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            face_census(&PackingConfig::lattice(2, &[vec![0, 0], vec![5, 5]]).unwrap()),
            Err(Error::Disconnected)
        ));
        assert!(face_census(&PackingConfig::lattice(3, &[vec![0, 0, 0]]).unwrap()).is_err());
        let one = census(&[vec![0, 0]]);
        assert!(one.euler && one.b == 1);
    }
}
