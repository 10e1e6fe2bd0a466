//! Packings, contact graphs and the elementary geometric primitives shared by
//! the other modules.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute slack on `|dist - 2r|` for contacts in continuous mode.
pub const CONTACT_TOL: f64 = 1e-9;

pub type Point = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Continuous,
    /// Integer centers, radius 1/2 (unit-diameter balls on `Z^d`).
    Lattice,
}

/// A finite packing of congruent balls.
///
/// Unit-radius packings use `radius = 1`; lattice packings use `radius = 1/2`
/// so that neighbouring integer points are tangent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPacking")]
pub struct PackingConfig {
    dimension: usize,
    radius: f64,
    mode: Mode,
    centers: Vec<Point>,
}

#[derive(Deserialize)]
struct RawPacking {
    dimension: usize,
    radius: f64,
    mode: Mode,
    centers: Vec<Point>,
}

impl TryFrom<RawPacking> for PackingConfig {
    type Error = Error;

    fn try_from(raw: RawPacking) -> Result<Self> {
        PackingConfig::new(raw.dimension, raw.radius, raw.mode, raw.centers)
    }
}

impl PackingConfig {
    pub fn new(dimension: usize, radius: f64, mode: Mode, centers: Vec<Point>) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidPacking(format!("dimension {dimension} < 2")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidPacking(format!("radius {radius} must be positive")));
        }
        if centers.is_empty() {
            return Err(Error::InvalidPacking("a packing needs at least one ball".into()));
        }
        for (i, c) in centers.iter().enumerate() {
            if c.len() != dimension {
                return Err(Error::InvalidPacking(format!(
                    "center {i} has {} coordinates, expected {dimension}",
                    c.len()
                )));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidPacking(format!("center {i} is not finite")));
            }
        }
        let config = PackingConfig {
            dimension,
            radius,
            mode,
            centers,
        };
        match mode {
            Mode::Lattice => {
                if radius != 0.5 {
                    return Err(Error::InvalidPacking("lattice packings have radius 1/2".into()));
                }
                for (i, c) in config.centers.iter().enumerate() {
                    if c.iter().any(|x| x.fract() != 0.0 || x.abs() > 1e15) {
                        return Err(Error::InvalidPacking(format!(
                            "lattice center {i} has non-integer coordinates"
                        )));
                    }
                }
                let cells = config.integer_centers();
                for i in 0..cells.len() {
                    for j in i + 1..cells.len() {
                        if sq_dist_int(&cells[i], &cells[j]) == 0 {
                            return Err(Error::DuplicateCenter(i, j));
                        }
                    }
                }
            }
            Mode::Continuous => {
                let min = 2.0 * radius - CONTACT_TOL;
                for i in 0..config.n() {
                    for j in i + 1..config.n() {
                        let distance = dist(&config.centers[i], &config.centers[j]);
                        if distance < min {
                            return Err(Error::Overlap { i, j, distance, min });
                        }
                    }
                }
            }
        }
        Ok(config)
    }

    /// Unit-diameter balls centred at integer points.
    pub fn lattice(dimension: usize, cells: &[Vec<i64>]) -> Result<Self> {
        let centers = cells
            .iter()
            .map(|c| c.iter().map(|&x| x as f64).collect())
            .collect();
        PackingConfig::new(dimension, 0.5, Mode::Lattice, centers)
    }

    pub fn unit(dimension: usize, centers: Vec<Point>) -> Result<Self> {
        PackingConfig::new(dimension, 1.0, Mode::Continuous, centers)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("packing serializes")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i]
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    /// Integer coordinates of a lattice packing.
    pub fn integer_centers(&self) -> Vec<Vec<i64>> {
        self.centers
            .iter()
            .map(|c| c.iter().map(|&x| x as i64).collect())
            .collect()
    }

    /// The same packing rescaled to unit radius, as a continuous packing.
    pub fn to_unit_radius(&self) -> PackingConfig {
        let s = 1.0 / self.radius;
        PackingConfig {
            dimension: self.dimension,
            radius: 1.0,
            mode: Mode::Continuous,
            centers: self
                .centers
                .iter()
                .map(|c| c.iter().map(|x| x * s).collect())
                .collect(),
        }
    }
}

/// Tangency graph of a packing. Edges are stored as sorted `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    degree: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

impl ContactGraph {
    pub fn from_edges(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let mut degree = vec![0; n];
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            degree[i] += 1;
            degree[j] += 1;
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        ContactGraph {
            n,
            edges,
            degree,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The contact number.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degree[i]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_without(None)
    }

    /// Connectivity after deleting `removed` (if any).
    pub fn is_connected_without(&self, removed: Option<usize>) -> bool {
        let start = (0..self.n).find(|&v| Some(v) != removed);
        let Some(start) = start else { return true };
        let mut seen = vec![false; self.n];
        if let Some(r) = removed {
            seen[r] = true;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == self.n - usize::from(removed.is_some())
    }

    /// 2-connected: at least three vertices, connected, no cut vertex.
    pub fn is_biconnected(&self) -> bool {
        self.n >= 3 && self.is_connected() && (0..self.n).all(|v| self.is_connected_without(Some(v)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }
}

impl Serialize for ContactGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View {
            n: usize,
            edges: Vec<[usize; 2]>,
        }
        View {
            n: self.n,
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
        .serialize(serializer)
    }
}

/// Contact graph of `p`. Lattice packings compare squared integer distances
/// exactly; continuous packings use `|dist - 2r| <= tol`.
pub fn contact_graph(p: &PackingConfig, tol: f64) -> Result<ContactGraph> {
    match p.mode {
        Mode::Lattice => {
            let cells = p.integer_centers();
            let mut edges = Vec::new();
            for i in 0..cells.len() {
                for j in i + 1..cells.len() {
                    if sq_dist_int(&cells[i], &cells[j]) == 1 {
                        edges.push((i, j));
                    }
                }
            }
            checked_graph(p, edges)
        }
        Mode::Continuous => contact_graph_by_distance(p, tol),
    }
}

/// Floating-point tolerance rule for any packing mode.
pub fn contact_graph_by_distance(p: &PackingConfig, tol: f64) -> Result<ContactGraph> {
    let target = 2.0 * p.radius;
    let mut edges = Vec::new();
    for i in 0..p.n() {
        for j in i + 1..p.n() {
            let distance = dist(&p.centers[i], &p.centers[j]);
            if distance < target - tol {
                return Err(Error::Overlap {
                    i,
                    j,
                    distance,
                    min: target - tol,
                });
            }
            if (distance - target).abs() <= tol {
                edges.push((i, j));
            }
        }
    }
    checked_graph(p, edges)
}

fn checked_graph(p: &PackingConfig, edges: Vec<(usize, usize)>) -> Result<ContactGraph> {
    let graph = ContactGraph::from_edges(p.n(), edges);
    let max = 2 * p.dimension;
    if let Some((vertex, &degree)) = graph.degree.iter().enumerate().find(|(_, &d)| d > max) {
        return Err(Error::Degree {
            vertex,
            degree,
            max,
        });
    }
    Ok(graph)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentDirections {
    /// `(c_j - c_i) / |c_j - c_i|` for each neighbour `j`, in neighbour order.
    pub directions: Vec<Point>,
    /// Smallest angle between two directions; `None` with fewer than two.
    pub min_angle: Option<f64>,
}

pub fn tangent_directions(g: &ContactGraph, p: &PackingConfig, i: usize) -> Result<TangentDirections> {
    if i >= g.n() || i >= p.n() {
        return Err(Error::Index {
            index: i,
            len: p.n(),
        });
    }
    let ci = p.center(i);
    let directions: Vec<Point> = g
        .neighbors(i)
        .iter()
        .map(|&j| {
            let v = sub(p.center(j), ci);
            let len = norm(&v);
            v.into_iter().map(|x| x / len).collect()
        })
        .collect();
    let mut min_angle: Option<f64> = None;
    for a in 0..directions.len() {
        for b in a + 1..directions.len() {
            let angle = dot(&directions[a], &directions[b]).clamp(-1.0, 1.0).acos();
            min_angle = Some(min_angle.map_or(angle, |m| m.min(angle)));
        }
    }
    Ok(TangentDirections {
        directions,
        min_angle,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, x: &[f64]) -> bool {
        self.radius >= 0.0 && dist(&self.center, x) <= self.radius + 1e-10 * self.radius.max(1.0)
    }
}

/// Smallest ball enclosing `points` (Welzl recursion with move-to-front).
///
/// Deterministic for a given input order. Panics on an empty slice.
pub fn min_enclosing_ball(points: &[Point]) -> Ball {
    assert!(!points.is_empty(), "min_enclosing_ball needs at least one point");
    let dim = points[0].len();
    let mut pts = points.to_vec();
    let mut support = Vec::with_capacity(dim + 1);
    let end = pts.len();
    move_to_front(&mut pts, end, &mut support, dim)
}

fn move_to_front(pts: &mut Vec<Point>, end: usize, support: &mut Vec<Point>, dim: usize) -> Ball {
    let mut ball = ball_on_boundary(support, dim);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        if !ball.contains(&pts[i]) {
            support.push(pts[i].clone());
            ball = move_to_front(pts, i, support, dim);
            support.pop();
            let p = pts.remove(i);
            pts.insert(0, p);
        }
    }
    ball
}

/// Smallest ball with every support point on its boundary: the circumcenter
/// within the affine hull of the support.
fn ball_on_boundary(support: &[Point], dim: usize) -> Ball {
    match support.len() {
        0 => Ball {
            center: vec![0.0; dim],
            radius: -1.0,
        },
        1 => Ball {
            center: support[0].clone(),
            radius: 0.0,
        },
        k => {
            let q0 = &support[0];
            let rel: Vec<Point> = support[1..].iter().map(|q| sub(q, q0)).collect();
            let m = k - 1;
            let gram = DMatrix::from_fn(m, m, |a, b| 2.0 * dot(&rel[a], &rel[b]));
            let rhs = DVector::from_fn(m, |a, _| dot(&rel[a], &rel[a]));
            let lambda = gram
                .svd(true, true)
                .solve(&rhs, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(m));
            let mut center = q0.clone();
            for (a, v) in rel.iter().enumerate() {
                for (c, x) in center.iter_mut().zip(v) {
                    *c += lambda[a] * x;
                }
            }
            let radius = support
                .iter()
                .map(|q| dist(&center, q))
                .fold(0.0, f64::max);
            Ball { center, radius }
        }
    }
}

/// Circumradius of the triangle `abc` (points in any dimension).
pub fn circumradius_triangle(a: &[f64], b: &[f64], c: &[f64]) -> Result<f64> {
    let u = sub(b, a);
    let v = sub(c, a);
    let uu = dot(&u, &u);
    let vv = dot(&v, &v);
    let uv = dot(&u, &v);
    // |u x v|^2 by Lagrange's identity
    let cross_sq = uu * vv - uv * uv;
    if cross_sq <= 1e-24 * uu * vv || uu == 0.0 || vv == 0.0 {
        return Err(Error::Collinear);
    }
    let w = sub(c, b);
    Ok((uu * vv * dot(&w, &w)).sqrt() / (2.0 * cross_sq.sqrt()))
}

/// `Γ(m / 2)` for a positive integer `m`.
fn gamma_half_integer(m: u32) -> f64 {
    assert!(m > 0);
    let (mut x, mut g) = if m % 2 == 0 {
        (1.0, 1.0)
    } else {
        (0.5, std::f64::consts::PI.sqrt())
    };
    while 2.0 * x < m as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume of the unit ball `B^d`: `π^(d/2) / Γ(d/2 + 1)`.
pub fn ball_volume(d: u32) -> f64 {
    std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half_integer(d + 2)
}

/// Surface area of the unit sphere in `R^d`, `d · vol(B^d)`.
pub fn sphere_surface(d: u32) -> f64 {
    d as f64 * ball_volume(d)
}

pub(crate) fn sq_dist_int(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn hex_triple() -> PackingConfig {
        PackingConfig::unit(2, vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 3f64.sqrt()]]).unwrap()
    }

    #[test]
    fn lattice_contact_examples() {
        let square = PackingConfig::lattice(2, &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(contact_graph(&square, CONTACT_TOL).unwrap().edge_count(), 4);

        let single = PackingConfig::lattice(3, &[vec![0, 0, 0]]).unwrap();
        assert_eq!(contact_graph(&single, CONTACT_TOL).unwrap().edge_count(), 0);

        let domino = PackingConfig::lattice(3, &[vec![0, 0, 0], vec![0, 0, 1]]).unwrap();
        let g = contact_graph(&domino, CONTACT_TOL).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degrees(), &[1, 1]);
    }

    #[test]
    fn graph_json_is_sorted() {
        let p = PackingConfig::lattice(2, &[vec![1, 1], vec![0, 0], vec![0, 1], vec![1, 0]]).unwrap();
        let g = contact_graph(&p, CONTACT_TOL).unwrap();
        assert_eq!(g.to_json(), r#"{"n":4,"edges":[[0,2],[0,3],[1,2],[1,3]]}"#);
    }

    #[test]
    fn rejects_overlap_and_duplicates() {
        assert!(matches!(
            PackingConfig::unit(2, vec![vec![0.0, 0.0], vec![1.5, 0.0]]),
            Err(Error::Overlap { .. })
        ));
        assert!(matches!(
            PackingConfig::lattice(2, &[vec![0, 0], vec![0, 0]]),
            Err(Error::DuplicateCenter(0, 1))
        ));
        assert!(PackingConfig::new(2, 0.5, Mode::Lattice, vec![vec![0.5, 0.0]]).is_err());
    }

    #[test]
    fn packing_json_round_trip() {
        let text = r#"{"dimension":2,"radius":0.5,"mode":"lattice","centers":[[0.0,0.0],[1.0,0.0]]}"#;
        let p = PackingConfig::from_json(text).unwrap();
        assert_eq!(p.to_json(), text);
        let bad = r#"{"dimension":2,"radius":1.0,"mode":"continuous","centers":[[0.0,0.0],[1.0,0.0]]}"#;
        assert!(PackingConfig::from_json(bad).is_err());
    }

    #[test]
    fn degree_above_two_d_is_rejected() {
        // six unit disks around a seventh: a valid packing, but not a valid input here
        let mut centers = vec![vec![0.0, 0.0]];
        for k in 0..6 {
            let t = k as f64 * PI / 3.0;
            centers.push(vec![2.0 * t.cos(), 2.0 * t.sin()]);
        }
        let p = PackingConfig::unit(2, centers).unwrap();
        assert!(matches!(
            contact_graph(&p, 1e-9),
            Err(Error::Degree { vertex: 0, degree: 6, max: 4 })
        ));
    }

    #[test]
    fn tangent_direction_examples() {
        let plus = PackingConfig::lattice(2, &[vec![1, 1], vec![0, 1], vec![2, 1], vec![1, 0], vec![1, 2]]).unwrap();
        let g = contact_graph(&plus, CONTACT_TOL).unwrap();
        let t = tangent_directions(&g, &plus, 0).unwrap();
        assert_eq!(t.directions.len(), 4);
        assert!((t.min_angle.unwrap() - PI / 2.0).abs() < 1e-12);

        let hex = hex_triple();
        let g = contact_graph(&hex, 1e-9).unwrap();
        let t = tangent_directions(&g, &hex, 0).unwrap();
        assert!((t.min_angle.unwrap() - PI / 3.0).abs() < 1e-12);

        let single = PackingConfig::unit(3, vec![vec![0.0; 3]]).unwrap();
        let g = contact_graph(&single, 1e-9).unwrap();
        let t = tangent_directions(&g, &single, 0).unwrap();
        assert!(t.directions.is_empty() && t.min_angle.is_none());
        assert!(tangent_directions(&g, &single, 1).is_err());
    }

    #[test]
    fn enclosing_ball_examples() {
        let square = vec![
            vec![1.0, 1.0, 0.0],
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 1.0, 0.0],
            vec![-1.0, -1.0, 0.0],
        ];
        assert!((min_enclosing_ball(&square).radius - 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(min_enclosing_ball(&[vec![3.0, 4.0]]).radius, 0.0);

        // regular tetrahedron with edge 2
        let s = 2f64.sqrt();
        let tetra = vec![
            vec![s / 2.0, s / 2.0, s / 2.0],
            vec![s / 2.0, -s / 2.0, -s / 2.0],
            vec![-s / 2.0, s / 2.0, -s / 2.0],
            vec![-s / 2.0, -s / 2.0, s / 2.0],
        ];
        assert!((dist(&tetra[0], &tetra[1]) - 2.0).abs() < 1e-12);
        assert!((min_enclosing_ball(&tetra).radius - 1.5f64.sqrt()).abs() < 1e-9);

        // obtuse triangle: ball is on the long side
        let obtuse = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.5]];
        let b = min_enclosing_ball(&obtuse);
        assert!((b.radius - 2.0).abs() < 1e-9);
    }

    #[test]
    fn circumradius_examples() {
        let r = circumradius_triangle(&[0.0, 0.0], &[2.0, 0.0], &[1.0, 3f64.sqrt()]).unwrap();
        assert!((r - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        let r = circumradius_triangle(&[0.0, 0.0], &[3.0, 0.0], &[0.0, 4.0]).unwrap();
        assert!((r - 2.5).abs() < 1e-12);
        // extremal separable triple: half base x = sqrt(3/2), apex tangent to both inner tangent lines
        let x = 1.5f64.sqrt();
        let h = x / (x * x - 1.0).sqrt();
        let r = circumradius_triangle(&[-x, 0.0], &[x, 0.0], &[0.0, h]).unwrap();
        assert!((r - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-12);
        assert!(matches!(
            circumradius_triangle(&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]),
            Err(Error::Collinear)
        ));
    }

    #[test]
    fn ball_volume_examples() {
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((sphere_surface(3) - 4.0 * PI).abs() < 1e-14);
        assert!((ball_volume(2) - PI).abs() < 1e-14);
        assert!((sphere_surface(2) - 2.0 * PI).abs() < 1e-14);
        assert!((ball_volume(1) - 2.0).abs() < 1e-15);
        // vol(B^4) = π²/2
        assert!((ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        for d in 1..=12u32 {
            let v = ball_volume(d);
            let s = sphere_surface(d);
            assert_eq!(s, d as f64 * v);
            let iq = s.powi(d as i32) / v.powi(d as i32 - 1);
            let expected = (d as f64).powi(d as i32) * v;
            assert!(((iq - expected) / expected).abs() < 1e-10, "d = {d}");
        }
    }
}
