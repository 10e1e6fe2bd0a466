//! Separation certificates: one hyperplane per pair of balls that separates
//! the pair and misses the interior of every ball.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, dot, norm, sub, Mode, PackingConfig, Point};

/// Slack for the "misses every interior" and "separates the pair" tests.
pub const CERT_TOL: f64 = 1e-9;

/// Evenly spaced offsets tried across the gap in each candidate direction.
pub const GAP_OFFSETS: usize = 17;

/// The plane `{x : normal · x = offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Point,
    pub offset: f64,
}

impl Hyperplane {
    /// Normalises `normal`, rescaling `offset` to match.
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let len = norm(&normal);
        if !len.is_finite() || len == 0.0 || !offset.is_finite() {
            return Err(Error::DegenerateNormal);
        }
        Ok(Hyperplane {
            normal: normal.into_iter().map(|x| x / len).collect(),
            offset: offset / len,
        })
    }

    pub fn axis(dimension: usize, axis: usize, offset: f64) -> Self {
        let mut normal = vec![0.0; dimension];
        normal[axis] = 1.0;
        Hyperplane { normal, offset }
    }

    /// Signed distance of `x` from the plane.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeparationCertificate {
    planes: BTreeMap<(usize, usize), Hyperplane>,
}

#[derive(Serialize, Deserialize)]
struct PairEntry {
    i: usize,
    j: usize,
    normal: Point,
    offset: f64,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    pairs: Vec<PairEntry>,
}

impl SeparationCertificate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, i: usize, j: usize, plane: Hyperplane) {
        self.planes.insert((i.min(j), i.max(j)), plane);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Hyperplane> {
        self.planes.get(&(i.min(j), i.max(j)))
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Hyperplane)> {
        self.planes.iter()
    }

    pub fn to_json(&self) -> String {
        let file = CertificateFile {
            pairs: self
                .planes
                .iter()
                .map(|(&(i, j), h)| PairEntry {
                    i,
                    j,
                    normal: h.normal.clone(),
                    offset: h.offset,
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CertificateFile = serde_json::from_str(text)?;
        let mut cert = SeparationCertificate::new();
        for e in file.pairs {
            cert.insert(e.i, e.j, Hyperplane::new(e.normal, e.offset)?);
        }
        Ok(cert)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub plane: Hyperplane,
    /// The ball whose interior the plane cuts; `None` when the plane fails to
    /// put `i` and `j` on opposite sides.
    pub ball: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub valid: bool,
    pub first_violation: Option<Violation>,
}

fn plane_violation(p: &PackingConfig, i: usize, j: usize, h: &Hyperplane) -> Option<Option<usize>> {
    let r = p.radius();
    let si = h.signed_distance(p.center(i));
    let sj = h.signed_distance(p.center(j));
    let apart = (si <= -r + CERT_TOL && sj >= r - CERT_TOL) || (sj <= -r + CERT_TOL && si >= r - CERT_TOL);
    if !apart {
        return Some(None);
    }
    (0..p.n())
        .find(|&k| h.signed_distance(p.center(k)).abs() < r - CERT_TOL)
        .map(Some)
}

/// Checks every pair's plane. Pairs are visited in `(i, j)` order.
pub fn verify_certificate(p: &PackingConfig, cert: &SeparationCertificate) -> Result<CertificateReport> {
    for i in 0..p.n() {
        for j in i + 1..p.n() {
            if cert.get(i, j).is_none() {
                return Err(Error::MissingPair(i, j));
            }
        }
    }
    for i in 0..p.n() {
        for j in i + 1..p.n() {
            let plane = cert.get(i, j).expect("checked above");
            if let Some(ball) = plane_violation(p, i, j, plane) {
                return Ok(CertificateReport {
                    valid: false,
                    first_violation: Some(Violation {
                        i,
                        j,
                        plane: plane.clone(),
                        ball,
                    }),
                });
            }
        }
    }
    Ok(CertificateReport {
        valid: true,
        first_violation: None,
    })
}

/// Certificate for a lattice packing: for each pair, the plane `x_k = m + 1/2`
/// on the first axis `k` where the two centers differ, with `m` the smaller
/// coordinate. Every integer point is at distance ≥ 1/2 from such a plane.
pub fn axis_certificate(p: &PackingConfig) -> Result<SeparationCertificate> {
    if p.mode() != Mode::Lattice {
        return Err(Error::Mode("a lattice packing"));
    }
    let cells = p.integer_centers();
    let mut cert = SeparationCertificate::new();
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let axis = (0..p.dimension())
                .find(|&k| cells[i][k] != cells[j][k])
                .ok_or(Error::DuplicateCenter(i, j))?;
            let low = cells[i][axis].min(cells[j][axis]) as f64;
            cert.insert(i, j, Hyperplane::axis(p.dimension(), axis, low + 0.5));
        }
    }
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertificateSearch {
    Certified(SeparationCertificate),
    /// No candidate plane worked for this pair. This is "not certified", not
    /// "not separable".
    Unknown { i: usize, j: usize },
}

/// Candidate offsets across the gap `[lo, hi]` along a direction: the
/// evenly spaced ones, then the tangent offsets `s_k ± r` of every ball that
/// land inside the gap. The free part of the gap, when non-empty, always
/// contains one of the tangent offsets.
fn gap_offsets(lo: f64, hi: f64, projections: &[f64], r: f64) -> Vec<f64> {
    if hi < lo - CERT_TOL {
        return Vec::new();
    }
    let hi = hi.max(lo);
    let mut out: Vec<f64> = (0..GAP_OFFSETS)
        .map(|s| lo + (hi - lo) * s as f64 / (GAP_OFFSETS - 1) as f64)
        .collect();
    let mut events: Vec<f64> = projections
        .iter()
        .flat_map(|&s| [s - r, s + r])
        .filter(|&t| t >= lo && t <= hi)
        .collect();
    events.sort_by(f64::total_cmp);
    events.dedup();
    out.extend(events);
    out
}

fn pair_candidates(p: &PackingConfig, i: usize, j: usize) -> Vec<Hyperplane> {
    let r = p.radius();
    let d = p.dimension();
    let (ci, cj) = (p.center(i), p.center(j));
    let mut out = Vec::new();

    for axis in 0..d {
        let (a, b) = (ci[axis].min(cj[axis]), ci[axis].max(cj[axis]));
        if b - a < 2.0 * r - CERT_TOL {
            continue;
        }
        out.push(Hyperplane::axis(d, axis, 0.5 * (a + b)));
        let projections: Vec<f64> = p.centers().iter().map(|c| c[axis]).collect();
        out.extend(
            gap_offsets(a + r, b - r, &projections, r)
                .into_iter()
                .map(|t| Hyperplane::axis(d, axis, t)),
        );
    }

    let dir = sub(cj, ci);
    let len = norm(&dir);
    let unit: Point = dir.iter().map(|x| x / len).collect();
    let mid: Point = ci.iter().zip(cj).map(|(x, y)| 0.5 * (x + y)).collect();
    out.push(Hyperplane {
        offset: dot(&unit, &mid),
        normal: unit.clone(),
    });
    let projections: Vec<f64> = p.centers().iter().map(|c| dot(&unit, c)).collect();
    out.extend(
        gap_offsets(dot(&unit, ci) + r, dot(&unit, cj) - r, &projections, r)
            .into_iter()
            .map(|t| Hyperplane {
                normal: unit.clone(),
                offset: t,
            }),
    );
    out
}

/// Sound, incomplete search for a certificate of a packing. At most `budget`
/// candidate planes are tried per pair.
pub fn find_certificate(p: &PackingConfig, budget: usize) -> CertificateSearch {
    let mut cert = SeparationCertificate::new();
    for i in 0..p.n() {
        for j in i + 1..p.n() {
            let found = pair_candidates(p, i, j)
                .into_iter()
                .take(budget)
                .find(|h| plane_violation(p, i, j, h).is_none());
            match found {
                Some(h) => cert.insert(i, j, h),
                None => return CertificateSearch::Unknown { i, j },
            }
        }
    }
    CertificateSearch::Certified(cert)
}

/// Random totally separable packing of `n` unit balls in `R^d` (`d ∈ {2, 3}`).
///
/// A box of side `4·⌈n^(1/d)⌉` is cut by full axis-parallel hyperplanes, each
/// placed uniformly in the middle 60% of a slab and at least 2 away from the
/// slab ends, until the resulting grid has at least `n` cells. A connected
/// random cluster of `n` cells receives one ball each, centred and then
/// displaced by `jitter` (0..=1) times a uniform fraction of the free play.
/// Every ball stays at distance ≥ 1 from every cut, so the cut between two
/// balls' cells certifies the pair.
pub fn guillotine_generate(
    d: usize,
    n: usize,
    seed: u64,
    jitter: f64,
) -> Result<(PackingConfig, SeparationCertificate)> {
    if !(2..=3).contains(&d) {
        return Err(Error::Domain(format!("generator supports d in {{2, 3}}, got {d}")));
    }
    if n == 0 {
        return Err(Error::Domain("generator needs n >= 1".into()));
    }
    if !(jitter.is_finite() && jitter >= 0.0) {
        return Err(Error::Domain(format!("jitter {jitter} must be >= 0")));
    }
    let jitter = jitter.min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 4.0 * crate::lattice::ceil_root(n, d) as f64;
    let mut cuts: Vec<Vec<f64>> = vec![vec![0.0, side]; d];

    let cell_count = |cuts: &Vec<Vec<f64>>| cuts.iter().map(|c| c.len() - 1).product::<usize>();
    while cell_count(&cuts) < n {
        let splittable: Vec<(usize, usize)> = (0..d)
            .flat_map(|axis| {
                let c = &cuts[axis];
                (0..c.len() - 1)
                    .filter(move |&s| c[s + 1] - c[s] >= 4.0)
                    .map(move |s| (axis, s))
            })
            .collect();
        if splittable.is_empty() {
            return Err(Error::Capacity { n });
        }
        let (axis, slab) = splittable[rng.gen_range(0..splittable.len())];
        let (lo, hi) = (cuts[axis][slab], cuts[axis][slab + 1]);
        let w = hi - lo;
        let (a, b) = ((lo + 0.2 * w).max(lo + 2.0), (hi - 0.2 * w).min(hi - 2.0));
        let t = if b > a { rng.gen_range(a..=b) } else { a };
        cuts[axis].insert(slab + 1, t);
    }

    let dims: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    let cells = grow_cluster(&dims, n, &mut rng);

    let centers: Vec<Point> = cells
        .iter()
        .map(|cell| {
            (0..d)
                .map(|axis| {
                    let (lo, hi) = (cuts[axis][cell[axis]], cuts[axis][cell[axis] + 1]);
                    let play = 0.5 * (hi - lo - 2.0);
                    let shift = if jitter > 0.0 && play > 0.0 {
                        jitter * play * rng.gen_range(-1.0..=1.0)
                    } else {
                        0.0
                    };
                    0.5 * (lo + hi) + shift
                })
                .collect()
        })
        .collect();

    let mut cert = SeparationCertificate::new();
    for i in 0..n {
        for j in i + 1..n {
            let axis = (0..d)
                .find(|&k| cells[i][k] != cells[j][k])
                .expect("distinct cells");
            let low = cells[i][axis].min(cells[j][axis]);
            cert.insert(i, j, Hyperplane::axis(d, axis, cuts[axis][low + 1]));
        }
    }
    let packing = PackingConfig::unit(d, centers)?;
    Ok((packing, cert))
}

/// Random connected set of `n` cells in a grid of shape `dims`.
fn grow_cluster(dims: &[usize], n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let start: Vec<usize> = dims.iter().map(|&m| rng.gen_range(0..m)).collect();
    let mut chosen = vec![start.clone()];
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([start]);
    let mut frontier: Vec<Vec<usize>> = Vec::new();
    let push_neighbors = |c: &Vec<usize>, seen: &BTreeSet<Vec<usize>>, frontier: &mut Vec<Vec<usize>>| {
        for axis in 0..dims.len() {
            for up in [false, true] {
                let mut nb = c.clone();
                if up && nb[axis] + 1 < dims[axis] {
                    nb[axis] += 1;
                } else if !up && nb[axis] > 0 {
                    nb[axis] -= 1;
                } else {
                    continue;
                }
                if !seen.contains(&nb) && !frontier.contains(&nb) {
                    frontier.push(nb);
                }
            }
        }
    };
    push_neighbors(&chosen[0], &seen, &mut frontier);
    while chosen.len() < n {
        let c = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        seen.insert(c.clone());
        push_neighbors(&c, &seen, &mut frontier);
        chosen.push(c);
    }
    chosen
}

/// Smallest pairwise center distance, `None` for fewer than two balls.
pub fn min_pair_distance(p: &PackingConfig) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..p.n() {
        for j in i + 1..p.n() {
            let d = dist(p.center(i), p.center(j));
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best
}
