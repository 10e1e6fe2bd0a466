//! Numeric checks of the constants behind the density and surface arguments:
//! the circumradius profile, the orthoscheme ball density, spherical cap
//! ratios, box-polytope isoperimetry and Monte Carlo estimates for unions of
//! inflated balls.

use std::f64::consts::PI;

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{contact_graph, dot, norm, Mode, PackingConfig, CONTACT_TOL};
use crate::lattice::{cube_union_surface, LatticeShape};
use crate::mc::{self, McConfig, McEstimate};

/// Upper bound on the orthoscheme ball density used by the 3D argument.
pub const DENSITY_BOUND: f64 = 0.6401;

/// `vol(W ∩ B³) / vol(W)` for the orthoscheme with norms `(1, 3√3/4, √2)`,
/// from [`orthoscheme_density_quadrature`] at tolerance 1e-12 (adaptive
/// 7-point rule on the base triangle), cross-checked by an independent
/// scipy `dblquad` run (0.640068335041662).
pub const ORTHOSCHEME_DENSITY: f64 = 0.640_068_335_041_66;

// ---------------------------------------------------------------------------
// circumradius profile

/// Circumradius of the extremal separable triple with half base `x`:
/// `x³ / (2√(x² − 1))` on `1 < x ≤ √2`. Returns `+∞` when `x² − 1` underflows.
pub fn circumradius_profile(x: f64) -> Result<f64> {
    if !(x > 1.0 && x <= 2f64.sqrt() + 1e-12) {
        return Err(Error::Domain(format!("profile is defined on (1, √2], got {x}")));
    }
    let s = x * x - 1.0;
    if s <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(x.powi(3) / (2.0 * s.sqrt()))
}

/// `x²(2x² − 3) / (2(x² − 1)^(3/2))`.
pub fn circumradius_profile_derivative(x: f64) -> f64 {
    let s = x * x - 1.0;
    x * x * (2.0 * x * x - 3.0) / (2.0 * s * s.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileMinimum {
    /// Root of the derivative, by bisection.
    pub argmin: f64,
    pub min: f64,
    /// Independent golden-section search on the profile itself.
    pub golden_argmin: f64,
    pub golden_min: f64,
}

pub fn minimize_profile() -> ProfileMinimum {
    let (mut lo, mut hi) = (1.0 + 1e-9, 2f64.sqrt());
    // f' < 0 left of the root, > 0 right of it
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if circumradius_profile_derivative(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let argmin = 0.5 * (lo + hi);

    let f = |x: f64| circumradius_profile(x).expect("inside domain");
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1.0 + 1e-6, 2f64.sqrt());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let golden_argmin = 0.5 * (a + b);
    ProfileMinimum {
        argmin,
        min: f(argmin),
        golden_argmin,
        golden_min: f(golden_argmin),
    }
}

// ---------------------------------------------------------------------------
// orthoschemes

/// Norms `|w1| ≤ |w2| ≤ |w3|` of a 3-dimensional orthoscheme `conv{o, w1, w2, w3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthoschemeSpec {
    pub norms: [f64; 3],
}

impl OrthoschemeSpec {
    pub fn new(norms: [f64; 3]) -> Result<Self> {
        let [a, b, c] = norms;
        if !(a.is_finite() && b.is_finite() && c.is_finite() && a > 0.0 && a < b && b < c) {
            return Err(Error::Realizability(norms));
        }
        Ok(OrthoschemeSpec { norms })
    }

    /// Norms `(1, 3√3/4, √2)`: the contact distance, the edge-distance bound
    /// and the vertex-distance bound of a truncated Voronoi cell.
    pub fn extremal() -> Self {
        OrthoschemeSpec {
            norms: [1.0, 3.0 * 3f64.sqrt() / 4.0, 2f64.sqrt()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Orthoscheme {
    pub w1: [f64; 3],
    pub w2: [f64; 3],
    pub w3: [f64; 3],
    pub volume: f64,
}

/// Canonical coordinates `w1 = (a,0,0)`, `w2 = (a,b,0)`, `w3 = (a,b,c)`.
pub fn build_orthoscheme(spec: &OrthoschemeSpec) -> Result<Orthoscheme> {
    let spec = OrthoschemeSpec::new(spec.norms)?;
    let [n1, n2, n3] = spec.norms;
    let a = n1;
    let b = (n2 * n2 - a * a).sqrt();
    let c = (n3 * n3 - n2 * n2).sqrt();
    let o = Orthoscheme {
        w1: [a, 0.0, 0.0],
        w2: [a, b, 0.0],
        w3: [a, b, c],
        volume: a * b * c / 6.0,
    };
    // each vertex is orthogonal to the edges leading to later vertices
    let e = |p: [f64; 3], q: [f64; 3]| [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
    for (v, later) in [(o.w1, vec![o.w2, o.w3]), (o.w2, vec![o.w3])] {
        for q in later {
            let scale = norm(&v) * norm(&e(v, q));
            assert!(dot(&v, &e(v, q)).abs() <= 1e-12 * scale.max(1.0));
        }
    }
    Ok(o)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Estimator {
    /// Uniform points in the simplex, counting those inside the unit ball.
    HitOrMiss,
    /// Uniform points on the base triangle; each contributes the exact
    /// fraction of its ray segment inside the ball, `min(1, |y|⁻³)`.
    Radial,
    /// [`Estimator::Radial`] with jittered-grid stratification inside each
    /// partition; partitions are independent replicates.
    StratifiedRadial,
}

fn barycentric(o: &Orthoscheme, l1: f64, l2: f64, l3: f64) -> [f64; 3] {
    let mut p = [0.0; 3];
    for k in 0..3 {
        p[k] = l1 * o.w1[k] + l2 * o.w2[k] + l3 * o.w3[k];
    }
    p
}

fn radial_weight(o: &Orthoscheme, u: f64, v: f64) -> f64 {
    let (s, t) = if u < v { (u, v) } else { (v, u) };
    let y = barycentric(o, s, t - s, 1.0 - t);
    let r = norm(&y);
    if r <= 1.0 {
        1.0
    } else {
        1.0 / (r * r * r)
    }
}

/// Monte Carlo estimate of `vol(W ∩ B³) / vol(W)`.
pub fn orthoscheme_ball_density(spec: &OrthoschemeSpec, cfg: &McConfig, estimator: Estimator) -> Result<McEstimate> {
    let o = build_orthoscheme(spec)?;
    Ok(match estimator {
        Estimator::HitOrMiss => mc::bernoulli(cfg, 0, |rng| {
            let mut u: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
            u.sort_by(f64::total_cmp);
            let x = barycentric(&o, u[1] - u[0], u[2] - u[1], 1.0 - u[2]);
            dot(&x, &x) <= 1.0
        }),
        Estimator::Radial => mc::mean(cfg, 0, |rng| radial_weight(&o, rng.gen(), rng.gen())),
        Estimator::StratifiedRadial => mc::replicated(cfg, 0, |rng, share| {
            let k = (share as f64).sqrt().floor() as u64;
            let mut sum = 0.0;
            for i in 0..k {
                for j in 0..k {
                    let u = (i as f64 + rng.gen::<f64>()) / k as f64;
                    let v = (j as f64 + rng.gen::<f64>()) / k as f64;
                    sum += radial_weight(&o, u, v);
                }
            }
            for _ in k * k..share {
                sum += radial_weight(&o, rng.gen(), rng.gen());
            }
            sum / share.max(1) as f64
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of local `|refined − coarse|` differences.
    pub error: f64,
    pub triangles: usize,
}

// 7-point degree-5 rule on a triangle (barycentric coordinates, weights sum to 1)
const RULE: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    ([0.059_715_871_789_770, 0.470_142_064_105_115, 0.470_142_064_105_115], 0.132_394_152_788_506),
    ([0.470_142_064_105_115, 0.059_715_871_789_770, 0.470_142_064_105_115], 0.132_394_152_788_506),
    ([0.470_142_064_105_115, 0.470_142_064_105_115, 0.059_715_871_789_770], 0.132_394_152_788_506),
    ([0.797_426_985_353_087, 0.101_286_507_323_456, 0.101_286_507_323_456], 0.125_939_180_544_827),
    ([0.101_286_507_323_456, 0.797_426_985_353_087, 0.101_286_507_323_456], 0.125_939_180_544_827),
    ([0.101_286_507_323_456, 0.101_286_507_323_456, 0.797_426_985_353_087], 0.125_939_180_544_827),
];

/// Average of `f` over a triangle given in barycentric coordinates of the
/// base face, times the triangle's area fraction `area`.
fn rule<F: Fn([f64; 3]) -> f64>(f: &F, t: &[[f64; 3]; 3], area: f64) -> f64 {
    RULE.iter()
        .map(|(b, w)| {
            let mut p = [0.0; 3];
            for (k, pk) in p.iter_mut().enumerate() {
                *pk = b[0] * t[0][k] + b[1] * t[1][k] + b[2] * t[2][k];
            }
            w * f(p)
        })
        .sum::<f64>()
        * area
}

// Triangles straddling the unit sphere stop refining here; the integrand is
// continuous there, so each contributes O(h³) error and the 2^k of them at
// depth k sum to about 8^-k.
const MAX_DEPTH: u32 = 20;

/// Deterministic `vol(W ∩ B³) / vol(W)`.
///
/// A ray from the origin through a point `y` of the face `w1 w2 w3` leaves the
/// simplex at `y`, and the solid angle per unit face area is `h / |y|³`, so
/// the density is the face average of `min(1, |y|⁻³)`. That average is
/// integrated by adaptive subdivision into four sub-triangles.
pub fn orthoscheme_density_quadrature(spec: &OrthoschemeSpec, tol: f64) -> Result<Quadrature> {
    let o = build_orthoscheme(spec)?;
    let f = |y: [f64; 3]| {
        let r = norm(&y);
        if r <= 1.0 {
            1.0
        } else {
            1.0 / (r * r * r)
        }
    };
    let root = [o.w1, o.w2, o.w3];
    let mut stack = vec![(root, 1.0, rule(&f, &root, 1.0), 0u32)];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut triangles = 0;
    while let Some((t, area, coarse, depth)) = stack.pop() {
        let mid = |a: [f64; 3], b: [f64; 3]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])];
        let (m01, m12, m02) = (mid(t[0], t[1]), mid(t[1], t[2]), mid(t[0], t[2]));
        let kids = [
            [t[0], m01, m02],
            [m01, t[1], m12],
            [m02, m12, t[2]],
            [m01, m12, m02],
        ];
        let q = area / 4.0;
        let fine: Vec<f64> = kids.iter().map(|k| rule(&f, k, q)).collect();
        let refined: f64 = fine.iter().sum();
        let diff = (refined - coarse).abs();
        if diff <= tol * area || depth >= MAX_DEPTH {
            value += refined;
            error += diff;
            triangles += 4;
        } else {
            for (k, c) in kids.into_iter().zip(fine) {
                stack.push((k, q, c, depth + 1));
            }
        }
    }
    Ok(Quadrature {
        value,
        error,
        triangles,
    })
}

/// Sampled comparison: with `1 ≤ B ≤ A` componentwise, the ball density of
/// orthoscheme `A` should not exceed that of `B`. Returns the comparison
/// within the two estimates' combined half-widths.
pub fn rogers_comparison_sample(a: &OrthoschemeSpec, b: &OrthoschemeSpec, cfg: &McConfig) -> Result<bool> {
    let a = OrthoschemeSpec::new(a.norms)?;
    let b = OrthoschemeSpec::new(b.norms)?;
    for k in 0..3 {
        if !(1.0 <= b.norms[k] && b.norms[k] <= a.norms[k]) {
            return Err(Error::Domain(format!(
                "comparison needs 1 <= B <= A componentwise, got A = {:?}, B = {:?}",
                a.norms, b.norms
            )));
        }
    }
    let da = orthoscheme_ball_density(&a, cfg, Estimator::StratifiedRadial)?;
    let db = orthoscheme_ball_density(&b, cfg, Estimator::StratifiedRadial)?;
    Ok(da.value <= db.value + da.half_width + db.half_width)
}

/// `1 / ρ^(2/3) > 1.346`, decided as `10¹² · 10⁹ > 1346³ · (10⁴ ρ)²` for the
/// four-digit bound ρ = 0.6401.
pub fn theorem3_constant_holds() -> bool {
    let lhs = BigInt::from(1000).pow(3) * BigInt::from(10_000).pow(2);
    let rhs = BigInt::from(1346).pow(3) * BigInt::from(6401).pow(2);
    lhs > rhs
}

// ---------------------------------------------------------------------------
// spherical caps

/// Area of a cap of angular radius `theta` on a sphere of radius `r`.
pub fn cap_area(theta: f64, r: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= PI && r > 0.0) {
        return Err(Error::Domain(format!("cap needs 0 < θ ≤ π and R > 0, got θ = {theta}, R = {r}")));
    }
    Ok(2.0 * PI * r * r * (1.0 - theta.cos()))
}

/// Area of the π/4-cap over the area `2π/3` of the regular spherical
/// quadrilateral inscribed in the cap of angular radius `arccos(1/√3)`.
pub fn cap_density_constant() -> f64 {
    cap_area(PI / 4.0, 1.0).expect("valid cap") / (2.0 * PI / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrilateral {
    /// Angular radius of the circumscribed cap.
    pub circumradius: f64,
    /// Angular distance from the center to each side.
    pub inradius: f64,
    /// By the angle excess.
    pub area: f64,
}

/// The regular spherical quadrilateral with vertices `(±1, ±1, 1)/√3`,
/// measured directly: its circumscribed and inscribed caps and its area.
pub fn regular_quadrilateral() -> Quadrilateral {
    let s = 1.0 / 3f64.sqrt();
    let verts = [[s, s, s], [-s, s, s], [-s, -s, s], [s, -s, s]];
    let center = [0.0, 0.0, 1.0];
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let unit = |v: [f64; 3]| {
        let l = norm(&v);
        [v[0] / l, v[1] / l, v[2] / l]
    };
    let circumradius = dot(&verts[0], &center).acos();
    // side midpoint direction
    let m = unit([
        verts[0][0] + verts[1][0],
        verts[0][1] + verts[1][1],
        verts[0][2] + verts[1][2],
    ]);
    let inradius = dot(&m, &center).acos();
    let mut angle_sum = 0.0;
    for i in 0..4 {
        let v = verts[i];
        let prev = verts[(i + 3) % 4];
        let next = verts[(i + 1) % 4];
        // tangent directions at v along the two great-circle sides
        let t1 = unit(cross(cross(v, prev), v));
        let t2 = unit(cross(cross(v, next), v));
        angle_sum += dot(&t1, &t2).clamp(-1.0, 1.0).acos();
    }
    Quadrilateral {
        circumradius,
        inradius,
        area: angle_sum - 2.0 * PI,
    }
}

// ---------------------------------------------------------------------------
// box-polytopes

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoCheck {
    pub surface: i64,
    pub volume: i64,
    /// `surface^d / volume^(d−1)`.
    pub quotient: f64,
    /// `(2d)^d`.
    pub bound: f64,
    pub pass: bool,
    pub equality: bool,
}

/// `surface^d ≥ (2d)^d · volume^(d−1)` for a union of unit cubes, exactly.
pub fn box_isoperimetric_check(s: &LatticeShape) -> Result<IsoCheck> {
    if s.is_empty() {
        return Err(Error::Domain("empty shape".into()));
    }
    let surface = cube_union_surface(s)?;
    let volume = s.len() as i64;
    let d = s.dimension() as u32;
    let lhs = BigInt::from(surface).pow(d);
    let rhs = BigInt::from(2 * d as i64).pow(d) * BigInt::from(volume).pow(d - 1);
    Ok(IsoCheck {
        surface,
        volume,
        quotient: (surface as f64).powi(d as i32) / (volume as f64).powi(d as i32 - 1),
        bound: (2.0 * d as f64).powi(d as i32),
        pass: lhs >= rhs,
        equality: lhs == rhs,
    })
}

// ---------------------------------------------------------------------------
// unions of inflated balls

fn require_unit(p: &PackingConfig) -> Result<()> {
    if p.radius() != 1.0 || p.mode() != Mode::Continuous {
        return Err(Error::Mode("a unit-radius continuous packing (see PackingConfig::to_unit_radius)"));
    }
    Ok(())
}

/// Volume of `∪ (c_i + R·B^d)` by uniform sampling of the bounding box.
pub fn union_volume(p: &PackingConfig, big_r: f64, cfg: &McConfig) -> Result<McEstimate> {
    if !(big_r > 0.0) {
        return Err(Error::Domain(format!("R must be positive, got {big_r}")));
    }
    let d = p.dimension();
    let lo: Vec<f64> = (0..d)
        .map(|k| p.centers().iter().map(|c| c[k]).fold(f64::INFINITY, f64::min) - big_r)
        .collect();
    let hi: Vec<f64> = (0..d)
        .map(|k| p.centers().iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max) + big_r)
        .collect();
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let r2 = big_r * big_r;
    let frac = mc::bernoulli(cfg, 0, |rng| {
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
        p.centers().iter().any(|c| {
            c.iter().zip(&x).map(|(ci, xi)| (ci - xi) * (ci - xi)).sum::<f64>() <= r2
        })
    });
    Ok(frac.scaled(box_volume))
}

/// Surface area of `bd ∪ (c_i + R·B³)`: for each sphere, the fraction of
/// uniform points not strictly inside another inflated ball, times `4πR²`.
/// `cfg.samples` is the count per sphere.
pub fn union_surface(p: &PackingConfig, big_r: f64, cfg: &McConfig) -> Result<McEstimate> {
    if p.dimension() != 3 {
        return Err(Error::Domain("union surface is implemented for d = 3".into()));
    }
    if !(big_r > 0.0) {
        return Err(Error::Domain(format!("R must be positive, got {big_r}")));
    }
    let r2 = big_r * big_r;
    let sphere = 4.0 * PI * r2;
    let mut value = 0.0;
    let mut var = 0.0;
    for i in 0..p.n() {
        let ci = p.center(i);
        let others: Vec<&[f64]> = (0..p.n())
            .filter(|&j| j != i)
            .map(|j| p.center(j))
            .filter(|cj| crate::geometry::dist(ci, cj) < 2.0 * big_r)
            .collect();
        let visible = if others.is_empty() {
            McEstimate {
                value: 1.0,
                half_width: 0.0,
                samples: cfg.samples,
                seed: cfg.seed,
                partitions: cfg.partitions,
            }
        } else {
            mc::bernoulli(cfg, (i as u64 + 1) << 20, |rng| {
                let z: f64 = rng.gen_range(-1.0..=1.0);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                let s = (1.0 - z * z).max(0.0).sqrt();
                let x = [
                    ci[0] + big_r * s * phi.cos(),
                    ci[1] + big_r * s * phi.sin(),
                    ci[2] + big_r * z,
                ];
                !others.iter().any(|c| {
                    (c[0] - x[0]).powi(2) + (c[1] - x[1]).powi(2) + (c[2] - x[2]).powi(2) < r2
                })
            })
        };
        value += sphere * visible.value;
        var += (sphere * visible.sigma()).powi(2);
    }
    Ok(McEstimate {
        value,
        half_width: mc::Z95 * var.sqrt(),
        samples: cfg.samples * p.n() as u64,
        seed: cfg.seed,
        partitions: cfg.partitions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionAudit {
    pub n: usize,
    pub contacts: usize,
    /// Balls touching `2d` others.
    pub saturated: usize,
    pub volume: McEstimate,
    pub surface: McEstimate,
    /// `(4π/3)n / vol`, with its 95% half-width.
    pub density: f64,
    pub density_half_width: f64,
    /// density < 0.6401
    pub density_ok: bool,
    /// 36π vol² ≤ surface³
    pub isoperimetric_ok: bool,
    /// surface ≤ 12πn − 4π·contacts
    pub cap_bound_ok: bool,
    /// 4π n^(2/3) / 0.6401^(2/3) < surface
    pub surface_lower_ok: bool,
    /// surface ≤ 12π(n − saturated)
    pub saturated_bound_ok: bool,
}

impl UnionAudit {
    pub fn all_ok(&self) -> bool {
        self.density_ok && self.isoperimetric_ok && self.cap_bound_ok && self.surface_lower_ok && self.saturated_bound_ok
    }
}

/// Checks the five union inequalities at `R = √3` for a unit-radius packing in
/// `R³`, each within three standard errors.
pub fn union_audit(p: &PackingConfig, cfg: &McConfig) -> Result<UnionAudit> {
    require_unit(p)?;
    if p.dimension() != 3 {
        return Err(Error::Domain("union audit is for d = 3".into()));
    }
    let big_r = 3f64.sqrt();
    let g = contact_graph(p, CONTACT_TOL)?;
    let n = p.n();
    let contacts = g.edge_count();
    let saturated = g.degrees().iter().filter(|&&k| k == 6).count();
    let volume = union_volume(p, big_r, cfg)?;
    let surface = union_surface(p, big_r, cfg)?;
    let (sv, ss) = (3.0 * volume.sigma(), 3.0 * surface.sigma());
    let nf = n as f64;

    let density = 4.0 * PI / 3.0 * nf / volume.value;
    let density_half_width = density * volume.half_width / volume.value;
    let density_lo = 4.0 * PI / 3.0 * nf / (volume.value + sv);
    Ok(UnionAudit {
        n,
        contacts,
        saturated,
        volume,
        surface,
        density,
        density_half_width,
        density_ok: density_lo < DENSITY_BOUND,
        isoperimetric_ok: 36.0 * PI * (volume.value - sv).max(0.0).powi(2) <= (surface.value + ss).powi(3),
        cap_bound_ok: surface.value - ss <= 12.0 * PI * nf - 4.0 * PI * contacts as f64 + 1e-9,
        surface_lower_ok: 4.0 * PI / DENSITY_BOUND.powf(2.0 / 3.0) * nf.powf(2.0 / 3.0) < surface.value + ss,
        saturated_bound_ok: surface.value - ss <= 12.0 * PI * (n - saturated) as f64 + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::block;

    #[test]
    fn profile_examples() {
        let x = 1.5f64.sqrt();
        assert!((circumradius_profile(x).unwrap() - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-12);
        assert!((circumradius_profile(2f64.sqrt()).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(circumradius_profile(1.0 + 1e-6).unwrap() > 300.0);
        assert!(circumradius_profile(1.0 + f64::EPSILON).unwrap() > 1e7);
        assert!(circumradius_profile(1.0).is_err());
        assert!(circumradius_profile(1.5).is_err());
    }

    #[test]
    fn profile_minimum() {
        let m = minimize_profile();
        assert!((m.argmin * m.argmin - 1.5).abs() < 1e-12);
        assert!((m.min - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-12);
        assert!((m.golden_min - m.min).abs() < 1e-12);
        assert!((m.golden_argmin - m.argmin).abs() < 1e-6);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for i in 1..40 {
            let x = 1.0 + 0.41 * i as f64 / 40.0;
            let h = 1e-6;
            let fd = (circumradius_profile(x + h).unwrap() - circumradius_profile(x - h).unwrap()) / (2.0 * h);
            let exact = circumradius_profile_derivative(x);
            assert!((fd - exact).abs() < 1e-5 * exact.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn orthoscheme_examples() {
        let o = build_orthoscheme(&OrthoschemeSpec::extremal()).unwrap();
        assert!((o.w2[1] - 11f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((o.w3[2] - 5f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((o.volume - 55f64.sqrt() / 96.0).abs() < 1e-15);
        assert!(OrthoschemeSpec::new([1.0, 1.0, 1.0]).is_err());
        let unit = OrthoschemeSpec::new([1.0, 2f64.sqrt(), 3f64.sqrt()]).unwrap();
        assert!((build_orthoscheme(&unit).unwrap().volume - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_independent_run() {
        let q = orthoscheme_density_quadrature(&OrthoschemeSpec::extremal(), 1e-12).unwrap();
        // scipy dblquad, epsabs = epsrel = 1e-12
        assert!((q.value - 0.640068335041662).abs() < 1e-10, "{}", q.value);
        assert!((q.value - ORTHOSCHEME_DENSITY).abs() < 1e-13);
    }

    #[test]
    fn density_inside_ball_is_one() {
        let spec = OrthoschemeSpec::new([0.5, 0.7, 0.9]).unwrap();
        let q = orthoscheme_density_quadrature(&spec, 1e-12).unwrap();
        assert!((q.value - 1.0).abs() < 1e-14);
        let cfg = McConfig::new(3, 100_000);
        for est in [Estimator::HitOrMiss, Estimator::Radial, Estimator::StratifiedRadial] {
            assert_eq!(orthoscheme_ball_density(&spec, &cfg, est).unwrap().value, 1.0);
        }
    }

    #[test]
    fn estimators_agree_with_quadrature() {
        let cfg = McConfig::new(42, 2_000_000);
        for norms in [[2.0, 2.5, 3.0], [1.0, 1.3, 1.5], [0.9, 1.1, 1.6]] {
            let spec = OrthoschemeSpec::new(norms).unwrap();
            let q = orthoscheme_density_quadrature(&spec, 1e-12).unwrap().value;
            for est in [Estimator::HitOrMiss, Estimator::Radial, Estimator::StratifiedRadial] {
                let e = orthoscheme_ball_density(&spec, &cfg, est).unwrap();
                assert!((e.value - q).abs() <= 4.0 * e.sigma() + 1e-12, "{norms:?} {est:?}: {} vs {q}", e.value);
            }
        }
    }

    #[test]
    fn rogers_examples() {
        let cfg = McConfig::new(1, 400_000);
        let w = OrthoschemeSpec::extremal();
        let a = OrthoschemeSpec::new([1.1, 1.4, 1.6]).unwrap();
        assert!(rogers_comparison_sample(&a, &w, &cfg).unwrap());
        assert!(rogers_comparison_sample(&w, &w, &cfg).unwrap());
        let b = OrthoschemeSpec::new([1.0, 1.01, 1.02]).unwrap();
        assert!(rogers_comparison_sample(&w, &b, &cfg).unwrap());
        // hypothesis violated
        assert!(rogers_comparison_sample(&b, &w, &cfg).is_err());
    }

    #[test]
    fn theorem3_constant() {
        assert!(theorem3_constant_holds());
        assert!(1.0 / DENSITY_BOUND.powf(2.0 / 3.0) > 1.346);
        assert!(1.0 / ORTHOSCHEME_DENSITY.powf(2.0 / 3.0) > 1.346);
    }

    #[test]
    fn cap_examples() {
        assert!((cap_area(PI / 2.0, 1.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((cap_area(PI / 4.0, 1.0).unwrap() - 1.840_302_369_021_5).abs() < 1e-9);
        assert!((cap_density_constant() - 3.0 * (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-12);
        assert!((cap_density_constant() - 0.878_679_656).abs() < 1e-9);
        assert!(cap_area(0.0, 1.0).is_err());
        assert!(cap_area(1.0, -1.0).is_err());
        let q = regular_quadrilateral();
        assert!((q.circumradius.cos() - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((q.inradius - PI / 4.0).abs() < 1e-14);
        assert!((q.area - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn iso_examples() {
        let c = box_isoperimetric_check(&block(&[2, 2, 2])).unwrap();
        assert_eq!((c.surface, c.volume), (24, 8));
        assert!(c.pass && c.equality);
        let one = box_isoperimetric_check(&block(&[1, 1])).unwrap();
        assert!(one.pass && one.equality && one.quotient == 16.0);
        let tromino = LatticeShape::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let t = box_isoperimetric_check(&tromino).unwrap();
        assert!(t.pass && !t.equality);
        assert!((t.quotient - 64.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn union_single_and_pair() {
        let cfg = McConfig::new(5, 2_000_000);
        let r = 3f64.sqrt();
        let one = PackingConfig::unit(3, vec![vec![0.0; 3]]).unwrap();
        let s = union_surface(&one, r, &cfg).unwrap();
        assert!((s.value - 12.0 * PI).abs() < 1e-12);
        let v = union_volume(&one, r, &cfg).unwrap();
        assert!((v.value - 4.0 * 3f64.sqrt() * PI).abs() < 3.0 * v.sigma() + 1e-12);

        let pair = PackingConfig::unit(3, vec![vec![0.0; 3], vec![2.0, 0.0, 0.0]]).unwrap();
        // closed form: each sphere loses a cap of height R − 1; the lens is two caps
        let h = r - 1.0;
        let surface = 2.0 * (4.0 * PI * r * r - 2.0 * PI * r * h);
        let volume = 2.0 * 4.0 / 3.0 * PI * r.powi(3) - 2.0 * PI * h * h * (3.0 * r - h) / 3.0;
        assert!((surface - (12.0 * PI + 4.0 * 3f64.sqrt() * PI)).abs() < 1e-12);
        assert!((volume - PI * (12.0 * 3f64.sqrt() + 16.0) / 3.0).abs() < 1e-12);
        let s = union_surface(&pair, r, &cfg).unwrap();
        let v = union_volume(&pair, r, &cfg).unwrap();
        assert!((s.value - surface).abs() < 3.0 * s.sigma(), "{} vs {surface}", s.value);
        assert!((v.value - volume).abs() < 3.0 * v.sigma(), "{} vs {volume}", v.value);
        assert!(surface <= 20.0 * PI);

        let audit = union_audit(&pair, &McConfig::new(5, 200_000)).unwrap();
        assert!(audit.all_ok(), "{audit:?}");
        assert_eq!(audit.contacts, 1);
    }
}
