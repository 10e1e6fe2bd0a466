//! Closed-form upper bounds on contact numbers.
//!
//! Every bound is a floor of an irrational expression. Values are computed in
//! floating point and, when the fractional part falls within [`FLOOR_GUARD`]
//! of an integer, settled by an exact integer inequality.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};

pub const FLOOR_GUARD: f64 = 1e-9;

/// Constant in the strict bound for `c(n, 3)`, as the rational 1346/1000.
const THM3_NUM: i64 = 1346;
const THM3_DEN: i64 = 1000;

/// Which maximum a bound speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    /// Over all totally separable packings of unit balls.
    #[serde(rename = "c")]
    C,
    /// Over totally separable packings with centers in `Z^d` (unit diameter).
    #[serde(rename = "c_Z")]
    CZ,
}

impl Quantity {
    pub fn label(self) -> &'static str {
        match self {
            Quantity::C => "c",
            Quantity::CZ => "c_Z",
        }
    }
}

fn floor_with<F: Fn(i64) -> bool>(value: f64, at_most: F) -> i64 {
    let f = value.floor();
    let frac = value - f;
    let mut m = f as i64;
    if frac < FLOOR_GUARD || frac > 1.0 - FLOOR_GUARD {
        // `at_most(m)` is `m <= value`, decided exactly
        while at_most(m + 1) {
            m += 1;
        }
        while !at_most(m) {
            m -= 1;
        }
    }
    m
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn perfect_power_root(n: i64, d: u32) -> Option<i64> {
    let guess = (n as f64).powf(1.0 / d as f64).round() as i64;
    (guess - 1..=guess + 1).find(|&k| k > 0 && big(k).pow(d) == big(n))
}

fn require_n(n: i64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("bounds need n >= 2, got {n}")));
    }
    Ok(())
}

/// `⌊2n − 2√n⌋`, the maximum contact number of totally separable disk packings.
pub fn harborth_ts(n: i64) -> Result<i64> {
    require_n(n)?;
    let value = 2.0 * n as f64 - 2.0 * (n as f64).sqrt();
    Ok(floor_with(value, |m| {
        let x = 2 * n - m;
        x >= 0 && big(x) * big(x) >= big(4 * n)
    }))
}

/// `⌊dn − d·n^((d−1)/d)⌋`, the bound on `c_Z(n, d)`.
pub fn thm1_bound(n: i64, d: u32) -> Result<i64> {
    require_n(n)?;
    if d < 2 {
        return Err(Error::Domain(format!("dimension {d} < 2")));
    }
    let di = d as i64;
    if let Some(k) = perfect_power_root(n, d) {
        return Ok(di * n - di * k.pow(d - 1));
    }
    let nf = n as f64;
    let value = d as f64 * nf - d as f64 * nf.powf((d as f64 - 1.0) / d as f64);
    Ok(floor_with(value, |m| {
        let x = di * n - m;
        x >= 0 && big(x).pow(d) >= big(di).pow(d) * big(n).pow(d - 1)
    }))
}

/// `⌊dn − n^((d−1)/d) / (2 d^((d−1)/2))⌋` for `d ≥ 4`, a bound on `c(n, d)`.
pub fn thm2_bound(n: i64, d: u32) -> Result<i64> {
    require_n(n)?;
    if d < 4 {
        return Err(Error::Domain(format!("this bound is stated for d >= 4, got {d}")));
    }
    let di = d as i64;
    let nf = n as f64;
    let df = d as f64;
    let value = df * nf - nf.powf((df - 1.0) / df) / (2.0 * df.powf((df - 1.0) / 2.0));
    Ok(floor_with(value, |m| {
        let x = di * n - m;
        // (2 d^((d-1)/2) x)^d >= n^(d-1)
        x >= 0 && big(2 * x).pow(d) * big(di).pow(d * (d - 1) / 2) >= big(n).pow(d - 1)
    }))
}

/// `⌊3n − 1.346·n^(2/3)⌋`, the floor of a strict upper bound on `c(n, 3)`.
pub fn thm3_bound(n: i64) -> Result<i64> {
    require_n(n)?;
    let nf = n as f64;
    let value = 3.0 * nf - 1.346 * nf.powf(2.0 / 3.0);
    Ok(floor_with(value, |m| {
        let x = 3 * n - m;
        x >= 0 && big(THM3_DEN * x).pow(3) >= big(THM3_NUM).pow(3) * big(n).pow(2)
    }))
}

/// Quadratic closure of the planar induction: `c² − 4nc + 4n² − 4n ≥ 0` with
/// `c < 2n`, i.e. `c ≤ 2n − 2√n`.
pub fn appendix_chain_check(n: i64, c: i64) -> bool {
    if n < 2 || c < 0 || c >= 2 * n {
        return false;
    }
    let (n, c) = (n as i128, c as i128);
    c * c - 4 * n * c + 4 * n * n - 4 * n >= 0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub quantity: Quantity,
    pub bound_name: &'static str,
    pub value: i64,
    /// The real-valued bound is strict; `value` is its floor, so integer
    /// contact numbers satisfy `c <= value` either way.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: i64,
    pub d: u32,
    pub trivial_dn: i64,
    pub harborth: Option<i64>,
    pub thm1_lattice: i64,
    pub thm2: Option<i64>,
    pub thm3: Option<i64>,
    /// `3n − 3n^(2/3)`, the leading terms of `c_Z(n, 3)`.
    pub asymptotic3_mainterm: Option<f64>,
    pub entries: Vec<BoundEntry>,
    /// Every applicable bound is at most `dn`.
    pub below_trivial: bool,
    /// At `d = 2`, the planar formula equals the lattice bound.
    pub planar_matches_lattice: Option<bool>,
}

pub fn bound_report(n: i64, d: u32) -> Result<BoundReport> {
    let thm1 = thm1_bound(n, d)?;
    let trivial_dn = d as i64 * n;
    let harborth = if d == 2 { Some(harborth_ts(n)?) } else { None };
    let thm2 = if d >= 4 { Some(thm2_bound(n, d)?) } else { None };
    let thm3 = if d == 3 { Some(thm3_bound(n)?) } else { None };
    let asymptotic3_mainterm = (d == 3).then(|| 3.0 * n as f64 - 3.0 * (n as f64).powf(2.0 / 3.0));

    let mut entries = vec![BoundEntry {
        quantity: Quantity::C,
        bound_name: "trivial",
        value: trivial_dn,
        strict: false,
    }];
    if let Some(value) = harborth {
        entries.push(BoundEntry {
            quantity: Quantity::C,
            bound_name: "harborth",
            value,
            strict: false,
        });
    }
    entries.push(BoundEntry {
        quantity: Quantity::CZ,
        bound_name: "thm1",
        value: thm1,
        strict: false,
    });
    if let Some(value) = thm2 {
        entries.push(BoundEntry {
            quantity: Quantity::C,
            bound_name: "thm2",
            value,
            strict: false,
        });
    }
    if let Some(value) = thm3 {
        entries.push(BoundEntry {
            quantity: Quantity::C,
            bound_name: "thm3",
            value,
            strict: true,
        });
    }
    let below_trivial = entries.iter().all(|e| e.value <= trivial_dn);
    Ok(BoundReport {
        n,
        d,
        trivial_dn,
        harborth,
        thm1_lattice: thm1,
        thm2,
        thm3,
        asymptotic3_mainterm,
        entries,
        below_trivial,
        planar_matches_lattice: harborth.map(|h| h == thm1),
    })
}

impl BoundReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,d,quantity,bound_name,value,strict\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.n,
                self.d,
                e.quantity.label(),
                e.bound_name,
                e.value,
                e.strict
            ));
        }
        out
    }

    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.bound_name == name)
    }
}
