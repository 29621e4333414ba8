//! The `(c1, c2)` region decomposition and the predicted decay exponents.
//!
//! Every exponent is an exact rational function of `(c1, c2)` for a fixed
//! branching degree `m`. Rows are transcribed as printed. The description of
//! refined region (11)_3 follows its ordering `E3' <= E1`.

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = Rational64;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

/// Continued-fraction rational approximation within `1e-12` relative.
pub fn to_rational(x: f64) -> Option<Q> {
    if !x.is_finite() || x.abs() > 1e9 {
        return None;
    }
    let tol = 1e-12 * x.abs().max(1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        let ai = a as i64;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p1 as f64 / q1 as f64).abs() <= tol {
            return Some(Q::new(p1, q1));
        }
        let frac = y - a;
        if frac == 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

/// The half plane `a c1 + b c2 + c >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Half {
    pub a: Q,
    pub b: Q,
    pub c: Q,
}

impl Half {
    pub fn value(&self, c1: Q, c2: Q) -> Q {
        self.a * c1 + self.b * c2 + self.c
    }
}

fn c1_ge(k: Q) -> Half {
    Half { a: qi(1), b: qi(0), c: -k }
}
fn c1_le(k: Q) -> Half {
    Half { a: qi(-1), b: qi(0), c: k }
}
fn c2_ge(k: Q) -> Half {
    Half { a: qi(0), b: qi(1), c: -k }
}
fn c2_le(k: Q) -> Half {
    Half { a: qi(0), b: qi(-1), c: k }
}
fn c2_ge_slope(s: Q) -> Half {
    Half { a: -s, b: qi(1), c: qi(0) }
}
fn c2_le_slope(s: Q) -> Half {
    Half { a: s, b: qi(-1), c: qi(0) }
}
/// `c2 >= u - c1`
fn c2_ge_anti(u: Q) -> Half {
    Half { a: qi(1), b: qi(1), c: -u }
}
/// `c2 <= u - c1`
fn c2_le_anti(u: Q) -> Half {
    Half { a: qi(-1), b: qi(-1), c: u }
}

/// Which exponent table a region id belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Table {
    /// 13 regions, shared by the `L^{6/5}` and `L^1` rows
    Coarse,
    /// 26 refined regions of the `L^6` rows
    Refined,
}

/// `(k)` in the coarse table or `(k)_j` in the refined one; `sub = 0` when
/// the refined table does not split region `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionId {
    pub index: u8,
    pub sub: u8,
}

impl RegionId {
    pub const fn coarse(index: u8) -> Self {
        RegionId { index, sub: 0 }
    }
    pub const fn refined(index: u8, sub: u8) -> Self {
        RegionId { index, sub }
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sub == 0 {
            write!(f, "({})", self.index)
        } else {
            write!(f, "({})_{}", self.index, self.sub)
        }
    }
}

/// Closed region: `0 < c2 < c1` plus the listed half planes.
#[derive(Clone, Debug)]
pub struct Region {
    pub id: RegionId,
    pub halves: Vec<Half>,
}

impl Region {
    pub fn contains(&self, c1: Q, c2: Q) -> bool {
        self.halves.iter().all(|h| h.value(c1, c2) >= qi(0))
    }

    pub fn contains_strictly(&self, c1: Q, c2: Q) -> bool {
        self.halves.iter().all(|h| h.value(c1, c2) > qi(0))
    }
}

/// Boundary constants of the region tables for a given `m`.
struct Marks {
    /// `1 - 1/m`
    u: Q,
    /// `(m-1)^2 / (m (3m-1))`, where `E3 = E4`
    qa: Q,
    /// `(m-1)(2m-1) / (m (5m-1))`, where `E3' = E4`
    qb: Q,
    /// `(2m-1) / (3m)`, where `E3' = E1` (as a slope) or `E3' = E5`
    s3: Q,
}

impl Marks {
    fn new(m: i64) -> Self {
        Marks {
            u: q(m - 1, m),
            qa: q((m - 1) * (m - 1), m * (3 * m - 1)),
            qb: q((m - 1) * (2 * m - 1), m * (5 * m - 1)),
            s3: q(2 * m - 1, 3 * m),
        }
    }
    fn h(&self) -> Q {
        self.u / 2
    }
}

pub fn coarse_regions(m: u32) -> Vec<Region> {
    let k = Marks::new(m as i64);
    let (u, h, qa) = (k.u, k.h(), k.qa);
    let one = qi(1);
    let rows: Vec<(u8, Vec<Half>)> = vec![
        (1, vec![c2_ge(one), c2_ge_slope(h)]),
        (2, vec![c2_ge(one), c2_le_slope(h)]),
        (3, vec![c2_ge(h), c2_le(one), c2_le_slope(h)]),
        (4, vec![c1_ge(one), c2_ge(qa), c2_le(h)]),
        (5, vec![c1_ge(one), c2_le(qa)]),
        (6, vec![c1_ge(one), c2_ge_slope(h), c2_le(one)]),
        (7, vec![c1_le(one), c2_ge(h)]),
        (8, vec![c2_ge_anti(u), c2_le(h), c2_ge_slope(h)]),
        (9, vec![c1_le(one), c2_ge(qa), c2_le_slope(h)]),
        (10, vec![c1_le(one), c2_le(qa), c2_ge_anti(u)]),
        (11, vec![c2_ge(qa), c2_le_anti(u)]),
        (12, vec![c2_ge_slope(h), c2_le(qa)]),
        (13, vec![c2_le_slope(h), c2_le_anti(u)]),
    ];
    rows.into_iter()
        .map(|(i, halves)| Region { id: RegionId::coarse(i), halves })
        .collect()
}

pub fn refined_regions(m: u32) -> Vec<Region> {
    let k = Marks::new(m as i64);
    let (u, h, qa, qb, s3) = (k.u, k.h(), k.qa, k.qb, k.s3);
    let one = qi(1);
    let r = RegionId::refined;
    let rows: Vec<(RegionId, Vec<Half>)> = vec![
        (r(1, 1), vec![c2_ge(one), c2_ge_slope(s3)]),
        (r(1, 2), vec![c2_ge(one), c2_le_slope(s3), c2_ge_slope(h)]),
        (r(2, 0), vec![c2_ge(one), c2_le_slope(h)]),
        (r(3, 1), vec![c2_ge(s3), c2_le(one), c2_le_slope(h)]),
        (r(3, 2), vec![c2_ge(h), c2_le(s3), c2_le_slope(h)]),
        (r(4, 1), vec![c1_ge(one), c2_ge(qb), c2_le(h)]),
        (r(4, 2), vec![c1_ge(one), c2_ge(qa), c2_le(qb)]),
        (r(5, 0), vec![c1_ge(one), c2_le(qa)]),
        (r(6, 1), vec![c1_ge(one), c2_ge_slope(s3), c2_le(one)]),
        (r(6, 2), vec![c2_ge(s3), c2_le_slope(s3), c2_ge_slope(h), c2_le(one)]),
        (r(6, 3), vec![c1_ge(one), c2_ge_slope(h), c2_le(s3)]),
        (r(7, 1), vec![c1_le(one), c2_ge(s3)]),
        (r(7, 2), vec![c2_ge_slope(s3), c2_le(s3), c2_ge(h)]),
        (r(7, 3), vec![c1_le(one), c2_ge(h), c2_le_slope(s3)]),
        (r(8, 1), vec![c2_ge_anti(u), c2_le(h), c2_ge_slope(s3)]),
        (r(8, 2), vec![c2_ge(qb), c2_le_slope(s3), c2_ge_slope(h), c2_le(h)]),
        (r(8, 3), vec![c2_ge_anti(u), c2_le(qb), c2_ge_slope(h)]),
        (r(9, 1), vec![c1_le(one), c2_ge(qb), c2_le_slope(h)]),
        (r(9, 2), vec![c1_le(one), c2_ge(qa), c2_le_slope(h), c2_le(qb)]),
        (r(10, 0), vec![c1_le(one), c2_le(qa), c2_ge_anti(u)]),
        (r(11, 1), vec![c2_ge(qb), c2_le_anti(u)]),
        (r(11, 2), vec![c2_ge(qa), c2_ge_slope(s3), c2_le(qb)]),
        (r(11, 3), vec![c2_ge(qa), c2_le_slope(s3), c2_le_anti(u)]),
        (r(12, 1), vec![c2_ge_slope(s3), c2_le(qa)]),
        (r(12, 2), vec![c2_ge_slope(h), c2_le_slope(s3), c2_le(qa)]),
        (r(13, 0), vec![c2_le_slope(h), c2_le_anti(u)]),
    ];
    rows.into_iter().map(|(id, halves)| Region { id, halves }).collect()
}

pub fn regions(table: Table, m: u32) -> Vec<Region> {
    match table {
        Table::Coarse => coarse_regions(m),
        Table::Refined => refined_regions(m),
    }
}

fn check_quadrant(c1: Q, c2: Q, m: u32) -> Result<()> {
    if m < 2 || !(c2 > qi(0) && c2 < c1) {
        return Err(Error::InvalidParameter(format!(
            "region lookup needs m >= 2 and 0 < c2 < c1 (m = {m}, c1 = {c1}, c2 = {c2})"
        )));
    }
    Ok(())
}

/// First region, in table order, whose closed inequalities hold.
pub fn classify_exact(table: Table, c1: Q, c2: Q, m: u32) -> Result<RegionId> {
    check_quadrant(c1, c2, m)?;
    regions(table, m)
        .into_iter()
        .find(|r| r.contains(c1, c2))
        .map(|r| r.id)
        .ok_or(Error::NoRegion { c1: to_f64(c1), c2: to_f64(c2), m })
}

pub fn classify_region(c1: f64, c2: f64, m: u32) -> Result<RegionId> {
    let (a, b) = rational_pair(c1, c2)?;
    classify_exact(Table::Coarse, a, b, m)
}

pub fn classify_refined(c1: f64, c2: f64, m: u32) -> Result<RegionId> {
    let (a, b) = rational_pair(c1, c2)?;
    classify_exact(Table::Refined, a, b, m)
}

fn rational_pair(c1: f64, c2: f64) -> Result<(Q, Q)> {
    match (to_rational(c1), to_rational(c2)) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::InvalidParameter(format!("c1 = {c1}, c2 = {c2} not representable"))),
    }
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// One summand `O(t^e |log t|^p)` with `e = c0 + k1 c1 + k2 c2 + kinv / c2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expo {
    pub c0: Q,
    pub k1: Q,
    pub k2: Q,
    pub kinv: Q,
    pub log: Q,
}

impl Expo {
    fn new(c0: Q, k1: Q, k2: Q) -> Self {
        Expo { c0, k1, k2, kinv: qi(0), log: qi(0) }
    }
    fn with_log(mut self, p: Q) -> Self {
        self.log = p;
        self
    }
    pub fn at(&self, c1: Q, c2: Q) -> Q {
        let inv = if self.kinv == qi(0) { qi(0) } else { self.kinv / c2 };
        self.c0 + self.k1 * c1 + self.k2 * c2 + inv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    EpsC0P,
    EpsC0Q,
    EpsL65P,
    EpsL65Q,
    EpsL1P,
    EpsL1Q,
    DepsL6P,
    DepsL6Q,
    DfL3,
    OneMinusFL65,
    BetaNormK,
    CurvSup,
    SlopeMin,
}

impl Quantity {
    pub const ALL: [Quantity; 13] = [
        Quantity::EpsC0P,
        Quantity::EpsC0Q,
        Quantity::EpsL65P,
        Quantity::EpsL65Q,
        Quantity::EpsL1P,
        Quantity::EpsL1Q,
        Quantity::DepsL6P,
        Quantity::DepsL6Q,
        Quantity::DfL3,
        Quantity::OneMinusFL65,
        Quantity::BetaNormK,
        Quantity::CurvSup,
        Quantity::SlopeMin,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Quantity::EpsC0P => "epsC0_P",
            Quantity::EpsC0Q => "epsC0_Q",
            Quantity::EpsL65P => "epsL65_P",
            Quantity::EpsL65Q => "epsL65_Q",
            Quantity::EpsL1P => "epsL1_P",
            Quantity::EpsL1Q => "epsL1_Q",
            Quantity::DepsL6P => "depsL6_P",
            Quantity::DepsL6Q => "depsL6_Q",
            Quantity::DfL3 => "dF_L3",
            Quantity::OneMinusFL65 => "oneMinusF_L65",
            Quantity::BetaNormK => "betaNorm_k",
            Quantity::CurvSup => "curvSup",
            Quantity::SlopeMin => "slopeMin",
        }
    }

    pub fn from_tag(s: &str) -> Option<Quantity> {
        Quantity::ALL.iter().copied().find(|q| q.tag() == s)
    }

    /// Region of the glued domain the quantity lives on, if any.
    pub fn piece(&self) -> Option<crate::gluing::RegionLabel> {
        use crate::gluing::RegionLabel;
        match self {
            Quantity::EpsC0P | Quantity::EpsL65P | Quantity::EpsL1P | Quantity::DepsL6P => Some(RegionLabel::P),
            Quantity::EpsC0Q | Quantity::EpsL65Q | Quantity::EpsL1Q | Quantity::DepsL6Q => Some(RegionLabel::Q),
            _ => None,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    EqualityOrder,
    UpperBound,
}

/// A table row: its summands and where it came from.
#[derive(Clone, Debug)]
pub struct Row {
    pub region: Option<RegionId>,
    /// `"m<=5"`, `"m=6"`, ... when the row is one of several `m` branches
    pub branch: Option<&'static str>,
    pub kind: BoundKind,
    pub summands: Vec<Expo>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub exponent: Q,
    /// log power of the dominant summand; 0 when there is none
    pub log_power: Q,
    pub kind: BoundKind,
    pub region: Option<RegionId>,
    pub branch: Option<&'static str>,
    /// `m` is one of the degrees excluded by the global estimate
    pub exceptional_m: bool,
}

impl Prediction {
    pub fn exponent_f64(&self) -> f64 {
        to_f64(self.exponent)
    }
    pub fn has_log(&self) -> bool {
        self.log_power != qi(0)
    }
}

impl Row {
    /// Dominant (smallest) summand exponent at `(c1, c2)`; ties prefer the
    /// larger log power.
    pub fn dominant(&self, c1: Q, c2: Q) -> (Q, Q) {
        let mut best: Option<(Q, Q)> = None;
        for e in &self.summands {
            let v = e.at(c1, c2);
            best = match best {
                None => Some((v, e.log)),
                Some((bv, bl)) if v < bv || (v == bv && e.log > bl) => Some((v, e.log)),
                b => b,
            };
        }
        best.expect("rows are never empty")
    }
}

fn branch3(m: i64, lo: i64, mid: i64) -> usize {
    if m < mid && m >= lo {
        0
    } else if m == mid {
        1
    } else {
        2
    }
}

/// `L^{6/5}` row of the coarse table.
fn row_l65(id: u8, m: i64) -> (Vec<Expo>, Option<&'static str>) {
    let u = q(m - 1, m);
    let mq = qi(m);
    let z = qi(0);
    let base = Expo::new(q(8, 3) * u, z, q(-11, 3));
    let tail = Expo::new(u, z, q(-1, 3));
    let a_row = Expo::new(q(8, 3) * u, q(5, 6) - q(11, 6) * u, q(-5, 6));
    let six = Expo::new(q(7, 2) - q(8, 3) / mq, z, q(-9, 2));
    match id {
        1 | 7 => (vec![base], None),
        2 => (vec![a_row, base], None),
        3 => (vec![a_row, six, base], None),
        4 => {
            let (second, br) = match branch3(m, 2, 6) {
                0 => (Expo::new(q(11, 6) * u, z, q(5, 6) - qi(2) * mq + q(5, 3 * (m - 1))), "2<=m<=5"),
                1 => (Expo::new(q(11, 6) * u, z, q(-55, 36)).with_log(q(5, 6)), "m=6"),
                _ => (Expo::new(q(5, 6) * (qi(2) - mq.recip()), z, q(-5, 6)), "m>=7"),
            };
            (vec![a_row, second, base, tail], Some(br))
        }
        5 => {
            let first = Expo::new(q(8, 3) * u, q(11, 6) / mq - 1, q(-5, 6));
            let second = Expo::new(q(5, 3) - q(5, 6) / mq, z, q(-5, 6));
            let (third, br) = match branch3(m, 2, 11) {
                0 => (Expo::new(q(11, 6) * u, z, q(11 - m, 3 * (m - 1))), "2<=m<=10"),
                1 => (Expo::new(q(5, 3), z, z).with_log(q(5, 6)), "m=11"),
                _ => (
                    Expo::new(q(1, 6) * u * (qi(10) + q(11, m)), z, q(1, 6) * (qi(1) - q(11, m))),
                    "m>=12",
                ),
            };
            (vec![first, second, third, tail], Some(br))
        }
        6 => (vec![six, base], None),
        8 => (vec![base, tail], None),
        9 => {
            let (first, br) = match branch3(m, 2, 6) {
                0 => (Expo::new(q(11, 6) * u, z, q(-17, 6) + q(5 * m, 3 * (m - 1))), "2<=m<=5"),
                1 => (Expo::new(q(11, 6) * u, z, q(-5, 6)).with_log(q(5, 6)), "m=6"),
                _ => (Expo::new(q(11, 6) * u, -(mq.recip() - q(1, 6)), q(-5, 6)), "m>=7"),
            };
            (vec![first, base, tail], Some(br))
        }
        10 => {
            let second = Expo::new(u, z, (mq.recip() + q(2, 3)) * q(2 * m, m - 1));
            let (first, br) = match branch3(m, 2, 6) {
                0 => (Expo::new(q(8, 3) * u - u * u, z, -(q(2, 3) + mq.recip())), "2<=m<=5"),
                1 => (Expo::new(q(55, 36), z, q(-5, 6)).with_log(q(5, 6)), "m=6"),
                _ => (Expo::new(q(11, 6) * u, mq.recip() - q(1, 6), q(-5, 6)), "m>=7"),
            };
            (vec![first, second, tail], Some(br))
        }
        11 | 12 => (vec![tail], None),
        13 => (vec![Expo::new(u, z, q(4, 3) + q(10, 3 * (m - 1))), tail], None),
        _ => unreachable!("coarse region index {id}"),
    }
}

/// `L^1` row of the coarse table.
fn row_l1(id: u8, m: i64) -> (Vec<Expo>, Option<&'static str>) {
    let u = q(m - 1, m);
    let mq = qi(m);
    let z = qi(0);
    let base = Expo::new(u * 3, z, qi(-4));
    let tail = Expo::new(u, z, z);
    let six = Expo::new(qi(4) - q(3, m), z, qi(-5));
    let (lead, br) = if m == 2 {
        (Expo::new(q(3, 2), z, qi(-1)).with_log(qi(1)), "m=2")
    } else {
        (Expo::new(u * 3, q(2, m) - 1, qi(-1)), "m>=3")
    };
    match id {
        1 | 7 => (vec![base], None),
        2 => (vec![lead, base], Some(br)),
        3 => (vec![lead, six, base], Some(br)),
        4 => (vec![lead, Expo::new(u * 2, z, qi(-1) + q(2, m - 1)), base, tail], Some(br)),
        5 => {
            let mid = Expo::new(u * 2, z, q(4, m - 1));
            if m == 2 {
                (vec![lead, mid, tail], Some(br))
            } else {
                (vec![lead, Expo::new(qi(2) - mq.recip(), z, qi(-1)), mid, tail], Some(br))
            }
        }
        6 => (vec![six, base], None),
        8 => (vec![base, tail], None),
        9 => (vec![Expo::new(u * 2, z, qi(-1) - q(2, m - 1)), base, tail], None),
        10 => {
            let k = qi(1) + mq.recip();
            (
                vec![Expo::new(qi(2) - k / mq, z, -k), Expo::new(u, z, q(2 * (m + 1), m - 1)), tail],
                None,
            )
        }
        11 | 12 => (vec![tail], None),
        13 => (vec![Expo::new(u, z, q(2 * (m + 1), m - 1)), tail], None),
        _ => unreachable!("coarse region index {id}"),
    }
}

/// `L^6` row of `d eps` in the refined table.
fn row_l6(id: RegionId, m: i64) -> Vec<Expo> {
    let u = q(m - 1, m);
    let im = q(1, m);
    let z = qi(0);
    let e = |c0: Q, k1: Q, k2: Q| Expo::new(c0, k1, k2);
    let base = e(q(4, 3) * u, z, q(-10, 3));
    let tail = e(u, z, q(-8, 3));
    let half = e(q(4, 3) * u, im - q(11, 6), q(-1, 2));
    let seven = e(q(4, 3) * u, q(7, 6) * im - 2, q(-1, 6));
    let big = q(25, 6) + q(5, 3 * (m - 1));
    let mid = q(23, 6) + q(5, 3 * (m - 1));
    let sixth_a = e(q(-2, 3) - q(1, 6) * im, z, q(-1, 6));
    let seven_six = e(q(7, 6) * u, z, -mid);
    let nine = e(q(7, 6) * u, im - q(11, 6), q(-1, 6));
    let cross = e(u * (im - q(2, 3)), z, im - q(5, 3));
    let e35 = e(q(7, 6) * u, z, q(9 - 35 * m, 6 * (2 * m - 1)));
    let three_half = e(q(3, 2) - q(4, 3) * im, z, q(-7, 2));
    let minus_half = e(q(-1, 2) - q(1, 3) * im, z, q(-1, 2));
    let flat_c1 = e(u, im - q(5, 3), z);
    let konst = e(u - q(2 * (5 * m - 3), 3 * (m - 1)), z, z);
    match (id.index, id.sub) {
        (1, 1) | (7, 1) | (7, 2) => vec![base],
        (1, 2) | (7, 3) => vec![half, base],
        (2, 0) => vec![seven, e(q(4, 3) * u, z, -big), base],
        (3, 1) => vec![seven, e(-big, z, z), three_half, base],
        (3, 2) => vec![
            e(q(4, 3) * u, im - q(11, 6), q(-1, 6)),
            e(q(4, 3) * u, z, -big),
            minus_half,
            e(q(4, 3) * u, z, q(-23, 6)),
        ],
        (4, 1) => vec![seven, sixth_a, seven_six, base, tail],
        (4, 2) => vec![seven, sixth_a, seven_six, e(u * (im - q(2, 3)), z, -(im - q(5, 3))), tail],
        (5, 0) => vec![
            seven,
            sixth_a,
            e(u * (q(7, 6) * im - q(2, 3)), z, -(q(7, 6) * im - q(11, 6))),
            konst,
            tail,
        ],
        (6, 1) => vec![three_half, base],
        (6, 2) => vec![half, three_half, base],
        (6, 3) => vec![half, minus_half, base],
        (8, 1) => vec![e(q(4, 3) * u, z, q(-7, 2)), tail],
        (8, 2) => vec![e35, base, tail],
        (8, 3) => vec![e35, cross, tail],
        (9, 1) => vec![nine, seven_six, base, tail],
        (9, 2) => vec![nine, seven_six, cross, tail],
        (10, 0) => {
            let inv = Expo { c0: u, k1: z, k2: z, kinv: -q(2 * (5 * m - 3), 3 * (m - 1)), log: z };
            vec![nine, cross, inv, tail]
        }
        (11, 1) | (11, 2) | (12, 1) => vec![tail],
        (11, 3) | (12, 2) => vec![flat_c1, tail],
        (13, 0) => vec![flat_c1, konst, tail],
        _ => unreachable!("refined region {id}"),
    }
}

pub fn exceptional_m(m: u32) -> bool {
    matches!(m, 2 | 6 | 11)
}

/// The table row for `quantity` at `(c1, c2, m)`. P rows and the C0 rows do
/// not depend on a region id.
pub fn row_for(quantity: Quantity, c1: Q, c2: Q, m: u32) -> Result<Row> {
    check_quadrant(c1, c2, m)?;
    let mi = m as i64;
    let u = q(mi - 1, mi);
    let z = qi(0);
    let one = qi(1);
    let p_len = |scale: Q| {
        if c1 <= one {
            Expo::new(z, scale, z)
        } else {
            Expo::new(scale * (one - q(1, mi)), scale * q(1, mi), z)
        }
    };
    let eq = |summands: Vec<Expo>| Row { region: None, branch: None, kind: BoundKind::EqualityOrder, summands };
    let row = match quantity {
        Quantity::EpsC0P => eq(vec![Expo::new(z, one, z), Expo::new(u, q(1, mi), z)]),
        Quantity::EpsC0Q => Row {
            region: None,
            branch: None,
            kind: BoundKind::UpperBound,
            summands: vec![Expo::new(u, z, qi(-2)), Expo::new(u, -u, z)],
        },
        Quantity::EpsL65P => eq(vec![p_len(q(8, 3))]),
        Quantity::EpsL1P => eq(vec![p_len(qi(3))]),
        Quantity::DepsL6P => {
            if c1 <= one {
                eq(vec![Expo::new(q(1, mi) - 1, q(4, 3) - q(1, mi), z)])
            } else {
                eq(vec![p_len(q(1, 3))])
            }
        }
        Quantity::EpsL65Q | Quantity::EpsL1Q => {
            let id = classify_exact(Table::Coarse, c1, c2, m)?;
            let (summands, branch) = if quantity == Quantity::EpsL65Q {
                row_l65(id.index, mi)
            } else {
                row_l1(id.index, mi)
            };
            Row { region: Some(id), branch, kind: BoundKind::UpperBound, summands }
        }
        Quantity::DepsL6Q => {
            let id = classify_exact(Table::Refined, c1, c2, m)?;
            Row { region: Some(id), branch: None, kind: BoundKind::UpperBound, summands: row_l6(id, mi) }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "{other} has no (c1, c2) exponent table"
            )))
        }
    };
    Ok(row)
}

/// Exact row for an explicit region id (used by the boundary checks).
pub fn row_in_region(quantity: Quantity, id: RegionId, m: u32) -> Option<Vec<Expo>> {
    let mi = m as i64;
    match quantity {
        Quantity::EpsL65Q if id.sub == 0 => Some(row_l65(id.index, mi).0),
        Quantity::EpsL1Q if id.sub == 0 => Some(row_l1(id.index, mi).0),
        Quantity::DepsL6Q => Some(row_l6(id, mi)),
        _ => None,
    }
}

pub fn predicted_exact(quantity: Quantity, c1: Q, c2: Q, m: u32) -> Result<Prediction> {
    let row = row_for(quantity, c1, c2, m)?;
    let (exponent, log_power) = row.dominant(c1, c2);
    Ok(Prediction {
        exponent,
        log_power,
        kind: row.kind,
        region: row.region,
        branch: row.branch,
        exceptional_m: exceptional_m(m),
    })
}

pub fn predicted_exponent(quantity: Quantity, c1: f64, c2: f64, m: u32) -> Result<Prediction> {
    let (a, b) = rational_pair(c1, c2)?;
    predicted_exact(quantity, a, b, m)
}

/// Outcome of the lattice consistency checks for one table.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct LatticeReport {
    pub points: usize,
    pub uncovered: Vec<(f64, f64)>,
    /// points interior to two regions at once
    pub overlaps: Vec<(f64, f64, String, String)>,
    pub boundary_points: usize,
    /// `(c1, c2, quantity, region a, exponent a, region b, exponent b)`
    pub jumps: Vec<(f64, f64, String, String, f64, String, f64)>,
}

impl LatticeReport {
    pub fn coverage_ok(&self) -> bool {
        self.uncovered.is_empty() && self.overlaps.is_empty()
    }
    pub fn continuity_ok(&self) -> bool {
        self.jumps.is_empty()
    }
}

/// `n x n` lattice `c = 3k/n`, `k = 1..n`, restricted to `c2 < c1`, plus
/// sample points on every boundary line of the table.
pub fn lattice_check(table: Table, m: u32, n: i64) -> LatticeReport {
    let regs = regions(table, m);
    let mut rep = LatticeReport::default();
    let mut pts = Vec::new();
    for i in 1..=n {
        for j in 1..i {
            pts.push((q(3 * i, n), q(3 * j, n)));
        }
    }
    rep.points = pts.len();
    for &(c1, c2) in &pts {
        if !regs.iter().any(|r| r.contains(c1, c2)) {
            rep.uncovered.push((to_f64(c1), to_f64(c2)));
        }
        let strict: Vec<&Region> = regs.iter().filter(|r| r.contains_strictly(c1, c2)).collect();
        if strict.len() > 1 {
            rep.overlaps.push((to_f64(c1), to_f64(c2), strict[0].id.to_string(), strict[1].id.to_string()));
        }
    }
    let mut boundary = pts;
    let mut lines: Vec<Half> = regs.iter().flat_map(|r| r.halves.iter().copied()).collect();
    lines.dedup();
    for h in &lines {
        for k in 1..=n {
            let s = q(3 * k, n);
            if h.b != qi(0) {
                boundary.push((s, -(h.a * s + h.c) / h.b));
            } else if h.a != qi(0) {
                boundary.push((-(h.c) / h.a, s));
            }
        }
    }
    let quantities: &[Quantity] = match table {
        Table::Coarse => &[Quantity::EpsL65Q, Quantity::EpsL1Q],
        Table::Refined => &[Quantity::DepsL6Q],
    };
    for (c1, c2) in boundary {
        if !(c2 > qi(0) && c2 < c1) {
            continue;
        }
        let hits: Vec<&Region> = regs.iter().filter(|r| r.contains(c1, c2)).collect();
        if hits.len() < 2 {
            continue;
        }
        rep.boundary_points += 1;
        for &qt in quantities {
            let vals: Vec<(RegionId, Q)> = hits
                .iter()
                .map(|r| {
                    let s = row_in_region(qt, r.id, m).expect("table row");
                    let row = Row { region: Some(r.id), branch: None, kind: BoundKind::UpperBound, summands: s };
                    (r.id, row.dominant(c1, c2).0)
                })
                .collect();
            for w in vals.windows(2) {
                if w[0].1 != w[1].1 {
                    rep.jumps.push((
                        to_f64(c1),
                        to_f64(c2),
                        qt.tag().to_string(),
                        w[0].0.to_string(),
                        to_f64(w[0].1),
                        w[1].0.to_string(),
                        to_f64(w[1].1),
                    ));
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifier_examples() {
        assert_eq!(classify_region(0.5, 0.3, 2).unwrap(), RegionId::coarse(7));
        assert_eq!(classify_region(2.0, 1.5, 2).unwrap(), RegionId::coarse(1));
        assert_eq!(classify_region(0.2, 0.1, 3).unwrap(), RegionId::coarse(12));
    }

    #[test]
    fn classifier_rejects_outside_quadrant() {
        assert!(classify_region(0.3, 0.5, 2).is_err());
        assert!(classify_region(0.3, 0.0, 2).is_err());
    }

    #[test]
    fn rational_conversion() {
        assert_eq!(to_rational(0.3), Some(q(3, 10)));
        assert_eq!(to_rational(1.5), Some(q(3, 2)));
        assert_eq!(to_rational(0.03 * 7.0), Some(q(21, 100)));
    }

    #[test]
    fn worked_predictions() {
        let p = predicted_exponent(Quantity::EpsL65P, 0.5, 0.3, 2).unwrap();
        assert_eq!(p.exponent, q(4, 3));
        assert_eq!(p.kind, BoundKind::EqualityOrder);
        let p = predicted_exponent(Quantity::EpsL65Q, 0.5, 0.3, 2).unwrap();
        assert_eq!(p.exponent, q(7, 30));
        assert_eq!(p.region, Some(RegionId::coarse(7)));
        assert_eq!(p.kind, BoundKind::UpperBound);
        let p = predicted_exponent(Quantity::EpsL1P, 1.5, 0.3, 2).unwrap();
        assert_eq!(p.exponent, q(3, 1) * (qi(1) + q(1, 4)));
        let p = predicted_exponent(Quantity::EpsC0P, 0.5, 0.3, 2).unwrap();
        assert_eq!(p.exponent, q(1, 2));
        let p = predicted_exponent(Quantity::DepsL6P, 0.5, 0.3, 2).unwrap();
        assert_eq!(p.exponent, q(-1, 12));
    }

    #[test]
    fn exceptional_branches_are_selected() {
        let p = predicted_exponent(Quantity::EpsL65Q, 0.9, 0.05, 6).unwrap();
        assert_eq!(p.region, Some(RegionId::coarse(10)));
        assert_eq!(p.branch, Some("m=6"));
        assert!(p.exceptional_m);
        let p = predicted_exponent(Quantity::EpsL1Q, 5.0, 1.2, 2).unwrap();
        assert_eq!(p.region, Some(RegionId::coarse(2)));
        assert_eq!(p.branch, Some("m=2"));
        let row = row_for(Quantity::EpsL1Q, q(5, 1), q(6, 5), 2).unwrap();
        assert_eq!(row.summands[0].log, qi(1));
    }

    #[test]
    fn non_table_quantities_are_rejected() {
        assert!(predicted_exponent(Quantity::CurvSup, 0.5, 0.3, 2).is_err());
    }

    #[test]
    fn tags_round_trip() {
        for qt in Quantity::ALL {
            assert_eq!(Quantity::from_tag(qt.tag()), Some(qt));
        }
    }

    #[test]
    fn tables_cover_quadrant() {
        for m in [2, 3, 4, 7] {
            for table in [Table::Coarse, Table::Refined] {
                let rep = lattice_check(table, m, 100);
                assert!(rep.coverage_ok(), "{table:?} m = {m}: {:?} {:?}", rep.uncovered.get(..3), rep.overlaps.get(..3));
            }
        }
    }

    #[test]
    fn coarse_table_is_continuous_for_large_m() {
        for m in [6, 7, 11, 12] {
            let rep = lattice_check(Table::Coarse, m, 60);
            assert!(rep.continuity_ok(), "m = {m}: {:?}", rep.jumps.first());
        }
    }

    #[test]
    fn refined_lookup_examples() {
        assert_eq!(classify_refined(0.5, 0.3, 2).unwrap(), RegionId::refined(7, 2));
        assert_eq!(classify_refined(2.0, 1.5, 3).unwrap(), RegionId::refined(1, 1));
        let p = predicted_exponent(Quantity::DepsL6Q, 0.5, 0.45, 3).unwrap();
        assert_eq!(p.exponent, q(4, 3) * q(2, 3) - q(10, 3) * q(9, 20));
    }
}
