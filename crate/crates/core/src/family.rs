//! The deforming family `P_t`: Table 1 normals, critical times, the quotient
//! `Q_t`, angle functions, and the symmetry/pairing isometries.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::coxeter::{enumerate_strata, CoxeterError, Polytope, StrataMode};
use crate::lorentz::{
    minkowski_product, pair_relation, LorentzError, PairRelation, SpaceLikeVector, Vector,
};
use crate::scalar::{eps, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("t = {0} outside the family range (0, 1]")]
    OutOfRange(String),
    #[error("{func} is undefined at t = {t}")]
    Domain { func: &'static str, t: f64 },
    #[error("t has no exact value in this backend")]
    NotExact,
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("isometry does not preserve the normal set (wall {0} has no image)")]
    NotSymmetry(usize),
    #[error("matrix is not Lorentz-orthogonal")]
    NotLorentz,
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error(transparent)]
    Coxeter(#[from] Box<CoxeterError>),
    #[error("cuboctahedron section has {0} ideal points, expected 12")]
    Section(usize),
}

pub const T2: f64 = FRAC_1_SQRT_2;

pub fn t1() -> f64 {
    0.6f64.sqrt()
}

pub fn tbar() -> f64 {
    (1.0f64 / 3.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `(0, t₂)`
    Low,
    AtT2,
    /// `(t₂, t₁)`
    Middle,
    AtT1,
    /// `(t₁, 1)`
    High,
    AtOne,
}

impl Regime {
    /// Closure of an open regime; `None` for the critical times.
    pub fn span(self) -> Option<(f64, f64)> {
        match self {
            Regime::Low => Some((0.0, T2)),
            Regime::Middle => Some((T2, t1())),
            Regime::High => Some((t1(), 1.0)),
            _ => None,
        }
    }

    /// `ℓG`, `ℓH` are walls only for `t > t₂`.
    pub fn has_gh(self) -> bool {
        !matches!(self, Regime::Low | Regime::AtT2)
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::Low => "(0,t2)",
            Regime::AtT2 => "t2",
            Regime::Middle => "(t2,t1)",
            Regime::AtT1 => "t1",
            Regime::High => "(t1,1)",
            Regime::AtOne => "1",
        }
    }
}

/// A time of the family, optionally carrying an exact rational `t²`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyTime {
    pub t: f64,
    pub t_squared: Option<BigRational>,
    pub regime: Regime,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl FamilyTime {
    pub fn new(t: f64) -> Result<Self, FamilyError> {
        if !(t > 0.0 && t <= 1.0 + eps()) {
            return Err(FamilyError::OutOfRange(t.to_string()));
        }
        let t = t.min(1.0);
        let near = |c: f64| (t - c).abs() < eps();
        let regime = if near(1.0) {
            Regime::AtOne
        } else if near(t1()) {
            Regime::AtT1
        } else if near(T2) {
            Regime::AtT2
        } else if t > t1() {
            Regime::High
        } else if t > T2 {
            Regime::Middle
        } else {
            Regime::Low
        };
        Ok(FamilyTime {
            t,
            t_squared: None,
            regime,
        })
    }

    pub fn exact(t_squared: BigRational) -> Result<Self, FamilyError> {
        if !t_squared.is_positive() || t_squared > BigRational::one() {
            return Err(FamilyError::OutOfRange(format!("sqrt({t_squared})")));
        }
        let cmp = |q: &BigRational| t_squared.cmp(q);
        use std::cmp::Ordering::*;
        let regime = match (
            cmp(&BigRational::one()),
            cmp(&ratio(3, 5)),
            cmp(&ratio(1, 2)),
        ) {
            (Equal, _, _) => Regime::AtOne,
            (_, Equal, _) => Regime::AtT1,
            (_, Greater, _) => Regime::High,
            (_, _, Equal) => Regime::AtT2,
            (_, _, Greater) => Regime::Middle,
            _ => Regime::Low,
        };
        let t = t_squared.to_f64().unwrap_or(f64::NAN).sqrt();
        Ok(FamilyTime {
            t,
            t_squared: Some(t_squared),
            regime,
        })
    }

    pub fn one() -> Self {
        Self::exact(BigRational::one()).expect("valid")
    }

    pub fn t1() -> Self {
        Self::exact(ratio(3, 5)).expect("valid")
    }

    pub fn t2() -> Self {
        Self::exact(ratio(1, 2)).expect("valid")
    }

    pub fn tbar() -> Self {
        Self::exact(ratio(1, 3)).expect("valid")
    }

    /// `t` as a scalar of the backend.
    pub fn scalar<S: Scalar>(&self) -> Result<S, FamilyError> {
        match &self.t_squared {
            Some(q) => Ok(S::sqrt_rational(q)),
            None if !S::EXACT => S::from_f64(self.t).ok_or(FamilyError::NotExact),
            None => Err(FamilyError::NotExact),
        }
    }
}

impl fmt::Display for FamilyTime {
    /// Named times, `sqrt(p/q)` when exact, otherwise the decimal; reparses to the same time.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(q) = &self.t_squared else {
            return write!(f, "{}", self.t);
        };
        match self.regime {
            Regime::AtOne => f.write_str("1"),
            Regime::AtT1 => f.write_str("t1"),
            Regime::AtT2 => f.write_str("t2"),
            _ if *q == ratio(1, 3) => f.write_str("tbar"),
            _ => write!(f, "sqrt({q})"),
        }
    }
}

impl FromStr for FamilyTime {
    type Err = FamilyError;

    /// Accepts `1`, `t1`, `t2`, `tbar`, a decimal, or `sqrt(p/q)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "t1" => return Ok(Self::t1()),
            "t2" => return Ok(Self::t2()),
            "tbar" => return Ok(Self::tbar()),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let q = parse_rational(inner).ok_or_else(|| FamilyError::Parse(s.to_string()))?;
            return Self::exact(q);
        }
        let q = parse_decimal(s).ok_or_else(|| FamilyError::Parse(s.to_string()))?;
        Self::exact(&q * &q)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            let n: BigInt = n.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => parse_decimal(s),
    }
}

/// Exact value of a plain decimal literal such as `0.85`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let den = num::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(num, den);
    Some(if neg { -q } else { q })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WallName {
    Positive(u8),
    Negative(u8),
    /// `A`–`H`.
    Letter(char),
    /// `L`, `M`, `N`.
    Mirror(char),
}

impl fmt::Display for WallName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WallName::Positive(i) => write!(f, "p{i}"),
            WallName::Negative(i) => write!(f, "m{i}"),
            WallName::Letter(c) | WallName::Mirror(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for WallName {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FamilyError::Parse(s.to_string());
        let mut chars = s.chars();
        match (chars.next(), chars.as_str()) {
            (Some('p'), rest) | (Some('m'), rest) if !rest.is_empty() => {
                let i: u8 = rest.parse().map_err(|_| bad())?;
                if i > 7 {
                    return Err(bad());
                }
                Ok(if s.starts_with('p') {
                    WallName::Positive(i)
                } else {
                    WallName::Negative(i)
                })
            }
            (Some(c @ 'A'..='H'), "") => Ok(WallName::Letter(c)),
            (Some(c @ ('L' | 'M' | 'N')), "") => Ok(WallName::Mirror(c)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for WallName {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WallName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Signs of the coordinates `x₁, x₂, x₃` of `p_i` and `m_i`.
const NUMBERED_SIGNS: [[i64; 3]; 8] = [
    [1, 1, 1],
    [1, -1, 1],
    [1, -1, -1],
    [1, 1, -1],
    [-1, 1, -1],
    [-1, 1, 1],
    [-1, -1, 1],
    [-1, -1, -1],
];

fn letter_vector<S: Scalar>(c: char, t: &S) -> Vector<S> {
    let r2 = S::sqrt_int(2);
    let z = S::zero;
    let one = S::one();
    let v = match c {
        'A' => vec![one, r2, z(), z(), z()],
        'B' => vec![one, z(), r2, z(), z()],
        'C' => vec![one, z(), z(), r2, z()],
        'D' => vec![one, z(), z(), r2.neg(), z()],
        'E' => vec![one, z(), r2.neg(), z(), z()],
        'F' => vec![one, r2.neg(), z(), z(), z()],
        'G' => vec![one, z(), z(), z(), r2.mul(t).neg()],
        'H' => vec![one, z(), z(), z(), r2.mul(t)],
        _ => unreachable!("letter wall"),
    };
    Vector(v)
}

fn mirror_vector<S: Scalar>(c: char) -> Vector<S> {
    let (z, o) = (S::zero, S::one);
    match c {
        'L' => Vector(vec![z(), o().neg(), o(), z(), z()]),
        'M' => Vector(vec![z(), z(), o().neg(), o(), z()]),
        'N' => Vector(vec![z(), z(), o().neg(), o().neg(), z()]),
        _ => unreachable!("mirror wall"),
    }
}

/// The printed (unnormalised) vector of a wall at parameter `t`.
pub fn wall_vector<S: Scalar>(name: WallName, t: &S) -> Vector<S> {
    match name {
        WallName::Positive(i) | WallName::Negative(i) => {
            let sg = NUMBERED_SIGNS[i as usize];
            let odd = i % 2 == 1;
            let last = match name {
                WallName::Positive(_) => {
                    let inv = S::one().div(t).expect("t > 0");
                    if odd {
                        inv.neg()
                    } else {
                        inv
                    }
                }
                _ => {
                    if odd {
                        t.clone()
                    } else {
                        t.neg()
                    }
                }
            };
            Vector(vec![
                S::sqrt_int(2),
                S::from_i64(sg[0]),
                S::from_i64(sg[1]),
                S::from_i64(sg[2]),
                last,
            ])
        }
        WallName::Letter(c) => letter_vector(c, t),
        WallName::Mirror(c) => mirror_vector(c),
    }
}

/// `d/dt` of [`wall_vector`].
pub fn wall_vector_derivative(name: WallName, t: f64) -> Vector<f64> {
    let mut d = vec![0.0; 5];
    d[4] = match name {
        WallName::Positive(i) if i % 2 == 0 => -1.0 / (t * t),
        WallName::Positive(_) => 1.0 / (t * t),
        WallName::Negative(i) if i % 2 == 0 => -1.0,
        WallName::Negative(_) => 1.0,
        WallName::Letter('G') => -(2f64.sqrt()),
        WallName::Letter('H') => 2f64.sqrt(),
        _ => 0.0,
    };
    Vector(d)
}

/// Walls of `P_t` in Table 1 order.
pub fn ks_wall_names(with_gh: bool) -> Vec<WallName> {
    let mut out = Vec::with_capacity(24);
    for i in 0..8 {
        out.push(WallName::Positive(i));
        out.push(WallName::Negative(i));
    }
    for c in ['A', 'B', 'C', 'D', 'E', 'F'] {
        out.push(WallName::Letter(c));
    }
    if with_gh {
        out.push(WallName::Letter('G'));
        out.push(WallName::Letter('H'));
    }
    out
}

/// Walls of `Q_t` in the order used for its Gram matrix.
pub fn quotient_wall_names(with_gh: bool) -> Vec<WallName> {
    let mut out = vec![
        WallName::Positive(0),
        WallName::Negative(0),
        WallName::Positive(3),
        WallName::Negative(3),
    ];
    if with_gh {
        out.push(WallName::Letter('G'));
        out.push(WallName::Letter('H'));
    }
    out.push(WallName::Letter('A'));
    out.extend([
        WallName::Mirror('L'),
        WallName::Mirror('M'),
        WallName::Mirror('N'),
    ]);
    out
}

fn named_normals<S: Scalar>(
    names: Vec<WallName>,
    t: &FamilyTime,
) -> Result<Vec<(WallName, SpaceLikeVector<S>)>, FamilyError> {
    let ts = t.scalar::<S>()?;
    names
        .into_iter()
        .map(|n| Ok((n, SpaceLikeVector::new(wall_vector(n, &ts))?)))
        .collect()
}

/// The 24 (or 22 for `t ≤ t₂`) half-spaces of `P_t`.
pub fn ks_normals<S: Scalar>(
    t: &FamilyTime,
) -> Result<Vec<(WallName, SpaceLikeVector<S>)>, FamilyError> {
    named_normals(ks_wall_names(t.regime.has_gh()), t)
}

/// `P_t ∩ L ∩ M ∩ N`: 10 walls for `t > t₂`, 8 otherwise.
pub fn quotient_normals<S: Scalar>(
    t: &FamilyTime,
) -> Result<Vec<(WallName, SpaceLikeVector<S>)>, FamilyError> {
    named_normals(quotient_wall_names(t.regime.has_gh()), t)
}

/// The 22 half-spaces without `ℓG`, `ℓH`, at any `t`.
pub fn kerckhoff_storm_normals<S: Scalar>(
    t: &FamilyTime,
) -> Result<Vec<(WallName, SpaceLikeVector<S>)>, FamilyError> {
    named_normals(ks_wall_names(false), t)
}

pub fn polytope_from<S: Scalar>(walls: Vec<(WallName, SpaceLikeVector<S>)>) -> Polytope<S> {
    let (names, normals): (Vec<_>, Vec<_>) =
        walls.into_iter().map(|(n, v)| (n.to_string(), v)).unzip();
    Polytope::new(names, normals)
}

pub fn p_polytope<S: Scalar>(t: &FamilyTime) -> Result<Polytope<S>, FamilyError> {
    Ok(polytope_from(ks_normals(t)?))
}

pub fn q_polytope<S: Scalar>(t: &FamilyTime) -> Result<Polytope<S>, FamilyError> {
    Ok(polytope_from(quotient_normals(t)?))
}

/// Which polytope of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresetKind {
    P,
    Q,
}

/// A named polytope such as `P@t1`, `Q@tbar` or `P@t=0.9`.
#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub kind: PresetKind,
    pub time: FamilyTime,
    name: String,
}

impl Preset {
    pub fn new(kind: PresetKind, time: FamilyTime) -> Self {
        let letter = match kind {
            PresetKind::P => "P",
            PresetKind::Q => "Q",
        };
        Preset {
            name: format!("{letter}@{time}"),
            kind,
            time,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn polytope<S: Scalar>(&self) -> Result<Polytope<S>, FamilyError> {
        match self.kind {
            PresetKind::P => p_polytope(&self.time),
            PresetKind::Q => q_polytope(&self.time),
        }
    }
}

impl FromStr for Preset {
    type Err = FamilyError;

    /// `P@1`, `P@t1`, `Q@tbar`, `P@t=0.9`, `P@sqrt(2/5)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FamilyError::Parse(s.to_string());
        let (kind, time) = s.trim().split_once('@').ok_or_else(bad)?;
        let kind = match kind {
            "P" => PresetKind::P,
            "Q" => PresetKind::Q,
            _ => return Err(bad()),
        };
        let time = time.strip_prefix("t=").unwrap_or(time);
        let mut p = Preset::new(kind, time.parse()?);
        p.name = s.trim().to_string();
        Ok(p)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for Preset {
    fn serialize<Se: Serializer>(&self, s: Se) -> Result<Se::Ok, Se::Error> {
        s.serialize_str(&self.name)
    }
}

impl<'de> Deserialize<'de> for Preset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Raw binary64 normals at any `t > 0`, used for derivatives in `t`.
pub fn raw_normals(names: &[WallName], t: f64) -> Vec<Vector<f64>> {
    names.iter().map(|&n| wall_vector(n, &t)).collect()
}

fn check_domain(func: &'static str, t: f64, lo: f64, hi: f64) -> Result<(), FamilyError> {
    if t >= lo - eps() && t <= hi + eps() && t > 0.0 {
        Ok(())
    } else {
        Err(FamilyError::Domain { func, t })
    }
}

fn acos_clamped(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).acos()
}

/// `cos θ = (3t²−1)/(1+t²)` on `(0, 1]`.
pub fn angle_theta(t: f64) -> Result<f64, FamilyError> {
    check_domain("theta", t, 0.0, 1.0)?;
    Ok(theta_of_square(t * t))
}

/// `θ` from `s = t²`; sin θ = 2√(2s(1−s))/(1+s).
pub fn theta_of_square(s: f64) -> f64 {
    (2.0 * (2.0 * s * (1.0 - s)).max(0.0).sqrt()).atan2(3.0 * s - 1.0)
}

/// `cos φ = √2(1−t²)/√((2t²−1)(t²+1))` on `[t₁, 1]`.
pub fn angle_phi(t: f64) -> Result<f64, FamilyError> {
    check_domain("phi", t, t1(), 1.0)?;
    Ok(phi_of_square(t * t))
}

/// `φ` from `s = t²`; tan φ = √(5s−3)/(√2(1−s)). Exact `s = 3/5` gives 0,
/// whereas the binary64 `t₁` lies a rounding error above it.
pub fn phi_of_square(s: f64) -> f64 {
    (5.0 * s - 3.0)
        .max(0.0)
        .sqrt()
        .atan2(2f64.sqrt() * (1.0 - s))
}

/// `cos ψ = (1−3t²)/(2(t²−1))` on `(0, t₁]`.
pub fn angle_psi(t: f64) -> Result<f64, FamilyError> {
    check_domain("psi", t, 0.0, t1())?;
    let s = t * t;
    Ok(acos_clamped((1.0 - 3.0 * s) / (2.0 * (s - 1.0))))
}

/// `cos η = (3t²−1)/(3−5t²)` on `(0, t₂]`.
pub fn angle_eta(t: f64) -> Result<f64, FamilyError> {
    check_domain("eta", t, 0.0, T2)?;
    Ok(eta_of_square(t * t))
}

/// `η` from `s = t²`; sin η = 2√(2(1−2s)(1−s))/(3−5s).
pub fn eta_of_square(s: f64) -> f64 {
    (2.0 * (2.0 * (1.0 - 2.0 * s) * (1.0 - s)).max(0.0).sqrt()).atan2(3.0 * s - 1.0)
}

/// `η` as a function of `θ ∈ [arccos(1/3), π]`.
pub fn eta_of_theta(theta: f64) -> f64 {
    let c = theta.cos();
    acos_clamped(c / (1.0 - 2.0 * c))
}

/// A Lorentz transformation of `R^{1,4}`, stored as a dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IsometryMatrix {
    pub m: Vec<Vec<f64>>,
}

impl IsometryMatrix {
    pub fn identity(n: usize) -> Self {
        let m = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        IsometryMatrix { m }
    }

    /// `y_k = sign_k · x_{src_k}`.
    pub fn signed_permutation(map: &[(usize, i8)]) -> Self {
        let n = map.len();
        let mut m = vec![vec![0.0; n]; n];
        for (k, &(src, sg)) in map.iter().enumerate() {
            m[k][src] = sg as f64;
        }
        IsometryMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Entries are converted to the backend; integers are exact.
    pub fn apply<S: Scalar>(&self, v: &Vector<S>) -> Option<Vector<S>> {
        let mut out = Vec::with_capacity(self.dim());
        for row in &self.m {
            let mut acc = S::zero();
            for (a, x) in row.iter().zip(&v.0) {
                if *a == 0.0 {
                    continue;
                }
                acc = acc.add(&S::from_f64(*a)?.mul(x));
            }
            out.push(acc);
        }
        Some(Vector(out))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.dim();
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.m[i][k] * other.m[k][j]).sum())
                    .collect()
            })
            .collect();
        IsometryMatrix { m }
    }

    /// `J Qᵀ J`.
    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let sg = |i: usize| if i == 0 { -1.0 } else { 1.0 };
        let m = (0..n)
            .map(|i| (0..n).map(|j| sg(i) * self.m[j][i] * sg(j)).collect())
            .collect();
        IsometryMatrix { m }
    }

    pub fn is_lorentz(&self) -> bool {
        let prod = self.inverse().compose(self);
        let id = Self::identity(self.dim());
        prod.m
            .iter()
            .flatten()
            .zip(id.m.iter().flatten())
            .all(|(a, b)| (a - b).abs() < 1e-9)
    }

    pub fn determinant(&self) -> f64 {
        let mut a = self.m.clone();
        let n = a.len();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
                .unwrap_or(c);
            if a[p][c].abs() < 1e-14 {
                return 0.0;
            }
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= a[c][c];
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
        det
    }

    /// `+1` preserves the orientation of `H⁴`, `−1` reverses it.
    pub fn orientation(&self) -> i8 {
        let s = self.determinant() * self.m[0][0].signum();
        if s > 0.0 {
            1
        } else {
            -1
        }
    }

    fn key(&self) -> Vec<i64> {
        self.m
            .iter()
            .flatten()
            .map(|x| (x * 1e6).round() as i64)
            .collect()
    }
}

/// Reflections in `ℓL`, `ℓM`, `ℓN` and the roll symmetry `R`.
pub struct SymmetryGenerators {
    pub l: IsometryMatrix,
    pub m: IsometryMatrix,
    pub n: IsometryMatrix,
    pub r: IsometryMatrix,
}

pub fn symmetry_generators() -> SymmetryGenerators {
    use IsometryMatrix as I;
    SymmetryGenerators {
        l: I::signed_permutation(&[(0, 1), (2, 1), (1, 1), (3, 1), (4, 1)]),
        m: I::signed_permutation(&[(0, 1), (1, 1), (3, 1), (2, 1), (4, 1)]),
        n: I::signed_permutation(&[(0, 1), (1, 1), (3, -1), (2, -1), (4, 1)]),
        r: I::signed_permutation(&[(0, 1), (1, 1), (2, 1), (3, -1), (4, -1)]),
    }
}

/// The wall-pairing isometries for `p1`, `p3`, `p5`, `p7`.
pub fn pairing_isometries() -> [(WallName, IsometryMatrix); 4] {
    use IsometryMatrix as I;
    [
        (
            WallName::Positive(1),
            I::signed_permutation(&[(0, 1), (3, 1), (1, 1), (2, -1), (4, -1)]),
        ),
        (
            WallName::Positive(3),
            I::signed_permutation(&[(0, 1), (2, 1), (3, 1), (1, -1), (4, -1)]),
        ),
        (
            WallName::Positive(5),
            I::signed_permutation(&[(0, 1), (3, -1), (1, 1), (2, 1), (4, -1)]),
        ),
        (
            WallName::Positive(7),
            I::signed_permutation(&[(0, 1), (2, 1), (3, -1), (1, 1), (4, -1)]),
        ),
    ]
}

/// `x ↦ (x₀, −x₁, −x₂, −x₃, −x₄)`.
pub fn central_involution() -> IsometryMatrix {
    IsometryMatrix::signed_permutation(&[(0, 1), (1, -1), (2, -1), (3, -1), (4, -1)])
}

/// All products of the generators.
pub fn group_closure(gens: &[IsometryMatrix]) -> Vec<IsometryMatrix> {
    let Some(first) = gens.first() else {
        return vec![];
    };
    let id = IsometryMatrix::identity(first.dim());
    let mut seen: HashSet<Vec<i64>> = HashSet::from([id.key()]);
    let mut out = vec![id.clone()];
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for s in gens {
            let h = s.compose(&g);
            if seen.insert(h.key()) {
                out.push(h.clone());
                frontier.push(h);
            }
        }
    }
    out
}

/// `u = λw` with `λ > 0`.
fn positively_proportional<S: Scalar>(u: &Vector<S>, w: &Vector<S>) -> bool {
    let wf = w.to_f64();
    let Some((k, _)) =
        wf.0.iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    else {
        return false;
    };
    let Some(lambda) = u.0[k].div(&w.0[k]) else {
        return false;
    };
    lambda.signum() > 0
        && u.0
            .iter()
            .zip(&w.0)
            .all(|(a, b)| a.sub(&b.mul(&lambda)).is_zero())
}

/// The permutation `σ` with `iso(vᵢ) ∝ v_{σ(i)}`.
pub fn verify_symmetry<S: Scalar>(
    iso: &IsometryMatrix,
    normals: &[Vector<S>],
) -> Result<Vec<usize>, FamilyError> {
    if !iso.is_lorentz() {
        return Err(FamilyError::NotLorentz);
    }
    normals
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let img = iso.apply(v).ok_or(FamilyError::NotExact)?;
            normals
                .iter()
                .position(|w| positively_proportional(&img, w))
                .ok_or(FamilyError::NotSymmetry(i))
        })
        .collect()
}

/// Symmetry check against `P_t` with named walls.
pub fn wall_permutation(
    iso: &IsometryMatrix,
    t: &FamilyTime,
) -> Result<BTreeMap<WallName, WallName>, FamilyError> {
    let walls = ks_normals::<f64>(t)?;
    let vs: Vec<_> = walls.iter().map(|(_, v)| v.vector().clone()).collect();
    let perm = verify_symmetry(iso, &vs)?;
    Ok(perm
        .iter()
        .enumerate()
        .map(|(i, &j)| (walls[i].0, walls[j].0))
        .collect())
}

/// Relation between a wall and the hyperplane `H³ = {x₄ = 0}`, with `H³`
/// cooriented so that the angle is at most `π/2`.
pub fn wall_angle_to_h3(wall: WallName, t: &FamilyTime) -> Result<PairRelation, FamilyError> {
    let v = wall_vector(wall, &t.t);
    let side = if v.0[4] > 0.0 { -1.0 } else { 1.0 };
    let v = SpaceLikeVector::new(v)?;
    let h = SpaceLikeVector::new(Vector(vec![0.0, 0.0, 0.0, 0.0, side]))?;
    Ok(pair_relation(&v, &h))
}

/// The 12 ideal vertices of `P_t` on `∂H³`, in Klein coordinates, sorted.
pub fn cuboctahedron_section(t: &FamilyTime) -> Result<Vec<[f64; 5]>, FamilyError> {
    let p = p_polytope::<f64>(&FamilyTime::new(t.t)?)?;
    let s = enumerate_strata(&p, StrataMode::Geometric).map_err(Box::new)?;
    let mut pts: Vec<[f64; 5]> = s
        .vertices
        .iter()
        .filter(|v| v.kind == crate::lorentz::PointKind::Ideal)
        .filter_map(|v| v.point.as_ref())
        .filter(|x| x[4].abs() < 1e-7)
        .map(|x| {
            let mut a = [0.0; 5];
            for (k, c) in a.iter_mut().enumerate() {
                let r = x[k] / x[0];
                *c = if r.abs() < 1e-12 { 0.0 } else { r };
            }
            a
        })
        .collect();
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    if pts.len() != 12 {
        return Err(FamilyError::Section(pts.len()));
    }
    Ok(pts)
}

/// `⟨m0, ℓG⟩` in closed form, used as a symbolic check.
pub fn m0_g_product(t: f64) -> f64 {
    -(2f64.sqrt()) * (1.0 - t * t)
}

/// Checks `⟨u,v⟩` of two walls at `t`.
pub fn wall_product(a: WallName, b: WallName, t: f64) -> f64 {
    minkowski_product(&wall_vector(a, &t), &wall_vector(b, &t)).expect("same dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::MultiQuad;
    use std::f64::consts::PI;

    fn w(s: &str) -> WallName {
        s.parse().unwrap()
    }

    #[test]
    fn time_display_reparses() {
        for s in ["1", "t1", "t2", "tbar", "sqrt(2/7)", "0.9"] {
            let t: FamilyTime = s.parse().unwrap();
            let back: FamilyTime = t.to_string().parse().unwrap();
            assert_eq!(back, t, "{s}");
        }
        assert_eq!(FamilyTime::t1().to_string(), "t1");
        assert_eq!(Preset::new(PresetKind::Q, FamilyTime::tbar()).to_string(), "Q@tbar");
    }

    #[test]
    fn table_entries() {
        let v = wall_vector(w("p0"), &1.0);
        assert_eq!(v.0, vec![2f64.sqrt(), 1.0, 1.0, 1.0, 1.0]);
        let g = wall_vector(w("G"), &1.0);
        assert_eq!(g.0, vec![1.0, 0.0, 0.0, 0.0, -(2f64.sqrt())]);
        let p7 = wall_vector(w("p7"), &0.5);
        assert_eq!(p7.0[1..].to_vec(), vec![-1.0, -1.0, -1.0, -2.0]);
        let m5 = wall_vector(w("m5"), &0.5);
        assert_eq!(m5.0[1..].to_vec(), vec![-1.0, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn derivative_matches_difference() {
        let h = 1e-6;
        for n in ks_wall_names(true) {
            for t in [0.3, 0.8] {
                let d = wall_vector_derivative(n, t);
                let (a, b) = (wall_vector(n, &(t + h)), wall_vector(n, &(t - h)));
                for k in 0..5 {
                    assert!((d.0[k] - (a.0[k] - b.0[k]) / (2.0 * h)).abs() < 1e-6, "{n}");
                }
            }
        }
    }

    #[test]
    fn m0_g_symbolic() {
        let t = 0.9;
        assert!((wall_product(w("m0"), w("G"), t) - m0_g_product(t)).abs() < 1e-14);
    }

    #[test]
    fn counts_by_regime() {
        assert_eq!(
            ks_normals::<f64>(&FamilyTime::new(0.9).unwrap())
                .unwrap()
                .len(),
            24
        );
        assert_eq!(ks_normals::<f64>(&FamilyTime::t2()).unwrap().len(), 22);
        assert_eq!(
            quotient_normals::<f64>(&FamilyTime::new(0.9).unwrap())
                .unwrap()
                .len(),
            10
        );
        assert_eq!(
            quotient_normals::<f64>(&FamilyTime::new(0.6).unwrap())
                .unwrap()
                .len(),
            8
        );
        assert!(FamilyTime::new(1.2).is_err());
        assert!(FamilyTime::new(0.0).is_err());
    }

    #[test]
    fn exact_normals_at_t1() {
        let ws = ks_normals::<MultiQuad>(&FamilyTime::t1()).unwrap();
        let (_, p0) = &ws[0];
        // ⟨p0,p0⟩ = 1 + 1/t² = 8/3
        assert_eq!(p0.vector().norm2(), "8/3".parse::<MultiQuad>().unwrap());
    }

    #[test]
    fn parse_times() {
        let t: FamilyTime = "sqrt(3/5)".parse().unwrap();
        assert_eq!(t.regime, Regime::AtT1);
        let t: FamilyTime = "0.9".parse().unwrap();
        assert_eq!(t.t_squared, Some(ratio(81, 100)));
        assert_eq!(t.regime, Regime::High);
        assert_eq!("tbar".parse::<FamilyTime>().unwrap().regime, Regime::Low);
        assert!("abc".parse::<FamilyTime>().is_err());
        assert_eq!(FamilyTime::new(0.75).unwrap().regime, Regime::Middle);
    }

    #[test]
    fn wall_names_round_trip() {
        for n in ks_wall_names(true)
            .into_iter()
            .chain(quotient_wall_names(true))
        {
            assert_eq!(n.to_string().parse::<WallName>().unwrap(), n);
        }
        assert!("p8".parse::<WallName>().is_err());
    }

    #[test]
    fn angle_values() {
        assert!((angle_theta(t1()).unwrap() - PI / 3.0).abs() < 1e-12);
        assert!((angle_theta(tbar()).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((angle_phi(1.0).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!(angle_phi(0.7).is_err());
        assert!(angle_psi(0.9).is_err());
        assert!(angle_eta(0.75).is_err());
        assert!((angle_theta(T2).unwrap().cos() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn eta_in_theta_agrees() {
        for &t in &[0.1, 0.3, 0.5, 0.7] {
            let th = angle_theta(t).unwrap();
            assert!((eta_of_theta(th) - angle_eta(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn group_orders() {
        let g = symmetry_generators();
        assert_eq!(
            group_closure(&[g.l.clone(), g.m.clone(), g.n.clone()]).len(),
            24
        );
        assert_eq!(group_closure(&[g.l, g.m, g.n, g.r]).len(), 48);
    }

    #[test]
    fn roll_on_quotient() {
        let t = FamilyTime::new(0.9).unwrap();
        let ws = quotient_normals::<f64>(&t).unwrap();
        let vs: Vec<_> = ws.iter().map(|(_, v)| v.vector().clone()).collect();
        let perm = verify_symmetry(&symmetry_generators().r, &vs).unwrap();
        let name = |i: usize| ws[i].0.to_string();
        let image = |s: &str| name(perm[ws.iter().position(|(n, _)| n.to_string() == s).unwrap()]);
        assert_eq!(image("L"), "L");
        assert_eq!(image("A"), "A");
        assert_eq!(image("p0"), "p3");
        assert_eq!(image("M"), "N");
        assert_eq!(image("G"), "H");
    }

    #[test]
    fn pairings() {
        let t = FamilyTime::new(0.9).unwrap();
        let [(_, s1), (_, s3), (_, s5), (_, s7)] = pairing_isometries();
        let p = wall_permutation(&s1, &t).unwrap();
        assert_eq!(p[&w("p1")], w("p0"));
        assert_eq!(p[&w("p3")], w("p4"));
        assert_eq!(p[&w("p7")], w("p6"));
        assert_eq!(p[&w("p5")], w("p2"));
        assert_eq!(s7.compose(&s1), IsometryMatrix::identity(5));
        assert_eq!(s5.compose(&s3), IsometryMatrix::identity(5));
        for s in [&s1, &s3, &s5, &s7] {
            assert_eq!(s.orientation(), 1);
        }
        let r = central_involution();
        let pr = wall_permutation(&r, &t).unwrap();
        assert_eq!(pr[&w("p1")], w("p4"));
        assert_eq!(pr[&w("p3")], w("p6"));
        assert_eq!(pr[&w("p5")], w("p2"));
        assert_eq!(pr[&w("p7")], w("p0"));
        assert_eq!(s7.compose(&r).compose(&s1), r);
        assert_eq!(s1.compose(&r).compose(&s7), r);
    }

    #[test]
    fn identity_is_trivial_permutation() {
        let t = FamilyTime::new(0.8).unwrap();
        let vs: Vec<_> = ks_normals::<f64>(&t)
            .unwrap()
            .into_iter()
            .map(|(_, v)| v.into_vector())
            .collect();
        let perm = verify_symmetry(&IsometryMatrix::identity(5), &vs).unwrap();
        assert_eq!(perm, (0..24).collect::<Vec<_>>());
        let bogus = IsometryMatrix::signed_permutation(&[(0, 1), (1, -1), (2, 1), (3, 1), (4, 1)]);
        assert!(verify_symmetry(&bogus, &vs).is_err());
    }

    #[test]
    fn exact_symmetry_check() {
        let t = FamilyTime::tbar();
        let vs: Vec<_> = ks_normals::<MultiQuad>(&t)
            .unwrap()
            .into_iter()
            .map(|(_, v)| v.into_vector())
            .collect();
        for (_, s) in pairing_isometries() {
            verify_symmetry(&s, &vs).unwrap();
        }
    }

    #[test]
    fn h3_angles() {
        let t = FamilyTime::new(0.6).unwrap();
        assert!((wall_angle_to_h3(w("A"), &t).unwrap().angle().unwrap() - PI / 2.0).abs() < 1e-12);
        let one = FamilyTime::one();
        assert!(
            (wall_angle_to_h3(w("p2"), &one).unwrap().angle().unwrap() - PI / 4.0).abs() < 1e-12
        );
        let small = FamilyTime::new(1e-4).unwrap();
        assert!(
            (wall_angle_to_h3(w("m3"), &small).unwrap().angle().unwrap() - PI / 2.0).abs() < 1e-3
        );
    }

    #[test]
    fn presets() {
        let p: Preset = "P@t1".parse().unwrap();
        assert_eq!(p.kind, PresetKind::P);
        assert_eq!(p.time, FamilyTime::t1());
        assert_eq!(p.polytope::<f64>().unwrap().len(), 24);
        let q: Preset = "Q@tbar".parse().unwrap();
        assert_eq!(q.polytope::<f64>().unwrap().len(), 8);
        let d: Preset = "P@t=0.65".parse().unwrap();
        assert_eq!(d.polytope::<f64>().unwrap().len(), 22);
        assert_eq!(serde_json::to_string(&d).unwrap(), "\"P@t=0.65\"");
        assert!("R@1".parse::<Preset>().is_err());
        assert!("P1".parse::<Preset>().is_err());
        assert!("P@2".parse::<Preset>().is_err());
    }
}
