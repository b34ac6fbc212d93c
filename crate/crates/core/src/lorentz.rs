//! Minkowski space `R^{1,n}`: products, causal type, pair relations,
//! projections and vertex solving.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{eps, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LorentzError {
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("vector is not space-like (self-product sign {0})")]
    NotSpaceLike(i8),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vector<S>(pub Vec<S>);

impl<S: Scalar> Vector<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Vector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn scale(&self, c: &S) -> Self {
        Vector(self.0.iter().map(|x| x.mul(c)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        Vector(self.0.iter().zip(&o.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Vector(self.0.iter().zip(&o.0).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn to_f64(&self) -> Vector<f64> {
        Vector(self.0.iter().map(|x| x.to_f64()).collect())
    }

    /// `⟨v, v⟩`.
    pub fn norm2(&self) -> S {
        lorentz(self, self)
    }

    /// `v / √⟨v,v⟩`, when the root exists in the backend.
    pub fn unit(&self) -> Option<Self> {
        let r = self.norm2().sqrt()?;
        let inv = S::one().div(&r)?;
        Some(self.scale(&inv))
    }
}

impl Vector<f64> {
    pub fn euclid_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn lorentz<S: Scalar>(u: &Vector<S>, v: &Vector<S>) -> S {
    let mut acc = u.0[0].mul(&v.0[0]).neg();
    for (a, b) in u.0.iter().zip(&v.0).skip(1) {
        acc = acc.add(&a.mul(b));
    }
    acc
}

/// `⟨u,v⟩ = −u₀v₀ + Σ uᵢvᵢ`.
pub fn minkowski_product<S: Scalar>(u: &Vector<S>, v: &Vector<S>) -> Result<S, LorentzError> {
    if u.dim() != v.dim() {
        return Err(LorentzError::Dimension(u.dim(), v.dim()));
    }
    Ok(lorentz(u, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Causal {
    Space,
    Time,
    Light,
}

/// Sign of `⟨v,v⟩`; in binary64 the cutoff is relative to `|v|²`.
pub fn classify_vector<S: Scalar>(v: &Vector<S>) -> Causal {
    match rel_sign(&v.norm2(), || v.to_f64().euclid_norm().powi(2)) {
        1 => Causal::Space,
        -1 => Causal::Time,
        _ => Causal::Light,
    }
}

/// Exact sign, or the sign of `x / scale` with tolerance `eps()`.
fn rel_sign<S: Scalar>(x: &S, scale: impl FnOnce() -> f64) -> i8 {
    if S::EXACT {
        return x.signum();
    }
    let s = scale().max(f64::MIN_POSITIVE);
    let r = x.to_f64() / s;
    if r.abs() < eps() {
        0
    } else if r > 0.0 {
        1
    } else {
        -1
    }
}

/// A half-space normal; `⟨v,v⟩ > 0` is checked on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceLikeVector<S>(Vector<S>);

impl<S: Scalar> SpaceLikeVector<S> {
    pub fn new(v: Vector<S>) -> Result<Self, LorentzError> {
        match classify_vector(&v) {
            Causal::Space => Ok(SpaceLikeVector(v)),
            Causal::Light => Err(LorentzError::NotSpaceLike(0)),
            Causal::Time => Err(LorentzError::NotSpaceLike(-1)),
        }
    }

    pub fn vector(&self) -> &Vector<S> {
        &self.0
    }

    pub fn into_vector(self) -> Vector<S> {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum PairKind {
    /// Dihedral angle in `(0, π)`.
    Angle(f64),
    Parallel,
    /// Distance between the hyperplanes.
    Ultraparallel(f64),
    Disjoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRelation {
    pub kind: PairKind,
    pub alpha: f64,
}

impl PairRelation {
    pub fn angle(&self) -> Option<f64> {
        match self.kind {
            PairKind::Angle(a) => Some(a),
            _ => None,
        }
    }
}

/// `α = −⟨v,w⟩ / √(⟨v,v⟩⟨w,w⟩)` and its classification.
///
/// The exact backend compares `⟨v,w⟩²` with `⟨v,v⟩⟨w,w⟩` symbolically.
pub fn pair_relation<S: Scalar>(v: &SpaceLikeVector<S>, w: &SpaceLikeVector<S>) -> PairRelation {
    let (v, w) = (&v.0, &w.0);
    let ip = lorentz(v, w);
    let nn = v.norm2().mul(&w.norm2());
    let alpha = -ip.to_f64() / nn.to_f64().sqrt();
    // c = sign(α² − 1), s = sign(α)
    let (c, s) = if S::EXACT {
        (ip.mul(&ip).sub(&nn).signum(), ip.neg().signum())
    } else {
        let c = if (alpha.abs() - 1.0).abs() < eps() {
            0
        } else if alpha.abs() > 1.0 {
            1
        } else {
            -1
        };
        (c, if alpha > 0.0 { 1 } else { -1 })
    };
    let kind = match (c, s) {
        (-1, _) => PairKind::Angle(alpha.clamp(-1.0, 1.0).acos()),
        (0, 1) => PairKind::Parallel,
        (1, 1) => PairKind::Ultraparallel(alpha.max(1.0).acosh()),
        _ => PairKind::Disjoint,
    };
    PairRelation { kind, alpha }
}

/// `v − (⟨v,W⟩/⟨W,W⟩)·W`.
pub fn project_to_wall<S: Scalar>(v: &Vector<S>, wall: &SpaceLikeVector<S>) -> Vector<S> {
    let w = &wall.0;
    let c = lorentz(v, w)
        .div(&w.norm2())
        .expect("space-like wall has nonzero norm");
    v.sub(&w.scale(&c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Finite,
    Ideal,
}

/// A point of `H^n` (hyperboloid, `x₀ > 0`) or an ideal ray scaled to `x₀ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzPoint {
    pub coords: Vector<f64>,
    pub kind: PointKind,
}

impl LorentzPoint {
    /// Projective representative with `x₀ = 1`.
    pub fn klein(&self) -> Vector<f64> {
        let x0 = self.coords.0[0];
        self.coords.scale(&(1.0 / x0))
    }

    /// Classifies the future-pointing ray through `x`; `None` if space-like.
    pub fn from_ray(x: &Vector<f64>) -> Option<Self> {
        let mut x = x.clone();
        if x.0[0] < 0.0 {
            x = x.scale(&-1.0);
        }
        if x.0[0] <= 0.0 {
            return None;
        }
        let k = x.scale(&(1.0 / x.0[0]));
        let q = k.norm2();
        // In the Klein chart ⟨k,k⟩ = |k̄|² − 1 ∈ [−1, 0] inside the ball.
        if q.abs() < eps() {
            Some(LorentzPoint {
                coords: k,
                kind: PointKind::Ideal,
            })
        } else if q < 0.0 {
            let s = 1.0 / (-q).sqrt();
            Some(LorentzPoint {
                coords: k.scale(&s),
                kind: PointKind::Finite,
            })
        } else {
            None
        }
    }
}

/// Orthonormal-free null space of the Lorentz functionals `x ↦ ⟨vᵢ,x⟩`.
pub fn lorentz_nullspace(rows: &[Vector<f64>]) -> Vec<Vector<f64>> {
    let n = rows.first().map_or(0, |r| r.dim());
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut row = r.0.clone();
            row[0] = -row[0];
            let s = r.euclid_norm().max(f64::MIN_POSITIVE);
            row.iter_mut().for_each(|x| *x /= s);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == a.len() {
            break;
        }
        let (p, best) = (r..a.len())
            .map(|i| (i, a[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best < 1e-11 {
            continue;
        }
        a.swap(r, p);
        let piv = a[r][c];
        a[r].iter_mut().for_each(|x| *x /= piv);
        for i in 0..a.len() {
            if i != r {
                let f = a[i][c];
                if f != 0.0 {
                    for k in 0..n {
                        a[i][k] -= f * a[r][k];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0.0; n];
            x[f] = 1.0;
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = -a[row][f];
            }
            let v = Vector(x);
            let s = v.euclid_norm();
            v.scale(&(1.0 / s))
        })
        .collect()
}

/// The point where `n` hyperplanes of `H^n` meet, if the common orthogonal
/// complement is a single causal line.
pub fn solve_vertex(normals: &[Vector<f64>]) -> Option<LorentzPoint> {
    let ns = lorentz_nullspace(normals);
    if ns.len() != 1 {
        return None;
    }
    LorentzPoint::from_ray(&ns[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inside,
    Boundary,
    Outside,
}

/// Position of `x` relative to the half-space `{⟨v,·⟩ ≤ 0}`.
pub fn point_side<S: Scalar>(x: &Vector<S>, v: &Vector<S>) -> Side {
    let ip = lorentz(v, x);
    match rel_sign(&ip, || v.to_f64().euclid_norm() * x.to_f64().euclid_norm()) {
        -1 => Side::Inside,
        0 => Side::Boundary,
        _ => Side::Outside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::MultiQuad;
    use std::f64::consts::PI;

    fn v(xs: &[f64]) -> Vector<f64> {
        Vector(xs.to_vec())
    }

    fn sl(xs: &[f64]) -> SpaceLikeVector<f64> {
        SpaceLikeVector::new(v(xs)).unwrap()
    }

    const R2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn products() {
        let l = v(&[0.0, -1.0, 1.0, 0.0, 0.0]);
        assert_eq!(minkowski_product(&l, &l).unwrap(), 2.0);
        let a = v(&[1.0, R2, 0.0, 0.0, 0.0]);
        let m = v(&[0.0, 0.0, -R2 / 2.0, R2 / 2.0, 0.0]);
        assert_eq!(minkowski_product(&a, &m).unwrap(), 0.0);
        assert!(minkowski_product(&a, &v(&[1.0])).is_err());
    }

    #[test]
    fn causal_types() {
        assert_eq!(
            classify_vector(&v(&[1.0, 0.0, 0.0, 0.0, 0.5])),
            Causal::Time
        );
        assert_eq!(
            classify_vector(&v(&[1.0, 0.0, 0.0, 0.0, 1.0])),
            Causal::Light
        );
        assert_eq!(
            classify_vector(&v(&[1.0, 0.0, 0.0, 0.0, 2.0])),
            Causal::Space
        );
        assert!(SpaceLikeVector::new(v(&[1.0, 0.0, 0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn pair_classes() {
        let l = sl(&[0.0, -1.0, 1.0, 0.0, 0.0]);
        let m = sl(&[0.0, 0.0, -1.0, 1.0, 0.0]);
        let r = pair_relation(&l, &m);
        assert!((r.angle().unwrap() - PI / 3.0).abs() < 1e-12);
        let a = sl(&[1.0, R2, 0.0, 0.0, 0.0]);
        let f = sl(&[1.0, -R2, 0.0, 0.0, 0.0]);
        // ⟨A,F⟩ = −1 − 2 = −3, α = 3: ultraparallel at distance acosh 3.
        match pair_relation(&a, &f).kind {
            PairKind::Ultraparallel(d) => assert!((d - 3f64.acosh()).abs() < 1e-12),
            k => panic!("{k:?}"),
        }
        // Same half-space: α = −1.
        assert_eq!(pair_relation(&a, &a).kind, PairKind::Disjoint);
        let minus_a = sl(&[-1.0, -R2, 0.0, 0.0, 0.0]);
        assert_eq!(pair_relation(&a, &minus_a).kind, PairKind::Parallel);
    }

    #[test]
    fn exact_parallel() {
        let mq = |s: &str| s.parse::<MultiQuad>().unwrap();
        let g = SpaceLikeVector::new(Vector(vec![
            mq("1"),
            mq("0"),
            mq("0"),
            mq("0"),
            mq("-sqrt(2)"),
        ]))
        .unwrap();
        let a = SpaceLikeVector::new(Vector(vec![
            mq("1"),
            mq("sqrt(2)"),
            mq("0"),
            mq("0"),
            mq("0"),
        ]))
        .unwrap();
        assert_eq!(pair_relation(&g, &a).kind, PairKind::Parallel);
    }

    #[test]
    fn projection() {
        let w = sl(&[0.0, 1.0, 0.0, 0.0, 0.0]);
        let x = v(&[1.0, 0.0, 2.0, 0.0, 0.0]);
        assert_eq!(project_to_wall(&x, &w), x);
        let y = v(&[1.0, 3.0, 2.0, 0.0, 0.0]);
        let p = project_to_wall(&y, &w);
        assert!(minkowski_product(&p, w.vector()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn right_angled_corner() {
        let rows: Vec<_> = (1..5)
            .map(|i| {
                let mut x = vec![0.0; 5];
                x[i] = 1.0;
                Vector(x)
            })
            .collect();
        let p = solve_vertex(&rows).unwrap();
        assert_eq!(p.kind, PointKind::Finite);
        assert!((p.coords.0[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sides() {
        let o = v(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let a = v(&[1.0, R2, 0.0, 0.0, 0.0]);
        assert_eq!(point_side(&o, &a), Side::Inside);
        let on = v(&[R2, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(point_side(&on, &a), Side::Boundary);
        assert_eq!(
            point_side(&v(&[1.0, 0.9, 0.0, 0.0, 0.0]), &a),
            Side::Outside
        );
    }
}
