//! Areas, volumes and Euler characteristics: polygon areas, the Schläfli
//! flow along the family, closed forms, the Poincaré sum and Gauss–Bonnet.

use std::f64::consts::PI;

use num::rational::Rational64;
use num::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{
    build_diagram, enumerate_strata, gram_matrix, subset_group_order, CoxeterError, Polytope,
    StrataComplex, StrataMode,
};
use crate::family::{
    angle_phi, angle_theta, eta_of_theta, ks_wall_names, raw_normals, t1, wall_vector_derivative,
    FamilyError, FamilyTime, Regime, WallName, T2,
};
use crate::lorentz::{minkowski_product, PointKind, Vector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VolumeError {
    #[error("polygon needs at least 3 corners, got {0}")]
    Corners(usize),
    #[error("angle {0} outside [0, pi)")]
    Angle(f64),
    #[error("non-positive area {0}")]
    Area(f64),
    #[error("t = {0} outside the regime {1}")]
    RegimeCrossing(f64, &'static str),
    #[error("combinatorics change inside regime {0}")]
    Combinatorics(&'static str),
    #[error("unsupported vertex link on walls {0}")]
    UnsupportedLink(String),
    #[error("stratum on walls {0} is not simple")]
    NotSimple(String),
    #[error("regime {0:?} has no open interval")]
    Critical(Regime),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// `(k−2)π − Σ angles`; ideal corners contribute 0.
pub fn hyperbolic_polygon_area(k: usize, angles: &[f64]) -> Result<f64, VolumeError> {
    if k < 3 {
        return Err(VolumeError::Corners(k));
    }
    if let Some(&a) = angles.iter().find(|a| !(0.0..PI).contains(*a)) {
        return Err(VolumeError::Angle(a));
    }
    let area = (k as f64 - 2.0) * PI - angles.iter().sum::<f64>();
    if area < -1e-12 {
        return Err(VolumeError::Area(area));
    }
    Ok(area.max(0.0))
}

/// Gauss–Bonnet for a hyperbolic cone surface: `−2πχ + Σ(2π − θᵢ)`.
pub fn cone_surface_area(euler_char: i64, cone_angles: &[f64]) -> Result<f64, VolumeError> {
    if let Some(&a) = cone_angles.iter().find(|a| !(**a > 0.0 && **a < 2.0 * PI)) {
        return Err(VolumeError::Angle(a));
    }
    let area =
        -2.0 * PI * euler_char as f64 + cone_angles.iter().map(|a| 2.0 * PI - a).sum::<f64>();
    if area <= 0.0 {
        return Err(VolumeError::Area(area));
    }
    Ok(area)
}

fn ip(a: &Vector<f64>, b: &Vector<f64>) -> f64 {
    minkowski_product(a, b).expect("dimension")
}

/// `x` minus its component in `span(a, b)`.
fn project_off(x: &Vector<f64>, a: &Vector<f64>, b: &Vector<f64>) -> Vector<f64> {
    let (aa, ab, bb) = (ip(a, a), ip(a, b), ip(b, b));
    let (xa, xb) = (ip(x, a), ip(x, b));
    let det = aa * bb - ab * ab;
    let ca = (xa * bb - xb * ab) / det;
    let cb = (xb * aa - xa * ab) / det;
    x.sub(&a.scale(&ca)).sub(&b.scale(&cb))
}

fn cos_between(u: &Vector<f64>, v: &Vector<f64>) -> f64 {
    -ip(u, v) / (ip(u, u) * ip(v, v)).sqrt()
}

/// Corner angle of the face `{i, j}` at the finite vertex `{i, j, k, l}`.
pub fn corner_angle(ni: &Vector<f64>, nj: &Vector<f64>, nk: &Vector<f64>, nl: &Vector<f64>) -> f64 {
    let (pk, pl) = (project_off(nk, ni, nj), project_off(nl, ni, nj));
    cos_between(&pk, &pl).clamp(-1.0, 1.0).acos()
}

/// Polygon data of one 2-face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceGeometry {
    pub walls: [String; 2],
    pub k: usize,
    /// Interior angles; 0 at ideal corners.
    pub angles: Vec<f64>,
    pub ideal: Vec<bool>,
    pub area: f64,
    pub dihedral: f64,
}

/// Corners of a face: `None` for ideal, otherwise the two other walls.
type Corners = Vec<Option<[usize; 2]>>;

fn face_corners(s: &StrataComplex, f: usize) -> Result<Corners, VolumeError> {
    let [i, j] = s.faces[f].walls;
    s.vertices_of_face(f)
        .into_iter()
        .map(|v| {
            let vx = &s.vertices[v];
            match vx.kind {
                PointKind::Ideal => Ok(None),
                PointKind::Finite => {
                    let rest: Vec<usize> = vx
                        .walls
                        .iter()
                        .copied()
                        .filter(|&w| w != i && w != j)
                        .collect();
                    match rest.as_slice() {
                        [k, l] => Ok(Some([*k, *l])),
                        _ => Err(VolumeError::NotSimple(s.wall_names(&vx.walls).join(","))),
                    }
                }
            }
        })
        .collect()
}

fn polygon(normals: &[Vector<f64>], walls: [usize; 2], corners: &Corners) -> (Vec<f64>, f64) {
    let [i, j] = walls;
    let angles: Vec<f64> = corners
        .iter()
        .map(|c| match c {
            None => 0.0,
            Some([k, l]) => corner_angle(&normals[i], &normals[j], &normals[*k], &normals[*l]),
        })
        .collect();
    let area = (corners.len() as f64 - 2.0) * PI - angles.iter().sum::<f64>();
    (angles, area)
}

pub fn face_geometry(
    p: &Polytope<f64>,
    s: &StrataComplex,
) -> Result<Vec<FaceGeometry>, VolumeError> {
    let normals = p.vectors();
    (0..s.faces.len())
        .map(|f| {
            let corners = face_corners(s, f)?;
            let walls = s.faces[f].walls;
            let (angles, area) = polygon(&normals, walls, &corners);
            hyperbolic_polygon_area(corners.len(), &angles)?;
            Ok(FaceGeometry {
                walls: [s.walls[walls[0]].clone(), s.walls[walls[1]].clone()],
                k: corners.len(),
                ideal: corners.iter().map(Option::is_none).collect(),
                angles,
                area,
                dihedral: s.faces[f].angle,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Schlafli,
    ClosedForm,
    Poincare,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Schlafli => "schlafli",
            Method::ClosedForm => "closed-form",
            Method::Poincare => "poincare",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumePoint {
    pub t: f64,
    pub theta: f64,
    /// Defined on `[t₁, 1]` only.
    pub phi: Option<f64>,
    pub vol: f64,
    pub method: Method,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VolumeCurve {
    pub points: Vec<VolumePoint>,
}

impl VolumeCurve {
    /// Columns `t, theta, phi, vol, method`; `phi` empty outside `[t₁, 1]`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["t", "theta", "phi", "vol", "method"])
            .expect("in-memory write");
        for p in &self.points {
            w.write_record([
                fmt12(p.t),
                fmt12(p.theta),
                p.phi.map(fmt12).unwrap_or_default(),
                fmt12(p.vol),
                p.method.as_str().to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// 12 significant digits.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
        .parse::<f64>()
        .map(|y| y.to_string())
        .unwrap_or_else(|_| x.to_string())
}

fn same_combinatorics(a: &StrataComplex, b: &StrataComplex) -> bool {
    a.faces
        .iter()
        .map(|f| f.walls)
        .eq(b.faces.iter().map(|f| f.walls))
        && a.vertices
            .iter()
            .map(|v| (&v.walls, v.kind))
            .eq(b.vertices.iter().map(|v| (&v.walls, v.kind)))
        && a.edges == b.edges
}

fn regime_name(r: Regime) -> &'static str {
    r.label()
}

/// `dVol/dt = −(1/3) Σ Area(F) dθ_F/dt` on an open regime with fixed combinatorics.
pub struct SchlafliFlow {
    regime: Regime,
    names: Vec<WallName>,
    faces: Vec<([usize; 2], Corners)>,
}

const INTEGRATION_TOL: f64 = 1e-11;

impl SchlafliFlow {
    pub fn new(regime: Regime) -> Result<Self, VolumeError> {
        let (a, b) = regime.span().ok_or(VolumeError::Critical(regime))?;
        let names = ks_wall_names(regime.has_gh());
        let strata_at = |t: f64| -> Result<StrataComplex, VolumeError> {
            let p = crate::family::polytope_from(
                names
                    .iter()
                    .map(|&n| {
                        let v = crate::lorentz::SpaceLikeVector::new(crate::family::wall_vector(
                            n, &t,
                        ))?;
                        Ok((n, v))
                    })
                    .collect::<Result<Vec<_>, FamilyError>>()?,
            );
            Ok(enumerate_strata(&p, StrataMode::Geometric)?)
        };
        let mid = strata_at(0.5 * (a + b))?;
        for probe in [a + 0.05 * (b - a), b - 0.05 * (b - a)] {
            if !same_combinatorics(&strata_at(probe)?, &mid) {
                return Err(VolumeError::Combinatorics(regime_name(regime)));
            }
        }
        let faces = (0..mid.faces.len())
            .map(|f| Ok((mid.faces[f].walls, face_corners(&mid, f)?)))
            .collect::<Result<Vec<_>, VolumeError>>()?;
        Ok(SchlafliFlow {
            regime,
            names,
            faces,
        })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let n = raw_normals(&self.names, t);
        let dn: Vec<Vector<f64>> = self
            .names
            .iter()
            .map(|&w| wall_vector_derivative(w, t))
            .collect();
        let mut sum = 0.0;
        for (walls, corners) in &self.faces {
            let [i, j] = *walls;
            let (_, area) = polygon(&n, *walls, corners);
            let g = ip(&n[i], &n[j]);
            let (ni, nj) = (ip(&n[i], &n[i]), ip(&n[j], &n[j]));
            let dg = ip(&dn[i], &n[j]) + ip(&n[i], &dn[j]);
            let (dni, dnj) = (2.0 * ip(&dn[i], &n[i]), 2.0 * ip(&dn[j], &n[j]));
            let nn = ni * nj;
            let dalpha = -dg / nn.sqrt() + 0.5 * g * (dni * nj + ni * dnj) / nn.powf(1.5);
            // sin θ from the 2×2 Gram determinant.
            let sin = ((nn - g * g) / nn).max(0.0).sqrt();
            if sin == 0.0 {
                continue;
            }
            sum += area * (-dalpha / sin);
        }
        -sum / 3.0
    }

    fn check(&self, t: f64) -> Result<(), VolumeError> {
        let (a, b) = self.regime.span().expect("open regime");
        if t < a - 1e-12 || t > b + 1e-12 {
            Err(VolumeError::RegimeCrossing(t, regime_name(self.regime)))
        } else {
            Ok(())
        }
    }

    /// `Vol(t) − Vol(t0)`.
    pub fn increment(&self, t0: f64, t: f64) -> Result<f64, VolumeError> {
        self.check(t0)?;
        self.check(t)?;
        if t0 == t {
            return Ok(0.0);
        }
        Ok(quadrature::integrate(|s| self.derivative(s), t0, t, INTEGRATION_TOL).integral)
    }
}

fn point(t: f64, vol: f64, method: Method) -> VolumePoint {
    VolumePoint {
        t,
        theta: angle_theta(t).unwrap_or(f64::NAN),
        phi: angle_phi(t).ok(),
        vol,
        method,
    }
}

/// Integrates the Schläfli flow of `regime` from `(t0, vol0)` through `samples`.
pub fn schlafli_integrate(
    regime: Regime,
    t0: f64,
    vol0: f64,
    samples: &[f64],
) -> Result<VolumeCurve, VolumeError> {
    let flow = SchlafliFlow::new(regime)?;
    schlafli_curve(&flow, t0, vol0, samples)
}

/// As [`schlafli_integrate`] with a prepared flow; samples are visited in
/// order of distance from `t0`, accumulating increments.
pub fn schlafli_curve(
    flow: &SchlafliFlow,
    t0: f64,
    vol0: f64,
    samples: &[f64],
) -> Result<VolumeCurve, VolumeError> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| (samples[a] - t0).abs().total_cmp(&(samples[b] - t0).abs()));
    let mut out = vec![None; samples.len()];
    let mut above = (t0, vol0);
    let mut below = (t0, vol0);
    for i in order {
        let t = samples[i];
        let cur = if t >= t0 { &mut above } else { &mut below };
        let v = cur.1 + flow.increment(cur.0, t)?;
        *cur = (t, v);
        out[i] = Some(point(t, v, Method::Schlafli));
    }
    Ok(VolumeCurve {
        points: out.into_iter().map(|p| p.expect("filled")).collect(),
    })
}

/// Schläfli volumes at arbitrary `t ∈ (0, 1]`, chained down from `Vol(P₁) = 4π²/3`
/// across the critical times.
pub fn schlafli_volume_curve(samples: &[f64]) -> Result<VolumeCurve, VolumeError> {
    for &t in samples {
        FamilyTime::new(t)?;
    }
    let mut out: Vec<Option<VolumePoint>> = vec![None; samples.len()];
    let (mut t_start, mut vol_start) = (1.0, 4.0 * PI * PI / 3.0);
    for regime in [Regime::High, Regime::Middle, Regime::Low] {
        let (a, b) = regime.span().expect("open regime");
        let idx: Vec<usize> = (0..samples.len())
            .filter(|&i| samples[i] >= a && samples[i] <= b)
            .collect();
        let needs_end = a > 0.0;
        if idx.is_empty() && !needs_end {
            break;
        }
        let flow = SchlafliFlow::new(regime)?;
        let local: Vec<f64> = idx.iter().map(|&i| samples[i]).collect();
        let curve = schlafli_curve(&flow, t_start, vol_start, &local)?;
        for (i, p) in idx.into_iter().zip(curve.points) {
            out[i].get_or_insert(p);
        }
        if needs_end {
            vol_start += flow.increment(t_start, a)?;
            t_start = a;
        }
    }
    Ok(VolumeCurve {
        points: out
            .into_iter()
            .map(|p| p.expect("every sample lies in some regime"))
            .collect(),
    })
}

fn acos_1_3() -> f64 {
    (1.0f64 / 3.0).acos()
}

/// `∫ₐ^θ η(θ̃) dθ̃` with `a = arccos(1/3)`.
fn eta_integral(theta: f64) -> f64 {
    let a = acos_1_3();
    if theta <= a {
        return 0.0;
    }
    quadrature::integrate(eta_of_theta, a, theta, 1e-14).integral
}

/// Volume of the spherical regular tetrahedron with dihedral angle `θ`.
pub fn spherical_regular_tet_volume(theta: f64) -> Result<f64, VolumeError> {
    if theta < acos_1_3() - 1e-12 || theta > PI + 1e-12 {
        return Err(VolumeError::Angle(theta));
    }
    Ok(3.0 * eta_integral(theta.min(PI)))
}

/// `∫ₐ^π arccos(cos θ/(1 − 2cos θ)) dθ`.
pub fn coxeter_integral() -> f64 {
    eta_integral(PI)
}

/// `Vol(P_t)` by the regime's closed form.
pub fn closed_form_volume(t: f64) -> Result<f64, VolumeError> {
    FamilyTime::new(t)?;
    let c = 4.0 * PI * PI / 3.0;
    let th = angle_theta(t)?;
    Ok(if t >= t1() - 1e-12 {
        let ph = angle_phi(t.max(t1()))?;
        c * (2.0 - 3.0 * th / PI - 2.0 * ph / PI + 6.0 * th * ph / (PI * PI))
    } else if t >= T2 {
        c * (2.0 - 3.0 * th / PI)
    } else {
        c * (2.0 - 3.0 * th / PI + 3.0 / (PI * PI) * eta_integral(th))
    })
}

/// Volume of a finite-vertex link: a join of points, arcs, triangles and
/// at most one regular tetrahedron.
fn vertex_link_volume(p: &Polytope<f64>, walls: &[usize]) -> Result<f64, VolumeError> {
    let angle = |a: usize, b: usize| {
        cos_between(p.normals[a].vector(), p.normals[b].vector())
            .clamp(-1.0, 1.0)
            .acos()
    };
    let right = |a: usize, b: usize| (angle(a, b) - PI / 2.0).abs() < 1e-9;
    let comps = crate::coxeter::components_of(walls, |a, b| a != b && !right(a, b));
    let unsupported = || {
        VolumeError::UnsupportedLink(
            p.names
                .iter()
                .enumerate()
                .filter(|(i, _)| walls.contains(i))
                .map(|(_, n)| n.as_str())
                .collect::<Vec<_>>()
                .join(","),
        )
    };
    let mut fraction = 1.0;
    for c in comps {
        fraction *= match c.as_slice() {
            [_] => 0.5,
            [a, b] => angle(*a, *b) / (2.0 * PI),
            [a, b, d] => (angle(*a, *b) + angle(*a, *d) + angle(*b, *d) - PI) / (4.0 * PI),
            [a, b, d, e] => {
                let th = angle(*a, *b);
                let pairs = [(a, d), (a, e), (b, d), (b, e), (d, e)];
                if pairs
                    .iter()
                    .any(|(x, y)| (angle(**x, **y) - th).abs() > 1e-9)
                {
                    return Err(unsupported());
                }
                spherical_regular_tet_volume(th)? / (2.0 * PI * PI)
            }
            _ => return Err(unsupported()),
        };
    }
    Ok(2.0 * PI * PI * fraction)
}

/// The Poincaré sum over strata, restricted to join and regular-tetrahedron links.
pub fn poincare_volume(p: &Polytope<f64>, s: &StrataComplex) -> Result<f64, VolumeError> {
    let n = s.facets.len() as f64;
    let faces: f64 = s.faces.iter().map(|f| f.angle).sum();
    let mut edge_links = 0.0;
    for e in &s.edges {
        let [a, b, c] = e.walls[..] else {
            return Err(VolumeError::NotSimple(s.wall_names(&e.walls).join(",")));
        };
        let angle = |x: usize, y: usize| {
            let k = s
                .face_index(x, y)
                .ok_or_else(|| VolumeError::NotSimple(s.wall_names(&e.walls).join(",")))?;
            Ok::<f64, VolumeError>(s.faces[k].angle)
        };
        edge_links += angle(a, b)? + angle(a, c)? + angle(b, c)? - PI;
    }
    let mut vertex_links = 0.0;
    for (_, v) in s.finite_vertices() {
        vertex_links += vertex_link_volume(p, &v.walls)?;
    }
    Ok(4.0 * PI * PI / 3.0
        * (1.0 - n / 2.0 + faces / (2.0 * PI) - edge_links / (4.0 * PI)
            + vertex_links / (2.0 * PI * PI)))
}

/// `Σ (−1)^dim / |Stab|` over the strata, ideal vertices excluded.
pub fn orbifold_euler_char<S: crate::Scalar>(
    p: &Polytope<S>,
    s: &StrataComplex,
) -> Result<Rational64, VolumeError> {
    let d = build_diagram(&gram_matrix(p)?);
    let term = |walls: &[usize]| -> Result<Rational64, VolumeError> {
        let order = subset_group_order(&d, walls)?;
        let sign = if walls.len() % 2 == 0 { 1 } else { -1 };
        Ok(Rational64::new(sign, order as i64))
    };
    let mut chi = Rational64::from_integer(1);
    for &w in &s.facets {
        chi += term(&[w])?;
    }
    for f in &s.faces {
        chi += term(&f.walls)?;
    }
    for e in &s.edges {
        chi += term(&e.walls)?;
    }
    for (_, v) in s.finite_vertices() {
        chi += term(&v.walls)?;
    }
    Ok(chi)
}

/// `(4π²/3)·χ`.
pub fn gauss_bonnet_volume(chi: Rational64) -> f64 {
    4.0 * PI * PI / 3.0 * chi.to_f64().unwrap_or(f64::NAN)
}

/// `(8π²/3)(2 − (α+β)/2π + αβ/4π²)`.
pub fn manifold_volume_formula(alpha: f64, beta: f64) -> Result<f64, VolumeError> {
    for a in [alpha, beta] {
        if !(-1e-12..=2.0 * PI + 1e-12).contains(&a) {
            return Err(VolumeError::Angle(a));
        }
    }
    Ok(8.0 * PI * PI / 3.0 * (2.0 - (alpha + beta) / (2.0 * PI) + alpha * beta / (4.0 * PI * PI)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{p_polytope, tbar};

    const C: f64 = 4.0 * PI * PI / 3.0;

    #[test]
    fn polygon_areas() {
        let th = 1.0;
        assert!(
            (hyperbolic_polygon_area(3, &[th, th, th]).unwrap() - (PI - 3.0 * th)).abs() < 1e-15
        );
        let ph = 0.4;
        let quad = hyperbolic_polygon_area(4, &[PI / 2.0, PI / 2.0, ph, ph]).unwrap();
        assert!((quad - (PI - 2.0 * ph)).abs() < 1e-15);
        assert_eq!(hyperbolic_polygon_area(3, &[0.0; 3]).unwrap(), PI);
        assert!(hyperbolic_polygon_area(3, &[1.5, 1.5, 1.5]).is_err());
        assert!(hyperbolic_polygon_area(2, &[]).is_err());
    }

    #[test]
    fn cone_surfaces() {
        let b = 1.1;
        assert!((cone_surface_area(0, &[b, b]).unwrap() - (4.0 * PI - 2.0 * b)).abs() < 1e-14);
        assert!((cone_surface_area(-2, &[]).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!(cone_surface_area(2, &[]).is_err());
    }

    #[test]
    fn closed_forms() {
        assert!((closed_form_volume(1.0).unwrap() - C).abs() < 1e-12);
        assert!((closed_form_volume(t1()).unwrap() - C).abs() < 1e-9);
        assert!((closed_form_volume(tbar()).unwrap() - 5.0 * PI * PI / 6.0).abs() < 1e-9);
        assert!(closed_form_volume(1e-3).unwrap() < 2e-2);
        assert!(closed_form_volume(1e-3).unwrap() < closed_form_volume(1e-2).unwrap());
    }

    #[test]
    fn tetrahedron_and_coxeter_integral() {
        assert!((coxeter_integral() - PI * PI / 3.0).abs() < 1e-10);
        assert!(spherical_regular_tet_volume(acos_1_3()).unwrap().abs() < 1e-15);
        assert!((spherical_regular_tet_volume(PI).unwrap() - PI * PI).abs() < 1e-8);
        // The all-right tetrahedron tiles S³ sixteen times.
        assert!((spherical_regular_tet_volume(PI / 2.0).unwrap() - PI * PI / 8.0).abs() < 1e-10);
        assert!((eta_of_theta(PI) - (-1.0f64 / 3.0).acos()).abs() < 1e-15);
        assert!(eta_of_theta(acos_1_3()).abs() < 1e-7);
    }

    #[test]
    fn orbifold_chi() {
        for (t, chi) in [
            (FamilyTime::one(), Rational64::from_integer(1)),
            (FamilyTime::t1(), Rational64::from_integer(1)),
            (FamilyTime::tbar(), Rational64::new(5, 8)),
        ] {
            let p = p_polytope::<f64>(&t).unwrap();
            let s = enumerate_strata(&p, StrataMode::Geometric).unwrap();
            assert_eq!(orbifold_euler_char(&p, &s).unwrap(), chi, "t = {}", t.t);
        }
    }

    #[test]
    fn poincare_matches_closed_form() {
        for t in [1.0, 0.9, t1(), 0.75, T2, 0.65, tbar(), 0.4, 0.1] {
            let p = p_polytope::<f64>(&FamilyTime::new(t).unwrap()).unwrap();
            let s = enumerate_strata(&p, StrataMode::Geometric).unwrap();
            let v = poincare_volume(&p, &s).unwrap();
            assert!(
                (v - closed_form_volume(t).unwrap()).abs() < 1e-8,
                "t = {t}: {v}"
            );
        }
    }

    #[test]
    fn face_areas_nonnegative() {
        let p = p_polytope::<f64>(&FamilyTime::new(0.9).unwrap()).unwrap();
        let s = enumerate_strata(&p, StrataMode::Geometric).unwrap();
        let g = face_geometry(&p, &s).unwrap();
        assert_eq!(g.len(), 108);
        assert!(g.iter().all(|f| f.area >= 0.0 && f.k >= 3));
    }

    #[test]
    fn schlafli_high_regime() {
        let flow = SchlafliFlow::new(Regime::High).unwrap();
        let ts = [0.95, 0.85, 0.8];
        let c = schlafli_curve(&flow, 1.0, C, &ts).unwrap();
        for p in &c.points {
            assert!(
                (p.vol - closed_form_volume(p.t).unwrap()).abs() < 1e-7,
                "t = {}",
                p.t
            );
        }
        assert_eq!(flow.increment(0.9, 0.9).unwrap(), 0.0);
        assert!(flow.increment(0.9, 0.5).is_err());
    }

    #[test]
    fn schlafli_chain_matches_closed_forms() {
        let ts = [0.97, t1(), 0.75, T2, tbar(), 0.5, 0.2];
        let c = schlafli_volume_curve(&ts).unwrap();
        for p in &c.points {
            assert!(
                (p.vol - closed_form_volume(p.t).unwrap()).abs() < 1e-6,
                "t = {}: {}",
                p.t,
                p.vol
            );
        }
        let low =
            schlafli_integrate(Regime::Low, tbar(), 5.0 * PI * PI / 6.0, &[0.6, 0.3]).unwrap();
        for p in &low.points {
            assert!((p.vol - closed_form_volume(p.t).unwrap()).abs() < 1e-6);
        }
        assert!(low.to_csv().starts_with("t,theta,phi,vol,method\n"));
    }

    #[test]
    fn manifold_formula() {
        assert!(
            (manifold_volume_formula(0.0, 2.0 * PI).unwrap() - 8.0 * PI * PI / 3.0).abs() < 1e-12
        );
        assert!(
            (manifold_volume_formula(2.0 * PI, 2.0 * PI).unwrap() - 8.0 * PI * PI / 3.0).abs()
                < 1e-12
        );
        for t in [t1(), 0.8, 0.9, 1.0] {
            let (th, ph) = (angle_theta(t).unwrap(), angle_phi(t).unwrap());
            let m = manifold_volume_formula(6.0 * th, 4.0 * ph).unwrap();
            assert!((m - 2.0 * closed_form_volume(t).unwrap()).abs() < 1e-9);
        }
        assert_eq!(gauss_bonnet_volume(Rational64::from_integer(0)), 0.0);
    }
}
