use serde::{Deserialize, Serialize};

use super::{components, gram_matrix, CoxeterError, GramMatrix, Polytope};
use crate::lorentz::{project_to_wall, SpaceLikeVector};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum EdgeLabel {
    /// `α = 0`; omitted when drawing.
    RightAngle,
    /// Dihedral angle `θ` with `cos θ = α`.
    Angle(f64),
    /// `α = 1`.
    Thick,
    /// `α > 1`, labelled by the distance `arccosh α`.
    Dashed(f64),
    /// `α ≤ −1`.
    Nested,
}

impl EdgeLabel {
    pub fn is_intersecting(self) -> bool {
        matches!(self, EdgeLabel::RightAngle | EdgeLabel::Angle(_))
    }

    pub fn angle(self) -> Option<f64> {
        match self {
            EdgeLabel::RightAngle => Some(std::f64::consts::FRAC_PI_2),
            EdgeLabel::Angle(a) => Some(a),
            _ => None,
        }
    }

    fn classify<S: Scalar>(g: &S) -> Self {
        let alpha = -g.to_f64();
        if g.signum() == 0 {
            return EdgeLabel::RightAngle;
        }
        let c = g.mul(g).sub(&S::one()).signum();
        match (c, alpha > 0.0) {
            (-1, _) => EdgeLabel::Angle(alpha.clamp(-1.0, 1.0).acos()),
            (0, true) => EdgeLabel::Thick,
            (1, true) => EdgeLabel::Dashed(alpha.max(1.0).acosh()),
            _ => EdgeLabel::Nested,
        }
    }
}

/// Labelled graph on the walls; determined by the Gram matrix alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoxeterDiagram {
    pub nodes: Vec<String>,
    pub alpha: Vec<Vec<f64>>,
    pub labels: Vec<Vec<EdgeLabel>>,
}

pub fn build_diagram<S: Scalar>(g: &GramMatrix<S>) -> CoxeterDiagram {
    let n = g.size();
    let mut labels = vec![vec![EdgeLabel::RightAngle; n]; n];
    let mut alpha = vec![vec![0.0; n]; n];
    for i in 0..n {
        alpha[i][i] = -1.0;
        for j in 0..n {
            if i != j {
                labels[i][j] = EdgeLabel::classify(g.get(i, j));
                alpha[i][j] = g.alpha(i, j);
            }
        }
    }
    CoxeterDiagram {
        nodes: g.names.clone(),
        alpha,
        labels,
    }
}

impl CoxeterDiagram {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn label(&self, i: usize, j: usize) -> EdgeLabel {
        self.labels[i][j]
    }

    pub fn label_by_name(&self, a: &str, b: &str) -> Option<EdgeLabel> {
        Some(self.labels[self.index_of(a)?][self.index_of(b)?])
    }

    /// Drawn edges `(i, j, label)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, EdgeLabel)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.labels[i][j] != EdgeLabel::RightAngle {
                    out.push((i, j, self.labels[i][j]));
                }
            }
        }
        out
    }

    /// All dihedral angles at most `π/2`.
    pub fn is_acute(&self) -> bool {
        self.edges().iter().all(|&(_, _, l)| {
            !matches!(l, EdgeLabel::Nested)
                && l.angle()
                    .map_or(true, |a| a <= std::f64::consts::FRAC_PI_2 + 1e-9)
        })
    }

    pub fn restrict(&self, subset: &[usize]) -> CoxeterDiagram {
        CoxeterDiagram {
            nodes: subset.iter().map(|&i| self.nodes[i].clone()).collect(),
            alpha: subset
                .iter()
                .map(|&i| subset.iter().map(|&j| self.alpha[i][j]).collect())
                .collect(),
            labels: subset
                .iter()
                .map(|&i| subset.iter().map(|&j| self.labels[i][j]).collect())
                .collect(),
        }
    }

    /// Components joined by drawn edges.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let nodes: Vec<usize> = (0..self.len()).collect();
        components(&nodes, |i, j| {
            i != j && self.labels[i][j] != EdgeLabel::RightAngle
        })
    }
}

/// Diagram of the wall `wall` as a polytope of one dimension less.
///
/// Walls not meeting `wall` (thick, dashed or nested) are dropped; the rest
/// are projected onto it.
pub fn wall_diagram<S: Scalar>(
    p: &Polytope<S>,
    wall: usize,
) -> Result<CoxeterDiagram, CoxeterError> {
    if wall >= p.len() {
        return Err(CoxeterError::WallIndex(wall));
    }
    let full = build_diagram(&gram_matrix(p)?);
    let w = &p.normals[wall];
    let mut names = Vec::new();
    let mut normals = Vec::new();
    for j in 0..p.len() {
        if j == wall || !full.labels[wall][j].is_intersecting() {
            continue;
        }
        normals.push(SpaceLikeVector::new(project_to_wall(
            p.normals[j].vector(),
            w,
        ))?);
        names.push(p.names[j].clone());
    }
    Ok(build_diagram(&gram_matrix(&Polytope::new(names, normals))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{q_polytope, FamilyTime};
    use std::f64::consts::PI;

    #[test]
    fn q1_thick_edges() {
        let q = q_polytope::<f64>(&FamilyTime::one()).unwrap();
        let d = build_diagram(&gram_matrix(&q).unwrap());
        assert_eq!(d.label_by_name("m0", "N"), Some(EdgeLabel::Thick));
        assert_eq!(d.label_by_name("A", "G"), Some(EdgeLabel::Thick));
        let lm = d.label_by_name("L", "M").unwrap().angle().unwrap();
        assert!((lm - PI / 3.0).abs() < 1e-12);
        assert_eq!(d.label_by_name("M", "N"), Some(EdgeLabel::RightAngle));
    }

    #[test]
    fn q_green_and_red_edges() {
        let t = 0.9;
        let q = q_polytope::<f64>(&FamilyTime::new(t).unwrap()).unwrap();
        let d = build_diagram(&gram_matrix(&q).unwrap());
        let phi = crate::family::angle_phi(t).unwrap();
        let theta = crate::family::angle_theta(t).unwrap();
        assert!((d.label_by_name("m0", "G").unwrap().angle().unwrap() - phi).abs() < 1e-12);
        assert!((d.label_by_name("p0", "N").unwrap().angle().unwrap() - theta / 2.0).abs() < 1e-12);
        assert!(matches!(
            d.label_by_name("m0", "N"),
            Some(EdgeLabel::Dashed(_))
        ));
    }

    #[test]
    fn edgeless() {
        let names = vec!["x".to_string(), "y".to_string()];
        let vs = vec![
            SpaceLikeVector::new(crate::lorentz::Vector(vec![0.0, 1.0, 0.0])).unwrap(),
            SpaceLikeVector::new(crate::lorentz::Vector(vec![0.0, 0.0, 1.0])).unwrap(),
        ];
        let p = Polytope::new(names, vs);
        let d = build_diagram(&gram_matrix(&p).unwrap());
        assert!(d.edges().is_empty());
        let w = wall_diagram(&p, 0).unwrap();
        assert_eq!(w.nodes, vec!["y".to_string()]);
        assert!(w.edges().is_empty());
    }

    #[test]
    fn wall_a_unchanged() {
        let q = q_polytope::<f64>(&FamilyTime::new(0.8).unwrap()).unwrap();
        let a = q.index_of("A").unwrap();
        let d = build_diagram(&gram_matrix(&q).unwrap());
        let w = wall_diagram(&q, a).unwrap();
        let keep: Vec<usize> = w.nodes.iter().map(|n| d.index_of(n).unwrap()).collect();
        let r = d.restrict(&keep);
        for i in 0..keep.len() {
            for j in 0..keep.len() {
                assert!((r.alpha[i][j] - w.alpha[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wall_p3_lm_edge() {
        for t in [0.4, 0.6, 0.8, 0.95] {
            let q = q_polytope::<f64>(&FamilyTime::new(t).unwrap()).unwrap();
            let w = wall_diagram(&q, q.index_of("p3").unwrap()).unwrap();
            let (l, m) = (w.index_of("L").unwrap(), w.index_of("M").unwrap());
            let s = t * t;
            let expect = (1.0 + s) / (2.0 * (1.0 - s * s).sqrt());
            assert!((w.alpha[l][m] - expect).abs() < 1e-12, "t = {t}");
        }
    }
}
