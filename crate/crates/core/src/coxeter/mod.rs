//! Gram matrices, Coxeter diagrams, subdiagram classification, strata
//! enumeration and finite Coxeter group orders.

mod diagram;
mod gram;
mod order;
mod strata;

pub use diagram::{build_diagram, wall_diagram, CoxeterDiagram, EdgeLabel};
pub use gram::{classify_subdiagram, gram_matrix, inertia, GramMatrix, Inertia, SubdiagramClass};
pub use order::{coxeter_group_order, subset_group_order, CoxeterType};
pub use strata::{
    enumerate_strata, finite_volume_check, Edge, EdgeEnd, Face, StrataComplex, StrataMode, Vertex,
    VolumeVerdict,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lorentz::{LorentzError, SpaceLikeVector, Vector};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoxeterError {
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error("normal {0} cannot be normalised in this backend")]
    Normalise(String),
    #[error("diagram and geometric strata differ: {0}")]
    BackendMismatch(String),
    #[error("subdiagram {0} is not elliptic")]
    NotElliptic(String),
    #[error("angle {0} is not of the form pi/m")]
    NotCoxeter(f64),
    #[error("inconsistent geometry: {0}")]
    Inconsistent(String),
    #[error("wall index {0} out of range")]
    WallIndex(usize),
    #[error("polytope has no walls")]
    Empty,
}

/// Intersection of the half-spaces `{⟨vᵢ,·⟩ ≤ 0}`, walls named.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope<S> {
    pub names: Vec<String>,
    pub normals: Vec<SpaceLikeVector<S>>,
}

impl<S: Scalar> Polytope<S> {
    pub fn new(names: Vec<String>, normals: Vec<SpaceLikeVector<S>>) -> Self {
        assert_eq!(names.len(), normals.len(), "one name per normal");
        Polytope { names, normals }
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn vectors(&self) -> Vec<Vector<S>> {
        self.normals.iter().map(|v| v.vector().clone()).collect()
    }

    pub fn to_f64(&self) -> Polytope<f64> {
        let normals = self
            .normals
            .iter()
            .map(|v| {
                SpaceLikeVector::new(v.vector().to_f64()).expect("space-like stays space-like")
            })
            .collect();
        Polytope {
            names: self.names.clone(),
            normals,
        }
    }

    /// Keeps the walls whose index satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        let (names, normals) = self
            .names
            .iter()
            .cloned()
            .zip(self.normals.iter().cloned())
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, x)| x)
            .unzip();
        Polytope { names, normals }
    }
}

/// One named normal in a polytope file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedNormal {
    pub name: String,
    pub normal: Vec<f64>,
}

/// JSON form of a polytope: `{"walls": [{"name": .., "normal": [..]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub walls: Vec<NamedNormal>,
}

impl PolytopeFile {
    pub fn into_polytope(self) -> Result<Polytope<f64>, CoxeterError> {
        if self.walls.is_empty() {
            return Err(CoxeterError::Empty);
        }
        let mut names = Vec::new();
        let mut normals = Vec::new();
        for w in self.walls {
            normals.push(SpaceLikeVector::new(Vector(w.normal))?);
            names.push(w.name);
        }
        Ok(Polytope::new(names, normals))
    }

    pub fn from_polytope(p: &Polytope<f64>) -> Self {
        let walls = p
            .names
            .iter()
            .zip(&p.normals)
            .map(|(n, v)| NamedNormal {
                name: n.clone(),
                normal: v.vector().0.clone(),
            })
            .collect();
        PolytopeFile { walls }
    }
}

/// Connected components of the graph on `nodes` with edges where `adj` holds.
pub fn components_of(nodes: &[usize], adj: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    components(nodes, adj)
}

pub(crate) fn components(nodes: &[usize], adj: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut seen = vec![false; nodes.len()];
    let mut out = Vec::new();
    for s in 0..nodes.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![nodes[s]];
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for b in 0..nodes.len() {
                if !seen[b] && adj(nodes[a], nodes[b]) {
                    seen[b] = true;
                    comp.push(nodes[b]);
                    stack.push(b);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}
