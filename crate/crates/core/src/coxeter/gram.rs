use serde::Serialize;

use super::{components, CoxeterError, Polytope};
use crate::scalar::Scalar;

/// `Gᵢⱼ = ⟨eᵢ,eⱼ⟩` for unit normals, so `Gᵢⱼ = −αᵢⱼ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Serialize")]
pub struct GramMatrix<S> {
    pub names: Vec<String>,
    pub entries: Vec<Vec<S>>,
}

impl<S: Scalar> GramMatrix<S> {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i][j]
    }

    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        -self.entries[i][j].to_f64()
    }

    pub fn to_f64(&self) -> GramMatrix<f64> {
        GramMatrix {
            names: self.names.clone(),
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(S::to_f64).collect())
                .collect(),
        }
    }

    pub fn submatrix(&self, subset: &[usize]) -> Vec<Vec<S>> {
        subset
            .iter()
            .map(|&i| subset.iter().map(|&j| self.entries[i][j].clone()).collect())
            .collect()
    }
}

pub fn gram_matrix<S: Scalar>(p: &Polytope<S>) -> Result<GramMatrix<S>, CoxeterError> {
    let units = p
        .normals
        .iter()
        .zip(&p.names)
        .map(|(v, n)| {
            v.vector()
                .unit()
                .ok_or_else(|| CoxeterError::Normalise(n.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut entries = vec![vec![S::zero(); units.len()]; units.len()];
    for i in 0..units.len() {
        entries[i][i] = S::one();
        for j in i + 1..units.len() {
            let g = crate::lorentz::minkowski_product(&units[i], &units[j])?;
            entries[i][j] = g.clone();
            entries[j][i] = g;
        }
    }
    Ok(GramMatrix {
        names: p.names.clone(),
        entries,
    })
}

/// Signs of the eigenvalues of a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Inertia {
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

/// Sylvester inertia by symmetric elimination with diagonal pivoting.
///
/// When every remaining diagonal entry vanishes but some off-diagonal entry
/// does not, the block is indefinite and the remaining counts are split
/// through a 2×2 hyperbolic block.
pub fn inertia<S: Scalar>(m: &[Vec<S>]) -> Inertia {
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut live: Vec<usize> = (0..a.len()).collect();
    let mut out = Inertia::default();
    while !live.is_empty() {
        let pivot = live
            .iter()
            .copied()
            .filter(|&k| a[k][k].signum() != 0)
            .max_by(|&x, &y| a[x][x].to_f64().abs().total_cmp(&a[y][y].to_f64().abs()));
        let Some(k) = pivot else {
            let hyper = live
                .iter()
                .flat_map(|&i| live.iter().map(move |&j| (i, j)))
                .find(|&(i, j)| i != j && a[i][j].signum() != 0);
            match hyper {
                None => {
                    out.zero += live.len();
                    break;
                }
                Some((i, j)) => {
                    // Replace row/col i by i + j so the new diagonal is 2a_ij ≠ 0.
                    for r in 0..a.len() {
                        let v = a[r][i].add(&a[r][j]);
                        a[r][i] = v;
                    }
                    for c in 0..a.len() {
                        let v = a[i][c].add(&a[j][c]);
                        a[i][c] = v;
                    }
                    continue;
                }
            }
        };
        match a[k][k].signum() {
            1 => out.positive += 1,
            _ => out.negative += 1,
        }
        live.retain(|&x| x != k);
        for &i in &live {
            let f = a[i][k].div(&a[k][k]).expect("nonzero pivot");
            if f.is_zero() {
                continue;
            }
            for &j in &live {
                let v = a[i][j].sub(&f.mul(&a[k][j]));
                a[i][j] = v;
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum SubdiagramClass {
    Elliptic,
    Parabolic {
        components: usize,
        rank: usize,
    },
    Indefinite,
    /// Positive semidefinite but not a disjoint union of connected parabolic diagrams.
    Degenerate,
}

pub fn classify_subdiagram<S: Scalar>(g: &GramMatrix<S>, subset: &[usize]) -> SubdiagramClass {
    let comps = components(subset, |i, j| i != j && g.get(i, j).signum() != 0);
    let mut singular = 0;
    for c in &comps {
        let inr = inertia(&g.submatrix(c));
        if inr.negative > 0 {
            return SubdiagramClass::Indefinite;
        }
        match inr.zero {
            0 => {}
            1 => singular += 1,
            _ => return SubdiagramClass::Degenerate,
        }
    }
    if singular == 0 {
        SubdiagramClass::Elliptic
    } else if singular == comps.len() {
        SubdiagramClass::Parabolic {
            components: comps.len(),
            rank: subset.len() - comps.len(),
        }
    } else {
        SubdiagramClass::Degenerate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{q_polytope, FamilyTime};

    fn sub(g: &GramMatrix<f64>, names: &[&str]) -> Vec<usize> {
        names
            .iter()
            .map(|n| g.names.iter().position(|m| m == n).unwrap())
            .collect()
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(
            inertia(&m),
            Inertia {
                positive: 1,
                zero: 0,
                negative: 1
            }
        );
        let m = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        assert_eq!(
            inertia(&m),
            Inertia {
                positive: 1,
                zero: 1,
                negative: 0
            }
        );
    }

    #[test]
    fn gram_signature_is_lorentzian() {
        let q = q_polytope::<f64>(&FamilyTime::new(0.9).unwrap()).unwrap();
        let g = gram_matrix(&q).unwrap();
        let inr = inertia(&g.entries);
        assert_eq!((inr.positive, inr.negative), (4, 1));
    }

    #[test]
    fn euclidean_triangle_at_t1() {
        let q = q_polytope::<f64>(&FamilyTime::t1()).unwrap();
        let g = gram_matrix(&q).unwrap();
        assert_eq!(
            classify_subdiagram(&g, &sub(&g, &["p3", "L", "M"])),
            SubdiagramClass::Parabolic {
                components: 1,
                rank: 2
            }
        );
        assert_eq!(classify_subdiagram(&g, &[4]), SubdiagramClass::Elliptic);
    }

    #[test]
    fn rectangle_and_cusp() {
        for t in [0.3, 0.75, 0.9, 1.0] {
            let q = q_polytope::<f64>(&FamilyTime::new(t).unwrap()).unwrap();
            let g = gram_matrix(&q).unwrap();
            assert_eq!(
                classify_subdiagram(&g, &sub(&g, &["m0", "p0", "m3", "p3"])),
                SubdiagramClass::Parabolic {
                    components: 2,
                    rank: 2
                }
            );
            assert_eq!(
                classify_subdiagram(&g, &sub(&g, &["m0", "p0", "m3", "p3", "A", "L"])),
                SubdiagramClass::Parabolic {
                    components: 3,
                    rank: 3
                }
            );
        }
    }
}
