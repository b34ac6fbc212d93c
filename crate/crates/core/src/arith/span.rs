//! The rational span of cyclic Gram products and the form it carries.

use std::collections::{BTreeMap, HashSet};

use num::{BigRational, One, Zero};

use super::form::{rank, RationalQuadraticForm};
use super::{ArithError, MultiQuad};

/// Unit normals (optional coordinates) and their exact Gram matrix.
#[derive(Clone, Debug)]
pub struct SpanInput {
    pub names: Vec<String>,
    pub gram: Vec<Vec<MultiQuad>>,
    pub coords: Option<Vec<Vec<MultiQuad>>>,
}

/// `coef · e_node`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScaledNormal {
    pub coef: MultiQuad,
    pub node: usize,
}

#[derive(Clone, Debug)]
pub struct SpanBasis {
    pub basis: Vec<ScaledNormal>,
    /// Number of distinct generators examined.
    pub generated: usize,
}

pub const SPAN_DIM: usize = 5;
const MAX_DEPTH: usize = 8;
const MAX_GENERATORS: usize = 4000;

impl SpanInput {
    pub fn node(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn pairing(&self, a: &ScaledNormal, b: &ScaledNormal) -> MultiQuad {
        &(&a.coef * &b.coef) * &self.gram[a.node][b.node]
    }

    /// Rational coordinates of a generator, flattened over (coordinate, radicand).
    fn flatten(
        &self,
        v: &ScaledNormal,
        keys: &mut BTreeMap<(usize, u64), usize>,
    ) -> Vec<(usize, BigRational)> {
        let coords = self.coords.as_ref().expect("coordinates present");
        let mut out = Vec::new();
        for (i, x) in coords[v.node].iter().enumerate() {
            let prod = &v.coef * x;
            for (d, q) in prod.terms() {
                let next = keys.len();
                let k = *keys.entry((i, d)).or_insert(next);
                out.push((k, q.clone()));
            }
        }
        out
    }

    /// ℚ-rank of a family of scaled normals.
    pub fn rank_of(&self, vs: &[ScaledNormal]) -> Result<usize, ArithError> {
        if self.coords.is_some() {
            let mut keys = BTreeMap::new();
            let sparse: Vec<_> = vs.iter().map(|v| self.flatten(v, &mut keys)).collect();
            let width = keys.len();
            let rows: Vec<Vec<BigRational>> = sparse
                .into_iter()
                .map(|s| {
                    let mut row = vec![BigRational::zero(); width];
                    for (k, q) in s {
                        row[k] += q;
                    }
                    row
                })
                .collect();
            Ok(rank(&rows))
        } else {
            // Without coordinates the nondegenerate form detects dependence.
            let mut rows = Vec::with_capacity(vs.len());
            for a in vs {
                let mut row = Vec::with_capacity(vs.len());
                for b in vs {
                    row.push(self.pairing(a, b).as_rational().ok_or_else(|| {
                        ArithError::IrrationalEntry(self.pairing(a, b).to_string())
                    })?);
                }
                rows.push(row);
            }
            Ok(rank(&rows))
        }
    }

    /// Breadth-first generators `g_{1,i₁}g_{i₁,i₂}…g_{i_{k−1},i_k} e_{i_k}`,
    /// deduplicated up to rational rescaling.
    pub fn generators(&self) -> Vec<ScaledNormal> {
        let n = self.gram.len();
        let mut seen: HashSet<ScaledNormal> = HashSet::new();
        let mut out = Vec::new();
        let mut frontier = vec![ScaledNormal {
            coef: MultiQuad::one(),
            node: 0,
        }];
        for _ in 0..MAX_DEPTH {
            let mut next = Vec::new();
            for v in &frontier {
                for m in 0..n {
                    let g = &self.gram[v.node][m];
                    if g.is_zero() {
                        continue;
                    }
                    let w = ScaledNormal {
                        coef: normalize(&(&v.coef * g)),
                        node: m,
                    };
                    if seen.insert(w.clone()) {
                        out.push(w.clone());
                        next.push(w);
                    }
                }
            }
            if next.is_empty() || out.len() > MAX_GENERATORS {
                break;
            }
            frontier = next;
        }
        out
    }

    /// A basis of the span: the supplied one after validation, or the first
    /// generators that reach full rank.
    pub fn rational_span(
        &self,
        supplied: Option<Vec<ScaledNormal>>,
    ) -> Result<SpanBasis, ArithError> {
        let gens = self.generators();
        let total = self.rank_of(&gens)?;
        if total != SPAN_DIM {
            return Err(ArithError::RankMismatch(total));
        }
        let basis = match supplied {
            Some(b) => {
                if b.len() != SPAN_DIM || self.rank_of(&b)? != SPAN_DIM {
                    return Err(ArithError::NotSpanning);
                }
                let mut all = b.clone();
                all.extend(gens.iter().cloned());
                if self.rank_of(&all)? != SPAN_DIM {
                    return Err(ArithError::NotSpanning);
                }
                b
            }
            None => {
                let mut b: Vec<ScaledNormal> = Vec::new();
                for g in &gens {
                    b.push(g.clone());
                    if self.rank_of(&b)? < b.len() {
                        b.pop();
                    }
                    if b.len() == SPAN_DIM {
                        break;
                    }
                }
                b
            }
        };
        Ok(SpanBasis {
            basis,
            generated: gens.len(),
        })
    }

    /// `Q_ij = ⟨v_i, v_j⟩`, which must be rational.
    pub fn form_matrix(&self, basis: &[ScaledNormal]) -> Result<RationalQuadraticForm, ArithError> {
        let mut m = Vec::with_capacity(basis.len());
        for a in basis {
            let mut row = Vec::with_capacity(basis.len());
            for b in basis {
                let x = self.pairing(a, b);
                row.push(
                    x.as_rational()
                        .ok_or_else(|| ArithError::IrrationalEntry(x.to_string()))?,
                );
            }
            m.push(row);
        }
        RationalQuadraticForm::new(m)
    }
}

/// Canonical representative of `ℚ*·x`: leading coefficient 1.
fn normalize(x: &MultiQuad) -> MultiQuad {
    match x.terms().next() {
        Some((_, q)) => {
            let s = BigRational::one() / q;
            x.scale(&s)
        }
        None => x.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mq(s: &str) -> MultiQuad {
        s.parse().unwrap()
    }

    /// Orthonormal-ish toy: five mutually orthogonal unit vectors of R^{1,4}
    /// chained by a path so the span is everything.
    #[test]
    fn orthonormal_basis_gives_identity_form() {
        let names: Vec<String> = (0..5).map(|i| format!("e{i}")).collect();
        let mut gram = vec![vec![MultiQuad::zero(); 5]; 5];
        for (i, row) in gram.iter_mut().enumerate() {
            row[i] = MultiQuad::one();
        }
        let input = SpanInput {
            names,
            gram,
            coords: None,
        };
        let basis: Vec<_> = (0..5)
            .map(|node| ScaledNormal {
                coef: MultiQuad::one(),
                node,
            })
            .collect();
        let q = input.form_matrix(&basis).unwrap();
        assert_eq!(q.matrix(), &super::super::form::identity(5));
    }

    #[test]
    fn normalization_is_projective() {
        assert_eq!(
            normalize(&mq("3*sqrt(2) + 6")),
            normalize(&mq("sqrt(2) + 2"))
        );
    }
}
