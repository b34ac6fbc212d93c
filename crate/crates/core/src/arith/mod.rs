//! Exact arithmetic and the commensurability invariants of rational forms.

pub mod factor;
pub mod form;
pub mod hilbert;
pub mod multiquad;
pub mod span;

use thiserror::Error;

use crate::coxeter::{gram_matrix, Polytope};

pub use form::{Diagonalization, QuadraticFormInvariant, RationalQuadraticForm};
pub use hilbert::{
    hasse_invariant, hilbert_symbol, quaternion_ramification, witt_invariant, Place,
    RamificationSet,
};
pub use multiquad::MultiQuad;
pub use span::{ScaledNormal, SpanBasis, SpanInput};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("square root of negative rational {0}")]
    NegativeSqrt(String),
    #[error("integer {0} has a prime factor beyond 64 bits")]
    FactorLimit(String),
    #[error("irrational form entry {0}; the chosen vectors do not span the rational space")]
    IrrationalEntry(String),
    #[error("degenerate form or zero argument")]
    Degenerate,
    #[error("rational span has dimension {0}, expected 5")]
    RankMismatch(usize),
    #[error("supplied basis does not span the rational space")]
    NotSpanning,
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("ramification set of {0} has odd size")]
    OddRamification(String),
    #[error("matrix is not square")]
    Shape,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("geometry: {0}")]
    Geometry(String),
}

/// Full pipeline: span, form, diagonal, Hasse and Witt sets.
#[derive(Clone, Debug)]
pub struct CommensurabilityReport {
    pub basis: Vec<ScaledNormal>,
    pub form: RationalQuadraticForm,
    pub invariant: QuadraticFormInvariant,
}

pub fn commensurability_class(
    input: &SpanInput,
    basis: Option<Vec<ScaledNormal>>,
) -> Result<CommensurabilityReport, ArithError> {
    let span = input.rational_span(basis)?;
    let form = input.form_matrix(&span.basis)?;
    let invariant = QuadraticFormInvariant::of_form(&form)?;
    Ok(CommensurabilityReport {
        basis: span.basis,
        form,
        invariant,
    })
}

/// Exact unit normals of a polytope, with coordinates.
pub fn span_input_of(p: &Polytope<MultiQuad>) -> Result<SpanInput, ArithError> {
    let gram = gram_matrix(p).map_err(|e| ArithError::Geometry(e.to_string()))?;
    let coords =
        p.normals
            .iter()
            .zip(&p.names)
            .map(|(v, n)| {
                v.vector().unit().map(|u| u.0).ok_or_else(|| {
                    ArithError::Geometry(format!("normal {n} has irrational length"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
    Ok(SpanInput {
        names: gram.names,
        gram: gram.entries,
        coords: Some(coords),
    })
}

/// Parses a basis such as `sqrt(5)*H, A, L, M, N` against wall names.
pub fn parse_basis(input: &SpanInput, spec: &str) -> Result<Vec<ScaledNormal>, ArithError> {
    spec.split(',')
        .map(|item| {
            let item = item.trim();
            let (coef, name) = match item.rfind('*') {
                Some(i) if !item[i + 1..].trim_start().starts_with("sqrt") => {
                    (item[..i].parse::<MultiQuad>()?, item[i + 1..].trim())
                }
                _ => (MultiQuad::one(), item),
            };
            let name = name.strip_prefix("e_").unwrap_or(name);
            let node = input
                .node(name)
                .ok_or_else(|| ArithError::Parse(item.to_string()))?;
            Ok(ScaledNormal { coef, node })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{q_polytope, FamilyTime};

    fn hasse_of(t: FamilyTime) -> String {
        let p = q_polytope::<MultiQuad>(&t).unwrap();
        let input = span_input_of(&p).unwrap();
        commensurability_class(&input, None)
            .unwrap()
            .invariant
            .hasse
            .to_string()
    }

    #[test]
    fn quotient_presets() {
        let one = hasse_of(FamilyTime::one());
        let bar = hasse_of(FamilyTime::tbar());
        let t1 = hasse_of(FamilyTime::t1());
        assert_eq!(one, "{}");
        assert_eq!(bar, "{}");
        assert_eq!(t1, "{2,5}");
    }
}
