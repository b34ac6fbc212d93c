//! Rational quadratic forms and congruence diagonalisation.

use num::{BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::factor::square_split;
use super::hilbert::{hasse_invariant, witt_invariant, RamificationSet};
use super::ArithError;

pub type RatMatrix = Vec<Vec<BigRational>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalQuadraticForm {
    m: RatMatrix,
}

/// `basis · Q · basisᵀ = diag(entries)`; rows of `basis` are the new vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    pub entries: Vec<BigRational>,
    pub basis: RatMatrix,
}

impl RationalQuadraticForm {
    pub fn new(m: RatMatrix) -> Result<Self, ArithError> {
        let n = m.len();
        if m.iter().any(|r| r.len() != n) {
            return Err(ArithError::Shape);
        }
        for i in 0..n {
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return Err(ArithError::NotSymmetric);
                }
            }
        }
        Ok(RationalQuadraticForm { m })
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }

    /// `T · Q · Tᵀ`.
    pub fn congruent(&self, t: &RatMatrix) -> RationalQuadraticForm {
        let tq = mat_mul(t, &self.m);
        RationalQuadraticForm {
            m: mat_mul(&tq, &transpose(t)),
        }
    }

    /// Symmetric Gaussian elimination; a zero pivot is repaired by adding a
    /// later basis vector that pairs nontrivially with it.
    pub fn diagonalize(&self) -> Result<Diagonalization, ArithError> {
        let n = self.dim();
        let mut a = self.m.clone();
        let mut t = identity(n);
        for k in 0..n {
            if a[k][k].is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                    swap_basis(&mut a, &mut t, k, j);
                } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                    // e_k ← e_k + e_j gives q(e_k) = 2·b(e_k, e_j) ≠ 0.
                    add_basis(&mut a, &mut t, k, j, &BigRational::one());
                } else {
                    return Err(ArithError::Degenerate);
                }
            }
            let pivot = a[k][k].clone();
            for j in k + 1..n {
                if a[k][j].is_zero() {
                    continue;
                }
                let c = -(&a[k][j] / &pivot);
                add_basis(&mut a, &mut t, j, k, &c);
            }
        }
        Ok(Diagonalization {
            entries: (0..n).map(|i| a[i][i].clone()).collect(),
            basis: t,
        })
    }

    pub fn determinant(&self) -> BigRational {
        match self.diagonalize() {
            Ok(d) => {
                let det_t = determinant(&d.basis);
                let prod = d.entries.iter().fold(BigRational::one(), |acc, x| acc * x);
                prod / (&det_t * &det_t)
            }
            Err(_) => BigRational::zero(),
        }
    }
}

impl Diagonalization {
    /// `T⁻¹ · D · T⁻ᵀ`, which must give back the original form.
    pub fn reconstruct(&self) -> Result<RatMatrix, ArithError> {
        let tinv = inverse(&self.basis)?;
        let n = self.entries.len();
        let mut d = zeros(n);
        for i in 0..n {
            d[i][i] = self.entries[i].clone();
        }
        Ok(mat_mul(&mat_mul(&tinv, &d), &transpose(&tinv)))
    }

    /// Entries reduced to signed squarefree integers (same square classes).
    pub fn squarefree_entries(&self) -> Result<Vec<BigRational>, ArithError> {
        self.entries.iter().map(squarefree_class).collect()
    }
}

/// The signed squarefree integer in the square class of `q ≠ 0`.
pub fn squarefree_class(q: &BigRational) -> Result<BigRational, ArithError> {
    if q.is_zero() {
        return Err(ArithError::Degenerate);
    }
    let n = (q.numer() * q.denom()).abs();
    let (_, d) = square_split(&n)?;
    let d = BigRational::from_integer(d);
    Ok(if q.is_negative() { -d } else { d })
}

/// Commensurability fingerprint of a rational quadratic form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticFormInvariant {
    pub hasse: RamificationSet,
    pub witt: RamificationSet,
    /// Signed squarefree representative of the determinant.
    pub determinant_class: i64,
    /// `(positive, negative)` counts.
    pub signature: (usize, usize),
    pub diagonal: Vec<String>,
}

impl QuadraticFormInvariant {
    pub fn of_form(q: &RationalQuadraticForm) -> Result<Self, ArithError> {
        let d = q.diagonalize()?;
        let entries = d.squarefree_entries()?;
        let det = entries.iter().fold(BigRational::one(), |acc, x| acc * x);
        let det = squarefree_class(&det)?;
        let pos = entries.iter().filter(|x| x.is_positive()).count();
        Ok(QuadraticFormInvariant {
            hasse: hasse_invariant(&entries)?,
            witt: witt_invariant(&entries)?,
            determinant_class: det.to_integer().try_into().map_err(|_| ArithError::Shape)?,
            signature: (pos, entries.len() - pos),
            diagonal: entries.iter().map(|x| x.to_string()).collect(),
        })
    }

    /// Same class in the non-cocompact, field-ℚ setting: equal Hasse sets.
    pub fn commensurable_with(&self, o: &Self) -> bool {
        self.hasse == o.hasse
    }
}

fn swap_basis(a: &mut RatMatrix, t: &mut RatMatrix, i: usize, j: usize) {
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    t.swap(i, j);
}

/// `e_i ← e_i + c·e_j`, applied to the form and to the basis rows.
fn add_basis(a: &mut RatMatrix, t: &mut RatMatrix, i: usize, j: usize, c: &BigRational) {
    let n = a.len();
    for k in 0..n {
        let v = &a[j][k] * c;
        a[i][k] += v;
    }
    for k in 0..n {
        let v = &a[k][j] * c;
        a[k][i] += v;
    }
    for k in 0..n {
        let v = &t[j][k] * c;
        t[i][k] += v;
    }
}

pub fn zeros(n: usize) -> RatMatrix {
    vec![vec![BigRational::zero(); n]; n]
}

pub fn identity(n: usize) -> RatMatrix {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    m
}

pub fn transpose(m: &RatMatrix) -> RatMatrix {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(BigRational::zero(), |acc, (x, br)| acc + x * &br[j])
                })
                .collect()
        })
        .collect()
}

/// Gauss–Jordan inverse over ℚ.
pub fn inverse(m: &RatMatrix) -> Result<RatMatrix, ArithError> {
    let n = m.len();
    let mut a = m.clone();
    let mut inv = identity(n);
    for c in 0..n {
        let p = (c..n)
            .find(|&r| !a[r][c].is_zero())
            .ok_or(ArithError::Degenerate)?;
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c].clone();
        for k in 0..n {
            a[c][k] = &a[c][k] / &piv;
            inv[c][k] = &inv[c][k] / &piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..n {
                    let x = &a[c][k] * &f;
                    a[r][k] -= x;
                    let y = &inv[c][k] * &f;
                    inv[r][k] -= y;
                }
            }
        }
    }
    Ok(inv)
}

pub fn determinant(m: &RatMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let x = &a[c][k] * &f;
                a[r][k] -= x;
            }
        }
    }
    det
}

/// Rank over ℚ of a list of row vectors.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: RatMatrix = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for k in c..cols {
                let x = &a[r][k] * &f;
                a[i][k] -= x;
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn form(rows: &[&[(i64, i64)]]) -> RationalQuadraticForm {
        RationalQuadraticForm::new(
            rows.iter()
                .map(|row| row.iter().map(|&(n, d)| r(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_input_unchanged() {
        let q = form(&[&[(2, 1), (0, 1)], &[(0, 1), (-3, 1)]]);
        let d = q.diagonalize().unwrap();
        assert_eq!(d.entries, vec![r(2, 1), r(-3, 1)]);
        assert_eq!(d.basis, identity(2));
    }

    #[test]
    fn hyperbolic_plane_needs_repair() {
        let q = form(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        let d = q.diagonalize().unwrap();
        assert_eq!(q.congruent(&d.basis).matrix()[0][1], r(0, 1));
        assert_eq!(d.reconstruct().unwrap(), *q.matrix());
        let inv = QuadraticFormInvariant::of_form(&q).unwrap();
        assert_eq!(inv.signature, (1, 1));
        assert_eq!(inv.determinant_class, -1);
    }

    #[test]
    fn degenerate_rejected() {
        let q = form(&[&[(1, 1), (1, 1)], &[(1, 1), (1, 1)]]);
        assert!(matches!(q.diagonalize(), Err(ArithError::Degenerate)));
    }

    #[test]
    fn squarefree_reduction() {
        assert_eq!(squarefree_class(&r(-12, 5)).unwrap(), r(-15, 1));
        assert_eq!(squarefree_class(&r(9, 4)).unwrap(), r(1, 1));
    }

    #[test]
    fn matrix_helpers() {
        let m = vec![vec![r(2, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]];
        assert_eq!(determinant(&m), r(1, 1));
        assert_eq!(mat_mul(&m, &inverse(&m).unwrap()), identity(2));
        assert_eq!(rank(&[vec![r(1, 1), r(2, 1)], vec![r(2, 1), r(4, 1)]]), 1);
    }
}
