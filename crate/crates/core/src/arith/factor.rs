//! Integer factorisation for squarefree classes and Hilbert-symbol places.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use super::ArithError;

/// Prime factorisation of `|n|`, `n != 0`; every prime must fit in `u128`.
pub fn factorize(n: &BigInt) -> Result<Vec<(u128, u32)>, ArithError> {
    let m = n.abs().to_biguint().ok_or(ArithError::Degenerate)?;
    if m.is_zero() {
        return Err(ArithError::Degenerate);
    }
    num_prime::nt_funcs::factorize(m)
        .into_iter()
        .map(|(p, e)| {
            Ok((
                p.to_u128()
                    .ok_or_else(|| ArithError::FactorLimit(n.to_string()))?,
                e as u32,
            ))
        })
        .collect()
}

/// Writes `n > 0` as `s² · d` with `d` squarefree; returns `(s, d)`.
pub fn square_split(n: &BigInt) -> Result<(BigInt, BigInt), ArithError> {
    let mut s = BigInt::one();
    let mut d = BigInt::one();
    for (p, e) in factorize(n)? {
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            d *= p;
        }
    }
    Ok((s, d))
}

/// Smallest prime factor of a squarefree `d > 1`.
pub fn least_prime(d: u64) -> u64 {
    let mut p = 2;
    while p * p <= d {
        if d % p == 0 {
            return p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    d
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
