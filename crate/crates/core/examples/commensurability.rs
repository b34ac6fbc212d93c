//! Hasse and Witt invariants of the quotients `Q_t`, plus a few Hilbert symbols.

use hypercox::arith::{commensurability_class, hilbert_symbol, span_input_of, MultiQuad, Place};
use hypercox::family::{q_polytope, FamilyTime};
use num::BigRational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for t in [FamilyTime::one(), FamilyTime::t1(), FamilyTime::tbar()] {
        let input = span_input_of(&q_polytope::<MultiQuad>(&t)?)?;
        let r = commensurability_class(&input, None)?;
        let basis: Vec<String> = r.basis.iter().map(|v| format!("({})*{}", v.coef, input.names[v.node])).collect();
        println!("Q@{t}: basis {}", basis.join(", "));
        println!("  diagonal {:?}", r.invariant.diagonal);
        println!("  hasse {}  witt {}", r.invariant.hasse, r.invariant.witt);
    }
    let q = |n: i64| BigRational::from_integer(n.into());
    for (a, b) in [(-1, -1), (2, 5), (-3, 5)] {
        let at = |p| hilbert_symbol(&q(a), &q(b), p);
        println!("({a},{b}): at 2 {}, at 5 {}, at inf {}", at(Place::Prime(2))?, at(Place::Prime(5))?, at(Place::Infinity)?);
    }
    Ok(())
}
