//! f-vectors of `P_t` across the four combinatorial regimes.

use hypercox::coxeter::{enumerate_strata, finite_volume_check, StrataMode};
use hypercox::family::{p_polytope, FamilyTime};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for s in ["1", "0.9", "t1", "0.75", "t2", "tbar", "0.3"] {
        let t: FamilyTime = s.parse()?;
        let p = p_polytope::<f64>(&t)?;
        let strata = enumerate_strata(&p, StrataMode::Geometric)?;
        let ideal = strata.ideal_vertices().count();
        println!(
            "t = {s:<5} f-vector {:?}  ideal vertices {ideal:>2}  simple {}  {:?}",
            strata.f_vector(),
            strata.is_simple(),
            finite_volume_check(&strata),
        );
    }
    Ok(())
}
