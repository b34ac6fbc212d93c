//! Minkowski products and pairwise wall relations of `P_t` at `t = t1`, exactly.

use hypercox::arith::MultiQuad;
use hypercox::family::{p_polytope, FamilyTime};
use hypercox::lorentz::{minkowski_product, pair_relation, PairKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = p_polytope::<MultiQuad>(&FamilyTime::t1())?;
    for (name, v) in p.names.iter().zip(&p.normals).take(4) {
        let v = v.vector();
        println!("<{name},{name}> = {}", minkowski_product(v, v)?);
    }
    let mut counts = [0usize; 4];
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let r = pair_relation(&p.normals[i], &p.normals[j]);
            counts[match r.kind {
                PairKind::Angle(_) => 0,
                PairKind::Parallel => 1,
                PairKind::Ultraparallel(_) => 2,
                PairKind::Disjoint => 3,
            }] += 1;
        }
    }
    println!("wall pairs: {} intersecting, {} parallel, {} ultraparallel", counts[0], counts[1], counts[2]);
    Ok(())
}
