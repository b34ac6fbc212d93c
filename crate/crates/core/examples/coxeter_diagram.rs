//! Gram matrix, Coxeter diagram and vertex stabilisers of the quotient `Q_1`.

use hypercox::coxeter::{build_diagram, enumerate_strata, gram_matrix, subset_group_order, StrataMode};
use hypercox::family::{q_polytope, FamilyTime};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = q_polytope::<f64>(&FamilyTime::one())?;
    let d = build_diagram(&gram_matrix(&q)?);
    println!("walls: {}", q.names.join(" "));
    for (i, j, label) in d.edges() {
        println!("  {} - {}: {label:?}", q.names[i], q.names[j]);
    }
    let s = enumerate_strata(&q, StrataMode::Both)?;
    println!("f-vector {:?}", s.f_vector());
    for (_, v) in s.finite_vertices() {
        println!("  vertex {:<16} |stabiliser| = {}", s.wall_names(&v.walls).join(","), subset_group_order(&d, &v.walls)?);
    }
    for (_, v) in s.ideal_vertices() {
        println!("  ideal  {}", s.wall_names(&v.walls).join(","));
    }
    Ok(())
}
