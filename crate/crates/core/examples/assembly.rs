//! Singular surfaces, cusps and Euler characteristics of the W, N and M assemblies.

use std::collections::BTreeMap;

use hypercox::assembly::{assembly_report, m_complex, n_complex, w_complex};
use hypercox::family::{angle_phi, angle_theta, FamilyTime};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = FamilyTime::new(0.9)?;
    let (theta, phi) = (angle_theta(t.t)?, angle_phi(t.t)?);
    println!("t = 0.9: theta = {theta:.6}, phi = {phi:.6}");
    for (name, complex) in [("W", w_complex(&t)?), ("N", n_complex(&t)?), ("M", m_complex(&t)?)] {
        let r = assembly_report(&complex)?;
        println!("{name}: {} copies, {} singular face cycles", r.copies.len(), r.singular_cycles.len());
        // (angle, chi, cone points, orientable) -> count
        let mut kinds: BTreeMap<(String, i64, usize, bool), usize> = BTreeMap::new();
        for s in &r.surfaces {
            let key = (format!("{:.6}", s.cone_angle), s.euler_char, s.cone_points.len(), s.orientable);
            *kinds.entry(key).or_default() += 1;
        }
        for ((angle, chi, cones, orientable), n) in kinds {
            println!("  {n:>2} x surface at angle {angle}: chi {chi}, {cones} cone points, orientable {orientable}");
        }
        let lengths: Vec<usize> = r.cusps.iter().map(|c| c.length).collect();
        println!("  cusp lengths {lengths:?}");
        println!("  cell Euler characteristic {}", r.cell_euler_char);
    }
    Ok(())
}
