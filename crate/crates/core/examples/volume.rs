//! Volume of `P_t` by the closed form, Schläfli integration and the Poincaré sum,
//! with the Gauss-Bonnet value from the orbifold Euler characteristic at Coxeter times.

use hypercox::coxeter::{enumerate_strata, StrataMode};
use hypercox::family::{p_polytope, FamilyTime};
use hypercox::volume::{closed_form_volume, gauss_bonnet_volume, orbifold_euler_char, poincare_volume, schlafli_volume_curve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let curve = schlafli_volume_curve(&samples)?;
    for pt in &curve.points {
        let t = FamilyTime::new(pt.t)?;
        let p = p_polytope::<f64>(&t)?;
        let s = enumerate_strata(&p, StrataMode::Geometric)?;
        let poincare = poincare_volume(&p, &s).map(|v| format!("{v:.12}")).unwrap_or_else(|e| e.to_string());
        println!("t = {:.1}  closed {:.12}  schlafli {:.12}  poincare {poincare}", pt.t, closed_form_volume(pt.t)?, pt.vol);
    }
    for t in [FamilyTime::one(), FamilyTime::t1(), FamilyTime::tbar()] {
        let p = p_polytope::<f64>(&t)?;
        let chi = orbifold_euler_char(&p, &enumerate_strata(&p, StrataMode::Both)?)?;
        println!("t = {t}: chi = {chi}, (4pi^2/3) chi = {:.12}", gauss_bonnet_volume(chi));
    }
    Ok(())
}
