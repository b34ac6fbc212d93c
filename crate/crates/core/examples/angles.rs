//! The dihedral angles θ, φ, ψ, η at the distinguished times, evaluated from `t²`
//! so that `t1² = 3/5` and `t2² = 1/2` are exact.

use hypercox::family::{angle_psi, eta_of_square, phi_of_square, theta_of_square};

fn main() {
    println!("{:>10} {:>14} {:>14} {:>14} {:>14}", "t^2", "theta", "phi", "psi", "eta");
    for (label, s) in [("1", 1.0), ("0.81", 0.81), ("3/5", 0.6), ("0.5625", 0.5625), ("1/2", 0.5), ("1/3", 1.0 / 3.0), ("1/25", 0.04)] {
        let phi = if s >= 0.6 { format!("{:.10}", phi_of_square(s)) } else { "-".into() };
        let psi = angle_psi(f64::sqrt(s)).map(|x| format!("{x:.10}")).unwrap_or_else(|_| "-".into());
        let eta = if s <= 0.5 { format!("{:.10}", eta_of_square(s)) } else { "-".into() };
        println!("{label:>10} {:>14.10} {phi:>14} {psi:>14} {eta:>14}", theta_of_square(s));
    }
}
