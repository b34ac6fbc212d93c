//! CSV of θ, φ and Vol(P_t) on a grid, computed in parallel.

use hypercox::cli::{sweep, SweepMethod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curve = sweep(0.05, 1.0, 20, SweepMethod::Schlafli, 4).map_err(|e| e.to_string())?;
    print!("{}", curve.to_csv());
    Ok(())
}
