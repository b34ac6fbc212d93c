//! Writes the walls of `P_0.9` to a polytope JSON file and analyzes it through the frontend.

use hypercox::family::{p_polytope, FamilyTime};
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = p_polytope::<f64>(&FamilyTime::new(0.9)?)?;
    let walls: Vec<_> = p
        .names
        .iter()
        .zip(&p.normals)
        .map(|(name, v)| json!({"name": name, "normal": v.vector().0}))
        .collect();
    let dir = std::env::temp_dir().join("hypercox-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("p09.json");
    std::fs::write(&path, serde_json::to_string_pretty(&json!({ "walls": walls }))?)?;
    let args = ["hypercox", "analyze", "--polytope", path.to_str().unwrap()];
    let code = hypercox::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit code {code}");
    Ok(())
}
