//! Regenerates the bundled instance files.
//!
//! Usage: `cargo run -p transportq --example gen_instances -- instances/`

use transportq::instances::{FlpInstance, Instance, TspInstance, VrpInstance};

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "instances".into());
    std::fs::create_dir_all(&dir).unwrap();
    let files = [
        ("tsp_5.json", Instance::Tsp(TspInstance::random_grid(5, 1))),
        // vrp_4 is the CLI's built-in default instance.
        ("vrp_4.json", Instance::Vrp(VrpInstance::random_grid(4, 2, 2026))),
        ("vrp_5.json", Instance::Vrp(VrpInstance::random_grid(5, 2, 7))),
        ("flp_5x2.json", Instance::Flp(FlpInstance::random_grid(5, 2, 3))),
    ];
    for (name, inst) in files {
        let path = std::path::Path::new(&dir).join(name);
        std::fs::write(&path, serde_json::to_string_pretty(&inst).unwrap()).unwrap();
        println!("wrote {}", path.display());
    }
}
