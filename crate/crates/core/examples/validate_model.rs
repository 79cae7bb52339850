//! Loading models from TOML and reporting every violated structural rule.
//!
//! Run: `cargo run --example validate_model`

use std::path::Path;

use skelmeas::{load_model, Error};

fn main() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for name in ["tate_triangle.toml", "kodaira_IV.toml", "kodaira_Istar1.toml", "broken.toml"] {
        match load_model(&data.join(name)) {
            Ok(m) => println!("{name}: ok, {} components, {} strata", m.components.len(), m.strata.len()),
            Err(Error::Validation(vs)) => {
                println!("{name}: {} violations", vs.len());
                for v in vs {
                    println!("  {v}");
                }
            }
            Err(e) => println!("{name}: {e}"),
        }
    }
}
