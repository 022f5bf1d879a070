// SPDX-License-Identifier: Apache-2.0

//! Regenerates everything under `fixtures/` at the workspace root.
//! Run after changing the stock graphs, policies, demo configs, or the
//! troubleshooting procedure: `cargo run -p vnfops --example gen_fixtures`.

use std::path::Path;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    std::fs::create_dir_all(&dir).expect("create fixtures dir");
    for (name, contents) in vnfops::fixture_files() {
        let path = dir.join(name);
        std::fs::write(&path, contents).expect("write fixture");
        println!("wrote {}", path.display());
    }
}
