//! Generates include/mqte.h from the extern "C" surface.

use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("set by cargo"));
    let header = crate_dir.join("include").join("mqte.h");

    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("MQTE_H".to_string()),
        documentation: true,
        cpp_compat: true,
        ..Default::default()
    };

    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(&header);
        }
        Err(cbindgen::Error::ParseSyntaxError { .. }) => {
            // In-progress source; the next successful build regenerates it.
        }
        Err(err) => panic!("header generation failed: {err}"),
    }

    println!("cargo:rerun-if-changed=src/lib.rs");
}
