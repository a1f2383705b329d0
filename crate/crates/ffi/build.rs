use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let out_dir = PathBuf::from(env::var("OUT_DIR").unwrap());

    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let bindings = cbindgen::generate(&crate_dir).expect("cbindgen header generation failed");
    bindings.write_to_file(out_dir.join("spatmux.h"));
    // keep a copy in the repo so bindings can be written without building
    bindings.write_to_file(crate_dir.join("include").join("spatmux.h"));
}
