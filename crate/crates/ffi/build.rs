use std::env;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    cbindgen::generate(&dir)
        .expect("unable to generate bindings")
        .write_to_file(format!("{dir}/include/omniscope.h"));
}
