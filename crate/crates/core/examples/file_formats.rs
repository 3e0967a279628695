//! Writing catalog entries to disk and reading them back through `catalog:` and file references.

use std::path::Path;

use qmonad::catalog::{catalog_get, catalog_list};
use qmonad::io::{load, load_cert, payload_to_json, write_text};
use qmonad::monad::verify_qhom;
use qmonad::translations::EmpiricalModel;

fn main() {
    let dir = std::env::temp_dir().join("qmonad-formats-example");
    std::fs::create_dir_all(&dir).unwrap();
    for (id, kind, _) in catalog_list() {
        let text = payload_to_json(&catalog_get(id).unwrap().payload);
        write_text(&dir.join(format!("{id}.json")), &text).unwrap();
        println!("{id:22} {:17} {:6} bytes", kind.to_string(), text.len());
    }

    let model: EmpiricalModel = load("pr-box.json", &dir).unwrap();
    println!("pr-box from file equals catalog: {}", model == load::<EmpiricalModel>("catalog:pr-box", Path::new(".")).unwrap());

    let cert = load_cert("k3-rotation-cert.json", &dir).unwrap();
    println!("certificate from file verifies: {}", verify_qhom(&cert.cert, 0.0).pass);
}
