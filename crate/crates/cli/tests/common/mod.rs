#![allow(dead_code)]

use std::path::PathBuf;

pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn enet(args: &[&str]) -> Output {
    std::env::set_var("ENET_COLOR", "never");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = enet_cli::run(std::iter::once("enet").chain(args.iter().copied()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

pub fn en_def_file() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/resources/EN_Def.enet")
        .display()
        .to_string()
}
