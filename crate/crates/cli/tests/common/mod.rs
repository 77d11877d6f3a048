#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::Path;

use o4m_cli::{Service, Store};
use onto4mat::model::{builtin_profile_text, load_builtin};
use onto4mat::ontoclean::load_profile;
use onto4mat::sim::SimDefaults;

pub fn service(dir: &Path) -> Service {
    Service::new(load_builtin(), SimDefaults::shipped(), Store::open(dir).unwrap())
        .unwrap()
        .with_profile(load_profile(&builtin_profile_text()).unwrap())
}

pub async fn start(dir: &Path) -> SocketAddr {
    let (addr, _handle) = o4m_cli::server::spawn(service(dir), None, "127.0.0.1:0".parse().unwrap())
        .await
        .unwrap();
    addr
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn cli(store: &Path, args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["o4m".to_string(), "--store".into(), store.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = o4m_cli::dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn mission_id(stdout: &str) -> String {
    stdout
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("mission "))
        .and_then(|l| l.split(':').next())
        .unwrap()
        .to_string()
}

/// Parses an SSE body into (event, data) pairs.
pub fn sse_events(body: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for block in body.split("\n\n") {
        let mut event = None;
        let mut data = String::new();
        for line in block.lines() {
            if let Some(e) = line.strip_prefix("event:") {
                event = Some(e.trim().to_string());
            } else if let Some(d) = line.strip_prefix("data:") {
                data.push_str(d.trim_start());
            }
        }
        if let Some(e) = event {
            out.push((e, data));
        }
    }
    out
}
