mod common;

use std::net::SocketAddr;
use std::sync::OnceLock;
use std::time::Duration;

use proptest::prelude::*;
use reqwest::Client;
use serde_json::{json, Value};
use tokio::runtime::Runtime;

#[derive(Debug, Clone, Copy)]
enum Op {
    Approve,
    Reject,
    Run,
}

struct Http {
    rt: Runtime,
    addr: SocketAddr,
    client: Client,
    _dir: tempfile::TempDir,
}

fn http() -> &'static Http {
    static H: OnceLock<Http> = OnceLock::new();
    H.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let rt = Runtime::new().unwrap();
        let addr = rt.block_on(common::start(dir.path()));
        Http { rt, addr, client: Client::new(), _dir: dir }
    })
}

/// (accepted, status after the operation settles)
type Outcome = (bool, String);

fn http_sequence(ops: &[Op], seed: u64) -> Vec<Outcome> {
    let h = http();
    let base = format!("http://{}", h.addr);
    h.rt.block_on(async {
        let c = &h.client;
        let v: Value = c
            .post(format!("{base}/api/intent"))
            .json(&json!({"intent": "mustering", "goal": [40, 40], "sheep": 3, "seed": seed}))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        let id = v["id"].as_str().unwrap().to_string();
        let mut out = Vec::new();
        for op in ops {
            let (path, body) = match op {
                Op::Approve => ("approve", json!({})),
                Op::Reject => ("reject", json!({})),
                Op::Run => ("run", json!({"frame_interval_ms": 0})),
            };
            let r = c.post(format!("{base}/api/mission/{id}/{path}")).json(&body).send().await.unwrap();
            let ok = r.status().is_success();
            let mut status = String::new();
            for _ in 0..2000 {
                let rec: Value = c.get(format!("{base}/api/mission/{id}")).send().await.unwrap().json().await.unwrap();
                status = rec["plan"]["status"].as_str().unwrap().to_string();
                if status != "running" {
                    break;
                }
                tokio::time::sleep(Duration::from_millis(2)).await;
            }
            out.push((ok, status));
        }
        out
    })
}

fn cli_sequence(ops: &[Op], seed: u64) -> Vec<Outcome> {
    let dir = tempfile::tempdir().unwrap();
    let seed = seed.to_string();
    let (code, stdout, _) = common::cli(
        dir.path(),
        &["resolve", "builtin", "--intent", "mustering", "--goal", "40,40", "--sheep", "3", "--seed", &seed],
    );
    assert_eq!(code, 0);
    let id = common::mission_id(&stdout);
    let store = o4m_cli::Store::open(dir.path()).unwrap();
    ops.iter()
        .map(|op| {
            let cmd = match op {
                Op::Approve => "approve",
                Op::Reject => "reject",
                Op::Run => "run",
            };
            let (_, _, err) = common::cli(dir.path(), &[cmd, &id]);
            let status = store.load(&id).unwrap().status().to_string();
            (!err.contains("error:"), status)
        })
        .collect()
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![Just(Op::Approve), Just(Op::Reject), Just(Op::Run)]
}

fn gate_holds(seq: &[Outcome]) -> bool {
    let mut approved = false;
    seq.iter().all(|(_, s)| {
        approved |= s == "approved";
        approved || !matches!(s.as_str(), "running" | "succeeded" | "failed")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cli_and_http_agree(ops in proptest::collection::vec(op(), 1..6), seed in 0u64..50) {
        let a = cli_sequence(&ops, seed);
        let b = http_sequence(&ops, seed);
        prop_assert!(gate_holds(&a));
        prop_assert!(gate_holds(&b));
        prop_assert_eq!(a, b);
    }
}
