//! Acceptance suite: one PASS/FAIL line per criterion on stdout.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use onto4mat::geom::{Paddock, Vec2};
use onto4mat::intent::{decide, resolve_and_brief, Decision, IntentRequest};
use onto4mat::kb::{Axiom, Ontology};
use onto4mat::kbx::{parse, parse_expression, serialize};
use onto4mat::lint::{self, Severity, DIRTY_MANIFEST};
use onto4mat::model::{builtin_profile_text, conformance, load_builtin, BUILTIN_KBX};
use onto4mat::ontoclean::{self, load_profile, DIRTY_META, DIRTY_META_MANIFEST};
use onto4mat::reasoner::{classify, query};
use onto4mat::sim::{self, export_trajectory, Outcome, SimDefaults};
use rand::{Rng, SeedableRng};
use testkit::{random_expression, random_kb, random_rich_kb, ChaCha8Rng, KbShape, Reference};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mustering_request(seed: u64) -> IntentRequest {
    IntentRequest {
        intent_text: "mustering".into(),
        goal: Vec2::new(40.0, 40.0),
        flock_size: 20,
        paddock: Paddock { width: 50.0, height: 50.0 },
        max_steps: 5000,
        seed,
    }
}

fn intent_resolution() -> Check {
    let o = load_builtin();
    let m = classify(&o).map_err(|e| e.to_string())?;
    let (plan, brief) = resolve_and_brief(&m, &mustering_request(7)).map_err(|e| e.to_string())?;
    let linked: BTreeSet<String> = o
        .axioms()
        .iter()
        .filter_map(|a| match a {
            Axiom::PropertyAssertion { subject, relation, object }
                if relation == "taskForAgent" && object == "mustering" =>
            {
                Some(subject.clone())
            }
            _ => None,
        })
        .collect();
    let got: BTreeSet<String> = plan.behaviours.iter().cloned().collect();
    ensure(plan.tactic == "mustering", || format!("tactic {}", plan.tactic))?;
    ensure(got == linked, || format!("behaviours {got:?}, taskForAgent links {linked:?}"))?;
    ensure(got == ["collect", "drive"].map(String::from).into(), || format!("{got:?}"))?;
    ensure(brief.inferred.behaviours == plan.behaviours, || "brief disagrees".into())?;
    Ok(format!("mustering -> {{{}}}", plan.behaviours.join(", ")))
}

fn team_realization() -> Check {
    let o = load_builtin();
    let m = classify(&o).map_err(|e| e.to_string())?;
    ensure(m.is_member("herd", "Team"), || "herd not realized as Team".into())?;
    let members: Vec<String> = m.objects("herd", "teamHasAgent").cloned().collect();
    let team = parse_expression("min(2, teamHasAgent, Agent)").map_err(|e| e.to_string())?;
    let mut trail = Vec::new();
    for keep in (0..=members.len()).rev() {
        let dropped = &members[keep..];
        let axioms = o.axioms().iter().filter(|a| match a {
            Axiom::PropertyAssertion { subject, relation, object } => {
                !(relation == "teamHasAgent" && subject == "herd" && dropped.contains(object)
                    || relation == "agentIsMemberOfTeam" && object == "herd" && dropped.contains(subject))
            }
            _ => true,
        });
        let reduced = Ontology::from_axiom_set(o.iri(), axioms.cloned()).map_err(|e| e.to_string())?;
        let rm = classify(&reduced).map_err(|e| e.to_string())?;
        let agents = rm.objects("herd", "teamHasAgent").filter(|x| rm.is_member(x, "Agent")).count();
        let expected = agents >= 2;
        let realized = rm.is_member("herd", "Team");
        let queried = query(&rm, &team)
            .map_err(|e| e.to_string())?
            .individuals
            .contains(&"herd".to_string());
        ensure(agents == keep, || format!("{agents} members left, expected {keep}"))?;
        ensure(realized == expected && queried == expected, || {
            format!("{keep} members: realized={realized} queried={queried}")
        })?;
        trail.push(format!("{keep}:{}", if realized { "Team" } else { "-" }));
    }
    Ok(trail.join(" "))
}

fn reasoner_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let shape = KbShape { concepts: 8, relations: 5, individuals: 6 };
    let (mut kbs, mut queries) = (0, 0);
    for round in 0..1000 {
        let o = random_kb(&mut rng, shape);
        let m = classify(&o).map_err(|e| format!("kb {round}: {e}"))?;
        let r = Reference::build(&o);
        ensure(m.subsumptions() == &r.subsumption_pairs(), || format!("kb {round}: subsumption"))?;
        let mut got = m.memberships().clone();
        for i in o.individuals().keys() {
            got.entry(i.clone()).or_default();
        }
        ensure(got == r.memberships(), || format!("kb {round}: realization"))?;
        let qshape = KbShape {
            concepts: r.concepts.len(),
            relations: o.relations().len().max(1),
            individuals: r.individuals.len(),
        };
        for _ in 0..3 {
            let e = random_expression(&mut rng, qshape, 3);
            if o.check_expression(&e).is_err() {
                continue;
            }
            let q = query(&m, &e).map_err(|e| e.to_string())?;
            ensure(q.individuals == r.query(&e), || format!("kb {round}: query {e}"))?;
            queries += 1;
        }
        kbs += 1;
    }
    Ok(format!("{kbs} KBs, {queries} queries agree"))
}

fn lint_fixture() -> Check {
    let report = lint::scan_fixture_dirty().map_err(|e| e.to_string())?;
    let manifest: BTreeSet<(String, String)> = DIRTY_MANIFEST
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut w = l.split_whitespace();
            (w.next().unwrap_or_default().to_string(), w.next().unwrap_or_default().to_string())
        })
        .collect();
    let found: BTreeSet<(String, String)> = report
        .findings
        .iter()
        .map(|f| (f.code.to_string(), f.subject.clone()))
        .collect();
    ensure(found == manifest && report.total == manifest.len(), || {
        format!("found {found:?}, manifest {manifest:?}")
    })?;
    let severity = |code: &str| match code {
        "P19" => Severity::Critical,
        "P11" | "P41" => Severity::Important,
        _ => Severity::Minor,
    };
    for f in &report.findings {
        ensure(f.severity == severity(&f.code.to_string()), || format!("{} severity", f.code))?;
    }
    let codes: BTreeSet<String> = found.iter().map(|(c, _)| c.clone()).collect();
    ensure(codes.len() == 7, || format!("codes {codes:?}"))?;
    let shipped = lint::scan(&load_builtin()).map_err(|e| e.to_string())?;
    ensure(shipped.total == 0, || shipped.to_text())?;
    Ok(format!("dirty {} findings in 7 codes, shipped 0", report.total))
}

fn ontoclean_fixture() -> Check {
    let m = classify(&load_builtin()).map_err(|e| e.to_string())?;
    let mut profile = load_profile(DIRTY_META).map_err(|e| e.to_string())?;
    let found: BTreeSet<String> = ontoclean::check(&m, &profile)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|v| format!("{} {} {}", v.rule.as_str(), v.parent, v.child))
        .collect();
    let expected: BTreeSet<String> = DIRTY_META_MANIFEST
        .lines()
        .filter_map(|l| l.strip_prefix("violation "))
        .map(|l| l.trim().to_string())
        .collect();
    ensure(expected.len() == 14, || format!("manifest lists {}", expected.len()))?;
    let missed = expected.difference(&found).count();
    let false_pos = found.difference(&expected).count();
    ensure(missed == 0 && false_pos == 0, || format!("missed {missed}, false positives {false_pos}"))?;
    let rigidity = found.iter().filter(|v| v.starts_with("RIG ")).count();
    ensure(rigidity * 2 > found.len(), || format!("rigidity {rigidity}"))?;
    let fixes: Vec<&str> = DIRTY_META_MANIFEST.lines().filter_map(|l| l.strip_prefix("fix ")).collect();
    profile.reassign(&load_profile(&fixes.join("\n")).map_err(|e| e.to_string())?);
    let after = ontoclean::check(&m, &profile).map_err(|e| e.to_string())?;
    ensure(after.is_empty(), || format!("{} left after reassignment", after.len()))?;
    let shipped = load_profile(&builtin_profile_text()).map_err(|e| e.to_string())?;
    ensure(ontoclean::check(&m, &shipped).map_err(|e| e.to_string())?.is_empty(), || {
        "shipped profile has violations".into()
    })?;
    Ok(format!("{} detected ({rigidity} rigidity), 0 false positives, 0 after reassignment", found.len()))
}

fn parser_round_trip() -> Check {
    let shipped = load_builtin();
    let text = serialize(&shipped);
    ensure(text == BUILTIN_KBX, || "shipped file is not canonical".into())?;
    let back = parse(BUILTIN_KBX).map_err(|e| e.to_string())?;
    ensure(back == shipped && serialize(&back) == BUILTIN_KBX, || "shipped round trip".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..100 {
        let o = random_rich_kb(&mut rng, KbShape::default());
        let t = serialize(&o);
        let p = parse(&t).map_err(|e| format!("random {i}: {e}"))?;
        ensure(p == o, || format!("random {i}: parse(serialize(o)) != o"))?;
        ensure(serialize(&p) == t, || format!("random {i}: serialize not a fixpoint"))?;
    }
    Ok("shipped + 100 random ontologies".into())
}

fn simulation() -> Check {
    let m = classify(&load_builtin()).map_err(|e| e.to_string())?;
    let defaults = SimDefaults::shipped();
    let mut succeeded = 0;
    let mut steps = Vec::new();
    for seed in 0..20 {
        let (plan, _) = resolve_and_brief(&m, &mustering_request(seed)).map_err(|e| e.to_string())?;
        let plan = decide(&plan, Decision::Approve).map_err(|e| e.to_string())?;
        let (cfg, s0) = sim::init(&plan, &defaults).map_err(|e| e.to_string())?;
        let (end, frames) = sim::run_from(s0.clone(), &cfg).map_err(|e| e.to_string())?;
        let v = testkit::frame_violations(&cfg, &s0, &frames);
        ensure(v.is_empty(), || format!("seed {seed}: {}", v.join("; ")))?;
        let (_, again) = sim::run(&plan, &defaults).map_err(|e| e.to_string())?;
        ensure(export_trajectory(&frames) == export_trajectory(&again), || {
            format!("seed {seed}: exports differ")
        })?;
        if end.outcome == Outcome::Succeeded && end.t <= 5000 {
            succeeded += 1;
            steps.push(end.t);
        }
    }
    ensure(succeeded * 100 >= 80 * 20, || format!("{succeeded}/20 succeeded"))?;
    steps.sort();
    let median = steps.get(steps.len() / 2).copied().unwrap_or(0);
    Ok(format!("{succeeded}/20 succeeded (median {median} steps), invariants hold, exports identical"))
}

fn gate_soundness() -> Check {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let http_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let addr = rt.block_on(common::start(http_dir.path()));
    let base = format!("http://{addr}");
    let client = reqwest::Client::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ops = ["approve", "reject", "run"];
    let mut transitions = 0;
    for case in 0..30 {
        let seq: Vec<&str> = (0..rng.random_range(1..6)).map(|_| ops[rng.random_range(0..3)]).collect();
        let seed = rng.random_range(0..100u64).to_string();

        let cli_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let (code, out, err) = common::cli(
            cli_dir.path(),
            &["resolve", "builtin", "--intent", "mustering", "--goal", "40,40", "--sheep", "3", "--seed", &seed],
        );
        ensure(code == 0, || err.clone())?;
        let cli_id = common::mission_id(&out);
        let store = o4m_cli::Store::open(cli_dir.path()).map_err(|e| e.to_string())?;

        let http_id: String = rt.block_on(async {
            let v: serde_json::Value = client
                .post(format!("{base}/api/intent"))
                .json(&serde_json::json!({"intent": "mustering", "goal": [40, 40], "sheep": 3, "seed": seed.parse::<u64>().unwrap()}))
                .send()
                .await
                .unwrap()
                .json()
                .await
                .unwrap();
            v["id"].as_str().unwrap().to_string()
        });

        let (mut cli_approved, mut http_approved) = (false, false);
        for op in &seq {
            let (_, _, err) = common::cli(cli_dir.path(), &[op, &cli_id]);
            let cli_ok = !err.contains("error:");
            let cli_status = store.load(&cli_id).map_err(|e| e.to_string())?.status().to_string();

            let (http_ok, http_status) = rt.block_on(async {
                let r = client
                    .post(format!("{base}/api/mission/{http_id}/{op}"))
                    .json(&serde_json::json!({"frame_interval_ms": 0}))
                    .send()
                    .await
                    .unwrap();
                let ok = r.status().is_success();
                let deadline = Instant::now() + Duration::from_secs(5);
                loop {
                    let rec: serde_json::Value = client
                        .get(format!("{base}/api/mission/{http_id}"))
                        .send()
                        .await
                        .unwrap()
                        .json()
                        .await
                        .unwrap();
                    let s = rec["plan"]["status"].as_str().unwrap().to_string();
                    if s != "running" || Instant::now() > deadline {
                        return (ok, s);
                    }
                    tokio::time::sleep(Duration::from_millis(2)).await;
                }
            });
            for (approved, status) in [(&mut cli_approved, &cli_status), (&mut http_approved, &http_status)] {
                *approved |= status == "approved";
                let ran = matches!(status.as_str(), "running" | "succeeded" | "failed");
                ensure(!ran || *approved, || format!("case {case}: {status} without approval"))?;
            }
            ensure(cli_ok == http_ok && cli_status == http_status, || {
                format!("case {case} {op}: cli ({cli_ok}, {cli_status}) http ({http_ok}, {http_status})")
            })?;
            transitions += 1;
        }
    }
    Ok(format!("30 sequences, {transitions} operations, 0 violations, CLI/HTTP agree"))
}

fn conformance_report() -> Check {
    let o = load_builtin();
    let r = conformance(&o);
    let target: Vec<u64> = r.target.fields().iter().map(|(_, v)| *v).collect();
    ensure(target == [1060, 562, 167, 57, 16, 18, 231, 30], || format!("target {target:?}"))?;
    let shipped = o.metrics();
    ensure(r.shipped == shipped, || "shipped column".into())?;
    for (((name, s), (_, t)), (_, d)) in shipped.fields().iter().zip(r.target.fields()).zip(r.divergence.fields()) {
        ensure(d == *s as i64 - t as i64, || format!("{name} divergence"))?;
    }
    let text = r.to_text();
    ensure(text.contains("1060") && text.lines().count() == 9, || text.clone())?;
    Ok(format!(
        "target emitted; shipped classes {} vs 167 (reported, not matched)",
        shipped.class_count
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        ("intent resolution", intent_resolution, Duration::from_secs(1)),
        ("team realization", team_realization, Duration::from_secs(1)),
        ("reasoner oracle equivalence", reasoner_oracle, Duration::from_secs(60)),
        ("lint fixture", lint_fixture, Duration::from_secs(1)),
        ("ontoclean fixture", ontoclean_fixture, Duration::from_secs(1)),
        ("parser round trip", parser_round_trip, Duration::from_secs(10)),
        ("simulation properties", simulation, Duration::from_secs(60)),
        ("gate soundness and parity", gate_soundness, Duration::from_secs(10)),
        ("conformance report", conformance_report, Duration::from_secs(3600)),
    ];
    let mut failed = Vec::new();
    let mut stdout = std::io::stdout();
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let elapsed = started.elapsed();
        let result = match result {
            Ok(msg) if elapsed > limit => Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        let line = match &result {
            Ok(msg) => format!("criterion {}: PASS {name} ({elapsed:.2?}): {msg}", i + 1),
            Err(msg) => format!("criterion {}: FAIL {name} ({elapsed:.2?}): {msg}", i + 1),
        };
        writeln!(stdout, "{line}").unwrap();
        if result.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
