//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::panic;
use std::time::Duration;
use std::time::Instant;

use common::*;
use dla_core::bundle::load_bundle;
use dla_core::catalog::InterpretationDocument;
use dla_core::document;
use dla_core::document::Strictness;
use dla_core::lineage::CaptureInput;
use dla_core::lineage::Edge;
use dla_core::lineage::LineageDocument;
use dla_core::provenance::SubjectKind;
use dla_core::rights::RightEntry;
use dla_core::store::OpenMode;
use dla_core::validation::ValidationReport;
use dla_core::validation::Violation;
use dla_core::AnalysisStore;
use dla_core::Catalog;
use dla_core::LicenseRange;
use dla_core::NodeInterpretation;
use dla_core::Policy;
use dla_core::RightName;
use dla_testkit::gen;
use dla_testkit::oracle;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cell(row: &Value) -> String {
    let obligations: Vec<&str> = row["obligations"].as_array().unwrap().iter().map(|o| o.as_str().unwrap()).collect();
    match (row["permitted"].as_bool().unwrap(), obligations.is_empty()) {
        (false, _) => "No".into(),
        (true, true) => "Yes".into(),
        (true, false) => format!("Yes({})", obligations.join("+")),
    }
}

fn table_reproduction() -> Check {
    let expected = [
        ("cifar-10", ["No", "No", "No"], 3),
        ("imagenet", ["No", "No", "No"], 3),
        ("cityscapes", ["No", "No", "No"], 3),
        ("ffhq", ["Yes(C+D)", "No", "No"], 3),
        ("vggface2", ["Yes(A+E+D)", "No", "No"], 3),
        ("ms-coco", ["No", "No", "No"], 3),
        ("ms-coco-annotations", ["Yes(B+E+D)", "Yes(B)", "Yes(B)"], 0),
    ];
    let start = Instant::now();
    let mut outputs = Vec::new();
    for (name, _, _) in &expected {
        outputs.push(dla(["--format", "json", "assess"]
            .map(Into::into)
            .into_iter()
            .chain([fixture(name).into_os_string()])));
    }
    let elapsed = start.elapsed();

    for ((name, cells, exit), out) in expected.iter().zip(&outputs) {
        ensure(code(out) == *exit, || format!("{name}: exit {} != {exit}: {}", code(out), stderr(out)))?;
        let report = json_stdout(out);
        let rows = report["reports"][0]["table"]["rows"].as_array().unwrap();
        let scenarios: Vec<&str> = rows.iter().map(|r| r["scenario"].as_str().unwrap()).collect();
        ensure(scenarios == ["DD", "RPEAI", "CAI"], || format!("{name}: scenarios {scenarios:?}"))?;
        let got: Vec<String> = rows.iter().map(cell).collect();
        ensure(got == cells, || format!("{name}: {got:?} != {cells:?}"))?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("7 bundles in {} ms", elapsed.as_millis()))
}

fn verified_rights() -> Check {
    let out = dla(["--format".into(), "json".into(), "verify".into(), fixture("cifar-10").into_os_string()]);
    ensure(code(&out) == 0, || format!("exit {}: {}", code(&out), stderr(&out)))?;
    let v = &json_stdout(&out)["reports"][0]["verified"];
    let changed: BTreeSet<&str> = v["changed"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    let flipped = BTreeSet::from(["Tagging", "Distribute", "Rerepresent", "CommercializeOutput", "CommercializeModel"]);
    ensure(changed == flipped, || format!("changed {changed:?}"))?;
    let grant = |r: &str| {
        let scope = if FIXED_RIGHTS[..4].contains(&r) { "standalone_rights" } else { "model_rights" };
        v["rights"][scope][r]["grant"].as_str().unwrap().to_string()
    };
    for r in ["Access", "Benchmark", "Research", "Publish", "InternalUse", "ModelReverseEngineer"] {
        ensure(grant(r) == "granted", || format!("{r} is {}", grant(r)))?;
    }
    for r in &flipped {
        ensure(grant(r) == "denied", || format!("{r} is {}", grant(r)))?;
    }
    let flags: BTreeSet<&str> =
        v["residual_risk_flags"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    ensure(flags.contains("80m-tiny-images") && flags.contains("cydral"), || format!("flags {flags:?}"))?;
    Ok("5 flipped, 6 preserved, 80M and Cydral flagged".into())
}

fn license_ranges() -> Check {
    let out = dla(["--format".into(), "json".into(), "range".into(), fixture("cifar-10").into_os_string()]);
    ensure(code(&out) == 0, || format!("exit {}: {}", code(&out), stderr(&out)))?;
    let rows = json_stdout(&out);
    let rows = rows.as_array().unwrap();
    ensure(rows.len() == 9, || format!("{} rows", rows.len()))?;
    for row in rows {
        let id = row["subject_id"].as_str().unwrap();
        let want = if id == "cifar-10" { (2008, 2009) } else { (2005, 2006) };
        let got = (row["range"]["start_year"].as_i64().unwrap(), row["range"]["end_year"].as_i64().unwrap());
        ensure(got == want, || format!("{id}: {got:?} != {want:?}"))?;
    }
    Ok("CIFAR-10 2008-2009, 80M and 7 sources 2005-2006".into())
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let cases = 1000;
    let mut discrepancies = Vec::new();
    for seed in 0..cases {
        let case = gen::case(&mut gen::rng(seed), 8, 0.3);
        let got = dla_core::verify(&case.graph, &case.interpretations, Policy::default()).map_err(|e| e.to_string())?;
        let want = oracle::verify(&case.graph, &case.interpretations, Policy::default());
        let space: BTreeSet<RightName> = got.right_names().collect();
        if space != want.rights.keys().cloned().collect() {
            discrepancies.push(format!("seed {seed}: right space"));
        }
        for (right, w) in &want.rights {
            let obs: Vec<String> = got.rights.obligations(right).iter().map(|o| o.id.clone()).collect();
            if got.grant(right).is_granted() != w.granted || obs != w.obligations {
                discrepancies.push(format!("seed {seed}: {right}"));
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(discrepancies.is_empty(), || format!("{} discrepancies, first {}", discrepancies.len(), discrepancies[0]))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases} random DAGs, 0 discrepancies, {} ms", elapsed.as_millis()))
}

fn monotonicity() -> Result<(), String> {
    for seed in 0..300u64 {
        let case = gen::case(&mut gen::rng(seed), 7, 0.3);
        let mut rng = gen::rng(seed ^ 0x5eed);
        let before = dla_core::verify(&case.graph, &case.interpretations, Policy::default()).unwrap();
        let parent = case.records.choose(&mut rng).unwrap().subject_id.clone();
        let mut records = case.records.clone();
        records.push(gen::record(&mut rng, "zz-new", SubjectKind::Website));
        let mut edges = case.edges.clone();
        edges.push(Edge::new(parent, "zz-new"));
        let graph = dla_core::build_lineage(records, edges, &case.root).unwrap();
        let mut interps = case.interpretations.clone();
        interps.insert("zz-new".into(), NodeInterpretation::Interpreted(gen::vector(&mut rng, "zz-new")));
        let after = dla_core::verify(&graph, &interps, Policy::default()).unwrap();
        for r in before.right_names() {
            ensure(before.grant(&r).is_granted() || !after.grant(&r).is_granted(), || {
                format!("seed {seed}: {r} upgraded")
            })?;
        }
    }
    Ok(())
}

fn neutrality() -> Result<(), String> {
    for seed in 0..300u64 {
        let case = gen::case(&mut gen::rng(seed), 8, 0.5);
        let before = dla_core::verify(&case.graph, &case.interpretations, Policy::default()).unwrap();
        let space: Vec<RightName> = before.right_names().collect();
        let mut interps = case.interpretations.clone();
        for (id, node) in interps.iter_mut() {
            if *node == NodeInterpretation::Unavailable {
                let mut v = gen::permissive_vector(id);
                for r in &space {
                    v.set(r.clone(), RightEntry::granted(Vec::new()));
                }
                *node = NodeInterpretation::Interpreted(v);
            }
        }
        let after = dla_core::verify(&case.graph, &interps, Policy::default()).unwrap();
        for r in &space {
            ensure(before.grant(r) == after.grant(r), || format!("seed {seed}: {r} changed"))?;
        }
    }
    Ok(())
}

fn cache_transparency() -> Result<(), String> {
    for seed in 0..40u64 {
        let case = gen::case(&mut gen::rng(seed), 8, 0.3);
        let plain = document::to_canonical_string(
            &dla_core::verify(&case.graph, &case.interpretations, Policy::default()).unwrap(),
        );
        let tmp = tempfile::tempdir().unwrap();
        let store = AnalysisStore::open(tmp.path(), OpenMode::ReadWrite).unwrap();
        for expect_hit in [false, true] {
            let got = store.lookup_or_verify(&case.graph, &case.interpretations, Policy::default()).unwrap();
            ensure(got.cache_hit == expect_hit, || format!("seed {seed}: cache_hit {}", got.cache_hit))?;
            ensure(document::to_canonical_string(&got.verified) == plain, || {
                format!("seed {seed}: cached result differs")
            })?;
        }
    }
    // the same through the binary
    let tmp = tempfile::tempdir().unwrap();
    let store = tmp.path().join("store");
    let args = |with_store: bool| {
        let mut a: Vec<std::ffi::OsString> = vec!["--format".into(), "json".into()];
        if with_store {
            a.extend(["--store".into(), store.clone().into_os_string()]);
        }
        a.extend(["assess".into(), fixture("cifar-10").into_os_string(), fixture("ffhq").into_os_string()]);
        a
    };
    let plain = dla(args(false));
    let miss = dla(args(true));
    let hit = dla(args(true));
    ensure(stderr(&hit).contains("store: hit"), || format!("no hit: {}", stderr(&hit)))?;
    ensure(plain.stdout == miss.stdout && miss.stdout == hit.stdout, || "CLI output differs with caching".into())
}

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + Debug>(value: &T) -> Result<(), String> {
    let text = document::to_canonical_string(value);
    let back: T = document::parse(&text, Strictness::Strict).map_err(|e| e.to_string())?.value;
    ensure(&back == value, || format!("value changed: {text}"))?;
    ensure(document::to_canonical_string(&back) == text, || "bytes changed".into())
}

fn serialization_round_trips() -> Result<usize, String> {
    let mut checked = 0;
    let catalog = Catalog::builtin();
    for t in catalog.templates() {
        round_trip(&t.template)?;
        checked += 1;
    }
    for name in ["cifar-10", "imagenet", "cityscapes", "ffhq", "vggface2", "ms-coco", "ms-coco-annotations"] {
        let dir = fixture(name);
        let doc: LineageDocument =
            document::from_str(&std::fs::read_to_string(dir.join("lineage.json")).unwrap()).unwrap();
        round_trip(&doc)?;
        for record in &doc.records {
            round_trip(record)?;
        }
        for entry in std::fs::read_dir(dir.join("interpretations")).unwrap() {
            let doc: InterpretationDocument =
                document::from_str(&std::fs::read_to_string(entry.unwrap().path()).unwrap()).unwrap();
            round_trip(&doc)?;
        }
        let b =
            load_bundle(&dir.join("lineage.json"), &dir.join("interpretations"), &catalog, Strictness::Strict).unwrap();
        for node in b.interpretations.values() {
            if let Some(v) = node.vector() {
                round_trip(v)?;
            }
        }
        let v = dla_core::verify(&b.graph, &b.interpretations, Policy::default()).unwrap();
        round_trip(&v)?;
        round_trip(&v.audit)?;
        round_trip(&v.audit.policy)?;
        let table = dla_core::assess_all(&v, &dla_core::default_scenarios()).unwrap();
        round_trip(&table)?;
        for s in dla_core::default_scenarios() {
            round_trip(&s)?;
        }
        for o in &table.legend {
            round_trip(o)?;
        }
        checked += 1;
    }
    let mut rng = gen::rng(7);
    for _ in 0..200 {
        let range = LicenseRange::ending(rng.gen_range(1990..2030));
        round_trip(&range)?;
        let captures: Vec<CaptureInput> = (0..rng.gen_range(0..4))
            .map(|i| CaptureInput { year: rng.gen_range(1990..2030), url: format!("u{i}"), content: "terms".into() })
            .collect();
        round_trip(&captures)?;
        round_trip(&dla_core::select_capture("s", &captures, range))?;
        let v = gen::vector(&mut rng, "random");
        round_trip(&v)?;
        for r in v.right_names() {
            round_trip(&r)?;
            round_trip(&v.grant(&r))?;
        }
        let mut report = ValidationReport::default();
        report.push(Violation::new("field", "rule", "message"));
        round_trip(&report)?;
        checked += 1;
    }
    let tmp = tempfile::tempdir().unwrap();
    let store = AnalysisStore::open(tmp.path(), OpenMode::ReadWrite).unwrap();
    let case = gen::case(&mut rng, 8, 0.3);
    store.lookup_or_verify(&case.graph, &case.interpretations, Policy::default()).unwrap();
    round_trip(&store.index().unwrap())?;
    Ok(checked + 1)
}

fn permutation_determinism() -> Result<(), String> {
    for seed in 0..300u64 {
        let case = gen::case(&mut gen::rng(seed), 8, 0.3);
        let mut rng = gen::rng(!seed);
        let mut records = case.records.clone();
        let mut edges = case.edges.clone();
        records.shuffle(&mut rng);
        edges.shuffle(&mut rng);
        let graph = dla_core::build_lineage(records, edges, &case.root).unwrap();
        ensure(graph == case.graph, || format!("seed {seed}: graph differs"))?;
        let a = dla_core::verify(&case.graph, &case.interpretations, Policy::default()).unwrap();
        let b = dla_core::verify(&graph, &case.interpretations, Policy::default()).unwrap();
        ensure(document::to_canonical_string(&a) == document::to_canonical_string(&b), || {
            format!("seed {seed}: output differs")
        })?;
    }
    let args = || ["--format".into(), "json".into(), "assess".into(), fixture("cifar-10").into_os_string()];
    let (x, y) = (dla(args()), dla(args()));
    ensure(x.stdout == y.stdout, || "CLI output not byte-identical across runs".into())
}

fn property_suite() -> Check {
    monotonicity().map_err(|e| format!("monotonicity: {e}"))?;
    neutrality().map_err(|e| format!("unavailable-node neutrality: {e}"))?;
    cache_transparency().map_err(|e| format!("cache transparency: {e}"))?;
    let n = serialization_round_trips().map_err(|e| format!("round trip: {e}"))?;
    permutation_determinism().map_err(|e| format!("determinism: {e}"))?;
    Ok(format!("monotonicity, neutrality, cache transparency, {n} round-trip groups, determinism"))
}

fn exit_codes() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let open = tmp.path().join("open");
    let cyclic = tmp.path().join("cyclic");
    let broken = tmp.path().join("broken");
    permissive_bundle(&open);
    cyclic_bundle(&cyclic);
    malformed_vector_bundle(&broken);
    let truncated = tmp.path().join("truncated.json");
    std::fs::write(&truncated, "{\"metadata\": {\"licensor\": ").unwrap();

    let cases: [(&str, Vec<std::ffi::OsString>, i32); 5] = [
        ("CIFAR-10 assess", vec!["assess".into(), fixture("cifar-10").into()], 3),
        ("permissive assess", vec!["assess".into(), open.into()], 0),
        ("cyclic assess", vec!["assess".into(), cyclic.into()], 2),
        ("malformed vector assess", vec!["assess".into(), broken.into()], 1),
        ("truncated validate", vec!["validate".into(), truncated.into()], 64),
    ];
    let mut seen = Vec::new();
    for (label, args, want) in cases {
        let out = dla(args);
        ensure(code(&out) == want, || format!("{label}: exit {} != {want}: {}", code(&out), stderr(&out)))?;
        seen.push(format!("{label}={want}"));
    }
    Ok(seen.join(", "))
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("assessment table reproduction", table_reproduction),
        ("verified CIFAR-10 rights", verified_rights),
        ("license ranges", license_ranges),
        ("oracle equivalence", oracle_equivalence),
        ("property suite", property_suite),
        ("exit-code contract", exit_codes),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
