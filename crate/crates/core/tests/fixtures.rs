//! The shipped fixture bundles, end to end through the library.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use dla_core::assess;
use dla_core::assess_all;
use dla_core::bundle::collect_evidence;
use dla_core::bundle::load_bundle;
use dla_core::bundle::Bundle;
use dla_core::default_scenarios;
use dla_core::diff_rights;
use dla_core::lineage::CaptureStatus;
use dla_core::rights::ModelRight;
use dla_core::rights::StandaloneRight;
use dla_core::verify;
use dla_core::Catalog;
use dla_core::Policy;
use dla_core::RightName;
use dla_core::Strictness;
use dla_testkit::fixtures_dir;

fn load(name: &str) -> Bundle {
    let dir = fixtures_dir().join(name);
    load_bundle(&dir.join("lineage.json"), &dir.join("interpretations"), &Catalog::builtin(), Strictness::Strict)
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn cells(name: &str) -> Vec<String> {
    let b = load(name);
    let v = verify(&b.graph, &b.interpretations, Policy::default()).unwrap();
    assess_all(&v, &default_scenarios()).unwrap().rows.iter().map(|r| r.cell()).collect()
}

#[test]
fn assessment_table_for_every_bundle() {
    let expected: BTreeMap<&str, [&str; 3]> = BTreeMap::from([
        ("cifar-10", ["No", "No", "No"]),
        ("imagenet", ["No", "No", "No"]),
        ("cityscapes", ["No", "No", "No"]),
        ("ffhq", ["Yes(C+D)", "No", "No"]),
        ("vggface2", ["Yes(A+E+D)", "No", "No"]),
        ("ms-coco", ["No", "No", "No"]),
        ("ms-coco-annotations", ["Yes(B+E+D)", "Yes(B)", "Yes(B)"]),
    ]);
    for (name, want) in expected {
        assert_eq!(cells(name), want, "{name}");
    }
}

#[test]
fn cifar_verified_rights() {
    let b = load("cifar-10");
    let v = verify(&b.graph, &b.interpretations, Policy::default()).unwrap();
    let flipped: BTreeSet<RightName> = [
        StandaloneRight::Tagging.into(),
        StandaloneRight::Distribute.into(),
        StandaloneRight::Rerepresent.into(),
        ModelRight::CommercializeOutput.into(),
        ModelRight::CommercializeModel.into(),
    ]
    .into();
    assert_eq!(v.changed, flipped);
    let own = b.interpretations["cifar-10"].vector().unwrap();
    assert_eq!(diff_rights(own, &v).unwrap(), flipped);
    for r in RightName::fixed().filter(|r| !flipped.contains(r)) {
        assert!(v.grant(&r).is_granted(), "{r}");
        assert_eq!(v.rights.obligations(&r)[0].id, "cite-cifar10");
    }
    assert!(v.residual_risk_flags.contains(&"80m-tiny-images".to_string()));
    assert!(v.residual_risk_flags.contains(&"cydral".to_string()));

    let rpeai = assess(&v, &default_scenarios()[1]).unwrap();
    assert!(!rpeai.permitted);
    assert_eq!(rpeai.blocking_rights[0].right, ModelRight::CommercializeModel.into());
}

#[test]
fn cifar_ranges_and_captures() {
    let b = load("cifar-10");
    let evidence = collect_evidence(&b.graph, Some(&fixtures_dir().join("cifar-10/captures"))).unwrap();
    let by_id: BTreeMap<&str, _> = evidence.iter().map(|e| (e.subject_id.as_str(), e)).collect();
    assert_eq!(by_id.len(), 9);
    assert_eq!(by_id["cifar-10"].range.unwrap().to_string(), "2008-2009");
    for (id, e) in &by_id {
        if *id != "cifar-10" {
            assert_eq!(e.range.unwrap().to_string(), "2005-2006", "{id}");
        }
    }
    let status = |id: &str| by_id[id].capture.as_ref().unwrap().status;
    for id in ["ask", "webshots"] {
        assert_eq!(status(id), CaptureStatus::OutOfRangeFallback, "{id}");
    }
    for id in ["80m-tiny-images", "cydral"] {
        assert_eq!(status(id), CaptureStatus::Unavailable, "{id}");
        assert!(by_id[id].capture.as_ref().unwrap().content.is_none());
    }
    for id in ["google", "flickr", "altavista", "picsearch"] {
        assert_eq!(status(id), CaptureStatus::InRange, "{id}");
    }
}

#[test]
fn single_node_bundle_keeps_its_own_license() {
    let b = load("cityscapes");
    assert!(b.graph.edges().is_empty());
    let v = verify(&b.graph, &b.interpretations, Policy::default()).unwrap();
    assert!(v.changed.is_empty());
    let own = b.interpretations["cityscapes"].vector().unwrap();
    for r in RightName::fixed() {
        assert_eq!(v.grant(&r).is_granted(), own.grant(&r).is_granted());
        assert_eq!(v.rights.obligations(&r), own.obligations(&r));
    }
}

#[test]
fn template_bundles_record_template_digests() {
    let catalog = Catalog::builtin();
    for (name, id) in [("ffhq", "CC-BY-NC-SA-4.0"), ("vggface2", "CC-BY-NC-4.0"), ("ms-coco", "CC-BY-4.0")] {
        let b = load(name);
        assert_eq!(b.templates.len(), 1);
        let t = &b.templates[0];
        assert_eq!(t.license_id, id);
        assert_eq!(t.digest, catalog.lookup_template(id, "4.0").unwrap().digest);
    }
}
