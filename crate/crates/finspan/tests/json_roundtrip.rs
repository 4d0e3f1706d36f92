//! Document serialization: emitted documents parse back to equal values,
//! and targeted malformed inputs are rejected with the right error class.

use finspan::corpus;
use finspan::groupoid::discrete;
use finspan::json::{document_to_value, groupoid_to_value, parse_document, Document, JsonError};
use finspan::local_system::LocalSystem;
use finspan::span::duality_spans;
use finspan::tft::{dual_data, DecoratedObject};
use std::path::Path;

fn roundtrip(doc: &Document) -> Document {
    let text = serde_json::to_vec(&document_to_value(doc)).unwrap();
    parse_document(&text, Path::new(".")).expect("serialized documents parse")
}

#[test]
fn groupoid_documents_roundtrip() {
    for g in corpus::groupoid_corpus() {
        match roundtrip(&Document::Groupoid(g.clone())) {
            Document::Groupoid(back) => assert!(*back == *g, "groupoid changed"),
            _ => panic!("kind changed"),
        }
    }
}

#[test]
fn span_and_system_documents_roundtrip() {
    let x = corpus::bz(2);
    let (tr, _) = duality_spans(&x);
    match roundtrip(&Document::Span(tr.clone())) {
        Document::Span(back) => {
            assert!(*back.apex() == *tr.apex());
            assert_eq!(back.left().object_map(), tr.left().object_map());
            assert_eq!(back.right().morphism_map(), tr.right().morphism_map());
        }
        _ => panic!("kind changed"),
    }

    let sys = corpus::standard_rep_s3();
    match roundtrip(&Document::LocalSystem(sys.clone())) {
        Document::LocalSystem(back) => assert!(LocalSystem::equal(&back, &sys)),
        _ => panic!("kind changed"),
    }

    let obj = DecoratedObject::new(corpus::bz(2), corpus::sign_rep_z2()).unwrap();
    match roundtrip(&Document::DecoratedObject(obj.clone())) {
        Document::DecoratedObject(back) => assert!(DecoratedObject::equal(&back, &obj)),
        _ => panic!("kind changed"),
    }
}

#[test]
fn decorated_span_documents_roundtrip() {
    let a = DecoratedObject::new(corpus::bz(2), corpus::sign_rep_z2()).unwrap();
    let dd = dual_data(&a);
    for d in [&dd.ev, &dd.coev] {
        match roundtrip(&Document::DecoratedSpan((*d).clone())) {
            Document::DecoratedSpan(back) => {
                back.validate().unwrap();
                assert!(finspan::local_system::LSMap::components_equal(
                    back.right_dec(),
                    d.right_dec()
                ));
            }
            _ => panic!("kind changed"),
        }
    }
}

#[test]
fn malformed_documents_are_rejected() {
    let dir = Path::new(".");
    // Unknown kind.
    let err = parse_document(br#"{"kind": "mystery"}"#, dir).unwrap_err();
    assert!(matches!(err, JsonError::Parse { .. }));

    // Bad rational.
    let sys = serde_json::json!({
        "kind": "local_system",
        "base": groupoid_to_value(&discrete(1)),
        "dim": [1],
        "action": [[["1/0"]]],
    });
    let err = parse_document(&serde_json::to_vec(&sys).unwrap(), dir).unwrap_err();
    match err {
        JsonError::Parse { path, .. } => assert!(path.contains("action")),
        other => panic!("expected parse error, got {other:?}"),
    }

    // Functor that does not preserve identities.
    let g = groupoid_to_value(&corpus::bz(2));
    let f = serde_json::json!({
        "kind": "functor",
        "domain": g,
        "codomain": g,
        "object_map": [0],
        "morphism_map": [1, 0],
    });
    let err = parse_document(&serde_json::to_vec(&f).unwrap(), dir).unwrap_err();
    assert!(matches!(err, JsonError::Invariant { .. }));

    // Decorated object over the wrong base.
    let obj = serde_json::json!({
        "kind": "decorated_object",
        "space": groupoid_to_value(&discrete(2)),
        "system": {
            "kind": "local_system",
            "base": groupoid_to_value(&discrete(1)),
            "dim": [1],
            "action": [[["1"]]],
        },
    });
    let err = parse_document(&serde_json::to_vec(&obj).unwrap(), dir).unwrap_err();
    assert!(matches!(err, JsonError::Invariant { .. }));
}
