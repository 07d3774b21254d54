//! Value trees survive the JSON mapping.

use proptest::prelude::*;
use sliceable_core::json::{decode_json, encode_json};
use sliceable_core::{Value, ValueTree};

const LONG_RANGE: i64 = 1 << 53;

fn scalar() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<bool>().prop_map(Value::Bool),
        any::<i32>().prop_map(Value::Int),
        (-LONG_RANGE..=LONG_RANGE).prop_map(Value::Long),
        (-1e12f64..1e12).prop_map(Value::Double),
        "[a-zA-Z0-9 \"\\\\\n\u{e9}\u{1F600}]{0,12}".prop_map(Value::Str),
    ]
}

fn tree() -> impl Strategy<Value = ValueTree> {
    let leaf = proptest::option::of(scalar()).prop_map(|root| {
        let mut t = ValueTree::new();
        t.set_root(root);
        t
    });
    leaf.prop_recursive(5, 64, 4, |inner| {
        (
            proptest::option::of(scalar()),
            proptest::collection::vec(
                (
                    "[a-z][a-zA-Z0-9_]{0,6}",
                    proptest::collection::vec(inner, 1..=3),
                ),
                0..4,
            ),
        )
            .prop_map(|(root, children)| {
                let mut t = ValueTree::new();
                t.set_root(root);
                for (name, seq) in children {
                    t.set_children(name, seq);
                }
                t
            })
    })
}

fn depth(t: &ValueTree) -> usize {
    1 + t
        .children()
        .flat_map(|(_, seq)| seq.iter().map(depth))
        .max()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn decode_inverts_encode(t in tree()) {
        prop_assert!(depth(&t) <= 6);
        let bytes = encode_json(&t);
        let back = decode_json(&bytes).unwrap();
        prop_assert_eq!(&back, &t.normalized_for_wire());
        prop_assert_eq!(encode_json(&back), bytes);
    }
}

#[test]
fn root_key_coexists_with_children() {
    let t = ValueTree::leaf(123i64).with_child("name", ValueTree::leaf("A"));
    assert_eq!(encode_json(&t), br#"{"$":123,"name":"A"}"#);
    assert_eq!(decode_json(br#"{"name":"A","$":123}"#).unwrap(), t);
}

#[test]
fn sequences_and_scalars() {
    let t = ValueTree::new()
        .with_child("topics", ValueTree::leaf("a"))
        .with_child("topics", ValueTree::leaf("b"))
        .with_child("x", ValueTree::leaf(1.5));
    assert_eq!(encode_json(&t), br#"{"topics":["a","b"],"x":1.5}"#);
    assert_eq!(decode_json(b"2.0").unwrap(), ValueTree::leaf(2.0));
    assert_eq!(decode_json(b"7").unwrap(), ValueTree::leaf(7i64));
    assert_eq!(decode_json(b"null").unwrap(), ValueTree::new());
    assert!(decode_json(b"[1]").is_err());
    assert!(decode_json(br#"{"$":[1]}"#).is_err());
}
