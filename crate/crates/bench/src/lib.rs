//! Inputs shared by the pipeline benchmarks.

use sliceable_core::ValueTree;

/// The smart-city program used as the benchmark workload.
pub const SMART_CITY: &str = include_str!("../../core/fixtures/smart-city.ol");

/// A parking-area search result with `areas` entries, a typical payload.
pub fn search_result(areas: usize) -> ValueTree {
    let mut result = ValueTree::new();
    let entries = (0..areas)
        .map(|i| {
            ValueTree::new()
                .with_child("id", ValueTree::leaf(i as i64))
                .with_child(
                    "info",
                    ValueTree::new()
                        .with_child("name", ValueTree::leaf(format!("area {i}")))
                        .with_child("chargingSpeed", ValueTree::leaf("fast"))
                        .with_child(
                            "geolocation",
                            ValueTree::new()
                                .with_child("latitude", ValueTree::leaf(45.0 + i as f64 / 100.0))
                                .with_child("longitude", ValueTree::leaf(9.5)),
                        ),
                )
        })
        .collect();
    result.set_children("areas", entries);
    result
}
