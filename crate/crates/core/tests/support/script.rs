//! Scripted calls and small programs exercising the runtime.

#![allow(dead_code)]

use sliceable_core::ValueTree;

/// A request-response call: target service, operation, request.
pub type Step = (&'static str, &'static str, ValueTree);

pub fn info(name: &str, lat: f64) -> ValueTree {
    ValueTree::new()
        .with_child("name", ValueTree::leaf(name))
        .with_child("chargingSpeed", ValueTree::leaf("slow"))
        .with_child(
            "geolocation",
            ValueTree::new()
                .with_child("latitude", ValueTree::leaf(lat))
                .with_child("longitude", ValueTree::leaf(1.0)),
        )
}

/// Thirteen calls against the smart-city services, ending in three faults
/// (`ParkingAreaNotFound`, `TypeMismatch`, `UnknownOperation`).
pub fn smart_city() -> Vec<Step> {
    let area = ValueTree::new()
        .with_child("id", ValueTree::leaf(1i64))
        .with_child("info", info("A2", 3.0));
    let search = ValueTree::new()
        .with_child(
            "center",
            ValueTree::new()
                .with_child("latitude", ValueTree::leaf(2.0))
                .with_child("longitude", ValueTree::leaf(1.0)),
        )
        .with_child("radius", ValueTree::leaf(10));
    vec![
        ("CommandSide", "createParkingArea", info("A", 1.5)),
        ("CommandSide", "createParkingArea", info("B", 2.5)),
        ("QuerySide", "getParkingArea", ValueTree::leaf(1i64)),
        ("CommandSide", "updateParkingArea", area),
        ("QuerySide", "getParkingArea", ValueTree::leaf(1i64)),
        ("QuerySide", "searchParkingAreas", search.clone()),
        ("CommandSide", "deleteParkingArea", ValueTree::leaf(2i64)),
        ("QuerySide", "getParkingArea", ValueTree::leaf(2i64)),
        ("CommandSide", "deleteParkingArea", ValueTree::leaf("two")),
        ("EventStore", "history", ValueTree::new()),
        ("QuerySide", "searchParkingAreas", search),
        ("CommandSide", "noSuchOperation", ValueTree::new()),
        ("EventStore", "nextId", ValueTree::new()),
    ]
}

const PROBE_ANCHOR: &str = "\t\t[ createParkingArea( info )( id ) {\n";

/// The fixture with a create handler that faults if a variable set by an
/// earlier activation is still visible.
pub fn with_state_probe(fixture: &str) -> String {
    let probed = fixture.replacen(
        PROBE_ANCHOR,
        &format!(
            "{PROBE_ANCHOR}\t\t\tif( probe == \"set\" ) throw( StateLeak )\n\t\t\tprobe = \"set\"\n"
        ),
        1,
    );
    assert_ne!(probed, fixture, "probe anchor not found");
    probed
}

/// `Sender` sends 1000 numbered one-way messages; `Receiver` faults with
/// `OutOfOrder` unless they arrive in sequence.
pub const FIFO: &str = r#"
type Msg { seq:int }
interface Sink { OneWay: put( Msg ) }
service Receiver( config ) {
	inputPort In { location: config.Receiver.location interfaces: Sink }
	main {
		i = 0
		while( i < 1000 ) {
			put( m )
			if( m.seq != i ) throw( OutOfOrder, i )
			i = i + 1
		}
	}
}
service Sender( config ) {
	outputPort Out { location: config.Receiver.location interfaces: Sink }
	main {
		i = 0
		while( i < 1000 ) {
			put@Out( { seq = i } )
			i = i + 1
		}
	}
}
"#;
