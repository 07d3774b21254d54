//! The smart-city DSL listings with the syntax trees they must parse to.

#![allow(dead_code)]

use sliceable_core::syntax::*;

pub const SKELETON: &str = "service QuerySide( config ) { ... }
service CommandSide( config ) { ... }
service EventStore( config ) { ... }
";

pub const TYPES: &str = "type PAID:long // Parking Area IDentifier
type ParkingArea {
	id:PAID
	info:ParkingAreaInformation
}
type ParkingAreaInformation {
	name:string
	availability*:TimePeriod
	chargingSpeed:ChargingSpeed
	geolocation:Location
}
";

pub const INTERFACE: &str = "interface CommandSideInterface {
RequestResponse:
 createParkingArea( ParkingAreaInformation )( PAID ),
 updateParkingArea( ParkingArea )( string ),
 deleteParkingArea( PAID )( string )
}
";

pub const COMMAND_SIDE: &str = "/* ... data types and API definitions ... */
service CommandSide( config:Configuration ) {
	execution: concurrent
	inputPort InputCommands {
		location: config.CommandSide.location
		protocol: http { format = \"json\" }
		interfaces: CommandSideInterface
	}
	outputPort EventStore {
		location: config.EventStore.location
		protocol: http { format = \"json\" }
		interfaces: EventStoreInterface
	}
	main { /* business logic implementation */ }
}
";

pub const TEST_SNIPPET: &str = "subscribe@EventStore( {
	location = testLocation
	topics[0] = \"PA_DELETED\"
} )( res )
deleteParkingArea@CommandSide( 123L )()
notify( event )
if( event.type != \"PA_DELETED\" || event.id != 123L )
	throw( AssertionFailed )
";

pub struct Listing {
    pub name: &'static str,
    pub text: String,
    pub expected: Vec<Declaration>,
}

/// Every listing, the test snippet wrapped as the body of a service.
pub fn all() -> Vec<Listing> {
    vec![
        Listing {
            name: "service skeleton",
            text: SKELETON.into(),
            expected: vec![
                elided("QuerySide"),
                elided("CommandSide"),
                elided("EventStore"),
            ],
        },
        Listing {
            name: "data types",
            text: TYPES.into(),
            expected: types(),
        },
        Listing {
            name: "interface",
            text: INTERFACE.into(),
            expected: vec![interface()],
        },
        Listing {
            name: "CommandSide service",
            text: COMMAND_SIDE.into(),
            expected: vec![command_side()],
        },
        Listing {
            name: "integration test",
            text: format!("service TestClient( config ) {{\n\tmain {{\n{TEST_SNIPPET}\t}}\n}}\n"),
            expected: vec![test_client()],
        },
    ]
}

pub fn id(name: &str) -> Ident {
    Ident::new(name, Span::default())
}

pub fn path(dotted: &str) -> Path {
    Path {
        steps: dotted
            .split('.')
            .map(|s| PathStep {
                name: s.to_string(),
                index: None,
            })
            .collect(),
        span: Span::default(),
    }
}

fn field(name: &str, cardinality: Cardinality, ty: TypeRef) -> FieldDecl {
    FieldDecl {
        name: id(name),
        cardinality,
        ty,
    }
}

fn named(name: &str) -> TypeRef {
    TypeRef::Named(id(name))
}

fn stmt(kind: StmtKind) -> Stmt {
    Stmt {
        kind,
        span: Span::default(),
    }
}

fn str_lit(s: &str) -> Expr {
    Expr::Literal(Literal::Str(s.to_string()))
}

fn untyped_config() -> Option<ConfigParam> {
    Some(ConfigParam {
        name: id("config"),
        ty: None,
    })
}

fn elided(name: &str) -> Declaration {
    Declaration::Service(ServiceDecl {
        name: id(name),
        config: untyped_config(),
        execution: None,
        input_ports: vec![],
        output_ports: vec![],
        elided: true,
        main: None,
    })
}

fn types() -> Vec<Declaration> {
    use Cardinality::*;
    vec![
        Declaration::Type(TypeDecl {
            name: id("PAID"),
            root: BasicType::Long,
            fields: vec![],
        }),
        Declaration::Type(TypeDecl {
            name: id("ParkingArea"),
            root: BasicType::Void,
            fields: vec![
                field("id", One, named("PAID")),
                field("info", One, named("ParkingAreaInformation")),
            ],
        }),
        Declaration::Type(TypeDecl {
            name: id("ParkingAreaInformation"),
            root: BasicType::Void,
            fields: vec![
                field("name", One, TypeRef::Basic(BasicType::String)),
                field("availability", Many, named("TimePeriod")),
                field("chargingSpeed", One, named("ChargingSpeed")),
                field("geolocation", One, named("Location")),
            ],
        }),
    ]
}

fn interface() -> Declaration {
    let rr = |name: &str, req: TypeRef, res: TypeRef| RequestResponseOp {
        name: id(name),
        request: req,
        response: res,
    };
    let string = || TypeRef::Basic(BasicType::String);
    Declaration::Interface(InterfaceDecl {
        name: id("CommandSideInterface"),
        request_responses: vec![
            rr(
                "createParkingArea",
                named("ParkingAreaInformation"),
                named("PAID"),
            ),
            rr("updateParkingArea", named("ParkingArea"), string()),
            rr("deleteParkingArea", named("PAID"), string()),
        ],
        one_ways: vec![],
    })
}

fn command_side() -> Declaration {
    let port = |kind, name: &str, location: &str, iface: &str| PortDecl {
        kind,
        name: id(name),
        location: Expr::Path(path(location)),
        location_span: Span::default(),
        protocol: Some(Protocol {
            name: id("http"),
            params: vec![(id("format"), Literal::Str("json".into()))],
        }),
        interfaces: vec![id(iface)],
    };
    Declaration::Service(ServiceDecl {
        name: id("CommandSide"),
        config: Some(ConfigParam {
            name: id("config"),
            ty: Some(id("Configuration")),
        }),
        execution: Some(ExecutionMode::Concurrent),
        input_ports: vec![port(
            PortKind::Input,
            "InputCommands",
            "config.CommandSide.location",
            "CommandSideInterface",
        )],
        output_ports: vec![port(
            PortKind::Output,
            "EventStore",
            "config.EventStore.location",
            "EventStoreInterface",
        )],
        elided: false,
        main: Some(Behavior::Sequence(vec![])),
    })
}

fn test_client() -> Declaration {
    let mut topics = path("topics");
    topics.steps[0].index = Some(Box::new(Expr::Literal(Literal::Int(0))));
    let ne = |lhs: &str, rhs: Expr| Expr::Binary {
        op: BinaryOp::NotEq,
        lhs: Box::new(Expr::Path(path(lhs))),
        rhs: Box::new(rhs),
    };
    let body = vec![
        stmt(StmtKind::SolicitResponse {
            operation: id("subscribe"),
            port: id("EventStore"),
            request: Some(Expr::Tree(vec![
                (path("location"), Expr::Path(path("testLocation"))),
                (topics, str_lit("PA_DELETED")),
            ])),
            response: Some(path("res")),
        }),
        stmt(StmtKind::SolicitResponse {
            operation: id("deleteParkingArea"),
            port: id("CommandSide"),
            request: Some(Expr::Literal(Literal::Long(123))),
            response: None,
        }),
        stmt(StmtKind::Receive {
            operation: id("notify"),
            target: path("event"),
        }),
        stmt(StmtKind::If {
            cond: Expr::Binary {
                op: BinaryOp::Or,
                lhs: Box::new(ne("event.type", str_lit("PA_DELETED"))),
                rhs: Box::new(ne("event.id", Expr::Literal(Literal::Long(123)))),
            },
            then_branch: vec![stmt(StmtKind::Throw {
                fault: id("AssertionFailed"),
                data: None,
            })],
            else_branch: None,
        }),
    ];
    Declaration::Service(ServiceDecl {
        name: id("TestClient"),
        config: untyped_config(),
        execution: None,
        input_ports: vec![],
        output_ports: vec![],
        elided: false,
        main: Some(Behavior::Sequence(body)),
    })
}
