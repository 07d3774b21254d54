//! Routing an outbound message to its location: the in-process registry for
//! `local://` names, HTTP for `socket://` addresses.

use super::http::Client;
use super::instance::Instance;
use super::{faults, Fault, RuntimeOptions};
use crate::config::Location;
use crate::semantic::OperationKind;
use crate::value::ValueTree;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// State common to every instance of one running system.
pub(crate) struct Shared {
    pub options: RuntimeOptions,
    /// `local://` name → instance and index of the input port bound there.
    pub registry: RwLock<HashMap<String, (Arc<Instance>, usize)>>,
    pub client: Client,
}

impl Shared {
    pub fn new(options: RuntimeOptions) -> Self {
        Shared {
            client: Client::new(options.request_timeout),
            options,
            registry: RwLock::new(HashMap::new()),
        }
    }

    /// Delivers `payload` and, for a request-response, returns the answer.
    pub fn send(
        &self,
        location: &Location,
        operation: &str,
        kind: OperationKind,
        payload: ValueTree,
    ) -> Result<Option<ValueTree>, Fault> {
        let Location::Local { name } = location else {
            return self.client.send(location, operation, kind, &payload);
        };
        let target = self.registry.read().unwrap().get(name).cloned();
        let Some((instance, port)) = target else {
            return Err(Fault::message(
                faults::TRANSPORT_ERROR,
                format!("nothing listens on {location}"),
            ));
        };
        deliver_local(&instance, port, operation, kind, payload, location)
    }
}

/// In-process delivery to a known instance, normalizing payloads the way a
/// JSON round trip would.
pub(crate) fn deliver_local(
    instance: &Arc<Instance>,
    port: usize,
    operation: &str,
    kind: OperationKind,
    payload: ValueTree,
    location: &Location,
) -> Result<Option<ValueTree>, Fault> {
    let result = instance.deliver(port, operation, payload.normalized_for_wire());
    match (kind, result) {
        (_, Err(fault)) => Err(Fault {
            data: fault.data.map(|d| d.normalized_for_wire()),
            ..fault
        }),
        (OperationKind::RequestResponse, Ok(Some(answer))) => {
            Ok(Some(answer.normalized_for_wire()))
        }
        (OperationKind::OneWay, Ok(None)) => Ok(None),
        (_, Ok(_)) => Err(Fault::message(
            faults::TRANSPORT_ERROR,
            format!("`{operation}` at {location} is not {kind}"),
        )),
    }
}
