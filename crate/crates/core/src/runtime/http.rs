//! HTTP/JSON wire mapping.
//!
//! Every invocation is `POST /<operation>` with the JSON-encoded message as
//! body. A request-response answers `200` with the encoded response, or
//! `500` with `{"fault":<name>,"data":<encoded data or null>}`; a one-way
//! is acknowledged with an empty `202`.

use super::{faults, Fault};
use crate::config::Location;
use crate::json::{decode_json, encode_json, from_json, to_json};
use crate::semantic::OperationKind;
use crate::value::ValueTree;
use serde_json::{json, Value as Json};
use std::io::Read;
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

pub const CONTENT_TYPE: &str = "application/json; charset=utf-8";

/// Encodes a fault as a `500` response body.
pub fn fault_body(fault: &Fault) -> Vec<u8> {
    let data = fault.data.as_ref().map(to_json).unwrap_or(Json::Null);
    serde_json::to_vec(&json!({ "fault": fault.name, "data": data }))
        .expect("serializing a JSON value cannot fail")
}

/// Decodes a `500` response body.
pub fn parse_fault_body(body: &[u8]) -> Option<Fault> {
    let json: Json = serde_json::from_slice(body).ok()?;
    let name = json.get("fault")?.as_str()?.to_string();
    if name.is_empty() {
        return None;
    }
    let data = match json.get("data") {
        None | Some(Json::Null) => None,
        Some(d) => Some(from_json(d).ok()?),
    };
    Some(Fault { name, data })
}

/// Invokes operations of services listening on socket locations.
#[derive(Clone)]
pub struct Client {
    agent: ureq::Agent,
}

impl Default for Client {
    fn default() -> Self {
        Client::new(Duration::from_secs(30))
    }
}

impl Client {
    pub fn new(timeout: Duration) -> Self {
        Client {
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }

    pub fn invoke_rr(
        &self,
        location: &Location,
        operation: &str,
        request: &ValueTree,
    ) -> Result<ValueTree, Fault> {
        self.send(location, operation, OperationKind::RequestResponse, request)
            .map(Option::unwrap_or_default)
    }

    pub fn invoke_ow(
        &self,
        location: &Location,
        operation: &str,
        message: &ValueTree,
    ) -> Result<(), Fault> {
        self.send(location, operation, OperationKind::OneWay, message)
            .map(|_| ())
    }

    pub(crate) fn send(
        &self,
        location: &Location,
        operation: &str,
        kind: OperationKind,
        payload: &ValueTree,
    ) -> Result<Option<ValueTree>, Fault> {
        let Location::Socket { host, port } = location else {
            return Err(Fault::message(
                faults::TRANSPORT_ERROR,
                format!("{location} is not reachable from this process"),
            ));
        };
        let url = format!("http://{host}:{port}/{operation}");
        let transport = |msg: String| Fault::message(faults::TRANSPORT_ERROR, msg);
        let result = self
            .agent
            .post(&url)
            .set("Content-Type", CONTENT_TYPE)
            .send_bytes(&encode_json(payload));
        match result {
            Ok(resp) => {
                let status = resp.status();
                let mut body = Vec::new();
                resp.into_reader()
                    .read_to_end(&mut body)
                    .map_err(|e| transport(format!("reading response from {location}: {e}")))?;
                match (kind, status) {
                    (OperationKind::RequestResponse, 200) => decode_json(&body)
                        .map(Some)
                        .map_err(|e| transport(format!("bad response from {location}: {e}"))),
                    (OperationKind::OneWay, 202) => Ok(None),
                    _ => Err(transport(format!(
                        "unexpected status {status} from {location}"
                    ))),
                }
            }
            Err(ureq::Error::Status(500, resp)) => {
                let mut body = Vec::new();
                let _ = resp.into_reader().read_to_end(&mut body);
                Err(parse_fault_body(&body)
                    .unwrap_or_else(|| transport(format!("malformed fault from {location}"))))
            }
            Err(ureq::Error::Status(status, _)) => Err(transport(format!(
                "unexpected status {status} from {location}"
            ))),
            Err(ureq::Error::Transport(t)) => {
                if is_timeout(&t) {
                    Err(Fault::message(
                        faults::TIMEOUT,
                        format!("{operation} at {location}"),
                    ))
                } else {
                    Err(transport(format!("{location}: {t}")))
                }
            }
        }
    }
}

fn is_timeout(t: &ureq::Transport) -> bool {
    use std::error::Error as _;
    let mut source = t.source();
    while let Some(err) = source {
        if let Some(io) = err.downcast_ref::<std::io::Error>() {
            return matches!(
                io.kind(),
                std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock
            );
        }
        source = err.source();
    }
    false
}

/// What a server hands back for one request.
pub(crate) struct Reply {
    pub status: u16,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn ok(tree: &ValueTree) -> Self {
        Reply {
            status: 200,
            body: encode_json(tree),
        }
    }

    pub fn accepted() -> Self {
        Reply {
            status: 202,
            body: Vec::new(),
        }
    }

    pub fn fault(fault: &Fault) -> Self {
        Reply {
            status: 500,
            body: fault_body(fault),
        }
    }
}

pub(crate) type Handler = Arc<dyn Fn(&str, &[u8]) -> Reply + Send + Sync>;

pub(crate) struct Server {
    server: Arc<tiny_http::Server>,
    thread: Option<JoinHandle<()>>,
}

/// `localhost` and literal addresses bind exactly; any other name is taken
/// to be this machine's name inside a deployment and binds every interface.
fn bind_address(host: &str, port: u16) -> String {
    if host == "localhost" {
        format!("127.0.0.1:{port}")
    } else if let Ok(ip) = host.parse::<std::net::IpAddr>() {
        std::net::SocketAddr::new(ip, port).to_string()
    } else {
        format!("0.0.0.0:{port}")
    }
}

impl Server {
    pub fn bind(host: &str, port: u16, handler: Handler) -> Result<Server, String> {
        let server =
            Arc::new(tiny_http::Server::http(bind_address(host, port)).map_err(|e| e.to_string())?);
        let accept = Arc::clone(&server);
        let thread = std::thread::Builder::new()
            .name(format!("http:{port}"))
            .spawn(move || {
                for request in accept.incoming_requests() {
                    let handler = Arc::clone(&handler);
                    std::thread::spawn(move || respond(request, &*handler));
                }
            })
            .map_err(|e| e.to_string())?;
        Ok(Server {
            server,
            thread: Some(thread),
        })
    }

    /// Stops accepting connections and waits for the accept loop to end.
    pub fn stop(&mut self) {
        self.server.unblock();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        self.stop();
    }
}

fn respond(
    mut request: tiny_http::Request,
    handler: &(dyn Fn(&str, &[u8]) -> Reply + Send + Sync),
) {
    let reply = if *request.method() != tiny_http::Method::Post {
        Reply {
            status: 405,
            body: Vec::new(),
        }
    } else {
        let operation = request
            .url()
            .split('?')
            .next()
            .unwrap_or("")
            .trim_start_matches('/')
            .to_string();
        let mut body = Vec::new();
        match request.as_reader().read_to_end(&mut body) {
            Ok(_) => handler(&operation, &body),
            Err(e) => Reply::fault(&Fault::message(faults::TRANSPORT_ERROR, e.to_string())),
        }
    };
    let mut response = tiny_http::Response::from_data(reply.body).with_status_code(reply.status);
    if reply.status != 202 && reply.status != 405 {
        let header = tiny_http::Header::from_bytes("Content-Type", CONTENT_TYPE)
            .expect("static header is valid");
        response = response.with_header(header);
    }
    if let Err(e) = request.respond(response) {
        log::debug!("client went away before the reply was sent: {e}");
    }
}
