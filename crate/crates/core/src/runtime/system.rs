//! Starting a set of services and tearing them down again.

use super::http::{Reply, Server};
use super::instance::Instance;
use super::transport::{deliver_local, Shared};
use super::{faults, Fault, RuntimeError, RuntimeOptions, ServiceReport, SystemReport};
use crate::config::{resolve_location, validate_config_for, ConfigTree, Location};
use crate::json::decode_json;
use crate::semantic::{CheckedProgram, OperationKind};
use crate::syntax::{Literal, PortDecl};
use crate::value::ValueTree;
use std::sync::atomic::Ordering;
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

/// Handle on running services. Dropping it shuts them down.
pub struct RunningSystem {
    shared: Arc<Shared>,
    instances: Vec<Arc<Instance>>,
    servers: Vec<Server>,
    executables: Vec<(String, JoinHandle<()>)>,
    input_locations: Vec<(String, Location)>,
    report: Option<SystemReport>,
}

fn check_protocol(service: &str, port: &PortDecl) -> Result<(), RuntimeError> {
    let Some(protocol) = &port.protocol else {
        return Ok(());
    };
    let json_format = protocol.params.iter().all(|(key, value)| {
        key.name != "format" || matches!(value, Literal::Str(s) if s == "json")
    });
    if protocol.name.name == "http" && json_format {
        Ok(())
    } else {
        Err(RuntimeError::UnsupportedProtocol {
            service: service.to_string(),
            port: port.name.name.clone(),
            protocol: protocol.name.name.clone(),
        })
    }
}

/// Starts `services` of `checked`: binds every input port, then launches
/// executable services. Nothing keeps running if any step fails.
pub fn start(
    checked: &CheckedProgram,
    config: &ConfigTree,
    services: &[&str],
    options: RuntimeOptions,
) -> Result<RunningSystem, RuntimeError> {
    if services.is_empty() {
        return Err(RuntimeError::NoServices);
    }
    for name in services {
        let service = checked
            .service(name)
            .ok_or_else(|| RuntimeError::UnknownService(name.to_string()))?;
        for port in service.ports() {
            check_protocol(name, port)?;
        }
    }
    validate_config_for(checked, config, services).map_err(RuntimeError::Config)?;

    let checked = Arc::new(checked.clone());
    let shared = Arc::new(Shared::new(options));
    let mut system = RunningSystem {
        shared: Arc::clone(&shared),
        instances: Vec::new(),
        servers: Vec::new(),
        executables: Vec::new(),
        input_locations: Vec::new(),
        report: None,
    };
    // declaration order, whatever order the caller listed them in
    let selected: Vec<&str> = checked
        .service_names()
        .filter(|n| services.contains(n))
        .collect();
    for name in selected {
        let instance = Instance::new(Arc::clone(&checked), name, config, Arc::clone(&shared))?;
        for (index, port) in instance.service().input_ports.iter().enumerate() {
            let location = resolve_location(config, &port.location)
                .map_err(|e| RuntimeError::Config(vec![e]))?;
            system
                .input_locations
                .push((name.to_string(), location.clone()));
            match &location {
                Location::Local { name: local } => {
                    shared
                        .registry
                        .write()
                        .unwrap()
                        .insert(local.clone(), (Arc::clone(&instance), index));
                }
                Location::Socket { host, port } => {
                    let target = Arc::clone(&instance);
                    let handler = Arc::new(move |operation: &str, body: &[u8]| {
                        http_reply(&target, index, operation, body)
                    });
                    let server = Server::bind(host, *port, handler).map_err(|message| {
                        RuntimeError::Bind {
                            location: location.clone(),
                            message,
                        }
                    })?;
                    system.servers.push(server);
                }
            }
        }
        system.instances.push(instance);
    }

    for instance in &system.instances {
        if instance.executable_body().is_some() {
            let runner = Arc::clone(instance);
            let handle = std::thread::Builder::new()
                .name(instance.name.clone())
                .spawn(move || {
                    if let Err(fault) = runner.run_executable() {
                        log::info!("{} ended with fault {fault}", runner.name);
                    }
                })
                .expect("spawning an executable thread");
            system.executables.push((instance.name.clone(), handle));
        }
    }
    Ok(system)
}

fn http_reply(instance: &Arc<Instance>, port: usize, operation: &str, body: &[u8]) -> Reply {
    let payload = if body.iter().all(u8::is_ascii_whitespace) {
        Ok(ValueTree::new())
    } else {
        decode_json(body)
    };
    let payload = match payload {
        Ok(tree) => tree,
        Err(e) => {
            return Reply::fault(&Fault::message(
                faults::TYPE_MISMATCH,
                format!("undecodable message: {e}"),
            ))
        }
    };
    match instance.deliver(port, operation, payload) {
        Ok(Some(answer)) => Reply::ok(&answer),
        Ok(None) => Reply::accepted(),
        Err(fault) => Reply::fault(&fault),
    }
}

impl RunningSystem {
    fn instance(&self, service: &str) -> Result<&Arc<Instance>, Fault> {
        self.instances
            .iter()
            .find(|i| i.name == service)
            .ok_or_else(|| {
                Fault::message(
                    faults::TRANSPORT_ERROR,
                    format!("service `{service}` is not running here"),
                )
            })
    }

    fn invoke(
        &self,
        service: &str,
        operation: &str,
        kind: OperationKind,
        payload: ValueTree,
    ) -> Result<Option<ValueTree>, Fault> {
        let instance = self.instance(service)?;
        let Some((port, _)) = instance.info().inbound(operation) else {
            return Err(Fault::message(
                faults::UNKNOWN_OPERATION,
                format!("{service} offers no operation `{operation}`"),
            ));
        };
        let location = Location::local(service);
        deliver_local(instance, port, operation, kind, payload, &location)
    }

    /// Invokes a request-response operation of a running service.
    pub fn invoke_rr(
        &self,
        service: &str,
        operation: &str,
        request: ValueTree,
    ) -> Result<ValueTree, Fault> {
        self.invoke(service, operation, OperationKind::RequestResponse, request)
            .map(Option::unwrap_or_default)
    }

    /// Sends a one-way message to a running service.
    pub fn invoke_ow(
        &self,
        service: &str,
        operation: &str,
        message: ValueTree,
    ) -> Result<(), Fault> {
        self.invoke(service, operation, OperationKind::OneWay, message)
            .map(|_| ())
    }

    /// Invokes a request-response operation at any location this system can
    /// reach.
    pub fn invoke_rr_at(
        &self,
        location: &Location,
        operation: &str,
        request: ValueTree,
    ) -> Result<ValueTree, Fault> {
        self.shared
            .send(location, operation, OperationKind::RequestResponse, request)
            .map(Option::unwrap_or_default)
    }

    pub fn invoke_ow_at(
        &self,
        location: &Location,
        operation: &str,
        message: ValueTree,
    ) -> Result<(), Fault> {
        self.shared
            .send(location, operation, OperationKind::OneWay, message)
            .map(|_| ())
    }

    /// Input locations bound by this system, per service.
    pub fn input_locations(&self) -> &[(String, Location)] {
        &self.input_locations
    }

    pub fn has_executables(&self) -> bool {
        !self.executables.is_empty()
    }

    /// Blocks until every executable service has finished, returning how
    /// each ended.
    pub fn wait_executables(&mut self) -> Vec<(String, Result<(), Fault>)> {
        let mut outcomes = Vec::new();
        for (name, handle) in self.executables.drain(..) {
            let _ = handle.join();
            let outcome = self
                .instances
                .iter()
                .find(|i| i.name == name)
                .and_then(|i| i.outcome.lock().unwrap().clone())
                .unwrap_or_else(|| Err(Fault::new(faults::ABORTED)));
            outcomes.push((name, outcome));
        }
        outcomes
    }

    /// Stops accepting messages, lets in-flight activations finish within
    /// the drain timeout, then aborts the rest.
    pub fn shutdown(mut self) -> SystemReport {
        self.shutdown_inner()
    }

    fn busy(&self) -> bool {
        self.instances
            .iter()
            .any(|i| i.stats.in_flight.load(Ordering::SeqCst) > 0)
            || self.executables.iter().any(|(_, h)| !h.is_finished())
    }

    fn shutdown_inner(&mut self) -> SystemReport {
        if let Some(report) = &self.report {
            return report.clone();
        }
        for instance in &self.instances {
            instance.stop_accepting();
        }
        for server in &mut self.servers {
            server.stop();
        }
        let deadline = Instant::now() + self.shared.options.drain_timeout;
        while self.busy() && Instant::now() < deadline {
            std::thread::sleep(Duration::from_millis(10));
        }

        let mut aborted: Vec<u64> = self
            .instances
            .iter()
            .map(|i| i.stats.in_flight.load(Ordering::SeqCst) as u64)
            .collect();
        for (name, handle) in &self.executables {
            if !handle.is_finished() {
                if let Some(i) = self.instances.iter().position(|inst| &inst.name == name) {
                    aborted[i] += 1;
                }
            }
        }
        for instance in &self.instances {
            instance.cancel();
        }
        // cancelled activations notice within one statement or poll period
        let grace = Instant::now() + Duration::from_secs(1);
        while self.busy() && Instant::now() < grace {
            std::thread::sleep(Duration::from_millis(10));
        }
        for (_, handle) in self.executables.drain(..) {
            if handle.is_finished() {
                let _ = handle.join();
            }
        }
        self.servers.clear();
        self.shared.registry.write().unwrap().clear();
        for instance in &self.instances {
            instance.close_worker();
        }

        let report = SystemReport {
            services: self
                .instances
                .iter()
                .zip(aborted)
                .map(|(i, aborted)| ServiceReport {
                    service: i.name.clone(),
                    requests_served: i.stats.served.load(Ordering::Relaxed),
                    faults: i.stats.faults.load(Ordering::Relaxed),
                    aborted,
                    executable: if i.executable_body().is_some() {
                        i.outcome.lock().unwrap().clone()
                    } else {
                        None
                    },
                })
                .collect(),
        };
        self.report = Some(report.clone());
        report
    }
}

impl Drop for RunningSystem {
    fn drop(&mut self) {
        self.shutdown_inner();
    }
}
