//! A running service: inbound dispatch, execution modes, mailboxes for
//! inline receives, and rebindable output ports.

use super::interp::{Activation, Env};
use super::transport::Shared;
use super::{faults, Fault, RuntimeError};
use crate::config::{resolve_location, ConfigTree, Location};
use crate::semantic::{
    check_value, coerce_value, is_port_rebinding, CheckedProgram, OperationKind, ServiceInfo,
};
use crate::syntax::{Behavior, ExecutionMode, Path, ServiceDecl, Stmt};
use crate::value::ValueTree;
use crossbeam_channel::{Receiver, RecvTimeoutError, Sender};
use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

type Job = Box<dyn FnOnce() + Send>;

/// How often blocked receives look at the cancellation flag.
const POLL: Duration = Duration::from_millis(50);

#[derive(Default)]
pub(crate) struct Stats {
    pub served: AtomicU64,
    pub faults: AtomicU64,
    pub in_flight: AtomicUsize,
}

pub(crate) struct Instance {
    pub name: String,
    checked: Arc<CheckedProgram>,
    service: ServiceDecl,
    info: ServiceInfo,
    config_var: Option<(String, ValueTree)>,
    shared: Arc<Shared>,
    global: Mutex<ValueTree>,
    outputs: RwLock<HashMap<String, Location>>,
    mailboxes: HashMap<String, (Sender<ValueTree>, Receiver<ValueTree>)>,
    branches: HashMap<String, usize>,
    worker: Mutex<Option<Sender<Job>>>,
    accepting: AtomicBool,
    cancelled: AtomicBool,
    single_taken: AtomicBool,
    pub stats: Stats,
    pub outcome: Mutex<Option<Result<(), Fault>>>,
}

impl Instance {
    pub fn new(
        checked: Arc<CheckedProgram>,
        name: &str,
        config: &ConfigTree,
        shared: Arc<Shared>,
    ) -> Result<Arc<Instance>, RuntimeError> {
        let service = checked
            .service(name)
            .ok_or_else(|| RuntimeError::UnknownService(name.to_string()))?
            .clone();
        let info = checked
            .service_info(name)
            .expect("resolved service has info")
            .clone();

        let mut outputs = HashMap::new();
        for port in &service.output_ports {
            let location = resolve_location(config, &port.location)
                .map_err(|e| RuntimeError::Config(vec![e]))?;
            outputs.insert(port.name.name.clone(), location);
        }
        let branches: HashMap<String, usize> = match &service.main {
            Some(Behavior::InputChoice(branches)) => branches
                .iter()
                .enumerate()
                .map(|(i, b)| (b.operation.name.clone(), i))
                .collect(),
            _ => HashMap::new(),
        };
        let mailboxes = info
            .input_ports
            .iter()
            .flat_map(|p| p.operations.values())
            .filter(|op| op.kind == OperationKind::OneWay && !branches.contains_key(&op.name))
            .map(|op| (op.name.clone(), crossbeam_channel::unbounded()))
            .collect();
        let config_var = service
            .config
            .as_ref()
            .map(|c| (c.name.name.clone(), config.tree().clone()));

        let worker = match service.execution_mode() {
            ExecutionMode::Concurrent => None,
            ExecutionMode::Sequential | ExecutionMode::Single => {
                let (tx, rx) = crossbeam_channel::unbounded::<Job>();
                std::thread::Builder::new()
                    .name(format!("{name}-worker"))
                    .spawn(move || {
                        for job in rx {
                            job();
                        }
                    })
                    .expect("spawning a worker thread");
                Some(tx)
            }
        };

        Ok(Arc::new(Instance {
            name: name.to_string(),
            checked,
            service,
            info,
            config_var,
            shared,
            global: Mutex::new(ValueTree::new()),
            outputs: RwLock::new(outputs),
            mailboxes,
            branches,
            worker: Mutex::new(worker),
            accepting: AtomicBool::new(true),
            cancelled: AtomicBool::new(false),
            single_taken: AtomicBool::new(false),
            stats: Stats::default(),
            outcome: Mutex::new(None),
        }))
    }

    pub fn service(&self) -> &ServiceDecl {
        &self.service
    }

    pub fn info(&self) -> &ServiceInfo {
        &self.info
    }

    /// The statements of an executable `main`, if that is what this
    /// service has.
    pub fn executable_body(&self) -> Option<&[Stmt]> {
        match &self.service.main {
            Some(Behavior::Sequence(stmts)) => Some(stmts),
            _ => None,
        }
    }

    pub fn stop_accepting(&self) {
        self.accepting.store(false, Ordering::SeqCst);
    }

    pub fn cancel(&self) {
        self.cancelled.store(true, Ordering::SeqCst);
    }

    pub fn close_worker(&self) {
        self.worker.lock().unwrap().take();
    }

    fn initial_scope(&self) -> ValueTree {
        let mut scope = ValueTree::new();
        if let Some((name, tree)) = &self.config_var {
            scope.push_child(name.clone(), tree.clone());
        }
        scope
    }

    fn stopped() -> Fault {
        Fault::message(faults::TRANSPORT_ERROR, "service is not accepting messages")
    }

    /// Receiver side of every transport: checks the message against the
    /// declared request type and hands it to a handler or a mailbox.
    pub fn deliver(
        self: &Arc<Self>,
        port: usize,
        operation: &str,
        mut payload: ValueTree,
    ) -> Result<Option<ValueTree>, Fault> {
        if !self.accepting.load(Ordering::SeqCst) {
            return Err(Self::stopped());
        }
        let Some(op) = self
            .info
            .input_ports
            .get(port)
            .and_then(|p| p.operations.get(operation))
        else {
            return Err(Fault::message(
                faults::UNKNOWN_OPERATION,
                format!("{} offers no operation `{operation}`", self.name),
            ));
        };
        coerce_value(&self.checked, &mut payload, &op.request);
        if let Err(violations) = check_value(&self.checked, &payload, &op.request) {
            self.stats.faults.fetch_add(1, Ordering::Relaxed);
            let message = format!("{}.{operation}: {}", self.name, violations[0]);
            if op.kind == OperationKind::OneWay {
                log::warn!("dropping message: {message}");
                return Ok(None);
            }
            return Err(Fault::message(faults::TYPE_MISMATCH, message));
        }

        let branch = self.branches.get(operation).copied();
        match (op.kind, branch) {
            (OperationKind::OneWay, None) => {
                let (tx, _) = &self.mailboxes[operation];
                tx.send(payload)
                    .expect("mailbox receiver lives as long as the instance");
                self.stats.served.fetch_add(1, Ordering::Relaxed);
                Ok(None)
            }
            (OperationKind::OneWay, Some(b)) => {
                let me = Arc::clone(self);
                self.activate(Box::new(move || {
                    if let Err(fault) = me.run_branch(b, payload) {
                        log::warn!(
                            "{}.{}: one-way handler failed with {fault}",
                            me.name,
                            me.branch_op(b)
                        );
                    }
                }))?;
                Ok(None)
            }
            (OperationKind::RequestResponse, None) => Err(Fault::message(
                faults::UNKNOWN_OPERATION,
                format!("{} has no handler for `{operation}`", self.name),
            )),
            (OperationKind::RequestResponse, Some(b)) => {
                let (tx, rx) = crossbeam_channel::bounded(1);
                let me = Arc::clone(self);
                self.activate(Box::new(move || {
                    let _ = tx.send(me.run_branch(b, payload));
                }))?;
                match rx.recv_timeout(self.shared.options.request_timeout) {
                    Ok(result) => result,
                    Err(RecvTimeoutError::Timeout) => Err(Fault::message(
                        faults::TIMEOUT,
                        format!("{}.{operation} did not answer in time", self.name),
                    )),
                    Err(RecvTimeoutError::Disconnected) => Err(Fault::new(faults::ABORTED)),
                }
            }
        }
    }

    fn branch_op(&self, b: usize) -> &str {
        match &self.service.main {
            Some(Behavior::InputChoice(branches)) => &branches[b].operation.name,
            _ => "",
        }
    }

    /// Schedules one handler activation according to the execution mode.
    fn activate(self: &Arc<Self>, job: Job) -> Result<(), Fault> {
        let mode = self.service.execution_mode();
        if mode == ExecutionMode::Single {
            if self.single_taken.swap(true, Ordering::SeqCst) {
                return Err(Self::stopped());
            }
            self.stop_accepting();
        }
        self.stats.in_flight.fetch_add(1, Ordering::SeqCst);
        let me = Arc::clone(self);
        let job: Job = Box::new(move || {
            job();
            me.stats.in_flight.fetch_sub(1, Ordering::SeqCst);
        });
        match mode {
            ExecutionMode::Concurrent => {
                std::thread::spawn(job);
                Ok(())
            }
            ExecutionMode::Sequential | ExecutionMode::Single => {
                let worker = self.worker.lock().unwrap();
                match worker.as_ref().map(|w| w.send(job)) {
                    Some(Ok(())) => Ok(()),
                    _ => {
                        self.stats.in_flight.fetch_sub(1, Ordering::SeqCst);
                        Err(Self::stopped())
                    }
                }
            }
        }
    }

    fn run_branch(&self, b: usize, request: ValueTree) -> Result<Option<ValueTree>, Fault> {
        let Some(Behavior::InputChoice(branches)) = &self.service.main else {
            unreachable!("branches exist only for input choices")
        };
        let branch = &branches[b];
        let result = self.run_branch_inner(branch, request);
        match &result {
            Ok(_) => self.stats.served.fetch_add(1, Ordering::Relaxed),
            Err(_) => self.stats.faults.fetch_add(1, Ordering::Relaxed),
        };
        result
    }

    fn run_branch_inner(
        &self,
        branch: &crate::syntax::Branch,
        request: ValueTree,
    ) -> Result<Option<ValueTree>, Fault> {
        let mut activation = Activation::new(self, self.initial_scope());
        activation.bind(&branch.request, request)?;
        activation.run(&branch.body)?;
        let Some(response_path) = &branch.response else {
            return Ok(None);
        };
        let mut response = activation.value_at(response_path)?;
        let (_, op) = self
            .info
            .inbound(&branch.operation.name)
            .expect("branch operations are offered");
        let ty = op
            .response
            .as_ref()
            .expect("request-response has a response type");
        coerce_value(&self.checked, &mut response, ty);
        if let Err(violations) = check_value(&self.checked, &response, ty) {
            return Err(Fault::message(
                faults::TYPE_MISMATCH,
                format!(
                    "{}.{} response: {}",
                    self.name, branch.operation.name, violations[0]
                ),
            ));
        }
        Ok(Some(response))
    }

    /// Runs an executable `main` to completion and records the outcome.
    pub fn run_executable(&self) -> Result<(), Fault> {
        let result = match self.executable_body() {
            Some(stmts) => Activation::new(self, self.initial_scope()).run(stmts),
            None => Ok(()),
        };
        if result.is_err() {
            self.stats.faults.fetch_add(1, Ordering::Relaxed);
        }
        *self.outcome.lock().unwrap() = Some(result.clone());
        result
    }

    fn output_location(&self, port: &str) -> Result<Location, Fault> {
        self.outputs
            .read()
            .unwrap()
            .get(port)
            .cloned()
            .ok_or_else(|| {
                Fault::message(
                    faults::TRANSPORT_ERROR,
                    format!("{} has no output port `{port}`", self.name),
                )
            })
    }
}

impl Env for Instance {
    fn cancelled(&self) -> bool {
        self.cancelled.load(Ordering::SeqCst)
    }

    fn global(&self) -> &Mutex<ValueTree> {
        &self.global
    }

    fn is_rebinding(&self, target: &Path) -> bool {
        is_port_rebinding(&self.service, target)
    }

    fn rebind(&self, port: &str, location: &str) -> Result<(), Fault> {
        let location: Location = location.parse().map_err(|e: crate::config::ConfigError| {
            Fault::message(faults::INVALID_LOCATION, e.to_string())
        })?;
        self.outputs
            .write()
            .unwrap()
            .insert(port.to_string(), location);
        Ok(())
    }

    fn solicit(&self, port: &str, operation: &str, request: ValueTree) -> Result<ValueTree, Fault> {
        let location = self.output_location(port)?;
        let answer = self
            .shared
            .send(
                &location,
                operation,
                OperationKind::RequestResponse,
                request,
            )?
            .unwrap_or_default();
        let mut answer = answer;
        if let Some(ty) = self
            .info
            .output_port(port)
            .and_then(|p| p.operations.get(operation))
            .and_then(|op| op.response.as_ref())
        {
            coerce_value(&self.checked, &mut answer, ty);
        }
        Ok(answer)
    }

    fn notify(&self, port: &str, operation: &str, message: ValueTree) -> Result<(), Fault> {
        let location = self.output_location(port)?;
        self.shared
            .send(&location, operation, OperationKind::OneWay, message)
            .map(|_| ())
    }

    fn receive(&self, operation: &str) -> Result<ValueTree, Fault> {
        let Some((_, rx)) = self.mailboxes.get(operation) else {
            return Err(Fault::message(
                faults::UNKNOWN_OPERATION,
                format!("{} cannot receive `{operation}`", self.name),
            ));
        };
        let deadline = Instant::now() + self.shared.options.receive_timeout;
        loop {
            if self.cancelled() {
                return Err(Fault::new(faults::ABORTED));
            }
            let now = Instant::now();
            if now >= deadline {
                return Err(Fault::message(
                    faults::TIMEOUT,
                    format!("{} waited too long for `{operation}`", self.name),
                ));
            }
            match rx.recv_timeout(POLL.min(deadline - now)) {
                Ok(message) => return Ok(message),
                Err(RecvTimeoutError::Timeout) => continue,
                Err(RecvTimeoutError::Disconnected) => return Err(Fault::new(faults::ABORTED)),
            }
        }
    }
}
