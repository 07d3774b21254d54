//! Seeded generator of random, well-formed programs.
//!
//! Output is source text that parses and resolves without errors. Types
//! only reference earlier types, so declarations form a DAG; some types
//! and interfaces are deliberately left unused.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write;

const BASICS: [&str; 6] = ["void", "bool", "int", "long", "double", "string"];

#[derive(Clone)]
struct Op {
    name: String,
    one_way: bool,
}

struct Iface {
    name: String,
    ops: Vec<Op>,
}

pub struct Generated {
    pub text: String,
    pub services: Vec<String>,
}

struct Gen {
    rng: ChaCha8Rng,
    types: Vec<String>,
    ifaces: Vec<Iface>,
    out: String,
}

pub fn program(seed: u64) -> Generated {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        types: Vec::new(),
        ifaces: Vec::new(),
        out: String::new(),
    };
    g.generate()
}

impl Gen {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn type_ref(&mut self, depth: u32) -> String {
        let roll = self.rng.gen_range(0..10);
        if roll < 4 && !self.types.is_empty() {
            self.types.choose(&mut self.rng).unwrap().clone()
        } else if roll < 5 && depth < 2 {
            let root = *BASICS.choose(&mut self.rng).unwrap();
            format!("{root} {}", self.fields(depth + 1))
        } else {
            BASICS.choose(&mut self.rng).unwrap().to_string()
        }
    }

    fn fields(&mut self, depth: u32) -> String {
        let n = self.rng.gen_range(1..4);
        let mut out = String::from("{");
        for i in 0..n {
            let card = ["", "", "?", "*"].choose(&mut self.rng).unwrap();
            let ty = self.type_ref(depth);
            write!(out, " f{i}{card}:{ty}").unwrap();
        }
        out.push_str(" }");
        out
    }

    fn type_decl(&mut self, i: usize) {
        let name = format!("T{i}");
        let text = match self.rng.gen_range(0..3) {
            0 => format!("type {name}:{}", BASICS.choose(&mut self.rng).unwrap()),
            1 => format!("type {name} {}", self.fields(1)),
            _ => {
                let root = BASICS.choose(&mut self.rng).unwrap();
                format!("type {name}:{root} {}", self.fields(1))
            }
        };
        writeln!(self.out, "{text}").unwrap();
        self.types.push(name);
    }

    fn interface(&mut self, i: usize) {
        let name = format!("I{i}");
        let n = self.rng.gen_range(1..4);
        let ops: Vec<Op> = (0..n)
            .map(|k| Op {
                name: format!("op{i}x{k}"),
                one_way: self.chance(0.4),
            })
            .collect();
        let rr: Vec<String> = ops
            .iter()
            .filter(|o| !o.one_way)
            .map(|o| o.name.clone())
            .collect();
        let ow: Vec<String> = ops
            .iter()
            .filter(|o| o.one_way)
            .map(|o| o.name.clone())
            .collect();
        writeln!(self.out, "interface {name} {{").unwrap();
        if !rr.is_empty() {
            let sigs: Vec<String> = rr
                .iter()
                .map(|o| format!("\t{o}( {} )( {} )", self.type_ref(1), self.type_ref(1)))
                .collect();
            writeln!(self.out, "RequestResponse:\n{}", sigs.join(",\n")).unwrap();
        }
        if !ow.is_empty() {
            let sigs: Vec<String> = ow
                .iter()
                .map(|o| format!("\t{o}( {} )", self.type_ref(1)))
                .collect();
            writeln!(self.out, "OneWay:\n{}", sigs.join(",\n")).unwrap();
        }
        writeln!(self.out, "}}").unwrap();
        self.ifaces.push(Iface { name, ops });
    }

    fn literal(&mut self) -> String {
        match self.rng.gen_range(0..6) {
            0 => self.rng.gen_range(0..1000).to_string(),
            1 => format!("{}L", self.rng.gen_range(0..i64::MAX / 2)),
            2 => format!("{:?}", self.rng.gen_range(0..10_000) as f64 / 8.0),
            3 => ["\"a\"", "\"q\\\"t\"", "\"line\\n\"", "\"\""]
                .choose(&mut self.rng)
                .unwrap()
                .to_string(),
            4 => "true".into(),
            _ => "false".into(),
        }
    }

    fn path(&mut self, depth: u32) -> String {
        let mut p = ["x", "y", "acc", "global.n"]
            .choose(&mut self.rng)
            .unwrap()
            .to_string();
        for _ in 0..self.rng.gen_range(0..3) {
            write!(p, ".s{}", self.rng.gen_range(0..3)).unwrap();
            if self.chance(0.3) {
                write!(p, "[{}]", self.expr(depth + 1)).unwrap();
            }
        }
        p
    }

    fn expr(&mut self, depth: u32) -> String {
        if depth >= 3 {
            return if self.chance(0.5) {
                self.literal()
            } else {
                self.path(depth)
            };
        }
        match self.rng.gen_range(0..9) {
            0 | 1 => self.literal(),
            2 => self.path(depth),
            3 => format!("#{}", self.path(depth)),
            4 => {
                let op = ["!", "-"].choose(&mut self.rng).unwrap();
                format!("{op}( {} )", self.expr(depth + 1))
            }
            5 => format!("( {} )", self.expr(depth + 1)),
            6 => {
                let n = self.rng.gen_range(0..3);
                let parts: Vec<String> = (0..n)
                    .map(|_| format!("{} = {}", self.path(depth + 1), self.expr(depth + 1)))
                    .collect();
                format!("{{ {} }}", parts.join(", "))
            }
            _ => {
                let op = [
                    "||", "&&", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/",
                ]
                .choose(&mut self.rng)
                .unwrap();
                format!("{} {op} {}", self.atom(depth + 1), self.atom(depth + 1))
            }
        }
    }

    fn atom(&mut self, depth: u32) -> String {
        let e = self.expr(depth);
        if e.contains(' ') && !e.starts_with('{') && !e.starts_with('(') {
            format!("( {e} )")
        } else {
            e
        }
    }

    fn block(&mut self, depth: u32, outputs: &[(String, Vec<Op>)], receives: &[String]) -> String {
        let indent = "\t".repeat(depth as usize + 2);
        let n = self.rng.gen_range(1..4);
        let mut out = String::new();
        for _ in 0..n {
            let line = match self.rng.gen_range(0..8) {
                0..=2 => format!("{} = {}", self.path(1), self.expr(1)),
                3 if depth < 2 => {
                    let cond = self.expr(1);
                    let then = self.block(depth + 1, outputs, receives);
                    if self.chance(0.5) {
                        let other = self.block(depth + 1, outputs, receives);
                        format!("if( {cond} ) {{\n{then}{indent}}} else {{\n{other}{indent}}}")
                    } else {
                        format!("if( {cond} ) {{\n{then}{indent}}}")
                    }
                }
                4 if depth < 2 => {
                    let body = self.block(depth + 1, outputs, receives);
                    format!("while( {} ) {{\n{body}{indent}}}", self.expr(1))
                }
                5 | 6 if !outputs.is_empty() => {
                    let (port, ops) = outputs.choose(&mut self.rng).unwrap().clone();
                    let op = ops.choose(&mut self.rng).unwrap();
                    let arg = if self.chance(0.7) {
                        self.expr(1)
                    } else {
                        String::new()
                    };
                    if op.one_way {
                        format!("{}@{port}( {arg} )", op.name)
                    } else if self.chance(0.8) {
                        format!("{}@{port}( {arg} )( {} )", op.name, self.path(1))
                    } else {
                        format!("{}@{port}( {arg} )()", op.name)
                    }
                }
                7 if !receives.is_empty() => {
                    let op = receives.choose(&mut self.rng).unwrap().clone();
                    format!("{op}( {} )", self.path(1))
                }
                _ if self.chance(0.3) => {
                    if self.chance(0.5) {
                        format!("throw( Fault{} )", self.rng.gen_range(0..3))
                    } else {
                        format!(
                            "throw( Fault{}, {} )",
                            self.rng.gen_range(0..3),
                            self.expr(1)
                        )
                    }
                }
                _ => format!("{} = {}", self.path(1), self.literal()),
            };
            writeln!(out, "{indent}{line}").unwrap();
        }
        out
    }

    fn protocol(&mut self) -> &'static str {
        if self.chance(0.5) {
            "\t\tprotocol: http { format = \"json\" }\n"
        } else {
            ""
        }
    }

    fn service(&mut self, i: usize, n_services: usize) -> String {
        let name = format!("S{i}");
        let param = match self.rng.gen_range(0..4) {
            0 => "( config:Cfg )".to_string(),
            1 => "( config )".to_string(),
            2 => format!("( config:T{} )", self.rng.gen_range(0..self.types.len())),
            _ => "( config:Cfg )".to_string(),
        };
        let mut text = format!("service {name}{param} {{\n");
        let mode = ["", "concurrent", "sequential", "single"]
            .choose(&mut self.rng)
            .unwrap();
        if !mode.is_empty() {
            writeln!(text, "\texecution: {mode}").unwrap();
        }

        let mut inbound: Vec<Op> = Vec::new();
        for p in 0..self.rng.gen_range(0..3) {
            let k = self.rng.gen_range(1..3).min(self.ifaces.len());
            let chosen: Vec<usize> =
                rand::seq::index::sample(&mut self.rng, self.ifaces.len(), k).into_vec();
            // keep operation names unique across the service's input ports
            let chosen: Vec<usize> = chosen
                .into_iter()
                .filter(|&c| {
                    !self.ifaces[c]
                        .ops
                        .iter()
                        .any(|o| inbound.iter().any(|b| b.name == o.name))
                })
                .collect();
            if chosen.is_empty() {
                continue;
            }
            for &c in &chosen {
                inbound.extend(self.ifaces[c].ops.iter().cloned());
            }
            let names: Vec<String> = chosen
                .iter()
                .map(|&c| self.ifaces[c].name.clone())
                .collect();
            let protocol = self.protocol();
            let location = if self.chance(0.8) {
                format!("config.{name}.location")
            } else {
                format!("\"local://{}p{p}\"", name.to_lowercase())
            };
            write!(
                text,
                "\tinputPort In{p} {{\n\t\tlocation: {location}\n{protocol}\t\tinterfaces: {}\n\t}}\n",
                names.join(", ")
            )
            .unwrap();
        }

        let mut outputs: Vec<(String, Vec<Op>)> = Vec::new();
        for p in 0..self.rng.gen_range(0..3) {
            let c = self.rng.gen_range(0..self.ifaces.len());
            let target = self.rng.gen_range(0..n_services);
            write!(
                text,
                "\toutputPort Out{p} {{\n\t\tlocation: config.S{target}.location\n{}\t\tinterfaces: {}\n\t}}\n",
                self.protocol(),
                self.ifaces[c].name
            )
            .unwrap();
            outputs.push((format!("Out{p}"), self.ifaces[c].ops.clone()));
        }

        if self.chance(0.1) {
            text.push_str("\t...\n}\n");
            return text;
        }
        let receives: Vec<String> = inbound
            .iter()
            .filter(|o| o.one_way)
            .map(|o| o.name.clone())
            .collect();
        if !inbound.is_empty() && self.chance(0.7) {
            text.push_str("\tmain {\n");
            for op in &inbound {
                if self.chance(0.2) {
                    continue;
                }
                let body = self.block(0, &outputs, &[]);
                if op.one_way {
                    writeln!(text, "\t\t[ {}( req ) {{\n{body}\t\t}} ]", op.name).unwrap();
                } else {
                    writeln!(text, "\t\t[ {}( req )( res ) {{\n{body}\t\t}} ]", op.name).unwrap();
                }
            }
            text.push_str("\t}\n");
        } else {
            let body = self.block(0, &outputs, &receives);
            write!(text, "\tmain {{\n{body}\t}}\n").unwrap();
        }
        text.push_str("}\n");
        text
    }

    fn generate(&mut self) -> Generated {
        writeln!(self.out, "// generated").unwrap();
        let n_types = self.rng.gen_range(1..8);
        for i in 0..n_types {
            self.type_decl(i);
        }
        let n_ifaces = self.rng.gen_range(1..6);
        for i in 0..n_ifaces {
            self.interface(i);
        }
        let n_services = self.rng.gen_range(1..5);
        let cfg_fields: Vec<String> = (0..n_services)
            .map(|i| format!("S{i}?:void {{ location:string }}"))
            .collect();
        let cfg = format!("type Cfg {{ {} }}\n", cfg_fields.join(" "));
        let services: Vec<String> = (0..n_services)
            .map(|i| self.service(i, n_services))
            .collect();

        // interleave services, the config type and extra unused types
        let mut tail: Vec<String> = services;
        tail.insert(self.rng.gen_range(0..=tail.len()), cfg);
        for k in 0..self.rng.gen_range(0..3) {
            let extra = format!("type U{k} {}\n", self.fields(1));
            tail.insert(self.rng.gen_range(0..=tail.len()), extra);
        }
        for t in tail {
            self.out.push_str(&t);
        }
        Generated {
            text: std::mem::take(&mut self.out),
            services: (0..n_services).map(|i| format!("S{i}")).collect(),
        }
    }
}
