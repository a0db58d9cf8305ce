//! Architecture-model domain types and structural validation.
//!
//! A model is a set of analysis functions with typed ports, connectors
//! between them, optional behavioral annexes (constraints, a state machine,
//! computations), and an optional environment block that injects writes into
//! the network. [`validate_model`] checks the rule table below and returns
//! diagnostics; only a model with no `Error`-severity diagnostics is accepted
//! by the transformation.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::ta::CmpOp;

/// Source position (1-based) attached to parse errors and, where available,
/// to diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Stable machine-readable rule id, e.g. `CONNECTOR-DIRECTION`.
    pub rule: String,
    pub severity: Severity,
    /// Human-oriented place description, e.g. `function SCC port cp`.
    pub location: String,
    pub message: String,
    pub span: Option<Span>,
}

impl Diagnostic {
    pub fn error(rule: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            rule: rule.into(),
            severity: Severity::Error,
            location: location.into(),
            message: message.into(),
            span: None,
        }
    }

    pub fn warning(rule: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, ..Diagnostic::error(rule, location, message) }
    }

    pub fn info(rule: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Info, ..Diagnostic::error(rule, location, message) }
    }
}

/// True when no diagnostic is an error.
pub fn is_accepted(diags: &[Diagnostic]) -> bool {
    diags.iter().all(|d| d.severity != Severity::Error)
}

// ---------------------------------------------------------------------------
// model types

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataType {
    Bool,
    Int { lo: i64, hi: i64 },
}

impl DataType {
    pub fn lo(self) -> i64 {
        match self {
            DataType::Bool => 0,
            DataType::Int { lo, .. } => lo,
        }
    }

    pub fn hi(self) -> i64 {
        match self {
            DataType::Bool => 1,
            DataType::Int { hi, .. } => hi,
        }
    }

    pub fn contains(self, v: i64) -> bool {
        self.lo() <= v && v <= self.hi()
    }
}

impl std::fmt::Display for DataType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DataType::Bool => write!(f, "bool"),
            DataType::Int { lo, hi } => write!(f, "int[{lo}..{hi}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PortKind {
    Flow,
    /// Client-server ports are reduced to flow + trigger during
    /// transformation (reported as an `Info` diagnostic).
    ClientServer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub direction: Direction,
    pub kind: PortKind,
    pub is_trigger: bool,
    pub ty: DataType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriggerPolicy {
    /// Periodic activation: period `n`, worst-case execution `m` (`m < n`).
    Time { period: u32, exec: u32 },
    /// Activation on trigger-port events, execution budget `etime`.
    Event { exec: u32 },
}

/// Surface value: the right-hand side of assignments and environment writes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueExpr {
    Int(i64),
    Bool(bool),
    Var(String),
}

impl std::fmt::Display for ValueExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValueExpr::Int(v) => write!(f, "{v}"),
            ValueExpr::Bool(b) => write!(f, "{b}"),
            ValueExpr::Var(v) => write!(f, "{v}"),
        }
    }
}

/// Boolean expression over ports, annex locals, and the reserved clock name
/// `clk`. The same shape is used by annex guards and constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Bool(bool),
    Cmp { lhs: ValueExpr, op: CmpOp, rhs: ValueExpr },
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Imply(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn visit_idents(&self, f: &mut impl FnMut(&str)) {
        match self {
            Expr::Bool(_) => {}
            Expr::Cmp { lhs, rhs, .. } => {
                for side in [lhs, rhs] {
                    if let ValueExpr::Var(v) = side {
                        f(v);
                    }
                }
            }
            Expr::Not(e) => e.visit_idents(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Imply(a, b) => {
                a.visit_idents(f);
                b.visit_idents(f);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Holds when the function is activated (conjoined onto read edges).
    Pre,
    /// Holds when the function publishes (conjoined onto write edges).
    Post,
    /// Holds at both activation and publication.
    Invariant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub ty: DataType,
    pub init: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assign {
    pub target: String,
    pub value: ValueExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnexState {
    pub name: String,
    /// Optional per-state execution budget; budgets along every path must
    /// add up to the function's execution time.
    pub budget: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnexTransition {
    pub from: String,
    pub to: String,
    pub guard: Expr,
    pub assigns: Vec<Assign>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateMachine {
    pub states: Vec<AnnexState>,
    pub initial: String,
    pub transitions: Vec<AnnexTransition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BehaviorAnnex {
    /// Function-local variables (`var x: int[0..3] = 0;`), visible to
    /// constraints, guards, and assignments of this function only.
    pub parameters: Vec<VariableDecl>,
    pub constraints: Vec<Constraint>,
    pub machine: Option<StateMachine>,
    /// `compute target := value;` — applied when the function publishes.
    pub computations: Vec<Assign>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisFunction {
    pub name: String,
    pub trigger: TriggerPolicy,
    pub ports: Vec<Port>,
    pub annex: Option<BehaviorAnnex>,
}

impl AnalysisFunction {
    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn in_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.direction == Direction::In)
    }

    pub fn out_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.direction == Direction::Out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connector {
    pub src_fn: String,
    pub src_port: String,
    pub dst_fn: String,
    pub dst_port: String,
}

impl Connector {
    /// Stable channel / variable stem: `src_sport__dst_dport`.
    pub fn stem(&self) -> String {
        format!("{}_{}__{}_{}", self.src_fn, self.src_port, self.dst_fn, self.dst_port)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvWrite {
    pub dst_fn: String,
    pub dst_port: String,
    pub value: ValueExpr,
    /// `Some(p)`: repeat every `p` time units (first write at `t = p`);
    /// `None`: a single write at `t = 0`.
    pub every: Option<u32>,
}

impl EnvWrite {
    pub fn stem(&self, env_name: &str) -> String {
        format!("{}__{}_{}", env_name, self.dst_fn, self.dst_port)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvSpec {
    /// Names the environment automaton in the transformed network.
    pub name: String,
    pub writes: Vec<EnvWrite>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaaModel {
    pub name: String,
    pub functions: Vec<AnalysisFunction>,
    pub connectors: Vec<Connector>,
    /// Model-level shared variables, readable and writable from any annex.
    pub globals: Vec<VariableDecl>,
    pub environment: Option<EnvSpec>,
}

impl FaaModel {
    pub fn function(&self, name: &str) -> Option<&AnalysisFunction> {
        self.functions.iter().find(|f| f.name == name)
    }
}

/// The function-local clock is addressed by this reserved name in annex
/// expressions and queries.
pub const CLOCK_NAME: &str = "clk";

// ---------------------------------------------------------------------------
// validation

/// Structural rule table over a parsed model. Errors block transformation;
/// warnings and infos describe reductions and suspicious-but-legal shapes.
pub fn validate_model(model: &FaaModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut global_names = HashSet::new();
    for g in &model.globals {
        if g.name == CLOCK_NAME {
            out.push(Diagnostic::error(
                "RESERVED-NAME",
                format!("global {}", g.name),
                format!("`{CLOCK_NAME}` names the function clock and cannot be a global"),
            ));
        }
        if !global_names.insert(g.name.clone()) {
            out.push(Diagnostic::error(
                "DUP-GLOBAL",
                format!("global {}", g.name),
                format!("global `{}` is declared twice", g.name),
            ));
        }
        if !g.ty.contains(g.init) {
            out.push(Diagnostic::error(
                "INIT-OUT-OF-RANGE",
                format!("global {}", g.name),
                format!("initial value {} lies outside {}", g.init, g.ty),
            ));
        }
    }

    let mut fn_names = HashSet::new();
    for f in &model.functions {
        if !fn_names.insert(f.name.as_str()) {
            out.push(Diagnostic::error(
                "DUP-FUNCTION",
                format!("function {}", f.name),
                format!("function `{}` is declared twice", f.name),
            ));
        }
        validate_function(f, model, &mut out);
    }

    // feeds per (fn, in-port): connectors first, then env writes — the order
    // read edges copy them in.
    let mut feed_count: HashMap<(String, String), u32> = HashMap::new();
    for c in &model.connectors {
        validate_connector(model, c, &mut out);
        *feed_count.entry((c.dst_fn.clone(), c.dst_port.clone())).or_default() += 1;
    }
    if let Some(env) = &model.environment {
        for w in &env.writes {
            validate_env_write(model, w, &mut out);
            *feed_count.entry((w.dst_fn.clone(), w.dst_port.clone())).or_default() += 1;
        }
    }

    for ((fn_name, port), n) in feed_count.iter().filter(|(_, n)| **n > 1) {
        out.push(Diagnostic::warning(
            "FAN-IN",
            format!("function {fn_name} port {port}"),
            format!(
                "in-port `{port}` is fed by {n} sources; reads copy them in \
                 declaration order and the last write wins"
            ),
        ));
    }

    // event-triggered functions need some activation source to ever run
    for f in &model.functions {
        if matches!(f.trigger, TriggerPolicy::Event { .. }) {
            let fed = f.ports.iter().any(|p| {
                p.is_trigger
                    && p.direction == Direction::In
                    && feed_count.contains_key(&(f.name.clone(), p.name.clone()))
            });
            if !fed {
                out.push(Diagnostic::warning(
                    "TRIGGER-IN-UNFED",
                    format!("function {}", f.name),
                    format!(
                        "event-triggered function `{}` has no fed trigger in-port \
                         and will never activate",
                        f.name
                    ),
                ));
            }
        }
    }

    out
}

fn validate_function(f: &AnalysisFunction, model: &FaaModel, out: &mut Vec<Diagnostic>) {
    let here = |suffix: String| format!("function {} {}", f.name, suffix);

    if let TriggerPolicy::Time { period, exec } = f.trigger {
        if exec >= period {
            out.push(Diagnostic::error(
                "TIME-PERIOD-LE-EXEC",
                here("trigger".into()),
                format!("execution time {exec} must be strictly less than period {period}"),
            ));
        }
    }

    let mut port_names = HashSet::new();
    for p in &f.ports {
        if p.name == CLOCK_NAME {
            out.push(Diagnostic::error(
                "RESERVED-NAME",
                here(format!("port {}", p.name)),
                format!("`{CLOCK_NAME}` names the function's clock and cannot be a port"),
            ));
        }
        if !port_names.insert(p.name.as_str()) {
            out.push(Diagnostic::error(
                "DUP-PORT",
                here(format!("port {}", p.name)),
                format!("port `{}` is declared twice", p.name),
            ));
        }
        if p.is_trigger && p.direction == Direction::Out {
            out.push(Diagnostic::error(
                "TRIGGER-NOT-INPUT",
                here(format!("port {}", p.name)),
                "the `trigger` modifier applies to in-ports only; an out-port \
                 becomes a trigger source by connecting it to a trigger in-port",
            ));
        }
        if p.kind == PortKind::ClientServer {
            out.push(Diagnostic::info(
                "CSPORT-REDUCED",
                here(format!("port {}", p.name)),
                format!(
                    "client-server port `{}` is treated as a flow port with \
                     trigger semantics",
                    p.name
                ),
            ));
        }
        if let DataType::Int { lo, hi } = p.ty {
            if lo > hi {
                out.push(Diagnostic::error(
                    "RANGE-EMPTY",
                    here(format!("port {}", p.name)),
                    format!("port `{}` has empty range {lo}..{hi}", p.name),
                ));
            }
        }
    }

    if let Some(annex) = &f.annex {
        validate_annex(f, annex, model, out);
    }
}

fn validate_annex(
    f: &AnalysisFunction,
    annex: &BehaviorAnnex,
    model: &FaaModel,
    out: &mut Vec<Diagnostic>,
) {
    let here = |suffix: String| format!("function {} annex {}", f.name, suffix);

    let mut local_names = HashSet::new();
    for v in &annex.parameters {
        if v.name == CLOCK_NAME {
            out.push(Diagnostic::error(
                "RESERVED-NAME",
                here(format!("var {}", v.name)),
                format!("`{CLOCK_NAME}` names the function's clock and cannot be a variable"),
            ));
        }
        if !local_names.insert(v.name.as_str()) || f.port(&v.name).is_some() {
            out.push(Diagnostic::error(
                "DUP-VAR",
                here(format!("var {}", v.name)),
                format!("`{}` clashes with another variable or port", v.name),
            ));
        }
        if model.globals.iter().any(|g| g.name == v.name) {
            out.push(Diagnostic::warning(
                "SHADOWS-GLOBAL",
                here(format!("var {}", v.name)),
                format!("`{}` shadows a model-level global of the same name", v.name),
            ));
        }
        if !v.ty.contains(v.init) {
            out.push(Diagnostic::error(
                "INIT-OUT-OF-RANGE",
                here(format!("var {}", v.name)),
                format!("initial value {} lies outside {}", v.init, v.ty),
            ));
        }
    }

    let known = |name: &str| {
        name == CLOCK_NAME
            || f.port(name).is_some()
            || annex.parameters.iter().any(|v| v.name == name)
            || model.globals.iter().any(|g| g.name == name)
    };
    let mut check_expr = |e: &Expr, where_: String, out: &mut Vec<Diagnostic>| {
        let mut missing = Vec::new();
        e.visit_idents(&mut |id| {
            if !known(id) {
                missing.push(id.to_string());
            }
        });
        for id in missing {
            out.push(Diagnostic::error(
                "UNKNOWN-IDENT",
                here(where_.clone()),
                format!("`{id}` is not a port, annex variable, or `{CLOCK_NAME}`"),
            ));
        }
    };

    for (i, c) in annex.constraints.iter().enumerate() {
        check_expr(&c.expr, format!("constraint #{i}"), out);
    }

    let mut check_assign = |a: &Assign, where_: String, out: &mut Vec<Diagnostic>| {
        if a.target == CLOCK_NAME {
            out.push(Diagnostic::error(
                "ASSIGN-TO-CLOCK",
                here(where_.clone()),
                "the function clock cannot be assigned in the annex",
            ));
            return;
        }
        match f.port(&a.target) {
            Some(p) if p.direction == Direction::In => {
                out.push(Diagnostic::error(
                    "ASSIGN-TO-INPUT",
                    here(where_.clone()),
                    format!("in-port `{}` is read-only inside the annex", a.target),
                ));
            }
            Some(p) => check_assign_value(p.ty, a, &here(where_.clone()), known, out),
            None => {
                let var = annex
                    .parameters
                    .iter()
                    .find(|v| v.name == a.target)
                    .or_else(|| model.globals.iter().find(|g| g.name == a.target));
                match var {
                    Some(v) => check_assign_value(v.ty, a, &here(where_.clone()), known, out),
                    None => out.push(Diagnostic::error(
                        "UNKNOWN-IDENT",
                        here(where_.clone()),
                        format!(
                            "assignment target `{}` is not an out-port, variable, or global",
                            a.target
                        ),
                    )),
                }
            }
        }
    };

    for (i, comp) in annex.computations.iter().enumerate() {
        check_assign(comp, format!("compute #{i}"), out);
    }

    if let Some(sm) = &annex.machine {
        let mut state_names = HashSet::new();
        for s in &sm.states {
            if !state_names.insert(s.name.as_str()) {
                out.push(Diagnostic::error(
                    "DUP-STATE",
                    here(format!("state {}", s.name)),
                    format!("state `{}` is declared twice", s.name),
                ));
            }
            if s.budget.is_some() && matches!(f.trigger, TriggerPolicy::Time { .. }) {
                out.push(Diagnostic::warning(
                    "ANNEX-BUDGET-IGNORED",
                    here(format!("state {}", s.name)),
                    "state budgets refine event-triggered execution; the \
                     time-triggered rule runs the whole machine instantaneously",
                ));
            }
        }
        if !state_names.contains(sm.initial.as_str()) {
            out.push(Diagnostic::error(
                "ANNEX-INITIAL",
                here("machine".into()),
                format!("initial state `{}` is not declared", sm.initial),
            ));
        }
        for (i, t) in sm.transitions.iter().enumerate() {
            for end in [&t.from, &t.to] {
                if !state_names.contains(end.as_str()) {
                    out.push(Diagnostic::error(
                        "ANNEX-UNKNOWN-STATE",
                        here(format!("transition #{i}")),
                        format!("transition references undeclared state `{end}`"),
                    ));
                }
            }
            check_expr(&t.guard, format!("transition #{i} guard"), out);
            for a in &t.assigns {
                check_assign(a, format!("transition #{i}"), out);
            }
        }
    }
}

fn check_assign_value(
    ty: DataType,
    a: &Assign,
    loc: &str,
    known: impl Fn(&str) -> bool,
    out: &mut Vec<Diagnostic>,
) {
    match &a.value {
        ValueExpr::Int(v) => {
            if ty == DataType::Bool {
                out.push(Diagnostic::error(
                    "TYPE-MISMATCH",
                    loc,
                    format!("`{}` is bool but is assigned integer {v}", a.target),
                ));
            } else if !ty.contains(*v) {
                out.push(Diagnostic::error(
                    "VALUE-OUT-OF-RANGE",
                    loc,
                    format!("{v} lies outside the range of `{}` ({ty})", a.target),
                ));
            }
        }
        ValueExpr::Bool(_) => {
            if ty != DataType::Bool {
                out.push(Diagnostic::error(
                    "TYPE-MISMATCH",
                    loc,
                    format!("`{}` is {ty} but is assigned a boolean", a.target),
                ));
            }
        }
        ValueExpr::Var(v) => {
            if v == CLOCK_NAME {
                out.push(Diagnostic::error(
                    "TYPE-MISMATCH",
                    loc,
                    "the clock cannot appear on the right-hand side of an assignment",
                ));
            } else if !known(v) {
                out.push(Diagnostic::error(
                    "UNKNOWN-IDENT",
                    loc,
                    format!("`{v}` is not a port, annex variable, or `{CLOCK_NAME}`"),
                ));
            }
        }
    }
}

fn validate_connector(model: &FaaModel, c: &Connector, out: &mut Vec<Diagnostic>) {
    let loc = format!("connect {}.{} -> {}.{}", c.src_fn, c.src_port, c.dst_fn, c.dst_port);
    let src = model.function(&c.src_fn);
    let dst = model.function(&c.dst_fn);
    if src.is_none() || dst.is_none() {
        let missing = if src.is_none() { &c.src_fn } else { &c.dst_fn };
        out.push(Diagnostic::error(
            "CONNECTOR-UNKNOWN",
            loc,
            format!("function `{missing}` is not declared"),
        ));
        return;
    }
    let (src, dst) = (src.unwrap(), dst.unwrap());
    let sp = src.port(&c.src_port);
    let dp = dst.port(&c.dst_port);
    if sp.is_none() || dp.is_none() {
        let (f, p) =
            if sp.is_none() { (&c.src_fn, &c.src_port) } else { (&c.dst_fn, &c.dst_port) };
        out.push(Diagnostic::error(
            "CONNECTOR-UNKNOWN",
            loc,
            format!("function `{f}` has no port `{p}`"),
        ));
        return;
    }
    let (sp, dp) = (sp.unwrap(), dp.unwrap());
    if sp.direction != Direction::Out {
        out.push(Diagnostic::error(
            "CONNECTOR-DIRECTION",
            loc.clone(),
            format!("source port `{}.{}` is not an out-port", c.src_fn, c.src_port),
        ));
    }
    if dp.direction != Direction::In {
        out.push(Diagnostic::error(
            "CONNECTOR-DIRECTION",
            loc.clone(),
            format!("target port `{}.{}` is not an in-port", c.dst_fn, c.dst_port),
        ));
    }
    if sp.ty != dp.ty {
        out.push(Diagnostic::error(
            "CONNECTOR-TYPE-MISMATCH",
            loc,
            format!("source is {} but target is {}", sp.ty, dp.ty),
        ));
    }
}

fn validate_env_write(model: &FaaModel, w: &EnvWrite, out: &mut Vec<Diagnostic>) {
    let loc = format!("env write {}.{}", w.dst_fn, w.dst_port);
    if w.every == Some(0) {
        out.push(Diagnostic::error(
            "ENV-PERIOD-ZERO",
            loc.clone(),
            "`every 0` would fire infinitely often at time zero".to_string(),
        ));
    }
    let Some(f) = model.function(&w.dst_fn) else {
        out.push(Diagnostic::error(
            "ENV-UNKNOWN-TARGET",
            loc,
            format!("function `{}` is not declared", w.dst_fn),
        ));
        return;
    };
    let Some(p) = f.port(&w.dst_port) else {
        out.push(Diagnostic::error(
            "ENV-UNKNOWN-TARGET",
            loc,
            format!("function `{}` has no port `{}`", w.dst_fn, w.dst_port),
        ));
        return;
    };
    if p.direction != Direction::In {
        out.push(Diagnostic::error(
            "ENV-WRITE-TO-OUTPUT",
            loc.clone(),
            format!("`{}.{}` is an out-port", w.dst_fn, w.dst_port),
        ));
    }
    match &w.value {
        ValueExpr::Int(v) => {
            if p.ty == DataType::Bool {
                out.push(Diagnostic::error(
                    "ENV-TYPE-MISMATCH",
                    loc,
                    format!("port is bool but the write value is integer {v}"),
                ));
            } else if !p.ty.contains(*v) {
                out.push(Diagnostic::error(
                    "ENV-VALUE-OUT-OF-RANGE",
                    loc,
                    format!("{v} lies outside the port range ({})", p.ty),
                ));
            }
        }
        ValueExpr::Bool(_) => {
            if p.ty != DataType::Bool {
                out.push(Diagnostic::error(
                    "ENV-TYPE-MISMATCH",
                    loc,
                    format!("port is {} but the write value is a boolean", p.ty),
                ));
            }
        }
        ValueExpr::Var(v) => {
            out.push(Diagnostic::error(
                "ENV-TYPE-MISMATCH",
                loc,
                format!("environment writes take literal values, not `{v}`"),
            ));
        }
    }
}
