//! Timed-automata network representation.
//!
//! The shape follows the usual UPPAAL-style formalism: a network of automata
//! over broadcast channels and bounded integer variables, each automaton a
//! `(L, l0, VC, VD, E, I)` tuple. Guards keep their clock conjuncts separate
//! from the data expression so the zone engine can intersect zones without
//! case-splitting; location invariants are conjunctions of upper bounds on
//! clocks, enforced by [`validate_ta`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::adl::{Diagnostic, Severity};

/// Comparison operator for data and clock atoms. `!=` is deliberately
/// absent: atoms are `<, <=, ==, >=, >` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn eval(self, l: i64, r: i64) -> bool {
        match self {
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Eq => l == r,
            CmpOp::Ge => l >= r,
            CmpOp::Gt => l > r,
        }
    }

    /// Mirror image under operand swap (`a < b` ⇔ `b > a`).
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Gt => CmpOp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// Bounded integer variable; booleans are modelled as `0..1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub init: i64,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, lo: i64, hi: i64, init: i64) -> VarDecl {
        VarDecl { name: name.into(), lo, hi, init }
    }
}

/// Broadcast channel. The optional alias carries the port-role name used in
/// dumps (`TimeTriggerIn`, `DesiredEventTrigger`, ...); it has no semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelDecl {
    pub name: String,
    pub alias: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocationKind {
    Normal,
    /// Time may not pass, interleaving with other automata allowed.
    Urgent,
    /// Time may not pass and edges from committed locations have priority.
    Committed,
}

/// Single upper- or lower-bound clock atom `clock ⋈ const`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockCond {
    pub clock: String,
    pub op: CmpOp,
    pub bound: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub kind: LocationKind,
    /// Conjunction of upper-bound clock atoms (`<=`/`<` only).
    pub invariant: Vec<ClockCond>,
}

impl Location {
    pub fn normal(name: impl Into<String>) -> Location {
        Location { name: name.into(), kind: LocationKind::Normal, invariant: Vec::new() }
    }

    pub fn committed(name: impl Into<String>) -> Location {
        Location { name: name.into(), kind: LocationKind::Committed, invariant: Vec::new() }
    }

    pub fn with_invariant(mut self, clock: &str, op: CmpOp, bound: i64) -> Location {
        self.invariant.push(ClockCond { clock: clock.into(), op, bound });
        self
    }
}

/// Either an integer literal or a variable read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Const(i64),
    Var(String),
}

/// Boolean expression over data variables (no clocks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DataExpr {
    Lit(bool),
    Cmp { lhs: Operand, op: CmpOp, rhs: Operand },
    Not(Box<DataExpr>),
    And(Box<DataExpr>, Box<DataExpr>),
    Or(Box<DataExpr>, Box<DataExpr>),
    Imply(Box<DataExpr>, Box<DataExpr>),
}

impl DataExpr {
    pub fn cmp(lhs: Operand, op: CmpOp, rhs: Operand) -> DataExpr {
        DataExpr::Cmp { lhs, op, rhs }
    }

    pub fn var_eq(name: &str, c: i64) -> DataExpr {
        DataExpr::cmp(Operand::Var(name.into()), CmpOp::Eq, Operand::Const(c))
    }

    fn visit_vars(&self, f: &mut impl FnMut(&str)) {
        match self {
            DataExpr::Lit(_) => {}
            DataExpr::Cmp { lhs, rhs, .. } => {
                for op in [lhs, rhs] {
                    if let Operand::Var(v) = op {
                        f(v);
                    }
                }
            }
            DataExpr::Not(e) => e.visit_vars(f),
            DataExpr::And(a, b) | DataExpr::Or(a, b) | DataExpr::Imply(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }
}

/// Edge guard: a data expression conjoined with clock atoms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Guard {
    pub data: Option<DataExpr>,
    pub clocks: Vec<ClockCond>,
}

impl Guard {
    pub fn is_trivial(&self) -> bool {
        self.data.is_none() && self.clocks.is_empty()
    }

    pub fn clock(clock: &str, op: CmpOp, bound: i64) -> Guard {
        Guard { data: None, clocks: vec![ClockCond { clock: clock.into(), op, bound }] }
    }

    pub fn data(e: DataExpr) -> Guard {
        Guard { data: Some(e), clocks: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyncDir {
    Emit,
    Receive,
}

/// At most one channel action per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelAction {
    pub channel: String,
    pub dir: SyncDir,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Update {
    /// `var := value` where value is a constant or another variable.
    Assign { var: String, value: Operand },
    /// `clock := c` with `c ≥ 0` (0 in all generated models).
    ResetClock { clock: String, to: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub guard: Guard,
    pub action: Option<ChannelAction>,
    pub updates: Vec<Update>,
}

impl Edge {
    pub fn new(from: usize, to: usize) -> Edge {
        Edge { from, to, guard: Guard::default(), action: None, updates: Vec::new() }
    }

    pub fn emits(&self, channel: &str) -> bool {
        matches!(&self.action, Some(a) if a.dir == SyncDir::Emit && a.channel == channel)
    }

    pub fn is_emit(&self) -> bool {
        matches!(&self.action, Some(a) if a.dir == SyncDir::Emit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedAutomaton {
    pub name: String,
    pub locations: Vec<Location>,
    pub initial: usize,
    pub clocks: Vec<String>,
    pub locals: Vec<VarDecl>,
    pub edges: Vec<Edge>,
}

impl TimedAutomaton {
    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    pub name: String,
    pub automata: Vec<TimedAutomaton>,
    pub channels: Vec<ChannelDecl>,
    pub globals: Vec<VarDecl>,
}

impl Network {
    pub fn automaton(&self, name: &str) -> Option<&TimedAutomaton> {
        self.automata.iter().find(|a| a.name == name)
    }

    pub fn channel_names(&self) -> HashSet<&str> {
        self.channels.iter().map(|c| c.name.as_str()).collect()
    }
}

// ---------------------------------------------------------------------------
// validation

fn diag(rule: &str, location: String, message: String) -> Diagnostic {
    Diagnostic { rule: rule.into(), severity: Severity::Error, location, message, span: None }
}

/// Structural well-formedness of a network. Returns diagnostics instead of
/// failing: an empty result means the checker and exporter accept the input.
pub fn validate_ta(net: &Network) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let channels = net.channel_names();

    let mut seen_chan = HashSet::new();
    for c in &net.channels {
        if !seen_chan.insert(c.name.as_str()) {
            out.push(diag(
                "DUP-CHANNEL",
                format!("channel {}", c.name),
                format!("channel `{}` is declared twice", c.name),
            ));
        }
    }

    let mut global_names = HashSet::new();
    for g in &net.globals {
        if !global_names.insert(g.name.as_str()) {
            out.push(diag(
                "DUP-GLOBAL",
                format!("global {}", g.name),
                format!("global variable `{}` is declared twice", g.name),
            ));
        }
        check_var_decl(g, &format!("global {}", g.name), &mut out);
    }

    let mut seen_auto = HashSet::new();
    for a in &net.automata {
        if !seen_auto.insert(a.name.as_str()) {
            out.push(diag(
                "DUP-AUTOMATON",
                format!("automaton {}", a.name),
                format!("automaton `{}` is declared twice", a.name),
            ));
        }
        validate_automaton(a, &global_names, &channels, &mut out);
    }
    out
}

fn check_var_decl(v: &VarDecl, loc: &str, out: &mut Vec<Diagnostic>) {
    if v.lo > v.hi {
        out.push(diag(
            "RANGE-EMPTY",
            loc.into(),
            format!("variable `{}` has empty range {}..{}", v.name, v.lo, v.hi),
        ));
    } else if v.init < v.lo || v.init > v.hi {
        out.push(diag(
            "INIT-OUT-OF-RANGE",
            loc.into(),
            format!("initial value {} of `{}` lies outside {}..{}", v.init, v.name, v.lo, v.hi),
        ));
    }
}

fn validate_automaton(
    a: &TimedAutomaton,
    globals: &HashSet<&str>,
    channels: &HashSet<&str>,
    out: &mut Vec<Diagnostic>,
) {
    let here = |suffix: String| format!("automaton {} {}", a.name, suffix);

    let mut loc_names = HashSet::new();
    for l in &a.locations {
        if !loc_names.insert(l.name.as_str()) {
            out.push(diag(
                "DUP-LOCATION",
                here(format!("location {}", l.name)),
                format!("location `{}` is declared twice", l.name),
            ));
        }
    }
    if a.initial >= a.locations.len() {
        out.push(diag(
            "BAD-INITIAL",
            here("initial".into()),
            format!("initial location index {} out of range", a.initial),
        ));
    }

    let mut names = HashSet::new();
    for c in &a.clocks {
        if !names.insert(c.as_str()) {
            out.push(diag(
                "DUP-CLOCK",
                here(format!("clock {c}")),
                format!("clock `{c}` is declared twice"),
            ));
        }
        if globals.contains(c.as_str()) {
            out.push(diag(
                "SHADOWS-GLOBAL",
                here(format!("clock {c}")),
                format!("local clock `{c}` shadows a global variable"),
            ));
        }
    }
    for v in &a.locals {
        if !names.insert(v.name.as_str()) {
            out.push(diag(
                "DUP-LOCAL",
                here(format!("local {}", v.name)),
                format!("local `{}` clashes with another local declaration", v.name),
            ));
        }
        if globals.contains(v.name.as_str()) {
            out.push(diag(
                "SHADOWS-GLOBAL",
                here(format!("local {}", v.name)),
                format!("local variable `{}` shadows a global variable", v.name),
            ));
        }
        check_var_decl(v, &here(format!("local {}", v.name)), out);
    }

    let clock_known = |c: &str| a.clocks.iter().any(|k| k == c);
    let var_known = |v: &str| a.locals.iter().any(|l| l.name == v) || globals.contains(v);

    for (li, l) in a.locations.iter().enumerate() {
        for cond in &l.invariant {
            if !matches!(cond.op, CmpOp::Le | CmpOp::Lt) {
                out.push(diag(
                    "INVARIANT-NOT-UPPER",
                    here(format!("location {}", l.name)),
                    format!(
                        "invariant on `{}` uses `{}`; only upper bounds are allowed",
                        cond.clock,
                        cond.op.symbol()
                    ),
                ));
            }
            if !clock_known(&cond.clock) {
                out.push(diag(
                    "UNDECLARED-CLOCK",
                    here(format!("location {}", l.name)),
                    format!("invariant references unknown clock `{}`", cond.clock),
                ));
            }
        }
        let _ = li;
    }

    for (ei, e) in a.edges.iter().enumerate() {
        let eloc = here(format!("edge #{ei}"));
        if e.from >= a.locations.len() || e.to >= a.locations.len() {
            out.push(diag(
                "BAD-EDGE-ENDPOINT",
                eloc.clone(),
                format!("edge #{ei} references a location index out of range"),
            ));
            continue;
        }
        for cond in &e.guard.clocks {
            if !clock_known(&cond.clock) {
                out.push(diag(
                    "UNDECLARED-CLOCK",
                    eloc.clone(),
                    format!("guard references unknown clock `{}`", cond.clock),
                ));
            }
        }
        if let Some(d) = &e.guard.data {
            let mut missing = Vec::new();
            d.visit_vars(&mut |v| {
                if !var_known(v) {
                    missing.push(v.to_string());
                }
            });
            for v in missing {
                out.push(diag(
                    "UNDECLARED-VAR",
                    eloc.clone(),
                    format!("guard references unknown variable `{v}`"),
                ));
            }
        }
        if let Some(act) = &e.action {
            if !channels.contains(act.channel.as_str()) {
                out.push(diag(
                    "UNDECLARED-CHANNEL",
                    eloc.clone(),
                    format!("edge synchronizes on undeclared channel `{}`", act.channel),
                ));
            }
            // Receivers of a broadcast are selected pointwise on the discrete
            // valuation; a clock guard would make participation zone-dependent.
            if act.dir == SyncDir::Receive && !e.guard.clocks.is_empty() {
                out.push(diag(
                    "BROADCAST-RECEIVE-CLOCK-GUARD",
                    eloc.clone(),
                    "receiving edges must not carry clock guards".into(),
                ));
            }
        }
        for u in &e.updates {
            match u {
                Update::Assign { var, value } => {
                    if !var_known(var) {
                        out.push(diag(
                            "UNDECLARED-VAR",
                            eloc.clone(),
                            format!("update assigns unknown variable `{var}`"),
                        ));
                    }
                    if let Operand::Var(v) = value {
                        if !var_known(v) {
                            out.push(diag(
                                "UNDECLARED-VAR",
                                eloc.clone(),
                                format!("update reads unknown variable `{v}`"),
                            ));
                        }
                    }
                }
                Update::ResetClock { clock, to } => {
                    if !clock_known(clock) {
                        out.push(diag(
                            "UNDECLARED-CLOCK",
                            eloc.clone(),
                            format!("reset references unknown clock `{clock}`"),
                        ));
                    }
                    if *to < 0 {
                        out.push(diag(
                            "RESET-NEGATIVE",
                            eloc.clone(),
                            format!("clock `{clock}` reset to negative constant {to}"),
                        ));
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// max clock constants

/// Largest constant each clock is compared against (guards, invariants, reset
/// constants), keyed by `(automaton index, clock name)`. Clocks never
/// compared map to 0. The zone explorer widens past these bounds.
pub fn max_clock_constants(net: &Network) -> BTreeMap<(usize, String), i64> {
    let mut max: BTreeMap<(usize, String), i64> = BTreeMap::new();
    for (ai, a) in net.automata.iter().enumerate() {
        for c in &a.clocks {
            max.insert((ai, c.clone()), 0);
        }
        let bump = |clock: &str, v: i64, max: &mut BTreeMap<(usize, String), i64>| {
            let e = max.entry((ai, clock.to_string())).or_insert(0);
            *e = (*e).max(v);
        };
        for l in &a.locations {
            for cond in &l.invariant {
                bump(&cond.clock, cond.bound, &mut max);
            }
        }
        for e in &a.edges {
            for cond in &e.guard.clocks {
                bump(&cond.clock, cond.bound, &mut max);
            }
            for u in &e.updates {
                if let Update::ResetClock { clock, to } = u {
                    bump(clock, *to, &mut max);
                }
            }
        }
    }
    max
}

// ---------------------------------------------------------------------------
// display / dump

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Const(c) => write!(f, "{c}"),
            Operand::Var(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Display for ClockCond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.clock, self.op.symbol(), self.bound)
    }
}

// precedence: imply (1, right) < or (2) < and (3) < not (4) < atoms (5)
fn fmt_data(e: &DataExpr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let own = match e {
        DataExpr::Imply(..) => 1,
        DataExpr::Or(..) => 2,
        DataExpr::And(..) => 3,
        DataExpr::Not(..) => 4,
        _ => 5,
    };
    let parens = own < prec;
    if parens {
        write!(f, "(")?;
    }
    match e {
        DataExpr::Lit(b) => write!(f, "{b}")?,
        DataExpr::Cmp { lhs, op, rhs } => write!(f, "{} {} {}", lhs, op.symbol(), rhs)?,
        DataExpr::Not(inner) => {
            write!(f, "not ")?;
            fmt_data(inner, 4, f)?;
        }
        DataExpr::And(a, b) => {
            fmt_data(a, 3, f)?;
            write!(f, " and ")?;
            fmt_data(b, 4, f)?;
        }
        DataExpr::Or(a, b) => {
            fmt_data(a, 2, f)?;
            write!(f, " or ")?;
            fmt_data(b, 3, f)?;
        }
        DataExpr::Imply(a, b) => {
            fmt_data(a, 2, f)?;
            write!(f, " imply ")?;
            fmt_data(b, 1, f)?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for DataExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_data(self, 0, f)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if let Some(d) = &self.data {
            write!(f, "{d}")?;
            first = false;
        }
        for c in &self.clocks {
            if !first {
                write!(f, " and ")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        if first {
            write!(f, "true")?;
        }
        Ok(())
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::Assign { var, value } => write!(f, "{var} := {value}"),
            Update::ResetClock { clock, to } => write!(f, "{clock} := {to}"),
        }
    }
}

/// Deterministic plain-text dump of the network; same input, same bytes.
pub fn dump(net: &Network) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "network {}", net.name);
    for g in &net.globals {
        let _ = writeln!(w, "global int[{}..{}] {} = {}", g.lo, g.hi, g.name, g.init);
    }
    for c in &net.channels {
        match &c.alias {
            Some(a) => {
                let _ = writeln!(w, "broadcast chan {}  // {}", c.name, a);
            }
            None => {
                let _ = writeln!(w, "broadcast chan {}", c.name);
            }
        }
    }
    for a in &net.automata {
        let _ = writeln!(w, "\nautomaton {}", a.name);
        for c in &a.clocks {
            let _ = writeln!(w, "  clock {c}");
        }
        for v in &a.locals {
            let _ = writeln!(w, "  local int[{}..{}] {} = {}", v.lo, v.hi, v.name, v.init);
        }
        for (i, l) in a.locations.iter().enumerate() {
            let mut line = format!("  location {}", l.name);
            match l.kind {
                LocationKind::Normal => {}
                LocationKind::Urgent => line.push_str(" {urgent}"),
                LocationKind::Committed => line.push_str(" {committed}"),
            }
            if i == a.initial {
                line.push_str(" {initial}");
            }
            if !l.invariant.is_empty() {
                let inv: Vec<String> = l.invariant.iter().map(|c| c.to_string()).collect();
                line.push_str(&format!(" inv {}", inv.join(" and ")));
            }
            let _ = writeln!(w, "{line}");
        }
        for e in &a.edges {
            let mut line = format!("  edge {} --", a.locations[e.from].name);
            if !e.guard.is_trivial() {
                line.push_str(&format!(" [{}]", e.guard));
            }
            if let Some(act) = &e.action {
                let mark = match act.dir {
                    SyncDir::Emit => "!",
                    SyncDir::Receive => "?",
                };
                line.push_str(&format!(" {}{}", act.channel, mark));
            }
            if !e.updates.is_empty() {
                let ups: Vec<String> = e.updates.iter().map(|u| u.to_string()).collect();
                line.push_str(&format!(" / {}", ups.join(", ")));
            }
            line.push_str(&format!(" --> {}", a.locations[e.to].name));
            let _ = writeln!(w, "{line}");
        }
    }
    s
}

/// Quick structural lookup used by the checker and exporter: channel name →
/// index.
pub fn channel_index(net: &Network) -> HashMap<&str, usize> {
    net.channels.iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Network {
        let a = TimedAutomaton {
            name: "A".into(),
            locations: vec![
                Location::normal("Off").with_invariant("x", CmpOp::Le, 3),
                Location::committed("On"),
            ],
            initial: 0,
            clocks: vec!["x".into()],
            locals: vec![VarDecl::new("v", 0, 3, 0)],
            edges: vec![Edge {
                from: 0,
                to: 1,
                guard: Guard::clock("x", CmpOp::Ge, 2),
                action: Some(ChannelAction { channel: "go".into(), dir: SyncDir::Emit }),
                updates: vec![
                    Update::Assign { var: "v".into(), value: Operand::Const(1) },
                    Update::ResetClock { clock: "x".into(), to: 0 },
                ],
            }],
        };
        Network {
            name: "tiny".into(),
            automata: vec![a],
            channels: vec![ChannelDecl { name: "go".into(), alias: None }],
            globals: vec![VarDecl::new("g", 0, 1, 0)],
        }
    }

    #[test]
    fn well_formed_network_validates_cleanly() {
        assert!(validate_ta(&tiny()).is_empty());
    }

    #[test]
    fn lower_bound_invariant_is_rejected() {
        let mut net = tiny();
        net.automata[0].locations[0].invariant[0].op = CmpOp::Ge;
        let diags = validate_ta(&net);
        assert!(diags.iter().any(|d| d.rule == "INVARIANT-NOT-UPPER"));
    }

    #[test]
    fn undeclared_channel_is_reported() {
        let mut net = tiny();
        net.channels.clear();
        let diags = validate_ta(&net);
        assert!(diags.iter().any(|d| d.rule == "UNDECLARED-CHANNEL"));
    }

    #[test]
    fn receive_edges_reject_clock_guards() {
        let mut net = tiny();
        net.automata[0].edges[0].action =
            Some(ChannelAction { channel: "go".into(), dir: SyncDir::Receive });
        let diags = validate_ta(&net);
        assert!(diags.iter().any(|d| d.rule == "BROADCAST-RECEIVE-CLOCK-GUARD"));
    }

    #[test]
    fn shadowing_and_ranges_are_reported() {
        let mut net = tiny();
        net.automata[0].locals.push(VarDecl::new("g", 0, 1, 0));
        net.automata[0].locals.push(VarDecl::new("w", 3, 1, 0));
        let diags = validate_ta(&net);
        assert!(diags.iter().any(|d| d.rule == "SHADOWS-GLOBAL"));
        assert!(diags.iter().any(|d| d.rule == "RANGE-EMPTY"));
    }

    #[test]
    fn max_constants_cover_guards_and_invariants() {
        let net = tiny();
        let max = max_clock_constants(&net);
        // invariant x<=3 dominates guard x>=2 and reset-to-0
        assert_eq!(max[&(0usize, "x".to_string())], 3);
    }

    #[test]
    fn dump_is_deterministic_and_readable() {
        let net = tiny();
        let d1 = dump(&net);
        let d2 = dump(&net);
        assert_eq!(d1, d2);
        assert!(d1.contains("edge Off -- [x >= 2] go! / v := 1, x := 0 --> On"));
        assert!(d1.contains("location Off {initial} inv x <= 3"));
    }

    #[test]
    fn expression_printer_parenthesizes_by_precedence() {
        let e = DataExpr::Imply(
            Box::new(DataExpr::Or(
                Box::new(DataExpr::var_eq("a", 1)),
                Box::new(DataExpr::And(
                    Box::new(DataExpr::var_eq("b", 2)),
                    Box::new(DataExpr::Not(Box::new(DataExpr::var_eq("c", 3)))),
                )),
            )),
            Box::new(DataExpr::Lit(false)),
        );
        assert_eq!(e.to_string(), "a == 1 or b == 2 and not c == 3 imply false");
        let f = DataExpr::And(
            Box::new(DataExpr::Or(
                Box::new(DataExpr::var_eq("a", 1)),
                Box::new(DataExpr::var_eq("b", 2)),
            )),
            Box::new(DataExpr::var_eq("c", 3)),
        );
        assert_eq!(f.to_string(), "(a == 1 or b == 2) and c == 3");
    }
}
