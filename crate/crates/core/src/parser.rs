//! Hand-rolled lexer and recursive-descent parsers for the model DSL and the
//! query language.
//!
//! The model grammar (LL(1), `//` comments, semicolon-terminated):
//!
//! ```text
//! model      := "faa" IDENT "{" { global | function | connector | env } "}"
//! global     := "var" IDENT ":" type "=" value ";"
//! function   := "function" IDENT "{" trigger { port | vardecl | annex } "}"
//! trigger    := "trigger" ("time" "period" INT | "event") "exec" INT ";"
//! port       := ("in"|"out") { "trigger" | "cs" } "port" IDENT ":" type ";"
//! vardecl    := "var" IDENT ":" type "=" value ";"
//! type       := "bool" | "int" "[" INT ".." INT "]" | "int"        (bare int = 0..255)
//! annex      := "annex" "{" { prestmt } "}"
//! prestmt    := ("pre"|"post"|"invariant") expr ";"
//!             | "state" IDENT ["initial"] ["budget" INT] "{" { trans } "}"
//!             | "compute" assigns ";"
//! trans      := "on" expr ["/" assigns] "->" IDENT ";"
//! connector  := "connect" IDENT "." IDENT "->" IDENT "." IDENT ";"
//! env        := "env" IDENT "{" { "write" IDENT "." IDENT ":=" value ["every" INT] ";" } "}"
//! assigns    := IDENT ":=" value { "," IDENT ":=" value }
//! value      := ["-"] INT | "true" | "false" | IDENT
//! expr       := or ["imply" expr]            (imply right-associative, loosest)
//! or         := and { "or" and }
//! and        := unary { "and" unary }
//! unary      := "not" unary | "(" expr ")" | atom
//! atom       := operand [("<"|"<="|"="|"=="|">="|">") operand]
//! operand    := ["-"] INT | "true" | "false" | IDENT
//! ```
//!
//! A bare identifier atom is a boolean test (sugar for `x == true`); a
//! comparison with the literal on the left is normalized by flipping it.
//!
//! Queries are one per line: `A[] expr`, `E<> expr`, `expr --> expr`,
//! `response expr => expr within INT`; `A[] not deadlock` becomes the
//! dedicated deadlock-freedom kind. Atoms may dot-qualify into a process
//! (`Proc.Loc` location tests, `Proc.var` / `Proc.clk` comparisons).

use std::fmt;

use crate::adl::{
    AnalysisFunction, Assign, AnnexState, AnnexTransition, BehaviorAnnex, Connector, Constraint,
    ConstraintKind, DataType, Direction, EnvSpec, EnvWrite, Expr, FaaModel, Port, PortKind, Span,
    StateMachine, TriggerPolicy, ValueExpr, VariableDecl,
};
use crate::ta::CmpOp;

// ---------------------------------------------------------------------------
// errors

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: expected {}, found {}",
            self.span.line, self.span.col, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

// ---------------------------------------------------------------------------
// lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    // keywords
    Faa,
    Function,
    Trigger,
    Time,
    Event,
    Period,
    Exec,
    In,
    Out,
    PortKw,
    Cs,
    BoolTy,
    IntTy,
    Var,
    Annex,
    Pre,
    Post,
    InvariantKw,
    State,
    Initial,
    Budget,
    On,
    Compute,
    Connect,
    Env,
    WriteKw,
    Every,
    True,
    False,
    And,
    Or,
    Not,
    Imply,
    Response,
    Within,
    Deadlock,
    // punctuation
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Dot,
    DotDot,
    Slash,
    Assign,    // :=
    Arrow,     // ->
    LongArrow, // -->
    FatArrow,  // =>
    Lt,
    Le,
    Gt,
    Ge,
    EqEq, // == (a single = is accepted too)
    Minus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Faa => "faa",
            Tok::Function => "function",
            Tok::Trigger => "trigger",
            Tok::Time => "time",
            Tok::Event => "event",
            Tok::Period => "period",
            Tok::Exec => "exec",
            Tok::In => "in",
            Tok::Out => "out",
            Tok::PortKw => "port",
            Tok::Cs => "cs",
            Tok::BoolTy => "bool",
            Tok::IntTy => "int",
            Tok::Var => "var",
            Tok::Annex => "annex",
            Tok::Pre => "pre",
            Tok::Post => "post",
            Tok::InvariantKw => "invariant",
            Tok::State => "state",
            Tok::Initial => "initial",
            Tok::Budget => "budget",
            Tok::On => "on",
            Tok::Compute => "compute",
            Tok::Connect => "connect",
            Tok::Env => "env",
            Tok::WriteKw => "write",
            Tok::Every => "every",
            Tok::True => "true",
            Tok::False => "false",
            Tok::And => "and",
            Tok::Or => "or",
            Tok::Not => "not",
            Tok::Imply => "imply",
            Tok::Response => "response",
            Tok::Within => "within",
            Tok::Deadlock => "deadlock",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Slash => "/",
            Tok::Assign => ":=",
            Tok::Arrow => "->",
            Tok::LongArrow => "-->",
            Tok::FatArrow => "=>",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Minus => "-",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => unreachable!(),
        }
    }
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "faa" => Tok::Faa,
        "function" => Tok::Function,
        "trigger" => Tok::Trigger,
        "time" => Tok::Time,
        "event" => Tok::Event,
        "period" => Tok::Period,
        "exec" => Tok::Exec,
        "in" => Tok::In,
        "out" => Tok::Out,
        "port" => Tok::PortKw,
        "cs" => Tok::Cs,
        "bool" => Tok::BoolTy,
        "int" => Tok::IntTy,
        "var" => Tok::Var,
        "annex" => Tok::Annex,
        "pre" => Tok::Pre,
        "post" => Tok::Post,
        "invariant" => Tok::InvariantKw,
        "state" => Tok::State,
        "initial" => Tok::Initial,
        "budget" => Tok::Budget,
        "on" => Tok::On,
        "compute" => Tok::Compute,
        "connect" => Tok::Connect,
        "env" => Tok::Env,
        "write" => Tok::WriteKw,
        "every" => Tok::Every,
        "true" => Tok::True,
        "false" => Tok::False,
        "and" => Tok::And,
        "or" => Tok::Or,
        "not" => Tok::Not,
        "imply" => Tok::Imply,
        "response" => Tok::Response,
        "within" => Tok::Within,
        "deadlock" => Tok::Deadlock,
        _ => return None,
    })
}

fn lex(text: &str, first_line: u32) -> PResult<Vec<(Tok, Span)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = first_line;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            match c {
                Some('\n') => {
                    line += 1;
                    col = 1;
                }
                Some(_) => col += 1,
                None => {}
            }
            c
        }};
    }

    loop {
        // skip whitespace and comments
        loop {
            match chars.peek() {
                Some(c) if c.is_whitespace() => {
                    bump!();
                }
                Some('/') => {
                    let mut ahead = chars.clone();
                    ahead.next();
                    if ahead.peek() == Some(&'/') {
                        while let Some(&c) = chars.peek() {
                            if c == '\n' {
                                break;
                            }
                            bump!();
                        }
                    } else {
                        break;
                    }
                }
                _ => break,
            }
        }
        let span = Span { line, col };
        let Some(&c) = chars.peek() else {
            out.push((Tok::Eof, span));
            return Ok(out);
        };
        let tok = match c {
            '{' => {
                bump!();
                Tok::LBrace
            }
            '}' => {
                bump!();
                Tok::RBrace
            }
            '[' => {
                bump!();
                Tok::LBracket
            }
            ']' => {
                bump!();
                Tok::RBracket
            }
            '(' => {
                bump!();
                Tok::LParen
            }
            ')' => {
                bump!();
                Tok::RParen
            }
            ';' => {
                bump!();
                Tok::Semi
            }
            ',' => {
                bump!();
                Tok::Comma
            }
            '/' => {
                bump!();
                Tok::Slash
            }
            '.' => {
                bump!();
                if chars.peek() == Some(&'.') {
                    bump!();
                    Tok::DotDot
                } else {
                    Tok::Dot
                }
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    Tok::Assign
                } else {
                    Tok::Colon
                }
            }
            '=' => {
                bump!();
                match chars.peek() {
                    Some('=') => {
                        bump!();
                        Tok::EqEq
                    }
                    Some('>') => {
                        bump!();
                        Tok::FatArrow
                    }
                    _ => Tok::EqEq,
                }
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    Tok::Le
                } else {
                    Tok::Lt
                }
            }
            '>' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            '-' => {
                bump!();
                match chars.peek() {
                    Some('-') => {
                        bump!();
                        if chars.peek() == Some(&'>') {
                            bump!();
                            Tok::LongArrow
                        } else {
                            return Err(ParseError {
                                span,
                                expected: "`-->`".into(),
                                found: "`--`".into(),
                            });
                        }
                    }
                    Some('>') => {
                        bump!();
                        Tok::Arrow
                    }
                    _ => Tok::Minus,
                }
            }
            c if c.is_ascii_digit() => {
                let mut n: i64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        n = n.saturating_mul(10).saturating_add(v as i64);
                        bump!();
                    } else {
                        break;
                    }
                }
                Tok::Int(n)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        bump!();
                    } else {
                        break;
                    }
                }
                keyword(&s).unwrap_or(Tok::Ident(s))
            }
            other => {
                return Err(ParseError {
                    span,
                    expected: "a token".into(),
                    found: format!("`{other}`"),
                });
            }
        };
        out.push((tok, span));
    }
}

// ---------------------------------------------------------------------------
// token stream

struct P {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl P {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            expected: expected.into(),
            found: self.peek().describe(),
        })
    }

    fn eat(&mut self, t: Tok) -> bool {
        if *self.peek() == t {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.err(format!("`{}`", t.text()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(_) => match self.next() {
                Tok::Ident(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => self.err("an identifier"),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat(Tok::Minus);
        match self.peek() {
            Tok::Int(_) => match self.next() {
                Tok::Int(v) => Ok(if neg { -v } else { v }),
                _ => unreachable!(),
            },
            _ => self.err("an integer"),
        }
    }

    fn uint(&mut self, what: &str) -> PResult<u32> {
        let span = self.span();
        let v = self.int()?;
        u32::try_from(v).map_err(|_| ParseError {
            span,
            expected: format!("a non-negative {what}"),
            found: format!("`{v}`"),
        })
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::EqEq => CmpOp::Eq,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            _ => return None,
        };
        self.next();
        Some(op)
    }
}

// ---------------------------------------------------------------------------
// model parser

/// Parse a complete model file.
pub fn parse_model(text: &str) -> PResult<FaaModel> {
    let mut p = P { toks: lex(text, 1)?, pos: 0 };
    p.expect(Tok::Faa)?;
    let name = p.ident()?;
    p.expect(Tok::LBrace)?;
    let mut model = FaaModel {
        name,
        functions: Vec::new(),
        connectors: Vec::new(),
        globals: Vec::new(),
        environment: None,
    };
    loop {
        match p.peek() {
            Tok::RBrace => {
                p.next();
                break;
            }
            Tok::Var => {
                p.next();
                model.globals.push(parse_vardecl(&mut p)?);
            }
            Tok::Function => {
                p.next();
                model.functions.push(parse_function(&mut p)?);
            }
            Tok::Connect => {
                p.next();
                model.connectors.push(parse_connector(&mut p)?);
            }
            Tok::Env => {
                let span = p.span();
                p.next();
                if model.environment.is_some() {
                    return Err(ParseError {
                        span,
                        expected: "at most one env block".into(),
                        found: "a second `env`".into(),
                    });
                }
                model.environment = Some(parse_env(&mut p)?);
            }
            _ => return p.err("`var`, `function`, `connect`, `env`, or `}`"),
        }
    }
    p.expect(Tok::Eof)?;
    Ok(model)
}

fn parse_vardecl(p: &mut P) -> PResult<VariableDecl> {
    let name = p.ident()?;
    p.expect(Tok::Colon)?;
    let ty = parse_type(p)?;
    p.expect(Tok::EqEq)?; // a single `=` lexes as ==
    let init = match parse_value(p)? {
        ValueExpr::Int(v) => v,
        ValueExpr::Bool(b) => b as i64,
        ValueExpr::Var(v) => {
            return Err(ParseError {
                span: p.span(),
                expected: "a literal initial value".into(),
                found: format!("identifier `{v}`"),
            });
        }
    };
    p.expect(Tok::Semi)?;
    Ok(VariableDecl { name, ty, init })
}

fn parse_type(p: &mut P) -> PResult<DataType> {
    match p.peek() {
        Tok::BoolTy => {
            p.next();
            Ok(DataType::Bool)
        }
        Tok::IntTy => {
            p.next();
            if p.eat(Tok::LBracket) {
                let lo = p.int()?;
                p.expect(Tok::DotDot)?;
                let hi = p.int()?;
                p.expect(Tok::RBracket)?;
                Ok(DataType::Int { lo, hi })
            } else {
                Ok(DataType::Int { lo: 0, hi: 255 })
            }
        }
        _ => p.err("`bool` or `int`"),
    }
}

fn parse_value(p: &mut P) -> PResult<ValueExpr> {
    match p.peek() {
        Tok::True => {
            p.next();
            Ok(ValueExpr::Bool(true))
        }
        Tok::False => {
            p.next();
            Ok(ValueExpr::Bool(false))
        }
        Tok::Int(_) | Tok::Minus => Ok(ValueExpr::Int(p.int()?)),
        Tok::Ident(_) => Ok(ValueExpr::Var(p.ident()?)),
        _ => p.err("a value (integer, boolean, or identifier)"),
    }
}

fn parse_function(p: &mut P) -> PResult<AnalysisFunction> {
    let name = p.ident()?;
    p.expect(Tok::LBrace)?;

    p.expect(Tok::Trigger)?;
    let trigger = match p.peek() {
        Tok::Time => {
            p.next();
            p.expect(Tok::Period)?;
            let period = p.uint("period")?;
            p.expect(Tok::Exec)?;
            let exec = p.uint("execution time")?;
            TriggerPolicy::Time { period, exec }
        }
        Tok::Event => {
            p.next();
            p.expect(Tok::Exec)?;
            let exec = p.uint("execution time")?;
            TriggerPolicy::Event { exec }
        }
        _ => return p.err("`time` or `event`"),
    };
    p.expect(Tok::Semi)?;

    let mut ports = Vec::new();
    let mut annex = BehaviorAnnex::default();
    let mut has_annex_parts = false;

    loop {
        match p.peek() {
            Tok::RBrace => {
                p.next();
                break;
            }
            Tok::In | Tok::Out => {
                let direction =
                    if matches!(p.next(), Tok::In) { Direction::In } else { Direction::Out };
                let mut is_trigger = false;
                let mut kind = PortKind::Flow;
                loop {
                    match p.peek() {
                        Tok::Trigger => {
                            p.next();
                            is_trigger = true;
                        }
                        Tok::Cs => {
                            p.next();
                            kind = PortKind::ClientServer;
                        }
                        _ => break,
                    }
                }
                p.expect(Tok::PortKw)?;
                let pname = p.ident()?;
                p.expect(Tok::Colon)?;
                let ty = parse_type(p)?;
                p.expect(Tok::Semi)?;
                ports.push(Port { name: pname, direction, kind, is_trigger, ty });
            }
            Tok::Var => {
                p.next();
                annex.parameters.push(parse_vardecl(p)?);
                has_annex_parts = true;
            }
            Tok::Annex => {
                p.next();
                parse_annex_body(p, &mut annex)?;
                has_annex_parts = true;
            }
            _ => return p.err("`in`, `out`, `var`, `annex`, or `}`"),
        }
    }

    Ok(AnalysisFunction {
        name,
        trigger,
        ports,
        annex: if has_annex_parts { Some(annex) } else { None },
    })
}

fn parse_annex_body(p: &mut P, annex: &mut BehaviorAnnex) -> PResult<()> {
    p.expect(Tok::LBrace)?;
    // a function may carry several annex blocks; later blocks extend the
    // machine built by earlier ones
    let (mut states, mut initial, mut transitions) = match annex.machine.take() {
        Some(sm) => (sm.states, Some(sm.initial), sm.transitions),
        None => (Vec::new(), None, Vec::new()),
    };

    loop {
        match p.peek() {
            Tok::RBrace => {
                p.next();
                break;
            }
            Tok::Pre | Tok::Post | Tok::InvariantKw => {
                let kind = match p.next() {
                    Tok::Pre => ConstraintKind::Pre,
                    Tok::Post => ConstraintKind::Post,
                    _ => ConstraintKind::Invariant,
                };
                let expr = parse_expr(p)?;
                p.expect(Tok::Semi)?;
                annex.constraints.push(Constraint { kind, expr });
            }
            Tok::Compute => {
                p.next();
                annex.computations.extend(parse_assigns(p)?);
                p.expect(Tok::Semi)?;
            }
            Tok::Var => {
                p.next();
                annex.parameters.push(parse_vardecl(p)?);
            }
            Tok::State => {
                let state_span = p.span();
                p.next();
                let sname = p.ident()?;
                if p.eat(Tok::Initial) {
                    if initial.is_some() {
                        return Err(ParseError {
                            span: state_span,
                            expected: "a single state marked `initial`".into(),
                            found: format!("a second initial state `{sname}`"),
                        });
                    }
                    initial = Some(sname.clone());
                }
                let budget = if p.eat(Tok::Budget) { Some(p.uint("budget")?) } else { None };
                states.push(AnnexState { name: sname.clone(), budget });
                p.expect(Tok::LBrace)?;
                loop {
                    match p.peek() {
                        Tok::RBrace => {
                            p.next();
                            break;
                        }
                        Tok::On => {
                            p.next();
                            let guard = parse_expr(p)?;
                            let assigns =
                                if p.eat(Tok::Slash) { parse_assigns(p)? } else { Vec::new() };
                            p.expect(Tok::Arrow)?;
                            let to = p.ident()?;
                            p.expect(Tok::Semi)?;
                            transitions.push(AnnexTransition {
                                from: sname.clone(),
                                to,
                                guard,
                                assigns,
                            });
                        }
                        _ => return p.err("`on` or `}`"),
                    }
                }
            }
            _ => return p.err("`pre`, `post`, `invariant`, `state`, `compute`, `var`, or `}`"),
        }
    }

    if !states.is_empty() {
        let Some(initial) = initial else {
            return Err(ParseError {
                span: p.span(),
                expected: "one state marked `initial`".into(),
                found: "a state machine without one".into(),
            });
        };
        annex.machine = Some(StateMachine { states, initial, transitions });
    }
    Ok(())
}

fn parse_assigns(p: &mut P) -> PResult<Vec<Assign>> {
    let mut out = Vec::new();
    loop {
        let target = p.ident()?;
        p.expect(Tok::Assign)?;
        let value = parse_value(p)?;
        out.push(Assign { target, value });
        if !p.eat(Tok::Comma) {
            return Ok(out);
        }
    }
}

fn parse_connector(p: &mut P) -> PResult<Connector> {
    let src_fn = p.ident()?;
    p.expect(Tok::Dot)?;
    let src_port = p.ident()?;
    p.expect(Tok::Arrow)?;
    let dst_fn = p.ident()?;
    p.expect(Tok::Dot)?;
    let dst_port = p.ident()?;
    p.expect(Tok::Semi)?;
    Ok(Connector { src_fn, src_port, dst_fn, dst_port })
}

fn parse_env(p: &mut P) -> PResult<EnvSpec> {
    let name = p.ident()?;
    p.expect(Tok::LBrace)?;
    let mut writes = Vec::new();
    loop {
        match p.peek() {
            Tok::RBrace => {
                p.next();
                break;
            }
            Tok::WriteKw => {
                p.next();
                let dst_fn = p.ident()?;
                p.expect(Tok::Dot)?;
                let dst_port = p.ident()?;
                p.expect(Tok::Assign)?;
                let value = parse_value(p)?;
                let every = if p.eat(Tok::Every) { Some(p.uint("period")?) } else { None };
                p.expect(Tok::Semi)?;
                writes.push(EnvWrite { dst_fn, dst_port, value, every });
            }
            _ => return p.err("`write` or `}`"),
        }
    }
    Ok(EnvSpec { name, writes })
}

// ---------------------------------------------------------------------------
// expressions (annex / constraint surface)

fn parse_expr(p: &mut P) -> PResult<Expr> {
    let lhs = parse_or(p)?;
    if p.eat(Tok::Imply) {
        let rhs = parse_expr(p)?; // right-associative
        Ok(Expr::Imply(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn parse_or(p: &mut P) -> PResult<Expr> {
    let mut e = parse_and(p)?;
    while p.eat(Tok::Or) {
        let rhs = parse_and(p)?;
        e = Expr::Or(Box::new(e), Box::new(rhs));
    }
    Ok(e)
}

fn parse_and(p: &mut P) -> PResult<Expr> {
    let mut e = parse_unary(p)?;
    while p.eat(Tok::And) {
        let rhs = parse_unary(p)?;
        e = Expr::And(Box::new(e), Box::new(rhs));
    }
    Ok(e)
}

fn parse_unary(p: &mut P) -> PResult<Expr> {
    match p.peek() {
        Tok::Not => {
            p.next();
            Ok(Expr::Not(Box::new(parse_unary(p)?)))
        }
        Tok::LParen => {
            p.next();
            let e = parse_expr(p)?;
            p.expect(Tok::RParen)?;
            Ok(e)
        }
        _ => parse_atom(p),
    }
}

fn parse_atom(p: &mut P) -> PResult<Expr> {
    let lhs = parse_value(p)?;
    match p.cmp_op() {
        Some(op) => {
            let rhs = parse_value(p)?;
            Ok(normalize_cmp(lhs, op, rhs))
        }
        None => match lhs {
            ValueExpr::Bool(b) => Ok(Expr::Bool(b)),
            ValueExpr::Var(v) => Ok(Expr::Cmp {
                lhs: ValueExpr::Var(v),
                op: CmpOp::Eq,
                rhs: ValueExpr::Bool(true),
            }),
            ValueExpr::Int(_) => p.err("a comparison operator after an integer"),
        },
    }
}

/// Flip `literal ⋈ var` to `var ⋈' literal` so downstream passes only see
/// variables on the left.
fn normalize_cmp(lhs: ValueExpr, op: CmpOp, rhs: ValueExpr) -> Expr {
    let lhs_lit = !matches!(lhs, ValueExpr::Var(_));
    let rhs_var = matches!(rhs, ValueExpr::Var(_));
    if lhs_lit && rhs_var {
        Expr::Cmp { lhs: rhs, op: op.flipped(), rhs: lhs }
    } else {
        Expr::Cmp { lhs, op, rhs }
    }
}

// ---------------------------------------------------------------------------
// queries

/// Reference to something owned by a process (`process.name`) or to a global
/// variable (`name` alone).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QRef {
    pub process: Option<String>,
    pub name: String,
}

impl fmt::Display for QRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.process {
            Some(p) => write!(f, "{}.{}", p, self.name),
            None => write!(f, "{}", self.name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QOperand {
    Const(i64),
    Ref(QRef),
}

impl fmt::Display for QOperand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QOperand::Const(c) => write!(f, "{c}"),
            QOperand::Ref(r) => write!(f, "{r}"),
        }
    }
}

/// Query-side boolean expression. A bare [`QExpr::Ref`] is a location test
/// when the name resolves to a location, otherwise a boolean variable test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QExpr {
    Bool(bool),
    Deadlock,
    Ref(QRef),
    Cmp { lhs: QOperand, op: CmpOp, rhs: QOperand },
    Not(Box<QExpr>),
    And(Box<QExpr>, Box<QExpr>),
    Or(Box<QExpr>, Box<QExpr>),
    Imply(Box<QExpr>, Box<QExpr>),
}

impl QExpr {
    pub fn contains_deadlock(&self) -> bool {
        match self {
            QExpr::Deadlock => true,
            QExpr::Bool(_) | QExpr::Ref(_) | QExpr::Cmp { .. } => false,
            QExpr::Not(e) => e.contains_deadlock(),
            QExpr::And(a, b) | QExpr::Or(a, b) | QExpr::Imply(a, b) => {
                a.contains_deadlock() || b.contains_deadlock()
            }
        }
    }
}

// precedence mirrors the model expression printer
fn fmt_qexpr(e: &QExpr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let own = match e {
        QExpr::Imply(..) => 1,
        QExpr::Or(..) => 2,
        QExpr::And(..) => 3,
        QExpr::Not(..) => 4,
        _ => 5,
    };
    let parens = own < prec;
    if parens {
        write!(f, "(")?;
    }
    match e {
        QExpr::Bool(b) => write!(f, "{b}")?,
        QExpr::Deadlock => write!(f, "deadlock")?,
        QExpr::Ref(r) => write!(f, "{r}")?,
        QExpr::Cmp { lhs, op, rhs } => write!(f, "{} {} {}", lhs, op.symbol(), rhs)?,
        QExpr::Not(inner) => {
            write!(f, "not ")?;
            fmt_qexpr(inner, 4, f)?;
        }
        QExpr::And(a, b) => {
            fmt_qexpr(a, 3, f)?;
            write!(f, " and ")?;
            fmt_qexpr(b, 4, f)?;
        }
        QExpr::Or(a, b) => {
            fmt_qexpr(a, 2, f)?;
            write!(f, " or ")?;
            fmt_qexpr(b, 3, f)?;
        }
        QExpr::Imply(a, b) => {
            fmt_qexpr(a, 2, f)?;
            write!(f, " imply ")?;
            fmt_qexpr(b, 1, f)?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for QExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_qexpr(self, 0, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryKind {
    /// `A[] e` — e holds in every reachable state.
    Invariant(QExpr),
    /// `E<> e` — some reachable state satisfies e.
    Reach(QExpr),
    /// `p --> q` — every p-state is inevitably followed by a q-state.
    LeadsTo(QExpr, QExpr),
    /// `response p => q within T` — q within T time units of any p.
    BoundedResponse { event1: QExpr, event2: QExpr, within: u32 },
    /// `A[] not deadlock`.
    DeadlockFree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    /// The source line the query was parsed from; used as its report label.
    pub label: String,
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryKind::Invariant(e) => write!(f, "A[] {e}"),
            QueryKind::Reach(e) => write!(f, "E<> {e}"),
            QueryKind::LeadsTo(p, q) => write!(f, "{p} --> {q}"),
            QueryKind::BoundedResponse { event1, event2, within } => {
                write!(f, "response {event1} => {event2} within {within}")
            }
            QueryKind::DeadlockFree => write!(f, "A[] not deadlock"),
        }
    }
}

/// Parse a query file: one query per non-blank, non-comment line.
pub fn parse_queries(text: &str) -> PResult<Vec<Query>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = (i + 1) as u32;
        let without_comment = match raw.find("//") {
            Some(ix) => &raw[..ix],
            None => raw,
        };
        if without_comment.trim().is_empty() {
            continue;
        }
        out.push(parse_query_at(raw, line_no)?);
    }
    Ok(out)
}

/// Parse a single query (used by the CLI's observer flag).
pub fn parse_query(text: &str) -> PResult<Query> {
    parse_query_at(text, 1)
}

fn parse_query_at(raw: &str, line_no: u32) -> PResult<Query> {
    let mut p = P { toks: lex(raw, line_no)?, pos: 0 };
    // `lex` numbers all lines of its input starting at line_no, and the
    // caller feeds single lines, so columns line up with the source file.
    let kind = parse_query_kind(&mut p)?;
    p.expect(Tok::Eof)?;
    if let Some(inner) = deadlock_misuse(&kind) {
        return Err(ParseError {
            span: Span { line: line_no, col: 1 },
            expected: "`deadlock` only inside `A[] not deadlock`".into(),
            found: format!("`{inner}`"),
        });
    }
    Ok(Query { kind, label: raw.trim().to_string() })
}

fn deadlock_misuse(kind: &QueryKind) -> Option<String> {
    let exprs: Vec<&QExpr> = match kind {
        QueryKind::DeadlockFree => return None,
        QueryKind::Invariant(e) | QueryKind::Reach(e) => vec![e],
        QueryKind::LeadsTo(p, q) => vec![p, q],
        QueryKind::BoundedResponse { event1, event2, .. } => vec![event1, event2],
    };
    exprs.iter().find(|e| e.contains_deadlock()).map(|e| e.to_string())
}

fn parse_query_kind(p: &mut P) -> PResult<QueryKind> {
    // `A[]` and `E<>` are identifier-led: look ahead before committing.
    if let Tok::Ident(head) = p.peek() {
        if head == "A" && *p.peek_at(1) == Tok::LBracket {
            p.next();
            p.expect(Tok::LBracket)?;
            p.expect(Tok::RBracket)?;
            let e = parse_qexpr(p)?;
            if e == QExpr::Not(Box::new(QExpr::Deadlock)) {
                return Ok(QueryKind::DeadlockFree);
            }
            return Ok(QueryKind::Invariant(e));
        }
        if head == "E" && *p.peek_at(1) == Tok::Lt && *p.peek_at(2) == Tok::Gt {
            p.next();
            p.next();
            p.next();
            return Ok(QueryKind::Reach(parse_qexpr(p)?));
        }
    }
    if p.eat(Tok::Response) {
        let event1 = parse_qexpr(p)?;
        p.expect(Tok::FatArrow)?;
        let event2 = parse_qexpr(p)?;
        p.expect(Tok::Within)?;
        let within = p.uint("bound")?;
        return Ok(QueryKind::BoundedResponse { event1, event2, within });
    }
    let lhs = parse_qexpr(p)?;
    p.expect(Tok::LongArrow)?;
    let rhs = parse_qexpr(p)?;
    Ok(QueryKind::LeadsTo(lhs, rhs))
}

fn parse_qexpr(p: &mut P) -> PResult<QExpr> {
    let lhs = parse_qor(p)?;
    if p.eat(Tok::Imply) {
        let rhs = parse_qexpr(p)?;
        Ok(QExpr::Imply(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn parse_qor(p: &mut P) -> PResult<QExpr> {
    let mut e = parse_qand(p)?;
    while p.eat(Tok::Or) {
        let rhs = parse_qand(p)?;
        e = QExpr::Or(Box::new(e), Box::new(rhs));
    }
    Ok(e)
}

fn parse_qand(p: &mut P) -> PResult<QExpr> {
    let mut e = parse_qunary(p)?;
    while p.eat(Tok::And) {
        let rhs = parse_qunary(p)?;
        e = QExpr::And(Box::new(e), Box::new(rhs));
    }
    Ok(e)
}

fn parse_qunary(p: &mut P) -> PResult<QExpr> {
    match p.peek() {
        Tok::Not => {
            p.next();
            Ok(QExpr::Not(Box::new(parse_qunary(p)?)))
        }
        Tok::LParen => {
            p.next();
            let e = parse_qexpr(p)?;
            p.expect(Tok::RParen)?;
            Ok(e)
        }
        Tok::Deadlock => {
            p.next();
            Ok(QExpr::Deadlock)
        }
        Tok::True => {
            p.next();
            Ok(QExpr::Bool(true))
        }
        Tok::False => {
            p.next();
            Ok(QExpr::Bool(false))
        }
        _ => {
            let lhs = parse_qoperand(p)?;
            match p.cmp_op() {
                Some(op) => {
                    let rhs = parse_qoperand(p)?;
                    Ok(normalize_qcmp(lhs, op, rhs))
                }
                None => match lhs {
                    QOperand::Ref(r) => Ok(QExpr::Ref(r)),
                    QOperand::Const(_) => p.err("a comparison operator after an integer"),
                },
            }
        }
    }
}

fn parse_qoperand(p: &mut P) -> PResult<QOperand> {
    match p.peek() {
        Tok::Int(_) | Tok::Minus => Ok(QOperand::Const(p.int()?)),
        Tok::Ident(_) => {
            let first = p.ident()?;
            if p.eat(Tok::Dot) {
                let field = p.ident()?;
                Ok(QOperand::Ref(QRef { process: Some(first), name: field }))
            } else {
                Ok(QOperand::Ref(QRef { process: None, name: first }))
            }
        }
        _ => p.err("an integer or a reference"),
    }
}

fn normalize_qcmp(lhs: QOperand, op: CmpOp, rhs: QOperand) -> QExpr {
    if matches!(lhs, QOperand::Const(_)) && matches!(rhs, QOperand::Ref(_)) {
        QExpr::Cmp { lhs: rhs, op: op.flipped(), rhs: lhs }
    } else {
        QExpr::Cmp { lhs, op, rhs }
    }
}

// ---------------------------------------------------------------------------
// pretty-printer

fn print_type(ty: DataType) -> String {
    match ty {
        DataType::Bool => "bool".into(),
        DataType::Int { lo, hi } => format!("int[{lo}..{hi}]"),
    }
}

fn print_expr_prec(e: &Expr, prec: u8, out: &mut String) {
    let own = match e {
        Expr::Imply(..) => 1,
        Expr::Or(..) => 2,
        Expr::And(..) => 3,
        Expr::Not(..) => 4,
        _ => 5,
    };
    let parens = own < prec;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Cmp { lhs, op, rhs } => {
            out.push_str(&format!("{} {} {}", lhs, op.symbol(), rhs));
        }
        Expr::Not(inner) => {
            out.push_str("not ");
            print_expr_prec(inner, 4, out);
        }
        Expr::And(a, b) => {
            print_expr_prec(a, 3, out);
            out.push_str(" and ");
            print_expr_prec(b, 4, out);
        }
        Expr::Or(a, b) => {
            print_expr_prec(a, 2, out);
            out.push_str(" or ");
            print_expr_prec(b, 3, out);
        }
        Expr::Imply(a, b) => {
            print_expr_prec(a, 2, out);
            out.push_str(" imply ");
            print_expr_prec(b, 1, out);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Surface form of an expression, inverse of [`parse_model`]'s expression
/// grammar up to normalization.
pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    print_expr_prec(e, 0, &mut s);
    s
}

fn print_assigns(assigns: &[Assign]) -> String {
    assigns
        .iter()
        .map(|a| format!("{} := {}", a.target, a.value))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Deterministic surface rendering of a model; `parse_model(print_model(m))`
/// reconstructs `m` whenever `m` itself came out of the parser.
pub fn print_model(m: &FaaModel) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "faa {} {{", m.name);
    for g in &m.globals {
        let _ = writeln!(w, "  var {}: {} = {};", g.name, print_type(g.ty), g.init);
    }
    for f in &m.functions {
        let _ = writeln!(w, "  function {} {{", f.name);
        match f.trigger {
            TriggerPolicy::Time { period, exec } => {
                let _ = writeln!(w, "    trigger time period {period} exec {exec};");
            }
            TriggerPolicy::Event { exec } => {
                let _ = writeln!(w, "    trigger event exec {exec};");
            }
        }
        for p in &f.ports {
            let dir = if p.direction == Direction::In { "in" } else { "out" };
            let trig = if p.is_trigger { "trigger " } else { "" };
            let cs = if p.kind == PortKind::ClientServer { "cs " } else { "" };
            let _ =
                writeln!(w, "    {dir} {trig}{cs}port {}: {};", p.name, print_type(p.ty));
        }
        if let Some(annex) = &f.annex {
            for v in &annex.parameters {
                let _ = writeln!(w, "    var {}: {} = {};", v.name, print_type(v.ty), v.init);
            }
            let has_body = !annex.constraints.is_empty()
                || annex.machine.is_some()
                || !annex.computations.is_empty();
            if has_body {
                let _ = writeln!(w, "    annex {{");
                for c in &annex.constraints {
                    let kw = match c.kind {
                        ConstraintKind::Pre => "pre",
                        ConstraintKind::Post => "post",
                        ConstraintKind::Invariant => "invariant",
                    };
                    let _ = writeln!(w, "      {kw} {};", print_expr(&c.expr));
                }
                if let Some(sm) = &annex.machine {
                    for st in &sm.states {
                        let mut head = format!("      state {}", st.name);
                        if st.name == sm.initial {
                            head.push_str(" initial");
                        }
                        if let Some(b) = st.budget {
                            head.push_str(&format!(" budget {b}"));
                        }
                        let _ = writeln!(w, "{head} {{");
                        for t in sm.transitions.iter().filter(|t| t.from == st.name) {
                            let mut line = format!("        on {}", print_expr(&t.guard));
                            if !t.assigns.is_empty() {
                                line.push_str(&format!(" / {}", print_assigns(&t.assigns)));
                            }
                            line.push_str(&format!(" -> {};", t.to));
                            let _ = writeln!(w, "{line}");
                        }
                        let _ = writeln!(w, "      }}");
                    }
                }
                if !annex.computations.is_empty() {
                    let _ = writeln!(w, "      compute {};", print_assigns(&annex.computations));
                }
                let _ = writeln!(w, "    }}");
            }
        }
        let _ = writeln!(w, "  }}");
    }
    for c in &m.connectors {
        let _ = writeln!(
            w,
            "  connect {}.{} -> {}.{};",
            c.src_fn, c.src_port, c.dst_fn, c.dst_port
        );
    }
    if let Some(env) = &m.environment {
        let _ = writeln!(w, "  env {} {{", env.name);
        for wr in &env.writes {
            let mut line = format!("    write {}.{} := {}", wr.dst_fn, wr.dst_port, wr.value);
            if let Some(p) = wr.every {
                line.push_str(&format!(" every {p}"));
            }
            line.push(';');
            let _ = writeln!(w, "{line}");
        }
        let _ = writeln!(w, "  }}");
    }
    s.push_str("}\n");
    s
}

/// One query per line, inverse of [`parse_queries`] up to whitespace.
pub fn print_queries(queries: &[Query]) -> String {
    let mut s = String::new();
    for q in queries {
        s.push_str(&q.kind.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adl;

    #[test]
    fn minimal_time_triggered_function() {
        let m = parse_model(
            "faa SSU { function SteeringWheel { trigger time period 10 exec 2; \
             out port wp: int[0..3]; } }",
        )
        .unwrap();
        assert_eq!(m.name, "SSU");
        assert_eq!(m.functions.len(), 1);
        let f = &m.functions[0];
        assert_eq!(f.name, "SteeringWheel");
        assert_eq!(f.trigger, TriggerPolicy::Time { period: 10, exec: 2 });
        assert_eq!(f.ports.len(), 1);
        assert_eq!(f.ports[0].ty, DataType::Int { lo: 0, hi: 3 });
        assert_eq!(f.ports[0].direction, Direction::Out);
        assert!(f.annex.is_none());
    }

    #[test]
    fn empty_text_expects_faa() {
        let err = parse_model("").unwrap_err();
        assert!(err.expected.contains("faa"), "{err}");
        assert_eq!(err.span, Span { line: 1, col: 1 });
    }

    #[test]
    fn error_span_points_at_the_offending_token() {
        let text = "faa M {\n  function F {\n    trigger time period 5 exec oops;\n  }\n}";
        let err = parse_model(text).unwrap_err();
        assert_eq!(err.span.line, 3);
        assert_eq!(err.span.col, 32);
        assert!(err.found.contains("oops"), "{err}");
    }

    fn full_model_text() -> &'static str {
        r#"
faa Demo {
  var mode: int[0..2] = 1;
  function Producer {
    trigger time period 9 exec 2;
    out port val: int[0..3];
    annex {
      pre mode >= 1;
      state Choose initial {
        on true / val := 1 -> Hi;
        on mode == 2 / val := 2 -> Lo;
      }
      state Hi {}
      state Lo {}
    }
  }
  function Consumer {
    trigger event exec 2;
    in trigger port v: int[0..3];
    out cs port done: bool;
    var seen: int[0..3] = 0;
    annex {
      invariant seen <= 3;
      state Run initial budget 2 {
        on clk >= 2 / seen := v -> Done;
      }
      state Done {}
      compute done := true;
    }
  }
  connect Producer.val -> Consumer.v;
  env Pulse {
    write Consumer.v := 3 every 7;
  }
}
"#
    }

    #[test]
    fn full_model_parses_and_round_trips() {
        let m = parse_model(full_model_text()).unwrap();
        assert_eq!(m.globals.len(), 1);
        assert_eq!(m.functions.len(), 2);
        assert_eq!(m.connectors.len(), 1);
        let env = m.environment.as_ref().unwrap();
        assert_eq!(env.name, "Pulse");
        assert_eq!(env.writes[0].every, Some(7));

        let consumer = m.function("Consumer").unwrap();
        let annex = consumer.annex.as_ref().unwrap();
        assert_eq!(annex.parameters.len(), 1);
        let sm = annex.machine.as_ref().unwrap();
        assert_eq!(sm.initial, "Run");
        assert_eq!(sm.states[0].budget, Some(2));
        assert_eq!(annex.computations.len(), 1);
        // `clk >= 2` survives as a comparison on the reserved clock name
        assert_eq!(
            sm.transitions[0].guard,
            Expr::Cmp {
                lhs: ValueExpr::Var("clk".into()),
                op: CmpOp::Ge,
                rhs: ValueExpr::Int(2)
            }
        );

        // parse ∘ print ∘ parse is the identity on parser output
        let printed = print_model(&m);
        let reparsed = parse_model(&printed).unwrap();
        assert_eq!(reparsed, m);

        // and the parsed model satisfies the validator
        let diags = adl::validate_model(&m);
        assert!(adl::is_accepted(&diags), "{diags:?}");
    }

    #[test]
    fn const_on_left_comparisons_are_flipped() {
        let m = parse_model(
            "faa M { function F { trigger event exec 1; in trigger port x: int[0..9]; \
             annex { pre 3 <= x; state S initial {} } } }",
        )
        .unwrap();
        let annex = m.functions[0].annex.as_ref().unwrap();
        assert_eq!(
            annex.constraints[0].expr,
            Expr::Cmp {
                lhs: ValueExpr::Var("x".into()),
                op: CmpOp::Ge,
                rhs: ValueExpr::Int(3)
            }
        );
    }

    #[test]
    fn bare_identifier_is_a_boolean_test() {
        let m = parse_model(
            "faa M { function F { trigger event exec 1; in trigger port go: bool; \
             annex { pre go; state S initial {} } } }",
        )
        .unwrap();
        let annex = m.functions[0].annex.as_ref().unwrap();
        assert_eq!(
            annex.constraints[0].expr,
            Expr::Cmp {
                lhs: ValueExpr::Var("go".into()),
                op: CmpOp::Eq,
                rhs: ValueExpr::Bool(true)
            }
        );
    }

    #[test]
    fn second_env_block_is_rejected() {
        let err =
            parse_model("faa M { env A { } env B { } }").unwrap_err();
        assert!(err.expected.contains("at most one env"), "{err}");
    }

    #[test]
    fn machine_without_initial_state_is_rejected() {
        let err = parse_model(
            "faa M { function F { trigger event exec 1; annex { state S {} } } }",
        )
        .unwrap_err();
        assert!(err.expected.contains("initial"), "{err}");
    }

    #[test]
    fn queries_match_surface_examples() {
        let text = "\
// properties
A[] not deadlock

C3.Idle --> (C3.RCal or C3.LCal)
response C1.RTurn => C6.Run within 50
A[] C6.Run imply C6.clk <= 2
E<> C1.RTurn and C1.wp == 1
";
        let qs = parse_queries(text).unwrap();
        assert_eq!(qs.len(), 5);
        assert_eq!(qs[0].kind, QueryKind::DeadlockFree);
        assert_eq!(qs[0].label, "A[] not deadlock");
        match &qs[1].kind {
            QueryKind::LeadsTo(p, q) => {
                assert_eq!(
                    *p,
                    QExpr::Ref(QRef { process: Some("C3".into()), name: "Idle".into() })
                );
                assert_eq!(q.to_string(), "C3.RCal or C3.LCal");
            }
            other => panic!("expected leads-to, got {other:?}"),
        }
        match &qs[2].kind {
            QueryKind::BoundedResponse { within, .. } => assert_eq!(*within, 50),
            other => panic!("expected bounded response, got {other:?}"),
        }
        match &qs[3].kind {
            QueryKind::Invariant(e) => {
                assert_eq!(e.to_string(), "C6.Run imply C6.clk <= 2");
            }
            other => panic!("expected invariant, got {other:?}"),
        }
        assert!(matches!(qs[4].kind, QueryKind::Reach(_)));
    }

    #[test]
    fn query_error_carries_the_line_number() {
        let err = parse_queries("A[] not deadlock\nE<> (oops\n").unwrap_err();
        assert_eq!(err.span.line, 2);
    }

    #[test]
    fn deadlock_outside_its_idiom_is_rejected() {
        let err = parse_queries("E<> deadlock\n").unwrap_err();
        assert!(err.expected.contains("A[] not deadlock"), "{err}");
    }

    #[test]
    fn a_and_e_still_work_as_process_names() {
        let qs = parse_queries("A.Init --> E.Done\n").unwrap();
        match &qs[0].kind {
            QueryKind::LeadsTo(p, q) => {
                assert_eq!(p.to_string(), "A.Init");
                assert_eq!(q.to_string(), "E.Done");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn query_print_parse_round_trip() {
        let lines = [
            "A[] not deadlock",
            "A[] C1.RTurn imply (not C3.LCal and not C4.LRot)",
            "E<> mode == 2",
            "C3.Idle --> (C3.RCal or C3.LCal or C3.NCal or C3.MCal)",
            "response C1.RTurn => C6.Run within 50",
            "A[] C6.Run imply (C6.clk >= 0 and C6.clk <= 2)",
        ];
        for line in lines {
            let q = parse_query(line).unwrap();
            let printed = q.kind.to_string();
            let reparsed = parse_query(&printed).unwrap();
            assert_eq!(reparsed.kind, q.kind, "{line} -> {printed}");
        }
    }
}
