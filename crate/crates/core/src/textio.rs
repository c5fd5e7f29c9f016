//! Text front end: the model language, query strings, region-pattern files,
//! region rendering for diagnostics, and search-statistics output.
//!
//! One `.ta` file declares one automaton; a network is given as several
//! files. The grammar is line-noise free and keyword driven:
//!
//! ```text
//! automaton Flower;
//! clock x1 max 1;              // max is optional; inferred from constants
//! int gate = 0 range [0, 2];
//! channel c;
//! location q0 initial;
//! location Wait urgent invariant x1 <= 1;
//! edge q0 -> q0 { guard x1 == 1; reset x1; }
//! edge q0 -> Goal { guard x1 == 0 && y >= 1; sync c!; do gate := gate + 1; }
//! ```
//!
//! Guards are `&&`-joined comparisons; clocks may only be compared with
//! non-negative integer constants. Comments run from `//` to end of line.

use serde::Serialize;

use crate::explore::SearchStats;
use crate::kinematics::{ClockShape, RegionPattern};
use crate::model::{
    validate_model, AtomDef, AutomatonDef, ClockDef, Diagnostic, EdgeDef, ExprDef, IntAtom,
    IntExpr, LocationDef, Network, Query, QueryAtom, Rel, SrcPos, SyncDir, VarDef,
};
use crate::region::Region;

/// A named piece of model text, typically one file.
#[derive(Debug, Clone)]
pub struct ModelSource {
    pub name: String,
    pub text: String,
}

impl ModelSource {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        ModelSource {
            name: name.into(),
            text: text.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Semi,
    Comma,
    Colon,
    Bang,
    Quest,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Dot,
    Lt,
    Le,
    EqEq,
    Ge,
    Gt,
    AndAnd,
    Arrow,
    Assign,
    Eq,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{}'", s),
            Tok::Int(n) => format!("'{}'", n),
            Tok::Semi => "';'".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::Bang => "'!'".into(),
            Tok::Quest => "'?'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::EqEq => "'=='".into(),
            Tok::Ge => "'>='".into(),
            Tok::Gt => "'>'".into(),
            Tok::AndAnd => "'&&'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Assign => "':='".into(),
            Tok::Eq => "'='".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const KEYWORDS: &[&str] = &[
    "automaton",
    "clock",
    "max",
    "int",
    "range",
    "channel",
    "location",
    "initial",
    "urgent",
    "invariant",
    "edge",
    "guard",
    "sync",
    "reset",
    "do",
    "true",
    "false",
    "in",
    "order",
    "unbounded",
    "frac",
];

fn lex(text: &str, file: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    macro_rules! push {
        ($tok:expr, $len:expr) => {{
            out.push(Token {
                tok: $tok,
                line,
                col,
            });
            i += $len;
            col += $len;
        }};
    }
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len()
                && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            let word = &text[start..i];
            out.push(Token {
                tok: Tok::Ident(word.to_string()),
                line,
                col,
            });
            col += i - start;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            let value: i64 = text[start..i].parse().map_err(|_| {
                Diagnostic::new(
                    "integer literal out of range",
                    Some(SrcPos {
                        file: file.to_string(),
                        line,
                        col,
                    }),
                )
            })?;
            out.push(Token {
                tok: Tok::Int(value),
                line,
                col,
            });
            col += i - start;
            continue;
        }
        let two = if i + 1 < bytes.len() {
            &text[i..i + 2]
        } else {
            ""
        };
        match two {
            "<=" => {
                push!(Tok::Le, 2);
                continue;
            }
            ">=" => {
                push!(Tok::Ge, 2);
                continue;
            }
            "==" => {
                push!(Tok::EqEq, 2);
                continue;
            }
            "&&" => {
                push!(Tok::AndAnd, 2);
                continue;
            }
            "->" => {
                push!(Tok::Arrow, 2);
                continue;
            }
            ":=" => {
                push!(Tok::Assign, 2);
                continue;
            }
            _ => {}
        }
        let tok = match c {
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '!' => Tok::Bang,
            '?' => Tok::Quest,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '.' => Tok::Dot,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '=' => Tok::Eq,
            _ => {
                return Err(Diagnostic::new(
                    format!("unexpected character '{}'", c),
                    Some(SrcPos {
                        file: file.to_string(),
                        line,
                        col,
                    }),
                ))
            }
        };
        push!(tok, 1);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser scaffolding
// ---------------------------------------------------------------------------

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &str, file: &'a str) -> Result<Self, Diagnostic> {
        Ok(Parser {
            toks: lex(text, file)?,
            pos: 0,
            file,
        })
    }

    fn src_pos(&self) -> SrcPos {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .or_else(|| self.toks.last().map(|t| (t.line, t.col + 1)))
            .unwrap_or((1, 1));
        SrcPos {
            file: self.file.to_string(),
            line,
            col,
        }
    }

    fn error(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::new(msg, Some(self.src_pos()))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), Diagnostic> {
        if self.eat(&tok) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map(|t| t.describe())
                .unwrap_or_else(|| "end of input".to_string());
            Err(self.error(format!("expected {}, found {}", tok.describe(), found)))
        }
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == word {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), Diagnostic> {
        if self.eat_keyword(word) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", word)))
        }
    }

    fn expect_name(&mut self) -> Result<String, Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(Tok::Ident(s)) => Err(self.error(format!("'{}' is a keyword", s))),
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn expect_int(&mut self) -> Result<i64, Diagnostic> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("expected an integer")),
        }
    }

    fn expect_signed_int(&mut self) -> Result<i64, Diagnostic> {
        if self.eat(&Tok::Minus) {
            Ok(-self.expect_int()?)
        } else {
            self.expect_int()
        }
    }

    fn eat_rel(&mut self) -> Option<Rel> {
        let rel = match self.peek()? {
            Tok::Lt => Rel::Lt,
            Tok::Le => Rel::Le,
            Tok::EqEq => Rel::Eq,
            Tok::Ge => Rel::Ge,
            Tok::Gt => Rel::Gt,
            _ => return None,
        };
        self.pos += 1;
        Some(rel)
    }

    // expr := term (('+'|'-') term)* ; term := factor ('*' factor)*
    fn parse_expr(&mut self) -> Result<ExprDef, Diagnostic> {
        let mut lhs = self.parse_term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = ExprDef::Add(Box::new(lhs), Box::new(self.parse_term()?));
            } else if self.eat(&Tok::Minus) {
                lhs = ExprDef::Sub(Box::new(lhs), Box::new(self.parse_term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_term(&mut self) -> Result<ExprDef, Diagnostic> {
        let mut lhs = self.parse_factor()?;
        while self.eat(&Tok::Star) {
            lhs = ExprDef::Mul(Box::new(lhs), Box::new(self.parse_factor()?));
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<ExprDef, Diagnostic> {
        if self.eat(&Tok::Minus) {
            return Ok(ExprDef::Sub(
                Box::new(ExprDef::Const(0)),
                Box::new(self.parse_factor()?),
            ));
        }
        if self.eat(&Tok::LParen) {
            let e = self.parse_expr()?;
            self.expect(Tok::RParen)?;
            return Ok(e);
        }
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(ExprDef::Const(n))
            }
            Some(Tok::Ident(_)) => Ok(ExprDef::Name(self.expect_name()?)),
            _ => Err(self.error("expected an expression")),
        }
    }

    fn parse_atom(&mut self) -> Result<AtomDef, Diagnostic> {
        let pos = self.src_pos();
        let lhs = self.parse_expr()?;
        let Some(rel) = self.eat_rel() else {
            return Err(self.error("expected a comparison operator"));
        };
        let rhs = self.parse_expr()?;
        Ok(AtomDef {
            lhs,
            rel,
            rhs,
            pos: Some(pos),
        })
    }

    fn parse_guard(&mut self) -> Result<Vec<AtomDef>, Diagnostic> {
        let mut atoms = vec![self.parse_atom()?];
        while self.eat(&Tok::AndAnd) {
            atoms.push(self.parse_atom()?);
        }
        Ok(atoms)
    }
}

// ---------------------------------------------------------------------------
// Model parsing
// ---------------------------------------------------------------------------

/// Parses a single automaton definition.
pub fn parse_automaton(source: &ModelSource) -> Result<AutomatonDef, Diagnostic> {
    let mut p = Parser::new(&source.text, &source.name)?;
    p.expect_keyword("automaton")?;
    let mut def = AutomatonDef::new(p.expect_name()?);
    p.expect(Tok::Semi)?;
    while !p.at_end() {
        if p.eat_keyword("clock") {
            let pos = p.src_pos();
            let name = p.expect_name()?;
            let max = if p.eat_keyword("max") {
                let v = p.expect_int()?;
                Some(u32::try_from(v).map_err(|_| p.error("clock maximum must fit in 32 bits"))?)
            } else {
                None
            };
            p.expect(Tok::Semi)?;
            def.clocks.push(ClockDef {
                name,
                max,
                pos: Some(pos),
            });
        } else if p.eat_keyword("int") {
            let pos = p.src_pos();
            let name = p.expect_name()?;
            p.expect(Tok::Eq)?;
            let init = p.expect_signed_int()?;
            p.expect_keyword("range")?;
            p.expect(Tok::LBracket)?;
            let lo = p.expect_signed_int()?;
            p.expect(Tok::Comma)?;
            let hi = p.expect_signed_int()?;
            p.expect(Tok::RBracket)?;
            p.expect(Tok::Semi)?;
            def.vars.push(VarDef {
                name,
                init,
                lo,
                hi,
                pos: Some(pos),
            });
        } else if p.eat_keyword("channel") {
            let name = p.expect_name()?;
            p.expect(Tok::Semi)?;
            def.channels.push(name);
        } else if p.eat_keyword("location") {
            let pos = p.src_pos();
            let name = p.expect_name()?;
            let mut loc = LocationDef {
                name,
                initial: false,
                urgent: false,
                invariant: Vec::new(),
                pos: Some(pos),
            };
            loop {
                if p.eat_keyword("initial") {
                    loc.initial = true;
                } else if p.eat_keyword("urgent") {
                    loc.urgent = true;
                } else if p.eat_keyword("invariant") {
                    loc.invariant.extend(p.parse_guard()?);
                } else {
                    break;
                }
            }
            p.expect(Tok::Semi)?;
            def.locations.push(loc);
        } else if p.eat_keyword("edge") {
            let pos = p.src_pos();
            let source_loc = p.expect_name()?;
            p.expect(Tok::Arrow)?;
            let target_loc = p.expect_name()?;
            let mut edge = EdgeDef::new(&source_loc, &target_loc);
            edge.pos = Some(pos);
            p.expect(Tok::LBrace)?;
            while !p.eat(&Tok::RBrace) {
                if p.eat_keyword("guard") {
                    edge.guard.extend(p.parse_guard()?);
                    p.expect(Tok::Semi)?;
                } else if p.eat_keyword("sync") {
                    let chan = p.expect_name()?;
                    let dir = if p.eat(&Tok::Bang) {
                        SyncDir::Emit
                    } else if p.eat(&Tok::Quest) {
                        SyncDir::Receive
                    } else {
                        return Err(p.error("expected '!' or '?' after the channel name"));
                    };
                    edge.sync = Some((chan, dir));
                    p.expect(Tok::Semi)?;
                } else if p.eat_keyword("reset") {
                    edge.resets.push(p.expect_name()?);
                    while p.eat(&Tok::Comma) {
                        edge.resets.push(p.expect_name()?);
                    }
                    p.expect(Tok::Semi)?;
                } else if p.eat_keyword("do") {
                    loop {
                        let var = p.expect_name()?;
                        p.expect(Tok::Assign)?;
                        let expr = p.parse_expr()?;
                        edge.updates.push((var, expr));
                        if !p.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    p.expect(Tok::Semi)?;
                } else {
                    return Err(p.error("expected 'guard', 'sync', 'reset', 'do' or '}'"));
                }
            }
            def.edges.push(edge);
        } else {
            return Err(p.error("expected 'clock', 'int', 'channel', 'location' or 'edge'"));
        }
    }
    Ok(def)
}

/// Parses and links a set of sources into a validated network.
pub fn parse_model(sources: &[ModelSource]) -> Result<Network, Vec<Diagnostic>> {
    let mut defs = Vec::new();
    let mut diags = Vec::new();
    for src in sources {
        match parse_automaton(src) {
            Ok(def) => defs.push(def),
            Err(d) => diags.push(d),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let net = Network::link(&defs)?;
    let diags = validate_model(&net);
    if diags.is_empty() {
        Ok(net)
    } else {
        Err(diags)
    }
}

// ---------------------------------------------------------------------------
// Query parsing
// ---------------------------------------------------------------------------

fn resolve_query_expr(e: &ExprDef, net: &Network, p: &Parser) -> Result<IntExpr, Diagnostic> {
    match e {
        ExprDef::Const(c) => Ok(IntExpr::Const(*c)),
        ExprDef::Name(n) => net
            .var_id(n)
            .map(IntExpr::Var)
            .ok_or_else(|| p.error(format!("unknown integer variable '{}'", n))),
        ExprDef::Add(a, b) => Ok(IntExpr::Add(
            Box::new(resolve_query_expr(a, net, p)?),
            Box::new(resolve_query_expr(b, net, p)?),
        )),
        ExprDef::Sub(a, b) => Ok(IntExpr::Sub(
            Box::new(resolve_query_expr(a, net, p)?),
            Box::new(resolve_query_expr(b, net, p)?),
        )),
        ExprDef::Mul(a, b) => Ok(IntExpr::Mul(
            Box::new(resolve_query_expr(a, net, p)?),
            Box::new(resolve_query_expr(b, net, p)?),
        )),
    }
}

/// Parses `E<> ( atom && atom && ... )` against a linked network.
pub fn parse_query(text: &str, net: &Network) -> Result<Query, Diagnostic> {
    let mut p = Parser::new(text, "<query>")?;
    p.expect_keyword("E")
        .map_err(|_| p.error("queries start with 'E<>'"))?;
    p.expect(Tok::Lt)?;
    p.expect(Tok::Gt)?;
    p.expect(Tok::LParen)?;
    let mut atoms = Vec::new();
    loop {
        if p.eat_keyword("true") {
            atoms.push(QueryAtom::True);
        } else if p.eat_keyword("false") {
            atoms.push(QueryAtom::False);
        } else if matches!(p.peek(), Some(Tok::Ident(_))) && p.peek_at(1) == Some(&Tok::Dot) {
            let comp_name = p.expect_name()?;
            p.expect(Tok::Dot)?;
            let loc_name = p.expect_name()?;
            let component = net
                .component_id(&comp_name)
                .ok_or_else(|| p.error(format!("unknown automaton '{}'", comp_name)))?;
            let loc = net.components[component]
                .location_id(&loc_name)
                .ok_or_else(|| {
                    p.error(format!(
                        "automaton '{}' has no location '{}'",
                        comp_name, loc_name
                    ))
                })?;
            atoms.push(QueryAtom::Loc { component, loc });
        } else {
            let atom = p.parse_atom()?;
            let lhs = resolve_query_expr(&atom.lhs, net, &p)?;
            let rhs = resolve_query_expr(&atom.rhs, net, &p)?;
            atoms.push(QueryAtom::Int(IntAtom {
                lhs,
                rel: atom.rel,
                rhs,
                pos: atom.pos,
            }));
        }
        if !p.eat(&Tok::AndAnd) {
            break;
        }
    }
    p.expect(Tok::RParen)?;
    if !p.at_end() {
        return Err(p.error("trailing input after the query"));
    }
    Ok(Query { atoms })
}

// ---------------------------------------------------------------------------
// Pattern parsing
// ---------------------------------------------------------------------------

fn pattern_clock(p: &mut Parser, net: &Network) -> Result<crate::model::ClockId, Diagnostic> {
    let name = p.expect_name()?;
    net.clock_id(&name)
        .ok_or_else(|| p.error(format!("unknown clock '{}'", name)))
}

fn pattern_group(p: &mut Parser, net: &Network) -> Result<Vec<crate::model::ClockId>, Diagnostic> {
    p.expect(Tok::LBracket)?;
    let mut group = vec![pattern_clock(p, net)?];
    while p.eat(&Tok::Comma) {
        group.push(pattern_clock(p, net)?);
    }
    p.expect(Tok::RBracket)?;
    Ok(group)
}

/// Parses a region-pattern file for a single automaton.
///
/// Statements: `location q`, `x = c`, `x in (c, c+1)`, `x > max`,
/// `order unbounded: [a,b] < [c]`, `order frac: [x] < [y,z]`. Order groups
/// run from earliest-unbounded (respectively smallest fraction) upward.
pub fn parse_pattern(text: &str, net: &Network) -> Result<RegionPattern, Diagnostic> {
    if net.components.len() != 1 {
        return Err(Diagnostic::new(
            "patterns apply to single automata only",
            None,
        ));
    }
    let mut p = Parser::new(text, "<pattern>")?;
    let mut location = None;
    let mut shapes: Vec<(crate::model::ClockId, ClockShape)> = Vec::new();
    let mut unbounded_order = None;
    let mut frac_order = None;
    while !p.at_end() {
        if p.eat_keyword("location") {
            let name = p.expect_name()?;
            let loc = net.components[0]
                .location_id(&name)
                .ok_or_else(|| p.error(format!("unknown location '{}'", name)))?;
            location = Some(loc);
        } else if p.eat_keyword("order") {
            let target = if p.eat_keyword("unbounded") {
                &mut unbounded_order
            } else if p.eat_keyword("frac") {
                &mut frac_order
            } else {
                return Err(p.error("expected 'unbounded' or 'frac'"));
            };
            p.expect(Tok::Colon)?;
            let mut groups = vec![pattern_group(&mut p, net)?];
            while p.eat(&Tok::Lt) {
                groups.push(pattern_group(&mut p, net)?);
            }
            *target = Some(groups);
        } else {
            let clock = pattern_clock(&mut p, net)?;
            let shape = if p.eat(&Tok::Eq) {
                let c = p.expect_int()?;
                ClockShape::Exact(
                    u32::try_from(c).map_err(|_| p.error("clock values are non-negative"))?,
                )
            } else if p.eat_keyword("in") {
                p.expect(Tok::LParen)?;
                let lo = p.expect_int()?;
                p.expect(Tok::Comma)?;
                let hi = p.expect_int()?;
                p.expect(Tok::RParen)?;
                if hi != lo + 1 {
                    return Err(p.error("intervals must be open unit intervals (c, c+1)"));
                }
                ClockShape::Interval(
                    u32::try_from(lo).map_err(|_| p.error("clock values are non-negative"))?,
                )
            } else if p.eat(&Tok::Gt) {
                p.expect_keyword("max")?;
                ClockShape::Unbounded
            } else {
                return Err(p.error("expected '=', 'in' or '> max' after the clock"));
            };
            if shapes.iter().any(|(c, _)| *c == clock) {
                return Err(p.error(format!(
                    "clock '{}' is constrained more than once",
                    net.clocks[clock.0 as usize].name
                )));
            }
            shapes.push((clock, shape));
        }
    }
    let Some(location) = location else {
        return Err(Diagnostic::new("pattern gives no location", None));
    };
    for (i, info) in net.clocks.iter().enumerate() {
        if !shapes.iter().any(|(c, _)| c.0 as usize == i) {
            return Err(Diagnostic::new(
                format!("clock '{}' is left unconstrained by the pattern", info.name),
                None,
            ));
        }
    }
    Ok(RegionPattern {
        location,
        shapes,
        unbounded_order,
        frac_order,
    })
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn render_expr(e: &ExprDef) -> String {
    fn go(e: &ExprDef, parent_mul: bool) -> String {
        match e {
            ExprDef::Const(c) => c.to_string(),
            ExprDef::Name(n) => n.clone(),
            ExprDef::Add(a, b) => {
                let s = format!("{} + {}", go(a, false), go(b, false));
                if parent_mul {
                    format!("({})", s)
                } else {
                    s
                }
            }
            ExprDef::Sub(a, b) => {
                let s = format!("{} - {}", go(a, false), go(b, true));
                if parent_mul {
                    format!("({})", s)
                } else {
                    s
                }
            }
            ExprDef::Mul(a, b) => format!("{} * {}", go(a, true), go(b, true)),
        }
    }
    go(e, false)
}

fn render_atom(a: &AtomDef) -> String {
    format!(
        "{} {} {}",
        render_expr(&a.lhs),
        a.rel.symbol(),
        render_expr(&a.rhs)
    )
}

/// Renders an automaton definition as model text; `parse_automaton` of the
/// output reproduces the definition.
pub fn render_model(def: &AutomatonDef) -> String {
    let mut out = String::new();
    out.push_str(&format!("automaton {};\n", def.name));
    for c in &def.clocks {
        match c.max {
            Some(m) => out.push_str(&format!("clock {} max {};\n", c.name, m)),
            None => out.push_str(&format!("clock {};\n", c.name)),
        }
    }
    for v in &def.vars {
        out.push_str(&format!(
            "int {} = {} range [{}, {}];\n",
            v.name, v.init, v.lo, v.hi
        ));
    }
    for ch in &def.channels {
        out.push_str(&format!("channel {};\n", ch));
    }
    for l in &def.locations {
        out.push_str(&format!("location {}", l.name));
        if l.initial {
            out.push_str(" initial");
        }
        if l.urgent {
            out.push_str(" urgent");
        }
        if !l.invariant.is_empty() {
            let atoms: Vec<String> = l.invariant.iter().map(render_atom).collect();
            out.push_str(&format!(" invariant {}", atoms.join(" && ")));
        }
        out.push_str(";\n");
    }
    for e in &def.edges {
        out.push_str(&format!("edge {} -> {} {{", e.source, e.target));
        if !e.guard.is_empty() {
            let atoms: Vec<String> = e.guard.iter().map(render_atom).collect();
            out.push_str(&format!(" guard {};", atoms.join(" && ")));
        }
        if let Some((chan, dir)) = &e.sync {
            let mark = match dir {
                SyncDir::Emit => "!",
                SyncDir::Receive => "?",
            };
            out.push_str(&format!(" sync {}{};", chan, mark));
        }
        if !e.resets.is_empty() {
            out.push_str(&format!(" reset {};", e.resets.join(", ")));
        }
        if !e.updates.is_empty() {
            let ups: Vec<String> = e
                .updates
                .iter()
                .map(|(v, expr)| format!("{} := {}", v, render_expr(expr)))
                .collect();
            out.push_str(&format!(" do {};", ups.join(", ")));
        }
        out.push_str(" }\n");
    }
    out
}

/// Renders a region in the diagnostic form
/// `{q, h(x)=2 h(y)=2, X-2={w} X-1={z} X0={} X1={x,y}}`.
///
/// Integer parts are listed for bounded clocks; unbounded clocks sit at
/// their maximum constants. For networks the location tuple is
/// comma-joined in component order.
pub fn render_region(region: &Region, net: &Network) -> String {
    let mut out = String::from("{");
    let locs: Vec<&str> = region
        .locations()
        .iter()
        .enumerate()
        .map(|(ci, l)| net.components[ci].locations[l.0 as usize].name.as_str())
        .collect();
    out.push_str(&locs.join(","));
    out.push_str(", ");
    let mut hs = Vec::new();
    for i in 0..region.clock_count() {
        let id = crate::model::ClockId(i as u32);
        if region.status(id) != crate::model::ClockStatus::Unbounded {
            hs.push(format!("h({})={}", net.clocks[i].name, region.h(id)));
        }
    }
    out.push_str(&hs.join(" "));
    out.push_str(", ");
    let mut sets = Vec::new();
    let ell = region.ell();
    for (p, set) in region.unbounded_sets().iter().enumerate().rev() {
        let names: Vec<&str> = set
            .iter()
            .map(|c| net.clocks[c.0 as usize].name.as_str())
            .collect();
        let _ = ell;
        sets.push(format!("X-{}={{{}}}", p + 1, names.join(",")));
    }
    let unit_names: Vec<&str> = region
        .unit_set()
        .iter()
        .map(|c| net.clocks[c.0 as usize].name.as_str())
        .collect();
    sets.push(format!("X0={{{}}}", unit_names.join(",")));
    for (p, set) in region.fractional_sets().iter().enumerate() {
        let names: Vec<&str> = set
            .iter()
            .map(|c| net.clocks[c.0 as usize].name.as_str())
            .collect();
        sets.push(format!("X{}={{{}}}", p + 1, names.join(",")));
    }
    out.push_str(&sets.join(" "));
    out.push('}');
    out
}

/// Parses the diagnostic region rendering back into a region.
pub fn parse_region(text: &str, net: &Network) -> Result<Region, Diagnostic> {
    let mut p = Parser::new(text, "<region>")?;
    p.expect(Tok::LBrace)?;
    let mut locs = Vec::new();
    loop {
        let name = p.expect_name()?;
        let ci = locs.len();
        if ci >= net.components.len() {
            return Err(p.error("more locations than components"));
        }
        let loc = net.components[ci]
            .location_id(&name)
            .ok_or_else(|| p.error(format!("unknown location '{}'", name)))?;
        locs.push(loc);
        p.expect(Tok::Comma)?;
        // The location list ends once the integer-part section (possibly
        // empty) or the set section begins.
        match p.peek() {
            Some(Tok::Ident(s)) if s == "h" && p.peek_at(1) == Some(&Tok::LParen) => break,
            Some(Tok::Ident(s))
                if s == "X"
                    || (s.starts_with('X') && s[1..].chars().all(|c| c.is_ascii_digit())) =>
            {
                break
            }
            Some(Tok::Comma) => break,
            _ => continue,
        }
    }
    if locs.len() != net.components.len() {
        return Err(p.error("missing locations"));
    }

    let mut h = vec![0u32; net.clock_count()];
    let clock_by_name = |p: &Parser, name: &str| {
        net.clock_id(name)
            .ok_or_else(|| p.error(format!("unknown clock '{}'", name)))
    };
    loop {
        match p.peek() {
            Some(Tok::Ident(s)) if s == "h" && p.peek_at(1) == Some(&Tok::LParen) => {
                p.bump();
                p.expect(Tok::LParen)?;
                let mut name = p.expect_name()?;
                if p.eat(&Tok::Dot) {
                    name = format!("{}.{}", name, p.expect_name()?);
                }
                let clock = clock_by_name(&p, &name)?;
                p.expect(Tok::RParen)?;
                p.expect(Tok::Eq)?;
                let v = p.expect_int()?;
                h[clock.0 as usize] =
                    u32::try_from(v).map_err(|_| p.error("integer parts are non-negative"))?;
            }
            Some(Tok::Comma) => {
                p.bump();
                break;
            }
            _ => return Err(p.error("expected 'h(clock)=v' or ','")),
        }
    }

    let mut neg_sets: Vec<(usize, Vec<crate::model::ClockId>)> = Vec::new();
    let mut unit = Vec::new();
    let mut pos_sets: Vec<(usize, Vec<crate::model::ClockId>)> = Vec::new();
    while !p.eat(&Tok::RBrace) {
        let tag = match p.bump() {
            Some(Tok::Ident(s)) => s,
            _ => return Err(p.error("expected a set tag like 'X-1' or 'X0'")),
        };
        let index: i64 = if tag == "X" {
            p.expect(Tok::Minus)?;
            -p.expect_int()?
        } else if let Some(rest) = tag.strip_prefix('X') {
            rest.parse()
                .map_err(|_| p.error(format!("bad set tag '{}'", tag)))?
        } else {
            return Err(p.error(format!("bad set tag '{}'", tag)));
        };
        p.expect(Tok::Eq)?;
        p.expect(Tok::LBrace)?;
        let mut set = Vec::new();
        if p.peek() != Some(&Tok::RBrace) {
            loop {
                let mut name = p.expect_name()?;
                if p.eat(&Tok::Dot) {
                    name = format!("{}.{}", name, p.expect_name()?);
                }
                set.push(clock_by_name(&p, &name)?);
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        p.expect(Tok::RBrace)?;
        if index < 0 {
            neg_sets.push(((-index) as usize, set));
        } else if index == 0 {
            unit = set;
        } else {
            pos_sets.push((index as usize, set));
        }
    }
    neg_sets.sort_by_key(|(j, _)| *j);
    pos_sets.sort_by_key(|(j, _)| *j);
    let unbounded: Vec<Vec<crate::model::ClockId>> = neg_sets.into_iter().map(|(_, s)| s).collect();
    let fractional: Vec<Vec<crate::model::ClockId>> =
        pos_sets.into_iter().map(|(_, s)| s).collect();
    for set in &unbounded {
        for &c in set {
            h[c.0 as usize] = net.clock_max(c);
        }
    }
    let region = Region::from_parts(locs, h, unbounded, unit, fractional);
    region
        .check_valid(net)
        .map_err(|msg| Diagnostic::new(format!("malformed region: {}", msg), None))?;
    Ok(region)
}

// ---------------------------------------------------------------------------
// Statistics output
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct StatsJson<'a> {
    verdict: &'a str,
    regions_stored: usize,
    states_stored: usize,
    elapsed_ms: f64,
    strategy: &'a str,
    direction: &'a str,
}

/// Machine-readable statistics; schema-stable across runs.
pub fn stats_json(stats: &SearchStats) -> String {
    serde_json::to_string(&StatsJson {
        verdict: stats.verdict.name(),
        regions_stored: stats.regions_stored,
        states_stored: stats.states_stored,
        elapsed_ms: stats.elapsed.as_secs_f64() * 1e3,
        strategy: stats.strategy.name(),
        direction: stats.direction.name(),
    })
    .expect("stats serialize")
}

/// Human-readable statistics.
pub fn stats_text(stats: &SearchStats) -> String {
    let mut out = format!(
        "verdict: {}\nregions stored: {}\nstates stored: {}\nelapsed: {:.3} ms\nstrategy: {}\ndirection: {}\n",
        stats.verdict.name(),
        stats.regions_stored,
        stats.states_stored,
        stats.elapsed.as_secs_f64() * 1e3,
        stats.strategy.name(),
        stats.direction.name(),
    );
    if let Some(d) = &stats.diagnostic {
        out.push_str(&format!("note: {}\n", d));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{gen_boolean, gen_flower, gen_gates, gen_ring};
    use crate::model::LocId;
    use crate::region::initial_region;

    #[test]
    fn parses_generated_flower_two() {
        let text = render_model(&gen_flower(2));
        let net = parse_model(&[ModelSource::new("flower2.ta", text)]).unwrap();
        assert_eq!(net.components[0].locations.len(), 2);
        assert_eq!(net.components[0].transitions.len(), 3);
        assert_eq!(net.clock_count(), 3);
    }

    #[test]
    fn model_text_round_trips_for_all_families() {
        for defs in [
            vec![gen_flower(4)],
            gen_boolean(3),
            gen_ring(2),
            gen_gates(3),
        ] {
            for def in &defs {
                let text = render_model(def);
                let back = parse_automaton(&ModelSource::new("m.ta", text.clone())).unwrap();
                assert_eq!(render_model(&back), text);
            }
        }
    }

    #[test]
    fn missing_initial_location_is_rejected() {
        let text = "automaton A;\nclock x;\nlocation q0;\n";
        let err = parse_model(&[ModelSource::new("a.ta", text)]).unwrap_err();
        assert!(err
            .iter()
            .any(|d| d.message.contains("no initial location")));
    }

    #[test]
    fn oversized_guard_constant_is_rejected_with_position() {
        let text =
            "automaton A;\nclock x max 5;\nlocation q0 initial;\nedge q0 -> q0 { guard x == 6; }\n";
        let err = parse_model(&[ModelSource::new("a.ta", text)]).unwrap_err();
        let d = &err[0];
        assert!(d.message.contains("exceeds maximum"), "{}", d);
        let pos = d.pos.as_ref().unwrap();
        assert_eq!(pos.line, 4);
    }

    #[test]
    fn lower_bound_invariant_is_rejected() {
        let text = "automaton A;\nclock x max 5;\nlocation q0 initial invariant x >= 1;\n";
        let err = parse_model(&[ModelSource::new("a.ta", text)]).unwrap_err();
        assert!(err[0].message.contains("upper bound"));
    }

    #[test]
    fn syntax_error_points_at_the_offending_token() {
        let text = "automaton A;\nclock x max banana;\n";
        let err = parse_automaton(&ModelSource::new("a.ta", text)).unwrap_err();
        let pos = err.pos.unwrap();
        assert_eq!((pos.line, pos.col), (2, 13));
    }

    #[test]
    fn clock_without_max_infers_largest_constant() {
        let text = "automaton A;\nclock x;\nlocation q0 initial;\nedge q0 -> q0 { guard x >= 3; }\nedge q0 -> q0 { guard x == 1; }\n";
        let net = parse_model(&[ModelSource::new("a.ta", text)]).unwrap();
        assert_eq!(net.clock_max(net.clock_id("x").unwrap()), 3);
    }

    #[test]
    fn query_parsing() {
        let net = Network::link(&gen_boolean(2)).unwrap();
        let q = parse_query("E<> (ctr1 == 1 && ctr2 == 1)", &net).unwrap();
        assert_eq!(q.atoms.len(), 2);
        let q = parse_query("E<> (false)", &net).unwrap();
        assert_eq!(q.atoms, vec![QueryAtom::False]);
        let q = parse_query("E<> (Boolean1.q1)", &net).unwrap();
        assert!(matches!(q.atoms[0], QueryAtom::Loc { component: 0, .. }));
        assert!(parse_query("E<> (Boolean1.zzz)", &net).is_err());
        assert!(parse_query("E<> (nosuch == 1)", &net).is_err());
    }

    #[test]
    fn pattern_parsing_and_errors() {
        let net = Network::link(&[gen_flower(4)]).unwrap();
        let text = crate::bench::flower_backward_pattern(4, true);
        let pat = parse_pattern(&text, &net).unwrap();
        assert_eq!(pat.shapes.len(), 5);
        assert_eq!(pat.unbounded_order.as_ref().unwrap().len(), 1);

        let incomplete = "location q0\nx1 = 1";
        let err = parse_pattern(incomplete, &net).unwrap_err();
        assert!(err.message.contains("x2"), "{}", err.message);
    }

    #[test]
    fn region_rendering_round_trips() {
        let net = Network::link(&[gen_flower(2)]).unwrap();
        let init = initial_region(&net, &[LocId(0)]).unwrap();
        let mut regions = vec![init.clone()];
        // Walk a few delay steps to vary the shapes.
        let mut cur = init;
        for _ in 0..6 {
            match crate::kinematics::immediate_delay_successor(&cur, &net) {
                Some(next) => {
                    regions.push(next.clone());
                    cur = next;
                }
                None => break,
            }
        }
        for r in &regions {
            let text = render_region(r, &net);
            let back = parse_region(&text, &net).unwrap();
            assert_eq!(&back, r, "through {}", text);
        }
    }

    #[test]
    fn rendered_example_region_has_the_documented_shape() {
        let mut def = AutomatonDef::new("A");
        for name in ["x", "y", "z", "w"] {
            def.clock(name, Some(5));
        }
        def.location("q", true);
        let net = Network::link(&[def]).unwrap();
        let (x, y, z, w) = (
            net.clock_id("x").unwrap(),
            net.clock_id("y").unwrap(),
            net.clock_id("z").unwrap(),
            net.clock_id("w").unwrap(),
        );
        let r = Region::from_parts(
            vec![LocId(0)],
            vec![2, 2, 5, 5],
            vec![vec![z], vec![w]],
            vec![],
            vec![vec![x, y]],
        );
        assert_eq!(
            render_region(&r, &net),
            "{q, h(x)=2 h(y)=2, X-2={w} X-1={z} X0={} X1={x,y}}"
        );
    }
}
