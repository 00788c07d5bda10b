//! Text format for circuits built from named gates.
//!
//! ```text
//! let nqubits=3, version="0.6.0"
//!     1=>H                # put
//!     1=>C, 2=>X          # control
//!     begin               # nested chain
//!         1=>X, 3=>Z      # kron
//!         2=>!C, 3=>Rx(0.5)
//!     end
//! end
//! ```
//!
//! A line with one `loc=>gate` pair is a put, several pairs form a kron,
//! and `C` (or `!C` for an inverse control) marks control qubits. A line
//! with controls and several gate pairs is a control over the kron of those
//! pairs. Multi-qubit gates take a tuple location, `(1, 2)=>SWAP`. `!C` and
//! parameterized gates (`Rx`, `Ry`, `Rz`, `shift`, `phase`) go beyond the
//! original format and are written by [`emit_script`] when needed.

mod emit;
mod lexer;

use std::collections::BTreeSet;

use lexer::{describe, tokenize, Tok, Token};

use crate::block::{self, Block};
use crate::error::{Error, Result, Span};
use crate::gates;

pub use emit::emit_script;

/// Version written into emitted headers.
pub const SCRIPT_VERSION: &str = "0.6.0";

/// Deepest `begin … end` nesting accepted.
pub const MAX_NESTING: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// Control qubit; `false` for an inverse control.
    Control(bool),
    Gate { name: String, param: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub span: Span,
    pub locs: Vec<usize>,
    pub target: Target,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Line { span: Span, pairs: Vec<Pair> },
    Block { span: Span, body: Vec<Stmt> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptAst {
    pub nqubits: usize,
    pub version: String,
    pub body: Vec<Stmt>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn perr<T>(span: Span, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        span,
        message: message.into(),
    })
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Token> {
        let t = self.next();
        if t.tok != want {
            return perr(t.span, format!("expected {}, found {}", describe(&want), describe(&t.tok)));
        }
        Ok(t)
    }

    fn keyword(&mut self, kw: &str) -> Result<Token> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t),
            other => perr(t.span, format!("expected `{kw}`, found {}", describe(other))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.next();
        }
    }

    fn end_of_line(&mut self) -> Result<()> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Newline => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            other => perr(t.span, format!("expected end of line, found {}", describe(&other))),
        }
    }

    fn integer(&mut self) -> Result<(usize, Span)> {
        let t = self.next();
        match &t.tok {
            Tok::Number(s) => match s.parse::<usize>() {
                Ok(v) => Ok((v, t.span)),
                Err(_) => perr(t.span, format!("expected a non-negative integer, found `{s}`")),
            },
            other => perr(t.span, format!("expected an integer, found {}", describe(other))),
        }
    }

    fn header(&mut self) -> Result<(usize, String)> {
        self.skip_newlines();
        if !self.at_keyword("let") {
            let t = self.peek();
            return perr(t.span, format!("expected header `let nqubits=…`, found {}", describe(&t.tok)));
        }
        self.next();
        self.keyword("nqubits")?;
        self.expect(Tok::Eq)?;
        let (n, span) = self.integer()?;
        if n == 0 || n > crate::bitstr::MAX_BITS {
            return Err(Error::ScriptValidation {
                span,
                message: format!("nqubits must be in 1..={}", crate::bitstr::MAX_BITS),
            });
        }
        self.expect(Tok::Comma)?;
        self.keyword("version")?;
        self.expect(Tok::Eq)?;
        let t = self.next();
        let Tok::Str(version) = t.tok else {
            return perr(t.span, format!("expected a version string, found {}", describe(&t.tok)));
        };
        Ok((n, version))
    }

    /// Statements up to (and consuming) the closing `end`.
    fn body(&mut self, depth: usize) -> Result<Vec<Stmt>> {
        let mut out = Vec::new();
        loop {
            self.skip_newlines();
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => return perr(t.span, "missing `end`"),
                Tok::Ident(s) if s == "end" => {
                    self.next();
                    self.end_of_line()?;
                    return Ok(out);
                }
                Tok::Ident(s) if s == "begin" => {
                    if depth >= MAX_NESTING {
                        return perr(t.span, format!("blocks nested deeper than {MAX_NESTING}"));
                    }
                    self.next();
                    self.end_of_line()?;
                    let body = self.body(depth + 1)?;
                    out.push(Stmt::Block { span: t.span, body });
                }
                _ => out.push(self.line()?),
            }
        }
    }

    fn line(&mut self) -> Result<Stmt> {
        let span = self.peek().span;
        let mut pairs = vec![self.pair()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            pairs.push(self.pair()?);
        }
        self.end_of_line()?;
        Ok(Stmt::Line { span, pairs })
    }

    fn pair(&mut self) -> Result<Pair> {
        let span = self.peek().span;
        let locs = if self.peek().tok == Tok::LParen {
            self.next();
            let mut locs = vec![self.integer()?.0];
            while self.peek().tok == Tok::Comma {
                self.next();
                if self.peek().tok == Tok::RParen {
                    break;
                }
                locs.push(self.integer()?.0);
            }
            self.expect(Tok::RParen)?;
            locs
        } else {
            vec![self.integer()?.0]
        };
        self.expect(Tok::Arrow)?;
        let target = self.target()?;
        Ok(Pair { span, locs, target })
    }

    fn target(&mut self) -> Result<Target> {
        let t = self.next();
        match &t.tok {
            Tok::Bang => {
                let c = self.next();
                match &c.tok {
                    Tok::Ident(s) if s == "C" => Ok(Target::Control(false)),
                    other => perr(c.span, format!("expected `C` after `!`, found {}", describe(other))),
                }
            }
            Tok::Ident(s) if s == "C" => Ok(Target::Control(true)),
            Tok::Ident(name) => {
                let param = if self.peek().tok == Tok::LParen {
                    self.next();
                    let n = self.next();
                    let v = match &n.tok {
                        Tok::Number(s) => match s.parse::<f64>() {
                            Ok(v) if v.is_finite() => v,
                            _ => return perr(n.span, format!("invalid number `{s}`")),
                        },
                        other => return perr(n.span, format!("expected a number, found {}", describe(other))),
                    };
                    self.expect(Tok::RParen)?;
                    Some(v)
                } else {
                    None
                };
                Ok(Target::Gate {
                    name: name.clone(),
                    param,
                })
            }
            other => perr(t.span, format!("expected a gate name or `C`, found {}", describe(other))),
        }
    }
}

/// Parses the text into its syntax tree without building blocks.
pub fn parse_ast(text: &str) -> Result<ScriptAst> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let (nqubits, version) = p.header()?;
    if version != SCRIPT_VERSION {
        log::warn!("script version {version} differs from {SCRIPT_VERSION}");
    }
    p.end_of_line()?;
    let body = p.body(0)?;
    p.skip_newlines();
    let t = p.peek();
    if t.tok != Tok::Eof {
        return perr(t.span, format!("unexpected {} after the final `end`", describe(&t.tok)));
    }
    Ok(ScriptAst { nqubits, version, body })
}

fn gate_block(name: &str, param: Option<f64>, span: Span) -> Result<Block> {
    let name = if name == "I" { "I2" } else { name };
    match (gates::is_parametric(name), param) {
        (true, Some(v)) => Ok(match name {
            "Rx" => block::rx(v),
            "Ry" => block::ry(v),
            "Rz" => block::rz(v),
            "shift" => block::shift(v),
            _ => block::phase(v),
        }),
        (true, None) => perr(span, format!("gate `{name}` needs a parameter")),
        (false, Some(_)) => perr(span, format!("gate `{name}` takes no parameter")),
        (false, None) => block::gate(name).or_else(|_| perr(span, format!("unknown gate `{name}`"))),
    }
}

impl ScriptAst {
    pub fn to_block(&self) -> Result<Block> {
        self.chain(&self.body)
    }

    fn chain(&self, body: &[Stmt]) -> Result<Block> {
        let children = body
            .iter()
            .map(|s| match s {
                Stmt::Line { span, pairs } => self.line(*span, pairs),
                Stmt::Block { body, .. } => self.chain(body),
            })
            .collect::<Result<Vec<_>>>()?;
        block::chain(self.nqubits, children)
    }

    fn line(&self, span: Span, pairs: &[Pair]) -> Result<Block> {
        let n = self.nqubits;
        let mut seen = BTreeSet::new();
        let mut ctrl_locs = Vec::new();
        let mut ctrl_cfg = Vec::new();
        let mut gates = Vec::new();
        for p in pairs {
            for &q in &p.locs {
                if q == 0 || q > n {
                    return Err(Error::ScriptRange {
                        span: p.span,
                        qubit: q,
                        nqubits: n,
                    });
                }
                if !seen.insert(q) {
                    return Err(Error::ScriptValidation {
                        span: p.span,
                        message: format!("qubit {q} used twice on one line"),
                    });
                }
            }
            match &p.target {
                Target::Control(active) => {
                    if p.locs.len() != 1 {
                        return Err(Error::ScriptValidation {
                            span: p.span,
                            message: "a control takes a single qubit".into(),
                        });
                    }
                    ctrl_locs.push(p.locs[0]);
                    ctrl_cfg.push(u8::from(*active));
                }
                Target::Gate { name, param } => {
                    let g = gate_block(name, *param, p.span)?;
                    if g.nqubits() != p.locs.len() {
                        return Err(Error::ScriptValidation {
                            span: p.span,
                            message: format!("{}-qubit gate `{name}` on {} qubits", g.nqubits(), p.locs.len()),
                        });
                    }
                    gates.push((p.locs.clone(), g));
                }
            }
        }
        if gates.is_empty() {
            return Err(Error::ScriptValidation {
                span,
                message: "line has controls but no gate".into(),
            });
        }
        let wrap = |e: Error| Error::ScriptValidation {
            span,
            message: e.to_string(),
        };
        if ctrl_locs.is_empty() {
            return if gates.len() == 1 {
                let (locs, g) = gates.pop().expect("one gate");
                block::put(n, &locs, g).map_err(wrap)
            } else {
                block::kron(n, gates).map_err(wrap)
            };
        }
        if gates.len() == 1 {
            let (locs, g) = gates.pop().expect("one gate");
            return block::control_with(n, &ctrl_locs, &ctrl_cfg, &locs, g).map_err(wrap);
        }
        let targets: Vec<usize> = gates.iter().flat_map(|(l, _)| l.iter().copied()).collect();
        let local = gates
            .into_iter()
            .map(|(l, g)| {
                let rel = l.iter().map(|q| targets.iter().position(|t| t == q).expect("target") + 1).collect();
                (rel, g)
            })
            .collect();
        let k = block::kron(targets.len(), local).map_err(wrap)?;
        block::control_with(n, &ctrl_locs, &ctrl_cfg, &targets, k).map_err(wrap)
    }
}

/// Parses a script into a chain block.
pub fn parse_script(text: &str) -> Result<Block> {
    parse_ast(text)?.to_block()
}

/// Like [`parse_script`] for raw bytes; invalid UTF-8 is a parse error.
pub fn parse_script_bytes(bytes: &[u8]) -> Result<Block> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_script(text),
        Err(e) => {
            let good = &bytes[..e.valid_up_to()];
            let line = 1 + good.iter().filter(|&&b| b == b'\n').count();
            let col = 1 + good.iter().rev().take_while(|&&b| b != b'\n').count();
            perr(Span { line, col }, "invalid UTF-8")
        }
    }
}

#[cfg(test)]
mod tests;
