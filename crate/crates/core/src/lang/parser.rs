//! Recursive-descent parser producing an unresolved syntax tree.

use super::diagnostic::{Diagnostic, DiagnosticKind, Span};
use super::lexer::{Tok, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueExpr {
    Name(String),
    Int(i32),
}

#[derive(Clone, Debug)]
pub struct SetItemExpr {
    /// A value, or a dotted event path (`spoofing.engine_cu.2`).
    pub path: Vec<ValueExpr>,
}

#[derive(Clone, Debug)]
pub enum SetExprKind {
    Literal(Vec<SetItemExpr>),
    Range(i32, i32),
    Named(String),
}

#[derive(Clone, Debug)]
pub struct SetExpr {
    pub kind: SetExprKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum FieldExpr {
    Dot(ValueExpr, Span),
    Bang(ValueExpr, Span),
    Query {
        var: String,
        domain: Option<SetExpr>,
        span: Span,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    ExtChoice,
    IntChoice,
    Parallel,
    Interleave,
}

#[derive(Clone, Debug)]
pub enum ProcExprKind {
    Stop,
    Skip,
    Name(String),
    Prefix {
        channel: String,
        channel_span: Span,
        fields: Vec<FieldExpr>,
        cont: Box<ProcExpr>,
    },
    Binary(BinOp, Box<ProcExpr>, Box<ProcExpr>),
    GenParallel(Box<ProcExpr>, SetExpr, Box<ProcExpr>),
    AlphaParallel(Box<ProcExpr>, SetExpr, SetExpr, Box<ProcExpr>),
}

#[derive(Clone, Debug)]
pub struct ProcExpr {
    pub kind: ProcExprKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum Decl {
    Set {
        name: String,
        value: SetExpr,
        span: Span,
    },
    Channel {
        name: String,
        domains: Vec<SetExpr>,
        span: Span,
    },
    Proc {
        name: String,
        body: ProcExpr,
        span: Span,
    },
}

impl Decl {
    pub fn span(&self) -> Span {
        match self {
            Decl::Set { span, .. } | Decl::Channel { span, .. } | Decl::Proc { span, .. } => *span,
        }
    }
}

type PResult<T> = Result<T, Diagnostic>;

/// Deepest operator nesting accepted; keeps recursion bounded on hostile input.
pub const MAX_NESTING: usize = 256;

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        Parser {
            tokens,
            pos: 0,
            depth: 0,
        }
    }

    /// Parses a whole script. A syntax error abandons the current
    /// declaration and resumes at the next declaration boundary.
    pub fn script(mut self) -> (Vec<Decl>, Vec<Diagnostic>) {
        let mut decls = Vec::new();
        let mut errors = Vec::new();
        while self.peek() != &Tok::Eof {
            let start = self.pos;
            self.depth = 0;
            match self.decl() {
                Ok(d) => decls.push(d),
                Err(e) => {
                    errors.push(e);
                    self.recover(start);
                }
            }
        }
        (decls, errors)
    }

    fn recover(&mut self, decl_start: usize) {
        if self.pos == decl_start && self.peek() != &Tok::Eof {
            self.pos += 1;
        }
        while !self.at_decl_start() {
            self.pos += 1;
        }
    }

    fn at_decl_start(&self) -> bool {
        match self.peek() {
            Tok::Eof | Tok::Set | Tok::Channel => true,
            Tok::UName(_) => self.peek_at(1) == &Tok::Equals,
            _ => false,
        }
    }

    fn peek(&self) -> &Tok {
        self.peek_at(0)
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos.min(self.tokens.len() - 1)].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(Diagnostic::new(
            DiagnosticKind::SyntaxError,
            self.span(),
            format!("expected {expected}, found {}", self.peek().describe()),
        ))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.advance().span)
        } else {
            self.error(what)
        }
    }

    fn uname(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::UName(n) => Ok((n, self.advance().span)),
            _ => self.error(what),
        }
    }

    fn lname(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::LName(n) => Ok((n, self.advance().span)),
            _ => self.error(what),
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        let start = self.span();
        match self.peek() {
            Tok::Set => {
                self.advance();
                let (name, _) = self.uname("a set name")?;
                self.expect(Tok::Equals, "`=`")?;
                let value = self.valueset()?;
                Ok(Decl::Set {
                    name,
                    value,
                    span: start.to(self.prev_span()),
                })
            }
            Tok::Channel => {
                self.advance();
                let (name, _) = self.lname("a channel name")?;
                let mut domains = Vec::new();
                while *self.peek() == Tok::Colon {
                    self.advance();
                    domains.push(self.valueset()?);
                }
                Ok(Decl::Channel {
                    name,
                    domains,
                    span: start.to(self.prev_span()),
                })
            }
            Tok::UName(_) => {
                let (name, _) = self.uname("a process name")?;
                self.expect(Tok::Equals, "`=`")?;
                let body = self.proc()?;
                if !self.at_decl_start() {
                    return self.error("an operator or the next declaration");
                }
                Ok(Decl::Proc {
                    name,
                    body,
                    span: start.to(self.prev_span()),
                })
            }
            _ => self.error("`set`, `channel` or a process definition"),
        }
    }

    pub fn proc(&mut self) -> PResult<ProcExpr> {
        self.ext_choice()
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        if self.depth >= MAX_NESTING {
            return Err(Diagnostic::new(
                DiagnosticKind::SyntaxError,
                self.span(),
                format!("expression nested deeper than {MAX_NESTING} levels"),
            ));
        }
        self.depth += 1;
        let result = f(self);
        self.depth -= 1;
        result
    }

    fn ext_choice(&mut self) -> PResult<ProcExpr> {
        let left = self.int_choice()?;
        if *self.peek() == Tok::ExtChoice {
            self.advance();
            let right = self.nested(Self::ext_choice)?;
            return Ok(binary(BinOp::ExtChoice, left, right));
        }
        Ok(left)
    }

    fn int_choice(&mut self) -> PResult<ProcExpr> {
        let left = self.parallel()?;
        if *self.peek() == Tok::IntChoice {
            self.advance();
            let right = self.nested(Self::int_choice)?;
            return Ok(binary(BinOp::IntChoice, left, right));
        }
        Ok(left)
    }

    fn parallel(&mut self) -> PResult<ProcExpr> {
        let left = self.prefix()?;
        match self.peek() {
            Tok::Parallel | Tok::Interleave => {
                let op = if self.advance().tok == Tok::Parallel {
                    BinOp::Parallel
                } else {
                    BinOp::Interleave
                };
                let right = self.nested(Self::parallel)?;
                Ok(binary(op, left, right))
            }
            Tok::GenOpen => {
                self.advance();
                let sync = self.valueset()?;
                self.expect(Tok::GenClose, "`|]`")?;
                let right = self.nested(Self::parallel)?;
                let span = left.span.to(right.span);
                Ok(ProcExpr {
                    kind: ProcExprKind::GenParallel(Box::new(left), sync, Box::new(right)),
                    span,
                })
            }
            Tok::LBrack => {
                self.advance();
                let la = self.valueset()?;
                self.expect(Tok::Parallel, "`||`")?;
                let ra = self.valueset()?;
                self.expect(Tok::RBrack, "`]`")?;
                let right = self.nested(Self::parallel)?;
                let span = left.span.to(right.span);
                Ok(ProcExpr {
                    kind: ProcExprKind::AlphaParallel(Box::new(left), la, ra, Box::new(right)),
                    span,
                })
            }
            _ => Ok(left),
        }
    }

    fn prefix(&mut self) -> PResult<ProcExpr> {
        if let Tok::LName(channel) = self.peek().clone() {
            let channel_span = self.advance().span;
            let mut fields = Vec::new();
            loop {
                match self.peek() {
                    Tok::Dot => {
                        self.advance();
                        let (v, s) = self.value()?;
                        fields.push(FieldExpr::Dot(v, s));
                    }
                    Tok::Bang => {
                        self.advance();
                        let (v, s) = self.value()?;
                        fields.push(FieldExpr::Bang(v, s));
                    }
                    Tok::Query => {
                        let q = self.advance().span;
                        let (var, _) = self.lname("an input variable")?;
                        let domain = if *self.peek() == Tok::Colon {
                            self.advance();
                            Some(self.valueset()?)
                        } else {
                            None
                        };
                        fields.push(FieldExpr::Query {
                            var,
                            domain,
                            span: q.to(self.prev_span()),
                        });
                    }
                    _ => break,
                }
            }
            self.expect(Tok::Arrow, "`->`")?;
            let cont = self.nested(Self::prefix)?;
            let span = channel_span.to(cont.span);
            return Ok(ProcExpr {
                kind: ProcExprKind::Prefix {
                    channel,
                    channel_span,
                    fields,
                    cont: Box::new(cont),
                },
                span,
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<ProcExpr> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Stop => ProcExprKind::Stop,
            Tok::Skip => ProcExprKind::Skip,
            Tok::UName(n) => ProcExprKind::Name(n),
            Tok::LParen => {
                self.advance();
                let inner = self.nested(Self::proc)?;
                let close = self.expect(Tok::RParen, "`)`")?;
                return Ok(ProcExpr {
                    kind: inner.kind,
                    span: span.to(close),
                });
            }
            _ => return self.error("a process"),
        };
        self.advance();
        Ok(ProcExpr { kind, span })
    }

    fn int(&mut self) -> PResult<(i32, Span)> {
        match self.peek().clone() {
            Tok::Int(n) => {
                let span = self.advance().span;
                i32::try_from(n).map(|n| (n, span)).map_err(|_| {
                    Diagnostic::new(
                        DiagnosticKind::SyntaxError,
                        span,
                        "integer does not fit in 32 bits",
                    )
                })
            }
            _ => self.error("an integer"),
        }
    }

    fn value(&mut self) -> PResult<(ValueExpr, Span)> {
        match self.peek().clone() {
            Tok::LName(n) => Ok((ValueExpr::Name(n), self.advance().span)),
            Tok::Int(_) => self.int().map(|(n, s)| (ValueExpr::Int(n), s)),
            _ => self.error("a value"),
        }
    }

    fn valueset(&mut self) -> PResult<SetExpr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::UName(n) => {
                self.advance();
                Ok(SetExpr {
                    kind: SetExprKind::Named(n),
                    span: start,
                })
            }
            Tok::LBrace => {
                self.advance();
                if let (Tok::Int(_), Tok::DotDot) = (self.peek().clone(), self.peek_at(1).clone()) {
                    let (lo, _) = self.int()?;
                    self.advance();
                    let (hi, _) = self.int()?;
                    let close = self.expect(Tok::RBrace, "`}`")?;
                    return Ok(SetExpr {
                        kind: SetExprKind::Range(lo, hi),
                        span: start.to(close),
                    });
                }
                let mut items = Vec::new();
                if *self.peek() != Tok::RBrace {
                    loop {
                        let (first, _) = self.value()?;
                        let mut path = vec![first];
                        while *self.peek() == Tok::Dot {
                            self.advance();
                            path.push(self.value()?.0);
                        }
                        items.push(SetItemExpr { path });
                        if *self.peek() == Tok::Comma {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                let close = self.expect(Tok::RBrace, "`,` or `}`")?;
                Ok(SetExpr {
                    kind: SetExprKind::Literal(items),
                    span: start.to(close),
                })
            }
            _ => self.error("a set"),
        }
    }
}

fn binary(op: BinOp, left: ProcExpr, right: ProcExpr) -> ProcExpr {
    let span = left.span.to(right.span);
    ProcExpr {
        kind: ProcExprKind::Binary(op, Box::new(left), Box::new(right)),
        span,
    }
}
