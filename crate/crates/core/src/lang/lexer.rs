use super::diagnostic::{Diagnostic, DiagnosticKind, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    UName(String),
    LName(String),
    Int(i64),
    Stop,
    Skip,
    Channel,
    Set,
    Arrow,
    ExtChoice,
    IntChoice,
    Parallel,
    Interleave,
    GenOpen,
    GenClose,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    DotDot,
    Dot,
    Query,
    Bang,
    Colon,
    Equals,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::UName(s) | Tok::LName(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Tok::Stop => "STOP",
            Tok::Skip => "SKIP",
            Tok::Channel => "channel",
            Tok::Set => "set",
            Tok::Arrow => "->",
            Tok::ExtChoice => "[]",
            Tok::IntChoice => "|~|",
            Tok::Parallel => "||",
            Tok::Interleave => "|||",
            Tok::GenOpen => "[|",
            Tok::GenClose => "|]",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::DotDot => "..",
            Tok::Dot => ".",
            Tok::Query => "?",
            Tok::Bang => "!",
            Tok::Colon => ":",
            Tok::Equals => "=",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&self, ahead: usize) -> Option<u8> {
        self.src.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) {
        if let Some(&b) = self.src.get(self.pos) {
            self.pos += 1;
            if b == b'\n' {
                self.line += 1;
                self.column = 1;
            } else if b & 0xC0 != 0x80 {
                // count characters, not UTF-8 continuation bytes
                self.column += 1;
            }
        }
    }

    fn span_from(&self, start: usize, line: u32, column: u32) -> Span {
        Span {
            start,
            end: self.pos,
            line,
            column,
        }
    }
}

/// Splits `src` into tokens. Unknown characters produce a diagnostic and
/// are skipped, so lexing always reaches the end of input.
pub fn tokenize(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor {
        src: src.as_bytes(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();

    while let Some(b) = cur.peek(0) {
        let (start, line, column) = (cur.pos, cur.line, cur.column);
        if b.is_ascii_whitespace() {
            cur.bump();
            continue;
        }
        if b == b'-' && cur.peek(1) == Some(b'-') {
            while cur.peek(0).is_some_and(|c| c != b'\n') {
                cur.bump();
            }
            continue;
        }
        let tok = if b.is_ascii_alphabetic() || b == b'_' {
            while cur.peek(0).is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                cur.bump();
            }
            let word = &src[start..cur.pos];
            match word {
                "STOP" => Tok::Stop,
                "SKIP" => Tok::Skip,
                "channel" => Tok::Channel,
                "set" => Tok::Set,
                _ if b.is_ascii_uppercase() => Tok::UName(word.to_string()),
                _ if b.is_ascii_lowercase() => Tok::LName(word.to_string()),
                _ => {
                    errors.push(Diagnostic::new(
                        DiagnosticKind::SyntaxError,
                        cur.span_from(start, line, column),
                        format!("identifier `{word}` must start with a letter"),
                    ));
                    continue;
                }
            }
        } else if b.is_ascii_digit() || (b == b'-' && cur.peek(1).is_some_and(|c| c.is_ascii_digit())) {
            cur.bump();
            while cur.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            match src[start..cur.pos].parse::<i64>() {
                Ok(n) => Tok::Int(n),
                Err(_) => Tok::Int(i64::MAX),
            }
        } else {
            let two = (b, cur.peek(1));
            let three = (b, cur.peek(1), cur.peek(2));
            let (tok, len) = match three {
                (b'|', Some(b'|'), Some(b'|')) => (Some(Tok::Interleave), 3),
                (b'|', Some(b'~'), Some(b'|')) => (Some(Tok::IntChoice), 3),
                _ => match two {
                    (b'-', Some(b'>')) => (Some(Tok::Arrow), 2),
                    (b'[', Some(b']')) => (Some(Tok::ExtChoice), 2),
                    (b'[', Some(b'|')) => (Some(Tok::GenOpen), 2),
                    (b'|', Some(b']')) => (Some(Tok::GenClose), 2),
                    (b'|', Some(b'|')) => (Some(Tok::Parallel), 2),
                    (b'.', Some(b'.')) => (Some(Tok::DotDot), 2),
                    _ => (
                        match b {
                            b'[' => Some(Tok::LBrack),
                            b']' => Some(Tok::RBrack),
                            b'{' => Some(Tok::LBrace),
                            b'}' => Some(Tok::RBrace),
                            b'(' => Some(Tok::LParen),
                            b')' => Some(Tok::RParen),
                            b',' => Some(Tok::Comma),
                            b'.' => Some(Tok::Dot),
                            b'?' => Some(Tok::Query),
                            b'!' => Some(Tok::Bang),
                            b':' => Some(Tok::Colon),
                            b'=' => Some(Tok::Equals),
                            _ => None,
                        },
                        1,
                    ),
                },
            };
            match tok {
                Some(t) => {
                    for _ in 0..len {
                        cur.bump();
                    }
                    t
                }
                None => {
                    cur.bump();
                    while cur.peek(0).is_some_and(|c| c & 0xC0 == 0x80) {
                        cur.bump();
                    }
                    let text = &src[start..cur.pos];
                    errors.push(Diagnostic::new(
                        DiagnosticKind::SyntaxError,
                        cur.span_from(start, line, column),
                        format!("unexpected character `{}`", text.escape_debug()),
                    ));
                    continue;
                }
            }
        };
        tokens.push(Token {
            tok,
            span: cur.span_from(start, line, column),
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span {
            start: cur.pos,
            end: cur.pos,
            line: cur.line,
            column: cur.column,
        },
    });
    (tokens, errors)
}
