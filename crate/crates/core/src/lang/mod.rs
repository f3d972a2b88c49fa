//! The `.cspa` script language: lexer, parser, name resolution and printer.

mod diagnostic;
mod lexer;
mod parser;
mod printer;
mod resolve;

use indexmap::IndexMap;

pub use diagnostic::{Diagnostic, DiagnosticKind, Diagnostics, Span};
pub use printer::{print, process as print_process};

use crate::kernel::Environment;

/// A resolved script together with the source span of each definition.
#[derive(Clone, Debug)]
pub struct Script {
    pub env: Environment,
    pub spans: IndexMap<String, Span>,
}

/// Stack for the parsing thread; deep nesting recurses through several
/// frames per level.
const PARSE_STACK: usize = 64 << 20;

/// Parses and checks a script, returning every diagnostic on failure.
pub fn parse_script(text: &str) -> Result<Script, Diagnostics> {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .name("cspa-parse".into())
            .stack_size(PARSE_STACK)
            .spawn_scoped(scope, || parse_script_here(text))
            .expect("cannot spawn the parser thread")
            .join()
            .unwrap_or_else(|panic| std::panic::resume_unwind(panic))
    })
}

fn parse_script_here(text: &str) -> Result<Script, Diagnostics> {
    let (tokens, mut errors) = lexer::tokenize(text);
    let (decls, syntax) = parser::Parser::new(tokens).script();
    errors.extend(syntax);
    let (resolved, semantic) = resolve::resolve(&decls);
    if errors.is_empty() && semantic.is_empty() {
        return Ok(Script {
            env: resolved.env,
            spans: resolved.spans,
        });
    }
    // resolution errors after a syntax error are often knock-on effects
    if errors.is_empty() {
        errors = semantic;
    }
    errors.sort_by_key(|d| d.span.start);
    Err(Diagnostics(errors))
}

pub fn parse(text: &str) -> Result<Environment, Diagnostics> {
    parse_script(text).map(|s| s.env)
}

/// Like [`parse`], for input that may not be valid UTF-8.
pub fn parse_bytes(bytes: &[u8]) -> Result<Environment, Diagnostics> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let offset = e.valid_up_to();
            let before = &bytes[..offset];
            let line = before.iter().filter(|&&b| b == b'\n').count() as u32 + 1;
            let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            let column = String::from_utf8_lossy(&before[line_start..]).chars().count() as u32 + 1;
            Err(Diagnostics(vec![Diagnostic::new(
                DiagnosticKind::SyntaxError,
                Span {
                    start: offset,
                    end: (offset + e.error_len().unwrap_or(1)).min(bytes.len()),
                    line,
                    column,
                },
                "input is not valid UTF-8",
            )]))
        }
    }
}
