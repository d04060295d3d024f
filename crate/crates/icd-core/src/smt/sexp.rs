//! Minimal s-expression reader for SMT-LIB2 documents and solver output.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    /// Atom: symbol, keyword, numeral or string literal (quotes stripped).
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) => Some(s),
            Sexp::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::Atom(_) => None,
            Sexp::List(items) => Some(items),
        }
    }

    /// Head symbol of a list form.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SexpError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for SexpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

/// Parses a whole document into top-level forms. Comments (`;` to end of
/// line) are skipped; `"` strings and `|` quoted symbols become atoms.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Sexp>> = Vec::new();
    let mut line = 1usize;
    let mut chars = src.char_indices().peekable();

    let push = |stack: &mut Vec<Vec<Sexp>>, out: &mut Vec<Sexp>, e: Sexp| match stack.last_mut() {
        Some(top) => top.push(e),
        None => out.push(e),
    };

    while let Some((i, c)) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            ';' => {
                for (_, c2) in chars.by_ref() {
                    if c2 == '\n' {
                        line += 1;
                        break;
                    }
                }
            }
            '(' => stack.push(Vec::new()),
            ')' => {
                let items = stack.pop().ok_or_else(|| SexpError {
                    line,
                    msg: "unmatched ')'".to_string(),
                })?;
                push(&mut stack, &mut out, Sexp::List(items));
            }
            '"' | '|' => {
                let quote = c;
                let mut s = String::new();
                let mut closed = false;
                for (_, c2) in chars.by_ref() {
                    if c2 == '\n' {
                        line += 1;
                    }
                    if c2 == quote {
                        closed = true;
                        break;
                    }
                    s.push(c2);
                }
                if !closed {
                    return Err(SexpError {
                        line,
                        msg: "unterminated quote".to_string(),
                    });
                }
                push(&mut stack, &mut out, Sexp::Atom(s));
            }
            _ => {
                let start = i;
                let mut end = src.len();
                while let Some(&(j, c2)) = chars.peek() {
                    if c2.is_whitespace() || c2 == '(' || c2 == ')' || c2 == ';' {
                        end = j;
                        break;
                    }
                    chars.next();
                }
                if chars.peek().is_none() && end == src.len() {
                    // atom runs to end of input
                }
                push(
                    &mut stack,
                    &mut out,
                    Sexp::Atom(src[start..end].to_string()),
                );
            }
        }
    }
    if !stack.is_empty() {
        return Err(SexpError {
            line,
            msg: "unclosed '('".to_string(),
        });
    }
    Ok(out)
}
