//! Line-oriented tokenizer.

use crate::ast::Pos;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
    /// Twist label following `@` or `with`.
    Label(String),
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const HYPHENATED: &[&str] = &["rules-suite", "bass-tate"];
const SYMBOLS: &str = "+-*/^()[]{}<>,:=@";

/// Tokens of one logical line (comments stripped).
pub fn lex_line(line: &str, lineno: usize) -> Result<Vec<Token>, CliError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line: lineno, col: i + 1 };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token { tok: Tok::Int(chars[start..i].iter().collect()), pos });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let mut word: String = chars[start..i].iter().collect();
            for h in HYPHENATED {
                let Some(rest) = h.strip_prefix(word.as_str()) else { continue };
                let n = rest.chars().count();
                let end = i + n;
                let matches = !rest.is_empty() && end <= chars.len() && chars[i..end].iter().copied().eq(rest.chars());
                if matches && (end == chars.len() || !(chars[end].is_alphanumeric() || chars[end] == '_')) {
                    word = h.to_string();
                    i = end;
                    break;
                }
            }
            let is_with = word == "with";
            out.push(Token { tok: Tok::Ident(word), pos });
            if is_with {
                i = lex_label(&chars, i, lineno, &mut out)?;
            }
            continue;
        }
        if SYMBOLS.contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos });
            i += 1;
            if c == '@' {
                i = lex_label(&chars, i, lineno, &mut out)?;
            }
            continue;
        }
        return Err(CliError::syntax(pos, format!("unexpected character '{c}'")));
    }
    Ok(out)
}

/// A label runs to whitespace, a top-level comma or an unbalanced `)`.
fn lex_label(chars: &[char], mut i: usize, lineno: usize, out: &mut Vec<Token>) -> Result<usize, CliError> {
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    let start = i;
    let mut depth = 0i32;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '#' || (depth == 0 && (c == ',' || c == ')')) {
            break;
        }
        if c == '(' {
            depth += 1;
        } else if c == ')' {
            depth -= 1;
        }
        i += 1;
    }
    let pos = Pos { line: lineno, col: start + 1 };
    if start == i {
        return Err(CliError::syntax(pos, "expected a twist label"));
    }
    out.push(Token { tok: Tok::Label(chars[start..i].iter().collect()), pos });
    Ok(i)
}
