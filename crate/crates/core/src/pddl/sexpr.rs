//! Minimal s-expression reader for PDDL text.
//!
//! Symbols are lowercased on read; PDDL is case-insensitive.

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Atom { text: String, pos: Pos },
    List { items: Vec<SExpr>, pos: Pos },
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom { pos, .. } | SExpr::List { pos, .. } => *pos,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Atom { .. } => None,
        }
    }

    /// First element of a list when it is an atom, e.g. `and` in `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|items| items.first()).and_then(SExpr::as_atom)
    }
}

pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Vec<(Token, Pos)> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                column += 1;
                tokens.push((Token::Open, pos));
            }
            ')' => {
                chars.next();
                column += 1;
                tokens.push((Token::Close, pos));
            }
            _ => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.extend(c.to_lowercase());
                    chars.next();
                    column += 1;
                }
                tokens.push((Token::Atom(text), pos));
            }
        }
    }
    tokens
}

/// Reads exactly one top-level expression; trailing content is an error.
pub fn read_one(text: &str) -> Result<SExpr, ParseError> {
    let tokens = tokenize(text);
    let mut iter = tokens.into_iter().peekable();
    let expr = match iter.next() {
        Some((tok, pos)) => read_expr(tok, pos, &mut iter)?,
        None => return Err(syntax(Pos { line: 1, column: 1 }, "empty input")),
    };
    if let Some((_, pos)) = iter.next() {
        return Err(syntax(pos, "unexpected content after top-level expression"));
    }
    Ok(expr)
}

fn read_expr(
    tok: Token,
    pos: Pos,
    rest: &mut std::iter::Peekable<std::vec::IntoIter<(Token, Pos)>>,
) -> Result<SExpr, ParseError> {
    match tok {
        Token::Atom(text) => Ok(SExpr::Atom { text, pos }),
        Token::Close => Err(syntax(pos, "unbalanced ')'")),
        Token::Open => {
            let mut items = Vec::new();
            loop {
                match rest.next() {
                    None => return Err(syntax(pos, "unclosed '('")),
                    Some((Token::Close, _)) => return Ok(SExpr::List { items, pos }),
                    Some((tok, p)) => items.push(read_expr(tok, p, rest)?),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_lowercases() {
        let e = read_one("(Define (domain BW) ; comment\n (:x))").unwrap();
        assert_eq!(e.head(), Some("define"));
        let items = e.as_list().unwrap();
        assert_eq!(items[1].as_list().unwrap()[1].as_atom(), Some("bw"));
        assert_eq!(items[2].pos(), Pos { line: 2, column: 2 });
    }

    #[test]
    fn reports_position_of_unclosed_paren() {
        match read_one("(a\n (b c)") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_trailing_tokens() {
        match read_one("(a) b") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
