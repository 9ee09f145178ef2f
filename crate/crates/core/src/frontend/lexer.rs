//! Tokens shared by the line-oriented text formats.

use std::fmt;

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    Int(u32),
    Str(String),
    Arrow,
    Assign,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Eq,
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Assign => f.write_str("`:=`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn word_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '.' || c == '/'
}

fn word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '/' | '\'' | '+')
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut j = 0;
        while j < chars.len() {
            let c = chars[j];
            let col = j + 1;
            let at = |tok| Token { tok, line: ln, col };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                j += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[start..j].iter().collect();
                let n = s
                    .parse()
                    .map_err(|_| ParseError::new(ln, col, format!("number `{s}` is too large")))?;
                out.push(at(Tok::Int(n)));
                continue;
            }
            if word_start(c) {
                let start = j;
                j += 1;
                loop {
                    if j < chars.len() && word_char(chars[j]) {
                        j += 1;
                    } else if j + 1 < chars.len() && chars[j] == '-' && word_char(chars[j + 1]) {
                        j += 2;
                    } else {
                        break;
                    }
                }
                out.push(at(Tok::Word(chars[start..j].iter().collect())));
                continue;
            }
            if c == '"' {
                let start = j + 1;
                j = start;
                while j < chars.len() && chars[j] != '"' {
                    j += 1;
                }
                if j == chars.len() {
                    return Err(ParseError::new(ln, col, "unterminated string"));
                }
                out.push(at(Tok::Str(chars[start..j].iter().collect())));
                j += 1;
                continue;
            }
            let next = chars.get(j + 1).copied();
            let (tok, width) = match (c, next) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                (':', Some('=')) => (Tok::Assign, 2),
                ('⊥', _) => (Tok::Word("bot".into()), 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                (';', _) => (Tok::Semi, 1),
                ('=', _) => (Tok::Eq, 1),
                _ => return Err(ParseError::new(ln, col, format!("unexpected character `{c}`"))),
            };
            out.push(at(tok));
            j += width;
        }
        out.push(Token {
            tok: Tok::Newline,
            line: ln,
            col: chars.len() + 1,
        });
    }
    let line = out.last().map_or(1, |t| t.line + 1);
    out.push(Token { tok: Tok::Eof, line, col: 1 });
    Ok(out)
}

/// Cursor over a token list.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Cursor, ParseError> {
        Ok(Cursor { toks: lex(text)?, pos: 0 })
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    pub fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::new(t.line, t.col, msg)
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek().tok))
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Token, ParseError> {
        if &self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub fn word(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        match &self.peek().tok {
            Tok::Word(w) => {
                let w = w.clone();
                Ok((w, self.next()))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub fn int(&mut self, what: &str) -> Result<u32, ParseError> {
        match self.peek().tok {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub fn at_line_end(&self) -> bool {
        matches!(self.peek().tok, Tok::Newline | Tok::Eof)
    }

    pub fn end_line(&mut self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::Newline => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("end of line")),
        }
    }

    pub fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.next();
        }
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    /// A word or a quoted string, used for file references.
    pub fn path(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Word(w) | Tok::Str(w) => {
                let w = w.clone();
                self.next();
                Ok(w)
            }
            _ => Err(self.unexpected("a file name")),
        }
    }

    /// A value literal: a natural number or `bot`.
    pub fn value(&mut self) -> Result<crate::model::Value, ParseError> {
        match &self.peek().tok {
            Tok::Int(n) => {
                let v = crate::model::Value::Num(*n);
                self.next();
                Ok(v)
            }
            Tok::Word(w) if w == "bot" => {
                self.next();
                Ok(crate::model::Value::Bottom)
            }
            _ => Err(self.unexpected("a value")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn words_numbers_and_symbols() {
        assert_eq!(
            toks("var X := and(A, 1) # note"),
            vec![
                Tok::Word("var".into()),
                Tok::Word("X".into()),
                Tok::Assign,
                Tok::Word("and".into()),
                Tok::LParen,
                Tok::Word("A".into()),
                Tok::Comma,
                Tok::Int(1),
                Tok::RParen,
                Tok::Newline,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn dashes_join_words_but_not_arrows() {
        assert_eq!(
            toks("case-split u {0->g0}"),
            vec![
                Tok::Word("case-split".into()),
                Tok::Word("u".into()),
                Tok::LBrace,
                Tok::Int(0),
                Tok::Arrow,
                Tok::Word("g0".into()),
                Tok::RBrace,
                Tok::Newline,
                Tok::Eof
            ]
        );
        assert_eq!(toks("x->y")[1], Tok::Arrow);
    }

    #[test]
    fn positions_are_one_based() {
        let t = lex("a\n  $").unwrap_err();
        assert_eq!((t.line, t.column), (2, 3));
    }
}
