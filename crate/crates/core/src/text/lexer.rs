use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Arrow,
    FatArrow,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Slash,
    Comma,
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Arrow => "`->`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.'
}

/// Splits source text into tokens. `#` starts a comment outside strings;
/// `\r\n` and `\n` both end a line.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in source.split('\n').enumerate() {
        let line = lineno + 1;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line, column });
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '"' => {
                    let mut s = String::new();
                    i += 1;
                    loop {
                        match chars.get(i) {
                            None => return Err(ParseError::new(line, column, "unterminated string")),
                            Some('"') => {
                                i += 1;
                                break;
                            }
                            Some('\\') => match chars.get(i + 1) {
                                Some('"') => {
                                    s.push('"');
                                    i += 2;
                                }
                                Some('\\') => {
                                    s.push('\\');
                                    i += 2;
                                }
                                Some(other) => {
                                    return Err(ParseError::new(line, i + 1, format!("unknown escape `\\{other}`")))
                                }
                                None => return Err(ParseError::new(line, column, "unterminated string")),
                            },
                            Some(ch) => {
                                s.push(*ch);
                                i += 1;
                            }
                        }
                    }
                    push(&mut out, Tok::Str(s));
                }
                '-' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Tok::Arrow);
                    i += 2;
                }
                '=' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Tok::FatArrow);
                    i += 2;
                }
                '{' | '}' | '[' | ']' | '/' | ',' => {
                    let tok = match c {
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        '/' => Tok::Slash,
                        _ => Tok::Comma,
                    };
                    push(&mut out, tok);
                    i += 1;
                }
                c if is_ident_char(c) => {
                    let start = i;
                    while i < chars.len() && is_ident_char(chars[i]) {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                }
                other => {
                    return Err(ParseError::new(line, column, format!("unexpected character {other:?}")));
                }
            }
        }
        out.push(Token { tok: Tok::Newline, line, column: chars.len() + 1 });
    }
    let (line, column) = out.last().map_or((1, 1), |t| (t.line, t.column));
    out.push(Token { tok: Tok::Eof, line, column });
    Ok(out)
}

/// Cursor over a token list with helpers shared by the parsers.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    pub fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.pos += 1;
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(t.line, t.column, format!("expected {wanted}, found {}", t.tok.describe()))
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Token, ParseError> {
        if &self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub fn ident(&mut self) -> Result<(String, Token), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.next()))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub fn string(&mut self) -> Result<(String, Token), ParseError> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                Ok((s, self.next()))
            }
            _ => Err(self.unexpected("string")),
        }
    }

    /// Requires the end of the current statement line.
    pub fn end_line(&mut self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::Newline => {
                self.pos += 1;
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("end of line")),
        }
    }
}

/// Quotes a string with `\"` and `\\` escapes.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_and_comments() {
        let toks = tokenize("edge a -> b [guard \"x \\\"y\\\\\"] # tail").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("edge".into()),
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::LBracket,
                Tok::Ident("guard".into()),
                Tok::Str("x \"y\\".into()),
                Tok::RBracket,
                Tok::Newline,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn crlf_matches_lf() {
        let a = tokenize("a b\r\nc\r\n").unwrap();
        let b = tokenize("a b\nc\n").unwrap();
        let strip = |v: Vec<Token>| v.into_iter().map(|t| (t.tok, t.line)).collect::<Vec<_>>();
        assert_eq!(strip(a), strip(b));
    }

    #[test]
    fn bad_input_is_located() {
        let e = tokenize("ok\n  \"open").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = tokenize("x \"a\\n\"").unwrap_err();
        assert_eq!(e.line, 1);
        let e = tokenize("a ; b").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
    }

    #[test]
    fn quote_round_trips() {
        let s = "a \"b\" \\c";
        let toks = tokenize(&quote(s)).unwrap();
        assert_eq!(toks[0].tok, Tok::Str(s.into()));
    }
}
