use super::lexer::{quote, tokenize, Cursor, Tok};
use crate::error::ParseError;
use crate::model::{Label, Vocabulary};

/// Parses `canon STRING` and `alias STRING => STRING` lines.
pub fn parse_vocabulary(source: &str) -> Result<Vocabulary, ParseError> {
    let mut cur = Cursor::new(tokenize(source)?);
    let mut vocab = Vocabulary::new();
    loop {
        cur.skip_newlines();
        if cur.peek().tok == Tok::Eof {
            break;
        }
        let (kw, kw_tok) = cur.ident()?;
        let at = |e: crate::error::ModelError| ParseError::new(kw_tok.line, kw_tok.column, e.to_string());
        match kw.as_str() {
            "canon" => {
                let (s, _) = cur.string()?;
                vocab.add_canonical(Label::new(&s).map_err(at)?).map_err(at)?;
            }
            "alias" => {
                let (from, _) = cur.string()?;
                cur.expect(&Tok::FatArrow)?;
                let (to, _) = cur.string()?;
                vocab.add_alias(Label::new(&from).map_err(at)?, Label::new(&to).map_err(at)?).map_err(at)?;
            }
            other => {
                return Err(ParseError::new(kw_tok.line, kw_tok.column, format!("unknown statement `{other}`")));
            }
        }
        cur.end_line()?;
    }
    Ok(vocab)
}

pub fn serialize_vocabulary(v: &Vocabulary) -> String {
    let mut out = String::new();
    for c in v.canonical() {
        out += &format!("canon {}\n", quote(c.as_str()));
    }
    for (a, t) in v.aliases() {
        out += &format!("alias {} => {}\n", quote(a.as_str()), quote(t.as_str()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canon_and_alias() {
        let v = parse_vocabulary("canon \"A0\"\nalias \"action9\" => \"A0\"\n").unwrap();
        assert_eq!(v.canonical().count(), 1);
        assert_eq!(v.aliases().count(), 1);
        assert_eq!(v.canonicalize(&Label::new("action9").unwrap()).as_str(), "A0");
        assert_eq!(parse_vocabulary(&serialize_vocabulary(&v)).unwrap(), v);
    }

    #[test]
    fn empty_file() {
        assert!(parse_vocabulary("").unwrap().is_empty());
        assert!(parse_vocabulary("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn alias_needs_canonical_target() {
        let e = parse_vocabulary("alias \"x\" => \"y\"\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.message.contains("\"y\""));
    }

    #[test]
    fn duplicate_canonical() {
        let e = parse_vocabulary("canon \"a\"\ncanon \"a\"\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn chains_rejected() {
        assert!(parse_vocabulary("canon \"a\"\nalias \"b\" => \"a\"\nalias \"c\" => \"b\"\n").is_err());
    }
}
