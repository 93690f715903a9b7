//! Line-level N-Triples grammar.
//!
//! Follows the W3C RDF 1.1 N-Triples grammar: absolute IRIs only, `_:` blank
//! nodes, quoted literals with optional language tag or datatype, one triple
//! per line, `#` comments.

use crate::term::{Term, TermError};

/// A grammar violation within a single line. `column` is a byte offset into the line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub column: usize,
    pub message: String,
}

impl LineError {
    fn new(column: usize, message: impl Into<String>) -> Self {
        LineError {
            column,
            message: message.into(),
        }
    }
}

pub type ParsedTriple = (Term, Term, Term);

/// Parses one line (without its end-of-line characters).
///
/// Returns `Ok(None)` for blank and comment-only lines.
pub fn parse_line(line: &str) -> Result<Option<ParsedTriple>, LineError> {
    let mut cur = Cursor { src: line, pos: 0 };
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank_node()?,
        _ => return Err(cur.error("expected IRI or blank node as subject")),
    };
    cur.skip_ws();
    let predicate = match cur.peek() {
        Some('<') => cur.iri()?,
        _ => return Err(cur.error("expected IRI as predicate")),
    };
    cur.skip_ws();
    let object = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('_') => cur.blank_node()?,
        Some('"') => cur.literal()?,
        _ => return Err(cur.error("expected IRI, blank node or literal as object")),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err(cur.error("expected '.' after object"));
    }
    cur.bump();
    cur.skip_ws();
    match cur.peek() {
        None | Some('#') => Ok(Some((subject, predicate, object))),
        Some(_) => Err(cur.error("unexpected content after '.'")),
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> LineError {
        LineError::new(self.pos, message)
    }

    fn expect(&mut self, want: char) -> Result<(), LineError> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(format!("expected '{want}'"))),
        }
    }

    fn iri(&mut self) -> Result<Term, LineError> {
        let start = self.pos;
        let text = self.iri_text()?;
        if !has_scheme(&text) {
            return Err(LineError::new(start, format!("relative IRI <{text}> not allowed")));
        }
        Term::iri(text).map_err(|e| term_error(start, e))
    }

    fn iri_text(&mut self) -> Result<String, LineError> {
        self.expect('<')?;
        let mut out = String::new();
        loop {
            let at = self.pos;
            match self.bump() {
                None => return Err(LineError::new(at, "unterminated IRI")),
                Some('>') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('u') => out.push(self.hex_char(4)?),
                    Some('U') => out.push(self.hex_char(8)?),
                    _ => return Err(LineError::new(at, "only \\u and \\U escapes allowed in IRIs")),
                },
                Some(c) if crate::term::needs_iri_escape(c) => {
                    return Err(LineError::new(at, format!("character {c:?} not allowed in IRI")))
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn hex_char(&mut self, digits: usize) -> Result<char, LineError> {
        let start = self.pos;
        let hex = self
            .src
            .get(self.pos..self.pos + digits)
            .filter(|h| h.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| LineError::new(start, "malformed numeric escape"))?;
        self.pos += digits;
        let code = u32::from_str_radix(hex, 16).expect("validated hex digits");
        char::from_u32(code).ok_or_else(|| LineError::new(start, format!("U+{code:X} is not a scalar value")))
    }

    fn blank_node(&mut self) -> Result<Term, LineError> {
        let start = self.pos;
        if !self.src[self.pos..].starts_with("_:") {
            return Err(self.error("expected '_:'"));
        }
        self.pos += 2;
        let label_start = self.pos;
        match self.peek() {
            Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => {
                self.bump();
            }
            _ => return Err(self.error("invalid blank node label")),
        }
        while let Some(c) = self.peek() {
            if is_pn_chars(c) || c == '.' {
                self.bump();
            } else {
                break;
            }
        }
        // a trailing '.' terminates the statement, it is not part of the label
        while self.src[label_start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        Term::blank(&self.src[label_start..self.pos]).map_err(|e| term_error(start, e))
    }

    fn literal(&mut self) -> Result<Term, LineError> {
        let start = self.pos;
        self.expect('"')?;
        let mut lexical = String::new();
        loop {
            let at = self.pos;
            match self.bump() {
                None => return Err(LineError::new(at, "unterminated string literal")),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return Err(LineError::new(at, "invalid string escape")),
                    };
                    lexical.push(c);
                }
                Some('\n' | '\r') => return Err(LineError::new(at, "raw line break in literal")),
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let lang = self.language_tag()?;
                Term::literal(lexical, None, Some(lang)).map_err(|e| term_error(start, e))
            }
            Some('^') => {
                if !self.src[self.pos..].starts_with("^^") {
                    return Err(self.error("expected '^^'"));
                }
                self.pos += 2;
                let dt_start = self.pos;
                let dt = self.iri_text()?;
                if !has_scheme(&dt) {
                    return Err(LineError::new(dt_start, format!("relative datatype IRI <{dt}>")));
                }
                Term::literal(lexical, Some(dt), None).map_err(|e| term_error(start, e))
            }
            _ => Ok(Term::string(lexical)),
        }
    }

    fn language_tag(&mut self) -> Result<String, LineError> {
        let start = self.pos;
        let primary = self.take_while(|c| c.is_ascii_alphabetic());
        if primary == 0 {
            return Err(LineError::new(start, "language tag must start with a letter"));
        }
        while self.peek() == Some('-') {
            self.bump();
            if self.take_while(|c| c.is_ascii_alphanumeric()) == 0 {
                return Err(self.error("empty language subtag"));
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> usize {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.bump();
        }
        self.pos - start
    }
}

fn term_error(column: usize, e: TermError) -> LineError {
    LineError::new(column, e.to_string())
}

/// `scheme ":"` prefix per RFC 3987.
fn has_scheme(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else {
        return false;
    };
    let scheme = &iri[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

fn is_pn_chars_base(c: char) -> bool {
    matches!(c,
        'A'..='Z' | 'a'..='z'
        | '\u{C0}'..='\u{D6}' | '\u{D8}'..='\u{F6}' | '\u{F8}'..='\u{2FF}'
        | '\u{370}'..='\u{37D}' | '\u{37F}'..='\u{1FFF}' | '\u{200C}'..='\u{200D}'
        | '\u{2070}'..='\u{218F}' | '\u{2C00}'..='\u{2FEF}' | '\u{3001}'..='\u{D7FF}'
        | '\u{F900}'..='\u{FDCF}' | '\u{FDF0}'..='\u{FFFD}' | '\u{10000}'..='\u{EFFFF}')
}

fn is_pn_chars_u(c: char) -> bool {
    is_pn_chars_base(c) || c == '_' || c == ':'
}

fn is_pn_chars(c: char) -> bool {
    is_pn_chars_u(c)
        || c == '-'
        || c.is_ascii_digit()
        || matches!(c, '\u{B7}' | '\u{300}'..='\u{36F}' | '\u{203F}'..='\u{2040}')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(line: &str) -> ParsedTriple {
        parse_line(line).unwrap().unwrap()
    }

    #[test]
    fn minimal_triple() {
        let (s, p, o) = ok("<urn:a> <urn:p> <urn:b> .");
        assert_eq!(s.as_iri(), Some("urn:a"));
        assert_eq!(p.as_iri(), Some("urn:p"));
        assert_eq!(o.as_iri(), Some("urn:b"));
    }

    #[test]
    fn no_whitespace_and_blank_node_before_dot() {
        let (s, _, o) = ok("_:b1<http://x/p>_:b2.");
        assert_eq!(s.lexical(), "b1");
        assert_eq!(o.lexical(), "b2");
        let (s, _, _) = ok("_:a.b <http://x/p> <http://x/o> .");
        assert_eq!(s.lexical(), "a.b");
    }

    #[test]
    fn literals() {
        let (_, _, o) = ok(r#"<urn:s> <urn:p> "서울"@ko ."#);
        assert_eq!(o.lexical(), "서울");
        assert_eq!(o.language(), Some("ko"));
        let (_, _, o) = ok(r#"<urn:s> <urn:p> "a\tb\u0041\U0001F600" ."#);
        assert_eq!(o.lexical(), "a\tbA\u{1F600}");
        let (_, _, o) = ok(r#"<urn:s> <urn:p> "1"^^<http://www.w3.org/2001/XMLSchema#integer> ."#);
        assert_eq!(o.datatype(), Some("http://www.w3.org/2001/XMLSchema#integer"));
        let (_, _, o) = ok(r#"<urn:s> <urn:p> "x"@en-GB-oed ."#);
        assert_eq!(o.language(), Some("en-GB-oed"));
    }

    #[test]
    fn comments_and_blank_lines() {
        assert_eq!(parse_line("").unwrap(), None);
        assert_eq!(parse_line("  \t# hi").unwrap(), None);
        assert!(parse_line("<urn:a> <urn:p> <urn:b> . # trailing").unwrap().is_some());
    }

    #[test]
    fn rejections() {
        for bad in [
            "<urn:a> <urn:p> <urn:b>",
            "<a> <urn:p> <urn:b> .",
            "<urn:a> _:p <urn:b> .",
            "\"lit\" <urn:p> <urn:b> .",
            "<urn:a> <urn:p> \"x\"@1 .",
            "<urn:a> <urn:p> \"\\q\" .",
            "<urn:a> <urn:p> <urn:b> . extra",
            "<urn:a b> <urn:p> <urn:b> .",
            "<urn:a> <urn:p> \"\\uD800\" .",
            "<urn:a> <urn:p> 1 .",
            "<urn:a> <urn:p> \"x\"^^<dt> .",
        ] {
            assert!(parse_line(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn error_column_points_at_problem() {
        let err = parse_line("<urn:a> <urn:p> 1 .").unwrap_err();
        assert_eq!(err.column, 16);
    }
}
