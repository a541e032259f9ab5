use crate::diag::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// Longest first.
const SYMBOLS: &[&str] = &[
    "#int", "#bool", "#->", "~>", "->", "=>", ":=", "::", "==", "(", ")", "{", "}", "[", "]", "<", ">", ",", ";", ".",
    ":", "|", "@", "+", "*", "=",
];

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("--") || src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let text = &src[start..i];
            let n = text.parse::<i64>().map_err(|_| {
                Diagnostic::error(Span::new(src, start, i), "syntax", format!("integer literal `{text}` out of range"))
            })?;
            out.push(Token { tok: Tok::Int(n), span: Span::new(src, start, i) });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), span: Span::new(src, start, i) });
            continue;
        }
        match SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            Some(s) => {
                i += s.len();
                out.push(Token { tok: Tok::Sym(s), span: Span::new(src, start, i) });
            }
            None => {
                let ch = src[i..].chars().next().expect("in bounds");
                return Err(Diagnostic::error(
                    Span::new(src, start, start + ch.len_utf8()),
                    "syntax",
                    format!("unexpected character `{ch}`"),
                ));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(src, src.len(), src.len()) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_negatives() {
        assert_eq!(
            toks("a ~> -2 #-> b -> c -- gone"),
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("~>"),
                Tok::Int(-2),
                Tok::Sym("#->"),
                Tok::Ident("b".into()),
                Tok::Sym("->"),
                Tok::Ident("c".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn bad_character_has_span() {
        let e = lex("A.1 $").unwrap_err();
        assert_eq!((e.span.start, e.span.line, e.span.col), (4, 1, 5));
    }
}
