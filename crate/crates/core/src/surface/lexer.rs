//! Tokeniser for `.ratt` sources.

use num_bigint::BigUint;

use super::{Span, SyntaxError};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Nat(BigUint),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Kw(k) => format!("`{k}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "def", "delay", "adv", "box", "unbox", "progress", "promote", "into", "out", "fix", "case", "of",
    "in1", "in2", "fst", "snd", "val", "wait", "just", "nothing", "if", "then", "else", "true",
    "false", "head", "tail", "mu",
];

/// Longest match first.
const SYMBOLS: &[&str] = &[
    "[<*>]", "<*>", "[*]", "<*", "::", "->", "==", "\\", ".", "(", ")", ",", ":", "=", "+", "-", "*",
    "<", "|", "$", "[", "]",
];

/// Unicode spellings accepted as synonyms.
const UNICODE: &[(char, &str)] = &[
    ('λ', "\\"),
    ('♦', "$"),
    ('⊛', "<*>"),
    ('⊙', "<*"),
    ('⊡', "[*]"),
    ('→', "->"),
    ('×', "*"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        let span = |len: usize| Span { line: start.0, col: start.1, len };
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n: BigUint = text.parse().expect("digits");
            out.push(Token { tok: Tok::Nat(n), span: span(j - i) });
            col += j - i;
            i = j;
            continue;
        }
        if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let tok = match KEYWORDS.iter().find(|k| **k == text) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(text),
            };
            out.push(Token { tok, span: span(j - i) });
            col += j - i;
            i = j;
            continue;
        }
        if let Some((_, sym)) = UNICODE.iter().find(|(u, _)| *u == c) {
            let sym = SYMBOLS.iter().find(|s| *s == sym).expect("known symbol");
            out.push(Token { tok: Tok::Sym(sym), span: span(1) });
            i += 1;
            col += 1;
            continue;
        }
        let rest = &chars[i..];
        let matched = SYMBOLS.iter().find(|s| {
            let sc: Vec<char> = s.chars().collect();
            rest.len() >= sc.len() && rest[..sc.len()] == sc[..]
        });
        match matched {
            Some(sym) => {
                let n = sym.chars().count();
                out.push(Token { tok: Tok::Sym(sym), span: span(n) });
                i += n;
                col += n;
            }
            None => {
                return Err(SyntaxError {
                    span: span(1),
                    expected: vec![],
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col, len: 0 } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_take_the_longest_match() {
        assert_eq!(
            toks("a <*> b <* c [*] d [<*>] e < f"),
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("<*>"),
                Tok::Ident("b".into()),
                Tok::Sym("<*"),
                Tok::Ident("c".into()),
                Tok::Sym("[*]"),
                Tok::Ident("d".into()),
                Tok::Sym("[<*>]"),
                Tok::Ident("e".into()),
                Tok::Sym("<"),
                Tok::Ident("f".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn comments_and_primes() {
        assert_eq!(
            toks("sum' -- the accumulator\n x->y"),
            vec![
                Tok::Ident("sum'".into()),
                Tok::Ident("x".into()),
                Tok::Sym("->"),
                Tok::Ident("y".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions() {
        let ts = lex("def\n  zeros").unwrap();
        assert_eq!(ts[1].span, Span { line: 2, col: 3, len: 5 });
    }

    #[test]
    fn unicode_synonyms() {
        assert_eq!(toks("λx. x ⊛ y")[3], Tok::Sym("<*>"));
        assert!(lex("a ? b").is_err());
    }
}
