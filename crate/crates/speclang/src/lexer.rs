use crate::ast::Span;
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifiers, element names and integers share one lexical class.
    Word(String),
    Hash,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Assign,
    Eq,
    Slash,
    Arrow,
    /// `•` or `.`
    Op,
    Pipe,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Hash => "`#`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Op => "`•`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&(start, c)) = chars.peek() {
        let here = |end: usize| Span { start, end, line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '/' && src[start..].starts_with("//") {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if is_word_char(c) && c != '\'' {
            let mut end = start;
            while let Some(&(i, c)) = chars.peek() {
                if !is_word_char(c) {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
            }
            let span = here(end);
            col += src[start..end].chars().count();
            out.push(Token {
                tok: Tok::Word(src[start..end].to_string()),
                span,
            });
            continue;
        }
        let two = src.get(start..start + 2).unwrap_or("");
        let (tok, len) = match (c, two) {
            (_, ":=") => (Tok::Assign, 2),
            (_, "->") => (Tok::Arrow, 2),
            ('#', _) => (Tok::Hash, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (';', _) => (Tok::Semi, 1),
            (':', _) => (Tok::Colon, 1),
            (',', _) => (Tok::Comma, 1),
            ('=', _) => (Tok::Eq, 1),
            ('/', _) => (Tok::Slash, 1),
            ('|', _) => (Tok::Pipe, 1),
            ('.', _) => (Tok::Op, 1),
            ('•', _) => (Tok::Op, '•'.len_utf8()),
            _ => {
                return Err(ParseError {
                    message: format!("unexpected character `{c}`"),
                    span: here(start + c.len_utf8()),
                    expected: Vec::new(),
                })
            }
        };
        let span = here(start + len);
        for _ in 0..src[start..start + len].chars().count() {
            chars.next();
            col += 1;
        }
        out.push(Token { tok, span });
    }
    let end = src.len();
    out.push(Token {
        tok: Tok::Eof,
        span: Span {
            start: end,
            end,
            line,
            col,
        },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn words_and_symbols() {
        assert_eq!(
            toks("b1 := max(b0, #1) • b2 . x' // tail"),
            vec![
                Tok::Word("b1".into()),
                Tok::Assign,
                Tok::Word("max".into()),
                Tok::LParen,
                Tok::Word("b0".into()),
                Tok::Comma,
                Tok::Hash,
                Tok::Word("1".into()),
                Tok::RParen,
                Tok::Op,
                Tok::Word("b2".into()),
                Tok::Op,
                Tok::Word("x'".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn positions_track_lines_and_columns() {
        let t = tokenize("magma\n  Z2 •").unwrap();
        assert_eq!((t[1].span.line, t[1].span.col), (2, 3));
        assert_eq!((t[2].span.line, t[2].span.col), (2, 6));
        assert_eq!(&"magma\n  Z2 •"[t[2].span.start..t[2].span.end], "•");
    }

    #[test]
    fn rejects_stray_characters() {
        let e = tokenize("system s $").unwrap_err();
        assert_eq!((e.span.line, e.span.col), (1, 10));
    }
}
