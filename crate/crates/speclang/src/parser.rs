//! Recursive-descent parser for `.gsys` documents.
//!
//! ```text
//! file    := item*
//! item    := magma | fn | system | team | cover | classical | query
//! magma   := "magma" NAME ( "{" "elements" ":" list ";" "op" ":" table ";" "}"
//!                         | "=" NAME "(" words ")" ";" )
//! fn      := "fn" NAME "/" INT "over" NAME "=" table ";"
//! system  := "system" NAME ( "over" NAME "vars" set domain? "{" rule* "}"
//!                          | "=" NAME "(" args ")" ";" )
//! domain  := "domain" ( NAME | "{" configs "}" )
//! rule    := NAME ":=" term ";"
//! term    := atom ( ("•" | ".") atom )*
//! atom    := NAME | "#" ELEM | NAME "(" terms ")" | "(" term ")"
//! team    := "team" NAME "over" NAME "vars" set "{" configs "}"
//! cover   := "cover" NAME "=" set "|" set ";"
//! classical := "classical" NAME "{" ( NAME ":" table ";" )* "}"
//! query   := "query" NAME ":" NAME "(" args ")" ";"
//! arg     := NAME | set | "{" NAME "->" NAME, ... "}" | list | config
//! ```

use crate::ast::*;
use crate::error::ParseError;
use crate::lexer::{tokenize, Tok, Token};

pub fn parse(src: &str) -> Result<Document, ParseError> {
    let tokens = tokenize(src)?;
    Parser { tokens, pos: 0 }.document()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

const ITEM_KEYWORDS: [&str; 7] = ["magma", "fn", "system", "team", "cover", "classical", "query"];

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(ParseError {
            message: format!("unexpected {}", t.tok.describe()),
            span: t.span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            self.error(&[&tok.describe()])
        }
    }

    fn word(&mut self, what: &str) -> PResult<Ident> {
        match &self.peek().tok {
            Tok::Word(w) => {
                let text = w.clone();
                let span = self.bump().span;
                Ok(Ident { text, span })
            }
            _ => self.error(&[what]),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        match &self.peek().tok {
            Tok::Word(w) if w == kw => Ok(self.bump().span),
            _ => self.error(&[&format!("`{kw}`")]),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w == kw)
    }

    /// `open item (sep item)* sep? close`, allowing an empty sequence.
    fn delimited<T>(
        &mut self,
        open: Tok,
        sep: Tok,
        close: Tok,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<(Vec<T>, Span)> {
        let start = self.expect(open)?;
        let mut out = Vec::new();
        loop {
            if self.peek().tok == close {
                break;
            }
            out.push(item(self)?);
            if !self.eat(&sep) {
                break;
            }
        }
        let end = self.expect(close)?;
        Ok((out, start.to(end)))
    }

    fn document(mut self) -> PResult<Document> {
        let mut items = Vec::new();
        while self.peek().tok != Tok::Eof {
            items.push(self.item()?);
        }
        Ok(Document { items })
    }

    fn item(&mut self) -> PResult<Item> {
        let start = self.peek().span;
        let kind = match &self.peek().tok {
            Tok::Word(w) => match w.as_str() {
                "magma" => ItemKind::Magma(self.magma()?),
                "fn" => ItemKind::Fn(self.fn_def()?),
                "system" => ItemKind::System(self.system()?),
                "team" => ItemKind::Team(self.team()?),
                "cover" => ItemKind::Cover(self.cover()?),
                "classical" => ItemKind::Classical(self.classical()?),
                "query" => ItemKind::Query(self.query()?),
                _ => return self.error(&ITEM_KEYWORDS),
            },
            _ => return self.error(&ITEM_KEYWORDS),
        };
        Ok(Item {
            kind,
            span: start.to(self.prev_span()),
        })
    }

    fn magma(&mut self) -> PResult<MagmaDef> {
        self.keyword("magma")?;
        let name = self.word("a magma name")?;
        if self.eat(&Tok::Eq) {
            let ctor = self.word("a magma constructor")?;
            let (args, _) = self.delimited(Tok::LParen, Tok::Comma, Tok::RParen, |p| p.word("an argument"))?;
            self.expect(Tok::Semi)?;
            return Ok(MagmaDef {
                name,
                body: MagmaBody::Builtin { ctor, args },
            });
        }
        self.expect(Tok::LBrace)?;
        self.keyword("elements")?;
        self.expect(Tok::Colon)?;
        let (elements, _) = self.word_list()?;
        self.expect(Tok::Semi)?;
        self.keyword("op")?;
        self.expect(Tok::Colon)?;
        let op = self.table()?;
        self.expect(Tok::Semi)?;
        self.expect(Tok::RBrace)?;
        Ok(MagmaDef {
            name,
            body: MagmaBody::Table { elements, op },
        })
    }

    fn word_list(&mut self) -> PResult<(Vec<Ident>, Span)> {
        self.delimited(Tok::LBracket, Tok::Comma, Tok::RBracket, |p| p.word("a name"))
    }

    fn table(&mut self) -> PResult<Table> {
        if self.peek().tok == Tok::LBracket {
            let (rows, span) = self.delimited(Tok::LBracket, Tok::Comma, Tok::RBracket, |p| p.table())?;
            Ok(Table::Rows(rows, span))
        } else {
            match &self.peek().tok {
                Tok::Word(_) => Ok(Table::Leaf(self.word("an element")?)),
                _ => self.error(&["`[`", "an element"]),
            }
        }
    }

    fn fn_def(&mut self) -> PResult<FnDef> {
        self.keyword("fn")?;
        let name = self.word("a function name")?;
        self.expect(Tok::Slash)?;
        let arity = self.word("an arity")?;
        self.keyword("over")?;
        let magma = self.word("a magma name")?;
        self.expect(Tok::Eq)?;
        let table = self.table()?;
        self.expect(Tok::Semi)?;
        Ok(FnDef {
            name,
            arity,
            magma,
            table,
        })
    }

    fn set(&mut self) -> PResult<SetLit> {
        let (items, span) = self.delimited(Tok::LBrace, Tok::Comma, Tok::RBrace, |p| p.word("a variable"))?;
        Ok(SetLit { items, span })
    }

    fn config(&mut self) -> PResult<ConfigLit> {
        let (entries, span) = self.delimited(Tok::LParen, Tok::Comma, Tok::RParen, |p| {
            let var = p.word("a variable")?;
            p.expect(Tok::Eq)?;
            let val = p.word("an element")?;
            Ok((var, val))
        })?;
        Ok(ConfigLit { entries, span })
    }

    fn configs(&mut self) -> PResult<(Vec<ConfigLit>, Span)> {
        self.delimited(Tok::LBrace, Tok::Semi, Tok::RBrace, |p| p.config())
    }

    fn system(&mut self) -> PResult<SystemDef> {
        self.keyword("system")?;
        let name = self.word("a system name")?;
        if self.eat(&Tok::Eq) {
            let op = self.word("`compose`, `couple`, `glue` or `combine`")?;
            let (args, _) = self.delimited(Tok::LParen, Tok::Comma, Tok::RParen, |p| p.arg())?;
            self.expect(Tok::Semi)?;
            return Ok(SystemDef {
                name,
                body: SystemBody::Derived { op, args },
            });
        }
        self.keyword("over")?;
        let magma = self.word("a magma name")?;
        self.keyword("vars")?;
        let vars = self.set()?.items;
        let domain = if self.at_keyword("domain") {
            self.bump();
            if self.peek().tok == Tok::LBrace {
                let (cs, span) = self.configs()?;
                Some(DomainSpec::Inline(cs, span))
            } else {
                Some(DomainSpec::Team(self.word("a team name or `{`")?))
            }
        } else {
            None
        };
        self.expect(Tok::LBrace)?;
        let mut rules = Vec::new();
        while self.peek().tok != Tok::RBrace {
            let target = self.word("a variable or `}`")?;
            self.expect(Tok::Assign)?;
            let term = self.term()?;
            self.expect(Tok::Semi)?;
            rules.push(Rule { target, term });
        }
        self.expect(Tok::RBrace)?;
        Ok(SystemDef {
            name,
            body: SystemBody::Rules {
                magma,
                vars,
                domain,
                rules,
            },
        })
    }

    fn term(&mut self) -> PResult<TermExpr> {
        let mut lhs = self.atom()?;
        while self.eat(&Tok::Op) {
            let rhs = self.atom()?;
            let span = lhs.span().to(rhs.span());
            lhs = TermExpr::Op(Box::new(lhs), Box::new(rhs), span);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> PResult<TermExpr> {
        match &self.peek().tok {
            Tok::Hash => {
                let start = self.bump().span;
                let mut e = self.word("an element")?;
                e.span = start.to(e.span);
                Ok(TermExpr::Elem(e))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Word(_) => {
                let name = self.word("a variable")?;
                if self.peek().tok == Tok::LParen {
                    let (args, span) = self.delimited(Tok::LParen, Tok::Comma, Tok::RParen, |p| p.term())?;
                    let span = name.span.to(span);
                    Ok(TermExpr::Call(name, args, span))
                } else {
                    Ok(TermExpr::Var(name))
                }
            }
            _ => self.error(&["a variable", "`#`", "a function call", "`(`"]),
        }
    }

    fn team(&mut self) -> PResult<TeamDef> {
        self.keyword("team")?;
        let name = self.word("a team name")?;
        self.keyword("over")?;
        let magma = self.word("a magma name")?;
        self.keyword("vars")?;
        let vars = self.set()?.items;
        let (members, _) = self.configs()?;
        Ok(TeamDef {
            name,
            magma,
            vars,
            members,
        })
    }

    fn cover(&mut self) -> PResult<CoverDef> {
        self.keyword("cover")?;
        let name = self.word("a cover name")?;
        self.expect(Tok::Eq)?;
        let x = self.set()?;
        self.expect(Tok::Pipe)?;
        let y = self.set()?;
        self.expect(Tok::Semi)?;
        Ok(CoverDef { name, x, y })
    }

    fn classical(&mut self) -> PResult<ClassicalDef> {
        self.keyword("classical")?;
        let name = self.word("a model name")?;
        self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        while self.peek().tok != Tok::RBrace {
            let key = self.word("a field name or `}`")?;
            self.expect(Tok::Colon)?;
            let value = self.table()?;
            self.expect(Tok::Semi)?;
            fields.push((key, value));
        }
        self.expect(Tok::RBrace)?;
        Ok(ClassicalDef { name, fields })
    }

    fn query(&mut self) -> PResult<QueryDef> {
        self.keyword("query")?;
        let name = self.word("a query name")?;
        self.expect(Tok::Colon)?;
        let kind = self.word("a query kind")?;
        let (args, _) = self.delimited(Tok::LParen, Tok::Comma, Tok::RParen, |p| p.arg())?;
        self.expect(Tok::Semi)?;
        Ok(QueryDef { name, kind, args })
    }

    fn arg(&mut self) -> PResult<Arg> {
        match self.peek().tok {
            Tok::LBrace => {
                let is_map = matches!(self.peek_at(1), Tok::Word(_)) && *self.peek_at(2) == Tok::Arrow;
                if is_map {
                    let (pairs, span) = self.delimited(Tok::LBrace, Tok::Comma, Tok::RBrace, |p| {
                        let a = p.word("a variable")?;
                        p.expect(Tok::Arrow)?;
                        let b = p.word("a variable")?;
                        Ok((a, b))
                    })?;
                    Ok(Arg::Map(pairs, span))
                } else {
                    Ok(Arg::Set(self.set()?))
                }
            }
            Tok::LBracket => {
                let (items, span) = self.word_list()?;
                Ok(Arg::List(items, span))
            }
            Tok::LParen => Ok(Arg::Config(self.config()?)),
            Tok::Word(_) => Ok(Arg::Word(self.word("an argument")?)),
            _ => self.error(&["a name", "`{`", "`[`", "`(`"]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_magma() {
        let d = parse("magma Z2 { elements: [0, 1]; op: [[0, 1], [1, 0]]; }").unwrap();
        assert_eq!(d.items.len(), 1);
        let ItemKind::Magma(m) = &d.items[0].kind else { panic!() };
        assert_eq!(m.name.text, "Z2");
    }

    #[test]
    fn system_with_rules() {
        let d = parse(
            "magma Z2 = cyclic(2);
             fn max/2 over Z2 = [[0, 1], [1, 1]];
             system gamma over Z2 vars {b0, b1, b2, b3} {
                 b0 := b0; b1 := max(b0, b2); b2 := b3; b3 := b3 . #0;
             }",
        )
        .unwrap();
        let ItemKind::System(s) = &d.items[2].kind else {
            panic!()
        };
        let SystemBody::Rules { rules, .. } = &s.body else {
            panic!()
        };
        assert_eq!(rules.len(), 4);
        assert!(matches!(rules[3].term, TermExpr::Op(..)));
    }

    #[test]
    fn operator_is_left_associative() {
        let d = parse("system s over G vars {a} { a := a • a . (a • a); }").unwrap();
        let ItemKind::System(s) = &d.items[0].kind else {
            panic!()
        };
        let SystemBody::Rules { rules, .. } = &s.body else {
            panic!()
        };
        let TermExpr::Op(l, r, _) = &rules[0].term else {
            panic!()
        };
        assert!(matches!(**l, TermExpr::Op(..)));
        assert!(matches!(**r, TermExpr::Op(..)));
    }

    #[test]
    fn query_arguments() {
        let d = parse("query q: glue(s, t, {a -> b, c -> d}); query r: simulate(s, (a=1, b=0), 3); query e: emergent(g, [f, f], {}, {a});").unwrap();
        let ItemKind::Query(q) = &d.items[0].kind else { panic!() };
        assert!(matches!(&q.args[2], Arg::Map(p, _) if p.len() == 2));
        let ItemKind::Query(q) = &d.items[1].kind else { panic!() };
        assert!(matches!(&q.args[1], Arg::Config(c) if c.entries.len() == 2));
        let ItemKind::Query(q) = &d.items[2].kind else { panic!() };
        assert!(matches!(&q.args[1], Arg::List(l, _) if l.len() == 2));
        assert!(matches!(&q.args[2], Arg::Set(s) if s.items.is_empty()));
    }

    #[test]
    fn unbalanced_brace_points_at_end() {
        let src = "system s over G vars {a} {\n  a := a;\n";
        let e = parse(src).unwrap_err();
        assert_eq!(e.span.line, 3);
        assert!(e.expected.iter().any(|x| x.contains('}')) || e.expected.iter().any(|x| x.contains("variable")));
    }

    #[test]
    fn item_spans_cover_items() {
        let src = "magma Z2 = cyclic(2);\n\ncover C = {a} | {b};";
        let d = parse(src).unwrap();
        assert_eq!(&src[d.items[1].span.start..d.items[1].span.end], "cover C = {a} | {b};");
    }
}
