//! Canonical formatting. Comments are not preserved.

use std::fmt::Write;

use crate::ast::*;

pub fn pretty_print(d: &Document) -> String {
    let mut out = String::new();
    for (i, item) in d.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        item_to(&mut out, &item.kind);
    }
    out
}

fn join<T>(items: &[T], sep: &str, f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(sep)
}

fn words(items: &[Ident]) -> String {
    join(items, ", ", |i| i.text.clone())
}

fn table(t: &Table) -> String {
    match t {
        Table::Leaf(i) => i.text.clone(),
        Table::Rows(rows, _) => format!("[{}]", join(rows, ", ", table)),
    }
}

fn config(c: &ConfigLit) -> String {
    format!(
        "({})",
        join(&c.entries, ", ", |(v, e)| format!("{}={}", v.text, e.text))
    )
}

fn set(items: &[Ident]) -> String {
    format!("{{{}}}", words(items))
}

pub fn term(t: &TermExpr) -> String {
    match t {
        TermExpr::Var(v) => v.text.clone(),
        TermExpr::Elem(e) => format!("#{}", e.text),
        TermExpr::Call(f, args, _) => format!("{}({})", f.text, join(args, ", ", term)),
        TermExpr::Op(l, r, _) => {
            let rhs = match **r {
                TermExpr::Op(..) => format!("({})", term(r)),
                _ => term(r),
            };
            format!("{} • {}", term(l), rhs)
        }
    }
}

fn arg(a: &Arg) -> String {
    match a {
        Arg::Word(w) => w.text.clone(),
        Arg::Set(s) => set(&s.items),
        Arg::Map(pairs, _) => format!(
            "{{{}}}",
            join(pairs, ", ", |(a, b)| format!("{} -> {}", a.text, b.text))
        ),
        Arg::List(items, _) => format!("[{}]", words(items)),
        Arg::Config(c) => config(c),
    }
}

fn config_block(out: &mut String, members: &[ConfigLit]) {
    out.push_str("{\n");
    for c in members {
        let _ = writeln!(out, "    {};", config(c));
    }
    out.push('}');
}

fn item_to(out: &mut String, item: &ItemKind) {
    match item {
        ItemKind::Magma(m) => match &m.body {
            MagmaBody::Table { elements, op } => {
                let _ = writeln!(out, "magma {} {{", m.name.text);
                let _ = writeln!(out, "    elements: [{}];", words(elements));
                let _ = writeln!(out, "    op: {};", table(op));
                out.push_str("}\n");
            }
            MagmaBody::Builtin { ctor, args } => {
                let _ = writeln!(out, "magma {} = {}({});", m.name.text, ctor.text, words(args));
            }
        },
        ItemKind::Fn(f) => {
            let _ = writeln!(
                out,
                "fn {}/{} over {} = {};",
                f.name.text,
                f.arity.text,
                f.magma.text,
                table(&f.table)
            );
        }
        ItemKind::System(s) => match &s.body {
            SystemBody::Rules {
                magma,
                vars,
                domain,
                rules,
            } => {
                let _ = write!(out, "system {} over {} vars {}", s.name.text, magma.text, set(vars));
                match domain {
                    None => {}
                    Some(DomainSpec::Team(t)) => {
                        let _ = write!(out, " domain {}", t.text);
                    }
                    Some(DomainSpec::Inline(cs, _)) => {
                        out.push_str(" domain ");
                        config_block(out, cs);
                    }
                }
                out.push_str(" {\n");
                for r in rules {
                    let _ = writeln!(out, "    {} := {};", r.target.text, term(&r.term));
                }
                out.push_str("}\n");
            }
            SystemBody::Derived { op, args } => {
                let _ = writeln!(out, "system {} = {}({});", s.name.text, op.text, join(args, ", ", arg));
            }
        },
        ItemKind::Team(t) => {
            let _ = write!(out, "team {} over {} vars {} ", t.name.text, t.magma.text, set(&t.vars));
            config_block(out, &t.members);
            out.push('\n');
        }
        ItemKind::Cover(c) => {
            let _ = writeln!(
                out,
                "cover {} = {} | {};",
                c.name.text,
                set(&c.x.items),
                set(&c.y.items)
            );
        }
        ItemKind::Classical(c) => {
            let _ = writeln!(out, "classical {} {{", c.name.text);
            for (k, v) in &c.fields {
                let _ = writeln!(out, "    {}: {};", k.text, table(v));
            }
            out.push_str("}\n");
        }
        ItemKind::Query(q) => {
            let _ = writeln!(
                out,
                "query {}: {}({});",
                q.name.text,
                q.kind.text,
                join(&q.args, ", ", arg)
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    const SAMPLE: &str = "
        magma Z2 = cyclic(2);
        magma M { elements: [a, b]; op: [[a, b], [b, b]]; }
        fn max/2 over Z2 = [[0, 1], [1, 1]];
        team T over Z2 vars {x, y} { (x=0, y=1); (x=1, y=0) }
        system s over Z2 vars {x, y} domain T { x := y; y := x . (x . #1); }
        system r over Z2 vars {x, y} domain { (x=0, y=0); } { x := #0; y := #0; }
        system c = couple(s, r);
        cover C = {x} | {x, y};
        classical K { states: [p, q]; f: [[q], [p]]; }
        query q1: glue(s, r, {x -> y});
        query q2: simulate(s, (x=0, y=1), 4);
    ";

    #[test]
    fn round_trip_is_a_fixpoint() {
        let d = parse(SAMPLE).unwrap();
        let printed = pretty_print(&d);
        let reparsed = parse(&printed).unwrap();
        assert_eq!(reparsed, d);
        assert_eq!(pretty_print(&reparsed), printed);
    }

    #[test]
    fn right_nested_operations_keep_parentheses() {
        let d = parse("system s over G vars {a} { a := a . (a . a); }").unwrap();
        assert!(pretty_print(&d).contains("a := a • (a • a);"));
    }
}
