//! Syntax tree for `.gsys` documents.
//!
//! Spans never take part in equality, so a document and its reformatted
//! reparse compare equal.

use std::fmt;

/// Byte range plus the 1-based line and column of its start.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            end: other.end.max(self.end),
            ..self
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub text: String,
    pub span: Span,
}

impl Ident {
    pub fn as_str(&self) -> &str {
        &self.text
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub kind: ItemKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItemKind {
    Magma(MagmaDef),
    Fn(FnDef),
    System(SystemDef),
    Team(TeamDef),
    Cover(CoverDef),
    Classical(ClassicalDef),
    Query(QueryDef),
}

impl ItemKind {
    pub fn name(&self) -> &Ident {
        match self {
            ItemKind::Magma(d) => &d.name,
            ItemKind::Fn(d) => &d.name,
            ItemKind::System(d) => &d.name,
            ItemKind::Team(d) => &d.name,
            ItemKind::Cover(d) => &d.name,
            ItemKind::Classical(d) => &d.name,
            ItemKind::Query(d) => &d.name,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            ItemKind::Magma(_) => "magma",
            ItemKind::Fn(_) => "fn",
            ItemKind::System(_) => "system",
            ItemKind::Team(_) => "team",
            ItemKind::Cover(_) => "cover",
            ItemKind::Classical(_) => "classical",
            ItemKind::Query(_) => "query",
        }
    }
}

/// A nested list of words: operation tables, function tables, and the maps
/// of a classical model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Table {
    Leaf(Ident),
    Rows(Vec<Table>, Span),
}

impl Table {
    pub fn span(&self) -> Span {
        match self {
            Table::Leaf(i) => i.span,
            Table::Rows(_, s) => *s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagmaDef {
    pub name: Ident,
    pub body: MagmaBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MagmaBody {
    Table {
        elements: Vec<Ident>,
        op: Table,
    },
    /// `cyclic(n)`, `chain_meet(n)`, `chain_join(n)`, `product(A, B)`.
    Builtin {
        ctor: Ident,
        args: Vec<Ident>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnDef {
    pub name: Ident,
    pub arity: Ident,
    pub magma: Ident,
    pub table: Table,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemDef {
    pub name: Ident,
    pub body: SystemBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemBody {
    Rules {
        magma: Ident,
        vars: Vec<Ident>,
        domain: Option<DomainSpec>,
        rules: Vec<Rule>,
    },
    /// `compose(..)`, `couple(..)`, `glue(..)`, `combine(..)`.
    Derived { op: Ident, args: Vec<Arg> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainSpec {
    Team(Ident),
    Inline(Vec<ConfigLit>, Span),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub target: Ident,
    pub term: TermExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermExpr {
    Var(Ident),
    /// `#elem`
    Elem(Ident),
    Op(Box<TermExpr>, Box<TermExpr>, Span),
    Call(Ident, Vec<TermExpr>, Span),
}

impl TermExpr {
    pub fn span(&self) -> Span {
        match self {
            TermExpr::Var(i) | TermExpr::Elem(i) => i.span,
            TermExpr::Op(_, _, s) | TermExpr::Call(_, _, s) => *s,
        }
    }
}

/// `(a=0, b=1)`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigLit {
    pub entries: Vec<(Ident, Ident)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetLit {
    pub items: Vec<Ident>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeamDef {
    pub name: Ident,
    pub magma: Ident,
    pub vars: Vec<Ident>,
    pub members: Vec<ConfigLit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverDef {
    pub name: Ident,
    pub x: SetLit,
    pub y: SetLit,
}

/// Fields in source order; the validator requires each of `states`,
/// `motors`, `sensors`, `internal`, `f`, `h`, `phi`, `pi` exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalDef {
    pub name: Ident,
    pub fields: Vec<(Ident, Table)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryDef {
    pub name: Ident,
    pub kind: Ident,
    pub args: Vec<Arg>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arg {
    Word(Ident),
    Set(SetLit),
    /// `{a -> b, ...}`
    Map(Vec<(Ident, Ident)>, Span),
    /// `[a, b]`
    List(Vec<Ident>, Span),
    Config(ConfigLit),
}

impl Arg {
    pub fn span(&self) -> Span {
        match self {
            Arg::Word(i) => i.span,
            Arg::Set(s) => s.span,
            Arg::Map(_, s) | Arg::List(_, s) => *s,
            Arg::Config(c) => c.span,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Arg::Word(_) => "a name",
            Arg::Set(_) => "a variable set",
            Arg::Map(_, _) => "a gluing map",
            Arg::List(_, _) => "a list",
            Arg::Config(_) => "a configuration",
        }
    }
}
