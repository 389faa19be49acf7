//! Name resolution and construction of every definition in a document.
//!
//! Definitions must appear before they are used. Queries are bound after
//! all definitions, so they may appear anywhere.

use std::sync::Arc;

use gsys_core::classical::ClassicalModel;
use gsys_core::coupling::{couple, couple_glued, GluingMap};
use gsys_core::{
    builtin_magma, Budget, BuiltinMagma, Config, ConfigSet, Elem, FnTable, GSystem, Magma, Term, Transition, VarSet,
};
use indexmap::IndexMap;

use crate::ast::*;
use crate::error::{ValidationError, ValidationErrorKind as K};
use crate::query::{query_kind, Runner};

/// A query after its arguments have been resolved.
pub struct BoundQuery {
    pub name: String,
    pub kind: &'static str,
    pub span: Span,
    pub(crate) runner: Runner,
}

/// Everything a document defines, constructed and checked.
#[derive(Default)]
pub struct Workspace {
    pub magmas: IndexMap<String, Arc<Magma>>,
    pub fns: IndexMap<String, (Arc<FnTable>, Arc<Magma>)>,
    pub systems: IndexMap<String, GSystem>,
    pub teams: IndexMap<String, ConfigSet>,
    pub covers: IndexMap<String, (VarSet, VarSet)>,
    pub models: IndexMap<String, ClassicalModel>,
    pub queries: IndexMap<String, BoundQuery>,
}

impl std::fmt::Debug for Workspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Workspace")
            .field("magmas", &self.magmas.keys().collect::<Vec<_>>())
            .field("systems", &self.systems.keys().collect::<Vec<_>>())
            .field("queries", &self.queries.keys().collect::<Vec<_>>())
            .finish_non_exhaustive()
    }
}

type VResult<T> = Result<T, ValidationError>;

fn unknown(what: &str, name: &Ident) -> ValidationError {
    ValidationError::new(K::UnknownName, name.span, format!("no {what} named `{}`", name.text))
}

fn lookup<'a, T>(map: &'a IndexMap<String, T>, what: &str, name: &Ident) -> VResult<&'a T> {
    map.get(&name.text).ok_or_else(|| unknown(what, name))
}

impl Workspace {
    pub fn magma(&self, name: &Ident) -> VResult<&Arc<Magma>> {
        lookup(&self.magmas, "magma", name)
    }

    pub fn system(&self, name: &Ident) -> VResult<&GSystem> {
        lookup(&self.systems, "system", name)
    }

    pub fn team(&self, name: &Ident) -> VResult<&ConfigSet> {
        lookup(&self.teams, "team", name)
    }

    pub fn cover(&self, name: &Ident) -> VResult<&(VarSet, VarSet)> {
        lookup(&self.covers, "cover", name)
    }

    pub fn model(&self, name: &Ident) -> VResult<&ClassicalModel> {
        lookup(&self.models, "classical model", name)
    }
}

pub fn validate(d: &Document) -> VResult<Workspace> {
    validate_with(d, &Budget::default())
}

/// Builds every definition (tabulating derived systems under `budget`)
/// and binds every query.
pub fn validate_with(d: &Document, budget: &Budget) -> VResult<Workspace> {
    let mut ws = Workspace::default();
    for item in &d.items {
        define(&mut ws, &item.kind, item.span, budget)?;
    }
    for item in &d.items {
        if let ItemKind::Query(q) = &item.kind {
            if ws.queries.contains_key(&q.name.text) {
                return Err(duplicate("query", &q.name));
            }
            let kind = query_kind(&q.kind.text).ok_or_else(|| unknown("query kind", &q.kind))?;
            let runner = kind.bind(&q.args, item.span, &ws)?;
            ws.queries.insert(
                q.name.text.clone(),
                BoundQuery {
                    name: q.name.text.clone(),
                    kind: kind.name(),
                    span: item.span,
                    runner,
                },
            );
        }
    }
    Ok(ws)
}

fn duplicate(what: &str, name: &Ident) -> ValidationError {
    ValidationError::new(
        K::DuplicateName,
        name.span,
        format!("{what} `{}` is defined twice", name.text),
    )
}

fn insert_unique<T>(map: &mut IndexMap<String, T>, what: &str, name: &Ident, value: T) -> VResult<()> {
    if map.contains_key(&name.text) {
        return Err(duplicate(what, name));
    }
    map.insert(name.text.clone(), value);
    Ok(())
}

fn define(ws: &mut Workspace, item: &ItemKind, span: Span, budget: &Budget) -> VResult<()> {
    match item {
        ItemKind::Magma(m) => {
            let magma = build_magma(ws, m, span)?;
            insert_unique(&mut ws.magmas, "magma", &m.name, Arc::new(magma))
        }
        ItemKind::Fn(f) => {
            let magma = ws.magma(&f.magma)?.clone();
            let arity = parse_count(&f.arity)?;
            let leaves = flatten(&f.table, arity, magma.size())?;
            let table = leaves.iter().map(|e| element(&magma, e)).collect::<VResult<Vec<_>>>()?;
            let t = FnTable::new(f.name.text.clone(), arity, &magma, table)
                .map_err(|e| ValidationError::from_core(e, span))?;
            insert_unique(&mut ws.fns, "fn", &f.name, (Arc::new(t), magma))
        }
        ItemKind::System(s) => {
            let sys = build_system(ws, s, span, budget)?;
            insert_unique(&mut ws.systems, "system", &s.name, sys)
        }
        ItemKind::Team(t) => {
            let magma = ws.magma(&t.magma)?.clone();
            let vars = varset(&t.vars, span)?;
            let members = t
                .members
                .iter()
                .map(|c| config(c, &vars, &magma))
                .collect::<VResult<Vec<_>>>()?;
            let set = ConfigSet::new(vars, members).map_err(|e| ValidationError::from_core(e, span))?;
            insert_unique(&mut ws.teams, "team", &t.name, set)
        }
        ItemKind::Cover(c) => {
            let x = varset(&c.x.items, c.x.span)?;
            let y = varset(&c.y.items, c.y.span)?;
            insert_unique(&mut ws.covers, "cover", &c.name, (x, y))
        }
        ItemKind::Classical(c) => {
            let model = build_model(c, span)?;
            insert_unique(&mut ws.models, "classical model", &c.name, model)
        }
        ItemKind::Query(_) => Ok(()),
    }
}

pub(crate) fn parse_count(w: &Ident) -> VResult<usize> {
    w.text.parse().map_err(|_| {
        ValidationError::new(
            K::TypeMismatch,
            w.span,
            format!("expected a number, found `{}`", w.text),
        )
    })
}

pub(crate) fn element(m: &Magma, e: &Ident) -> VResult<Elem> {
    m.index_of(&e.text).ok_or_else(|| {
        ValidationError::new(
            K::UnknownName,
            e.span,
            format!("`{}` is not an element of the magma", e.text),
        )
    })
}

pub(crate) fn varset(names: &[Ident], span: Span) -> VResult<VarSet> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].iter().any(|m| m.text == n.text) {
            return Err(ValidationError::new(
                K::DuplicateName,
                n.span,
                format!("variable `{}` is listed twice", n.text),
            ));
        }
    }
    VarSet::new(names.iter().map(|n| n.text.clone())).map_err(|e| ValidationError::from_core(e, span))
}

/// Resolves `(a=0, b=1)` against `vars`, which it must cover exactly.
pub(crate) fn config(c: &ConfigLit, vars: &VarSet, m: &Magma) -> VResult<Config> {
    let mut values: Vec<Option<Elem>> = vec![None; vars.len()];
    for (v, e) in &c.entries {
        let i = vars.index_of(&v.text).ok_or_else(|| {
            ValidationError::new(K::UnboundVariable, v.span, format!("`{}` is not among {vars}", v.text))
        })?;
        if values[i].is_some() {
            return Err(ValidationError::new(
                K::DuplicateName,
                v.span,
                format!("`{}` is assigned twice", v.text),
            ));
        }
        values[i] = Some(element(m, e)?);
    }
    let values = values
        .into_iter()
        .zip(vars.iter())
        .map(|(v, n)| {
            v.ok_or_else(|| {
                ValidationError::new(
                    K::VarSetMismatch,
                    c.span,
                    format!("configuration leaves `{n}` unassigned"),
                )
            })
        })
        .collect::<VResult<Vec<_>>>()?;
    Ok(Config::new(vars.clone(), values).expect("one value per variable"))
}

/// Leaves of a table nested `depth` levels deep with `width` entries per
/// level, in lexicographic order.
fn flatten(t: &Table, depth: usize, width: usize) -> VResult<Vec<&Ident>> {
    let mut out = Vec::new();
    fn go<'a>(t: &'a Table, depth: usize, width: usize, out: &mut Vec<&'a Ident>) -> VResult<()> {
        match (t, depth) {
            (Table::Leaf(i), 0) => {
                out.push(i);
                Ok(())
            }
            (Table::Rows(rows, span), d) if d > 0 => {
                if rows.len() != width {
                    return Err(ValidationError::new(
                        K::ArityMismatch,
                        *span,
                        format!("expected {width} entries, found {}", rows.len()),
                    ));
                }
                rows.iter().try_for_each(|r| go(r, d - 1, width, out))
            }
            (t, _) => Err(ValidationError::new(
                K::ArityMismatch,
                t.span(),
                if depth == 0 {
                    "expected an element, found a list"
                } else {
                    "expected a list, found an element"
                },
            )),
        }
    }
    go(t, depth, width, &mut out)?;
    Ok(out)
}

fn list_words(t: &Table) -> VResult<Vec<&Ident>> {
    match t {
        Table::Rows(rows, _) => rows
            .iter()
            .map(|r| match r {
                Table::Leaf(i) => Ok(i),
                other => Err(ValidationError::new(K::TypeMismatch, other.span(), "expected a name")),
            })
            .collect(),
        Table::Leaf(i) => Err(ValidationError::new(K::TypeMismatch, i.span, "expected a list")),
    }
}

fn build_magma(ws: &Workspace, m: &MagmaDef, span: Span) -> VResult<Magma> {
    let core = |e| ValidationError::from_core(e, span);
    match &m.body {
        MagmaBody::Table { elements, op } => {
            let names: Vec<String> = elements.iter().map(|e| e.text.clone()).collect();
            let leaves = flatten(op, 2, names.len())?;
            let idx = |e: &Ident| {
                names.iter().position(|n| *n == e.text).ok_or_else(|| {
                    ValidationError::new(K::UnknownName, e.span, format!("`{}` is not a listed element", e.text))
                })
            };
            let flat = leaves.into_iter().map(idx).collect::<VResult<Vec<_>>>()?;
            let rows = flat.chunks(names.len().max(1)).map(<[usize]>::to_vec).collect();
            Magma::new(names, rows).map_err(core)
        }
        MagmaBody::Builtin { ctor, args } => {
            let expect = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(ValidationError::new(
                        K::ArityMismatch,
                        ctor.span,
                        format!("`{}` takes {n} argument(s), found {}", ctor.text, args.len()),
                    ))
                }
            };
            let kind = match ctor.text.as_str() {
                "cyclic" | "chain_meet" | "chain_join" => {
                    expect(1)?;
                    let n = parse_count(&args[0])?;
                    match ctor.text.as_str() {
                        "cyclic" => BuiltinMagma::Cyclic(n),
                        "chain_meet" => BuiltinMagma::ChainMeet(n),
                        _ => BuiltinMagma::ChainJoin(n),
                    }
                }
                "product" => {
                    expect(2)?;
                    let (a, b) = (ws.magma(&args[0])?, ws.magma(&args[1])?);
                    return Magma::product(a, b).map_err(core);
                }
                _ => return Err(unknown("magma constructor", ctor)),
            };
            builtin_magma(&kind).map_err(core)
        }
    }
}

fn build_term(ws: &Workspace, t: &TermExpr, vars: &VarSet, magma: &Arc<Magma>) -> VResult<Term> {
    Ok(match t {
        TermExpr::Var(v) => Term::Var(vars.index_of(&v.text).ok_or_else(|| {
            ValidationError::new(
                K::UnboundVariable,
                v.span,
                format!("`{}` is not a variable of this system", v.text),
            )
        })?),
        TermExpr::Elem(e) => Term::Const(element(magma, e)?),
        TermExpr::Op(l, r, _) => Term::op(build_term(ws, l, vars, magma)?, build_term(ws, r, vars, magma)?),
        TermExpr::Call(f, args, span) => {
            let (table, fm) = lookup(&ws.fns, "fn", f)?;
            if fm != magma {
                return Err(ValidationError::new(
                    K::MagmaMismatch,
                    f.span,
                    format!("`{}` is defined over a different magma", f.text),
                ));
            }
            if table.arity() != args.len() {
                return Err(ValidationError::new(
                    K::ArityMismatch,
                    *span,
                    format!("`{}` takes {} argument(s), found {}", f.text, table.arity(), args.len()),
                ));
            }
            let args = args
                .iter()
                .map(|a| build_term(ws, a, vars, magma))
                .collect::<VResult<Vec<_>>>()?;
            Term::Call(table.clone(), args)
        }
    })
}

fn build_system(ws: &Workspace, s: &SystemDef, span: Span, budget: &Budget) -> VResult<GSystem> {
    let core = |e| ValidationError::from_core(e, span);
    match &s.body {
        SystemBody::Rules {
            magma,
            vars,
            domain,
            rules,
        } => {
            let m = ws.magma(magma)?.clone();
            let vs = varset(vars, span)?;
            let mut terms: Vec<Option<Term>> = vec![None; vs.len()];
            for r in rules {
                let i = vs.index_of(&r.target.text).ok_or_else(|| {
                    ValidationError::new(
                        K::UnboundVariable,
                        r.target.span,
                        format!("`{}` is not a variable of this system", r.target.text),
                    )
                })?;
                if terms[i].is_some() {
                    return Err(ValidationError::new(
                        K::DuplicateName,
                        r.target.span,
                        format!("`{}` has two rules", r.target.text),
                    ));
                }
                terms[i] = Some(build_term(ws, &r.term, &vs, &m)?);
            }
            let terms = terms
                .into_iter()
                .zip(vs.iter())
                .map(|(t, n)| {
                    t.ok_or_else(|| ValidationError::new(K::VarSetMismatch, span, format!("no rule for `{n}`")))
                })
                .collect::<VResult<Vec<_>>>()?;
            let domain = match domain {
                None => None,
                Some(DomainSpec::Team(t)) => {
                    let team = ws.team(t)?;
                    if !team.vars().same_members(&vs) {
                        return Err(ValidationError::new(
                            K::VarSetMismatch,
                            t.span,
                            format!("team `{}` is over {}, the system over {vs}", t.text, team.vars()),
                        ));
                    }
                    Some(team.clone())
                }
                Some(DomainSpec::Inline(cs, _)) => {
                    let members = cs.iter().map(|c| config(c, &vs, &m)).collect::<VResult<Vec<_>>>()?;
                    Some(ConfigSet::new(vs.clone(), members).map_err(core)?)
                }
            };
            GSystem::new(m, vs, Transition::Rules(terms), domain).map_err(core)
        }
        SystemBody::Derived { op, args } => {
            let system_arg = |a: &Arg| match a {
                Arg::Word(w) => ws.system(w),
                other => Err(ValidationError::new(
                    K::TypeMismatch,
                    other.span(),
                    format!("expected a system name, found {}", other.describe()),
                )),
            };
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(ValidationError::new(
                        K::ArityMismatch,
                        op.span,
                        format!("`{}` takes {n} arguments, found {}", op.text, args.len()),
                    ))
                }
            };
            match op.text.as_str() {
                "compose" => {
                    if args.is_empty() {
                        return Err(ValidationError::new(
                            K::ArityMismatch,
                            op.span,
                            "`compose` needs at least one system",
                        ));
                    }
                    let systems = args.iter().map(system_arg).collect::<VResult<Vec<_>>>()?;
                    let mut acc = (*systems.last().unwrap()).clone();
                    for f in systems[..systems.len() - 1].iter().rev() {
                        acc = GSystem::compose(f, &acc, budget).map_err(core)?;
                    }
                    Ok(acc)
                }
                "couple" => {
                    arity(2)?;
                    couple(system_arg(&args[0])?, system_arg(&args[1])?, budget).map_err(core)
                }
                "combine" => {
                    arity(2)?;
                    GSystem::pointwise_combine(system_arg(&args[0])?, system_arg(&args[1])?, budget).map_err(core)
                }
                "glue" => {
                    arity(3)?;
                    let map = gluing_arg(&args[2])?;
                    Ok(couple_glued(system_arg(&args[0])?, system_arg(&args[1])?, &map, budget)
                        .map_err(core)?
                        .system)
                }
                _ => Err(unknown("system combinator", op)),
            }
        }
    }
}

pub(crate) fn gluing_arg(a: &Arg) -> VResult<GluingMap> {
    match a {
        Arg::Map(pairs, _) => Ok(GluingMap::new(
            pairs.iter().map(|(x, y)| (x.text.clone(), y.text.clone())),
        )),
        Arg::Set(s) if s.items.is_empty() => Ok(GluingMap::default()),
        other => Err(ValidationError::new(
            K::TypeMismatch,
            other.span(),
            format!("expected a gluing map `{{a -> b}}`, found {}", other.describe()),
        )),
    }
}

const MODEL_FIELDS: [&str; 8] = ["states", "motors", "sensors", "internal", "f", "h", "phi", "pi"];

fn build_model(c: &ClassicalDef, span: Span) -> VResult<ClassicalModel> {
    let mut fields: IndexMap<&str, &Table> = IndexMap::new();
    for (k, v) in &c.fields {
        if !MODEL_FIELDS.contains(&k.text.as_str()) {
            return Err(unknown("classical model field", k));
        }
        if fields.insert(k.text.as_str(), v).is_some() {
            return Err(duplicate("field", k));
        }
    }
    let field = |k: &str| {
        fields.get(k).copied().ok_or_else(|| {
            ValidationError::new(
                K::InvalidDefinition,
                c.name.span,
                format!("classical model lacks `{k}`"),
            )
        })
    };
    let names =
        |k: &str| -> VResult<Vec<String>> { Ok(list_words(field(k)?)?.into_iter().map(|i| i.text.clone()).collect()) };
    let (states, motors, sensors, internal) = (
        names("states")?,
        names("motors")?,
        names("sensors")?,
        names("internal")?,
    );
    let index = |set: &[String], w: &Ident| {
        set.iter().position(|s| *s == w.text).ok_or_else(|| {
            ValidationError::new(K::UnknownName, w.span, format!("`{}` is not in the target set", w.text))
        })
    };
    let map1 = |k: &str, domain: usize, target: &[String]| -> VResult<Vec<usize>> {
        flatten(field(k)?, 1, domain)?
            .into_iter()
            .map(|w| index(target, w))
            .collect()
    };
    let map2 = |k: &str, rows: usize, cols: usize, target: &[String]| -> VResult<Vec<Vec<usize>>> {
        let flat = ragged(field(k)?, rows, cols)?
            .into_iter()
            .map(|w| index(target, w))
            .collect::<VResult<Vec<_>>>()?;
        Ok(flat.chunks(cols.max(1)).map(<[usize]>::to_vec).collect())
    };
    let model = ClassicalModel {
        f: map2("f", states.len(), motors.len(), &states)?,
        h: map1("h", states.len(), &sensors)?,
        phi: map2("phi", internal.len(), sensors.len(), &internal)?,
        pi: map1("pi", internal.len(), &motors)?,
        states,
        motors,
        sensors,
        internal,
    };
    model.validate().map_err(|e| ValidationError::from_core(e, span))?;
    Ok(model)
}

/// Leaves of a `rows × cols` table, row by row.
fn ragged(t: &Table, rows: usize, cols: usize) -> VResult<Vec<&Ident>> {
    let Table::Rows(rs, span) = t else {
        return Err(ValidationError::new(
            K::ArityMismatch,
            t.span(),
            "expected a list of rows",
        ));
    };
    if rs.len() != rows {
        return Err(ValidationError::new(
            K::ArityMismatch,
            *span,
            format!("expected {rows} rows, found {}", rs.len()),
        ));
    }
    let mut out = Vec::new();
    for r in rs {
        out.extend(flatten(r, 1, cols)?);
    }
    Ok(out)
}
