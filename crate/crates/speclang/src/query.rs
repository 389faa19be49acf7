//! Query kinds, argument binding, and execution.
//!
//! Each kind is a [`QueryKind`] in a static registry. Binding resolves and
//! type-checks the arguments during validation; the returned [`Runner`]
//! does the work when the query is run.

use std::time::Instant;

use gsys_core::atoms::{
    cause_holds, dep_holds_with, dependence_checker, DependenceChecker, DEFAULT_DEPENDENCE_CHECKER,
};
use gsys_core::budget::{DEFAULT_FACTOR_SEARCH_CAP, DEFAULT_MAX_ENUM};
use gsys_core::classical::{all_initial_states, embed};
use gsys_core::coupling::{check_closure_condition1, couple, couple_glued, is_closed};
use gsys_core::reduce::{
    decide_reducible, theorem_condition2, theorem_condition3, verify_decomposition, verify_emergence, Cover,
    EmergenceFailure, Reducibility,
};
use gsys_core::{systems_equal, Budget, ConfigSet, GSystem, VarSet};
use serde_json::{json, Map, Value};

use crate::ast::{Arg, Ident, Span};
use crate::error::{QueryError, ValidationError, ValidationErrorKind as K};
use crate::validate::{config, gluing_arg, parse_count, Workspace};

/// What a query produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub holds: Option<bool>,
    pub value: Option<Value>,
    pub witness: Option<Value>,
}

pub struct RunContext<'a> {
    pub budget: &'a Budget,
    pub dep_checker: &'static dyn DependenceChecker,
}

pub type Runner = Box<dyn Fn(&RunContext<'_>) -> gsys_core::Result<Outcome> + Send + Sync>;

pub trait QueryKind: Send + Sync {
    fn name(&self) -> &'static str;

    /// Argument shape, for error messages and `--help`.
    fn usage(&self) -> &'static str;

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError>;
}

#[derive(Clone, Copy)]
pub struct RunOptions {
    pub max_enum: u64,
    pub factor_search_cap: u64,
    pub dep_checker: &'static dyn DependenceChecker,
}

impl std::fmt::Debug for RunOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RunOptions")
            .field("max_enum", &self.max_enum)
            .field("factor_search_cap", &self.factor_search_cap)
            .field("dep_checker", &self.dep_checker.name())
            .finish()
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_enum: DEFAULT_MAX_ENUM,
            factor_search_cap: DEFAULT_FACTOR_SEARCH_CAP,
            dep_checker: dependence_checker(DEFAULT_DEPENDENCE_CHECKER).expect("default checker is registered"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub query: String,
    pub kind: String,
    pub outcome: Outcome,
    pub configs_enumerated: u64,
    pub millis: u128,
}

impl QueryResult {
    pub fn holds(&self) -> Option<bool> {
        self.outcome.holds
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("query".into(), json!(self.query));
        obj.insert("kind".into(), json!(self.kind));
        if let Some(h) = self.outcome.holds {
            obj.insert("holds".into(), json!(h));
        }
        if let Some(v) = &self.outcome.value {
            obj.insert("value".into(), v.clone());
        }
        if let Some(w) = &self.outcome.witness {
            obj.insert("witness".into(), w.clone());
        }
        obj.insert(
            "stats".into(),
            json!({ "configs_enumerated": self.configs_enumerated, "millis": self.millis }),
        );
        Value::Object(obj)
    }
}

/// Runs one query with a fresh budget.
pub fn run_query(ws: &Workspace, name: &str, opts: &RunOptions) -> Result<QueryResult, QueryError> {
    let q = ws
        .queries
        .get(name)
        .ok_or_else(|| QueryError::UnknownQuery(name.to_string()))?;
    let budget = Budget::new(opts.max_enum).with_factor_search_cap(opts.factor_search_cap);
    let ctx = RunContext {
        budget: &budget,
        dep_checker: opts.dep_checker,
    };
    let start = Instant::now();
    let outcome = (q.runner)(&ctx).map_err(|source| QueryError::Failed {
        query: name.to_string(),
        source,
    })?;
    Ok(QueryResult {
        query: q.name.clone(),
        kind: q.kind.to_string(),
        outcome,
        configs_enumerated: budget.enumerated(),
        millis: start.elapsed().as_millis(),
    })
}

/// Runs every query in declaration order.
pub fn run_all(ws: &Workspace, opts: &RunOptions) -> Vec<Result<QueryResult, QueryError>> {
    ws.queries.keys().map(|n| run_query(ws, n, opts)).collect()
}

static KINDS: [&dyn QueryKind; 13] = [
    &Dep,
    &Cause,
    &Reducible,
    &Emergent,
    &Condition2,
    &Condition3,
    &CoupleQ,
    &Glue,
    &Simulate,
    &EmbedEquiv,
    &Closed,
    &Equal,
    &Condition1,
];

pub fn query_kinds() -> &'static [&'static dyn QueryKind] {
    &KINDS
}

pub fn query_kind(name: &str) -> Option<&'static dyn QueryKind> {
    KINDS.iter().copied().find(|k| k.name() == name)
}

/// Positional access to query arguments with typed errors.
struct Args<'a> {
    args: &'a [Arg],
    span: Span,
    kind: &'a dyn QueryKind,
}

impl<'a> Args<'a> {
    fn new(
        kind: &'a dyn QueryKind,
        args: &'a [Arg],
        span: Span,
        min: usize,
        max: usize,
    ) -> Result<Self, ValidationError> {
        if args.len() < min || args.len() > max {
            return Err(ValidationError::new(
                K::ArityMismatch,
                span,
                format!("expected {}, found {} argument(s)", kind.usage(), args.len()),
            ));
        }
        Ok(Args { args, span, kind })
    }

    fn mismatch(&self, i: usize, want: &str) -> ValidationError {
        let a = &self.args[i];
        ValidationError::new(
            K::TypeMismatch,
            a.span(),
            format!(
                "{}: argument {} should be {want}, found {}",
                self.kind.usage(),
                i + 1,
                a.describe()
            ),
        )
    }

    fn word(&self, i: usize, want: &str) -> Result<&'a Ident, ValidationError> {
        match &self.args[i] {
            Arg::Word(w) => Ok(w),
            _ => Err(self.mismatch(i, want)),
        }
    }

    fn system(&self, ws: &Workspace, i: usize) -> Result<GSystem, ValidationError> {
        ws.system(self.word(i, "a system name")?).cloned()
    }

    fn count(&self, i: usize) -> Result<usize, ValidationError> {
        parse_count(self.word(i, "a number")?)
    }

    fn vars(&self, i: usize, within: &VarSet) -> Result<VarSet, ValidationError> {
        let Arg::Set(s) = &self.args[i] else {
            return Err(self.mismatch(i, "a variable set"));
        };
        for v in &s.items {
            if !within.contains(&v.text) {
                return Err(ValidationError::new(
                    K::VarSetMismatch,
                    v.span,
                    format!("`{}` is not among {within}", v.text),
                ));
            }
        }
        crate::validate::varset(&s.items, s.span)
    }

    fn team(&self, ws: &Workspace, i: usize, s: &GSystem) -> Result<Option<ConfigSet>, ValidationError> {
        if i >= self.args.len() {
            return Ok(None);
        }
        let name = self.word(i, "a team name")?;
        let team = ws.team(name)?;
        if !team.vars().same_members(s.vars()) {
            return Err(ValidationError::new(
                K::VarSetMismatch,
                name.span,
                format!(
                    "team `{}` is over {}, the system over {}",
                    name.text,
                    team.vars(),
                    s.vars()
                ),
            ));
        }
        Ok(Some(team.clone()))
    }

    /// A cover named at `i`, or given as two sets at `i` and `i + 1`.
    fn cover(&self, ws: &Workspace, i: usize, s: &GSystem) -> Result<Cover, ValidationError> {
        let (x, y, span) = match (&self.args.get(i), &self.args.get(i + 1)) {
            (Some(Arg::Word(w)), None) => {
                let (x, y) = ws.cover(w)?;
                (x.clone(), y.clone(), w.span)
            }
            (Some(Arg::Set(_)), Some(Arg::Set(_))) => (
                self.vars(i, s.vars())?,
                self.vars(i + 1, s.vars())?,
                self.args[i].span().to(self.args[i + 1].span()),
            ),
            _ => {
                return Err(ValidationError::new(
                    K::TypeMismatch,
                    self.span,
                    format!("expected {}", self.kind.usage()),
                ))
            }
        };
        Cover::new(x, y, s.vars()).map_err(|e| ValidationError::from_core(e, span))
    }
}

fn verdict_outcome(holds: bool, witness: Option<Value>) -> Outcome {
    Outcome {
        holds: Some(holds),
        value: None,
        witness,
    }
}

struct Dep;
struct Cause;
struct Reducible;
struct Emergent;
struct Condition1;
struct Condition2;
struct Condition3;
struct CoupleQ;
struct Glue;
struct Simulate;
struct EmbedEquiv;
struct Closed;
struct Equal;

impl QueryKind for Dep {
    fn name(&self) -> &'static str {
        "dep"
    }

    fn usage(&self) -> &'static str {
        "dep(SYSTEM, {A}, {B} [, TEAM])"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 3, 4)?;
        let s = a.system(ws, 0)?;
        let (va, vb) = (a.vars(1, s.vars())?, a.vars(2, s.vars())?);
        let team = a.team(ws, 3, &s)?;
        Ok(Box::new(move |ctx| {
            let r = dep_holds_with(ctx.dep_checker, &s, &va, &vb, team.as_ref(), ctx.budget)?;
            let j = r.to_json(s.magma());
            Ok(verdict_outcome(
                r.holds,
                r.witness.is_some().then(|| j["witness"].clone()),
            ))
        }))
    }
}

impl QueryKind for Cause {
    fn name(&self) -> &'static str {
        "cause"
    }

    fn usage(&self) -> &'static str {
        "cause(SYSTEM, {A}, {B} [, TEAM])"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 3, 4)?;
        let s = a.system(ws, 0)?;
        let (va, vb) = (a.vars(1, s.vars())?, a.vars(2, s.vars())?);
        let team = a.team(ws, 3, &s)?;
        Ok(Box::new(move |ctx| {
            let r = cause_holds(&s, &va, &vb, team.as_ref(), ctx.budget)?;
            let j = r.to_json(s.magma());
            Ok(verdict_outcome(
                r.holds,
                r.witness.is_some().then(|| j["witness"].clone()),
            ))
        }))
    }
}

impl QueryKind for Reducible {
    fn name(&self) -> &'static str {
        "reducible"
    }

    fn usage(&self) -> &'static str {
        "reducible(SYSTEM, COVER | {X}, {Y})"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 2, 3)?;
        let s = a.system(ws, 0)?;
        let cover = a.cover(ws, 1, &s)?;
        Ok(Box::new(move |ctx| {
            let b = ctx.budget;
            Ok(match decide_reducible(&s, &cover, b)? {
                Reducibility::Reducible(d) => {
                    let verified = verify_decomposition(&s, &d, b)?.holds;
                    Outcome {
                        holds: Some(true),
                        value: Some(json!({
                            "alpha": d.sx.to_json(b)?,
                            "beta": d.sy.to_json(b)?,
                            "verified": verified,
                        })),
                        witness: None,
                    }
                }
                Reducibility::Irreducible(cert) => {
                    let mut w = cert.to_json(s.magma());
                    w["rechecked"] = json!(cert.recheck(&s, &cover, b)?);
                    verdict_outcome(false, Some(w))
                }
            })
        }))
    }
}

impl QueryKind for Emergent {
    fn name(&self) -> &'static str {
        "emergent"
    }

    fn usage(&self) -> &'static str {
        "emergent(SYSTEM, [FACTORS], COVER | {X}, {Y})"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 3, 4)?;
        let s = a.system(ws, 0)?;
        let Arg::List(names, _) = &args[1] else {
            return Err(a.mismatch(1, "a list of systems"));
        };
        let factors = names
            .iter()
            .map(|n| ws.system(n).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        let cover = a.cover(ws, 2, &s)?;
        Ok(Box::new(move |ctx| {
            let v = verify_emergence(&s, &factors, &cover, ctx.budget)?;
            let witness = v.witness.map(|w| match w {
                EmergenceFailure::FactorNotReducible { index, certificate } => json!({
                    "stage": "factor-not-reducible",
                    "index": index,
                    "certificate": certificate.to_json(s.magma()),
                }),
                EmergenceFailure::CompositionMismatch { witness } => json!({
                    "stage": "composition-mismatch",
                    "config": witness.to_json(s.magma()),
                }),
            });
            Ok(verdict_outcome(v.holds, witness))
        }))
    }
}

impl QueryKind for Condition2 {
    fn name(&self) -> &'static str {
        "condition2"
    }

    fn usage(&self) -> &'static str {
        "condition2(SYSTEM, COVER | {X}, {Y})"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 2, 3)?;
        let s = a.system(ws, 0)?;
        let cover = a.cover(ws, 1, &s)?;
        Ok(Box::new(move |ctx| {
            let v = theorem_condition2(&s, &cover, ctx.budget)?;
            Ok(verdict_outcome(v.holds, v.witness.map(|q| q.to_json(s.magma()))))
        }))
    }
}

impl QueryKind for Condition3 {
    fn name(&self) -> &'static str {
        "condition3"
    }

    fn usage(&self) -> &'static str {
        "condition3(SYSTEM, COVER | {X}, {Y})"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 2, 3)?;
        let s = a.system(ws, 0)?;
        let cover = a.cover(ws, 1, &s)?;
        Ok(Box::new(move |ctx| {
            let v = theorem_condition3(&s, &cover, ctx.budget)?;
            Ok(verdict_outcome(v.holds, v.witness.map(|q| q.to_json(s.magma()))))
        }))
    }
}

impl QueryKind for Condition1 {
    fn name(&self) -> &'static str {
        "condition1"
    }

    fn usage(&self) -> &'static str {
        "condition1(SYSTEM, SYSTEM)"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 2, 2)?;
        let (sx, sy) = (a.system(ws, 0)?, a.system(ws, 1)?);
        Ok(Box::new(move |ctx| {
            let (h0, h1) = (sx.domain_set(ctx.budget)?, sy.domain_set(ctx.budget)?);
            let v = check_closure_condition1(&h0, &h1, &sx, &sy)?;
            let m = sx.magma();
            Ok(verdict_outcome(
                v.holds,
                v.witness.map(|w| {
                    json!({
                        "side": format!("{:?}", w.side),
                        "member": w.member.to_json(m),
                        "source": w.source.to_json(m),
                        "image": w.image.to_json(m),
                    })
                }),
            ))
        }))
    }
}

impl QueryKind for CoupleQ {
    fn name(&self) -> &'static str {
        "couple"
    }

    fn usage(&self) -> &'static str {
        "couple(SYSTEM, SYSTEM)"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 2, 2)?;
        let (sx, sy) = (a.system(ws, 0)?, a.system(ws, 1)?);
        Ok(Box::new(move |ctx| {
            let c = couple(&sx, &sy, ctx.budget)?;
            Ok(Outcome {
                value: Some(c.to_json(ctx.budget)?),
                ..Outcome::default()
            })
        }))
    }
}

impl QueryKind for Glue {
    fn name(&self) -> &'static str {
        "glue"
    }

    fn usage(&self) -> &'static str {
        "glue(SYSTEM, SYSTEM, {a -> b, ...})"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 3, 3)?;
        let (sx, sy) = (a.system(ws, 0)?, a.system(ws, 1)?);
        let map = gluing_arg(&args[2])?;
        Ok(Box::new(move |ctx| {
            let g = couple_glued(&sx, &sy, &map, ctx.budget)?;
            let names: Map<String, Value> = g.y_names.iter().map(|(a, b)| (a.clone(), json!(b))).collect();
            Ok(Outcome {
                value: Some(json!({ "system": g.system.to_json(ctx.budget)?, "y_names": names })),
                ..Outcome::default()
            })
        }))
    }
}

impl QueryKind for Simulate {
    fn name(&self) -> &'static str {
        "simulate"
    }

    fn usage(&self) -> &'static str {
        "simulate(SYSTEM, (a=.., ...), STEPS)"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 3, 3)?;
        let s = a.system(ws, 0)?;
        let Arg::Config(lit) = &args[1] else {
            return Err(a.mismatch(1, "a configuration"));
        };
        let init = config(lit, s.vars(), s.magma())?;
        if !s.in_domain(&init) {
            return Err(ValidationError::new(
                K::VarSetMismatch,
                lit.span,
                "initial configuration lies outside the domain",
            ));
        }
        let k = a.count(2)?;
        Ok(Box::new(move |_| {
            let trace = s.iterate(&init, k)?;
            Ok(Outcome {
                value: Some(json!({
                    "trace": trace.iter().map(|g| g.to_json(s.magma())).collect::<Vec<_>>()
                })),
                ..Outcome::default()
            })
        }))
    }
}

impl QueryKind for EmbedEquiv {
    fn name(&self) -> &'static str {
        "embed_equiv"
    }

    fn usage(&self) -> &'static str {
        "embed_equiv(MODEL, STEPS)"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 2, 2)?;
        let model = ws.model(a.word(0, "a classical model name")?)?.clone();
        let k = a.count(1)?;
        Ok(Box::new(move |ctx| {
            let e = embed(&model, ctx.budget)?;
            let inits = all_initial_states(&model);
            let divergence = gsys_core::classical::equivalence_check(&e, k, &inits)?;
            let star = e.star_set(ctx.budget)?;
            let star_closed = is_closed(&star, &e.coupled)?.holds;
            let mut one_hot = true;
            for init in &inits {
                for g in e.coupled.iterate(&e.encode(init), k)? {
                    one_hot &= e.blocks_well_formed(&g);
                }
            }
            let (h0, h1) = (e.environment.domain_set(ctx.budget)?, e.agent.domain_set(ctx.budget)?);
            let condition1 = check_closure_condition1(&h0, &h1, &e.environment, &e.agent)?.holds;
            Ok(Outcome {
                holds: Some(divergence.is_none()),
                value: Some(json!({
                    "steps": k,
                    "initial_states": inits.len(),
                    "star_set_size": star.len(),
                    "star_set_closed": star_closed,
                    "one_hot": one_hot,
                    "condition1": condition1,
                })),
                witness: divergence.map(|d| d.to_json(&model)),
            })
        }))
    }
}

impl QueryKind for Closed {
    fn name(&self) -> &'static str {
        "closed"
    }

    fn usage(&self) -> &'static str {
        "closed(SYSTEM, TEAM)"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 2, 2)?;
        let s = a.system(ws, 0)?;
        let team = a.team(ws, 1, &s)?.expect("two arguments were checked");
        Ok(Box::new(move |_| {
            let v = is_closed(&team, &s)?;
            let m = s.magma();
            Ok(verdict_outcome(
                v.holds,
                v.witness
                    .map(|(g, img)| json!({ "config": g.to_json(m), "image": img.to_json(m) })),
            ))
        }))
    }
}

impl QueryKind for Equal {
    fn name(&self) -> &'static str {
        "equal"
    }

    fn usage(&self) -> &'static str {
        "equal(SYSTEM, SYSTEM)"
    }

    fn bind(&self, args: &[Arg], span: Span, ws: &Workspace) -> Result<Runner, ValidationError> {
        let a = Args::new(self, args, span, 2, 2)?;
        let (s, t) = (a.system(ws, 0)?, a.system(ws, 1)?);
        if !s.vars().same_members(t.vars()) {
            return Err(ValidationError::new(
                K::VarSetMismatch,
                span,
                format!("systems are over {} and {}", s.vars(), t.vars()),
            ));
        }
        Ok(Box::new(move |ctx| {
            let t = t.realigned(s.vars(), ctx.budget)?;
            let v = systems_equal(&s, &t, ctx.budget)?;
            Ok(verdict_outcome(v.holds, v.witness.map(|g| g.to_json(s.magma()))))
        }))
    }
}
