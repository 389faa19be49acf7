//! G-systems `(X, α)`: rule-based or tabulated transition functions over
//! `G^X`, optionally restricted to a closed domain `H ⊆ G^X`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::budget::Budget;
use crate::config::{Config, ConfigSet, ConfigSpace, VarSet};
use crate::error::{Error, Result};
use crate::magma::{Elem, Magma};
use crate::Verdict;

/// A named k-ary function over the carrier, stored as a flat table indexed
/// lexicographically by its arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnTable {
    name: String,
    arity: usize,
    carrier: usize,
    table: Vec<Elem>,
}

impl FnTable {
    pub fn new(name: impl Into<String>, arity: usize, m: &Magma, table: Vec<Elem>) -> Result<Self> {
        let name = name.into();
        let expected = m.size().pow(arity as u32);
        if table.len() != expected {
            return Err(Error::MalformedTable(format!(
                "function `{name}` needs {expected} entries, found {}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&v| v as usize >= m.size()) {
            return Err(Error::MalformedTable(format!(
                "function `{name}` has out-of-range entry {bad}"
            )));
        }
        Ok(FnTable {
            name,
            arity,
            carrier: m.size(),
            table,
        })
    }

    /// Tabulates a Rust closure.
    pub fn from_fn(name: impl Into<String>, arity: usize, m: &Magma, f: impl Fn(&[Elem]) -> Elem) -> Result<Self> {
        let space = ConfigSpace::new(
            m,
            &VarSet::new((0..arity).map(|i| format!("_{i}")))?,
            &Budget::new(u64::MAX),
        )?;
        let table = space.iter().map(|g| f(g.values())).collect();
        FnTable::new(name, arity, m, table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn entries(&self) -> &[Elem] {
        &self.table
    }

    pub fn apply(&self, args: &[Elem]) -> Elem {
        self.table[crate::config::index_of_values(args, self.carrier)]
    }
}

/// Right-hand side of a transition rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// Value of the variable at this index of the owning system's `VarSet`.
    Var(usize),
    Const(Elem),
    /// The ambient magma operation.
    Op(Box<Term>, Box<Term>),
    Call(Arc<FnTable>, Vec<Term>),
}

impl Term {
    pub fn op(a: Term, b: Term) -> Term {
        Term::Op(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, m: &Magma, values: &[Elem]) -> Elem {
        match self {
            Term::Var(i) => values[*i],
            Term::Const(c) => *c,
            Term::Op(a, b) => m.op(a.eval(m, values), b.eval(m, values)),
            Term::Call(f, args) => {
                let args: Vec<Elem> = args.iter().map(|t| t.eval(m, values)).collect();
                f.apply(&args)
            }
        }
    }

    /// Replaces every variable index `i` by `f(i)`.
    pub fn map_vars(&self, f: &impl Fn(usize) -> Term) -> Term {
        match self {
            Term::Var(i) => f(*i),
            Term::Const(c) => Term::Const(*c),
            Term::Op(a, b) => Term::op(a.map_vars(f), b.map_vars(f)),
            Term::Call(g, args) => Term::Call(g.clone(), args.iter().map(|t| t.map_vars(f)).collect()),
        }
    }

    fn validate(&self, m: &Magma, vars: &VarSet) -> Result<()> {
        match self {
            Term::Var(i) if *i >= vars.len() => Err(Error::UnboundVariable(format!("#{i}"))),
            Term::Var(_) => Ok(()),
            Term::Const(c) if *c as usize >= m.size() => {
                Err(Error::BadParameter(format!("constant {c} is not an element")))
            }
            Term::Const(_) => Ok(()),
            Term::Op(a, b) => {
                a.validate(m, vars)?;
                b.validate(m, vars)
            }
            Term::Call(f, args) => {
                if f.arity() != args.len() {
                    return Err(Error::ArityMismatch(format!(
                        "`{}` takes {} arguments, given {}",
                        f.name(),
                        f.arity(),
                        args.len()
                    )));
                }
                if f.carrier() != m.size() {
                    return Err(Error::MagmaMismatch);
                }
                args.iter().try_for_each(|t| t.validate(m, vars))
            }
        }
    }

    pub fn display<'a>(&'a self, vars: &'a VarSet, m: &'a Magma) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            vars,
            magma: m,
        }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    vars: &'a VarSet,
    magma: &'a Magma,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |t: &'_ Term| {
            TermDisplay {
                term: t,
                vars: self.vars,
                magma: self.magma,
            }
            .to_string()
        };
        match self.term {
            Term::Var(i) => write!(f, "{}", self.vars.names()[*i]),
            Term::Const(c) => write!(f, "#{}", self.magma.name(*c)),
            Term::Op(a, b) => {
                // Left-associative; only a right operand that is itself an
                // operation needs parentheses.
                let rhs = if matches!(**b, Term::Op(..)) {
                    format!("({})", sub(b))
                } else {
                    sub(b)
                };
                write!(f, "{} • {}", sub(a), rhs)
            }
            Term::Call(g, args) => {
                let args: Vec<String> = args.iter().map(sub).collect();
                write!(f, "{}({})", g.name(), args.join(", "))
            }
        }
    }
}

/// Transition function representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transition {
    /// One output term per variable, in `VarSet` order.
    Rules(Vec<Term>),
    /// Explicit map over the domain, keyed by value vectors in `VarSet` order.
    Table(Arc<BTreeMap<Vec<Elem>, Vec<Elem>>>),
}

impl Transition {
    pub fn is_table(&self) -> bool {
        matches!(self, Transition::Table(_))
    }
}

#[derive(Debug, Clone)]
pub struct GSystem {
    magma: Arc<Magma>,
    vars: VarSet,
    transition: Transition,
    domain: Option<ConfigSet>,
}

impl GSystem {
    /// Validates the transition against `vars` and, for restricted domains,
    /// checks closure with a full sweep of `domain`.
    pub fn new(magma: Arc<Magma>, vars: VarSet, transition: Transition, domain: Option<ConfigSet>) -> Result<Self> {
        let domain = match domain {
            Some(h) => Some(if h.vars() == &vars {
                h
            } else if h.vars().same_members(&vars) {
                ConfigSet::new(vars.clone(), h.iter().cloned())?
            } else {
                return Err(Error::VarSetMismatch(format!(
                    "domain over {} for system over {}",
                    h.vars(),
                    vars
                )));
            }),
            None => None,
        };
        match &transition {
            Transition::Rules(rules) => {
                if rules.len() != vars.len() {
                    return Err(Error::ArityMismatch(format!(
                        "{} rules for {} variables",
                        rules.len(),
                        vars.len()
                    )));
                }
                for r in rules {
                    r.validate(&magma, &vars)?;
                }
            }
            Transition::Table(table) => {
                let n = magma.size();
                let in_range = |v: &Vec<Elem>| v.len() == vars.len() && v.iter().all(|&e| (e as usize) < n);
                if let Some((k, v)) = table.iter().find(|(k, v)| !in_range(k) || !in_range(v)) {
                    return Err(Error::MalformedTable(format!(
                        "table row {k:?} -> {v:?} does not fit {vars}"
                    )));
                }
                match &domain {
                    Some(h) => {
                        if table.len() != h.len() || h.iter().any(|g| !table.contains_key(g.values())) {
                            return Err(Error::MalformedTable(
                                "table does not cover exactly the declared domain".into(),
                            ));
                        }
                    }
                    None => {
                        let full = (n as u128).checked_pow(vars.len() as u32);
                        if full != Some(table.len() as u128) {
                            return Err(Error::MalformedTable("table does not cover all of G^X".into()));
                        }
                    }
                }
            }
        }
        let sys = GSystem {
            magma,
            vars,
            transition,
            domain,
        };
        if let Some(h) = &sys.domain {
            for g in h.iter() {
                let out = sys.step_unchecked(g);
                if !h.contains(&out) {
                    return Err(Error::DomainNotClosed {
                        from: g.display(&sys.magma).to_string(),
                        to: out.display(&sys.magma).to_string(),
                    });
                }
            }
        }
        Ok(sys)
    }

    pub fn from_rules(magma: Arc<Magma>, vars: VarSet, rules: Vec<Term>) -> Result<Self> {
        GSystem::new(magma, vars, Transition::Rules(rules), None)
    }

    /// Tabulates a closure over `domain` (or all of `G^X`).
    pub fn from_fn(
        magma: Arc<Magma>,
        vars: VarSet,
        domain: Option<ConfigSet>,
        budget: &Budget,
        mut f: impl FnMut(&Config) -> Config,
    ) -> Result<Self> {
        let inputs: Vec<Config> = match &domain {
            Some(h) => h.iter().cloned().collect(),
            None => ConfigSpace::new(&magma, &vars, budget)?.iter().collect(),
        };
        let mut table = BTreeMap::new();
        for g in inputs {
            let g = g.realign(&vars)?;
            let out = f(&g).realign(&vars)?;
            table.insert(g.values().to_vec(), out.values().to_vec());
        }
        GSystem::new(magma, vars, Transition::Table(Arc::new(table)), domain)
    }

    /// The identity system on `G^X`.
    pub fn identity(magma: Arc<Magma>, vars: VarSet) -> Self {
        let rules = (0..vars.len()).map(Term::Var).collect();
        GSystem::from_rules(magma, vars, rules).expect("identity rules are well-formed")
    }

    /// The system sending every configuration to the constant `value`.
    pub fn constant(magma: Arc<Magma>, vars: VarSet, value: Elem) -> Result<Self> {
        let rules = vec![Term::Const(value); vars.len()];
        GSystem::from_rules(magma, vars, rules)
    }

    pub fn magma(&self) -> &Arc<Magma> {
        &self.magma
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn transition(&self) -> &Transition {
        &self.transition
    }

    pub fn domain(&self) -> Option<&ConfigSet> {
        self.domain.as_ref()
    }

    pub fn is_tabulated(&self) -> bool {
        self.transition.is_table()
    }

    /// The domain as an explicit set (all of `G^X` when unrestricted).
    pub fn domain_set(&self, budget: &Budget) -> Result<ConfigSet> {
        match &self.domain {
            Some(h) => Ok(h.clone()),
            None => ConfigSet::full(&self.magma, &self.vars, budget),
        }
    }

    /// Domain members in enumeration order.
    pub fn domain_configs(&self, budget: &Budget) -> Result<Vec<Config>> {
        match &self.domain {
            Some(h) => {
                budget.admit(h.len() as u128)?;
                Ok(h.iter().cloned().collect())
            }
            None => Ok(ConfigSpace::new(&self.magma, &self.vars, budget)?.iter().collect()),
        }
    }

    pub fn in_domain(&self, g: &Config) -> bool {
        self.domain.as_ref().is_none_or(|h| h.contains(g))
    }

    /// One application of the transition function.
    pub fn step(&self, g: &Config) -> Result<Config> {
        let g = g.realign(&self.vars)?;
        if !self.in_domain(&g) {
            return Err(Error::OutOfDomain(g.display(&self.magma).to_string()));
        }
        Ok(self.step_unchecked(&g))
    }

    /// `g` must already be aligned to `vars` and lie in the domain.
    pub(crate) fn step_unchecked(&self, g: &Config) -> Config {
        Config::from_parts(self.vars.clone(), self.step_values(g.values()))
    }

    pub(crate) fn step_values(&self, values: &[Elem]) -> Vec<Elem> {
        match &self.transition {
            Transition::Rules(rules) => rules.iter().map(|t| t.eval(&self.magma, values)).collect(),
            Transition::Table(t) => t[values].clone(),
        }
    }

    /// `[g, α(g), …, α^k(g)]`.
    pub fn iterate(&self, g: &Config, k: usize) -> Result<Vec<Config>> {
        let mut trace = Vec::with_capacity(k + 1);
        let mut cur = g.realign(&self.vars)?;
        if !self.in_domain(&cur) {
            return Err(Error::OutOfDomain(cur.display(&self.magma).to_string()));
        }
        for _ in 0..k {
            let next = self.step_unchecked(&cur);
            trace.push(std::mem::replace(&mut cur, next));
        }
        trace.push(cur);
        Ok(trace)
    }

    /// The same system with the variable set reordered to `vars`.
    pub fn realigned(&self, vars: &VarSet, budget: &Budget) -> Result<GSystem> {
        if &self.vars == vars {
            return Ok(self.clone());
        }
        if !self.vars.same_members(vars) {
            return Err(Error::VarSetMismatch(format!("{} vs {}", self.vars, vars)));
        }
        let perm = self.vars.positions_in(vars)?;
        match &self.transition {
            Transition::Rules(rules) => {
                let mut out = vec![Term::Const(0); rules.len()];
                for (i, r) in rules.iter().enumerate() {
                    out[perm[i]] = r.map_vars(&|j| Term::Var(perm[j]));
                }
                let domain = self
                    .domain
                    .as_ref()
                    .map(|h| ConfigSet::new(vars.clone(), h.iter().cloned()))
                    .transpose()?;
                GSystem::new(self.magma.clone(), vars.clone(), Transition::Rules(out), domain)
            }
            Transition::Table(_) => {
                let domain = self
                    .domain
                    .as_ref()
                    .map(|h| ConfigSet::new(vars.clone(), h.iter().cloned()))
                    .transpose()?;
                GSystem::from_fn(self.magma.clone(), vars.clone(), domain, budget, |g| {
                    self.step_unchecked(&g.realign(&self.vars).unwrap())
                })
            }
        }
    }

    /// Renames variables positionally (`new_vars[i]` replaces `vars[i]`).
    pub fn renamed(&self, new_vars: VarSet) -> Result<GSystem> {
        if new_vars.len() != self.vars.len() {
            return Err(Error::VarSetMismatch(format!("{} vs {}", self.vars, new_vars)));
        }
        let domain = self.domain.as_ref().map(|h| h.renamed(new_vars.clone())).transpose()?;
        Ok(GSystem {
            magma: self.magma.clone(),
            vars: new_vars,
            transition: self.transition.clone(),
            domain,
        })
    }

    /// Extensionally equal system with an explicit table.
    pub fn tabulate(&self, budget: &Budget) -> Result<GSystem> {
        if self.is_tabulated() {
            return Ok(self.clone());
        }
        GSystem::from_fn(
            self.magma.clone(),
            self.vars.clone(),
            self.domain.clone(),
            budget,
            |g| self.step_unchecked(g),
        )
    }

    /// `compose(s2, s1)` applies `s1` first, then `s2`.
    pub fn compose(s2: &GSystem, s1: &GSystem, budget: &Budget) -> Result<GSystem> {
        if s1.magma != s2.magma {
            return Err(Error::MagmaMismatch);
        }
        if !s1.vars.same_members(&s2.vars) {
            return Err(Error::VarSetMismatch(format!("{} vs {}", s2.vars, s1.vars)));
        }
        let s1 = s1.realigned(&s2.vars, budget)?;
        if let Some(h2) = &s2.domain {
            for g in s1.domain_configs(budget)? {
                let out = s1.step_unchecked(&g);
                if !h2.contains(&out) {
                    return Err(Error::OutOfDomain(out.display(&s1.magma).to_string()));
                }
            }
        }
        match (&s2.transition, &s1.transition) {
            (Transition::Rules(outer), Transition::Rules(inner)) => {
                let rules = outer.iter().map(|t| t.map_vars(&|i| inner[i].clone())).collect();
                GSystem::new(
                    s2.magma.clone(),
                    s2.vars.clone(),
                    Transition::Rules(rules),
                    s1.domain.clone(),
                )
            }
            _ => GSystem::from_fn(s2.magma.clone(), s2.vars.clone(), s1.domain.clone(), budget, |g| {
                s2.step_unchecked(&s1.step_unchecked(g))
            }),
        }
    }

    /// `(α • α')(g)(x) = α(g)(x) • α'(g)(x)`. Restricted domains intersect.
    pub fn pointwise_combine(s: &GSystem, t: &GSystem, budget: &Budget) -> Result<GSystem> {
        if s.magma != t.magma {
            return Err(Error::MagmaMismatch);
        }
        if !s.vars.same_members(&t.vars) {
            return Err(Error::VarSetMismatch(format!("{} vs {}", s.vars, t.vars)));
        }
        let t = t.realigned(&s.vars, budget)?;
        let domain = match (&s.domain, &t.domain) {
            (None, None) => None,
            (Some(h), None) | (None, Some(h)) => Some(h.clone()),
            (Some(h), Some(k)) => Some(ConfigSet::new(
                s.vars.clone(),
                h.iter().filter(|g| k.contains(g)).cloned(),
            )?),
        };
        match (&s.transition, &t.transition) {
            (Transition::Rules(a), Transition::Rules(b)) => {
                let rules = a.iter().zip(b).map(|(x, y)| Term::op(x.clone(), y.clone())).collect();
                GSystem::new(s.magma.clone(), s.vars.clone(), Transition::Rules(rules), domain)
            }
            _ => {
                let m = s.magma.clone();
                GSystem::from_fn(m.clone(), s.vars.clone(), domain, budget, |g| {
                    let (x, y) = (s.step_unchecked(g), t.step_unchecked(g));
                    let values = x.values().iter().zip(y.values()).map(|(&a, &b)| m.op(a, b)).collect();
                    Config::from_parts(s.vars.clone(), values)
                })
            }
        }
    }

    /// Extensional equality over the common domain. Returns the first
    /// configuration (in enumeration order) on which the systems differ.
    pub fn first_difference(&self, other: &GSystem, budget: &Budget) -> Result<Option<Config>> {
        if self.magma != other.magma {
            return Err(Error::MagmaMismatch);
        }
        if !self.vars.same_members(&other.vars) {
            return Err(Error::VarSetMismatch(format!("{} vs {}", self.vars, other.vars)));
        }
        match (&self.domain, &other.domain) {
            (None, None) => {}
            (Some(h), Some(k)) if h.len() == k.len() && h.is_subset(k) => {}
            _ => return Err(Error::VarSetMismatch("systems are defined on different domains".into())),
        }
        for g in self.domain_configs(budget)? {
            let a = self.step_unchecked(&g);
            let b = other.step_unchecked(&g.realign(&other.vars)?).realign(&self.vars)?;
            if a != b {
                return Ok(Some(g));
            }
        }
        Ok(None)
    }

    pub fn to_json(&self, budget: &Budget) -> Result<Value> {
        let m = &self.magma;
        let transition = match &self.transition {
            Transition::Rules(rules) => {
                let mut map = serde_json::Map::new();
                for (n, t) in self.vars.iter().zip(rules) {
                    map.insert(n.to_string(), Value::String(t.display(&self.vars, m).to_string()));
                }
                json!({ "rules": map })
            }
            Transition::Table(_) => {
                let rows: Vec<Value> = self
                    .domain_configs(budget)?
                    .iter()
                    .map(|g| json!({ "in": g.to_json(m), "out": self.step_unchecked(g).to_json(m) }))
                    .collect();
                json!({ "table": rows })
            }
        };
        let mut obj = json!({
            "vars": self.vars.names(),
            "elements": m.elements(),
        });
        obj.as_object_mut()
            .unwrap()
            .extend(transition.as_object().unwrap().clone());
        if let Some(h) = &self.domain {
            obj["domain_size"] = json!(h.len());
        }
        Ok(obj)
    }
}

/// Extensional equality, with the first differing configuration on failure.
pub fn systems_equal(s: &GSystem, t: &GSystem, budget: &Budget) -> Result<Verdict<Config>> {
    Ok(Verdict::from_counterexample(s.first_difference(t, budget)?))
}
