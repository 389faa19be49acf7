//! Variable sets, configurations (elements of G^X) and finite sets of them.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde_json::{Map, Value};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::magma::{Elem, Magma};

/// An ordered finite set of variable names. The order is fixed at creation
/// and drives enumeration order.
#[derive(Clone)]
pub struct VarSet(Arc<[String]>);

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        Ok(VarSet(names.into()))
    }

    pub fn empty() -> Self {
        VarSet(Arc::from(Vec::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.iter().all(|n| other.contains(n))
    }

    /// Same members, possibly in a different order.
    pub fn same_members(&self, other: &VarSet) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }

    /// Members of `self` in order, followed by the members of `other` not in `self`.
    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut names = self.0.to_vec();
        names.extend(other.iter().filter(|n| !self.contains(n)).map(String::from));
        VarSet(names.into())
    }

    /// Members of `self` that are also in `other`, in `self`'s order.
    pub fn intersection(&self, other: &VarSet) -> VarSet {
        VarSet(
            self.iter()
                .filter(|n| other.contains(n))
                .map(String::from)
                .collect::<Vec<_>>()
                .into(),
        )
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(
            self.iter()
                .filter(|n| !other.contains(n))
                .map(String::from)
                .collect::<Vec<_>>()
                .into(),
        )
    }

    /// For each member of `self`, its position in `other`.
    pub fn positions_in(&self, other: &VarSet) -> Result<Vec<usize>> {
        self.iter()
            .map(|n| other.index_of(n).ok_or_else(|| Error::UnknownVariable(n.to_string())))
            .collect()
    }

    /// Fails with `UnknownVariable` on the first member missing from `other`.
    pub fn require_subset_of(&self, other: &VarSet) -> Result<()> {
        self.positions_in(other).map(|_| ())
    }

    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> Result<VarSet> {
        VarSet::new(self.iter().map(rename))
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for VarSet {}

impl Hash for VarSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl PartialOrd for VarSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VarSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(", "))
    }
}

/// A total assignment of magma elements to the variables of a `VarSet`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    vars: VarSet,
    values: Vec<Elem>,
}

impl Config {
    pub fn new(vars: VarSet, values: Vec<Elem>) -> Result<Self> {
        if vars.len() != values.len() {
            return Err(Error::ArityMismatch(format!(
                "{} values for {} variables",
                values.len(),
                vars.len()
            )));
        }
        Ok(Config { vars, values })
    }

    pub(crate) fn from_parts(vars: VarSet, values: Vec<Elem>) -> Self {
        debug_assert_eq!(vars.len(), values.len());
        Config { vars, values }
    }

    /// The unique configuration over the empty variable set.
    pub fn empty() -> Self {
        Config {
            vars: VarSet::empty(),
            values: Vec::new(),
        }
    }

    /// Parses `a=1,b=0` against the element names of `m`. Variable order is
    /// the order of appearance.
    pub fn parse_literal(text: &str, m: &Magma) -> Result<Self> {
        let mut names = Vec::new();
        let mut values = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (var, val) = part
                .split_once('=')
                .ok_or_else(|| Error::BadParameter(format!("expected `var=value`, got `{part}`")))?;
            let (var, val) = (var.trim(), val.trim());
            let e = m
                .index_of(val)
                .ok_or_else(|| Error::BadParameter(format!("`{val}` is not an element")))?;
            names.push(var.to_string());
            values.push(e);
        }
        Ok(Config {
            vars: VarSet::new(names)?,
            values,
        })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    pub fn get(&self, var: &str) -> Option<Elem> {
        self.vars.index_of(var).map(|i| self.values[i])
    }

    /// Restriction to `a`, which must be a subset of this config's variables.
    pub fn restrict(&self, a: &VarSet) -> Result<Config> {
        let pos = a.positions_in(&self.vars)?;
        Ok(Config {
            vars: a.clone(),
            values: pos.iter().map(|&i| self.values[i]).collect(),
        })
    }

    /// `g[s/S]`: overwrite the variables of `s` with its values.
    pub fn substitute(&self, s: &Config) -> Result<Config> {
        let pos = s.vars.positions_in(&self.vars)?;
        let mut values = self.values.clone();
        for (&i, &v) in pos.iter().zip(&s.values) {
            values[i] = v;
        }
        Ok(Config {
            vars: self.vars.clone(),
            values,
        })
    }

    /// Translation action of `t ∈ G^A` on `self ∈ G^B` (`A ⊆ B`): the value
    /// at `b ∈ A` becomes `t(b) • self(b)`, every other value is unchanged.
    pub fn translate(&self, t: &Config, m: &Magma) -> Result<Config> {
        let pos = t.vars.positions_in(&self.vars)?;
        let mut values = self.values.clone();
        for (&i, &v) in pos.iter().zip(&t.values) {
            values[i] = m.op(v, values[i]);
        }
        Ok(Config {
            vars: self.vars.clone(),
            values,
        })
    }

    /// Variables whose value differs from the identity of `m`.
    pub fn support(&self, m: &Magma) -> Result<VarSet> {
        let e = m.identity().ok_or(Error::NoIdentity)?;
        VarSet::new(
            self.vars
                .iter()
                .zip(&self.values)
                .filter(|(_, &v)| v != e)
                .map(|(n, _)| n.to_string()),
        )
    }

    /// Extension to `z ⊇ vars` by the identity element.
    pub fn zero_extend(&self, z: &VarSet, m: &Magma) -> Result<Config> {
        let e = m.identity().ok_or(Error::NoIdentity)?;
        let pos = self.vars.positions_in(z)?;
        let mut values = vec![e; z.len()];
        for (&i, &v) in pos.iter().zip(&self.values) {
            values[i] = v;
        }
        Ok(Config {
            vars: z.clone(),
            values,
        })
    }

    /// The common extension of two configurations over `X ∪ Y`.
    pub fn merge(&self, other: &Config) -> Result<Config> {
        let vars = self.vars.union(&other.vars);
        let mut values = self.values.clone();
        for (n, &v) in other.vars.iter().zip(&other.values) {
            match self.get(n) {
                Some(w) if w != v => return Err(Error::OverlapMismatch(n.to_string())),
                Some(_) => {}
                None => values.push(v),
            }
        }
        Ok(Config { vars, values })
    }

    /// The same assignment listed in the order of `vars` (same members).
    pub fn realign(&self, vars: &VarSet) -> Result<Config> {
        if self.vars == *vars {
            return Ok(self.clone());
        }
        if !self.vars.same_members(vars) {
            return Err(Error::VarSetMismatch(format!("{} vs {}", self.vars, vars)));
        }
        self.restrict(vars)
    }

    pub fn display<'a>(&'a self, m: &'a Magma) -> ConfigDisplay<'a> {
        ConfigDisplay { config: self, magma: m }
    }

    /// Ordered JSON map from variable to element name.
    pub fn to_json(&self, m: &Magma) -> Value {
        let mut map = Map::new();
        for (n, &v) in self.vars.iter().zip(&self.values) {
            map.insert(n.to_string(), Value::String(m.name(v).to_string()));
        }
        Value::Object(map)
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, v)) in self.vars.iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}={v}")?;
        }
        write!(f, "}}")
    }
}

/// `a=1,b=0` rendering with element names.
pub struct ConfigDisplay<'a> {
    config: &'a Config,
    magma: &'a Magma,
}

impl fmt::Display for ConfigDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, &v)) in self.config.vars.iter().zip(&self.config.values).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}={}", self.magma.name(v))?;
        }
        Ok(())
    }
}

/// The space `G^X` with lexicographic indexing: the first variable is the
/// most significant digit, digits follow element declaration order.
///
/// Indexing is random-access, so the space can be split into index ranges.
#[derive(Debug, Clone)]
pub struct ConfigSpace {
    vars: VarSet,
    base: usize,
    len: usize,
}

impl ConfigSpace {
    pub fn new(m: &Magma, vars: &VarSet, budget: &Budget) -> Result<Self> {
        let len = (m.size() as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
        budget.admit(len)?;
        Ok(ConfigSpace {
            vars: vars.clone(),
            base: m.size(),
            len: len as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn config(&self, mut index: usize) -> Config {
        let mut values = vec![0; self.vars.len()];
        for slot in values.iter_mut().rev() {
            *slot = (index % self.base) as Elem;
            index /= self.base;
        }
        Config::from_parts(self.vars.clone(), values)
    }

    pub fn index_of(&self, g: &Config) -> usize {
        index_of_values(g.values(), self.base)
    }

    pub fn iter(&self) -> impl Iterator<Item = Config> + '_ {
        (0..self.len).map(move |i| self.config(i))
    }
}

pub(crate) fn index_of_values(values: &[Elem], base: usize) -> usize {
    values.iter().fold(0, |acc, &v| acc * base + v as usize)
}

/// Every configuration of `G^X` exactly once, in lexicographic order.
pub fn enumerate_configs(m: &Magma, vars: &VarSet, budget: &Budget) -> Result<Vec<Config>> {
    let space = ConfigSpace::new(m, vars, budget)?;
    Ok(space.iter().collect())
}

/// A finite set of configurations over a common variable set.
#[derive(Clone, PartialEq, Eq)]
pub struct ConfigSet {
    vars: VarSet,
    members: BTreeSet<Config>,
}

/// A team in the sense of dependence logic: rows are configurations.
pub type Team = ConfigSet;

impl ConfigSet {
    /// Members are realigned to `vars`; duplicates collapse.
    pub fn new(vars: VarSet, members: impl IntoIterator<Item = Config>) -> Result<Self> {
        let members = members.into_iter().map(|g| g.realign(&vars)).collect::<Result<_>>()?;
        Ok(ConfigSet { vars, members })
    }

    pub fn empty(vars: VarSet) -> Self {
        ConfigSet {
            vars,
            members: BTreeSet::new(),
        }
    }

    pub fn full(m: &Magma, vars: &VarSet, budget: &Budget) -> Result<Self> {
        let space = ConfigSpace::new(m, vars, budget)?;
        Ok(ConfigSet {
            vars: vars.clone(),
            members: space.iter().collect(),
        })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: &Config) -> bool {
        if g.vars == self.vars {
            self.members.contains(g)
        } else {
            g.realign(&self.vars)
                .map(|g| self.members.contains(&g))
                .unwrap_or(false)
        }
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &Config> {
        self.members.iter()
    }

    pub fn insert(&mut self, g: Config) -> Result<bool> {
        let g = g.realign(&self.vars)?;
        Ok(self.members.insert(g))
    }

    pub fn is_subset(&self, other: &ConfigSet) -> bool {
        self.iter().all(|g| other.contains(g))
    }

    pub fn renamed(&self, vars: VarSet) -> Result<ConfigSet> {
        if vars.len() != self.vars.len() {
            return Err(Error::VarSetMismatch(format!("{} vs {}", self.vars, vars)));
        }
        Ok(ConfigSet {
            members: self
                .members
                .iter()
                .map(|g| Config::from_parts(vars.clone(), g.values.clone()))
                .collect(),
            vars,
        })
    }

    pub fn to_json(&self, m: &Magma) -> Value {
        Value::Array(self.iter().map(|g| g.to_json(m)).collect())
    }
}

impl fmt::Debug for ConfigSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z2() -> Magma {
        Magma::cyclic(2).unwrap()
    }

    fn vs(names: &[&str]) -> VarSet {
        VarSet::new(names.iter().copied()).unwrap()
    }

    fn cfg(pairs: &[(&str, Elem)]) -> Config {
        Config::new(
            vs(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()),
            pairs.iter().map(|p| p.1).collect(),
        )
        .unwrap()
    }

    #[test]
    fn restriction() {
        let g = cfg(&[("a", 1), ("b", 0)]);
        assert_eq!(g.restrict(&vs(&["a"])).unwrap(), cfg(&[("a", 1)]));
        assert_eq!(g.restrict(&vs(&["a", "b"])).unwrap(), g);
        let g3 = cfg(&[("a", 1), ("b", 0), ("c", 1)]);
        assert_eq!(g3.restrict(&vs(&["b", "c"])).unwrap(), cfg(&[("b", 0), ("c", 1)]));
        assert_eq!(g.restrict(&vs(&["z"])), Err(Error::UnknownVariable("z".into())));
    }

    #[test]
    fn substitution() {
        let g = cfg(&[("a", 0), ("b", 0)]);
        assert_eq!(g.substitute(&cfg(&[("a", 1)])).unwrap(), cfg(&[("a", 1), ("b", 0)]));
        assert_eq!(g.substitute(&Config::empty()).unwrap(), g);
        assert_eq!(
            cfg(&[("a", 0), ("b", 1)])
                .substitute(&cfg(&[("a", 0), ("b", 0)]))
                .unwrap(),
            cfg(&[("a", 0), ("b", 0)])
        );
        assert!(g.substitute(&cfg(&[("q", 0)])).is_err());
    }

    #[test]
    fn translation() {
        let m = z2();
        let h = cfg(&[("a", 1), ("b", 1)]);
        assert_eq!(h.translate(&cfg(&[("b", 1)]), &m).unwrap(), cfg(&[("a", 1), ("b", 0)]));
        assert_eq!(h.translate(&Config::empty(), &m).unwrap(), h);
        assert_eq!(
            cfg(&[("a", 1)]).translate(&cfg(&[("a", 0)]), &m).unwrap(),
            cfg(&[("a", 1)])
        );
    }

    #[test]
    fn support_and_zero_extension() {
        let m = z2();
        assert_eq!(cfg(&[("a", 0), ("b", 1)]).support(&m).unwrap(), vs(&["b"]));
        assert!(cfg(&[("a", 0), ("b", 0)]).support(&m).unwrap().is_empty());
        assert_eq!(cfg(&[("a", 1), ("b", 1)]).support(&m).unwrap(), vs(&["a", "b"]));
        let proj = Magma::new(vec!["a", "b"], vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(cfg(&[("a", 0)]).support(&proj), Err(Error::NoIdentity));

        assert_eq!(
            cfg(&[("a", 1)]).zero_extend(&vs(&["a", "b"]), &m).unwrap(),
            cfg(&[("a", 1), ("b", 0)])
        );
        let g = cfg(&[("a", 1), ("b", 0)]);
        assert_eq!(g.zero_extend(&vs(&["a", "b"]), &m).unwrap(), g);
        assert_eq!(Config::empty().zero_extend(&vs(&["a"]), &m).unwrap(), cfg(&[("a", 0)]));
        assert_eq!(g.zero_extend(&vs(&["a", "b"]), &proj), Err(Error::NoIdentity));
    }

    #[test]
    fn merging() {
        assert_eq!(
            cfg(&[("a", 1)]).merge(&cfg(&[("b", 0)])).unwrap(),
            cfg(&[("a", 1), ("b", 0)])
        );
        assert_eq!(
            cfg(&[("a", 1), ("b", 0)]).merge(&cfg(&[("b", 0), ("c", 1)])).unwrap(),
            cfg(&[("a", 1), ("b", 0), ("c", 1)])
        );
        assert_eq!(
            cfg(&[("b", 0)]).merge(&cfg(&[("b", 1)])),
            Err(Error::OverlapMismatch("b".into()))
        );
    }

    #[test]
    fn enumeration() {
        let m = z2();
        let b = Budget::default();
        assert_eq!(
            enumerate_configs(&m, &vs(&["a"]), &b).unwrap(),
            vec![cfg(&[("a", 0)]), cfg(&[("a", 1)])]
        );
        let two = enumerate_configs(&m, &vs(&["a", "b"]), &b).unwrap();
        let values: Vec<_> = two.iter().map(|g| g.values().to_vec()).collect();
        assert_eq!(values, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert!(matches!(
            enumerate_configs(&m, &vs(&["a", "b", "c"]), &Budget::new(4)),
            Err(Error::EnumerationCapExceeded { requested: 8, cap: 4 })
        ));
        assert_eq!(enumerate_configs(&m, &VarSet::empty(), &b).unwrap().len(), 1);
    }

    #[test]
    fn literal_parsing() {
        let m = z2();
        assert_eq!(
            Config::parse_literal("a=1, b=0", &m).unwrap(),
            cfg(&[("a", 1), ("b", 0)])
        );
        assert!(Config::parse_literal("a=2", &m).is_err());
        assert!(Config::parse_literal("a", &m).is_err());
        assert!(Config::parse_literal("a=1,a=0", &m).is_err());
        assert_eq!(Config::parse_literal("", &m).unwrap(), Config::empty());
    }

    #[test]
    fn var_set_algebra() {
        let x = vs(&["b0", "b1", "b2"]);
        let y = vs(&["b1", "b2", "b3"]);
        assert_eq!(x.union(&y), vs(&["b0", "b1", "b2", "b3"]));
        assert_eq!(x.intersection(&y), vs(&["b1", "b2"]));
        assert_eq!(x.difference(&y), vs(&["b0"]));
        assert!(vs(&["b", "a"]).same_members(&vs(&["a", "b"])));
        assert!(VarSet::new(["a", "a"]).is_err());
    }

    fn arb_config(base: u8, n: usize) -> impl Strategy<Value = Config> {
        proptest::collection::vec(0..base, n)
            .prop_map(move |v| Config::new(VarSet::new((0..n).map(|i| format!("v{i}"))).unwrap(), v).unwrap())
    }

    fn subset(vars: &VarSet, mask: u32) -> VarSet {
        VarSet::new(
            vars.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, n)| n.to_string()),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn restriction_laws(g in arb_config(3, 4), outer in 0u32..16, inner in 0u32..16) {
            let b = subset(g.vars(), outer);
            let a = subset(g.vars(), outer & inner);
            prop_assert_eq!(g.restrict(&b).unwrap().restrict(&a).unwrap(), g.restrict(&a).unwrap());
        }

        #[test]
        fn substitution_laws(g in arb_config(3, 4), s_mask in 0u32..16, vals in proptest::collection::vec(0u8..3, 4)) {
            let s_vars = subset(g.vars(), s_mask);
            prop_assert_eq!(&g.substitute(&g.restrict(&s_vars).unwrap()).unwrap(), &g);
            let s = Config::new(s_vars.clone(), vals[..s_vars.len()].to_vec()).unwrap();
            let once = g.substitute(&s).unwrap();
            prop_assert_eq!(once.substitute(&s).unwrap(), once);
        }

        #[test]
        fn merge_of_restrictions(g in arb_config(2, 4), xm in 0u32..16, ym in 0u32..16) {
            let x = subset(g.vars(), xm | !ym & 0xf);
            let y = subset(g.vars(), ym);
            let merged = g.restrict(&x).unwrap().merge(&g.restrict(&y).unwrap()).unwrap();
            prop_assert_eq!(merged.realign(g.vars()).unwrap(), g);
        }
    }

    #[test]
    fn translation_is_a_monoid_action() {
        // Exhaustive over Z/4Z and the join chain, |A| <= |B| <= 3.
        let b = Budget::default();
        for m in [Magma::cyclic(4).unwrap(), Magma::chain_join(3).unwrap()] {
            let big = vs(&["p", "q", "r"]);
            for mask in 0..8 {
                let a = subset(&big, mask);
                for h in enumerate_configs(&m, &big, &b).unwrap() {
                    for t1 in enumerate_configs(&m, &a, &b).unwrap() {
                        for t2 in enumerate_configs(&m, &a, &b).unwrap() {
                            let prod = Config::new(
                                a.clone(),
                                t1.values().iter().zip(t2.values()).map(|(&x, &y)| m.op(x, y)).collect(),
                            )
                            .unwrap();
                            assert_eq!(
                                h.translate(&t2, &m).unwrap().translate(&t1, &m).unwrap(),
                                h.translate(&prod, &m).unwrap()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_yields_distinct_configs() {
        let m = Magma::cyclic(3).unwrap();
        let all = enumerate_configs(&m, &vs(&["a", "b", "c"]), &Budget::default()).unwrap();
        assert_eq!(all.len(), 27);
        let set: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), 27);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}
