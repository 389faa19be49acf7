//! Dependence atoms `dep(A; B)` and causal-influence atoms `c(A, B)` over
//! teams of configurations, plus export of a team and its image as a
//! plain table.
//!
//! Dependence can be decided by several interchangeable checkers, looked
//! up by name in [`dependence_checkers`]. All of them report the same
//! canonical witness: the violating pair `(g0, g1)` whose later member
//! comes first in team order, and among those the earliest `g0`.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::budget::Budget;
use crate::config::{Config, ConfigSpace, Team, VarSet};
use crate::error::{Error, Result};
use crate::magma::{Elem, Magma};
use crate::system::GSystem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomWitness {
    /// Two team members that agree on `A` but whose images differ on `B`.
    Pair { g0: Config, g1: Config },
    /// For every team member, an intervention on `A` that moves `B`.
    Interventions(Vec<(Config, Config)>),
    /// A team member whose image on `B` no intervention on `A` can move.
    Unmoved(Config),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomResult {
    pub holds: bool,
    pub witness: Option<AtomWitness>,
}

impl AtomResult {
    fn dep_holds() -> Self {
        AtomResult {
            holds: true,
            witness: None,
        }
    }

    fn dep_fails(g0: Config, g1: Config) -> Self {
        AtomResult {
            holds: false,
            witness: Some(AtomWitness::Pair { g0, g1 }),
        }
    }

    pub fn to_json(&self, m: &Magma) -> Value {
        let witness = match &self.witness {
            None => Value::Null,
            Some(AtomWitness::Pair { g0, g1 }) => json!({ "g0": g0.to_json(m), "g1": g1.to_json(m) }),
            Some(AtomWitness::Interventions(list)) => Value::Array(
                list.iter()
                    .map(|(g, s)| json!({ "g": g.to_json(m), "do": s.to_json(m) }))
                    .collect(),
            ),
            Some(AtomWitness::Unmoved(g)) => json!({ "unmoved": g.to_json(m) }),
        };
        json!({ "holds": self.holds, "witness": witness })
    }
}

/// A strategy for deciding `dep(A; B)` over a team.
pub trait DependenceChecker: Send + Sync {
    fn name(&self) -> &'static str;

    /// `team` is aligned to the system's variables and lies in its domain.
    fn check(&self, s: &GSystem, a: &VarSet, b: &VarSet, team: &[Config]) -> Result<AtomResult>;
}

/// Groups rows by their `A`-restriction and checks each bucket's image on
/// `B` is constant. Linear in the team size.
pub struct Bucketed;

/// The definition read literally: all ordered pairs of rows.
pub struct Pairwise;

/// Functional dependency on the two-column team export.
pub struct ExportFd;

impl DependenceChecker for Bucketed {
    fn name(&self) -> &'static str {
        "bucketed"
    }

    fn check(&self, s: &GSystem, a: &VarSet, b: &VarSet, team: &[Config]) -> Result<AtomResult> {
        let a_pos = a.positions_in(s.vars())?;
        let b_pos = b.positions_in(s.vars())?;
        let mut buckets: HashMap<Vec<Elem>, (usize, Vec<Elem>)> = HashMap::new();
        for (j, g) in team.iter().enumerate() {
            let key = pick(g.values(), &a_pos);
            let out = pick(&s.step_values(g.values()), &b_pos);
            match buckets.get(&key) {
                Some((i, first)) if *first != out => {
                    return Ok(AtomResult::dep_fails(team[*i].clone(), g.clone()));
                }
                Some(_) => {}
                None => {
                    buckets.insert(key, (j, out));
                }
            }
        }
        Ok(AtomResult::dep_holds())
    }
}

impl DependenceChecker for Pairwise {
    fn name(&self) -> &'static str {
        "pairwise"
    }

    fn check(&self, s: &GSystem, a: &VarSet, b: &VarSet, team: &[Config]) -> Result<AtomResult> {
        let images: Vec<Config> = team.iter().map(|g| s.step_unchecked(g)).collect();
        for j in 0..team.len() {
            for i in 0..j {
                if team[i].restrict(a)? == team[j].restrict(a)? && images[i].restrict(b)? != images[j].restrict(b)? {
                    return Ok(AtomResult::dep_fails(team[i].clone(), team[j].clone()));
                }
            }
        }
        Ok(AtomResult::dep_holds())
    }
}

impl DependenceChecker for ExportFd {
    fn name(&self) -> &'static str {
        "export-fd"
    }

    fn check(&self, s: &GSystem, a: &VarSet, b: &VarSet, team: &[Config]) -> Result<AtomResult> {
        let table = export_rows(s, team, a, b, ExportMode::TwoColumn)?;
        let lhs: Vec<usize> = (0..table.split).collect();
        let rhs: Vec<usize> = (table.split..table.columns.len()).collect();
        Ok(match functional_dependency(&table, &lhs, &rhs) {
            Some((i, j)) => AtomResult::dep_fails(team[i].clone(), team[j].clone()),
            None => AtomResult::dep_holds(),
        })
    }
}

static CHECKERS: [&dyn DependenceChecker; 3] = [&Bucketed, &Pairwise, &ExportFd];

pub const DEFAULT_DEPENDENCE_CHECKER: &str = "bucketed";

/// All registered dependence checkers.
pub fn dependence_checkers() -> &'static [&'static dyn DependenceChecker] {
    &CHECKERS
}

pub fn dependence_checker(name: &str) -> Result<&'static dyn DependenceChecker> {
    CHECKERS
        .iter()
        .copied()
        .find(|c| c.name() == name)
        .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
}

fn pick(values: &[Elem], pos: &[usize]) -> Vec<Elem> {
    pos.iter().map(|&i| values[i]).collect()
}

/// Team rows aligned to the system, defaulting to its domain. Every row
/// must lie in the domain.
fn team_rows(s: &GSystem, team: Option<&Team>, budget: &Budget) -> Result<Vec<Config>> {
    match team {
        None => s.domain_configs(budget),
        Some(t) => t
            .iter()
            .map(|g| {
                let g = g.realign(s.vars())?;
                if s.in_domain(&g) {
                    Ok(g)
                } else {
                    Err(Error::OutOfDomain(g.display(s.magma()).to_string()))
                }
            })
            .collect(),
    }
}

/// `dep(A; B)` over `team` (default: the system's domain) with the default
/// checker.
pub fn dep_holds(s: &GSystem, a: &VarSet, b: &VarSet, team: Option<&Team>, budget: &Budget) -> Result<AtomResult> {
    dep_holds_with(&Bucketed, s, a, b, team, budget)
}

pub fn dep_holds_with(
    checker: &dyn DependenceChecker,
    s: &GSystem,
    a: &VarSet,
    b: &VarSet,
    team: Option<&Team>,
    budget: &Budget,
) -> Result<AtomResult> {
    a.require_subset_of(s.vars())?;
    b.require_subset_of(s.vars())?;
    let rows = team_rows(s, team, budget)?;
    checker.check(s, a, b, &rows)
}

/// `c(A, B)`: every team member admits an intervention on `A` that changes
/// the image on `B`. Interventions leading outside a restricted domain are
/// skipped.
pub fn cause_holds(s: &GSystem, a: &VarSet, b: &VarSet, team: Option<&Team>, budget: &Budget) -> Result<AtomResult> {
    a.require_subset_of(s.vars())?;
    b.require_subset_of(s.vars())?;
    let rows = team_rows(s, team, budget)?;
    let interventions = ConfigSpace::new(s.magma(), a, budget)?;
    let b_pos = b.positions_in(s.vars())?;
    let mut found = Vec::with_capacity(rows.len());
    for g in rows {
        let base = pick(&s.step_values(g.values()), &b_pos);
        let hit = interventions.iter().find_map(|iv| {
            let moved = g.substitute(&iv).ok()?;
            if !s.in_domain(&moved) {
                return None;
            }
            (pick(&s.step_values(moved.values()), &b_pos) != base).then_some(iv)
        });
        match hit {
            Some(iv) => found.push((g, iv)),
            None => {
                return Ok(AtomResult {
                    holds: false,
                    witness: Some(AtomWitness::Unmoved(g)),
                })
            }
        }
    }
    Ok(AtomResult {
        holds: true,
        witness: Some(AtomWitness::Interventions(found)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportMode {
    /// Columns `X0 ⊔ X1`: each row `g` continued by `α(g)`.
    Concat,
    /// Rows `(g↾A, α(g)↾B)`.
    TwoColumn,
}

/// A team as a plain table. Columns before `split` describe inputs, the
/// rest describe images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeamTable {
    pub columns: Vec<String>,
    pub split: usize,
    pub rows: Vec<Vec<Elem>>,
}

impl TeamTable {
    pub fn to_json(&self, m: &Magma) -> Value {
        json!({
            "columns": self.columns,
            "split": self.split,
            "rows": self
                .rows
                .iter()
                .map(|r| r.iter().map(|&v| m.name(v)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Exports `team` and its image. In `Concat` mode the input columns are
/// named `x@0` and the image columns `x@1`; in `TwoColumn` mode the `A`
/// block is named `A.x` and the `B` block `B.x`.
pub fn export_team(s: &GSystem, team: &Team, a: &VarSet, b: &VarSet, mode: ExportMode) -> Result<TeamTable> {
    a.require_subset_of(s.vars())?;
    b.require_subset_of(s.vars())?;
    let rows = team_rows(s, Some(team), &Budget::new(u64::MAX))?;
    export_rows(s, &rows, a, b, mode)
}

fn export_rows(s: &GSystem, rows: &[Config], a: &VarSet, b: &VarSet, mode: ExportMode) -> Result<TeamTable> {
    let x = s.vars();
    let (columns, split): (Vec<String>, usize) = match mode {
        ExportMode::Concat => (
            x.iter()
                .map(|n| format!("{n}@0"))
                .chain(x.iter().map(|n| format!("{n}@1")))
                .collect(),
            x.len(),
        ),
        ExportMode::TwoColumn => (
            a.iter()
                .map(|n| format!("A.{n}"))
                .chain(b.iter().map(|n| format!("B.{n}")))
                .collect(),
            a.len(),
        ),
    };
    let a_pos = a.positions_in(x)?;
    let b_pos = b.positions_in(x)?;
    let rows = rows
        .iter()
        .map(|g| {
            let out = s.step_values(g.values());
            match mode {
                ExportMode::Concat => g.values().iter().copied().chain(out).collect(),
                ExportMode::TwoColumn => {
                    let mut row = pick(g.values(), &a_pos);
                    row.extend(pick(&out, &b_pos));
                    row
                }
            }
        })
        .collect();
    Ok(TeamTable { columns, split, rows })
}

/// Checks the functional dependency `lhs → rhs` on a table. Returns the
/// violating row pair `(i, j)`, `i < j`, with the least `j` and then the
/// least `i`.
pub fn functional_dependency(table: &TeamTable, lhs: &[usize], rhs: &[usize]) -> Option<(usize, usize)> {
    let mut seen: HashMap<Vec<Elem>, usize> = HashMap::new();
    for (j, row) in table.rows.iter().enumerate() {
        let key = pick(row, lhs);
        match seen.get(&key) {
            Some(&i) if pick(&table.rows[i], rhs) != pick(row, rhs) => return Some((i, j)),
            Some(_) => {}
            None => {
                seen.insert(key, j);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigSet;
    use crate::system::{FnTable, Term, Transition};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn z2() -> Arc<Magma> {
        Arc::new(Magma::cyclic(2).unwrap())
    }

    fn vs(names: &[&str]) -> VarSet {
        VarSet::new(names.iter().copied()).unwrap()
    }

    fn cfg(vars: &VarSet, values: &[Elem]) -> Config {
        Config::new(vars.clone(), values.to_vec()).unwrap()
    }

    fn gamma() -> GSystem {
        let m = z2();
        let max = Arc::new(FnTable::from_fn("max", 2, &m, |a| a[0].max(a[1])).unwrap());
        GSystem::from_rules(
            m,
            vs(&["b0", "b1", "b2", "b3"]),
            vec![
                Term::Var(0),
                Term::Call(max, vec![Term::Var(0), Term::Var(2)]),
                Term::Var(3),
                Term::Var(3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn dependence_on_identity_system() {
        let b = Budget::default();
        let ab = vs(&["a", "b"]);
        let id = GSystem::identity(z2(), ab.clone());
        for checker in dependence_checkers() {
            let r = dep_holds_with(*checker, &id, &vs(&["a"]), &vs(&["a"]), None, &b).unwrap();
            assert!(r.holds, "{}", checker.name());
            let r = dep_holds_with(*checker, &id, &vs(&["a"]), &vs(&["b"]), None, &b).unwrap();
            assert_eq!(
                r,
                AtomResult::dep_fails(cfg(&ab, &[0, 0]), cfg(&ab, &[0, 1])),
                "{}",
                checker.name()
            );
        }
    }

    #[test]
    fn dependence_in_gamma() {
        let b = Budget::default();
        let r = dep_holds(&gamma(), &vs(&["b0", "b1", "b2"]), &vs(&["b1"]), None, &b).unwrap();
        assert!(r.holds);
        let r = dep_holds(&gamma(), &vs(&["b0", "b1"]), &vs(&["b1"]), None, &b).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn unknown_variables_and_checkers() {
        let b = Budget::default();
        let id = GSystem::identity(z2(), vs(&["a"]));
        assert!(matches!(
            dep_holds(&id, &vs(&["z"]), &vs(&["a"]), None, &b),
            Err(Error::UnknownVariable(_))
        ));
        assert!(matches!(dependence_checker("nope"), Err(Error::UnknownStrategy(_))));
        assert_eq!(dependence_checker("pairwise").unwrap().name(), "pairwise");
    }

    #[test]
    fn causal_influence() {
        let b = Budget::default();
        let ab = vs(&["a", "b"]);
        let id = GSystem::identity(z2(), ab.clone());
        let r = cause_holds(&id, &vs(&["a"]), &vs(&["a"]), None, &b).unwrap();
        assert!(r.holds);
        match r.witness {
            Some(AtomWitness::Interventions(list)) => {
                assert_eq!(list.len(), 4);
                assert_eq!(list[0], (cfg(&ab, &[0, 0]), cfg(&vs(&["a"]), &[1])));
            }
            other => panic!("unexpected witness {other:?}"),
        }
        let r = cause_holds(&id, &vs(&["a"]), &vs(&["b"]), None, &b).unwrap();
        assert_eq!(
            r,
            AtomResult {
                holds: false,
                witness: Some(AtomWitness::Unmoved(cfg(&ab, &[0, 0])))
            }
        );
        let r = cause_holds(&gamma(), &vs(&["b3"]), &vs(&["b2"]), None, &b).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn interventions_leaving_the_domain_are_skipped() {
        let b = Budget::default();
        let ab = vs(&["a", "b"]);
        // H = {(0,0), (1,1)}, identity: moving `a` alone always leaves H.
        let h = ConfigSet::new(ab.clone(), [cfg(&ab, &[0, 0]), cfg(&ab, &[1, 1])]).unwrap();
        let s = GSystem::new(
            z2(),
            ab.clone(),
            Transition::Rules(vec![Term::Var(0), Term::Var(1)]),
            Some(h),
        )
        .unwrap();
        let r = cause_holds(&s, &vs(&["a"]), &vs(&["a"]), None, &b).unwrap();
        assert!(!r.holds);
        let r = cause_holds(&s, &ab, &vs(&["a"]), None, &b).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn team_export() {
        let a = vs(&["a"]);
        let id = GSystem::identity(z2(), a.clone());
        let team = ConfigSet::new(a.clone(), [cfg(&a, &[0]), cfg(&a, &[1])]).unwrap();
        let t = export_team(&id, &team, &a, &a, ExportMode::Concat).unwrap();
        assert_eq!(t.columns, vec!["a@0", "a@1"]);
        assert_eq!(t.rows, vec![vec![0, 0], vec![1, 1]]);
        let t = export_team(&id, &team, &a, &a, ExportMode::TwoColumn).unwrap();
        assert_eq!(t.columns, vec!["A.a", "B.a"]);
        assert_eq!(t.rows, vec![vec![0, 0], vec![1, 1]]);
        let empty = ConfigSet::empty(a.clone());
        assert!(export_team(&id, &empty, &a, &a, ExportMode::Concat)
            .unwrap()
            .rows
            .is_empty());
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

    #[test]
    fn identity_system_oracles() {
        // dep(A;B) over the full team iff B ⊆ A; c(A,B) iff A ∩ B ≠ ∅.
        let b = Budget::default();
        for m in [Magma::cyclic(2).unwrap(), Magma::chain_join(3).unwrap()] {
            let m = Arc::new(m);
            for n in 0..=3 {
                let x = VarSet::new((0..n).map(|i| format!("x{i}"))).unwrap();
                let id = GSystem::identity(m.clone(), x.clone());
                for am in 0..(1u32 << n) {
                    for bm in 0..(1u32 << n) {
                        let (a, bb) = (subset(&x, am), subset(&x, bm));
                        let dep = dep_holds(&id, &a, &bb, None, &b).unwrap().holds;
                        assert_eq!(dep, bm & !am == 0);
                        let cause = cause_holds(&id, &a, &bb, None, &b).unwrap().holds;
                        assert_eq!(cause, am & bm != 0);
                    }
                }
            }
        }
    }

    fn arb_instance() -> impl Strategy<Value = (GSystem, Vec<usize>, u32, u32)> {
        (1usize..=3, 1usize..=3).prop_flat_map(|(g, n)| {
            let m = Arc::new(Magma::cyclic(g).unwrap());
            let x = VarSet::new((0..n).map(|i| format!("x{i}"))).unwrap();
            let rows = g.pow(n as u32);
            (
                crate::system::tests::arb_table_system(m, x),
                proptest::collection::vec(0..rows, 0..=rows),
                0u32..(1 << n),
                0u32..(1 << n),
            )
        })
    }

    proptest! {
        #[test]
        fn checkers_agree((s, picks, am, bm) in arb_instance()) {
            let b = Budget::default();
            let space = ConfigSpace::new(s.magma(), s.vars(), &b).unwrap();
            let team = ConfigSet::new(s.vars().clone(), picks.iter().map(|&i| space.config(i))).unwrap();
            let (a, bb) = (subset(s.vars(), am), subset(s.vars(), bm));
            let results: Vec<AtomResult> = dependence_checkers()
                .iter()
                .map(|c| dep_holds_with(*c, &s, &a, &bb, Some(&team), &b).unwrap())
                .collect();
            prop_assert!(results.windows(2).all(|w| w[0] == w[1]));
        }

        #[test]
        fn dep_is_downward_closed((s, picks, am, bm) in arb_instance(), drop in any::<u64>()) {
            let b = Budget::default();
            let space = ConfigSpace::new(s.magma(), s.vars(), &b).unwrap();
            let team = ConfigSet::new(s.vars().clone(), picks.iter().map(|&i| space.config(i))).unwrap();
            let sub = ConfigSet::new(
                s.vars().clone(),
                team.iter().enumerate().filter(|(i, _)| drop & (1 << (i % 64)) == 0).map(|(_, g)| g.clone()),
            ).unwrap();
            let (a, bb) = (subset(s.vars(), am), subset(s.vars(), bm));
            if dep_holds(&s, &a, &bb, Some(&team), &b).unwrap().holds {
                prop_assert!(dep_holds(&s, &a, &bb, Some(&sub), &b).unwrap().holds);
            }
            if cause_holds(&s, &a, &bb, Some(&team), &b).unwrap().holds {
                prop_assert!(cause_holds(&s, &a, &bb, Some(&sub), &b).unwrap().holds);
            }
        }
    }
}
