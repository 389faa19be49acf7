//! The coupling operator `α * β`, glued coupling along a bijection, star
//! sets `H0 * H1`, and the closure conditions that make restricted-domain
//! coupling well defined.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::budget::Budget;
use crate::config::{Config, ConfigSet, ConfigSpace, VarSet};
use crate::error::{Error, Result};
use crate::magma::{Elem, Magma};
use crate::system::{GSystem, Term, Transition};
use crate::{Side, Verdict};

/// Positions needed to evaluate `α * β` on value vectors over `Z = X ∪ Y`.
struct Layout {
    /// Position in `Z` of each variable of `X`.
    x_pos: Vec<usize>,
    /// Position in `Z` of each variable of `Y`.
    y_pos: Vec<usize>,
    /// For each `z`, its index in `X` and in `Y` (if any).
    sources: Vec<(Option<usize>, Option<usize>)>,
}

impl Layout {
    fn new(x: &VarSet, y: &VarSet, z: &VarSet) -> Result<Self> {
        let x_pos = x.positions_in(z)?;
        let y_pos = y.positions_in(z)?;
        let sources = z.iter().map(|n| (x.index_of(n), y.index_of(n))).collect();
        Ok(Layout { x_pos, y_pos, sources })
    }

    fn eval(&self, sx: &GSystem, sy: &GSystem, values: &[Elem]) -> Vec<Elem> {
        let gx: Vec<Elem> = self.x_pos.iter().map(|&i| values[i]).collect();
        let gy: Vec<Elem> = self.y_pos.iter().map(|&i| values[i]).collect();
        let ox = sx.step_values(&gx);
        let oy = sy.step_values(&gy);
        let m = sx.magma();
        self.sources
            .iter()
            .map(|src| match *src {
                (Some(i), Some(j)) => m.op(ox[i], oy[j]),
                (Some(i), None) => ox[i],
                (None, Some(j)) => oy[j],
                (None, None) => unreachable!("every coupled variable comes from a side"),
            })
            .collect()
    }
}

/// `H0 * H1`: configurations over `X ∪ Y` whose restrictions lie in `H0`
/// and `H1`.
pub fn star_set(h0: &ConfigSet, h1: &ConfigSet) -> Result<ConfigSet> {
    let overlap = h0.vars().intersection(h1.vars());
    let mut by_overlap: BTreeMap<Vec<Elem>, Vec<&Config>> = BTreeMap::new();
    for g in h1.iter() {
        by_overlap
            .entry(g.restrict(&overlap)?.values().to_vec())
            .or_default()
            .push(g);
    }
    let z = h0.vars().union(h1.vars());
    let mut out = ConfigSet::empty(z);
    for g in h0.iter() {
        let key = g.restrict(&overlap)?;
        if let Some(partners) = by_overlap.get(key.values()) {
            for h in partners {
                out.insert(g.merge(h)?)?;
            }
        }
    }
    Ok(out)
}

/// Whether `step` maps `h` into itself; on failure, the first member
/// (in order) together with its image.
pub fn is_closed(h: &ConfigSet, s: &GSystem) -> Result<Verdict<(Config, Config)>> {
    for g in h.iter() {
        let out = s.step(g)?;
        if !h.contains(&out) {
            return Ok(Verdict::fails((g.clone(), out)));
        }
    }
    Ok(Verdict::holds())
}

/// `sx * sy` over `X ∪ Y` (in that order: `X`, then the new members of `Y`).
///
/// Restricted domains couple on the star set of the two domains, which is
/// verified to be closed under the coupled transition.
pub fn couple(sx: &GSystem, sy: &GSystem, budget: &Budget) -> Result<GSystem> {
    if sx.magma() != sy.magma() {
        return Err(Error::MagmaMismatch);
    }
    let m = sx.magma().clone();
    let (x, y) = (sx.vars(), sy.vars());
    let z = x.union(y);
    let layout = Layout::new(x, y, &z)?;

    let domain = match (sx.domain(), sy.domain()) {
        (None, None) => None,
        _ => Some(star_set(&sx.domain_set(budget)?, &sy.domain_set(budget)?)?),
    };

    if let Some(h) = &domain {
        for g in h.iter() {
            let out = layout.eval(sx, sy, g.values());
            let img = Config::new(z.clone(), out)?;
            if !h.contains(&img) {
                return Err(Error::ClosureViolation {
                    from: g.display(&m).to_string(),
                    to: img.display(&m).to_string(),
                });
            }
        }
    }

    match (sx.transition(), sy.transition()) {
        (Transition::Rules(ra), Transition::Rules(rb)) => {
            let rx = |t: &Term| t.map_vars(&|i| Term::Var(layout.x_pos[i]));
            let ry = |t: &Term| t.map_vars(&|j| Term::Var(layout.y_pos[j]));
            let rules = layout
                .sources
                .iter()
                .map(|src| match *src {
                    (Some(i), Some(j)) => Term::op(rx(&ra[i]), ry(&rb[j])),
                    (Some(i), None) => rx(&ra[i]),
                    (None, Some(j)) => ry(&rb[j]),
                    (None, None) => unreachable!(),
                })
                .collect();
            GSystem::new(m, z, Transition::Rules(rules), domain)
        }
        _ => {
            let inputs: Vec<Config> = match &domain {
                Some(h) => h.iter().cloned().collect(),
                None => ConfigSpace::new(&m, &z, budget)?.iter().collect(),
            };
            let table = inputs
                .iter()
                .map(|g| (g.values().to_vec(), layout.eval(sx, sy, g.values())))
                .collect();
            GSystem::new(m, z, Transition::Table(Arc::new(table)), domain)
        }
    }
}

/// A bijection `ζ: A → B` from `A ⊆ X` onto `B ⊆ Y`, as `(a, ζ(a))` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GluingMap {
    pub pairs: Vec<(String, String)>,
}

impl GluingMap {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, S)>) -> Self {
        GluingMap {
            pairs: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        }
    }

    fn validate(&self, x: &VarSet, y: &VarSet) -> Result<()> {
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            if !x.contains(a) {
                return Err(Error::BadGluing(format!("`{a}` is not a variable of {x}")));
            }
            if !y.contains(b) {
                return Err(Error::BadGluing(format!("`{b}` is not a variable of {y}")));
            }
            for (a2, b2) in &self.pairs[..i] {
                if a == a2 {
                    return Err(Error::BadGluing(format!("`{a}` is glued twice")));
                }
                if b == b2 {
                    return Err(Error::BadGluing(format!("`{b}` is a target twice")));
                }
            }
        }
        Ok(())
    }
}

/// Result of a glued coupling: the system over the pushout, plus the name
/// each `Y` variable received there.
#[derive(Debug, Clone)]
pub struct GluedCoupling {
    pub system: GSystem,
    pub y_names: Vec<(String, String)>,
}

/// Couples along `ζ`. Each glued class takes its `X`-side name; unglued
/// `Y` variables keep their name unless it clashes with `X`, in which case
/// they get the first free `name_k` (`k = 2, 3, …`).
pub fn couple_glued(sx: &GSystem, sy: &GSystem, gluing: &GluingMap, budget: &Budget) -> Result<GluedCoupling> {
    if sx.magma() != sy.magma() {
        return Err(Error::MagmaMismatch);
    }
    let (x, y) = (sx.vars(), sy.vars());
    gluing.validate(x, y)?;
    let mut taken: Vec<String> = x.names().to_vec();
    let mut y_names = Vec::with_capacity(y.len());
    for n in y.iter() {
        let new = if let Some((a, _)) = gluing.pairs.iter().find(|(_, b)| b == n) {
            a.clone()
        } else if x.contains(n) || taken.iter().any(|t| t == n) {
            (2..)
                .map(|k| format!("{n}_{k}"))
                .find(|c| !taken.contains(c) && !y.contains(c))
                .expect("unbounded suffix search")
        } else {
            n.to_string()
        };
        taken.push(new.clone());
        y_names.push((n.to_string(), new));
    }
    let renamed = sy.renamed(VarSet::new(y_names.iter().map(|(_, n)| n.clone()))?)?;
    Ok(GluedCoupling {
        system: couple(sx, &renamed, budget)?,
        y_names,
    })
}

/// Witness against the first closure condition: translating `member` by
/// the overlap contribution of `source` leaves the member's set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition1Witness {
    /// The set that fails to be closed.
    pub side: Side,
    pub member: Config,
    pub source: Config,
    pub image: Config,
}

/// `H0` closed under `h ↦ h + β(h')↾(X∩Y)` for all `h' ∈ H1`, and `H1`
/// closed under `h' ↦ h' + α(h)↾(X∩Y)` for all `h ∈ H0`.
pub fn check_closure_condition1(
    h0: &ConfigSet,
    h1: &ConfigSet,
    sx: &GSystem,
    sy: &GSystem,
) -> Result<Verdict<Condition1Witness>> {
    let m = sx.magma();
    let overlap = h0.vars().intersection(h1.vars());
    let sides = [(Side::X, h0, h1, sy), (Side::Y, h1, h0, sx)];
    for (side, target, sources, sys) in sides {
        for src in sources.iter() {
            let contribution = sys.step(src)?.restrict(&overlap)?;
            for member in target.iter() {
                let image = member.translate(&contribution, m)?;
                if !target.contains(&image) {
                    return Ok(Verdict::fails(Condition1Witness {
                        side,
                        member: member.clone(),
                        source: src.clone(),
                        image,
                    }));
                }
            }
        }
    }
    Ok(Verdict::holds())
}

/// Witness against the second closure condition: a translation by `shift`
/// that moves `member` out of its set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition2Witness {
    pub side: Side,
    pub shift: Config,
    pub member: Config,
    pub image: Config,
}

/// `H0` and `H1` invariant under translation by every `t ∈ G^overlap`.
pub fn check_closure_condition2(
    h0: &ConfigSet,
    h1: &ConfigSet,
    overlap: &VarSet,
    m: &Magma,
    budget: &Budget,
) -> Result<Verdict<Condition2Witness>> {
    let shifts = ConfigSpace::new(m, overlap, budget)?;
    for (side, h) in [(Side::X, h0), (Side::Y, h1)] {
        for t in shifts.iter() {
            for member in h.iter() {
                let image = member.translate(&t, m)?;
                if !h.contains(&image) {
                    return Ok(Verdict::fails(Condition2Witness {
                        side,
                        shift: t,
                        member: member.clone(),
                        image,
                    }));
                }
            }
        }
    }
    Ok(Verdict::holds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{systems_equal, FnTable};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z2() -> Arc<Magma> {
        Arc::new(Magma::cyclic(2).unwrap())
    }

    fn vs(names: &[&str]) -> VarSet {
        VarSet::new(names.iter().copied()).unwrap()
    }

    fn cfg(vars: &VarSet, values: &[Elem]) -> Config {
        Config::new(vars.clone(), values.to_vec()).unwrap()
    }

    fn random_system(rng: &mut ChaCha8Rng, m: &Arc<Magma>, vars: &VarSet) -> GSystem {
        let n = m.size() as Elem;
        GSystem::from_fn(m.clone(), vars.clone(), None, &Budget::default(), |_| {
            Config::new(vars.clone(), (0..vars.len()).map(|_| rng.gen_range(0..n)).collect()).unwrap()
        })
        .unwrap()
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
    fn overlap_of_identities_cancels() {
        let b = Budget::default();
        let a = vs(&["a"]);
        let id = GSystem::identity(z2(), a.clone());
        let c = couple(&id, &id, &b).unwrap();
        assert!(
            systems_equal(&c, &GSystem::constant(z2(), a, 0).unwrap(), &b)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn theorem3_factors_couple_to_gamma() {
        let b = Budget::default();
        let m = z2();
        let max = Arc::new(FnTable::from_fn("max", 2, &m, |a| a[0].max(a[1])).unwrap());
        let alpha = GSystem::from_rules(
            m.clone(),
            vs(&["b0", "b1", "b2"]),
            vec![
                Term::Var(0),
                Term::Call(max, vec![Term::Var(0), Term::Var(2)]),
                Term::Const(0),
            ],
        )
        .unwrap();
        let beta = GSystem::from_rules(
            m,
            vs(&["b1", "b2", "b3"]),
            vec![Term::Const(0), Term::Var(2), Term::Var(2)],
        )
        .unwrap();
        let c = couple(&alpha, &beta, &b).unwrap();
        assert_eq!(c.vars(), &vs(&["b0", "b1", "b2", "b3"]));
        assert!(!c.is_tabulated());
        assert!(systems_equal(&c, &gamma(), &b).unwrap().holds);
        let ct = couple(&alpha.tabulate(&b).unwrap(), &beta, &b).unwrap();
        assert!(ct.is_tabulated());
        assert!(systems_equal(&ct, &gamma(), &b).unwrap().holds);
    }

    #[test]
    fn disjoint_coupling_acts_per_side() {
        let b = Budget::default();
        let flip = GSystem::from_rules(z2(), vs(&["a"]), vec![Term::op(Term::Var(0), Term::Const(1))]).unwrap();
        let id = GSystem::identity(z2(), vs(&["b"]));
        let c = couple(&flip, &id, &b).unwrap();
        let v = vs(&["a", "b"]);
        for (i, o) in [([0, 0], [1, 0]), ([0, 1], [1, 1]), ([1, 0], [0, 0]), ([1, 1], [0, 1])] {
            assert_eq!(c.step(&cfg(&v, &i)).unwrap(), cfg(&v, &o));
        }
    }

    #[test]
    fn magma_mismatch() {
        let b = Budget::default();
        let a = GSystem::identity(z2(), vs(&["a"]));
        let c = GSystem::identity(Arc::new(Magma::cyclic(3).unwrap()), vs(&["a"]));
        assert!(matches!(couple(&a, &c, &b), Err(Error::MagmaMismatch)));
        assert!(matches!(
            couple_glued(&a, &c, &GluingMap::default(), &b),
            Err(Error::MagmaMismatch)
        ));
    }

    #[test]
    fn star_sets() {
        let a = vs(&["a"]);
        let h0 = ConfigSet::new(a.clone(), [cfg(&a, &[0])]).unwrap();
        let h1 = ConfigSet::new(a.clone(), [cfg(&a, &[0]), cfg(&a, &[1])]).unwrap();
        assert_eq!(star_set(&h0, &h1).unwrap(), h0);

        let bv = vs(&["b"]);
        let hb = ConfigSet::new(bv.clone(), [cfg(&bv, &[0]), cfg(&bv, &[1])]).unwrap();
        let prod = star_set(&h1, &hb).unwrap();
        assert_eq!(prod.len(), 4);
        assert_eq!(prod.vars(), &vs(&["a", "b"]));

        let ab = vs(&["a", "b"]);
        let bc = vs(&["b", "c"]);
        let p = ConfigSet::new(ab.clone(), [cfg(&ab, &[0, 0])]).unwrap();
        let q = ConfigSet::new(bc.clone(), [cfg(&bc, &[1, 0])]).unwrap();
        assert!(star_set(&p, &q).unwrap().is_empty());
    }

    #[test]
    fn closure_of_sets_under_gamma() {
        let b = Budget::default();
        let g = gamma();
        let v = g.vars().clone();
        assert!(is_closed(&g.domain_set(&b).unwrap(), &g).unwrap().holds);
        let fixed = ConfigSet::new(v.clone(), [cfg(&v, &[0, 0, 0, 0]), cfg(&v, &[1, 1, 1, 1])]).unwrap();
        assert!(is_closed(&fixed, &g).unwrap().holds);
        let single = ConfigSet::new(v.clone(), [cfg(&v, &[1, 0, 0, 1])]).unwrap();
        assert_eq!(
            is_closed(&single, &g).unwrap(),
            Verdict::fails((cfg(&v, &[1, 0, 0, 1]), cfg(&v, &[1, 1, 1, 1])))
        );
    }

    #[test]
    fn restricted_coupling_checks_the_star_set() {
        let b = Budget::default();
        let a = vs(&["a"]);
        let bv = vs(&["b"]);
        let only0 = ConfigSet::new(a.clone(), [cfg(&a, &[0])]).unwrap();
        let sx = GSystem::new(z2(), a.clone(), Transition::Rules(vec![Term::Var(0)]), Some(only0)).unwrap();
        let sy = GSystem::identity(z2(), bv.clone());
        let c = couple(&sx, &sy, &b).unwrap();
        assert_eq!(c.domain().unwrap().len(), 2);

        // Overlap {a}: sx pins a to 0 on H0 = {0}, sy flips a; 0 • 1 = 1 leaves H0.
        let flip = GSystem::from_rules(z2(), a.clone(), vec![Term::op(Term::Var(0), Term::Const(1))]).unwrap();
        assert!(matches!(couple(&sx, &flip, &b), Err(Error::ClosureViolation { .. })));
    }

    #[test]
    fn glued_coupling() {
        let b = Budget::default();
        let ida = GSystem::identity(z2(), vs(&["a"]));
        let idb = GSystem::identity(z2(), vs(&["b"]));

        let disjoint = couple_glued(&ida, &idb, &GluingMap::default(), &b).unwrap();
        assert!(
            systems_equal(&disjoint.system, &couple(&ida, &idb, &b).unwrap(), &b)
                .unwrap()
                .holds
        );

        let glued = couple_glued(&ida, &idb, &GluingMap::new([("a", "b")]), &b).unwrap();
        assert_eq!(glued.system.vars(), &vs(&["a"]));
        assert_eq!(glued.y_names, vec![("b".to_string(), "a".to_string())]);
        assert!(
            systems_equal(&glued.system, &GSystem::constant(z2(), vs(&["a"]), 0).unwrap(), &b)
                .unwrap()
                .holds
        );

        // Same-named unglued variables stay distinct in the pushout.
        let clash = couple_glued(&ida, &ida, &GluingMap::default(), &b).unwrap();
        assert_eq!(clash.system.vars(), &vs(&["a", "a_2"]));

        assert!(matches!(
            couple_glued(&ida, &idb, &GluingMap::new([("a", "b"), ("a", "b")]), &b),
            Err(Error::BadGluing(_))
        ));
        assert!(matches!(
            couple_glued(&ida, &idb, &GluingMap::new([("q", "b")]), &b),
            Err(Error::BadGluing(_))
        ));
    }

    #[test]
    fn gluing_reproduces_plain_coupling_after_renaming() {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = Arc::new(Magma::cyclic(3).unwrap());
        for _ in 0..20 {
            let sx = random_system(&mut rng, &m, &vs(&["a", "s"]));
            let sy = random_system(&mut rng, &m, &vs(&["s", "c"]));
            let plain = couple(&sx, &sy, &b).unwrap();
            // The same Y system with its shared variable under another name.
            let sy2 = sy.renamed(vs(&["t", "c"])).unwrap();
            let glued = couple_glued(&sx, &sy2, &GluingMap::new([("s", "t")]), &b).unwrap();
            assert_eq!(glued.system.vars(), plain.vars());
            assert!(systems_equal(&glued.system, &plain, &b).unwrap().holds);
        }
    }

    #[test]
    fn closure_conditions() {
        let b = Budget::default();
        let m = z2();
        let a = vs(&["a"]);
        let bv = vs(&["b"]);
        let full_a = ConfigSet::full(&m, &a, &b).unwrap();
        let full_b = ConfigSet::full(&m, &bv, &b).unwrap();
        let ida = GSystem::identity(m.clone(), a.clone());
        let idb = GSystem::identity(m.clone(), bv.clone());
        assert!(check_closure_condition1(&full_a, &full_b, &ida, &idb).unwrap().holds);
        assert!(
            check_closure_condition2(&full_a, &full_b, &VarSet::empty(), &m, &b)
                .unwrap()
                .holds
        );

        let ab = vs(&["a", "b"]);
        let bc = vs(&["b", "c"]);
        let full_ab = ConfigSet::full(&m, &ab, &b).unwrap();
        let full_bc = ConfigSet::full(&m, &bc, &b).unwrap();
        let sx = GSystem::identity(m.clone(), ab.clone());
        let sy = GSystem::identity(m.clone(), bc.clone());
        assert!(check_closure_condition1(&full_ab, &full_bc, &sx, &sy).unwrap().holds);
        assert!(
            check_closure_condition2(&full_ab, &full_bc, &vs(&["b"]), &m, &b)
                .unwrap()
                .holds
        );

        // Singleton H0 = {a=0,b=0}; the Y side contributes b=1 from h'=(b=1,c=0).
        let single = ConfigSet::new(ab.clone(), [cfg(&ab, &[0, 0])]).unwrap();
        let v1 = check_closure_condition1(&single, &full_bc, &sx, &sy).unwrap();
        assert!(!v1.holds);
        let w = v1.witness.unwrap();
        assert_eq!(w.side, Side::X);
        assert_eq!(w.image, cfg(&ab, &[0, 1]));

        let v2 = check_closure_condition2(&single, &full_bc, &vs(&["b"]), &m, &b).unwrap();
        assert_eq!(
            v2,
            Verdict::fails(Condition2Witness {
                side: Side::X,
                shift: cfg(&vs(&["b"]), &[1]),
                member: cfg(&ab, &[0, 0]),
                image: cfg(&ab, &[0, 1]),
            })
        );
    }

    #[test]
    fn identity_rewrite_of_coupling() {
        // With an identity element, α*β(g) = zero_extend(α(g↾X)) • zero_extend(β(g↾Y)).
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [
            Magma::cyclic(3).unwrap(),
            Magma::chain_join(3).unwrap(),
            Magma::chain_meet(2).unwrap(),
        ] {
            let m = Arc::new(m);
            let (x, y) = (vs(&["p", "q"]), vs(&["q", "r"]));
            for _ in 0..10 {
                let sx = random_system(&mut rng, &m, &x);
                let sy = random_system(&mut rng, &m, &y);
                let c = couple(&sx, &sy, &b).unwrap();
                for g in ConfigSpace::new(&m, c.vars(), &b).unwrap().iter() {
                    let ax = sx
                        .step(&g.restrict(&x).unwrap())
                        .unwrap()
                        .zero_extend(c.vars(), &m)
                        .unwrap();
                    let by = sy
                        .step(&g.restrict(&y).unwrap())
                        .unwrap()
                        .zero_extend(c.vars(), &m)
                        .unwrap();
                    let expect: Vec<Elem> = ax.values().iter().zip(by.values()).map(|(&u, &v)| m.op(u, v)).collect();
                    assert_eq!(c.step(&g).unwrap().values(), &expect[..]);
                }
            }
        }
    }
}
