//! Reducibility of a system to a two-set cover, the two quadruple
//! conditions that characterise it for abelian groups, and verification of
//! emergence witnesses.
//!
//! A system `γ` over `Z = X ∪ Y` is reducible when `γ = α * β` for some
//! `α` on `G^X` and `β` on `G^Y`. Coordinates outside the overlap must
//! depend on one side only. An overlap coordinate `z` must factor as
//! `F(a, m, b) = u(a, m) • v(m, b)`, where `a`, `m` and `b` range over
//! `G^(X∖Y)`, `G^(X∩Y)` and `G^(Y∖X)`. That factorisation is delegated
//! to an [`OverlapSolver`].

use serde_json::{json, Value};

use crate::atoms::{dep_holds, AtomWitness};
use crate::budget::Budget;
use crate::config::{Config, ConfigSet, ConfigSpace, VarSet};
use crate::coupling::couple;
use crate::error::{Error, Result};
use crate::magma::{Elem, Magma};
use crate::system::{systems_equal, GSystem};
use crate::{Side, Verdict};

/// `{X, Y}` with `X ∪ Y` equal to the ambient variable set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    x: VarSet,
    y: VarSet,
}

impl Cover {
    pub fn new(x: VarSet, y: VarSet, ambient: &VarSet) -> Result<Self> {
        x.require_subset_of(ambient)?;
        y.require_subset_of(ambient)?;
        if !x.union(&y).same_members(ambient) {
            return Err(Error::VarSetMismatch(format!("{x} ∪ {y} does not cover {ambient}")));
        }
        Ok(Cover { x, y })
    }

    pub fn x(&self) -> &VarSet {
        &self.x
    }

    pub fn y(&self) -> &VarSet {
        &self.y
    }

    pub fn x_only(&self) -> VarSet {
        self.x.difference(&self.y)
    }

    pub fn overlap(&self) -> VarSet {
        self.x.intersection(&self.y)
    }

    pub fn y_only(&self) -> VarSet {
        self.y.difference(&self.x)
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub sx: GSystem,
    pub sy: GSystem,
}

/// Why a system is not reducible. Every variant can be re-checked with
/// [`Certificate::recheck`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// A coordinate outside the overlap whose image depends on the other
    /// side: `g0` and `g1` agree on `side` but their images differ at it.
    SideDependence {
        coordinate: String,
        side: Side,
        g0: Config,
        g1: Config,
    },
    /// For abelian groups, an additive factorisation forces
    /// `F(a,m,b) + F(a*,m,b*) = F(a,m,b*) + F(a*,m,b)`; this instance breaks it.
    Rectangle {
        coordinate: String,
        a: Config,
        m: Config,
        b: Config,
        a_ref: Config,
        b_ref: Config,
    },
    /// No pair of factor tables reproduces the slice `m` of the coordinate.
    Unfactorable { coordinate: String, m: Config },
}

#[derive(Debug, Clone)]
pub enum Reducibility {
    Reducible(Decomposition),
    Irreducible(Certificate),
}

impl Reducibility {
    pub fn is_reducible(&self) -> bool {
        matches!(self, Reducibility::Reducible(_))
    }
}

/// Values of one overlap coordinate, `F[(a * r + m) * q + b]`.
#[derive(Debug, Clone)]
pub struct OverlapTable {
    pub p: usize,
    pub r: usize,
    pub q: usize,
    pub values: Vec<Elem>,
}

impl OverlapTable {
    #[inline]
    pub fn at(&self, a: usize, m: usize, b: usize) -> Elem {
        self.values[(a * self.r + m) * self.q + b]
    }
}

/// `u` indexed by `a * r + m`, `v` indexed by `m * q + b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factors {
    pub u: Vec<Elem>,
    pub v: Vec<Elem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapFailure {
    Rectangle { a: usize, m: usize, b: usize },
    Unfactorable { m: usize },
}

/// A strategy for factoring an overlap coordinate.
pub trait OverlapSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn supports(&self, m: &Magma) -> bool;

    fn solve(
        &self,
        table: &OverlapTable,
        m: &Magma,
        budget: &Budget,
    ) -> Result<std::result::Result<Factors, OverlapFailure>>;
}

/// Abelian groups only. References `a* = b* = 0` (the least index);
/// `u(a,m) = F(a,m,b*)` and `v(m,b) = F(a*,m,b) − F(a*,m,b*)`.
pub struct RectangleSolver;

/// Any magma. For each overlap slice, enumerates the factor tables of the
/// smaller outer side and solves the other side pointwise.
pub struct ExhaustiveSolver;

impl OverlapSolver for RectangleSolver {
    fn name(&self) -> &'static str {
        "rectangle"
    }

    fn supports(&self, m: &Magma) -> bool {
        m.is_abelian_group()
    }

    fn solve(
        &self,
        t: &OverlapTable,
        m: &Magma,
        _budget: &Budget,
    ) -> Result<std::result::Result<Factors, OverlapFailure>> {
        if !self.supports(m) {
            return Err(Error::Unsupported("the rectangle solver needs an abelian group".into()));
        }
        for a in 0..t.p {
            for mm in 0..t.r {
                for b in 0..t.q {
                    let lhs = m.op(t.at(a, mm, b), t.at(0, mm, 0));
                    let rhs = m.op(t.at(a, mm, 0), t.at(0, mm, b));
                    if lhs != rhs {
                        return Ok(Err(OverlapFailure::Rectangle { a, m: mm, b }));
                    }
                }
            }
        }
        let u = (0..t.p)
            .flat_map(|a| (0..t.r).map(move |mm| (a, mm)))
            .map(|(a, mm)| t.at(a, mm, 0))
            .collect();
        let v = (0..t.r)
            .flat_map(|mm| (0..t.q).map(move |b| (mm, b)))
            .map(|(mm, b)| {
                let base = m.inverse(t.at(0, mm, 0)).expect("group elements are invertible");
                m.op(t.at(0, mm, b), base)
            })
            .collect();
        Ok(Ok(Factors { u, v }))
    }
}

impl OverlapSolver for ExhaustiveSolver {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn supports(&self, _m: &Magma) -> bool {
        true
    }

    fn solve(
        &self,
        t: &OverlapTable,
        m: &Magma,
        budget: &Budget,
    ) -> Result<std::result::Result<Factors, OverlapFailure>> {
        let n = m.size();
        let enumerate_u = t.p <= t.q;
        let side = if enumerate_u { t.p } else { t.q };
        let per_slice = (n as u128).checked_pow(side as u32).unwrap_or(u128::MAX);
        let candidates = per_slice.saturating_mul(t.r as u128);
        if candidates > budget.factor_search_cap() as u128 {
            return Err(Error::SearchInfeasible {
                candidates,
                cap: budget.factor_search_cap(),
            });
        }
        let mut u = vec![0; t.p * t.r];
        let mut v = vec![0; t.r * t.q];
        for mm in 0..t.r {
            match factor_slice(t, m, mm, enumerate_u) {
                Some((us, vs)) => {
                    for (a, x) in us.into_iter().enumerate() {
                        u[a * t.r + mm] = x;
                    }
                    for (b, y) in vs.into_iter().enumerate() {
                        v[mm * t.q + b] = y;
                    }
                }
                None => return Ok(Err(OverlapFailure::Unfactorable { m: mm })),
            }
        }
        Ok(Ok(Factors { u, v }))
    }
}

/// First factorisation `F(·, mm, ·) = u(·) • v(·)` in enumeration order of
/// the enumerated side.
fn factor_slice(t: &OverlapTable, m: &Magma, mm: usize, enumerate_u: bool) -> Option<(Vec<Elem>, Vec<Elem>)> {
    let n = m.size();
    let carrier: Vec<Elem> = (0..n as Elem).collect();
    let len = if enumerate_u { t.p } else { t.q };
    let mut cand = vec![0 as Elem; len];
    loop {
        let solved: Option<Vec<Elem>> = if enumerate_u {
            (0..t.q)
                .map(|b| {
                    carrier
                        .iter()
                        .copied()
                        .find(|&c| (0..t.p).all(|a| m.op(cand[a], c) == t.at(a, mm, b)))
                })
                .collect()
        } else {
            (0..t.p)
                .map(|a| {
                    carrier
                        .iter()
                        .copied()
                        .find(|&c| (0..t.q).all(|b| m.op(c, cand[b]) == t.at(a, mm, b)))
                })
                .collect()
        };
        if let Some(other) = solved {
            return Some(if enumerate_u { (cand, other) } else { (other, cand) });
        }
        // next candidate, lexicographic
        let mut i = len;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            cand[i] += 1;
            if (cand[i] as usize) < n {
                break;
            }
            cand[i] = 0;
        }
    }
}

static SOLVERS: [&dyn OverlapSolver; 2] = [&RectangleSolver, &ExhaustiveSolver];

pub fn overlap_solvers() -> &'static [&'static dyn OverlapSolver] {
    &SOLVERS
}

pub fn overlap_solver(name: &str) -> Result<&'static dyn OverlapSolver> {
    SOLVERS
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
}

/// Rectangle solver for abelian groups, exhaustive search otherwise.
pub fn default_overlap_solver(m: &Magma) -> &'static dyn OverlapSolver {
    if RectangleSolver.supports(m) {
        &RectangleSolver
    } else {
        &ExhaustiveSolver
    }
}

/// Index bookkeeping for splitting `G^Z` into `(a, m, b)` parts.
struct Split {
    xo: VarSet,
    ov: VarSet,
    yo: VarSet,
    xo_pos: Vec<usize>,
    ov_pos: Vec<usize>,
    yo_pos: Vec<usize>,
    xo_space: ConfigSpace,
    ov_space: ConfigSpace,
    yo_space: ConfigSpace,
    z_space: ConfigSpace,
    n: usize,
}

impl Split {
    fn new(s: &GSystem, cover: &Cover, budget: &Budget) -> Result<Self> {
        let z = s.vars();
        let m = s.magma();
        let (xo, ov, yo) = (cover.x_only(), cover.overlap(), cover.y_only());
        Ok(Split {
            xo_pos: xo.positions_in(z)?,
            ov_pos: ov.positions_in(z)?,
            yo_pos: yo.positions_in(z)?,
            xo_space: ConfigSpace::new(m, &xo, budget)?,
            ov_space: ConfigSpace::new(m, &ov, budget)?,
            yo_space: ConfigSpace::new(m, &yo, budget)?,
            z_space: ConfigSpace::new(m, z, budget)?,
            n: m.size(),
            xo,
            ov,
            yo,
        })
    }

    fn assemble(&self, a: &Config, mm: &Config, b: &Config) -> Vec<Elem> {
        let mut values = vec![0; self.z_space.vars().len()];
        for (&p, &v) in self.xo_pos.iter().zip(a.values()) {
            values[p] = v;
        }
        for (&p, &v) in self.ov_pos.iter().zip(mm.values()) {
            values[p] = v;
        }
        for (&p, &v) in self.yo_pos.iter().zip(b.values()) {
            values[p] = v;
        }
        values
    }

    fn index(&self, a: usize, mm: usize, b: usize) -> usize {
        let values = self.assemble(
            &self.xo_space.config(a),
            &self.ov_space.config(mm),
            &self.yo_space.config(b),
        );
        crate::config::index_of_values(&values, self.n)
    }
}

/// Decides whether `s` is reducible to `cover`, using the default overlap
/// solver for the magma.
pub fn decide_reducible(s: &GSystem, cover: &Cover, budget: &Budget) -> Result<Reducibility> {
    decide_reducible_with(default_overlap_solver(s.magma()), s, cover, budget)
}

pub fn decide_reducible_with(
    solver: &dyn OverlapSolver,
    s: &GSystem,
    cover: &Cover,
    budget: &Budget,
) -> Result<Reducibility> {
    if s.domain().is_some() {
        return Err(Error::Unsupported(
            "reducibility is decided for systems on all of G^Z".into(),
        ));
    }
    let cover = Cover::new(cover.x.clone(), cover.y.clone(), s.vars())?;
    let m = s.magma().clone();
    let split = Split::new(s, &cover, budget)?;
    let z = s.vars().clone();
    let images: Vec<Vec<Elem>> = split.z_space.iter().map(|g| s.step_values(g.values())).collect();
    let (p, r, q) = (split.xo_space.len(), split.ov_space.len(), split.yo_space.len());

    let mut overlap_factors: Vec<(usize, Factors)> = Vec::new();
    for (zi, name) in z.iter().enumerate() {
        let (in_x, in_y) = (cover.x.contains(name), cover.y.contains(name));
        if in_x && in_y {
            let mut values = Vec::with_capacity(p * r * q);
            for a in 0..p {
                for mm in 0..r {
                    for b in 0..q {
                        values.push(images[split.index(a, mm, b)][zi]);
                    }
                }
            }
            let table = OverlapTable { p, r, q, values };
            match solver.solve(&table, &m, budget)? {
                Ok(f) => overlap_factors.push((zi, f)),
                Err(OverlapFailure::Rectangle { a, m: mm, b }) => {
                    return Ok(Reducibility::Irreducible(Certificate::Rectangle {
                        coordinate: name.to_string(),
                        a: split.xo_space.config(a),
                        m: split.ov_space.config(mm),
                        b: split.yo_space.config(b),
                        a_ref: split.xo_space.config(0),
                        b_ref: split.yo_space.config(0),
                    }))
                }
                Err(OverlapFailure::Unfactorable { m: mm }) => {
                    return Ok(Reducibility::Irreducible(Certificate::Unfactorable {
                        coordinate: name.to_string(),
                        m: split.ov_space.config(mm),
                    }))
                }
            }
        } else {
            let (side, own) = if in_x { (Side::X, &cover.x) } else { (Side::Y, &cover.y) };
            let target = VarSet::new([name])?;
            let r = dep_holds(s, own, &target, None, budget)?;
            if let Some(AtomWitness::Pair { g0, g1 }) = r.witness {
                return Ok(Reducibility::Irreducible(Certificate::SideDependence {
                    coordinate: name.to_string(),
                    side,
                    g0,
                    g1,
                }));
            }
        }
    }

    // Build α on G^X and β on G^Y from the reference points a* = b* = 0.
    let zero_a = split.xo_space.config(0);
    let zero_b = split.yo_space.config(0);
    let ov_space = &split.ov_space;
    let factor_of = |zi: usize| &overlap_factors.iter().find(|(i, _)| *i == zi).unwrap().1;

    let x = cover.x.clone();
    let sx = GSystem::from_fn(m.clone(), x.clone(), None, budget, |gx| {
        let a = gx.restrict(&split.xo).unwrap();
        let mm = gx.restrict(&split.ov).unwrap();
        let (ai, mi) = (split.xo_space.index_of(&a), ov_space.index_of(&mm));
        let full = &images[crate::config::index_of_values(&split.assemble(&a, &mm, &zero_b), m.size())];
        let values = x
            .iter()
            .map(|n| {
                let zi = z.index_of(n).unwrap();
                if cover.y.contains(n) {
                    factor_of(zi).u[ai * r + mi]
                } else {
                    full[zi]
                }
            })
            .collect();
        Config::new(x.clone(), values).unwrap()
    })?;
    let y = cover.y.clone();
    let sy = GSystem::from_fn(m.clone(), y.clone(), None, budget, |gy| {
        let mm = gy.restrict(&split.ov).unwrap();
        let b = gy.restrict(&split.yo).unwrap();
        let (mi, bi) = (ov_space.index_of(&mm), split.yo_space.index_of(&b));
        let full = &images[crate::config::index_of_values(&split.assemble(&zero_a, &mm, &b), m.size())];
        let values = y
            .iter()
            .map(|n| {
                let zi = z.index_of(n).unwrap();
                if cover.x.contains(n) {
                    factor_of(zi).v[mi * q + bi]
                } else {
                    full[zi]
                }
            })
            .collect();
        Config::new(y.clone(), values).unwrap()
    })?;
    Ok(Reducibility::Reducible(Decomposition { sx, sy }))
}

/// `couple(sx, sy)` equals `s` extensionally.
pub fn verify_decomposition(s: &GSystem, d: &Decomposition, budget: &Budget) -> Result<Verdict<Config>> {
    let coupled = couple(&d.sx, &d.sy, budget)?;
    systems_equal(s, &coupled, budget)
}

impl Certificate {
    pub fn coordinate(&self) -> &str {
        match self {
            Certificate::SideDependence { coordinate, .. }
            | Certificate::Rectangle { coordinate, .. }
            | Certificate::Unfactorable { coordinate, .. } => coordinate,
        }
    }

    /// Re-derives irreducibility from the certificate alone. Returns
    /// `false` when the certificate does not prove what it claims.
    pub fn recheck(&self, s: &GSystem, cover: &Cover, budget: &Budget) -> Result<bool> {
        let m = s.magma();
        let z = s.vars();
        match self {
            Certificate::SideDependence {
                coordinate,
                side,
                g0,
                g1,
            } => {
                let own = match side {
                    Side::X => &cover.x,
                    Side::Y => &cover.y,
                };
                let outside = match side {
                    Side::X => !cover.y.contains(coordinate),
                    Side::Y => !cover.x.contains(coordinate),
                };
                Ok(outside
                    && own.contains(coordinate)
                    && g0.restrict(own)? == g1.restrict(own)?
                    && s.step(g0)?.get(coordinate) != s.step(g1)?.get(coordinate))
            }
            Certificate::Rectangle {
                coordinate,
                a,
                m: mm,
                b,
                a_ref,
                b_ref,
            } => {
                if !m.is_abelian_group() || !cover.overlap().contains(coordinate) {
                    return Ok(false);
                }
                let f = |a: &Config, b: &Config| -> Result<Elem> {
                    let g = a.merge(mm)?.merge(b)?.realign(z)?;
                    Ok(s.step(&g)?.get(coordinate).unwrap())
                };
                Ok(m.op(f(a, b)?, f(a_ref, b_ref)?) != m.op(f(a, b_ref)?, f(a_ref, b)?))
            }
            Certificate::Unfactorable { coordinate, m: mm } => {
                if !cover.overlap().contains(coordinate) {
                    return Ok(false);
                }
                let xs = ConfigSpace::new(m, &cover.x_only(), budget)?;
                let ys = ConfigSpace::new(m, &cover.y_only(), budget)?;
                let slice: Vec<Vec<Elem>> = xs
                    .iter()
                    .map(|a| {
                        ys.iter()
                            .map(|b| {
                                let g = a.merge(mm)?.merge(&b)?.realign(z)?;
                                Ok(s.step(&g)?.get(coordinate).unwrap())
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                Ok(!slice_factors_brute_force(&slice, m, budget)?)
            }
        }
    }

    pub fn to_json(&self, magma: &Magma) -> Value {
        match self {
            Certificate::SideDependence {
                coordinate,
                side,
                g0,
                g1,
            } => json!({
                "kind": "side-dependence",
                "coordinate": coordinate,
                "side": format!("{side:?}"),
                "g0": g0.to_json(magma),
                "g1": g1.to_json(magma),
            }),
            Certificate::Rectangle {
                coordinate,
                a,
                m,
                b,
                a_ref,
                b_ref,
            } => json!({
                "kind": "rectangle",
                "coordinate": coordinate,
                "a": a.to_json(magma),
                "m": m.to_json(magma),
                "b": b.to_json(magma),
                "a_ref": a_ref.to_json(magma),
                "b_ref": b_ref.to_json(magma),
            }),
            Certificate::Unfactorable { coordinate, m } => json!({
                "kind": "unfactorable",
                "coordinate": coordinate,
                "m": m.to_json(magma),
            }),
        }
    }
}

/// Whether some `u`, `v` give `slice[a][b] = u[a] • v[b]`, trying every
/// pair of tables.
fn slice_factors_brute_force(slice: &[Vec<Elem>], m: &Magma, budget: &Budget) -> Result<bool> {
    let p = slice.len();
    let q = slice.first().map_or(0, Vec::len);
    let n = m.size();
    let total = (n as u128).checked_pow((p + q) as u32).unwrap_or(u128::MAX);
    if total > budget.factor_search_cap() as u128 {
        return Err(Error::SearchInfeasible {
            candidates: total,
            cap: budget.factor_search_cap(),
        });
    }
    let digits = |mut k: u128, len: usize| -> Vec<Elem> {
        let mut out = vec![0; len];
        for d in out.iter_mut() {
            *d = (k % n as u128) as Elem;
            k /= n as u128;
        }
        out
    };
    Ok((0..total).any(|k| {
        let all = digits(k, p + q);
        let (u, v) = all.split_at(p);
        (0..p).all(|a| (0..q).all(|b| m.op(u[a], v[b]) == slice[a][b]))
    }))
}

/// A quadruple `(g0, g1, g0', g1')` with `g0↾Y = g0'↾Y`, `g1↾Y = g1'↾Y`,
/// `g0↾X = g1↾X`, `g0'↾X = g1'↾X`, and the implication (1 or 2) it breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadruple {
    pub g0: Config,
    pub g1: Config,
    pub g0p: Config,
    pub g1p: Config,
    pub implication: u8,
}

impl Quadruple {
    pub fn to_json(&self, m: &Magma) -> Value {
        json!({
            "g0": self.g0.to_json(m),
            "g1": self.g1.to_json(m),
            "g0'": self.g0p.to_json(m),
            "g1'": self.g1p.to_json(m),
            "implication": self.implication,
        })
    }
}

/// Visits every constrained quadruple: `g0` over `G^Z`, then `g1` varying
/// `g0` on `Y∖X`, then `g0'` varying `g0` on `X∖Y`; `g1'` is determined.
fn for_each_quadruple(
    s: &GSystem,
    cover: &Cover,
    budget: &Budget,
    mut visit: impl FnMut(&Config, &Config, &Config, &Config) -> Result<Option<u8>>,
) -> Result<Option<Quadruple>> {
    if s.domain().is_some() {
        return Err(Error::Unsupported(
            "quadruple conditions are checked on all of G^Z".into(),
        ));
    }
    let cover = Cover::new(cover.x.clone(), cover.y.clone(), s.vars())?;
    let m = s.magma();
    let zs = ConfigSpace::new(m, s.vars(), budget)?;
    let ys = ConfigSpace::new(m, &cover.y_only(), budget)?;
    let xs = ConfigSpace::new(m, &cover.x_only(), budget)?;
    for g0 in zs.iter() {
        for t in ys.iter() {
            let g1 = g0.substitute(&t)?;
            for w in xs.iter() {
                let g0p = g0.substitute(&w)?;
                let g1p = g1.substitute(&w)?;
                if let Some(implication) = visit(&g0, &g1, &g0p, &g1p)? {
                    return Ok(Some(Quadruple {
                        g0,
                        g1,
                        g0p,
                        g1p,
                        implication,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// `γ(g0)=γ(g1) ⟹ γ(g0')=γ(g1')` and `γ(g0)=γ(g0') ⟹ γ(g1)=γ(g1')` for
/// all constrained quadruples.
pub fn theorem_condition2(s: &GSystem, cover: &Cover, budget: &Budget) -> Result<Verdict<Quadruple>> {
    let q = for_each_quadruple(s, cover, budget, |g0, g1, g0p, g1p| {
        let (i0, i1, i0p, i1p) = (
            s.step_values(g0.values()),
            s.step_values(g1.values()),
            s.step_values(g0p.values()),
            s.step_values(g1p.values()),
        );
        Ok(if i0 == i1 && i0p != i1p {
            Some(1)
        } else if i0 == i0p && i1 != i1p {
            Some(2)
        } else {
            None
        })
    })?;
    Ok(Verdict::from_counterexample(q))
}

/// Dependence-atom transfer over two-element teams:
/// `dep(X; X∩Y)` over `{g0,g1}` implies it over `{g0',g1'}`, and
/// `dep(Y; X∩Y)` over `{g0,g0'}` implies it over `{g1,g1'}`.
pub fn theorem_condition3(s: &GSystem, cover: &Cover, budget: &Budget) -> Result<Verdict<Quadruple>> {
    let overlap = cover.overlap();
    let team = |p: &Config, q: &Config| ConfigSet::new(s.vars().clone(), [p.clone(), q.clone()]);
    let q = for_each_quadruple(s, cover, budget, |g0, g1, g0p, g1p| {
        let dep = |p: &Config, q: &Config, side: &VarSet| -> Result<bool> {
            Ok(dep_holds(s, side, &overlap, Some(&team(p, q)?), budget)?.holds)
        };
        Ok(if dep(g0, g1, &cover.x)? && !dep(g0p, g1p, &cover.x)? {
            Some(1)
        } else if dep(g0, g0p, &cover.y)? && !dep(g1, g1p, &cover.y)? {
            Some(2)
        } else {
            None
        })
    })?;
    Ok(Verdict::from_counterexample(q))
}

#[derive(Debug, Clone)]
pub enum EmergenceFailure {
    FactorNotReducible { index: usize, certificate: Certificate },
    CompositionMismatch { witness: Config },
}

/// Checks that every factor is reducible to `cover` and that
/// `factors[0] ∘ factors[1] ∘ … ∘ factors[k-1]` (the last factor is applied
/// first) equals `s`.
pub fn verify_emergence(
    s: &GSystem,
    factors: &[GSystem],
    cover: &Cover,
    budget: &Budget,
) -> Result<Verdict<EmergenceFailure>> {
    let Some(last) = factors.last() else {
        return Err(Error::BadParameter("emergence needs at least one factor".into()));
    };
    for (index, f) in factors.iter().enumerate() {
        if let Reducibility::Irreducible(certificate) = decide_reducible(f, cover, budget)? {
            return Ok(Verdict::fails(EmergenceFailure::FactorNotReducible {
                index,
                certificate,
            }));
        }
    }
    let mut acc = last.clone();
    for f in factors[..factors.len() - 1].iter().rev() {
        acc = GSystem::compose(f, &acc, budget)?;
    }
    let eq = systems_equal(s, &acc, budget)?;
    Ok(match eq.witness {
        Some(witness) => Verdict::fails(EmergenceFailure::CompositionMismatch { witness }),
        None => Verdict::holds(),
    })
}
