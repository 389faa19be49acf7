//! The classical agent-environment loop and its indicator embedding into a
//! coupled pair of Z/2Z systems.
//!
//! The environment is `(X, U, Y, h, f)` with `f: X×U → X` and `h: X → Y`;
//! the agent is `(I, φ, U, Y, π)` with `φ: I×Y → I` and `π: I → U`. One
//! classical step computes `x' = f(x, π(ι))` and then `ι' = φ(ι, h(x'))`.
//!
//! The embedding identifies each finite set with one-hot configurations
//! over its own block of Z/2Z variables, with the all-zero configuration
//! adjoined to the sensor and motor blocks.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::budget::Budget;
use crate::config::{Config, ConfigSet, VarSet};
use crate::coupling::{couple, star_set};
use crate::error::{Error, Result};
use crate::magma::{Elem, Magma};
use crate::system::GSystem;

/// Largest component set the embedding accepts.
pub const MAX_COMPONENT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalModel {
    pub states: Vec<String>,
    pub motors: Vec<String>,
    pub sensors: Vec<String>,
    pub internal: Vec<String>,
    /// `f[x][u]`
    pub f: Vec<Vec<usize>>,
    /// `h[x]`
    pub h: Vec<usize>,
    /// `phi[i][y]`
    pub phi: Vec<Vec<usize>>,
    /// `pi[i]`
    pub pi: Vec<usize>,
}

fn check_map(name: &str, entries: impl IntoIterator<Item = usize>, bound: usize) -> Result<()> {
    for e in entries {
        if e >= bound {
            return Err(Error::MalformedTable(format!(
                "{name} maps to index {e}, but the target set has {bound} elements"
            )));
        }
    }
    Ok(())
}

fn check_shape<T>(name: &str, rows: &[T], expected: usize) -> Result<()> {
    if rows.len() != expected {
        return Err(Error::MalformedTable(format!(
            "{name} has {} entries, expected {expected}",
            rows.len()
        )));
    }
    Ok(())
}

impl ClassicalModel {
    /// Validates that every map is total over the declared sets.
    pub fn validate(&self) -> Result<()> {
        let (nx, nu, ny, ni) = (
            self.states.len(),
            self.motors.len(),
            self.sensors.len(),
            self.internal.len(),
        );
        for (label, set) in [
            ("states", &self.states),
            ("motors", &self.motors),
            ("sensors", &self.sensors),
            ("internal", &self.internal),
        ] {
            if set.is_empty() {
                return Err(Error::BadParameter(format!("{label} must not be empty")));
            }
            for (i, a) in set.iter().enumerate() {
                if set[..i].contains(a) {
                    return Err(Error::DuplicateElement(a.clone()));
                }
            }
        }
        check_shape("f", &self.f, nx)?;
        for row in &self.f {
            check_shape("f row", row, nu)?;
            check_map("f", row.iter().copied(), nx)?;
        }
        check_shape("h", &self.h, nx)?;
        check_map("h", self.h.iter().copied(), ny)?;
        check_shape("phi", &self.phi, ni)?;
        for row in &self.phi {
            check_shape("phi row", row, ny)?;
            check_map("phi", row.iter().copied(), ni)?;
        }
        check_shape("pi", &self.pi, ni)?;
        check_map("pi", self.pi.iter().copied(), nu)?;
        Ok(())
    }

    /// The state the loop starts in from `(ι, x)`, with latches
    /// `y = h(x)` and `u = π(ι)`.
    pub fn initial(&self, internal: usize, external: usize) -> CoupledState {
        CoupledState {
            internal,
            external,
            sensor: self.h[external],
            motor: self.pi[internal],
        }
    }
}

/// A state of the closed loop. `sensor` and `motor` are the latched values
/// `h(x)` and `π(ι)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoupledState {
    pub internal: usize,
    pub external: usize,
    pub sensor: usize,
    pub motor: usize,
}

impl CoupledState {
    pub fn to_json(&self, model: &ClassicalModel) -> Value {
        json!({
            "internal": model.internal[self.internal],
            "external": model.states[self.external],
            "sensor": model.sensors[self.sensor],
            "motor": model.motors[self.motor],
        })
    }
}

pub fn classical_step(m: &ClassicalModel, st: &CoupledState) -> CoupledState {
    let x = m.f[st.external][m.pi[st.internal]];
    let y = m.h[x];
    let i = m.phi[st.internal][y];
    CoupledState {
        internal: i,
        external: x,
        sensor: y,
        motor: m.pi[i],
    }
}

pub fn classical_trace(m: &ClassicalModel, init: &CoupledState, k: usize) -> Vec<CoupledState> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(*init);
    for _ in 0..k {
        let next = classical_step(m, out.last().unwrap());
        out.push(next);
    }
    out
}

/// The two restricted systems, their coupling and the variable blocks.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub model: ClassicalModel,
    /// `(H0, α)` over `A = X' ⊔ Y' ⊔ U'`.
    pub environment: GSystem,
    /// `(H1, β)` over `B = I' ⊔ Y' ⊔ U'`.
    pub agent: GSystem,
    pub coupled: GSystem,
    x_block: VarSet,
    y_block: VarSet,
    u_block: VarSet,
    i_block: VarSet,
}

fn block(prefix: &str, names: &[String]) -> Result<VarSet> {
    VarSet::new(names.iter().map(|n| format!("{prefix}_{n}")))
}

fn one_hot(len: usize, hot: Option<usize>) -> Vec<Elem> {
    (0..len).map(|i| Elem::from(Some(i) == hot)).collect()
}

/// `Some(Some(i))` for a one-hot block, `Some(None)` for all-zero.
fn read_block(values: &[Elem]) -> Option<Option<usize>> {
    let mut hot = None;
    for (i, &v) in values.iter().enumerate() {
        match (v, hot) {
            (0, _) => {}
            (1, None) => hot = Some(i),
            _ => return None,
        }
    }
    Some(hot)
}

/// Builds the indicator embedding over Z/2Z.
///
/// `α` on `H0` entries with an all-zero motor uses `f(x, 0) = x`; `β` on
/// `H1` entries with an all-zero sensor uses `φ(ι, 0) = ι`.
pub fn embed(model: &ClassicalModel, budget: &Budget) -> Result<Embedding> {
    model.validate()?;
    for (label, n) in [
        ("states", model.states.len()),
        ("motors", model.motors.len()),
        ("sensors", model.sensors.len()),
        ("internal", model.internal.len()),
    ] {
        if n > MAX_COMPONENT {
            return Err(Error::EncodingTooLarge(format!(
                "{label} has {n} elements, the cap is {MAX_COMPONENT}"
            )));
        }
    }
    let g = Arc::new(Magma::cyclic(2)?);
    let xb = block("x", &model.states)?;
    let yb = block("y", &model.sensors)?;
    let ub = block("u", &model.motors)?;
    let ib = block("i", &model.internal)?;
    let a = xb.union(&yb).union(&ub);
    let b = ib.union(&yb).union(&ub);
    let (nx, ny, nu, ni) = (xb.len(), yb.len(), ub.len(), ib.len());

    let mut h0 = ConfigSet::empty(a.clone());
    for x in 0..nx {
        for y in 0..ny {
            for u in (0..nu).map(Some).chain([None]) {
                let mut v = one_hot(nx, Some(x));
                v.extend(one_hot(ny, Some(y)));
                v.extend(one_hot(nu, u));
                h0.insert(Config::new(a.clone(), v)?)?;
            }
        }
    }
    let mut h1 = ConfigSet::empty(b.clone());
    for i in 0..ni {
        for y in (0..ny).map(Some).chain([None]) {
            for u in 0..nu {
                let mut v = one_hot(ni, Some(i));
                v.extend(one_hot(ny, y));
                v.extend(one_hot(nu, Some(u)));
                h1.insert(Config::new(b.clone(), v)?)?;
            }
        }
    }

    let environment = GSystem::from_fn(g.clone(), a.clone(), Some(h0), budget, |c| {
        let v = c.values();
        let x = read_block(&v[..nx]).flatten().expect("H0 has a one-hot state");
        let u = read_block(&v[nx + ny..]).expect("H0 has a one-hot or zero motor");
        let x2 = u.map_or(x, |u| model.f[x][u]);
        let mut out = one_hot(nx, Some(x2));
        out.extend(one_hot(ny, Some(model.h[x2])));
        out.extend(one_hot(nu, None));
        Config::new(a.clone(), out).unwrap()
    })?;
    let agent = GSystem::from_fn(g.clone(), b.clone(), Some(h1), budget, |c| {
        let v = c.values();
        let i = read_block(&v[..ni]).flatten().expect("H1 has a one-hot internal state");
        let y = read_block(&v[ni..ni + ny]).expect("H1 has a one-hot or zero sensor");
        let i2 = y.map_or(i, |y| model.phi[i][y]);
        let mut out = one_hot(ni, Some(i2));
        out.extend(one_hot(ny, None));
        out.extend(one_hot(nu, Some(model.pi[i2])));
        Config::new(b.clone(), out).unwrap()
    })?;
    let coupled = couple(&environment, &agent, budget)?;
    Ok(Embedding {
        model: model.clone(),
        environment,
        agent,
        coupled,
        x_block: xb,
        y_block: yb,
        u_block: ub,
        i_block: ib,
    })
}

impl Embedding {
    pub fn encode(&self, st: &CoupledState) -> Config {
        let z = self.coupled.vars();
        let mut values = vec![0; z.len()];
        for (blk, hot) in [
            (&self.x_block, st.external),
            (&self.y_block, st.sensor),
            (&self.u_block, st.motor),
            (&self.i_block, st.internal),
        ] {
            let name = &blk.names()[hot];
            values[z.index_of(name).unwrap()] = 1;
        }
        Config::new(z.clone(), values).unwrap()
    }

    fn block_values(&self, g: &Config, blk: &VarSet) -> Vec<Elem> {
        blk.iter().map(|n| g.get(n).unwrap_or(0)).collect()
    }

    /// Whether every block of `g` is one-hot or all-zero.
    pub fn blocks_well_formed(&self, g: &Config) -> bool {
        [&self.x_block, &self.y_block, &self.u_block, &self.i_block]
            .into_iter()
            .all(|blk| read_block(&self.block_values(g, blk)).is_some())
    }

    /// The classical state encoded by `g`, if every block is one-hot.
    pub fn decode(&self, g: &Config) -> Option<CoupledState> {
        let hot = |blk: &VarSet| read_block(&self.block_values(g, blk)).flatten();
        Some(CoupledState {
            external: hot(&self.x_block)?,
            sensor: hot(&self.y_block)?,
            motor: hot(&self.u_block)?,
            internal: hot(&self.i_block)?,
        })
    }

    /// `H0 * H1`, the domain of the coupled system.
    pub fn star_set(&self, budget: &Budget) -> Result<ConfigSet> {
        star_set(&self.environment.domain_set(budget)?, &self.agent.domain_set(budget)?)
    }
}

/// First point at which the decoded embedded trace leaves the classical one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub init: CoupledState,
    pub step: usize,
    pub classical: CoupledState,
    /// `None` when the embedded configuration does not decode.
    pub embedded: Option<CoupledState>,
}

impl Divergence {
    pub fn to_json(&self, model: &ClassicalModel) -> Value {
        json!({
            "init": self.init.to_json(model),
            "step": self.step,
            "classical": self.classical.to_json(model),
            "embedded": self.embedded.map(|e| e.to_json(model)),
        })
    }
}

/// Runs both loops for `k` steps from each initial state and compares the
/// decoded embedded trace with the classical one.
pub fn equivalence_check(emb: &Embedding, k: usize, inits: &[CoupledState]) -> Result<Option<Divergence>> {
    for init in inits {
        let expected = classical_trace(&emb.model, init, k);
        let actual = emb.coupled.iterate(&emb.encode(init), k)?;
        for (step, (c, g)) in expected.iter().zip(&actual).enumerate() {
            let decoded = emb.decode(g);
            if decoded != Some(*c) {
                return Ok(Some(Divergence {
                    init: *init,
                    step,
                    classical: *c,
                    embedded: decoded,
                }));
            }
        }
    }
    Ok(None)
}

/// Every initial state `(ι, x)` with the standard latches.
pub fn all_initial_states(m: &ClassicalModel) -> Vec<CoupledState> {
    (0..m.internal.len())
        .flat_map(|i| (0..m.states.len()).map(move |x| (i, x)))
        .map(|(i, x)| m.initial(i, x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{check_closure_condition1, is_closed};

    fn names(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn toggle() -> ClassicalModel {
        ClassicalModel {
            states: names("s", 2),
            motors: names("m", 1),
            sensors: names("o", 2),
            internal: names("k", 2),
            f: vec![vec![1], vec![0]],
            h: vec![0, 1],
            phi: vec![vec![0, 1], vec![0, 1]],
            pi: vec![0, 0],
        }
    }

    #[test]
    fn toggle_world_has_period_two() {
        let m = toggle();
        let tr = classical_trace(&m, &m.initial(0, 0), 3);
        let xs: Vec<usize> = tr.iter().map(|s| s.external).collect();
        assert_eq!(xs, vec![0, 1, 0, 1]);
        // the internal state copies the fresh sensor reading
        let is: Vec<usize> = tr.iter().map(|s| s.internal).collect();
        assert_eq!(is, vec![0, 1, 0, 1]);
    }

    #[test]
    fn constant_policy_identity_world() {
        let mut m = toggle();
        m.f = vec![vec![0], vec![1]];
        m.phi = vec![vec![1, 1], vec![0, 0]];
        let tr = classical_trace(&m, &m.initial(0, 1), 4);
        assert!(tr.iter().all(|s| s.external == 1));
        let is: Vec<usize> = tr.iter().map(|s| s.internal).collect();
        assert_eq!(is, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn embedding_domain_and_closure() {
        let b = Budget::default();
        let m = toggle();
        let e = embed(&m, &b).unwrap();
        let star = e.star_set(&b).unwrap();
        // x, y, u (non-zero), i all one-hot: 2 * 2 * 1 * 2
        assert_eq!(star.len(), 8);
        assert!(is_closed(&star, &e.coupled).unwrap().holds);
        for g in star.iter() {
            assert!(e.decode(g).is_some());
        }
    }

    #[test]
    fn embedded_internal_state_lags_by_one_step() {
        let b = Budget::default();
        let m = toggle();
        let e = embed(&m, &b).unwrap();
        let init = m.initial(0, 0);
        let d = equivalence_check(&e, 3, &[init]).unwrap().unwrap();
        assert_eq!(d.step, 1);
        assert_eq!(d.classical.internal, 1);
        assert_eq!(d.embedded.unwrap().internal, 0);
        assert_eq!(d.embedded.unwrap().external, 1);
        assert_eq!(equivalence_check(&e, 0, &[init]).unwrap(), None);
    }

    #[test]
    fn literal_condition1_fails_with_two_motors() {
        let b = Budget::default();
        let mut m = toggle();
        m.motors = names("m", 2);
        m.f = vec![vec![1, 0], vec![0, 1]];
        m.pi = vec![0, 1];
        let e = embed(&m, &b).unwrap();
        let h0 = e.environment.domain_set(&b).unwrap();
        let h1 = e.agent.domain_set(&b).unwrap();
        let c1 = check_closure_condition1(&h0, &h1, &e.environment, &e.agent).unwrap();
        assert!(!c1.holds);
        assert!(is_closed(&e.star_set(&b).unwrap(), &e.coupled).unwrap().holds);
    }

    #[test]
    fn oversized_component_rejected() {
        let mut m = toggle();
        m.internal = names("k", 9);
        m.phi = vec![vec![0, 0]; 9];
        m.pi = vec![0; 9];
        assert!(matches!(embed(&m, &Budget::default()), Err(Error::EncodingTooLarge(_))));
    }

    #[test]
    fn malformed_maps_rejected() {
        let mut m = toggle();
        m.h = vec![0, 2];
        assert!(m.validate().is_err());
        let mut m = toggle();
        m.f.pop();
        assert!(m.validate().is_err());
    }
}
