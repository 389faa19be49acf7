//! Finite magmas given by an explicit operation table.
//!
//! Elements are opaque names. Their declaration order fixes the element
//! indices, and those indices fix enumeration order in every downstream
//! module.

use std::fmt;
use std::sync::OnceLock;

use crate::budget::DEFAULT_MAX_CARRIER;
use crate::error::{Error, Result};

/// Index of an element in its magma's carrier.
pub type Elem = u8;

/// Algebraic properties, computed by exhaustive table scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Properties {
    pub associative: bool,
    pub commutative: bool,
    pub identity: Option<Elem>,
    pub abelian_group: bool,
}

#[derive(Clone)]
pub struct Magma {
    elements: Vec<String>,
    table: Vec<Elem>,
    props: OnceLock<Properties>,
}

impl PartialEq for Magma {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.table == other.table
    }
}

impl Eq for Magma {}

impl fmt::Debug for Magma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Magma")
            .field("elements", &self.elements)
            .field("table", &self.table_rows())
            .finish()
    }
}

impl Magma {
    /// Builds a magma from element names and a row-major table of indices,
    /// where `table[i][j]` is the index of `elements[i] • elements[j]`.
    pub fn new<S: Into<String>>(elements: Vec<S>, table: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_cap(elements, table, DEFAULT_MAX_CARRIER)
    }

    pub fn with_cap<S: Into<String>>(elements: Vec<S>, table: Vec<Vec<usize>>, cap: usize) -> Result<Self> {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        let n = elements.len();
        if n == 0 {
            return Err(Error::MalformedTable("carrier is empty".into()));
        }
        if n > cap || n > Elem::MAX as usize + 1 {
            return Err(Error::CarrierTooLarge { size: n, cap });
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::DuplicateElement(e.clone()));
            }
        }
        if table.len() != n {
            return Err(Error::MalformedTable(format!(
                "expected {n} rows, found {}",
                table.len()
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedTable(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::MalformedTable(format!("entry ({i},{j}) = {v} is out of range")));
                }
                flat.push(v as Elem);
            }
        }
        Ok(Magma {
            elements,
            table: flat,
            props: OnceLock::new(),
        })
    }

    /// Z/nZ under addition, elements named `0..n-1`.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::from_fn(n, |x, y| (x + y) % n)
    }

    /// The chain `0 < 1 < ... < n-1` under meet (min).
    pub fn chain_meet(n: usize) -> Result<Self> {
        Self::from_fn(n, |x, y| x.min(y))
    }

    /// The chain `0 < 1 < ... < n-1` under join (max).
    pub fn chain_join(n: usize) -> Result<Self> {
        Self::from_fn(n, |x, y| x.max(y))
    }

    /// Direct product with componentwise operation. Element `(x, y)` gets
    /// index `x * |right| + y` and the name `x_y`.
    pub fn product(left: &Magma, right: &Magma) -> Result<Self> {
        let (n, k) = (left.size(), right.size());
        let mut elements = Vec::with_capacity(n * k);
        for x in &left.elements {
            for y in &right.elements {
                elements.push(format!("{x}_{y}"));
            }
        }
        let idx = |p: usize| (p / k, p % k);
        let table = (0..n * k)
            .map(|p| {
                (0..n * k)
                    .map(|q| {
                        let ((a, b), (c, d)) = (idx(p), idx(q));
                        left.op(a as Elem, c as Elem) as usize * k + right.op(b as Elem, d as Elem) as usize
                    })
                    .collect()
            })
            .collect();
        Magma::new(elements, table)
    }

    fn from_fn(n: usize, op: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParameter("carrier size must be at least 1".into()));
        }
        let elements = (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        let table = (0..n).map(|x| (0..n).map(|y| op(x, y)).collect()).collect();
        Magma::new(elements, table)
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.elements[e as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        self.elements.iter().position(|e| e == name).map(|i| i as Elem)
    }

    #[inline]
    pub fn op(&self, x: Elem, y: Elem) -> Elem {
        self.table[x as usize * self.size() + y as usize]
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.size())
            .map(|r| r.iter().map(|&v| v as usize).collect())
            .collect()
    }

    fn carrier(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.size()).map(|i| i as Elem)
    }

    pub fn properties(&self) -> Properties {
        *self.props.get_or_init(|| {
            let associative = self.compute_associative();
            let commutative = self.compute_commutative();
            let identity = self.compute_identity();
            let abelian_group =
                associative && commutative && identity.is_some() && self.carrier().all(|x| self.inverse(x).is_some());
            Properties {
                associative,
                commutative,
                identity,
                abelian_group,
            }
        })
    }

    pub fn is_associative(&self) -> bool {
        self.properties().associative
    }

    pub fn is_commutative(&self) -> bool {
        self.properties().commutative
    }

    pub fn identity(&self) -> Option<Elem> {
        self.properties().identity
    }

    pub fn is_abelian_group(&self) -> bool {
        self.properties().abelian_group
    }

    /// Two-sided inverse of `x` with respect to the identity, if both exist.
    pub fn inverse(&self, x: Elem) -> Option<Elem> {
        let e = self.compute_identity()?;
        self.carrier().find(|&y| self.op(x, y) == e && self.op(y, x) == e)
    }

    fn compute_associative(&self) -> bool {
        let c = self.carrier();
        c.clone().all(|x| {
            c.clone().all(|y| {
                c.clone()
                    .all(|z| self.op(self.op(x, y), z) == self.op(x, self.op(y, z)))
            })
        })
    }

    fn compute_commutative(&self) -> bool {
        let c = self.carrier();
        c.clone().all(|x| c.clone().all(|y| self.op(x, y) == self.op(y, x)))
    }

    fn compute_identity(&self) -> Option<Elem> {
        let mut found = self
            .carrier()
            .filter(|&e| self.carrier().all(|x| self.op(e, x) == x && self.op(x, e) == x));
        let e = found.next();
        debug_assert!(found.next().is_none(), "two-sided identity must be unique");
        e
    }
}

/// The standard magmas available by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinMagma {
    Cyclic(usize),
    ChainMeet(usize),
    ChainJoin(usize),
    Product(Box<BuiltinMagma>, Box<BuiltinMagma>),
}

pub fn builtin_magma(kind: &BuiltinMagma) -> Result<Magma> {
    match kind {
        BuiltinMagma::Cyclic(n) => Magma::cyclic(*n),
        BuiltinMagma::ChainMeet(n) => Magma::chain_meet(*n),
        BuiltinMagma::ChainJoin(n) => Magma::chain_join(*n),
        BuiltinMagma::Product(a, b) => Magma::product(&builtin_magma(a)?, &builtin_magma(b)?),
    }
}
