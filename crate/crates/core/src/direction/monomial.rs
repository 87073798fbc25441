//! Monomials over channel-gain symbols and ordered sets of them.
//!
//! A transmit or received *direction* is a product of channel gains raised to
//! non-negative integer powers. Monomials are kept sparse: symbols with a zero
//! exponent are never stored, so the empty map is the unit direction `1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named generators used by the reduced channel models.
///
/// `G0..G3` parametrize the standard three-user channel, `A`, `B` and `C` the
/// multiple-access and partial-alignment examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    G0,
    G1,
    G2,
    G3,
    A,
    B,
    C,
}

impl Generator {
    pub const ALL: [Generator; 7] = [
        Generator::G0,
        Generator::G1,
        Generator::G2,
        Generator::G3,
        Generator::A,
        Generator::B,
        Generator::C,
    ];

    pub fn ordinal(self) -> u32 {
        self as u32
    }

    pub fn from_ordinal(ordinal: u32) -> Option<Generator> {
        Self::ALL.get(ordinal as usize).copied()
    }

    fn name(self) -> &'static str {
        match self {
            Generator::G0 => "G0",
            Generator::G1 => "G1",
            Generator::G2 => "G2",
            Generator::G3 => "G3",
            Generator::A => "a",
            Generator::B => "b",
            Generator::C => "c",
        }
    }
}

/// A single channel-gain variable.
///
/// `H { rx, tx }` is the gain from transmitter `tx` to receiver `rx`, both
/// 1-based. Named generators sort before every `H` symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GainSymbol {
    Named(Generator),
    H { rx: u16, tx: u16 },
}

impl GainSymbol {
    /// Gain `h_{rx,tx}`; panics on a zero index.
    pub fn h(rx: usize, tx: usize) -> GainSymbol {
        assert!(rx >= 1 && tx >= 1, "gain indices are 1-based");
        GainSymbol::H {
            rx: rx as u16,
            tx: tx as u16,
        }
    }

    /// `(j, l)` pair used by the triple encoding. Named generators map to
    /// `(0, ordinal)`.
    pub fn index_pair(self) -> (u32, u32) {
        match self {
            GainSymbol::Named(g) => (0, g.ordinal()),
            GainSymbol::H { rx, tx } => (rx as u32, tx as u32),
        }
    }

    pub fn from_index_pair(j: u32, l: u32) -> Option<GainSymbol> {
        match (j, l) {
            (0, l) => Generator::from_ordinal(l).map(GainSymbol::Named),
            (_, 0) => None,
            (j, l) if j <= u16::MAX as u32 && l <= u16::MAX as u32 => Some(GainSymbol::H {
                rx: j as u16,
                tx: l as u16,
            }),
            _ => None,
        }
    }
}

impl From<Generator> for GainSymbol {
    fn from(g: Generator) -> Self {
        GainSymbol::Named(g)
    }
}

impl fmt::Display for GainSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GainSymbol::Named(g) => f.write_str(g.name()),
            GainSymbol::H { rx, tx } if *rx < 10 && *tx < 10 => write!(f, "h{rx}{tx}"),
            GainSymbol::H { rx, tx } => write!(f, "h{rx},{tx}"),
        }
    }
}

/// Product of gain symbols with non-negative exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<[u32; 3]>", try_from = "Vec<[u32; 3]>")]
pub struct Monomial {
    exponents: BTreeMap<GainSymbol, u32>,
}

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial::default()
    }

    pub fn symbol(s: impl Into<GainSymbol>) -> Monomial {
        Monomial::power(s, 1)
    }

    pub fn power(s: impl Into<GainSymbol>, exponent: u32) -> Monomial {
        let mut exponents = BTreeMap::new();
        if exponent > 0 {
            exponents.insert(s.into(), exponent);
        }
        Monomial { exponents }
    }

    /// Builds a monomial from `(symbol, exponent)` pairs; repeated symbols add.
    pub fn from_exponents<I, S>(pairs: I) -> Monomial
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<GainSymbol>,
    {
        let mut exponents = BTreeMap::new();
        for (s, e) in pairs {
            if e > 0 {
                *exponents.entry(s.into()).or_insert(0) += e;
            }
        }
        Monomial { exponents }
    }

    pub fn is_unit(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponent(&self, s: GainSymbol) -> u32 {
        self.exponents.get(&s).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.exponents.values().sum()
    }

    /// Non-zero exponents in symbol order.
    pub fn iter(&self) -> impl Iterator<Item = (GainSymbol, u32)> + '_ {
        self.exponents.iter().map(|(s, e)| (*s, *e))
    }

    pub fn symbols(&self) -> impl Iterator<Item = GainSymbol> + '_ {
        self.exponents.keys().copied()
    }

    /// `[j, l, s]` triples, see [`GainSymbol::index_pair`].
    pub fn to_triples(&self) -> Vec<[u32; 3]> {
        self.iter()
            .map(|(s, e)| {
                let (j, l) = s.index_pair();
                [j, l, e]
            })
            .collect()
    }

    pub fn from_triples(triples: &[[u32; 3]]) -> Result<Monomial> {
        let mut exponents = BTreeMap::new();
        for &[j, l, e] in triples {
            let s = GainSymbol::from_index_pair(j, l).ok_or_else(|| {
                Error::InvalidParameter(format!("no gain symbol with index pair ({j}, {l})"))
            })?;
            if e == 0 {
                return Err(Error::InvalidParameter(format!(
                    "zero exponent stored for {s}"
                )));
            }
            if exponents.insert(s, e).is_some() {
                return Err(Error::InvalidParameter(format!("{s} listed twice")));
            }
        }
        Ok(Monomial { exponents })
    }
}

impl From<Monomial> for Vec<[u32; 3]> {
    fn from(m: Monomial) -> Self {
        m.to_triples()
    }
}

impl TryFrom<Vec<[u32; 3]>> for Monomial {
    type Error = Error;

    fn try_from(triples: Vec<[u32; 3]>) -> Result<Self> {
        Monomial::from_triples(&triples)
    }
}

impl Mul<&Monomial> for &Monomial {
    type Output = Monomial;

    // exponents add under multiplication
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Monomial) -> Monomial {
        let mut exponents = self.exponents.clone();
        for (s, e) in &rhs.exponents {
            *exponents.entry(*s).or_insert(0) += e;
        }
        Monomial { exponents }
    }
}

impl Mul for Monomial {
    type Output = Monomial;

    fn mul(self, rhs: Monomial) -> Monomial {
        &self * &rhs
    }
}

/// Exponent-wise product.
pub fn monomial_mul(x: &Monomial, y: &Monomial) -> Monomial {
    x * y
}

// Lexicographic order on the dense exponent tuple indexed by the symbol
// order; absent symbols count as exponent 0. The unit monomial is the minimum.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.exponents.iter().peekable();
        let mut b = other.exponents.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1");
        }
        for (i, (s, e)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Ordered set of distinct monomials in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Monomial>", into = "Vec<Monomial>")]
pub struct DirectionSet {
    elements: Vec<Monomial>,
}

impl DirectionSet {
    pub fn new() -> DirectionSet {
        DirectionSet::default()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Monomial> {
        self.elements.iter()
    }

    pub fn as_slice(&self) -> &[Monomial] {
        &self.elements
    }

    pub fn get(&self, index: usize) -> Option<&Monomial> {
        self.elements.get(index)
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.position(m).is_some()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.elements.binary_search(m).ok()
    }

    pub fn contains_unit(&self) -> bool {
        self.elements.first().is_some_and(Monomial::is_unit)
    }

    pub fn is_subset(&self, other: &DirectionSet) -> bool {
        self.elements.iter().all(|m| other.contains(m))
    }

    pub fn is_disjoint(&self, other: &DirectionSet) -> bool {
        self.elements.iter().all(|m| !other.contains(m))
    }

    pub fn intersection(&self, other: &DirectionSet) -> DirectionSet {
        DirectionSet {
            elements: self
                .elements
                .iter()
                .filter(|m| other.contains(m))
                .cloned()
                .collect(),
        }
    }

    pub fn union(&self, other: &DirectionSet) -> DirectionSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    /// Every element multiplied by `factor`. Multiplication by a monomial is
    /// injective, so the size is preserved.
    pub fn shifted(&self, factor: &Monomial) -> DirectionSet {
        self.iter().map(|m| m * factor).collect()
    }
}

impl FromIterator<Monomial> for DirectionSet {
    fn from_iter<I: IntoIterator<Item = Monomial>>(iter: I) -> Self {
        let mut elements: Vec<Monomial> = iter.into_iter().collect();
        elements.sort();
        elements.dedup();
        DirectionSet { elements }
    }
}

impl TryFrom<Vec<Monomial>> for DirectionSet {
    type Error = Error;

    fn try_from(elements: Vec<Monomial>) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "direction set must be strictly increasing in canonical order".into(),
            ));
        }
        Ok(DirectionSet { elements })
    }
}

impl From<DirectionSet> for Vec<Monomial> {
    fn from(s: DirectionSet) -> Vec<Monomial> {
        s.elements
    }
}

impl<'a> IntoIterator for &'a DirectionSet {
    type Item = &'a Monomial;
    type IntoIter = std::slice::Iter<'a, Monomial>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// Received directions when every element of `tx_set` passes through `gain`.
pub fn received_directions(tx_set: &DirectionSet, gain: GainSymbol) -> DirectionSet {
    tx_set.shifted(&Monomial::symbol(gain))
}
