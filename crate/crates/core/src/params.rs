//! The fourteen parameter families of the triple series and the shift, drop
//! and push operations used to write its summation formulas.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Number, Scalar};

/// Index combination a family's Pochhammer symbols run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexCombo {
    /// `m1 + m2 + m3`
    Total,
    /// `m1 + m2`
    Pair12,
    /// `m2 + m3`
    Pair23,
    /// `m3 + m1`
    Pair31,
    First,
    Second,
    Third,
}

impl IndexCombo {
    pub const ALL: [IndexCombo; 7] = [
        IndexCombo::Total,
        IndexCombo::Pair12,
        IndexCombo::Pair23,
        IndexCombo::Pair31,
        IndexCombo::First,
        IndexCombo::Second,
        IndexCombo::Third,
    ];

    /// Which of `m1, m2, m3` enter the combination.
    pub const fn mask(self) -> [bool; 3] {
        match self {
            IndexCombo::Total => [true, true, true],
            IndexCombo::Pair12 => [true, true, false],
            IndexCombo::Pair23 => [false, true, true],
            IndexCombo::Pair31 => [true, false, true],
            IndexCombo::First => [true, false, false],
            IndexCombo::Second => [false, true, false],
            IndexCombo::Third => [false, false, true],
        }
    }

    pub fn degree(self, m: [usize; 3]) -> usize {
        let mask = self.mask();
        (0..3).filter(|&j| mask[j]).map(|j| m[j]).sum()
    }

    pub fn contains(self, index: usize) -> bool {
        self.mask()[index]
    }

    /// `true` when a bound on `self` also bounds `other`.
    pub fn covers(self, other: IndexCombo) -> bool {
        let (a, b) = (self.mask(), other.mask());
        (0..3).all(|j| !b[j] || a[j])
    }

    pub(crate) fn slot(self) -> usize {
        self as usize
    }
}

/// One of the fourteen parameter families.
///
/// ASCII names replace primes: `bp` is b', `bpp` is b'', and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    A,
    B,
    Bp,
    Bpp,
    C,
    Cp,
    Cpp,
    E,
    G,
    Gp,
    Gpp,
    H,
    Hp,
    Hpp,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::A,
        Family::B,
        Family::Bp,
        Family::Bpp,
        Family::C,
        Family::Cp,
        Family::Cpp,
        Family::E,
        Family::G,
        Family::Gp,
        Family::Gpp,
        Family::H,
        Family::Hp,
        Family::Hpp,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::B => "b",
            Family::Bp => "bp",
            Family::Bpp => "bpp",
            Family::C => "c",
            Family::Cp => "cp",
            Family::Cpp => "cpp",
            Family::E => "e",
            Family::G => "g",
            Family::Gp => "gp",
            Family::Gpp => "gpp",
            Family::H => "h",
            Family::Hp => "hp",
            Family::Hpp => "hpp",
        }
    }

    pub const fn is_numerator(self) -> bool {
        (self as usize) < 7
    }

    pub const fn combo(self) -> IndexCombo {
        match self {
            Family::A | Family::E => IndexCombo::Total,
            Family::B | Family::G => IndexCombo::Pair12,
            Family::Bp | Family::Gp => IndexCombo::Pair23,
            Family::Bpp | Family::Gpp => IndexCombo::Pair31,
            Family::C | Family::H => IndexCombo::First,
            Family::Cp | Family::Hp => IndexCombo::Second,
            Family::Cpp | Family::Hpp => IndexCombo::Third,
        }
    }

    /// Families whose Pochhammer symbols involve index `m_{index+1}`.
    pub fn touching(index: usize) -> impl Iterator<Item = Family> {
        Family::ALL
            .into_iter()
            .filter(move |f| f.combo().contains(index))
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family '{s}'")))
    }
}

/// Position `i` (1-based) inside a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FamilyIndex {
    pub family: Family,
    pub i: usize,
}

impl FamilyIndex {
    pub fn new(family: Family, i: usize) -> Self {
        Self { family, i }
    }
}

/// Non-fatal findings of [`ParameterSet::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamWarning {
    /// A denominator entry is a non-positive integer and no numerator entry
    /// stops the series before the pole is reached.
    DenominatorPole(FamilyIndex),
}

impl fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamWarning::DenominatorPole(idx) => {
                write!(f, "DenominatorPole({},{})", idx.family, idx.i)
            }
        }
    }
}

/// The parameter arrays `(a), (b), (b'), ..., (h'')` of the triple series.
///
/// Value semantics: every operation returns a new set.
#[derive(Clone, PartialEq)]
pub struct ParameterSet<S> {
    families: [Vec<S>; 14],
}

impl<S: Scalar> Default for ParameterSet<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: fmt::Debug> fmt::Debug for ParameterSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for family in Family::ALL {
            let entries = &self.families[family.slot()];
            if !entries.is_empty() {
                map.entry(&family.name(), entries);
            }
        }
        map.finish()
    }
}

impl<S> ParameterSet<S> {
    pub fn family(&self, family: Family) -> &[S] {
        &self.families[family.slot()]
    }

    pub fn len(&self, family: Family) -> usize {
        self.families[family.slot()].len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.iter().all(Vec::is_empty)
    }

    /// Iterates `(family, entry)` over all entries, numerators first.
    pub fn entries(&self) -> impl Iterator<Item = (Family, &S)> {
        Family::ALL
            .into_iter()
            .flat_map(move |f| self.families[f.slot()].iter().map(move |v| (f, v)))
    }

    pub fn map<T>(&self, mut f: impl FnMut(&S) -> T) -> ParameterSet<T> {
        ParameterSet {
            families: std::array::from_fn(|slot| self.families[slot].iter().map(&mut f).collect()),
        }
    }

    pub fn try_map<T>(&self, mut f: impl FnMut(&S) -> Result<T>) -> Result<ParameterSet<T>> {
        let mut families: [Vec<T>; 14] = std::array::from_fn(|_| Vec::new());
        for (slot, entries) in self.families.iter().enumerate() {
            families[slot] = entries.iter().map(&mut f).collect::<Result<_>>()?;
        }
        Ok(ParameterSet { families })
    }

    fn check(&self, idx: FamilyIndex) -> Result<usize> {
        let len = self.len(idx.family);
        if idx.i == 0 || idx.i > len {
            return Err(Error::InvalidIndex {
                family: idx.family,
                index: idx.i,
                len,
            });
        }
        Ok(idx.i - 1)
    }

    pub fn get(&self, idx: FamilyIndex) -> Result<&S> {
        let pos = self.check(idx)?;
        Ok(&self.families[idx.family.slot()][pos])
    }
}

impl<S: Scalar> ParameterSet<S> {
    pub fn new() -> Self {
        Self {
            families: std::array::from_fn(|_| Vec::new()),
        }
    }

    /// Builder: replaces a whole family.
    pub fn with(mut self, family: Family, values: impl IntoIterator<Item = S>) -> Self {
        self.families[family.slot()] = values.into_iter().collect();
        self
    }

    /// `(a + k)`: adds `k` to every entry of one family.
    pub fn shift_family(&self, family: Family, k: usize) -> Self {
        let mut out = self.clone();
        let delta = S::from_i64(k as i64);
        for v in &mut out.families[family.slot()] {
            *v = v.clone() + &delta;
        }
        out
    }

    /// Adds `k` (possibly negative) to a single entry.
    pub fn shift_entry(&self, idx: FamilyIndex, k: i64) -> Result<Self> {
        let pos = self.check(idx)?;
        let mut out = self.clone();
        let v = &mut out.families[idx.family.slot()][pos];
        *v = v.clone() + S::from_i64(k);
        Ok(out)
    }

    /// Overwrites a single entry.
    pub fn set_entry(&self, idx: FamilyIndex, value: S) -> Result<Self> {
        let pos = self.check(idx)?;
        let mut out = self.clone();
        out.families[idx.family.slot()][pos] = value;
        Ok(out)
    }

    /// `(a^j)`: removes one entry.
    pub fn drop_entry(&self, idx: FamilyIndex) -> Result<Self> {
        let pos = self.check(idx)?;
        let mut out = self.clone();
        out.families[idx.family.slot()].remove(pos);
        Ok(out)
    }

    /// Appends an entry. Order inside a family does not affect the series.
    pub fn push_entry(&self, family: Family, value: S) -> Self {
        let mut out = self.clone();
        out.families[family.slot()].push(value);
        out
    }

    /// Smallest `n` such that a numerator entry equal to `-n` in a family
    /// whose index combination covers `combo` forces every term with
    /// `combo`-degree above `n` to vanish.
    pub fn termination_bound(&self, combo: IndexCombo) -> Option<u64> {
        self.entries()
            .filter(|(f, _)| f.is_numerator() && f.combo().covers(combo))
            .filter_map(|(_, v)| v.nonpositive_integer())
            .min()
    }

    /// Flags denominator entries that are non-positive integers unless a
    /// numerator entry covering the same indices terminates strictly earlier.
    pub fn validate(&self) -> Vec<ParamWarning> {
        let mut warnings = Vec::new();
        for family in Family::ALL.into_iter().filter(|f| !f.is_numerator()) {
            for (pos, v) in self.family(family).iter().enumerate() {
                let Some(pole) = v.nonpositive_integer() else {
                    continue;
                };
                let covered = self
                    .termination_bound(family.combo())
                    .is_some_and(|n| n < pole);
                if !covered {
                    warnings.push(ParamWarning::DenominatorPole(FamilyIndex::new(family, pos + 1)));
                }
            }
        }
        warnings
    }

    pub fn to_number(&self) -> ParameterSet<Number> {
        self.map(Scalar::to_number)
    }

    pub fn from_number(ps: &ParameterSet<Number>) -> Result<Self> {
        ps.try_map(S::from_number)
    }
}

/// JSON layout: one optional key per family, each a list of numbers or
/// `"p/q"` strings.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ParameterSetJson {
    a: Vec<Number>,
    b: Vec<Number>,
    bp: Vec<Number>,
    bpp: Vec<Number>,
    c: Vec<Number>,
    cp: Vec<Number>,
    cpp: Vec<Number>,
    e: Vec<Number>,
    g: Vec<Number>,
    gp: Vec<Number>,
    gpp: Vec<Number>,
    h: Vec<Number>,
    hp: Vec<Number>,
    hpp: Vec<Number>,
}

impl Serialize for ParameterSet<Number> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let f = |family: Family| self.family(family).to_vec();
        ParameterSetJson {
            a: f(Family::A),
            b: f(Family::B),
            bp: f(Family::Bp),
            bpp: f(Family::Bpp),
            c: f(Family::C),
            cp: f(Family::Cp),
            cpp: f(Family::Cpp),
            e: f(Family::E),
            g: f(Family::G),
            gp: f(Family::Gp),
            gpp: f(Family::Gpp),
            h: f(Family::H),
            hp: f(Family::Hp),
            hpp: f(Family::Hpp),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ParameterSet<Number> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = ParameterSetJson::deserialize(deserializer)?;
        Ok(ParameterSet {
            families: [
                j.a, j.b, j.bp, j.bpp, j.c, j.cp, j.cpp, j.e, j.g, j.gp, j.gpp, j.h, j.hp, j.hpp,
            ],
        })
    }
}
