//! Pauli strings on a periodic chain: products with exact phase tracking,
//! weights, and the operator bases the correlation matrix is built over.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Hamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const NONTRIVIAL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Index into an (X, Y, Z) component array; `None` for the identity.
    pub fn component(self) -> Option<usize> {
        match self {
            PauliAxis::I => None,
            PauliAxis::X => Some(0),
            PauliAxis::Y => Some(1),
            PauliAxis::Z => Some(2),
        }
    }

    pub fn from_component(c: usize) -> PauliAxis {
        PauliAxis::NONTRIVIAL[c]
    }

    pub fn as_char(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<PauliAxis> {
        match c {
            'I' | 'i' => Some(PauliAxis::I),
            'X' | 'x' => Some(PauliAxis::X),
            'Y' | 'y' => Some(PauliAxis::Y),
            'Z' | 'z' => Some(PauliAxis::Z),
            _ => None,
        }
    }
}

/// Element of the cyclic group {+1, +i, -1, -i}, stored as the power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn power_of_i(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// Single-site product: `sigma^a sigma^b = phase * sigma^c`.
pub fn axis_mul(a: PauliAxis, b: PauliAxis) -> (Phase, PauliAxis) {
    use PauliAxis::*;
    match (a, b) {
        (I, p) | (p, I) => (Phase::ONE, p),
        (p, q) if p == q => (Phase::ONE, I),
        (X, Y) => (Phase::I, Z),
        (Y, Z) => (Phase::I, X),
        (Z, X) => (Phase::I, Y),
        (Y, X) => (Phase::MINUS_I, Z),
        (Z, Y) => (Phase::MINUS_I, X),
        (X, Z) => (Phase::MINUS_I, Y),
        _ => unreachable!(),
    }
}

/// Dense tensor product of single-site Paulis, site 0 leftmost in text form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    axes: Vec<PauliAxis>,
}

impl PauliString {
    pub fn identity(sites: usize) -> Self {
        Self { axes: vec![PauliAxis::I; sites] }
    }

    pub fn from_axes(axes: Vec<PauliAxis>) -> Self {
        Self { axes }
    }

    /// String with the given non-identity axes placed at `sites`.
    pub fn from_sparse(sites: usize, ops: &[(usize, PauliAxis)]) -> Self {
        let mut s = Self::identity(sites);
        for &(j, a) in ops {
            s.axes[j] = a;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn axis(&self, site: usize) -> PauliAxis {
        self.axes[site]
    }

    pub fn weight(&self) -> usize {
        self.axes.iter().filter(|&&a| a != PauliAxis::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Non-identity sites with their axis, ascending by site.
    pub fn support(&self) -> Vec<(usize, PauliAxis)> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != PauliAxis::I)
            .map(|(j, &a)| (j, a))
            .collect()
    }

    /// Product `self * other` with the accumulated phase.
    pub fn mul(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        if self.len() != other.len() {
            return Err(Error::Dimension { expected: self.len(), found: other.len() });
        }
        let mut phase = Phase::ONE;
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(&a, &b)| {
                let (p, c) = axis_mul(a, b);
                phase = phase * p;
                c
            })
            .collect();
        Ok((phase, PauliString { axes }))
    }

    /// Whether the two strings commute (an even number of anticommuting sites).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.axes
            .iter()
            .zip(&other.axes)
            .filter(|(&a, &b)| a != PauliAxis::I && b != PauliAxis::I && a != b)
            .count()
            % 2
            == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axes {
            write!(f, "{}", a.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .trim()
            .chars()
            .map(|c| {
                PauliAxis::from_char(c)
                    .ok_or_else(|| Error::Invalid(format!("'{c}' is not a Pauli axis in \"{s}\"")))
            })
            .collect::<Result<Vec<_>>>()?;
        if axes.is_empty() {
            return Err(Error::Invalid("empty Pauli string".into()));
        }
        Ok(PauliString { axes })
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Size of the weight-<=2 basis, `1 + 3L + 9L(L-1)/2`.
pub fn basis_dimension(sites: usize) -> usize {
    1 + 3 * sites + 9 * sites * sites.saturating_sub(1) / 2
}

/// All strings of weight at most `max_weight` in the fixed order: identity,
/// then weight 1 by (site, X<Y<Z), then weight 2 by (site pair, axis pair).
pub fn enumerate_basis(sites: usize, max_weight: usize) -> Result<Vec<PauliString>> {
    if max_weight > 2 {
        return Err(Error::Unsupported(format!(
            "basis weight {max_weight} exceeds the supported maximum of 2"
        )));
    }
    if max_weight == 0 {
        return Err(Error::Invalid("basis weight must be 1 or 2".into()));
    }
    if sites < 2 {
        return Err(Error::Invalid(format!("need at least 2 sites, got {sites}")));
    }
    let mut out = vec![PauliString::identity(sites)];
    for j in 0..sites {
        for a in PauliAxis::NONTRIVIAL {
            out.push(PauliString::from_sparse(sites, &[(j, a)]));
        }
    }
    if max_weight == 2 {
        for i in 0..sites {
            for j in i + 1..sites {
                for a in PauliAxis::NONTRIVIAL {
                    for b in PauliAxis::NONTRIVIAL {
                        out.push(PauliString::from_sparse(sites, &[(i, a), (j, b)]));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Strings whose support is exactly a window of `k` adjacent sites on the
/// periodic chain, in order of window start then lexicographic axes.
pub fn enumerate_contiguous(sites: usize, k: usize) -> Result<Vec<PauliString>> {
    if k == 0 || k > sites {
        return Err(Error::Invalid(format!("window length {k} not in 1..={sites}")));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let combos = 3usize.pow(k as u32);
    for start in 0..sites {
        for code in 0..combos {
            let mut c = code;
            let mut ops = Vec::with_capacity(k);
            for off in (0..k).rev() {
                ops.push(((start + off) % sites, PauliAxis::from_component(c % 3)));
                c /= 3;
            }
            let s = PauliString::from_sparse(sites, &ops);
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// Pauli-sum expansion of `H^2` with like terms merged and exact cancellations dropped.
pub fn expand_square(h: &Hamiltonian) -> Result<Hamiltonian> {
    let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
    for (ca, pa) in h.terms() {
        for (cb, pb) in h.terms() {
            let (phase, s) = pa.mul(pb)?;
            *acc.entry(s).or_default() += phase.to_complex() * (ca * cb);
        }
    }
    let scale: f64 = h.terms().iter().map(|(c, _)| c.abs()).sum::<f64>().powi(2).max(f64::MIN_POSITIVE);
    let mut terms = Vec::with_capacity(acc.len());
    for (s, c) in acc {
        if c.im.abs() > 1e-12 * scale {
            return Err(Error::Numerical(format!(
                "imaginary coefficient {:e} survived in the square at {s}",
                c.im
            )));
        }
        if c.re.abs() > 1e-15 * scale {
            terms.push((c.re, s));
        }
    }
    Hamiltonian::new(format!("{}^2", h.name()), h.sites(), terms)
}
