//! n-qubit Pauli operators in the symplectic representation.
//!
//! An operator is stored as two bit masks plus a power of `i`:
//!
//! ```text
//! P = i^phase * P(x_0, z_0) ⊗ P(x_1, z_1) ⊗ ...
//! ```
//!
//! with `P(0,0) = I`, `P(1,0) = X`, `P(1,1) = Y`, `P(0,1) = Z`. Qubit 0 is the
//! leftmost letter of the text form and bit 0 of each mask. The global phase
//! convention is `Y = iXZ`, so `XZ = -iY` and `XY = iZ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QecError, Result};

pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli label. The discriminant is the component index used by
/// [`crate::channel::PauliProbVec`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Letter {
        Letter::ALL[i & 3]
    }

    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    /// Label of the product (phases dropped).
    pub fn compose(self, other: Letter) -> Letter {
        // With I=0, X=1, Y=2, Z=3 the group law on labels is XOR.
        Letter::from_index(self.index() ^ other.index())
    }

    /// `true` when the two letters commute.
    pub fn commutes(self, other: Letter) -> bool {
        let (xa, za) = self.bits();
        let (xb, zb) = other.bits();
        !((xa & zb) ^ (za & xb))
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' | '_' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Letter {
    type Err = QecError;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        match (chars.next().and_then(Letter::from_char), chars.next()) {
            (Some(l), None) => Ok(l),
            _ => Err(QecError::ParsePauli(s.to_string(), "expected one of I, X, Y, Z".into())),
        }
    }
}

/// Phase exponent `k` such that `P(x1,z1) P(x2,z2) = i^k P(x1^x2, z1^z2)`.
fn product_phase(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

/// An n-qubit Pauli operator with phase.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

fn width_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_bits(n, 0, 0, 0)
    }

    /// Builds an operator from raw masks; bits above `n` must be clear.
    pub fn from_bits(n: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(QecError::UnsupportedWidth(n));
        }
        let m = width_mask(n);
        if x & !m != 0 || z & !m != 0 {
            return Err(QecError::InvalidArgument(format!("bit masks {x:#x}/{z:#x} exceed {n} qubits")));
        }
        Ok(PauliString { n, x, z, phase: phase & 3 })
    }

    pub fn from_letters(letters: &[Letter]) -> Result<Self> {
        let n = letters.len();
        let (mut x, mut z) = (0u64, 0u64);
        for (q, l) in letters.iter().enumerate() {
            let (xb, zb) = l.bits();
            x |= (xb as u64) << q;
            z |= (zb as u64) << q;
        }
        Self::from_bits(n, x, z, 0)
    }

    /// Single-qubit letter `letter` on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: Letter) -> Result<Self> {
        if q >= n {
            return Err(QecError::InvalidArgument(format!("qubit {q} out of range for {n} qubits")));
        }
        let (xb, zb) = letter.bits();
        Self::from_bits(n, (xb as u64) << q, (zb as u64) << q, 0)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    /// Power of `i` multiplying the Hermitian letter string.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// Same letters with phase `+1`.
    pub fn unsigned(&self) -> Self {
        PauliString { phase: 0, ..*self }
    }

    pub fn with_phase(&self, phase: u8) -> Self {
        PauliString { phase: phase & 3, ..*self }
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// `true` for phases `±1`.
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(QecError::LengthMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    /// `true` when the two operators commute. Phases are ignored.
    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.symplectic(other) == 0)
    }

    fn symplectic(&self, other: &Self) -> u32 {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() & 1
    }

    /// Commutation sign: `+1` if the operators commute, `-1` otherwise.
    pub fn eta(&self, other: &Self) -> Result<i8> {
        Ok(if self.commutes_with(other)? { 1 } else { -1 })
    }

    /// Operator product `self · other` with the exact phase.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut k = self.phase as i32 + other.phase as i32;
        for q in 0..self.n {
            k +=
                product_phase(self.x >> q & 1 == 1, self.z >> q & 1 == 1, other.x >> q & 1 == 1, other.z >> q & 1 == 1);
        }
        Ok(PauliString { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z, phase: k.rem_euclid(4) as u8 })
    }
}

/// Commutation sign of two operators.
pub fn eta(a: &PauliString, b: &PauliString) -> Result<i8> {
    a.eta(b)
}

/// Operator product `a · b`.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.multiply(b)
}

/// Rank over GF(2) of the symplectic vectors `(x | z)`.
pub(crate) fn gf2_rank(rows: impl IntoIterator<Item = u128>) -> usize {
    let mut basis: Vec<u128> = Vec::new();
    for mut v in rows {
        for b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

pub(crate) fn symplectic_vector(p: &PauliString) -> u128 {
    (p.x as u128) | ((p.z as u128) << 64)
}

/// All `2^m` products of `m` commuting, independent generators.
///
/// Element `k` of the result is the ordered product of the generators whose
/// bit is set in `k`, lowest index first.
pub fn enumerate_group(generators: &[PauliString], n: usize) -> Result<Vec<PauliString>> {
    for (i, g) in generators.iter().enumerate() {
        if g.len() != n {
            return Err(QecError::LengthMismatch(g.len(), n));
        }
        for (j, h) in generators.iter().enumerate().skip(i + 1) {
            if !g.commutes_with(h)? {
                return Err(QecError::NonCommutingGenerators(i, j));
            }
        }
    }
    if gf2_rank(generators.iter().map(symplectic_vector)) != generators.len() {
        return Err(QecError::DependentGenerators);
    }
    if generators.len() > 24 {
        return Err(QecError::TooLarge { what: "group enumeration", n: generators.len(), limit: 24 });
    }
    let mut out = Vec::with_capacity(1 << generators.len());
    out.push(PauliString::identity(n)?);
    for g in generators {
        // Appending g·(previous half) keeps element k equal to the product of
        // generators in bitmask k, in increasing generator order.
        let half = out.len();
        for k in 0..half {
            let e = out[k].multiply(g)?;
            out.push(e);
        }
    }
    Ok(out)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QecError;

    /// Parses `"XIZ"` with an optional `+`, `-`, `i`, `+i` or `-i` prefix.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace('−', "-");
        let (phase, body) = if let Some(rest) = t.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = t.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = t.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = t.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = t.strip_prefix('i') {
            (1, rest)
        } else {
            (0, t.as_str())
        };
        let letters = body
            .chars()
            .map(|c| {
                Letter::from_char(c)
                    .ok_or_else(|| QecError::ParsePauli(s.to_string(), format!("unexpected character {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(QecError::ParsePauli(s.to_string(), "no qubits".into()));
        }
        if letters.len() > MAX_QUBITS {
            return Err(QecError::UnsupportedWidth(letters.len()));
        }
        Ok(PauliString::from_letters(&letters)?.with_phase(phase))
    }
}
