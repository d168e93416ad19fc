//! `[[n,1,d]]` stabilizer codes.
//!
//! Syndromes are carried as integers: bit `i` of a syndrome is the outcome of
//! generator `i` (0 = commutes, 1 = anticommutes). The same bit layout indexes
//! stabilizer group elements, so element `k` of [`StabilizerCode::group`] is
//! the product of the generators selected by `k`.

use std::fmt;
use std::str::FromStr;

use crate::error::{QecError, Result};
use crate::pauli::{enumerate_group, gf2_rank, symplectic_vector, Letter, PauliString};

/// Largest code for which representatives are found by exhaustive search.
pub const MAX_CODE_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerCode {
    name: String,
    aliases: Vec<String>,
    n: usize,
    distance: Option<usize>,
    generators: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
    group: Vec<PauliString>,
    representatives: Vec<PauliString>,
}

impl StabilizerCode {
    /// Validates the code and precomputes its stabilizer group and the
    /// minimum-weight representative of every syndrome.
    pub fn new(
        name: &str,
        generators: Vec<PauliString>,
        logical_x: PauliString,
        logical_z: PauliString,
    ) -> Result<Self> {
        let n = logical_x.len();
        let bad = |m: String| Err(QecError::InvalidCode(format!("{name}: {m}")));
        if n > MAX_CODE_QUBITS {
            return Err(QecError::TooLarge { what: "code definitions", n, limit: MAX_CODE_QUBITS });
        }
        if logical_z.len() != n {
            return bad(format!("logical operators act on {} and {} qubits", n, logical_z.len()));
        }
        if generators.len() + 1 != n {
            return bad(format!("{} qubits need {} generators, got {}", n, n - 1, generators.len()));
        }
        if let Some(g) = generators.iter().find(|g| !g.is_hermitian()) {
            return bad(format!("generator {g} is not Hermitian"));
        }
        let group = enumerate_group(&generators, n).map_err(|e| QecError::InvalidCode(format!("{name}: {e}")))?;
        for (i, g) in generators.iter().enumerate() {
            for (label, l) in [("logical X", &logical_x), ("logical Z", &logical_z)] {
                if !l.commutes_with(g)? {
                    return bad(format!("{label} {l} anticommutes with generator {i} ({g})"));
                }
            }
        }
        if logical_x.commutes_with(&logical_z)? {
            return bad("logical X and logical Z must anticommute".into());
        }
        let all: Vec<u128> = generators.iter().chain([&logical_x, &logical_z]).map(symplectic_vector).collect();
        if gf2_rank(all) != n + 1 {
            return bad("logical operators are not independent of the stabilizer".into());
        }
        let mut code = StabilizerCode {
            name: name.to_string(),
            aliases: Vec::new(),
            n,
            distance: None,
            generators,
            logical_x: logical_x.unsigned(),
            logical_z: logical_z.unsigned(),
            group,
            representatives: Vec::new(),
        };
        code.representatives = code.min_weight_representatives();
        Ok(code)
    }

    pub fn with_distance(mut self, d: usize) -> Self {
        self.distance = Some(d);
        self
    }

    pub fn with_aliases(mut self, aliases: Vec<String>) -> Self {
        self.aliases = aliases;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn aliases(&self) -> &[String] {
        &self.aliases
    }

    pub fn matches_name(&self, s: &str) -> bool {
        self.name.eq_ignore_ascii_case(s) || self.aliases.iter().any(|a| a.eq_ignore_ascii_case(s))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance, when the definition supplies one. Not used in computation.
    pub fn distance(&self) -> Option<usize> {
        self.distance
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn num_syndromes(&self) -> usize {
        1 << self.generators.len()
    }

    pub fn group(&self) -> &[PauliString] {
        &self.group
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    /// Logical operator for a single-qubit label; `Y = i X Z`.
    pub fn logical(&self, l: Letter) -> PauliString {
        match l {
            Letter::I => PauliString::identity(self.n).expect("valid width"),
            Letter::X => self.logical_x,
            Letter::Z => self.logical_z,
            Letter::Y => {
                let xz = self.logical_x.multiply(&self.logical_z).expect("same width");
                xz.with_phase(xz.phase() + 1)
            }
        }
    }

    /// Recovery representative used for each syndrome, indexed by syndrome.
    pub fn representatives(&self) -> &[PauliString] {
        &self.representatives
    }

    pub fn representative(&self, syndrome: u64) -> &PauliString {
        &self.representatives[syndrome as usize]
    }

    /// Replaces the recovery representatives. Each must carry its syndrome.
    pub fn with_representatives(mut self, reps: Vec<PauliString>) -> Result<Self> {
        if reps.len() != self.num_syndromes() {
            return Err(QecError::InvalidCode(format!(
                "{} representatives supplied for {} syndromes",
                reps.len(),
                self.num_syndromes()
            )));
        }
        for (s, r) in reps.iter().enumerate() {
            if self.syndrome_of(r)? != s as u64 {
                return Err(QecError::InvalidCode(format!("representative {r} does not have syndrome {s}")));
            }
        }
        self.representatives = reps;
        Ok(self)
    }

    pub(crate) fn syndrome_bits(&self, x: u64, z: u64) -> u64 {
        let mut s = 0u64;
        for (i, g) in self.generators.iter().enumerate() {
            let odd = ((x & g.z_bits()) ^ (z & g.x_bits())).count_ones() & 1;
            s |= (odd as u64) << i;
        }
        s
    }

    /// Syndrome of an error; bit `i` is set when the error anticommutes with
    /// generator `i`.
    pub fn syndrome_of(&self, e: &PauliString) -> Result<u64> {
        if e.len() != self.n {
            return Err(QecError::LengthMismatch(e.len(), self.n));
        }
        Ok(self.syndrome_bits(e.x_bits(), e.z_bits()))
    }

    /// Logical class of `e` after the representative recovery for its
    /// syndrome has been applied.
    pub fn logical_class(&self, e: &PauliString) -> Result<Letter> {
        let s = self.syndrome_of(e)?;
        let r = self.representative(s);
        Ok(self.class_of_pattern(e.x_bits() ^ r.x_bits(), e.z_bits() ^ r.z_bits()))
    }

    /// Class of an element of the normalizer given by its bit pattern.
    pub(crate) fn class_of_pattern(&self, x: u64, z: u64) -> Letter {
        let anti = |l: &PauliString| ((x & l.z_bits()) ^ (z & l.x_bits())).count_ones() & 1 == 1;
        match (anti(&self.logical_z), anti(&self.logical_x)) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    /// Terms of the encoding column for the logical label `s`: the logical
    /// operator times every stabilizer element, signs carried in the phases.
    pub fn encoding_column(&self, s: Letter) -> Result<Vec<PauliString>> {
        if self.n > 8 {
            return Err(QecError::TooLarge {
                what: "encoding columns (use the diagonal coset map)",
                n: self.n,
                limit: 8,
            });
        }
        let l = self.logical(s);
        self.group.iter().map(|g| l.multiply(g)).collect()
    }

    /// Minimum-weight Pauli per syndrome. Ties go to the fewest X plus Z
    /// factors (a Y counts twice), then to the smallest `(x, z)` bits; for a
    /// CSS code this corrects the X and Z parts independently.
    fn min_weight_representatives(&self) -> Vec<PauliString> {
        let n = self.n;
        let mut best: Vec<Option<(u32, u32, u64, u64)>> = vec![None; self.num_syndromes()];
        for x in 0..1u64 << n {
            for z in 0..1u64 << n {
                let key = ((x | z).count_ones(), x.count_ones() + z.count_ones(), x, z);
                let slot = &mut best[self.syndrome_bits(x, z) as usize];
                if slot.is_none_or(|b| key < b) {
                    *slot = Some(key);
                }
            }
        }
        best.into_iter()
            .map(|b| {
                let (_, _, x, z) = b.expect("every syndrome is reachable");
                PauliString::from_bits(n, x, z, 0).expect("valid width")
            })
            .collect()
    }

    /// Serializes to the line-oriented definition format.
    pub fn to_text(&self) -> String {
        let mut out = format!("name {}\n", self.name);
        for a in &self.aliases {
            out += &format!("alias {a}\n");
        }
        out += &format!("n {}\n", self.n);
        if let Some(d) = self.distance {
            out += &format!("d {d}\n");
        }
        for g in &self.generators {
            out += &format!("generator {g}\n");
        }
        out += &format!("logical_x {}\nlogical_z {}\n", self.logical_x, self.logical_z);
        out
    }
}

impl fmt::Display for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.distance {
            Some(d) => write!(f, "{} [[{},1,{}]]", self.name, self.n, d),
            None => write!(f, "{} [[{},1]]", self.name, self.n),
        }
    }
}

impl FromStr for StabilizerCode {
    type Err = QecError;

    /// Parses the definition format:
    ///
    /// ```text
    /// # comment
    /// name five-qubit
    /// alias 513
    /// n 5
    /// d 3
    /// generator XZZXI
    /// ...
    /// logical_x XXXXX
    /// logical_z ZZZZZ
    /// ```
    fn from_str(text: &str) -> Result<Self> {
        let mut name = None;
        let mut aliases = Vec::new();
        let mut n = None;
        let mut d = None;
        let mut generators = Vec::new();
        let (mut lx, mut lz) = (None, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| QecError::InvalidCode(format!("line {}: {m}: {raw:?}", lineno + 1));
            let (key, value) = line.split_once(char::is_whitespace).ok_or_else(|| err("expected `key value`"))?;
            let value = value.trim();
            match key {
                "name" => name = Some(value.to_string()),
                "alias" => aliases.push(value.to_string()),
                "n" => n = Some(value.parse::<usize>().map_err(|_| err("bad qubit count"))?),
                "d" => d = Some(value.parse::<usize>().map_err(|_| err("bad distance"))?),
                "generator" => generators.push(value.parse::<PauliString>()?),
                "logical_x" => lx = Some(value.parse::<PauliString>()?),
                "logical_z" => lz = Some(value.parse::<PauliString>()?),
                _ => return Err(err("unknown key")),
            }
        }
        let name = name.ok_or_else(|| QecError::InvalidCode("missing `name`".into()))?;
        let lx = lx.ok_or_else(|| QecError::InvalidCode(format!("{name}: missing `logical_x`")))?;
        let lz = lz.ok_or_else(|| QecError::InvalidCode(format!("{name}: missing `logical_z`")))?;
        if let Some(n) = n {
            if let Some(bad) = generators.iter().chain([&lx, &lz]).find(|p| p.len() != n) {
                return Err(QecError::InvalidCode(format!("{name}: {bad} does not act on {n} qubits")));
            }
        }
        let code = StabilizerCode::new(&name, generators, lx, lz)?.with_aliases(aliases);
        Ok(match d {
            Some(d) => code.with_distance(d),
            None => code,
        })
    }
}

const BUILTIN_DEFINITIONS: [&str; 4] = [
    include_str!("../codes/bitflip2.code"),
    include_str!("../codes/repetition3.code"),
    include_str!("../codes/five-qubit.code"),
    include_str!("../codes/steane.code"),
];

/// The shipped code definitions: `bitflip2`, `repetition3`, `five-qubit` and
/// `steane`.
pub fn builtin_codes() -> Vec<StabilizerCode> {
    BUILTIN_DEFINITIONS.iter().map(|t| t.parse().expect("builtin code definitions are valid")).collect()
}

/// Looks up a builtin code by name or alias.
pub fn builtin_code(name: &str) -> Result<StabilizerCode> {
    builtin_codes().into_iter().find(|c| c.matches_name(name)).ok_or_else(|| QecError::UnknownCode(name.to_string()))
}
