//! One-qubit Pauli channels and quasi-channels.
//!
//! A Pauli (quasi-)channel is carried either as its error probabilities
//! `(p_I, p_X, p_Y, p_Z)` or as the diagonal `[p, x, y, z]` of its Pauli-basis
//! superoperator. The two are related by a 4-point Hadamard transform.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QecError, Result};
use crate::pauli::Letter;

/// Clamping and comparison tolerance for probabilities.
pub const PROB_EPS: f64 = 1e-12;

/// `-x log2 x`, with `h(0) = 0`.
pub fn h(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Pauli error probabilities `(p_I, p_X, p_Y, p_Z)` of a (quasi-)channel.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliProbVec(pub [f64; 4]);

impl PauliProbVec {
    pub const IDENTITY: PauliProbVec = PauliProbVec([1.0, 0.0, 0.0, 0.0]);

    /// Validates components: values in `[-PROB_EPS, 0)` are clamped to zero,
    /// anything lower is rejected.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        let mut out = p;
        for (index, v) in out.iter_mut().enumerate() {
            if !v.is_finite() || *v < -PROB_EPS {
                return Err(QecError::NegativeProbability { index, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(PauliProbVec(out))
    }

    pub fn get(&self, l: Letter) -> f64 {
        self.0[l.index()]
    }

    pub fn weight(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Rescaled to unit weight.
    pub fn normalized(&self) -> Result<Self> {
        let w = self.weight();
        if !(w > 0.0) {
            return Err(QecError::NonPositiveWeight(w));
        }
        Ok(self.scaled(1.0 / w))
    }

    pub fn scaled(&self, s: f64) -> Self {
        PauliProbVec(self.0.map(|v| v * s))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `1 - p_I / weight`.
    pub fn infidelity(&self) -> f64 {
        1.0 - self.0[0] / self.weight()
    }
}

impl fmt::Display for PauliProbVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, x, y, z] = self.0;
        write!(f, "(pI={i:.10e}, pX={x:.10e}, pY={y:.10e}, pZ={z:.10e})")
    }
}

/// Diagonal `[p, x, y, z]` of a Pauli quasi-channel superoperator.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalQuasiChannel(pub [f64; 4]);

/// Signs `eta(sigma, sigma')`: row = error letter, column = basis letter.
pub(crate) const ETA: [[f64; 4]; 4] =
    [[1.0, 1.0, 1.0, 1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];

/// Probabilities from superoperator diagonal. The transform is its own inverse
/// up to a factor of 4.
pub(crate) fn hadamard4(d: &[f64; 4]) -> [f64; 4] {
    let [p, x, y, z] = *d;
    [(p + x + y + z) / 4.0, (p + x - y - z) / 4.0, (p - x + y - z) / 4.0, (p - x - y + z) / 4.0]
}

/// Pauli probabilities of a diagonal quasi-channel. Rejects diagonals whose
/// probabilities fall below `-PROB_EPS` (not a Pauli channel).
pub fn diag_to_probs(d: &DiagonalQuasiChannel) -> Result<PauliProbVec> {
    PauliProbVec::new(hadamard4(&d.0))
}

/// Superoperator diagonal of a Pauli quasi-channel.
pub fn probs_to_diag(p: &PauliProbVec) -> DiagonalQuasiChannel {
    let mut d = [0.0; 4];
    for (e, row) in ETA.iter().enumerate() {
        for (b, s) in row.iter().enumerate() {
            d[b] += s * p.0[e];
        }
    }
    DiagonalQuasiChannel(d)
}

/// Shannon entropy in bits of the normalized error distribution.
pub fn entropy(p: &PauliProbVec) -> Result<f64> {
    let w = p.weight();
    if !(w > 0.0) {
        return Err(QecError::NonPositiveWeight(w));
    }
    Ok(p.0.iter().map(|&v| h(v / w)).sum())
}

/// Contribution of a quasi-channel to the entropy of the ensemble it belongs
/// to: `-h(w) + sum h(p_sigma)`, which equals `w * entropy(p)`.
pub fn quasi_entropy_contribution(p: &PauliProbVec) -> Result<f64> {
    let w = p.weight();
    if !(w > 0.0) {
        return Err(QecError::NonPositiveWeight(w));
    }
    Ok(-h(w) + p.0.iter().map(|&v| h(v)).sum::<f64>())
}

/// The channel followed by the Pauli `s`: error labels are relabeled by
/// `sigma -> sigma * s`, so the new `p_I` is the old `p_s`.
pub fn apply_logical_pauli(p: &PauliProbVec, s: Letter) -> PauliProbVec {
    let mut out = [0.0; 4];
    for (sigma, v) in out.iter_mut().enumerate() {
        *v = p.0[sigma ^ s.index()];
    }
    PauliProbVec(out)
}

/// Named one-parameter families of Pauli noise.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseFamily {
    /// `(p, p, p)`
    Depolarizing,
    /// Independent bit and phase flips: `(p - p^2, p^2, p - p^2)`.
    IndepFlips,
    /// `(0, 0, p)`
    PhaseFlip,
    /// `(p, 0, p)`
    TwoAxis,
}

impl NoiseFamily {
    pub const ALL: [NoiseFamily; 4] =
        [NoiseFamily::Depolarizing, NoiseFamily::IndepFlips, NoiseFamily::PhaseFlip, NoiseFamily::TwoAxis];

    pub fn name(self) -> &'static str {
        match self {
            NoiseFamily::Depolarizing => "depolarizing",
            NoiseFamily::IndepFlips => "indep-flips",
            NoiseFamily::PhaseFlip => "phase-flip",
            NoiseFamily::TwoAxis => "two-axis",
        }
    }

    /// Largest parameter with `p_I >= 0`.
    pub fn max_param(self) -> f64 {
        match self {
            NoiseFamily::Depolarizing => 1.0 / 3.0,
            NoiseFamily::IndepFlips | NoiseFamily::PhaseFlip => 1.0,
            NoiseFamily::TwoAxis => 0.5,
        }
    }

    /// Bracket on which the level-0 entropy rises from 0 to its maximum.
    pub fn search_bracket(self) -> (f64, f64) {
        match self {
            NoiseFamily::Depolarizing => (0.0, 0.25),
            NoiseFamily::IndepFlips | NoiseFamily::PhaseFlip => (0.0, 0.5),
            NoiseFamily::TwoAxis => (0.0, 1.0 / 3.0),
        }
    }

    pub fn probs(self, p: f64) -> Result<PauliProbVec> {
        if !(0.0..=self.max_param() + PROB_EPS).contains(&p) {
            return Err(QecError::FamilyRange { family: self.name(), param: p });
        }
        let (x, y, z) = match self {
            NoiseFamily::Depolarizing => (p, p, p),
            NoiseFamily::IndepFlips => (p - p * p, p * p, p - p * p),
            NoiseFamily::PhaseFlip => (0.0, 0.0, p),
            NoiseFamily::TwoAxis => (p, 0.0, p),
        };
        PauliProbVec::new([1.0 - x - y - z, x, y, z])
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseFamily {
    type Err = QecError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "depolarizing" | "depol" => Ok(NoiseFamily::Depolarizing),
            "indep-flips" | "independent" | "indep" => Ok(NoiseFamily::IndepFlips),
            "phase-flip" | "dephasing" => Ok(NoiseFamily::PhaseFlip),
            "two-axis" => Ok(NoiseFamily::TwoAxis),
            _ => Err(QecError::UnknownFamily(s.to_string())),
        }
    }
}

/// Constructor by family name.
pub fn noise_family(name: &str, p: f64) -> Result<PauliProbVec> {
    name.parse::<NoiseFamily>()?.probs(p)
}

/// Real 4x4 superoperator in the Pauli basis `{I, X, Y, Z}`, indexed
/// `[output][input]`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneQubitSuperop(pub [[f64; 4]; 4]);

impl OneQubitSuperop {
    pub fn identity() -> Self {
        Self::diagonal(&DiagonalQuasiChannel([1.0; 4]))
    }

    pub fn diagonal(d: &DiagonalQuasiChannel) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = d.0[i];
        }
        OneQubitSuperop(m)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let row = self.0[0];
        (row[0] - 1.0).abs() <= tol && row[1..].iter().all(|v| v.abs() <= tol)
    }

    pub fn diag(&self) -> DiagonalQuasiChannel {
        DiagonalQuasiChannel([self.0[0][0], self.0[1][1], self.0[2][2], self.0[3][3]])
    }
}

pub type Mat2 = [[Complex64; 2]; 2];

pub(crate) fn pauli_matrix(l: Letter) -> Mat2 {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match l {
        Letter::I => [[one, o], [o, one]],
        Letter::X => [[o, one], [one, o]],
        Letter::Y => [[o, -i], [i, o]],
        Letter::Z => [[one, o], [o, -one]],
    }
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            for col in 0..2 {
                c[r][col] += a[r][k] * b[k][col];
            }
        }
    }
    c
}

fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Pauli-basis superoperator of the map `rho -> sum_i A_i rho A_i^dagger`:
/// `N[s][t] = tr(s A t A^dagger) / 2` summed over Kraus operators.
///
/// Incomplete Kraus sets are accepted and yield a quasi-channel; check
/// [`OneQubitSuperop::is_trace_preserving`].
pub fn superop_of_kraus(kraus: &[Mat2]) -> Result<OneQubitSuperop> {
    if kraus.is_empty() {
        return Err(QecError::InvalidArgument("empty Kraus set".into()));
    }
    let mut m = [[0.0; 4]; 4];
    for (s, row) in m.iter_mut().enumerate() {
        let ps = pauli_matrix(Letter::from_index(s));
        for (t, entry) in row.iter_mut().enumerate() {
            let pt = pauli_matrix(Letter::from_index(t));
            let mut acc = Complex64::new(0.0, 0.0);
            for a in kraus {
                let prod = matmul(&ps, &matmul(a, &matmul(&pt, &dagger(a))));
                acc += (prod[0][0] + prod[1][1]) * 0.5;
            }
            if acc.im.abs() > 1e-10 {
                return Err(QecError::NotHermiticityPreserving);
            }
            *entry = acc.re;
        }
    }
    Ok(OneQubitSuperop(m))
}
