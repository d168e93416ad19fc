//! One level of encoding: from per-qubit Pauli noise on the physical qubits
//! of a code to the logical quasi-channel left behind by each syndrome.
//!
//! Two routes compute the same map:
//!
//! * [`LevelMap::coset_quasi`] evaluates the stabilizer-coset sum on the
//!   superoperator diagonals. For logical label `t` and syndrome `b` with
//!   recovery `r_b`, the diagonal entry is
//!   `2^-m * sum_s eta(r_b, T s) N[T s]` where `T` is the logical operator for
//!   `t`, `s` runs over the stabilizer group and `N[P]` is the product of the
//!   per-qubit diagonal entries along `P`. Since `eta(r_b, T s)` factors into
//!   `eta(r_b, T) * (-1)^(b.s)`, the sum over `s` for all syndromes at once is a
//!   Walsh-Hadamard transform of length `2^m`.
//! * [`LevelMap::coset_quasi_enumerated`] bins all `4^n` physical errors by
//!   syndrome and logical class. It is the reference implementation.
//!
//! [`general_map_oracle`] handles arbitrary (non-diagonal) per-qubit
//! superoperators on codes of up to three qubits.

use serde::{Deserialize, Serialize};

use crate::channel::{hadamard4, probs_to_diag, OneQubitSuperop, PauliProbVec, PROB_EPS};
use crate::code::StabilizerCode;
use crate::error::{QecError, Result};
use crate::pauli::{Letter, PauliString};

/// Normalization slack accepted on block noise entries.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Independent Pauli noise on each physical qubit of a block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockNoise {
    pub per_qubit: Vec<PauliProbVec>,
}

impl BlockNoise {
    pub fn new(per_qubit: Vec<PauliProbVec>) -> Result<Self> {
        for (qubit, p) in per_qubit.iter().enumerate() {
            let weight = p.weight();
            if (weight - 1.0).abs() > NORMALIZATION_TOL || p.0.iter().any(|&v| v < -PROB_EPS) {
                return Err(QecError::Unnormalized { qubit, weight });
            }
        }
        Ok(BlockNoise { per_qubit })
    }

    pub fn uniform(p: PauliProbVec, n: usize) -> Result<Self> {
        Self::new(vec![p; n])
    }
}

/// The logical channel conditioned on one syndrome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyndromeChannel {
    pub syndrome: u64,
    pub recovery: PauliString,
    /// Probability of observing the syndrome.
    pub weight: f64,
    /// Logical channel given the syndrome, normalized to unit weight. The
    /// identity channel stands in when `weight` is zero.
    pub channel: PauliProbVec,
}

impl SyndromeChannel {
    /// The unnormalized quasi-channel `weight * channel`.
    pub fn quasi(&self) -> PauliProbVec {
        self.channel.scaled(self.weight)
    }
}

/// Precomputed tables for evaluating one code's level map.
#[derive(Clone, Debug)]
pub struct LevelMap {
    code: StabilizerCode,
    m: usize,
    /// `letters[(t * 2^m + s) * n + q]`: letter on qubit `q` of logical `t`
    /// times stabilizer element `s`.
    letters: Vec<u8>,
    /// `signs[b * 4 + t] = eta(r_b, T)`.
    signs: Vec<f64>,
    /// Syndrome-major bin `4 * b + class` of each physical error, indexed by
    /// `sum_q letter_q 4^q`. Built lazily by the enumeration oracle.
    error_bins: std::sync::OnceLock<Vec<u32>>,
}

impl LevelMap {
    pub fn new(code: &StabilizerCode) -> Self {
        let n = code.n();
        let m = code.generators().len();
        let mut letters = Vec::with_capacity(4 << m << n.max(1));
        for t in Letter::ALL {
            let logical = code.logical(t);
            for s in code.group() {
                let ts = logical.multiply(s).expect("same width");
                letters.extend((0..n).map(|q| ts.letter(q) as u8));
            }
        }
        let mut signs = Vec::with_capacity(4 << m);
        for r in code.representatives() {
            for t in Letter::ALL {
                signs.push(r.eta(&code.logical(t)).expect("same width") as f64);
            }
        }
        LevelMap { code: code.clone(), m, letters, signs, error_bins: Default::default() }
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn num_syndromes(&self) -> usize {
        1 << self.m
    }

    /// Unnormalized per-syndrome quasi-channels (indexed by syndrome) via the
    /// stabilizer-coset sum. Inputs are not validated.
    pub fn coset_quasi(&self, per_qubit: &[PauliProbVec]) -> Vec<PauliProbVec> {
        let mut out = vec![PauliProbVec([0.0; 4]); self.num_syndromes()];
        self.coset_quasi_into(per_qubit, &mut out, &mut Vec::new());
        out
    }

    /// As [`LevelMap::coset_quasi`], writing into `out` and reusing `scratch`.
    pub fn coset_quasi_into(&self, per_qubit: &[PauliProbVec], out: &mut [PauliProbVec], scratch: &mut Vec<f64>) {
        let n = self.code.n();
        let len = self.num_syndromes();
        assert_eq!(per_qubit.len(), n, "one channel per physical qubit");
        assert_eq!(out.len(), len);
        let diags: Vec<[f64; 4]> = per_qubit.iter().map(|p| probs_to_diag(p).0).collect();
        scratch.clear();
        scratch.resize(4 * len, 0.0);
        for (t, block) in scratch.chunks_exact_mut(len).enumerate() {
            let rows = &self.letters[t * len * n..(t + 1) * len * n];
            for (v, pattern) in block.iter_mut().zip(rows.chunks_exact(n)) {
                *v = pattern.iter().zip(&diags).map(|(&l, d)| d[l as usize]).product();
            }
            walsh_hadamard(block);
        }
        let scale = 1.0 / len as f64;
        for (b, slot) in out.iter_mut().enumerate() {
            let mut d = [0.0; 4];
            for (t, v) in d.iter_mut().enumerate() {
                *v = self.signs[4 * b + t] * scratch[t * len + b] * scale;
            }
            // Cancellation in the transform can leave components a few ulps
            // below zero.
            *slot = PauliProbVec(hadamard4(&d).map(|v| v.max(0.0)));
        }
    }

    fn error_bins(&self) -> &[u32] {
        self.error_bins.get_or_init(|| {
            let n = self.code.n();
            (0..1usize << (2 * n))
                .map(|idx| {
                    let (mut x, mut z) = (0u64, 0u64);
                    for q in 0..n {
                        let (xb, zb) = Letter::from_index(idx >> (2 * q)).bits();
                        x |= (xb as u64) << q;
                        z |= (zb as u64) << q;
                    }
                    let s = self.code.syndrome_bits(x, z);
                    let r = self.code.representative(s);
                    let class = self.code.class_of_pattern(x ^ r.x_bits(), z ^ r.z_bits());
                    (4 * s as u32) | class as u32
                })
                .collect()
        })
    }

    /// Reference implementation of [`LevelMap::coset_quasi`]: sums the
    /// probability of every physical error into its (syndrome, logical class)
    /// bin.
    pub fn coset_quasi_enumerated(&self, per_qubit: &[PauliProbVec]) -> Vec<PauliProbVec> {
        let n = self.code.n();
        assert_eq!(per_qubit.len(), n, "one channel per physical qubit");
        // probs[idx] = prod_q p_q[letter_q] with idx = sum_q letter_q 4^q.
        let mut probs = vec![1.0];
        for p in per_qubit.iter().rev() {
            probs = probs.iter().flat_map(|&a| p.0.map(|v| a * v)).collect();
        }
        let mut out = vec![PauliProbVec([0.0; 4]); self.num_syndromes()];
        for (&bin, pr) in self.error_bins().iter().zip(probs) {
            out[(bin >> 2) as usize].0[(bin & 3) as usize] += pr;
        }
        out
    }

    fn package(&self, quasi: Vec<PauliProbVec>) -> Vec<SyndromeChannel> {
        quasi
            .into_iter()
            .enumerate()
            .map(|(s, q)| {
                let weight = q.weight();
                SyndromeChannel {
                    syndrome: s as u64,
                    recovery: *self.code.representative(s as u64),
                    weight,
                    channel: if weight > 0.0 { q.scaled(1.0 / weight) } else { PauliProbVec::IDENTITY },
                }
            })
            .collect()
    }

    /// Per-syndrome conditional channels, fast path.
    pub fn coset_map(&self, noise: &BlockNoise) -> Result<Vec<SyndromeChannel>> {
        self.check_block(noise)?;
        Ok(self.package(self.coset_quasi(&noise.per_qubit)))
    }

    /// Per-syndrome conditional channels by error enumeration.
    pub fn coset_map_enumerated(&self, noise: &BlockNoise) -> Result<Vec<SyndromeChannel>> {
        self.check_block(noise)?;
        if self.code.n() > 10 {
            return Err(QecError::TooLarge { what: "error enumeration", n: self.code.n(), limit: 10 });
        }
        Ok(self.package(self.coset_quasi_enumerated(&noise.per_qubit)))
    }

    fn check_block(&self, noise: &BlockNoise) -> Result<()> {
        if noise.per_qubit.len() != self.code.n() {
            return Err(QecError::LengthMismatch(noise.per_qubit.len(), self.code.n()));
        }
        Ok(())
    }

    /// Logical channel with syndrome information discarded and the fixed
    /// representative recoveries applied.
    pub fn blind_map(&self, p: &PauliProbVec) -> Result<PauliProbVec> {
        let noise = BlockNoise::uniform(*p, self.code.n())?;
        let mut total = [0.0; 4];
        for q in self.coset_quasi(&noise.per_qubit) {
            for (t, v) in total.iter_mut().zip(q.0) {
                *t += v;
            }
        }
        Ok(PauliProbVec(total))
    }
}

/// In-place unnormalized Walsh-Hadamard transform:
/// `out[b] = sum_k (-1)^popcount(b & k) in[k]`.
pub(crate) fn walsh_hadamard(v: &mut [f64]) {
    let len = v.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Per-syndrome conditional channels (fast path).
pub fn coset_map(code: &StabilizerCode, noise: &BlockNoise) -> Result<Vec<SyndromeChannel>> {
    LevelMap::new(code).coset_map(noise)
}

/// Syndrome-blind logical channel under uniform noise `p`.
pub fn blind_map(code: &StabilizerCode, p: &PauliProbVec) -> Result<PauliProbVec> {
    LevelMap::new(code).blind_map(p)
}

/// Logical 4x4 superoperator per syndrome, indexed `[syndrome][output][input]`,
/// from arbitrary per-qubit superoperators. Builds the full `4^n x 4^n`
/// product superoperator, so codes are limited to three qubits.
pub fn general_map_oracle(code: &StabilizerCode, superops: &[OneQubitSuperop]) -> Result<Vec<[[f64; 4]; 4]>> {
    let n = code.n();
    if n > 3 {
        return Err(QecError::TooLarge { what: "the general superoperator oracle", n, limit: 3 });
    }
    if superops.len() != n {
        return Err(QecError::LengthMismatch(superops.len(), n));
    }
    let dim = 1usize << (2 * n);
    let index = |p: &PauliString| (0..n).map(|q| p.letter(q).index() << (2 * q)).sum::<usize>();
    let letter_at = |idx: usize, q: usize| (idx >> (2 * q)) & 3;

    let mut full = vec![0.0; dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            full[a * dim + b] = (0..n).map(|q| superops[q].0[letter_at(a, q)][letter_at(b, q)]).product();
        }
    }
    let mut columns = Vec::with_capacity(4);
    for t in Letter::ALL {
        let mut col = vec![0.0; dim];
        for term in code.encoding_column(t)? {
            debug_assert!(term.is_hermitian());
            col[index(&term)] += if term.phase() == 0 { 1.0 } else { -1.0 };
        }
        columns.push(col);
    }
    let scale = 1.0 / code.num_syndromes() as f64;
    let mut out = Vec::with_capacity(code.num_syndromes());
    for r in code.representatives() {
        let eta: Vec<f64> = (0..dim)
            .map(|a| {
                let letters: Vec<Letter> = (0..n).map(|q| Letter::from_index(letter_at(a, q))).collect();
                let p = PauliString::from_letters(&letters).expect("valid width");
                r.eta(&p).expect("same width") as f64
            })
            .collect();
        let mut g = [[0.0; 4]; 4];
        for (row, out_col) in g.iter_mut().zip(&columns) {
            for (entry, in_col) in row.iter_mut().zip(&columns) {
                let mut acc = 0.0;
                for a in (0..dim).filter(|&a| out_col[a] != 0.0) {
                    for b in (0..dim).filter(|&b| in_col[b] != 0.0) {
                        acc += out_col[a] * eta[a] * full[a * dim + b] * in_col[b];
                    }
                }
                *entry = acc * scale;
            }
        }
        out.push(g);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{diag_to_probs, DiagonalQuasiChannel, NoiseFamily};
    use crate::code::{builtin_code, builtin_codes};
    use approx::assert_abs_diff_eq;

    fn bit_flip(x: f64) -> PauliProbVec {
        diag_to_probs(&DiagonalQuasiChannel([1.0, 1.0, x, x])).unwrap()
    }

    #[test]
    fn bitflip2_syndrome_maps() {
        let code = builtin_code("bitflip2").unwrap();
        for x in [0.1, 0.5, 0.9] {
            let maps = coset_map(&code, &BlockNoise::uniform(bit_flip(x), 2).unwrap()).unwrap();
            let d0 = probs_to_diag(&maps[0].quasi()).0;
            let a = (1.0 + x * x) / 2.0;
            assert_abs_diff_eq!(d0.as_slice(), [a, a, x, x].as_slice(), epsilon = 1e-15);
            let d1 = probs_to_diag(&maps[1].quasi()).0;
            let b = (1.0 - x * x) / 2.0;
            assert_abs_diff_eq!(d1.as_slice(), [b, b, 0.0, 0.0].as_slice(), epsilon = 1e-15);
            assert_eq!(maps[1].recovery.to_string(), "XI");
            assert_abs_diff_eq!(maps[0].weight, a, epsilon = 1e-15);
        }
    }

    #[test]
    fn identity_noise_is_syndrome_free() {
        for code in builtin_codes() {
            let maps = coset_map(&code, &BlockNoise::uniform(PauliProbVec::IDENTITY, code.n()).unwrap()).unwrap();
            assert_eq!(maps[0].weight, 1.0);
            assert_eq!(maps[0].channel, PauliProbVec::IDENTITY);
            assert!(maps[1..].iter().all(|m| m.weight == 0.0));
        }
    }

    #[test]
    fn rejects_unnormalized_block() {
        assert!(matches!(
            BlockNoise::new(vec![PauliProbVec([0.5, 0.1, 0.0, 0.0])]),
            Err(QecError::Unnormalized { qubit: 0, .. })
        ));
        let code = builtin_code("bitflip2").unwrap();
        let short = BlockNoise::uniform(PauliProbVec::IDENTITY, 3).unwrap();
        assert!(coset_map(&code, &short).is_err());
    }

    #[test]
    fn bitflip2_blind_map_fixes_bit_flips() {
        let code = builtin_code("bitflip2").unwrap();
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let out = blind_map(&code, &bit_flip(x)).unwrap();
            assert_abs_diff_eq!(probs_to_diag(&out).0.as_slice(), [1.0, 1.0, x, x].as_slice(), epsilon = 1e-15);
        }
        assert_eq!(blind_map(&code, &PauliProbVec::IDENTITY).unwrap(), PauliProbVec::IDENTITY);
    }

    #[test]
    fn five_qubit_blind_map_stays_depolarizing() {
        let code = builtin_code("five-qubit").unwrap();
        let out = blind_map(&code, &NoiseFamily::Depolarizing.probs(0.05).unwrap()).unwrap();
        assert_abs_diff_eq!(out.weight(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.0[1], out.0[2], epsilon = 1e-15);
        assert_abs_diff_eq!(out.0[1], out.0[3], epsilon = 1e-15);
    }

    #[test]
    fn walsh_hadamard_matches_definition() {
        let input = [0.3, -1.0, 2.5, 0.25, 7.0, 0.0, -3.0, 1.5];
        let mut v = input;
        walsh_hadamard(&mut v);
        for (b, out) in v.iter().enumerate() {
            let want: f64 =
                input.iter().enumerate().map(|(k, x)| if (b & k).count_ones() % 2 == 0 { *x } else { -*x }).sum();
            assert_abs_diff_eq!(*out, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn oracle_rejects_large_codes() {
        let code = builtin_code("five-qubit").unwrap();
        assert!(general_map_oracle(&code, &[OneQubitSuperop::identity(); 5]).is_err());
    }

    #[test]
    fn oracle_identity() {
        let code = builtin_code("repetition3").unwrap();
        let g = general_map_oracle(&code, &[OneQubitSuperop::identity(); 3]).unwrap();
        let eye = OneQubitSuperop::identity().0;
        assert_eq!(g[0], eye);
        for other in &g[1..] {
            assert!(other.iter().flatten().all(|v| v.abs() < 1e-15));
        }
    }
}
