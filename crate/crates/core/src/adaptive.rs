//! Exact adaptive concatenation.
//!
//! A level takes one ensemble per physical qubit of the code. Every way of
//! drawing one conditional channel per qubit is a product noise for the level
//! map, whose syndromes split it further into weighted conditional channels.
//! The flattened, canonicalized and deduplicated result is the next level's
//! ensemble.
//!
//! Children are drawn as ordered tuples. When the children are identical
//! ensembles, tuples related by a qubit permutation that preserves the
//! stabilizer group and both logical operators give the same ensemble up to
//! syndrome labels and logical Pauli corrections, so only one tuple per orbit
//! is evaluated and weighted by the orbit size. Other permutations do change
//! the result, so plain multiset counting is not used.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{quasi_entropy_contribution, PauliProbVec};
use crate::code::StabilizerCode;
use crate::ensemble::{Accumulator, ChannelEnsemble, DEFAULT_DEDUP_TOLERANCE, DEFAULT_PRUNE_FLOOR};
use crate::error::{QecError, Result};
use crate::level::LevelMap;

/// Tuning for exact levels.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactOptions {
    pub dedup_tolerance: f64,
    pub prune_floor: f64,
    /// Maximum number of level-map evaluations per level.
    pub budget: f64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { dedup_tolerance: DEFAULT_DEDUP_TOLERANCE, prune_floor: DEFAULT_PRUNE_FLOOR, budget: 1e7 }
    }
}

/// Tuples handed to one parallel task. Fixed, so that summation order and
/// hence every output bit is independent of the number of worker threads.
const CHUNK: usize = 1024;
/// Chunks merged per parallel batch; bounds peak memory.
const BATCH: usize = 256;

/// Qubit permutations `perm` (qubit `q` moves to `perm[q]`) that map the
/// stabilizer group onto itself and each logical operator into its own coset,
/// ignoring signs. Always contains the identity, listed first.
pub fn code_automorphisms(code: &StabilizerCode) -> Vec<Vec<usize>> {
    let n = code.n();
    let permute = |bits: u64, perm: &[usize]| (0..n).fold(0u64, |acc, q| acc | ((bits >> q & 1) << perm[q]));
    let mut group: Vec<(u64, u64)> = code.group().iter().map(|g| (g.x_bits(), g.z_bits())).collect();
    group.sort_unstable();
    let in_group = |x: u64, z: u64| group.binary_search(&(x, z)).is_ok();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut visit = |perm: &[usize]| {
        let ok = code.generators().iter().all(|g| in_group(permute(g.x_bits(), perm), permute(g.z_bits(), perm)))
            && [code.logical_x(), code.logical_z()].iter().all(|l| {
                let (x, z) = (permute(l.x_bits(), perm), permute(l.z_bits(), perm));
                in_group(x ^ l.x_bits(), z ^ l.z_bits())
            });
        if ok {
            out.push(perm.to_vec());
        }
    };
    heap_permutations(&mut perm, &mut visit);
    out.sort();
    out
}

fn heap_permutations(v: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    fn rec(k: usize, v: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            visit(v);
            return;
        }
        rec(k - 1, v, visit);
        for i in 0..k - 1 {
            if k % 2 == 0 {
                v.swap(i, k - 1);
            } else {
                v.swap(0, k - 1);
            }
            rec(k - 1, v, visit);
        }
    }
    let k = v.len();
    rec(k, v, visit);
}

/// One representative tuple per automorphism orbit, with the orbit size.
///
/// Tuples assign an entry index to each qubit. A tuple is kept when it is the
/// lexicographic minimum of its orbit.
fn orbit_representatives(k: usize, n: usize, autos: &[Vec<usize>]) -> Vec<(Vec<u32>, u64)> {
    let total = k.pow(n as u32);
    let decode = |mut idx: usize| -> Vec<u32> {
        let mut t = vec![0u32; n];
        for slot in t.iter_mut().rev() {
            *slot = (idx % k) as u32;
            idx /= k;
        }
        t
    };
    (0..total)
        .into_par_iter()
        .with_min_len(CHUNK)
        .filter_map(|idx| {
            let t = decode(idx);
            let mut images: Vec<Vec<u32>> = Vec::with_capacity(autos.len());
            for perm in autos {
                let mut img = vec![0u32; n];
                for q in 0..n {
                    img[perm[q]] = t[q];
                }
                if img < t {
                    return None;
                }
                images.push(img);
            }
            images.sort_unstable();
            images.dedup();
            Some((t, images.len() as u64))
        })
        .collect()
}

/// The assignments one exact level evaluates.
enum Plan {
    /// All ordered tuples over possibly different children.
    Ordered { radices: Vec<usize>, total: u64 },
    /// Orbit representatives over identical children.
    Orbits(Vec<(Vec<u32>, u64)>),
}

impl Plan {
    fn len(&self) -> u64 {
        match self {
            Plan::Ordered { total, .. } => *total,
            Plan::Orbits(v) => v.len() as u64,
        }
    }

    /// Entry indices and multiplicity of assignment `i`.
    fn get(&self, i: u64, out: &mut [u32]) -> f64 {
        match self {
            Plan::Ordered { radices, .. } => {
                let mut idx = i;
                for (slot, &r) in out.iter_mut().zip(radices).rev() {
                    *slot = (idx % r as u64) as u32;
                    idx /= r as u64;
                }
                1.0
            }
            Plan::Orbits(v) => {
                out.copy_from_slice(&v[i as usize].0);
                v[i as usize].1 as f64
            }
        }
    }
}

/// Level-map evaluations [`exact_level`] needs over `children`, after orbit
/// reduction, or the budget error it would stop with.
pub fn estimate_level_cost(code: &StabilizerCode, children: &[&ChannelEnsemble], opts: &ExactOptions) -> Result<f64> {
    let n = code.n();
    if children.len() != n {
        return Err(QecError::LengthMismatch(children.len(), n));
    }
    let ordered = combination_count(children);
    let identical = children.windows(2).all(|w| w[0] == w[1]);
    if !identical || ordered <= 1.0 {
        if ordered > opts.budget {
            return Err(QecError::BudgetExceeded { needed: ordered, budget: opts.budget });
        }
        return Ok(ordered);
    }
    let estimate = ordered / code_automorphisms(code).len() as f64;
    // Orbit enumeration walks every ordered tuple once, which is far cheaper
    // than a level-map evaluation but still bounded.
    if estimate > opts.budget || ordered > 64.0 * opts.budget {
        return Err(QecError::BudgetExceeded { needed: estimate, budget: opts.budget });
    }
    Ok(estimate)
}

fn plan(code: &StabilizerCode, children: &[&ChannelEnsemble], opts: &ExactOptions) -> Result<Plan> {
    if let Some(bad) = children.iter().find(|c| c.is_empty()) {
        bad.validate()?;
    }
    estimate_level_cost(code, children, opts)?;
    let radices: Vec<usize> = children.iter().map(|c| c.len()).collect();
    let ordered: f64 = radices.iter().map(|&r| r as f64).product();
    let identical = children.windows(2).all(|w| w[0] == w[1]);
    let autos = if identical && ordered > 1.0 { code_automorphisms(code) } else { vec![Vec::new()] };
    if autos.len() == 1 {
        return Ok(Plan::Ordered { radices, total: ordered as u64 });
    }
    Ok(Plan::Orbits(orbit_representatives(radices[0], code.n(), &autos)))
}

/// Number of level-map evaluations an exact level over `children` needs,
/// before orbit reduction.
pub fn combination_count(children: &[&ChannelEnsemble]) -> f64 {
    children.iter().map(|c| c.len() as f64).product()
}

fn for_each_assignment<A: Send>(
    map: &LevelMap,
    children: &[&ChannelEnsemble],
    plan: &Plan,
    init: impl Fn() -> A + Sync,
    visit: impl Fn(&mut A, f64, &[PauliProbVec]) + Sync,
    mut merge: impl FnMut(A),
) {
    let n = map.code().n();
    let syndromes = map.num_syndromes();
    let chunks = plan.len().div_ceil(CHUNK as u64);
    let mut start = 0;
    while start < chunks {
        let end = (start + BATCH as u64).min(chunks);
        let parts: Vec<A> = (start..end)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                let mut tuple = vec![0u32; n];
                let mut per_qubit = vec![PauliProbVec::IDENTITY; n];
                let mut quasi = vec![PauliProbVec([0.0; 4]); syndromes];
                let mut scratch = Vec::new();
                for i in c * CHUNK as u64..((c + 1) * CHUNK as u64).min(plan.len()) {
                    let mult = plan.get(i, &mut tuple);
                    let mut w = mult;
                    for (q, (&t, child)) in tuple.iter().zip(children).enumerate() {
                        let e = &child.entries()[t as usize];
                        w *= e.weight;
                        per_qubit[q] = e.channel;
                    }
                    map.coset_quasi_into(&per_qubit, &mut quasi, &mut scratch);
                    visit(&mut acc, w, &quasi);
                }
                acc
            })
            .collect();
        parts.into_iter().for_each(&mut merge);
        start = end;
    }
}

/// One exact level of adaptive concatenation.
pub fn exact_level(map: &LevelMap, children: &[&ChannelEnsemble], opts: &ExactOptions) -> Result<ChannelEnsemble> {
    let plan = plan(map.code(), children, opts)?;
    let tol = opts.dedup_tolerance;
    let mut total = Accumulator::new(tol);
    for_each_assignment(
        map,
        children,
        &plan,
        || Accumulator::new(tol),
        |acc, w, quasi| {
            for q in quasi {
                let qw = q.weight();
                if qw > 0.0 {
                    acc.add(w * qw, &q.scaled(1.0 / qw));
                }
            }
        },
        |part| total.merge(part),
    );
    total.finish(opts.prune_floor)
}

/// Entropy of the ensemble [`exact_level`] would return, without building it.
pub fn exact_level_entropy(map: &LevelMap, children: &[&ChannelEnsemble], opts: &ExactOptions) -> Result<f64> {
    let plan = plan(map.code(), children, opts)?;
    let mut total = 0.0;
    for_each_assignment(
        map,
        children,
        &plan,
        || 0.0,
        |acc, w, quasi| {
            let mut s = 0.0;
            for q in quasi.iter().filter(|q| q.weight() > 0.0) {
                s += quasi_entropy_contribution(q).expect("positive weight");
            }
            *acc += w * s;
        },
        |part| total += part,
    );
    Ok(total)
}

/// Ensemble after `levels` exact levels starting from `base` on every
/// physical qubit. Level 0 is the base channel itself.
pub fn exact_ensemble(
    map: &LevelMap,
    base: &PauliProbVec,
    levels: usize,
    opts: &ExactOptions,
) -> Result<ChannelEnsemble> {
    let mut ens = ChannelEnsemble::singleton(*base)?;
    for _ in 0..levels {
        let children = vec![&ens; map.code().n()];
        ens = exact_level(map, &children, opts)?;
    }
    Ok(ens)
}

/// Logical entropy after `levels` exact levels. The last level is summed
/// without materializing its ensemble.
pub fn exact_entropy(map: &LevelMap, base: &PauliProbVec, levels: usize, opts: &ExactOptions) -> Result<f64> {
    if levels == 0 {
        return Ok(ChannelEnsemble::singleton(*base)?.entropy());
    }
    let below = exact_ensemble(map, base, levels - 1, opts)?;
    let children = vec![&below; map.code().n()];
    exact_level_entropy(map, &children, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{diag_to_probs, entropy, probs_to_diag, DiagonalQuasiChannel, NoiseFamily};
    use crate::code::{builtin_code, builtin_codes};
    use crate::level::BlockNoise;
    use approx::assert_abs_diff_eq;

    #[test]
    fn automorphism_groups() {
        let five = code_automorphisms(&builtin_code("five-qubit").unwrap());
        assert!(five.contains(&vec![1, 2, 3, 4, 0]));
        assert!(five.len() >= 5);
        assert_eq!(five[0], vec![0, 1, 2, 3, 4]);
        let steane = code_automorphisms(&builtin_code("steane").unwrap());
        assert_eq!(steane.len(), 168);
        let bf = code_automorphisms(&builtin_code("bitflip2").unwrap());
        // Swapping the qubits moves Z on qubit 1 to qubit 0, which is in the
        // same coset ZZ * IZ = ZI.
        assert_eq!(bf.len(), 2);
    }

    #[test]
    fn level_one_from_pure_noise_matches_coset_map() {
        let opts = ExactOptions::default();
        for code in builtin_codes() {
            let map = LevelMap::new(&code);
            let p = NoiseFamily::Depolarizing.probs(0.07).unwrap();
            let ens = exact_ensemble(&map, &p, 1, &opts).unwrap();
            ens.validate().unwrap();
            let direct = map.coset_map(&BlockNoise::uniform(p, code.n()).unwrap()).unwrap();
            let want: f64 =
                direct.iter().filter(|s| s.weight > 0.0).map(|s| s.weight * entropy(&s.channel).unwrap()).sum();
            assert_abs_diff_eq!(ens.entropy(), want, epsilon = 1e-13);
            assert_abs_diff_eq!(exact_entropy(&map, &p, 1, &opts).unwrap(), want, epsilon = 1e-13);
        }
    }

    #[test]
    fn identity_noise_stays_identity() {
        let opts = ExactOptions::default();
        for code in builtin_codes() {
            let map = LevelMap::new(&code);
            let ens = exact_ensemble(&map, &PauliProbVec::IDENTITY, 2, &opts).unwrap();
            assert_eq!(ens.len(), 1);
            assert_eq!(ens.entries()[0].channel, PauliProbVec::IDENTITY);
            assert_eq!(ens.entries()[0].weight, 1.0);
        }
    }

    #[test]
    fn bitflip4_optimized_map() {
        let map = LevelMap::new(&builtin_code("bitflip2").unwrap());
        for i in 1..10 {
            let x = i as f64 / 10.0;
            let base = diag_to_probs(&DiagonalQuasiChannel([1.0, 1.0, x, x])).unwrap();
            let ens = exact_ensemble(&map, &base, 2, &ExactOptions::default()).unwrap();
            let d = probs_to_diag(&ens.optimized_average()).0;
            let y = 1.5 * x - 0.5 * x * x * x;
            assert_abs_diff_eq!(d.as_slice(), [1.0, 1.0, y, y].as_slice(), epsilon = 1e-12);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let map = LevelMap::new(&builtin_code("steane").unwrap());
        let p = NoiseFamily::Depolarizing.probs(0.06).unwrap();
        let opts = ExactOptions { budget: 10.0, ..Default::default() };
        let err = exact_ensemble(&map, &p, 2, &opts).unwrap_err();
        assert!(matches!(err, QecError::BudgetExceeded { .. }));
    }

    #[test]
    fn orbit_plan_matches_ordered_plan() {
        for name in ["five-qubit", "repetition3"] {
            let code = builtin_code(name).unwrap();
            let map = LevelMap::new(&code);
            let p = NoiseFamily::IndepFlips.probs(0.1).unwrap();
            let child = exact_ensemble(&map, &p, 1, &ExactOptions::default()).unwrap();
            let children = vec![&child; code.n()];
            let radices = vec![child.len(); code.n()];
            let total = radices.iter().product::<usize>() as u64;
            let ordered = Plan::Ordered { radices, total };
            let mut a = 0.0;
            for_each_assignment(
                &map,
                &children,
                &ordered,
                || 0.0,
                |acc, w, quasi| {
                    *acc += w * quasi
                        .iter()
                        .filter(|q| q.weight() > 0.0)
                        .map(|q| quasi_entropy_contribution(q).unwrap())
                        .sum::<f64>();
                },
                |x| a += x,
            );
            let b = exact_level_entropy(&map, &children, &ExactOptions::default()).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }
}
