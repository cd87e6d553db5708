//! Length-graded enumeration of Weyl groups with Bruhat-cover data.
//!
//! Elements are represented by the key w(ρ) in fundamental-weight
//! coordinates: a constant-size canonical form with an O(n) reflection
//! action. The enumeration walks strata in order of length; a stratum
//! is produced from the previous one through the ascent criterion
//! (s_i·w is longer than w exactly when key coordinate i is positive),
//! so only two strata are ever resident.
//!
//! Covers are computed in bulk per stratum: for w of length k and a
//! positive root α, the key of w·s_α is key(w) − ⟨ρ, α^∨⟩·ω(w(α)),
//! where ω(w(α)) comes from the running matrix of w; the candidate is a
//! cover exactly when its key lies in stratum k+1.

use crate::budget::{Budget, BudgetTracker};
use crate::error::{CoreError, Result};
use crate::rootsys::{RootSystem, MAX_RANK};

/// Canonical identifier of a Weyl element: w(ρ) in fundamental-weight
/// coordinates, zero-padded to the maximal rank. Lexicographic order on
/// the padded array equals lexicographic order on the first n entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key(pub [i32; MAX_RANK]);

impl Key {
    pub fn identity(n: usize) -> Self {
        let mut k = [0i32; MAX_RANK];
        k[..n].fill(1);
        Key(k)
    }

    pub fn coords(&self, n: usize) -> &[i32] {
        &self.0[..n]
    }
}

/// A Weyl group element: canonical key plus its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeylElement {
    pub key: Key,
    pub length: usize,
}

/// One length stratum: keys in lexicographic order. The position of a
/// key is its stable index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub keys: Vec<Key>,
}

impl Stratum {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn index_of(&self, key: &Key) -> Option<usize> {
        self.keys.binary_search(key).ok()
    }
}

/// Length-graded atlas of Weyl elements, enumerated through
/// `max_length()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atlas {
    pub n: usize,
    pub strata: Vec<Stratum>,
}

impl Atlas {
    pub fn max_length(&self) -> usize {
        self.strata.len().saturating_sub(1)
    }

    pub fn counts(&self) -> Vec<u64> {
        self.strata.iter().map(|s| s.len() as u64).collect()
    }

    pub fn total(&self) -> u64 {
        self.strata.iter().map(|s| s.len() as u64).sum()
    }

    pub fn element(&self, length: usize, index: usize) -> Option<WeylElement> {
        let key = *self.strata.get(length)?.keys.get(index)?;
        Some(WeylElement { key, length })
    }

    pub fn find(&self, key: &Key) -> Option<WeylElement> {
        self.strata.iter().enumerate().find_map(|(length, s)| {
            s.index_of(key).map(|_| WeylElement { key: *key, length })
        })
    }
}

/// Bruhat covers from one stratum into the next, flattened per source
/// element. Targets are stable indices into the upper stratum, listed
/// in increasing order; each carries the simple-coroot coordinates of
/// the reflecting root's coroot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverBlock {
    pub from_len: usize,
    pub from_count: usize,
    pub to_count: usize,
    pub offsets: Vec<u32>,
    pub targets: Vec<u32>,
    pub coroots: Vec<[i8; MAX_RANK]>,
}

impl CoverBlock {
    pub fn covers_of(&self, index: usize) -> impl Iterator<Item = (u32, &[i8; MAX_RANK])> {
        let lo = self.offsets[index] as usize;
        let hi = self.offsets[index + 1] as usize;
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.coroots[lo..hi].iter())
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    fn bytes(&self) -> usize {
        self.offsets.len() * 4 + self.targets.len() * 4 + self.coroots.len() * MAX_RANK
    }
}

/// A single cover edge, for the per-element API.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cover {
    pub target: u32,
    pub coroot: [i8; MAX_RANK],
}

struct PreppedRoot {
    support: Vec<(usize, i32)>,
    coroot: [i8; MAX_RANK],
    coroot_height: i32,
}

fn prep_roots(rs: &RootSystem) -> Result<Vec<PreppedRoot>> {
    rs.positive_roots
        .iter()
        .zip(rs.positive_coroots.iter())
        .map(|(root, coroot)| {
            let support: Vec<(usize, i32)> = root
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(j, &c)| (j, c))
                .collect();
            let mut co = [0i8; MAX_RANK];
            for (j, &c) in coroot.iter().enumerate() {
                co[j] = i8::try_from(c).map_err(|_| {
                    CoreError::consistency("coroot coordinate exceeds i8 range".to_string())
                })?;
            }
            Ok(PreppedRoot {
                support,
                coroot: co,
                coroot_height: coroot.iter().sum(),
            })
        })
        .collect()
}

/// Matrix of w in mixed coordinates: column j holds the
/// fundamental-weight coordinates of w(α_j).
#[derive(Clone, Copy)]
struct Mat {
    cols: [[i32; MAX_RANK]; MAX_RANK],
}

impl Mat {
    fn of_identity(cartan: &[Vec<i32>]) -> Self {
        let n = cartan.len();
        let mut cols = [[0i32; MAX_RANK]; MAX_RANK];
        for (j, col) in cols.iter_mut().enumerate().take(n) {
            for k in 0..n {
                col[k] = cartan[k][j];
            }
        }
        Mat { cols }
    }
}

/// s_i action on fundamental-weight coordinates:
/// λ_j ← λ_j − λ_i · cartan[j][i].
#[inline]
fn reflect_weight(cartan: &[Vec<i32>], i: usize, v: &mut [i32; MAX_RANK]) {
    let vi = v[i];
    if vi == 0 {
        return;
    }
    for (j, row) in cartan.iter().enumerate() {
        v[j] -= vi * row[i];
    }
}

/// Streaming stratum-by-stratum walk. Each `advance` yields the keys of
/// the current stratum together with the cover block into the next one
/// (empty above the longest element), then moves on.
pub struct Sweep<'a> {
    rs: &'a RootSystem,
    roots: Vec<PreppedRoot>,
    with_covers: bool,
    cur_keys: Vec<Key>,
    cur_mats: Vec<Mat>,
    len: usize,
    finished: bool,
    total_seen: u64,
    tracker: BudgetTracker,
    charged_stratum: usize,
    charged_block: usize,
}

impl<'a> Sweep<'a> {
    pub fn new(rs: &'a RootSystem, budget: Budget, with_covers: bool) -> Result<Self> {
        let n = rs.rank();
        let roots = prep_roots(rs)?;
        let cur_keys = vec![Key::identity(n)];
        let cur_mats = if with_covers {
            vec![Mat::of_identity(&rs.cartan)]
        } else {
            Vec::new()
        };
        Ok(Sweep {
            rs,
            roots,
            with_covers,
            cur_keys,
            cur_mats,
            len: 0,
            finished: false,
            total_seen: 1,
            tracker: BudgetTracker::new(budget),
            charged_stratum: 0,
            charged_block: 0,
        })
    }

    /// Book memory retained by the caller (atlas strata, elimination
    /// rows) against this sweep's budget, so the whole pipeline is
    /// accounted in one place.
    pub fn charge_external(&mut self, bytes: usize, what: &str) -> Result<()> {
        self.tracker.charge_bytes(bytes, what)
    }

    pub fn release_external(&mut self, bytes: usize) {
        self.tracker.release_bytes(bytes);
    }

    pub fn total_seen(&self) -> u64 {
        self.total_seen
    }

    pub fn peak_bytes(&self) -> usize {
        self.tracker.peak_bytes()
    }

    /// Keys of the stratum `advance` will yield next.
    pub fn current_len(&self) -> usize {
        self.len
    }

    pub fn advance(&mut self) -> Result<Option<(Vec<Key>, CoverBlock)>> {
        if self.finished {
            return Ok(None);
        }
        let n = self.rs.rank();
        let num_pos = self.rs.num_positive_roots();
        let cartan = &self.rs.cartan;
        self.tracker
            .check_time(&format!("weyl enumeration at length {}", self.len))?;
        self.tracker.release_bytes(self.charged_block);
        self.charged_block = 0;

        // Ascent step: s_i·w is longer than w iff key_i(w) > 0.
        let mut candidates: Vec<(Key, u32, u8)> = Vec::new();
        if self.len < num_pos {
            for (w_idx, key) in self.cur_keys.iter().enumerate() {
                for i in 0..n {
                    if key.0[i] > 0 {
                        let mut k = key.0;
                        reflect_weight(cartan, i, &mut k);
                        candidates.push((Key(k), w_idx as u32, i as u8));
                    }
                }
            }
        }
        let cand_bytes = candidates.len() * std::mem::size_of::<(Key, u32, u8)>();
        self.tracker.charge_bytes(cand_bytes, "ascent candidates")?;
        candidates.sort_unstable_by_key(|&(k, _, _)| k);
        candidates.dedup_by_key(|&mut (k, _, _)| k);

        let next_count = candidates.len();
        self.total_seen += next_count as u64;
        if self.total_seen > self.tracker.budget().max_weyl_order {
            return Err(CoreError::infeasible(format!(
                "Weyl enumeration for {} exceeds the element budget of {} \
                 at length stratum {} ({} elements seen)",
                self.rs.spec,
                self.tracker.budget().max_weyl_order,
                self.len + 1,
                self.total_seen
            )));
        }
        let mat_bytes = if self.with_covers {
            std::mem::size_of::<Mat>()
        } else {
            0
        };
        let next_stratum_bytes = next_count * (std::mem::size_of::<Key>() + mat_bytes);
        self.tracker.charge_bytes(next_stratum_bytes, "stratum")?;

        let next_keys: Vec<Key> = candidates.iter().map(|&(k, _, _)| k).collect();
        let next_mats: Vec<Mat> = if self.with_covers {
            candidates
                .iter()
                .map(|&(_, parent, i)| {
                    let mut m = self.cur_mats[parent as usize];
                    for col in m.cols.iter_mut().take(n) {
                        reflect_weight(cartan, i as usize, col);
                    }
                    m
                })
                .collect()
        } else {
            Vec::new()
        };
        drop(candidates);
        self.tracker.release_bytes(cand_bytes);

        // Cover pass: for each positive root α with w(α) > 0 and
        // ℓ(w·s_α) = len+1, the candidate key lands in the next stratum.
        // Keys are globally unique, so the membership test alone decides.
        let mut offsets: Vec<u32> = Vec::new();
        let mut targets: Vec<u32> = Vec::new();
        let mut coroots: Vec<[i8; MAX_RANK]> = Vec::new();
        if self.with_covers {
            offsets.reserve(self.cur_keys.len() + 1);
            offsets.push(0);
            let mut scratch: Vec<(u32, [i8; MAX_RANK])> = Vec::with_capacity(num_pos);
            for (key, mat) in self.cur_keys.iter().zip(self.cur_mats.iter()) {
                scratch.clear();
                for root in &self.roots {
                    // ω-coordinates of w(α).
                    let mut image = [0i32; MAX_RANK];
                    for &(j, c) in &root.support {
                        let col = &mat.cols[j];
                        for (im, &cv) in image.iter_mut().zip(col.iter()).take(n) {
                            *im += c * cv;
                        }
                    }
                    let mut cand = key.0;
                    for (cv, &iv) in cand.iter_mut().zip(image.iter()).take(n) {
                        *cv -= root.coroot_height * iv;
                    }
                    if let Ok(t) = next_keys.binary_search(&Key(cand)) {
                        scratch.push((t as u32, root.coroot));
                    }
                }
                scratch.sort_unstable_by_key(|&(t, _)| t);
                for &(t, co) in &scratch {
                    targets.push(t);
                    coroots.push(co);
                }
                offsets.push(targets.len() as u32);
            }
        } else {
            offsets = vec![0; self.cur_keys.len() + 1];
        }

        let block = CoverBlock {
            from_len: self.len,
            from_count: self.cur_keys.len(),
            to_count: next_count,
            offsets,
            targets,
            coroots,
        };
        self.tracker.charge_bytes(block.bytes(), "cover block")?;
        self.charged_block = block.bytes();

        let yielded_keys = std::mem::replace(&mut self.cur_keys, next_keys);
        self.cur_mats = next_mats;
        self.tracker.release_bytes(self.charged_stratum);
        self.charged_stratum = next_stratum_bytes;
        self.len += 1;
        if block.to_count == 0 {
            self.finished = true;
        }
        Ok(Some((yielded_keys, block)))
    }
}

/// Breadth-first enumeration of the Weyl group, graded by length.
/// `max_length` truncates the atlas; `None` enumerates everything.
pub fn enumerate(rs: &RootSystem, max_length: Option<usize>, budget: Budget) -> Result<Atlas> {
    let cap = max_length.unwrap_or(usize::MAX);
    let mut sweep = Sweep::new(rs, budget, false)?;
    let mut strata = Vec::new();
    while let Some((keys, _)) = sweep.advance()? {
        strata.push(Stratum { keys });
        if strata.len() > cap {
            break;
        }
    }
    Ok(Atlas {
        n: rs.rank(),
        strata,
    })
}

/// Enumerate together with all cover blocks (stratum k into k+1 for
/// every k). This is what the cache stores.
pub fn enumerate_with_covers(
    rs: &RootSystem,
    budget: Budget,
) -> Result<(Atlas, Vec<CoverBlock>)> {
    let mut sweep = Sweep::new(rs, budget, true)?;
    let mut strata = Vec::new();
    let mut blocks = Vec::new();
    while let Some((keys, block)) = sweep.advance()? {
        strata.push(Stratum { keys });
        blocks.push(block);
    }
    Ok((
        Atlas {
            n: rs.rank(),
            strata,
        },
        blocks,
    ))
}

/// Covers of a single element: all w·s_α one length above w.
pub fn covers(rs: &RootSystem, atlas: &Atlas, w: &WeylElement) -> Result<Vec<Cover>> {
    let num_pos = rs.num_positive_roots();
    let stratum = atlas
        .strata
        .get(w.length)
        .ok_or_else(|| CoreError::precondition("element length beyond atlas".to_string()))?;
    let index = stratum.index_of(&w.key).ok_or_else(|| {
        CoreError::precondition("element key not present in its atlas stratum".to_string())
    })?;
    if w.length < num_pos && atlas.max_length() < w.length + 1 {
        return Err(CoreError::precondition(format!(
            "atlas enumerated to length {} but covers at length {} need length {}",
            atlas.max_length(),
            w.length,
            w.length + 1
        )));
    }

    let mut sweep = Sweep::new(rs, Budget::unlimited(), true)?;
    while let Some((_, block)) = sweep.advance()? {
        if block.from_len == w.length {
            return Ok(block
                .covers_of(index)
                .map(|(target, coroot)| Cover {
                    target,
                    coroot: *coroot,
                })
                .collect());
        }
    }
    Err(CoreError::precondition(
        "sweep ended before the requested stratum".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::quantum_factor_product;
    use crate::rootsys::{build_root_system, degrees, Family, GroupSpec, Isogeny};
    use num_bigint::BigInt;

    fn rs(family: Family, rank: usize) -> RootSystem {
        build_root_system(GroupSpec::new(family, rank, Isogeny::SimplyConnected).unwrap()).unwrap()
    }

    fn full_atlas(family: Family, rank: usize) -> Atlas {
        enumerate(&rs(family, rank), None, Budget::default()).unwrap()
    }

    // Brute-force oracle for type A: permutations in one-line notation.
    // Length is the inversion count and the key of w is the vector of
    // consecutive differences of w^{-1}.
    fn perms(n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for k in 1..=n {
            let mut next = Vec::new();
            for p in &out {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    fn inversions(p: &[usize]) -> usize {
        let mut count = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    count += 1;
                }
            }
        }
        count
    }

    fn key_of_perm(p: &[usize]) -> Key {
        let n = p.len();
        let mut inv = vec![0i32; n];
        for (pos, &v) in p.iter().enumerate() {
            inv[v - 1] = pos as i32 + 1;
        }
        let mut k = [0i32; MAX_RANK];
        for i in 0..n - 1 {
            k[i] = inv[i + 1] - inv[i];
        }
        Key(k)
    }

    #[test]
    fn a1_counts() {
        let atlas = full_atlas(Family::A, 1);
        assert_eq!(atlas.counts(), vec![1, 1]);
    }

    #[test]
    fn a2_and_a3_match_permutation_oracle() {
        for n in [3usize, 4] {
            let atlas = full_atlas(Family::A, n - 1);
            let mut expected: Vec<Vec<Key>> = Vec::new();
            for p in perms(n) {
                let l = inversions(&p);
                if expected.len() <= l {
                    expected.resize(l + 1, Vec::new());
                }
                expected[l].push(key_of_perm(&p));
            }
            for stratum in expected.iter_mut() {
                stratum.sort_unstable();
            }
            assert_eq!(atlas.strata.len(), expected.len());
            for (s, e) in atlas.strata.iter().zip(expected.iter()) {
                assert_eq!(&s.keys, e);
            }
        }
    }

    #[test]
    fn a2_covers_match_transposition_oracle() {
        let system = rs(Family::A, 2);
        let atlas = full_atlas(Family::A, 2);
        // Transposition t_{ij} (i<j) corresponds to the positive root
        // α_i + … + α_{j-1}; its coroot has the same coordinate pattern.
        let transpositions = [(1usize, 2usize), (2, 3), (1, 3)];
        for p in perms(3) {
            let w = WeylElement {
                key: key_of_perm(&p),
                length: inversions(&p),
            };
            let got = covers(&system, &atlas, &w).unwrap();
            let mut expected: Vec<(u32, [i8; MAX_RANK])> = Vec::new();
            for &(i, j) in &transpositions {
                // Right multiplication w·t_{ij} swaps the one-line
                // entries at positions i and j.
                let mut q = p.clone();
                q.swap(i - 1, j - 1);
                if inversions(&q) == w.length + 1 {
                    let idx = atlas.strata[w.length + 1]
                        .index_of(&key_of_perm(&q))
                        .unwrap() as u32;
                    let mut coroot = [0i8; MAX_RANK];
                    coroot[i - 1..j - 1].fill(1);
                    expected.push((idx, coroot));
                }
            }
            expected.sort_unstable_by_key(|&(t, _)| t);
            let got_pairs: Vec<(u32, [i8; MAX_RANK])> =
                got.iter().map(|c| (c.target, c.coroot)).collect();
            assert_eq!(got_pairs, expected, "covers differ for {:?}", p);
        }
    }

    #[test]
    fn identity_covers_are_simple_reflections() {
        let system = rs(Family::B, 3);
        let atlas = full_atlas(Family::B, 3);
        let e = atlas.element(0, 0).unwrap();
        let cov = covers(&system, &atlas, &e).unwrap();
        assert_eq!(cov.len(), 3);
        for c in cov {
            let height: i8 = c.coroot.iter().sum();
            assert_eq!(height, 1);
        }
    }

    #[test]
    fn longest_element_has_no_covers() {
        let system = rs(Family::B, 2);
        let atlas = full_atlas(Family::B, 2);
        let top = atlas.max_length();
        let w0 = atlas.element(top, 0).unwrap();
        assert_eq!(top, system.num_positive_roots());
        assert!(covers(&system, &atlas, &w0).unwrap().is_empty());
    }

    #[test]
    fn counts_palindromic_and_match_generating_function() {
        for (family, rank) in [
            (Family::A, 3),
            (Family::B, 3),
            (Family::C, 3),
            (Family::D, 4),
            (Family::G, 2),
            (Family::F, 4),
        ] {
            let system = rs(family, rank);
            let atlas = enumerate(&system, None, Budget::default()).unwrap();
            let counts = atlas.counts();
            let total: u64 = counts.iter().sum();
            let profile = degrees(&system);
            assert_eq!(BigInt::from(total), profile.weyl_order().into());
            let gf = quantum_factor_product(&profile.degrees);
            let coeffs = gf.coeffs_u64().unwrap();
            assert_eq!(counts, coeffs, "{}{} length counts", family, rank);
            let m = counts.len();
            for k in 0..m {
                assert_eq!(counts[k], counts[m - 1 - k]);
            }
        }
    }

    #[test]
    fn cover_edge_counts_balance() {
        let system = rs(Family::C, 3);
        let (atlas, blocks) = enumerate_with_covers(&system, Budget::default()).unwrap();
        for block in &blocks {
            let mut incoming = vec![0u32; block.to_count];
            for idx in 0..block.from_count {
                for (t, _) in block.covers_of(idx) {
                    incoming[t as usize] += 1;
                }
            }
            let total_in: u32 = incoming.iter().sum();
            assert_eq!(total_in as usize, block.num_edges());
            if block.to_count > 0 {
                assert!(incoming.iter().all(|&c| c > 0));
            }
            assert_eq!(block.from_count, atlas.strata[block.from_len].len());
        }
    }

    #[test]
    fn budget_rejection_names_the_stratum() {
        let system = rs(Family::F, 4);
        let tiny = Budget {
            max_weyl_order: 50,
            ..Budget::default()
        };
        let err = enumerate(&system, None, tiny).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("length stratum"), "{msg}");
    }

    #[test]
    fn truncated_atlas_refuses_cover_queries_past_depth() {
        let system = rs(Family::A, 3);
        let atlas = enumerate(&system, Some(2), Budget::default()).unwrap();
        let w = atlas.element(2, 0).unwrap();
        assert!(covers(&system, &atlas, &w).is_err());
    }
}
