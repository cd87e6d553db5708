//! The image of the mod-p characteristic map inside the Schubert-basis
//! model of Ch*(X), computed degree by degree.
//!
//! Degree k+1 of the image is spanned by the Chevalley products of a
//! basis of degree k with the n degree-one generators (fundamental
//! weights for the simply connected form, simple roots for the adjoint
//! form). Each stratum's basis comes from deterministic Gaussian
//! elimination over F_p; the Hilbert coefficients are the ranks, the
//! top degree gives cd_p = N − deg P(R_p, t).

use crate::budget::Budget;
use crate::error::{CoreError, Result};
use crate::polyalg::{recover_degree_multiset, IntPoly, RecoveryFailure};
use crate::rootsys::{degrees, GroupSpec, Isogeny, RootSystem, MAX_RANK};
use crate::weyl::{CoverBlock, Sweep};
use num_bigint::BigUint;

/// Sparse vector in the Schubert basis of one codimension stratum.
/// Entries are (stable index, residue) with residues in 1..p, sorted by
/// index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchubertVector {
    pub degree: usize,
    pub entries: Vec<(u32, u32)>,
}

impl SchubertVector {
    pub fn unit(degree: usize, index: u32) -> Self {
        SchubertVector {
            degree,
            entries: vec![(index, 1)],
        }
    }

    pub fn zero(degree: usize) -> Self {
        SchubertVector {
            degree,
            entries: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The degree-one generators of the characteristic-map image, as weight
/// vectors in fundamental-weight coordinates: the identity basis for
/// the simply connected form, the Cartan columns (simple roots) for the
/// adjoint form.
#[derive(Debug, Clone)]
pub struct LatticeBasis {
    pub weights: Vec<[i32; MAX_RANK]>,
}

impl LatticeBasis {
    pub fn for_spec(rs: &RootSystem) -> Self {
        let n = rs.rank();
        let weights = (0..n)
            .map(|j| {
                let mut w = [0i32; MAX_RANK];
                match rs.spec.isogeny {
                    Isogeny::SimplyConnected => w[j] = 1,
                    Isogeny::Adjoint => {
                        for k in 0..n {
                            w[k] = rs.cartan[k][j];
                        }
                    }
                }
                w
            })
            .collect();
        LatticeBasis { weights }
    }
}

/// Chevalley rule: c(λ)·σ_w = Σ ⟨λ, α^∨⟩ σ_{w·s_α} over the covers of
/// w, reduced mod p. Input at the top degree comes back as the zero
/// vector.
pub fn chevalley_multiply(
    block: &CoverBlock,
    v: &SchubertVector,
    lambda: &[i32],
    p: u32,
) -> Result<SchubertVector> {
    if v.degree != block.from_len {
        return Err(CoreError::precondition(format!(
            "vector at degree {} multiplied with cover block for degree {}",
            v.degree, block.from_len
        )));
    }
    let mut scratch = vec![0u64; block.to_count];
    for &(idx, value) in &v.entries {
        if idx as usize >= block.from_count {
            return Err(CoreError::precondition(format!(
                "entry index {idx} outside stratum of size {}",
                block.from_count
            )));
        }
        for (target, coroot) in block.covers_of(idx as usize) {
            let pairing = RootSystem::pair_weight_coroot(
                lambda,
                &coroot.map(i32::from),
            );
            let residue = pairing.rem_euclid(p as i64) as u64;
            scratch[target as usize] += value as u64 * residue;
        }
    }
    let entries = scratch
        .iter()
        .enumerate()
        .filter_map(|(i, &acc)| {
            let r = (acc % p as u64) as u32;
            (r != 0).then_some((i as u32, r))
        })
        .collect();
    Ok(SchubertVector {
        degree: v.degree + 1,
        entries,
    })
}

/// Outcome of trying to read the mod-p degrees off the Hilbert series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecoveryOutcome {
    Recovered(Vec<u64>),
    Unrecovered(RecoveryFailure),
}

impl RecoveryOutcome {
    pub fn degrees(&self) -> Option<&[u64]> {
        match self {
            RecoveryOutcome::Recovered(d) => Some(d),
            RecoveryOutcome::Unrecovered(_) => None,
        }
    }
}

/// Result of the direct characteristic-map computation.
#[derive(Debug, Clone)]
pub struct CharImageResult {
    pub spec: GroupSpec,
    pub prime: u32,
    pub hilbert: IntPoly,
    pub top_degree: usize,
    pub cd: u64,
    pub recovery: RecoveryOutcome,
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------
// Elimination over F_p.
// ---------------------------------------------------------------------

fn inverse_mod(a: u32, p: u32) -> u32 {
    // p is prime and a is nonzero mod p.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut exp = p as u64 - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}

trait Rows {
    fn rank(&self) -> usize;
    /// Reduce a dense accumulator row (entries not yet reduced mod p)
    /// against the stored rows in pivot order and adjoin it if
    /// independent. Returns whether the rank grew. The scratch contents
    /// are consumed.
    fn insert(&mut self, scratch: &mut [u32]) -> bool;
    fn row_sparse(&self, r: usize) -> Vec<(u32, u32)>;
    fn bytes(&self) -> usize;
}

const NO_PIVOT: u32 = u32::MAX;

/// Dense byte rows, entries in [0, p), echelon form with pivot order
/// equal to the stable Schubert index order.
///
/// Insertion keeps the incoming row as raw u32 accumulators and defers
/// the mod-p reduction: one axpy adds at most (p−1)² per entry, so the
/// accumulator tolerates `reduce_every` eliminations before a
/// renormalization pass is forced. For p ≤ 13 that threshold is never
/// reached in practice.
struct GenericRows {
    p: u32,
    width: usize,
    rows: Vec<Vec<u8>>,
    pivot_row: Vec<u32>,
    reduce_every: usize,
}

impl GenericRows {
    fn new(p: u32, width: usize) -> Self {
        let step = ((p as u64 - 1) * (p as u64 - 1)).max(1);
        let reduce_every = ((u32::MAX as u64 - 32_000_000) / step) as usize;
        GenericRows {
            p,
            width,
            rows: Vec::new(),
            pivot_row: vec![NO_PIVOT; width],
            reduce_every,
        }
    }
}

impl Rows for GenericRows {
    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, scratch: &mut [u32]) -> bool {
        let p = self.p;
        let mut pos = 0usize;
        let mut since_reduce = 0usize;
        loop {
            let mut lead = 0u32;
            while pos < self.width {
                lead = scratch[pos] % p;
                if lead != 0 {
                    break;
                }
                pos += 1;
            }
            if pos == self.width {
                return false;
            }
            let pivot = self.pivot_row[pos];
            if pivot == NO_PIVOT {
                let inv = inverse_mod(lead, p) as u64;
                let mut row = vec![0u8; self.width];
                for (dst, &x) in row[pos..].iter_mut().zip(scratch[pos..].iter()) {
                    *dst = ((x % p) as u64 * inv % p as u64) as u8;
                }
                self.pivot_row[pos] = self.rows.len() as u32;
                self.rows.push(row);
                return true;
            }
            let c = p - lead;
            let row = &self.rows[pivot as usize];
            for (x, &r) in scratch[pos..].iter_mut().zip(row[pos..].iter()) {
                *x += c * r as u32;
            }
            pos += 1;
            since_reduce += 1;
            if since_reduce >= self.reduce_every {
                for x in scratch[pos..].iter_mut() {
                    *x %= p;
                }
                since_reduce = 0;
            }
        }
    }

    fn row_sparse(&self, r: usize) -> Vec<(u32, u32)> {
        self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i as u32, v as u32))
            .collect()
    }

    fn bytes(&self) -> usize {
        self.rows.len() * self.width + self.pivot_row.len() * 4
    }
}

/// Bit-packed rows over F_2: identical insert semantics to the generic
/// path, XOR arithmetic.
struct Gf2Rows {
    words: usize,
    rows: Vec<Vec<u64>>,
    pivot_row: Vec<u32>,
}

impl Gf2Rows {
    fn new(width: usize) -> Self {
        Gf2Rows {
            words: width.div_ceil(64),
            rows: Vec::new(),
            pivot_row: vec![NO_PIVOT; width],
        }
    }

    fn first_set(row: &[u64], from_word: usize) -> Option<usize> {
        row.iter()
            .enumerate()
            .skip(from_word)
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }
}

impl Rows for Gf2Rows {
    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, scratch: &mut [u32]) -> bool {
        let mut packed = vec![0u64; self.words];
        for (i, &v) in scratch.iter().enumerate() {
            packed[i / 64] |= ((v & 1) as u64) << (i % 64);
        }
        let mut word = 0usize;
        while let Some(pos) = Self::first_set(&packed, word) {
            word = pos / 64;
            let pivot = self.pivot_row[pos];
            if pivot == NO_PIVOT {
                self.pivot_row[pos] = self.rows.len() as u32;
                self.rows.push(packed);
                return true;
            }
            for (x, &r) in packed[word..]
                .iter_mut()
                .zip(self.rows[pivot as usize][word..].iter())
            {
                *x ^= r;
            }
        }
        false
    }

    fn row_sparse(&self, r: usize) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (wi, &w) in self.rows[r].iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(((wi * 64 + b) as u32, 1));
                bits &= bits - 1;
            }
        }
        out
    }

    fn bytes(&self) -> usize {
        self.rows.len() * self.words * 8 + self.pivot_row.len() * 4
    }
}

fn new_rows(p: u32, width: usize, force_generic: bool) -> Box<dyn Rows> {
    if p == 2 && !force_generic {
        Box::new(Gf2Rows::new(width))
    } else {
        Box::new(GenericRows::new(p, width))
    }
}

// ---------------------------------------------------------------------
// The degree-by-degree sweep.
// ---------------------------------------------------------------------

fn validate_prime(p: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(CoreError::input(format!("{p} is not a prime")));
    }
    if p > 251 {
        return Err(CoreError::input(format!(
            "prime {p} exceeds the supported bound 251"
        )));
    }
    Ok(())
}

/// Direct computation of the Hilbert series of R_p and cd_p from it.
pub fn compute_char_image(spec: GroupSpec, p: u32, budget: &Budget) -> Result<CharImageResult> {
    compute_char_image_impl(spec, p, budget, false)
}

#[doc(hidden)]
pub fn compute_char_image_forced_generic(
    spec: GroupSpec,
    p: u32,
    budget: &Budget,
) -> Result<CharImageResult> {
    compute_char_image_impl(spec, p, budget, true)
}

fn compute_char_image_impl(
    spec: GroupSpec,
    p: u32,
    budget: &Budget,
    force_generic: bool,
) -> Result<CharImageResult> {
    validate_prime(p)?;
    let rs = crate::rootsys::build_root_system(spec)?;
    let profile = degrees(&rs);
    let order = profile.weyl_order();
    if order > BigUint::from(budget.max_weyl_order) {
        return Err(CoreError::infeasible(format!(
            "direct computation for {spec} needs |W| = {order} Weyl elements, \
             over the budget of {}; use the closed-form methods instead",
            budget.max_weyl_order
        )));
    }

    let mut sweep = Sweep::new(&rs, budget.clone(), true)?;
    let (hilbert, top_degree) = run_image(
        &rs,
        p,
        force_generic,
        budget,
        || match sweep.advance() {
            Ok(Some((_, block))) => Ok(Some(block)),
            Ok(None) => Ok(None),
            Err(e) => Err(e),
        },
    )?;
    finish_result(&rs, p, hilbert, top_degree)
}

/// Same computation driven by precomputed cover blocks (the cache path).
pub fn compute_char_image_from_blocks(
    rs: &RootSystem,
    blocks: &[CoverBlock],
    p: u32,
    budget: &Budget,
) -> Result<CharImageResult> {
    validate_prime(p)?;
    let mut iter = blocks.iter();
    let (hilbert, top_degree) = run_image(rs, p, false, budget, || Ok(iter.next().cloned()))?;
    finish_result(rs, p, hilbert, top_degree)
}

fn finish_result(
    rs: &RootSystem,
    p: u32,
    hilbert: IntPoly,
    top_degree: usize,
) -> Result<CharImageResult> {
    let num_pos = rs.num_positive_roots();
    if top_degree > num_pos {
        return Err(CoreError::consistency(format!(
            "image has nonzero part in degree {top_degree} past dim X = {num_pos}"
        )));
    }
    let cd = (num_pos - top_degree) as u64;
    let recovery = match recover_degree_multiset(&hilbert, rs.rank()) {
        Ok(degs) => {
            let sum: u64 = degs.iter().map(|d| d - 1).sum();
            if sum != top_degree as u64 {
                return Err(CoreError::consistency(format!(
                    "recovered degrees {degs:?} disagree with top degree {top_degree}"
                )));
            }
            RecoveryOutcome::Recovered(degs)
        }
        Err(f) => RecoveryOutcome::Unrecovered(f),
    };
    Ok(CharImageResult {
        spec: rs.spec,
        prime: p,
        hilbert,
        top_degree,
        cd,
        recovery,
    })
}

fn run_image(
    rs: &RootSystem,
    p: u32,
    force_generic: bool,
    budget: &Budget,
    mut next_block: impl FnMut() -> Result<Option<CoverBlock>>,
) -> Result<(IntPoly, usize)> {
    let n = rs.rank();
    let lattice = LatticeBasis::for_spec(rs);
    let mut tracker = crate::budget::BudgetTracker::new(budget.clone());

    let mut ranks: Vec<u64> = vec![1];
    let mut cur: Box<dyn Rows> = new_rows(p, 1, force_generic);
    let mut seed = [1u32];
    cur.insert(&mut seed);
    let mut charged = 0usize;

    while let Some(block) = next_block()? {
        if cur.rank() == 0 {
            break;
        }
        if block.from_len != ranks.len() - 1 {
            return Err(CoreError::consistency(format!(
                "cover feed out of order: block {} at image degree {}",
                block.from_len,
                ranks.len() - 1
            )));
        }
        if cur.rank() > block.from_count {
            return Err(CoreError::consistency(format!(
                "image rank {} exceeds stratum size {} at degree {}",
                cur.rank(),
                block.from_count,
                block.from_len
            )));
        }

        // Per-generator cover lists restricted to nonzero pairings
        // ⟨λ_g, α^∨⟩ mod p, in CSR form per source column.
        let gen_covers: Vec<(Vec<u32>, Vec<(u32, u32)>)> = lattice
            .weights
            .iter()
            .map(|lambda| {
                let mut offsets = Vec::with_capacity(block.from_count + 1);
                let mut edges: Vec<(u32, u32)> = Vec::new();
                offsets.push(0u32);
                for col in 0..block.from_count {
                    let lo = block.offsets[col] as usize;
                    let hi = block.offsets[col + 1] as usize;
                    for e in lo..hi {
                        let coroot = &block.coroots[e];
                        let dot: i64 = lambda[..n]
                            .iter()
                            .zip(coroot[..n].iter())
                            .map(|(&l, &c)| l as i64 * c as i64)
                            .sum();
                        let pairing = dot.rem_euclid(p as i64) as u32;
                        if pairing != 0 {
                            edges.push((block.targets[e], pairing));
                        }
                    }
                    offsets.push(edges.len() as u32);
                }
                (offsets, edges)
            })
            .collect();

        let mut next = new_rows(p, block.to_count, force_generic);
        let mut scratch: Vec<u32> = vec![0; block.to_count];
        for r in 0..cur.rank() {
            tracker.check_time(&format!(
                "characteristic-map elimination at degree {}",
                block.from_len + 1
            ))?;
            let row = cur.row_sparse(r);
            for (offsets, edges) in &gen_covers {
                scratch.iter_mut().for_each(|x| *x = 0);
                for &(col, val) in &row {
                    let lo = offsets[col as usize] as usize;
                    let hi = offsets[col as usize + 1] as usize;
                    for &(target, pairing) in &edges[lo..hi] {
                        scratch[target as usize] += val * pairing;
                    }
                }
                next.insert(&mut scratch);
            }
        }
        tracker.release_bytes(charged);
        charged = cur.bytes() + next.bytes() + 4 * block.to_count;
        tracker.charge_bytes(charged, "elimination rows")?;
        ranks.push(next.rank() as u64);
        cur = next;
        if cur.rank() == 0 {
            break;
        }
    }

    while ranks.last() == Some(&0) {
        ranks.pop();
    }
    let top_degree = ranks.len() - 1;
    Ok((IntPoly::from_u64_coeffs(&ranks), top_degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::quantum_factor_product;
    use crate::rootsys::{build_root_system, torsion_primes, Family, GroupSpec, Isogeny};
    use crate::weyl::enumerate_with_covers;

    fn sc(family: Family, rank: usize) -> GroupSpec {
        GroupSpec::new(family, rank, Isogeny::SimplyConnected).unwrap()
    }

    fn ad(family: Family, rank: usize) -> GroupSpec {
        GroupSpec::new(family, rank, Isogeny::Adjoint).unwrap()
    }

    #[test]
    fn identity_times_fundamental_weight_is_simple_reflection_class() {
        let rs = build_root_system(sc(Family::B, 3)).unwrap();
        let (_, blocks) = enumerate_with_covers(&rs, Budget::default()).unwrap();
        for j in 0..3 {
            let mut lambda = [0i32; MAX_RANK];
            lambda[j] = 1;
            let v = SchubertVector::unit(0, 0);
            let out = chevalley_multiply(&blocks[0], &v, &lambda, 5).unwrap();
            assert_eq!(out.entries.len(), 1);
            assert_eq!(out.entries[0].1, 1);
        }
    }

    #[test]
    fn longest_element_multiplies_to_zero() {
        let rs = build_root_system(sc(Family::A, 2)).unwrap();
        let (atlas, blocks) = enumerate_with_covers(&rs, Budget::default()).unwrap();
        let top = atlas.max_length();
        let v = SchubertVector::unit(top, 0);
        let lambda = [1i32, 1, 0, 0, 0, 0, 0, 0];
        let out = chevalley_multiply(&blocks[top], &v, &lambda, 3).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn a2_non_torsion_image_is_full_coinvariant_algebra() {
        let result = compute_char_image(sc(Family::A, 2), 5, &Budget::default()).unwrap();
        assert_eq!(result.hilbert, IntPoly::from_u64_coeffs(&[1, 2, 2, 1]));
        assert_eq!(result.top_degree, 3);
        assert_eq!(result.cd, 0);
        assert_eq!(result.recovery.degrees(), Some(&[2, 3][..]));
    }

    #[test]
    fn f4_fixture_values() {
        let at3 = compute_char_image(sc(Family::F, 4), 3, &Budget::default()).unwrap();
        assert_eq!(at3.cd, 8, "cd_3 of F4");
        let at2 = compute_char_image(sc(Family::F, 4), 2, &Budget::default()).unwrap();
        assert_eq!(at2.cd, 3, "cd_2 of F4");
    }

    #[test]
    fn rank_one_adjoint_at_two_collapses_in_degree_one() {
        let result = compute_char_image(ad(Family::A, 1), 2, &Budget::default()).unwrap();
        assert_eq!(result.hilbert, IntPoly::one());
        assert_eq!(result.cd, 1);
        assert_eq!(result.recovery.degrees(), Some(&[1][..]));
    }

    #[test]
    fn pgl3_at_three() {
        let result = compute_char_image(ad(Family::A, 2), 3, &Budget::default()).unwrap();
        assert_eq!(result.hilbert, IntPoly::from_u64_coeffs(&[1, 1]));
        assert_eq!(result.cd, 2);
        assert_eq!(result.recovery.degrees(), Some(&[1, 2][..]));
    }

    #[test]
    fn non_torsion_collapse_rank_up_to_4() {
        let specs = [
            sc(Family::A, 3),
            ad(Family::A, 3),
            sc(Family::B, 2),
            ad(Family::B, 2),
            sc(Family::C, 3),
            sc(Family::D, 4),
            sc(Family::G, 2),
            sc(Family::F, 4),
        ];
        for spec in specs {
            let torsion = torsion_primes(spec).unwrap();
            let rs = build_root_system(spec).unwrap();
            let classical = degrees(&rs).degrees;
            for p in [2u32, 3, 5] {
                if torsion.contains(p) {
                    continue;
                }
                let result = compute_char_image(spec, p, &Budget::default()).unwrap();
                assert_eq!(
                    result.hilbert,
                    quantum_factor_product(&classical),
                    "{spec} at p={p} should have the full coinvariant series"
                );
                assert_eq!(result.cd, 0);
            }
        }
    }

    #[test]
    fn torsion_pairs_have_positive_cd_rank_up_to_4() {
        for spec in [
            ad(Family::A, 1),
            ad(Family::A, 2),
            ad(Family::A, 3),
            ad(Family::B, 2),
            sc(Family::B, 3),
            ad(Family::C, 3),
            sc(Family::D, 4),
            sc(Family::G, 2),
            sc(Family::F, 4),
        ] {
            let torsion = torsion_primes(spec).unwrap();
            for &p in &torsion.primes {
                let result = compute_char_image(spec, p, &Budget::default()).unwrap();
                assert!(result.cd > 0, "{spec} at torsion prime {p}");
            }
        }
    }

    #[test]
    fn bitpacked_and_generic_paths_agree_at_two() {
        for spec in [
            sc(Family::B, 3),
            sc(Family::D, 4),
            sc(Family::G, 2),
            sc(Family::F, 4),
            ad(Family::A, 3),
            ad(Family::C, 3),
        ] {
            let fast = compute_char_image(spec, 2, &Budget::default()).unwrap();
            let slow = compute_char_image_forced_generic(spec, 2, &Budget::default()).unwrap();
            assert_eq!(fast.hilbert, slow.hilbert, "{spec}");
            assert_eq!(fast.cd, slow.cd);
        }
    }

    #[test]
    fn results_are_deterministic() {
        let a = compute_char_image(sc(Family::F, 4), 3, &Budget::default()).unwrap();
        let b = compute_char_image(sc(Family::F, 4), 3, &Budget::default()).unwrap();
        assert_eq!(a.hilbert, b.hilbert);
        assert_eq!(a.recovery, b.recovery);
    }

    #[test]
    fn grading_consistency_image_within_strata() {
        let rs = build_root_system(sc(Family::B, 3)).unwrap();
        let (atlas, _) = enumerate_with_covers(&rs, Budget::default()).unwrap();
        let counts = atlas.counts();
        for p in [2u32, 3] {
            let result = compute_char_image(sc(Family::B, 3), p, &Budget::default()).unwrap();
            for (k, c) in result.hilbert.coeffs_u64().unwrap().iter().enumerate() {
                assert!(*c <= counts[k]);
            }
        }
    }

    #[test]
    fn e8_direct_is_rejected_by_default_and_extended_budgets() {
        for budget in [Budget::default(), Budget::extended()] {
            let err = compute_char_image(sc(Family::E, 8), 2, &budget).unwrap_err();
            assert!(matches!(err, CoreError::Infeasible(_)));
        }
    }

    #[test]
    fn multiplication_by_weights_commutes() {
        // The image lives in a commutative ring: (v·λ)·μ = (v·μ)·λ.
        let cases = [
            (sc(Family::B, 2), 2u32),
            (sc(Family::G, 2), 3),
            (ad(Family::A, 2), 3),
            (sc(Family::A, 3), 5),
        ];
        for (spec, p) in cases {
            let rs = build_root_system(spec).unwrap();
            let (atlas, blocks) = enumerate_with_covers(&rs, Budget::default()).unwrap();
            let n = rs.rank();
            for start_deg in 0..atlas.max_length().saturating_sub(1) {
                for start_idx in 0..atlas.counts()[start_deg].min(3) {
                    let v = SchubertVector::unit(start_deg, start_idx as u32);
                    for a in 0..n {
                        for b in 0..n {
                            let mut la = [0i32; MAX_RANK];
                            la[a] = 1;
                            let mut lb = [0i32; MAX_RANK];
                            lb[b] = 2;
                            let ab = chevalley_multiply(
                                &blocks[start_deg + 1],
                                &chevalley_multiply(&blocks[start_deg], &v, &la, p).unwrap(),
                                &lb,
                                p,
                            )
                            .unwrap();
                            let ba = chevalley_multiply(
                                &blocks[start_deg + 1],
                                &chevalley_multiply(&blocks[start_deg], &v, &lb, p).unwrap(),
                                &la,
                                p,
                            )
                            .unwrap();
                            assert_eq!(ab, ba);
                        }
                    }
                }
            }
        }
    }
}
