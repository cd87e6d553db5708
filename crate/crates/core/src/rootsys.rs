//! Root systems of the simple types: Cartan data, positive-root
//! enumeration, classical invariant degrees, and torsion primes.
//!
//! Roots are stored as integer vectors in the simple-root basis and
//! coroots in the simple-coroot basis, so every pairing is an integer
//! dot product against Cartan data. The Cartan convention is fixed
//! once: `cartan[i][j] = ⟨α_j, α_i^∨⟩`.

use crate::error::{CoreError, Result};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::BTreeSet;
use std::fmt;

pub const MAX_RANK: usize = 8;

/// Simple type family, Cartan-Killing letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E,
        Family::F,
        Family::G,
    ];

    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    /// Inclusive range of valid ranks. Type A has no upper bound in
    /// principle; we cap it at what the rest of the pipeline can
    /// meaningfully process.
    pub fn rank_range(self) -> (usize, usize) {
        match self {
            Family::A => (1, 32),
            Family::B | Family::C => (2, 32),
            Family::D => (4, 32),
            Family::E => (6, 8),
            Family::F => (4, 4),
            Family::G => (2, 2),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            "F" => Ok(Family::F),
            "G" => Ok(Family::G),
            other => Err(CoreError::input(format!("unknown family {other:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Isogeny form: simply connected (weight lattice) or adjoint (root
/// lattice). This is the only place the form enters the computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Isogeny {
    SimplyConnected,
    Adjoint,
}

impl Isogeny {
    pub fn token(self) -> &'static str {
        match self {
            Isogeny::SimplyConnected => "sc",
            Isogeny::Adjoint => "ad",
        }
    }
}

impl std::str::FromStr for Isogeny {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sc" | "simply_connected" => Ok(Isogeny::SimplyConnected),
            "ad" | "adjoint" => Ok(Isogeny::Adjoint),
            other => Err(CoreError::input(format!(
                "unknown isogeny {other:?} (expected sc or ad)"
            ))),
        }
    }
}

impl fmt::Display for Isogeny {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A split simple group, named by family, rank and isogeny form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupSpec {
    pub family: Family,
    pub rank: usize,
    pub isogeny: Isogeny,
}

impl GroupSpec {
    pub fn new(family: Family, rank: usize, isogeny: Isogeny) -> Result<Self> {
        let (lo, hi) = family.rank_range();
        if rank < lo || rank > hi {
            return Err(CoreError::input(format!(
                "invalid rank {rank} for family {family}: valid range is {lo}..={hi}"
            )));
        }
        Ok(GroupSpec {
            family,
            rank,
            isogeny,
        })
    }

    pub fn label(&self) -> String {
        format!("{}{}^{}", self.family, self.rank, self.isogeny)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Cartan matrix with the convention `cartan[i][j] = ⟨α_j, α_i^∨⟩`.
pub fn cartan_matrix(family: Family, rank: usize) -> Vec<Vec<i32>> {
    let n = rank;
    let mut a = vec![vec![0i32; n]; n];
    for i in 0..n {
        a[i][i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    match family {
        Family::A => {
            for i in 0..n.saturating_sub(1) {
                link(i, i + 1);
            }
        }
        Family::B => {
            // α_0..α_{n-2} long, α_{n-1} short; the short-root row
            // carries the -2.
            for i in 0..n - 1 {
                link(i, i + 1);
            }
            a[n - 1][n - 2] = -2;
        }
        Family::C => {
            for i in 0..n - 1 {
                link(i, i + 1);
            }
            a[n - 2][n - 1] = -2;
        }
        Family::D => {
            for i in 0..n - 2 {
                link(i, i + 1);
            }
            link(n - 3, n - 1);
        }
        Family::E => {
            // Bourbaki numbering, zero-indexed: chain 0-2-3-4-5(-6(-7)),
            // node 1 hangs off node 3.
            link(0, 2);
            link(2, 3);
            link(1, 3);
            for i in 3..n - 1 {
                link(i, i + 1);
            }
        }
        Family::F => {
            // α_0, α_1 long; α_2, α_3 short.
            link(0, 1);
            link(1, 2);
            link(2, 3);
            a[2][1] = -2;
        }
        Family::G => {
            // α_0 short, α_1 long.
            link(0, 1);
            a[0][1] = -3;
        }
    }
    a
}

/// A root system: Cartan matrix, positive roots and coroots
/// (index-aligned), rank and positive-root count. Immutable after
/// construction.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub spec: GroupSpec,
    pub cartan: Vec<Vec<i32>>,
    pub positive_roots: Vec<Vec<i32>>,
    pub positive_coroots: Vec<Vec<i32>>,
}

impl RootSystem {
    pub fn rank(&self) -> usize {
        self.spec.rank
    }

    /// Number of positive roots; equals dim X for the flag variety X.
    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn height(root: &[i32]) -> i32 {
        root.iter().sum()
    }

    /// ⟨λ, α_i^∨⟩ for λ in fundamental-weight coordinates is just λ_i;
    /// for a general positive coroot it is the dot product with the
    /// coroot's simple-coroot coordinates.
    pub fn pair_weight_coroot(lambda: &[i32], coroot: &[i32]) -> i64 {
        lambda
            .iter()
            .zip(coroot.iter())
            .map(|(&l, &c)| l as i64 * c as i64)
            .sum()
    }
}

/// Apply the simple reflection `s_i` to a vector in the simple-root
/// basis: subtract `⟨β, α_i^∨⟩ = (cartan·β)_i` from coordinate i.
pub fn reflect_root(cartan: &[Vec<i32>], i: usize, coords: &mut [i32]) {
    let pairing: i32 = cartan[i]
        .iter()
        .zip(coords.iter())
        .map(|(&a, &c)| a * c)
        .sum();
    coords[i] -= pairing;
}

/// Apply `s_i` to a vector in the simple-coroot basis: subtract
/// `⟨α_i, β^∨⟩ = (cartanᵀ·β^∨)_i` from coordinate i.
pub fn reflect_coroot(cartan: &[Vec<i32>], i: usize, coords: &mut [i32]) {
    let pairing: i32 = (0..coords.len()).map(|j| cartan[j][i] * coords[j]).sum();
    coords[i] -= pairing;
}

/// Build the root system by the standard closure algorithm: seed with
/// the simple roots, repeatedly apply simple reflections, keep the
/// vectors with all coordinates nonnegative. Coroots are carried along
/// the same orbit so the index alignment is automatic.
pub fn build_root_system(spec: GroupSpec) -> Result<RootSystem> {
    let n = spec.rank;
    let cartan = cartan_matrix(spec.family, n);

    let mut seen: BTreeSet<Vec<i32>> = BTreeSet::new();
    let mut queue: Vec<(Vec<i32>, Vec<i32>)> = Vec::new();
    for i in 0..n {
        let mut root = vec![0i32; n];
        let mut coroot = vec![0i32; n];
        root[i] = 1;
        coroot[i] = 1;
        seen.insert(root.clone());
        queue.push((root, coroot));
    }

    let mut pairs: Vec<(Vec<i32>, Vec<i32>)> = queue.clone();
    while let Some((root, coroot)) = queue.pop() {
        for i in 0..n {
            let mut r = root.clone();
            let mut c = coroot.clone();
            reflect_root(&cartan, i, &mut r);
            if r.iter().any(|&x| x < 0) {
                continue;
            }
            if seen.insert(r.clone()) {
                reflect_coroot(&cartan, i, &mut c);
                pairs.push((r.clone(), c.clone()));
                queue.push((r, c));
            }
        }
    }

    // Deterministic order: by height, then lexicographically.
    pairs.sort_by(|(a, _), (b, _)| {
        (RootSystem::height(a), a).cmp(&(RootSystem::height(b), b))
    });

    let (positive_roots, positive_coroots): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();

    Ok(RootSystem {
        spec,
        cartan,
        positive_roots,
        positive_coroots,
    })
}

/// Degrees of the basic Weyl-invariant polynomials, together with the
/// exponents (degree − 1 each).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub degrees: Vec<u64>,
    pub exponents: Vec<u64>,
}

impl DegreeProfile {
    /// |W| = Π d_i. BigUint because type-A ranks up to the cap give
    /// factorials past u64.
    pub fn weyl_order(&self) -> BigUint {
        self.degrees
            .iter()
            .fold(BigUint::one(), |acc, &d| acc * BigUint::from(d))
    }

    pub fn weyl_order_u64(&self) -> Option<u64> {
        u64::try_from(self.weyl_order()).ok()
    }
}

/// Compute the degree profile from the height distribution of the
/// positive roots: the exponents are the conjugate partition of the
/// height multiplicities.
pub fn degrees(rs: &RootSystem) -> DegreeProfile {
    let n = rs.rank();
    let max_height = rs
        .positive_roots
        .iter()
        .map(|r| RootSystem::height(r))
        .max()
        .unwrap_or(0) as usize;
    let mut histogram = vec![0u64; max_height + 1];
    for root in &rs.positive_roots {
        histogram[RootSystem::height(root) as usize] += 1;
    }
    let mut exponents: Vec<u64> = (1..=n as u64)
        .map(|j| (1..=max_height).filter(|&k| histogram[k] >= j).count() as u64)
        .collect();
    exponents.sort_unstable();
    let degrees = exponents.iter().map(|e| e + 1).collect();
    DegreeProfile { degrees, exponents }
}

/// Torsion primes of a group, restricted to {2, 3, 5}.
///
/// `complete` is false exactly for adjoint type A whose center order
/// n+1 has a prime factor outside {2, 3, 5}: those torsion primes fall
/// outside the tabulated range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionData {
    pub primes: BTreeSet<u32>,
    pub complete: bool,
}

impl TorsionData {
    pub fn contains(&self, p: u32) -> bool {
        self.primes.contains(&p)
    }
}

/// Static torsion-prime table.
///
/// Simply connected forms carry the classical torsion primes. Adjoint
/// forms additionally have p-torsion for every p dividing the Cartan
/// determinant (the weight/root lattice index), because the degree-one
/// part of the mod-p characteristic-map image then drops rank.
pub fn torsion_primes(spec: GroupSpec) -> Result<TorsionData> {
    let sc: &[u32] = match (spec.family, spec.rank) {
        (Family::A, _) | (Family::C, _) => &[],
        (Family::B, n) if n >= 3 => &[2],
        (Family::B, _) => &[],
        (Family::D, _) => &[2],
        (Family::G, _) => &[2],
        (Family::F, _) => &[2, 3],
        (Family::E, 6) | (Family::E, 7) => &[2, 3],
        (Family::E, 8) => &[2, 3, 5],
        (Family::E, n) => {
            return Err(CoreError::input(format!("invalid rank {n} for family E")))
        }
    };
    let mut primes: BTreeSet<u32> = sc.iter().copied().collect();
    let mut complete = true;

    if spec.isogeny == Isogeny::Adjoint {
        // Cartan determinant = |P/Q|.
        let det: u64 = match spec.family {
            Family::A => spec.rank as u64 + 1,
            Family::B | Family::C => 2,
            Family::D => 4,
            Family::E => match spec.rank {
                6 => 3,
                7 => 2,
                _ => 1,
            },
            Family::F | Family::G => 1,
        };
        let mut rest = det;
        for p in [2u32, 3, 5] {
            if rest % p as u64 == 0 {
                primes.insert(p);
                while rest % p as u64 == 0 {
                    rest /= p as u64;
                }
            }
        }
        // Any leftover factor is a torsion prime outside {2,3,5}.
        if rest > 1 {
            complete = false;
        }
    }

    Ok(TorsionData { primes, complete })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, rank: usize) -> GroupSpec {
        GroupSpec::new(family, rank, Isogeny::SimplyConnected).unwrap()
    }

    fn rs(family: Family, rank: usize) -> RootSystem {
        build_root_system(spec(family, rank)).unwrap()
    }

    #[test]
    fn rejects_invalid_ranks() {
        assert!(GroupSpec::new(Family::D, 3, Isogeny::SimplyConnected).is_err());
        assert!(GroupSpec::new(Family::E, 5, Isogeny::SimplyConnected).is_err());
        assert!(GroupSpec::new(Family::F, 3, Isogeny::Adjoint).is_err());
        assert!(GroupSpec::new(Family::G, 1, Isogeny::Adjoint).is_err());
        assert!(GroupSpec::new(Family::B, 1, Isogeny::SimplyConnected).is_err());
    }

    #[test]
    fn a1_has_one_positive_root() {
        let r = rs(Family::A, 1);
        assert_eq!(r.num_positive_roots(), 1);
        assert_eq!(r.positive_roots[0], vec![1]);
    }

    // Oracle: dim G = 2N + n pins N for the exceptional types.
    #[test]
    fn positive_root_counts_match_group_dimensions() {
        for (family, rank, dim) in [
            (Family::G, 2, 14),
            (Family::F, 4, 52),
            (Family::E, 6, 78),
            (Family::E, 7, 133),
            (Family::E, 8, 248),
        ] {
            let r = rs(family, rank);
            assert_eq!(
                2 * r.num_positive_roots() + rank,
                dim,
                "dim {}{} should be {}",
                family,
                rank,
                dim
            );
        }
        assert_eq!(rs(Family::F, 4).num_positive_roots(), 24);
        assert_eq!(rs(Family::E, 8).num_positive_roots(), 120);
    }

    #[test]
    fn degree_profiles_match_classical_tables() {
        assert_eq!(degrees(&rs(Family::A, 1)).degrees, vec![2]);
        assert_eq!(degrees(&rs(Family::A, 3)).degrees, vec![2, 3, 4]);
        assert_eq!(degrees(&rs(Family::B, 2)).degrees, vec![2, 4]);
        assert_eq!(degrees(&rs(Family::C, 3)).degrees, vec![2, 4, 6]);
        assert_eq!(degrees(&rs(Family::D, 4)).degrees, vec![2, 4, 4, 6]);
        assert_eq!(degrees(&rs(Family::G, 2)).degrees, vec![2, 6]);
        assert_eq!(degrees(&rs(Family::F, 4)).degrees, vec![2, 6, 8, 12]);
        assert_eq!(degrees(&rs(Family::E, 6)).degrees, vec![2, 5, 6, 8, 9, 12]);
        assert_eq!(
            degrees(&rs(Family::E, 7)).degrees,
            vec![2, 6, 8, 10, 12, 14, 18]
        );
        assert_eq!(
            degrees(&rs(Family::E, 8)).degrees,
            vec![2, 8, 12, 14, 18, 20, 24, 30]
        );
    }

    #[test]
    fn exponent_sum_equals_positive_root_count_up_to_rank_8() {
        for family in Family::ALL {
            let (lo, hi) = family.rank_range();
            for rank in lo..=hi.min(8) {
                let r = rs(family, rank);
                let prof = degrees(&r);
                let sum: u64 = prof.exponents.iter().sum();
                assert_eq!(
                    sum,
                    r.num_positive_roots() as u64,
                    "Σ(d_i - 1) = N fails for {}{}",
                    family,
                    rank
                );
            }
        }
    }

    #[test]
    fn roots_distinct_with_rank_many_simple_ones() {
        for (family, rank) in [
            (Family::A, 4),
            (Family::B, 3),
            (Family::C, 3),
            (Family::D, 4),
            (Family::F, 4),
            (Family::G, 2),
        ] {
            let r = rs(family, rank);
            let set: BTreeSet<_> = r.positive_roots.iter().cloned().collect();
            assert_eq!(set.len(), r.num_positive_roots());
            let simple = r
                .positive_roots
                .iter()
                .filter(|v| RootSystem::height(v) == 1)
                .count();
            assert_eq!(simple, rank);
            let prof = degrees(&r);
            let max_height = r
                .positive_roots
                .iter()
                .map(|v| RootSystem::height(v))
                .max()
                .unwrap() as u64;
            assert_eq!(max_height, *prof.degrees.last().unwrap() - 1);
        }
    }

    #[test]
    fn simple_reflection_permutes_other_positive_roots() {
        for (family, rank) in [(Family::B, 3), (Family::F, 4), (Family::G, 2)] {
            let r = rs(family, rank);
            let set: BTreeSet<_> = r.positive_roots.iter().cloned().collect();
            for root in &r.positive_roots {
                for i in 0..rank {
                    let mut image = root.clone();
                    reflect_root(&r.cartan, i, &mut image);
                    if image.iter().all(|&x| x >= 0) {
                        assert!(set.contains(&image));
                    } else {
                        // Only α_i itself reflects negative.
                        let mut neg = image.clone();
                        neg.iter_mut().for_each(|x| *x = -*x);
                        let mut alpha_i = vec![0; rank];
                        alpha_i[i] = 1;
                        assert_eq!(neg, alpha_i);
                    }
                }
            }
        }
    }

    #[test]
    fn coroots_are_index_aligned() {
        // In B2 the short root e1 = α_1 + α_2 has coroot 2α_1^∨ + α_2^∨.
        let r = rs(Family::B, 2);
        let idx = r
            .positive_roots
            .iter()
            .position(|v| v == &vec![1, 1])
            .unwrap();
        assert_eq!(r.positive_coroots[idx], vec![2, 1]);
    }

    #[test]
    fn torsion_table_agrees_with_fixture_entries() {
        let f4 = torsion_primes(spec(Family::F, 4)).unwrap();
        assert_eq!(f4.primes, BTreeSet::from([2, 3]));
        let e8 = torsion_primes(spec(Family::E, 8)).unwrap();
        assert_eq!(e8.primes, BTreeSet::from([2, 3, 5]));
        let a3 = torsion_primes(spec(Family::A, 3)).unwrap();
        assert!(a3.primes.is_empty() && a3.complete);

        let pgl4 = torsion_primes(GroupSpec::new(Family::A, 3, Isogeny::Adjoint).unwrap()).unwrap();
        assert_eq!(pgl4.primes, BTreeSet::from([2]));
        assert!(pgl4.complete);
        let pgl7 = torsion_primes(GroupSpec::new(Family::A, 6, Isogeny::Adjoint).unwrap()).unwrap();
        assert!(pgl7.primes.is_empty());
        assert!(!pgl7.complete, "7 | n+1 falls outside the tabulated primes");

        let so5 = torsion_primes(GroupSpec::new(Family::B, 2, Isogeny::Adjoint).unwrap()).unwrap();
        assert_eq!(so5.primes, BTreeSet::from([2]));
        let sp6 = torsion_primes(spec(Family::C, 3)).unwrap();
        assert!(sp6.primes.is_empty());
        let pgsp6 =
            torsion_primes(GroupSpec::new(Family::C, 3, Isogeny::Adjoint).unwrap()).unwrap();
        assert_eq!(pgsp6.primes, BTreeSet::from([2]));
    }
}
