//! Set partitions of `{1, ..., n}`, their block profiles, and the exact
//! counts tying the two together.
//!
//! The canonical representation of a partition is its restricted-growth
//! string: element `j` stores the number of its block, blocks are numbered
//! in order of their least element. That makes equality O(n), keeps every
//! value canonical by construction, and gives a natural lexicographic
//! enumeration order.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default guard on set-partition enumeration; Bell(14) is already ~1.9e8.
pub const DEFAULT_MAX_ENUM: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("n = {n} exceeds the enumeration cap {cap} (Bell numbers grow superexponentially); raise the cap to enumerate anyway")]
    CapExceeded { n: usize, cap: usize },
    #[error("invalid set partition: {0}")]
    InvalidPartition(String),
    #[error("invalid block profile: {0}")]
    InvalidProfile(String),
}

/// A partition of `{1, ..., n}` into disjoint nonempty blocks.
///
/// Stored as a restricted-growth string, so two values are equal iff they
/// are the same partition. The derived `Ord` is the enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    rgs: Vec<usize>,
}

impl SetPartition {
    /// The unique partition of the empty set (zero blocks).
    pub fn empty() -> Self {
        SetPartition { rgs: Vec::new() }
    }

    /// Build from a restricted-growth string; rejects non-canonical input.
    pub fn from_rgs(rgs: Vec<usize>) -> Result<Self, CombinatoricsError> {
        let mut bound = 0;
        for (j, &v) in rgs.iter().enumerate() {
            if v > bound {
                return Err(CombinatoricsError::InvalidPartition(format!(
                    "rgs[{j}] = {v} violates restricted growth (max allowed here is {bound})"
                )));
            }
            bound = bound.max(v + 1);
        }
        Ok(SetPartition { rgs })
    }

    /// Build from an explicit block list in canonical form: blocks ordered
    /// by least element, elements ascending, disjoint, covering `1..=n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self, CombinatoricsError> {
        let invalid = |msg: String| Err(CombinatoricsError::InvalidPartition(msg));
        let mut rgs = vec![usize::MAX; n];
        let mut prev_least = 0;
        for (b, block) in blocks.iter().enumerate() {
            let Some(&least) = block.first() else {
                return invalid(format!("block {b} is empty"));
            };
            if least <= prev_least && b > 0 {
                return invalid(format!(
                    "blocks must be ordered by least element (block {b} starts at {least})"
                ));
            }
            prev_least = least;
            let mut prev = 0;
            for &e in block {
                if e < 1 || e > n {
                    return invalid(format!("element {e} is outside 1..={n}"));
                }
                if e <= prev {
                    return invalid(format!("elements of block {b} must be strictly ascending"));
                }
                prev = e;
                if rgs[e - 1] != usize::MAX {
                    return invalid(format!("element {e} appears in more than one block"));
                }
                rgs[e - 1] = b;
            }
        }
        if let Some(missing) = rgs.iter().position(|&v| v == usize::MAX) {
            return invalid(format!("element {} is missing", missing + 1));
        }
        // Block ordering by least element plus coverage makes this a valid
        // restricted-growth string; from_rgs re-checks it for safety.
        SetPartition::from_rgs(rgs)
    }

    /// Size of the ground set.
    pub fn n(&self) -> usize {
        self.rgs.len()
    }

    /// The restricted-growth string; `rgs()[j]` is the block of element `j+1`.
    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    /// Number of blocks, the paper's |pi|.
    pub fn block_count(&self) -> usize {
        self.rgs.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks as sorted element lists, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (j, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(j + 1);
        }
        blocks
    }

    /// Block sizes indexed by block number.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.block_count()];
        for &b in &self.rgs {
            sizes[b] += 1;
        }
        sizes
    }
}

/// Prints block notation such as `{1,3}{2}`; the empty partition is `{}`.
impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rgs.is_empty() {
            return f.write_str("{}");
        }
        for block in self.blocks() {
            f.write_str("{")?;
            for (i, e) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SetPartitionRepr {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SetPartitionRepr {
            n: self.n(),
            blocks: self.blocks(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SetPartitionRepr::deserialize(deserializer)?;
        SetPartition::from_blocks(repr.n, &repr.blocks).map_err(D::Error::custom)
    }
}

/// Streaming enumeration of all partitions of `{1, ..., n}` in lexicographic
/// order of the restricted-growth string.
pub struct SetPartitions {
    rgs: Vec<usize>,
    // bound[j] = 1 + max(rgs[..j]); the largest value rgs[j] may take.
    bound: Vec<usize>,
    started: bool,
    done: bool,
}

impl SetPartitions {
    fn new(n: usize) -> Self {
        let mut bound = vec![0; n];
        for b in bound.iter_mut().skip(1) {
            *b = 1;
        }
        SetPartitions {
            rgs: vec![0; n],
            bound,
            started: false,
            done: false,
        }
    }
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(SetPartition {
                rgs: self.rgs.clone(),
            });
        }
        let n = self.rgs.len();
        for j in (1..n).rev() {
            if self.rgs[j] < self.bound[j] {
                self.rgs[j] += 1;
                for i in j + 1..n {
                    self.rgs[i] = 0;
                    self.bound[i] = self.bound[i - 1].max(self.rgs[i - 1] + 1);
                }
                return Some(SetPartition {
                    rgs: self.rgs.clone(),
                });
            }
        }
        self.done = true;
        None
    }
}

/// Enumerate all partitions of `{1, ..., n}` under the default cap.
pub fn enumerate_set_partitions(n: usize) -> Result<SetPartitions, CombinatoricsError> {
    enumerate_set_partitions_with_cap(n, DEFAULT_MAX_ENUM)
}

/// Enumerate all partitions of `{1, ..., n}`, guarded by an explicit cap.
pub fn enumerate_set_partitions_with_cap(
    n: usize,
    cap: usize,
) -> Result<SetPartitions, CombinatoricsError> {
    if n > cap {
        return Err(CombinatoricsError::CapExceeded { n, cap });
    }
    Ok(SetPartitions::new(n))
}

/// Visit the block-size vector of every partition of `{1, ..., n}`, in the
/// same lexicographic order as [`enumerate_set_partitions`], without
/// materializing the partitions. `sizes[b]` is the size of block `b`.
pub(crate) fn visit_block_sizes<F: FnMut(&[usize])>(n: usize, f: &mut F) {
    fn rec<F: FnMut(&[usize])>(remaining: usize, sizes: &mut Vec<usize>, f: &mut F) {
        if remaining == 0 {
            f(sizes);
            return;
        }
        // Existing blocks in ascending order, then a fresh block: this is
        // exactly ascending choice of the next rgs value.
        for b in 0..sizes.len() {
            sizes[b] += 1;
            rec(remaining - 1, sizes, f);
            sizes[b] -= 1;
        }
        sizes.push(1);
        rec(remaining - 1, sizes, f);
        sizes.pop();
    }
    rec(n, &mut Vec::new(), f);
}

/// n-th Bell number |Pi_n| via the Bell-triangle recurrence (independent of
/// the enumerator, so the two can cross-check each other).
pub fn bell_number(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let mut row = vec![BigUint::one()];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("row is nonempty").clone());
        for v in &row {
            let s = next.last().expect("just pushed") + v;
            next.push(s);
        }
        row = next;
    }
    row.last().expect("row is nonempty").clone()
}

/// The |p| + 1 partitions of `{1, ..., n+1}` obtained from `p`: first by
/// adding `{n+1}` as a new block, then by inserting `n+1` into each existing
/// block in block-number order. Every partition of `{1, ..., n+1}` arises
/// from exactly one partition of `{1, ..., n}` this way.
pub fn extend_partition(p: &SetPartition) -> Vec<SetPartition> {
    let k = p.block_count();
    let mut out = Vec::with_capacity(k + 1);
    let mut singleton = p.rgs.clone();
    singleton.push(k);
    out.push(SetPartition { rgs: singleton });
    for b in 0..k {
        let mut rgs = p.rgs.clone();
        rgs.push(b);
        out.push(SetPartition { rgs });
    }
    out
}

/// Block-size multiplicities of a partition of `{1, ..., n}`:
/// `multiplicities()[i-1]` blocks have exactly `i` elements, and the sizes
/// weighted by multiplicity sum back to `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockProfile {
    k: Vec<usize>,
}

impl BlockProfile {
    /// The unique profile for n = 0.
    pub fn empty() -> Self {
        BlockProfile { k: Vec::new() }
    }

    /// Build from multiplicities `k` (length n, `k[i-1]` blocks of size `i`);
    /// rejects vectors whose weighted sum is not n.
    pub fn from_multiplicities(k: Vec<usize>) -> Result<Self, CombinatoricsError> {
        let n = k.len();
        let weighted: usize = k.iter().enumerate().map(|(i, &ki)| (i + 1) * ki).sum();
        if weighted != n {
            return Err(CombinatoricsError::InvalidProfile(format!(
                "multiplicities sum to {weighted} weighted by size, expected {n}"
            )));
        }
        Ok(BlockProfile { k })
    }

    pub fn n(&self) -> usize {
        self.k.len()
    }

    /// `multiplicities()[i-1]` = number of blocks of size `i`.
    pub fn multiplicities(&self) -> &[usize] {
        &self.k
    }

    /// Total number of blocks, k_1 + ... + k_n.
    pub fn block_count(&self) -> usize {
        self.k.iter().sum()
    }

    /// Block sizes in descending order, e.g. `(1,0,1,0)` -> `[3, 1]`.
    pub fn parts(&self) -> Vec<usize> {
        let mut parts = Vec::with_capacity(self.block_count());
        for (i, &ki) in self.k.iter().enumerate().rev() {
            for _ in 0..ki {
                parts.push(i + 1);
            }
        }
        parts
    }
}

/// Prints the multiplicity vector, e.g. `(1,1,0)`.
impl fmt::Display for BlockProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, ki) in self.k.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{ki}")?;
        }
        f.write_str(")")
    }
}

#[derive(Serialize, Deserialize)]
struct BlockProfileRepr {
    n: usize,
    k: Vec<usize>,
}

impl Serialize for BlockProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        BlockProfileRepr {
            n: self.n(),
            k: self.k.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BlockProfile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = BlockProfileRepr::deserialize(deserializer)?;
        if repr.k.len() != repr.n {
            return Err(D::Error::custom(format!(
                "profile k has length {}, expected n = {}",
                repr.k.len(),
                repr.n
            )));
        }
        BlockProfile::from_multiplicities(repr.k).map_err(D::Error::custom)
    }
}

/// The block profile of a partition.
pub fn block_profile(p: &SetPartition) -> BlockProfile {
    let mut k = vec![0usize; p.n()];
    for size in p.block_sizes() {
        k[size - 1] += 1;
    }
    BlockProfile { k }
}

/// Every multiplicity vector with weighted sum n, exactly once. The order is
/// ascending lexicographic on the descending part lists ([1,1,1,1] first,
/// [n] last), which is the classical order of the expanded formula's terms:
/// for n = 4 it yields (4,0,0,0), (2,1,0,0), (0,2,0,0), (1,0,1,0), (0,0,0,1).
pub fn enumerate_block_profiles(n: usize) -> Vec<BlockProfile> {
    fn rec(
        remaining: usize,
        max_part: usize,
        parts: &mut Vec<usize>,
        n: usize,
        out: &mut Vec<BlockProfile>,
    ) {
        if remaining == 0 {
            let mut k = vec![0usize; n];
            for &p in parts.iter() {
                k[p - 1] += 1;
            }
            out.push(BlockProfile { k });
            return;
        }
        for part in 1..=remaining.min(max_part) {
            parts.push(part);
            rec(remaining - part, part, parts, n, out);
            parts.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), n, &mut out);
    out
}

/// n! as an exact integer.
pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= BigUint::from(i);
    }
    acc
}

/// Number of partitions of `{1, ..., n}` with the given block profile:
/// n! / (k_1! 1!^{k_1} ... k_n! n!^{k_n}). The division is exact.
pub fn profile_count(pf: &BlockProfile) -> BigUint {
    let numer = factorial(pf.n());
    let mut denom = BigUint::one();
    for (i, &ki) in pf.k.iter().enumerate() {
        if ki == 0 {
            continue;
        }
        denom *= factorial(ki);
        denom *= factorial(i + 1).pow(ki as u32);
    }
    debug_assert!((&numer % &denom).is_zero());
    numer / denom
}
