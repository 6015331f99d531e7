//! Occupation-number families and the bookkeeping that splits a family into
//! the modes touched by an interaction and the modes it leaves alone.
//!
//! Families are packed big-endian: the first mode label is the most
//! significant bit, so `OccupationFamily::to_string()` reads exactly like the
//! ket `|1001⟩`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest register the bit-packed representation supports.
pub const MAX_MODES: usize = 63;

/// Totally ordered set of one-fermion mode labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemIndexing {
    labels: Vec<String>,
    positions: HashMap<String, usize>,
}

impl SystemIndexing {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidIndexing("at least one mode is required".into()));
        }
        if labels.len() > MAX_MODES {
            return Err(Error::InvalidIndexing(format!(
                "{} modes exceeds the limit of {MAX_MODES}",
                labels.len()
            )));
        }
        let mut positions = HashMap::with_capacity(labels.len());
        for (pos, label) in labels.iter().enumerate() {
            if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == ',' || c == ':') {
                return Err(Error::InvalidIndexing(format!("bad mode label `{label}`")));
            }
            if positions.insert(label.clone(), pos).is_some() {
                return Err(Error::InvalidIndexing(format!("duplicate mode label `{label}`")));
            }
        }
        Ok(Self { labels, positions })
    }

    /// Modes labelled `0`, `1`, ..., `q - 1`.
    pub fn numbered(q: usize) -> Result<Self> {
        Self::new((0..q).map(|i| i.to_string()))
    }

    /// The four spin-orbitals of a two-site Hubbard model: `0u 0d 1u 1d`.
    pub fn two_site_hubbard() -> Self {
        Self::new(["0u", "0d", "1u", "1d"]).expect("static labels are valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, position: usize) -> &str {
        &self.labels[position]
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.positions
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    /// Family with exactly the named modes occupied.
    pub fn family<S: AsRef<str>>(&self, occupied: &[S]) -> Result<OccupationFamily> {
        let mut n = OccupationFamily::vacuum(self.len());
        for label in occupied {
            let pos = self.position(label.as_ref())?;
            n = n.with(pos, true);
        }
        Ok(n)
    }
}

/// A family `n ∈ {0,1}^Q` labelling one Fock / computational-basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationFamily {
    len: usize,
    bits: u64,
}

impl OccupationFamily {
    pub fn vacuum(len: usize) -> Self {
        assert!(len <= MAX_MODES, "too many modes");
        Self { len, bits: 0 }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        assert!(bits.len() <= MAX_MODES, "too many modes");
        let mut n = Self::vacuum(bits.len());
        for (pos, &b) in bits.iter().enumerate() {
            n = n.with(pos, b);
        }
        n
    }

    /// Inverse of [`OccupationFamily::index`].
    pub fn from_index(index: u64, len: usize) -> Result<Self> {
        if len > MAX_MODES || index >= (1u64 << len) {
            return Err(Error::IndexOutOfRange { index, qubits: len });
        }
        Ok(Self { len, bits: index })
    }

    /// Big-endian integer index in `[0, 2^Q)`.
    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit mask selecting `position` in the packed index.
    pub fn mask(len: usize, position: usize) -> u64 {
        debug_assert!(position < len);
        1u64 << (len - 1 - position)
    }

    pub fn get(&self, position: usize) -> bool {
        self.bits & Self::mask(self.len, position) != 0
    }

    pub fn with(mut self, position: usize, occupied: bool) -> Self {
        let m = Self::mask(self.len, position);
        if occupied {
            self.bits |= m;
        } else {
            self.bits &= !m;
        }
        self
    }

    pub fn occupation(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |pos| self.get(pos))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }
}

impl fmt::Display for OccupationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for OccupationFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: 0,
                    message: format!("bad occupation bit `{other}` in `{s}`"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.len() > MAX_MODES {
            return Err(Error::LengthMismatch { expected: MAX_MODES, found: bits.len() });
        }
        Ok(Self::from_bits(&bits))
    }
}

impl Serialize for OccupationFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OccupationFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Split of the mode positions into affected and unaffected sublists, both in
/// the original mode order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffectedPartition {
    len: usize,
    affected: Vec<usize>,
    unaffected: Vec<usize>,
}

impl AffectedPartition {
    pub fn from_affected(len: usize, affected: &[usize]) -> Result<Self> {
        let mut is_affected = vec![false; len];
        for &pos in affected {
            if pos >= len {
                return Err(Error::QubitOutOfRange { position: pos, qubits: len });
            }
            if is_affected[pos] {
                return Err(Error::InvalidIndexing(format!("position {pos} listed twice")));
            }
            is_affected[pos] = true;
        }
        let (a, u): (Vec<usize>, Vec<usize>) = (0..len).partition(|&p| is_affected[p]);
        Ok(Self { len, affected: a, unaffected: u })
    }

    /// Affected modes are exactly those where the creation and annihilation
    /// families disagree.
    pub fn from_families(create: &OccupationFamily, annihilate: &OccupationFamily) -> Result<Self> {
        if create.len() != annihilate.len() {
            return Err(Error::LengthMismatch { expected: create.len(), found: annihilate.len() });
        }
        let affected: Vec<usize> = (0..create.len())
            .filter(|&q| create.get(q) != annihilate.get(q))
            .collect();
        Self::from_affected(create.len(), &affected)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn affected(&self) -> &[usize] {
        &self.affected
    }

    pub fn unaffected(&self) -> &[usize] {
        &self.unaffected
    }

    pub fn affected_count(&self) -> usize {
        self.affected.len()
    }

    pub fn affected_mask(&self) -> u64 {
        self.affected
            .iter()
            .fold(0, |m, &p| m | OccupationFamily::mask(self.len, p))
    }

    pub fn unaffected_mask(&self) -> u64 {
        self.unaffected
            .iter()
            .fold(0, |m, &p| m | OccupationFamily::mask(self.len, p))
    }

    pub fn affected_labels<'a>(&self, indexing: &'a SystemIndexing) -> Vec<&'a str> {
        self.affected.iter().map(|&p| indexing.label(p)).collect()
    }

    pub fn unaffected_labels<'a>(&self, indexing: &'a SystemIndexing) -> Vec<&'a str> {
        self.unaffected.iter().map(|&p| indexing.label(p)).collect()
    }
}

/// Occupations restricted to an ordered list of mode positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subfamily {
    modes: Vec<usize>,
    bits: Vec<bool>,
}

impl Subfamily {
    pub fn new(modes: Vec<usize>, bits: Vec<bool>) -> Result<Self> {
        if modes.len() != bits.len() {
            return Err(Error::LengthMismatch { expected: modes.len(), found: bits.len() });
        }
        Ok(Self { modes, bits })
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| u8::from(b)).collect()
    }
}

impl fmt::Display for Subfamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

pub fn split_family(n: &OccupationFamily, partition: &AffectedPartition) -> (Subfamily, Subfamily) {
    debug_assert_eq!(n.len(), partition.len());
    let pick = |modes: &[usize]| Subfamily {
        modes: modes.to_vec(),
        bits: modes.iter().map(|&p| n.get(p)).collect(),
    };
    (pick(partition.affected()), pick(partition.unaffected()))
}

pub fn merge_subfamilies(
    affected: &Subfamily,
    unaffected: &Subfamily,
    partition: &AffectedPartition,
) -> Result<OccupationFamily> {
    for (sub, modes) in [(affected, partition.affected()), (unaffected, partition.unaffected())] {
        if sub.len() != modes.len() {
            return Err(Error::LengthMismatch { expected: modes.len(), found: sub.len() });
        }
        if sub.modes() != modes {
            return Err(Error::InvalidIndexing(
                "subfamily modes do not match the partition".into(),
            ));
        }
    }
    let mut n = OccupationFamily::vacuum(partition.len());
    for sub in [affected, unaffected] {
        for (&p, &b) in sub.modes().iter().zip(sub.bits()) {
            n = n.with(p, b);
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: &str) -> OccupationFamily {
        s.parse().unwrap()
    }

    #[test]
    fn big_endian_indexing() {
        assert_eq!(fam("1001").index(), 9);
        assert_eq!(fam("0000").index(), 0);
        assert_eq!(fam("0110").index(), 6);
        assert_eq!(OccupationFamily::from_index(9, 4).unwrap().to_string(), "1001");
        assert!(matches!(
            OccupationFamily::from_index(16, 4),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn index_round_trip_exhaustive() {
        for q in 1..=8 {
            for i in 0..(1u64 << q) {
                assert_eq!(OccupationFamily::from_index(i, q).unwrap().index(), i);
            }
        }
    }

    #[test]
    fn split_examples() {
        let idx = SystemIndexing::two_site_hubbard();
        let up = AffectedPartition::from_affected(4, &[0, 2]).unwrap();
        assert_eq!(up.affected_labels(&idx), ["0u", "1u"]);
        assert_eq!(up.unaffected_labels(&idx), ["0d", "1d"]);

        let (d, v) = split_family(&fam("1001"), &up);
        assert_eq!((d.to_vec(), v.to_vec()), (vec![1, 0], vec![0, 1]));

        let (d, v) = split_family(&fam("0010"), &up);
        assert_eq!((d.to_vec(), v.to_vec()), (vec![0, 1], vec![0, 0]));

        let none = AffectedPartition::from_affected(4, &[]).unwrap();
        let (d, v) = split_family(&fam("1100"), &none);
        assert!(d.is_empty());
        assert_eq!(v.to_vec(), vec![1, 1, 0, 0]);
    }

    #[test]
    fn merge_examples() {
        let up = AffectedPartition::from_affected(4, &[0, 2]).unwrap();
        let d = Subfamily::new(vec![0, 2], vec![true, false]).unwrap();
        let v = Subfamily::new(vec![1, 3], vec![false, false]).unwrap();
        assert_eq!(merge_subfamilies(&d, &v, &up).unwrap(), fam("1000"));

        let none = AffectedPartition::from_affected(4, &[]).unwrap();
        let d = Subfamily::new(vec![], vec![]).unwrap();
        let v = Subfamily::new(vec![0, 1, 2, 3], vec![false, false, true, true]).unwrap();
        assert_eq!(merge_subfamilies(&d, &v, &none).unwrap(), fam("0011"));

        let (d, v) = split_family(&fam("1001"), &up);
        assert_eq!(merge_subfamilies(&d, &v, &up).unwrap(), fam("1001"));
    }

    #[test]
    fn merge_rejects_length_mismatch() {
        let up = AffectedPartition::from_affected(4, &[0, 2]).unwrap();
        let d = Subfamily::new(vec![0], vec![true]).unwrap();
        let v = Subfamily::new(vec![1, 3], vec![false, false]).unwrap();
        assert!(matches!(
            merge_subfamilies(&d, &v, &up),
            Err(Error::LengthMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn split_merge_exhaustive() {
        for q in 1..=6 {
            for mask in 0..(1u64 << q) {
                let affected: Vec<usize> = (0..q).filter(|&p| mask >> p & 1 == 1).collect();
                let part = AffectedPartition::from_affected(q, &affected).unwrap();
                for i in 0..(1u64 << q) {
                    let n = OccupationFamily::from_index(i, q).unwrap();
                    let (d, v) = split_family(&n, &part);
                    assert_eq!(merge_subfamilies(&d, &v, &part).unwrap(), n);
                }
            }
        }
    }

    #[test]
    fn partition_from_families_follows_disagreement() {
        let p = AffectedPartition::from_families(&fam("1100"), &fam("0110")).unwrap();
        assert_eq!(p.affected(), &[0, 2]);
        assert_eq!(p.unaffected(), &[1, 3]);
    }

    #[test]
    fn indexing_rejects_duplicates() {
        assert!(SystemIndexing::new(["a", "b", "a"]).is_err());
        assert!(SystemIndexing::new(["a b"]).is_err());
        let idx = SystemIndexing::new(["0↑", "0↓"]).unwrap();
        assert_eq!(idx.position("0↓").unwrap(), 1);
    }

    #[test]
    fn bitstring_serde() {
        let n = fam("1001");
        let json = serde_json::to_string(&n).unwrap();
        assert_eq!(json, "\"1001\"");
        assert_eq!(serde_json::from_str::<OccupationFamily>(&json).unwrap(), n);
    }
}
