//! Second-quantized Hamiltonians `Ĥ = Σ_l h_l C†_{n⁺_l} C_{n⁻_l}` and their
//! compilation into measurement data.
//!
//! Each term is stored in canonical product order: creation operators in mode
//! order, then annihilation operators in reversed mode order (so that
//! `C_{n⁻} = (C†_{n⁻})†`). Compiling a term splits the modes into the ones the
//! term changes (affected) and the ones where it only counts (unaffected),
//! records the reordering sign, and enumerates the `2^Q̇` Pauli measurement
//! families needed to estimate it.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{split_family, AffectedPartition, OccupationFamily, Subfamily, SystemIndexing};

/// Measurement axis on one affected qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'x' | 'X' => Some(Axis::X),
            'y' | 'Y' => Some(Axis::Y),
            _ => None,
        }
    }
}

/// One Pauli axis per affected mode, in affected-mode order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MeasurementFamily(pub Vec<Axis>);

impl MeasurementFamily {
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| Axis::from_char(c).ok_or_else(|| Error::InvalidMeasurementFamily(s.to_string())))
            .collect::<Result<Vec<_>>>()
            .map(MeasurementFamily)
    }

    /// All `2^k` families over `k` affected modes, `x` before `y`, first mode
    /// most significant.
    pub fn enumerate(k: usize) -> Vec<Self> {
        (0..1usize << k)
            .map(|code| {
                MeasurementFamily(
                    (0..k)
                        .map(|i| if code >> (k - 1 - i) & 1 == 1 { Axis::Y } else { Axis::X })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for MeasurementFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        for a in &self.0 {
            write!(f, "{}", a.as_char())?;
        }
        Ok(())
    }
}

/// Serialized as the axis string, e.g. `"xy"`; the empty family is `""`.
impl Serialize for MeasurementFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0.iter().map(|a| a.as_char()).collect::<String>())
    }
}

impl<'de> Deserialize<'de> for MeasurementFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// `h · C†_{n⁺} C_{n⁻}` in canonical product order.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerm {
    pub coeff: Complex64,
    pub create: OccupationFamily,
    pub annihilate: OccupationFamily,
}

impl InteractionTerm {
    pub fn new(coeff: Complex64, create: OccupationFamily, annihilate: OccupationFamily) -> Result<Self> {
        if create.len() != annihilate.len() {
            return Err(Error::LengthMismatch { expected: create.len(), found: annihilate.len() });
        }
        if coeff == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidTerm("zero coefficient".into()));
        }
        Ok(Self { coeff, create, annihilate })
    }

    /// Build a term from an operator string `c†_{a₁} c†_{a₂} … c_{b₁} c_{b₂} …`
    /// written in any order within each group. The string is brought to
    /// canonical order and the resulting sign is folded into the coefficient.
    pub fn from_operators<S: AsRef<str>>(
        indexing: &SystemIndexing,
        coeff: Complex64,
        create: &[S],
        annihilate: &[S],
    ) -> Result<Self> {
        let positions = |labels: &[S]| -> Result<Vec<usize>> {
            let ps = labels
                .iter()
                .map(|l| indexing.position(l.as_ref()))
                .collect::<Result<Vec<_>>>()?;
            let mut seen = vec![false; indexing.len()];
            for &p in &ps {
                if std::mem::replace(&mut seen[p], true) {
                    return Err(Error::InvalidTerm(format!(
                        "mode `{}` repeated within one operator group",
                        indexing.label(p)
                    )));
                }
            }
            Ok(ps)
        };
        let cre = positions(create)?;
        let ann = positions(annihilate)?;

        // creations sorted ascending, annihilations sorted descending
        let mut parity = inversions(&cre, |a, b| a > b);
        parity += inversions(&ann, |a, b| a < b);
        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };

        let fam = |ps: &[usize]| {
            ps.iter()
                .fold(OccupationFamily::vacuum(indexing.len()), |n, &p| n.with(p, true))
        };
        Self::new(coeff * sign, fam(&cre), fam(&ann))
    }

    /// Canonical operator sequence as `(position, is_creation)`, leftmost first.
    pub fn operators(&self) -> Vec<(usize, bool)> {
        let q = self.create.len();
        let mut ops: Vec<(usize, bool)> = (0..q).filter(|&p| self.create.get(p)).map(|p| (p, true)).collect();
        ops.extend((0..q).rev().filter(|&p| self.annihilate.get(p)).map(|p| (p, false)));
        ops
    }

    pub fn is_number_conserving(&self) -> bool {
        self.create.occupation() == self.annihilate.occupation()
    }

    pub fn describe(&self, indexing: &SystemIndexing) -> String {
        let mut s = format!("({:+}{:+}i)", self.coeff.re, self.coeff.im);
        for (p, dag) in self.operators() {
            s.push(' ');
            s.push_str(if dag { "c†_" } else { "c_" });
            s.push_str(indexing.label(p));
        }
        s
    }
}

fn inversions(xs: &[usize], out_of_order: impl Fn(usize, usize) -> bool) -> usize {
    let mut count = 0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if out_of_order(xs[i], xs[j]) {
                count += 1;
            }
        }
    }
    count
}

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub indexing: SystemIndexing,
    pub terms: Vec<InteractionTerm>,
}

impl Hamiltonian {
    pub fn new(indexing: SystemIndexing) -> Self {
        Self { indexing, terms: Vec::new() }
    }

    pub fn push(&mut self, term: InteractionTerm) -> Result<()> {
        if term.create.len() != self.indexing.len() {
            return Err(Error::LengthMismatch { expected: self.indexing.len(), found: term.create.len() });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn with_terms(indexing: SystemIndexing, terms: Vec<InteractionTerm>) -> Result<Self> {
        let mut h = Self::new(indexing);
        for t in terms {
            h.push(t)?;
        }
        Ok(h)
    }

    pub fn num_modes(&self) -> usize {
        self.indexing.len()
    }

    /// Two-site Hubbard model over modes `0u 0d 1u 1d`:
    /// `t Σ_σ (c†_{0σ} c_{1σ} + h.c.) + U Σ_i n_{i↑} n_{i↓}`.
    pub fn two_site_hubbard(t: f64, u: f64) -> Self {
        let idx = SystemIndexing::two_site_hubbard();
        let mut h = Self::new(idx.clone());
        let c = |x: f64| Complex64::new(x, 0.0);
        let hops = [("0u", "1u"), ("1u", "0u"), ("0d", "1d"), ("1d", "0d")];
        for (a, b) in hops {
            if t != 0.0 {
                h.push(InteractionTerm::from_operators(&idx, c(t), &[a], &[b]).unwrap()).unwrap();
            }
        }
        for site in ["0", "1"] {
            if u != 0.0 {
                let up = format!("{site}u");
                let dn = format!("{site}d");
                h.push(
                    InteractionTerm::from_operators(&idx, c(u), &[&up, &dn], &[&dn, &up]).unwrap(),
                )
                .unwrap();
            }
        }
        h
    }

    pub fn compile(&self) -> Vec<CompiledTerm> {
        self.terms.iter().map(compile_term).collect()
    }

    /// True iff every term's conjugate partner `(h*, n⁻, n⁺)` is present with
    /// the same total weight.
    pub fn validate_hermitian(&self) -> bool {
        let mut sums: HashMap<(u64, u64), Complex64> = HashMap::new();
        let mut scale: f64 = 0.0;
        for t in &self.terms {
            *sums.entry((t.create.index(), t.annihilate.index())).or_default() += t.coeff;
            scale = scale.max(t.coeff.norm());
        }
        let tol = 1e-12 * scale.max(1.0);
        sums.iter().all(|(&(a, b), &h)| {
            let partner = sums.get(&(b, a)).copied().unwrap_or_default();
            (h - partner.conj()).norm() <= tol
        })
    }
}

/// A term together with everything the estimator needs that does not depend
/// on the ansatz parameters.
#[derive(Debug, Clone)]
pub struct CompiledTerm {
    pub term: InteractionTerm,
    pub partition: AffectedPartition,
    pub sign: f64,
    pub dot_plus: Subfamily,
    pub dot_minus: Subfamily,
    pub vec_plus: Subfamily,
    pub measurement_families: Vec<MeasurementFamily>,
    /// `n⁺` restricted to the affected positions, in packed form.
    pub plus_affected_bits: u64,
    /// `n⁻` restricted to the affected positions, in packed form.
    pub minus_affected_bits: u64,
    /// Unaffected positions that carry a number operator.
    pub number_mask: u64,
    /// Unaffected positions sitting before an odd number of affected ones.
    pub string_mask: u64,
}

pub fn compile_term(term: &InteractionTerm) -> CompiledTerm {
    let partition = AffectedPartition::from_families(&term.create, &term.annihilate)
        .expect("term families share a length");
    let sign = permutation_sign(term, &partition);
    let (dot_plus, vec_plus) = split_family(&term.create, &partition);
    let (dot_minus, _) = split_family(&term.annihilate, &partition);

    let q = term.create.len();
    let affected_mask = partition.affected_mask();
    let number_mask = term.create.index() & partition.unaffected_mask();
    let string_mask = partition
        .unaffected()
        .iter()
        .filter(|&&p| partition.affected().iter().filter(|&&a| a > p).count() % 2 == 1)
        .fold(0u64, |m, &p| m | OccupationFamily::mask(q, p));

    CompiledTerm {
        measurement_families: MeasurementFamily::enumerate(partition.affected_count()),
        plus_affected_bits: term.create.index() & affected_mask,
        minus_affected_bits: term.annihilate.index() & affected_mask,
        number_mask,
        string_mask,
        term: term.clone(),
        partition,
        sign,
        dot_plus,
        dot_minus,
        vec_plus,
    }
}

/// Sign acquired by moving the canonical operator product into the form
/// `[affected creations ↑][affected annihilations ↓][c†_q c_q for numbered q]`.
/// Number pairs move as a unit and never contribute.
pub fn permutation_sign(term: &InteractionTerm, partition: &AffectedPartition) -> f64 {
    let ops = term.operators();
    let mut target: Vec<(usize, bool)> = partition
        .affected()
        .iter()
        .filter(|&&p| term.create.get(p))
        .map(|&p| (p, true))
        .collect();
    target.extend(
        partition
            .affected()
            .iter()
            .rev()
            .filter(|&&p| term.annihilate.get(p))
            .map(|&p| (p, false)),
    );
    for &p in partition.unaffected() {
        if term.create.get(p) {
            target.push((p, true));
            target.push((p, false));
        }
    }
    debug_assert_eq!(ops.len(), target.len());
    let order: Vec<usize> = target
        .iter()
        .map(|op| ops.iter().position(|o| o == op).expect("same operator multiset"))
        .collect();
    if inversions(&order, |a, b| a > b) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl CompiledTerm {
    pub fn affected_count(&self) -> usize {
        self.partition.affected_count()
    }

    fn check_family(&self, m: &MeasurementFamily) -> Result<()> {
        if m.len() != self.affected_count() {
            return Err(Error::InvalidMeasurementFamily(m.to_string()));
        }
        Ok(())
    }

    /// `V_lm = Π_{q affected} [(-1)^{n⁺_q} i]^{δ(m_q, y)}`.
    pub fn expansion_coefficient(&self, m: &MeasurementFamily) -> Result<Complex64> {
        self.check_family(m)?;
        let q = self.term.create.len();
        let mut v = Complex64::new(1.0, 0.0);
        for (&p, &axis) in self.partition.affected().iter().zip(m.axes()) {
            if axis == Axis::Y {
                let s = if self.plus_affected_bits & OccupationFamily::mask(q, p) != 0 { -1.0 } else { 1.0 };
                v *= Complex64::new(0.0, s);
            }
        }
        Ok(v)
    }

    /// σ_z eigenvalue product over the affected modes of a measured outcome.
    pub fn z_eigenvalue(&self, outcome: &OccupationFamily) -> f64 {
        parity_sign(outcome.index() & self.partition.affected_mask())
    }

    /// 1 when every number operator of the term sees an occupied mode.
    pub fn number_eigenvalue(&self, outcome: &OccupationFamily) -> f64 {
        if outcome.index() & self.number_mask == self.number_mask {
            1.0
        } else {
            0.0
        }
    }

    /// Exchange sign picked up by the affected operators passing occupied
    /// unaffected modes that lie between them in mode order.
    pub fn string_parity(&self, outcome: &OccupationFamily) -> f64 {
        parity_sign(outcome.index() & self.string_mask)
    }

    /// Per-outcome weight `υ_{l m n}` for the measurement family `m`.
    pub fn upsilon_coefficient(&self, m: &MeasurementFamily, outcome: &OccupationFamily) -> Result<Complex64> {
        if outcome.len() != self.term.create.len() {
            return Err(Error::LengthMismatch { expected: self.term.create.len(), found: outcome.len() });
        }
        let v = self.expansion_coefficient(m)?;
        let real = self.z_eigenvalue(outcome) * self.number_eigenvalue(outcome) * self.string_parity(outcome);
        if real == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.prefactor() * v * real)
    }

    /// `π_l h_l / 2^Q̇_l`.
    pub fn prefactor(&self) -> Complex64 {
        self.term.coeff * self.sign / (1u64 << self.affected_count()) as f64
    }

    /// Merge the term's affected subfamily with the unaffected part of an
    /// outcome. `plus` selects `ṅ⁺`, otherwise `ṅ⁻`.
    pub fn merged(&self, outcome: &OccupationFamily, plus: bool) -> OccupationFamily {
        let dot = if plus { self.plus_affected_bits } else { self.minus_affected_bits };
        let bits = (outcome.index() & self.partition.unaffected_mask()) | dot;
        OccupationFamily::from_index(bits, outcome.len()).expect("bits stay in range")
    }
}

fn parity_sign(bits: u64) -> f64 {
    if bits.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: &str) -> OccupationFamily {
        s.parse().unwrap()
    }

    fn hubbard() -> Hamiltonian {
        Hamiltonian::two_site_hubbard(-0.158, 1.0)
    }

    #[test]
    fn hubbard_terms_match_table() {
        let h = hubbard();
        let expected = [
            ("1000", "0010"),
            ("0010", "1000"),
            ("0100", "0001"),
            ("0001", "0100"),
            ("1100", "1100"),
            ("0011", "0011"),
        ];
        assert_eq!(h.terms.len(), 6);
        for (t, (p, m)) in h.terms.iter().zip(expected) {
            assert_eq!(t.create, fam(p));
            assert_eq!(t.annihilate, fam(m));
        }
        assert_eq!(h.terms[4].coeff, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn compile_first_hopping_term() {
        let h = hubbard();
        let ct = compile_term(&h.terms[0]);
        assert_eq!(ct.partition.affected_labels(&h.indexing), ["0u", "1u"]);
        assert_eq!(ct.partition.unaffected_labels(&h.indexing), ["0d", "1d"]);
        assert_eq!(ct.dot_plus.to_vec(), vec![1, 0]);
        assert_eq!(ct.dot_minus.to_vec(), vec![0, 1]);
        assert_eq!(ct.vec_plus.to_vec(), vec![0, 0]);
        assert_eq!(ct.sign, 1.0);
        assert_eq!(ct.measurement_families.len(), 4);
    }

    #[test]
    fn compile_hubbard_u_term() {
        let h = hubbard();
        let ct = compile_term(&h.terms[4]);
        assert!(ct.partition.affected().is_empty());
        assert_eq!(ct.vec_plus.to_vec(), vec![1, 1, 0, 0]);
        assert_eq!(ct.sign, 1.0);
        assert_eq!(ct.measurement_families, vec![MeasurementFamily::default()]);
    }

    #[test]
    fn every_hubbard_sign_is_positive() {
        for ct in hubbard().compile() {
            assert_eq!(ct.sign, 1.0);
        }
    }

    #[test]
    fn partially_numbered_two_body_sign() {
        // t c†_0u c†_0d c_1u c_0d, canonical; reordering to c†_0u c_1u c†_0d c_0d is one swap
        let idx = SystemIndexing::two_site_hubbard();
        let term = InteractionTerm::new(Complex64::new(1.0, 0.0), fam("1100"), fam("0110")).unwrap();
        let ct = compile_term(&term);
        assert_eq!(ct.partition.affected_labels(&idx), ["0u", "1u"]);
        assert_eq!(ct.sign, -1.0);
    }

    #[test]
    fn operator_string_is_canonicalized() {
        let idx = SystemIndexing::two_site_hubbard();
        let one = Complex64::new(1.0, 0.0);
        let canon = InteractionTerm::from_operators(&idx, one, &["0u", "0d"], &["0d", "0u"]).unwrap();
        assert_eq!(canon.coeff, one);
        let swapped = InteractionTerm::from_operators(&idx, one, &["0u", "0d"], &["0u", "0d"]).unwrap();
        assert_eq!(swapped.coeff, -one);
        let swapped = InteractionTerm::from_operators(&idx, one, &["0d", "0u"], &["0u", "0d"]).unwrap();
        assert_eq!(swapped.coeff, one);
        assert!(InteractionTerm::from_operators(&idx, one, &["0u", "0u"], &["1u", "1d"]).is_err());
        assert!(InteractionTerm::from_operators(&idx, one, &["2u"], &["0u"]).is_err());
    }

    #[test]
    fn expansion_coefficients_match_table() {
        let h = hubbard();
        let ct = h.compile();
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let v = |l: usize, m: &str| ct[l].expansion_coefficient(&MeasurementFamily::parse(m).unwrap()).unwrap();
        for l in [0, 2] {
            assert_eq!(v(l, "xx"), one);
            assert_eq!(v(l, "xy"), i);
            assert_eq!(v(l, "yx"), -i);
            assert_eq!(v(l, "yy"), one);
        }
        for l in [1, 3] {
            assert_eq!(v(l, "xx"), one);
            assert_eq!(v(l, "xy"), -i);
            assert_eq!(v(l, "yx"), i);
            assert_eq!(v(l, "yy"), one);
        }
        for l in [4, 5] {
            assert_eq!(v(l, ""), one);
        }
    }

    #[test]
    fn upsilon_examples() {
        let t = -0.158;
        let h = hubbard();
        let ct = h.compile();
        let yy = MeasurementFamily::parse("yy").unwrap();
        let u = ct[0].upsilon_coefficient(&yy, &fam("0000")).unwrap();
        assert!((u - Complex64::new(t / 4.0, 0.0)).norm() < 1e-15);

        let empty = MeasurementFamily::default();
        assert_eq!(ct[4].upsilon_coefficient(&empty, &fam("1100")).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(ct[4].upsilon_coefficient(&empty, &fam("0100")).unwrap(), Complex64::new(0.0, 0.0));

        assert!(matches!(
            ct[0].upsilon_coefficient(&empty, &fam("0000")),
            Err(Error::InvalidMeasurementFamily(_))
        ));
    }

    #[test]
    fn upsilon_factorizes() {
        let h = hubbard();
        for ct in h.compile() {
            for m in &ct.measurement_families {
                for i in 0..16 {
                    let n = OccupationFamily::from_index(i, 4).unwrap();
                    let full = ct.upsilon_coefficient(m, &n).unwrap();
                    let parts = ct.prefactor()
                        * ct.z_eigenvalue(&n)
                        * ct.expansion_coefficient(m).unwrap()
                        * ct.number_eigenvalue(&n)
                        * ct.string_parity(&n);
                    assert_eq!(full, parts);
                }
            }
        }
    }

    #[test]
    fn hopping_across_a_mode_carries_a_string() {
        let h = hubbard();
        let ct = h.compile();
        // 0d sits between 0u and 1u
        assert_eq!(ct[0].string_mask, OccupationFamily::mask(4, 1));
        // 1u sits between 0d and 1d
        assert_eq!(ct[2].string_mask, OccupationFamily::mask(4, 2));
        assert_eq!(ct[4].string_mask, 0);
    }

    #[test]
    fn hermiticity_checks() {
        assert!(hubbard().validate_hermitian());
        let idx = SystemIndexing::two_site_hubbard();
        let t = Complex64::new(-0.158, 0.0);
        let single = Hamiltonian::with_terms(
            idx.clone(),
            vec![InteractionTerm::from_operators(&idx, t, &["0u"], &["1u"]).unwrap()],
        )
        .unwrap();
        assert!(!single.validate_hermitian());
        let number = Hamiltonian::with_terms(
            idx.clone(),
            vec![InteractionTerm::from_operators(&idx, Complex64::new(1.0, 0.0), &["0u", "0d"], &["0d", "0u"]).unwrap()],
        )
        .unwrap();
        assert!(number.validate_hermitian());
        let complex_diag = Hamiltonian::with_terms(
            idx.clone(),
            vec![InteractionTerm::new(Complex64::new(1.0, 0.5), fam("1000"), fam("1000")).unwrap()],
        )
        .unwrap();
        assert!(!complex_diag.validate_hermitian());
    }

    #[test]
    fn compile_is_deterministic() {
        let h = hubbard();
        let a = h.compile();
        let b = h.compile();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.partition, y.partition);
            assert_eq!(x.sign, y.sign);
            assert_eq!(x.measurement_families, y.measurement_families);
            assert_eq!(x.string_mask, y.string_mask);
        }
    }

    #[test]
    fn measurement_family_order() {
        let all: Vec<String> = MeasurementFamily::enumerate(2).iter().map(|m| m.to_string()).collect();
        assert_eq!(all, ["xx", "xy", "yx", "yy"]);
        assert_eq!(MeasurementFamily::enumerate(0).len(), 1);
    }
}
