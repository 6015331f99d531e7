//! Diagonal phase ansätze `λ_n(θ)`: each Fock state picks up the factor
//! `e^{iλ_n(θ)}` on top of the prepared state. Imaginary parts rescale
//! amplitudes, real parts rotate phases, and excluded states are removed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{OccupationFamily, SystemIndexing};

/// Distance kept from open domain boundaries when projecting.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

/// `λ_n(θ)` for one family, or the `λ → i∞` limit that removes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaValue {
    Excluded,
    Value(Complex64),
}

impl LambdaValue {
    pub fn value(self) -> Option<Complex64> {
        match self {
            LambdaValue::Excluded => None,
            LambdaValue::Value(v) => Some(v),
        }
    }

    /// `e^{iλ}`, zero when excluded.
    pub fn amplitude_factor(self) -> Complex64 {
        match self {
            LambdaValue::Excluded => Complex64::new(0.0, 0.0),
            LambdaValue::Value(l) => (Complex64::i() * l).exp(),
        }
    }

    /// `|e^{iλ}|² = e^{-2 Im λ}`, zero when excluded.
    pub fn weight(self) -> f64 {
        match self {
            LambdaValue::Excluded => 0.0,
            LambdaValue::Value(l) => (-2.0 * l.im).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    Unbounded,
    /// The open interval `(lo, hi)`.
    Open { lo: f64, hi: f64 },
    /// Angle-like coordinate identified modulo `hi − lo`, represented in `(lo, hi]`.
    Periodic { lo: f64, hi: f64 },
}

impl Bound {
    fn contains(self, x: f64) -> bool {
        match self {
            Bound::Unbounded | Bound::Periodic { .. } => x.is_finite(),
            Bound::Open { lo, hi } => x > lo && x < hi,
        }
    }

    /// Map into the domain. The flag is set when an open bound had to clip.
    fn project(self, x: f64) -> (f64, bool) {
        match self {
            Bound::Unbounded => (x, false),
            Bound::Open { lo, hi } => {
                let (a, b) = (lo + BOUNDARY_MARGIN, hi - BOUNDARY_MARGIN);
                if x < a {
                    (a, true)
                } else if x > b {
                    (b, true)
                } else {
                    (x, false)
                }
            }
            Bound::Periodic { lo, hi } => {
                let period = hi - lo;
                let mut y = lo + (x - lo).rem_euclid(period);
                if y == lo {
                    y = hi;
                }
                (y, false)
            }
        }
    }
}

/// Per-coordinate description of the parameter space `Θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterDomain {
    pub bounds: Vec<Bound>,
}

impl ParameterDomain {
    pub fn unbounded(dim: usize) -> Self {
        Self { bounds: vec![Bound::Unbounded; dim] }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim() && self.bounds.iter().zip(theta).all(|(b, &x)| b.contains(x))
    }

    pub fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), found: theta.len() });
        }
        if let Some((j, x)) = theta
            .iter()
            .enumerate()
            .find(|&(j, &x)| !self.bounds[j].contains(x))
        {
            return Err(Error::OutOfDomain(format!("coordinate {j} = {x}")));
        }
        Ok(())
    }

    /// Nearest point of the domain, plus whether any coordinate was clipped.
    pub fn project(&self, theta: &[f64]) -> (Vec<f64>, bool) {
        let mut clipped = false;
        let out = self
            .bounds
            .iter()
            .zip(theta)
            .map(|(b, &x)| {
                let (y, c) = b.project(x);
                clipped |= c;
                y
            })
            .collect();
        (out, clipped)
    }
}

/// A user-chosen set of phase equations with analytic derivatives.
///
/// Implementations must be deterministic; the gradient is never requested
/// for excluded families.
pub trait Ansatz: Send + Sync {
    fn name(&self) -> &str;

    /// Number of parameters `d`.
    fn dim(&self) -> usize;

    /// Number of modes the ansatz is defined on.
    fn modes(&self) -> usize;

    fn domain(&self) -> ParameterDomain {
        ParameterDomain::unbounded(self.dim())
    }

    fn lambda(&self, theta: &[f64], n: &OccupationFamily) -> Result<LambdaValue>;

    /// `∂λ_n/∂θ_j` for every `j`.
    fn gradient(&self, theta: &[f64], n: &OccupationFamily) -> Result<Vec<Complex64>>;
}

impl fmt::Debug for dyn Ansatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ansatz({}, d={})", self.name(), self.dim())
    }
}

fn check_family(modes: usize, n: &OccupationFamily) -> Result<()> {
    if n.len() != modes {
        return Err(Error::LengthMismatch { expected: modes, found: n.len() });
    }
    Ok(())
}

/// `e^{-iλ*(n⁺)} · e^{iλ(n⁻)}`, zero when either family is excluded.
pub fn evaluate_phase_pair(
    ansatz: &dyn Ansatz,
    theta: &[f64],
    n_plus: &OccupationFamily,
    n_minus: &OccupationFamily,
) -> Result<Complex64> {
    let (LambdaValue::Value(lp), LambdaValue::Value(lm)) =
        (ansatz.lambda(theta, n_plus)?, ansatz.lambda(theta, n_minus)?)
    else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    Ok((-Complex64::i() * lp.conj() + Complex64::i() * lm).exp())
}

/// Two-body correlator `λ_n = i Σ θ_{qq'} n_q n_q'` with one parameter per
/// listed mode pair. A pair `(q, q)` weights single occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct JastrowGutzwiller {
    modes: usize,
    pairs: Vec<(usize, usize)>,
    masks: Vec<u64>,
}

impl JastrowGutzwiller {
    pub fn new(modes: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let (a, b) = (a.min(b), a.max(b));
            if b >= modes {
                return Err(Error::IndexOutOfRange { index: b as u64, qubits: modes });
            }
            if !seen.insert((a, b)) {
                return Err(Error::InvalidConfig(format!("mode pair ({a}, {b}) listed twice")));
            }
            normalized.push((a, b));
        }
        let masks = normalized
            .iter()
            .map(|&(a, b)| OccupationFamily::mask(modes, a) | OccupationFamily::mask(modes, b))
            .collect();
        Ok(Self { modes, pairs: normalized, masks })
    }

    /// Every pair `q ≤ q'`, in row-major order.
    pub fn all_pairs(modes: usize) -> Result<Self> {
        let pairs = (0..modes).flat_map(|a| (a..modes).map(move |b| (a, b))).collect();
        Self::new(modes, pairs)
    }

    /// Pairs given by mode labels.
    pub fn from_labels<S: AsRef<str>>(indexing: &SystemIndexing, pairs: &[(S, S)]) -> Result<Self> {
        let pairs = pairs
            .iter()
            .map(|(a, b)| Ok((indexing.position(a.as_ref())?, indexing.position(b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(indexing.len(), pairs)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn active(&self, n: &OccupationFamily) -> impl Iterator<Item = bool> + '_ {
        let bits = n.index();
        self.masks.iter().map(move |&m| bits & m == m)
    }
}

impl Ansatz for JastrowGutzwiller {
    fn name(&self) -> &str {
        "jastrow_gutzwiller"
    }

    fn dim(&self) -> usize {
        self.pairs.len()
    }

    fn modes(&self) -> usize {
        self.modes
    }

    fn lambda(&self, theta: &[f64], n: &OccupationFamily) -> Result<LambdaValue> {
        check_family(self.modes, n)?;
        self.domain().check(theta)?;
        let im: f64 = self.active(n).zip(theta).filter(|(on, _)| *on).map(|(_, t)| t).sum();
        Ok(LambdaValue::Value(Complex64::new(0.0, im)))
    }

    fn gradient(&self, theta: &[f64], n: &OccupationFamily) -> Result<Vec<Complex64>> {
        check_family(self.modes, n)?;
        self.domain().check(theta)?;
        Ok(self
            .active(n)
            .map(|on| Complex64::new(0.0, if on { 1.0 } else { 0.0 }))
            .collect())
    }
}

/// Two-parameter ansatz for the half-filled two-site Hubbard model on modes
/// `(0u, 0d, 1u, 1d)`. Only the four zero-spin two-fermion states survive.
///
/// With `θ = (polar, azimuth)` and
/// `λ = azimuth/2 − (i/2)·ln tan(π/4 + polar/2)`, the families take
/// `λ_{1001} = λ`, `λ_{0110} = λ + π`, `λ_{0011} = λ_{1100} = −λ`. The extra
/// `π` on `0110` accounts for the exchange sign of the spin-down operator
/// passing the occupied `0u` mode, so the ansatz state spans the spin singlet.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochSinglet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlochBranch {
    Plus,
    PlusShifted,
    Minus,
}

impl BlochSinglet {
    pub fn two_site_hubbard() -> Self {
        Self
    }

    fn branch(n: &OccupationFamily) -> Option<BlochBranch> {
        match n.index() {
            0b1001 => Some(BlochBranch::Plus),
            0b0110 => Some(BlochBranch::PlusShifted),
            0b0011 | 0b1100 => Some(BlochBranch::Minus),
            _ => None,
        }
    }

    /// The shared `λ(polar, azimuth)`.
    pub fn base_lambda(polar: f64, azimuth: f64) -> Complex64 {
        Complex64::new(azimuth / 2.0, -0.5 * (FRAC_PI_4 + polar / 2.0).tan().ln())
    }
}

impl Ansatz for BlochSinglet {
    fn name(&self) -> &str {
        "bloch_singlet_hubbard"
    }

    fn dim(&self) -> usize {
        2
    }

    fn modes(&self) -> usize {
        4
    }

    fn domain(&self) -> ParameterDomain {
        ParameterDomain {
            bounds: vec![Bound::Open { lo: -FRAC_PI_2, hi: FRAC_PI_2 }, Bound::Periodic { lo: -PI, hi: PI }],
        }
    }

    fn lambda(&self, theta: &[f64], n: &OccupationFamily) -> Result<LambdaValue> {
        check_family(4, n)?;
        self.domain().check(theta)?;
        let l = Self::base_lambda(theta[0], theta[1]);
        Ok(match Self::branch(n) {
            None => LambdaValue::Excluded,
            Some(BlochBranch::Plus) => LambdaValue::Value(l),
            Some(BlochBranch::PlusShifted) => LambdaValue::Value(l + PI),
            Some(BlochBranch::Minus) => LambdaValue::Value(-l),
        })
    }

    fn gradient(&self, theta: &[f64], n: &OccupationFamily) -> Result<Vec<Complex64>> {
        check_family(4, n)?;
        self.domain().check(theta)?;
        let d_polar = Complex64::new(0.0, -0.5 / theta[0].cos());
        let d_azimuth = Complex64::new(0.5, 0.0);
        match Self::branch(n) {
            None => Err(Error::InvalidConfig(format!("gradient requested for excluded family {n}"))),
            Some(BlochBranch::Minus) => Ok(vec![-d_polar, -d_azimuth]),
            Some(_) => Ok(vec![d_polar, d_azimuth]),
        }
    }
}

type LambdaFn = dyn Fn(&[f64], &OccupationFamily) -> Result<LambdaValue> + Send + Sync;
type GradientFn = dyn Fn(&[f64], &OccupationFamily) -> Result<Vec<Complex64>> + Send + Sync;

/// An ansatz assembled from closures, for registering custom phase equations.
#[derive(Clone)]
pub struct FnAnsatz {
    name: String,
    modes: usize,
    domain: ParameterDomain,
    lambda: Arc<LambdaFn>,
    gradient: Arc<GradientFn>,
}

impl FnAnsatz {
    pub fn new<L, G>(name: impl Into<String>, modes: usize, domain: ParameterDomain, lambda: L, gradient: G) -> Self
    where
        L: Fn(&[f64], &OccupationFamily) -> Result<LambdaValue> + Send + Sync + 'static,
        G: Fn(&[f64], &OccupationFamily) -> Result<Vec<Complex64>> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            modes,
            domain,
            lambda: Arc::new(lambda),
            gradient: Arc::new(gradient),
        }
    }
}

impl fmt::Debug for FnAnsatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnAnsatz")
            .field("name", &self.name)
            .field("modes", &self.modes)
            .field("dim", &self.domain.dim())
            .finish()
    }
}

impl Ansatz for FnAnsatz {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn modes(&self) -> usize {
        self.modes
    }

    fn domain(&self) -> ParameterDomain {
        self.domain.clone()
    }

    fn lambda(&self, theta: &[f64], n: &OccupationFamily) -> Result<LambdaValue> {
        check_family(self.modes, n)?;
        self.domain.check(theta)?;
        (self.lambda)(theta, n)
    }

    fn gradient(&self, theta: &[f64], n: &OccupationFamily) -> Result<Vec<Complex64>> {
        check_family(self.modes, n)?;
        self.domain.check(theta)?;
        let g = (self.gradient)(theta, n)?;
        if g.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), found: g.len() });
        }
        Ok(g)
    }
}

/// Ansatz selection as written in a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AnsatzConfig {
    BlochSingletHubbard,
    JastrowGutzwiller {
        /// Mode-label pairs, one parameter each. Every pair `q ≤ q'` when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pairs: Option<Vec<(String, String)>>,
    },
}

impl AnsatzConfig {
    pub fn build(&self, indexing: &SystemIndexing) -> Result<Box<dyn Ansatz>> {
        match self {
            AnsatzConfig::BlochSingletHubbard => {
                if indexing.labels() != SystemIndexing::two_site_hubbard().labels() {
                    return Err(Error::InvalidConfig(
                        "bloch_singlet_hubbard needs the modes 0u, 0d, 1u, 1d".into(),
                    ));
                }
                Ok(Box::new(BlochSinglet::two_site_hubbard()))
            }
            AnsatzConfig::JastrowGutzwiller { pairs: None } => Ok(Box::new(JastrowGutzwiller::all_pairs(indexing.len())?)),
            AnsatzConfig::JastrowGutzwiller { pairs: Some(p) } => {
                Ok(Box::new(JastrowGutzwiller::from_labels(indexing, p)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fam(s: &str) -> OccupationFamily {
        s.parse().unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn jastrow_examples() {
        let idx = SystemIndexing::two_site_hubbard();
        let jg = JastrowGutzwiller::from_labels(&idx, &[("0u", "0d"), ("1u", "1d")]).unwrap();
        let l = jg.lambda(&[0.3, 0.0], &fam("1100")).unwrap();
        assert_eq!(l, LambdaValue::Value(Complex64::new(0.0, 0.3)));
        assert!((l.amplitude_factor() - Complex64::new((-0.3f64).exp(), 0.0)).norm() < 1e-15);
        assert_eq!(jg.lambda(&[0.7, -1.1], &fam("0000")).unwrap(), LambdaValue::Value(Complex64::new(0.0, 0.0)));
        let g = jg.gradient(&[0.3, 0.0], &fam("1100")).unwrap();
        assert_eq!(g, vec![Complex64::i(), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn jastrow_layouts() {
        assert_eq!(JastrowGutzwiller::all_pairs(3).unwrap().dim(), 6);
        assert!(JastrowGutzwiller::new(3, vec![(0, 1), (1, 0)]).is_err());
        assert!(JastrowGutzwiller::new(3, vec![(0, 3)]).is_err());
    }

    #[test]
    fn bloch_examples() {
        let b = BlochSinglet::two_site_hubbard();
        let origin = b.lambda(&[0.0, 0.0], &fam("1001")).unwrap().value().unwrap();
        assert!(close(origin, Complex64::new(0.0, 0.0), 1e-15));
        assert_eq!(b.lambda(&[0.3, 0.2], &fam("1010")).unwrap(), LambdaValue::Excluded);
        let expected = Complex64::new(0.0, -0.5 * (5.0 * PI / 12.0).tan().ln());
        let l = b.lambda(&[PI / 3.0, 0.0], &fam("1001")).unwrap().value().unwrap();
        assert!(close(l, expected, 1e-15));
        assert!(b.lambda(&[FRAC_PI_2, 0.0], &fam("1001")).is_err());
        assert!(b.lambda(&[-FRAC_PI_2, 0.0], &fam("1001")).is_err());
    }

    #[test]
    fn bloch_gauge() {
        let b = BlochSinglet::two_site_hubbard();
        let theta = [0.4, -1.3];
        let l = BlochSinglet::base_lambda(0.4, -1.3);
        let v = |s: &str| b.lambda(&theta, &fam(s)).unwrap().value().unwrap();
        assert!(close(v("1001"), l, 0.0));
        assert!(close(v("0110"), l + PI, 0.0));
        assert!(close(v("0011"), -l, 0.0));
        assert!(close(v("1100"), -l, 0.0));
        let excluded = (0..16u64)
            .filter(|&i| b.lambda(&theta, &OccupationFamily::from_index(i, 4).unwrap()).unwrap() == LambdaValue::Excluded)
            .count();
        assert_eq!(excluded, 12);
    }

    #[test]
    fn phase_pairs() {
        let b = BlochSinglet::two_site_hubbard();
        let phi0 = 0.77;
        let p = evaluate_phase_pair(&b, &[0.0, phi0], &fam("1001"), &fam("0011")).unwrap();
        assert!(close(p, Complex64::from_polar(1.0, -phi0), 1e-15));
        let p = evaluate_phase_pair(&b, &[0.1, phi0], &fam("1010"), &fam("0011")).unwrap();
        assert_eq!(p, Complex64::new(0.0, 0.0));
        let jg = JastrowGutzwiller::all_pairs(2).unwrap();
        let p = evaluate_phase_pair(&jg, &[0.0; 3], &fam("11"), &fam("10")).unwrap();
        assert!(close(p, Complex64::new(1.0, 0.0), 0.0));
    }

    #[test]
    fn domain_projection() {
        let d = BlochSinglet.domain();
        let (p, clipped) = d.project(&[2.0, 3.0 * PI]);
        assert!(clipped);
        assert_eq!(p[0], FRAC_PI_2 - BOUNDARY_MARGIN);
        assert!((p[1] - PI).abs() < 1e-12);
        let (p, clipped) = d.project(&[0.1, -PI]);
        assert!(!clipped);
        assert_eq!(p, vec![0.1, PI]);
        assert!(d.contains(&p));
    }

    /// Central finite differences of `λ_n` against the analytic gradient.
    fn fd_check(a: &dyn Ansatz, theta: &[f64], n: &OccupationFamily) {
        let g = a.gradient(theta, n).unwrap();
        let h = 1e-6;
        for j in 0..a.dim() {
            let mut tp = theta.to_vec();
            let mut tm = theta.to_vec();
            tp[j] += h;
            tm[j] -= h;
            let lp = a.lambda(&tp, n).unwrap().value().unwrap();
            let lm = a.lambda(&tm, n).unwrap().value().unwrap();
            let fd = (lp - lm) / (2.0 * h);
            let err = (fd - g[j]).norm();
            if g[j].norm() == 0.0 {
                assert!(err <= 1e-12, "{n} θ={theta:?} j={j}");
            } else {
                assert!(err / g[j].norm() <= 1e-6, "{n} θ={theta:?} j={j}: {fd} vs {}", g[j]);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = BlochSinglet;
        let included = ["1001", "0110", "0011", "1100"];
        for _ in 0..100 {
            let theta = [rng.random_range(-1.4..1.4), rng.random_range(-3.0..3.0)];
            fd_check(&b, &theta, &fam(included[rng.random_range(0..4)]));
        }
        let jg = JastrowGutzwiller::all_pairs(5).unwrap();
        for _ in 0..100 {
            let theta: Vec<f64> = (0..jg.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n = OccupationFamily::from_index(rng.random_range(0..32), 5).unwrap();
            fd_check(&jg, &theta, &n);
        }
    }

    #[test]
    fn registry() {
        let idx = SystemIndexing::two_site_hubbard();
        let cfg: AnsatzConfig = serde_json::from_str(r#"{"name":"bloch_singlet_hubbard"}"#).unwrap();
        assert_eq!(cfg.build(&idx).unwrap().dim(), 2);
        let cfg: AnsatzConfig =
            serde_json::from_str(r#"{"name":"jastrow_gutzwiller","pairs":[["0u","0d"],["1u","1d"]]}"#).unwrap();
        assert_eq!(cfg.build(&idx).unwrap().dim(), 2);
        let cfg: AnsatzConfig = serde_json::from_str(r#"{"name":"jastrow_gutzwiller"}"#).unwrap();
        assert_eq!(cfg.build(&idx).unwrap().dim(), 10);
        assert!(AnsatzConfig::BlochSingletHubbard.build(&SystemIndexing::numbered(4).unwrap()).is_err());
    }

    #[test]
    fn closure_ansatz() {
        let a = FnAnsatz::new(
            "single_weight",
            2,
            ParameterDomain::unbounded(1),
            |t, n| Ok(LambdaValue::Value(Complex64::new(0.0, t[0] * f64::from(n.occupation())))),
            |_, n| Ok(vec![Complex64::new(0.0, f64::from(n.occupation()))]),
        );
        fd_check(&a, &[0.4], &fam("11"));
        assert!(a.lambda(&[0.4], &fam("111")).is_err());
        assert!(a.lambda(&[0.4, 1.0], &fam("11")).is_err());
    }

    proptest! {
        #[test]
        fn jastrow_lambda_is_imaginary(theta in prop::collection::vec(-2.0f64..2.0, 10), idx in 0u64..16) {
            let jg = JastrowGutzwiller::all_pairs(4).unwrap();
            let n = OccupationFamily::from_index(idx, 4).unwrap();
            let l = jg.lambda(&theta, &n).unwrap().value().unwrap();
            prop_assert_eq!(l.re, 0.0);
        }

        #[test]
        fn projection_lands_in_domain(a in -10.0f64..10.0, b in -50.0f64..50.0) {
            let d = BlochSinglet.domain();
            let (p, _) = d.project(&[a, b]);
            prop_assert!(d.contains(&p));
            prop_assert!(p[1] > -PI && p[1] <= PI);
        }
    }
}
