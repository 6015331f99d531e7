//! On-disk forms: Hamiltonians as JSON lines and sample archives as JSON.
//!
//! A Hamiltonian file starts with a header naming the modes in order,
//! followed by one record per term:
//!
//! ```text
//! {"modes": ["0u", "0d", "1u", "1d"]}
//! {"coeff": -0.158, "create": ["0u"], "annihilate": ["1u"]}
//! {"coeff": [1.0, 0.0], "create": ["0u", "0d"], "annihilate": ["0d", "0u"]}
//! ```
//!
//! Operators within each group may appear in any order; the term is brought
//! to canonical order with the sign folded into its coefficient. Blank lines
//! are skipped.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::SampleArchive;
use crate::fock::SystemIndexing;
use crate::hamiltonian::{Hamiltonian, InteractionTerm};

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Header {
    modes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    coeff: Coefficient,
    create: Vec<String>,
    annihilate: Vec<String>,
}

pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let parse_err = |line: usize, e: &dyn std::fmt::Display| Error::Parse { line, message: e.to_string() };

    let (line, first) = lines.next().ok_or(Error::Parse { line: 1, message: "empty Hamiltonian file".into() })?;
    let header: Header = serde_json::from_str(first).map_err(|e| parse_err(line, &e))?;
    let indexing = SystemIndexing::new(header.modes).map_err(|e| parse_err(line, &e))?;
    let mut h = Hamiltonian::new(indexing);
    for (line, text) in lines {
        let rec: TermRecord = serde_json::from_str(text).map_err(|e| parse_err(line, &e))?;
        let coeff = match rec.coeff {
            Coefficient::Real(re) => Complex64::new(re, 0.0),
            Coefficient::Complex([re, im]) => Complex64::new(re, im),
        };
        if !(coeff.re.is_finite() && coeff.im.is_finite()) {
            return Err(parse_err(line, &"coefficient is not finite"));
        }
        let term = InteractionTerm::from_operators(&h.indexing, coeff, &rec.create, &rec.annihilate)
            .map_err(|e| parse_err(line, &e))?;
        h.push(term)?;
    }
    Ok(h)
}

pub fn read_hamiltonian(path: &Path) -> Result<Hamiltonian> {
    parse_hamiltonian(&fs::read_to_string(path)?)
}

/// Inverse of [`parse_hamiltonian`], with terms written in canonical order.
pub fn format_hamiltonian(h: &Hamiltonian) -> String {
    let mut out = serde_json::to_string(&Header { modes: h.indexing.labels().to_vec() }).expect("header serializes");
    out.push('\n');
    for t in &h.terms {
        let labels = |creation: bool| -> Vec<String> {
            t.operators()
                .into_iter()
                .filter(|&(_, c)| c == creation)
                .map(|(p, _)| h.indexing.label(p).to_string())
                .collect()
        };
        let coeff = if t.coeff.im == 0.0 {
            Coefficient::Real(t.coeff.re)
        } else {
            Coefficient::Complex([t.coeff.re, t.coeff.im])
        };
        let rec = TermRecord { coeff, create: labels(true), annihilate: labels(false) };
        out.push_str(&serde_json::to_string(&rec).expect("term serializes"));
        out.push('\n');
    }
    out
}

pub fn write_hamiltonian(path: &Path, h: &Hamiltonian) -> Result<()> {
    fs::write(path, format_hamiltonian(h))?;
    Ok(())
}

pub fn read_archive(path: &Path) -> Result<SampleArchive> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_archive(path: &Path, archive: &SampleArchive) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(archive)?)?;
    Ok(())
}
