//! Checked-in molecular integrals and their reference energies.
//!
//! The files were generated once with an electronic-structure package
//! (`scripts/generate_fixtures.py`) and are treated as immutable inputs.

use qchem_core::fermion::{MolecularIntegrals, SpinOrdering};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fcidump::{parse_fcidump, parse_rdm1};

/// A named fixture: FCIDUMP text plus an optional spin-summed 1-RDM.
#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub fcidump: &'static str,
    pub rdm1: Option<&'static str>,
    /// Bond length in Angstrom.
    pub bond: f64,
}

macro_rules! fixture {
    ($name:literal, $bond:expr) => {
        Fixture {
            name: $name,
            fcidump: include_str!(concat!("../fixtures/", $name, ".fcidump")),
            rdm1: None,
            bond: $bond,
        }
    };
    ($name:literal, $bond:expr, rdm) => {
        Fixture {
            name: $name,
            fcidump: include_str!(concat!("../fixtures/", $name, ".fcidump")),
            rdm1: Some(include_str!(concat!("../fixtures/", $name, ".rdm1"))),
            bond: $bond,
        }
    };
}

pub const FIXTURES: &[Fixture] = &[
    fixture!("h2_sto3g_0.5000", 0.5),
    fixture!("h2_sto3g_0.6000", 0.6),
    fixture!("h2_sto3g_0.7414", 0.7414),
    fixture!("h2_sto3g_0.7500", 0.75),
    fixture!("h2_sto3g_0.9000", 0.9),
    fixture!("h2_sto3g_1.2000", 1.2),
    fixture!("h2_sto3g_1.6000", 1.6),
    fixture!("h2_sto3g_2.2000", 2.2),
    fixture!("h2_631g_0.7414", 0.7414),
    fixture!("h2_ccpvdz_0.7500", 0.75, rdm),
    fixture!("lih_sto3g_1.4500", 1.45, rdm),
];

/// Energies computed alongside the integrals, in Hartree.
#[derive(Clone, Debug, Deserialize, PartialEq)]
pub struct Reference {
    pub name: String,
    pub basis: String,
    pub e_hf: f64,
    pub e_fci: f64,
}

const REFERENCE_JSON: &str = include_str!("../fixtures/reference.json");

pub fn fixture(name: &str) -> Result<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name).ok_or_else(|| {
        let known: Vec<&str> = FIXTURES.iter().map(|f| f.name).collect();
        Error::Config(format!("unknown fixture `{name}`; known: {}", known.join(", ")))
    })
}

/// Fixtures whose name starts with `prefix`, in bond-length order.
pub fn series(prefix: &str) -> Vec<&'static Fixture> {
    let mut out: Vec<&Fixture> = FIXTURES.iter().filter(|f| f.name.starts_with(prefix)).collect();
    out.sort_by(|a, b| a.bond.total_cmp(&b.bond));
    out
}

pub fn reference(name: &str) -> Result<Reference> {
    let all: Vec<Reference> = serde_json::from_str(REFERENCE_JSON)?;
    all.into_iter().find(|r| r.name == name).ok_or_else(|| Error::Config(format!("no reference for `{name}`")))
}

impl Fixture {
    pub fn integrals(&self, ordering: SpinOrdering) -> Result<MolecularIntegrals> {
        parse_fcidump(self.fcidump, ordering)
    }

    pub fn density(&self) -> Result<Option<(usize, Vec<f64>)>> {
        self.rdm1.map(parse_rdm1).transpose()
    }
}
