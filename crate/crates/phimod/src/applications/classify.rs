//! Residue tables from coefficient extraction, and oracle comparison.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::oracles::SequenceOracle;
use crate::error::{Error, Result};
use crate::hseries::HCombo;
use crate::modarith::Context;
use crate::phipoly::PhiPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSource {
    Extraction,
    Oracle,
}

/// Residues r[n] for n = 0..=N.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueTable {
    pub modulus: u64,
    pub source: TableSource,
    pub residues: Vec<u64>,
}

impl ResidueTable {
    pub fn from_oracle(terms: &[BigInt], modulus: u64) -> Self {
        let m = BigInt::from(modulus);
        let residues = terms
            .iter()
            .map(|t| {
                let r = ((t % &m) + &m) % &m;
                u64::try_from(&r).expect("residue fits")
            })
            .collect();
        ResidueTable { modulus, source: TableSource::Oracle, residues }
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        self.residues.get(n as usize).copied()
    }

    /// Every n with the given residue, ascending.
    pub fn positions(&self, residue: u64) -> Vec<u64> {
        let r = residue % self.modulus;
        self.residues.iter().enumerate().filter(|(_, &x)| x == r).map(|(n, _)| n as u64).collect()
    }

    /// "n,residue" rows, optionally restricted to one residue.
    pub fn to_csv(&self, residue: Option<u64>) -> String {
        let mut s = String::from("n,residue\n");
        for (n, r) in self.residues.iter().enumerate() {
            if residue.is_none_or(|want| want % self.modulus == *r) {
                s.push_str(&format!("{n},{r}\n"));
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn check_modulus(have: u64, want: u64) -> Result<()> {
    if want == 0 || have % want != 0 {
        return Err(Error::BadInput(format!("modulus {want} does not divide the solution modulus {have}")));
    }
    Ok(())
}

/// Extract the coefficient of z^n for every n ≤ n_max, reduced mod `modulus`.
pub fn classify(solution: &PhiPoly, n_max: u64, modulus: u64) -> Result<ResidueTable> {
    let combo = reduced(solution, modulus)?.to_hcombo();
    classify_combo(&combo, n_max, modulus)
}

/// The solution read modulo `modulus` (a power of p once checked); the
/// H-expansion shrinks sharply with the precision.
fn reduced(solution: &PhiPoly, modulus: u64) -> Result<PhiPoly> {
    let c = *solution.ctx();
    check_modulus(c.modulus(), modulus)?;
    let gamma = (1..=c.gamma).find(|&g| c.p.pow(g) == modulus);
    match gamma {
        Some(g) if g < c.gamma => Ok(solution.with_ctx(Context::with_step(c.p, g, c.scale_d, c.step_h)?)),
        _ => Ok(solution.clone()),
    }
}

pub fn classify_combo(combo: &HCombo, n_max: u64, modulus: u64) -> Result<ResidueTable> {
    check_modulus(combo.ctx().modulus(), modulus)?;
    let residues = (0..=n_max)
        .into_par_iter()
        .map(|n| combo.coeff_at_z(&BigInt::from(n)).map(|r| r.value % modulus))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidueTable { modulus, source: TableSource::Extraction, residues })
}

/// Residues at selected indices only (pattern spot tests).
pub fn classify_at(solution: &PhiPoly, ns: &[u64], modulus: u64) -> Result<Vec<(u64, u64)>> {
    let combo = reduced(solution, modulus)?.to_hcombo();
    check_modulus(combo.ctx().modulus(), modulus)?;
    ns.par_iter().map(|&n| combo.coeff_at_z(&BigInt::from(n)).map(|r| (n, r.value % modulus))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: u64,
    pub got: u64,
    pub expected: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    pub oracle: String,
    pub modulus: u64,
    pub checked: u64,
    pub first_mismatch: Option<Mismatch>,
}

impl OracleCheck {
    pub fn is_ok(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Compare extracted coefficients with the oracle for oracle.start ≤ n ≤ n_max.
pub fn verify_against_oracle(
    solution: &PhiPoly,
    oracle: &SequenceOracle,
    n_max: u64,
    modulus: u64,
) -> Result<OracleCheck> {
    let table = classify(solution, n_max, modulus)?;
    let want = ResidueTable::from_oracle(&oracle.terms(n_max)?, modulus);
    Ok(compare_tables(&table, &want, oracle))
}

pub fn compare_tables(got: &ResidueTable, want: &ResidueTable, oracle: &SequenceOracle) -> OracleCheck {
    let first_mismatch = (oracle.start..got.residues.len() as u64)
        .find(|&n| got.residues[n as usize] != want.residues[n as usize])
        .map(|n| Mismatch { n, got: got.residues[n as usize], expected: want.residues[n as usize] });
    OracleCheck {
        oracle: oracle.name.clone(),
        modulus: got.modulus,
        checked: (got.residues.len() as u64).saturating_sub(oracle.start),
        first_mismatch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applications::{builtin, BuiltinParams};
    use crate::laurent::LaurentPoly;

    #[test]
    fn deutsch_sagan_mod_3() {
        let bi = builtin("noncrossing", BuiltinParams::default()).unwrap();
        let table = classify(&bi.base(0).unwrap(), 3u64.pow(6), 3).unwrap();
        let man = crate::applications::patterns::bundled("noncrossing_mod3").unwrap();
        assert!(man.check(&table.residues).unwrap().exhaustive_ok());
    }

    #[test]
    fn corrupted_solution_is_caught() {
        let bi = builtin("noncrossing", BuiltinParams::default()).unwrap();
        let base = bi.base(0).unwrap();
        let ok = verify_against_oracle(&base, &bi.oracle(), 200, 3).unwrap();
        assert!(ok.is_ok());
        let ctx = *base.ctx();
        let bad = base.add(&PhiPoly::constant(LaurentPoly::monomial(ctx, 17, 1), 0));
        let r = verify_against_oracle(&bad, &bi.oracle(), 200, 3).unwrap();
        assert_eq!(r.first_mismatch.map(|m| m.n), Some(17));
    }

    #[test]
    fn csv_and_modulus() {
        let t = ResidueTable { modulus: 3, source: TableSource::Oracle, residues: vec![0, 1, 1, 2] };
        assert_eq!(t.to_csv(Some(1)), "n,residue\n1,1\n2,1\n");
        assert_eq!(t.positions(2), vec![3]);
        let bi = builtin("noncrossing", BuiltinParams::default()).unwrap();
        assert!(classify(&bi.base(0).unwrap(), 5, 9).is_err());
    }
}
