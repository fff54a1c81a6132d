//! Digit-pattern families n = (Σ c_j·p^{i_j} + add)/div with chained
//! exponent constraints, and the residue manifests built from them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One family. The exponents satisfy
/// i_1 − off_1 > i_2 − off_2 > … > i_r − off_r ≥ min.
/// An empty `coeffs` list denotes the single value n = add / div.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    #[serde(default)]
    pub coeffs: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offsets: Vec<i64>,
    #[serde(default)]
    pub min: i64,
    #[serde(default)]
    pub add: i64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub div: u64,
}

fn one() -> u64 {
    1
}

fn is_one(x: &u64) -> bool {
    *x == 1
}

impl Pattern {
    pub fn constant(n: u64) -> Self {
        Pattern { coeffs: vec![], offsets: vec![], min: 0, add: n as i64, div: 1 }
    }

    /// Strictly decreasing exponents, all ≥ min.
    pub fn strict(coeffs: &[u64], min: i64) -> Self {
        Pattern { coeffs: coeffs.to_vec(), offsets: vec![], min, add: 0, div: 1 }
    }

    fn offset(&self, j: usize) -> i64 {
        self.offsets.get(j).copied().unwrap_or(0)
    }

    fn check(&self) -> Result<()> {
        if !self.offsets.is_empty() && self.offsets.len() != self.coeffs.len() {
            return Err(Error::BadInput(format!("pattern {self:?}: offsets and coeffs differ in length")));
        }
        if self.div == 0 || self.coeffs.contains(&0) {
            return Err(Error::BadInput(format!("pattern {self:?}: zero coefficient or divisor")));
        }
        Ok(())
    }

    /// Every n ≤ n_max in the family, ascending.
    pub fn generate(&self, p: u64, n_max: u64) -> Result<Vec<u64>> {
        self.check()?;
        let mut out = BTreeSet::new();
        // the raw sum may not exceed this
        let limit = (n_max as i128) * self.div as i128 - self.add as i128;
        if self.coeffs.is_empty() {
            push(&mut out, 0, self, n_max)?;
            return Ok(out.into_iter().collect());
        }
        if limit < 0 {
            return Ok(vec![]);
        }
        let r = self.coeffs.len();
        let lo = (self.min + self.offset(r - 1)).max(0);
        self.descend(p, r - 1, lo, 0, limit as u128, n_max, &mut out)?;
        Ok(out.into_iter().collect())
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        p: u64,
        j: usize,
        lo: i64,
        acc: u128,
        limit: u128,
        n_max: u64,
        out: &mut BTreeSet<u64>,
    ) -> Result<()> {
        let mut i = lo.max(0) as u32;
        loop {
            let Some(term) = (p as u128).checked_pow(i).and_then(|x| x.checked_mul(self.coeffs[j] as u128)) else {
                break;
            };
            let sum = acc + term;
            if sum > limit {
                break;
            }
            if j == 0 {
                push(out, sum, self, n_max)?;
            } else {
                // i_{j−1} − off_{j−1} > i_j − off_j
                let next = i as i64 - self.offset(j) + self.offset(j - 1) + 1;
                self.descend(p, j - 1, next, sum, limit, n_max, out)?;
            }
            i += 1;
        }
        Ok(())
    }
}

fn push(out: &mut BTreeSet<u64>, sum: u128, pat: &Pattern, n_max: u64) -> Result<()> {
    let v = sum as i128 + pat.add as i128;
    if v < 0 || v % pat.div as i128 != 0 {
        return Err(Error::BadInput(format!("pattern {pat:?} yields non-integral n from {sum}")));
    }
    let n = (v / pat.div as i128) as u64;
    if n <= n_max {
        out.insert(n);
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestItem {
    pub item: String,
    pub residue: u64,
    pub patterns: Vec<Pattern>,
}

/// Residue classification keyed by item label.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    /// Sequence name understood by [`super::builtin`].
    pub sequence: String,
    pub p: u64,
    pub modulus: u64,
    pub items: Vec<ManifestItem>,
    /// Residues that never occur.
    #[serde(default)]
    pub excluded: Vec<u64>,
    /// True when the listed items cover every n with a nonzero residue.
    #[serde(default)]
    pub exhaustive: bool,
    /// Indices below this are outside the statement.
    #[serde(default)]
    pub from: u64,
}

/// Outcome of checking a manifest against a residue table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ManifestReport {
    pub checked: usize,
    /// (item, n, expected, actual)
    pub item_failures: Vec<(String, u64, u64, u64)>,
    /// (n, residue) with an excluded residue.
    pub excluded_hits: Vec<(u64, u64)>,
    /// n claimed by two items with different residues.
    pub conflicts: Vec<(u64, String, String)>,
    /// (n, residue) nonzero but outside every family; only filled for exhaustive manifests.
    pub uncovered: Vec<(u64, u64)>,
}

impl ManifestReport {
    /// Items and exclusions hold.
    pub fn spot_ok(&self) -> bool {
        self.item_failures.is_empty() && self.excluded_hits.is_empty() && self.conflicts.is_empty()
    }

    /// Spot checks hold and nothing nonzero is left unclassified.
    pub fn exhaustive_ok(&self) -> bool {
        self.spot_ok() && self.uncovered.is_empty()
    }
}

impl Manifest {
    pub fn from_json(s: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(s).map_err(|e| Error::BadInput(format!("manifest: {e}")))?;
        for it in &m.items {
            for pat in &it.patterns {
                pat.check()?;
            }
        }
        Ok(m)
    }

    /// n → (item label, residue) for every generated n ≤ n_max, with
    /// conflicting claims reported separately.
    pub fn expand(&self, n_max: u64) -> Result<(BTreeMap<u64, (String, u64)>, Vec<(u64, String, String)>)> {
        let mut claims: BTreeMap<u64, (String, u64)> = BTreeMap::new();
        let mut conflicts = Vec::new();
        for it in &self.items {
            for pat in &it.patterns {
                for n in pat.generate(self.p, n_max)? {
                    match claims.get(&n) {
                        Some((lbl, r)) if *r != it.residue % self.modulus => {
                            conflicts.push((n, lbl.clone(), it.item.clone()));
                        }
                        Some(_) => {}
                        None => {
                            claims.insert(n, (it.item.clone(), it.residue % self.modulus));
                        }
                    }
                }
            }
        }
        Ok((claims, conflicts))
    }

    /// Check against residues r[n], n = 0..r.len().
    pub fn check(&self, residues: &[u64]) -> Result<ManifestReport> {
        let n_max = residues.len().saturating_sub(1) as u64;
        let (claims, conflicts) = self.expand(n_max)?;
        let mut rep = ManifestReport { checked: claims.len(), conflicts, ..Default::default() };
        for (&n, (lbl, want)) in &claims {
            let got = residues[n as usize] % self.modulus;
            if got != *want {
                rep.item_failures.push((lbl.clone(), n, *want, got));
            }
        }
        for (n, &r) in residues.iter().enumerate().skip(self.from as usize) {
            let r = r % self.modulus;
            if self.excluded.contains(&r) {
                rep.excluded_hits.push((n as u64, r));
            }
            if self.exhaustive && r != 0 && !claims.contains_key(&(n as u64)) {
                rep.uncovered.push((n as u64, r));
            }
        }
        Ok(rep)
    }
}

/// The manifests shipped with the crate, by file stem.
pub fn bundled(name: &str) -> Result<Manifest> {
    let text = match name {
        "noncrossing_mod27" => include_str!("../../data/noncrossing_mod27.json"),
        "noncrossing_mod27_amended" => include_str!("../../data/noncrossing_mod27_amended.json"),
        "noncrossing_mod9" => include_str!("../../data/noncrossing_mod9.json"),
        "noncrossing_mod3" => include_str!("../../data/noncrossing_mod3.json"),
        "kreweras_mod27" => include_str!("../../data/kreweras_mod27.json"),
        "kreweras_mod27_amended" => include_str!("../../data/kreweras_mod27_amended.json"),
        "kreweras_mod3" => include_str!("../../data/kreweras_mod3.json"),
        _ => return Err(Error::BadInput(format!("no bundled manifest named {name}"))),
    };
    Manifest::from_json(text)
}

pub const BUNDLED: [&str; 7] = [
    "noncrossing_mod3",
    "noncrossing_mod9",
    "noncrossing_mod27",
    "noncrossing_mod27_amended",
    "kreweras_mod3",
    "kreweras_mod27",
    "kreweras_mod27_amended",
];
