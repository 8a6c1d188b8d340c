//! Certificates that a composed interpretation `J ∘ (I_1, …, I_j)` is
//! pp-homotopic to the identity, and their concrete verification.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::catalog::{lookup, ra_axis, rel};
use super::interpretation::{compose, Interpretation};
use crate::domain::{Calculus, Value};
use crate::error::{Error, Result};
use crate::point::atom::{Op, OrderAtom, Term};
use crate::pp::{compile, PpFormula, Structure};
use crate::relations::basic::IaBasic;
use crate::sample::{grid_values, random_value};

/// `θ(z, x_1, …, x_ij)` defining `z = J∘(I_1,…,I_j)(x̄)` over the base structure.
#[derive(Debug, Clone)]
pub struct HomotopyWitness {
    pub composed: Interpretation,
    pub theta: PpFormula,
}

impl HomotopyWitness {
    pub fn structure(&self) -> Structure {
        self.composed.source
    }
}

/// The witness for one calculus: `"ia"`, `"ra"`, `"cdc"` or `"dia"`.
pub fn homotopy_witness(calculus: &str) -> Result<HomotopyWitness> {
    let (j, is, theta) = match calculus {
        "ia" => (
            "ia.J",
            vec!["ia.I1", "ia.I2"],
            PpFormula::new(
                &["Z", "X", "Y"],
                &[],
                vec![rel(Calculus::Ia, "s", "X", "Z"), rel(Calculus::Ia, "f", "Y", "Z")],
            ),
        ),
        "ra" => (
            "ra.J",
            vec!["ra.I1", "ra.I2", "ra.I3", "ra.I4"],
            PpFormula::new(
                &["Z", "W1", "W2", "W3", "W4"],
                &[],
                vec![
                    ra_axis(0, IaBasic::S, "W1", "Z"),
                    ra_axis(0, IaBasic::F, "W2", "Z"),
                    ra_axis(1, IaBasic::S, "W3", "Z"),
                    ra_axis(1, IaBasic::F, "W4", "Z"),
                ],
            ),
        ),
        "cdc" => (
            "cdc.J",
            vec!["cdc.I1", "cdc.I2"],
            PpFormula::new(
                &["Z", "U", "V"],
                &["U'", "V'"],
                vec![
                    rel(Calculus::Cdc, "N", "U'", "U"),
                    rel(Calculus::Cdc, "N", "U'", "Z"),
                    rel(Calculus::Cdc, "E", "V'", "V"),
                    rel(Calculus::Cdc, "E", "V'", "Z"),
                ],
            ),
        ),
        "dia" => (
            "dia.J",
            vec!["dia.I1", "dia.I2"],
            PpFormula::new(
                &["Z", "X", "Y"],
                &[],
                vec![rel(Calculus::Dia, "cb=", "X", "Z"), rel(Calculus::Dia, "cf=", "Y", "Z")],
            ),
        ),
        other => return Err(Error::UnknownCatalogEntry(other.to_string())),
    };
    let j = lookup(j)?;
    let is: Vec<Interpretation> = is.into_iter().map(lookup).collect::<Result<_>>()?;
    // θ only speaks about tuples in the domains of the I_l
    let mut theta = theta;
    for (l, i) in is.iter().enumerate() {
        let x = theta.free[1 + l].clone();
        let (ex, atoms) = i.domain.instantiate(&[x], &format!("dom{l}"));
        theta.exists.extend(ex);
        theta.atoms.extend(atoms);
    }
    let composed = compose(&j, &is, Some(&theta))?;
    Ok(HomotopyWitness { composed, theta })
}

#[derive(Debug, Clone, Serialize)]
pub struct HomotopyCounterexample {
    pub sample: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct HomotopyReport {
    /// Samples inside the composed domain that were checked.
    pub checked: usize,
    /// Samples outside the composed domain, by index.
    pub skipped: Vec<usize>,
    pub counterexample: Option<HomotopyCounterexample>,
}

impl HomotopyReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Outcome of checking one sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleCheck {
    OutsideDomain,
    Unique(Value),
    Failed(String),
}

/// Checks that `θ(z, x̄)` holds exactly for `z` = the composed map's output.
pub fn check_sample(w: &HomotopyWitness, sample: &[Value]) -> Result<SampleCheck> {
    let theta = &w.theta;
    if sample.len() + 1 != theta.arity() {
        return Err(Error::DimensionMismatch {
            expected: theta.arity() - 1,
            got: sample.len(),
        });
    }
    let z = theta.free[0].clone();
    let assignment: BTreeMap<String, Value> =
        theta.free[1..].iter().cloned().zip(sample.iter().cloned()).collect();
    let open = compile(w.structure(), theta, &assignment)?;
    if !open.satisfiable() {
        return Ok(SampleCheck::OutsideDomain);
    }
    let Some(out) = w.composed.apply(sample) else {
        return Ok(SampleCheck::Failed(
            "coordinate map undefined inside the witness domain".into(),
        ));
    };
    let base = open.slot(&z).expect("z is free");
    let coords = out.slots();
    let pin: Vec<OrderAtom> = coords
        .iter()
        .enumerate()
        .map(|(k, q)| OrderAtom::new(Term::Var(base + k), Op::Eq, Term::Const(*q)))
        .collect();
    if !open.satisfiable_with(&pin) {
        return Ok(SampleCheck::Failed(format!("witness formula rejects the image {out}")));
    }
    for (k, q) in coords.iter().enumerate() {
        let other = OrderAtom::new(Term::Var(base + k), Op::Ne, Term::Const(*q));
        if open.satisfiable_with(&[other]) {
            return Ok(SampleCheck::Failed(format!(
                "witness formula admits an element other than {out} (coordinate {k} differs)"
            )));
        }
    }
    Ok(SampleCheck::Unique(out))
}

pub fn check_homotopy_identity(w: &HomotopyWitness, samples: &[Vec<Value>]) -> Result<HomotopyReport> {
    let mut report = HomotopyReport::default();
    for (i, s) in samples.iter().enumerate() {
        match check_sample(w, s)? {
            SampleCheck::OutsideDomain => report.skipped.push(i),
            SampleCheck::Unique(_) => report.checked += 1,
            SampleCheck::Failed(reason) => {
                report.counterexample = Some(HomotopyCounterexample {
                    sample: s.iter().map(|v| v.to_string()).collect(),
                    reason,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Sample tuples for a witness: a fixed grid prefix, then seeded random tuples.
pub fn homotopy_samples(w: &HomotopyWitness, count: usize, seed: u64) -> Vec<Vec<Value>> {
    let Structure::Calculus(c) = w.structure() else {
        return vec![];
    };
    let arity = w.theta.arity() - 1;
    let grid = grid_values(c);
    let mut out: Vec<Vec<Value>> = Vec::new();
    // grid: tuples whose i-th element is grid[(n / |grid|^i) mod |grid|]
    let grid_count = grid.len().pow(arity as u32).min(count / 4);
    for n in 0..grid_count {
        let mut m = n;
        let mut t = Vec::with_capacity(arity);
        for _ in 0..arity {
            t.push(grid[m % grid.len()].clone());
            m /= grid.len();
        }
        out.push(t);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        out.push((0..arity).map(|_| random_value(Some(c), &mut rng, 4)).collect());
    }
    out
}

/// Checks samples until `in_domain` of them lie in the composed domain.
pub fn run_homotopy_check(w: &HomotopyWitness, in_domain: usize, seed: u64) -> Result<HomotopyReport> {
    let mut report = HomotopyReport::default();
    let mut batch_seed = seed;
    let mut offset = 0;
    while report.checked < in_domain {
        let samples = homotopy_samples(w, 4 * in_domain, batch_seed);
        for (i, s) in samples.iter().enumerate() {
            if report.checked == in_domain {
                break;
            }
            match check_sample(w, s)? {
                SampleCheck::OutsideDomain => report.skipped.push(offset + i),
                SampleCheck::Unique(_) => report.checked += 1,
                SampleCheck::Failed(reason) => {
                    report.counterexample = Some(HomotopyCounterexample {
                        sample: s.iter().map(|v| v.to_string()).collect(),
                        reason,
                    });
                    return Ok(report);
                }
            }
        }
        offset += samples.len();
        batch_seed = batch_seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    }
    Ok(report)
}
