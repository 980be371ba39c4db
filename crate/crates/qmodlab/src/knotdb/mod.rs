//! Knot registry, gluing data, and complexified volumes.
//!
//! A gluing datum is the half-symplectic package (A, B, nu) extracted from
//! an ideal triangulation: square integer matrices with A·Bᵗ symmetric,
//! the columns of (A B) spanning the full integer lattice, and a parity
//! vector matching diag(A·Bᵗ) mod 2. [`validate_nz`] checks those
//! invariants report-style with witnesses. [`solve_nz`] refines seed
//! vectors to shape solutions by Newton iteration on the logarithmic form
//! of the equations z^A = (−1)^ν (1−z)^B, optionally recognizing the
//! shapes exactly in a number field. [`complex_volume`] evaluates the
//! dilogarithmic volume formula on a solution, complete with the
//! correction term supplied by a symplectic completion (C, D).
//!
//! The registry ships records for the three worked knots. Volumes and
//! torsions are stored as exact field and Rogers-dilogarithm expressions
//! and recomputed at whatever precision the caller asks for; no decimal
//! constant is frozen into the data.

pub mod lattice;
mod records;
mod solve;

pub use records::{
    load_knot, register_knot, Formula, GluingData, KnotRecord, SigmaRep, StokesMatrix,
    UnknownKnot, VolumeExpr,
};
pub use solve::{
    complex_volume, solve_nz, ExactShapes, ShapeSolution, SolveError, VolumeError, VolumeModulus,
    VolumeValue,
};

use crate::fields::{field_from_json, field_to_json, NumberField};
use lattice::{invariant_factors, mat_from_i64, mat_mul, transpose, IMat};
use rug::{Complete, Integer};
use serde_json::{json, Value};
use std::sync::Arc;

/// Half-symplectic gluing datum: N×N integer matrices and a parity vector.
#[derive(Clone, Debug, PartialEq)]
pub struct NZDatum {
    pub n: usize,
    pub a: IMat,
    pub b: IMat,
    pub nu: Vec<Integer>,
}

impl NZDatum {
    pub fn from_i64(a: &[Vec<i64>], b: &[Vec<i64>], nu: &[i64]) -> NZDatum {
        NZDatum {
            n: a.len(),
            a: mat_from_i64(a),
            b: mat_from_i64(b),
            nu: nu.iter().map(|&x| Integer::from(x)).collect(),
        }
    }
}

/// Closing pair for a datum: rows (C D) extend (A B) to a full symplectic
/// matrix, so C·Dᵗ is symmetric and A·Dᵗ − B·Cᵗ = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Completion {
    pub c: IMat,
    pub d: IMat,
}

impl Completion {
    pub fn from_i64(c: &[Vec<i64>], d: &[Vec<i64>]) -> Completion {
        Completion { c: mat_from_i64(c), d: mat_from_i64(d) }
    }
}

/// One validation check with a human-readable witness.
#[derive(Clone, Debug)]
pub struct NZCheck {
    pub name: &'static str,
    pub pass: bool,
    pub witness: String,
}

/// Report of all datum invariants; nothing here is an error condition.
#[derive(Clone, Debug)]
pub struct NZReport {
    pub checks: Vec<NZCheck>,
}

impl NZReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &'static str, pass: bool, witness: String) {
        self.checks.push(NZCheck { name, pass, witness });
    }
}

impl std::fmt::Display for NZReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: {}",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.witness
            )?;
        }
        Ok(())
    }
}

fn is_square(m: &IMat, n: usize) -> bool {
    m.len() == n && m.iter().all(|r| r.len() == n)
}

fn fmt_diag(d: &[Integer]) -> String {
    let parts: Vec<String> = d.iter().map(Integer::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// Check the datum invariants, reporting a witness for each.
pub fn validate_nz(d: &NZDatum) -> NZReport {
    let mut rep = NZReport { checks: Vec::new() };
    let shaped = is_square(&d.a, d.n) && is_square(&d.b, d.n) && d.nu.len() == d.n;
    rep.push(
        "shape",
        shaped,
        format!("N = {}, A {}x?, B {}x?, nu len {}", d.n, d.a.len(), d.b.len(), d.nu.len()),
    );
    if !shaped {
        return rep;
    }

    // Columns of (A B) span the integer lattice iff the Smith diagonal of
    // the N x 2N concatenation is all ones.
    let concat: IMat = d
        .a
        .iter()
        .zip(d.b.iter())
        .map(|(ra, rb)| ra.iter().chain(rb.iter()).cloned().collect())
        .collect();
    let factors = invariant_factors(&concat);
    let spans = factors.len() == d.n && factors.iter().all(|x| *x == 1);
    rep.push("span", spans, format!("smith diagonal {}", fmt_diag(&factors)));

    let abt = mat_mul(&d.a, &transpose(&d.b));
    let mut sym_witness = String::from("A Bt symmetric");
    let mut sym = true;
    'sym: for i in 0..d.n {
        for j in i + 1..d.n {
            if abt[i][j] != abt[j][i] {
                sym = false;
                sym_witness =
                    format!("(A Bt)[{i}][{j}] = {} but (A Bt)[{j}][{i}] = {}", abt[i][j], abt[j][i]);
                break 'sym;
            }
        }
    }
    rep.push("symmetry", sym, sym_witness);

    let diag: Vec<Integer> = (0..d.n).map(|i| abt[i][i].clone()).collect();
    let parity = d
        .nu
        .iter()
        .zip(diag.iter())
        .all(|(nu, dd)| ((nu - dd).complete() % 2u32).is_zero());
    rep.push(
        "parity",
        parity,
        format!("nu = {} vs diag(A Bt) = {}", fmt_diag(&d.nu), fmt_diag(&diag)),
    );
    rep
}

/// Check that (C, D) closes the datum to a full symplectic matrix.
pub fn validate_completion(d: &NZDatum, comp: &Completion) -> NZReport {
    let mut rep = NZReport { checks: Vec::new() };
    let shaped = is_square(&comp.c, d.n) && is_square(&comp.d, d.n);
    rep.push("completion-shape", shaped, format!("C {}x?, D {}x?", comp.c.len(), comp.d.len()));
    if !shaped {
        return rep;
    }

    let cdt = mat_mul(&comp.c, &transpose(&comp.d));
    let mut sym = true;
    let mut wit = String::from("C Dt symmetric");
    'sym: for i in 0..d.n {
        for j in i + 1..d.n {
            if cdt[i][j] != cdt[j][i] {
                sym = false;
                wit = format!("(C Dt)[{i}][{j}] = {} but (C Dt)[{j}][{i}] = {}", cdt[i][j], cdt[j][i]);
                break 'sym;
            }
        }
    }
    rep.push("completion-symmetry", sym, wit);

    let adt = mat_mul(&d.a, &transpose(&comp.d));
    let bct = mat_mul(&d.b, &transpose(&comp.c));
    let mut unit = true;
    let mut wit = String::from("A Dt - B Ct = 1");
    'unit: for i in 0..d.n {
        for j in 0..d.n {
            let got = (&adt[i][j] - &bct[i][j]).complete();
            let want = Integer::from(u32::from(i == j));
            if got != want {
                unit = false;
                wit = format!("(A Dt - B Ct)[{i}][{j}] = {got}, want {want}");
                break 'unit;
            }
        }
    }
    rep.push("completion-unit", unit, wit);
    rep
}

fn imat_to_json(m: &IMat) -> Value {
    Value::Array(
        m.iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|x| Value::from(x.to_i64().expect("matrix entry exceeds i64")))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn imat_from_json(v: &Value) -> Option<IMat> {
    v.as_array()?
        .iter()
        .map(|row| {
            row.as_array()?
                .iter()
                .map(|x| x.as_i64().map(Integer::from))
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}

/// Serialize a datum bundle: matrices, parity vector, optional completion,
/// solver seeds, and an optional shape-field spec.
pub fn gluing_to_json(g: &GluingData) -> Value {
    let mut obj = json!({
        "N": g.datum.n,
        "A": imat_to_json(&g.datum.a),
        "B": imat_to_json(&g.datum.b),
        "nu": g.datum.nu.iter().map(|x| Value::from(x.to_i64().expect("nu entry exceeds i64"))).collect::<Vec<_>>(),
        "seeds": g
            .seeds
            .iter()
            .map(|s| s.iter().map(|(re, im)| json!({"re": re, "im": im})).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    if let Some(c) = &g.completion {
        obj["completion"] = json!({"C": imat_to_json(&c.c), "D": imat_to_json(&c.d)});
    }
    if let Some(f) = &g.field {
        obj["field"] = field_to_json(f);
    }
    obj
}

pub fn gluing_from_json(v: &Value) -> Option<GluingData> {
    let n = v.get("N")?.as_u64()? as usize;
    let a = imat_from_json(v.get("A")?)?;
    let b = imat_from_json(v.get("B")?)?;
    let nu: Vec<Integer> = v
        .get("nu")?
        .as_array()?
        .iter()
        .map(|x| x.as_i64().map(Integer::from))
        .collect::<Option<Vec<_>>>()?;
    let completion = match v.get("completion") {
        None | Some(Value::Null) => None,
        Some(c) => Some(Completion {
            c: imat_from_json(c.get("C")?)?,
            d: imat_from_json(c.get("D")?)?,
        }),
    };
    let seeds = match v.get("seeds") {
        None => Vec::new(),
        Some(s) => s
            .as_array()?
            .iter()
            .map(|row| {
                row.as_array()?
                    .iter()
                    .map(|z| Some((z.get("re")?.as_f64()?, z.get("im")?.as_f64()?)))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?,
    };
    let field: Option<Arc<NumberField>> = match v.get("field") {
        None | Some(Value::Null) => None,
        Some(f) => Some(field_from_json(f)?),
    };
    Some(GluingData { datum: NZDatum { n, a, b, nu }, completion, seeds, field })
}
