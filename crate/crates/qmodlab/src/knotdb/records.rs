//! Built-in knot records and the registry.
//!
//! Each record lists the relevant representations sigma_0..sigma_r with
//! their fields, embeddings, weights, volumes, and torsions, together
//! with the Stokes matrix and, where available, gluing data good enough
//! to re-derive the geometric solution from scratch. Volumes are stored
//! as exact expressions (field elements fed to the Rogers or Bloch-Wigner
//! dilogarithm, or rational multiples of pi squared) and evaluated at
//! whatever precision is requested.

use super::{Completion, NZDatum};
use crate::fields::{FieldElement, NumberField};
use crate::mpcore::{bloch_wigner, rogers, PrecCtx};
use rug::{Complex, Rational};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// Exact volume expression, evaluated on demand at a chosen embedding.
#[derive(Clone, Debug)]
pub enum VolumeExpr {
    Zero,
    /// scale * R(arg) + pi_sq * pi^2, where R is the Rogers dilogarithm
    /// R(x) = Li2(x) + log(x) log(1-x)/2 - pi^2/6.
    Rogers { scale: i64, arg: FieldElement, pi_sq: Rational },
    /// i * scale * D(arg), D the Bloch-Wigner dilogarithm.
    ImDilog { scale: i64, arg: FieldElement },
    /// coeff * pi^2, purely real.
    Pi2 { coeff: Rational },
}

impl VolumeExpr {
    pub fn eval(&self, embedding: usize, ctx: &PrecCtx) -> Complex {
        let pi = ctx.pi();
        let pi_sq = pi.clone() * &pi;
        match self {
            VolumeExpr::Zero => ctx.complex_zero(),
            VolumeExpr::Rogers { scale, arg, pi_sq: q } => {
                let z = arg.embed(embedding, ctx);
                let mut val = rogers(&z, ctx) * ctx.float_from(*scale);
                val += pi_sq * ctx.float_from(q);
                val
            }
            VolumeExpr::ImDilog { scale, arg } => {
                let z = arg.embed(embedding, ctx);
                let d = bloch_wigner(&z, ctx) * ctx.float_from(*scale);
                ctx.complex(ctx.float_zero(), d)
            }
            VolumeExpr::Pi2 { coeff } => {
                let v = pi_sq * ctx.float_from(coeff);
                ctx.complex(v, ctx.float_zero())
            }
        }
    }
}

/// One representation in the record: where it lives and its invariants.
#[derive(Clone, Debug)]
pub struct SigmaRep {
    pub label: String,
    pub field: Arc<NumberField>,
    pub embedding: usize,
    /// Growth weight kappa: 3/2 for the trivial representation, else 0.
    pub weight: Rational,
    pub volume: VolumeExpr,
    pub torsion: Option<FieldElement>,
}

impl SigmaRep {
    pub fn volume(&self, ctx: &PrecCtx) -> Complex {
        self.volume.eval(self.embedding, ctx)
    }

    pub fn torsion_value(&self, ctx: &PrecCtx) -> Option<Complex> {
        self.torsion.as_ref().map(|t| t.embed(self.embedding, ctx))
    }
}

/// Reference Stokes data. The first row (transitions from the trivial
/// representation) is only pinned entry-by-entry up to sign; the lower
/// block is pinned up to one overall sign conjugation per representation.
#[derive(Clone, Debug, PartialEq)]
pub struct StokesMatrix {
    pub m: Vec<Vec<i64>>,
    pub row_sign_free: Vec<bool>,
}

/// Which evaluation pipelines the registry promises for a knot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formula {
    Habiro,
    ExactRecursion,
    StateSum,
    Gaussian,
}

/// Gluing datum bundled with everything needed to re-solve it.
#[derive(Clone, Debug)]
pub struct GluingData {
    pub datum: NZDatum,
    pub completion: Option<Completion>,
    pub seeds: Vec<Vec<(f64, f64)>>,
    pub field: Option<Arc<NumberField>>,
}

#[derive(Clone, Debug)]
pub struct KnotRecord {
    pub name: String,
    /// Declared period of the alpha-dependence; not derived from anything.
    pub level: u32,
    /// sigma_0 (trivial) first, then the ordering the Stokes matrix uses.
    pub sigmas: Vec<SigmaRep>,
    /// Complex conjugation as a permutation of indices into `sigmas`.
    pub conjugation: Vec<usize>,
    pub stokes: StokesMatrix,
    pub formulas: Vec<Formula>,
    pub gluing: Option<GluingData>,
}

impl KnotRecord {
    /// Number of nontrivial representations.
    pub fn r(&self) -> usize {
        self.sigmas.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownKnot(pub String);

impl std::fmt::Display for UnknownKnot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "no knot record named {:?}", self.0)
    }
}

impl std::error::Error for UnknownKnot {}

fn registry() -> &'static RwLock<HashMap<String, Arc<KnotRecord>>> {
    static REGISTRY: OnceLock<RwLock<HashMap<String, Arc<KnotRecord>>>> = OnceLock::new();
    REGISTRY.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Add an external record; returns the shared handle now owned by the
/// registry. Intended for startup-time ingestion.
pub fn register_knot(rec: KnotRecord) -> Arc<KnotRecord> {
    let arc = Arc::new(rec);
    registry()
        .write()
        .expect("registry poisoned")
        .insert(arc.name.clone(), Arc::clone(&arc));
    arc
}

pub fn load_knot(name: &str) -> Result<Arc<KnotRecord>, UnknownKnot> {
    match name {
        "4_1" => Ok(four_one()),
        "5_2" => Ok(five_two()),
        "m237" => Ok(minus_two_three_seven()),
        _ => registry()
            .read()
            .expect("registry poisoned")
            .get(name)
            .cloned()
            .ok_or_else(|| UnknownKnot(name.to_string())),
    }
}

fn rat(n: i64, d: u32) -> Rational {
    Rational::from((n, d))
}

fn four_one() -> Arc<KnotRecord> {
    static REC: OnceLock<Arc<KnotRecord>> = OnceLock::new();
    Arc::clone(REC.get_or_init(|| {
        let q = NumberField::rationals();
        let f = NumberField::sqrt_minus3();
        // zeta_6 = (1 + sqrt(-3))/2; both tetrahedra are regular ideal.
        let zeta6 = f.elem(vec![rat(1, 2), rat(1, 2)]);
        let torsion = f.elem_ints(&[0, 1]);
        let sigma = |label: &str, emb: usize| SigmaRep {
            label: label.into(),
            field: Arc::clone(&f),
            embedding: emb,
            weight: Rational::new(),
            volume: VolumeExpr::ImDilog { scale: 2, arg: zeta6.clone() },
            torsion: Some(torsion.clone()),
        };
        Arc::new(KnotRecord {
            name: "4_1".into(),
            level: 1,
            sigmas: vec![
                SigmaRep {
                    label: "sigma0".into(),
                    field: q,
                    embedding: 0,
                    weight: rat(3, 2),
                    volume: VolumeExpr::Zero,
                    torsion: None,
                },
                sigma("sigma1", 0),
                sigma("sigma2", 1),
            ],
            conjugation: vec![0, 2, 1],
            stokes: StokesMatrix {
                m: vec![vec![0, 1, -1], vec![0, 0, -3], vec![0, 3, 0]],
                row_sign_free: vec![true, false, false],
            },
            formulas: vec![
                Formula::Habiro,
                Formula::ExactRecursion,
                Formula::StateSum,
                Formula::Gaussian,
            ],
            gluing: Some(GluingData {
                datum: NZDatum::from_i64(
                    &[vec![1, 0], vec![0, 1]],
                    &[vec![-1, 3], vec![3, -1]],
                    &[1, 1],
                ),
                completion: Some(Completion::from_i64(
                    &[vec![-1, 0], vec![0, 0]],
                    &[vec![2, -3], vec![0, 1]],
                )),
                seeds: vec![vec![
                    (0.5, 0.8660254037844386),
                    (0.5, 0.8660254037844386),
                ]],
                field: Some(f),
            }),
        })
    }))
}

fn five_two() -> Arc<KnotRecord> {
    static REC: OnceLock<Arc<KnotRecord>> = OnceLock::new();
    Arc::clone(REC.get_or_init(|| {
        let q = NumberField::rationals();
        let f = NumberField::xi_cubic();
        let xi = f.gen();
        // xi/(xi-1) = 1 - xi^2 keeps the Rogers argument real at the real
        // embedding.
        let real_arg = f.elem_ints(&[1, 0, -1]);
        let torsion = f.elem_ints(&[-2, 3, 0]);
        let sigma = |label: &str, emb: usize, volume: VolumeExpr| SigmaRep {
            label: label.into(),
            field: Arc::clone(&f),
            embedding: emb,
            weight: Rational::new(),
            volume,
            torsion: Some(torsion.clone()),
        };
        Arc::new(KnotRecord {
            name: "5_2".into(),
            level: 1,
            sigmas: vec![
                SigmaRep {
                    label: "sigma0".into(),
                    field: q,
                    embedding: 0,
                    weight: rat(3, 2),
                    volume: VolumeExpr::Zero,
                    torsion: None,
                },
                sigma(
                    "sigma1",
                    0,
                    VolumeExpr::Rogers { scale: -3, arg: xi.clone(), pi_sq: rat(1, 6) },
                ),
                sigma(
                    "sigma2",
                    1,
                    VolumeExpr::Rogers { scale: -3, arg: xi.clone(), pi_sq: rat(1, 6) },
                ),
                sigma(
                    "sigma3",
                    2,
                    VolumeExpr::Rogers { scale: 3, arg: real_arg, pi_sq: rat(1, 6) },
                ),
            ],
            conjugation: vec![0, 2, 1, 3],
            stokes: StokesMatrix {
                m: vec![
                    vec![0, 1, 1, -1],
                    vec![0, 0, 4, -3],
                    vec![0, -4, 0, -3],
                    vec![0, 3, 3, 0],
                ],
                row_sign_free: vec![true, false, false, false],
            },
            formulas: vec![Formula::Habiro, Formula::StateSum, Formula::Gaussian],
            gluing: Some(GluingData {
                datum: NZDatum::from_i64(
                    &[
                        vec![1, 0, 0, 0, 0],
                        vec![0, 1, 0, 0, 0],
                        vec![0, 0, 1, 0, 0],
                        vec![0, 0, 0, 1, 0],
                        vec![0, 0, 0, 0, 1],
                    ],
                    &[
                        vec![-2, -2, -2, 1, 2],
                        vec![-2, -1, 0, 0, 1],
                        vec![-2, 0, -1, 0, 2],
                        vec![1, 0, 0, 0, 0],
                        vec![2, 1, 2, 0, -2],
                    ],
                    &[0, 1, 1, 0, 0],
                ),
                completion: Some(Completion::from_i64(
                    &[
                        vec![0, 0, 0, 0, 0],
                        vec![0, -1, 0, 0, 0],
                        vec![0, 0, -1, 0, 0],
                        vec![0, 0, 0, 0, 0],
                        vec![0, 0, 0, 0, 0],
                    ],
                    &[
                        vec![1, 0, 0, 0, 0],
                        vec![2, 2, 0, 0, -1],
                        vec![2, 0, 2, 0, -2],
                        vec![0, 0, 0, 1, 0],
                        vec![0, 0, 0, 0, 1],
                    ],
                )),
                // Shapes of the geometric solution: -xi^{-3}, xi^{-2}, and
                // xi^{-1} three times, at the negative-imaginary root.
                seeds: vec![vec![
                    (0.33764102137764197, -0.5622795120623012),
                    (0.12256116687665397, 0.7448617666197442),
                    (0.662358978622373, 0.5622795120623012),
                    (0.662358978622373, 0.5622795120623012),
                    (0.662358978622373, 0.5622795120623012),
                ]],
                field: Some(f),
            }),
        })
    }))
}

fn minus_two_three_seven() -> Arc<KnotRecord> {
    static REC: OnceLock<Arc<KnotRecord>> = OnceLock::new();
    Arc::clone(REC.get_or_init(|| {
        let q = NumberField::rationals();
        let f = NumberField::xi_cubic();
        let h = NumberField::eta_cubic();
        let xi = f.gen();
        let real_arg = f.elem_ints(&[1, 0, -1]);
        // -2 (3 xi - 2) xi^{-2} expanded on the power basis.
        let cubic_torsion = f.elem_ints(&[4, -10, 6]);
        // 14/(eta - 2) expanded on the power basis; norm -392.
        let real_torsion = h.elem_ints(&[-8, -6, -2]);
        let cubic_sigma = |label: &str, emb: usize, volume: VolumeExpr| SigmaRep {
            label: label.into(),
            field: Arc::clone(&f),
            embedding: emb,
            weight: Rational::new(),
            volume,
            torsion: Some(cubic_torsion.clone()),
        };
        let real_sigma = |label: &str, emb: usize, coeff: Rational| SigmaRep {
            label: label.into(),
            field: Arc::clone(&h),
            embedding: emb,
            weight: Rational::new(),
            volume: VolumeExpr::Pi2 { coeff },
            torsion: Some(real_torsion.clone()),
        };
        Arc::new(KnotRecord {
            name: "m237".into(),
            level: 2,
            sigmas: vec![
                SigmaRep {
                    label: "sigma0".into(),
                    field: q,
                    embedding: 0,
                    weight: rat(3, 2),
                    volume: VolumeExpr::Zero,
                    torsion: None,
                },
                cubic_sigma(
                    "sigma1",
                    0,
                    VolumeExpr::Rogers { scale: -3, arg: xi.clone(), pi_sq: rat(1, 3) },
                ),
                cubic_sigma(
                    "sigma2",
                    1,
                    VolumeExpr::Rogers { scale: -3, arg: xi.clone(), pi_sq: rat(1, 3) },
                ),
                cubic_sigma(
                    "sigma3",
                    2,
                    VolumeExpr::Rogers { scale: 3, arg: real_arg, pi_sq: rat(1, 3) },
                ),
                real_sigma("sigma4", 0, rat(-1, 21)),
                real_sigma("sigma5", 1, rat(1, 14)),
                real_sigma("sigma6", 2, rat(-1, 42)),
            ],
            conjugation: vec![0, 2, 1, 3, 4, 5, 6],
            stokes: StokesMatrix {
                m: vec![
                    vec![0, 0, 0, 1, 0, 0, 0],
                    vec![0, 0, 0, 1, 2, 2, 2],
                    vec![0, 0, 0, 1, 2, 2, 2],
                    vec![0, -1, -1, 0, 0, 0, 0],
                    vec![0, -2, -2, 0, 0, 0, 0],
                    vec![0, -2, -2, 0, 0, 0, 0],
                    vec![0, -2, -2, 0, 0, 0, 0],
                ],
                row_sign_free: vec![true, false, false, false, false, false, false],
            },
            formulas: vec![Formula::Gaussian],
            gluing: None,
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::super::{complex_volume, solve_nz, validate_nz};
    use super::*;
    use crate::mpcore::Coeff;
    use rug::ops::CompleteRound;
    use rug::{Float, Integer};

    fn ctx() -> PrecCtx {
        PrecCtx::new(320)
    }

    fn tol(g: &PrecCtx, digits: &str) -> Float {
        g.float_str(digits)
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert_eq!(load_knot("6_1").unwrap_err(), UnknownKnot("6_1".into()));
    }

    #[test]
    fn registered_records_can_be_loaded() {
        let q = NumberField::rationals();
        let rec = KnotRecord {
            name: "test-unknot".into(),
            level: 1,
            sigmas: vec![SigmaRep {
                label: "sigma0".into(),
                field: q,
                embedding: 0,
                weight: Rational::from((3, 2)),
                volume: VolumeExpr::Zero,
                torsion: None,
            }],
            conjugation: vec![0],
            stokes: StokesMatrix { m: vec![vec![0]], row_sign_free: vec![true] },
            formulas: vec![],
            gluing: None,
        };
        register_knot(rec);
        let back = load_knot("test-unknot").unwrap();
        assert_eq!(back.r(), 0);
    }

    #[test]
    fn weights_and_trivial_volume() {
        for name in ["4_1", "5_2", "m237"] {
            let rec = load_knot(name).unwrap();
            let g = ctx();
            assert_eq!(rec.sigmas[0].weight, Rational::from((3, 2)), "{name}");
            let v0 = rec.sigmas[0].volume(&g);
            assert!(v0.real().is_zero() && v0.imag().is_zero(), "{name}");
            for s in &rec.sigmas[1..] {
                assert_eq!(s.weight, Rational::new(), "{name} {}", s.label);
            }
        }
    }

    #[test]
    fn conjugation_is_an_involution_matching_embeddings() {
        let g = ctx();
        let eps = Float::with_val(320, 1) >> 100u32;
        for name in ["4_1", "5_2", "m237"] {
            let rec = load_knot(name).unwrap();
            let perm = &rec.conjugation;
            assert_eq!(perm.len(), rec.sigmas.len());
            assert_eq!(perm[0], 0, "{name}: trivial rep must be self-conjugate");
            for (i, &j) in perm.iter().enumerate() {
                assert_eq!(perm[j], i, "{name}: not an involution at {i}");
                let a = &rec.sigmas[i];
                let b = &rec.sigmas[j];
                assert_eq!(a.field.name, b.field.name, "{name}");
                // Conjugate representations live at conjugate roots.
                let ra = a.field.root(a.embedding, &g);
                let rb = b.field.root(b.embedding, &g);
                let diff = (ra.real() - rb.real()).complete(320).abs()
                    + (ra.imag() + rb.imag()).complete(320).abs();
                assert!(diff < eps, "{name}: roots of {i} and {j} not conjugate");
                // Volumes are conjugate as well.
                let va = a.volume(&g);
                let vb = b.volume(&g);
                let vdiff = (va.real() - vb.real()).complete(320).abs()
                    + (va.imag() + vb.imag()).complete(320).abs();
                assert!(vdiff < eps, "{name}: volumes of {i} and {j} not conjugate");
            }
        }
    }

    #[test]
    fn volume_imaginary_parts_cancel() {
        let g = ctx();
        let eps = Float::with_val(320, 1) >> 100u32;
        for name in ["4_1", "5_2", "m237"] {
            let rec = load_knot(name).unwrap();
            let mut total = Float::new(320);
            for s in &rec.sigmas {
                total += s.volume(&g).imag();
            }
            assert!(total.clone().abs() < eps, "{name}: sum of Im V = {}", total.to_f64());
        }
    }

    #[test]
    fn figure_eight_volume_literal() {
        let g = ctx();
        let rec = load_knot("4_1").unwrap();
        let v = rec.sigmas[1].volume(&g);
        let lit = g.float_str("2.029883212819307250042405108549040571883378615060");
        assert!(v.real().clone().abs() < tol(&g, "1e-90"));
        let err = (v.imag() - &lit).complete(320).abs();
        assert!(err < tol(&g, "1e-44"), "off by {}", err.to_f64());
    }

    #[test]
    fn five_two_volume_literals() {
        let g = ctx();
        let rec = load_knot("5_2").unwrap();
        let v1 = rec.sigmas[1].volume(&g);
        let re = g.float_str("3.024128376509301659719951221694600993984");
        let im = g.float_str("2.828122088330783162763898809276634942771");
        assert!((v1.real() - &re).complete(320).abs() < tol(&g, "1e-38"));
        assert!((v1.imag() - &im).complete(320).abs() < tol(&g, "1e-38"));

        let v3 = rec.sigmas[3].volume(&g);
        let re3 = g.float_str("-1.113454552473924010022656943451126420312");
        assert!((v3.real() - &re3).complete(320).abs() < tol(&g, "1e-38"));
        assert!(v3.imag().clone().abs() < tol(&g, "1e-80"));
    }

    #[test]
    fn pretzel_volume_literals() {
        let g = ctx();
        let rec = load_knot("m237").unwrap();
        let v1 = rec.sigmas[1].volume(&g);
        let re = g.float_str("4.669062443357528096192366388340626183203");
        let im = g.float_str("2.828122088330783162763898809276634942771");
        assert!((v1.real() - &re).complete(320).abs() < tol(&g, "1e-38"));
        assert!((v1.imag() - &im).complete(320).abs() < tol(&g, "1e-38"));

        let v3 = rec.sigmas[3].volume(&g);
        let re3 = g.float_str("0.5314795143743024264497582231948987689069");
        assert!((v3.real() - &re3).complete(320).abs() < tol(&g, "1e-38"));

        // The three real representations carry rational multiples of pi^2.
        let pi = g.pi();
        let pi_sq = pi.clone() * &pi;
        let want = [
            (4usize, Rational::from((-1, 21)), "-0.469981161956636"),
            (5, Rational::from((1, 14)), "0.704971742934954"),
            (6, Rational::from((-1, 42)), "-0.234990580978318"),
        ];
        for (idx, coeff, decimal) in want {
            let v = rec.sigmas[idx].volume(&g);
            let expect = pi_sq.clone() * g.float_from(&coeff);
            assert!((v.real() - &expect).complete(320).abs() < tol(&g, "1e-90"));
            assert!(v.imag().is_zero());
            let lit = g.float_str(decimal);
            assert!((v.real() - &lit).complete(320).abs() < tol(&g, "1e-12"));
        }
    }

    #[test]
    fn torsions_are_the_stated_field_elements() {
        let g = ctx();
        let rec41 = load_knot("4_1").unwrap();
        // delta^2 = -3.
        let t = rec41.sigmas[1].torsion.as_ref().unwrap();
        let sq = t.mul(t);
        assert_eq!(sq, rec41.sigmas[1].field.from_rational(Rational::from(-3)));

        let rec52 = load_knot("5_2").unwrap();
        let t = rec52.sigmas[1].torsion.as_ref().unwrap();
        assert_eq!(t.norm(), Rational::from(-23));

        // Product over the real embeddings equals the norm, -392.
        let rec = load_knot("m237").unwrap();
        let mut prod = Float::with_val(320, 1);
        for idx in 4..=6 {
            prod *= rec.sigmas[idx].torsion_value(&g).unwrap().into_real_imag().0;
        }
        let err = (prod - Float::with_val(320, -392)).abs();
        assert!(err < tol(&g, "1e-80"), "product off by {}", err.to_f64());
        assert_eq!(
            rec.sigmas[4].torsion.as_ref().unwrap().norm(),
            Rational::from(-392)
        );
    }

    #[test]
    fn stokes_matrices_have_the_documented_structure() {
        for name in ["4_1", "5_2", "m237"] {
            let rec = load_knot(name).unwrap();
            let m = &rec.stokes.m;
            let size = rec.sigmas.len();
            assert_eq!(m.len(), size, "{name}");
            assert_eq!(rec.stokes.row_sign_free.len(), size, "{name}");
            assert!(rec.stokes.row_sign_free[0], "{name}");
            assert!(rec.stokes.row_sign_free[1..].iter().all(|x| !x), "{name}");
            for row in m {
                assert_eq!(row.len(), size, "{name}");
                // No transitions into the trivial representation.
                assert_eq!(row[0], 0, "{name}");
            }
            // The nontrivial block is skew-symmetric.
            for i in 1..size {
                for j in 1..size {
                    assert_eq!(m[i][j], -m[j][i], "{name} at ({i},{j})");
                }
            }
        }
        // Real-to-real transitions vanish for the pretzel knot.
        let rec = load_knot("m237").unwrap();
        for i in 3..7 {
            for j in 3..7 {
                assert_eq!(rec.stokes.m[i][j], 0);
            }
        }
    }

    #[test]
    fn levels_are_declared_data() {
        assert_eq!(load_knot("4_1").unwrap().level, 1);
        assert_eq!(load_knot("5_2").unwrap().level, 1);
        assert_eq!(load_knot("m237").unwrap().level, 2);
        assert_eq!(load_knot("4_1").unwrap().r(), 2);
        assert_eq!(load_knot("5_2").unwrap().r(), 3);
        assert_eq!(load_knot("m237").unwrap().r(), 6);
    }

    #[test]
    fn gluing_solution_reproduces_the_stored_volume_expression() {
        let g = ctx();
        let rec = load_knot("5_2").unwrap();
        let gl = rec.gluing.as_ref().unwrap();
        assert!(validate_nz(&gl.datum).pass());
        let sols = solve_nz(&gl.datum, &gl.seeds, None, gl.completion.as_ref(), &g).unwrap();
        let vol = complex_volume(&gl.datum, &sols[0], gl.completion.as_ref(), &g).unwrap();
        let expr = rec.sigmas[1].volume(&g);
        let diff = (&vol.value - &expr).complete((320, 320));
        let err = diff.real().clone().abs() + diff.imag().clone().abs();
        assert!(err < tol(&g, "1e-80"), "volume mismatch {}", err.to_f64());
    }

    #[test]
    fn stokes_gaps_are_positive_where_transitions_exist() {
        // Every nonzero transition entry links representations with
        // distinct volumes; the induced gap feeds the growth model.
        let g = PrecCtx::new(128);
        for name in ["4_1", "5_2", "m237"] {
            let rec = load_knot(name).unwrap();
            let vols: Vec<Complex> = rec.sigmas.iter().map(|s| s.volume(&g)).collect();
            for (i, row) in rec.stokes.m.iter().enumerate() {
                for (j, &e) in row.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let d = (&vols[i] - &vols[j]).complete((128, 128));
                    let gap = d.abs().into_real_imag().0;
                    assert!(
                        gap > Float::with_val(128, 1e-10),
                        "{name}: transition ({i},{j}) with equal volumes"
                    );
                }
            }
        }
    }

    #[test]
    fn sign_mask_admits_row_sign_flips_preserving_skewness() {
        // Flipping signs in a sign-free row must not be able to break the
        // skew-symmetry of the lower block; only row 0 is sign-free, and
        // row 0 does not meet the lower block.
        for name in ["4_1", "5_2", "m237"] {
            let rec = load_knot(name).unwrap();
            for (i, free) in rec.stokes.row_sign_free.iter().enumerate() {
                if *free {
                    assert_eq!(i, 0, "{name}: only the trivial row is entrywise sign-free");
                }
            }
        }
    }

    #[test]
    fn volume_expressions_evaluate_consistently_across_precision() {
        // Doubling the precision must not move the first 300 bits.
        let lo = PrecCtx::new(320);
        let hi = lo.double();
        for name in ["4_1", "5_2", "m237"] {
            let rec = load_knot(name).unwrap();
            for s in &rec.sigmas {
                let a = s.volume(&lo);
                let b = s.volume(&hi);
                if a.real().is_zero() && a.imag().is_zero() {
                    let mag = b.clone().abs().into_real_imag().0;
                    assert!(mag < Float::with_val(640, 1) >> 300u32);
                    continue;
                }
                let bits = PrecCtx::agreement_bits(&a, &Complex::with_val(320, &b)).unwrap();
                assert!(bits >= 300, "{name} {}: only {bits} bits agree", s.label);
            }
        }
    }

    #[test]
    fn integer_relation_vector_of_volumes_is_absent() {
        // Level and weight data are rational, but the nontrivial volumes
        // are not rational multiples of pi^2 for the hyperbolic reps.
        let g = ctx();
        let rec = load_knot("5_2").unwrap();
        let v = rec.sigmas[1].volume(&g);
        let pi = g.pi();
        let pi_sq = pi.clone() * &pi;
        let ratio = v.real() / &pi_sq;
        let r = ratio.complete(320);
        // Not within 1e-30 of any rational with denominator up to 1000.
        let mut best = Float::with_val(320, 1);
        for den in 1u32..=1000 {
            let scaled = r.clone() * den;
            let frac = (scaled.clone() - scaled.round()).abs() / den;
            if frac < best {
                best = frac;
            }
        }
        assert!(best > tol(&g, "1e-30"), "volume suspiciously rational");
    }
}
