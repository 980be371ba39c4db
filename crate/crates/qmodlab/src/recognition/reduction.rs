//! Lattice reduction over the integers.
//!
//! Textbook LLL with exact rational Gram-Schmidt data. The lattices in this
//! crate stay small (a few dozen rows at most), so full recomputation of the
//! orthogonalization after every swap is affordable and leaves no numerical
//! soundness questions to audit.

use rug::{Complete, Integer, Rational};

/// Row-major integer basis of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub basis: Vec<Vec<Integer>>,
}

impl Lattice {
    pub fn new(basis: Vec<Vec<Integer>>) -> Self {
        Lattice { basis }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Lattice {
            basis: rows
                .iter()
                .map(|r| r.iter().map(|&x| Integer::from(x)).collect())
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LllError {
    EmptyBasis,
    RaggedRows,
    /// Some row lies in the span of the others.
    DependentRows,
}

impl std::fmt::Display for LllError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LllError::EmptyBasis => write!(f, "empty basis"),
            LllError::RaggedRows => write!(f, "rows of unequal length"),
            LllError::DependentRows => write!(f, "linearly dependent rows"),
        }
    }
}

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        acc += (x * y).complete();
    }
    acc
}

fn rat_dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::new();
    for (x, y) in a.iter().zip(b) {
        acc += (x * y).complete();
    }
    acc
}

/// Gram-Schmidt data of `basis`: projection coefficients mu[i][j] for j < i
/// and the squared norms of the orthogonal vectors. None when a row projects
/// to zero, i.e. the rows are dependent.
fn gso(basis: &[Vec<Integer>]) -> Option<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let n = basis.len();
    let mut mu = vec![vec![Rational::new(); n]; n];
    let mut star: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let bi: Vec<Rational> = basis[i].iter().map(|x| Rational::from(x)).collect();
        let mut v = bi.clone();
        for j in 0..i {
            let coeff = rat_dot(&bi, &star[j]) / &norms[j];
            for (vk, sk) in v.iter_mut().zip(star[j].iter()) {
                *vk -= sk.clone() * &coeff;
            }
            mu[i][j] = coeff;
        }
        let nrm = rat_dot(&v, &v);
        if nrm.cmp0() == std::cmp::Ordering::Equal {
            return None;
        }
        star.push(v);
        norms.push(nrm);
    }
    Some((mu, norms))
}

fn round_to_integer(x: &Rational) -> Integer {
    Rational::from(x.round_ref()).into_numer_denom().0
}

/// delta-LLL reduction of the basis, delta in (1/4, 1).
///
/// The output spans the same lattice, satisfies the size-reduction bound
/// |mu_ij| <= 1/2 and the Lovasz condition at the given delta.
pub fn lll(lat: &Lattice, delta: &Rational) -> Result<Lattice, LllError> {
    assert!(
        *delta > Rational::from((1u32, 4u32)) && *delta < Rational::from(1),
        "delta must lie in (1/4, 1)"
    );
    let mut b = lat.basis.clone();
    let n = b.len();
    if n == 0 {
        return Err(LllError::EmptyBasis);
    }
    let m = b[0].len();
    if b.iter().any(|r| r.len() != m) {
        return Err(LllError::RaggedRows);
    }
    let (mut mu, mut norms) = gso(&b).ok_or(LllError::DependentRows)?;

    let mut k = 1;
    while k < n {
        // Size-reduce row k against rows k-1 .. 0, updating mu in place.
        for j in (0..k).rev() {
            let r = round_to_integer(&mu[k][j]);
            if r.cmp0() != std::cmp::Ordering::Equal {
                let rq = Rational::from(&r);
                for col in 0..m {
                    let t = (&r * &b[j][col]).complete();
                    b[k][col] -= t;
                }
                for jp in 0..j {
                    let t = (&mu[j][jp] * &rq).complete();
                    mu[k][jp] -= t;
                }
                mu[k][j] -= rq;
            }
        }
        let musq = (&mu[k][k - 1] * &mu[k][k - 1]).complete();
        let rhs = (delta - musq) * &norms[k - 1];
        if norms[k] >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            let fresh = gso(&b).ok_or(LllError::DependentRows)?;
            mu = fresh.0;
            norms = fresh.1;
            k = std::cmp::max(1, k - 1);
        }
    }
    Ok(Lattice { basis: b })
}

/// Whether every projection coefficient satisfies |mu_ij| <= 1/2.
pub fn is_size_reduced(lat: &Lattice) -> bool {
    let Some((mu, _)) = gso(&lat.basis) else {
        return false;
    };
    let half = Rational::from((1u32, 2u32));
    for i in 0..lat.basis.len() {
        for j in 0..i {
            if (mu[i][j].clone().abs()) > half {
                return false;
            }
        }
    }
    true
}

/// Whether consecutive rows satisfy the Lovasz condition at `delta`.
pub fn lovasz_holds(lat: &Lattice, delta: &Rational) -> bool {
    let Some((mu, norms)) = gso(&lat.basis) else {
        return false;
    };
    for k in 1..lat.basis.len() {
        let musq = (&mu[k][k - 1] * &mu[k][k - 1]).complete();
        let rhs = (delta - musq) * &norms[k - 1];
        if norms[k] < rhs {
            return false;
        }
    }
    true
}

/// Squared Euclidean norm of an integer vector.
pub fn norm_sq(v: &[Integer]) -> Integer {
    dot(v, v)
}
