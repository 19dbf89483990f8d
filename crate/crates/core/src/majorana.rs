//! The Majorana polynomial of a symmetric state, its roots (the Majorana
//! stars), genericity, and the product form built from the stars.

use crate::error::{Error, Result};
use crate::poly;
use crate::sphere::Extended;
use crate::symstate::{dicke_weights, CollectiveMap, Parity, SymmetricState};
use num_complex::Complex64;

/// Default chordal clustering tolerance for root multiplicities.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// `Psi(alpha) = sum_k lambda_k alpha^k` with `lambda_k = d_k c_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaPoly {
    coeffs: Vec<Complex64>,
}

impl MajoranaPoly {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn n_qubits(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, alpha: Complex64) -> Complex64 {
        poly::eval(&self.coeffs, alpha)
    }

    /// `Psi(0)`, the constant coefficient.
    pub fn value_at_zero(&self) -> Complex64 {
        self.coeffs[0]
    }
}

pub fn majorana_polynomial(s: &SymmetricState) -> MajoranaPoly {
    let w = dicke_weights(s.n_qubits()).expect("state has n >= 1");
    MajoranaPoly {
        coeffs: s.dicke().iter().zip(w.values()).map(|(c, d)| c * d).collect(),
    }
}

/// Distinct root locations with multiplicities; the multiplicities add up
/// to `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootMultiset {
    n_qubits: usize,
    roots: Vec<(Extended, usize)>,
}

impl RootMultiset {
    pub fn new(n_qubits: usize, roots: Vec<(Extended, usize)>) -> Result<Self> {
        let total: usize = roots.iter().map(|r| r.1).sum();
        if total != n_qubits || roots.iter().any(|r| r.1 == 0) {
            return Err(Error::InvalidInput(format!(
                "root multiplicities sum to {total}, expected {n_qubits}"
            )));
        }
        Ok(RootMultiset { n_qubits, roots })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn roots(&self) -> &[(Extended, usize)] {
        &self.roots
    }

    pub fn max_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.1).max().unwrap_or(0)
    }

    pub fn multiplicity_at_infinity(&self) -> usize {
        self.roots
            .iter()
            .filter(|r| r.0.is_infinite())
            .map(|r| r.1)
            .sum()
    }

    /// Every root repeated according to its multiplicity.
    pub fn expanded(&self) -> Vec<Extended> {
        self.roots
            .iter()
            .flat_map(|(z, m)| std::iter::repeat_n(*z, *m))
            .collect()
    }

    /// Largest chordal distance under a greedy nearest-pair matching of the
    /// two expanded root lists; infinite when the sizes differ.
    pub fn distance(&self, other: &RootMultiset) -> f64 {
        match_distance(&self.expanded(), &other.expanded())
    }
}

/// Greedy matching of two point lists on the sphere, closest pairs first.
/// Returns the largest matched distance.
pub fn match_distance(a: &[Extended], b: &[Extended]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push((x.chordal(y), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

pub fn majorana_roots(p: &MajoranaPoly, tol: f64) -> Result<RootMultiset> {
    let all = poly::roots(&p.coeffs).ok_or(Error::ZeroState)?;
    let clusters = poly::cluster(&p.coeffs, &all, tol);
    RootMultiset::new(p.n_qubits(), clusters)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub gamma: usize,
    pub generic: bool,
    pub parity: Parity,
}

/// The parity rule: odd `N` needs `gamma < (N+1)/2`, even `N` needs
/// `gamma < N/2 + 1`; `gamma = N` (a product state) is always allowed.
pub fn is_generic_degree(n_qubits: usize, gamma: usize) -> bool {
    if gamma == n_qubits {
        return true;
    }
    match Parity::of(n_qubits) {
        Parity::Odd => gamma < n_qubits.div_ceil(2),
        Parity::Even => gamma < n_qubits / 2 + 1,
    }
}

pub fn genericity(s: &SymmetricState, tol: f64) -> Result<GenericityReport> {
    let roots = majorana_roots(&majorana_polynomial(s), tol)?;
    Ok(report_for(&roots))
}

pub(crate) fn report_for(roots: &RootMultiset) -> GenericityReport {
    let gamma = roots.max_multiplicity();
    GenericityReport {
        gamma,
        generic: is_generic_degree(roots.n_qubits(), gamma),
        parity: Parity::of(roots.n_qubits()),
    }
}

/// `|Psi> = A sum_perm |chi_1> (x) ... (x) |chi_N>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductForm {
    pub a: Complex64,
    pub chis: Vec<[Complex64; 2]>,
}

impl ProductForm {
    /// Dicke coefficients of `A sum_perm (x)_n chi_n`.
    pub fn to_state(&self) -> SymmetricState {
        let sym = symmetrized_product(&self.chis);
        SymmetricState::from_raw(sym.into_iter().map(|c| c * self.a).collect())
    }
}

/// `|chi> = sin(theta/2)|0> - e^{-i phi} cos(theta/2)|1>` for a star at
/// `(theta, phi)`; the star at infinity gives `|0>`.
pub fn chi_for_root(root: &Extended) -> [Complex64; 2] {
    let (theta, phi) = root.angles();
    [
        Complex64::new((theta / 2.0).sin(), 0.0),
        -Complex64::from_polar((theta / 2.0).cos(), -phi),
    ]
}

/// Dicke coefficients of `sum_perm |chi_1> ... |chi_N>`.
///
/// Its Majorana polynomial is `N! prod_n (chi_n0 + chi_n1 alpha)`, so the
/// Dicke coefficients are `N! e_k / d_k` with `e_k` the coefficients of that
/// product.
fn symmetrized_product(chis: &[[Complex64; 2]]) -> Vec<Complex64> {
    let n = chis.len();
    let w = dicke_weights(n).expect("n >= 1");
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for chi in chis {
        let mut next = vec![Complex64::new(0.0, 0.0); e.len() + 1];
        for (i, a) in e.iter().enumerate() {
            next[i] += a * chi[0];
            next[i + 1] += a * chi[1];
        }
        e = next;
    }
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    e.iter()
        .zip(w.values())
        .map(|(x, d)| x * factorial / d)
        .collect()
}

pub fn product_form(s: &SymmetricState) -> Result<ProductForm> {
    if s.norm() == 0.0 {
        return Err(Error::ZeroState);
    }
    let roots = majorana_roots(&majorana_polynomial(s), DEFAULT_CLUSTER_TOL)?;
    let chis: Vec<[Complex64; 2]> = roots.expanded().iter().map(chi_for_root).collect();
    let p = symmetrized_product(&chis);
    let pp: f64 = p.iter().map(|x| x.norm_sqr()).sum();
    let ps: Complex64 = p.iter().zip(s.dicke()).map(|(x, y)| x.conj() * y).sum();
    Ok(ProductForm { a: ps / pp, chis })
}

/// Image of the roots under the Mobius map induced by `G`:
/// `alpha -> (a alpha - b) / (f - d alpha)`.
pub fn mobius_on_roots(g: &CollectiveMap, r: &RootMultiset) -> RootMultiset {
    let m = g.root_mobius();
    RootMultiset {
        n_qubits: r.n_qubits,
        roots: r.roots.iter().map(|(z, k)| (z.mobius(m), *k)).collect(),
    }
}
