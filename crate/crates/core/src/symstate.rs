//! Symmetric states in the Dicke basis, single-qubit nodes, and collective
//! maps `G (x) G (x) ... (x) G`.

use crate::error::{Error, Result};
use crate::sphere::{wrap_angle, Extended};
use num_complex::Complex64;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Odd or even number of qubits; the decomposition differs between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n_qubits: usize) -> Self {
        if n_qubits % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        }
    }
}

/// `binomial(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round().max(acc)
}

/// `d_{N,k} = sqrt(binomial(N, k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeWeights {
    values: Vec<f64>,
}

impl DickeWeights {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn n_qubits(&self) -> usize {
        self.values.len() - 1
    }
}

pub fn dicke_weights(n_qubits: usize) -> Result<DickeWeights> {
    if n_qubits == 0 {
        return Err(Error::InvalidInput("number of qubits must be positive".into()));
    }
    Ok(DickeWeights {
        values: (0..=n_qubits).map(|k| binomial(n_qubits, k).sqrt()).collect(),
    })
}

/// A permutation-symmetric state of `N` qubits, `sum_k c_k |D_k>`, where `k`
/// counts the qubits in `|1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricState {
    dicke: Vec<Complex64>,
}

impl SymmetricState {
    pub fn new(dicke: Vec<Complex64>) -> Result<Self> {
        if dicke.len() < 2 {
            return Err(Error::InvalidInput(
                "a symmetric state needs at least one qubit (two Dicke amplitudes)".into(),
            ));
        }
        if dicke.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("Dicke amplitudes must be finite".into()));
        }
        Ok(SymmetricState { dicke })
    }

    /// The Dicke state with `k` excitations.
    pub fn dicke_basis(n_qubits: usize, k: usize) -> Result<Self> {
        if k > n_qubits {
            return Err(Error::InvalidInput(format!(
                "Dicke index {k} out of range for N={n_qubits}"
            )));
        }
        let mut v = vec![ZERO; n_qubits + 1];
        v[k] = ONE;
        SymmetricState::new(v)
    }

    /// `(|0...0> + |1...1>)/sqrt(2)`.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut v = vec![ZERO; n_qubits + 1];
        v[0] = h;
        v[n_qubits] = h;
        SymmetricState::new(v)
    }

    pub fn n_qubits(&self) -> usize {
        self.dicke.len() - 1
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.n_qubits())
    }

    pub fn dicke(&self) -> &[Complex64] {
        &self.dicke
    }

    pub fn norm(&self) -> f64 {
        self.dicke.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm without touching the global phase. Returns the
    /// state and the norm that was divided out.
    pub fn rescaled(&self) -> Result<(SymmetricState, f64)> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroState);
        }
        let dicke = self.dicke.iter().map(|c| c / n).collect();
        Ok((SymmetricState { dicke }, n))
    }

    /// Unit norm, and the first non-negligible Dicke amplitude made real
    /// positive.
    pub fn normalize(&self) -> Result<SymmetricState> {
        let (s, _) = self.rescaled()?;
        let max = s.dicke.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let lead = s
            .dicke
            .iter()
            .find(|c| c.norm() > 1e-12 * max)
            .copied()
            .ok_or(Error::ZeroState)?;
        let phase = lead.conj() / lead.norm();
        Ok(SymmetricState {
            dicke: s.dicke.iter().map(|c| c * phase).collect(),
        })
    }

    pub(crate) fn from_raw(dicke: Vec<Complex64>) -> Self {
        SymmetricState { dicke }
    }
}

/// `sum_k conj(c1_k) c2_k`.
pub fn overlap(s1: &SymmetricState, s2: &SymmetricState) -> Result<Complex64> {
    if s1.n_qubits() != s2.n_qubits() {
        return Err(Error::QubitMismatch {
            left: s1.n_qubits(),
            right: s2.n_qubits(),
        });
    }
    Ok(s1
        .dicke
        .iter()
        .zip(&s2.dicke)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// `|<s1|s2>|^2 / (<s1|s1><s2|s2>)`.
pub fn fidelity(s1: &SymmetricState, s2: &SymmetricState) -> Result<f64> {
    let o = overlap(s1, s2)?;
    let n = s1.norm() * s2.norm();
    if n == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(o.norm_sqr() / (n * n))
}

/// A single-qubit state `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`, or the
/// south pole `|1>` held as its own variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeState {
    Point { theta: f64, phi: f64 },
    Infinity,
}

impl NodeState {
    /// `theta` in `[0, pi]`; `theta = pi` gives the point at infinity.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidInput(format!(
                "node angles out of range: theta={theta}, phi={phi}"
            )));
        }
        if theta == PI {
            return Ok(NodeState::Infinity);
        }
        let phi = if theta == 0.0 { 0.0 } else { wrap_angle(phi) };
        Ok(NodeState::Point { theta, phi })
    }

    pub fn north() -> Self {
        NodeState::Point {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn from_beta(beta: Extended) -> Self {
        match beta {
            Extended::Infinity => NodeState::Infinity,
            Extended::Finite(_) => {
                let (theta, phi) = beta.angles();
                NodeState::Point { theta, phi }
            }
        }
    }

    /// Splits an arbitrary nonzero spinor as `kappa * spinor(node)`.
    pub fn from_spinor(v: [Complex64; 2]) -> Result<(NodeState, Complex64)> {
        let r = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::ZeroState);
        }
        let a0 = v[0].norm();
        if a0 == 0.0 || a0 <= 1e-300 * r {
            return Ok((NodeState::Infinity, v[1]));
        }
        let theta = 2.0 * v[1].norm().atan2(a0);
        if theta >= PI {
            return Ok((NodeState::Infinity, v[1]));
        }
        let phi = if v[1].norm() == 0.0 {
            0.0
        } else {
            wrap_angle((v[1] / v[0]).arg())
        };
        let kappa = v[0] / a0 * r;
        Ok((NodeState::Point { theta, phi }, kappa))
    }

    pub fn angles(&self) -> (f64, f64) {
        match self {
            NodeState::Point { theta, phi } => (*theta, *phi),
            NodeState::Infinity => (PI, 0.0),
        }
    }

    /// `beta = e^{i phi} tan(theta/2)`.
    pub fn beta(&self) -> Extended {
        match self {
            NodeState::Point { theta, phi } => Extended::from_angles(*theta, *phi),
            NodeState::Infinity => Extended::Infinity,
        }
    }

    pub fn spinor(&self) -> [Complex64; 2] {
        match self {
            NodeState::Point { theta, phi } => [
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), *phi),
            ],
            NodeState::Infinity => [ZERO, ONE],
        }
    }

    /// The orthogonal single-qubit state.
    pub fn antipode(&self) -> Self {
        match self {
            NodeState::Infinity => NodeState::north(),
            NodeState::Point { theta, phi } => {
                if *theta == 0.0 {
                    NodeState::Infinity
                } else {
                    NodeState::Point {
                        theta: PI - theta,
                        phi: wrap_angle(phi + PI),
                    }
                }
            }
        }
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (t, p) = self.angles();
        [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
    }

    /// `<self|other>` for the single-qubit states.
    pub fn overlap(&self, other: &NodeState) -> Complex64 {
        let a = self.spinor();
        let b = other.spinor();
        a[0].conj() * b[0] + a[1].conj() * b[1]
    }

    pub fn chordal(&self, other: &NodeState) -> f64 {
        self.beta().chordal(&other.beta())
    }

    /// Image under `G`: returns the new node and `kappa` with
    /// `G spinor(self) = kappa spinor(node)`.
    pub fn transform(&self, g: &CollectiveMap) -> (NodeState, Complex64) {
        // G is invertible so the image spinor is nonzero.
        NodeState::from_spinor(g.apply_spinor(self.spinor())).expect("invertible map")
    }
}

/// Which group a collective map is declared to belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Unitary,
    Special,
    General,
}

/// A 2x2 complex matrix `[[a, b], [d, f]]` applied to every qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveMap {
    m: [[Complex64; 2]; 2],
    kind: MapKind,
}

const KIND_TOL: f64 = 1e-12;

impl CollectiveMap {
    pub fn new(a: Complex64, b: Complex64, d: Complex64, f: Complex64) -> Result<Self> {
        let g = CollectiveMap {
            m: [[a, b], [d, f]],
            kind: MapKind::General,
        };
        let det = g.det();
        let scale = [a, b, d, f].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !scale.is_finite() || det.norm() <= 1e-14 * scale || det.norm() == 0.0 {
            return Err(Error::SingularMap);
        }
        Ok(g)
    }

    /// A unitary map; fails unless `G^dagger G = I` within `1e-12`.
    pub fn unitary(a: Complex64, b: Complex64, d: Complex64, f: Complex64) -> Result<Self> {
        let mut g = CollectiveMap::new(a, b, d, f)?;
        if !g.is_unitary(KIND_TOL) {
            return Err(Error::InvalidInput("matrix is not unitary".into()));
        }
        g.kind = MapKind::Unitary;
        Ok(g)
    }

    /// A unit-determinant map; fails unless `|af - bd - 1| < 1e-12`.
    pub fn special(a: Complex64, b: Complex64, d: Complex64, f: Complex64) -> Result<Self> {
        let mut g = CollectiveMap::new(a, b, d, f)?;
        if !g.is_special(KIND_TOL) {
            return Err(Error::InvalidInput("determinant is not one".into()));
        }
        g.kind = MapKind::Special;
        Ok(g)
    }

    pub fn identity() -> Self {
        CollectiveMap {
            m: [[ONE, ZERO], [ZERO, ONE]],
            kind: MapKind::Unitary,
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn is_special(&self, tol: f64) -> bool {
        (self.det() - ONE).norm() < tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let m = self.m;
        for i in 0..2 {
            for j in 0..2 {
                let e: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let target = if i == j { ONE } else { ZERO };
                if (e - target).norm() >= tol {
                    return false;
                }
            }
        }
        true
    }

    /// `self * rhs`, i.e. `rhs` acts first.
    pub fn compose(&self, rhs: &CollectiveMap) -> CollectiveMap {
        let a = self.m;
        let b = rhs.m;
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        let kind = match (self.kind, rhs.kind) {
            (MapKind::Unitary, MapKind::Unitary) => MapKind::Unitary,
            (MapKind::General, _) | (_, MapKind::General) => MapKind::General,
            _ => {
                let g = CollectiveMap {
                    m,
                    kind: MapKind::General,
                };
                if g.is_special(KIND_TOL) {
                    MapKind::Special
                } else {
                    MapKind::General
                }
            }
        };
        CollectiveMap { m, kind }
    }

    pub fn inverse(&self) -> CollectiveMap {
        let det = self.det();
        let m = self.m;
        CollectiveMap {
            m: [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]],
            kind: self.kind,
        }
    }

    pub fn apply_spinor(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// The Mobius map on node coordinates `beta`:
    /// `beta -> (d + f beta) / (a + b beta)`.
    pub fn node_mobius(&self) -> [[Complex64; 2]; 2] {
        let [[a, b], [d, f]] = self.m;
        [[f, d], [b, a]]
    }

    /// The Mobius map on Majorana roots: `alpha -> (a alpha - b) / (f - d alpha)`.
    pub fn root_mobius(&self) -> [[Complex64; 2]; 2] {
        let [[a, b], [d, f]] = self.m;
        [[a, -b], [-d, f]]
    }
}

/// `|phi>^{(x)N}` expanded in the Dicke basis:
/// `c_k = d_k cos(theta/2)^{N-k} (e^{i phi} sin(theta/2))^k`.
pub fn coherent_state(n_qubits: usize, node: &NodeState) -> Result<SymmetricState> {
    let w = dicke_weights(n_qubits)?;
    Ok(SymmetricState::from_raw(coherent_dicke(&w, node.spinor())))
}

pub(crate) fn coherent_dicke(w: &DickeWeights, spinor: [Complex64; 2]) -> Vec<Complex64> {
    let n = w.n_qubits();
    let [x, y] = spinor;
    // Powers are accumulated so that x = 0 or y = 0 give exact zeros.
    let mut xp = vec![ONE; n + 1];
    let mut yp = vec![ONE; n + 1];
    for k in 1..=n {
        xp[k] = xp[k - 1] * x;
        yp[k] = yp[k - 1] * y;
    }
    (0..=n).map(|k| xp[n - k] * yp[k] * w.get(k)).collect()
}

/// Dicke coefficients of `G^{(x)N} |s>`.
///
/// Works on the binary form `F(u, v) = sum_k lambda_k u^{N-k} v^k` with
/// `lambda_k = d_k c_k`; the image is `F(a u + d v, b u + f v)`. When
/// `renormalize` is set the result has unit norm. The second value is always
/// the norm of the exact image.
pub fn apply_collective(
    g: &CollectiveMap,
    s: &SymmetricState,
    renormalize: bool,
) -> (SymmetricState, f64) {
    let n = s.n_qubits();
    let w = dicke_weights(n).expect("n >= 1");
    let [[a, b], [d, f]] = g.m;
    let lambda: Vec<Complex64> = (0..=n).map(|k| s.dicke[k] * w.get(k)).collect();

    // Powers of A(t) = a + d t.
    let mut apow: Vec<Vec<Complex64>> = Vec::with_capacity(n + 1);
    apow.push(vec![ONE]);
    for j in 1..=n {
        let prev = &apow[j - 1];
        let mut next = vec![ZERO; j + 1];
        for (i, p) in prev.iter().enumerate() {
            next[i] += p * a;
            next[i + 1] += p * d;
        }
        apow.push(next);
    }

    // Horner in B(t) = b + f t: R_k = R_{k+1} B + lambda_k A^{N-k}.
    let mut r = vec![ZERO; n + 1];
    r[0] = lambda[n];
    let mut deg = 0usize;
    for k in (0..n).rev() {
        let mut next = vec![ZERO; n + 1];
        for i in 0..=deg {
            next[i] += r[i] * b;
            next[i + 1] += r[i] * f;
        }
        for (i, p) in apow[n - k].iter().enumerate() {
            next[i] += lambda[k] * p;
        }
        r = next;
        deg = n - k;
    }

    let dicke: Vec<Complex64> = (0..=n).map(|k| r[k] / w.get(k)).collect();
    let image = SymmetricState::from_raw(dicke);
    let norm = image.norm();
    if renormalize && norm > 0.0 {
        let dicke = image.dicke.iter().map(|c| c / norm).collect();
        (SymmetricState::from_raw(dicke), norm)
    } else {
        (image, norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weights_small_cases() {
        let w2 = dicke_weights(2).unwrap();
        assert_eq!(w2.values(), &[1.0, 2f64.sqrt(), 1.0]);
        let w3 = dicke_weights(3).unwrap();
        assert!((w3.get(1) - 3f64.sqrt()).abs() < 1e-15);
        assert!((w3.get(2) - 3f64.sqrt()).abs() < 1e-15);
        let w6 = dicke_weights(6).unwrap();
        assert!((w6.get(3) - 20f64.sqrt()).abs() < 1e-14);
        assert!(matches!(dicke_weights(0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn coherent_state_poles_and_equator() {
        let up = coherent_state(3, &NodeState::north()).unwrap();
        assert_eq!(up.dicke(), &[ONE, ZERO, ZERO, ZERO]);
        let down = coherent_state(3, &NodeState::Infinity).unwrap();
        assert_eq!(down.dicke(), &[ZERO, ZERO, ZERO, ONE]);
        let plus = coherent_state(2, &NodeState::new(PI / 2.0, 0.0).unwrap()).unwrap();
        let expect = [0.5, FRAC_1_SQRT_2, 0.5];
        for (got, e) in plus.dicke().iter().zip(expect) {
            assert!((got - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn overlap_cases() {
        let s = SymmetricState::ghz(3).unwrap();
        assert!((overlap(&s, &s).unwrap() - ONE).norm() < 1e-15);
        let a = SymmetricState::dicke_basis(3, 0).unwrap();
        let b = SymmetricState::dicke_basis(3, 3).unwrap();
        assert_eq!(overlap(&a, &b).unwrap(), ZERO);
        let eq = coherent_state(3, &NodeState::new(PI / 2.0, 0.0).unwrap()).unwrap();
        let o = overlap(&a, &eq).unwrap();
        assert!((o - c(FRAC_1_SQRT_2.powi(3), 0.0)).norm() < 1e-15);
        let other = SymmetricState::ghz(4).unwrap();
        assert!(matches!(
            overlap(&s, &other),
            Err(Error::QubitMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn collective_identity_and_flip() {
        let s = SymmetricState::new(vec![c(0.1, 0.2), c(-0.4, 0.3), c(0.5, 0.0), c(0.0, -0.6)])
            .unwrap();
        let (same, _) = apply_collective(&CollectiveMap::identity(), &s, false);
        for (x, y) in same.dicke().iter().zip(s.dicke()) {
            assert!((x - y).norm() < 1e-15);
        }
        let flip = CollectiveMap::special(ZERO, ONE, -ONE, ZERO).unwrap();
        let (img, norm) = apply_collective(&flip, &SymmetricState::dicke_basis(3, 0).unwrap(), false);
        assert!((norm - 1.0).abs() < 1e-15);
        assert!((img.dicke()[3] + ONE).norm() < 1e-15);
        for k in 0..3 {
            assert_eq!(img.dicke()[k], ZERO);
        }
    }

    #[test]
    fn single_qubit_action_matches_matrix() {
        let g = CollectiveMap::new(c(1.0, 0.5), c(-0.3, 0.2), c(0.7, -1.1), c(0.4, 0.0)).unwrap();
        let s = SymmetricState::new(vec![c(0.3, -0.2), c(0.1, 0.9)]).unwrap();
        let (img, _) = apply_collective(&g, &s, false);
        let direct = g.apply_spinor([s.dicke()[0], s.dicke()[1]]);
        assert!((img.dicke()[0] - direct[0]).norm() < 1e-15);
        assert!((img.dicke()[1] - direct[1]).norm() < 1e-15);
    }

    #[test]
    fn map_validation() {
        assert!(matches!(
            CollectiveMap::new(ONE, ONE, ONE, ONE),
            Err(Error::SingularMap)
        ));
        assert!(CollectiveMap::special(c(2.0, 0.0), ZERO, ZERO, c(0.5, 0.0)).is_ok());
        assert!(CollectiveMap::unitary(c(2.0, 0.0), ZERO, ZERO, c(0.5, 0.0)).is_err());
        let u = CollectiveMap::unitary(ZERO, ONE, ONE, ZERO).unwrap();
        assert_eq!(u.kind(), MapKind::Unitary);
        assert!((u.det() + ONE).norm() < 1e-15);
    }

    #[test]
    fn node_spinor_round_trip() {
        let node = NodeState::new(1.2, 5.5).unwrap();
        let k = c(0.3, -2.0);
        let v = node.spinor();
        let (back, kappa) = NodeState::from_spinor([v[0] * k, v[1] * k]).unwrap();
        assert!(back.chordal(&node) < 1e-14);
        assert!((kappa - k).norm() < 1e-14);
        let (inf, kappa) = NodeState::from_spinor([ZERO, c(0.0, 2.0)]).unwrap();
        assert_eq!(inf, NodeState::Infinity);
        assert_eq!(kappa, c(0.0, 2.0));
        assert_eq!(NodeState::new(PI, 3.0).unwrap(), NodeState::Infinity);
        assert!(NodeState::new(4.0, 0.0).is_err());
    }

    #[test]
    fn antipode_is_orthogonal() {
        for node in [
            NodeState::new(0.7, 2.0).unwrap(),
            NodeState::north(),
            NodeState::Infinity,
        ] {
            assert!(node.overlap(&node.antipode()).norm() < 1e-15);
        }
    }

    #[test]
    fn normalize_fixes_phase() {
        let s = SymmetricState::new(vec![ZERO, c(0.0, 2.0), c(-2.0, 0.0)]).unwrap();
        let n = s.normalize().unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-15);
        assert!(n.dicke()[1].im.abs() < 1e-15 && n.dicke()[1].re > 0.0);
        let z = SymmetricState::new(vec![ZERO, ZERO]).unwrap();
        assert_eq!(z.normalize(), Err(Error::ZeroState));
    }
}
