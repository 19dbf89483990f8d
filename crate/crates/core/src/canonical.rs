//! Local-unitary and SL(2,C) canonical forms.
//!
//! Both reductions start from the coherent decomposition and move its leading
//! nodes onto the poles. What is left over is a finite set of discrete
//! choices (N-th roots of unity, and the labeling of two equal-weight terms);
//! every choice is enumerated and the lexicographically smallest parameter
//! vector is returned.
//!
//! The SL(2,C) forms are computed from the balanced representative of the
//! orbit, the state of least norm reachable by positive collective maps. It is
//! unique up to a collective unitary, so the term ordering of its
//! decomposition does not depend on where in the orbit the input sat.

use crate::decomp::{decompose_with, CoherentDecomposition, DecomposeOptions, Term};
use crate::error::{Error, Result};
use crate::majorana;
use crate::sphere::{circular_distance, wrap_angle, Extended};
use crate::symstate::{
    apply_collective, coherent_dicke, dicke_weights, fidelity, CollectiveMap, NodeState, Parity,
    SymmetricState,
};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance used when ordering candidate forms.
const SELECT_TOL: f64 = 1e-7;
/// Largest accepted fidelity deficit between the mapped state and the form.
const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceMode {
    LU,
    IL,
}

/// `A (|1...1> + y_1 |X_1> + sum_{m>=2} y_m e^{i l_m} |X_m>)`, with
/// `|X_1> = |0...0>` when the decomposition carries an orthogonal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LUCanonicalForm {
    n_qubits: usize,
    amplitude: f64,
    paired: bool,
    y: Vec<f64>,
    phases: Vec<f64>,
    nodes: Vec<NodeState>,
}

/// `(y, epsilon, phi)` of a three-qubit form `A(|111> + y |chi chi chi>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeQubitParams {
    pub y: f64,
    pub epsilon: f64,
    pub phi: f64,
}

impl LUCanonicalForm {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.n_qubits)
    }

    /// Positive normalization `A`.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Whether the second term is the antipodal `|0...0>`.
    pub fn is_paired(&self) -> bool {
        self.paired
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// `l_m` for `m >= 2`.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// `X_m` for `m >= 1`, or `m >= 2` in the paired case.
    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    /// Real parameters excluding `A`: the `y` list, the phases, then
    /// `(theta, phi)` of each node. A generic form has `2N - 3` of them.
    pub fn parameters(&self) -> Vec<f64> {
        let mut v = self.y.clone();
        v.extend(&self.phases);
        for n in &self.nodes {
            let (t, p) = n.angles();
            v.push(t);
            v.push(p);
        }
        v
    }

    /// The parametrization `(y, epsilon, phi)` of a three-qubit form with two
    /// terms.
    pub fn three_qubit(&self) -> Option<ThreeQubitParams> {
        if self.n_qubits != 3 || self.y.len() != 1 {
            return None;
        }
        let (epsilon, phi) = self.nodes[0].angles();
        Some(ThreeQubitParams {
            y: self.y[0],
            epsilon,
            phi,
        })
    }

    fn terms(&self) -> Vec<(Complex64, NodeState)> {
        let mut out = vec![(ONE, NodeState::Infinity)];
        if self.y.is_empty() {
            return out;
        }
        let first = if self.paired {
            NodeState::north()
        } else {
            self.nodes[0]
        };
        out.push((Complex64::new(self.y[0], 0.0), first));
        let rest = if self.paired {
            &self.nodes[..]
        } else {
            &self.nodes[1..]
        };
        for ((y, l), node) in self.y[1..].iter().zip(&self.phases).zip(rest) {
            out.push((Complex64::from_polar(*y, *l), *node));
        }
        out
    }

    /// The canonical state itself.
    pub fn to_state(&self) -> SymmetricState {
        build_state(self.n_qubits, &self.terms())
    }

    fn key(&self) -> Vec<Entry> {
        let mut k = vec![Entry::Mag(self.amplitude)];
        k.extend(self.y.iter().map(|y| Entry::Mag(*y)));
        k.extend(self.phases.iter().map(|p| Entry::Phase(*p)));
        k.extend(self.nodes.iter().map(|n| Entry::Node(*n)));
        k
    }

    /// Parameter-wise comparison: relative `tol` on magnitudes, absolute
    /// `tol` on phases (on the circle) and on node positions (chordal).
    pub fn approx_eq(&self, other: &LUCanonicalForm, tol: f64) -> bool {
        self.n_qubits == other.n_qubits
            && self.paired == other.paired
            && keys_match(&self.key(), &other.key(), tol)
    }
}

/// Inputs of the parametric relation between `c` and `lambda` for even `N`:
/// the pair node `(theta_0, phi_0)`, the third node `(theta_2, phi_2)` and the
/// N-th roots `r_1`, `r_2` of `c_1/c_0` and `c_2/c_0` used by the reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricInputs {
    pub theta0: f64,
    pub phi0: f64,
    pub theta2: f64,
    pub phi2: f64,
    pub r1: Complex64,
    pub r2: Complex64,
}

impl ParametricInputs {
    /// `(c, lambda)` predicted by the relation
    /// `c = e^{i phi_0} r_1 / (r_2 E_1)`,
    /// `lambda = (sqrt(1 + |c|^2) E_1 / (r_1 E_2))^N`.
    pub fn predict(&self, n_qubits: usize) -> (Complex64, Complex64) {
        let (s0, c0) = (self.theta0 / 2.0).sin_cos();
        let (s2, c2) = (self.theta2 / 2.0).sin_cos();
        let e0 = Complex64::from_polar(1.0, self.phi0);
        let e2 = Complex64::from_polar(1.0, self.phi2);
        let big1 = e0 * s0 * c2 - e2 * c0 * s2;
        let big2 = e0 * c0 * c2 + e2 * s0 * s2;
        let c = e0 * self.r1 / (self.r2 * big1);
        let lambda = ((1.0 + c.norm_sqr()).sqrt() * big1 / (self.r1 * big2)).powi(n_qubits as i32);
        (c, lambda)
    }
}

/// Odd `N`: `A(|0...0> + |1...1> + sum_{m>=2} lambda_m e^{i xi_m} |Xi_m>)`.
/// Even `N` with an orthogonal pair and at least three terms:
/// `A(|0...0> + |1...1> + lambda |c...c> + sum_{m>=3} lambda_m e^{i xi_m} |Xi_m>)`
/// with `|c> = (|0> + c|1>)/sqrt(1+|c|^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ILCanonicalForm {
    n_qubits: usize,
    amplitude: f64,
    pair: Option<(Extended, Complex64)>,
    lambdas: Vec<f64>,
    xis: Vec<f64>,
    nodes: Vec<NodeState>,
    relation: Option<ParametricInputs>,
}

impl ILCanonicalForm {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.n_qubits)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `c` of the even form.
    pub fn c(&self) -> Option<Extended> {
        self.pair.map(|p| p.0)
    }

    /// `lambda` of the even form.
    pub fn lambda(&self) -> Option<Complex64> {
        self.pair.map(|p| p.1)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn xis(&self) -> &[f64] {
        &self.xis
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn relation_inputs(&self) -> Option<ParametricInputs> {
        self.relation
    }

    /// Largest deviation of `(c, lambda)` from the parametric relation,
    /// relative to the size of each quantity.
    pub fn relation_residual(&self) -> Option<f64> {
        let inputs = self.relation?;
        let (c, lambda) = self.pair?;
        let (pc, pl) = inputs.predict(self.n_qubits);
        let c = c.as_finite()?;
        let rc = (pc - c).norm() / c.norm().max(1.0);
        let rl = (pl - lambda).norm() / lambda.norm().max(1.0);
        Some(rc.max(rl))
    }

    /// All real parameters excluding `A`, in the order `lambda` magnitudes,
    /// phases, node angles. For even forms `c` and `lambda` come first as
    /// `(Re c, Im c, |lambda|, arg lambda)`.
    pub fn parameters(&self) -> Vec<f64> {
        let mut v = Vec::new();
        if let Some((c, lambda)) = self.pair {
            let c = c.as_finite().unwrap_or(Complex64::new(f64::INFINITY, 0.0));
            v.extend([c.re, c.im, lambda.norm(), wrap_angle(lambda.arg())]);
        }
        v.extend(&self.lambdas);
        v.extend(&self.xis);
        for n in &self.nodes {
            let (t, p) = n.angles();
            v.push(t);
            v.push(p);
        }
        v
    }

    /// Parameters left after the parametric relation removes two of the
    /// even-form values; `2N - 6` for a generic state.
    pub fn independent_parameter_count(&self) -> usize {
        self.parameters().len() - if self.pair.is_some() { 2 } else { 0 }
    }

    fn terms(&self) -> Vec<(Complex64, NodeState)> {
        let mut out = vec![(ONE, NodeState::north()), (ONE, NodeState::Infinity)];
        if let Some((c, lambda)) = self.pair {
            out.push((lambda, NodeState::from_beta(c)));
        }
        for ((l, x), node) in self.lambdas.iter().zip(&self.xis).zip(&self.nodes) {
            out.push((Complex64::from_polar(*l, *x), *node));
        }
        out
    }

    pub fn to_state(&self) -> SymmetricState {
        build_state(self.n_qubits, &self.terms())
    }

    fn key(&self) -> Vec<Entry> {
        let mut k = vec![Entry::Mag(self.amplitude)];
        if let Some((_, lambda)) = self.pair {
            k.push(Entry::Mag(lambda.norm()));
        }
        k.extend(self.lambdas.iter().map(|l| Entry::Mag(*l)));
        if let Some((_, lambda)) = self.pair {
            k.push(Entry::Phase(wrap_angle(lambda.arg())));
        }
        k.extend(self.xis.iter().map(|x| Entry::Phase(*x)));
        if let Some((c, _)) = self.pair {
            k.push(Entry::Node(NodeState::from_beta(c)));
        }
        k.extend(self.nodes.iter().map(|n| Entry::Node(*n)));
        k
    }

    pub fn approx_eq(&self, other: &ILCanonicalForm, tol: f64) -> bool {
        self.n_qubits == other.n_qubits
            && self.pair.is_some() == other.pair.is_some()
            && keys_match(&self.key(), &other.key(), tol)
    }
}

fn build_state(n: usize, terms: &[(Complex64, NodeState)]) -> SymmetricState {
    let w = dicke_weights(n).expect("n >= 1");
    let mut acc = vec![ZERO; n + 1];
    for (coeff, node) in terms {
        for (a, v) in acc.iter_mut().zip(coherent_dicke(&w, node.spinor())) {
            *a += coeff * v;
        }
    }
    let s = SymmetricState::new(acc).expect("finite terms");
    s.rescaled().map(|(u, _)| u).unwrap_or(s)
}

#[derive(Debug, Clone, Copy)]
enum Entry {
    Mag(f64),
    Phase(f64),
    Node(NodeState),
}

fn entry_cmp(a: &Entry, b: &Entry, tol: f64) -> Ordering {
    let by_value = |x: f64, y: f64, close: bool| {
        if close {
            Ordering::Equal
        } else {
            x.total_cmp(&y)
        }
    };
    match (a, b) {
        (Entry::Mag(x), Entry::Mag(y)) => by_value(*x, *y, mag_close(*x, *y, tol)),
        (Entry::Phase(x), Entry::Phase(y)) => by_value(*x, *y, circular_distance(*x, *y) <= tol),
        (Entry::Node(x), Entry::Node(y)) => {
            if x.chordal(y) <= tol {
                return Ordering::Equal;
            }
            let (tx, px) = x.angles();
            let (ty, py) = y.angles();
            by_value(tx, ty, (tx - ty).abs() <= tol).then(by_value(
                px,
                py,
                circular_distance(px, py) <= tol,
            ))
        }
        _ => Ordering::Equal,
    }
}

fn mag_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()) || (x - y).abs() <= 1e-12
}

fn lex_cmp(a: &[Entry], b: &[Entry], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = entry_cmp(x, y, tol);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

fn keys_match(a: &[Entry], b: &[Entry], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| match (x, y) {
            (Entry::Mag(x), Entry::Mag(y)) => mag_close(*x, *y, tol),
            (Entry::Phase(x), Entry::Phase(y)) => circular_distance(*x, *y) <= tol,
            (Entry::Node(x), Entry::Node(y)) => x.chordal(y) <= tol,
            _ => false,
        })
}

/// Pins near-polar nodes to the pole and azimuths just below `2pi` to zero,
/// so that equal forms sort identically.
fn snap_node(n: NodeState) -> NodeState {
    match n {
        NodeState::Infinity => n,
        NodeState::Point { theta, phi } => {
            if theta < 1e-7 {
                NodeState::north()
            } else if PI - theta < 1e-7 {
                NodeState::Infinity
            } else {
                NodeState::Point {
                    theta,
                    phi: snap_phase(phi),
                }
            }
        }
    }
}

fn snap_phase(p: f64) -> f64 {
    let p = wrap_angle(p);
    if 2.0 * PI - p < 1e-9 {
        0.0
    } else {
        p
    }
}

/// Unit-norm copy of `s` and its decomposition.
fn decompose_unit(s: &SymmetricState) -> Result<(SymmetricState, CoherentDecomposition)> {
    let (unit, _) = s.rescaled()?;
    let (d, _) = decompose_with(&unit, &DecomposeOptions::default())?;
    Ok((unit, d))
}

/// Term orders to try: the decomposition's own, plus the swapped order when
/// exactly two terms carry equal weight.
fn labelings(d: &CoherentDecomposition) -> Vec<Vec<Term>> {
    let terms = d.terms().to_vec();
    let mut out = vec![terms.clone()];
    if terms.len() >= 2 {
        let top = terms[0].coeff.norm();
        let nonzero = terms.iter().filter(|t| t.coeff.norm() > 1e-12 * top).count();
        if nonzero == 2 && top - terms[1].coeff.norm() <= 1e-9 * top {
            let mut swapped = terms;
            swapped.swap(0, 1);
            out.push(swapped);
        }
    }
    out
}

fn transform_terms(terms: &[Term], g: &CollectiveMap, n: usize) -> Vec<Term> {
    terms
        .iter()
        .map(|t| {
            let (node, kappa) = t.node.transform(g);
            Term {
                coeff: t.coeff * kappa.powi(n as i32),
                node,
            }
        })
        .collect()
}

/// The special unitary sending `node` to the south pole:
/// `i [[-y, x], [conj x, conj y]]` for the spinor `(x, y)`.
fn to_south(node: &NodeState) -> CollectiveMap {
    let [x, y] = node.spinor();
    CollectiveMap::unitary(-I * y, I * x, I * x.conj(), I * y.conj()).expect("unit spinor")
}

fn rz(psi: f64) -> CollectiveMap {
    let h = Complex64::from_polar(1.0, psi / 2.0);
    CollectiveMap::unitary(h.conj(), ZERO, ZERO, h).expect("diagonal phase")
}

fn check_mapped(
    g: &CollectiveMap,
    unit: &SymmetricState,
    form_state: &SymmetricState,
    what: &str,
) -> Result<()> {
    let (mapped, _) = apply_collective(g, unit, true);
    let deficit = 1.0 - fidelity(&mapped, form_state)?;
    if !(deficit <= CHECK_TOL) {
        return Err(Error::SolverFailure {
            residual: deficit,
            detail: format!("{what} reduction does not reproduce the state"),
        });
    }
    Ok(())
}

fn lu_candidates(s: &SymmetricState) -> Result<Vec<(LUCanonicalForm, CollectiveMap)>> {
    let n = s.n_qubits();
    let (_, d) = decompose_unit(s)?;
    let mut out = Vec::new();
    for terms in labelings(&d) {
        let u0 = to_south(&terms[0].node);
        let mut base = transform_terms(&terms, &u0, n);
        base[0].node = NodeState::Infinity;
        if base.len() == 1 {
            let form = LUCanonicalForm {
                n_qubits: n,
                amplitude: 1.0,
                paired: false,
                y: vec![],
                phases: vec![],
                nodes: vec![],
            };
            out.push((form, u0));
            continue;
        }
        let paired = d.is_paired();
        if paired {
            base[1].node = NodeState::north();
        }
        let delta = (base[1].coeff / base[0].coeff).arg();
        for j in 0..n {
            let psi = (delta + 2.0 * PI * j as f64) / n as f64;
            let g = rz(psi).compose(&u0);
            let mut t = transform_terms(&base, &rz(psi), n);
            t[0].node = NodeState::Infinity;
            if paired {
                t[1].node = NodeState::north();
            }
            let c0 = t[0].coeff;
            let amp = c0.norm();
            let y = t[1..].iter().map(|x| x.coeff.norm() / amp).collect();
            let phases = t[2..]
                .iter()
                .map(|x| snap_phase((x.coeff / c0).arg()))
                .collect();
            let skip = if paired { 2 } else { 1 };
            let nodes = t[skip..].iter().map(|x| snap_node(x.node)).collect();
            let form = LUCanonicalForm {
                n_qubits: n,
                amplitude: amp,
                paired,
                y,
                phases,
                nodes,
            };
            out.push((form, g));
        }
    }
    Ok(out)
}

fn pick<F, K: Fn(&F) -> Vec<Entry>>(mut c: Vec<(F, CollectiveMap)>, key: K) -> (F, CollectiveMap) {
    let mut best = 0;
    for i in 1..c.len() {
        if lex_cmp(&key(&c[i].0), &key(&c[best].0), SELECT_TOL) == Ordering::Less {
            best = i;
        }
    }
    c.swap_remove(best)
}

/// Reduces `s` to its LU canonical form. The returned unitary `U` satisfies
/// `U^{(x)N} |s> = e^{i g} |form>` for some global phase `g`.
pub fn lu_canonical(s: &SymmetricState) -> Result<(LUCanonicalForm, CollectiveMap)> {
    let (unit, _) = s.rescaled()?;
    let (form, u) = pick(lu_candidates(&unit)?, LUCanonicalForm::key);
    check_mapped(&u, &unit, &form.to_state(), "LU")?;
    Ok((form, u))
}

/// The collective-spin expectation `<J>` and covariance of `s`.
fn spin_moments(s: &SymmetricState) -> ([f64; 3], [[f64; 3]; 3]) {
    let n = s.n_qubits();
    let c = s.dicke();
    let mut jx = vec![ZERO; n + 1];
    let mut jy = vec![ZERO; n + 1];
    let mut jz = vec![ZERO; n + 1];
    for k in 0..=n {
        jz[k] = c[k] * (n as f64 / 2.0 - k as f64);
    }
    // J_- |k> = sqrt((N-k)(k+1)) |k+1>, J_+ the adjoint.
    for k in 0..n {
        let e = (((n - k) * (k + 1)) as f64).sqrt();
        let lower = c[k] * e;
        let raise = c[k + 1] * e;
        jx[k + 1] += lower * 0.5;
        jx[k] += raise * 0.5;
        jy[k + 1] += lower * Complex64::new(0.0, 0.5);
        jy[k] += raise * Complex64::new(0.0, -0.5);
    }
    let vs = [jx, jy, jz];
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };
    let mean: [f64; 3] = std::array::from_fn(|a| inner(c, &vs[a]).re);
    let cov: [[f64; 3]; 3] =
        std::array::from_fn(|a| std::array::from_fn(|b| inner(&vs[a], &vs[b]).re - mean[a] * mean[b]));
    (mean, cov)
}

fn solve3(m: [[f64; 3]; 3], v: [f64; 3]) -> Option<[f64; 3]> {
    let a = nalgebra::Matrix3::from_fn(|i, j| m[i][j]);
    let x = a.lu().solve(&nalgebra::Vector3::from(v))?;
    Some([x[0], x[1], x[2]])
}

/// `exp(t . sigma / 2)`, a positive unit-determinant matrix.
fn boost(t: [f64; 3]) -> CollectiveMap {
    let r = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    if r == 0.0 {
        return CollectiveMap::identity();
    }
    let (ch, sh) = ((r / 2.0).cosh(), (r / 2.0).sinh() / r);
    let a = Complex64::new(ch + sh * t[2], 0.0);
    let f = Complex64::new(ch - sh * t[2], 0.0);
    let b = Complex64::new(sh * t[0], -sh * t[1]);
    let d = Complex64::new(sh * t[0], sh * t[1]);
    let m = CollectiveMap::new(a, b, d, f).expect("boost is invertible");
    let [[a, b], [d, f]] = m.matrix();
    CollectiveMap::special(a, b, d, f).unwrap_or(m)
}

/// The least-norm point of the SL(2,C) orbit of `s`, normalized, and the map
/// reaching it. Newton's method on `log || exp(t.J) s ||^2`, whose gradient
/// is `2 <J>`, drives the collective spin expectation to zero.
pub fn balance(s: &SymmetricState) -> Result<(SymmetricState, CollectiveMap)> {
    let (mut cur, _) = s.rescaled()?;
    let n = s.n_qubits() as f64;
    let mut total = CollectiveMap::identity();
    for _ in 0..200 {
        let (mean, cov) = spin_moments(&cur);
        let size = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
        if size <= 1e-13 * n {
            return Ok((cur, total));
        }
        let unstable = || Error::SolverFailure {
            residual: size,
            detail: "state has no balanced representative in its SL(2,C) orbit".into(),
        };
        let step = solve3(cov, mean).ok_or_else(unstable)?;
        let mut t = [-step[0] / 2.0, -step[1] / 2.0, -step[2] / 2.0];
        let len = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
        if !len.is_finite() {
            return Err(unstable());
        }
        if len > 2.0 {
            t = [2.0 * t[0] / len, 2.0 * t[1] / len, 2.0 * t[2] / len];
        }
        let mut moved = false;
        for _ in 0..40 {
            let p = boost(t);
            let (next, norm) = apply_collective(&p, &cur, true);
            if norm < 1.0 {
                cur = next;
                total = p.compose(&total);
                moved = true;
                break;
            }
            t = [t[0] / 2.0, t[1] / 2.0, t[2] / 2.0];
        }
        if !moved {
            if size <= 1e-10 * n {
                return Ok((cur, total));
            }
            return Err(unstable());
        }
    }
    Err(Error::SolverFailure {
        residual: f64::NAN,
        detail: "balancing did not converge".into(),
    })
}

/// Principal `k`-th root.
fn root(z: Complex64, k: usize) -> Complex64 {
    Complex64::from_polar(z.norm().powf(1.0 / k as f64), z.arg() / k as f64)
}

fn det2(a: [Complex64; 2], b: [Complex64; 2]) -> Complex64 {
    a[0] * b[1] - a[1] * b[0]
}

/// `G` with `G^{-1}` having columns `u / p` and `v / q`.
fn from_columns(u: [Complex64; 2], p: Complex64, v: [Complex64; 2], q: Complex64) -> CollectiveMap {
    let inv = CollectiveMap::new(u[0] / p, v[0] / q, u[1] / p, v[1] / q).expect("distinct nodes");
    let [[a, b], [d, f]] = inv.inverse().matrix();
    CollectiveMap::special(a, b, d, f).unwrap_or_else(|_| CollectiveMap::new(a, b, d, f).expect("invertible"))
}

/// Sends the first two terms to `|0...0>` and `|1...1>` with equal
/// coefficients; one candidate per N-th root of unity.
fn two_pole_candidates(terms: &[Term], n: usize) -> Vec<(ILCanonicalForm, CollectiveMap)> {
    let s0 = terms[0].node.spinor();
    let s1 = terms[1].node.spinor();
    let dd = det2(s0, s1);
    // kappa_0^{2N} = (c_1 / c_0) D^N and kappa_0 kappa_1 = D.
    let ratio = terms[1].coeff / terms[0].coeff;
    let k0 = root(ratio, 2 * n) * root(dd, 2);
    let mut out = Vec::new();
    for j in 0..n {
        let kappa0 = k0 * Complex64::from_polar(1.0, PI * j as f64 / n as f64);
        let kappa1 = dd / kappa0;
        let g = from_columns(s0, kappa0, s1, kappa1);
        let lead = terms[0].coeff * kappa0.powi(n as i32);
        let mapped = transform_terms(&terms[2..], &g, n);
        let mut lambdas = Vec::new();
        let mut xis = Vec::new();
        let mut nodes = Vec::new();
        for t in &mapped {
            let r = t.coeff / lead;
            lambdas.push(r.norm());
            xis.push(snap_phase(r.arg()));
            nodes.push(snap_node(t.node));
        }
        out.push((
            finish_il(n, None, lambdas, xis, nodes, None),
            g,
        ));
    }
    out
}

/// Even reduction: `G |phi_0^perp> ~ |0>`, `G |phi_2> ~ |1>` with the
/// coefficients of both poles equal to `s`. One candidate per pair of N-th
/// roots of `c_1/c_0` and `c_2/c_0`.
fn paired_candidates(terms: &[Term], n: usize) -> Vec<(ILCanonicalForm, CollectiveMap)> {
    let (theta0, phi0) = terms[0].node.angles();
    let (theta2, phi2) = terms[2].node.angles();
    let (sn0, cs0) = (theta0 / 2.0).sin_cos();
    let perp = [Complex64::new(-sn0, 0.0), Complex64::from_polar(cs0, phi0)];
    let phi_2 = terms[2].node.spinor();
    let c1 = terms[1].coeff / terms[0].coeff;
    let c2 = terms[2].coeff / terms[0].coeff;
    let dm = det2(perp, phi_2);
    let mut out = Vec::new();
    for j1 in 0..n {
        for j2 in 0..n {
            let w1 = Complex64::from_polar(1.0, 2.0 * PI * j1 as f64 / n as f64);
            let w2 = Complex64::from_polar(1.0, 2.0 * PI * j2 as f64 / n as f64);
            let r1 = root(c1, n) * w1;
            let r2 = root(c2, n) * w2;
            let sigma = root(r1 * r2 * dm, 2);
            let g = from_columns(perp, sigma / r1, phi_2, sigma / r2);
            let s = sigma.powi(n as i32);
            let (cnode, kp) = terms[0].node.transform(&g);
            let c = snap_node(cnode).beta();
            let lambda = kp.powi(n as i32) / s;
            let mut lambdas = Vec::new();
            let mut xis = Vec::new();
            let mut nodes = Vec::new();
            for t in &terms[3..] {
                let (node, kappa) = t.node.transform(&g);
                let r = t.coeff / terms[0].coeff * kappa.powi(n as i32) / s;
                lambdas.push(r.norm());
                xis.push(snap_phase(r.arg()));
                nodes.push(snap_node(node));
            }
            let inputs = ParametricInputs {
                theta0,
                phi0,
                theta2,
                phi2,
                r1,
                r2,
            };
            out.push((
                finish_il(n, Some((c, lambda)), lambdas, xis, nodes, Some(inputs)),
                g,
            ));
        }
    }
    out
}

fn finish_il(
    n: usize,
    pair: Option<(Extended, Complex64)>,
    lambdas: Vec<f64>,
    xis: Vec<f64>,
    nodes: Vec<NodeState>,
    relation: Option<ParametricInputs>,
) -> ILCanonicalForm {
    let mut form = ILCanonicalForm {
        n_qubits: n,
        amplitude: 1.0,
        pair,
        lambdas,
        xis,
        nodes,
        relation,
    };
    let terms = form.terms();
    let w = dicke_weights(n).expect("n >= 1");
    let mut acc = vec![ZERO; n + 1];
    for (coeff, node) in &terms {
        for (a, v) in acc.iter_mut().zip(coherent_dicke(&w, node.spinor())) {
            *a += coeff * v;
        }
    }
    let norm = acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    form.amplitude = 1.0 / norm;
    form
}

fn il_candidates(s: &SymmetricState) -> Result<Vec<(ILCanonicalForm, CollectiveMap)>> {
    let n = s.n_qubits();
    if n < 3 {
        return Err(Error::InvalidInput("IL canonical form needs N >= 3".into()));
    }
    let (unit, _) = s.rescaled()?;
    let report = majorana::genericity(&unit, majorana::DEFAULT_CLUSTER_TOL)?;
    if !report.generic {
        return Err(Error::NonGeneric {
            gamma: report.gamma,
            n_qubits: n,
        });
    }
    if report.gamma == n {
        return Err(Error::InsufficientTerms {
            terms: 1,
            required: 2,
        });
    }
    let (balanced, gb) = balance(&unit)?;
    let (_, d) = decompose_unit(&balanced)?;
    if d.len() < 2 {
        return Err(Error::InsufficientTerms {
            terms: d.len(),
            required: 2,
        });
    }
    let mut out = Vec::new();
    for terms in labelings(&d) {
        let cands = if d.is_paired() && terms.len() >= 3 {
            paired_candidates(&terms, n)
        } else {
            two_pole_candidates(&terms, n)
        };
        out.extend(cands.into_iter().map(|(f, g)| (f, g.compose(&gb))));
    }
    Ok(out)
}

/// Reduces `s` to its IL canonical form. The returned map has unit
/// determinant and sends `s` to a multiple of the form.
pub fn il_canonical(s: &SymmetricState) -> Result<(ILCanonicalForm, CollectiveMap)> {
    let (unit, _) = s.rescaled()?;
    let (form, g) = pick(il_candidates(&unit)?, ILCanonicalForm::key);
    check_mapped(&g, &unit, &form.to_state(), "IL")?;
    Ok((form, g))
}

/// Whether `s1` and `s2` share a canonical form. The canonical form of `s1`
/// is compared against every discrete branch of `s2`, so that forms which
/// sit on a branch boundary still match.
///
/// States whose decompositions are too short for the IL form are equivalent
/// exactly when both are separable.
pub fn equivalent(
    s1: &SymmetricState,
    s2: &SymmetricState,
    mode: EquivalenceMode,
    tol: f64,
) -> Result<bool> {
    if s1.n_qubits() != s2.n_qubits() {
        return Err(Error::QubitMismatch {
            left: s1.n_qubits(),
            right: s2.n_qubits(),
        });
    }
    match mode {
        EquivalenceMode::LU => {
            let (f1, _) = lu_canonical(s1)?;
            let (unit2, _) = s2.rescaled()?;
            Ok(lu_candidates(&unit2)?
                .iter()
                .any(|(f2, _)| f1.approx_eq(f2, tol)))
        }
        EquivalenceMode::IL => {
            let first = il_canonical(s1);
            let (unit2, _) = s2.rescaled()?;
            let second = il_candidates(&unit2);
            match (first, second) {
                (Ok((f1, _)), Ok(c2)) => Ok(c2.iter().any(|(f2, _)| f1.approx_eq(f2, tol))),
                (
                    Err(Error::InsufficientTerms { terms: a, .. }),
                    Err(Error::InsufficientTerms { terms: b, .. }),
                ) => Ok(a == b),
                (Err(Error::InsufficientTerms { .. }), Ok(_))
                | (Ok(_), Err(Error::InsufficientTerms { .. })) => Ok(false),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_su2, random_special, random_state, rng};

    fn ghz3() -> SymmetricState {
        SymmetricState::ghz(3).unwrap()
    }

    #[test]
    fn ghz3_lu_form() {
        let (f, u) = lu_canonical(&ghz3()).unwrap();
        let p = f.three_qubit().unwrap();
        assert!((p.y - 1.0).abs() < 1e-12);
        assert!(p.epsilon.abs() < 1e-12);
        assert!((f.amplitude() - 0.5f64.sqrt()).abs() < 1e-12);
        let a2 = 1.0 + p.y * p.y + 2.0 * p.y * (3.0 * p.phi).cos() * (p.epsilon / 2.0).sin().powi(3);
        assert!((f.amplitude().powi(-2) - a2).abs() < 1e-12);
        assert!(u.is_unitary(1e-12));
    }

    #[test]
    fn coherent_lu_form_is_a_single_term() {
        let node = NodeState::new(1.1, 2.3).unwrap();
        let s = crate::symstate::coherent_state(5, &node).unwrap();
        let (f, _) = lu_canonical(&s).unwrap();
        assert!(f.y().is_empty());
        assert_eq!(f.amplitude(), 1.0);
    }

    #[test]
    fn lu_form_is_invariant_and_idempotent() {
        let mut r = rng(21);
        for n in [3, 4, 5, 6, 7] {
            let s = random_state(n, &mut r);
            let (f, u) = match lu_canonical(&s) {
                Ok(x) => x,
                Err(Error::SolverFailure { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            assert_eq!(f.parameters().len(), 2 * n - 3, "n={n}");
            let (s2, _) = apply_collective(&haar_su2(&mut r), &s, true);
            let (f2, _) = lu_canonical(&s2).unwrap();
            assert!(f.approx_eq(&f2, 1e-7), "n={n}\n{f:?}\n{f2:?}");
            let (f3, _) = lu_canonical(&f.to_state()).unwrap();
            assert!(f.approx_eq(&f3, 1e-10), "n={n}");
            let (mapped, _) = apply_collective(&u, &s, true);
            let (d, _) = decompose_with(&mapped, &DecomposeOptions::default()).unwrap();
            assert!(d.terms()[0].node.chordal(&NodeState::Infinity) < 1e-10);
        }
    }

    #[test]
    fn balanced_state_has_zero_spin() {
        let mut r = rng(4);
        for n in [3, 6, 7] {
            let s = random_state(n, &mut r);
            let (b, g) = balance(&s).unwrap();
            let (mean, _) = spin_moments(&b);
            assert!(mean.iter().all(|m| m.abs() < 1e-12));
            assert!(g.is_special(1e-12));
            let (s2, _) = apply_collective(&random_special(2.0, &mut r), &s, true);
            let (b2, _) = balance(&s2).unwrap();
            // Balanced points of one orbit differ by a unitary.
            let (f1, _) = lu_canonical(&b).unwrap();
            let (f2, _) = lu_canonical(&b2).unwrap();
            assert!(f1.approx_eq(&f2, 1e-7));
        }
    }

    #[test]
    fn ghz3_il_form_is_empty() {
        let (f, g) = il_canonical(&ghz3()).unwrap();
        assert!(f.lambdas().is_empty());
        assert_eq!(f.independent_parameter_count(), 0);
        assert!((f.amplitude() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(g.is_special(1e-12));
        let s = random_state(3, &mut rng(8));
        assert!(equivalent(&ghz3(), &s, EquivalenceMode::IL, 1e-6).unwrap());
    }

    #[test]
    fn separable_is_not_il_equivalent_to_ghz() {
        let s = SymmetricState::dicke_basis(3, 0).unwrap();
        assert!(matches!(il_canonical(&s), Err(Error::InsufficientTerms { .. })));
        assert!(!equivalent(&ghz3(), &s, EquivalenceMode::IL, 1e-6).unwrap());
    }

    #[test]
    fn il_form_is_invariant() {
        let mut r = rng(31);
        for n in [3, 5, 6, 7] {
            let s = random_state(n, &mut r);
            let (f, g) = match il_canonical(&s) {
                Ok(x) => x,
                Err(Error::SolverFailure { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!(g.is_special(1e-12));
            assert_eq!(f.independent_parameter_count(), 2 * n - 6, "n={n}");
            let (s2, _) = apply_collective(&random_special(2.0, &mut r), &s, true);
            let (f2, _) = il_canonical(&s2).unwrap();
            assert!(f.approx_eq(&f2, 1e-6), "n={n}\n{f:?}\n{f2:?}");
        }
    }

    #[test]
    fn even_form_satisfies_the_parametric_relation() {
        let mut r = rng(44);
        let mut checked = 0;
        while checked < 5 {
            let s = random_state(4, &mut r);
            let Ok((f, _)) = il_canonical(&s) else { continue };
            assert!(f.relation_residual().unwrap() < 1e-9);
            checked += 1;
        }
    }
}
