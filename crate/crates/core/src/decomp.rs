//! Decomposition of a generic symmetric state into spin coherent states.
//!
//! With unnormalized nodes `(|0> + beta_m |1>)^{(x)N}` and weights `w_m`, the
//! moments `mu_k = c_k / d_k` satisfy `mu_k = sum_m w_m beta_m^k`. The nodes
//! are therefore the roots of a polynomial whose coefficient vector lies in
//! the kernel of the Hankel matrix `[mu_{i+j}]`:
//!
//! * odd `N`: `(N+1)/2` nodes, one-dimensional kernel;
//! * even `N`: `N/2 + 1` nodes, two-dimensional kernel; the member of that
//!   pencil is fixed by requiring two of its roots to be antipodal.
//!
//! States of lower rank are detected first by scanning smaller Hankel
//! matrices. Every solve happens after a random collective rotation so that no
//! node sits at infinity; the result is rotated back exactly.

use crate::error::{Error, Result};
use crate::majorana::{self, DEFAULT_CLUSTER_TOL};
use crate::poly;
use crate::random;
use crate::sphere::Extended;
use crate::symstate::{
    apply_collective, coherent_dicke, coherent_state, dicke_weights, CollectiveMap, NodeState,
    Parity, SymmetricState,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One coherent component `coeff |node>^{(x)N}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub node: NodeState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentDecomposition {
    n_qubits: usize,
    terms: Vec<Term>,
    paired: bool,
}

impl CoherentDecomposition {
    /// Wraps a list of terms. For even `N` the first two terms count as the
    /// orthogonal pair when their nodes are antipodal within `1e-10`.
    pub fn new(n_qubits: usize, terms: Vec<Term>) -> Result<Self> {
        if n_qubits < 1 || terms.is_empty() {
            return Err(Error::InvalidInput("a decomposition needs at least one term".into()));
        }
        let paired = Parity::of(n_qubits) == Parity::Even
            && terms.len() >= 2
            && terms[0].node.overlap(&terms[1].node).norm() < 1e-10;
        Ok(CoherentDecomposition {
            n_qubits,
            terms,
            paired,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.n_qubits)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether the first two terms form the orthogonal pair of the even form.
    pub fn is_paired(&self) -> bool {
        self.paired
    }

    /// `A` of the normalized view, i.e. `c_0`.
    pub fn amplitude(&self) -> Complex64 {
        self.terms[0].coeff
    }

    /// `y_m = |c_m / c_0|` for `m >= 1`.
    pub fn y(&self) -> Vec<f64> {
        let c0 = self.terms[0].coeff.norm();
        self.terms[1..].iter().map(|t| t.coeff.norm() / c0).collect()
    }

    /// `k_m = arg(c_m / c_0)` in `[0, 2pi)` for `m >= 1`; zero for vanishing
    /// coefficients.
    pub fn k(&self) -> Vec<f64> {
        let c0 = self.terms[0].coeff;
        self.terms[1..]
            .iter()
            .map(|t| {
                if t.coeff == ZERO {
                    0.0
                } else {
                    crate::sphere::wrap_angle((t.coeff / c0).arg())
                }
            })
            .collect()
    }

    /// Number of terms with `|c_m| > zero_tol`.
    pub fn rank(&self, zero_tol: f64) -> usize {
        self.terms.iter().filter(|t| t.coeff.norm() > zero_tol).count()
    }

    /// The decomposition of `G^{(x)N} |s>`: every node is mapped by `G` and
    /// its coefficient picks up `kappa^N`. The term order is kept.
    pub fn transformed(&self, g: &CollectiveMap) -> CoherentDecomposition {
        let n = self.n_qubits as i32;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (node, kappa) = t.node.transform(g);
                Term {
                    coeff: t.coeff * kappa.powi(n),
                    node,
                }
            })
            .collect();
        CoherentDecomposition {
            n_qubits: self.n_qubits,
            terms,
            paired: self.paired,
        }
    }
}

/// `mu_k = c_k / d_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub mu: Vec<Complex64>,
}

pub fn moments(s: &SymmetricState) -> MomentVector {
    let w = dicke_weights(s.n_qubits()).expect("n >= 1");
    MomentVector {
        mu: s.dicke().iter().zip(w.values()).map(|(c, d)| c / d).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecomposeOptions {
    /// Largest accepted fidelity deficit of the reconstruction.
    pub tol: f64,
    /// Chordal tolerance for root multiplicities.
    pub cluster_tol: f64,
    /// Relative tolerance below which two coefficient magnitudes tie.
    pub tie_tol: f64,
    /// Seed for the random pre-rotations.
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            tol: 1e-9,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            tie_tol: 1e-9,
            seed: 0,
            max_attempts: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecompositionDiagnostics {
    pub reconstruction_fidelity_deficit: f64,
    /// Largest normalized determinant of the linear-dependence conditions.
    pub max_determinant_residual: f64,
    /// Largest normalized `|P|` (and transverse derivatives) at the roots.
    pub max_root_residual: f64,
    /// `|P(0) - Psi(0)|`.
    pub value_at_zero_residual: f64,
    /// Relative moment residual `max_k |mu_k - sum_m w_m beta_m^k| / max|mu|`.
    pub moment_residual: f64,
    /// Rotations tried before success.
    pub attempts: usize,
    /// Condition estimate of the Hankel matrix that fixed the nodes.
    pub hankel_condition: f64,
    /// Admissible pairings found for even `N`.
    pub pairing_candidates: usize,
    /// `|c_0|` of rejected pairings that came within `1e-9` of the chosen one.
    pub near_ties: Vec<f64>,
}

pub fn decompose(
    s: &SymmetricState,
    tol: f64,
) -> Result<(CoherentDecomposition, DecompositionDiagnostics)> {
    decompose_with(
        s,
        &DecomposeOptions {
            tol,
            ..DecomposeOptions::default()
        },
    )
}

pub fn decompose_with(
    s: &SymmetricState,
    opts: &DecomposeOptions,
) -> Result<(CoherentDecomposition, DecompositionDiagnostics)> {
    let (unit, scale, roots, gamma) = prepare(s, opts)?;
    let solved = if gamma == s.n_qubits() {
        separable(&unit, &roots)?
    } else {
        solve(&unit, opts)?
    };
    finish(solved, &unit, &roots, scale, opts)
}

/// All admissible decompositions of `s`. For full-rank even states this is
/// one decomposition per pencil member with an antipodal root pair, sorted by
/// decreasing `|c_0|`; the first entry is what [`decompose_with`] returns.
/// Other states have a single entry.
pub fn decomposition_candidates(
    s: &SymmetricState,
    opts: &DecomposeOptions,
) -> Result<Vec<(CoherentDecomposition, DecompositionDiagnostics)>> {
    let (unit, scale, roots, gamma) = prepare(s, opts)?;
    if gamma == s.n_qubits() {
        return Ok(vec![finish(separable(&unit, &roots)?, &unit, &roots, scale, opts)?]);
    }
    let all = solve_all(&unit, opts)?;
    let mut out = Vec::with_capacity(all.len());
    let mut first_err = None;
    for solved in all {
        match finish(solved, &unit, &roots, scale, opts) {
            Ok(d) => out.push(d),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (out.is_empty(), first_err) {
        (true, Some(e)) => Err(e),
        _ => Ok(out),
    }
}

fn prepare(
    s: &SymmetricState,
    opts: &DecomposeOptions,
) -> Result<(SymmetricState, f64, majorana::RootMultiset, usize)> {
    let n = s.n_qubits();
    if n < 2 {
        return Err(Error::InvalidInput("decomposition needs N >= 2".into()));
    }
    let (unit, scale) = s.rescaled()?;
    let roots = majorana::majorana_roots(&majorana::majorana_polynomial(&unit), opts.cluster_tol)?;
    let report = majorana::report_for(&roots);
    if !report.generic {
        return Err(Error::NonGeneric {
            gamma: report.gamma,
            n_qubits: n,
        });
    }
    Ok((unit, scale, roots, report.gamma))
}

fn finish(
    (mut terms, paired, mut diag): Solved,
    unit: &SymmetricState,
    roots: &majorana::RootMultiset,
    scale: f64,
    opts: &DecomposeOptions,
) -> Result<(CoherentDecomposition, DecompositionDiagnostics)> {
    for t in terms.iter_mut() {
        t.coeff *= scale;
    }
    let terms = order_terms(terms, paired, opts.tie_tol)?;
    let d = CoherentDecomposition {
        n_qubits: unit.n_qubits(),
        terms,
        paired,
    };
    let checks = verify_with_roots(&d, unit, roots, scale);
    diag.reconstruction_fidelity_deficit = checks.reconstruction_fidelity_deficit;
    diag.max_determinant_residual = checks.max_determinant_residual;
    diag.max_root_residual = checks.max_root_residual;
    diag.value_at_zero_residual = checks.value_at_zero_residual;
    if !(diag.reconstruction_fidelity_deficit <= opts.tol) {
        return Err(Error::SolverFailure {
            residual: diag.reconstruction_fidelity_deficit,
            detail: "reconstruction misses the state".into(),
        });
    }
    Ok((d, diag))
}

type Solved = (Vec<Term>, bool, DecompositionDiagnostics);

fn separable(unit: &SymmetricState, roots: &majorana::RootMultiset) -> Result<Solved> {
    let alpha = roots.roots()[0].0;
    // (x + y alpha)^N vanishes at alpha = -x/y, i.e. beta = -1/alpha.
    let beta = match alpha {
        Extended::Infinity => Extended::finite(0.0, 0.0),
        Extended::Finite(a) => Extended::from_ratio(-ONE, a),
    };
    let node = NodeState::from_beta(beta);
    let coh = coherent_state(unit.n_qubits(), &node)?;
    let coeff = crate::symstate::overlap(&coh, unit)?;
    Ok((vec![Term { coeff, node }], false, DecompositionDiagnostics::default()))
}

/// A node set found in the rotated frame, with the indices of an antipodal
/// pair when one was imposed.
struct Candidate {
    betas: Vec<Extended>,
    pair: Option<(usize, usize)>,
}

/// Every admissible node set that reproduces `unit`, rotated back to the
/// original frame. Full-rank even states list one entry per pairing, pair
/// first and ordered by decreasing leading coefficient.
fn solve_all(unit: &SymmetricState, opts: &DecomposeOptions) -> Result<Vec<Solved>> {
    let n = unit.n_qubits();
    let mut best_residual = f64::INFINITY;
    let mut last_detail = String::from("no attempt made");
    for attempt in 0..opts.max_attempts.max(1) {
        let u = random::haar_su2(&mut random::rng_stream(opts.seed, attempt as u64));
        let (rotated, _) = apply_collective(&u, unit, true);
        let back = u.inverse();
        let mu = moments(&rotated).mu;

        let found = match find_candidates(&mu, n) {
            Ok(f) => f,
            Err(Search::Retry(detail)) => {
                last_detail = detail;
                continue;
            }
            Err(Search::NoPairing { condition }) => {
                return Err(Error::SolverFailure {
                    residual: f64::INFINITY,
                    detail: format!(
                        "no pencil member has an antipodal root pair (Hankel condition {condition:.3e}); \
                         the state has no decomposition with an orthogonal pair"
                    ),
                });
            }
        };
        let diag = DecompositionDiagnostics {
            attempts: attempt + 1,
            hankel_condition: found.condition,
            moment_residual: found.moment_residual,
            ..Default::default()
        };

        let mut fits: Vec<(Vec<Term>, Option<(usize, usize)>)> = Vec::new();
        for cand in &found.candidates {
            let nodes: Vec<NodeState> = cand
                .betas
                .iter()
                .map(|b| NodeState::from_beta(*b).transform(&back).0)
                .collect();
            let (coeffs, residual) = fit_coefficients(unit, &nodes);
            best_residual = best_residual.min(residual);
            if residual * residual <= opts.tol {
                let terms = nodes
                    .into_iter()
                    .zip(coeffs)
                    .map(|(node, coeff)| Term { coeff, node })
                    .collect();
                fits.push((terms, cand.pair));
            }
        }
        if fits.is_empty() {
            last_detail = "no candidate node set reproduces the state".into();
            continue;
        }

        if n % 2 == 0 && found.full_rank {
            let mut out: Vec<Solved> = fits
                .into_iter()
                .map(|(terms, pair)| (pair_first(terms, pair.expect("pair present")), true, diag.clone()))
                .collect();
            out.sort_by(|a, b| b.0[0].coeff.norm().total_cmp(&a.0[0].coeff.norm()));
            return Ok(out);
        }

        let (terms, _) = fits.swap_remove(0);
        let (terms, paired) = if n % 2 == 0 {
            pair_up(terms)
        } else {
            (terms, false)
        };
        return Ok(vec![(terms, paired, diag)]);
    }
    Err(Error::SolverFailure {
        residual: best_residual,
        detail: last_detail,
    })
}

fn solve(unit: &SymmetricState, opts: &DecomposeOptions) -> Result<Solved> {
    let mut all = solve_all(unit, opts)?;
    let leads: Vec<f64> = all.iter().map(|s| s.0[0].coeff.norm()).collect();
    let (terms, paired, mut diag) = all.swap_remove(0);
    if paired && leads.len() > 1 {
        diag.pairing_candidates = leads.len();
        let top = leads[0];
        diag.near_ties = leads[1..]
            .iter()
            .copied()
            .filter(|l| (top - l).abs() <= opts.tie_tol * top)
            .collect();
    } else if paired {
        diag.pairing_candidates = 1;
    }
    Ok((terms, paired, diag))
}

/// Moves the pair to the front, larger coefficient first, and snaps the
/// partner onto the exact antipode.
fn pair_first(terms: Vec<Term>, (i, j): (usize, usize)) -> Vec<Term> {
    let (a, b) = if terms[i].coeff.norm() >= terms[j].coeff.norm() {
        (i, j)
    } else {
        (j, i)
    };
    let mut out = vec![terms[a], terms[b]];
    out.extend(
        terms
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != a && *k != b)
            .map(|(_, t)| *t),
    );
    out[1].node = out[0].node.antipode();
    out
}

/// Rank-deficient even states: the leading node's antipode, when present,
/// moves to position one.
fn pair_up(mut terms: Vec<Term>) -> (Vec<Term>, bool) {
    terms.sort_by(|a, b| b.coeff.norm().total_cmp(&a.coeff.norm()));
    if terms.len() < 2 {
        return (terms, false);
    }
    let anti = terms[0].node.antipode();
    let partner = (1..terms.len()).find(|&i| terms[i].node.chordal(&anti) < 1e-7);
    match partner {
        Some(i) => {
            let t = terms.remove(i);
            terms.insert(1, Term {
                coeff: t.coeff,
                node: anti,
            });
            (terms, true)
        }
        None => (terms, false),
    }
}

enum Search {
    Retry(String),
    NoPairing { condition: f64 },
}

struct Found {
    candidates: Vec<Candidate>,
    condition: f64,
    moment_residual: f64,
    full_rank: bool,
}

fn hankel(mu: &[Complex64], r: usize) -> DMatrix<Complex64> {
    let n = mu.len() - 1;
    DMatrix::from_fn(n - r + 1, r + 1, |i, j| mu[i + j])
}

/// Singular values in ascending order and the matching right singular
/// vectors; short matrices are padded with zero rows so the full right basis
/// is returned.
fn right_singular(h: &DMatrix<Complex64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let cols = h.ncols();
    let padded = if h.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (h.nrows(), cols)).copy_from(h);
        p
    } else {
        h.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..cols).map(|j| vt[(i, j)].conj()).collect())
        .collect();
    (values, vectors)
}

/// Relative moment residual of the best weights for the given nodes.
fn moment_fit(mu: &[Complex64], betas: &[Complex64]) -> f64 {
    let rows = mu.len();
    // Columns scaled to unit norm keep the Vandermonde solve well posed.
    let mut v = DMatrix::from_fn(rows, betas.len(), |k, m| betas[m].powi(k as i32));
    for mut col in v.column_iter_mut() {
        let n = col.norm();
        col /= Complex64::new(n, 0.0);
    }
    let b = DVector::from_column_slice(mu);
    let Ok(w) = v.clone().svd(true, true).solve(&b, 1e-300) else {
        return f64::INFINITY;
    };
    let r = &v * w - &b;
    let scale = mu.iter().map(|x| x.norm()).fold(0.0, f64::max);
    r.iter().map(|x| x.norm()).fold(0.0, f64::max) / scale
}

fn finite_distinct(roots: &[Extended]) -> Option<Vec<Complex64>> {
    let finite: Vec<Complex64> = roots.iter().filter_map(|r| r.as_finite()).collect();
    if finite.len() != roots.len() {
        return None;
    }
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if roots[i].chordal(&roots[j]) <= 1e-6 {
                return None;
            }
        }
    }
    Some(finite)
}

fn find_candidates(mu: &[Complex64], n: usize) -> std::result::Result<Found, Search> {
    let full = if n % 2 == 1 { n.div_ceil(2) } else { n / 2 + 1 };

    // Lower ranks first.
    for r in 1..full {
        let h = hankel(mu, r);
        let (sv, vecs) = right_singular(&h);
        let top = *sv.last().expect("nonempty");
        if !(sv[0] <= 1e-8 * top) {
            continue;
        }
        let Some(roots) = poly::roots(&vecs[0]) else {
            continue;
        };
        let Some(betas) = finite_distinct(&roots) else {
            continue;
        };
        let res = moment_fit(mu, &betas);
        if res <= 1e-10 {
            return Ok(Found {
                candidates: vec![Candidate {
                    betas: roots,
                    pair: None,
                }],
                condition: top / sv[1].max(f64::MIN_POSITIVE),
                moment_residual: res,
                full_rank: false,
            });
        }
    }

    let h = hankel(mu, full);
    let (sv, vecs) = right_singular(&h);
    let kernel = if n % 2 == 1 { 1 } else { 2 };
    let top = *sv.last().expect("nonempty");
    let condition = top / sv[kernel].max(f64::MIN_POSITIVE);
    if !(condition <= 1e12) {
        return Err(Search::Retry(format!("Hankel matrix ill-conditioned ({condition:.3e})")));
    }

    if n % 2 == 1 {
        let roots = poly::roots(&vecs[0]).ok_or_else(|| Search::Retry("empty kernel".into()))?;
        let betas = finite_distinct(&roots)
            .ok_or_else(|| Search::Retry("node polynomial has a repeated or infinite root".into()))?;
        let res = moment_fit(mu, &betas);
        return Ok(Found {
            candidates: vec![Candidate {
                betas: roots,
                pair: None,
            }],
            condition,
            moment_residual: res,
            full_rank: true,
        });
    }

    let candidates = paired_members(&vecs[0], &vecs[1]);
    if candidates.is_empty() {
        return Err(Search::NoPairing { condition });
    }
    let moment_residual = candidates
        .iter()
        .map(|c| {
            let b: Vec<Complex64> = c.betas.iter().filter_map(|z| z.as_finite()).collect();
            moment_fit(mu, &b)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(Found {
        candidates,
        condition,
        moment_residual,
        full_rank: true,
    })
}

/// `sum_j p_j (-1)^j w^{d-j}` in ascending powers of `w`, where `d` is the
/// formal degree. For `w = conj(beta)` this is `conj(beta)^d p(-1/conj(beta))`.
fn antipodal_reverse(p: &[Complex64]) -> Vec<Complex64> {
    let d = p.len() - 1;
    (0..=d)
        .map(|i| {
            let j = d - i;
            if j % 2 == 0 {
                p[j]
            } else {
                -p[j]
            }
        })
        .collect()
}

struct PairEquation {
    pa: Vec<Complex64>,
    pb: Vec<Complex64>,
    dpa: Vec<Complex64>,
    dpb: Vec<Complex64>,
    ta: Vec<Complex64>,
    tb: Vec<Complex64>,
    dta: Vec<Complex64>,
    dtb: Vec<Complex64>,
    degree: i32,
}

impl PairEquation {
    fn new(pa: &[Complex64], pb: &[Complex64]) -> Self {
        let ta = antipodal_reverse(pa);
        let tb = antipodal_reverse(pb);
        PairEquation {
            dpa: poly::derivative(pa),
            dpb: poly::derivative(pb),
            dta: poly::derivative(&ta),
            dtb: poly::derivative(&tb),
            pa: pa.to_vec(),
            pb: pb.to_vec(),
            ta,
            tb,
            degree: (pa.len() - 1) as i32,
        }
    }

    /// `E(z) = p_B(z) T_A(conj z) - p_A(z) T_B(conj z)`, which vanishes exactly
    /// when the pencil member through `z` also vanishes at `-1/conj(z)`.
    /// Returns `E`, `dE/dz`, `dE/dconj(z)` and the normalization
    /// `(1 + |z|^2)^degree`.
    fn eval(&self, z: Complex64) -> (Complex64, Complex64, Complex64, f64) {
        let w = z.conj();
        let pa = poly::eval(&self.pa, z);
        let pb = poly::eval(&self.pb, z);
        let ta = poly::eval(&self.ta, w);
        let tb = poly::eval(&self.tb, w);
        let e = pb * ta - pa * tb;
        let ez = poly::eval(&self.dpb, z) * ta - poly::eval(&self.dpa, z) * tb;
        let ew = pb * poly::eval(&self.dta, w) - pa * poly::eval(&self.dtb, w);
        (e, ez, ew, (1.0 + z.norm_sqr()).powi(self.degree))
    }

    /// Damped real Newton on the non-holomorphic equation `E = 0`, kept in
    /// the closed unit disc by swapping to the antipode.
    fn newton(&self, start: Complex64) -> Option<Complex64> {
        let mut z = start;
        let (mut e, mut ez, mut ew, mut scale) = self.eval(z);
        for _ in 0..80 {
            let r = -e;
            let det = ez.norm_sqr() - ew.norm_sqr();
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let step = (ez.conj() * r - ew * r.conj()) / det;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..12 {
                let mut trial = z + step * t;
                if trial.norm() > 1.0 {
                    trial = -trial.conj().inv();
                }
                let (e2, ez2, ew2, s2) = self.eval(trial);
                if e2.norm() / s2 < e.norm() / scale {
                    z = trial;
                    (e, ez, ew, scale) = (e2, ez2, ew2, s2);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if e.norm() / scale < 1e-15 || !accepted {
                break;
            }
            if (step * t).norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        if e.norm() / scale < 1e-12 {
            Some(z)
        } else {
            None
        }
    }
}

/// Members of the pencil `s p_A + t p_B` having an antipodal root pair.
fn paired_members(pa: &[Complex64], pb: &[Complex64]) -> Vec<Candidate> {
    let eq = PairEquation::new(pa, pb);
    let degree = pa.len() - 1;
    let rings = 6 + 3 * degree;

    let mut solutions: Vec<Complex64> = Vec::new();
    let try_seed = |seed: Complex64, solutions: &mut Vec<Complex64>| {
        if let Some(z) = eq.newton(seed) {
            let zb = Extended::Finite(z);
            let dup = solutions.iter().any(|s| {
                let sb = Extended::Finite(*s);
                sb.chordal(&zb) < 1e-7 || sb.chordal(&zb.antipode()) < 1e-7
            });
            if !dup {
                solutions.push(z);
            }
        }
    };
    try_seed(ZERO, &mut solutions);
    for i in 0..rings {
        let theta = (i as f64 + 0.5) / rings as f64 * (PI / 2.0);
        let count = 3 + 4 * i;
        let r = (theta / 2.0).tan();
        for k in 0..count {
            let phi = 2.0 * PI * (k as f64 + 0.5 * (i % 2) as f64) / count as f64;
            try_seed(Complex64::from_polar(r, phi), &mut solutions);
        }
    }

    let mut out = Vec::new();
    for z in solutions {
        let member: Vec<Complex64> = pa
            .iter()
            .zip(pb)
            .map(|(a, b)| poly::eval(pb, z) * a - poly::eval(pa, z) * b)
            .collect();
        let Some(mut roots) = poly::roots(&member) else {
            continue;
        };
        let zb = Extended::Finite(z);
        let anti = zb.antipode();
        let Some(i) = nearest(&roots, &zb, None) else {
            continue;
        };
        let Some(j) = nearest(&roots, &anti, Some(i)) else {
            continue;
        };
        if roots[i].chordal(&zb) > 1e-6 || roots[j].chordal(&anti) > 1e-6 {
            continue;
        }
        roots[i] = zb;
        roots[j] = anti;
        if finite_or_pole_distinct(&roots) {
            out.push(Candidate {
                betas: roots,
                pair: Some((i, j)),
            });
        }
    }
    out
}

fn nearest(points: &[Extended], target: &Extended, skip: Option<usize>) -> Option<usize> {
    (0..points.len())
        .filter(|&i| Some(i) != skip)
        .min_by(|&a, &b| {
            points[a]
                .chordal(target)
                .total_cmp(&points[b].chordal(target))
        })
}

fn finite_or_pole_distinct(roots: &[Extended]) -> bool {
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if roots[i].chordal(&roots[j]) <= 1e-6 {
                return false;
            }
        }
    }
    true
}

/// Least-squares coefficients of `s` over unit coherent states, and the norm
/// of the residual.
fn fit_coefficients(s: &SymmetricState, nodes: &[NodeState]) -> (Vec<Complex64>, f64) {
    let n = s.n_qubits();
    let w = dicke_weights(n).expect("n >= 1");
    let cols: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|node| coherent_dicke(&w, node.spinor()))
        .collect();
    let v = DMatrix::from_fn(n + 1, nodes.len(), |k, m| cols[m][k]);
    let b = DVector::from_column_slice(s.dicke());
    let Ok(c) = v.clone().svd(true, true).solve(&b, 1e-300) else {
        return (vec![ZERO; nodes.len()], f64::INFINITY);
    };
    let residual = (&v * &c - &b).norm() / b.norm();
    (c.iter().copied().collect(), residual)
}

/// Sorts terms by decreasing magnitude (the pair first for even states) and
/// rejects ties that the ordering cannot resolve.
fn order_terms(mut terms: Vec<Term>, paired: bool, tie_tol: f64) -> Result<Vec<Term>> {
    let by_size = |a: &Term, b: &Term| b.coeff.norm().total_cmp(&a.coeff.norm());
    let start = if paired { 2 } else { 0 };
    if paired && terms[1].coeff.norm() > terms[0].coeff.norm() {
        terms.swap(0, 1);
    }
    terms[start..].sort_by(by_size);

    let top = terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max);
    let nonzero = terms.iter().filter(|t| t.coeff.norm() > 1e-12 * top).count();
    let tie = |i: usize, terms: &[Term]| {
        terms[i].coeff.norm() - terms[i + 1].coeff.norm() <= tie_tol * top
            && terms[i + 1].coeff.norm() > 1e-12 * top
    };
    let checks: Vec<usize> = if paired {
        std::iter::once(0).chain(2..terms.len().saturating_sub(1)).collect()
    } else {
        (0..terms.len().saturating_sub(1)).collect()
    };
    for i in checks {
        if i + 1 >= terms.len() || !tie(i, &terms) {
            continue;
        }
        if nonzero == 2 {
            // Two equal weights: the node nearer the north pole goes first.
            let key = |t: &Term| t.node.angles();
            let (a, b) = (key(&terms[i]), key(&terms[i + 1]));
            if (b.0, b.1) < (a.0, a.1) {
                terms.swap(i, i + 1);
            }
            if paired && i == 0 {
                terms[1].node = terms[0].node.antipode();
            }
            continue;
        }
        return Err(Error::TieBreakUnstable {
            first: i,
            second: i + 1,
            magnitude: terms[i].coeff.norm(),
        });
    }
    Ok(terms)
}

/// `sum_m c_m |node_m>^{(x)N}`, normalized, and the norm before normalizing.
pub fn reconstruct(d: &CoherentDecomposition) -> (SymmetricState, f64) {
    let n = d.n_qubits;
    let w = dicke_weights(n).expect("n >= 1");
    let mut acc = vec![ZERO; n + 1];
    for t in &d.terms {
        for (a, v) in acc.iter_mut().zip(coherent_dicke(&w, t.node.spinor())) {
            *a += t.coeff * v;
        }
    }
    let s = SymmetricState::from_raw(acc);
    let norm = s.norm();
    match s.rescaled() {
        Ok((unit, _)) => (unit, norm),
        Err(_) => (s, 0.0),
    }
}

/// Evaluates the defining conditions of the decomposition against `s`: the
/// vanishing of `P` (and, for repeated roots, its transverse derivatives) at
/// the Majorana roots of `s`, the value `P(0) = Psi(0)`, and the linear
/// dependence of the root rows expressed as determinants.
pub fn verify_conditions(
    d: &CoherentDecomposition,
    s: &SymmetricState,
) -> Result<DecompositionDiagnostics> {
    if d.n_qubits != s.n_qubits() {
        return Err(Error::QubitMismatch {
            left: d.n_qubits,
            right: s.n_qubits(),
        });
    }
    let (unit, scale) = s.rescaled()?;
    let roots = majorana::majorana_roots(&majorana::majorana_polynomial(&unit), DEFAULT_CLUSTER_TOL)?;
    Ok(verify_with_roots(d, &unit, &roots, scale))
}

fn verify_with_roots(
    d: &CoherentDecomposition,
    unit: &SymmetricState,
    roots: &majorana::RootMultiset,
    scale: f64,
) -> DecompositionDiagnostics {
    let n = d.n_qubits;
    let terms: Vec<(Complex64, [Complex64; 2])> = d
        .terms
        .iter()
        .map(|t| (t.coeff / scale, t.node.spinor()))
        .collect();
    let weight = terms.iter().map(|t| t.0.norm()).sum::<f64>().max(1.0);

    // One row per condition: (u, v) is the root as a unit spinor and j the
    // derivative order along the transverse direction (-conj v, conj u).
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (alpha, mult) in roots.roots() {
        let (u, v) = match alpha {
            Extended::Infinity => (ZERO, ONE),
            Extended::Finite(a) => {
                let r = (1.0 + a.norm_sqr()).sqrt();
                (ONE / r, a / r)
            }
        };
        for j in 0..*mult {
            rows.push(
                terms
                    .iter()
                    .map(|(_, [x, y])| {
                        let along = x * u + y * v;
                        let across = y * u.conj() - x * v.conj();
                        along.powi((n - j) as i32) * across.powi(j as i32)
                    })
                    .collect(),
            );
        }
    }

    let max_root_residual = rows
        .iter()
        .map(|row| {
            row.iter()
                .zip(&terms)
                .map(|(e, t)| e * t.0)
                .sum::<Complex64>()
                .norm()
                / weight
        })
        .fold(0.0, f64::max);

    let p0: Complex64 = terms.iter().map(|(c, [x, _])| c * x.powi(n as i32)).sum();
    let value_at_zero_residual = (p0 - unit.dicke()[0]).norm();

    let k = terms.len();
    let mut max_det: f64 = 0.0;
    if k > 1 {
        let norms: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        let head: f64 = norms[..k - 1].iter().product();
        for i in k - 1..rows.len() {
            if norms[i] < 1e-12 || head < 1e-300 {
                continue;
            }
            let m = DMatrix::from_fn(k, k, |r, c| {
                if r < k - 1 {
                    rows[r][c]
                } else {
                    rows[i][c]
                }
            });
            max_det = max_det.max(m.determinant().norm() / (head * norms[i]));
        }
    }

    let (rec, _) = reconstruct(d);
    let fid = crate::symstate::fidelity(&rec, unit).unwrap_or(0.0);
    DecompositionDiagnostics {
        reconstruction_fidelity_deficit: (1.0 - fid).max(0.0),
        max_determinant_residual: max_det,
        max_root_residual,
        value_at_zero_residual,
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_node, random_state, rng};
    use crate::symstate::overlap;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn moment_examples() {
        let mu = moments(&SymmetricState::ghz(3).unwrap()).mu;
        assert_eq!(mu, vec![c(FRAC_1_SQRT_2, 0.0), ZERO, ZERO, c(FRAC_1_SQRT_2, 0.0)]);
        let node = NodeState::new(0.9, 2.0).unwrap();
        let mu = moments(&coherent_state(4, &node).unwrap()).mu;
        let beta = node.beta().as_finite().unwrap();
        for k in 1..5 {
            assert!((mu[k] - mu[k - 1] * beta).norm() < 1e-15);
        }
    }

    #[test]
    fn ghz3_has_orthogonal_equal_terms() {
        let (d, _) = decompose(&SymmetricState::ghz(3).unwrap(), 1e-9).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.y()[0] - 1.0).abs() < 1e-10);
        assert!(d.terms()[0].node.overlap(&d.terms()[1].node).norm() < 1e-10);
        assert!(d.terms()[0].node.chordal(&NodeState::north()) < 1e-10);
    }

    #[test]
    fn separable_is_one_term() {
        for n in [2, 3, 6] {
            let s = SymmetricState::dicke_basis(n, 0).unwrap();
            let (d, _) = decompose(&s, 1e-9).unwrap();
            assert_eq!(d.len(), 1);
            assert!((d.terms()[0].coeff - ONE).norm() < 1e-12);
            assert!(d.terms()[0].node.chordal(&NodeState::north()) < 1e-12);
        }
    }

    #[test]
    fn w3_is_rejected() {
        let err = decompose(&SymmetricState::dicke_basis(3, 1).unwrap(), 1e-9).unwrap_err();
        assert_eq!(
            err,
            Error::NonGeneric {
                gamma: 2,
                n_qubits: 3
            }
        );
    }

    #[test]
    fn two_term_synthesis_n5() {
        let n0 = NodeState::new(0.7, 1.0).unwrap();
        let n1 = NodeState::new(2.2, 4.0).unwrap();
        let (c0, c1) = (c(0.8, 0.1), c(-0.2, 0.35));
        let d = CoherentDecomposition::new(
            5,
            vec![Term { coeff: c0, node: n0 }, Term { coeff: c1, node: n1 }],
        )
        .unwrap();
        let (s, norm) = reconstruct(&d);
        let (got, _) = decompose(&s, 1e-9).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.terms()[0].node.chordal(&n0) < 1e-7);
        assert!(got.terms()[1].node.chordal(&n1) < 1e-7);
        assert!((got.terms()[0].coeff * norm - c0).norm() < 1e-7);
        assert!((got.terms()[1].coeff * norm - c1).norm() < 1e-7);
    }

    #[test]
    fn random_states_round_trip() {
        let mut r = rng(3);
        for n in 2..=8 {
            for _ in 0..5 {
                let s = random_state(n, &mut r);
                let (d, diag) = decompose(&s, 1e-9).unwrap();
                let expected = if n % 2 == 1 { n.div_ceil(2) } else { n / 2 + 1 };
                assert_eq!(d.len(), expected);
                assert!(diag.reconstruction_fidelity_deficit < 1e-9);
                let (rec, _) = reconstruct(&d);
                assert!((overlap(&rec, &s).unwrap().norm() - 1.0).abs() < 1e-9);
                if n % 2 == 0 {
                    assert!(d.is_paired());
                    assert!(d.terms()[0].node.overlap(&d.terms()[1].node).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn perturbed_node_breaks_root_conditions() {
        let s = random_state(5, &mut rng(8));
        let (d, diag) = decompose(&s, 1e-9).unwrap();
        assert!(diag.max_root_residual < 1e-8);
        let mut terms = d.terms().to_vec();
        let (t, p) = terms[1].node.angles();
        terms[1].node = NodeState::new(t + 1e-3, p).unwrap();
        let bad = CoherentDecomposition::new(5, terms).unwrap();
        let diag = verify_conditions(&bad, &s).unwrap();
        assert!(diag.max_root_residual > 1e-5);
    }

    #[test]
    fn separable_conditions_vanish() {
        let node = random_node(&mut rng(2));
        let s = coherent_state(4, &node).unwrap();
        let (d, diag) = decompose(&s, 1e-9).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(diag.max_determinant_residual, 0.0);
        assert!(diag.max_root_residual < 1e-10);
    }

    #[test]
    fn ghz4_pairs_the_poles() {
        let (d, _) = decompose(&SymmetricState::ghz(4).unwrap(), 1e-9).unwrap();
        assert_eq!(d.rank(1e-10), 2);
        assert!(d.is_paired());
        assert!((d.y()[0] - 1.0).abs() < 1e-10);
    }
}
