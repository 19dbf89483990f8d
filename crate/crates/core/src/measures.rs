//! Entanglement quantities read off a decomposition.

use crate::canonical::lu_canonical;
use crate::decomp::{decompose, CoherentDecomposition};
use crate::error::{Error, Result};
use crate::majorana;
use crate::symstate::SymmetricState;
use num_complex::Complex64;

/// Overcomplete LU invariants: `gram[n][m] = e^{i(k_m - k_n)} <phi_n|phi_m>^N`,
/// the ratios `y` and the amplitude `A = |c_0|`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSet {
    pub gram: Vec<Vec<Complex64>>,
    pub y: Vec<f64>,
    pub amplitude: f64,
}

pub fn lu_invariants(d: &CoherentDecomposition) -> InvariantSet {
    let terms = d.terms();
    let n = d.n_qubits() as i32;
    let c0 = terms[0].coeff;
    let phase = |c: Complex64| {
        if c.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            let r = c / c0;
            r / r.norm()
        }
    };
    let gram = terms
        .iter()
        .map(|tn| {
            terms
                .iter()
                .map(|tm| phase(tm.coeff) * phase(tn.coeff).conj() * tn.node.overlap(&tm.node).powi(n))
                .collect()
        })
        .collect();
    InvariantSet {
        gram,
        y: d.y(),
        amplitude: c0.norm(),
    }
}

/// The three-qubit tangle by two closed formulas and by the hyperdeterminant.
/// The formula values are absent when the state has no two-term
/// decomposition; `formula_error` then says why.
#[derive(Debug, Clone, PartialEq)]
pub struct TangleReport {
    /// `4 y^2 (1 - |<phi_0|phi_1>|^2)^{3/2} A^4`.
    pub tau_decomp: Option<f64>,
    /// `4 y^2 cos^3(eps/2) / (1 + y^2 + 2 y cos(3 phi) sin^3(eps/2))^2`.
    pub tau_canonical: Option<f64>,
    /// `4 y^2 (1 - |<phi_0|phi_1>|^2)^3 A^4`, the pair value consistent with
    /// the hyperdeterminant.
    pub tau_pair: Option<f64>,
    /// `4 |Det a|` with `a_{ijk}` the amplitudes of `|ijk>`.
    pub tau_oracle: f64,
    pub formula_error: Option<Error>,
}

/// `tau` from the three-qubit LU parameters.
pub fn tangle_from_lu(y: f64, epsilon: f64, phi: f64) -> f64 {
    let (s, c) = (epsilon / 2.0).sin_cos();
    let norm = 1.0 + y * y + 2.0 * y * (3.0 * phi).cos() * s.powi(3);
    4.0 * y * y * c.powi(3) / (norm * norm)
}

/// `tau` from the three-qubit LU parameters with `cos^6(eps/2)` in the
/// numerator, the value the hyperdeterminant gives for `A(|111> + y |chi chi chi>)`.
pub fn tangle_from_lu_exact(y: f64, epsilon: f64, phi: f64) -> f64 {
    let (s, c) = (epsilon / 2.0).sin_cos();
    let norm = 1.0 + y * y + 2.0 * y * (3.0 * phi).cos() * s.powi(3);
    4.0 * y * y * c.powi(6) / (norm * norm)
}

/// Cayley's hyperdeterminant of a `2x2x2` tensor indexed `a[i][j][k]`.
pub fn hyperdeterminant(a: &[[[Complex64; 2]; 2]; 2]) -> Complex64 {
    let e = |i: usize, j: usize, k: usize| a[i][j][k];
    let sq = |z: Complex64| z * z;
    let p1 = sq(e(0, 0, 0)) * sq(e(1, 1, 1))
        + sq(e(0, 0, 1)) * sq(e(1, 1, 0))
        + sq(e(0, 1, 0)) * sq(e(1, 0, 1))
        + sq(e(1, 0, 0)) * sq(e(0, 1, 1));
    let p2 = e(0, 0, 0) * e(0, 0, 1) * e(1, 1, 0) * e(1, 1, 1)
        + e(0, 0, 0) * e(0, 1, 0) * e(1, 0, 1) * e(1, 1, 1)
        + e(0, 0, 0) * e(1, 0, 0) * e(0, 1, 1) * e(1, 1, 1)
        + e(0, 0, 1) * e(0, 1, 0) * e(1, 0, 1) * e(1, 1, 0)
        + e(0, 0, 1) * e(1, 0, 0) * e(0, 1, 1) * e(1, 1, 0)
        + e(0, 1, 0) * e(1, 0, 0) * e(0, 1, 1) * e(1, 0, 1);
    let p3 = e(0, 0, 0) * e(0, 1, 1) * e(1, 0, 1) * e(1, 1, 0)
        + e(0, 0, 1) * e(0, 1, 0) * e(1, 0, 0) * e(1, 1, 1);
    p1 - 2.0 * p2 + 4.0 * p3
}

/// The tangle of the expanded three-qubit amplitude tensor.
pub fn tangle_oracle(s: &SymmetricState) -> Result<f64> {
    if s.n_qubits() != 3 {
        return Err(Error::WrongQubitCount {
            expected: 3,
            found: s.n_qubits(),
        });
    }
    let (unit, _) = s.rescaled()?;
    let c = unit.dicke();
    let w = [1.0, 3f64.sqrt(), 3f64.sqrt(), 1.0];
    let mut a = [[[Complex64::new(0.0, 0.0); 2]; 2]; 2];
    for (i, plane) in a.iter_mut().enumerate() {
        for (j, row) in plane.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                let ones = i + j + k;
                *v = c[ones] / w[ones];
            }
        }
    }
    Ok(4.0 * hyperdeterminant(&a).norm())
}

pub fn three_tangle(s: &SymmetricState) -> Result<TangleReport> {
    let tau_oracle = tangle_oracle(s)?;
    let formulas = || -> Result<(f64, f64, f64)> {
        let (unit, _) = s.rescaled()?;
        let report = majorana::genericity(&unit, majorana::DEFAULT_CLUSTER_TOL)?;
        if !report.generic {
            return Err(Error::NonGeneric {
                gamma: report.gamma,
                n_qubits: 3,
            });
        }
        let (d, _) = decompose(&unit, 1e-9)?;
        if d.len() < 2 {
            return Err(Error::InsufficientTerms {
                terms: d.len(),
                required: 2,
            });
        }
        let t = d.terms();
        let y = t[1].coeff.norm() / t[0].coeff.norm();
        let amp = t[0].coeff.norm();
        // |<Phi_0|Phi_1>|^{2/3} taken as the single-qubit |<phi_0|phi_1>|^2.
        let ov = t[0].node.overlap(&t[1].node).norm_sqr();
        let tau_decomp = 4.0 * y * y * (1.0 - ov).max(0.0).powf(1.5) * amp.powi(4);
        let tau_pair = 4.0 * y * y * (1.0 - ov).max(0.0).powi(3) * amp.powi(4);

        let (form, _) = lu_canonical(&unit)?;
        let p = form.three_qubit().ok_or(Error::InsufficientTerms {
            terms: form.y().len() + 1,
            required: 2,
        })?;
        Ok((tau_decomp, tangle_from_lu(p.y, p.epsilon, p.phi), tau_pair))
    };
    Ok(match formulas() {
        Ok((d, c, q)) => TangleReport {
            tau_decomp: Some(d),
            tau_canonical: Some(c),
            tau_pair: Some(q),
            tau_oracle,
            formula_error: None,
        },
        Err(e) => TangleReport {
            tau_decomp: None,
            tau_canonical: None,
            tau_pair: None,
            tau_oracle,
            formula_error: Some(e),
        },
    })
}

/// Number of terms with `|c_m| > zero_tol` and `P = log2(r)`.
pub fn schmidt_measure(d: &CoherentDecomposition, zero_tol: f64) -> (usize, f64) {
    let r = d.rank(zero_tol).max(1);
    (r, (r as f64).log2())
}
