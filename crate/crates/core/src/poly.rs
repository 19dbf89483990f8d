//! Roots of complex polynomials and their multiplicities.
//!
//! Coefficients are always in ascending order, `p(z) = sum_i a_i z^i`. Roots
//! live on the Riemann sphere: a vanishing leading coefficient contributes a
//! root at infinity.

use crate::sphere::Extended;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

const MAX_ITER: usize = 200;
const RESIDUAL_FALLBACK: f64 = 1e-9;
const MERGE_RADII: [f64; 4] = [1e-2, 3e-2, 1e-1, 2e-1];

pub fn eval(a: &[Complex64], z: Complex64) -> Complex64 {
    a.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

pub fn derivative(a: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

/// `p(z)` and `p'(z)` together.
fn eval_with_derivative(a: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `|p(z)| / sum_i |a_i| |z|^i`, evaluated in whichever chart keeps `|z| <= 1`.
pub fn backward_residual(a: &[Complex64], z: Extended) -> f64 {
    match z {
        Extended::Infinity => {
            let scale: f64 = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if scale == 0.0 {
                0.0
            } else {
                a.last().map_or(0.0, |c| c.norm()) / scale
            }
        }
        Extended::Finite(z) => {
            if z.norm() <= 1.0 {
                let s: f64 = a.iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.norm());
                if s == 0.0 {
                    0.0
                } else {
                    eval(a, z).norm() / s
                }
            } else {
                let rev: Vec<Complex64> = a.iter().rev().copied().collect();
                backward_residual(&rev, Extended::Finite(z.inv()))
            }
        }
    }
}

/// Newton correction `p/p'` that stays accurate for large `|z|` by switching
/// to the reversed polynomial.
fn newton_ratio(a: &[Complex64], rev: &[Complex64], z: Complex64) -> Complex64 {
    let n = (a.len() - 1) as f64;
    if z.norm() <= 1.0 {
        let (p, dp) = eval_with_derivative(a, z);
        p / dp
    } else {
        let w = z.inv();
        let (q, dq) = eval_with_derivative(rev, w);
        // p(z) = z^n q(w), p'(z) = z^{n-1} (n q(w) - w q'(w)).
        z * q / (q * n - w * dq)
    }
}

/// Aberth-Ehrlich iteration on a polynomial with nonzero constant and
/// leading coefficients.
fn aberth(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    if n == 1 {
        return vec![-a[0] / a[1]];
    }
    let rev: Vec<Complex64> = a.iter().rev().copied().collect();
    let radius = (a[0].norm() / a[n].norm()).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            let wobble = 1.0 + 0.01 * ((k * 7 + 3) % 11) as f64 / 11.0;
            Complex64::from_polar(radius * wobble, angle)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let ratio = newton_ratio(a, &rev, z[k]);
            if !ratio.re.is_finite() || !ratio.im.is_finite() {
                done[k] = true;
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d == ZERO {
                        ZERO
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
            }
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    z
}

fn companion_roots(a: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.len() - 1;
    let lead = a[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = -a[i] / lead;
    }
    let schur = Schur::try_new(m, 1e-15, 10_000)?;
    let (_, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

fn polish(a: &[Complex64], rev: &[Complex64], z: Complex64) -> Complex64 {
    let mut best = z;
    let mut best_res = backward_residual(a, Extended::Finite(z));
    let mut cur = z;
    for _ in 0..3 {
        let r = newton_ratio(a, rev, cur);
        if !r.re.is_finite() || !r.im.is_finite() {
            break;
        }
        cur -= r;
        let res = backward_residual(a, Extended::Finite(cur));
        if res < best_res {
            best = cur;
            best_res = res;
        }
    }
    best
}

/// All roots of `a`, with `degree(a)` finite roots and `len(a) - 1 - degree`
/// roots at infinity. Returns `None` for the zero polynomial.
///
/// End coefficients below `4 eps` of the largest coefficient are treated as
/// exact zeros, so states with structurally vanishing amplitudes get exact
/// roots at `0` or infinity.
pub fn roots(a: &[Complex64]) -> Option<Vec<Extended>> {
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let cut = 4.0 * f64::EPSILON * scale;
    let hi = a.iter().rposition(|c| c.norm() > cut)?;
    let lo = a.iter().position(|c| c.norm() > cut)?;
    let total = a.len() - 1;
    let mut out = Vec::with_capacity(total);
    out.extend(std::iter::repeat_n(Extended::Infinity, total - hi));
    out.extend(std::iter::repeat_n(Extended::Finite(ZERO), lo));
    if hi > lo {
        let core: Vec<Complex64> = a[lo..=hi].to_vec();
        let rev: Vec<Complex64> = core.iter().rev().copied().collect();
        let mut z = aberth(&core);
        let worst = z
            .iter()
            .map(|&r| backward_residual(&core, Extended::Finite(r)))
            .fold(0.0, f64::max);
        if !(worst <= RESIDUAL_FALLBACK) {
            if let Some(alt) = companion_roots(&core) {
                let alt_worst = alt
                    .iter()
                    .map(|&r| backward_residual(&core, Extended::Finite(r)))
                    .fold(0.0, f64::max);
                if alt_worst < worst || worst.is_nan() {
                    z = alt;
                }
            }
        }
        out.extend(
            z.into_iter()
                .map(|r| Extended::Finite(polish(&core, &rev, r))),
        );
    }
    Some(out)
}

/// Taylor coefficients of `a` about `c`: `t_j = p^{(j)}(c) / j!`.
pub fn taylor_shift(a: &[Complex64], c: Complex64) -> Vec<Complex64> {
    let mut t = a.to_vec();
    let n = t.len();
    for j in 0..n {
        for i in (j..n - 1).rev() {
            let next = t[i + 1];
            t[i] += c * next;
        }
    }
    t
}

/// Groups roots by single-linkage clustering in the chordal metric, then
/// merges nearby clusters whenever the polynomial genuinely has a root of the
/// combined multiplicity there.
pub fn cluster(a: &[Complex64], roots: &[Extended], tol: f64) -> Vec<(Extended, usize)> {
    let groups = single_linkage(roots, tol);
    let mut clusters: Vec<(Extended, usize, Vec<usize>)> = groups
        .into_iter()
        .map(|g| (centroid(roots, &g), g.len(), g))
        .collect();

    // Coarse passes at growing radii: a root of multiplicity m perturbed by
    // rounding spreads like eps^{1/m}, so high multiplicities need wide radii.
    for radius in MERGE_RADII {
        let centers: Vec<Extended> = clusters.iter().map(|c| c.0).collect();
        let coarse = single_linkage(&centers, radius);
        if coarse.iter().all(|g| g.len() == 1) {
            continue;
        }
        let mut merged = Vec::new();
        for g in coarse {
            if g.len() == 1 {
                merged.push(clusters[g[0]].clone());
                continue;
            }
            let members: Vec<usize> = g.iter().flat_map(|&i| clusters[i].2.clone()).collect();
            let m = members.len();
            match multiple_root(a, &centroid(roots, &members), m, tol) {
                Some(center) => merged.push((center, m, members)),
                None => merged.extend(g.iter().map(|&i| clusters[i].clone())),
            }
        }
        clusters = merged;
    }
    for c in clusters.iter_mut() {
        if c.1 > 1 {
            if let Some(center) = multiple_root(a, &c.0, c.1, f64::INFINITY) {
                c.0 = center;
            }
        }
    }
    clusters.into_iter().map(|(z, m, _)| (z, m)).collect()
}

fn single_linkage(points: &[Extended], tol: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let next = p[j];
            p[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i].chordal(&points[j]) <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index[r] == usize::MAX {
            index[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index[r]].push(i);
    }
    groups
}

/// Mean position of a group, taken in the chart where it is bounded.
fn centroid(points: &[Extended], members: &[usize]) -> Extended {
    if members.len() == 1 {
        return points[members[0]];
    }
    let finite_small = members
        .iter()
        .filter(|&&i| matches!(points[i], Extended::Finite(z) if z.norm() <= 1.0))
        .count();
    let m = members.len() as f64;
    if 2 * finite_small >= members.len() {
        let s: Complex64 = members
            .iter()
            .map(|&i| points[i].as_finite().unwrap_or(ZERO))
            .sum();
        Extended::Finite(s / m)
    } else {
        let s: Complex64 = members
            .iter()
            .map(|&i| points[i].as_finite().map_or(ZERO, |z| z.inv()))
            .sum();
        Extended::from_ratio(ONE * m, s)
    }
}

/// Tests whether `a` has a root of multiplicity `m` near `guess`, and returns
/// its polished location if so. The polish is Newton on `p^{(m-1)}`; the test
/// requires each Taylor coefficient below order `m` to be at most `tol^2`
/// relative to its rounding scale.
fn multiple_root(a: &[Complex64], guess: &Extended, m: usize, tol: f64) -> Option<Extended> {
    let flipped = match guess {
        Extended::Infinity => true,
        Extended::Finite(z) => z.norm() > 1.0,
    };
    let coeffs: Vec<Complex64> = if flipped {
        a.iter().rev().copied().collect()
    } else {
        a.to_vec()
    };
    let mut c = match guess {
        Extended::Infinity => ZERO,
        Extended::Finite(z) if flipped => z.inv(),
        Extended::Finite(z) => *z,
    };
    let mut d = coeffs.clone();
    for _ in 0..m - 1 {
        d = derivative(&d);
    }
    if d.len() >= 2 {
        for _ in 0..30 {
            let (p, dp) = eval_with_derivative(&d, c);
            if dp == ZERO {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            c -= step;
            if step.norm() <= 4.0 * f64::EPSILON * c.norm().max(1.0) {
                break;
            }
        }
    }
    if tol.is_finite() {
        let t = taylor_shift(&coeffs, c);
        // Scale of each Taylor coefficient: the same shift applied to |a| at |c|.
        let abs: Vec<Complex64> = coeffs.iter().map(|x| Complex64::new(x.norm(), 0.0)).collect();
        let scale = taylor_shift(&abs, Complex64::new(c.norm(), 0.0));
        if scale.iter().all(|x| x.norm() == 0.0)
            || t.iter().zip(&scale).take(m).any(|(x, s)| x.norm() > tol * tol * s.norm())
        {
            return None;
        }
    }
    Some(if flipped {
        Extended::from_ratio(ONE, c)
    } else {
        Extended::Finite(c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(rs: &[Complex64]) -> Vec<Complex64> {
        let mut p = vec![ONE];
        for r in rs {
            let mut next = vec![ZERO; p.len() + 1];
            for (i, a) in p.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            p = next;
        }
        p
    }

    #[test]
    fn cube_roots_of_minus_one() {
        let r = roots(&[ONE, ZERO, ZERO, ONE]).unwrap();
        let expect = [
            c(-1.0, 0.0),
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3),
            Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_3),
        ];
        for e in expect {
            let d = r
                .iter()
                .map(|z| z.chordal(&Extended::Finite(e)))
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-14);
        }
    }

    #[test]
    fn vanishing_ends_give_exact_poles() {
        let r = roots(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        assert!(r.iter().all(|z| z.is_infinite()));
        let r = roots(&[ZERO, c(3f64.sqrt(), 0.0), ZERO, ZERO]).unwrap();
        assert_eq!(r.iter().filter(|z| z.is_infinite()).count(), 2);
        assert!(r.contains(&Extended::Finite(ZERO)));
        assert!(roots(&[ZERO, ZERO]).is_none());
    }

    #[test]
    fn recovers_scattered_roots() {
        let rs = [
            c(0.3, -0.2),
            c(-1.5, 0.7),
            c(4.0, 2.0),
            c(-0.01, 0.02),
            c(120.0, -30.0),
            c(0.0, 1.0),
        ];
        let p = from_roots(&rs);
        let found = roots(&p).unwrap();
        for r in rs {
            let d = found
                .iter()
                .map(|z| z.chordal(&Extended::Finite(r)))
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10, "{r} missed by {d}");
        }
    }

    #[test]
    fn clusters_merge_true_multiple_roots() {
        let r0 = c(0.4, -0.9);
        let p = from_roots(&[r0, r0, r0, c(-2.0, 0.5)]);
        let found = roots(&p).unwrap();
        let cl = cluster(&p, &found, 1e-6);
        assert_eq!(cl.len(), 2);
        let triple = cl.iter().find(|x| x.1 == 3).unwrap();
        assert!(triple.0.chordal(&Extended::Finite(r0)) < 1e-10);
    }

    #[test]
    fn close_but_distinct_roots_stay_apart() {
        let p = from_roots(&[c(0.5, 0.0), c(0.5 + 1e-4, 0.0), c(-1.0, 0.0)]);
        let found = roots(&p).unwrap();
        let cl = cluster(&p, &found, 1e-6);
        assert_eq!(cl.len(), 3);
    }

    #[test]
    fn multiple_root_near_infinity_merges_with_exact_pole() {
        // (z - 1e9)^2 style clusters appear as numerical roots near infinity.
        let p = from_roots(&[c(0.2, 0.1)]);
        let mut padded = p.clone();
        padded.push(ZERO);
        padded.push(ZERO);
        let found = roots(&padded).unwrap();
        let cl = cluster(&padded, &found, 1e-6);
        assert!(cl.iter().any(|x| x.0.is_infinite() && x.1 == 2));
    }

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = vec![c(1.0, 2.0), c(-3.0, 0.0), c(0.5, 0.5), c(2.0, -1.0)];
        let z = c(0.3, -0.7);
        let t = taylor_shift(&p, z);
        assert!((t[0] - eval(&p, z)).norm() < 1e-14);
        assert!((t[1] - eval(&derivative(&p), z)).norm() < 1e-14);
        assert!((t[3] - p[3]).norm() < 1e-15);
    }
}
