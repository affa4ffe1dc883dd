//! The 28 bitangents of a smooth plane quartic.
//!
//! In a seeded random unitary frame, lines `x_p = m x_a + c x_b` are
//! parametrized by `s -> s P + R` with `P = e_a + m e_p`, `R = e_b + c e_p`.
//! Writing the restriction as `sum a_k s^k`, the line is a bitangent iff the
//! monic quartic is a square, i.e. iff
//!
//! ```text
//! P1 = 8 a4^2 a1 - a3 (4 a2 a4 - a3^2) = 0
//! P2 = 64 a4^3 a0 - (4 a2 a4 - a3^2)^2 = 0
//! ```
//!
//! The resultant of `P1, P2` in `c` equals `a4(m)^8` times a degree-28
//! polynomial in `m` whose roots are the slopes of the bitangents.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};

use super::Quartic;
use crate::numkernel::{roots_univariate, seeded_unitary, sylvester_determinant, ToleranceProfile, UnivariatePoly, C64};
use crate::plane::{coeff_distance, lines, HomogeneousForm, ProjPoint};
use crate::{Error, Result};

pub const BITANGENT_COUNT: usize = 28;

/// A bitangent line with its two points of contact.
#[derive(Debug, Clone, PartialEq)]
pub struct BitangentRecord {
    pub line: HomogeneousForm,
    pub contacts: [ProjPoint; 2],
    /// Projective distance between the restriction of the quartic to the
    /// line and the square built from the contacts.
    pub residual: f64,
}

const SAMPLES: usize = 32;
const FRAME_ATTEMPTS: u64 = 3;
const SAME_LINE: f64 = 1e-6;

/// All 28 bitangents, sorted by their canonical line coefficients.
pub fn bitangents(c: &Quartic, profile: &ToleranceProfile) -> Result<Vec<BitangentRecord>> {
    let mut found = 0;
    for attempt in 0..FRAME_ATTEMPTS {
        let u = seeded_unitary(3, profile.sub_seed(0xb172_0000 + attempt));
        let cu = c.form().substitute(&u);
        let mut merged: Vec<BitangentRecord> = Vec::new();
        for pivot in 0..3 {
            for rec in chart_bitangents(c, &cu, &u, pivot, profile)? {
                match merged
                    .iter_mut()
                    .find(|r| lines::line_distance(&r.line, &rec.line) < SAME_LINE)
                {
                    Some(r) if rec.residual < r.residual => *r = rec,
                    Some(_) => {}
                    None => merged.push(rec),
                }
            }
        }
        found = merged.len();
        if found != BITANGENT_COUNT {
            continue;
        }
        merged.sort_by(|a, b| crate::plane::point_order(&lines::line_point(&a.line), &lines::line_point(&b.line)));
        for (i, a) in merged.iter().enumerate() {
            for b in &merged[i + 1..] {
                if lines::line_distance(&a.line, &b.line) < profile.eps_point {
                    return Err(Error::NonGeneric("two bitangents coincide".into()));
                }
            }
        }
        let contacts: Vec<ProjPoint> = merged.iter().flat_map(|r| r.contacts.iter().cloned()).collect();
        c.check_smooth_at(&contacts, 1e-8)?;
        return Ok(merged);
    }
    Err(Error::CountMismatch {
        what: "bitangents".into(),
        expected: BITANGENT_COUNT,
        found,
    })
}

/// Coefficients `a_0..a_4` of the restriction as polynomials in `c` for a
/// fixed slope `m`.
fn restriction_in_c(cu: &HomogeneousForm, pivot: usize, m: C64) -> [UnivariatePoly; 5] {
    let (a, b) = others(pivot);
    let mut frame = DMatrix::<C64>::zeros(3, 3);
    frame[(a, 0)] = C64::new(1.0, 0.0);
    frame[(pivot, 0)] = m;
    frame[(pivot, 1)] = C64::new(1.0, 0.0);
    frame[(b, 2)] = C64::new(1.0, 0.0);
    // g(s, c, w) = C(s P + c e_p + w e_b)
    let g = cu.substitute(&frame);
    std::array::from_fn(|k| {
        UnivariatePoly::new(
            (0..=4 - k)
                .map(|j| g.coefficient(&[k as u8, j as u8, (4 - k - j) as u8]))
                .collect(),
        )
    })
}

fn others(pivot: usize) -> (usize, usize) {
    match pivot {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// `(P1, P2)` as polynomials in `c`.
fn square_conditions(a: &[UnivariatePoly; 5]) -> (UnivariatePoly, UnivariatePoly) {
    let k = |x: f64| UnivariatePoly::new(vec![C64::new(x, 0.0)]);
    let sub = |x: &UnivariatePoly, y: &UnivariatePoly| {
        let n = x.coeffs().len().max(y.coeffs().len());
        UnivariatePoly::new(
            (0..n)
                .map(|i| x.coeffs().get(i).copied().unwrap_or_default() - y.coeffs().get(i).copied().unwrap_or_default())
                .collect(),
        )
    };
    let a3sq = a[3].mul(&a[3]);
    let inner = sub(&k(4.0).mul(&a[2]).mul(&a[4]), &a3sq);
    let p1 = sub(&k(8.0).mul(&a[4]).mul(&a[4]).mul(&a[1]), &a[3].mul(&inner));
    let p2 = sub(&k(64.0).mul(&a[4]).mul(&a[4]).mul(&a[4]).mul(&a[0]), &inner.mul(&inner));
    (p1, p2)
}

fn padded(p: &UnivariatePoly, len: usize) -> Vec<C64> {
    let mut v = p.coeffs().to_vec();
    v.resize(len, C64::new(0.0, 0.0));
    v
}

fn chart_bitangents(
    c: &Quartic,
    cu: &HomogeneousForm,
    u: &DMatrix<C64>,
    pivot: usize,
    profile: &ToleranceProfile,
) -> Result<Vec<BitangentRecord>> {
    let samples: Vec<C64> = (0..SAMPLES)
        .map(|k| {
            let m = C64::from_polar(1.0, TAU * k as f64 / SAMPLES as f64);
            let a = restriction_in_c(cu, pivot, m);
            let (p1, p2) = square_conditions(&a);
            let a4 = a[4].eval(C64::new(0.0, 0.0));
            sylvester_determinant(&padded(&p1, 4), &padded(&p2, 5)) / a4.powu(8)
        })
        .collect();
    let mut coeffs: Vec<C64> = (0..SAMPLES)
        .map(|j| {
            samples
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -TAU * (j * k) as f64 / SAMPLES as f64))
                .sum::<C64>()
                / SAMPLES as f64
        })
        .collect();
    coeffs.truncate(BITANGENT_COUNT + 1);
    let top = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while coeffs.last().is_some_and(|z| z.norm() <= 1e-10 * top) {
        coeffs.pop();
    }
    let slope_poly = UnivariatePoly::new(coeffs);
    if slope_poly.degree() == 0 {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    for root in roots_univariate(&slope_poly, profile)? {
        let m = root.value;
        let a = restriction_in_c(cu, pivot, m);
        let (p1, p2) = square_conditions(&a);
        if p1.degree() == 0 {
            continue;
        }
        let rel = |z: C64| p2.eval(z).norm() / p2.abs_eval(z.norm()).max(f64::MIN_POSITIVE);
        let Some(cc) = roots_univariate(&p1, profile)?
            .into_iter()
            .map(|r| r.value)
            .min_by(|a, b| rel(*a).total_cmp(&rel(*b)))
        else {
            continue;
        };
        if let Some(rec) = polish_and_record(c, cu, u, pivot, m, cc, profile)? {
            if rec.residual <= profile.eps_residual {
                out.push(rec);
            }
        }
    }
    Ok(out)
}

struct LineState {
    m: C64,
    c: C64,
    u: C64,
    v: C64,
}

fn line_vectors(pivot: usize, m: C64, c: C64) -> ([C64; 3], [C64; 3]) {
    let (a, b) = others(pivot);
    let mut p = [C64::new(0.0, 0.0); 3];
    let mut r = [C64::new(0.0, 0.0); 3];
    p[a] = C64::new(1.0, 0.0);
    p[pivot] = m;
    r[b] = C64::new(1.0, 0.0);
    r[pivot] = c;
    (p, r)
}

fn square_system(cu: &HomogeneousForm, dp: &HomogeneousForm, pivot: usize, s: &LineState) -> (DVector<C64>, DMatrix<C64>) {
    let (p, r) = line_vectors(pivot, s.m, s.c);
    let a = cu.restrict(&r, &p);
    let b = dp.restrict(&r, &p);
    let da_dm = |k: usize| if k == 0 { C64::new(0.0, 0.0) } else { b[k - 1] };
    let da_dc = |k: usize| if k < 4 { b[k] } else { C64::new(0.0, 0.0) };
    let (u, v) = (s.u, s.v);
    let two = 2.0;
    let f = DVector::from_vec(vec![
        a[3] - a[4] * u * two,
        a[2] - a[4] * (u * u + v * two),
        a[1] - a[4] * u * v * two,
        a[0] - a[4] * v * v,
    ]);
    let w = [u * two, u * u + v * two, u * v * two, v * v];
    let mut j = DMatrix::<C64>::zeros(4, 4);
    for (row, k) in [3usize, 2, 1, 0].into_iter().enumerate() {
        j[(row, 0)] = da_dm(k) - w[row] * da_dm(4);
        j[(row, 1)] = da_dc(k) - w[row] * da_dc(4);
    }
    j[(0, 2)] = -a[4] * two;
    j[(1, 2)] = -a[4] * u * two;
    j[(1, 3)] = -a[4] * two;
    j[(2, 2)] = -a[4] * v * two;
    j[(2, 3)] = -a[4] * u * two;
    j[(3, 3)] = -a[4] * v * two;
    (f, j)
}

fn polish_and_record(
    c: &Quartic,
    cu: &HomogeneousForm,
    u: &DMatrix<C64>,
    pivot: usize,
    m: C64,
    cc: C64,
    profile: &ToleranceProfile,
) -> Result<Option<BitangentRecord>> {
    let dp = cu.partial(pivot);
    let (p, r) = line_vectors(pivot, m, cc);
    let a = cu.restrict(&r, &p);
    if a[4].norm() == 0.0 {
        return Ok(None);
    }
    let uu = a[3] / (a[4] * 2.0);
    let mut state = LineState {
        m,
        c: cc,
        u: uu,
        v: (a[2] / a[4] - uu * uu) / 2.0,
    };
    let size = |f: &DVector<C64>| f.norm();
    let (mut f, mut j) = square_system(cu, &dp, pivot, &state);
    for _ in 0..profile.max_newton_iters.min(40) {
        let Some(step) = j.clone().lu().solve(&f) else {
            break;
        };
        let trial = LineState {
            m: state.m - step[0],
            c: state.c - step[1],
            u: state.u - step[2],
            v: state.v - step[3],
        };
        let (ft, jt) = square_system(cu, &dp, pivot, &trial);
        if size(&ft) >= size(&f) {
            break;
        }
        state = trial;
        f = ft;
        j = jt;
    }

    let (a_idx, b_idx) = others(pivot);
    let mut ly = [C64::new(0.0, 0.0); 3];
    ly[pivot] = C64::new(1.0, 0.0);
    ly[a_idx] = -state.m;
    ly[b_idx] = -state.c;
    // l_x = U^{-T} l_y = conj(U) l_y for unitary U
    let lx: Vec<C64> = (0..3).map(|i| (0..3).map(|k| u[(i, k)].conj() * ly[k]).sum()).collect();
    let line = HomogeneousForm::linear(&lx).normalized();

    let roots = roots_univariate(&UnivariatePoly::new(vec![state.v, state.u, C64::new(1.0, 0.0)]), profile)?;
    if roots.len() != 2 {
        // hyperflex: both contacts coincide
        return Ok(None);
    }
    let (p, r) = line_vectors(pivot, state.m, state.c);
    let contacts: Vec<ProjPoint> = roots
        .iter()
        .map(|s| {
            let y: Vec<C64> = (0..3).map(|i| p[i] * s.value + r[i]).collect();
            let x: Vec<C64> = (0..3).map(|i| (0..3).map(|k| u[(i, k)] * y[k]).sum()).collect();
            ProjPoint::new(&x)
        })
        .collect::<Result<_>>()?;
    let contacts: [ProjPoint; 2] = [contacts[0].clone(), contacts[1].clone()];
    let residual = double_contact_residual(c.form(), &line, &contacts);
    Ok(Some(BitangentRecord {
        line,
        contacts,
        residual,
    }))
}

/// Orthonormal basis `(A, B)` of the points of a line.
fn line_basis(line: &HomogeneousForm) -> ([C64; 3], [C64; 3]) {
    let l = line.coeffs();
    let nl = line.norm();
    let n: Vec<C64> = l.iter().map(|x| x.conj() / nl).collect();
    let k = (0..3)
        .min_by(|&i, &j| n[i].norm().total_cmp(&n[j].norm()))
        .expect("three coordinates");
    // A = e_k - n <n, e_k>
    let mut a = [C64::new(0.0, 0.0); 3];
    for i in 0..3 {
        a[i] = -n[i] * n[k].conj();
    }
    a[k] += 1.0;
    let na = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    a.iter_mut().for_each(|x| *x /= na);
    let cr = lines::cross(&n, &a);
    let b = [cr[0].conj(), cr[1].conj(), cr[2].conj()];
    (a, b)
}

/// Distance between the quartic restricted to the line and the square of the
/// binary quadratic vanishing at the contacts.
pub fn double_contact_residual(c: &HomogeneousForm, line: &HomogeneousForm, contacts: &[ProjPoint; 2]) -> f64 {
    let (a, b) = line_basis(line);
    // h(X) = C(X A + B), coefficients of X^k W^(4-k)
    let h = c.restrict(&b, &a);
    let param = |p: &ProjPoint| {
        let x: C64 = a.iter().zip(p.coords()).map(|(ai, pi)| ai.conj() * pi).sum();
        let w: C64 = b.iter().zip(p.coords()).map(|(bi, pi)| bi.conj() * pi).sum();
        (x, w)
    };
    let mut g = vec![C64::new(1.0, 0.0)];
    for p in contacts {
        let (x, w) = param(p);
        for _ in 0..2 {
            // multiply by (w X - x W)
            let mut next = vec![C64::new(0.0, 0.0); g.len() + 1];
            for (k, &gk) in g.iter().enumerate() {
                next[k + 1] += gk * w;
                next[k] -= gk * x;
            }
            g = next;
        }
    }
    coeff_distance(&h, &g)
}
