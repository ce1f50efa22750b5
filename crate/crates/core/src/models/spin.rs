//! Collective spin models: the general two-band Hamiltonian, Lipkin parity
//! sectors and the uniaxial model.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{smooth, ClosedForms, ModelDescriptor, Profiles};
use crate::error::{Error, Result};
use crate::numerics::{elliptic_e, elliptic_k, ScalarFn};
use crate::sequence::{spectral_range, BandMatrix, BandProfileSet, ProfileSet, TridiagonalMatrix};
use crate::spectra::Atom;

/// `c·√(x(1-x))` with derivatives.
fn sqrt_q(c: f64) -> ScalarFn {
    smooth(
        "sqrt(x(1-x))",
        move |x| c * (x * (1.0 - x)).sqrt(),
        move |x| c * (1.0 - 2.0 * x) / (2.0 * (x * (1.0 - x)).sqrt()),
        move |x| -c / (4.0 * (x * (1.0 - x)).powf(1.5)),
    )
}

/// `c·x(1-x)` with derivatives.
fn quad(c: f64) -> ScalarFn {
    smooth("x(1-x)", move |x| c * x * (1.0 - x), move |x| c * (1.0 - 2.0 * x), move |_| -2.0 * c)
}

/// `c/√(x(1-x))`.
fn inv_sqrt_q(c: f64) -> ScalarFn {
    ScalarFn::new("1/sqrt(x(1-x))", move |x| c / (x * (1.0 - x)).sqrt())
}

/// `H = [h·S + (gx Sx² + gy Sy²)/(2s)]/s` as a two-band sequence in `j = s`.
pub fn collective_spin(h: [f64; 3], gx: f64, gy: f64) -> Result<ModelDescriptor> {
    let [hx, hy, hz] = h;
    let g = gx + gy;
    let c00 = smooth(
        "(2x-1)hz + x(1-x)(gx+gy)",
        move |x| (2.0 * x - 1.0) * hz + x * (1.0 - x) * g,
        move |x| 2.0 * hz + (1.0 - 2.0 * x) * g,
        move |_| -2.0 * g,
    );
    let bp = BandProfileSet::new(
        "collective",
        vec![c00, sqrt_q(hx), quad((gx - gy) / 2.0)],
        vec![ScalarFn::constant(g / 4.0), inv_sqrt_q(hx / 8.0), ScalarFn::constant((gx - gy) / 8.0)],
        vec![sqrt_q(-hy), ScalarFn::constant(0.0)],
        vec![inv_sqrt_q(-hy / 8.0), ScalarFn::constant(0.0)],
    )?;
    Ok(ModelDescriptor {
        name: "collective".into(),
        parameters: vec![
            ("hx".into(), hx),
            ("hy".into(), hy),
            ("hz".into(), hz),
            ("gx".into(), gx),
            ("gy".into(), gy),
        ],
        profiles: Profiles::Band(bp),
        closed_forms: None,
        exact: None,
        notes: "j = s; couplings rescaled by 1/(2s) and the Hamiltonian by 1/s".into(),
    })
}

fn raise(s: f64, m: f64) -> f64 {
    (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

/// Exact collective spin matrix in the basis `|s, -s+n⟩`, scaled by `1/s`.
pub fn collective_spin_matrix(h: [f64; 3], gx: f64, gy: f64, two_s: usize) -> Result<BandMatrix> {
    if two_s < 1 {
        return Err(Error::Invalid("2s must be at least 1".into()));
    }
    let [hx, hy, hz] = h;
    let s = two_s as f64 / 2.0;
    let d = two_s + 1;
    let m = |n: usize| n as f64 - s;
    let diag = (0..d)
        .map(|n| {
            let mm = m(n);
            Complex64::new(hz * mm / s + (gx + gy) * (s * (s + 1.0) - mm * mm) / (4.0 * s * s), 0.0)
        })
        .collect();
    let first = (0..d)
        .map(|n| {
            if n < 1 {
                return Complex64::new(0.0, 0.0);
            }
            let c = raise(s, m(n) - 1.0);
            Complex64::new(hx, -hy) * (c / (2.0 * s))
        })
        .collect();
    let second = (0..d)
        .map(|n| {
            if n < 2 {
                return Complex64::new(0.0, 0.0);
            }
            let c = raise(s, m(n) - 2.0) * raise(s, m(n) - 1.0);
            Complex64::new((gx - gy) * c / (8.0 * s * s), 0.0)
        })
        .collect();
    Ok(BandMatrix {
        two_j: two_s,
        bands: vec![diag, first, second],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Sector matrix of `Sz + γ(S₊² + S₋²)/(4s)` divided by `2j`, for `D = 2j + 1`.
/// The even sector has `s = 2j`, the odd one `s = 2j + 1`.
pub fn lipkin_sector_matrix(gamma: f64, parity: Parity, two_j: usize) -> Result<TridiagonalMatrix> {
    if two_j < 1 {
        return Err(Error::Invalid("2j must be at least 1".into()));
    }
    let tj = two_j as f64;
    let (s, shift) = match parity {
        Parity::Even => (tj, 0.0),
        Parity::Odd => (tj + 1.0, 1.0),
    };
    let diag = (0..=two_j).map(|k| (-s + 2.0 * k as f64 + shift) / tj).collect();
    let offdiag = (1..=two_j)
        .map(|k| {
            let m = -s + 2.0 * k as f64 - 2.0 + shift;
            let r = (s - m) * (s + m + 1.0) * (s - m - 1.0) * (s + m + 2.0);
            gamma / (4.0 * s) * r.max(0.0).sqrt() / tj
        })
        .collect();
    TridiagonalMatrix::new(diag, offdiag)
}

pub fn lipkin(gamma: f64, parity: Parity) -> Result<ModelDescriptor> {
    let b1 = match parity {
        Parity::Even => ScalarFn::constant(gamma / 8.0),
        Parity::Odd => smooth(
            "γ(3-4x+4x²)/8",
            move |x| gamma * (3.0 - 4.0 * x + 4.0 * x * x) / 8.0,
            move |x| gamma * (8.0 * x - 4.0) / 8.0,
            move |_| gamma,
        ),
    };
    let name = match parity {
        Parity::Even => "lipkin-even",
        Parity::Odd => "lipkin-odd",
    };
    let p = ProfileSet::new(
        name,
        smooth("2x-1", |x| 2.0 * x - 1.0, |_| 2.0, |_| 0.0),
        ScalarFn::constant(0.0),
        quad(gamma),
        b1,
    )?;
    Ok(ModelDescriptor {
        name: name.into(),
        parameters: vec![("gamma".into(), gamma)],
        profiles: Profiles::Tridiagonal(p),
        closed_forms: None,
        exact: Some(Arc::new(move |two_j| lipkin_sector_matrix(gamma, parity, two_j))),
        notes: "one parity sector of Sz + γ(S₊²+S₋²)/(4s), rescaled by 1/(2j)".into(),
    })
}

/// Moments `⟨Qᵐ⟩` of `Q = x` from the seeds `(⟨Q⟩, ⟨Q²⟩)`. The recursion
/// closes for `m ≥ 3`, where every term that would need a negative moment has
/// a vanishing coefficient.
pub fn lipkin_moments(gamma: f64, lambda: f64, m: usize, seeds: (f64, f64)) -> Result<f64> {
    let (lo, hi) = spectral_range(lipkin(gamma, Parity::Even)?.tridiagonal()?);
    if !(lo..=hi).contains(&lambda) {
        return Err(Error::OutsideSpectrum(lambda));
    }
    let g2 = gamma * gamma;
    let a = [4.0 * g2, -8.0 * g2, 4.0 * (g2 - 1.0), 4.0 * (lambda + 1.0), -(lambda + 1.0).powi(2)];
    let mut q = vec![1.0, seeds.0, seeds.1];
    for k in 3..=m.max(2) {
        let mut s = 0.0;
        for (i, ai) in a.iter().enumerate().skip(1) {
            if i <= k {
                s += ai * (2.0 + i as f64 - 2.0 * k as f64) * q[k - i];
            }
        }
        q.push(s / (2.0 * a[0] * (k as f64 - 1.0)));
    }
    Ok(q[m])
}

/// Exact matrix of `(Sx - 2γ Sz²/s)/s` with `s = j`.
pub fn uniaxial_matrix(gamma: f64, two_s: usize) -> Result<TridiagonalMatrix> {
    if two_s < 1 {
        return Err(Error::Invalid("2s must be at least 1".into()));
    }
    let s = two_s as f64 / 2.0;
    let diag = (0..=two_s).map(|n| -2.0 * gamma * ((n as f64 - s) / s).powi(2)).collect();
    let offdiag = (1..=two_s)
        .map(|k| {
            let k = k as f64;
            (k * (2.0 * s - k + 1.0)).sqrt() / (2.0 * s)
        })
        .collect();
    TridiagonalMatrix::new(diag, offdiag)
}

/// Lower spectral edge of the uniaxial model.
pub fn uniaxial_lambda_minus(gamma: f64) -> f64 {
    if gamma < 0.25 {
        -1.0
    } else {
        -2.0 * gamma - 1.0 / (8.0 * gamma)
    }
}

struct UniaxialBranch {
    rho0: f64,
    g: f64,
}

fn uniaxial_upper(gamma: f64, lambda: f64) -> Result<UniaxialBranch> {
    let a = (1.0 + 8.0 * gamma * lambda + 16.0 * gamma * gamma).sqrt();
    let b = (a - 1.0 - 4.0 * gamma * lambda) / (2.0 * a);
    let (k, e) = (elliptic_k(b)?, elliptic_e(b)?);
    Ok(UniaxialBranch {
        rho0: k / (a.sqrt() * PI),
        g: (2.0 * a * e - (1.0 + a + 8.0 * lambda * gamma) * k) / (8.0 * PI * gamma * a.sqrt()),
    })
}

fn uniaxial_lower(gamma: f64, lambda: f64) -> Result<UniaxialBranch> {
    let r = 4.0 * gamma * (lambda * lambda - 1.0).max(0.0).sqrt();
    let (cp, cm) = (-1.0 - 4.0 * lambda * gamma + r, -1.0 - 4.0 * lambda * gamma - r);
    let (k, e) = (elliptic_k(cm / cp)?, elliptic_e(cm / cp)?);
    Ok(UniaxialBranch {
        rho0: 2.0 * k / (PI * cp.sqrt()),
        g: (cp * e + (cm + 1.0) * k) / (4.0 * PI * gamma * cp.sqrt()),
    })
}

fn uniaxial_branch(gamma: f64, lambda: f64) -> Result<(UniaxialBranch, (f64, f64))> {
    let lo = uniaxial_lambda_minus(gamma);
    if !(lo..=1.0).contains(&lambda) {
        return Err(Error::OutsideSpectrum(lambda));
    }
    if lambda >= -1.0 {
        Ok((uniaxial_upper(gamma, lambda)?, (-1.0, 1.0)))
    } else {
        Ok((uniaxial_lower(gamma, lambda)?, (lo, -1.0)))
    }
}

/// `d/dλ` of the bracketed smooth part of `ρ⁽¹⁾`, by a five-point stencil kept
/// inside the branch.
fn uniaxial_rho1(gamma: f64, lambda: f64) -> Result<f64> {
    let (_, (lo, hi)) = uniaxial_branch(gamma, lambda)?;
    let h = (1e-4_f64).min((lambda - lo).min(hi - lambda) / 100.0);
    if h <= 1e-12 {
        return Err(Error::Invalid(format!("ρ1 is singular at the branch edge {lambda}")));
    }
    let g = |l: f64| -> Result<f64> {
        Ok(if hi > -1.0 {
            uniaxial_upper(gamma, l)?.g
        } else {
            uniaxial_lower(gamma, l)?.g
        })
    };
    Ok((g(lambda - 2.0 * h)? - 8.0 * g(lambda - h)? + 8.0 * g(lambda + h)? - g(lambda + 2.0 * h)?) / (12.0 * h))
}

/// Printed δ-atoms of `ρ⁽¹⁾` for the uniaxial model.
pub fn uniaxial_atoms(gamma: f64) -> Vec<Atom> {
    let mut atoms = vec![Atom {
        location: 1.0,
        weight: 1.0 / (4.0 * (1.0 + 4.0 * gamma).sqrt()),
    }];
    if gamma < 0.25 {
        atoms.push(Atom {
            location: -1.0,
            weight: 1.0 / (4.0 * (1.0 - 4.0 * gamma).sqrt()),
        });
    } else if gamma > 0.25 {
        atoms.push(Atom {
            location: uniaxial_lambda_minus(gamma),
            weight: 2.0 * gamma / (16.0 * gamma * gamma - 1.0).sqrt(),
        });
    }
    atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    atoms
}

pub fn uniaxial(gamma: f64) -> Result<ModelDescriptor> {
    if gamma < 0.0 {
        return Err(Error::Invalid(format!("uniaxial coupling must be non-negative, got {gamma}")));
    }
    let p = ProfileSet::new(
        "uniaxial",
        smooth(
            "-2γ(1-2x)²",
            move |x| -2.0 * gamma * (1.0 - 2.0 * x).powi(2),
            move |x| 8.0 * gamma * (1.0 - 2.0 * x),
            move |_| -16.0 * gamma,
        ),
        ScalarFn::constant(0.0),
        sqrt_q(1.0),
        inv_sqrt_q(1.0 / 8.0),
    )?;
    let closed_forms = (gamma > 0.0).then(|| ClosedForms {
        rho0: Arc::new(move |l| Ok(uniaxial_branch(gamma, l)?.0.rho0)),
        rho1: Arc::new(move |l| uniaxial_rho1(gamma, l)),
        d0: None,
        d1: None,
        atoms: uniaxial_atoms(gamma),
    });
    Ok(ModelDescriptor {
        name: "uniaxial".into(),
        parameters: vec![("gamma".into(), gamma)],
        profiles: Profiles::Tridiagonal(p),
        closed_forms,
        exact: Some(Arc::new(move |two_s| uniaxial_matrix(gamma, two_s))),
        notes: "(Sx - 4γSz²/N)/j with j = s = N/2".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{eig_dense_hermitian, eig_tridiagonal};
    use crate::sequence::materialize;
    use crate::spectra::Spectrum;
    use crate::states::Eigenstate;

    #[test]
    fn collective_profiles() {
        let m = collective_spin([0.0, 0.0, 1.0], 0.0, 0.0).unwrap();
        let bp = m.band().unwrap();
        for &x in &[0.0, 0.3, 1.0] {
            assert!((bp.fs(0, x, 0.7) - (2.0 * x - 1.0)).abs() < 1e-14);
            assert!(bp.fs(1, x.clamp(0.1, 0.9), 0.7).abs() < 1e-14);
        }
        let m = collective_spin([0.3, 0.2, 1.0], 0.7, 0.7).unwrap();
        let bp = m.band().unwrap();
        assert!(bp.c0[2].eval(0.4).abs() < 1e-15);
        for f in bp.c0.iter().skip(1).chain(&bp.d0) {
            assert!(f.eval(0.0).abs() < 1e-15 && f.eval(1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sz_spectrum_is_uniform() {
        let h = collective_spin_matrix([0.0, 0.0, 1.0], 0.0, 0.0, 80).unwrap();
        let e = eig_dense_hermitian(&h).unwrap();
        for (n, v) in e.eigenvalues.iter().enumerate() {
            assert!((v - (n as f64 - 40.0) / 40.0).abs() < 1e-12);
        }
    }

    #[test]
    fn materialized_band_matches_exact_to_first_order() {
        let model = collective_spin([1.0, 0.4, 0.3], -0.4, -0.1).unwrap();
        let exact = collective_spin_matrix([1.0, 0.4, 0.3], -0.4, -0.1, 200).unwrap();
        let sampled = crate::sequence::materialize_band(&model.band().unwrap(), 200).unwrap();
        let j = 100.0;
        for m in 0..3 {
            for n in 10 + m..190 {
                let d = (exact.bands[m][n] - sampled.bands[m][n]).norm();
                assert!(d < 5.0 / (j * j), "band {m} row {n}: {d}");
            }
        }
    }

    #[test]
    fn lipkin_sectors_partition_collective_spectrum() {
        let gamma = 1.3;
        let s = 30usize;
        let full = collective_spin_matrix([0.0, 0.0, 1.0], gamma, -gamma, 2 * s).unwrap();
        let mut all: Vec<f64> = eig_dense_hermitian(&full).unwrap().eigenvalues.iter().map(|v| v * s as f64).collect();
        let even = lipkin_sector_matrix(gamma, Parity::Even, s).unwrap();
        let odd = lipkin_sector_matrix(gamma, Parity::Odd, s - 1).unwrap();
        let mut parts: Vec<f64> = Vec::new();
        parts.extend(eig_tridiagonal(&even, false).unwrap().eigenvalues.iter().map(|v| v * s as f64));
        parts.extend(eig_tridiagonal(&odd, false).unwrap().eigenvalues.iter().map(|v| v * (s - 1) as f64));
        all.sort_by(f64::total_cmp);
        parts.sort_by(f64::total_cmp);
        assert_eq!(all.len(), parts.len());
        for (a, b) in all.iter().zip(&parts) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn lipkin_profiles_match_sector_matrices() {
        for parity in [Parity::Even, Parity::Odd] {
            let model = lipkin(2.5, parity).unwrap();
            for two_j in [200usize, 400] {
                let exact = model.matrix(two_j).unwrap();
                let sampled = materialize(model.tridiagonal().unwrap(), two_j).unwrap();
                let j = two_j as f64 / 2.0;
                let interior = |k: usize| (k as f64 / two_j as f64 - 0.5).abs() < 0.4;
                let worst = exact
                    .offdiag
                    .iter()
                    .zip(&sampled.offdiag)
                    .chain(exact.diag.iter().zip(&sampled.diag))
                    .enumerate()
                    .filter(|(k, _)| interior(k % two_j))
                    .map(|(_, (a, b))| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(worst * j * j < 1.0, "{parity:?} {two_j}: {worst}");
                let edge = (exact.offdiag[0] - sampled.offdiag[0]).abs();
                assert!(edge * j < 0.2, "{parity:?} {two_j}: edge {edge}");
            }
        }
    }

    #[test]
    fn moments_match_quadrature() {
        let model = lipkin(2.5, Parity::Even).unwrap();
        let p = model.tridiagonal().unwrap();
        let st = Eigenstate::new(p, -0.67).unwrap();
        let seeds = (st.moment(1).unwrap(), st.moment(2).unwrap());
        assert_eq!(lipkin_moments(2.5, -0.67, 2, seeds).unwrap(), seeds.1);
        for m in [3, 4, 5] {
            let r = lipkin_moments(2.5, -0.67, m, seeds).unwrap();
            assert!((r - st.moment(m as i32).unwrap()).abs() < 1e-6, "m={m}");
        }
    }

    #[test]
    fn uniaxial_examples() {
        assert_eq!(uniaxial_lambda_minus(0.1), -1.0);
        let atoms = uniaxial_atoms(0.5);
        assert!((atoms[0].weight - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let model = uniaxial(0.5).unwrap();
        let (lo, hi) = spectral_range(model.tridiagonal().unwrap());
        assert!((lo - uniaxial_lambda_minus(0.5)).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uniaxial_rho0_matches_generic() {
        for gamma in [0.1, 0.5, 1.0] {
            let model = uniaxial(gamma).unwrap();
            let sp = Spectrum::new(model.tridiagonal().unwrap());
            let cf = model.closed_forms.as_ref().unwrap();
            let (lo, hi) = sp.range();
            for k in 1..30 {
                let l = lo + (hi - lo) * k as f64 / 30.0;
                if (l + 1.0).abs() < 1e-3 {
                    continue;
                }
                let (a, b) = ((cf.rho0)(l).unwrap(), sp.rho0(l).unwrap());
                assert!((a - b).abs() < 1e-7, "γ={gamma} λ={l}: {a} vs {b}");
            }
        }
    }
}
