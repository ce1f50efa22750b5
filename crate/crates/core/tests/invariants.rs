use std::collections::BTreeMap;

use asymspec::models::{
    alternating_states, by_name, collective_spin, collective_spin_matrix, jacobi, laguerre, lipkin,
    lipkin_sector_matrix, polynomial_roots, toeplitz, uniaxial, ModelDescriptor, Parity,
};
use asymspec::numerics::ScalarFn;
use asymspec::oracle::{eig_dense_hermitian, eig_tridiagonal, eigenpair, expectation_value};
use asymspec::sequence::{spectral_range, BandProfileSet, TridiagonalMatrix};
use asymspec::spectra::{self, band_d0_d1, stieltjes_d0, stieltjes_d1, trace_t0, trace_t1, BandSpectrum, Spectrum};
use asymspec::states::{assign_branch, gap_check, Branch, Eigenstate, ObservableProfiles};

macro_rules! per_model {
    ($check:ident: $($test:ident => $name:literal),* $(,)?) => {
        $(
            #[test]
            fn $test() {
                $check($name);
            }
        )*
    };
}

fn tridiagonal_models() -> Vec<ModelDescriptor> {
    let params = BTreeMap::new();
    ["toeplitz", "alternating", "lipkin-even", "lipkin-odd", "uniaxial", "laguerre", "jacobi"]
        .iter()
        .map(|n| by_name(n, &params).unwrap())
        .collect()
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64)
}

fn test_functions() -> Vec<ScalarFn> {
    vec![
        ScalarFn::new("x", |x| x).with_derivative(|_| 1.0).with_second_derivative(|_| 0.0),
        ScalarFn::new("x^2", |x| x * x).with_derivative(|x| 2.0 * x).with_second_derivative(|_| 2.0),
        ScalarFn::new("x^4", |x| x.powi(4))
            .with_derivative(|x| 4.0 * x.powi(3))
            .with_second_derivative(|x| 12.0 * x * x),
        ScalarFn::new("tanh", f64::tanh)
            .with_derivative(|x| 1.0 / x.cosh().powi(2))
            .with_second_derivative(|x| -2.0 * x.tanh() / x.cosh().powi(2)),
    ]
}

fn check_masses(name: &str) {
    let m = by_name(name, &BTreeMap::new()).unwrap();
    let p = m.tridiagonal().unwrap();
    let sp = Spectrum::new(p);
    let (lo, hi) = sp.range();
    let mut last = 0.0;
    for k in 0..=200 {
        let l = lo - 0.1 + (hi - lo + 0.2) * k as f64 / 200.0;
        let v = sp.d0(l).unwrap();
        assert!(v >= last - 1e-12, "{name}: d0 decreases at {l}");
        last = v;
    }
    let rho0 = spectra::rho(p, 0).unwrap();
    let mass = rho0.continuous_mass(1e-9).unwrap();
    assert!((mass - 1.0).abs() < 1e-8, "{name}: ∫ρ0 = {mass}");
    let rho1 = spectra::rho(p, 1).unwrap();
    let total = rho1.continuous_mass(1e-7).unwrap() + rho1.atom_mass();
    assert!(total.abs() < 1e-6, "{name}: ∫ρ1 + atoms = {total}");
}

per_model! { check_masses:
    masses_toeplitz => "toeplitz",
    masses_alternating => "alternating",
    masses_lipkin_even => "lipkin-even",
    masses_lipkin_odd => "lipkin-odd",
    masses_uniaxial => "uniaxial",
    masses_laguerre => "laguerre",
    masses_jacobi => "jacobi",
}

fn check_trace(name: &str) {
    let m = by_name(name, &BTreeMap::new()).unwrap();
    let p = m.tridiagonal().unwrap();
    let sp = Spectrum::new(p);
    for f in test_functions() {
        let (t0, s0) = (trace_t0(p, &f, 1e-11).unwrap(), stieltjes_d0(&sp, &f, 1e-11).unwrap());
        let (t1, s1) = (trace_t1(p, &f, 1e-11).unwrap(), stieltjes_d1(&sp, &f, 1e-11).unwrap());
        assert!((t0 - s0).abs() < 1e-6 * t0.abs().max(1.0), "{name} {}: T0 {t0} vs {s0}", f.label());
        assert!((t1 - s1).abs() < 1e-6 * t1.abs().max(1.0), "{name} {}: T1 {t1} vs {s1}", f.label());
    }
}

per_model! { check_trace:
    trace_toeplitz => "toeplitz",
    trace_alternating => "alternating",
    trace_lipkin_even => "lipkin-even",
    trace_lipkin_odd => "lipkin-odd",
    trace_uniaxial => "uniaxial",
    trace_laguerre => "laguerre",
    trace_jacobi => "jacobi",
}

#[test]
fn trace_examples() {
    let p = toeplitz(0.0, 1.0).unwrap();
    let p = p.tridiagonal().unwrap();
    let one = ScalarFn::constant(1.0);
    assert!((trace_t0(p, &one, 1e-12).unwrap() - 1.0).abs() < 1e-12);
    assert!(trace_t1(p, &one, 1e-12).unwrap().abs() < 1e-12);
    let cube = ScalarFn::new("x^3", |x| x.powi(3)).with_derivative(|x| 3.0 * x * x);
    assert!(trace_t1(p, &cube, 1e-12).unwrap().abs() < 1e-10);
}

#[test]
fn closed_forms_agree_with_the_generic_pipeline() {
    let models = [
        uniaxial(0.5).unwrap(),
        laguerre(1.0, 5.0).unwrap(),
        jacobi(1.0, 0.5, 2.0, -0.3).unwrap(),
        jacobi(0.5, 0.0, 0.5, 0.0).unwrap(),
    ];
    for m in &models {
        let sp = Spectrum::new(m.tridiagonal().unwrap());
        let cf = m.closed_forms.as_ref().unwrap();
        let (lo, hi) = sp.range();
        let singular = sp.singular_points();
        for l in grid(lo, hi, 30) {
            if singular.iter().any(|s| (s - l).abs() < 1e-2) {
                continue;
            }
            let (a, b) = ((cf.rho0)(l).unwrap(), sp.rho0(l).unwrap());
            assert!((a - b).abs() < 1e-6, "{} ρ0({l}): {a} vs {b}", m.name);
            let (a, b) = ((cf.rho1)(l).unwrap(), sp.rho1_continuous(l).unwrap());
            assert!((a - b).abs() < 1e-6, "{} ρ1({l}): {a} vs {b}", m.name);
        }
        let generic = sp.atoms().unwrap();
        for atom in &cf.atoms {
            let w = generic
                .iter()
                .find(|g| (g.location - atom.location).abs() < 1e-6)
                .map_or(0.0, |g| g.weight);
            assert!((w - atom.weight).abs() < 1e-6, "{} atom at {}: {w} vs {}", m.name, atom.location, atom.weight);
        }
    }
}

#[test]
fn laguerre_atom_at_upper_edge() {
    let m = laguerre(1.0, 5.0).unwrap();
    let atoms = Spectrum::new(m.tridiagonal().unwrap()).atoms().unwrap();
    let top = atoms.iter().max_by(|a, b| a.location.total_cmp(&b.location)).unwrap();
    assert!((top.weight + 0.125).abs() < 1e-6, "{top:?}");
}

#[test]
fn lipkin_has_no_edge_terms_and_index_offset_is_a_quarter() {
    let m = lipkin(2.5, Parity::Even).unwrap();
    let sp = Spectrum::new(m.tridiagonal().unwrap());
    let (lo, hi) = sp.range();
    for l in grid(lo, hi, 20) {
        assert_eq!(sp.d1_edge(0.0, l), 0.0);
        assert_eq!(sp.d1_edge(1.0, l), 0.0);
        assert!((sp.index(l, 1).unwrap() - sp.d1(l).unwrap() - 0.25).abs() < 1e-15);
    }
    let t = toeplitz(0.0, 1.0).unwrap();
    let t = Spectrum::new(t.tridiagonal().unwrap());
    assert!((t.index(0.0, 0).unwrap() - 0.5).abs() < 1e-12);
    assert!(t.d1(0.0).unwrap().abs() < 1e-12);
}

#[test]
fn linear_order_beats_lowest_order_on_lipkin_eigenvalues() {
    let m = lipkin(2.5, Parity::Even).unwrap();
    let sp = Spectrum::new(m.tridiagonal().unwrap());
    let e = eig_tridiagonal(&m.matrix(120).unwrap(), false).unwrap();
    let dim = e.dim() as f64;
    let (mut worst_l, mut worst_0) = (0.0f64, 0.0f64);
    for (k, &l) in e.eigenvalues.iter().enumerate() {
        let target = (k + 1) as f64 / dim;
        worst_l = worst_l.max((sp.d0(l).unwrap() + (sp.d1(l).unwrap() + 0.25) / 60.0 - target).abs());
        worst_0 = worst_0.max((sp.d0(l).unwrap() - target).abs());
    }
    assert!(worst_l < worst_0, "{worst_l} vs {worst_0}");
}

#[test]
fn lipkin_staircase_richardson() {
    // averaging over λ bins suppresses the step noise of each staircase
    let m = lipkin(2.5, Parity::Even).unwrap();
    let sp = Spectrum::new(m.tridiagonal().unwrap());
    let e1 = eig_tridiagonal(&m.matrix(400).unwrap(), false).unwrap();
    let e2 = eig_tridiagonal(&m.matrix(800).unwrap(), false).unwrap();
    let smoothed = |e: &asymspec::oracle::EigenDecomposition, l: f64| {
        let width = 0.02;
        (0..41)
            .map(|k| asymspec::oracle::staircase(e, l - width / 2.0 + width * k as f64 / 40.0))
            .sum::<f64>()
            / 41.0
    };
    let mut total = 0.0;
    let pts: Vec<f64> = grid(-0.9, 0.9, 20).collect();
    for &l in &pts {
        let d0 = |x: f64| sp.d0(x).unwrap();
        let band = |x: f64| (0..41).map(|k| d0(x - 0.01 + 0.02 * k as f64 / 40.0)).sum::<f64>() / 41.0;
        let r1 = 200.0 * (smoothed(&e1, l) - band(l));
        let r2 = 400.0 * (smoothed(&e2, l) - band(l));
        total += (r2 - r1).abs();
    }
    assert!(total / pts.len() as f64 <= 0.1, "{}", total / pts.len() as f64);
}

#[test]
fn band_embedding_reproduces_tridiagonal_distributions() {
    let m = lipkin(2.5, Parity::Even).unwrap();
    let p = m.tridiagonal().unwrap();
    let bp = BandProfileSet::from_profiles(p).unwrap();
    let sp = Spectrum::new(p);
    let (lo, hi) = spectral_range(p);
    for l in grid(lo, hi, 20) {
        let (b0, b1) = band_d0_d1(&bp, l).unwrap();
        assert!((b0 - sp.d0(l).unwrap()).abs() < 1e-6, "d0 at {l}");
        assert!((b1 - sp.d1(l).unwrap()).abs() < 1e-6, "d1 at {l}: {b1} vs {}", sp.d1(l).unwrap());
    }
}

#[test]
fn band_examples() {
    let m = collective_spin([0.0, 0.0, 1.0], 0.0, 0.0).unwrap();
    let sp = BandSpectrum::new(&m.band().unwrap());
    for l in grid(-1.0, 1.0, 10) {
        assert!((sp.d0(l).unwrap() - (l + 1.0) / 2.0).abs() < 1e-8);
    }
    let m = collective_spin([1.0, 0.0, 0.3], -0.4, -0.1).unwrap();
    let sp = BandSpectrum::new(&m.band().unwrap());
    let (_, hi) = sp.range();
    assert_eq!(sp.d0(hi + 0.1).unwrap(), 1.0);
}

#[test]
fn dense_and_tridiagonal_oracles_agree() {
    let m = lipkin_sector_matrix(2.5, Parity::Even, 80).unwrap();
    let dense = eig_dense_hermitian(&asymspec::sequence::BandMatrix::from_tridiagonal(&m)).unwrap();
    let tri = eig_tridiagonal(&m, false).unwrap();
    for (a, b) in dense.eigenvalues.iter().zip(&tri.eigenvalues) {
        assert!((a - b).abs() < 1e-9);
    }
    let sz = eig_dense_hermitian(&collective_spin_matrix([0.0, 0.0, 1.0], 0.0, 0.0, 80).unwrap()).unwrap();
    for (k, v) in sz.eigenvalues.iter().enumerate() {
        assert!((v - (k as f64 - 40.0) / 40.0).abs() < 1e-12);
    }
}

#[test]
fn lipkin_sectors_partition_the_collective_spectrum() {
    // H = Sz + γ(S+² + S-²)/(4s) is the collective model with h = ẑ, gx = γ, gy = -γ
    let gamma = 2.5;
    let s = 30usize;
    let full = eig_dense_hermitian(&collective_spin_matrix([0.0, 0.0, 1.0], gamma, -gamma, 2 * s).unwrap()).unwrap();
    let mut union: Vec<f64> = Vec::new();
    for (parity, two_j) in [(Parity::Even, s), (Parity::Odd, s - 1)] {
        let e = eig_tridiagonal(&lipkin_sector_matrix(gamma, parity, two_j).unwrap(), false).unwrap();
        union.extend(e.eigenvalues.iter().map(|v| v * two_j as f64 / s as f64));
    }
    union.sort_by(f64::total_cmp);
    assert_eq!(union.len(), full.dim());
    for (a, b) in union.iter().zip(&full.eigenvalues) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn wave_functions_are_normalized() {
    for m in tridiagonal_models() {
        let p = m.tridiagonal().unwrap();
        let (lo, hi) = spectral_range(p);
        let sp = Spectrum::new(p);
        let singular = sp.singular_points();
        for l in grid(lo, hi, 20) {
            if singular.iter().any(|s| (s - l).abs() < 1e-6) {
                continue;
            }
            let st = Eigenstate::new(p, l).unwrap();
            let norm = st.expectation(&ObservableProfiles::identity(), Branch::All).unwrap();
            assert!((norm - 1.0).abs() < 1e-7, "{} at {l}: {norm}", m.name);
            for &(a, b) in &st.support.intervals {
                let x = 0.5 * (a + b);
                assert!(st.phi(x).abs() <= st.psi(x) + 1e-12);
            }
        }
    }
}

#[test]
fn hellmann_feynman_matches_expectation_values() {
    let m = lipkin(2.5, Parity::Even).unwrap();
    let p = m.tridiagonal().unwrap();
    let two_j = 300;
    let h = m.matrix(two_j).unwrap();
    let q = TridiagonalMatrix::new((0..=two_j).map(|k| k as f64 / two_j as f64).collect(), vec![0.0; two_j]).unwrap();
    let obs = ObservableProfiles::position();
    let eps = 1e-5;
    for n in [40usize, 100, 150, 200, 260] {
        let shifted = |e: f64| {
            let diag = h.diag.iter().zip(&q.diag).map(|(a, b)| a + e * b).collect();
            TridiagonalMatrix::new(diag, h.offdiag.clone()).unwrap()
        };
        let plus = asymspec::oracle::tridiagonal_eigenvalue(&shifted(eps), n).unwrap();
        let minus = asymspec::oracle::tridiagonal_eigenvalue(&shifted(-eps), n).unwrap();
        let derivative = (plus - minus) / (2.0 * eps);
        let (l, v) = eigenpair(&h, n).unwrap();
        assert!((derivative - expectation_value(&q, &v)).abs() < 1e-6);
        let st = Eigenstate::new(p, l).unwrap();
        if st.support.is_single_interval() {
            let predicted = st.expectation(&obs, Branch::All).unwrap();
            assert!((derivative - predicted).abs() < 3.0 / 150.0, "n={n}: {derivative} vs {predicted}");
        }
    }
}

#[test]
fn branch_average_and_alternation() {
    let m = alternating_states().unwrap();
    let p = m.tridiagonal().unwrap();
    let q = ObservableProfiles::position();
    for l in grid(-1.45, -0.05, 10) {
        let st = Eigenstate::new(p, l).unwrap();
        assert_eq!(st.support.len(), 2, "λ={l}");
        let all = st.expectation(&q, Branch::All).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..2 {
            let (a, b) = st.support.intervals[k];
            let one = Eigenstate::new(p, l).unwrap();
            let part = one.expectation(&ObservableProfiles::identity(), Branch::Interval(k)).unwrap();
            assert!((part - 1.0).abs() < 1e-9);
            let w = asymspec::numerics::integrate_sqrt_endpoints(|x| one.omega(x), a, b, 1e-12).unwrap().value;
            num += w * st.expectation(&q, Branch::Interval(k)).unwrap();
            den += w;
        }
        assert!((all - num / den).abs() < 1e-6);
        assert!(st.expectation(&q, Branch::Interval(2)).is_err());
    }
    let h = m.matrix(60).unwrap();
    let e = eig_tridiagonal(&h, true).unwrap();
    let vectors = e.eigenvectors.as_ref().unwrap();
    let mut branches = Vec::new();
    for (k, &l) in e.eigenvalues.iter().enumerate() {
        if l > -1.3 && l < -0.2 {
            let st = Eigenstate::new(p, l).unwrap();
            branches.extend(assign_branch(&st.support, &vectors[k]));
        }
    }
    assert!(branches.contains(&0) && branches.contains(&1));
}

#[test]
fn gap_check_examples() {
    let m = lipkin(2.5, Parity::Even).unwrap();
    let h = m.matrix(600).unwrap();
    let g = gap_check(&h, m.tridiagonal().unwrap(), 200).unwrap();
    assert!((g - 1.0).abs() < 0.05, "{g}");
    let t = toeplitz(0.0, 1.0).unwrap();
    let h = t.matrix(1000).unwrap();
    let g = gap_check(&h, t.tridiagonal().unwrap(), 500).unwrap();
    assert!((g - 1.0).abs() < 0.05, "{g}");
}

#[test]
fn symmetric_jacobi_median_and_laguerre_roots() {
    let m = jacobi(1.0, 0.5, 1.0, 0.5).unwrap();
    let r = polynomial_roots(&m, 100, 51, 1).unwrap();
    assert!(r.lambda.abs() < 1e-3 / 50.0 * 10.0, "{r:?}");
    let l = laguerre(1.0, 5.0).unwrap();
    assert!(polynomial_roots(&l, 100, 0, 1).is_err());
    assert!(polynomial_roots(&l, 100, 102, 1).is_err());
}
