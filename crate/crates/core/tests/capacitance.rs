mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subwave::capacitance::*;
use subwave::{equidistant_geometry, CapacitanceSystem, Error, NestedGeometry};

fn geometry_strategy() -> impl Strategy<Value = NestedGeometry> {
    (1usize..=10, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_geometry(&mut rng, n)
    })
}

fn apply(c: &subwave::numerics::SymTridiag, x: &[f64]) -> Vec<f64> {
    c.mul_vec(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// `x^T C x` equals the Dirichlet energy of the harmonic extension of
    /// `x`: `4π r_1 x_1^2 + Σ 4π g_j (x_j - x_{j+1})^2`.
    #[test]
    fn quadratic_form_is_dirichlet_energy(g in geometry_strategy(), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g.layers();
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = build_capacitance(&g);
        let cx = apply(&c, &x);
        let form: f64 = cx.iter().zip(&x).map(|(a, b)| a * b).sum();
        let mut energy = 4.0 * PI * g.outer(1) * x[0] * x[0];
        for j in 1..n {
            energy += 4.0 * PI * gap_coupling(&g, j) * (x[j - 1] - x[j]).powi(2);
        }
        prop_assert!((form - energy).abs() <= 1e-11 * c.norm_inf() * n as f64);
        prop_assert!(form > 0.0 || x.iter().all(|v| *v == 0.0));
    }

    /// A constant potential only leaks through the outer boundary.
    #[test]
    fn row_sums(g in geometry_strategy()) {
        let c = build_capacitance(&g);
        let ones = vec![1.0; g.layers()];
        let s = apply(&c, &ones);
        prop_assert!((s[0] - 4.0 * PI * g.outer(1)).abs() <= 1e-12 * c.norm_inf());
        for v in &s[1..] {
            prop_assert!(v.abs() <= 1e-12 * c.norm_inf());
        }
    }

    #[test]
    fn entries_match_flux_oracle(g in geometry_strategy()) {
        let c = build_capacitance(&g);
        let oracle = capacitance_flux_oracle(&g);
        for (i, row) in oracle.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                prop_assert!((c.get(i, j) - x).abs() <= 1e-12 * c.norm_inf());
            }
        }
    }

    #[test]
    fn eigenpairs_are_volume_orthonormal(g in geometry_strategy()) {
        let cs = match CapacitanceSystem::new(&g) {
            Ok(cs) => cs,
            // near-degenerate geometries are reported, never mislabelled
            Err(Error::EigenvalueCollision { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let n = cs.layers();
        prop_assert!(cs.lambdas[0] > 0.0);
        prop_assert!(cs.lambdas.windows(2).all(|w| w[0] < w[1]));
        let cnorm = cs.capacitance.norm_inf();
        let vmax = cs.volumes.iter().cloned().fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| cs.vectors[i][k] * cs.volumes[k] * cs.vectors[j][k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expect).abs() <= 1e-10);
            }
            let a = &cs.vectors[i];
            let ca = apply(&cs.capacitance, a);
            let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for k in 0..n {
                let r = ca[k] - cs.lambdas[i] * cs.volumes[k] * a[k];
                prop_assert!(r.abs() <= 1e-10 * (cnorm + cs.lambdas[i] * vmax) * scale);
            }
        }
    }

    /// Scaling the geometry by `s` scales every `λ` by `s^{-2}`.
    #[test]
    fn lambdas_scale_inversely_with_area(g in geometry_strategy(), s in 0.2..5.0f64) {
        let (Ok(a), Ok(b)) = (CapacitanceSystem::new(&g), CapacitanceSystem::new(&g.scaled(s).unwrap())) else {
            return Ok(());
        };
        for (x, y) in a.lambdas.iter().zip(&b.lambdas) {
            prop_assert!((x / (s * s) - y).abs() <= 1e-10 * x / (s * s));
        }
    }
}

#[test]
fn volumes_are_shell_volumes() {
    let g = equidistant_geometry(3).unwrap();
    let v = build_volume(&g);
    let expect = [
        4.0 / 3.0 * PI * (27.0 - 15.625),
        4.0 / 3.0 * PI * (8.0 - 3.375),
        4.0 / 3.0 * PI * (1.0 - 0.125),
    ];
    for (a, b) in v.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn generalized_eigs_rejects_bad_volumes() {
    let g = equidistant_geometry(2).unwrap();
    let c = build_capacitance(&g);
    assert!(matches!(
        generalized_eigs(&c, &[1.0]),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(matches!(
        generalized_eigs(&c, &[1.0, -1.0]),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn imaginary_parts_are_negative() {
    let g = equidistant_geometry(6).unwrap();
    let cs = CapacitanceSystem::new(&g).unwrap();
    let m = subwave::MaterialParams::from_contrast(1e-3).unwrap();
    let w = cs.asymptotic_frequencies(&m);
    assert!(w.iter().all(|z| z.re > 0.0 && z.im < 0.0));
    assert!(w.windows(2).all(|p| p[0].re < p[1].re));
    for (z, r) in w.iter().zip(cs.modal_frequencies(&m)) {
        assert_eq!(z.re, r);
    }
}
