mod common;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use phasefield::covariant::{
    advanced_propagator, covariant_pairing, pauli_jordan, radiated_solution, retarded_propagator,
    surface_form, Event, KernelKind, Solution, SpacetimeLattice,
};
use phasefield::lattice::SpatialLattice;
use phasefield::symplectic::omega_coords;
use phasefield::Error;
use proptest::prelude::*;
use rand::Rng;

fn random_solution(rng: &mut rand_chacha::ChaCha8Rng, lat: SpacetimeLattice, mass: f64) -> Solution {
    let n = lat.sites();
    let first = common::real_vec(rng, n, 1.0);
    let second = common::real_vec(rng, n, 1.0);
    Solution::from_initial_slices(lat, mass, &first, &second).unwrap()
}

/// Source history vanishing on the outer slices.
fn interior_source(rng: &mut rand_chacha::ChaCha8Rng, lat: &SpacetimeLattice) -> DMatrix<f64> {
    DMatrix::from_fn(lat.steps(), lat.sites(), |t, _| {
        if t >= 2 && t + 3 <= lat.steps() {
            common::uniform(rng, -1.0, 1.0)
        } else {
            0.0
        }
    })
}

#[test]
fn massless_kernel_is_discrete_dalembert() {
    let (n, a) = (40, 0.5);
    let lat = SpacetimeLattice::new(n, 16, a, a).unwrap();
    let src = Event::new(2, 20);
    let r = retarded_propagator(&lat, 0.0, src).unwrap();
    for t in 0..16 {
        for x in 0..n {
            let d = lat.distance(x, src.x);
            let expected = if t > src.t && d < t - src.t && (t - src.t - 1 - d).is_multiple_of(2) {
                lat.dt() / a
            } else {
                0.0
            };
            assert!((r.value(Event::new(t, x)) - expected).abs() < 1e-14, "({t}, {x})");
        }
    }
}

#[test]
fn massive_kernel_support_is_the_lattice_cone() {
    let lat = SpacetimeLattice::new(24, 20, 1.0, 0.7).unwrap();
    let src = Event::new(5, 3);
    let r = retarded_propagator(&lat, 1.3, src).unwrap();
    assert_eq!(r.kind, KernelKind::Retarded);
    for t in 0..20 {
        for x in 0..24 {
            let v = r.value(Event::new(t, x));
            let inside = t > src.t && lat.distance(x, src.x) < t - src.t;
            if !inside {
                assert_eq!(v, 0.0, "({t}, {x})");
            }
        }
    }
    // the cone edge is populated
    assert!(r.value(Event::new(src.t + 4, (src.x + 3) % 24)) != 0.0);
}

#[test]
fn advanced_is_reflected_retarded() {
    let lat = SpacetimeLattice::new(12, 21, 1.0, 0.8).unwrap();
    let src = Event::new(10, 4);
    let r = retarded_propagator(&lat, 0.6, src).unwrap();
    let a = advanced_propagator(&lat, 0.6, src).unwrap();
    assert_eq!(a.kind, KernelKind::Advanced);
    for k in 0..=10 {
        for x in 0..12 {
            assert_eq!(a.value(Event::new(10 - k, x)), r.value(Event::new(10 + k, x)));
        }
    }
}

#[test]
fn pauli_jordan_properties() {
    let lat = SpacetimeLattice::new(10, 14, 1.0, 0.9).unwrap();
    let m = 0.8;
    let mut rng = common::rng(1);
    for _ in 0..30 {
        let e = Event::new(rng.random_range(0..14), rng.random_range(0..10));
        let s = Event::new(rng.random_range(0..14), rng.random_range(0..10));
        let forward = pauli_jordan(&lat, m, e, s).unwrap();
        let backward = pauli_jordan(&lat, m, s, e).unwrap();
        assert!((forward + backward).abs() < 1e-12);
        let dt = e.t.abs_diff(s.t);
        if lat.distance(e.x, s.x) >= dt.max(1) {
            assert_eq!(forward, 0.0);
        }
    }
    for x in 0..10 {
        assert_eq!(pauli_jordan(&lat, m, Event::new(7, x), Event::new(7, 2)).unwrap(), 0.0);
    }
    // impulse normalization: centered time derivative at the source is 1/a
    let s = Event::new(7, 2);
    let up = pauli_jordan(&lat, m, Event::new(8, 2), s).unwrap();
    let down = pauli_jordan(&lat, m, Event::new(6, 2), s).unwrap();
    assert!(((up - down) / (2.0 * lat.dt()) - 1.0 / lat.spacing()).abs() < 1e-12);
}

#[test]
fn surface_form_is_slice_independent() {
    let lat = SpacetimeLattice::new(16, 60, 0.5, 0.4).unwrap();
    let mut rng = common::rng(2);
    for _ in 0..5 {
        let s1 = random_solution(&mut rng, lat, 1.1);
        let s2 = random_solution(&mut rng, lat, 1.1);
        let v0 = surface_form(&s1, &s2, 1).unwrap();
        for t in 2..59 {
            assert!((surface_form(&s1, &s2, t).unwrap() - v0).abs() <= 1e-10);
        }
        assert_eq!(surface_form(&s1, &s1, 10).unwrap(), 0.0);
        assert!((surface_form(&s2, &s1, 5).unwrap() + surface_form(&s1, &s2, 5).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn covariant_pairing_equals_the_surface_form() {
    let lat = SpacetimeLattice::new(12, 30, 1.0, 0.6).unwrap();
    let m = 0.7;
    let mut rng = common::rng(3);
    for _ in 0..5 {
        let f1 = interior_source(&mut rng, &lat);
        let f2 = interior_source(&mut rng, &lat);
        let pairing = covariant_pairing(&lat, m, &f1, &f2).unwrap();
        let (e1, e2) = (radiated_solution(&lat, m, &f1).unwrap(), radiated_solution(&lat, m, &f2).unwrap());
        for t in [1, 10, 28] {
            assert!((surface_form(&e1, &e2, t).unwrap() - pairing).abs() <= 1e-10);
        }
        let swapped = covariant_pairing(&lat, m, &f2, &f1).unwrap();
        assert!((pairing + swapped).abs() < 1e-10);
    }
}

#[test]
fn pairing_is_bilinear() {
    let lat = SpacetimeLattice::new(8, 16, 1.0, 0.5).unwrap();
    let mut rng = common::rng(4);
    let (f, g, h) = (
        interior_source(&mut rng, &lat),
        interior_source(&mut rng, &lat),
        interior_source(&mut rng, &lat),
    );
    let combo = &f * 2.0 - &g * 0.5;
    let lhs = covariant_pairing(&lat, 0.3, &combo, &h).unwrap();
    let rhs = 2.0 * covariant_pairing(&lat, 0.3, &f, &h).unwrap() - 0.5 * covariant_pairing(&lat, 0.3, &g, &h).unwrap();
    assert!((lhs - rhs).abs() < 1e-12);
}

#[test]
fn slice_data_carries_the_phase_space_form() {
    let (n, a) = (10, 0.8);
    let lat = SpacetimeLattice::new(n, 12, a, 0.5).unwrap();
    let spatial = Arc::new(SpatialLattice::uniform(n, a).unwrap());
    let mut rng = common::rng(5);
    let s1 = random_solution(&mut rng, lat, 0.9);
    let s2 = random_solution(&mut rng, lat, 0.9);
    for t in 1..11 {
        let pack = |s: &Solution| {
            let (phi, vel) = s.slice_data(t).unwrap();
            DVector::from_iterator(2 * n, phi.iter().chain(vel.iter()).copied())
        };
        let omega = omega_coords(&spatial, &pack(&s1), &pack(&s2));
        assert!((omega - surface_form(&s1, &s2, t).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(matches!(SpacetimeLattice::new(8, 8, 0.5, 0.6), Err(Error::StepGuard(_))));
    let lat = SpacetimeLattice::new(6, 8, 1.0, 0.5).unwrap();
    let mut rng = common::rng(6);
    let noise = DMatrix::from_vec(8, 6, common::real_vec(&mut rng, 48, 1.0));
    assert!(matches!(Solution::new(lat, 0.5, noise), Err(Error::NotASolution { .. })));
    assert!(retarded_propagator(&lat, 0.5, Event::new(8, 0)).is_err());
    let s = random_solution(&mut rng, lat, 0.5);
    assert!(s.slice_data(0).is_err());
    assert!(s.slice_data(7).is_err());
    let other = random_solution(&mut rng, lat, 0.6);
    assert!(surface_form(&s, &other, 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn retarded_response_is_causal(t0 in 0usize..10, x0 in 0usize..9, mass in 0.0f64..2.0) {
        let lat = SpacetimeLattice::new(9, 12, 1.0, 0.75).unwrap();
        let r = retarded_propagator(&lat, mass, Event::new(t0, x0)).unwrap();
        for t in 0..=t0 {
            for x in 0..9 {
                prop_assert_eq!(r.value(Event::new(t, x)), 0.0);
            }
        }
    }
}
