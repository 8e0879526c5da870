use nalgebra::DMatrix;
use phasefield::covariant::{
    advanced_propagator, covariant_pairing, radiated_solution, retarded_propagator, surface_form, Event,
    PropagatorKernel, Solution, SpacetimeLattice,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::max_of;
use crate::config::{non_negative, positive, ExperimentConfig};
use crate::error::CliError;
use crate::output::{Output, Table};
use crate::report::RunReport;
use crate::sampling;

fn kernel_table(lat: &SpacetimeLattice, k: &PropagatorKernel) -> Table {
    let mut table = Table::new(&["t", "x", "value"]);
    for t in 0..lat.steps() {
        for x in 0..lat.sites() {
            table.push(vec![t.into(), x.into(), k.value(Event::new(t, x)).into()]);
        }
    }
    table
}

/// Source history vanishing on the two outermost slices at each end.
fn interior_source(rng: &mut ChaCha8Rng, lat: &SpacetimeLattice) -> DMatrix<f64> {
    DMatrix::from_fn(lat.steps(), lat.sites(), |t, _| {
        if t >= 2 && t + 3 <= lat.steps() {
            rng.random_range(-1.0..1.0)
        } else {
            0.0
        }
    })
}

/// Retarded and advanced kernels of the 1+1D lattice Klein–Gordon equation,
/// and the covariant symplectic form they induce.
pub fn run(config: &ExperimentConfig, out: &Output, report: &mut RunReport) -> Result<(), CliError> {
    let sites = config.sites.unwrap_or(32);
    let steps = config.steps.unwrap_or(40);
    let a = positive("a", config.a.unwrap_or(1.0))?;
    let dt = positive("dt", config.dt.unwrap_or(0.5))?;
    let m = non_negative("m", config.m.unwrap_or(0.5))?;
    if steps < 6 {
        return Err(CliError::Config(format!("`T` must be at least 6 slices, got {steps}")));
    }
    report.param("N", sites);
    report.param("T", steps);
    report.param("a", a);
    report.param("dt", dt);
    report.param("m", m);

    let lat = SpacetimeLattice::new(sites, steps, a, dt)?;
    let source = Event::new(steps / 4, sites / 2);
    let retarded = retarded_propagator(&lat, m, source)?;
    let advanced = advanced_propagator(&lat, m, source)?;
    report.value("source_t", source.t);
    report.value("source_x", source.x);

    let mut leaks = 0usize;
    for t in 0..steps {
        for x in 0..sites {
            let e = Event::new(t, x);
            let cone = lat.distance(x, source.x) < t.abs_diff(source.t);
            if !(t > source.t && cone) && retarded.value(e) != 0.0 {
                leaks += 1;
            }
            if !(t < source.t && cone) && advanced.value(e) != 0.0 {
                leaks += 1;
            }
        }
    }
    report.value("entries_outside_cone", leaks);
    report.holds("causal_support", leaks == 0);

    let mut rng = sampling::rng(config.seed());
    let mut slice = Vec::new();
    let mut gap = Vec::new();
    let mut antisym = Vec::new();
    for _ in 0..5 {
        let s1 = Solution::from_initial_slices(
            lat,
            m,
            &sampling::real_vec(&mut rng, sites, 1.0),
            &sampling::real_vec(&mut rng, sites, 1.0),
        )?;
        let s2 = Solution::from_initial_slices(
            lat,
            m,
            &sampling::real_vec(&mut rng, sites, 1.0),
            &sampling::real_vec(&mut rng, sites, 1.0),
        )?;
        let v0 = surface_form(&s1, &s2, 1)?;
        for t in 2..steps - 1 {
            slice.push((surface_form(&s1, &s2, t)? - v0).abs());
        }

        let (f1, f2) = (interior_source(&mut rng, &lat), interior_source(&mut rng, &lat));
        let pairing = covariant_pairing(&lat, m, &f1, &f2)?;
        antisym.push((pairing + covariant_pairing(&lat, m, &f2, &f1)?).abs());
        let (e1, e2) = (radiated_solution(&lat, m, &f1)?, radiated_solution(&lat, m, &f2)?);
        for t in [1, steps / 2, steps - 2] {
            gap.push((surface_form(&e1, &e2, t)? - pairing).abs());
        }
    }
    report.at_most("slice_independence", max_of(slice), 1e-10);
    report.at_most("pairing_vs_surface_form", max_of(gap), 1e-10);
    report.at_most("pairing_antisymmetry", max_of(antisym), 1e-10);

    out.write_csv(report, "retarded_kernel.csv", &kernel_table(&lat, &retarded))?;
    out.write_csv(report, "advanced_kernel.csv", &kernel_table(&lat, &advanced))
}
