use std::sync::Arc;

use phasefield::lattice::{frechet_metric, truncate_to_patches, FieldFunction, SpatialLattice};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Output, Table};
use crate::report::RunReport;
use crate::sampling;

/// Metric axioms on random triples, the single-patch value, and the
/// convergence of patch truncations.
pub fn run(config: &ExperimentConfig, out: &Output, report: &mut RunReport) -> Result<(), CliError> {
    let triples = config.triples.unwrap_or(1000);
    let lattice = config.lattice_or(|| SpatialLattice::uniform_patched(24, 0.5, 3))?;
    report.param("lattice", serde_json::to_value(lattice.spec()).expect("spec serializes"));
    report.param("triples", triples);

    let n = lattice.site_count();
    let mut rng = sampling::rng(config.seed());
    let field = |rng: &mut ChaCha8Rng, scale: f64| FieldFunction::real(lattice.clone(), sampling::real_vec(rng, n, scale));
    let (mut identity, mut symmetry, mut triangle) = (0.0_f64, 0.0_f64, f64::NEG_INFINITY);
    for _ in 0..triples {
        let (f, g, h) = (field(&mut rng, 3.0)?, field(&mut rng, 3.0)?, field(&mut rng, 3.0)?);
        let (fg, gf) = (frechet_metric(&f, &g)?, frechet_metric(&g, &f)?);
        identity = identity.max(frechet_metric(&f, &f)?);
        symmetry = symmetry.max((fg - gf).abs());
        triangle = triangle.max(frechet_metric(&f, &h)? - fg - frechet_metric(&g, &h)?);
    }
    report.at_most("identity", identity, 1e-12);
    report.at_most("symmetry", symmetry, 1e-12);
    report.at_most("triangle_excess", triangle.max(0.0), 1e-12);

    // indicator of the first site of a two-patch unit lattice sits at 1/4
    let unit = Arc::new(SpatialLattice::uniform_patched(4, 1.0, 2)?);
    let bump = FieldFunction::real(unit.clone(), vec![1.0, 0.0, 0.0, 0.0])?;
    let value = frechet_metric(&bump, &FieldFunction::zeros(unit))?;
    report.value("single_patch_value", value);
    report.holds("single_patch_quarter", value == 0.25);

    let mut table = Table::new(&["field", "k", "distance", "tail_bound"]);
    let (mut monotone, mut excess) = (true, f64::NEG_INFINITY);
    for sample in 0..20usize {
        let f = field(&mut rng, 5.0)?;
        let mut last = f64::INFINITY;
        for k in 1..=lattice.patch_count() {
            let d = frechet_metric(&f, truncate_to_patches(&f, k)?.base())?;
            let bound = lattice.tail_bound(k);
            monotone &= d <= last;
            excess = excess.max(d - bound);
            last = d;
            table.push(vec![sample.into(), k.into(), d.into(), bound.into()]);
        }
    }
    report.holds("truncation_monotone", monotone);
    report.at_most("tail_bound_excess", excess.max(0.0), 0.0);
    out.write_csv(report, "truncation.csv", &table)
}
