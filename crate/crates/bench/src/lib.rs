//! Fixtures shared by the benchmarks in `benches/`.

use matchscope_core::exec::{execute, ExecOptions, ScanJob};
use matchscope_core::field::{AnyTower, PrimeField, Subspace, Tower};
use matchscope_core::group::validate_pair;
use matchscope_core::linear::strong_matching_exists;
use matchscope_core::{AbelianGroup, SubsetPair};

/// `Z/n` with the pair given as integer residues.
pub fn cyclic_pair(n: u64, a: &[i64], b: &[i64]) -> (AbelianGroup, SubsetPair) {
    let g = AbelianGroup::cyclic(n).expect("valid order");
    let el = |xs: &[i64]| xs.iter().map(|&x| g.element(&[x]).expect("in range")).collect::<Vec<_>>();
    let pair = validate_pair(&g, &el(a), &el(b)).expect("admissible pair");
    (g, pair)
}

pub fn prime_tower(desc: &str) -> Tower<PrimeField> {
    match AnyTower::parse(desc).expect("valid tower") {
        AnyTower::Prime(t) => t,
        _ => panic!("{desc} is not over a prime field"),
    }
}

pub fn span(t: &Tower<PrimeField>, gens: &str) -> Subspace<PrimeField> {
    t.span(&t.parse_list(gens).expect("valid generators")).expect("span")
}

/// Runs a scan to completion on `workers` threads and builds its report.
pub fn run_scan<J: ScanJob>(job: &J, workers: usize) -> J::Report {
    let out = execute(job, &ExecOptions { workers, ..Default::default() }, Default::default()).expect("scan runs");
    job.build_report(&out.records).expect("report")
}

/// The first pair of `dim`-dimensional subspaces with `AB ∩ A = {0}`.
pub fn strong_pair(t: &Tower<PrimeField>, dim: usize) -> (Subspace<PrimeField>, Subspace<PrimeField>) {
    let subs = Subspace::enumerate(t.base(), t.ambient(), dim).expect("finite field");
    for a in &subs {
        for b in &subs {
            if strong_matching_exists(t, a, b).expect("equal dims") {
                return (a.clone(), b.clone());
            }
        }
    }
    panic!("no pair with AB ∩ A = {{0}}")
}
