//! Compare the data-parallel execution of the search-heavy entry points
//! against forced single-worker execution. With `--no-default-features` the
//! two coincide.

use criterion::{criterion_group, criterion_main, Criterion};
use dualforge::catalog;
use dualforge::hom::Hom;
use dualforge::par::run_sequential;
use dualforge::piggyback::omega_max;
use dualforge::verify::{verify_bruteforce, VerifyMode};
use dualforge::SearchCfg;
use std::time::Duration;

fn omega_max_dm4(c: &mut Criterion) {
    let cfg = SearchCfg::default();
    let m = catalog::get("DM4").unwrap();
    let flat = catalog::apply_named_reduct("DM4", "dm4_lattice").unwrap();
    let d = catalog::get("D").unwrap();
    let omegas: Vec<Hom> = dualforge::hom::enumerate_homs(&flat, &d, &cfg).unwrap();
    let leq = catalog::get("TWOPOS").unwrap().rel_by_name("leq").unwrap().clone();
    let mut g = c.benchmark_group("omega_max_dm4_all_carriers");
    g.bench_function("parallel", |b| {
        b.iter(|| omega_max(&m, &omegas, &leq, &cfg).unwrap());
    });
    g.bench_function("sequential", |b| {
        b.iter(|| run_sequential(|| omega_max(&m, &omegas, &leq, &cfg).unwrap()));
    });
    g.finish();
}

fn omega_max_ock3(c: &mut Criterion) {
    let cfg = SearchCfg::default();
    let m = catalog::get("OCK3").unwrap();
    let flat = catalog::apply_named_reduct("OCK3", "ock3_lattice").unwrap();
    let d = catalog::get("D").unwrap();
    let pi0 = Hom::new(&flat, &d, catalog::carrier("OCK3").unwrap()).unwrap();
    let omegas = vec![pi0];
    let leq = catalog::get("TWOPOS").unwrap().rel_by_name("leq").unwrap().clone();
    let mut g = c.benchmark_group("omega_max_ock3_principal");
    g.bench_function("parallel", |b| {
        b.iter(|| omega_max(&m, &omegas, &leq, &cfg).unwrap());
    });
    g.bench_function("sequential", |b| {
        b.iter(|| run_sequential(|| omega_max(&m, &omegas, &leq, &cfg).unwrap()));
    });
    g.finish();
}

fn verify_dm4(c: &mut Criterion) {
    let cfg = SearchCfg::default();
    let m = catalog::get("DM4").unwrap();
    let ego = catalog::get("DM4_ego").unwrap();
    let mut g = c.benchmark_group("verify_dm4_duality_depth2");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| verify_bruteforce(&m, &ego, 2, VerifyMode::Duality, &cfg).unwrap());
    });
    g.bench_function("sequential", |b| {
        b.iter(|| {
            run_sequential(|| verify_bruteforce(&m, &ego, 2, VerifyMode::Duality, &cfg).unwrap())
        });
    });
    g.finish();
}

criterion_group!(
    name = benches;
    config = Criterion::default()
        .warm_up_time(Duration::from_millis(300))
        .measurement_time(Duration::from_secs(2));
    targets = omega_max_dm4, omega_max_ock3, verify_dm4
);
criterion_main!(benches);
