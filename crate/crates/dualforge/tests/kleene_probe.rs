use dualforge::catalog;
use dualforge::verify::{verify_bruteforce, VerifyMode};
use dualforge::SearchCfg;

#[test]
fn probe_kleene_failures() {
    let cfg = SearchCfg::default();
    let m = catalog::get("Kleene3").unwrap();
    let ego = catalog::get("Kleene3_ego").unwrap();
    let report = verify_bruteforce(&m, &ego, 2, VerifyMode::Duality, &cfg).unwrap();
    for i in report.instances.iter().filter(|i| !i.verdict).take(5) {
        eprintln!("FAIL n={} carrier={:?} sizes=({},{})", i.n, i.carrier, i.base_size, i.dual_size);
        eprintln!("  witness: {}", serde_json::to_string(&i.witness).unwrap());
    }
    eprintln!("total fails: {}", report.instances.iter().filter(|i| !i.verdict).count());
}
