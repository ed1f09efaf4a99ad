//! Running a registered suite from code and writing its JSON and CSV reports.

use symcone::suites::{run_suite, SuiteConfig, SuiteId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = SuiteConfig::new(SuiteId::Lemma42, "halfline");
    cfg.set("s", "1")?;
    cfg.set("beta", "-3")?;
    cfg.set("tol", "1e-8")?;
    let report = run_suite(&cfg)?;
    print!("{}", report.summary());

    let dir = std::env::temp_dir();
    std::fs::write(dir.join("lemma4-2.json"), report.to_json())?;
    std::fs::write(dir.join("lemma4-2.csv"), report.to_csv())?;
    println!("reports written to {}", dir.display());

    for id in SuiteId::all() {
        print!("{} ", id.id());
    }
    println!();
    Ok(())
}
