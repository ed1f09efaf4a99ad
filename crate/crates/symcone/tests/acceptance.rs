//! Acceptance run: every criterion at its stated tolerance, one line each.
//!
//! Exits with status 1 when any criterion fails.

use std::time::Instant;

use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};
use serde_json::Value;
use symcone::jordan::{
    determinant, inverse, jordan_product, power_function, spectral, AlgebraElement, ConeDescriptor, MultiIndex,
};
use symcone::operators::search_admissible;
use symcone::report::{CaseRecord, VerificationReport};
use symcone::suites::{run_suite, SuiteConfig, SuiteId};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }

    fn and(self, other: Outcome) -> Outcome {
        Outcome::new(self.pass && other.pass, format!("{}; {}", self.detail, other.detail))
    }
}

fn suite(id: SuiteId, cone: &str, params: &[(&str, &str)], tol: Option<f64>) -> Result<(VerificationReport, f64), String> {
    let mut cfg = SuiteConfig::new(id, cone);
    for (k, v) in params {
        cfg.set(k, v).map_err(|e| e.to_string())?;
    }
    cfg.tol = tol;
    let start = Instant::now();
    let report = run_suite(&cfg).map_err(|e| format!("{id} on {cone}: {e}"))?;
    Ok((report, start.elapsed().as_secs_f64()))
}

fn case<'a>(r: &'a VerificationReport, prefix: &str) -> Result<&'a CaseRecord, String> {
    r.cases
        .iter()
        .find(|c| c.label.starts_with(prefix))
        .ok_or_else(|| format!("{}: no case {prefix:?}", r.suite))
}

fn failing(r: &VerificationReport) -> String {
    let bad: Vec<String> = r.cases.iter().filter(|c| !c.pass).map(|c| c.label.clone()).collect();
    if bad.is_empty() {
        format!("{} on {}: {} cases pass", r.suite, r.cone, r.cases.len())
    } else {
        format!("{} on {}: failing {}", r.suite, r.cone, bad.join(", "))
    }
}

fn worst_rel(r: &VerificationReport) -> f64 {
    r.cases
        .iter()
        .filter_map(|c| c.expected.map(|e| ((c.computed - e) / e).abs()))
        .fold(0.0, f64::max)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn ac1() -> Result<Outcome, String> {
    let (h, t1) = suite(SuiteId::Gamma, "halfline", &[("s", "1.5;2;3")], Some(1e-8))?;
    let (l, t2) = suite(SuiteId::Gamma, "lorentz:3", &[("s", "2,1.5;3,2")], Some(1e-3))?;
    let time = t1 + t2;
    Ok(Outcome::new(
        h.aggregate_pass && l.aggregate_pass && time < 30.0,
        format!("halfline worst rel {:.1e}, lorentz worst rel {:.1e}, {time:.2} s", worst_rel(&h), worst_rel(&l)),
    ))
}

fn ac2() -> Result<Outcome, String> {
    let (l, _) = suite(SuiteId::Beta, "lorentz:3", &[("p", "2,1.5"), ("q", "2,1.5")], Some(1e-3))?;
    let (h, _) = suite(SuiteId::Beta, "halfline", &[("p", "2"), ("q", "3")], Some(1e-8))?;
    let c = case(&h, "p=")?;
    let twelfth = c.expected.is_some_and(|e| (e - 1.0 / 12.0).abs() < 1e-15);
    Ok(Outcome::new(
        l.aggregate_pass && h.aggregate_pass && twelfth,
        format!("lorentz ratio {:.6}, halfline {:.12} vs 1/12", l.cases[0].computed / l.cases[0].expected.unwrap_or(1.0), c.computed),
    ))
}

fn ac3() -> Result<Outcome, String> {
    let (l, _) = suite(SuiteId::Laplace, "lorentz:3", &[("s", "2,1.5"), ("y", "1,0,0;2,0,0;2,1,0")], Some(1e-3))?;
    let (h, _) = suite(SuiteId::Laplace, "halfline", &[("s", "1"), ("y", "2")], Some(1e-10))?;
    let c = case(&h, "s=")?;
    let half = c.expected.is_some_and(|e| (e - 0.5).abs() < 1e-14);
    Ok(Outcome::new(
        l.aggregate_pass && h.aggregate_pass && half,
        format!("lorentz worst rel {:.1e} over 3 points, halfline {:.12}", worst_rel(&l), c.computed),
    ))
}

fn ac4() -> Result<Outcome, String> {
    let (l, _) = suite(SuiteId::RotatedBeta, "lorentz:3", &[("cv_tol", "0.005")], Some(1e-3))?;
    let cv = case(&l, "F(y)")?;
    let at_e = case(&l, "F(e)")?;
    Ok(Outcome::new(
        l.aggregate_pass && cv.ratios.len() == 5,
        format!("CV {:.1e} over {} points, F(e) {:.8} vs {:.8}", cv.computed, cv.ratios.len(), at_e.computed, at_e.expected.unwrap_or(f64::NAN)),
    ))
}

fn ac5() -> Result<Outcome, String> {
    let (h1, _) = suite(SuiteId::Lemma41, "halfline", &[("alpha", "2"), ("y", "1")], Some(1e-8))?;
    let pi = case(&h1, "J_alpha(1)")?;
    let is_pi = pi.expected.is_some_and(|e| (e - std::f64::consts::PI).abs() < 1e-14);
    let (l1, _) = suite(SuiteId::Lemma41, "lorentz:3", &[("alpha", "3,3"), ("cv_tol", "0.005")], None)?;
    let (h2, _) = suite(SuiteId::Lemma42, "halfline", &[("s", "1"), ("beta", "-3")], Some(1e-8))?;
    let c = case(&h2, "integral")?;
    let half = c.ratios.iter().all(|r| (r - 0.5).abs() <= 1e-8);
    let (l2, _) = suite(SuiteId::Lemma42, "lorentz:3", &[("cv_tol", "0.005")], None)?;
    let l1c = case(&l1, "J_alpha")?;
    let l2c = case(&l2, "integral")?;
    Ok(Outcome::new(
        h1.aggregate_pass && is_pi && l1.aggregate_pass && h2.aggregate_pass && half && l2.aggregate_pass,
        format!(
            "J_2(1) = {:.10}, lorentz CV {:.1e}; C = {:.10} with t^-2 scaling at {} points, lorentz CV {:.1e}",
            pi.computed,
            l1c.computed,
            c.ratios.iter().sum::<f64>() / c.ratios.len() as f64,
            c.ratios.len(),
            l2c.computed
        ),
    ))
}

fn ac6() -> Result<Outcome, String> {
    let (l, _) = suite(SuiteId::Box, "lorentz:3", &[("xi", "2,1,0;1,0,0")], None)?;
    let o1 = case(&l, "stencil order xi=2,1,0")?.computed;
    let o2 = case(&l, "stencil order xi=1,0,0")?.computed;
    let s1 = case(&l, "symbol xi=2,1,0")?.computed;
    let s2 = case(&l, "symbol xi=1,0,0")?.computed;
    Ok(Outcome::new(l.aggregate_pass, format!("symbols {s1}, {s2}; orders {o1:.4}, {o2:.4}")))
}

fn ac7() -> Result<Outcome, String> {
    let (pw, t1) = suite(SuiteId::PwIdentity, "halfline", &[("s", "1;2"), ("cv_tol", "0.02")], None)?;
    let cv = case(&pw, "||F||")?;
    let mean = cv.ratios.iter().sum::<f64>() / cv.ratios.len() as f64;
    let spread = cv.ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    let pw_ok = cv.ratios.len() == 6 && spread <= 0.02 && cv.pass;
    let (ph, t2) = suite(SuiteId::Plancherel, "halfline", &[("cv_tol", "0.01")], None)?;
    let (pl, t3) = suite(SuiteId::Plancherel, "lorentz:3", &[("cv_tol", "0.02")], None)?;
    let hc = case(&ph, "slice")?;
    let lc = case(&pl, "slice")?;
    let time = t1 + t2 + t3;
    let mc = pl.quadrature.contains("monte_carlo") && pl.quadrature.contains("samples=2000000") && pl.seed == 42;
    Ok(Outcome::new(
        pw_ok && hc.pass && lc.pass && mc && time < 300.0,
        format!(
            "6 ratios within {:.2e} of {mean:.6}; plancherel CV {:.1e} (halfline), {:.1e} (lorentz, seed 42)",
            spread, hc.computed, lc.computed
        ),
    ))
}

fn embedding_checks(r: &VerificationReport) -> (bool, String) {
    let mut ok = true;
    let mut slopes = Vec::new();
    for e in r.experiments.iter().filter(|e| e["expected_slope"] == 0.0) {
        let finite = e["ratios"]
            .as_array()
            .into_iter()
            .flatten()
            .flat_map(|row| row.as_array().into_iter().flatten())
            .all(|v| num(v).is_finite() && num(v) > 0.0);
        for s in e["slopes"].as_array().into_iter().flatten() {
            ok &= num(s).abs() < 1e-3;
            slopes.push(num(s));
        }
        ok &= finite;
    }
    let free = r.cases.iter().find(|c| c.label.starts_with("nu/q shifted"));
    let free_slope = free.map_or(f64::NAN, |c| c.computed);
    ok &= !slopes.is_empty() && (free_slope - 0.25).abs() <= 0.02;
    (ok, format!("{} slopes max |{:.1e}|, free target {free_slope:.4}", r.suite, slopes.iter().fold(0.0f64, |a, s| a.max(s.abs()))))
}

fn ac8() -> Result<Outcome, String> {
    let (t11, _) = suite(SuiteId::EmbeddingThm11, "halfline", &[("s", "1"), ("q", "2;4"), ("epsilon", "0.25")], None)?;
    let (t12, _) = suite(SuiteId::EmbeddingThm12, "halfline", &[("s", "1"), ("q", "4"), ("epsilon", "0.25")], None)?;
    let nu3 = t12.experiments.iter().any(|e| e["params"].as_str().is_some_and(|p| p.contains("nu=(3)")));
    let (a, da) = embedding_checks(&t11);
    let (b, db) = embedding_checks(&t12);
    Ok(Outcome::new(a && b && nu3 && t11.aggregate_pass && t12.aggregate_pass, format!("{da}; {db}")))
}

fn ac9() -> Result<Outcome, String> {
    let (h, _) = suite(SuiteId::GSquare, "halfline", &[("s", "1"), ("b", "1"), ("u", "0.5;1;2"), ("cv_tol", "0.01")], Some(1e-6))?;
    let norm = case(&h, "int g^2")?;
    let sixth = norm.expected.is_some_and(|e| (e - 1.0 / 6.0).abs() < 1e-14);
    let cv = case(&h, "synthesis")?;
    Ok(Outcome::new(
        h.aggregate_pass && sixth,
        format!("int g^2 u^-3 = {:.10}, synthesis CV {:.1e}; {}", norm.computed, cv.computed, failing(&h)),
    ))
}

fn ac10() -> Result<Outcome, String> {
    let (r, _) = suite(SuiteId::Reproducing, "halfline", &[("nu", "1"), ("beta", "8"), ("cv_tol", "0.02")], None)?;
    let cvs: Vec<String> = r.cases.iter().map(|c| format!("{} {:.1e}", c.label.split(' ').next().unwrap_or(""), c.computed)).collect();
    let three = r.cases.iter().all(|c| c.ratios.len() == 3);
    let (t, _) = suite(SuiteId::TBeta, "halfline", &[], None)?;
    let m1 = case(&t, "m = 1 reduces")?;
    Ok(Outcome::new(
        r.aggregate_pass && three && m1.pass,
        format!("CV {}; m = 1 reduction worst rel gap {:.1e} at 10 points", cvs.join(", "), m1.computed),
    ))
}

fn ac11a() -> Result<Outcome, String> {
    let cone = ConeDescriptor::lorentz(3).map_err(|e| e.to_string())?;
    let p_grid = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
    let nu_grid = [0.55, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0];
    let beta_grid = [0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 40.0];
    let Some(params) = search_admissible(&cone, 2, &p_grid, &nu_grid, &beta_grid) else {
        return Ok(Outcome::new(
            false,
            "no (p, nu, beta) on the grid satisfies c1, c2 and c3 on lorentz:3; c3 needs n/r < 4/5 for m = 2",
        ));
    };
    let beta: Vec<String> = params.beta.iter().map(|b| b.to_string()).collect();
    let nu: Vec<String> = params.nu.iter().map(|v| v.to_string()).collect();
    let (r, _) = suite(
        SuiteId::TBeta,
        "lorentz:3",
        &[("beta", &beta.join(",")), ("nu", &nu.join(",")), ("p", &params.p.to_string())],
        None,
    )?;
    let e = r.experiments.iter().find(|e| e["suite"] == "thm1").ok_or("no thm1 experiment")?;
    let finite = num(&e["max_ratio"]).is_finite();
    let drift = e["drift"].as_array().into_iter().flatten().map(num).fold(0.0, f64::max);
    Ok(Outcome::new(finite && drift < 0.1, format!("{params}: max ratio {}, drift {drift:.3}", e["max_ratio"])))
}

fn ac11b() -> Result<Outcome, String> {
    let (r, _) = suite(SuiteId::TBeta, "lorentz:3", &[], None)?;
    let e = r.experiments.iter().find(|e| e["suite"] == "thm1").ok_or("no thm1 experiment")?;
    let monotone = e["monotone"].as_array().is_some_and(|m| !m.is_empty() && m.iter().all(|v| v == true));
    let scales = e["scales"].as_array().map_or(0, |s| s.len());
    let pass = e["signature"] == "divergence" && e["expectation"] == "divergent" && monotone && scales == 5 && e["pass"] == true;
    Ok(Outcome::new(
        pass,
        format!(
            "{}: signature {}, slope {}, monotone over {scales} scales",
            e["params"].as_str().unwrap_or(""),
            e["signature"],
            e["slopes"][0]
        ),
    ))
}

fn ac12() -> Result<Outcome, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for cone in [ConeDescriptor::halfline(), ConeDescriptor::lorentz(3).map_err(|e| e.to_string())?, ConeDescriptor::lorentz(5).map_err(|e| e.to_string())?] {
        let n = cone.n();
        let e = cone.identity();
        for _ in 0..1000 {
            let bar: Vec<f64> = (1..n).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
            let len = bar.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut coords = vec![len + 0.05 + 3.0 * rng.random::<f64>()];
            coords.extend(bar);
            let x = AlgebraElement::new(coords);
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            let sd = spectral(&cone, &x).map_err(|e| e.to_string())?;
            worst = worst.max(sd.reconstruct().sub(&x).norm() / x.norm());
            let det = determinant(&cone, &x).map_err(|e| e.to_string())?;
            worst = worst.max(rel(sd.eigenvalues.iter().product(), det));
            let inv = inverse(&cone, &x).map_err(|e| e.to_string())?;
            let one = jordan_product(&cone, &x, &inv).map_err(|e| e.to_string())?;
            worst = worst.max(one.sub(&e).norm() / e.norm());
            let s = MultiIndex::new((0..cone.r()).map(|_| 4.0 * rng.random::<f64>() - 1.0).collect());
            let t = 0.1 + 9.9 * rng.random::<f64>();
            let a = power_function(&cone, &s, &x.scale(t), false).map_err(|e| e.to_string())?;
            let b = power_function(&cone, &s, &x, false).map_err(|e| e.to_string())?;
            worst = worst.max(rel(a, t.powf(s.sum()) * b));
            count += 1;
        }
    }
    let time = start.elapsed().as_secs_f64();
    Ok(Outcome::new(worst <= 1e-10 && time < 5.0, format!("{count} points, worst residual {worst:.1e}, {time:.3} s")))
}

fn main() {
    let criteria: Vec<(&str, &str, fn() -> Result<Outcome, String>)> = vec![
        ("AC1", "gamma integral vs product formula", ac1),
        ("AC2", "beta integral vs gamma ratio", ac2),
        ("AC3", "Laplace transform of Delta_s", ac3),
        ("AC4", "rotated beta integral", ac4),
        ("AC5", "cone integrals J_alpha and Delta_beta(y + t)", ac5),
        ("AC6", "box operator symbol and stencil order", ac6),
        ("AC7", "Paley-Wiener norm identity and Plancherel", ac7),
        ("AC8", "Hardy-to-Bergman embeddings", ac8),
        ("AC9", "g(u) coefficient of F^2", ac9),
        ("AC10", "reproducing formulas and the m = 1 reduction", ac10),
        ("AC11a", "thm1 with admissible parameters on lorentz:3", ac11a),
        ("AC11b", "thm1 with a violated condition: divergence signature", ac11b),
        ("AC12", "algebra properties at 1000 random points", ac12),
    ];
    let mut failed = Vec::new();
    for (id, what, f) in criteria {
        let start = Instant::now();
        let outcome = f().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let outcome = if id == "AC12" { outcome } else { outcome.and(Outcome::new(true, format!("{:.1} s", start.elapsed().as_secs_f64()))) };
        println!("{id:<6} {} {what}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
        if !outcome.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all acceptance criteria pass");
    } else {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
