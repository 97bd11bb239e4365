//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use pradius::harness::{Report, SuiteConfig};
use pradius::laws::{self, LawCheck, LawId, LawKind};
use pradius::{omega, random_matrix, schatten, ComplexMatrix, MatrixKind, OptimizerConfig, PNorm};

const CERT_EPS: f64 = 1e-6;
const SPOT_SLOP: f64 = 1e-8;
const SPOT_SECONDS: f64 = 1.0;
const TRIALS_PER_LAW: usize = 200;
const SUITE_DIMS: [usize; 4] = [1, 2, 3, 5];
const ORACLE_MATRICES: u64 = 50;
const ORACLE_GRID: usize = 100_000;
const FROBENIUS_REL: f64 = 1e-10;
const UNITARY_REL: f64 = 1e-8;
const SCHATTEN_MATRICES: u64 = 100;
const MASTER_SEED: u64 = 20_240_601;

type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pradius"))
}

fn p(x: f64) -> PNorm {
    PNorm::new(x).unwrap()
}

fn spot_checks() -> Outcome {
    let start = Instant::now();
    let j = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
    let mut cases = vec![(ComplexMatrix::diag_real(&[1.0, -2.0]), PNorm::ONE, 3.0, "diag(1,-2)")];
    for q in [1.0, 2.0, 4.0] {
        cases.push((j.clone(), p(q), 2f64.powf(1.0 / q - 1.0), "jordan"));
    }
    cases.push((j.clone(), PNorm::INFINITY, 0.5, "jordan"));
    for q in [1.0, 2.0] {
        cases.push((ComplexMatrix::identity(3), p(q), 3f64.powf(1.0 / q), "I_3"));
    }
    let cfg = OptimizerConfig::with_eps(CERT_EPS);
    let mut bad = Vec::new();
    for (a, q, expect, name) in &cases {
        let r = omega(a, *q, &cfg).unwrap();
        let ok = r.eps <= CERT_EPS && r.value - SPOT_SLOP <= *expect && *expect <= r.upper() + SPOT_SLOP;
        if !ok {
            bad.push(format!("{name} p={q}: [{}, {}] vs {expect}", r.value, r.upper()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= SPOT_SECONDS {
        bad.push(format!("took {secs:.3}s"));
    }
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} closed forms in {secs:.3}s", cases.len())
        } else {
            bad.join("; ")
        },
    }
}

/// Runs `suite` for one law with enough trials per cell to reach the
/// per-law total, returning the exit code and the parsed report.
fn law_suite(id: LawId, dir: &Path) -> (i32, Report) {
    let law = laws::law(id);
    let defaults = SuiteConfig::default();
    let cells = defaults.p_grid.iter().filter(|&&q| law.p_domain.contains(q)).count() * SUITE_DIMS.len();
    let cfg = SuiteConfig {
        dims: SUITE_DIMS.to_vec(),
        trials: TRIALS_PER_LAW.div_ceil(cells),
        master_seed: MASTER_SEED,
        laws: Some(vec![id]),
        ..defaults
    };
    let cfg_path = dir.join(format!("{id}.config.json"));
    let out_path = dir.join(format!("{id}.report.json"));
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let status = bin()
        .args(["suite", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap()
        .status;
    let report = Report::from_json_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    (status.code().unwrap_or(-1), report)
}

fn suite_criterion(kind: LawKind, dir: &Path) -> Outcome {
    let mut bad = Vec::new();
    let mut total = 0;
    for law in laws::list_laws().iter().filter(|l| l.kind == kind) {
        let (code, report) = law_suite(law.id, dir);
        let t = &report.laws[0].tally;
        total += t.trials;
        if code != 0 || t.passes != t.trials || t.trials < TRIALS_PER_LAW {
            let example = report.failures.first().map(|f| f.reproduce.clone()).unwrap_or_default();
            bad.push(format!(
                "{} exit {code}: {}/{} fail, {} uncertified, min slack {:e} (e.g. {example})",
                law.id,
                t.failures,
                t.trials,
                t.uncertified,
                t.min_slack.unwrap_or(f64::NAN)
            ));
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{total} trials, all within budget, exit 0")
        } else {
            bad.join("; ")
        },
    }
}

fn write_matrix(dir: &Path, name: &str, m: &ComplexMatrix) -> String {
    let path = dir.join(name);
    std::fs::write(&path, m.to_json_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn check_inputs(dir: &Path, law: &str, q: &str, inputs: &[&str]) -> Option<LawCheck> {
    let out = dir.join(format!("{law}-{q}.check.json"));
    let mut cmd = bin();
    cmd.args(["check", "--law", law, "--p", q, "--out"]).arg(&out);
    for f in inputs {
        cmd.args(["--input", f]);
    }
    let status = cmd.output().unwrap().status;
    if status.code() != Some(0) {
        return None;
    }
    serde_json::from_str(&std::fs::read_to_string(out).unwrap()).ok()
}

fn sharpness_witnesses(dir: &Path) -> Outcome {
    let a = random_matrix(MatrixKind::Ginibre, 3, 7).unwrap();
    let b = random_matrix(MatrixKind::Ginibre, 3, 8).unwrap();
    let fa = write_matrix(dir, "witness_a.json", &a);
    let fb = write_matrix(dir, "witness_b.json", &b);
    let fz = write_matrix(dir, "witness_zero.json", &ComplexMatrix::zeros(3));
    let tight = |c: &LawCheck, k: usize| c.links[k].slack.abs() <= c.eps_budget;
    let mut bad = Vec::new();
    for q in ["1", "2", "3.5", "inf"] {
        match check_inputs(dir, "T32", q, &[&fa, &fa]) {
            Some(c) if tight(&c, 0) => {}
            other => bad.push(format!("T32 p={q} A=B: {:?}", other.map(|c| c.links[0].slack))),
        }
        match check_inputs(dir, "T42", q, &[&fb, &fz]) {
            Some(c) if tight(&c, 0) && tight(&c, 1) => {}
            other => bad.push(format!("T42 p={q} B=0: {:?}", other.map(|c| c.links))),
        }
        match check_inputs(dir, "L14", q, &[&fb]) {
            Some(c) if c.slack.abs() <= c.eps_budget => {}
            other => bad.push(format!("L14 p={q}: {:?}", other.map(|c| c.slack))),
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            "T32 lower link at A=B, T42 both links at B=0, L14 exact, p in {1, 2, 3.5, inf}".into()
        } else {
            bad.join("; ")
        },
    }
}

fn optimizer_oracle() -> Outcome {
    let mut bad = Vec::new();
    let (mut above, mut below, mut worst_below) = (0, 0, 0.0f64);
    let cfg = OptimizerConfig::with_eps(CERT_EPS);
    let fine = OptimizerConfig::with_eps(CERT_EPS / 10.0);
    for seed in 0..ORACLE_MATRICES {
        let n = 1 + (seed as usize % 5);
        let a = random_matrix(MatrixKind::Ginibre, n, 1_000 + seed).unwrap();
        for q in [PNorm::ONE, PNorm::TWO, PNorm::INFINITY] {
            let r = omega(&a, q, &cfg).unwrap();
            // independent oracle: Jacobi SVD on a uniform grid
            let grid = (0..ORACLE_GRID)
                .map(|k| {
                    let t = PI * k as f64 / ORACLE_GRID as f64;
                    schatten(&a.rotate(t).re_part().unwrap(), q).unwrap()
                })
                .fold(0.0, f64::max);
            if grid > r.upper() {
                above += 1;
                bad.push(format!("seed {seed} n={n} p={q}: grid {grid} above {}", r.upper()));
            } else if grid < r.value {
                below += 1;
                worst_below = worst_below.max(r.value - grid);
                bad.push(format!("seed {seed} n={n} p={q}: grid {grid} below {}", r.value));
            }
            let r10 = omega(&a, q, &fine).unwrap();
            if !r.contains(r10.value) {
                bad.push(format!("seed {seed} n={n} p={q}: eps/10 value {} outside [{}, {}]", r10.value, r.value, r.upper()));
            }
        }
    }
    let cases = ORACLE_MATRICES * 3;
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{cases} certified intervals contain the grid maximum and the eps/10 value")
        } else {
            format!(
                "{cases} cases: grid above value+eps {above}, grid below value {below} (by at most {worst_below:.1e}); {}",
                bad.join("; ")
            )
        },
    }
}

fn schatten_oracle() -> Outcome {
    let mut worst_frob: f64 = 0.0;
    let mut worst_unitary: f64 = 0.0;
    for seed in 0..SCHATTEN_MATRICES {
        let n = 1 + (seed as usize % 8);
        let a = random_matrix(MatrixKind::Ginibre, n, 5_000 + seed).unwrap();
        let frob = a.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let s2 = schatten(&a, PNorm::TWO).unwrap();
        worst_frob = worst_frob.max((s2 - frob).abs() / frob);
        let u = random_matrix(MatrixKind::Unitary, n, 9_000 + seed).unwrap();
        let v = random_matrix(MatrixKind::Unitary, n, 13_000 + seed).unwrap();
        let uav = u.try_mul(&a).unwrap().try_mul(&v).unwrap();
        for q in [1.0, 1.5, 2.0, 3.0, 10.0, f64::INFINITY] {
            let x = schatten(&a, p(q)).unwrap();
            let y = schatten(&uav, p(q)).unwrap();
            worst_unitary = worst_unitary.max((x - y).abs() / x);
        }
    }
    Outcome {
        passed: worst_frob <= FROBENIUS_REL && worst_unitary <= UNITARY_REL,
        detail: format!("max rel. Frobenius error {worst_frob:.2e}, max rel. unitary drift {worst_unitary:.2e}"),
    }
}

fn strip_wall_clock(s: &str) -> String {
    s.lines().filter(|l| !l.contains("\"wall_clock_s\"")).collect::<Vec<_>>().join("\n")
}

fn determinism(dir: &Path) -> Outcome {
    let cfg = SuiteConfig {
        dims: vec![1, 2, 3],
        trials: 3,
        master_seed: MASTER_SEED,
        ..SuiteConfig::default()
    };
    let cfg_path = dir.join("determinism.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let mut runs = Vec::new();
    for (k, threads) in ["1", "2", "1", "4"].iter().enumerate() {
        let out = dir.join(format!("det{k}.json"));
        let csv = dir.join(format!("det{k}.csv"));
        bin()
            .args(["suite", "--threads", threads, "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .arg("--csv")
            .arg(&csv)
            .output()
            .unwrap();
        runs.push((
            strip_wall_clock(&std::fs::read_to_string(&out).unwrap()),
            std::fs::read_to_string(&csv).unwrap(),
        ));
    }
    let identical = runs.windows(2).all(|w| w[0] == w[1]);
    Outcome {
        passed: identical && !runs[0].0.is_empty(),
        detail: format!("4 runs with 1, 2, 1, 4 threads: reports {}", if identical { "identical" } else { "differ" }),
    }
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<Criterion> = vec![
        ("closed-form radius values", Box::new(spot_checks)),
        ("equality laws on seeded trials", Box::new(|| suite_criterion(LawKind::Equality, dir.path()))),
        ("inequality laws on seeded trials", Box::new(|| suite_criterion(LawKind::InequalityChain, dir.path()))),
        ("sharpness witnesses", Box::new(|| sharpness_witnesses(dir.path()))),
        ("optimizer against dense grid", Box::new(optimizer_oracle)),
        ("Schatten norm oracle", Box::new(schatten_oracle)),
        ("report determinism", Box::new(|| determinism(dir.path()))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {verdict} ({:.1}s) {}", k + 1, start.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
