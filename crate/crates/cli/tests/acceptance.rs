//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use sbm_cli::config::{ConfigLayer, ExperimentConfig, Mode};
use sbm_cli::experiments::{run_distinguish, run_table1};
use sbm_core::assignment::max_weight_assignment;
use sbm_core::params::lambda_min;
use sbm_core::partition::{count_with_overlap, overlap, overlap_counts, overlap_matrix};
use sbm_core::secondmoment::{
    an_entropy_bound, an_lemma_check, max_phi, phi, phi_gradient, quadratic_form, random_doubly_stochastic, row_entropy,
    second_moment_estimate,
};
use sbm_core::thresholds::{coloring_dc_upper, dc_lower, dc_upper, kesten_stigum};
use sbm_core::{ConnectivityMatrix, Partition, RandomStream, SquareMatrix};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn cfg(mode: Mode, json: &str) -> ExperimentConfig {
    let layer: ConfigLayer = serde_json::from_str(json).unwrap();
    ExperimentConfig::resolve(mode, None, layer).unwrap()
}

/// Independent evaluation of the first-moment upper bound.
fn upper_formula(k: f64, lambda: f64) -> f64 {
    let xlx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    2.0 * k * k.ln() / (xlx(1.0 + (k - 1.0) * lambda) + (k - 1.0) * xlx(1.0 - lambda))
}

fn table1() -> Outcome {
    let printed = [
        (5, -0.239),
        (6, -0.166),
        (7, -0.112),
        (8, -0.070),
        (9, -0.036),
        (11, 0.014),
        (20, 0.127),
        (100, 0.286),
        (1000, 0.372),
        (10_000, 0.410),
    ];
    let start = Instant::now();
    let rows = run_table1(None).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for (k, want) in printed {
        let got = rows.iter().find(|r| r.0 == k).ok_or(format!("no row for k={k}"))?.1;
        ensure!((got - want).abs() <= 0.002, "k={k}: computed {got:.4}, table {want}");
    }
    let k10 = rows.iter().find(|r| r.0 == 10).ok_or("no row for k=10")?.1;
    // The k=10 value must sit between its neighbours.
    let (k9, k11) = (rows[4].1, rows[6].1);
    ensure!(k9 < k10 && k10 < k11, "k=10 value {k10} not between {k9} and {k11}");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("k=10 computed {k10:.4} (printed -0.08); {elapsed:.2?}"))
}

fn coloring() -> Outcome {
    let mut worst = 0.0f64;
    for k in 2..=10_000usize {
        let kf = k as f64;
        let general = dc_upper(k, -1.0 / (kf - 1.0)).map_err(|e| e.to_string())?;
        let special = coloring_dc_upper(k).map_err(|e| e.to_string())?;
        let closed = 2.0 * kf.ln() / -(1.0 - 1.0 / kf).ln();
        let diff = (general - special).abs();
        worst = worst.max(diff);
        ensure!(diff <= 1e-10, "k={k}: {general} vs {special}");
        ensure!((special - closed).abs() <= 1e-10 * closed.max(1.0), "k={k}: {special} vs closed form {closed}");
        ensure!(special < 2.0 * kf * kf.ln(), "k={k}: {special} >= 2k ln k");
    }
    Ok(format!("max |difference| {worst:.1e}"))
}

fn corollary() -> Outcome {
    let oracle = 2.0 * 5f64.ln() / (5f64 / 4.0).ln();
    ensure!((oracle - 14.4251).abs() < 5e-5, "oracle {oracle}");
    let d5 = dc_upper(5, -0.25).map_err(|e| e.to_string())?;
    ensure!((d5 - oracle).abs() < 1e-10, "dc_upper(5,-1/4) = {d5}, oracle {oracle}");
    ensure!(d5 < 16.0 && kesten_stigum(-0.25) == 16.0, "{d5} vs KS {}", kesten_stigum(-0.25));
    let d11 = dc_upper(11, 0.01).map_err(|e| e.to_string())?;
    let oracle11 = upper_formula(11.0, 0.01);
    ensure!((d11 - oracle11).abs() < 1e-8 * oracle11, "dc_upper(11,0.01) = {d11}, oracle {oracle11}");
    ensure!(d11 < 1e4, "dc_upper(11,0.01) = {d11}");
    Ok(format!("dc_upper(5,-1/4) = {d5:.4} < 16; dc_upper(11,0.01) = {d11:.1} < 10000"))
}

/// `Tr[αᵀ B α B]` with plain loops.
fn trace_oracle(alpha: &SquareMatrix, b: &[Vec<f64>]) -> f64 {
    let k = alpha.dim();
    let mut total = 0.0;
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                for m in 0..k {
                    // (αᵀ)_ij B_jl α_lm B_mi
                    total += alpha[(j, i)] * b[j][l] * alpha[(l, m)] * b[m][i];
                }
            }
        }
    }
    total
}

fn trace_identity() -> Outcome {
    let mut rng = RandomStream::new(41, 4).rng();
    let mut worst = 0.0f64;
    for k in 2..=8usize {
        let kf = k as f64;
        for lambda in [-1.0 / (kf - 1.0), -0.05, 0.1, 0.5, 1.0] {
            let b: Vec<Vec<f64>> = (0..k)
                .map(|r| (0..k).map(|s| if r == s { lambda } else { 0.0 } + (1.0 - lambda) / kf - 1.0 / kf).collect())
                .collect();
            let gamma = ConnectivityMatrix::from_lambda(k, lambda);
            for i in 0..1000 {
                let a = random_doubly_stochastic(k, 0.2 + (i % 10) as f64 * 0.5, &mut rng).map_err(|e| e.to_string())?;
                let rhs = lambda * lambda * (a.frobenius_sq() - 1.0);
                let lib = quadratic_form(&a, &gamma).map_err(|e| e.to_string())?;
                let direct = trace_oracle(&a, &b);
                worst = worst.max((lib - rhs).abs()).max((direct - rhs).abs());
                ensure!((lib - rhs).abs() < 1e-10 && (direct - rhs).abs() < 1e-10, "k={k} λ={lambda}: {lib} {direct} vs {rhs}");
            }
        }
    }
    Ok(format!("35000 matrices, max error {worst:.1e}"))
}

fn phi_anchors() -> Outcome {
    let mut rng = RandomStream::new(5, 5).rng();
    for _ in 0..100 {
        let k = rng.random_range(2..12usize);
        let lambda = rng.random_range(lambda_min(k)..=1.0);
        let d = rng.random_range(0.0..100.0);
        let kf = k as f64;
        let flat = phi(&SquareMatrix::flat(k), d, lambda);
        ensure!(flat.abs() < 1e-12, "Φ(J/k) = {flat} at k={k} d={d} λ={lambda}");
        let id = phi(&SquareMatrix::identity(k), d, lambda);
        let closed = -kf.ln() + d * lambda * lambda * (kf - 1.0) / 2.0;
        ensure!((id - closed).abs() < 1e-12, "Φ(I) = {id} vs {closed}");
    }
    Ok("100 random (k,d,λ)".into())
}

fn certification() -> Outcome {
    let start = Instant::now();
    for k in [3usize, 4, 5, 8] {
        let kf = k as f64;
        for lambda in [-1.0 / (kf - 1.0), -0.1, 0.3] {
            let d = 0.9 * dc_lower(k, lambda).map_err(|e| e.to_string())?;
            let r = max_phi(k, d, lambda, 8).map_err(|e| e.to_string())?;
            ensure!(r.negative_certified, "k={k} λ={lambda}: not certified");
            ensure!(r.phi_value <= 1e-8, "k={k} λ={lambda}: Φ = {}", r.phi_value);
            let dist = r.best_alpha.max_abs_diff(&SquareMatrix::flat(k));
            ensure!(dist < 1e-3, "k={k} λ={lambda}: best α is {dist} from J/k");

            let d_hot = 1.1 * 2.0 * kf.ln() / (lambda * lambda * (kf - 1.0));
            let hot = max_phi(k, d_hot, lambda, 8).map_err(|e| e.to_string())?;
            ensure!(hot.phi_value > 0.0, "k={k} λ={lambda} d={d_hot}: Φ = {}", hot.phi_value);
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("12 cells; {elapsed:.2?}"))
}

fn an_bound() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for k in 2..=6usize {
        let mut rng = RandomStream::new(k as u64, 7).rng();
        for i in 0..10_000 {
            let a = random_doubly_stochastic(k, 0.1 + (i % 20) as f64 * 0.4, &mut rng).map_err(|e| e.to_string())?;
            let rho = a.frobenius_sq();
            let excess = row_entropy(&a) - an_entropy_bound(rho, k).map_err(|e| e.to_string())?;
            worst = worst.max(excess);
            ensure!(excess <= 1e-6, "k={k} ρ={rho}: entropy exceeds bound by {excess}");
        }
    }
    for k in 3..=6usize {
        let kf = k as f64;
        let delta = 0.999 * (kf - 1.0) * (kf - 1.0).ln();
        for i in 0..200 {
            let rho = 1.0 + (kf - 1.0) * i as f64 / 199.0;
            let m_max = kf * (kf - rho) / (kf - 1.0);
            for j in 0..200 {
                let m = m_max * j as f64 / 199.0;
                let holds = an_lemma_check(delta, rho, m, k).map_err(|e| e.to_string())?;
                ensure!(holds, "k={k} ρ={rho} m={m}: lemma fails");
            }
        }
    }
    Ok(format!("max entropy excess {worst:.1e}"))
}

fn balanced_partitions(n: usize, k: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let labels: Vec<usize> = (0..n)
            .map(|_| {
                let l = c % k;
                c /= k;
                l
            })
            .collect();
        let p = Partition::new(k, labels).unwrap();
        if p.is_balanced() {
            out.push(p);
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn brute_matched(counts: &[i64], k: usize) -> i64 {
    permutations(k).iter().map(|p| (0..k).map(|r| counts[r * k + p[r]]).sum::<i64>()).max().unwrap()
}

fn overlap_lemma() -> Outcome {
    let all = balanced_partitions(8, 2);
    ensure!(all.len() == 70, "{} balanced partitions at n=8", all.len());
    let check = |s: &Partition, t: &Partition| -> Result<(), String> {
        let alpha = overlap_matrix(s, t).map_err(|e| e.to_string())?;
        let beta = overlap(s, t).map_err(|e| e.to_string())?;
        let k = s.k() as f64;
        ensure!(alpha.frobenius_sq() <= k * beta + 1e-9, "|α|² = {} > kβ = {}", alpha.frobenius_sq(), k * beta);
        Ok(())
    };
    for s in &all {
        for t in &all {
            check(s, t)?;
        }
    }
    let mut rng = RandomStream::new(8, 8).rng();
    for k in [2usize, 3, 4] {
        for _ in 0..10_000 {
            let s = Partition::random_balanced(24, k, &mut rng).map_err(|e| e.to_string())?;
            let t = Partition::random_balanced(24, k, &mut rng).map_err(|e| e.to_string())?;
            check(&s, &t)?;
        }
    }
    for i in 0..1000 {
        let k = 1 + i % 6;
        let s = Partition::random_balanced(6 * k, k, &mut rng).map_err(|e| e.to_string())?;
        let t = Partition::random_balanced(6 * k, k, &mut rng).map_err(|e| e.to_string())?;
        let counts = overlap_counts(&s, &t).map_err(|e| e.to_string())?;
        let beta = overlap(&s, &t).map_err(|e| e.to_string())?;
        let brute = brute_matched(&counts, k) as f64 / (6 * k) as f64;
        ensure!(beta == brute, "k={k}: solver {beta}, brute force {brute}");

        let w: Vec<i64> = (0..k * k).map(|_| rng.random_range(-50..50)).collect();
        let perm = max_weight_assignment(&w, k);
        let got: i64 = (0..k).map(|r| w[r * k + perm[r]]).sum();
        ensure!(got == brute_matched(&w, k), "k={k}: assignment {got} vs brute force {}", brute_matched(&w, k));
    }
    Ok("4900 exhaustive pairs, 30000 random pairs, 2000 assignment instances".into())
}

fn counting_oracle() -> Outcome {
    let all = balanced_partitions(6, 2);
    ensure!(all.len() == 20, "{} balanced partitions", all.len());
    let sigma = &all[0];
    let mut groups = std::collections::BTreeMap::<Vec<i64>, u64>::new();
    for tau in &all {
        *groups.entry(overlap_counts(sigma, tau).map_err(|e| e.to_string())?).or_default() += 1;
    }
    let mut total = 0u64;
    for a in 0..=3i64 {
        let counts = vec![a, 3 - a, 3 - a, a];
        let alpha = SquareMatrix::from_fn(2, |r, s| counts[r * 2 + s] as f64 / 3.0);
        let formula = count_with_overlap(&alpha, 6, 2).map_err(|e| e.to_string())?.exp().round() as u64;
        let brute = groups.get(&counts).copied().unwrap_or(0);
        ensure!(formula == brute, "α cells {counts:?}: formula {formula}, enumeration {brute}");
        total += formula;
    }
    ensure!(total == 20, "counts sum to {total}");
    ensure!(groups.values().sum::<u64>() == 20, "enumeration covers {}", groups.values().sum::<u64>());
    Ok("counts 1, 9, 9, 1".into())
}

fn gradient() -> Outcome {
    let mut rng = RandomStream::new(10, 10).rng();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let k = 2 + i % 6;
        let a = random_doubly_stochastic(k, 1.0, &mut rng).map_err(|e| e.to_string())?;
        let d = rng.random_range(0.5..20.0);
        let lambda = rng.random_range(lambda_min(k)..1.0);
        let g = phi_gradient(&a, d, lambda);
        for idx in 0..k * k {
            let h = 1e-5 * a.as_slice()[idx];
            let mut plus = a.clone();
            let mut minus = a.clone();
            plus.as_mut_slice()[idx] += h;
            minus.as_mut_slice()[idx] -= h;
            let fd = (phi(&plus, d, lambda) - phi(&minus, d, lambda)) / (2.0 * h);
            let analytic = g.as_slice()[idx];
            let rel = (fd - analytic).abs() / analytic.abs().max(1e-3);
            worst = worst.max(rel);
            ensure!(rel < 1e-6, "k={k} entry {idx}: analytic {analytic}, finite difference {fd}");
        }
    }
    Ok(format!("max relative error {worst:.1e}"))
}

fn distinguishing() -> Outcome {
    let start = Instant::now();
    let c = cfg(Mode::Distinguish, r#"{"k": 2, "n": 16, "d": 8.0, "lambda": 0.9, "trials": 200, "seed": 2016}"#);
    let r = run_distinguish(&c).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let gap = r.p_good_sbm - r.p_good_er;
    let summary = format!(
        "p_good_sbm {:.3}, p_good_er {:.3}, mean_overlap {:?}; {elapsed:.2?}",
        r.p_good_sbm, r.p_good_er, r.mean_overlap
    );
    ensure!(gap > 0.3, "gap {gap:.3} <= 0.3: {summary}");
    ensure!(r.mean_overlap.is_some_and(|b| b > 0.75), "mean_overlap too low: {summary}");
    ensure!(elapsed < Duration::from_secs(120), "too slow: {summary}");
    Ok(summary)
}

fn second_moment() -> Outcome {
    let mut means = Vec::new();
    for n in [6usize, 9, 12] {
        let est = second_moment_estimate(3, 0.5, 0.6, n, 10_000, RandomStream::new(12, n as u64)).map_err(|e| e.to_string())?;
        ensure!(est.mean <= 10.0, "n={n}: E_Q(P/Q)² = {} ± {}", est.mean, est.std_error);
        means.push(est.mean);
    }
    for w in means.windows(2) {
        ensure!(w[1] / w[0] < 2.0, "estimates {means:?} grow too fast");
    }
    Ok(format!("estimates {:.3} {:.3} {:.3}", means[0], means[1], means[2]))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let graph = dir.path().join("graph.txt");
    let graph_arg = graph.to_str().unwrap().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["thresholds", "--k", "5", "--lambda", "-0.25"],
        vec!["table1"],
        vec!["grid", "--ks", "3,5,11", "--steps", "11"],
        vec!["generate", "--k", "2", "--n", "12", "--d", "4", "--lambda", "0.5", "--seed", "3"],
        vec!["detect", "--k", "2", "--d", "4", "--lambda", "0.5", "--graph", &graph_arg],
        vec!["phi", "--k", "3", "--d", "2", "--lambda", "0.5", "--restarts", "4", "--seed", "3"],
        vec!["secondmoment", "--k", "3", "--d", "0.5", "--lambda", "0.6", "--n", "6", "--trials", "1000", "--seed", "3"],
        vec!["distinguish", "--k", "2", "--n", "12", "--d", "4", "--lambda", "0.6", "--trials", "50", "--seed", "3"],
    ];
    std::fs::write(&graph, "").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sbmcond"))
        .args(["generate", "--k", "2", "--n", "12", "--d", "4", "--lambda", "0.5", "--seed", "1", "--out", &graph_arg])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "generate failed");
    let target = dir.path().join("out");
    let target_arg = target.to_str().unwrap();
    for args in &commands {
        let mut seen: Option<Vec<u8>> = None;
        for threads in [1, 4, 1] {
            let out = Command::new(env!("CARGO_BIN_EXE_sbmcond"))
                .args(args)
                .args(["--out", target_arg])
                .env("RAYON_NUM_THREADS", threads.to_string())
                .output()
                .map_err(|e| e.to_string())?;
            ensure!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
            let bytes = std::fs::read(&target).map_err(|e| e.to_string())?;
            if let Some(prev) = &seen {
                ensure!(*prev == bytes, "{args:?}: output changed between runs");
            }
            seen = Some(bytes);
        }
    }
    let c = cfg(Mode::Distinguish, r#"{"k": 2, "n": 12, "d": 5.0, "lambda": 0.7, "trials": 64, "seed": 13}"#);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run_distinguish(&c).unwrap())
    };
    let one = run(1);
    for threads in [2, 3, 8] {
        ensure!(run(threads) == one, "aggregates differ with {threads} workers");
    }
    Ok("8 commands x 3 runs byte-identical; aggregates equal for 1, 2, 3, 8 workers".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("Table 1 reproduction", table1),
        ("coloring consistency", coloring),
        ("corollary check", corollary),
        ("trace identity", trace_identity),
        ("Phi anchor values", phi_anchors),
        ("negativity certification", certification),
        ("entropy bound and lemma", an_bound),
        ("overlap lemma and assignment", overlap_lemma),
        ("counting oracle", counting_oracle),
        ("gradient check", gradient),
        ("desk-scale distinguishing", distinguishing),
        ("second-moment trend", second_moment),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
