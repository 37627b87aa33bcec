//! Acceptance suite. Every criterion prints one PASS/FAIL line to stderr
//! (written directly, so it shows without `--nocapture`) and then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use labornet::experiments::{
    argmax_by, referral_experiment, run_alpha_sweep, run_df_sweep, run_mean_degree_sweep, run_phi_sweep, run_table2,
    RunOptions, SweepPoint, ALPHA_GRID,
};
use labornet::simulate::estimate_referral_rate;
use labornet::solver::flow_residual;
use labornet::{
    calibrate, solve_equilibrium, CalibrationTargets, DegreeDistribution, Equilibrium, GivenParams, GroupSpec,
    ModelParams, SolverConfig,
};

fn verdict(id: &str, pass: bool, detail: &str) {
    let line = format!("[{}] criterion {id}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// Collects individual checks of one criterion and reports them together.
struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn new() -> Self {
        Checks { failures: Vec::new(), count: 0 }
    }

    fn within(&mut self, label: &str, actual: f64, expected: f64, tol: f64) {
        self.count += 1;
        let close = (actual - expected).abs() <= tol;
        if !close {
            self.failures.push(format!("{label} = {actual:.6e}, expected {expected} ± {tol:e}"));
        }
    }

    fn holds(&mut self, label: &str, ok: bool) {
        self.count += 1;
        if !ok {
            self.failures.push(label.to_string());
        }
    }

    fn runtime(&mut self, label: &str, elapsed: Duration, limit: Duration) {
        self.holds(&format!("{label} runtime {elapsed:?} < {limit:?}"), elapsed < limit);
    }

    fn finish(self, id: &str, title: &str) {
        let pass = self.failures.is_empty();
        let detail = if pass {
            format!("{title} ({} checks)", self.count)
        } else {
            format!("{title}; {}/{} checks failed: {}", self.failures.len(), self.count, self.failures.join("; "))
        };
        verdict(id, pass, &detail);
        assert!(pass, "{detail}");
    }
}

fn two(a: DegreeDistribution, b: DegreeDistribution) -> Vec<GroupSpec> {
    vec![GroupSpec::new(1e6, a).unwrap(), GroupSpec::new(1e6, b).unwrap()]
}

fn calibrated() -> ModelParams {
    calibrate(&GivenParams::default(), &CalibrationTargets::default()).unwrap()
}

#[test]
fn criterion_1_calibration() {
    let mut c = Checks::new();
    let start = Instant::now();
    let p = calibrated();
    c.runtime("calibrate", start.elapsed(), Duration::from_secs(1));
    c.within("gamma", p.gamma, 0.402, 0.002);
    c.within("beta", p.beta, 0.028, 0.002);
    c.within("c", p.c, 7.188, 0.02);
    c.within("phi", p.phi, 0.048, 0.002);
    c.finish("1", "calibration recovers gamma, beta, c, phi");
}

#[test]
fn criterion_2_baseline() {
    let mut c = Checks::new();
    let p = calibrated();
    let start = Instant::now();
    let d = DegreeDistribution::poisson(22.47).unwrap();
    let eq = solve_equilibrium(&p, &two(d, d), &SolverConfig::default()).unwrap();
    c.runtime("baseline solve", start.elapsed(), Duration::from_secs(1));
    for (i, g) in eq.groups.iter().enumerate() {
        c.within(&format!("u_{}", i + 1), g.u, 0.044, 0.001);
        c.within(&format!("w_{}", i + 1), g.wage, 0.600, 0.002);
        c.within(&format!("referral share {}", i + 1), g.p_referral / g.p_total, 0.50, 0.01);
    }
    c.within("v", eq.v, 0.040, 0.001);
    c.finish("2", "baseline solve with two Poisson(22.47) groups");
}

#[test]
fn criterion_3_table2() {
    let mut c = Checks::new();
    let start = Instant::now();
    let result = run_table2(&ModelParams::default(), &RunOptions::default()).unwrap();
    c.runtime("table 2", start.elapsed(), Duration::from_secs(10));

    let er = result.find("erdos_renyi").unwrap();
    let g = &er.equilibrium.groups;
    c.within("ER u_1", g[0].u, 0.0510, 0.0005);
    c.within("ER u_2", g[1].u, 0.0394, 0.0005);
    c.within("ER w_1", g[0].wage, 0.581, 0.002);
    c.within("ER w_2", g[1].wage, 0.615, 0.002);
    c.within("ER SW", er.welfare.social_welfare, 0.685, 0.003);
    c.within("ER Gini", er.welfare.gini, 1.45e-2, 0.10 * 1.45e-2);

    let reg = result.find("regular").unwrap();
    let g = &reg.equilibrium.groups;
    c.within("Regular u_1", g[0].u, 0.0508, 0.0005);
    c.within("Regular u_2", g[1].u, 0.0393, 0.0005);

    let sf = result.find("scale_free").unwrap();
    let g = &sf.equilibrium.groups;
    c.within("Scale-free u_1", g[0].u, 0.0814, 0.001);
    c.within("Scale-free u_2", g[1].u, 0.0810, 0.001);
    c.within("Scale-free SW", sf.welfare.social_welfare, 0.627, 0.003);
    c.finish("3", "mean degree 15 vs 30 under each network family");
}

#[test]
fn criterion_4_zipf_means() {
    let mut c = Checks::new();
    let expected = [22.47, 12.86, 6.78, 2.74, 1.95, 1.37, 1.04];
    for (&alpha, &mean) in ALPHA_GRID.iter().zip(&expected) {
        let tol = if alpha == 2.028 { 0.05 } else { 0.01 };
        let actual = DegreeDistribution::zipf(alpha).unwrap().mean();
        c.within(&format!("Zipf mean at alpha {alpha}"), actual, mean, tol);
    }
    c.finish("4", "Zipf mean degree over the scale-parameter grid");
}

fn gap(p: &SweepPoint) -> f64 {
    p.equilibrium.groups[0].u - p.equilibrium.groups[1].u
}

#[test]
fn criterion_5a_er_vs_regular_gap() {
    let mut c = Checks::new();
    let grid: Vec<u32> = (0..=50).collect();
    let sweep = run_mean_degree_sweep(&ModelParams::default(), &grid, &RunOptions::default()).unwrap();
    let at_zero = sweep.points.iter().find(|p| p.axis_value == Some(0.0)).unwrap();
    c.within("u_ER - u_REG at mean degree 0", gap(at_zero), 0.0, 1e-12);
    let at = argmax_by(sweep.points.iter(), gap).unwrap();
    c.within("argmax of u_ER - u_REG over mean degree 0..=50", at, 25.0, 1.0);
    c.finish("5a", "ER vs regular unemployment gap over mean degree");
}

#[test]
fn criterion_5b_scale_free_penalty() {
    let mut c = Checks::new();
    let sweep = run_alpha_sweep(&ModelParams::default(), &ALPHA_GRID, &RunOptions::default()).unwrap();
    for p in sweep.points.iter().filter(|p| p.axis_value.unwrap() <= 2.1) {
        let g = &p.equilibrium.groups;
        c.holds(
            &format!("u_SF {:.5} > u_ER {:.5} at alpha {}", g[1].u, g[0].u, p.axis_value.unwrap()),
            g[1].u > g[0].u,
        );
    }
    c.finish("5b", "scale-free group has higher unemployment for alpha <= 2.1");
}

fn nondecreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] >= w[0])
}

#[test]
fn criterion_5c_df_sweep() {
    let mut c = Checks::new();
    let sweep = run_df_sweep(&ModelParams::default(), &RunOptions::default()).unwrap();
    let gini: Vec<f64> = sweep.points.iter().map(|p| p.welfare.gini).collect();
    let sw: Vec<f64> = sweep.points.iter().map(|p| p.welfare.social_welfare).collect();
    c.holds("Gini nondecreasing in d_f", nondecreasing(&gini));
    c.holds("SW nondecreasing in d_f", nondecreasing(&sw));
    let zero = sweep.points.iter().find(|p| p.axis_value == Some(0.0)).unwrap();
    c.within("u_ER - u_SF at d_f = 0", gap(zero), 0.0, 1e-12);
    c.within("Gini at d_f = 0", zero.welfare.gini, 0.0, 1e-12);
    c.finish("5c", "job-network degree sweep");
}

#[test]
fn criterion_5d_phi_sweep() {
    let mut c = Checks::new();
    let sweep = run_phi_sweep(&ModelParams::default(), &RunOptions::default()).unwrap();
    let zero = sweep.points.iter().find(|p| p.axis_value == Some(0.0)).unwrap();
    c.within("Gini at phi = 0", zero.welfare.gini, 0.0, 1e-12);
    let sw: Vec<f64> = sweep.points.iter().map(|p| p.welfare.social_welfare).collect();
    c.holds("SW nondecreasing in phi", nondecreasing(&sw));
    let fine = sweep.points.iter().filter(|p| p.axis_value.unwrap() <= 0.3 + 1e-12);
    let at = argmax_by(fine, |p| p.welfare.gini).unwrap();
    c.holds(&format!("Gini argmax {at} in [0.05, 0.2]"), (0.05..=0.2).contains(&at));
    c.finish("5d", "referral-frequency sweep");
}

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let base = ModelParams::default();
    let mut s = |x: f64| x * rng.random_range(0.5..1.5);
    loop {
        let p = ModelParams {
            y: s(base.y),
            b: s(base.b),
            r: s(base.r),
            delta: s(base.delta),
            eta: s(base.eta),
            gamma: s(base.gamma),
            beta: s(base.beta),
            c: s(base.c),
            phi: s(base.phi),
            d_f: (s(base.d_f as f64).round() as u32).max(1),
        };
        if p.y > p.b {
            return p;
        }
    }
}

fn random_dist(rng: &mut ChaCha8Rng) -> DegreeDistribution {
    match rng.random_range(0..3) {
        0 => DegreeDistribution::poisson(rng.random_range(1.0..40.0)).unwrap(),
        1 => DegreeDistribution::degenerate(rng.random_range(1..40)),
        _ => DegreeDistribution::zipf(rng.random_range(2.05..4.0)).unwrap(),
    }
}

fn max_u_diff(a: &Equilibrium, b: &Equilibrium, swap: bool) -> f64 {
    let n = a.groups.len();
    (0..n)
        .map(|i| {
            let j = if swap { n - 1 - i } else { i };
            (a.groups[i].u - b.groups[j].u).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn criterion_6_structural_invariants() {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = SolverConfig::default();
    for draw in 0..20 {
        let p = random_params(&mut rng);
        let (a, b) = (random_dist(&mut rng), random_dist(&mut rng));
        let sizes = (rng.random_range(1e5..2e6), rng.random_range(1e5..2e6));
        let groups = vec![GroupSpec::new(sizes.0, a).unwrap(), GroupSpec::new(sizes.1, b).unwrap()];
        let tag = format!("draw {draw}");
        let eq = match solve_equilibrium(&p, &groups, &cfg) {
            Ok(eq) => eq,
            Err(e) => {
                c.holds(&format!("{tag}: solve failed: {e}"), false);
                continue;
            }
        };
        for s in &eq.groups {
            c.within(&format!("{tag}: J - (1-beta)S"), s.value_filled_job - (1.0 - p.beta) * s.surplus, 0.0, 1e-10);
        }
        let res = flow_residual(&p, &groups, &eq.u_vec(), eq.v).unwrap();
        c.within(&format!("{tag}: flow residual"), res.iter().fold(0.0, |m: f64, r| m.max(r.abs())), 0.0, 1e-12);
        c.within(&format!("{tag}: rV"), p.r * eq.vacancy_value, 0.0, 1e-8);

        let k = rng.random_range(1e-3..1e3);
        let scaled: Vec<GroupSpec> = groups.iter().map(|g| GroupSpec::new(g.size * k, g.dist).unwrap()).collect();
        let eq_scaled = solve_equilibrium(&p, &scaled, &cfg).unwrap();
        c.within(&format!("{tag}: scale invariance"), max_u_diff(&eq, &eq_scaled, false), 0.0, 1e-10);

        let swapped: Vec<GroupSpec> = groups.iter().rev().copied().collect();
        let eq_swapped = solve_equilibrium(&p, &swapped, &cfg).unwrap();
        c.within(&format!("{tag}: permutation equivariance"), max_u_diff(&eq, &eq_swapped, true), 0.0, 1e-10);
    }
    c.finish("6", "structural invariants on 20 random draws within the +/-50% boxes");
}

#[test]
fn criterion_7_monte_carlo() {
    let mut c = Checks::new();
    let start = Instant::now();
    let p = ModelParams::default();
    let families = [
        DegreeDistribution::poisson(22.47).unwrap(),
        DegreeDistribution::degenerate(22),
        DegreeDistribution::zipf_with_mean(22.47).unwrap(),
    ];
    let cfg = SolverConfig::default();
    for dist in families {
        let mut agree = 0;
        for seed in 0..20 {
            let sim = referral_experiment(&p, dist, 500_000, 100_000, seed, &cfg).unwrap();
            let est = estimate_referral_rate(&sim).unwrap();
            agree += est.agrees_within(3.0) as usize;
        }
        c.holds(&format!("{}: {agree}/20 repetitions within 3 s.e.", dist.family()), agree >= 19);
    }
    c.runtime("Monte Carlo", start.elapsed(), Duration::from_secs(60));
    c.finish("7", "Monte Carlo referral rate agrees with the mean field");
}

/// `E[1 − (1 − P)^d]` by summing the pmf directly. Zipf sums run to `K`
/// with an Euler–Maclaurin estimate of `Σ_{k>K} k^-alpha` for both the
/// normaliser and the numerator (where `(1 − P)^k` is negligible past `K`).
fn brute_force(dist: &DegreeDistribution, p: f64, zipf_powers: Option<&[f64]>) -> f64 {
    match *dist {
        DegreeDistribution::Degenerate { k } => 1.0 - (1.0 - p).powi(k as i32),
        DegreeDistribution::Poisson { lambda } => {
            let upper = (lambda + 40.0 * lambda.sqrt() + 60.0) as u64;
            let mut pmf = (-lambda).exp();
            let mut total = 0.0;
            for k in 0..=upper {
                if k > 0 {
                    pmf *= lambda / k as f64;
                }
                total += pmf * (1.0 - (1.0 - p).powi(k as i32));
            }
            total
        }
        DegreeDistribution::Zipf { alpha } => {
            let powers = zipf_powers.unwrap();
            let big_k = powers.len() as f64;
            let tail = big_k.powf(1.0 - alpha) / (alpha - 1.0) - 0.5 * big_k.powf(-alpha)
                + alpha / 12.0 * big_k.powf(-alpha - 1.0);
            let mut norm = 0.0;
            let mut num = 0.0;
            let mut stay = 1.0;
            for &w in powers {
                stay *= 1.0 - p;
                norm += w;
                num += w * (1.0 - stay);
            }
            (num + tail) / (norm + tail)
        }
    }
}

#[test]
fn criterion_8_oracle_equivalence() {
    let mut c = Checks::new();
    let ps = [1e-4, 1e-3, 0.01, 0.022064, 0.05, 0.1, 0.3, 0.5, 0.9, 1.0];
    let mut dists: Vec<DegreeDistribution> = [0.5, 5.0, 22.47, 100.0]
        .iter()
        .map(|&l| DegreeDistribution::poisson(l).unwrap())
        .collect();
    dists.extend([0, 1, 16, 50].map(DegreeDistribution::degenerate));
    dists.extend([2.05, 2.5, 3.0, 5.0].map(|a| DegreeDistribution::zipf(a).unwrap()));
    let mut points = 0;
    let mut worst: f64 = 0.0;
    for dist in &dists {
        let powers: Option<Vec<f64>> = match *dist {
            DegreeDistribution::Zipf { alpha } => Some((1..=2_000_000).map(|k| (k as f64).powf(-alpha)).collect()),
            _ => None,
        };
        for &p in &ps {
            let fast = dist.referral_expectation(p).unwrap();
            let slow = brute_force(dist, p, powers.as_deref());
            worst = worst.max((fast - slow).abs());
            c.within(&format!("{dist:?} at P = {p}"), fast, slow, 1e-8);
            points += 1;
        }
    }
    c.holds(&format!("{points} grid points >= 100"), points >= 100);
    c.finish("8", &format!("referral expectation vs brute-force pmf sums (max abs diff {worst:.2e})"));
}
