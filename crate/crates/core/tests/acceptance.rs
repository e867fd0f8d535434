//! Acceptance suite: one PASS/FAIL line per criterion, then a single verdict.
//!
//! Run with `cargo test -p maxlab-core --test acceptance -- --nocapture` to
//! see the lines.

use std::f64::consts::PI;
use std::fs;
use std::time::{Duration, Instant};

use maxlab_core::bilinear::{
    average, average_fsliced, average_gsliced, average_param_oracle, dyadic_decay, maximal_estimate, norm_ratio,
    sharpness_nec1, sharpness_nec2, sharpness_nec3, surface_mass, AverageRequest, DyadicDecayParams, MaximalMode,
    MaximalRequest, Nec1Params, Nec2Params, QuadratureOpts,
};
use maxlab_core::curves::{curve_sharpness, mstar_exponent, CurveSharpnessParams, CurveSharpnessReport, MstarParams};
use maxlab_core::fields::{lp_norm, lp_norm_of_spec, FunctionSpec, GeometricSeq, Grid};
use maxlab_core::lab::{run, ExperimentConfig};
use maxlab_core::multilinear::{necessity_experiment, NecessityParams};
use maxlab_core::regions::{in_pa, necessary_ok, ratio, vertices, Anisotropy, CurveCase, ExponentPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| (-(k as f64)).exp2()).collect()
}

fn pair(a1: f64, a2: f64) -> Anisotropy {
    Anisotropy::pair(a1, a2).unwrap()
}

const PAIRS: [(f64, f64); 4] = [(2.0, 2.0), (2.0, 3.0), (3.0, 3.0), (1.0, 2.0)];

fn point(rng: &mut ChaCha8Rng, half: f64) -> Vec<f64> {
    vec![rng.random_range(-half..half), rng.random_range(-half..half)]
}

fn shifted(rng: &mut ChaCha8Rng, x: &[f64], spread: f64) -> Vec<f64> {
    x.iter().map(|v| v + rng.random_range(-spread..spread)).collect()
}

/// A request whose average is not negligibly small.
fn random_request(rng: &mut ChaCha8Rng, smooth: bool) -> AverageRequest {
    loop {
        let x = point(rng, 1.0);
        let make = |rng: &mut ChaCha8Rng| {
            let c = shifted(rng, &x, 0.7);
            let w = rng.random_range(0.6..1.5);
            if smooth || rng.random_bool(0.5) { FunctionSpec::bump(c, w) } else { FunctionSpec::ball(c, w) }
        };
        let f = make(rng);
        let g = make(rng);
        let req = AverageRequest::new(f, g, x, rng.random_range(0.3..1.5), rng.random_range(0.3..1.5)).unnormalized();
        if average_gsliced(&pair(2.0, 2.0), &req).unwrap() > 1e-3 {
            return req;
        }
    }
}

fn two_path_equality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for (a1, a2) in PAIRS {
        let a = pair(a1, a2);
        for _ in 0..20 {
            let req = random_request(&mut rng, true);
            let g = average_gsliced(&a, &req).unwrap();
            let f = average_fsliced(&a, &req).unwrap();
            worst = worst.max((g - f).abs() / g.abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-4 && elapsed <= Duration::from_secs(120),
        format!("worst relative gap {worst:.2e} over 80 requests in {:.1}s", elapsed.as_secs_f64()),
    )
}

fn closed_form_mass() -> Outcome {
    let m = surface_mass(2, &pair(2.0, 2.0), &QuadratureOpts::default()).unwrap();
    let exact = 2.0 * PI * PI;
    outcome((m - exact).abs() <= 1e-6, format!("mass {m:.12} vs 2π² = {exact:.12}"))
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for (i, (a1, a2)) in PAIRS.into_iter().enumerate() {
        let a = pair(a1, a2);
        for j in 0..10 {
            let req = random_request(&mut rng, false);
            let exact = average(&a, &req).unwrap();
            let (est, se) = average_param_oracle(&a, &req, 1_000_000, (100 * i + j) as u64).unwrap();
            let z = (est - exact).abs() / se;
            worst = worst.max(z);
            if z > 3.0 {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("largest deviation {worst:.2} standard errors over 40 requests"))
}

fn region_geometry() -> Outcome {
    let report = vertices(2, &pair(2.0, 3.0)).unwrap();
    let expect = [("H", (0, 1), (1, 1)), ("P", (1, 2), (1, 1)), ("Y", (5, 6), (2, 3)), ("B", (5, 6), (0, 1))];
    let exact = expect.iter().all(|(label, (xn, xd), (yn, yd))| {
        report.vertex(label).is_some_and(|v| v.x == ratio(*xn, *xd) && v.y == ratio(*yn, *yd))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut violations = 0;
    let mut inside = 0;
    for _ in 0..100_000 {
        let n = rng.random_range(2..=3);
        let a = pair(rng.random_range(1.0..8.0), rng.random_range(1.0..8.0));
        let pt = ExponentPoint::xy(rng.random(), rng.random()).unwrap();
        if in_pa(&pt, n, &a).unwrap() {
            inside += 1;
            if !necessary_ok(&pt, n, &a).unwrap() {
                violations += 1;
            }
        }
    }
    outcome(
        exact && violations == 0,
        format!("vertices exact: {exact}; {violations} violations among {inside} fuzzed points inside the region"),
    )
}

fn nec1_rate() -> Outcome {
    let start = Instant::now();
    let mut slopes = Vec::new();
    let mut pass = true;
    for (a1, a2) in [(2.0, 2.0), (2.0, 3.0)] {
        match sharpness_nec1(2, &pair(a1, a2), &dyadic(3, 7), &Nec1Params::default()) {
            Ok(fit) => {
                pass &= fit.pass && (fit.slope - 3.0).abs() <= 0.2;
                slopes.push(format!("{:.4}", fit.slope));
            }
            Err(e) => {
                pass = false;
                slopes.push(e.to_string());
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        pass && elapsed <= Duration::from_secs(300),
        format!("slopes {} (target 3 ± 0.2) in {:.1}s", slopes.join(", "), elapsed.as_secs_f64()),
    )
}

fn nec2_rate() -> Outcome {
    let target = 4.0 / 3.0;
    let deltas = dyadic(3, 7);
    let direct = sharpness_nec2(2, &pair(2.0, 6.0), &deltas, &Nec2Params::default());
    let mirrored = sharpness_nec3(2, &pair(6.0, 2.0), &deltas, &Nec2Params::default());
    match (direct, mirrored) {
        (Ok(d), Ok(m)) => outcome(
            d.pass && m.pass && (d.slope - target).abs() <= 0.15 && (m.slope - target).abs() <= 0.15,
            format!("slope {:.4}, mirrored {:.4} (target 4/3 ± 0.15)", d.slope, m.slope),
        ),
        (d, m) => outcome(false, format!("{:?} / {:?}", d.err(), m.err())),
    }
}

fn dyadic_decay_rate() -> Outcome {
    match dyadic_decay(2, &pair(2.0, 4.0), &DyadicDecayParams::default()) {
        Ok(r) => outcome(
            r.pass && r.fit.slope <= -0.1,
            format!("log2-slope {:.4} over k = 2..8 (must be ≤ -0.1)", r.fit.slope),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn mstar_rate() -> Outcome {
    let hs: Vec<f64> = (2..=8).map(|k| f64::from(k).exp2()).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [2.0, 4.0] {
        match mstar_exponent(p, &hs, &MstarParams::default()) {
            Ok(r) => {
                pass &= r.pass && (r.fit.slope - 1.0 / p).abs() <= 0.05 && r.profile_pass;
                parts.push(format!(
                    "p={p}: slope {:.4} (target {:.4}), profile in [{:.3}, {:.3}]",
                    r.fit.slope,
                    1.0 / p,
                    r.profile_min,
                    r.profile_max
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(e.to_string());
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn curve_case_ii() -> Outcome {
    let params = CurveSharpnessParams::default();
    let growth = |q: f64| match curve_sharpness(CurveCase::Ii, 3, 4.0, q, &params) {
        Ok(CurveSharpnessReport::Growth(g)) => Some(g),
        _ => None,
    };
    let (Some(div), Some(conv)) = (growth(2.0), growth(4.0)) else {
        return outcome(false, "growth experiment failed");
    };
    let root2 = 2f64.sqrt();
    let div_ok = div.ratios.len() == 3 && div.ratios.iter().all(|r| (r / root2 - 1.0).abs() <= 0.10);
    let conv_ok = conv.ratios.len() == 3 && conv.ratios.iter().all(|r| (r - 1.0).abs() <= 0.05);
    outcome(
        div_ok && conv_ok,
        format!("q=2 ratios {:?} (target √2 ± 10%); q=4 ratios {:?} (target 1 ± 5%)", div.ratios, conv.ratios),
    )
}

fn trilinear_rate() -> Outcome {
    let start = Instant::now();
    let a = Anisotropy::new(vec![2.0, 2.0, 2.0]).unwrap();
    let params = NecessityParams { samples: 1_000_000, ..Default::default() };
    let r = necessity_experiment(2, &a, &dyadic(2, 5), &params);
    let elapsed = start.elapsed();
    match r {
        Ok(r) => outcome(
            r.pass && (r.fit.slope - 3.0).abs() <= 0.3 && elapsed <= Duration::from_secs(600),
            format!("slope {:.4} (target 3 ± 0.3) in {:.1}s", r.fit.slope, elapsed.as_secs_f64()),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut notes = Vec::new();
    let mut pass = true;

    let (mut dil, mut sym, mut mono) = (0.0f64, 0.0f64, true);
    for k in 0..12 {
        let (a1, a2) = PAIRS[k % 4];
        let a = pair(a1, a2);
        let req = random_request(&mut rng, k % 2 == 0);
        let lambda = rng.random_range(0.5..2.0);
        let base = average(&a, &req).unwrap();
        // 𝒜_t(f(λ·), g(λ·))(x) = 𝒜_{λt}(f, g)(λx)
        let scaled = AverageRequest::new(
            req.f.clone().dilate(lambda),
            req.g.clone().dilate(lambda),
            req.x.iter().map(|v| v / lambda).collect(),
            req.t1 / lambda,
            req.t2 / lambda,
        )
        .unnormalized();
        dil = dil.max(rel(base, average(&a, &scaled).unwrap()));
        sym = sym.max(rel(base, average(&a.swapped(), &req.swapped()).unwrap()));
        let c = shifted(&mut rng, &req.x, 0.5);
        let small = AverageRequest::new(FunctionSpec::ball(c.clone(), 0.5), req.g.clone(), req.x.clone(), req.t1, req.t2);
        let large = AverageRequest::new(FunctionSpec::ball(c, 0.9), req.g.clone(), req.x.clone(), req.t1, req.t2);
        mono &= average(&a, &small).unwrap() <= average(&a, &large).unwrap() + 1e-12;
    }
    pass &= dil <= 1e-6 && sym <= 1e-6 && mono;
    notes.push(format!("dilation {dil:.1e}, symmetry {sym:.1e}, monotone {mono}"));

    let a = pair(2.0, 3.0);
    let f = FunctionSpec::ball(vec![0.2, 0.0], 0.6);
    let g = FunctionSpec::ball(vec![0.0, -0.1], 0.8);
    let grid = Grid::cube(2, -1.5, 1.5, 7).unwrap();
    let tgrid = GeometricSeq::new(0.25, 2.0, 2f64.sqrt()).unwrap();
    let mut req = MaximalRequest::new(f.clone(), g.clone(), grid.clone(), tgrid.clone(), MaximalMode::Biparam);
    req.max_refinements = 0;
    let full = maximal_estimate(&a, &req).unwrap();
    let mut diag_req = req.clone();
    diag_req.mode = MaximalMode::Diagonal;
    let diag = maximal_estimate(&a, &diag_req).unwrap();
    let ordered = diag.values.iter().zip(&full.values).all(|(d, b)| *d <= *b);
    pass &= ordered;
    notes.push(format!("diagonal ≤ biparametric {ordered}"));

    let lambda = 2.0;
    let mut dreq = MaximalRequest::new(
        f.clone().dilate(lambda),
        g.clone().dilate(lambda),
        grid.scaled(1.0 / lambda),
        GeometricSeq::new(tgrid.t_min / lambda, tgrid.t_max / lambda, tgrid.ratio).unwrap(),
        MaximalMode::Biparam,
    );
    dreq.max_refinements = 0;
    let dfull = maximal_estimate(&a, &dreq).unwrap();
    let on_line = rel(
        norm_ratio(&f, &g, 2.0, 4.0, 4.0 / 3.0, &full).unwrap(),
        norm_ratio(&dreq.f, &dreq.g, 2.0, 4.0, 4.0 / 3.0, &dfull).unwrap(),
    );
    let off = |field: &maxlab_core::fields::SampledField, ff: &FunctionSpec, gg: &FunctionSpec| {
        lp_norm(field, 2.0).unwrap() / (lp_norm_of_spec(ff, 2.0, 2).unwrap() * lp_norm_of_spec(gg, 4.0, 2).unwrap())
    };
    let off_line = rel(off(&full, &f, &g), off(&dfull, &dreq.f, &dreq.g));
    let invariant = on_line <= 1e-6 && off_line > 0.1;
    pass &= invariant;
    notes.push(format!("norm ratio change {on_line:.1e} on 1/r = 1/p + 1/q, {off_line:.2} off it"));

    let dir = tempfile::tempdir().unwrap();
    let configs = [
        format!("kind = \"trilinear-average\"\n[params]\na = [2, 3, 2]\n[params.request]\nfs = [{{ type = \"ball-indicator\", center = [0.2, 0], radius = 0.8 }}, {{ type = \"smooth-bump\", center = [0, 0.1], width = 1.2 }}, {{ type = \"ball-indicator\", center = [0, 0], radius = 1 }}]\nx = [0.1, 0.2]\nts = [1, 0.8, 1.2]\nsamples = 200000\nseed = 7\n[output]\ndir = {:?}\n", dir.path()),
        format!("kind = \"sharpness-nec1\"\n[output]\ndir = {:?}\n", dir.path()),
    ];
    let mut identical = true;
    for text in &configs {
        let cfg = ExperimentConfig::parse(text).unwrap();
        let first = run(&cfg).unwrap();
        let bytes: Vec<Vec<u8>> = first.files.iter().map(|p| fs::read(p).unwrap()).collect();
        let second = run(&cfg).unwrap();
        identical &= second.files.iter().zip(&bytes).all(|(p, b)| fs::read(p).unwrap() == *b);
    }
    pass &= identical;
    notes.push(format!("byte-identical reruns {identical}"));
    outcome(pass, notes.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("two-path slicing equality", two_path_equality),
        ("closed-form surface mass", closed_form_mass),
        ("Monte-Carlo oracle agreement", oracle_agreement),
        ("region vertices and fuzzed necessity", region_geometry),
        ("first construction rate", nec1_rate),
        ("second construction rate and mirror", nec2_rate),
        ("dyadic decay", dyadic_decay_rate),
        ("offset maximal growth in h", mstar_rate),
        ("curve case (ii) cutoff growth", curve_case_ii),
        ("multilinear construction rate", trilinear_rate),
        ("invariant suite and reruns", invariants),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
