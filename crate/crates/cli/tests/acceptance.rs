//! Acceptance criteria 1–11. Prints one PASS/FAIL line per criterion, then
//! fails if any criterion failed. Each line carries the measured numbers.

use std::f64::consts::SQRT_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use bogoscatter_core::mc::{angular_window_exact, three_momentum_exact, LOSS_NORMALIZATION};
use bogoscatter_core::*;

fn scale(nbar: f64) -> CondensateScale {
    CondensateScale::new(nbar).unwrap()
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn t_curve(nbar: f64) -> AlphaCurve {
    let n = scale(nbar);
    AlphaCurve::alpha_t(n, KernelForm::AsPrinted, &EnergyGrid::default_for(n), &quad()).unwrap()
}

fn s_curve(nbar: f64, w: NcWeighting) -> Result<AlphaCurve> {
    let n = scale(nbar);
    AlphaCurve::alpha_s(n, KernelForm::AsPrinted, w, &EnergyGrid::default_for(n), &quad())
}

fn at(e: f64, nbar: f64) -> f64 {
    alpha_t(ScaledEnergy(e), scale(nbar), KernelForm::AsPrinted, &quad()).unwrap()
}

fn rel(x: f64, target: f64) -> f64 {
    (x / target - 1.0).abs()
}

/// Outcome of one criterion: verdict plus the numbers behind it.
struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }

    /// Conjunction of named sub-checks.
    fn all(parts: Vec<(&str, bool, String)>) -> Self {
        let pass = parts.iter().all(|p| p.1);
        let detail = parts
            .iter()
            .map(|(name, ok, d)| format!("{name}: {} ({d})", if *ok { "ok" } else { "FAIL" }))
            .collect::<Vec<_>>()
            .join("; ");
        Verdict { pass, detail }
    }
}

fn phonon_limit() -> Verdict {
    let a2 = at(1e-8, 1e-4).powi(2);
    Verdict::new(rel(a2, 2.0) <= 0.05, format!("alpha_T^2(1e-8; nbar=1e-4) = {a2:.5}"))
}

fn free_limit() -> Verdict {
    let v: Vec<(f64, f64)> = [1e-3, 0.04].iter().map(|&n| (n, at(1e3, n))).collect();
    let pass = v.iter().all(|&(_, a)| rel(a, 1.0) <= 0.02);
    let detail = v.iter().map(|(n, a)| format!("alpha_T(1e3; nbar={n}) = {a:.6}")).collect::<Vec<_>>().join(", ");
    Verdict::new(pass, detail)
}

fn nc_zero_energy() -> Verdict {
    let nbar = 0.04;
    let mut passing = Vec::new();
    let mut notes = Vec::new();
    for w in [NcWeighting::Consistent, NcWeighting::AsPrinted] {
        match alpha_s(ScaledEnergy(1e-4 * nbar), scale(nbar), KernelForm::AsPrinted, w, &quad()) {
            Ok(a) => {
                notes.push(format!("{}: {a:.5}", w.label()));
                if rel(a, 0.5) <= 0.02 {
                    passing.push(w.label());
                }
            }
            Err(e) => notes.push(format!("{}: {e}", w.label())),
        }
    }
    let passing = if passing.is_empty() { "none".to_string() } else { passing.join(",") };
    Verdict::new(passing != "none", format!("alpha_S(1e-4 nbar; nbar=0.04) {}; passing mode: {passing}", notes.join(", ")))
}

fn nc_no_condensate() -> Verdict {
    let a = alpha_s(ScaledEnergy(1.0), scale(1e-8), KernelForm::AsPrinted, NcWeighting::Consistent, &quad());
    match a {
        Ok(a) => Verdict::new(rel(a, 1.0) <= 0.01, format!("alpha_S(1; nbar=1e-8) = {a:.5}")),
        Err(e) => Verdict::new(false, format!("alpha_S(1; nbar=1e-8): {e}")),
    }
}

fn headline_numbers(t: &AlphaCurve, s: &AlphaCurve) -> Verdict {
    let mut pass = false;
    let mut notes = Vec::new();
    for dos in [DosForm::DerivedFromDispersion, DosForm::AsPrinted] {
        let r = population_report(t, s, 1.05, dos).unwrap();
        let a = r.a_eff_low.unwrap_or(f64::NAN);
        let ok = (r.n_l - 0.30).abs() <= 0.10 && (a - 1.18).abs() <= 0.05;
        pass |= ok;
        notes.push(format!("{}: n_l = {:.4}, a_eff = {a:.4}{}", dos.label(), r.n_l, if ok { " (in range)" } else { "" }));
    }
    Verdict::new(pass, notes.join("; "))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn scaling_law() -> Verdict {
    let nbars: Vec<f64> = (0..10).map(|i| 10f64.powf(-4.0 + 2.0 * i as f64 / 9.0)).collect();
    let curves: Vec<AlphaCurve> = nbars.iter().map(|&n| t_curve(n)).collect();
    let xs: Vec<f64> = nbars.iter().map(|n| n.ln()).collect();
    let mut notes = Vec::new();
    let mut pass = false;
    for dos in [DosForm::DerivedFromDispersion, DosForm::AsPrinted] {
        let ys: Vec<f64> = curves.iter().map(|c| low_energy_fraction(c, 1.05, dos).unwrap().ln()).collect();
        let k = slope(&xs, &ys);
        // the derived density of states is the one the rest of the library uses
        if dos == DosForm::DerivedFromDispersion {
            pass = (k - 0.5).abs() <= 0.1;
        }
        notes.push(format!("{}: slope {k:.4}", dos.label()));
    }
    Verdict::new(pass, notes.join(", "))
}

fn mean_suppression(t: &AlphaCurve, s: &AlphaCurve) -> Verdict {
    let dos = DosForm::DerivedFromDispersion;
    let ms = mean_alpha(s, dos).unwrap();
    let mt = mean_alpha(t, dos).unwrap();
    Verdict::all(vec![
        ("mean alpha_S", (ms - 0.5).abs() <= 0.1, format!("{ms:.4}")),
        ("mean alpha_T", (1.0..=1.12).contains(&mt), format!("{mt:.4}")),
    ])
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bogoscatter"))
}

fn run_cli(args: &[&str], cache: &Path) -> Vec<u8> {
    let out = bin().args(args).env("BOGOSCATTER_CACHE_DIR", cache).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

/// Data rows of a CSV with a `#` header block, keyed by column name.
fn csv_rows(bytes: &[u8]) -> Vec<std::collections::HashMap<String, String>> {
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

fn table_one(cache: &Path) -> Verdict {
    let rows = csv_rows(&run_cli(&["table1"], cache));
    let nbar = |species: &str| -> Vec<f64> {
        rows.iter().filter(|r| r["species"] == species).map(|r| r["nbar"].parse().unwrap()).collect()
    };
    let (rb, na, ps) = (nbar("87Rb")[0], nbar("23Na")[0], nbar("o-Ps"));
    let (lo, hi) = (ps.iter().cloned().fold(f64::INFINITY, f64::min), ps.iter().cloned().fold(0.0, f64::max));
    let within = |x: f64, t: f64| x / t <= 1.3 && t / x <= 1.3;
    Verdict::all(vec![
        ("87Rb", rel(rb, 1.7e-2) <= 0.05, format!("{rb:.4e} vs 1.7e-2")),
        ("23Na", rel(na, 1.4e-2) <= 0.05, format!("{na:.4e} vs 1.4e-2")),
        ("o-Ps low end", within(lo, 1e-3), format!("{lo:.4e} vs 1e-3")),
        ("o-Ps high end", within(hi, 4e-2) && hi <= 5e-2, format!("{hi:.4e} vs 4e-2")),
    ])
}

fn detailed_balance() -> Verdict {
    let eq = IsotropicDistribution::bose_einstein();
    let spec = quad();
    let (mut q_max, mut w_max, mut g_max) = (0.0f64, 0.0f64, 0.0f64);
    for nbar in [1e-4, 1e-3, 1e-2, 4e-2, 0.1] {
        let n = scale(nbar);
        for e in [1e-4, 1e-2, 0.3, 2.0, 10.0] {
            let t = KernelMode::FullT(KernelForm::AsPrinted);
            let s = KernelMode::FullS(KernelForm::AsPrinted);
            q_max = q_max.max(q_collision(e, &eq, n, &t, CollisionParts::Both, &spec).unwrap().value.abs());
            w_max = w_max.max(w_collision(e, &eq, n, &s, CollisionParts::Both, &spec).unwrap().value.abs());
        }
        g_max = g_max.max(condensate_growth_rate(&eq, n, KernelForm::AsPrinted, &spec).unwrap().value.abs());
    }
    Verdict::all(vec![
        ("max |Q|", q_max < 1e-8, format!("{q_max:.2e}")),
        ("max |W|", w_max < 1e-8, format!("{w_max:.2e}")),
        ("max |growth|", g_max < 1e-8, format!("{g_max:.2e}")),
    ])
}

fn oracles() -> Verdict {
    let mc = McSpec::default();
    let eq = IsotropicDistribution::bose_einstein();
    let mut parts = Vec::new();
    for (e1, nbar) in [(1.0, 0.0), (0.04, 0.04), (0.5, 0.01)] {
        let n = scale(nbar);
        let q = q_collision(e1, &eq, n, &KernelMode::ConstantOne, CollisionParts::LossOnly, &quad()).unwrap();
        let reference = LOSS_NORMALIZATION * q.value;
        let est = mc_q_loss(ScaledEnergy(e1), n, &mc).unwrap();
        let tol = (3.0 * est.std_error).max(0.1 * reference);
        let ok = (est.value - reference).abs() <= tol;
        parts.push(("q_loss", ok, format!("E1={e1} nbar={nbar}: {:.4} vs {reference:.4}", est.value)));
    }
    let windows = [[10.0, 1.0, 1.0, 10.0], [1.0, 1.0, 1.0, 1.0], [1.0, 0.8, 0.6, 0.9], [2.0, 1.5, 1.3, 1.7], [0.5, 3.0, 2.8, 0.9]];
    let worst = windows
        .iter()
        .map(|p| {
            let m = p.map(ScaledMomentum);
            let est = mc_angular_window(m, &mc).unwrap();
            (est.value - angular_window_exact(m)).abs() / est.std_error
        })
        .fold(0.0, f64::max);
    parts.push(("angular window", worst <= 3.0, format!("worst {worst:.2} sigma over 5 points")));
    let triangles = [[1.0, 1.0, 1.0], [1.0, 1.2, 0.7], [0.5, 0.6, 0.9], [2.0, 1.5, 1.0], [3.0, 1.0, 1.0]];
    let worst = triangles
        .iter()
        .map(|p| {
            let m = p.map(ScaledMomentum);
            let est = mc_three_momentum(m, &mc).unwrap();
            let exact = three_momentum_exact(m);
            // outside the triangle both sides are exactly zero
            if est.std_error == 0.0 { (est.value - exact).abs() } else { (est.value - exact).abs() / est.std_error }
        })
        .fold(0.0, f64::max);
    parts.push(("three momentum", worst <= 3.0, format!("worst {worst:.2} sigma over 5 points")));
    Verdict::all(parts)
}

fn property_suites(t: &AlphaCurve, s: &AlphaCurve, cache: &Path) -> Verdict {
    let tol = 10.0 * quad().rel_tol;
    let mut parts = Vec::new();

    let mut worst = 0.0f64;
    for nbar in [0.0, 1e-8, 1e-4, 0.04, 0.5] {
        let n = scale(nbar);
        for k in 0..=110 {
            let e = 10f64.powf(-8.0 + 0.1 * k as f64);
            worst = worst.max(rel(n.dispersion(n.inverse_dispersion(ScaledEnergy(e))).0, e));
        }
    }
    parts.push(("dispersion round trip", worst <= 1e-12, format!("worst {worst:.1e}")));

    let free = scale(1e-8);
    let mut worst = 0.0f64;
    for es in [[0.1, 0.5, 0.3, 0.3], [1.0, 2.0, 0.5, 2.5], [5.0, 0.2, 3.0, 2.2], [9.0, 9.0, 9.0, 9.0]] {
        for form in [KernelForm::AsPrinted, KernelForm::SymmetrizedLiterature] {
            worst = worst.max((free.kernel_t(es, form) - 1.0).abs());
            worst = worst.max((free.kernel_s([es[0], es[1], es[2]], form) - 1.0).abs());
        }
    }
    parts.push(("kernel free limits", worst < 1e-6, format!("worst |T-1|, |S-1| = {worst:.1e}")));

    let (lo, hi) = t.alpha.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &a| (l.min(a), h.max(a)));
    parts.push(("alpha_T bounds", lo >= 1.0 - tol && hi <= SQRT_2 + tol, format!("range [{lo:.5}, {hi:.5}] at nbar=0.04")));
    let rises = t.alpha.windows(2).filter(|w| w[1] > w[0] + tol).count();
    parts.push(("alpha_T monotone", rises == 0, format!("{rises} rising steps at nbar=0.04")));

    let k = s.argmin();
    let e_min = s.energies[k];
    let interior = k > 0 && k + 1 < s.alpha.len();
    let ratio = e_min / s.nbar;
    parts.push((
        "alpha_S interior minimum",
        interior && (1.0 / 3.0..=3.0).contains(&ratio),
        format!("minimum {:.4} at E = {ratio:.3} nbar", s.alpha[k]),
    ));

    let squares: Vec<f64> = t.alpha.iter().map(|a| a * a).collect();
    let (lo, hi) = squares.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    let s0 = sigma0_t(t, DosForm::DerivedFromDispersion).unwrap();
    parts.push(("sigma0 sandwich", lo <= s0 && s0 <= hi, format!("{lo:.4} <= {s0:.4} <= {hi:.4}")));

    let n = scale(0.04);
    let eq = IsotropicDistribution::bose_einstein();
    let sigma = KernelMode::sigma(|e| at(e, 0.04).powi(2));
    let worst = [1e-4, 0.04, 0.3, 5.0]
        .iter()
        .map(|&e| {
            let num = q_collision(e, &eq, n, &sigma, CollisionParts::LossOnly, &quad()).unwrap().value;
            let den = q_collision(e, &eq, n, &KernelMode::ConstantOne, CollisionParts::LossOnly, &quad()).unwrap().value;
            rel(num / den, at(e, 0.04).powi(2))
        })
        .fold(0.0, f64::max);
    parts.push(("fixed point", worst <= tol, format!("worst {worst:.1e}")));

    let fine = quad().with_rel_tol(0.5 * quad().rel_tol);
    let worst = [(1e-6, 1e-4), (0.04, 0.04), (1.0, 1e-2), (20.0, 0.1)]
        .iter()
        .map(|&(e, nbar)| {
            let a = at(e, nbar);
            let b = alpha_t(ScaledEnergy(e), scale(nbar), KernelForm::AsPrinted, &fine).unwrap();
            let c = alpha_s(ScaledEnergy(e), scale(nbar), KernelForm::AsPrinted, NcWeighting::Consistent, &quad()).unwrap();
            let d = alpha_s(ScaledEnergy(e), scale(nbar), KernelForm::AsPrinted, NcWeighting::Consistent, &fine).unwrap();
            rel(a, b).max(rel(c, d))
        })
        .fold(0.0, f64::max);
    parts.push(("tolerance halving", worst <= quad().rel_tol, format!("worst {worst:.1e}")));

    let args = ["alpha-s", "--nbar", "1e-3,4e-2", "--points", "9"];
    let mut no_cache = vec!["--no-cache"];
    no_cache.extend(args);
    let first = run_cli(&no_cache, cache);
    let second = run_cli(&no_cache, cache);
    let cold = run_cli(&args, cache);
    let warm = run_cli(&args, cache);
    let same = first == second && first == cold && cold == warm;
    parts.push(("CLI determinism", same, format!("{} bytes, reruns and cold/warm cache identical: {same}", first.len())));

    Verdict::all(parts)
}

/// Runs `f`, turning a panic into a failed verdict.
fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Verdict::new(false, format!("panicked: {}", msg.unwrap_or_default()))
    })
}

#[test]
fn acceptance() {
    let cache = tempfile::tempdir().unwrap();
    let t = t_curve(0.04);
    let s = s_curve(0.04, NcWeighting::Consistent).unwrap();

    let criteria: Vec<(&str, Box<dyn FnOnce() -> Verdict>)> = vec![
        ("phonon limit of alpha_T", Box::new(phonon_limit)),
        ("free limit of alpha_T", Box::new(free_limit)),
        ("alpha_S zero-energy limit", Box::new(nc_zero_energy)),
        ("alpha_S without condensate", Box::new(nc_no_condensate)),
        ("positronium low-energy population", Box::new(|| headline_numbers(&t, &s))),
        ("square-root scaling of n_l", Box::new(scaling_law)),
        ("mean NC suppression", Box::new(|| mean_suppression(&t, &s))),
        ("scaled densities of the species table", Box::new(|| table_one(cache.path()))),
        ("detailed balance", Box::new(detailed_balance)),
        ("Monte Carlo oracles", Box::new(oracles)),
        ("property suites", Box::new(|| property_suites(&t, &s, cache.path()))),
    ];

    let mut failed = Vec::new();
    println!();
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let v = guarded(check);
        println!("criterion {:>2} {}: {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
