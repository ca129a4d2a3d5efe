use std::path::PathBuf;

use bogoscatter_core::mc::{angular_window_exact, three_momentum_exact, LOSS_NORMALIZATION};
use bogoscatter_core::{
    condensate_growth_rate, derived_scales, mc_angular_window, mc_q_loss, mc_three_momentum, population_report,
    q_collision, sigma0_t, species_presets, CollisionParts, CondensateScale, CurveKind, DosForm, EnergyGrid,
    IsotropicDistribution, KernelForm, KernelMode, McEstimate, McSpec, NcWeighting, PhysicalSpecies,
    PrefactorConstants, QuadratureSpec, ScaledEnergy, ScaledMomentum, Species, WindowRule,
};
use clap::ValueEnum;

use crate::cache::{alpha_column, Cache, CurveRequest};
use crate::config::{parse_density, parse_list, parse_log_range, show_list, FileConfig, Resolver};
use crate::error::{CliError, CliResult};
use crate::output::{emit, num, Table};
use crate::{
    AlphaSArgs, Cli, Command, CurveArgs, DosArg, GasArgs, GridArgs, GrowthArgs, KernelFormArg, ModeArg, PopulationArgs,
    Sigma0Args, VerifyArgs,
};

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::AlphaT(_) => "alpha-t",
            Command::AlphaS(_) => "alpha-s",
            Command::Populations(_) => "populations",
            Command::Params(_) => "params",
            Command::Sigma0(_) => "sigma0",
            Command::GrowthRate(_) => "growth-rate",
            Command::Verify(_) => "verify",
            Command::Table1 => "table1",
        }
    }
}

fn parse_enum<T: ValueEnum>(s: &str) -> Result<T, String> {
    T::from_str(s.trim(), true)
}

fn kernel_form(a: KernelFormArg) -> KernelForm {
    match a {
        KernelFormArg::AsPrinted => KernelForm::AsPrinted,
        KernelFormArg::SymmetrizedLiterature => KernelForm::SymmetrizedLiterature,
    }
}

fn weighting(m: ModeArg) -> NcWeighting {
    match m {
        ModeArg::Consistent => NcWeighting::Consistent,
        ModeArg::AsPrinted => NcWeighting::AsPrinted,
    }
}

fn dos_forms(d: DosArg) -> Vec<DosForm> {
    match d {
        DosArg::Derived => vec![DosForm::DerivedFromDispersion],
        DosArg::AsPrinted => vec![DosForm::AsPrinted],
        DosArg::Both => vec![DosForm::DerivedFromDispersion, DosForm::AsPrinted],
    }
}

fn dos_label(d: &DosArg) -> String {
    d.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

/// Settings shared by every subcommand.
struct Context {
    r: Resolver,
    quad: QuadratureSpec,
    form: KernelForm,
    cache: Cache,
    output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut r = Resolver::new(file);
    r.note("command", cli.command.name());
    let c = &cli.common;

    let threads = r.resolve_with(
        "threads",
        c.threads,
        || 0usize,
        |s| s.parse().map_err(|e| format!("{e}")),
        |t| if *t == 0 { "auto".into() } else { t.to_string() },
    )?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }

    let d = QuadratureSpec::default();
    let mut quad = QuadratureSpec {
        rel_tol: r.resolve("rel_tol", c.rel_tol, d.rel_tol)?,
        abs_tol: r.resolve("abs_tol", c.abs_tol, d.abs_tol)?,
        e_max: r.resolve("e_max", c.e_max, d.e_max)?,
        max_subdivisions: r.resolve("max_subdivisions", c.max_subdivisions, d.max_subdivisions)?,
        ..d
    };
    quad.log_split = r.optional::<f64>("log_split", None)?;
    quad.validate()?;
    let form = r.resolve_with(
        "kernel_form",
        c.kernel_form.map(kernel_form),
        KernelForm::default,
        |s| parse_enum::<KernelFormArg>(s).map(kernel_form),
        |f| f.label().to_string(),
    )?;

    let no_cache = c.no_cache || r.quiet::<bool>("no_cache", None)?.unwrap_or(false);
    let dir = r.quiet::<PathBuf>("cache_dir", c.cache_dir.clone())?.or_else(Cache::default_dir);
    let cache = match (no_cache, dir) {
        (false, Some(dir)) => Cache::at(dir),
        _ => Cache::disabled(),
    };
    let output = cli.common.output.clone();

    let mut ctx = Context { r, quad, form, cache, output };
    let table = match &cli.command {
        Command::AlphaT(a) => alpha_t(&mut ctx, a)?,
        Command::AlphaS(a) => alpha_s(&mut ctx, a)?,
        Command::Populations(a) => populations(&mut ctx, a)?,
        Command::Params(a) => params(&mut ctx, &a.gas)?,
        Command::Sigma0(a) => sigma0(&mut ctx, a)?,
        Command::GrowthRate(a) => growth_rate(&mut ctx, a)?,
        Command::Verify(a) => return verify(ctx, a),
        Command::Table1 => table1(&mut ctx)?,
    };
    ctx.finish(table)
}

impl Context {
    fn finish(self, mut table: Table) -> CliResult<()> {
        let mut meta = vec![
            ("tool".to_string(), format!("bogoscatter {}", env!("CARGO_PKG_VERSION"))),
            ("library_version".to_string(), bogoscatter_core::VERSION.to_string()),
        ];
        meta.extend(self.r.echo().iter().cloned());
        table.prepend_meta(meta);
        emit(&table.render()?, self.output.as_deref())
    }

    fn nbar_list(&mut self, key: &str, flag: Option<&String>, default: &str) -> CliResult<Vec<CondensateScale>> {
        let values = self.r.resolve_with(
            key,
            flag.map(|s| parse_list(s)).transpose().map_err(|e| CliError::Config(format!("--{key}: {e}")))?,
            || parse_list(default).expect("valid default list"),
            parse_list,
            |v| show_list(v),
        )?;
        values.into_iter().map(|n| Ok(CondensateScale::new(n)?)).collect()
    }

    fn grid(&mut self, g: &GridArgs) -> CliResult<(f64, f64, usize)> {
        let frac = self.r.resolve("emin_frac", g.emin_frac, 1e-4)?;
        let emax = self.r.resolve("emax", g.emax, 1e3)?;
        let points = self.r.resolve("points", g.points, 200usize)?;
        Ok((frac, emax, points))
    }

    fn request(&self, nbar: CondensateScale, kind: CurveKind, grid: (f64, f64, usize)) -> CliResult<CurveRequest> {
        let g = EnergyGrid { lo: grid.0 * nbar.nbar(), hi: grid.1, points: grid.2 };
        g.validate()?;
        Ok(CurveRequest { nbar, kind, form: self.form, grid: g, quad: self.quad })
    }

    fn mode(&mut self, flag: Option<ModeArg>) -> CliResult<NcWeighting> {
        self.r.resolve_with(
            "mode",
            flag.map(weighting),
            NcWeighting::default,
            |s| parse_enum::<ModeArg>(s).map(weighting),
            |w| w.label().to_string(),
        )
    }

    fn dos(&mut self, flag: Option<DosArg>, default: DosArg) -> CliResult<DosArg> {
        self.r.resolve_with("dos", flag, || default, parse_enum::<DosArg>, dos_label)
    }
}

fn curve_table(ctx: &mut Context, a: &CurveArgs, kind: CurveKind) -> CliResult<Table> {
    let nbars = ctx.nbar_list("nbar", a.nbar.as_ref(), "1e-4,1e-3,1e-2,4e-2")?;
    let grid = ctx.grid(&a.grid)?;
    let mut header = vec!["nbar", "E", alpha_column(kind)];
    let mode = match kind {
        CurveKind::NormalCondensate(w) => {
            header.push("mode");
            Some(w.label())
        }
        CurveKind::NormalNormal => None,
    };
    let mut t = Table::new(&header);
    for n in nbars {
        let curve = ctx.cache.curve(&ctx.request(n, kind, grid)?)?;
        for (e, a) in curve.energies.iter().zip(&curve.alpha) {
            let mut row = vec![num(curve.nbar), num(*e), num(*a)];
            row.extend(mode.map(String::from));
            t.row(row);
        }
    }
    Ok(t)
}

fn alpha_t(ctx: &mut Context, a: &CurveArgs) -> CliResult<Table> {
    curve_table(ctx, a, CurveKind::NormalNormal)
}

fn alpha_s(ctx: &mut Context, a: &AlphaSArgs) -> CliResult<Table> {
    let w = ctx.mode(a.mode)?;
    curve_table(ctx, &a.curve, CurveKind::NormalCondensate(w))
}

fn populations(ctx: &mut Context, a: &PopulationArgs) -> CliResult<Table> {
    let nbars = if a.nbar.is_some() || (a.nbar_log.is_none() && ctx.r.file_has("nbar")) {
        ctx.nbar_list("nbar", a.nbar.as_ref(), "4e-2")?
    } else {
        let text = ctx.r.resolve("nbar_log", a.nbar_log.clone(), "1e-4:1e-1:25".to_string())?;
        parse_log_range(&text)
            .map_err(|e| CliError::Config(format!("--nbar-log: {e}")))?
            .into_iter()
            .map(|n| Ok(CondensateScale::new(n)?))
            .collect::<CliResult<_>>()?
    };
    let threshold = ctx.r.resolve("threshold", a.threshold, 1.05)?;
    let dos = ctx.dos(a.dos, DosArg::Derived)?;
    let w = ctx.mode(a.mode)?;
    let grid = ctx.grid(&a.grid)?;
    let mut t = Table::new(&["nbar", "n_l", "a_eff_l_over_a0", "mean_alpha_T", "mean_alpha_S", "dos_form"]);
    for n in nbars {
        let tc = ctx.cache.curve(&ctx.request(n, CurveKind::NormalNormal, grid)?)?;
        let sc = ctx.cache.curve(&ctx.request(n, CurveKind::NormalCondensate(w), grid)?)?;
        for form in dos_forms(dos) {
            let rep = population_report(&tc, &sc, threshold, form)?;
            t.row(vec![
                num(rep.nbar),
                num(rep.n_l),
                rep.a_eff_low.map(num).unwrap_or_default(),
                num(rep.mean_alpha_t),
                num(rep.mean_alpha_s),
                form.label().to_string(),
            ]);
        }
    }
    Ok(t)
}

fn sigma0(ctx: &mut Context, a: &Sigma0Args) -> CliResult<Table> {
    let nbars = ctx.nbar_list("nbar", a.curve.nbar.as_ref(), "4e-2")?;
    let grid = ctx.grid(&a.curve.grid)?;
    let dos = ctx.dos(a.dos, DosArg::Derived)?;
    let mut t = Table::new(&["nbar", "sigma0", "dos_form"]);
    for n in nbars {
        let curve = ctx.cache.curve(&ctx.request(n, CurveKind::NormalNormal, grid)?)?;
        for form in dos_forms(dos) {
            t.row(vec![num(curve.nbar), num(sigma0_t(&curve, form)?), form.label().to_string()]);
        }
    }
    Ok(t)
}

fn gas_given(ctx: &Context, g: &GasArgs) -> bool {
    g.species.is_some()
        || g.density.is_some()
        || g.mass_kg.is_some()
        || g.a0_nm.is_some()
        || g.fraction.is_some()
        || g.temperature_ratio.is_some()
        || g.temperature.is_some()
        || ["species", "density", "mass_kg", "a0_nm", "fraction", "temperature_ratio", "temperature"]
            .iter()
            .any(|k| ctx.r.file_has(k))
}

fn default_density_nm3(s: Species) -> f64 {
    match s {
        Species::OrthoPositronium => 1e-3,
        Species::Rubidium87 | Species::Sodium23 => 1e-9,
    }
}

fn gas(ctx: &mut Context, g: &GasArgs) -> CliResult<PhysicalSpecies> {
    let r = &mut ctx.r;
    let species = r.resolve_with(
        "species",
        g.species.as_deref().map(Species::parse).transpose()?,
        || Species::OrthoPositronium,
        |s| Species::parse(s).map_err(|e| e.to_string()),
        |s| s.label().to_string(),
    )?;
    let density = r.resolve_with(
        "density",
        g.density.as_deref().map(parse_density).transpose().map_err(CliError::Config)?,
        || default_density_nm3(species) * 1e27,
        parse_density,
        |d| format!("{d:e} m-3"),
    )?;
    let mass_kg = r.optional::<f64>("mass_kg", g.mass_kg)?;
    let a0_nm = r.optional::<f64>("a0_nm", g.a0_nm)?;
    let name = if mass_kg.is_some() || a0_nm.is_some() { "custom" } else { species.label() };
    let mass = mass_kg.unwrap_or_else(|| species.mass());
    let a0 = a0_nm.map_or_else(|| species.scattering_length(), |a| a * 1e-9);

    // a temperature given on the command line overrides any in the file
    let any_flag = g.fraction.is_some() || g.temperature_ratio.is_some() || g.temperature.is_some();
    let pick = |flag: Option<f64>, key: &str, r: &mut Resolver| -> CliResult<Option<f64>> {
        if any_flag {
            Ok(flag)
        } else {
            r.quiet::<f64>(key, None)
        }
    };
    let temperature = pick(g.temperature, "temperature", r)?;
    let ratio = pick(g.temperature_ratio, "temperature_ratio", r)?;
    let fraction = pick(g.fraction, "fraction", r)?;
    let spec = if let Some(t) = temperature {
        r.note("temperature", format!("{t} K"));
        PhysicalSpecies::new(name, mass, a0, density, t)?
    } else if let Some(x) = ratio {
        r.note("temperature_ratio", x);
        let tc = bogoscatter_core::critical_temperature(density, mass)?;
        PhysicalSpecies::new(name, mass, a0, density, x * tc)?
    } else {
        let f = fraction.unwrap_or(0.5);
        r.note("fraction", f);
        PhysicalSpecies::at_condensate_fraction(name, mass, a0, density, f)?
    };
    Ok(spec)
}

fn params(ctx: &mut Context, g: &GasArgs) -> CliResult<Table> {
    let s = gas(ctx, g)?;
    let d = derived_scales(&s)?;
    if !s.is_dilute() {
        eprintln!("bogoscatter: warning: n a0^3 = {:e} is not dilute", s.diluteness());
    }
    let mut t = Table::new(&[
        "species",
        "mass_kg",
        "a0_m",
        "density_m3",
        "temperature_K",
        "t_c_K",
        "condensate_fraction",
        "above_critical",
        "g_J_m3",
        "e0_J",
        "nbar",
        "nbar_closed_form",
        "diluteness",
        "dilute",
    ]);
    t.row(vec![
        s.name.clone(),
        num(s.mass),
        num(s.a0),
        num(s.density),
        num(s.temperature),
        num(d.t_c),
        num(d.condensate_fraction),
        d.above_critical.to_string(),
        num(d.g),
        num(d.e0),
        num(d.nbar),
        num(d.nbar_closed_form),
        num(d.diluteness),
        s.is_dilute().to_string(),
    ]);
    Ok(t)
}

fn table1(_ctx: &mut Context) -> CliResult<Table> {
    const REFERENCE: [&str; 4] = ["1e-3", "4e-2", "1.7e-2", "1.4e-2"];
    let mut t = Table::new(&["species", "density_nm3", "a0_nm", "nbar", "nbar_closed_form", "reference_nbar"]);
    for (s, reference) in species_presets().iter().zip(REFERENCE) {
        let d = derived_scales(s)?;
        t.row(vec![
            s.name.clone(),
            num(bogoscatter_core::units::per_m3_to_per_nm3(s.density)),
            num(s.a0 / bogoscatter_core::units::NANOMETRE),
            num(d.nbar),
            num(d.nbar_closed_form),
            reference.to_string(),
        ]);
    }
    Ok(t)
}

fn growth_rate(ctx: &mut Context, a: &GrowthArgs) -> CliResult<Table> {
    let nbars = if gas_given(ctx, &a.gas) {
        let s = gas(ctx, &a.gas)?;
        let d = derived_scales(&s)?;
        if d.above_critical {
            return Err(CliError::Config(format!("{} is not condensed at {} K", s.name, s.temperature)));
        }
        let pre = PrefactorConstants::new(s.mass, s.a0, s.density * d.condensate_fraction, d.nbar);
        for (key, p) in [("prefactor_gamma", &pre.gamma), ("prefactor_xi", &pre.xi), ("prefactor_xi_scaled", &pre.xi_scaled)] {
            ctx.r.note(key, format!("{:e} ({})", p.value, p.description));
        }
        vec![CondensateScale::new(d.nbar)?]
    } else {
        ctx.nbar_list("nbar", a.nbar.as_ref(), "4e-2")?
    };
    let scales = ctx.r.resolve_with(
        "scale",
        a.scale.as_deref().map(parse_list).transpose().map_err(CliError::Config)?,
        || vec![1.1],
        parse_list,
        |v| show_list(v),
    )?;
    let mut t = Table::new(&["nbar", "scale", "rate", "error_estimate"]);
    for n in &nbars {
        for &k in &scales {
            let f = IsotropicDistribution::bose_einstein().scaled(k)?;
            let rate = condensate_growth_rate(&f, *n, ctx.form, &ctx.quad)?;
            t.row(vec![num(n.nbar()), num(k), num(rate.value), num(rate.error)]);
        }
    }
    Ok(t)
}

const Q_POINTS: [(f64, f64); 3] = [(1.0, 0.0), (0.04, 0.04), (0.5, 0.01)];
const WINDOW_POINTS: [[f64; 4]; 5] =
    [[10.0, 1.0, 1.0, 10.0], [1.0, 1.0, 1.0, 1.0], [1.0, 0.8, 0.6, 0.9], [2.0, 1.5, 1.3, 1.7], [0.5, 3.0, 2.8, 0.9]];
const TRIANGLE_POINTS: [[f64; 3]; 5] =
    [[1.0, 1.0, 1.0], [1.0, 1.2, 0.7], [0.5, 0.6, 0.9], [2.0, 1.5, 1.0], [3.0, 1.0, 1.0]];

struct Check {
    name: &'static str,
    point: String,
    estimate: McEstimate,
    reference: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        (self.estimate.value - self.reference).abs() <= self.tolerance
    }
}

fn verify(mut ctx: Context, a: &VerifyArgs) -> CliResult<()> {
    let seed = ctx.r.resolve("seed", a.seed, 42u64)?;
    let samples = ctx.r.resolve("samples", a.samples, 1_000_000usize)?;
    let mc = McSpec { samples, epsilon: None, seed };
    mc.validate()?;
    let mut quad = ctx.quad;
    if a.mutate_zeta {
        quad.window = WindowRule::Corrupted;
        ctx.r.note("mutate_zeta", true);
    }

    let mut checks = Vec::new();
    let be = IsotropicDistribution::bose_einstein();
    for (e1, nbar) in Q_POINTS {
        let n = CondensateScale::new(nbar)?;
        let q = q_collision(e1, &be, n, &KernelMode::ConstantOne, CollisionParts::LossOnly, &quad)?;
        let reference = LOSS_NORMALIZATION * q.value;
        let estimate = mc_q_loss(ScaledEnergy(e1), n, &mc)?;
        let tolerance = (3.0 * estimate.std_error).max(0.1 * reference.abs());
        checks.push(Check { name: "q_loss", point: format!("E1={e1} nbar={nbar}"), estimate, reference, tolerance });
    }
    for p in WINDOW_POINTS {
        let m = p.map(ScaledMomentum);
        let estimate = mc_angular_window(m, &mc)?;
        let reference = angular_window_exact(m);
        let point = format!("p={}", show_list(&p));
        checks.push(Check { name: "angular_window", point, estimate, reference, tolerance: 3.0 * estimate.std_error });
    }
    for p in TRIANGLE_POINTS {
        let m = p.map(ScaledMomentum);
        let estimate = mc_three_momentum(m, &mc)?;
        let reference = three_momentum_exact(m);
        let point = format!("p={}", show_list(&p));
        checks.push(Check { name: "three_momentum", point, estimate, reference, tolerance: 3.0 * estimate.std_error });
    }

    let mut t = Table::new(&["check", "point", "estimate", "std_error", "reference", "tolerance", "status"]);
    for c in &checks {
        t.row(vec![
            c.name.to_string(),
            c.point.clone(),
            num(c.estimate.value),
            num(c.estimate.std_error),
            num(c.reference),
            num(c.tolerance),
            if c.passed() { "pass" } else { "FAIL" }.to_string(),
        ]);
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    ctx.finish(t)?;
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {} oracle checks out of tolerance", checks.len())));
    }
    Ok(())
}
