//! One function per command. Each returns a [`Report`] whose metadata lists
//! every truncation parameter that influenced the records.

use std::fs::File;
use std::io::{BufReader, BufWriter};

use herzlab_core::embedlab::{
    draw_coefficients, hardy_constant, hardy_ensemble, level_sweep, necessity_fit, ols, ppn_check, EmbeddingSpec,
    HARDY_SLACK,
};
use herzlab_core::frames::{analyze, roundtrip_error};
use herzlab_core::grid::{cube_indicator, read_snapshot};
use herzlab_core::herz::mixed_herz_norm;
use herzlab_core::lpdecomp::{bandlimited_witness, build_fj_pair, build_resolution, lp_blocks, random_bandlimited};
use herzlab_core::maximal::{cube_family, fs_vector_check};
use herzlab_core::seqspace::{default_window, lambda_star, seq_norm};
use herzlab_core::spaces::function_norm;
use herzlab_core::{CoeffSeq, Grid, SampledField, SpectralSystem};

use crate::config::{exponent, Command, ExperimentConfig, FieldKind, SystemKind};
use crate::report::{Record, Report, Value};
use crate::CliError;

type Res<T> = Result<T, CliError>;

/// Runs `command` on `cfg`. `seed` overrides every seed in the file.
pub fn run(command: Command, cfg: &ExperimentConfig, seed: Option<u64>) -> Res<Report> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(CliError::Config(format!(
                "config is for `{}`, invoked as `{}`",
                c.name(),
                command.name()
            )));
        }
    }
    let mut ctx = Ctx {
        cfg,
        seed,
        meta: vec![
            ("command".into(), command.name().into()),
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ],
    };
    let records = match command {
        Command::Norm => norm(&mut ctx)?,
        Command::Decompose => decompose(&mut ctx)?,
        Command::Phitransform => phitransform(&mut ctx)?,
        Command::Seqnorm => seqnorm(&mut ctx)?,
        Command::EmbedSweep => embed_sweep(&mut ctx)?,
        Command::Necessity => necessity(&mut ctx)?,
        Command::MaximalCheck => maximal_check(&mut ctx)?,
        Command::PpnCheck => ppn(&mut ctx)?,
        Command::HardyCheck => hardy(&mut ctx)?,
    };
    ctx.meta.push(("config".into(), cfg.text.clone().into()));
    Ok(Report { meta: ctx.meta, records })
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    seed: Option<u64>,
    meta: Vec<(String, Value)>,
}

impl Ctx<'_> {
    fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.push((key.to_string(), value.into()));
    }

    /// The CLI seed, else the first seed found in the config, else
    /// `fallback`; ensemble commands pass no fallback.
    fn seed(&mut self, candidates: &[Option<u64>], fallback: Option<u64>) -> Res<u64> {
        let s = self.seed.or_else(|| candidates.iter().flatten().next().copied()).or(fallback);
        let s = s.ok_or_else(|| CliError::Config("this command needs a seed ([ensemble] seed or --seed)".into()))?;
        self.note("seed", s);
        Ok(s)
    }

    fn grid(&mut self) -> Res<Grid> {
        let grid = ExperimentConfig::require(&self.cfg.grid, "grid")?.grid()?;
        let geo = grid.geometry();
        self.note("n", grid.n());
        self.note("L", grid.period());
        self.note("G", grid.points());
        self.note("k_min", geo.k_min as i64);
        self.note("k_max", geo.k_max as i64);
        Ok(grid)
    }

    fn system(&mut self, grid: Grid, want: Option<SystemKind>) -> Res<SpectralSystem> {
        let sys = ExperimentConfig::require(&self.cfg.system, "system")?;
        let kind = want.unwrap_or(sys.kind);
        if kind != sys.kind {
            return Err(CliError::Config(format!("[system] kind must be {kind:?} for this command")));
        }
        self.note("system", format!("{kind:?}"));
        self.note("K", sys.levels);
        Ok(match kind {
            SystemKind::Resolution => build_resolution(grid, sys.levels)?,
            SystemKind::FjPair => build_fj_pair(grid, sys.levels)?,
        })
    }

    fn field(&mut self, grid: Grid) -> Res<SampledField> {
        let f = ExperimentConfig::require(&self.cfg.field, "field")?;
        let kind = f.kind;
        let need = |what: &str| CliError::Config(format!("[field] kind {kind:?} needs `{what}`"));
        self.note("field", format!("{:?}", f.kind).to_lowercase());
        Ok(match f.kind {
            FieldKind::Zero => SampledField::zeros(grid),
            FieldKind::Witness => {
                let level = f.level.ok_or_else(|| need("level"))?;
                let seed = self.seed(&[f.seed], None)?;
                self.note("witness_level", level);
                bandlimited_witness(grid, level, seed)?
            }
            FieldKind::Random => {
                let radius = f.radius.ok_or_else(|| need("radius"))?;
                let seed = self.seed(&[f.seed], None)?;
                self.note("radius", radius);
                random_bandlimited(grid, radius, seed)?
            }
            FieldKind::Cube => cube_indicator(
                grid,
                f.cube_level.ok_or_else(|| need("cube_level"))?,
                f.cube_index.as_deref().ok_or_else(|| need("cube_index"))?,
            )?,
            FieldKind::Snapshot => {
                let path = self.cfg.resolve(f.path.as_deref().ok_or_else(|| need("path"))?);
                let file = File::open(&path).map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
                let field = read_snapshot(BufReader::new(file))?;
                if field.grid() != grid {
                    return Err(CliError::Config(format!("snapshot {} does not live on the [grid]", path.display())));
                }
                field
            }
        })
    }

    fn check(&self) -> Res<&crate::config::CheckSection> {
        ExperimentConfig::require(&self.cfg.check, "check")
    }

    fn levels_range(&mut self) -> Res<(usize, usize)> {
        let c = self.check()?;
        let lo = c.n_min.unwrap_or(0);
        let hi = c.n_max.ok_or_else(|| CliError::Config("[check] needs `n_max`".into()))?;
        self.note("n_min", lo);
        self.note("n_max", hi);
        Ok((lo, hi))
    }

    fn spec(&mut self) -> Res<EmbeddingSpec> {
        let source = ExperimentConfig::require(&self.cfg.source, "source")?;
        let target = ExperimentConfig::require(&self.cfg.target, "target")?;
        let n = self.cfg.grid.as_ref().map(|g| g.n).unwrap_or(1);
        let theorem = self.cfg.theorem()?;
        let mut spec = EmbeddingSpec::new(theorem, source.space(n)?, target.space(n)?)?;
        if self.check()?.control {
            spec = spec.as_control();
        }
        self.note("theorem", theorem.name());
        self.note("control", spec.is_control());
        self.note("predicted_exponent", spec.necessity_exponent());
        Ok(spec)
    }
}

fn quantity(name: &str, value: impl Into<Value>) -> Record {
    Record::new().with("quantity", name).with("value", value)
}

fn norm(ctx: &mut Ctx) -> Res<Vec<Record>> {
    let grid = ctx.grid()?;
    let field = ctx.field(grid)?;
    let space = ExperimentConfig::require(&ctx.cfg.source, "source")?;
    let mut out = vec![quantity("herz_norm", mixed_herz_norm(&field, &space.herz(grid.n())?)?)];
    if space.family.is_some() {
        let params = space.space(grid.n())?;
        let system = ctx.system(grid, Some(SystemKind::Resolution))?;
        out.push(quantity("function_norm", function_norm(&field, &params, &system)?));
    }
    Ok(out)
}

fn decompose(ctx: &mut Ctx) -> Res<Vec<Record>> {
    let grid = ctx.grid()?;
    let field = ctx.field(grid)?;
    let system = ctx.system(grid, None)?;
    let dev = system.identity_deviation();
    ctx.note("band", system.band());
    Ok(lp_blocks(&field, &system)?
        .iter()
        .enumerate()
        .map(|(k, b)| {
            Record::new()
                .with("level", k)
                .with("block_l2_norm", b.l2_norm())
                .with("identity_deviation", dev)
        })
        .collect())
}

fn phitransform(ctx: &mut Ctx) -> Res<Vec<Record>> {
    let grid = ctx.grid()?;
    let field = ctx.field(grid)?;
    let system = ctx.system(grid, Some(SystemKind::FjPair))?;
    let coeffs = analyze(&field, &system)?;
    if let Some(path) = ctx.cfg.output.as_ref().and_then(|o| o.coeffs.as_ref()) {
        let path = ctx.cfg.resolve(path);
        let file = File::create(&path).map_err(|e| CliError::Run(format!("cannot write {}: {e}", path.display())))?;
        coeffs.write_text(BufWriter::new(file))?;
        ctx.note("coeffs_path", path.display().to_string());
    }
    Ok(vec![
        quantity("coefficients", coeffs.len()),
        quantity("roundtrip_error", roundtrip_error(&field, &system)?),
        quantity("identity_deviation", system.identity_deviation()),
    ])
}

fn seqnorm(ctx: &mut Ctx) -> Res<Vec<Record>> {
    let cfg = ctx.cfg;
    let space = ExperimentConfig::require(&cfg.source, "source")?;
    let coeffs = match (&cfg.coeffs, &cfg.ensemble) {
        (Some(c), _) => {
            let path = cfg.resolve(&c.path);
            let file = File::open(&path).map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
            ctx.note("coeffs_path", path.display().to_string());
            CoeffSeq::read_text(BufReader::new(file))?
        }
        (None, Some(e)) => {
            let n = cfg.grid.as_ref().map(|g| g.n).unwrap_or(1);
            let levels = e.levels.as_deref().and_then(|l| l.first().copied());
            let levels = levels.ok_or_else(|| CliError::Config("[ensemble] needs `levels`".into()))?;
            let seed = ctx.seed(&[e.seed], None)?;
            let index = e.index.unwrap_or(0);
            ctx.note("K", levels);
            ctx.note("index", index);
            draw_coefficients(n, levels, seed, index)?
        }
        (None, None) => return Err(CliError::Config("seqnorm needs [coeffs] or [ensemble]".into())),
    };
    let params = space.space(coeffs.n())?;
    let value = seq_norm(&coeffs, &params)?;
    let mut out = vec![quantity("entries", coeffs.len()), quantity("seq_norm", value)];
    if let Some(check) = &cfg.check {
        if let Some(d) = check.d {
            let r = exponent(check.r.as_ref().ok_or_else(|| CliError::Config("[check] λ* needs `r`".into()))?)?;
            let window = check.window.unwrap_or_else(|| default_window(coeffs.n()));
            ctx.note("r", r.to_string());
            ctx.note("d", d);
            ctx.note("window", window);
            let star = seq_norm(&lambda_star(&coeffs, r, d, window)?, &params)?;
            out.push(quantity("lambda_star_norm", star));
            out.push(quantity("lambda_star_ratio", if value > 0.0 { star / value } else { 0.0 }));
        }
    }
    Ok(out)
}

fn embed_sweep(ctx: &mut Ctx) -> Res<Vec<Record>> {
    let spec = ctx.spec()?;
    let e = ExperimentConfig::require(&ctx.cfg.ensemble, "ensemble")?;
    let levels = e.levels.clone().ok_or_else(|| CliError::Config("[ensemble] needs `levels`".into()))?;
    let draws = e.size.ok_or_else(|| CliError::Config("[ensemble] needs `size`".into()))?;
    let seed = ctx.seed(&[e.seed], None)?;
    ctx.note("draws", draws);
    ctx.note("levels", levels.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" "));
    let sweep = level_sweep(&spec, &levels, draws, seed)?;
    Ok(sweep
        .reports
        .iter()
        .map(|r| {
            Record::new()
                .with("K", r.config.levels)
                .with("draws", r.config.draws)
                .with("max_ratio", r.max_ratio)
                .with("min_ratio", r.min_ratio)
                .with("argmax", r.argmax)
                .with("slope", sweep.slope)
        })
        .collect())
}

fn necessity(ctx: &mut Ctx) -> Res<Vec<Record>> {
    let spec = ctx.spec()?;
    let grid = ctx.grid()?;
    let (lo, hi) = ctx.levels_range()?;
    let seed = ctx.seed(&[ctx.cfg.check.as_ref().and_then(|c| c.seed)], Some(0))?;
    ctx.note("K", hi);
    let r = necessity_fit(&spec, grid, lo, hi, seed)?;
    Ok(r.levels
        .iter()
        .zip(&r.ratios)
        .map(|(&k, &ratio)| {
            Record::new()
                .with("N", k)
                .with("ratio", ratio)
                .with("fitted", r.fitted)
                .with("predicted", r.predicted)
        })
        .collect())
}

fn maximal_check(ctx: &mut Ctx) -> Res<Vec<Record>> {
    let cfg = ctx.cfg;
    let g = ExperimentConfig::require(&cfg.grid, "grid")?;
    let check = ctx.check()?;
    let params = ExperimentConfig::require(&cfg.source, "source")?.herz(g.n)?;
    let beta = exponent(check.beta.as_ref().ok_or_else(|| CliError::Config("[check] needs `beta`".into()))?)?;
    let t = check.t.ok_or_else(|| CliError::Config("[check] needs `t`".into()))?;
    let points = check.points.clone().unwrap_or_else(|| vec![g.points]);
    let count = cfg.ensemble.as_ref().and_then(|e| e.length).unwrap_or(16);
    let seed = ctx.seed(&[cfg.ensemble.as_ref().and_then(|e| e.seed), check.seed], None)?;
    ctx.note("n", g.n);
    ctx.note("L", g.period);
    ctx.note("family_size", count);
    ctx.note("beta", beta.to_string());
    ctx.note("t", t);
    let mut ratios = Vec::with_capacity(points.len());
    for &size in &points {
        let grid = Grid::new(g.n, g.period, size)?;
        ratios.push(fs_vector_check(&cube_family(grid, count, seed)?, &params, beta, t)?);
    }
    let slope = if points.len() > 1 {
        let xs: Vec<f64> = points.iter().map(|&p| (p as f64).log2()).collect();
        let ys: Vec<f64> = ratios.iter().map(|r| r.log2()).collect();
        ols(&xs, &ys)?.slope
    } else {
        0.0
    };
    Ok(points
        .iter()
        .zip(&ratios)
        .map(|(&size, &ratio)| Record::new().with("G", size).with("ratio", ratio).with("slope", slope))
        .collect())
}

fn ppn(ctx: &mut Ctx) -> Res<Vec<Record>> {
    let grid = ctx.grid()?;
    let source = ExperimentConfig::require(&ctx.cfg.source, "source")?.herz(grid.n())?;
    let target = ExperimentConfig::require(&ctx.cfg.target, "target")?.herz(grid.n())?;
    let (lo, hi) = ctx.levels_range()?;
    let seed = ctx.seed(&[ctx.cfg.check.as_ref().and_then(|c| c.seed)], Some(0))?;
    let r = ppn_check(&source, &target, grid, lo, hi, seed)?;
    ctx.note("gamma", r.gamma);
    Ok(r.levels
        .iter()
        .zip(&r.ratios)
        .map(|(&k, &ratio)| Record::new().with("N", k).with("ratio", ratio).with("slope", r.slope))
        .collect())
}

fn hardy(ctx: &mut Ctx) -> Res<Vec<Record>> {
    let cfg = ctx.cfg;
    let check = ctx.check()?;
    let a_list = check.a.clone().ok_or_else(|| CliError::Config("[check] needs `a`".into()))?;
    let q_list = check
        .q
        .as_ref()
        .ok_or_else(|| CliError::Config("[check] needs `q`".into()))?
        .iter()
        .map(exponent)
        .collect::<Res<Vec<_>>>()?;
    let e = ExperimentConfig::require(&cfg.ensemble, "ensemble")?;
    let samples = e.size.unwrap_or(100);
    let len = e.length.unwrap_or(32);
    let seed = ctx.seed(&[e.seed, check.seed], None)?;
    ctx.note("samples", samples);
    ctx.note("length", len);
    ctx.note("slack", HARDY_SLACK);
    let mut out = Vec::new();
    for &a in &a_list {
        for &q in &q_list {
            let r = hardy_ensemble(a, q, samples, len, seed)?;
            debug_assert_eq!(r.constant, hardy_constant(a, q)?);
            out.push(
                Record::new()
                    .with("a", a)
                    .with("q", q.to_string())
                    .with("max_ratio", r.max_ratio)
                    .with("constant", r.constant)
                    .with("within_bound", r.within_bound()),
            );
        }
    }
    Ok(out)
}
