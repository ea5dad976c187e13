use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chordnoise::channels::{apply_channel, channel_spectrum};
use chordnoise::spectral::{
    build_full_propagator, build_noisy_propagator, leading_spectrum, pair_distance, sort_eigenvalues,
    FULL_PROPAGATOR_MAX_DIM,
};
use chordnoise::states::wigner_function;
use chordnoise::{Complex64, TorusGeometry};
use serde_json::{json, Value};

use crate::config::{
    ChannelSpectrumCmd, Command, EvolveCmd, Family, PropagatorCmd, StabilityCmd, SweepCmd, WignerCmd,
};
use crate::output::{read_table, write_table, Table};

pub fn run(cmd: &Command) -> Result<()> {
    match cmd {
        Command::ChannelSpectrum(c) => channel_spectrum_cmd(c, cmd),
        Command::Evolve(c) => evolve_cmd(c, cmd),
        Command::Wigner(c) => wigner_cmd(c, cmd),
        Command::PropagatorSpectrum(c) => propagator_cmd(c, cmd),
        Command::Stability(c) => stability_cmd(c).map(|dev| println!("max_deviation {dev:e}")),
        Command::Sweep(c) => sweep_cmd(c),
    }
}

fn config_value(cmd: &Command) -> Result<Value> {
    Ok(serde_json::to_value(cmd)?)
}

fn channel_spectrum_cmd(c: &ChannelSpectrumCmd, cmd: &Command) -> Result<()> {
    let ch = c.channel.build()?;
    let mut table = Table::new(&["q", "p", "re", "im"]);
    for (pt, z) in channel_spectrum(&ch).iter() {
        table.push(vec![pt.q as f64, pt.p as f64, z.re, z.im]);
    }
    write_table(&c.output.out, c.output.format, &config_value(cmd)?, None, &table)
}

fn grid_meta(geom: &TorusGeometry) -> Value {
    json!({ "n": geom.n(), "grid": 2 * geom.n() })
}

fn evolve_cmd(c: &EvolveCmd, cmd: &Command) -> Result<()> {
    let ch = c.channel.build()?;
    let geom = *ch.geometry();
    let rho = c.state.build(&geom)?;
    let mut out = rho.clone();
    for _ in 0..c.steps {
        out = apply_channel(&ch, &out)?;
    }
    let (w_in, w_out) = (wigner_function(&rho), wigner_function(&out));
    let mut table = Table::new(&["j", "k", "w_in", "w_out"]);
    for ((j, k), v) in w_in.values().indexed_iter() {
        table.push(vec![j as f64, k as f64, *v, w_out.get(j, k)]);
    }
    write_table(&c.output.out, c.output.format, &config_value(cmd)?, Some(&grid_meta(&geom)), &table)
}

fn wigner_cmd(c: &WignerCmd, cmd: &Command) -> Result<()> {
    let geom = TorusGeometry::new(c.n).map_err(|e| anyhow::anyhow!("--n: {e}"))?;
    let w = wigner_function(&c.state.build(&geom)?);
    let mut table = Table::new(&["j", "k", "w"]);
    for ((j, k), v) in w.values().indexed_iter() {
        table.push(vec![j as f64, k as f64, *v]);
    }
    write_table(&c.output.out, c.output.format, &config_value(cmd)?, Some(&grid_meta(&geom)), &table)
}

fn phase_0_2pi(z: Complex64) -> f64 {
    let arg = z.arg();
    if arg < 0.0 { arg + std::f64::consts::TAU } else { arg }
}

fn propagator_cmd(c: &PropagatorCmd, cmd: &Command) -> Result<()> {
    let ch = c.channel.build()?;
    let geom = *ch.geometry();
    let u = c.map.build(&geom)?;
    let tp = match (c.channel.family, c.a) {
        (Family::Gaussian, Some(a)) => {
            if !(a > 0.0 && a.is_finite()) {
                bail!("--a: must be positive, got {a}");
            }
            build_noisy_propagator(&ch, &u, a)?
        }
        (Family::Gaussian, None) if geom.n() > FULL_PROPAGATOR_MAX_DIM => {
            bail!("--a is required for gaussian noise at N > {FULL_PROPAGATOR_MAX_DIM}")
        }
        (Family::Gaussian, None) => build_full_propagator(&ch, &u)?,
        (_, Some(_)) => bail!("--a: truncation only applies to the gaussian family"),
        (_, None) => build_full_propagator(&ch, &u)
            .map_err(|e| anyhow::anyhow!("--n: {e}; use the gaussian family with --a for larger N"))?,
    };
    let count = c.count.unwrap_or(tp.dim());
    let spectrum = leading_spectrum(&tp, count).map_err(|e| anyhow::anyhow!("--count: {e}"))?;
    let mut table = Table::new(&["re", "im", "modulus", "phase", "neg_log_modulus"]);
    for z in &spectrum.eigenvalues {
        let r = z.norm();
        table.push(vec![z.re, z.im, r, phase_0_2pi(*z), -r.ln()]);
    }
    let meta = json!({ "dim_used": spectrum.dim_used, "covers_all_modes": tp.covers_all_modes() });
    write_table(&c.output.out, c.output.format, &config_value(cmd)?, Some(&meta), &table)
}

fn read_spectrum(path: &Path) -> Result<Vec<Complex64>> {
    let table = read_table(path)?;
    let re = table.column("re").with_context(|| path.display().to_string())?;
    let im = table.column("im").with_context(|| path.display().to_string())?;
    let mut values: Vec<Complex64> = re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect();
    sort_eigenvalues(&mut values);
    Ok(values)
}

pub fn stability_cmd(c: &StabilityCmd) -> Result<f64> {
    let left = read_spectrum(&c.left)?;
    let right = read_spectrum(&c.right)?;
    let dev = pair_distance(&left, &right, c.count).map_err(|e| anyhow::anyhow!("--count: {e}"))?;
    if let Some(tol) = c.tolerance {
        if dev.is_nan() || dev > tol {
            bail!("--tolerance: max deviation {dev:e} exceeds {tol:e}");
        }
    }
    Ok(dev)
}

fn rebase(base: &Path, path: &mut PathBuf) {
    if path.is_relative() {
        *path = base.join(&*path);
    }
}

fn sweep_cmd(c: &SweepCmd) -> Result<()> {
    let text = std::fs::read_to_string(&c.config).with_context(|| format!("--config: cannot read {}", c.config.display()))?;
    let value: Value = serde_json::from_str(&text).context("sweep config: invalid json")?;
    let runs = match value {
        Value::Array(items) => items,
        Value::Object(mut obj) => match obj.remove("runs") {
            Some(Value::Array(items)) => items,
            _ => bail!("sweep config: expected an array of runs or {{\"runs\": [...]}}"),
        },
        _ => bail!("sweep config: expected an array of runs or {{\"runs\": [...]}}"),
    };
    let base = c.config.parent().map(Path::to_path_buf).unwrap_or_default();
    for (i, item) in runs.into_iter().enumerate() {
        let mut cmd: Command = serde_json::from_value(item).with_context(|| format!("sweep run {i}"))?;
        match &mut cmd {
            Command::ChannelSpectrum(c) => rebase(&base, &mut c.output.out),
            Command::Evolve(c) => rebase(&base, &mut c.output.out),
            Command::Wigner(c) => rebase(&base, &mut c.output.out),
            Command::PropagatorSpectrum(c) => rebase(&base, &mut c.output.out),
            Command::Stability(c) => {
                rebase(&base, &mut c.left);
                rebase(&base, &mut c.right);
            }
            Command::Sweep(_) => bail!("sweep run {i}: nested sweeps are not supported"),
        }
        run(&cmd).with_context(|| format!("sweep run {i}"))?;
    }
    Ok(())
}
