//! `rado`: generate surfaces and fields, classify critical points, extract
//! level networks, verify the counting identities and transform meshes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rado_core::classify::classify_all;
use rado_core::field::ScalarField;
use rado_core::gallery::{self, Params};
use rado_core::io;
use rado_core::mesh::double;
use rado_core::network::{counting_identity, extract_level_network, slice_bound, SStarRule};
use rado_core::regions::{clip, quotient_constant_boundary, region_euler, Interval};
use rado_core::verify::{applicable, run_all, PerturbationOptions, TheoremId, TheoremReport, VerifyOptions};

const SCHEMA: &str = "rado-report/1";

#[derive(Parser)]
#[command(name = "rado", version, about = "Critical points of PL fields on triangulated surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a gallery surface as OFF plus a field sidecar.
    Generate {
        /// Generator name; `list` prints the available names.
        name: String,
        /// Generator parameters as key=value.
        params: Vec<String>,
        /// Output prefix; writes PREFIX.off and PREFIX.field.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the field with a seeded random one.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Classify every vertex and print the summary.
    Classify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Extract the level network at `t` and evaluate the slice bounds.
    Slice {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value = "off-level")]
        s_star: StarRule,
        /// Write the network as a DOT graph.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the network as OBJ polylines.
        #[arg(long)]
        obj: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run verifiers; exits 0 iff every requested check passes.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Comma-separated theorem ids, or `all`.
        #[arg(long, default_value = "all")]
        theorems: String,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Single level for the slice checks; all probe levels by default.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value = "off-level")]
        s_star: StarRule,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Double, quotient or clip a surface.
    Transform {
        #[arg(value_enum)]
        op: TransformOp,
        #[command(flatten)]
        input: Input,
        /// Output prefix.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    mesh: PathBuf,
    /// Field sidecar; defaults to the mesh path with a `.field` extension.
    #[arg(long)]
    field: Option<PathBuf>,
}

impl Input {
    fn field_path(&self) -> PathBuf {
        self.field.clone().unwrap_or_else(|| self.mesh.with_extension("field"))
    }

    fn load(&self) -> Result<ScalarField> {
        Ok(io::read_field(&self.mesh, &self.field_path())?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StarRule {
    OffLevel,
    OneSided,
}

impl From<StarRule> for SStarRule {
    fn from(r: StarRule) -> Self {
        match r {
            StarRule::OffLevel => SStarRule::OffLevel,
            StarRule::OneSided => SStarRule::OneSided,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformOp {
    Double,
    Quotient,
    Clip,
}

fn envelope(command: &str, body: Value) -> Value {
    let mut out = json!({ "schema": SCHEMA, "command": command });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

fn emit(report: &Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    if let Err(e) = writeln!(std::io::stdout(), "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e.into());
        }
    }
    if let Some(p) = path {
        fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn write_pair(prefix: &Path, field: &ScalarField) -> Result<(PathBuf, PathBuf)> {
    let mesh_path = prefix.with_extension("off");
    let field_path = prefix.with_extension("field");
    io::write_off(&mesh_path, field.mesh())?;
    io::write_field(&field_path, field)?;
    Ok((mesh_path, field_path))
}

fn parse_params(raw: &[String]) -> Result<Params> {
    raw.iter()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| anyhow!("parameter `{kv}` is not key=value"))?;
            Ok((k.to_string(), v.to_string()))
        })
        .collect()
}

fn cmd_generate(
    name: &str,
    raw: &[String],
    out: Option<PathBuf>,
    seed: Option<u64>,
    json_path: Option<PathBuf>,
) -> Result<ExitCode> {
    if name == "list" {
        for g in gallery::GENERATORS {
            println!("{g}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let params = parse_params(raw)?;
    let field = gallery::generate(name, &params, seed)?;
    let prefix = out.unwrap_or_else(|| PathBuf::from(name));
    let (mesh_path, field_path) = write_pair(&prefix, &field)?;
    let report = envelope(
        "generate",
        json!({
            "generator": name,
            "params": params,
            "seed": seed,
            "mesh": mesh_path,
            "field": field_path,
            "vertices": field.mesh().vertex_count(),
            "triangles": field.mesh().triangles().len(),
            "chi": field.mesh().euler_characteristic(),
        }),
    );
    emit(&report, json_path.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(input: &Input, json_path: Option<PathBuf>) -> Result<ExitCode> {
    let field = input.load()?;
    let summary = classify_all(&field)?;
    let report = envelope(
        "classify",
        json!({ "mode": field.mode(), "summary": summary }),
    );
    emit(&report, json_path.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_slice(
    input: &Input,
    t: f64,
    rule: SStarRule,
    dot: Option<PathBuf>,
    obj: Option<PathBuf>,
    json_path: Option<PathBuf>,
) -> Result<ExitCode> {
    let field = input.load()?;
    let network = extract_level_network(&field, t)?;
    // relaxed fields may leave boundary vertices unclassified; report the
    // counting identity alone in that case
    let report = match classify_all(&field) {
        Ok(summary) => slice_bound(&field, t, &summary, rule)?,
        Err(_) => counting_identity(&network),
    };
    if let Some(p) = dot {
        fs::write(&p, io::network_dot(&network)).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = obj {
        let text = io::network_obj(&network).ok_or_else(|| anyhow!("mesh has no positions"))?;
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    let pass = report.pass && report.slice.as_ref().is_none_or(|s| s.holds.iter().all(|&h| h));
    let body = envelope(
        "slice",
        json!({ "report": report, "network": network, "pass": pass }),
    );
    emit(&body, json_path.as_deref())?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_theorems(spec: &str) -> Result<Option<Vec<TheoremId>>> {
    if spec.trim() == "all" {
        return Ok(None);
    }
    spec.split(',')
        .map(|s| s.trim().parse::<TheoremId>().map_err(|e| anyhow!(e)))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    input: &Input,
    theorems: &str,
    interval: Option<(f64, f64)>,
    t: Option<f64>,
    rule: SStarRule,
    seed: u64,
    trials: usize,
    json_path: Option<PathBuf>,
) -> Result<ExitCode> {
    let requested = parse_theorems(theorems)?;
    let options = VerifyOptions {
        interval,
        level: t,
        s_star: rule,
        region: None,
        perturbation: PerturbationOptions {
            epsilon: None,
            trials,
            seed,
        },
    };
    let mesh = Arc::new(io::read_mesh(&input.mesh)?);
    let values = io::read_field_values(&input.field_path())?;
    let reports: Vec<TheoremReport> = match io::attach_either(mesh, values) {
        Ok(field) => {
            let list = requested.unwrap_or_else(|| applicable(&field, &options));
            run_all(&field, &list, &options)
        }
        // an invalid field fails every requested check instead of aborting
        Err(io::IoError::Field(e)) => {
            let list = requested.unwrap_or_else(|| TheoremId::ALL.to_vec());
            let err = e.into();
            list.iter().map(|&th| TheoremReport::failed(th, &err)).collect()
        }
        Err(e) => return Err(e.into()),
    };
    let pass = reports.iter().all(|r| r.pass);
    let body = envelope("verify", json!({ "reports": reports, "pass": pass }));
    emit(&body, json_path.as_deref())?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_transform(
    op: TransformOp,
    input: &Input,
    out: &Path,
    interval: Option<(f64, f64)>,
    json_path: Option<PathBuf>,
) -> Result<ExitCode> {
    let field = input.load()?;
    let body = match op {
        TransformOp::Double => {
            let d = double(field.mesh())?;
            let mut values = vec![0.0; d.mesh.vertex_count()];
            for (v, &(a, b)) in d.copies.iter().enumerate() {
                values[a] = field.value(v);
                values[b] = field.value(v);
            }
            let doubled = io::attach_either(Arc::new(d.mesh), values)?;
            let (m, f) = write_pair(out, &doubled)?;
            json!({
                "op": "double",
                "mesh": m,
                "field": f,
                "chi": doubled.mesh().euler_characteristic(),
                "closed": doubled.mesh().is_closed(),
            })
        }
        TransformOp::Quotient => {
            let q = quotient_constant_boundary(&field)?;
            let (m, f) = write_pair(out, &q.field)?;
            json!({
                "op": "quotient",
                "mesh": m,
                "field": f,
                "chi": q.mesh.euler_characteristic(),
                "collapsed": q.collapsed,
                "collapse_map": q.collapse_map,
            })
        }
        TransformOp::Clip => {
            let (a, b) = interval.ok_or_else(|| anyhow!("clip needs --a and --b"))?;
            let c = clip(&field, Interval::open(a, b))?;
            let m = out.with_extension("off");
            let text = io::clip_off(&c).ok_or_else(|| anyhow!("mesh has no positions"))?;
            fs::write(&m, text).with_context(|| format!("writing {}", m.display()))?;
            let components: Vec<Value> = c
                .components
                .iter()
                .map(|k| json!({ "cells": k.cells.len(), "chi": k.chi, "boundary_cycles": k.boundary_cycles.len() }))
                .collect();
            json!({
                "op": "clip",
                "mesh": m,
                "a": a,
                "b": b,
                "chi": region_euler(&c),
                "beta_lower": c.beta_lower,
                "beta_upper": c.beta_upper,
                "components": components,
            })
        }
    };
    emit(&envelope("transform", body), json_path.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn interval(a: Option<f64>, b: Option<f64>) -> Result<Option<(f64, f64)>> {
    match (a, b) {
        (None, None) => Ok(None),
        (Some(a), Some(b)) => Ok(Some((a, b))),
        _ => bail!("--a and --b must be given together"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            name,
            params,
            out,
            seed,
            json,
        } => cmd_generate(&name, &params, out, seed, json),
        Command::Classify { input, json } => cmd_classify(&input, json),
        Command::Slice {
            input,
            t,
            s_star,
            dot,
            obj,
            json,
        } => cmd_slice(&input, t, s_star.into(), dot, obj, json),
        Command::Verify {
            input,
            theorems,
            a,
            b,
            t,
            s_star,
            seed,
            trials,
            json,
        } => cmd_verify(&input, &theorems, interval(a, b)?, t, s_star.into(), seed, trials, json),
        Command::Transform {
            op,
            input,
            out,
            a,
            b,
            json,
        } => cmd_transform(op, &input, &out, interval(a, b)?, json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn params_parse() {
        let p = parse_params(&["k=3".into(), "n=48".into()]).unwrap();
        assert_eq!(p, BTreeMap::from([("k".into(), "3".into()), ("n".into(), "48".into())]));
        assert!(parse_params(&["k".into()]).is_err());
    }

    #[test]
    fn theorem_lists() {
        assert_eq!(parse_theorems("all").unwrap(), None);
        assert_eq!(
            parse_theorems("general,slice").unwrap(),
            Some(vec![TheoremId::General, TheoremId::Slice])
        );
        assert!(parse_theorems("nonsense").is_err());
    }
}
