//! Resolving command-line operands: builtin names, inline JSON or JSON files.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use mapcone::builtins::parse_builtin;
use mapcone::calculus::{AugmentedCone, Cone, ConeJson};
use mapcone::json::{MapJson, MatrixJson};
use mapcone::{BipartiteMatrix, ConeId, HpMap};

/// Inline JSON, the contents of a file, or `None` for a bare name.
fn json_text(arg: &str) -> Result<Option<String>> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(Some(arg.to_string()));
    }
    let path = Path::new(arg);
    if path.is_file() {
        return fs::read_to_string(path).map(Some).with_context(|| format!("reading {arg}"));
    }
    Ok(None)
}

pub fn map(arg: &str) -> Result<HpMap> {
    match json_text(arg)? {
        Some(text) => {
            let j: MapJson = serde_json::from_str(&text).map_err(mapcone::Error::from)?;
            Ok(j.to_map()?)
        }
        None => Ok(parse_builtin(arg)?),
    }
}

/// A bipartite matrix from JSON, or the Choi matrix of a named map.
pub fn bipartite(arg: &str) -> Result<BipartiteMatrix> {
    match json_text(arg)? {
        Some(text) => {
            let j: MatrixJson = serde_json::from_str(&text).map_err(mapcone::Error::from)?;
            Ok(j.to_bipartite()?)
        }
        None => Ok(parse_builtin(arg)?.choi().clone()),
    }
}

/// A square matrix from JSON; `dims` may be `[d]` or `[dA, dB]`.
pub fn square(arg: &str) -> Result<mapcone::CMat> {
    let text = json_text(arg)?.ok_or_else(|| mapcone::Error::Parse(format!("{arg:?} is neither JSON nor a file")))?;
    let j: MatrixJson = serde_json::from_str(&text).map_err(mapcone::Error::from)?;
    Ok(j.to_matrix()?)
}

/// `example-K`, a builtin cone name, or a cone JSON document.
pub fn cone(arg: &str) -> Result<Cone> {
    if arg.eq_ignore_ascii_case("example-k") || arg.eq_ignore_ascii_case("example") {
        return Ok(Cone::Augmented(AugmentedCone::example()));
    }
    match json_text(arg)? {
        Some(text) => {
            let j: ConeJson = serde_json::from_str(&text).map_err(mapcone::Error::from)?;
            Ok(Cone::Augmented(AugmentedCone::from_json(&j)?))
        }
        None => Ok(Cone::Builtin(ConeId::parse(arg)?)),
    }
}

pub fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
