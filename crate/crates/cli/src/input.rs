//! Reading tilings, box families and construction documents from disk.

use std::path::Path;
use std::sync::Arc;

use anyhow::bail;
use keller_core::keller::{BoxFamilyDoc, SystemSource};
use keller_core::torus::Recipe;
use keller_core::{BoxFamily, MultipileTree, PartitionSystem, TorusSpec, TorusTiling};
use serde::Deserialize;
use serde_json::Value;

/// Anything `validate` and `analyze` accept.
pub enum Input {
    Tiling(TorusTiling),
    Family(BoxFamily),
}

/// Unparseable or ill-formed input; maps to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(path: &Path, e: impl std::fmt::Display) -> anyhow::Error {
    InputError(format!("{}: {e}", path.display())).into()
}

pub fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| input_err(path, e))
}

fn base_dir(path: &Path) -> &Path {
    path.parent().unwrap_or_else(|| Path::new("."))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, value: Value) -> anyhow::Result<T> {
    serde_json::from_value(value).map_err(|e| input_err(path, e))
}

pub fn load_family(path: &Path, value: Value) -> anyhow::Result<BoxFamily> {
    let doc: BoxFamilyDoc = parse(path, value)?;
    doc.into_family(base_dir(path)).map_err(|e| input_err(path, e))
}

/// Tiling files carry `starts`, family files carry `boxes`.
pub fn load_input(path: &Path) -> anyhow::Result<Input> {
    let value = read_json(path)?;
    if value.get("starts").is_some() {
        Ok(Input::Tiling(parse(path, value)?))
    } else if value.get("boxes").is_some() {
        Ok(Input::Family(load_family(path, value)?))
    } else {
        Err(input_err(path, "expected a tiling (\"starts\") or a box family (\"boxes\")"))
    }
}

#[derive(Deserialize)]
struct TreeDoc {
    system: SystemSource,
    tree: MultipileTree,
}

#[derive(Deserialize)]
struct RecipeDoc {
    m: Vec<usize>,
    q: Option<Vec<usize>>,
    recipe: Recipe,
}

pub enum Construction {
    Tree(Arc<PartitionSystem>, MultipileTree),
    Recipe(TorusSpec, Recipe),
}

/// `{"system", "tree"}` builds a box family, `{"m", "q", "recipe"}` a
/// laminated tiling.
pub fn load_construction(path: &Path) -> anyhow::Result<Construction> {
    let value = read_json(path)?;
    if value.get("tree").is_some() {
        let doc: TreeDoc = parse(path, value)?;
        let system = match doc.system {
            SystemSource::Inline(s) => s,
            SystemSource::Path(p) => {
                let file = base_dir(path).join(p);
                parse(&file, read_json(&file)?)?
            }
        };
        Ok(Construction::Tree(Arc::new(system), doc.tree))
    } else if value.get("recipe").is_some() {
        let doc: RecipeDoc = parse(path, value)?;
        let spec = match doc.q {
            Some(q) => TorusSpec::new(doc.m, q),
            None => TorusSpec::with_default_q(doc.m),
        }
        .map_err(|e| input_err(path, e))?;
        Ok(Construction::Recipe(spec, doc.recipe))
    } else {
        bail!(InputError(format!("{}: expected \"tree\" or \"recipe\"", path.display())))
    }
}

/// `--q` takes one value for every axis or one per axis.
pub fn resolve_spec(m: &[usize], q: Option<&[usize]>) -> anyhow::Result<TorusSpec> {
    let spec = match q {
        None => TorusSpec::with_default_q(m.to_vec()),
        Some([q]) => TorusSpec::new(m.to_vec(), vec![*q; m.len()]),
        Some(q) => TorusSpec::new(m.to_vec(), q.to_vec()),
    };
    spec.map_err(|e| InputError(e.to_string()).into())
}
