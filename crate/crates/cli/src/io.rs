use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use region_rrt_core::map_model::{load_grid_map, load_heuristic};
use region_rrt_core::{GridMap, HeuristicMap, State};

pub fn read_flag(flag: &str, path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("{flag}: cannot read {}", path.display()))
}

pub fn map_flag(flag: &str, path: &Path) -> Result<GridMap> {
    load_grid_map(&read_flag(flag, path)?).with_context(|| format!("{flag}: {}", path.display()))
}

pub fn heuristic_flag(flag: &str, path: &Path, map: &GridMap) -> Result<HeuristicMap> {
    load_heuristic(&read_flag(flag, path)?, map)
        .with_context(|| format!("{flag}: {}", path.display()))
}

/// Parses `x,y`.
pub fn parse_state(s: &str) -> Result<State, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("bad x in {s:?}: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("bad y in {s:?}: {e}"))?;
    Ok(State::new(x, y))
}

/// Writes to `path`, or stdout when `path` is `None`.
pub fn write_output(flag: &str, path: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("{flag}: {}", dir.display()))?;
            }
            fs::write(p, bytes).with_context(|| format!("{flag}: cannot write {}", p.display()))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .context("cannot write to stdout"),
    }
}

/// File name without any `.map.pgm`-style double extension.
pub fn map_id(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.split('.').next().unwrap_or(&name).to_string()
}
