//! Text formats: cube families and reports as JSON, point sets and grid
//! functions as CSV with a `# key=value` header line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hlab_core::fractal::PointSetMeta;
use hlab_core::grid::GridSpec;
use hlab_core::{CubeFamily, GridFunction, PointSet};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{HlabError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HlabError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| HlabError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| HlabError::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| HlabError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

/// `{"tau": .., "cubes": [{"level": .., "coords": [..]}, ..]}`.
pub fn family_to_json(family: &CubeFamily) -> Result<String> {
    to_json(family)
}

pub fn family_from_json(text: &str) -> Result<CubeFamily> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_family(path: &Path) -> Result<CubeFamily> {
    read_json(path)
}

fn parse_header(line: &str) -> Option<Vec<(&str, &str)>> {
    let rest = line.strip_prefix('#')?;
    Some(
        rest.split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .collect(),
    )
}

fn header_value<'a>(fields: &[(&str, &'a str)], key: &str) -> Option<&'a str> {
    fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

/// Header `# dim=<n> generator=<name> seed=<s>`, then one point per row.
pub fn point_set_to_csv(points: &PointSet) -> String {
    let mut out = String::new();
    let generator = if points.meta.generator.is_empty() {
        "unknown"
    } else {
        points.meta.generator.as_str()
    };
    let _ = writeln!(out, "# dim={} generator={} seed={}", points.dim(), generator, points.meta.seed);
    for p in points.points() {
        let row: Vec<String> = p.iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn point_set_from_csv(text: &str, path: &Path) -> Result<PointSet> {
    let parse_err = |line: usize, message: String| HlabError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| parse_err(1, "empty file".into()))?;
    let fields = parse_header(first).ok_or_else(|| parse_err(1, "missing '# dim=..' header".into()))?;
    let dim: usize = header_value(&fields, "dim")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| parse_err(1, "header lacks a valid dim".into()))?;
    let meta = PointSetMeta {
        generator: header_value(&fields, "generator").unwrap_or("unknown").to_string(),
        seed: header_value(&fields, "seed").and_then(|v| v.parse().ok()).unwrap_or(0),
    };
    let mut coords = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(i + 1, format!("bad number: {e}")))?;
        if row.len() != dim {
            return Err(parse_err(i + 1, format!("expected {dim} coordinates, found {}", row.len())));
        }
        coords.extend(row);
    }
    Ok(PointSet::new(dim, coords, meta)?)
}

pub fn read_point_set(path: &Path) -> Result<PointSet> {
    point_set_from_csv(&read_text(path)?, path)
}

/// Header `# dim=2 box_corner=-1,-1 box_side=2 cells_per_side=64`, then the
/// values row-major: one grid row per line in 2-d, one value per line in 1-d.
pub fn grid_to_csv(f: &GridFunction) -> String {
    let spec = f.spec();
    let corner: Vec<String> = spec.corner.iter().map(|x| format!("{x:?}")).collect();
    let mut out = format!(
        "# dim={} box_corner={} box_side={:?} cells_per_side={}\n",
        spec.dim,
        corner.join(","),
        spec.side,
        spec.cells_per_side
    );
    let per_line = if spec.dim == 1 { 1 } else { spec.cells_per_side };
    for row in f.values().chunks(per_line) {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn grid_from_csv(text: &str, path: &Path) -> Result<GridFunction> {
    let parse_err = |line: usize, message: String| HlabError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| parse_err(1, "empty file".into()))?;
    let fields = parse_header(first).ok_or_else(|| parse_err(1, "missing '# dim=..' header".into()))?;
    let get = |key: &str| header_value(&fields, key).ok_or_else(|| parse_err(1, format!("header lacks {key}")));
    let dim: usize = get("dim")?.parse().map_err(|_| parse_err(1, "bad dim".into()))?;
    let corner: Vec<f64> = get("box_corner")?
        .split(',')
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| parse_err(1, "bad box_corner".into()))?;
    let side: f64 = get("box_side")?.parse().map_err(|_| parse_err(1, "bad box_side".into()))?;
    let cells: usize = get("cells_per_side")?
        .parse()
        .map_err(|_| parse_err(1, "bad cells_per_side".into()))?;
    let spec = GridSpec::new(dim, corner, side, cells)?;
    let mut values = Vec::with_capacity(spec.len());
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for t in line.split(',') {
            values.push(
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(i + 1, format!("bad number: {e}")))?,
            );
        }
    }
    if values.len() != spec.len() {
        return Err(parse_err(0, format!("expected {} values, found {}", spec.len(), values.len())));
    }
    Ok(GridFunction::new(spec, values)?)
}

pub fn read_grid(path: &Path) -> Result<GridFunction> {
    grid_from_csv(&read_text(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hlab_core::fractal::{cantor_set, CantorMode};
    use hlab_core::DyadicCube;

    #[test]
    fn family_round_trip() {
        let fam = CubeFamily::new(0.5, vec![DyadicCube::new(3, vec![1, 5]), DyadicCube::new(-2, vec![-1, 0])]);
        let text = family_to_json(&fam).unwrap();
        assert!(text.contains("\"level\": 3"));
        assert_eq!(family_from_json(&text).unwrap(), fam);
    }

    #[test]
    fn point_set_round_trip() {
        let e = cantor_set(1.0 / 3.0, 5, CantorMode::Endpoints, 7).unwrap();
        let text = point_set_to_csv(&e);
        assert!(text.starts_with("# dim=1 generator=cantor:ratio="));
        let back = point_set_from_csv(&text, Path::new("x.csv")).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn grid_round_trip() {
        let spec = GridSpec::cube(2, -1.0, 2.0, 4).unwrap();
        let f = GridFunction::from_fn(spec, |x| x[0] * 0.1 + x[1] / 3.0);
        let text = grid_to_csv(&f);
        assert!(text.starts_with("# dim=2 box_corner=-1.0,-1.0 box_side=2.0 cells_per_side=4\n"));
        assert_eq!(text.lines().count(), 5);
        assert_eq!(grid_from_csv(&text, Path::new("g.csv")).unwrap(), f);
        assert!(grid_from_csv("# dim=1 box_corner=0 box_side=1 cells_per_side=3\n1\n2\n", Path::new("g")).is_err());
    }
}
