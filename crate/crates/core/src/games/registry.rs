//! Building the built-in games by name from JSON parameters, and the plain-text
//! vector and matrix files their inputs come from.

use std::path::Path;
use std::sync::Arc;

use serde_json::{Map, Value};

use super::{load_graph, AdditiveGame, AirportGame, CoalitionGame, ConnectivityGame, Graph, LinearGaussianGame, VotingGame};
use crate::error::{Error, Result};

pub const GAME_NAMES: [&str; 5] = ["airport", "voting", "connectivity", "additive", "linear-gaussian"];

/// Builds a game from its name and a parameter object.
///
/// | game | parameters |
/// |---|---|
/// | `airport` | `weights` (array), `weights_file`, or `preset: "runway101"` |
/// | `voting` | `d` |
/// | `connectivity` | `graph_file`, `path`/`cycle`/`complete` (node count), or `n` + `edges`; optional `memo` |
/// | `additive` | `c` (array) or `c_file` |
/// | `linear-gaussian` | `beta`/`beta_file`, `sigma`/`sigma_file`, optional `beta0` |
///
/// Unknown keys are rejected.
pub fn build_game(name: &str, params: &Value) -> Result<Arc<dyn CoalitionGame>> {
    let empty = Map::new();
    let params = match params {
        Value::Null => &empty,
        Value::Object(map) => map,
        other => return Err(Error::invalid(format!("game parameters must be an object, got {other}"))),
    };
    let p = Params { game: name, map: params };
    let game: Arc<dyn CoalitionGame> = match name {
        "airport" => {
            p.allow(&["weights", "weights_file", "preset"])?;
            let weights = match (p.vector("weights", "weights_file")?, p.str("preset")?) {
                (Some(w), None) => w,
                (None, Some("runway101")) => super::runway_weights_101(),
                (None, Some(other)) => return Err(Error::invalid(format!("unknown airport preset `{other}`"))),
                _ => return Err(p.need("exactly one of weights, weights_file, preset")),
            };
            Arc::new(AirportGame::new(weights)?)
        }
        "voting" => {
            p.allow(&["d"])?;
            Arc::new(VotingGame::new(p.usize("d")?.ok_or_else(|| p.need("d"))?)?)
        }
        "additive" => {
            p.allow(&["c", "c_file"])?;
            Arc::new(AdditiveGame::new(p.vector("c", "c_file")?.ok_or_else(|| p.need("c or c_file"))?))
        }
        "connectivity" => {
            p.allow(&["graph_file", "path", "cycle", "complete", "n", "edges", "memo"])?;
            let graph = if let Some(file) = p.str("graph_file")? {
                load_graph(file)?
            } else if let Some(n) = p.usize("path")? {
                Graph::path(n)
            } else if let Some(n) = p.usize("cycle")? {
                Graph::cycle(n)
            } else if let Some(n) = p.usize("complete")? {
                Graph::complete(n)
            } else if let Some(n) = p.usize("n")? {
                let edges: Vec<(usize, usize)> = match p.map.get("edges") {
                    Some(v) => serde_json::from_value(v.clone())
                        .map_err(|e| Error::invalid(format!("connectivity: edges: {e}")))?,
                    None => Vec::new(),
                };
                Graph::from_edges(n, &edges)?
            } else {
                return Err(p.need("graph_file, path, cycle, complete, or n"));
            };
            if graph.node_count() == 0 {
                return Err(Error::invalid("connectivity game needs at least one node"));
            }
            let game = ConnectivityGame::new(graph);
            let memo = match p.map.get("memo") {
                None => false,
                Some(Value::Bool(b)) => *b,
                Some(other) => return Err(Error::invalid(format!("connectivity: memo must be a boolean, got {other}"))),
            };
            Arc::new(if memo { game.with_memo() } else { game })
        }
        "linear-gaussian" => {
            p.allow(&["beta", "beta_file", "sigma", "sigma_file", "beta0"])?;
            let beta = p.vector("beta", "beta_file")?.ok_or_else(|| p.need("beta or beta_file"))?;
            let sigma = match (p.map.get("sigma"), p.str("sigma_file")?) {
                (Some(v), None) => serde_json::from_value(v.clone())
                    .map_err(|e| Error::invalid(format!("linear-gaussian: sigma: {e}")))?,
                (None, Some(file)) => load_matrix(file)?,
                _ => return Err(p.need("exactly one of sigma, sigma_file")),
            };
            let beta0 = match p.map.get("beta0") {
                None => 0.0,
                Some(v) => v.as_f64().ok_or_else(|| Error::invalid("linear-gaussian: beta0 must be a number"))?,
            };
            Arc::new(LinearGaussianGame::new(beta0, beta, sigma)?)
        }
        other => {
            return Err(Error::invalid(format!("unknown game `{other}`; expected one of {}", GAME_NAMES.join(", "))))
        }
    };
    Ok(game)
}

struct Params<'a> {
    game: &'a str,
    map: &'a Map<String, Value>,
}

impl Params<'_> {
    fn allow(&self, keys: &[&str]) -> Result<()> {
        match self.map.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(Error::invalid(format!("{}: unknown parameter `{k}`", self.game))),
            None => Ok(()),
        }
    }

    fn need(&self, what: &str) -> Error {
        Error::invalid(format!("{} game needs {what}", self.game))
    }

    fn str(&self, key: &str) -> Result<Option<&str>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(Error::invalid(format!("{}: {key} must be a string, got {other}", self.game))),
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| Error::invalid(format!("{}: {key} must be a nonnegative integer, got {v}", self.game))),
        }
    }

    /// An inline array under `key` or a file named under `file_key`, not both.
    fn vector(&self, key: &str, file_key: &str) -> Result<Option<Vec<f64>>> {
        match (self.map.get(key), self.str(file_key)?) {
            (Some(_), Some(_)) => Err(Error::invalid(format!("{}: give {key} or {file_key}, not both", self.game))),
            (Some(v), None) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| Error::invalid(format!("{}: {key}: {e}", self.game))),
            (None, Some(file)) => load_vector(file).map(Some),
            (None, None) => Ok(None),
        }
    }
}

/// One number per nonempty line; `#` starts a comment line.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    data_lines(text)
        .map(|(line, s)| s.parse::<f64>().map_err(|e| Error::parse(line, format!("`{s}`: {e}"))))
        .collect()
}

/// One matrix row per nonempty line, entries separated by whitespace or commas.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, s) in data_lines(text) {
        let row = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|e| Error::parse(line, format!("`{t}`: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::parse(line, format!("row has {} entries, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector(&crate::error::read_text(path.as_ref())?)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    parse_matrix(&crate::error::read_text(path.as_ref())?)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn builds_every_game() {
        let cases = [
            ("airport", json!({"weights": [1.0, 2.0, 3.0]}), 3),
            ("airport", json!({"preset": "runway101"}), 101),
            ("voting", json!({"d": 8}), 8),
            ("additive", json!({"c": [1.0, -1.0]}), 2),
            ("connectivity", json!({"path": 6}), 6),
            ("connectivity", json!({"n": 4, "edges": [[1, 2], [2, 3]], "memo": true}), 4),
            ("linear-gaussian", json!({"beta": [1.0, 2.0], "sigma": [[1.0, -0.5], [-0.5, 0.8]]}), 2),
        ];
        for (name, params, d) in cases {
            let game = build_game(name, &params).unwrap();
            assert_eq!(game.num_players(), d, "{name}");
            assert_eq!(game.name(), name);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_game("chess", &json!({})).is_err());
        assert!(build_game("voting", &json!({"d": 8, "extra": 1})).is_err());
        assert!(build_game("voting", &json!({})).is_err());
        assert!(build_game("voting", &json!({"d": 7})).is_err());
        assert!(build_game("airport", &json!({"weights": [1.0], "preset": "runway101"})).is_err());
        assert!(build_game("airport", &json!({"weights": [-1.0]})).is_err());
        assert!(build_game("connectivity", &json!({"memo": true})).is_err());
        assert!(build_game("linear-gaussian", &json!({"beta": [1.0], "sigma": [[-1.0]]})).is_err());
        assert!(build_game("voting", &json!([8])).is_err());
    }

    #[test]
    fn files_feed_games() {
        let dir = tempfile::tempdir().unwrap();
        let w = dir.path().join("w.txt");
        std::fs::write(&w, "# weights\n1\n2.5\n\n3\n").unwrap();
        let s = dir.path().join("s.txt");
        std::fs::write(&s, "1, 0.2\n0.2 2\n").unwrap();
        let game = build_game("airport", &json!({"weights_file": w})).unwrap();
        assert_eq!(game.num_players(), 3);
        let game =
            build_game("linear-gaussian", &json!({"beta_file": w.with_file_name("w.txt"), "sigma_file": s})).is_err();
        assert!(game, "3 coefficients against a 2x2 covariance");
        assert!(matches!(load_vector(dir.path().join("missing")), Err(Error::Io(_))));
    }

    #[test]
    fn text_formats() {
        assert_eq!(parse_vector("1\n 2.5 \n# c\n-3e0\n").unwrap(), vec![1.0, 2.5, -3.0]);
        assert!(matches!(parse_vector("1\nx\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(parse_matrix("1 2\n3,4\n").unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(parse_matrix("1 2\n3\n").is_err());
    }
}
