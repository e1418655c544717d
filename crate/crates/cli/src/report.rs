//! One solve, as JSON lines or as `key: value` text.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input: String,
    pub n: usize,
    pub m: usize,
    /// Decimal, since orders overflow every integer type.
    pub group_order: String,
    pub generator_count: usize,
    /// Cycle notation, 1-based.
    pub generators: Vec<String>,
    /// 1-based.
    pub base: Vec<u32>,
    pub termination: String,
    pub threads: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub permuted: bool,
    pub walks: u64,
    pub nodes_expanded: u64,
    pub parse_ms: f64,
    pub base_aligned_ms: f64,
    pub bfs_ms: f64,
    pub level_search_ms: f64,
    pub solve_ms: f64,
}

impl RunReport {
    pub fn to_jsonl(&self) -> String {
        let mut s = serde_json::to_string(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let base: Vec<String> = self.base.iter().map(u32::to_string).collect();
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(": ");
            s.push_str(&v);
            s.push('\n');
        };
        line("input", self.input.clone());
        line("n", self.n.to_string());
        line("m", self.m.to_string());
        line("group_order", self.group_order.clone());
        line("generator_count", self.generator_count.to_string());
        line("generators", self.generators.join("; "));
        line("base", base.join(" "));
        line("termination", self.termination.clone());
        line("threads", self.threads.to_string());
        line("seed", self.seed.to_string());
        line("epsilon", self.epsilon.to_string());
        line("permuted", self.permuted.to_string());
        line("walks", self.walks.to_string());
        line("nodes_expanded", self.nodes_expanded.to_string());
        line("parse_ms", self.parse_ms.to_string());
        line("base_aligned_ms", self.base_aligned_ms.to_string());
        line("bfs_ms", self.bfs_ms.to_string());
        line("level_search_ms", self.level_search_ms.to_string());
        line("solve_ms", self.solve_ms.to_string());
        s
    }

    /// Inverse of [`RunReport::to_human`].
    pub fn from_human(text: &str) -> Result<Self, String> {
        let mut map = serde_json::Map::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once(": ")
                .or_else(|| line.strip_suffix(':').map(|k| (k, "")))
                .ok_or(format!("bad line {line:?}"))?;
            let value = match k {
                "input" | "group_order" | "termination" => serde_json::Value::String(v.to_string()),
                "generators" => {
                    let gens: Vec<serde_json::Value> = if v.is_empty() {
                        Vec::new()
                    } else {
                        v.split("; ")
                            .map(|g| serde_json::Value::String(g.to_string()))
                            .collect()
                    };
                    serde_json::Value::Array(gens)
                }
                "base" => serde_json::Value::Array(
                    v.split_whitespace()
                        .map(|b| b.parse::<u32>().map(Into::into).map_err(|e| e.to_string()))
                        .collect::<Result<_, _>>()?,
                ),
                _ => serde_json::from_str(v).map_err(|e| format!("{k}: {e}"))?,
            };
            map.insert(k.to_string(), value);
        }
        serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        RunReport {
            input: "k3.dimacs".into(),
            n: 3,
            m: 3,
            group_order: "6".into(),
            generator_count: 2,
            generators: vec!["(1 2)".into(), "(2 3)".into()],
            base: vec![1, 2],
            termination: "deterministic".into(),
            threads: 1,
            seed: 7,
            epsilon: 0.01,
            permuted: false,
            walks: 4,
            nodes_expanded: 0,
            parse_ms: 0.012,
            base_aligned_ms: 0.1,
            bfs_ms: 0.0,
            level_search_ms: 0.0,
            solve_ms: 0.25,
        }
    }

    #[test]
    fn human_round_trip() {
        let r = sample();
        assert_eq!(RunReport::from_human(&r.to_human()).unwrap(), r);
    }

    #[test]
    fn empty_generators_round_trip() {
        let r = RunReport {
            generators: vec![],
            generator_count: 0,
            base: vec![],
            ..sample()
        };
        assert_eq!(RunReport::from_human(&r.to_human()).unwrap(), r);
    }

    #[test]
    fn jsonl_is_one_line() {
        let s = sample().to_jsonl();
        assert_eq!(s.lines().count(), 1);
        let back: RunReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sample());
    }
}
