use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Behaviour, SimError};
use crate::geom::{Paddock, Vec2};

/// Shipped simulator defaults.
pub const DEFAULTS_KBXSIM: &str = include_str!("../../data/defaults.kbxsim");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheepParams {
    pub r_dog: f64,
    pub r_agent: f64,
    pub n_neighbours: usize,
    pub w_repel_dog: f64,
    pub w_attract_lcm: f64,
    pub w_repel_sheep: f64,
    pub w_inertia: f64,
    pub w_noise: f64,
    pub v_sheep: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DogParams {
    pub v_dog: f64,
    pub d_drive: f64,
    pub d_collect: f64,
    pub approach_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub paddock: Paddock,
    pub goal: Vec2,
    pub goal_radius: f64,
    pub n_sheep: usize,
    pub seed: u64,
    pub max_steps: u64,
    pub sheep: SheepParams,
    pub dog: DogParams,
    pub behaviours_allowed: BTreeSet<Behaviour>,
}

impl SimConfig {
    /// Flock-cohesion threshold `r_agent · N^(2/3)`.
    pub fn cohesion_radius(&self) -> f64 {
        self.sheep.r_agent * (self.n_sheep as f64).powf(2.0 / 3.0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |what: &str| Err(SimError::InvalidConfig(what.to_string()));
        let s = &self.sheep;
        let d = &self.dog;
        let positive = [
            ("paddock width", self.paddock.width),
            ("paddock height", self.paddock.height),
            ("goal_radius", self.goal_radius),
            ("r_dog", s.r_dog),
            ("r_agent", s.r_agent),
            ("w_repel_dog", s.w_repel_dog),
            ("w_attract_lcm", s.w_attract_lcm),
            ("w_repel_sheep", s.w_repel_sheep),
            ("w_inertia", s.w_inertia),
            ("v_sheep", s.v_sheep),
            ("v_dog", d.v_dog),
            ("d_drive", d.d_drive),
            ("d_collect", d.d_collect),
            ("approach_gap", d.approach_gap),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(s.w_noise.is_finite() && s.w_noise >= 0.0) {
            return bad("w_noise must be non-negative");
        }
        if d.v_dog <= s.v_sheep {
            return bad("v_dog must exceed v_sheep");
        }
        if s.n_neighbours == 0 {
            return bad("n_neighbours must be at least 1");
        }
        if self.n_sheep == 0 {
            return bad("N must be at least 1");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        if !self.goal.is_finite() || !self.paddock.contains(self.goal) {
            return bad("goal must lie inside the paddock");
        }
        Ok(())
    }
}

/// A numeric default, possibly scaled by the flock size: a product of
/// numbers, `N`, `sqrt(N)`, and other keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr(Vec<Factor>);

#[derive(Debug, Clone, PartialEq)]
enum Factor {
    Number(f64),
    N,
    SqrtN,
    Key(String),
}

impl Expr {
    fn parse(text: &str) -> Option<Expr> {
        let factors = text
            .split('*')
            .map(|f| {
                let f = f.trim();
                match f {
                    "N" => Some(Factor::N),
                    "sqrt(N)" => Some(Factor::SqrtN),
                    _ => match f.parse::<f64>() {
                        Ok(x) if x.is_finite() => Some(Factor::Number(x)),
                        _ if KEYS.contains(&f) => Some(Factor::Key(f.to_string())),
                        _ => None,
                    },
                }
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Expr(factors))
    }

    fn eval(&self, n: usize, values: &BTreeMap<String, Expr>, depth: usize) -> Result<f64, SimError> {
        if depth > KEYS.len() {
            return Err(SimError::Defaults {
                line: 0,
                reason: "circular reference between keys".into(),
            });
        }
        let mut acc = 1.0;
        for f in &self.0 {
            acc *= match f {
                Factor::Number(x) => *x,
                Factor::N => n as f64,
                Factor::SqrtN => (n as f64).sqrt(),
                Factor::Key(k) => values[k].eval(n, values, depth + 1)?,
            };
        }
        Ok(acc)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|x| match x {
                Factor::Number(v) => format!("{v}"),
                Factor::N => "N".into(),
                Factor::SqrtN => "sqrt(N)".into(),
                Factor::Key(k) => k.clone(),
            })
            .collect();
        f.write_str(&parts.join(" * "))
    }
}

const KEYS: [&str; 23] = [
    "paddock_width",
    "paddock_height",
    "goal_x",
    "goal_y",
    "goal_radius",
    "n_sheep",
    "seed",
    "max_steps",
    "r_dog",
    "r_agent",
    "n_neighbours",
    "w_repel_dog",
    "w_attract_lcm",
    "w_repel_sheep",
    "w_inertia",
    "w_noise",
    "v_sheep",
    "v_dog",
    "d_drive",
    "d_collect",
    "approach_gap",
    "behaviours",
    "frame_interval_ms",
];

/// Parsed `defaults.kbxsim`: `key = value` lines with `#` comments.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDefaults {
    values: BTreeMap<String, Expr>,
    behaviours: BTreeSet<Behaviour>,
}

impl SimDefaults {
    pub fn parse(text: &str) -> Result<SimDefaults, SimError> {
        let mut values = BTreeMap::new();
        let mut behaviours = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let err = |reason: String| SimError::Defaults { line, reason };
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(err(format!("unknown key `{k}`")));
            }
            if values.contains_key(k) || (k == "behaviours" && behaviours.is_some()) {
                return Err(err(format!("`{k}` given twice")));
            }
            if k == "behaviours" {
                let set = v
                    .split(',')
                    .map(|b| Behaviour::parse_allowed(b.trim()).ok_or_else(|| err(format!("unknown behaviour `{}`", b.trim()))))
                    .collect::<Result<BTreeSet<_>, _>>()?;
                behaviours = Some(set);
                continue;
            }
            let e = Expr::parse(v).ok_or_else(|| err(format!("bad value `{v}`")))?;
            values.insert(k.to_string(), e);
        }
        for k in KEYS {
            if k != "behaviours" && !values.contains_key(k) {
                return Err(SimError::Defaults {
                    line: 0,
                    reason: format!("missing key `{k}`"),
                });
            }
        }
        let behaviours = behaviours.ok_or(SimError::Defaults {
            line: 0,
            reason: "missing key `behaviours`".into(),
        })?;
        Ok(SimDefaults { values, behaviours })
    }

    pub fn shipped() -> SimDefaults {
        SimDefaults::parse(DEFAULTS_KBXSIM).expect("shipped defaults parse")
    }

    fn get(&self, key: &str, n: usize) -> Result<f64, SimError> {
        self.values[key].eval(n, &self.values, 0)
    }

    fn get_int(&self, key: &str, n: usize) -> Result<u64, SimError> {
        let v = self.get(key, n)?;
        if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
            return Err(SimError::InvalidConfig(format!("{key} must be a non-negative integer")));
        }
        Ok(v as u64)
    }

    /// Overrides one key; `value` uses the same syntax as the file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SimError> {
        let err = |reason: String| SimError::Defaults { line: 0, reason };
        if !KEYS.contains(&key) || key == "behaviours" {
            return Err(err(format!("cannot set `{key}`")));
        }
        let e = Expr::parse(value).ok_or_else(|| err(format!("bad value `{value}`")))?;
        self.values.insert(key.to_string(), e);
        Ok(())
    }

    pub fn frame_interval_ms(&self) -> u64 {
        self.get_int("frame_interval_ms", 0).unwrap_or(0)
    }

    /// Builds a full config using the file's own goal, flock size and seed.
    pub fn config(&self) -> Result<SimConfig, SimError> {
        let n = self.get_int("n_sheep", 0)? as usize;
        self.config_for(n)
    }

    /// Builds a config for a flock of `n`; scaled values use this `n`.
    pub fn config_for(&self, n: usize) -> Result<SimConfig, SimError> {
        let g = |k: &str| self.get(k, n);
        let cfg = SimConfig {
            paddock: Paddock {
                width: g("paddock_width")?,
                height: g("paddock_height")?,
            },
            goal: Vec2::new(g("goal_x")?, g("goal_y")?),
            goal_radius: g("goal_radius")?,
            n_sheep: n,
            seed: self.get_int("seed", n)?,
            max_steps: self.get_int("max_steps", n)?,
            sheep: SheepParams {
                r_dog: g("r_dog")?,
                r_agent: g("r_agent")?,
                n_neighbours: self.get_int("n_neighbours", n)? as usize,
                w_repel_dog: g("w_repel_dog")?,
                w_attract_lcm: g("w_attract_lcm")?,
                w_repel_sheep: g("w_repel_sheep")?,
                w_inertia: g("w_inertia")?,
                w_noise: g("w_noise")?,
                v_sheep: g("v_sheep")?,
            },
            dog: DogParams {
                v_dog: g("v_dog")?,
                d_drive: g("d_drive")?,
                d_collect: g("d_collect")?,
                approach_gap: g("approach_gap")?,
            },
            behaviours_allowed: self.behaviours.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_defaults_parse() {
        let cfg = SimDefaults::shipped().config().unwrap();
        assert_eq!(cfg.paddock, Paddock { width: 50.0, height: 50.0 });
        assert_eq!(cfg.n_sheep, 20);
        assert_eq!(cfg.sheep.r_agent, 2.0);
        assert!(cfg.behaviours_allowed.contains(&Behaviour::Drive));
    }

    #[test]
    fn scaled_values_follow_n() {
        let mut d = SimDefaults::shipped();
        d.set("d_drive", "2 * sqrt(N) * r_agent").unwrap();
        let cfg = d.config_for(16).unwrap();
        assert_eq!(cfg.dog.d_drive, 16.0);
    }

    #[test]
    fn cohesion_radius_for_eight() {
        let mut cfg = SimDefaults::shipped().config().unwrap();
        cfg.n_sheep = 8;
        assert!((cfg.cohesion_radius() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_and_missing_keys() {
        assert!(matches!(
            SimDefaults::parse("speed = 3\n"),
            Err(SimError::Defaults { line: 1, .. })
        ));
        assert!(matches!(
            SimDefaults::parse("r_dog = 3\n"),
            Err(SimError::Defaults { line: 0, .. })
        ));
        let dup = format!("{DEFAULTS_KBXSIM}r_dog = 3\n");
        assert!(SimDefaults::parse(&dup).is_err());
    }

    #[test]
    fn slow_dog_is_invalid() {
        let mut d = SimDefaults::shipped();
        d.set("v_dog", "0.5").unwrap();
        assert!(matches!(d.config(), Err(SimError::InvalidConfig(_))));
    }
}
