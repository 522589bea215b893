//! Campaign configuration, read from a single TOML file.

use std::fmt;
use std::path::Path;

use cmcsplit::group::LocalAction;
use cmcsplit::linalg::FieldSpec;
use serde::{Deserialize, Serialize};

/// A configuration that cannot be used. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Campaign {
    SupportProjection,
    Resolution,
    Splitting,
    Retraction,
    Fuzz,
}

impl Campaign {
    pub fn is_randomized(self) -> bool {
        matches!(
            self,
            Campaign::Splitting | Campaign::Retraction | Campaign::Fuzz
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComplexSpec {
    /// Ball of radius `r` in the `(q+1)`-regular tree.
    Tree { q: usize, r: usize },
    /// A complex record in JSON.
    File { path: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    /// Automorphisms of a tree ball fixing its centre.
    Automorphisms {
        #[serde(default = "symmetric")]
        local: LocalAction,
    },
    /// Vertex permutations in cycle notation, e.g. `"(1 2)(3 4)"`.
    Generators { generators: Vec<String> },
}

fn symmetric() -> LocalAction {
    LocalAction::Symmetric
}

impl Default for GroupSpec {
    fn default() -> Self {
        GroupSpec::Automorphisms {
            local: LocalAction::Symmetric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevelSpec {
    /// `U[n][x]` fixes the ball of radius `base_radius + n` around `x`
    /// pointwise. Without `depth`, levels are added until all are trivial.
    BallStabilizers {
        #[serde(default = "one")]
        base_radius: usize,
        #[serde(default)]
        depth: Option<usize>,
    },
    /// `levels[n][x]` lists generators of `U[n][x]` in cycle notation.
    Explicit { levels: Vec<Vec<Vec<String>>> },
}

impl Default for LevelSpec {
    fn default() -> Self {
        LevelSpec::BallStabilizers {
            base_radius: 1,
            depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RepSpec {
    Regular,
    /// Permutation representation on the cells of the listed dimensions.
    Permutation {
        cell_dims: Vec<usize>,
    },
    /// One matrix per group generator, rows of decimal strings.
    Explicit {
        matrices: Vec<Vec<Vec<String>>>,
    },
}

impl Default for RepSpec {
    fn default() -> Self {
        RepSpec::Regular
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default = "vertices_cap")]
    pub vertices: usize,
    #[serde(default = "order_cap")]
    pub group_order: usize,
    #[serde(default = "dim_cap")]
    pub rep_dim: usize,
    #[serde(default = "subcomplex_cap")]
    pub subcomplexes: usize,
    #[serde(default = "levels_cap")]
    pub levels: usize,
    #[serde(default = "fixtures_cap")]
    pub fixtures: usize,
}

fn one() -> usize {
    1
}
fn vertices_cap() -> usize {
    200
}
fn order_cap() -> usize {
    5000
}
fn dim_cap() -> usize {
    128
}
fn subcomplex_cap() -> usize {
    2000
}
fn levels_cap() -> usize {
    16
}
fn fixtures_cap() -> usize {
    3
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            vertices: vertices_cap(),
            group_order: order_cap(),
            rep_dim: dim_cap(),
            subcomplexes: subcomplex_cap(),
            levels: levels_cap(),
            fixtures: fixtures_cap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    pub field: FieldSpec,
    pub campaign: Campaign,
    #[serde(default = "one")]
    pub trials: usize,
    pub complex: ComplexSpec,
    #[serde(default)]
    pub group: GroupSpec,
    #[serde(default)]
    pub levels: LevelSpec,
    #[serde(default)]
    pub representation: RepSpec,
    /// Conjugate the representation by a random unimodular matrix per trial.
    #[serde(default)]
    pub random_basis: bool,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub expect_bad_characteristic: bool,
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: CampaignConfig =
            toml::from_str(text).map_err(|e| config_error(e.to_string().trim_end().to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialise")
    }

    pub fn needs_seed(&self) -> bool {
        self.campaign.is_randomized() || self.random_basis
    }

    /// Seed for randomized work; validated to exist by [`CampaignConfig::validate`].
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let caps = &self.caps;
        for (name, value) in [
            ("caps.vertices", caps.vertices),
            ("caps.group_order", caps.group_order),
            ("caps.rep_dim", caps.rep_dim),
            ("caps.subcomplexes", caps.subcomplexes),
            ("caps.levels", caps.levels),
            ("caps.fixtures", caps.fixtures),
            ("trials", self.trials),
        ] {
            if value == 0 {
                return Err(config_error(format!("{name} must be positive")));
            }
        }
        if self.needs_seed() && self.seed.is_none() {
            return Err(config_error(
                "seed is required for randomized campaigns and random_basis",
            ));
        }
        if let LevelSpec::BallStabilizers { depth: Some(0), .. } = self.levels {
            return Err(config_error("levels.depth must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_round_trips() {
        let cfg = CampaignConfig::from_toml(
            "field = \"F7\"\ncampaign = \"resolution\"\n[complex]\nkind = \"tree\"\nq = 2\nr = 1\n",
        )
        .unwrap();
        assert_eq!(cfg.field, FieldSpec::Prime(7));
        assert_eq!(cfg.group, GroupSpec::default());
        cfg.validate().unwrap();
        assert_eq!(CampaignConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = CampaignConfig::from_toml(
            "field = \"Q\"\ncampaign = \"fuzz\"\ntrails = 3\n[complex]\nkind = \"tree\"\nq = 2\nr = 1\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("trails"), "{err}");
    }

    #[test]
    fn randomized_campaigns_need_a_seed() {
        let cfg = CampaignConfig::from_toml(
            "field = \"Q\"\ncampaign = \"splitting\"\n[complex]\nkind = \"tree\"\nq = 2\nr = 1\n",
        )
        .unwrap();
        assert!(cfg.validate().unwrap_err().to_string().contains("seed"));
    }
}
