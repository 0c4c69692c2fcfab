//! Engine-level run configuration.
//!
//! The per-place token caps, per-transition firing quotas and the minimum
//! tick spacing between token moves are engine constraints, not guard
//! conjuncts: they can be set programmatically, through a TOML config file,
//! or as annotations in the reserved `spnx:` namespace on places and
//! transitions.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{vocab, SpnModel};
use crate::rdf::Term;

#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Cap on tokens a place may hold after a firing.
    pub max_tokens_per_place: BTreeMap<Term, u64>,
    /// Cap on how often a transition may fire within one tick.
    pub max_fires_per_tick: BTreeMap<Term, u64>,
    /// Minimum ticks since a token's last move before it may move again.
    pub min_ticks_between_moves: Option<u64>,
    pub scheduler_seed: u64,
    pub max_ticks: u64,
    pub strict_color_check: bool,
    /// Sweep transitions in seeded random order instead of canonical
    /// IRI order. Off by default so runs reproduce without a seed.
    pub shuffle_sweeps: bool,
    /// Producing a token already present in the destination place is an
    /// error by default; clearing this downgrades it to a no-op.
    pub duplicate_production_is_error: bool,
    /// A token may sit in more than one place only when set.
    pub allow_shared_tokens: bool,
    /// Hard cap on firings within a single tick, guarding models that
    /// generate unboundedly.
    pub tick_firing_cap: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_tokens_per_place: BTreeMap::new(),
            max_fires_per_tick: BTreeMap::new(),
            min_ticks_between_moves: None,
            scheduler_seed: 0,
            max_ticks: 90,
            strict_color_check: false,
            shuffle_sweeps: false,
            duplicate_production_is_error: true,
            allow_shared_tokens: false,
            tick_firing_cap: 1_000_000,
        }
    }
}

impl EngineConfig {
    /// Folds in `spnx:` annotations from the model: `spnx:maxTokens` on
    /// places, `spnx:maxFiresPerTick` on transitions and
    /// `spnx:minTicksBetweenMoves` on the clock node. Explicit config
    /// entries win over annotations.
    pub fn with_model_annotations(mut self, model: &SpnModel) -> Self {
        for place in model.places.values() {
            if let Some(n) = place
                .annotations
                .get(&vocab::max_tokens())
                .and_then(Term::as_integer)
            {
                self.max_tokens_per_place
                    .entry(place.iri.clone())
                    .or_insert(n.max(0) as u64);
            }
        }
        for t in model.transitions.values() {
            if let Some(n) = t
                .annotations
                .get(&vocab::max_fires_per_tick())
                .and_then(Term::as_integer)
            {
                self.max_fires_per_tick
                    .entry(t.iri.clone())
                    .or_insert(n.max(0) as u64);
            }
        }
        if self.min_ticks_between_moves.is_none() {
            if let Some(n) = model
                .graph
                .object(&vocab::clock_node(), &vocab::min_ticks_between_moves())
                .and_then(Term::as_integer)
            {
                self.min_ticks_between_moves = Some(n.max(0) as u64);
            }
        }
        self
    }

    /// Whether run progress can depend on the clock value: tick-reading
    /// rules, firing quotas and move spacing all make a currently-quiet
    /// model able to wake up later.
    pub fn time_dependent_constraints(&self) -> bool {
        self.min_ticks_between_moves.is_some() || !self.max_fires_per_tick.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
}

/// TOML shape of the config file; IRIs key the per-node maps.
#[derive(Debug, Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    max_ticks: Option<u64>,
    strict_colors: Option<bool>,
    shuffle_sweeps: Option<bool>,
    min_ticks_between_moves: Option<u64>,
    duplicate_production_is_error: Option<bool>,
    allow_shared_tokens: Option<bool>,
    tick_firing_cap: Option<u64>,
    #[serde(default)]
    max_tokens_per_place: BTreeMap<String, u64>,
    #[serde(default)]
    max_fires_per_tick: BTreeMap<String, u64>,
}

impl EngineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let file: ConfigFile = toml::from_str(text)?;
        let mut config = EngineConfig::default();
        if let Some(v) = file.seed {
            config.scheduler_seed = v;
        }
        if let Some(v) = file.max_ticks {
            config.max_ticks = v;
        }
        if let Some(v) = file.strict_colors {
            config.strict_color_check = v;
        }
        if let Some(v) = file.shuffle_sweeps {
            config.shuffle_sweeps = v;
        }
        if let Some(v) = file.duplicate_production_is_error {
            config.duplicate_production_is_error = v;
        }
        if let Some(v) = file.allow_shared_tokens {
            config.allow_shared_tokens = v;
        }
        if let Some(v) = file.tick_firing_cap {
            config.tick_firing_cap = v;
        }
        config.min_ticks_between_moves = file.min_ticks_between_moves;
        for (iri, n) in file.max_tokens_per_place {
            config.max_tokens_per_place.insert(Term::iri(iri), n);
        }
        for (iri, n) in file.max_fires_per_tick {
            config.max_fires_per_tick.insert(Term::iri(iri), n);
        }
        Ok(config)
    }
}
