//! Binding enumeration, enabledness, firing, the tick clock and run
//! statistics.
//!
//! All mutation flows through one logical writer: token moves rewrite
//! `ldp:contains` triples, and bookkeeping (clock value, last-move ticks)
//! lives under the reserved `spnx:` predicates in the same graph so queries
//! can see it.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    eval_rule_bool, eval_rule_tokens, vocab, ArcDef, Rule, RuleError, RuleEvalOptions, RuleTrace,
    SpnModel, TransitionDef,
};
use crate::rdf::{Graph, Term, Triple};
use crate::runtime::config::EngineConfig;
use crate::runtime::events::{FiringRecord, RunStats, TickReport};
use crate::runtime::marking::Marking;
use crate::sparql::{self, parse_sparql, EvalError, QueryForm, QueryResult, Solution,
    SparqlParseError};

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("stale binding for {transition}: no longer enabled when fired")]
    StaleBinding { transition: Term },
    #[error("color rule of {place} rejects token {token}")]
    ColorViolation { place: Term, token: Term },
    #[error("token {token} already present in destination {place}")]
    DuplicateToken { place: Term, token: Term },
    #[error("token {token} appears in more than one place ({places:?})")]
    SharedToken { token: Term, places: Vec<Term> },
    #[error("firing cap of {cap} exceeded within one tick")]
    TickLimitExceeded { cap: u64 },
    #[error("transition {transition} arg {arg} has no candidate source")]
    UnboundArg { transition: Term, arg: String },
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    QueryParse(#[from] SparqlParseError),
    #[error(transparent)]
    QueryEval(#[from] EvalError),
}

/// An assignment of a term to every declared argument of a transition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransitionBinding {
    pub transition: Term,
    /// Arg name (with `?`) to term.
    pub assignment: BTreeMap<String, Term>,
}

impl TransitionBinding {
    /// The assignment as query pre-bindings (bare variable names).
    pub fn solution(&self) -> Solution {
        self.assignment
            .iter()
            .map(|(name, term)| {
                let bare = name.strip_prefix('?').unwrap_or(name);
                (bare.to_string(), term.clone())
            })
            .collect()
    }

    pub fn label(&self) -> String {
        let mut out = self.transition.to_string();
        for (name, term) in &self.assignment {
            out.push_str(&format!(" {name}={term}"));
        }
        out
    }
}

/// What a firing would consume and produce, per (place, token).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FiringPlan {
    pub consumed: Vec<(Term, Term)>,
    pub produced: Vec<(Term, Term)>,
}

/// Candidate bindings for a transition against the current graph, in
/// canonical order (sorted by arg name, then term order) and duplicate-free.
///
/// Candidates come from tokens in places behind the transition's input
/// arcs, filtered by the arg's allowed types; args carried only by output
/// arcs draw candidates from those arcs' SELECT expressions.
pub(crate) fn enumerate_bindings_in(
    model: &SpnModel,
    graph: &Graph,
    transition: &TransitionDef,
    opts: RuleEvalOptions,
    trace: &mut RuleTrace,
) -> Result<Vec<TransitionBinding>, RuntimeError> {
    let contains = vocab::ldp_contains();
    let rdf_type = vocab::rdf_type();
    let mut per_arg: Vec<(String, Vec<Term>)> = Vec::new();

    for arg in &transition.args {
        let mut candidates: BTreeSet<Term> = BTreeSet::new();
        let mut sourced = false;
        for arc in model.input_arcs(&transition.iri) {
            if arc.read_only || !arc.args.iter().any(|a| a.name == arg.name) {
                continue;
            }
            sourced = true;
            candidates.extend(graph.objects(&arc.place, &contains).cloned());
        }
        if !sourced {
            for arc in model.output_arcs(&transition.iri) {
                if !arc.args.iter().any(|a| a.name == arg.name) {
                    continue;
                }
                let Some(expr) = arc.expr.as_ref() else {
                    continue;
                };
                let Rule::Sparql(leaf) = expr else {
                    continue;
                };
                let QueryForm::Select { vars, .. } = &leaf.query.form else {
                    continue;
                };
                if vars.first().map(String::as_str) != Some(arg.bare_name()) {
                    continue;
                }
                sourced = true;
                candidates.extend(eval_rule_tokens(
                    expr,
                    graph,
                    &Solution::new(),
                    &arc.iri,
                    opts,
                    trace,
                )?);
            }
        }
        if !sourced {
            return Err(RuntimeError::UnboundArg {
                transition: transition.iri.clone(),
                arg: arg.name.clone(),
            });
        }
        if !arg.allowed_types.is_empty() {
            candidates.retain(|tok| {
                arg.allowed_types.iter().any(|ty| {
                    graph.contains(&Triple::new(tok.clone(), rdf_type.clone(), ty.clone()))
                })
            });
        }
        per_arg.push((arg.name.clone(), candidates.into_iter().collect()));
    }

    // Cartesian product in arg-name order; inputs are sorted, so the output
    // is lexicographic.
    let mut bindings = vec![BTreeMap::new()];
    for (name, candidates) in &per_arg {
        let mut next = Vec::with_capacity(bindings.len() * candidates.len());
        for partial in &bindings {
            for token in candidates {
                let mut assignment: BTreeMap<String, Term> = partial.clone();
                assignment.insert(name.clone(), token.clone());
                next.push(assignment);
            }
        }
        bindings = next;
    }
    Ok(bindings
        .into_iter()
        .map(|assignment| TransitionBinding {
            transition: transition.iri.clone(),
            assignment,
        })
        .collect())
}

/// Pure-net firing plan: guard plus arc-expression token selection. `None`
/// when the guard is false or some selected token is missing from its
/// place. Engine constraints (quotas, caps, spacing) are checked by the
/// runtime on top of this.
pub(crate) fn compute_plan(
    model: &SpnModel,
    graph: &Graph,
    transition: &TransitionDef,
    binding: &TransitionBinding,
    opts: RuleEvalOptions,
    trace: &mut RuleTrace,
) -> Result<Option<FiringPlan>, RuleError> {
    compute_plan_with(model, graph, transition, binding, opts, trace, true)
}

/// As `compute_plan`, but optionally skipping the token-presence check:
/// tabulation plans consumption symbolically and leaves presence to the
/// table semantics.
#[allow(clippy::too_many_arguments)]
pub(crate) fn compute_plan_with(
    model: &SpnModel,
    graph: &Graph,
    transition: &TransitionDef,
    binding: &TransitionBinding,
    opts: RuleEvalOptions,
    trace: &mut RuleTrace,
    require_present: bool,
) -> Result<Option<FiringPlan>, RuleError> {
    let bound = binding.solution();
    if let Some(guard) = &transition.guard {
        if !eval_rule_bool(guard, graph, &bound, &transition.iri, opts, trace)? {
            return Ok(None);
        }
    }

    let contains = vocab::ldp_contains();
    let mut consumed: BTreeSet<(Term, Term)> = BTreeSet::new();
    for arc in model.input_arcs(&transition.iri) {
        if arc.read_only {
            continue;
        }
        let tokens = arc_tokens(arc, graph, &bound, opts, trace)?;
        for tok in tokens {
            if require_present {
                let present = graph.contains(&Triple::new(
                    arc.place.clone(),
                    contains.clone(),
                    tok.clone(),
                ));
                if !present {
                    return Ok(None);
                }
            }
            consumed.insert((arc.place.clone(), tok));
        }
    }

    let mut produced: BTreeSet<(Term, Term)> = BTreeSet::new();
    for arc in model.output_arcs(&transition.iri) {
        if arc.read_only {
            continue;
        }
        for tok in arc_tokens(arc, graph, &bound, opts, trace)? {
            produced.insert((arc.place.clone(), tok));
        }
    }

    Ok(Some(FiringPlan {
        consumed: consumed.into_iter().collect(),
        produced: produced.into_iter().collect(),
    }))
}

/// Tokens an arc selects under a binding: its expression's result, or the
/// single bound argument when the expression is absent.
fn arc_tokens(
    arc: &ArcDef,
    graph: &Graph,
    bound: &Solution,
    opts: RuleEvalOptions,
    trace: &mut RuleTrace,
) -> Result<BTreeSet<Term>, RuleError> {
    match &arc.expr {
        Some(expr) => eval_rule_tokens(expr, graph, bound, &arc.iri, opts, trace),
        None => {
            let arg = arc.args.first().expect("validated: exactly one arg");
            let mut set = BTreeSet::new();
            if let Some(term) = bound.get(arg.bare_name()) {
                set.insert(term.clone());
            }
            Ok(set)
        }
    }
}

/// Color acceptance of a token in a place, when a color rule is declared.
pub(crate) fn color_accepts(
    model: &SpnModel,
    graph: &Graph,
    place: &Term,
    token: &Term,
    opts: RuleEvalOptions,
    trace: &mut RuleTrace,
) -> Result<bool, RuleError> {
    let Some(def) = model.places.get(place) else {
        return Ok(true);
    };
    let Some(rule) = &def.color_rule else {
        return Ok(true);
    };
    let bound = Solution::new().bind("TOKEN", token.clone());
    eval_rule_bool(rule, graph, &bound, place, opts, trace)
}

/// True when any rule in the model reads the clock predicate; such models
/// can wake up on a later tick even when currently quiescent.
pub(crate) fn model_reads_clock(model: &SpnModel) -> bool {
    let tick = vocab::tick();
    let reads = |rule: &Option<Rule>| rule.as_ref().is_some_and(|r| rule_reads_predicate(r, &tick));
    model.transitions.values().any(|t| reads(&t.guard))
        || model
            .places
            .values()
            .any(|p| reads(&p.color_rule) || reads(&p.init_rule))
        || model.arcs.values().any(|a| reads(&a.expr))
}

fn rule_reads_predicate(rule: &Rule, pred: &Term) -> bool {
    match rule {
        Rule::Sparql(leaf) => leaf.query.pattern.patterns.iter().any(|p| match &p.predicate {
            sparql::Predicate::Single(sparql::PatternTerm::Term(t)) => t == pred,
            sparql::Predicate::Single(sparql::PatternTerm::Var(_)) => true,
            sparql::Predicate::Path(steps) => steps.iter().any(|s| s == pred),
        }),
        Rule::Constant(_) => false,
        Rule::Compound { subs, .. } => subs.iter().any(|s| rule_reads_predicate(s, pred)),
        Rule::Condition {
            condition,
            then_rule,
            else_rule,
        } => [condition, then_rule, else_rule]
            .iter()
            .any(|r| rule_reads_predicate(r, pred)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClockState {
    /// Days elapsed since the run started.
    pub current_tick: u64,
}

/// The executable net: owns the model (and through it the graph), applies
/// firings, advances the clock and keeps statistics.
#[derive(Debug)]
pub struct Runtime {
    model: SpnModel,
    config: EngineConfig,
    clock: ClockState,
    stats: RunStats,
    events: Vec<FiringRecord>,
    fires_this_tick: BTreeMap<Term, u64>,
    rule_opts: RuleEvalOptions,
}

impl Runtime {
    pub fn new(model: SpnModel, config: EngineConfig) -> Self {
        let config = config.with_model_annotations(&model);
        let mut runtime = Runtime {
            model,
            config,
            clock: ClockState::default(),
            stats: RunStats::default(),
            events: Vec::new(),
            fires_this_tick: BTreeMap::new(),
            rule_opts: RuleEvalOptions::default(),
        };
        runtime.write_clock_triple();
        runtime
    }

    pub fn model(&self) -> &SpnModel {
        &self.model
    }

    pub fn graph(&self) -> &Graph {
        &self.model.graph
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn clock(&self) -> ClockState {
        self.clock
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn events(&self) -> &[FiringRecord] {
        &self.events
    }

    pub fn marking(&self) -> Marking {
        Marking::from_graph(&self.model.graph, &self.model)
    }

    fn write_clock_triple(&mut self) {
        let clock = vocab::clock_node();
        let tick = vocab::tick();
        let old: Vec<Triple> = self
            .model
            .graph
            .match_triples(Some(&clock), Some(&tick), None)
            .into_iter()
            .collect();
        for t in old {
            self.model.graph.remove(&t);
        }
        self.model.graph.insert(Triple::new(
            clock,
            tick,
            Term::integer(self.clock.current_tick as i64),
        ));
    }

    fn set_last_move(&mut self, token: &Term, tick: u64) {
        let pred = vocab::last_move_tick();
        let old: Vec<Triple> = self
            .model
            .graph
            .match_triples(Some(token), Some(&pred), None)
            .into_iter()
            .collect();
        for t in old {
            self.model.graph.remove(&t);
        }
        self.model
            .graph
            .insert(Triple::new(token.clone(), pred, Term::integer(tick as i64)));
    }

    fn last_move(&self, token: &Term) -> Option<u64> {
        self.model
            .graph
            .object(token, &vocab::last_move_tick())
            .and_then(Term::as_integer)
            .map(|n| n.max(0) as u64)
    }

    fn absorb(&mut self, trace: RuleTrace) {
        self.stats.leaf_rule_checks += trace.leaf_evals;
    }

    /// Evaluates init rules and materializes their tokens as containment
    /// triples. Places without an init rule keep whatever containment the
    /// input graph declared.
    pub fn init_marking(&mut self) -> Result<Marking, RuntimeError> {
        let contains = vocab::ldp_contains();
        let place_iris: Vec<Term> = self.model.places.keys().cloned().collect();
        for place in &place_iris {
            let Some(rule) = self.model.places[place].init_rule.clone() else {
                continue;
            };
            let mut trace = RuleTrace::default();
            let tokens = eval_rule_tokens(
                &rule,
                &self.model.graph,
                &Solution::new(),
                place,
                self.rule_opts,
                &mut trace,
            )?;
            self.absorb(trace);
            for tok in tokens {
                self.model
                    .graph
                    .insert(Triple::new(place.clone(), contains.clone(), tok));
            }
        }

        if self.config.strict_color_check {
            for place in &place_iris {
                let tokens: Vec<Term> = self
                    .model
                    .graph
                    .objects(place, &contains)
                    .cloned()
                    .collect();
                for tok in tokens {
                    let mut trace = RuleTrace::default();
                    let ok = color_accepts(
                        &self.model,
                        &self.model.graph,
                        place,
                        &tok,
                        self.rule_opts,
                        &mut trace,
                    )?;
                    self.absorb(trace);
                    if !ok {
                        return Err(RuntimeError::ColorViolation {
                            place: place.clone(),
                            token: tok,
                        });
                    }
                }
            }
        }

        let marking = self.marking();
        if !self.config.allow_shared_tokens {
            if let Some((token, places)) = marking.shared_tokens().into_iter().next() {
                return Err(RuntimeError::SharedToken { token, places });
            }
        }
        Ok(marking)
    }

    pub fn enumerate_bindings(
        &mut self,
        transition: &Term,
    ) -> Result<Vec<TransitionBinding>, RuntimeError> {
        let Some(t) = self.model.transitions.get(transition).cloned() else {
            return Ok(Vec::new());
        };
        let mut trace = RuleTrace::default();
        let result =
            enumerate_bindings_in(&self.model, &self.model.graph, &t, self.rule_opts, &mut trace);
        self.absorb(trace);
        result
    }

    /// Full enabledness check: guard and token availability, then the
    /// engine constraints (destination caps, per-tick quota, move spacing).
    /// Every call evaluates the guard exactly once and counts one rule
    /// check.
    fn check(&mut self, binding: &TransitionBinding) -> Result<Option<FiringPlan>, RuntimeError> {
        let Some(t) = self.model.transitions.get(&binding.transition).cloned() else {
            return Ok(None);
        };
        self.stats.rule_checks += 1;
        let mut trace = RuleTrace::default();
        let plan = compute_plan(
            &self.model,
            &self.model.graph,
            &t,
            binding,
            self.rule_opts,
            &mut trace,
        );
        self.absorb(trace);
        let Some(plan) = plan? else {
            return Ok(None);
        };

        // Per-tick quota.
        if let Some(max) = self.config.max_fires_per_tick.get(&t.iri) {
            let so_far = self.fires_this_tick.get(&t.iri).copied().unwrap_or(0);
            if so_far >= *max {
                return Ok(None);
            }
        }

        // Destination caps, accounting for tokens this firing removes.
        let contains = vocab::ldp_contains();
        let dests: BTreeSet<&Term> = plan.produced.iter().map(|(p, _)| p).collect();
        for place in dests {
            let Some(cap) = self.config.max_tokens_per_place.get(place) else {
                continue;
            };
            let mut after: BTreeSet<Term> =
                self.model.graph.objects(place, &contains).cloned().collect();
            for (p, tok) in &plan.consumed {
                if p == place {
                    after.remove(tok);
                }
            }
            for (p, tok) in &plan.produced {
                if p == place {
                    after.insert(tok.clone());
                }
            }
            if after.len() as u64 > *cap {
                return Ok(None);
            }
        }

        // Minimum tick spacing for every consumed token.
        if let Some(min) = self.config.min_ticks_between_moves {
            for (_, tok) in &plan.consumed {
                if let Some(last) = self.last_move(tok) {
                    if self.clock.current_tick.saturating_sub(last) < min {
                        return Ok(None);
                    }
                }
            }
        }

        Ok(Some(plan))
    }

    pub fn is_enabled(&mut self, binding: &TransitionBinding) -> Result<bool, RuntimeError> {
        Ok(self.check(binding)?.is_some())
    }

    /// Fires a binding. Enabledness is re-verified atomically: if another
    /// firing consumed a needed token since enumeration, this fails with
    /// `StaleBinding` and changes nothing. All violations are detected
    /// before the first triple is touched.
    pub fn fire(&mut self, binding: &TransitionBinding) -> Result<FiringRecord, RuntimeError> {
        let Some(plan) = self.check(binding)? else {
            return Err(RuntimeError::StaleBinding {
                transition: binding.transition.clone(),
            });
        };

        let contains = vocab::ldp_contains();
        let consumed_set: BTreeSet<(Term, Term)> = plan.consumed.iter().cloned().collect();
        // Set semantics: producing a token already in the destination is an
        // authoring error unless downgraded to a no-op.
        let mut applied_produced: Vec<(Term, Term)> = Vec::new();
        for (place, tok) in &plan.produced {
            let stays = self.model.graph.contains(&Triple::new(
                place.clone(),
                contains.clone(),
                tok.clone(),
            )) && !consumed_set.contains(&(place.clone(), tok.clone()));
            if stays {
                if self.config.duplicate_production_is_error {
                    return Err(RuntimeError::DuplicateToken {
                        place: place.clone(),
                        token: tok.clone(),
                    });
                }
                continue;
            }
            applied_produced.push((place.clone(), tok.clone()));
        }

        if self.config.strict_color_check {
            for (place, tok) in &applied_produced {
                let mut trace = RuleTrace::default();
                let ok = color_accepts(
                    &self.model,
                    &self.model.graph,
                    place,
                    tok,
                    self.rule_opts,
                    &mut trace,
                )?;
                self.absorb(trace);
                if !ok {
                    return Err(RuntimeError::ColorViolation {
                        place: place.clone(),
                        token: tok.clone(),
                    });
                }
            }
        }

        // Past this point nothing can fail; apply everything.
        for (place, tok) in &plan.consumed {
            self.model.graph.remove(&Triple::new(
                place.clone(),
                contains.clone(),
                tok.clone(),
            ));
        }
        for (place, tok) in &applied_produced {
            self.model.graph.insert(Triple::new(
                place.clone(),
                contains.clone(),
                tok.clone(),
            ));
        }
        let moved: BTreeSet<Term> = plan
            .consumed
            .iter()
            .map(|(_, t)| t.clone())
            .chain(applied_produced.iter().map(|(_, t)| t.clone()))
            .collect();
        let tick = self.clock.current_tick;
        for tok in &moved {
            self.set_last_move(tok, tick);
        }

        *self
            .fires_this_tick
            .entry(binding.transition.clone())
            .or_insert(0) += 1;
        self.stats.firings += 1;
        *self
            .stats
            .per_transition_firings
            .entry(binding.transition.clone())
            .or_insert(0) += 1;

        let record = FiringRecord {
            tick,
            transition: binding.transition.clone(),
            binding: binding.assignment.clone(),
            consumed: plan.consumed,
            produced: applied_produced,
        };
        self.events.push(record.clone());
        Ok(record)
    }

    /// One clock tick: sweep all transitions in canonical order, firing
    /// every binding enabled at the moment of its check, until a full sweep
    /// fires nothing; then advance the clock.
    pub fn step_tick(&mut self) -> Result<TickReport, RuntimeError> {
        let checks_before = self.stats.rule_checks;
        let mut tick_firings = 0u64;
        let mut sweep_index = 0u64;
        loop {
            let mut order: Vec<Term> = self.model.transitions.keys().cloned().collect();
            if self.config.shuffle_sweeps {
                // Seeded per (run seed, tick, sweep), so the whole schedule
                // is a pure function of the configuration.
                let mut seed_bytes = [0u8; 32];
                seed_bytes[..8].copy_from_slice(&self.config.scheduler_seed.to_le_bytes());
                seed_bytes[8..16].copy_from_slice(&self.clock.current_tick.to_le_bytes());
                seed_bytes[16..24].copy_from_slice(&sweep_index.to_le_bytes());
                let mut rng = ChaCha8Rng::from_seed(seed_bytes);
                order.shuffle(&mut rng);
            }
            let mut sweep_firings = 0u64;
            for t_iri in order {
                let bindings = self.enumerate_bindings(&t_iri)?;
                for binding in bindings {
                    match self.fire(&binding) {
                        Ok(_) => {
                            sweep_firings += 1;
                            tick_firings += 1;
                            if tick_firings > self.config.tick_firing_cap {
                                return Err(RuntimeError::TickLimitExceeded {
                                    cap: self.config.tick_firing_cap,
                                });
                            }
                        }
                        // Enabled-when-enumerated bindings can go stale as
                        // earlier firings consume their tokens; skip them.
                        Err(RuntimeError::StaleBinding { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            if sweep_firings == 0 {
                break;
            }
            sweep_index += 1;
        }

        self.clock.current_tick += 1;
        self.stats.ticks_elapsed += 1;
        self.write_clock_triple();
        self.fires_this_tick.clear();

        Ok(TickReport {
            firings: tick_firings,
            rule_checks: self.stats.rule_checks - checks_before,
            quiescent: tick_firings == 0,
        })
    }

    /// Initializes the marking, then ticks until `max_ticks` or global
    /// quiescence. Quiescence only ends the run early when no rule reads
    /// the clock and no time-based constraint is configured; otherwise a
    /// quiet day may be followed by an active one.
    pub fn run(&mut self) -> Result<RunStats, RuntimeError> {
        let started = Instant::now();
        self.init_marking()?;
        let time_dependent =
            self.config.time_dependent_constraints() || model_reads_clock(&self.model);
        while self.clock.current_tick < self.config.max_ticks {
            let report = self.step_tick()?;
            if report.quiescent && !time_dependent {
                break;
            }
        }
        let marking = self.marking();
        self.stats.per_place_final_tokens = marking
            .places
            .iter()
            .map(|(p, toks)| (p.clone(), toks.len() as u64))
            .collect();
        self.stats.wall_time = started.elapsed();
        Ok(self.stats.clone())
    }

    /// Ad-hoc query over the live graph: domain facts, current containment
    /// and bookkeeping in one view.
    pub fn query_state(&self, text: &str) -> Result<QueryResult, RuntimeError> {
        let query = parse_sparql(text, self.model.graph.prefixes())?;
        Ok(sparql::eval(&query, &self.model.graph, &Solution::new())?)
    }

    /// Full state snapshot (domain, marking, bookkeeping) as Turtle.
    pub fn snapshot_turtle(&self) -> String {
        crate::rdf::serialize_turtle(&self.model.graph)
    }
}
