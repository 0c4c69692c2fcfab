//! Construction-process scenario: a synthetic building model, per-level
//! discipline phases driven by a schedule, state chains for building
//! objects, and dependency guards (host relations, level containment,
//! schedule windows).

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{load_model, rule_to_rdf, vocab, Rule, SparqlLeaf, SpnModel};
use crate::rdf::{vocab as ns, Graph, Term, Triple};
use crate::runtime::{EngineConfig, Runtime, RuntimeError, RunStats};

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("building spec: {0}")]
    Spec(String),
    #[error("schedule line {line}: {message}")]
    Schedule { line: usize, message: String },
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Load(#[from] crate::model::LoadError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

/// Construction disciplines, in schedule-code form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Discipline {
    Structure,
    Architecture,
    Mep,
}

impl Discipline {
    pub fn code(&self) -> &'static str {
        match self {
            Discipline::Structure => "ST",
            Discipline::Architecture => "AR",
            Discipline::Mep => "MEP",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "ST" => Some(Discipline::Structure),
            "AR" => Some(Discipline::Architecture),
            "MEP" => Some(Discipline::Mep),
            _ => None,
        }
    }

    pub fn all() -> [Discipline; 3] {
        [Discipline::Structure, Discipline::Architecture, Discipline::Mep]
    }
}

/// One schedule row: the work window of a discipline on a level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleEntry {
    /// 1-based level number, matching the generated levels.
    pub level: u32,
    pub discipline: Discipline,
    pub start_tick: u64,
    pub end_tick: u64,
}

/// Parses the delimited schedule: `level,discipline,start,end` per line,
/// `#` comments allowed.
pub fn parse_schedule(text: &str) -> Result<Vec<ScheduleEntry>, CaseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CaseError::Schedule {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields, got {}", fields.len())));
        }
        let level: u32 = fields[0]
            .parse()
            .map_err(|_| err(format!("bad level number '{}'", fields[0])))?;
        let discipline = Discipline::parse(fields[1])
            .ok_or_else(|| err(format!("unknown discipline '{}'", fields[1])))?;
        let start_tick: u64 = fields[2]
            .parse()
            .map_err(|_| err(format!("bad start tick '{}'", fields[2])))?;
        let end_tick: u64 = fields[3]
            .parse()
            .map_err(|_| err(format!("bad end tick '{}'", fields[3])))?;
        if start_tick > end_tick {
            return Err(err("start tick is after end tick".to_string()));
        }
        out.push(ScheduleEntry {
            level,
            discipline,
            start_tick,
            end_tick,
        });
    }
    Ok(out)
}

fn default_levels() -> u32 {
    2
}
fn default_walls() -> u32 {
    3
}
fn default_slabs() -> u32 {
    2
}
fn default_openings() -> u32 {
    1
}
fn default_fixtures() -> u32 {
    2
}
fn default_wall_chain() -> u8 {
    3
}
fn default_small_chain() -> u8 {
    2
}

/// Synthetic building shape. Containment (level holds elements through a
/// relation node) and host chains (wall, opening, filler) mirror the
/// relation shapes of real building models; every opening hosts one filler,
/// alternating window and door.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct BuildingSpec {
    #[serde(default = "default_levels")]
    pub levels: u32,
    #[serde(default = "default_walls")]
    pub walls_per_level: u32,
    #[serde(default = "default_slabs")]
    pub slabs_per_level: u32,
    #[serde(default = "default_openings")]
    pub openings_per_wall: u32,
    #[serde(default = "default_fixtures")]
    pub fixtures_per_level: u32,
    /// One state chain per level and category instead of one per category.
    #[serde(default)]
    pub per_level_places: bool,
    #[serde(default)]
    pub chains: ChainConfig,
}

impl Default for BuildingSpec {
    fn default() -> Self {
        BuildingSpec {
            levels: default_levels(),
            walls_per_level: default_walls(),
            slabs_per_level: default_slabs(),
            openings_per_wall: default_openings(),
            fixtures_per_level: default_fixtures(),
            per_level_places: false,
            chains: ChainConfig::default(),
        }
    }
}

/// State-chain length per category: 3 means not-started / in-processing /
/// finished, 2 means uninstalled / installed.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ChainConfig {
    #[serde(default = "default_wall_chain")]
    pub wall: u8,
    #[serde(default = "default_wall_chain")]
    pub slab: u8,
    #[serde(default = "default_small_chain")]
    pub opening: u8,
    #[serde(default = "default_small_chain")]
    pub window: u8,
    #[serde(default = "default_small_chain")]
    pub door: u8,
    #[serde(default = "default_small_chain")]
    pub fixture: u8,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            wall: 3,
            slab: 3,
            opening: 2,
            window: 2,
            door: 2,
            fixture: 2,
        }
    }
}

impl BuildingSpec {
    pub fn from_toml(text: &str) -> Result<Self, CaseError> {
        Ok(toml::from_str(text)?)
    }

    fn validate(&self) -> Result<(), CaseError> {
        if self.openings_per_wall > 0 && self.walls_per_level == 0 && self.levels > 0 {
            return Err(CaseError::Spec(
                "openings need host walls, but walls-per-level is 0".to_string(),
            ));
        }
        for (name, len) in [
            ("wall", self.chains.wall),
            ("slab", self.chains.slab),
            ("opening", self.chains.opening),
            ("window", self.chains.window),
            ("door", self.chains.door),
            ("fixture", self.chains.fixture),
        ] {
            if !(2..=3).contains(&len) {
                return Err(CaseError::Spec(format!(
                    "chain length for {name} must be 2 or 3, got {len}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Category {
    Wall,
    Slab,
    Opening,
    Window,
    Door,
    Fixture,
}

impl Category {
    fn all() -> [Category; 6] {
        [
            Category::Wall,
            Category::Slab,
            Category::Opening,
            Category::Window,
            Category::Door,
            Category::Fixture,
        ]
    }

    fn name(&self) -> &'static str {
        match self {
            Category::Wall => "wall",
            Category::Slab => "slab",
            Category::Opening => "opening",
            Category::Window => "window",
            Category::Door => "door",
            Category::Fixture => "fixture",
        }
    }

    fn class(&self) -> Term {
        let local = match self {
            Category::Wall => "IfcWall",
            Category::Slab => "IfcSlab",
            Category::Opening => "IfcOpeningElement",
            Category::Window => "IfcWindow",
            Category::Door => "IfcDoor",
            Category::Fixture => "IfcFlowTerminal",
        };
        Term::iri(format!("{}{local}", ns::IFC4_NS))
    }

    fn discipline(&self) -> Discipline {
        match self {
            Category::Wall | Category::Slab | Category::Opening => Discipline::Structure,
            Category::Window | Category::Door => Discipline::Architecture,
            Category::Fixture => Discipline::Mep,
        }
    }

    fn chain_len(&self, chains: &ChainConfig) -> u8 {
        match self {
            Category::Wall => chains.wall,
            Category::Slab => chains.slab,
            Category::Opening => chains.opening,
            Category::Window => chains.window,
            Category::Door => chains.door,
            Category::Fixture => chains.fixture,
        }
    }
}

fn state_tags(len: u8) -> &'static [&'static str] {
    match len {
        2 => &["START", "END"],
        _ => &["START", "RUN", "END"],
    }
}

fn proj(local: impl fmt::Display) -> Term {
    Term::iri(format!("{}{local}", ns::PROJ_NS))
}

fn bimsn(local: &str) -> Term {
    Term::iri(format!("{}{local}", ns::BIMSN_NS))
}

fn ifc4(local: &str) -> Term {
    Term::iri(format!("{}{local}", ns::IFC4_NS))
}

struct Emit {
    graph: Graph,
}

impl Emit {
    fn triple(&mut self, s: &Term, p: Term, o: Term) {
        self.graph.insert(Triple::new(s.clone(), p, o));
    }

    fn typed(&mut self, s: &Term, class: Term) {
        self.triple(s, vocab::rdf_type(), class);
    }

    fn rule(&mut self, owner: &Term, slot: Term, rule: &Rule, label: &str) {
        let (root, triples) = rule_to_rdf(rule, label);
        self.graph.extend(triples);
        self.triple(owner, slot, root);
    }
}

fn ask(text: String) -> Rule {
    // Generated text always stays within the supported subset.
    Rule::Sparql(SparqlLeaf::parse(text, &Graph::new()).expect("generated query parses"))
}

fn select(text: String) -> Rule {
    Rule::Sparql(SparqlLeaf::parse(text, &Graph::new()).expect("generated query parses"))
}

fn and(rules: Vec<Rule>) -> Rule {
    if rules.len() == 1 {
        rules.into_iter().next().expect("non-empty")
    } else {
        Rule::Compound {
            op: crate::model::LogicalOp::And,
            subs: rules,
        }
    }
}

fn not(rule: Rule) -> Rule {
    Rule::Compound {
        op: crate::model::LogicalOp::Not,
        subs: vec![rule],
    }
}

/// Emits the complete net and domain as one graph: domain model, schedule
/// facts, per-discipline level phases, object state chains with their
/// guards, and init rules dispatching every object and level to its start
/// place.
pub fn generate_construction_model(
    spec: &BuildingSpec,
    schedule: &[ScheduleEntry],
) -> Result<Graph, CaseError> {
    spec.validate()?;
    let mut e = Emit {
        graph: Graph::new(),
    };

    // --- Domain: levels, containment relation nodes, objects, host chains.
    let storey = ifc4("IfcBuildingStorey");
    let contains_elements = ifc4("containsElements");
    let related_elements = ifc4("RelatedElements");
    let voids = ifc4("voidsElement");
    let fills = ifc4("fillsVoid");

    let mut objects: BTreeMap<Category, Vec<(Term, u32)>> = BTreeMap::new();
    for lvl in 1..=spec.levels {
        let level = proj(format!("level{lvl}"));
        e.typed(&level, storey.clone());
        let rel = proj(format!("rel_level{lvl}"));
        e.triple(&level, contains_elements.clone(), rel.clone());

        let mut add_object = |e: &mut Emit, cat: Category, idx: u32| -> Term {
            let obj = proj(format!("{}_{lvl}_{idx}", cat.name()));
            e.typed(&obj, cat.class());
            e.triple(&rel, related_elements.clone(), obj.clone());
            objects.entry(cat).or_default().push((obj.clone(), lvl));
            obj
        };

        let mut filler_flip = lvl % 2 == 0;
        for w in 1..=spec.walls_per_level {
            let wall = add_object(&mut e, Category::Wall, w);
            for o in 1..=spec.openings_per_wall {
                let opening = add_object(&mut e, Category::Opening, (w - 1) * spec.openings_per_wall + o);
                e.triple(&opening, voids.clone(), wall.clone());
                let filler_cat = if filler_flip {
                    Category::Door
                } else {
                    Category::Window
                };
                filler_flip = !filler_flip;
                let filler = add_object(
                    &mut e,
                    filler_cat,
                    (w - 1) * spec.openings_per_wall + o,
                );
                e.triple(&filler, fills.clone(), opening.clone());
            }
        }
        for s in 1..=spec.slabs_per_level {
            add_object(&mut e, Category::Slab, s);
        }
        for f in 1..=spec.fixtures_per_level {
            add_object(&mut e, Category::Fixture, f);
        }
    }

    // --- Schedule facts.
    for (i, entry) in schedule.iter().enumerate() {
        let node = proj(format!("sched_{i}"));
        e.triple(&node, bimsn("schedLevel"), proj(format!("level{}", entry.level)));
        e.triple(
            &node,
            bimsn("schedDiscipline"),
            Term::literal(entry.discipline.code()),
        );
        e.triple(
            &node,
            bimsn("startDay"),
            Term::integer(entry.start_tick as i64),
        );
        e.triple(&node, bimsn("endDay"), Term::integer(entry.end_tick as i64));
    }

    // --- Level phase chains per discipline.
    for d in Discipline::all() {
        let code = d.code();
        for (tag, localname) in [("START", "waiting"), ("RUN", "active"), ("END", "done")] {
            let place = proj(format!("phase_{code}_{localname}"));
            e.typed(&place, vocab::place());
            e.triple(&place, bimsn("disciplineTag"), Term::literal(code));
            e.triple(&place, bimsn("stateTag"), Term::literal(tag));
        }
        let waiting = proj(format!("phase_{code}_waiting"));
        e.rule(
            &waiting.clone(),
            vocab::init_rule(),
            &select(format!(
                "SELECT ?x WHERE {{ ?x a {} . }}",
                storey
            )),
            &format!("init_phase_{code}"),
        );

        // Phase start: the schedule window has opened for this level.
        let start_t = proj(format!("t_phase_{code}_start"));
        e.typed(&start_t, vocab::transition());
        e.triple(&start_t, bimsn("disciplineTag"), Term::literal(code));
        e.triple(&start_t, vocab::has_arg(), Term::literal("?TOKEN"));
        e.rule(
            &start_t,
            vocab::guard_rule(),
            &ask(format!(
                "ASK {{ spnx:clock spnx:tick ?now . ?s bimsn:schedLevel ?TOKEN . \
                 ?s bimsn:schedDiscipline '{code}' . ?s bimsn:startDay ?start . \
                 FILTER (?now >= ?start) }}"
            )),
            &format!("g_start_{code}"),
        );
        arc(&mut e, &format!("a_{code}_start_in"), true, &waiting, &start_t);
        arc(
            &mut e,
            &format!("a_{code}_start_out"),
            false,
            &proj(format!("phase_{code}_active")),
            &start_t,
        );

        // Phase end: no element of the level may sit in a non-terminal
        // place of the same discipline.
        let end_t = proj(format!("t_phase_{code}_end"));
        e.typed(&end_t, vocab::transition());
        e.triple(&end_t, bimsn("disciplineTag"), Term::literal(code));
        e.triple(&end_t, vocab::has_arg(), Term::literal("?TOKEN"));
        e.rule(
            &end_t,
            vocab::guard_rule(),
            &not(ask(format!(
                "ASK {{ ?place a spn:Place. ?place bimsn:disciplineTag ?dTag1. \
                 ?SELF bimsn:disciplineTag ?dTag2. ?place bimsn:stateTag ?sTag. \
                 FILTER (?dTag1 = ?dTag2 && ?sTag != 'END') \
                 ?TOKEN {contains_elements}/{related_elements} ?elem. \
                 ?place ldp:contains ?elem. }}"
            ))),
            &format!("g_end_{code}"),
        );
        arc(
            &mut e,
            &format!("a_{code}_end_in"),
            true,
            &proj(format!("phase_{code}_active")),
            &end_t,
        );
        arc(
            &mut e,
            &format!("a_{code}_end_out"),
            false,
            &proj(format!("phase_{code}_done")),
            &end_t,
        );
    }

    // --- Object state chains.
    let level_scopes: Vec<Option<u32>> = if spec.per_level_places {
        (1..=spec.levels).map(Some).collect()
    } else {
        vec![None]
    };
    for cat in Category::all() {
        let len = cat.chain_len(&spec.chains);
        let tags = state_tags(len);
        let d = cat.discipline();
        for scope in &level_scopes {
            let suffix = match scope {
                Some(lvl) => format!("_L{lvl}"),
                None => String::new(),
            };
            // Places of the chain.
            for tag in tags {
                let place = place_iri(cat, tag, &suffix);
                e.typed(&place, vocab::place());
                e.triple(&place, bimsn("disciplineTag"), Term::literal(d.code()));
                e.triple(&place, bimsn("stateTag"), Term::literal(*tag));
                e.triple(&place, bimsn("categoryTag"), Term::literal(cat.name()));
            }
            // Initial dispatch of objects into the chain's start place.
            let start = place_iri(cat, tags[0], &suffix);
            let init_text = match scope {
                Some(lvl) => format!(
                    "SELECT ?x WHERE {{ proj:level{lvl} {contains_elements} ?r . \
                     ?r {related_elements} ?x . ?x a {} . }}",
                    cat.class()
                ),
                None => format!("SELECT ?x WHERE {{ ?x a {} . }}", cat.class()),
            };
            e.rule(
                &start,
                vocab::init_rule(),
                &select(init_text),
                &format!("init_{}{suffix}", cat.name()),
            );

            // Advance transitions between consecutive states.
            for step in 0..(tags.len() - 1) {
                let from = place_iri(cat, tags[step], &suffix);
                let to = place_iri(cat, tags[step + 1], &suffix);
                let t = proj(format!("t_{}_{}{suffix}", cat.name(), step));
                e.typed(&t, vocab::transition());
                e.triple(&t, bimsn("disciplineTag"), Term::literal(d.code()));
                e.triple(&t, vocab::has_arg(), Term::literal("?TOKEN"));
                e.rule(
                    &t,
                    vocab::guard_rule(),
                    &advance_guard(cat, step, tags.len(), d),
                    &format!("g_{}_{}{suffix}", cat.name(), step),
                );
                arc(&mut e, &format!("a_{}_{}{suffix}_in", cat.name(), step), true, &from, &t);
                arc(&mut e, &format!("a_{}_{}{suffix}_out", cat.name(), step), false, &to, &t);
            }
        }
    }

    Ok(e.graph)
}

fn place_iri(cat: Category, tag: &str, suffix: &str) -> Term {
    proj(format!("p_{}_{}{suffix}", cat.name(), tag.to_ascii_lowercase()))
}

fn arc(e: &mut Emit, name: &str, into_transition: bool, place: &Term, transition: &Term) {
    let iri = proj(name.to_string());
    let class = if into_transition {
        vocab::arc_p2t()
    } else {
        vocab::arc_t2p()
    };
    e.typed(&iri, class);
    e.triple(&iri, vocab::rel_place(), place.clone());
    e.triple(&iri, vocab::rel_transition(), transition.clone());
    e.triple(&iri, vocab::has_arg(), Term::literal("?TOKEN"));
}

/// Work-window conjunct: the token's level is mid-phase for the given
/// discipline and the schedule window has not closed.
fn window_guard(d: Discipline) -> Rule {
    let code = d.code();
    ask(format!(
        "ASK {{ ?r ifc4:RelatedElements ?TOKEN . ?lvl ifc4:containsElements ?r . \
         ?lp a spn:Place . ?lp bimsn:disciplineTag '{code}' . ?lp bimsn:stateTag 'RUN' . \
         ?lp ldp:contains ?lvl . \
         spnx:clock spnx:tick ?now . ?s bimsn:schedLevel ?lvl . \
         ?s bimsn:schedDiscipline '{code}' . ?s bimsn:endDay ?end . \
         FILTER (?now <= ?end) }}"
    ))
}

fn advance_guard(cat: Category, step: usize, chain_len: usize, d: Discipline) -> Rule {
    let mut conjuncts = vec![window_guard(d)];
    let final_step = step + 2 == chain_len;
    match cat {
        // An opening is installed while its host wall is being built.
        Category::Opening if final_step => {
            conjuncts.push(ask(
                "ASK { ?TOKEN ifc4:voidsElement ?w . ?wp a spn:Place . \
                 ?wp bimsn:categoryTag 'wall' . ?wp bimsn:stateTag 'RUN' . \
                 ?wp ldp:contains ?w }"
                    .to_string(),
            ));
        }
        // A wall may finish only when none of its openings is pending.
        Category::Wall if final_step => {
            conjuncts.push(not(ask(
                "ASK { ?o ifc4:voidsElement ?TOKEN . ?op a spn:Place . \
                 ?op bimsn:categoryTag 'opening' . ?op bimsn:stateTag ?s . \
                 FILTER (?s != 'END') ?op ldp:contains ?o }"
                    .to_string(),
            )));
        }
        // Fillers go in after their host opening and wall are finished.
        Category::Window | Category::Door if final_step => {
            conjuncts.push(ask(
                "ASK { ?TOKEN ifc4:fillsVoid ?o . ?op a spn:Place . \
                 ?op bimsn:categoryTag 'opening' . ?op bimsn:stateTag 'END' . \
                 ?op ldp:contains ?o . ?o ifc4:voidsElement ?w . \
                 ?wp a spn:Place . ?wp bimsn:categoryTag 'wall' . \
                 ?wp bimsn:stateTag 'END' . ?wp ldp:contains ?w }"
                    .to_string(),
            ));
        }
        _ => {}
    }
    and(conjuncts)
}

/// Shape summary, for eyeballing generated nets.
pub fn model_shape(model: &SpnModel) -> (usize, usize, usize) {
    (model.places.len(), model.transitions.len(), model.arcs.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuckToken {
    pub token: Term,
    pub place: Term,
    /// Transitions out of the token's place whose guard rejected it at the
    /// final state, with the guard rule node.
    pub blocked_by: Vec<(Term, Option<Term>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub feasibility: Feasibility,
    pub stuck: Vec<StuckToken>,
}

impl Verdict {
    pub fn report(&self) -> String {
        use fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "verdict: {}",
            match self.feasibility {
                Feasibility::Feasible => "FEASIBLE",
                Feasibility::Infeasible => "INFEASIBLE",
            }
        );
        for s in &self.stuck {
            let _ = write!(out, "stuck: {} in {}", s.token, s.place);
            for (t, guard) in &s.blocked_by {
                match guard {
                    Some(g) => {
                        let _ = write!(out, " blocked_by {t} guard {g}");
                    }
                    None => {
                        let _ = write!(out, " blocked_by {t}");
                    }
                }
            }
            let _ = writeln!(out);
        }
        out
    }
}

/// Runs the generated model and judges the schedule: feasible when every
/// token ends in a terminal (`END`-tagged) place.
pub fn run_construction(
    graph: Graph,
    config: EngineConfig,
) -> Result<(Runtime, RunStats, Verdict), CaseError> {
    let model = load_model(graph)?;
    // A level progresses through one phase chain per discipline
    // concurrently, so the same level token sits in several places.
    let config = EngineConfig {
        allow_shared_tokens: true,
        ..config
    };
    let mut runtime = Runtime::new(model, config);
    let stats = runtime.run()?;
    let verdict = assess_terminal_state(&mut runtime)?;
    Ok((runtime, stats, verdict))
}

/// Judges a finished run: every token must rest in an `END`-tagged place.
/// Stuck tokens are reported with the transitions (and guard nodes) that
/// rejected them at the final state.
pub fn assess_terminal_state(runtime: &mut Runtime) -> Result<Verdict, CaseError> {
    let state_tag = bimsn("stateTag");
    let end = Term::literal("END");
    let marking = runtime.marking();
    let mut stuck = Vec::new();
    let terminal: BTreeMap<Term, bool> = runtime
        .model()
        .places
        .values()
        .map(|p| {
            (
                p.iri.clone(),
                p.annotations.get(&state_tag) == Some(&end),
            )
        })
        .collect();

    let guards: BTreeMap<Term, Option<Term>> = runtime
        .model()
        .transitions
        .keys()
        .map(|t| {
            (
                t.clone(),
                runtime.model().graph.object(t, &vocab::guard_rule()).cloned(),
            )
        })
        .collect();
    let outgoing: Vec<(Term, Term)> = runtime
        .model()
        .arcs
        .values()
        .filter(|a| {
            a.direction == crate::model::ArcDirection::PlaceToTransition && !a.read_only
        })
        .map(|a| (a.place.clone(), a.transition.clone()))
        .collect();

    for (place, tokens) in &marking.places {
        if *terminal.get(place).unwrap_or(&false) {
            continue;
        }
        for token in tokens {
            let mut blocked_by = Vec::new();
            for (p, t) in &outgoing {
                if p != place {
                    continue;
                }
                let bindings = runtime.enumerate_bindings(t)?;
                let mut enabled_for_token = false;
                let mut saw_token = false;
                for b in bindings {
                    if b.assignment.values().any(|v| v == token) {
                        saw_token = true;
                        if runtime.is_enabled(&b)? {
                            enabled_for_token = true;
                        }
                    }
                }
                if saw_token && !enabled_for_token {
                    blocked_by.push((t.clone(), guards.get(t).cloned().flatten()));
                }
            }
            stuck.push(StuckToken {
                token: token.clone(),
                place: place.clone(),
                blocked_by,
            });
        }
    }

    Ok(Verdict {
        feasibility: if stuck.is_empty() {
            Feasibility::Feasible
        } else {
            Feasibility::Infeasible
        },
        stuck,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> BuildingSpec {
        BuildingSpec {
            levels: 1,
            walls_per_level: 1,
            slabs_per_level: 0,
            openings_per_wall: 1,
            fixtures_per_level: 0,
            per_level_places: false,
            chains: ChainConfig::default(),
        }
    }

    fn wide_schedule(levels: u32) -> Vec<ScheduleEntry> {
        let mut out = Vec::new();
        for lvl in 1..=levels {
            for d in Discipline::all() {
                out.push(ScheduleEntry {
                    level: lvl,
                    discipline: d,
                    start_tick: 0,
                    end_tick: 80,
                });
            }
        }
        out
    }

    #[test]
    fn generated_model_loads() {
        let g = generate_construction_model(&tiny_spec(), &wide_schedule(1)).unwrap();
        let model = load_model(g).unwrap();
        assert!(!model.places.is_empty());
        assert!(!model.transitions.is_empty());
    }

    #[test]
    fn empty_spec_gives_minimal_net_with_zero_firings() {
        let spec = BuildingSpec {
            levels: 0,
            walls_per_level: 0,
            slabs_per_level: 0,
            openings_per_wall: 0,
            fixtures_per_level: 0,
            per_level_places: false,
            chains: ChainConfig::default(),
        };
        let g = generate_construction_model(&spec, &[]).unwrap();
        let (_, stats, _) = run_construction(
            g,
            EngineConfig {
                max_ticks: 3,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        assert_eq!(stats.firings, 0);
    }

    #[test]
    fn window_waits_for_wall_and_opening() {
        let g = generate_construction_model(&tiny_spec(), &wide_schedule(1)).unwrap();
        let (rt, stats, verdict) = run_construction(
            g,
            EngineConfig {
                max_ticks: 20,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        assert!(stats.firings > 0);
        assert_eq!(verdict.feasibility, Feasibility::Feasible, "{}", verdict.report());

        // In the event log, the filler install never precedes the host
        // wall's finish.
        let mut wall_finish_at = None;
        let mut filler_install_at = None;
        for (i, ev) in rt.events().iter().enumerate() {
            let t = ev.transition.to_string();
            if t.contains("t_wall_1") {
                wall_finish_at = Some(i);
            }
            if t.contains("t_window_0") || t.contains("t_door_0") {
                filler_install_at = Some(i);
            }
        }
        let (wall, filler) = (wall_finish_at.unwrap(), filler_install_at.unwrap());
        assert!(wall < filler, "wall finished at {wall}, filler installed at {filler}");
    }

    #[test]
    fn never_opening_schedule_is_infeasible_with_stuck_tokens() {
        // The window never opens: start after the horizon.
        let schedule: Vec<ScheduleEntry> = Discipline::all()
            .into_iter()
            .map(|d| ScheduleEntry {
                level: 1,
                discipline: d,
                start_tick: 50,
                end_tick: 60,
            })
            .collect();
        let g = generate_construction_model(&tiny_spec(), &schedule).unwrap();
        let (_, _, verdict) = run_construction(
            g,
            EngineConfig {
                max_ticks: 5,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        assert_eq!(verdict.feasibility, Feasibility::Infeasible);
        assert!(!verdict.stuck.is_empty());
        let report = verdict.report();
        assert!(report.contains("INFEASIBLE"));
        assert!(report.contains("blocked_by"), "{report}");
    }

    #[test]
    fn zero_tick_run_is_trivially_infeasible() {
        let g = generate_construction_model(&tiny_spec(), &wide_schedule(1)).unwrap();
        let (_, stats, verdict) = run_construction(
            g,
            EngineConfig {
                max_ticks: 0,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        assert_eq!(stats.ticks_elapsed, 0);
        assert_eq!(verdict.feasibility, Feasibility::Infeasible);
    }

    #[test]
    fn schedule_parser_round_trip() {
        let text = "# level,discipline,start,end\n1,ST,0,10\n1,AR,5,20\n2,MEP,8,30\n";
        let entries = parse_schedule(text).unwrap();
        assert_eq!(entries.len(), 3);
        assert_eq!(entries[1].discipline, Discipline::Architecture);
        assert_eq!(entries[2].start_tick, 8);
    }

    #[test]
    fn schedule_rejects_inverted_window() {
        assert!(parse_schedule("1,ST,10,5\n").is_err());
    }

    #[test]
    fn spec_toml_defaults() {
        let spec = BuildingSpec::from_toml("levels = 4\nper-level-places = true\n").unwrap();
        assert_eq!(spec.levels, 4);
        assert!(spec.per_level_places);
        assert_eq!(spec.chains.wall, 3);
        assert_eq!(spec.chains.window, 2);
    }

    #[test]
    fn inconsistent_host_chain_is_a_spec_error() {
        let spec = BuildingSpec {
            walls_per_level: 0,
            openings_per_wall: 2,
            ..tiny_spec()
        };
        assert!(matches!(
            generate_construction_model(&spec, &[]),
            Err(CaseError::Spec(_))
        ));
    }

    #[test]
    fn paper_shape_spec_has_comparable_structure() {
        let spec = BuildingSpec {
            levels: 4,
            per_level_places: true,
            ..BuildingSpec::default()
        };
        let g = generate_construction_model(&spec, &wide_schedule(4)).unwrap();
        let model = load_model(g).unwrap();
        let (places, transitions, _) = model_shape(&model);
        // Same order of magnitude as a real 4-level model's net.
        assert!((40..=120).contains(&places), "places = {places}");
        assert!((20..=80).contains(&transitions), "transitions = {transitions}");
    }
}
