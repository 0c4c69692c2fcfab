//! Checking pipes: three places and two filtering transitions per rule.
//!
//! Root entities are fetched into the intake place; the applicability rule
//! filters them onward; the constraint rule filters the applicable ones
//! into the passed place, leaving failures behind. Pipes are independent
//! net fragments over disjoint places, so they can run together and their
//! results do not depend on order.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cases::construction::CaseError;
use crate::model::{load_model, rule_to_rdf, vocab, Rule, SparqlLeaf};
use crate::rdf::{vocab as ns, Graph, Term, Triple};
use crate::runtime::{EngineConfig, Runtime};

#[derive(Debug, Clone)]
pub struct CheckingPipe {
    pub name: String,
    pub root_class: Term,
    pub applicability: Rule,
    pub constraint: Rule,
}

impl CheckingPipe {
    fn place(&self, which: u8) -> Term {
        Term::iri(format!("{}pipe_{}_p{which}", ns::PROJ_NS, self.name))
    }

    fn transition(&self, which: &str) -> Term {
        Term::iri(format!("{}pipe_{}_t_{which}", ns::PROJ_NS, self.name))
    }
}

/// A pipe for a root class with explicit applicability and constraint
/// rules. `name` must be unique among the pipes run together.
pub fn build_pipe(
    name: impl Into<String>,
    root_class: Term,
    applicability: Rule,
    constraint: Rule,
) -> CheckingPipe {
    CheckingPipe {
        name: name.into(),
        root_class,
        applicability,
        constraint,
    }
}

/// The common published pattern: applicable when the entity is of the
/// class, passing when the property is present.
pub fn property_existence_pipe(
    name: impl Into<String>,
    class: Term,
    property: Term,
) -> CheckingPipe {
    let applicability = Rule::Sparql(
        SparqlLeaf::parse(format!("ASK {{ ?TOKEN a {class} . }}"), &Graph::new())
            .expect("generated query parses"),
    );
    let constraint = Rule::Sparql(
        SparqlLeaf::parse(
            format!("ASK {{ ?TOKEN {property} ?value . }}"),
            &Graph::new(),
        )
        .expect("generated query parses"),
    );
    build_pipe(name, class, applicability, constraint)
}

/// Per-pipe counts after a run. Failures are the applicable entities left
/// in the middle place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipeOutcome {
    pub name: String,
    pub root_class: Term,
    pub intake: usize,
    pub applicable: usize,
    pub passed: usize,
    pub failed: usize,
    pub failed_entities: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PipeReport {
    pub pipes: Vec<PipeOutcome>,
}

impl fmt::Display for PipeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pipes {
            writeln!(f, "pipe: {}", p.name)?;
            writeln!(f, "  root_class: {}", p.root_class)?;
            writeln!(f, "  intake: {}", p.intake)?;
            writeln!(f, "  applicable: {}", p.applicable)?;
            writeln!(f, "  passed: {}", p.passed)?;
            writeln!(f, "  failed: {}", p.failed)?;
            if !p.failed_entities.is_empty() {
                write!(f, "  failed_entities:")?;
                for e in &p.failed_entities {
                    write!(f, " {e}")?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Assembles the pipes into one net over the data graph.
pub fn pipes_model_graph(pipes: &[CheckingPipe], data: &Graph) -> Result<Graph, CaseError> {
    let mut names = BTreeSet::new();
    for pipe in pipes {
        if !names.insert(&pipe.name) {
            return Err(CaseError::Spec(format!("duplicate pipe name '{}'", pipe.name)));
        }
    }
    let mut graph = data.clone();
    for pipe in pipes {
        let [p1, p2, p3] = [pipe.place(1), pipe.place(2), pipe.place(3)];
        for p in [&p1, &p2, &p3] {
            graph.insert(Triple::new(p.clone(), vocab::rdf_type(), vocab::place()));
        }
        let init = Rule::Sparql(
            SparqlLeaf::parse(
                format!("SELECT ?x WHERE {{ ?x a {} . }}", pipe.root_class),
                &graph,
            )
            .expect("generated query parses"),
        );
        let (root, triples) = rule_to_rdf(&init, &format!("pipe_{}_init", pipe.name));
        graph.extend(triples);
        graph.insert(Triple::new(p1.clone(), vocab::init_rule(), root));

        for (which, guard, from, to) in [
            ("applicable", &pipe.applicability, &p1, &p2),
            ("pass", &pipe.constraint, &p2, &p3),
        ] {
            let t = pipe.transition(which);
            graph.insert(Triple::new(t.clone(), vocab::rdf_type(), vocab::transition()));
            graph.insert(Triple::new(
                t.clone(),
                vocab::has_arg(),
                Term::literal("?TOKEN"),
            ));
            let (root, triples) =
                rule_to_rdf(guard, &format!("pipe_{}_{which}_guard", pipe.name));
            graph.extend(triples);
            graph.insert(Triple::new(t.clone(), vocab::guard_rule(), root));

            let Term::Iri(t_iri) = &t else {
                unreachable!("pipe transitions are IRIs");
            };
            let arc_in = Term::iri(format!("{t_iri}_in"));
            let arc_out = Term::iri(format!("{t_iri}_out"));
            graph.insert(Triple::new(
                arc_in.clone(),
                vocab::rdf_type(),
                vocab::arc_p2t(),
            ));
            graph.insert(Triple::new(arc_in.clone(), vocab::rel_place(), from.clone()));
            graph.insert(Triple::new(arc_in.clone(), vocab::rel_transition(), t.clone()));
            graph.insert(Triple::new(
                arc_in,
                vocab::has_arg(),
                Term::literal("?TOKEN"),
            ));
            graph.insert(Triple::new(
                arc_out.clone(),
                vocab::rdf_type(),
                vocab::arc_t2p(),
            ));
            graph.insert(Triple::new(arc_out.clone(), vocab::rel_place(), to.clone()));
            graph.insert(Triple::new(
                arc_out.clone(),
                vocab::rel_transition(),
                t.clone(),
            ));
            graph.insert(Triple::new(
                arc_out,
                vocab::has_arg(),
                Term::literal("?TOKEN"),
            ));
        }
    }
    Ok(graph)
}

/// Builds, runs to quiescence, and reports per-pipe counts.
pub fn run_pipes(pipes: &[CheckingPipe], data: &Graph) -> Result<PipeReport, CaseError> {
    let graph = pipes_model_graph(pipes, data)?;
    let model = load_model(graph)?;
    let config = EngineConfig {
        // Pipes settle in two moves per entity; the cap is generous.
        max_ticks: 64,
        ..EngineConfig::default()
    };
    let mut runtime = Runtime::new(model, config);
    runtime.run()?;

    let marking = runtime.marking();
    let count = |place: &Term| marking.tokens(place).map_or(0, BTreeSet::len);
    let mut report = PipeReport::default();
    for pipe in pipes {
        let [p1, p2, p3] = [pipe.place(1), pipe.place(2), pipe.place(3)];
        let in_p1 = count(&p1);
        let failed_entities: Vec<Term> = marking
            .tokens(&p2)
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default();
        let failed = failed_entities.len();
        let passed = count(&p3);
        report.pipes.push(PipeOutcome {
            name: pipe.name.clone(),
            root_class: pipe.root_class.clone(),
            intake: in_p1 + failed + passed,
            applicable: failed + passed,
            passed,
            failed,
            failed_entities,
        });
    }
    Ok(report)
}

/// Synthetic checking data: `classes` root classes with `entities_per_class`
/// members each; within each class, `with_property` entities (chosen by the
/// seed) carry that class's required property.
pub fn generate_checking_data(
    classes: usize,
    entities_per_class: usize,
    with_property: usize,
    seed: u64,
) -> Graph {
    let mut graph = Graph::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in 0..classes {
        let class = Term::iri(format!("{}Class{c}", ns::PROJ_NS));
        let property = Term::iri(format!("{}requiredProp{c}", ns::PROJ_NS));
        let mut entities = Vec::new();
        for i in 0..entities_per_class {
            let entity = Term::iri(format!("{}entity_{c}_{i}", ns::PROJ_NS));
            graph.insert(Triple::new(entity.clone(), vocab::rdf_type(), class.clone()));
            entities.push(entity);
        }
        entities.shuffle(&mut rng);
        for entity in entities.into_iter().take(with_property.min(entities_per_class)) {
            graph.insert(Triple::new(
                entity,
                property.clone(),
                Term::literal(format!("value{c}")),
            ));
        }
    }
    graph
}

/// The matching property-existence pipes for `generate_checking_data`.
pub fn pipes_for_checking_data(classes: usize) -> Vec<CheckingPipe> {
    (0..classes)
        .map(|c| {
            property_existence_pipe(
                format!("prop{c}"),
                Term::iri(format!("{}Class{c}", ns::PROJ_NS)),
                Term::iri(format!("{}requiredProp{c}", ns::PROJ_NS)),
            )
        })
        .collect()
}
