use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::model::{vocab, SpnModel};
use crate::rdf::{Graph, Term};

/// A view of place contents, derived from `ldp:contains` triples. The graph
/// is authoritative; this is a snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Marking {
    pub places: BTreeMap<Term, BTreeSet<Term>>,
}

impl Marking {
    pub fn from_graph(graph: &Graph, model: &SpnModel) -> Self {
        let contains = vocab::ldp_contains();
        let mut places = BTreeMap::new();
        for place in model.places.keys() {
            let tokens: BTreeSet<Term> = graph.objects(place, &contains).cloned().collect();
            places.insert(place.clone(), tokens);
        }
        Marking { places }
    }

    pub fn tokens(&self, place: &Term) -> Option<&BTreeSet<Term>> {
        self.places.get(place)
    }

    pub fn total_tokens(&self) -> usize {
        self.places.values().map(BTreeSet::len).sum()
    }

    /// Tokens sitting in more than one place, with the places involved.
    pub fn shared_tokens(&self) -> BTreeMap<Term, Vec<Term>> {
        let mut homes: BTreeMap<Term, Vec<Term>> = BTreeMap::new();
        for (place, tokens) in &self.places {
            for tok in tokens {
                homes.entry(tok.clone()).or_default().push(place.clone());
            }
        }
        homes.retain(|_, places| places.len() > 1);
        homes
    }

    /// Canonical string over non-empty places; equal markings always
    /// fingerprint equally, across runs and processes.
    pub fn fingerprint(&self) -> String {
        let mut out = String::new();
        for (place, tokens) in &self.places {
            if tokens.is_empty() {
                continue;
            }
            let _ = write!(out, "{place}=[");
            for (i, tok) in tokens.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{tok}");
            }
            out.push_str("] ");
        }
        out.trim_end().to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_model;
    use crate::rdf::parse_turtle;

    #[test]
    fn marking_reads_contains_triples() {
        let doc = r#"
proj:p a spn:Place; ldp:contains proj:a, proj:b.
proj:q a spn:Place.
"#;
        let model = load_model(parse_turtle(doc, None).unwrap()).unwrap();
        let marking = Marking::from_graph(&model.graph, &model);
        assert_eq!(marking.total_tokens(), 2);
        assert_eq!(
            marking.tokens(&Term::iri("http://example.org/proj#p")).unwrap().len(),
            2
        );
        assert!(marking
            .tokens(&Term::iri("http://example.org/proj#q"))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn fingerprint_ignores_empty_places_and_is_sorted() {
        let doc = r#"
proj:b a spn:Place; ldp:contains proj:x.
proj:a a spn:Place; ldp:contains proj:y.
proj:c a spn:Place.
"#;
        let model = load_model(parse_turtle(doc, None).unwrap()).unwrap();
        let marking = Marking::from_graph(&model.graph, &model);
        let fp = marking.fingerprint();
        let a = fp.find("proj#a").unwrap();
        let b = fp.find("proj#b").unwrap();
        assert!(a < b);
        assert!(!fp.contains("proj#c"));
    }

    #[test]
    fn shared_token_detection() {
        let doc = r#"
proj:p a spn:Place; ldp:contains proj:x.
proj:q a spn:Place; ldp:contains proj:x.
"#;
        let model = load_model(parse_turtle(doc, None).unwrap()).unwrap();
        let marking = Marking::from_graph(&model.graph, &model);
        let shared = marking.shared_tokens();
        assert_eq!(shared.len(), 1);
    }
}
