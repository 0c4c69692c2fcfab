use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::rdf::term::{Term, Triple};
use crate::rdf::vocab;

/// Short-name to namespace-IRI map used for parsing and serialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap {
    map: BTreeMap<String, String>,
}

impl PrefixMap {
    pub fn empty() -> Self {
        PrefixMap {
            map: BTreeMap::new(),
        }
    }

    /// The bundled prefix set (`spn:`, `ldp:`, `rdf:`, `rdfs:`, `xsd:` and
    /// the scenario prefixes).
    pub fn bundled() -> Self {
        let mut map = BTreeMap::new();
        for (short, iri) in vocab::bundled_prefixes() {
            map.insert(short.to_string(), iri.to_string());
        }
        PrefixMap { map }
    }

    pub fn insert(&mut self, short: impl Into<String>, iri: impl Into<String>) {
        self.map.insert(short.into(), iri.into());
    }

    pub fn get(&self, short: &str) -> Option<&str> {
        self.map.get(short).map(String::as_str)
    }

    /// Expands `short:local` given split parts; `None` when the prefix is unknown.
    pub fn expand(&self, short: &str, local: &str) -> Option<String> {
        self.get(short).map(|ns| format!("{ns}{local}"))
    }

    /// Finds the longest declared namespace that prefixes `iri`, returning
    /// `(short, local)` when the remainder is a safe local name.
    pub fn shrink<'a>(&self, iri: &'a str) -> Option<(&str, &'a str)> {
        let mut best: Option<(&str, &'a str)> = None;
        for (short, ns) in &self.map {
            if let Some(local) = iri.strip_prefix(ns.as_str()) {
                if is_safe_local(local)
                    && best.map_or(true, |(_, l)| local.len() < l.len())
                {
                    best = Some((short.as_str(), local));
                }
            }
        }
        best
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl Default for PrefixMap {
    fn default() -> Self {
        PrefixMap::bundled()
    }
}

fn is_safe_local(local: &str) -> bool {
    !local.is_empty()
        && !local.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '.')
        && !local.ends_with('.')
        && local
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// An indexed triple set with set semantics.
///
/// Holds the domain data and the net structure together; the runtime's
/// marking is just the `ldp:contains` triples inside it. Lookup by any of
/// (s), (p), (o), (s,p), (p,o) is indexed. Iteration and match results are
/// in canonical triple order, so anything derived from them is
/// reproducible.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    by_s: HashMap<Term, BTreeSet<Triple>>,
    by_p: HashMap<Term, BTreeSet<Triple>>,
    by_o: HashMap<Term, BTreeSet<Triple>>,
    by_sp: HashMap<(Term, Term), BTreeSet<Triple>>,
    by_po: HashMap<(Term, Term), BTreeSet<Triple>>,
    prefixes: PrefixMap,
}

impl Graph {
    pub fn new() -> Self {
        Graph {
            prefixes: PrefixMap::bundled(),
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn prefixes_mut(&mut self) -> &mut PrefixMap {
        &mut self.prefixes
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    /// Inserts a triple; `false` when it was already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        if !self.triples.insert(t.clone()) {
            return false;
        }
        self.by_s
            .entry(t.subject.clone())
            .or_default()
            .insert(t.clone());
        self.by_p
            .entry(t.predicate.clone())
            .or_default()
            .insert(t.clone());
        self.by_o
            .entry(t.object.clone())
            .or_default()
            .insert(t.clone());
        self.by_sp
            .entry((t.subject.clone(), t.predicate.clone()))
            .or_default()
            .insert(t.clone());
        self.by_po
            .entry((t.predicate.clone(), t.object.clone()))
            .or_default()
            .insert(t);
        true
    }

    /// Removes a triple; `false` when it was absent.
    pub fn remove(&mut self, t: &Triple) -> bool {
        if !self.triples.remove(t) {
            return false;
        }
        prune(&mut self.by_s, &t.subject, t);
        prune(&mut self.by_p, &t.predicate, t);
        prune(&mut self.by_o, &t.object, t);
        prune(
            &mut self.by_sp,
            &(t.subject.clone(), t.predicate.clone()),
            t,
        );
        prune(
            &mut self.by_po,
            &(t.predicate.clone(), t.object.clone()),
            t,
        );
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// All triples agreeing with every non-absent position.
    pub fn matching<'a>(
        &'a self,
        s: Option<&'a Term>,
        p: Option<&'a Term>,
        o: Option<&'a Term>,
    ) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                // Lookups with positions no triple can have (literal
                // subject, non-IRI predicate) are legal and empty.
                if s.is_literal() || !p.is_iri() {
                    return Box::new(std::iter::empty());
                }
                let t = Triple::new(s.clone(), p.clone(), o.clone());
                if self.triples.contains(&t) {
                    let found = self.triples.get(&t).expect("present");
                    Box::new(std::iter::once(found))
                } else {
                    Box::new(std::iter::empty())
                }
            }
            (Some(s), Some(p), None) => {
                indexed(self.by_sp.get(&(s.clone(), p.clone())))
            }
            (None, Some(p), Some(o)) => {
                indexed(self.by_po.get(&(p.clone(), o.clone())))
            }
            (Some(s), None, Some(o)) => Box::new(
                indexed(self.by_s.get(s)).filter(move |t| &t.object == o),
            ),
            (Some(s), None, None) => indexed(self.by_s.get(s)),
            (None, Some(p), None) => indexed(self.by_p.get(p)),
            (None, None, Some(o)) => indexed(self.by_o.get(o)),
            (None, None, None) => Box::new(self.triples.iter()),
        }
    }

    /// `matching` collected into a sorted set.
    pub fn match_triples(
        &self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> BTreeSet<Triple> {
        self.matching(s, p, o).cloned().collect()
    }

    pub fn objects<'g>(&'g self, s: &Term, p: &Term) -> impl Iterator<Item = &'g Term> + 'g {
        indexed(self.by_sp.get(&(s.clone(), p.clone()))).map(|t| &t.object)
    }

    pub fn subjects<'g>(&'g self, p: &Term, o: &Term) -> impl Iterator<Item = &'g Term> + 'g {
        indexed(self.by_po.get(&(p.clone(), o.clone()))).map(|t| &t.subject)
    }

    /// Single object of (s, p), if any; smallest in term order when several.
    pub fn object<'g>(&'g self, s: &Term, p: &Term) -> Option<&'g Term> {
        self.objects(s, p).next()
    }

    /// Subjects typed `rdf:type class`, in canonical order.
    pub fn subjects_of_type<'g>(&'g self, class: &Term) -> impl Iterator<Item = &'g Term> + 'g {
        self.subjects(&Term::iri(vocab::RDF_TYPE), class)
    }

    /// Every distinct term occurring anywhere in the graph: the vocabulary.
    pub fn vocabulary(&self) -> BTreeSet<Term> {
        let mut set = BTreeSet::new();
        for t in &self.triples {
            set.insert(t.subject.clone());
            set.insert(t.predicate.clone());
            set.insert(t.object.clone());
        }
        set
    }

    pub fn extend(&mut self, triples: impl IntoIterator<Item = Triple>) {
        for t in triples {
            self.insert(t);
        }
    }

    /// Triple-set equality, ignoring prefix declarations.
    pub fn same_triples(&self, other: &Graph) -> bool {
        self.triples == other.triples
    }
}

fn indexed<'a>(set: Option<&'a BTreeSet<Triple>>) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
    match set {
        Some(s) => Box::new(s.iter()),
        None => Box::new(std::iter::empty()),
    }
}

fn prune<K: std::hash::Hash + Eq>(
    index: &mut HashMap<K, BTreeSet<Triple>>,
    key: &K,
    t: &Triple,
) {
    if let Some(set) = index.get_mut(key) {
        set.remove(t);
        if set.is_empty() {
            index.remove(key);
        }
    }
}
