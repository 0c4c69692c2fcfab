//! Namespace IRIs and the bundled prefix map.

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const LDP_NS: &str = "http://www.w3.org/ns/ldp#";

/// Net structure and rule vocabulary.
pub const SPN_NS: &str = "http://example.org/spn#";
/// Reserved engine-extension namespace: runtime bookkeeping triples and
/// engine-constraint annotations. Never part of the structure vocabulary.
pub const SPNX_NS: &str = "http://example.org/spn-engine#";

/// Scenario namespaces used by the bundled generators and fixtures.
pub const BIMSN_NS: &str = "http://example.org/bimsn#";
pub const PROJ_NS: &str = "http://example.org/proj#";
pub const IFC4_NS: &str = "http://example.org/ifc4#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const LDP_CONTAINS: &str = "http://www.w3.org/ns/ldp#contains";

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
pub const XSD_INT: &str = "http://www.w3.org/2001/XMLSchema#int";
pub const XSD_LONG: &str = "http://www.w3.org/2001/XMLSchema#long";
pub const XSD_NON_NEGATIVE_INTEGER: &str =
    "http://www.w3.org/2001/XMLSchema#nonNegativeInteger";

/// Prefixes every parser session starts from, so model files and embedded
/// queries can use the short names without declaring them.
pub fn bundled_prefixes() -> Vec<(&'static str, &'static str)> {
    vec![
        ("rdf", RDF_NS),
        ("rdfs", RDFS_NS),
        ("xsd", XSD_NS),
        ("ldp", LDP_NS),
        ("spn", SPN_NS),
        ("spnx", SPNX_NS),
        ("bimsn", BIMSN_NS),
        ("proj", PROJ_NS),
        ("ifc4", IFC4_NS),
    ]
}
