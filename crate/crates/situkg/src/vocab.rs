//! IRI vocabulary for generated graphs.
//!
//! Every node produced by ingestion gets a deterministic IRI under a
//! configurable base, so repeated runs serialize to identical bytes.
//! Ontology-level predicates live in the situated-annotation namespace.

use crate::kg::Iri;
use sha2::{Digest, Sha256};

pub const DEFAULT_BASE: &str = "https://example.org/akg";
pub const ONT: &str = "https://w3id.org/situannotate#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_DATETIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";

/// Framester-style namespaces for caption-derived typings given as bare ids.
pub const WN_SYNSET_NS: &str = "https://w3id.org/framester/wn/wn30/instances/";
pub const FRAME_NS: &str = "https://w3id.org/framester/data/framestercore/";

fn ont(name: &str) -> Iri {
    Iri::new(format!("{ONT}{name}")).expect("ontology IRIs are static and valid")
}

pub fn rdf_type() -> Iri {
    Iri::new(RDF_TYPE).expect("static IRI")
}

pub fn is_annotation_of() -> Iri {
    ont("isAnnotationOf")
}
pub fn generated_in() -> Iri {
    ont("generatedIn")
}
pub fn uses_lexical_entry() -> Iri {
    ont("usesLexicalEntry")
}
pub fn has_strength() -> Iri {
    ont("hasStrength")
}
pub fn has_role() -> Iri {
    ont("hasRole")
}
pub fn typed_by() -> Iri {
    ont("typedBy")
}
pub fn has_caption() -> Iri {
    ont("hasCaption")
}
pub fn has_ac_cluster() -> Iri {
    ont("hasACCluster")
}
pub fn has_model_name() -> Iri {
    ont("hasModelName")
}
pub fn has_backbone() -> Iri {
    ont("hasBackbone")
}
pub fn has_dataset() -> Iri {
    ont("hasDataset")
}
pub fn has_timestamp() -> Iri {
    ont("hasTimestamp")
}
pub fn has_location() -> Iri {
    ont("hasLocation")
}
pub fn has_annotator() -> Iri {
    ont("hasAnnotator")
}
pub fn annotation_role_class() -> Iri {
    ont("AnnotationRole")
}
pub fn ac_cluster_class() -> Iri {
    ont("AbstractConceptCluster")
}

/// Situation class for a unit key, e.g. `age_tier` ->
/// `situannotate#AgeTierAnnotationSituation`.
pub fn situation_class(unit: &str) -> Iri {
    let mut camel = String::new();
    for part in unit.split('_') {
        let mut chars = part.chars();
        if let Some(c) = chars.next() {
            camel.extend(c.to_uppercase());
            camel.push_str(chars.as_str());
        }
    }
    ont(&format!("{camel}AnnotationSituation"))
}

/// Builder for base-scoped node IRIs.
#[derive(Debug, Clone)]
pub struct Vocab {
    base: String,
}

impl Default for Vocab {
    fn default() -> Self {
        Vocab::new(DEFAULT_BASE)
    }
}

impl Vocab {
    pub fn new(base: impl Into<String>) -> Self {
        let mut base = base.into();
        while base.ends_with('/') {
            base.pop();
        }
        Vocab { base }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    fn node(&self, path: &str) -> Iri {
        Iri::new(format!("{}/{path}", self.base)).expect("generated IRIs contain no whitespace")
    }

    pub fn image(&self, image_id: &str) -> Iri {
        self.node(&format!("image/{image_id}"))
    }

    /// Recover the image id from one of our image IRIs.
    pub fn image_id_of<'a>(&self, iri: &'a Iri) -> Option<&'a str> {
        let prefix = format!("{}/image/", self.base);
        iri.as_str().strip_prefix(&*prefix).filter(|s| !s.is_empty())
    }

    pub fn annotation(&self, image_id: &str, unit: &str, ordinal: usize) -> Iri {
        self.node(&format!("annotation/{image_id}/{unit}/{ordinal}"))
    }

    /// Prefix shared by every annotation-instance IRI; used to exclude these
    /// bookkeeping nodes from shared-node reports.
    pub fn annotation_prefix(&self) -> String {
        format!("{}/annotation/", self.base)
    }

    /// Situation nodes are shared across images: the IRI is derived from the
    /// situation content, so identical metadata collapses to one node.
    pub fn situation(&self, unit: &str, content_key: &str) -> Iri {
        let mut hasher = Sha256::new();
        hasher.update(unit.as_bytes());
        hasher.update([0x1f]);
        hasher.update(content_key.as_bytes());
        let digest = hasher.finalize();
        let short: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        self.node(&format!("situation/{unit}/{short}"))
    }

    pub fn lexical_entry(&self, label_slug: &str) -> Iri {
        self.node(&format!("lexicon/{label_slug}"))
    }

    pub fn role(&self, unit: &str) -> Iri {
        self.node(&format!("role/{unit}"))
    }

    pub fn cluster(&self, ac_label: &str) -> Iri {
        self.node(&format!("cluster/{ac_label}"))
    }

    pub fn unaligned(&self, label_slug: &str) -> Iri {
        self.node(&format!("unaligned/{label_slug}"))
    }

    pub fn synset(&self, id: &str) -> Iri {
        if id.contains("://") {
            Iri::new(id).unwrap_or_else(|_| self.unaligned(&slug(id)))
        } else {
            Iri::new(format!("{WN_SYNSET_NS}{}", slug_preserving_case(id)))
                .expect("slug output contains no whitespace")
        }
    }

    pub fn frame(&self, id: &str) -> Iri {
        if id.contains("://") {
            Iri::new(id).unwrap_or_else(|_| self.unaligned(&slug(id)))
        } else {
            Iri::new(format!("{FRAME_NS}{}", slug_preserving_case(id)))
                .expect("slug output contains no whitespace")
        }
    }
}

/// Lowercased IRI-safe slug: alphanumerics kept, separators become `_`,
/// `+` spelled out, anything else dropped. Empty results fall back to a
/// content hash so distinct labels stay distinct.
pub fn slug(label: &str) -> String {
    let lowered = label.to_lowercase();
    let out = slug_preserving_case(&lowered);
    if out.is_empty() {
        let digest = Sha256::digest(label.as_bytes());
        digest[..4].iter().map(|b| format!("{b:02x}")).collect()
    } else {
        out
    }
}

fn slug_preserving_case(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        match c {
            c if c.is_ascii_alphanumeric() => out.push(c),
            ' ' | '-' | '/' | '.' | ':' => out.push('_'),
            '_' => out.push('_'),
            '+' => out.push_str("plus"),
            _ => {}
        }
    }
    out
}
