//! Reification of annotation documents into situated-annotation triples.
//!
//! Each surviving detection becomes an annotation instance linked to its
//! image, its annotation situation, a lexical entry, a strength literal, a
//! role node and the concept that types it. Situation nodes are shared:
//! identical metadata collapses to one node across the whole corpus.

use super::align::AlignmentTable;
use super::color::{nearest_css3_color, Css3ColorTable};
use super::doc::{filter_objects, AnnotationDoc, SituationMeta};
use crate::error::{Error, Result};
use crate::kg::{Graph, Iri, Literal, Term, Triple, AC_LABELS};
use crate::vocab::{self, slug, Vocab};
use rayon::prelude::*;
use std::collections::HashSet;

/// Unit names that own a role node, in canonical order. `synset` and `frame`
/// are derived from the caption but carry their own roles.
pub const ROLE_UNITS: [&str; 9] = [
    "action",
    "age_tier",
    "art_style",
    "colors",
    "emotion",
    "frame",
    "human_presence",
    "objects",
    "synset",
];

/// Turns validated documents into graphs under a fixed IRI scheme.
#[derive(Debug, Clone)]
pub struct Reifier {
    vocab: Vocab,
    colors: Css3ColorTable,
    alignment: AlignmentTable,
}

impl Default for Reifier {
    fn default() -> Self {
        Reifier {
            vocab: Vocab::default(),
            colors: Css3ColorTable::bundled(),
            alignment: AlignmentTable::bundled(),
        }
    }
}

impl Reifier {
    pub fn new(vocab: Vocab, colors: Css3ColorTable, alignment: AlignmentTable) -> Self {
        Reifier {
            vocab,
            colors,
            alignment,
        }
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// The concept IRI typing a detector label: the alignment table when it
    /// knows the label, an `unaligned/` IRI otherwise.
    fn concept(&self, unit: &str, label: &str) -> Iri {
        match self.alignment.concept_for(unit, label) {
            Some(iri) => iri.clone(),
            None => self.vocab.unaligned(&slug(label)),
        }
    }

    /// Build the A-Box for a single document. Object thresholding and color
    /// snapping happen here, so raw detector output goes in.
    pub fn build_image_graph(&self, doc: &AnnotationDoc) -> Result<Graph> {
        let mut g = Graph::new();
        let image = self.vocab.image(&doc.image_id);

        g.add(Triple::new(
            image.clone(),
            vocab::has_ac_cluster(),
            self.vocab.cluster(&doc.ac_label),
        ));
        if let Some(caption) = &doc.detections.caption {
            g.add(Triple::new(
                image.clone(),
                vocab::has_caption(),
                Literal::plain(caption.clone()),
            ));
        }

        let mut emit = Emitter {
            reifier: self,
            doc,
            image: &image,
            graph: &mut g,
        };

        let d = &doc.detections;
        for (unit, det) in [
            ("action", &d.action),
            ("age_tier", &d.age_tier),
            ("art_style", &d.art_style),
            ("emotion", &d.emotion),
        ] {
            if let Some(s) = det {
                emit.annotation(unit, 0, &s.label, Some(s.score), unit)?;
            }
        }
        if let Some(hp) = &d.human_presence {
            let label = if hp.present { "human" } else { "no_human" };
            emit.annotation("human_presence", 0, label, Some(hp.score), "human_presence")?;
        }
        for (i, obj) in filter_objects(&d.objects).iter().enumerate() {
            emit.annotation("objects", i, &obj.label, Some(obj.score), "objects")?;
        }

        // Colors: snap to CSS3 names, drop far colors, dedupe by name
        // keeping first occurrence.
        let mut seen_names = HashSet::new();
        let mut snapped = Vec::new();
        for rgb in &d.colors {
            if let Some((name, _)) = nearest_css3_color(*rgb, &self.colors) {
                if seen_names.insert(name.to_string()) {
                    snapped.push(name.to_string());
                }
            }
        }
        for (i, name) in snapped.iter().enumerate() {
            emit.annotation("colors", i, name, None, "colors")?;
        }

        // Caption-derived typings ride on the caption situation.
        for (i, synset) in d.synsets.iter().enumerate() {
            let concept = self.vocab.synset(synset);
            emit.typing_annotation("synset", i, concept, "caption")?;
        }
        for (i, frame) in d.frames.iter().enumerate() {
            let concept = self.vocab.frame(frame);
            emit.typing_annotation("frame", i, concept, "caption")?;
        }

        Ok(g)
    }

    /// Build the corpus graph: T-Box plus the union of all per-image graphs.
    /// Per-image construction is pure, so it fans out across threads; the
    /// merge is a single-writer union in document order.
    pub fn build_akg(&self, docs: &[AnnotationDoc]) -> Result<Graph> {
        let mut seen = HashSet::new();
        for doc in docs {
            if !seen.insert(doc.image_id.as_str()) {
                return Err(Error::Invalid(format!(
                    "duplicate image_id {:?}",
                    doc.image_id
                )));
            }
        }

        let mut akg = self.tbox();
        let per_image: Vec<Result<Graph>> = docs
            .par_iter()
            .map(|doc| self.build_image_graph(doc))
            .collect();
        for graph in per_image {
            akg.extend_from(&graph?);
        }
        Ok(akg)
    }

    /// Schema-level statements: cluster and role nodes with their types.
    pub fn tbox(&self) -> Graph {
        let mut g = Graph::new();
        for label in AC_LABELS {
            g.add(Triple::new(
                self.vocab.cluster(label),
                vocab::rdf_type(),
                vocab::ac_cluster_class(),
            ));
        }
        for unit in ROLE_UNITS {
            g.add(Triple::new(
                self.vocab.role(unit),
                vocab::rdf_type(),
                vocab::annotation_role_class(),
            ));
        }
        g
    }
}

struct Emitter<'a> {
    reifier: &'a Reifier,
    doc: &'a AnnotationDoc,
    image: &'a Iri,
    graph: &'a mut Graph,
}

impl Emitter<'_> {
    fn situation(&mut self, unit: &str) -> Result<Iri> {
        let meta: &SituationMeta = self.doc.situations.get(unit).ok_or_else(|| {
            Error::Invalid(format!(
                "image {:?}: missing situation metadata for unit `{unit}`",
                self.doc.image_id
            ))
        })?;
        let node = self.reifier.vocab.situation(unit, &meta.content_key());
        let fields: [(Iri, Term); 7] = [
            (vocab::rdf_type(), vocab::situation_class(unit).into()),
            (
                vocab::has_model_name(),
                Literal::plain(meta.model_name.clone()).into(),
            ),
            (
                vocab::has_backbone(),
                Literal::plain(meta.backbone.clone()).into(),
            ),
            (
                vocab::has_dataset(),
                Literal::plain(meta.dataset.clone()).into(),
            ),
            (
                vocab::has_timestamp(),
                Literal::typed(meta.timestamp.clone(), Iri::new(vocab::XSD_DATETIME).unwrap())
                    .into(),
            ),
            (
                vocab::has_location(),
                Literal::plain(meta.location.clone()).into(),
            ),
            (
                vocab::has_annotator(),
                Literal::plain(meta.annotator_id.clone()).into(),
            ),
        ];
        for (p, o) in fields {
            self.graph.add(Triple::new(node.clone(), p, o));
        }
        Ok(node)
    }

    /// Full annotation instance for a detector label.
    fn annotation(
        &mut self,
        unit: &str,
        ordinal: usize,
        label: &str,
        strength: Option<f64>,
        situation_unit: &str,
    ) -> Result<()> {
        let node = self
            .reifier
            .vocab
            .annotation(&self.doc.image_id, unit, ordinal);
        let situation = self.situation(situation_unit)?;
        self.graph.add(Triple::new(
            node.clone(),
            vocab::is_annotation_of(),
            self.image.clone(),
        ));
        self.graph
            .add(Triple::new(node.clone(), vocab::generated_in(), situation));
        self.graph.add(Triple::new(
            node.clone(),
            vocab::uses_lexical_entry(),
            self.reifier.vocab.lexical_entry(&slug(label)),
        ));
        if let Some(score) = strength {
            self.graph.add(Triple::new(
                node.clone(),
                vocab::has_strength(),
                Literal::typed(score.to_string(), Iri::new(vocab::XSD_DOUBLE).unwrap()),
            ));
        }
        self.graph.add(Triple::new(
            node.clone(),
            vocab::has_role(),
            self.reifier.vocab.role(unit),
        ));
        self.graph.add(Triple::new(
            node,
            vocab::typed_by(),
            self.reifier.concept(unit, label),
        ));
        Ok(())
    }

    /// Lean annotation for caption-derived typings: no lexical entry, no
    /// strength, concept given directly.
    fn typing_annotation(
        &mut self,
        unit: &str,
        ordinal: usize,
        concept: Iri,
        situation_unit: &str,
    ) -> Result<()> {
        let node = self
            .reifier
            .vocab
            .annotation(&self.doc.image_id, unit, ordinal);
        let situation = self.situation(situation_unit)?;
        self.graph.add(Triple::new(
            node.clone(),
            vocab::is_annotation_of(),
            self.image.clone(),
        ));
        self.graph
            .add(Triple::new(node.clone(), vocab::generated_in(), situation));
        self.graph.add(Triple::new(
            node.clone(),
            vocab::has_role(),
            self.reifier.vocab.role(unit),
        ));
        self.graph
            .add(Triple::new(node, vocab::typed_by(), concept));
        Ok(())
    }
}
