//! Annotation documents: the JSON contract between upstream detectors and
//! this pipeline, plus schema validation.

use crate::error::{Error, Result};
use crate::kg::AC_LABELS;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// One detector label with its confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredLabel {
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanPresence {
    pub present: bool,
    pub score: f64,
}

/// Detector outputs for one image. Every unit is optional: a document with
/// nothing but a caption is valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detections {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ScoredLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age_tier: Option<ScoredLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub art_style: Option<ScoredLabel>,
    /// Raw dominant colors (up to five from the detector), snapped to CSS3
    /// names downstream.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub colors: Vec<[u8; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotion: Option<ScoredLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_presence: Option<HumanPresence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caption: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<ScoredLabel>,
    /// Precomputed WordNet synset ids extracted from the caption.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub synsets: Vec<String>,
    /// Precomputed linguistic frame ids triggered by the synsets.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<String>,
}

/// Who/what/when/where of one unit's labeling act.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SituationMeta {
    pub model_name: String,
    pub backbone: String,
    pub dataset: String,
    pub timestamp: String,
    pub location: String,
    pub annotator_id: String,
}

impl SituationMeta {
    /// Canonical content key; identical metadata yields identical situation nodes.
    pub fn content_key(&self) -> String {
        [
            &self.model_name,
            &self.backbone,
            &self.dataset,
            &self.timestamp,
            &self.location,
            &self.annotator_id,
        ]
        .map(String::as_str)
        .join("\u{1f}")
    }
}

/// One image's detector outputs plus annotation-situation metadata.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationDoc {
    pub image_id: String,
    pub ac_label: String,
    #[serde(default)]
    pub detections: Detections,
    /// Situation metadata keyed by unit name (`action`, `objects`, `caption`, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub situations: BTreeMap<String, SituationMeta>,
}

/// The unit names a document can carry, in canonical order.
pub const UNIT_KEYS: [&str; 8] = [
    "action",
    "age_tier",
    "art_style",
    "colors",
    "emotion",
    "human_presence",
    "caption",
    "objects",
];

impl AnnotationDoc {
    /// Unit names with at least one detection present. Synsets and frames
    /// belong to the `caption` unit: they are derived from the caption text.
    pub fn units_present(&self) -> Vec<&'static str> {
        let d = &self.detections;
        let mut units = Vec::new();
        if d.action.is_some() {
            units.push("action");
        }
        if d.age_tier.is_some() {
            units.push("age_tier");
        }
        if d.art_style.is_some() {
            units.push("art_style");
        }
        if !d.colors.is_empty() {
            units.push("colors");
        }
        if d.emotion.is_some() {
            units.push("emotion");
        }
        if d.human_presence.is_some() {
            units.push("human_presence");
        }
        if d.caption.is_some() || !d.synsets.is_empty() || !d.frames.is_empty() {
            units.push("caption");
        }
        if !d.objects.is_empty() {
            units.push("objects");
        }
        units
    }

    /// Schema validation beyond what deserialization enforces.
    pub fn validate(&self) -> std::result::Result<(), (String, String)> {
        if self.image_id.is_empty() {
            return Err(("image_id".into(), "must be non-empty".into()));
        }
        if let Some(c) = self
            .image_id
            .chars()
            .find(|c| !(c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')))
        {
            return Err((
                "image_id".into(),
                format!("character {c:?} is not allowed (use [A-Za-z0-9_.-])"),
            ));
        }
        if !AC_LABELS.contains(&self.ac_label.as_str()) {
            return Err((
                "ac_label".into(),
                format!(
                    "unknown label {:?}; valid labels are {}",
                    self.ac_label,
                    AC_LABELS.join(", ")
                ),
            ));
        }
        let d = &self.detections;
        let scored = [
            ("action", &d.action),
            ("age_tier", &d.age_tier),
            ("art_style", &d.art_style),
            ("emotion", &d.emotion),
        ];
        for (field, value) in scored {
            if let Some(s) = value {
                check_score(field, s.score)?;
                check_label(field, &s.label)?;
            }
        }
        if let Some(hp) = &d.human_presence {
            check_score("human_presence", hp.score)?;
        }
        for (i, obj) in d.objects.iter().enumerate() {
            let field = format!("objects[{i}]");
            check_score(&field, obj.score)?;
            check_label(&field, &obj.label)?;
        }
        Ok(())
    }
}

fn check_score(field: &str, score: f64) -> std::result::Result<(), (String, String)> {
    if !(0.0..=1.0).contains(&score) || score.is_nan() {
        return Err((field.into(), format!("score {score} is outside [0, 1]")));
    }
    Ok(())
}

fn check_label(field: &str, label: &str) -> std::result::Result<(), (String, String)> {
    if label.is_empty() {
        return Err((field.into(), "label must be non-empty".into()));
    }
    Ok(())
}

/// Keep exactly the detections with score >= 0.4, in their original order.
pub fn filter_objects(objects: &[ScoredLabel]) -> Vec<ScoredLabel> {
    objects.iter().filter(|o| o.score >= 0.4).cloned().collect()
}

/// Parse and validate a JSON array of annotation documents, keeping
/// per-document provenance for error messages.
pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<AnnotationDoc>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(&text, Some(path.to_path_buf()))
}

/// Same as [`load_annotations`] but from a string; `file` is only used in
/// error messages.
pub fn parse_annotations(text: &str, file: Option<PathBuf>) -> Result<Vec<AnnotationDoc>> {
    let values: Vec<serde_json::Value> =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("not a JSON array of documents: {e}")))?;
    let mut docs = Vec::with_capacity(values.len());
    for (index, value) in values.into_iter().enumerate() {
        let doc: AnnotationDoc =
            serde_json::from_value(value).map_err(|e| Error::Document {
                file: file.clone(),
                index,
                field: "<schema>".into(),
                msg: e.to_string(),
            })?;
        doc.validate().map_err(|(field, msg)| Error::Document {
            file: file.clone(),
            index,
            field,
            msg,
        })?;
        docs.push(doc);
    }
    Ok(docs)
}
