//! Binary model checkpoints.
//!
//! Layout (all integers little-endian):
//!   magic "SKGE" | version u32 | dim u32 | |E| u64 | |R| u64 | norm u8 |
//!   seed u64 | entity table | relation table | entity rows | relation rows
//!
//! Tables are length-prefixed UTF-8 strings: entities in N-Triples term
//! syntax, relations as bare IRIs. Rows are 32-bit floats, so loading a
//! checkpoint quantizes the in-memory doubles.

use super::config::{KgeConfig, Norm};
use super::model::{GraphIndex, KgeModel};
use crate::error::{Error, Result};
use crate::kg::{parse_term, Iri, Term};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"SKGE";
const VERSION: u32 = 1;

pub fn save_model(model: &KgeModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_model(model, &mut w).map_err(|e| Error::io(path, e))
}

fn write_model(model: &KgeModel, w: &mut impl Write) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(model.config.dim as u32).to_le_bytes())?;
    w.write_all(&(model.index.entity_count() as u64).to_le_bytes())?;
    w.write_all(&(model.index.relation_count() as u64).to_le_bytes())?;
    w.write_all(&[match model.config.norm {
        Norm::L1 => 1u8,
        Norm::L2 => 2u8,
    }])?;
    w.write_all(&model.config.seed.to_le_bytes())?;
    for entity in &model.index.entities {
        write_string(w, &entity.to_string())?;
    }
    for relation in &model.index.relations {
        write_string(w, relation.as_str())?;
    }
    for v in &model.entity_vecs {
        w.write_all(&(*v as f32).to_le_bytes())?;
    }
    for v in &model.relation_vecs {
        w.write_all(&(*v as f32).to_le_bytes())?;
    }
    w.flush()
}

fn write_string(w: &mut impl Write, s: &str) -> std::io::Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<KgeModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    read_model(&mut bytes.as_slice())
}

fn read_model(r: &mut impl Read) -> Result<KgeModel> {
    let mut magic = [0u8; 4];
    read_exact(r, &mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint(format!(
            "bad magic {magic:?}, expected {MAGIC:?}"
        )));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported version {version}, this build reads {VERSION}"
        )));
    }
    let dim = read_u32(r)? as usize;
    let n_entities = read_u64(r)? as usize;
    let n_relations = read_u64(r)? as usize;
    let mut norm_byte = [0u8; 1];
    read_exact(r, &mut norm_byte)?;
    let norm = match norm_byte[0] {
        1 => Norm::L1,
        2 => Norm::L2,
        other => return Err(Error::Checkpoint(format!("bad norm byte {other}"))),
    };
    let seed = read_u64(r)?;

    let mut entities = Vec::with_capacity(n_entities);
    for _ in 0..n_entities {
        let text = read_string(r)?;
        entities.push(parse_term(&text).map_err(|e| Error::Checkpoint(e.to_string()))?);
    }
    let mut relations = Vec::with_capacity(n_relations);
    for _ in 0..n_relations {
        let text = read_string(r)?;
        relations.push(Iri::new(text).map_err(|e| Error::Checkpoint(e.to_string()))?);
    }
    let entity_vecs = read_f32_rows(r, n_entities * dim)?;
    let relation_vecs = read_f32_rows(r, n_relations * dim)?;

    let entity_ids: HashMap<Term, usize> = entities
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let relation_ids: HashMap<Iri, usize> = relations
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), i))
        .collect();

    let config = KgeConfig {
        dim,
        norm,
        seed,
        ..KgeConfig::default()
    };
    Ok(KgeModel {
        config,
        index: GraphIndex::from_parts(entities, relations, entity_ids, relation_ids),
        entity_vecs,
        relation_vecs,
    })
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::Checkpoint("truncated checkpoint".into()))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_string(r: &mut impl Read) -> Result<String> {
    let len = read_u32(r)? as usize;
    if len > 1 << 24 {
        return Err(Error::Checkpoint(format!("implausible string length {len}")));
    }
    let mut buf = vec![0u8; len];
    read_exact(r, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Checkpoint(format!("bad UTF-8: {e}")))
}

fn read_f32_rows(r: &mut impl Read, count: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; count * 4];
    read_exact(r, &mut buf)?;
    Ok(buf
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect())
}

/// TSV export of the entity matrix: term string, then the coordinates.
pub fn export_entities_tsv(model: &KgeModel) -> String {
    let mut out = String::new();
    for (i, entity) in model.index.entities.iter().enumerate() {
        out.push_str(&entity.to_string());
        for v in model.entity_row(i) {
            out.push('\t');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}
