use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use super::{compose, lift, ComposePlan, Construction, NodeKind, VerifyReport};
use crate::error::{Error, Result};
use crate::space::{AxisMap, Block, Placement, Point, Projection, Signature, TileSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateMode {
    ExplicitPeriodic,
    Construction,
}

impl CertificateMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateMode::ExplicitPeriodic => "explicit-periodic",
            CertificateMode::Construction => "construction",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Payload {
    /// Placements of one fundamental domain, offsets reduced by the period.
    Explicit(Vec<Placement>),
    Tree(Construction),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Meta {
    pub pipeline: String,
    pub d: usize,
    pub extra: BTreeMap<String, Value>,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub space: Signature,
    /// Period of every axis; `None` only for axes with no periodic structure.
    pub period: Vec<Option<i64>>,
    pub payload: Payload,
    pub meta: Meta,
}

impl Certificate {
    pub fn mode(&self) -> CertificateMode {
        match self.payload {
            Payload::Explicit(_) => CertificateMode::ExplicitPeriodic,
            Payload::Tree(_) => CertificateMode::Construction,
        }
    }

    /// Wraps a construction; materializes it when a fundamental domain has at
    /// most `limit` points.
    pub fn from_construction(c: Construction, meta: Meta, limit: u128) -> Result<Self> {
        let period = c.periods();
        let space = (**c.sig()).clone();
        let explicit = period.iter().all(|p| p.is_some())
            && c.domain_size().is_some_and(|s| s <= limit);
        let payload = if explicit {
            Payload::Explicit(c.materialize(limit)?)
        } else {
            Payload::Tree(c)
        };
        Ok(Certificate { space, period, payload, meta })
    }

    /// The space with every axis wrapped by its period.
    pub fn torus(&self) -> Result<Signature> {
        let mut blocks = Vec::new();
        for (j, b) in self.space.blocks().iter().enumerate() {
            let moduli = self.space.axes(j).map(|a| self.period[a]).collect::<Option<Vec<_>>>();
            let moduli = moduli.ok_or_else(|| Error::Certificate("axis without a period".into()))?;
            blocks.push(Block { tile: b.tile.clone(), moduli: moduli.into_iter().map(Some).collect() });
        }
        Signature::new(blocks)
    }

    pub fn domain_size(&self) -> Option<u128> {
        self.period.iter().try_fold(1u128, |acc, p| p.map(|p| acc.saturating_mul(p as u128)))
    }

    /// Exhaustive partition check of one fundamental domain.
    pub fn verify_exhaustive(&self, limit: u128) -> Result<VerifyReport> {
        let torus = self.torus()?;
        let size = torus.finite_size().unwrap();
        if size > limit {
            return Err(Error::LimitExceeded { points: size, limit });
        }
        for (j, b) in torus.blocks().iter().enumerate() {
            if !b.fits() {
                return Err(Error::Certificate(format!("tile of block {j} does not fit in one period")));
            }
        }
        let owned;
        let placements = match &self.payload {
            Payload::Explicit(p) => p,
            Payload::Tree(c) => {
                owned = c.materialize(limit)?;
                &owned
            }
        };
        for pl in placements {
            let inside = pl.offset.len() == torus.num_axes()
                && pl.offset.iter().zip(torus.moduli()).all(|(x, m)| (0..m.unwrap()).contains(x));
            if !inside {
                return Err(Error::Certificate("placement offset outside the fundamental domain".into()));
            }
        }
        super::verify_exhaustive(&torus, placements, limit)
    }

    pub fn construction(&self) -> Result<Construction> {
        match &self.payload {
            Payload::Tree(c) => Ok(c.clone()),
            Payload::Explicit(p) => {
                let torus = Arc::new(self.torus()?);
                let c = Construction::explicit(torus.clone(), p.clone());
                let maps = self
                    .space
                    .blocks()
                    .iter()
                    .zip(torus.blocks())
                    .map(|(b, tb)| {
                        let axes = b
                            .moduli
                            .iter()
                            .zip(&tb.moduli)
                            .map(|(m, tm)| match m {
                                None => AxisMap::Reduce(tm.unwrap()),
                                Some(_) => AxisMap::Identity,
                            })
                            .collect();
                        Some((b.tile.clone(), Projection { axes }))
                    })
                    .collect();
                lift(c, maps)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let mut tiles = TileTable::default();
        let space = space_json(&self.space, &mut tiles);
        let payload = match &self.payload {
            Payload::Explicit(p) => {
                let mut p = p.clone();
                p.sort();
                json!({ "placements": p.iter().map(placement_json).collect::<Vec<_>>() })
            }
            Payload::Tree(c) => TreeWriter::write(c),
        };
        let mut meta = Map::new();
        for (k, v) in &self.meta.extra {
            meta.insert(k.clone(), v.clone());
        }
        meta.insert("pipeline".into(), json!(self.meta.pipeline));
        meta.insert("d".into(), json!(self.meta.d));
        json!({
            "space": space,
            "tiles": tiles.into_json(),
            "period": self.period,
            "mode": self.mode().as_str(),
            "payload": payload,
            "meta": Value::Object(meta),
        })
    }

    /// Canonical serialization: sorted keys, sorted placements, one line.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string(&self.to_json()).expect("json values serialize");
        s.push('\n');
        s
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let tiles = read_tiles(field(v, "tiles")?)?;
        let space = read_space(field(v, "space")?, &tiles)?;
        let period: Vec<Option<i64>> = serde_json::from_value(field(v, "period")?.clone())?;
        if period.len() != space.num_axes() {
            return Err(Error::Certificate("period length differs from axis count".into()));
        }
        let payload = field(v, "payload")?;
        let payload = match field(v, "mode")?.as_str() {
            Some("explicit-periodic") => {
                let list = field(payload, "placements")?.as_array().ok_or_else(|| bad("placements"))?;
                Payload::Explicit(list.iter().map(read_placement).collect::<Result<_>>()?)
            }
            Some("construction") => Payload::Tree(TreeReader::read(payload)?),
            _ => return Err(bad("mode")),
        };
        let meta_v = field(v, "meta")?.as_object().ok_or_else(|| bad("meta"))?;
        let mut meta = Meta::default();
        for (k, val) in meta_v {
            match k.as_str() {
                "pipeline" => meta.pipeline = val.as_str().ok_or_else(|| bad("pipeline"))?.into(),
                "d" => meta.d = val.as_u64().ok_or_else(|| bad("d"))? as usize,
                _ => {
                    meta.extra.insert(k.clone(), val.clone());
                }
            }
        }
        Ok(Certificate { space, period, payload, meta })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Certificate::from_json(&serde_json::from_str(text)?)
    }
}

pub(crate) fn bad(what: &str) -> Error {
    Error::Certificate(format!("missing or invalid field {what:?}"))
}

pub(crate) fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| bad(name))
}

pub(crate) fn as_usize(v: &Value, name: &str) -> Result<usize> {
    field(v, name)?.as_u64().map(|x| x as usize).ok_or_else(|| bad(name))
}

pub(crate) fn from_field<T: serde::de::DeserializeOwned>(v: &Value, name: &str) -> Result<T> {
    Ok(serde_json::from_value(field(v, name)?.clone())?)
}

pub(crate) fn placement_json(pl: &Placement) -> Value {
    json!({ "block": pl.block, "offset": pl.offset })
}

pub(crate) fn read_placement(v: &Value) -> Result<Placement> {
    Ok(Placement::new(as_usize(v, "block")?, from_field(v, "offset")?))
}

/// Deduplicated tile table shared by a whole document.
#[derive(Default)]
pub(crate) struct TileTable {
    tiles: Vec<Arc<TileSpec>>,
    index: HashMap<Vec<Point>, usize>,
}

impl TileTable {
    pub(crate) fn id(&mut self, t: &Arc<TileSpec>) -> usize {
        let key = t.points().to_vec();
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        self.tiles.push(t.clone());
        self.index.insert(key, self.tiles.len() - 1);
        self.tiles.len() - 1
    }

    fn into_json(self) -> Value {
        Value::Array(self.tiles.iter().map(|t| json!(t.points())).collect())
    }
}

// Tiles are read back verbatim: projected tiles are not min-0 normalized.
fn read_tiles(v: &Value) -> Result<Vec<Arc<TileSpec>>> {
    let list: Vec<Vec<Point>> = serde_json::from_value(v.clone())?;
    list.into_iter()
        .map(|pts| {
            let t = TileSpec::raw(pts).map_err(|e| Error::Certificate(format!("tile: {e}")))?;
            Ok(Arc::new(t))
        })
        .collect()
}

fn space_json(sig: &Signature, tiles: &mut TileTable) -> Value {
    let blocks: Vec<Value> = sig
        .blocks()
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let r = sig.axes(j);
            json!({ "from": r.start, "to": r.end, "tile": tiles.id(&b.tile), "moduli": b.moduli })
        })
        .collect();
    json!({ "axes": sig.num_axes(), "blocks": blocks })
}

fn read_space(v: &Value, tiles: &[Arc<TileSpec>]) -> Result<Signature> {
    let list = field(v, "blocks")?.as_array().ok_or_else(|| bad("blocks"))?;
    let mut blocks = Vec::new();
    for b in list {
        let tile = tiles.get(as_usize(b, "tile")?).ok_or_else(|| bad("tile"))?.clone();
        let moduli: Vec<Option<i64>> = from_field(b, "moduli")?;
        if as_usize(b, "to")? - as_usize(b, "from")? != moduli.len() {
            return Err(bad("from/to"));
        }
        blocks.push(Block { tile, moduli });
    }
    let sig = Signature::new(blocks)?;
    if sig.num_axes() != as_usize(v, "axes")? {
        return Err(bad("axes"));
    }
    Ok(sig)
}

/// Serializes a construction DAG as a flat node table; children are
/// referenced by index and always precede their parents.
pub(crate) struct TreeWriter {
    tiles: TileTable,
    sigs: Vec<Value>,
    sig_index: HashMap<*const Signature, usize>,
    nodes: Vec<Value>,
    ids: HashMap<*const super::Node, usize>,
}

impl TreeWriter {
    fn write(c: &Construction) -> Value {
        let mut w = TreeWriter {
            tiles: TileTable::default(),
            sigs: Vec::new(),
            sig_index: HashMap::new(),
            nodes: Vec::new(),
            ids: HashMap::new(),
        };
        let root = w.node(c);
        json!({
            "tiles": w.tiles.into_json(),
            "sigs": w.sigs,
            "nodes": w.nodes,
            "root": root,
        })
    }

    pub(crate) fn tile(&mut self, t: &Arc<TileSpec>) -> usize {
        self.tiles.id(t)
    }

    pub(crate) fn sig(&mut self, s: &Arc<Signature>) -> usize {
        if let Some(&i) = self.sig_index.get(&Arc::as_ptr(s)) {
            return i;
        }
        let v = space_json(s, &mut self.tiles);
        self.sigs.push(v);
        self.sig_index.insert(Arc::as_ptr(s), self.sigs.len() - 1);
        self.sigs.len() - 1
    }

    pub(crate) fn node(&mut self, c: &Construction) -> usize {
        if let Some(&i) = self.ids.get(&c.ptr()) {
            return i;
        }
        let mut obj = match c.kind() {
            NodeKind::Explicit(e) => {
                let mut p = e.placements.clone();
                p.sort();
                json!({
                    "placements": p.iter().map(placement_json).collect::<Vec<_>>(),
                    "holes": e.holes,
                })
            }
            NodeKind::Slice(s) => {
                let arms: Vec<Value> =
                    s.arms.iter().map(|(v, ch)| json!([v, self.node(ch)])).collect();
                let default = s.default.as_ref().map(|d| self.node(d));
                json!({ "block": s.block, "arms": arms, "default": default })
            }
            NodeKind::Embed(e) => {
                json!({ "child": self.node(&e.child), "perm": e.perm, "shift": e.shift })
            }
            NodeKind::Union(children) => {
                let ids: Vec<usize> = children.iter().map(|ch| self.node(ch)).collect();
                json!({ "children": ids })
            }
            NodeKind::Minus(m) => {
                let mut r = m.removed.clone();
                r.sort();
                json!({
                    "child": self.node(&m.child),
                    "removed": r.iter().map(placement_json).collect::<Vec<_>>(),
                })
            }
            NodeKind::Compose(cp) => {
                let dense = cp
                    .inner
                    .sig()
                    .blocks()
                    .iter()
                    .zip(&cp.refined)
                    .find(|(_, r)| **r)
                    .map(|(b, _)| b.tile.clone())
                    .expect("compose has a refined block");
                json!({
                    "outer": self.node(&cp.outer),
                    "inner": self.node(&cp.inner),
                    "factors": cp.factors,
                    "dense": self.tile(&dense),
                    "layout": cp.layout,
                })
            }
            NodeKind::Lift(l) => {
                let maps: Vec<Value> = l
                    .maps
                    .iter()
                    .map(|m| match m {
                        None => Value::Null,
                        Some(m) => {
                            let axes: Vec<Option<i64>> = m
                                .projection
                                .axes
                                .iter()
                                .map(|a| match a {
                                    AxisMap::Identity => None,
                                    AxisMap::Reduce(k) => Some(*k),
                                })
                                .collect();
                            json!({ "tile": self.tile(&m.tile), "projection": axes })
                        }
                    })
                    .collect();
                json!({ "child": self.node(&l.child), "maps": maps })
            }
            NodeKind::Void => json!({}),
            other => crate::general::write_node(other, self),
        };
        let sig = self.sig(c.sig());
        let o = obj.as_object_mut().expect("node objects");
        o.insert("kind".into(), json!(c.kind_name()));
        o.insert("sig".into(), json!(sig));
        self.nodes.push(obj);
        let id = self.nodes.len() - 1;
        self.ids.insert(c.ptr(), id);
        id
    }
}

pub(crate) struct TreeReader {
    tiles: Vec<Arc<TileSpec>>,
    sigs: Vec<Arc<Signature>>,
    nodes: Vec<Construction>,
}

impl TreeReader {
    fn read(v: &Value) -> Result<Construction> {
        let tiles = read_tiles(field(v, "tiles")?)?;
        let sig_list = field(v, "sigs")?.as_array().ok_or_else(|| bad("sigs"))?;
        let sigs = sig_list
            .iter()
            .map(|s| read_space(s, &tiles).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let mut r = TreeReader { tiles, sigs, nodes: Vec::new() };
        for n in field(v, "nodes")?.as_array().ok_or_else(|| bad("nodes"))? {
            let c = r.read_node(n)?;
            r.nodes.push(c);
        }
        r.nodes.get(as_usize(v, "root")?).cloned().ok_or_else(|| bad("root"))
    }

    pub(crate) fn tile(&self, v: &Value, name: &str) -> Result<Arc<TileSpec>> {
        self.tiles.get(as_usize(v, name)?).cloned().ok_or_else(|| bad(name))
    }

    pub(crate) fn child(&self, v: &Value, name: &str) -> Result<Construction> {
        self.child_id(as_usize(v, name)?)
    }

    pub(crate) fn child_id(&self, id: usize) -> Result<Construction> {
        self.nodes.get(id).cloned().ok_or_else(|| bad("child reference"))
    }

    fn read_node(&self, v: &Value) -> Result<Construction> {
        let sig = self.sigs.get(as_usize(v, "sig")?).cloned().ok_or_else(|| bad("sig"))?;
        let kind = field(v, "kind")?.as_str().ok_or_else(|| bad("kind"))?;
        let c = match kind {
            "explicit" => {
                let list = field(v, "placements")?.as_array().ok_or_else(|| bad("placements"))?;
                let p = list.iter().map(read_placement).collect::<Result<Vec<_>>>()?;
                let holes = field(v, "holes")?.as_bool().ok_or_else(|| bad("holes"))?;
                Construction::explicit_with(sig.clone(), p, holes)
            }
            "slice" => {
                let mut arms = BTreeMap::new();
                for a in field(v, "arms")?.as_array().ok_or_else(|| bad("arms"))? {
                    let (value, id): (Point, usize) = serde_json::from_value(a.clone())?;
                    arms.insert(value, self.child_id(id)?);
                }
                let default = match field(v, "default")? {
                    Value::Null => None,
                    d => Some(self.child_id(d.as_u64().ok_or_else(|| bad("default"))? as usize)?),
                };
                Construction::slice(sig.clone(), as_usize(v, "block")?, arms, default)?
            }
            "embed" => Construction::embed(
                self.child(v, "child")?,
                from_field(v, "perm")?,
                from_field(v, "shift")?,
            )?,
            "union" => {
                let ids: Vec<usize> = from_field(v, "children")?;
                let ch = ids.into_iter().map(|i| self.child_id(i)).collect::<Result<_>>()?;
                Construction::union(sig.clone(), ch)?
            }
            "minus" => {
                let list = field(v, "removed")?.as_array().ok_or_else(|| bad("removed"))?;
                let removed = list.iter().map(read_placement).collect::<Result<Vec<_>>>()?;
                Construction::minus(self.child(v, "child")?, removed)
            }
            "compose" => compose(
                self.child(v, "outer")?,
                self.child(v, "inner")?,
                ComposePlan {
                    factors: from_field(v, "factors")?,
                    dense: self.tile(v, "dense")?,
                    layout: Some(from_field(v, "layout")?),
                },
            )?,
            "lift" => {
                let child = self.child(v, "child")?;
                let mut maps = Vec::new();
                for m in field(v, "maps")?.as_array().ok_or_else(|| bad("maps"))? {
                    if m.is_null() {
                        maps.push(None);
                        continue;
                    }
                    let axes: Vec<Option<i64>> = from_field(m, "projection")?;
                    let axes = axes
                        .into_iter()
                        .map(|a| a.map_or(AxisMap::Identity, AxisMap::Reduce))
                        .collect();
                    maps.push(Some((self.tile(m, "tile")?, Projection { axes })));
                }
                lift(child, maps)?
            }
            "void" => Construction::void(sig.clone()),
            other => crate::general::read_node(other, v, sig.clone(), self)?,
        };
        if **c.sig() != *sig {
            return Err(Error::Certificate(format!("{kind} node frame differs from its record")));
        }
        Ok(c)
    }
}
