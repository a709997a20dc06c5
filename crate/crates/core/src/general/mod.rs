//! Tilings of `Z^d` by arbitrary finite tiles of `Z^b`.
//!
//! A tile `A` of `G = Z_k^b` is densified to `A u (A + x)`, corner sets of
//! powers of the dense set are cut out and re-filled through extra
//! dimensions, and a special `Z^b` factor carries copies of the original
//! tile over the holes. Levels are composed until the dense set is all of
//! `G`, and the result is lifted back to `Z^d`.

mod blueprint;
mod csets;
mod deconv;
mod dens;
mod denser;
mod holes;
mod pipeline;

pub use blueprint::Blueprint;
pub use csets::{m_csets, removed_cset, use_cset, RemovedCset, UseCset};
pub use deconv::{periodic_deconvolution, solve_g, solve_g_const, MultiDimFn, Target};
pub use dens::{Class, Classes, Dens};
pub use denser::{Denser, DenserTiler};
pub use holes::{cover_holes, greedy_periodic, CoverPlan, Holes, PeriodicPlan, MAX_PERIOD};
pub use pipeline::{synthesize, synthesize_with, GeneralTrace, Level};

use std::sync::Arc;

use serde_json::{json, Value};

use crate::construction::certificate::{as_usize, field, from_field, TreeReader, TreeWriter};
use crate::construction::{Construction, NodeKind};
use crate::error::{Error, Result};
use crate::simple::PeriodicFn;
use crate::space::Signature;

fn dens_json(d: &Dens, w: &mut TreeWriter) -> Value {
    json!({ "group": d.group, "tile": w.tile(&d.tile), "shift": d.shift })
}

fn read_dens(v: &Value, r: &TreeReader) -> Result<Arc<Dens>> {
    let v = field(v, "dens")?;
    Ok(Arc::new(Dens::with_shift(from_field(v, "group")?, r.tile(v, "tile")?, from_field(v, "shift")?)?))
}

/// Recipe nodes are stored by their parameters and rebuilt on load.
pub(crate) fn write_node(kind: &NodeKind, w: &mut TreeWriter) -> Value {
    match kind {
        NodeKind::RemovedCset(n) => json!({ "dens": dens_json(&n.dens, w), "d": n.d, "i": n.i }),
        NodeKind::UseCset(n) => {
            json!({ "dens": dens_json(&n.dens, w), "d": n.d, "i": n.i, "input": w.node(&n.input) })
        }
        NodeKind::Blueprint(n) => json!({ "dens": dens_json(&n.dens, w), "r": n.r }),
        NodeKind::DenserTiler(n) => json!({ "dens": dens_json(&n.dens, w), "d": n.d, "m": n.m }),
        NodeKind::Holes(h) => {
            let plan = match &h.plan {
                CoverPlan::Periodic(p) => json!({
                    "period": p.period,
                    "g": { "modulus": p.g.modulus, "values": p.g.values },
                    "sets": p.sets,
                }),
                CoverPlan::Spiral(_) => Value::Null,
            };
            json!({
                "tile": w.tile(&h.tile),
                "dens": dens_json(&h.denser.dens, w),
                "d0": h.denser.d0,
                "plan": plan,
            })
        }
        _ => unreachable!("structural nodes are written by the tree writer"),
    }
}

pub(crate) fn read_node(kind: &str, v: &Value, sig: Arc<Signature>, r: &TreeReader) -> Result<Construction> {
    let dens = read_dens(v, r)?;
    let c = match kind {
        "removed_cset" => removed_cset(&dens, as_usize(v, "d")?, as_usize(v, "i")?)?,
        "use_cset" => use_cset(&dens, r.child(v, "input")?, as_usize(v, "i")?)?,
        "blueprint" => Blueprint::construction(&dens, as_usize(v, "r")?),
        "denser" => DenserTiler::construction(&dens, as_usize(v, "d")?, as_usize(v, "m")?)?,
        "holes" => {
            let tile = r.tile(v, "tile")?;
            let denser = Arc::new(Denser::new(dens, as_usize(v, "d0")?)?);
            let h = match field(v, "plan")? {
                Value::Null => Holes::new(tile, denser)?,
                p => {
                    let g = field(p, "g")?;
                    let plan = PeriodicPlan {
                        period: as_usize(p, "period")?,
                        g: PeriodicFn { modulus: from_field(g, "modulus")?, values: from_field(g, "values")? },
                        sets: from_field(p, "sets")?,
                    };
                    Holes::with_plan(tile, denser, plan)?
                }
            };
            Construction::from_kind(Arc::new(h.signature()?), NodeKind::Holes(h))
        }
        other => return Err(Error::Certificate(format!("unknown node kind {other:?}"))),
    };
    if **c.sig() != *sig {
        return Err(Error::Certificate(format!("{kind} node frame differs from its record")));
    }
    Ok(c)
}
