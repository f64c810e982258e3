//! Elementary moves on skeleton graphs and the transport of objects along them.

mod em1;
mod family;
mod trace;

use serde::{Deserialize, Serialize};

use crate::error::{CpmError, Result};
use crate::ribbon::{Id, Skeleton};

pub use em1::{
    apply_em1, apply_em1_inverse, apply_em1_prime, chain_object, chain_skeleton, em1_inverse_object, em1_object,
    em1_prime_objects, em1_right_cover, em1_right_graph,
};
pub use family::{rewrite_family, transport_family, FamilyRewrite};
pub use trace::{
    edge_name, family_step, graph_hash, hash_value, inject_zero_arrow, measure, reduce_to_unit_weights, same_up_to_symmetry,
    snapshot, target_weights, verify_transport, RewriteTrace, Snapshot, StepReport, TraceStep, VerifyReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    #[serde(rename = "EM1")]
    Em1,
    #[serde(rename = "EM1_INV")]
    Em1Inv,
    #[serde(rename = "EM1_PRIME")]
    Em1Prime,
}

/// Where a move was applied: the spoke runs it consumed and the wheels it inserted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSite {
    pub kind: MoveKind,
    pub downs: Vec<Id>,
    pub ups: Vec<Id>,
    #[serde(default)]
    pub inserted: Vec<(Id, Id)>,
}

impl MoveSite {
    pub fn family(rw: &FamilyRewrite) -> MoveSite {
        MoveSite { kind: MoveKind::Em1Prime, downs: rw.downs.clone(), ups: rw.ups.clone(), inserted: rw.kron.clone() }
    }

    /// Edges whose stalks change because they now carry composites.
    pub fn merged_edges(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(d) = self.downs.last() {
            out.push(format!("down:{d}"));
        }
        if let Some(u) = self.ups.last() {
            out.push(format!("up:{u}"));
        }
        out
    }

    pub fn family_index(&self, sk: &Skeleton) -> Result<usize> {
        sk.families
            .iter()
            .position(|f| f.downs == self.downs)
            .ok_or_else(|| CpmError::Pattern("no family matches the move site".into()))
    }
}
