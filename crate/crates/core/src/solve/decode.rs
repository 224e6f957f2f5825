use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::{LassoTrace, Letter, Model};
use crate::prop::{Owner, PropVar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("no loop selected")]
    NoLoop,
    #[error("multiple loops selected: {0:?}")]
    MultipleLoops(Vec<usize>),
}

/// Reads the `m` candidate traces out of an outer-block assignment. Missing
/// variables count as false. Duplicate traces are kept.
pub fn decode_model(
    outer: &BTreeMap<PropVar, bool>,
    aps: &[String],
    m: usize,
    k: usize,
) -> Result<Model, DecodeError> {
    let value = |v: &PropVar| outer.get(v).copied().unwrap_or(false);
    let loops: Vec<usize> = (0..k).filter(|&j| value(&PropVar::LoopSel(j))).collect();
    let l = match loops[..] {
        [] => return Err(DecodeError::NoLoop),
        [l] => l,
        _ => return Err(DecodeError::MultipleLoops(loops)),
    };
    let traces = (0..m)
        .map(|t| {
            let letters: Vec<Letter> = (0..k)
                .map(|j| {
                    aps.iter()
                        .filter(|ap| value(&PropVar::ap_step(Owner::Trace(t), ap.as_str(), j)))
                        .cloned()
                        .collect()
                })
                .collect();
            let cycle = letters[l..].to_vec();
            let mut stem = letters;
            stem.truncate(l);
            LassoTrace::new(stem, cycle).expect("loop is non-empty")
        })
        .collect();
    Ok(Model::new(traces).expect("decoded traces share one shape"))
}

/// Inverse of [`decode_model`]: the outer assignment describing `model`
/// with loop position `stem_len` and bound `stem_len + loop_len`.
pub fn encode_model(model: &Model, aps: &[String]) -> BTreeMap<PropVar, bool> {
    let (l, k) = (model.stem_len(), model.stem_len() + model.loop_len());
    let mut out = BTreeMap::new();
    for (t, trace) in model.traces().iter().enumerate() {
        for ap in aps {
            for j in 0..k {
                let v = PropVar::ap_step(Owner::Trace(t), ap.as_str(), j);
                out.insert(v, trace.letter_at(j).contains(ap));
            }
        }
    }
    for j in 0..k {
        out.insert(PropVar::LoopSel(j), j == l);
    }
    out
}
