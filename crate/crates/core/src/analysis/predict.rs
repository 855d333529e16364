use alloc::vec::Vec;

use super::{mean_curve, precision_at_recall, precision_recall, sort_ranking, DescriptorDb, Ranked};
use crate::descriptor::{distance, AttributeWeights, InteractionDescriptor};
use crate::encode::Encoder;
use crate::error::{Error, Result};
use crate::par;
use crate::trajectory::TrajectorySet;

/// Descriptors of the growing windows `[t_begin, t_begin + k·d/N]`, `k = 1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentedSignature {
    pub n_seg: usize,
    /// `None` where the window holds no motion inside the interaction space.
    pub descriptors: Vec<Option<InteractionDescriptor>>,
}

impl SegmentedSignature {
    pub fn segment(&self, k: usize) -> Result<Option<&InteractionDescriptor>> {
        if k == 0 || k > self.n_seg {
            return Err(Error::SegmentOutOfRange { k, max: self.n_seg });
        }
        Ok(self.descriptors[k - 1].as_ref())
    }
}

pub fn segment_signatures(encoder: &Encoder, ts: &TrajectorySet, n_seg: usize) -> Result<SegmentedSignature> {
    if n_seg < 2 {
        return Err(Error::InvalidParameter("at least two segments are required".into()));
    }
    let (Some(t0), Some(t1)) = (ts.t_begin(), ts.t_end()) else {
        return Err(Error::NoInteraction);
    };
    let d = t1 - t0;
    if !(d > 0.0) {
        return Err(Error::InvalidParameter("interaction duration must be positive".into()));
    }
    let cache = encoder.probe_cache(ts)?;
    let mut descriptors = Vec::with_capacity(n_seg);
    for k in 1..=n_seg {
        let end = if k == n_seg { t1 } else { t0 + d * k as f64 / n_seg as f64 };
        match encoder.encode_cached(&ts.clip_to_window(t0, end), &cache) {
            Ok(desc) => descriptors.push(Some(desc)),
            Err(Error::NoInteraction) => descriptors.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(SegmentedSignature { n_seg, descriptors })
}

/// Ranks the entries' segment-`k` descriptors against `query`. Entries whose
/// segment `k` is empty are skipped.
pub fn predict(db: &DescriptorDb, query: &InteractionDescriptor, k: usize, w: &AttributeWeights) -> Result<Vec<Ranked>> {
    let mut ranking = Vec::new();
    for e in db.entries() {
        let seg = e.segments.as_ref().ok_or(Error::SegmentOutOfRange { k, max: 0 })?;
        if let Some(d) = seg.segment(k)? {
            ranking.push(Ranked {
                id: e.id.clone(),
                label: e.label.clone(),
                distance: distance(query, d, w)?,
            });
        }
    }
    sort_ranking(&mut ranking);
    Ok(ranking)
}

/// Leave-one-out prediction quality at one segment count.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionLevel {
    pub k: usize,
    /// Number of entries with a non-empty segment `k`.
    pub queries: usize,
    /// Fraction of queries whose nearest other entry shares their label.
    pub accuracy: f64,
    pub mean_pr: Vec<(f64, f64)>,
    pub precision_at_half_recall: f64,
}

/// For every `k`, queries each entry's segment-`k` descriptor against the
/// segment-`k` descriptors of all other entries.
pub fn prediction_report(db: &DescriptorDb, w: &AttributeWeights) -> Result<Vec<PredictionLevel>> {
    let mut n_seg = usize::MAX;
    for e in db.entries() {
        if e.label.is_none() {
            return Err(Error::Unlabeled(e.id.clone()));
        }
        let s = e.segments.as_ref().ok_or(Error::SegmentOutOfRange { k: 1, max: 0 })?;
        n_seg = n_seg.min(s.n_seg);
    }
    if db.len() < 2 {
        return Err(Error::NotEnoughEntries { required: 2, actual: db.len() });
    }
    let ks: Vec<usize> = (1..=n_seg).collect();
    let levels = par::map(&ks, |&k| -> Result<PredictionLevel> {
        let mut curves = Vec::new();
        let (mut queries, mut correct) = (0usize, 0usize);
        for (i, e) in db.entries().iter().enumerate() {
            let Some(q) = e.segments.as_ref().and_then(|s| s.descriptors[k - 1].as_ref()) else {
                continue;
            };
            let label = e.label.as_deref().unwrap_or_default();
            let mut ranking = Vec::new();
            for (j, o) in db.entries().iter().enumerate() {
                if j == i {
                    continue;
                }
                if let Some(d) = o.segments.as_ref().and_then(|s| s.descriptors[k - 1].as_ref()) {
                    ranking.push(Ranked {
                        id: o.id.clone(),
                        label: o.label.clone(),
                        distance: distance(q, d, w)?,
                    });
                }
            }
            sort_ranking(&mut ranking);
            queries += 1;
            if ranking.first().is_some_and(|r| r.label.as_deref() == Some(label)) {
                correct += 1;
            }
            if let Some(c) = precision_recall(&ranking, label) {
                curves.push(c);
            }
        }
        let half = if curves.is_empty() {
            0.0
        } else {
            curves.iter().map(|c| precision_at_recall(c, 0.5)).sum::<f64>() / curves.len() as f64
        };
        Ok(PredictionLevel {
            k,
            queries,
            accuracy: if queries == 0 { 0.0 } else { correct as f64 / queries as f64 },
            mean_pr: mean_curve(&curves),
            precision_at_half_recall: half,
        })
    });
    levels.into_iter().collect()
}
