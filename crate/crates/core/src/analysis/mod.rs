//! Applications built on descriptors: distance matrices, retrieval with
//! precision/recall, MDS embedding, saliency, correspondence and prediction.

mod mds;
mod predict;
mod saliency;

use alloc::string::String;
use alloc::vec::Vec;

pub use mds::{mds_embed, MdsEmbedding};
pub use predict::{predict, prediction_report, segment_signatures, PredictionLevel, SegmentedSignature};
pub use saliency::{correspondence, saliency, CellMatch, SaliencyMap};

use crate::descriptor::{distance, AttributeWeights, InteractionDescriptor};
use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Debug, PartialEq)]
pub struct DbEntry {
    pub id: String,
    pub label: Option<String>,
    pub descriptor: InteractionDescriptor,
    /// Cumulative time-window descriptors; `None` for windows with no motion.
    pub segments: Option<SegmentedSignature>,
}

impl DbEntry {
    pub fn new(id: impl Into<String>, descriptor: InteractionDescriptor) -> Self {
        DbEntry {
            id: id.into(),
            label: descriptor.meta.label.clone(),
            descriptor,
            segments: None,
        }
    }
}

/// Mutually comparable descriptors with unique ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DescriptorDb {
    entries: Vec<DbEntry>,
}

impl DescriptorDb {
    pub fn new(entries: Vec<DbEntry>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.id == e.id) {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            if let Some(first) = entries.first() {
                first.descriptor.check_comparable(&e.descriptor)?;
            }
            if let Some(seg) = &e.segments {
                for d in seg.descriptors.iter().flatten() {
                    e.descriptor.check_comparable(d)?;
                }
            }
        }
        Ok(DescriptorDb { entries })
    }

    pub fn entries(&self) -> &[DbEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&DbEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// The database without entry `index`, for leave-one-out evaluation.
    pub fn without(&self, index: usize) -> DescriptorDb {
        let mut entries = self.entries.clone();
        entries.remove(index);
        DescriptorDb { entries }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    pub ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

/// All pairwise distances; exactly symmetric with a zero diagonal.
pub fn distance_matrix(db: &DescriptorDb, w: &AttributeWeights) -> Result<DistanceMatrix> {
    if db.len() < 2 {
        return Err(Error::NotEnoughEntries { required: 2, actual: db.len() });
    }
    let n = db.len();
    let rows: Vec<usize> = (0..n).collect();
    let upper = par::map(&rows, |&i| {
        ((i + 1)..n)
            .map(|j| distance(&db.entries[i].descriptor, &db.entries[j].descriptor, w))
            .collect::<Result<Vec<f64>>>()
    });
    let mut values = alloc::vec![alloc::vec![0.0; n]; n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, d) in row?.into_iter().enumerate() {
            let j = i + 1 + off;
            values[i][j] = d;
            values[j][i] = d;
        }
    }
    Ok(DistanceMatrix {
        ids: db.entries.iter().map(|e| e.id.clone()).collect(),
        values,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ranked {
    pub id: String,
    pub label: Option<String>,
    pub distance: f64,
}

/// Ascending distance, ties broken by id.
pub(crate) fn sort_ranking(r: &mut [Ranked]) {
    r.sort_by(|a, b| a.distance.total_cmp(&b.distance).then_with(|| a.id.cmp(&b.id)));
}

/// The `top_k` entries closest to `query` (all entries if `top_k` exceeds the size).
pub fn retrieve(db: &DescriptorDb, query: &InteractionDescriptor, top_k: usize, w: &AttributeWeights) -> Result<Vec<Ranked>> {
    let mut ranking = db
        .entries
        .iter()
        .map(|e| {
            Ok(Ranked {
                id: e.id.clone(),
                label: e.label.clone(),
                distance: distance(query, &e.descriptor, w)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sort_ranking(&mut ranking);
    ranking.truncate(top_k);
    Ok(ranking)
}

/// `(recall, precision)` points, one per relevant hit, walking the ranking
/// until every entry of the query's class is recalled. Precision is
/// interpolated: the best precision at this or any higher recall. `None` when
/// the class does not occur in the ranking.
pub fn precision_recall(ranking: &[Ranked], label: &str) -> Option<Vec<(f64, f64)>> {
    let relevant = ranking.iter().filter(|r| r.label.as_deref() == Some(label)).count();
    if relevant == 0 {
        return None;
    }
    let mut raw = Vec::with_capacity(relevant);
    let mut hits = 0;
    for (rank, r) in ranking.iter().enumerate() {
        if r.label.as_deref() == Some(label) {
            hits += 1;
            raw.push((hits as f64 / relevant as f64, hits as f64 / (rank + 1) as f64));
            if hits == relevant {
                break;
            }
        }
    }
    let mut best: f64 = 0.0;
    for p in raw.iter_mut().rev() {
        best = best.max(p.1);
        p.1 = best;
    }
    Some(raw)
}

/// Interpolated precision at the given recall level.
pub fn precision_at_recall(curve: &[(f64, f64)], recall: f64) -> f64 {
    curve
        .iter()
        .filter(|(r, _)| *r >= recall - 1e-12)
        .map(|(_, p)| *p)
        .fold(0.0, f64::max)
}

/// Mean interpolated precision at recall 0, 0.1, …, 1 over several curves.
pub fn mean_curve(curves: &[Vec<(f64, f64)>]) -> Vec<(f64, f64)> {
    (0..=10)
        .map(|i| {
            let r = i as f64 / 10.0;
            let p = if curves.is_empty() {
                0.0
            } else {
                curves.iter().map(|c| precision_at_recall(c, r)).sum::<f64>() / curves.len() as f64
            };
            (r, p)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LooReport {
    /// Nearest neighbour of each entry (excluding itself).
    pub nearest: Vec<Ranked>,
    /// Fraction of entries whose nearest neighbour shares their label.
    pub accuracy: f64,
    pub mean_intra: f64,
    pub mean_inter: f64,
    pub mean_pr: Vec<(f64, f64)>,
    pub mean_precision_at_half_recall: f64,
}

/// Leave-one-out retrieval over a labeled database.
pub fn leave_one_out(db: &DescriptorDb, w: &AttributeWeights) -> Result<LooReport> {
    if let Some(e) = db.entries.iter().find(|e| e.label.is_none()) {
        return Err(Error::Unlabeled(e.id.clone()));
    }
    let m = distance_matrix(db, w)?;
    let n = db.len();
    let mut nearest = Vec::with_capacity(n);
    let mut curves = Vec::new();
    let mut correct = 0;
    let (mut intra, mut ni, mut inter, mut ne) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..n {
        let label = db.entries[i].label.as_deref().unwrap_or_default();
        let mut ranking: Vec<Ranked> = (0..n)
            .filter(|&j| j != i)
            .map(|j| Ranked {
                id: db.entries[j].id.clone(),
                label: db.entries[j].label.clone(),
                distance: m.values[i][j],
            })
            .collect();
        sort_ranking(&mut ranking);
        if ranking[0].label.as_deref() == Some(label) {
            correct += 1;
        }
        if let Some(c) = precision_recall(&ranking, label) {
            curves.push(c);
        }
        nearest.push(ranking[0].clone());
        for j in (i + 1)..n {
            if db.entries[j].label == db.entries[i].label {
                intra += m.values[i][j];
                ni += 1;
            } else {
                inter += m.values[i][j];
                ne += 1;
            }
        }
    }
    let mean = |s: f64, c: usize| if c == 0 { 0.0 } else { s / c as f64 };
    let half = curves.iter().map(|c| precision_at_recall(c, 0.5)).sum::<f64>();
    Ok(LooReport {
        nearest,
        accuracy: correct as f64 / n as f64,
        mean_intra: mean(intra, ni),
        mean_inter: mean(inter, ne),
        mean_pr: mean_curve(&curves),
        mean_precision_at_half_recall: mean(half, curves.len()),
    })
}


#[cfg(test)]
mod tests {
    use super::testutil::desc;
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn db() -> DescriptorDb {
        let mut e = Vec::new();
        for (i, x) in [0.0, 0.05, 0.1, 0.5, 0.55, 0.6, 0.9, 0.95].iter().enumerate() {
            let label = if *x < 0.3 { "a" } else if *x < 0.8 { "b" } else { "c" };
            e.push(DbEntry::new(format!("e{i}"), desc(*x, label)));
        }
        DescriptorDb::new(e).unwrap()
    }

    #[test]
    fn matrix_is_symmetric_with_zero_diagonal() {
        let m = distance_matrix(&db(), &AttributeWeights::default()).unwrap();
        for i in 0..m.ids.len() {
            assert_eq!(m.values[i][i], 0.0);
            for j in 0..m.ids.len() {
                assert_eq!(m.values[i][j], m.values[j][i]);
            }
        }
        let dup = DescriptorDb::new(vec![DbEntry::new("x", desc(0.3, "a")), DbEntry::new("y", desc(0.3, "a"))]).unwrap();
        assert_eq!(distance_matrix(&dup, &AttributeWeights::default()).unwrap().values[0][1], 0.0);
    }

    #[test]
    fn db_rejects_duplicates_and_incomparable() {
        let e = vec![DbEntry::new("x", desc(0.3, "a")), DbEntry::new("x", desc(0.4, "a"))];
        assert_eq!(DescriptorDb::new(e), Err(Error::DuplicateId("x".into())));
        let mut other = desc(0.4, "a");
        other.meta.resolution = 16;
        let e = vec![DbEntry::new("x", desc(0.3, "a")), DbEntry::new("y", other)];
        assert_eq!(DescriptorDb::new(e), Err(Error::Incomparable { field: "resolution" }));
    }

    #[test]
    fn self_query_ranks_first() {
        let d = db();
        let w = AttributeWeights::default();
        let r = retrieve(&d, &d.entries()[4].descriptor, 3, &w).unwrap();
        assert_eq!(r[0].id, "e4");
        assert_eq!(r[0].distance, 0.0);
        assert_eq!(r.len(), 3);
        assert_eq!(retrieve(&d, &desc(0.2, "a"), 100, &w).unwrap().len(), d.len());
    }

    #[test]
    fn ties_break_by_id() {
        let e = vec![DbEntry::new("b", desc(0.3, "a")), DbEntry::new("a", desc(0.3, "a"))];
        let d = DescriptorDb::new(e).unwrap();
        let r = retrieve(&d, &desc(0.1, "a"), 2, &AttributeWeights::default()).unwrap();
        assert_eq!(r[0].id, "a");
    }

    fn ranked(labels: &[&str]) -> Vec<Ranked> {
        labels
            .iter()
            .enumerate()
            .map(|(i, l)| Ranked { id: format!("{i}"), label: Some((*l).into()), distance: i as f64 })
            .collect()
    }

    #[test]
    fn pr_curve_is_interpolated() {
        let r = ranked(&["a", "b", "a", "a", "b"]);
        let c = precision_recall(&r, "a").unwrap();
        let third = 1.0 / 3.0;
        assert_eq!(c.len(), 3);
        assert!((c[0].0 - third).abs() < 1e-12 && c[0].1 == 1.0);
        // raw precision at the second hit is 2/3, at the third 3/4: interpolated 3/4
        assert!((c[1].1 - 0.75).abs() < 1e-12);
        assert!((c[2].1 - 0.75).abs() < 1e-12);
        assert!((precision_at_recall(&c, 0.5) - 0.75).abs() < 1e-12);
        assert!(precision_recall(&r, "zzz").is_none());
        let m = mean_curve(&[c]);
        assert_eq!(m.len(), 11);
        assert_eq!(m[0], (0.0, 1.0));
    }

    #[test]
    fn ranking_is_invariant_under_monotone_transforms() {
        let d = db();
        let w = AttributeWeights::default();
        let q = desc(0.52, "b");
        let a: Vec<String> = retrieve(&d, &q, 8, &w).unwrap().into_iter().map(|r| r.id).collect();
        let mut scaled: Vec<Ranked> = retrieve(&d, &q, 8, &w)
            .unwrap()
            .into_iter()
            .map(|mut r| {
                r.distance = libm::exp(3.0 * r.distance) + 1.0;
                r
            })
            .collect();
        scaled.reverse();
        sort_ranking(&mut scaled);
        assert_eq!(a, scaled.into_iter().map(|r| r.id).collect::<Vec<_>>());
    }

    #[test]
    fn leave_one_out_on_separated_classes() {
        let rep = leave_one_out(&db(), &AttributeWeights::default()).unwrap();
        assert_eq!(rep.accuracy, 1.0);
        assert!(rep.mean_intra < rep.mean_inter);
        let mut d = db().entries().to_vec();
        d[0].label = None;
        assert_eq!(
            leave_one_out(&DescriptorDb::new(d).unwrap(), &AttributeWeights::default()),
            Err(Error::Unlabeled("e0".into()))
        );
    }
}
