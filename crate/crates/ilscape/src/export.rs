//! CSV exports of intermediate and analysis results. Numbers are written in
//! their shortest exact form so repeated runs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use ilscape_core::analysis::{CellMatch, DistanceMatrix, MdsEmbedding, PredictionLevel, Ranked, SaliencyMap};
use ilscape_core::encode::SensorEncoding;
use ilscape_core::flowfield::AttributeKind;
use ilscape_core::sensor::SensorTree;
use ilscape_core::Vec3;

use crate::error::{write, Result};

/// `id,x,y,z,tri_index`; used for surface samples and driver particles.
pub fn points_csv(points: &[Vec3], triangles: &[usize]) -> String {
    let mut s = String::from("id,x,y,z,tri_index\n");
    for (i, (p, t)) in points.iter().zip(triangles).enumerate() {
        let _ = writeln!(s, "{i},{},{},{},{t}", p.x, p.y, p.z);
    }
    s
}

/// `id,depth,cx,cy,cz,size`
pub fn leaves_csv(tree: &SensorTree) -> String {
    let mut s = String::from("id,depth,cx,cy,cz,size\n");
    for l in tree.sensors() {
        let c = l.center();
        let _ = writeln!(s, "{},{},{},{},{},{}", l.id, l.depth, c.x, c.y, c.z, l.size);
    }
    s
}

/// `cell_i,cell_j,cell_k,ux,uy,uz,count`
pub fn field_csv(enc: &SensorEncoding) -> String {
    let f = &enc.field;
    let mut s = String::from("cell_i,cell_j,cell_k,ux,uy,uz,count\n");
    for (c, (u, n)) in f.vectors.iter().zip(&f.counts).enumerate() {
        let [i, j, k] = f.coords(c);
        let _ = writeln!(s, "{i},{j},{k},{},{},{},{n}", u.x, u.y, u.z);
    }
    s
}

/// `cell_i,cell_j,cell_k,value`
pub fn attribute_csv(enc: &SensorEncoding, a: AttributeKind) -> String {
    let mut s = String::from("cell_i,cell_j,cell_k,value\n");
    for (c, v) in enc.attributes.get(a).iter().enumerate() {
        let [i, j, k] = enc.field.coords(c);
        let _ = writeln!(s, "{i},{j},{k},{v}");
    }
    s
}

/// Writes the fields and attribute grids of every active sensor into `dir`.
pub fn write_fields(dir: &Path, sensors: &[SensorEncoding]) -> Result<()> {
    for enc in sensors {
        let id = enc.field.sensor_id;
        write(&dir.join(format!("sensor_{id}.csv")), field_csv(enc))?;
        for a in AttributeKind::ALL {
            write(&dir.join(format!("sensor_{id}_{}.csv", a.name())), attribute_csv(enc, a))?;
        }
    }
    Ok(())
}

/// Header row and first column hold the ids.
pub fn matrix_csv(m: &DistanceMatrix) -> String {
    let mut s = String::from("id");
    for id in &m.ids {
        let _ = write!(s, ",{id}");
    }
    s.push('\n');
    for (id, row) in m.ids.iter().zip(&m.values) {
        s.push_str(id);
        for v in row {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

/// `recall,precision`
pub fn pr_csv(curve: &[(f64, f64)]) -> String {
    let mut s = String::from("recall,precision\n");
    for (r, p) in curve {
        let _ = writeln!(s, "{r},{p}");
    }
    s
}

/// `rank,id,label,distance`
pub fn ranking_csv(r: &[Ranked]) -> String {
    let mut s = String::from("rank,id,label,distance\n");
    for (i, e) in r.iter().enumerate() {
        let _ = writeln!(s, "{},{},{},{}", i + 1, e.id, e.label.as_deref().unwrap_or(""), e.distance);
    }
    s
}

/// `id,label,x,y`
pub fn mds_csv(ids: &[String], labels: &[Option<String>], m: &MdsEmbedding) -> String {
    let mut s = String::from("id,label,x,y\n");
    for ((id, l), p) in ids.iter().zip(labels).zip(&m.points) {
        let _ = writeln!(s, "{id},{},{},{}", l.as_deref().unwrap_or(""), p[0], p[1]);
    }
    s
}

/// `vertex_id,saliency`
pub fn saliency_csv(map: &SaliencyMap) -> String {
    let mut s = String::from("vertex_id,saliency\n");
    for (i, v) in map.values.iter().enumerate() {
        let _ = writeln!(s, "{i},{v}");
    }
    s
}

/// `cell_i,cell_j,cell_k,saliency_1,saliency_2,score`
pub fn correspondence_csv(m: &[CellMatch]) -> String {
    let mut s = String::from("cell_i,cell_j,cell_k,saliency_1,saliency_2,score\n");
    for c in m {
        let [i, j, k] = c.cell;
        let _ = writeln!(s, "{i},{j},{k},{},{},{}", c.saliency[0], c.saliency[1], c.score);
    }
    s
}

/// `k,queries,accuracy,precision_at_recall_0.5`
pub fn prediction_csv(levels: &[PredictionLevel]) -> String {
    let mut s = String::from("k,queries,accuracy,precision_at_recall_0.5\n");
    for l in levels {
        let _ = writeln!(s, "{},{},{},{}", l.k, l.queries, l.accuracy, l.precision_at_half_recall);
    }
    s
}

/// `k,recall,precision` with the 11-point mean curve of every `k`.
pub fn prediction_pr_csv(levels: &[PredictionLevel]) -> String {
    let mut s = String::from("k,recall,precision\n");
    for l in levels {
        for (r, p) in &l.mean_pr {
            let _ = writeln!(s, "{},{r},{p}", l.k);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_layout() {
        let m = DistanceMatrix {
            ids: vec!["a".into(), "b".into()],
            values: vec![vec![0.0, 0.5], vec![0.5, 0.0]],
        };
        assert_eq!(matrix_csv(&m), "id,a,b\na,0,0.5\nb,0.5,0\n");
        assert_eq!(pr_csv(&[(0.5, 1.0), (1.0, 0.75)]), "recall,precision\n0.5,1\n1,0.75\n");
    }
}
