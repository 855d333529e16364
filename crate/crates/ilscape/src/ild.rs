//! `.ild` descriptor files (TOML). Segment descriptors for prediction are
//! stored as `[[segments]]` tables sharing the top-level metadata.

use std::path::Path;

use ilscape_core::analysis::SegmentedSignature;
use ilscape_core::descriptor::{DescriptorMeta, InteractionDescriptor, Scales, ENCODER_VERSION};
use ilscape_core::flowfield::NormMode;
use serde::{Deserialize, Serialize};

use crate::error::{read, write, Context, Error, Result};

/// The six histograms under their file keys. Flattened into the tables
/// below, which therefore cannot use `deny_unknown_fields`; unknown keys are
/// caught by [`check_keys`] instead.
#[derive(Serialize, Deserialize)]
struct Histograms {
    #[serde(rename = "hist_Mt")]
    mt: Vec<f64>,
    #[serde(rename = "hist_Md")]
    md: Vec<f64>,
    #[serde(rename = "hist_Ms")]
    ms: Vec<f64>,
    #[serde(rename = "hist_Mw")]
    mw: Vec<f64>,
    #[serde(rename = "hist_M")]
    m: Vec<f64>,
    #[serde(rename = "hist_O")]
    o: Vec<f64>,
}

const HIST_KEYS: [&str; 6] = ["hist_Mt", "hist_Md", "hist_Ms", "hist_Mw", "hist_M", "hist_O"];
const TOP_KEYS: [&str; 8] = ["version", "bins", "resolution", "norm_mode", "scales", "active_sensors", "label", "segments"];
const SEGMENT_KEYS: [&str; 2] = ["k", "active_sensors"];

impl Histograms {
    fn from_array(h: &[Vec<f64>; 6]) -> Self {
        let [mt, md, ms, mw, m, o] = h.clone();
        Histograms { mt, md, ms, mw, m, o }
    }

    fn into_array(self) -> [Vec<f64>; 6] {
        [self.mt, self.md, self.ms, self.mw, self.m, self.o]
    }
}

#[derive(Serialize, Deserialize)]
struct Segment {
    k: usize,
    active_sensors: usize,
    #[serde(flatten)]
    histograms: Option<Histograms>,
}

#[derive(Serialize, Deserialize)]
struct IldFile {
    version: u32,
    bins: usize,
    resolution: usize,
    norm_mode: String,
    scales: [f64; 6],
    active_sensors: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(flatten)]
    histograms: Histograms,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    segments: Vec<Segment>,
}

fn check_keys(table: &toml::Table, allowed: &[&str], path: &Path, what: &str) -> Result<()> {
    match table.keys().find(|k| !allowed.contains(&k.as_str()) && !HIST_KEYS.contains(&k.as_str())) {
        Some(k) => Err(Error::parse(path, what.to_string(), format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}

/// Contents of one `.ild` file.
#[derive(Clone, Debug, PartialEq)]
pub struct IldDocument {
    pub descriptor: InteractionDescriptor,
    pub segments: Option<SegmentedSignature>,
}

pub fn ild_string(descriptor: &InteractionDescriptor, segments: Option<&SegmentedSignature>) -> String {
    let m = &descriptor.meta;
    let segments = segments.map_or_else(Vec::new, |s| {
        s.descriptors
            .iter()
            .enumerate()
            .map(|(i, d)| Segment {
                k: i + 1,
                active_sensors: d.as_ref().map_or(0, |d| d.meta.active_sensors),
                histograms: d.as_ref().map(|d| Histograms::from_array(&d.histograms)),
            })
            .collect()
    });
    let file = IldFile {
        version: m.version,
        bins: m.bins,
        resolution: m.resolution,
        norm_mode: m.norm_mode.name().into(),
        scales: m.scales.0,
        active_sensors: m.active_sensors,
        label: m.label.clone(),
        histograms: Histograms::from_array(&descriptor.histograms),
        segments,
    };
    toml::to_string(&file).expect("descriptor serializes")
}

pub fn save_ild(path: &Path, descriptor: &InteractionDescriptor, segments: Option<&SegmentedSignature>) -> Result<()> {
    write(path, ild_string(descriptor, segments))
}

pub fn load_ild(path: &Path) -> Result<IldDocument> {
    parse_ild(&read(path)?, path)
}

pub fn parse_ild(text: &str, path: &Path) -> Result<IldDocument> {
    let syntax = |e: toml::de::Error| {
        let at = e.span().map_or_else(|| "byte ?".to_string(), |s| format!("byte {}", s.start));
        Error::parse(path, at, e.message().trim().to_string())
    };
    let table: toml::Table = toml::from_str(text).map_err(syntax)?;
    check_keys(&table, &TOP_KEYS, path, "top level")?;
    if let Some(toml::Value::Array(segs)) = table.get("segments") {
        for (i, s) in segs.iter().enumerate() {
            if let toml::Value::Table(t) = s {
                check_keys(t, &SEGMENT_KEYS, path, &format!("segment {}", i + 1))?;
            }
        }
    }
    let file: IldFile = toml::from_str(text).map_err(syntax)?;
    if file.version != ENCODER_VERSION {
        return Err(Error::parse(
            path,
            "version",
            format!("unsupported descriptor version {} (expected {ENCODER_VERSION})", file.version),
        ));
    }
    let norm_mode = NormMode::parse(&file.norm_mode)
        .ok_or_else(|| Error::parse(path, "norm_mode", format!("unknown norm mode `{}`", file.norm_mode)))?;
    let meta = DescriptorMeta {
        version: file.version,
        bins: file.bins,
        resolution: file.resolution,
        norm_mode,
        scales: Scales(file.scales),
        active_sensors: file.active_sensors,
        label: file.label,
    };
    let descriptor = InteractionDescriptor {
        meta: meta.clone(),
        histograms: file.histograms.into_array(),
    };
    descriptor.validate().context(|| path.display().to_string())?;
    let segments = if file.segments.is_empty() {
        None
    } else {
        let n_seg = file.segments.len();
        let mut descriptors = Vec::with_capacity(n_seg);
        for (i, s) in file.segments.into_iter().enumerate() {
            if s.k != i + 1 {
                return Err(Error::parse(path, "segments", format!("segment {} is stored as k = {}", i + 1, s.k)));
            }
            let d = s.histograms.map(|h| InteractionDescriptor {
                meta: DescriptorMeta {
                    active_sensors: s.active_sensors,
                    ..meta.clone()
                },
                histograms: h.into_array(),
            });
            if let Some(d) = &d {
                d.validate().context(|| format!("{} segment {}", path.display(), i + 1))?;
            }
            descriptors.push(d);
        }
        Some(SegmentedSignature { n_seg, descriptors })
    };
    Ok(IldDocument { descriptor, segments })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(x: f64) -> InteractionDescriptor {
        InteractionDescriptor {
            meta: DescriptorMeta {
                version: ENCODER_VERSION,
                bins: 4,
                resolution: 8,
                norm_mode: NormMode::Direction,
                scales: Scales::default(),
                active_sensors: 12,
                label: Some("swirl".into()),
            },
            histograms: std::array::from_fn(|a| vec![0.1, 0.2 + x, 0.3 - x + a as f64 * 0.0, 0.4]),
        }
    }

    #[test]
    fn round_trip() {
        let d = desc(0.01 / 3.0);
        let seg = SegmentedSignature {
            n_seg: 3,
            descriptors: vec![None, Some(desc(0.05)), Some(d.clone())],
        };
        let text = ild_string(&d, Some(&seg));
        let back = parse_ild(&text, Path::new("a.ild")).unwrap();
        assert_eq!(back.descriptor, d);
        assert_eq!(back.segments.unwrap().descriptors[2].as_ref(), Some(&d));
        let plain = parse_ild(&ild_string(&d, None), Path::new("a.ild")).unwrap();
        assert!(plain.segments.is_none());
    }

    #[test]
    fn rejects_other_versions_and_unknown_keys() {
        let text = ild_string(&desc(0.0), None).replace("version = 1", "version = 99");
        assert!(parse_ild(&text, Path::new("a.ild")).unwrap_err().to_string().contains("version"));
        let text = format!("{}extra = 1\n", ild_string(&desc(0.0), None));
        assert!(parse_ild(&text, Path::new("a.ild")).is_err());
    }

    #[test]
    fn syntax_errors_carry_a_byte_offset() {
        let e = parse_ild("version = 1\nbins = [\n", Path::new("a.ild")).unwrap_err();
        assert!(e.to_string().contains("byte"), "{e}");
    }
}
