//! Attribute histograms, the global interaction descriptor and its distance.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flowfield::{AttributeKind, CellSurface, NormMode, VectorField};
use crate::math::{exp, ln, sqrt};

pub use crate::flowfield::AttributeKind as Attribute;

pub const DEFAULT_BINS: usize = 16;
pub const MIN_BINS: usize = 2;
pub const ENCODER_VERSION: u32 = 1;

/// Per-attribute value that maps to the top of the `[0,1]` binning range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scales(pub [f64; 6]);

impl Scales {
    pub fn get(&self, a: AttributeKind) -> f64 {
        self.0[a.index()]
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = AttributeKind::ALL.into_iter().find(|a| !(self.get(*a) > 0.0) || !self.get(*a).is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("scale for {} must be positive", a.name())));
        }
        Ok(())
    }
}

impl Default for Scales {
    /// Calibrated on the bundled presets so typical values fill the range.
    fn default() -> Self {
        Scales([8.0, 8.0, 8.0, 8.0, 5.0, 1.0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttributeWeights(pub [f64; 6]);

impl AttributeWeights {
    pub fn uniform() -> Self {
        AttributeWeights([1.0; 6])
    }

    pub fn get(&self, a: AttributeKind) -> f64 {
        self.0[a.index()]
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("attribute weights must be non-negative".into()));
        }
        if self.0.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidParameter("at least one attribute weight must be positive".into()));
        }
        Ok(())
    }
}

impl Default for AttributeWeights {
    fn default() -> Self {
        // Mt, Md, Ms, Mw, M, O
        AttributeWeights([0.75, 1.0, 0.25, 0.75, 0.25, 1.0])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Bhattacharyya {
    /// `√(1 − BC)`, bounded in `[0,1]`.
    #[default]
    Bounded,
    /// `−ln BC`, unbounded for disjoint histograms.
    NegLog,
}

/// Quantized values of one attribute over one sensor.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalHistogram {
    pub attribute: AttributeKind,
    pub sensor_id: usize,
    pub sensor_size: f64,
    /// Bins as given by the weighted sum, before renormalization.
    pub raw: Vec<f64>,
    /// Unit-sum bins, or all zero when inactive.
    pub bins: Vec<f64>,
    pub active: bool,
}

/// Bin of a value already scaled to `[0,1]`.
#[inline]
pub fn bin_index(t: f64, bins: usize) -> usize {
    ((t * bins as f64) as usize).min(bins - 1)
}

/// Histogram of `values` over the occupied cells of `field`. Each cell adds
/// `t/N · exp(−(‖p_cell − p_M‖/r)²)` to the bin of `t = clamp(value/scale)`.
///
/// A sensor with occupied cells whose contributions are all zero puts its
/// whole mass in bin 0.
pub fn local_histogram(
    attribute: AttributeKind,
    values: &[f64],
    field: &VectorField,
    surface: &[Option<CellSurface>],
    bins: usize,
    scale: f64,
) -> LocalHistogram {
    let mut raw = alloc::vec![0.0; bins];
    let r = field.size;
    let mut any = false;
    for c in field.occupied_cells() {
        any = true;
        let t = (values[c] / scale).clamp(0.0, 1.0);
        let [i, j, k] = field.coords(c);
        let w = match surface.get(c).copied().flatten() {
            Some(s) => {
                let d = field.cell_center(i, j, k).distance(s.point) / r;
                exp(-d * d)
            }
            None => 1.0,
        };
        raw[bin_index(t, bins)] += t * w / bins as f64;
    }
    let total: f64 = raw.iter().sum();
    let norm = if !any {
        alloc::vec![0.0; bins]
    } else if total > 0.0 {
        raw.iter().map(|v| v / total).collect()
    } else {
        let mut h = alloc::vec![0.0; bins];
        h[0] = 1.0;
        h
    };
    LocalHistogram {
        attribute,
        sensor_id: field.sensor_id,
        sensor_size: r,
        raw,
        bins: norm,
        active: any,
    }
}

/// Volume-weighted mean of the active local histograms, renormalized.
pub fn aggregate_histograms<'a, I>(locals: I, bins: usize) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a LocalHistogram>,
{
    let mut acc = alloc::vec![0.0; bins];
    let mut weight = 0.0;
    for h in locals {
        if !h.active {
            continue;
        }
        if h.bins.len() != bins {
            return Err(Error::BinMismatch { left: bins, right: h.bins.len() });
        }
        let w = h.sensor_size * h.sensor_size * h.sensor_size;
        for (a, b) in acc.iter_mut().zip(&h.bins) {
            *a += b * w;
        }
        weight += w;
    }
    if weight == 0.0 {
        return Err(Error::NoInteraction);
    }
    let total: f64 = acc.iter().sum();
    Ok(acc.into_iter().map(|v| v / total).collect())
}

/// Settings that must agree for two descriptors to be compared.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorMeta {
    pub version: u32,
    pub bins: usize,
    pub resolution: usize,
    pub norm_mode: NormMode,
    pub scales: Scales,
    pub active_sensors: usize,
    pub label: Option<String>,
}

/// Six global attribute histograms plus encoding metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionDescriptor {
    pub meta: DescriptorMeta,
    pub histograms: [Vec<f64>; 6],
}

impl InteractionDescriptor {
    pub fn histogram(&self, a: AttributeKind) -> &[f64] {
        &self.histograms[a.index()]
    }

    pub fn label(&self) -> Option<&str> {
        self.meta.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.meta.label = Some(label.into());
        self
    }

    /// Fails with the name of the first setting that differs.
    pub fn check_comparable(&self, other: &Self) -> Result<()> {
        let (a, b) = (&self.meta, &other.meta);
        let field = if a.bins != b.bins {
            "bins"
        } else if a.resolution != b.resolution {
            "resolution"
        } else if a.norm_mode != b.norm_mode {
            "norm_mode"
        } else if a.scales != b.scales {
            "scales"
        } else if a.version != b.version {
            "version"
        } else {
            return Ok(());
        };
        Err(Error::Incomparable { field })
    }

    /// Structural checks on a descriptor built or loaded from outside.
    pub fn validate(&self) -> Result<()> {
        if self.meta.bins < MIN_BINS {
            return Err(Error::InvalidParameter(alloc::format!("bins must be at least {MIN_BINS}")));
        }
        self.meta.scales.validate()?;
        for a in AttributeKind::ALL {
            let h = self.histogram(a);
            if h.len() != self.meta.bins {
                return Err(Error::BinMismatch { left: self.meta.bins, right: h.len() });
            }
            if h.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidParameter(alloc::format!("hist_{} has invalid entries", a.name())));
            }
            let s: f64 = h.iter().sum();
            if (s - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidParameter(alloc::format!("hist_{} sums to {s}", a.name())));
            }
        }
        Ok(())
    }
}

/// Bhattacharyya distance between two unit-sum histograms.
pub fn bhattacharyya(h: &[f64], k: &[f64], form: Bhattacharyya) -> Result<f64> {
    if h.len() != k.len() {
        return Err(Error::BinMismatch { left: h.len(), right: k.len() });
    }
    // Σ h_i rounds away from 1, and the square root would amplify that
    if h == k {
        return Ok(0.0);
    }
    let bc: f64 = h.iter().zip(k).map(|(a, b)| sqrt(a * b)).sum();
    let bc = bc.clamp(0.0, 1.0);
    Ok(match form {
        Bhattacharyya::Bounded => sqrt(1.0 - bc),
        Bhattacharyya::NegLog => {
            if bc == 0.0 {
                f64::INFINITY
            } else {
                (-ln(bc)).max(0.0)
            }
        }
    })
}

/// `Σ_a w_a · D_B(h_a, k_a) / 6`.
pub fn distance(a: &InteractionDescriptor, b: &InteractionDescriptor, w: &AttributeWeights) -> Result<f64> {
    distance_with(a, b, w, Bhattacharyya::Bounded)
}

pub fn distance_with(
    a: &InteractionDescriptor,
    b: &InteractionDescriptor,
    w: &AttributeWeights,
    form: Bhattacharyya,
) -> Result<f64> {
    a.check_comparable(b)?;
    let mut sum = 0.0;
    for attr in AttributeKind::ALL {
        let wa = w.get(attr);
        if wa != 0.0 {
            sum += wa * bhattacharyya(a.histogram(attr), b.histogram(attr), form)?;
        }
    }
    Ok(sum / AttributeKind::ALL.len() as f64)
}
