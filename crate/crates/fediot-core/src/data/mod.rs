//! Ingestion, cleaning, labeling, splitting and standardization of device
//! traffic tables, plus the synthetic non-IID generator.

mod split;
mod synth;
mod table;

pub use split::{
    split_and_scale, DeviceDataset, ScalerStats, DEFAULT_ANOMALY_MIX_RATIO, DEGENERATE_STD,
};
pub use synth::{device_manifold_for, synth_generate, DeviceManifold, SynthConfig};
pub use table::{RawTable, BENIGN_TAG};
