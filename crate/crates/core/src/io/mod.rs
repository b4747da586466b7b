//! File formats: run configuration, snapshots, manifests and schedules.

pub mod config;
pub mod manifest;
pub mod schedule_file;
pub mod snapshot;

pub use config::{parse_config, parse_real, Picture, RunConfig, OUTPUT_ROOT_ENV};
pub use manifest::{format_manifest, write_manifest, ManifestSummary};
pub use schedule_file::{format_schedule, parse_schedule, read_schedule, write_schedule};
pub use snapshot::{
    decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, AxisMeta, FieldData,
    Snapshot, SnapshotHeader, SNAPSHOT_FORMAT, SNAPSHOT_MAGIC,
};
