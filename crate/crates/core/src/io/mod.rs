//! Persistence: images, models, datasets, and the metrics log.

mod dataset;
mod image_io;
mod metrics;
mod model;

pub use dataset::{
    generate_dataset, generate_samples, inner_boundary, render_digit, salt_and_pepper,
    write_dataset, DatasetManifest, GeneratorConfig, MANIFEST_NAME,
};
pub use image_io::{
    decode_pbm, decode_png, encode_pbm, encode_png, load_image, save_image, PbmVariant,
};
pub use metrics::{append_metrics, MetricsRecord, Phase, METRICS_HEADER};
pub use model::{decode_model, encode_model, load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
