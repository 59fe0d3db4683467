//! Target functions, covariate supports, noise models and synthetic datasets.

mod dataset;
mod function;
mod noise;
mod support;

pub use dataset::{generate_dataset, sidecar_path, Dataset, DatasetMeta};
pub use function::{builtin_target, holder_spot_check, BuiltinTarget, HolderCheck, HolderTarget, ScalarFn, FD_STEP};
pub use noise::NoiseSpec;
pub use support::{distance_to_support, sample_x, Embedding, MinkowskiSet, SupportSpec};
