//! Task specifications, compilation, reachability-steered sequence
//! generation and dataset serialization.

mod compile;
mod generate;
mod images;
mod io;
mod spec;

pub use compile::{compile_task, CompiledTask};
pub use generate::{
    count_violations, derive_seed, generate_dataset, generate_dataset_compiled, generate_sequence,
    positive_count, sequence_rng, Dataset, SequenceSample, Split, GENERATOR_VERSION,
};
pub use images::{attach_image_indices, ImagePools};
pub use io::{read_dataset, sidecar_path, write_dataset};
pub use spec::{
    builtin_task, DomainSpec, LengthRange, ResolvedSpec, SplitSizes, TaskSpec, VariableDecl, BUILTIN_TASKS,
    DEFAULT_SEED,
};
