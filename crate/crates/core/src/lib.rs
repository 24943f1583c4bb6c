//! Lossless compression toolkit for integer time series.
//!
//! A pipeline is a chain of compression-aiding transforms (delta, zero-run
//! RLE, QuaRs) followed by one coder, either in-repo (Exp-Golomb, bit
//! packing, Huffman, DRH, range coding, LZSS) or an external backend. The
//! [`harness`] module runs benchmark matrices and transform ablations over
//! synthetic and ingested data.
//!
//! ```
//! use tscodec::{decompress, CoderSpec, Pipeline, TimeSeries, TransformChain};
//!
//! let data = vec![TimeSeries::new((0..1000).map(|i| i / 10).collect())];
//! let chain: TransformChain = "delta,rle0".parse().unwrap();
//! let coder: CoderSpec = "expgolomb".parse().unwrap();
//! let packed = Pipeline::new(chain, coder).compress(&data).unwrap();
//! assert!(packed.bytes.len() < 2000 / 4);
//! assert_eq!(decompress(&packed.bytes).unwrap(), data);
//! ```

pub mod backends;
pub mod coders;
pub mod container;
pub mod error;
pub mod harness;
pub mod ingest;
pub mod metrics;
pub mod num;
pub mod pipeline;
pub mod series;
pub mod synth;
pub mod transforms;

pub use backends::{BackendDescriptor, BackendId};
pub use coders::{Coder, CoderId, CoderSpec, SampleWidth};
pub use container::Container;
pub use error::{Error, Result};
pub use ingest::{load_csv, quantize_column, CsvOptions, Dataset};
pub use metrics::{aad, cardinality, entropy_and_limit, entropy_bits, size_metrics};
pub use num::Real;
pub use pipeline::{compress_with, decompress, Compressed, Pipeline};
pub use series::TimeSeries;
pub use synth::{generate, Case, SynthSpec};
pub use transforms::{chain_apply, chain_invert, Transform, TransformChain};

pub type SeriesStats = metrics::SeriesStats<f64>;
pub type SizeReport = metrics::SizeReport<f64>;
pub type QuantMeta = ingest::QuantMeta<f64>;

pub type SeriesStatsF32 = metrics::SeriesStats<f32>;
pub type SizeReportF32 = metrics::SizeReport<f32>;
pub type QuantMetaF32 = ingest::QuantMeta<f32>;
