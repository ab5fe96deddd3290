//! Measured-data pipeline: fast-fading removal, RSS normalization and
//! log-domain pathloss regression.

mod filter;
mod fit;
mod io;

pub use filter::{filter_samples, remove_fast_fading, ChebyshevLowpass, FilterParams, Reducer, RssSampleStream};
pub use fit::{fit_pathloss, normalize_rss, PathlossFit};
pub use io::{read_combined_csv, read_stream_csv, read_stream_index, CombinedRow, StreamEntry};
