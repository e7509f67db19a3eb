//! Query-acceleration preprocessing: dominated-connection filtering,
//! contraction hierarchies (full and core), and bucket structures for
//! batched walking-distance queries.

pub mod buckets;
pub mod filter;
pub mod hierarchy;

pub use buckets::{
    build_buckets, build_reverse_buckets, bucket_many_to_one, bucket_many_to_one_into,
    bucket_one_to_many, bucket_one_to_many_into, Buckets, StopBuckets,
};
pub use filter::{board_connections, filter_dominated, Connection, FilteredBoard, FilteredBoards};
pub use hierarchy::{
    build_ch, build_core_ch, ch_query, ch_query_with, ChData, CoreChData, DEFAULT_CORE_DEGREE,
};
