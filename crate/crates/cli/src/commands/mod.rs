pub mod geometry;
pub mod overhead_table;
pub mod placement;
pub mod simulate;
pub mod sweep;
