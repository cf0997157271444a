pub mod linalg;
pub mod presentation;
pub mod scalars;
pub mod series;
pub mod periodic;
pub mod cohomology;
pub mod section_ring;
pub mod harbater;
pub mod assembly;
