//! Text format for codes and the binary container for encoded blocks.

pub mod container;
pub mod spec_text;

pub use container::{read_container, spec_hash, write_container, Container, ContainerError};
pub use spec_text::{parse_code_spec, parse_code_spec_unchecked, render_code_spec, SpecError};
