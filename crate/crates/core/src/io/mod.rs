//! Configuration files, curve CSV and SVG output.

pub mod config;
pub mod csv;
pub mod svg;
pub mod units;

pub use config::{
    parse_config, serialize_config, ConfigError, ConfigErrorKind, SimulationConfig, SweepConfig,
    DEFAULT_PROFILE,
};
pub use csv::{curve_to_csv, parse_curve_csv, read_curve_csv, write_curve_csv};
pub use svg::{curve_to_svg, write_curve_svg};
pub use units::{format_quantity, parse_quantity, Dimension, UnitError};
