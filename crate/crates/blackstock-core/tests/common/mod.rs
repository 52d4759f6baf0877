#![allow(unused_imports)]

pub use blackstock_core::presets::*;
