//! Exponent algebra, test-function families, evaluation of the weighted
//! Hardy–Sobolev functional, and lower bounds for its best constant.

mod exponents;
mod family;
mod functional;
mod optimize;
mod reduce;

pub use exponents::{exponent_algebra, interpolation_bound, interpolation_exponents, DerivedExponents, HardyParams};
pub use family::{
    family_axis_power, family_bump, family_custom, family_radial_power, family_sphere_fj, family_tent, Family, Shape,
    TestFunction,
};
pub use functional::{evaluate_functional, holder_step_check, EvalConfig, EvalMethod, HolderStep, SideValues};
pub use optimize::{
    default_box, estimate_constant, estimate_constant_with, family_members, ConstantEstimate, DiscreteProblem,
    OptimizeConfig, Strategy, TraceRow, MAX_GRID_CELLS,
};
pub use reduce::{integrate_1d, integrate_axisym, Quad};

#[cfg(test)]
mod tests;
