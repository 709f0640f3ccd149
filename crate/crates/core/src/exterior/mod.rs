//! Exterior calculus on a fixed 7-dimensional coframe `e^1 … e^7`.

mod form;
mod frame;
mod metric;
mod tensor;

pub(crate) use form::for_each_permutation;
pub use form::{
    blade_degree, blade_indices, blades_of_degree, canonical, merge_sign, Blade, KForm, Vector, DIM,
};
pub use frame::FrameAlgebra;
pub use metric::Metric;
pub use tensor::{Array, Sym2, Tensor2};
