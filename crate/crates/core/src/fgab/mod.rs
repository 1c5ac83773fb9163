//! Finitely generated abelian groups, their homomorphisms, and Smith normal form.

mod group;
mod hom;
mod lattice;
mod matrix;
mod partition;
mod snf;

pub use group::{cokernel, torsion_and_rank, FgAbGroup};
pub use hom::{homology, kernel_image_cokernel, quotient_by_matrix, GroupHom, Subgroup};
pub use lattice::{integer_kernel, Lattice, Subquotient};
pub use matrix::IntMatrix;
pub use partition::{
    embeds, extension_candidates, factorize, groups_of_order, is_quotient_of, lr_coefficient,
    order_statistics, partitions, primary_partitions,
};
pub use snf::{decompose, smith_normal_form, Snf};
