//! The free group `F_k` on its Cayley tree.

mod cylinder;
mod model;
mod transfer;
mod word;

pub use cylinder::{parse_cylinder_set, Cylinder, CylinderSet};
pub use model::{random_word, EdgeLength, TreeIdeal, TreeModel, TreePoint};
pub use transfer::{count_prefix_suffix, transfer_matrix, transfer_matrix_count, LetterConstraint};
pub use word::{
    for_each_extension, sphere_size, word_at, word_index, words_of_length, BoundaryWord, Letter,
    ReducedWord,
};
