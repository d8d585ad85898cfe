//! Features, metrics, synthetic phantoms and file formats around the solver.

mod features;
mod io;
mod metrics;
mod phantom;

pub use features::{difference_features, region_variance_feature, ClassMeans};
pub use io::{
    decode_feature_file, decode_pgm, encode_feature_file, encode_overlay, encode_pgm,
    read_feature_file, read_image_pgm, read_label_pgm, read_pgm, write_feature_file,
    write_label_pgm, write_mask_pgm, write_overlay, Pgm,
};
pub use metrics::{dice, smooth_dice_loss};
pub use phantom::{generate_phantom, generate_phantom_with_noise, Phantom, PhantomKind};
