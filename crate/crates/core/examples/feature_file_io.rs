//! Writing and reading feature stacks, masks and overlays.

use csstd::pipeline::{
    decode_feature_file, encode_feature_file, read_feature_file, write_feature_file,
    write_mask_pgm, write_overlay,
};
use csstd::{
    cs_std_solve_multiphase, difference_features, generate_phantom, ClassMeans, EdgeWeight,
    PhantomKind, SolverConfig,
};

fn main() -> csstd::Result<()> {
    let dir = std::env::temp_dir().join("csstd-feature-file-io");
    std::fs::create_dir_all(&dir)?;

    let ph = generate_phantom(PhantomKind::NestedDisks, 96, 0)?;
    let features = difference_features(&ph.image, &ClassMeans::new(ph.means.clone())?);
    let path = dir.join("features.ff1");
    write_feature_file(&path, &features)?;
    let back = read_feature_file(&path)?;
    println!(
        "wrote {} channels to {}, read back {}",
        features.len(),
        path.display(),
        back.len()
    );

    let bytes = encode_feature_file(&features)?;
    match decode_feature_file(&bytes[..bytes.len() - 1]) {
        Err(e) => println!("truncated file rejected: {e}"),
        Ok(_) => println!("truncated file unexpectedly accepted"),
    }

    let cfg = SolverConfig::default().with_channels(back.len());
    let (stack, _) = cs_std_solve_multiphase(&back, &EdgeWeight::uniform(96, 96), &cfg)?;
    write_mask_pgm(dir.join("channel1.pgm"), &stack.channels()[0], 255)?;
    write_overlay(dir.join("overlay.ppm"), &ph.image, &stack)?;
    println!("mask and overlay written to {}", dir.display());
    Ok(())
}
