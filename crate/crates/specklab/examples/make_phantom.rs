//! Builds the canonical phantom, prints its region-of-interest registry and
//! writes both the exact image and a viewable PGM export.
//!
//! ```bash
//! cargo run --example make_phantom [output-dir]
//! ```

use specklab::io::{fimg::write_fimg, pgm::write_pgm};
use specklab::phantom::{build_phantom, PhantomLayout};

use std::path::PathBuf;

fn main() -> specklab::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("specklab-demo"));
    std::fs::create_dir_all(&out_dir)?;

    let layout = PhantomLayout::canonical();
    let image = build_phantom(&layout)?;

    println!(
        "phantom: {}x{}, background {}, foreground {}",
        layout.width,
        layout.height,
        layout.background_mean,
        layout.foreground_mean()
    );
    println!("strips (width@column):");
    for s in &layout.strips {
        print!("  {}@{}", s.width, s.col);
    }
    println!("\npoints at row {}: {:?}", layout.point_row, layout.point_cols);

    let registry = layout.roi_registry()?;
    let hb = registry.homogeneous_block;
    println!(
        "homogeneous block: ({}, {})..({}, {}) = {} pixels",
        hb.x0,
        hb.y0,
        hb.x1,
        hb.y1,
        hb.pixel_count()
    );
    println!(
        "line measure columns: {} | {} | {}",
        registry.line.left.x0, registry.line.center.x0, registry.line.right.x0
    );
    for e in &registry.edges {
        println!(
            "edge bands of the width-{} strip: inside cols {}..={}, outside cols {}..={}",
            e.strip_width, e.inside.x0, e.inside.x1, e.outside.x0, e.outside.x1
        );
    }

    let fimg = out_dir.join("phantom.fimg");
    let pgm = out_dir.join("phantom.pgm");
    write_fimg(&fimg, &image)?;
    let quant = write_pgm(&pgm, &image)?;
    println!(
        "\nwrote {} (exact) and {} (viewable, range [{}, {}])",
        fimg.display(),
        pgm.display(),
        quant.min,
        quant.max
    );
    Ok(())
}
