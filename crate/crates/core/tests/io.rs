//! File formats on real simulation output.

use std::fs;

use qcarpet::io::{
    decode_pgm, encode_pgm, parse_config, read_csv_slice, write_csv_slice, write_pgm_carpet,
};
use qcarpet::propagator::full_well_positions;
use qcarpet::{carpet_with_workers, density_slice, slit_coefficients, SlitAperture, SpaceTimeGrid, WellConfig};

#[test]
fn slice_survives_a_csv_round_trip() {
    let well = WellConfig::natural(1.0).unwrap();
    let slit = SlitAperture::within(0.245, 0.01, &well).unwrap();
    let c = slit_coefficients(&well, &slit, 2000).unwrap();
    let y = full_well_positions(&well, 1025).unwrap();
    let d = density_slice(&c, &well, &y, 3e-5).unwrap().density();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("slice.csv");
    write_csv_slice(&path, &y, &d).unwrap();
    let (y2, d2) = read_csv_slice(&path).unwrap();
    assert_eq!(y2.len(), y.len());
    for (a, b) in y.iter().zip(&y2).chain(d.iter().zip(&d2)) {
        assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn centred_carpet_image_is_mirrored() {
    let well = WellConfig::natural(50.0).unwrap();
    let slit = SlitAperture::within(0.0, 10.0, &well).unwrap();
    let c = slit_coefficients(&well, &slit, 500).unwrap();
    let grid = SpaceTimeGrid::over_period(&well, 129, 65).unwrap();
    let field = carpet_with_workers(&c, &well, &grid, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("carpet.pgm");
    write_pgm_carpet(&path, &field).unwrap();
    let bytes = fs::read(&path).unwrap();
    assert_eq!(bytes, encode_pgm(&field).unwrap());

    let img = decode_pgm(&bytes).unwrap();
    assert_eq!((img.width, img.height), (129, 65));
    assert_eq!(img.row(0), img.row(64));
    for r in 0..img.height {
        let row = img.row(r);
        assert!(row.iter().eq(row.iter().rev()), "row {r}");
    }
}

#[test]
fn shipped_configs_round_trip() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    for name in ["default.conf", "carpet.conf"] {
        let text = fs::read_to_string(format!("{root}/{name}")).unwrap();
        let config = parse_config(&text).unwrap();
        let again = parse_config(&config.to_string()).unwrap();
        assert_eq!(config, again, "{name}");
    }
}
