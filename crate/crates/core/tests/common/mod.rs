#![allow(dead_code)]

use binx_core::{join, parse_attributes, parse_geometry, Dataset, FeatureSeries};

pub const SAMPLE_CSV: &[u8] = include_bytes!("../../data/life_expectancy.csv");
pub const SAMPLE_GEOJSON: &[u8] = include_bytes!("../../data/us_counties_sample.geojson");

pub fn sample_dataset() -> Dataset {
    let attributes = parse_attributes(SAMPLE_CSV, "fips", Some("life_expectancy")).unwrap();
    let geometry = parse_geometry(SAMPLE_GEOJSON, "GEOID").unwrap();
    join("sample", geometry, attributes).unwrap()
}

pub fn sample_series() -> FeatureSeries {
    sample_dataset().series("life_expectancy").unwrap()
}
