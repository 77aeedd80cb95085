// natural_breaks on life_expectancy: 5 bin(s), extents [64.05, 69.33, 75.39, 77.565, 80.36500000000001, 84.29]
use binx_core::{manual_interval, BinningResult, FeatureSeries, Result};

pub fn reclassify(series: &FeatureSeries) -> Result<BinningResult> {
    let breaks = [69.33, 75.39, 77.565, 80.36500000000001];
    manual_interval(series, &breaks)
}
