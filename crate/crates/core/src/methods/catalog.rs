use serde::{Deserialize, Serialize};

use crate::spec::MethodId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    IntervalBased,
    Statistical,
    Iterative,
    HumanCentered,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub default: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodDescriptor {
    pub method_id: MethodId,
    pub display_name: String,
    pub category: Category,
    pub short_description: String,
    pub long_description: String,
    pub parameters: Vec<ParameterSpec>,
}

fn param(name: &str, kind: &str, default: serde_json::Value) -> ParameterSpec {
    ParameterSpec {
        name: name.to_string(),
        kind: kind.to_string(),
        default,
    }
}

fn bins() -> ParameterSpec {
    param("binCount", "integer", 5.into())
}

pub fn descriptor(id: &MethodId) -> MethodDescriptor {
    use serde_json::Value::Null;
    let (name, category, short, long, parameters): (&str, Category, &str, &str, Vec<ParameterSpec>) = match id {
        MethodId::Unclassed => (
            "Unclassed",
            Category::Other,
            "No bins: colors follow the raw values\non a continuous ramp from min to max.",
            "Each region is colored by its position between the minimum and the maximum, so every \
             difference in value shows up as a difference in color. Good for seeing the full \
             distribution, harder to read exact values from.",
            vec![],
        ),
        MethodId::DefinedInterval => (
            "Defined Interval",
            Category::IntervalBased,
            "Bins of a fixed width you choose,\nstarting at the data minimum.",
            "Breaks are placed every N units from the minimum, so the bin count follows from the \
             range and the chosen width; the top bin may be narrower. Changing the bin count does \
             not affect it.",
            vec![param("definedIntervalSize", "number", Null)],
        ),
        MethodId::EqualInterval => (
            "Equal Interval",
            Category::IntervalBased,
            "Splits the value range into bins\nof identical width.",
            "The range between minimum and maximum is divided into k equal parts. Easy to read and \
             explain, but skewed data leaves most regions in one or two bins.",
            vec![bins()],
        ),
        MethodId::PrettyBreaks => (
            "Pretty Breaks",
            Category::HumanCentered,
            "Equal-width bins on round numbers\n(multiples of 1, 2 or 5).",
            "Picks a round step close to range / k and snaps the extents to its multiples, so the \
             legend shows tidy numbers. The resulting bin count can differ slightly from the \
             request.",
            vec![bins()],
        ),
        MethodId::GeometricInterval => (
            "Geometric Interval",
            Category::IntervalBased,
            "Bin widths grow by a constant factor\nfrom the smallest values upward.",
            "Extents form a geometric progression from the minimum to the maximum, i.e. equal \
             steps on a logarithmic scale. Suits data spanning several orders of magnitude; \
             non-positive data are shifted first.",
            vec![bins()],
        ),
        MethodId::ExponentialBinSizes => (
            "Exponential Bin Sizes",
            Category::IntervalBased,
            "Bin populations grow exponentially,\neach bin holding more regions than the last.",
            "Target bin sizes are proportional to growth^(j-1), rounded to whole regions with the \
             largest-remainder rule; breaks sit midway between neighbouring values at the cuts.",
            vec![bins(), param("expGrowth", "number", 2.0.into())],
        ),
        MethodId::ManualInterval => (
            "Manual Interval",
            Category::HumanCentered,
            "Breaks typed in by the mapmaker,\nfor legends that follow meaningful thresholds.",
            "Uses the supplied interior breaks as-is; the outer extents stretch to the data \
             minimum and maximum. Without breaks it starts from an equal-interval split.",
            vec![param("manualBreaks", "number[]", Null)],
        ),
        MethodId::Quantile => (
            "Quantile",
            Category::Statistical,
            "Every bin holds roughly the same\nnumber of regions.",
            "Breaks are the i/k quantiles of the data (linear interpolation between order \
             statistics). Produces an even spread of colors, at the cost of bins with very \
             different widths.",
            vec![bins()],
        ),
        MethodId::Percentile => (
            "Percentile",
            Category::Statistical,
            "Six bins at the 1st, 10th, 50th,\n90th and 99th percentiles.",
            "Highlights the extremes: the outer bins hold the lowest and highest 1% of regions, \
             the next ones the rest of the lowest and highest 10%, and the middle is split at the \
             median.",
            vec![],
        ),
        MethodId::BoxPlot => (
            "Box Plot",
            Category::Statistical,
            "Six bins from the quartiles and the\nbox-plot fences that mark outliers.",
            "Breaks at Q1 - f*IQR, Q1, the median, Q3 and Q3 + f*IQR. The outer bins collect the \
             outliers; fences outside the data range are dropped, which leaves fewer bins.",
            vec![param("iqrFactor", "number", 1.5.into())],
        ),
        MethodId::StdDeviation => (
            "Standard Deviation",
            Category::Statistical,
            "Bins measured in standard deviations\nabove and below the mean.",
            "Breaks at fixed multiples (whole or half) of the population standard deviation \
             around the mean. Shows how far each region departs from the average; best for \
             roughly symmetric data.",
            vec![bins(), param("stdDevStep", "whole|half", "whole".into())],
        ),
        MethodId::MaximumBreaks => (
            "Maximum Breaks",
            Category::IntervalBased,
            "Breaks fall in the widest gaps\nbetween consecutive sorted values.",
            "Sorts the values and places the k - 1 breaks at the midpoints of the largest jumps. \
             Keeps natural clusters intact but is sensitive to outliers, which often end up alone \
             in a bin.",
            vec![bins()],
        ),
        MethodId::NaturalBreaks => (
            "Natural Breaks",
            Category::Iterative,
            "Groups similar values together, minimizing\nthe spread inside each bin.",
            "Finds the partition of the sorted values into k groups with the smallest total sum \
             of squared deviations from the group means, solved exactly by dynamic programming.",
            vec![bins()],
        ),
        MethodId::Ckmeans => (
            "CK-Means",
            Category::Iterative,
            "Optimal one-dimensional k-means\nclustering of the values.",
            "Computes the globally optimal 1-D k-means partition with a fast dynamic program. \
             Same objective as natural breaks, reached by a different algorithm.",
            vec![bins()],
        ),
        MethodId::HeadTailBreaks => (
            "Head/Tail Breaks",
            Category::Iterative,
            "Splits repeatedly at the mean while\nthe values above it stay a minority.",
            "Designed for heavy-tailed data: each round puts a break at the mean and continues \
             with the values above it, stopping when they are no longer a clear minority. The bin \
             count comes from the data.",
            vec![param("headTailThreshold", "number", 0.4.into())],
        ),
        MethodId::Resiliency => (
            "Resiliency",
            Category::Other,
            "Consensus of several methods: each region\ngoes to the bin most methods agree on.",
            "Runs the member methods with the same bin count, takes each region's most frequent \
             bin and derives new breaks where that consensus bin changes along the sorted values.",
            vec![bins(), param("memberMethods", "string[]", Null)],
        ),
        MethodId::Custom(name) => return custom_descriptor(name),
    };
    MethodDescriptor {
        method_id: id.clone(),
        display_name: name.to_string(),
        category,
        short_description: short.to_string(),
        long_description: long.to_string(),
        parameters,
    }
}

/// Descriptor for a saved custom method.
pub fn custom_descriptor(name: &str) -> MethodDescriptor {
    MethodDescriptor {
        method_id: MethodId::Custom(name.to_string()),
        display_name: name.to_string(),
        category: Category::HumanCentered,
        short_description: "Custom bins saved from the Create view.\nExtents are fixed."
            .to_string(),
        long_description: "A user-defined set of bin extents. Regions outside the saved extents \
                           are placed in the nearest extreme bin."
            .to_string(),
        parameters: vec![],
    }
}

/// The sixteen built-in descriptors in catalog order.
pub fn catalog() -> Vec<MethodDescriptor> {
    MethodId::BUILTIN.iter().map(descriptor).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_entries_with_table_categories() {
        let cat = catalog();
        assert_eq!(cat.len(), 16);
        let count = |c: Category| cat.iter().filter(|d| d.category == c).count();
        assert_eq!(count(Category::IntervalBased), 5);
        assert_eq!(count(Category::Statistical), 4);
        assert_eq!(count(Category::Iterative), 3);
        assert_eq!(count(Category::HumanCentered), 2);
        assert_eq!(count(Category::Other), 2);
        for d in &cat {
            assert_eq!(d.short_description.lines().count(), 2, "{}", d.method_id);
        }
    }

    #[test]
    fn catalog_json_field_names() {
        let json = serde_json::to_value(descriptor(&MethodId::BoxPlot)).unwrap();
        let keys: Vec<&str> = json
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(
            keys,
            [
                "methodId",
                "displayName",
                "category",
                "shortDescription",
                "longDescription",
                "parameters"
            ]
        );
        assert_eq!(json["category"], "statistical");
    }
}
