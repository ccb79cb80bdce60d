#pragma once

#include "proactive/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace proactive {

struct DiscreteColumn {
    std::string name;
    std::size_t cardinality = 0;

    bool operator==(const DiscreteColumn&) const = default;
};

/// Which columns are continuous, which are discrete (with their category
/// counts), and the one-hot width shared by every discrete column.
///
/// Series values are always stored in schema order: the continuous columns
/// first, then the discrete columns.
struct FeatureSchema {
    std::vector<std::string> continuous;
    std::vector<DiscreteColumn> discrete;
    std::size_t embedding_dim = 1;

    std::size_t num_continuous() const { return continuous.size(); }
    std::size_t num_discrete() const { return discrete.size(); }
    std::size_t num_features() const { return continuous.size() + discrete.size(); }
    std::vector<std::size_t> cardinalities() const;

    /// Throws ConfigError when names collide, a cardinality exceeds the
    /// embedding width, or no column is declared.
    void validate() const;

    /// Schema with embedding_dim set to the largest discrete cardinality
    /// (or `fallback` when there are no discrete columns).
    static FeatureSchema with_default_embedding(std::vector<std::string> continuous,
                                                std::vector<DiscreteColumn> discrete,
                                                std::size_t fallback = 1);

    bool operator==(const FeatureSchema&) const = default;
};

FeatureSchema parse_schema_json(const std::string& text);
std::string schema_to_json(const FeatureSchema& schema);
FeatureSchema load_schema(const std::filesystem::path& path);
void save_schema(const FeatureSchema& schema, const std::filesystem::path& path);

using LabelVector = std::vector<std::uint8_t>;

struct RawSeries {
    Matrix values; // timesteps x (c + d), discrete columns hold integer codes
    std::optional<LabelVector> labels;
    FeatureSchema schema;

    std::size_t timesteps() const { return values.rows(); }

    /// Throws DataError when a discrete entry is not an in-range integer, a
    /// value is non-finite, or the label count disagrees with the row count.
    void validate() const;

    /// Rows [begin, end) with matching labels.
    RawSeries slice(std::size_t begin, std::size_t end) const;

    /// Continuous column `j` as a contiguous vector.
    std::vector<double> continuous_column(std::size_t j) const;
};

/// Reads a data CSV with a header row. Columns are matched by name and
/// reordered into schema order; extra columns are ignored.
RawSeries load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                   const std::optional<std::filesystem::path>& labels_path = std::nullopt);

/// Same as load_csv but from in-memory text (used by tests and by load_csv).
RawSeries parse_csv(const std::string& text, const FeatureSchema& schema);

/// Single column of 0/1 values without a header.
LabelVector load_labels(const std::filesystem::path& path);
LabelVector parse_labels(const std::string& text);

void save_csv(const RawSeries& series, const std::filesystem::path& path);
void save_labels(const LabelVector& labels, const std::filesystem::path& path);

/// One-hot expansion of the discrete columns: timesteps x d x e.
Tensor3 one_hot(const RawSeries& series);

/// Per-continuous-column min-max scaling fitted on a training split.
class Normalizer {
public:
    struct Range {
        double min = 0.0;
        double max = 0.0;
        bool operator==(const Range&) const = default;
    };

    Normalizer() = default;
    explicit Normalizer(std::vector<Range> ranges) : ranges_(std::move(ranges)) {}

    static Normalizer fit(const RawSeries& train);

    double apply(std::size_t column, double value) const;
    double invert(std::size_t column, double value) const;

    RawSeries apply(const RawSeries& series) const;
    RawSeries invert(const RawSeries& series) const;

    const std::vector<Range>& ranges() const { return ranges_; }

    bool operator==(const Normalizer&) const = default;

private:
    std::vector<Range> ranges_;
};

/// Sliding windows of length N with stride 1 and a horizon-1 target.
struct WindowBatch {
    std::vector<Matrix> inputs; // each N x (c + d), discrete columns as codes
    Matrix targets;             // num_windows x (c + d)
    std::size_t window = 0;

    std::size_t size() const { return inputs.size(); }
};

WindowBatch make_windows(const RawSeries& series, std::size_t window);

/// Chronological split: the last `fraction` of rows become the validation part.
std::pair<RawSeries, RawSeries> split_validation(const RawSeries& series, double fraction = 0.2);

} // namespace proactive
