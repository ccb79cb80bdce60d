#include "proactive/data.hpp"

#include "proactive/error.hpp"
#include "text_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace proactive {

using nlohmann::json;

std::vector<std::size_t> FeatureSchema::cardinalities() const {
    std::vector<std::size_t> out;
    out.reserve(discrete.size());
    for (const auto& col : discrete) out.push_back(col.cardinality);
    return out;
}

void FeatureSchema::validate() const {
    if (num_features() == 0) throw ConfigError("schema declares no columns");
    if (embedding_dim == 0) throw ConfigError("embedding_dim must be positive");
    std::set<std::string> names;
    for (const auto& name : continuous) {
        if (!names.insert(name).second) throw ConfigError("duplicate column name '" + name + "'");
    }
    for (const auto& col : discrete) {
        if (!names.insert(col.name).second) throw ConfigError("duplicate column name '" + col.name + "'");
        if (col.cardinality == 0) throw ConfigError("discrete column '" + col.name + "' has zero cardinality");
        if (col.cardinality > embedding_dim) {
            throw ConfigError("discrete column '" + col.name + "' cardinality " + std::to_string(col.cardinality) +
                              " exceeds embedding_dim " + std::to_string(embedding_dim));
        }
    }
}

FeatureSchema FeatureSchema::with_default_embedding(std::vector<std::string> continuous,
                                                    std::vector<DiscreteColumn> discrete,
                                                    std::size_t fallback) {
    FeatureSchema schema{std::move(continuous), std::move(discrete), fallback};
    if (!schema.discrete.empty()) {
        schema.embedding_dim = 0;
        for (const auto& col : schema.discrete) schema.embedding_dim = std::max(schema.embedding_dim, col.cardinality);
    }
    return schema;
}

FeatureSchema parse_schema_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("schema is not valid JSON: ") + e.what());
    }
    FeatureSchema schema;
    try {
        if (doc.contains("continuous")) schema.continuous = doc.at("continuous").get<std::vector<std::string>>();
        if (doc.contains("discrete")) {
            for (const auto& item : doc.at("discrete")) {
                auto card = item.at("cardinality").get<std::int64_t>();
                if (card <= 0) throw ConfigError("discrete cardinality must be positive");
                schema.discrete.push_back({item.at("name").get<std::string>(), static_cast<std::size_t>(card)});
            }
        }
        if (doc.contains("embedding_dim")) {
            auto e = doc.at("embedding_dim").get<std::int64_t>();
            if (e <= 0) throw ConfigError("embedding_dim must be positive");
            schema.embedding_dim = static_cast<std::size_t>(e);
        } else {
            schema = FeatureSchema::with_default_embedding(schema.continuous, schema.discrete);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed schema: ") + e.what());
    }
    schema.validate();
    return schema;
}

std::string schema_to_json(const FeatureSchema& schema) {
    json doc;
    doc["continuous"] = schema.continuous;
    doc["discrete"] = json::array();
    for (const auto& col : schema.discrete) {
        doc["discrete"].push_back({{"name", col.name}, {"cardinality", col.cardinality}});
    }
    doc["embedding_dim"] = schema.embedding_dim;
    return doc.dump(2) + "\n";
}

FeatureSchema load_schema(const std::filesystem::path& path) {
    return parse_schema_json(detail::read_text_file(path));
}

void save_schema(const FeatureSchema& schema, const std::filesystem::path& path) {
    detail::write_text_file(path, schema_to_json(schema));
}

void RawSeries::validate() const {
    const std::size_t c = schema.num_continuous();
    if (values.cols() != schema.num_features()) {
        throw DataError("series has " + std::to_string(values.cols()) + " columns, schema declares " +
                        std::to_string(schema.num_features()));
    }
    for (std::size_t t = 0; t < values.rows(); ++t) {
        for (std::size_t j = 0; j < values.cols(); ++j) {
            const double v = values(t, j);
            if (!std::isfinite(v)) {
                throw DataError("non-finite value at row " + std::to_string(t + 1) + ", column " + std::to_string(j));
            }
            if (j >= c) {
                const auto card = schema.discrete[j - c].cardinality;
                if (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(card)) {
                    throw DataError("discrete value out of cardinality at row " + std::to_string(t + 1) + ", column '" +
                                    schema.discrete[j - c].name + "'");
                }
            }
        }
    }
    if (labels && labels->size() != values.rows()) {
        throw DataError("label count " + std::to_string(labels->size()) + " does not match " +
                        std::to_string(values.rows()) + " timesteps");
    }
}

RawSeries RawSeries::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > timesteps()) throw DataError("slice out of range");
    std::vector<double> data(values.data().begin() + static_cast<std::ptrdiff_t>(begin * values.cols()),
                             values.data().begin() + static_cast<std::ptrdiff_t>(end * values.cols()));
    RawSeries out{Matrix(end - begin, values.cols(), std::move(data)), std::nullopt, schema};
    if (labels) {
        out.labels = LabelVector(labels->begin() + static_cast<std::ptrdiff_t>(begin),
                                 labels->begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

std::vector<double> RawSeries::continuous_column(std::size_t j) const {
    std::vector<double> out(timesteps());
    for (std::size_t t = 0; t < timesteps(); ++t) out[t] = values(t, j);
    return out;
}

RawSeries parse_csv(const std::string& text, const FeatureSchema& schema) {
    schema.validate();
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV is empty (missing header row)");
    const auto header = detail::split_csv_line(line);

    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);

    std::vector<std::size_t> source; // schema index -> CSV column
    auto find = [&](const std::string& name) {
        auto it = position.find(name);
        if (it == position.end()) throw DataError("missing column '" + name + "' in CSV header");
        source.push_back(it->second);
    };
    for (const auto& name : schema.continuous) find(name);
    for (const auto& col : schema.discrete) find(col.name);

    const std::size_t width = schema.num_features();
    const std::size_t c = schema.num_continuous();
    std::vector<double> data;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < width; ++j) {
            const std::string& name = j < c ? schema.continuous[j] : schema.discrete[j - c].name;
            auto value = detail::parse_double(cells[source[j]]);
            if (!value || !std::isfinite(*value)) {
                throw DataError("non-finite or unparseable value at row " + std::to_string(row) + ", column '" + name + "'");
            }
            if (j >= c) {
                const auto card = schema.discrete[j - c].cardinality;
                if (*value != std::floor(*value) || *value < 0.0 || *value >= static_cast<double>(card)) {
                    throw DataError("discrete value out of cardinality at row " + std::to_string(row) + ", column '" +
                                    name + "'");
                }
            }
            data.push_back(*value);
        }
    }
    return RawSeries{Matrix(row, width, std::move(data)), std::nullopt, schema};
}

RawSeries load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                   const std::optional<std::filesystem::path>& labels_path) {
    auto series = parse_csv(detail::read_text_file(path), schema);
    if (labels_path) {
        auto labels = load_labels(*labels_path);
        if (labels.size() != series.timesteps()) {
            throw DataError("label file has " + std::to_string(labels.size()) + " rows, data has " +
                            std::to_string(series.timesteps()));
        }
        series.labels = std::move(labels);
    }
    return series;
}

LabelVector parse_labels(const std::string& text) {
    LabelVector labels;
    std::istringstream in(text);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        auto value = detail::parse_double(detail::trim(line));
        if (!value || (*value != 0.0 && *value != 1.0)) {
            throw DataError("label at row " + std::to_string(row) + " is not 0 or 1");
        }
        labels.push_back(*value == 1.0 ? 1 : 0);
    }
    return labels;
}

LabelVector load_labels(const std::filesystem::path& path) {
    return parse_labels(detail::read_text_file(path));
}

void save_csv(const RawSeries& series, const std::filesystem::path& path) {
    std::string out;
    const auto& schema = series.schema;
    const std::size_t c = schema.num_continuous();
    for (std::size_t j = 0; j < schema.num_features(); ++j) {
        if (j) out += ',';
        out += j < c ? schema.continuous[j] : schema.discrete[j - c].name;
    }
    out += '\n';
    for (std::size_t t = 0; t < series.timesteps(); ++t) {
        for (std::size_t j = 0; j < series.values.cols(); ++j) {
            if (j) out += ',';
            if (j < c) {
                out += detail::format_double(series.values(t, j));
            } else {
                out += std::to_string(static_cast<long long>(series.values(t, j)));
            }
        }
        out += '\n';
    }
    detail::write_text_file(path, out);
}

void save_labels(const LabelVector& labels, const std::filesystem::path& path) {
    std::string out;
    out.reserve(labels.size() * 2);
    for (auto v : labels) {
        out += v ? '1' : '0';
        out += '\n';
    }
    detail::write_text_file(path, out);
}

Tensor3 one_hot(const RawSeries& series) {
    const std::size_t d = series.schema.num_discrete();
    if (d == 0) throw DataError("no discrete features");
    const std::size_t c = series.schema.num_continuous();
    const std::size_t e = series.schema.embedding_dim;
    Tensor3 out(series.timesteps(), d, e);
    for (std::size_t t = 0; t < series.timesteps(); ++t) {
        for (std::size_t j = 0; j < d; ++j) {
            out(t, j, static_cast<std::size_t>(series.values(t, c + j))) = 1.0;
        }
    }
    return out;
}

Normalizer Normalizer::fit(const RawSeries& train) {
    if (train.timesteps() < 2) throw DataError("normalizer needs at least 2 training timesteps");
    std::vector<Range> ranges(train.schema.num_continuous());
    for (std::size_t j = 0; j < ranges.size(); ++j) {
        double lo = train.values(0, j);
        double hi = lo;
        for (std::size_t t = 1; t < train.timesteps(); ++t) {
            lo = std::min(lo, train.values(t, j));
            hi = std::max(hi, train.values(t, j));
        }
        ranges[j] = {lo, hi};
    }
    return Normalizer(std::move(ranges));
}

double Normalizer::apply(std::size_t column, double value) const {
    const auto& r = ranges_.at(column);
    if (r.max == r.min) return 0.0;
    return (value - r.min) / (r.max - r.min);
}

double Normalizer::invert(std::size_t column, double value) const {
    const auto& r = ranges_.at(column);
    if (r.max == r.min) return r.min;
    return value * (r.max - r.min) + r.min;
}

RawSeries Normalizer::apply(const RawSeries& series) const {
    if (series.schema.num_continuous() != ranges_.size()) throw DataError("normalizer/series column mismatch");
    RawSeries out = series;
    for (std::size_t t = 0; t < out.timesteps(); ++t) {
        for (std::size_t j = 0; j < ranges_.size(); ++j) out.values(t, j) = apply(j, series.values(t, j));
    }
    return out;
}

RawSeries Normalizer::invert(const RawSeries& series) const {
    if (series.schema.num_continuous() != ranges_.size()) throw DataError("normalizer/series column mismatch");
    RawSeries out = series;
    for (std::size_t t = 0; t < out.timesteps(); ++t) {
        for (std::size_t j = 0; j < ranges_.size(); ++j) out.values(t, j) = invert(j, series.values(t, j));
    }
    return out;
}

WindowBatch make_windows(const RawSeries& series, std::size_t window) {
    if (window == 0) throw ConfigError("window length must be positive");
    if (series.timesteps() <= window) {
        throw DataError("series too short: " + std::to_string(series.timesteps()) + " timesteps for window " +
                        std::to_string(window));
    }
    const std::size_t count = series.timesteps() - window;
    const std::size_t width = series.values.cols();
    WindowBatch batch;
    batch.window = window;
    batch.inputs.reserve(count);
    batch.targets = Matrix(count, width);
    for (std::size_t i = 0; i < count; ++i) {
        Matrix w(window, width);
        std::copy_n(series.values.data().begin() + static_cast<std::ptrdiff_t>(i * width), window * width,
                    w.data().begin());
        batch.inputs.push_back(std::move(w));
        auto target = series.values.row(i + window);
        std::copy(target.begin(), target.end(), batch.targets.row(i).begin());
    }
    return batch;
}

std::pair<RawSeries, RawSeries> split_validation(const RawSeries& series, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("validation fraction must lie in (0, 1)");
    const auto tail = static_cast<std::size_t>(std::floor(static_cast<double>(series.timesteps()) * fraction));
    const std::size_t cut = series.timesteps() - tail;
    return {series.slice(0, cut), series.slice(cut, series.timesteps())};
}

} // namespace proactive
