#include "proactive/error.hpp"
#include "proactive/forecaster.hpp"

#include <nlohmann/json.hpp>

namespace proactive {

using nlohmann::json;

std::string model_to_json(const ForecastModel& model, const Normalizer& normalizer) {
    const auto& s = model.shape;
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["kind"] = "forecast_model";
    doc["shape"] = {
        {"continuous", s.continuous}, {"discrete", s.discrete},   {"embedding", s.embedding},
        {"hidden", s.hidden},         {"node_dim", s.node_dim},   {"window", s.window},
        {"kernel", s.kernel},         {"cardinalities", s.cardinalities},
        {"activation", std::string(to_string(s.activation))},
        {"head_mode", std::string(to_string(s.head_mode))},
    };
    json ranges = json::array();
    for (const auto& r : normalizer.ranges()) ranges.push_back({{"min", r.min}, {"max", r.max}});
    doc["normalizer"] = ranges;
    json tensors = json::object();
    model.params.for_each([&](std::string_view name, const std::vector<double>& v) { tensors[std::string(name)] = v; });
    doc["tensors"] = std::move(tensors);
    return doc.dump(1) + "\n";
}

std::pair<ForecastModel, Normalizer> model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format_version").get<int>() != kModelFormatVersion) {
            throw DataError("unsupported model format_version");
        }
        if (doc.at("kind").get<std::string>() != "forecast_model") throw DataError("not a forecast model document");
        const auto& js = doc.at("shape");
        ModelShape shape;
        shape.continuous = js.at("continuous").get<std::size_t>();
        shape.discrete = js.at("discrete").get<std::size_t>();
        shape.embedding = js.at("embedding").get<std::size_t>();
        shape.hidden = js.at("hidden").get<std::size_t>();
        shape.node_dim = js.at("node_dim").get<std::size_t>();
        shape.window = js.at("window").get<std::size_t>();
        shape.kernel = js.at("kernel").get<std::size_t>();
        shape.cardinalities = js.at("cardinalities").get<std::vector<std::size_t>>();
        shape.activation = parse_activation(js.at("activation").get<std::string>());
        shape.head_mode = parse_head_mode(js.at("head_mode").get<std::string>());
        shape.validate();

        ForecastModel model{shape, ForecastParams::zeros(shape)};
        const auto& tensors = doc.at("tensors");
        model.params.for_each([&](std::string_view name, std::vector<double>& v) {
            auto values = tensors.at(std::string(name)).get<std::vector<double>>();
            if (values.size() != v.size()) {
                throw DataError("tensor '" + std::string(name) + "' has " + std::to_string(values.size()) +
                                " entries, expected " + std::to_string(v.size()));
            }
            v = std::move(values);
        });

        std::vector<Normalizer::Range> ranges;
        for (const auto& r : doc.at("normalizer")) ranges.push_back({r.at("min").get<double>(), r.at("max").get<double>()});
        if (ranges.size() != shape.continuous) throw DataError("normalizer does not match continuous width");
        return {std::move(model), Normalizer(std::move(ranges))};
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

} // namespace proactive
