// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 on any failure.

#include "oracles.hpp"

#include "proactive/detect.hpp"
#include "proactive/metrics.hpp"
#include "proactive/pipeline.hpp"
#include "proactive/spectral.hpp"
#include "proactive/synth.hpp"
#include "proactive/training.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

using namespace proactive;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > budget_seconds) {
        out.pass = false;
        out.detail += "; over time budget";
    }
    if (!out.pass) ++failures;
    std::printf("%s  %-34s %s (%.2f s of %.0f s)\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(), secs,
                budget_seconds);
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome decomposition_identity() {
    oracle::Rng rng(101);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t c = rng.range(1, 8);
        const std::size_t k = 2 * rng.range(0, 2) + 1;
        const Matrix x = oracle::random_matrix(rng, 5, c, -10, 10);
        const auto [trend, seasonal] = decompose(x, k);
        for (std::size_t i = 0; i < x.size(); ++i)
            worst = std::max(worst, std::abs(trend.data()[i] + seasonal.data()[i] - x.data()[i]));
    }
    return {worst < 1e-14, "max |trend + seasonal - x| = " + fmt("%.3g", worst)};
}

Outcome gradient_check() {
    oracle::Rng rng(202);
    const auto shape = oracle::small_shape();
    double worst = 0.0;
    std::string where;
    std::size_t partials = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto model = oracle::random_model(shape, rng);
        const Matrix window = oracle::random_window(shape, rng, shape.window);
        const auto target = oracle::random_target(shape, rng);
        const auto check = oracle::check_gradients(model, window, target, 1.0, 1e-5);
        partials += check.partials;
        if (check.max_relative_error > worst) {
            worst = check.max_relative_error;
            where = check.worst;
        }
    }
    return {worst <= 1e-4, std::to_string(partials) + " partials, max relative error " + fmt("%.3g", worst) + " at " +
                               where};
}

Outcome training_beats_persistence() {
    SynthConfig synth;
    synth.inject_anomalies = false;
    const auto data = synth_generate(synth, 303);
    const auto normalizer = Normalizer::fit(data.train);
    const auto windows = make_windows(normalizer.apply(data.train), 5);
    TrainConfig cfg;
    cfg.iterations = 2000;
    const auto result = train(windows, data.train.schema, cfg);

    const auto& held = data.test;
    const auto forecasts = forecast_series(result.model, normalizer, held);
    const std::size_t c = held.schema.num_continuous();
    const std::size_t d = held.schema.num_discrete();
    const std::size_t n = 5;

    double model_se = 0.0, persist_se = 0.0;
    std::size_t model_hits = 0, majority_hits = 0, count = 0;
    std::vector<double> majority(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::map<double, std::size_t> freq;
        for (std::size_t t = 0; t < data.train.timesteps(); ++t) ++freq[data.train.values(t, c + j)];
        majority[j] = std::max_element(freq.begin(), freq.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
    }
    for (std::size_t t = n; t < held.timesteps(); ++t, ++count) {
        for (std::size_t j = 0; j < c; ++j) {
            const double truth = held.values(t, j);
            model_se += std::pow(forecasts.values(t - n, j) - truth, 2);
            persist_se += std::pow(held.values(t - 1, j) - truth, 2);
        }
        for (std::size_t j = 0; j < d; ++j) {
            model_hits += forecasts.values(t - n, c + j) == held.values(t, c + j);
            majority_hits += majority[j] == held.values(t, c + j);
        }
    }
    const double model_mse = model_se / static_cast<double>(count * c);
    const double persist_mse = persist_se / static_cast<double>(count * c);
    const double acc = static_cast<double>(model_hits) / static_cast<double>(count * d);
    const double base = static_cast<double>(majority_hits) / static_cast<double>(count * d);
    return {model_mse <= 0.5 * persist_mse && acc >= base,
            "mse " + fmt("%.4g", model_mse) + " vs persistence " + fmt("%.4g", persist_mse) + ", accuracy " +
                fmt("%.3f", acc) + " vs majority " + fmt("%.3f", base)};
}

Outcome em_monotone() {
    oracle::Rng rng(404);
    double worst_drop = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t rows = rng.range(60, 300);
        const std::size_t dims = rng.range(1, 5);
        Matrix x(rows, dims);
        const std::size_t blobs = rng.range(1, 4);
        for (std::size_t i = 0; i < rows; ++i) {
            const double shift = 3.0 * static_cast<double>(i % blobs);
            for (std::size_t j = 0; j < dims; ++j) x(i, j) = shift + rng.normal(0, rng.uniform(0.2, 1.5));
        }
        const auto m = gmm_fit(x, GmmConfig{rng.range(1, 5), static_cast<std::uint64_t>(rep), 200, 0.0});
        for (std::size_t i = 1; i < m.log_likelihood_trace.size(); ++i)
            worst_drop = std::max(worst_drop, m.log_likelihood_trace[i - 1] - m.log_likelihood_trace[i]);
    }
    return {worst_drop <= 1e-9, "largest log-likelihood decrease " + fmt("%.3g", worst_drop)};
}

Outcome calibration_sound() {
    SynthConfig synth;
    synth.train_length = 800;
    const auto data = synth_generate(synth, 505);
    std::string detail;
    bool ok = true;
    for (auto kind : {DetectorKind::Gmm, DetectorKind::Ecod, DetectorKind::Svdd}) {
        DetectorConfig cfg;
        cfg.kind = kind;
        const auto det = Detector::fit(data.train.values, cfg);
        std::size_t flagged = 0;
        for (std::size_t i = 0; i < data.train.timesteps(); ++i) flagged += det.is_anomaly(data.train.values.row(i));
        ok = ok && flagged == 0;
        detail += std::string(to_string(kind)) + " " + std::to_string(flagged) + " ";
    }
    return {ok, "calibration-set flags: " + detail};
}

Outcome metric_oracle() {
    oracle::Rng rng(606);
    double worst = 0.0;
    bool perfect = true;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = rng.range(1, 50);
        const auto pred = oracle::random_labels(rng, n, rng.uniform(0.05, 0.6));
        auto truth = oracle::random_labels(rng, n, rng.uniform(0.05, 0.6));
        truth[rng.index(n)] = 1;
        worst = std::max({worst, std::abs(f1_at_k(pred, truth) - oracle::f1_at_k(pred, truth)),
                          std::abs(f1_composite(pred, truth) - oracle::f1_composite(pred, truth)),
                          std::abs(f1_range(pred, truth) - oracle::f1_range(pred, truth)),
                          std::abs(point_f1(pred, truth).f1 - oracle::point_f1(pred, truth))});
        const auto r = evaluate_metrics(truth, truth);
        perfect = perfect && r.f1_at_k == 1.0 && r.f1_composite == 1.0 && r.f1_range == 1.0 && r.point_f1 == 1.0;
    }
    return {worst <= 1e-12 && perfect,
            "max deviation " + fmt("%.3g", worst) + (perfect ? ", perfect prediction scores 1" : ", perfect != 1")};
}

Outcome all_positive() {
    LabelVector truth(10000, 0);
    for (std::size_t i = 3000; i < 4050; ++i) truth[i] = 1;
    const double v = f1_at_k(LabelVector(10000, 1), truth);
    return {std::abs(v - 0.19) <= 0.0005, "f1_at_k = " + fmt("%.5f", v)};
}

Outcome dft_checks() {
    oracle::Rng rng(808);
    double recon = 0.0, parseval = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 6;
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform(-5, 5);
        const auto s = rdft(v);
        const auto back = inverse_rdft(s.coefficients, n);
        double energy = 0.0, spectral = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            recon = std::max(recon, std::abs(back[t] - v[t]));
            energy += v[t] * v[t];
        }
        for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
            const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
            spectral += (unpaired ? 1.0 : 2.0) * s.magnitudes[k] * s.magnitudes[k];
        }
        parseval = std::max(parseval, std::abs(spectral / static_cast<double>(n) - energy));
    }
    std::vector<double> cosine(6);
    for (std::size_t t = 0; t < 6; ++t) cosine[t] = std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / 6.0);
    const double x1 = rdft(cosine).magnitudes[1];
    return {recon < 1e-10 && parseval <= 1e-9 && std::abs(x1 - 3.0) <= 1e-9,
            "reconstruction " + fmt("%.3g", recon) + ", Parseval " + fmt("%.3g", parseval) + ", |X_1| of cosine " +
                fmt("%.12f", x1)};
}

Outcome hull_membership_checks() {
    oracle::Rng rng(909);
    std::size_t agree = 0, compared = 0;
    while (compared < 500) {
        const std::size_t n = rng.range(3, 30);
        std::vector<oracle::Point2> pts(n);
        Matrix m(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            pts[i] = {rng.uniform(0, 4), rng.uniform(0, 4)};
            m(i, 0) = pts[i].x;
            m(i, 1) = pts[i].y;
        }
        const oracle::Point2 q{rng.uniform(-0.5, 4.5), rng.uniform(-0.5, 4.5)};
        double margin = 0.0;
        const bool expected = oracle::half_plane_inside(oracle::hull_edges(pts), q, margin);
        if (margin < 1e-6) continue;
        ++compared;
        agree += hull_membership(m, std::vector<double>{q.x, q.y}) == expected;
    }

    std::size_t inside = 0, outside = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = rng.range(2, 12);
        const Matrix pts = oracle::random_matrix(rng, n, 4, 0, 5);
        const ConvexHull hull(pts);
        std::vector<double> w(n), q(4, 0.0);
        double total = 0.0;
        for (auto& x : w) total += (x = rng.uniform(0.01, 1));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 4; ++j) q[j] += w[i] / total * pts(i, j);
        inside += hull.contains(q);
        for (std::size_t axis = 0; axis < 4; ++axis) {
            double top = 0.0;
            for (std::size_t i = 0; i < n; ++i) top = std::max(top, pts(i, axis));
            auto beyond = q;
            beyond[axis] = top + rng.uniform(0.001, 1.0);
            outside += !hull.contains(beyond);
        }
    }
    return {agree == compared && inside == 100 && outside == 400,
            "2-D agreement " + std::to_string(agree) + "/" + std::to_string(compared) + ", 4-D inside " +
                std::to_string(inside) + "/100, exceeding outside " + std::to_string(outside) + "/400"};
}

Outcome end_to_end() {
    const auto dir = fs::temp_directory_path() / "proactive_acceptance";
    fs::remove_all(dir);
    auto cfg = PipelineConfig::parse(R"({"synth": {"seed": 42}})", dir);
    cfg.output_dir = dir;
    cmd_synth(cfg);
    const auto run = cmd_run(cfg);

    for (const char* f : {"run_report.json", "metrics.json", "spectral_report.json", "detect_report.json"})
        validate_report_json(slurp(cfg.output(f)));
    validate_report_json(slurp(cfg.output("model.json")));
    validate_report_json(slurp(cfg.output("detector.json")));

    const auto doc = nlohmann::json::parse(run);
    const auto& det = doc["detection"];
    std::size_t early = 0, segments = 0;
    for (const auto& l : det["latencies"]) {
        ++segments;
        if (!l["latency"].is_null() && l["latency"].get<long long>() <= 0) ++early;
    }

    const auto flags_with = slurp(cfg.output("flags.csv"));
    const auto scores_with = slurp(cfg.output("scores.csv"));
    fs::remove(cfg.labels_path());
    cmd_detect(cfg, cfg.output("model.json"), cfg.output("detector.json"));
    const bool pure = slurp(cfg.output("flags.csv")) == flags_with && slurp(cfg.output("scores.csv")) == scores_with;

    return {early >= 1 && pure,
            std::to_string(early) + "/" + std::to_string(segments) + " segments flagged at latency <= 0, " +
                std::to_string(det["flagged"].get<std::size_t>()) + " flags, f1_at_k " +
                fmt("%.3f", doc["metrics"]["f1_at_k"].get<double>()) + (pure ? ", label-free rerun identical" : ", label-free rerun differs")};
}

} // namespace

int main() {
    criterion("decomposition identity", 1, decomposition_identity);
    criterion("gradient check", 30, gradient_check);
    criterion("training beats persistence", 60, training_beats_persistence);
    criterion("EM monotonicity", 10, em_monotone);
    criterion("calibration soundness", 30, calibration_sound);
    criterion("metric oracle equivalence", 10, metric_oracle);
    criterion("all-positive F1 at K", 1, all_positive);
    criterion("DFT reconstruction and Parseval", 5, dft_checks);
    criterion("hull membership", 30, hull_membership_checks);
    criterion("end-to-end pipeline", 120, end_to_end);
    std::printf("%d failure%s\n", failures, failures == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
}
