#include "proactive/metrics.hpp"

#include "proactive/error.hpp"

#include <algorithm>
#include <cmath>

namespace proactive {

namespace {

void require_same_length(const LabelVector& pred, const LabelVector& truth) {
    if (pred.size() != truth.size()) {
        throw DataError("prediction length " + std::to_string(pred.size()) + " differs from label length " +
                        std::to_string(truth.size()));
    }
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::size_t overlap(const Segment& a, const Segment& b) {
    const std::size_t lo = std::max(a.start, b.start);
    const std::size_t hi = std::min(a.end, b.end);
    return hi > lo ? hi - lo : 0;
}

/// Mean over `targets` of (points covered by `others`) / length. Both lists
/// are sorted and disjoint, so a two-pointer sweep suffices.
double mean_flat_overlap(const SegmentList& targets, const SegmentList& others) {
    if (targets.empty()) return 0.0;
    double acc = 0.0;
    std::size_t j = 0;
    for (const auto& t : targets) {
        while (j < others.size() && others[j].end <= t.start) ++j;
        std::size_t covered = 0;
        for (std::size_t k = j; k < others.size() && others[k].start < t.end; ++k) covered += overlap(t, others[k]);
        acc += static_cast<double>(covered) / static_cast<double>(t.length());
    }
    return acc / static_cast<double>(targets.size());
}

} // namespace

SegmentList segments(const LabelVector& labels) {
    SegmentList out;
    std::size_t t = 0;
    while (t < labels.size()) {
        if (!labels[t]) {
            ++t;
            continue;
        }
        const std::size_t start = t;
        while (t < labels.size() && labels[t]) ++t;
        out.push_back({start, t});
    }
    return out;
}

PointScores point_f1(const LabelVector& pred, const LabelVector& truth) {
    require_same_length(pred, truth);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] && truth[i]) ++tp;
        else if (pred[i]) ++fp;
        else if (truth[i]) ++fn;
    }
    PointScores s;
    s.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.f1 = harmonic(s.precision, s.recall);
    return s;
}

LabelVector point_adjust_at_k(const LabelVector& pred, const LabelVector& truth, double k) {
    require_same_length(pred, truth);
    if (!(k >= 0.0 && k <= 1.0)) throw ConfigError("K must lie in [0, 1]");
    LabelVector out = pred;
    for (const auto& seg : segments(truth)) {
        std::size_t hits = 0;
        for (std::size_t t = seg.start; t < seg.end; ++t) hits += pred[t] ? 1 : 0;
        if (static_cast<double>(hits) / static_cast<double>(seg.length()) > k) {
            std::fill(out.begin() + static_cast<std::ptrdiff_t>(seg.start),
                      out.begin() + static_cast<std::ptrdiff_t>(seg.end), std::uint8_t{1});
        }
    }
    return out;
}

std::array<double, kF1CurvePoints> f1_curve(const LabelVector& pred, const LabelVector& truth) {
    require_same_length(pred, truth);
    std::array<double, kF1CurvePoints> curve{};
    const auto truth_segments = segments(truth);

    // Point counts outside the truth segments never change under adjustment.
    std::size_t tp_base = 0, fp = 0, positives = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i]) ++positives;
        else if (pred[i]) ++fp;
    }
    std::vector<std::size_t> hits;
    hits.reserve(truth_segments.size());
    for (const auto& seg : truth_segments) {
        std::size_t h = 0;
        for (std::size_t t = seg.start; t < seg.end; ++t) h += pred[t] ? 1 : 0;
        hits.push_back(h);
    }
    for (std::size_t step = 0; step < kF1CurvePoints; ++step) {
        // hits / len > step / 10, compared exactly in integers
        std::size_t tp = tp_base;
        for (std::size_t s = 0; s < truth_segments.size(); ++s) {
            const std::size_t len = truth_segments[s].length();
            tp += hits[s] * 10 > step * len ? len : hits[s];
        }
        const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double recall = positives ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
        curve[step] = harmonic(precision, recall);
    }
    return curve;
}

double f1_at_k(const LabelVector& pred, const LabelVector& truth) {
    const auto curve = f1_curve(pred, truth);
    double acc = 0.0;
    for (double v : curve) acc += v;
    return acc / static_cast<double>(kF1CurvePoints);
}

double f1_composite(const LabelVector& pred, const LabelVector& truth) {
    require_same_length(pred, truth);
    const auto truth_segments = segments(truth);
    if (truth_segments.empty()) throw DataError("F1-composite is undefined without anomaly segments");
    const double precision = point_f1(pred, truth).precision;
    std::size_t detected = 0;
    for (const auto& seg : truth_segments) {
        if (std::any_of(pred.begin() + static_cast<std::ptrdiff_t>(seg.start),
                        pred.begin() + static_cast<std::ptrdiff_t>(seg.end), [](auto v) { return v != 0; })) {
            ++detected;
        }
    }
    const double recall = static_cast<double>(detected) / static_cast<double>(truth_segments.size());
    return harmonic(precision, recall);
}

double f1_range(const LabelVector& pred, const LabelVector& truth) {
    require_same_length(pred, truth);
    const auto truth_segments = segments(truth);
    if (truth_segments.empty()) throw DataError("F1-range is undefined without anomaly segments");
    const auto pred_segments = segments(pred);
    const double recall = mean_flat_overlap(truth_segments, pred_segments);
    const double precision = mean_flat_overlap(pred_segments, truth_segments);
    return harmonic(precision, recall);
}

MetricReport evaluate_metrics(const LabelVector& pred, const LabelVector& truth) {
    MetricReport r;
    r.f1_curve = f1_curve(pred, truth);
    double acc = 0.0;
    for (double v : r.f1_curve) acc += v;
    r.f1_at_k = acc / static_cast<double>(kF1CurvePoints);
    r.f1_composite = f1_composite(pred, truth);
    r.f1_range = f1_range(pred, truth);
    const auto p = point_f1(pred, truth);
    r.point_f1 = p.f1;
    r.point_precision = p.precision;
    r.point_recall = p.recall;
    return r;
}

} // namespace proactive
