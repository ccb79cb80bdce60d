#pragma once

#include "proactive/data.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace proactive {

/// Half-open run [start, end) of consecutive ones.
struct Segment {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start; }
    bool operator==(const Segment&) const = default;
};

using SegmentList = std::vector<Segment>;

/// Maximal runs of ones, in order.
SegmentList segments(const LabelVector& labels);

struct PointScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Confusion-matrix precision/recall/F1; empty denominators give 0.
PointScores point_f1(const LabelVector& pred, const LabelVector& truth);

/// Marks a whole ground-truth segment as detected when the fraction of its
/// points already flagged is strictly greater than `k` (k in [0,1]).
LabelVector point_adjust_at_k(const LabelVector& pred, const LabelVector& truth, double k);

inline constexpr std::size_t kF1CurvePoints = 11;

/// F1 after point adjustment at K = 0, 0.1, ..., 1.0.
std::array<double, kF1CurvePoints> f1_curve(const LabelVector& pred, const LabelVector& truth);

/// Mean of the 11-point F1 curve.
double f1_at_k(const LabelVector& pred, const LabelVector& truth);

/// Harmonic mean of point-wise precision and segment-wise recall.
/// Throws DataError when the ground truth has no anomaly segment.
double f1_composite(const LabelVector& pred, const LabelVector& truth);

/// Range-based F1 with zero existence weight, flat positional bias and unit
/// cardinality factor. Throws DataError when the ground truth is empty.
double f1_range(const LabelVector& pred, const LabelVector& truth);

struct MetricReport {
    double f1_at_k = 0.0;
    double f1_composite = 0.0;
    double f1_range = 0.0;
    double point_f1 = 0.0;
    double point_precision = 0.0;
    double point_recall = 0.0;
    std::array<double, kF1CurvePoints> f1_curve{};
};

MetricReport evaluate_metrics(const LabelVector& pred, const LabelVector& truth);

} // namespace proactive
