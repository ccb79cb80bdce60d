#include "proactive/spectral.hpp"

#include "proactive/error.hpp"
#include "proactive/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace proactive {

std::vector<SpectralSegment> extract_segments(std::span<const double> series, const LabelVector* labels,
                                              SegmentMode mode, std::size_t length) {
    if (length == 0) throw ConfigError("segment length must be positive");
    if (series.size() < length) throw DataError("series shorter than the segment length");
    std::vector<SpectralSegment> out;
    auto take = [&](std::size_t last) {
        SpectralSegment seg;
        seg.end_index = last;
        seg.values.assign(series.begin() + static_cast<std::ptrdiff_t>(last + 1 - length),
                          series.begin() + static_cast<std::ptrdiff_t>(last + 1));
        out.push_back(std::move(seg));
    };
    if (mode == SegmentMode::Train) {
        for (std::size_t last = length - 1; last < series.size(); ++last) take(last);
    } else {
        if (labels == nullptr) throw DataError("anomaly segments need labels");
        if (labels->size() != series.size()) throw DataError("label length does not match series");
        for (std::size_t last = length - 1; last < series.size(); ++last) {
            if ((*labels)[last]) take(last);
        }
    }
    if (out.empty()) throw DataError("no qualifying segments");
    return out;
}

Spectrum rdft(std::span<const double> segment) {
    const std::size_t n = segment.size();
    if (n == 0) throw DataError("rdft of an empty segment");
    Spectrum s;
    const std::size_t bins = n / 2 + 1;
    s.coefficients.resize(bins);
    s.magnitudes.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
            acc += segment[t] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        s.coefficients[k] = acc;
        s.magnitudes[k] = std::abs(acc);
    }
    return s;
}

std::vector<double> inverse_rdft(const std::vector<std::complex<double>>& coefficients, std::size_t length) {
    if (coefficients.size() != length / 2 + 1) throw DataError("coefficient count does not match length");
    std::vector<double> out(length, 0.0);
    for (std::size_t t = 0; t < length; ++t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < length; ++k) {
            // X[length - k] = conj(X[k])
            const auto coef = k < coefficients.size() ? coefficients[k] : std::conj(coefficients[length - k]);
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k * t % length) / static_cast<double>(length);
            acc += coef.real() * std::cos(angle) - coef.imag() * std::sin(angle);
        }
        out[t] = acc / static_cast<double>(length);
    }
    return out;
}

BasisSet basis_set(std::span<const double> magnitudes, double epsilon) {
    BasisSet out;
    for (std::size_t k = 0; k < magnitudes.size(); ++k) {
        if (magnitudes[k] > epsilon) out.insert(k);
    }
    return out;
}

SpectralSample make_sample(const SpectralSegment& segment, double epsilon) {
    auto spectrum = rdft(segment.values);
    SpectralSample s;
    s.end_index = segment.end_index;
    s.basis = basis_set(spectrum.magnitudes, epsilon);
    s.magnitudes = std::move(spectrum.magnitudes);
    return s;
}

bool superset_equal(const std::vector<SpectralSample>& train, const std::vector<SpectralSample>& anomaly) {
    if (train.empty() || anomaly.empty()) throw DataError("superset comparison needs samples on both sides");
    BasisSet lhs, rhs;
    for (const auto& s : train) lhs.insert(s.basis.begin(), s.basis.end());
    for (const auto& s : anomaly) rhs.insert(s.basis.begin(), s.basis.end());
    return lhs == rhs;
}

ConvexHull::ConvexHull(Matrix points, double tolerance) : points_(std::move(points)), tolerance_(tolerance) {
    if (points_.rows() == 0 || points_.cols() == 0) throw DataError("convex hull needs at least one point");
    for (double v : points_.data()) {
        if (!std::isfinite(v)) throw DataError("convex hull points must be finite");
    }
    lower_.assign(dims(), 0.0);
    upper_.assign(dims(), 0.0);
    for (std::size_t j = 0; j < dims(); ++j) {
        lower_[j] = upper_[j] = points_(0, j);
        for (std::size_t i = 1; i < size(); ++i) {
            lower_[j] = std::min(lower_[j], points_(i, j));
            upper_[j] = std::max(upper_[j], points_(i, j));
        }
    }
}

bool ConvexHull::contains(std::span<const double> query) const {
    if (query.size() != dims()) throw DataError("hull query dimension mismatch");
    for (double v : query) {
        if (!std::isfinite(v)) throw DataError("hull query must be finite");
    }
    // Each coordinate row is rescaled so the feasibility tolerance is relative
    // to the magnitude of the data on that axis.
    std::vector<double> scale(dims());
    for (std::size_t j = 0; j < dims(); ++j) {
        scale[j] = std::max({1.0, std::abs(lower_[j]), std::abs(upper_[j]), std::abs(query[j])});
        const double slack = tolerance_ * scale[j];
        if (query[j] < lower_[j] - slack || query[j] > upper_[j] + slack) return false;
    }

    const std::size_t n = size();
    const std::size_t d = dims();
    Matrix a(d + 1, n);
    std::vector<double> b(d + 1);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < n; ++i) a(j, i) = points_(i, j) / scale[j];
        b[j] = query[j] / scale[j];
    }
    for (std::size_t i = 0; i < n; ++i) a(d, i) = 1.0;
    b[d] = 1.0;
    return phase_one(a, b, tolerance_).feasible;
}

bool hull_membership(const Matrix& train_points, std::span<const double> query, double tolerance) {
    return ConvexHull(train_points, tolerance).contains(query);
}

HullReport forecastability_report(const RawSeries& train, const RawSeries& test, const SpectralOptions& options) {
    if (!test.labels) throw DataError("forecastability analysis needs labeled test data");
    if (train.schema.num_continuous() == 0) throw DataError("forecastability analysis needs continuous features");
    if (train.schema.continuous != test.schema.continuous) throw DataError("train/test schemas differ");

    HullReport report;
    for (std::size_t j = 0; j < train.schema.num_continuous(); ++j) {
        const std::string& name = train.schema.continuous[j];
        const auto train_col = train.continuous_column(j);
        const auto test_col = test.continuous_column(j);

        std::vector<SpectralSample> train_samples, anomaly_samples;
        for (const auto& seg : extract_segments(train_col, nullptr, SegmentMode::Train, options.segment_length)) {
            train_samples.push_back(make_sample(seg, options.epsilon));
        }
        for (const auto& seg : extract_segments(test_col, &*test.labels, SegmentMode::Anomaly, options.segment_length)) {
            anomaly_samples.push_back(make_sample(seg, options.epsilon));
        }

        const std::size_t bins = options.segment_length / 2 + 1;
        Matrix points(train_samples.size(), bins);
        for (std::size_t i = 0; i < train_samples.size(); ++i) {
            std::copy(train_samples[i].magnitudes.begin(), train_samples[i].magnitudes.end(), points.row(i).begin());
            report.train_points.push_back({name, train_samples[i].end_index, true, train_samples[i].magnitudes});
        }
        const ConvexHull hull(std::move(points), options.tolerance);

        FeatureHullReport feature;
        feature.feature = name;
        feature.train_samples = train_samples.size();
        feature.anomaly_samples = anomaly_samples.size();
        feature.superset_equal = superset_equal(train_samples, anomaly_samples);
        for (const auto& s : anomaly_samples) {
            const bool inside = hull.contains(s.magnitudes);
            if (!inside) ++feature.outside;
            report.anomaly_points.push_back({name, s.end_index, inside, s.magnitudes});
        }
        feature.outside_fraction = static_cast<double>(feature.outside) / static_cast<double>(feature.anomaly_samples);
        report.total_anomaly_samples += feature.anomaly_samples;
        report.total_outside += feature.outside;
        report.features.push_back(std::move(feature));
    }
    report.pooled_outside_fraction =
        static_cast<double>(report.total_outside) / static_cast<double>(report.total_anomaly_samples);
    return report;
}

} // namespace proactive
