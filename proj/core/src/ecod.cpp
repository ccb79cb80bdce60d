#include "proactive/detect.hpp"
#include "proactive/error.hpp"

#include <algorithm>
#include <cmath>

namespace proactive {

namespace {

double sample_skewness(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if (m2 <= 0.0) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

} // namespace

EcodModel ecod_fit(const Matrix& train) {
    if (train.rows() == 0 || train.cols() == 0) throw DataError("ECOD needs a non-empty training matrix");
    EcodModel model;
    model.sorted.resize(train.cols());
    model.skewness.resize(train.cols());
    for (std::size_t j = 0; j < train.cols(); ++j) {
        auto& col = model.sorted[j];
        col.resize(train.rows());
        for (std::size_t i = 0; i < train.rows(); ++i) {
            if (!std::isfinite(train(i, j))) throw DataError("ECOD training data contains non-finite values");
            col[i] = train(i, j);
        }
        std::sort(col.begin(), col.end());
        model.skewness[j] = sample_skewness(col);
    }
    return model;
}

double ecod_score(const EcodModel& model, std::span<const double> x) {
    if (x.size() != model.dims()) throw DataError("ECOD input dimension mismatch");
    double left = 0.0, right = 0.0, automatic = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto& col = model.sorted[j];
        const double n = static_cast<double>(col.size());
        const double floor = 1.0 / (n + 1.0);
        const auto at_most = static_cast<double>(std::upper_bound(col.begin(), col.end(), x[j]) - col.begin());
        const auto below = static_cast<double>(std::lower_bound(col.begin(), col.end(), x[j]) - col.begin());
        const double p_left = std::max(at_most / n, floor);
        const double p_right = std::max((n - below) / n, floor);
        const double o_left = -std::log(p_left);
        const double o_right = -std::log(p_right);
        left += o_left;
        right += o_right;
        automatic += model.skewness[j] < 0.0 ? o_left : o_right;
    }
    return std::max({left, right, automatic});
}

} // namespace proactive
