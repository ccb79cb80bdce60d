#include "proactive/detect.hpp"
#include "proactive/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace proactive {

namespace {

double log_component(const GmmModel& model, std::size_t k, std::span<const double> x) {
    constexpr double kLog2Pi = 1.8378770664093454836; // log(2 pi)
    double acc = std::log(model.weights[k]);
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double var = model.variances(k, j);
        const double diff = x[j] - model.means(k, j);
        acc -= 0.5 * (kLog2Pi + std::log(var) + diff * diff / var);
    }
    return acc;
}

double log_sum_exp(std::span<const double> v) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : v) hi = std::max(hi, x);
    if (!std::isfinite(hi)) return hi;
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - hi);
    return hi + std::log(sum);
}

std::vector<double> column_variance(const Matrix& x) {
    const std::size_t n = x.rows();
    const std::size_t dims = x.cols();
    std::vector<double> mean(dims, 0.0), var(dims, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dims; ++j) mean[j] += x(i, j);
    }
    for (auto& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dims; ++j) {
            const double diff = x(i, j) - mean[j];
            var[j] += diff * diff;
        }
    }
    for (auto& v : var) v = std::max(v / static_cast<double>(n), kGmmVarianceFloor);
    return var;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
    return acc;
}

/// k-means++ seeding of the component means.
Matrix seed_means(const Matrix& x, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = x.rows();
    Matrix means(k, x.cols());
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::size_t chosen = pick(rng);
    for (std::size_t c = 0; c < k; ++c) {
        std::copy(x.row(chosen).begin(), x.row(chosen).end(), means.row(c).begin());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist[i] = std::min(dist[i], squared_distance(x.row(i), means.row(c)));
            total += dist[i];
        }
        if (c + 1 == k) break;
        if (total <= 0.0) {
            chosen = pick(rng);
            continue;
        }
        double target = unit(rng) * total;
        chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            target -= dist[i];
            if (target < 0.0) {
                chosen = i;
                break;
            }
        }
    }
    return means;
}

} // namespace

GmmModel gmm_fit(const Matrix& train, const GmmConfig& config) {
    const std::size_t n = train.rows();
    const std::size_t dims = train.cols();
    const std::size_t k = config.components;
    if (k == 0) throw ConfigError("GMM needs at least one component");
    if (dims == 0) throw DataError("GMM training data has no columns");
    if (n < k) throw DataError("GMM needs at least as many rows as components");
    for (double v : train.data()) {
        if (!std::isfinite(v)) throw DataError("GMM training data contains non-finite values");
    }

    std::mt19937_64 rng(config.seed);
    const auto global_var = column_variance(train);

    GmmModel model;
    model.weights.assign(k, 1.0 / static_cast<double>(k));
    model.means = seed_means(train, k, rng);
    model.variances = Matrix(k, dims);
    for (std::size_t c = 0; c < k; ++c) std::copy(global_var.begin(), global_var.end(), model.variances.row(c).begin());

    Matrix logp(n, k);
    std::vector<double> point_ll(n);
    std::size_t reseeds = 0;

    for (std::size_t iter = 0;; ++iter) {
        // E-step
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < k; ++c) logp(i, c) = log_component(model, c, train.row(i));
            point_ll[i] = log_sum_exp(logp.row(i));
            ll += point_ll[i];
        }
        ll /= static_cast<double>(n);
        if (!std::isfinite(ll)) throw NumericError("GMM log-likelihood is not finite");
        const bool converged = !model.log_likelihood_trace.empty() && ll - model.log_likelihood_trace.back() < config.tol;
        model.log_likelihood_trace.push_back(ll);
        if (converged || iter >= config.max_iter) break;

        // Responsibilities, stored in place of the log joint.
        std::vector<double> mass(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < k; ++c) {
                logp(i, c) = std::exp(logp(i, c) - point_ll[i]);
                mass[c] += logp(i, c);
            }
        }

        bool reseeded = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (mass[c] > 1e-10 * static_cast<double>(n)) continue;
            if (++reseeds > 3) throw NumericError("GMM component collapsed repeatedly");
            const auto worst = static_cast<std::size_t>(std::min_element(point_ll.begin(), point_ll.end()) - point_ll.begin());
            std::copy(train.row(worst).begin(), train.row(worst).end(), model.means.row(c).begin());
            std::copy(global_var.begin(), global_var.end(), model.variances.row(c).begin());
            point_ll[worst] = std::numeric_limits<double>::infinity(); // do not reuse the same point
            reseeded = true;
        }
        if (reseeded) {
            std::fill(model.weights.begin(), model.weights.end(), 1.0 / static_cast<double>(k));
            model.log_likelihood_trace.clear();
            continue;
        }

        // M-step
        for (std::size_t c = 0; c < k; ++c) {
            model.weights[c] = mass[c] / static_cast<double>(n);
            auto mu = model.means.row(c);
            std::fill(mu.begin(), mu.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = logp(i, c);
                for (std::size_t j = 0; j < dims; ++j) mu[j] += r * train(i, j);
            }
            for (auto& m : mu) m /= mass[c];
            auto var = model.variances.row(c);
            std::fill(var.begin(), var.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = logp(i, c);
                for (std::size_t j = 0; j < dims; ++j) {
                    const double diff = train(i, j) - mu[j];
                    var[j] += r * diff * diff;
                }
            }
            for (auto& v : var) v = std::max(v / mass[c], kGmmVarianceFloor);
        }
        double wsum = 0.0;
        for (double w : model.weights) wsum += w;
        for (double& w : model.weights) w /= wsum;
    }
    return model;
}

double gmm_score(const GmmModel& model, std::span<const double> x) {
    if (x.size() != model.dims()) throw DataError("GMM input dimension mismatch");
    std::vector<double> parts(model.components());
    for (std::size_t c = 0; c < parts.size(); ++c) parts[c] = log_component(model, c, x);
    return log_sum_exp(parts);
}

} // namespace proactive
