#include "proactive/forecaster.hpp"

#include "proactive/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace proactive {

std::string_view to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }
std::string_view to_string(HeadMode m) { return m == HeadMode::Shared ? "shared" : "full"; }

Activation parse_activation(std::string_view s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "relu") return Activation::Relu;
    throw ConfigError("unknown activation '" + std::string(s) + "'");
}

HeadMode parse_head_mode(std::string_view s) {
    if (s == "shared") return HeadMode::Shared;
    if (s == "full") return HeadMode::Full;
    throw ConfigError("unknown head mode '" + std::string(s) + "'");
}

void ModelShape::validate() const {
    if (nodes() == 0) throw ConfigError("model has no features");
    if (embedding == 0 || hidden == 0 || node_dim == 0 || window == 0) {
        throw ConfigError("model dimensions must be positive");
    }
    if (kernel == 0 || kernel % 2 == 0) throw ConfigError("moving-average kernel must be odd");
    if (kernel > window) throw ConfigError("moving-average kernel exceeds the window length");
    if (cardinalities.size() != discrete) throw ConfigError("cardinality list does not match discrete count");
    for (auto card : cardinalities) {
        if (card == 0 || card > embedding) throw ConfigError("discrete cardinality outside [1, embedding]");
    }
}

ModelShape make_shape(const FeatureSchema& schema, std::size_t window, std::size_t hidden, std::size_t node_dim,
                      std::size_t kernel, Activation activation, HeadMode head_mode) {
    ModelShape shape;
    shape.continuous = schema.num_continuous();
    shape.discrete = schema.num_discrete();
    shape.embedding = schema.embedding_dim;
    shape.hidden = hidden;
    shape.node_dim = node_dim;
    shape.window = window;
    shape.kernel = kernel;
    shape.cardinalities = schema.cardinalities();
    shape.activation = activation;
    shape.head_mode = head_mode;
    shape.validate();
    return shape;
}

ForecastParams ForecastParams::zeros(const ModelShape& shape) {
    const std::size_t c = shape.continuous;
    const std::size_t n = shape.window;
    ForecastParams p;
    if (c > 0) {
        const bool full = shape.head_mode == HeadMode::Full;
        const std::size_t w = full ? c * n * c : n;
        const std::size_t b = full ? c : 1;
        p.trend_w.assign(w, 0.0);
        p.trend_b.assign(b, 0.0);
        p.seasonal_w.assign(w, 0.0);
        p.seasonal_b.assign(b, 0.0);
    }
    if (shape.discrete > 0) {
        p.discrete_w.assign(n, 0.0);
        p.discrete_b.assign(1, 0.0);
    }
    p.node_embedding.assign(shape.nodes() * shape.node_dim, 0.0);
    p.agc_weight.assign(shape.node_dim * shape.hidden * shape.embedding, 0.0);
    p.input_w.assign(shape.hidden * shape.node_input(), 0.0);
    p.input_b.assign(shape.hidden, 0.0);
    return p;
}

void ForecastParams::for_each(const std::function<void(std::string_view, std::vector<double>&)>& fn) {
    fn("trend_w", trend_w);
    fn("trend_b", trend_b);
    fn("seasonal_w", seasonal_w);
    fn("seasonal_b", seasonal_b);
    fn("discrete_w", discrete_w);
    fn("discrete_b", discrete_b);
    fn("node_embedding", node_embedding);
    fn("agc_weight", agc_weight);
    fn("input_w", input_w);
    fn("input_b", input_b);
}

void ForecastParams::for_each(const std::function<void(std::string_view, const std::vector<double>&)>& fn) const {
    const_cast<ForecastParams*>(this)->for_each(
        [&](std::string_view name, std::vector<double>& v) { fn(name, v); });
}

ForecastModel ForecastModel::initialize(const ModelShape& shape, std::uint64_t seed) {
    shape.validate();
    ForecastModel model{shape, ForecastParams::zeros(shape)};
    std::mt19937_64 rng(seed);
    auto uniform_fill = [&](std::vector<double>& v, std::size_t fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& x : v) x = dist(rng);
    };
    const std::size_t head_fan = shape.head_mode == HeadMode::Full ? shape.window * shape.continuous : shape.window;
    auto& p = model.params;
    uniform_fill(p.trend_w, head_fan);
    uniform_fill(p.trend_b, head_fan);
    uniform_fill(p.seasonal_w, head_fan);
    uniform_fill(p.seasonal_b, head_fan);
    uniform_fill(p.discrete_w, shape.window);
    uniform_fill(p.discrete_b, shape.window);
    std::normal_distribution<double> embed(0.0, 0.1);
    for (auto& x : p.node_embedding) x = embed(rng);
    uniform_fill(p.agc_weight, shape.hidden);
    uniform_fill(p.input_w, shape.node_input());
    uniform_fill(p.input_b, shape.node_input());
    return model;
}

std::pair<Matrix, Matrix> decompose(const Matrix& block, std::size_t kernel) {
    if (kernel == 0 || kernel % 2 == 0) throw ConfigError("moving-average kernel must be odd");
    const std::size_t n = block.rows();
    const std::size_t c = block.cols();
    if (kernel > n) throw ConfigError("moving-average kernel exceeds the window length");
    const std::size_t half = (kernel - 1) / 2;
    Matrix trend(n, c);
    Matrix seasonal(n, c);
    for (std::size_t j = 0; j < c; ++j) {
        for (std::size_t t = 0; t < n; ++t) {
            double sum = 0.0;
            for (std::size_t i = 0; i < kernel; ++i) {
                // padded index t + i maps to clamp(t + i - half, 0, n - 1)
                const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + i) - static_cast<std::ptrdiff_t>(half);
                const auto idx = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(src, 0, static_cast<std::ptrdiff_t>(n) - 1));
                sum += block(idx, j);
            }
            trend(t, j) = sum / static_cast<double>(kernel);
            seasonal(t, j) = block(t, j) - trend(t, j);
        }
    }
    return {std::move(trend), std::move(seasonal)};
}

Tensor3 window_one_hot(const ModelShape& shape, const Matrix& window) {
    Tensor3 out(window.rows(), shape.discrete, shape.embedding);
    for (std::size_t t = 0; t < window.rows(); ++t) {
        for (std::size_t j = 0; j < shape.discrete; ++j) {
            const double code = window(t, shape.continuous + j);
            if (code < 0.0 || code >= static_cast<double>(shape.cardinalities[j])) {
                throw DataError("discrete code out of range in window");
            }
            out(t, j, static_cast<std::size_t>(code)) = 1.0;
        }
    }
    return out;
}

namespace {

Matrix continuous_block(const ModelShape& shape, const Matrix& window) {
    Matrix block(window.rows(), shape.continuous);
    for (std::size_t t = 0; t < window.rows(); ++t) {
        for (std::size_t j = 0; j < shape.continuous; ++j) block(t, j) = window(t, j);
    }
    return block;
}

void check_window(const ModelShape& shape, const Matrix& window) {
    if (window.rows() != shape.window || window.cols() != shape.nodes()) {
        throw DataError("window shape " + std::to_string(window.rows()) + "x" + std::to_string(window.cols()) +
                        " does not match model " + std::to_string(shape.window) + "x" + std::to_string(shape.nodes()));
    }
}

/// Applies one time-axis head to a decomposed component.
void apply_head(const ModelShape& shape, const std::vector<double>& w, const std::vector<double>& b,
                const Matrix& component, std::vector<double>& out) {
    const std::size_t c = shape.continuous;
    const std::size_t n = shape.window;
    if (shape.head_mode == HeadMode::Shared) {
        for (std::size_t i = 0; i < c; ++i) {
            double acc = b[0];
            for (std::size_t t = 0; t < n; ++t) acc += w[t] * component(t, i);
            out[i] += acc;
        }
    } else {
        for (std::size_t i = 0; i < c; ++i) {
            double acc = b[i];
            const double* wi = w.data() + i * n * c;
            for (std::size_t t = 0; t < n; ++t) {
                for (std::size_t j = 0; j < c; ++j) acc += wi[t * c + j] * component(t, j);
            }
            out[i] += acc;
        }
    }
}

void head_backward(const ModelShape& shape, const std::vector<double>& dout, const Matrix& component,
                   std::vector<double>& gw, std::vector<double>& gb, double scale) {
    const std::size_t c = shape.continuous;
    const std::size_t n = shape.window;
    if (shape.head_mode == HeadMode::Shared) {
        for (std::size_t i = 0; i < c; ++i) {
            const double g = scale * dout[i];
            gb[0] += g;
            for (std::size_t t = 0; t < n; ++t) gw[t] += g * component(t, i);
        }
    } else {
        for (std::size_t i = 0; i < c; ++i) {
            const double g = scale * dout[i];
            gb[i] += g;
            double* gi = gw.data() + i * n * c;
            for (std::size_t t = 0; t < n; ++t) {
                for (std::size_t j = 0; j < c; ++j) gi[t * c + j] += g * component(t, j);
            }
        }
    }
}

Matrix discrete_head(const ModelShape& shape, const ForecastParams& p, const Tensor3& onehot) {
    const std::size_t d = shape.discrete;
    const std::size_t e = shape.embedding;
    Matrix logits(d, e, p.discrete_b[0]);
    for (std::size_t t = 0; t < shape.window; ++t) {
        const double w = p.discrete_w[t];
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t s = 0; s < e; ++s) logits(j, s) += w * onehot(t, j, s);
        }
    }
    return logits;
}

struct AgcTrace {
    Matrix x;                  // nodes x e*N
    Matrix h;                  // nodes x hidden
    Matrix sim;                // E E^T
    Matrix soft;               // rowwise softmax(ReLU(sim))
    Matrix adj;                // I + soft
    Matrix agg;                // adj * h
    std::vector<double> theta; // nodes x hidden x e
    Matrix pre;                // nodes x e
    Matrix z;                  // activation(pre)
};

Matrix embedding_matrix(const ModelShape& shape, const ForecastParams& p) {
    return Matrix(shape.nodes(), shape.node_dim, p.node_embedding);
}

AgcTrace agc_forward(const ModelShape& shape, const ForecastParams& p, const Matrix& window, const Tensor3& onehot) {
    const std::size_t nodes = shape.nodes();
    const std::size_t c = shape.continuous;
    const std::size_t e = shape.embedding;
    const std::size_t n = shape.window;
    const std::size_t hid = shape.hidden;
    const std::size_t bdim = shape.node_dim;
    const std::size_t q = shape.node_input();

    AgcTrace tr;
    tr.x = Matrix(nodes, q);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < c; ++i) tr.x(i, t) = window(t, i);
        for (std::size_t j = 0; j < shape.discrete; ++j) {
            for (std::size_t s = 0; s < e; ++s) tr.x(c + j, s * n + t) = onehot(t, j, s);
        }
    }

    tr.h = Matrix(nodes, hid);
    for (std::size_t v = 0; v < nodes; ++v) {
        const auto xv = tr.x.row(v);
        for (std::size_t k = 0; k < hid; ++k) {
            const double* wk = p.input_w.data() + k * q;
            double acc = p.input_b[k];
            for (std::size_t i = 0; i < q; ++i) acc += wk[i] * xv[i];
            tr.h(v, k) = acc;
        }
    }

    const Matrix emb = embedding_matrix(shape, p);
    tr.adj = adjacency(emb);
    tr.soft = tr.adj;
    for (std::size_t v = 0; v < nodes; ++v) tr.soft(v, v) -= 1.0;
    tr.sim = Matrix(nodes, nodes);
    for (std::size_t u = 0; u < nodes; ++u) {
        for (std::size_t v = 0; v < nodes; ++v) {
            double acc = 0.0;
            for (std::size_t k = 0; k < bdim; ++k) acc += emb(u, k) * emb(v, k);
            tr.sim(u, v) = acc;
        }
    }

    tr.agg = Matrix(nodes, hid);
    for (std::size_t u = 0; u < nodes; ++u) {
        for (std::size_t v = 0; v < nodes; ++v) {
            const double a = tr.adj(u, v);
            for (std::size_t k = 0; k < hid; ++k) tr.agg(u, k) += a * tr.h(v, k);
        }
    }

    tr.theta.assign(nodes * hid * e, 0.0);
    for (std::size_t v = 0; v < nodes; ++v) {
        double* th = tr.theta.data() + v * hid * e;
        for (std::size_t beta = 0; beta < bdim; ++beta) {
            const double ev = emb(v, beta);
            const double* w = p.agc_weight.data() + beta * hid * e;
            for (std::size_t i = 0; i < hid * e; ++i) th[i] += ev * w[i];
        }
    }

    tr.pre = Matrix(nodes, e);
    tr.z = Matrix(nodes, e);
    for (std::size_t v = 0; v < nodes; ++v) {
        const double* th = tr.theta.data() + v * hid * e;
        for (std::size_t k = 0; k < hid; ++k) {
            const double g = tr.agg(v, k);
            for (std::size_t s = 0; s < e; ++s) tr.pre(v, s) += g * th[k * e + s];
        }
        for (std::size_t s = 0; s < e; ++s) {
            const double x = tr.pre(v, s);
            tr.z(v, s) = shape.activation == Activation::Tanh ? std::tanh(x) : std::max(x, 0.0);
        }
    }
    return tr;
}

struct ForwardTrace {
    Matrix trend;
    Matrix seasonal;
    Tensor3 onehot;
    AgcTrace agc;
    Forecast out;
};

ForwardTrace forward_trace(const ForecastModel& model, const Matrix& window) {
    const auto& shape = model.shape;
    const auto& p = model.params;
    check_window(shape, window);
    ForwardTrace tr;
    tr.onehot = window_one_hot(shape, window);
    tr.agc = agc_forward(shape, p, window, tr.onehot);

    const std::size_t c = shape.continuous;
    tr.out.continuous.assign(c, 0.0);
    if (c > 0) {
        auto [trend, seasonal] = decompose(continuous_block(shape, window), shape.kernel);
        tr.trend = std::move(trend);
        tr.seasonal = std::move(seasonal);
        apply_head(shape, p.trend_w, p.trend_b, tr.trend, tr.out.continuous);
        apply_head(shape, p.seasonal_w, p.seasonal_b, tr.seasonal, tr.out.continuous);
        for (std::size_t i = 0; i < c; ++i) tr.out.continuous[i] += tr.agc.z(i, 0);
    }
    if (shape.discrete > 0) {
        tr.out.discrete_logits = discrete_head(shape, p, tr.onehot);
        for (std::size_t j = 0; j < shape.discrete; ++j) {
            for (std::size_t s = 0; s < shape.embedding; ++s) tr.out.discrete_logits(j, s) += tr.agc.z(c + j, s);
        }
        tr.out.discrete_codes.resize(shape.discrete);
        for (std::size_t j = 0; j < shape.discrete; ++j) {
            const auto row = tr.out.discrete_logits.row(j);
            tr.out.discrete_codes[j] = static_cast<std::size_t>(
                std::max_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(shape.cardinalities[j])) -
                row.begin());
        }
    }
    return tr;
}

constexpr double kLogProbFloor = -50.0;

/// Log-softmax over the first `card` entries of `logits`.
std::vector<double> log_softmax(std::span<const double> logits, std::size_t card) {
    double hi = logits[0];
    for (std::size_t s = 1; s < card; ++s) hi = std::max(hi, logits[s]);
    double sum = 0.0;
    for (std::size_t s = 0; s < card; ++s) sum += std::exp(logits[s] - hi);
    const double lse = hi + std::log(sum);
    std::vector<double> out(card);
    for (std::size_t s = 0; s < card; ++s) out[s] = logits[s] - lse;
    return out;
}

void require_finite(const std::vector<double>& v, std::string_view name) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericError("numerical blowup in " + std::string(name));
    }
}

} // namespace

std::vector<double> predict_continuous(const ForecastModel& model, const Matrix& window) {
    const auto& shape = model.shape;
    check_window(shape, window);
    std::vector<double> out(shape.continuous, 0.0);
    if (shape.continuous == 0) return out;
    auto [trend, seasonal] = decompose(continuous_block(shape, window), shape.kernel);
    apply_head(shape, model.params.trend_w, model.params.trend_b, trend, out);
    apply_head(shape, model.params.seasonal_w, model.params.seasonal_b, seasonal, out);
    return out;
}

Matrix predict_discrete(const ForecastModel& model, const Tensor3& one_hot_window) {
    const auto& shape = model.shape;
    if (shape.discrete == 0) throw DataError("no discrete head");
    if (one_hot_window.dim0() != shape.window || one_hot_window.dim1() != shape.discrete ||
        one_hot_window.dim2() != shape.embedding) {
        throw DataError("one-hot window shape does not match model");
    }
    return discrete_head(shape, model.params, one_hot_window);
}

Matrix adjacency(const Matrix& node_embedding) {
    const std::size_t nodes = node_embedding.rows();
    const std::size_t bdim = node_embedding.cols();
    Matrix adj(nodes, nodes);
    std::vector<double> row(nodes);
    for (std::size_t u = 0; u < nodes; ++u) {
        double hi = 0.0;
        for (std::size_t v = 0; v < nodes; ++v) {
            double acc = 0.0;
            for (std::size_t k = 0; k < bdim; ++k) acc += node_embedding(u, k) * node_embedding(v, k);
            row[v] = std::max(acc, 0.0);
            hi = std::max(hi, row[v]);
        }
        double sum = 0.0;
        for (std::size_t v = 0; v < nodes; ++v) {
            row[v] = std::exp(row[v] - hi);
            sum += row[v];
        }
        for (std::size_t v = 0; v < nodes; ++v) adj(u, v) = row[v] / sum + (u == v ? 1.0 : 0.0);
    }
    return adj;
}

Matrix agc(const ForecastModel& model, const Matrix& window) {
    check_window(model.shape, window);
    const auto onehot = window_one_hot(model.shape, window);
    return agc_forward(model.shape, model.params, window, onehot).z;
}

Forecast forward(const ForecastModel& model, const Matrix& window) {
    return forward_trace(model, window).out;
}

LossParts loss(const ModelShape& shape, const Forecast& forecast, std::span<const double> target, double lambda) {
    if (target.size() != shape.nodes()) throw DataError("target width does not match model");
    LossParts parts;
    const std::size_t c = shape.continuous;
    if (c > 0) {
        double acc = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            const double diff = target[i] - forecast.continuous[i];
            acc += diff * diff;
        }
        parts.continuous = acc / static_cast<double>(c);
    }
    if (shape.discrete > 0) {
        double acc = 0.0;
        for (std::size_t j = 0; j < shape.discrete; ++j) {
            const auto code = static_cast<std::size_t>(target[c + j]);
            const auto logp = log_softmax(forecast.discrete_logits.row(j), shape.cardinalities[j]);
            acc -= std::max(logp[code], kLogProbFloor);
        }
        parts.discrete = acc / static_cast<double>(shape.discrete);
    }
    parts.total = parts.continuous + lambda * parts.discrete;
    return parts;
}

LossParts accumulate_gradients(const ForecastModel& model, const Matrix& window, std::span<const double> target,
                               double lambda, ForecastParams& grads, double scale) {
    const auto& shape = model.shape;
    const auto& p = model.params;
    const auto tr = forward_trace(model, window);
    require_finite(tr.out.continuous, "continuous forecast");
    require_finite(tr.out.discrete_logits.data(), "discrete logits");
    const LossParts parts = loss(shape, tr.out, target, lambda);
    if (!std::isfinite(parts.total)) throw NumericError("numerical blowup in loss");

    const std::size_t c = shape.continuous;
    const std::size_t d = shape.discrete;
    const std::size_t e = shape.embedding;
    const std::size_t nodes = shape.nodes();
    const std::size_t hid = shape.hidden;
    const std::size_t bdim = shape.node_dim;
    const std::size_t q = shape.node_input();
    const auto& agc_tr = tr.agc;

    // d(total)/d(output) for both heads; Z receives the same upstream gradient.
    Matrix dz(nodes, e);
    std::vector<double> dcont(c);
    for (std::size_t i = 0; i < c; ++i) {
        dcont[i] = 2.0 * (tr.out.continuous[i] - target[i]) / static_cast<double>(c);
        dz(i, 0) = dcont[i];
    }
    Matrix dlogits(d, e);
    for (std::size_t j = 0; j < d; ++j) {
        const auto card = shape.cardinalities[j];
        const auto code = static_cast<std::size_t>(target[c + j]);
        const auto logp = log_softmax(tr.out.discrete_logits.row(j), card);
        if (logp[code] <= kLogProbFloor) continue; // clamped: flat
        const double w = lambda / static_cast<double>(d);
        for (std::size_t s = 0; s < card; ++s) {
            dlogits(j, s) = w * (std::exp(logp[s]) - (s == code ? 1.0 : 0.0));
            dz(c + j, s) = dlogits(j, s);
        }
    }

    if (c > 0) {
        head_backward(shape, dcont, tr.trend, grads.trend_w, grads.trend_b, scale);
        head_backward(shape, dcont, tr.seasonal, grads.seasonal_w, grads.seasonal_b, scale);
    }
    if (d > 0) {
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t s = 0; s < e; ++s) {
                const double g = scale * dlogits(j, s);
                if (g == 0.0) continue;
                grads.discrete_b[0] += g;
                for (std::size_t t = 0; t < shape.window; ++t) grads.discrete_w[t] += g * tr.onehot(t, j, s);
            }
        }
    }

    // Z = act(P)
    Matrix dpre(nodes, e);
    for (std::size_t v = 0; v < nodes; ++v) {
        for (std::size_t s = 0; s < e; ++s) {
            const double deriv = shape.activation == Activation::Tanh ? 1.0 - agc_tr.z(v, s) * agc_tr.z(v, s)
                                                                      : (agc_tr.pre(v, s) > 0.0 ? 1.0 : 0.0);
            dpre(v, s) = dz(v, s) * deriv;
        }
    }

    // P[v,s] = sum_k G[v,k] Theta[v,k,s]
    Matrix dagg(nodes, hid);
    std::vector<double> dtheta(nodes * hid * e, 0.0);
    for (std::size_t v = 0; v < nodes; ++v) {
        const double* th = agc_tr.theta.data() + v * hid * e;
        double* dth = dtheta.data() + v * hid * e;
        for (std::size_t k = 0; k < hid; ++k) {
            double acc = 0.0;
            const double g = agc_tr.agg(v, k);
            for (std::size_t s = 0; s < e; ++s) {
                acc += th[k * e + s] * dpre(v, s);
                dth[k * e + s] = g * dpre(v, s);
            }
            dagg(v, k) = acc;
        }
    }

    // Theta[v] = sum_beta E[v,beta] W[beta]
    const Matrix emb = embedding_matrix(shape, p);
    Matrix demb(nodes, bdim);
    for (std::size_t beta = 0; beta < bdim; ++beta) {
        const double* w = p.agc_weight.data() + beta * hid * e;
        double* gw = grads.agc_weight.data() + beta * hid * e;
        for (std::size_t v = 0; v < nodes; ++v) {
            const double* dth = dtheta.data() + v * hid * e;
            const double ev = scale * emb(v, beta);
            double acc = 0.0;
            for (std::size_t i = 0; i < hid * e; ++i) {
                gw[i] += ev * dth[i];
                acc += w[i] * dth[i];
            }
            demb(v, beta) += acc;
        }
    }

    // G = A H
    Matrix dadj(nodes, nodes);
    Matrix dh(nodes, hid);
    for (std::size_t u = 0; u < nodes; ++u) {
        for (std::size_t v = 0; v < nodes; ++v) {
            const double a = agc_tr.adj(u, v);
            double acc = 0.0;
            for (std::size_t k = 0; k < hid; ++k) {
                acc += dagg(u, k) * agc_tr.h(v, k);
                dh(v, k) += a * dagg(u, k);
            }
            dadj(u, v) = acc;
        }
    }

    // H = X W_in^T + b_in
    for (std::size_t k = 0; k < hid; ++k) {
        double* gw = grads.input_w.data() + k * q;
        double gb = 0.0;
        for (std::size_t v = 0; v < nodes; ++v) {
            const double g = scale * dh(v, k);
            if (g == 0.0) continue;
            gb += g;
            const auto xv = agc_tr.x.row(v);
            for (std::size_t i = 0; i < q; ++i) gw[i] += g * xv[i];
        }
        grads.input_b[k] += gb;
    }

    // A = I + softmax(ReLU(E E^T)), rowwise softmax
    Matrix dsim(nodes, nodes);
    for (std::size_t u = 0; u < nodes; ++u) {
        double dot = 0.0;
        for (std::size_t v = 0; v < nodes; ++v) dot += dadj(u, v) * agc_tr.soft(u, v);
        for (std::size_t v = 0; v < nodes; ++v) {
            const double drelu = agc_tr.soft(u, v) * (dadj(u, v) - dot);
            dsim(u, v) = agc_tr.sim(u, v) > 0.0 ? drelu : 0.0;
        }
    }
    for (std::size_t u = 0; u < nodes; ++u) {
        for (std::size_t v = 0; v < nodes; ++v) {
            const double g = dsim(u, v) + dsim(v, u);
            if (g == 0.0) continue;
            for (std::size_t k = 0; k < bdim; ++k) demb(u, k) += g * emb(v, k);
        }
    }
    for (std::size_t i = 0; i < demb.size(); ++i) grads.node_embedding[i] += scale * demb.data()[i];

    grads.for_each([](std::string_view name, const std::vector<double>& g) { require_finite(g, name); });
    return parts;
}

std::pair<LossParts, ForecastParams> gradients(const ForecastModel& model, const Matrix& window,
                                               std::span<const double> target, double lambda) {
    auto grads = ForecastParams::zeros(model.shape);
    const auto parts = accumulate_gradients(model, window, target, lambda, grads, 1.0);
    return {parts, std::move(grads)};
}

RawSeries forecast_series(const ForecastModel& model, const Normalizer& normalizer, const RawSeries& series) {
    const auto& shape = model.shape;
    const std::size_t n = shape.window;
    if (series.values.cols() != shape.nodes()) throw DataError("series width does not match model");
    if (series.timesteps() <= n) throw DataError("series too short for forecasting");
    const RawSeries normed = normalizer.apply(series);
    const std::size_t rows = series.timesteps() - n;
    const std::size_t width = shape.nodes();
    RawSeries out{Matrix(rows, width), std::nullopt, series.schema};
    Matrix window(n, width);
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(normed.values.data().begin() + static_cast<std::ptrdiff_t>(r * width), n * width,
                    window.data().begin());
        const Forecast f = forward(model, window);
        for (std::size_t i = 0; i < shape.continuous; ++i) out.values(r, i) = normalizer.invert(i, f.continuous[i]);
        for (std::size_t j = 0; j < shape.discrete; ++j) {
            out.values(r, shape.continuous + j) = static_cast<double>(f.discrete_codes[j]);
        }
    }
    return out;
}

} // namespace proactive
