#include "smlp/net.hpp"

#include <cmath>
#include <sstream>

namespace smlp {

namespace {

Eigen::Index exact_sqrt(Eigen::Index v) {
    auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v))));
    return r * r == v ? r : -1;
}

Vector activate(const Vector& z, Activation act) {
    if (act == Activation::relu) return z.cwiseMax(0.0);
    return z.array().tanh().matrix();
}

// phi'(z) expressed through z and h = phi(z)
Vector activation_derivative(const Vector& z, const Vector& h, Activation act) {
    if (act == Activation::relu) return (z.array() > 0.0).cast<double>().matrix();
    return (1.0 - h.array().square()).matrix();
}

}  // namespace

std::vector<Eigen::Index> Architecture::widths() const {
    std::vector<Eigen::Index> w;
    w.reserve(hidden_widths.size() + 2);
    w.push_back(input_dim);
    w.insert(w.end(), hidden_widths.begin(), hidden_widths.end());
    w.push_back(output_dim);
    return w;
}

Eigen::Index Architecture::output_side() const { return exact_sqrt(output_dim); }
Eigen::Index Architecture::input_side() const { return exact_sqrt(input_dim); }

void Architecture::validate() const {
    if (input_dim < 1 || output_dim < 1) throw DimensionError("architecture: input/output dims must be >= 1");
    for (auto w : hidden_widths)
        if (w < 1) throw DimensionError("architecture: hidden widths must be >= 1");
    if (output_side() < 1) throw DimensionError("architecture: output_dim must be a perfect square");
}

Architecture Architecture::square(Eigen::Index n, std::vector<Eigen::Index> hidden, Activation act,
                                  OrthoMethod ortho) {
    Architecture a;
    a.input_dim = n * n;
    a.hidden_widths = std::move(hidden);
    a.output_dim = n * n;
    a.activation = act;
    a.ortho = ortho;
    return a;
}

MlpParams MlpParams::zeros_like() const {
    MlpParams z;
    z.layers.reserve(layers.size());
    for (const auto& l : layers)
        z.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
    return z;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t c = 0;
    for (const auto& l : layers) c += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return c;
}

AdamState AdamState::for_params(const MlpParams& p, double lr, double beta1, double beta2, double eps) {
    AdamState s;
    s.m = p.zeros_like().layers;
    s.v = p.zeros_like().layers;
    s.learning_rate = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon_hat = eps;
    return s;
}

Vector flatten_row_major(const Matrix& m) {
    Vector v(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
    return v;
}

Matrix unflatten_row_major(const Vector& v, Eigen::Index side) {
    if (side * side != v.size()) throw DimensionError("unflatten_row_major: size is not side^2");
    Matrix m(side, side);
    for (Eigen::Index i = 0; i < side; ++i)
        for (Eigen::Index j = 0; j < side; ++j) m(i, j) = v(i * side + j);
    return m;
}

MlpParams mlp_init(const Architecture& arch, std::mt19937_64& rng) {
    arch.validate();
    const auto w = arch.widths();
    MlpParams p;
    p.layers.reserve(w.size() - 1);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double bound = std::sqrt(6.0 / static_cast<double>(w[i] + w[i + 1]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        DenseLayer layer{Matrix(w[i + 1], w[i]), Vector::Zero(w[i + 1])};
        // fill row by row so the draw order does not depend on storage order
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

ForwardCache smlp_forward(const MlpParams& params, const Architecture& arch, const Matrix& q0) {
    if (q0.size() != arch.input_dim) {
        std::ostringstream msg;
        msg << "smlp_forward: input has " << q0.size() << " entries, architecture expects " << arch.input_dim;
        throw DimensionError(msg.str());
    }
    if (params.layers.size() != arch.hidden_widths.size() + 1)
        throw DimensionError("smlp_forward: parameter depth does not match architecture");
    if (q0.rows() == q0.cols() && orthogonality_error(q0) > 1e-8)
        throw Error("smlp_forward: input matrix is not orthogonal");

    ForwardCache cache;
    const std::size_t hidden = arch.hidden_widths.size();
    cache.act.reserve(hidden + 1);
    cache.pre.reserve(hidden);
    cache.act.push_back(flatten_row_major(q0));
    for (std::size_t i = 0; i < hidden; ++i) {
        const auto& layer = params.layers[i];
        Vector z = layer.weight * cache.act.back() + layer.bias;
        Vector h = activate(z, arch.activation);
        cache.pre.push_back(std::move(z));
        cache.act.push_back(std::move(h));
    }
    const auto& last = params.layers.back();
    const Vector out = last.weight * cache.act.back() + last.bias;
    cache.a = unflatten_row_major(out, arch.output_side());
    cache.q = orthogonalize(cache.a, arch.ortho);
    return cache;
}

MlpParams smlp_backward(const ForwardCache& cache, const MlpParams& params, const Architecture& arch,
                        const Matrix& grad_q) {
    MlpParams grads = params.zeros_like();
    const Matrix grad_a = orthogonalize_backward(cache.a, cache.q, grad_q, arch.ortho);
    Vector delta = flatten_row_major(grad_a);

    for (std::size_t idx = params.layers.size(); idx-- > 0;) {
        const Vector& input = cache.act[idx];
        grads.layers[idx].weight.noalias() = delta * input.transpose();
        grads.layers[idx].bias = delta;
        if (idx == 0) break;
        Vector back = params.layers[idx].weight.transpose() * delta;
        delta = back.cwiseProduct(activation_derivative(cache.pre[idx - 1], cache.act[idx], arch.activation));
    }
    return grads;
}

void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads) {
    if (grads.layers.size() != params.layers.size() || state.m.size() != params.layers.size())
        throw DimensionError("adam_step: parameter, gradient and state shapes differ");
    for (const auto& g : grads.layers)
        if (!g.weight.allFinite() || !g.bias.allFinite())
            throw TrainingDivergenceError("adam_step: non-finite gradient");

    ++state.t;
    const double b1 = state.beta1, b2 = state.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    const double lr = state.learning_rate;
    const double eps = state.epsilon_hat;

    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        update(params.layers[i].weight, grads.layers[i].weight, state.m[i].weight, state.v[i].weight);
        update(params.layers[i].bias, grads.layers[i].bias, state.m[i].bias, state.v[i].bias);
    }
}

}  // namespace smlp
