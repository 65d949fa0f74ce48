#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "smlp/linalg.hpp"

namespace smlp {

enum class Activation { relu, tanh };

inline std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

/// Layer widths and the two switchable pieces of the SMLP. input_dim and
/// output_dim are flattened square matrices (n^2).
struct Architecture {
    Eigen::Index input_dim = 0;
    std::vector<Eigen::Index> hidden_widths;
    Eigen::Index output_dim = 0;
    Activation activation = Activation::relu;
    OrthoMethod ortho = OrthoMethod::svd;

    /// Width chain k_0, k_1, ..., k_{L+1}.
    std::vector<Eigen::Index> widths() const;
    /// Side of the square matrix fed to the Stiefel layer.
    Eigen::Index output_side() const;
    Eigen::Index input_side() const;
    void validate() const;

    /// Square in, square out: n^2 -> hidden -> n^2.
    static Architecture square(Eigen::Index n, std::vector<Eigen::Index> hidden, Activation act, OrthoMethod ortho);
};

struct DenseLayer {
    Matrix weight;  // k_{i+1} x k_i
    Vector bias;    // k_{i+1}
};

/// Weights and biases of every affine map. Gradients use the same type.
struct MlpParams {
    std::vector<DenseLayer> layers;

    MlpParams zeros_like() const;
    std::size_t parameter_count() const;
};

struct ForwardCache {
    std::vector<Vector> pre;  // z_i for hidden layers
    std::vector<Vector> act;  // h_0 = flatten(q0), h_i = phi(z_i)
    Matrix a;                 // final affine output, reshaped
    Matrix q;                 // orthogonalize(a)
};

struct AdamState {
    std::vector<DenseLayer> m;
    std::vector<DenseLayer> v;
    std::uint64_t t = 0;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon_hat = 1e-8;

    static AdamState for_params(const MlpParams& p, double lr = 0.01, double beta1 = 0.9, double beta2 = 0.999,
                                double eps = 1e-8);
};

/// Row-major flatten / unflatten used at the network boundary.
Vector flatten_row_major(const Matrix& m);
Matrix unflatten_row_major(const Vector& v, Eigen::Index side);

/// Glorot-uniform weights, zero biases.
MlpParams mlp_init(const Architecture& arch, std::mt19937_64& rng);

ForwardCache smlp_forward(const MlpParams& params, const Architecture& arch, const Matrix& q0);

MlpParams smlp_backward(const ForwardCache& cache, const MlpParams& params, const Architecture& arch,
                        const Matrix& grad_q);

/// One bias-corrected Adam update in place. Throws TrainingDivergenceError on
/// a non-finite gradient before touching anything.
void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads);

}  // namespace smlp
