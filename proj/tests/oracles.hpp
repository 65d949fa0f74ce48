#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here calls the code under test except where a
// function is explicitly the thing being differentiated.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "smlp/net.hpp"
#include "smlp/siep.hpp"

namespace oracle {

using smlp::Matrix;
using smlp::Vector;

inline double rel_err(const Matrix& got, const Matrix& want) {
    const double scale = std::max({got.norm(), want.norm(), 1e-8});
    return (got - want).norm() / scale;
}

/// Central differences of a scalar function of a matrix.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double h = 1e-6) {
    Matrix g(x.rows(), x.cols());
    Matrix xp = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double v = x(i, j);
            xp(i, j) = v + h;
            const double fp = f(xp);
            xp(i, j) = v - h;
            const double fm = f(xp);
            xp(i, j) = v;
            g(i, j) = (fp - fm) / (2.0 * h);
        }
    }
    return g;
}

/// Every scalar in the network, weights row by row then bias, layer by layer.
inline std::vector<double*> parameter_slots(smlp::MlpParams& p) {
    std::vector<double*> out;
    for (auto& l : p.layers) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(&l.weight(r, c));
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(&l.bias(r));
    }
    return out;
}

inline Vector flatten_params(const smlp::MlpParams& p) {
    smlp::MlpParams copy = p;
    auto slots = parameter_slots(copy);
    Vector v(static_cast<Eigen::Index>(slots.size()));
    for (std::size_t i = 0; i < slots.size(); ++i) v(static_cast<Eigen::Index>(i)) = *slots[i];
    return v;
}

/// Finite-difference gradient over every network parameter.
inline Vector fd_param_gradient(const std::function<double(const smlp::MlpParams&)>& f, const smlp::MlpParams& p,
                                double h = 1e-6) {
    smlp::MlpParams work = p;
    auto slots = parameter_slots(work);
    Vector g(static_cast<Eigen::Index>(slots.size()));
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double v = *slots[i];
        *slots[i] = v + h;
        const double fp = f(work);
        *slots[i] = v - h;
        const double fm = f(work);
        *slots[i] = v;
        g(static_cast<Eigen::Index>(i)) = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// The three loss terms written out entry by entry with explicit loops.
inline smlp::LossBreakdown brute_loss(const Matrix& q, const smlp::SiepInstance& r) {
    const Eigen::Index n = r.n;
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index l = 0; l < n; ++l) s += q(i, k) * r.carrier(k, l) * q(j, l);
            a(i, j) = s;
        }
    smlp::LossBreakdown out;
    std::vector<double> beta(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double s = r.mask_s(i, j), g = 1.0 - s;
            const double free = s * a(i, j);
            const double neg = free < 0.0 ? free : 0.0;
            out.nonneg += 0.5 * neg * neg;
            double fixed = g * a(i, j);
            if (r.kappa1 == 1 && fixed < 0.0) fixed = 0.0;
            const double d = r.prescribed(i, j) - fixed;
            out.spec += 0.5 * d * d;
            beta[static_cast<std::size_t>(i)] += r.prescribed(i, j) + free;
        }
    }
    if (r.row_targets)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (*r.row_targets)(i) - beta[static_cast<std::size_t>(i)];
            out.row += 0.5 * d * d;
        }
    out.total = r.kappa1 * out.nonneg + out.spec + r.kappa2 * out.row;
    return out;
}

/// Random symmetric instance. Omega is nonzero on about half the prescribed slots.
inline smlp::SiepInstance random_instance(Eigen::Index n, int k1, int k2, bool diagonal, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    Matrix s = Matrix::Zero(n, n), omega = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const bool free = coin(rng);
            s(i, j) = s(j, i) = free ? 1.0 : 0.0;
            if (!free && coin(rng)) omega(i, j) = omega(j, i) = u(rng);
        }
    Vector lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) lambda(i) = 2.0 * u(rng);
    std::optional<Vector> alpha;
    if (k2 == 1) {
        alpha = Vector(n);
        for (Eigen::Index i = 0; i < n; ++i) (*alpha)(i) = u(rng);
    }
    auto inst = smlp::SiepInstance::from_diagonal("random", lambda, s, omega, k1, k2, alpha);
    if (!diagonal) {
        Matrix c(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j) c(i, j) = c(j, i) = u(rng);
        inst.carrier = c;
        inst.diagonal_carrier = false;
        inst.spectrum = Vector();
    }
    return inst;
}

/// Smallest |x| over the entries the relu-type loss terms switch on.
inline double min_kink_distance(const Matrix& a, const smlp::SiepInstance& r) {
    double m = INFINITY;
    if (r.kappa1 == 0) return m;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) m = std::min(m, std::abs(a(i, j)));
    return m;
}

}  // namespace oracle
