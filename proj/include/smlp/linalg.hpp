#pragma once

// Dense real kernels used by the Stiefel layer and by verification:
// Householder QR, one-sided Jacobi SVD, cyclic Jacobi symmetric eigensolver,
// orthogonalization (QR factor or polar factor) and its reverse-mode
// derivative. Everything is templated on the scalar type; the rest of the
// library instantiates with double.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "smlp/errors.hpp"

namespace smlp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class OrthoMethod { qr, svd };

inline std::string_view to_string(OrthoMethod m) { return m == OrthoMethod::qr ? "qr" : "svd"; }

template <typename Scalar>
struct QrFactors {
    MatrixX<Scalar> q;
    MatrixX<Scalar> r;
};

template <typename Scalar>
struct SvdFactors {
    MatrixX<Scalar> u;
    VectorX<Scalar> sigma;  // descending
    MatrixX<Scalar> v;
};

template <typename Scalar>
struct EigenFactors {
    VectorX<Scalar> values;   // ascending
    MatrixX<Scalar> vectors;  // columns
};

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, const char* op) {
    if (a.rows() != a.cols() || a.rows() < 1) {
        std::ostringstream msg;
        msg << op << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
        throw DimensionError(msg.str());
    }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* op) {
    if (!a.allFinite()) throw Error(std::string(op) + ": non-finite entry in input");
}

}  // namespace detail

/// Householder QR of a square matrix with the sign convention diag(R) >= 0.
/// A zero diagonal entry keeps whatever sign the reflection produced.
template <typename Derived>
QrFactors<typename Derived::Scalar> qr_decompose(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    detail::require_square(a, "qr_decompose");
    detail::require_finite(a, "qr_decompose");

    const Eigen::Index n = a.rows();
    MatrixX<Scalar> r = a;
    MatrixX<Scalar> q = MatrixX<Scalar>::Identity(n, n);
    VectorX<Scalar> v(n);

    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index len = n - k;
        auto x = r.col(k).tail(len);
        const Scalar norm_x = x.norm();
        if (norm_x == Scalar(0)) continue;
        const Scalar alpha = x(0) >= Scalar(0) ? -norm_x : norm_x;
        auto vk = v.head(len);
        vk = x;
        vk(0) -= alpha;
        const Scalar vv = vk.squaredNorm();
        if (vv == Scalar(0)) continue;
        const Scalar scale = Scalar(2) / vv;

        // R <- H R on the trailing block, Q <- Q H
        auto block = r.bottomRightCorner(len, n - k);
        VectorX<Scalar> w = (vk.transpose() * block).transpose();
        block.noalias() -= (scale * vk) * w.transpose();
        r.col(k).tail(len - 1).setZero();
        r(k, k) = alpha;

        auto qblock = q.rightCols(len);
        VectorX<Scalar> qw = qblock * vk;
        qblock.noalias() -= (scale * qw) * vk.transpose();
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        if (r(i, i) < Scalar(0)) {
            r.row(i) = -r.row(i);
            q.col(i) = -q.col(i);
        }
    }
    return {std::move(q), std::move(r)};
}

/// SVD of a square matrix by one-sided (Hestenes) Jacobi rotations.
template <typename Derived>
SvdFactors<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    detail::require_square(a, "svd");
    detail::require_finite(a, "svd");

    const Eigen::Index n = a.rows();
    MatrixX<Scalar> w = a;
    MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const Scalar frob = a.norm();
    // pairs whose inner product is below this are already orthogonal at
    // the resolution of the input
    const Scalar floor = (Scalar(1e-14) * frob) * (Scalar(1e-14) * frob);
    constexpr int max_sweeps = 80;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (Eigen::Index i = 0; i < n - 1; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const Scalar alpha = w.col(i).squaredNorm();
                const Scalar beta = w.col(j).squaredNorm();
                const Scalar gamma = w.col(i).dot(w.col(j));
                if (std::abs(gamma) <= floor) continue;
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const Scalar zeta = (beta - alpha) / (Scalar(2) * gamma);
                const Scalar t = (zeta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                                 (std::abs(zeta) + std::sqrt(Scalar(1) + zeta * zeta));
                const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
                const Scalar s = c * t;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar wi = w(k, i), wj = w(k, j);
                    w(k, i) = c * wi - s * wj;
                    w(k, j) = s * wi + c * wj;
                    const Scalar vi = v(k, i), vj = v(k, j);
                    v(k, i) = c * vi - s * vj;
                    v(k, j) = s * vi + c * vj;
                }
            }
        }
        if (!rotated) break;
    }

    VectorX<Scalar> norms(n);
    for (Eigen::Index j = 0; j < n; ++j) norms(j) = w.col(j).norm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index l, Eigen::Index r) { return norms(l) > norms(r); });

    SvdFactors<Scalar> out{MatrixX<Scalar>::Zero(n, n), VectorX<Scalar>(n), MatrixX<Scalar>(n, n)};
    const Scalar tiny = std::max(frob, Scalar(1)) * eps * Scalar(n);
    Eigen::Index filled = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.sigma(k) = norms(src);
        out.v.col(k) = v.col(src);
        if (norms(src) > tiny) {
            out.u.col(k) = w.col(src) / norms(src);
            filled = k + 1;
        }
    }
    // Complete U for (numerically) zero singular values by Gram-Schmidt
    // over the standard basis.
    Eigen::Index e = 0;
    for (Eigen::Index k = filled; k < n; ++k) {
        for (; e < n; ++e) {
            VectorX<Scalar> cand = VectorX<Scalar>::Unit(n, e);
            for (int pass = 0; pass < 2; ++pass)
                for (Eigen::Index p = 0; p < k; ++p) cand -= out.u.col(p).dot(cand) * out.u.col(p);
            const Scalar nrm = cand.norm();
            if (nrm > Scalar(0.5)) {
                out.u.col(k) = cand / nrm;
                ++e;
                break;
            }
        }
    }
    return out;
}

/// Cyclic Jacobi eigensolver for symmetric input. The input is symmetrized
/// as (A + A^T)/2 after the asymmetry check.
template <typename Derived>
EigenFactors<typename Derived::Scalar> sym_eigen(const Eigen::MatrixBase<Derived>& a_in) {
    using Scalar = typename Derived::Scalar;
    detail::require_square(a_in, "sym_eigen");
    detail::require_finite(a_in, "sym_eigen");

    const Scalar asym = (a_in - a_in.transpose()).norm();
    if (asym > Scalar(1e-8) * (Scalar(1) + a_in.norm())) {
        std::ostringstream msg;
        msg << "sym_eigen: input is not symmetric (||A - A^T||_F = " << asym << ")";
        throw AsymmetricInputError(msg.str());
    }

    const Eigen::Index n = a_in.rows();
    MatrixX<Scalar> a = (a_in + a_in.transpose()) / Scalar(2);
    MatrixX<Scalar> vecs = MatrixX<Scalar>::Identity(n, n);
    const Scalar target = Scalar(1e-13) * a.norm();
    constexpr int max_sweeps = 100;

    auto off_norm = [&] {
        Scalar s = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < max_sweeps && off_norm() > target; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Scalar apq = a(p, q);
                if (apq == Scalar(0)) continue;
                const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
                const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                                 (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
                const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
                const Scalar s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = Scalar(0);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar vkp = vecs(k, p), vkq = vecs(k, q);
                    vecs(k, p) = c * vkp - s * vkq;
                    vecs(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index l, Eigen::Index r) { return a(l, l) < a(r, r); });
    EigenFactors<Scalar> out{VectorX<Scalar>(n), MatrixX<Scalar>(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

namespace detail {

template <typename Scalar>
void check_qr_nonsingular(const MatrixX<Scalar>& r, Scalar frob) {
    const Scalar min_diag = r.diagonal().cwiseAbs().minCoeff();
    if (!(min_diag > Scalar(1e-12) * frob)) {
        std::ostringstream msg;
        msg << "orthogonalize(qr): matrix is numerically singular, min |R_ii| = " << min_diag;
        throw SingularMatrixError(msg.str(), static_cast<double>(min_diag));
    }
}

}  // namespace detail

/// Maps a square matrix onto the orthogonal group: the Q factor of QR, or the
/// polar factor U V^T (nearest orthogonal matrix in Frobenius norm).
template <typename Derived>
MatrixX<typename Derived::Scalar> orthogonalize(const Eigen::MatrixBase<Derived>& a, OrthoMethod method) {
    using Scalar = typename Derived::Scalar;
    if (method == OrthoMethod::qr) {
        auto f = qr_decompose(a);
        detail::check_qr_nonsingular<Scalar>(f.r, a.norm());
        return std::move(f.q);
    }
    auto f = svd(a);
    return f.u * f.v.transpose();
}

/// Reverse-mode derivative of orthogonalize: given q = orthogonalize(a) and
/// the cotangent g = dL/dq, returns dL/da.
///
/// QR:    dA = (G + Q copyltu(M)) R^{-T},  M = -G^T Q
/// polar: dA = U [ (H - H^T)_ij / (s_i + s_j) ] V^T,  H = U^T G V
template <typename DerivedA, typename DerivedQ, typename DerivedG>
MatrixX<typename DerivedA::Scalar> orthogonalize_backward(const Eigen::MatrixBase<DerivedA>& a,
                                                          const Eigen::MatrixBase<DerivedQ>& q,
                                                          const Eigen::MatrixBase<DerivedG>& g,
                                                          OrthoMethod method) {
    using Scalar = typename DerivedA::Scalar;
    detail::require_square(a, "orthogonalize_backward");
    if (q.rows() != a.rows() || q.cols() != a.cols() || g.rows() != a.rows() || g.cols() != a.cols())
        throw DimensionError("orthogonalize_backward: a, q and g must share one square shape");

    const Eigen::Index n = a.rows();
    if (method == OrthoMethod::qr) {
        auto f = qr_decompose(a);
        detail::check_qr_nonsingular<Scalar>(f.r, a.norm());
        const MatrixX<Scalar> m = -(g.transpose() * f.q);
        MatrixX<Scalar> sym = m.template triangularView<Eigen::Lower>();
        sym.template triangularView<Eigen::StrictlyUpper>() = m.transpose().template triangularView<Eigen::StrictlyUpper>();
        const MatrixX<Scalar> b = g + f.q * sym;
        // X R^T = B  <=>  R X^T = B^T
        MatrixX<Scalar> xt = f.r.template triangularView<Eigen::Upper>().solve(b.transpose());
        return xt.transpose();
    }

    auto f = svd(a);
    const MatrixX<Scalar> h = f.u.transpose() * g * f.v;
    MatrixX<Scalar> c = MatrixX<Scalar>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const Scalar denom = f.sigma(i) + f.sigma(j);
            if (std::abs(denom) < Scalar(1e-8)) {
                std::ostringstream msg;
                msg << "orthogonalize_backward(svd): singular values " << f.sigma(i) << " and " << f.sigma(j)
                    << " make the polar derivative ill-conditioned";
                throw IllConditionedGradientError(msg.str());
            }
            c(i, j) = (h(i, j) - h(j, i)) / denom;
        }
    }
    return f.u * c * f.v.transpose();
}

/// Haar-style random orthogonal matrix: the QR factor of a Gaussian matrix.
template <typename Scalar = double, typename Rng>
MatrixX<Scalar> random_orthogonal(Eigen::Index n, Rng& rng) {
    if (n < 1) throw DimensionError("random_orthogonal: n must be >= 1");
    std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
    MatrixX<Scalar> g(n, n);
    for (;;) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
        try {
            return orthogonalize(g, OrthoMethod::qr);
        } catch (const SingularMatrixError&) {
            // measure-zero event; draw again
        }
    }
}

/// ||Q^T Q - I||_F
template <typename Derived>
typename Derived::Scalar orthogonality_error(const Eigen::MatrixBase<Derived>& q) {
    using Scalar = typename Derived::Scalar;
    return (q.transpose() * q - MatrixX<Scalar>::Identity(q.cols(), q.cols())).norm();
}

}  // namespace smlp
