#pragma once

#include <optional>
#include <string>

#include "smlp/linalg.hpp"

namespace smlp {

/// One structured inverse eigenvalue problem.
///
/// The reconstructed matrix is M = Omega + S o (Q C Q^T) where C is the
/// spectral carrier (a diagonal Lambda for every symmetric problem, or a
/// general square matrix such as a filter's transverse coupling matrix).
/// S marks free entries with 1; Omega holds the prescribed values where S = 0.
struct SiepInstance {
    std::string name;
    Eigen::Index n = 0;
    Matrix carrier;
    bool diagonal_carrier = true;
    Matrix mask_s;
    Matrix prescribed;
    int kappa1 = 0;
    int kappa2 = 0;
    std::optional<Vector> row_targets;
    Vector spectrum;
    /// Q is identity on its first and last row/column and only the inner
    /// (n-2)x(n-2) block is optimized (coupling-matrix problems).
    bool fixed_border = false;

    static SiepInstance from_diagonal(std::string name, const Vector& lambda, Matrix mask_s, Matrix prescribed,
                                      int kappa1, int kappa2, std::optional<Vector> row_targets = std::nullopt);
};

/// A validated instance with the complement mask Gamma = E - S cached.
class CheckedInstance {
public:
    const SiepInstance& raw() const { return inst_; }
    const Matrix& gamma() const { return gamma_; }
    bool symmetric() const { return symmetric_; }
    Eigen::Index n() const { return inst_.n; }
    /// Side of the matrix the network produces (n, or n-2 with a fixed border).
    Eigen::Index free_side() const { return inst_.fixed_border ? inst_.n - 2 : inst_.n; }

private:
    friend CheckedInstance validate_instance(SiepInstance inst);
    explicit CheckedInstance(SiepInstance inst) : inst_(std::move(inst)) {}
    SiepInstance inst_;
    Matrix gamma_;
    bool symmetric_ = false;
};

struct LossBreakdown {
    double total = 0.0;
    double nonneg = 0.0;
    double spec = 0.0;
    double row = 0.0;
};

struct ConstraintReport {
    double tol = 0.0;
    double prescribed_violation = 0.0;
    bool prescribed_ok = true;
    bool nonneg_checked = false;
    double nonneg_violation = 0.0;
    bool nonneg_ok = true;
    bool rows_checked = false;
    double row_violation = 0.0;
    bool rows_ok = true;
    double symmetry_violation = 0.0;
    bool symmetric_ok = true;

    bool all_ok() const { return prescribed_ok && nonneg_ok && rows_ok && symmetric_ok; }
};

CheckedInstance validate_instance(SiepInstance inst);

/// A = Q C Q^T
Matrix candidate(const Matrix& q, const CheckedInstance& inst);

/// M = Omega + S o (Q C Q^T)
Matrix assemble_target(const Matrix& q, const CheckedInstance& inst);

LossBreakdown loss_eval(const Matrix& q, const CheckedInstance& inst);

/// dLoss/dQ with Q treated as an unconstrained matrix.
Matrix loss_grad_q(const Matrix& q, const CheckedInstance& inst);

/// max_i |sorted eig(m)_i - sorted sigma_i|
double error_metric(const Matrix& m, const Vector& sigma);

ConstraintReport constraint_report(const Matrix& m, const CheckedInstance& inst, double tol);

}  // namespace smlp
