#include "smlp/siep.hpp"

#include <algorithm>
#include <sstream>

namespace smlp {

namespace {

constexpr double kSymmetryTol = 1e-12;

bool is_symmetric(const Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol; }

void require_shape(const Matrix& m, Eigen::Index n, const char* what) {
    if (m.rows() != n || m.cols() != n) {
        std::ostringstream msg;
        msg << "instance: " << what << " must be " << n << "x" << n << ", got " << m.rows() << "x" << m.cols();
        throw InvalidInstanceError(msg.str());
    }
}

}  // namespace

SiepInstance SiepInstance::from_diagonal(std::string name, const Vector& lambda, Matrix mask_s, Matrix prescribed,
                                         int kappa1, int kappa2, std::optional<Vector> row_targets) {
    SiepInstance inst;
    inst.name = std::move(name);
    inst.n = lambda.size();
    inst.carrier = lambda.asDiagonal();
    inst.diagonal_carrier = true;
    inst.mask_s = std::move(mask_s);
    inst.prescribed = std::move(prescribed);
    inst.kappa1 = kappa1;
    inst.kappa2 = kappa2;
    inst.row_targets = std::move(row_targets);
    inst.spectrum = lambda;
    return inst;
}

CheckedInstance validate_instance(SiepInstance inst) {
    const Eigen::Index n = inst.n;
    if (n < 1) throw InvalidInstanceError("instance: n must be >= 1");
    require_shape(inst.carrier, n, "carrier");
    require_shape(inst.mask_s, n, "mask_s");
    require_shape(inst.prescribed, n, "prescribed");
    if (!inst.carrier.allFinite() || !inst.prescribed.allFinite())
        throw InvalidInstanceError("instance: non-finite carrier or prescribed entries");
    if (inst.kappa1 != 0 && inst.kappa1 != 1) throw InvalidInstanceError("instance: kappa1 must be 0 or 1");
    if (inst.kappa2 != 0 && inst.kappa2 != 1) throw InvalidInstanceError("instance: kappa2 must be 0 or 1");

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double s = inst.mask_s(i, j);
            if (s != 0.0 && s != 1.0) {
                std::ostringstream msg;
                msg << "instance: mask entry (" << i << "," << j << ") = " << s << " is not 0/1";
                throw InvalidInstanceError(msg.str());
            }
            if (s == 1.0 && inst.prescribed(i, j) != 0.0) {
                std::ostringstream msg;
                msg << "instance: prescribed value " << inst.prescribed(i, j) << " at free position (" << i << ","
                    << j << ")";
                throw InvalidInstanceError(msg.str());
            }
        }
    }
    if (inst.kappa2 == 1) {
        if (!inst.row_targets) throw InvalidInstanceError("instance: kappa2 = 1 requires row_targets");
        if (inst.row_targets->size() != n) throw InvalidInstanceError("instance: row_targets must have length n");
    }
    if (inst.diagonal_carrier) {
        Matrix off = inst.carrier;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() != 0.0)
            throw InvalidInstanceError("instance: carrier flagged diagonal has off-diagonal entries");
    }
    if (inst.spectrum.size() == 0) {
        if (inst.diagonal_carrier)
            inst.spectrum = inst.carrier.diagonal();
        else if (is_symmetric(inst.carrier))
            inst.spectrum = sym_eigen(inst.carrier).values;
    }
    if (inst.spectrum.size() != 0 && inst.spectrum.size() != n)
        throw InvalidInstanceError("instance: spectrum must have length n");
    if (inst.fixed_border && n < 3) throw InvalidInstanceError("instance: fixed_border needs n >= 3");

    CheckedInstance out(std::move(inst));
    out.gamma_ = Matrix::Ones(n, n) - out.inst_.mask_s;
    const auto& r = out.inst_;
    out.symmetric_ = is_symmetric(r.carrier) && is_symmetric(r.mask_s) && is_symmetric(r.prescribed);
    return out;
}

Matrix candidate(const Matrix& q, const CheckedInstance& inst) {
    const auto& r = inst.raw();
    if (r.diagonal_carrier) return (q * r.carrier.diagonal().asDiagonal()) * q.transpose();
    return q * r.carrier * q.transpose();
}

Matrix assemble_target(const Matrix& q, const CheckedInstance& inst) {
    const auto& r = inst.raw();
    return r.prescribed + r.mask_s.cwiseProduct(candidate(q, inst));
}

LossBreakdown loss_eval(const Matrix& q, const CheckedInstance& inst) {
    const auto& r = inst.raw();
    const Matrix a = candidate(q, inst);
    const Matrix free_part = r.mask_s.cwiseProduct(a);
    const Matrix fixed_part = inst.gamma().cwiseProduct(a);

    LossBreakdown out;
    out.nonneg = 0.5 * free_part.cwiseMin(0.0).squaredNorm();
    if (r.kappa1 == 1)
        out.spec = 0.5 * (r.prescribed - fixed_part.cwiseMax(0.0)).squaredNorm();
    else
        out.spec = 0.5 * (r.prescribed - fixed_part).squaredNorm();
    if (r.row_targets) {
        const Vector beta = (r.prescribed + free_part).rowwise().sum();
        out.row = 0.5 * (*r.row_targets - beta).squaredNorm();
    }
    out.total = r.kappa1 * out.nonneg + out.spec + r.kappa2 * out.row;
    return out;
}

Matrix loss_grad_q(const Matrix& q, const CheckedInstance& inst) {
    const auto& r = inst.raw();
    const Eigen::Index n = r.n;
    const Matrix a = candidate(q, inst);

    // dLoss/dA, accumulated term by term
    Matrix ga(n, n);
    if (r.kappa1 == 1) {
        const Matrix fixed_part = inst.gamma().cwiseProduct(a);
        const Matrix residual = r.prescribed - fixed_part.cwiseMax(0.0);
        const Matrix active = (fixed_part.array() > 0.0).cast<double>().matrix();
        ga = -inst.gamma().cwiseProduct(residual).cwiseProduct(active);
        ga += r.mask_s.cwiseProduct(a.cwiseMin(0.0));
    } else {
        ga = -inst.gamma().cwiseProduct(r.prescribed - inst.gamma().cwiseProduct(a));
    }
    if (r.kappa2 == 1) {
        const Vector beta = (r.prescribed + r.mask_s.cwiseProduct(a)).rowwise().sum();
        const Vector resid = *r.row_targets - beta;
        ga -= resid.asDiagonal() * r.mask_s;
    }

    // A = Q C Q^T  =>  dL/dQ = G Q C^T + G^T Q C
    if (r.diagonal_carrier) {
        const auto lam = r.carrier.diagonal().asDiagonal();
        return (ga + ga.transpose()) * (q * lam);
    }
    return ga * q * r.carrier.transpose() + ga.transpose() * q * r.carrier;
}

double error_metric(const Matrix& m, const Vector& sigma) {
    if (m.rows() != m.cols() || m.rows() != sigma.size())
        throw DimensionError("error_metric: matrix and spectrum sizes differ");
    if ((m - m.transpose()).norm() > 1e-6)
        throw UnsupportedVerificationError("error_metric: spectral check needs a symmetric matrix");
    Vector got = sym_eigen(m).values;  // ascending
    Vector want = sigma;
    std::sort(want.data(), want.data() + want.size());
    return (got - want).cwiseAbs().maxCoeff();
}

ConstraintReport constraint_report(const Matrix& m, const CheckedInstance& inst, double tol) {
    const auto& r = inst.raw();
    if (m.rows() != r.n || m.cols() != r.n) throw DimensionError("constraint_report: matrix size mismatch");
    ConstraintReport rep;
    rep.tol = tol;

    rep.prescribed_violation = (inst.gamma().cwiseProduct(m) - r.prescribed).cwiseAbs().maxCoeff();
    rep.prescribed_ok = rep.prescribed_violation <= tol;

    if (r.kappa1 == 1) {
        rep.nonneg_checked = true;
        rep.nonneg_violation = std::max(0.0, -m.minCoeff());
        rep.nonneg_ok = rep.nonneg_violation <= tol;
    }
    if (r.kappa2 == 1 && r.row_targets) {
        rep.rows_checked = true;
        rep.row_violation = (m.rowwise().sum() - *r.row_targets).cwiseAbs().maxCoeff();
        rep.rows_ok = rep.row_violation <= tol;
    }
    if (inst.symmetric()) {
        rep.symmetry_violation = (m - m.transpose()).cwiseAbs().maxCoeff();
        rep.symmetric_ok = rep.symmetry_violation <= tol;
    }
    return rep;
}

}  // namespace smlp
