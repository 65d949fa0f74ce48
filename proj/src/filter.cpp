#include "smlp/filter.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace smlp {

namespace {

Matrix mask_from_rows(const std::vector<std::string_view>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != n) throw DimensionError("mask row has wrong length");
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)] == '1' ? 1.0 : 0.0;
    }
    return m;
}

// clang-format off
const std::vector<std::string_view> kFolded8 = {
    "1100000001",
    "1110000011",
    "0111000110",
    "0011101100",
    "0001111000",
    "0000111000",
    "0001111100",
    "0011001110",
    "0110000111",
    "1100000011",
};
const std::vector<std::string_view> kExtBox8 = {
    "0100000000",
    "1110100000",
    "0111000000",
    "0011101000",
    "0101110000",
    "0000111100",
    "0001011010",
    "0000010110",
    "0000001111",
    "0000000010",
};
const std::vector<std::string_view> kFolded10 = {
    "110000000001",
    "111000000011",
    "011100000110",
    "001110001100",
    "000111011000",
    "000011110000",
    "000001110000",
    "000011111000",
    "000110011100",
    "001100001110",
    "011000000111",
    "110000000011",
};
const std::vector<std::string_view> kExtBox10 = {
    "010000000000",
    "111010000000",
    "011100000000",
    "001110100000",
    "010111000000",
    "000011101000",
    "000101110000",
    "000000111010",
    "000001011100",
    "000000001110",
    "000000010111",
    "000000000010",
};

// Transverse form: source couplings (row 1), resonator self-couplings
// (diagonal), load couplings (row N+2).
struct TransverseData {
    std::vector<double> source;
    std::vector<double> diagonal;
    std::vector<double> load;
};

const TransverseData kTransverse8 = {
    {-0.3049, -0.3384, 0.3261, 0.4064, 0.2741, -0.4140, -0.4059, 0.4439},
    {1.1742, -1.1266, -1.1248, 1.1098, -0.9343, 0.6831, -0.5550, 0.0623},
    {0.3049, 0.3384, 0.3261, 0.4064, 0.2741, 0.4140, 0.4059, 0.4439},
};
const TransverseData kTransverse10 = {
    {-0.2684, 0.2828, -0.2980, 0.3387, 0.2042, -0.3234, -0.2899, 0.3399, 0.3613, -0.3647},
    {-1.1113, 1.0864, 1.0853, -1.0780, 0.9595, -0.8245, 0.7726, 0.4488, -0.4418, 0.0174},
    {0.2684, 0.2828, 0.2980, 0.3387, 0.2042, 0.3234, 0.2899, 0.3399, 0.3613, 0.3647},
};
// clang-format on

[[noreturn]] void unsupported_order(Eigen::Index order) {
    std::ostringstream msg;
    msg << "filter order " << order << " is not available (supported: 8, 10)";
    throw DimensionError(msg.str());
}

double inner_row_norm(const Matrix& m, Eigen::Index row) { return m.row(row).segment(1, m.cols() - 2).norm(); }

}  // namespace

std::string_view to_string(Topology t) { return t == Topology::folded ? "folded" : "extended_box"; }

Matrix topology_mask(Topology kind, Eigen::Index order) {
    if (order == 8) return mask_from_rows(kind == Topology::folded ? kFolded8 : kExtBox8);
    if (order == 10) return mask_from_rows(kind == Topology::folded ? kFolded10 : kExtBox10);
    unsupported_order(order);
}

Matrix transverse_matrix(Eigen::Index order) {
    const TransverseData* data = nullptr;
    if (order == 8)
        data = &kTransverse8;
    else if (order == 10)
        data = &kTransverse10;
    else
        unsupported_order(order);

    const Eigen::Index n = order + 2;
    Matrix t = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < order; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        t(0, k + 1) = t(k + 1, 0) = data->source[idx];
        t(n - 1, k + 1) = t(k + 1, n - 1) = data->load[idx];
        t(k + 1, k + 1) = data->diagonal[idx];
    }
    return t;
}

FilterInstance make_filter(Topology kind, Eigen::Index order) {
    FilterInstance fi;
    fi.name = std::string("filter_") + (kind == Topology::folded ? "folded_" : "extbox_") + std::to_string(order);
    fi.order = order;
    fi.t = transverse_matrix(order);
    fi.mask_s = topology_mask(kind, order);
    return fi;
}

Matrix embed_inner(const Matrix& x) {
    if (x.rows() != x.cols()) throw DimensionError("embed_inner: inner block must be square");
    const Eigen::Index n = x.rows() + 2;
    Matrix q = Matrix::Zero(n, n);
    q(0, 0) = 1.0;
    q(n - 1, n - 1) = 1.0;
    q.block(1, 1, x.rows(), x.cols()) = x;
    return q;
}

Matrix extract_inner(const Matrix& q) {
    if (q.rows() != q.cols() || q.rows() < 3) throw DimensionError("extract_inner: need a square matrix of side >= 3");
    return q.block(1, 1, q.rows() - 2, q.cols() - 2);
}

SiepInstance filter_as_siep(const FilterInstance& fi) {
    const Eigen::Index n = fi.order + 2;
    if (fi.t.rows() != n || fi.t.cols() != n || fi.mask_s.rows() != n || fi.mask_s.cols() != n)
        throw DimensionError("filter_as_siep: T and mask must be (N+2)x(N+2)");
    if ((fi.t - fi.t.transpose()).cwiseAbs().maxCoeff() > 1e-8)
        throw InvalidInstanceError("filter_as_siep: T must be symmetric");
    if ((fi.mask_s - fi.mask_s.transpose()).cwiseAbs().maxCoeff() != 0.0)
        throw InvalidInstanceError("filter_as_siep: topology mask must be symmetric");

    SiepInstance inst;
    inst.name = fi.name;
    inst.n = n;
    inst.carrier = fi.t;
    inst.diagonal_carrier = false;
    inst.mask_s = fi.mask_s;
    inst.prescribed = Matrix::Zero(n, n);
    inst.kappa1 = 0;
    inst.kappa2 = 0;
    inst.spectrum = sym_eigen(fi.t).values;
    inst.fixed_border = true;
    return inst;
}

FilterInstance filter_from_siep(const SiepInstance& inst) {
    if (!inst.fixed_border) throw InvalidInstanceError("filter_from_siep: instance has no fixed border");
    FilterInstance fi;
    fi.name = inst.name;
    fi.order = inst.n - 2;
    fi.t = inst.carrier;
    fi.mask_s = inst.mask_s;
    return fi;
}

CouplingReport verify_coupling(const Matrix& m, const FilterInstance& fi, double tol) {
    const Eigen::Index n = fi.order + 2;
    if (m.rows() != n || m.cols() != n) throw DimensionError("verify_coupling: matrix size mismatch");
    CouplingReport rep;
    rep.tol = tol;

    rep.symmetry_violation = (m - m.transpose()).cwiseAbs().maxCoeff();
    rep.symmetric_ok = rep.symmetry_violation <= tol;

    if (rep.symmetry_violation <= 1e-6) {
        const Vector got = sym_eigen(m).values;
        const Vector want = sym_eigen(fi.t).values;
        rep.spectrum_error = (got - want).cwiseAbs().maxCoeff();
    } else {
        rep.spectrum_error = std::numeric_limits<double>::infinity();
    }
    rep.spectrum_ok = rep.spectrum_error <= tol;

    const Matrix outside = (Matrix::Ones(n, n) - fi.mask_s).cwiseProduct(m);
    rep.sparsity_violation = outside.cwiseAbs().maxCoeff();
    rep.sparsity_ok = rep.sparsity_violation <= tol;

    rep.source_coupling = inner_row_norm(m, 0);
    rep.load_coupling = inner_row_norm(m, n - 1);
    rep.border_violation = std::max(std::abs(rep.source_coupling - inner_row_norm(fi.t, 0)),
                                    std::abs(rep.load_coupling - inner_row_norm(fi.t, n - 1)));
    rep.border_ok = rep.border_violation <= tol;
    return rep;
}

}  // namespace smlp
