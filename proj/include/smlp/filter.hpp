#pragma once

#include <string>
#include <string_view>

#include "smlp/siep.hpp"

namespace smlp {

enum class Topology { folded, extended_box };

std::string_view to_string(Topology t);

/// Order-N filter: (N+2)x(N+2) transverse coupling matrix T and the allowed
/// coupling pattern of the target topology.
struct FilterInstance {
    std::string name;
    Eigen::Index order = 0;
    Matrix t;
    Matrix mask_s;
};

struct CouplingReport {
    double tol = 0.0;
    double spectrum_error = 0.0;
    bool spectrum_ok = false;
    double sparsity_violation = 0.0;
    bool sparsity_ok = false;
    double symmetry_violation = 0.0;
    bool symmetric_ok = false;
    double source_coupling = 0.0;  // ||row 1 of m restricted to resonators||
    double load_coupling = 0.0;    // same for row N+2
    double border_violation = 0.0;
    bool border_ok = false;

    bool all_ok() const { return spectrum_ok && sparsity_ok && symmetric_ok && border_ok; }
};

/// Allowed-coupling masks for order 8 and 10. Throws DimensionError otherwise.
Matrix topology_mask(Topology kind, Eigen::Index order);

/// Transverse coupling matrices shipped with the library (orders 8 and 10).
Matrix transverse_matrix(Eigen::Index order);

FilterInstance make_filter(Topology kind, Eigen::Index order);

/// [[1,0,0],[0,X,0],[0,0,1]]
Matrix embed_inner(const Matrix& x);

/// Inner block of an (N+2)x(N+2) matrix; the adjoint of embed_inner on gradients.
Matrix extract_inner(const Matrix& q);

/// kappa = (0,0), Omega = 0, carrier T, S = topology mask, fixed border.
SiepInstance filter_as_siep(const FilterInstance& fi);

/// Recover a FilterInstance from a fixed-border SIEP instance.
FilterInstance filter_from_siep(const SiepInstance& inst);

CouplingReport verify_coupling(const Matrix& m, const FilterInstance& fi, double tol);

}  // namespace smlp
