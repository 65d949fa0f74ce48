#pragma once

#include <string>
#include <vector>

#include "smlp/siep.hpp"

namespace smlp {

struct CatalogEntry {
    std::string name;
    Eigen::Index n;
    int kappa1;
    int kappa2;
    std::string description;
};

/// Stable, sorted listing of the built-in instances.
std::vector<CatalogEntry> catalog();

/// Built-in instance by identifier. Besides the listed names, "jacobi<2n>"
/// is accepted for any even 2n >= 4. Throws UnknownInstanceError.
SiepInstance builtin(const std::string& name);

/// 2n x 2n Jacobi extension problem: recover J_2n (diag 2, off-diagonal 1)
/// from its leading n x n block and its 2n eigenvalues. With row_sums set,
/// kappa2 = 1 and the targets are the row sums of the true J_2n.
SiepInstance jacobi_instance(Eigen::Index half_n, bool row_sums = false);

/// The reference J_2n the Jacobi family is built from.
Matrix jacobi_matrix(Eigen::Index size);

/// Positions left free in graph10 (upper and lower triangle).
std::vector<std::pair<Eigen::Index, Eigen::Index>> graph10_free_positions();

}  // namespace smlp
