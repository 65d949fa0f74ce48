#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "smlp/net.hpp"
#include "smlp/siep.hpp"

namespace smlp {

struct SolverConfig {
    /// input_dim/output_dim may be left at 0; train() fills them from the instance.
    Architecture arch;
    std::uint64_t max_epochs = 10000;
    double tol = 1e-8;
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    /// Optional step decay: lr *= lr_decay_gamma every lr_decay_every epochs (0 = off).
    double lr_decay_gamma = 1.0;
    std::uint64_t lr_decay_every = 0;
    std::uint64_t seed = 0;
    int retry_on_numerical_error = 3;
    bool record_history = true;

    void validate() const;
};

struct SolveResult {
    bool converged = false;
    std::uint64_t epochs_used = 0;
    std::vector<LossBreakdown> loss_history;
    LossBreakdown final_loss;
    Matrix q;
    Matrix m;
    double wall_seconds = 0.0;
    /// Worst ||Q^T Q - I||_F over every epoch of every attempt.
    double max_orthogonality_error = 0.0;
    /// Sorted-spectrum infinity-norm error of m; empty for nonsymmetric problems.
    std::optional<double> er;
    int attempts = 0;
    std::string failure_reason;
};

struct TrialAggregate {
    std::size_t trials = 0;
    std::size_t converged = 0;
    double xi = 0.0;
    /// Mean er over converged trials; empty when no converged trial has one.
    std::optional<double> er;
    std::optional<double> mean_epoch;
    double mean_t = 0.0;
    double mean_final_loss = 0.0;
};

struct TrialRun {
    std::vector<SolveResult> results;
    TrialAggregate aggregate;
};

/// Architecture with input/output sized for the instance.
Architecture resolve_architecture(const Architecture& arch, const CheckedInstance& inst);

/// One run of the SMLP training loop.
SolveResult train(const CheckedInstance& inst, const SolverConfig& cfg, std::mt19937_64& rng);

/// Generator for trial `index` of a run seeded with `master_seed`.
std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t index);

TrialAggregate aggregate_trials(const std::vector<SolveResult>& results);

/// Independent seeded trials, `jobs` at a time (0 = hardware concurrency).
TrialRun run_trials(const CheckedInstance& inst, const SolverConfig& cfg, std::size_t trials, std::size_t jobs = 0);

}  // namespace smlp
