#include "smlp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "smlp/filter.hpp"

namespace smlp {

void SolverConfig::validate() const {
    if (max_epochs < 1) throw Error("solver config: max_epochs must be >= 1");
    if (!(tol > 0.0)) throw Error("solver config: tol must be > 0");
    if (!(lr > 0.0)) throw Error("solver config: lr must be > 0");
    if (!(lr_decay_gamma > 0.0)) throw Error("solver config: lr_decay_gamma must be > 0");
    if (retry_on_numerical_error < 0) throw Error("solver config: retry count must be >= 0");
}

Architecture resolve_architecture(const Architecture& arch, const CheckedInstance& inst) {
    Architecture out = arch;
    const Eigen::Index side = inst.free_side();
    if (out.input_dim == 0) out.input_dim = side * side;
    if (out.output_dim == 0) out.output_dim = side * side;
    if (out.input_dim != side * side || out.output_dim != side * side)
        throw DimensionError("architecture input/output dims do not match the instance");
    out.validate();
    return out;
}

namespace {

struct Attempt {
    bool converged = false;
    std::uint64_t epochs = 0;
    std::vector<LossBreakdown> history;
    LossBreakdown last;
    Matrix q;
};

// max_orth is shared across attempts so a retried attempt still counts
Attempt run_attempt(const CheckedInstance& inst, const SolverConfig& cfg, const Architecture& arch,
                    std::mt19937_64& rng, double& max_orth) {
    const bool bordered = inst.raw().fixed_border;
    const Matrix q0 = random_orthogonal(inst.free_side(), rng);
    MlpParams params = mlp_init(arch, rng);
    AdamState adam = AdamState::for_params(params, cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps);

    Attempt out;
    if (cfg.record_history) out.history.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(cfg.max_epochs, 1u << 16)));
    for (std::uint64_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        ForwardCache cache = smlp_forward(params, arch, q0);
        Matrix q = bordered ? embed_inner(cache.q) : cache.q;
        max_orth = std::max(max_orth, orthogonality_error(q));

        const LossBreakdown loss = loss_eval(q, inst);
        if (!std::isfinite(loss.total)) throw TrainingDivergenceError("loss became non-finite");
        out.epochs = epoch;
        out.last = loss;
        if (cfg.record_history) out.history.push_back(loss);
        out.q = std::move(q);
        if (loss.total < cfg.tol) {
            out.converged = true;
            break;
        }
        if (epoch == cfg.max_epochs) break;

        Matrix grad_q = loss_grad_q(out.q, inst);
        if (bordered) grad_q = extract_inner(grad_q);
        const MlpParams grads = smlp_backward(cache, params, arch, grad_q);
        if (cfg.lr_decay_every > 0 && epoch % cfg.lr_decay_every == 0) adam.learning_rate *= cfg.lr_decay_gamma;
        adam_step(adam, params, grads);
    }
    return out;
}

}  // namespace

SolveResult train(const CheckedInstance& inst, const SolverConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    const Architecture arch = resolve_architecture(cfg.arch, inst);
    const auto start = std::chrono::steady_clock::now();

    SolveResult result;
    for (int attempt = 0; attempt <= cfg.retry_on_numerical_error; ++attempt) {
        result.attempts = attempt + 1;
        try {
            Attempt a = run_attempt(inst, cfg, arch, rng, result.max_orthogonality_error);
            result.converged = a.converged;
            result.epochs_used = a.epochs;
            result.loss_history = std::move(a.history);
            result.final_loss = a.last;
            result.q = std::move(a.q);
            result.failure_reason = a.converged ? "" : "max_epochs reached";
            break;
        } catch (const SingularMatrixError& e) {
            result.failure_reason = e.what();
        } catch (const IllConditionedGradientError& e) {
            result.failure_reason = e.what();
        } catch (const TrainingDivergenceError& e) {
            result.failure_reason = e.what();
        }
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (result.q.size() == 0) {
        // every attempt hit a numerical failure
        result.converged = false;
        result.failure_reason = "retries exhausted: " + result.failure_reason;
        return result;
    }
    result.m = assemble_target(result.q, inst);
    const auto& raw = inst.raw();
    if (inst.symmetric() && raw.spectrum.size() == raw.n) {
        try {
            result.er = error_metric(result.m, raw.spectrum);
        } catch (const UnsupportedVerificationError&) {
            result.er.reset();
        }
    }
    return result;
}

std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

TrialAggregate aggregate_trials(const std::vector<SolveResult>& results) {
    TrialAggregate agg;
    agg.trials = results.size();
    double er_sum = 0.0, epoch_sum = 0.0, t_sum = 0.0, loss_sum = 0.0;
    std::size_t er_count = 0;
    for (const auto& r : results) {
        t_sum += r.wall_seconds;
        loss_sum += r.final_loss.total;
        if (!r.converged) continue;
        ++agg.converged;
        epoch_sum += static_cast<double>(r.epochs_used);
        if (r.er) {
            er_sum += *r.er;
            ++er_count;
        }
    }
    if (agg.trials > 0) {
        agg.xi = static_cast<double>(agg.converged) / static_cast<double>(agg.trials);
        agg.mean_t = t_sum / static_cast<double>(agg.trials);
        agg.mean_final_loss = loss_sum / static_cast<double>(agg.trials);
    }
    if (agg.converged > 0) agg.mean_epoch = epoch_sum / static_cast<double>(agg.converged);
    if (er_count > 0) agg.er = er_sum / static_cast<double>(er_count);
    return agg;
}

TrialRun run_trials(const CheckedInstance& inst, const SolverConfig& cfg, std::size_t trials, std::size_t jobs) {
    if (trials < 1) throw Error("run_trials: trials must be >= 1");
    cfg.validate();
    if (jobs == 0) jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    jobs = std::min(jobs, trials);

    TrialRun run;
    run.results.resize(trials);
    auto one = [&](std::size_t i) {
        auto rng = trial_rng(cfg.seed, i);
        run.results[i] = train(inst, cfg, rng);
    };

    if (jobs == 1) {
        for (std::size_t i = 0; i < trials; ++i) one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < trials; i = next++) one(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    run.aggregate = aggregate_trials(run.results);
    return run;
}

}  // namespace smlp
