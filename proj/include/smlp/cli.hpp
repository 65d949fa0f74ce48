#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace smlp::cli {

/// Exit codes: 0 success, 1 no convergence / failed check, 2 usage or I/O error.
enum ExitCode : int { ok = 0, failed = 1, usage = 2 };

struct SolveOptions {
    std::string instance;  // catalog name or path to an instance file
    std::string arch = "20";
    std::string activation = "relu";
    std::string ortho = "svd";
    std::optional<std::uint64_t> epochs;  // default 10000, 100000 for jacobi*
    double tol = 1e-8;
    double lr = 0.01;
    double lr_decay_gamma = 1.0;
    std::uint64_t lr_decay_every = 0;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;
    std::string out;
    std::string curve;
};

int cmd_list(std::ostream& out);
int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& path, double tol, std::ostream& out, std::ostream& err);

/// Parse argv and dispatch to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smlp::cli
