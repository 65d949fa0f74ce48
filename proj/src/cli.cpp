#include "smlp/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "smlp/filter.hpp"
#include "smlp/io.hpp"
#include "smlp/problems.hpp"

namespace smlp::cli {

namespace {

std::vector<Eigen::Index> parse_widths(const std::string& s) {
    std::vector<Eigen::Index> w;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size() || v < 1) throw Error("--arch: bad width '" + tok + "'");
        w.push_back(static_cast<Eigen::Index>(v));
    }
    if (w.empty()) throw Error("--arch: need at least one hidden width");
    return w;
}

SiepInstance load_instance(const std::string& arg) {
    if (std::filesystem::is_regular_file(arg)) return read_instance_file(arg);
    return builtin(arg);
}

std::string fmt(double v, int prec, bool sci) {
    std::ostringstream s;
    if (sci) s << std::scientific;
    else s << std::fixed;
    s << std::setprecision(prec) << v;
    return s.str();
}

// setw counts bytes, the header has multibyte glyphs
std::string pad(const std::string& s, std::size_t width, std::size_t glyphs) {
    return s + std::string(width > glyphs ? width - glyphs : 1, ' ');
}

void print_summary(std::ostream& out, const CheckedInstance& inst, const Architecture& arch, const TrialAggregate& a) {
    const auto& r = inst.raw();
    out << "instance " << r.name << "  n=" << r.n << "  kappa=(" << r.kappa1 << "," << r.kappa2 << ")  trials=" << a.trials
        << "  converged=" << a.converged << "\n";
    std::string smlp = "[";
    for (std::size_t i = 0; i < arch.hidden_widths.size(); ++i)
        smlp += (i ? "," : "") + std::to_string(arch.hidden_widths[i]);
    smlp += "]";
    out << pad("Opt", 6, 3) << pad("Φ", 6, 1) << pad("SMLP", 12, 4) << pad("t", 10, 1) << pad("Epoch", 10, 5)
        << pad("er", 11, 2) << "ξ\n";
    const std::string epoch = a.mean_epoch ? fmt(*a.mean_epoch, 1, false) : "-";
    const std::string er = a.er ? fmt(*a.er, 2, true) : "-";
    const std::string t = fmt(a.mean_t, 4, false);
    const std::string ortho(to_string(arch.ortho)), act(to_string(arch.activation));
    out << pad(ortho, 6, ortho.size()) << pad(act, 6, act.size()) << pad(smlp, 12, smlp.size())
        << pad(t, 10, t.size()) << pad(epoch, 10, epoch.size()) << pad(er, 11, er.size()) << fmt(100.0 * a.xi, 0, false)
        << "%\n";
}

void line(std::ostream& out, const char* what, double violation, bool ok) {
    out << "  " << std::left << std::setw(20) << what << std::right << std::scientific << std::setprecision(3)
        << violation << "  " << (ok ? "ok" : "FAIL") << "\n";
    out << std::defaultfloat;
}

}  // namespace

int cmd_list(std::ostream& out) {
    out << std::left << std::setw(18) << "name" << std::setw(6) << "n" << std::setw(8) << "kappa"
        << "description\n";
    for (const auto& e : catalog()) {
        const std::string kappa = "(" + std::to_string(e.kappa1) + "," + std::to_string(e.kappa2) + ")";
        out << std::setw(18) << e.name << std::setw(6) << e.n << std::setw(8) << kappa << e.description << "\n";
    }
    out << std::right;
    return ok;
}

int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
    SolverConfig cfg;
    std::optional<CheckedInstance> inst;
    try {
        inst = validate_instance(load_instance(opt.instance));
        cfg.arch.hidden_widths = parse_widths(opt.arch);
        if (opt.activation == "relu") cfg.arch.activation = Activation::relu;
        else if (opt.activation == "tanh") cfg.arch.activation = Activation::tanh;
        else throw Error("--activation must be relu or tanh");
        if (opt.ortho == "qr") cfg.arch.ortho = OrthoMethod::qr;
        else if (opt.ortho == "svd") cfg.arch.ortho = OrthoMethod::svd;
        else throw Error("--ortho must be qr or svd");
        const bool large = inst->raw().name.rfind("jacobi", 0) == 0;
        cfg.max_epochs = opt.epochs.value_or(large ? 100000 : 10000);
        cfg.tol = opt.tol;
        cfg.lr = opt.lr;
        cfg.lr_decay_gamma = opt.lr_decay_gamma;
        cfg.lr_decay_every = opt.lr_decay_every;
        cfg.seed = opt.seed;
        // only trial 0's history is ever written
        cfg.record_history = !opt.curve.empty();
        cfg.validate();
        if (opt.trials < 1) throw Error("--trials must be >= 1");
        cfg.arch = resolve_architecture(cfg.arch, *inst);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }

    TrialRun run;
    try {
        run = run_trials(*inst, cfg, opt.trials, opt.jobs);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }
    print_summary(out, *inst, cfg.arch, run.aggregate);

    try {
        if (!opt.out.empty()) write_json_file(opt.out, result_to_json(*inst, cfg, run));
        if (!opt.curve.empty()) {
            std::ofstream csv(opt.curve);
            if (!csv) throw Error("cannot write " + opt.curve);
            write_curve_csv(csv, run.results.front().loss_history);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }
    return run.aggregate.xi > 0.0 ? ok : failed;
}

int cmd_verify(const std::string& path, double tol, std::ostream& out, std::ostream& err) {
    Json j;
    std::optional<CheckedInstance> inst;
    Matrix m;
    try {
        j = read_json_file(path);
        inst = validate_instance(instance_from_json(j.at("instance")));
        if (!j.contains("matrix_m") || j["matrix_m"].is_null()) {
            out << "no converged matrix in " << path << "\n";
            return failed;
        }
        m = matrix_from_json(j["matrix_m"], "matrix_m");
        if (m.rows() != inst->n() || m.cols() != inst->n()) throw Error("matrix_m does not match instance size");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }

    const auto& raw = inst->raw();
    out << "verify " << raw.name << " at tol " << tol << "\n";
    bool pass = true;
    if (raw.fixed_border) {
        const CouplingReport c = verify_coupling(m, filter_from_siep(raw), tol);
        out << "spectrum match (vs transverse matrix)\n";
        line(out, "spectrum", c.spectrum_error, c.spectrum_ok);
        out << "structure\n";
        line(out, "sparsity", c.sparsity_violation, c.sparsity_ok);
        line(out, "symmetry", c.symmetry_violation, c.symmetric_ok);
        line(out, "source/load rows", c.border_violation, c.border_ok);
        pass = c.all_ok();
    } else {
        const ConstraintReport c = constraint_report(m, *inst, tol);
        out << "structure\n";
        line(out, "prescribed", c.prescribed_violation, c.prescribed_ok);
        if (c.nonneg_checked) line(out, "nonnegativity", c.nonneg_violation, c.nonneg_ok);
        if (c.rows_checked) line(out, "row sums", c.row_violation, c.rows_ok);
        line(out, "symmetry", c.symmetry_violation, c.symmetric_ok);
        pass = c.all_ok();
        if (raw.spectrum.size() == raw.n) {
            out << "spectrum match\n";
            try {
                const double er = error_metric(m, raw.spectrum);
                line(out, "spectrum", er, er <= tol);
                pass = pass && er <= tol;
            } catch (const UnsupportedVerificationError& e) {
                out << "  spectrum            unsupported: " << e.what() << "\n";
                pass = false;
            }
        }
    }
    out << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? ok : failed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Structured inverse eigenvalue problems solved by an MLP with a Stiefel output layer", "smlp"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List built-in instances");

    SolveOptions so;
    auto* solve = app.add_subcommand("solve", "Train on an instance (catalog name or instance file)");
    solve->add_option("instance", so.instance, "Catalog name or path")->required();
    solve->add_option("--arch", so.arch, "Hidden widths, comma separated")->capture_default_str();
    solve->add_option("--activation", so.activation, "relu or tanh")->capture_default_str();
    solve->add_option("--ortho", so.ortho, "qr or svd")->capture_default_str();
    solve->add_option("--epochs", so.epochs, "Max epochs (default 10000, 100000 for jacobi*)");
    solve->add_option("--tol", so.tol, "Stop when the loss drops below this")->capture_default_str();
    solve->add_option("--lr", so.lr, "Adam learning rate")->capture_default_str();
    solve->add_option("--lr-decay", so.lr_decay_gamma, "Multiply lr by this every --lr-decay-every epochs")
        ->capture_default_str();
    solve->add_option("--lr-decay-every", so.lr_decay_every, "Decay period in epochs (0 = off)")->capture_default_str();
    solve->add_option("--trials", so.trials, "Independent seeded trials")->capture_default_str();
    solve->add_option("--seed", so.seed, "Master seed")->capture_default_str();
    solve->add_option("--jobs", so.jobs, "Parallel trials (0 = available cores)")->capture_default_str();
    solve->add_option("--out", so.out, "Result JSON path");
    solve->add_option("--curve", so.curve, "Loss curve CSV for trial 0");

    std::string result_path;
    double verify_tol = 1e-4;
    auto* verify = app.add_subcommand("verify", "Re-check a result file");
    verify->add_option("result", result_path, "Result JSON")->required();
    verify->add_option("--tol", verify_tol, "Tolerance")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    if (*list) return cmd_list(out);
    if (*solve) return cmd_solve(so, out, err);
    if (*verify) return cmd_verify(result_path, verify_tol, out, err);
    return usage;
}

}  // namespace smlp::cli
