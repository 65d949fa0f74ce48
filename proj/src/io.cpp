#include "smlp/io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

namespace smlp {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string widths_string(const std::vector<Eigen::Index>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw InvalidInstanceError(std::string(what) + ": expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw InvalidInstanceError(std::string(what) + ": ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) throw InvalidInstanceError(std::string(what) + ": non-numeric entry");
            m(i, c) = v.get<double>();
        }
    }
    return m;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw InvalidInstanceError(std::string(what) + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InvalidInstanceError(std::string(what) + ": non-numeric entry");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

Json instance_to_json(const SiepInstance& inst) {
    Json j;
    j["name"] = inst.name;
    j["n"] = inst.n;
    if (inst.diagonal_carrier)
        j["lambda"] = vector_to_json(inst.carrier.diagonal());
    else
        j["carrier"] = matrix_to_json(inst.carrier);
    j["mask_s"] = matrix_to_json(inst.mask_s);
    j["omega"] = matrix_to_json(inst.prescribed);
    j["kappa1"] = inst.kappa1;
    j["kappa2"] = inst.kappa2;
    if (inst.row_targets) j["row_targets"] = vector_to_json(*inst.row_targets);
    if (inst.spectrum.size() > 0) j["spectrum"] = vector_to_json(inst.spectrum);
    if (inst.fixed_border) j["fixed_border"] = true;
    return j;
}

SiepInstance instance_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidInstanceError("instance file: top level must be an object");
    try {
        SiepInstance inst;
        inst.name = j.value("name", std::string("unnamed"));
        inst.n = j.at("n").get<Eigen::Index>();
        const bool has_lambda = j.contains("lambda"), has_carrier = j.contains("carrier");
        if (has_lambda == has_carrier) throw InvalidInstanceError("instance file: give exactly one of lambda, carrier");
        if (has_lambda) {
            const Vector lambda = vector_from_json(j["lambda"], "lambda");
            inst.carrier = lambda.asDiagonal();
            inst.diagonal_carrier = true;
        } else {
            inst.carrier = matrix_from_json(j["carrier"], "carrier");
            inst.diagonal_carrier = false;
        }
        inst.mask_s = matrix_from_json(j.at("mask_s"), "mask_s");
        inst.prescribed = j.contains("omega") ? matrix_from_json(j["omega"], "omega") : Matrix::Zero(inst.n, inst.n);
        inst.kappa1 = j.value("kappa1", 0);
        inst.kappa2 = j.value("kappa2", 0);
        if (j.contains("row_targets") && !j["row_targets"].is_null())
            inst.row_targets = vector_from_json(j["row_targets"], "row_targets");
        if (j.contains("spectrum") && !j["spectrum"].is_null()) inst.spectrum = vector_from_json(j["spectrum"], "spectrum");
        inst.fixed_border = j.value("fixed_border", false);
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInstanceError(std::string("instance file: ") + e.what());
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

SiepInstance read_instance_file(const std::filesystem::path& path) { return instance_from_json(read_json_file(path)); }

void write_instance_file(const std::filesystem::path& path, const SiepInstance& inst) {
    write_json_file(path, instance_to_json(inst));
}

Json aggregate_from_trials(const Json& trials) {
    std::vector<SolveResult> rs;
    rs.reserve(trials.size());
    for (const auto& t : trials) {
        SolveResult r;
        r.converged = t.at("converged").get<bool>();
        r.epochs_used = t.at("epochs").get<std::uint64_t>();
        r.final_loss.total = t.at("final_loss").get<double>();
        if (!t.at("er").is_null()) r.er = t["er"].get<double>();
        r.wall_seconds = t.at("wall_seconds").get<double>();
        rs.push_back(std::move(r));
    }
    const TrialAggregate a = aggregate_trials(rs);
    Json j;
    j["trials"] = a.trials;
    j["converged"] = a.converged;
    j["xi"] = a.xi;
    j["er"] = optional_number(a.er);
    j["mean_epoch"] = optional_number(a.mean_epoch);
    j["mean_t"] = a.mean_t;
    j["mean_final_loss"] = a.mean_final_loss;
    return j;
}

Json result_to_json(const CheckedInstance& inst, const SolverConfig& cfg, const TrialRun& run) {
    Json j;
    j["instance"] = instance_to_json(inst.raw());
    const Architecture arch = resolve_architecture(cfg.arch, inst);
    j["config"] = {
        {"arch", widths_string(arch.hidden_widths)},
        {"activation", std::string(to_string(arch.activation))},
        {"ortho", std::string(to_string(arch.ortho))},
        {"lr", cfg.lr},
        {"lr_decay_gamma", cfg.lr_decay_gamma},
        {"lr_decay_every", cfg.lr_decay_every},
        {"max_epochs", cfg.max_epochs},
        {"tol", cfg.tol},
        {"seed", cfg.seed},
    };
    Json trials = Json::array();
    for (const auto& r : run.results) {
        Json t;
        t["converged"] = r.converged;
        t["epochs"] = r.epochs_used;
        t["final_loss"] = r.final_loss.total;
        t["er"] = optional_number(r.er);
        t["wall_seconds"] = r.wall_seconds;
        t["attempts"] = r.attempts;
        t["max_orthogonality_error"] = r.max_orthogonality_error;
        if (!r.failure_reason.empty()) t["failure_reason"] = r.failure_reason;
        trials.push_back(std::move(t));
    }
    j["aggregate"] = aggregate_from_trials(trials);
    j["trials"] = std::move(trials);
    j["matrix_m"] = nullptr;
    for (const auto& r : run.results) {
        if (r.converged) {
            j["matrix_m"] = matrix_to_json(r.m);
            break;
        }
    }
    return j;
}

void write_curve_csv(std::ostream& out, const std::vector<LossBreakdown>& history) {
    out << "epoch,total,nonneg,spec,row\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& h = history[i];
        out << i + 1 << ',' << h.total << ',' << h.nonneg << ',' << h.spec << ',' << h.row << '\n';
    }
}

}  // namespace smlp
