#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "smlp/solver.hpp"

namespace smlp {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const char* what);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const char* what);

/// Instance file: "lambda" for a diagonal carrier, "carrier" otherwise.
Json instance_to_json(const SiepInstance& inst);
SiepInstance instance_from_json(const Json& j);

SiepInstance read_instance_file(const std::filesystem::path& path);
void write_instance_file(const std::filesystem::path& path, const SiepInstance& inst);

/// Everything needed to rebuild the result and re-check matrix_m later.
Json result_to_json(const CheckedInstance& inst, const SolverConfig& cfg, const TrialRun& run);

/// Recompute the aggregate block from a result's "trials" array.
Json aggregate_from_trials(const Json& trials);

/// epoch,total,nonneg,spec,row with one line per executed epoch.
void write_curve_csv(std::ostream& out, const std::vector<LossBreakdown>& history);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace smlp
