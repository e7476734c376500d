#pragma once

#include <filesystem>

#include <json.hpp>

#include "sparsekern/dual_field.hpp"
#include "sparsekern/kernels.hpp"
#include "sparsekern/losses.hpp"
#include "sparsekern/model.hpp"
#include "sparsekern/multiclass.hpp"
#include "sparsekern/solver.hpp"
#include "sparsekern/variant.hpp"

namespace sparsekern::io {

using json = nlohmann::json;

json to_json(const Box& box);
json to_json(const KernelSpec& k);
json to_json(const Loss& l);
json to_json(const DiscreteModel& m);
json to_json(const ProblemVariant& v);
json to_json(const SolverConfig& c);
json to_json(const SampleSet& s);
json to_json(const AlphaField& f);
json to_json(const OvoEnsemble& e);

// Readers throw ParseError on a missing or mistyped field.
Box box_from_json(const json& j);
KernelSpec kernel_from_json(const json& j);
Loss loss_from_json(const json& j);
DiscreteModel model_from_json(const json& j);
ProblemVariant variant_from_json(const json& j);
/// Missing keys keep their defaults, so partial config files are accepted.
SolverConfig solver_config_from_json(const json& j, SolverConfig base = {});
SampleSet samples_from_json(const json& j);
AlphaField field_from_json(const json& j);
OvoEnsemble ovo_from_json(const json& j);

bool is_ovo(const json& j);

json read_file(const std::filesystem::path& path);
void write_file(const json& j, const std::filesystem::path& path);

}  // namespace sparsekern::io
