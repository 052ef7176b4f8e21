#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doobdec/measures.hpp"
#include "doobdec/processes.hpp"

namespace doobdec {

// All files carry {"schema_version": 1}. Parse problems throw JsonError with
// the offending path in the message; shape/value problems surface as the
// usual StructureError/ValueError from the constructors.
inline constexpr int kSchemaVersion = 1;

struct JsonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using json = nlohmann::ordered_json;

json tree_to_json(const FiltrationTree& tree);
std::shared_ptr<const FiltrationTree> tree_from_json(const json& j);

json process_to_json(const AdaptedProcess& f);
AdaptedProcess process_from_json(const json& j);

// A full problem instance: tree, measures, optional named processes and
// leaf-indexed random variables, optional free-form metadata.
struct Instance {
    std::shared_ptr<const FiltrationTree> tree;
    std::vector<std::vector<double>> measure_rows;
    std::map<std::string, AdaptedProcess> processes;
    std::map<std::string, std::vector<double>> random_variables;
    json meta;  // null when absent

    MeasureFamily family(double tol = 1e-9) const;
};

json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

Instance load_instance(const std::string& path);
void save_json(const std::string& path, const json& j);
json load_json(const std::string& path);

}  // namespace doobdec
