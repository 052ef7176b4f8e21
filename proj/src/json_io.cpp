#include "doobdec/json_io.hpp"

#include <fstream>
#include <sstream>

namespace doobdec {

namespace {

void require_version(const json& j, const char* what) {
    if (!j.is_object()) throw JsonError(std::string(what) + ": expected an object");
    if (!j.contains("schema_version"))
        throw JsonError(std::string(what) + ": missing schema_version");
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw JsonError(std::string(what) + ": unsupported schema_version " +
                        j.at("schema_version").dump());
}

template <typename T>
T get_field(const json& j, const char* key, const char* what) {
    if (!j.contains(key))
        throw JsonError(std::string(what) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw JsonError(std::string(what) + ": bad field '" + key + "': " + e.what());
    }
}

}  // namespace

json tree_to_json(const FiltrationTree& tree) {
    json j;
    j["depth"] = tree.depth();
    json levels = json::array();
    for (int n = 0; n <= tree.depth(); ++n) levels.push_back(tree.atom_count(n));
    j["levels"] = levels;
    json children = json::array();
    for (int n = 0; n < tree.depth(); ++n) {
        json level = json::array();
        for (int s = 0; s < tree.atom_count(n); ++s) level.push_back(tree.children(n, s));
        children.push_back(level);
    }
    j["children"] = children;
    return j;
}

std::shared_ptr<const FiltrationTree> tree_from_json(const json& j) {
    if (!j.is_object()) throw JsonError("tree: expected an object");
    auto levels = get_field<std::vector<int>>(j, "levels", "tree");
    auto children =
        get_field<std::vector<std::vector<std::vector<int>>>>(j, "children", "tree");
    if (j.contains("depth") &&
        j.at("depth").get<int>() != static_cast<int>(levels.size()) - 1)
        throw JsonError("tree: depth field disagrees with the levels list");
    return std::make_shared<const FiltrationTree>(
        FiltrationTree::from_parts(std::move(levels), std::move(children)));
}

json process_to_json(const AdaptedProcess& f) { return json(f.slices); }

AdaptedProcess process_from_json(const json& j) {
    AdaptedProcess f;
    try {
        f.slices = j.get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw JsonError(std::string("process: expected an array of per-level value arrays: ") +
                        e.what());
    }
    if (f.slices.empty()) throw JsonError("process: empty");
    return f;
}

MeasureFamily Instance::family(double tol) const {
    return MeasureFamily::create(tree, measure_rows, tol);
}

json instance_to_json(const Instance& inst) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["tree"] = tree_to_json(*inst.tree);
    j["measures"] = inst.measure_rows;
    if (!inst.processes.empty()) {
        json p;
        for (const auto& [name, proc] : inst.processes) p[name] = process_to_json(proc);
        j["processes"] = p;
    }
    if (!inst.random_variables.empty()) j["random_variables"] = inst.random_variables;
    if (!inst.meta.is_null()) j["meta"] = inst.meta;
    return j;
}

Instance instance_from_json(const json& j) {
    require_version(j, "instance");
    Instance inst;
    if (!j.contains("tree")) throw JsonError("instance: missing tree");
    inst.tree = tree_from_json(j.at("tree"));
    inst.measure_rows =
        get_field<std::vector<std::vector<double>>>(j, "measures", "instance");
    if (j.contains("processes")) {
        if (!j.at("processes").is_object())
            throw JsonError("instance: processes must be an object of named processes");
        for (const auto& [name, val] : j.at("processes").items())
            inst.processes.emplace(name, process_from_json(val));
    }
    if (j.contains("random_variables")) {
        try {
            inst.random_variables =
                j.at("random_variables").get<std::map<std::string, std::vector<double>>>();
        } catch (const nlohmann::json::exception& e) {
            throw JsonError(std::string("instance: bad random_variables: ") + e.what());
        }
    }
    if (j.contains("meta")) inst.meta = j.at("meta");
    return inst;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw JsonError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw JsonError(path + ": " + e.what());
    }
}

Instance load_instance(const std::string& path) {
    return instance_from_json(load_json(path));
}

void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw JsonError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

}  // namespace doobdec
