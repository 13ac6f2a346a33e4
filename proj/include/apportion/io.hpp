#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "apportion/bipartite.hpp"
#include "apportion/core_model.hpp"

namespace apportion {

/// Malformed input file or value.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rational from a JSON string ("3/4", "0.75", "2") or integer.
Rational rational_from_json(const nlohmann::json& value);

/// {"a_nodes": [...], "b_nodes": [...], "T": n,
///  "edges": [{"a": id, "b": id, "weights": ["1/4", ...]}, ...]}
/// Structural problems raise InputError; the returned instance is not
/// validated, so weight problems surface from validate().
WeightedBipartiteInstance instance_from_json(const nlohmann::json& doc);
nlohmann::ordered_json instance_to_json(const WeightedBipartiteInstance& instance);

struct NamedProfile {
    std::vector<std::string> names;
    PopulationProfile profile;
};

/// {"states": [{"name": ..., "population": ...}, ...]}
NamedProfile profile_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::string& path);

}  // namespace apportion
