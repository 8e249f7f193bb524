#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "idv/distribution.hpp"
#include "idv/instance.hpp"
#include "idv/rules.hpp"
#include "idv/valuation.hpp"

namespace idv {

using Json = nlohmann::json;

inline constexpr int kInstanceSchemaVersion = 1;

// Field names match schemas/*.schema.json.
Json to_json(const ValuationFunction& v);
ValuationFunction valuation_from_json(const Json& j);

Json to_json(const SignalDistribution& d);
/// Accepts a bare number as shorthand for a PointMass.
SignalDistribution distribution_from_json(const Json& j);

Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

/// Stopping time as 1-based arrival time; winner as 0-based agent id.
Json to_json(const Outcome& o);
Json to_json(const TraceStep& step);

/// FNV-1a 64 over the canonical JSON text, as 16 hex digits.
std::string instance_hash(const Instance& inst);

/// Read and parse a JSON file, with the path in any error message.
Json read_json_file(const std::filesystem::path& path);

}  // namespace idv
