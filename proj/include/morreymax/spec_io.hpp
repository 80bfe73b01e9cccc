#pragma once

// Function specs: JSON documents and the builtin vocabulary used by the CLI.
//
//   {"breakpoints": [0, 1, 4], "pieces": [{"c": 2, "beta": 0.5}, {"c": 1}], "tail": {"c": 0}}
//
// A missing "tail" means zero. When "pieces" has one entry per breakpoint
// the last entry is taken as the tail. "beta" defaults to 0.
//
// Builtins:  zero | train:K=<K> | power:beta=<b>[,c=<c>] | block:a=<a>,b=<b>[,c=<c>]
//            | steps:seed=<s>[,count=<m>]

#include <string>
#include <string_view>

#include <json.hpp>

#include "morreymax/profiles.hpp"

namespace morreymax {

/// Throws SpecError naming the first offending path.
PiecewisePowerFn parse_function_spec(const nlohmann::json& doc);
PiecewisePowerFn load_function_spec(const std::string& path);
nlohmann::json to_json(const PiecewisePowerFn& fn);

/// Builtin name or path to a JSON file.
PiecewisePowerFn resolve_function(std::string_view text);

}  // namespace morreymax
