#include "morreymax/spec_io.hpp"

#include <charconv>
#include <fstream>
#include <map>

#include "morreymax/errors.hpp"
#include "morreymax/verify.hpp"

namespace morreymax {

namespace {

using nlohmann::json;

double number_at(const json& node, const std::string& path) {
  if (!node.is_number()) throw SpecError(path, "expected a number");
  return node.get<double>();
}

PowerPiece piece_at(const json& node, const std::string& path) {
  if (!node.is_object()) throw SpecError(path, "expected an object {\"c\": .., \"beta\": ..}");
  for (const auto& [key, _] : node.items()) {
    if (key != "c" && key != "beta") throw SpecError(path + "/" + key, "unknown field");
  }
  if (!node.contains("c")) throw SpecError(path + "/c", "missing coefficient");
  PowerPiece p;
  p.coeff = number_at(node["c"], path + "/c");
  if (node.contains("beta")) p.beta = number_at(node["beta"], path + "/beta");
  return p;
}

std::map<std::string, std::string> builtin_args(std::string_view text, std::string_view name) {
  std::map<std::string, std::string> args;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw SpecError(std::string(name), "expected key=value, got '" + std::string(item) + "'");
    }
    args.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return args;
}

template <typename T>
T take(std::map<std::string, std::string>& args, const std::string& builtin, const std::string& key,
       std::optional<T> fallback = std::nullopt) {
  auto it = args.find(key);
  if (it == args.end()) {
    if (fallback) return *fallback;
    throw SpecError(builtin + ":" + key, "missing parameter");
  }
  T value{};
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw SpecError(builtin + ":" + key, "cannot parse '" + s + "'");
  }
  args.erase(it);
  return value;
}

void reject_leftovers(const std::map<std::string, std::string>& args, const std::string& builtin) {
  if (!args.empty()) throw SpecError(builtin + ":" + args.begin()->first, "unknown parameter");
}

}  // namespace

PiecewisePowerFn parse_function_spec(const json& doc) {
  if (!doc.is_object()) throw SpecError("", "function spec must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "breakpoints" && key != "pieces" && key != "tail") {
      throw SpecError("/" + key, "unknown field");
    }
  }
  if (!doc.contains("breakpoints") || !doc["breakpoints"].is_array()) {
    throw SpecError("/breakpoints", "expected an array");
  }
  if (!doc.contains("pieces") || !doc["pieces"].is_array()) {
    throw SpecError("/pieces", "expected an array");
  }
  std::vector<double> bps;
  for (std::size_t i = 0; i < doc["breakpoints"].size(); ++i) {
    bps.push_back(number_at(doc["breakpoints"][i], "/breakpoints/" + std::to_string(i)));
  }
  std::vector<PowerPiece> pieces;
  for (std::size_t i = 0; i < doc["pieces"].size(); ++i) {
    pieces.push_back(piece_at(doc["pieces"][i], "/pieces/" + std::to_string(i)));
  }
  PowerPiece tail;
  if (doc.contains("tail")) {
    if (!bps.empty() && pieces.size() == bps.size()) {
      throw SpecError("/tail", "tail given twice (pieces already has one entry per breakpoint)");
    }
    tail = piece_at(doc["tail"], "/tail");
  } else if (!bps.empty() && pieces.size() == bps.size()) {
    tail = pieces.back();
    pieces.pop_back();
  }
  if (auto v = find_violation(bps, pieces, tail)) {
    // A tail taken from the pieces array keeps its array path.
    if (v->path == "/tail" && !doc.contains("tail") && !bps.empty()) {
      v->path = "/pieces/" + std::to_string(bps.size() - 1);
    }
    throw SpecError(v->path, v->message);
  }
  return PiecewisePowerFn(std::move(bps), std::move(pieces), tail);
}

PiecewisePowerFn load_function_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open function spec '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_function_spec(doc);
}

json to_json(const PiecewisePowerFn& fn) {
  json doc;
  doc["breakpoints"] = json::array();
  for (double b : fn.breakpoints()) doc["breakpoints"].push_back(b);
  doc["pieces"] = json::array();
  for (const auto& p : fn.pieces()) doc["pieces"].push_back({{"c", p.coeff}, {"beta", p.beta}});
  doc["tail"] = {{"c", fn.tail().coeff}, {"beta", fn.tail().beta}};
  return doc;
}

PiecewisePowerFn resolve_function(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  auto args = colon == std::string_view::npos ? std::map<std::string, std::string>{}
                                              : builtin_args(text.substr(colon + 1), name);
  if (name == "zero") {
    reject_leftovers(args, name);
    return PiecewisePowerFn();
  }
  if (name == "train") {
    const auto K = take<std::int64_t>(args, name, "K");
    reject_leftovers(args, name);
    return make_indicator_train(K);
  }
  if (name == "power") {
    const auto beta = take<double>(args, name, "beta");
    const auto c = take<double>(args, name, "c", 1.0);
    reject_leftovers(args, name);
    return PiecewisePowerFn::power_law(c, beta);
  }
  if (name == "block") {
    const auto a = take<double>(args, name, "a");
    const auto b = take<double>(args, name, "b");
    const auto c = take<double>(args, name, "c", 1.0);
    reject_leftovers(args, name);
    return PiecewisePowerFn::block(a, b, c);
  }
  if (name == "steps") {
    const auto seed = take<std::uint64_t>(args, name, "seed");
    const auto count = take<int>(args, name, "count", 100);
    reject_leftovers(args, name);
    return random_step_profile(seed, count);
  }
  if (colon == std::string_view::npos || text.find('/') != std::string_view::npos ||
      text.ends_with(".json")) {
    return load_function_spec(std::string(text));
  }
  throw SpecError(name, "unknown builtin function");
}

}  // namespace morreymax
