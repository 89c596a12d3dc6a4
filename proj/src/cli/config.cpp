#include "qhyper/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifndef QHYPER_VERSION
#define QHYPER_VERSION "0.0.0"
#endif

namespace qhyper::cli {

namespace {

constexpr std::size_t kMaxGridPoints = 100000;

double parse_number(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value))
    throw InvalidArgument("malformed number '" + text + "' in " + context);
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

template <class T>
nlohmann::ordered_json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

template <class T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

Grid Grid::parse(const std::string& text) {
  Grid grid;
  grid.text = text;
  if (text.empty()) return grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    require(parts.size() == 3, "grid '" + text + "' must be start:stop:step");
    const double start = parse_number(parts[0], "grid start");
    const double stop = parse_number(parts[1], "grid stop");
    const double step = parse_number(parts[2], "grid step");
    require(step > 0.0, "grid step must be positive");
    require(stop >= start, "grid stop must not be below start");
    const double count = std::floor((stop - start) / step + 1e-9);
    require(count < static_cast<double>(kMaxGridPoints), "grid '" + text + "' has too many points");
    // Round to 12 significant digits so 1.1 + 8 * 0.1 prints as 1.9.
    for (int k = 0; k <= static_cast<int>(count); ++k) {
      char buffer[32];
      std::snprintf(buffer, sizeof buffer, "%.12g", start + k * step);
      grid.values.push_back(std::strtod(buffer, nullptr));
    }
    return grid;
  }
  for (const std::string& part : split(text, ',')) grid.values.push_back(parse_number(part, "list '" + text + "'"));
  return grid;
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["n"] = n;
  j["mu"] = mu;
  j["sign_seed"] = optional_json(sign_seed);
  j["sign_file"] = sign_file;
  j["p"] = p;
  j["t"] = t;
  j["q"] = q;
  j["m"] = m;
  j["samples"] = optional_json(samples);
  j["restarts"] = optional_json(restarts);
  j["iterations"] = optional_json(iterations);
  j["seed"] = seed;
  j["emit"] = emit;
  j["tol"] = optional_json(tol);
  j["word"] = word;
  j["direction"] = direction;
  return j.dump();
}

RunConfig RunConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    RunConfig c;
    c.command = j.value("command", "");
    c.n = j.value("n", 1);
    c.mu = j.value("mu", "");
    c.sign_seed = optional_from<std::uint64_t>(j, "sign_seed");
    c.sign_file = j.value("sign_file", "");
    c.p = j.value("p", "");
    c.t = j.value("t", "");
    c.q = j.value("q", "");
    c.m = j.value("m", "");
    c.samples = optional_from<int>(j, "samples");
    c.restarts = optional_from<int>(j, "restarts");
    c.iterations = optional_from<int>(j, "iterations");
    c.seed = j.value("seed", std::uint64_t{0});
    c.emit = j.value("emit", "csv");
    c.tol = optional_from<double>(j, "tol");
    c.word = j.value("word", "");
    c.direction = j.value("direction", "");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("run config JSON: ") + e.what());
  }
}

void RunConfig::validate() const {
  require(n >= 1 && n <= kMaxIndices, "--n must lie in 1.." + std::to_string(kMaxIndices));
  require(emit == "csv" || emit == "json", "--emit must be csv or json");
  require(!(sign_seed && !sign_file.empty()), "--sign-seed and --sign-file are mutually exclusive");
  if (samples) require(*samples >= 1, "--samples must be >= 1");
  if (restarts) require(*restarts >= 1, "--restarts must be >= 1");
  if (iterations) require(*iterations >= 0, "--iterations must be >= 0");
  if (tol) require(*tol >= 0.0 && std::isfinite(*tol), "--tol must be finite and >= 0");
  for (double v : mu_values()) require(v >= 1.0, "--mu values must be >= 1");
  // Parse every grid now so malformed input fails before any computation.
  for (const std::string* g : {&p, &t, &q, &m}) Grid::parse(*g);
}

std::vector<double> RunConfig::mu_values() const { return Grid::parse(mu).values; }

ModelParams RunConfig::model_params() const {
  std::vector<double> weights = mu_values();
  if (weights.empty()) weights.assign(static_cast<std::size_t>(n), 1.0);
  if (weights.size() == 1) weights.assign(static_cast<std::size_t>(n), weights.front());
  require(static_cast<int>(weights.size()) == n, "--mu needs one value or exactly n values");
  SignTable signs(n);
  if (!sign_file.empty()) {
    std::ifstream in(sign_file);
    require(static_cast<bool>(in), "cannot read sign file '" + sign_file + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    signs = SignTable::from_json(buffer.str());
    require(signs.n() == n, "sign file describes a different n");
  } else {
    signs = SignTable::random(n, sign_seed.value_or(0));
  }
  return ModelParams(weights, signs);
}

std::string version_string() { return std::string("qhyper ") + QHYPER_VERSION; }

}  // namespace qhyper::cli
