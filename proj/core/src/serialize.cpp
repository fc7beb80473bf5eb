#include "glueflow/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "glueflow/errors.hpp"

namespace glueflow {

using nlohmann::json;

std::string hex_double(double value) {
  if (!std::isfinite(value)) throw FormatError("hex_double: non-finite value");
  char buf[64];
  const double mag = std::abs(value);
  auto res = std::to_chars(buf, buf + sizeof buf, mag, std::chars_format::hex);
  std::string digits(buf, res.ptr);
  return (std::signbit(value) ? "-0x" : "0x") + digits;
}

double parse_hex_double(const std::string& text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X')) {
    throw FormatError("parse_hex_double: expected a hexadecimal float, got '" + text + "'");
  }
  s.remove_prefix(2);
  double value = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value, std::chars_format::hex);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("parse_hex_double: malformed value '" + text + "'");
  }
  return negative ? -value : value;
}

namespace {

json fiber_json(Fiber v) { return json::array({hex_double(v.y), hex_double(v.z)}); }

Fiber fiber_from(const json& j) {
  return {parse_hex_double(j.at(0).get<std::string>()), parse_hex_double(j.at(1).get<std::string>())};
}

double num(const json& j, const char* key) { return parse_hex_double(j.at(key).get<std::string>()); }

}  // namespace

std::string system_to_json(const DisplayedSystem& system) {
  json levels = json::array();
  for (const auto& p : system.levels()) {
    json coeffs = json::array();
    const auto& P = p.lambda0.P;
    for (int n = 0; n <= P.degree(); ++n) {
      for (int b = 0; b <= n; ++b) coeffs.push_back(json::array({n - b, b, hex_double(P.coefficient(n - b, b))}));
    }
    levels.push_back({
        {"N", p.N},
        {"N_prime", p.N_prime},
        {"k", p.k},
        {"w0", fiber_json(p.w0)},
        {"T", p.T},
        {"T0", hex_double(p.T0)},
        {"W_radius", hex_double(p.W_radius)},
        {"ode_tolerance", hex_double(p.psi().ode_tolerance())},
        {"sigma0", {{"x", hex_double(p.sigma0.x)}, {"fiber", fiber_json(p.sigma0.fiber)}}},
        {"lambda0",
         {{"w0", fiber_json(p.lambda0.w0)},
          {"k", p.lambda0.k},
          {"degree", P.degree()},
          {"a0", hex_double(p.lambda0.a0)},
          {"coefficients", coeffs}}},
    });
  }
  json doc{{"format", "glueflow-displayed-system"}, {"version", kSystemFormatVersion}, {"levels", levels}};
  return doc.dump(2);
}

DisplayedSystem system_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != "glueflow-displayed-system") {
      throw FormatError("system_from_json: unknown format");
    }
    const int version = doc.at("version").get<int>();
    if (version != kSystemFormatVersion) {
      throw FormatError("system_from_json: unsupported version " + std::to_string(version));
    }
    std::vector<LevelParams> levels;
    for (const auto& j : doc.at("levels")) {
      LevelParams p;
      p.N = j.at("N").get<int>();
      p.N_prime = j.at("N_prime").get<int>();
      p.k = j.at("k").get<int>();
      p.w0 = fiber_from(j.at("w0"));
      p.T = j.at("T").get<int>();
      p.T0 = num(j, "T0");
      p.W_radius = num(j, "W_radius");
      p.disks = DiskPair(PsiMap(p.k, p.w0, num(j, "ode_tolerance")));
      p.sigma0 = {num(j.at("sigma0"), "x"), fiber_from(j.at("sigma0").at("fiber"))};
      const json& l0 = j.at("lambda0");
      p.lambda0.w0 = fiber_from(l0.at("w0"));
      p.lambda0.k = l0.at("k").get<int>();
      p.lambda0.a0 = num(l0, "a0");
      p.lambda0.P = BivariatePolynomial(l0.at("degree").get<int>());
      for (const auto& c : l0.at("coefficients")) {
        p.lambda0.P.set_coefficient(c.at(0).get<int>(), c.at(1).get<int>(), parse_hex_double(c.at(2).get<std::string>()));
      }
      levels.push_back(std::move(p));
    }
    return DisplayedSystem(std::move(levels));
  } catch (const json::exception& e) {
    throw FormatError(std::string("system_from_json: ") + e.what());
  }
}

void save_system(const DisplayedSystem& system, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_system: cannot open '" + path + "' for writing");
  out << system_to_json(system) << '\n';
  if (!out) throw IoError("save_system: write to '" + path + "' failed");
}

DisplayedSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_system: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return system_from_json(ss.str());
}

}  // namespace glueflow
