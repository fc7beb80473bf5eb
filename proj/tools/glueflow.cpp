#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "glueflow/construction.hpp"
#include "glueflow/errors.hpp"
#include "glueflow/flow.hpp"
#include "glueflow/serialize.hpp"
#include "glueflow/verify.hpp"

namespace {

using namespace glueflow;

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("glueflow");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("GLUEFLOW_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept it when asked for.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

SpacePoint parse_point(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw PreconditionError("--point expects \"x,y,z\", got '" + text + "'");
  try {
    return {std::stod(parts[0]), {std::stod(parts[1]), std::stod(parts[2])}};
  } catch (const std::exception&) {
    throw PreconditionError("--point expects three numbers, got '" + text + "'");
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

struct ConstructArgs {
  int depth = 1;
  std::uint64_t seed = 1;
  std::string out = "out";
  double budget_time = FlowBudget{}.max_time;
  long budget_jumps = FlowBudget{}.max_jumps;
  int samples = 200;
};

int run_construct(const ConstructArgs& a) {
  ConstructionConfig config;
  config.depth = a.depth;
  config.seed = a.seed;
  config.out_dir = a.out;
  config.samples = a.samples;
  config.budget.max_time = a.budget_time;
  config.budget.max_jumps = a.budget_jumps;
  config.on_level = [](const LevelOutcome& o) {
    const auto& jet = o.verify["checks"]["jet-order"];
    spdlog::info("level {}: j = {}, N = {}, T = {} (T0 = {:.6f}), jet slope {}, {}", o.level, o.j, o.build.N + 10,
                 o.build.T, o.build.T0, jet.contains("slope") ? jet["slope"].dump() : "n/a",
                 o.verified ? "verified" : "VERIFICATION FAILED");
    for (const auto& r : o.rejected) spdlog::debug("  rejected candidate {}", r);
  };
  spdlog::info("construct: depth {}, seed {}, output {}", a.depth, a.seed, a.out);
  const auto start = std::chrono::steady_clock::now();
  const ConstructionState state = run_construction(config);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const nlohmann::json summary = construction_summary(state, config);
  write_json(std::filesystem::path(a.out) / "summary.json", summary);
  if (!state.complete) spdlog::error("construction stopped: {}", state.error);
  spdlog::info("finished in {:.2f} s", secs);
  std::cout << summary.dump(2) << '\n';
  return summary["passed"].get<bool>() ? 0 : kExitFailed;
}

struct VerifyArgs {
  std::string system;
  std::string checks = "all";
  int level = 0;
  int samples = 200;
  std::string report;
};

int run_verify(const VerifyArgs& a) {
  const DisplayedSystem sys = load_system(a.system);
  if (sys.depth() == 0) {
    spdlog::error("system has no levels to verify");
    return kExitFailed;
  }
  LevelCheckOptions options;
  options.samples = a.samples;
  if (a.checks != "all") options.checks = split(a.checks, ',');
  std::vector<int> levels;
  if (a.level != 0) {
    if (a.level < 1 || a.level > sys.depth()) throw PreconditionError("--level out of range");
    levels.push_back(a.level);
  } else {
    for (int L = 1; L <= sys.depth(); ++L) levels.push_back(L);
  }
  bool all = true;
  nlohmann::json reports = nlohmann::json::array();
  for (int L : levels) {
    bool passed = false;
    nlohmann::json r = verify_level(sys.prefix(L - 1), sys.prefix(L), options, &passed);
    for (const auto& [name, check] : r["checks"].items()) {
      spdlog::info("level {} {:<20} {}{}", L, name, check["passed"].get<bool>() ? "pass" : "FAIL",
                   check["gated"].get<bool>() ? "" : " (reported only)");
    }
    all = all && passed;
    reports.push_back(std::move(r));
  }
  const nlohmann::json out{{"system", a.system}, {"passed", all}, {"levels", reports}};
  if (!a.report.empty()) write_json(a.report, out);
  else std::cout << out.dump(2) << '\n';
  return all ? 0 : kExitFailed;
}

struct FlowArgs {
  std::string system;
  std::string point;
  double time = 0.0;
  std::string dump;
};

int run_flow(const FlowArgs& a) {
  const DisplayedSystem sys = load_system(a.system);
  const SpacePoint sigma = parse_point(a.point);
  const FlowResult r = flow(sys, sigma, a.time);
  nlohmann::json out{{"status", to_string(r.status)},
                     {"end", {r.end.x, r.end.fiber.y, r.end.fiber.z}},
                     {"elapsed", r.elapsed},
                     {"jumps", r.jumps}};
  if (r.terminal) out["terminal"] = {{"kind", to_string(r.terminal->kind)}, {"x", r.terminal->position.x}};
  if (!a.dump.empty()) {
    dump_trajectory(sys, sigma, a.time, a.dump);
    spdlog::info("trajectory written to {}", a.dump);
  }
  std::cout << out.dump(2) << '\n';
  return r.status == FlowStatus::Completed ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Build and check nested displayed systems with glued flow boxes"};
  app.require_subcommand(1);

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "Run the selection loop to a given depth");
  construct->add_option("--depth,-K", ca.depth, "Number of levels to build")->required()->check(CLI::PositiveNumber);
  construct->add_option("--seed,-s", ca.seed, "Seed of the dense sequence and samplers")->required();
  construct->add_option("--out,-o", ca.out, "Output directory")->required();
  construct->add_option("--budget-time", ca.budget_time, "Flow time budget per trajectory")
      ->check(CLI::PositiveNumber);
  construct->add_option("--budget-jumps", ca.budget_jumps, "Jump budget per trajectory")->check(CLI::PositiveNumber);
  construct->add_option("--samples", ca.samples, "Samples per Monte-Carlo check")->check(CLI::PositiveNumber);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run checks on a saved system");
  verify->add_option("--system", va.system, "system.json to check")->required()->check(CLI::ExistingFile);
  std::string names = "all";
  for (const auto& n : level_check_names()) names += ", " + n;
  verify->add_option("--checks", va.checks, "Comma-separated checks: " + names);
  verify->add_option("--level", va.level, "Only this level (default: every level)");
  verify->add_option("--samples", va.samples, "Samples per Monte-Carlo check")->check(CLI::PositiveNumber);
  verify->add_option("--report", va.report, "Write the JSON report here instead of stdout");

  FlowArgs fa;
  auto* flowcmd = app.add_subcommand("flow", "Flow a point and optionally dump its trajectory");
  flowcmd->add_option("--system", fa.system, "system.json")->required()->check(CLI::ExistingFile);
  flowcmd->add_option("--point", fa.point, "Start point \"x,y,z\"")->required();
  flowcmd->add_option("--time", fa.time, "Flow time (negative for backward)")->required();
  flowcmd->add_option("--dump", fa.dump, "CSV file for the trajectory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*construct) return run_construct(ca);
    if (*verify) {
      if (va.checks != "all") {
        const auto& known = level_check_names();
        for (const auto& c : split(va.checks, ',')) {
          if (std::find(known.begin(), known.end(), c) == known.end()) {
            std::cerr << "unknown check '" << c << "'; expected one of: " << names << '\n';
            return kExitUsage;
          }
        }
      }
      return run_verify(va);
    }
    if (*flowcmd) return run_flow(fa);
  } catch (const PreconditionError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
  return kExitUsage;
}
