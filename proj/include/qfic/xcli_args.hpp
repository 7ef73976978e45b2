// Copyright 2026 The qfic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// \file
/// Command-line front end over qfic/xcli.hpp (needs CLI11 on the include path).

#ifndef QFIC_XCLI_ARGS_HPP
#define QFIC_XCLI_ARGS_HPP

#include <algorithm>
#include <deque>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfic/xcli.hpp"

namespace qfic::xcli {

struct ParsedArgs {
  std::optional<ExperimentConfig> config; ///< empty when help was requested
  std::string helpText;
};

/// CLI flags override `--config FILE` values, which override defaults.
/// Throws ConfigError on unknown flags, malformed values or violated
/// invariants.
inline ParsedArgs parseConfig(int argc, const char *const *argv) {
  CLI::App app{"qfic: probe-reservoir phase estimation experiments", "qfic"};
  app.set_help_flag("-h,--help", "Print this help message and exit");
  app.set_version_flag("--version", "1.0.0");

  std::string experiment, configPath;
  app.add_option("experiment", experiment, std::string(configKeys().front().help));
  app.add_option("--config", configPath, "key = value configuration file");

  struct Slot {
    const detail::KeySpec *spec;
    CLI::Option *opt;
    std::string text;
    bool flag = false;
  };
  std::deque<Slot> slots; // stable addresses for CLI11 bindings
  for (const auto &k : configKeys()) {
    if (k.key == "experiment") continue;
    Slot &s = slots.emplace_back(Slot{&k, nullptr, {}, false});
    s.opt = k.isFlag ? app.add_flag("--" + k.key, s.flag, k.help)
                     : app.add_option("--" + k.key, s.text, k.help);
  }
  app.get_option("--zeta")->excludes(app.get_option("--rate"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    return {std::nullopt, app.help()};
  } catch (const CLI::CallForVersion &) {
    return {std::nullopt, "1.0.0\n"};
  } catch (const CLI::ParseError &e) {
    throw ConfigError(e.what());
  }

  KeyValues overrides;
  if (!experiment.empty()) overrides.emplace_back("experiment", experiment);
  for (const auto &s : slots)
    if (s.opt->count() > 0)
      overrides.emplace_back(s.spec->key, s.spec->isFlag ? (s.flag ? "true" : "false") : s.text);

  const KeyValues file = configPath.empty() ? KeyValues{} : loadConfigFile(configPath);
  const bool fileHasExperiment =
      std::any_of(file.begin(), file.end(), [](const auto &kv) { return kv.first == "experiment"; });
  if (experiment.empty() && !fileHasExperiment)
    throw ConfigError("experiment: missing (positional argument or 'experiment' key)");
  return {buildConfig(file, overrides), {}};
}

namespace detail {

inline std::string svgPathFor(const std::string &csvPath) {
  const auto slash = csvPath.find_last_of('/');
  const auto dot = csvPath.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return csvPath.substr(0, dot) + ".svg";
  return csvPath + ".svg";
}

} // namespace detail

/// Full tool behaviour; returns the process exit code
/// (0 ok, 2 config, 3 numerical, 4 I/O).
inline int runCli(int argc, const char *const *argv, std::ostream &out = std::cout,
                  std::ostream &err = std::cerr) {
  ExperimentConfig cfg;
  try {
    auto parsed = parseConfig(argc, argv);
    if (!parsed.config) {
      out << parsed.helpText;
      return kExitOk;
    }
    cfg = *parsed.config;
  } catch (const InvalidArgument &e) {
    err << "qfic: configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const SweepResult res = runExperiment(cfg);
    if (cfg.outPath.empty()) {
      out << formatCsv(res);
      if (cfg.emitSvg) err << "qfic: --svg ignored without --out\n";
    } else {
      writeCsv(res, cfg.outPath);
      if (cfg.emitSvg) writeSvg(res, detail::svgPathFor(cfg.outPath));
    }
  } catch (const InvalidArgument &e) {
    err << "qfic: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError &e) {
    err << "qfic: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError &e) {
    err << "qfic: I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

} // namespace qfic::xcli

#endif // QFIC_XCLI_ARGS_HPP
