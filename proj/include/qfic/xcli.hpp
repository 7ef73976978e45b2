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
/// Experiment configuration, orchestration and result I/O for the `qfic`
/// command-line tool. Flag parsing lives in qfic/xcli_args.hpp so that this
/// header stays free of third-party dependencies.
///
/// Config file format: one `key = value` per line, `#` starts a comment.
/// Keys are the long flag names without the leading dashes.

#ifndef QFIC_XCLI_HPP
#define QFIC_XCLI_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfic/collision.hpp"
#include "qfic/devicesim.hpp"
#include "qfic/errors.hpp"
#include "qfic/fisher.hpp"
#include "qfic/microme.hpp"
#include "qfic/parallel.hpp"
#include "qfic/qmath.hpp"
#include "qfic/reservoir.hpp"

namespace qfic::xcli {

/// Bad configuration: unknown key, malformed value, violated invariant.
class ConfigError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

enum class Experiment { MutualInfo, QfiAnalytic, QfiDevice, BlochTraj, Calibrate, SteadyState };

inline std::string_view toString(Experiment e) {
  switch (e) {
  case Experiment::MutualInfo: return "mutual-info";
  case Experiment::QfiAnalytic: return "qfi-analytic";
  case Experiment::QfiDevice: return "qfi-device";
  case Experiment::BlochTraj: return "bloch-traj";
  case Experiment::Calibrate: return "calibrate";
  case Experiment::SteadyState: return "steady-state";
  }
  return "?";
}

inline Experiment parseExperiment(std::string_view s) {
  for (auto e : {Experiment::MutualInfo, Experiment::QfiAnalytic, Experiment::QfiDevice,
                 Experiment::BlochTraj, Experiment::Calibrate, Experiment::SteadyState})
    if (toString(e) == s) return e;
  throw ConfigError("experiment: unknown experiment '" + std::string(s) + "'");
}

/// Resolved experiment configuration. Units follow the flag names.
/// Optional fields have experiment-dependent defaults filled by resolve().
struct ExperimentConfig {
  Experiment experiment = Experiment::QfiAnalytic;

  // sweep
  int gridPoints = 50;
  std::vector<double> phiList; ///< radians; empty = uniform grid 2 pi k / gridPoints
  std::optional<double> dphi;  ///< 1e-5 analytic, 1e-4 device

  // reservoir unit and rates
  double t1Us = 150.0;
  double t2Us = 100.0;
  double tExposureNs = 480.0;
  std::optional<double> zeta; ///< exclusive with rate
  std::optional<double> rate;
  bool normalizeAncilla = false;

  // collisions
  double g = 0.1;
  double tau = 0.12;
  std::optional<int> collisions; ///< 1000 mutual-info, 1000000 steady-state
  double convTol = 1e-8;

  // device
  double omega0Ghz = 4.5;
  double sigmaPNs = 22.4;
  double alpha = std::numbers::pi / 2;
  double windowK = 4.0;
  std::optional<double> dtPs;     ///< default: 1/64 of the carrier period
  std::optional<double> ampScale; ///< default: calibrate
  int sampleEvery = 64;

  // output
  std::string outPath;
  bool emitSvg = false;
  unsigned threads = 0;

  double zetaValue() const {
    if (zeta) return *zeta;
    if (rate) return *rate * tau * g;
    return 0.012;
  }

  std::vector<double> phiGrid() const {
    if (!phiList.empty()) return phiList;
    std::vector<double> out(static_cast<std::size_t>(gridPoints));
    for (int k = 0; k < gridPoints; ++k) out[k] = 2.0 * std::numbers::pi * k / gridPoints;
    return out;
  }

  reservoir::ReservoirUnitSpec unitSpec(double phi) const {
    return {phi, tExposureNs * 1e-9, t1Us * 1e-6, t2Us * 1e-6};
  }

  collision::CollisionParams collisionParams() const {
    collision::CollisionParams p;
    p.g = g;
    p.tau = tau;
    if (rate) p.rate = *rate;
    else if (tau * g > 0.0) p.rate = zetaValue() / (tau * g);
    return p;
  }

  microme::RateBundle rateBundle() const {
    return {1.0 / (t1Us * 1e-6), 1.0 / (t2Us * 1e-6), zetaValue(), tExposureNs * 1e-9};
  }

  devicesim::PulseSpec pulseSpec() const {
    devicesim::PulseSpec s;
    s.omega0 = 2.0 * std::numbers::pi * omega0Ghz;
    s.omegaD = s.omega0;
    s.sigmaP = sigmaPNs;
    s.alpha = alpha;
    s.windowK = windowK;
    s.dt = dtPs ? *dtPs * 1e-3 : (1.0 / omega0Ghz) / 64.0;
    s.ampScale = ampScale.value_or(1.0);
    return s;
  }

  devicesim::NoiseChannels noise() const {
    return devicesim::NoiseChannels{1.0 / (t1Us * 1e3), 1.0 / (t2Us * 1e3) - 0.5 / (t1Us * 1e3)};
  }

  /// Fills experiment-dependent defaults (not ampScale, which needs a
  /// calibration run).
  void resolve() {
    if (!dphi) dphi = experiment == Experiment::QfiAnalytic ? 1e-5 : 1e-4;
    if (!collisions) collisions = experiment == Experiment::SteadyState ? 1'000'000 : 1000;
    if (!dtPs) dtPs = 1e3 / omega0Ghz / 64.0;
    if (phiList.empty() &&
        (experiment == Experiment::MutualInfo || experiment == Experiment::SteadyState))
      phiList = {std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi};
  }

  /// Checks every invariant, naming the offending key.
  void validate() const {
    auto need = [](bool ok, const std::string &msg) {
      if (!ok) throw ConfigError(msg);
    };
    need(gridPoints >= 3, "grid: must be >= 3");
    need(t1Us > 0.0, "t1-us: must be positive");
    need(t2Us > 0.0, "t2-us: must be positive");
    need(t2Us <= 2.0 * t1Us, "t2-us: must not exceed 2 * t1-us (negative pure-dephasing rate)");
    need(tExposureNs >= 0.0, "t-exposure-ns: must be >= 0");
    need(!(zeta && rate), "zeta/rate: give either zeta or rate, not both");
    if (zeta) need(*zeta >= 0.0, "zeta: must be >= 0");
    if (rate) need(*rate > 0.0, "rate: must be positive");
    need(g >= 0.0, "g: must be >= 0");
    need(tau > 0.0, "tau: must be positive");
    if (collisions) need(*collisions >= 1, "collisions: must be >= 1");
    need(convTol > 0.0, "conv-tol: must be positive");
    if (dphi) need(*dphi > 0.0 && *dphi < 1e-2, "dphi: must lie in (0, 1e-2)");
    need(omega0Ghz > 0.0, "omega0-ghz: must be positive");
    need(sigmaPNs > 0.0, "sigma-p-ns: must be positive");
    need(windowK >= 3.0, "window-k: must be >= 3");
    if (dtPs) {
      need(*dtPs > 0.0, "dt-ps: must be positive");
      need(*dtPs <= 1e3 / omega0Ghz / 40.0 * (1.0 + 1e-12),
           "dt-ps: must not exceed 1/40 of the carrier period");
    }
    if (ampScale) need(*ampScale > 0.0, "amp-scale: must be positive");
    need(sampleEvery >= 1, "sample-every: must be >= 1");
    try {
      unitSpec(std::numbers::pi / 2).validate();
      collisionParams().validate();
      rateBundle().validate();
      noise().validate();
    } catch (const InvalidArgument &e) {
      throw ConfigError(e.what());
    }
  }
};

// ---------------------------------------------------------------------------
// Key/value plumbing shared by the config file, the CLI and the CSV echo.

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// Shortest text that parses back to exactly `v`.
inline std::string formatDouble(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parseNumber(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    throw ConfigError(std::string(key) + ": not a number: '" + t + "'");
  return v;
}

/// Accepts plain numbers and multiples of pi: "pi", "pi/4", "3pi/2", "0.5pi".
inline double parseAngle(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  const auto at = t.find("pi");
  if (at == std::string::npos) return parseNumber(key, t);
  double coef = at == 0 ? 1.0 : parseNumber(key, std::string_view(t).substr(0, at));
  const std::string rest = t.substr(at + 2);
  if (!rest.empty()) {
    if (rest[0] != '/') throw ConfigError(std::string(key) + ": malformed angle '" + t + "'");
    const double d = parseNumber(key, std::string_view(rest).substr(1));
    if (d == 0.0) throw ConfigError(std::string(key) + ": division by zero in '" + t + "'");
    coef /= d;
  }
  return coef * std::numbers::pi;
}

inline int parseInt(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    throw ConfigError(std::string(key) + ": not an integer: '" + t + "'");
  return v;
}

inline bool parseBool(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(std::string(key) + ": not a boolean: '" + t + "'");
}

struct KeySpec {
  std::string key;
  std::string help;
  bool isFlag; ///< boolean switch on the command line
  bool echoed; ///< affects the numbers, written to the CSV metadata
  std::function<void(ExperimentConfig &, std::string_view)> set;
  std::function<std::optional<std::string>(const ExperimentConfig &)> get;
};

} // namespace detail

/// Every configurable key, in echo order.
inline const std::vector<detail::KeySpec> &configKeys() {
  using namespace detail;
  using C = ExperimentConfig;
  using Opt = std::optional<std::string>;
  auto num = [](double v) -> Opt { return formatDouble(v); };
  auto optNum = [](const std::optional<double> &v) -> Opt {
    return v ? Opt(formatDouble(*v)) : std::nullopt;
  };
  static const std::vector<KeySpec> keys = {
      {"experiment", "mutual-info|qfi-analytic|qfi-device|bloch-traj|calibrate|steady-state", false,
       true, [](C &c, std::string_view v) { c.experiment = parseExperiment(trim(v)); },
       [](const C &c) -> Opt { return std::string(toString(c.experiment)); }},
      {"phi-list", "comma-separated phases (radians, 'pi' allowed)", false, true,
       [](C &c, std::string_view v) {
         c.phiList.clear();
         std::string s(v);
         std::stringstream ss(s);
         for (std::string tok; std::getline(ss, tok, ',');) c.phiList.push_back(parseAngle("phi-list", tok));
         if (c.phiList.empty()) throw ConfigError("phi-list: empty list");
       },
       [](const C &c) -> Opt {
         if (c.phiList.empty()) return std::nullopt;
         std::string s;
         for (std::size_t i = 0; i < c.phiList.size(); ++i)
           s += (i ? "," : "") + formatDouble(c.phiList[i]);
         return s;
       }},
      {"grid", "number of phase grid points on [0, 2 pi)", false, true,
       [](C &c, std::string_view v) { c.gridPoints = parseInt("grid", v); },
       [](const C &c) -> Opt { return std::to_string(c.gridPoints); }},
      {"dphi", "centered-difference step (radians)", false, true,
       [](C &c, std::string_view v) { c.dphi = parseNumber("dphi", v); },
       [=](const C &c) { return optNum(c.dphi); }},
      {"g", "collision coupling", false, true,
       [](C &c, std::string_view v) { c.g = parseNumber("g", v); },
       [=](const C &c) { return num(c.g); }},
      {"tau", "collision duration", false, true,
       [](C &c, std::string_view v) { c.tau = parseNumber("tau", v); },
       [=](const C &c) { return num(c.tau); }},
      {"zeta", "coarse-grained coupling zeta = r tau g (exclusive with rate)", false, true,
       [](C &c, std::string_view v) { c.zeta = parseNumber("zeta", v); },
       [=](const C &c) { return optNum(c.zeta); }},
      {"rate", "collision rate r (exclusive with zeta)", false, true,
       [](C &c, std::string_view v) { c.rate = parseNumber("rate", v); },
       [=](const C &c) { return optNum(c.rate); }},
      {"t1-us", "relaxation time T1 (us)", false, true,
       [](C &c, std::string_view v) { c.t1Us = parseNumber("t1-us", v); },
       [=](const C &c) { return num(c.t1Us); }},
      {"t2-us", "dephasing time T2 (us)", false, true,
       [](C &c, std::string_view v) { c.t2Us = parseNumber("t2-us", v); },
       [=](const C &c) { return num(c.t2Us); }},
      {"t-exposure-ns", "ancilla preparation time (ns)", false, true,
       [](C &c, std::string_view v) { c.tExposureNs = parseNumber("t-exposure-ns", v); },
       [=](const C &c) { return num(c.tExposureNs); }},
      {"omega0-ghz", "qubit frequency (GHz, omega0 = 2 pi f)", false, true,
       [](C &c, std::string_view v) { c.omega0Ghz = parseNumber("omega0-ghz", v); },
       [=](const C &c) { return num(c.omega0Ghz); }},
      {"sigma-p-ns", "Gaussian pulse width (ns)", false, true,
       [](C &c, std::string_view v) { c.sigmaPNs = parseNumber("sigma-p-ns", v); },
       [=](const C &c) { return num(c.sigmaPNs); }},
      {"alpha", "pulse area (radians)", false, true,
       [](C &c, std::string_view v) { c.alpha = parseAngle("alpha", v); },
       [=](const C &c) { return num(c.alpha); }},
      {"window-k", "pulse half-window in units of sigma-p", false, true,
       [](C &c, std::string_view v) { c.windowK = parseNumber("window-k", v); },
       [=](const C &c) { return num(c.windowK); }},
      {"dt-ps", "integrator step (ps)", false, true,
       [](C &c, std::string_view v) { c.dtPs = parseNumber("dt-ps", v); },
       [=](const C &c) { return optNum(c.dtPs); }},
      {"amp-scale", "pulse amplitude multiplier (default: calibrate)", false, true,
       [](C &c, std::string_view v) { c.ampScale = parseNumber("amp-scale", v); },
       [=](const C &c) { return optNum(c.ampScale); }},
      {"sample-every", "trajectory sampling stride (integrator steps)", false, true,
       [](C &c, std::string_view v) { c.sampleEvery = parseInt("sample-every", v); },
       [](const C &c) -> Opt { return std::to_string(c.sampleEvery); }},
      {"collisions", "number of collisions (cap for steady-state)", false, true,
       [](C &c, std::string_view v) { c.collisions = parseInt("collisions", v); },
       [](const C &c) -> Opt {
         return c.collisions ? Opt(std::to_string(*c.collisions)) : std::nullopt;
       }},
      {"conv-tol", "probe trace-distance convergence tolerance", false, true,
       [](C &c, std::string_view v) { c.convTol = parseNumber("conv-tol", v); },
       [=](const C &c) { return num(c.convTol); }},
      {"normalize-ancilla", "divide the damped ancilla by its trace", true, true,
       [](C &c, std::string_view v) { c.normalizeAncilla = parseBool("normalize-ancilla", v); },
       [](const C &c) -> Opt { return c.normalizeAncilla ? "true" : "false"; }},
      {"out", "output CSV path (default: stdout)", false, false,
       [](C &c, std::string_view v) { c.outPath = trim(v); },
       [](const C &c) -> Opt { return c.outPath.empty() ? std::nullopt : Opt(c.outPath); }},
      {"svg", "also write <out>.svg", true, false,
       [](C &c, std::string_view v) { c.emitSvg = parseBool("svg", v); },
       [](const C &c) -> Opt { return c.emitSvg ? "true" : "false"; }},
      {"threads", "worker threads (0 = all cores)", false, false,
       [](C &c, std::string_view v) {
         const int t = parseInt("threads", v);
         if (t < 0) throw ConfigError("threads: must be >= 0");
         c.threads = static_cast<unsigned>(t);
       },
       [](const C &c) -> Opt { return std::to_string(c.threads); }},
  };
  return keys;
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines; `#` starts a comment. Later keys win.
inline KeyValues parseKeyValues(std::string_view text) {
  KeyValues out;
  std::string s(text);
  std::stringstream ss(s);
  int lineNo = 0;
  for (std::string line; std::getline(ss, line);) {
    ++lineNo;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineNo) + ": expected key = value");
    out.emplace_back(detail::trim(std::string_view(t).substr(0, eq)),
                     detail::trim(std::string_view(t).substr(eq + 1)));
  }
  return out;
}

inline KeyValues loadConfigFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parseKeyValues(buf.str());
}

inline void applyKeyValues(ExperimentConfig &cfg, const KeyValues &kv) {
  const auto &keys = configKeys();
  for (const auto &[k, v] : kv) {
    auto it = std::find_if(keys.begin(), keys.end(), [&](const auto &s) { return s.key == k; });
    if (it == keys.end()) throw ConfigError(k + ": unknown key");
    it->set(cfg, v);
  }
}

/// Defaults, then the file, then explicit overrides (typically CLI flags).
/// zeta and rate are mutually exclusive across all layers combined, so an
/// override can only switch modes if the lower layer named neither.
inline ExperimentConfig buildConfig(const KeyValues &file, const KeyValues &overrides) {
  ExperimentConfig cfg;
  applyKeyValues(cfg, file);
  applyKeyValues(cfg, overrides);
  cfg.validate();
  cfg.resolve();
  cfg.validate();
  return cfg;
}

/// Resolved configuration as `key = value` pairs (keys that affect numbers).
inline KeyValues configEcho(const ExperimentConfig &cfg) {
  KeyValues out;
  for (const auto &k : configKeys())
    if (k.echoed)
      if (auto v = k.get(cfg)) out.emplace_back(k.key, *v);
  return out;
}

// ---------------------------------------------------------------------------
// Results

/// Named real columns plus the resolved config echo.
struct SweepResult {
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  KeyValues metadata;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().second.size(); }

  const std::vector<double> &column(std::string_view name) const {
    for (const auto &[n, c] : columns)
      if (n == name) return c;
    throw InvalidArgument("SweepResult: no column '" + std::string(name) + "'");
  }

  void validate() const {
    for (const auto &[n, c] : columns)
      qfic::detail::require(c.size() == rows(), "SweepResult: column '" + n + "' has a different length");
  }
};

namespace detail {

inline SweepResult makeResult(const ExperimentConfig &cfg,
                              std::initializer_list<std::string> names) {
  SweepResult r;
  for (const auto &n : names) r.columns.emplace_back(n, std::vector<double>{});
  r.metadata = configEcho(cfg);
  return r;
}

inline void addRow(SweepResult &r, std::initializer_list<double> row) {
  auto it = row.begin();
  for (auto &[n, c] : r.columns) c.push_back(*it++);
}

inline double calibratedScale(ExperimentConfig &cfg) {
  if (!cfg.ampScale) cfg.ampScale = devicesim::calibrate(cfg.pulseSpec()).ampScale;
  return *cfg.ampScale;
}

inline SweepResult runMutualInfo(const ExperimentConfig &cfg) {
  SweepResult r = makeResult(cfg, {"phi", "step", "mi", "rho00", "rho01_abs", "converged"});
  const auto phis = cfg.phiGrid();
  std::vector<collision::CollisionTrace> traces(phis.size());
  collision::RunOptions opt;
  opt.maxSteps = *cfg.collisions;
  opt.convTol = cfg.convTol;
  opt.stopAtConvergence = false;
  parallelFor(phis.size(), cfg.threads, [&](std::size_t i) {
    traces[i] = collision::runCollisions(Qubit::pure(ket::plus()), cfg.unitSpec(phis[i]),
                                         cfg.collisionParams(), opt);
  });
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const auto &t = traces[i];
    for (std::size_t n = 0; n < t.mutualInfo.size(); ++n) {
      const Mat2 &m = t.probeStates[n].matrix();
      const bool conv = t.converged && static_cast<int>(n) + 1 >= t.stepsToConverge;
      addRow(r, {phis[i], double(n + 1), t.mutualInfo[n], m(0, 0).real(), std::abs(m(0, 1)),
                 conv ? 1.0 : 0.0});
    }
  }
  return r;
}

inline SweepResult runQfiAnalytic(const ExperimentConfig &cfg) {
  SweepResult r = makeResult(cfg, {"phi", "qfi", "qfi_numeric", "rz", "rx"});
  const auto rb = cfg.rateBundle();
  for (double phi : cfg.phiGrid()) {
    const auto f = microme::qfiClosedForm(phi, rb);
    const Mat2 d = centeredDiff([&](double x) { return microme::steadyStateAnalytic(x, rb); }, phi,
                                DiffSpec{*cfg.dphi});
    const auto fn = qfiQubitMatrix(microme::steadyStateAnalytic(phi, rb), d);
    const auto sb = microme::steadyBloch(phi, rb);
    addRow(r, {phi, f.value, fn.value, sb.r.rz, sb.r.rx});
  }
  return r;
}

inline SweepResult runQfiDevice(ExperimentConfig cfg) {
  calibratedScale(cfg);
  SweepResult r = makeResult(cfg, {"phi", "qfi", "purity", "p1"});
  const auto grid = cfg.phiGrid();
  const auto pts = devicesim::qfiDeviceSweep(grid, *cfg.dphi, Qubit::pure(ket::zero()),
                                             cfg.pulseSpec(), cfg.noise(), cfg.threads);
  for (const auto &p : pts) addRow(r, {p.phi, p.qfi.value, p.purity, p.excitedLoss});
  return r;
}

inline SweepResult runBlochTraj(ExperimentConfig cfg) {
  calibratedScale(cfg);
  SweepResult r = makeResult(cfg, {"t_ns", "rx", "ry", "rz", "purity"});
  const auto tr = devicesim::blochTrajectory(Qubit::pure(ket::zero()), cfg.pulseSpec(),
                                             cfg.noise(), cfg.sampleEvery);
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    addRow(r, {tr.times[i], tr.blochPoints[i].rx, tr.blochPoints[i].ry, tr.blochPoints[i].rz,
               tr.purities[i]});
  return r;
}

inline SweepResult runCalibrate(ExperimentConfig cfg) {
  cfg.ampScale.reset();
  const auto c = devicesim::calibrate(cfg.pulseSpec());
  cfg.ampScale = c.ampScale;
  SweepResult r = makeResult(cfg, {"amp_scale", "fidelity", "evaluations"});
  addRow(r, {c.ampScale, c.fidelity, double(c.evaluations)});
  return r;
}

inline SweepResult runSteadyState(const ExperimentConfig &cfg) {
  SweepResult r = makeResult(cfg, {"phi", "steps", "p0", "coh_re", "coh_im", "analytic_p0",
                                   "analytic_coh", "unit_trace"});
  const auto phis = cfg.phiGrid();
  std::vector<collision::CollisionTrace> traces(phis.size());
  collision::RunOptions opt;
  opt.maxSteps = *cfg.collisions;
  opt.convTol = cfg.convTol;
  opt.keepAllStates = false;
  parallelFor(phis.size(), cfg.threads, [&](std::size_t i) {
    traces[i] = collision::runCollisions(Qubit::pure(ket::plus()), cfg.unitSpec(phis[i]),
                                         cfg.collisionParams(), opt);
    if (!traces[i].converged)
      throw ConvergenceError("phi = " + formatDouble(phis[i]) +
                             " did not converge within " + std::to_string(opt.maxSteps) +
                             " collisions");
  });
  const auto rb = cfg.rateBundle();
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const Mat2 &m = traces[i].probeStates.back().matrix();
    const Mat2 a = microme::steadyStateAnalytic(phis[i], rb).matrix();
    const double ta = a.trace().real();
    const double unitTrace = reservoir::prepareUnit(cfg.unitSpec(phis[i]), cfg.normalizeAncilla).trace();
    addRow(r, {phis[i], double(traces[i].stepsToConverge), m(0, 0).real(), m(0, 1).real(),
               m(0, 1).imag(), a(0, 0).real() / ta, a(0, 1).real() / ta, unitTrace});
  }
  return r;
}

} // namespace detail

/// Dispatches to the experiment pipeline. Rows are ordered by phi (then by
/// step or time) independent of the thread count. Errors are rethrown with
/// the experiment name prepended.
inline SweepResult runExperiment(const ExperimentConfig &input) {
  ExperimentConfig cfg = input;
  cfg.resolve();
  cfg.validate();
  const std::string ctx = std::string(toString(cfg.experiment)) + ": ";
  try {
    switch (cfg.experiment) {
    case Experiment::MutualInfo: return detail::runMutualInfo(cfg);
    case Experiment::QfiAnalytic: return detail::runQfiAnalytic(cfg);
    case Experiment::QfiDevice: return detail::runQfiDevice(cfg);
    case Experiment::BlochTraj: return detail::runBlochTraj(cfg);
    case Experiment::Calibrate: return detail::runCalibrate(cfg);
    case Experiment::SteadyState: return detail::runSteadyState(cfg);
    }
  } catch (const ConfigError &) {
    throw;
  } catch (const ConvergenceError &e) {
    throw ConvergenceError(ctx + e.what());
  } catch (const CalibrationError &e) {
    throw CalibrationError(ctx + e.what());
  } catch (const NumericalError &e) {
    throw NumericalError(ctx + e.what());
  } catch (const InvalidArgument &e) {
    throw ConfigError(ctx + e.what());
  }
  throw InvalidArgument("runExperiment: unhandled experiment");
}

// ---------------------------------------------------------------------------
// CSV and SVG

inline std::string formatCsv(const SweepResult &res) {
  res.validate();
  std::string out;
  for (const auto &[k, v] : res.metadata) out += "# " + k + " = " + v + "\n";
  for (std::size_t c = 0; c < res.columns.size(); ++c)
    out += (c ? "," : "") + res.columns[c].first;
  out += "\n";
  char buf[40];
  for (std::size_t i = 0; i < res.rows(); ++i) {
    for (std::size_t c = 0; c < res.columns.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.12g", res.columns[c].second[i]);
      if (c) out += ',';
      out += buf;
    }
    out += "\n";
  }
  return out;
}

inline void writeText(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write to '" + path + "' failed");
}

inline void writeCsv(const SweepResult &res, const std::string &path) {
  writeText(path, formatCsv(res));
}

inline SweepResult parseCsv(std::string_view text) {
  SweepResult r;
  std::string s(text);
  std::stringstream ss(s);
  bool header = false;
  for (std::string line; std::getline(ss, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto kv = parseKeyValues(line.substr(1) + "\n");
      if (kv.size() != 1) throw IoError("csv: malformed metadata line '" + line + "'");
      r.metadata.push_back(kv.front());
      continue;
    }
    std::stringstream ls(line);
    std::vector<std::string> cells;
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (!header) {
      for (auto &c : cells) r.columns.emplace_back(c, std::vector<double>{});
      header = true;
      continue;
    }
    if (cells.size() != r.columns.size()) throw IoError("csv: ragged row '" + line + "'");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char *end = nullptr;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0') throw IoError("csv: bad number '" + cells[c] + "'");
      r.columns[c].second.push_back(v);
    }
  }
  return r;
}

inline SweepResult readCsv(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::stringstream buf;
  buf << f.rdbuf();
  return parseCsv(buf.str());
}

namespace detail {

inline std::string xmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace detail

/// One line chart per non-x column against the first column, stacked
/// vertically. A polyline is broken wherever x decreases, so long-format
/// results (several phi groups) draw one curve per group.
inline std::string formatSvg(const SweepResult &res) {
  res.validate();
  constexpr double kW = 640, kH = 220, kPad = 48;
  const std::size_t panels = res.columns.size() > 1 ? res.columns.size() - 1 : 0;
  const double height = std::max(1.0, double(panels)) * kH;
  char buf[128];
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%g\" "
                "height=\"%g\" viewBox=\"0 0 %g %g\">\n",
                kW, height, kW, height);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (panels == 0 || res.rows() == 0) return out + "</svg>\n";

  const auto &[xName, xs] = res.columns.front();
  auto finiteRange = [](const std::vector<double> &v) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : v)
      if (std::isfinite(x)) lo = std::min(lo, x), hi = std::max(hi, x);
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-300) lo -= 0.5, hi += 0.5;
    return std::pair{lo, hi};
  };
  const auto [x0, x1] = finiteRange(xs);
  for (std::size_t p = 0; p < panels; ++p) {
    const auto &[yName, ys] = res.columns[p + 1];
    const auto [y0, y1] = finiteRange(ys);
    const double top = static_cast<double>(p) * kH;
    auto px = [&](double x) { return kPad + (x - x0) / (x1 - x0) * (kW - 2 * kPad); };
    auto py = [&](double y) { return top + kH - kPad + -(y - y0) / (y1 - y0) * (kH - 2 * kPad); };
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                  "stroke=\"#888\"/>\n",
                  kPad, top + kPad, kW - 2 * kPad, kH - 2 * kPad);
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"12\">", kPad, top + kPad - 8);
    out += buf + detail::xmlEscape(yName + " vs " + xName);
    std::snprintf(buf, sizeof buf, " [%.4g, %.4g]</text>\n", y0, y1);
    out += buf;

    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        out += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"" + pts +
               "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i > 0 && xs[i] < xs[i - 1]) flush();
      if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
        flush();
        continue;
      }
      std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", pts.empty() ? "" : " ", px(xs[i]), py(ys[i]));
      pts += buf;
    }
    flush();
  }
  return out + "</svg>\n";
}

inline void writeSvg(const SweepResult &res, const std::string &path) {
  writeText(path, formatSvg(res));
}

} // namespace qfic::xcli

#endif // QFIC_XCLI_HPP
