#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "incompat/compat.hpp"
#include "incompat/covariance.hpp"
#include "incompat/device_io.hpp"
#include "incompat/errors.hpp"
#include "incompat/robustness.hpp"
#include "incompat/theorems.hpp"

namespace incompat::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Input problems detected after parsing (bad files, wrong shapes) map to kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  double tol = SolverConfig{}.feas_tol;
  double infeas_threshold = SolverConfig{}.infeas_threshold;
  int max_iters = SolverConfig{}.max_iters;
  std::uint64_t seed = 0;
  std::string out;

  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.feas_tol = tol;
    cfg.infeas_threshold = infeas_threshold;
    cfg.max_iters = max_iters;
    try {
      cfg.validate();
    } catch (const ConstraintViolation& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--tol", o.tol, "Marginal residual accepted as feasible")->check(CLI::PositiveNumber);
  app->add_option("--infeas-threshold", o.infeas_threshold, "Minimum gap reported as infeasible")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-iters", o.max_iters, "Iteration budget of the solver")->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "Seed for every random choice");
  app->add_option("--out", o.out, "Also write the JSON result to this file");
}

void emit(const json& j, const CommonOptions& o, std::ostream& out) {
  out << j.dump(2) << '\n';
  if (!o.out.empty()) write_json_file(o.out, j);
}

template <class F>
auto load(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(e.what());
  }
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Feasible:
      return kExitFeasible;
    case Verdict::Infeasible:
      return kExitInfeasible;
    case Verdict::Undecided:
      return kExitUndecided;
  }
  return kExitInternal;
}

template <class W>
json report_json(const std::string& kind, const FeasibilityReport<W>& r) {
  json j = {{"kind", kind},
            {"verdict", std::string(to_string(r.verdict))},
            {"residual", r.residual},
            {"iterations", r.iterations},
            {"gap", r.gap}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  return j;
}

// ---- check ---------------------------------------------------------------

int cmd_check(const std::string& kind, const std::string& a, const std::string& b, const CommonOptions& o,
              std::ostream& out) {
  const SolverConfig cfg = o.solver();
  if (kind == "jm") {
    const auto [m, n] = load([&] {
      return std::pair{povm_from_json(read_json_file(a)), povm_from_json(read_json_file(b))};
    });
    if (m.dim() != n.dim()) throw UsageError("observables act on different dimensions");
    const JmReport r = jm_feasible(m, n, cfg);
    emit(report_json(kind, r), o, out);
    return exit_code(r.verdict);
  }
  if (kind == "chan") {
    const auto [e, f] = load([&] {
      return std::pair{channel_from_json(read_json_file(a)), channel_from_json(read_json_file(b))};
    });
    if (e.din() != f.din()) throw UsageError("channels have different input dimensions");
    const ChannelReport r = channel_compat_feasible(e, f, cfg);
    emit(report_json(kind, r), o, out);
    return exit_code(r.verdict);
  }
  const auto [m, e] = load([&] {
    return std::pair{povm_from_json(read_json_file(a)), channel_from_json(read_json_file(b))};
  });
  if (m.dim() != e.din()) throw UsageError("observable and channel input dimensions differ");
  const InstrumentReport r = obs_channel_feasible(m, e, cfg);
  emit(report_json(kind, r), o, out);
  return exit_code(r.verdict);
}

// ---- robustness ----------------------------------------------------------

struct PairFile {
  std::string kind;
  json first;
  json second;
};

PairFile read_pair(const fs::path& path) {
  return load([&] {
    const json j = read_json_file(path);
    if (!j.is_object() || !j.contains("kind") || !j.contains("first") || !j.contains("second")) {
      throw ParseError(path.string() + ": expected {\"kind\", \"first\", \"second\"}");
    }
    PairFile p{j.at("kind").get<std::string>(), j.at("first"), j.at("second")};
    if (p.kind != "jm" && p.kind != "chan" && p.kind != "obschan") {
      throw ParseError(path.string() + ": unknown pair kind '" + p.kind + "'");
    }
    return p;
  });
}

ObsPair to_obs_pair(const PairFile& p) {
  return load([&] { return ObsPair{povm_from_json(p.first), povm_from_json(p.second)}; });
}
ChannelPair to_channel_pair(const PairFile& p) {
  return load([&] { return ChannelPair{channel_from_json(p.first), channel_from_json(p.second)}; });
}
ObsChannelPair to_obs_channel_pair(const PairFile& p) {
  return load([&] { return ObsChannelPair{povm_from_json(p.first), channel_from_json(p.second)}; });
}

bool same_shape(const ObsPair& x, const ObsPair& y) {
  return x.first.dim() == y.first.dim() && x.first.outcomes() == y.first.outcomes() &&
         x.second.dim() == y.second.dim() && x.second.outcomes() == y.second.outcomes();
}
bool same_shape(const ChannelPair& x, const ChannelPair& y) {
  return x.first.din() == y.first.din() && x.first.dout() == y.first.dout() && x.second.din() == y.second.din() &&
         x.second.dout() == y.second.dout();
}
bool same_shape(const ObsChannelPair& x, const ObsChannelPair& y) {
  return x.first.dim() == y.first.dim() && x.first.outcomes() == y.first.outcomes() &&
         x.second.din() == y.second.din() && x.second.dout() == y.second.dout();
}

template <class Pair>
RobustnessEstimate estimate(const Pair& x, const std::vector<Pair>& candidates, const SolverConfig& cfg,
                            double bisect_tol) {
  for (const auto& y : candidates) {
    if (!same_shape(x, y)) throw UsageError("noise candidate does not match the shape of the pair");
  }
  if (candidates.size() == 1) return relative_robustness(x, candidates.front(), cfg, bisect_tol);
  return k_robustness_sampled(x, std::span<const Pair>(candidates), cfg, bisect_tol);
}

int cmd_robustness(const std::string& pair_path, const std::vector<std::string>& noise_paths,
                   const std::string& noise_dir, double bisect_tol, const CommonOptions& o, std::ostream& out) {
  const SolverConfig cfg = o.solver();
  const PairFile x = read_pair(pair_path);

  std::vector<fs::path> files(noise_paths.begin(), noise_paths.end());
  if (!noise_dir.empty()) {
    if (!fs::is_directory(noise_dir)) throw UsageError("noise directory not found: " + noise_dir);
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(noise_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  if (files.empty()) throw UsageError("no noise candidates given");

  std::vector<PairFile> ys;
  for (const auto& f : files) {
    ys.push_back(read_pair(f));
    if (ys.back().kind != x.kind) throw UsageError(f.string() + ": pair kind differs from " + pair_path);
  }

  RobustnessEstimate est;
  if (x.kind == "jm") {
    std::vector<ObsPair> c;
    for (const auto& y : ys) c.push_back(to_obs_pair(y));
    est = estimate(to_obs_pair(x), c, cfg, bisect_tol);
  } else if (x.kind == "chan") {
    std::vector<ChannelPair> c;
    for (const auto& y : ys) c.push_back(to_channel_pair(y));
    est = estimate(to_channel_pair(x), c, cfg, bisect_tol);
  } else {
    std::vector<ObsChannelPair> c;
    for (const auto& y : ys) c.push_back(to_obs_channel_pair(y));
    est = estimate(to_obs_channel_pair(x), c, cfg, bisect_tol);
  }

  json names = json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  json j = {{"kind", x.kind},
            {"mode", std::string(to_string(est.mode))},
            {"lower_bound_only", est.mode == EstimateMode::KAbsoluteSampled},
            {"value", est.value},
            {"lo", est.lo},
            {"hi", est.hi},
            {"bracket_empty", est.bracket_empty},
            {"oracle_calls", est.oracle_calls},
            {"candidates", names},
            {"witness", names[est.witness_index]}};
  const double r = to_R(est.value);
  j["R"] = std::isinf(r) ? json("inf") : json(r);
  emit(j, o, out);
  return kExitFeasible;
}

// ---- verify-theorems -----------------------------------------------------

std::vector<std::size_t> parse_dims(const std::string& s) {
  std::vector<std::size_t> dims;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(item, &pos);
    } catch (const std::exception&) {
      throw UsageError("malformed dimension '" + item + "'");
    }
    if (pos != item.size() || v < 2 || v > 5) throw UsageError("dimensions must be integers in 2..5, got '" + item + "'");
    dims.push_back(static_cast<std::size_t>(v));
  }
  if (dims.empty()) throw UsageError("no dimensions given");
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  return dims;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

int cmd_verify_theorems(const std::string& dims_arg, const std::vector<std::string>& which, bool monotonicity,
                        bool json_stdout, const CommonOptions& o, std::ostream& out) {
  const SolverConfig cfg = o.solver();
  const std::vector<std::size_t> dims = parse_dims(dims_arg);
  for (const auto& w : which) {
    if (w != "weyl" && w != "decodable" && w != "vn") throw UsageError("unknown theorem '" + w + "'");
  }
  auto wanted = [&](const char* name) { return which.empty() || std::find(which.begin(), which.end(), name) != which.end(); };

  std::vector<TheoremReport> reports;
  json skipped = json::array();
  for (std::size_t d : dims) {
    if (wanted("weyl")) reports.push_back(weyl_pair_theorem(d, cfg));
    if (wanted("decodable")) {
      if (d <= 4) {
        reports.push_back(decodable_channels_theorem(d, cfg));
      } else {
        skipped.push_back({{"name", "decodable_channels"}, {"d", d}, {"reason", "defined for d <= 4"}});
      }
    }
    if (wanted("vn")) reports.push_back(vn_obs_decodable_theorem(d, cfg));
  }

  bool ok = true;
  json rows = json::array();
  for (const auto& r : reports) {
    rows.push_back(to_json(r));
    ok = ok && r.pass();
  }
  json j = {{"seed", o.seed}, {"dims", dims}, {"reports", rows}, {"skipped", skipped}};
  MonotonicityReport mono;
  if (monotonicity) {
    mono = monotonicity_suite(o.seed);
    j["monotonicity"] = to_json(mono);
    ok = ok && mono.pass();
  }
  j["pass"] = ok;

  if (json_stdout) {
    out << j.dump(2) << '\n';
  } else {
    out << std::left << std::setw(20) << "theorem" << std::setw(4) << "d" << std::setw(12) << "closed" << std::setw(12)
        << "numeric" << std::setw(12) << "|diff|" << std::setw(11) << "witnesses"
        << "status\n";
    for (const auto& r : reports) {
      out << std::left << std::setw(20) << r.name << std::setw(4) << r.d << std::setw(12) << fixed(r.closed_form, 6)
          << std::setw(12) << fixed(r.numeric_estimate, 6) << std::setw(12)
          << fixed(std::abs(r.numeric_estimate - r.closed_form), 6) << std::setw(11)
          << (r.witnesses_validated ? "ok" : "FAILED") << (r.pass() ? "PASS" : "FAIL") << '\n';
    }
    for (const auto& s : skipped) {
      out << std::left << std::setw(20) << s["name"].get<std::string>() << std::setw(4) << s["d"].get<std::size_t>()
          << "skipped (" << s["reason"].get<std::string>() << ")\n";
    }
    if (monotonicity) {
      const auto failed = std::count_if(mono.cases.begin(), mono.cases.end(), [](const auto& c) { return !c.pass; });
      out << "monotonicity: " << mono.cases.size() - failed << "/" << mono.cases.size() << " cases pass\n";
    }
  }
  if (!o.out.empty()) write_json_file(o.out, j);
  return ok ? 0 : 1;
}

// ---- emit ----------------------------------------------------------------

json pair_json(const std::string& kind, json first, json second) {
  return {{"kind", kind}, {"first", std::move(first)}, {"second", std::move(second)}};
}

const std::map<std::string, std::string>& emit_catalogue() {
  static const std::map<std::string, std::string> names = {
      {"position", "observable: standard basis Q"},
      {"momentum", "observable: Fourier basis P"},
      {"trivial", "observable: uniform trivial observable"},
      {"identity", "channel: identity"},
      {"depolarizing", "channel: completely depolarizing"},
      {"lueders", "channel: Lueders channel of Q"},
      {"cloner", "channel: optimal symmetric cloner into C^d (x) C^d"},
      {"decodable-noise", "channel: optimal noise for the identity pair"},
      {"weyl-pair", "pair: (Q, P)"},
      {"weyl-noise", "pair: optimal covariant noise for (Q, P)"},
      {"identity-pair", "pair: (id, id)"},
      {"identity-noise", "pair: optimal noise for (id, id)"},
      {"vn-pair", "pair: (Q, id)"},
      {"vn-noise", "pair: optimal noise for (Q, id)"},
  };
  return names;
}

int cmd_emit(const std::string& name, std::size_t d, const CommonOptions& o, std::ostream& out) {
  if (d < 2) throw UsageError("--d must be at least 2");
  if (!emit_catalogue().contains(name)) {
    std::string known;
    for (const auto& [k, v] : emit_catalogue()) known += " " + k;
    throw UsageError("unknown device '" + name + "'; known:" + known);
  }
  const std::vector<double> uniform(d, 1.0 / static_cast<double>(d));
  json j;
  if (name == "position") j = to_json(position_observable(d));
  if (name == "momentum") j = to_json(momentum_observable(d));
  if (name == "trivial") j = to_json(trivial_observable(uniform, d));
  if (name == "identity") j = to_json(identity_channel(d));
  if (name == "depolarizing") j = to_json(completely_depolarizing_channel(d));
  if (name == "lueders") j = to_json(lueders_channel(position_observable(d)));
  if (name == "cloner") j = to_json(optimal_cloner(d));
  if (name == "decodable-noise") j = to_json(decodable_noise(d));
  if (name == "weyl-pair") j = pair_json("jm", to_json(position_observable(d)), to_json(momentum_observable(d)));
  if (name == "weyl-noise") {
    const ObsPair y = weyl_optimal_noise(d);
    j = pair_json("jm", to_json(y.first), to_json(y.second));
  }
  if (name == "identity-pair") j = pair_json("chan", to_json(identity_channel(d)), to_json(identity_channel(d)));
  if (name == "identity-noise") j = pair_json("chan", to_json(decodable_noise(d)), to_json(decodable_noise(d)));
  if (name == "vn-pair") j = pair_json("obschan", to_json(position_observable(d)), to_json(identity_channel(d)));
  if (name == "vn-noise") {
    const ObsChannelPair y = vn_noise_pair(d);
    j = pair_json("obschan", to_json(y.first), to_json(y.second));
  }
  emit(j, o, out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Incompatibility robustness of quantum devices", "incompat"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* check = app.add_subcommand("check", "Decide compatibility of two devices");
  std::string kind, file_a, file_b;
  check->add_option("kind", kind, "jm | chan | obschan")->required()->check(CLI::IsMember({"jm", "chan", "obschan"}));
  check->add_option("first", file_a, "First device (JSON)")->required();
  check->add_option("second", file_b, "Second device (JSON)")->required();
  add_common(check, common);

  auto* rob = app.add_subcommand("robustness", "Estimate the robustness of a device pair against noise pairs");
  std::string pair_path, noise_dir;
  std::vector<std::string> noise_paths;
  double bisect_tol = 1e-3;
  rob->add_option("pair", pair_path, "Pair file {\"kind\", \"first\", \"second\"}")->required();
  rob->add_option("noise", noise_paths, "Noise pair files");
  rob->add_option("--noise-dir", noise_dir, "Directory of noise pair files (*.json)");
  rob->add_option("--bisect-tol", bisect_tol, "Bracket width of the bisection")->check(CLI::PositiveNumber);
  add_common(rob, common);

  auto* verify = app.add_subcommand("verify-theorems", "Check the closed-form robustness values");
  std::string dims = "2,3";
  std::vector<std::string> which;
  bool no_mono = false;
  bool json_stdout = false;
  verify->add_option("--dims", dims, "Comma-separated dimensions in 2..5");
  verify->add_option("--theorem", which, "weyl | decodable | vn (repeatable; default all)");
  verify->add_flag("--no-monotonicity", no_mono, "Skip the processing monotonicity suite");
  verify->add_flag("--json", json_stdout, "Print JSON instead of the table");
  add_common(verify, common);

  auto* emit_cmd = app.add_subcommand("emit", "Write a named device or pair as JSON");
  std::string name;
  std::size_t d = 2;
  emit_cmd->add_option("name", name, "Device name")->required();
  emit_cmd->add_option("--d", d, "Dimension");
  add_common(emit_cmd, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(kind, file_a, file_b, common, out);
    if (rob->parsed()) return cmd_robustness(pair_path, noise_paths, noise_dir, bisect_tol, common, out);
    if (verify->parsed()) return cmd_verify_theorems(dims, which, !no_mono, json_stdout, common, out);
    if (emit_cmd->parsed()) return cmd_emit(name, d, common, out);
  } catch (const UsageError& e) {
    err << "incompat: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "incompat: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace incompat::cli
