#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sharpweak/constants.hpp"
#include "sharpweak/errors.hpp"
#include "sharpweak/extremal.hpp"
#include "sharpweak/ode_g.hpp"
#include "sharpweak/special_u_weak.hpp"
#include "sharpweak/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sharpweak;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Bad flag values found after parsing; reported like CLI11 usage errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A failed write or a missing output directory.
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Sink {
  std::optional<fs::path> dir;
};

// --out wins over SHARPWEAK_OUT_DIR; with neither, artifacts go to stdout.
Sink resolve_sink(const std::string& out) {
  Sink s;
  if (!out.empty()) {
    s.dir = out;
  } else if (const char* env = std::getenv("SHARPWEAK_OUT_DIR"); env != nullptr && *env != '\0') {
    s.dir = env;
  }
  if (s.dir && !fs::is_directory(*s.dir)) {
    throw OutputError("output directory does not exist: " + s.dir->string());
  }
  return s;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot open " + path.string() + " for writing");
  f << body;
  f.close();
  if (!f) throw OutputError("write failed: " + path.string());
}

// Writes `body` as <stem>.<ext> and its manifest as <stem>.manifest.json,
// or prints the body when no directory is configured.
void emit(const Sink& sink, const std::string& stem, const std::string& ext, const std::string& body,
          const RunManifest& manifest) {
  if (!sink.dir) {
    std::cout << body;
    return;
  }
  const fs::path artifact = *sink.dir / (stem + "." + ext);
  write_file(artifact, body);
  json m = manifest;
  m["artifact"] = artifact.filename().string();
  write_file(*sink.dir / (stem + ".manifest.json"), m.dump(2) + "\n");
  std::cerr << "wrote " << artifact.string() << "\n";
}

void check_format(const std::string& format) {
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
}

// ---------------------------------------------------------------------------
// constants

struct ConstantsArgs {
  std::vector<double> p;
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 42;
};

std::optional<double> try_value(const std::function<double()>& f, std::vector<std::string>& errors,
                                const std::string& what) {
  try {
    return f();
  } catch (const std::exception& e) {
    errors.push_back(what + ": " + e.what());
    return std::nullopt;
  }
}

int cmd_constants(const ConstantsArgs& a) {
  check_format(a.format);
  const Sink sink = resolve_sink(a.out);
  json rows = json::array();
  int failed_rows = 0;
  for (double p : a.p) {
    json row{{"p", p}};
    std::vector<std::string> errors;
    std::optional<Exponent> e;
    try {
      e = Exponent(p);
      row["regime"] = to_string(e->regime());
    } catch (const std::exception& ex) {
      errors.push_back(ex.what());
    }
    if (e) {
      auto put = [&](const char* key, const std::function<double()>& f, bool applies) {
        if (!applies) {
          row[key] = nullptr;
          return;
        }
        const auto v = try_value(f, errors, key);
        row[key] = v ? json(*v) : json(nullptr);
      };
      put("K_p", [&] { return kp(*e).value; }, p >= 1.0 && p <= 2.0);
      put("C_p", [&] { return nonneg_strong_constant(*e); }, p > 1.0);
      put("weak_nonneg", [&] { return weak_constant_nonneg(*e).value; }, p < 1.0 || p >= 2.0);
      put("weak_nonneg_pth_power", [&] { return weak_constant_pth_power(*e); }, p >= 2.0);
      json refs = json::array();
      try {
        for (const auto& c : reference_constants(*e)) refs.push_back({{"name", c.name}, {"value", c.value}});
      } catch (const std::exception& ex) {
        errors.push_back(std::string("reference: ") + ex.what());
      }
      row["reference"] = refs;
    }
    row["error"] = errors.empty() ? json(nullptr) : json(errors.front());
    if (!e) ++failed_rows;
    rows.push_back(row);
  }

  std::string p_list;
  for (double p : a.p) p_list += (p_list.empty() ? "" : ",") + num(p);
  const RunManifest manifest = make_manifest("constants", {{"p", p_list}, {"format", a.format}}, a.seed);

  std::string body;
  if (a.format == "json") {
    json doc{{"constants", rows}};
    if (!sink.dir) doc["manifest"] = manifest;
    body = doc.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "p,regime,K_p,C_p,weak_nonneg,weak_nonneg_pth_power,reference,error\n";
    for (const auto& row : rows) {
      auto cell = [&](const char* key) {
        if (!row.contains(key) || row[key].is_null()) return std::string();
        return row[key].is_number() ? num(row[key].get<double>()) : row[key].get<std::string>();
      };
      std::string refs;
      if (row.contains("reference")) {
        for (const auto& r : row["reference"]) {
          if (!refs.empty()) refs += ';';
          refs += r["name"].get<std::string>() + "=" + num(r["value"].get<double>());
        }
      }
      os << num(row["p"].get<double>()) << ',' << cell("regime") << ',' << cell("K_p") << ',' << cell("C_p") << ','
         << cell("weak_nonneg") << ',' << cell("weak_nonneg_pth_power") << ",\"" << refs << "\",\""
         << cell("error") << "\"\n";
    }
    body = os.str();
  }
  emit(sink, "constants", a.format, body, manifest);
  return failed_rows == static_cast<int>(a.p.size()) ? kExitFail : 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string suite;
  std::optional<double> p;
  std::uint64_t seed = 42;
  std::optional<long> n;
  double dt = 1e-2;
  int workers = 1;
  std::string format = "json";
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  check_format(a.format);
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), a.suite) == names.end()) {
    throw UsageError("unknown suite '" + a.suite + "'");
  }
  const Sink sink = resolve_sink(a.out);
  SuiteOptions o;
  o.p = a.p;
  o.seed = a.seed;
  o.n = a.n;
  o.dt = a.dt;
  o.workers = a.workers;
  SuiteReport rep;
  try {
    rep = run_suite(a.suite, o);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }

  std::vector<std::pair<std::string, std::string>> params{{"suite", a.suite}, {"p", num(rep.p)},
                                                          {"dt", num(a.dt)},  {"workers", std::to_string(a.workers)},
                                                          {"format", a.format}};
  if (a.n) params.emplace_back("n", std::to_string(*a.n));
  const RunManifest manifest = make_manifest("verify", params, a.seed);

  std::string body;
  if (a.format == "json") {
    json doc = rep;
    doc["manifest"] = manifest;
    body = doc.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "kind,name,samples,violations,worst_margin,tolerance,passed\n";
    for (const auto& prop : rep.properties) {
      os << "property," << prop.name << ',' << prop.samples << ',' << prop.violations << ',' << num(prop.worst_margin)
         << ',' << num(prop.tolerance) << ',' << (prop.passed() ? "true" : "false") << '\n';
    }
    for (const auto& s : rep.statistics) {
      os << "statistic," << s.check << ',' << s.n << ",," << num(s.margin_sigma) << ",," << to_string(s.verdict)
         << '\n';
    }
    body = os.str();
  }
  emit(sink, "verify-" + a.suite, a.format, body, manifest);

  for (const auto& prop : rep.properties) {
    std::cerr << (prop.passed() ? "PASS " : "FAIL ") << prop.name << "  samples=" << prop.samples
              << " violations=" << prop.violations << " worst_margin=" << prop.worst_margin << "\n";
  }
  for (const auto& s : rep.statistics) {
    std::cerr << to_string(s.verdict) << ' ' << s.check << "  estimate=" << s.estimate << " se=" << s.std_error
              << " bound=" << s.bound << " margin_sigma=" << s.margin_sigma << "\n";
  }
  std::cerr << "suite " << a.suite << (rep.passed() ? " passed" : " FAILED") << "\n";
  return rep.passed() ? 0 : kExitFail;
}

// ---------------------------------------------------------------------------
// figures

struct TrajectoryArgs {
  double p = 3.0;
  double x = 1.0 / 24.0;
  double delta = 1.5;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_trajectories(const TrajectoryArgs& a) {
  const Sink sink = resolve_sink(a.out);
  ExtremalParams prm;
  try {
    prm = resolve_params(a.p, a.x, a.delta);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  const ExtremalChain chain = build_extremal_chain(prm);
  const auto& w = chain.weights;
  const int last = chain.x.last_step();
  const double top = w[static_cast<std::size_t>(2 * prm.n_steps)];
  // One point of [0, 1] per kind of path: absorbed at x = 0 after the first
  // move, absorbed on the lower line after the second, and the two ends of
  // the final split.
  const std::vector<std::pair<const char*, double>> omegas{
      {"to_axis", 0.5 * (w[0] + w[1])},
      {"to_lower_line", 0.5 * (w[1] + w[2])},
      {"final_up", 0.25 * top},
      {"final_down", 0.75 * top},
  };
  std::ostringstream os;
  os << "trajectory,omega,step,X,Y\n";
  for (const auto& [name, t] : omegas) {
    for (int n = 0; n <= last; ++n) {
      os << name << ',' << num(t) << ',' << n << ',' << num(chain.x.value_at(n, t)) << ','
         << num(chain.y.value_at(n, t)) << '\n';
    }
  }
  emit(sink, "trajectories", "csv", os.str(),
       make_manifest("figures trajectories",
                     {{"p", num(a.p)},
                      {"x", num(a.x)},
                      {"delta_hint", num(a.delta)},
                      {"delta", num(prm.delta)},
                      {"N", std::to_string(prm.n_steps)}},
                     a.seed));
  return 0;
}

struct RegionsArgs {
  double p = 3.0;
  double x_max = 2.0;
  double y_max = 1.5;
  int lines = 200;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_regions(const RegionsArgs& a) {
  if (!(a.p > 2.0)) throw UsageError("figures regions needs p > 2");
  if (!(a.x_max > 0.0 && a.y_max > 0.0 && a.lines >= 2)) throw UsageError("bad --x-max, --y-max or --lines");
  const Sink sink = resolve_sink(a.out);
  const UWContext ctx = UWContext::build(Exponent(a.p));
  const auto samples = trace_boundaries(ctx, a.x_max, a.y_max, a.lines);
  std::ostringstream os;
  os << "region_a,region_b,x,y\n";
  for (const auto& s : samples) {
    os << to_string(s.a) << ',' << to_string(s.b) << ',' << num(0.5 * (s.on_a.x + s.on_b.x)) << ','
       << num(0.5 * (s.on_a.y + s.on_b.y)) << '\n';
  }
  emit(sink, "regions", "csv", os.str(),
       make_manifest("figures regions",
                     {{"p", num(a.p)}, {"x_max", num(a.x_max)}, {"y_max", num(a.y_max)}, {"lines", std::to_string(a.lines)}},
                     a.seed));
  return 0;
}

// ---------------------------------------------------------------------------
// gfun

struct GfunArgs {
  double p = 3.0;
  std::optional<double> t_max;
  double step = 1e-3;
  std::string method = "rk";
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_gfun(const GfunArgs& a) {
  if (a.method != "rk" && a.method != "bessel") throw UsageError("--method must be rk or bessel");
  if (!(a.p > 2.0)) throw UsageError("gfun needs p > 2");
  const Sink sink = resolve_sink(a.out);
  const double t_max = a.t_max.value_or(default_t_max(a.p));
  GSolution sol = [&] {
    try {
      return a.method == "rk" ? build_g_rk(Exponent(a.p), t_max, a.step) : build_g_bessel(Exponent(a.p), t_max, a.step);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  }();
  std::ostringstream os;
  sol.write_csv(os);
  emit(sink, "gfun", "csv", os.str(),
       make_manifest("gfun", {{"p", num(a.p)}, {"t_max", num(t_max)}, {"step", num(a.step)}, {"method", a.method}},
                     a.seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp weak-type constants, special functions and their verification"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  ConstantsArgs ca;
  auto* constants = app.add_subcommand("constants", "Table of sharp constants");
  constants->add_option("--p", ca.p, "Exponents (repeat or comma-separate)")->required()->delimiter(',');
  constants->add_option("--format", ca.format, "csv or json")->capture_default_str();
  constants->add_option("--out", ca.out, "Output directory");
  constants->add_option("--seed", ca.seed, "Recorded in the manifest")->capture_default_str();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", va.suite, "w, u-weak, u-orth, ode, extremal, mc-weak-type, mc-strip or harmonic")
      ->required();
  verify->add_option("--p", va.p, "Exponent (suite default if omitted)");
  verify->add_option("--seed", va.seed, "Master seed")->capture_default_str();
  verify->add_option("--n", va.n, "Sample count (suite default if omitted)");
  verify->add_option("--dt", va.dt, "Largest Monte Carlo time step")->capture_default_str();
  verify->add_option("--workers", va.workers, "Monte Carlo worker threads")->capture_default_str();
  verify->add_option("--format", va.format, "json or csv")->capture_default_str();
  verify->add_option("--out", va.out, "Output directory");

  auto* figures = app.add_subcommand("figures", "Plot-ready CSV data");
  figures->require_subcommand(1);
  TrajectoryArgs ta;
  auto* traj = figures->add_subcommand("trajectories", "Paths of the extremal chain");
  traj->add_option("--p", ta.p)->capture_default_str();
  traj->add_option("--x", ta.x, "Starting value x0")->capture_default_str();
  traj->add_option("--delta", ta.delta, "Step parameter (adjusted to an integer N)")->capture_default_str();
  traj->add_option("--seed", ta.seed, "Recorded in the manifest")->capture_default_str();
  traj->add_option("--out", ta.out, "Output directory");
  RegionsArgs ra;
  auto* regions = figures->add_subcommand("regions", "Boundary points of the regions D0..D7");
  regions->add_option("--p", ra.p)->capture_default_str();
  regions->add_option("--x-max", ra.x_max)->capture_default_str();
  regions->add_option("--y-max", ra.y_max)->capture_default_str();
  regions->add_option("--lines", ra.lines, "Scan lines per axis")->capture_default_str();
  regions->add_option("--seed", ra.seed, "Recorded in the manifest")->capture_default_str();
  regions->add_option("--out", ra.out, "Output directory");

  GfunArgs ga;
  auto* gfun = app.add_subcommand("gfun", "Tabulated G with its derivative");
  gfun->add_option("--p", ga.p)->capture_default_str();
  gfun->add_option("--t-max", ga.t_max);
  gfun->add_option("--step", ga.step)->capture_default_str();
  gfun->add_option("--method", ga.method, "rk or bessel")->capture_default_str();
  gfun->add_option("--seed", ga.seed, "Recorded in the manifest")->capture_default_str();
  gfun->add_option("--out", ga.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*constants) return cmd_constants(ca);
    if (*verify) return cmd_verify(va);
    if (*traj) return cmd_trajectories(ta);
    if (*regions) return cmd_regions(ra);
    if (*gfun) return cmd_gfun(ga);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
