#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qnd/chain.hpp"
#include "qnd/error.hpp"
#include "qnd/fidelity.hpp"
#include "qnd/optimizer.hpp"
#include "qnd/parallel.hpp"
#include "qnd/state_spec.hpp"
#include "qnd/validation.hpp"

#ifndef QND_VERSION
#define QND_VERSION "0.0.0"
#endif

namespace qnd::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

namespace {

constexpr std::size_t kDefaultMaxConditional = 10;

struct RunContext {
  fs::path out_dir;
  std::vector<std::string> outputs;
  std::ostream& log;

  fs::path path(const std::string& name) const { return out_dir / name; }

  // Opens `name` in binary mode (LF line endings on every platform) and
  // records it as a produced file.
  std::ofstream open(const std::string& name) {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path(name).string());
    outputs.push_back(name);
    return f;
  }

  void write_json(const std::string& name, const json& doc) {
    auto f = open(name);
    f << doc.dump(2) << '\n';
  }
};

void write_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_number(v);
    first = false;
  }
  os << '\n';
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream os;
  os << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json moments(const Distribution& d) {
  return json{{"integral", d.integral()}, {"mean", d.mean()}, {"variance", d.variance()}};
}

json grid_json(const Grid& g) {
  return json{{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n_points", g.size()}};
}

void write_manifest(RunContext& ctx, const std::string& command, const std::vector<std::string>& args,
                    const json& config, std::uint64_t seed) {
  json manifest;
  manifest["command"] = command;
  manifest["arguments"] = args;
  manifest["config"] = config;
  manifest["outputs"] = ctx.outputs;
  manifest["seed"] = seed;
  manifest["tool_version"] = QND_VERSION;
  manifest["timestamp"] = iso_timestamp();
  std::ofstream f(ctx.path("manifest.json"), std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + ctx.path("manifest.json").string());
  f << manifest.dump(2) << '\n';
}

struct ChainOptions {
  double phi = 0.0;
  double probe_var = kVacuumVariance;
  std::string signal = "gaussian:0,0.25";
  std::string outcome = "0";
  std::uint64_t seed = 0;
  std::size_t grid_n = kDefaultGridPoints;
  double grid_span = 0.0;
  std::size_t max_conditional = kDefaultMaxConditional;
};

struct SweepOptions {
  double x_min = 0.1;
  double x_max = 5.0;
  std::size_t steps = 50;
  std::string mode = "closed";
  std::string signal = "gaussian:0,0.25";
  double phi = std::numbers::pi / 4;
  std::size_t grid_n = kDefaultGridPoints;
};

struct OptimizeOptions {
  std::string mode = "closed";
  std::string signal = "gaussian:0,0.25";
  double phi = std::numbers::pi / 4;
  double tol = 1e-6;
  double x_lo = kTradeOffLo;
  double x_hi = kTradeOffHi;
  std::optional<double> sigma_probe;
  std::size_t grid_n = 1024;
};

// --outcome accepts a number or sample:<count>.
struct OutcomeRequest {
  std::optional<double> x0;
  std::size_t samples = 0;
};

OutcomeRequest parse_outcome(const std::string& text) {
  OutcomeRequest req;
  if (text.rfind("sample:", 0) == 0) {
    const auto body = std::string_view(text).substr(7);
    std::size_t count = 0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), count);
    if (ec != std::errc() || ptr != body.data() + body.size() || count == 0) {
      throw Error(ErrorKind::Parse, "--outcome sample:<n> needs a positive integer count");
    }
    req.samples = count;
  } else {
    req.x0 = parse_real(text);
  }
  return req;
}

int cmd_chain(const ChainOptions& opt, RunContext& ctx, const std::vector<std::string>& args) {
  const auto request = parse_outcome(opt.outcome);
  const auto signal_spec = parse_state_spec(opt.signal);
  validate_phase(opt.phi);
  const GaussianSpec probe_spec{0.0, opt.probe_var};
  probe_spec.validate();

  const GridPolicy policy{opt.grid_n, opt.grid_span};
  const auto signal = build_state(signal_spec, policy);
  const auto probe = build_gaussian(probe_spec, default_grid(probe_spec, opt.grid_n));
  const auto p = homodyne_distribution(signal, probe, opt.phi,
                                       default_outcome_grid(signal, probe, opt.phi, opt.grid_n));
  {
    auto f = ctx.open("homodyne.csv");
    f << "x0,p\n";
    for (std::size_t k = 0; k < p.size(); ++k) write_row(f, {p.grid()[k], p[k]});
  }

  std::vector<double> outcomes;
  json summary;
  if (request.x0) {
    outcomes.push_back(*request.x0);
  } else {
    outcomes = sample_outcomes(p, request.samples, opt.seed);
    {
      auto f = ctx.open("samples.csv");
      f << "index,x0\n";
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        f << i << ',' << format_number(outcomes[i]) << '\n';
      }
    }
    double mean = 0.0;
    for (double x : outcomes) mean += x;
    mean /= static_cast<double>(outcomes.size());
    double var = 0.0;
    for (double x : outcomes) var += (x - mean) * (x - mean);
    var /= static_cast<double>(outcomes.size());
    summary["samples"] = json{{"count", outcomes.size()}, {"mean", mean}, {"variance", var}, {"file", "samples.csv"}};
  }

  json cond = json::array();
  const std::size_t n_cond = std::min(outcomes.size(), opt.max_conditional);
  for (std::size_t i = 0; i < n_cond; ++i) {
    const double x0 = outcomes[i];
    const auto outcome = make_outcome(x0, opt.phi, outcome_density(signal, probe, opt.phi, x0));
    const auto psi = conditional_output(signal, probe, opt.phi, x0);
    const auto rho = density(psi);
    std::ostringstream name;
    name << "conditional_" << std::setw(4) << std::setfill('0') << i << ".csv";
    {
      auto f = ctx.open(name.str());
      f << "x,density,re,im\n";
      for (std::size_t k = 0; k < psi.size(); ++k) {
        write_row(f, {psi.grid()[k], rho[k], psi[k].real(), psi[k].imag()});
      }
    }
    cond.push_back(json{{"x0", outcome.x0},
                        {"raw_X", outcome.raw_X},
                        {"density_at_x0", outcome.density_at_x0},
                        {"norm", psi.norm()},
                        {"mean", rho.mean()},
                        {"variance", rho.variance()},
                        {"overlap_sq_with_signal", std::norm(overlap(signal, psi))},
                        {"file", name.str()}});
  }

  const auto ps = density(signal);
  summary["phi"] = opt.phi;
  summary["transmittivity"] = std::cos(opt.phi) * std::cos(opt.phi);
  summary["squeeze_factor"] = std::cos(opt.phi);
  summary["feedback_gain"] = std::sin(opt.phi) * std::tan(opt.phi);
  summary["signal"] = json{{"spec", signal_spec.to_string()}, {"norm", signal.norm()}, {"grid", grid_json(signal.grid())}};
  summary["signal"].update(moments(ps));
  summary["probe"] = json{{"variance", opt.probe_var}, {"norm", probe.norm()}, {"grid", grid_json(probe.grid())}};
  summary["homodyne"] = moments(p);
  summary["homodyne"]["file"] = "homodyne.csv";
  summary["conditional_outputs"] = cond;
  ctx.write_json("summary.json", summary);

  const json config{{"phi", opt.phi},         {"probe_variance", opt.probe_var}, {"signal", opt.signal},
                    {"outcome", opt.outcome}, {"grid_n", opt.grid_n},            {"grid_span", opt.grid_span},
                    {"seed", opt.seed}};
  write_manifest(ctx, "chain", args, config, opt.seed);
  ctx.log << "chain: wrote " << ctx.outputs.size() << " files to " << ctx.out_dir.string() << '\n';
  return kSuccess;
}

int cmd_sweep(const SweepOptions& opt, RunContext& ctx, const std::vector<std::string>& args) {
  if (!(opt.x_min > 0.0) || !(opt.x_max >= opt.x_min)) {
    throw Error(ErrorKind::InvalidBracket, "sweep needs 0 < x-min <= x-max");
  }
  std::vector<double> xs(opt.steps);
  for (std::size_t i = 0; i < opt.steps; ++i) {
    xs[i] = opt.steps == 1 ? opt.x_min
                           : opt.x_min + (opt.x_max - opt.x_min) * static_cast<double>(i) /
                                             static_cast<double>(opt.steps - 1);
  }
  std::vector<FidelityPair> rows;
  if (opt.mode == "closed") {
    for (double x : xs) rows.push_back(trade_off(x));
  } else {
    validate_phase(opt.phi);
    const auto signal = build_state(parse_state_spec(opt.signal), GridPolicy{opt.grid_n, 0.0});
    rows = parallel_map(xs.size(), threads_from_env(),
                        [&](std::size_t i) { return numeric_trade_off(signal, opt.phi, xs[i]); });
  }
  {
    auto f = ctx.open("sweep.csv");
    f << "x,F,G,F_plus_G\n";
    for (std::size_t i = 0; i < xs.size(); ++i) write_row(f, {xs[i], rows[i].F, rows[i].G, rows[i].sum()});
  }
  const json config{{"mode", opt.mode}, {"x_min", opt.x_min}, {"x_max", opt.x_max}, {"steps", opt.steps},
                    {"signal", opt.signal}, {"phi", opt.phi}, {"grid_n", opt.grid_n}};
  write_manifest(ctx, "sweep", args, config, 0);
  ctx.log << "sweep: " << xs.size() << " rows (" << opt.mode << ")\n";
  return kSuccess;
}

int cmd_optimize(const OptimizeOptions& opt, RunContext& ctx, const std::vector<std::string>& args) {
  TradeOffReport report;
  double sigma_s = 0.0;
  if (opt.mode == "closed") {
    report = optimize_closed(opt.tol, opt.x_lo, opt.x_hi);
    const auto spec = parse_state_spec(opt.signal);
    if (opt.sigma_probe && spec.kind != StateSpec::Kind::File) sigma_s = std::sqrt(spec.second);
  } else {
    const auto signal = build_state(parse_state_spec(opt.signal), GridPolicy{opt.grid_n, 0.0});
    report = optimize_numeric(signal, opt.phi, opt.tol, opt.x_lo, opt.x_hi, threads_from_env());
    sigma_s = std::sqrt(density(signal).variance());
  }
  json doc{{"mode", opt.mode},
           {"x_m", report.x_m},
           {"F_at_xm", report.F_at_xm},
           {"G_at_xm", report.G_at_xm},
           {"F_plus_G_at_xm", report.F_at_xm + report.G_at_xm},
           {"x_e", report.x_e},
           {"F_at_xe", report.F_at_xe},
           {"G_at_xe", report.G_at_xe},
           {"evaluations", report.evaluations},
           {"tolerance", report.tolerance},
           {"multimodal_warning", report.multimodal}};
  if (opt.mode == "numeric") doc["phi"] = opt.phi;
  if (opt.sigma_probe) {
    if (!(sigma_s > 0.0)) throw Error(ErrorKind::InvalidArgument, "--sigma-probe needs a signal with known width");
    doc["sigma_signal"] = sigma_s;
    doc["sigma_probe"] = *opt.sigma_probe;
    doc["tuned_phi"] = tune_phase(sigma_s, *opt.sigma_probe, report.x_m);
  }
  if (report.multimodal) ctx.log << "warning: coarse scan found more than one local maximum of F+G\n";
  ctx.write_json("optimize.json", doc);
  json config{{"mode", opt.mode}, {"signal", opt.signal}, {"phi", opt.phi}, {"tol", opt.tol},
              {"x_lo", opt.x_lo}, {"x_hi", opt.x_hi},     {"grid_n", opt.grid_n}};
  if (opt.sigma_probe) config["sigma_probe"] = *opt.sigma_probe;
  write_manifest(ctx, "optimize", args, config, 0);
  ctx.log << "optimize: x_m=" << format_number(report.x_m) << " x_e=" << format_number(report.x_e) << '\n';
  return kSuccess;
}

int cmd_validate(const std::string& suite, RunContext& ctx, const std::vector<std::string>& args) {
  std::vector<CheckResult> checks;
  if (suite == "limits" || suite == "all") {
    auto more = validate_limits();
    checks.insert(checks.end(), more.begin(), more.end());
  }
  if (suite == "pipeline" || suite == "all") {
    auto more = validate_pipeline();
    checks.insert(checks.end(), more.begin(), more.end());
  }
  bool all_pass = true;
  json items = json::array();
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    items.push_back(json{{"suite", c.suite},
                         {"name", c.name},
                         {"pass", c.pass},
                         {"measured", c.measured},
                         {"threshold", c.threshold},
                         {"detail", c.detail}});
    ctx.log << (c.pass ? "[PASS] " : "[FAIL] ") << c.suite << '/' << c.name << " measured="
            << format_number(c.measured) << " threshold=" << format_number(c.threshold) << '\n';
  }
  ctx.write_json("validate.json", json{{"suite", suite}, {"all_pass", all_pass}, {"checks", items}});
  write_manifest(ctx, "validate", args, json{{"suite", suite}}, 0);
  return all_pass ? kSuccess : kValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for interferometric QND measurements of a field quadrature"};
  app.require_subcommand(1);
  std::string out_dir = ".";

  ChainOptions chain;
  auto* chain_cmd = app.add_subcommand("chain", "Run the measurement chain for a signal and squeezed probe");
  chain_cmd->add_option("--phi", chain.phi, "Interferometer phase in radians, in (0, pi/2)")->required();
  chain_cmd->add_option("--probe-var", chain.probe_var, "Probe quadrature variance (vacuum = 0.25)");
  chain_cmd->add_option("--signal", chain.signal, "gaussian:<mean>,<var> | cat:<sep>,<var> | file:<path>");
  chain_cmd->add_option("--outcome", chain.outcome, "Conditioning outcome x0, or sample:<n>");
  chain_cmd->add_option("--seed", chain.seed, "Seed for sampled outcomes");
  chain_cmd->add_option("--grid-n", chain.grid_n, "Grid points")->check(CLI::Range(16, 1 << 20));
  chain_cmd->add_option("--grid-span", chain.grid_span, "Signal grid half-width (0 = automatic)")
      ->check(CLI::NonNegativeNumber);
  chain_cmd->add_option("--max-conditional", chain.max_conditional,
                        "Conditional-output CSVs written for sampled outcomes");
  chain_cmd->add_option("--out", out_dir, "Output directory");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate F and G against the trade-off parameter x");
  sweep_cmd->add_option("--x-min", sweep.x_min, "Smallest x")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--x-max", sweep.x_max, "Largest x")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--steps", sweep.steps, "Number of rows")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--mode", sweep.mode, "closed | numeric")->check(CLI::IsMember({"closed", "numeric"}));
  sweep_cmd->add_option("--signal", sweep.signal, "Signal state for numeric mode");
  sweep_cmd->add_option("--phi", sweep.phi, "Interferometer phase for numeric mode");
  sweep_cmd->add_option("--grid-n", sweep.grid_n, "Grid points for numeric mode")->check(CLI::Range(16, 1 << 20));
  sweep_cmd->add_option("--out", out_dir, "Output directory");

  OptimizeOptions optimize;
  auto* opt_cmd = app.add_subcommand("optimize", "Locate the F+G maximum and the F=G crossing");
  opt_cmd->add_option("--mode", optimize.mode, "closed | numeric")->check(CLI::IsMember({"closed", "numeric"}));
  opt_cmd->add_option("--signal", optimize.signal, "Signal state");
  opt_cmd->add_option("--phi", optimize.phi, "Interferometer phase for numeric mode");
  opt_cmd->add_option("--tol", optimize.tol, "Optimizer tolerance")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--x-lo", optimize.x_lo, "Lower end of the search bracket");
  opt_cmd->add_option("--x-hi", optimize.x_hi, "Upper end of the search bracket");
  opt_cmd->add_option("--sigma-probe", optimize.sigma_probe, "Probe width; reports the phase that realizes x_m")
      ->check(CLI::PositiveNumber);
  opt_cmd->add_option("--grid-n", optimize.grid_n, "Grid points for numeric mode")->check(CLI::Range(16, 1 << 20));
  opt_cmd->add_option("--out", out_dir, "Output directory");

  std::string suite = "all";
  auto* val_cmd = app.add_subcommand("validate", "Run the limit and pipeline consistency checks");
  val_cmd->add_option("--suite", suite, "limits | pipeline | all")->check(CLI::IsMember({"limits", "pipeline", "all"}));
  val_cmd->add_option("--out", out_dir, "Output directory");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    RunContext ctx{out_dir, {}, out};
    fs::create_directories(ctx.out_dir);
    if (chain_cmd->parsed()) return cmd_chain(chain, ctx, args);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep, ctx, args);
    if (opt_cmd->parsed()) return cmd_optimize(optimize, ctx, args);
    return cmd_validate(suite, ctx, args);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::Parse ? kUsageError : kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
}

}  // namespace qnd::cli
