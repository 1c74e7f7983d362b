#include "mcf/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "mcf/errors.hpp"
#include "mcf/io.hpp"

namespace mcf {
namespace {

RunConfig config_from(const std::string& path) {
  if (path.empty() || path == "default") return RunConfig{};
  return load_config(path);
}

void print_kv(std::ostream& out, const char* key, double v) {
  out << key << " = " << format_double(v) << '\n';
}

// 17 significant digits in scientific form with a bare exponent (1.5e-3).
std::string scientific(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  std::string s(buf, p);
  const auto e = s.find('e');
  if (e == std::string::npos) return s;
  std::string mant = s.substr(0, e), exp = s.substr(e + 1);
  std::string sign;
  if (exp[0] == '-' || exp[0] == '+') {
    if (exp[0] == '-') sign = "-";
    exp.erase(0, 1);
  }
  exp.erase(0, std::min(exp.find_first_not_of('0'), exp.size() - 1));
  return mant + "e" + sign + exp;
}

int do_params(const std::string& config, std::ostream& out) {
  const RunConfig cfg = config_from(config);
  const FlowParams p = derive_params(cfg.gamma, cfg.c, cfg.tau0, cfg.R1);
  print_kv(out, "gamma", p.gamma);
  print_kv(out, "c", p.c);
  print_kv(out, "tau0", p.tau0);
  print_kv(out, "R1", p.R1);
  out << "beta = " << scientific(p.beta) << '\n';
  out << "r1 = " << scientific(p.r1) << '\n';
  out << "r0 = " << scientific(p.r0) << '\n';
  out << "T = " << scientific(p.T) << '\n';
  return 0;
}

std::filesystem::path out_dir(const RunConfig& cfg, const std::string& flag) {
  return flag.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(flag);
}

int do_init(const std::string& config, const std::string& out_flag, std::ostream& out) {
  const RunConfig cfg = config_from(config);
  PreparedRun run = prepare_run(cfg);
  StepOptions opts;
  opts.safety = cfg.safety;
  opts.parallel = cfg.parallel;
  prepare(run.state, opts);
  const auto dir = out_dir(cfg, out_flag);
  write_snapshot(run.state, dir, 0);
  out << "snapshot = " << (dir / "cart_0.csv").string() << '\n';
  out << "snapshot = " << (dir / "cyl_0.csv").string() << '\n';
  return 0;
}

int do_run(const std::string& config, const std::string& out_flag, int snapshot_every,
           std::ostream& out) {
  RunConfig cfg = config_from(config);
  if (snapshot_every >= 0) cfg.snapshot_every = snapshot_every;
  PreparedRun run = prepare_run(cfg);
  const auto dir = out_dir(cfg, out_flag);
  std::filesystem::create_directories(dir);

  DiagnosticsSeries series(cfg.modes);
  long last_recorded = -1;
  long last_snapshot = -1;
  int snapshot_index = 0;
  auto record = [&](const FlowState& s) {
    if (s.step_count == last_recorded) return;
    series.append(record_row(s.cart, s.cyl, s.t, s.dt_last, run.record));
    last_recorded = s.step_count;
  };
  auto snapshot = [&](const FlowState& s) {
    if (s.step_count == last_snapshot) return;
    write_snapshot(s, dir, snapshot_index++);
    last_snapshot = s.step_count;
  };

  RunOptions opts;
  opts.step.safety = cfg.safety;
  opts.step.parallel = cfg.parallel;
  opts.hook_stride = 1;
  opts.hook = [&](const FlowState& s, const StepReport&) {
    if (s.step_count % cfg.series_every == 0) record(s);
    if (s.step_count == 0 || (cfg.snapshot_every > 0 && s.step_count % cfg.snapshot_every == 0))
      snapshot(s);
  };
  const RunResult result = mcf::run(run.state, run.stop, opts);
  record(run.state);
  snapshot(run.state);
  write_series(series, dir);

  out << "termination = " << to_string(result.reason) << '\n';
  out << "message = " << result.message << '\n';
  out << "steps = " << run.state.step_count << '\n';
  print_kv(out, "t", run.state.t);
  print_kv(out, "r_min", series.rows().back().r_min);
  print_kv(out, "tip_A", series.rows().back().tip_A);
  out << "snapshots = " << snapshot_index << '\n';
  out << "series = " << (dir / "series.csv").string() << '\n';
  return 0;
}

int do_analyze(const std::string& config, const std::string& out_flag, std::string series_path,
               const std::string& channel, double T_hint, std::ostream& out) {
  const RunConfig cfg = config_from(config);
  if (series_path.empty()) series_path = (out_dir(cfg, out_flag) / "series.csv").string();
  if (!(T_hint > 0.0)) T_hint = derive_params(cfg.gamma, cfg.c, cfg.tau0, cfg.R1).T;
  const DiagnosticsSeries series = read_series(series_path);
  const Channel ch = channel == "tip" ? Channel::Tip : Channel::Neck;
  const BlowupFit fit = fit_blowup(series, ch, T_hint);
  const Classification cls = classify(series, fit);
  out << "channel = " << channel << '\n';
  print_kv(out, "exponent", fit.exponent);
  print_kv(out, "T_est", fit.T_est);
  print_kv(out, "residual", fit.residual);
  print_kv(out, "t_lo", fit.t_lo);
  print_kv(out, "t_hi", fit.t_hi);
  out << "rows = " << fit.rows_used << '\n';
  print_kv(out, "q_slope", cls.slope);
  out << "class = " << to_string(cls.type) << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean curvature flow of perturbed noncompact surfaces on two overlapping patches",
               "mcfsim"};
  app.require_subcommand(1);
  std::string config = "default";
  std::string out_flag;
  int snapshot_every = -1;
  std::string series_path;
  std::string channel = "neck";
  double T_hint = 0.0;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key = value config file, or 'default'");
  };
  CLI::App* params = app.add_subcommand("params", "print the derived construction parameters");
  add_config(params);
  CLI::App* init = app.add_subcommand("init", "write the initial snapshot (index 0)");
  add_config(init);
  init->add_option("--out", out_flag, "output directory");
  CLI::App* runc = app.add_subcommand("run", "evolve and write snapshots and series.csv");
  add_config(runc);
  runc->add_option("--out", out_flag, "output directory");
  runc->add_option("--snapshot-every", snapshot_every, "steps between snapshots (0: first and last)")
      ->check(CLI::NonNegativeNumber);
  CLI::App* analyze = app.add_subcommand("analyze", "fit a blowup rate and classify a series");
  add_config(analyze);
  analyze->add_option("--out", out_flag, "directory holding series.csv");
  analyze->add_option("--series", series_path, "series file (default <out>/series.csv)");
  analyze->add_option("--channel", channel, "tip or neck")->check(CLI::IsMember({"tip", "neck"}));
  analyze->add_option("--T-hint", T_hint, "singular time guess (default: cylinder vanishing time)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*params) return do_params(config, out);
    if (*init) return do_init(config, out_flag, out);
    if (*runc) return do_run(config, out_flag, snapshot_every, out);
    if (*analyze) return do_analyze(config, out_flag, series_path, channel, T_hint, out);
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace mcf
