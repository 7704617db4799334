#include "qwalk/cli.hpp"

#include "qwalk/bands.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/experiments.hpp"
#include "qwalk/io.hpp"
#include "qwalk/sampling.hpp"
#include "qwalk/ssh.hpp"
#include "qwalk/walk.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

namespace qwalk {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, std::string> &command_help() {
  static const std::map<std::string, std::string> help = {
      {"evolve", "n-step walk from site 0; dumps amplitudes and P(m)"},
      {"bands", "per-k table of E, V and the Bloch vector n"},
      {"winding", "winding number of the Bloch vector at fixed delta"},
      {"spreading", "L(delta) by quadrature, closed form and residues"},
      {"sweep-delta", "finite-n moments against the asymptotes over a delta grid"},
      {"sweep-coin", "finite-n moments over meridian coin states at fixed delta"},
      {"sweep-ssh", "SSH M2/tau^2 against the spreading coefficient over a t' grid"},
      {"ssh-bands", "per-k table of the SSH bands"},
      {"detect-kink", "slope discontinuities of a sweep column or closed-form curve"},
  };
  return help;
}

Grid grid_from(const RunConfig &c, const std::string &prefix) {
  const double start = c.number(prefix + "-start");
  const double stop = c.number(prefix + "-stop");
  if (!(start < stop)) {
    throw validation_error(prefix + "-start must be below " + prefix + "-stop");
  }
  return Grid::stepped(start, stop, c.number(prefix + "-step"));
}

double or_nan(const std::optional<double> &v) { return v.value_or(nan); }

Table evolve_table(const RunConfig &c) {
  const StepParams params(c.number("delta"), c.number("q"));
  const auto steps = c.integer("n");
  const auto state = evolve_final(LatticeState::localized(0, c.coin("coin")), params, steps);
  const auto dist = distribution(state);
  const auto shots = c.integer("shots");
  std::optional<SampleCounts> counts;
  if (shots > 0) counts = sample_counts(dist, shots, c.unsigned_integer("seed"));

  Table t{{"m", "P", "aL_re", "aL_im", "aR_re", "aR_im"}, {}};
  if (counts) t.columns.push_back("counts");
  for (std::int64_t m = state.min_site(); m <= state.max_site(); ++m) {
    const Spinor2d a = state.at(m);
    std::vector<double> row = {static_cast<double>(m), dist.at(m), a(0).real(), a(0).imag(),
                               a(1).real(), a(1).imag()};
    if (counts) row.push_back(static_cast<double>(counts->at(m)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table bands_table(const RunConfig &c) {
  const double delta = c.number("delta");
  const auto grid = c.integer("grid");
  Table t{{"k", "E", "V", "nx", "ny", "nz", "N"}, {}};
  for (std::int64_t j = 0; j < grid; ++j) {
    const double k = -pi + 2 * pi * static_cast<double>(j) / static_cast<double>(grid);
    const auto p = band_point(delta, k);
    const Vector3r n = p.n.value_or(Vector3r::Constant(nan));
    t.rows.push_back({k, p.energy, or_nan(p.velocity), n.x(), n.y(), n.z(), p.normalization});
  }
  return t;
}

Table winding_table(const RunConfig &c) {
  const double delta = c.number("delta");
  const auto w = winding_number(delta, static_cast<int>(c.integer("grid")));
  return {{"delta", "winding", "residual", "max_axis_projection"},
          {{delta, static_cast<double>(w.winding), w.residual, w.max_axis_projection}}};
}

Table spreading_table(const RunConfig &c, std::ostream &err) {
  const double delta = c.number("delta");
  const double quad = spreading_coefficient_numeric(delta, static_cast<int>(c.integer("grid"))).value;
  const double closed = spreading_coefficient_closed(delta).value;
  double residue = nan;
  double discrepancy = nan;
  try {
    const auto report = residue_oracle(delta);
    residue = report.total.real();
    discrepancy = report.max_discrepancy;
  } catch (const validation_error &e) {
    err << "note: residue method skipped: " << e.what() << '\n';
  }
  return {{"delta", "L_quadrature", "L_closed", "L_residue", "residue_max_discrepancy"},
          {{delta, quad, closed, residue, discrepancy}}};
}

SweepConfig sweep_config(const RunConfig &c, SweepKind kind) {
  SweepConfig s;
  s.kind = kind;
  s.shots = c.integer("shots");
  s.seed = c.unsigned_integer("seed");
  s.threads = static_cast<int>(c.integer("threads"));
  switch (kind) {
  case SweepKind::delta_sweep:
    s.grid = grid_from(c, "delta");
    s.steps = c.integer("n");
    s.coin = c.coin("coin");
    break;
  case SweepKind::coin_sweep:
    s.grid = grid_from(c, "theta");
    s.steps = c.integer("n");
    s.delta = c.number("delta");
    break;
  case SweepKind::ssh_sweep:
    s.grid = grid_from(c, "tprime");
    s.t = c.number("t");
    s.tau = c.number("tau");
    s.coin = c.coin("chi0");
    break;
  case SweepKind::convergence:
    break;
  }
  return s;
}

Table ssh_bands_table(const RunConfig &c) {
  const SSHParams params(c.number("t"), c.number("tprime"));
  const auto grid = c.integer("grid");
  Table t{{"k", "E", "V", "nx", "ny", "nz", "degenerate"}, {}};
  for (std::int64_t j = 0; j < grid; ++j) {
    const double k = -pi + 2 * pi * static_cast<double>(j) / static_cast<double>(grid);
    const auto p = ssh_band(params, k);
    const Vector3r n = p.n.value_or(Vector3r::Constant(nan));
    t.rows.push_back({k, p.energy, or_nan(p.velocity), n.x(), n.y(), n.z(), p.degenerate ? 1.0 : 0.0});
  }
  return t;
}

Table kink_table(const RunConfig &c) {
  std::vector<double> x;
  std::vector<double> y;
  const std::string input = c.text("input");
  if (!input.empty()) {
    const Table in = read_csv_file(input);
    if (in.columns.empty()) throw validation_error("input table has no columns");
    x = in.column(in.columns.front());
    y = in.column(c.text("column"));
  } else if (c.text("model") == "qw") {
    x = grid_from(c, "delta").values();
    for (double d : x) y.push_back(spreading_coefficient_closed(d).value);
  } else {
    x = grid_from(c, "tprime").values();
    for (double tp : x) y.push_back(ssh_L(SSHParams(c.number("t"), tp), SpreadingMethod::closed_form).value);
  }
  Table t{{"kink"}, {}};
  for (double k : detect_transition(x, y, c.optional_number("threshold"))) t.rows.push_back({k});
  return t;
}

Table run_command(const RunConfig &c, std::ostream &err) {
  const std::string &cmd = c.command;
  if (cmd == "evolve") return evolve_table(c);
  if (cmd == "bands") return bands_table(c);
  if (cmd == "winding") return winding_table(c);
  if (cmd == "spreading") return spreading_table(c, err);
  if (cmd == "ssh-bands") return ssh_bands_table(c);
  if (cmd == "detect-kink") return kink_table(c);
  const SweepKind kind = cmd == "sweep-delta"  ? SweepKind::delta_sweep
                         : cmd == "sweep-coin" ? SweepKind::coin_sweep
                                               : SweepKind::ssh_sweep;
  const SweepConfig s = sweep_config(c, kind);
  return sweep_table(s, run_sweep(s));
}

std::string output_path(const RunConfig &c) {
  const std::string path = c.text("output");
  if (!path.empty()) return path;
  if (const char *dir = std::getenv("QWALK_OUTPUT_DIR"); dir && *dir) {
    std::string d = dir;
    if (d.back() != '/') d += '/';
    return d + c.command + (c.format() == OutputFormat::json ? ".json" : ".csv");
  }
  return {};
}

nlohmann::ordered_json read_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::ordered_json::parse(buf.str());
  } catch (const nlohmann::json::parse_error &e) {
    throw validation_error("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Topological quantum walk and SSH chain simulator", "qwalk"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  struct Bound {
    CLI::App *sub;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option *> options;
    std::string config_path;
    bool print_config = false;
  };
  std::map<std::string, Bound> bound;
  for (const auto &name : command_names()) {
    Bound &b = bound[name];
    b.sub = app.add_subcommand(name, command_help().at(name));
    for (const auto &spec : command_keys(name)) {
      b.options[spec.name] = b.sub->add_option("--" + spec.name, b.raw[spec.name], spec.help);
    }
    b.sub->add_option("--config", b.config_path, "JSON file of key/value settings");
    b.sub->add_flag("--print-config", b.print_config, "print the resolved configuration and exit");
  }

  if (args.empty()) {
    err << app.help();
    return exit_validation;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return exit_validation;
  }

  try {
    for (auto &[name, b] : bound) {
      if (!b.sub->parsed()) continue;
      std::map<std::string, std::string> flags;
      for (const auto &[key, opt] : b.options) {
        if (opt->count() > 0) flags[key] = b.raw[key];
      }
      const auto file = b.config_path.empty() ? nlohmann::ordered_json() : read_config_file(b.config_path);
      const RunConfig config = parse_config(name, file, flags);
      if (b.print_config) {
        out << config.to_json().dump(2) << '\n';
        return exit_ok;
      }
      const Table table = run_command(config, err);
      const std::string path = output_path(config);
      if (path.empty()) {
        write_table(table, config, out);
      } else {
        write_table(table, config, path);
      }
      return exit_ok;
    }
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return exit_runtime;
  }
  return exit_validation;
}

} // namespace qwalk
