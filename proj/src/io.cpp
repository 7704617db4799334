#include "qwalk/io.hpp"

#include "qwalk/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace qwalk {

namespace {

using json = nlohmann::ordered_json;
using Kind = KeySpec::Kind;

constexpr double pi = std::numbers::pi;
constexpr double big = 1e9;

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5g", v);
  return buf;
}

KeySpec angle(std::string name, double fallback, double lo, double hi, bool lo_open = false) {
  return {std::move(name), Kind::angle, fallback, lo, hi, lo_open};
}
KeySpec real(std::string name, double fallback, double lo, double hi, bool lo_open = false) {
  return {std::move(name), Kind::real, fallback, lo, hi, lo_open};
}
KeySpec integer(std::string name, std::int64_t fallback, double lo, double hi) {
  return {std::move(name), Kind::integer, fallback, lo, hi};
}
KeySpec coin(std::string name) {
  return {std::move(name), Kind::coin, json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0})})};
}

std::vector<KeySpec> with_common(std::vector<KeySpec> keys, bool sampled, bool threaded) {
  if (sampled) {
    keys.push_back(integer("shots", 0, 0, big));
    keys.push_back({"seed", Kind::seed, std::uint64_t{0}});
  }
  if (threaded) keys.push_back(integer("threads", 1, 0, 1024));
  keys.push_back({"output", Kind::text, ""});
  keys.push_back({"format", Kind::format, "csv", 0, 0, false, {"csv", "json"}});
  return keys;
}

const std::map<std::string, std::vector<KeySpec>> &registry() {
  static const std::map<std::string, std::vector<KeySpec>> table = [] {
    std::map<std::string, std::vector<KeySpec>> r;
    r["evolve"] = with_common({angle("delta", pi, 0, 2 * pi), real("q", 0.5, 0.5, 64),
                               integer("n", 6, 0, 100000), coin("coin")},
                              true, false);
    r["bands"] = with_common({angle("delta", pi, 0, 2 * pi), integer("grid", 512, 2, 1e7)}, false, false);
    r["winding"] = with_common({angle("delta", pi, 0, 2 * pi), integer("grid", 1024, 64, 1e7)}, false, false);
    r["spreading"] =
        with_common({angle("delta", pi, 0, 2 * pi), integer("grid", 4096, 256, 1e8)}, false, false);
    r["sweep-delta"] = with_common({integer("n", 6, 1, 100000), coin("coin"),
                                    angle("delta-start", 0, 0, 2 * pi),
                                    angle("delta-stop", 2 * pi, 0, 2 * pi),
                                    angle("delta-step", pi / 16, 0, 2 * pi, true)},
                                   true, true);
    r["sweep-coin"] = with_common({integer("n", 6, 1, 100000), angle("delta", pi, 0, 2 * pi),
                                   angle("theta-start", 0, 0, pi), angle("theta-stop", pi, 0, pi),
                                   angle("theta-step", pi / 22, 0, pi, true)},
                                  true, true);
    r["sweep-ssh"] = with_common({real("t", 1, 0, 1e6), real("tau", 50, 0, 1e6, true),
                                  real("tprime-start", 0, 0, 1e6), real("tprime-stop", 2, 0, 1e6),
                                  real("tprime-step", 0.08, 0, 1e6, true), coin("chi0")},
                                 true, true);
    r["ssh-bands"] = with_common({real("t", 1, 0, 1e6), real("tprime", 1.5, 0, 1e6),
                                  integer("grid", 512, 2, 1e7)},
                                 false, false);
    r["detect-kink"] = with_common(
        {{"input", Kind::text, ""},
         {"column", Kind::text, "L_closed"},
         {"model", Kind::choice, "qw", 0, 0, false, {"qw", "ssh"}},
         {"threshold", Kind::optional_real, nullptr, 0, big},
         angle("delta-start", 0, 0, 2 * pi), angle("delta-stop", 2 * pi, 0, 2 * pi),
         angle("delta-step", pi / 128, 0, 2 * pi, true), real("t", 1, 0, 1e6),
         real("tprime-start", 0, 0, 1e6), real("tprime-stop", 2, 0, 1e6),
         real("tprime-step", 0.02, 0, 1e6, true)},
        false, false);
    return r;
  }();
  return table;
}

std::string domain_text(const KeySpec &spec) {
  return std::string(spec.lo_open ? "(" : "[") + short_num(spec.lo) + ", " + short_num(spec.hi) + "]";
}

void check_range(const KeySpec &spec, double v) {
  const bool below = spec.lo_open ? !(v > spec.lo) : !(v >= spec.lo);
  if (!std::isfinite(v) || below || v > spec.hi) {
    throw validation_error(spec.name + " must lie in " + domain_text(spec));
  }
}

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Whole-string strtod; nullopt if anything is left over.
std::optional<double> to_double(const std::string &s) {
  if (s.empty()) return std::nullopt;
  char *end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

json coin_json(const CoinState &c) {
  return json::array({json::array({c.alpha().real(), c.alpha().imag()}),
                      json::array({c.beta().real(), c.beta().imag()})});
}

CoinState coin_from_json(const json &v, const std::string &key) {
  try {
    if (v.is_string()) return parse_coin(v.get<std::string>());
    if (v.is_array() && v.size() == 2) {
      Complex<double> z[2];
      for (int i = 0; i < 2; ++i) {
        const json &e = v[static_cast<std::size_t>(i)];
        if (e.is_number()) {
          z[i] = e.get<double>();
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
          z[i] = {e[0].get<double>(), e[1].get<double>()};
        } else {
          throw validation_error("bad entry");
        }
      }
      // Already-normalized input is kept bit for bit so printed configs round-trip.
      const double norm = std::norm(z[0]) + std::norm(z[1]);
      if (std::abs(norm - 1.0) <= state_tolerance) return CoinState(z[0], z[1]);
      return CoinState::normalized(z[0], z[1]);
    }
  } catch (const validation_error &) {
  }
  throw validation_error(key + " must be a non-zero spinor: \"a,b\", [a, b] or [[re, im], [re, im]]");
}

// Canonical JSON value for `spec` from a JSON input (file or default).
json normalize(const KeySpec &spec, const json &v) {
  switch (spec.kind) {
  case Kind::angle:
  case Kind::real: {
    double x;
    if (v.is_number()) {
      x = v.get<double>();
    } else {
      throw validation_error(spec.name + " must be a number in " + domain_text(spec));
    }
    check_range(spec, x);
    return x;
  }
  case Kind::optional_real: {
    if (v.is_null()) return nullptr;
    if (!v.is_number()) throw validation_error(spec.name + " must be a number in " + domain_text(spec));
    const double x = v.get<double>();
    check_range(spec, x);
    return x;
  }
  case Kind::integer: {
    if (!v.is_number_integer()) {
      if (v.is_number_float()) {
        const double x = v.get<double>();
        if (x == std::floor(x) && std::abs(x) < 9e15) return normalize(spec, json(static_cast<std::int64_t>(x)));
      }
      throw validation_error(spec.name + " must be an integer in " + domain_text(spec));
    }
    const auto x = v.get<std::int64_t>();
    if (static_cast<double>(x) < spec.lo || static_cast<double>(x) > spec.hi) {
      throw validation_error(spec.name + " must be an integer in " + domain_text(spec));
    }
    return x;
  }
  case Kind::seed:
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw validation_error(spec.name + " must be an integer in [0, 18446744073709551615]");
  case Kind::text:
    if (!v.is_string()) throw validation_error(spec.name + " must be a string");
    return v;
  case Kind::coin:
    return coin_json(coin_from_json(v, spec.name));
  case Kind::format:
  case Kind::choice: {
    if (v.is_string()) {
      for (const auto &c : spec.choices) {
        if (v.get<std::string>() == c) return v;
      }
    }
    std::string list;
    for (const auto &c : spec.choices) list += (list.empty() ? "" : ", ") + c;
    throw validation_error(spec.name + " must be one of {" + list + "}");
  }
  }
  throw validation_error("unsupported key " + spec.name);
}

// JSON value for a raw CLI flag string.
json from_flag(const KeySpec &spec, const std::string &raw) {
  const std::string s = trim(raw);
  switch (spec.kind) {
  case Kind::angle:
    return normalize(spec, parse_angle(s));
  case Kind::real:
  case Kind::optional_real: {
    if (spec.kind == Kind::optional_real && (s == "auto" || s.empty())) return nullptr;
    const auto v = to_double(s);
    if (!v) throw validation_error(spec.name + " must be a number in " + domain_text(spec));
    return normalize(spec, *v);
  }
  case Kind::integer: {
    char *end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) {
      throw validation_error(spec.name + " must be an integer in " + domain_text(spec));
    }
    return normalize(spec, static_cast<std::int64_t>(v));
  }
  case Kind::seed: {
    char *end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || end != s.c_str() + s.size()) {
      throw validation_error(spec.name + " must be an integer in [0, 18446744073709551615]");
    }
    return normalize(spec, static_cast<std::uint64_t>(v));
  }
  case Kind::coin:
    return coin_json(parse_coin(s));
  case Kind::text:
  case Kind::format:
  case Kind::choice:
    return normalize(spec, s);
  }
  throw validation_error("unsupported key " + spec.name);
}

const KeySpec *find_key(const std::vector<KeySpec> &keys, const std::string &name) {
  for (const auto &k : keys) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::string csv_escape(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace

double RunConfig::number(const std::string &key) const { return values.at(key).get<double>(); }

std::optional<double> RunConfig::optional_number(const std::string &key) const {
  const auto &v = values.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::int64_t RunConfig::integer(const std::string &key) const {
  return values.at(key).get<std::int64_t>();
}

std::uint64_t RunConfig::unsigned_integer(const std::string &key) const {
  return values.at(key).get<std::uint64_t>();
}

std::string RunConfig::text(const std::string &key) const { return values.at(key).get<std::string>(); }

CoinState RunConfig::coin(const std::string &key) const { return coin_from_json(values.at(key), key); }

OutputFormat RunConfig::format() const {
  return text("format") == "json" ? OutputFormat::json : OutputFormat::csv;
}

json RunConfig::to_json() const {
  json out = json::object();
  out["command"] = command;
  for (const auto &[k, v] : values.items()) out[k] = v;
  return out;
}

const std::vector<std::string> &command_names() {
  static const std::vector<std::string> names = {"evolve",    "bands",       "winding",
                                                 "spreading", "sweep-delta", "sweep-coin",
                                                 "sweep-ssh", "ssh-bands",   "detect-kink"};
  return names;
}

const std::vector<KeySpec> &command_keys(const std::string &command) {
  const auto &r = registry();
  const auto it = r.find(command);
  if (it == r.end()) throw validation_error("unknown command '" + command + "'");
  return it->second;
}

double parse_angle(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(c));
  }
  const auto p = s.find("pi");
  if (p == std::string::npos) {
    const auto v = to_double(s);
    if (!v) throw validation_error("cannot read angle '" + std::string(text) + "'");
    return *v;
  }
  // [coef][*]pi[/div]
  std::string coef = s.substr(0, p);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double c = 1.0;
  if (coef == "-") {
    c = -1.0;
  } else if (!coef.empty() && coef != "+") {
    const auto v = to_double(coef);
    if (!v) throw validation_error("cannot read angle '" + std::string(text) + "'");
    c = *v;
  }
  double d = 1.0;
  const std::string rest = s.substr(p + 2);
  if (!rest.empty()) {
    const auto v = rest[0] == '/' ? to_double(rest.substr(1)) : std::nullopt;
    if (!v || *v == 0.0) throw validation_error("cannot read angle '" + std::string(text) + "'");
    d = *v;
  }
  return c * pi / d;
}

Complex<double> parse_complex(std::string_view text) {
  const std::string s = trim(text);
  const auto fail = [&]() -> Complex<double> {
    throw validation_error("cannot read complex number '" + std::string(text) + "'");
  };
  if (s.empty()) return fail();
  if (s.back() != 'i') {
    const auto v = to_double(s);
    return v ? Complex<double>(*v, 0.0) : fail();
  }
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string re_text = split == std::string::npos ? "" : body.substr(0, split);
  std::string im_text = split == std::string::npos ? body : body.substr(split);
  if (im_text.empty() || im_text == "+") im_text = "1";
  if (im_text == "-") im_text = "-1";
  const auto im = to_double(im_text);
  const auto re = re_text.empty() ? std::optional<double>(0.0) : to_double(re_text);
  if (!im || !re) return fail();
  return {*re, *im};
}

CoinState parse_coin(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
    throw validation_error("coin must be two comma-separated amplitudes, e.g. \"1,0\" or \"1,i\"");
  }
  return CoinState::normalized(parse_complex(text.substr(0, comma)), parse_complex(text.substr(comma + 1)));
}

RunConfig parse_config(const std::string &command, const json &file,
                       const std::map<std::string, std::string> &flags) {
  const auto &keys = command_keys(command);
  if (!file.is_null() && !file.is_object()) throw validation_error("config file must hold a JSON object");

  RunConfig config{command, json::object()};
  for (const auto &spec : keys) config.values[spec.name] = normalize(spec, spec.fallback);

  if (file.is_object()) {
    for (const auto &[k, v] : file.items()) {
      if (k == "command") {
        if (!v.is_string() || v.get<std::string>() != command) {
          throw validation_error("config file is for command '" + v.dump() + "', not '" + command + "'");
        }
        continue;
      }
      const KeySpec *spec = find_key(keys, k);
      if (!spec) throw validation_error("unknown key '" + k + "' for command " + command);
      config.values[k] = normalize(*spec, v);
    }
  }
  for (const auto &[k, raw] : flags) {
    const KeySpec *spec = find_key(keys, k);
    if (!spec) throw validation_error("unknown flag '--" + k + "' for command " + command);
    config.values[k] = from_flag(*spec, raw);
  }
  return config;
}

RunConfig parse_config_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw validation_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("command") || !doc["command"].is_string()) {
    throw validation_error("config document needs a string \"command\" key");
  }
  return parse_config(doc["command"].get<std::string>(), doc, {});
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_table(const Table &table, const RunConfig &config, std::ostream &out) {
  if (config.format() == OutputFormat::json) {
    json rows = json::array();
    for (const auto &row : table.rows) {
      json obj = json::object();
      for (std::size_t j = 0; j < table.columns.size(); ++j) {
        const double v = row.at(j);
        if (std::isfinite(v)) {
          obj[table.columns[j]] = v;
        } else {
          obj[table.columns[j]] = nullptr;
        }
      }
      rows.push_back(std::move(obj));
    }
    out << rows.dump(2) << '\n';
    return;
  }

  out << "# qwalk " << version << '\n';
  out << "# command: " << config.command << '\n';
  if (config.values.contains("seed")) out << "# seed: " << config.unsigned_integer("seed") << '\n';
  out << "# config: " << config.to_json().dump() << '\n';
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    out << (j ? "," : "") << csv_escape(table.columns[j]);
  }
  out << '\n';
  for (const auto &row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(row[j]);
    out << '\n';
  }
}

void write_table(const Table &table, const RunConfig &config, const std::string &path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_table(table, config, file);
  file.flush();
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

Table read_csv(std::istream &in) {
  Table table;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (!header) {
      table.columns = std::move(cells);
      header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw validation_error("CSV row has " + std::to_string(cells.size()) + " fields, header has " +
                             std::to_string(table.columns.size()));
    }
    std::vector<double> row;
    for (const auto &c : cells) {
      const auto v = to_double(c);
      if (!v) throw validation_error("CSV field '" + c + "' is not a number");
      row.push_back(*v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!header) throw validation_error("CSV input has no header line");
  return table;
}

Table read_csv_file(const std::string &path) {
  std::ifstream file(path);
  if (!file) throw validation_error("cannot open '" + path + "' for reading");
  return read_csv(file);
}

} // namespace qwalk
