#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qwalk/coin.hpp"
#include "qwalk/table.hpp"

namespace qwalk {

inline constexpr std::string_view version = "1.0.0";

enum class OutputFormat { csv, json };

/// Fully resolved settings of one CLI invocation. `values` holds every key the
/// command accepts, defaults included, in registry order.
struct RunConfig {
  std::string command;
  nlohmann::ordered_json values;

  double number(const std::string &key) const;
  std::optional<double> optional_number(const std::string &key) const;
  std::int64_t integer(const std::string &key) const;
  std::uint64_t unsigned_integer(const std::string &key) const;
  std::string text(const std::string &key) const;
  CoinState coin(const std::string &key) const;
  OutputFormat format() const;

  /// {"command": …, key: value, …}; parse_config_document() inverts it.
  nlohmann::ordered_json to_json() const;

  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

/// One accepted key of a command.
struct KeySpec {
  enum class Kind { angle, real, integer, seed, text, coin, format, choice, optional_real };
  std::string name;
  Kind kind;
  nlohmann::ordered_json fallback;
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  std::vector<std::string> choices = {};
  std::string help = {};
};

const std::vector<std::string> &command_names();

/// Keys accepted by `command`; throws validation_error for unknown commands.
const std::vector<KeySpec> &command_keys(const std::string &command);

/// Radians from a number or the sugar "pi", "pi/2", "3pi/4", "3*pi/2", "-pi/4".
double parse_angle(std::string_view text);

/// "1", "-0.5", "i", "-2i", "0.3+0.4i", "1e-3-2i".
Complex<double> parse_complex(std::string_view text);

/// "α,β" rescaled to unit norm, e.g. "1,1" or "1,i".
CoinState parse_coin(std::string_view text);

/// Defaults, then `file` (a JSON object, may be null), then `flags` (raw
/// strings). Unknown keys and out-of-domain values are rejected with a message
/// naming the key and its legal domain.
RunConfig parse_config(const std::string &command, const nlohmann::ordered_json &file,
                       const std::map<std::string, std::string> &flags);

/// A JSON document carrying its own "command" key, as written by --print-config.
RunConfig parse_config_document(std::string_view text);

/// 17 significant digits, so the value re-parses exactly; NaN as "nan".
std::string format_double(double value);

/// CSV: comment block (version, command, seed, resolved config), one header
/// line, then rows. JSON: an array of objects keyed by column name.
void write_table(const Table &table, const RunConfig &config, std::ostream &out);

/// Writes to `path`, creating nothing but the file itself. I/O failures are
/// reported as std::runtime_error naming the path.
void write_table(const Table &table, const RunConfig &config, const std::string &path);

/// Reads CSV produced by write_table; `#` lines are skipped.
Table read_csv(std::istream &in);
Table read_csv_file(const std::string &path);

} // namespace qwalk
