#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace budgetid::cli {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string, std::vector<double>, bool>;

/// Fixed-column table written as CSV (17 significant digits, vectors joined
/// by ';') and as JSON with the same field names.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string to_csv(const Table& table);
nlohmann::ordered_json to_json(const Table& table);

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 hex digits of FNV-1a over the canonical dump of the config.
std::string config_hash(const nlohmann::json& config);

std::vector<std::string> reproduce_names();

/// Version string frozen at configure time.
const char* version();

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

/// Entry point shared by the executable and the tests. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace budgetid::cli
