#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace verity::cli {

enum class OutputFormat { Table, Json };

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTamper = 2;

/// Settings read from a flat `key=value` file. Relative paths are resolved
/// against the directory holding the file.
struct SessionConfig {
  std::string ddl;
  std::string data_dir;
  std::string ledger;
  std::size_t peers = 5;
  std::string principal = "peer0";
  OutputFormat format = OutputFormat::Table;
  std::string null_literal;
  std::string audit_log;
  /// Derives peer keys from this seed instead of the system CSPRNG.
  std::optional<std::string> peer_seed;

  /// Sidecar holding the peers' secret keys.
  std::string keys_path() const { return ledger + ".keys"; }
};

/// Parses config text. `base_dir` anchors relative paths. Throws
/// std::invalid_argument on unknown keys, malformed lines or bad values.
SessionConfig parse_config(std::istream& in, const std::string& base_dir);
SessionConfig load_config(const std::string& path);

/// Splits a script on `;` outside string literals and `--` comments. Blank
/// statements are dropped; the terminating `;` is not kept.
std::vector<std::string> split_statements(std::string_view script);

/// Entry point of the `verity` executable, with injectable streams.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace verity::cli
