#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "fbq/config.hpp"

namespace fbq {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // a hard inequality assertion failed, or an unexpected error
  kExitConfig = 2,
  kExitBlowUp = 3,
  kExitUnresolved = 4,
};

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Files produced by one run, keyed by name. Written in one pass together
/// with a MANIFEST of "sha256  name" lines in name order.
using Artifacts = std::map<std::string, std::string>;

std::string manifest_text(const Artifacts& files);
void write_artifacts(const std::string& directory, const Artifacts& files);

/// Dispatches config.command (config must be finalized), writes every
/// artifact plus config.ini and MANIFEST to config.output_dir, prints a short
/// report to `console`, and returns the exit code. Errors are recorded in
/// error.json and echoed to `errors` as one JSON line.
int run(const RunConfig& config, std::ostream& console, std::ostream& errors);

/// Machine-readable error record.
std::string error_record(int exit_code, const std::string& kind, const std::string& message);

}  // namespace fbq
