#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xdof::cli {

enum class Mode { kSchedule, kCsitTable, kSimulate, kSweep, kVerify };
enum class OutputFormat { kJson, kCsv, kText };

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitInvalidConfig = 2;

/// Rejected configuration; `field` names the offending setting.
class config_error : public std::invalid_argument {
 public:
  config_error(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  Mode mode = Mode::kSchedule;
  std::optional<std::size_t> transmitters;  // M
  std::optional<std::size_t> receivers;     // N
  std::vector<std::uint64_t> seeds;
  std::vector<double> snr_db;
  bool noise = false;
  std::optional<bool> normalize;
  std::optional<std::string> out;
  std::optional<OutputFormat> format;
  std::size_t grid = 6;
};

/// Fills defaults and checks mode-specific fields; throws config_error.
ExperimentConfig validated(ExperimentConfig config);

/// Merges a JSON config document into `config` (fields present only).
void apply_config_file(ExperimentConfig& config, const std::string& path);

/// Executes a validated config. Returns the process exit code.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err);

}  // namespace xdof::cli
