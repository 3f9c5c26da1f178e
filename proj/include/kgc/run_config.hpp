#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kgc/scorer.hpp"
#include "kgc/trainer.hpp"

namespace kgc {

/// Unknown key or unparsable value in a config file or override.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a training run needs, with all defaults materialized.
struct RunSettings {
  std::string dataset;
  ModelKind model = ModelKind::RotatE;
  Index dim = 32;
  std::uint64_t init_seed = 0;
  TrainConfig train;
  std::optional<double> margin;  // unset: default_margin(model)
  std::size_t probe_batches = 200;
  std::filesystem::path runs_root = "runs";

  /// Fills derived values (the model-dependent margin) and validates.
  void resolve();
};

using Setting = std::pair<std::string, std::string>;

/// Parses `key = value` lines grouped under `[section]` headers into
/// `section.key` settings, in file order. `#` and `;` start comments.
std::vector<Setting> parse_config_text(const std::string& text);
std::vector<Setting> read_config_file(const std::filesystem::path& file);

/// Applies one `section.key` setting; throws ConfigError naming the key when
/// it is unknown or its value does not parse.
void apply_setting(RunSettings& settings, const std::string& key, const std::string& value);

/// Every key accepted by apply_setting.
const std::vector<std::string>& known_setting_keys();

/// Resolved configuration as `section.key = value` text, re-readable by
/// parse_config_text.
std::string settings_to_text(const RunSettings& settings);

struct DatasetFingerprint {
  std::vector<std::pair<std::string, std::uintmax_t>> file_sizes;
  std::string content_hash;  // FNV-1a 64 over the split files, hex
};

DatasetFingerprint fingerprint_dataset(const std::filesystem::path& directory);

/// Resolves a dataset argument: an existing directory is used as-is,
/// otherwise it is looked up under $KGC_DATA_ROOT.
std::filesystem::path resolve_dataset_path(const std::string& dataset);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace kgc
