#include "kgc/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kgc {

namespace {

// Shortest text that parses back to the same double.
std::string real_text(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("invalid boolean '" + value + "' for key '" + key + "'");
}

template <typename F>
auto wrap(const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid value for key '" + key + "': " + e.what());
  }
}

}  // namespace

void RunSettings::resolve() {
  train.loss.margin = margin ? *margin : default_margin(model);
  if (dim <= 0) throw ConfigError("model.dim must be positive");
  try {
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<Setting> parse_config_text(const std::string& text) {
  std::vector<Setting> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto comment = line.find_first_of("#;");
    auto body = trim(std::string_view(line).substr(0, comment));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": bad section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    out.emplace_back(section.empty() ? key : section + "." + key, value);
  }
  return out;
}

std::vector<Setting> read_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

const std::vector<std::string>& known_setting_keys() {
  static const std::vector<std::string> keys = {
      "data.dataset",
      "data.runs_root",
      "model.model",
      "model.dim",
      "model.init_seed",
      "train.epochs",
      "train.learning_rate",
      "train.optimizer",
      "train.beta1",
      "train.beta2",
      "train.epsilon",
      "train.eval_every",
      "train.seed",
      "train.variance_probe",
      "train.project_entities",
      "train.probe_batches",
      "sampler.kind",
      "sampler.batch_size",
      "sampler.restart_probability",
      "sampler.restart_target",
      "sampler.extra_neighbor_fraction",
      "sampler.max_extra_per_vertex",
      "loss.margin",
      "loss.negatives",
      "loss.adversarial_temperature",
      "loss.filtered_negatives",
      "loss.max_corruption_retries",
      "loss.neighbors_loss",
      "loss.neighbor_cap",
      "loss.normalize_by_precap",
  };
  return keys;
}

void apply_setting(RunSettings& s, const std::string& key, const std::string& value) {
  auto& t = s.train;
  auto size = [&] { return parse_number<std::size_t>(key, value); };
  auto real = [&] { return parse_number<double>(key, value); };
  auto flag = [&] { return parse_bool(key, value); };

  if (key == "data.dataset") s.dataset = value;
  else if (key == "data.runs_root") s.runs_root = value;
  else if (key == "model.model") s.model = wrap(key, [&] { return parse_model_kind(value); });
  else if (key == "model.dim") s.dim = parse_number<Index>(key, value);
  else if (key == "model.init_seed") s.init_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "train.epochs") t.epochs = size();
  else if (key == "train.learning_rate") t.learning_rate = real();
  else if (key == "train.optimizer") t.optimizer = wrap(key, [&] { return parse_optimizer_kind(value); });
  else if (key == "train.beta1") t.adam.beta1 = real();
  else if (key == "train.beta2") t.adam.beta2 = real();
  else if (key == "train.epsilon") t.adam.epsilon = real();
  else if (key == "train.eval_every") t.eval_every = size();
  else if (key == "train.seed") t.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "train.variance_probe") t.variance_probe = flag();
  else if (key == "train.project_entities") t.project_entities = flag();
  else if (key == "train.probe_batches") s.probe_batches = size();
  else if (key == "sampler.kind") t.sampler.kind = wrap(key, [&] { return parse_sampler_kind(value); });
  else if (key == "sampler.batch_size") t.sampler.batch_size = size();
  else if (key == "sampler.restart_probability") t.sampler.restart_probability = real();
  else if (key == "sampler.restart_target")
    t.sampler.restart_target = wrap(key, [&] { return parse_restart_target(value); });
  else if (key == "sampler.extra_neighbor_fraction") t.sampler.extra_neighbor_fraction = real();
  else if (key == "sampler.max_extra_per_vertex") t.sampler.max_extra_per_vertex = size();
  else if (key == "loss.margin") s.margin = real();
  else if (key == "loss.negatives") t.loss.negatives_per_positive = size();
  else if (key == "loss.adversarial_temperature") t.loss.adversarial_temperature = real();
  else if (key == "loss.filtered_negatives") t.loss.filtered_negatives = flag();
  else if (key == "loss.max_corruption_retries") t.loss.max_corruption_retries = size();
  else if (key == "loss.neighbors_loss") t.loss.neighbors_loss = flag();
  else if (key == "loss.neighbor_cap") {
    if (value == "unlimited" || value == "none") t.loss.neighbor_cap.reset();
    else t.loss.neighbor_cap = size();
  } else if (key == "loss.normalize_by_precap") t.loss.normalize_by_precap = flag();
  else throw ConfigError("unknown config key '" + key + "'");
}

std::string settings_to_text(const RunSettings& s) {
  const auto& t = s.train;
  std::ostringstream out;
  out << std::boolalpha;
  out << "[data]\ndataset = " << s.dataset << "\nruns_root = " << s.runs_root.string() << "\n\n";
  out << "[model]\nmodel = " << model_name(s.model) << "\ndim = " << s.dim
      << "\ninit_seed = " << s.init_seed << "\n\n";
  out << "[train]\nepochs = " << t.epochs << "\nlearning_rate = " << real_text(t.learning_rate)
      << "\noptimizer = " << optimizer_name(t.optimizer) << "\nbeta1 = " << real_text(t.adam.beta1)
      << "\nbeta2 = " << real_text(t.adam.beta2) << "\nepsilon = " << real_text(t.adam.epsilon)
      << "\neval_every = " << t.eval_every << "\nseed = " << t.seed
      << "\nvariance_probe = " << t.variance_probe << "\nproject_entities = " << t.project_entities
      << "\nprobe_batches = " << s.probe_batches
      << "\n\n";
  out << "[sampler]\nkind = " << sampler_name(t.sampler.kind)
      << "\nbatch_size = " << t.sampler.batch_size
      << "\nrestart_probability = " << real_text(t.sampler.restart_probability)
      << "\nrestart_target = " << restart_target_name(t.sampler.restart_target)
      << "\nextra_neighbor_fraction = " << real_text(t.sampler.extra_neighbor_fraction)
      << "\nmax_extra_per_vertex = " << t.sampler.max_extra_per_vertex << "\n\n";
  out << "[loss]\nmargin = " << real_text(t.loss.margin) << "\nnegatives = " << t.loss.negatives_per_positive
      << "\nadversarial_temperature = " << real_text(t.loss.adversarial_temperature)
      << "\nfiltered_negatives = " << t.loss.filtered_negatives
      << "\nmax_corruption_retries = " << t.loss.max_corruption_retries
      << "\nneighbors_loss = " << t.loss.neighbors_loss << "\nneighbor_cap = "
      << (t.loss.neighbor_cap ? std::to_string(*t.loss.neighbor_cap) : std::string("unlimited"))
      << "\nnormalize_by_precap = " << t.loss.normalize_by_precap << "\n";
  return out.str();
}

DatasetFingerprint fingerprint_dataset(const std::filesystem::path& directory) {
  DatasetFingerprint fp;
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char* name : {"train.txt", "valid.txt", "test.txt"}) {
    auto file = directory / name;
    std::error_code ec;
    auto size = std::filesystem::file_size(file, ec);
    if (ec) throw DataError("missing dataset file: " + file.string());
    fp.file_sizes.emplace_back(name, size);
    std::ifstream in(file, std::ios::binary);
    char buffer[1 << 16];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
      for (std::streamsize i = 0; i < in.gcount(); ++i) {
        hash ^= static_cast<unsigned char>(buffer[i]);
        hash *= 0x100000001b3ULL;
      }
    }
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << hash;
  fp.content_hash = hex.str();
  return fp;
}

std::filesystem::path resolve_dataset_path(const std::string& dataset) {
  std::filesystem::path direct(dataset);
  if (std::filesystem::is_directory(direct)) return direct;
  if (const char* root = std::getenv("KGC_DATA_ROOT")) {
    auto candidate = std::filesystem::path(root) / dataset;
    if (std::filesystem::is_directory(candidate)) return candidate;
  }
  throw DataError("dataset '" + dataset + "' not found (checked path and $KGC_DATA_ROOT)");
}

}  // namespace kgc
