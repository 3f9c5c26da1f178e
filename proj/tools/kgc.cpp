// kgc: train, analyse and evaluate knowledge graph embeddings with graph-aware
// minibatch samplers.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "kgc/checkpoint.hpp"
#include "kgc/evaluation.hpp"
#include "kgc/graph.hpp"
#include "kgc/graph_stats.hpp"
#include "kgc/run_config.hpp"
#include "kgc/sampler.hpp"
#include "kgc/synthetic.hpp"
#include "kgc/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

std::string timestamp(const char* format) {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, format);
  return out.str();
}

json manifest_json(const kgc::RunSettings& settings, const fs::path& dataset_dir,
                   const std::string& started, const std::string& finished) {
  auto fp = kgc::fingerprint_dataset(dataset_dir);
  json files = json::object();
  for (const auto& [name, size] : fp.file_sizes) files[name] = size;
  return json{
      {"tool_version", kgc::kToolVersion},
      {"dataset", {{"path", fs::absolute(dataset_dir).string()},
                   {"file_sizes", files},
                   {"content_hash", fp.content_hash}}},
      {"seed", settings.train.seed},
      {"init_seed", settings.init_seed},
      {"config", kgc::settings_to_text(settings)},
      {"started_utc", started},
      {"finished_utc", finished.empty() ? json(nullptr) : json(finished)},
  };
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw kgc::DataError("cannot write " + file.string());
  out << text;
}

struct TrainArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string dataset, model, sampler, optimizer, runs_root;
  std::size_t batch_size = 0, epochs = 0, eval_every = 0, negatives = 0;
  kgc::Index dim = 0;
  double learning_rate = 0.0, adversarial_temperature = 0.0;
  std::uint64_t seed = 0;
  bool neighbors_loss = false;
  bool variance_probe = false;
};

int run_train(const TrainArgs& args, const CLI::App& cmd) {
  kgc::RunSettings settings;
  std::vector<kgc::Setting> ordered;
  if (!args.config_file.empty()) ordered = kgc::read_config_file(args.config_file);

  auto flag = [&](const char* name, const std::string& key, const std::string& value) {
    if (cmd.count(name) > 0) ordered.emplace_back(key, value);
  };
  flag("--dataset", "data.dataset", args.dataset);
  flag("--runs-root", "data.runs_root", args.runs_root);
  flag("--model", "model.model", args.model);
  flag("--dim", "model.dim", std::to_string(args.dim));
  flag("--sampler", "sampler.kind", args.sampler);
  flag("--batch-size", "sampler.batch_size", std::to_string(args.batch_size));
  flag("--epochs", "train.epochs", std::to_string(args.epochs));
  flag("--eval-every", "train.eval_every", std::to_string(args.eval_every));
  flag("--optimizer", "train.optimizer", args.optimizer);
  flag("--seed", "train.seed", std::to_string(args.seed));
  flag("--negatives", "loss.negatives", std::to_string(args.negatives));
  if (cmd.count("--lr") > 0) {
    std::ostringstream v;
    v << std::setprecision(17) << args.learning_rate;
    ordered.emplace_back("train.learning_rate", v.str());
  }
  if (cmd.count("--adversarial-temperature") > 0) {
    std::ostringstream v;
    v << std::setprecision(17) << args.adversarial_temperature;
    ordered.emplace_back("loss.adversarial_temperature", v.str());
  }
  if (args.neighbors_loss) ordered.emplace_back("loss.neighbors_loss", "true");
  if (args.variance_probe) ordered.emplace_back("train.variance_probe", "true");
  for (const auto& o : args.overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw kgc::ConfigError("override '" + o + "' is not key=value");
    ordered.emplace_back(o.substr(0, eq), o.substr(eq + 1));
  }
  for (const auto& [key, value] : ordered) kgc::apply_setting(settings, key, value);
  settings.resolve();
  if (settings.dataset.empty()) throw kgc::ConfigError("no dataset given (--dataset or data.dataset)");

  const auto dataset_dir = kgc::resolve_dataset_path(settings.dataset);
  const auto g = kgc::load_dataset(dataset_dir);

  const auto started = timestamp("%Y-%m-%dT%H:%M:%SZ");
  const fs::path run_dir =
      settings.runs_root / (fs::path(settings.dataset).filename().string() + "-" +
                            std::string(kgc::model_name(settings.model)) + "-" +
                            std::string(kgc::sampler_name(settings.train.sampler.kind)) + "-" +
                            timestamp("%Y%m%dT%H%M%SZ"));
  fs::create_directories(run_dir);
  write_text(run_dir / "manifest.json", manifest_json(settings, dataset_dir, started, "").dump(2));
  write_text(run_dir / "config.ini", kgc::settings_to_text(settings));
  kgc::write_dictionaries(g, run_dir);

  auto store = kgc::initialize<double>(static_cast<kgc::Index>(g.entity_count()),
                                       static_cast<kgc::Index>(g.relation_count()), settings.model,
                                       settings.dim, settings.init_seed);
  std::ofstream log(run_dir / "train_log.jsonl");
  std::ofstream valid_log(run_dir / "valid_metrics.jsonl");
  double best_mrr = -1.0;

  auto on_epoch = [&](const kgc::EpochRecord& record, const kgc::Store& current) {
    kgc::write_epoch_record(log, record);
    log.flush();
    std::cout << "epoch " << record.epoch << " mean_loss " << record.mean_loss << "\n";
    if (record.epoch % settings.train.eval_every != 0 && record.epoch != settings.train.epochs)
      return;
    kgc::save_checkpoint(current, run_dir / "last.ckpt");
    if (g.valid().empty()) return;
    auto m = kgc::evaluate_split(g, current, kgc::Split::Valid, kgc::Protocol::Filtered);
    std::ostringstream metrics;
    kgc::write_metrics_record(metrics, m);
    auto body = metrics.str();
    body.pop_back();
    valid_log << "{\"epoch\":" << record.epoch << ",\"metrics\":" << body << "}\n";
    valid_log.flush();
    if (m.mrr > best_mrr) {
      best_mrr = m.mrr;
      kgc::save_checkpoint(current, run_dir / "best.ckpt");
    }
  };

  try {
    kgc::train(g, store, settings.train, on_epoch);
  } catch (const kgc::NonFiniteLoss& e) {
    std::ofstream dump(run_dir / "nonfinite_batch.tsv");
    for (const auto& t : e.batch())
      dump << g.entity_label(t.subject) << '\t' << g.relation_label(t.relation) << '\t'
           << g.entity_label(t.object) << '\n';
    throw;
  }

  if (settings.train.variance_probe) {
    auto report = kgc::gradient_variance_probe(g, store, settings.train, settings.probe_batches);
    std::ofstream csv(run_dir / "variance.csv");
    kgc::write_variance_csv(csv, report);
  }
  write_text(run_dir / "manifest.json",
             manifest_json(settings, dataset_dir, started, timestamp("%Y-%m-%dT%H:%M:%SZ")).dump(2));
  std::cout << "run directory: " << run_dir.string() << "\n";
  return kOk;
}

struct StatsArgs {
  std::string dataset;
  std::vector<std::string> samplers{"sr", "rw", "rwr", "rwisg", "rwisg-n"};
  std::vector<std::size_t> batch_sizes{1024};
  std::size_t num_batches = 100;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool summary = false;
  bool epoch = false;
};

int run_stats(const StatsArgs& args) {
  const auto g = kgc::load_dataset(kgc::resolve_dataset_path(args.dataset));
  if (args.summary) {
    auto deg = kgc::degree_summary(g);
    std::cout << "entities        " << g.entity_count() << "\n"
              << "relations       " << g.relation_count() << "\n"
              << "train           " << g.train().size() << "\n"
              << "valid           " << g.valid().size() << "\n"
              << "test            " << g.test().size() << "\n"
              << std::fixed << std::setprecision(2) << "avg degree      " << deg.mean << "\n"
              << "median degree   " << deg.median << "\n"
              << "self loops      " << g.report().self_loops << "\n"
              << "cross-split dup " << g.report().cross_split_duplicates << "\n";
    std::cout.unsetf(std::ios::fixed);
    return kOk;
  }
  if (args.num_batches < 30)
    std::clog << "note: fewer than 30 batches per point; standard errors are rough\n";

  std::vector<kgc::SamplerPolicy> policies;
  for (const auto& name : args.samplers) {
    kgc::SamplerPolicy p;
    p.kind = kgc::parse_sampler_kind(name);
    p.seed = args.seed;
    policies.push_back(p);
  }
  fs::create_directories(args.out_dir);
  auto points = kgc::ed_vs_batchsize_sweep(g, policies, args.batch_sizes, args.num_batches);

  std::ofstream sweep(fs::path(args.out_dir) / "ed_sweep.csv");
  std::ofstream dist(fs::path(args.out_dir) / "degree_distribution.csv");
  if (!sweep || !dist) throw kgc::DataError("cannot write CSV files under " + args.out_dir);
  kgc::write_sweep_csv(sweep, points);
  kgc::write_distribution_csv_header(dist);
  for (const auto& p : points) kgc::write_distribution_csv_rows(dist, p.policy, p.averaged);

  std::cout << std::left << std::setw(10) << "sampler" << std::setw(12) << "batch_size"
            << std::setw(14) << "E[D]" << std::setw(12) << "std_error" << "P_D(1)\n";
  for (const auto& p : points) {
    std::cout << std::setw(10) << kgc::sampler_name(p.policy.kind) << std::setw(12)
              << p.policy.batch_size << std::setw(14) << p.expected_degree << std::setw(12)
              << p.std_error << p.averaged.probability(1) << "\n";
  }
  return kOk;
}

struct EvalArgs {
  std::string checkpoint, dataset, split = "test", protocol = "filtered", csv;
};

int run_eval(const EvalArgs& args) {
  const auto g = kgc::load_dataset(kgc::resolve_dataset_path(args.dataset));
  const auto store = kgc::load_checkpoint(args.checkpoint);
  if (store.entity_count() != static_cast<kgc::Index>(g.entity_count()) ||
      store.relation_count() != static_cast<kgc::Index>(g.relation_count())) {
    throw kgc::DataError("checkpoint has |E|=" + std::to_string(store.entity_count()) +
                         ", |R|=" + std::to_string(store.relation_count()) +
                         " but dataset has |E|=" + std::to_string(g.entity_count()) +
                         ", |R|=" + std::to_string(g.relation_count()));
  }
  auto dict = fs::path(args.checkpoint).parent_path() / "entities.tsv";
  if (fs::exists(dict) && kgc::read_dictionary(dict) != g.entity_names())
    throw kgc::DataError("entity dictionary next to the checkpoint does not match the dataset");
  auto rdict = fs::path(args.checkpoint).parent_path() / "relations.tsv";
  if (fs::exists(rdict) && kgc::read_dictionary(rdict) != g.relation_names())
    throw kgc::DataError("relation dictionary next to the checkpoint does not match the dataset");

  auto m = kgc::evaluate_split(g, store, kgc::parse_split(args.split), kgc::parse_protocol(args.protocol));
  kgc::write_metrics_record(std::cout, m);
  if (!args.csv.empty()) {
    std::ofstream out(args.csv);
    if (!out) throw kgc::DataError("cannot write " + args.csv);
    kgc::write_metrics_csv(out, std::span<const kgc::Metrics>(&m, 1));
  }
  return kOk;
}

struct VizArgs {
  std::string dataset, sampler = "rwisg", output;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
};

int run_viz(const VizArgs& args) {
  const auto g = kgc::load_dataset(kgc::resolve_dataset_path(args.dataset));
  kgc::SamplerPolicy policy;
  policy.kind = kgc::parse_sampler_kind(args.sampler);
  policy.batch_size = args.batch_size;
  policy.seed = args.seed;
  kgc::Rng rng(args.seed);
  auto batch = kgc::sample(g, policy, rng);
  std::ofstream out(args.output);
  if (!out) throw kgc::DataError("cannot write " + args.output);
  kgc::write_dot(out, g, batch);
  if (!out) throw kgc::DataError("failed writing " + args.output);
  std::cout << "wrote " << batch.size() << " triples over " << batch.vertex_set.size()
            << " entities to " << args.output << "\n";
  return kOk;
}

struct ToyArgs {
  std::string kind = "planted", output;
  std::size_t entities = 200, triples = 5000, relations = 10;
  double skew = 0.8, held_out = 0.1;
  std::uint64_t seed = 0;
};

int run_make_toy(const ToyArgs& args) {
  kgc::KnowledgeGraph g;
  if (args.kind == "planted") g = kgc::planted_toy_graph(args.entities, args.held_out, args.seed);
  else if (args.kind == "power-law")
    g = kgc::power_law_graph(args.entities, args.relations, args.triples, args.skew, args.seed);
  else throw kgc::ConfigError("unknown toy kind '" + args.kind + "' (planted|power-law)");
  kgc::write_dataset(g, args.output);
  std::cout << "wrote " << g.train().size() << "/" << g.valid().size() << "/" << g.test().size()
            << " triples to " << args.output << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge graph embedding training with graph-aware minibatch samplers"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train an embedding model");
  train->add_option("--config", train_args.config_file, "key=value config file");
  train->add_option("--dataset", train_args.dataset, "Dataset directory or name under $KGC_DATA_ROOT");
  train->add_option("--model", train_args.model, "transe | distmult | complex | rotate");
  train->add_option("--dim", train_args.dim, "Embedding dimension K");
  train->add_option("--sampler", train_args.sampler, "sr | rw | rwr | rwisg | rwisg-n");
  train->add_option("--batch-size", train_args.batch_size, "Target positives per minibatch");
  train->add_option("--epochs", train_args.epochs);
  train->add_option("--eval-every", train_args.eval_every);
  train->add_option("--lr", train_args.learning_rate, "Learning rate");
  train->add_option("--optimizer", train_args.optimizer, "sgd | adam");
  train->add_option("--negatives", train_args.negatives, "Negatives per positive");
  train->add_option("--adversarial-temperature", train_args.adversarial_temperature);
  train->add_option("--seed", train_args.seed);
  train->add_option("--runs-root", train_args.runs_root, "Parent directory for run directories");
  train->add_flag("--neighbors-loss", train_args.neighbors_loss, "Use the neighbors' loss");
  train->add_flag("--variance-probe", train_args.variance_probe,
                  "Write a gradient variance report after training");
  train->add_option("--set", train_args.overrides, "section.key=value override (repeatable)");

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Minibatch degree statistics");
  stats->add_option("--dataset", stats_args.dataset)->required();
  stats->add_option("--samplers", stats_args.samplers)->delimiter(',');
  stats->add_option("--batch-sizes", stats_args.batch_sizes)->delimiter(',');
  stats->add_option("--num-batches", stats_args.num_batches);
  stats->add_option("--seed", stats_args.seed);
  stats->add_option("--out-dir", stats_args.out_dir);
  stats->add_flag("--summary", stats_args.summary, "Print dataset properties only");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Link prediction metrics for a checkpoint");
  eval->add_option("--checkpoint", eval_args.checkpoint)->required();
  eval->add_option("--dataset", eval_args.dataset)->required();
  eval->add_option("--split", eval_args.split, "train | valid | test");
  eval->add_option("--protocol", eval_args.protocol, "raw | filtered");
  eval->add_option("--csv", eval_args.csv, "Also write metrics as CSV");

  VizArgs viz_args;
  auto* viz = app.add_subcommand("viz", "Write one sampled minibatch as a DOT graph");
  viz->add_option("--dataset", viz_args.dataset)->required();
  viz->add_option("--sampler", viz_args.sampler);
  viz->add_option("--batch-size", viz_args.batch_size);
  viz->add_option("--seed", viz_args.seed);
  viz->add_option("--output", viz_args.output)->required();

  ToyArgs toy_args;
  auto* toy = app.add_subcommand("make-toy", "Generate a synthetic dataset");
  toy->add_option("--kind", toy_args.kind, "planted | power-law");
  toy->add_option("--entities", toy_args.entities);
  toy->add_option("--triples", toy_args.triples, "power-law only");
  toy->add_option("--relations", toy_args.relations, "power-law only");
  toy->add_option("--skew", toy_args.skew, "power-law only");
  toy->add_option("--held-out", toy_args.held_out, "planted only");
  toy->add_option("--seed", toy_args.seed);
  toy->add_option("--output", toy_args.output)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return run_train(train_args, *train);
    if (*stats) return run_stats(stats_args);
    if (*eval) return run_eval(eval_args);
    if (*viz) return run_viz(viz_args);
    if (*toy) return run_make_toy(toy_args);
  } catch (const kgc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const kgc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
