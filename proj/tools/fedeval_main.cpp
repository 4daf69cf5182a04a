// Command-line front end: generate partitions, run the three evaluation
// modes, sweep skew configurations, and host coordinator/participant
// processes for socket rounds.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fedeval/baseline.hpp"
#include "fedeval/experiment.hpp"
#include "fedeval/federation/round.hpp"
#include "fedeval/numeric.hpp"
#include "fedeval/partitioning.hpp"
#include "fedeval/predictors.hpp"
#include "fedeval/report.hpp"

namespace {

using namespace fedeval;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEquivalence = 3;

constexpr double kSelfCheckTolerance = 1e-9;

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "label") continue;
    try {
      std::size_t used = 0;
      labels.push_back(std::stoi(line, &used));
      if (used != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed label '" + line + "'");
    }
  }
  if (labels.empty()) throw ValidationError("label file has no rows");
  return labels;
}

std::vector<MetricSpec> parse_metrics(const std::vector<std::string>& tokens,
                                      double zero_division) {
  std::vector<MetricSpec> specs;
  for (const auto& token : tokens) {
    MetricSpec spec = parse_metric_spec(token);
    spec.zero_division_value = zero_division;
    specs.push_back(spec);
  }
  if (specs.empty()) throw ValidationError("no metrics requested");
  return specs;
}

std::vector<WeightScheme> parse_schemes(const std::vector<std::string>& tokens) {
  std::vector<WeightScheme> schemes;
  for (const auto& token : tokens) schemes.push_back(weight_scheme_from_string(token));
  return schemes;
}

std::set<int> parse_class_set(const std::vector<int>& values) {
  return {values.begin(), values.end()};
}

// Flags shared by evaluate and sweep when a federation is synthesized.
struct SyntheticFlags {
  std::string task = "classification";
  int classes = 10;
  int pool = 2000;
  int participants = 4;
  std::string skew = "iid";
  double alpha_quantity = 0.0;
  double alpha_label = 0.0;
  std::vector<int> shared;
  double accuracy = 0.9;
  bool hetero = false;
  double noise = 0.5;
  std::uint64_t seed = 0;

  SyntheticConfig to_config() const {
    SyntheticConfig cfg;
    cfg.task = task_from_string(task);
    cfg.class_count = classes;
    cfg.pool_size = pool;
    cfg.skew.kind = skew_kind_from_string(skew);
    cfg.skew.alpha_quantity = alpha_quantity;
    cfg.skew.alpha_label = alpha_label;
    cfg.skew.participants = participants;
    cfg.skew.seed = seed;
    cfg.shared_classes = parse_class_set(shared);
    cfg.model_accuracy = accuracy;
    cfg.heterogeneous_models = hetero;
    cfg.regression_noise = noise;
    return cfg;
  }
};

void add_synthetic_flags(CLI::App* cmd, SyntheticFlags& flags) {
  cmd->add_option("--task", flags.task, "classification or regression")
      ->check(CLI::IsMember({"classification", "regression"}));
  cmd->add_option("--classes", flags.classes, "class count C");
  cmd->add_option("--pool", flags.pool, "pool size");
  cmd->add_option("--participants", flags.participants, "participant count");
  cmd->add_option("--skew", flags.skew, "iid, qs, ls, lqs, or ms")
      ->check(CLI::IsMember({"iid", "qs", "ls", "lqs", "ms"}));
  cmd->add_option("--alpha-quantity", flags.alpha_quantity, "Dirichlet alpha for sizes");
  cmd->add_option("--alpha-label", flags.alpha_label, "Dirichlet alpha for class draws");
  cmd->add_option("--shared", flags.shared, "shared classes for ms")->delimiter(',');
  cmd->add_option("--kernel-accuracy", flags.accuracy, "stand-in model accuracy");
  cmd->add_flag("--hetero", flags.hetero, "per-participant heterogeneous models");
  cmd->add_option("--noise", flags.noise, "regression noise sigma");
  cmd->add_option("--seed", flags.seed, "generator seed");
}

int print_deviation_summary(const DeviationReport& report) {
  for (const auto& cell : report.cells) {
    std::cout << cell.spec.name() << " (" << to_string(cell.scheme) << "): ";
    if (!cell.error.empty()) {
      std::cout << "error: " << cell.error << "\n";
      continue;
    }
    std::cout << "centralized=" << format_double(*cell.centralized)
              << " weighted=" << format_double(*cell.weighted_average)
              << " flam=" << format_double(*cell.flam)
              << " dev_weighted=" << format_double(*cell.abs_dev_weighted)
              << " dev_flam=" << format_double(*cell.abs_dev_flam) << "\n";
  }
  if (report.max_abs_dev_flam() > kSelfCheckTolerance) {
    std::cerr << "equivalence self-check failed: measure-based deviation "
              << format_double(report.max_abs_dev_flam()) << " exceeds "
              << format_double(kSelfCheckTolerance) << "\n";
    return kExitEquivalence;
  }
  return kExitOk;
}

int run_partition(const std::string& labels_path, const std::string& kind_token,
                  double alpha_quantity, double alpha_label, int participants,
                  std::uint64_t seed, std::optional<int> classes,
                  const std::vector<int>& shared, const std::string& out_path) {
  const std::vector<int> labels = load_labels(labels_path);
  const SkewKind kind = skew_kind_from_string(kind_token);

  PartitionPlan plan;
  if (kind == SkewKind::ms) {
    int class_count = classes.value_or(0);
    if (class_count == 0) {
      for (int label : labels) class_count = std::max(class_count, label + 1);
    }
    plan = manual_skew_partition(labels, class_count, participants, parse_class_set(shared),
                                 seed);
  } else {
    SkewConfig cfg;
    cfg.kind = kind;
    cfg.alpha_quantity = alpha_quantity;
    cfg.alpha_label = alpha_label;
    cfg.participants = participants;
    cfg.seed = seed;
    plan = dirichlet_partition(labels, cfg);
  }

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  write_partition_csv(out, plan);
  std::cout << "wrote " << out_path << " (" << plan.assignment.size() << " samples, "
            << plan.participants << " participants)\n";
  return kExitOk;
}

int run_evaluate(const std::string& input, bool synthetic, const SyntheticFlags& flags,
                 std::optional<int> classes, const std::vector<std::string>& metric_tokens,
                 const std::vector<std::string>& scheme_tokens, double zero_division,
                 const std::string& out_path, const std::string& json_path) {
  std::vector<LabeledPredictions> partitions;
  if (synthetic) {
    partitions = build_synthetic_federation(flags.to_config());
  } else {
    const Task task = task_from_string(flags.task);
    partitions = ingest_predictions(input, task, classes).partitions;
  }
  const auto specs = parse_metrics(metric_tokens, zero_division);
  const auto schemes = parse_schemes(scheme_tokens);

  const DeviationReport report = build_deviation_report(partitions, specs, schemes);
  if (!out_path.empty()) {
    write_report_files(out_path, deviation_table(report),
                       json_path, deviation_json(report));
  } else if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw IoError("cannot write " + json_path);
    out << deviation_json(report);
  }
  return print_deviation_summary(report);
}

int run_sweep(const SyntheticFlags& base, const std::vector<double>& alphas,
              const std::vector<std::string>& alpha_pairs, int seed_count,
              std::uint64_t seed_base, const std::vector<std::string>& metric_tokens,
              const std::vector<std::string>& scheme_tokens, double zero_division,
              const std::string& out_path, const std::string& json_path) {
  if (seed_count <= 0) throw ValidationError("--seeds must be >= 1");
  const auto specs = parse_metrics(metric_tokens, zero_division);
  const auto schemes = parse_schemes(scheme_tokens);
  const SkewKind kind = skew_kind_from_string(base.skew);

  struct AlphaCell {
    std::string label;
    double quantity;
    double label_alpha;
  };
  std::vector<AlphaCell> cells;
  if (kind == SkewKind::lqs) {
    for (const auto& pair : alpha_pairs) {
      const auto slash = pair.find('/');
      if (slash == std::string::npos) {
        throw ValidationError("--alpha-pairs entries must look like 10.0/1.0");
      }
      cells.push_back({pair, std::stod(pair.substr(0, slash)), std::stod(pair.substr(slash + 1))});
    }
    if (cells.empty()) throw ValidationError("lqs sweep needs --alpha-pairs");
  } else if (kind == SkewKind::ls || kind == SkewKind::qs) {
    for (double a : alphas) cells.push_back({format_double(a), a, a});
    if (cells.empty()) throw ValidationError("sweep needs --alphas");
  } else {
    cells.push_back({"", 0.0, 0.0});  // iid/ms have no alpha axis
  }

  std::vector<SweepRow> rows;
  double worst_flam_dev = 0.0;
  for (const auto& cell : cells) {
    for (int s = 0; s < seed_count; ++s) {
      SyntheticFlags flags = base;
      flags.seed = seed_base + static_cast<std::uint64_t>(s);
      if (kind == SkewKind::ls) flags.alpha_label = cell.label_alpha;
      if (kind == SkewKind::qs) flags.alpha_quantity = cell.quantity;
      if (kind == SkewKind::lqs) {
        flags.alpha_quantity = cell.quantity;
        flags.alpha_label = cell.label_alpha;
      }
      const auto partitions = build_synthetic_federation(flags.to_config());
      const DeviationReport report = build_deviation_report(partitions, specs, schemes);
      worst_flam_dev = std::max(worst_flam_dev, report.max_abs_dev_flam());
      append_sweep_rows(rows, report, base.skew, cell.label, flags.seed);
    }
  }

  if (!out_path.empty()) {
    write_report_files(out_path, sweep_table(rows), json_path, sweep_json(rows));
  }
  std::cout << "sweep: " << rows.size() << " rows\n";
  if (worst_flam_dev > kSelfCheckTolerance) {
    std::cerr << "equivalence self-check failed: measure-based deviation "
              << format_double(worst_flam_dev) << "\n";
    return kExitEquivalence;
  }
  return kExitOk;
}

int run_coordinator(const std::string& listen, int expected, const std::string& task_token,
                    std::optional<int> classes, const std::vector<std::string>& metric_tokens,
                    double zero_division, int timeout_ms, bool allow_partial,
                    const std::string& out_path) {
  const Task task = task_from_string(task_token);
  const auto specs = parse_metrics(metric_tokens, zero_division);
  RoundOptions options;
  options.phase_timeout = std::chrono::milliseconds(timeout_ms);
  options.allow_partial = allow_partial;

  TcpListener listener(parse_address(listen));
  std::cerr << "coordinator listening on port " << listener.port() << ", expecting " << expected
            << " participants\n";

  std::vector<RegisteredParticipant> registered;
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (static_cast<int>(registered.size()) < expected && !g_stop.load()) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      throw TimeoutError("registration timed out with " + std::to_string(registered.size()) +
                         " of " + std::to_string(expected) + " participants");
    }
    auto channel = listener.accept(std::min(left, std::chrono::milliseconds(200)));
    if (!channel) continue;
    const RoundMessage hello = channel->receive(std::chrono::milliseconds(timeout_ms));
    if (hello.phase != Phase::registration) {
      throw ProtocolError("expected registration, got " + to_string(hello.phase));
    }
    const auto& reg = std::get<RegistrationPayload>(hello.payload);
    if (reg.task != task) throw ProtocolError("participant registered a different task");
    if (classes && task == Task::classification && reg.class_count != *classes) {
      throw ProtocolError("participant registered class count " +
                          std::to_string(reg.class_count) + ", expected " +
                          std::to_string(*classes));
    }
    std::cerr << "registered participant " << reg.participant_id << "\n";
    registered.push_back({reg, channel});
  }
  if (g_stop.load()) {
    std::cerr << "interrupted before the round started\n";
    return kExitIo;
  }

  Coordinator coordinator(std::move(registered), options);
  const RoundResult result = coordinator.run_round(specs);
  for (const auto& value : result.values) {
    std::cout << value.spec.name() << " (flam) = " << format_double(value.value) << "\n";
  }
  if (!out_path.empty()) {
    nlohmann::json doc;
    doc["participants"] = result.participants;
    doc["results"] = nlohmann::json::array();
    for (const auto& value : result.values) {
      doc["results"].push_back({{"metric", value.spec.name()},
                                {"mode", to_string(value.mode)},
                                {"value", value.value},
                                {"sample_count", value.sample_count}});
    }
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    out << doc.dump(2) << "\n";
  }
  return kExitOk;
}

int run_participant(const std::string& connect, int id, const std::string& input,
                    const std::string& task_token, std::optional<int> classes, int timeout_ms) {
  const Task task = task_from_string(task_token);
  const Federation federation = ingest_predictions(input, task, classes);
  const LabeledPredictions* mine = nullptr;
  for (std::size_t i = 0; i < federation.participant_ids.size(); ++i) {
    if (federation.participant_ids[i] == id) mine = &federation.partitions[i];
  }
  if (mine == nullptr) {
    throw ValidationError("participant " + std::to_string(id) + " not present in " + input);
  }

  auto channel = connect_tcp(parse_address(connect), std::chrono::milliseconds(timeout_ms));
  send_registration(*channel, *mine, id);
  const ResultPayload result =
      serve_round(*channel, *mine, id, std::chrono::milliseconds(timeout_ms));
  for (const auto& value : result.results) {
    std::cout << value.spec.name() << " (flam) = " << format_double(value.value) << "\n";
  }
  return kExitOk;
}

const char* env_or(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return v != nullptr ? v : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  CLI::App app{"Federated metric evaluation over aggregatable measures"};
  app.set_config("--config", "", "Config file (key=value sections mirroring the flags)");
  app.require_subcommand(1);

  // partition
  auto* partition = app.add_subcommand("partition", "Write a partition plan CSV");
  std::string labels_path, kind_token, plan_out;
  double alpha_quantity = 0.0, alpha_label = 0.0;
  int participants = 4;
  std::uint64_t seed = 0;
  std::optional<int> classes_opt;
  std::vector<int> shared_classes;
  partition->add_option("--labels", labels_path, "label CSV (one integer per line)")->required();
  partition->add_option("--kind", kind_token, "iid, qs, ls, lqs, or ms")
      ->required()
      ->check(CLI::IsMember({"iid", "qs", "ls", "lqs", "ms"}));
  auto* pq = partition->add_option("--alpha-quantity", alpha_quantity, "Dirichlet alpha (qs/lqs)");
  auto* pl = partition->add_option("--alpha-label", alpha_label, "Dirichlet alpha (ls/lqs)");
  partition->add_option("--participants", participants, "participant count")->required();
  partition->add_option("--seed", seed, "partition seed");
  partition->add_option("--classes", classes_opt, "declared class count");
  partition->add_option("--shared", shared_classes, "shared classes for ms")->delimiter(',');
  partition->add_option("--out", plan_out, "output plan CSV")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Run all three evaluation modes");
  std::string input_path, report_out, report_json;
  bool synthetic = false;
  SyntheticFlags eval_flags;
  std::vector<std::string> metric_tokens, scheme_tokens{"sample-count"};
  double zero_division = 0.0;
  auto* in_opt = evaluate->add_option("--input", input_path, "prediction CSV");
  auto* syn_opt = evaluate->add_flag("--synthetic", synthetic, "synthesize the federation");
  in_opt->excludes(syn_opt);
  add_synthetic_flags(evaluate, eval_flags);
  evaluate->add_option("--metrics", metric_tokens, "metric tokens, e.g. accuracy,f1-macro")
      ->required()
      ->delimiter(',');
  evaluate->add_option("--schemes", scheme_tokens, "sample-count and/or uniform")->delimiter(',');
  evaluate->add_option("--zero-division", zero_division, "value of per-class 0/0 ratios");
  evaluate->add_option("--out", report_out, "report CSV path");
  evaluate->add_option("--json", report_json, "report JSON path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Sweep alphas and seeds into a tidy CSV");
  SyntheticFlags sweep_flags;
  std::vector<double> sweep_alphas;
  std::vector<std::string> alpha_pairs;
  std::vector<std::string> sweep_metrics, sweep_schemes{"sample-count"};
  int seed_count = 0;
  std::uint64_t seed_base = 0;
  std::string sweep_out, sweep_json_path;
  double sweep_zero_division = 0.0;
  add_synthetic_flags(sweep, sweep_flags);
  sweep->add_option("--alphas", sweep_alphas, "alpha grid (ls/qs)")->delimiter(',');
  sweep->add_option("--alpha-pairs", alpha_pairs, "quantity/label pairs for lqs")->delimiter(',');
  sweep->add_option("--seeds", seed_count, "number of seeds")->required();
  sweep->add_option("--seed-base", seed_base, "first seed");
  sweep->add_option("--metrics", sweep_metrics, "metric tokens")->required()->delimiter(',');
  sweep->add_option("--schemes", sweep_schemes, "weight schemes")->delimiter(',');
  sweep->add_option("--zero-division", sweep_zero_division, "value of per-class 0/0 ratios");
  sweep->add_option("--out", sweep_out, "sweep CSV path");
  sweep->add_option("--json", sweep_json_path, "sweep JSON path");

  // serve
  auto* serve = app.add_subcommand("serve", "Host a coordinator or participant process");
  serve->require_subcommand(1);
  auto* coordinator_cmd = serve->add_subcommand("coordinator", "Aggregate measures over TCP");
  std::string listen = env_or("FEDEVAL_ADDRESS", "127.0.0.1:7600");
  int expected = 1, timeout_ms = std::atoi(env_or("FEDEVAL_TIMEOUT_MS", "10000"));
  std::string coord_task = "classification", result_out;
  std::optional<int> coord_classes;
  std::vector<std::string> coord_metrics;
  bool allow_partial = false;
  coordinator_cmd->add_option("--listen", listen, "bind address host:port");
  coordinator_cmd->add_option("--participants", expected, "expected participant count")
      ->required();
  coordinator_cmd->add_option("--task", coord_task, "classification or regression")
      ->check(CLI::IsMember({"classification", "regression"}));
  coordinator_cmd->add_option("--classes", coord_classes, "declared class count");
  coordinator_cmd->add_option("--metrics", coord_metrics, "metric tokens")
      ->required()
      ->delimiter(',');
  coordinator_cmd->add_option("--timeout-ms", timeout_ms, "per-phase timeout");
  coordinator_cmd->add_flag("--allow-partial", allow_partial,
                            "drop unresponsive participants instead of aborting");
  coordinator_cmd->add_option("--out", result_out, "result JSON path");

  auto* participant_cmd = serve->add_subcommand("participant", "Serve one round of measures");
  std::string connect = env_or("FEDEVAL_ADDRESS", "127.0.0.1:7600");
  int participant_id = 0;
  std::string part_input, part_task = "classification";
  std::optional<int> part_classes;
  participant_cmd->add_option("--connect", connect, "coordinator address host:port");
  participant_cmd->add_option("--id", participant_id, "participant id")->required();
  participant_cmd->add_option("--input", part_input, "prediction CSV")->required();
  participant_cmd->add_option("--task", part_task, "classification or regression")
      ->check(CLI::IsMember({"classification", "regression"}));
  participant_cmd->add_option("--classes", part_classes, "declared class count");
  participant_cmd->add_option("--timeout-ms", timeout_ms, "connect/phase timeout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (partition->parsed()) {
      const SkewKind kind = skew_kind_from_string(kind_token);
      if ((kind == SkewKind::qs || kind == SkewKind::lqs) && pq->count() == 0) {
        std::cerr << "missing required flag --alpha-quantity for kind " << kind_token << "\n";
        return kExitUsage;
      }
      if ((kind == SkewKind::ls || kind == SkewKind::lqs) && pl->count() == 0) {
        std::cerr << "missing required flag --alpha-label for kind " << kind_token << "\n";
        return kExitUsage;
      }
      return run_partition(labels_path, kind_token, alpha_quantity, alpha_label, participants,
                           seed, classes_opt, shared_classes, plan_out);
    }
    if (evaluate->parsed()) {
      if (!synthetic && input_path.empty()) {
        std::cerr << "evaluate needs --input or --synthetic\n";
        return kExitUsage;
      }
      std::optional<int> classes =
          eval_flags.classes > 0 && in_opt->count() > 0 && evaluate->count("--classes") > 0
              ? std::optional<int>(eval_flags.classes)
              : std::nullopt;
      return run_evaluate(input_path, synthetic, eval_flags, classes, metric_tokens,
                          scheme_tokens, zero_division, report_out, report_json);
    }
    if (sweep->parsed()) {
      return run_sweep(sweep_flags, sweep_alphas, alpha_pairs, seed_count, seed_base,
                       sweep_metrics, sweep_schemes, sweep_zero_division, sweep_out,
                       sweep_json_path);
    }
    if (coordinator_cmd->parsed()) {
      return run_coordinator(listen, expected, coord_task, coord_classes, coord_metrics,
                             zero_division, timeout_ms, allow_partial, result_out);
    }
    if (participant_cmd->parsed()) {
      return run_participant(connect, participant_id, part_input, part_task, part_classes,
                             timeout_ms);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
