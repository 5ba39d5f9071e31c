#include "adjstab/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "adjstab/experiments.hpp"
#include "adjstab/io.hpp"
#include "adjstab/measures.hpp"
#include "adjstab/similarity.hpp"
#include "adjstab/synthetic.hpp"

namespace adjstab::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct SharedOptions {
  double theta = 0.9;
  std::string measures;
  std::string expectation = "exact";
  std::size_t mc_samples = 10'000;
  std::optional<std::uint64_t> seed;
  std::uint64_t enumeration_cap = 10'000'000;
  std::string output;
};

void add_shared(CLI::App& cmd, SharedOptions& o, bool with_expectation) {
  cmd.add_option("--theta", o.theta, "Similarity threshold in [0,1]")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--measures", o.measures,
                 "Comma-separated measures (SMU,SMZ,SMY,SMA-Count,SMA-Mean,SMA-Greedy,SMA-MBM); "
                 "default all");
  if (with_expectation) {
    cmd.add_option("--expectation", o.expectation, "exact | mc | auto")
        ->capture_default_str()
        ->check(CLI::IsMember({"exact", "mc", "auto"}));
    cmd.add_option("--mc-samples", o.mc_samples, "Monte-Carlo replications")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--seed", o.seed, "RNG seed (required for mc and auto)");
    cmd.add_option("--enumeration-cap", o.enumeration_cap,
                   "Largest exact enumeration (subset pairs)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }
  cmd.add_option("--output", o.output, "Write records to this file instead of stdout");
}

std::vector<MeasureKind> parse_measures(const std::string& list) {
  if (list.empty()) return {kAllMeasures.begin(), kAllMeasures.end()};
  std::vector<MeasureKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) continue;
    out.push_back(parse_measure_kind(item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw StabilityError(ErrorClass::BadArgument, "--measures is empty");
  return out;
}

StabilityConfig make_config(const SharedOptions& o, std::span<const MeasureKind> measures) {
  StabilityConfig c;
  c.theta = o.theta;
  c.mc_samples = o.mc_samples;
  c.exact_enumeration_cap = o.enumeration_cap;
  c.expectation_mode = o.expectation == "mc"     ? ExpectationMode::MonteCarlo
                       : o.expectation == "auto" ? ExpectationMode::Auto
                                                 : ExpectationMode::Exact;
  const bool sampling = std::any_of(measures.begin(), measures.end(), needs_expectation) &&
                        c.expectation_mode != ExpectationMode::Exact;
  if (sampling && !o.seed)
    throw StabilityError(ErrorClass::MissingSeed,
                         "--seed is required with --expectation " + o.expectation);
  c.rng_seed = o.seed.value_or(0);
  c.validate();
  return c;
}

Json value_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json measure_columns(const MeasureValues& values) {
  Json j = Json::object();
  for (std::size_t m = 0; m < kMeasureCount; ++m)
    j[std::string(to_string(kAllMeasures[m]))] = value_json(values[m]);
  return j;
}

void emit_correlations(std::ostream& out, const CorrelationMatrix& c, const std::string& record,
                       const std::optional<std::string>& dataset) {
  for (std::size_t a = 0; a < kMeasureCount; ++a) {
    Json j;
    j["record"] = record;
    if (dataset) j["dataset"] = *dataset;
    j["measure"] = std::string(to_string(kAllMeasures[a]));
    for (std::size_t b = 0; b < kMeasureCount; ++b)
      j[std::string(to_string(kAllMeasures[b]))] = value_json(c[a][b]);
    out << j.dump() << '\n';
  }
}

Json subset_ids(std::uint32_t mask, const FeatureUniverse& u) {
  Json ids = Json::array();
  for (FeatureIndex k = 0; k < u.size(); ++k)
    if (mask & (1u << k)) ids.push_back(u.id(k));
  return ids;
}

// Output goes to --output when given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw StabilityError(ErrorClass::IoError, "cannot write '" + path + "'");
    out_ = &file_;
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

SimilarityMatrix similarity_input(const std::string& sim_path, const std::string& data_path) {
  if (!sim_path.empty() && !data_path.empty())
    throw StabilityError(ErrorClass::BadArgument, "give either --similarity or --data, not both");
  if (!sim_path.empty()) return load_similarity_csv(sim_path);
  return similarity_from_data(load_data_csv(data_path));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature-selection stability measures with similarity adjustments", "adjstab"};
  app.require_subcommand(1);

  // compute
  SharedOptions compute_opts;
  std::string ensemble_path, compute_sim, compute_data;
  auto* compute = app.add_subcommand("compute", "Stability of one ensemble of selected sets");
  compute->add_option("--ensemble", ensemble_path, "Ensemble file")->required();
  compute->add_option("--similarity", compute_sim, "Similarity matrix CSV");
  compute->add_option("--data", compute_data, "Data matrix CSV (absolute Pearson similarity)");
  add_shared(*compute, compute_opts, true);

  // similarity
  SharedOptions similarity_opts;
  std::string similarity_data;
  auto* similarity =
      app.add_subcommand("similarity", "Absolute Pearson similarity matrix of a data CSV");
  similarity->add_option("--data", similarity_data, "Data matrix CSV")->required();
  similarity->add_option("--output", similarity_opts.output, "Write CSV here instead of stdout");

  // exhaustive
  SharedOptions exhaustive_opts;
  std::string exhaustive_sim;
  bool exhaustive_example = false;
  bool no_table = false;
  auto* exhaustive = app.add_subcommand(
      "exhaustive", "All ordered pairs of subsets of a small universe, exact expectations");
  exhaustive->add_option("--similarity", exhaustive_sim, "Similarity matrix CSV (p <= 12)");
  exhaustive->add_flag("--example", exhaustive_example,
                       "Use the built-in 7-feature, 3-group example matrix");
  exhaustive->add_flag("--no-table", no_table, "Only emit the summary and correlations");
  add_shared(*exhaustive, exhaustive_opts, false);

  // compare
  SharedOptions compare_opts;
  std::vector<std::vector<std::string>> sim_datasets, data_datasets;
  auto* compare = app.add_subcommand(
      "compare", "Correlations between measures across ensembles, averaged over data sets");
  compare->add_option("--dataset", sim_datasets, "SIMILARITY_CSV ENSEMBLE... (repeatable)")
      ->expected(4, CLI::detail::expected_max_vector_size);
  compare->add_option("--data-dataset", data_datasets, "DATA_CSV ENSEMBLE... (repeatable)")
      ->expected(4, CLI::detail::expected_max_vector_size);
  add_shared(*compare, compare_opts, true);

  // bench
  SharedOptions bench_opts;
  bench_opts.expectation = "mc";
  std::string bench_sim;
  std::size_t synthetic_p = 0, block_size = 20, n_sets = 10, size_lo = 48, size_hi = 52,
              repetitions = 3;
  auto* bench = app.add_subcommand("bench", "Median wall time per measure");
  bench->add_option("--similarity", bench_sim, "Similarity matrix CSV");
  bench->add_option("--synthetic-p", synthetic_p, "Generate a block similarity matrix of this size");
  bench->add_option("--block-size", block_size, "Block size of the synthetic matrix")
      ->capture_default_str();
  bench->add_option("--sets", n_sets, "Sets per generated ensemble")->capture_default_str();
  bench->add_option("--set-size-min", size_lo, "Smallest generated set")->capture_default_str();
  bench->add_option("--set-size-max", size_hi, "Largest generated set")->capture_default_str();
  bench->add_option("--repetitions", repetitions, "Timed repetitions per measure")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_shared(*bench, bench_opts, true);

  std::vector<const char*> argv{"adjstab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << to_string(ErrorClass::BadArgument) << ": " << msg << '\n';
    return kExitUsage;
  }

  try {
    if (compute->parsed()) {
      const auto measures = parse_measures(compute_opts.measures);
      const auto config = make_config(compute_opts, measures);
      const auto ensemble = load_ensemble(ensemble_path);
      std::optional<SimilarityMatrix> sim;
      if (!compute_sim.empty() || !compute_data.empty())
        sim = similarity_input(compute_sim, compute_data);
      Sink sink(compute_opts.output, out);
      for (auto kind : measures) {
        const auto res = compute_measure(kind, ensemble, sim ? &*sim : nullptr, config);
        const bool mc = res.expectation_mode == "monte_carlo" || res.expectation_mode == "mixed";
        Json j;
        j["record"] = "measure";
        j["measure"] = res.measure_name;
        j["value"] = value_json(res.value);
        j["n_pairs"] = res.pair_scores.size();
        j["n_undefined_pairs"] = res.n_undefined_pairs;
        j["expectation"] = res.expectation_mode;
        j["mc_samples"] = mc ? Json(config.mc_samples) : Json(nullptr);
        j["seed"] = mc ? Json(config.rng_seed) : Json(nullptr);
        j["theta"] = needs_similarity(kind) ? Json(config.theta) : Json(nullptr);
        sink.stream() << j.dump() << '\n';
      }
    } else if (similarity->parsed()) {
      const auto sim = similarity_from_data(load_data_csv(similarity_data));
      Sink sink(similarity_opts.output, out);
      write_similarity_csv(sink.stream(), sim);
    } else if (exhaustive->parsed()) {
      if (exhaustive_example == !exhaustive_sim.empty())
        throw StabilityError(ErrorClass::BadArgument, "give exactly one of --similarity or --example");
      const auto sim = exhaustive_example ? example_similarity_7() : load_similarity_csv(exhaustive_sim);
      if (sim.size() > kExhaustiveMaxFeatures)
        throw StabilityError(ErrorClass::UniverseTooLarge,
                             "exhaustive supports at most 12 features, got " + std::to_string(sim.size()));
      const auto report = run_exhaustive(sim, exhaustive_opts.theta);
      Sink sink(exhaustive_opts.output, out);
      auto& os = sink.stream();
      Json head;
      head["record"] = "exhaustive";
      head["p"] = report.p;
      head["theta"] = report.theta;
      head["combinations"] = report.rows.size();
      head["complete_cases"] = report.n_complete;
      head["expectation"] = "exact";
      os << head.dump() << '\n';
      if (!no_table) {
        const auto& u = sim.universe();
        for (const auto& row : report.rows) {
          Json j;
          j["record"] = "combination";
          j["index"] = row.index;
          j["set_i"] = subset_ids(row.set_i, u);
          j["set_j"] = subset_ids(row.set_j, u);
          j.update(measure_columns(row.values));
          os << j.dump() << '\n';
        }
      }
      emit_correlations(os, report.correlations, "correlation", std::nullopt);
    } else if (compare->parsed()) {
      if (sim_datasets.empty() && data_datasets.empty())
        throw StabilityError(ErrorClass::InsufficientEnsembles, "give at least one --dataset");
      const auto config = make_config(compare_opts, kAllMeasures);
      std::vector<CompareDataset> datasets;
      const auto add = [&](const std::vector<std::string>& entry, bool is_data) {
        auto sim = is_data ? similarity_from_data(load_data_csv(entry.front()))
                           : load_similarity_csv(entry.front());
        CompareDataset ds{entry.front(), std::move(sim), {}};
        for (std::size_t k = 1; k < entry.size(); ++k)
          ds.ensembles.emplace_back(entry[k], load_ensemble(entry[k]));
        datasets.push_back(std::move(ds));
      };
      for (const auto& s : sim_datasets) add(s, false);
      for (const auto& s : data_datasets) add(s, true);
      const auto report = run_compare(datasets, config);
      Sink sink(compare_opts.output, out);
      auto& os = sink.stream();
      for (const auto& d : report.datasets) {
        Json j;
        j["record"] = "dataset";
        j["dataset"] = d.name;
        j["ensembles"] = d.values.size();
        j["complete_cases"] = d.n_complete;
        os << j.dump() << '\n';
        for (std::size_t e = 0; e < d.values.size(); ++e) {
          Json v;
          v["record"] = "value";
          v["dataset"] = d.name;
          v["ensemble"] = d.ensemble_names[e];
          v.update(measure_columns(d.values[e]));
          os << v.dump() << '\n';
        }
        emit_correlations(os, d.correlations, "dataset_correlation", d.name);
      }
      emit_correlations(os, report.mean_correlations, "mean_correlation", std::nullopt);
    } else if (bench->parsed()) {
      if (!bench_opts.seed)
        throw StabilityError(ErrorClass::MissingSeed, "bench requires --seed");
      const auto measures = parse_measures(bench_opts.measures);
      const auto config = make_config(bench_opts, measures);
      if (bench_sim.empty() == (synthetic_p == 0))
        throw StabilityError(ErrorClass::BadArgument,
                             "give exactly one of --similarity or --synthetic-p");
      const auto sim = bench_sim.empty()
                           ? block_similarity(synthetic_p, block_size, 0.9, 1.0, 0.1, *bench_opts.seed)
                           : load_similarity_csv(bench_sim);
      const auto ensemble = random_ensemble(sim.universe(), n_sets, size_lo, size_hi, *bench_opts.seed);
      const auto rows = run_bench(ensemble, sim, config, measures, repetitions);
      Sink sink(bench_opts.output, out);
      for (const auto& r : rows) {
        Json j;
        j["record"] = "bench";
        j["measure"] = std::string(to_string(r.measure));
        j["value"] = value_json(r.value);
        j["p"] = sim.size();
        j["m"] = ensemble.m();
        j["mc_samples"] = config.mc_samples;
        j["repetitions"] = repetitions;
        j["median_seconds"] = r.median_seconds;
        sink.stream() << j.dump() << '\n';
      }
    }
  } catch (const StabilityError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << to_string(e.error_class()) << ": " << msg << '\n';
    return kExitError;
  }
  return 0;
}

}  // namespace adjstab::cli
