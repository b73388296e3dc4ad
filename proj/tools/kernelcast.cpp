// SPDX-License-Identifier: Apache-2.0
// kernelcast command-line front end.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "kernelcast/benchmark.hpp"
#include "kernelcast/data.hpp"
#include "kernelcast/ensemble.hpp"
#include "kernelcast/error.hpp"
#include "kernelcast/kernelmap.hpp"
#include "kernelcast/modelsel.hpp"
#include "kernelcast/parallel.hpp"
#include "kernelcast/serialize.hpp"
#include "kernelcast/simd/kernels.hpp"

namespace kc = kernelcast;

namespace {

struct DataArgs {
  std::string path;
  std::string label_col;
  bool no_header = false;

  void add(CLI::App* cmd, const char* help = "training CSV") {
    cmd->add_option("--data", path, help)->required();
    cmd->add_option("--label-col", label_col, "label column name or 0-based index (default: last)");
    cmd->add_flag("--no-header", no_header, "the CSV has no header row");
  }
  kc::Dataset load() const { return kc::load_csv(path, label_col, !no_header); }
};

std::optional<kc::SamplerKind> sampler_filter(const std::string& name) {
  if (name == "any") return std::nullopt;
  return kc::parse_sampler_kind(name);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    kc::write_text(out, text);
  }
}

std::string predictions_csv(const std::vector<kc::LabelId>& labels, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << "prediction\n";
  for (kc::LabelId y : labels) {
    const std::string& s = names.at(y);
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
      os << s << '\n';
      continue;
    }
    os << '"';
    for (char c : s) os << (c == '"' ? "\"\"" : std::string(1, c));
    os << "\"\n";
  }
  return os.str();
}

void set_threads(std::size_t threads) {
  if (threads > 0) setenv("KERNELCAST_THREADS", std::to_string(threads).c_str(), 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernelcast: kernelized feature-space classifiers with configuration search"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = KERNELCAST_THREADS or all cores)");

  // search
  auto* search = app.add_subcommand("search", "search the configuration space with cross-validation");
  DataArgs search_data;
  search_data.add(search);
  std::size_t search_folds = 3, search_budget = 128;
  std::uint64_t search_seed = 0;
  std::string search_mode = "random", search_sampler = "any", search_scaler = "none", search_ber = "paper";
  std::string search_out;
  bool search_no_timing = false;
  search->add_option("--folds", search_folds, "cross-validation folds")->capture_default_str();
  search->add_option("--budget", search_budget, "configurations sampled by random search")->capture_default_str();
  search->add_option("--mode", search_mode, "random or grid")
      ->check(CLI::IsMember({"random", "grid"}))
      ->capture_default_str();
  search->add_option("--sampler", search_sampler, "restrict to one sampler")
      ->check(CLI::IsMember({"any", "random", "kmeans", "density", "fft"}))
      ->capture_default_str();
  search->add_option("--scaler", search_scaler, "input scaler")
      ->check(CLI::IsMember({"none", "standardize", "minmax", "maxabs"}))
      ->capture_default_str();
  search->add_option("--ber", search_ber, "BER used for scoring: paper (FP+FN) or conventional (FN)")
      ->check(CLI::IsMember({"paper", "conventional"}))
      ->capture_default_str();
  search->add_option("--seed", search_seed, "master seed")->capture_default_str();
  search->add_option("--out", search_out, "report JSON path")->required();
  search->add_flag("--no-timing", search_no_timing, "omit wall-clock fields from the report");

  // train
  auto* train = app.add_subcommand("train", "fit a model or an ensemble on the full training data");
  DataArgs train_data;
  train_data.add(train);
  std::string train_report, train_config, train_out;
  std::size_t train_ell = 0;
  std::optional<std::uint64_t> train_seed;
  auto* report_opt = train->add_option("--report", train_report, "search report JSON");
  auto* config_opt = train->add_option("--config", train_config, "configuration key string");
  report_opt->excludes(config_opt);
  train->add_option("--ensemble-size", train_ell, "ensemble of the top configurations (flag alone: 15, 0: single model)")
      ->expected(0, 1)
      ->default_str(std::to_string(kc::default_ensemble_size));
  train->add_option("--seed", train_seed, "seed (default: the report's seed, or 0)");
  train->add_option("--out", train_out, "model JSON path")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "predict labels for a CSV");
  std::string pred_model, pred_data, pred_out, pred_truth;
  bool pred_no_header = false;
  pred->add_option("--model", pred_model, "model JSON")->required();
  pred->add_option("--data", pred_data, "CSV of samples")->required();
  pred->add_option("--out", pred_out, "predictions CSV (default: stdout)");
  pred->add_option("--truth-col", pred_truth, "column holding true labels; excluded from features, BER printed");
  pred->add_flag("--no-header", pred_no_header, "the CSV has no header row");

  // consensus
  auto* cons = app.add_subcommand("consensus", "discordance between ensembles of growing size");
  DataArgs cons_data;
  cons_data.add(cons);
  std::string cons_report, cons_eval, cons_out;
  kc::ConsensusOptions cons_opts;
  std::optional<std::uint64_t> cons_seed;
  cons->add_option("--report", cons_report, "search report JSON")->required();
  cons->add_option("--eval", cons_eval, "evaluation CSV (default: the training data)");
  cons->add_option("--ell-start", cons_opts.ell_start, "first ensemble size")->capture_default_str();
  cons->add_option("--step", cons_opts.step, "size increment")->capture_default_str();
  cons->add_option("--ell-max", cons_opts.ell_max, "last ensemble size")->capture_default_str();
  cons->add_option("--seed", cons_seed, "seed (default: the report's seed)");
  cons->add_option("--out", cons_out, "curve CSV (default: stdout)");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "test BER and average ranks over a split manifest");
  std::string bench_manifest, bench_out, bench_methods = "kms-rs,kmse-rs", bench_scaler = "none";
  std::string bench_ber = "paper", bench_rank_ber = "paper";
  kc::BenchmarkOptions bench_opts;
  bench->add_option("--manifest", bench_manifest, "manifest JSON")->required();
  bench->add_option("--methods", bench_methods, "comma-separated methods, e.g. kms-rs,kmse-rs,kms-fft")
      ->capture_default_str();
  bench->add_option("--seed", bench_opts.seed, "master seed")->capture_default_str();
  bench->add_option("--max-splits", bench_opts.max_splits, "use at most this many splits (0 = all)")
      ->capture_default_str();
  bench->add_option("--budget", bench_opts.budget, "random search budget")->capture_default_str();
  bench->add_option("--folds", bench_opts.folds, "cross-validation folds")->capture_default_str();
  bench->add_option("--ensemble-size", bench_opts.ensemble_size, "ensemble size")->capture_default_str();
  bench->add_option("--scaler", bench_scaler, "input scaler")
      ->check(CLI::IsMember({"none", "standardize", "minmax", "maxabs"}))
      ->capture_default_str();
  bench->add_option("--ber", bench_ber, "BER used inside the search")
      ->check(CLI::IsMember({"paper", "conventional"}))
      ->capture_default_str();
  bench->add_option("--rank-ber", bench_rank_ber, "BER used for ranking")
      ->check(CLI::IsMember({"paper", "conventional"}))
      ->capture_default_str();
  bench->add_option("--out", bench_out, "report JSON (default: stdout)");

  // map
  auto* map = app.add_subcommand("map", "dump the kernelized features of a CSV");
  std::string map_model, map_data, map_out, map_label;
  std::size_t map_member = 0;
  bool map_no_header = false;
  map->add_option("--model", map_model, "model JSON")->required();
  map->add_option("--data", map_data, "CSV of samples")->required();
  map->add_option("--label-col", map_label, "column to exclude from features");
  map->add_option("--member", map_member, "ensemble member to use")->capture_default_str();
  map->add_option("--out", map_out, "mapped CSV (default: stdout)");
  map->add_flag("--no-header", map_no_header, "the CSV has no header row");

  auto* info = app.add_subcommand("info", "print build and runtime information");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    set_threads(threads);

    if (*search) {
      const kc::Dataset ds = search_data.load();
      kc::SearchOptions opts;
      opts.budget = search_budget;
      opts.folds = search_folds;
      opts.seed = search_seed;
      opts.sampler = sampler_filter(search_sampler);
      opts.scaler = kc::parse_scaler_kind(search_scaler);
      opts.ber = kc::parse_ber_variant(search_ber);
      const kc::SearchReport report =
          search_mode == "grid" ? kc::grid_search(ds, opts) : kc::random_search(ds, opts);
      kc::write_json(search_out, kc::to_json(report, !search_no_timing));
      if (report.best) {
        const auto& best = report.best_entry();
        std::cerr << "best cv_ber " << format_double(best.cv_ber) << " : " << kc::config_key(best.config) << '\n';
      } else {
        std::cerr << "every configuration failed\n";
      }
    } else if (*train) {
      const kc::Dataset ds = train_data.load();
      if (!train_config.empty()) {
        if (train_ell > 0) {
          throw kc::Error(kc::ErrorCode::invalid_argument, "--ensemble-size needs --report");
        }
        const kc::Configuration cfg = kc::parse_config_key(train_config);
        const std::uint64_t seed = train_seed.value_or(0);
        kc::write_json(train_out, kc::to_json(kc::kms_fit(cfg, ds, kc::config_seed(seed, cfg))));
      } else {
        if (train_report.empty()) throw kc::Error(kc::ErrorCode::invalid_argument, "need --report or --config");
        const kc::SearchReport report = kc::search_report_from_json(kc::read_json(train_report));
        const std::uint64_t seed = train_seed.value_or(report.seed);
        if (train_ell == 0) {
          const kc::SearchEntry& best = report.best_entry();
          kc::KmsModel m = kc::kms_fit(best.config, ds, kc::config_seed(seed, best.config));
          m.cv_ber = best.cv_ber;
          kc::write_json(train_out, kc::to_json(m));
        } else {
          kc::write_json(train_out, kc::to_json(kc::build_ensemble(report, ds, train_ell, seed)));
        }
      }
    } else if (*pred) {
      const kc::Predictor model = kc::predictor_from_json(kc::read_json(pred_model));
      const kc::CsvTable table = kc::read_csv(pred_data, !pred_no_header);
      std::optional<std::size_t> truth_col;
      if (!pred_truth.empty()) truth_col = kc::resolve_column(table, pred_truth);
      const kc::Matrix features = kc::parse_features(table, truth_col);
      const auto predicted = kc::predict(model, features);
      const auto& names = kc::label_names(model);
      emit(pred_out, predictions_csv(predicted, names));
      if (truth_col) {
        kc::Dataset truth;
        truth.features = kc::Matrix(table.rows.size(), 0);
        truth.label_names = names;
        std::unordered_map<std::string, kc::LabelId> ids;
        for (std::size_t i = 0; i < names.size(); ++i) ids.emplace(names[i], static_cast<kc::LabelId>(i));
        for (const auto& row : table.rows) {
          auto [it, inserted] = ids.try_emplace(row[*truth_col], static_cast<kc::LabelId>(truth.label_names.size()));
          if (inserted) truth.label_names.push_back(row[*truth_col]);
          truth.labels.push_back(it->second);
        }
        const std::size_t n_classes = truth.label_names.size();
        std::ostream& os = (pred_out.empty() || pred_out == "-") ? std::cerr : std::cout;
        os << "ber_paper " << format_double(kc::balanced_error_rate(truth.labels, predicted, n_classes,
                                                                     kc::BerVariant::paper))
           << '\n'
           << "ber_conventional "
           << format_double(kc::balanced_error_rate(truth.labels, predicted, n_classes, kc::BerVariant::conventional))
           << '\n';
      }
    } else if (*cons) {
      const kc::Dataset ds = cons_data.load();
      const kc::SearchReport report = kc::search_report_from_json(kc::read_json(cons_report));
      cons_opts.seed = cons_seed.value_or(report.seed);
      kc::Matrix eval = ds.features;
      if (!cons_eval.empty()) {
        const kc::CsvTable table = kc::read_csv(cons_eval, !cons_data.no_header);
        std::optional<std::size_t> label;
        if (table.cols() == ds.dims() + 1) label = kc::resolve_column(table, cons_data.label_col);
        eval = kc::parse_features(table, label);
      }
      emit(cons_out, kc::consensus_curve(report, ds, eval, cons_opts).to_csv());
    } else if (*bench) {
      std::stringstream list(bench_methods);
      std::string name;
      while (std::getline(list, name, ',')) {
        if (!name.empty()) bench_opts.methods.push_back(kc::parse_method(name));
      }
      bench_opts.scaler = kc::parse_scaler_kind(bench_scaler);
      bench_opts.search_ber = kc::parse_ber_variant(bench_ber);
      bench_opts.rank_ber = kc::parse_ber_variant(bench_rank_ber);
      bench_opts.threads = threads;
      const auto report = kc::run_benchmark(kc::load_manifest(bench_manifest), bench_opts);
      emit(bench_out, kc::to_json(report).dump(2) + "\n");
    } else if (*map) {
      const kc::Predictor model = kc::predictor_from_json(kc::read_json(map_model));
      const kc::KmsModel* m = std::get_if<kc::KmsModel>(&model);
      if (m == nullptr) m = &std::get<kc::Ensemble>(model).members.at(map_member);
      const kc::CsvTable table = kc::read_csv(map_data, !map_no_header);
      std::optional<std::size_t> label;
      if (!map_label.empty()) label = kc::resolve_column(table, map_label);
      const kc::Matrix mapped =
          kc::map_features(kc::apply_scaler(m->scaler, kc::parse_features(table, label)), m->refs, m->config.kernel);
      std::ostringstream os;
      for (std::size_t j = 0; j < mapped.cols(); ++j) os << (j ? "," : "") << "k" << (j + 1);
      os << '\n';
      for (std::size_t i = 0; i < mapped.rows(); ++i) {
        for (std::size_t j = 0; j < mapped.cols(); ++j) os << (j ? "," : "") << format_double(mapped(i, j));
        os << '\n';
      }
      emit(map_out, os.str());
    } else if (*info) {
      std::cout << "simd " << kc::simd::to_string(kc::simd::active_kernels().isa) << '\n';
      std::cout << "threads " << kc::thread_count() << '\n';
    }
  } catch (const kc::Error& e) {
    std::cerr << "kernelcast: error[" << kc::to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "kernelcast: error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
