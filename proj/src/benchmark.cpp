// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/benchmark.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "kernelcast/ensemble.hpp"
#include "kernelcast/error.hpp"
#include "kernelcast/random.hpp"

namespace kernelcast {
namespace {

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string search_key(const Method& m) {
  return std::string(m.grid ? "gs" : "rs") + ":" + std::string(m.sampler ? to_string(*m.sampler) : "any");
}

}  // namespace

Manifest manifest_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("datasets") || !j.at("datasets").is_array()) {
    throw Error(ErrorCode::format, "manifest needs a 'datasets' array");
  }
  auto resolve = [&](const Json& v) {
    std::filesystem::path p = v.get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  Manifest m;
  for (const auto& jd : j.at("datasets")) {
    ManifestDataset d;
    if (!jd.contains("name") || !jd.contains("splits")) {
      throw Error(ErrorCode::format, "manifest dataset needs 'name' and 'splits'");
    }
    d.name = jd.at("name").get<std::string>();
    if (jd.contains("label_column")) d.label_column = jd.at("label_column").get<std::string>();
    for (const auto& js : jd.at("splits")) {
      if (!js.contains("train") || !js.contains("test")) {
        throw Error(ErrorCode::format, "split of '" + d.name + "' needs 'train' and 'test'");
      }
      d.splits.push_back({resolve(js.at("train")), resolve(js.at("test"))});
    }
    if (d.splits.empty()) throw Error(ErrorCode::format, "dataset '" + d.name + "' lists no splits");
    m.datasets.push_back(std::move(d));
  }
  if (m.datasets.empty()) throw Error(ErrorCode::format, "manifest lists no datasets");
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_json(path), path.parent_path());
}

Method parse_method(std::string_view name) {
  Method m;
  m.name = std::string(name);
  std::string_view rest;
  if (name.starts_with("kmse-")) {
    m.ensemble = true;
    rest = name.substr(5);
  } else if (name.starts_with("kms-")) {
    rest = name.substr(4);
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown method '" + std::string(name) + "'");
  }
  if (rest == "rs") return m;
  if (rest == "gs") {
    m.grid = true;
    return m;
  }
  try {
    m.sampler = parse_sampler_kind(rest);
  } catch (const Error&) {
    throw Error(ErrorCode::invalid_argument, "unknown method '" + std::string(name) + "'");
  }
  return m;
}

std::vector<double> mid_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
    i = j;
  }
  return ranks;
}

std::uint64_t split_seed(std::uint64_t seed, std::string_view dataset, std::size_t split) {
  return derive_seed(derive_seed(seed, fnv1a(dataset)), split);
}

BenchmarkReport run_benchmark(const Manifest& manifest, const BenchmarkOptions& options) {
  if (options.methods.empty()) throw Error(ErrorCode::invalid_argument, "no benchmark methods given");
  BenchmarkReport report;
  report.options = options;
  const std::size_t n_methods = options.methods.size();

  for (const auto& ds_entry : manifest.datasets) {
    report.datasets.push_back(ds_entry.name);
    const std::size_t splits = options.max_splits == 0 ? ds_entry.splits.size()
                                                       : std::min(options.max_splits, ds_entry.splits.size());
    report.splits_used.push_back(splits);
    report.splits_available.push_back(ds_entry.splits.size());

    std::vector<BenchmarkCell> cells(n_methods);
    for (std::size_t m = 0; m < n_methods; ++m) {
      cells[m].dataset = ds_entry.name;
      cells[m].method = options.methods[m].name;
    }

    for (std::size_t s = 0; s < splits; ++s) {
      const Dataset train = load_csv(ds_entry.splits[s].train, ds_entry.label_column);
      const Dataset test = align_labels(load_csv(ds_entry.splits[s].test, ds_entry.label_column), train.label_names);
      const std::uint64_t seed = split_seed(options.seed, ds_entry.name, s);

      std::map<std::string, SearchReport> searches;
      for (std::size_t m = 0; m < n_methods; ++m) {
        const Method& method = options.methods[m];
        const std::string key = search_key(method);
        auto it = searches.find(key);
        if (it == searches.end()) {
          SearchOptions so;
          so.budget = options.budget;
          so.folds = options.folds;
          so.seed = seed;
          so.sampler = method.sampler;
          so.scaler = options.scaler;
          so.ber = options.search_ber;
          so.threads = options.threads;
          it = searches.emplace(key, method.grid ? grid_search(train, so) : random_search(train, so)).first;
        }
        std::vector<LabelId> predicted;
        if (method.ensemble) {
          predicted = ensemble_predict(build_ensemble(it->second, train, options.ensemble_size, seed), test.features);
        } else {
          predicted = kms_predict(fit_best(it->second, train), test.features);
        }
        cells[m].paper_ber.push_back(balanced_error_rate(test.labels, predicted, test.n_classes(), BerVariant::paper));
        cells[m].conventional_ber.push_back(
            balanced_error_rate(test.labels, predicted, test.n_classes(), BerVariant::conventional));
      }
    }

    std::vector<double> scores;
    for (auto& c : cells) {
      c.mean_paper = mean(c.paper_ber);
      c.mean_conventional = mean(c.conventional_ber);
      scores.push_back(options.rank_ber == BerVariant::paper ? c.mean_paper : c.mean_conventional);
      report.cells.push_back(c);
    }
    report.ranks.push_back(mid_ranks(scores));
  }

  report.average_rank.assign(n_methods, 0.0);
  for (const auto& row : report.ranks) {
    for (std::size_t m = 0; m < n_methods; ++m) report.average_rank[m] += row[m];
  }
  for (double& r : report.average_rank) r /= static_cast<double>(report.ranks.size());

  std::vector<std::size_t> order(n_methods);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return report.average_rank[a] < report.average_rank[b]; });
  for (std::size_t m : order) report.methods.push_back(options.methods[m].name);
  return report;
}

Json to_json(const BenchmarkReport& report) {
  const auto& o = report.options;
  Json datasets = Json::array();
  for (std::size_t d = 0; d < report.datasets.size(); ++d) {
    Json methods = Json::object();
    for (std::size_t m = 0; m < o.methods.size(); ++m) {
      const auto& c = report.cell(d, m);
      methods[c.method] = {{"mean_ber_paper", c.mean_paper},
                           {"mean_ber_conventional", c.mean_conventional},
                           {"split_ber_paper", c.paper_ber},
                           {"split_ber_conventional", c.conventional_ber},
                           {"rank", report.ranks[d][m]}};
    }
    datasets.push_back({{"name", report.datasets[d]},
                        {"splits_used", report.splits_used[d]},
                        {"splits_available", report.splits_available[d]},
                        {"methods", methods}});
  }
  Json avg = Json::object();
  for (std::size_t m = 0; m < o.methods.size(); ++m) avg[o.methods[m].name] = report.average_rank[m];
  std::vector<std::string> method_names;
  for (const auto& m : o.methods) method_names.push_back(m.name);
  return {{"format", "kernelcast-benchmark-report"},
          {"version", 1},
          {"seed", o.seed},
          {"max_splits", o.max_splits},
          {"budget", o.budget},
          {"folds", o.folds},
          {"ensemble_size", o.ensemble_size},
          {"scaler", to_string(o.scaler)},
          {"search_ber", to_string(o.search_ber)},
          {"rank_ber", to_string(o.rank_ber)},
          {"methods_requested", method_names},
          {"methods_by_rank", report.methods},
          {"average_rank", avg},
          {"datasets", datasets}};
}

}  // namespace kernelcast
