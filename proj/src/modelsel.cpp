// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/modelsel.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "kernelcast/error.hpp"
#include "kernelcast/parallel.hpp"
#include "kernelcast/random.hpp"

namespace kernelcast {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::map<std::string, std::string, std::less<>> split_key(std::string_view key) {
  std::map<std::string, std::string, std::less<>> fields;
  std::size_t pos = 0;
  while (pos < key.size()) {
    const std::size_t end = std::min(key.find(' ', pos), key.size());
    const std::string_view token = key.substr(pos, end - pos);
    pos = end + 1;
    if (token.empty()) continue;
    const std::size_t eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::parse, "configuration field '" + std::string(token) + "' has no '='");
    }
    fields.emplace(std::string(token.substr(0, eq)), std::string(token.substr(eq + 1)));
  }
  return fields;
}

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::parse, "invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) { return kind == ClassifierKind::knn ? "knn" : "gnb"; }

ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "gnb") return ClassifierKind::gnb;
  if (name == "knn") return ClassifierKind::knn;
  throw Error(ErrorCode::invalid_argument, "unknown classifier '" + std::string(name) + "'");
}

void validate(const Configuration& cfg) {
  if (std::find(std::begin(grid_reference_counts), std::end(grid_reference_counts), cfg.k_references) ==
      std::end(grid_reference_counts)) {
    throw Error(ErrorCode::invalid_argument,
                "reference count " + std::to_string(cfg.k_references) + " is not one of 4, 8, 16, 32, 64");
  }
  if (cfg.sampler == SamplerKind::kmeans &&
      (cfg.sampling_distance != DistanceKind::euclidean || cfg.ref_type != RefType::centroids)) {
    throw Error(ErrorCode::invalid_argument, "k-means configurations need euclidean distance and centroids");
  }
  if ((cfg.classifier == ClassifierKind::knn) != cfg.knn.has_value()) {
    throw Error(ErrorCode::invalid_argument, "kNN parameters must be given exactly for the kNN classifier");
  }
  if (cfg.knn && std::find(std::begin(grid_neighbor_counts), std::end(grid_neighbor_counts),
                           cfg.knn->neighbors) == std::end(grid_neighbor_counts)) {
    throw Error(ErrorCode::invalid_argument,
                "neighbor count " + std::to_string(cfg.knn->neighbors) + " is not one of 1, 5, 11, 21");
  }
}

std::string config_key(const Configuration& cfg) {
  std::string key = "k=" + std::to_string(cfg.k_references);
  key += " dist=";
  key += to_string(cfg.sampling_distance);
  key += " sampler=";
  key += to_string(cfg.sampler);
  key += " kernel=";
  key += to_string(cfg.kernel);
  key += " ref=";
  key += to_string(cfg.ref_type);
  key += " clf=";
  key += to_string(cfg.classifier);
  if (cfg.knn) {
    key += " nn=" + std::to_string(cfg.knn->neighbors);
    key += " weight=";
    key += to_string(cfg.knn->weighting);
    key += " nndist=";
    key += to_string(cfg.knn->distance);
  }
  key += " scaler=";
  key += to_string(cfg.scaler);
  return key;
}

Configuration parse_config_key(std::string_view key) {
  auto fields = split_key(key);
  auto take = [&](std::string_view name) -> std::string {
    auto it = fields.find(name);
    if (it == fields.end()) throw Error(ErrorCode::parse, "configuration lacks '" + std::string(name) + "'");
    std::string v = it->second;
    fields.erase(it);
    return v;
  };
  Configuration cfg;
  cfg.k_references = parse_count(take("k"), "reference count");
  cfg.sampling_distance = parse_distance_kind(take("dist"));
  cfg.sampler = parse_sampler_kind(take("sampler"));
  cfg.kernel = parse_kernel_kind(take("kernel"));
  cfg.ref_type = parse_ref_type(take("ref"));
  cfg.classifier = parse_classifier_kind(take("clf"));
  if (cfg.classifier == ClassifierKind::knn) {
    KnnParams p;
    p.neighbors = parse_count(take("nn"), "neighbor count");
    p.weighting = parse_weighting(take("weight"));
    p.distance = parse_distance_kind(take("nndist"));
    cfg.knn = p;
  }
  if (fields.count("scaler") != 0) cfg.scaler = parse_scaler_kind(take("scaler"));
  if (!fields.empty()) {
    throw Error(ErrorCode::parse, "unexpected configuration field '" + fields.begin()->first + "'");
  }
  validate(cfg);
  return cfg;
}

std::uint64_t config_hash(const Configuration& cfg) { return fnv1a(config_key(cfg)); }

std::vector<Configuration> enumerate_grid(std::optional<SamplerKind> sampler, ScalerKind scaler) {
  std::vector<Configuration> classifiers;
  {
    Configuration gnb;
    gnb.classifier = ClassifierKind::gnb;
    classifiers.push_back(gnb);
    for (std::size_t nn : grid_neighbor_counts) {
      for (auto w : {Weighting::uniform, Weighting::distance}) {
        for (auto d : {DistanceKind::euclidean, DistanceKind::angle}) {
          Configuration knn;
          knn.classifier = ClassifierKind::knn;
          knn.knn = KnnParams{nn, w, d};
          classifiers.push_back(knn);
        }
      }
    }
  }

  std::vector<Configuration> grid;
  for (std::size_t k : grid_reference_counts) {
    for (auto dist : {DistanceKind::euclidean, DistanceKind::angle}) {
      for (auto s : {SamplerKind::random, SamplerKind::kmeans, SamplerKind::density, SamplerKind::fft}) {
        if (sampler && *sampler != s) continue;
        for (auto kernel : {KernelKind::linear, KernelKind::gaussian, KernelKind::sigmoid, KernelKind::cauchy}) {
          for (auto ref : {RefType::centers, RefType::centroids}) {
            if (s == SamplerKind::kmeans && (dist != DistanceKind::euclidean || ref != RefType::centroids)) continue;
            for (const auto& clf : classifiers) {
              Configuration cfg = clf;
              cfg.k_references = k;
              cfg.sampling_distance = dist;
              cfg.sampler = s;
              cfg.kernel = kernel;
              cfg.ref_type = ref;
              cfg.scaler = scaler;
              grid.push_back(cfg);
            }
          }
        }
      }
    }
  }
  return grid;
}

std::string_view to_string(BerVariant v) { return v == BerVariant::conventional ? "conventional" : "paper"; }

BerVariant parse_ber_variant(std::string_view name) {
  if (name == "paper") return BerVariant::paper;
  if (name == "conventional") return BerVariant::conventional;
  throw Error(ErrorCode::invalid_argument, "unknown BER variant '" + std::string(name) + "'");
}

BerDetail balanced_error_rate_detail(std::span<const LabelId> truth, std::span<const LabelId> predicted,
                                     std::size_t n_classes, BerVariant variant) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::dimension_mismatch, "truth has " + std::to_string(truth.size()) +
                                                   " labels, predictions have " + std::to_string(predicted.size()));
  }
  if (n_classes == 0) throw Error(ErrorCode::invalid_argument, "BER needs at least one class");
  std::vector<std::size_t> fp(n_classes, 0), fn(n_classes, 0), support(n_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= n_classes || predicted[i] >= n_classes) {
      throw Error(ErrorCode::invalid_argument, "label id out of range in BER");
    }
    ++support[truth[i]];
    if (truth[i] != predicted[i]) {
      ++fn[truth[i]];
      ++fp[predicted[i]];
    }
  }

  BerDetail out;
  double sum = 0.0;
  std::size_t terms = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (variant == BerVariant::conventional) {
      if (support[c] == 0) continue;
      sum += static_cast<double>(fn[c]) / static_cast<double>(support[c]);
      ++terms;
      continue;
    }
    if (support[c] == 0) {
      out.warnings.push_back("class " + std::to_string(c) + " has no truth samples; its term is FP/1");
      sum += static_cast<double>(fp[c]);
    } else {
      sum += static_cast<double>(fp[c] + fn[c]) / static_cast<double>(support[c]);
    }
    ++terms;
  }
  if (terms == 0) throw Error(ErrorCode::insufficient_data, "BER of an empty label vector");
  out.value = sum / static_cast<double>(terms);
  return out;
}

double balanced_error_rate(std::span<const LabelId> truth, std::span<const LabelId> predicted,
                           std::size_t n_classes, BerVariant variant) {
  return balanced_error_rate_detail(truth, predicted, n_classes, variant).value;
}

std::uint64_t config_seed(std::uint64_t master_seed, const Configuration& cfg) {
  return derive_seed(master_seed, config_hash(cfg));
}

KmsModel kms_fit(const Configuration& cfg, const Dataset& ds, std::uint64_t seed) {
  validate(cfg);
  validate(ds);
  KmsModel m;
  m.config = cfg;
  m.label_names = ds.label_names;
  m.n_features = ds.dims();
  m.scaler = fit_scaler(cfg.scaler, ds.features);
  const Matrix scaled = apply_scaler(m.scaler, ds.features);
  m.refs = select_references(scaled, cfg.sampler, cfg.k_references, cfg.sampling_distance, cfg.ref_type, seed);
  Matrix mapped = map_features(scaled, m.refs, cfg.kernel);
  if (cfg.classifier == ClassifierKind::knn) {
    m.inner = knn_fit(std::move(mapped), ds.labels, ds.n_classes(), *cfg.knn);
  } else {
    m.inner = gnb_fit(mapped, ds.labels, ds.n_classes());
  }
  return m;
}

std::vector<LabelId> kms_predict(const KmsModel& model, const Matrix& queries) {
  if (queries.cols() != model.n_features) {
    throw Error(ErrorCode::dimension_mismatch, "queries have " + std::to_string(queries.cols()) +
                                                   " features, model expects " + std::to_string(model.n_features));
  }
  const Matrix mapped = map_features(apply_scaler(model.scaler, queries), model.refs, model.config.kernel);
  if (const auto* knn = std::get_if<KnnModel>(&model.inner)) return knn_predict(*knn, mapped);
  return gnb_predict(std::get<GnbModel>(model.inner), mapped);
}

Evaluation evaluate_config(const Configuration& cfg, const Dataset& ds, const FoldPlan& folds,
                           std::uint64_t seed, BerVariant variant) {
  Evaluation ev;
  const std::uint64_t base = config_seed(seed, cfg);
  try {
    double sum = 0.0;
    for (std::size_t f = 0; f < folds.fold_count; ++f) {
      const Dataset train = ds.subset(folds.train_rows(f));
      const Dataset test = ds.subset(folds.test_rows(f));
      const KmsModel model = kms_fit(cfg, train, derive_seed(base, f + 1));
      const auto predicted = kms_predict(model, test.features);
      BerDetail ber = balanced_error_rate_detail(test.labels, predicted, ds.n_classes(), variant);
      for (auto& w : ber.warnings) ev.warnings.push_back("fold " + std::to_string(f) + ": " + w);
      ev.fold_bers.push_back(ber.value);
      sum += ber.value;
    }
    ev.cv_ber = sum / static_cast<double>(folds.fold_count);
  } catch (const std::exception& e) {
    ev.cv_ber = inf;
    ev.error = e.what();
  }
  return ev;
}

const SearchEntry& SearchReport::best_entry() const {
  if (!best) throw Error(ErrorCode::insufficient_data, "every evaluated configuration failed");
  return evaluated.at(*best);
}

FoldPlan search_folds(const Dataset& ds, const SearchOptions& opts) {
  return make_folds(ds, opts.folds, derive_seed(opts.seed, fnv1a("folds")));
}

SearchReport run_search(const Dataset& ds, std::vector<Configuration> configs, const SearchOptions& opts,
                        std::string mode) {
  validate(ds);
  if (configs.empty()) throw Error(ErrorCode::invalid_argument, "no configurations to evaluate");
  const auto start = std::chrono::steady_clock::now();

  SearchReport report;
  report.mode = std::move(mode);
  report.seed = opts.seed;
  report.fold_seed = derive_seed(opts.seed, fnv1a("folds"));
  report.folds = opts.folds;
  report.budget = opts.budget;
  report.sampler = opts.sampler;
  report.scaler = opts.scaler;
  report.ber = opts.ber;
  report.n_samples = ds.size();
  report.n_features = ds.dims();
  report.label_names = ds.label_names;

  const FoldPlan folds = search_folds(ds, opts);
  report.evaluated.resize(configs.size());
  parallel_for(
      configs.size(),
      [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        Evaluation ev = evaluate_config(configs[i], ds, folds, opts.seed, opts.ber);
        SearchEntry& e = report.evaluated[i];
        e.config = configs[i];
        e.cv_ber = ev.cv_ber;
        e.fold_bers = std::move(ev.fold_bers);
        e.seed = config_seed(opts.seed, configs[i]);
        e.error = std::move(ev.error);
        e.warnings = std::move(ev.warnings);
        e.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      },
      opts.threads);

  for (std::size_t i = 0; i < report.evaluated.size(); ++i) {
    const double v = report.evaluated[i].cv_ber;
    if (!std::isfinite(v)) continue;
    if (!report.best || v < report.evaluated[*report.best].cv_ber) report.best = i;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SearchReport random_search(const Dataset& ds, const SearchOptions& opts) {
  if (opts.budget == 0) throw Error(ErrorCode::invalid_argument, "search budget must be positive");
  std::vector<Configuration> grid = enumerate_grid(opts.sampler, opts.scaler);
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "the sampler filter admits no configuration");
  const std::size_t take = std::min(opts.budget, grid.size());
  Rng rng(derive_seed(opts.seed, fnv1a("random-search")));
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, grid.size() - i));
    std::swap(grid[i], grid[j]);
  }
  grid.resize(take);
  return run_search(ds, std::move(grid), opts, "random");
}

SearchReport grid_search(const Dataset& ds, const SearchOptions& opts) {
  std::vector<Configuration> grid = enumerate_grid(opts.sampler, opts.scaler);
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "the sampler filter admits no configuration");
  return run_search(ds, std::move(grid), opts, "grid");
}

std::vector<const SearchEntry*> ranked_entries(const SearchReport& report) {
  std::vector<const SearchEntry*> out;
  for (const auto& e : report.evaluated) {
    if (std::isfinite(e.cv_ber)) out.push_back(&e);
  }
  std::stable_sort(out.begin(), out.end(), [](const SearchEntry* a, const SearchEntry* b) { return a->cv_ber < b->cv_ber; });
  return out;
}

KmsModel fit_best(const SearchReport& report, const Dataset& ds) {
  const SearchEntry& best = report.best_entry();
  KmsModel m = kms_fit(best.config, ds, config_seed(report.seed, best.config));
  m.cv_ber = best.cv_ber;
  return m;
}

}  // namespace kernelcast
