// SPDX-License-Identifier: Apache-2.0
#include "kernelcast/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "kernelcast/error.hpp"

namespace kernelcast {
namespace {

constexpr const char* model_format = "kernelcast-model";
constexpr const char* report_format = "kernelcast-search-report";

template <typename T>
T field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(ErrorCode::format, std::string("missing field '") + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::format, std::string("field '") + name + "': " + e.what());
  }
}

void check_header(const Json& j, const char* format, int version) {
  if (field<std::string>(j, "format") != format) {
    throw Error(ErrorCode::format, std::string("document is not a ") + format);
  }
  const int v = field<int>(j, "version");
  if (v != version) {
    throw Error(ErrorCode::format, "unsupported " + std::string(format) + " version " + std::to_string(v));
  }
}

Json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", m.data()}};
}

Matrix matrix_from_json(const Json& j) {
  return Matrix(field<std::size_t>(j, "rows"), field<std::size_t>(j, "cols"),
                field<std::vector<double>>(j, "values"));
}

Json score_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double score_from_json(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

Json to_json(const Configuration& cfg) {
  Json j = {{"key", config_key(cfg)},
            {"k_references", cfg.k_references},
            {"sampling_distance", to_string(cfg.sampling_distance)},
            {"sampler", to_string(cfg.sampler)},
            {"kernel", to_string(cfg.kernel)},
            {"ref_type", to_string(cfg.ref_type)},
            {"classifier", to_string(cfg.classifier)},
            {"scaler", to_string(cfg.scaler)}};
  if (cfg.knn) {
    j["knn"] = {{"neighbors", cfg.knn->neighbors},
                {"weighting", to_string(cfg.knn->weighting)},
                {"distance", to_string(cfg.knn->distance)}};
  } else {
    j["knn"] = nullptr;
  }
  return j;
}

// Structural errors (wrong types, missing nested keys) surface as format errors.
template <typename F>
auto translated(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::format, std::string("malformed document: ") + e.what());
  }
}

static Configuration configuration_from_json_unchecked(const Json& j) {
  Configuration cfg;
  cfg.k_references = field<std::size_t>(j, "k_references");
  cfg.sampling_distance = parse_distance_kind(field<std::string>(j, "sampling_distance"));
  cfg.sampler = parse_sampler_kind(field<std::string>(j, "sampler"));
  cfg.kernel = parse_kernel_kind(field<std::string>(j, "kernel"));
  cfg.ref_type = parse_ref_type(field<std::string>(j, "ref_type"));
  cfg.classifier = parse_classifier_kind(field<std::string>(j, "classifier"));
  cfg.scaler = parse_scaler_kind(field<std::string>(j, "scaler"));
  if (j.contains("knn") && !j.at("knn").is_null()) {
    const Json& k = j.at("knn");
    cfg.knn = KnnParams{field<std::size_t>(k, "neighbors"), parse_weighting(field<std::string>(k, "weighting")),
                        parse_distance_kind(field<std::string>(k, "distance"))};
  }
  validate(cfg);
  return cfg;
}

Json to_json(const ScalerSpec& spec) {
  return {{"kind", to_string(spec.kind)}, {"offset", spec.offset}, {"scale", spec.scale}};
}

static ScalerSpec scaler_from_json_unchecked(const Json& j) {
  ScalerSpec s;
  s.kind = parse_scaler_kind(field<std::string>(j, "kind"));
  s.offset = field<std::vector<double>>(j, "offset");
  s.scale = field<std::vector<double>>(j, "scale");
  if (s.offset.size() != s.scale.size()) throw Error(ErrorCode::format, "scaler offset and scale differ in size");
  return s;
}

Json to_json(const FoldPlan& plan) { return {{"fold_count", plan.fold_count}, {"assignments", plan.assignments}}; }

static FoldPlan fold_plan_from_json_unchecked(const Json& j) {
  FoldPlan p;
  p.fold_count = field<std::size_t>(j, "fold_count");
  p.assignments = field<std::vector<std::size_t>>(j, "assignments");
  for (std::size_t a : p.assignments) {
    if (a >= p.fold_count) throw Error(ErrorCode::format, "fold assignment out of range");
  }
  return p;
}

Json to_json(const KmsModel& model) {
  Json inner;
  if (const auto* knn = std::get_if<KnnModel>(&model.inner)) {
    inner = {{"type", "knn"},
             {"neighbors", knn->params.neighbors},
             {"weighting", to_string(knn->params.weighting)},
             {"distance", to_string(knn->params.distance)},
             {"train", matrix_json(knn->train)},
             {"labels", knn->labels},
             {"n_classes", knn->n_classes}};
  } else {
    const auto& gnb = std::get<GnbModel>(model.inner);
    inner = {{"type", "gnb"},
             {"priors", gnb.priors},
             {"present", std::vector<int>(gnb.present.begin(), gnb.present.end())},
             {"means", matrix_json(gnb.means)},
             {"variances", matrix_json(gnb.variances)},
             {"var_floor", gnb.var_floor}};
  }
  return {{"format", model_format},
          {"version", model_format_version},
          {"kind", "kms"},
          {"config", to_json(model.config)},
          {"cv_ber", score_json(model.cv_ber)},
          {"label_names", model.label_names},
          {"n_features", model.n_features},
          {"scaler", to_json(model.scaler)},
          {"refs",
           {{"sampler", to_string(model.refs.sampler)},
            {"distance", to_string(model.refs.distance)},
            {"ref_type", to_string(model.refs.ref_type)},
            {"centers", matrix_json(model.refs.refs)},
            {"sigmas", model.refs.sigmas}}},
          {"inner", inner}};
}

static KmsModel kms_model_from_json_unchecked(const Json& j) {
  check_header(j, model_format, model_format_version);
  if (field<std::string>(j, "kind") != "kms") throw Error(ErrorCode::format, "model document is not a single model");
  KmsModel m;
  m.config = configuration_from_json(j.at("config"));
  m.cv_ber = score_from_json(j.at("cv_ber"));
  m.label_names = field<std::vector<std::string>>(j, "label_names");
  m.n_features = field<std::size_t>(j, "n_features");
  m.scaler = scaler_from_json(j.at("scaler"));

  const Json& r = j.at("refs");
  m.refs.sampler = parse_sampler_kind(field<std::string>(r, "sampler"));
  m.refs.distance = parse_distance_kind(field<std::string>(r, "distance"));
  m.refs.ref_type = parse_ref_type(field<std::string>(r, "ref_type"));
  m.refs.refs = matrix_from_json(r.at("centers"));
  m.refs.sigmas = field<std::vector<double>>(r, "sigmas");
  if (m.refs.sigmas.size() != m.refs.size() || m.refs.refs.cols() != m.n_features) {
    throw Error(ErrorCode::format, "reference block has inconsistent shape");
  }

  const Json& in = j.at("inner");
  const std::string type = field<std::string>(in, "type");
  if (type == "knn") {
    KnnParams p{field<std::size_t>(in, "neighbors"), parse_weighting(field<std::string>(in, "weighting")),
                parse_distance_kind(field<std::string>(in, "distance"))};
    m.inner = knn_fit(matrix_from_json(in.at("train")), field<std::vector<LabelId>>(in, "labels"),
                      field<std::size_t>(in, "n_classes"), p);
  } else if (type == "gnb") {
    GnbModel g;
    g.priors = field<std::vector<double>>(in, "priors");
    const auto present = field<std::vector<int>>(in, "present");
    g.present.assign(present.begin(), present.end());
    g.means = matrix_from_json(in.at("means"));
    g.variances = matrix_from_json(in.at("variances"));
    g.var_floor = field<double>(in, "var_floor");
    if (g.present.size() != g.priors.size() || g.means.rows() != g.priors.size() ||
        g.variances.rows() != g.priors.size() || g.means.cols() != g.variances.cols()) {
      throw Error(ErrorCode::format, "naive Bayes block has inconsistent shape");
    }
    m.inner = std::move(g);
  } else {
    throw Error(ErrorCode::format, "unknown inner classifier '" + type + "'");
  }
  return m;
}

Json to_json(const Ensemble& ens) {
  Json members = Json::array();
  for (const auto& m : ens.members) members.push_back(to_json(m));
  return {{"format", model_format},
          {"version", model_format_version},
          {"kind", "ensemble"},
          {"vote_seed", ens.vote_seed},
          {"members", members}};
}

static Ensemble ensemble_from_json_unchecked(const Json& j) {
  check_header(j, model_format, model_format_version);
  if (field<std::string>(j, "kind") != "ensemble") throw Error(ErrorCode::format, "model document is not an ensemble");
  Ensemble ens;
  ens.vote_seed = field<std::uint64_t>(j, "vote_seed");
  for (const auto& m : j.at("members")) ens.members.push_back(kms_model_from_json(m));
  if (ens.members.empty()) throw Error(ErrorCode::format, "ensemble has no members");
  return ens;
}

Json to_json(const SearchReport& report, bool include_timing) {
  Json entries = Json::array();
  for (const auto& e : report.evaluated) {
    Json je = {{"config", to_json(e.config)},
               {"cv_ber", score_json(e.cv_ber)},
               {"fold_bers", e.fold_bers},
               {"seed", e.seed},
               {"error", e.error},
               {"warnings", e.warnings}};
    if (include_timing) je["wall_seconds"] = e.wall_seconds;
    entries.push_back(std::move(je));
  }
  Json j = {{"format", report_format},
            {"version", report_format_version},
            {"mode", report.mode},
            {"seed", report.seed},
            {"fold_seed", report.fold_seed},
            {"folds", report.folds},
            {"budget", report.budget},
            {"sampler", report.sampler ? Json(to_string(*report.sampler)) : Json(nullptr)},
            {"scaler", to_string(report.scaler)},
            {"ber", to_string(report.ber)},
            {"n_samples", report.n_samples},
            {"n_features", report.n_features},
            {"label_names", report.label_names},
            {"best", report.best ? Json(*report.best) : Json(nullptr)},
            {"evaluated", entries}};
  if (include_timing) j["wall_seconds"] = report.wall_seconds;
  return j;
}

static SearchReport search_report_from_json_unchecked(const Json& j) {
  check_header(j, report_format, report_format_version);
  SearchReport r;
  r.mode = field<std::string>(j, "mode");
  r.seed = field<std::uint64_t>(j, "seed");
  r.fold_seed = field<std::uint64_t>(j, "fold_seed");
  r.folds = field<std::size_t>(j, "folds");
  r.budget = field<std::size_t>(j, "budget");
  if (!j.at("sampler").is_null()) r.sampler = parse_sampler_kind(field<std::string>(j, "sampler"));
  r.scaler = parse_scaler_kind(field<std::string>(j, "scaler"));
  r.ber = parse_ber_variant(field<std::string>(j, "ber"));
  r.n_samples = field<std::size_t>(j, "n_samples");
  r.n_features = field<std::size_t>(j, "n_features");
  r.label_names = field<std::vector<std::string>>(j, "label_names");
  if (!j.at("best").is_null()) r.best = field<std::size_t>(j, "best");
  if (j.contains("wall_seconds")) r.wall_seconds = field<double>(j, "wall_seconds");
  for (const auto& je : j.at("evaluated")) {
    SearchEntry e;
    e.config = configuration_from_json(je.at("config"));
    e.cv_ber = score_from_json(je.at("cv_ber"));
    e.fold_bers = field<std::vector<double>>(je, "fold_bers");
    e.seed = field<std::uint64_t>(je, "seed");
    e.error = field<std::string>(je, "error");
    e.warnings = field<std::vector<std::string>>(je, "warnings");
    if (je.contains("wall_seconds")) e.wall_seconds = field<double>(je, "wall_seconds");
    r.evaluated.push_back(std::move(e));
  }
  if (r.best && *r.best >= r.evaluated.size()) throw Error(ErrorCode::format, "best index out of range");
  return r;
}

static Predictor predictor_from_json_unchecked(const Json& j) {
  const std::string kind = field<std::string>(j, "kind");
  if (kind == "kms") return kms_model_from_json(j);
  if (kind == "ensemble") return ensemble_from_json(j);
  throw Error(ErrorCode::format, "unknown model kind '" + kind + "'");
}

std::vector<LabelId> predict(const Predictor& p, const Matrix& queries) {
  if (const auto* m = std::get_if<KmsModel>(&p)) return kms_predict(*m, queries);
  return ensemble_predict(std::get<Ensemble>(p), queries);
}

const std::vector<std::string>& label_names(const Predictor& p) {
  if (const auto* m = std::get_if<KmsModel>(&p)) return m->label_names;
  return std::get<Ensemble>(p).members.front().label_names;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::parse, "'" + path.string() + "': " + e.what());
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io, "write to '" + path.string() + "' failed");
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Configuration configuration_from_json(const Json& j) {
  return translated([&] { return configuration_from_json_unchecked(j); });
}
ScalerSpec scaler_from_json(const Json& j) {
  return translated([&] { return scaler_from_json_unchecked(j); });
}
FoldPlan fold_plan_from_json(const Json& j) {
  return translated([&] { return fold_plan_from_json_unchecked(j); });
}
KmsModel kms_model_from_json(const Json& j) {
  return translated([&] { return kms_model_from_json_unchecked(j); });
}
Ensemble ensemble_from_json(const Json& j) {
  return translated([&] { return ensemble_from_json_unchecked(j); });
}
SearchReport search_report_from_json(const Json& j) {
  return translated([&] { return search_report_from_json_unchecked(j); });
}
Predictor predictor_from_json(const Json& j) {
  return translated([&] { return predictor_from_json_unchecked(j); });
}

}  // namespace kernelcast
