#pragma once

// End-to-end orchestration: dataset -> preprocessing -> stratified split ->
// vectorization -> fit -> test-set evaluation -> report, plus greedy search
// for the neural model and evaluation of saved models.

#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "parsent/classical/serialize.hpp"
#include "parsent/dataset.hpp"
#include "parsent/eval.hpp"
#include "parsent/neural/checkpoint.hpp"
#include "parsent/neural/train.hpp"
#include "parsent/preprocess.hpp"
#include "parsent/search.hpp"
#include "parsent/vectorize.hpp"

namespace parsent {

enum class ModelKind { GNB, Tree, GBoost, Forest, LogReg, CnnLstm };

/// Report row order.
inline constexpr std::array<ModelKind, 6> kAllModels = {ModelKind::GNB,    ModelKind::Tree,
                                                        ModelKind::GBoost, ModelKind::Forest,
                                                        ModelKind::LogReg, ModelKind::CnnLstm};

inline std::string selector_name(ModelKind k) {
  switch (k) {
    case ModelKind::GNB: return "gnb";
    case ModelKind::Tree: return "tree";
    case ModelKind::GBoost: return "gboost";
    case ModelKind::Forest: return "forest";
    case ModelKind::LogReg: return "logreg";
    case ModelKind::CnnLstm: return "cnn-lstm";
  }
  return "";
}

inline std::string display_name(ModelKind k) {
  switch (k) {
    case ModelKind::GNB: return "Gaussian Naive Bayes";
    case ModelKind::Tree: return "Decision Tree";
    case ModelKind::GBoost: return "Gradient Boosting";
    case ModelKind::Forest: return "Random Forest";
    case ModelKind::LogReg: return "Logistic Regression";
    case ModelKind::CnnLstm: return "CNN-LSTM";
  }
  return "";
}

/// Accepts the closed selector set, including "all"; keeps report order.
inline std::vector<ModelKind> parse_selectors(const std::vector<std::string>& names) {
  std::set<ModelKind> chosen;
  for (const auto& n : names) {
    if (n == "all") {
      chosen.insert(kAllModels.begin(), kAllModels.end());
      continue;
    }
    bool found = false;
    for (auto k : kAllModels)
      if (selector_name(k) == n) chosen.insert(k), found = true;
    if (!found) throw ConfigError("unknown model selector '" + n + "'");
  }
  if (chosen.empty()) throw ConfigError("no model selected");
  std::vector<ModelKind> out;
  for (auto k : kAllModels)
    if (chosen.contains(k)) out.push_back(k);
  return out;
}

struct NeuralSettings {
  neural::ModelShape shape;  // input_dim and classes are filled from the data
  std::size_t max_len = 64;
  neural::TrainConfig train;
};

struct SearchSettings {
  double validation_fraction = 0.1;
  SearchGrid grid;
};

struct ExperimentConfig {
  std::string dataset;
  std::vector<ModelKind> models{kAllModels.begin(), kAllModels.end()};
  ResourcePaths resources;
  std::vector<PreprocessStep> steps{kAllSteps.begin(), kAllSteps.end()};
  std::string embeddings;
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  bool stratified = true;
  std::size_t min_count = 1;
  ReportFormat report = ReportFormat::Tsv;
  std::string out_dir;

  double gnb_var_smoothing = 1e-9;
  classical::LogRegParams logreg;
  classical::TreeParams tree;
  classical::ForestParams forest;
  classical::BoostParams gboost;
  NeuralSettings neural;
  SearchSettings search;

  bool uses(ModelKind k) const { return std::find(models.begin(), models.end(), k) != models.end(); }

  /// Checks everything that can be checked before loading data.
  void validate() const {
    auto require_file = [](const std::string& path, const std::string& what) {
      if (path.empty()) throw ConfigError(what + " path is required");
      if (!std::filesystem::is_regular_file(path))
        throw ConfigError(what + " '" + path + "' does not exist");
    };
    require_file(dataset, "dataset");
    for (const auto* p : {&resources.stopwords, &resources.emoji_map, &resources.stem_rules,
                          &resources.dictionary})
      if (!p->empty()) require_file(*p, "resource");
    if (models.empty()) throw ConfigError("no model selected");
    if (uses(ModelKind::CnnLstm)) {
      if (embeddings.empty()) throw ConfigError("cnn-lstm needs an embedding file (\"embeddings\")");
      require_file(embeddings, "embedding file");
      if (neural.max_len < 1) throw ConfigError("max_len must be >= 1");
      neural.train.validate();
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
      throw ConfigError("train_fraction must be in (0, 1)");
    if (min_count < 1) throw ConfigError("min_count must be >= 1");
    if (forest.n_trees < 1) throw ConfigError("forest n_trees must be >= 1");
    if (gboost.n_stages < 1) throw ConfigError("gboost n_stages must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Config file

namespace detail {

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const std::string& section) {
  if (!j.is_object()) throw ConfigError(section + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + section);
  }
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? p : (base / path).string();
}

}  // namespace detail

/// Builds a config from JSON; relative paths resolve against `base_dir`.
inline ExperimentConfig config_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {}) {
  using detail::read_opt;
  ExperimentConfig cfg;
  try {
    detail::check_keys(j, {"dataset", "models", "resources", "steps", "embeddings", "seed",
                           "train_fraction", "stratified", "min_count", "report", "out", "gnb",
                           "logreg", "tree", "forest", "gboost", "cnn_lstm", "search"},
                       "config");
    read_opt(j, "dataset", cfg.dataset);
    cfg.dataset = detail::resolve(base_dir, cfg.dataset);
    if (j.contains("models")) {
      const auto& m = j.at("models");
      cfg.models = parse_selectors(m.is_string() ? std::vector<std::string>{m.get<std::string>()}
                                                 : m.get<std::vector<std::string>>());
    }
    if (j.contains("resources")) {
      const auto& r = j.at("resources");
      detail::check_keys(r, {"stopwords", "emoji_map", "stem_rules", "dictionary"}, "resources");
      read_opt(r, "stopwords", cfg.resources.stopwords);
      read_opt(r, "emoji_map", cfg.resources.emoji_map);
      read_opt(r, "stem_rules", cfg.resources.stem_rules);
      read_opt(r, "dictionary", cfg.resources.dictionary);
      for (auto* p : {&cfg.resources.stopwords, &cfg.resources.emoji_map, &cfg.resources.stem_rules,
                      &cfg.resources.dictionary})
        *p = detail::resolve(base_dir, *p);
    }
    if (j.contains("steps")) {
      cfg.steps.clear();
      for (const auto& s : j.at("steps").get<std::vector<std::string>>())
        if (s != "tokenize") cfg.steps.push_back(parse_step(s));
    }
    read_opt(j, "embeddings", cfg.embeddings);
    cfg.embeddings = detail::resolve(base_dir, cfg.embeddings);
    read_opt(j, "seed", cfg.seed);
    read_opt(j, "train_fraction", cfg.train_fraction);
    read_opt(j, "stratified", cfg.stratified);
    read_opt(j, "min_count", cfg.min_count);
    if (j.contains("report")) cfg.report = parse_report_format(j.at("report").get<std::string>());
    read_opt(j, "out", cfg.out_dir);
    cfg.out_dir = detail::resolve(base_dir, cfg.out_dir);

    if (j.contains("gnb")) {
      detail::check_keys(j["gnb"], {"var_smoothing"}, "gnb");
      read_opt(j["gnb"], "var_smoothing", cfg.gnb_var_smoothing);
    }
    if (j.contains("logreg")) {
      const auto& s = j["logreg"];
      detail::check_keys(s, {"learning_rate", "epochs", "l2"}, "logreg");
      read_opt(s, "learning_rate", cfg.logreg.learning_rate);
      read_opt(s, "epochs", cfg.logreg.epochs);
      read_opt(s, "l2", cfg.logreg.l2);
    }
    if (j.contains("tree")) {
      const auto& s = j["tree"];
      detail::check_keys(s, {"max_depth", "min_samples_split"}, "tree");
      read_opt(s, "max_depth", cfg.tree.max_depth);
      read_opt(s, "min_samples_split", cfg.tree.min_samples_split);
    }
    if (j.contains("forest")) {
      const auto& s = j["forest"];
      detail::check_keys(s, {"n_trees", "features_per_split", "bootstrap", "max_depth",
                             "min_samples_split"},
                         "forest");
      read_opt(s, "n_trees", cfg.forest.n_trees);
      read_opt(s, "features_per_split", cfg.forest.features_per_split);
      read_opt(s, "bootstrap", cfg.forest.bootstrap);
      read_opt(s, "max_depth", cfg.forest.tree.max_depth);
      read_opt(s, "min_samples_split", cfg.forest.tree.min_samples_split);
    }
    if (j.contains("gboost")) {
      const auto& s = j["gboost"];
      detail::check_keys(s, {"n_stages", "learning_rate", "max_depth", "min_samples_split"}, "gboost");
      read_opt(s, "n_stages", cfg.gboost.n_stages);
      read_opt(s, "learning_rate", cfg.gboost.learning_rate);
      read_opt(s, "max_depth", cfg.gboost.max_depth);
      read_opt(s, "min_samples_split", cfg.gboost.min_samples_split);
    }
    if (j.contains("cnn_lstm")) {
      const auto& s = j["cnn_lstm"];
      detail::check_keys(s, {"max_len", "kernel_width", "filters", "pool_size", "hidden",
                             "dropout_rate", "epochs", "batch_size", "learning_rate", "optimizer",
                             "loss"},
                         "cnn_lstm");
      auto& n = cfg.neural;
      read_opt(s, "max_len", n.max_len);
      read_opt(s, "kernel_width", n.shape.kernel_width);
      read_opt(s, "filters", n.shape.filters);
      read_opt(s, "pool_size", n.shape.pool_size);
      read_opt(s, "hidden", n.shape.hidden);
      read_opt(s, "dropout_rate", n.shape.dropout_rate);
      read_opt(s, "epochs", n.train.epochs);
      read_opt(s, "batch_size", n.train.batch_size);
      read_opt(s, "learning_rate", n.train.learning_rate);
      if (s.contains("optimizer")) n.train.optimizer = neural::parse_optimizer(s["optimizer"].get<std::string>());
      if (s.contains("loss")) n.train.loss = neural::parse_loss(s["loss"].get<std::string>());
    }
    if (j.contains("search")) {
      const auto& s = j["search"];
      detail::check_keys(s, {"validation_fraction", "grid"}, "search");
      read_opt(s, "validation_fraction", cfg.search.validation_fraction);
      if (s.contains("grid")) {
        const auto& g = s["grid"];
        detail::check_keys(g, {"epochs", "batch_size", "learning_rate", "loss", "optimizer"}, "search.grid");
        auto& grid = cfg.search.grid;
        read_opt(g, "epochs", grid.epochs);
        read_opt(g, "batch_size", grid.batch_size);
        read_opt(g, "learning_rate", grid.learning_rate);
        if (g.contains("loss")) {
          grid.loss.clear();
          for (const auto& l : g["loss"].get<std::vector<std::string>>()) grid.loss.push_back(neural::parse_loss(l));
        }
        if (g.contains("optimizer")) {
          grid.optimizer.clear();
          for (const auto& o : g["optimizer"].get<std::vector<std::string>>())
            grid.optimizer.push_back(neural::parse_optimizer(o));
        }
        grid.validate();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path());
}

/// Uses the standard resource file names found in `dir`.
inline ResourcePaths resources_in(const std::filesystem::path& dir) {
  ResourcePaths r;
  auto pick = [&](const char* name) {
    const auto p = dir / name;
    return std::filesystem::is_regular_file(p) ? p.string() : std::string();
  };
  r.stopwords = pick("stopwords.txt");
  r.emoji_map = pick("emoji.tsv");
  r.stem_rules = pick("stem_rules.tsv");
  r.dictionary = pick("dictionary.txt");
  return r;
}

// ---------------------------------------------------------------------------
// Running

struct PreparedData {
  LabeledDataset dataset;
  std::vector<TokenList> tokens;
  std::vector<std::size_t> labels;
  SplitIndices split;

  std::vector<TokenList> tokens_of(const std::vector<std::size_t>& rows) const {
    std::vector<TokenList> out;
    for (auto r : rows) out.push_back(tokens[r]);
    return out;
  }
  std::vector<std::size_t> labels_of(const std::vector<std::size_t>& rows) const {
    std::vector<std::size_t> out;
    for (auto r : rows) out.push_back(labels[r]);
    return out;
  }
};

inline PreprocessConfig preprocess_config_for(const ExperimentConfig& cfg) {
  auto pc = load_preprocess_config(cfg.resources);
  pc.steps_enabled = cfg.steps;
  pc.validate();
  return pc;
}

inline PreparedData prepare_data(const ExperimentConfig& cfg) {
  PreparedData d;
  d.dataset = load_dataset(cfg.dataset);
  const auto pc = preprocess_config_for(cfg);
  d.tokens.reserve(d.dataset.documents.size());
  for (const auto& doc : d.dataset.documents) d.tokens.push_back(preprocess(doc, pc));
  d.labels = d.dataset.label_indices();
  d.split = split(d.labels, d.dataset.num_classes(), {cfg.train_fraction, cfg.stratified, cfg.seed});
  if (d.split.train.empty() || d.split.test.empty())
    throw ConfigError("dataset too small for a train/test split");
  return d;
}

/// Seed streams derived from the experiment seed.
enum class SeedStream : std::uint64_t { Forest = 1, NeuralInit = 2, NeuralTrain = 3, Validation = 4 };

inline std::uint64_t derived_seed(const ExperimentConfig& cfg, SeedStream s) {
  return substream_seed(cfg.seed, static_cast<std::uint64_t>(s));
}

inline classical::AnyModel fit_classical(ModelKind kind, const ExperimentConfig& cfg,
                                         const classical::FeatureMatrix& x,
                                         const classical::Labels& y, std::size_t num_classes) {
  switch (kind) {
    case ModelKind::GNB: return classical::gnb_fit(x, y, num_classes, cfg.gnb_var_smoothing);
    case ModelKind::Tree: return classical::tree_fit(x, y, num_classes, cfg.tree);
    case ModelKind::GBoost: return classical::gboost_fit(x, y, num_classes, cfg.gboost);
    case ModelKind::Forest: {
      auto p = cfg.forest;
      p.seed = derived_seed(cfg, SeedStream::Forest);
      return classical::forest_fit(x, y, num_classes, p);
    }
    case ModelKind::LogReg: return classical::logreg_fit(x, y, num_classes, cfg.logreg);
    case ModelKind::CnnLstm: break;
  }
  throw ConfigError("not a classical model");
}

inline neural::CnnLstmModel<double> fit_neural(const ExperimentConfig& cfg, const SequenceBatch<double>& train,
                                               std::size_t num_classes, const neural::TrainConfig& tc) {
  auto shape = cfg.neural.shape;
  shape.input_dim = train.dim;
  shape.classes = num_classes;
  auto init = neural::CnnLstmModel<double>::initialized(shape, derived_seed(cfg, SeedStream::NeuralInit));
  auto run = tc;
  run.seed = derived_seed(cfg, SeedStream::NeuralTrain);
  return neural::train(std::move(init), train, run).model;
}

struct ExperimentResult {
  std::vector<NamedReport> reports;
  std::string report_text;
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

inline std::string report_file_name(ReportFormat f) { return f == ReportFormat::Tsv ? "report.tsv" : "report.json"; }

}  // namespace detail

/// Trains every selected model on the training split and evaluates it on
/// the held-out split. Fit functions only ever see training rows.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto data = prepare_data(cfg);
  const std::size_t C = data.dataset.num_classes();
  const auto train_tokens = data.tokens_of(data.split.train);
  const auto test_tokens = data.tokens_of(data.split.test);
  const auto y_train = data.labels_of(data.split.train);
  const auto y_test = data.labels_of(data.split.test);

  nlohmann::json manifest = {{"format", "parsent-experiment"},
                             {"version", 1},
                             {"class_names", data.dataset.class_names},
                             {"steps", nlohmann::json::array()},
                             {"resources",
                              {{"stopwords", cfg.resources.stopwords},
                               {"emoji_map", cfg.resources.emoji_map},
                               {"stem_rules", cfg.resources.stem_rules},
                               {"dictionary", cfg.resources.dictionary}}},
                             {"models", nlohmann::json::object()}};
  for (auto s : cfg.steps) manifest["steps"].push_back(step_name(s));
  std::filesystem::path out_dir(cfg.out_dir);
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  const bool any_classical =
      std::any_of(cfg.models.begin(), cfg.models.end(), [](auto k) { return k != ModelKind::CnnLstm; });
  std::optional<Vocabulary> vocab;
  classical::FeatureMatrix x_train, x_test;
  if (any_classical) {
    vocab = build_vocabulary(train_tokens, cfg.min_count);
    x_train = build_dtm(train_tokens, *vocab).to_dense();
    x_test = build_dtm(test_tokens, *vocab).to_dense();
    manifest["vocabulary"] = vocab->terms();
  }

  for (auto kind : cfg.models) {
    std::vector<std::size_t> preds;
    if (kind == ModelKind::CnnLstm) {
      const auto table = load_embedding_table(cfg.embeddings);
      const auto train = encode_sequences<double>(train_tokens, y_train, table, cfg.neural.max_len);
      const auto test = encode_sequences<double>(test_tokens, y_test, table, cfg.neural.max_len);
      const auto model = fit_neural(cfg, train, C, cfg.neural.train);
      preds = neural::predict(model, test).classes;
      if (!cfg.out_dir.empty()) {
        neural::save_checkpoint(model, (out_dir / "cnn-lstm.json").string());
        manifest["models"]["cnn-lstm"] = "cnn-lstm.json";
        manifest["embeddings"] = cfg.embeddings;
        manifest["max_len"] = cfg.neural.max_len;
      }
    } else {
      const auto model = fit_classical(kind, cfg, x_train, y_train, C);
      for (std::size_t i = 0; i < x_test.rows(); ++i) preds.push_back(classical::predict(model, x_test.row(i)).label);
      if (!cfg.out_dir.empty()) {
        const auto file = selector_name(kind) + ".json";
        classical::save_model(model, (out_dir / file).string());
        manifest["models"][selector_name(kind)] = file;
      }
    }
    result.reports.emplace_back(display_name(kind),
                                weighted_metrics(confusion_matrix(preds, y_test, data.dataset.class_names)));
  }
  result.report_text = render_report(result.reports, cfg.report);
  if (!cfg.out_dir.empty()) {
    detail::write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    detail::write_text(out_dir / detail::report_file_name(cfg.report), result.report_text);
  }
  return result;
}

/// Scores a training configuration without training (test hook).
using ConfigScorer = std::function<double(const neural::TrainConfig&)>;

struct SearchRunResult {
  GreedyResult search;
  NamedReport final_report;
  std::string report_text;
  nlohmann::json trace;
};

/// Greedy search for the neural model: scores each grid point by accuracy on
/// a validation slice carved from the training split, retrains the winner on
/// the full training split and evaluates it on the test split.
inline SearchRunResult run_search(const ExperimentConfig& cfg_in, const ConfigScorer& scorer = {}) {
  ExperimentConfig cfg = cfg_in;
  cfg.models = {ModelKind::CnnLstm};
  cfg.validate();
  const auto data = prepare_data(cfg);
  const std::size_t C = data.dataset.num_classes();
  const auto table = load_embedding_table(cfg.embeddings);

  const auto carve = carve_validation(data.split.train, data.labels, C, cfg.search.validation_fraction,
                                      derived_seed(cfg, SeedStream::Validation), cfg.stratified);
  const auto fit_set = encode_sequences<double>(data.tokens_of(carve.train), data.labels_of(carve.train),
                                                table, cfg.neural.max_len);
  const auto val_set = encode_sequences<double>(data.tokens_of(carve.test), data.labels_of(carve.test),
                                                table, cfg.neural.max_len);

  using Model = neural::CnnLstmModel<double>;
  std::function<Model(const neural::TrainConfig&)> train_fn;
  std::function<double(const Model&)> score_fn;
  if (scorer) {
    // Shape-only stand-in model; the scorer reads the config it was built for.
    auto last = std::make_shared<neural::TrainConfig>();
    train_fn = [last](const neural::TrainConfig& tc) {
      *last = tc;
      return Model{};
    };
    score_fn = [last, scorer](const Model&) { return scorer(*last); };
  } else {
    train_fn = [&](const neural::TrainConfig& tc) { return fit_neural(cfg, fit_set, C, tc); };
    score_fn = [&](const Model& m) {
      const auto preds = neural::predict(m, val_set).classes;
      return accuracy(confusion_matrix(preds, val_set.labels, data.dataset.class_names));
    };
  }

  SearchRunResult r;
  r.search = greedy_search<Model>(cfg.search.grid, train_fn, score_fn);
  r.trace = trace_to_json(r.search);

  const auto y_train = data.labels_of(data.split.train);
  const auto y_test = data.labels_of(data.split.test);
  const auto train = encode_sequences<double>(data.tokens_of(data.split.train), y_train, table, cfg.neural.max_len);
  const auto test = encode_sequences<double>(data.tokens_of(data.split.test), y_test, table, cfg.neural.max_len);
  const auto model = fit_neural(cfg, train, C, r.search.best);
  const auto preds = neural::predict(model, test).classes;
  r.final_report = {display_name(ModelKind::CnnLstm),
                    weighted_metrics(confusion_matrix(preds, y_test, data.dataset.class_names))};
  r.report_text = render_report({r.final_report}, cfg.report);

  if (!cfg.out_dir.empty()) {
    const std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);
    nlohmann::json doc = {{"best", train_config_to_json(r.search.best)},
                          {"best_score", r.search.best_score},
                          {"passes", r.search.passes},
                          {"converged", r.search.converged},
                          {"trace", r.trace}};
    detail::write_text(out_dir / "search_trace.json", doc.dump(2) + "\n");
    detail::write_text(out_dir / detail::report_file_name(cfg.report), r.report_text);
    neural::save_checkpoint(model, (out_dir / "cnn-lstm.json").string());
  }
  return r;
}

/// Evaluates models saved by run_experiment (manifest in `model_dir`) on
/// every document of `dataset_path`.
inline ExperimentResult evaluate_saved(const std::string& model_dir, const std::string& dataset_path,
                                       ReportFormat format) {
  const std::filesystem::path dir(model_dir);
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in) throw ConfigError("no manifest.json in '" + model_dir + "'");
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest.json: ") + e.what());
  }
  try {
    if (manifest.at("format").get<std::string>() != "parsent-experiment")
      throw FormatError("manifest.json is not an experiment manifest");
    const auto class_names = manifest.at("class_names").get<std::vector<std::string>>();
    ResourcePaths res;
    const auto& r = manifest.at("resources");
    res.stopwords = r.at("stopwords").get<std::string>();
    res.emoji_map = r.at("emoji_map").get<std::string>();
    res.stem_rules = r.at("stem_rules").get<std::string>();
    res.dictionary = r.at("dictionary").get<std::string>();
    auto pc = load_preprocess_config(res);
    pc.steps_enabled.clear();
    for (const auto& s : manifest.at("steps").get<std::vector<std::string>>()) pc.steps_enabled.push_back(parse_step(s));
    pc.validate();

    const auto ds = load_dataset(dataset_path);
    LabeledDataset known{{}, class_names};
    std::vector<TokenList> tokens;
    std::vector<std::size_t> labels;
    for (const auto& doc : ds.documents) {
      tokens.push_back(preprocess(doc, pc));
      labels.push_back(known.class_index(doc.label));
    }

    ExperimentResult result;
    const auto& models = manifest.at("models");
    for (auto kind : kAllModels) {
      const auto key = selector_name(kind);
      if (!models.contains(key)) continue;
      const auto file = (dir / models.at(key).get<std::string>()).string();
      std::vector<std::size_t> preds;
      if (kind == ModelKind::CnnLstm) {
        const auto model = neural::load_checkpoint(file);
        const auto table = load_embedding_table(manifest.at("embeddings").get<std::string>());
        const auto batch = encode_sequences<double>(tokens, labels, table, manifest.at("max_len").get<std::size_t>());
        preds = neural::predict(model, batch).classes;
      } else {
        const auto vocab = Vocabulary::from_terms(manifest.at("vocabulary").get<std::vector<std::string>>());
        const auto x = build_dtm(tokens, vocab).to_dense();
        const auto model = classical::load_model(file);
        for (std::size_t i = 0; i < x.rows(); ++i) preds.push_back(classical::predict(model, x.row(i)).label);
      }
      result.reports.emplace_back(display_name(kind), weighted_metrics(confusion_matrix(preds, labels, class_names)));
    }
    if (result.reports.empty()) throw ConfigError("manifest lists no models");
    result.report_text = render_report(result.reports, format);
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest.json: ") + e.what());
  }
}

/// Preprocesses each document to one space-joined token line.
inline std::string preprocess_lines(const std::vector<RawDocument>& docs, const PreprocessConfig& pc) {
  std::string out;
  for (const auto& doc : docs) {
    const auto tokens = preprocess(doc, pc);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) out.push_back(' ');
      out += tokens[i];
    }
    out.push_back('\n');
  }
  return out;
}

/// Reads a plain-text file as one unlabeled document per line.
inline std::vector<RawDocument> read_text_lines(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<RawDocument> docs;
  for (auto& line : detail::read_lines(in, path)) docs.push_back({std::move(line), "_"});
  return docs;
}

}  // namespace parsent
