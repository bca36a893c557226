#pragma once

// Versioned JSON containers for the classical models. Doubles are written
// with round-trip precision, so save -> load reproduces predictions exactly.

#include <fstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "parsent/classical/gaussian_nb.hpp"
#include "parsent/classical/gradient_boosting.hpp"
#include "parsent/classical/logistic_regression.hpp"
#include "parsent/classical/random_forest.hpp"
#include "parsent/classical/tree.hpp"

namespace parsent::classical {

using json = nlohmann::json;

inline constexpr const char* kModelFormat = "parsent-model";
inline constexpr int kModelVersion = 1;

using AnyModel = std::variant<GNBModel, LogRegModel, TreeModel, ForestModel, BoostModel>;

namespace detail {

inline json matrix_to_json(const Matrix<double>& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Matrix<double> matrix_from_json(const json& j) {
  Matrix<double> m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.rows() * m.cols()) throw FormatError("matrix data size mismatch");
  m.data() = std::move(data);
  return m;
}

template <typename Payload>
json tree_to_json(const BinaryTree<Payload>& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes)
    nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                     {"right", n.right}, {"payload", n.payload}});
  return nodes;
}

template <typename Payload>
BinaryTree<Payload> tree_from_json(const json& j) {
  BinaryTree<Payload> t;
  for (const auto& n : j) {
    TreeNode<Payload> node;
    node.feature = n.at("feature").get<long>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<long>();
    node.right = n.at("right").get<long>();
    node.payload = n.at("payload").get<Payload>();
    t.nodes.push_back(std::move(node));
  }
  const long size = static_cast<long>(t.nodes.size());
  if (size == 0) throw FormatError("tree has no nodes");
  for (long i = 0; i < size; ++i) {
    const auto& n = t.nodes[static_cast<std::size_t>(i)];
    if (!n.is_leaf() && (n.left <= i || n.right <= i || n.left >= size || n.right >= size))
      throw FormatError("tree child index out of range");
  }
  return t;
}

inline json class_tree_to_json(const TreeModel& m) {
  return {{"nodes", tree_to_json(m.tree)},
          {"num_classes", m.num_classes},
          {"num_features", m.num_features},
          {"max_depth", m.params.max_depth},
          {"min_samples_split", m.params.min_samples_split}};
}

inline TreeModel class_tree_from_json(const json& j) {
  TreeModel m;
  m.tree = tree_from_json<std::vector<std::size_t>>(j.at("nodes"));
  m.num_classes = j.at("num_classes").get<std::size_t>();
  m.num_features = j.at("num_features").get<std::size_t>();
  m.params.max_depth = j.at("max_depth").get<std::size_t>();
  m.params.min_samples_split = j.at("min_samples_split").get<std::size_t>();
  return m;
}

}  // namespace detail

inline std::string model_kind(const AnyModel& m) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GNBModel>) return "gnb";
        else if constexpr (std::is_same_v<T, LogRegModel>) return "logreg";
        else if constexpr (std::is_same_v<T, TreeModel>) return "tree";
        else if constexpr (std::is_same_v<T, ForestModel>) return "forest";
        else return "gboost";
      },
      m);
}

inline json to_json(const AnyModel& model) {
  json body = std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GNBModel>) {
          return {{"class_priors", m.class_priors},
                  {"means", detail::matrix_to_json(m.means)},
                  {"variances", detail::matrix_to_json(m.variances)},
                  {"var_smoothing", m.var_smoothing},
                  {"epsilon", m.epsilon}};
        } else if constexpr (std::is_same_v<T, LogRegModel>) {
          return {{"weights", detail::matrix_to_json(m.weights)},
                  {"biases", m.biases},
                  {"learning_rate", m.hyper.learning_rate},
                  {"epochs", m.hyper.epochs},
                  {"l2", m.hyper.l2}};
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          return detail::class_tree_to_json(m);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          json trees = json::array();
          for (const auto& t : m.trees) trees.push_back(detail::class_tree_to_json(t));
          return {{"trees", trees},
                  {"features_per_split", m.features_per_split},
                  {"bootstrap", m.bootstrap},
                  {"seed", m.seed},
                  {"num_classes", m.num_classes},
                  {"num_features", m.num_features}};
        } else {
          json stages = json::array();
          for (const auto& stage : m.stages) {
            json per_class = json::array();
            for (const auto& t : stage) per_class.push_back(detail::tree_to_json(t));
            stages.push_back(per_class);
          }
          return {{"initial_scores", m.initial_scores},
                  {"stages", stages},
                  {"n_stages", m.hyper.n_stages},
                  {"learning_rate", m.hyper.learning_rate},
                  {"max_depth", m.hyper.max_depth},
                  {"min_samples_split", m.hyper.min_samples_split},
                  {"num_features", m.num_features},
                  {"train_loss", m.train_loss}};
        }
      },
      model);
  return {{"format", kModelFormat}, {"version", kModelVersion}, {"kind", model_kind(model)},
          {"model", body}};
}

inline AnyModel from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat)
      throw FormatError("not a parsent model container");
    if (j.at("version").get<int>() != kModelVersion)
      throw FormatError("unsupported model version " + j.at("version").dump());
    const auto kind = j.at("kind").get<std::string>();
    const json& b = j.at("model");
    if (kind == "gnb") {
      GNBModel m;
      m.class_priors = b.at("class_priors").get<std::vector<double>>();
      m.means = detail::matrix_from_json(b.at("means"));
      m.variances = detail::matrix_from_json(b.at("variances"));
      m.var_smoothing = b.at("var_smoothing").get<double>();
      m.epsilon = b.at("epsilon").get<double>();
      return m;
    }
    if (kind == "logreg") {
      LogRegModel m;
      m.weights = detail::matrix_from_json(b.at("weights"));
      m.biases = b.at("biases").get<std::vector<double>>();
      m.hyper = {b.at("learning_rate").get<double>(), b.at("epochs").get<std::size_t>(),
                 b.at("l2").get<double>()};
      return m;
    }
    if (kind == "tree") return detail::class_tree_from_json(b);
    if (kind == "forest") {
      ForestModel m;
      for (const auto& t : b.at("trees")) m.trees.push_back(detail::class_tree_from_json(t));
      m.features_per_split = b.at("features_per_split").get<std::size_t>();
      m.bootstrap = b.at("bootstrap").get<bool>();
      m.seed = b.at("seed").get<std::uint64_t>();
      m.num_classes = b.at("num_classes").get<std::size_t>();
      m.num_features = b.at("num_features").get<std::size_t>();
      if (m.trees.empty()) throw FormatError("forest has no trees");
      return m;
    }
    if (kind == "gboost") {
      BoostModel m;
      m.initial_scores = b.at("initial_scores").get<std::vector<double>>();
      for (const auto& stage : b.at("stages")) {
        std::vector<RegressionTree> trees;
        for (const auto& t : stage) trees.push_back(detail::tree_from_json<double>(t));
        if (trees.size() != m.initial_scores.size())
          throw FormatError("boosting stage class arity mismatch");
        m.stages.push_back(std::move(trees));
      }
      m.hyper = {b.at("n_stages").get<std::size_t>(), b.at("learning_rate").get<double>(),
                 b.at("max_depth").get<std::size_t>(), b.at("min_samples_split").get<std::size_t>()};
      m.num_features = b.at("num_features").get<std::size_t>();
      m.train_loss = b.at("train_loss").get<std::vector<double>>();
      return m;
    }
    throw FormatError("unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model container: ") + e.what());
  }
}

inline Prediction predict(const AnyModel& model, std::span<const double> x) {
  return std::visit(
      [&](const auto& m) -> Prediction {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GNBModel>) return gnb_predict(m, x);
        else if constexpr (std::is_same_v<T, LogRegModel>) return logreg_predict(m, x);
        else if constexpr (std::is_same_v<T, TreeModel>) return tree_predict(m, x);
        else if constexpr (std::is_same_v<T, ForestModel>) return forest_predict(m, x);
        else return gboost_predict(m, x);
      },
      model);
}

inline void save_model(const AnyModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << to_json(model).dump() << '\n';
}

inline AnyModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace parsent::classical
