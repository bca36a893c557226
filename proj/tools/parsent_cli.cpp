// parsent: preprocess, train, evaluate and search from the command line.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parsent/experiment.hpp"
#include "parsent/synthetic.hpp"

namespace {

using namespace parsent;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string report;
  std::string out;
  std::string dataset;
  std::vector<std::string> models;
  std::string embeddings;
  std::string resources_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON experiment config");
  cmd->add_option("--seed", o.seed, "split / init seed");
  cmd->add_option("--report", o.report, "report format")->check(CLI::IsMember({"tsv", "json"}));
  cmd->add_option("--out", o.out, "artifact directory");
  cmd->add_option("--dataset", o.dataset, "CSV dataset (text,label)");
  cmd->add_option("--models", o.models, "gnb logreg tree forest gboost cnn-lstm all");
  cmd->add_option("--embeddings", o.embeddings, "word2vec text embeddings");
  cmd->add_option("--resources-dir", o.resources_dir,
                  "directory with stopwords.txt, emoji.tsv, stem_rules.tsv, dictionary.txt");
}

ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_experiment_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.report.empty()) cfg.report = parse_report_format(o.report);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (!o.dataset.empty()) cfg.dataset = o.dataset;
  if (!o.models.empty()) cfg.models = parse_selectors(o.models);
  if (!o.embeddings.empty()) cfg.embeddings = o.embeddings;
  if (!o.resources_dir.empty()) cfg.resources = resources_in(o.resources_dir);
  return cfg;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persian short-text sentiment toolkit"};
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "write one token line per document");
  std::string pre_input, pre_output, pre_res_dir, pre_config;
  ResourcePaths pre_res;
  std::vector<std::string> pre_steps;
  bool pre_lines = false;
  pre->add_option("input", pre_input, "CSV dataset, or plain text with --lines")->required();
  pre->add_option("--out", pre_output, "output file (default stdout)");
  pre->add_flag("--lines", pre_lines, "input is one document per line");
  pre->add_option("--config", pre_config, "take resources and steps from a config");
  pre->add_option("--resources-dir", pre_res_dir);
  pre->add_option("--stopwords", pre_res.stopwords);
  pre->add_option("--emoji", pre_res.emoji_map);
  pre->add_option("--stem-rules", pre_res.stem_rules);
  pre->add_option("--dictionary", pre_res.dictionary);
  pre->add_option("--steps", pre_steps, "enabled steps, in order");

  CommonOptions train_opts, search_opts;
  auto* train = app.add_subcommand("train", "fit the selected models and report test metrics");
  add_common(train, train_opts);
  auto* search = app.add_subcommand("search", "greedy hyperparameter search for cnn-lstm");
  add_common(search, search_opts);

  auto* eval = app.add_subcommand("evaluate", "score saved models on a dataset");
  std::string eval_dir, eval_dataset, eval_report = "tsv", eval_out;
  eval->add_option("--model-dir", eval_dir, "directory written by train --out")->required();
  eval->add_option("--dataset", eval_dataset)->required();
  eval->add_option("--report", eval_report)->check(CLI::IsMember({"tsv", "json"}));
  eval->add_option("--out", eval_out, "report file (default stdout)");

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus and embedding table");
  SyntheticSpec spec;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--docs", spec.num_docs);
  synth->add_option("--dim", spec.dim);
  synth->add_option("--seed", spec.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::Config);
  }

  try {
    if (*pre) {
      PreprocessConfig pc;
      if (!pre_config.empty()) {
        const auto cfg = load_experiment_config(pre_config);
        pc = preprocess_config_for(cfg);
      } else {
        ResourcePaths res = pre_res_dir.empty() ? ResourcePaths{} : resources_in(pre_res_dir);
        for (auto [dst, src] : {std::pair{&res.stopwords, &pre_res.stopwords},
                                {&res.emoji_map, &pre_res.emoji_map},
                                {&res.stem_rules, &pre_res.stem_rules},
                                {&res.dictionary, &pre_res.dictionary}})
          if (!src->empty()) *dst = *src;
        pc = load_preprocess_config(res);
      }
      if (!pre_steps.empty()) {
        pc.steps_enabled.clear();
        for (const auto& s : pre_steps)
          if (s != "tokenize") pc.steps_enabled.push_back(parse_step(s));
        pc.validate();
      }
      const auto docs = pre_lines ? read_text_lines(pre_input) : load_dataset(pre_input).documents;
      emit(preprocess_lines(docs, pc), pre_output);
    } else if (*train) {
      std::cout << run_experiment(build_config(train_opts)).report_text;
    } else if (*search) {
      const auto r = run_search(build_config(search_opts));
      std::cerr << "best: " << train_config_to_json(r.search.best).dump() << " (validation accuracy "
                << format_fixed(r.search.best_score) << ", " << r.search.trace.size() << " trainings)\n";
      std::cout << r.report_text;
    } else if (*eval) {
      emit(evaluate_saved(eval_dir, eval_dataset, parse_report_format(eval_report)).report_text, eval_out);
    } else if (*synth) {
      const auto corpus = make_synthetic_corpus(spec);
      const std::filesystem::path dir(synth_out);
      std::filesystem::create_directories(dir);
      std::ofstream csv(dir / "corpus.csv", std::ios::binary), emb(dir / "embeddings.txt", std::ios::binary);
      if (!csv || !emb) throw ConfigError("cannot write into '" + synth_out + "'");
      write_dataset(csv, corpus.documents);
      write_embedding_table(emb, corpus.tokens, corpus.vectors);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(ErrorKind::Numeric);
  }
  return 0;
}
