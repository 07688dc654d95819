// tabrec: related-table recommendation pipeline.
//
// Subcommands: ingest, index, pool, extract-features, train, rank, eval,
// importance, split-eval, kappa. Configuration comes from a key=value file
// (--config) with individual flag overrides; every artifact embeds the
// resolved configuration as '#' header lines.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tabrec/forest.hpp"
#include "tabrec/linear_ranker.hpp"
#include "tabrec/pipeline.hpp"

namespace {

using namespace tabrec;

void write_text_artifact(const std::string& path, const std::string& body,
                         const std::string& header) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    if (!header.empty()) {
      std::istringstream lines(header);
      std::string line;
      while (std::getline(lines, line)) out << "# " << line << "\n";
    }
    out << body;
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

std::string format4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// Configuration file plus flag overrides, applied in order.
struct CommonOpts {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ExperimentConfig::from_file(config_path);
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path,
                  "key = value configuration file");
  static const std::vector<std::pair<std::string, std::string>> kFlags = {
      {"--corpus", "corpus"},
      {"--kb-catalog", "kb_catalog"},
      {"--kb-links", "kb_links"},
      {"--kb-redirects", "kb_redirects"},
      {"--word-embeddings", "word_embeddings"},
      {"--graph-embeddings", "graph_embeddings"},
      {"--workdir", "workdir"},
      {"--queries", "queries"},
      {"--qrels", "qrels"},
      {"--variant", "variant"},
      {"--delta", "delta"},
      {"--alpha", "alpha"},
      {"--trees", "trees"},
      {"--max-features", "max_features"},
      {"--folds", "folds"},
      {"--pool-k", "pool_k"},
      {"--topic-k", "topic_k"},
      {"--mlm-w-label", "mlm_w_label"},
      {"--mlm-w-abstract", "mlm_w_abstract"},
      {"--seed", "seed"},
      {"--gain", "gain"},
      {"--adjacency-mutual", "adjacency_mutual"},
      {"--normalize-late-sum", "normalize_late_sum"},
      {"--importance-batch", "importance_batch"},
  };
  for (const auto& [flag, key] : kFlags) {
    std::string config_key = key;
    cmd->add_option_function<std::string>(
        flag,
        [&opts, config_key](const std::string& value) {
          opts.overrides.emplace_back(config_key, value);
        },
        "overrides config key " + key);
  }
}

std::string features_path(const ExperimentConfig& cfg) {
  return cfg.workdir + "/features_" + cfg.variant + ".csv";
}
std::string layout_path(const ExperimentConfig& cfg) {
  return cfg.workdir + "/features_" + cfg.variant + ".layout.json";
}
std::string model_path(const ExperimentConfig& cfg) {
  return cfg.workdir + "/model_" + cfg.variant + ".txt";
}
std::string run_path(const ExperimentConfig& cfg) {
  return cfg.workdir + "/run_" + cfg.variant + ".txt";
}

Qrels load_qrels_checked(const ExperimentConfig& cfg) {
  if (cfg.qrels.empty()) {
    throw std::runtime_error("this command needs qrels (set qrels=... or --qrels)");
  }
  return Qrels::load(cfg.qrels);
}

int cmd_ingest(const ExperimentConfig& cfg) {
  Engine engine(cfg);
  engine.ingest();
  const auto& report = engine.kb().load_report();
  std::cout << "ingested " << engine.tables().size() << " tables; kb entities "
            << report.entities_loaded << " (dropped " << report.entities_dropped_no_abstract
            << " without abstract), links " << report.links_loaded << " (dropped "
            << report.links_dropped_dangling << " dangling, "
            << report.links_dropped_self << " self)\n";
  std::cout << "store: " << cfg.workdir << "/tables.jsonl\n";
  return 0;
}

int cmd_index(const ExperimentConfig& cfg) {
  Engine engine(cfg);
  engine.build_and_save_index();
  std::cout << "indexed " << engine.index().size() << " tables into "
            << cfg.workdir << "/index.bin\n";
  return 0;
}

int cmd_pool(const ExperimentConfig& cfg, const std::string& input_id,
             const std::string& out_path) {
  Engine engine(cfg);
  engine.load_kb();
  engine.load_store();
  engine.load_index();
  auto pool = engine.pool(input_id);
  std::string body;
  for (const auto& id : pool) body += id + "\n";
  if (out_path.empty()) {
    std::cout << body;
    std::cerr << "pool size " << pool.size() << "\n";
  } else {
    write_text_artifact(out_path, body, cfg.resolved_text());
    std::cout << "pooled " << pool.size() << " candidates for " << input_id
              << " into " << out_path << "\n";
  }
  return 0;
}

int cmd_extract_features(const ExperimentConfig& cfg, std::string out_path) {
  if (!is_learned_variant(cfg.variant)) {
    throw std::runtime_error("extract-features needs a learned variant "
                             "(HCF-1, HCF-2, CRAB-1..4, infogather)");
  }
  Engine engine(cfg);
  engine.load_kb();
  engine.load_store();
  engine.load_index();
  engine.load_embeddings();
  Qrels qrels = load_qrels_checked(cfg);
  auto queries = engine.load_queries();
  Dataset data = engine.build_dataset(queries, qrels);
  if (out_path.empty()) out_path = features_path(cfg);
  data.write_csv(out_path, cfg.resolved_text());
  data.layout().save(layout_path(cfg));
  std::cout << "wrote " << data.rows() << " rows x " << data.feature_count()
            << " features to " << out_path << "\n";
  return 0;
}

int cmd_train(const ExperimentConfig& cfg, std::string features_file,
              std::string model_out) {
  if (features_file.empty()) features_file = features_path(cfg);
  if (model_out.empty()) model_out = model_path(cfg);
  Dataset data = Dataset::read_csv(features_file);
  if (cfg.variant == "infogather") {
    LinearModel model = train_linear_coordinate_ascent(data, cfg.seed);
    model.save(model_out);
    std::cout << "trained linear model (training NDCG@10 "
              << format4(linear_training_ndcg(data, model.weights, 10))
              << ") -> " << model_out << "\n";
  } else {
    ForestParams params{cfg.trees, cfg.max_features, cfg.seed};
    ForestModel model = train_forest(data, params);
    model.save(model_out);
    std::cout << "trained forest (" << model.tree_count() << " trees) -> "
              << model_out << "\n";
  }
  return 0;
}

int cmd_rank(const ExperimentConfig& cfg, std::string out_path) {
  Engine engine(cfg);
  engine.load_kb();
  engine.load_store();
  engine.load_index();
  if (out_path.empty()) out_path = run_path(cfg);

  Run run;
  if (is_baseline_variant(cfg.variant)) {
    run = engine.baseline_run(cfg.variant, engine.load_queries());
  } else if (is_learned_variant(cfg.variant)) {
    engine.load_embeddings();
    Qrels qrels = load_qrels_checked(cfg);
    Dataset data = engine.build_dataset(engine.load_queries(), qrels);
    run = engine.learned_run(data);
  } else {
    throw std::runtime_error("unknown variant: " + cfg.variant);
  }
  run.save(out_path, cfg.resolved_text());
  std::cout << "wrote run for " << run.query_count() << " queries to "
            << out_path << "\n";
  return 0;
}

int cmd_eval(const ExperimentConfig& cfg, const std::vector<std::string>& runs,
             const std::string& out_path, const std::string& delta_out) {
  if (runs.empty()) throw std::runtime_error("eval needs at least one --runs file");
  Qrels qrels = load_qrels_checked(cfg);
  GainScheme gain = cfg.gain == "linear" ? GainScheme::Linear
                                         : GainScheme::Exponential;

  struct Row {
    std::string name;
    NdcgResult at5, at10;
    std::string marker5, marker10;
  };
  std::vector<Row> rows;
  for (const auto& path : runs) {
    Run run = Run::load(path);
    Row row;
    row.name = run.tag();
    row.at5 = ndcg(run, qrels, 5, gain);
    row.at10 = ndcg(run, qrels, 10, gain);
    if (row.at5.queries_without_qrels > 0) {
      std::cerr << "warning: " << row.at5.queries_without_qrels
                << " run queries have no qrels (scored 0) in " << path << "\n";
    }
    rows.push_back(std::move(row));
  }

  // Significance against the first run (the baseline), two-tailed paired t.
  auto marker = [](const NdcgResult& base, const NdcgResult& sys) {
    std::vector<double> a, b;
    for (const auto& [qid, value] : sys.per_query) {
      auto it = base.per_query.find(qid);
      if (it == base.per_query.end()) return std::string("?");
      a.push_back(value);
      b.push_back(it->second);
    }
    if (a.size() < 2) return std::string();
    TTestResult t = paired_ttest(a, b);
    if (t.p < 0.01) return std::string("\xE2\x80\xA1");  // double dagger
    if (t.p < 0.05) return std::string("\xE2\x80\xA0");  // dagger
    return std::string();
  };
  for (std::size_t i = 1; i < rows.size(); ++i) {
    rows[i].marker5 = marker(rows[0].at5, rows[i].at5);
    rows[i].marker10 = marker(rows[0].at10, rows[i].at10);
  }

  std::ostringstream table;
  table << "Method\tNDCG@5\tNDCG@10\n";
  for (const auto& row : rows) {
    table << row.name << '\t' << format4(row.at5.mean) << row.marker5 << '\t'
          << format4(row.at10.mean) << row.marker10 << "\n";
  }
  std::cout << table.str();
  if (!out_path.empty()) {
    std::string csv = "method,ndcg5,sig5,ndcg10,sig10\n";
    for (const auto& row : rows) {
      csv += row.name + "," + format4(row.at5.mean) + "," + row.marker5 + "," +
             format4(row.at10.mean) + "," + row.marker10 + "\n";
    }
    write_text_artifact(out_path, csv, cfg.resolved_text());
  }

  // Per-input-table NDCG@10 differences, second run minus the baseline.
  if (!delta_out.empty()) {
    if (runs.size() != 2) {
      throw std::runtime_error("--delta-out needs exactly two --runs files");
    }
    auto deltas =
        per_query_delta(Run::load(runs[1]), Run::load(runs[0]), qrels, 10, gain);
    std::string csv = "qid,delta_ndcg10\n";
    for (const auto& [qid, delta] : deltas) {
      csv += qid + "," + format4(delta) + "\n";
    }
    write_text_artifact(delta_out, csv, cfg.resolved_text());
  }
  return 0;
}

int cmd_importance(const ExperimentConfig& cfg, std::string features_file,
                   std::string model_file, const std::string& out_prefix,
                   bool with_curve) {
  if (features_file.empty()) features_file = features_path(cfg);
  if (model_file.empty()) model_file = model_path(cfg);
  Dataset data = Dataset::read_csv(features_file);
  ForestModel model = ForestModel::load(model_file);
  if (model.layout_fingerprint() != data.layout().fingerprint()) {
    throw std::runtime_error("model/features layout mismatch");
  }

  auto importance = model.feature_importance();
  auto ranking = model.importance_ranking();
  std::string csv = "rank,feature,importance\n";
  auto names = data.layout().names();
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    csv += std::to_string(r + 1) + "," + names[ranking[r]] + "," +
           format4(importance[ranking[r]]) + "\n";
  }
  std::string prefix = out_prefix.empty()
                           ? cfg.workdir + "/importance_" + cfg.variant
                           : out_prefix;
  write_text_artifact(prefix + ".csv", csv, cfg.resolved_text());
  std::cout << "wrote " << prefix << ".csv\n";

  if (with_curve) {
    Qrels qrels = load_qrels_checked(cfg);
    GainScheme gain = cfg.gain == "linear" ? GainScheme::Linear
                                           : GainScheme::Exponential;
    ForestParams params{cfg.trees, cfg.max_features, cfg.seed};
    auto curve = incremental_feature_eval(data, qrels, cfg.importance_batch,
                                          cfg.folds, params, gain);
    std::string curve_csv = "features,ndcg5,ndcg10\n";
    for (const auto& point : curve) {
      curve_csv += std::to_string(point.feature_count) + "," +
                   format4(point.ndcg5) + "," + format4(point.ndcg10) + "\n";
    }
    write_text_artifact(prefix + "_curve.csv", curve_csv, cfg.resolved_text());
    std::cout << "wrote " << prefix << "_curve.csv\n";
  }
  return 0;
}

int cmd_split_eval(const ExperimentConfig& cfg, const std::string& axis_name,
                   std::string out_path) {
  if (!is_learned_variant(cfg.variant) || cfg.variant == "infogather") {
    throw std::runtime_error("split-eval runs on HCF/CRAB variants");
  }
  Engine engine(cfg);
  engine.load_kb();
  engine.load_store();
  engine.load_index();
  engine.load_embeddings();
  Qrels qrels = load_qrels_checked(cfg);
  auto queries = engine.load_queries();
  Dataset data = engine.build_dataset(queries, qrels);
  auto cv = std::make_shared<CvForest>(engine.learned_cv(data));

  SplitExperimentInputs inputs;
  inputs.query_ids = queries;
  inputs.lookup = [&engine](const std::string& id) { return engine.view(id); };
  inputs.pool_of = [&engine](const std::string& qid) { return engine.pool(qid); };
  inputs.scorer = engine.cv_scorer(cv);
  inputs.qrels = &qrels;
  inputs.kb = &engine.kb();
  inputs.retriever = &engine.mlm();
  inputs.topic_k = cfg.topic_k;
  inputs.gain = engine.gain_scheme();

  std::vector<SplitAxis> axes;
  if (axis_name == "rows") axes = {SplitAxis::Rows};
  else if (axis_name == "columns") axes = {SplitAxis::Columns};
  else if (axis_name == "both") axes = {SplitAxis::Rows, SplitAxis::Columns};
  else throw std::runtime_error("axis must be rows, columns or both");

  std::string csv = "axis,fraction,ndcg5,ndcg10\n";
  for (SplitAxis axis : axes) {
    for (const auto& outcome : split_experiment(inputs, axis)) {
      csv += std::string(axis == SplitAxis::Rows ? "rows" : "columns") + "," +
             format4(outcome.fraction) + "," + format4(outcome.ndcg5) + "," +
             format4(outcome.ndcg10) + "\n";
    }
  }
  if (out_path.empty()) out_path = cfg.workdir + "/split_eval_" + cfg.variant + ".csv";
  write_text_artifact(out_path, csv, cfg.resolved_text());
  std::cout << csv;
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_kappa(const std::string& matrix_file) {
  std::ifstream in(matrix_file);
  if (!in) throw std::runtime_error("cannot open matrix file " + matrix_file);
  std::vector<std::vector<int>> counts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (auto& c : line) {
      if (c == ',' || c == '\t') c = ' ';
    }
    std::istringstream ss(line);
    std::vector<int> row;
    int value;
    while (ss >> value) row.push_back(value);
    if (!row.empty()) counts.push_back(std::move(row));
  }
  double kappa = fleiss_kappa(counts);
  std::cout << "fleiss_kappa " << format4(kappa) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabrec: recommend related tables from a table corpus"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* ingest = app.add_subcommand("ingest", "parse the corpus and build the table store");
  add_common(ingest, opts);

  auto* index = app.add_subcommand("index", "build and persist the inverted index");
  add_common(index, opts);

  std::string pool_input, pool_out;
  auto* pool = app.add_subcommand("pool", "candidate pool for one input table");
  add_common(pool, opts);
  pool->add_option("--input", pool_input, "input table id")->required();
  pool->add_option("--out", pool_out, "write ids to a file instead of stdout");

  std::string features_out;
  auto* extract = app.add_subcommand("extract-features", "feature matrix for all query pools");
  add_common(extract, opts);
  extract->add_option("--out", features_out, "output CSV path");

  std::string train_features, train_model;
  auto* train = app.add_subcommand("train", "train the full-data model for the variant");
  add_common(train, opts);
  train->add_option("--features", train_features, "features CSV");
  train->add_option("--model-out", train_model, "model output path");

  std::string rank_out;
  auto* rank = app.add_subcommand("rank", "produce a run (cross-validated for learned variants)");
  add_common(rank, opts);
  rank->add_option("--out", rank_out, "run file path");

  std::vector<std::string> eval_runs;
  std::string eval_out, eval_delta_out;
  auto* eval = app.add_subcommand("eval", "NDCG@5/@10 with significance against the first run");
  add_common(eval, opts);
  eval->add_option("--runs", eval_runs, "run files; first is the baseline")->required();
  eval->add_option("--out", eval_out, "also write a CSV table");
  eval->add_option("--delta-out", eval_delta_out,
                   "per-query NDCG@10 deltas (needs exactly two runs)");

  std::string imp_features, imp_model, imp_out;
  bool imp_curve = false;
  auto* importance = app.add_subcommand("importance", "feature importance and batch curve");
  add_common(importance, opts);
  importance->add_option("--features", imp_features, "features CSV");
  importance->add_option("--model", imp_model, "trained model file");
  importance->add_option("--out-prefix", imp_out, "output prefix");
  importance->add_flag("--curve", imp_curve, "also evaluate top-N feature batches");

  std::string split_axis = "both", split_out;
  auto* split = app.add_subcommand("split-eval", "NDCG against input-table size");
  add_common(split, opts);
  split->add_option("--axis", split_axis, "rows, columns or both");
  split->add_option("--out", split_out, "output CSV path");

  std::string kappa_matrix;
  auto* kappa = app.add_subcommand("kappa", "Fleiss kappa of an item x category count matrix");
  kappa->add_option("--matrix", kappa_matrix, "counts file (rows = items)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (kappa->parsed()) return cmd_kappa(kappa_matrix);
    ExperimentConfig cfg = opts.resolve();
    std::filesystem::create_directories(cfg.workdir);
    write_text_artifact(cfg.workdir + "/config.resolved", cfg.resolved_text(), "");
    if (ingest->parsed()) return cmd_ingest(cfg);
    if (index->parsed()) return cmd_index(cfg);
    if (pool->parsed()) return cmd_pool(cfg, pool_input, pool_out);
    if (extract->parsed()) return cmd_extract_features(cfg, features_out);
    if (train->parsed()) return cmd_train(cfg, train_features, train_model);
    if (rank->parsed()) return cmd_rank(cfg, rank_out);
    if (eval->parsed()) return cmd_eval(cfg, eval_runs, eval_out, eval_delta_out);
    if (importance->parsed()) {
      return cmd_importance(cfg, imp_features, imp_model, imp_out, imp_curve);
    }
    if (split->parsed()) return cmd_split_eval(cfg, split_axis, split_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
