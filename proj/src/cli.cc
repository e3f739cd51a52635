// Copyright 2026 The HM-SGE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hmsge/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "hmsge/config.h"
#include "hmsge/error.h"
#include "hmsge/eval.h"
#include "hmsge/model_io.h"
#include "hmsge/pipeline.h"
#include "hmsge/similarity.h"
#include "hmsge/synth.h"
#include "hmsge/tsv.h"

namespace hmsge {
namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string Tsv() const {
    std::string s;
    const auto line = [&s](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) s += '\t';
        s += cells[i];
      }
      s += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
  }

  std::string Aligned() const {
    std::vector<std::size_t> width(header.size(), 0);
    const auto measure = [&width](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        width[i] = std::max(width[i], cells[i].size());
      }
    };
    measure(header);
    for (const auto& r : rows) measure(r);
    std::string s;
    const auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        s += cells[i];
        if (i + 1 < cells.size()) s += std::string(width[i] - cells[i].size() + 2, ' ');
      }
      s += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
  }

  void Print(std::ostream& out, bool tty) const {
    out << (tty ? Aligned() : Tsv());
  }
};

Branch ParseWhich(const std::string& which) {
  if (which == "x") return Branch::kX;
  if (which == "y") return Branch::kY;
  if (which == "joint") return Branch::kJoint;
  throw ValidationError("--which must be x, y or joint");
}

struct SynthArgs {
  int n = 100;
  int k = 5;
  std::vector<int> dims{10, 10};
  std::vector<double> noise{0.25};
  double consistency = 1.0;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
};

struct TrainArgs {
  std::string x, y, config, preset, out, missing;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool verbose = false;
};

struct EvalArgs {
  std::string model, ratings, gold, which = "joint", out;
  bool skip_missing = false;
  std::uint64_t seed = 0;
  int top_k = 10;
  int iters = 50;
};

struct NeighborsArgs {
  std::string model, word, which = "joint";
  double ratio = 0.9;
};

struct ExportArgs {
  std::string model, what, which = "joint", out;
};

int CmdSynth(const SynthArgs& a, std::ostream& out) {
  PlantedSpec spec;
  spec.n_words = a.n;
  spec.n_communities = a.k;
  spec.dim_x = a.dims.at(0);
  spec.dim_y = a.dims.size() > 1 ? a.dims[1] : a.dims[0];
  spec.noise_x = a.noise.at(0);
  spec.noise_y = a.noise.size() > 1 ? a.noise[1] : a.noise[0];
  spec.consistency = a.consistency;
  spec.seed = a.seed;
  const PlantedData data = GeneratePlanted(spec);
  WritePlanted(a.out_dir, data);
  out << "wrote " << spec.n_words << " words, " << spec.n_communities
      << " communities, dims " << spec.dim_x << "/" << spec.dim_y << " to "
      << a.out_dir << " (X.tsv, Y.tsv, gold.tsv)\n";
  return kExitOk;
}

int CmdTrain(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  PipelineConfig config =
      a.preset.empty() ? TattribPreset() : PresetByName(a.preset);
  if (!a.config.empty()) config = LoadConfigFile(a.config, config);
  if (a.seed) config.seed = *a.seed;
  if (a.threads < 1) throw ValidationError("--threads must be >= 1");

  const FeatureMatrix x = LoadFeatures(a.x, "X");
  const FeatureMatrix y = LoadFeatures(a.y, "Y");
  MissingModalitySpec missing;
  if (!a.missing.empty()) missing = LoadMissingSpec(a.missing);
  auto [ax, ay] = AlignModalities(x, y, missing);

  out << "config:\n" << ConfigToJson(config);
  const TrainedModel model = InductiveInfer(ax, ay, missing, config, a.threads);
  if (a.verbose) {
    // One line per embedding step: first and last objective values.
    std::map<std::tuple<int, int>, std::pair<double, double>> summary;
    std::map<std::tuple<int, int>, int> steps;
    for (const TraceEntry& t : model.trace) {
      const auto key = std::make_tuple(static_cast<int>(t.branch), t.iteration);
      if (t.step == 0) summary[key].first = t.objective;
      summary[key].second = t.objective;
      steps[key] = t.step;
    }
    for (const auto& [key, values] : summary) {
      err << "branch " << BranchName(static_cast<Branch>(std::get<0>(key)))
          << " iteration " << std::get<1>(key) << ": objective "
          << FormatDouble(values.first) << " -> "
          << FormatDouble(values.second) << " in " << steps[key]
          << " steps\n";
    }
  }
  SaveModel(model, a.out);
  out << "model written to " << a.out << " (" << model.vocab.size()
      << " words)\n";
  return kExitOk;
}

int CmdEval(const EvalArgs& a, std::ostream& out, std::ostream& err,
            bool tty) {
  if (a.ratings.empty() && a.gold.empty()) {
    throw ValidationError("eval needs --ratings and/or --gold");
  }
  const Branch which = ParseWhich(a.which);
  const TrainedModel model = LoadModel(a.model);
  const Matrix& vectors = model.Embedding(which).embedding;

  Table table{{"representation", "metric", "value", "detail"}, {}};
  if (!a.ratings.empty()) {
    const RatingSet ratings = LoadRatings(a.ratings);
    const SimilarityEvaluation e =
        EvaluateSimilarity(vectors, model.vocab, ratings, a.skip_missing);
    for (const auto& w : e.skipped_words) {
      err << "skipped word without embedding: " << w << "\n";
    }
    table.rows.push_back({a.which, "spearman", FormatDouble(e.spearman),
                          "pairs=" + std::to_string(e.pairs_used)});
  }
  if (!a.gold.empty()) {
    const GoldCategories gold = LoadGold(a.gold);
    CategorizationParams params;
    params.top_k = a.top_k;
    params.max_iters = a.iters;
    params.bandwidth = model.StageConfig(which).bandwidth;
    const CategorizationResult r =
        CategorizeAndScore(vectors, model.vocab, gold, params, a.seed);
    table.rows.push_back({a.which, "fscore", FormatDouble(r.fscore),
                          "clusters=" + std::to_string(r.clusters.k_effective)});
  }
  table.Print(out, tty);
  if (!a.out.empty()) WriteFile(a.out, table.Tsv());
  return kExitOk;
}

int CmdNeighbors(const NeighborsArgs& a, std::ostream& out, bool tty) {
  const Branch which = ParseWhich(a.which);
  const TrainedModel model = LoadModel(a.model);
  Table table{{"word", "cosine"}, {}};
  for (const Neighbor& n : NearestNeighbors(model.Embedding(which).embedding,
                                            model.vocab, a.word, a.ratio)) {
    table.rows.push_back({n.word, FormatDouble(n.cosine)});
  }
  table.Print(out, tty);
  return kExitOk;
}

int CmdExport(const ExportArgs& a, std::ostream& out) {
  const Branch which = ParseWhich(a.which);
  const TrainedModel model = LoadModel(a.model);
  const Matrix& vectors = model.Embedding(which).embedding;
  if (a.what == "embeddings") {
    WriteFeatures(a.out, model.vocab, vectors);
  } else if (a.what == "affinity") {
    const SimilarityGraph g = PairwiseSimilarity(
        vectors, model.StageConfig(which).bandwidth, &model.vocab);
    Table table;
    table.header.push_back("word");
    for (const auto& w : model.vocab.words()) table.header.push_back(w);
    for (std::size_t j = 0; j < model.vocab.size(); ++j) {
      std::vector<std::string> row{model.vocab.word(j)};
      for (std::size_t k = 0; k < model.vocab.size(); ++k) {
        row.push_back(FormatDouble(g.weights(static_cast<Eigen::Index>(j),
                                             static_cast<Eigen::Index>(k))));
      }
      table.rows.push_back(std::move(row));
    }
    WriteFile(a.out, table.Tsv());
  } else if (a.what == "trace") {
    Table table{{"branch", "iteration", "step", "objective"}, {}};
    for (const TraceEntry& t : model.trace) {
      table.rows.push_back({std::string(BranchName(t.branch)),
                            std::to_string(t.iteration), std::to_string(t.step),
                            FormatDouble(t.objective)});
    }
    WriteFile(a.out, table.Tsv());
  } else {
    throw ValidationError("--what must be affinity, embeddings or trace");
  }
  out << "exported " << a.what << " to " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err, bool tty) {
  CLI::App app{"Hierarchical multi-modal similarity graph embedding"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate planted data");
  synth_cmd->add_option("--n", synth.n, "number of words")
      ->check(CLI::Range(2, 1000000));
  synth_cmd->add_option("--k", synth.k, "number of communities")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--dims", synth.dims, "feature dims: n_x [n_y]")
      ->expected(1, 2)
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", synth.noise, "noise sigma: x [y]")
      ->expected(1, 2)
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--consistency", synth.consistency)
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--out-dir", synth.out_dir);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--x", train.x, "X feature TSV")->required();
  train_cmd->add_option("--y", train.y, "Y feature TSV")->required();
  train_cmd->add_option("--config", train.config, "JSON config file");
  train_cmd->add_option("--preset", train.preset)
      ->check(CLI::IsMember({"tattrib", "skipgram"}));
  train_cmd->add_option("--out", train.out, "model file")->required();
  train_cmd->add_option("--missing", train.missing,
                        "missing-modality list (word<TAB>x|y)");
  train_cmd->add_option("--seed", train.seed, "overrides the config seed");
  train_cmd->add_option("--threads", train.threads)->check(CLI::PositiveNumber);
  train_cmd->add_flag("--verbose", train.verbose);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a representation");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--ratings", eval.ratings, "word_a<TAB>word_b<TAB>rating");
  eval_cmd->add_option("--gold", eval.gold, "word<TAB>category");
  eval_cmd->add_option("--which", eval.which)
      ->check(CLI::IsMember({"x", "y", "joint"}));
  eval_cmd->add_flag("--skip-missing", eval.skip_missing);
  eval_cmd->add_option("--seed", eval.seed, "Chinese Whispers seed");
  eval_cmd->add_option("--top-k", eval.top_k)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--iters", eval.iters)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", eval.out, "TSV report file");

  NeighborsArgs neighbors;
  auto* nn_cmd = app.add_subcommand("neighbors", "nearest neighbors of a word");
  nn_cmd->add_option("--model", neighbors.model)->required();
  nn_cmd->add_option("--word", neighbors.word)->required();
  nn_cmd->add_option("--which", neighbors.which)
      ->check(CLI::IsMember({"x", "y", "joint"}));
  nn_cmd->add_option("--ratio", neighbors.ratio)
      ->check(CLI::Range(0.0, 1.0));

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "export matrices as TSV");
  export_cmd->add_option("--model", exp.model)->required();
  export_cmd->add_option("--what", exp.what)
      ->required()
      ->check(CLI::IsMember({"affinity", "embeddings", "trace"}));
  export_cmd->add_option("--which", exp.which)
      ->check(CLI::IsMember({"x", "y", "joint"}));
  export_cmd->add_option("--out", exp.out)->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*synth_cmd) return CmdSynth(synth, out);
    if (*train_cmd) return CmdTrain(train, out, err);
    if (*eval_cmd) return CmdEval(eval, out, err, tty);
    if (*nn_cmd) return CmdNeighbors(neighbors, out, tty);
    if (*export_cmd) return CmdExport(exp, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace hmsge
