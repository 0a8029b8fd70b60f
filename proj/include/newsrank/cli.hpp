#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "newsrank/corpus.hpp"
#include "newsrank/features.hpp"
#include "newsrank/model.hpp"
#include "newsrank/util.hpp"

namespace newsrank {

// Configuration and usage problems; the CLI maps these to exit code 2
// (runtime failures exit 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string corpus;  // raw input consumed by ingest
  CorpusFormat format = CorpusFormat::jsonl;
  std::vector<TextUnit> units{TextUnit::article_body, TextUnit::post_title};

  std::string categories_lexicon;
  std::string polarity_lexicon;
  std::string frequencies;
  std::string nb_subjective;
  std::string nb_objective;

  uint64_t seed = 0;
  std::string out_dir = "out";

  std::vector<size_t> ks{3, 10, 50, 100, 500};
  // Low-engagement cut applied before training, independent per target.
  double percentile_score = 30.0;
  double percentile_comments = 30.0;
  double train_frac = 0.8;
  int cv_folds = 5;
  int lambda_count = 100;
  double lambda_min_ratio = 1e-3;
  std::vector<double> lambda_grid;  // explicit grid wins over count/min_ratio

  int stability_resamples = 200;
  double stability_frac = 0.5;
  double stability_weakness = 0.5;
  double stability_threshold = 0.6;
  double stability_lambda_scale = 0.25;  // lambda = scale * lambda_max

  double high_pct = 90.0;
  double low_pct = 50.0;
  long long min_article_chars = 100;
  double frequency_floor = 0.5;
  double divergent_max_sim = 0.1;
  std::string dataset_label;

  // Optional narrowing from command-line flags.
  std::optional<Target> only_target;
  std::string only_model;  // "", "senti_subj", "content", "all"
};

RunConfig load_run_config(const std::string& path);

// Canonical serialization of the effective configuration; its FNV-1a hash is
// embedded in every output artifact.
std::string config_to_canonical_json(const RunConfig& config);
uint64_t config_hash(const RunConfig& config);

// Feature-group model identifiers used in reports and model file names.
const std::vector<std::string>& model_group_names();  // senti_subj, content, all
// Unprefixed schema subset for a group name; throws ConfigError on others.
const std::vector<std::string>& group_features(const std::string& group);

// One row per post, schema-order columns per unit, names "unit:feature".
FeatureTable build_feature_table(const PostCollection& c, const FeatureConfig& cfg,
                                 const std::vector<TextUnit>& units);

// Raw (unstandardized) design matrix over the table rows with y = target.
DesignMatrix make_design(const FeatureTable& table, const PostCollection& c, Target target);

// Columns whose unprefixed name is in `bases`, original order preserved.
DesignMatrix select_columns(const DesignMatrix& m, const std::vector<std::string>& bases);

void cmd_ingest(const RunConfig& config);
void cmd_extract(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_rank_eval(const RunConfig& config);
void cmd_introspect(const RunConfig& config);
void cmd_titles(const RunConfig& config);
// Full experiment over the ingested corpus: percentile filter, features,
// split, per-group cross-validated fits, rank evaluation, stability
// selection, and the two-class shift report for both targets.
void cmd_run_experiment(const RunConfig& config);

}  // namespace newsrank
