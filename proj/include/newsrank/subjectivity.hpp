#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace newsrank {

enum class SubjLabel { objective = 0, subjective = 1 };

using LabeledCorpus = std::vector<std::pair<std::string, SubjLabel>>;

// Multinomial Naive Bayes over unigram counts with additive smoothing.
// Token likelihoods are reconstructed from raw counts, so serialization is
// exact and models are immutable after training.
struct NBModel {
  double smoothing = 1.0;
  double prior_subj = 0.5;
  double prior_obj = 0.5;
  long long docs_subj = 0;
  long long docs_obj = 0;
  long long tokens_subj = 0;  // token occurrences per class
  long long tokens_obj = 0;
  std::unordered_map<std::string, std::pair<long long, long long>> counts;  // token -> (subj, obj)
  std::string version = "nb1";

  size_t vocab_size() const { return counts.size(); }
};

NBModel train_nb(const LabeledCorpus& labeled, double smoothing = 1.0);

// Posterior (P(subjective), P(objective)); unknown tokens are skipped, so a
// text with no vocabulary hits returns the priors.
std::pair<double, double> predict_proba(const NBModel& m, const std::string& text);

// argmax of predict_proba; exact tie goes to objective.
SubjLabel classify(const NBModel& m, const std::string& text);

// Stratified seeded k-fold; returns the mean held-out accuracy.
double cross_validate(const LabeledCorpus& labeled, int folds, uint64_t seed, double smoothing = 1.0);

// Two plain-text files, one sentence per line; labels implied by file.
LabeledCorpus load_subjectivity_corpus(const std::string& subjective_path, const std::string& objective_path);

std::string nb_to_json(const NBModel& m);
NBModel nb_from_json(const std::string& text);

}  // namespace newsrank
