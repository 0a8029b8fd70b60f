#pragma once

#include <string>
#include <vector>

#include "newsrank/model.hpp"

namespace newsrank {

// Top-k selection orders by (value descending, input index ascending), so
// ties never inflate agreement between two rankings.
std::vector<size_t> top_k_indices(const std::vector<double>& values, size_t k);

// |top-k by true  ∩  top-k by predicted| / k.
double precision_at_k(const std::vector<double>& truth, const std::vector<double>& predicted, size_t k);

// Discordant pairs between true and predicted order, restricted to the k
// items that are top-k by true value.
long long kt_distance_at_k(const std::vector<double>& truth, const std::vector<double>& predicted, size_t k);

struct RankEvalEntry {
  size_t k = 0;
  double precision = 0.0;
  long long kt_distance = 0;
};

struct RankEvalReport {
  std::vector<RankEvalEntry> entries;
  size_t test_size = 0;
  std::string dataset;
  std::string model_id;
  std::string target;
};

// Predicts on the test matrix and scores both metrics at each k.
RankEvalReport rank_eval(const LinearRankModel& model, const DesignMatrix& test, const std::vector<size_t>& ks,
                         const std::string& dataset = "", const std::string& model_id = "",
                         const std::string& target = "");

// Rows: dataset, model, target, k, precision, kt_distance.
std::string rank_eval_to_csv(const std::vector<RankEvalReport>& reports, const std::string& preamble = "");

}  // namespace newsrank
