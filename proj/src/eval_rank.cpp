#include "newsrank/eval_rank.hpp"

#include <algorithm>
#include <unordered_set>

#include "newsrank/util.hpp"

namespace newsrank {

namespace {

// Counts inversions by merge sort; seq holds distinct ranks.
long long count_inversions(std::vector<size_t>& seq, std::vector<size_t>& buf, size_t lo, size_t hi) {
  if (hi - lo < 2) return 0;
  size_t mid = lo + (hi - lo) / 2;
  long long inv = count_inversions(seq, buf, lo, mid) + count_inversions(seq, buf, mid, hi);
  size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (seq[a] <= seq[b]) {
      buf[out++] = seq[a++];
    } else {
      inv += static_cast<long long>(mid - a);
      buf[out++] = seq[b++];
    }
  }
  while (a < mid) buf[out++] = seq[a++];
  while (b < hi) buf[out++] = seq[b++];
  std::copy(buf.begin() + lo, buf.begin() + hi, seq.begin() + lo);
  return inv;
}

void check_metric_args(size_t n_truth, size_t n_pred, size_t k) {
  if (n_truth != n_pred) throw Error("rank metric: value vectors differ in length");
  if (k == 0) throw Error("rank metric: k must be positive");
  if (k > n_truth) throw Error("rank metric: k exceeds number of items");
}

}  // namespace

std::vector<size_t> top_k_indices(const std::vector<double>& values, size_t k) {
  std::vector<size_t> idx(values.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  });
  idx.resize(k);
  return idx;
}

double precision_at_k(const std::vector<double>& truth, const std::vector<double>& predicted, size_t k) {
  check_metric_args(truth.size(), predicted.size(), k);
  std::vector<size_t> top_true = top_k_indices(truth, k);
  std::vector<size_t> top_pred = top_k_indices(predicted, k);
  std::unordered_set<size_t> pred_set(top_pred.begin(), top_pred.end());
  size_t hits = 0;
  for (size_t i : top_true) {
    if (pred_set.count(i)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

long long kt_distance_at_k(const std::vector<double>& truth, const std::vector<double>& predicted, size_t k) {
  check_metric_args(truth.size(), predicted.size(), k);

  // The true top-k, already in true order.
  std::vector<size_t> top_true = top_k_indices(truth, k);

  // Rank those same items by predicted value.
  std::vector<size_t> by_pred = top_true;
  std::sort(by_pred.begin(), by_pred.end(), [&](size_t a, size_t b) {
    if (predicted[a] != predicted[b]) return predicted[a] > predicted[b];
    return a < b;
  });
  std::vector<size_t> pred_rank_of(truth.size());
  for (size_t r = 0; r < by_pred.size(); ++r) pred_rank_of[by_pred[r]] = r;

  // Discordant pairs = inversions of predicted ranks listed in true order.
  std::vector<size_t> seq(k);
  for (size_t r = 0; r < k; ++r) seq[r] = pred_rank_of[top_true[r]];
  std::vector<size_t> buf(k);
  return count_inversions(seq, buf, 0, k);
}

RankEvalReport rank_eval(const LinearRankModel& model, const DesignMatrix& test, const std::vector<size_t>& ks,
                         const std::string& dataset, const std::string& model_id, const std::string& target) {
  std::vector<double> predicted = predict(model, test);
  RankEvalReport report;
  report.test_size = test.n;
  report.dataset = dataset;
  report.model_id = model_id;
  report.target = target;
  for (size_t k : ks) {
    RankEvalEntry e;
    e.k = k;
    e.precision = precision_at_k(test.y, predicted, k);
    e.kt_distance = kt_distance_at_k(test.y, predicted, k);
    report.entries.push_back(e);
  }
  return report;
}

std::string rank_eval_to_csv(const std::vector<RankEvalReport>& reports, const std::string& preamble) {
  std::string out = preamble;
  out += "dataset,model,target,k,precision,kt_distance\n";
  for (const auto& rep : reports) {
    for (const auto& e : rep.entries) {
      out += csv_escape(rep.dataset) + "," + csv_escape(rep.model_id) + "," + csv_escape(rep.target) + "," +
             std::to_string(e.k) + "," + format_double(e.precision) + "," + std::to_string(e.kt_distance) +
             "\n";
    }
  }
  return out;
}

}  // namespace newsrank
