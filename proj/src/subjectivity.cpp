#include "newsrank/subjectivity.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "newsrank/textproc.hpp"
#include "newsrank/util.hpp"

namespace newsrank {

NBModel train_nb(const LabeledCorpus& labeled, double smoothing) {
  if (labeled.empty()) throw Error("train_nb: empty corpus");
  if (smoothing <= 0) throw Error("train_nb: smoothing must be positive");

  NBModel m;
  m.smoothing = smoothing;
  for (const auto& [text, label] : labeled) {
    bool subj = label == SubjLabel::subjective;
    (subj ? m.docs_subj : m.docs_obj) += 1;
    for (const auto& tok : tokenize(text).tokens) {
      auto& c = m.counts[tok];
      (subj ? c.first : c.second) += 1;
      (subj ? m.tokens_subj : m.tokens_obj) += 1;
    }
  }
  if (m.docs_subj == 0 || m.docs_obj == 0) throw Error("train_nb: both labels must be present");
  double n = static_cast<double>(m.docs_subj + m.docs_obj);
  m.prior_subj = m.docs_subj / n;
  m.prior_obj = m.docs_obj / n;
  return m;
}

std::pair<double, double> predict_proba(const NBModel& m, const std::string& text) {
  if (m.docs_subj == 0 || m.docs_obj == 0) throw Error("predict_proba: model not trained");
  double v = static_cast<double>(m.vocab_size());
  double denom_subj = std::log(m.tokens_subj + m.smoothing * v);
  double denom_obj = std::log(m.tokens_obj + m.smoothing * v);

  double ls = std::log(m.prior_subj);
  double lo = std::log(m.prior_obj);
  for (const auto& tok : tokenize(text).tokens) {
    auto it = m.counts.find(tok);
    if (it == m.counts.end()) continue;
    ls += std::log(it->second.first + m.smoothing) - denom_subj;
    lo += std::log(it->second.second + m.smoothing) - denom_obj;
  }
  // Normalize in log space; stable for long texts.
  double hi = std::max(ls, lo);
  double zs = std::exp(ls - hi), zo = std::exp(lo - hi);
  return {zs / (zs + zo), zo / (zs + zo)};
}

SubjLabel classify(const NBModel& m, const std::string& text) {
  auto [psubj, pobj] = predict_proba(m, text);
  return psubj > pobj ? SubjLabel::subjective : SubjLabel::objective;
}

double cross_validate(const LabeledCorpus& labeled, int folds, uint64_t seed, double smoothing) {
  if (folds < 2) throw Error("cross_validate: folds must be >= 2");

  std::vector<size_t> subj_idx, obj_idx;
  for (size_t i = 0; i < labeled.size(); ++i) {
    (labeled[i].second == SubjLabel::subjective ? subj_idx : obj_idx).push_back(i);
  }
  if (subj_idx.size() < static_cast<size_t>(folds) || obj_idx.size() < static_cast<size_t>(folds)) {
    throw Error("cross_validate: folds exceed class size");
  }

  // Stratified assignment: shuffle within each class, deal round-robin.
  Rng rng(seed);
  Rng r_subj = rng.child(1), r_obj = rng.child(2);
  r_subj.shuffle(subj_idx);
  r_obj.shuffle(obj_idx);
  std::vector<int> fold_of(labeled.size());
  for (size_t i = 0; i < subj_idx.size(); ++i) fold_of[subj_idx[i]] = static_cast<int>(i % folds);
  for (size_t i = 0; i < obj_idx.size(); ++i) fold_of[obj_idx[i]] = static_cast<int>(i % folds);

  double acc_sum = 0;
  for (int f = 0; f < folds; ++f) {
    LabeledCorpus train;
    std::vector<size_t> held;
    for (size_t i = 0; i < labeled.size(); ++i) {
      if (fold_of[i] == f) {
        held.push_back(i);
      } else {
        train.push_back(labeled[i]);
      }
    }
    NBModel m = train_nb(train, smoothing);
    size_t correct = 0;
    for (size_t i : held) {
      if (classify(m, labeled[i].first) == labeled[i].second) ++correct;
    }
    acc_sum += static_cast<double>(correct) / static_cast<double>(held.size());
  }
  return acc_sum / folds;
}

LabeledCorpus load_subjectivity_corpus(const std::string& subjective_path, const std::string& objective_path) {
  LabeledCorpus out;
  auto load = [&](const std::string& path, SubjLabel label) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      out.emplace_back(line, label);
    }
  };
  load(subjective_path, SubjLabel::subjective);
  load(objective_path, SubjLabel::objective);
  return out;
}

std::string nb_to_json(const NBModel& m) {
  nlohmann::json vocab = nlohmann::json::object();
  for (const auto& [tok, c] : m.counts) {
    vocab[tok] = {c.first, c.second};
  }
  nlohmann::json j = {
      {"version", m.version},
      {"smoothing", m.smoothing},
      {"docs", {{"subjective", m.docs_subj}, {"objective", m.docs_obj}}},
      {"tokens", {{"subjective", m.tokens_subj}, {"objective", m.tokens_obj}}},
      {"vocab", vocab},
  };
  return j.dump(2) + "\n";
}

NBModel nb_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  NBModel m;
  m.version = j.at("version").get<std::string>();
  m.smoothing = j.at("smoothing").get<double>();
  m.docs_subj = j.at("docs").at("subjective").get<long long>();
  m.docs_obj = j.at("docs").at("objective").get<long long>();
  m.tokens_subj = j.at("tokens").at("subjective").get<long long>();
  m.tokens_obj = j.at("tokens").at("objective").get<long long>();
  for (const auto& [tok, c] : j.at("vocab").items()) {
    m.counts[tok] = {c.at(0).get<long long>(), c.at(1).get<long long>()};
  }
  double n = static_cast<double>(m.docs_subj + m.docs_obj);
  if (n <= 0) throw Error("nb_from_json: no training documents recorded");
  m.prior_subj = m.docs_subj / n;
  m.prior_obj = m.docs_obj / n;
  return m;
}

}  // namespace newsrank
