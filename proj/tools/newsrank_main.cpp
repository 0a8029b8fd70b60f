#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "newsrank/cli.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::string unit;
  std::string target;
  std::string model;
  uint64_t seed = 0;
  bool seed_set = false;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Run configuration file (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Override the config seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--out", o.out_dir, "Override the output directory");
  cmd->add_option("--unit", o.unit, "Restrict to one text unit (post_title|article_title|article_body)");
  cmd->add_option("--target", o.target, "Restrict to one target (score|comments)");
  cmd->add_option("--model", o.model, "Restrict to one feature group (senti_subj|content|all)");
}

newsrank::RunConfig effective_config(const Overrides& o) {
  newsrank::RunConfig c = newsrank::load_run_config(o.config_path);
  if (o.seed_set) c.seed = o.seed;
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (!o.unit.empty()) c.units = {newsrank::unit_from_name(o.unit)};
  if (!o.target.empty()) c.only_target = newsrank::target_from_name(o.target);
  if (!o.model.empty()) {
    newsrank::group_features(o.model);  // validates the name
    c.only_model = o.model;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"News-engagement analysis pipeline"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    void (*fn)(const newsrank::RunConfig&);
  };
  const Sub subs[] = {
      {"ingest", "Load, validate and filter a raw corpus into the output directory", newsrank::cmd_ingest},
      {"extract", "Write the per-post feature table for the configured units", newsrank::cmd_extract},
      {"train", "Fit cross-validated L1 ranking models per feature group and target", newsrank::cmd_train},
      {"rank-eval", "Score persisted models on the held-out split (precision@k, KT@k)",
       newsrank::cmd_rank_eval},
      {"introspect", "Stability selection plus high/low two-class shift report", newsrank::cmd_introspect},
      {"titles", "Title-change study: edit rates, similarity, significance tables", newsrank::cmd_titles},
      {"report", "Full experiment: filter, features, train, rank-eval, introspect", newsrank::cmd_run_experiment},
  };

  Overrides o;
  std::function<void(const newsrank::RunConfig&)> chosen;
  for (const Sub& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common_flags(cmd, o);
    auto fn = s.fn;
    cmd->callback([&chosen, fn] { chosen = fn; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    chosen(effective_config(o));
  } catch (const newsrank::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
