// treelimit: command-line front-end for the subtree-size experiments.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "treelimit/experiment.hpp"

namespace {

using treelimit::experiment::Config;
using treelimit::experiment::Kind;

/// Reads nested JSON objects as config items: top-level keys are global
/// options, {"clt": {...}} sets options of the clt subcommand.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (!opt->get_configurable() || opt->get_single_name().empty()) continue;
      if (opt->count() > 0) {
        j[opt->get_single_name()] = opt->as<std::string>();
      } else if (default_also && !opt->get_default_str().empty()) {
        j[opt->get_single_name()] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  static void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto nested = parents;
        nested.push_back(it.key());
        collect(*it, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(*it));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Sub {
  Kind kind;
  CLI::App* app = nullptr;
  Config config;
};

void add_common(CLI::App* app, Config& c) {
  app->add_option("-o,--output", c.output, "Primary output path ('-' for stdout)")->capture_default_str();
}

void add_measure(CLI::App* app, Config& c) {
  app->add_option("--measure", c.measure,
                  "uniform | bernoulli:<p> | point:<bits> | table:<path> | bst-limit:<seed>")
      ->capture_default_str();
}

void add_nodes(CLI::App* app, Config& c) {
  app->add_option("--nodes", c.nodes, "Comma-separated words; 'root' is the empty word")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Growing binary trees: subtree-size limits, exchangeability and CLT checks"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  unsigned workers = 1;
  app.add_option("--seed", seed, "Master seed")->envname("TREELIMIT_SEED")->capture_default_str();
  app.add_option("--workers", workers, "Worker threads (output does not depend on it)")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();

  std::map<std::string, Sub> subs;
  auto make = [&](const std::string& name, Kind kind, const std::string& help) -> Sub& {
    Sub& s = subs[name];
    s.kind = kind;
    s.config.kind = kind;
    s.app = app.add_subcommand(name, help);
    add_common(s.app, s.config);
    return s;
  };

  {
    Sub& s = make("grow", Kind::grow, "Grow one trajectory and print its insertion log");
    s.config.n = 100;
    s.app->add_option("--model", s.config.model, "dst | bst | remy")->capture_default_str();
    add_measure(s.app, s.config);
    s.app->add_option("--n", s.config.n, "Final tree size")->capture_default_str();
  }
  {
    Sub& s = make("uniform", Kind::uniform, "Sample a uniform tree with n nodes");
    s.config.n = 100;
    s.config.model = "catalan";
    s.app->add_option("--n", s.config.n, "Tree size")->capture_default_str();
    s.app->add_option("--model", s.config.model, "catalan | remy")->capture_default_str();
    s.app->add_option("--format", s.config.format, "lines | json")->capture_default_str();
  }
  {
    Sub& s = make("clt", Kind::clt, "Covariance of the fluctuation vector under DST(mu)");
    add_measure(s.app, s.config);
    add_nodes(s.app, s.config);
    s.app->add_option("--n", s.config.n, "Tree size")->capture_default_str();
    s.app->add_option("--reps", s.config.reps, "Replicates")->capture_default_str();
    s.app->add_option("--csv", s.config.csv, "Entry table (u,v,theoretical,empirical,se,pass)");
  }
  {
    Sub& s = make("bst-mixture", Kind::bst_mixture, "BST as a mixture of DST(M_BST)");
    s.config.nodes = "0,1,00";
    add_nodes(s.app, s.config);
    s.app->add_option("--n", s.config.n, "Tree size for the conditional covariance arm")
        ->capture_default_str();
    s.app->add_option("--reps", s.config.reps, "Replicates of the covariance arm")->capture_default_str();
    s.app->add_option("--shape-size", s.config.shape_size, "k for the shape-law arm")
        ->capture_default_str();
    s.app->add_option("--shape-runs", s.config.shape_runs, "Runs per shape-law arm")
        ->capture_default_str();
    s.app->add_option("--csv", s.config.csv, "Entry table of the covariance arm");
  }
  {
    Sub& s = make("increments", Kind::increments, "Local increment processes under DST(mu)");
    s.config.reps = 1;
    s.config.nodes = "root,0,1";
    add_measure(s.app, s.config);
    add_nodes(s.app, s.config);
    s.app->add_option("--horizon", s.config.horizon, "Steps after each entry time")->capture_default_str();
    s.app->add_option("--reps", s.config.reps, "Independent runs")->capture_default_str();
    s.app->add_option("--block-len", s.config.block_len, "Pattern length of the diagnostic")
        ->capture_default_str();
    s.app->add_option("--shuffles", s.config.shuffles, "Random rearrangements per p-value")
        ->capture_default_str();
    s.app->add_option("--csv", s.config.csv, "Replicate 0 increments (node,step,value)");
  }
  {
    Sub& s = make("trace", Kind::trace, "t(X_n,u) and mu_{X_n}(B_u) along one growth");
    s.config.n = 1'000'000;
    s.config.nodes = "0";
    s.app->add_option("--model", s.config.model, "dst | bst | remy | catalan")->capture_default_str();
    add_measure(s.app, s.config);
    add_nodes(s.app, s.config);
    s.app->add_option("--n", s.config.n, "Last checkpoint when --checkpoints is absent")
        ->capture_default_str();
    s.app->add_option("--checkpoints", s.config.checkpoints, "Tree sizes to record")->delimiter(',');
  }
  {
    Sub& s = make("embed", Kind::embed, "Cylinder masses of the boundary measure of a tree");
    s.config.n = 100;
    s.app->add_option("--tree", s.config.tree, "Tree file (preorder lines or JSON array)");
    s.app->add_option("--model", s.config.model, "Model used when no tree is given")->capture_default_str();
    add_measure(s.app, s.config);
    s.app->add_option("--n", s.config.n, "Size used when no tree is given")->capture_default_str();
    s.app->add_option("--depth", s.config.depth, "Cylinder depth")->capture_default_str();
    s.app->add_option("--table-out", s.config.table_out, "Also store the masses as a table measure");
  }
  {
    Sub& s = make("selftest", Kind::selftest, "Exact identities at small sizes");
    s.app->add_option("--fixture", s.config.fixture, "Extra table measure JSON to check");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "treelimit: " << e.what() << '\n';
    return treelimit::experiment::kExitUsage;
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    s.config.seed = seed;
    s.config.workers = workers;
    try {
      return treelimit::experiment::run(s.config, std::cout, std::cerr);
    } catch (const std::invalid_argument& e) {
      std::cerr << "treelimit " << name << ": " << e.what() << '\n';
      return treelimit::experiment::kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "treelimit " << name << ": " << e.what() << '\n';
      return treelimit::experiment::kExitUsage;
    }
  }
  return treelimit::experiment::kExitUsage;
}
