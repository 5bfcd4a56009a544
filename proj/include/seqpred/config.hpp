#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "seqpred/bounds.hpp"
#include "seqpred/errors.hpp"
#include "seqpred/games.hpp"
#include "seqpred/loss.hpp"
#include "seqpred/measure.hpp"
#include "seqpred/model_class.hpp"

namespace seqpred {

// Parses a decimal number or an exact fraction "a/b".
inline double parse_number(std::string_view token) {
  const auto slash = token.find('/');
  if (slash != std::string_view::npos) {
    const double num = parse_number(token.substr(0, slash));
    const double den = parse_number(token.substr(slash + 1));
    if (den == 0.0) throw ConfigError("fraction with zero denominator: \"" + std::string(token) + "\"");
    return num / den;
  }
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("not a number: \"" + std::string(token) + "\"");
  }
  return value;
}

inline std::int64_t parse_integer(std::string_view token) {
  std::int64_t value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("not an integer: \"" + std::string(token) + "\"");
  }
  return value;
}

struct MeasureConfig {
  std::string kind;  // bernoulli | markov | deterministic
  std::optional<double> theta;
  std::optional<int> order;
  std::vector<double> table;
  std::vector<double> initial;
  std::optional<std::string> head;
  std::optional<std::string> cycle;

  Measure build() const {
    if (kind == "bernoulli") {
      if (!theta) throw ConfigError("bernoulli model needs theta");
      return Measure::bernoulli(*theta);
    }
    if (kind == "markov") {
      if (!order) throw ConfigError("markov model needs order");
      if (table.empty()) throw ConfigError("markov model needs table");
      return Measure::markov(*order, table, initial);
    }
    if (kind == "deterministic") {
      if (!cycle) throw ConfigError("deterministic model needs cycle");
      return Measure::deterministic(BitString(head.value_or("")), BitString(*cycle));
    }
    throw ConfigError("unknown measure kind \"" + kind + "\" (expected bernoulli, markov, deterministic)");
  }
};

struct LossConfig {
  std::vector<double> table;  // l00 l01 l10 l11
  std::optional<double> l_min;
  std::optional<double> l_max;
  std::string schedule = "static";
  int period = 2;

  LossSpec build() const {
    if (table.size() != 4) throw ConfigError("loss table needs exactly 4 entries: l00 l01 l10 l11");
    const LossTable t = LossTable::of(table[0], table[1], table[2], table[3]);
    if (schedule == "static") {
      if (l_min || l_max) {
        return LossSpec::table(t, l_min.value_or(t.min_entry()), l_max.value_or(t.max_entry()));
      }
      return LossSpec::table(t);
    }
    if (schedule == "periodic-mask") {
      return LossSpec::periodic_mask(t, period);
    }
    throw ConfigError("unknown loss schedule \"" + schedule + "\" (expected static, periodic-mask)");
  }
};

struct ProfitConfig {
  std::vector<double> table;  // p00 p01 p10 p11
  std::optional<double> p_max;
  std::optional<double> p_delta;

  ProfitTable build_table() const {
    if (table.size() != 4) throw ConfigError("profit table needs exactly 4 entries: p00 p01 p10 p11");
    return ProfitTable::of(table[0], table[1], table[2], table[3]);
  }
};

struct ExperimentConfig {
  std::string env_id = "env";
  std::vector<MeasureConfig> models;
  std::string weights_mode = "uniform";  // uniform | explicit | complexities
  std::vector<double> weight_values;
  std::vector<int> complexities;
  std::optional<int> mu_index;  // 0-based index into models
  std::optional<MeasureConfig> mu;
  std::optional<LossConfig> loss;
  std::optional<ProfitConfig> profit;
  std::vector<int> horizons;
  std::string mode = "exact";  // exact | mc
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  InequalityGridSpec grid;
  std::string raw_text;  // verbatim config, preserved for the run manifest

  ModelClass build_model_class() const {
    if (models.empty()) throw ConfigError("config declares no models");
    std::vector<Measure> ms;
    ms.reserve(models.size());
    for (const auto& m : models) ms.push_back(m.build());
    if (weights_mode == "uniform") return ModelClass::uniform(std::move(ms));
    if (weights_mode == "explicit") return ModelClass::explicit_weights(std::move(ms), weight_values);
    if (weights_mode == "complexities") return ModelClass::from_complexities(std::move(ms), complexities);
    throw ConfigError("unknown weights mode \"" + weights_mode + "\"");
  }

  Measure build_mu() const {
    if (mu) return mu->build();
    if (mu_index) {
      if (*mu_index < 0 || static_cast<std::size_t>(*mu_index) >= models.size()) {
        throw ConfigError("mu_index out of range");
      }
      return models[static_cast<std::size_t>(*mu_index)].build();
    }
    throw ConfigError("config must declare the environment via mu_index or a [mu] section");
  }

  // Index of mu inside the class; required whenever entropy or bound
  // quantities are requested.
  std::size_t resolve_mu_index(const ModelClass& mc) const {
    const Measure m = build_mu();
    const auto idx = mc.find(m);
    if (!idx) {
      throw ConfigError("the environment measure must appear among the declared models "
                        "for entropy and bound computations");
    }
    return *idx;
  }

  LossSpec build_loss() const {
    if (loss) return loss->build();
    return LossSpec::error_loss();
  }

  GameSpec build_game(int n) const {
    if (!profit) throw ConfigError("game runs need a [profit] section");
    const ProfitTable t = profit->build_table();
    if (profit->p_max || profit->p_delta) {
      const double p_max = profit->p_max.value_or(t.max_entry());
      const double p_delta = profit->p_delta.value_or(t.max_entry() - t.min_entry());
      return GameSpec::make(build_mu(), build_model_class(), t, n, p_max, p_delta);
    }
    return GameSpec::make(build_mu(), build_model_class(), t, n);
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<double> parse_numbers(const std::vector<std::string>& tokens) {
  std::vector<double> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(parse_number(t));
  return out;
}

inline std::vector<int> parse_integers(const std::vector<std::string>& tokens) {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(static_cast<int>(parse_integer(t)));
  return out;
}

}  // namespace detail

// Line-oriented "key = value" format with [model], [mu], [loss], [profit]
// and [grid] sections. Values are whitespace-separated tokens; numbers may
// be decimals or exact fractions "a/b". '#' starts a comment.
inline ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  cfg.raw_text.assign(text);

  enum class Section { Top, Model, Mu, Loss, Profit, Grid };
  Section section = Section::Top;

  auto fail = [](const std::string& msg) -> void { throw ConfigError(msg); };

  auto process_line = [&](std::string_view line) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) return;

    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string_view name = detail::trim(line.substr(1, line.size() - 2));
      if (name == "model") {
        section = Section::Model;
        cfg.models.emplace_back();
      } else if (name == "mu") {
        section = Section::Mu;
        if (cfg.mu) fail("duplicate [mu] section");
        cfg.mu.emplace();
      } else if (name == "loss") {
        section = Section::Loss;
        if (cfg.loss) fail("duplicate [loss] section");
        cfg.loss.emplace();
      } else if (name == "profit") {
        section = Section::Profit;
        if (cfg.profit) fail("duplicate [profit] section");
        cfg.profit.emplace();
      } else if (name == "grid") {
        section = Section::Grid;
      } else {
        fail("unknown section [" + std::string(name) + "]");
      }
      return;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::vector<std::string> tokens = detail::split_tokens(detail::trim(line.substr(eq + 1)));
    if (tokens.empty()) fail("empty value for key \"" + key + "\"");
    const std::string& first = tokens.front();

    auto expect_single = [&]() -> const std::string& {
      if (tokens.size() != 1) fail("key \"" + key + "\" takes a single value");
      return first;
    };

    // Top-level keys are recognized anywhere; their names do not collide
    // with any section key.
    auto handle_top = [&]() -> bool {
      if (key == "env") {
        cfg.env_id = expect_single();
      } else if (key == "n") {
        cfg.horizons = {static_cast<int>(parse_integer(expect_single()))};
      } else if (key == "horizons") {
        cfg.horizons = detail::parse_integers(tokens);
      } else if (key == "mode") {
        cfg.mode = expect_single();
        if (cfg.mode != "exact" && cfg.mode != "mc") fail("mode must be exact or mc");
      } else if (key == "samples") {
        cfg.samples = static_cast<std::uint64_t>(parse_integer(expect_single()));
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_integer(expect_single()));
      } else if (key == "weights") {
        if (tokens.size() == 1 && first == "uniform") {
          cfg.weights_mode = "uniform";
        } else {
          cfg.weights_mode = "explicit";
          cfg.weight_values = detail::parse_numbers(tokens);
        }
      } else if (key == "complexities") {
        cfg.weights_mode = "complexities";
        cfg.complexities = detail::parse_integers(tokens);
      } else if (key == "mu_index") {
        cfg.mu_index = static_cast<int>(parse_integer(expect_single()));
      } else {
        return false;
      }
      return true;
    };

    auto handle_measure = [&](MeasureConfig& m) -> bool {
      if (key == "kind") {
        m.kind = expect_single();
      } else if (key == "theta") {
        m.theta = parse_number(expect_single());
      } else if (key == "order") {
        m.order = static_cast<int>(parse_integer(expect_single()));
      } else if (key == "table") {
        m.table = detail::parse_numbers(tokens);
      } else if (key == "initial") {
        m.initial = detail::parse_numbers(tokens);
      } else if (key == "head") {
        m.head = expect_single();
      } else if (key == "cycle") {
        m.cycle = expect_single();
      } else {
        return false;
      }
      return true;
    };

    auto handle_loss = [&]() -> bool {
      LossConfig& l = *cfg.loss;
      if (key == "table") {
        l.table = detail::parse_numbers(tokens);
      } else if (key == "l_min") {
        l.l_min = parse_number(expect_single());
      } else if (key == "l_max") {
        l.l_max = parse_number(expect_single());
      } else if (key == "schedule") {
        l.schedule = expect_single();
      } else if (key == "period") {
        l.period = static_cast<int>(parse_integer(expect_single()));
      } else {
        return false;
      }
      return true;
    };

    auto handle_profit = [&]() -> bool {
      ProfitConfig& p = *cfg.profit;
      if (key == "table") {
        p.table = detail::parse_numbers(tokens);
      } else if (key == "p_max") {
        p.p_max = parse_number(expect_single());
      } else if (key == "p_delta") {
        p.p_delta = parse_number(expect_single());
      } else {
        return false;
      }
      return true;
    };

    auto handle_grid = [&]() -> bool {
      if (key == "a_values") {
        cfg.grid.a_values = detail::parse_numbers(tokens);
      } else if (key == "resolution") {
        cfg.grid.resolution = static_cast<int>(parse_integer(expect_single()));
      } else if (key == "tolerance") {
        cfg.grid.tolerance = parse_number(expect_single());
      } else {
        return false;
      }
      return true;
    };

    bool handled = false;
    switch (section) {
      case Section::Top:
        handled = handle_top();
        break;
      case Section::Model:
        handled = handle_measure(cfg.models.back()) || handle_top();
        break;
      case Section::Mu:
        handled = handle_measure(*cfg.mu) || handle_top();
        break;
      case Section::Loss:
        handled = handle_loss() || handle_top();
        break;
      case Section::Profit:
        handled = handle_profit() || handle_top();
        break;
      case Section::Grid:
        handled = handle_grid() || handle_top();
        break;
    }
    if (!handled) fail("unknown key \"" + key + "\"");
  };

  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    try {
      process_line(raw_line);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  if (cfg.horizons.empty()) cfg.horizons = {8};
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

}  // namespace seqpred
