#include "dreg_cli/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "dreg/errors.hpp"

namespace dreg::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(ErrorKind::InvalidConfiguration, where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      fail(ErrorKind::InvalidConfiguration, "unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename T>
void read(const json& obj, const char* key, std::optional<T>& out) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = obj.at(key).get<T>();
}

PenaltyConfig penalty_from_json(const json& obj, const std::string& where, PenaltyConfig p) {
  check_keys(obj, where, {"c", "gamma", "max_loops", "solver_tol", "max_iter", "refit_tol",
                          "loading_floor", "coefficient_cap"});
  read(obj, "c", p.c);
  read(obj, "gamma", p.gamma);
  read(obj, "max_loops", p.max_loops);
  read(obj, "solver_tol", p.solver_tol);
  read(obj, "max_iter", p.max_iter);
  read(obj, "refit_tol", p.refit_tol);
  read(obj, "loading_floor", p.loading_floor);
  read(obj, "coefficient_cap", p.coefficient_cap);
  return p;
}

ordered_json penalty_to_json(const PenaltyConfig& p) {
  ordered_json j{{"c", p.c}};
  j["gamma"] = p.gamma ? ordered_json(*p.gamma) : ordered_json(nullptr);
  j["max_loops"] = p.max_loops;
  j["solver_tol"] = p.solver_tol;
  j["max_iter"] = p.max_iter;
  j["refit_tol"] = p.refit_tol;
  j["loading_floor"] = p.loading_floor;
  j["coefficient_cap"] = p.coefficient_cap;
  return j;
}

DesignSpec design_from_json(const json& obj, DesignSpec d) {
  check_keys(obj, "mc", {"design", "variant", "n", "p", "u_set", "j_set", "rho", "u_range", "reps",
                         "methods"});
  if (obj.contains("design")) {
    const auto s = obj.at("design").get<std::string>();
    if (s == "D1") {
      d.design = DesignId::D1;
    } else if (s == "D2") {
      d.design = DesignId::D2;
    } else {
      fail(ErrorKind::InvalidConfiguration, "mc.design must be \"D1\" or \"D2\"");
    }
  }
  if (obj.contains("variant")) {
    const auto s = obj.at("variant").get<std::string>();
    if (s == "i") {
      d.variant = BetaVariant::I;
    } else if (s == "ii") {
      d.variant = BetaVariant::II;
    } else {
      fail(ErrorKind::InvalidConfiguration, "mc.variant must be \"i\" or \"ii\"");
    }
  }
  read(obj, "n", d.n);
  read(obj, "p", d.p);
  read(obj, "u_set", d.u_set);
  read(obj, "j_set", d.j_set);
  read(obj, "rho", d.rho);
  if (obj.contains("u_range") && !obj.at("u_range").is_null()) {
    const auto r = obj.at("u_range").get<std::vector<double>>();
    if (r.size() != 2) fail(ErrorKind::InvalidConfiguration, "mc.u_range must be [lo, hi]");
    d.range = ResponseThresholds(r[0], r[1]);
  }
  return d;
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  RunConfig cfg;
  try {
    check_keys(doc, "config", {"data", "grid", "thresholds", "penalty", "inference", "bootstrap",
                               "method", "seed", "threads", "output", "mc"});
    if (doc.contains("data")) {
      const json& d = doc.at("data");
      check_keys(d, "data", {"path", "response", "d_columns", "x_columns"});
      read(d, "path", cfg.data_path);
      read(d, "response", cfg.roles.response);
      read(d, "d_columns", cfg.roles.d_columns);
      read(d, "x_columns", cfg.roles.x_columns);
    }
    if (doc.contains("grid")) {
      const json& g = doc.at("grid");
      check_keys(g, "grid", {"u_values", "u_count", "u_min", "u_max", "j"});
      read(g, "u_values", cfg.grid.u_values);
      read(g, "u_count", cfg.grid.u_count);
      read(g, "u_min", cfg.grid.u_min);
      read(g, "u_max", cfg.grid.u_max);
      read(g, "j", cfg.grid.j_values);
    }
    if (doc.contains("thresholds")) {
      const json& t = doc.at("thresholds");
      check_keys(t, "thresholds", {"y_lo", "y_hi", "q_lo", "q_hi"});
      read(t, "y_lo", cfg.thresholds.y_lo);
      read(t, "y_hi", cfg.thresholds.y_hi);
      read(t, "q_lo", cfg.thresholds.q_lo);
      read(t, "q_hi", cfg.thresholds.q_hi);
    }
    if (doc.contains("penalty")) {
      const json& p = doc.at("penalty");
      check_keys(p, "penalty", {"logistic", "lasso"});
      if (p.contains("logistic")) {
        cfg.inference.logistic = penalty_from_json(p.at("logistic"), "penalty.logistic", cfg.inference.logistic);
      }
      if (p.contains("lasso")) {
        cfg.inference.lasso = penalty_from_json(p.at("lasso"), "penalty.lasso", cfg.inference.lasso);
      }
    }
    if (doc.contains("inference")) {
      const json& i = doc.at("inference");
      check_keys(i, "inference", {"weight_floor", "theta_box_width", "z_tol", "alt_variance",
                                  "sigma_at_pilot", "literal_double_selection"});
      read(i, "weight_floor", cfg.inference.weight_floor);
      read(i, "theta_box_width", cfg.inference.theta_box_width);
      read(i, "z_tol", cfg.inference.z_tol);
      if (i.contains("alt_variance")) {
        const auto s = i.at("alt_variance").get<std::string>();
        if (s == "inverse") {
          cfg.inference.alt_variance = AltVarianceRule::Inverse;
        } else if (s == "literal") {
          cfg.inference.alt_variance = AltVarianceRule::Literal;
        } else {
          fail(ErrorKind::InvalidConfiguration, "inference.alt_variance must be inverse or literal");
        }
      }
      read(i, "sigma_at_pilot", cfg.inference.sigma_at_pilot);
      read(i, "literal_double_selection", cfg.inference.literal_double_selection);
    }
    if (doc.contains("bootstrap")) {
      const json& b = doc.at("bootstrap");
      check_keys(b, "bootstrap", {"b", "alpha"});
      read(b, "b", cfg.bootstrap_b);
      read(b, "alpha", cfg.alpha);
    }
    if (doc.contains("method")) cfg.method = method_from_string(doc.at("method").get<std::string>());
    read(doc, "seed", cfg.seed);
    read(doc, "threads", cfg.threads);
    if (doc.contains("output")) {
      const json& o = doc.at("output");
      check_keys(o, "output", {"dir"});
      read(o, "dir", cfg.out_dir);
    }
    if (doc.contains("mc")) {
      const json& m = doc.at("mc");
      cfg.mc.design = design_from_json(m, cfg.mc.design);
      read(m, "reps", cfg.mc.reps);
      if (m.contains("methods")) {
        cfg.mc.methods.clear();
        for (const auto& s : m.at("methods").get<std::vector<std::string>>()) {
          cfg.mc.methods.push_back(mc_method_from_string(s));
        }
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidConfiguration, std::string("malformed config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidConfiguration, "config '" + path + "' is not valid JSON: " + e.what());
  }
  RunConfig cfg = config_from_json(doc);
  cfg.base_dir = std::filesystem::path(path).parent_path().string();
  return cfg;
}

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["data"] = {{"path", cfg.data_path},
               {"response", cfg.roles.response},
               {"d_columns", cfg.roles.d_columns},
               {"x_columns", cfg.roles.x_columns}};
  ordered_json grid{{"u_values", cfg.grid.u_values},
                    {"u_count", cfg.grid.u_count},
                    {"u_min", cfg.grid.u_min},
                    {"u_max", cfg.grid.u_max},
                    {"j", cfg.grid.j_values}};
  j["grid"] = std::move(grid);
  ordered_json th;
  th["y_lo"] = cfg.thresholds.y_lo ? ordered_json(*cfg.thresholds.y_lo) : ordered_json(nullptr);
  th["y_hi"] = cfg.thresholds.y_hi ? ordered_json(*cfg.thresholds.y_hi) : ordered_json(nullptr);
  th["q_lo"] = cfg.thresholds.q_lo;
  th["q_hi"] = cfg.thresholds.q_hi;
  j["thresholds"] = std::move(th);
  j["penalty"] = {{"logistic", penalty_to_json(cfg.inference.logistic)},
                  {"lasso", penalty_to_json(cfg.inference.lasso)}};
  j["inference"] = {
      {"weight_floor", cfg.inference.weight_floor},
      {"theta_box_width", cfg.inference.theta_box_width},
      {"z_tol", cfg.inference.z_tol},
      {"alt_variance", cfg.inference.alt_variance == AltVarianceRule::Inverse ? "inverse" : "literal"},
      {"sigma_at_pilot", cfg.inference.sigma_at_pilot},
      {"literal_double_selection", cfg.inference.literal_double_selection}};
  j["bootstrap"] = {{"b", cfg.bootstrap_b}, {"alpha", cfg.alpha}};
  j["method"] = to_string(cfg.method);
  j["seed"] = cfg.seed;
  const DesignSpec& d = cfg.mc.design;
  ordered_json mc{{"design", d.design == DesignId::D1 ? "D1" : "D2"},
                  {"variant", d.variant == BetaVariant::I ? "i" : "ii"},
                  {"n", d.n},
                  {"p", d.p},
                  {"u_set", d.u_set},
                  {"j_set", d.j_set},
                  {"rho", d.rho}};
  mc["u_range"] = d.range ? ordered_json::array({d.range->y_lo, d.range->y_hi}) : ordered_json(nullptr);
  mc["reps"] = cfg.mc.reps;
  ordered_json methods = ordered_json::array();
  for (auto m : cfg.mc.methods) methods.push_back(to_string(m));
  mc["methods"] = std::move(methods);
  j["mc"] = std::move(mc);
  return j;
}

}  // namespace dreg::cli
