#include "dreg/montecarlo.hpp"

#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "dreg/errors.hpp"
#include "dreg/format.hpp"
#include "dreg/normal.hpp"
#include "dreg/parallel.hpp"
#include "dreg/rng.hpp"

namespace dreg {
namespace {

constexpr std::uint64_t kBootLabel = 0x626f6f74ULL;  // "boot"
constexpr double kMaxFailureShare = 0.05;

std::uint64_t bootstrap_seed(std::uint64_t master, std::uint64_t replication, McMethod m) {
  return derive_seed(derive_seed(master, kBootLabel + static_cast<std::uint64_t>(m)), replication);
}

MethodOutcome evaluate(McMethod method, const ScorePanel& panel, const std::vector<double>& truth,
                       double critical, double z) {
  MethodOutcome out;
  out.method = method;
  out.critical = critical;
  const double root_n = std::sqrt(static_cast<double>(panel.psi.rows()));
  for (std::size_t c = 0; c < panel.cells.size(); ++c) {
    const auto& cell = panel.cells[c];
    const double t = std::abs(cell.theta_check - truth[c]) * root_n / cell.sigma_hat;
    out.pointwise_reject.push_back(t > z);
    out.uniform_reject = out.uniform_reject || t > critical;
    out.theta_check.push_back(cell.theta_check);
    out.sigma_hat.push_back(cell.sigma_hat);
  }
  return out;
}

bool wants(const ExperimentConfig& cfg, McMethod m) {
  for (auto x : cfg.methods) {
    if (x == m) return true;
  }
  return false;
}

}  // namespace

const char* to_string(McMethod m) {
  switch (m) {
    case McMethod::ProposedOS: return "proposed-os";
    case McMethod::ProposedDS: return "proposed-ds";
    case McMethod::NaiveMB: return "naive-mb";
    case McMethod::NaiveBF: return "naive-bf";
  }
  return "unknown";
}

McMethod mc_method_from_string(const std::string& name) {
  for (auto m : {McMethod::ProposedOS, McMethod::ProposedDS, McMethod::NaiveMB, McMethod::NaiveBF}) {
    if (name == to_string(m)) return m;
  }
  fail(ErrorKind::InvalidConfiguration,
       "unknown mc method '" + name + "' (expected proposed-os|proposed-ds|naive-mb|naive-bf)");
}

const ReportRow& RejectionReport::row(McMethod method, const std::string& scope) const {
  for (const auto& r : rows) {
    if (r.method == method && r.scope == scope) return r;
  }
  fail(ErrorKind::InvalidArgument, std::string("no report row for ") + to_string(method) + "/" + scope);
}

ReplicationRecord run_replication(const ExperimentConfig& cfg, std::uint64_t replication) {
  ReplicationRecord rec;
  rec.index = replication;
  try {
    const SimulatedSample sample = simulate(cfg.design, replication);
    const Dataset& ds = sample.data;
    std::vector<std::size_t> positions(cfg.design.j_set.size());
    for (std::size_t b = 0; b < positions.size(); ++b) positions[b] = b + 1;
    const IndexGrid grid(cfg.design.mapped_u(), positions);
    for (double u : cfg.design.u_set) {
      for (auto k : cfg.design.j_set) rec.truth.push_back(sample.truth(u, k));
    }

    InferenceConfig inf = cfg.inference;
    inf.threads = 1;
    const MatrixXd design = full_design(ds).values;
    std::vector<Pilot> pilots;
    for (double u : grid.u_values()) {
      pilots.push_back(fit_pilot(ds, design, u, functional_response(ds, u, sample.thresholds), inf));
    }
    auto panel_for = [&](Method m) {
      std::vector<CellResult> cells;
      for (std::size_t c = 0; c < grid.size(); ++c) {
        const std::size_t a = c / positions.size();
        cells.push_back(fit_cell(ds, pilots[a], positions[c % positions.size()], inf, m));
      }
      return assemble_panel(std::move(cells));
    };
    auto mb_critical = [&](const ScorePanel& panel, McMethod m) {
      BootstrapConfig bc = cfg.bootstrap;
      bc.seed = bootstrap_seed(cfg.bootstrap.seed, replication, m);
      bc.threads = 1;
      return critical_value(panel.psi, bc);
    };

    const double alpha = cfg.bootstrap.alpha;
    const double z = normal_upper_quantile(alpha / 2.0);
    for (auto m : cfg.methods) {
      switch (m) {
        case McMethod::ProposedOS:
        case McMethod::ProposedDS: {
          const ScorePanel panel =
              panel_for(m == McMethod::ProposedOS ? Method::OrthogonalScore : Method::DoubleSelection);
          rec.outcomes.push_back(evaluate(m, panel, rec.truth, mb_critical(panel, m), z));
          break;
        }
        case McMethod::NaiveMB:
        case McMethod::NaiveBF:
          break;
      }
    }
    if (wants(cfg, McMethod::NaiveMB) || wants(cfg, McMethod::NaiveBF)) {
      const ScorePanel panel = panel_for(Method::Naive);
      for (auto m : cfg.methods) {
        if (m == McMethod::NaiveMB) {
          rec.outcomes.push_back(evaluate(m, panel, rec.truth, mb_critical(panel, m), z));
        } else if (m == McMethod::NaiveBF) {
          rec.outcomes.push_back(
              evaluate(m, panel, rec.truth, bonferroni_critical(alpha, grid.size()), z));
        }
      }
    }
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = std::string(to_string(e.kind())) + ": " + e.what();
    rec.outcomes.clear();
  }
  return rec;
}

RejectionReport summarize(const ExperimentConfig& cfg, std::vector<ReplicationRecord> log) {
  RejectionReport report;
  report.requested = log.size();
  report.u_raw = cfg.design.u_set;
  report.j_set = cfg.design.j_set;
  for (const auto& rec : log) {
    if (!rec.ok) ++report.failures;
  }
  const std::size_t good = report.requested - report.failures;
  for (auto m : cfg.methods) {
    std::size_t point = 0;
    std::size_t uniform = 0;
    for (const auto& rec : log) {
      if (!rec.ok) continue;
      for (const auto& o : rec.outcomes) {
        if (o.method != m) continue;
        point += o.pointwise_reject.front() ? 1 : 0;
        uniform += o.uniform_reject ? 1 : 0;
      }
    }
    for (auto [scope, count] : {std::pair<const char*, std::size_t>{"pointwise", point},
                                std::pair<const char*, std::size_t>{"uniform", uniform}}) {
      ReportRow row;
      row.method = m;
      row.scope = scope;
      row.reps = good;
      row.frequency = good > 0 ? static_cast<double>(count) / static_cast<double>(good) : 0.0;
      row.mc_se = good > 0 ? std::sqrt(row.frequency * (1.0 - row.frequency) / static_cast<double>(good))
                           : 0.0;
      report.rows.push_back(row);
    }
  }
  report.log = std::move(log);
  return report;
}

RejectionReport run_rejection_experiment(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) fail(ErrorKind::InvalidConfiguration, "reps must be >= 1");
  if (cfg.methods.empty()) fail(ErrorKind::InvalidConfiguration, "no methods requested");
  cfg.design.validate();
  cfg.bootstrap.validate();
  std::vector<ReplicationRecord> log(cfg.reps);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) { log[r] = run_replication(cfg, r); });
  RejectionReport report = summarize(cfg, std::move(log));
  if (static_cast<double>(report.failures) > kMaxFailureShare * static_cast<double>(cfg.reps)) {
    fail(ErrorKind::NumericalFailure, std::to_string(report.failures) + " of " +
                                          std::to_string(cfg.reps) +
                                          " replications failed (limit 5%)");
  }
  return report;
}

void write_report_csv(std::ostream& out, const RejectionReport& report) {
  out << "method,scope,frequency,reps,mc_se,failures\n";
  for (const auto& r : report.rows) {
    out << to_string(r.method) << ',' << r.scope << ',' << format_double(r.frequency) << ','
        << r.reps << ',' << format_double(r.mc_se) << ',' << report.failures << '\n';
  }
}

void write_report_json(std::ostream& out, const RejectionReport& report,
                       const ExperimentConfig& cfg) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["requested"] = report.requested;
  j["failures"] = report.failures;
  j["u_raw"] = report.u_raw;
  j["j_set"] = report.j_set;
  j["bootstrap_b"] = cfg.bootstrap.b;
  j["alpha"] = cfg.bootstrap.alpha;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"method", to_string(r.method)},
                    {"scope", r.scope},
                    {"frequency", r.frequency},
                    {"reps", r.reps},
                    {"mc_se", r.mc_se}});
  }
  j["report"] = std::move(rows);
  ordered_json reps = ordered_json::array();
  for (const auto& rec : report.log) {
    ordered_json e{{"replication", rec.index}, {"ok", rec.ok}};
    if (!rec.ok) {
      e["error"] = rec.error;
    } else {
      e["truth"] = rec.truth;
      ordered_json outcomes = ordered_json::array();
      for (const auto& o : rec.outcomes) {
        outcomes.push_back({{"method", to_string(o.method)},
                            {"uniform_reject", o.uniform_reject},
                            {"pointwise_reject", o.pointwise_reject},
                            {"critical", o.critical},
                            {"theta_check", o.theta_check},
                            {"sigma_hat", o.sigma_hat}});
      }
      e["outcomes"] = std::move(outcomes);
    }
    reps.push_back(std::move(e));
  }
  j["replications"] = std::move(reps);
  out << j.dump(1) << '\n';
}

}  // namespace dreg
