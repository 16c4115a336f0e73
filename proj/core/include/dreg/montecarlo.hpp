#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dreg/bootstrap.hpp"
#include "dreg/designs.hpp"
#include "dreg/ortho_inference.hpp"

namespace dreg {

enum class McMethod { ProposedOS, ProposedDS, NaiveMB, NaiveBF };

const char* to_string(McMethod m);
McMethod mc_method_from_string(const std::string& name);

struct ExperimentConfig {
  DesignSpec design;
  std::vector<McMethod> methods{McMethod::ProposedOS, McMethod::ProposedDS, McMethod::NaiveMB,
                                McMethod::NaiveBF};
  std::size_t reps = 200;
  /// b and alpha are used; the seed is derived per replication and method.
  BootstrapConfig bootstrap{1000, 0.05, 0, 1};
  InferenceConfig inference{};
  std::size_t threads = 1;
};

/// Outcome of one method on one replication.
struct MethodOutcome {
  McMethod method = McMethod::ProposedOS;
  /// Region rejection with the method's simultaneous critical value.
  bool uniform_reject = false;
  /// Per-cell pointwise rejection, cells in IndexGrid order.
  std::vector<bool> pointwise_reject;
  double critical = 0.0;
  std::vector<double> theta_check;
  std::vector<double> sigma_hat;
};

struct ReplicationRecord {
  std::uint64_t index = 0;
  bool ok = false;
  std::string error;
  std::vector<double> truth;
  std::vector<MethodOutcome> outcomes;
};

struct ReportRow {
  McMethod method = McMethod::ProposedOS;
  /// "pointwise" (first cell of the region) or "uniform" (whole region).
  std::string scope;
  double frequency = 0.0;
  std::size_t reps = 0;
  double mc_se = 0.0;
};

struct RejectionReport {
  std::vector<ReportRow> rows;
  std::size_t requested = 0;
  std::size_t failures = 0;
  std::vector<double> u_raw;
  std::vector<std::size_t> j_set;
  std::vector<ReplicationRecord> log;

  const ReportRow& row(McMethod method, const std::string& scope) const;
};

/// Runs one replication: simulate, fit every method on the region, and
/// record rejection indicators against the true θ_u.
ReplicationRecord run_replication(const ExperimentConfig& cfg, std::uint64_t replication);

/// Aggregates frequencies and MC standard errors from a replication log.
RejectionReport summarize(const ExperimentConfig& cfg, std::vector<ReplicationRecord> log);

/// R replications in parallel; failures are excluded and counted, and more
/// than 5% failures raise numerical-failure.
RejectionReport run_rejection_experiment(const ExperimentConfig& cfg);

void write_report_csv(std::ostream& out, const RejectionReport& report);
void write_report_json(std::ostream& out, const RejectionReport& report,
                       const ExperimentConfig& cfg);

}  // namespace dreg
