#pragma once

#include <string>

#include "dreg/bootstrap.hpp"
#include "dreg/errors.hpp"
#include "dreg/montecarlo.hpp"
#include "dreg_cli/config.hpp"

namespace dreg::cli {

/// Bands on user data. Writes bands.csv, series.csv, summary.json and
/// timings.json into cfg.out_dir.
BandTable cmd_fit(const RunConfig& cfg);

/// Monte Carlo rejection experiment. Writes report.csv, report.json and
/// timings.json into cfg.out_dir.
RejectionReport cmd_mc(const RunConfig& cfg);

/// Process exit code for an error kind: 2 validation, 3 numerical, 4 I/O.
int exit_code(ErrorKind kind);

}  // namespace dreg::cli
