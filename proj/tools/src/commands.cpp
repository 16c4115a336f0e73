#include "dreg_cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dreg/errors.hpp"
#include "dreg/format.hpp"

namespace dreg::cli {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorKind::Io, "cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

ResponseThresholds resolve_thresholds(const Dataset& ds, const ThresholdSpec& spec) {
  const double lo = spec.y_lo ? *spec.y_lo : sample_quantile(ds.y(), spec.q_lo);
  const double hi = spec.y_hi ? *spec.y_hi : sample_quantile(ds.y(), spec.q_hi);
  return ResponseThresholds(lo, hi);
}

IndexGrid resolve_grid(const Dataset& ds, const GridSpec& spec) {
  std::vector<std::size_t> js = spec.j_values;
  if (js.empty()) {
    for (std::size_t j = 1; j <= ds.p_target(); ++j) js.push_back(j);
  }
  IndexGrid grid = spec.u_values.empty() ? IndexGrid::uniform(spec.u_min, spec.u_max, spec.u_count, js)
                                         : IndexGrid(spec.u_values, js);
  grid.check_bounds(ds.p_target());
  return grid;
}

std::string bands_csv(const BandTable& table, const Dataset& ds) {
  std::ostringstream out;
  out << "u,j,name,theta_check,sigma_hat,lo_point,hi_point,lo_simul,hi_simul,flags\n";
  for (const auto& r : table.rows) {
    out << format_double(r.cell.u) << ',' << r.cell.j << ',' << ds.d_names()[r.cell.j - 1] << ','
        << format_double(r.cell.theta_check) << ',' << format_double(r.cell.sigma_hat) << ','
        << format_double(r.lo_point) << ',' << format_double(r.hi_point) << ','
        << format_double(r.lo_simul) << ',' << format_double(r.hi_simul) << ','
        << flags_to_string(r.cell.flags) << '\n';
  }
  return out.str();
}

std::string series_csv(const BandTable& table, const Dataset& ds, const IndexGrid& grid,
                       const ResponseThresholds& th) {
  std::ostringstream out;
  out << "j,name,u,threshold,theta_check,lo_point,hi_point,lo_simul,hi_simul\n";
  const std::size_t nj = grid.j_values().size();
  for (std::size_t b = 0; b < nj; ++b) {
    for (std::size_t a = 0; a < grid.u_values().size(); ++a) {
      const auto& r = table.rows[grid.cell(a, b)];
      out << r.cell.j << ',' << ds.d_names()[r.cell.j - 1] << ',' << format_double(r.cell.u) << ','
          << format_double(th.threshold(r.cell.u)) << ',' << format_double(r.cell.theta_check) << ','
          << format_double(r.lo_point) << ',' << format_double(r.hi_point) << ','
          << format_double(r.lo_simul) << ',' << format_double(r.hi_simul) << '\n';
    }
  }
  return out.str();
}

ordered_json cell_diagnostics(const CellEstimate& c) {
  return {{"u", c.u},
          {"j", c.j},
          {"theta_pilot", c.theta_pilot},
          {"j_hat", c.j_hat},
          {"sigma_raw", c.sigma_raw},
          {"sigma_alt", c.sigma_alt},
          {"box", {c.box.lo, c.box.hi}},
          {"pilot_support", c.pilot_support},
          {"gamma_support", c.gamma_support},
          {"flags", flags_to_string(c.flags)}};
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidConfiguration:
      return 2;
    case ErrorKind::DegenerateColumn:
    case ErrorKind::DegenerateDesign:
    case ErrorKind::DegenerateIdentification:
    case ErrorKind::NumericalFailure:
      return 3;
    case ErrorKind::Io:
      return 4;
  }
  return 3;
}

BandTable cmd_fit(const RunConfig& cfg) {
  if (cfg.data_path.empty()) fail(ErrorKind::InvalidConfiguration, "data.path is required for fit");
  if (cfg.roles.response.empty()) fail(ErrorKind::InvalidConfiguration, "data.response is required");
  const auto start = Clock::now();
  std::filesystem::path data(cfg.data_path);
  if (data.is_relative() && !cfg.base_dir.empty()) data = std::filesystem::path(cfg.base_dir) / data;
  const Dataset ds = dataset_from_table(read_csv_file(data.string()), cfg.roles);
  const double t_load = seconds_since(start);
  const ResponseThresholds th = resolve_thresholds(ds, cfg.thresholds);
  const IndexGrid grid = resolve_grid(ds, cfg.grid);
  const BootstrapConfig boot{cfg.bootstrap_b, cfg.alpha, cfg.seed, cfg.threads};
  boot.validate();
  const fs::path out = prepare_out_dir(cfg.out_dir);

  InferenceConfig inf = cfg.inference;
  inf.threads = cfg.threads;
  const auto t0 = Clock::now();
  const ScorePanel panel = build_score_panel(ds, grid, th, inf, cfg.method);
  const double t_panel = seconds_since(t0);
  const auto t1 = Clock::now();
  BandTable table = build_bands(panel, boot);
  const double t_boot = seconds_since(t1);

  write_file(out / "bands.csv", bands_csv(table, ds));
  write_file(out / "series.csv", series_csv(table, ds, grid, th));

  ordered_json summary;
  summary["c_alpha"] = table.c_alpha;
  summary["z_pointwise"] = table.z_pointwise;
  summary["alpha"] = table.alpha;
  summary["b"] = table.b;
  summary["method"] = to_string(cfg.method);
  summary["n"] = ds.n();
  summary["p_target"] = ds.p_target();
  summary["p_controls"] = ds.p_controls();
  summary["thresholds"] = {{"y_lo", th.y_lo}, {"y_hi", th.y_hi}};
  summary["grid"] = {{"u_values", grid.u_values()}, {"j_values", grid.j_values()}};
  ordered_json cells = ordered_json::array();
  std::size_t flagged = 0;
  for (const auto& c : panel.cells) {
    cells.push_back(cell_diagnostics(c));
    if (c.flags != 0) ++flagged;
  }
  summary["diagnostics"] = {{"flagged_cells", flagged}, {"cells", std::move(cells)}};
  summary["config"] = config_to_json(cfg);
  write_file(out / "summary.json", summary.dump(2) + "\n");

  const ordered_json timings{{"load_seconds", t_load},
                             {"panel_seconds", t_panel},
                             {"bootstrap_seconds", t_boot},
                             {"total_seconds", seconds_since(start)},
                             {"threads", cfg.threads}};
  write_file(out / "timings.json", timings.dump(2) + "\n");
  return table;
}

RejectionReport cmd_mc(const RunConfig& cfg) {
  ExperimentConfig ex;
  ex.design = cfg.mc.design;
  ex.design.seed = cfg.seed;
  ex.methods = cfg.mc.methods;
  ex.reps = cfg.mc.reps;
  ex.bootstrap = BootstrapConfig{cfg.bootstrap_b, cfg.alpha, cfg.seed, 1};
  ex.inference = cfg.inference;
  ex.threads = cfg.threads;
  const fs::path out = prepare_out_dir(cfg.out_dir);

  const auto start = Clock::now();
  RejectionReport report = run_rejection_experiment(ex);
  const double elapsed = seconds_since(start);

  std::ostringstream csv;
  write_report_csv(csv, report);
  write_file(out / "report.csv", csv.str());
  std::ostringstream js;
  write_report_json(js, report, ex);
  ordered_json doc = ordered_json::parse(js.str());
  doc["config"] = config_to_json(cfg);
  write_file(out / "report.json", doc.dump(1) + "\n");
  const ordered_json timings{{"total_seconds", elapsed}, {"threads", cfg.threads}};
  write_file(out / "timings.json", timings.dump(2) + "\n");
  return report;
}

}  // namespace dreg::cli
