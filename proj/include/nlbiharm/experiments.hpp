#pragma once

// Experiment driver for horizon sweeps and penalty-strength sweeps. Each
// run assembles with xi = delta / c, solves, computes the error metrics and
// appends one CSV row; a delta sweep additionally fits the log-log
// convergence slope of the interior RMSE.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "nlbiharm/assembly.hpp"
#include "nlbiharm/errors.hpp"
#include "nlbiharm/metrics.hpp"
#include "nlbiharm/problems.hpp"
#include "nlbiharm/solve.hpp"

namespace nlbiharm {

enum class Study { delta_sweep, c_sweep };

struct ExperimentConfig {
  int dim = 1;
  int n_cells = 20;
  std::vector<double> deltas;
  double c = 1000.0;              ///< penalty strength for delta sweeps
  std::vector<double> c_values;   ///< penalty strengths for c sweeps
  std::string problem = "poly10";
  Study study = Study::delta_sweep;
  std::string output_path;
  std::string dump_path;  ///< optional system dump
  int reference_n = 0;    ///< optional finer-mesh comparison
};

struct ErrorReport {
  int dim = 1;
  int n_cells = 0;
  double delta = 0.0;
  double c = 0.0;
  std::string problem;
  double rmse = 0.0;
  double bd_error = 0.0;
  double bd_dn_error = 0.0;
  /// RMS difference against the reference-mesh solution on shared nodes;
  /// NaN when no reference run was requested.
  double reference_rmse = std::numeric_limits<double>::quiet_NaN();
};

struct StudyResult {
  std::vector<ErrorReport> runs;
  /// Fitted log-log slope of rmse against delta; NaN unless a delta sweep
  /// with at least two horizons ran.
  double slope = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline void validate_config(const ExperimentConfig& config,
                            const ManufacturedProblem& problem) {
  if (config.dim != 1 && config.dim != 2) {
    throw std::invalid_argument("config: dim must be 1 or 2");
  }
  if (config.n_cells < 1) {
    throw std::invalid_argument("config: n-cells must be positive");
  }
  if (config.deltas.empty()) {
    throw std::invalid_argument("config: deltas must be nonempty");
  }
  for (double d : config.deltas) {
    if (!(d > 0.0)) {
      throw std::invalid_argument("config: deltas must be positive");
    }
  }
  if (config.study == Study::delta_sweep) {
    if (!(config.c > 0.0)) {
      throw std::invalid_argument("config: c must be positive");
    }
  } else {
    if (config.c_values.empty()) {
      throw std::invalid_argument("config: c-values must be nonempty");
    }
    for (double c : config.c_values) {
      if (!(c > 0.0)) {
        throw std::invalid_argument("config: c-values must be positive");
      }
    }
  }
  if (problem.dim != config.dim) {
    throw std::invalid_argument("config: problem '" + problem.name +
                                "' has dimension " +
                                std::to_string(problem.dim));
  }
  if (config.reference_n < 0 ||
      (config.reference_n > 0 && config.reference_n <= config.n_cells)) {
    throw std::invalid_argument("config: reference-n must exceed n-cells");
  }
}

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// RMS difference of two solutions on the nodes their meshes share.
inline double shared_node_rmse(const TensorMesh& coarse,
                               const Eigen::VectorXd& u_coarse,
                               const TensorMesh& fine,
                               const Eigen::VectorXd& u_fine) {
  const int nc = coarse.n_cells();
  const int nf = fine.n_cells();
  std::vector<int> shared;  // coarse 1D node -> fine 1D node
  std::vector<int> coarse_idx;
  for (int j = 0; j <= 3 * nc; ++j) {
    if ((j * nf) % nc == 0) {
      coarse_idx.push_back(j);
      shared.push_back(j * nf / nc);
    }
  }
  double acc = 0.0;
  int count = 0;
  if (coarse.dim() == 1) {
    for (std::size_t k = 0; k < shared.size(); ++k) {
      const double e = u_coarse[coarse_idx[k]] - u_fine[shared[k]];
      acc += e * e;
      ++count;
    }
  } else {
    for (std::size_t k1 = 0; k1 < shared.size(); ++k1) {
      for (std::size_t k2 = 0; k2 < shared.size(); ++k2) {
        const double e =
            u_coarse[coarse.linearize({coarse_idx[k1], coarse_idx[k2]})] -
            u_fine[fine.linearize({shared[k1], shared[k2]})];
        acc += e * e;
        ++count;
      }
    }
  }
  return std::sqrt(acc / count);
}

}  // namespace detail

/// Run every (delta, c) combination of the study in config order, append
/// CSV rows to config.output_path and return the per-run reports.
inline StudyResult run_study(const ExperimentConfig& config) {
  const auto problem = find_builtin(config.problem);
  if (!problem) {
    throw std::invalid_argument("config: unknown problem '" + config.problem +
                                "'");
  }
  detail::validate_config(config, *problem);

  std::ofstream csv(config.output_path);
  if (!csv) {
    throw IoError("run_study: cannot open output file " + config.output_path);
  }
  csv << "dim,N,delta,c,problem,rmse,bd_error,bd_dn_error\n";

  std::vector<std::pair<double, double>> runs;  // (delta, c)
  if (config.study == Study::delta_sweep) {
    for (double d : config.deltas) runs.emplace_back(d, config.c);
  } else {
    for (double d : config.deltas) {
      for (double c : config.c_values) runs.emplace_back(d, c);
    }
  }

  const TensorMesh mesh(config.n_cells, config.dim);
  StudyResult result;
  int run_index = 0;
  for (const auto& [delta, c] : runs) {
    const double xi = delta / c;
    const auto tuple = [&] {
      return " (dim=" + std::to_string(config.dim) +
             " N=" + std::to_string(config.n_cells) +
             " delta=" + detail::format_g17(delta) +
             " c=" + detail::format_g17(c) + " problem=" + config.problem +
             ")";
    };
    const KernelParams kernel(delta, config.dim);
    SolutionField solution;
    LinearSystem system;
    try {
      system = assemble_system(mesh, kernel, *problem, xi);
      solution = solve_spd(system);
    } catch (const NotPositiveDefiniteError& e) {
      throw NotPositiveDefiniteError(e.what() + tuple());
    } catch (const AssemblyError& e) {
      throw AssemblyError(e.what() + tuple());
    } catch (const InvalidDataError& e) {
      throw InvalidDataError(e.what() + tuple());
    }
    if (!config.dump_path.empty()) {
      const std::string path =
          runs.size() == 1 ? config.dump_path
                           : config.dump_path + ".run" + std::to_string(run_index);
      dump_system(system, path);
    }
    ErrorReport report;
    report.dim = config.dim;
    report.n_cells = config.n_cells;
    report.delta = delta;
    report.c = c;
    report.problem = config.problem;
    report.rmse = compute_rmse(solution, *problem, mesh);
    std::tie(report.bd_error, report.bd_dn_error) =
        compute_bd_errors(solution, *problem, mesh);

    if (config.reference_n > 0) {
      const TensorMesh fine(config.reference_n, config.dim);
      const KernelParams fine_kernel(delta, config.dim);
      const SolutionField fine_solution =
          solve_spd(assemble_system(fine, fine_kernel, *problem, xi));
      report.reference_rmse = detail::shared_node_rmse(
          mesh, solution.coefficients, fine, fine_solution.coefficients);
    }

    csv << report.dim << ',' << report.n_cells << ','
        << detail::format_g17(report.delta) << ','
        << detail::format_g17(report.c) << ',' << report.problem << ','
        << detail::format_g17(report.rmse) << ','
        << detail::format_g17(report.bd_error) << ','
        << detail::format_g17(report.bd_dn_error) << '\n';
    csv.flush();
    if (!csv) {
      throw IoError("run_study: write failure on " + config.output_path);
    }
    result.runs.push_back(std::move(report));
    ++run_index;
  }

  if (config.study == Study::delta_sweep && result.runs.size() >= 2) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : result.runs) pts.emplace_back(r.delta, r.rmse);
    result.slope = fit_slope(pts);
  }
  return result;
}

}  // namespace nlbiharm
