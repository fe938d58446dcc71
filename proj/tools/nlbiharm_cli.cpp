// Command-line driver: horizon sweeps and penalty sweeps over the built-in
// manufactured problems, with CSV output suitable for log-log plotting.
//
// Exit codes: 0 success, 2 invalid configuration, 3 solver failure,
// 4 I/O failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nlbiharm/experiments.hpp"

int main(int argc, char** argv) {
  nlbiharm::ExperimentConfig config;
  std::string study = "delta-sweep";

  CLI::App app{"Nonlocal biharmonic energy minimizer: convergence and "
               "penalty studies"};
  app.add_option("--dim", config.dim, "Spatial dimension (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  app.add_option("--n-cells", config.n_cells, "Cells per dimension");
  app.add_option("--deltas", config.deltas,
                 "Comma-separated nonlocal horizons")
      ->delimiter(',');
  app.add_option("--c", config.c, "Penalty strength (xi = delta/c)");
  app.add_option("--c-values", config.c_values,
                 "Comma-separated penalty strengths for a c sweep")
      ->delimiter(',');
  app.add_option("--problem", config.problem,
                 "Manufactured problem (poly10 or xlog)");
  app.add_option("--study", study, "Study type")
      ->check(CLI::IsMember({"delta-sweep", "c-sweep"}));
  app.add_option("--out", config.output_path, "CSV output path")->required();
  app.add_option("--dump-system", config.dump_path,
                 "Optional plain-text dump of the assembled system");
  app.add_option("--reference-n", config.reference_n,
                 "Optional finer mesh to compare against on shared nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  config.study = (study == "c-sweep") ? nlbiharm::Study::c_sweep
                                      : nlbiharm::Study::delta_sweep;

  try {
    const nlbiharm::StudyResult result = nlbiharm::run_study(config);
    if (config.study == nlbiharm::Study::delta_sweep) {
      std::printf("slope=%.17g\n", result.slope);
    }
    if (config.reference_n > 0) {
      for (const auto& run : result.runs) {
        std::printf("reference_rmse=%.17g delta=%.17g c=%.17g\n",
                    run.reference_rmse, run.delta, run.c);
      }
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const nlbiharm::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  }
}
