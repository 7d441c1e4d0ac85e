#ifndef LSSGLD_EXPERIMENTS_HPP_
#define LSSGLD_EXPERIMENTS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lssgld {

struct RunOptions {
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed_override;  // replaces the config seed list
  unsigned threads = 0;                        // 0 = hardware concurrency
};

struct ExperimentResult {
  std::string experiment;
  std::vector<std::string> files_written;  // paths relative to output_dir
};

// Validates an experiment config document. Returns the list of problems;
// empty means the config is runnable.
std::vector<std::string> validate_config_file(const std::string& path);
std::vector<std::string> validate_config_text(const std::string& text);

// Runs the experiment described by the config file and writes its CSV
// artifacts plus a summary.json into options.output_dir. Deterministic:
// identical config + seeds yield byte-identical files.
ExperimentResult run_experiment_file(const std::string& path, const RunOptions& options);

// Reference table of spectral averages over the (sigma, d) grid of the
// bundled defaults. Standalone because it needs no config.
void write_gamma_table_csv(const std::string& path);

// Paper-style 2D smoothing strengths halve when expressed in the uniform
// circulant convention (the d = 2 circulant aliases both off-diagonals).
inline double circulant_sigma_from_paper_2d(double sigma_paper) {
  return 0.5 * sigma_paper;
}

// Step-size growth factor admitted by smoothing.
double step_multiplier(double sigma_paper);

}  // namespace lssgld

#endif  // LSSGLD_EXPERIMENTS_HPP_
