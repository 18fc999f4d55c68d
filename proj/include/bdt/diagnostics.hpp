#ifndef BDT_DIAGNOSTICS_HPP
#define BDT_DIAGNOSTICS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "bdt/sampler.hpp"

namespace bdt {

enum class EmulatorMode { standard, sweeping };

/// State-free Monte Carlo of the move-frequency distortion caused by
/// unavailable proposals. Each trial draws kinds until one completes:
/// unavailable births are redrawn in both modes; unavailable changes are
/// redrawn in standard mode, while in sweeping mode a fraction
/// (1 - case3_fraction) of them completes as a death and the rest are
/// redrawn. p_birth_unavailable / p_change_unavailable are joint masses,
/// i.e. the per-draw probability of drawing that kind and finding it
/// unavailable.
struct EmulatorConfig {
  double p_birth = 0.2;
  double p_death = 0.2;
  double p_change = 0.6;
  double p_birth_unavailable = 0.0;
  double p_change_unavailable = 0.0;
  double case3_fraction = 0.0;
  EmulatorMode mode = EmulatorMode::standard;
  long long trials = 10000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct MoveFrequencies {
  double birth = 0.0;
  double death = 0.0;
  double change = 0.0;
  long long trials = 0;
};

MoveFrequencies emulate_moves(const EmulatorConfig& cfg);

/// Closed-form completion frequencies for the same process.
MoveFrequencies emulator_expected(const EmulatorConfig& cfg);

void write_frequencies_csv(const EmulatorConfig& cfg,
                           const MoveFrequencies& realized, std::ostream& os);

struct PhaseSummary {
  std::vector<long> iterations;
  std::vector<double> log_lik;
  std::vector<int> terminal_counts;
  std::map<int, double> size_histogram;  // terminal count -> mass, sums to 1
  double acceptance = 0.0;
};

struct TraceSummary {
  PhaseSummary burn_in;
  PhaseSummary post;
};

TraceSummary summarize_trace(const std::vector<TraceRecord>& trace);

void write_series_csv(const TraceSummary& summary, std::ostream& os);
void write_histogram_csv(const TraceSummary& summary, std::ostream& os);

}  // namespace bdt

#endif  // BDT_DIAGNOSTICS_HPP
