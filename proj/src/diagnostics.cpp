#include "bdt/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

namespace bdt {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void EmulatorConfig::validate() const {
  if (p_birth < 0 || p_death < 0 || p_change < 0)
    throw std::invalid_argument("move probabilities must be >= 0");
  if (std::abs(p_birth + p_death + p_change - 1.0) > 1e-12)
    throw std::invalid_argument("move probabilities must sum to 1");
  if (p_birth_unavailable < 0 || p_birth_unavailable > p_birth)
    throw std::invalid_argument("p_birth_unavailable must lie in [0, p_birth]");
  if (p_change_unavailable < 0 || p_change_unavailable > p_change)
    throw std::invalid_argument("p_change_unavailable must lie in [0, p_change]");
  if (case3_fraction < 0 || case3_fraction > 1)
    throw std::invalid_argument("case3_fraction must lie in [0, 1]");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
}

MoveFrequencies emulate_moves(const EmulatorConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Conditional probability that a drawn birth/change turns out unavailable.
  const double birth_unavail =
      cfg.p_birth > 0 ? cfg.p_birth_unavailable / cfg.p_birth : 0.0;
  const double change_unavail =
      cfg.p_change > 0 ? cfg.p_change_unavailable / cfg.p_change : 0.0;

  long long births = 0, deaths = 0, changes = 0;
  for (long long t = 0; t < cfg.trials; ++t) {
    for (;;) {
      const double u = unit(rng);
      if (u < cfg.p_birth) {
        if (unit(rng) < birth_unavail) continue;  // resample
        ++births;
        break;
      }
      if (u < cfg.p_birth + cfg.p_death) {
        ++deaths;
        break;
      }
      if (unit(rng) < change_unavail) {
        if (cfg.mode == EmulatorMode::standard) continue;  // resample
        if (unit(rng) < cfg.case3_fraction) continue;      // resample
        ++deaths;  // one starved partition: the move lands as a death
        break;
      }
      ++changes;
      break;
    }
  }
  MoveFrequencies out;
  out.trials = cfg.trials;
  out.birth = static_cast<double>(births) / cfg.trials;
  out.death = static_cast<double>(deaths) / cfg.trials;
  out.change = static_cast<double>(changes) / cfg.trials;
  return out;
}

MoveFrequencies emulator_expected(const EmulatorConfig& cfg) {
  cfg.validate();
  MoveFrequencies out;
  out.trials = cfg.trials;
  if (cfg.mode == EmulatorMode::standard) {
    const double z = 1.0 - cfg.p_birth_unavailable - cfg.p_change_unavailable;
    out.birth = (cfg.p_birth - cfg.p_birth_unavailable) / z;
    out.death = cfg.p_death / z;
    out.change = (cfg.p_change - cfg.p_change_unavailable) / z;
  } else {
    const double z =
        1.0 - cfg.p_birth_unavailable - cfg.p_change_unavailable * cfg.case3_fraction;
    out.birth = (cfg.p_birth - cfg.p_birth_unavailable) / z;
    out.death = (cfg.p_death + cfg.p_change_unavailable * (1.0 - cfg.case3_fraction)) / z;
    out.change = (cfg.p_change - cfg.p_change_unavailable) / z;
  }
  return out;
}

void write_frequencies_csv(const EmulatorConfig& cfg, const MoveFrequencies& realized,
                           std::ostream& os) {
  os << "move,nominal,realized\n";
  os << "birth," << format_double(cfg.p_birth) << "," << format_double(realized.birth) << "\n";
  os << "death," << format_double(cfg.p_death) << "," << format_double(realized.death) << "\n";
  os << "change," << format_double(cfg.p_change) << "," << format_double(realized.change)
     << "\n";
}

TraceSummary summarize_trace(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) throw std::invalid_argument("summarize_trace: empty trace");
  TraceSummary out;
  long accepted[2] = {0, 0};
  long counted[2] = {0, 0};
  for (const TraceRecord& r : trace) {
    PhaseSummary& phase = r.post_phase ? out.post : out.burn_in;
    phase.iterations.push_back(r.iteration);
    phase.log_lik.push_back(r.log_lik);
    phase.terminal_counts.push_back(r.terminal_count);
    phase.size_histogram[r.terminal_count] += 1.0;
    ++counted[r.post_phase];
    accepted[r.post_phase] += r.accepted ? 1 : 0;
  }
  for (PhaseSummary* phase : {&out.burn_in, &out.post}) {
    const double total = static_cast<double>(phase->iterations.size());
    if (total > 0)
      for (auto& [size, mass] : phase->size_histogram) mass /= total;
  }
  if (counted[0] > 0) out.burn_in.acceptance = static_cast<double>(accepted[0]) / counted[0];
  if (counted[1] > 0) out.post.acceptance = static_cast<double>(accepted[1]) / counted[1];
  return out;
}

void write_series_csv(const TraceSummary& summary, std::ostream& os) {
  os << "iteration,phase,log_lik,k\n";
  for (const PhaseSummary* phase : {&summary.burn_in, &summary.post}) {
    const char* name = (phase == &summary.burn_in) ? "burnin" : "post";
    for (std::size_t i = 0; i < phase->iterations.size(); ++i)
      os << phase->iterations[i] << "," << name << "," << format_double(phase->log_lik[i])
         << "," << phase->terminal_counts[i] << "\n";
  }
}

void write_histogram_csv(const TraceSummary& summary, std::ostream& os) {
  os << "phase,k,mass\n";
  for (const PhaseSummary* phase : {&summary.burn_in, &summary.post}) {
    const char* name = (phase == &summary.burn_in) ? "burnin" : "post";
    for (const auto& [size, mass] : phase->size_histogram)
      os << name << "," << size << "," << format_double(mass) << "\n";
  }
}

}  // namespace bdt
