#ifndef BDT_SAMPLER_HPP
#define BDT_SAMPLER_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bdt/dataset.hpp"
#include "bdt/likelihood.hpp"
#include "bdt/proposals.hpp"
#include "bdt/tree.hpp"

namespace bdt {

enum class Strategy { standard, sweeping };

std::string to_string(Strategy s);

struct SamplerConfig {
  MoveConfig moves;
  Strategy strategy = Strategy::sweeping;
  long burn_in = 50000;
  long post_burn_in = 10000;
  int thin = 7;
  std::uint64_t seed = 1;
  double alpha = 1.0;             // symmetric Dirichlet unless alpha_vector set
  std::vector<double> alpha_vector;
  ChipmanPrior chipman;
  int max_terminals = 0;          // 0 means n - 1
  long check_every = 0;           // full structural re-check cadence, 0 = off

  void validate() const;
  DirichletPrior dirichlet(int classes) const;
};

enum class IterationEvent { none, unavailable, swept };

struct TraceRecord {
  long iteration = 0;
  bool post_phase = false;
  double log_lik = 0.0;  // chain state after the decision
  int terminal_count = 0;
  MoveKind move = MoveKind::birth;
  bool accepted = false;
  IterationEvent event = IterationEvent::none;
};

struct ChainSample {
  DecisionTree tree;  // compacted, frozen
  double log_lik = 0.0;
  long iteration = 0;
};

struct ChainResult {
  std::vector<ChainSample> samples;
  std::vector<TraceRecord> trace;
  double acceptance_burn_in = 0.0;
  double acceptance_post = 0.0;
};

DecisionTree initial_tree(const Dataset& ds);

/// Runs one reversible-jump chain from the single-terminal tree. Proposals
/// whose partitions fall below p_min are handled per the strategy: the
/// standard strategy discards them (the iteration completes as a rejection),
/// the sweeping strategy additionally converts a change move that starves
/// exactly one terminal into a death-style move by deleting that terminal.
/// Fully reproducible given the seed.
ChainResult run_chain(const Dataset& ds, const SamplerConfig& cfg);

void write_trace_csv(const std::vector<TraceRecord>& trace, std::ostream& os);
void write_chain(const std::vector<ChainSample>& samples, std::ostream& os);
std::vector<ChainSample> read_chain(std::istream& is);

/// Per-fold seeds are derived from the master seed with a splitmix step so
/// concurrent fold workers stay reproducible.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace bdt

#endif  // BDT_SAMPLER_HPP
