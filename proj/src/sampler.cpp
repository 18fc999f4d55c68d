#include "bdt/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bdt {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string event_name(IterationEvent e) {
  switch (e) {
    case IterationEvent::none: return "none";
    case IterationEvent::unavailable: return "unavailable";
    case IterationEvent::swept: return "swept";
  }
  return "?";
}

}  // namespace

std::string to_string(Strategy s) {
  return s == Strategy::standard ? "standard" : "sweeping";
}

void SamplerConfig::validate() const {
  moves.validate();
  if (burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
  if (post_burn_in < 1) throw std::invalid_argument("post_burn_in must be >= 1");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (thin > post_burn_in)
    throw std::invalid_argument("thin exceeds post_burn_in, no samples would be retained");
  if (!alpha_vector.empty()) {
    for (double a : alpha_vector)
      if (!(a > 0.0)) throw std::invalid_argument("alpha entries must be positive");
  } else if (!(alpha > 0.0)) {
    throw std::invalid_argument("alpha must be positive");
  }
  if (chipman.enabled) {
    if (!(chipman.gamma > 0.0) || chipman.gamma > 1.0)
      throw std::invalid_argument("chipman gamma must be in (0, 1]");
    if (chipman.delta < 0.0) throw std::invalid_argument("chipman delta must be >= 0");
  }
  if (max_terminals < 0) throw std::invalid_argument("max_terminals must be >= 0");
}

DirichletPrior SamplerConfig::dirichlet(int classes) const {
  if (!alpha_vector.empty()) {
    if (static_cast<int>(alpha_vector.size()) != classes)
      throw std::invalid_argument("alpha vector length must equal the class count");
    DirichletPrior p;
    p.alpha = alpha_vector;
    p.validate();
    return p;
  }
  return DirichletPrior::symmetric(classes, alpha);
}

DecisionTree initial_tree(const Dataset& ds) { return DecisionTree::single_terminal(ds); }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ChainResult run_chain(const Dataset& ds, const SamplerConfig& cfg) {
  cfg.validate();
  if (cfg.moves.p_min >= ds.n())
    throw std::invalid_argument("p_min must be smaller than the training size");
  if (!(cfg.moves.p_birth > 0.0))
    throw std::invalid_argument("p_birth must be positive, the chain starts at one terminal");

  const DirichletPrior prior = cfg.dirichlet(ds.class_count());
  const int max_terminals =
      cfg.max_terminals > 0 ? std::min(cfg.max_terminals, ds.n() - 1) : ds.n() - 1;
  const long total_iters = cfg.burn_in + cfg.post_burn_in;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  DecisionTree tree = initial_tree(ds);
  double cur_ll = log_marginal_likelihood(tree, prior);

  ChainResult result;
  result.trace.reserve(total_iters);
  result.samples.reserve(cfg.post_burn_in / cfg.thin + 1);
  long accepted[2] = {0, 0};
  long counted[2] = {0, 0};

  for (long it = 0; it < total_iters; ++it) {
    const bool post = it >= cfg.burn_in;
    ++counted[post];
    const int k = tree.terminal_count();
    const MoveKind kind = draw_move_kind(cfg.moves, rng);

    TraceRecord rec;
    rec.iteration = it;
    rec.post_phase = post;
    rec.move = kind;

    // Moves that cannot be formed in the current state complete the
    // iteration as rejections; redrawing them instead would tilt the
    // effective proposal distribution away from the ratio formulas.
    const bool applicable =
        !((kind == MoveKind::birth && k >= max_terminals) ||
          (kind != MoveKind::birth && k == 1) ||
          (kind == MoveKind::change_split && ds.m() < 2));

    bool accepted_now = false;
    if (applicable) {
      DecisionTree proposal = tree.clone_compact();
      const int prunable_before = static_cast<int>(proposal.prunable_ids().size());

      MoveProposal mp;
      switch (kind) {
        case MoveKind::birth:
          mp = propose_birth(proposal, ds, cfg.moves, cfg.chipman, rng);
          proposal.split_terminal(ds, mp.target, mp.var, mp.rule);
          break;
        case MoveKind::death:
          mp = propose_death(proposal, cfg.moves, cfg.chipman, rng);
          proposal.prune_split(mp.target);
          break;
        case MoveKind::change_split:
          mp = propose_change_split(proposal, ds, cfg.moves, rng);
          proposal.change_split(ds, mp.target, mp.var, mp.rule);
          break;
        case MoveKind::change_rule:
          mp = propose_change_rule(proposal, ds, cfg.moves, rng);
          proposal.change_split(ds, mp.target, mp.var, mp.rule);
          break;
      }

      double log_ratio = mp.log_ratio;
      bool eligible = true;
      if (kind != MoveKind::death) {
        const std::vector<int> deficient = proposal.deficient_terminals(cfg.moves.p_min);
        if (!deficient.empty()) {
          if (cfg.strategy == Strategy::standard || kind == MoveKind::birth ||
              deficient.size() >= 2) {
            eligible = false;
            rec.event = IterationEvent::unavailable;
          } else {
            // Sweeping: a change move starved exactly one terminal. Delete
            // it and judge the shortened tree as a death-style transition
            // from the current state.
            const int doomed = deficient.front();
            const int removed_depth = proposal.depth(proposal.node(doomed).parent);
            proposal.remove_terminal(ds, doomed);
            log_ratio = death_log_ratio(k, prunable_before, removed_depth,
                                        cfg.moves, cfg.chipman);
            rec.event = IterationEvent::swept;
          }
        }
      }

      if (eligible) {
        const double prop_ll = log_marginal_likelihood(proposal, prior);
        if (std::log(unit(rng)) < (prop_ll - cur_ll) + log_ratio) {
          tree = std::move(proposal);
          cur_ll = prop_ll;
          accepted_now = true;
        }
      }
    } else {
      rec.event = IterationEvent::unavailable;
    }

    accepted[post] += accepted_now ? 1 : 0;
    rec.accepted = accepted_now;
    rec.log_lik = cur_ll;
    rec.terminal_count = tree.terminal_count();
    result.trace.push_back(rec);

    if (cfg.check_every > 0 && (it + 1) % cfg.check_every == 0) tree.check_consistency(ds);

    if (post) {
      const long post_index = it - cfg.burn_in + 1;
      if (post_index % cfg.thin == 0) {
        ChainSample s;
        s.tree = tree.clone_compact();
        s.log_lik = cur_ll;
        s.iteration = it;
        result.samples.push_back(std::move(s));
      }
    }
  }

  result.acceptance_burn_in =
      counted[0] > 0 ? static_cast<double>(accepted[0]) / counted[0] : 0.0;
  result.acceptance_post = static_cast<double>(accepted[1]) / counted[1];
  return result;
}

void write_trace_csv(const std::vector<TraceRecord>& trace, std::ostream& os) {
  os << "iteration,phase,log_lik,k,move,accepted,special\n";
  for (const TraceRecord& r : trace) {
    os << r.iteration << "," << (r.post_phase ? "post" : "burnin") << ","
       << format_double(r.log_lik) << "," << r.terminal_count << ","
       << to_string(r.move) << "," << (r.accepted ? 1 : 0) << ","
       << event_name(r.event) << "\n";
  }
}

void write_chain(const std::vector<ChainSample>& samples, std::ostream& os) {
  for (const ChainSample& s : samples) {
    os << "sample iteration=" << s.iteration << " loglik=" << format_double(s.log_lik)
       << "\n";
    os << s.tree.serialize() << "\n";
  }
}

std::vector<ChainSample> read_chain(std::istream& is) {
  std::vector<ChainSample> out;
  std::string line;
  std::string block;
  ChainSample cur;
  bool in_sample = false;
  auto flush = [&] {
    if (!in_sample) return;
    cur.tree = DecisionTree::deserialize(block);
    out.push_back(cur);
    block.clear();
    in_sample = false;
  };
  while (std::getline(is, line)) {
    if (line.rfind("sample ", 0) == 0) {
      flush();
      std::istringstream ls(line);
      std::string tag, it_tok, ll_tok;
      ls >> tag >> it_tok >> ll_tok;
      cur = ChainSample{};
      cur.iteration = std::stol(it_tok.substr(it_tok.find('=') + 1));
      cur.log_lik = std::stod(ll_tok.substr(ll_tok.find('=') + 1));
      in_sample = true;
    } else if (!line.empty()) {
      block += line;
      block += "\n";
    }
  }
  flush();
  return out;
}

}  // namespace bdt
