#include "toposym/protocols.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace toposym {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Decided: return "decided";
    case RunStatus::Timeout: return "timeout";
    case RunStatus::StuckAtGcd: return "stuck_at_gcd";
  }
  return "unknown";
}

nlohmann::json trace_to_json(const TraceRecord& r) {
  return {{"round", r.round}, {"party", r.party}, {"class", r.class_id},
          {"state", r.state}, {"output", r.output}};
}

bool audit_name_independence(const ProtocolRun& run) {
  std::map<int, int> class_output;
  for (size_t p = 0; p < run.outputs.size(); ++p) {
    auto [it, fresh] = class_output.try_emplace(run.final_classes[p], run.outputs[p]);
    if (!fresh && it->second != run.outputs[p]) return false;
  }
  return true;
}

namespace {

// class ids ordered by smallest member, matching refine()'s convention
std::vector<int> relabel_ids(const std::vector<int>& raw) {
  std::map<int, int> seen;
  std::vector<int> out(raw.size());
  for (size_t p = 0; p < raw.size(); ++p) {
    auto [it, fresh] = seen.try_emplace(raw[p], static_cast<int>(seen.size()));
    out[p] = it->second;
  }
  return out;
}

std::vector<int> string_class_ids(const std::vector<std::string>& strings, int prefix_len) {
  std::map<std::string, int> ids;
  std::vector<int> raw(strings.size());
  for (size_t p = 0; p < strings.size(); ++p) {
    auto [it, fresh] =
        ids.try_emplace(strings[p].substr(0, prefix_len), static_cast<int>(ids.size()));
    raw[p] = it->second;
  }
  return relabel_ids(raw);
}

// ==== Synchronous message-passing engine ====

enum class Flag { None = 0, Request, Ack, Done };

// Lockstep rounds over fixed ports: every round each source emits one
// bit, parties implicitly exchange full information, and protocol
// messages ride along as per-edge flags. Knowledge classes are refined
// round by round from (previous class, fresh bit, per-port sender class
// and flag), so traces can expose each party's class.
class MpEngine {
 public:
  MpEngine(const RandomnessConfiguration& alpha, const PortAssignment& ports, uint64_t seed)
      : alpha_(alpha), ports_(ports), streams_(alpha.k(), seed), strings_(alpha.n()),
        cursor_(alpha.n(), 0), class_ids_(alpha.n(), 0) {
    if (ports.n() != alpha.n()) throw InvalidConfig("engine: port table size mismatch");
  }

  int n() const { return alpha_.n(); }
  int round() const { return round_; }
  const std::vector<std::string>& strings() const { return strings_; }
  const std::vector<int>& class_ids() const { return class_ids_; }
  const PortAssignment& ports() const { return ports_; }

  void begin_round() {
    ++round_;
    for (int p = 0; p < n(); ++p)
      strings_[p].push_back(static_cast<char>('0' + streams_.bit(alpha_.source_of(p), round_)));
  }

  void stage_flag(int sender, int receiver, Flag f) { staged_[{sender, receiver}] = f; }

  void stage_broadcast(int sender, Flag f) {
    for (int q = 0; q < n(); ++q)
      if (q != sender) stage_flag(sender, q, f);
  }

  void end_round() {
    std::map<std::tuple<int, int, std::vector<std::pair<int, int>>>, int> groups;
    std::vector<int> raw(n());
    for (int p = 0; p < n(); ++p) {
      std::vector<std::pair<int, int>> seen;
      seen.reserve(n() - 1);
      for (int j = 1; j < n(); ++j) {
        int sender = ports_.target(p, j);
        auto it = staged_.find({sender, p});
        int flag = it == staged_.end() ? 0 : static_cast<int>(it->second);
        seen.emplace_back(class_ids_[sender], flag);
      }
      int bit = strings_[p][round_ - 1] - '0';
      auto [it, fresh] = groups.try_emplace({class_ids_[p], bit, std::move(seen)},
                                            static_cast<int>(groups.size()));
      raw[p] = it->second;
    }
    class_ids_ = relabel_ids(raw);
    staged_.clear();
  }

  int bits_available(int p) const { return round_ - cursor_[p]; }

  // next `count` unconsumed own bits as a big-endian integer
  int consume(int p, int count) {
    int v = 0;
    for (int i = 0; i < count; ++i) v = v << 1 | (strings_[p][cursor_[p] + i] - '0');
    cursor_[p] += count;
    return v;
  }

  // uniform value in [0, d) by rejection, or -1 when bits ran out
  int try_pick(int p, int d) {
    if (d <= 1) return 0;
    int b = 0;
    while ((1 << b) < d) ++b;
    while (bits_available(p) >= b) {
      int v = consume(p, b);
      if (v < d) return v;
    }
    return -1;
  }

 private:
  RandomnessConfiguration alpha_;
  PortAssignment ports_;
  SourceStreams streams_;
  int round_ = 0;
  std::vector<std::string> strings_;
  std::vector<int> cursor_;
  std::vector<int> class_ids_;
  std::map<std::pair<int, int>, Flag> staged_;
};

// ==== Matching driver ====

// One CreateMatching execution between two disjoint sets. Iteration =
// request round, ack round, done round; request rounds stall while the
// pickers still gather bits.
class MatchingDriver {
 public:
  MatchingDriver(std::vector<int> v1, std::vector<int> v2)
      : v1_(std::move(v1)), v2_(std::move(v2)),
        unmatched_v1_(v1_.begin(), v1_.end()), active_v2_(v2_.begin(), v2_.end()) {}

  const std::vector<int>& v1() const { return v1_; }
  const std::vector<int>& v2() const { return v2_; }
  const std::vector<std::pair<int, int>>& matching() const { return matching_; }
  const std::vector<int>& matching_sizes() const { return matching_sizes_; }
  int iterations() const { return iterations_; }
  bool complete() const { return unmatched_v1_.empty(); }
  bool is_unmatched_v1(int p) const { return unmatched_v1_.count(p) > 0; }
  bool is_active_v2(int p) const { return active_v2_.count(p) > 0; }

  const char* phase_name() const {
    switch (phase_) {
      case Phase::Request: return "request";
      case Phase::Ack: return "ack";
      case Phase::Done: return "done";
    }
    return "?";
  }

  // one round of matching logic; call between begin_round and end_round
  void step(MpEngine& eng) {
    switch (phase_) {
      case Phase::Request: {
        int d = static_cast<int>(active_v2_.size());
        std::map<int, std::vector<int>> requests;
        bool committed = true;
        for (int u : unmatched_v1_) {
          int v = eng.try_pick(u, d);
          if (v < 0) {
            committed = false;  // pickers share one stream; all stall together
            continue;
          }
          // v-th active v2 neighbour in u's own port order
          int target = -1, idx = 0;
          for (int j = 1; j < eng.n() && target < 0; ++j) {
            int w = eng.ports().target(u, j);
            if (active_v2_.count(w) && idx++ == v) target = w;
          }
          requests[target].push_back(u);
        }
        if (!committed) return;  // gather more bits, plain exchange round
        for (auto& [w, senders] : requests) {
          for (int u : senders) eng.stage_flag(u, w, Flag::Request);
        }
        requests_ = std::move(requests);
        phase_ = Phase::Ack;
        return;
      }
      case Phase::Ack: {
        for (const auto& [w, senders] : requests_) {
          int best = -1, best_port = 0;
          for (int u : senders) {
            int port = eng.ports().arrival_port(w, u);
            if (best < 0 || port < best_port) best = u, best_port = port;
          }
          eng.stage_flag(w, best, Flag::Ack);
          staged_.emplace_back(best, w);
        }
        requests_.clear();
        phase_ = Phase::Done;
        return;
      }
      case Phase::Done: {
        for (auto [u, w] : staged_) {
          matching_.emplace_back(u, w);
          unmatched_v1_.erase(u);
          active_v2_.erase(w);
          eng.stage_broadcast(u, Flag::Done);
          eng.stage_broadcast(w, Flag::Done);
        }
        staged_.clear();
        ++iterations_;
        matching_sizes_.push_back(static_cast<int>(matching_.size()));
        phase_ = Phase::Request;
        return;
      }
    }
  }

 private:
  enum class Phase { Request, Ack, Done };

  std::vector<int> v1_, v2_;
  std::set<int> unmatched_v1_, active_v2_;
  std::map<int, std::vector<int>> requests_;
  std::vector<std::pair<int, int>> staged_;
  std::vector<std::pair<int, int>> matching_;
  std::vector<int> matching_sizes_;
  int iterations_ = 0;
  Phase phase_ = Phase::Request;
};

}  // namespace

// ==== Blackboard leader election ====

ProtocolRun run_blackboard_le(const RandomnessConfiguration& alpha, uint64_t seed,
                              int max_rounds, bool record_trace) {
  int n = alpha.n();
  ProtocolRun run;
  run.outputs.assign(n, -1);
  SourceStreams streams(alpha.k(), seed);
  std::vector<std::string> strings(n);

  auto record = [&](int round, const std::vector<int>& ids, auto state_of) {
    if (!record_trace) return;
    for (int p = 0; p < n; ++p)
      run.trace.push_back({round, p, ids[p], state_of(p), run.outputs[p]});
  };

  for (int r = 1; r <= max_rounds; ++r) {
    // decide on the classes everybody learned last round
    std::vector<int> known = string_class_ids(strings, r - 1);
    std::vector<int> count(n, 0);
    for (int p = 0; p < n; ++p) ++count[known[p]];
    int leader = -1;
    for (int p = 0; p < n; ++p) {
      if (count[known[p]] != 1) continue;
      if (leader < 0 || strings[p].compare(0, r - 1, strings[leader], 0, r - 1) < 0)
        leader = p;
    }
    if (leader >= 0) {
      run.status = RunStatus::Decided;
      run.leader = leader;
      run.rounds_used = r;
      run.decision_basis_round = r - 1;
      for (int p = 0; p < n; ++p) run.outputs[p] = p == leader ? 1 : 0;
      run.final_classes = known;
      record(r, known, [&](int p) { return p == leader ? "leader" : "follower"; });
      return run;
    }
    // exchange round: one fresh bit per source, full histories posted
    for (int p = 0; p < n; ++p)
      strings[p].push_back(static_cast<char>('0' + streams.bit(alpha.source_of(p), r)));
    run.final_classes = string_class_ids(strings, r);
    record(r, run.final_classes, [](int) { return "exchange"; });
  }
  run.status = RunStatus::Timeout;
  run.rounds_used = max_rounds;
  if (run.final_classes.empty()) run.final_classes.assign(n, 0);
  return run;
}

// ==== CreateMatching ====

MatchingResult run_create_matching(const RandomnessConfiguration& alpha,
                                   const PortAssignment& ports, std::vector<int> v1,
                                   std::vector<int> v2, uint64_t seed, int max_rounds,
                                   bool record_trace) {
  int n = alpha.n();
  std::sort(v1.begin(), v1.end());
  std::sort(v2.begin(), v2.end());
  if (v1.empty() || v2.empty()) throw InvalidConfig("matching: empty side");
  for (int p : v1)
    if (std::binary_search(v2.begin(), v2.end(), p))
      throw InvalidConfig("matching: sides not disjoint");
  for (int p : v1)
    if (p < 0 || p >= n) throw InvalidConfig("matching: party out of range");
  for (int p : v2)
    if (p < 0 || p >= n) throw InvalidConfig("matching: party out of range");
  if (v1.size() > v2.size()) std::swap(v1, v2);

  MpEngine eng(alpha, ports, seed);
  MatchingDriver driver(v1, v2);
  MatchingResult res;
  res.v1 = v1;
  res.v2 = v2;

  for (int r = 1; r <= max_rounds && !driver.complete(); ++r) {
    eng.begin_round();
    driver.step(eng);
    eng.end_round();
    res.rounds_used = r;
    if (record_trace) {
      for (int p = 0; p < n; ++p) {
        const char* state = driver.is_unmatched_v1(p) ? "request"
                            : driver.is_active_v2(p)  ? "listen"
                            : std::binary_search(v1.begin(), v1.end(), p) ||
                                    std::binary_search(v2.begin(), v2.end(), p)
                                ? "matched"
                                : "relay";
        res.trace.push_back({r, p, eng.class_ids()[p], state, -1});
      }
    }
  }
  res.timeout = !driver.complete();
  res.matching = driver.matching();
  res.matching_sizes = driver.matching_sizes();
  res.iterations = driver.iterations();
  res.matched.assign(n, false);
  for (auto [u, w] : res.matching) res.matched[u] = res.matched[w] = true;
  return res;
}

// ==== GCD leader election ====

namespace {

// active parties grouped by equal prefix, groups ordered by (size, string)
struct ActiveGroups {
  // each group: (string prefix, ascending members)
  std::vector<std::pair<std::string, std::vector<int>>> groups;

  static ActiveGroups compute(const std::vector<std::string>& strings,
                              const std::vector<bool>& done, int prefix_len) {
    std::map<std::string, std::vector<int>> by_string;
    for (size_t p = 0; p < strings.size(); ++p)
      if (!done[p]) by_string[strings[p].substr(0, prefix_len)].push_back(static_cast<int>(p));
    ActiveGroups out;
    for (auto& [s, members] : by_string) out.groups.emplace_back(s, std::move(members));
    std::sort(out.groups.begin(), out.groups.end(), [](const auto& a, const auto& b) {
      if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
      return a.first < b.first;
    });
    return out;
  }

  std::vector<int> sizes() const {
    std::vector<int> out;
    out.reserve(groups.size());
    for (const auto& [s, members] : groups) out.push_back(static_cast<int>(members.size()));
    std::sort(out.begin(), out.end());
    return out;
  }
};

bool same_prefix(const std::vector<std::string>& strings, const std::vector<int>& members,
                 int prefix_len) {
  for (size_t i = 1; i < members.size(); ++i)
    if (strings[members[i]].compare(0, prefix_len, strings[members[0]], 0, prefix_len) != 0)
      return false;
  return true;
}

}  // namespace

ProtocolRun run_gcd_le(const RandomnessConfiguration& alpha, const PortAssignment& ports,
                       uint64_t seed, int max_rounds, bool record_trace, int bootstrap_rounds) {
  int n = alpha.n();
  ProtocolRun run;
  run.outputs.assign(n, -1);
  run.final_classes.assign(n, 0);

  if (n == 1) {
    run.status = RunStatus::Decided;
    run.leader = 0;
    run.rounds_used = 1;
    run.decision_basis_round = 0;
    run.outputs = {1};
    if (record_trace) run.trace.push_back({1, 0, 0, "leader", 1});
    return run;
  }

  MpEngine eng(alpha, ports, seed);
  std::vector<bool> done(n, false);
  std::unique_ptr<MatchingDriver> driver;

  auto record = [&](int round, auto state_of) {
    if (!record_trace) return;
    for (int p = 0; p < n; ++p)
      run.trace.push_back({round, p, eng.class_ids()[p], state_of(p), run.outputs[p]});
  };
  auto party_state = [&](int p) -> std::string {
    if (done[p]) return "defeated";
    if (driver) {
      if (driver->is_unmatched_v1(p)) return "request";
      if (driver->is_active_v2(p)) return "listen";
    }
    return "exchange";
  };

  for (int r = 1; r <= max_rounds; ++r) {
    eng.begin_round();
    run.rounds_used = r;

    if (r > bootstrap_rounds) {
      ActiveGroups groups = ActiveGroups::compute(eng.strings(), done, r - 1);

      // a running matching dissolves when either side's strings diverge
      if (driver && (!same_prefix(eng.strings(), driver->v1(), r - 1) ||
                     !same_prefix(eng.strings(), driver->v2(), r - 1)))
        driver.reset();

      if (!driver) {
        if (!groups.groups.empty() && groups.groups.front().second.size() == 1) {
          // lone-string party with the smallest string wins
          int leader = groups.groups.front().second.front();
          for (const auto& [s, members] : groups.groups) {
            if (members.size() != 1) break;
            if (s < eng.strings()[leader].substr(0, static_cast<size_t>(r - 1)))
              leader = members.front();
          }
          run.status = RunStatus::Decided;
          run.leader = leader;
          run.decision_basis_round = r - 1;
          for (int p = 0; p < n; ++p) run.outputs[p] = p == leader ? 1 : 0;
          eng.end_round();
          run.final_classes = eng.class_ids();
          record(r, [&](int p) { return p == run.leader ? "leader" : "defeated"; });
          return run;
        }
        if (groups.groups.size() == 1) {
          const auto& members = groups.groups.front().second;
          bool one_source = std::all_of(members.begin(), members.end(), [&](int p) {
            return alpha.source_of(p) == alpha.source_of(members.front());
          });
          if (one_source) {
            // the group shares one source, its strings can never diverge
            run.status = RunStatus::StuckAtGcd;
            eng.end_round();
            run.final_classes = eng.class_ids();
            record(r, [&](int p) { return done[p] ? "defeated" : "stuck"; });
            return run;
          }
          // equal strings across sources: keep exchanging until they split
        } else if (groups.groups.size() >= 2) {
          driver = std::make_unique<MatchingDriver>(groups.groups[0].second,
                                                    groups.groups[1].second);
          run.group_size_history.push_back(groups.sizes());
        }
      }

      if (driver) {
        driver->step(eng);
        if (driver->complete()) {
          for (auto [u, w] : driver->matching()) {
            done[w] = true;
            run.outputs[w] = 0;
          }
          driver.reset();
          run.group_size_history.push_back(
              ActiveGroups::compute(eng.strings(), done, r - 1).sizes());
        }
      }
    }

    eng.end_round();
    run.final_classes = eng.class_ids();
    record(r, party_state);
  }
  run.status = RunStatus::Timeout;
  return run;
}

// ==== Tasks through a leader ====

TaskRun run_task_by_leader(const Model& model, const RandomnessConfiguration& alpha,
                           const CentralTask& task, const std::vector<long long>& inputs,
                           uint64_t seed, int max_rounds) {
  int n = alpha.n();
  if (static_cast<int>(inputs.size()) != n)
    throw InvalidConfig("task by leader: need one input per party");
  if (task.kind == CentralTask::Kind::MLeaders) {
    if (task.m < 1 || task.m > n) throw InvalidConfig("task by leader: need 1 <= m <= n");
    if (model.kind == ModelKind::Blackboard && task.m != n)
      throw InvalidConfig("task by leader: anonymous board cannot address individual winners");
  }

  ProtocolRun election;
  if (model.kind == ModelKind::Blackboard) {
    election = run_blackboard_le(alpha, seed, max_rounds);
  } else {
    if (!model.ports) throw InvalidConfig("task by leader: message passing needs ports");
    election = run_gcd_le(alpha, *model.ports, seed, max_rounds);
  }

  TaskRun out;
  out.status = election.status;
  out.rounds_used = election.rounds_used;
  out.leader = election.leader;
  out.outputs.assign(n, "");
  if (election.status != RunStatus::Decided) return out;

  // one round to gather inputs at the leader, one to distribute results
  out.rounds_used += 2;
  switch (task.kind) {
    case CentralTask::Kind::MaxValue: {
      long long best = *std::max_element(inputs.begin(), inputs.end());
      for (int p = 0; p < n; ++p) out.outputs[p] = std::to_string(best);
      break;
    }
    case CentralTask::Kind::MLeaders: {
      std::vector<bool> winner(n, false);
      winner[election.leader] = true;
      if (model.kind == ModelKind::MessagePassing) {
        // the leader's lowest ports name the other winners
        for (int j = 1, left = task.m - 1; j < n && left > 0; ++j, --left)
          winner[model.ports->target(election.leader, j)] = true;
      } else {
        winner.assign(n, true);  // m == n
      }
      for (int p = 0; p < n; ++p) out.outputs[p] = winner[p] ? "1" : "0";
      break;
    }
  }
  return out;
}

// ==== Monte Carlo ====

TrialOutcome trial_from_run(const ProtocolRun& run) {
  TrialOutcome t;
  t.rounds = run.rounds_used;
  t.outcome = to_string(run.status);
  t.leader = run.leader;
  int ones = static_cast<int>(std::count(run.outputs.begin(), run.outputs.end(), 1));
  t.success = run.status == RunStatus::Decided && ones == 1;
  return t;
}

MonteCarloSummary monte_carlo(uint64_t trials, uint64_t seed,
                              const std::function<TrialOutcome(uint64_t)>& run_trial) {
  MonteCarloSummary s;
  s.trials = trials;
  std::vector<int> rounds;
  rounds.reserve(trials);
  for (uint64_t i = 0; i < trials; ++i) {
    TrialOutcome t = run_trial(derive_seed(seed, i));
    if (t.success) {
      ++s.successes;
      if (t.leader >= 0) ++s.leader_counts[t.leader];
    }
    ++s.outcomes[t.outcome];
    rounds.push_back(t.rounds);
  }
  s.success_rate = trials ? static_cast<double>(s.successes) / static_cast<double>(trials) : 0.0;
  if (!rounds.empty()) {
    std::sort(rounds.begin(), rounds.end());
    s.rounds_min = rounds.front();
    s.rounds_max = rounds.back();
    s.rounds_median = rounds[rounds.size() / 2];
    s.rounds_p99 = rounds[std::min(rounds.size() - 1, (rounds.size() * 99) / 100)];
  }
  return s;
}

nlohmann::json MonteCarloSummary::to_json() const {
  nlohmann::json leaders = nlohmann::json::object();
  for (const auto& [p, c] : leader_counts) leaders[std::to_string(p)] = c;
  return {{"trials", trials},
          {"successes", successes},
          {"success_rate", success_rate},
          {"rounds", {{"min", rounds_min}, {"median", rounds_median}, {"p99", rounds_p99}, {"max", rounds_max}}},
          {"outcomes", outcomes},
          {"leaders", std::move(leaders)}};
}

}  // namespace toposym
