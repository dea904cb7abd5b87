#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mpst/projection.hpp"

namespace mpst {

struct CorpusParams {
  std::uint32_t max_participants = 6;
  std::uint32_t max_labels = 4;
  std::uint32_t max_depth = 5;
  bool balanced_only = true;
  std::size_t max_env_states = 10000;
  std::size_t max_attempts = 200000;
};

struct Protocol {
  SynType global;
  TreeHandle g;
  TypeEnv env;         // the projections of g
  SessionForm session; // one realizer per participant
};

/// Participant names p, q, r, s, t, u, then p6, p7, ...
void intern_corpus_roles(RoleNames& roles, std::uint32_t n);

/// Deterministic for a given seed. Every protocol is projectable, balanced
/// (unless balanced_only is off) and has at most max_env_states environment
/// states. Throws GenerationExhausted.
std::vector<Protocol> generate_corpus(TypeStore& store, RoleNames& roles, std::uint64_t seed,
                                      std::size_t count, const CorpusParams& params = {});

/// A random subtype of t: drops send branches, narrows sent int to nat, adds
/// receive branches and widens received nat to int.
TreeHandle perturb_local(TypeStore& store, TreeHandle t, std::mt19937_64& rng, std::size_t edits);
/// Perturbs every entry; the result stays associated with whatever env was.
TypeEnv perturb_env(TypeStore& store, const TypeEnv& env, std::mt19937_64& rng, std::size_t edits = 2);

}  // namespace mpst
