#pragma once

#include <optional>
#include <utility>

#include "mpst/equirec.hpp"

namespace mpst {

bool subsort(Sort a, Sort b);
/// Least upper bound under subsorting, if any.
std::optional<Sort> sort_lub(Sort a, Sort b);

struct SubtypeResult {
  bool holds = true;
  /// A reachable pair of subtrees at which no subtyping rule applies.
  std::optional<std::pair<TreeHandle, TreeHandle>> witness;
  std::string reason;
};

/// Greatest-fixpoint check over the product of the two regular trees.
SubtypeResult check_subtype(const TypeStore& store, TreeHandle a, TreeHandle b);
bool subtype(const TypeStore& store, TreeHandle a, TreeHandle b);

/// Inductive approximation: both trees unrolled `depth` levels, pairs still
/// open at the cutoff count as related. Used as an oracle.
bool subtype_bounded(const TypeStore& store, TreeHandle a, TreeHandle b, std::size_t depth);

}  // namespace mpst
