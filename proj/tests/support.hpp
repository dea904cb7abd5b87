#pragma once

#include <string>

#include "mpst/equirec.hpp"
#include "mpst/syntax.hpp"

namespace fixtures {

inline constexpr const char* kTp = "rec X . q (+) { l0(int). X, l1(int). end }";
inline constexpr const char* kTq =
    "rec X . p & { l0(int). X, l1(int). r (+) { l2(int). end } }";
inline constexpr const char* kTr = "q & { l2(int). end }";
inline constexpr const char* kGex =
    "rec X . p -> q { l0(int). X, l1(int). q -> r { l2(int). end } }";
inline constexpr const char* kGammaEx =
    "p : rec X . q (+) { l0(int). X, l1(int). end }\n"
    "q : rec X . p & { l0(int). X, l1(int). r (+) { l2(int). end } }\n"
    "r : q & { l2(int). end }\n";
inline constexpr const char* kGammaPrime =
    "p : end\nq : r (+) { l2(int). end }\nr : q & { l2(int). end }\n";
inline constexpr const char* kGammaEnd = "p : end\nq : end\nr : end\n";
inline constexpr const char* kUnsafeEnv = "p : q (+) { l0(int). end }\nq : p & { l0(nat). end }\n";
inline constexpr const char* kStuckSession = "p <| mu X . q!l0(0). X || q <| 0";
// Balanced and projectable variant of the running example.
inline constexpr const char* kGbal =
    "rec X . p -> q { l0(int). q -> r { l2(int). X }, "
    "l1(int). q -> r { l2(int). p -> q { l3(int). X } } }";

}  // namespace fixtures

/// Role table and arena shared by one test.
struct World {
  mpst::RoleNames roles;
  mpst::TypeStore store;

  mpst::Participant p(const char* name) { return roles.intern(name); }
  mpst::TreeHandle g(const std::string& text) {
    return store.intern_global(mpst::parse_global(text, roles));
  }
  mpst::TreeHandle t(const std::string& text) {
    return store.intern_local(mpst::parse_local(text, roles));
  }
  std::string show(mpst::TreeHandle h) { return mpst::render(store, h, roles); }
};
