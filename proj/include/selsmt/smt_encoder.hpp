#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "selsmt/policy_model.hpp"

namespace selsmt {

/// Ordered SMT-LIB2 command lists. The concatenation
/// prelude ++ policy ++ constraints ++ finale is a complete script.
struct SmtScript {
  std::vector<std::string> prelude;
  std::vector<std::string> policy;
  std::vector<std::string> constraints;
  std::vector<std::string> finale;
};

/// Deterministic, injective mapping from policy identifiers to SMT symbols.
///
/// Users, roles and types carry their conventional suffix (`_u`, `_r`, `_t`),
/// appended when the declared name lacks it; class and permission names are
/// used verbatim. Collisions after suffixing are disambiguated with
/// `__<uid>`. Attribute roles share the Role discipline, attributes the
/// Type discipline.
class SymbolMapping {
 public:
  static SymbolMapping build(const PolicyDb& db);

  const std::string& symbol(ElementKind kind, std::uint32_t uid) const;
  const std::string& symbol(const Identifier& id) const {
    return symbol(id.kind, id.uid);
  }

  bool contains_symbol(std::string_view symbol) const;

  /// Sort of the constant a policy element maps to.
  static const char* sort_of(ElementKind kind);

  static const std::vector<std::string>& sort_names();
  static const std::vector<std::string>& function_names();

 private:
  std::vector<std::string> symbols_[7];
  std::set<std::string, std::less<>> all_;
};

struct EncodeOptions {
  /// Also assert pairwise distinctness of Class and Permission constants.
  /// Off by default: nothing in the foundational model distinguishes them,
  /// and the relationship axioms never need it.
  bool distinct_classes_and_permissions = false;
};

/// The foundational command list included before any policy content.
/// Constant output; satisfiable on its own.
std::vector<std::string> emit_prelude();

/// Translates a validated PolicyDb into prelude + policy segments (and the
/// closing check command). Throws PolicyError(ValidationFailed) when the
/// database invariants do not hold.
///
/// neverallow rules are resolved against allow rules here: any ground
/// (source, target, class, permission) tuple covered by a neverallow rule,
/// directly or through statically-known attribute memberships, is asserted
/// as av-neverallow and never as a positive av-allow. A bare policy
/// therefore always produces a satisfiable script.
SmtScript encode_policy(const PolicyDb& db, const EncodeOptions& options = {});

/// Serialises the script: newline-delimited, LF endings, one banner comment
/// per segment. Byte-stable for equal inputs.
std::string render(const SmtScript& script);

}  // namespace selsmt
