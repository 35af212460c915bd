#include "selsmt/smt_encoder.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace selsmt {

namespace {

// Symbol assignment walks the kinds in this fixed order, so disambiguation
// is deterministic for a given database.
constexpr ElementKind kMappingOrder[] = {
    ElementKind::User,          ElementKind::Role,
    ElementKind::AttributeRole, ElementKind::TypeLabel,
    ElementKind::AttributeType, ElementKind::Class,
    ElementKind::Permission,
};

const std::set<std::string_view> kReservedWords = {
    "true", "false", "not", "and", "or", "xor", "ite", "distinct",
    "forall", "exists", "let", "assert", "Int", "Bool", "as",
};

const char* conventional_suffix(ElementKind kind) {
  switch (kind) {
    case ElementKind::User: return "_u";
    case ElementKind::Role:
    case ElementKind::AttributeRole: return "_r";
    case ElementKind::TypeLabel:
    case ElementKind::AttributeType: return "_t";
    default: return nullptr;
  }
}

}  // namespace

const char* SymbolMapping::sort_of(ElementKind kind) {
  switch (kind) {
    case ElementKind::User: return "User";
    case ElementKind::Role:
    case ElementKind::AttributeRole: return "Role";
    case ElementKind::TypeLabel:
    case ElementKind::AttributeType: return "Type";
    case ElementKind::Class: return "Class";
    case ElementKind::Permission: return "Permission";
  }
  return "?";
}

const std::vector<std::string>& SymbolMapping::sort_names() {
  static const std::vector<std::string> sorts = {"User", "Role", "Type",
                                                 "Class", "Permission"};
  return sorts;
}

const std::vector<std::string>& SymbolMapping::function_names() {
  static const std::vector<std::string> functions = {
      "user-id",
      "role-id",
      "type-id",
      "user-has-role",
      "role-has-type",
      "role-has-attribute-role",
      "type-has-attribute",
      "av-allow",
      "av-neverallow",
  };
  return functions;
}

SymbolMapping SymbolMapping::build(const PolicyDb& db) {
  SymbolMapping mapping;
  for (ElementKind kind : kMappingOrder) {
    const char* suffix = conventional_suffix(kind);
    const auto& names = db.names(kind);
    auto& out = mapping.symbols_[static_cast<std::size_t>(kind)];
    out.reserve(names.size());
    for (std::uint32_t uid = 0; uid < names.size(); ++uid) {
      std::string preferred = names[uid];
      if (suffix && !preferred.ends_with(suffix)) preferred += suffix;
      if (mapping.all_.contains(preferred) ||
          kReservedWords.contains(preferred)) {
        preferred += "__" + std::to_string(uid);
        while (mapping.all_.contains(preferred)) preferred += "_";
      }
      mapping.all_.insert(preferred);
      out.push_back(std::move(preferred));
    }
  }
  return mapping;
}

const std::string& SymbolMapping::symbol(ElementKind kind,
                                         std::uint32_t uid) const {
  return symbols_[static_cast<std::size_t>(kind)].at(uid);
}

bool SymbolMapping::contains_symbol(std::string_view symbol) const {
  return all_.contains(symbol);
}

std::vector<std::string> emit_prelude() {
  // Constant output. Each axiom below that departs from the usual
  // textbook phrasing carries a comment explaining the chosen form.
  static const std::vector<std::string> prelude = {
      "; Foundational RBAC model.",
      "; Context element sorts.",
      "(declare-sort User 0)",
      "(declare-sort Role 0)",
      "(declare-sort Type 0)",
      "(declare-sort Class 0)",
      "(declare-sort Permission 0)",
      "; Unique-identifier functions.",
      "(declare-fun user-id (User) Int)",
      "(declare-fun role-id (Role) Int)",
      "(declare-fun type-id (Type) Int)",
      "; Identifier injectivity, stated as an implication: elements sharing",
      "; an id are the same element. The negated-existential phrasing would",
      "; also forbid an element from sharing an id with itself, which no",
      "; interpretation can satisfy.",
      "(assert (forall ((u1 User) (u2 User)) (=> (= (user-id u1) (user-id "
      "u2)) (= u1 u2))))",
      "(assert (forall ((r1 Role) (r2 Role)) (=> (= (role-id r1) (role-id "
      "r2)) (= r1 r2))))",
      "(assert (forall ((t1 Type) (t2 Type)) (=> (= (type-id t1) (type-id "
      "t2)) (= t1 t2))))",
      "; Context relationship functions.",
      "(declare-fun user-has-role (User Role) Bool)",
      "(declare-fun role-has-type (Role Type) Bool)",
      "(declare-fun role-has-attribute-role (Role Role) Bool)",
      "(declare-fun type-has-attribute (Type Type) Bool)",
      "; Access-vector predicates.",
      "(declare-fun av-allow (Type Type Class Permission) Bool)",
      "(declare-fun av-neverallow (Type Type Class Permission) Bool)",
      "; Quantified axioms are emitted as single well-formed commands, with",
      "; the binder list attached to the quantifier it belongs to.",
      "; Role-attribute membership propagates role-type assignments.",
      "(assert (forall ((r1 Role) (r2 Role) (t Type)) (=> (and "
      "(role-has-type r2 t) (role-has-attribute-role r1 r2)) (role-has-type "
      "r1 t))))",
      "; Type-attribute membership propagates grants: source side, then",
      "; target side.",
      "(assert (forall ((t1 Type) (t2 Type) (tt Type) (c Class) (p "
      "Permission)) (=> (and (type-has-attribute t1 t2) (av-allow t2 tt c "
      "p)) (av-allow t1 tt c p))))",
      "(assert (forall ((st Type) (t1 Type) (t2 Type) (c Class) (p "
      "Permission)) (=> (and (type-has-attribute t1 t2) (av-allow st t2 c "
      "p)) (av-allow st t1 c p))))",
      "; neverallow supersedes allow. Only av-neverallow appears in the",
      "; antecedent; with av-allow there as well, any tuple holding both",
      "; predicates would contradict itself.",
      "(assert (forall ((st Type) (tt Type) (c Class) (p Permission)) (=> "
      "(av-neverallow st tt c p) (not (av-allow st tt c p)))))",
  };
  return prelude;
}

namespace {

// Ground tuples use a flat index over the Type sort: declared types first,
// then attributes.
struct GroundIndex {
  const PolicyDb& db;
  const SymbolMapping& mapping;
  std::size_t type_count;
  std::vector<std::vector<std::uint32_t>> attr_members;  // flat indices

  explicit GroundIndex(const PolicyDb& db_, const SymbolMapping& mapping_)
      : db(db_), mapping(mapping_) {
    type_count = db.count(ElementKind::TypeLabel);
    attr_members.resize(db.count(ElementKind::AttributeType));
    for (auto [type, attr] : db.type_attribute_memberships()) {
      attr_members[attr].push_back(type);
    }
  }

  std::uint32_t flat(const Identifier& id) const {
    return id.kind == ElementKind::AttributeType
               ? static_cast<std::uint32_t>(type_count) + id.uid
               : id.uid;
  }

  const std::string& symbol_at(std::uint32_t flat_index) const {
    return flat_index < type_count
               ? mapping.symbol(ElementKind::TypeLabel, flat_index)
               : mapping.symbol(ElementKind::AttributeType,
                                flat_index -
                                    static_cast<std::uint32_t>(type_count));
  }

  // The element itself plus, for an attribute, its members (transitively).
  std::vector<std::uint32_t> down(const Identifier& id) const {
    std::vector<std::uint32_t> result{flat(id)};
    if (id.kind != ElementKind::AttributeType) return result;
    std::vector<std::uint32_t> frontier{id.uid};
    while (!frontier.empty()) {
      std::uint32_t attr = frontier.back();
      frontier.pop_back();
      for (std::uint32_t member : attr_members[attr]) {
        if (std::find(result.begin(), result.end(), member) == result.end()) {
          result.push_back(member);
        }
      }
    }
    return result;
  }
};

using NeverTuple = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t,
                              std::uint32_t>;

}  // namespace

SmtScript encode_policy(const PolicyDb& db, const EncodeOptions& options) {
  db.validate();
  SymbolMapping mapping = SymbolMapping::build(db);
  GroundIndex ground(db, mapping);

  SmtScript script;
  script.prelude = emit_prelude();
  auto& out = script.policy;

  auto declare_all = [&](ElementKind kind) {
    for (std::uint32_t uid = 0; uid < db.count(kind); ++uid) {
      out.push_back("(declare-const " + mapping.symbol(kind, uid) + " " +
                    SymbolMapping::sort_of(kind) + ")");
    }
  };
  auto declare_with_ids = [&](ElementKind kind, const char* id_function,
                              std::size_t offset) {
    for (std::uint32_t uid = 0; uid < db.count(kind); ++uid) {
      const std::string& symbol = mapping.symbol(kind, uid);
      out.push_back("(declare-const " + symbol + " " +
                    SymbolMapping::sort_of(kind) + ")");
      out.push_back("(assert (= (" + std::string(id_function) + " " + symbol +
                    ") " + std::to_string(offset + uid) + "))");
    }
  };

  out.push_back("; Context elements.");
  declare_with_ids(ElementKind::User, "user-id", 0);
  // Attribute roles share the Role sort and attributes the Type sort, so
  // their ids continue the base kind's sequence; restarting at 0 would force
  // distinct constants equal through id injectivity.
  declare_with_ids(ElementKind::Role, "role-id", 0);
  declare_with_ids(ElementKind::AttributeRole, "role-id",
                   db.count(ElementKind::Role));
  declare_with_ids(ElementKind::TypeLabel, "type-id", 0);
  declare_with_ids(ElementKind::AttributeType, "type-id",
                   db.count(ElementKind::TypeLabel));
  declare_all(ElementKind::Class);
  declare_all(ElementKind::Permission);

  if (options.distinct_classes_and_permissions) {
    auto distinct = [&](ElementKind kind) {
      if (db.count(kind) < 2) return;
      std::string cmd = "(assert (distinct";
      for (std::uint32_t uid = 0; uid < db.count(kind); ++uid) {
        cmd += " " + mapping.symbol(kind, uid);
      }
      out.push_back(cmd + "))");
    };
    distinct(ElementKind::Class);
    distinct(ElementKind::Permission);
  }

  out.push_back("; Context relationships.");
  for (auto [user, role] : db.user_roles()) {
    out.push_back("(assert (user-has-role " +
                  mapping.symbol(ElementKind::User, user) + " " +
                  mapping.symbol(ElementKind::Role, role) + "))");
  }
  for (auto [role, type] : db.role_types()) {
    out.push_back("(assert (role-has-type " +
                  mapping.symbol(ElementKind::Role, role) + " " +
                  mapping.symbol(ElementKind::TypeLabel, type) + "))");
  }
  for (auto [role, attr] : db.role_attribute_memberships()) {
    out.push_back("(assert (role-has-attribute-role " +
                  mapping.symbol(ElementKind::Role, role) + " " +
                  mapping.symbol(ElementKind::AttributeRole, attr) + "))");
  }
  for (auto [type, attr] : db.type_attribute_memberships()) {
    out.push_back("(assert (type-has-attribute " +
                  mapping.symbol(ElementKind::TypeLabel, type) + " " +
                  mapping.symbol(ElementKind::AttributeType, attr) + "))");
  }

  out.push_back("; Access-vector rules.");

  // Ground coverage of the neverallow rules, expanded through
  // statically-known attribute memberships on both sides.
  std::set<NeverTuple> never;
  std::vector<NeverTuple> never_ordered;
  for (const auto& rule : db.av_rules()) {
    if (rule.kind != AvRuleKind::NeverAllow) continue;
    auto sources = ground.down(rule.source);
    auto targets = ground.down(rule.target);
    for (const auto& perm : rule.permissions) {
      for (auto s : sources) {
        for (auto t : targets) {
          NeverTuple tuple{s, t, rule.cls.uid, perm.uid};
          if (never.insert(tuple).second) never_ordered.push_back(tuple);
        }
      }
    }
  }
  for (const auto& [s, t, cls, perm] : never_ordered) {
    out.push_back("(assert (av-neverallow " + ground.symbol_at(s) + " " +
                  ground.symbol_at(t) + " " +
                  mapping.symbol(ElementKind::Class, cls) + " " +
                  mapping.symbol(ElementKind::Permission, perm) + "))");
  }

  // Positive grants, suppressed wherever any tuple derivable from the grant
  // (through attribute membership) is covered by a neverallow.
  for (const auto& rule : db.av_rules()) {
    if (rule.kind != AvRuleKind::Allow) continue;
    auto sources = ground.down(rule.source);
    auto targets = ground.down(rule.target);
    for (const auto& perm : rule.permissions) {
      bool superseded = false;
      for (auto s : sources) {
        for (auto t : targets) {
          if (never.contains({s, t, rule.cls.uid, perm.uid})) {
            superseded = true;
          }
        }
      }
      std::string body = "(av-allow " + mapping.symbol(rule.source) + " " +
                         mapping.symbol(rule.target) + " " +
                         mapping.symbol(rule.cls) + " " +
                         mapping.symbol(perm) + ")";
      if (superseded) {
        out.push_back("; superseded by neverallow: " + body);
      } else {
        out.push_back("(assert " + body + ")");
      }
    }
  }

  script.finale = {"(check-sat)"};
  return script;
}

std::string render(const SmtScript& script) {
  std::ostringstream out;
  auto segment = [&](const char* banner,
                     const std::vector<std::string>& lines, bool always) {
    if (lines.empty() && !always) return;
    out << "; === " << banner << " ===\n";
    for (const auto& line : lines) out << line << "\n";
  };
  segment("prelude", script.prelude, true);
  segment("policy", script.policy, true);
  segment("constraints", script.constraints, false);
  segment("finale", script.finale, true);
  return out.str();
}

}  // namespace selsmt
