#include "selsmt/policy_model.hpp"

#include <algorithm>
#include <cctype>

namespace selsmt {

namespace {

std::size_t kind_index(ElementKind kind) {
  return static_cast<std::size_t>(kind);
}

}  // namespace

const char* to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::User: return "user";
    case ElementKind::Role: return "role";
    case ElementKind::TypeLabel: return "type";
    case ElementKind::Class: return "class";
    case ElementKind::Permission: return "permission";
    case ElementKind::AttributeRole: return "attribute_role";
    case ElementKind::AttributeType: return "attribute";
  }
  return "?";
}

const char* to_string(AvRuleKind kind) {
  return kind == AvRuleKind::Allow ? "allow" : "neverallow";
}

PolicyDb::PolicyDb() {
  // Initial-SID contexts reference object_r without declaring it.
  declare(ElementKind::Role, "object_r");
}

bool PolicyDb::is_valid_token(std::string_view name) {
  if (name.empty()) return false;
  unsigned char first = static_cast<unsigned char>(name.front());
  if (!std::isalpha(first) && first != '_') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

Identifier PolicyDb::declare(ElementKind kind, std::string_view name) {
  if (!is_valid_token(name)) {
    throw PolicyError(PolicyErrorCode::InvalidToken,
                      "invalid identifier '" + std::string(name) + "'");
  }
  auto it = by_name_.find(name);
  if (it != by_name_.end()) {
    for (auto [existing_kind, uid] : it->second) {
      if (existing_kind != kind) continue;
      if (kind == ElementKind::Class) {
        // Forward class declarations are idempotent.
        return Identifier{std::string(name), kind, uid};
      }
      throw PolicyError(PolicyErrorCode::DuplicateDeclaration,
                        std::string("duplicate ") + to_string(kind) + " '" +
                            std::string(name) + "'");
    }
  }
  auto& pool = names_[kind_index(kind)];
  auto uid = static_cast<std::uint32_t>(pool.size());
  pool.emplace_back(name);
  by_name_[std::string(name)].emplace_back(kind, uid);
  return Identifier{std::string(name), kind, uid};
}

Identifier PolicyDb::declare_permission(const Identifier& cls,
                                        std::string_view name) {
  require(ElementKind::Class, cls);
  Identifier perm = declare(ElementKind::Permission, name);
  perm_class_.push_back(cls.uid);
  return perm;
}

Identifier PolicyDb::require(ElementKind kind, const Identifier& id) const {
  if (id.kind != kind) {
    throw PolicyError(PolicyErrorCode::UnknownIdentifier,
                      "'" + id.name + "' is a " + to_string(id.kind) +
                          ", expected a " + to_string(kind));
  }
  auto found = find(kind, id.name);
  if (!found || found->uid != id.uid) {
    throw PolicyError(PolicyErrorCode::UnknownIdentifier,
                      std::string("unknown ") + to_string(kind) + " '" +
                          id.name + "'");
  }
  return *found;
}

void PolicyDb::add_user_role(const Identifier& user, const Identifier& role) {
  require(ElementKind::User, user);
  require(ElementKind::Role, role);
  user_roles_.emplace_back(user.uid, role.uid);
}

void PolicyDb::add_role_type(const Identifier& role, const Identifier& type) {
  require(ElementKind::Role, role);
  require(ElementKind::TypeLabel, type);
  role_types_.emplace_back(role.uid, type.uid);
}

void PolicyDb::add_role_attribute(const Identifier& role,
                                  const Identifier& attr) {
  require(ElementKind::Role, role);
  require(ElementKind::AttributeRole, attr);
  role_attrs_.emplace_back(role.uid, attr.uid);
}

void PolicyDb::add_type_attribute(const Identifier& type,
                                  const Identifier& attr) {
  require(ElementKind::TypeLabel, type);
  require(ElementKind::AttributeType, attr);
  type_attrs_.emplace_back(type.uid, attr.uid);
}

void PolicyDb::add_av_rule(AvRule rule) {
  auto check_type_side = [&](const Identifier& id) {
    if (id.kind != ElementKind::TypeLabel &&
        id.kind != ElementKind::AttributeType) {
      throw PolicyError(PolicyErrorCode::UnknownIdentifier,
                        "'" + id.name + "' is not a type or attribute");
    }
    require(id.kind, id);
  };
  check_type_side(rule.source);
  check_type_side(rule.target);
  require(ElementKind::Class, rule.cls);
  if (rule.permissions.empty()) {
    throw PolicyError(PolicyErrorCode::ValidationFailed,
                      "access-vector rule with empty permission set");
  }
  for (const auto& perm : rule.permissions) {
    require(ElementKind::Permission, perm);
    if (perm_class_[perm.uid] != rule.cls.uid) {
      throw PolicyError(PolicyErrorCode::PermissionNotInClass,
                        "permission '" + perm.name +
                            "' is not declared under class '" + rule.cls.name +
                            "'");
    }
  }
  av_rules_.push_back(std::move(rule));
}

void PolicyDb::add_initial_sid(InitialSid sid) {
  if (sid.context) {
    require(ElementKind::User, sid.context->user);
    require(ElementKind::Role, sid.context->role);
    require(ElementKind::TypeLabel, sid.context->type);
  }
  sids_.push_back(std::move(sid));
}

std::optional<Identifier> PolicyDb::find(ElementKind kind,
                                         std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  for (auto [existing_kind, uid] : it->second) {
    if (existing_kind == kind) {
      return Identifier{std::string(name), kind, uid};
    }
  }
  return std::nullopt;
}

std::optional<Identifier> PolicyDb::resolve(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  if (it->second.size() > 1) {
    throw PolicyError(PolicyErrorCode::AmbiguousName,
                      "'" + std::string(name) +
                          "' is declared under more than one kind; use a "
                          "kind-qualified lookup");
  }
  auto [kind, uid] = it->second.front();
  return Identifier{std::string(name), kind, uid};
}

std::size_t PolicyDb::count(ElementKind kind) const {
  return names_[kind_index(kind)].size();
}

Identifier PolicyDb::identifier(ElementKind kind, std::uint32_t uid) const {
  const auto& pool = names_[kind_index(kind)];
  if (uid >= pool.size()) {
    throw PolicyError(PolicyErrorCode::UnknownIdentifier,
                      std::string("no ") + to_string(kind) + " with uid " +
                          std::to_string(uid));
  }
  return Identifier{pool[uid], kind, uid};
}

const std::vector<std::string>& PolicyDb::names(ElementKind kind) const {
  return names_[kind_index(kind)];
}

std::vector<Identifier> PolicyDb::class_permissions(
    std::uint32_t class_uid) const {
  std::vector<Identifier> result;
  for (std::uint32_t uid = 0; uid < perm_class_.size(); ++uid) {
    if (perm_class_[uid] == class_uid) {
      result.push_back(identifier(ElementKind::Permission, uid));
    }
  }
  return result;
}

std::uint32_t PolicyDb::permission_class(std::uint32_t perm_uid) const {
  if (perm_uid >= perm_class_.size()) {
    throw PolicyError(PolicyErrorCode::UnknownIdentifier,
                      "no permission with uid " + std::to_string(perm_uid));
  }
  return perm_class_[perm_uid];
}

void PolicyDb::validate() const {
  auto fail = [](const std::string& what) {
    throw PolicyError(PolicyErrorCode::ValidationFailed, what);
  };
  auto check_uid = [&](ElementKind kind, std::uint32_t uid) {
    if (uid >= count(kind)) {
      fail(std::string("dangling ") + to_string(kind) + " reference");
    }
  };
  if (perm_class_.size() != count(ElementKind::Permission)) {
    fail("permission/class association out of sync");
  }
  for (auto cls : perm_class_) check_uid(ElementKind::Class, cls);
  for (auto [u, r] : user_roles_) {
    check_uid(ElementKind::User, u);
    check_uid(ElementKind::Role, r);
  }
  for (auto [r, t] : role_types_) {
    check_uid(ElementKind::Role, r);
    check_uid(ElementKind::TypeLabel, t);
  }
  for (auto [r, a] : role_attrs_) {
    check_uid(ElementKind::Role, r);
    check_uid(ElementKind::AttributeRole, a);
  }
  for (auto [t, a] : type_attrs_) {
    check_uid(ElementKind::TypeLabel, t);
    check_uid(ElementKind::AttributeType, a);
  }
  for (const auto& rule : av_rules_) {
    check_uid(rule.source.kind, rule.source.uid);
    check_uid(rule.target.kind, rule.target.uid);
    check_uid(ElementKind::Class, rule.cls.uid);
    if (rule.permissions.empty()) fail("rule with empty permission set");
    for (const auto& perm : rule.permissions) {
      check_uid(ElementKind::Permission, perm.uid);
      if (perm_class_[perm.uid] != rule.cls.uid) {
        fail("permission '" + perm.name + "' outside class '" +
             rule.cls.name + "'");
      }
    }
  }
  for (const auto& sid : sids_) {
    if (!sid.context) continue;
    check_uid(ElementKind::User, sid.context->user.uid);
    check_uid(ElementKind::Role, sid.context->role.uid);
    check_uid(ElementKind::TypeLabel, sid.context->type.uid);
  }
}

}  // namespace selsmt
