#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace selsmt {

/// Categories of named policy elements. Attribute kinds are separate from
/// Role/TypeLabel because an identifier's category is fixed by how it was
/// declared, even though attributes share the Role/Type sorts downstream.
enum class ElementKind {
  User,
  Role,
  TypeLabel,
  Class,
  Permission,
  AttributeRole,
  AttributeType,
};

inline constexpr ElementKind kAllElementKinds[] = {
    ElementKind::User,       ElementKind::Role,
    ElementKind::TypeLabel,  ElementKind::Class,
    ElementKind::Permission, ElementKind::AttributeRole,
    ElementKind::AttributeType,
};

const char* to_string(ElementKind kind);

/// A declared policy element. uid values are dense per kind, assigned in
/// declaration order starting at 0.
struct Identifier {
  std::string name;
  ElementKind kind;
  std::uint32_t uid;

  bool operator==(const Identifier&) const = default;
};

enum class AvRuleKind { Allow, NeverAllow };

const char* to_string(AvRuleKind kind);

/// One access-vector rule. source/target are TypeLabel or AttributeType
/// identifiers; every permission belongs to `cls`.
struct AvRule {
  AvRuleKind kind;
  Identifier source;
  Identifier target;
  Identifier cls;
  std::vector<Identifier> permissions;  // non-empty, in written order

  bool operator==(const AvRule&) const = default;
};

struct SecurityContext {
  Identifier user;
  Identifier role;
  Identifier type;

  bool operator==(const SecurityContext&) const = default;
};

struct InitialSid {
  std::string name;
  std::optional<SecurityContext> context;

  bool operator==(const InitialSid&) const = default;
};

enum class PolicyErrorCode {
  InvalidToken,
  DuplicateDeclaration,
  UnknownIdentifier,
  PermissionNotInClass,
  AmbiguousName,
  ValidationFailed,
  InvalidParameter,
};

class PolicyError : public std::runtime_error {
 public:
  PolicyError(PolicyErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  PolicyErrorCode code() const { return code_; }

 private:
  PolicyErrorCode code_;
};

/// Parsed policy database. Immutable once construction is finished; all
/// mutation happens through the declare/add_* methods, which enforce the
/// symbol-table discipline (unique (kind, name), dense uids, referential
/// integrity of rules and relationships).
///
/// The role `object_r` is pre-declared in every database; initial-SID
/// contexts use it without declaring it.
class PolicyDb {
 public:
  PolicyDb();

  static bool is_valid_token(std::string_view name);

  /// Registers a new element. Re-declaring a Class is idempotent (forward
  /// declarations); any other duplicate is an error.
  Identifier declare(ElementKind kind, std::string_view name);

  /// Declares a permission belonging to `cls`.
  Identifier declare_permission(const Identifier& cls, std::string_view name);

  void add_user_role(const Identifier& user, const Identifier& role);
  void add_role_type(const Identifier& role, const Identifier& type);
  void add_role_attribute(const Identifier& role, const Identifier& attr);
  void add_type_attribute(const Identifier& type, const Identifier& attr);
  void add_av_rule(AvRule rule);
  void add_initial_sid(InitialSid sid);

  /// Kind-qualified lookup.
  std::optional<Identifier> find(ElementKind kind, std::string_view name) const;

  /// Unqualified lookup; throws AmbiguousName when the name is declared
  /// under more than one kind.
  std::optional<Identifier> resolve(std::string_view name) const;

  std::size_t count(ElementKind kind) const;
  Identifier identifier(ElementKind kind, std::uint32_t uid) const;
  const std::vector<std::string>& names(ElementKind kind) const;

  /// Permissions declared under a class, in declaration order.
  std::vector<Identifier> class_permissions(std::uint32_t class_uid) const;
  std::uint32_t permission_class(std::uint32_t perm_uid) const;

  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& user_roles() const {
    return user_roles_;
  }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& role_types() const {
    return role_types_;
  }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>&
  role_attribute_memberships() const {
    return role_attrs_;
  }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>&
  type_attribute_memberships() const {
    return type_attrs_;
  }
  const std::vector<AvRule>& av_rules() const { return av_rules_; }
  const std::vector<InitialSid>& initial_sids() const { return sids_; }

  /// Re-checks referential integrity of everything stored. Throws
  /// ValidationFailed on the first violation.
  void validate() const;

  friend bool operator==(const PolicyDb& a, const PolicyDb& b) {
    for (auto kind : kAllElementKinds) {
      if (a.names(kind) != b.names(kind)) return false;
    }
    return a.perm_class_ == b.perm_class_ && a.user_roles_ == b.user_roles_ &&
           a.role_types_ == b.role_types_ && a.role_attrs_ == b.role_attrs_ &&
           a.type_attrs_ == b.type_attrs_ && a.av_rules_ == b.av_rules_ &&
           a.sids_ == b.sids_;
  }

 private:
  Identifier require(ElementKind kind, const Identifier& id) const;

  std::vector<std::string> names_[7];
  std::map<std::string, std::vector<std::pair<ElementKind, std::uint32_t>>,
           std::less<>>
      by_name_;
  std::vector<std::uint32_t> perm_class_;  // permission uid -> class uid
  std::vector<std::pair<std::uint32_t, std::uint32_t>> user_roles_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> role_types_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> role_attrs_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> type_attrs_;
  std::vector<AvRule> av_rules_;
  std::vector<InitialSid> sids_;
};

}  // namespace selsmt
