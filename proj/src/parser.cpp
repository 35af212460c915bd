#include "selsmt/parser.hpp"

#include <array>
#include <cctype>
#include <sstream>
#include <unordered_map>

namespace selsmt {

namespace {

constexpr std::size_t kMaxErrors = 512;

const std::unordered_map<std::string_view, TokenType> kKeywords = {
    {"class", TokenType::KwClass},
    {"sid", TokenType::KwSid},
    {"role", TokenType::KwRole},
    {"type", TokenType::KwType},
    {"attribute", TokenType::KwAttribute},
    {"roleattribute", TokenType::KwRoleattribute},
    {"typeattribute", TokenType::KwTypeattribute},
    {"allow", TokenType::KwAllow},
    {"neverallow", TokenType::KwNeverallow},
    {"user", TokenType::KwUser},
    {"roles", TokenType::KwRoles},
    {"types", TokenType::KwTypes},
};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

struct Name {
  std::string text;
  SourceSpan span;
};

struct Stmt {
  enum class Kind {
    ClassForward,
    ClassBlock,
    Sid,
    TypeDecl,
    AttrDecl,
    RoleDecl,
    RoleTypes,
    RoleAttr,
    TypeAttr,
    Av,
    UserDecl,
  };

  Kind kind;
  Name a;                  // primary name
  Name b;                  // secondary name (role types / attribute member)
  Name cls;                // AV class
  std::vector<Name> list;  // permissions / role list
  AvRuleKind av_kind = AvRuleKind::Allow;
  Name ctx_user, ctx_role, ctx_type;
  bool has_context = false;
};

}  // namespace

TokenizeResult tokenize(std::string_view input) {
  TokenizeResult result;
  int line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (input[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < input.size()) {
    unsigned char c = static_cast<unsigned char>(input[i]);
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < input.size() && input[i] != '\n') advance(1);
      continue;
    }
    SourceSpan span{line, column, 1};
    if (is_ident_start(c)) {
      std::size_t start = i;
      while (i < input.size() &&
             is_ident_char(static_cast<unsigned char>(input[i]))) {
        advance(1);
      }
      std::string text(input.substr(start, i - start));
      span.length = static_cast<int>(text.size());
      auto kw = kKeywords.find(text);
      TokenType type =
          kw == kKeywords.end() ? TokenType::Identifier : kw->second;
      result.tokens.push_back({type, std::move(text), span});
      continue;
    }
    TokenType type;
    switch (c) {
      case '{': type = TokenType::LBrace; break;
      case '}': type = TokenType::RBrace; break;
      case ':': type = TokenType::Colon; break;
      case ';': type = TokenType::Semicolon; break;
      default:
        if (result.errors.size() < kMaxErrors) {
          std::ostringstream msg;
          msg << "unexpected character '";
          if (std::isprint(c)) {
            msg << static_cast<char>(c);
          } else {
            msg << "\\x" << std::hex << static_cast<int>(c);
          }
          msg << "'";
          result.errors.push_back({span, msg.str(), ParseErrorKind::Lex});
        }
        advance(1);
        continue;
    }
    result.tokens.push_back({type, std::string(1, static_cast<char>(c)), span});
    advance(1);
  }
  result.tokens.push_back({TokenType::End, "", {line, column, 1}});
  return result;
}

namespace {

const char* describe(TokenType type) {
  switch (type) {
    case TokenType::Identifier: return "identifier";
    case TokenType::LBrace: return "'{'";
    case TokenType::RBrace: return "'}'";
    case TokenType::Colon: return "':'";
    case TokenType::Semicolon: return "';'";
    case TokenType::End: return "end of input";
    default: return "keyword";
  }
}

bool starts_statement(TokenType type) {
  switch (type) {
    case TokenType::KwClass:
    case TokenType::KwSid:
    case TokenType::KwRole:
    case TokenType::KwType:
    case TokenType::KwAttribute:
    case TokenType::KwRoleattribute:
    case TokenType::KwTypeattribute:
    case TokenType::KwAllow:
    case TokenType::KwNeverallow:
    case TokenType::KwUser:
      return true;
    default:
      return false;
  }
}

// Pass 1: token stream -> statement list, collecting syntax errors.
class StatementParser {
 public:
  StatementParser(std::vector<Token> tokens, std::vector<ParseError>& errors)
      : tokens_(std::move(tokens)), errors_(errors) {}

  std::vector<Stmt> run() {
    std::vector<Stmt> stmts;
    while (peek().type != TokenType::End) {
      if (!parse_statement(stmts)) recover();
      if (errors_.size() >= kMaxErrors) break;
    }
    return stmts;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }

  void error_here(const std::string& message) {
    if (errors_.size() < kMaxErrors) {
      errors_.push_back({peek().span, message, ParseErrorKind::Syntax});
    }
  }

  // Skips to the start of the next plausible statement.
  void recover() {
    while (peek().type != TokenType::End) {
      if (peek().type == TokenType::Semicolon) {
        next();
        return;
      }
      if (starts_statement(peek().type)) return;
      next();
    }
  }

  bool expect_ident(Name& out, const char* what) {
    if (peek().type != TokenType::Identifier) {
      error_here(std::string("expected ") + what + ", found " +
                 describe(peek().type));
      return false;
    }
    const Token& tok = next();
    out = {tok.text, tok.span};
    return true;
  }

  bool expect(TokenType type) {
    if (peek().type != type) {
      error_here(std::string("expected ") + describe(type) + ", found " +
                 describe(peek().type));
      return false;
    }
    next();
    return true;
  }

  // `class`, `sid` and permission-block statements take no terminator;
  // every other form requires one.
  bool forbid_semicolon() {
    if (peek().type == TokenType::Semicolon) {
      error_here("';' is not allowed after this statement");
      next();
      return false;
    }
    return true;
  }

  bool parse_statement(std::vector<Stmt>& stmts) {
    const Token& head = next();
    switch (head.type) {
      case TokenType::KwClass: {
        Stmt stmt{};
        if (!expect_ident(stmt.a, "class name")) return false;
        if (peek().type == TokenType::LBrace) {
          next();
          while (peek().type == TokenType::Identifier) {
            const Token& tok = next();
            stmt.list.push_back({tok.text, tok.span});
          }
          if (stmt.list.empty()) {
            error_here("expected at least one permission name");
            return false;
          }
          if (!expect(TokenType::RBrace)) return false;
          stmt.kind = Stmt::Kind::ClassBlock;
        } else {
          stmt.kind = Stmt::Kind::ClassForward;
        }
        if (!forbid_semicolon()) return false;
        stmts.push_back(std::move(stmt));
        return true;
      }
      case TokenType::KwSid: {
        Stmt stmt{};
        stmt.kind = Stmt::Kind::Sid;
        if (!expect_ident(stmt.a, "sid name")) return false;
        if (peek().type == TokenType::Identifier) {
          stmt.has_context = true;
          if (!expect_ident(stmt.ctx_user, "context user")) return false;
          if (!expect(TokenType::Colon)) return false;
          if (!expect_ident(stmt.ctx_role, "context role")) return false;
          if (!expect(TokenType::Colon)) return false;
          if (!expect_ident(stmt.ctx_type, "context type")) return false;
        }
        if (!forbid_semicolon()) return false;
        stmts.push_back(std::move(stmt));
        return true;
      }
      case TokenType::KwType: {
        Stmt stmt{};
        stmt.kind = Stmt::Kind::TypeDecl;
        if (!expect_ident(stmt.a, "type name")) return false;
        if (!expect(TokenType::Semicolon)) return false;
        stmts.push_back(std::move(stmt));
        return true;
      }
      case TokenType::KwAttribute: {
        Stmt stmt{};
        stmt.kind = Stmt::Kind::AttrDecl;
        if (!expect_ident(stmt.a, "attribute name")) return false;
        if (!expect(TokenType::Semicolon)) return false;
        stmts.push_back(std::move(stmt));
        return true;
      }
      case TokenType::KwRole: {
        Stmt stmt{};
        if (!expect_ident(stmt.a, "role name")) return false;
        if (peek().type == TokenType::KwTypes) {
          next();
          stmt.kind = Stmt::Kind::RoleTypes;
          if (!expect_ident(stmt.b, "type name")) return false;
        } else {
          stmt.kind = Stmt::Kind::RoleDecl;
        }
        if (!expect(TokenType::Semicolon)) return false;
        stmts.push_back(std::move(stmt));
        return true;
      }
      case TokenType::KwRoleattribute:
      case TokenType::KwTypeattribute: {
        Stmt stmt{};
        stmt.kind = head.type == TokenType::KwRoleattribute
                        ? Stmt::Kind::RoleAttr
                        : Stmt::Kind::TypeAttr;
        const char* member = stmt.kind == Stmt::Kind::RoleAttr
                                 ? "role name"
                                 : "type name";
        if (!expect_ident(stmt.a, member)) return false;
        if (!expect_ident(stmt.b, "attribute name")) return false;
        if (!expect(TokenType::Semicolon)) return false;
        stmts.push_back(std::move(stmt));
        return true;
      }
      case TokenType::KwAllow:
      case TokenType::KwNeverallow: {
        Stmt stmt{};
        stmt.kind = Stmt::Kind::Av;
        stmt.av_kind = head.type == TokenType::KwAllow ? AvRuleKind::Allow
                                                       : AvRuleKind::NeverAllow;
        if (!expect_ident(stmt.a, "source type")) return false;
        if (!expect_ident(stmt.b, "target type")) return false;
        if (!expect(TokenType::Colon)) return false;
        if (!expect_ident(stmt.cls, "class name")) return false;
        if (peek().type == TokenType::LBrace) {
          next();
          while (peek().type == TokenType::Identifier) {
            const Token& tok = next();
            stmt.list.push_back({tok.text, tok.span});
          }
          if (stmt.list.empty()) {
            error_here("expected at least one permission name");
            return false;
          }
          if (!expect(TokenType::RBrace)) return false;
        } else {
          Name perm;
          if (!expect_ident(perm, "permission name")) return false;
          stmt.list.push_back(std::move(perm));
        }
        if (!expect(TokenType::Semicolon)) return false;
        stmts.push_back(std::move(stmt));
        return true;
      }
      case TokenType::KwUser: {
        Stmt stmt{};
        stmt.kind = Stmt::Kind::UserDecl;
        if (!expect_ident(stmt.a, "user name")) return false;
        if (peek().type != TokenType::KwRoles) {
          error_here("expected 'roles'");
          return false;
        }
        next();
        if (!expect(TokenType::LBrace)) return false;
        while (peek().type == TokenType::Identifier) {
          const Token& tok = next();
          stmt.list.push_back({tok.text, tok.span});
        }
        if (stmt.list.empty()) {
          error_here("expected at least one role name");
          return false;
        }
        if (!expect(TokenType::RBrace)) return false;
        if (!expect(TokenType::Semicolon)) return false;
        stmts.push_back(std::move(stmt));
        return true;
      }
      default:
        if (errors_.size() < kMaxErrors) {
          errors_.push_back({head.span,
                             std::string("expected a statement, found ") +
                                 describe(head.type),
                             ParseErrorKind::Syntax});
        }
        return false;
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<ParseError>& errors_;
};

// Pass 2: statements -> PolicyDb, declarations first so references may
// appear in any order.
class Resolver {
 public:
  Resolver(const std::vector<Stmt>& stmts, ParseResult& out)
      : stmts_(stmts), out_(out) {}

  void run() {
    for (const auto& stmt : stmts_) declare(stmt);
    for (const auto& stmt : stmts_) link(stmt);
  }

 private:
  void semantic(const SourceSpan& span, const std::string& message) {
    if (out_.errors.size() < kMaxErrors) {
      out_.errors.push_back({span, message, ParseErrorKind::Semantic});
    }
  }

  void warn_suffix(const Identifier& id) {
    static constexpr std::pair<const char*, ElementKind> suffixes[] = {
        {"_u", ElementKind::User},
        {"_r", ElementKind::Role},
        {"_t", ElementKind::TypeLabel},
    };
    switch (id.kind) {
      case ElementKind::User:
      case ElementKind::Role:
      case ElementKind::TypeLabel:
      case ElementKind::AttributeRole:
      case ElementKind::AttributeType:
        break;
      default:
        return;
    }
    for (auto [suffix, kind] : suffixes) {
      if (!id.name.ends_with(suffix)) continue;
      bool matches = id.kind == kind ||
                     (kind == ElementKind::Role &&
                      id.kind == ElementKind::AttributeRole) ||
                     (kind == ElementKind::TypeLabel &&
                      id.kind == ElementKind::AttributeType);
      if (!matches) {
        out_.warnings.push_back("'" + id.name + "' carries the '" + suffix +
                                "' suffix but is declared as a " +
                                to_string(id.kind));
      }
      return;
    }
  }

  void try_declare(ElementKind kind, const Name& name) {
    try {
      warn_suffix(out_.db.declare(kind, name.text));
    } catch (const PolicyError& e) {
      semantic(name.span, e.what());
    }
  }

  void declare(const Stmt& stmt) {
    switch (stmt.kind) {
      case Stmt::Kind::ClassForward:
        try_declare(ElementKind::Class, stmt.a);
        break;
      case Stmt::Kind::ClassBlock: {
        try_declare(ElementKind::Class, stmt.a);
        auto cls = out_.db.find(ElementKind::Class, stmt.a.text);
        if (!cls) break;
        for (const auto& perm : stmt.list) {
          try {
            out_.db.declare_permission(*cls, perm.text);
          } catch (const PolicyError& e) {
            semantic(perm.span, e.what());
          }
        }
        break;
      }
      case Stmt::Kind::TypeDecl:
        try_declare(ElementKind::TypeLabel, stmt.a);
        break;
      case Stmt::Kind::AttrDecl:
        try_declare(ElementKind::AttributeType, stmt.a);
        break;
      case Stmt::Kind::RoleDecl:
        // object_r is pre-declared; an explicit declaration is a no-op.
        if (stmt.a.text != "object_r") try_declare(ElementKind::Role, stmt.a);
        break;
      case Stmt::Kind::RoleAttr: {
        // The attribute-role position of `roleattribute` is the only place
        // an attribute role can be introduced; first use declares it.
        bool known = false;
        for (auto kind : kAllElementKinds) {
          if (out_.db.find(kind, stmt.b.text)) known = true;
        }
        if (!known) try_declare(ElementKind::AttributeRole, stmt.b);
        break;
      }
      case Stmt::Kind::UserDecl:
        try_declare(ElementKind::User, stmt.a);
        break;
      default:
        break;
    }
  }

  std::optional<Identifier> lookup(ElementKind kind, const Name& name) {
    auto id = out_.db.find(kind, name.text);
    if (!id) {
      semantic(name.span, std::string("unknown ") + to_string(kind) + " '" +
                              name.text + "'");
    }
    return id;
  }

  std::optional<Identifier> lookup_type_side(const Name& name) {
    if (auto id = out_.db.find(ElementKind::TypeLabel, name.text)) return id;
    if (auto id = out_.db.find(ElementKind::AttributeType, name.text)) return id;
    semantic(name.span, "unknown type or attribute '" + name.text + "'");
    return std::nullopt;
  }

  void link(const Stmt& stmt) {
    switch (stmt.kind) {
      case Stmt::Kind::RoleTypes: {
        auto role = lookup(ElementKind::Role, stmt.a);
        auto type = lookup(ElementKind::TypeLabel, stmt.b);
        if (role && type) out_.db.add_role_type(*role, *type);
        break;
      }
      case Stmt::Kind::RoleAttr: {
        auto role = lookup(ElementKind::Role, stmt.a);
        auto attr = lookup(ElementKind::AttributeRole, stmt.b);
        if (role && attr) out_.db.add_role_attribute(*role, *attr);
        break;
      }
      case Stmt::Kind::TypeAttr: {
        auto type = lookup(ElementKind::TypeLabel, stmt.a);
        auto attr = lookup(ElementKind::AttributeType, stmt.b);
        if (type && attr) out_.db.add_type_attribute(*type, *attr);
        break;
      }
      case Stmt::Kind::Av: {
        auto source = lookup_type_side(stmt.a);
        auto target = lookup_type_side(stmt.b);
        auto cls = lookup(ElementKind::Class, stmt.cls);
        bool good = source && target && cls;
        std::vector<Identifier> perms;
        for (const auto& perm : stmt.list) {
          auto id = out_.db.find(ElementKind::Permission, perm.text);
          if (!id) {
            semantic(perm.span, "unknown permission '" + perm.text + "'");
            good = false;
          } else if (cls && out_.db.permission_class(id->uid) != cls->uid) {
            semantic(perm.span, "permission '" + perm.text +
                                    "' is not declared under class '" +
                                    cls->name + "'");
            good = false;
          } else {
            perms.push_back(*id);
          }
        }
        if (good) {
          out_.db.add_av_rule(
              {stmt.av_kind, *source, *target, *cls, std::move(perms)});
        }
        break;
      }
      case Stmt::Kind::UserDecl: {
        auto user = out_.db.find(ElementKind::User, stmt.a.text);
        for (const auto& role_name : stmt.list) {
          auto role = lookup(ElementKind::Role, role_name);
          if (user && role) out_.db.add_user_role(*user, *role);
        }
        break;
      }
      case Stmt::Kind::Sid: {
        InitialSid sid{stmt.a.text, std::nullopt};
        if (stmt.has_context) {
          auto user = lookup(ElementKind::User, stmt.ctx_user);
          auto role = lookup(ElementKind::Role, stmt.ctx_role);
          auto type = lookup(ElementKind::TypeLabel, stmt.ctx_type);
          if (!(user && role && type)) return;
          sid.context = SecurityContext{*user, *role, *type};
        }
        out_.db.add_initial_sid(std::move(sid));
        break;
      }
      default:
        break;
    }
  }

  const std::vector<Stmt>& stmts_;
  ParseResult& out_;
};

}  // namespace

ParseResult parse_policy(std::string_view input) {
  ParseResult result;
  TokenizeResult lexed = tokenize(input);
  result.errors = std::move(lexed.errors);
  StatementParser parser(std::move(lexed.tokens), result.errors);
  std::vector<Stmt> stmts = parser.run();
  Resolver(stmts, result).run();
  return result;
}

std::string print_policy(const PolicyDb& db) {
  std::ostringstream out;
  const auto& classes = db.names(ElementKind::Class);
  for (std::uint32_t uid = 0; uid < classes.size(); ++uid) {
    auto perms = db.class_permissions(uid);
    if (perms.empty()) {
      out << "class " << classes[uid] << "\n";
    } else {
      out << "class " << classes[uid] << "\n{\n";
      for (const auto& perm : perms) out << "    " << perm.name << "\n";
      out << "}\n";
    }
  }
  for (const auto& sid : db.initial_sids()) {
    out << "sid " << sid.name;
    if (sid.context) {
      out << " " << sid.context->user.name << ":" << sid.context->role.name
          << ":" << sid.context->type.name;
    }
    out << "\n";
  }
  for (const auto& name : db.names(ElementKind::AttributeType)) {
    out << "attribute " << name << ";\n";
  }
  for (const auto& name : db.names(ElementKind::TypeLabel)) {
    out << "type " << name << ";\n";
  }
  const auto& roles = db.names(ElementKind::Role);
  for (std::uint32_t uid = 0; uid < roles.size(); ++uid) {
    if (roles[uid] == "object_r") continue;  // implicit in every policy
    out << "role " << roles[uid] << ";\n";
  }
  for (auto [role, attr] : db.role_attribute_memberships()) {
    out << "roleattribute " << roles[role] << " "
        << db.names(ElementKind::AttributeRole)[attr] << ";\n";
  }
  for (auto [role, type] : db.role_types()) {
    out << "role " << roles[role] << " types "
        << db.names(ElementKind::TypeLabel)[type] << ";\n";
  }
  for (auto [type, attr] : db.type_attribute_memberships()) {
    out << "typeattribute " << db.names(ElementKind::TypeLabel)[type] << " "
        << db.names(ElementKind::AttributeType)[attr] << ";\n";
  }
  for (const auto& rule : db.av_rules()) {
    out << to_string(rule.kind) << " " << rule.source.name << " "
        << rule.target.name << " : " << rule.cls.name << " {";
    for (const auto& perm : rule.permissions) out << " " << perm.name;
    out << " };\n";
  }
  const auto& users = db.names(ElementKind::User);
  for (std::uint32_t uid = 0; uid < users.size(); ++uid) {
    out << "user " << users[uid] << " roles {";
    for (auto [user, role] : db.user_roles()) {
      if (user == uid) out << " " << roles[role];
    }
    out << " };\n";
  }
  return out.str();
}

std::string format_error(const ParseError& error) {
  std::ostringstream out;
  out << error.span.line << ":" << error.span.column << ": ";
  switch (error.kind) {
    case ParseErrorKind::Lex: out << "lex error: "; break;
    case ParseErrorKind::Syntax: out << "syntax error: "; break;
    case ParseErrorKind::Semantic: out << "semantic error: "; break;
  }
  out << error.message;
  return out.str();
}

}  // namespace selsmt
