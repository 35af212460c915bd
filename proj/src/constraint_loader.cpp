#include "selsmt/constraint_loader.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace selsmt {

namespace {

struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 1;
  int column = 1;
};

const std::set<std::string_view> kBuiltins = {
    "=",  "distinct", "=>",  "and", "or",  "not", "xor", "ite",
    "+",  "-",        "*",   "div", "mod", "abs", "<=",  "<",
    ">=", ">",        "true", "false",
};

const std::set<std::string_view> kExtraSorts = {"Int", "Bool"};

bool is_numeral(std::string_view text) {
  if (text.empty()) return false;
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

class SExprReader {
 public:
  SExprReader(std::string_view input, std::vector<ConstraintError>& errors)
      : input_(input), errors_(errors) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> forms;
    for (;;) {
      skip_space();
      if (at_end()) break;
      SExpr form;
      if (!read(form)) break;
      forms.push_back(std::move(form));
    }
    return forms;
  }

 private:
  bool at_end() const { return pos_ >= input_.size(); }
  char peek() const { return input_[pos_]; }

  void advance() {
    if (input_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void error(const std::string& message) {
    errors_.push_back({line_, column_, message,
                       ConstraintErrorKind::MalformedSExpression});
  }

  bool read(SExpr& out) {
    skip_space();
    if (at_end()) {
      error("unexpected end of input");
      return false;
    }
    out.line = line_;
    out.column = column_;
    char c = peek();
    if (c == '(') {
      advance();
      out.is_atom = false;
      for (;;) {
        skip_space();
        if (at_end()) {
          error("unbalanced '(' " + where(out));
          return false;
        }
        if (peek() == ')') {
          advance();
          return true;
        }
        SExpr child;
        if (!read(child)) return false;
        out.items.push_back(std::move(child));
      }
    }
    if (c == ')') {
      error("unmatched ')'");
      advance();
      return false;
    }
    out.is_atom = true;
    while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) &&
           peek() != '(' && peek() != ')' && peek() != ';') {
      out.atom += peek();
      advance();
    }
    return true;
  }

  static std::string where(const SExpr& expr) {
    return "opened at " + std::to_string(expr.line) + ":" +
           std::to_string(expr.column);
  }

  std::string_view input_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  std::vector<ConstraintError>& errors_;
};

std::string render_sexpr(const SExpr& expr) {
  if (expr.is_atom) return expr.atom;
  std::string out = "(";
  for (std::size_t i = 0; i < expr.items.size(); ++i) {
    if (i) out += " ";
    out += render_sexpr(expr.items[i]);
  }
  return out + ")";
}

class Validator {
 public:
  Validator(const SymbolMapping& mapping, ConstraintLoadResult& result)
      : mapping_(mapping), result_(result) {}

  void process(const SExpr& form) {
    if (form.is_atom || form.items.empty() || !form.items[0].is_atom) {
      error(form, ConstraintErrorKind::ForbiddenCommand,
            "expected a (declare-const ...) or (assert ...) command");
      return;
    }
    const std::string& head = form.items[0].atom;
    if (head == "declare-const") {
      process_declaration(form);
    } else if (head == "assert") {
      process_assertion(form);
    } else {
      error(form, ConstraintErrorKind::ForbiddenCommand,
            "command '" + head + "' is not allowed in a constraint fragment");
    }
  }

 private:
  void error(const SExpr& at, ConstraintErrorKind kind,
             const std::string& message) {
    result_.errors.push_back({at.line, at.column, message, kind});
  }

  void process_declaration(const SExpr& form) {
    if (form.items.size() != 3 || !form.items[1].is_atom ||
        !form.items[2].is_atom) {
      error(form, ConstraintErrorKind::MalformedSExpression,
            "declare-const takes a symbol and a sort");
      return;
    }
    const std::string& name = form.items[1].atom;
    const std::string& sort = form.items[2].atom;
    const auto& sorts = SymbolMapping::sort_names();
    if (std::find(sorts.begin(), sorts.end(), sort) == sorts.end() &&
        !kExtraSorts.contains(sort)) {
      error(form.items[2], ConstraintErrorKind::UnknownSymbol,
            "unknown sort '" + sort + "'");
      return;
    }
    locals_.insert(name);
    result_.fragment.declarations.push_back(render_sexpr(form));
  }

  void process_assertion(const SExpr& form) {
    if (form.items.size() != 2) {
      error(form, ConstraintErrorKind::MalformedSExpression,
            "assert takes exactly one expression");
      return;
    }
    std::size_t errors_before = result_.errors.size();
    std::set<std::string> bound;
    walk(form.items[1], bound);
    if (result_.errors.size() == errors_before) {
      result_.fragment.assertions.push_back(render_sexpr(form));
    }
  }

  bool known_symbol(const std::string& name,
                    const std::set<std::string>& bound) const {
    if (bound.contains(name) || locals_.contains(name)) return true;
    if (kBuiltins.contains(name) || is_numeral(name)) return true;
    const auto& functions = SymbolMapping::function_names();
    if (std::find(functions.begin(), functions.end(), name) !=
        functions.end()) {
      return true;
    }
    return mapping_.contains_symbol(name);
  }

  void reference(const SExpr& atom, const std::set<std::string>& bound) {
    const std::string& name = atom.atom;
    if (known_symbol(name, bound)) {
      if (!kBuiltins.contains(name) && !is_numeral(name)) {
        result_.fragment.referenced_symbols.insert(name);
      }
      return;
    }
    error(atom, ConstraintErrorKind::UnknownSymbol,
          "unknown symbol '" + name + "'");
  }

  // Reads a ((name Sort) ...) binder list, returning the bound names.
  bool read_binders(const SExpr& binders, std::set<std::string>& names) {
    if (binders.is_atom) return false;
    for (const auto& binder : binders.items) {
      if (binder.is_atom || binder.items.size() != 2 ||
          !binder.items[0].is_atom || !binder.items[1].is_atom) {
        return false;
      }
      const std::string& sort = binder.items[1].atom;
      const auto& sorts = SymbolMapping::sort_names();
      if (std::find(sorts.begin(), sorts.end(), sort) == sorts.end() &&
          !kExtraSorts.contains(sort)) {
        error(binder.items[1], ConstraintErrorKind::UnknownSymbol,
              "unknown sort '" + sort + "'");
        return false;
      }
      names.insert(binder.items[0].atom);
    }
    return true;
  }

  void walk(const SExpr& expr, std::set<std::string>& bound) {
    if (expr.is_atom) {
      reference(expr, bound);
      return;
    }
    if (expr.items.empty()) {
      error(expr, ConstraintErrorKind::MalformedSExpression,
            "empty application");
      return;
    }
    const SExpr& head = expr.items[0];
    if (head.is_atom && (head.atom == "forall" || head.atom == "exists")) {
      if (expr.items.size() != 3) {
        error(expr, ConstraintErrorKind::MalformedSExpression,
              head.atom + " takes a binder list and a body");
        return;
      }
      std::set<std::string> inner = bound;
      if (!read_binders(expr.items[1], inner)) {
        error(expr.items[1], ConstraintErrorKind::MalformedSExpression,
              "malformed binder list");
        return;
      }
      walk(expr.items[2], inner);
      return;
    }
    if (head.is_atom && head.atom == "let") {
      if (expr.items.size() != 3 || expr.items[1].is_atom) {
        error(expr, ConstraintErrorKind::MalformedSExpression,
              "let takes a binding list and a body");
        return;
      }
      std::set<std::string> inner = bound;
      for (const auto& binding : expr.items[1].items) {
        if (binding.is_atom || binding.items.size() != 2 ||
            !binding.items[0].is_atom) {
          error(binding, ConstraintErrorKind::MalformedSExpression,
                "malformed let binding");
          return;
        }
        walk(binding.items[1], bound);
        inner.insert(binding.items[0].atom);
      }
      walk(expr.items[2], inner);
      return;
    }
    if (head.is_atom && head.atom == "!") {
      // Annotation: validate the annotated term, ignore the attributes.
      if (expr.items.size() >= 2) walk(expr.items[1], bound);
      return;
    }
    for (const auto& item : expr.items) walk(item, bound);
  }

  const SymbolMapping& mapping_;
  ConstraintLoadResult& result_;
  std::set<std::string> locals_;
};

}  // namespace

std::string ConstraintFragment::render() const {
  std::ostringstream out;
  for (const auto& command : declarations) out << command << "\n";
  for (const auto& command : assertions) out << command << "\n";
  return out.str();
}

ConstraintLoadResult load_constraints(std::string_view input,
                                      const SymbolMapping& mapping) {
  ConstraintLoadResult result;
  SExprReader reader(input, result.errors);
  std::vector<SExpr> forms = reader.read_all();
  if (!result.errors.empty()) return result;
  Validator validator(mapping, result);
  // Declarations may appear after the assertions that use them; admit
  // symbols first, then validate assertion bodies.
  for (const auto& form : forms) {
    if (!form.is_atom && form.items.size() == 3 && form.items[0].is_atom &&
        form.items[0].atom == "declare-const") {
      validator.process(form);
    }
  }
  for (const auto& form : forms) {
    if (!form.is_atom && form.items.size() == 3 && form.items[0].is_atom &&
        form.items[0].atom == "declare-const") {
      continue;
    }
    validator.process(form);
  }
  return result;
}

std::string format_error(const ConstraintError& error) {
  std::ostringstream out;
  out << error.line << ":" << error.column << ": ";
  switch (error.kind) {
    case ConstraintErrorKind::MalformedSExpression:
      out << "malformed s-expression: ";
      break;
    case ConstraintErrorKind::ForbiddenCommand:
      out << "forbidden command: ";
      break;
    case ConstraintErrorKind::UnknownSymbol:
      out << "unknown symbol: ";
      break;
  }
  out << error.message;
  return out.str();
}

}  // namespace selsmt
