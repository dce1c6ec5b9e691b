#include "bopt/grammar.hpp"

#include <cctype>

#include "bopt/errors.hpp"

namespace bopt {

const std::vector<RegistryEntry>& registry() {
  using K = ComponentKind;
  static const std::vector<RegistryEntry> entries = {
      {"kMaternISO1", K::kernel, 0, 0, 1},
      {"kMaternISO3", K::kernel, 0, 0, 1},
      {"kMaternISO5", K::kernel, 0, 0, 1},
      {"kSEISO", K::kernel, 0, 0, 1},
      {"kRQISO", K::kernel, 0, 0, 2},
      {"kConst", K::kernel, 0, 0, 1},
      {"kSum", K::kernel, 2, 2, 0},
      {"kProd", K::kernel, 2, 2, 0},
      {"cEI", K::criterion, 0, 0, 0},
      {"cLCB", K::criterion, 0, 0, 0},
      {"cPOI", K::criterion, 0, 0, 0},
      {"cThompsonSampling", K::criterion, 0, 0, 0},
      {"cHedge", K::criterion, 2, -1, 0},
      {"sGaussianProcess", K::surrogate, 0, 0, 0},
      {"sStudentTProcessNIG", K::surrogate, 0, 0, 0},
      {"mZero", K::mean, 0, 0, 0},
      {"mConst", K::mean, 0, 0, 0},
      {"mLinear", K::mean, 0, 0, 0},
  };
  return entries;
}

std::optional<RegistryEntry> lookup(std::string_view name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  return std::nullopt;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SpecTree parse() {
    skip_ws();
    SpecTree tree = parse_node();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected trailing input");
    return tree;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg + " at offset " + std::to_string(pos_) + " in '" +
                      std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  std::string identifier() {
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_])))
      fail("expected identifier");
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  SpecTree parse_node() {
    SpecTree tree{identifier(), {}};
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      while (true) {
        skip_ws();
        tree.children.push_back(parse_node());
        skip_ws();
        if (pos_ >= text_.size()) fail("unbalanced parentheses");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
    }
    validate(tree);
    return tree;
  }

  static void validate(const SpecTree& tree) {
    auto entry = lookup(tree.node);
    if (!entry) throw UnknownIdentifier("unknown component '" + tree.node + "'");
    const int n = static_cast<int>(tree.children.size());
    if (n < entry->min_arity || (entry->max_arity >= 0 && n > entry->max_arity))
      throw ArityError("'" + tree.node + "' does not accept " + std::to_string(n) +
                       " argument(s)");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SpecTree parse_expression(std::string_view text) {
  if (text.empty()) throw SyntaxError("empty expression");
  for (char c : text)
    if (static_cast<unsigned char>(c) > 127) throw SyntaxError("non-ASCII character in expression");
  return Parser(text).parse();
}

std::string render(const SpecTree& tree) {
  std::string out = tree.node;
  if (!tree.children.empty()) {
    out += '(';
    for (std::size_t i = 0; i < tree.children.size(); ++i) {
      if (i) out += ',';
      out += render(tree.children[i]);
    }
    out += ')';
  }
  return out;
}

void require_kind(const SpecTree& tree, ComponentKind kind, std::string_view what) {
  auto entry = lookup(tree.node);
  if (!entry || entry->kind != kind)
    throw UnknownIdentifier("'" + tree.node + "' is not a " + std::string(what));
  for (const auto& child : tree.children) require_kind(child, kind, what);
}

}  // namespace bopt
