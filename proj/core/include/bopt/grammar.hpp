#ifndef BOPT_GRAMMAR_HPP
#define BOPT_GRAMMAR_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bopt {

/// Parsed `name` or `name(child,child,...)` expression.
struct SpecTree {
  std::string node;
  std::vector<SpecTree> children;

  bool is_leaf() const noexcept { return children.empty(); }
  friend bool operator==(const SpecTree&, const SpecTree&) = default;
};

enum class ComponentKind { kernel, criterion, surrogate, mean };

struct RegistryEntry {
  std::string_view name;
  ComponentKind kind;
  int min_arity;
  int max_arity;  // -1 for unbounded
  int n_params;   // kernel hyperparameters contributed by a leaf
};

/// Every component name the grammar accepts.
const std::vector<RegistryEntry>& registry();
std::optional<RegistryEntry> lookup(std::string_view name);

/// Parses and validates against the registry.
/// Throws SyntaxError, UnknownIdentifier or ArityError.
SpecTree parse_expression(std::string_view text);

/// Canonical text form: no whitespace, comma-separated children.
std::string render(const SpecTree& tree);

/// Throws UnknownIdentifier if any node of the tree is not of `kind`.
void require_kind(const SpecTree& tree, ComponentKind kind, std::string_view what);

}  // namespace bopt

#endif  // BOPT_GRAMMAR_HPP
