#pragma once

// Spatial decision trees: classification, rule extraction, rendering and the
// SDT v1 / SDR v1 text formats.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdt/logic.hpp"
#include "sdt/model.hpp"
#include "sdt/stats.hpp"

namespace sdt {

struct Node {
  std::optional<Decision> decision;  // absent for leaves
  std::size_t label = 0;             // majority class of `counts`
  ClassCounts counts;                // training histogram at this node
  StopReason stop = StopReason::None;
  double gain = 0.0;
  std::unique_ptr<Node> yes;
  std::unique_ptr<Node> no;

  bool is_leaf() const noexcept { return !decision.has_value(); }

  static std::unique_ptr<Node> leaf(std::size_t label, ClassCounts counts, StopReason stop);
  static std::unique_ptr<Node> internal(Decision d, ClassCounts counts, double gain, std::unique_ptr<Node> yes,
                                        std::unique_ptr<Node> no);
};

class SpatialDecisionTree {
 public:
  SpatialDecisionTree(std::unique_ptr<Node> root, std::vector<std::string> classes, std::size_t n_attributes,
                      R0Policy r0 = CenterPixel{});

  SpatialDecisionTree(const SpatialDecisionTree& other);
  SpatialDecisionTree& operator=(const SpatialDecisionTree& other);
  SpatialDecisionTree(SpatialDecisionTree&&) noexcept = default;
  SpatialDecisionTree& operator=(SpatialDecisionTree&&) noexcept = default;

  const Node& root() const noexcept { return *root_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t n_attributes() const noexcept { return n_attributes_; }
  const R0Policy& r0() const noexcept { return r0_; }

  std::size_t node_count() const;
  std::size_t leaf_count() const;
  std::size_t depth() const;

  friend bool operator==(const SpatialDecisionTree& a, const SpatialDecisionTree& b);

 private:
  std::unique_ptr<Node> root_;
  std::vector<std::string> classes_;
  std::size_t n_attributes_;
  R0Policy r0_;
};

/// Structural equality: decisions, labels, counts, stop reasons and gains.
bool same_structure(const Node& a, const Node& b);

/// Descends from refs = {r0}: the yes-branch continues with new_refs, the
/// no-branch with the refs unchanged.
std::size_t classify(const SpatialDecisionTree& tree, const SpatialInstance& inst, const HyperRectangle& r0);
/// Same with r0 resolved from the tree's policy.
std::size_t classify(const SpatialDecisionTree& tree, const SpatialInstance& inst);

// ---------------------------------------------------------------------------
// Rules

struct Literal {
  Decision decision;
  bool positive = true;  // true on the yes-branch

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Rule {
  std::vector<Literal> antecedent;
  std::size_t consequent = 0;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// One rule per leaf in pre-order (yes before no).
std::vector<Rule> extract_rules(const SpatialDecisionTree& tree);

/// Walks the antecedent like classify; true iff every literal takes the
/// recorded branch.
bool rule_matches(const Rule& rule, const SpatialInstance& inst, const HyperRectangle& r0);

/// Nested display: "[NTPP⁻¹](A₄₃ <₀.₂ 1978) ∧ ⟨EC⟩(A₈₃ ≥ 638 ∧ A₆ ≤ 1625) ⇒ C₂".
/// Literals after a satisfied modality are written inside its scope.
std::string rule_formula(const Rule& rule);

// ---------------------------------------------------------------------------
// Rendering and serialization

enum class RenderFormat { Text, Dot, Rules };

RenderFormat parse_render_format(std::string_view name);  // "text", "dot", "rules"
std::string render(const SpatialDecisionTree& tree, RenderFormat format);

/// Rules in the SDR v1 format, as produced by render(tree, Rules).
std::vector<Rule> parse_rules(std::string_view text);

/// SDT v1: a versioned, indented, pre-order text form that round-trips.
std::string write_tree(const SpatialDecisionTree& tree);
SpatialDecisionTree read_tree(std::string_view text);

void save_tree(const SpatialDecisionTree& tree, const std::string& path);
SpatialDecisionTree load_tree(const std::string& path);

}  // namespace sdt
