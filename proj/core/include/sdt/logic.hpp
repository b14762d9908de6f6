#pragma once

// Decision language: modal operators of HS^2 and its RCC8/RCC5 fragments,
// comparators, gamma fractions, and decisions with their textual forms.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdt/geometry.hpp"

namespace sdt {

enum class Fragment : std::uint8_t { HS2Full, RCC8, RCC5, Propositional };

std::string_view fragment_name(Fragment f) noexcept;  // "HS2_FULL", "HS2_RCC8", ...
std::optional<Fragment> parse_fragment(std::string_view text) noexcept;

// ---------------------------------------------------------------------------

/// Comparators in their canonical candidate order.
enum class Comparator : std::uint8_t { Lt, Le, Eq, Ne, Ge, Gt };

inline constexpr std::array<Comparator, 6> kComparators = {
    Comparator::Lt, Comparator::Le, Comparator::Eq, Comparator::Ne, Comparator::Ge, Comparator::Gt};

/// The comparator whose truth is the negation: < vs >=, <= vs >, = vs !=.
constexpr Comparator complement(Comparator c) noexcept {
  switch (c) {
    case Comparator::Lt: return Comparator::Ge;
    case Comparator::Le: return Comparator::Gt;
    case Comparator::Eq: return Comparator::Ne;
    case Comparator::Ne: return Comparator::Eq;
    case Comparator::Ge: return Comparator::Lt;
    case Comparator::Gt: return Comparator::Le;
  }
  return c;
}

constexpr bool compare(double value, Comparator c, double threshold) noexcept {
  switch (c) {
    case Comparator::Lt: return value < threshold;
    case Comparator::Le: return value <= threshold;
    case Comparator::Eq: return value == threshold;
    case Comparator::Ne: return value != threshold;
    case Comparator::Ge: return value >= threshold;
    case Comparator::Gt: return value > threshold;
  }
  return false;
}

std::string_view ascii_symbol(Comparator c) noexcept;    // "<=", ">=", "!=", ...
std::string_view display_symbol(Comparator c) noexcept;  // "≤", "≥", "≠", ...
std::optional<Comparator> parse_comparator(std::string_view text) noexcept;

// ---------------------------------------------------------------------------

/// Non-negative rational number with a reduced representation.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double as_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Decimal form when exact ("0.8", "1"), otherwise "num/den".
  std::string to_string() const;
  /// Accepts "0.75", "1", "3/4".
  static std::optional<Ratio> parse(std::string_view text);

  friend bool operator==(const Ratio&, const Ratio&) = default;
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) noexcept {
    return (a.num_ * b.den_) <=> (b.num_ * a.den_);
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Satisfaction fraction threshold, a rational in (0, 1].
class Gamma {
 public:
  Gamma() = default;
  explicit Gamma(Ratio value);
  Gamma(std::int64_t num, std::int64_t den) : Gamma(Ratio(num, den)) {}

  static Gamma one() { return Gamma(); }
  static std::optional<Gamma> parse(std::string_view text);

  const Ratio& value() const noexcept { return value_; }
  bool is_one() const noexcept { return value_.num() == value_.den(); }
  std::string to_string() const { return value_.to_string(); }

  /// True iff count/total >= gamma, evaluated exactly.
  bool satisfied(std::int64_t count, std::int64_t total) const noexcept {
    return count * value_.den() >= value_.num() * total;
  }
  /// Smallest count k with k/total >= gamma.
  std::int64_t min_count(std::int64_t total) const noexcept {
    const std::int64_t p = value_.num() * total;
    return (p + value_.den() - 1) / value_.den();
  }

  friend bool operator==(const Gamma&, const Gamma&) = default;
  friend auto operator<=>(const Gamma& a, const Gamma& b) noexcept { return a.value_ <=> b.value_; }

 private:
  Ratio value_{1, 1};
};

// ---------------------------------------------------------------------------
// Modal operators

enum class Rcc8 : std::uint8_t { DC, EC, PO, TPP, NTPP, TPPi, NTPPi, EQ };

inline constexpr std::array<Rcc8, 8> kRcc8Relations = {Rcc8::DC,  Rcc8::EC,   Rcc8::PO,    Rcc8::TPP,
                                                       Rcc8::NTPP, Rcc8::TPPi, Rcc8::NTPPi, Rcc8::EQ};

std::string_view ascii_name(Rcc8 r) noexcept;    // "NTPPi"
std::string_view display_name(Rcc8 r) noexcept;  // "NTPP⁻¹"

/// A modal operator: either one relation tuple or a named union of tuples.
struct OperatorSpec {
  std::string name;     // stable ASCII name: "(A,=)", "NTPPi", "PP"
  std::string display;  // "Ā,=", "NTPP⁻¹" (placed inside ⟨⟩ or [])
  bool derived = false;
  std::vector<RelationTuple> tuples;  // sorted, never contains the all-equality tuple
};

using OperatorRef = std::shared_ptr<const OperatorSpec>;

/// Operators of a fragment in canonical order: HS2_FULL lists the 168 tuples
/// in lexicographic order; HS2_RCC8 is DC, EC, PO, TPP, NTPP, TPPi, NTPPi;
/// HS2_RCC5 is DR, PO, PP, PPi; PROPOSITIONAL is empty.
const std::vector<OperatorRef>& operator_set(Fragment fragment);

/// Tuple set of an operator (a singleton for direct operators).
const std::vector<RelationTuple>& expand_operator(const OperatorSpec& op);

/// Looks an operator up by its ASCII name across all fragments.
OperatorRef find_operator(std::string_view name);

/// Tuples t = classify_pair(r, s) over all ordered pairs of distinct
/// rectangles of `bounds` for which the topological classifier reports
/// rcc8_classify(s, r) == rel, i.e. rel names the accessed rectangle's
/// relation to the reference. Sorted.
std::vector<RelationTuple> derive_rcc8_tuples(Rcc8 rel, const GridBounds& bounds);

// ---------------------------------------------------------------------------
// Decisions

/// Propositional (A cmp_gamma a) or modal <op>(A cmp_gamma a) test.
struct Decision {
  OperatorRef op;  // null for propositional decisions
  std::size_t attribute = 0;
  Comparator cmp = Comparator::Le;
  double threshold = 0.0;
  Gamma gamma;

  bool is_modal() const noexcept { return op != nullptr; }

  friend bool operator==(const Decision& a, const Decision& b) noexcept;
};

/// Shortest decimal that round-trips through strtod.
std::string format_threshold(double value);

/// Stable ASCII syntax: `<REL>? ATTR_<i> <cmp>[_<gamma>] <threshold>` with a
/// 1-based attribute and gamma omitted when 1. E.g. "NTPPi ATTR_43 >=_0.8 1978".
std::string to_text(const Decision& d);
/// Inverse of to_text; throws ParseError.
Decision parse_decision(std::string_view text);

/// Human-readable form used on yes-edges: "⟨NTPP⁻¹⟩(A₄₃ ≥₀.₈ 1978)".
std::string display(const Decision& d);

/// The literal alone without its modality: "A₄₃ ≥₀.₈ 1978".
std::string display_body(const Decision& d);

/// Dual form used on no-edges: "[NTPP⁻¹](A₄₃ <₀.₂ 1978)". The subscript is
/// 1 - gamma read as "strictly more than"; it is omitted when gamma is 1.
std::string negate_decision_display(const Decision& d);

}  // namespace sdt
