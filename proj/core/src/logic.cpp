#include "sdt/logic.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

#include "sdt/oracle.hpp"

namespace sdt {

namespace {

constexpr std::array<std::string_view, 4> kFragmentNames = {"HS2_FULL", "HS2_RCC8", "HS2_RCC5",
                                                             "PROPOSITIONAL"};

constexpr std::array<std::string_view, 6> kCmpAscii = {"<", "<=", "=", "!=", ">=", ">"};
constexpr std::array<std::string_view, 6> kCmpDisplay = {"<", "≤", "=", "≠", "≥", ">"};

constexpr std::array<std::string_view, 8> kRccAscii = {"DC", "EC", "PO", "TPP", "NTPP", "TPPi", "NTPPi", "EQ"};
constexpr std::array<std::string_view, 8> kRccDisplay = {"DC",    "EC",     "PO",      "TPP",
                                                         "NTPP",  "TPP⁻¹", "NTPP⁻¹", "EQ"};

std::string subscript(std::string_view text) {
  static constexpr std::array<std::string_view, 10> digits = {"₀", "₁", "₂", "₃", "₄",
                                                              "₅", "₆", "₇", "₈", "₉"};
  std::string out;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      out += digits[static_cast<std::size_t>(c - '0')];
    } else {
      out += c;
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Registry {
  std::vector<OperatorRef> full;
  std::vector<OperatorRef> rcc8;
  std::vector<OperatorRef> rcc5;
  std::vector<OperatorRef> none;
};

OperatorRef make_derived(std::string name, std::string display, std::vector<RelationTuple> tuples) {
  std::sort(tuples.begin(), tuples.end());
  tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
  auto op = std::make_shared<OperatorSpec>();
  op->name = std::move(name);
  op->display = std::move(display);
  op->derived = true;
  op->tuples = std::move(tuples);
  return op;
}

Registry build_registry() {
  Registry reg;
  for (const RelationTuple& t : all_relation_tuples(2)) {
    if (t.is_equality()) continue;
    auto op = std::make_shared<OperatorSpec>();
    op->name = t.name();
    // Shown inside angle or square brackets, so drop the parentheses.
    const std::string shown = t.display();
    op->display = shown.substr(1, shown.size() - 2);
    op->tuples = {t};
    reg.full.push_back(std::move(op));
  }

  const GridBounds grid{4, 4};
  std::array<std::vector<RelationTuple>, 8> sets;
  for (Rcc8 rel : kRcc8Relations) sets[static_cast<std::size_t>(rel)] = derive_rcc8_tuples(rel, grid);
  for (Rcc8 rel : kRcc8Relations) {
    if (rel == Rcc8::EQ) continue;
    reg.rcc8.push_back(make_derived(std::string(ascii_name(rel)), std::string(display_name(rel)),
                                    sets[static_cast<std::size_t>(rel)]));
  }

  auto join = [&](std::initializer_list<Rcc8> parts) {
    std::vector<RelationTuple> out;
    for (Rcc8 p : parts) {
      const auto& s = sets[static_cast<std::size_t>(p)];
      out.insert(out.end(), s.begin(), s.end());
    }
    return out;
  };
  reg.rcc5.push_back(make_derived("DR", "DR", join({Rcc8::DC, Rcc8::EC})));
  reg.rcc5.push_back(make_derived("PO", "PO", join({Rcc8::PO})));
  reg.rcc5.push_back(make_derived("PP", "PP", join({Rcc8::TPP, Rcc8::NTPP})));
  reg.rcc5.push_back(make_derived("PPi", "PP⁻¹", join({Rcc8::TPPi, Rcc8::NTPPi})));
  return reg;
}

const Registry& registry() {
  static const Registry reg = build_registry();
  return reg;
}

std::string literal_body(const Decision& d, Comparator cmp, const std::optional<Ratio>& sub) {
  std::string out = "A" + subscript(std::to_string(d.attribute + 1)) + " ";
  out += display_symbol(cmp);
  if (sub) out += subscript(sub->to_string());
  out += " ";
  out += format_threshold(d.threshold);
  return out;
}

}  // namespace

std::string_view fragment_name(Fragment f) noexcept { return kFragmentNames[static_cast<std::size_t>(f)]; }

std::optional<Fragment> parse_fragment(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kFragmentNames.size(); ++i) {
    if (kFragmentNames[i] == text) return static_cast<Fragment>(i);
  }
  return std::nullopt;
}

std::string_view ascii_symbol(Comparator c) noexcept { return kCmpAscii[static_cast<std::size_t>(c)]; }
std::string_view display_symbol(Comparator c) noexcept { return kCmpDisplay[static_cast<std::size_t>(c)]; }

std::optional<Comparator> parse_comparator(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kCmpAscii.size(); ++i) {
    if (kCmpAscii[i] == text || kCmpDisplay[i] == text) return static_cast<Comparator>(i);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num < 0) throw InvalidArgument(fmt::format("invalid ratio {}/{}", num, den));
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::string Ratio::to_string() const {
  std::int64_t scale = 1;
  int places = 0;
  while (scale % den_ != 0 && places < 18) {
    scale *= 10;
    ++places;
  }
  if (scale % den_ != 0) return fmt::format("{}/{}", num_, den_);
  const std::int64_t scaled = num_ * (scale / den_);
  if (places == 0) return std::to_string(scaled);
  std::string frac = fmt::format("{:0{}}", scaled % scale, places);
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  return fmt::format("{}.{}", scaled / scale, frac);
}

std::optional<Ratio> Ratio::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto n = parse_int(text.substr(0, slash));
    const auto d = parse_int(text.substr(slash + 1));
    if (!n || !d || *n < 0 || *d <= 0) return std::nullopt;
    return Ratio(*n, *d);
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) return std::nullopt;
  if (frac.size() > 15) return std::nullopt;
  for (char c : frac) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  std::int64_t w = 0;
  if (!whole.empty()) {
    const auto v = parse_int(whole);
    if (!v || *v < 0 || whole.front() == '+' || whole.front() == '-') return std::nullopt;
    w = *v;
  }
  std::int64_t den = 1;
  std::int64_t f = 0;
  for (char c : frac) {
    den *= 10;
    f = f * 10 + (c - '0');
  }
  return Ratio(w * den + f, den);
}

Gamma::Gamma(Ratio value) : value_(value) {
  if (value_.num() == 0 || value_.num() > value_.den()) {
    throw InvalidArgument("gamma must lie in (0, 1], got " + value_.to_string());
  }
}

std::optional<Gamma> Gamma::parse(std::string_view text) {
  const auto r = Ratio::parse(text);
  if (!r || r->num() == 0 || r->num() > r->den()) return std::nullopt;
  return Gamma(*r);
}

// ---------------------------------------------------------------------------

std::string_view ascii_name(Rcc8 r) noexcept { return kRccAscii[static_cast<std::size_t>(r)]; }
std::string_view display_name(Rcc8 r) noexcept { return kRccDisplay[static_cast<std::size_t>(r)]; }

const std::vector<OperatorRef>& operator_set(Fragment fragment) {
  const Registry& reg = registry();
  switch (fragment) {
    case Fragment::HS2Full: return reg.full;
    case Fragment::RCC8: return reg.rcc8;
    case Fragment::RCC5: return reg.rcc5;
    case Fragment::Propositional: return reg.none;
  }
  return reg.none;
}

const std::vector<RelationTuple>& expand_operator(const OperatorSpec& op) { return op.tuples; }

OperatorRef find_operator(std::string_view name) {
  for (Fragment f : {Fragment::HS2Full, Fragment::RCC8, Fragment::RCC5}) {
    for (const OperatorRef& op : operator_set(f)) {
      if (op->name == name) return op;
    }
  }
  return nullptr;
}

std::vector<RelationTuple> derive_rcc8_tuples(Rcc8 rel, const GridBounds& bounds) {
  const auto rects = enumerate_rectangles(bounds);
  std::set<RelationTuple> seen;
  for (const auto& r : rects) {
    for (const auto& s : rects) {
      if (r == s) continue;
      if (oracle::rcc8_classify(s, r) == rel) seen.insert(classify_pair(r, s));
    }
  }
  if (rel == Rcc8::EQ) seen.insert(RelationTuple::equality(bounds.dims()));
  return {seen.begin(), seen.end()};
}

// ---------------------------------------------------------------------------

bool operator==(const Decision& a, const Decision& b) noexcept {
  if (a.is_modal() != b.is_modal()) return false;
  if (a.is_modal() && a.op->name != b.op->name) return false;
  return a.attribute == b.attribute && a.cmp == b.cmp && a.threshold == b.threshold && a.gamma == b.gamma;
}

std::string format_threshold(double value) { return fmt::format("{}", value); }

std::string to_text(const Decision& d) {
  std::string out;
  if (d.is_modal()) out = d.op->name + " ";
  out += fmt::format("ATTR_{} {}", d.attribute + 1, ascii_symbol(d.cmp));
  if (!d.gamma.is_one()) out += "_" + d.gamma.to_string();
  out += " " + format_threshold(d.threshold);
  return out;
}

Decision parse_decision(std::string_view text) {
  std::vector<std::string_view> tokens;
  text = trim(text);
  while (!text.empty()) {
    std::size_t end = 0;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    tokens.push_back(text.substr(0, end));
    text = trim(text.substr(end));
  }
  auto fail = [&](std::string_view why) -> ParseError {
    return ParseError(fmt::format("bad decision '{}': {}", fmt::join(tokens, " "), why));
  };
  if (tokens.size() != 3 && tokens.size() != 4) throw fail("expected 3 or 4 fields");

  Decision d;
  std::size_t i = 0;
  if (tokens.size() == 4) {
    d.op = find_operator(tokens[0]);
    if (!d.op) throw fail("unknown operator");
    i = 1;
  }
  const std::string_view attr = tokens[i];
  if (attr.substr(0, 5) != "ATTR_") throw fail("expected ATTR_<i>");
  const auto index = parse_int(attr.substr(5));
  if (!index || *index < 1) throw fail("attribute index must be >= 1");
  d.attribute = static_cast<std::size_t>(*index - 1);

  std::string_view cmp = tokens[i + 1];
  if (const auto us = cmp.find('_'); us != std::string_view::npos) {
    const auto g = Gamma::parse(cmp.substr(us + 1));
    if (!g) throw fail("gamma must lie in (0, 1]");
    d.gamma = *g;
    cmp = cmp.substr(0, us);
  }
  const auto c = parse_comparator(cmp);
  if (!c) throw fail("unknown comparator");
  d.cmp = *c;

  const std::string_view th = tokens[i + 2];
  const auto [ptr, ec] = std::from_chars(th.data(), th.data() + th.size(), d.threshold);
  if (ec != std::errc() || ptr != th.data() + th.size()) throw fail("bad threshold");
  return d;
}

std::string display_body(const Decision& d) {
  const std::optional<Ratio> sub =
      d.gamma.is_one() ? std::nullopt : std::optional<Ratio>(d.gamma.value());
  return literal_body(d, d.cmp, sub);
}

std::string display(const Decision& d) {
  const std::string body = display_body(d);
  if (!d.is_modal()) return body;
  return "⟨" + d.op->display + "⟩(" + body + ")";
}

std::string negate_decision_display(const Decision& d) {
  std::optional<Ratio> sub;
  if (!d.gamma.is_one()) {
    const Ratio& g = d.gamma.value();
    sub = Ratio(g.den() - g.num(), g.den());
  }
  const std::string body = literal_body(d, complement(d.cmp), sub);
  if (!d.is_modal()) return body;
  return "[" + d.op->display + "](" + body + ")";
}

}  // namespace sdt
