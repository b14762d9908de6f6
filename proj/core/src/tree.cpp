#include "sdt/tree.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace sdt {

std::unique_ptr<Node> Node::leaf(std::size_t label, ClassCounts counts, StopReason stop) {
  auto n = std::make_unique<Node>();
  n->label = label;
  n->counts = std::move(counts);
  n->stop = stop;
  return n;
}

std::unique_ptr<Node> Node::internal(Decision d, ClassCounts counts, double gain, std::unique_ptr<Node> yes,
                                     std::unique_ptr<Node> no) {
  if (!yes || !no) throw InvalidArgument("internal nodes need both children");
  auto n = std::make_unique<Node>();
  n->decision = std::move(d);
  n->label = counts.majority();
  n->counts = std::move(counts);
  n->gain = gain;
  n->yes = std::move(yes);
  n->no = std::move(no);
  return n;
}

namespace {

std::unique_ptr<Node> clone(const Node& n) {
  auto c = std::make_unique<Node>();
  c->decision = n.decision;
  c->label = n.label;
  c->counts = n.counts;
  c->stop = n.stop;
  c->gain = n.gain;
  if (n.yes) c->yes = clone(*n.yes);
  if (n.no) c->no = clone(*n.no);
  return c;
}

template <class F>
void visit(const Node& n, F&& f) {
  f(n);
  if (!n.is_leaf()) {
    visit(*n.yes, f);
    visit(*n.no, f);
  }
}

std::string subscript_number(std::size_t v) {
  static constexpr std::string_view digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  std::string out;
  for (char c : std::to_string(v)) out += digits[c - '0'];
  return out;
}

std::string class_symbol(std::size_t c) { return "C" + subscript_number(c + 1); }

std::string counts_text(const ClassCounts& c) { return fmt::format("{}", fmt::join(c.counts(), " ")); }

}  // namespace

SpatialDecisionTree::SpatialDecisionTree(std::unique_ptr<Node> root, std::vector<std::string> classes,
                                         std::size_t n_attributes, R0Policy r0)
    : root_(std::move(root)), classes_(std::move(classes)), n_attributes_(n_attributes), r0_(std::move(r0)) {
  if (!root_) throw InvalidArgument("tree needs a root");
  visit(*root_, [&](const Node& n) {
    if (n.label >= classes_.size()) throw InvalidArgument("node label out of range");
    if (n.decision && n.decision->attribute >= n_attributes_) throw InvalidArgument("attribute out of range");
  });
}

SpatialDecisionTree::SpatialDecisionTree(const SpatialDecisionTree& other)
    : root_(clone(*other.root_)), classes_(other.classes_), n_attributes_(other.n_attributes_), r0_(other.r0_) {}

SpatialDecisionTree& SpatialDecisionTree::operator=(const SpatialDecisionTree& other) {
  if (this != &other) *this = SpatialDecisionTree(other);
  return *this;
}

std::size_t SpatialDecisionTree::node_count() const {
  std::size_t n = 0;
  visit(*root_, [&](const Node&) { ++n; });
  return n;
}

std::size_t SpatialDecisionTree::leaf_count() const {
  std::size_t n = 0;
  visit(*root_, [&](const Node& node) { n += node.is_leaf() ? 1 : 0; });
  return n;
}

std::size_t SpatialDecisionTree::depth() const {
  auto rec = [](auto& self, const Node& n) -> std::size_t {
    if (n.is_leaf()) return 0;
    return 1 + std::max(self(self, *n.yes), self(self, *n.no));
  };
  return rec(rec, *root_);
}

bool same_structure(const Node& a, const Node& b) {
  if (a.decision != b.decision || a.label != b.label || !(a.counts == b.counts) || a.stop != b.stop ||
      a.gain != b.gain) {
    return false;
  }
  if (a.is_leaf()) return true;
  return same_structure(*a.yes, *b.yes) && same_structure(*a.no, *b.no);
}

bool operator==(const SpatialDecisionTree& a, const SpatialDecisionTree& b) {
  return a.classes_ == b.classes_ && a.n_attributes_ == b.n_attributes_ &&
         r0_policy_name(a.r0_) == r0_policy_name(b.r0_) && same_structure(*a.root_, *b.root_);
}

// ---------------------------------------------------------------------------

std::size_t classify(const SpatialDecisionTree& tree, const SpatialInstance& inst, const HyperRectangle& r0) {
  inst.bounds().require(r0);
  AnchoredInstance cur{std::shared_ptr<const SpatialInstance>(&inst, [](const SpatialInstance*) {}), {r0}};
  const Node* n = &tree.root();
  while (!n->is_leaf()) {
    auto refs = new_refs(cur, *n->decision);
    if (refs.empty()) {
      n = n->no.get();
    } else {
      cur.refs = std::move(refs);
      n = n->yes.get();
    }
  }
  return n->label;
}

std::size_t classify(const SpatialDecisionTree& tree, const SpatialInstance& inst) {
  return classify(tree, inst, resolve_r0(tree.r0(), inst.bounds()));
}

std::vector<Rule> extract_rules(const SpatialDecisionTree& tree) {
  std::vector<Rule> out;
  std::vector<Literal> path;
  auto rec = [&](auto& self, const Node& n) -> void {
    if (n.is_leaf()) {
      out.push_back(Rule{path, n.label});
      return;
    }
    path.push_back({*n.decision, true});
    self(self, *n.yes);
    path.back().positive = false;
    self(self, *n.no);
    path.pop_back();
  };
  rec(rec, tree.root());
  return out;
}

bool rule_matches(const Rule& rule, const SpatialInstance& inst, const HyperRectangle& r0) {
  AnchoredInstance cur{std::shared_ptr<const SpatialInstance>(&inst, [](const SpatialInstance*) {}), {r0}};
  for (const Literal& lit : rule.antecedent) {
    auto refs = new_refs(cur, lit.decision);
    if (refs.empty() == lit.positive) return false;
    if (lit.positive) cur.refs = std::move(refs);
  }
  return true;
}

std::string rule_formula(const Rule& rule) {
  const auto& lits = rule.antecedent;
  auto rec = [&](auto& self, std::size_t i) -> std::string {
    const Literal& lit = lits[i];
    const bool last = i + 1 == lits.size();
    if (lit.positive && lit.decision.is_modal()) {
      std::string inner = display_body(lit.decision);
      if (!last) inner += " ∧ " + self(self, i + 1);
      return "⟨" + lit.decision.op->display + "⟩(" + inner + ")";
    }
    std::string s = lit.positive ? display(lit.decision) : negate_decision_display(lit.decision);
    if (!last) s += " ∧ " + self(self, i + 1);
    return s;
  };
  const std::string body = lits.empty() ? "⊤" : rec(rec, 0);
  return body + " ⇒ " + class_symbol(rule.consequent);
}

// ---------------------------------------------------------------------------

RenderFormat parse_render_format(std::string_view name) {
  if (name == "text") return RenderFormat::Text;
  if (name == "dot") return RenderFormat::Dot;
  if (name == "rules") return RenderFormat::Rules;
  throw InvalidArgument("unknown render format '" + std::string(name) + "' (expected text, dot or rules)");
}

namespace {

std::string render_text(const SpatialDecisionTree& tree) {
  std::string out;
  auto rec = [&](auto& self, const Node& n, std::size_t indent) -> void {
    const std::string pad(indent, ' ');
    if (n.is_leaf()) {
      out += fmt::format("{}leaf: {} (counts {})\n", pad, class_symbol(n.label), counts_text(n.counts));
      return;
    }
    out += fmt::format("{}{} (counts {})\n", pad, display(*n.decision), counts_text(n.counts));
    out += fmt::format("{}  yes {}:\n", pad, display(*n.decision));
    self(self, *n.yes, indent + 4);
    out += fmt::format("{}  no {}:\n", pad, negate_decision_display(*n.decision));
    self(self, *n.no, indent + 4);
  };
  rec(rec, tree.root(), 0);
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string render_dot(const SpatialDecisionTree& tree) {
  std::string out = "digraph sdt {\n  node [fontname=\"Helvetica\"];\n";
  std::size_t next = 0;
  auto rec = [&](auto& self, const Node& n) -> std::size_t {
    const std::size_t id = next++;
    if (n.is_leaf()) {
      out += fmt::format("  n{} [shape=box, label=\"{} {}\\n{}\"];\n", id, class_symbol(n.label),
                         dot_escape(tree.classes()[n.label]), counts_text(n.counts));
      return id;
    }
    out += fmt::format("  n{} [shape=ellipse, label=\"{}\"];\n", id, counts_text(n.counts));
    const std::size_t yes = self(self, *n.yes);
    const std::size_t no = self(self, *n.no);
    out += fmt::format("  n{} -> n{} [label=\"{}\"];\n", id, yes, dot_escape(display(*n.decision)));
    out += fmt::format("  n{} -> n{} [label=\"{}\", style=dashed];\n", id, no,
                       dot_escape(negate_decision_display(*n.decision)));
    return id;
  };
  rec(rec, tree.root());
  out += "}\n";
  return out;
}

std::string render_rules(const SpatialDecisionTree& tree) {
  std::string out = "SDR v1\n";
  for (const Rule& rule : extract_rules(tree)) {
    std::vector<std::string> parts;
    for (const Literal& lit : rule.antecedent) {
      parts.push_back(fmt::format("{} {}", lit.positive ? "yes" : "no", to_text(lit.decision)));
    }
    out += fmt::format("rule C{} <- {}\n", rule.consequent + 1, parts.empty() ? "true" : fmt::format("{}", fmt::join(parts, " ; ")));
    out += "# " + rule_formula(rule) + "\n";
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

std::size_t parse_class_ref(std::string_view s, std::size_t line_no) {
  if (s.size() < 2 || s[0] != 'C') throw ParseError(fmt::format("line {}: expected class C<k>", line_no));
  std::size_t v = 0;
  for (char c : s.substr(1)) {
    if (c < '0' || c > '9') throw ParseError(fmt::format("line {}: expected class C<k>", line_no));
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  if (v < 1) throw ParseError(fmt::format("line {}: class numbers start at 1", line_no));
  return v - 1;
}

}  // namespace

std::string render(const SpatialDecisionTree& tree, RenderFormat format) {
  switch (format) {
    case RenderFormat::Text: return render_text(tree);
    case RenderFormat::Dot: return render_dot(tree);
    case RenderFormat::Rules: return render_rules(tree);
  }
  throw InvalidArgument("unknown render format");
}

std::vector<Rule> parse_rules(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "SDR v1") throw ParseError("missing 'SDR v1' header");
  std::vector<Rule> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    if (!line.starts_with("rule ")) throw ParseError(fmt::format("line {}: expected 'rule'", i + 1));
    line.remove_prefix(5);
    const auto arrow = line.find(" <- ");
    if (arrow == std::string_view::npos) throw ParseError(fmt::format("line {}: missing '<-'", i + 1));
    Rule rule;
    rule.consequent = parse_class_ref(line.substr(0, arrow), i + 1);
    std::string_view rest = line.substr(arrow + 4);
    if (rest != "true") {
      while (true) {
        const auto sep = rest.find(" ; ");
        std::string_view lit = rest.substr(0, sep);
        Literal l;
        if (lit.starts_with("yes ")) {
          l.positive = true;
          lit.remove_prefix(4);
        } else if (lit.starts_with("no ")) {
          l.positive = false;
          lit.remove_prefix(3);
        } else {
          throw ParseError(fmt::format("line {}: literal must start with yes or no", i + 1));
        }
        l.decision = parse_decision(lit);
        rule.antecedent.push_back(std::move(l));
        if (sep == std::string_view::npos) break;
        rest.remove_prefix(sep + 3);
      }
    }
    out.push_back(std::move(rule));
  }
  return out;
}

// ---------------------------------------------------------------------------
// SDT v1

std::string write_tree(const SpatialDecisionTree& tree) {
  std::string out = "SDT v1\n";
  out += fmt::format("attributes {}\n", tree.n_attributes());
  out += fmt::format("r0 {}\n", r0_policy_name(tree.r0()));
  out += fmt::format("classes {}\n", tree.classes().size());
  for (const auto& name : tree.classes()) out += name + "\n";
  auto rec = [&](auto& self, const Node& n, std::size_t depth) -> void {
    const std::string pad(depth * 2, ' ');
    if (n.is_leaf()) {
      out += fmt::format("{}leaf C{} ; counts {} ; stop {}\n", pad, n.label + 1, counts_text(n.counts),
                         stop_reason_name(n.stop));
      return;
    }
    out += fmt::format("{}split {} ; counts {} ; gain {}\n", pad, to_text(*n.decision), counts_text(n.counts),
                       n.gain);
    self(self, *n.yes, depth + 1);
    self(self, *n.no, depth + 1);
  };
  rec(rec, tree.root(), 0);
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto sep = s.find(" ; ");
    out.push_back(s.substr(0, sep));
    if (sep == std::string_view::npos) return out;
    s.remove_prefix(sep + 3);
  }
}

std::string_view after_key(std::string_view field, std::string_view key, std::size_t line_no) {
  if (!field.starts_with(key) || field.size() <= key.size() || field[key.size()] != ' ') {
    throw ParseError(fmt::format("line {}: expected '{}'", line_no, key));
  }
  return field.substr(key.size() + 1);
}

std::int64_t to_int(std::string_view s, std::size_t line_no) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(fmt::format("line {}: bad integer '{}'", line_no, s));
  }
  return v;
}

ClassCounts parse_counts(std::string_view s, std::size_t n_classes, std::size_t line_no) {
  std::vector<std::int64_t> v;
  while (!s.empty()) {
    const auto sp = s.find(' ');
    v.push_back(to_int(s.substr(0, sp), line_no));
    if (sp == std::string_view::npos) break;
    s.remove_prefix(sp + 1);
  }
  if (v.size() != n_classes) throw ParseError(fmt::format("line {}: expected {} counts", line_no, n_classes));
  return ClassCounts(std::move(v));
}

}  // namespace

SpatialDecisionTree read_tree(std::string_view text) {
  const auto lines = lines_of(text);
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    if (pos >= lines.size()) throw ParseError("unexpected end of tree file");
    return lines[pos++];
  };
  if (next_line() != "SDT v1") throw ParseError("missing 'SDT v1' header");
  const auto n_attr = static_cast<std::size_t>(to_int(after_key(next_line(), "attributes", pos), pos));
  const R0Policy r0 = parse_r0_policy(after_key(next_line(), "r0", pos));
  const auto n_classes = static_cast<std::size_t>(to_int(after_key(next_line(), "classes", pos), pos));
  std::vector<std::string> classes;
  for (std::size_t c = 0; c < n_classes; ++c) classes.emplace_back(next_line());

  auto rec = [&](auto& self, std::size_t depth) -> std::unique_ptr<Node> {
    std::string_view line = next_line();
    const std::size_t line_no = pos;
    const std::string pad(depth * 2, ' ');
    if (!line.starts_with(pad) || (line.size() > pad.size() && line[pad.size()] == ' ')) {
      throw ParseError(fmt::format("line {}: expected indentation {}", line_no, depth * 2));
    }
    line.remove_prefix(pad.size());
    const auto fields = split_fields(line);
    if (fields.size() != 3) throw ParseError(fmt::format("line {}: expected 3 fields", line_no));
    ClassCounts counts = parse_counts(after_key(fields[1], "counts", line_no), n_classes, line_no);
    if (fields[0].starts_with("leaf ")) {
      const std::size_t label = parse_class_ref(fields[0].substr(5), line_no);
      if (label >= n_classes) throw ParseError(fmt::format("line {}: class out of range", line_no));
      return Node::leaf(label, std::move(counts), parse_stop_reason(after_key(fields[2], "stop", line_no)));
    }
    Decision d = parse_decision(after_key(fields[0], "split", line_no));
    const std::string_view g = after_key(fields[2], "gain", line_no);
    double gain = 0.0;
    const auto [p, ec] = std::from_chars(g.data(), g.data() + g.size(), gain);
    if (ec != std::errc() || p != g.data() + g.size()) throw ParseError(fmt::format("line {}: bad gain", line_no));
    auto yes = self(self, depth + 1);
    auto no = self(self, depth + 1);
    return Node::internal(std::move(d), std::move(counts), gain, std::move(yes), std::move(no));
  };
  auto root = rec(rec, 0);
  while (pos < lines.size()) {
    if (!lines[pos].empty()) throw ParseError(fmt::format("line {}: trailing content", pos + 1));
    ++pos;
  }
  return SpatialDecisionTree(std::move(root), std::move(classes), n_attr, r0);
}

void save_tree(const SpatialDecisionTree& tree, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << write_tree(tree);
  if (!f) throw Error("failed writing '" + path + "'");
}

SpatialDecisionTree load_tree(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError(DataError::Kind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return read_tree(ss.str());
}

}  // namespace sdt
