#include "flowsat/extract.hpp"

#include "flowsat/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace flowsat {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

bool same_cost(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(a)); }

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::optional<Op> op_by_any_name(std::string_view name) {
  if (name == "source") return Op::source;
  if (auto op = operator_keyword(name)) return op;
  if (auto hole = hole_keyword(name)) return hole;
  if (name.starts_with("hole-") || name.starts_with("hole_")) return hole_keyword(name.substr(5));
  return std::nullopt;
}

} // namespace

double CostModel::weight(Op op) const {
  auto it = weights.find(op);
  return it == weights.end() ? default_weight : it->second;
}

void CostModel::set_weight(std::string_view op, double weight) {
  if (!(weight > 0)) throw Error("weight for '" + std::string(op) + "' must be positive");
  if (op == "default") {
    default_weight = weight;
    return;
  }
  auto parsed = op_by_any_name(op);
  if (!parsed) throw Error("unknown operator '" + std::string(op) + "' in cost model");
  weights[*parsed] = weight;
}

void CostModel::load_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("cost config line " + std::to_string(number) + ": expected op = weight");
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    double w = 0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), w);
    if (ec != std::errc() || end != value.data() + value.size())
      throw Error("cost config line " + std::to_string(number) + ": bad weight '" + value + "'");
    set_weight(key, w);
  }
}

CostModel CostModel::unit() {
  CostModel m;
  m.weights.clear();
  return m;
}

double term_cost(const Term &t, const CostModel &model) {
  double total = model.weight(t.op());
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    double c = term_cost(t.child(i), model);
    if (t.op() == Op::diamond && i == 0 && !model.diamond_shared_once) c *= 2;
    total += c;
  }
  return total;
}

Extractor::Extractor(const EGraph &graph, CostModel model) : graph_(graph), model_(std::move(model)) {
  if (graph.dirty()) throw Error("extraction requires a rebuilt e-graph");
  auto ids = graph.class_ids();
  std::size_t size = ids.empty() ? 0 : ids.back() + 1;
  cost_.assign(size, infinity);
  choice_.assign(size, ENode{});
  key_.assign(size, std::string());

  for (bool changed = true; changed;) {
    changed = false;
    for (Id id : ids) {
      for (const auto &node : graph.eclass(id).nodes) {
        double c = node_cost(node);
        if (c < cost_[id] && !same_cost(c, cost_[id])) {
          cost_[id] = c;
          changed = true;
        }
      }
    }
  }

  // Children of a cost-optimal node cost strictly less than their parent,
  // so visiting classes by increasing cost finalizes child keys first.
  std::vector<Id> order;
  for (Id id : ids)
    if (cost_[id] != infinity) order.push_back(id);
  std::stable_sort(order.begin(), order.end(), [&](Id a, Id b) { return cost_[a] < cost_[b]; });
  for (Id id : order) {
    bool chosen = false;
    for (const auto &node : graph.eclass(id).nodes) {
      double c = node_cost(node);
      if (c == infinity || !same_cost(c, cost_[id])) continue;
      auto key = node_key(node);
      if (!chosen || key < key_[id]) {
        choice_[id] = node;
        key_[id] = std::move(key);
        chosen = true;
      }
    }
  }
}

double Extractor::node_cost(const ENode &node) const {
  double total = model_.weight(node.op);
  for (std::size_t i = 0; i < node.arity; ++i) {
    double c = cost_[graph_.find(node.children[i])];
    if (c == infinity) return infinity;
    if (node.op == Op::diamond && i == 0 && !model_.diamond_shared_once) c *= 2;
    total += c;
  }
  return total;
}

std::string Extractor::node_key(const ENode &node) const {
  if (node.op == Op::source) return graph_.symbol_name(node.symbol);
  if (is_hole(node.op)) return std::string(op_name(node.op));
  std::string out = "(";
  out += op_name(node.op);
  if (node.symbol != no_symbol) out += " " + graph_.symbol_name(node.symbol);
  for (Id c : node.args()) out += " " + key_[graph_.find(c)];
  return out + ")";
}

bool Extractor::reachable(Id eclass) const { return cost_.at(graph_.find(eclass)) != infinity; }

double Extractor::cost(Id eclass) const { return cost_.at(graph_.find(eclass)); }

Term Extractor::best(Id eclass) const {
  Id id = graph_.find(eclass);
  if (cost_.at(id) == infinity) throw Error("e-class " + std::to_string(id) + " has no finite-cost term");
  if (auto it = built_.find(id); it != built_.end()) return it->second;
  const auto &node = choice_[id];
  std::vector<Term> children;
  for (Id c : node.args()) children.push_back(best(c));
  auto t = graph_.node_term(node, std::move(children));
  built_.emplace(id, t);
  return t;
}

Term extract_best(const EGraph &graph, Id root, const CostModel &model) {
  return Extractor(graph, model).best(root);
}

} // namespace flowsat
