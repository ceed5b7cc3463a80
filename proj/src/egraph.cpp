#include "flowsat/egraph.hpp"

#include <algorithm>
#include <stdexcept>

namespace flowsat {

std::size_t ENodeHash::operator()(const ENode &n) const {
  std::size_t h = static_cast<std::size_t>(n.op) * 0x9e3779b97f4a7c15ULL;
  h ^= n.symbol + 0x517cc1b727220a95ULL + (h << 6) + (h >> 2);
  for (Id c : n.args()) h ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

Id EGraph::find(Id id) const {
  while (parent_[id] != id) id = parent_[id];
  return id;
}

Id EGraph::find_compress(Id id) {
  Id root = find(id);
  while (parent_[id] != root) {
    Id next = parent_[id];
    parent_[id] = root;
    id = next;
  }
  return root;
}

ENode EGraph::canonicalize(ENode node) const {
  for (Id &c : node.args()) c = find(c);
  return node;
}

Id EGraph::add(ENode node) {
  for (Id &c : node.args()) c = find_compress(c);
  if (auto it = memo_.find(node); it != memo_.end()) return find_compress(it->second);

  auto id = static_cast<Id>(parent_.size());
  parent_.push_back(id);
  auto &cls = classes_.emplace_back();
  cls.id = id;
  cls.nodes.push_back(node);
  for (Id c : node.args()) classes_[c].parents.emplace_back(node, id);
  memo_.emplace(node, id);
  ++class_count_;
  ++node_count_;
  ++version_;
  return id;
}

Id EGraph::add_term(const Term &t) {
  ENode node;
  node.op = t.op();
  node.symbol = has_symbol(t.op()) ? intern(t.symbol()) : no_symbol;
  node.arity = static_cast<std::uint8_t>(t.children().size());
  for (std::size_t i = 0; i < t.children().size(); ++i) node.children[i] = add_term(t.child(i));
  return add(node);
}

std::optional<Id> EGraph::lookup(ENode node) const {
  node = canonicalize(node);
  auto it = memo_.find(node);
  if (it == memo_.end()) return std::nullopt;
  return find(it->second);
}

std::optional<Id> EGraph::lookup_term(const Term &t) const {
  ENode node;
  node.op = t.op();
  if (has_symbol(t.op())) {
    auto sym = find_symbol(t.symbol());
    if (!sym) return std::nullopt;
    node.symbol = *sym;
  }
  node.arity = static_cast<std::uint8_t>(t.children().size());
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    auto child = lookup_term(t.child(i));
    if (!child) return std::nullopt;
    node.children[i] = *child;
  }
  return lookup(node);
}

Id EGraph::merge(Id a, Id b) {
  a = find_compress(a);
  b = find_compress(b);
  if (a == b) return a;
  // The class with more parents survives so fewer parents need repair.
  auto pa = classes_[a].parents.size();
  auto pb = classes_[b].parents.size();
  if (pa < pb || (pa == pb && b < a)) std::swap(a, b);

  parent_[b] = a;
  auto &from = classes_[b];
  auto &into = classes_[a];
  pending_.insert(pending_.end(), from.parents.begin(), from.parents.end());
  into.nodes.insert(into.nodes.end(), from.nodes.begin(), from.nodes.end());
  into.parents.insert(into.parents.end(), from.parents.begin(), from.parents.end());
  from.nodes.clear();
  from.nodes.shrink_to_fit();
  from.parents.clear();
  from.parents.shrink_to_fit();

  --class_count_;
  ++version_;
  dirty_ = true;
  return a;
}

void EGraph::rebuild() {
  if (!dirty_) return;
  while (!pending_.empty()) {
    auto todo = std::move(pending_);
    pending_.clear();
    for (auto &[node, cls] : todo) {
      auto canon = node;
      for (Id &c : canon.args()) c = find_compress(c);
      Id owner = find_compress(cls);
      auto [it, inserted] = memo_.try_emplace(canon, owner);
      if (inserted) continue;
      Id existing = find_compress(it->second);
      if (existing != owner) owner = merge(existing, owner);
      it->second = owner;
    }
  }
  rebuild_classes();
  dirty_ = false;
}

void EGraph::rebuild_classes() {
  node_count_ = 0;
  for (Id id = 0; id < parent_.size(); ++id) {
    if (parent_[id] != id) continue;
    auto &cls = classes_[id];
    for (auto &n : cls.nodes)
      for (Id &c : n.args()) c = find_compress(c);
    std::sort(cls.nodes.begin(), cls.nodes.end());
    cls.nodes.erase(std::unique(cls.nodes.begin(), cls.nodes.end()), cls.nodes.end());
    node_count_ += cls.nodes.size();

    for (auto &[n, owner] : cls.parents) {
      for (Id &c : n.args()) c = find_compress(c);
      owner = find_compress(owner);
    }
    std::sort(cls.parents.begin(), cls.parents.end());
    cls.parents.erase(std::unique(cls.parents.begin(), cls.parents.end()), cls.parents.end());
  }
}

const EClass &EGraph::eclass(Id id) const { return classes_.at(find(id)); }

std::vector<Id> EGraph::class_ids() const {
  std::vector<Id> ids;
  ids.reserve(class_count_);
  for (Id id = 0; id < parent_.size(); ++id)
    if (parent_[id] == id) ids.push_back(id);
  return ids;
}

SymbolId EGraph::intern(std::string_view symbol) {
  if (symbol.empty()) return no_symbol;
  auto it = symbol_ids_.find(std::string(symbol));
  if (it != symbol_ids_.end()) return it->second;
  auto id = static_cast<SymbolId>(symbols_.size());
  symbols_.emplace_back(symbol);
  symbol_ids_.emplace(std::string(symbol), id);
  return id;
}

std::optional<SymbolId> EGraph::find_symbol(std::string_view symbol) const {
  auto it = symbol_ids_.find(std::string(symbol));
  if (it == symbol_ids_.end()) return std::nullopt;
  return it->second;
}

Term EGraph::node_term(const ENode &node, std::vector<Term> children) const {
  return Term::make(node.op, node.symbol == no_symbol ? std::string() : symbol_name(node.symbol),
                    std::move(children));
}

std::string EGraph::dump() const {
  std::string out;
  for (Id id : class_ids()) {
    out += "(class " + std::to_string(id);
    for (const auto &n : classes_[id].nodes) {
      out += " (node ";
      out += op_name(n.op);
      if (n.symbol != no_symbol) out += " " + symbol_name(n.symbol);
      for (Id c : n.args()) out += " " + std::to_string(find(c));
      out += ")";
    }
    out += ")\n";
  }
  return out;
}

} // namespace flowsat
