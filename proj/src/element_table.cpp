#include "autgrowth/element_table.hpp"

#include <algorithm>
#include <map>

namespace autgrowth {

namespace {

constexpr unsigned kSignatureDepth = 12;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  return h;
}

struct Ref {
  bool local = false;
  std::uint32_t value = 0;  // local index or global id
};

struct LocalNode {
  Word word;
  std::uint32_t perm = 0;
  std::vector<Ref> children;
  int index = -1;
  int lowlink = 0;
  bool on_stack = false;
  std::optional<ElementId> resolved;
};

}  // namespace

std::size_t ElementTable::KeyHash::operator()(const std::vector<std::uint32_t>& k) const noexcept {
  std::uint64_t h = k.size();
  for (auto v : k) h = mix(h, v);
  return static_cast<std::size_t>(h);
}

ElementTable::ElementTable(const GeneratorTable& gens, const AuxiliaryGroup* aux, TableCaps caps)
    : gens_(gens), aux_(aux), caps_(caps), degree_(gens.degree()) {
  const std::uint32_t pid = perm_index(identity_perm(degree_));
  node_perm_.push_back(pid);
  node_children_.assign(degree_, kIdentityElement);
  std::vector<std::uint32_t> key{pid};
  key.resize(1 + degree_, kIdentityElement);
  nodes_by_key_.emplace(std::move(key), kIdentityElement);
  std::unordered_map<std::uint64_t, std::uint64_t> memo;
  cyclic_by_signature_.emplace(global_signature(kIdentityElement, kSignatureDepth, memo), kIdentityElement);
}

std::size_t ElementTable::size() const {
  std::lock_guard lock(mutex_);
  return node_perm_.size();
}

Perm ElementTable::perm_of(ElementId id) const {
  std::lock_guard lock(mutex_);
  return perms_.at(node_perm_.at(id));
}

std::vector<ElementId> ElementTable::children_of(ElementId id) const {
  std::lock_guard lock(mutex_);
  auto first = node_children_.begin() + static_cast<std::ptrdiff_t>(id * degree_);
  return {first, first + static_cast<std::ptrdiff_t>(degree_)};
}

std::uint32_t ElementTable::perm_index(std::span<const Letter> perm) {
  Perm p(perm.begin(), perm.end());
  auto it = perm_ids_.find(p);
  if (it != perm_ids_.end()) return it->second;
  const auto idx = static_cast<std::uint32_t>(perms_.size());
  perms_.push_back(p);
  perm_ids_.emplace(std::move(p), idx);
  return idx;
}

std::uint64_t ElementTable::global_signature(ElementId id, unsigned depth,
                                             std::unordered_map<std::uint64_t, std::uint64_t>& memo) const {
  const std::uint64_t key = (static_cast<std::uint64_t>(id) << 8) | depth;
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::uint64_t h = mix(0x51ed27, node_perm_[id]);
  if (depth > 0)
    for (std::size_t x = 0; x < degree_; ++x)
      h = mix(h, global_signature(node_children_[id * degree_ + x], depth - 1, memo));
  memo.emplace(key, h);
  return h;
}

void ElementTable::remember(const Word& w, ElementId id) {
  if (memo_.size() < caps_.max_memo || w.size() <= 2) memo_.emplace(w, id);
}

std::optional<ElementId> ElementTable::intern_locked(std::uint32_t perm_idx, std::span<const ElementId> children) {
  std::vector<std::uint32_t> key;
  key.reserve(1 + children.size());
  key.push_back(perm_idx);
  key.insert(key.end(), children.begin(), children.end());
  if (auto it = nodes_by_key_.find(key); it != nodes_by_key_.end()) return it->second;
  if (node_perm_.size() >= caps_.max_nodes) return std::nullopt;
  const auto id = static_cast<ElementId>(node_perm_.size());
  node_perm_.push_back(perm_idx);
  node_children_.insert(node_children_.end(), children.begin(), children.end());
  nodes_by_key_.emplace(std::move(key), id);
  return id;
}

std::optional<ElementId> ElementTable::intern(std::span<const Letter> perm, std::span<const ElementId> children) {
  if (perm.size() != degree_ || children.size() != degree_) throw Error("portrait node has wrong arity");
  std::lock_guard lock(mutex_);
  return intern_locked(perm_index(perm), children);
}

std::optional<ElementId> ElementTable::canonical_id(const Word& w) {
  std::lock_guard lock(mutex_);
  return canonical_locked(aux_ ? reduce(w, *aux_) : w);
}

std::optional<ElementId> ElementTable::canonical_id_reduced(const Word& w) {
  std::lock_guard lock(mutex_);
  return canonical_locked(w);
}

std::optional<ElementId> ElementTable::id_from_parts(std::span<const Letter> perm, const std::vector<Word>& sections) {
  if (perm.size() != degree_ || sections.size() != degree_) throw Error("portrait node has wrong arity");
  std::lock_guard lock(mutex_);
  std::vector<ElementId> children(degree_);
  for (std::size_t x = 0; x < degree_; ++x) {
    auto id = canonical_locked(aux_ ? reduce(sections[x], *aux_) : sections[x]);
    if (!id) return std::nullopt;
    children[x] = *id;
  }
  return intern_locked(perm_index(perm), children);
}

std::optional<ElementId> ElementTable::canonical_locked(Word root) {
  if (root.empty()) return kIdentityElement;
  if (auto it = memo_.find(root); it != memo_.end()) return it->second;

  std::vector<LocalNode> nodes;
  std::unordered_map<Word, std::uint32_t, WordHash> local_of;
  auto local_ref = [&](Word&& w) -> std::optional<Ref> {
    if (w.empty()) return Ref{false, kIdentityElement};
    if (auto it = memo_.find(w); it != memo_.end()) return Ref{false, it->second};
    if (auto it = local_of.find(w); it != local_of.end()) return Ref{true, it->second};
    if (nodes.size() >= caps_.max_closure) return std::nullopt;
    const auto idx = static_cast<std::uint32_t>(nodes.size());
    local_of.emplace(w, idx);
    nodes.push_back(LocalNode{std::move(w), 0, {}, -1, 0, false, std::nullopt});
    return Ref{true, idx};
  };

  int counter = 0;
  std::vector<std::uint32_t> tarjan_stack;
  std::vector<std::pair<std::uint32_t, std::size_t>> frames;

  auto visit = [&](std::uint32_t v) -> bool {
    nodes[v].index = nodes[v].lowlink = counter++;
    nodes[v].on_stack = true;
    tarjan_stack.push_back(v);
    auto img = wreath(nodes[v].word, gens_);
    nodes[v].perm = perm_index(img.perm);
    std::vector<Ref> children(degree_);
    for (std::size_t x = 0; x < degree_; ++x) {
      Word sec = aux_ ? reduce(img.sections[x], *aux_) : std::move(img.sections[x]);
      auto ref = local_ref(std::move(sec));
      if (!ref) return false;
      children[x] = *ref;
    }
    nodes[v].children = std::move(children);
    frames.emplace_back(v, 0);
    return true;
  };

  auto child_id = [&](const Ref& r) -> ElementId { return r.local ? *nodes[r.value].resolved : r.value; };

  // Resolves a strongly connected component whose outside children are all resolved.
  auto resolve_component = [&](const std::vector<std::uint32_t>& comp) -> bool {
    const std::uint32_t first = comp.front();
    bool self_loop = false;
    for (const auto& r : nodes[first].children) self_loop = self_loop || (r.local && r.value == first);
    if (comp.size() == 1 && !self_loop) {
      std::vector<ElementId> children(degree_);
      for (std::size_t x = 0; x < degree_; ++x) children[x] = child_id(nodes[first].children[x]);
      auto id = intern_locked(nodes[first].perm, children);
      if (!id) return false;
      nodes[first].resolved = *id;
      return true;
    }

    std::unordered_map<std::uint32_t, std::size_t> pos;
    for (std::size_t i = 0; i < comp.size(); ++i) pos.emplace(comp[i], i);
    auto in_comp = [&](const Ref& r) { return r.local && pos.count(r.value); };

    // bounded unfolding signature of every member
    std::unordered_map<std::uint64_t, std::uint64_t> gmemo;
    std::vector<std::uint64_t> sig(comp.size());
    for (std::size_t i = 0; i < comp.size(); ++i) sig[i] = mix(0x51ed27, nodes[comp[i]].perm);
    for (unsigned k = 1; k <= kSignatureDepth; ++k) {
      std::vector<std::uint64_t> next(comp.size());
      for (std::size_t i = 0; i < comp.size(); ++i) {
        std::uint64_t h = mix(0x51ed27, nodes[comp[i]].perm);
        for (const auto& r : nodes[comp[i]].children)
          h = mix(h, in_comp(r) ? sig[pos[r.value]] : global_signature(child_id(r), k - 1, gmemo));
        next[i] = h;
      }
      sig = std::move(next);
    }

    // every member is reachable from the first one, so matching it decides all
    auto [lo, hi] = cyclic_by_signature_.equal_range(sig[0]);
    for (auto it = lo; it != hi; ++it) {
      std::unordered_map<std::uint32_t, ElementId> assign;
      std::vector<std::pair<std::uint32_t, ElementId>> todo{{first, it->second}};
      bool ok = true;
      while (ok && !todo.empty()) {
        auto [m, g] = todo.back();
        todo.pop_back();
        if (auto a = assign.find(m); a != assign.end()) {
          ok = a->second == g;
          continue;
        }
        assign.emplace(m, g);
        if (nodes[m].perm != node_perm_[g]) {
          ok = false;
          break;
        }
        for (std::size_t x = 0; x < degree_ && ok; ++x) {
          const auto& r = nodes[m].children[x];
          const ElementId gc = node_children_[g * degree_ + x];
          if (in_comp(r))
            todo.emplace_back(r.value, gc);
          else
            ok = child_id(r) == gc;
        }
      }
      if (ok) {
        for (auto [m, g] : assign) nodes[m].resolved = g;
        return true;
      }
    }

    // Moore refinement inside the component
    std::vector<std::uint32_t> cls(comp.size(), 0);
    std::size_t class_count = 0;
    for (;;) {
      std::map<std::vector<std::uint64_t>, std::uint32_t> ids;
      std::vector<std::uint32_t> next(comp.size());
      for (std::size_t i = 0; i < comp.size(); ++i) {
        std::vector<std::uint64_t> key{cls[i], nodes[comp[i]].perm};
        for (const auto& r : nodes[comp[i]].children)
          key.push_back(in_comp(r) ? (1ULL << 40) + cls[pos[r.value]] : child_id(r));
        next[i] = ids.emplace(std::move(key), static_cast<std::uint32_t>(ids.size())).first->second;
      }
      cls = std::move(next);
      if (ids.size() == class_count) break;
      class_count = ids.size();
    }
    if (node_perm_.size() + class_count > caps_.max_nodes) return false;
    const auto base = static_cast<ElementId>(node_perm_.size());
    std::vector<bool> made(class_count, false);
    node_perm_.resize(base + class_count);
    node_children_.resize((base + class_count) * degree_);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const ElementId id = base + cls[i];
      nodes[comp[i]].resolved = id;
      if (made[cls[i]]) continue;
      made[cls[i]] = true;
      node_perm_[id] = nodes[comp[i]].perm;
      for (std::size_t x = 0; x < degree_; ++x) {
        const auto& r = nodes[comp[i]].children[x];
        node_children_[id * degree_ + x] = in_comp(r) ? base + cls[pos[r.value]] : child_id(r);
      }
    }
    for (std::size_t c = 0; c < class_count; ++c) {
      const ElementId id = base + static_cast<ElementId>(c);
      std::vector<std::uint32_t> key{node_perm_[id]};
      key.insert(key.end(), node_children_.begin() + id * degree_, node_children_.begin() + (id + 1) * degree_);
      nodes_by_key_.emplace(std::move(key), id);
    }
    gmemo.clear();
    for (std::size_t c = 0; c < class_count; ++c) {
      const ElementId id = base + static_cast<ElementId>(c);
      cyclic_by_signature_.emplace(global_signature(id, kSignatureDepth, gmemo), id);
    }
    return true;
  };

  auto root_ref = local_ref(std::move(root));
  if (!root_ref) return std::nullopt;
  if (!visit(root_ref->value)) return std::nullopt;
  while (!frames.empty()) {
    auto& [v, x] = frames.back();
    if (x < degree_) {
      const Ref r = nodes[v].children[x++];
      if (!r.local) continue;
      auto& w = nodes[r.value];
      if (w.index == -1) {
        if (frames.size() >= caps_.max_depth) return std::nullopt;
        if (!visit(r.value)) return std::nullopt;
      } else if (w.on_stack) {
        nodes[v].lowlink = std::min(nodes[v].lowlink, w.index);
      }
      continue;
    }
    const std::uint32_t done = v;
    frames.pop_back();
    if (nodes[done].lowlink == nodes[done].index) {
      std::vector<std::uint32_t> comp;
      std::uint32_t m;
      do {
        m = tarjan_stack.back();
        tarjan_stack.pop_back();
        nodes[m].on_stack = false;
        comp.push_back(m);
      } while (m != done);
      std::reverse(comp.begin(), comp.end());
      if (!resolve_component(comp)) return std::nullopt;
      for (auto c : comp) remember(nodes[c].word, *nodes[c].resolved);
    }
    if (!frames.empty()) {
      const std::uint32_t parent = frames.back().first;
      nodes[parent].lowlink = std::min(nodes[parent].lowlink, nodes[done].lowlink);
    }
  }
  return nodes[0].resolved;
}

}  // namespace autgrowth
