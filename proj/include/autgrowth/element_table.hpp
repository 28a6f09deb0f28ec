#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "autgrowth/mealy.hpp"
#include "autgrowth/words.hpp"

namespace autgrowth {

using ElementId = std::uint32_t;

inline constexpr ElementId kIdentityElement = 0;

struct TableCaps {
  std::size_t max_nodes = 1'000'000;
  std::size_t max_depth = 64;
  /// Words explored by one canonicalisation.
  std::size_t max_closure = 200'000;
  /// Words remembered with their id.
  std::size_t max_memo = 4'000'000;
};

/// Hash-consed portraits of group elements.
///
/// Every node is (root permutation, one child per letter) and no two nodes
/// denote the same element, so two words get the same id iff they are equal
/// in G. Elements lying on a section cycle are added a whole strongly
/// connected component at a time after minimisation; before that the
/// component is matched against existing cyclic nodes by a bounded unfolding
/// hash and a bisimulation check.
///
/// An empty optional means "unknown": a cap was hit and the caller has to
/// treat the word as a new element.
///
/// All public members are safe to call concurrently.
class ElementTable {
 public:
  ElementTable(const GeneratorTable& gens, const AuxiliaryGroup* aux, TableCaps caps = {});

  std::optional<ElementId> canonical_id(const Word& w);
  /// Same, for a word already reduced in the cover.
  std::optional<ElementId> canonical_id_reduced(const Word& w);

  /// Id of the element with root permutation `perm` and the given section words.
  std::optional<ElementId> id_from_parts(std::span<const Letter> perm, const std::vector<Word>& sections);

  /// Id of the element with root permutation `perm` and canonical children.
  std::optional<ElementId> intern(std::span<const Letter> perm, std::span<const ElementId> children);

  std::size_t size() const;
  std::size_t degree() const { return degree_; }
  const GeneratorTable& generators() const { return gens_; }
  const AuxiliaryGroup* aux() const { return aux_; }
  const TableCaps& caps() const { return caps_; }

  Perm perm_of(ElementId id) const;
  std::vector<ElementId> children_of(ElementId id) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& k) const noexcept;
  };

  std::uint32_t perm_index(std::span<const Letter> perm);
  std::optional<ElementId> intern_locked(std::uint32_t perm_idx, std::span<const ElementId> children);
  std::optional<ElementId> canonical_locked(Word w);
  std::uint64_t global_signature(ElementId id, unsigned depth,
                                 std::unordered_map<std::uint64_t, std::uint64_t>& memo) const;
  void remember(const Word& w, ElementId id);

  const GeneratorTable& gens_;
  const AuxiliaryGroup* aux_;
  TableCaps caps_;
  std::size_t degree_;

  mutable std::mutex mutex_;
  std::vector<Perm> perms_;
  std::unordered_map<Perm, std::uint32_t, WordHash> perm_ids_;
  std::vector<std::uint32_t> node_perm_;
  std::vector<ElementId> node_children_;
  std::unordered_map<std::vector<std::uint32_t>, ElementId, KeyHash> nodes_by_key_;
  std::unordered_multimap<std::uint64_t, ElementId> cyclic_by_signature_;
  std::unordered_map<Word, ElementId, WordHash> memo_;
};

}  // namespace autgrowth
