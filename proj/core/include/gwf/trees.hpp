#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gwf/point_cloud.hpp"
#include "gwf/similarity.hpp"
#include "gwf/types.hpp"

namespace gwf {

// Finite truncation of a tree T over {0..k-1}: the prefix-closed set of words
// of T with length <= horizon. Nodes at depth `horizon` carry no child
// information; a node above the horizon with no children is a genuine leaf.
//
// Storage is level by level. Level n lists the depth-n words in lexicographic
// order; each node keeps its child set as a bitmask and the index of its
// first child in level n+1.
class Tree {
 public:
  // Child masks per level; level n+1 is implied by the masks of level n.
  Tree(std::size_t alphabet_size, std::size_t horizon, std::vector<std::vector<Subset>> masks);

  static Tree full(std::size_t alphabet_size, std::size_t horizon);
  static Tree ray(std::size_t alphabet_size, const Word& word);
  // node word -> children. Every listed node must be reachable from the root.
  static Tree from_child_lists(std::size_t alphabet_size, std::size_t horizon,
                               const std::map<Word, std::vector<Symbol>>& children);
  static Tree from_words(std::size_t alphabet_size, std::size_t horizon, const std::vector<Word>& words);

  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t node_count() const noexcept;
  std::size_t level_size(std::size_t depth) const { return masks_.at(depth).size(); }
  // Deepest level that holds at least one node.
  std::size_t height() const noexcept;

  std::span<const Subset> level_masks(std::size_t depth) const { return masks_.at(depth); }
  Subset child_mask(std::size_t depth, std::size_t index) const { return masks_[depth][index]; }
  std::size_t first_child(std::size_t depth, std::size_t index) const { return first_child_[depth][index]; }
  std::size_t parent(std::size_t depth, std::size_t index) const { return parent_[depth][index]; }
  Symbol symbol(std::size_t depth, std::size_t index) const { return symbol_[depth][index]; }

  Word word(std::size_t depth, std::size_t index) const;
  std::optional<std::size_t> find(const Word& word) const;
  bool contains(const Word& word) const { return find(word).has_value(); }
  // W_T(v); throws NotFound if v is not in the tree.
  Subset child_set(const Word& word) const;

  // All words, lexicographic (depth-first) order.
  std::vector<Word> words() const;

  // Header line "# gwf-tree alphabet=K horizon=H", then one word per line in
  // lexicographic order; the root is the empty line right after the header.
  std::string serialize() const;
  static Tree parse(const std::string& text);

  bool operator==(const Tree& other) const {
    return alphabet_size_ == other.alphabet_size_ && horizon_ == other.horizon_ && masks_ == other.masks_;
  }

 private:
  std::size_t alphabet_size_;
  std::size_t horizon_;
  std::vector<std::vector<Subset>> masks_;
  std::vector<std::vector<std::uint32_t>> first_child_;
  std::vector<std::vector<std::uint32_t>> parent_;
  std::vector<std::vector<Symbol>> symbol_;
};

// T^v = { j : v j in T }, horizon reduced by |v|.
Tree descendant_tree(const Tree& tree, const Word& v);

// Nodes with a descendant at depth n (the finite-horizon stand-in for the
// reduced tree T'). std::nullopt means extinct: nothing reaches depth n.
std::optional<Tree> reduce_to_horizon(const Tree& tree, std::size_t n);

// Entry of T intersected with the section Pi_{rho^n}; a_value = r_word / rho^n.
struct TreeSectionEntry {
  Word word;
  double ratio;
  double a_value;
};

// T cap Pi_scale for an arbitrary scale > 0 (lexicographic order). Throws
// Horizon if a truncated branch has not reached the section.
std::vector<TreeSectionEntry> tree_section_at(const Tree& tree, const Ifs& ifs, double scale);

// T cap Pi_{rho^n}, rho in (0, r_min], n >= 1.
std::vector<TreeSectionEntry> tree_section(const Tree& tree, const Ifs& ifs, double rho, std::size_t n);

// Gamma_Phi(T) at resolution rho: T is reduced at its horizon first and each
// word of the reduced tree on Pi_rho contributes phi_w(x0);
// epsilon = rho * 2 R_K. Throws EmptySet on extinct trees.
PointCloud project_tree(const Tree& tree, const Ifs& ifs, double rho);

// Family of admissible child sets (an "A" in A-tree); canonical sorted order.
class Family {
 public:
  Family() = default;
  explicit Family(std::vector<Subset> members);

  static Family all_nonempty(std::size_t alphabet_size);

  const std::vector<Subset>& members() const noexcept { return members_; }
  bool contains(Subset s) const;
  bool contains_empty() const { return contains(0); }
  bool empty() const noexcept { return members_.empty(); }

  // { B != {} : B subset of some member }.
  Family down_closure() const;

 private:
  std::vector<Subset> members_;
};

// Every node above the horizon has W_T(v) in the family.
bool is_family_tree(const Tree& tree, const Family& family);

}  // namespace gwf
