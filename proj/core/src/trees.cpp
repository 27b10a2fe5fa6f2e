#include "gwf/trees.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "gwf/detail/cylinder_walker.hpp"
#include "gwf/errors.hpp"
#include "gwf/section.hpp"

namespace gwf {

Tree::Tree(std::size_t alphabet_size, std::size_t horizon, std::vector<std::vector<Subset>> masks)
    : alphabet_size_(alphabet_size), horizon_(horizon), masks_(std::move(masks)) {
  if (alphabet_size_ == 0 || alphabet_size_ > kMaxAlphabet) {
    throw Error(ErrorKind::InvalidArgument, "alphabet size must be in 1..64");
  }
  if (masks_.size() != horizon_ + 1) throw Error(ErrorKind::InvalidArgument, "tree needs horizon+1 levels of masks");
  if (masks_[0].size() != 1) throw Error(ErrorKind::InvalidArgument, "tree level 0 must hold exactly the root");
  const Subset allowed = full_subset(alphabet_size_);

  first_child_.resize(horizon_ + 1);
  parent_.resize(horizon_ + 1);
  symbol_.resize(horizon_ + 1);
  parent_[0] = {0};
  symbol_[0] = {0};
  for (std::size_t n = 0; n <= horizon_; ++n) {
    const auto& level = masks_[n];
    auto& first = first_child_[n];
    first.resize(level.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < level.size(); ++i) {
      if ((level[i] & ~allowed) != 0) throw Error(ErrorKind::InvalidArgument, "child symbol outside the alphabet");
      if (n == horizon_ && level[i] != 0) throw Error(ErrorKind::InvalidArgument, "nodes at the horizon cannot have children");
      first[i] = static_cast<std::uint32_t>(next);
      next += static_cast<std::size_t>(subset_size(level[i]));
    }
    if (n < horizon_) {
      if (masks_[n + 1].size() != next) {
        throw Error(ErrorKind::InvalidArgument, "level " + std::to_string(n + 1) + " size does not match parent masks");
      }
      auto& par = parent_[n + 1];
      auto& sym = symbol_[n + 1];
      par.reserve(next);
      sym.reserve(next);
      for (std::size_t i = 0; i < level.size(); ++i) {
        for (Symbol s : subset_members(level[i])) {
          par.push_back(static_cast<std::uint32_t>(i));
          sym.push_back(s);
        }
      }
    }
  }
}

Tree Tree::full(std::size_t alphabet_size, std::size_t horizon) {
  std::vector<std::vector<Subset>> masks(horizon + 1);
  std::size_t width = 1;
  const Subset all = full_subset(alphabet_size);
  for (std::size_t n = 0; n <= horizon; ++n) {
    masks[n].assign(width, n == horizon ? 0 : all);
    width *= alphabet_size;
  }
  return Tree(alphabet_size, horizon, std::move(masks));
}

Tree Tree::ray(std::size_t alphabet_size, const Word& word) {
  std::vector<std::vector<Subset>> masks(word.size() + 1);
  for (std::size_t n = 0; n < word.size(); ++n) {
    if (word[n] >= alphabet_size) throw Error(ErrorKind::InvalidArgument, "ray symbol outside the alphabet");
    masks[n] = {Subset{1} << word[n]};
  }
  masks[word.size()] = {0};
  return Tree(alphabet_size, word.size(), std::move(masks));
}

Tree Tree::from_child_lists(std::size_t alphabet_size, std::size_t horizon,
                            const std::map<Word, std::vector<Symbol>>& children) {
  std::vector<std::vector<Subset>> masks(horizon + 1);
  std::vector<Word> frontier{Word{}};
  std::size_t reached = 0;
  for (std::size_t n = 0; n <= horizon; ++n) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      Subset mask = 0;
      if (auto it = children.find(w); it != children.end()) {
        ++reached;
        for (std::size_t c = 0; c < it->second.size(); ++c) {
          Symbol s = it->second[c];
          if (s >= alphabet_size) throw Error(ErrorKind::InvalidArgument, "child index outside the alphabet");
          if (c > 0 && s <= it->second[c - 1]) throw Error(ErrorKind::InvalidArgument, "child indices must be strictly increasing");
          mask |= Subset{1} << s;
          Word child = w;
          child.push_back(s);
          next.push_back(std::move(child));
        }
      }
      if (n == horizon && mask != 0) throw Error(ErrorKind::InvalidArgument, "children listed below the horizon");
      masks[n].push_back(mask);
    }
    frontier = std::move(next);
  }
  if (reached != children.size()) {
    for (const auto& [w, c] : children) {
      (void)c;
      if (w.empty()) continue;
      Word parent(w.begin(), w.end() - 1);
      auto it = children.find(parent);
      bool linked = it != children.end() && std::find(it->second.begin(), it->second.end(), w.back()) != it->second.end();
      if (!linked) {
        throw Error(ErrorKind::InvalidArgument,
                    "not prefix-closed: parent of " + format_word(w, alphabet_size) + " does not list it");
      }
    }
    throw Error(ErrorKind::InvalidArgument, "not prefix-closed: unreachable nodes listed");
  }
  return Tree(alphabet_size, horizon, std::move(masks));
}

Tree Tree::from_words(std::size_t alphabet_size, std::size_t horizon, const std::vector<Word>& words) {
  std::set<Word> all(words.begin(), words.end());
  all.insert(Word{});
  std::map<Word, Subset> mask;
  for (const Word& w : all) {
    if (w.size() > horizon) throw Error(ErrorKind::InvalidArgument, "word deeper than the horizon");
    for (Symbol s : w) {
      if (s >= alphabet_size) throw Error(ErrorKind::InvalidArgument, "symbol outside the alphabet");
    }
    if (w.empty()) continue;
    Word parent(w.begin(), w.end() - 1);
    if (!all.contains(parent)) {
      throw Error(ErrorKind::InvalidArgument, "not prefix-closed: parent of " + format_word(w, alphabet_size) + " missing");
    }
    mask[parent] |= Subset{1} << w.back();
  }
  std::vector<std::vector<Subset>> masks(horizon + 1);
  // std::set iterates lexicographically, so each level comes out in order.
  for (const Word& w : all) {
    auto it = mask.find(w);
    masks[w.size()].push_back(it == mask.end() ? 0 : it->second);
  }
  return Tree(alphabet_size, horizon, std::move(masks));
}

std::size_t Tree::node_count() const noexcept {
  std::size_t total = 0;
  for (const auto& level : masks_) total += level.size();
  return total;
}

std::size_t Tree::height() const noexcept {
  std::size_t h = 0;
  for (std::size_t n = 0; n < masks_.size(); ++n) {
    if (!masks_[n].empty()) h = n;
  }
  return h;
}

Word Tree::word(std::size_t depth, std::size_t index) const {
  Word w(depth);
  for (std::size_t n = depth; n > 0; --n) {
    w[n - 1] = symbol_[n][index];
    index = parent_[n][index];
  }
  return w;
}

std::optional<std::size_t> Tree::find(const Word& w) const {
  if (w.size() > horizon_) return std::nullopt;
  std::size_t index = 0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    Subset m = masks_[n][index];
    Symbol s = w[n];
    if (s >= alphabet_size_ || !gwf::contains(m, s)) return std::nullopt;
    index = first_child_[n][index] + static_cast<std::size_t>(subset_size(m & ((Subset{1} << s) - 1)));
  }
  return index;
}

Subset Tree::child_set(const Word& w) const {
  auto index = find(w);
  if (!index) throw Error(ErrorKind::NotFound, "word " + format_word(w, alphabet_size_) + " is not in the tree");
  return masks_[w.size()][*index];
}

std::vector<Word> Tree::words() const {
  std::vector<Word> out;
  out.reserve(node_count());
  struct Frame {
    std::size_t depth;
    std::size_t index;
  };
  std::vector<Frame> stack{{0, 0}};
  Word current;
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    current.resize(f.depth);
    if (f.depth > 0) current[f.depth - 1] = symbol_[f.depth][f.index];
    out.push_back(current);
    Subset m = masks_[f.depth][f.index];
    std::size_t count = static_cast<std::size_t>(subset_size(m));
    std::size_t first = first_child_[f.depth][f.index];
    for (std::size_t c = count; c > 0; --c) stack.push_back({f.depth + 1, first + c - 1});
  }
  return out;
}

std::string Tree::serialize() const {
  std::ostringstream os;
  os << "# gwf-tree alphabet=" << alphabet_size_ << " horizon=" << horizon_ << '\n';
  for (const Word& w : words()) os << format_word(w, alphabet_size_) << '\n';
  return os.str();
}

Tree Tree::parse(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::InvalidArgument, "empty tree text");
  std::size_t alphabet = 0;
  std::size_t horizon = 0;
  if (std::sscanf(line.c_str(), "# gwf-tree alphabet=%zu horizon=%zu", &alphabet, &horizon) != 2) {
    throw Error(ErrorKind::InvalidArgument, "missing tree header");
  }
  std::vector<Word> words;
  while (std::getline(is, line)) words.push_back(parse_word(line, alphabet));
  return from_words(alphabet, horizon, words);
}

Tree descendant_tree(const Tree& tree, const Word& v) {
  auto start = tree.find(v);
  if (!start) throw Error(ErrorKind::NotFound, "word " + format_word(v, tree.alphabet_size()) + " is not in the tree");
  const std::size_t new_horizon = tree.horizon() - v.size();
  std::vector<std::vector<Subset>> masks(new_horizon + 1);
  // Descendants of one node form a contiguous run on every level.
  std::size_t begin = *start;
  std::size_t end = begin + 1;
  for (std::size_t n = 0; n <= new_horizon; ++n) {
    const std::size_t depth = v.size() + n;
    auto level = tree.level_masks(depth);
    masks[n].assign(level.begin() + static_cast<std::ptrdiff_t>(begin), level.begin() + static_cast<std::ptrdiff_t>(end));
    if (n == new_horizon) break;
    std::size_t next_begin = begin < tree.level_size(depth) && begin < end ? tree.first_child(depth, begin) : 0;
    std::size_t next_end = next_begin;
    if (begin < end) {
      next_end = tree.first_child(depth, end - 1) + static_cast<std::size_t>(subset_size(level[end - 1]));
    }
    begin = next_begin;
    end = next_end;
  }
  return Tree(tree.alphabet_size(), new_horizon, std::move(masks));
}

std::optional<Tree> reduce_to_horizon(const Tree& tree, std::size_t n) {
  if (n > tree.horizon()) {
    throw Error(ErrorKind::Horizon, "reduction depth " + std::to_string(n) + " exceeds the horizon " +
                                        std::to_string(tree.horizon()));
  }
  // alive[k][i]: node (k, i) has a descendant at depth n.
  std::vector<std::vector<char>> alive(n + 1);
  std::vector<std::vector<Subset>> kept(n + 1);
  alive[n].assign(tree.level_size(n), 1);
  kept[n].assign(tree.level_size(n), 0);
  for (std::size_t k = n; k-- > 0;) {
    auto level = tree.level_masks(k);
    alive[k].assign(level.size(), 0);
    kept[k].assign(level.size(), 0);
    for (std::size_t i = 0; i < level.size(); ++i) {
      std::size_t child = tree.first_child(k, i);
      Subset m = 0;
      for (Symbol s : subset_members(level[i])) {
        if (alive[k + 1][child]) m |= Subset{1} << s;
        ++child;
      }
      kept[k][i] = m;
      alive[k][i] = m != 0;
    }
  }
  if (!alive[0][0]) return std::nullopt;

  std::vector<std::vector<Subset>> masks(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    for (std::size_t i = 0; i < kept[k].size(); ++i) {
      if (alive[k][i]) masks[k].push_back(kept[k][i]);
    }
  }
  return Tree(tree.alphabet_size(), n, std::move(masks));
}

std::vector<TreeSectionEntry> tree_section_at(const Tree& tree, const Ifs& ifs, double scale) {
  if (tree.alphabet_size() != ifs.size()) throw Error(ErrorKind::InvalidArgument, "tree alphabet and IFS size differ");
  if (!(scale > 0.0)) throw Error(ErrorKind::Domain, "section scale must be positive");
  const auto ratios = ifs.ratios();
  std::vector<TreeSectionEntry> out;
  struct Frame {
    std::size_t depth;
    std::size_t index;
    double ratio;
  };
  std::vector<Frame> stack{{0, 0, 1.0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (at_or_below(f.ratio, scale)) {
      out.push_back({tree.word(f.depth, f.index), f.ratio, f.ratio / scale});
      continue;
    }
    if (f.depth == tree.horizon()) {
      throw Error(ErrorKind::Horizon, "tree horizon " + std::to_string(tree.horizon()) +
                                          " is too shallow for the section at scale " + std::to_string(scale));
    }
    Subset m = tree.child_mask(f.depth, f.index);
    auto members = subset_members(m);
    std::size_t first = tree.first_child(f.depth, f.index);
    for (std::size_t c = members.size(); c > 0; --c) {
      stack.push_back({f.depth + 1, first + c - 1, f.ratio * ratios[members[c - 1]]});
    }
  }
  return out;
}

std::vector<TreeSectionEntry> tree_section(const Tree& tree, const Ifs& ifs, double rho, std::size_t n) {
  if (!(rho > 0.0) || !(rho <= ifs.r_min())) throw Error(ErrorKind::Domain, "rho must lie in (0, r_min]");
  return tree_section_at(tree, ifs, std::pow(rho, static_cast<double>(n)));
}

PointCloud project_tree(const Tree& tree, const Ifs& ifs, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorKind::Domain, "projection scale must be positive");
  auto reduced = reduce_to_horizon(tree, tree.horizon());
  if (!reduced) throw Error(ErrorKind::EmptySet, "extinct tree projects to the empty set");
  auto entries = tree_section_at(*reduced, ifs, rho);
  auto coords = detail::word_images(ifs, entries.size(), [&](std::size_t n) -> const Word& { return entries[n].word; });
  return PointCloud(ifs.dim(), std::move(coords), rho * 2.0 * ifs.bounding_radius());
}

Family::Family(std::vector<Subset> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

Family Family::all_nonempty(std::size_t alphabet_size) {
  if (alphabet_size > 20) throw Error(ErrorKind::Resource, "family of all subsets is too large");
  std::vector<Subset> m;
  for (Subset s = 1; s <= full_subset(alphabet_size); ++s) m.push_back(s);
  return Family(std::move(m));
}

bool Family::contains(Subset s) const {
  return std::binary_search(members_.begin(), members_.end(), s);
}

Family Family::down_closure() const {
  std::set<Subset> out;
  for (Subset b : members_) {
    if (subset_size(b) > 24) throw Error(ErrorKind::Resource, "down-closure of a large subset is too large");
    for (Subset a = b; a != 0; a = (a - 1) & b) out.insert(a);
  }
  return Family(std::vector<Subset>(out.begin(), out.end()));
}

bool is_family_tree(const Tree& tree, const Family& family) {
  for (std::size_t n = 0; n < tree.horizon(); ++n) {
    for (Subset m : tree.level_masks(n)) {
      if (!family.contains(m)) return false;
    }
  }
  return true;
}

}  // namespace gwf
