/*
 * Copyright (c) 2026, The chanrace Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#ifndef CHANRACE_PROTOCOL_TREE_HH_
#define CHANRACE_PROTOCOL_TREE_HH_

#include <algorithm>
#include <cassert>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chanrace {

/**
 * Immutable binary tree shared by the global, per-party and per-endpoint
 * protocol syntaxes. Leaves are a variant supplied by the concrete syntax;
 * the default-constructed tree is emp.
 */
template <class Leaf>
class ProtocolTree {
 public:
  enum class Kind { kEmp, kLeaf, kSeq, kPar };

  ProtocolTree() = default;

  static ProtocolTree emp() { return ProtocolTree(); }

  static ProtocolTree leaf(Leaf l) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kLeaf;
    n->value.emplace(std::move(l));
    return ProtocolTree(std::move(n));
  }

  static ProtocolTree seq(ProtocolTree l, ProtocolTree r) {
    return binary(Kind::kSeq, std::move(l), std::move(r));
  }

  static ProtocolTree par(ProtocolTree l, ProtocolTree r) {
    return binary(Kind::kPar, std::move(l), std::move(r));
  }

  // Right-nested sequence of the given parts; emp if empty.
  static ProtocolTree seq_of(const std::vector<ProtocolTree>& parts) {
    if (parts.empty()) return emp();
    ProtocolTree acc = parts.back();
    for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) {
      acc = seq(*it, acc);
    }
    return acc;
  }

  static ProtocolTree par_of(const std::vector<ProtocolTree>& parts) {
    if (parts.empty()) return emp();
    ProtocolTree acc = parts.back();
    for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) {
      acc = par(*it, acc);
    }
    return acc;
  }

  Kind kind() const { return node_ ? node_->kind : Kind::kEmp; }
  bool is_emp() const { return kind() == Kind::kEmp; }
  bool is_leaf() const { return kind() == Kind::kLeaf; }
  bool is_seq() const { return kind() == Kind::kSeq; }
  bool is_par() const { return kind() == Kind::kPar; }

  const Leaf& value() const {
    assert(is_leaf());
    return *node_->value;
  }

  const ProtocolTree& left() const {
    assert(is_seq() || is_par());
    return node_->left;
  }

  const ProtocolTree& right() const {
    assert(is_seq() || is_par());
    return node_->right;
  }

  // Leaves in left-to-right order.
  std::vector<Leaf> leaves() const {
    std::vector<Leaf> out;
    collect(out);
    return out;
  }

  template <class F>
  void for_each_leaf(F&& f) const {
    switch (kind()) {
      case Kind::kEmp:
        return;
      case Kind::kLeaf:
        f(value());
        return;
      default:
        left().for_each_leaf(f);
        right().for_each_leaf(f);
    }
  }

  // Rebuilds the tree, replacing every leaf by map(leaf) (a whole subtree).
  template <class F>
  ProtocolTree map_leaves(F&& map) const {
    switch (kind()) {
      case Kind::kEmp:
        return *this;
      case Kind::kLeaf:
        return map(value());
      default: {
        // Left first: callers rely on left-to-right visiting order.
        ProtocolTree l = left().map_leaves(map);
        ProtocolTree r = right().map_leaves(map);
        return binary(kind(), std::move(l), std::move(r));
      }
    }
  }

  // Same as map_leaves but for a different target leaf type.
  template <class Out, class F>
  ProtocolTree<Out> transform(F&& map) const {
    using T = ProtocolTree<Out>;
    switch (kind()) {
      case Kind::kEmp:
        return T::emp();
      case Kind::kLeaf:
        return map(value());
      default: {
        T l = left().template transform<Out>(map);
        T r = right().template transform<Out>(map);
        return is_seq() ? T::seq(std::move(l), std::move(r))
                        : T::par(std::move(l), std::move(r));
      }
    }
  }

  std::size_t size() const {
    if (is_emp()) return 0;
    if (is_leaf()) return 1;
    return left().size() + right().size();
  }

  friend bool operator==(const ProtocolTree& a, const ProtocolTree& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case Kind::kEmp:
        return true;
      case Kind::kLeaf:
        return a.value() == b.value();
      default:
        return a.left() == b.left() && a.right() == b.right();
    }
  }

  friend bool operator!=(const ProtocolTree& a, const ProtocolTree& b) {
    return !(a == b);
  }

 private:
  struct Node {
    Kind kind = Kind::kEmp;
    std::optional<Leaf> value;
    ProtocolTree left;
    ProtocolTree right;
  };

  explicit ProtocolTree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static ProtocolTree binary(Kind k, ProtocolTree l, ProtocolTree r) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->left = std::move(l);
    n->right = std::move(r);
    return ProtocolTree(std::move(n));
  }

  void collect(std::vector<Leaf>& out) const {
    for_each_leaf([&out](const Leaf& l) { out.push_back(l); });
  }

  std::shared_ptr<const Node> node_;
};

/**
 * Renders a tree with ';' binding tighter than '||'. Both operators are
 * right-associative, so only left-nested operands need parentheses.
 */
template <class Leaf, class F>
std::string render_tree(const ProtocolTree<Leaf>& t, F&& leaf) {
  using K = typename ProtocolTree<Leaf>::Kind;
  auto wrap = [&](const ProtocolTree<Leaf>& sub, bool parens) {
    std::string s = render_tree(sub, leaf);
    return parens ? "(" + s + ")" : s;
  };
  switch (t.kind()) {
    case K::kEmp:
      return "emp";
    case K::kLeaf:
      return leaf(t.value());
    case K::kSeq:
      return wrap(t.left(), !t.left().is_leaf() && !t.left().is_emp()) +
             " ; " + wrap(t.right(), t.right().is_par());
    case K::kPar:
      return wrap(t.left(), t.left().is_par()) + " || " +
             wrap(t.right(), false);
  }
  return "emp";
}

namespace detail {

template <class Leaf>
void flatten(const ProtocolTree<Leaf>& t,
             typename ProtocolTree<Leaf>::Kind k,
             std::vector<ProtocolTree<Leaf>>& out) {
  if (t.kind() == k) {
    flatten(t.left(), k, out);
    flatten(t.right(), k, out);
  } else {
    out.push_back(t);
  }
}

}  // namespace detail

/**
 * Structural congruence normal form: emp units removed, both operators
 * right-associated, and Par operands sorted by their rendered text.
 */
template <class Leaf, class F>
ProtocolTree<Leaf> normalize_tree(const ProtocolTree<Leaf>& t, F&& leaf) {
  using T = ProtocolTree<Leaf>;
  using K = typename T::Kind;
  if (t.is_emp() || t.is_leaf()) return t;

  std::vector<T> parts;
  detail::flatten(t, t.kind(), parts);
  std::vector<T> kept;
  for (const auto& p : parts) {
    T n = normalize_tree(p, leaf);
    if (n.is_emp()) continue;
    // Normalising an operand may expose a node of the same kind.
    if (n.kind() == t.kind()) {
      detail::flatten(n, t.kind(), kept);
    } else {
      kept.push_back(n);
    }
  }
  if (t.kind() == K::kSeq) return T::seq_of(kept);

  std::vector<std::pair<std::string, T>> keyed;
  for (auto& k : kept) keyed.emplace_back(render_tree(k, leaf), k);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  kept.clear();
  for (auto& k : keyed) kept.push_back(k.second);
  return T::par_of(kept);
}

}  // namespace chanrace

#endif  // CHANRACE_PROTOCOL_TREE_HH_
