#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <vector>

namespace rgraph {

using NodeId = std::uint32_t;

// Node sets are single 64-bit words; graphs are capped at this many nodes.
inline constexpr std::size_t kMaxNodes = 64;

class NodeSet {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = NodeId;
    using difference_type = std::ptrdiff_t;
    using pointer = const NodeId*;
    using reference = NodeId;

    constexpr iterator() = default;
    constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
    constexpr NodeId operator*() const { return static_cast<NodeId>(std::countr_zero(rest_)); }
    constexpr iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    constexpr bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr NodeSet() = default;
  constexpr explicit NodeSet(std::uint64_t bits) : bits_(bits) {}
  constexpr NodeSet(std::initializer_list<NodeId> ids) {
    for (NodeId i : ids) insert(i);
  }

  /// All ids 0..n-1.
  static constexpr NodeSet range(std::size_t n) {
    return NodeSet(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }
  static constexpr NodeSet single(NodeId i) { return NodeSet(std::uint64_t{1} << i); }

  constexpr bool contains(NodeId i) const { return (bits_ >> i) & 1u; }
  constexpr void insert(NodeId i) { bits_ |= std::uint64_t{1} << i; }
  constexpr void erase(NodeId i) { bits_ &= ~(std::uint64_t{1} << i); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr std::uint64_t bits() const { return bits_; }
  constexpr NodeId first() const { return static_cast<NodeId>(std::countr_zero(bits_)); }

  constexpr bool intersects(NodeSet o) const { return (bits_ & o.bits_) != 0; }
  constexpr bool subset_of(NodeSet o) const { return (bits_ & ~o.bits_) == 0; }

  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

  std::vector<NodeId> to_vector() const { return {begin(), end()}; }

  constexpr NodeSet& operator|=(NodeSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr NodeSet& operator&=(NodeSet o) {
    bits_ &= o.bits_;
    return *this;
  }
  constexpr NodeSet& operator-=(NodeSet o) {
    bits_ &= ~o.bits_;
    return *this;
  }
  friend constexpr NodeSet operator|(NodeSet a, NodeSet b) { return NodeSet(a.bits_ | b.bits_); }
  friend constexpr NodeSet operator&(NodeSet a, NodeSet b) { return NodeSet(a.bits_ & b.bits_); }
  friend constexpr NodeSet operator-(NodeSet a, NodeSet b) { return NodeSet(a.bits_ & ~b.bits_); }
  friend constexpr bool operator==(NodeSet, NodeSet) = default;
  friend constexpr auto operator<=>(NodeSet a, NodeSet b) { return a.bits_ <=> b.bits_; }

 private:
  std::uint64_t bits_ = 0;
};

}  // namespace rgraph
