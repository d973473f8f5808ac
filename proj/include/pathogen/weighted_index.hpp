#ifndef PATHOGEN_WEIGHTED_INDEX_HPP
#define PATHOGEN_WEIGHTED_INDEX_HPP

#include <cassert>
#include <cstdint>
#include <vector>

namespace pathogen {

/// Dynamic cumulative-weight structure (Fenwick tree) over a dense slot
/// array with nonnegative integer weights. Supports O(log n) point update,
/// append/pop at the back, and sampling a slot proportional to its weight
/// from a single uniform integer in [0, total()). Integer weights keep the
/// maintained total exactly equal to the sum of the parts, which the
/// engines' from-scratch consistency checks rely on.
class WeightedIndex {
 public:
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  std::uint64_t total() const { return total_; }
  std::uint64_t weight(std::size_t i) const { return weights_[i]; }

  void push_back(std::uint64_t w) {
    const std::size_t i = weights_.size() + 1;  // 1-based tree position
    weights_.push_back(0);
    // A new tree node covers (i - lowbit(i), i]; seed it with the existing
    // prefix of that range, then add the new weight through the usual path.
    tree_.push_back(prefix(i - 1) - prefix(i - lowbit(i)));
    add(weights_.size() - 1, static_cast<std::int64_t>(w));
  }

  void pop_back() {
    assert(!weights_.empty());
    set_weight(weights_.size() - 1, 0);
    weights_.pop_back();
    tree_.pop_back();
  }

  void add(std::size_t i, std::int64_t delta) {
    assert(i < weights_.size());
    weights_[i] += static_cast<std::uint64_t>(delta);
    total_ += static_cast<std::uint64_t>(delta);
    for (std::size_t j = i + 1; j <= weights_.size(); j += lowbit(j))
      tree_[j - 1] += static_cast<std::uint64_t>(delta);
  }

  void set_weight(std::size_t i, std::uint64_t w) {
    add(i, static_cast<std::int64_t>(w) - static_cast<std::int64_t>(weights_[i]));
  }

  /// Slot owning position u of the cumulative weight line. Pre: u < total().
  /// Returns the smallest slot whose prefix sum exceeds u; zero-weight slots
  /// are never returned.
  std::size_t sample(std::uint64_t u) const {
    std::uint64_t rem = u;
    return sample_with_remainder(&rem);
  }

  /// As sample(), but also reports the offset of u within the chosen slot's
  /// weight (in [0, weight(slot))), usable as a secondary uniform choice.
  std::size_t sample_with_remainder(std::uint64_t* u) const {
    assert(*u < total_);
    std::size_t pos = 0;
    std::size_t bit = top_bit(weights_.size());
    for (; bit != 0; bit >>= 1) {
      const std::size_t next = pos + bit;
      if (next <= weights_.size() && tree_[next - 1] <= *u) {
        *u -= tree_[next - 1];
        pos = next;
      }
    }
    return pos;  // 0-based slot index
  }

 private:
  static std::size_t lowbit(std::size_t i) { return i & (~i + 1); }

  static std::size_t top_bit(std::size_t n) {
    std::size_t b = 1;
    while ((b << 1) <= n) b <<= 1;
    return n == 0 ? 0 : b;
  }

  std::uint64_t prefix(std::size_t i) const {  // sum of slots [0, i), i is 1-based count
    std::uint64_t s = 0;
    for (std::size_t j = i; j > 0; j -= lowbit(j)) s += tree_[j - 1];
    return s;
  }

  std::vector<std::uint64_t> weights_;
  std::vector<std::uint64_t> tree_;  // tree_[i-1] is Fenwick node i
  std::uint64_t total_ = 0;
};

}  // namespace pathogen

#endif  // PATHOGEN_WEIGHTED_INDEX_HPP
