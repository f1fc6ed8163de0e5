#pragma once

#include <variant>
#include <vector>

#include "mrarc/numkit.hpp"

namespace mrarc {

/// Disjoint, non-empty index blocks covering {0, ..., n-1}.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<std::vector<Index>> blocks, Index n);

  /// One block per distinct label, blocks ordered by label value.
  static Partition from_labels(const std::vector<int>& labels);
  static Partition singletons(Index n);
  static Partition whole(Index n);

  const std::vector<std::vector<Index>>& blocks() const noexcept { return blocks_; }
  Index dimension() const noexcept { return n_; }
  std::size_t size() const noexcept { return blocks_.size(); }

 private:
  std::vector<std::vector<Index>> blocks_;
  Index n_ = 0;
};

// Atomic sets. The norm each induces:
//   Sparse        -> l1
//   Collaborative -> l2
//   Block         -> sum of l2 norms over partition blocks
//   JointRows     -> sum of l2 norms of the rows of an n x M matrix
struct Sparse {};
struct Collaborative {};
struct Block {
  Partition partition;
};
struct JointRows {};

using AtomicSet = std::variant<Sparse, Collaborative, Block, JointRows>;

const char* atomic_set_name(const AtomicSet& set);

double atomic_norm(const AtomicSet& set, const Vec& c);
double atomic_norm(const AtomicSet& set, const Mat& c);

/// argmin_c 0.5 ||c - z||^2 + gamma * atomic_norm(set, c).
///
/// The vector overload accepts Sparse, Collaborative and Block; the matrix
/// overload accepts JointRows only. Any other pairing throws ShapeMismatch.
/// gamma <= 0 throws NonPositiveGamma.
Vec prox(const AtomicSet& set, const Vec& z, double gamma);
Mat prox(const AtomicSet& set, const Mat& z, double gamma);

/// sign(z) * max(|z| - gamma, 0) elementwise.
Vec soft_threshold(const Vec& z, double gamma);

/// ((||z|| - gamma)_+ / ||z||) z, with the zero vector mapped to zero.
Vec shrink_l2(const Vec& z, double gamma);

}  // namespace mrarc
