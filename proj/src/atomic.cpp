#include "mrarc/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace mrarc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw NonPositiveGamma("prox: gamma must be positive and finite, got " +
                           std::to_string(gamma));
  }
}

void check_partition(const Partition& p, Index n) {
  if (p.dimension() != n) {
    throw ShapeMismatch("block partition covers " + std::to_string(p.dimension()) +
                        " indices but vector has " + std::to_string(n));
  }
}

}  // namespace

Partition::Partition(std::vector<std::vector<Index>> blocks, Index n)
    : blocks_(std::move(blocks)), n_(n) {
  if (n < 0) throw InvalidArgument("Partition: negative dimension");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  Index covered = 0;
  for (const auto& block : blocks_) {
    if (block.empty()) throw InvalidArgument("Partition: empty block");
    for (Index i : block) {
      if (i < 0 || i >= n) {
        throw InvalidArgument("Partition: index " + std::to_string(i) +
                              " out of range");
      }
      if (seen[static_cast<std::size_t>(i)]) {
        throw InvalidArgument("Partition: index " + std::to_string(i) +
                              " appears in two blocks");
      }
      seen[static_cast<std::size_t>(i)] = 1;
      ++covered;
    }
  }
  if (covered != n) throw InvalidArgument("Partition: blocks do not cover all indices");
}

Partition Partition::from_labels(const std::vector<int>& labels) {
  std::map<int, std::vector<Index>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_label[labels[i]].push_back(static_cast<Index>(i));
  }
  std::vector<std::vector<Index>> blocks;
  blocks.reserve(by_label.size());
  for (auto& [label, idx] : by_label) blocks.push_back(std::move(idx));
  return Partition(std::move(blocks), static_cast<Index>(labels.size()));
}

Partition Partition::singletons(Index n) {
  std::vector<std::vector<Index>> blocks;
  blocks.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) blocks.push_back({i});
  return Partition(std::move(blocks), n);
}

Partition Partition::whole(Index n) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<Index>> blocks;
  if (n > 0) blocks.push_back(std::move(all));
  return Partition(std::move(blocks), n);
}

const char* atomic_set_name(const AtomicSet& set) {
  return std::visit(Overloaded{[](const Sparse&) { return "sparse"; },
                               [](const Collaborative&) { return "collaborative"; },
                               [](const Block&) { return "block"; },
                               [](const JointRows&) { return "joint_rows"; }},
                    set);
}

Vec soft_threshold(const Vec& z, double gamma) {
  return z.unaryExpr([gamma](double v) {
    const double mag = std::abs(v) - gamma;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
}

Vec shrink_l2(const Vec& z, double gamma) {
  // In one dimension the radial shrink is the soft threshold; evaluate it
  // that way so singleton blocks and one-column rows agree bit for bit.
  if (z.size() == 1) return soft_threshold(z, gamma);
  const double norm = z.norm();
  if (norm <= gamma || norm == 0.0) return Vec::Zero(z.size());
  return ((norm - gamma) / norm) * z;
}

double atomic_norm(const AtomicSet& set, const Vec& c) {
  return std::visit(
      Overloaded{
          [&](const Sparse&) { return c.lpNorm<1>(); },
          [&](const Collaborative&) { return c.norm(); },
          [&](const Block& b) {
            check_partition(b.partition, c.size());
            double total = 0.0;
            for (const auto& block : b.partition.blocks()) {
              double sq = 0.0;
              for (Index i : block) sq += c[i] * c[i];
              total += std::sqrt(sq);
            }
            return total;
          },
          [&](const JointRows&) -> double {
            throw ShapeMismatch("atomic_norm: joint-rows set needs a matrix");
          }},
      set);
}

double atomic_norm(const AtomicSet& set, const Mat& c) {
  if (!std::holds_alternative<JointRows>(set)) {
    throw ShapeMismatch(std::string("atomic_norm: ") + atomic_set_name(set) +
                        " set needs a vector");
  }
  return c.rowwise().norm().sum();
}

Vec prox(const AtomicSet& set, const Vec& z, double gamma) {
  check_gamma(gamma);
  return std::visit(
      Overloaded{
          [&](const Sparse&) { return soft_threshold(z, gamma); },
          [&](const Collaborative&) { return shrink_l2(z, gamma); },
          [&](const Block& b) {
            check_partition(b.partition, z.size());
            Vec out = Vec::Zero(z.size());
            for (const auto& block : b.partition.blocks()) {
              Vec sub(static_cast<Index>(block.size()));
              for (std::size_t k = 0; k < block.size(); ++k) sub[static_cast<Index>(k)] = z[block[k]];
              const Vec shrunk = shrink_l2(sub, gamma);
              for (std::size_t k = 0; k < block.size(); ++k) out[block[k]] = shrunk[static_cast<Index>(k)];
            }
            return out;
          },
          [&](const JointRows&) -> Vec {
            throw ShapeMismatch("prox: joint-rows set needs a matrix");
          }},
      set);
}

Mat prox(const AtomicSet& set, const Mat& z, double gamma) {
  check_gamma(gamma);
  if (!std::holds_alternative<JointRows>(set)) {
    throw ShapeMismatch(std::string("prox: ") + atomic_set_name(set) +
                        " set needs a vector");
  }
  Mat out(z.rows(), z.cols());
  for (Index i = 0; i < z.rows(); ++i) {
    out.row(i) = shrink_l2(z.row(i).transpose(), gamma).transpose();
  }
  return out;
}

}  // namespace mrarc
