#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrarc/atomic.hpp"
#include "mrarc/numkit.hpp"
#include "mrarc/solver.hpp"

namespace mrarc {

/// Training matrix with unit-norm columns grouped by class label.
class Dictionary {
 public:
  /// Normalizes every column of `a` to unit Euclidean norm. Labels must lie
  /// in [0, num_classes) and every class must own at least one column.
  Dictionary(Mat a, std::vector<int> class_of, int num_classes);
  /// Infers the class count as max(label) + 1.
  Dictionary(Mat a, std::vector<int> class_of);

  const Mat& atoms() const noexcept { return a_; }
  const std::vector<int>& class_of() const noexcept { return class_of_; }
  int num_classes() const noexcept { return num_classes_; }
  Index rows() const noexcept { return a_.rows(); }
  Index cols() const noexcept { return a_.cols(); }
  const std::vector<Index>& columns_of(int k) const;
  /// A_k: the columns owned by class k.
  Mat class_atoms(int k) const;

 private:
  Mat a_;
  std::vector<int> class_of_;
  int num_classes_;
  std::vector<std::vector<Index>> members_;
};

enum class Method { MRSRC, MRBSRC, MRCRC, SRC, BSRC, CRC, LRC, MRJSRC, JSRC };

std::string_view method_name(Method m);
/// Case-insensitive; throws InvalidArgument on unknown names.
Method parse_method(std::string_view name);
bool is_multimodal(Method m);
bool is_modal(Method m);

/// The method picks the atomic set; `solver.loss` picks the data term and
/// with it the residual (MRLF for a modal loss, l2 for the squared loss).
/// `make` fills in the loss that matches the method name.
struct ClassifierSpec {
  Method method = Method::MRSRC;
  SolverConfig solver;
  std::optional<Partition> block_partition;

  static ClassifierSpec make(Method method, double lambda);
  double lambda() const noexcept { return solver.lambda; }
};

struct ClassificationResult {
  int label = 0;
  std::vector<double> residuals;
  /// n x 1 for unimodal methods, n x M for multimodal ones. LRC stores each
  /// class's least-squares coefficients in that class's coordinates.
  Mat coefficients;
  std::size_t iterations = 0;
  bool converged = true;
};

/// Zeroes every coefficient whose column does not belong to class k.
Vec restrict_to_class(const Vec& c, const Dictionary& dict, int k);

/// Lowest index among the minimal residuals.
int argmin_label(const std::vector<double>& residuals);

/// Reusable unimodal classifier over one dictionary. Keeps the solver's
/// cached factorizations across queries.
class Classifier {
 public:
  Classifier(const Dictionary& dict, ClassifierSpec spec);

  ClassificationResult classify(const Vec& y) const;

  const ClassifierSpec& spec() const noexcept { return spec_; }

 private:
  const Dictionary* dict_;
  ClassifierSpec spec_;
  std::optional<ArSolver> solver_;
};

ClassificationResult classify(const Dictionary& dict, const Vec& y,
                              const ClassifierSpec& spec);

ClassificationResult classify_lrc(const Dictionary& dict, const Vec& y);

/// Joint-rows classification over M modalities sharing one class layout.
ClassificationResult classify_multimodal(const std::vector<Dictionary>& dicts,
                                         const std::vector<Vec>& ys,
                                         const ClassifierSpec& spec);

/// Classifies every frame, averages the per-class residuals over frames and
/// returns the argmin of the average. `coefficients` holds one column per
/// frame; `iterations` is the total across frames.
ClassificationResult classify_set(const Dictionary& dict, const std::vector<Vec>& ys,
                                  const ClassifierSpec& spec);

}  // namespace mrarc
