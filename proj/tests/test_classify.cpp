#include <gtest/gtest.h>

#include "mrarc/classify.hpp"
#include "oracles.hpp"

using namespace mrarc;

namespace {

// K orthogonal d-dimensional subspaces of R^m, `per` atoms each.
Dictionary orthogonal_dictionary(Rng& rng, int k, int d, int per, int m) {
  const Mat q = orthonormal_basis(oracle::random_matrix(rng, m, k * d));
  Mat a(m, k * per);
  std::vector<int> labels;
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < per; ++j) {
      a.col(c * per + j) = q.middleCols(c * d, d) * oracle::random_vector(rng, d);
      labels.push_back(c);
    }
  }
  return Dictionary(a, labels, k);
}

const std::vector<Method> kUnimodal{Method::MRSRC, Method::MRBSRC, Method::MRCRC, Method::SRC,
                                    Method::BSRC,  Method::CRC,    Method::LRC};

}  // namespace

TEST(Dictionary, NormalizesAndGroups) {
  Mat a(2, 3);
  a << 3, 0, 1, 4, 2, 1;
  const Dictionary d(a, {1, 0, 1});
  EXPECT_EQ(d.num_classes(), 2);
  EXPECT_NEAR(d.atoms().col(0).norm(), 1.0, 1e-15);
  EXPECT_EQ(d.columns_of(1), (std::vector<Index>{0, 2}));
  EXPECT_EQ(d.class_atoms(0).cols(), 1);
  EXPECT_THROW(Dictionary(Mat::Zero(2, 2), {0, 1}), InvalidArgument);
  EXPECT_THROW(Dictionary(Mat::Identity(2, 2), {0, 2}, 2), IndexOutOfRange);
  EXPECT_THROW(Dictionary(Mat::Identity(2, 2), {0, 0}, 2), InvalidArgument);
  EXPECT_THROW(Dictionary(Mat::Identity(2, 2), {0}), DimensionMismatch);
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : kUnimodal) EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_EQ(parse_method("mrjsrc"), Method::MRJSRC);
  EXPECT_THROW(parse_method("nope"), InvalidArgument);
  EXPECT_TRUE(is_multimodal(Method::JSRC));
  EXPECT_TRUE(is_modal(Method::MRCRC));
  EXPECT_FALSE(is_modal(Method::BSRC));
}

TEST(RestrictToClass, ZeroesOtherClasses) {
  const Dictionary d(Mat::Identity(4, 4), {0, 1, 0, 1});
  const Vec c = (Vec(4) << 1, 2, 3, 4).finished();
  EXPECT_EQ(restrict_to_class(c, d, 0), (Vec(4) << 1, 0, 3, 0).finished());
  EXPECT_EQ(restrict_to_class(c, d, 0) + restrict_to_class(c, d, 1), c);
  EXPECT_THROW(restrict_to_class(Vec::Ones(3), d, 0), DimensionMismatch);
  EXPECT_THROW(restrict_to_class(c, d, 2), IndexOutOfRange);
}

TEST(ArgminLabel, LowestIndexWinsTies) {
  EXPECT_EQ(argmin_label({3.0, 1.0, 1.0}), 1);
  EXPECT_EQ(argmin_label({0.5}), 0);
  EXPECT_THROW(argmin_label({}), EmptyInput);
}

TEST(Classify, ExactAtomQueryGetsItsClass) {
  Rng rng(1);
  const Dictionary d = orthogonal_dictionary(rng, 4, 3, 5, 30);
  for (Method m : kUnimodal) {
    for (int col : {2, 7, 13, 19}) {
      const ClassificationResult r = classify(d, d.atoms().col(col), ClassifierSpec::make(m, 0.01));
      EXPECT_EQ(r.label, d.class_of()[static_cast<std::size_t>(col)]) << method_name(m) << " col " << col;
      EXPECT_EQ(r.residuals.size(), 4u);
    }
  }
}

TEST(Classify, SingleClassAlwaysZero) {
  Rng rng(2);
  const Dictionary d(oracle::random_matrix(rng, 8, 5), std::vector<int>(5, 0));
  for (Method m : kUnimodal) {
    EXPECT_EQ(classify(d, oracle::random_vector(rng, 8), ClassifierSpec::make(m, 0.01)).label, 0);
  }
}

TEST(Classify, OrthogonalSubspacesSeparate) {
  Rng rng(3);
  const int k = 5, dim = 3;
  const Mat q = orthonormal_basis(oracle::random_matrix(rng, 40, k * dim));
  Mat a(40, k * 8);
  std::vector<int> labels;
  for (int c = 0; c < k; ++c)
    for (int j = 0; j < 8; ++j) {
      a.col(c * 8 + j) = q.middleCols(c * dim, dim) * oracle::random_vector(rng, dim);
      labels.push_back(c);
    }
  const Dictionary d(a, labels);
  for (Method m : kUnimodal) {
    for (int c = 0; c < k; ++c) {
      const Vec y = (q.middleCols(c * dim, dim) * oracle::random_vector(rng, dim)).normalized();
      EXPECT_EQ(classify(d, y, ClassifierSpec::make(m, 0.01)).label, c) << method_name(m);
    }
  }
}

TEST(Classify, BlockPartitionDefaultsToClasses) {
  Rng rng(4);
  const Dictionary d = orthogonal_dictionary(rng, 3, 2, 4, 20);
  ClassifierSpec spec = ClassifierSpec::make(Method::MRBSRC, 0.01);
  const ClassificationResult a = classify(d, d.atoms().col(5), spec);
  spec.block_partition = Partition::from_labels(d.class_of());
  const ClassificationResult b = classify(d, d.atoms().col(5), spec);
  EXPECT_EQ(a.coefficients, b.coefficients);
  spec.block_partition = Partition::singletons(5);
  EXPECT_THROW(classify(d, d.atoms().col(5), spec), DimensionMismatch);
}

TEST(Classify, LrcMatchesLeastSquaresOracle) {
  Rng rng(5);
  const Dictionary d(oracle::random_matrix(rng, 12, 9), {0, 0, 0, 1, 1, 1, 2, 2, 2});
  const Vec y = oracle::random_vector(rng, 12);
  const ClassificationResult r = classify_lrc(d, y);
  for (int k = 0; k < 3; ++k) {
    const Mat ak = d.class_atoms(k);
    const Vec beta = ak.householderQr().solve(y);
    EXPECT_NEAR(r.residuals[static_cast<std::size_t>(k)], (y - ak * beta).norm(), 1e-8);
  }
}

TEST(Classify, LrcOrthogonalQueryTiesToClassZero) {
  Mat a = Mat::Zero(4, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  Vec y = Vec::Zero(4);
  y[3] = 1.0;
  const ClassificationResult r = classify_lrc(Dictionary(a, {0, 1}), y);
  EXPECT_EQ(r.label, 0);
  EXPECT_DOUBLE_EQ(r.residuals[0], r.residuals[1]);
}

TEST(Classify, ModalMethodWithSquaredLossMatchesSrc) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Dictionary d(oracle::random_matrix(rng, 10, 12), {0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2});
    const Vec y = oracle::random_vector(rng, 10);
    ClassifierSpec mr = ClassifierSpec::make(Method::MRSRC, 0.05);
    mr.solver.loss = SquaredLoss{};
    const ClassifierSpec src = ClassifierSpec::make(Method::SRC, 0.05);
    EXPECT_EQ(classify(d, y, mr).label, classify(d, y, src).label);
  }
}

TEST(Classify, RejectsBadInput) {
  const Dictionary d(Mat::Identity(3, 3), {0, 1, 2});
  EXPECT_THROW(classify(d, Vec::Ones(4), ClassifierSpec::make(Method::SRC, 0.1)), DimensionMismatch);
  EXPECT_THROW(Classifier(d, ClassifierSpec::make(Method::JSRC, 0.1)), InvalidArgument);
  EXPECT_THROW(classify_lrc(d, Vec::Ones(2)), DimensionMismatch);
}

TEST(ClassifyMultimodal, SingleModalityMatchesUnimodal) {
  Rng rng(7);
  const Dictionary d = orthogonal_dictionary(rng, 3, 2, 4, 20);
  const Vec y = d.atoms().col(6) + 0.05 * oracle::random_vector(rng, 20);
  const ClassificationResult single = classify(d, y, ClassifierSpec::make(Method::MRSRC, 0.01));
  const ClassificationResult joint = classify_multimodal({d}, {y}, ClassifierSpec::make(Method::MRJSRC, 0.01));
  EXPECT_EQ(single.label, joint.label);
  const ClassificationResult sjoint = classify_multimodal({d}, {y}, ClassifierSpec::make(Method::JSRC, 0.01));
  EXPECT_EQ(sjoint.label, classify(d, y, ClassifierSpec::make(Method::SRC, 0.01)).label);
}

TEST(ClassifyMultimodal, DuplicatedModalityKeepsLabel) {
  Rng rng(8);
  const Dictionary d = orthogonal_dictionary(rng, 4, 2, 5, 24);
  for (int col : {1, 8, 12, 17}) {
    const Vec y = d.atoms().col(col);
    const int expected = d.class_of()[static_cast<std::size_t>(col)];
    EXPECT_EQ(classify_multimodal({d, d}, {y, y}, ClassifierSpec::make(Method::MRJSRC, 0.01)).label, expected);
  }
}

TEST(ClassifyMultimodal, Consistency) {
  const Dictionary a(Mat::Identity(3, 3), {0, 1, 2});
  const Dictionary b(Mat::Identity(3, 3), {0, 2, 1});
  const ClassifierSpec spec = ClassifierSpec::make(Method::MRJSRC, 0.1);
  EXPECT_THROW(classify_multimodal({}, {}, spec), InconsistentModalities);
  EXPECT_THROW(classify_multimodal({a, a}, {Vec::Ones(3)}, spec), InconsistentModalities);
  EXPECT_THROW(classify_multimodal({a, b}, {Vec::Ones(3), Vec::Ones(3)}, spec), InconsistentModalities);
  EXPECT_THROW(classify_multimodal({a}, {Vec::Ones(3)}, ClassifierSpec::make(Method::SRC, 0.1)), InvalidArgument);
}

TEST(ClassifySet, AveragesFrames) {
  Rng rng(9);
  const Dictionary d = orthogonal_dictionary(rng, 3, 2, 4, 20);
  const ClassifierSpec spec = ClassifierSpec::make(Method::MRSRC, 0.01);
  const Vec y = d.atoms().col(9);
  const ClassificationResult one = classify_set(d, {y}, spec);
  const ClassificationResult direct = classify(d, y, spec);
  EXPECT_EQ(one.label, direct.label);
  EXPECT_EQ(one.residuals, direct.residuals);
  const ClassificationResult same = classify_set(d, {y, y, y}, spec);
  EXPECT_EQ(same.label, direct.label);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(same.residuals[k], direct.residuals[k], 1e-12);
  EXPECT_EQ(same.coefficients.cols(), 3);
  const ClassificationResult mixed = classify_set(d, {d.atoms().col(0), d.atoms().col(9), d.atoms().col(10)}, spec);
  EXPECT_EQ(mixed.label, 2);
  EXPECT_THROW(classify_set(d, {}, spec), EmptyQuerySet);
}
