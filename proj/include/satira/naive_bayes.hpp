#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "satira/corpus.hpp"
#include "satira/vectorize.hpp"

namespace satira {

// Multinomial naive Bayes. Row c of the matrices is class index_of(Label).
struct NaiveBayesModel {
  Eigen::Vector2d class_log_prior;
  Eigen::MatrixXd feature_log_prob;  // 2 x n_features, log P(feature | class)
  double alpha = 1.0;

  Eigen::Index n_features() const { return feature_log_prob.cols(); }
};

// Throws DataError when a class is missing, alpha <= 0, or X has a negative entry.
NaiveBayesModel nb_fit(const DocTermMatrix& X, std::span<const Label> y, double alpha = 1.0);

// n_docs x 2 matrix of class_log_prior + X * feature_log_prob^T.
Eigen::MatrixX2d nb_log_joint(const NaiveBayesModel& model, const DocTermMatrix& X);

// argmax of the joint log-likelihood; ties go to FAKE.
std::vector<Label> nb_predict(const NaiveBayesModel& model, const DocTermMatrix& X);

void save_model(std::ostream& out, const NaiveBayesModel& model);
NaiveBayesModel load_naive_bayes(std::istream& in, const std::string& source = "<model>");

}  // namespace satira
