#include "satira/naive_bayes.hpp"

#include <cmath>

#include <fmt/format.h>

#include "satira/error.hpp"
#include "model_io.hpp"

namespace satira {

NaiveBayesModel nb_fit(const DocTermMatrix& X, std::span<const Label> y, double alpha) {
  if (!(alpha > 0.0)) throw DataError("naive Bayes smoothing alpha must be positive");
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw DataError(fmt::format("naive Bayes: {} rows but {} labels", X.rows(), y.size()));

  const Eigen::Index n_features = X.cols();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(2, n_features);
  Eigen::Vector2d docs = Eigen::Vector2d::Zero();
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const int c = index_of(y[static_cast<std::size_t>(r)]);
    docs(c) += 1.0;
    for (DocTermMatrix::InnerIterator it(X, r); it; ++it) {
      if (it.value() < 0.0) throw DataError("naive Bayes needs non-negative features");
      counts(c, it.col()) += it.value();
    }
  }
  for (Label label : kLabels)
    if (docs(index_of(label)) == 0.0)
      throw DataError(fmt::format("naive Bayes: no training documents of class '{}'",
                                  to_string(label)));

  NaiveBayesModel model;
  model.alpha = alpha;
  model.class_log_prior = (docs / docs.sum()).array().log();
  model.feature_log_prob.resize(2, n_features);
  for (int c = 0; c < 2; ++c) {
    const double denom = counts.row(c).sum() + alpha * static_cast<double>(n_features);
    model.feature_log_prob.row(c) = ((counts.row(c).array() + alpha) / denom).log();
  }
  return model;
}

Eigen::MatrixX2d nb_log_joint(const NaiveBayesModel& model, const DocTermMatrix& X) {
  if (X.cols() != model.n_features())
    throw DataError(fmt::format("naive Bayes: model has {} features, input has {}",
                                model.n_features(), X.cols()));
  Eigen::MatrixX2d joint = X * model.feature_log_prob.transpose();
  joint.rowwise() += model.class_log_prior.transpose();
  return joint;
}

std::vector<Label> nb_predict(const NaiveBayesModel& model, const DocTermMatrix& X) {
  const Eigen::MatrixX2d joint = nb_log_joint(model, X);
  std::vector<Label> out(static_cast<std::size_t>(joint.rows()));
  for (Eigen::Index r = 0; r < joint.rows(); ++r)
    out[static_cast<std::size_t>(r)] = joint(r, 1) > joint(r, 0) ? Label::Real : Label::Fake;
  return out;
}

void save_model(std::ostream& out, const NaiveBayesModel& model) {
  model_io::Writer w(out, "naive_bayes");
  w.scalar("alpha", model.alpha);
  w.matrix("class_log_prior", model.class_log_prior);
  w.matrix("feature_log_prob", model.feature_log_prob);
}

NaiveBayesModel load_naive_bayes(std::istream& in, const std::string& source) {
  model_io::Reader r(in, source, "naive_bayes");
  NaiveBayesModel model;
  model.alpha = r.scalar("alpha");
  const Eigen::MatrixXd prior = r.matrix("class_log_prior");
  if (prior.rows() != 2 || prior.cols() != 1) throw DataError(source + ": class_log_prior must be 2x1");
  model.class_log_prior = prior;
  model.feature_log_prob = r.matrix("feature_log_prob");
  if (model.feature_log_prob.rows() != 2) throw DataError(source + ": feature_log_prob must have 2 rows");
  return model;
}

}  // namespace satira
