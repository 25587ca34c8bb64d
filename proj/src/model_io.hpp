#pragma once

// Versioned line-oriented model serialization:
//
//   satira-model <kind> 1
//   scalar <name> <value>
//   text <name> <value...>
//   matrix <name> <rows> <cols>
//   <row values separated by spaces>   (rows lines)
//   strings <name> <count>
//   <one string per line>              (count lines)
//   end
//
// Doubles are written with 17 significant digits so a load reproduces the
// saved bits. Readers consume entries in the order they were written.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace satira::model_io {

inline constexpr std::string_view kMagic = "satira-model";
inline constexpr int kVersion = 1;

class Writer {
 public:
  Writer(std::ostream& out, std::string_view kind);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void scalar(std::string_view name, double value);
  void text(std::string_view name, std::string_view value);
  void matrix(std::string_view name, const Eigen::Ref<const Eigen::MatrixXd>& m);
  void strings(std::string_view name, const std::vector<std::string>& values);

 private:
  std::ostream& out_;
};

class Reader {
 public:
  // Throws DataError if the header names another kind or version.
  Reader(std::istream& in, std::string source, std::string_view kind);

  double scalar(std::string_view name);
  std::string text(std::string_view name);
  Eigen::MatrixXd matrix(std::string_view name);
  std::vector<std::string> strings(std::string_view name);

 private:
  std::string next_line();
  [[noreturn]] void fail(const std::string& what) const;

  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

// Kind recorded in a model file header, e.g. "naive_bayes".
std::string peek_kind(std::istream& in, const std::string& source);

}  // namespace satira::model_io
