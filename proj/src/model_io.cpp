#include "model_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "satira/error.hpp"

namespace satira::model_io {

Writer::Writer(std::ostream& out, std::string_view kind) : out_(out) {
  out_ << kMagic << ' ' << kind << ' ' << kVersion << '\n';
}

Writer::~Writer() { out_ << "end\n"; }

void Writer::scalar(std::string_view name, double value) {
  out_ << fmt::format("scalar {} {:.17g}\n", name, value);
}

void Writer::text(std::string_view name, std::string_view value) {
  out_ << "text " << name << ' ' << value << '\n';
}

void Writer::matrix(std::string_view name, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  out_ << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  std::string row;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    row.clear();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) row.push_back(' ');
      fmt::format_to(std::back_inserter(row), "{:.17g}", m(r, c));
    }
    out_ << row << '\n';
  }
}

void Writer::strings(std::string_view name, const std::vector<std::string>& values) {
  out_ << "strings " << name << ' ' << values.size() << '\n';
  for (const auto& v : values) out_ << v << '\n';
}

Reader::Reader(std::istream& in, std::string source, std::string_view kind)
    : in_(in), source_(std::move(source)) {
  std::string first = next_line();
  while (first.starts_with("# ")) first = next_line();  // leading metadata comments
  std::istringstream ss(first);
  std::string magic, got_kind;
  int version = 0;
  ss >> magic >> got_kind >> version;
  if (magic != kMagic) fail("not a satira model file");
  if (got_kind != kind) fail(fmt::format("model kind is '{}', expected '{}'", got_kind, kind));
  if (version != kVersion) fail(fmt::format("unsupported model format version {}", version));
}

std::string Reader::next_line() {
  std::string line;
  if (!std::getline(in_, line)) {
    ++line_;
    fail("unexpected end of model file");
  }
  ++line_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void Reader::fail(const std::string& what) const { throw ParseError(source_, line_, what); }

double Reader::scalar(std::string_view name) {
  std::istringstream ss(next_line());
  std::string tag, got;
  double value = 0.0;
  if (!(ss >> tag >> got >> value) || tag != "scalar" || got != name)
    fail(fmt::format("expected scalar '{}'", name));
  return value;
}

std::string Reader::text(std::string_view name) {
  const std::string line = next_line();
  const std::string prefix = fmt::format("text {} ", name);
  if (line.rfind(prefix, 0) != 0) {
    if (line == fmt::format("text {}", name)) return {};
    fail(fmt::format("expected text '{}'", name));
  }
  return line.substr(prefix.size());
}

Eigen::MatrixXd Reader::matrix(std::string_view name) {
  std::istringstream ss(next_line());
  std::string tag, got;
  Eigen::Index rows = 0, cols = 0;
  if (!(ss >> tag >> got >> rows >> cols) || tag != "matrix" || got != name || rows < 0 || cols < 0)
    fail(fmt::format("expected matrix '{}'", name));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    std::istringstream row(next_line());
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::string token;
      if (!(row >> token)) fail(fmt::format("matrix '{}' row {} is short", name, r));
      try {
        m(r, c) = std::stod(token);
      } catch (const std::exception&) {
        fail("bad number '" + token + "'");
      }
    }
  }
  return m;
}

std::vector<std::string> Reader::strings(std::string_view name) {
  std::istringstream ss(next_line());
  std::string tag, got;
  std::size_t count = 0;
  if (!(ss >> tag >> got >> count) || tag != "strings" || got != name)
    fail(fmt::format("expected strings '{}'", name));
  std::vector<std::string> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) values.push_back(next_line());
  return values;
}

std::string peek_kind(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  do {
    if (!std::getline(in, line)) throw ParseError(source, line_no + 1, "empty model file");
    ++line_no;
  } while (line.starts_with("# "));
  std::istringstream ss(line);
  std::string magic, kind;
  ss >> magic >> kind;
  if (magic != kMagic) throw ParseError(source, line_no, "not a satira model file");
  return kind;
}

}  // namespace satira::model_io
