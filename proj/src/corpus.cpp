#include "satira/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "satira/error.hpp"
#include "csv.hpp"
#include "utf8.hpp"

namespace satira {

std::string_view to_string(Label label) noexcept {
  return label == Label::Fake ? "fake" : "real";
}

Label parse_label(std::string_view text) {
  if (text == "fake") return Label::Fake;
  if (text == "real") return Label::Real;
  throw DataError("unknown label '" + std::string(text) + "' (expected \"fake\" or \"real\")");
}

LabeledCorpus::LabeledCorpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(documents_.size());
  for (const auto& doc : documents_) {
    if (!seen.insert(doc.id).second) throw DataError("duplicate document id '" + doc.id + "'");
    if (doc.label) ++class_counts_[index_of(*doc.label)];
  }
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  return utf8::split_whitespace(text);
}

namespace {

Document make_document(std::string id, std::string text, std::optional<Label> label) {
  Document doc{std::move(id), std::move(text), {}, label};
  doc.tokens = whitespace_tokens(doc.text);
  return doc;
}

}  // namespace

LabeledCorpus read_jsonl(std::istream& in, const std::string& source) {
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(source, line_no, "record is not a JSON object");
    const auto id = record.find("id");
    if (id == record.end() || !id->is_string())
      throw ParseError(source, line_no, "missing string field \"id\"");
    const auto text = record.find("text");
    if (text == record.end() || !text->is_string())
      throw ParseError(source, line_no, "missing string field \"text\"");

    std::optional<Label> label;
    if (const auto lab = record.find("label"); lab != record.end() && !lab->is_null()) {
      if (!lab->is_string()) throw ParseError(source, line_no, "field \"label\" is not a string");
      try {
        label = parse_label(lab->get<std::string>());
      } catch (const DataError& e) {
        throw ParseError(source, line_no, e.what());
      }
    }
    auto doc_id = id->get<std::string>();
    if (!ids.insert(doc_id).second)
      throw ParseError(source, line_no, "duplicate document id '" + doc_id + "'");
    docs.push_back(make_document(std::move(doc_id), text->get<std::string>(), label));
  }
  return LabeledCorpus(std::move(docs));
}

LabeledCorpus read_csv(std::istream& in, const std::string& source) {
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  std::vector<std::string> fields;
  std::size_t line = 1;
  std::size_t record_line = 1;

  if (!csv::next_record(in, fields, line, record_line, source)) return {};
  if (fields != std::vector<std::string>{"id", "text", "label"})
    throw ParseError(source, record_line, "CSV header must be exactly id,text,label");

  while (csv::next_record(in, fields, line, record_line, source)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 3)
      throw ParseError(source, record_line,
                       "expected 3 fields, found " + std::to_string(fields.size()));
    std::optional<Label> label;
    if (!fields[2].empty()) {
      try {
        label = parse_label(fields[2]);
      } catch (const DataError& e) {
        throw ParseError(source, record_line, e.what());
      }
    }
    if (!ids.insert(fields[0]).second)
      throw ParseError(source, record_line, "duplicate document id '" + fields[0] + "'");
    docs.push_back(make_document(std::move(fields[0]), std::move(fields[1]), label));
  }
  return LabeledCorpus(std::move(docs));
}

CorpusFormat format_from_extension(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? CorpusFormat::Csv : CorpusFormat::Jsonl;
}

LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return format == CorpusFormat::Jsonl ? read_jsonl(in, path.string())
                                       : read_csv(in, path.string());
}

std::string to_jsonl_line(const Document& doc) {
  nlohmann::ordered_json record;
  record["id"] = doc.id;
  record["text"] = doc.text;
  if (doc.label) record["label"] = std::string(to_string(*doc.label));
  return record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void write_jsonl(std::ostream& out, const LabeledCorpus& corpus) {
  for (const auto& doc : corpus) out << to_jsonl_line(doc) << '\n';
}

std::vector<Label> labels_of(const LabeledCorpus& corpus) {
  std::vector<Label> labels;
  labels.reserve(corpus.size());
  for (const auto& doc : corpus) {
    if (!doc.label) throw DataError("document '" + doc.id + "' has no label");
    labels.push_back(*doc.label);
  }
  return labels;
}

namespace {

// Fisher-Yates over an explicit engine so the permutation is identical
// across standard library implementations.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace

TrainTestSplit split(const LabeledCorpus& corpus, const SplitConfig& cfg) {
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw DataError("test_fraction must lie strictly between 0 and 1");
  for (const auto& doc : corpus)
    if (!doc.label) throw DataError("cannot split: document '" + doc.id + "' is unlabeled");

  std::mt19937_64 rng(cfg.seed);
  std::vector<bool> in_test(corpus.size(), false);

  const auto take = [&](std::vector<std::size_t> idx) {
    shuffle_indices(idx, rng);
    const auto n_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * cfg.test_fraction));
    for (std::size_t i = 0; i < n_test; ++i) in_test[idx[i]] = true;
  };

  if (cfg.stratified) {
    for (Label label : kLabels) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < corpus.size(); ++i)
        if (*corpus[i].label == label) idx.push_back(i);
      if (idx.size() < 2)
        throw DataError("stratified split needs at least 2 documents of class '" +
                        std::string(to_string(label)) + "', found " + std::to_string(idx.size()));
      take(std::move(idx));
    }
  } else {
    if (corpus.size() < 2) throw DataError("split needs at least 2 documents");
    std::vector<std::size_t> idx(corpus.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    take(std::move(idx));
  }

  std::vector<Document> train;
  std::vector<Document> test;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    (in_test[i] ? test : train).push_back(corpus[i]);
  return {LabeledCorpus(std::move(train)), LabeledCorpus(std::move(test))};
}

}  // namespace satira
